//! Set-semantics relations over atomic and paired values, databases,
//! distributions and a nested-loop reference evaluator.

mod csv;
mod distribution;
mod eval;

pub use self::csv::{parse_csv, to_csv};
pub use distribution::{entropy, Distribution, DEFAULT_ENTROPY_BITS};
pub use eval::naive_eval;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::query::Query;
use crate::vars::{VarSet, VarUniverse};

/// A domain value. Atoms order before pairs; integers before text.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Int(i64),
    Text(Arc<str>),
    Pair(Arc<(Value, Value)>),
}

impl Value {
    pub fn pair(a: Value, b: Value) -> Value {
        Value::Pair(Arc::new((a, b)))
    }

    pub fn text(s: &str) -> Value {
        Value::Text(Arc::from(s))
    }

    /// Parses `42`, `abc` or a nested pair `(a,(1,2))`.
    pub fn parse(s: &str) -> Result<Value> {
        let s = s.trim();
        if let Some(inner) = s.strip_prefix('(') {
            let inner = inner
                .strip_suffix(')')
                .ok_or_else(|| Error::Parse(format!("unbalanced pair `{s}`")))?;
            let mut depth = 0i32;
            for (i, c) in inner.char_indices() {
                match c {
                    '(' => depth += 1,
                    ')' => depth -= 1,
                    ',' if depth == 0 => {
                        return Ok(Value::pair(Value::parse(&inner[..i])?, Value::parse(&inner[i + 1..])?))
                    }
                    _ => {}
                }
            }
            return Err(Error::Parse(format!("pair without a comma `{s}`")));
        }
        if s.is_empty() || s.contains(['(', ')', ',']) {
            return Err(Error::Parse(format!("invalid value `{s}`")));
        }
        Ok(match s.parse::<i64>() {
            Ok(n) => Value::Int(n),
            Err(_) => Value::text(s),
        })
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Text(s) => write!(f, "{s}"),
            Value::Pair(p) => write!(f, "({},{})", p.0, p.1),
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub type Tuple = Vec<Value>;

/// A finite set of tuples over a named schema, kept sorted and duplicate-free.
/// `VarSet` arguments refer to schema positions.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Relation {
    schema: Vec<String>,
    tuples: Vec<Tuple>,
}

fn check_schema(schema: &[String]) -> Result<()> {
    let mut seen = HashSet::new();
    for a in schema {
        if a.is_empty() {
            return Err(Error::Invalid("empty attribute name".into()));
        }
        if !seen.insert(a) {
            return Err(Error::Invalid(format!("duplicate attribute `{a}`")));
        }
    }
    Ok(())
}

impl Relation {
    pub fn new(schema: Vec<String>, mut tuples: Vec<Tuple>) -> Result<Self> {
        check_schema(&schema)?;
        if let Some(t) = tuples.iter().find(|t| t.len() != schema.len()) {
            return Err(Error::Invalid(format!(
                "tuple {t:?} has arity {}, schema has {}",
                t.len(),
                schema.len()
            )));
        }
        tuples.sort_unstable();
        tuples.dedup();
        Ok(Relation { schema, tuples })
    }

    pub fn empty(schema: Vec<String>) -> Result<Self> {
        Self::new(schema, Vec::new())
    }

    /// Builds from string attribute names and integer tuples.
    pub fn from_ints<S: AsRef<str>>(schema: &[S], rows: &[&[i64]]) -> Result<Self> {
        let schema = schema.iter().map(|s| s.as_ref().to_string()).collect();
        Self::new(schema, rows.iter().map(|r| r.iter().map(|v| Value::Int(*v)).collect()).collect())
    }

    pub(crate) fn from_parts_unsorted(schema: Vec<String>, mut tuples: Vec<Tuple>) -> Self {
        tuples.sort_unstable();
        tuples.dedup();
        Relation { schema, tuples }
    }

    pub fn schema(&self) -> &[String] {
        &self.schema
    }

    pub fn arity(&self) -> usize {
        self.schema.len()
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn tuples(&self) -> &[Tuple] {
        &self.tuples
    }

    pub fn contains(&self, t: &[Value]) -> bool {
        self.tuples.binary_search_by(|x| x.as_slice().cmp(t)).is_ok()
    }

    pub fn universe(&self) -> Result<VarUniverse> {
        VarUniverse::new(&self.schema)
    }

    pub fn position(&self, attr: &str) -> Result<usize> {
        self.schema
            .iter()
            .position(|a| a == attr)
            .ok_or_else(|| Error::UniverseMismatch(format!("attribute `{attr}` not in schema")))
    }

    /// Schema positions of the named attributes, as a set.
    pub fn varset<S: AsRef<str>>(&self, names: &[S]) -> Result<VarSet> {
        let mut s = VarSet::EMPTY;
        for n in names {
            s = s.insert(self.position(n.as_ref())?);
        }
        Ok(s)
    }

    fn check_set(&self, s: VarSet) -> Result<()> {
        if s.is_subset(VarSet::full(self.arity())) {
            Ok(())
        } else {
            Err(Error::UniverseMismatch(format!("set {s:?} exceeds arity {}", self.arity())))
        }
    }

    /// Projection onto the attributes in `s`, in schema order.
    pub fn project(&self, s: VarSet) -> Result<Relation> {
        self.check_set(s)?;
        let pos: Vec<usize> = s.iter().collect();
        let schema = pos.iter().map(|&i| self.schema[i].clone()).collect();
        let tuples = self.tuples.iter().map(|t| pos.iter().map(|&i| t[i].clone()).collect()).collect();
        Ok(Relation::from_parts_unsorted(schema, tuples))
    }

    pub fn project_names<S: AsRef<str>>(&self, names: &[S]) -> Result<Relation> {
        let pos: Vec<usize> = names.iter().map(|n| self.position(n.as_ref())).collect::<Result<_>>()?;
        let schema = names.iter().map(|n| n.as_ref().to_string()).collect();
        let tuples = self.tuples.iter().map(|t| pos.iter().map(|&i| t[i].clone()).collect()).collect();
        Ok(Relation::from_parts_unsorted(schema, tuples))
    }

    fn key(t: &[Value], pos: &[usize]) -> Tuple {
        pos.iter().map(|&i| t[i].clone()).collect()
    }

    /// `max_u |{t[V] : t ∈ R, t[U] = u}|`. Errors on an empty relation.
    pub fn degree(&self, v: VarSet, u: VarSet) -> Result<u64> {
        self.check_set(v)?;
        self.check_set(u)?;
        if self.is_empty() {
            return Err(Error::Invalid("degree of an empty relation is undefined".into()));
        }
        let upos: Vec<usize> = u.iter().collect();
        let vpos: Vec<usize> = v.difference(u).iter().collect();
        let mut groups: HashMap<Tuple, HashSet<Tuple>> = HashMap::new();
        for t in &self.tuples {
            groups.entry(Self::key(t, &upos)).or_default().insert(Self::key(t, &vpos));
        }
        Ok(groups.values().map(|g| g.len() as u64).max().unwrap_or(0))
    }

    /// Whether `U -> V` holds. Vacuously true on an empty relation.
    pub fn satisfies_fd(&self, u: VarSet, v: VarSet) -> Result<bool> {
        if self.is_empty() {
            self.check_set(u.union(v))?;
            return Ok(true);
        }
        Ok(self.degree(v, u)? <= 1)
    }

    /// Whether `U ->> V | W` holds; `U ∪ V ∪ W` must be the whole schema and
    /// `V`, `W` disjoint outside `U`.
    pub fn satisfies_mvd(&self, u: VarSet, v: VarSet, w: VarSet) -> Result<bool> {
        self.check_set(u.union(v).union(w))?;
        let v = v.difference(u);
        let w = w.difference(u);
        if !v.is_disjoint(w) {
            return Err(Error::Invalid("MVD sides overlap".into()));
        }
        if u.union(v).union(w) != VarSet::full(self.arity()) {
            return Err(Error::Invalid("MVD must cover the whole schema".into()));
        }
        let uv = self.project(u.union(v))?;
        let uw = self.project(u.union(w))?;
        let joined = uv.natural_join(&uw).project_names(&self.schema)?;
        Ok(joined == *self)
    }

    /// Natural join on shared attribute names; output schema is this
    /// relation's schema followed by the other's remaining attributes.
    pub fn natural_join(&self, other: &Relation) -> Relation {
        let shared: Vec<(usize, usize)> = self
            .schema
            .iter()
            .enumerate()
            .filter_map(|(i, a)| other.schema.iter().position(|b| b == a).map(|j| (i, j)))
            .collect();
        let extra: Vec<usize> =
            (0..other.arity()).filter(|j| !shared.iter().any(|(_, k)| k == j)).collect();
        let mut schema = self.schema.clone();
        schema.extend(extra.iter().map(|&j| other.schema[j].clone()));
        let lpos: Vec<usize> = shared.iter().map(|p| p.0).collect();
        let rpos: Vec<usize> = shared.iter().map(|p| p.1).collect();
        let mut index: HashMap<Tuple, Vec<usize>> = HashMap::new();
        for (k, t) in other.tuples.iter().enumerate() {
            index.entry(Self::key(t, &rpos)).or_default().push(k);
        }
        let mut out = Vec::new();
        for t in &self.tuples {
            if let Some(ms) = index.get(&Self::key(t, &lpos)) {
                for &k in ms {
                    let mut r = t.clone();
                    r.extend(extra.iter().map(|&j| other.tuples[k][j].clone()));
                    out.push(r);
                }
            }
        }
        Relation::from_parts_unsorted(schema, out)
    }

    /// Tuples of this relation that agree with some tuple of `other` on the
    /// shared attributes.
    pub fn semijoin(&self, other: &Relation) -> Relation {
        let shared: Vec<(usize, usize)> = self
            .schema
            .iter()
            .enumerate()
            .filter_map(|(i, a)| other.schema.iter().position(|b| b == a).map(|j| (i, j)))
            .collect();
        let lpos: Vec<usize> = shared.iter().map(|p| p.0).collect();
        let rpos: Vec<usize> = shared.iter().map(|p| p.1).collect();
        let keys: HashSet<Tuple> = other.tuples.iter().map(|t| Self::key(t, &rpos)).collect();
        let tuples = self.tuples.iter().filter(|t| keys.contains(&Self::key(t, &lpos))).cloned().collect();
        Relation { schema: self.schema.clone(), tuples }
    }

    /// Union of two relations with identical schemas.
    pub fn union(&self, other: &Relation) -> Result<Relation> {
        if self.schema != other.schema {
            return Err(Error::UniverseMismatch("union of relations with different schemas".into()));
        }
        let mut t = self.tuples.clone();
        t.extend(other.tuples.iter().cloned());
        Ok(Relation::from_parts_unsorted(self.schema.clone(), t))
    }

    /// Renames attributes positionally. Repeated names select tuples whose
    /// values agree at those positions and keep the first occurrence.
    pub fn bind(&self, names: &[String]) -> Result<Relation> {
        if names.len() != self.arity() {
            return Err(Error::Invalid(format!(
                "binding {} names to a relation of arity {}",
                names.len(),
                self.arity()
            )));
        }
        let mut first: Vec<usize> = Vec::new();
        let mut schema = Vec::new();
        let mut eq: Vec<(usize, usize)> = Vec::new();
        for (i, n) in names.iter().enumerate() {
            match schema.iter().position(|s: &String| s == n) {
                Some(k) => eq.push((first[k], i)),
                None => {
                    schema.push(n.clone());
                    first.push(i);
                }
            }
        }
        if eq.is_empty() {
            return Ok(Relation { schema, tuples: self.tuples.clone() });
        }
        let tuples = self
            .tuples
            .iter()
            .filter(|t| eq.iter().all(|(a, b)| t[*a] == t[*b]))
            .map(|t| first.iter().map(|&i| t[i].clone()).collect())
            .collect();
        Ok(Relation::from_parts_unsorted(schema, tuples))
    }

    /// `R × S` over disjoint schemas.
    pub fn cartesian_product(&self, other: &Relation) -> Result<Relation> {
        if self.schema.iter().any(|a| other.schema.contains(a)) {
            return Err(Error::Invalid("cartesian product needs disjoint schemas".into()));
        }
        Ok(self.natural_join(other))
    }

    /// `R ⊗ S` over identical schemas: position-wise pairs of values.
    pub fn domain_product(&self, other: &Relation) -> Result<Relation> {
        if self.schema != other.schema {
            return Err(Error::UniverseMismatch("domain product needs identical schemas".into()));
        }
        let mut out = Vec::with_capacity(self.len() * other.len());
        for a in &self.tuples {
            for b in &other.tuples {
                out.push(a.iter().zip(b).map(|(x, y)| Value::pair(x.clone(), y.clone())).collect());
            }
        }
        Ok(Relation::from_parts_unsorted(self.schema.clone(), out))
    }

    /// The basic normal relation `T^V_N` over `schema`: `N` tuples, the `i`-th
    /// holding `i` on the attributes in `V` and `0` elsewhere.
    pub fn basic_normal(schema: &[String], v: VarSet, n: u64) -> Result<Relation> {
        check_schema(schema)?;
        if !v.is_subset(VarSet::full(schema.len())) {
            return Err(Error::UniverseMismatch("set exceeds schema".into()));
        }
        let n = i64::try_from(n).map_err(|_| Error::ResourceCap("relation too large".into()))?;
        let tuples = (0..n)
            .map(|i| (0..schema.len()).map(|k| Value::Int(if v.contains(k) { i } else { 0 })).collect())
            .collect();
        Relation::new(schema.to_vec(), tuples)
    }
}

/// Named relations.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Database {
    pub relations: BTreeMap<String, Relation>,
}

impl Database {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: &str, r: Relation) {
        self.relations.insert(name.to_string(), r);
    }

    pub fn get(&self, name: &str) -> Option<&Relation> {
        self.relations.get(name)
    }

    /// Checks that every relation used by `q` is present with the right arity.
    pub fn check_query(&self, q: &Query) -> Result<()> {
        for (name, arity) in q.relations() {
            match self.get(&name) {
                None => return Err(Error::Invalid(format!("database has no relation `{name}`"))),
                Some(r) if r.arity() != arity => {
                    return Err(Error::Invalid(format!(
                        "relation `{name}` has arity {}, query uses {arity}",
                        r.arity()
                    )))
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// The relation of atom `j`, with columns renamed to the atom's variables.
    pub fn bound_atom(&self, q: &Query, j: usize) -> Result<Relation> {
        let a = &q.atoms[j];
        let r = self
            .get(&a.relation)
            .ok_or_else(|| Error::Invalid(format!("database has no relation `{}`", a.relation)))?;
        r.bind(&a.vars)
    }

    /// Loads `<name>.csv` from `dir` for every relation of `q`.
    pub fn load_dir(dir: &Path, q: &Query) -> Result<Database> {
        let mut db = Database::new();
        for (name, arity) in q.relations() {
            let path = dir.join(format!("{name}.csv"));
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            let r = parse_csv(&text, None)?;
            let r = if r.arity() == 0 && text.trim().is_empty() {
                Relation::empty((0..arity).map(|i| format!("c{i}")).collect())?
            } else {
                r
            };
            db.insert(&name, r);
        }
        db.check_query(q)?;
        Ok(db)
    }

    /// Writes every relation to `<dir>/<name>.csv`.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (name, r) in &self.relations {
            std::fs::write(dir.join(format!("{name}.csv")), to_csv(r))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(schema: &[&str], rows: &[&[i64]]) -> Relation {
        Relation::from_ints(schema, rows).unwrap()
    }

    #[test]
    fn value_order_and_parse() {
        let p = Value::parse("(1,(a,2))").unwrap();
        assert_eq!(p.to_string(), "(1,(a,2))");
        assert!(Value::Int(5) < Value::text("a"));
        assert!(Value::text("zz") < p);
        assert!(Value::parse("(1,2").is_err());
        assert!(Value::parse("(12)").is_err());
    }

    #[test]
    fn project_and_degree() {
        let rel = r(&["A", "B"], &[&[1, 1], &[1, 2], &[2, 1]]);
        assert_eq!(rel.project(VarSet(0b01)).unwrap().len(), 2);
        assert_eq!(rel.degree(VarSet(0b10), VarSet(0b01)).unwrap(), 2);
        assert_eq!(rel.degree(VarSet(0b11), VarSet::EMPTY).unwrap(), 3);
        assert!(!rel.satisfies_fd(VarSet(0b01), VarSet(0b10)).unwrap());
        assert!(rel.satisfies_fd(VarSet(0b11), VarSet(0b10)).unwrap());
        let empty = Relation::empty(vec!["A".into()]).unwrap();
        assert!(empty.degree(VarSet(1), VarSet::EMPTY).is_err());
        assert!(empty.satisfies_fd(VarSet::EMPTY, VarSet(1)).unwrap());
    }

    #[test]
    fn mvd_check() {
        // A ->> B | C holds for a product per A-value.
        let rel = r(&["A", "B", "C"], &[&[0, 1, 1], &[0, 1, 2], &[0, 2, 1], &[0, 2, 2], &[1, 5, 5]]);
        assert!(rel.satisfies_mvd(VarSet(1), VarSet(2), VarSet(4)).unwrap());
        let broken = r(&["A", "B", "C"], &[&[0, 1, 1], &[0, 2, 2]]);
        assert!(!broken.satisfies_mvd(VarSet(1), VarSet(2), VarSet(4)).unwrap());
        assert!(rel.satisfies_mvd(VarSet(1), VarSet(2), VarSet(2)).is_err());
        assert!(rel.satisfies_mvd(VarSet(1), VarSet(2), VarSet::EMPTY).is_err());
    }

    #[test]
    fn joins() {
        let a = r(&["X", "Y"], &[&[1, 2], &[2, 3]]);
        let b = r(&["Y", "Z"], &[&[2, 7], &[2, 8], &[9, 9]]);
        let j = a.natural_join(&b);
        assert_eq!(j.schema(), ["X", "Y", "Z"]);
        assert_eq!(j.len(), 2);
        assert_eq!(a.semijoin(&b).len(), 1);
        let empty = Relation::empty(vec!["Q".into()]).unwrap();
        assert!(a.semijoin(&empty).is_empty());
        assert_eq!(a.cartesian_product(&empty).unwrap().len(), 0);
        assert!(a.cartesian_product(&b).is_err());
    }

    #[test]
    fn domain_product_sizes() {
        let a = r(&["X", "Y"], &[&[0, 0], &[1, 1]]);
        let b = r(&["X", "Y"], &[&[0, 0], &[0, 1], &[0, 2]]);
        let p = a.domain_product(&b).unwrap();
        assert_eq!(p.len(), 6);
        assert!(p.contains(&[Value::pair(Value::Int(1), Value::Int(0)), Value::pair(Value::Int(1), Value::Int(2))]));
    }

    #[test]
    fn bind_repeated_names() {
        let a = r(&["c0", "c1"], &[&[1, 1], &[1, 2]]);
        let b = a.bind(&["X".into(), "X".into()]).unwrap();
        assert_eq!(b.schema(), ["X"]);
        assert_eq!(b.len(), 1);
    }

    #[test]
    fn basic_normal_relation() {
        let schema: Vec<String> = ["X", "Y", "Z"].iter().map(|s| s.to_string()).collect();
        let t = Relation::basic_normal(&schema, VarSet(0b011), 3).unwrap();
        assert_eq!(t.len(), 3);
        assert!(t.contains(&[Value::Int(2), Value::Int(2), Value::Int(0)]));
    }
}
