use super::{agm_bound, normal_bound, StatSpec};
use crate::error::{Error, Result};
use crate::query::{Atom, Query};
use crate::rational::Rational;
use crate::relation::{Database, Relation, Tuple, Value};
use crate::vars::VarSet;

/// Largest relation the generators will materialize.
pub const MAX_WORST_CASE_TUPLES: u64 = 1 << 22;

fn floor_pow2(r: &Rational) -> Result<u64> {
    let v: u64 = r
        .pow2_floor()
        .try_into()
        .map_err(|_| Error::ResourceCap(format!("2^{r} is too large to materialize")))?;
    Ok(v.max(1))
}

/// Column names for an atom's stored relation: its variables, suffixed by
/// position when a variable repeats.
fn atom_schema(a: &Atom) -> Vec<String> {
    let dup = a.vars.iter().enumerate().any(|(i, v)| a.vars[..i].contains(v));
    if dup {
        a.vars.iter().enumerate().map(|(i, v)| format!("{v}_{i}")).collect()
    } else {
        a.vars.clone()
    }
}

fn check_size(n: u64) -> Result<()> {
    if n > MAX_WORST_CASE_TUPLES {
        return Err(Error::ResourceCap(format!("{n} tuples exceed the cap of {MAX_WORST_CASE_TUPLES}")));
    }
    Ok(())
}

/// The product instance `R_j = Π_{X_i ∈ Y_j} [⌊2^{v*_i}⌋]` built from the
/// optimal dual `v*` of the AGM program.
pub fn worst_case_product(q: &Query, cards: &[Rational]) -> Result<Database> {
    let report = agm_bound(q, cards)?;
    let h = report.h_star.as_ref().expect("AGM bound with cardinalities is finite");
    let n = q.num_vars();
    let sizes: Vec<u64> = (0..n).map(|i| floor_pow2(h.get(VarSet::singleton(i)))).collect::<Result<_>>()?;
    let mut db = Database::new();
    for (j, a) in q.atoms.iter().enumerate() {
        let set = q.atom_set(j);
        let total = set.iter().try_fold(1u64, |acc, i| acc.checked_mul(sizes[i]));
        check_size(total.unwrap_or(u64::MAX))?;
        let vars: Vec<usize> = set.iter().collect();
        let mut tuples = Vec::new();
        let mut idx = vec![0u64; vars.len()];
        loop {
            let t: Tuple = a
                .vars
                .iter()
                .map(|v| {
                    let i = q.universe().index_of(v).expect("atom variable in universe");
                    let k = vars.iter().position(|&x| x == i).unwrap();
                    Value::Int(idx[k] as i64)
                })
                .collect();
            tuples.push(t);
            let mut k = 0;
            while k < vars.len() {
                idx[k] += 1;
                if idx[k] < sizes[vars[k]] {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == vars.len() {
                break;
            }
        }
        db.insert(&a.relation, Relation::new(atom_schema(a), tuples)?);
    }
    Ok(db)
}

/// The normal instance for simple statistics: `R = ⊗_V T^V_{⌊2^{a*_V}⌋}`
/// over the optimal normal decomposition `a*`, and `R_j = Π_{Y_j}(R)`.
pub fn worst_case_normal(q: &Query, spec: &StatSpec) -> Result<Database> {
    if !spec.is_simple() {
        return Err(Error::Invalid("normal worst case needs simple statistics".into()));
    }
    let report = normal_bound(q, spec)?;
    let d = report
        .normal
        .ok_or_else(|| Error::Invalid("statistics do not bound the output".into()))?;
    let head = &q.head;
    let mut factors = Vec::new();
    let mut total: u64 = 1;
    for (v, a) in d.support() {
        let k = floor_pow2(a)?;
        total = total.saturating_mul(k);
        check_size(total)?;
        if k > 1 {
            factors.push(Relation::basic_normal(head, v, k)?);
        }
    }
    let mut r = match factors.pop() {
        Some(f) => f,
        None => Relation::basic_normal(head, VarSet::EMPTY, 1)?,
    };
    while let Some(f) = factors.pop() {
        r = f.domain_product(&r)?;
    }
    let mut db = Database::new();
    for a in &q.atoms {
        let proj = r.project_names(&a.vars)?;
        db.insert(&a.relation, Relation::new(atom_schema(a), proj.tuples().to_vec())?);
    }
    Ok(db)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::satisfies_stats;
    use crate::rational::int;
    use crate::relation::naive_eval;

    fn triangle() -> Query {
        Query::parse("Q(X,Y,Z) :- R(X,Y), S(Y,Z), T(Z,X).").unwrap()
    }

    #[test]
    fn product_triangle_64() {
        let q = triangle();
        let db = worst_case_product(&q, &[int(64), int(64), int(64)]).unwrap();
        assert_eq!(db.get("R").unwrap().len(), 64);
        assert_eq!(naive_eval(&q, &db).unwrap().len(), 512);
    }

    #[test]
    fn product_single_atom() {
        let q = Query::parse("Q(X,Y) :- R(X,Y)").unwrap();
        let db = worst_case_product(&q, &[int(7)]).unwrap();
        let n = db.get("R").unwrap().len();
        assert!(n <= 7 && 4 * n >= 7);
    }

    #[test]
    fn normal_triangle_16() {
        let q = triangle();
        let spec = StatSpec::parse("card * <= 16", &q).unwrap();
        let db = worst_case_normal(&q, &spec).unwrap();
        assert!(satisfies_stats(&q, &db, &spec).unwrap().is_empty());
        assert_eq!(naive_eval(&q, &db).unwrap().len(), 64);
    }

    #[test]
    fn normal_all_ones() {
        let q = triangle();
        let spec = StatSpec::parse("card * <= 1", &q).unwrap();
        let db = worst_case_normal(&q, &spec).unwrap();
        assert_eq!(naive_eval(&q, &db).unwrap().len(), 1);
        let nonsimple = StatSpec::parse("card * <= 4\ndeg R (Z | X,Y) <= 2", &Query::parse("Q(X,Y,Z) :- R(X,Y,Z)").unwrap());
        let q1 = Query::parse("Q(X,Y,Z) :- R(X,Y,Z)").unwrap();
        assert!(worst_case_normal(&q1, &nonsimple.unwrap()).is_err());
    }

    #[test]
    fn repeated_variable_atom() {
        let q = Query::parse("Q(X,Y) :- R(X,X), S(X,Y)").unwrap();
        let db = worst_case_product(&q, &[int(4), int(16)]).unwrap();
        assert_eq!(db.get("R").unwrap().schema(), ["X_0", "X_1"]);
        assert_eq!(naive_eval(&q, &db).unwrap().len(), 16);
    }
}
