use std::collections::HashMap;

use super::csv::split_fields;
use super::{Relation, Tuple, Value};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::setfn::SetFunction;
use crate::vars::VarSet;

/// Default fractional bits for entropy values: total error stays below 2^-60.
pub const DEFAULT_ENTROPY_BITS: u32 = 66;

/// `-Σ p log2 p` with each logarithm approximated to `bits` fractional bits.
/// Exact when every probability is a power of two.
pub fn entropy<'a>(probs: impl IntoIterator<Item = &'a Rational>, bits: u32) -> Rational {
    let mut h = Rational::zero();
    for p in probs {
        if p.is_positive() {
            h -= p * &p.log2_approx(bits);
        }
    }
    h
}

/// A probability distribution on the tuples of a relation (its support).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distribution {
    relation: Relation,
    probs: Vec<Rational>,
}

impl Distribution {
    /// Pairs each tuple with a weight. Duplicate tuples have their weights
    /// summed; weights must be positive and total one.
    pub fn new(schema: Vec<String>, weighted: Vec<(Tuple, Rational)>) -> Result<Self> {
        let mut acc: HashMap<Tuple, Rational> = HashMap::new();
        for (t, p) in weighted {
            if !p.is_positive() {
                return Err(Error::Invalid(format!("non-positive probability {p} for {t:?}")));
            }
            *acc.entry(t).or_insert_with(Rational::zero) += p;
        }
        let total: Rational = acc.values().sum();
        if total != Rational::one() {
            return Err(Error::Invalid(format!("probabilities sum to {total}, not 1")));
        }
        let relation = Relation::new(schema, acc.keys().cloned().collect())?;
        let probs = relation.tuples().iter().map(|t| acc[t].clone()).collect();
        Ok(Distribution { relation, probs })
    }

    pub fn uniform(r: &Relation) -> Result<Self> {
        if r.is_empty() {
            return Err(Error::Invalid("uniform distribution on an empty relation".into()));
        }
        let p = Rational::new(1, r.len() as i64);
        Ok(Distribution { relation: r.clone(), probs: vec![p; r.len()] })
    }

    /// CSV whose last column, `__p`, holds each row's probability.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty distribution file".into()))?;
        let mut names: Vec<String> = split_fields(header)?.into_iter().map(String::from).collect();
        if names.last().map(String::as_str) != Some("__p") {
            return Err(Error::Parse("last column must be `__p`".into()));
        }
        names.pop();
        let mut rows = Vec::new();
        for line in lines {
            let mut f = split_fields(line)?;
            if f.len() != names.len() + 1 {
                return Err(Error::Parse(format!("row `{line}` has the wrong number of fields")));
            }
            let p: Rational = f.pop().unwrap().parse()?;
            rows.push((f.into_iter().map(Value::parse).collect::<Result<Tuple>>()?, p));
        }
        Distribution::new(names, rows)
    }

    pub fn relation(&self) -> &Relation {
        &self.relation
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Tuple, &Rational)> {
        self.relation.tuples().iter().zip(&self.probs)
    }

    /// Marginal probabilities of the projection onto `s` (schema positions).
    pub fn marginal(&self, s: VarSet) -> HashMap<Tuple, Rational> {
        let pos: Vec<usize> = s.iter().collect();
        let mut m: HashMap<Tuple, Rational> = HashMap::new();
        for (t, p) in self.iter() {
            let k: Tuple = pos.iter().map(|&i| t[i].clone()).collect();
            *m.entry(k).or_insert_with(Rational::zero) += p;
        }
        m
    }

    /// `U ↦ H(Π_U)` over the schema universe, with `bits` fractional bits per
    /// logarithm.
    pub fn entropy_vector(&self, bits: u32) -> Result<SetFunction> {
        let u = self.relation.universe()?;
        Ok(SetFunction::from_fn(&u, |s| {
            if s.is_empty() {
                return Rational::zero();
            }
            let mut ps: Vec<Rational> = self.marginal(s).into_values().collect();
            ps.sort();
            entropy(&ps, bits)
        }))
    }

    /// Product distribution on the domain product of the supports.
    pub fn product(&self, other: &Distribution) -> Result<Distribution> {
        if self.relation.schema() != other.relation.schema() {
            return Err(Error::UniverseMismatch("product needs identical schemas".into()));
        }
        let mut rows = Vec::with_capacity(self.probs.len() * other.probs.len());
        for (a, p) in self.iter() {
            for (b, q) in other.iter() {
                let t = a.iter().zip(b).map(|(x, y)| Value::pair(x.clone(), y.clone())).collect();
                rows.push((t, p * q));
            }
        }
        Distribution::new(self.relation.schema().to_vec(), rows)
    }

    /// The copy distribution `p'(x, y, y') = p(x, y) p(x, y') / p(x)`, where
    /// `X ∪ Y` is the schema. The copied attributes get primed names and are
    /// appended after the original schema.
    pub fn copy(&self, x: VarSet, y: VarSet) -> Result<Distribution> {
        let full = VarSet::full(self.relation.arity());
        if !x.is_disjoint(y) || x.union(y) != full {
            return Err(Error::Invalid("copy needs X and Y to partition the schema".into()));
        }
        let schema = self.relation.schema();
        let mut names = schema.to_vec();
        for i in y.iter() {
            let mut n = format!("{}'", schema[i]);
            while names.contains(&n) {
                n.push('\'');
            }
            names.push(n);
        }
        let xpos: Vec<usize> = x.iter().collect();
        let ypos: Vec<usize> = y.iter().collect();
        let px = self.marginal(x);
        let mut groups: HashMap<Tuple, Vec<(&Tuple, &Rational)>> = HashMap::new();
        for (t, p) in self.iter() {
            groups.entry(xpos.iter().map(|&i| t[i].clone()).collect()).or_default().push((t, p));
        }
        let mut rows = Vec::new();
        for (key, members) in &groups {
            let pxv = &px[key];
            for (t1, p1) in members {
                for (t2, p2) in members {
                    let mut t = (*t1).clone();
                    t.extend(ypos.iter().map(|&i| t2[i].clone()));
                    rows.push((t, *p1 * *p2 / pxv));
                }
            }
        }
        Distribution::new(names, rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn parity() -> Distribution {
        let r = Relation::from_ints(&["X", "Y", "Z"], &[&[0, 0, 0], &[0, 1, 1], &[1, 0, 1], &[1, 1, 0]]).unwrap();
        Distribution::uniform(&r).unwrap()
    }

    #[test]
    fn parity_entropies() {
        let h = parity().entropy_vector(DEFAULT_ENTROPY_BITS).unwrap();
        for s in (1..8u32).map(VarSet) {
            assert_eq!(*h.get(s), int(s.len().min(2) as i64));
        }
    }

    #[test]
    fn csv_and_validation() {
        let d = Distribution::parse_csv("A,B,__p\n0,0,1/4\n1,1,3/4\n").unwrap();
        assert_eq!(d.probs(), &[rat(1, 4), rat(3, 4)]);
        assert!(Distribution::parse_csv("A,__p\n0,1/2\n").is_err());
        assert!(Distribution::parse_csv("A,p\n0,1\n").is_err());
        assert!(Distribution::parse_csv("A,__p\n0,0\n1,1\n").is_err());
    }

    #[test]
    fn product_adds_entropy() {
        let d = parity();
        let p = d.product(&d).unwrap();
        let h = d.entropy_vector(64).unwrap();
        let hp = p.entropy_vector(64).unwrap();
        assert_eq!(hp, h.add(&h).unwrap());
    }

    #[test]
    fn copy_marginals() {
        let d = parity();
        let x = VarSet(0b001);
        let y = VarSet(0b110);
        let c = d.copy(x, y).unwrap();
        assert_eq!(c.relation().schema(), ["X", "Y", "Z", "Y'", "Z'"]);
        // Both (X,Y,Z) and (X,Y',Z') have the original law.
        let orig = d.marginal(VarSet(0b111));
        assert_eq!(c.marginal(VarSet(0b00111)), orig);
        let mut relabeled = HashMap::new();
        for (t, p) in c.marginal(VarSet(0b11001)) {
            relabeled.insert(t, p);
        }
        assert_eq!(relabeled, orig);
        assert!(d.copy(x, x).is_err());
    }
}
