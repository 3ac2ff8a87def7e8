use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::relation::{Relation, Tuple, Value};
use crate::vars::{VarSet, VarUniverse};

/// A non-negative function on the tuples over `edge`; keys list values in
/// universe order of the edge's variables. Missing keys are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tensor {
    pub edge: VarSet,
    pub entries: BTreeMap<Tuple, Rational>,
}

impl Tensor {
    pub fn new(edge: VarSet, entries: BTreeMap<Tuple, Rational>) -> Result<Self> {
        for (k, v) in &entries {
            if k.len() != edge.len() {
                return Err(Error::Invalid(format!("key {k:?} does not match the edge arity {}", edge.len())));
            }
            if v.is_negative() {
                return Err(Error::Invalid(format!("negative tensor entry {v}")));
            }
        }
        Ok(Tensor { edge, entries })
    }

    /// The 0/1 indicator of a relation whose attributes are variables of `u`.
    pub fn indicator(u: &VarUniverse, r: &Relation) -> Result<Self> {
        let edge = u.set(r.schema())?;
        let order: Vec<usize> =
            edge.iter().map(|i| r.position(u.name(i))).collect::<Result<_>>()?;
        let entries = r
            .tuples()
            .iter()
            .map(|t| (order.iter().map(|&p| t[p].clone()).collect(), Rational::one()))
            .collect();
        Tensor::new(edge, entries)
    }

    /// `(Σ a^{1/w})^w`, the max norm when `w = 0`.
    fn norm(&self, w: &Rational) -> f64 {
        let vals = self.entries.values().map(Rational::to_f64);
        if w.is_zero() {
            return vals.fold(0.0, f64::max);
        }
        let p = 1.0 / w.to_f64();
        vals.map(|a| a.powf(p)).sum::<f64>().powf(w.to_f64())
    }
}

/// Both sides of `Σ_x Π_j a_j(x_{Y_j}) ≤ Π_j ‖a_j‖_{1/w_j}`.
#[derive(Clone, Debug, PartialEq)]
pub struct FriedgutCheck {
    /// Exact left-hand side.
    pub lhs: Rational,
    pub rhs: f64,
    pub holds: bool,
}

/// Evaluates Friedgut's inequality for a fractional edge cover `w`.
pub fn friedgut_check(n: usize, tensors: &[Tensor], w: &[Rational]) -> Result<FriedgutCheck> {
    if tensors.len() != w.len() {
        return Err(Error::Invalid("one weight per tensor is required".into()));
    }
    if w.iter().any(Rational::is_negative) {
        return Err(Error::Invalid("cover weights must be non-negative".into()));
    }
    for i in 0..n {
        let c: Rational = tensors.iter().zip(w).filter(|(t, _)| t.edge.contains(i)).map(|(_, x)| x.clone()).sum();
        if c < Rational::one() {
            return Err(Error::Invalid(format!("variable {i} is covered with weight {c} < 1")));
        }
    }
    let mut domains: Vec<BTreeSet<Value>> = vec![BTreeSet::new(); n];
    for t in tensors {
        for k in t.entries.keys() {
            for (v, i) in k.iter().zip(t.edge.iter()) {
                domains[i].insert(v.clone());
            }
        }
    }
    let domains: Vec<Vec<Value>> = domains.into_iter().map(|d| d.into_iter().collect()).collect();
    // Tensors that become fully assigned at each variable.
    let mut closing: Vec<Vec<usize>> = vec![Vec::new(); n.max(1)];
    for (j, t) in tensors.iter().enumerate() {
        match t.edge.last() {
            Some(l) => closing[l].push(j),
            None => return Err(Error::Invalid("empty hyperedge".into())),
        }
    }
    let mut assign: Vec<Value> = Vec::with_capacity(n);
    let lhs = sum_products(0, &domains, tensors, &closing, &mut assign, Rational::one());
    let rhs: f64 = tensors.iter().zip(w).map(|(t, x)| t.norm(x)).product();
    let l = lhs.to_f64();
    let holds = l <= rhs * (1.0 + 1e-9) + 1e-12;
    Ok(FriedgutCheck { lhs, rhs, holds })
}

fn sum_products(
    i: usize,
    domains: &[Vec<Value>],
    tensors: &[Tensor],
    closing: &[Vec<usize>],
    assign: &mut Vec<Value>,
    acc: Rational,
) -> Rational {
    if i == domains.len() {
        return acc;
    }
    let mut total = Rational::zero();
    for v in &domains[i] {
        assign.push(v.clone());
        let mut p = acc.clone();
        for &j in &closing[i] {
            let key: Tuple = tensors[j].edge.iter().map(|k| assign[k].clone()).collect();
            match tensors[j].entries.get(&key) {
                Some(a) if !a.is_zero() => p *= a,
                _ => {
                    p = Rational::zero();
                    break;
                }
            }
        }
        if !p.is_zero() {
            total += sum_products(i + 1, domains, tensors, closing, assign, p);
        }
        assign.pop();
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn cauchy_schwarz() {
        let one = |v: i64| (vec![Value::Int(v)], int(1));
        let a = Tensor::new(VarSet(1), [one(0), one(1)].into_iter().collect()).unwrap();
        let c = friedgut_check(1, &[a.clone(), a], &[rat(1, 2), rat(1, 2)]).unwrap();
        assert_eq!(c.lhs, int(2));
        assert!((c.rhs - 2.0).abs() < 1e-12);
        assert!(c.holds);
    }

    #[test]
    fn rejects_non_cover() {
        let a = Tensor::new(VarSet(1), BTreeMap::new()).unwrap();
        assert!(friedgut_check(1, &[a], &[rat(1, 2)]).is_err());
    }

    #[test]
    fn indicator_counts_join() {
        let u = VarUniverse::new(&["X", "Y", "Z"]).unwrap();
        let r = Relation::from_ints(&["X", "Y"], &[&[0, 0], &[0, 1], &[1, 0]]).unwrap();
        let s = Relation::from_ints(&["Y", "Z"], &[&[0, 0], &[1, 1]]).unwrap();
        let t = Relation::from_ints(&["Z", "X"], &[&[0, 0], &[1, 0], &[0, 1]]).unwrap();
        let ts: Vec<Tensor> = [r, s, t].iter().map(|x| Tensor::indicator(&u, x).unwrap()).collect();
        let c = friedgut_check(3, &ts, &[rat(1, 2), rat(1, 2), rat(1, 2)]).unwrap();
        // (0,0,0), (0,1,1), (1,0,0)
        assert_eq!(c.lhs, int(3));
        assert!((c.rhs - (18f64).sqrt()).abs() < 1e-9);
        let c = friedgut_check(3, &ts, &[int(1), int(1), int(0)]).unwrap();
        assert!((c.rhs - 6.0).abs() < 1e-12);
    }
}
