//! Polymatroids, step functions, normal and modular functions, FD lattices.

pub mod fixtures;
mod lattice;
mod normal;

pub use lattice::{closure, Fd, FdLattice};
pub use normal::{
    is_modular, is_normal, mobius_decompose, modularize, normalize, NormalDecomposition,
};

use crate::expr::LinExpr;
use crate::rational::Rational;
use crate::setfn::SetFunction;
use crate::vars::{VarSet, VarUniverse};

/// Why a set function is not a polymatroid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    EmptyNonZero(Rational),
    /// `h(sub) > h(sup)` with `sub ⊆ sup`.
    Monotonicity { sub: VarSet, sup: VarSet },
    /// `h(a) + h(b) < h(a ∪ b) + h(a ∩ b)`.
    Submodularity { a: VarSet, b: VarSet },
}

/// The first violated axiom, if any. Monotonicity is checked on every
/// covering pair and submodularity on elemental pairs, which together imply
/// the full axioms.
pub fn check_polymatroid(h: &SetFunction) -> Option<Violation> {
    let n = h.universe().len();
    if !h.get(VarSet::EMPTY).is_zero() {
        return Some(Violation::EmptyNonZero(h.get(VarSet::EMPTY).clone()));
    }
    for s in h.universe().all_sets() {
        for i in s.iter() {
            let sub = s.remove(i);
            if h.get(sub) > h.get(s) {
                return Some(Violation::Monotonicity { sub, sup: s });
            }
        }
    }
    for k in h.universe().all_sets() {
        for i in 0..n {
            if k.contains(i) {
                continue;
            }
            for j in i + 1..n {
                if k.contains(j) {
                    continue;
                }
                let a = k.insert(i);
                let b = k.insert(j);
                if h.get(a) + h.get(b) < h.get(a.union(b)) + h.get(k) {
                    return Some(Violation::Submodularity { a, b });
                }
            }
        }
    }
    None
}

pub fn is_polymatroid(h: &SetFunction) -> bool {
    check_polymatroid(h).is_none()
}

/// The step function `h^V(U) = 1` iff `U ∩ V ≠ ∅`.
pub fn step_function(u: &VarUniverse, v: VarSet) -> SetFunction {
    SetFunction::from_fn(u, |s| if s.is_disjoint(v) { Rational::zero() } else { Rational::one() })
}

/// `h_W = h^{X - W}`: zero exactly on subsets of `W`.
pub fn step_function_at(u: &VarUniverse, w: VarSet) -> SetFunction {
    step_function(u, u.full().difference(w))
}

/// Elemental Shannon inequalities `e·h ≥ 0` over a universe of `n` variables:
/// `h(X) - h(X - i) ≥ 0` and `h(iK) + h(jK) - h(K) - h(ijK) ≥ 0`. They
/// generate every monotonicity and submodularity inequality.
pub fn elemental_inequalities(n: usize) -> Vec<LinExpr> {
    let full = VarSet::full(n);
    let mut out = Vec::new();
    for i in 0..n {
        let mut e = LinExpr::h(full);
        e.add_term(full.remove(i), -Rational::one());
        out.push(e);
    }
    for i in 0..n {
        for j in i + 1..n {
            let rest = full.remove(i).remove(j);
            for k in rest.subsets() {
                let mut e = LinExpr::h(k.insert(i));
                e.add_term(k.insert(j), Rational::one());
                e.add_term(k, -Rational::one());
                e.add_term(k.insert(i).insert(j), -Rational::one());
                out.push(e);
            }
        }
    }
    out
}
