//! FD and MVD implication: Armstrong closure, the step-function decision
//! procedure with two-tuple counterexamples, relaxation coefficients, LP
//! relaxation of conditional inequalities and a numeric essentially
//! conditional exhibit.
//!
//! Why step functions decide implication: each measure `h(V|U)` or
//! `I(V;W|U)` is non-negative on every polymatroid, hence on every step
//! function. On a normal polymatroid `h = Σ a_V h^V` with `a ≥ 0`, a
//! measure is therefore zero iff it is zero on each `h^V` with `a_V > 0`. So
//! if every step function zeroing the premises also zeroes the conclusion,
//! the implication holds for all normal polymatroids, and otherwise the
//! offending step function is itself a counterexample.

mod constraint;
mod kr;

pub use constraint::{parse_constraints, two_tuple_relation, Constraint, Constraints};
pub use kr::{kr_distribution, kr_exhibit, KrReport};

pub use crate::polymatroid::closure as fd_closure;

use crate::error::{Error, Result};
use crate::expr::LinExpr;
use crate::inequality::check_shannon;
use crate::lp::{LinearProgram, LpOutcome, Rel, Sense};
use crate::polymatroid::{elemental_inequalities, step_function_at};
use crate::rational::Rational;
use crate::relation::Relation;
use crate::vars::{check_lp_cap, VarSet, VarUniverse};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImplicationVerdict {
    pub holds: bool,
    /// `W` and the two-tuple relation `R_W` satisfying every premise but not
    /// the conclusion.
    pub counterexample: Option<(VarSet, Relation)>,
    /// `λ` with `λ Σ h(σ_i) ≥ h(σ_0)` valid: 1 for an FD conclusion,
    /// `n²/4` otherwise.
    pub lambda: Option<Rational>,
}

/// The relaxation coefficient guaranteed for a holding implication.
pub fn relaxation_coefficient(universe: &VarUniverse, conclusion: &Constraint) -> Rational {
    if conclusion.is_fd() {
        Rational::one()
    } else {
        let n = universe.len() as i64;
        Rational::new(n * n, 4)
    }
}

/// Decides the implication by enumerating the step functions `h_W`,
/// `W ⊊ X`: it fails iff some `h_W` zeroes every premise measure and not the
/// conclusion's. The first such `W` in mask order is materialized as `R_W`.
pub fn implies(universe: &VarUniverse, premises: &[Constraint], conclusion: &Constraint) -> Result<ImplicationVerdict> {
    check_lp_cap(universe.len())?;
    let measures: Vec<LinExpr> = premises.iter().map(|p| p.measure(universe)).collect();
    let target = conclusion.measure(universe);
    let full = universe.full();
    for w in universe.all_sets().filter(|w| *w != full) {
        let h = step_function_at(universe, w);
        let zeroes = |e: &LinExpr| h.eval(e).map(|v| v.is_zero());
        let mut all = true;
        for m in &measures {
            if !zeroes(m)? {
                all = false;
                break;
            }
        }
        if all && !zeroes(&target)? {
            let r = two_tuple_relation(universe, w);
            return Ok(ImplicationVerdict { holds: false, counterexample: Some((w, r)), lambda: None });
        }
    }
    Ok(ImplicationVerdict {
        holds: true,
        counterexample: None,
        lambda: Some(relaxation_coefficient(universe, conclusion)),
    })
}

/// `λ Σ_i h(σ_i) - h(σ_0)`, the inequality behind a holding implication.
pub fn relaxation_expr(universe: &VarUniverse, premises: &[Constraint], conclusion: &Constraint) -> LinExpr {
    let lambda = relaxation_coefficient(universe, conclusion);
    let mut e = conclusion.measure(universe).neg();
    for p in premises {
        e.add_scaled(&p.measure(universe), &lambda);
    }
    e
}

/// Confirms with the Shannon LP that `λ Σ h(σ_i) ≥ h(σ_0)` holds for every
/// polymatroid. Errors unless the implication holds.
pub fn relaxation_check(universe: &VarUniverse, premises: &[Constraint], conclusion: &Constraint) -> Result<bool> {
    if !implies(universe, premises, conclusion)?.holds {
        return Err(Error::Invalid("the implication does not hold, so there is nothing to relax".into()));
    }
    Ok(check_shannon(universe, &relaxation_expr(universe, premises, conclusion))?.is_valid())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Relaxation {
    /// `c_0·h ≤ Σ λ_i c_i·h + ε h(X)` holds for every polymatroid.
    Lambda(Vec<Rational>),
    NotRelaxable,
}

fn col(s: VarSet) -> usize {
    s.index() - 1
}

/// Whether `∧ c_i·h ≤ 0 ⇒ c_0·h ≤ 0` holds on every polymatroid: the
/// maximum of `c_0·h` over polymatroids with `h(X) ≤ 1` meeting the premises
/// is zero.
pub fn conditional_holds(universe: &VarUniverse, premises: &[LinExpr], conclusion: &LinExpr) -> Result<bool> {
    check_lp_cap(universe.len())?;
    let dim = universe.size() - 1;
    let row = |e: &LinExpr| -> Vec<(usize, Rational)> {
        e.terms().filter(|(s, c)| !s.is_empty() && !c.is_zero()).map(|(s, c)| (col(*s), c.clone())).collect()
    };
    let mut lp = LinearProgram::new(Sense::Max, dim);
    for (s, c) in conclusion.terms() {
        if !s.is_empty() {
            lp.objective[col(*s)] += c;
        }
    }
    for e in elemental_inequalities(universe.len()) {
        lp.add(row(&e), Rel::Ge, Rational::zero());
    }
    for p in premises {
        lp.add(row(p), Rel::Le, Rational::zero());
    }
    lp.add(vec![(col(universe.full()), Rational::one())], Rel::Le, Rational::one());
    match lp.solve()? {
        LpOutcome::Optimal(s) => Ok(!s.value.is_positive()),
        _ => Err(Error::Invalid("conditional check LP is not bounded and feasible".into())),
    }
}

/// Relaxes a conditional inequality valid over polymatroids: finds `λ ≥ 0`,
/// minimizing `Σ λ_i`, with `Σ λ_i c_i + ε h(X) - c_0` a non-negative
/// combination of elemental inequalities. Over the polyhedral cone of
/// polymatroids this always succeeds, even with `ε = 0`.
pub fn relax_conditional(
    universe: &VarUniverse,
    premises: &[LinExpr],
    conclusion: &LinExpr,
    eps: &Rational,
) -> Result<Relaxation> {
    if eps.is_negative() {
        return Err(Error::Invalid("ε must be non-negative".into()));
    }
    for e in premises.iter().chain([conclusion]) {
        e.check_universe(universe)?;
    }
    if !conditional_holds(universe, premises, conclusion)? {
        return Err(Error::Invalid("the conditional inequality fails on some polymatroid".into()));
    }
    let elem = elemental_inequalities(universe.len());
    let p = premises.len();
    let mut lp = LinearProgram::new(Sense::Min, p + elem.len());
    for i in 0..p {
        lp.objective[i] = Rational::one();
    }
    let full = universe.full();
    for s in universe.all_sets().skip(1) {
        let mut coeffs = Vec::new();
        for (i, c) in premises.iter().enumerate() {
            let v = c.coeff(s);
            if !v.is_zero() {
                coeffs.push((i, v));
            }
        }
        for (k, e) in elem.iter().enumerate() {
            let v = e.coeff(s);
            if !v.is_zero() {
                coeffs.push((p + k, -v));
            }
        }
        let mut rhs = conclusion.coeff(s);
        if s == full {
            rhs -= eps;
        }
        lp.add(coeffs, Rel::Eq, rhs);
    }
    match lp.solve()? {
        LpOutcome::Optimal(sol) => Ok(Relaxation::Lambda(sol.x[..p].to_vec())),
        _ => Ok(Relaxation::NotRelaxable),
    }
}
