//! Output-size bounds (AGM, polymatroid, normal), worst-case instance
//! generators, statistics checks and Friedgut's inequality.

mod friedgut;
mod stats;
mod worst_case;

pub use friedgut::{friedgut_check, FriedgutCheck, Tensor};
pub use stats::{
    log2_stat, log2_upper, satisfies_stats, stat_degrees, StatEntry, StatSpec, StatViolation, STAT_LOG_BITS,
};
pub use worst_case::{worst_case_normal, worst_case_product, MAX_WORST_CASE_TUPLES};

use std::fmt;

use crate::error::{Error, Result};
use crate::inequality::{SigmaInequality, SigmaStat, ValidatedSigma};
use crate::lp::{LinearProgram, LpOutcome, Rel, Sense};
use crate::polymatroid::{elemental_inequalities, NormalDecomposition};
use crate::query::Query;
use crate::rational::Rational;
use crate::relation::Database;
use crate::setfn::SetFunction;
use crate::vars::{check_lp_cap, VarSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundMethod {
    Agm,
    Polymatroid,
    Normal,
}

impl fmt::Display for BoundMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundMethod::Agm => "agm",
            BoundMethod::Polymatroid => "polymatroid",
            BoundMethod::Normal => "normal",
        })
    }
}

/// A bound with its primal and dual optima. For AGM the weights are per
/// atom; otherwise per statistic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub method: BoundMethod,
    /// `log2` of the bound; `None` when the statistics do not bound the output.
    pub log_bound: Option<Rational>,
    /// `w*`, one per atom (AGM) or statistic.
    pub weights: Vec<Rational>,
    /// The optimal `h*`; modular for AGM.
    pub h_star: Option<SetFunction>,
    /// `Σ w*_σ b_σ`, equal to `h*(X)` whenever the bound is finite.
    pub dual_value: Option<Rational>,
    /// The optimal normal decomposition, for [`BoundMethod::Normal`].
    pub normal: Option<NormalDecomposition>,
}

impl BoundReport {
    fn unbounded(method: BoundMethod) -> Self {
        BoundReport { method, log_bound: None, weights: Vec::new(), h_star: None, dual_value: None, normal: None }
    }

    pub fn is_unbounded(&self) -> bool {
        self.log_bound.is_none()
    }

    /// `2^log_bound` as a float.
    pub fn bound_f64(&self) -> Option<f64> {
        self.log_bound.as_ref().map(|b| b.to_f64().exp2())
    }

    /// The Σ-inequality `Σ w*_σ h(σ) ≥ h(X)` read off the dual.
    pub fn sigma_inequality(&self, spec: &StatSpec) -> Result<SigmaInequality> {
        if self.method == BoundMethod::Agm || self.is_unbounded() {
            return Err(Error::Invalid("only finite statistic bounds carry a Σ-inequality".into()));
        }
        let terms = spec.entries().iter().map(|e| e.stat.clone()).zip(self.weights.iter().cloned()).collect();
        SigmaInequality::full(spec.universe(), terms)
    }
}

fn check_no_self_joins(q: &Query) -> Result<()> {
    if q.has_self_joins() {
        return Err(Error::Invalid("bounds need a query without self-joins".into()));
    }
    Ok(())
}

/// The AGM bound `min Σ w_j log2 B_j` over fractional edge covers.
pub fn agm_bound(q: &Query, cards: &[Rational]) -> Result<BoundReport> {
    if cards.len() != q.atoms.len() {
        return Err(Error::Invalid(format!("{} cardinalities for {} atoms", cards.len(), q.atoms.len())));
    }
    if let Some(b) = cards.iter().find(|b| **b < Rational::one()) {
        return Err(Error::Invalid(format!("cardinality {b} is below 1")));
    }
    let logs: Vec<Option<Rational>> = cards.iter().map(|b| Some(log2_stat(b))).collect();
    agm_from_logs(q, &logs)
}

/// AGM over log-cardinalities; atoms with `None` have no bound and get
/// weight 0.
pub fn agm_from_logs(q: &Query, logs: &[Option<Rational>]) -> Result<BoundReport> {
    check_no_self_joins(q)?;
    let n = q.num_vars();
    let m = q.atoms.len();
    for i in 0..n {
        let covered = (0..m).any(|j| logs[j].is_some() && q.atom_set(j).contains(i));
        if !covered {
            return Ok(BoundReport::unbounded(BoundMethod::Agm));
        }
    }
    let mut lp = LinearProgram::new(Sense::Min, m);
    for (j, b) in logs.iter().enumerate() {
        if let Some(b) = b {
            lp.objective[j] = b.clone();
        }
    }
    for i in 0..n {
        let row = (0..m).filter(|&j| logs[j].is_some() && q.atom_set(j).contains(i)).map(|j| (j, Rational::one())).collect();
        lp.add(row, Rel::Ge, Rational::one());
    }
    let sol = match lp.solve()? {
        LpOutcome::Optimal(s) => s,
        other => return Err(Error::Invalid(format!("AGM program is {}", other.status()))),
    };
    let v = sol.y.clone();
    let h = SetFunction::from_fn(q.universe(), |s| s.iter().map(|i| v[i].clone()).sum());
    let dual: Rational = v.iter().cloned().sum();
    debug_assert_eq!(dual, sol.value);
    Ok(BoundReport {
        method: BoundMethod::Agm,
        log_bound: Some(sol.value),
        weights: sol.x,
        h_star: Some(h),
        dual_value: Some(dual),
        normal: None,
    })
}

fn check_spec(q: &Query, spec: &StatSpec) -> Result<()> {
    if spec.universe() != q.universe() {
        return Err(Error::UniverseMismatch("statistics were built for another query".into()));
    }
    check_no_self_joins(q)?;
    check_lp_cap(q.num_vars())
}

fn dual_value(spec: &StatSpec, w: &[Rational]) -> Rational {
    spec.entries().iter().zip(w).map(|(e, w)| &e.log * w).sum()
}

/// `max h(X)` over polymatroids with `h(σ) ≤ b_σ`, with the dual weights.
pub fn polymatroid_bound(q: &Query, spec: &StatSpec) -> Result<BoundReport> {
    check_spec(q, spec)?;
    let u = q.universe();
    let dim = u.size() - 1;
    let col = |s: VarSet| s.index() - 1;
    let mut lp = LinearProgram::new(Sense::Max, dim);
    lp.objective[col(u.full())] = Rational::one();
    let mut stat_rows = Vec::new();
    for e in spec.entries() {
        let row = e.stat.expr().terms().map(|(s, a)| (col(*s), a.clone())).collect();
        stat_rows.push(lp.add(row, Rel::Le, e.log.clone()));
    }
    for e in elemental_inequalities(u.len()) {
        let row = e.terms().filter(|(s, _)| !s.is_empty()).map(|(s, a)| (col(*s), a.clone())).collect();
        lp.add(row, Rel::Ge, Rational::zero());
    }
    let sol = match lp.solve()? {
        LpOutcome::Optimal(s) => s,
        LpOutcome::Unbounded(_) => return Ok(BoundReport::unbounded(BoundMethod::Polymatroid)),
        LpOutcome::Infeasible(_) => return Err(Error::Invalid("polymatroid program is infeasible".into())),
    };
    let w: Vec<Rational> = stat_rows.iter().map(|&r| sol.y[r].clone()).collect();
    let h = SetFunction::from_fn(u, |s| if s.is_empty() { Rational::zero() } else { sol.x[col(s)].clone() });
    let dual = dual_value(spec, &w);
    Ok(BoundReport {
        method: BoundMethod::Polymatroid,
        log_bound: Some(sol.value),
        weights: w,
        h_star: Some(h),
        dual_value: Some(dual),
        normal: None,
    })
}

/// `max Σ a_V` over `a ≥ 0` with `h = Σ a_V h^V` satisfying the statistics.
pub fn normal_bound(q: &Query, spec: &StatSpec) -> Result<BoundReport> {
    check_spec(q, spec)?;
    let u = q.universe();
    let dim = u.size() - 1;
    let mut lp = LinearProgram::new(Sense::Max, dim);
    lp.objective = vec![Rational::one(); dim];
    for e in spec.entries() {
        // h(V|U) = Σ a_W over W meeting V and missing U.
        let row = u
            .all_sets()
            .skip(1)
            .filter(|w| !w.is_disjoint(e.stat.v) && w.is_disjoint(e.stat.u))
            .map(|w| (w.index() - 1, Rational::one()))
            .collect();
        lp.add(row, Rel::Le, e.log.clone());
    }
    let sol = match lp.solve()? {
        LpOutcome::Optimal(s) => s,
        LpOutcome::Unbounded(_) => return Ok(BoundReport::unbounded(BoundMethod::Normal)),
        LpOutcome::Infeasible(_) => return Err(Error::Invalid("normal program is infeasible".into())),
    };
    let mut coeffs = vec![Rational::zero()];
    coeffs.extend(sol.x.iter().cloned());
    let d = NormalDecomposition::new(u, coeffs)?;
    let dual = dual_value(spec, &sol.y);
    Ok(BoundReport {
        method: BoundMethod::Normal,
        log_bound: Some(sol.value),
        weights: sol.y,
        h_star: Some(d.reconstruct()),
        dual_value: Some(dual),
        normal: Some(d),
    })
}

/// `Σ_σ w_σ log2 deg_{R_σ}(σ)` for a validated Σ-inequality, with each
/// logarithm rounded up, so `log2 |Q(db)|` never exceeds it. `None` when a
/// positively weighted guard is empty (the output is then empty).
pub fn degree_bound_eval(q: &Query, db: &Database, ineq: &ValidatedSigma) -> Result<Option<Rational>> {
    let ineq = ineq.inequality();
    if ineq.universe() != q.universe() || ineq.target() != q.universe().full() {
        return Err(Error::Invalid("inequality must bound h(X) over the query's variables".into()));
    }
    let mut spec = StatSpec::new(q);
    for (s, _) in ineq.terms() {
        spec.push(SigmaStat::new(s.v, s.u, &s.guard), Rational::one())?;
    }
    let degs = stat_degrees(q, db, &spec)?;
    let mut total = Rational::zero();
    for ((_, w), d) in ineq.terms().iter().zip(degs) {
        if w.is_zero() {
            continue;
        }
        if d == 0 {
            return Ok(None);
        }
        total += w * &log2_upper(d);
    }
    Ok(Some(total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn triangle() -> Query {
        Query::parse("Q(X,Y,Z) :- R(X,Y), S(Y,Z), T(Z,X).").unwrap()
    }

    #[test]
    fn agm_triangle() {
        let q = triangle();
        let r = agm_bound(&q, &[int(1024), int(1024), int(1024)]).unwrap();
        assert_eq!(r.log_bound, Some(int(15)));
        assert_eq!(r.dual_value, Some(int(15)));
        assert_eq!(r.weights, vec![rat(1, 2); 3]);
    }

    #[test]
    fn agm_two_atoms_and_unbounded() {
        let q = Query::parse("Q(X,Y,Z) :- R(X,Y), S(Y,Z)").unwrap();
        let r = agm_bound(&q, &[int(8), int(8)]).unwrap();
        assert_eq!(r.log_bound, Some(int(6)));
        let r = agm_from_logs(&q, &[Some(int(3)), None]).unwrap();
        assert!(r.is_unbounded());
    }

    #[test]
    fn asymmetric_triangle() {
        let q = triangle();
        // log min(|S||T|, |R||T|, |R||S|, sqrt(|R||S||T|)) = min(14, 5, 11, 15/2)
        let r = agm_bound(&q, &[int(2), int(1024), int(16)]).unwrap();
        assert_eq!(r.log_bound, Some(int(5)));
        let r = agm_bound(&q, &[int(2), int(1024), int(1024)]).unwrap();
        assert_eq!(r.log_bound, Some(rat(21, 2)));
    }

    #[test]
    fn polymatroid_matches_agm_on_cards() {
        let q = triangle();
        let spec = StatSpec::parse("card * <= 2^10", &q).unwrap();
        let p = polymatroid_bound(&q, &spec).unwrap();
        assert_eq!(p.log_bound, Some(int(15)));
        assert_eq!(p.dual_value, p.log_bound);
        let nb = normal_bound(&q, &spec).unwrap();
        assert_eq!(nb.log_bound, Some(int(15)));
        let ineq = ValidatedSigma::new(p.sigma_inequality(&spec).unwrap()).unwrap();
        assert_eq!(ineq.inequality().terms().len(), 3);
    }

    #[test]
    fn pods_key_version() {
        let q = Query::parse("Q(X,Y,Z,U) :- R(X,Y), S(Y,Z), T(Z,U), A(X,Z,U), B(X,Y,U).").unwrap();
        let spec = StatSpec::parse(
            "card R <= 2^10\ncard S <= 2^10\ncard T <= 2^10\nfd A : X,Z -> U\nfd B : Y,U -> X",
            &q,
        )
        .unwrap();
        let p = polymatroid_bound(&q, &spec).unwrap();
        assert_eq!(p.log_bound, Some(int(15)));
        assert_eq!(p.dual_value, p.log_bound);
    }

    #[test]
    fn unbounded_statistics() {
        let q = Query::parse("Q(X,Y,Z) :- R(X,Y), S(Y,Z)").unwrap();
        let spec = StatSpec::parse("card R <= 4", &q).unwrap();
        assert!(polymatroid_bound(&q, &spec).unwrap().is_unbounded());
        assert!(normal_bound(&q, &spec).unwrap().is_unbounded());
    }

    #[test]
    fn self_joins_rejected() {
        let q = Query::parse("Q(X,Y,Z) :- R(X,Y), R(Y,Z)").unwrap();
        assert!(agm_bound(&q, &[int(4), int(4)]).is_err());
    }
}
