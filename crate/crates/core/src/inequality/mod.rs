//! Validity of linear information inequalities over polymatroids and normal
//! polymatroids, Σ-inequalities, and the BB and CD proof systems.

mod bb;
mod cd;

pub use bb::{
    bb_compress, find_divergent_proof, BbExpr, BbStep, BbStrategy, DivergentProof, DivergentSearch, Split,
    MAX_DIVERGENT_TERMS,
};
pub use cd::{parse_cd_script, verify_cd_proof, CdError, CdStep, CdTerm, CdTerms};

use std::fmt;

use crate::error::{Error, Result};
use crate::expr::LinExpr;
use crate::lp::{LinearProgram, LpOutcome, Rel, Sense};
use crate::polymatroid::{elemental_inequalities, is_polymatroid, step_function};
use crate::rational::Rational;
use crate::setfn::SetFunction;
use crate::vars::{check_lp_cap, VarSet, VarUniverse};

/// Outcome of a validity check of `c·h ≥ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    /// `witness` lies in the domain and `value = c·witness < 0`.
    Invalid { witness: SetFunction, value: Rational },
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }

    pub fn witness(&self) -> Option<&SetFunction> {
        match self {
            Verdict::Valid => None,
            Verdict::Invalid { witness, .. } => Some(witness),
        }
    }
}

/// The set of functions an inequality is checked against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    Polymatroids,
    Normal,
}

/// Decides `c·h ≥ 0` over all polymatroids by minimizing `c·h` over the
/// polymatroids with `h(X) ≤ 1`; the cone is pointed so the minimum is 0
/// exactly when the inequality holds.
pub fn check_shannon(u: &VarUniverse, c: &LinExpr) -> Result<Verdict> {
    c.check_universe(u)?;
    check_lp_cap(u.len())?;
    let dim = u.size() - 1;
    let col = |s: VarSet| s.index() - 1;
    let mut lp = LinearProgram::new(Sense::Min, dim);
    for (s, a) in c.terms() {
        if !s.is_empty() {
            lp.objective[col(*s)] = a.clone();
        }
    }
    for e in elemental_inequalities(u.len()) {
        let row = e.terms().filter(|(s, _)| !s.is_empty()).map(|(s, a)| (col(*s), a.clone())).collect();
        lp.add(row, Rel::Ge, Rational::zero());
    }
    if dim > 0 {
        lp.add(vec![(col(u.full()), Rational::one())], Rel::Le, Rational::one());
    }
    let sol = match lp.solve()? {
        LpOutcome::Optimal(s) => s,
        other => return Err(Error::Invalid(format!("validity program is {}", other.status()))),
    };
    if !sol.value.is_negative() {
        return Ok(Verdict::Valid);
    }
    let witness = SetFunction::from_fn(u, |s| if s.is_empty() { Rational::zero() } else { sol.x[col(s)].clone() });
    let value = witness.eval(c)?;
    debug_assert!(is_polymatroid(&witness) && value.is_negative());
    Ok(Verdict::Invalid { witness, value })
}

/// Decides `c·h ≥ 0` over normal polymatroids. The normal cone is generated
/// by the step functions, so it suffices to evaluate `c` on each `h^V`; the
/// witness is the step function with the most negative value.
pub fn check_normal(u: &VarUniverse, c: &LinExpr) -> Result<Verdict> {
    c.check_universe(u)?;
    check_lp_cap(u.len())?;
    let mut worst: Option<(Rational, VarSet)> = None;
    for v in u.all_sets().skip(1) {
        let val: Rational = c.terms().filter(|(s, _)| !s.is_disjoint(v)).map(|(_, a)| a.clone()).sum();
        if val.is_negative() && worst.as_ref().map_or(true, |(w, _)| val < *w) {
            worst = Some((val, v));
        }
    }
    Ok(match worst {
        None => Verdict::Valid,
        Some((value, v)) => Verdict::Invalid { witness: step_function(u, v), value },
    })
}

/// A degree statistic `(V | U)` guarded by a relation; `U = ∅` is a
/// cardinality statistic.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SigmaStat {
    pub v: VarSet,
    pub u: VarSet,
    pub guard: String,
}

impl SigmaStat {
    /// `V` is stored without the members of `U`.
    pub fn new(v: VarSet, u: VarSet, guard: &str) -> Self {
        SigmaStat { v: v.difference(u), u, guard: guard.to_string() }
    }

    pub fn card(v: VarSet, guard: &str) -> Self {
        SigmaStat::new(v, VarSet::EMPTY, guard)
    }

    pub fn is_cardinality(&self) -> bool {
        self.u.is_empty()
    }

    pub fn is_simple(&self) -> bool {
        self.u.len() <= 1
    }

    /// `h(V | U)`.
    pub fn expr(&self) -> LinExpr {
        let mut e = LinExpr::h(self.u.union(self.v));
        e.add_term(self.u, -Rational::one());
        e.without_empty()
    }

    pub fn format(&self, u: &VarUniverse) -> String {
        if self.u.is_empty() {
            format!("({})", u.fmt_compact(self.v))
        } else {
            format!("({}|{})", u.fmt_compact(self.v), u.fmt_compact(self.u))
        }
    }
}

/// `Σ w_σ h(σ) ≥ h(target)` with non-negative weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaInequality {
    universe: VarUniverse,
    terms: Vec<(SigmaStat, Rational)>,
    target: VarSet,
}

impl SigmaInequality {
    pub fn new(universe: &VarUniverse, terms: Vec<(SigmaStat, Rational)>, target: VarSet) -> Result<Self> {
        universe.check(target)?;
        for (s, w) in &terms {
            universe.check(s.u.union(s.v))?;
            if w.is_negative() {
                return Err(Error::Invalid(format!("negative weight {w} on {}", s.format(universe))));
            }
        }
        Ok(SigmaInequality { universe: universe.clone(), terms, target })
    }

    /// Target `h(X)` for the full universe.
    pub fn full(universe: &VarUniverse, terms: Vec<(SigmaStat, Rational)>) -> Result<Self> {
        Self::new(universe, terms, universe.full())
    }

    pub fn universe(&self) -> &VarUniverse {
        &self.universe
    }

    pub fn terms(&self) -> &[(SigmaStat, Rational)] {
        &self.terms
    }

    pub fn target(&self) -> VarSet {
        self.target
    }

    pub fn is_simple(&self) -> bool {
        self.terms.iter().all(|(s, _)| s.is_simple())
    }

    /// `Σ w_σ h(σ) - h(target)`, to be checked `≥ 0`.
    pub fn expr(&self) -> LinExpr {
        let mut e = LinExpr::new();
        for (s, w) in &self.terms {
            e.add_scaled(&s.expr(), w);
        }
        e.add_term(self.target, -Rational::one());
        e.without_empty()
    }
}

impl fmt::Display for SigmaInequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lhs: Vec<String> =
            self.terms.iter().map(|(s, w)| format!("{w} h{}", s.format(&self.universe))).collect();
        let lhs = if lhs.is_empty() { "0".to_string() } else { lhs.join(" + ") };
        write!(f, "{lhs} >= h({})", self.universe.fmt_compact(self.target))
    }
}

pub fn check_sigma_validity(ineq: &SigmaInequality, domain: Domain) -> Result<Verdict> {
    match domain {
        Domain::Polymatroids => check_shannon(ineq.universe(), &ineq.expr()),
        Domain::Normal => check_normal(ineq.universe(), &ineq.expr()),
    }
}

/// A Σ-inequality that has been checked valid over polymatroids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidatedSigma(SigmaInequality);

impl ValidatedSigma {
    pub fn new(ineq: SigmaInequality) -> Result<Self> {
        match check_shannon(ineq.universe(), &ineq.expr())? {
            Verdict::Valid => Ok(ValidatedSigma(ineq)),
            Verdict::Invalid { value, .. } => {
                Err(Error::Invalid(format!("`{ineq}` is not a Shannon inequality (witness value {value})")))
            }
        }
    }

    pub fn inequality(&self) -> &SigmaInequality {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polymatroid::fixtures;
    use crate::rational::{int, rat};

    fn triangle() -> VarUniverse {
        VarUniverse::new(&["X", "Y", "Z"]).unwrap()
    }

    #[test]
    fn shearer_triangle_valid() {
        let u = triangle();
        let e = LinExpr::parse("h(X,Y) + h(Y,Z) + h(Z,X) - 2 h(X,Y,Z)", &u).unwrap();
        assert_eq!(check_shannon(&u, &e).unwrap(), Verdict::Valid);
        assert_eq!(check_normal(&u, &e).unwrap(), Verdict::Valid);
    }

    #[test]
    fn invalid_has_negative_witness() {
        let u = triangle();
        let e = LinExpr::parse("h(X,Y) - h(X,Y,Z)", &u).unwrap();
        match check_shannon(&u, &e).unwrap() {
            Verdict::Invalid { witness, value } => {
                assert!(is_polymatroid(&witness));
                assert!(value.is_negative());
                assert_eq!(witness.eval(&e).unwrap(), value);
            }
            Verdict::Valid => panic!("h(XY) >= h(XYZ) is not valid"),
        }
    }

    #[test]
    fn sigma_edge_cover() {
        let u = triangle();
        let s = |t: &str, g: &str| SigmaStat::card(u.parse_set(t).unwrap(), g);
        let half = SigmaInequality::full(
            &u,
            vec![(s("X,Y", "R"), rat(1, 2)), (s("Y,Z", "S"), rat(1, 2)), (s("Z,X", "T"), rat(1, 2))],
        )
        .unwrap();
        assert!(half.is_simple());
        for d in [Domain::Polymatroids, Domain::Normal] {
            assert!(check_sigma_validity(&half, d).unwrap().is_valid());
        }
        let bad = SigmaInequality::full(&u, vec![(s("X,Y", "R"), int(1))]).unwrap();
        let w = check_sigma_validity(&bad, Domain::Normal).unwrap();
        assert_eq!(w.witness(), Some(&step_function(&u, u.parse_set("Z").unwrap())));
        assert!(!check_sigma_validity(&bad, Domain::Polymatroids).unwrap().is_valid());
        assert!(ValidatedSigma::new(bad).is_err());
    }

    #[test]
    fn negative_weight_rejected() {
        let u = triangle();
        let s = SigmaStat::card(u.full(), "R");
        assert!(SigmaInequality::full(&u, vec![(s, int(-1))]).is_err());
    }

    #[test]
    fn zhang_yeung_not_shannon() {
        let h = fixtures::zhang_yeung();
        let u = h.universe().clone();
        let zy = LinExpr::parse(
            "I(X;Y|A) + I(X;Y|B) + I(A;B) + I(X;Y|A) + I(A;Y|X) + I(A;X|Y) - I(X;Y)",
            &u,
        )
        .unwrap();
        assert_eq!(h.eval(&zy).unwrap(), int(-1));
        assert!(!check_shannon(&u, &zy).unwrap().is_valid());
    }

    #[test]
    fn lp_cap_enforced() {
        let names: Vec<String> = (0..11).map(|i| format!("V{i}")).collect();
        let u = VarUniverse::new(&names).unwrap();
        let e = LinExpr::h(u.full());
        assert!(matches!(check_shannon(&u, &e), Err(Error::ResourceCap(_))));
    }
}
