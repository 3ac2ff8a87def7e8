//! Exact linear programming: two-phase dense-tableau simplex with Bland's rule
//! over rationals, with dual certificates, plus vertex enumeration for small
//! polytopes.

mod simplex;
mod vertices;

pub use vertices::{enumerate_vertices, solve_square, MAX_VERTEX_DIM};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Max,
    Min,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rel {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    NonNeg,
    Free,
}

/// `Σ coeffs · x  rel  rhs`, with sparse coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<(usize, Rational)>,
    pub rel: Rel,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(coeffs: Vec<(usize, Rational)>, rel: Rel, rhs: Rational) -> Self {
        Constraint { coeffs, rel, rhs }
    }

    pub fn lhs(&self, x: &[Rational]) -> Rational {
        self.coeffs.iter().map(|(j, c)| c * &x[*j]).sum()
    }

    pub fn holds(&self, x: &[Rational]) -> bool {
        let l = self.lhs(x);
        match self.rel {
            Rel::Le => l <= self.rhs,
            Rel::Ge => l >= self.rhs,
            Rel::Eq => l == self.rhs,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<Rational>,
    pub vars: Vec<VarKind>,
    pub constraints: Vec<Constraint>,
}

impl LinearProgram {
    /// A program over `n` non-negative variables with a zero objective.
    pub fn new(sense: Sense, n: usize) -> Self {
        LinearProgram {
            sense,
            objective: vec![Rational::zero(); n],
            vars: vec![VarKind::NonNeg; n],
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn add_var(&mut self, kind: VarKind, cost: Rational) -> usize {
        self.vars.push(kind);
        self.objective.push(cost);
        self.vars.len() - 1
    }

    /// Adds a row and returns its index.
    pub fn add(&mut self, coeffs: Vec<(usize, Rational)>, rel: Rel, rhs: Rational) -> usize {
        self.constraints.push(Constraint::new(coeffs, rel, rhs));
        self.constraints.len() - 1
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    fn validate(&self) -> Result<()> {
        if self.objective.len() != self.vars.len() {
            return Err(Error::Invalid("objective length differs from variable count".into()));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if let Some((j, _)) = c.coeffs.iter().find(|(j, _)| *j >= self.vars.len()) {
                return Err(Error::Invalid(format!("row {i} references variable {j} out of range")));
            }
        }
        Ok(())
    }

    pub fn solve(&self) -> Result<LpOutcome> {
        self.validate()?;
        Ok(simplex::solve(self))
    }

    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        x.len() == self.vars.len()
            && self.vars.iter().zip(x).all(|(k, v)| *k == VarKind::Free || !v.is_negative())
            && self.constraints.iter().all(|c| c.holds(x))
    }

    /// `A^T y`, one entry per variable.
    pub fn transpose_mul(&self, y: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.vars.len()];
        for (c, yi) in self.constraints.iter().zip(y) {
            if yi.is_zero() {
                continue;
            }
            for (j, a) in &c.coeffs {
                out[*j] += a * yi;
            }
        }
        out
    }

    pub fn dual_value(&self, y: &[Rational]) -> Rational {
        self.constraints.iter().zip(y).map(|(c, yi)| &c.rhs * yi).sum()
    }

    /// Sign conditions on row multipliers for this program's sense: for a
    /// maximization, `≤` rows take `y ≥ 0` and `≥` rows take `y ≤ 0`;
    /// reversed for a minimization.
    fn dual_sign_ok(&self, y: &[Rational]) -> bool {
        self.constraints.iter().zip(y).all(|(c, yi)| {
            let pos_ok = match (self.sense, c.rel) {
                (_, Rel::Eq) => return true,
                (Sense::Max, Rel::Le) | (Sense::Min, Rel::Ge) => true,
                _ => false,
            };
            if pos_ok {
                !yi.is_negative()
            } else {
                !yi.is_positive()
            }
        })
    }
}

/// An optimal primal/dual pair.
#[derive(Clone, Debug)]
pub struct LpSolution {
    pub x: Vec<Rational>,
    /// One multiplier per constraint row.
    pub y: Vec<Rational>,
    pub value: Rational,
}

impl LpSolution {
    /// Exact check of primal feasibility, dual feasibility and equal objectives.
    pub fn certify(&self, lp: &LinearProgram) -> std::result::Result<(), String> {
        if !lp.is_feasible(&self.x) {
            return Err("primal point infeasible".into());
        }
        if self.y.len() != lp.constraints.len() || !lp.dual_sign_ok(&self.y) {
            return Err("dual multipliers have the wrong sign".into());
        }
        let aty = lp.transpose_mul(&self.y);
        for (j, (a, c)) in aty.iter().zip(&lp.objective).enumerate() {
            let ok = match (lp.vars[j], lp.sense) {
                (VarKind::Free, _) => a == c,
                (VarKind::NonNeg, Sense::Max) => a >= c,
                (VarKind::NonNeg, Sense::Min) => a <= c,
            };
            if !ok {
                return Err(format!("dual constraint for variable {j} violated"));
            }
        }
        if lp.objective_value(&self.x) != self.value || lp.dual_value(&self.y) != self.value {
            return Err("primal and dual objectives differ".into());
        }
        Ok(())
    }
}

/// Farkas multipliers proving infeasibility: sign-feasible for a zero
/// objective (as if maximizing) and `b·y < 0`.
#[derive(Clone, Debug)]
pub struct Farkas {
    pub y: Vec<Rational>,
}

impl Farkas {
    pub fn certify(&self, lp: &LinearProgram) -> bool {
        let mut probe = lp.clone();
        probe.sense = Sense::Max;
        if self.y.len() != lp.constraints.len() || !probe.dual_sign_ok(&self.y) {
            return false;
        }
        let aty = lp.transpose_mul(&self.y);
        let cols_ok = aty.iter().zip(&lp.vars).all(|(a, k)| match k {
            VarKind::Free => a.is_zero(),
            VarKind::NonNeg => !a.is_negative(),
        });
        cols_ok && lp.dual_value(&self.y).is_negative()
    }
}

/// A feasible point and a direction along which the objective improves forever.
#[derive(Clone, Debug)]
pub struct Ray {
    pub point: Vec<Rational>,
    pub direction: Vec<Rational>,
}

impl Ray {
    pub fn certify(&self, lp: &LinearProgram) -> bool {
        if !lp.is_feasible(&self.point) {
            return false;
        }
        let dir_ok = lp.constraints.iter().all(|c| {
            let l = c.lhs(&self.direction);
            match c.rel {
                Rel::Le => !l.is_positive(),
                Rel::Ge => !l.is_negative(),
                Rel::Eq => l.is_zero(),
            }
        }) && lp
            .vars
            .iter()
            .zip(&self.direction)
            .all(|(k, d)| *k == VarKind::Free || !d.is_negative());
        let gain = lp.objective_value(&self.direction);
        dir_ok
            && match lp.sense {
                Sense::Max => gain.is_positive(),
                Sense::Min => gain.is_negative(),
            }
    }
}

#[derive(Clone, Debug)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible(Farkas),
    Unbounded(Ray),
}

impl LpOutcome {
    pub fn optimal(self) -> Option<LpSolution> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }

    pub fn status(&self) -> &'static str {
        match self {
            LpOutcome::Optimal(_) => "optimal",
            LpOutcome::Infeasible(_) => "infeasible",
            LpOutcome::Unbounded(_) => "unbounded",
        }
    }

    /// Certifies whichever outcome this is.
    pub fn certify(&self, lp: &LinearProgram) -> bool {
        match self {
            LpOutcome::Optimal(s) => s.certify(lp).is_ok(),
            LpOutcome::Infeasible(f) => f.certify(lp),
            LpOutcome::Unbounded(r) => r.certify(lp),
        }
    }
}
