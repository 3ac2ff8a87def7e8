use super::{Farkas, LinearProgram, LpOutcome, LpSolution, Ray, Rel, Sense, VarKind};
use crate::rational::Rational;

/// Standard-form column layout for a program.
struct Layout {
    /// Per original variable: (positive column, negative column if free).
    var_cols: Vec<(usize, Option<usize>)>,
    /// Per row: whether the row was multiplied by -1 to make rhs non-negative.
    flipped: Vec<bool>,
    /// Per row: relation after flipping.
    rel: Vec<Rel>,
    /// Per row: slack (`≤`) or surplus (`≥`) column.
    slack_col: Vec<Option<usize>>,
    /// Per row: the column that starts as the identity (slack or artificial).
    id_col: Vec<usize>,
    /// First artificial column; all columns from here on are artificial.
    first_art: usize,
    ncols: usize,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    d: Vec<Rational>,
    z: Rational,
}

enum Step {
    Optimal,
    Unbounded(usize),
}

impl Tableau {
    fn pivot(&mut self, r: usize, e: usize) {
        let p = self.rows[r][e].clone();
        if p != Rational::one() {
            let inv = p.recip();
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v *= &inv;
                }
            }
            self.rhs[r] *= &inv;
        }
        let nz: Vec<(usize, Rational)> = self.rows[r]
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(j, v)| (j, v.clone()))
            .collect();
        let br = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][e].is_zero() {
                continue;
            }
            let f = self.rows[i][e].clone();
            let row = &mut self.rows[i];
            for (j, v) in &nz {
                row[*j] -= &f * v;
            }
            self.rhs[i] -= &f * &br;
        }
        if !self.d[e].is_zero() {
            let f = self.d[e].clone();
            for (j, v) in &nz {
                self.d[*j] -= &f * v;
            }
            self.z += &f * &br;
        }
        self.basis[r] = e;
    }

    /// Runs Bland's rule over columns `< allowed` until optimal or unbounded.
    fn run(&mut self, allowed: usize) -> Step {
        loop {
            let Some(e) = (0..allowed).find(|&j| self.d[j].is_positive()) else {
                return Step::Optimal;
            };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][e];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                None => return Step::Unbounded(e),
                Some((r, _)) => self.pivot(r, e),
            }
        }
    }

    fn set_objective(&mut self, c: &[Rational]) {
        self.d = c.to_vec();
        self.z = Rational::zero();
        for i in 0..self.rows.len() {
            let cb = &c[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for (j, v) in self.rows[i].iter().enumerate() {
                if !v.is_zero() {
                    self.d[j] -= cb * v;
                }
            }
            self.z += cb * &self.rhs[i];
        }
    }

    fn column_values(&self, ncols: usize) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); ncols];
        for (i, b) in self.basis.iter().enumerate() {
            x[*b] = self.rhs[i].clone();
        }
        x
    }

    /// Row multipliers of the standard-form rows for objective `c`.
    fn duals(&self, layout: &Layout, c: &[Rational]) -> Vec<Rational> {
        layout.id_col.iter().map(|&col| &c[col] - &self.d[col]).collect()
    }
}

fn layout(lp: &LinearProgram) -> Layout {
    let mut ncols = 0;
    let var_cols = lp
        .vars
        .iter()
        .map(|k| {
            let p = ncols;
            ncols += 1;
            let n = if *k == VarKind::Free {
                ncols += 1;
                Some(p + 1)
            } else {
                None
            };
            (p, n)
        })
        .collect();
    let flipped: Vec<bool> = lp.constraints.iter().map(|c| c.rhs.is_negative()).collect();
    let rel: Vec<Rel> = lp
        .constraints
        .iter()
        .zip(&flipped)
        .map(|(c, f)| match (f, c.rel) {
            (true, Rel::Le) => Rel::Ge,
            (true, Rel::Ge) => Rel::Le,
            (_, r) => r,
        })
        .collect();
    // Slack and surplus columns first, then artificials.
    let slack_col: Vec<Option<usize>> = rel
        .iter()
        .map(|r| {
            (*r != Rel::Eq).then(|| {
                ncols += 1;
                ncols - 1
            })
        })
        .collect();
    let first_art = ncols;
    let id_col = rel
        .iter()
        .zip(&slack_col)
        .map(|(r, s)| match r {
            Rel::Le => s.unwrap(),
            _ => {
                ncols += 1;
                ncols - 1
            }
        })
        .collect();
    Layout { var_cols, flipped, rel, slack_col, id_col, first_art, ncols }
}

pub(super) fn solve(lp: &LinearProgram) -> LpOutcome {
    let lay = layout(lp);
    let m = lp.constraints.len();
    let mut rows = vec![vec![Rational::zero(); lay.ncols]; m];
    let mut rhs = Vec::with_capacity(m);
    for (i, c) in lp.constraints.iter().enumerate() {
        let sgn = if lay.flipped[i] { -Rational::one() } else { Rational::one() };
        for (j, a) in &c.coeffs {
            let (p, n) = lay.var_cols[*j];
            let a = a * &sgn;
            rows[i][p] += &a;
            if let Some(n) = n {
                rows[i][n] -= &a;
            }
        }
        rhs.push(&c.rhs * &sgn);
        match (lay.rel[i], lay.slack_col[i]) {
            (Rel::Le, Some(s)) => rows[i][s] = Rational::one(),
            (Rel::Ge, Some(s)) => rows[i][s] = -Rational::one(),
            _ => {}
        }
        if lay.rel[i] != Rel::Le {
            rows[i][lay.id_col[i]] = Rational::one();
        }
    }
    let mut t = Tableau {
        rows,
        rhs,
        basis: lay.id_col.clone(),
        d: Vec::new(),
        z: Rational::zero(),
    };

    // Phase 1: maximize -Σ artificials.
    let mut c1 = vec![Rational::zero(); lay.ncols];
    for c in c1.iter_mut().skip(lay.first_art) {
        *c = -Rational::one();
    }
    t.set_objective(&c1);
    if lay.first_art < lay.ncols {
        match t.run(lay.ncols) {
            Step::Optimal => {}
            Step::Unbounded(_) => unreachable!("phase 1 is bounded"),
        }
        if t.z.is_negative() {
            let y = map_duals(&lay, t.duals(&lay, &c1));
            return LpOutcome::Infeasible(Farkas { y });
        }
        // Drive zero-level artificials out of the basis where possible.
        for r in 0..m {
            if t.basis[r] >= lay.first_art {
                if let Some(e) = (0..lay.first_art).find(|&j| !t.rows[r][j].is_zero()) {
                    t.pivot(r, e);
                }
            }
        }
    }

    // Phase 2 on the original objective, as a maximization.
    let flip_obj = lp.sense == Sense::Min;
    let mut c2 = vec![Rational::zero(); lay.ncols];
    for (j, (p, n)) in lay.var_cols.iter().enumerate() {
        let c = if flip_obj { -&lp.objective[j] } else { lp.objective[j].clone() };
        if let Some(n) = n {
            c2[*n] = -&c;
        }
        c2[*p] = c;
    }
    t.set_objective(&c2);
    match t.run(lay.first_art) {
        Step::Optimal => {
            let xs = t.column_values(lay.ncols);
            let x = original_values(&lay, &xs);
            let mut y = map_duals(&lay, t.duals(&lay, &c2));
            if flip_obj {
                y.iter_mut().for_each(|v| *v = -v.clone());
            }
            let value = lp.objective_value(&x);
            LpOutcome::Optimal(LpSolution { x, y, value })
        }
        Step::Unbounded(e) => {
            let xs = t.column_values(lay.ncols);
            let mut ds = vec![Rational::zero(); lay.ncols];
            ds[e] = Rational::one();
            for (i, b) in t.basis.iter().enumerate() {
                ds[*b] = -t.rows[i][e].clone();
            }
            LpOutcome::Unbounded(Ray {
                point: original_values(&lay, &xs),
                direction: original_values(&lay, &ds),
            })
        }
    }
}

fn original_values(lay: &Layout, cols: &[Rational]) -> Vec<Rational> {
    lay.var_cols
        .iter()
        .map(|(p, n)| match n {
            Some(n) => &cols[*p] - &cols[*n],
            None => cols[*p].clone(),
        })
        .collect()
}

fn map_duals(lay: &Layout, y_std: Vec<Rational>) -> Vec<Rational> {
    y_std
        .into_iter()
        .zip(&lay.flipped)
        .map(|(y, f)| if *f { -y } else { y })
        .collect()
}
