use std::collections::BTreeSet;

use itertools::Itertools;

use super::Constraint;
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Largest dimension accepted by [`enumerate_vertices`].
pub const MAX_VERTEX_DIM: usize = 6;

/// Solves the square system `a x = b` exactly; `None` if singular.
pub fn solve_square(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = b.len();
    let mut m: Vec<Vec<Rational>> =
        a.iter().zip(b).map(|(r, v)| r.iter().cloned().chain(std::iter::once(v.clone())).collect()).collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let inv = m[col][col].recip();
        for v in m[col].iter_mut() {
            *v *= &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                let (src, dst) = if r < col {
                    let (lo, hi) = m.split_at_mut(col);
                    (&hi[0], &mut lo[r])
                } else {
                    let (lo, hi) = m.split_at_mut(r);
                    (&lo[col], &mut hi[0])
                };
                for (d, s) in dst.iter_mut().zip(src.iter()) {
                    if !s.is_zero() {
                        *d -= &f * s;
                    }
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n].clone()).collect())
}

/// All vertices of `{x ∈ Q^dim : every constraint holds}`, sorted and
/// deduplicated. Non-negativity must be given as explicit rows.
pub fn enumerate_vertices(dim: usize, rows: &[Constraint]) -> Result<Vec<Vec<Rational>>> {
    if dim == 0 || dim > MAX_VERTEX_DIM {
        return Err(Error::ResourceCap(format!(
            "vertex enumeration supports dimensions 1..={MAX_VERTEX_DIM}, got {dim}"
        )));
    }
    if let Some(c) = rows.iter().find(|c| c.coeffs.iter().any(|(j, _)| *j >= dim)) {
        return Err(Error::Invalid(format!("constraint {c:?} exceeds dimension {dim}")));
    }
    let dense: Vec<Vec<Rational>> = rows
        .iter()
        .map(|c| {
            let mut r = vec![Rational::zero(); dim];
            for (j, v) in &c.coeffs {
                r[*j] += v;
            }
            r
        })
        .collect();
    let mut out = BTreeSet::new();
    for pick in (0..rows.len()).combinations(dim) {
        let a: Vec<Vec<Rational>> = pick.iter().map(|&i| dense[i].clone()).collect();
        let b: Vec<Rational> = pick.iter().map(|&i| rows[i].rhs.clone()).collect();
        if let Some(x) = solve_square(&a, &b) {
            if rows.iter().all(|c| c.holds(&x)) {
                out.insert(x);
            }
        }
    }
    Ok(out.into_iter().collect())
}
