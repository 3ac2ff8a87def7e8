//! Checked-in set functions used by tests, examples and the acceptance suite.

use std::collections::BTreeMap;

use super::{Fd, FdLattice};
use crate::rational::Rational;
use crate::setfn::SetFunction;
use crate::vars::VarUniverse;

fn load(text: &str) -> SetFunction {
    SetFunction::parse(text, None).expect("fixture parses")
}

/// Entropy of the uniform distribution on `{000, 011, 101, 110}` over `X,Y,Z`.
pub fn parity() -> SetFunction {
    load(include_str!("../../fixtures/parity.setfn"))
}

/// Lattice polymatroid over `X,Y,A,B` that violates the Zhang–Yeung
/// inequality: `I(X;Y) = 1` while every other term vanishes.
pub fn zhang_yeung() -> SetFunction {
    load(include_str!("../../fixtures/zhang_yeung.setfn"))
}

/// The FD lattice behind [`zhang_yeung`]: `AB -> XY`, `AXY -> B`, `BXY -> A`,
/// with value 2 on singletons, 3 on closed pairs and 4 on the top.
pub fn zhang_yeung_lattice() -> (FdLattice, BTreeMap<crate::vars::VarSet, Rational>) {
    let u = VarUniverse::new(&["X", "Y", "A", "B"]).unwrap();
    let fds = ["A,B -> X,Y", "A,X,Y -> B", "B,X,Y -> A"]
        .iter()
        .map(|t| Fd::parse(t, &u).unwrap())
        .collect();
    let lattice = FdLattice::new(&u, fds).unwrap();
    let values = lattice
        .closed_sets()
        .iter()
        .map(|s| {
            let v = match s.len() {
                0 => 0,
                1 => 2,
                2 => 3,
                _ => 4,
            };
            (*s, Rational::from_int(v))
        })
        .collect();
    (lattice, values)
}

/// Polymatroid over `X,Y,A,B,C`: the Zhang–Yeung values on `X,Y,A,B`,
/// `h(C) = 2`, and 4 on every larger set containing `C`.
pub fn gap_abxyc() -> SetFunction {
    load(include_str!("../../fixtures/gap_abxyc.setfn"))
}

/// Modular `h(U) = |U| / 2` over `X,Y,Z`.
pub fn heavy_light_triangle() -> SetFunction {
    load(include_str!("../../fixtures/heavy_light_triangle.setfn"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polymatroid::is_polymatroid;

    #[test]
    fn fixtures_are_polymatroids() {
        for h in [parity(), zhang_yeung(), gap_abxyc(), heavy_light_triangle()] {
            assert!(is_polymatroid(&h), "{h:?}");
        }
    }

    #[test]
    fn zhang_yeung_matches_lattice() {
        let (l, vals) = zhang_yeung_lattice();
        assert_eq!(l.closed_sets().len(), 11);
        assert_eq!(l.polymatroid(&vals).unwrap(), zhang_yeung());
    }
}
