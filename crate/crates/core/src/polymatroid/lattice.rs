use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::setfn::SetFunction;
use crate::vars::{VarSet, VarUniverse};

/// A functional dependency `lhs -> rhs`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fd {
    pub lhs: VarSet,
    pub rhs: VarSet,
}

impl Fd {
    pub fn new(lhs: VarSet, rhs: VarSet) -> Self {
        Fd { lhs, rhs }
    }

    /// Parses `A,B -> C` (an optional leading `fd` keyword is accepted).
    pub fn parse(text: &str, u: &VarUniverse) -> Result<Fd> {
        let t = text.trim();
        let t = t.strip_prefix("fd ").unwrap_or(t);
        let (l, r) = t.split_once("->").ok_or_else(|| Error::Parse(format!("expected `U -> V` in `{text}`")))?;
        Ok(Fd { lhs: u.parse_set(l)?, rhs: u.parse_set(r)? })
    }
}

/// Smallest superset of `u` closed under every FD.
pub fn closure(u: VarSet, fds: &[Fd]) -> VarSet {
    let mut c = u;
    loop {
        let next = fds.iter().fold(c, |acc, f| if f.lhs.is_subset(acc) { acc.union(f.rhs) } else { acc });
        if next == c {
            return c;
        }
        c = next;
    }
}

/// The lattice of closed sets of a set of FDs: meet is intersection, join is
/// the closure of the union.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FdLattice {
    universe: VarUniverse,
    fds: Vec<Fd>,
    closed: Vec<VarSet>,
}

impl FdLattice {
    pub fn new(universe: &VarUniverse, fds: Vec<Fd>) -> Result<Self> {
        for f in &fds {
            universe.check(f.lhs.union(f.rhs))?;
        }
        let closed = universe.all_sets().filter(|s| closure(*s, &fds) == *s).collect();
        Ok(FdLattice { universe: universe.clone(), fds, closed })
    }

    pub fn universe(&self) -> &VarUniverse {
        &self.universe
    }

    pub fn fds(&self) -> &[Fd] {
        &self.fds
    }

    /// Closed sets in mask order.
    pub fn closed_sets(&self) -> &[VarSet] {
        &self.closed
    }

    pub fn closure(&self, u: VarSet) -> VarSet {
        closure(u, &self.fds)
    }

    pub fn bottom(&self) -> VarSet {
        self.closure(VarSet::EMPTY)
    }

    pub fn join(&self, a: VarSet, b: VarSet) -> VarSet {
        self.closure(a.union(b))
    }

    pub fn meet(&self, a: VarSet, b: VarSet) -> VarSet {
        a.intersection(b)
    }

    /// Extends values on closed sets to `h̄(U) = h(U⁺)` after checking that
    /// they form a polymatroid on the lattice.
    pub fn polymatroid(&self, values: &BTreeMap<VarSet, Rational>) -> Result<SetFunction> {
        for k in values.keys() {
            if self.closure(*k) != *k {
                return Err(Error::Invalid(format!("{} is not closed", self.universe.fmt_set(*k))));
            }
        }
        let get = |s: VarSet| {
            values
                .get(&s)
                .ok_or_else(|| Error::Invalid(format!("no value for closed set {}", self.universe.fmt_set(s))))
        };
        if !get(self.bottom())?.is_zero() {
            return Err(Error::Invalid("bottom of the lattice must have value 0".into()));
        }
        for &a in &self.closed {
            for &b in &self.closed {
                let (ha, hb) = (get(a)?, get(b)?);
                if a.is_subset(b) && ha > hb {
                    return Err(Error::Invalid(format!(
                        "monotonicity fails at {} ⊆ {}",
                        self.universe.fmt_set(a),
                        self.universe.fmt_set(b)
                    )));
                }
                if ha + hb < get(self.join(a, b))? + get(self.meet(a, b))? {
                    return Err(Error::Invalid(format!(
                        "submodularity fails at ({}, {})",
                        self.universe.fmt_set(a),
                        self.universe.fmt_set(b)
                    )));
                }
            }
        }
        let mut out = Vec::with_capacity(self.universe.size());
        for s in self.universe.all_sets() {
            out.push(get(self.closure(s))?.clone());
        }
        SetFunction::from_values(&self.universe, out)
    }
}

impl fmt::Display for FdLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.closed.iter().map(|s| self.universe.fmt_compact(*s)).collect();
        write!(f, "{{{}}}", names.join(", "))
    }
}
