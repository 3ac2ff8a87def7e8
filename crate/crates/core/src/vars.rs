//! Variable universes and bitmask variable sets.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Hard limit on universe size.
pub const MAX_VARS: usize = 16;

/// Default limit on the number of set-function coordinates an LP may use.
pub const DEFAULT_LP_MAX_VARS: usize = 1 << 10;

/// Environment variable overriding [`DEFAULT_LP_MAX_VARS`].
pub const LP_MAX_VARS_ENV: &str = "ENTRO_LP_MAXVARS";

/// LP coordinate cap: `ENTRO_LP_MAXVARS` if set and valid, clamped to `2^16`.
pub fn lp_var_cap() -> usize {
    std::env::var(LP_MAX_VARS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(DEFAULT_LP_MAX_VARS)
        .min(1 << MAX_VARS)
}

/// Fails with `ResourceCap` when a universe of `n` variables exceeds the LP cap.
pub fn check_lp_cap(n: usize) -> Result<()> {
    let cap = lp_var_cap();
    if n > MAX_VARS || (1usize << n) > cap {
        return Err(Error::ResourceCap(format!(
            "{n} variables need {} LP coordinates, cap is {cap}",
            1u64 << n.min(63)
        )));
    }
    Ok(())
}

/// A set of variables, bit `i` standing for the `i`-th variable of some universe.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct VarSet(pub u32);

impl VarSet {
    pub const EMPTY: VarSet = VarSet(0);

    pub fn singleton(i: usize) -> Self {
        VarSet(1 << i)
    }

    pub fn full(n: usize) -> Self {
        VarSet(((1u64 << n) - 1) as u32)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(it: I) -> Self {
        VarSet(it.into_iter().fold(0, |m, i| m | (1 << i)))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn union(self, o: VarSet) -> VarSet {
        VarSet(self.0 | o.0)
    }

    pub fn intersection(self, o: VarSet) -> VarSet {
        VarSet(self.0 & o.0)
    }

    pub fn difference(self, o: VarSet) -> VarSet {
        VarSet(self.0 & !o.0)
    }

    pub fn insert(self, i: usize) -> VarSet {
        VarSet(self.0 | 1 << i)
    }

    pub fn remove(self, i: usize) -> VarSet {
        VarSet(self.0 & !(1 << i))
    }

    pub fn is_subset(self, o: VarSet) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn is_disjoint(self, o: VarSet) -> bool {
        self.0 & o.0 == 0
    }

    /// Comparable under inclusion.
    pub fn comparable(self, o: VarSet) -> bool {
        self.is_subset(o) || o.is_subset(self)
    }

    /// Member indices in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut m = self.0;
        std::iter::from_fn(move || {
            if m == 0 {
                None
            } else {
                let i = m.trailing_zeros() as usize;
                m &= m - 1;
                Some(i)
            }
        })
    }

    /// Highest member index.
    pub fn last(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(31 - self.0.leading_zeros() as usize)
        }
    }

    /// All subsets, in increasing mask order.
    pub fn subsets(self) -> impl Iterator<Item = VarSet> {
        let full = self.0;
        let mut cur: Option<u32> = Some(0);
        std::iter::from_fn(move || {
            let c = cur?;
            cur = if c == full { None } else { Some((c.wrapping_sub(full)) & full) };
            Some(VarSet(c))
        })
    }
}

impl fmt::Debug for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// An ordered, named list of at most 16 variables. Cheap to clone.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VarUniverse {
    names: Arc<[String]>,
}

impl VarUniverse {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        if names.len() > MAX_VARS {
            return Err(Error::ResourceCap(format!(
                "{} variables exceed the limit of {MAX_VARS}",
                names.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for n in names {
            let n = n.as_ref();
            if n.is_empty() || !n.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '\'') {
                return Err(Error::Parse(format!("invalid variable name `{n}`")));
            }
            if !seen.insert(n) {
                return Err(Error::Parse(format!("duplicate variable `{n}`")));
            }
        }
        Ok(VarUniverse { names: names.iter().map(|s| s.as_ref().to_string()).collect() })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn full(&self) -> VarSet {
        VarSet::full(self.len())
    }

    /// Number of subsets, `2^n`.
    pub fn size(&self) -> usize {
        1 << self.len()
    }

    pub fn all_sets(&self) -> impl Iterator<Item = VarSet> {
        (0..self.size() as u32).map(VarSet)
    }

    pub fn var(&self, name: &str) -> Result<usize> {
        self.index_of(name)
            .ok_or_else(|| Error::UniverseMismatch(format!("unknown variable `{name}`")))
    }

    pub fn set<S: AsRef<str>>(&self, names: &[S]) -> Result<VarSet> {
        let mut s = VarSet::EMPTY;
        for n in names {
            s = s.insert(self.var(n.as_ref())?);
        }
        Ok(s)
    }

    /// Parses `X,Y`, `{X,Y}`, `XY` (single-letter names only), `{}` or empty.
    pub fn parse_set(&self, text: &str) -> Result<VarSet> {
        let t = text.trim();
        let t = t.strip_prefix('{').and_then(|x| x.strip_suffix('}')).unwrap_or(t).trim();
        if t.is_empty() || t == "∅" {
            return Ok(VarSet::EMPTY);
        }
        if t.contains(',') || t.contains(' ') {
            let parts: Vec<&str> =
                t.split(|c| c == ',' || c == ' ').map(str::trim).filter(|p| !p.is_empty()).collect();
            return self.set(&parts);
        }
        if let Some(i) = self.index_of(t) {
            return Ok(VarSet::singleton(i));
        }
        // Concatenated single-character names.
        let mut s = VarSet::EMPTY;
        for c in t.chars() {
            s = s.insert(self.var(&c.to_string())?);
        }
        Ok(s)
    }

    pub fn check(&self, s: VarSet) -> Result<()> {
        if s.is_subset(self.full()) {
            Ok(())
        } else {
            Err(Error::UniverseMismatch(format!(
                "set {s:?} has members outside a universe of {} variables",
                self.len()
            )))
        }
    }

    /// Comma-separated member names, `{}` for the empty set.
    pub fn fmt_set(&self, s: VarSet) -> String {
        if s.is_empty() {
            return "{}".to_string();
        }
        s.iter().map(|i| self.name(i)).collect::<Vec<_>>().join(",")
    }

    /// Concatenated member names, as in `XYZ`; `∅` for the empty set.
    pub fn fmt_compact(&self, s: VarSet) -> String {
        if s.is_empty() {
            return "∅".to_string();
        }
        let multi = s.iter().any(|i| self.name(i).chars().count() > 1);
        let names: Vec<&str> = s.iter().map(|i| self.name(i)).collect();
        if multi {
            names.join(",")
        } else {
            names.concat()
        }
    }
}

impl fmt::Debug for VarUniverse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VarUniverse({})", self.names.join(","))
    }
}
