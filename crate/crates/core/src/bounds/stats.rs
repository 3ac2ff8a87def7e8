use std::fmt;

use crate::error::{Error, Result};
use crate::inequality::SigmaStat;
use crate::query::Query;
use crate::rational::Rational;
use crate::relation::Database;
use crate::vars::{VarSet, VarUniverse};

/// Fractional bits used for `log2 B` when `B` is not a power of two.
pub const STAT_LOG_BITS: u32 = 40;

/// `log2 b`: exact on powers of two, otherwise a dyadic value rounded down.
pub fn log2_stat(b: &Rational) -> Rational {
    match b.exact_log2() {
        Some(k) => Rational::from_int(k),
        None => b.log2_approx(STAT_LOG_BITS),
    }
}

/// `log2 n` rounded up to a dyadic value (exact on powers of two).
pub fn log2_upper(n: u64) -> Rational {
    let r = Rational::from_int(n as i64);
    match r.exact_log2() {
        Some(k) => Rational::from_int(k),
        None => r.log2_approx(64) + Rational::pow2(-64),
    }
}

/// One statistic with its bound `B` (when known) and log-bound `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StatEntry {
    pub stat: SigmaStat,
    pub value: Option<Rational>,
    pub log: Rational,
}

/// Degree statistics guarded by the atoms of a query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StatSpec {
    universe: VarUniverse,
    atoms: Vec<(String, VarSet)>,
    entries: Vec<StatEntry>,
}

impl StatSpec {
    pub fn new(q: &Query) -> Self {
        let atoms = q.atoms.iter().enumerate().map(|(j, a)| (a.relation.clone(), q.atom_set(j))).collect();
        StatSpec { universe: q.universe().clone(), atoms, entries: Vec::new() }
    }

    pub fn universe(&self) -> &VarUniverse {
        &self.universe
    }

    pub fn entries(&self) -> &[StatEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn logs(&self) -> Vec<Rational> {
        self.entries.iter().map(|e| e.log.clone()).collect()
    }

    /// The variables of the first atom over `name`.
    pub fn guard_set(&self, name: &str) -> Option<VarSet> {
        self.atoms.iter().find(|(n, _)| n == name).map(|(_, s)| *s)
    }

    fn check_guard(&self, s: &SigmaStat) -> Result<()> {
        let g = self
            .guard_set(&s.guard)
            .ok_or_else(|| Error::Invalid(format!("statistic guard `{}` is not an atom of the query", s.guard)))?;
        if !s.u.union(s.v).is_subset(g) {
            return Err(Error::Invalid(format!(
                "statistic {} is not guarded by `{}`",
                s.format(&self.universe),
                s.guard
            )));
        }
        Ok(())
    }

    /// Adds `deg(σ) ≤ value`, `value ≥ 1`.
    pub fn push(&mut self, stat: SigmaStat, value: Rational) -> Result<()> {
        self.check_guard(&stat)?;
        if value < Rational::one() {
            return Err(Error::Invalid(format!("statistic value {value} is below 1")));
        }
        let log = log2_stat(&value);
        self.entries.push(StatEntry { stat, value: Some(value), log });
        Ok(())
    }

    /// Adds `log2 deg(σ) ≤ log`, `log ≥ 0`.
    pub fn push_log(&mut self, stat: SigmaStat, log: Rational) -> Result<()> {
        self.check_guard(&stat)?;
        if log.is_negative() {
            return Err(Error::Invalid(format!("log-statistic {log} is negative")));
        }
        let value = if log.is_integer() { log.numer().try_into().ok().map(Rational::pow2) } else { None };
        self.entries.push(StatEntry { stat, value, log });
        Ok(())
    }

    /// Cardinality statistics `|R_j| ≤ B_j`, one per atom.
    pub fn cardinalities(q: &Query, cards: &[Rational]) -> Result<Self> {
        if cards.len() != q.atoms.len() {
            return Err(Error::Invalid(format!("{} cardinalities for {} atoms", cards.len(), q.atoms.len())));
        }
        let mut s = StatSpec::new(q);
        for (j, b) in cards.iter().enumerate() {
            s.push(SigmaStat::card(q.atom_set(j), &q.atoms[j].relation), b.clone())?;
        }
        Ok(s)
    }

    pub fn is_simple(&self) -> bool {
        self.entries.iter().all(|e| e.stat.is_simple())
    }

    pub fn is_cardinality_only(&self) -> bool {
        self.entries.iter().all(|e| e.stat.is_cardinality())
    }

    /// Every log-bound multiplied by `k`.
    pub fn scale_logs(&self, k: &Rational) -> Result<Self> {
        let mut out = StatSpec { entries: Vec::new(), ..self.clone() };
        for e in &self.entries {
            out.push_log(e.stat.clone(), &e.log * k)?;
        }
        Ok(out)
    }

    /// Per-atom log-cardinalities from whole-atom cardinality statistics; the
    /// smallest one wins, `None` where an atom has none.
    pub fn atom_cardinality_logs(&self) -> Vec<Option<Rational>> {
        self.atoms
            .iter()
            .map(|(name, set)| {
                self.entries
                    .iter()
                    .filter(|e| e.stat.guard == *name && e.stat.is_cardinality() && e.stat.v == *set)
                    .map(|e| e.log.clone())
                    .min()
            })
            .collect()
    }

    /// Parses a statistics file against `q`:
    /// `card R <= 1000`, `card * <= 1000`, `deg A (U | X,Z) <= 5`,
    /// `deg R (X,Y) <= 7`, `fd B : Y,U -> X`. Values are rationals or `2^k`.
    pub fn parse(text: &str, q: &Query) -> Result<Self> {
        let mut s = StatSpec::new(q);
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            s.parse_line(line).map_err(|e| match e {
                Error::Parse(m) | Error::Invalid(m) => Error::Parse(format!("line {}: {m}", ln + 1)),
                other => other,
            })?;
        }
        Ok(s)
    }

    fn parse_line(&mut self, line: &str) -> Result<()> {
        let u = self.universe.clone();
        let (kw, rest) = line.split_once(char::is_whitespace).ok_or_else(|| Error::Parse(format!("cannot parse `{line}`")))?;
        let rest = rest.trim();
        match kw {
            "card" => {
                let (name, val) = split_le(rest)?;
                let atoms: Vec<(String, VarSet)> = if name == "*" {
                    let mut seen: Vec<(String, VarSet)> = Vec::new();
                    for a in &self.atoms {
                        if !seen.iter().any(|(n, _)| *n == a.0) {
                            seen.push(a.clone());
                        }
                    }
                    seen
                } else {
                    let g = self.guard_set(name).ok_or_else(|| Error::Parse(format!("unknown relation `{name}`")))?;
                    vec![(name.to_string(), g)]
                };
                for (n, set) in atoms {
                    self.push_value(SigmaStat::card(set, &n), val)?;
                }
            }
            "deg" => {
                let open = rest.find('(').ok_or_else(|| Error::Parse("expected `deg R (V | U) <= B`".into()))?;
                let close = rest.find(')').ok_or_else(|| Error::Parse("missing `)`".into()))?;
                let name = rest[..open].trim();
                let inner = &rest[open + 1..close];
                let (v, c) = match inner.split_once('|') {
                    Some((v, c)) => (u.parse_set(v)?, u.parse_set(c)?),
                    None => (u.parse_set(inner)?, VarSet::EMPTY),
                };
                let val = rest[close + 1..]
                    .trim()
                    .strip_prefix("<=")
                    .ok_or_else(|| Error::Parse("expected `<=` after the statistic".into()))?;
                self.push_value(SigmaStat::new(v, c, name), val.trim())?;
            }
            "fd" => {
                let (name, body) = rest.split_once(':').ok_or_else(|| Error::Parse("expected `fd R : U -> V`".into()))?;
                let (l, r) = body.split_once("->").ok_or_else(|| Error::Parse("expected `->`".into()))?;
                let c = u.parse_set(l)?;
                self.push(SigmaStat::new(u.parse_set(r)?, c, name.trim()), Rational::one())?;
            }
            other => return Err(Error::Parse(format!("unknown statistic kind `{other}`"))),
        }
        Ok(())
    }

    fn push_value(&mut self, stat: SigmaStat, text: &str) -> Result<()> {
        if let Some(k) = text.strip_prefix("2^") {
            let k: Rational = k.trim().parse()?;
            return self.push_log(stat, k);
        }
        self.push(stat, text.parse()?)
    }

    /// One line in the file format for entry `i`.
    pub fn format_entry(&self, i: usize) -> String {
        let e = &self.entries[i];
        let s = &e.stat;
        let u = &self.universe;
        let val = match &e.value {
            Some(v) => v.to_string(),
            None => format!("2^{}", e.log),
        };
        if s.u.is_empty() && Some(s.v) == self.guard_set(&s.guard) {
            format!("card {} <= {val}", s.guard)
        } else if s.u.is_empty() {
            format!("deg {} ({}) <= {val}", s.guard, u.fmt_set(s.v).trim_matches(|c| c == '{' || c == '}'))
        } else {
            let strip = |x: VarSet| u.fmt_set(x).trim_matches(|c| c == '{' || c == '}').to_string();
            format!("deg {} ({} | {}) <= {val}", s.guard, strip(s.v), strip(s.u))
        }
    }
}

impl fmt::Display for StatSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.entries.len() {
            writeln!(f, "{}", self.format_entry(i))?;
        }
        Ok(())
    }
}

fn split_le(s: &str) -> Result<(&str, &str)> {
    let (a, b) = s.split_once("<=").ok_or_else(|| Error::Parse(format!("expected `<=` in `{s}`")))?;
    Ok((a.trim(), b.trim()))
}

/// A statistic the database exceeds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StatViolation {
    pub entry: usize,
    pub degree: u64,
    pub label: String,
}

/// The names of the variables in `s`, in universe order.
pub(crate) fn names(u: &VarUniverse, s: VarSet) -> Vec<String> {
    s.iter().map(|i| u.name(i).to_string()).collect()
}

/// `deg_{R_σ}(σ)` for every entry, `0` when the guard relation is empty.
pub fn stat_degrees(q: &Query, db: &Database, spec: &StatSpec) -> Result<Vec<u64>> {
    let u = q.universe();
    spec.entries
        .iter()
        .map(|e| {
            let j = q
                .atom_index(&e.stat.guard)
                .ok_or_else(|| Error::Invalid(format!("no atom for guard `{}`", e.stat.guard)))?;
            let r = db.bound_atom(q, j)?;
            if r.is_empty() {
                return Ok(0);
            }
            let v = r.varset(&names(u, e.stat.v))?;
            let c = r.varset(&names(u, e.stat.u))?;
            r.degree(v, c)
        })
        .collect()
}

/// Violated statistics; empty when `db ⊨ (Σ, B)`.
pub fn satisfies_stats(q: &Query, db: &Database, spec: &StatSpec) -> Result<Vec<StatViolation>> {
    let degs = stat_degrees(q, db, spec)?;
    let mut out = Vec::new();
    for (i, (e, d)) in spec.entries.iter().zip(degs).enumerate() {
        let ok = match &e.value {
            Some(b) => Rational::from_int(d as i64) <= *b,
            None => u128::from(d) <= pow2_floor_u128(&e.log),
        };
        if !ok {
            out.push(StatViolation { entry: i, degree: d, label: spec.format_entry(i) });
        }
    }
    Ok(out)
}

fn pow2_floor_u128(r: &Rational) -> u128 {
    r.pow2_floor().try_into().unwrap_or(u128::MAX)
}
