use std::collections::BTreeMap;
use std::fmt;

use super::SigmaInequality;
use crate::error::{Error, Result};
use crate::expr::LinExpr;
use crate::rational::Rational;
use crate::vars::{VarSet, VarUniverse};

/// A term `h(V | U)`; `V` never meets `U`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CdTerm {
    pub v: VarSet,
    pub u: VarSet,
}

impl CdTerm {
    pub fn new(v: VarSet, u: VarSet) -> Self {
        CdTerm { v: v.difference(u), u }
    }

    pub fn plain(v: VarSet) -> Self {
        CdTerm { v, u: VarSet::EMPTY }
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_empty()
    }

    pub fn expr(&self) -> LinExpr {
        let mut e = LinExpr::h(self.u.union(self.v));
        e.add_term(self.u, -Rational::one());
        e.without_empty()
    }

    /// `{V}` or `{V|U}`.
    pub fn parse(text: &str, u: &VarUniverse) -> Result<Self> {
        let t = text.trim();
        let inner = t
            .strip_prefix('{')
            .and_then(|s| s.strip_suffix('}'))
            .ok_or_else(|| Error::Parse(format!("expected `{{V}}` or `{{V|U}}`, got `{t}`")))?;
        Ok(match inner.split_once('|') {
            Some((v, c)) => CdTerm::new(u.parse_set(v)?, u.parse_set(c)?),
            None => CdTerm::plain(u.parse_set(inner)?),
        })
    }

    pub fn format(&self, u: &VarUniverse) -> String {
        if self.u.is_empty() {
            format!("h({})", u.fmt_compact(self.v))
        } else {
            format!("h({}|{})", u.fmt_compact(self.v), u.fmt_compact(self.u))
        }
    }
}

/// A multiset of conditional terms. Terms `h(∅ | U)` are zero and dropped.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CdTerms {
    counts: BTreeMap<CdTerm, u32>,
}

impl CdTerms {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, t: CdTerm, k: u32) {
        if !t.is_zero() && k > 0 {
            *self.counts.entry(t).or_insert(0) += k;
        }
    }

    fn take(&mut self, t: CdTerm) -> bool {
        match self.counts.get_mut(&t) {
            Some(k) => {
                *k -= 1;
                if *k == 0 {
                    self.counts.remove(&t);
                }
                true
            }
            None => false,
        }
    }

    pub fn count(&self, t: CdTerm) -> u32 {
        self.counts.get(&t).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (CdTerm, u32)> + '_ {
        self.counts.iter().map(|(t, k)| (*t, *k))
    }

    /// Integer weights of a Σ-inequality become multiplicities.
    pub fn from_sigma(ineq: &SigmaInequality) -> Result<Self> {
        let mut out = CdTerms::new();
        for (s, w) in ineq.terms() {
            if !w.is_integer() {
                return Err(Error::Invalid(format!("weight {w} is not an integer")));
            }
            let k = u32::try_from(w.numer()).map_err(|_| Error::Invalid(format!("weight {w} out of range")))?;
            out.add(CdTerm::new(s.v, s.u), k);
        }
        Ok(out)
    }

    /// Whitespace-separated `{V|U}` tokens with an optional `k*` prefix.
    pub fn parse(text: &str, u: &VarUniverse) -> Result<Self> {
        let mut out = CdTerms::new();
        for tok in text.split_whitespace() {
            let (k, t) = match tok.split_once('*') {
                Some((k, t)) => (k.parse::<u32>().map_err(|_| Error::Parse(format!("bad multiplicity in `{tok}`")))?, t),
                None => (1, tok),
            };
            out.add(CdTerm::parse(t, u)?, k);
        }
        Ok(out)
    }

    pub fn to_expr(&self) -> LinExpr {
        let mut e = LinExpr::new();
        for (t, k) in self.iter() {
            e.add_scaled(&t.expr(), &Rational::from_int(k as i64));
        }
        e
    }

    pub fn format(&self, u: &VarUniverse) -> String {
        if self.counts.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .iter()
            .map(|(t, k)| if k == 1 { t.format(u) } else { format!("{k} {}", t.format(u)) })
            .collect();
        parts.join(" + ")
    }
}

/// One step of a CD proof.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CdStep {
    /// `h(U) + h(V|U) -> h(UV)`.
    Compose { u: VarSet, v: VarSet },
    /// `h(W) -> h(U) + h(W - U | U)` for `U ⊆ W`.
    Decompose { w: VarSet, u: VarSet },
    /// `h(V|U) -> h(V|UW)`.
    Submod { v: VarSet, u: VarSet, w: VarSet },
    /// `h(V|U) -> 0`.
    Noop { v: VarSet, u: VarSet },
    /// `h(U) + h(V) -> h(U ∪ V) + h(U ∩ V)` for incomparable `U`, `V`.
    Compress { u: VarSet, v: VarSet },
}

impl CdStep {
    /// Terms consumed and produced.
    fn operands(&self) -> (Vec<CdTerm>, Vec<CdTerm>) {
        use CdStep::*;
        match *self {
            Compose { u, v } => (vec![CdTerm::plain(u), CdTerm::new(v, u)], vec![CdTerm::plain(u.union(v))]),
            Decompose { w, u } => (vec![CdTerm::plain(w)], vec![CdTerm::plain(u), CdTerm::new(w, u)]),
            Submod { v, u, w } => (vec![CdTerm::new(v, u)], vec![CdTerm::new(v, u.union(w))]),
            Noop { v, u } => (vec![CdTerm::new(v, u)], vec![]),
            Compress { u, v } => (
                vec![CdTerm::plain(u), CdTerm::plain(v)],
                vec![CdTerm::plain(u.union(v)), CdTerm::plain(u.intersection(v))],
            ),
        }
    }

    /// `before - after`, an expression that is `≥ 0` on every polymatroid.
    pub fn gap_expr(&self) -> LinExpr {
        let (before, after) = self.operands();
        let mut e = LinExpr::new();
        for t in before {
            e = e.add(&t.expr());
        }
        for t in after {
            e = e.sub(&t.expr());
        }
        e
    }

    fn check_shape(&self) -> std::result::Result<(), String> {
        match *self {
            CdStep::Decompose { w, u } if !u.is_subset(w) => Err("decomposition needs U ⊆ W".into()),
            CdStep::Compress { u, v } if u.comparable(v) => Err("compression needs incomparable sets".into()),
            _ => Ok(()),
        }
    }

    pub fn apply(&self, terms: &mut CdTerms) -> std::result::Result<(), String> {
        self.check_shape()?;
        let (before, after) = self.operands();
        let mut next = terms.clone();
        for t in &before {
            if !t.is_zero() && !next.take(*t) {
                return Err(format!("operand {t:?} is not present"));
            }
        }
        for t in after {
            next.add(t, 1);
        }
        *terms = next;
        Ok(())
    }

    pub fn format(&self, u: &VarUniverse) -> String {
        let t = |v: VarSet, c: VarSet| {
            if c.is_empty() {
                format!("{{{}}}", u.fmt_compact(v))
            } else {
                format!("{{{}|{}}}", u.fmt_compact(v.difference(c)), u.fmt_compact(c))
            }
        };
        let e = VarSet::EMPTY;
        match *self {
            CdStep::Compose { u: a, v } => format!("compose {} {}", t(a, e), t(v, a)),
            CdStep::Decompose { w, u: a } => format!("decompose {} {}", t(w, e), t(a, e)),
            CdStep::Submod { v, u: c, w } => format!("submod {} add {}", t(v, c), t(w, e)),
            CdStep::Noop { v, u: c } => format!("noop {}", t(v, c)),
            CdStep::Compress { u: a, v } => format!("compress {} {}", t(a, e), t(v, e)),
        }
    }
}

/// Parses a line-oriented proof script:
/// `compose {U} {V|U}`, `decompose {W} {U}`, `submod {V|U} add {W}`,
/// `noop {V}` or `noop {V|U}`, `compress {U} {V}`. `#` starts a comment.
pub fn parse_cd_script(text: &str, u: &VarUniverse) -> Result<Vec<CdStep>> {
    let mut steps = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |m: &str| Error::Parse(format!("line {}: {m}: `{line}`", ln + 1));
        let toks: Vec<&str> = line.split_whitespace().collect();
        let term = |i: usize| -> Result<CdTerm> {
            CdTerm::parse(toks.get(i).ok_or_else(|| err("missing operand"))?, u)
        };
        let plain = |i: usize| -> Result<VarSet> {
            let t = term(i)?;
            if !t.u.is_empty() {
                return Err(err("expected an unconditional term"));
            }
            Ok(t.v)
        };
        let (step, arity) = match toks[0] {
            "compose" => {
                let a = plain(1)?;
                let b = term(2)?;
                if b.u != a {
                    return Err(err("the second operand must be conditioned on the first"));
                }
                (CdStep::Compose { u: a, v: b.v }, 3)
            }
            "decompose" => (CdStep::Decompose { w: plain(1)?, u: plain(2)? }, 3),
            "submod" => {
                if toks.get(2) != Some(&"add") {
                    return Err(err("expected `submod {V|U} add {W}`"));
                }
                let t = term(1)?;
                (CdStep::Submod { v: t.v, u: t.u, w: plain(3)? }, 4)
            }
            "noop" => {
                let t = term(1)?;
                (CdStep::Noop { v: t.v, u: t.u }, 2)
            }
            "compress" => (CdStep::Compress { u: plain(1)?, v: plain(2)? }, 3),
            other => return Err(err(&format!("unknown step `{other}`"))),
        };
        if toks.len() != arity {
            return Err(err("wrong number of operands"));
        }
        steps.push(step);
    }
    Ok(steps)
}

/// Why a CD proof was rejected. `step` is `None` when every step applied but
/// the goal was not reached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CdError {
    pub step: Option<usize>,
    pub reason: String,
}

impl fmt::Display for CdError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.step {
            Some(i) => write!(f, "step {}: {}", i + 1, self.reason),
            None => write!(f, "{}", self.reason),
        }
    }
}

/// Applies `steps` to `start` and checks the result contains `k0 h(goal)`.
/// Returns the final multiset.
pub fn verify_cd_proof(
    start: &CdTerms,
    steps: &[CdStep],
    k0: u32,
    goal: VarSet,
) -> std::result::Result<CdTerms, CdError> {
    let mut cur = start.clone();
    for (i, s) in steps.iter().enumerate() {
        s.apply(&mut cur).map_err(|reason| CdError { step: Some(i), reason })?;
    }
    let have = cur.count(CdTerm::plain(goal));
    if have < k0 {
        return Err(CdError { step: None, reason: format!("goal needs {k0} copies, found {have}") });
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::check_identity;
    use crate::inequality::check_shannon;

    const SHEARER: &str = "
        decompose {X,Y} {Y}
        submod {X|Y} add {Z}
        compose {Y,Z} {X|Y,Z}
        submod {Y} add {X,Z}
        compose {X,Z} {Y|X,Z}
        noop {X,Y,Z}
    ";

    fn xyz() -> VarUniverse {
        VarUniverse::new(&["X", "Y", "Z"]).unwrap()
    }

    #[test]
    fn single_composition() {
        let u = xyz();
        let start = CdTerms::parse("{X} {Y|X}", &u).unwrap();
        let steps = parse_cd_script("compose {X} {Y|X}", &u).unwrap();
        let end = verify_cd_proof(&start, &steps, 1, u.parse_set("XY").unwrap()).unwrap();
        assert_eq!(end.format(&u), "h(XY)");
    }

    #[test]
    fn shearer_script() {
        let u = xyz();
        let start = CdTerms::parse("{X,Y} {Y,Z} {Z,X}", &u).unwrap();
        let steps = parse_cd_script(SHEARER, &u).unwrap();
        // The noop leaves one copy; the goal is met before it.
        assert!(verify_cd_proof(&start, &steps, 1, u.full()).is_ok());
        let end = verify_cd_proof(&start, &steps[..5], 2, u.full()).unwrap();
        // start = Σ gaps + end, and the whole is a valid inequality.
        let mut rhs = end.to_expr();
        for s in &steps[..5] {
            rhs = rhs.add(&s.gap_expr());
        }
        assert!(check_identity(&u, &start.to_expr(), &rhs).unwrap());
        let ineq = start.to_expr().sub(&LinExpr::h(u.full()).scale(&Rational::from_int(2)));
        assert!(check_shannon(&u, &ineq).unwrap().is_valid());
        for s in &steps {
            assert_eq!(parse_cd_script(&s.format(&u), &u).unwrap(), vec![*s]);
        }
    }

    #[test]
    fn missing_operand_reports_index() {
        let u = xyz();
        let start = CdTerms::parse("{Y|X} {Z}", &u).unwrap();
        let steps = parse_cd_script("noop {Z}\ncompose {X} {Y|X}", &u).unwrap();
        let err = verify_cd_proof(&start, &steps, 1, u.parse_set("XY").unwrap()).unwrap_err();
        assert_eq!(err.step, Some(1));
    }

    #[test]
    fn goal_shortfall() {
        let u = xyz();
        let start = CdTerms::parse("2*{X,Y,Z}", &u).unwrap();
        let err = verify_cd_proof(&start, &[], 3, u.full()).unwrap_err();
        assert_eq!(err.step, None);
    }

    #[test]
    fn script_errors() {
        let u = xyz();
        assert!(parse_cd_script("compose {X} {Y|Z}", &u).is_err());
        assert!(parse_cd_script("submod {X|Y} {Z}", &u).is_err());
        assert!(parse_cd_script("frobnicate {X}", &u).is_err());
        assert!(parse_cd_script("noop {X} {Y}", &u).is_err());
        assert!(parse_cd_script("decompose {X|Y} {X}", &u).is_err());
    }
}
