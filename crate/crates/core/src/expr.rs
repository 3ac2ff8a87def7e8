//! Linear expressions over entropy coordinates and information measures.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::vars::{VarSet, VarUniverse};

/// `Σ c_S h(S)`, stored sparsely. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Default, Debug, Hash)]
pub struct LinExpr {
    terms: BTreeMap<VarSet, Rational>,
}

impl LinExpr {
    pub fn new() -> Self {
        Self::default()
    }

    /// The single term `h(S)`.
    pub fn h(s: VarSet) -> Self {
        let mut e = Self::new();
        e.add_term(s, Rational::one());
        e
    }

    pub fn terms(&self) -> impl Iterator<Item = (&VarSet, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, s: VarSet) -> Rational {
        self.terms.get(&s).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Union of all sets mentioned.
    pub fn support(&self) -> VarSet {
        self.terms.keys().fold(VarSet::EMPTY, |a, s| a.union(*s))
    }

    pub fn add_term(&mut self, s: VarSet, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(s).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&s);
        }
    }

    pub fn add(&self, o: &LinExpr) -> LinExpr {
        let mut r = self.clone();
        for (s, c) in &o.terms {
            r.add_term(*s, c.clone());
        }
        r
    }

    pub fn sub(&self, o: &LinExpr) -> LinExpr {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> LinExpr {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, k: &Rational) -> LinExpr {
        if k.is_zero() {
            return LinExpr::new();
        }
        LinExpr { terms: self.terms.iter().map(|(s, c)| (*s, c * k)).collect() }
    }

    pub fn add_scaled(&mut self, o: &LinExpr, k: &Rational) {
        for (s, c) in &o.terms {
            self.add_term(*s, c * k);
        }
    }

    /// Drops the `h(∅)` term, which vanishes on every polymatroid.
    pub fn without_empty(&self) -> LinExpr {
        let mut r = self.clone();
        r.terms.remove(&VarSet::EMPTY);
        r
    }

    pub fn check_universe(&self, u: &VarUniverse) -> Result<()> {
        u.check(self.support())
    }

    /// Renders as `+2 h(X,Y) -1 h(Y)`; the zero expression renders as `0`.
    pub fn format(&self, u: &VarUniverse) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut keys: Vec<&VarSet> = self.terms.keys().collect();
        keys.sort_by_key(|s| (s.len(), s.0));
        keys.iter()
            .map(|s| {
                let c = &self.terms[s];
                let sign = if c.is_negative() { "-" } else { "+" };
                let set = if s.is_empty() { String::new() } else { u.fmt_set(**s) };
                format!("{sign}{} h({set})", c.abs())
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Parses a sum of signed, optionally weighted terms `h(V)`, `h(V|U)` and
    /// `I(V;W|U)`, e.g. `+2 h(X,Y) -1 h(Y) +1 I(X;Y|A) +1 h(Z|X,Y)`.
    pub fn parse(text: &str, u: &VarUniverse) -> Result<LinExpr> {
        let mut p = ExprParser { s: text.as_bytes(), pos: 0, text };
        let mut out = LinExpr::new();
        p.skip_ws();
        if p.rest().trim() == "0" {
            return Ok(out);
        }
        let mut first = true;
        while !p.at_end() {
            let (coef, term) = p.term(u, first)?;
            out.add_scaled(&term, &coef);
            first = false;
            p.skip_ws();
        }
        if first {
            return Err(Error::Parse("empty expression".into()));
        }
        Ok(out)
    }
}

struct ExprParser<'a> {
    s: &'a [u8],
    pos: usize,
    text: &'a str,
}

impl<'a> ExprParser<'a> {
    fn at_end(&self) -> bool {
        self.pos >= self.s.len()
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn skip_ws(&mut self) {
        while !self.at_end() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {} in `{}`", self.pos, self.text.trim()))
    }

    fn term(&mut self, u: &VarUniverse, first: bool) -> Result<(Rational, LinExpr)> {
        self.skip_ws();
        let mut sign = Rational::one();
        match self.s.get(self.pos) {
            Some(b'+') => self.pos += 1,
            Some(b'-') => {
                sign = -sign;
                self.pos += 1
            }
            _ if !first => return Err(self.err("expected `+` or `-`")),
            _ => {}
        }
        self.skip_ws();
        let start = self.pos;
        while !self.at_end() && (self.s[self.pos].is_ascii_digit() || b"./".contains(&self.s[self.pos])) {
            self.pos += 1;
        }
        let coef: Rational = if self.pos > start {
            self.text[start..self.pos].parse()?
        } else {
            Rational::one()
        };
        self.skip_ws();
        if self.s.get(self.pos) == Some(&b'*') {
            self.pos += 1;
            self.skip_ws();
        }
        let kind = *self.s.get(self.pos).ok_or_else(|| self.err("expected a term"))?;
        self.pos += 1;
        if self.s.get(self.pos) != Some(&b'(') {
            return Err(self.err("expected `(`"));
        }
        let close = self.rest().find(')').ok_or_else(|| self.err("missing `)`"))?;
        let inner = &self.text[self.pos + 1..self.pos + close];
        self.pos += close + 1;
        let (body, cond) = match inner.split_once('|') {
            Some((b, c)) => (b, Some(u.parse_set(c)?)),
            None => (inner, None),
        };
        let term = match kind {
            b'h' | b'H' => match cond {
                Some(c) => expand_conditional(u, c, u.parse_set(body)?)?,
                None => LinExpr::h(u.parse_set(body)?),
            },
            b'I' => {
                let (v, w) = body.split_once(';').ok_or_else(|| self.err("expected `I(V;W|U)`"))?;
                expand_mutual_info(u, u.parse_set(v)?, u.parse_set(w)?, cond.unwrap_or_default())?
            }
            _ => return Err(self.err("unknown term kind")),
        };
        Ok((sign * coef, term))
    }
}

/// `h(V | U) = h(UV) - h(U)`.
pub fn expand_conditional(u: &VarUniverse, cond: VarSet, v: VarSet) -> Result<LinExpr> {
    u.check(cond)?;
    u.check(v)?;
    let mut e = LinExpr::h(cond.union(v));
    e.add_term(cond, -Rational::one());
    Ok(e)
}

/// `I(V;W | U) = h(UV) + h(UW) - h(U) - h(UVW)`. `V` and `W` are taken
/// relative to `U` and must be disjoint after removing `U`.
pub fn expand_mutual_info(u: &VarUniverse, v: VarSet, w: VarSet, cond: VarSet) -> Result<LinExpr> {
    u.check(v)?;
    u.check(w)?;
    u.check(cond)?;
    let v = v.difference(cond);
    let w = w.difference(cond);
    if !v.is_disjoint(w) {
        return Err(Error::Invalid(format!(
            "I({};{}|{}) has overlapping arguments",
            u.fmt_set(v),
            u.fmt_set(w),
            u.fmt_set(cond)
        )));
    }
    let mut e = LinExpr::new();
    e.add_term(cond.union(v), Rational::one());
    e.add_term(cond.union(w), Rational::one());
    e.add_term(cond, -Rational::one());
    e.add_term(cond.union(v).union(w), -Rational::one());
    Ok(e)
}

/// Exact equality of two expressions after expansion.
pub fn check_identity(u: &VarUniverse, lhs: &LinExpr, rhs: &LinExpr) -> Result<bool> {
    lhs.check_universe(u)?;
    rhs.check_universe(u)?;
    Ok(lhs == rhs)
}

/// An elemental mutual information `I(X_i; X_j | K)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elemental {
    pub i: usize,
    pub j: usize,
    pub cond: VarSet,
}

impl Elemental {
    pub fn expr(&self) -> LinExpr {
        let mut e = LinExpr::new();
        let k = self.cond;
        e.add_term(k.insert(self.i), Rational::one());
        e.add_term(k.insert(self.j), Rational::one());
        e.add_term(k, -Rational::one());
        e.add_term(k.insert(self.i).insert(self.j), -Rational::one());
        e
    }
}

/// Chain-rule decomposition of `I(V;W|U)` into elemental terms, iterating the
/// members of `V` and `W` in universe order.
pub fn elemental_decomposition(
    u: &VarUniverse,
    v: VarSet,
    w: VarSet,
    cond: VarSet,
) -> Result<Vec<Elemental>> {
    // Validates the arguments.
    expand_mutual_info(u, v, w, cond)?;
    let v = v.difference(cond);
    let w = w.difference(cond);
    let mut out = Vec::new();
    let mut before_v = VarSet::EMPTY;
    for i in v.iter() {
        let mut before_w = VarSet::EMPTY;
        for j in w.iter() {
            out.push(Elemental { i, j, cond: cond.union(before_v).union(before_w) });
            before_w = before_w.insert(j);
        }
        before_v = before_v.insert(i);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn u() -> VarUniverse {
        VarUniverse::new(&["X", "Y", "Z", "A"]).unwrap()
    }

    #[test]
    fn conditional_expansion() {
        let u = u();
        let e = expand_conditional(&u, u.parse_set("X").unwrap(), u.parse_set("Y").unwrap()).unwrap();
        assert_eq!(e.format(&u), "-1 h(X) +1 h(X,Y)");
        let e = expand_conditional(&u, VarSet::EMPTY, u.parse_set("X").unwrap()).unwrap();
        assert_eq!(e.coeff(VarSet::EMPTY), int(-1));
        let e = expand_conditional(&u, u.parse_set("X,Y").unwrap(), u.parse_set("X").unwrap()).unwrap();
        assert!(e.is_zero());
    }

    #[test]
    fn mutual_info_rejects_overlap() {
        let u = u();
        let x = u.parse_set("X").unwrap();
        let xy = u.parse_set("X,Y").unwrap();
        assert!(expand_mutual_info(&u, xy, x, VarSet::EMPTY).is_err());
        // Overlap inside the conditioning set is fine.
        assert!(expand_mutual_info(&u, xy, x.union(u.parse_set("Z").unwrap()), x).is_ok());
    }

    #[test]
    fn elemental_chain_rule() {
        let u = u();
        let xy = u.parse_set("X,Y").unwrap();
        let z = u.parse_set("Z").unwrap();
        let d = elemental_decomposition(&u, xy, z, VarSet::EMPTY).unwrap();
        assert_eq!(d, vec![Elemental { i: 0, j: 2, cond: VarSet::EMPTY }, Elemental { i: 1, j: 2, cond: VarSet(1) }]);
        let sum = d.iter().fold(LinExpr::new(), |a, e| a.add(&e.expr()));
        assert!(check_identity(&u, &sum, &expand_mutual_info(&u, xy, z, VarSet::EMPTY).unwrap()).unwrap());
    }

    #[test]
    fn parse_mixed_terms() {
        let u = u();
        let e = LinExpr::parse("+2 h(X,Y) -1 h(Y) +1 I(X;Y|A) +1 h(Z|X,Y)", &u).unwrap();
        let mut want = LinExpr::new();
        let s = |t: &str| u.parse_set(t).unwrap();
        want.add_term(s("X,Y"), int(2));
        want.add_term(s("Y"), int(-1));
        want = want.add(&expand_mutual_info(&u, s("X"), s("Y"), s("A")).unwrap());
        want = want.add(&expand_conditional(&u, s("X,Y"), s("Z")).unwrap());
        assert_eq!(e, want);
        let again = LinExpr::parse(&e.format(&u), &u).unwrap();
        assert_eq!(again, e);
        assert!(LinExpr::parse("0", &u).unwrap().is_zero());
        assert!(LinExpr::parse("h(X) h(Y)", &u).is_err());
        assert!(LinExpr::parse("h(W)", &u).is_err());
        assert_eq!(LinExpr::parse("h(X) - 1/2 h()", &u).unwrap().coeff(VarSet::EMPTY), crate::rational::rat(-1, 2));
    }
}
