//! Dense set functions `h : 2^X -> Q`.

use std::fmt;

use crate::error::{Error, Result};
use crate::expr::LinExpr;
use crate::rational::Rational;
use crate::vars::{VarSet, VarUniverse};

/// A set function over a universe, stored as `2^n` exact values indexed by mask.
/// `h(∅)` is stored like any other coordinate.
#[derive(Clone, PartialEq, Eq)]
pub struct SetFunction {
    universe: VarUniverse,
    values: Vec<Rational>,
}

impl SetFunction {
    pub fn zeros(universe: &VarUniverse) -> Self {
        SetFunction { universe: universe.clone(), values: vec![Rational::zero(); universe.size()] }
    }

    pub fn from_fn(universe: &VarUniverse, mut f: impl FnMut(VarSet) -> Rational) -> Self {
        let values = universe.all_sets().map(&mut f).collect();
        SetFunction { universe: universe.clone(), values }
    }

    pub fn from_values(universe: &VarUniverse, values: Vec<Rational>) -> Result<Self> {
        if values.len() != universe.size() {
            return Err(Error::UniverseMismatch(format!(
                "{} values for a universe with {} subsets",
                values.len(),
                universe.size()
            )));
        }
        Ok(SetFunction { universe: universe.clone(), values })
    }

    pub fn universe(&self) -> &VarUniverse {
        &self.universe
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn get(&self, s: VarSet) -> &Rational {
        &self.values[s.index()]
    }

    /// `h(V | U) = h(UV) - h(U)`.
    pub fn cond(&self, v: VarSet, u: VarSet) -> Rational {
        self.get(u.union(v)) - self.get(u)
    }

    /// `I(V;W | U) = h(UV) + h(UW) - h(U) - h(UVW)`.
    pub fn mutual(&self, v: VarSet, w: VarSet, u: VarSet) -> Rational {
        self.get(u.union(v)) + self.get(u.union(w)) - self.get(u) - self.get(u.union(v).union(w))
    }

    pub fn set(&mut self, s: VarSet, v: Rational) {
        self.values[s.index()] = v;
    }

    pub fn with(mut self, s: VarSet, v: Rational) -> Self {
        self.set(s, v);
        self
    }

    pub fn total(&self) -> &Rational {
        self.get(self.universe.full())
    }

    pub fn eval(&self, e: &LinExpr) -> Result<Rational> {
        let mut acc = Rational::zero();
        for (s, c) in e.terms() {
            self.universe.check(*s)?;
            acc += c * self.get(*s);
        }
        Ok(acc)
    }

    fn zip(&self, o: &SetFunction, f: impl Fn(&Rational, &Rational) -> Rational) -> Result<Self> {
        if self.universe != o.universe {
            return Err(Error::UniverseMismatch("set functions over different universes".into()));
        }
        let values = self.values.iter().zip(&o.values).map(|(a, b)| f(a, b)).collect();
        Ok(SetFunction { universe: self.universe.clone(), values })
    }

    pub fn add(&self, o: &SetFunction) -> Result<Self> {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &SetFunction) -> Result<Self> {
        self.zip(o, |a, b| a - b)
    }

    pub fn scale(&self, k: &Rational) -> Self {
        SetFunction {
            universe: self.universe.clone(),
            values: self.values.iter().map(|v| v * k).collect(),
        }
    }

    /// Pointwise `self <= o`.
    pub fn le(&self, o: &SetFunction) -> bool {
        self.universe == o.universe && self.values.iter().zip(&o.values).all(|(a, b)| a <= b)
    }

    /// Parses the line format `U : value`, with `{}` for the empty set, an
    /// optional `vars: X,Y,...` header and an optional `default: v` directive.
    /// Without `default:` every subset must be listed. `#` starts a comment.
    pub fn parse(text: &str, universe: Option<&VarUniverse>) -> Result<Self> {
        let mut universe = universe.cloned();
        let mut default: Option<Rational> = None;
        let mut entries: Vec<(String, Rational, usize)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, val) = line
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("line {}: expected `set : value`", lineno + 1)))?;
            let key = key.trim();
            let val = val.trim();
            match key {
                "vars" => {
                    let names: Vec<&str> =
                        val.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
                    let u = VarUniverse::new(&names)?;
                    if let Some(given) = &universe {
                        if *given != u {
                            return Err(Error::UniverseMismatch(format!(
                                "file declares vars {val}, expected {}",
                                given.names().join(",")
                            )));
                        }
                    }
                    universe = Some(u);
                }
                "default" => default = Some(val.parse()?),
                _ => entries.push((key.to_string(), val.parse()?, lineno + 1)),
            }
        }
        let universe =
            universe.ok_or_else(|| Error::Parse("no universe: add a `vars:` line".into()))?;
        let mut values: Vec<Option<Rational>> = vec![None; universe.size()];
        for (key, v, lineno) in entries {
            let s = universe
                .parse_set(&key)
                .map_err(|e| Error::Parse(format!("line {lineno}: {e}")))?;
            if values[s.index()].is_some() {
                return Err(Error::Parse(format!("line {lineno}: set `{key}` listed twice")));
            }
            values[s.index()] = Some(v);
        }
        let mut out = Vec::with_capacity(values.len());
        for (i, v) in values.into_iter().enumerate() {
            match (v, &default) {
                (Some(v), _) => out.push(v),
                (None, Some(d)) => out.push(d.clone()),
                (None, None) => {
                    return Err(Error::Parse(format!(
                        "missing value for {} and no `default:` given",
                        universe.fmt_set(VarSet(i as u32))
                    )))
                }
            }
        }
        Ok(SetFunction { universe, values: out })
    }

    /// Text form accepted by [`SetFunction::parse`], listing every subset.
    pub fn to_text(&self) -> String {
        let mut s = format!("vars: {}\n", self.universe.names().join(","));
        for set in self.universe.all_sets() {
            s.push_str(&format!("{} : {}\n", self.universe.fmt_set(set), self.get(set)));
        }
        s
    }
}

impl fmt::Debug for SetFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for s in self.universe.all_sets() {
            m.entry(&self.universe.fmt_compact(s), self.get(s));
        }
        m.finish()
    }
}
