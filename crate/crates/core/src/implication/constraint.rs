use std::fmt;

use crate::error::{Error, Result};
use crate::expr::{expand_conditional, expand_mutual_info, LinExpr};
use crate::polymatroid::Fd;
use crate::relation::{Relation, Value};
use crate::vars::{VarSet, VarUniverse};

/// An FD `U → V` or an MVD `U ↠ V | W` with `U ∪ V ∪ W` the universe.
/// Constructors normalize: `V ← V - U` and, for MVDs, `W = X - U - V`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Constraint {
    Fd { u: VarSet, v: VarSet },
    Mvd { u: VarSet, v: VarSet, w: VarSet },
}

impl Constraint {
    pub fn fd(u: VarSet, v: VarSet) -> Self {
        Constraint::Fd { u, v: v.difference(u) }
    }

    pub fn mvd(universe: &VarUniverse, u: VarSet, v: VarSet) -> Self {
        let v = v.difference(u);
        Constraint::Mvd { u, v, w: universe.full().difference(u).difference(v) }
    }

    pub fn is_fd(&self) -> bool {
        matches!(self, Constraint::Fd { .. })
    }

    /// `h(V|U)` for an FD, `I(V;W|U)` for an MVD; zero exactly when the
    /// constraint holds in a uniform distribution on a relation.
    pub fn measure(&self, universe: &VarUniverse) -> LinExpr {
        match *self {
            Constraint::Fd { u, v } => expand_conditional(universe, u, v).expect("constraint sets lie in the universe"),
            Constraint::Mvd { u, v, w } => {
                expand_mutual_info(universe, v, w, u).expect("constraint sets lie in the universe")
            }
        }
    }

    /// Whether the relation (schema in universe order) satisfies it.
    pub fn holds_in(&self, r: &Relation) -> Result<bool> {
        match *self {
            Constraint::Fd { u, v } => r.satisfies_fd(u, v),
            Constraint::Mvd { u, v, w } => r.satisfies_mvd(u, v, w),
        }
    }

    /// `fd A,B -> C` or `mvd A ->> B | C,D`; the `| W` part of an MVD may be
    /// omitted and must otherwise complete the universe.
    pub fn parse(text: &str, universe: &VarUniverse) -> Result<Self> {
        let raw = RawConstraint::parse(text)?;
        raw.build(universe)
    }

    pub fn format(&self, universe: &VarUniverse) -> String {
        let names = |s: VarSet| s.iter().map(|i| universe.name(i).to_string()).collect::<Vec<_>>().join(",");
        match *self {
            Constraint::Fd { u, v } => format!("fd {} -> {}", names(u), names(v)),
            Constraint::Mvd { u, v, w } => format!("mvd {} ->> {} | {}", names(u), names(v), names(w)),
        }
    }
}

pub(crate) struct RawConstraint {
    mvd: bool,
    parts: Vec<Vec<String>>,
}

fn names(s: &str) -> Vec<String> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty()).map(String::from).collect()
}

impl RawConstraint {
    pub(crate) fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        let bad = || Error::Parse(format!("expected `fd U -> V` or `mvd U ->> V | W`, got `{t}`"));
        if let Some(rest) = t.strip_prefix("mvd ") {
            let (u, rest) = rest.split_once("->>").ok_or_else(bad)?;
            let (v, w) = match rest.split_once('|') {
                Some((v, w)) => (v, Some(w)),
                None => (rest, None),
            };
            let mut parts = vec![names(u), names(v)];
            if let Some(w) = w {
                parts.push(names(w));
            }
            Ok(RawConstraint { mvd: true, parts })
        } else if let Some(rest) = t.strip_prefix("fd ") {
            let (u, v) = rest.split_once("->").ok_or_else(bad)?;
            Ok(RawConstraint { mvd: false, parts: vec![names(u), names(v)] })
        } else {
            Err(bad())
        }
    }

    pub(crate) fn names(&self) -> impl Iterator<Item = &String> {
        self.parts.iter().flatten()
    }

    pub(crate) fn build(&self, universe: &VarUniverse) -> Result<Constraint> {
        let sets: Vec<VarSet> = self.parts.iter().map(|p| universe.set(p)).collect::<Result<_>>()?;
        if !self.mvd {
            return Ok(Constraint::fd(sets[0], sets[1]));
        }
        let c = Constraint::mvd(universe, sets[0], sets[1]);
        if let (Some(w), Constraint::Mvd { u, v, .. }) = (sets.get(2), c) {
            if u.union(v).union(*w) != universe.full() {
                return Err(Error::Invalid("an MVD's three parts must cover every variable".into()));
            }
        }
        Ok(c)
    }
}

/// Premises, one per line, with `#` comments and an optional `vars A,B,...`
/// line fixing the universe order. Without it variables are ordered by first
/// appearance, including those of `extra` (for example a conclusion).
pub fn parse_constraints(text: &str, extra: &[&str]) -> Result<(VarUniverse, Vec<Constraint>, Vec<Constraint>)> {
    let mut declared: Option<Vec<String>> = None;
    let mut raws = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("vars ") {
            declared = Some(names(rest));
            continue;
        }
        raws.push(RawConstraint::parse(line)?);
    }
    let extras = extra.iter().map(|e| RawConstraint::parse(e)).collect::<Result<Vec<_>>>()?;
    let universe = match declared {
        Some(d) => VarUniverse::new(&d)?,
        None => {
            let mut order: Vec<String> = Vec::new();
            for n in raws.iter().chain(&extras).flat_map(|r| r.names()) {
                if !order.contains(n) {
                    order.push(n.clone());
                }
            }
            VarUniverse::new(&order)?
        }
    };
    let premises = raws.iter().map(|r| r.build(&universe)).collect::<Result<_>>()?;
    let others = extras.iter().map(|r| r.build(&universe)).collect::<Result<_>>()?;
    Ok((universe, premises, others))
}

impl From<Fd> for Constraint {
    fn from(f: Fd) -> Self {
        Constraint::fd(f.lhs, f.rhs)
    }
}

/// The two-tuple relation `R_W`: both tuples are 0 on `W`; off `W` one is 0
/// and the other 1. Its uniform entropy is the step function `h_W`.
pub fn two_tuple_relation(universe: &VarUniverse, w: VarSet) -> Relation {
    let n = universe.len();
    let t0 = vec![Value::Int(0); n];
    let t1 = (0..n).map(|i| Value::Int(if w.contains(i) { 0 } else { 1 })).collect();
    Relation::new(universe.names().to_vec(), vec![t0, t1]).expect("universe names are distinct")
}

pub struct Constraints<'a>(pub &'a VarUniverse, pub &'a [Constraint]);

impl fmt::Display for Constraints<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in self.1 {
            writeln!(f, "{}", c.format(self.0))?;
        }
        Ok(())
    }
}
