//! Full conjunctive queries: `Q(X,Y,Z) :- R(X,Y), S(Y,Z), T(Z,X).`

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::vars::{VarSet, VarUniverse};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub relation: String,
    pub vars: Vec<String>,
}

/// A full conjunctive query. The universe is the head variable list, in order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    pub name: String,
    pub head: Vec<String>,
    pub atoms: Vec<Atom>,
    universe: VarUniverse,
    atom_sets: Vec<VarSet>,
}

fn is_ident(s: &str) -> bool {
    let mut c = s.chars();
    matches!(c.next(), Some(ch) if ch.is_alphabetic() || ch == '_')
        && s.chars().all(|ch| ch.is_alphanumeric() || ch == '_' || ch == '\'')
}

fn is_var(s: &str) -> bool {
    is_ident(s) && s.chars().next().is_some_and(|c| c.is_uppercase())
}

impl Query {
    pub fn new(name: &str, head: Vec<String>, atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Parse("query has no body atoms".into()));
        }
        for v in head.iter().chain(atoms.iter().flat_map(|a| a.vars.iter())) {
            if !is_var(v) {
                return Err(Error::Parse(format!("`{v}` is not a variable (must be capitalized)")));
            }
        }
        for a in &atoms {
            if !is_ident(&a.relation) {
                return Err(Error::Parse(format!("invalid relation name `{}`", a.relation)));
            }
            if a.vars.is_empty() {
                return Err(Error::Parse(format!("atom `{}` has no variables", a.relation)));
            }
        }
        let universe = VarUniverse::new(&head)?;
        let body: BTreeSet<&String> = atoms.iter().flat_map(|a| a.vars.iter()).collect();
        let headset: BTreeSet<&String> = head.iter().collect();
        if body != headset {
            return Err(Error::Parse(
                "not a full conjunctive query: head and body variables differ".into(),
            ));
        }
        let mut arity = std::collections::HashMap::new();
        for a in &atoms {
            if let Some(k) = arity.insert(a.relation.as_str(), a.vars.len()) {
                if k != a.vars.len() {
                    return Err(Error::Parse(format!("relation `{}` used with two arities", a.relation)));
                }
            }
        }
        let atom_sets = atoms.iter().map(|a| universe.set(&a.vars)).collect::<Result<_>>()?;
        Ok(Query { name: name.to_string(), head, atoms, universe, atom_sets })
    }

    /// Parses `Q(X,Y) :- R(X,Y), S(Y).` The trailing period is optional and
    /// `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let clean: String = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or(""))
            .collect::<Vec<_>>()
            .join(" ");
        let clean = clean.trim();
        let clean = clean.strip_suffix('.').unwrap_or(clean);
        let (head, body) = clean
            .split_once(":-")
            .ok_or_else(|| Error::Parse("expected `Head :- Body`".into()))?;
        let head = parse_atom(head.trim())?;
        let mut atoms = Vec::new();
        let mut rest = body.trim();
        while !rest.is_empty() {
            let close = rest.find(')').ok_or_else(|| Error::Parse(format!("unclosed atom in `{rest}`")))?;
            atoms.push(parse_atom(rest[..=close].trim())?);
            rest = rest[close + 1..].trim_start();
            if let Some(r) = rest.strip_prefix(',') {
                rest = r.trim_start();
                if rest.is_empty() {
                    return Err(Error::Parse("trailing comma".into()));
                }
            } else if !rest.is_empty() {
                return Err(Error::Parse(format!("expected `,` before `{rest}`")));
            }
        }
        Query::new(&head.relation, head.vars, atoms)
    }

    pub fn universe(&self) -> &VarUniverse {
        &self.universe
    }

    pub fn num_vars(&self) -> usize {
        self.head.len()
    }

    pub fn atom_set(&self, j: usize) -> VarSet {
        self.atom_sets[j]
    }

    pub fn atom_sets(&self) -> &[VarSet] {
        &self.atom_sets
    }

    /// Index of the first atom over relation `name`.
    pub fn atom_index(&self, name: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a.relation == name)
    }

    /// Distinct relation names with their arities, in first-use order.
    pub fn relations(&self) -> Vec<(String, usize)> {
        let mut out: Vec<(String, usize)> = Vec::new();
        for a in &self.atoms {
            if !out.iter().any(|(n, _)| *n == a.relation) {
                out.push((a.relation.clone(), a.vars.len()));
            }
        }
        out
    }

    pub fn has_self_joins(&self) -> bool {
        self.relations().len() < self.atoms.len()
    }
}

fn parse_atom(s: &str) -> Result<Atom> {
    let open = s.find('(').ok_or_else(|| Error::Parse(format!("expected `Name(...)`, got `{s}`")))?;
    let inner = s[open + 1..]
        .strip_suffix(')')
        .ok_or_else(|| Error::Parse(format!("expected `)` at the end of `{s}`")))?;
    let vars: Vec<String> = inner.split(',').map(|v| v.trim().to_string()).collect();
    if vars.iter().any(|v| v.is_empty()) {
        return Err(Error::Parse(format!("empty argument in `{s}`")));
    }
    Ok(Atom { relation: s[..open].trim().to_string(), vars })
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({}) :- ", self.name, self.head.join(","))?;
        let body: Vec<String> =
            self.atoms.iter().map(|a| format!("{}({})", a.relation, a.vars.join(","))).collect();
        write!(f, "{}.", body.join(", "))
    }
}
