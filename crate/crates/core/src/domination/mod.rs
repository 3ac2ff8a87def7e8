//! Domination `|Q(D)| ≤ |Q'(D)|` for full conjunctive queries where `Q'` is
//! chordal with a simple clique tree, decided by an LP over normal
//! polymatroids.

mod tree;

pub use tree::{canonical_clique_tree, TreeDecomposition};

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::expr::LinExpr;
use crate::lp::{LinearProgram, LpOutcome, Rel, Sense};
use crate::polymatroid::NormalDecomposition;
use crate::query::Query;
use crate::rational::Rational;
use crate::engine::generic_join;
use crate::relation::{Database, Relation, Tuple, Value};
use crate::vars::{check_lp_cap, VarSet};

/// `log2` of the largest witness table built by [`dominates`].
pub const MAX_WITNESS_LOG: u64 = 16;

/// Variable map from `Q'` to `Q`: `map[i]` is the `Q` variable index of the
/// `i`-th head variable of `Q'`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Homomorphism {
    pub map: Vec<usize>,
}

impl Homomorphism {
    pub fn apply(&self, s: VarSet) -> VarSet {
        VarSet::from_indices(s.iter().map(|i| self.map[i]))
    }

    /// `E ∘ φ`: every set in `e` replaced by its image.
    pub fn apply_expr(&self, e: &LinExpr) -> LinExpr {
        let mut out = LinExpr::new();
        for (s, c) in e.terms() {
            out.add_term(self.apply(*s), c.clone());
        }
        out
    }

    pub fn format(&self, qprime: &Query, q: &Query) -> String {
        let parts: Vec<String> =
            self.map.iter().enumerate().map(|(i, &j)| format!("{}->{}", qprime.head[i], q.head[j])).collect();
        parts.join(",")
    }
}

/// All maps sending every atom of `qprime` onto a same-named atom of `q`, in
/// lexicographic order.
pub fn enumerate_homomorphisms(qprime: &Query, q: &Query) -> Vec<Homomorphism> {
    let n = qprime.num_vars();
    let idx = |qq: &Query, a: &crate::query::Atom| -> Vec<usize> {
        a.vars.iter().map(|v| qq.universe().index_of(v).unwrap()).collect()
    };
    let src: Vec<(String, Vec<usize>)> = qprime.atoms.iter().map(|a| (a.relation.clone(), idx(qprime, a))).collect();
    let dst: Vec<(String, Vec<usize>)> = q.atoms.iter().map(|a| (a.relation.clone(), idx(q, a))).collect();
    let mut out = Vec::new();
    let mut map = vec![None; n];
    rec(0, &src, &dst, &mut map, &mut out);
    out.sort();
    out.dedup();
    out
}

fn rec(
    k: usize,
    src: &[(String, Vec<usize>)],
    dst: &[(String, Vec<usize>)],
    map: &mut Vec<Option<usize>>,
    out: &mut Vec<Homomorphism>,
) {
    if k == src.len() {
        out.push(Homomorphism { map: map.iter().map(|m| m.unwrap()).collect() });
        return;
    }
    let (name, vars) = &src[k];
    for (dname, dvars) in dst {
        if dname != name || dvars.len() != vars.len() {
            continue;
        }
        let saved = map.clone();
        let ok = vars.iter().zip(dvars).all(|(&a, &b)| match map[a] {
            Some(x) => x == b,
            None => {
                map[a] = Some(b);
                true
            }
        });
        if ok {
            rec(k + 1, src, dst, map, out);
        }
        *map = saved;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Domination {
    Yes,
    /// A database with `|Q(D)| > |Q'(D)|`, built from a normal polymatroid
    /// violating the max-inequality.
    No { witness: Database, counterexample: NormalDecomposition, q_size: usize, qprime_size: usize },
    Undecided { reason: String },
}

fn check_arities(q: &Query, qprime: &Query) -> Result<()> {
    for (name, k) in qprime.relations() {
        if let Some((_, kq)) = q.relations().into_iter().find(|(n, _)| *n == name) {
            if kq != k {
                return Err(Error::Invalid(format!("relation `{name}` has arity {kq} in Q and {k} in Q'")));
            }
        }
    }
    Ok(())
}

/// Decides `Q ⪯ Q'` when `Q'` is chordal with a simple clique tree `T`. Then
/// `Q ⪯ Q'` iff `h(X) ≤ max_φ E_T ∘ φ` over homomorphisms `φ: Q' → Q` holds
/// for every normal polymatroid. By homogeneity a violation exists iff some
/// `a ≥ 0` has `h(X) - E_T ∘ φ ≥ 1` for all `φ`, with `h = Σ a_V h^V`.
pub fn dominates(q: &Query, qprime: &Query) -> Result<Domination> {
    check_arities(q, qprime)?;
    let Some(t) = canonical_clique_tree(qprime) else {
        return Ok(Domination::Undecided { reason: "Q' is not chordal".into() });
    };
    if !t.is_simple() {
        return Ok(Domination::Undecided { reason: format!("the clique tree of Q' is not simple ({t})") });
    }
    let n = q.num_vars();
    check_lp_cap(n)?;
    let et = t.et_expression();
    let homs = enumerate_homomorphisms(qprime, q);
    let full = q.universe().full();
    let sets: Vec<VarSet> = q.universe().all_sets().skip(1).collect();
    let mut lp = LinearProgram::new(Sense::Min, sets.len());
    lp.objective = vec![Rational::one(); sets.len()];
    let step = |e: &LinExpr, v: VarSet| -> Rational {
        e.terms().filter(|(s, _)| !s.is_disjoint(v)).map(|(_, c)| c.clone()).sum()
    };
    lp.add((0..sets.len()).map(|k| (k, Rational::one())).collect(), Rel::Ge, Rational::one());
    for phi in &homs {
        let gap = LinExpr::h(full).sub(&phi.apply_expr(&et));
        let row = sets.iter().enumerate().map(|(k, v)| (k, step(&gap, *v))).filter(|(_, c)| !c.is_zero()).collect();
        lp.add(row, Rel::Ge, Rational::one());
    }
    let sol = match lp.solve()? {
        LpOutcome::Infeasible(_) => return Ok(Domination::Yes),
        LpOutcome::Optimal(s) => s,
        LpOutcome::Unbounded(_) => unreachable!("a minimum of non-negative costs is bounded"),
    };
    let terms: Vec<(VarSet, Rational)> =
        sets.iter().zip(&sol.x).filter(|(_, a)| !a.is_zero()).map(|(v, a)| (*v, a.clone())).collect();
    let counterexample = NormalDecomposition::from_terms(q.universe(), &terms)?;
    // Integer exponents: b_V = 2^{k a_V} for the common denominator scaled by k.
    let lcm = terms.iter().fold(num_bigint::BigInt::from(1), |l, (_, a)| num_integer::lcm(l, a.denom()));
    let base: Vec<(VarSet, u64)> = terms
        .iter()
        .map(|(v, a)| {
            let e = (a * &Rational::from_bigint(lcm.clone())).numer();
            (*v, u64::try_from(e).unwrap_or(u64::MAX))
        })
        .collect();
    let mut scale = 1u64;
    loop {
        let total: u64 = base.iter().map(|(_, e)| e.saturating_mul(scale)).sum();
        if total > MAX_WITNESS_LOG {
            return Err(Error::ResourceCap(format!("the witness database would exceed 2^{MAX_WITNESS_LOG} tuples")));
        }
        let exps: Vec<(VarSet, u64)> = base.iter().map(|(v, e)| (*v, e * scale)).collect();
        let db = witness_database(q, qprime, &exps)?;
        let q_size = generic_join(q, &db, &q.head)?.0.len();
        let qprime_size = generic_join(qprime, &db, &qprime.head)?.0.len();
        if q_size > qprime_size {
            return Ok(Domination::No { witness: db, counterexample, q_size, qprime_size });
        }
        scale *= 2;
    }
}

/// The database whose `Q`-relations are the projections of the domain
/// product of `T^V_{2^e}`; a relation used by several atoms gets the union
/// of their projections, and relations only in `qprime` are empty. Values
/// are tagged `(variable, value)` so that values of distinct variables
/// never coincide.
pub fn witness_database(q: &Query, qprime: &Query, exps: &[(VarSet, u64)]) -> Result<Database> {
    let head = &q.head;
    let mut table: Option<Relation> = None;
    for (v, e) in exps {
        if *e >= 63 {
            return Err(Error::ResourceCap("witness exponent too large".into()));
        }
        let factor = Relation::basic_normal(head, *v, 1u64 << e)?;
        table = Some(match table {
            Some(t) => t.domain_product(&factor)?,
            None => factor,
        });
    }
    let table = match table {
        Some(t) => t,
        None => Relation::new(head.clone(), vec![vec![Value::Int(0); head.len()]])?,
    };
    let tags: Vec<Value> = head.iter().map(|x| Value::text(x)).collect();
    let mut rows: BTreeMap<String, Vec<Tuple>> = BTreeMap::new();
    let mut arity: BTreeMap<String, usize> = BTreeMap::new();
    for a in &q.atoms {
        let pos: Vec<usize> = a.vars.iter().map(|x| q.universe().index_of(x).unwrap()).collect();
        let entry = rows.entry(a.relation.clone()).or_default();
        entry.extend(
            table.tuples().iter().map(|t| pos.iter().map(|&p| Value::pair(tags[p].clone(), t[p].clone())).collect::<Tuple>()),
        );
        arity.insert(a.relation.clone(), a.vars.len());
    }
    for (name, k) in qprime.relations() {
        arity.entry(name.clone()).or_insert(k);
        rows.entry(name).or_default();
    }
    let mut db = Database::new();
    for (name, tuples) in rows {
        let schema = (0..arity[&name]).map(|i| format!("c{i}")).collect();
        db.insert(&name, Relation::new(schema, tuples)?);
    }
    Ok(db)
}
