use std::collections::HashMap;

use num_traits::ToPrimitive;

use super::ExecStats;
use crate::bounds::agm_bound;
use crate::error::{Error, Result};
use crate::inequality::{find_divergent_proof, BbExpr, DivergentProof, DivergentSearch};
use crate::query::Query;
use crate::rational::Rational;
use crate::relation::{Database, Relation, Tuple};
use crate::setfn::SetFunction;
use crate::vars::VarSet;

/// Finds a divergent proof for `Σ k_j h(Y_j) ≥ k0 h(X)`, the integer scaling
/// of the optimal fractional edge cover for `cards`.
pub fn heavy_light_plan(q: &Query, cards: &[Rational]) -> Result<DivergentProof> {
    let report = agm_bound(q, cards)?;
    if report.is_unbounded() {
        return Err(Error::Invalid("the cardinalities do not bound the output".into()));
    }
    let lcm = report.weights.iter().fold(num_bigint::BigInt::from(1), |l, w| num_integer::lcm(l, w.denom()));
    let scale = Rational::from_bigint(lcm);
    let mut counts = Vec::new();
    for (j, w) in report.weights.iter().enumerate() {
        let k = (w * &scale).numer().to_u32().ok_or_else(|| Error::ResourceCap("cover weights too large".into()))?;
        counts.push((q.atom_set(j), k));
    }
    let k0 = scale.numer().to_u32().ok_or_else(|| Error::ResourceCap("cover weights too large".into()))?;
    let e = BbExpr::from_counts(q.universe(), &counts)?;
    match find_divergent_proof(&e, k0)? {
        DivergentSearch::Found(p) => Ok(p),
        DivergentSearch::NotFound => {
            Err(Error::Invalid(format!("{e} >= {k0} h(X) has no divergent proof; Heavy/Light does not apply")))
        }
    }
}

#[derive(Clone)]
struct Guard {
    set: VarSet,
    rel: Relation,
    /// Atoms every tuple is known to satisfy.
    verified: Vec<bool>,
}

struct Exec<'a> {
    q: &'a Query,
    atoms: Vec<Relation>,
    h_star: SetFunction,
    stats: ExecStats,
}

fn pow2_ceil(r: &Rational) -> u64 {
    match r.ceil().to_i64() {
        Some(k) if k < 0 => 1,
        Some(k) if k < 64 => 1u64 << k,
        _ => u64::MAX,
    }
}

impl Exec<'_> {
    fn names(&self, s: VarSet) -> Vec<String> {
        s.iter().map(|i| self.q.head[i].clone()).collect()
    }

    fn check_guard(&mut self, g: &Guard) {
        if g.rel.len() as u64 > pow2_ceil(self.h_star.get(g.set)) {
            self.stats.guard_excess += 1;
        }
    }

    fn run(&mut self, node: &DivergentProof, mut guards: Vec<Guard>) -> Result<Relation> {
        let full = self.q.universe().full();
        if node.k0 == 0 {
            return Relation::empty(self.q.head.clone());
        }
        let Some(split) = &node.split else {
            let g = guards
                .iter()
                .find(|g| g.set == full)
                .ok_or_else(|| Error::Invalid("divergent proof leaf has no full term".into()))?;
            let mut out = g.rel.clone();
            for (j, atom) in self.atoms.iter().enumerate() {
                if !g.verified[j] {
                    self.stats.tuples_touched += out.len() as u64;
                    out = out.semijoin(atom);
                }
            }
            return Ok(out);
        };
        let (u, v) = (split.step.u, split.step.v);
        let c = u.intersection(v);
        let i = guards.iter().position(|g| g.set == u).ok_or_else(|| missing(u))?;
        let s = guards.remove(i);
        let j = guards.iter().position(|g| g.set == v).ok_or_else(|| missing(v))?;
        let s2 = guards.remove(j);

        // Partition S(U) by degree over the C-values.
        let cpos: Vec<usize> = self.names(c).iter().map(|a| s.rel.position(a)).collect::<Result<_>>()?;
        let mut deg: HashMap<Tuple, u64> = HashMap::new();
        for t in s.rel.tuples() {
            *deg.entry(cpos.iter().map(|&p| t[p].clone()).collect()).or_default() += 1;
        }
        let threshold = if split.with_inter.k0 == 0 {
            u64::MAX
        } else if split.with_union.k0 == 0 {
            0
        } else {
            pow2_ceil(&(self.h_star.get(u) - self.h_star.get(c)))
        };
        let mut light = Vec::new();
        let mut heavy = Vec::new();
        for t in s.rel.tuples() {
            let key: Tuple = cpos.iter().map(|&p| t[p].clone()).collect();
            if deg[&key] > threshold {
                heavy.push(key);
            } else {
                light.push(t.clone());
            }
        }
        self.stats.tuples_touched += (s.rel.len() + s2.rel.len()) as u64;
        let either: Vec<bool> = s.verified.iter().zip(&s2.verified).map(|(a, b)| *a || *b).collect();

        let mut out = Relation::empty(self.q.head.clone())?;
        let mut to_union = Vec::new();
        let mut to_inter = Vec::new();
        let mut needed: Vec<VarSet> = split.with_union.terms.clone();
        if let Some(k) = needed.iter().position(|t| *t == u.union(v)) {
            needed.remove(k);
        }
        for g in guards {
            match needed.iter().position(|t| *t == g.set) {
                Some(k) => {
                    needed.remove(k);
                    to_union.push(g);
                }
                None => to_inter.push(g),
            }
        }
        if split.with_union.k0 > 0 {
            let light = Relation::new(s.rel.schema().to_vec(), light)?;
            let joined = light.natural_join(&s2.rel).project_names(&self.names(u.union(v)))?;
            self.stats.tuples_touched += joined.len() as u64;
            let g = Guard { set: u.union(v), rel: joined, verified: either.clone() };
            self.check_guard(&g);
            to_union.insert(0, g);
            let r = self.run(&split.with_union, to_union)?;
            out = out.union(&r)?;
        }
        if split.with_inter.k0 > 0 {
            let heavy = Relation::new(self.names(c), heavy)?;
            let reduced = heavy.semijoin(&s2.rel);
            self.stats.tuples_touched += reduced.len() as u64;
            let verified =
                either.iter().enumerate().map(|(k, &b)| b && self.q.atom_set(k).is_subset(c)).collect();
            let g = Guard { set: c, rel: reduced, verified };
            self.check_guard(&g);
            to_inter.insert(0, g);
            let r = self.run(&split.with_inter, to_inter)?;
            out = out.union(&r)?;
        }
        Ok(out)
    }
}

fn missing(s: VarSet) -> Error {
    Error::Invalid(format!("divergent proof step uses a term {s:?} with no guard"))
}

/// The Heavy/Light algorithm driven by a divergent proof of the integer
/// edge-cover inequality for `cards`. Each compression `h(AC) + h(BC) →
/// h(ABC) + h(C)` splits the guard of `AC` on `deg(A | C = c)` against
/// `M = 2^{⌈h*(A|C)⌉}`: light tuples join the guard of `BC`, heavy `C`-values
/// are semijoined with it, and the two branches recurse on their halves of
/// the proof. Each branch's result is semijoined with the atoms its guards
/// have not already enforced, and the results are unioned.
pub fn heavy_light(
    q: &Query,
    db: &Database,
    cards: &[Rational],
    proof: &DivergentProof,
) -> Result<(Relation, ExecStats)> {
    db.check_query(q)?;
    let n = q.num_vars();
    if proof.k0 == 0 || !proof.verify(n) {
        return Err(Error::Invalid("not a divergent proof".into()));
    }
    let report = agm_bound(q, cards)?;
    let weights = report.weights;
    let h_star = report.h_star.ok_or_else(|| Error::Invalid("the cardinalities do not bound the output".into()))?;
    let mut atoms = Vec::new();
    for j in 0..q.atoms.len() {
        let names: Vec<String> = q.atom_set(j).iter().map(|i| q.head[i].clone()).collect();
        atoms.push(db.bound_atom(q, j)?.project_names(&names)?);
    }
    // Atoms of the same set are used round-robin, cover atoms first: only
    // those are tight in `h*`.
    let mut uses = vec![0usize; atoms.len()];
    let mut guards = Vec::new();
    for t in &proof.terms {
        let j = (0..atoms.len())
            .filter(|&j| q.atom_set(j) == *t)
            .min_by_key(|&j| (weights[j].is_zero(), uses[j], j))
            .ok_or_else(|| Error::Invalid("proof term is not an atom of the query".into()))?;
        uses[j] += 1;
        let mut verified = vec![false; atoms.len()];
        verified[j] = true;
        guards.push(Guard { set: *t, rel: atoms[j].clone(), verified });
    }
    let mut exec = Exec { q, atoms, h_star, stats: ExecStats::default() };
    let out = exec.run(proof, guards)?;
    exec.stats.tuples_out = out.len() as u64;
    Ok((out, exec.stats))
}
