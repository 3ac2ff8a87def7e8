use std::collections::HashMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::expr::LinExpr;
use crate::vars::{VarSet, VarUniverse};

/// Largest multiset accepted by [`find_divergent_proof`].
pub const MAX_DIVERGENT_TERMS: usize = 12;

/// A multiset of terms `h(Z)`, kept as an ordered list with repeats.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BbExpr {
    universe: VarUniverse,
    terms: Vec<VarSet>,
}

impl BbExpr {
    pub fn new(universe: &VarUniverse, terms: Vec<VarSet>) -> Result<Self> {
        for t in &terms {
            universe.check(*t)?;
        }
        Ok(BbExpr { universe: universe.clone(), terms })
    }

    pub fn from_counts(universe: &VarUniverse, counts: &[(VarSet, u32)]) -> Result<Self> {
        let terms = counts.iter().flat_map(|(s, k)| std::iter::repeat(*s).take(*k as usize)).collect();
        Self::new(universe, terms)
    }

    /// Whitespace-separated sets, e.g. `XY YZ ZX` or `{X,Y} {Y,Z}`.
    pub fn parse(text: &str, universe: &VarUniverse) -> Result<Self> {
        let terms = text.split_whitespace().map(|t| universe.parse_set(t)).collect::<Result<_>>()?;
        Self::new(universe, terms)
    }

    /// Positive-integer combination `Σ k_j h(Y_j)`; terms are expanded in set order.
    pub fn from_expr(universe: &VarUniverse, e: &LinExpr) -> Result<Self> {
        let mut terms = Vec::new();
        for (s, k) in e.terms() {
            if !k.is_integer() || k.is_negative() {
                return Err(Error::Invalid(format!("coefficient {k} is not a non-negative integer")));
            }
            let k = k.numer().try_into().map_err(|_| Error::Invalid("coefficient too large".into()))?;
            terms.extend(std::iter::repeat(*s).take(k));
        }
        Self::new(universe, terms)
    }

    pub fn universe(&self) -> &VarUniverse {
        &self.universe
    }

    pub fn terms(&self) -> &[VarSet] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn to_expr(&self) -> LinExpr {
        let mut e = LinExpr::new();
        for t in &self.terms {
            e.add_term(*t, crate::rational::Rational::one());
        }
        e
    }

    /// Number of terms containing variable `i`.
    pub fn cover(&self, i: usize) -> u32 {
        cover(&self.terms, i)
    }

    /// `min_i cover(i)` over the universe.
    pub fn min_cover(&self) -> u32 {
        min_cover(&self.terms, self.universe.len())
    }

    pub fn is_chain(&self) -> bool {
        is_chain(&self.terms)
    }

    /// `Σ |Z|²`, strictly increased by every compression step.
    pub fn potential(&self) -> u64 {
        self.terms.iter().map(|t| (t.len() * t.len()) as u64).sum()
    }

    /// `(Z_k, ℓ_k)` ordered by decreasing set, merging equal sets. Only a
    /// chain when [`BbExpr::is_chain`] holds.
    pub fn chain_form(&self) -> Vec<(VarSet, u32)> {
        let mut sorted = self.terms.clone();
        sorted.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
        let mut out: Vec<(VarSet, u32)> = Vec::new();
        for t in sorted {
            match out.last_mut() {
                Some((s, k)) if *s == t => *k += 1,
                _ => out.push((t, 1)),
            }
        }
        out
    }

    /// Applies `h(U) + h(V) -> h(U ∪ V) + h(U ∩ V)` in place: the slot of `U`
    /// receives the union and the slot of `V` the intersection.
    pub fn apply(&mut self, step: BbStep) -> Result<()> {
        if step.u.comparable(step.v) {
            return Err(Error::Invalid("compression needs incomparable sets".into()));
        }
        let i = self.terms.iter().position(|t| *t == step.u);
        let j = self.terms.iter().position(|t| *t == step.v);
        let (Some(i), Some(j)) = (i, j) else {
            return Err(Error::Invalid(format!("{} is missing an operand", step.format(&self.universe))));
        };
        self.terms[i] = step.u.union(step.v);
        self.terms[j] = step.u.intersection(step.v);
        Ok(())
    }
}

impl fmt::Display for BbExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|t| format!("h({})", self.universe.fmt_compact(*t))).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn cover(terms: &[VarSet], i: usize) -> u32 {
    terms.iter().filter(|t| t.contains(i)).count() as u32
}

fn min_cover(terms: &[VarSet], n: usize) -> u32 {
    (0..n).map(|i| cover(terms, i)).min().unwrap_or(u32::MAX)
}

fn is_chain(terms: &[VarSet]) -> bool {
    terms.iter().enumerate().all(|(i, a)| terms[i + 1..].iter().all(|b| a.comparable(*b)))
}

/// One compression step `h(U) + h(V) -> h(U ∪ V) + h(U ∩ V)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BbStep {
    pub u: VarSet,
    pub v: VarSet,
}

impl BbStep {
    pub fn format(&self, u: &VarUniverse) -> String {
        format!(
            "h({}) + h({}) -> h({}) + h({})",
            u.fmt_compact(self.u),
            u.fmt_compact(self.v),
            u.fmt_compact(self.u.union(self.v)),
            u.fmt_compact(self.u.intersection(self.v))
        )
    }
}

/// Which incomparable pair to compress next.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BbStrategy {
    /// First incomparable pair `(i, j)`, `i < j`, in term order.
    #[default]
    FirstPair,
    /// Uniformly random incomparable pair from a seeded generator.
    Seeded(u64),
}

/// Compresses until the expression is a chain, returning it with the trace.
pub fn bb_compress(e: &BbExpr, strategy: BbStrategy) -> (BbExpr, Vec<BbStep>) {
    let mut cur = e.clone();
    let mut trace = Vec::new();
    let mut rng = match strategy {
        BbStrategy::Seeded(s) => Some(ChaCha8Rng::seed_from_u64(s)),
        BbStrategy::FirstPair => None,
    };
    loop {
        let t = &cur.terms;
        let mut pairs = (0..t.len()).flat_map(|i| (i + 1..t.len()).map(move |j| (i, j)));
        let pick = match rng.as_mut() {
            None => pairs.find(|&(i, j)| !t[i].comparable(t[j])),
            Some(r) => {
                let all: Vec<_> = pairs.filter(|&(i, j)| !t[i].comparable(t[j])).collect();
                (!all.is_empty()).then(|| all[r.gen_range(0..all.len())])
            }
        };
        let Some((i, j)) = pick else {
            return (cur, trace);
        };
        let step = BbStep { u: t[i], v: t[j] };
        cur.terms[i] = step.u.union(step.v);
        cur.terms[j] = step.u.intersection(step.v);
        trace.push(step);
    }
}

/// A divergent BB-proof of `E ≥ k0 h(X)`: either a leaf (a chain, or
/// `k0 = 0`) or a compression followed by a split into two sub-proofs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivergentProof {
    pub terms: Vec<VarSet>,
    pub k0: u32,
    pub split: Option<Split>,
}

/// After compressing `step` the terms are partitioned: `with_union` holds
/// `h(U ∪ V)` and proves `k0'`, `with_inter` holds `h(U ∩ V)` and proves
/// `k0''`, with `k0' + k0'' = k0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    pub step: BbStep,
    pub with_union: Box<DivergentProof>,
    pub with_inter: Box<DivergentProof>,
}

impl DivergentProof {
    pub fn num_steps(&self) -> usize {
        self.split.as_ref().map_or(0, |s| 1 + s.with_union.num_steps() + s.with_inter.num_steps())
    }

    /// Re-checks every node: cover counts, step applicability, the partition
    /// and the leaf conditions.
    pub fn verify(&self, n: usize) -> bool {
        if min_cover(&self.terms, n) < self.k0 {
            return false;
        }
        let Some(s) = &self.split else {
            return self.k0 == 0 || is_chain(&self.terms);
        };
        if s.step.u.comparable(s.step.v) || s.with_union.k0 + s.with_inter.k0 != self.k0 {
            return false;
        }
        let mut after = self.terms.clone();
        for (old, new) in [(s.step.u, s.step.u.union(s.step.v)), (s.step.v, s.step.u.intersection(s.step.v))] {
            match after.iter().position(|t| *t == old) {
                Some(i) => after[i] = new,
                None => return false,
            }
        }
        let mut parts: Vec<VarSet> = s.with_union.terms.iter().chain(&s.with_inter.terms).copied().collect();
        parts.sort();
        after.sort();
        parts == after
            && s.with_union.terms.contains(&s.step.u.union(s.step.v))
            && s.with_inter.terms.contains(&s.step.u.intersection(s.step.v))
            && s.with_union.verify(n)
            && s.with_inter.verify(n)
    }

    pub fn format(&self, u: &VarUniverse) -> String {
        let mut out = String::new();
        self.write(u, 0, &mut out);
        out
    }

    fn write(&self, u: &VarUniverse, depth: usize, out: &mut String) {
        let pad = "  ".repeat(depth);
        let expr = BbExpr { universe: u.clone(), terms: self.terms.clone() };
        out.push_str(&format!("{pad}{expr} >= {} h({})\n", self.k0, u.fmt_compact(u.full())));
        if let Some(s) = &self.split {
            out.push_str(&format!("{pad}compress {}\n", s.step.format(u)));
            s.with_union.write(u, depth + 1, out);
            s.with_inter.write(u, depth + 1, out);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DivergentSearch {
    Found(DivergentProof),
    /// The exhaustive search found no divergent proof.
    NotFound,
}

/// Exhaustive memoized search for a divergent BB-proof of `e ≥ k0 h(X)`.
pub fn find_divergent_proof(e: &BbExpr, k0: u32) -> Result<DivergentSearch> {
    if e.len() > MAX_DIVERGENT_TERMS {
        return Err(Error::ResourceCap(format!(
            "divergent proof search is limited to {MAX_DIVERGENT_TERMS} terms, got {}",
            e.len()
        )));
    }
    if e.min_cover() < k0 {
        return Err(Error::Invalid(format!("some variable is covered fewer than {k0} times")));
    }
    let mut search = Search { n: e.universe.len(), memo: HashMap::new() };
    Ok(match search.run(e.terms.clone(), k0) {
        Some(p) => DivergentSearch::Found(p),
        None => DivergentSearch::NotFound,
    })
}

struct Search {
    n: usize,
    memo: HashMap<(Vec<VarSet>, u32), Option<DivergentProof>>,
}

impl Search {
    fn run(&mut self, terms: Vec<VarSet>, k0: u32) -> Option<DivergentProof> {
        if k0 == 0 || is_chain(&terms) {
            return Some(DivergentProof { terms, k0, split: None });
        }
        let mut key = terms.clone();
        key.sort();
        if let Some(hit) = self.memo.get(&(key.clone(), k0)) {
            return hit.clone();
        }
        let found = self.expand(&terms, k0);
        self.memo.insert((key, k0), found.clone());
        found
    }

    fn expand(&mut self, terms: &[VarSet], k0: u32) -> Option<DivergentProof> {
        let m = terms.len();
        let mut tried = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                let (u, v) = (terms[i], terms[j]);
                if u.comparable(v) || tried.contains(&(u, v)) {
                    continue;
                }
                tried.push((u, v));
                let rest: Vec<VarSet> =
                    terms.iter().enumerate().filter(|(k, _)| *k != i && *k != j).map(|(_, t)| *t).collect();
                let step = BbStep { u, v };
                for mask in 0u32..(1 << rest.len()) {
                    let mut left = vec![u.union(v)];
                    let mut right = vec![u.intersection(v)];
                    for (k, t) in rest.iter().enumerate() {
                        if mask >> k & 1 == 0 {
                            left.push(*t);
                        } else {
                            right.push(*t);
                        }
                    }
                    let cl = min_cover(&left, self.n);
                    let cr = min_cover(&right, self.n);
                    let hi = k0.min(cl);
                    let lo = k0.saturating_sub(cr);
                    for kl in (lo..=hi).rev() {
                        let Some(pl) = self.run(left.clone(), kl) else { continue };
                        let Some(pr) = self.run(right.clone(), k0 - kl) else { continue };
                        return Some(DivergentProof {
                            terms: terms.to_vec(),
                            k0,
                            split: Some(Split { step, with_union: Box::new(pl), with_inter: Box::new(pr) }),
                        });
                    }
                }
            }
        }
        None
    }
}
