//! Seeded generators shared by the integration suites.
#![allow(dead_code)]

use entro_core::bounds::StatSpec;
use entro_core::inequality::SigmaStat;
use entro_core::polymatroid::{step_function, Fd};
use entro_core::query::{Atom, Query};
use entro_core::rational::Rational;
use entro_core::relation::{Database, Distribution, Relation, Value, DEFAULT_ENTROPY_BITS};
use entro_core::setfn::SetFunction;
use entro_core::vars::{VarSet, VarUniverse};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub type TestRng = ChaCha8Rng;

pub const VAR_NAMES: [&str; 6] = ["X", "Y", "Z", "U", "V", "W"];

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn universe(n: usize) -> VarUniverse {
    VarUniverse::new(&VAR_NAMES[..n]).unwrap()
}

fn random_subset(rng: &mut TestRng, n: usize, max_len: usize) -> VarSet {
    let k = rng.gen_range(1..=max_len.min(n));
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    VarSet::from_indices(idx[..k].iter().copied())
}

/// A full query over `n` variables without self-joins. Atoms have at most
/// three variables, listed in a random order; every variable is covered.
pub fn random_query(rng: &mut TestRng, n: usize) -> Query {
    let m = rng.gen_range(2..=n.max(2) + 1);
    let mut sets: Vec<VarSet> = (0..m).map(|_| random_subset(rng, n, 3)).collect();
    let covered = sets.iter().fold(VarSet::EMPTY, |a, s| a.union(*s));
    for i in VarSet::full(n).difference(covered).iter() {
        let j = rng.gen_range(0..sets.len());
        sets[j] = sets[j].insert(i);
    }
    let atoms = sets
        .iter()
        .enumerate()
        .map(|(j, s)| {
            let mut vars: Vec<String> = s.iter().map(|i| VAR_NAMES[i].to_string()).collect();
            vars.shuffle(rng);
            Atom { relation: format!("R{j}"), vars }
        })
        .collect();
    let head = VAR_NAMES[..n].iter().map(|s| s.to_string()).collect();
    Query::new("Q", head, atoms).unwrap()
}

/// Relations of up to `max_tuples` tuples over the domain `0..domain`, stored
/// with the atom's variables as schema.
pub fn random_db(rng: &mut TestRng, q: &Query, max_tuples: usize, domain: i64) -> Database {
    let mut db = Database::new();
    for a in &q.atoms {
        if db.get(&a.relation).is_some() {
            continue;
        }
        let len = rng.gen_range(0..=max_tuples);
        let tuples = (0..len).map(|_| (0..a.vars.len()).map(|_| Value::Int(rng.gen_range(0..domain))).collect()).collect();
        db.insert(&a.relation, Relation::new(a.vars.clone(), tuples).unwrap());
    }
    db
}

/// A binary relation over `schema` from integer pairs.
pub fn edges(schema: [&str; 2], pairs: &[(i64, i64)]) -> Relation {
    let tuples = pairs.iter().map(|&(a, b)| vec![Value::Int(a), Value::Int(b)]).collect();
    Relation::new(schema.iter().map(|s| s.to_string()).collect(), tuples).unwrap()
}

/// Power-of-two cardinalities `2^k`, `k ∈ 0..=max_log`.
pub fn dyadic_cards(rng: &mut TestRng, q: &Query, max_log: i64) -> Vec<Rational> {
    q.atoms.iter().map(|_| Rational::pow2(rng.gen_range(0..=max_log))).collect()
}

/// Cardinality statistics on every atom plus a few degree statistics. Logs
/// are multiples of `1/denom` up to `max_log`. With `simple`, conditions have
/// at most one variable.
pub fn random_spec(rng: &mut TestRng, q: &Query, max_log: i64, denom: i64, simple: bool) -> StatSpec {
    let mut spec = StatSpec::new(q);
    let log = |rng: &mut TestRng| Rational::new(rng.gen_range(0..=denom * max_log), denom);
    for (j, a) in q.atoms.iter().enumerate() {
        let l = log(rng);
        spec.push_log(SigmaStat::card(q.atom_set(j), &a.relation), l).unwrap();
    }
    let extra = rng.gen_range(0..=q.atoms.len());
    for _ in 0..extra {
        let j = rng.gen_range(0..q.atoms.len());
        let g = q.atom_set(j);
        if g.len() < 2 {
            continue;
        }
        let members: Vec<usize> = g.iter().collect();
        let mut u = VarSet::EMPTY;
        let max_u = if simple { 1 } else { members.len() - 1 };
        let ulen = rng.gen_range(1..=max_u);
        let mut shuffled = members.clone();
        shuffled.shuffle(rng);
        for &i in &shuffled[..ulen] {
            u = u.insert(i);
        }
        let rest: Vec<usize> = shuffled[ulen..].to_vec();
        let vlen = rng.gen_range(1..=rest.len());
        let v = VarSet::from_indices(rest[..vlen].iter().copied());
        let l = log(rng);
        spec.push_log(SigmaStat::new(v, u, &q.atoms[j].relation), l).unwrap();
    }
    spec
}

/// Functional dependencies with one- or two-variable sides.
pub fn random_fds(rng: &mut TestRng, n: usize, count: usize) -> Vec<Fd> {
    (0..count).map(|_| Fd::new(random_subset(rng, n, 2), random_subset(rng, n, 2))).collect()
}

/// Entropy vector of the uniform distribution on a random relation.
pub fn random_entropic(rng: &mut TestRng, n: usize) -> SetFunction {
    let names: Vec<String> = VAR_NAMES[..n].iter().map(|s| s.to_string()).collect();
    let len = rng.gen_range(1..=8);
    let tuples = (0..len).map(|_| (0..n).map(|_| Value::Int(rng.gen_range(0..3))).collect()).collect();
    let r = Relation::new(names, tuples).unwrap();
    Distribution::uniform(&r).unwrap().entropy_vector(DEFAULT_ENTROPY_BITS).unwrap()
}

/// A non-negative integer combination of step functions.
pub fn random_normal(rng: &mut TestRng, n: usize) -> SetFunction {
    let u = universe(n);
    let mut h = SetFunction::zeros(&u);
    for _ in 0..rng.gen_range(1..=4) {
        let v = VarSet(rng.gen_range(1..(1u32 << n)));
        let k = Rational::from_int(rng.gen_range(1..=3));
        h = h.add(&step_function(&u, v).scale(&k)).unwrap();
    }
    h
}

/// Either kind of polymatroid, chosen at random.
pub fn random_polymatroid(rng: &mut TestRng, n: usize) -> SetFunction {
    if rng.gen_bool(0.5) {
        random_entropic(rng, n)
    } else {
        random_normal(rng, n)
    }
}

/// A multiset of non-empty subsets of `n` variables.
pub fn random_multiset(rng: &mut TestRng, n: usize, len: usize) -> Vec<VarSet> {
    (0..len).map(|_| VarSet(rng.gen_range(1..(1u32 << n)))).collect()
}

