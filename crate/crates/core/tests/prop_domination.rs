//! Domination verdicts and implication checks against sampled databases.

mod common;

use common::*;
use entro_core::domination::{canonical_clique_tree, dominates, Domination};
use entro_core::implication::{implies, relaxation_check, two_tuple_relation, Constraint};
use entro_core::query::{Atom, Query};
use entro_core::relation::{naive_eval, Database, Relation, Value};
use entro_core::vars::{VarSet, VarUniverse};
use proptest::prelude::*;
use rand::Rng;

/// A query over the single binary relation `R` with `atoms` atoms on up to
/// `n` variables.
fn random_graph_query(rng: &mut TestRng, n: usize, atoms: usize) -> Query {
    let mut body = Vec::new();
    for _ in 0..atoms {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        body.push(Atom { relation: "R".into(), vars: vec![VAR_NAMES[a].into(), VAR_NAMES[b].into()] });
    }
    let mut used: Vec<String> = body.iter().flat_map(|a| a.vars.clone()).collect();
    used.sort();
    used.dedup();
    Query::new("Q", used, body).unwrap()
}

fn random_graph(rng: &mut TestRng) -> Database {
    let domain = rng.gen_range(1..=4);
    let len = rng.gen_range(0..=(domain * domain) as usize);
    let pairs: Vec<(i64, i64)> = (0..len).map(|_| (rng.gen_range(0..domain), rng.gen_range(0..domain))).collect();
    let mut db = Database::new();
    db.insert("R", edges(["A", "B"], &pairs));
    db
}

fn random_constraint(rng: &mut TestRng, u: &VarUniverse) -> Constraint {
    let n = u.len();
    let a = VarSet(rng.gen_range(0..(1u32 << n)));
    let b = VarSet(rng.gen_range(1..(1u32 << n))).difference(a);
    if rng.gen_bool(0.5) || b.is_empty() {
        Constraint::fd(a, b)
    } else {
        Constraint::mvd(u, a, b)
    }
}

fn random_relation(rng: &mut TestRng, u: &VarUniverse) -> Relation {
    let len = rng.gen_range(1..=6);
    let tuples = (0..len).map(|_| (0..u.len()).map(|_| Value::Int(rng.gen_range(0..2))).collect()).collect();
    Relation::new(u.names().to_vec(), tuples).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn domination_verdicts_hold_on_samples(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let (na, nb) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let q = random_graph_query(&mut rng, 3, na);
        let qp = random_graph_query(&mut rng, 3, nb);
        match dominates(&q, &qp) {
            Ok(Domination::Yes) => {
                for _ in 0..20 {
                    let db = random_graph(&mut rng);
                    let a = naive_eval(&q, &db).unwrap().len();
                    let b = naive_eval(&qp, &db).unwrap().len();
                    prop_assert!(a <= b, "{} vs {}: {} > {}", q, qp, a, b);
                }
            }
            Ok(Domination::No { witness, q_size, qprime_size, .. }) => {
                prop_assert_eq!(naive_eval(&q, &witness).unwrap().len(), q_size);
                prop_assert_eq!(naive_eval(&qp, &witness).unwrap().len(), qprime_size);
                prop_assert!(q_size > qprime_size);
            }
            Ok(Domination::Undecided { .. }) | Err(_) => {}
        }
    }

    #[test]
    fn clique_tree_forms_agree(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let n = rng.gen_range(2..=5);
        let q = random_query(&mut rng, n);
        if let Some(t) = canonical_clique_tree(&q) {
            prop_assert!(t.is_valid_for(&q));
            prop_assert!(t.forms_agree().unwrap());
        }
    }

    #[test]
    fn implication_verdicts_match_relations(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let n = rng.gen_range(2..=4);
        let u = universe(n);
        let k = rng.gen_range(1..=3);
        let premises: Vec<Constraint> = (0..k).map(|_| random_constraint(&mut rng, &u)).collect();
        let concl = random_constraint(&mut rng, &u);
        let v = implies(&u, &premises, &concl).unwrap();
        if v.holds {
            prop_assert!(relaxation_check(&u, &premises, &concl).unwrap());
            for _ in 0..20 {
                let r = random_relation(&mut rng, &u);
                if premises.iter().all(|p| p.holds_in(&r).unwrap()) {
                    prop_assert!(concl.holds_in(&r).unwrap());
                }
            }
        } else {
            let (w, r) = v.counterexample.unwrap();
            prop_assert_eq!(&r, &two_tuple_relation(&u, w));
            prop_assert!(premises.iter().all(|p| p.holds_in(&r).unwrap()));
            prop_assert!(!concl.holds_in(&r).unwrap());
        }
    }
}
