use rayon::prelude::*;

use super::trie::{TrieNode, TrieRelation};
use super::ExecStats;
use crate::error::{Error, Result};
use crate::query::Query;
use crate::relation::{Database, Relation, Tuple, Value};

struct Plan {
    order: Vec<String>,
    tries: Vec<TrieRelation>,
    /// Atoms containing each variable of the order.
    participants: Vec<Vec<usize>>,
    /// Head position of each variable of the order.
    head_pos: Vec<usize>,
}

fn build_plan(q: &Query, db: &Database, order: &[String]) -> Result<Plan> {
    db.check_query(q)?;
    let mut sorted: Vec<&String> = order.iter().collect();
    sorted.sort();
    let mut head: Vec<&String> = q.head.iter().collect();
    head.sort();
    if sorted != head {
        return Err(Error::Invalid(format!("variable order [{}] is not a permutation of the head", order.join(","))));
    }
    let mut tries = Vec::with_capacity(q.atoms.len());
    for j in 0..q.atoms.len() {
        let r = db.bound_atom(q, j)?;
        let atom_order: Vec<String> = order.iter().filter(|v| r.schema().contains(v)).cloned().collect();
        tries.push(TrieRelation::build(&r, &atom_order)?);
    }
    let participants = order
        .iter()
        .map(|v| (0..q.atoms.len()).filter(|&j| q.atoms[j].vars.contains(v)).collect())
        .collect();
    let head_pos = order.iter().map(|v| q.head.iter().position(|h| h == v).unwrap()).collect();
    Ok(Plan { order: order.to_vec(), tries, participants, head_pos })
}

/// Human-readable plan: one line per level with the intersected atoms.
pub fn gj_plan(q: &Query, order: &[String]) -> String {
    let mut out = String::new();
    for (d, v) in order.iter().enumerate() {
        let atoms: Vec<&str> =
            q.atoms.iter().filter(|a| a.vars.contains(v)).map(|a| a.relation.as_str()).collect();
        out.push_str(&format!("level {d}: {v} in {}\n", atoms.join(" ∩ ")));
    }
    out
}

struct Run<'a> {
    plan: &'a Plan,
    cursors: Vec<&'a TrieNode>,
    binding: Vec<Value>,
    out: Vec<Tuple>,
    stats: ExecStats,
}

impl<'a> Run<'a> {
    fn new(plan: &'a Plan) -> Self {
        Run {
            plan,
            cursors: plan.tries.iter().map(|t| t.root()).collect(),
            binding: Vec::with_capacity(plan.order.len()),
            out: Vec::new(),
            stats: ExecStats::default(),
        }
    }

    fn leader(&self, d: usize) -> usize {
        // Smallest child list; ties go to the lowest atom index.
        *self.plan.participants[d].iter().min_by_key(|&&j| (self.cursors[j].keys.len(), j)).unwrap()
    }

    /// Tries `key` at depth `d`, recursing when every participant has it.
    fn extend(&mut self, d: usize, leader: usize, li: usize) {
        let saved: Vec<&'a TrieNode> = self.plan.participants[d].iter().map(|&j| self.cursors[j]).collect();
        let key = &saved[self.plan.participants[d].iter().position(|&j| j == leader).unwrap()].keys[li];
        let mut next = Vec::with_capacity(saved.len());
        for (&j, node) in self.plan.participants[d].iter().zip(&saved) {
            if j == leader {
                next.push(node.child(li));
                continue;
            }
            self.stats.probes += 1;
            let (hit, cmps) = node.find(key);
            self.stats.comparisons += cmps;
            match hit {
                Some(i) => next.push(node.child(i)),
                None => return,
            }
        }
        for (&j, node) in self.plan.participants[d].iter().zip(next) {
            self.cursors[j] = node;
        }
        self.binding.push(key.clone());
        self.descend(d + 1);
        self.binding.pop();
        for (&j, node) in self.plan.participants[d].iter().zip(saved) {
            self.cursors[j] = node;
        }
    }

    fn descend(&mut self, d: usize) {
        self.stats.recursive_calls += 1;
        if d == self.plan.order.len() {
            let mut t = vec![Value::Int(0); d];
            for (k, v) in self.binding.iter().enumerate() {
                t[self.plan.head_pos[k]] = v.clone();
            }
            self.out.push(t);
            self.stats.tuples_out += 1;
            return;
        }
        let leader = self.leader(d);
        let n = self.cursors[leader].keys.len();
        for li in 0..n {
            self.stats.leader_keys += 1;
            self.extend(d, leader, li);
        }
    }
}

/// Generic Join over the variable `order`. Each atom is indexed as a trie in
/// the induced order; at each level the smallest child list leads and the
/// others are probed by binary search. Output schema is the query head.
pub fn generic_join(q: &Query, db: &Database, order: &[String]) -> Result<(Relation, ExecStats)> {
    let plan = build_plan(q, db, order)?;
    let mut run = Run::new(&plan);
    run.descend(0);
    Ok((Relation::from_parts_unsorted(q.head.clone(), run.out), run.stats))
}

/// [`generic_join`] with the first level's bindings evaluated in parallel.
/// The output and the counters equal the sequential run's.
pub fn generic_join_par(q: &Query, db: &Database, order: &[String]) -> Result<(Relation, ExecStats)> {
    let plan = build_plan(q, db, order)?;
    let root = Run::new(&plan);
    let leader = root.leader(0);
    let n = root.cursors[leader].keys.len();
    let parts: Vec<(Vec<Tuple>, ExecStats)> = (0..n)
        .into_par_iter()
        .map(|li| {
            let mut run = Run::new(&plan);
            run.stats.leader_keys += 1;
            run.extend(0, leader, li);
            (run.out, run.stats)
        })
        .collect();
    let mut stats = ExecStats { recursive_calls: 1, ..ExecStats::default() };
    let mut out = Vec::new();
    for (t, s) in parts {
        out.extend(t);
        stats += s;
    }
    Ok((Relation::from_parts_unsorted(q.head.clone(), out), stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relation::naive_eval;

    fn names(s: &[&str]) -> Vec<String> {
        s.iter().map(|x| x.to_string()).collect()
    }

    fn triangle_db(edges: &[&[i64]]) -> (Query, Database) {
        let q = Query::parse("Q(X,Y,Z) :- R(X,Y), S(Y,Z), T(Z,X).").unwrap();
        let mut db = Database::new();
        for n in ["R", "S", "T"] {
            db.insert(n, Relation::from_ints(&["A", "B"], edges).unwrap());
        }
        (q, db)
    }

    #[test]
    fn triangle_matches_naive() {
        let (q, db) = triangle_db(&[&[1, 2], &[2, 3], &[3, 1], &[1, 3], &[3, 2], &[2, 1], &[4, 1]]);
        let want = naive_eval(&q, &db).unwrap();
        for order in [["X", "Y", "Z"], ["Z", "X", "Y"], ["Y", "Z", "X"]] {
            let (got, stats) = generic_join(&q, &db, &names(&order)).unwrap();
            assert_eq!(got, want);
            assert_eq!(stats.tuples_out as usize, want.len());
            let (par, pstats) = generic_join_par(&q, &db, &names(&order)).unwrap();
            assert_eq!(par, want);
            assert_eq!(pstats, stats);
        }
    }

    #[test]
    fn empty_relation_stops_at_root() {
        let q = Query::parse("Q(X,Y,Z) :- R(X,Y), S(Y,Z), T(Z,X).").unwrap();
        let mut db = Database::new();
        db.insert("R", Relation::from_ints(&["A", "B"], &[&[1, 2]]).unwrap());
        db.insert("S", Relation::from_ints(&["A", "B"], &[&[2, 3]]).unwrap());
        db.insert("T", Relation::empty(names(&["A", "B"])).unwrap());
        let (got, stats) = generic_join(&q, &db, &names(&["X", "Y", "Z"])).unwrap();
        assert!(got.is_empty());
        assert_eq!(stats.recursive_calls, 1);
        assert_eq!(stats.leader_keys, 0);
    }

    #[test]
    fn repeated_variable_atom() {
        let q = Query::parse("Q(X,Y) :- R(X,X), S(X,Y).").unwrap();
        let mut db = Database::new();
        db.insert("R", Relation::from_ints(&["A", "B"], &[&[1, 1], &[2, 3]]).unwrap());
        db.insert("S", Relation::from_ints(&["A", "B"], &[&[1, 5], &[2, 6]]).unwrap());
        let (got, _) = generic_join(&q, &db, &names(&["Y", "X"])).unwrap();
        assert_eq!(got, naive_eval(&q, &db).unwrap());
        assert_eq!(got.len(), 1);
    }

    #[test]
    fn bad_order_and_plan() {
        let (q, db) = triangle_db(&[&[1, 2]]);
        assert!(generic_join(&q, &db, &names(&["X", "Y"])).is_err());
        assert!(generic_join(&q, &db, &names(&["X", "Y", "Y"])).is_err());
        let plan = gj_plan(&q, &names(&["X", "Y", "Z"]));
        assert_eq!(plan.lines().next().unwrap(), "level 0: X in R ∩ T");
    }
}
