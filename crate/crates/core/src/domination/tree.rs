use std::fmt;

use crate::error::{Error, Result};
use crate::expr::{check_identity, expand_conditional, LinExpr};
use crate::query::Query;
use crate::vars::{VarSet, VarUniverse};

/// A tree decomposition: bags over the query's variables and tree edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    universe: VarUniverse,
    pub bags: Vec<VarSet>,
    pub edges: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    pub fn new(universe: &VarUniverse, bags: Vec<VarSet>, edges: Vec<(usize, usize)>) -> Result<Self> {
        for b in &bags {
            universe.check(*b)?;
        }
        if bags.is_empty() || edges.len() + 1 != bags.len() {
            return Err(Error::Invalid("a tree on k bags has k - 1 edges".into()));
        }
        let mut comp: Vec<usize> = (0..bags.len()).collect();
        fn find(c: &mut [usize], i: usize) -> usize {
            if c[i] != i {
                c[i] = find(c, c[i]);
            }
            c[i]
        }
        for &(a, b) in &edges {
            if a >= bags.len() || b >= bags.len() {
                return Err(Error::Invalid(format!("edge ({a},{b}) names a missing bag")));
            }
            let (ra, rb) = (find(&mut comp, a), find(&mut comp, b));
            if ra == rb {
                return Err(Error::Invalid("decomposition edges contain a cycle".into()));
            }
            comp[ra] = rb;
        }
        Ok(TreeDecomposition { universe: universe.clone(), bags, edges })
    }

    pub fn universe(&self) -> &VarUniverse {
        &self.universe
    }

    pub fn separators(&self) -> impl Iterator<Item = VarSet> + '_ {
        self.edges.iter().map(|&(a, b)| self.bags[a].intersection(self.bags[b]))
    }

    /// Every edge intersection has at most one variable.
    pub fn is_simple(&self) -> bool {
        self.separators().all(|s| s.len() <= 1)
    }

    /// Every atom lies in some bag and each variable's bags are connected.
    pub fn is_valid_for(&self, q: &Query) -> bool {
        if q.universe() != &self.universe {
            return false;
        }
        let covered = q.atom_sets().iter().all(|a| self.bags.iter().any(|b| a.is_subset(*b)));
        let connected = (0..self.universe.len()).all(|x| {
            let nodes: Vec<usize> = (0..self.bags.len()).filter(|&i| self.bags[i].contains(x)).collect();
            let inner = self.edges.iter().filter(|(a, b)| self.bags[*a].contains(x) && self.bags[*b].contains(x));
            // A forest on the nodes holding x is connected iff it has |nodes| - 1 edges.
            nodes.len() == inner.count() + 1
        });
        covered && connected
    }

    /// `E_T = Σ_n h(χ(n)) - Σ_{(n,n')} h(χ(n) ∩ χ(n'))`.
    pub fn et_expression(&self) -> LinExpr {
        let mut e = LinExpr::new();
        for b in &self.bags {
            e.add_term(*b, crate::rational::Rational::one());
        }
        for s in self.separators() {
            e.add_term(s, -crate::rational::Rational::one());
        }
        e.without_empty()
    }

    /// `h(χ(root)) + Σ h(χ(n) | χ(parent(n)))` with edges oriented away
    /// from `root`.
    pub fn et_rooted(&self, root: usize) -> Result<LinExpr> {
        if root >= self.bags.len() {
            return Err(Error::Invalid(format!("no bag {root}")));
        }
        let mut e = LinExpr::h(self.bags[root]);
        let mut seen = vec![false; self.bags.len()];
        seen[root] = true;
        let mut stack = vec![root];
        while let Some(p) = stack.pop() {
            for &(a, b) in &self.edges {
                let c = if a == p { b } else if b == p { a } else { continue };
                if seen[c] {
                    continue;
                }
                seen[c] = true;
                let sep = self.bags[c].intersection(self.bags[p]);
                e = e.add(&expand_conditional(&self.universe, sep, self.bags[c])?);
                stack.push(c);
            }
        }
        Ok(e.without_empty())
    }

    /// The difference and rooted forms agree for every root.
    pub fn forms_agree(&self) -> Result<bool> {
        let d = self.et_expression();
        for r in 0..self.bags.len() {
            if !check_identity(&self.universe, &d, &self.et_rooted(r)?)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for TreeDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bags: Vec<String> = self.bags.iter().map(|b| self.universe.fmt_compact(*b)).collect();
        write!(f, "bags: {}", bags.join(" "))?;
        for &(a, b) in &self.edges {
            write!(f, "; {}-{}", bags[a], bags[b])?;
        }
        Ok(())
    }
}

/// Adjacency masks of the Gaifman graph.
fn gaifman(q: &Query) -> Vec<VarSet> {
    let mut adj = vec![VarSet::EMPTY; q.num_vars()];
    for a in q.atom_sets() {
        for i in a.iter() {
            adj[i] = adj[i].union(a.remove(i));
        }
    }
    adj
}

/// The clique tree whose bags are the maximal cliques of the Gaifman graph,
/// or `None` when that graph is not chordal. Maximum cardinality search
/// gives the visit order; each vertex's earlier-visited neighbours must form
/// a clique. Bags are joined by a maximum-weight spanning tree on separator
/// sizes, ties going to the lowest bag indices.
pub fn canonical_clique_tree(q: &Query) -> Option<TreeDecomposition> {
    let n = q.num_vars();
    let adj = gaifman(q);
    let mut visited = VarSet::EMPTY;
    let mut cliques: Vec<VarSet> = Vec::new();
    for _ in 0..n {
        let v = (0..n)
            .filter(|&i| !visited.contains(i))
            .max_by_key(|&i| (adj[i].intersection(visited).len(), std::cmp::Reverse(i)))
            .unwrap();
        let prior = adj[v].intersection(visited);
        if prior.iter().any(|a| !prior.remove(a).is_subset(adj[a])) {
            return None;
        }
        visited = visited.insert(v);
        let c = prior.insert(v);
        if let Some(k) = cliques.iter().position(|d| d.is_subset(c)) {
            // MCS only ever extends the most recent clique.
            cliques[k] = c;
        } else {
            cliques.push(c);
        }
    }
    let mut in_tree = vec![false; cliques.len()];
    in_tree[0] = true;
    let mut edges = Vec::new();
    for _ in 1..cliques.len() {
        let mut best: Option<(usize, usize, usize)> = None;
        for a in (0..cliques.len()).filter(|&a| in_tree[a]) {
            for b in (0..cliques.len()).filter(|&b| !in_tree[b]) {
                let w = cliques[a].intersection(cliques[b]).len();
                if best.map_or(true, |(bw, _, _)| w > bw) {
                    best = Some((w, a, b));
                }
            }
        }
        let (_, a, b) = best.unwrap();
        in_tree[b] = true;
        edges.push((a, b));
    }
    TreeDecomposition::new(q.universe(), cliques, edges).ok()
}
