use crate::error::{Error, Result};
use crate::relation::{Relation, Tuple, Value};

/// One level of a trie: sorted distinct keys, each with its subtrie (empty
/// at the last level).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TrieNode {
    pub keys: Vec<Value>,
    pub children: Vec<TrieNode>,
}

impl TrieNode {
    fn build(rows: &[Tuple], depth: usize, arity: usize) -> TrieNode {
        let mut node = TrieNode::default();
        if depth == arity {
            return node;
        }
        let mut start = 0;
        while start < rows.len() {
            let key = &rows[start][depth];
            let end = start + rows[start..].partition_point(|r| r[depth] == *key);
            node.keys.push(key.clone());
            if depth + 1 < arity {
                node.children.push(TrieNode::build(&rows[start..end], depth + 1, arity));
            }
            start = end;
        }
        node
    }

    /// Binary search for `key`, returning its position and the number of
    /// comparisons made.
    pub fn find(&self, key: &Value) -> (Option<usize>, u64) {
        let (mut lo, mut hi) = (0usize, self.keys.len());
        let mut cmps = 0;
        while lo < hi {
            let mid = (lo + hi) / 2;
            cmps += 1;
            match self.keys[mid].cmp(key) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return (Some(mid), cmps),
            }
        }
        (None, cmps)
    }

    /// Subtrie under `keys[i]`; the empty node at the last level.
    pub fn child(&self, i: usize) -> &TrieNode {
        static LEAF: TrieNode = TrieNode { keys: Vec::new(), children: Vec::new() };
        self.children.get(i).unwrap_or(&LEAF)
    }
}

/// A relation indexed as a trie in a chosen attribute order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrieRelation {
    order: Vec<String>,
    root: TrieNode,
    len: usize,
}

impl TrieRelation {
    /// `order` must be a permutation of `r`'s schema.
    pub fn build(r: &Relation, order: &[String]) -> Result<Self> {
        if order.len() != r.arity() {
            return Err(Error::Invalid("trie order must list every attribute once".into()));
        }
        let pos: Vec<usize> = order.iter().map(|a| r.position(a)).collect::<Result<_>>()?;
        let mut seen = pos.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != pos.len() {
            return Err(Error::Invalid("trie order repeats an attribute".into()));
        }
        let mut rows: Vec<Tuple> = r.tuples().iter().map(|t| pos.iter().map(|&p| t[p].clone()).collect()).collect();
        rows.sort();
        let root = TrieNode::build(&rows, 0, order.len());
        Ok(TrieRelation { order: order.to_vec(), root, len: rows.len() })
    }

    pub fn order(&self) -> &[String] {
        &self.order
    }

    pub fn root(&self) -> &TrieNode {
        &self.root
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// The subtrie below a prefix of values, if present.
    pub fn lookup(&self, prefix: &[Value]) -> Option<&TrieNode> {
        let mut node = &self.root;
        for v in prefix {
            let (i, _) = node.find(v);
            node = node.child(i?);
        }
        Some(node)
    }

    /// Tuples in lexicographic order of the trie's attribute order.
    pub fn iter(&self) -> Vec<Tuple> {
        let mut out = Vec::with_capacity(self.len);
        let mut prefix = Vec::new();
        walk(&self.root, self.order.len(), &mut prefix, &mut out);
        out
    }
}

fn walk(node: &TrieNode, arity: usize, prefix: &mut Tuple, out: &mut Vec<Tuple>) {
    for (i, k) in node.keys.iter().enumerate() {
        prefix.push(k.clone());
        if prefix.len() == arity {
            out.push(prefix.clone());
        } else {
            walk(node.child(i), arity, prefix, out);
        }
        prefix.pop();
    }
}
