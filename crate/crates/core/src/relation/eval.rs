use super::{Database, Relation, Value};
use crate::error::Result;
use crate::query::Query;

/// Reference evaluation: nested loops over the atoms in query order, with a
/// binary-search membership test for atoms whose variables are all bound.
/// Output schema is the query head.
pub fn naive_eval(q: &Query, db: &Database) -> Result<Relation> {
    db.check_query(q)?;
    let n = q.num_vars();
    let rels: Vec<&Relation> = q.atoms.iter().map(|a| db.get(&a.relation).unwrap()).collect();
    // Per atom: head index of each column.
    let cols: Vec<Vec<usize>> = q
        .atoms
        .iter()
        .map(|a| a.vars.iter().map(|v| q.universe().index_of(v).unwrap()).collect())
        .collect();
    let mut binding: Vec<Option<Value>> = vec![None; n];
    let mut out = Vec::new();
    rec(0, &rels, &cols, &mut binding, &mut out);
    Ok(Relation::from_parts_unsorted(q.head.clone(), out))
}

fn rec(
    j: usize,
    rels: &[&Relation],
    cols: &[Vec<usize>],
    binding: &mut Vec<Option<Value>>,
    out: &mut Vec<Vec<Value>>,
) {
    if j == rels.len() {
        out.push(binding.iter().map(|v| v.clone().expect("full query binds every variable")).collect());
        return;
    }
    let atom_cols = &cols[j];
    if atom_cols.iter().all(|&c| binding[c].is_some()) {
        let probe: Vec<Value> = atom_cols.iter().map(|&c| binding[c].clone().unwrap()).collect();
        if rels[j].contains(&probe) {
            rec(j + 1, rels, cols, binding, out);
        }
        return;
    }
    for t in rels[j].tuples() {
        let mut newly = Vec::new();
        let mut ok = true;
        for (k, &c) in atom_cols.iter().enumerate() {
            match &binding[c] {
                Some(v) if *v != t[k] => {
                    ok = false;
                    break;
                }
                Some(_) => {}
                None => {
                    binding[c] = Some(t[k].clone());
                    newly.push(c);
                }
            }
        }
        if ok {
            rec(j + 1, rels, cols, binding, out);
        }
        for c in newly {
            binding[c] = None;
        }
    }
}
