//! Comma-separated text with a header row. Pair values are written `(a,b)`,
//! so fields are split only on commas outside parentheses.

use super::{Relation, Tuple, Value};
use crate::error::{Error, Result};

pub(crate) fn split_fields(line: &str) -> Result<Vec<&str>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in line.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(Error::Parse(format!("unbalanced `)` in `{line}`")));
                }
            }
            ',' if depth == 0 => {
                out.push(line[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(Error::Parse(format!("unbalanced `(` in `{line}`")));
    }
    out.push(line[start..].trim());
    Ok(out)
}

/// Parses a relation. When `schema` is given the header must match it. An
/// empty input yields an empty relation over `schema` (or over no attributes).
pub fn parse_csv(text: &str, schema: Option<&[String]>) -> Result<Relation> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let Some(header) = lines.next() else {
        return Relation::empty(schema.map(<[String]>::to_vec).unwrap_or_default());
    };
    let names: Vec<String> = split_fields(header)?.into_iter().map(String::from).collect();
    if let Some(s) = schema {
        if s != names.as_slice() {
            return Err(Error::Parse(format!(
                "header `{}` does not match schema `{}`",
                names.join(","),
                s.join(",")
            )));
        }
    }
    let mut tuples: Vec<Tuple> = Vec::new();
    for (k, line) in lines.enumerate() {
        let fields = split_fields(line)?;
        if fields.len() != names.len() {
            return Err(Error::Parse(format!(
                "row {}: {} fields, header has {}",
                k + 2,
                fields.len(),
                names.len()
            )));
        }
        tuples.push(fields.into_iter().map(Value::parse).collect::<Result<_>>()?);
    }
    Relation::new(names, tuples)
}

pub fn to_csv(r: &Relation) -> String {
    let mut s = r.schema().join(",");
    s.push('\n');
    for t in r.tuples() {
        let row: Vec<String> = t.iter().map(|v| v.to_string()).collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_with_pairs() {
        let text = "A,B\n1,(x,(2,3))\n0,y\n";
        let r = parse_csv(text, None).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(parse_csv(&to_csv(&r), None).unwrap(), r);
    }

    #[test]
    fn header_checks_and_empty() {
        let schema = vec!["A".to_string(), "B".to_string()];
        assert!(parse_csv("A,C\n1,2\n", Some(&schema)).is_err());
        assert!(parse_csv("A,B\n1\n", None).is_err());
        let e = parse_csv("", Some(&schema)).unwrap();
        assert!(e.is_empty());
        assert_eq!(e.arity(), 2);
        assert!(parse_csv("A,B\n", None).unwrap().is_empty());
    }
}
