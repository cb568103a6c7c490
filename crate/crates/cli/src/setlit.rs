//! Set literals: `1,4`, `(1,0),(0,3)`, or empty (`""`, `{}`).

use anyhow::{bail, Context, Result};
use dcover::group::{AbelianGroup, Element};

/// Splits on commas that are not inside parentheses.
fn items(s: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in s.chars().filter(|c| !c.is_whitespace()) {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch);
            }
            ')' => {
                depth -= 1;
                if depth < 0 {
                    bail!("unbalanced parentheses in {s:?}");
                }
                cur.push(ch);
            }
            ',' if depth == 0 => out.push(std::mem::take(&mut cur)),
            _ => cur.push(ch),
        }
    }
    if depth != 0 {
        bail!("unbalanced parentheses in {s:?}");
    }
    out.push(cur);
    if out.iter().any(|t| t.is_empty()) {
        bail!("empty element in {s:?}");
    }
    Ok(out)
}

pub fn parse_set(g: &AbelianGroup, s: &str) -> Result<Vec<Element>> {
    let body = s.trim();
    let body = body.strip_prefix('{').and_then(|b| b.strip_suffix('}')).unwrap_or(body);
    if body.trim().is_empty() {
        return Ok(Vec::new());
    }
    let rank = g.input_factors().len();
    let mut out = Vec::new();
    for item in items(body)? {
        let coords: Vec<i64> = match item.strip_prefix('(').and_then(|t| t.strip_suffix(')')) {
            Some(inner) => inner
                .split(',')
                .map(|c| c.parse::<i64>().with_context(|| format!("bad coordinate {c:?} in {item}")))
                .collect::<Result<_>>()?,
            None => vec![item.parse::<i64>().with_context(|| format!("bad element {item:?}"))?],
        };
        if coords.len() != rank {
            bail!("element {item} has {} coordinates; {} expects {rank}", coords.len(), g);
        }
        out.push(g.from_input_coords(&coords)?);
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_literals() {
        let c5 = AbelianGroup::new(&[5]).unwrap();
        assert_eq!(parse_set(&c5, "1,4").unwrap(), vec![1, 4]);
        assert_eq!(parse_set(&c5, "{4, 1, -1}").unwrap(), vec![1, 4]);
        assert_eq!(parse_set(&c5, "").unwrap(), Vec::<usize>::new());
        assert_eq!(parse_set(&c5, "{}").unwrap(), Vec::<usize>::new());
        let g = AbelianGroup::new(&[2, 10]).unwrap();
        let s = parse_set(&g, "(1,0),(0,3)").unwrap();
        assert_eq!(s, vec![3, 10]);
        assert!(parse_set(&g, "1").is_err());
        assert!(parse_set(&g, "(1,0").is_err());
        assert!(parse_set(&c5, "1,,2").is_err());
        assert!(parse_set(&c5, "x").is_err());
    }
}
