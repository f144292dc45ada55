//! Parsers for command-line values: vectors, temperatures and permutations
//! in cycle or one-line notation.

use std::path::Path;

use simplex_reach::{Permutation, SimplexVector, Temperature};

/// `inf`, `0`, or a positive number.
pub fn temperature(s: &str) -> Result<Temperature, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "+inf" => Ok(Temperature::InfiniteLimit),
        "0" | "0.0" | "zero" => Ok(Temperature::ZeroLimit),
        other => {
            let t: f64 = other
                .parse()
                .map_err(|_| format!("invalid temperature '{s}': expected inf, 0 or a positive number"))?;
            if t <= 0.0 || !t.is_finite() {
                return Err(format!("temperature must be positive, got {t}"));
            }
            Ok(Temperature::Finite(t))
        }
    }
}

/// Comma-separated reals.
pub fn reals(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| format!("'{}' is not a number", p.trim()))
        })
        .collect()
}

/// A simplex vector given inline (`0.5,0.3,0.2`), as a JSON document, or as
/// a path to a JSON document.
pub fn simplex_vector(s: &str) -> Result<SimplexVector, String> {
    let text = s.trim();
    if text.starts_with('{') {
        return serde_json::from_str(text).map_err(|e| format!("invalid vector document: {e}"));
    }
    if Path::new(text).is_file() {
        let body = std::fs::read_to_string(text).map_err(|e| format!("{text}: {e}"))?;
        return serde_json::from_str(&body).map_err(|e| format!("{text}: invalid vector document: {e}"));
    }
    SimplexVector::new(reals(text)?).map_err(|e| e.to_string())
}

/// A permutation in cycle notation (`(1,6,2,3,4)(5)`, 1-based) or one-line
/// notation (`[6,3,4,1,5,2]`). Cycle notation needs `n` unless the largest
/// point appears in some cycle.
pub fn permutation(s: &str, n: Option<usize>) -> Result<Permutation, String> {
    let text = s.trim();
    if let Some(body) = text.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
        let image = body
            .split(',')
            .map(|p| p.trim().parse::<usize>().map_err(|_| format!("'{}' is not a positive integer", p.trim())))
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(n) = n {
            if image.len() != n {
                return Err(format!("permutation has {} entries, expected {n}", image.len()));
            }
        }
        return Permutation::from_one_based(&image).map_err(|e| e.to_string());
    }
    cycles(text, n)
}

/// Cycles separated by parentheses; points inside a cycle by commas or spaces.
fn cycles(text: &str, n: Option<usize>) -> Result<Permutation, String> {
    let spaced = text.replace('(', " ( ").replace(')', " ) ").replace(',', " ");
    let mut parsed: Vec<Vec<usize>> = Vec::new();
    let mut open: Option<Vec<usize>> = None;
    for tok in spaced.split_whitespace() {
        match (tok, open.as_mut()) {
            ("(", None) => open = Some(Vec::new()),
            (")", Some(_)) => parsed.push(open.take().unwrap_or_default()),
            ("(", Some(_)) | (")", None) => return Err("unbalanced parentheses".into()),
            (_, None) => return Err(format!("expected '(' before '{tok}'")),
            (_, Some(cycle)) => match tok.parse::<usize>() {
                Ok(v) if v > 0 => cycle.push(v),
                _ => return Err(format!("'{tok}' is not a positive integer")),
            },
        }
    }
    if open.is_some() {
        return Err("unbalanced parentheses".into());
    }
    let largest = parsed.iter().flatten().copied().max().unwrap_or(0);
    let n = match n {
        Some(n) => n,
        None if largest > 0 => largest,
        None => return Err("the identity needs an explicit dimension".into()),
    };
    if largest > n {
        return Err(format!("point {largest} exceeds dimension {n}"));
    }
    let mut image: Vec<Option<usize>> = vec![None; n];
    for cycle in &parsed {
        for (i, &a) in cycle.iter().enumerate() {
            let b = cycle[(i + 1) % cycle.len()];
            if image[a - 1].is_some() {
                return Err(format!("point {a} appears in more than one cycle"));
            }
            image[a - 1] = Some(b - 1);
        }
    }
    let image = image
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.unwrap_or(i))
        .collect();
    Permutation::new(image).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_notation() {
        let p = permutation("(1,6,2,3,4)(5)", None).unwrap();
        assert_eq!(p.to_one_based(), vec![6, 3, 4, 1, 5, 2]);
        let q = permutation("(1 3)", Some(4)).unwrap();
        assert_eq!(q.to_one_based(), vec![3, 2, 1, 4]);
        assert!(permutation("(1,x)", Some(4)).unwrap_err().contains("not a positive integer"));
        assert!(permutation("()", None).is_err());
        let r = permutation("(1,3)", Some(4)).unwrap();
        assert_eq!(r.to_one_based(), vec![3, 2, 1, 4]);
        assert!(permutation("()", Some(3)).unwrap().is_identity());
        assert!(permutation("(1,2)(2,3)", None).is_err());
        assert!(permutation("(1,5)", Some(3)).is_err());
        assert!(permutation("(0,1)", None).is_err());
        assert!(permutation("(1,2", None).is_err());
    }

    #[test]
    fn one_line_notation() {
        let p = permutation("[2,1,3]", None).unwrap();
        assert_eq!(p.to_one_based(), vec![2, 1, 3]);
        assert!(permutation("[2,1,3]", Some(4)).is_err());
        assert!(permutation("[1,1]", None).is_err());
    }

    #[test]
    fn temperatures() {
        assert_eq!(temperature("inf").unwrap(), Temperature::InfiniteLimit);
        assert_eq!(temperature("0").unwrap(), Temperature::ZeroLimit);
        assert_eq!(temperature("1.5").unwrap(), Temperature::Finite(1.5));
        assert!(temperature("-1").is_err());
        assert!(temperature("hot").is_err());
    }

    #[test]
    fn vectors() {
        let v = simplex_vector("0.5, 0.3,0.2").unwrap();
        assert_eq!(v.as_slice(), &[0.5, 0.3, 0.2]);
        let w = simplex_vector(r#"{"n":2,"entries":[0.25,0.75]}"#).unwrap();
        assert_eq!(w.dim(), 2);
        assert!(simplex_vector("0.5,0.6").is_err());
        assert!(simplex_vector("a,b").is_err());
    }
}
