//! Text formats: group descriptors and set files.
//!
//! Descriptor grammar: `q^n` for 𝔽_q^n, `N` for ℤ/N, `N1xN2x...` in general.
//! A set file is `group: N1x...xNk` followed by one element per line as
//! comma-separated residues, with no whitespace.

use crate::error::{invalid, ApcError, Result};
use crate::group::{normalize_set, GroupSpec};

pub fn parse_group(spec: &str) -> Result<GroupSpec> {
    let s = spec.trim();
    if let Some((q, n)) = s.split_once('^') {
        let q: i64 = q.parse().map_err(|_| ApcError::InvalidArgument(format!("bad base in {spec:?}")))?;
        let n: usize = n.parse().map_err(|_| ApcError::InvalidArgument(format!("bad exponent in {spec:?}")))?;
        if q < 1 {
            return invalid(format!("bad base in {spec:?}"));
        }
        return GroupSpec::power(q as usize, n);
    }
    let factors = s
        .split('x')
        .map(|t| t.parse::<i64>().map_err(|_| ApcError::InvalidArgument(format!("bad factor {t:?} in {spec:?}"))))
        .collect::<Result<Vec<_>>>()?;
    GroupSpec::new(&factors)
}

pub fn parse_set_file(text: &str) -> Result<(GroupSpec, Vec<usize>)> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| ApcError::InvalidArgument("set file is empty".into()))?;
    let desc = header
        .strip_prefix("group: ")
        .ok_or_else(|| ApcError::InvalidArgument("set file must start with `group: `".into()))?;
    let g = parse_group(desc)?;
    let mut set = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        if line.chars().any(char::is_whitespace) {
            return invalid(format!("line {}: whitespace inside an element", i + 2));
        }
        let res = line
            .split(',')
            .map(|t| {
                t.parse::<i64>().map_err(|_| ApcError::InvalidArgument(format!("line {}: bad residue {t:?}", i + 2)))
            })
            .collect::<Result<Vec<_>>>()?;
        if res.len() != g.rank() {
            return invalid(format!("line {}: expected {} residues", i + 2, g.rank()));
        }
        for (&r, &n) in res.iter().zip(g.factors()) {
            if r < 0 || r as usize >= n {
                return invalid(format!("line {}: residue {r} outside [0, {n})", i + 2));
            }
        }
        set.push(g.index_of(&res)?);
    }
    Ok((g, normalize_set(set)))
}

pub fn write_set_file(g: &GroupSpec, a: &[usize]) -> String {
    let mut s = format!("group: {}\n", g.descriptor());
    for &x in a {
        let r: Vec<String> = g.residues(x).iter().map(|v| v.to_string()).collect();
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar() {
        assert_eq!(parse_group("3^2").unwrap().factors(), &[3, 3]);
        assert_eq!(parse_group("101").unwrap().factors(), &[101]);
        assert_eq!(parse_group("4x6").unwrap().factors(), &[4, 6]);
        assert!(parse_group("3^").is_err());
        assert!(parse_group("0").is_err());
        assert!(parse_group("ax3").is_err());
    }

    #[test]
    fn set_file_round_trip() {
        let g = GroupSpec::power(3, 2).unwrap();
        let a = vec![0, 4, 8];
        let text = write_set_file(&g, &a);
        assert_eq!(text, "group: 3x3\n0,0\n1,1\n2,2\n");
        let (h, b) = parse_set_file(&text).unwrap();
        assert_eq!((h, b), (g, a));
        assert!(parse_set_file("group: 3x3\n0, 1\n").is_err());
        assert!(parse_set_file("group: 3x3\n3,0\n").is_err());
        assert!(parse_set_file("3x3\n").is_err());
    }
}
