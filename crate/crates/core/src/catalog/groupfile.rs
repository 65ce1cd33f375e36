//! Plain-text interchange format for permutation groups.
//!
//! ```text
//! groupfile v1
//! order 120
//! degree 5
//! (1,2,3,4,5)
//! (1,2)
//! label S5
//! ```

use std::fmt;
use std::path::Path;

use crate::catalog::build::perm_from_cycles;
use crate::error::{Error, Result};
use crate::group::{cycle_notation, FiniteGroup, Naming};
use crate::limits::Limits;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupFile {
    pub order: usize,
    pub degree: usize,
    /// 0-based images of the points `0..degree`.
    pub generators: Vec<Vec<u32>>,
    pub label: Option<String>,
}

impl fmt::Display for GroupFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "groupfile v1")?;
        writeln!(f, "order {}", self.order)?;
        writeln!(f, "degree {}", self.degree)?;
        for g in &self.generators {
            writeln!(f, "{}", cycle_notation(g))?;
        }
        if let Some(label) = &self.label {
            writeln!(f, "label {label}")?;
        }
        Ok(())
    }
}

fn bad(line: usize, msg: impl Into<String>) -> Error {
    Error::GroupFile { line, msg: msg.into() }
}

fn header_value(lines: &[&str], idx: usize, key: &str) -> Result<usize> {
    let line = lines.get(idx).ok_or_else(|| bad(idx + 1, format!("missing `{key}` line")))?;
    let rest = line
        .strip_prefix(key)
        .and_then(|r| r.strip_prefix(' '))
        .ok_or_else(|| bad(idx + 1, format!("expected `{key} <n>`")))?;
    rest.trim()
        .parse::<usize>()
        .map_err(|_| bad(idx + 1, format!("`{key}` needs a non-negative integer")))
}

/// Parses one generator in disjoint-cycle notation.
fn parse_cycles(text: &str, degree: usize, line: usize) -> Result<Vec<u32>> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s == "()" {
        return Ok((0..degree as u32).collect());
    }
    let mut cycles: Vec<Vec<u32>> = Vec::new();
    let mut rest = s.as_str();
    while !rest.is_empty() {
        let body = rest.strip_prefix('(').ok_or_else(|| bad(line, "expected '('"))?;
        let close = body.find(')').ok_or_else(|| bad(line, "unclosed cycle"))?;
        let points: Vec<u32> = body[..close]
            .split(',')
            .map(|p| p.parse::<u32>().map_err(|_| bad(line, format!("bad point {p:?}"))))
            .collect::<Result<_>>()?;
        cycles.push(points);
        rest = &body[close + 1..];
    }
    if cycles.is_empty() {
        return Err(bad(line, "empty generator line"));
    }
    perm_from_cycles(degree, &cycles).map_err(|m| bad(line, m))
}

impl GroupFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines: Vec<&str> = text.lines().map(|l| l.trim_end()).collect();
        while lines.last().is_some_and(|l| l.is_empty()) {
            lines.pop();
        }
        if lines.first() != Some(&"groupfile v1") {
            return Err(bad(1, "expected `groupfile v1`"));
        }
        let order = header_value(&lines, 1, "order")?;
        let degree = header_value(&lines, 2, "degree")?;
        if order == 0 {
            return Err(bad(2, "order must be positive"));
        }
        let mut generators = Vec::new();
        let mut label = None;
        for (idx, line) in lines.iter().enumerate().skip(3) {
            let lineno = idx + 1;
            if let Some(rest) = line.strip_prefix("label") {
                if idx + 1 != lines.len() {
                    return Err(bad(lineno, "`label` must be the last line"));
                }
                if !(rest.is_empty() || rest.starts_with(' ')) {
                    return Err(bad(lineno, "expected `label <text>`"));
                }
                label = Some(rest.trim().to_string());
            } else if line.starts_with('(') {
                generators.push(parse_cycles(line, degree, lineno)?);
            } else {
                return Err(bad(lineno, format!("unexpected content {line:?}")));
            }
        }
        Ok(GroupFile { order, degree, generators, label })
    }

    /// Closes the generators and checks the declared order.
    pub fn build(&self, limits: &Limits) -> Result<FiniteGroup> {
        if self.order > limits.max_order {
            return Err(Error::Resource(format!(
                "declared order {} is above the bound {}",
                self.order, limits.max_order
            )));
        }
        let identity: Vec<u32> = (0..self.degree as u32).collect();
        let gens: Vec<Vec<u32>> = self.generators.iter().filter(|g| **g != identity).cloned().collect();
        let label = self.label.clone().unwrap_or_else(|| format!("groupfile order {}", self.order));
        // One element of slack so an oversized closure reports a mismatch rather than a bound error.
        let bound = self.order.saturating_add(1).min(limits.max_order.saturating_add(1));
        let closed = FiniteGroup::from_closure(
            label,
            identity,
            &gens,
            |p: &Vec<u32>, q: &Vec<u32>| p.iter().map(|&i| q[i as usize]).collect::<Vec<u32>>(),
            bound,
        );
        let (mut group, elements) = match closed {
            Ok(ok) => ok,
            Err(Error::Resource(_)) => {
                return Err(Error::Validation(format!(
                    "generators produce more than the declared {} elements",
                    self.order
                )))
            }
            Err(other) => return Err(other),
        };
        if group.order() != self.order {
            return Err(Error::Validation(format!(
                "declared order {} but generators produce {} elements",
                self.order,
                group.order()
            )));
        }
        group.set_naming(Naming::Permutation(elements));
        Ok(group)
    }
}

pub fn load_group_file(path: &Path, limits: &Limits) -> Result<FiniteGroup> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    GroupFile::parse(&text)?.build(limits)
}

/// The right-regular permutation representation of `g`, generated by its construction generators.
pub fn regular_group_file(g: &FiniteGroup, label: Option<String>) -> GroupFile {
    let generators = g
        .generators()
        .iter()
        .map(|&s| g.elements().map(|x| g.mul(x, s)).collect())
        .collect();
    GroupFile { order: g.order(), degree: g.order(), generators, label }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_s5_and_c2() {
        let s5 = GroupFile::parse("groupfile v1\norder 120\ndegree 5\n(1,2,3,4,5)\n(1,2)\n").unwrap();
        assert_eq!(s5.build(&Limits::default()).unwrap().order(), 120);
        let c2 = GroupFile::parse("groupfile v1\norder 2\ndegree 2\n(1,2)\nlabel C2\n").unwrap();
        let g = c2.build(&Limits::default()).unwrap();
        assert_eq!(g.order(), 2);
        assert_eq!(g.label(), "C2");
    }

    #[test]
    fn order_mismatch_is_reported() {
        let f = GroupFile::parse("groupfile v1\norder 60\ndegree 5\n(1,2,3,4,5)\n(1,2)\n").unwrap();
        assert!(matches!(f.build(&Limits::default()), Err(Error::Validation(_))));
        let f = GroupFile::parse("groupfile v1\norder 6\ndegree 3\n(1,2)\n").unwrap();
        assert!(matches!(f.build(&Limits::default()), Err(Error::Validation(_))));
    }

    #[test]
    fn malformed_files_are_rejected() {
        for (text, line) in [
            ("groupfile v2\norder 2\ndegree 2\n(1,2)\n", 1),
            ("groupfile v1\norder two\ndegree 2\n(1,2)\n", 2),
            ("groupfile v1\norder 2\ndegree 2\n(1,2)\nlabel C2\n(1,2)\n", 5),
            ("groupfile v1\norder 2\ndegree 2\n(1,2)\ngarbage\n", 5),
            ("groupfile v1\norder 2\ndegree 2\n(1,3)\n", 4),
            ("groupfile v1\norder 2\ndegree 2\n(1,2)(2)\n", 4),
            ("groupfile v1\norder 2\ndegree 2\n(1,2\n", 4),
            ("groupfile v1\norder 2\n", 3),
        ] {
            match GroupFile::parse(text) {
                Err(Error::GroupFile { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?} gave {other:?}"),
            }
        }
    }

    #[test]
    fn write_then_parse_round_trips() {
        let s5 = GroupFile::parse("groupfile v1\norder 120\ndegree 5\n(1,2,3,4,5)\n(1,2)\nlabel S5\n").unwrap();
        assert_eq!(GroupFile::parse(&s5.to_string()).unwrap(), s5);
    }

    #[test]
    fn regular_representation_rebuilds_the_group() {
        let g = crate::catalog::group("D6").unwrap();
        let file = regular_group_file(&g, Some("D6".into()));
        let rebuilt = GroupFile::parse(&file.to_string()).unwrap().build(&Limits::default()).unwrap();
        assert_eq!(rebuilt.order(), 12);
        assert!(!rebuilt.is_abelian());
    }
}
