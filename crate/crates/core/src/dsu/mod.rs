//! Union-find engines: the classic structure and a static-tree variant whose
//! unions all follow a fixed rooted tree.

mod classic;
mod static_tree;

pub use classic::ClassicUf;
pub use static_tree::{StaticTreeMode, StaticTreeUf};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::DsuError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum UfOp {
    Union(usize, usize),
    Link(usize),
    Find(usize),
}

impl fmt::Display for UfOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            UfOp::Union(a, b) => write!(f, "U {a} {b}"),
            UfOp::Link(v) => write!(f, "L {v}"),
            UfOp::Find(v) => write!(f, "F {v}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionResult {
    pub answers: Vec<usize>,
    pub cost: u64,
}

/// Common surface of both engines, used to replay traces.
pub trait DisjointSets {
    fn apply(&mut self, op: UfOp) -> Result<Option<usize>, DsuError>;
    fn cost(&self) -> u64;
}

impl DisjointSets for ClassicUf {
    fn apply(&mut self, op: UfOp) -> Result<Option<usize>, DsuError> {
        let n = self.len();
        let check = |x: usize| if x < n { Ok(()) } else { Err(DsuError::OutOfRange { id: x, n }) };
        match op {
            UfOp::Union(a, b) => {
                check(a)?;
                check(b)?;
                self.union(a, b);
                Ok(None)
            }
            UfOp::Find(a) => {
                check(a)?;
                Ok(Some(self.find(a)))
            }
            UfOp::Link(_) => Err(DsuError::Unsupported { op: op.to_string() }),
        }
    }

    fn cost(&self) -> u64 {
        self.ops()
    }
}

impl DisjointSets for StaticTreeUf {
    fn apply(&mut self, op: UfOp) -> Result<Option<usize>, DsuError> {
        match op {
            UfOp::Link(v) => self.link(v).map(|_| None),
            UfOp::Find(v) => self.find(v).map(Some),
            UfOp::Union(..) => Err(DsuError::Unsupported { op: op.to_string() }),
        }
    }

    fn cost(&self) -> u64 {
        self.ops()
    }
}

fn replay<D: DisjointSets>(d: &mut D, ops: &[UfOp]) -> Result<SessionResult, DsuError> {
    let mut answers = Vec::new();
    for &op in ops {
        if let Some(a) = d.apply(op)? {
            answers.push(a);
        }
    }
    Ok(SessionResult { answers, cost: d.cost() })
}

pub fn classic_uf_session(n: usize, ops: &[UfOp]) -> Result<SessionResult, DsuError> {
    replay(&mut ClassicUf::new(n), ops)
}

pub fn static_tree_uf_session(parent: &[Option<usize>], ops: &[UfOp]) -> Result<SessionResult, DsuError> {
    replay(&mut StaticTreeUf::new(parent)?, ops)
}

pub fn static_tree_uf_session_with(
    parent: &[Option<usize>],
    ops: &[UfOp],
    mode: StaticTreeMode,
) -> Result<SessionResult, DsuError> {
    replay(&mut StaticTreeUf::with_mode(parent, mode)?, ops)
}

/// Rewrites every `Link(v)` as `Union(v, parent[v])`.
pub fn links_as_unions(parent: &[Option<usize>], ops: &[UfOp]) -> Vec<UfOp> {
    ops.iter()
        .map(|&op| match op {
            UfOp::Link(v) => UfOp::Union(v, parent[v].unwrap_or(v)),
            other => other,
        })
        .collect()
}

/// Parses a trace: one op per line (`L v`, `U a b`, `F v`); blank lines and
/// `#` comments are skipped.
pub fn parse_trace(text: &str) -> Result<Vec<UfOp>, DsuError> {
    let mut ops = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let bad = |msg: &str| DsuError::Trace { line: idx + 1, msg: msg.to_string() };
        let mut it = t.split_whitespace();
        let tag = it.next().unwrap_or_default();
        let mut num = || -> Result<usize, DsuError> {
            it.next()
                .ok_or_else(|| bad("missing operand"))?
                .parse()
                .map_err(|_| bad("operand is not an integer"))
        };
        let op = match tag {
            "L" => UfOp::Link(num()?),
            "F" => UfOp::Find(num()?),
            "U" => {
                let a = num()?;
                UfOp::Union(a, num()?)
            }
            _ => return Err(bad("expected L, U or F")),
        };
        ops.push(op);
    }
    Ok(ops)
}

pub fn format_trace(ops: &[UfOp]) -> String {
    let mut s = String::new();
    for op in ops {
        s.push_str(&op.to_string());
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_examples() {
        let r = classic_uf_session(3, &[UfOp::Union(0, 1), UfOp::Find(1), UfOp::Find(0), UfOp::Find(2)]).unwrap();
        assert_eq!(r.answers[0], r.answers[1]);
        assert_eq!(r.answers[2], 2);
        assert_eq!(classic_uf_session(1, &[UfOp::Find(0)]).unwrap().answers, vec![0]);
        assert!(classic_uf_session(1, &[UfOp::Find(3)]).is_err());
    }

    #[test]
    fn static_examples() {
        let parent = [None, Some(0), Some(1)];
        let ops = [UfOp::Link(2), UfOp::Find(2), UfOp::Link(1), UfOp::Find(2)];
        assert_eq!(static_tree_uf_session(&parent, &ops).unwrap().answers, vec![1, 0]);
        let classic = classic_uf_session(3, &links_as_unions(&parent, &ops)).unwrap();
        assert_eq!(classic.answers, vec![1, 0]);
    }

    #[test]
    fn trace_round_trip() {
        let ops = vec![UfOp::Link(3), UfOp::Union(1, 2), UfOp::Find(0)];
        let text = format_trace(&ops);
        assert_eq!(text, "L 3\nU 1 2\nF 0\n");
        assert_eq!(parse_trace(&text).unwrap(), ops);
        assert!(matches!(parse_trace("F\n"), Err(DsuError::Trace { line: 1, .. })));
        assert!(matches!(parse_trace("X 1"), Err(DsuError::Trace { .. })));
    }
}
