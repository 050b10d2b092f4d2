//! Line-oriented text snapshots of a table set.
//!
//! ```text
//! RLSQ 1
//! lives <count>
//! params <alpha> <gamma> <lambda>
//! category <name>
//! q <state> <action> <value>
//! ...
//! ```
//!
//! Only nonzero values are written, states ascending and actions ascending within a
//! state. Values use the shortest decimal that round-trips the `f64`.

use std::fmt::Write as _;

use thiserror::Error;

use super::TableSet;
use crate::encoder::{StateId, NUM_STATES};
use crate::weapons::{WeaponCategory, NUM_ACTIONS};

pub const SNAPSHOT_MAGIC: &str = "RLSQ";
const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SnapshotError {
    #[error("line {line}: unsupported snapshot format version `{found}`")]
    UnsupportedVersion { line: usize, found: String },
    #[error("line {line}: malformed: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: {what} {value} out of range")]
    OutOfRange { line: usize, what: &'static str, value: u64 },
    #[error("line {line}: unexpected end of snapshot, expected {expected}")]
    Truncated { line: usize, expected: &'static str },
}

impl SnapshotError {
    pub fn line(&self) -> usize {
        match self {
            SnapshotError::UnsupportedVersion { line, .. }
            | SnapshotError::Malformed { line, .. }
            | SnapshotError::OutOfRange { line, .. }
            | SnapshotError::Truncated { line, .. } => *line,
        }
    }
}

/// Restored learning state. Traces and visit counts are not persisted.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub lives: u64,
    pub params: (f64, f64, f64),
    pub tables: TableSet,
}

pub fn write_snapshot(tables: &TableSet, lives: u64, params: (f64, f64, f64)) -> String {
    let mut out = String::new();
    let (alpha, gamma, lambda) = params;
    writeln!(out, "{SNAPSHOT_MAGIC} {FORMAT_VERSION}").unwrap();
    writeln!(out, "lives {lives}").unwrap();
    writeln!(out, "params {alpha} {gamma} {lambda}").unwrap();
    for table in tables.iter() {
        writeln!(out, "category {}", table.category().name()).unwrap();
        for (state, action, value) in table.nonzero() {
            writeln!(out, "q {state} {action} {value}").unwrap();
        }
    }
    out
}

fn malformed(line: usize, reason: impl Into<String>) -> SnapshotError {
    SnapshotError::Malformed {
        line,
        reason: reason.into(),
    }
}

fn parse_f64(token: &str, line: usize) -> Result<f64, SnapshotError> {
    let v: f64 = token
        .parse()
        .map_err(|_| malformed(line, format!("`{token}` is not a number")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(malformed(line, format!("`{token}` is not finite")))
    }
}

fn parse_u64(token: &str, line: usize) -> Result<u64, SnapshotError> {
    token
        .parse()
        .map_err(|_| malformed(line, format!("`{token}` is not a non-negative integer")))
}

pub fn parse_snapshot(text: &str) -> Result<Snapshot, SnapshotError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut next_header = |expected: &'static str| {
        let (n, l) = lines
            .next()
            .ok_or(SnapshotError::Truncated { line: 0, expected })?;
        Ok::<_, SnapshotError>((n, l.split_whitespace().collect::<Vec<_>>()))
    };

    let (n, magic) = next_header("format header").map_err(|_| SnapshotError::Truncated {
        line: 1,
        expected: "format header",
    })?;
    match magic.as_slice() {
        [m, v] if *m == SNAPSHOT_MAGIC => {
            if *v != FORMAT_VERSION.to_string() {
                return Err(SnapshotError::UnsupportedVersion { line: n, found: v.to_string() });
            }
        }
        _ => return Err(malformed(n, format!("expected `{SNAPSHOT_MAGIC} {FORMAT_VERSION}`"))),
    }

    let (n, lives_line) = next_header("lives line").map_err(|_| SnapshotError::Truncated {
        line: 2,
        expected: "lives line",
    })?;
    let lives = match lives_line.as_slice() {
        ["lives", count] => parse_u64(count, n)?,
        _ => return Err(malformed(n, "expected `lives <count>`")),
    };

    let (n, params_line) = next_header("params line").map_err(|_| SnapshotError::Truncated {
        line: 3,
        expected: "params line",
    })?;
    let params = match params_line.as_slice() {
        ["params", a, g, l] => (parse_f64(a, n)?, parse_f64(g, n)?, parse_f64(l, n)?),
        _ => return Err(malformed(n, "expected `params <alpha> <gamma> <lambda>`")),
    };

    let mut tables = TableSet::new();
    let mut seen = [false; WeaponCategory::ALL.len()];
    let mut current: Option<WeaponCategory> = None;
    let mut last_pair: Option<(usize, usize)> = None;

    for (n, line) in lines {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.as_slice() {
            [] => continue,
            ["category", name] => {
                let category: WeaponCategory = name
                    .parse()
                    .map_err(|_| malformed(n, format!("unknown category `{name}`")))?;
                if std::mem::replace(&mut seen[category.index()], true) {
                    return Err(malformed(n, format!("category `{name}` repeated")));
                }
                current = Some(category);
                last_pair = None;
            }
            ["q", state, action, value] => {
                let category = current.ok_or_else(|| malformed(n, "q line before any category"))?;
                let state = parse_u64(state, n)?;
                if state >= NUM_STATES as u64 {
                    return Err(SnapshotError::OutOfRange { line: n, what: "state", value: state });
                }
                let action = parse_u64(action, n)?;
                if action >= NUM_ACTIONS as u64 {
                    return Err(SnapshotError::OutOfRange { line: n, what: "action", value: action });
                }
                let value = parse_f64(value, n)?;
                let key = (state as usize, action as usize);
                if last_pair.is_some_and(|prev| prev >= key) {
                    return Err(malformed(n, "q entries must be strictly ascending"));
                }
                last_pair = Some(key);
                let state = StateId::new(key.0).expect("checked above");
                tables[category].set_q(state, key.1, value);
            }
            _ => return Err(malformed(n, format!("unrecognised line `{line}`"))),
        }
    }

    Ok(Snapshot { lives, params, tables })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const PARAMS: (f64, f64, f64) = (0.7, 0.5, 0.9);

    #[test]
    fn empty_tables() {
        let text = write_snapshot(&TableSet::new(), 0, PARAMS);
        assert!(text.starts_with("RLSQ 1\nlives 0\nparams 0.7 0.5 0.9\n"));
        assert!(!text.contains("\nq "));
        let snap = parse_snapshot(&text).unwrap();
        assert_eq!(snap.tables, TableSet::new());
        assert_eq!(snap.lives, 0);
        assert_eq!(snap.params, PARAMS);
    }

    #[test]
    fn single_entry() {
        let mut tables = TableSet::new();
        let s = StateId::new(701).unwrap();
        tables[WeaponCategory::SlowMoving].set_q(s, 3, 8.26);
        let text = write_snapshot(&tables, 12, PARAMS);
        assert_eq!(text.matches("\nq ").count(), 1);
        assert!(text.contains("category slow_moving\nq 701 3 8.26\n"));
        let back = parse_snapshot(&text).unwrap();
        assert!(back.tables.same_values(&tables));
        assert_eq!(back.lives, 12);
    }

    #[test]
    fn rejects_bad_documents() {
        let head = "RLSQ 1\nlives 3\nparams 0.7 0.5 0.9\n";
        let err = parse_snapshot(&format!("{head}category other\nq 1296 0 1.5\n")).unwrap_err();
        assert_eq!(err, SnapshotError::OutOfRange { line: 5, what: "state", value: 1296 });
        let err = parse_snapshot(&format!("{head}category other\nq 12 5 1.5\n")).unwrap_err();
        assert!(matches!(err, SnapshotError::OutOfRange { what: "action", .. }));
        let err = parse_snapshot("RLSQ 2\nlives 3\n").unwrap_err();
        assert!(matches!(err, SnapshotError::UnsupportedVersion { line: 1, .. }));
        let err = parse_snapshot(&format!("{head}category other\nq 12 1\n")).unwrap_err();
        assert!(matches!(err, SnapshotError::Malformed { line: 5, .. }));
        let err = parse_snapshot(&format!("{head}q 1 1 1\n")).unwrap_err();
        assert!(matches!(err, SnapshotError::Malformed { line: 4, .. }));
        let err = parse_snapshot(&format!("{head}category other\nq 1 1 nan\n")).unwrap_err();
        assert!(matches!(err, SnapshotError::Malformed { line: 5, .. }));
        let err = parse_snapshot(&format!("{head}category other\nq 2 1 1\nq 1 1 1\n")).unwrap_err();
        assert!(matches!(err, SnapshotError::Malformed { line: 6, .. }));
        let err = parse_snapshot("RLSQ 1\nlives 3\n").unwrap_err();
        assert_eq!(err, SnapshotError::Truncated { line: 3, expected: "params line" });
        let err = parse_snapshot("").unwrap_err();
        assert_eq!(err.line(), 1);
    }

    proptest! {
        #[test]
        fn round_trip_is_bit_exact(
            entries in proptest::collection::vec((0usize..6, 0usize..NUM_STATES, 0usize..NUM_ACTIONS, proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL), 0..200),
            lives in 0u64..1_000_000,
        ) {
            let mut tables = TableSet::new();
            for (c, s, a, v) in entries {
                tables[WeaponCategory::ALL[c]].set_q(StateId::new(s).unwrap(), a, v);
            }
            let text = write_snapshot(&tables, lives, PARAMS);
            let back = parse_snapshot(&text).unwrap();
            prop_assert!(back.tables.same_values(&tables));
            prop_assert_eq!(back.lives, lives);
        }
    }
}
