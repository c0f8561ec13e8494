//! Update scripts for the dynamic self-join: text lines `I x y` to
//! insert and `D x y` to delete, values as opaque strings interned on
//! first sight.

use anyhow::{bail, Result};
use qenum_core::selfjoin::{SelfJoinIndex, UpdateReport};
use qenum_core::{Map, OpClock, Vid};

/// A parsed script plus the value interner built while parsing.
pub struct Script {
    pub ops: Vec<(bool, Vid, Vid)>,
    forward: Map<String, Vid>,
    inverse: Vec<String>,
}

impl Script {
    pub fn parse(text: &str) -> Result<Script> {
        let mut script = Script {
            ops: Vec::new(),
            forward: Map::default(),
            inverse: Vec::new(),
        };
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (op, x, y) = match (parts.next(), parts.next(), parts.next(), parts.next()) {
                (Some(op), Some(x), Some(y), None) => (op, x, y),
                _ => bail!("line {}: expected `I x y` or `D x y`", idx + 1),
            };
            let insert = match op {
                "I" | "i" => true,
                "D" | "d" => false,
                other => bail!("line {}: unknown op {other:?}", idx + 1),
            };
            let x = script.intern(x);
            let y = script.intern(y);
            script.ops.push((insert, x, y));
        }
        Ok(script)
    }

    fn intern(&mut self, v: &str) -> Vid {
        if let Some(&id) = self.forward.get(v) {
            return id;
        }
        let id = (self.inverse.len() + 1) as Vid;
        self.forward.insert(v.to_string(), id);
        self.inverse.push(v.to_string());
        id
    }

    pub fn value(&self, id: Vid) -> &str {
        &self.inverse[(id - 1) as usize]
    }
}

/// Apply the script, returning the index, per-update reports and total
/// update ticks.
pub fn apply(script: &Script) -> (SelfJoinIndex, Vec<UpdateReport>, u64) {
    let mut idx = SelfJoinIndex::new();
    let mut clock = OpClock::new();
    let reports = qenum_core::selfjoin::apply_script(&mut idx, &script.ops, &mut clock);
    let total = clock.now();
    (idx, reports, total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_applies() {
        let script = Script::parse("I a b\nI c b\nD a b\n").unwrap();
        assert_eq!(script.ops.len(), 3);
        let (idx, reports, _ticks) = apply(&script);
        assert!(reports.iter().all(|r| r.applied));
        assert_eq!(idx.diagonal().len(), 1);
        assert_eq!(script.value(idx.diagonal()[0]), "c");
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(Script::parse("I a\n").is_err());
        assert!(Script::parse("X a b\n").is_err());
    }
}
