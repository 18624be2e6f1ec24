//! The universe file format.
//!
//! ```json
//! {"version":1,
//!  "states":[{"id":0,"out":"0","t0":0,"t1":1}, ...],
//!  "sets":{"name":[0,1]}}
//! ```
//!
//! Ids must run `0..N-1` in file order, `"out": null` encodes Undefined and
//! unknown fields are rejected. [`serialize`] emits one canonical layout, so
//! `serialize(load(t)) == t` for canonical files.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::de::{self, Deserializer};
use serde::Deserialize;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::universe::{Output, StateId, Universe, MAX_OUTPUT_LEN};

pub const FORMAT_VERSION: u64 = 1;

/// A universe together with the named computer sets stored next to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniverseFile {
    pub universe: Universe,
    pub sets: BTreeMap<String, Vec<StateId>>,
}

impl UniverseFile {
    pub fn new(universe: Universe) -> Self {
        Self {
            universe,
            sets: BTreeMap::new(),
        }
    }

    pub fn with_set(mut self, name: &str, members: Vec<StateId>) -> Self {
        self.sets.insert(name.to_string(), members);
        self
    }

    /// A named set; `all` falls back to every state when not stored.
    pub fn set(&self, name: &str) -> Result<Vec<StateId>> {
        match self.sets.get(name) {
            Some(m) => Ok(m.clone()),
            None if name == "all" => Ok(self.universe.states().collect()),
            None => Err(Error::domain(format!("no set named \"{name}\" in file"))),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    version: u64,
    states: Vec<RawState>,
    #[serde(default)]
    sets: BTreeMap<String, Vec<i64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawState {
    id: i64,
    out: OutField,
    t0: Option<i64>,
    t1: Option<i64>,
}

struct OutField(Output);

impl<'de> Deserialize<'de> for OutField {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw: Option<String> = Option::deserialize(d)?;
        match raw {
            None => Ok(OutField(Output::Undefined)),
            Some(s) => {
                if let Some(c) = s.chars().find(|c| *c != '0' && *c != '1') {
                    return Err(de::Error::custom(format!(
                        "output \"{s}\" contains non-bit character '{c}'"
                    )));
                }
                if s.len() > MAX_OUTPUT_LEN {
                    return Err(de::Error::custom(format!(
                        "output has {} bits, limit is {MAX_OUTPUT_LEN}",
                        s.len()
                    )));
                }
                let bits: BitString = s.parse().map_err(de::Error::custom)?;
                Ok(OutField(Output::Defined(bits)))
            }
        }
    }
}

/// Parses and validates a universe file.
pub fn load(text: &str) -> Result<UniverseFile> {
    let raw: RawFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;

    let mut problems = Vec::new();
    if raw.version != FORMAT_VERSION {
        problems.push(format!(
            "unsupported version {} (expected {FORMAT_VERSION})",
            raw.version
        ));
    }
    let n = raw.states.len();
    if n == 0 {
        problems.push("no states".to_string());
    }
    let in_range = |v: i64| v >= 0 && (v as usize) < n;
    let mut next = Vec::with_capacity(n);
    let mut out = Vec::with_capacity(n);
    for (pos, s) in raw.states.into_iter().enumerate() {
        if s.id != pos as i64 {
            problems.push(format!(
                "state at position {pos} has id {} (ids must be 0..N-1 in order)",
                s.id
            ));
        }
        let mut edge = |name: &str, t: Option<i64>| match t {
            None => {
                problems.push(format!("state {}: missing {name}", s.id));
                StateId(0)
            }
            Some(v) if !in_range(v) => {
                problems.push(format!("state {}: {name} = {v} is not a state id", s.id));
                StateId(0)
            }
            Some(v) => StateId(v as usize),
        };
        let t0 = edge("t0", s.t0);
        let t1 = edge("t1", s.t1);
        next.push([t0, t1]);
        out.push(s.out.0);
    }
    let mut sets = BTreeMap::new();
    for (name, members) in raw.sets {
        let mut ids = Vec::with_capacity(members.len());
        for m in members {
            if !in_range(m) {
                problems.push(format!("set \"{name}\": {m} is not a state id"));
            } else if ids.contains(&StateId(m as usize)) {
                problems.push(format!("set \"{name}\": duplicate member {m}"));
            } else {
                ids.push(StateId(m as usize));
            }
        }
        sets.insert(name, ids);
    }
    if !problems.is_empty() {
        return Err(Error::Validation(problems));
    }
    let universe = Universe::new(next, out)?;
    Ok(UniverseFile { universe, sets })
}

/// Canonical rendering: one state per line, sets in name order.
pub fn serialize(file: &UniverseFile) -> String {
    let u = &file.universe;
    let mut s = String::new();
    s.push_str("{\n  \"version\": 1,\n  \"states\": [\n");
    for q in u.states() {
        let out = match u.output(q) {
            Output::Defined(b) => format!("\"{b}\""),
            Output::Undefined => "null".to_string(),
        };
        let [t0, t1] = u.successors(q);
        let sep = if q.0 + 1 < u.len() { "," } else { "" };
        let _ = writeln!(
            s,
            "    {{\"id\": {q}, \"out\": {out}, \"t0\": {t0}, \"t1\": {t1}}}{sep}"
        );
    }
    s.push_str("  ],\n");
    if file.sets.is_empty() {
        s.push_str("  \"sets\": {}\n");
    } else {
        s.push_str("  \"sets\": {\n");
        let last = file.sets.len() - 1;
        for (i, (name, members)) in file.sets.iter().enumerate() {
            let ids: Vec<String> = members.iter().map(|m| m.to_string()).collect();
            let sep = if i < last { "," } else { "" };
            let key = serde_json::to_string(name).expect("string keys always serialize");
            let _ = writeln!(s, "    {key}: [{}]{sep}", ids.join(", "));
        }
        s.push_str("  }\n");
    }
    s.push_str("}\n");
    s
}

pub fn load_path(path: &std::path::Path) -> Result<UniverseFile> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    load(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_STATE: &str = r#"{
  "version": 1,
  "states": [
    {"id": 0, "out": "0", "t0": 0, "t1": 1},
    {"id": 1, "out": "1", "t0": 0, "t1": 0}
  ],
  "sets": {
    "all": [0, 1]
  }
}
"#;

    #[test]
    fn canonical_round_trip() {
        let f = load(TWO_STATE).unwrap();
        assert_eq!(f.universe.len(), 2);
        assert!(f.universe.is_minimized());
        assert_eq!(serialize(&f), TWO_STATE);
    }

    #[test]
    fn missing_edge_is_a_validation_error() {
        let t = r#"{"version":1,"states":[{"id":0,"out":"0","t0":0}]}"#;
        match load(t) {
            Err(Error::Validation(v)) => assert!(v[0].contains("missing t1"), "{v:?}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_bit_output_is_a_parse_error() {
        let t = "{\"version\":1,\n\"states\":[{\"id\":0,\"out\":\"2a\",\"t0\":0,\"t1\":0}]}";
        match load(t) {
            Err(Error::Parse { line, message, .. }) => {
                assert_eq!(line, 2);
                assert!(message.contains("non-bit"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_unknown_fields_duplicates_and_ranges() {
        let unknown = r#"{"version":1,"states":[{"id":0,"out":null,"t0":0,"t1":0,"t2":0}]}"#;
        assert!(matches!(load(unknown), Err(Error::Parse { .. })));

        let dup = r#"{"version":1,"states":[
            {"id":0,"out":null,"t0":0,"t1":0},
            {"id":0,"out":"1","t0":0,"t1":9}]}"#;
        match load(dup) {
            Err(Error::Validation(v)) => assert_eq!(v.len(), 2, "{v:?}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn null_output_and_empty_sets() {
        let t = r#"{"version":1,"states":[{"id":0,"out":null,"t0":0,"t1":0}]}"#;
        let f = load(t).unwrap();
        assert_eq!(*f.universe.output(StateId(0)), Output::Undefined);
        let canon = serialize(&f);
        assert!(canon.contains("\"sets\": {}"));
        assert_eq!(load(&canon).unwrap(), f);
        assert_eq!(f.set("all").unwrap(), vec![StateId(0)]);
        assert!(f.set("nope").is_err());
    }
}
