use std::collections::BTreeMap;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::exact::Dyadic;
use crate::universe::{Output, StateId, Universe, UniverseBuilder, MAX_OUTPUT_LEN};

/// A finite prefix-free program table `p ↦ s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixProgramTable {
    entries: Vec<(BitString, BitString)>,
}

impl PrefixProgramTable {
    pub fn new(entries: Vec<(BitString, BitString)>) -> Result<Self> {
        let mut problems = Vec::new();
        for (i, (p, s)) in entries.iter().enumerate() {
            if s.len() > MAX_OUTPUT_LEN {
                problems.push(format!(
                    "output of program {p} exceeds {MAX_OUTPUT_LEN} bits"
                ));
            }
            for (q, _) in &entries[i + 1..] {
                if p.is_prefix_of(q) || q.is_prefix_of(p) {
                    problems.push(format!("programs \"{p}\" and \"{q}\" are not prefix-free"));
                }
            }
        }
        if !problems.is_empty() {
            return Err(Error::Validation(problems));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[(BitString, BitString)] {
        &self.entries
    }

    /// `Σ_p 2^-|p|`.
    pub fn kraft_sum(&self) -> Dyadic {
        self.entries
            .iter()
            .map(|(p, _)| Dyadic::pow2_neg(p.len() as u32))
            .sum()
    }

    /// `Σ_{|p| ≤ n, p ↦ s} 2^-|p|`, the classical weight of `s` over
    /// programs of length at most `n`.
    pub fn classical_probability(&self, n: usize, s: &BitString) -> Dyadic {
        self.entries
            .iter()
            .filter(|(p, o)| p.len() <= n && o == s)
            .map(|(p, _)| Dyadic::pow2_neg(p.len() as u32))
            .sum()
    }
}

/// The prefix-constant machine `C_p`: Undefined until a program has been
/// read, then that program's output forever. Returns the minimized
/// universe and its root.
pub fn prefix_constant(table: &PrefixProgramTable) -> Result<(Universe, StateId)> {
    let mut b = UniverseBuilder::new();
    let sink = b.add_state(Output::Undefined);
    b.set_edges(sink, sink, sink);
    // trie over program prefixes
    let mut nodes: BTreeMap<BitString, StateId> = BTreeMap::new();
    let mut done: BTreeMap<BitString, StateId> = BTreeMap::new();
    for (p, s) in table.entries() {
        let q = b.add_state(Output::Defined(s.clone()));
        b.set_edges(q, q, q);
        done.insert(p.clone(), q);
        for k in 0..p.len() {
            nodes
                .entry(p.slice(0..k))
                .or_insert_with(|| b.add_state(Output::Undefined));
        }
    }
    let lookup = |x: &BitString| done.get(x).or_else(|| nodes.get(x)).copied();
    for (prefix, &n) in &nodes {
        let t0 = lookup(&prefix.pushed(false)).unwrap_or(sink);
        let t1 = lookup(&prefix.pushed(true)).unwrap_or(sink);
        b.set_edges(n, t0, t1);
    }
    let root = lookup(&BitString::empty()).unwrap_or(sink);
    let u = b.build()?;
    let (m, map) = u.minimize();
    Ok((m, map[root.0]))
}
