use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::universe::{same_function, Output, StateId, Universe, UniverseBuilder};

/// A bijection on outputs that fixes Undefined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OutputPermutation {
    /// Bitwise complement of every defined output (an involution on all
    /// of `{0,1}*`).
    Complement,
    /// A bijection on a declared finite alphabet.
    Table(BTreeMap<Output, Output>),
}

impl OutputPermutation {
    pub fn table(pairs: impl IntoIterator<Item = (Output, Output)>) -> Result<Self> {
        let map: BTreeMap<Output, Output> = pairs.into_iter().collect();
        let mut problems = Vec::new();
        let keys: BTreeSet<&Output> = map.keys().collect();
        let values: BTreeSet<&Output> = map.values().collect();
        if values.len() != map.len() {
            problems.push("two outputs share an image".to_string());
        }
        if keys != values {
            problems.push("image set differs from the declared alphabet".to_string());
        }
        if let Some(v) = map.get(&Output::Undefined) {
            if *v != Output::Undefined {
                problems.push("Undefined must map to Undefined".to_string());
            }
        }
        if !problems.is_empty() {
            return Err(Error::Validation(problems));
        }
        Ok(OutputPermutation::Table(map))
    }

    pub fn identity(alphabet: impl IntoIterator<Item = Output>) -> Self {
        OutputPermutation::Table(alphabet.into_iter().map(|o| (o.clone(), o)).collect())
    }

    /// `o_0 → o_1 → … → o_{k-1} → o_0`.
    pub fn cycle(outputs: &[Output]) -> Result<Self> {
        let k = outputs.len();
        Self::table((0..k).map(|i| (outputs[i].clone(), outputs[(i + 1) % k].clone())))
    }

    pub fn apply(&self, o: &Output) -> Result<Output> {
        match (self, o) {
            (_, Output::Undefined) => Ok(Output::Undefined),
            (OutputPermutation::Complement, Output::Defined(b)) => {
                Ok(Output::Defined(b.complement()))
            }
            (OutputPermutation::Table(t), _) => t.get(o).cloned().ok_or_else(|| {
                Error::domain(format!("output {o} is outside the permutation's alphabet"))
            }),
        }
    }

    pub fn inverse(&self) -> Self {
        match self {
            OutputPermutation::Complement => OutputPermutation::Complement,
            OutputPermutation::Table(t) => {
                OutputPermutation::Table(t.iter().map(|(a, b)| (b.clone(), a.clone())).collect())
            }
        }
    }

    /// `s, σ(s), σ²(s), …` up to the first repeat.
    pub fn orbit(&self, s: &Output) -> Result<Vec<Output>> {
        let mut orbit = vec![s.clone()];
        loop {
            let next = self.apply(orbit.last().expect("non-empty"))?;
            if next == *s {
                return Ok(orbit);
            }
            orbit.push(next);
        }
    }
}

impl fmt::Display for OutputPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OutputPermutation::Complement => f.write_str("complement"),
            OutputPermutation::Table(t) => {
                let parts: Vec<String> = t
                    .iter()
                    .map(|(a, b)| format!("{}->{}", a.token(), b.token()))
                    .collect();
                f.write_str(&parts.join(","))
            }
        }
    }
}

/// Either `complement` or one `from to` pair of output tokens per line.
impl FromStr for OutputPermutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lines: Vec<(usize, &str)> = s
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .collect();
        if let [(_, "complement")] = lines.as_slice() {
            return Ok(OutputPermutation::Complement);
        }
        let mut pairs = Vec::new();
        for (line, l) in lines {
            let parse_err = |message: String| Error::Parse {
                line,
                column: 1,
                message,
            };
            let (a, b) = l
                .split_whitespace()
                .collect_tuple()
                .ok_or_else(|| parse_err(format!("expected \"from to\", got \"{l}\"")))?;
            let a: Output = a.parse().map_err(|e: Error| parse_err(e.to_string()))?;
            let b: Output = b.parse().map_err(|e: Error| parse_err(e.to_string()))?;
            pairs.push((a, b));
        }
        Self::table(pairs)
    }
}

/// Relabels every output through `σ`. Transitions and ids are unchanged,
/// so the returned map is the identity.
pub fn output_transform(
    u: &Universe,
    sigma: &OutputPermutation,
) -> Result<(Universe, Vec<StateId>)> {
    let outs = u
        .outputs()
        .iter()
        .map(|o| sigma.apply(o))
        .collect::<Result<Vec<_>>>()?;
    let next = u.states().map(|q| u.successors(q)).collect();
    Ok((Universe::new(next, outs)?, u.states().collect()))
}

/// A bijection on `{0,1}^n`, acting on the last `n` bits of an input.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InputPermutationTable {
    order: usize,
    /// `table[x]` is the image of the block with big-endian index `x`.
    table: Vec<u32>,
}

pub const MAX_INPUT_ORDER: usize = 16;

impl InputPermutationTable {
    pub fn new(order: usize, table: Vec<u32>) -> Result<Self> {
        let mut problems = Vec::new();
        if order == 0 || order > MAX_INPUT_ORDER {
            problems.push(format!(
                "order must lie in 1..={MAX_INPUT_ORDER}, got {order}"
            ));
        } else if table.len() != 1 << order {
            problems.push(format!(
                "order {order} needs {} entries, got {}",
                1 << order,
                table.len()
            ));
        } else {
            let mut seen = vec![false; table.len()];
            for (x, &y) in table.iter().enumerate() {
                match seen.get_mut(y as usize) {
                    None => problems.push(format!("image {y} of block {x} is out of range")),
                    Some(s) if *s => problems.push(format!("image {y} is hit twice")),
                    Some(s) => *s = true,
                }
            }
        }
        if !problems.is_empty() {
            return Err(Error::Validation(problems));
        }
        Ok(Self { order, table })
    }

    pub fn identity(order: usize) -> Result<Self> {
        Self::new(order, (0..1u32 << order.min(MAX_INPUT_ORDER)).collect())
    }

    /// The order-1 bit flip.
    pub fn flip() -> Self {
        Self::new(1, vec![1, 0]).expect("flip is a permutation")
    }

    /// Every table of the given order, identity first.
    pub fn all(order: usize) -> Result<Vec<Self>> {
        if order == 0 || order > 3 {
            return Err(Error::Resource(format!(
                "enumerating all input permutations of order {order} is unsupported (max 3)"
            )));
        }
        let size = 1u32 << order;
        Ok((0..size)
            .permutations(size as usize)
            .map(|t| Self { order, table: t })
            .collect())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_identity(&self) -> bool {
        self.table.iter().enumerate().all(|(x, &y)| x as u32 == y)
    }

    /// Some block has its first bit changed.
    pub fn is_proper(&self) -> bool {
        let top = 1u32 << (self.order - 1);
        self.table
            .iter()
            .enumerate()
            .any(|(x, &y)| (x as u32 ^ y) & top != 0)
    }

    /// `σ` on a block of exactly `order` bits.
    pub fn apply_block(&self, block: &BitString) -> BitString {
        debug_assert_eq!(block.len(), self.order);
        BitString::from_index(self.table[block.to_index() as usize] as u64, self.order)
    }

    /// `I_σ(s)`: `σ` applied to the last `order` bits, identity on shorter inputs.
    pub fn apply(&self, s: &BitString) -> BitString {
        if s.len() < self.order {
            return s.clone();
        }
        let cut = s.len() - self.order;
        s.slice(0..cut)
            .concat(&self.apply_block(&s.slice(cut..s.len())))
    }
}

impl fmt::Display for InputPermutationTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .table
            .iter()
            .enumerate()
            .map(|(x, &y)| {
                format!(
                    "{}->{}",
                    BitString::from_index(x as u64, self.order),
                    BitString::from_index(y as u64, self.order)
                )
            })
            .collect();
        f.write_str(&parts.join(","))
    }
}

/// One `from to` pair of equal-length blocks per line.
impl FromStr for InputPermutationTable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut order = None;
        let mut pairs = Vec::new();
        for (i, l) in s.lines().enumerate() {
            let l = l.trim();
            if l.is_empty() || l.starts_with('#') {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                line: i + 1,
                column: 1,
                message,
            };
            let (a, b) = l
                .split_whitespace()
                .collect_tuple()
                .ok_or_else(|| parse_err(format!("expected \"from to\", got \"{l}\"")))?;
            let a: BitString = a.parse().map_err(|e: Error| parse_err(e.to_string()))?;
            let b: BitString = b.parse().map_err(|e: Error| parse_err(e.to_string()))?;
            let n = *order.get_or_insert(a.len());
            if a.len() != n || b.len() != n || n == 0 || n > MAX_INPUT_ORDER {
                return Err(parse_err(format!(
                    "blocks must all have the same length 1..={MAX_INPUT_ORDER}"
                )));
            }
            pairs.push((a.to_index() as usize, b.to_index() as u32));
        }
        let n = order.ok_or_else(|| Error::Parse {
            line: 1,
            column: 1,
            message: "empty permutation table".into(),
        })?;
        let mut table = vec![u32::MAX; 1 << n];
        let mut problems = Vec::new();
        for (x, y) in pairs {
            if table[x] != u32::MAX {
                problems.push(format!(
                    "block {} listed twice",
                    BitString::from_index(x as u64, n)
                ));
            }
            table[x] = y;
        }
        if table.contains(&u32::MAX) {
            problems.push("some block has no image".into());
        }
        if !problems.is_empty() {
            return Err(Error::Validation(problems));
        }
        Self::new(n, table)
    }
}

/// `I_σ(C)` for every state `C`, as a delay line: a state `(q, buf)` has
/// fed everything but the last `|buf| ≤ n` bits into `q`. The result is
/// minimized; the map sends `C` to `(C, λ)`.
pub fn input_transform(
    u: &Universe,
    sigma: &InputPermutationTable,
) -> Result<(Universe, Vec<StateId>)> {
    let n = sigma.order();
    if n > 10 {
        return Err(Error::Resource(format!(
            "delay line of order {n} is too large"
        )));
    }
    let per = (1usize << (n + 1)) - 1;
    let id = |q: StateId, buf: &BitString| {
        StateId(q.0 * per + (1 << buf.len()) - 1 + buf.to_index() as usize)
    };
    let buffers: Vec<BitString> = (0..=n).flat_map(BitString::all_of_len).collect();
    let mut b = UniverseBuilder::new();
    for q in u.states() {
        for buf in &buffers {
            let fed = if buf.len() == n {
                sigma.apply_block(buf)
            } else {
                buf.clone()
            };
            let s = b.add_state(u.output(u.run(q, &fed)).clone());
            debug_assert_eq!(s, id(q, buf));
        }
    }
    for q in u.states() {
        for buf in &buffers {
            for bit in [false, true] {
                let to = if buf.len() < n {
                    id(q, &buf.pushed(bit))
                } else {
                    let head = buf.bits()[0];
                    id(u.step(q, head), &buf.slice(1..n).pushed(bit))
                };
                b.set_edge(id(q, buf), bit, to);
            }
        }
    }
    let (m, map) = b.build()?.minimize();
    let images = u
        .states()
        .map(|q| map[id(q, &BitString::empty()).0])
        .collect();
    Ok((m, images))
}

/// Whether `a:ca` and `b:cb` agree on every input of length ≥ `k`.
pub fn k_equivalent_across(a: &Universe, ca: StateId, b: &Universe, cb: StateId, k: usize) -> bool {
    let mut layer: HashSet<(StateId, StateId)> = HashSet::from([(ca, cb)]);
    for _ in 0..k {
        layer = layer
            .iter()
            .flat_map(|&(p, q)| [false, true].map(|bit| (a.step(p, bit), b.step(q, bit))))
            .collect();
    }
    layer.into_iter().all(|(p, q)| same_function(a, p, b, q))
}

/// Whether `I_σ(C) = C` as functions, checked directly: for every state
/// `q` reachable from `c` and every block `z`, `q` must print the same
/// after `σ(z)` as after `z`. This is also exactly `|σ|`-equivalence.
pub fn fixes_computer(u: &Universe, c: StateId, sigma: &InputPermutationTable) -> bool {
    let reach = u.reachable_from([c]);
    let blocks: Vec<BitString> = BitString::all_of_len(sigma.order()).collect();
    u.states().filter(|q| reach[q.0]).all(|q| {
        blocks
            .iter()
            .all(|z| u.output(u.run(q, z)) == u.output(u.run(q, &sigma.apply_block(z))))
    })
}

/// `I_σ(C)` is `k`-equivalent to `d`, for `k ≥ |σ|`, checked without
/// building the delay line.
pub fn transformed_k_equivalent(
    u: &Universe,
    c: StateId,
    sigma: &InputPermutationTable,
    d: StateId,
    k: usize,
) -> bool {
    debug_assert!(k >= sigma.order());
    let n = sigma.order();
    // pairs (step*(c,y), step*(d,y)) over all y
    let mut seen = HashSet::from([(c, d)]);
    let mut stack = vec![(c, d)];
    while let Some((p, q)) = stack.pop() {
        for bit in [false, true] {
            let nxt = (u.step(p, bit), u.step(q, bit));
            if seen.insert(nxt) {
                stack.push(nxt);
            }
        }
    }
    let words: Vec<BitString> = BitString::all_of_len(k).collect();
    seen.into_iter().all(|(p, q)| {
        words.iter().all(|w| {
            let head = w.slice(0..k - n);
            let tail = sigma.apply_block(&w.slice(k - n..k));
            u.output(u.run(p, &head.concat(&tail))) == u.output(u.run(q, w))
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::fixtures;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn out(s: &str) -> Output {
        s.parse().unwrap()
    }

    #[test]
    fn output_permutation_basics() {
        let swap = OutputPermutation::table([(out("0"), out("1")), (out("1"), out("0"))]).unwrap();
        assert_eq!(swap.apply(&out("0")).unwrap(), out("1"));
        assert_eq!(swap.apply(&Output::Undefined).unwrap(), Output::Undefined);
        assert!(matches!(swap.apply(&out("00")), Err(Error::Domain(_))));
        assert!(OutputPermutation::table([(out("0"), out("1"))]).is_err());
        assert_eq!(
            OutputPermutation::Complement.apply(&out("01")).unwrap(),
            out("10")
        );
        let cyc = OutputPermutation::cycle(&[out("0"), out("1"), out("00")]).unwrap();
        assert_eq!(cyc.orbit(&out("1")).unwrap().len(), 3);
        assert_eq!(cyc.inverse().apply(&out("0")).unwrap(), out("00"));
        assert_eq!(
            "complement".parse::<OutputPermutation>().unwrap(),
            OutputPermutation::Complement
        );
        assert_eq!("0 1\n1 0\n".parse::<OutputPermutation>().unwrap(), swap);
    }

    #[test]
    fn output_transform_examples() {
        let u = fixtures::two_state();
        let id = OutputPermutation::identity(u.output_alphabet());
        assert_eq!(output_transform(&u, &id).unwrap().0, u);
        let (w, _) = output_transform(&u, &OutputPermutation::Complement).unwrap();
        assert_eq!(*w.output(StateId(0)), out("1"));
        assert_eq!(*w.output(StateId(1)), out("0"));

        // labeling id maps onto labeling neg in the toggle universe
        let (t, _) = fixtures::toggle();
        let (c, _) = output_transform(&t, &OutputPermutation::Complement).unwrap();
        assert!(same_function(&c, StateId(0), &t, StateId(2)));
        assert!(same_function(&c, StateId(1), &t, StateId(3)));
    }

    #[test]
    fn input_table_validation_and_action() {
        assert!(InputPermutationTable::new(1, vec![0, 0]).is_err());
        assert!(InputPermutationTable::new(2, vec![0, 1]).is_err());
        let f = InputPermutationTable::flip();
        assert!(f.is_proper() && !f.is_identity());
        assert_eq!(f.apply(&bs("0110")), bs("0111"));
        assert_eq!(f.apply(&bs("")), bs(""));
        let swap_last = InputPermutationTable::new(2, vec![1, 0, 3, 2]).unwrap();
        assert!(!swap_last.is_proper());
        assert_eq!(InputPermutationTable::all(2).unwrap().len(), 24);
        assert!(InputPermutationTable::all(4).is_err());
        let parsed: InputPermutationTable = "0 1\n1 0".parse().unwrap();
        assert_eq!(parsed, f);
        assert!("0 1\n0 0".parse::<InputPermutationTable>().is_err());
    }

    #[test]
    fn delay_line_realizes_the_transform() {
        let u = fixtures::two_state();
        for sigma in InputPermutationTable::all(2).unwrap() {
            let (w, map) = input_transform(&u, &sigma).unwrap();
            assert!(w.len() <= u.len() * 8);
            for c in u.states() {
                for x in (0..6).flat_map(BitString::all_of_len) {
                    assert_eq!(
                        w.evaluate(map[c.0], &x).unwrap(),
                        u.evaluate(c, &sigma.apply(&x)).unwrap()
                    );
                }
            }
        }
        let id = InputPermutationTable::identity(2).unwrap();
        let (w, map) = input_transform(&u, &id).unwrap();
        assert!(same_function(&w, map[0], &u, StateId(0)));
    }

    #[test]
    fn toggle_is_fixed_by_the_flip() {
        let (t, _) = fixtures::toggle();
        let f = InputPermutationTable::flip();
        let (w, map) = input_transform(&t, &f).unwrap();
        for c in t.states() {
            assert!(k_equivalent_across(&w, map[c.0], &t, c, 1));
            assert!(same_function(&w, map[c.0], &t, c));
            assert!(fixes_computer(&t, c, &f));
            assert!(transformed_k_equivalent(&t, c, &f, c, 1));
        }
        let two = fixtures::two_state();
        assert!(!fixes_computer(&two, StateId(0), &f));
        assert!(!transformed_k_equivalent(
            &two,
            StateId(0),
            &f,
            StateId(0),
            1
        ));
        assert!(!transformed_k_equivalent(
            &two,
            StateId(0),
            &f,
            StateId(1),
            1
        ));
    }
}
