use crate::error::{Error, Result};
use crate::exact::Dyadic;
use crate::universe::{Output, StateId, Universe, UniverseBuilder, MAX_OUTPUT_LEN};

/// The abstract chain `M_1 → M_2 → …`: block `i` has `i` fair bits and
/// the walk leaves the chain exactly when the block reads `0^i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VirusChain {
    max_index: usize,
}

impl VirusChain {
    pub fn new(max_index: usize) -> Result<Self> {
        if max_index < 2 {
            return Err(Error::domain(format!(
                "max_index must be ≥ 2, got {max_index}"
            )));
        }
        Ok(Self { max_index })
    }

    pub fn max_index(&self) -> usize {
        self.max_index
    }

    /// `1 - 2^-i`.
    pub fn advance_probability(&self, i: usize) -> Dyadic {
        self.exit_probability(i).complement().expect("2^-i ≤ 1")
    }

    /// `2^-i`.
    pub fn exit_probability(&self, i: usize) -> Dyadic {
        Dyadic::pow2_neg(i as u32)
    }
}

/// Concrete virus machines next to a reference universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VirusMachines {
    pub universe: Universe,
    /// `M_1..=M_max`.
    pub machines: Vec<StateId>,
    pub reference: StateId,
}

/// Builds `M_1..M_max` with block counters. `M_i` prints `1^{i-1}`; the
/// states inside a block print Undefined. A block of zeros jumps to
/// `reference`, any other block to `M_{i+1}`; the last machine's blocks
/// loop back to itself.
pub fn virus_machines(
    max_index: usize,
    reference_universe: &Universe,
    reference: StateId,
) -> Result<VirusMachines> {
    VirusChain::new(max_index)?;
    if max_index > MAX_OUTPUT_LEN + 1 {
        return Err(Error::domain(format!(
            "max_index {max_index} would need outputs longer than {MAX_OUTPUT_LEN} bits"
        )));
    }
    reference_universe.check_state(reference)?;
    let mut b = UniverseBuilder::from_universe(reference_universe);
    let machines: Vec<StateId> = (1..=max_index)
        .map(|i| b.add_state(Output::Defined(crate::bits::BitString::repeat(true, i - 1))))
        .collect();
    for i in 1..=max_index {
        let advance = machines[i.min(max_index - 1)];
        // block[j][z]: j bits read, z = all of them were 0
        let mut block = vec![[machines[i - 1]; 2]];
        for _ in 1..i {
            block.push([
                b.add_state(Output::Undefined),
                b.add_state(Output::Undefined),
            ]);
        }
        for j in 0..i {
            for z in [false, true] {
                if j == 0 && !z {
                    continue;
                }
                let from = block[j][z as usize];
                for bit in [false, true] {
                    let zero = z && !bit;
                    let to = if j + 1 == i {
                        if zero {
                            reference
                        } else {
                            advance
                        }
                    } else {
                        block[j + 1][zero as usize]
                    };
                    b.set_edge(from, bit, to);
                }
            }
        }
    }
    let (u, map) = b.build()?.minimize();
    Ok(VirusMachines {
        machines: machines.iter().map(|m| map[m.0]).collect(),
        reference: map[reference.0],
        universe: u,
    })
}
