//! Explicit computers: test fixtures, prefix machines, the `U_bad` and
//! virus constructions, synchronizing words, transformations, quotients
//! and closures.

mod bad;
mod closure;
pub mod fixtures;
mod prefix;
mod quotient;
mod sync;
mod transforms;
mod virus;

use std::sync::Arc;

pub use bad::adjoin_bad;
pub use closure::{
    close_under, input_closed, input_symmetry_group, output_closed, Closure, HypothesisCheck,
    Transform,
};
pub use prefix::{prefix_constant, PrefixProgramTable};
pub use quotient::{completeness_violations, quotient_k, Quotient};
pub use sync::{synchronizing_universe, SyncConstruction};
pub use transforms::{
    fixes_computer, input_transform, k_equivalent_across, output_transform,
    transformed_k_equivalent, InputPermutationTable, OutputPermutation, MAX_INPUT_ORDER,
};
pub use virus::{virus_machines, VirusChain, VirusMachines};

use crate::emulation::ComputerSet;
use crate::universe::Universe;

/// The four-state toggle universe and its full computer set.
pub fn toggle_universe() -> (Arc<Universe>, ComputerSet) {
    fixtures::toggle()
}
