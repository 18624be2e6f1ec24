//! Exact emulation Markov chains over finitely-presented computer
//! universes.
//!
//! A [`Universe`] is a total bit-transition system with one output per
//! state; a state denotes the computer `x ↦ out(step*(q, x))`. On a
//! minimized universe, emulation is reachability, and a fair random walk
//! over the inputs that keep a computer inside a set `Φ` is a finite
//! Markov chain whose stationary vector is computed exactly.

pub mod bits;
pub mod cli;
pub mod constructions;
pub mod emulation;
pub mod error;
pub mod exact;
pub mod export;
pub mod format;
pub mod graph;
pub mod markov;
pub mod probability;
pub mod random;
pub mod universe;
pub mod verify;

pub use bits::BitString;
pub use emulation::{Complexity, ComputerSet, Period};
pub use error::{Error, Result};
pub use exact::{Dyadic, Rational};
pub use universe::{Output, StateId, Universe};
