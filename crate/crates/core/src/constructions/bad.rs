use crate::bits::BitString;
use crate::error::Result;
use crate::universe::{Output, StateId, Universe, UniverseBuilder};

/// Adjoins `U_bad` to `u`: Undefined on λ, `s` on input "0", Undefined on
/// every longer input starting with 0, and `nice` after a leading 1.
/// Returns the minimized universe and the new root.
pub fn adjoin_bad(u: &Universe, nice: StateId, s: &BitString) -> Result<(Universe, StateId)> {
    u.check_state(nice)?;
    let mut b = UniverseBuilder::from_universe(u);
    let root = b.add_state(Output::Undefined);
    let shout = b.add_state(Output::Defined(s.clone()));
    let sink = b.add_state(Output::Undefined);
    b.set_edges(root, shout, nice);
    b.set_edges(shout, sink, sink);
    b.set_edges(sink, sink, sink);
    let (m, map) = b.build()?.minimize();
    Ok((m, map[root.0]))
}
