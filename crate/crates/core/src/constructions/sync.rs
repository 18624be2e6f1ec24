use std::sync::Arc;

use crate::bits::BitString;
use crate::emulation::ComputerSet;
use crate::error::{Error, Result};
use crate::universe::{StateId, Universe, UniverseBuilder};

/// The product of a base universe with a last-bits window that resets on
/// every occurrence of a word.
#[derive(Debug, Clone)]
pub struct SyncConstruction {
    pub universe: Arc<Universe>,
    pub phi: ComputerSet,
    /// The reset target `V`.
    pub reference: StateId,
    pub word: BitString,
    /// Whether `closure_universal(Φ)` came out equal to `Φ`.
    pub closure_matches: bool,
}

/// States are pairs `(q, w)` with `w` the last `|u| - 1` bits. Reading `b`
/// moves to `(step(q,b), tail(w b))` unless `w b = u`, in which case it
/// moves to `V = (U, tail(u))`, where `U` is the first universal state of
/// the minimized base. `Φ` is the universal part of what `V` reaches.
pub fn synchronizing_universe(word: &BitString, base: &Universe) -> Result<SyncConstruction> {
    let l = word.len();
    if l < 2 {
        return Err(Error::domain(format!(
            "synchronizing word needs length ≥ 2, got {l}"
        )));
    }
    if l > 16 {
        return Err(Error::Resource(format!("window of {l} bits is too large")));
    }
    let (base, _) = base.minimize();
    let base = Arc::new(base);
    let universal = ComputerSet::all(Arc::clone(&base))?.universal_members();
    let &top = universal
        .members()
        .first()
        .ok_or_else(|| Error::domain("base universe has no universal state"))?;

    let w = l - 1;
    let windows = 1usize << w;
    let id = |q: StateId, win: usize| StateId(q.0 * windows + win);
    let target = word.to_index() as usize;
    let tail = |x: usize| x & (windows - 1);
    let v = id(top, tail(target));

    let mut b = UniverseBuilder::new();
    for q in base.states() {
        for _ in 0..windows {
            b.add_state(base.output(q).clone());
        }
    }
    for q in base.states() {
        for win in 0..windows {
            for bit in [false, true] {
                let full = (win << 1) | bit as usize;
                let to = if full == target {
                    v
                } else {
                    id(base.step(q, bit), tail(full))
                };
                b.set_edge(id(q, win), bit, to);
            }
        }
    }
    let (m, map) = b.build()?.minimize();
    let m = Arc::new(m);
    let reference = map[v.0];
    let reach = m.reachable_from([reference]);
    let reached: Vec<StateId> = m.states().filter(|q| reach[q.0]).collect();
    let phi = ComputerSet::new(Arc::clone(&m), reached)?.universal_members();
    let closure_matches = phi.closure_universal() == phi;
    Ok(SyncConstruction {
        universe: m,
        phi,
        reference,
        word: word.clone(),
        closure_matches,
    })
}
