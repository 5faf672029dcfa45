//! Rebuilding a network from its interaction log.

use crate::error::{CoreError, Result};
use crate::model::{InteractionEvent, KnowledgeNetwork};
use crate::persist::{canonical_bytes, Timestamps};
use crate::registry::ActionRegistry;

/// Replays `events` into a fresh network with id `network_id`.
///
/// Events must be numbered 1..N without gaps or duplicates. Action handlers
/// are re-run with their recorded params; nothing is fetched remotely.
pub fn replay(
    network_id: &str,
    events: &[InteractionEvent],
    registry: &ActionRegistry,
) -> Result<KnowledgeNetwork> {
    for (i, event) in events.iter().enumerate() {
        let expected = i as u64 + 1;
        if event.seq != expected {
            return Err(CoreError::SequenceGap {
                expected,
                found: event.seq,
            });
        }
    }
    let mut net = KnowledgeNetwork::new(network_id);
    for event in events {
        net.apply(event.clone(), registry)?;
    }
    Ok(net)
}

/// Outcome of comparing a network against its own replay.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayCheck {
    pub equal: bool,
    pub original_len: usize,
    pub replayed_len: usize,
    /// First differing byte when unequal.
    pub first_difference: Option<usize>,
}

/// Replays `net`'s log and compares canonical bytes, timestamps excluded.
pub fn replay_check(net: &KnowledgeNetwork, registry: &ActionRegistry) -> Result<ReplayCheck> {
    let replayed = replay(&net.id, &net.events, registry)?;
    let a = canonical_bytes(net, Timestamps::Exclude);
    let b = canonical_bytes(&replayed, Timestamps::Exclude);
    let first_difference = if a == b {
        None
    } else {
        Some(a.iter().zip(&b).position(|(x, y)| x != y).unwrap_or(a.len().min(b.len())))
    };
    Ok(ReplayCheck {
        equal: a == b,
        original_len: a.len(),
        replayed_len: b.len(),
        first_difference,
    })
}
