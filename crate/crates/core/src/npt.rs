//! Tests (NPTs) and interaction systems.
//!
//! A test is a finite PTS with a distinguished terminal success state. The
//! interaction system of a process and a test is their synchronous product,
//! with a configuration successful exactly when its test component is the
//! success state.

use crate::compose::{parallel_compose, Composed};
use crate::pts::{Pts, StateId};
use crate::{Error, Result};

/// A nondeterministic probabilistic test: a PTS plus its success state.
#[derive(Debug, Clone)]
pub struct Npt {
    pts: Pts,
    success: StateId,
}

impl Npt {
    pub fn new(pts: Pts, success: StateId) -> Result<Self> {
        if success.0 >= pts.num_states() {
            return Err(Error::Validation {
                violations: vec![format!("undeclared success state index {}", success.0)],
            });
        }
        if !pts.is_deadlock(success) {
            return Err(Error::Validation {
                violations: vec![format!(
                    "success state `{}` has outgoing transitions",
                    pts.state_name(success)
                )],
            });
        }
        Ok(Npt { pts, success })
    }

    pub fn pts(&self) -> &Pts {
        &self.pts
    }

    pub fn success(&self) -> StateId {
        self.success
    }

    pub fn name(&self) -> &str {
        self.pts.name()
    }

    pub fn root(&self) -> StateId {
        self.pts.root()
    }
}

/// The synchronous product of a process and a test, restricted to the
/// configurations reachable from `(proc_root, test_root)`.
#[derive(Debug, Clone)]
pub struct InteractionSystem {
    composed: Composed,
    /// Per configuration: is its test component the success state?
    successful: Vec<bool>,
}

impl InteractionSystem {
    pub fn pts(&self) -> &Pts {
        &self.composed.pts
    }

    pub fn root(&self) -> StateId {
        StateId(0)
    }

    pub fn is_successful(&self, config: StateId) -> bool {
        self.successful[config.0]
    }

    pub fn successful_configs(&self) -> Vec<StateId> {
        self.successful
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| StateId(i))
            .collect()
    }

    /// The (process, test) pair a configuration stands for.
    pub fn components(&self, config: StateId) -> (StateId, StateId) {
        self.composed.pairs[config.0]
    }

    pub fn composed(&self) -> &Composed {
        &self.composed
    }
}

/// Builds the interaction system of process state `proc_root` in `p` with
/// the test `o`.
pub fn build_interaction_system(p: &Pts, proc_root: StateId, o: &Npt) -> InteractionSystem {
    let composed = parallel_compose(p, o.pts(), (proc_root, o.root()), true);
    let successful = composed
        .pairs
        .iter()
        .map(|&(_, test_state)| test_state == o.success())
        .collect();
    InteractionSystem {
        composed,
        successful,
    }
}
