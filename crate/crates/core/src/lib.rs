//! Exact computation of behavioral hemimetrics and pseudometrics for linear
//! (trace and testing) semantics of finite nondeterministic probabilistic
//! transition systems.
//!
//! The crate provides:
//!
//! * a validated process model ([`pts`]) with synchronous parallel
//!   composition and test interaction systems ([`compose`], [`npt`]);
//! * bounded enumeration of deterministic resolutions of nondeterminism and
//!   the achievable sets of trace / success probabilities they induce
//!   ([`resolution`], [`achievable`]);
//! * optimal success probabilities on interaction systems, by dynamic
//!   programming on acyclic systems and exact policy iteration otherwise
//!   ([`mdp`]);
//! * three trace distance families (trace-distribution, trace-by-trace,
//!   supremal probabilities) and five testing distance families (may, must,
//!   may/must, trace-by-trace, supremal probabilities), each as hemimetric
//!   and pseudometric, for deterministic and randomized schedulers
//!   ([`trace_metrics`], [`testing_metrics`]);
//! * kernel relation checking, ε-robustness verdicts, backward-compatibility
//!   checks, seeded random system generation, and a property-suite harness
//!   with counterexample shrinking ([`relations`], [`gen`], [`props`]);
//! * a text model format and graph emission ([`format`]).
//!
//! Everything is exact rational arithmetic; no floating point participates in
//! any semantic computation.

pub mod achievable;
pub mod compose;
pub mod format;
pub mod gallery;
pub mod gen;
pub mod mdp;
pub mod npt;
pub mod props;
pub mod pts;
pub mod rat;
pub mod relations;
pub mod resolution;
pub mod simplex;
pub mod testing_metrics;
pub mod trace_metrics;

pub use achievable::AchievableSet;
pub use npt::{InteractionSystem, Npt};
pub use pts::{ActionId, Classification, FiniteDistribution, Pts, StateId, StructureInfo, Trace};
pub use rat::Rat;
pub use resolution::{ResolutionTree, SchedulerClass, SchedulerMode};
pub use trace_metrics::{MetricResult, TraceApproach, TraceMetricSpec};

/// Default cap on enumerated deterministic resolutions.
pub const DEFAULT_RESOLUTION_CAP: usize = 1_000_000;
/// Default cap on memo-table entries in set-valued recursions.
pub const DEFAULT_MEMO_CAP: usize = 100_000;

/// Environment variable overriding [`DEFAULT_RESOLUTION_CAP`].
pub const ENV_RESOLUTION_CAP: &str = "PTSMET_CAP_RESOLUTIONS";
/// Environment variable overriding [`DEFAULT_MEMO_CAP`].
pub const ENV_MEMO_CAP: &str = "PTSMET_CAP_MEMO";

/// Resource limits for enumeration-backed computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    pub resolutions: usize,
    pub memo: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            resolutions: DEFAULT_RESOLUTION_CAP,
            memo: DEFAULT_MEMO_CAP,
        }
    }
}

impl Caps {
    /// Defaults, with environment-variable overrides applied when present.
    pub fn from_env() -> Self {
        let mut caps = Caps::default();
        if let Ok(v) = std::env::var(ENV_RESOLUTION_CAP) {
            if let Ok(n) = v.parse() {
                caps.resolutions = n;
            }
        }
        if let Ok(v) = std::env::var(ENV_MEMO_CAP) {
            if let Ok(n) = v.parse() {
                caps.memo = n;
            }
        }
        caps
    }
}

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("validation failed: {}", violations.join("; "))]
    Validation { violations: Vec<String> },

    #[error("{what} exceeds cap {cap} (estimate {estimate})")]
    CapExceeded {
        what: String,
        cap: usize,
        estimate: usize,
    },

    #[error("{context}: cyclic system not supported here ({detail})")]
    CyclicUnsupported { context: String, detail: String },

    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
