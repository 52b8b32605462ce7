//! Solvers for optimal sender payoffs in finite signaling games when the
//! sender commits to a strategy before learning the state.
//!
//! The library covers three commitment regimes, each behind the
//! [`RegimeSolver`] registry and selectable by name at runtime:
//!
//! * `jo` — commitment to actions only. Feasible payoffs form the topological
//!   join of the per-action interim payoff graphs over posterior beliefs;
//!   the optimum is the join envelope at the prior.
//! * `co` — extended commitment to payoff-irrelevant messages and actions.
//!   Feasible payoffs fill the convex hull of the union of the graphs; the
//!   optimum is the concave envelope.
//! * `pp` — pre-persuasion: public information design before an uncommitted
//!   signaling game. The optimum concavifies the pooling payoff graphs.
//!
//! Scenario presets (`adjudication`, `beer-quiche`, `ratings-concave`,
//! `ratings-convex`) ship with closed-form reference solutions used as test
//! oracles, and the [`oracle`] module provides independent brute-force
//! verifiers.

pub mod belief;
pub mod error;
pub mod family;
pub mod game;
pub mod lp;
pub mod oracle;
pub mod pooling;
pub mod scenarios;
pub mod solvers;

pub use belief::{is_bayes_plausible, Belief, BeliefSystem, BeliefSystemEntry, PROB_TOL};
pub use error::{Error, Result};
pub use family::{GridConfig, InterimPayoffFamily, Provenance};
pub use game::{
    validate_game_parts, validate_strategy_parts, SenderStrategy, SignalingGame, TieBreak,
    Violation,
};
pub use pooling::{
    extended_equals_preper, pooling_exists, pooling_map, pre_persuasion_value, PoolingCheck,
    PoolingMap, Prop8Check, Prop8Verdict,
};
pub use scenarios::{load_scenario, preset_names, PresetParams, Scenario};
pub use solvers::{
    concave_envelope, each_interim_concave, is_concave_on_grid, join_envelope,
    join_envelope_sweep, pointwise_max, regime_names, regime_solver, uncoupled_strategy_from_joint,
    EnvelopeResult, JointAtom, JointBeliefActionDistribution, Regime, RegimeSolver, Witness,
};
