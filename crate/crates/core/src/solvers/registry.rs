//! Runtime registry of commitment-regime solvers. Each regime sits behind a
//! common trait and is selected by name (`jo`, `co`, `pp`) from configuration
//! or the command line.

use std::collections::BTreeMap;

use once_cell::sync::Lazy;

use crate::belief::Belief;
use crate::error::Result;
use crate::family::GridConfig;
use crate::pooling::pre_persuasion_value;
use crate::scenarios::Scenario;
use crate::solvers::{concave_envelope, join_envelope, EnvelopeResult, Regime};

/// A solver for one commitment regime, applied to a scenario at a prior.
/// Scenario knots are always injected into the search grid.
pub trait RegimeSolver: Send + Sync {
    fn name(&self) -> &'static str;
    fn regime(&self) -> Regime;
    fn description(&self) -> &'static str;
    fn solve(&self, scenario: &Scenario, prior: &Belief, grid: &GridConfig)
        -> Result<EnvelopeResult>;
}

fn grid_with_scenario_knots(scenario: &Scenario, grid: &GridConfig) -> GridConfig {
    grid.with_knots(&scenario.knots)
}

struct JoinSolver;

impl RegimeSolver for JoinSolver {
    fn name(&self) -> &'static str {
        "jo"
    }
    fn regime(&self) -> Regime {
        Regime::Jo
    }
    fn description(&self) -> &'static str {
        "commitment to actions: join envelope of the interim payoff graphs"
    }
    fn solve(
        &self,
        scenario: &Scenario,
        prior: &Belief,
        grid: &GridConfig,
    ) -> Result<EnvelopeResult> {
        join_envelope(&scenario.family, prior, &grid_with_scenario_knots(scenario, grid))
    }
}

struct ConcaveSolver;

impl RegimeSolver for ConcaveSolver {
    fn name(&self) -> &'static str {
        "co"
    }
    fn regime(&self) -> Regime {
        Regime::Co
    }
    fn description(&self) -> &'static str {
        "extended commitment to messages and actions: concave envelope"
    }
    fn solve(
        &self,
        scenario: &Scenario,
        prior: &Belief,
        grid: &GridConfig,
    ) -> Result<EnvelopeResult> {
        concave_envelope(&scenario.family, prior, &grid_with_scenario_knots(scenario, grid))
    }
}

struct PrePersuasionSolver;

impl RegimeSolver for PrePersuasionSolver {
    fn name(&self) -> &'static str {
        "pp"
    }
    fn regime(&self) -> Regime {
        Regime::Pp
    }
    fn description(&self) -> &'static str {
        "commitment to messages only: concave envelope of the pooling payoff graphs"
    }
    fn solve(
        &self,
        scenario: &Scenario,
        prior: &Belief,
        grid: &GridConfig,
    ) -> Result<EnvelopeResult> {
        let game = scenario.game_ref()?;
        pre_persuasion_value(game, prior, &grid_with_scenario_knots(scenario, grid))
    }
}

static REGISTRY: Lazy<BTreeMap<&'static str, Box<dyn RegimeSolver>>> = Lazy::new(|| {
    let solvers: Vec<Box<dyn RegimeSolver>> = vec![
        Box::new(JoinSolver),
        Box::new(ConcaveSolver),
        Box::new(PrePersuasionSolver),
    ];
    solvers.into_iter().map(|s| (s.name(), s)).collect()
});

/// Looks up a regime solver by name.
pub fn regime_solver(name: &str) -> Option<&'static dyn RegimeSolver> {
    REGISTRY.get(name).map(|b| b.as_ref())
}

pub fn regime_names() -> Vec<&'static str> {
    REGISTRY.keys().copied().collect()
}
