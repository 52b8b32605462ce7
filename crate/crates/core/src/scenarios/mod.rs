//! Named scenario constructors with closed-form reference solutions, plus a
//! JSON loader for user-supplied games.

mod adjudication;
mod beer_quiche;
mod ratings;

pub use adjudication::{
    adjudication_reference, adjudication_scenario, AdjudicationParams, AdjudicationReference,
    AdjudicationRegime,
};
pub use beer_quiche::{
    beer_quiche_pooling_system, beer_quiche_reference, beer_quiche_scenario,
    beer_quiche_semi_separating_system, BeerQuicheParams, BeerQuicheReference,
};
pub use ratings::{
    d1_equilibrium, naive_informativeness_threshold, private_communication_value,
    ratings_scenario, tangency_parameters, tangency_thresholds, D1Regime, D1Result,
    OutsideOption, PrivateCommunication, RatingsParams, TangencyParameters,
};

use std::collections::BTreeMap;
use std::path::Path;

use once_cell::sync::Lazy;
use serde::Deserialize;

use crate::belief::Belief;
use crate::error::{Error, Result};
use crate::family::InterimPayoffFamily;
use crate::game::{validate_game_parts, SignalingGame, Violation};

/// A solvable scenario: an interim payoff family, the knot beliefs at which
/// its payoffs kink or jump, and (for full signaling games) the game itself.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    /// Present for full signaling games; absent for interim-only families
    /// such as the ratings application (no finite receiver exists).
    pub game: Option<SignalingGame>,
    pub family: InterimPayoffFamily,
    pub knots: Vec<Belief>,
}

impl Scenario {
    pub fn dim(&self) -> usize {
        self.family.dim()
    }

    /// The underlying game, or an `Unsupported` error for interim-only
    /// scenarios.
    pub fn game_ref(&self) -> Result<&SignalingGame> {
        self.game.as_ref().ok_or_else(|| {
            Error::Unsupported(format!(
                "scenario `{}` has no finite receiver game; only interim payoffs are defined",
                self.name
            ))
        })
    }
}

/// Optional overrides for preset parameters; unset fields take the preset's
/// defaults.
#[derive(Debug, Clone, Default)]
pub struct PresetParams {
    pub theta_a: Option<f64>,
    pub theta_d: Option<f64>,
    pub retaliation_cost: Option<f64>,
    pub fight_cost: Option<f64>,
    pub fight_threshold: Option<f64>,
    pub naive_fraction: Option<f64>,
    pub exaggeration_cost: Option<f64>,
    pub outside_option: Option<OutsideOption>,
}

type PresetBuilder = fn(&PresetParams) -> Result<Scenario>;

static PRESETS: Lazy<BTreeMap<&'static str, PresetBuilder>> = Lazy::new(|| {
    let mut m: BTreeMap<&'static str, PresetBuilder> = BTreeMap::new();
    m.insert("adjudication", |p| {
        Ok(adjudication_scenario(&AdjudicationParams::new(
            p.theta_a.unwrap_or(0.25),
            p.theta_d.unwrap_or(0.5),
            p.retaliation_cost.unwrap_or(2.0 / 3.0),
        )?))
    });
    m.insert("beer-quiche", |p| {
        Ok(beer_quiche_scenario(&BeerQuicheParams::new(
            p.fight_cost.unwrap_or(1.15),
            p.fight_threshold.unwrap_or(0.4),
        )?))
    });
    m.insert("ratings-concave", |p| {
        Ok(ratings_scenario(&RatingsParams::new(
            p.outside_option
                .clone()
                .unwrap_or(OutsideOption::QuadraticConcave),
            p.naive_fraction.unwrap_or(2.0 / 7.0),
            p.exaggeration_cost.unwrap_or(4.0 / 7.0),
        )?))
    });
    m.insert("ratings-convex", |p| {
        Ok(ratings_scenario(&RatingsParams::new(
            p.outside_option
                .clone()
                .unwrap_or(OutsideOption::Power { exponent: 2.0 }),
            p.naive_fraction.unwrap_or(1.0 / 3.0),
            p.exaggeration_cost.unwrap_or(2.0 / 15.0),
        )?))
    });
    m
});

pub fn preset_names() -> Vec<&'static str> {
    PRESETS.keys().copied().collect()
}

pub fn build_preset(name: &str, params: &PresetParams) -> Result<Scenario> {
    match PRESETS.get(name) {
        Some(builder) => builder(params),
        None => Err(Error::InvalidParams(format!(
            "unknown preset `{name}`; available: {}",
            preset_names().join(", ")
        ))),
    }
}

/// Resolves a scenario spec: a preset name, or a path to a scenario JSON file.
pub fn load_scenario(spec: &str, params: &PresetParams) -> Result<Scenario> {
    if PRESETS.contains_key(spec) {
        build_preset(spec, params)
    } else if Path::new(spec).exists() {
        load_scenario_file(Path::new(spec))
    } else {
        Err(Error::InvalidParams(format!(
            "`{spec}` is neither a preset ({}) nor an existing scenario file",
            preset_names().join(", ")
        )))
    }
}

/// On-disk scenario schema: payoff tensors indexed `[s][a][ω]`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    states: Vec<String>,
    prior: Vec<f64>,
    sender_actions: Vec<String>,
    receiver_actions: Vec<String>,
    v: Vec<Vec<Vec<f64>>>,
    u: Vec<Vec<Vec<f64>>>,
}

fn parse_scenario_file(path: &Path) -> Result<RawScenario> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Schema {
        at: path.display().to_string(),
        msg: e.to_string(),
    })
}

/// Report-style validation of a scenario file, for the `validate` command.
pub fn validate_scenario_file(path: &Path) -> Result<Vec<Violation>> {
    let raw = parse_scenario_file(path)?;
    Ok(validate_game_parts(
        &raw.states,
        &raw.prior,
        &raw.sender_actions,
        &raw.receiver_actions,
        &raw.v,
        &raw.u,
    ))
}

pub fn load_scenario_file(path: &Path) -> Result<Scenario> {
    let raw = parse_scenario_file(path)?;
    let report = validate_game_parts(
        &raw.states,
        &raw.prior,
        &raw.sender_actions,
        &raw.receiver_actions,
        &raw.v,
        &raw.u,
    );
    if let Some(first) = report.first() {
        return Err(Error::Schema {
            at: format!("{}: {}", path.display(), first.at),
            msg: format!("{} ({} violation(s) total)", first.msg, report.len()),
        });
    }
    let game = SignalingGame::new(
        raw.states,
        raw.prior,
        raw.sender_actions,
        raw.receiver_actions,
        raw.v,
        raw.u,
    )?;
    let family = InterimPayoffFamily::from_game(&game);
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    Ok(Scenario {
        name,
        game: Some(game),
        family,
        knots: Vec::new(),
    })
}
