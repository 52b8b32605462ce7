//! Command-line front end: scenario ingestion, regime solving, prior sweeps,
//! pooling maps, diagnostics, and brute-force cross-checks.
//!
//! Exit codes: 0 ok, 1 check-failed verdict, 2 schema/parse error, 3 empty
//! pooling set, 4 I/O error, 5 unsupported operation for the scenario kind.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rayon::prelude::*;

use sigcom_core::belief::Belief;
use sigcom_core::error::Error;
use sigcom_core::family::GridConfig;
use sigcom_core::oracle;
use sigcom_core::pooling::{extended_equals_preper, pooling_map, Prop8Verdict};
use sigcom_core::scenarios::{
    load_scenario, validate_scenario_file, OutsideOption, PresetParams, Scenario,
};
use sigcom_core::solvers::{
    is_concave_on_grid, join_envelope, join_envelope_sweep, regime_solver, EnvelopeResult, Witness,
};

#[derive(Parser)]
#[command(name = "sigcom", version, about = "Optimal sender payoffs in signaling games under commitment")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ScenarioArgs {
    /// Preset name (adjudication | beer-quiche | ratings-concave |
    /// ratings-convex) or path to a scenario JSON file
    #[arg(long)]
    scenario: String,
    /// Adjudication: retaliation threshold after addressing
    #[arg(long)]
    theta_a: Option<f64>,
    /// Adjudication: retaliation threshold after dismissal
    #[arg(long)]
    theta_d: Option<f64>,
    /// Adjudication: retaliation cost in (0, 1)
    #[arg(long)]
    l: Option<f64>,
    /// Beer-quiche: fight cost c > 1 borne by the wimpy type
    #[arg(long)]
    c: Option<f64>,
    /// Beer-quiche: receiver fight threshold k in (0, 1/2)
    #[arg(long)]
    k: Option<f64>,
    /// Ratings: fraction of naive investors in (0, 1)
    #[arg(long)]
    nu: Option<f64>,
    /// Ratings: exaggeration cost k > 0
    #[arg(long)]
    k_cost: Option<f64>,
    /// Ratings: outside-option distribution, "quadratic" or "power:<p>"
    #[arg(long)]
    f: Option<String>,
}

impl ScenarioArgs {
    fn load(&self) -> Result<Scenario, Error> {
        let outside_option = match &self.f {
            None => None,
            Some(spec) => Some(parse_outside_option(spec)?),
        };
        let params = PresetParams {
            theta_a: self.theta_a,
            theta_d: self.theta_d,
            retaliation_cost: self.l,
            fight_cost: self.c,
            fight_threshold: self.k,
            naive_fraction: self.nu,
            exaggeration_cost: self.k_cost,
            outside_option,
        };
        load_scenario(&self.scenario, &params)
    }
}

fn parse_outside_option(spec: &str) -> Result<OutsideOption, Error> {
    if spec == "quadratic" {
        return Ok(OutsideOption::QuadraticConcave);
    }
    if let Some(rest) = spec.strip_prefix("power:") {
        let exponent: f64 = rest
            .parse()
            .map_err(|_| Error::InvalidParams(format!("bad power exponent `{rest}`")))?;
        return Ok(OutsideOption::Power { exponent });
    }
    Err(Error::InvalidParams(format!(
        "unknown distribution `{spec}`; use \"quadratic\" or \"power:<p>\""
    )))
}

#[derive(Args, Clone, Copy)]
struct GridArgs {
    /// Simplex grid resolution (beliefs at i/N); scenario knots are always
    /// injected
    #[arg(long, default_value_t = 1000)]
    grid: usize,
    /// Numerical tolerance for ties and envelope comparisons
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

impl GridArgs {
    fn config(&self) -> Result<GridConfig, Error> {
        GridConfig::new(self.grid, Vec::new(), self.tol)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check a scenario file or preset and print a validation report
    Validate {
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// Solve one commitment regime at a prior
    Solve {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Prior belief: a single number (probability of the second state)
        /// or a full semicolon/comma-separated vector
        #[arg(long)]
        prior: String,
        /// Commitment regime: jo | co | pp
        #[arg(long)]
        mode: String,
        #[command(flatten)]
        grid: GridArgs,
        /// Emit the result as JSON instead of text
        #[arg(long)]
        json: bool,
    },
    /// Sweep priors and emit a CSV of regime values
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Comma-separated regimes to solve (default: all applicable)
        #[arg(long)]
        modes: Option<String>,
        /// Number of uniform prior steps (priors at i/count, plus knots)
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[command(flatten)]
        grid: GridArgs,
        /// Output path; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit the pooling set over grid beliefs as CSV
    PoolingMap {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        grid: GridArgs,
        /// Output path; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named diagnostic: prop7 (join-envelope concavity) or prop8
    /// (extended commitment vs pre-persuasion)
    Check {
        /// Diagnostic name: prop7 | prop8
        check: String,
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Prior belief (required for prop8)
        #[arg(long)]
        prior: Option<String>,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Cross-check solver values against independent brute-force oracles
    Verify {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Prior belief for the scenario cross-check
        #[arg(long)]
        prior: Option<String>,
        #[command(flatten)]
        grid: GridArgs,
        /// Strategy-grid resolution for the enumeration oracle
        #[arg(long, default_value_t = 200)]
        strategy_grid: usize,
        /// Instead of a scenario check, test this many random games
        #[arg(long)]
        random: Option<usize>,
        /// RNG seed for --random
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NoPoolingPayoff(_) => 3,
        Error::Io(_) => 4,
        Error::Unsupported(_) => 5,
        _ => 2,
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Validate { scenario } => cmd_validate(&scenario),
        Command::Solve {
            scenario,
            prior,
            mode,
            grid,
            json,
        } => cmd_solve(&scenario, &prior, &mode, grid, json),
        Command::Sweep {
            scenario,
            modes,
            count,
            grid,
            out,
        } => cmd_sweep(&scenario, modes.as_deref(), count, grid, out.as_deref()),
        Command::PoolingMap { scenario, grid, out } => {
            cmd_pooling_map(&scenario, grid, out.as_deref())
        }
        Command::Check {
            check,
            scenario,
            prior,
            grid,
        } => cmd_check(&check, &scenario, prior.as_deref(), grid),
        Command::Verify {
            scenario,
            prior,
            grid,
            strategy_grid,
            random,
            seed,
        } => cmd_verify(&scenario, prior.as_deref(), grid, strategy_grid, random, seed),
    }
}

fn parse_prior(spec: &str, dim: usize) -> Result<Belief, Error> {
    let parts: Vec<&str> = if spec.contains(';') {
        spec.split(';').collect()
    } else if spec.contains(',') {
        spec.split(',').collect()
    } else {
        vec![spec]
    };
    if parts.len() == 1 {
        if dim != 2 {
            return Err(Error::InvalidBelief(format!(
                "scalar prior shorthand needs a binary-state scenario; this one has {dim} states"
            )));
        }
        let p: f64 = parts[0]
            .trim()
            .parse()
            .map_err(|_| Error::InvalidBelief(format!("cannot parse prior `{spec}`")))?;
        return Belief::binary(p);
    }
    let probs = parts
        .iter()
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidBelief(format!("cannot parse prior entry `{t}`")))
        })
        .collect::<Result<Vec<f64>, Error>>()?;
    if probs.len() != dim {
        return Err(Error::InvalidBelief(format!(
            "prior has {} entries, scenario has {dim} states",
            probs.len()
        )));
    }
    Belief::new(probs)
}

fn fmt12(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.12}")
}

fn fmt_belief(b: &Belief) -> String {
    if b.dim() == 2 {
        fmt12(b.second())
    } else {
        b.probs().iter().map(|&p| fmt12(p)).collect::<Vec<_>>().join(";")
    }
}

fn belief_json(b: &Belief) -> serde_json::Value {
    serde_json::json!(b.probs())
}

fn open_out(path: Option<&std::path::Path>) -> Result<Box<dyn Write>, Error> {
    match path {
        None => Ok(Box::new(std::io::stdout().lock())),
        Some(p) => Ok(Box::new(std::fs::File::create(p)?)),
    }
}

fn cmd_validate(args: &ScenarioArgs) -> Result<u8, Error> {
    let path = std::path::Path::new(&args.scenario);
    if path.exists() {
        let report = validate_scenario_file(path)?;
        if report.is_empty() {
            println!("ok: {} is a well-formed scenario", args.scenario);
            Ok(0)
        } else {
            for v in &report {
                println!("violation: {v}");
            }
            Ok(1)
        }
    } else {
        let scenario = args.load()?;
        println!(
            "ok: preset `{}` ({} states, {} sender actions{})",
            scenario.name,
            scenario.dim(),
            scenario.family.num_actions(),
            if scenario.game.is_some() { "" } else { ", interim payoffs only" },
        );
        Ok(0)
    }
}

fn print_result(scenario: &Scenario, res: &EnvelopeResult) {
    let solver = regime_solver(res.regime.name()).expect("registered regime");
    println!("scenario: {}", scenario.name);
    println!("regime:   {} ({})", res.regime, solver.description());
    println!("prior:    {}", fmt_belief(&res.prior));
    println!("value:    {}", fmt12(res.value));
    println!("witness:");
    match &res.witness {
        Witness::System(bs) => {
            for (s, e) in bs.entries().iter().enumerate() {
                if e.weight > 0.0 {
                    println!(
                        "  {}: belief {}  weight {}",
                        scenario.family.actions()[s],
                        fmt_belief(&e.belief),
                        fmt12(e.weight)
                    );
                }
            }
        }
        Witness::Joint(joint) => {
            for atom in joint.support() {
                println!(
                    "  {}: belief {}  prob {}",
                    scenario.family.actions()[atom.action],
                    fmt_belief(&atom.belief),
                    fmt12(atom.prob)
                );
            }
        }
    }
    let knots: Vec<String> = res.grid.extra_knots().iter().map(fmt_belief).collect();
    println!(
        "grid:     n={}  tol={:e}  knots=[{}]  points={}  candidates={}",
        res.grid.resolution(),
        res.grid.tol(),
        knots.join(", "),
        res.diagnostics.grid_points,
        res.diagnostics.candidates
    );
}

fn result_json(scenario: &Scenario, res: &EnvelopeResult) -> serde_json::Value {
    let witness = match &res.witness {
        Witness::System(bs) => serde_json::json!({
            "kind": "belief-system",
            "entries": bs.entries().iter().enumerate().map(|(s, e)| serde_json::json!({
                "action": scenario.family.actions()[s],
                "belief": belief_json(&e.belief),
                "weight": e.weight,
                "unreached": e.unreached,
            })).collect::<Vec<_>>(),
        }),
        Witness::Joint(joint) => serde_json::json!({
            "kind": "joint",
            "atoms": joint.support().iter().map(|a| serde_json::json!({
                "action": scenario.family.actions()[a.action],
                "belief": belief_json(&a.belief),
                "prob": a.prob,
            })).collect::<Vec<_>>(),
        }),
    };
    serde_json::json!({
        "scenario": scenario.name,
        "regime": res.regime.name(),
        "prior": belief_json(&res.prior),
        "value": res.value,
        "witness": witness,
        "grid": {
            "resolution": res.grid.resolution(),
            "tol": res.grid.tol(),
            "knots": res.grid.extra_knots().iter().map(belief_json).collect::<Vec<_>>(),
        },
        "diagnostics": {
            "grid_points": res.diagnostics.grid_points,
            "candidates": res.diagnostics.candidates,
        },
    })
}

fn cmd_solve(
    args: &ScenarioArgs,
    prior: &str,
    mode: &str,
    grid: GridArgs,
    json: bool,
) -> Result<u8, Error> {
    let scenario = args.load()?;
    let prior = parse_prior(prior, scenario.dim())?;
    let solver = regime_solver(mode).ok_or_else(|| {
        Error::InvalidParams(format!("unknown mode `{mode}`; use jo, co, or pp"))
    })?;
    let res = solver.solve(&scenario, &prior, &grid.config()?)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&result_json(&scenario, &res)).unwrap());
    } else {
        print_result(&scenario, &res);
    }
    Ok(0)
}

fn cmd_sweep(
    args: &ScenarioArgs,
    modes: Option<&str>,
    count: usize,
    grid: GridArgs,
    out: Option<&std::path::Path>,
) -> Result<u8, Error> {
    let scenario = args.load()?;
    if scenario.dim() != 2 {
        return Err(Error::Unsupported(
            "prior sweeps cover binary-state scenarios only".into(),
        ));
    }
    let mode_list: Vec<String> = match modes {
        Some(m) => m.split(',').map(|s| s.trim().to_string()).collect(),
        None => {
            if scenario.game.is_some() {
                vec!["jo".into(), "co".into(), "pp".into()]
            } else {
                vec!["jo".into(), "co".into()]
            }
        }
    };
    let solvers = mode_list
        .iter()
        .map(|m| {
            regime_solver(m)
                .ok_or_else(|| Error::InvalidParams(format!("unknown mode `{m}`; use jo, co, or pp")))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    // Fail fast on regimes the scenario cannot support.
    if mode_list.iter().any(|m| m == "pp") {
        scenario.game_ref()?;
    }

    let mut priors: Vec<f64> = if count == 0 {
        Vec::new()
    } else {
        (0..=count).map(|i| i as f64 / count as f64).collect()
    };
    for knot in &scenario.knots {
        priors.push(knot.second());
    }
    priors.sort_by(|a, b| a.partial_cmp(b).unwrap());
    priors.dedup();

    let config = grid.config()?;
    let rows: Vec<String> = priors
        .par_iter()
        .map(|&p| {
            let prior = Belief::binary(p)?;
            let mut cells = vec![fmt12(p)];
            for solver in &solvers {
                let res = solver.solve(&scenario, &prior, &config)?;
                cells.push(fmt12(res.value));
            }
            Ok(cells.join(","))
        })
        .collect::<Result<Vec<String>, Error>>()?;

    let mut w = open_out(out)?;
    let header: Vec<String> = std::iter::once("prior".to_string())
        .chain(mode_list.iter().map(|m| format!("V_{m}")))
        .collect();
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        writeln!(w, "{row}")?;
    }
    Ok(0)
}

fn cmd_pooling_map(
    args: &ScenarioArgs,
    grid: GridArgs,
    out: Option<&std::path::Path>,
) -> Result<u8, Error> {
    let scenario = args.load()?;
    let game = scenario.game_ref()?;
    let config = grid.config()?.with_knots(&scenario.knots);
    let map = pooling_map(game, &config)?;
    let mut w = open_out(out)?;
    writeln!(w, "belief,action,pooling")?;
    for (i, b) in map.beliefs.iter().enumerate() {
        for (s, label) in game.sender_actions().iter().enumerate() {
            writeln!(w, "{},{},{}", fmt_belief(b), label, map.pooled[s][i])?;
        }
    }
    Ok(0)
}

fn cmd_check(
    check: &str,
    args: &ScenarioArgs,
    prior: Option<&str>,
    grid: GridArgs,
) -> Result<u8, Error> {
    let scenario = args.load()?;
    let config = grid.config()?.with_knots(&scenario.knots);
    match check {
        "prop7" => {
            if scenario.dim() != 2 {
                return Err(Error::Unsupported(
                    "the concavity diagnostic covers binary-state scenarios only".into(),
                ));
            }
            let beliefs = config.beliefs(2);
            let sweep = join_envelope_sweep(&scenario.family, &beliefs, &config)?;
            let curve: Vec<(f64, f64)> = sweep.iter().map(|(b, v)| (b.second(), *v)).collect();
            let report = is_concave_on_grid(&curve, config.tol())?;
            match report.violation {
                None => {
                    println!("CONCAVE: join envelope is concave on the grid (commitment to actions already attains the extended-commitment value)");
                    Ok(0)
                }
                Some(v) => {
                    println!(
                        "NONCONCAVE at mu={}: join envelope {} lies below the chord {} of its neighbors",
                        fmt12(v.x),
                        fmt12(v.value),
                        fmt12(v.chord)
                    );
                    Ok(1)
                }
            }
        }
        "prop8" => {
            let game = scenario.game_ref()?;
            let prior_spec = prior.ok_or_else(|| {
                Error::InvalidParams("prop8 needs --prior".into())
            })?;
            let prior = parse_prior(prior_spec, scenario.dim())?;
            let check = extended_equals_preper(game, &prior, &config)?;
            match check.verdict {
                Prop8Verdict::Equal => {
                    println!(
                        "EQUAL: persuasion alone attains the extended-commitment value {} at prior {}",
                        fmt12(check.v_co),
                        fmt_belief(&prior)
                    );
                    Ok(0)
                }
                Prop8Verdict::Strict => {
                    let (b, s) = check.violating.expect("strict verdict names a pair");
                    println!(
                        "STRICT: V_co {} vs V_pp {}; violating pair (mu={}, action {})",
                        fmt12(check.v_co),
                        check
                            .v_pp
                            .map(fmt12)
                            .unwrap_or_else(|| "undefined".into()),
                        fmt_belief(&b),
                        game.sender_actions()[s]
                    );
                    Ok(1)
                }
            }
        }
        other => Err(Error::InvalidParams(format!(
            "unknown check `{other}`; use prop7 or prop8"
        ))),
    }
}

fn cmd_verify(
    args: &ScenarioArgs,
    prior: Option<&str>,
    grid: GridArgs,
    strategy_grid: usize,
    random: Option<usize>,
    seed: u64,
) -> Result<u8, Error> {
    if let Some(count) = random {
        return verify_random(count, seed, strategy_grid);
    }
    let scenario = args.load()?;
    let prior_spec = prior.ok_or_else(|| Error::InvalidParams("verify needs --prior".into()))?;
    let prior = parse_prior(prior_spec, scenario.dim())?;
    let config = grid.config()?.with_knots(&scenario.knots);
    let mut ok = true;

    println!(
        "scenario: {}  prior: {}  grid n={}",
        scenario.name,
        fmt_belief(&prior),
        config.resolution()
    );

    let jo = join_envelope(&scenario.family, &prior, &config)?;
    println!("V_jo solver:     {}", fmt12(jo.value));
    if scenario.dim() == 2 {
        let naive = oracle::pairwise_join_value(&scenario.family, &prior, &config)?;
        let gap = (jo.value - naive).abs();
        ok &= gap <= 1e-9;
        println!(
            "V_jo pairwise:   {}  gap {:.3e} (tol 1e-9) {}",
            fmt12(naive),
            gap,
            if gap <= 1e-9 { "ok" } else { "FAIL" }
        );
    }
    if let Some(game) = &scenario.game {
        if prior.is_full_support() {
            let at_prior = game.with_prior(prior.probs().to_vec())?;
            let bf = oracle::brute_force_commitment_value(&at_prior, strategy_grid)?;
            let gap = (jo.value - bf.value).abs();
            ok &= gap <= 0.05;
            println!(
                "V_jo enumerated: {}  gap {:.3e} (tol 5e-2, m={}) {}",
                fmt12(bf.value),
                gap,
                strategy_grid,
                if gap <= 0.05 { "ok" } else { "FAIL" }
            );
        } else {
            println!("V_jo enumerated: skipped (boundary prior has no full-support game)");
        }
    }

    let co = sigcom_core::solvers::concave_envelope(&scenario.family, &prior, &config)?;
    let lp = oracle::brute_force_extended_value(&scenario.family, &prior, &config)?;
    let gap = (co.value - lp).abs();
    ok &= gap <= 1e-8;
    println!("V_co hull:       {}", fmt12(co.value));
    println!(
        "V_co LP:         {}  gap {:.3e} (tol 1e-8) {}",
        fmt12(lp),
        gap,
        if gap <= 1e-8 { "ok" } else { "FAIL" }
    );

    println!("verify: {}", if ok { "PASS" } else { "FAIL" });
    Ok(if ok { 0 } else { 1 })
}

fn verify_random(count: usize, seed: u64, strategy_grid: usize) -> Result<u8, Error> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut max_gap: f64 = 0.0;
    for case in 0..count {
        let game = oracle::random_game(&mut rng);
        let bf = oracle::brute_force_commitment_value(&game, strategy_grid)?;
        let bs = game.belief_system_from_strategy(&bf.strategy)?;
        let knots: Vec<Belief> = bs.entries().iter().map(|e| e.belief.clone()).collect();
        let config = GridConfig::new(400, knots, 1e-9)?;
        let fam = sigcom_core::family::InterimPayoffFamily::from_game(&game);
        let jo = join_envelope(&fam, game.prior(), &config)?;
        let gap = (jo.value - bf.value).abs();
        if gap > max_gap {
            max_gap = gap;
            println!(
                "case {case}: join {} vs enumeration {} (gap {:.3e})",
                fmt12(jo.value),
                fmt12(bf.value),
                gap
            );
        }
    }
    let ok = max_gap <= 0.05;
    println!(
        "verify: {} ({count} random games, seed {seed}, max gap {max_gap:.3e}, tol 5e-2)",
        if ok { "PASS" } else { "FAIL" }
    );
    Ok(if ok { 0 } else { 1 })
}
