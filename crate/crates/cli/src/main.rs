//! Command-line front end: parse scenario and sweep files, dispatch to the
//! analytic engines, the policy rules, the simulation oracle, and the
//! sweep runner.
//!
//! Exit codes: 0 success, 1 validation failure, 2 I/O or parse failure,
//! 3 verification-check failure (an oracle z-score or findings check).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use fhr_core::analytic::HorizonRule;
use fhr_core::complex::phase_breakdown;
use fhr_core::config::{ScenarioFile, SweepFile};
use fhr_core::multi_armed::g_curve_csv;
use fhr_core::oracle::{
    compare_bundle, simulate_closed, simulate_complex, simulate_multi_armed, simulate_open,
    ComplexStrategy, Estimate, EstimateReport, Strategy, TrialConfig, GENERATOR,
};
use fhr_core::policy::{
    hallway_first_minute, hallway_survival, optimal_deviation, per_minute_comparison,
    HallwayContinuation,
};
use fhr_core::sweep::{finding_checks, run_sweep};
use fhr_core::table::{render_rows, Action};
use fhr_core::{survival_table, ArenaScenario, ScenarioBundle};

#[derive(Parser)]
#[command(
    name = "fhr",
    version,
    about = "Per-minute survival probabilities and optimal fight/hide/run actions \
             for modeled active-shooter incidents"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum HorizonArg {
    /// End open-arena tables at the authority arrival.
    Capped,
    /// Print the survival products through the last sustainable minute.
    Extended,
}

impl From<HorizonArg> for HorizonRule {
    fn from(h: HorizonArg) -> Self {
        match h {
            HorizonArg::Capped => HorizonRule::ArrivalCapped,
            HorizonArg::Extended => HorizonRule::ProductExtended,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check a scenario file against every model invariant.
    Validate {
        file: PathBuf,
        /// Override a parameter, e.g. --set T2=6 (repeatable).
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Print the action-by-minute survival table.
    Table {
        file: PathBuf,
        /// Use the armed fight probability in CSV output (the default).
        #[arg(long)]
        armed: bool,
        /// Use the unarmed fight probability in CSV output.
        #[arg(long, conflicts_with = "armed")]
        unarmed: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long, value_enum, default_value_t = HorizonArg::Extended)]
        horizon: HorizonArg,
        /// For a complex arena, include the evacuation phase.
        #[arg(long)]
        phases: bool,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Recommend per-minute actions.
    Policy {
        file: PathBuf,
        #[arg(long)]
        armed: bool,
        #[arg(long, conflicts_with = "armed")]
        unarmed: bool,
        /// Also print the minute-by-minute column comparison.
        #[arg(long = "paper-view")]
        paper_view: bool,
        /// Hallway only: re-run the decision rule inside the arena instead
        /// of hiding until the end.
        #[arg(long)]
        reoptimize: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Estimate a strategy's survival probability with the oracle.
    Simulate {
        file: PathBuf,
        /// hide, fight@k, or run@k; complex arenas accept phase1:/phase2: prefixes.
        #[arg(long)]
        strategy: String,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        /// Defaults to $FHR_SEED, then 17.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        armed: bool,
        #[arg(long, conflicts_with = "armed")]
        unarmed: bool,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Verify every analytic table entry against the oracle.
    Compare {
        file: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long)]
        seed: Option<u64>,
        /// Fail (exit 3) when any |z| reaches this threshold.
        #[arg(long, default_value_t = 4.0)]
        z_threshold: f64,
        #[arg(long)]
        armed: bool,
        #[arg(long, conflicts_with = "armed")]
        unarmed: bool,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Evaluate a parameter grid from a sweep specification.
    Sweep { spec: PathBuf },
    /// Joint fight success over the number of fighters.
    Gcurve {
        #[arg(long)]
        p2: f64,
        #[arg(long)]
        pf: f64,
        #[arg(long)]
        pool: u64,
    },
    /// Check the model's qualitative findings on the scenario's family.
    CheckFindings {
        file: PathBuf,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
}

enum Failure {
    Validation(String),
    Io(String),
    Check(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Io(_) => 2,
            Failure::Check(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Io(m) | Failure::Check(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}

fn load(path: &Path, sets: &[String]) -> Result<(ScenarioFile, ScenarioBundle), Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let mut file = ScenarioFile::from_json(&text)
        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    for kv in sets {
        let (key, value) = kv
            .split_once('=')
            .ok_or_else(|| Failure::Validation(format!("--set takes KEY=VALUE, got {kv:?}")))?;
        let value: f64 = value
            .parse()
            .map_err(|_| Failure::Validation(format!("{key} takes a number, got {value:?}")))?;
        file.set_param(key, value)
            .map_err(|e| Failure::Validation(e.to_string()))?;
    }
    let bundle = file.validate().map_err(|e| Failure::Validation(e.to_string()))?;
    Ok((file, bundle))
}

/// Echo the effective scenario (flag overrides applied) for auditability.
fn print_resolved(bundle: &ScenarioBundle) {
    println!("# resolved");
    println!(
        "# {}",
        serde_json::to_string(&bundle.to_file()).expect("scenario files serialize")
    );
    for w in bundle.warnings() {
        println!("# warning: {w}");
    }
}

fn seed_or_default(flag: Option<u64>) -> u64 {
    flag.or_else(|| std::env::var("FHR_SEED").ok().and_then(|s| s.parse().ok()))
        .unwrap_or(17)
}

fn armed_flag(armed: bool, unarmed: bool) -> bool {
    // Armed is the default; --unarmed flips it.
    armed || !unarmed
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Validate { file, set } => {
            let (_, bundle) = load(&file, &set)?;
            print_resolved(&bundle);
            println!("ok: {} scenario", bundle.arena.kind());
            Ok(())
        }
        Command::Table { file, armed, unarmed, format, horizon, phases, set } => {
            let (_, bundle) = load(&file, &set)?;
            print_resolved(&bundle);
            cmd_table(&bundle, armed_flag(armed, unarmed), format, horizon.into(), phases)
        }
        Command::Policy { file, armed, unarmed, paper_view, reoptimize, format, set } => {
            let (_, bundle) = load(&file, &set)?;
            print_resolved(&bundle);
            cmd_policy(&bundle, armed_flag(armed, unarmed), paper_view, reoptimize, format)
        }
        Command::Simulate { file, strategy, trials, seed, armed, unarmed, set } => {
            let (_, bundle) = load(&file, &set)?;
            print_resolved(&bundle);
            cmd_simulate(
                &bundle,
                &strategy,
                TrialConfig::new(trials, seed_or_default(seed)),
                armed_flag(armed, unarmed),
            )
        }
        Command::Compare { file, trials, seed, z_threshold, armed, unarmed, set } => {
            let (_, bundle) = load(&file, &set)?;
            print_resolved(&bundle);
            cmd_compare(
                &bundle,
                TrialConfig::new(trials, seed_or_default(seed)),
                armed_flag(armed, unarmed),
                z_threshold,
            )
        }
        Command::Sweep { spec } => {
            let text = std::fs::read_to_string(&spec)
                .map_err(|e| Failure::Io(format!("{}: {e}", spec.display())))?;
            let sweep = SweepFile::from_json(&text)
                .map_err(|e| Failure::Io(format!("{}: {e}", spec.display())))?;
            print!("{}", run_sweep(&sweep).to_csv());
            Ok(())
        }
        Command::Gcurve { p2, pf, pool } => {
            if !(p2 > 0.0 && p2 <= 1.0) {
                return Err(Failure::Validation(format!("p2 = {p2} must lie in (0, 1]")));
            }
            if !(0.0..1.0).contains(&pf) {
                return Err(Failure::Validation(format!("pf = {pf} must lie in [0, 1)")));
            }
            if pool < 1 {
                return Err(Failure::Validation("pool must be at least 1".into()));
            }
            print!("{}", g_curve_csv(p2, pf, pool));
            Ok(())
        }
        Command::CheckFindings { file, set } => {
            let (_, bundle) = load(&file, &set)?;
            print_resolved(&bundle);
            let report =
                finding_checks(&bundle).map_err(|e| Failure::Validation(e.to_string()))?;
            for (label, pass) in report.lines() {
                println!("{}: {label}", if pass { "pass" } else { "FAIL" });
            }
            if report.all_findings_pass() && report.no_interior_peak_without_friendly_fire {
                Ok(())
            } else {
                Err(Failure::Check("one or more findings checks failed".into()))
            }
        }
    }
}

fn cmd_table(
    bundle: &ScenarioBundle,
    armed: bool,
    format: Format,
    rule: HorizonRule,
    phases: bool,
) -> Result<(), Failure> {
    if let ArenaScenario::Hallway(_) = &bundle.arena {
        return hallway_table(bundle, format);
    }
    match format {
        Format::Csv => {
            if phases {
                if let ArenaScenario::Complex(s) = &bundle.arena {
                    print!("{}", phase_breakdown(s, &bundle.armament, armed, rule).to_csv());
                    return Ok(());
                }
            }
            let table = survival_table(bundle, armed, rule)
                .map_err(|e| Failure::Validation(e.to_string()))?;
            print!("{}", table.to_csv());
        }
        Format::Text => {
            let armed_table = survival_table(bundle, true, rule)
                .map_err(|e| Failure::Validation(e.to_string()))?;
            let unarmed_table = survival_table(bundle, false, rule)
                .map_err(|e| Failure::Validation(e.to_string()))?;
            if let (ArenaScenario::Complex(s), true) = (&bundle.arena, phases) {
                let breakdown = phase_breakdown(s, &bundle.armament, armed, rule);
                println!("present at the final phase: {:.3}", breakdown.p_s);
                let p1t = &breakdown.phase1_table;
                if p1t.horizon() > 0 {
                    println!("evacuation phase:");
                    print!(
                        "{}",
                        render_rows(
                            p1t.horizon(),
                            p1t.actions()
                                .into_iter()
                                .map(|a| (a.label().to_string(), p1t.row(a).unwrap().to_vec()))
                                .collect()
                        )
                    );
                }
                println!("final phase:");
            }
            let mut rows = vec![
                ("fight (armed)".to_string(), armed_table.fight.clone()),
                ("fight (unarmed)".to_string(), unarmed_table.fight.clone()),
                ("hide".to_string(), armed_table.hide.clone()),
            ];
            if let Some(run) = &armed_table.run {
                rows.push(("run".to_string(), run.clone()));
            }
            print!("{}", render_rows(armed_table.horizon(), rows));
        }
    }
    Ok(())
}

fn hallway_table(bundle: &ScenarioBundle, format: Format) -> Result<(), Failure> {
    let a = &bundle.armament;
    let fight_armed = a.fight_tilde(true).ok_or_else(|| {
        Failure::Validation("p_tilde2 is required for a hallway scenario".into())
    })?;
    let fight_unarmed = a.fight_tilde(false).ok_or_else(|| {
        Failure::Validation("p_tilde1 is required for a hallway scenario".into())
    })?;
    let p_r = a.p_r.ok_or_else(|| Failure::Validation("p_r is required".into()))?;
    let p_h = a.p_h.ok_or_else(|| Failure::Validation("p_h is required".into()))?;
    match format {
        Format::Csv => {
            println!("minute,fight,hide,run");
            println!("1,{fight_armed:.6},{p_h:.6},{p_r:.6}");
        }
        Format::Text => {
            print!(
                "{}",
                render_rows(
                    1,
                    vec![
                        ("fight (armed)".into(), vec![fight_armed]),
                        ("fight (unarmed)".into(), vec![fight_unarmed]),
                        ("hide".into(), vec![p_h]),
                        ("run".into(), vec![p_r]),
                    ]
                )
            );
        }
    }
    Ok(())
}

fn cmd_policy(
    bundle: &ScenarioBundle,
    armed: bool,
    paper_view: bool,
    reoptimize: bool,
    format: Format,
) -> Result<(), Failure> {
    if let ArenaScenario::Hallway(h) = &bundle.arena {
        let first =
            hallway_first_minute(&bundle.armament, armed).map_err(|e| Failure::Validation(e.to_string()))?;
        let mode = if reoptimize {
            HallwayContinuation::Reoptimize
        } else {
            HallwayContinuation::HideOnly
        };
        let survival = hallway_survival(h, &bundle.armament, armed, mode)
            .map_err(|e| Failure::Validation(e.to_string()))?;
        println!("first minute: {first}");
        println!("survival if hiding into an arena: {survival:.6}");
        return Ok(());
    }
    let table = survival_table(bundle, armed, HorizonRule::ArrivalCapped)
        .map_err(|e| Failure::Validation(e.to_string()))?;
    let plan = optimal_deviation(&table);
    match format {
        Format::Csv => print!("{}", plan.to_csv()),
        Format::Text => print!("{}", plan.to_text()),
    }
    if paper_view {
        let extended = survival_table(bundle, armed, HorizonRule::ProductExtended)
            .map_err(|e| Failure::Validation(e.to_string()))?;
        println!("per-minute view:");
        for (minute, action) in per_minute_comparison(&extended) {
            println!("minute {minute:>2}: {action}");
        }
    }
    Ok(())
}

/// Analytic reference for a simulated strategy: the matching table entry.
fn analytic_for(
    bundle: &ScenarioBundle,
    armed: bool,
    strategy: &ComplexStrategy,
) -> Result<f64, Failure> {
    let invalid = |what: &str| Failure::Validation(what.to_string());
    if let ArenaScenario::Complex(s) = &bundle.arena {
        if let Some(action) = match strategy.phase1 {
            Strategy::FightAt(k) => Some((Action::Fight, k)),
            Strategy::RunAt(k) => Some((Action::Run, k)),
            Strategy::HideThroughout => None,
        } {
            let t = fhr_core::complex::phase1_table(s, &bundle.armament, armed);
            return t
                .get(action.0, action.1)
                .ok_or_else(|| invalid("strategy minute is outside the evacuation phase"));
        }
    }
    let table = survival_table(bundle, armed, HorizonRule::ArrivalCapped)
        .map_err(|e| Failure::Validation(e.to_string()))?;
    match strategy.phase2 {
        Strategy::FightAt(k) => table
            .get(Action::Fight, k)
            .ok_or_else(|| invalid("strategy minute is beyond the incident horizon")),
        Strategy::RunAt(k) => table
            .get(Action::Run, k)
            .ok_or_else(|| invalid("strategy minute is beyond the incident horizon")),
        Strategy::HideThroughout => Ok(table
            .get(Action::Hide, table.horizon())
            .expect("tables span at least one minute")),
    }
}

fn cmd_simulate(
    bundle: &ScenarioBundle,
    strategy: &str,
    cfg: TrialConfig,
    armed: bool,
) -> Result<(), Failure> {
    let script: ComplexStrategy = strategy
        .parse()
        .map_err(|e: fhr_core::Error| Failure::Validation(e.to_string()))?;
    let analytic = analytic_for(bundle, armed, &script)?;
    let sim_err = |e: fhr_core::Error| Failure::Validation(e.to_string());
    let estimate: Estimate = match (&bundle.arena, &bundle.multi_armed) {
        (ArenaScenario::Complex(s), None) => {
            simulate_complex(s, &bundle.armament, armed, script, &cfg).map_err(sim_err)?
        }
        (ArenaScenario::Complex(_), Some(profile)) => {
            if script.phase1 != Strategy::HideThroughout {
                return Err(Failure::Validation(
                    "joint-fight simulation addresses the final phase; use fight@k or run@k".into(),
                ));
            }
            simulate_multi_armed(&bundle.arena, &bundle.armament, profile, armed, script.phase2, &cfg)
                .map_err(sim_err)?
        }
        (ArenaScenario::Closed(s), None) => {
            simulate_closed(s, bundle.armament.fight(armed), script.phase2, &cfg).map_err(sim_err)?
        }
        (ArenaScenario::Open(s), None) => {
            let p_r = bundle
                .armament
                .p_r
                .ok_or_else(|| Failure::Validation("p_r is required for an open scenario".into()))?;
            simulate_open(s, bundle.armament.fight(armed), p_r, script.phase2, &cfg)
                .map_err(sim_err)?
        }
        (ArenaScenario::Hallway(_), _) => {
            return Err(Failure::Validation(
                "hallway survival is analytic; the oracle simulates pooled arenas".into(),
            ))
        }
        (_, Some(profile)) => {
            simulate_multi_armed(&bundle.arena, &bundle.armament, profile, armed, script.phase2, &cfg)
                .map_err(sim_err)?
        }
    };
    println!("# generator: {GENERATOR}");
    println!("{}", EstimateReport::csv_header());
    println!("{}", estimate.report(strategy, analytic, &cfg).to_csv_row());
    Ok(())
}

fn cmd_compare(
    bundle: &ScenarioBundle,
    cfg: TrialConfig,
    armed: bool,
    z_threshold: f64,
) -> Result<(), Failure> {
    let reports =
        compare_bundle(bundle, armed, &cfg).map_err(|e| Failure::Validation(e.to_string()))?;
    println!("# generator: {GENERATOR}");
    println!("{}", EstimateReport::csv_header());
    let mut worst: f64 = 0.0;
    let mut failed = String::new();
    for r in &reports {
        println!("{}", r.to_csv_row());
        worst = worst.max(r.z.abs());
        if r.z.abs() >= z_threshold {
            let _ = write!(failed, " {}", r.quantity);
        }
    }
    println!("# max |z| = {worst:.3} over {} entries", reports.len());
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!(
            "entries exceeding the z threshold {z_threshold}:{failed}"
        )))
    }
}
