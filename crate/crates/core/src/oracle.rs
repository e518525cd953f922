//! Independent Monte Carlo verification of the analytic tables.
//!
//! Each trial follows the civilian of focus through the incident's
//! generative assumptions directly: per-minute victim (and exiter) subsets
//! are drawn by partial Fisher-Yates over the present-pool index array, with
//! the focal civilian an ordinary indexed member. Kill counts are exact
//! (the model fixes the rate per minute), not binomial.
//!
//! Reproducibility: the generator is ChaCha8. Trials are split into
//! fixed-size blocks; block `b` of a run with seed `s` uses a ChaCha8 key of
//! `s` and `b` in little-endian bytes (zero-padded), so estimates do not
//! depend on how many workers execute the blocks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analytic::{closed_table, open_survival_table, HorizonRule};
use crate::complex::{p_s, phase1_table, phase2_table};
use crate::error::{Error, Result};
use crate::multi_armed::multi_armed_table;
use crate::scenario::{
    ArenaScenario, ArmamentProfile, ClosedScenario, ComplexScenario, MultiArmedProfile,
    OpenScenario, ScenarioBundle, Schedule,
};
use crate::table::Action;

/// Name of the pseudo-random generator backing every estimate.
pub const GENERATOR: &str = "ChaCha8";

const DEFAULT_BLOCK_SIZE: u64 = 1 << 14;

/// Trial count, seed, and block layout of a simulation run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialConfig {
    pub trials: u64,
    pub seed: u64,
    /// Trials per deterministic block; part of the reproducibility contract.
    pub block_size: u64,
}

impl TrialConfig {
    pub fn new(trials: u64, seed: u64) -> Self {
        assert!(trials >= 1, "at least one trial is required");
        TrialConfig { trials, seed, block_size: DEFAULT_BLOCK_SIZE }
    }
}

/// Per-minute action script for the civilian of focus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    HideThroughout,
    /// Hide through minute `k - 1`, fight at minute `k`.
    FightAt(u32),
    /// Hide through minute `k - 1`, run at minute `k`.
    RunAt(u32),
}

impl Strategy {
    fn action_at(&self, minute: u32) -> Option<Action> {
        match *self {
            Strategy::FightAt(k) if k == minute => Some(Action::Fight),
            Strategy::RunAt(k) if k == minute => Some(Action::Run),
            _ => None,
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, minute) = match s.split_once('@') {
            Some((head, tail)) => {
                let minute: u32 = tail.parse().map_err(|_| {
                    Error::RangeViolation(format!("bad strategy minute in {s:?}"))
                })?;
                if minute < 1 {
                    return Err(Error::RangeViolation("strategy minutes are 1-based".into()));
                }
                (head, minute)
            }
            None => (s, 1),
        };
        match head {
            "hide" => Ok(Strategy::HideThroughout),
            "fight" => Ok(Strategy::FightAt(minute)),
            "run" => Ok(Strategy::RunAt(minute)),
            _ => Err(Error::RangeViolation(format!(
                "unrecognized strategy {s:?}; expected hide, fight[@k], or run[@k]"
            ))),
        }
    }
}

/// Strategy for a complex arena: at most one deviation, placed in either
/// the evacuation phase or the final phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComplexStrategy {
    pub phase1: Strategy,
    pub phase2: Strategy,
}

impl ComplexStrategy {
    pub fn hide() -> Self {
        ComplexStrategy { phase1: Strategy::HideThroughout, phase2: Strategy::HideThroughout }
    }

    pub fn in_phase1(s: Strategy) -> Self {
        ComplexStrategy { phase1: s, phase2: Strategy::HideThroughout }
    }

    pub fn in_phase2(s: Strategy) -> Self {
        ComplexStrategy { phase1: Strategy::HideThroughout, phase2: s }
    }
}

impl std::str::FromStr for ComplexStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(rest) = s.strip_prefix("phase1:") {
            Ok(ComplexStrategy::in_phase1(rest.parse()?))
        } else if let Some(rest) = s.strip_prefix("phase2:") {
            Ok(ComplexStrategy::in_phase2(rest.parse()?))
        } else {
            Ok(ComplexStrategy::in_phase2(s.parse()?))
        }
    }
}

/// Success count out of a trial count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Estimate {
    pub successes: u64,
    pub trials: u64,
}

impl Estimate {
    pub fn mean(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }

    /// `sqrt(p_hat (1 - p_hat) / trials)`.
    pub fn std_error(&self) -> f64 {
        let p = self.mean();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    /// Standardized deviation from an analytic reference. The denominator
    /// uses the larger of the empirical and reference variances so exact
    /// 0/1 outcomes and tiny trial counts stay well defined.
    pub fn z_against(&self, analytic: f64) -> f64 {
        let v_hat = self.mean() * (1.0 - self.mean());
        let v_ref = analytic * (1.0 - analytic);
        let denom = (v_hat.max(v_ref) / self.trials as f64).sqrt();
        let diff = self.mean() - analytic;
        if denom == 0.0 {
            if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            diff / denom
        }
    }

    pub fn report(&self, quantity: impl Into<String>, analytic: f64, cfg: &TrialConfig) -> EstimateReport {
        EstimateReport {
            quantity: quantity.into(),
            estimate: self.mean(),
            std_error: self.std_error(),
            analytic,
            z: self.z_against(analytic),
            trials: self.trials,
            seed: cfg.seed,
            generator: GENERATOR,
        }
    }
}

/// One verified quantity: the estimate, its uncertainty, and the analytic
/// value it is checked against.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    pub quantity: String,
    pub estimate: f64,
    pub std_error: f64,
    pub analytic: f64,
    pub z: f64,
    pub trials: u64,
    pub seed: u64,
    pub generator: &'static str,
}

impl EstimateReport {
    pub fn csv_header() -> &'static str {
        "quantity,estimate,stderr,analytic,z,trials,seed"
    }

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{:.6},{:.6},{:.6},{:.3},{},{}",
            self.quantity, self.estimate, self.std_error, self.analytic, self.z, self.trials,
            self.seed
        )
    }
}

fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&block.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Present-pool index array with the focal civilian as member 0. Partial
/// Fisher-Yates removals keep every draw uniform over the live pool.
struct Urn {
    ids: Vec<u32>,
    focal: usize,
    active: usize,
}

impl Urn {
    fn new() -> Self {
        Urn { ids: Vec::new(), focal: 0, active: 0 }
    }

    fn reset(&mut self, n: u64) {
        self.ids.clear();
        self.ids.extend(0..n as u32);
        self.focal = 0;
        self.active = n as usize;
    }

    fn active(&self) -> u64 {
        self.active as u64
    }

    fn swap_out(&mut self, j: usize) {
        let last = self.active - 1;
        self.ids.swap(j, last);
        if self.focal == last {
            self.focal = j;
        }
        self.active = last;
    }

    /// Remove `count` uniform members, never the focal (exiters while the
    /// focal civilian hides).
    fn remove_non_focal(&mut self, rng: &mut ChaCha8Rng, count: u64) {
        for _ in 0..count {
            debug_assert!(self.active >= 2, "an exit draw needs a non-focal member");
            let mut j = rng.random_range(0..self.active - 1);
            if j >= self.focal {
                j += 1;
            }
            self.swap_out(j);
        }
    }

    /// Remove `count` uniform members from everyone present; true when the
    /// focal civilian is among them.
    fn kill(&mut self, rng: &mut ChaCha8Rng, count: u64) -> bool {
        for _ in 0..count {
            debug_assert!(self.active >= 1);
            let j = rng.random_range(0..self.active);
            if j == self.focal {
                return true;
            }
            self.swap_out(j);
        }
        false
    }
}

/// Run trials in seeded blocks, in parallel, and fold the per-block success
/// counts in block order.
fn count_successes<F>(cfg: &TrialConfig, trial: F) -> u64
where
    F: Fn(&mut ChaCha8Rng, &mut Urn) -> bool + Sync,
{
    let blocks = cfg.trials.div_ceil(cfg.block_size);
    let counts: Vec<u64> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = block_rng(cfg.seed, b);
            let mut urn = Urn::new();
            let lo = b * cfg.block_size;
            let hi = ((b + 1) * cfg.block_size).min(cfg.trials);
            (lo..hi).filter(|_| trial(&mut rng, &mut urn)).count() as u64
        })
        .collect();
    counts.into_iter().sum()
}

/// Like [`count_successes`] but each trial reports how many consecutive
/// stages it survived; returns one estimate per stage (`>= s` counts).
fn stage_counts<F>(cfg: &TrialConfig, stages: usize, trial: F) -> Vec<Estimate>
where
    F: Fn(&mut ChaCha8Rng, &mut Urn) -> usize + Sync,
{
    let blocks = cfg.trials.div_ceil(cfg.block_size);
    let per_block: Vec<Vec<u64>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = block_rng(cfg.seed, b);
            let mut urn = Urn::new();
            let mut counts = vec![0u64; stages];
            let lo = b * cfg.block_size;
            let hi = ((b + 1) * cfg.block_size).min(cfg.trials);
            for _ in lo..hi {
                let survived = trial(&mut rng, &mut urn);
                for c in counts.iter_mut().take(survived.min(stages)) {
                    *c += 1;
                }
            }
            counts
        })
        .collect();
    let mut totals = vec![0u64; stages];
    for counts in per_block {
        for (t, c) in totals.iter_mut().zip(counts) {
            *t += c;
        }
    }
    totals
        .into_iter()
        .map(|successes| Estimate { successes, trials: cfg.trials })
        .collect()
}

/// How a fight at a given minute resolves for the focal civilian.
enum FightModel<'a> {
    Single(f64),
    Joint { p2: f64, p_f: f64, j_schedule: &'a Schedule },
}

impl FightModel<'_> {
    /// `census` is the headcount at the start of the minute, focal included.
    fn resolve(&self, rng: &mut ChaCha8Rng, minute: u32, census: u64) -> bool {
        match self {
            FightModel::Single(p) => rng.random_bool(*p),
            FightModel::Joint { p2, p_f, j_schedule } => {
                let j = j_schedule
                    .value(minute, census)
                    .expect("schedules were validated over the fight horizon");
                let mut shooter_down = false;
                for _ in 0..j {
                    if rng.random_bool(*p2) {
                        shooter_down = true;
                    }
                }
                if !shooter_down {
                    return false; // the shooter kills the fighters
                }
                // Each joiner strays with probability p_f, hitting a uniform
                // one of the census - 1 civilians other than himself; the
                // focal fighter occupies one of those slots.
                for _ in 1..j {
                    if rng.random_bool(*p_f) {
                        debug_assert!(census >= 2);
                        if rng.random_range(0..census - 1) == 0 {
                            return false;
                        }
                    }
                }
                true
            }
        }
    }
}

fn closed_trial(
    s: &ClosedScenario,
    fight: &FightModel<'_>,
    strategy: Strategy,
    rng: &mut ChaCha8Rng,
    urn: &mut Urn,
) -> bool {
    urn.reset(s.n());
    let last = s.t1().min(s.t2());
    for minute in 1..=last {
        debug_assert_eq!(urn.active(), s.census(minute).unwrap());
        match strategy.action_at(minute) {
            Some(Action::Fight) => return fight.resolve(rng, minute, urn.active()),
            Some(Action::Run) => unreachable!("rejected before simulation"),
            _ => {
                if urn.kill(rng, s.m()) {
                    return false;
                }
            }
        }
    }
    // Alive at the authority's arrival (the empty-arena case never gets
    // here: the last minute's kill sweep covers everyone left).
    true
}

fn open_trial(
    s: &OpenScenario,
    fight: &FightModel<'_>,
    p_r: f64,
    strategy: Strategy,
    rng: &mut ChaCha8Rng,
    urn: &mut Urn,
) -> bool {
    urn.reset(s.n());
    let last = s.t1().min(s.t2());
    for minute in 1..=last {
        debug_assert_eq!(urn.active(), s.census(minute).unwrap());
        match strategy.action_at(minute) {
            Some(Action::Fight) => return fight.resolve(rng, minute, urn.active()),
            Some(Action::Run) => return rng.random_bool(p_r),
            _ => {
                urn.remove_non_focal(rng, s.e());
                if urn.kill(rng, s.m()) {
                    return false;
                }
            }
        }
    }
    true
}

/// Survival under the given script in a closed arena, `p` being the fight
/// success probability.
pub fn simulate_closed(
    s: &ClosedScenario,
    p: f64,
    strategy: Strategy,
    cfg: &TrialConfig,
) -> Result<Estimate> {
    if matches!(strategy, Strategy::RunAt(_)) {
        return Err(Error::RangeViolation("a closed arena offers no run option".into()));
    }
    let fight = FightModel::Single(p);
    let successes =
        count_successes(cfg, |rng, urn| closed_trial(s, &fight, strategy, rng, urn));
    Ok(Estimate { successes, trials: cfg.trials })
}

/// Survival under the given script in an open arena.
pub fn simulate_open(
    s: &OpenScenario,
    p: f64,
    p_r: f64,
    strategy: Strategy,
    cfg: &TrialConfig,
) -> Result<Estimate> {
    let fight = FightModel::Single(p);
    let successes =
        count_successes(cfg, |rng, urn| open_trial(s, &fight, p_r, strategy, rng, urn));
    Ok(Estimate { successes, trials: cfg.trials })
}

/// Minutes survived while hiding, one estimate per minute of the incident.
pub fn closed_hide_profile(s: &ClosedScenario, cfg: &TrialConfig) -> Vec<Estimate> {
    let last = s.t1().min(s.t2()) as usize;
    stage_counts(cfg, last, |rng, urn| {
        urn.reset(s.n());
        for minute in 1..=last {
            if urn.kill(rng, s.m()) {
                return minute - 1;
            }
        }
        last
    })
}

pub fn open_hide_profile(s: &OpenScenario, cfg: &TrialConfig) -> Vec<Estimate> {
    let last = s.t1().min(s.t2()) as usize;
    stage_counts(cfg, last, |rng, urn| {
        urn.reset(s.n());
        for minute in 1..=last {
            urn.remove_non_focal(rng, s.e());
            if urn.kill(rng, s.m()) {
                return minute - 1;
            }
        }
        last
    })
}

#[allow(clippy::too_many_arguments)]
fn complex_trial(
    s: &ComplexScenario,
    phase1_fight: f64,
    p_r: f64,
    phase2_fight: &FightModel<'_>,
    p_r_tilde: f64,
    strategy: ComplexStrategy,
    rng: &mut ChaCha8Rng,
    urn: &mut Urn,
) -> bool {
    // Initiation: N - N1 victims out of the full crowd, nobody reacts.
    urn.reset(s.n());
    if urn.kill(rng, s.n() - s.n1()) {
        return false;
    }
    // Evacuation: victim pools thin from the full initial headcount.
    urn.reset(s.n());
    for minute in 1..=s.phase1_minutes() {
        debug_assert_eq!(urn.active(), s.phase1_census(minute).unwrap());
        match strategy.phase1.action_at(minute) {
            Some(Action::Fight) => return rng.random_bool(phase1_fight),
            Some(Action::Run) => return rng.random_bool(p_r),
            _ => {
                urn.remove_non_focal(rng, s.e1());
                if urn.kill(rng, s.m1()) {
                    return false;
                }
            }
        }
    }
    // Seek and shoot: the survivors-only headcount takes over.
    urn.reset(s.n2());
    let last = s.t1().min(s.t2());
    for minute in 1..=last {
        debug_assert_eq!(urn.active(), s.phase2_census(minute).unwrap());
        match strategy.phase2.action_at(minute) {
            Some(Action::Fight) => return phase2_fight.resolve(rng, minute, urn.active()),
            Some(Action::Run) => return rng.random_bool(p_r_tilde),
            _ => {
                urn.remove_non_focal(rng, s.e2());
                if urn.kill(rng, s.m2()) {
                    return false;
                }
            }
        }
    }
    true
}

/// Survival across all three phases under the given script.
pub fn simulate_complex(
    s: &ComplexScenario,
    armament: &ArmamentProfile,
    armed: bool,
    strategy: ComplexStrategy,
    cfg: &TrialConfig,
) -> Result<Estimate> {
    let phase1_fight = armament.fight_tilde(armed).ok_or_else(|| {
        Error::RangeViolation("evacuation-phase fight probabilities are required".into())
    })?;
    let p_r = armament
        .p_r
        .ok_or_else(|| Error::RangeViolation("p_r is required for a complex scenario".into()))?;
    let p_r_tilde = armament.p_r_tilde.ok_or_else(|| {
        Error::RangeViolation("p_r_tilde is required for a complex scenario".into())
    })?;
    let fight = FightModel::Single(armament.fight(armed));
    let successes = count_successes(cfg, |rng, urn| {
        complex_trial(s, phase1_fight, p_r, &fight, p_r_tilde, strategy, rng, urn)
    });
    Ok(Estimate { successes, trials: cfg.trials })
}

/// Estimate of being alive and present when the final phase starts.
pub fn simulate_ps(s: &ComplexScenario, cfg: &TrialConfig) -> Estimate {
    let successes = count_successes(cfg, |rng, urn| {
        urn.reset(s.n());
        if urn.kill(rng, s.n() - s.n1()) {
            return false;
        }
        urn.reset(s.n());
        for minute in 1..=s.phase1_minutes() {
            urn.remove_non_focal(rng, s.e1());
            if urn.kill(rng, s.m1()) {
                return false;
            }
            debug_assert_eq!(urn.active(), s.phase1_census(minute).unwrap() - s.e1() - s.m1());
        }
        true
    });
    Estimate { successes, trials: cfg.trials }
}

/// Hide-chain estimates for a complex arena: per-minute survival through the
/// evacuation phase, presence at the final phase, and per-minute survival
/// through the final phase.
pub struct ComplexHideProfile {
    pub phase1: Vec<Estimate>,
    pub p_s: Estimate,
    pub phase2: Vec<Estimate>,
}

pub fn complex_hide_profile(s: &ComplexScenario, cfg: &TrialConfig) -> ComplexHideProfile {
    let n_minutes = s.phase1_minutes() as usize;
    let last2 = s.t1().min(s.t2()) as usize;
    let stages = 1 + n_minutes + last2;
    let estimates = stage_counts(cfg, stages, |rng, urn| {
        let mut survived = 0usize;
        urn.reset(s.n());
        if urn.kill(rng, s.n() - s.n1()) {
            return survived;
        }
        survived += 1;
        urn.reset(s.n());
        for _ in 0..n_minutes {
            urn.remove_non_focal(rng, s.e1());
            if urn.kill(rng, s.m1()) {
                return survived;
            }
            survived += 1;
        }
        urn.reset(s.n2());
        for _ in 0..last2 {
            urn.remove_non_focal(rng, s.e2());
            if urn.kill(rng, s.m2()) {
                return survived;
            }
            survived += 1;
        }
        survived
    });
    ComplexHideProfile {
        phase1: estimates[1..1 + n_minutes].to_vec(),
        p_s: estimates[n_minutes], // survived initiation + every evacuation minute
        phase2: estimates[1 + n_minutes..].to_vec(),
    }
}

/// Joint-fight survival under the given script. For a complex arena the
/// script addresses the final phase.
pub fn simulate_multi_armed(
    arena: &ArenaScenario,
    armament: &ArmamentProfile,
    profile: &MultiArmedProfile,
    armed: bool,
    strategy: Strategy,
    cfg: &TrialConfig,
) -> Result<Estimate> {
    let fight = if armed {
        let p2 = match arena {
            ArenaScenario::Complex(_) => armament.p_tilde2.ok_or_else(|| {
                Error::RangeViolation("p_tilde2 is required for a complex scenario".into())
            })?,
            _ => armament.p2,
        };
        FightModel::Joint { p2, p_f: profile.p_f(p2), j_schedule: &profile.j_schedule }
    } else {
        // Nobody joins an unarmed fighter.
        let p1 = match arena {
            ArenaScenario::Complex(_) => armament.p_tilde1.ok_or_else(|| {
                Error::RangeViolation("p_tilde1 is required for a complex scenario".into())
            })?,
            _ => armament.p1,
        };
        FightModel::Single(p1)
    };
    let successes = match arena {
        ArenaScenario::Closed(s) => {
            if matches!(strategy, Strategy::RunAt(_)) {
                return Err(Error::RangeViolation("a closed arena offers no run option".into()));
            }
            count_successes(cfg, |rng, urn| closed_trial(s, &fight, strategy, rng, urn))
        }
        ArenaScenario::Open(s) => {
            let p_r = armament.p_r.ok_or_else(|| {
                Error::RangeViolation("p_r is required for an open scenario".into())
            })?;
            count_successes(cfg, |rng, urn| open_trial(s, &fight, p_r, strategy, rng, urn))
        }
        ArenaScenario::Complex(s) => {
            let phase1_fight = armament.fight_tilde(armed).ok_or_else(|| {
                Error::RangeViolation("evacuation-phase fight probabilities are required".into())
            })?;
            let p_r = armament.p_r.ok_or_else(|| {
                Error::RangeViolation("p_r is required for a complex scenario".into())
            })?;
            let p_r_tilde = armament.p_r_tilde.ok_or_else(|| {
                Error::RangeViolation("p_r_tilde is required for a complex scenario".into())
            })?;
            let script = ComplexStrategy::in_phase2(strategy);
            count_successes(cfg, |rng, urn| {
                complex_trial(s, phase1_fight, p_r, &fight, p_r_tilde, script, rng, urn)
            })
        }
        ArenaScenario::Hallway(_) => {
            return Err(Error::RangeViolation(
                "multi_armed profiles are not supported for hallway scenarios".into(),
            ))
        }
    };
    Ok(Estimate { successes, trials: cfg.trials })
}

/// Run the oracle against every entry of the scenario's analytic tables.
///
/// Tables are built with [`HorizonRule::ArrivalCapped`] so every compared
/// entry describes a reachable outcome.
pub fn compare_bundle(
    bundle: &ScenarioBundle,
    armed: bool,
    cfg: &TrialConfig,
) -> Result<Vec<EstimateReport>> {
    let armament = &bundle.armament;
    let mut reports = Vec::new();
    match &bundle.arena {
        ArenaScenario::Closed(s) => {
            let table = match &bundle.multi_armed {
                Some(profile) => multi_armed_table(
                    &bundle.arena,
                    armament,
                    profile,
                    armed,
                    HorizonRule::ArrivalCapped,
                )?,
                None => closed_table(s, armament.fight(armed)),
            };
            let hide = closed_hide_profile(s, cfg);
            let last = s.t1().min(s.t2());
            for minute in 1..=table.horizon() {
                let est = match &bundle.multi_armed {
                    Some(profile) => simulate_multi_armed(
                        &bundle.arena,
                        armament,
                        profile,
                        armed,
                        Strategy::FightAt(minute),
                        cfg,
                    )?,
                    None => simulate_closed(s, armament.fight(armed), Strategy::FightAt(minute), cfg)?,
                };
                reports.push(est.report(
                    format!("fight@{minute}"),
                    table.get(Action::Fight, minute).unwrap(),
                    cfg,
                ));
                let idx = minute.min(last) as usize - 1;
                reports.push(hide[idx].report(
                    format!("hide@{minute}"),
                    table.get(Action::Hide, minute).unwrap(),
                    cfg,
                ));
            }
        }
        ArenaScenario::Open(s) => {
            let p_r = armament
                .p_r
                .ok_or_else(|| Error::RangeViolation("p_r is required for an open scenario".into()))?;
            let table = match &bundle.multi_armed {
                Some(profile) => multi_armed_table(
                    &bundle.arena,
                    armament,
                    profile,
                    armed,
                    HorizonRule::ArrivalCapped,
                )?,
                None => open_survival_table(s, armament.fight(armed), p_r, HorizonRule::ArrivalCapped),
            };
            let hide = open_hide_profile(s, cfg);
            let last = s.t1().min(s.t2());
            for minute in 1..=table.horizon() {
                let fight_est = match &bundle.multi_armed {
                    Some(profile) => simulate_multi_armed(
                        &bundle.arena,
                        armament,
                        profile,
                        armed,
                        Strategy::FightAt(minute),
                        cfg,
                    )?,
                    None => {
                        simulate_open(s, armament.fight(armed), p_r, Strategy::FightAt(minute), cfg)?
                    }
                };
                reports.push(fight_est.report(
                    format!("fight@{minute}"),
                    table.get(Action::Fight, minute).unwrap(),
                    cfg,
                ));
                let run_est =
                    simulate_open(s, armament.fight(armed), p_r, Strategy::RunAt(minute), cfg)?;
                reports.push(run_est.report(
                    format!("run@{minute}"),
                    table.get(Action::Run, minute).unwrap(),
                    cfg,
                ));
                let idx = minute.min(last) as usize - 1;
                reports.push(hide[idx].report(
                    format!("hide@{minute}"),
                    table.get(Action::Hide, minute).unwrap(),
                    cfg,
                ));
            }
        }
        ArenaScenario::Complex(s) => {
            let p1t = phase1_table(s, armament, armed);
            let p2t = match &bundle.multi_armed {
                Some(profile) => multi_armed_table(
                    &bundle.arena,
                    armament,
                    profile,
                    armed,
                    HorizonRule::ArrivalCapped,
                )?,
                None => phase2_table(s, armament, armed, HorizonRule::ArrivalCapped),
            };
            let hide = complex_hide_profile(s, cfg);
            reports.push(hide.p_s.report("p_s", p_s(s), cfg));
            for minute in 1..=s.phase1_minutes() {
                for (action, strategy) in [
                    (Action::Fight, Strategy::FightAt(minute)),
                    (Action::Run, Strategy::RunAt(minute)),
                ] {
                    let est = simulate_complex(
                        s,
                        armament,
                        armed,
                        ComplexStrategy::in_phase1(strategy),
                        cfg,
                    )?;
                    reports.push(est.report(
                        format!("phase1:{}@{minute}", action.label()),
                        p1t.get(action, minute).unwrap(),
                        cfg,
                    ));
                }
                reports.push(hide.phase1[minute as usize - 1].report(
                    format!("phase1:hide@{minute}"),
                    p1t.get(Action::Hide, minute).unwrap(),
                    cfg,
                ));
            }
            let last2 = s.t1().min(s.t2());
            for minute in 1..=p2t.horizon() {
                let fight_est = match &bundle.multi_armed {
                    Some(profile) => simulate_multi_armed(
                        &bundle.arena,
                        armament,
                        profile,
                        armed,
                        Strategy::FightAt(minute),
                        cfg,
                    )?,
                    None => simulate_complex(
                        s,
                        armament,
                        armed,
                        ComplexStrategy::in_phase2(Strategy::FightAt(minute)),
                        cfg,
                    )?,
                };
                reports.push(fight_est.report(
                    format!("phase2:fight@{minute}"),
                    p2t.get(Action::Fight, minute).unwrap(),
                    cfg,
                ));
                let run_est = simulate_complex(
                    s,
                    armament,
                    armed,
                    ComplexStrategy::in_phase2(Strategy::RunAt(minute)),
                    cfg,
                )?;
                reports.push(run_est.report(
                    format!("phase2:run@{minute}"),
                    p2t.get(Action::Run, minute).unwrap(),
                    cfg,
                ));
                let idx = minute.min(last2) as usize - 1;
                reports.push(hide.phase2[idx].report(
                    format!("phase2:hide@{minute}"),
                    p2t.get(Action::Hide, minute).unwrap(),
                    cfg,
                ));
            }
        }
        ArenaScenario::Hallway(_) => {
            return Err(Error::DegenerateScenario(
                "the oracle compares pool-based arenas; hallway survival is checked analytically"
                    .into(),
            ))
        }
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cfg(trials: u64, seed: u64) -> TrialConfig {
        TrialConfig::new(trials, seed)
    }

    #[test]
    fn strategy_parsing() {
        assert_eq!("hide".parse::<Strategy>().unwrap(), Strategy::HideThroughout);
        assert_eq!("fight".parse::<Strategy>().unwrap(), Strategy::FightAt(1));
        assert_eq!("fight@3".parse::<Strategy>().unwrap(), Strategy::FightAt(3));
        assert_eq!("run@2".parse::<Strategy>().unwrap(), Strategy::RunAt(2));
        assert!("walk".parse::<Strategy>().is_err());
        assert!("fight@0".parse::<Strategy>().is_err());
        let c: ComplexStrategy = "phase1:run@2".parse().unwrap();
        assert_eq!(c.phase1, Strategy::RunAt(2));
        let c: ComplexStrategy = "fight@2".parse().unwrap();
        assert_eq!(c.phase2, Strategy::FightAt(2));
    }

    #[test]
    fn certain_fight_success_is_exact() {
        let s = ClosedScenario::new(20, 5, 2).unwrap();
        let est = simulate_closed(&s, 1.0, Strategy::FightAt(1), &cfg(10_000, 7)).unwrap();
        assert_eq!(est.mean(), 1.0);
    }

    #[test]
    fn single_minute_arena_kills_every_hider() {
        let s = ClosedScenario::new(5, 5, 3).unwrap();
        let est = simulate_closed(&s, 0.5, Strategy::HideThroughout, &cfg(10_000, 7)).unwrap();
        assert_eq!(est.mean(), 0.0);
    }

    #[test]
    fn closed_hide_estimate_matches_analytic() {
        let s = ClosedScenario::new(20, 5, 2).unwrap();
        let est = simulate_closed(&s, 0.5, Strategy::HideThroughout, &cfg(100_000, 11)).unwrap();
        assert!(est.z_against(0.5).abs() < 4.0);
    }

    #[test]
    fn run_in_closed_arena_rejected() {
        let s = ClosedScenario::new(20, 5, 2).unwrap();
        assert!(simulate_closed(&s, 0.5, Strategy::RunAt(1), &cfg(10, 1)).is_err());
    }

    #[test]
    fn open_run_estimate_matches_analytic() {
        let s = OpenScenario::new(210, 15, 25, 4).unwrap();
        let est = simulate_open(&s, 0.3, 0.1, Strategy::RunAt(1), &cfg(100_000, 13)).unwrap();
        assert!(est.z_against(0.1).abs() < 4.0);
    }

    #[test]
    fn open_hide_profile_tracks_prefix_products() {
        let s = OpenScenario::new(210, 15, 25, 4).unwrap();
        let profile = open_hide_profile(&s, &cfg(100_000, 17));
        let expected = [34.0 / 37.0, 884.0 / 1073.0, 5304.0 / 7511.0, 4080.0 / 7511.0];
        assert_eq!(profile.len(), 4);
        for (est, want) in profile.iter().zip(expected) {
            assert!(est.z_against(want).abs() < 4.0, "estimate {} vs {want}", est.mean());
        }
    }

    #[test]
    fn open_pool_empties_exactly_when_divisible() {
        // Hiding through the final sustainable minute is fatal.
        let s = OpenScenario::new(40, 5, 5, 6).unwrap();
        let est = simulate_open(&s, 0.5, 0.5, Strategy::HideThroughout, &cfg(20_000, 3)).unwrap();
        assert_eq!(est.mean(), 0.0);
    }

    #[test]
    fn complex_ps_matches_reference_value() {
        let s = ComplexScenario::new(100, 80, 10, 5, 10, 5, 2, 3).unwrap();
        let est = simulate_ps(&s, &cfg(200_000, 19));
        assert!(est.z_against(64.0 / 105.0).abs() < 4.0);
    }

    #[test]
    fn complex_phase0_factor_only_when_no_evacuation() {
        let s = ComplexScenario::new(100, 99, 10, 5, 10, 5, 0, 3).unwrap();
        let est = simulate_ps(&s, &cfg(100_000, 23));
        assert!(est.z_against(0.99).abs() < 4.0);
    }

    #[test]
    fn multi_armed_single_joiner_reduces_to_single_fighter() {
        let arena = ArenaScenario::Open(OpenScenario::new(210, 15, 25, 4).unwrap());
        let armament = ArmamentProfile {
            p1: 0.05,
            p2: 0.3,
            p_tilde1: None,
            p_tilde2: None,
            p_r: Some(0.1),
            p_r_tilde: None,
            p_h: None,
        };
        let profile = MultiArmedProfile {
            friendly_fire: crate::scenario::FriendlyFire::Ratio(1.0 / 3.0),
            k_schedule: Schedule::Explicit(vec![1; 5]),
            j_schedule: Schedule::Explicit(vec![1; 5]),
        };
        let est = simulate_multi_armed(
            &arena,
            &armament,
            &profile,
            true,
            Strategy::FightAt(2),
            &cfg(100_000, 29),
        )
        .unwrap();
        // Analytic: p2 * hide(1) = 0.3 * 34/37.
        assert!(est.z_against(0.3 * 34.0 / 37.0).abs() < 4.0);
    }

    #[test]
    fn empirical_joint_success_curve_tracks_analytic() {
        // Sweep the joiner count at the reference curve parameters; each
        // empirical point must sit within 4 sigma of g, and the best
        // empirical point must be essentially as good as the true peak.
        let s = ClosedScenario::new(20, 5, 2).unwrap();
        let armament = ArmamentProfile {
            p1: 0.05,
            p2: 0.45,
            p_tilde1: None,
            p_tilde2: None,
            p_r: None,
            p_r_tilde: None,
            p_h: None,
        };
        let mut empirical = Vec::new();
        for j in 1..=20u64 {
            let profile = MultiArmedProfile {
                friendly_fire: crate::scenario::FriendlyFire::Explicit(0.2),
                k_schedule: Schedule::Explicit(vec![20; 4]),
                j_schedule: Schedule::Explicit(vec![j; 4]),
            };
            let arena = ArenaScenario::Closed(s);
            let est = simulate_multi_armed(
                &arena,
                &armament,
                &profile,
                true,
                Strategy::FightAt(1),
                &cfg(50_000, 600 + j),
            )
            .unwrap();
            let analytic = crate::multi_armed::g(0.45, 0.2, j, 20).unwrap();
            assert!(
                est.z_against(analytic).abs() < 4.0,
                "j = {j}: {} vs {analytic}",
                est.mean()
            );
            empirical.push(est.mean());
        }
        let best_j = (1..=20u64)
            .max_by(|a, b| {
                empirical[*a as usize - 1].total_cmp(&empirical[*b as usize - 1])
            })
            .unwrap();
        let peak = crate::multi_armed::peak_armed_count(0.45, 0.2, 20);
        let g_at = |j: u64| crate::multi_armed::g(0.45, 0.2, j, 20).unwrap();
        assert!(g_at(peak) - g_at(best_j) < 0.01, "empirical argmax {best_j} far from peak {peak}");
    }

    #[test]
    fn estimates_are_deterministic_and_worker_independent() {
        let s = OpenScenario::new(210, 15, 25, 4).unwrap();
        let run = || simulate_open(&s, 0.3, 0.1, Strategy::FightAt(2), &cfg(50_000, 42)).unwrap();
        let a = run();
        let b = run();
        assert_eq!(a, b);
        let single_threaded = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(run);
        assert_eq!(a, single_threaded);
    }

    #[test]
    fn z_score_guards_degenerate_variance() {
        let exact = Estimate { successes: 5, trials: 5 };
        assert_eq!(exact.z_against(1.0), 0.0);
        assert!(exact.z_against(0.9).is_finite());
        let off = Estimate { successes: 0, trials: 5 };
        assert!(off.z_against(1.0).is_infinite());
        // One trial: wide reference variance keeps |z| modest.
        let one = Estimate { successes: 1, trials: 1 };
        assert!(one.z_against(0.5).abs() <= 2.0);
    }

    #[test]
    fn report_csv_layout() {
        let est = Estimate { successes: 500, trials: 1000 };
        let report = est.report("hide@2", 0.5, &cfg(1000, 9));
        assert_eq!(EstimateReport::csv_header(), "quantity,estimate,stderr,analytic,z,trials,seed");
        let row = report.to_csv_row();
        assert!(row.starts_with("hide@2,0.500000,"));
        assert!(row.ends_with(",1000,9"));
        assert_eq!(report.generator, "ChaCha8");
    }

    #[test]
    fn compare_covers_every_entry_of_a_small_closed_scenario() {
        let bundle = ScenarioBundle::assemble(
            ClosedScenario::new(20, 5, 2).map(ArenaScenario::Closed),
            ArmamentProfile {
                p1: 0.05,
                p2: 0.6,
                p_tilde1: None,
                p_tilde2: None,
                p_r: None,
                p_r_tilde: None,
                p_h: None,
            },
            None,
            "closed",
        )
        .unwrap();
        let reports = compare_bundle(&bundle, true, &cfg(50_000, 31)).unwrap();
        // Horizon 4: a fight and a hide entry per minute.
        assert_eq!(reports.len(), 8);
        for r in &reports {
            assert!(r.z.abs() < 4.0, "{}: z = {}", r.quantity, r.z);
        }
        // The post-arrival fight entries equal the hide continuation value.
        let f3 = reports.iter().find(|r| r.quantity == "fight@3").unwrap();
        assert_abs_diff_eq!(f3.analytic, 0.5, epsilon = 1e-12);
    }
}
