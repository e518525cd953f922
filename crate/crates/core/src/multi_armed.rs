//! Multiple armed civilians: joint fight success with friendly fire.
//!
//! When an armed civilian fights at minute `i`, `j - 1` of the other armed
//! civilians join immediately. The shooter dies if any of the `j` fighters
//! succeeds (probability `p2` each, independently); independently, each of
//! the `j - 1` joiners strays with probability `p_f`, hitting a uniformly
//! random other civilian. The focal fighter survives the engagement iff the
//! shooter dies and no stray round finds him:
//!
//! `g = [1 - (1 - p2)^j] * [1 - p_f / (pool - 1)]^(j-1)`
//!
//! `pool` is the headcount at the start of the minute. Raising `j` raises
//! the first factor but lowers the second, so `g` can peak strictly inside
//! `1..=pool`: more armed civilians stop helping once friendly fire
//! dominates.

use crate::analytic::{closed_fight_row_with, closed_hide_row, open_table_raw, HorizonRule};
use crate::complex::phase2_table_with;
use crate::error::{Error, Result};
use crate::scenario::{ArenaScenario, ArmamentProfile, MultiArmedProfile};
use crate::table::{CaseTag, SurvivalTable};

/// Joint fight-and-survive probability for one of `j` simultaneous fighters
/// in a pool of `n_pool` civilians.
pub fn g(p2: f64, p_f: f64, j: u64, n_pool: u64) -> Result<f64> {
    if j < 1 {
        return Err(Error::RangeViolation("at least one fighter is required".into()));
    }
    if j == 1 {
        // One fighter, no strays: exactly the single-fighter probability.
        return Ok(p2);
    }
    if n_pool <= 1 {
        return Err(Error::DegeneratePool(format!(
            "{j} fighters need other civilians present (pool = {n_pool})"
        )));
    }
    let shooter_down = 1.0 - (1.0 - p2).powi(j as i32);
    let no_stray_hit = (1.0 - p_f / (n_pool - 1) as f64).powi(j as i32 - 1);
    Ok(shooter_down * no_stray_hit)
}

/// Sufficient condition for the rise-then-fall shape of `g` over the number
/// of fighters (checked at the point where the second derivative argument
/// sits, exponent `(1 - p2)^2`).
pub fn unimodality_condition(p2: f64, p_f: f64, n_pool: u64) -> bool {
    assert!(n_pool >= 2, "condition needs at least two civilians");
    let a = 1.0 - p_f / (n_pool - 1) as f64;
    let base = a * (1.0 - p2);
    a / base.powf((1.0 - p2) * (1.0 - p2)) > 1.0
}

/// `g` over every fighter count `1..=n_pool` (all armed civilians join).
pub fn g_curve(p2: f64, p_f: f64, n_pool: u64) -> Vec<(u64, f64)> {
    (1..=n_pool)
        .map(|j| (j, g(p2, p_f, j, n_pool).expect("pool >= j >= 1")))
        .collect()
}

/// CSV rendering of the curve: `j,g`, six decimal places.
pub fn g_curve_csv(p2: f64, p_f: f64, n_pool: u64) -> String {
    let mut out = String::from("j,g\n");
    for (j, v) in g_curve(p2, p_f, n_pool) {
        out.push_str(&format!("{j},{v:.6}\n"));
    }
    out
}

/// Fighter count maximizing `g`, by exhaustive scan; ties break toward the
/// smaller count.
pub fn peak_armed_count(p2: f64, p_f: f64, n_pool: u64) -> u64 {
    assert!(n_pool >= 1);
    let mut best = (1u64, f64::MIN);
    for (j, v) in g_curve(p2, p_f, n_pool) {
        if v > best.1 {
            best = (j, v);
        }
    }
    best.0
}

/// Number of strict local maxima of a sequence (boundary entries count when
/// they strictly beat their single neighbor).
pub fn strict_local_maxima(values: &[f64]) -> usize {
    let n = values.len();
    (0..n)
        .filter(|&i| {
            (i == 0 || values[i] > values[i - 1]) && (i + 1 == n || values[i] > values[i + 1])
        })
        .count()
}

/// True when the sequence never strictly rises again after a strict fall.
pub fn is_unimodal(values: &[f64]) -> bool {
    let mut falling = false;
    for w in values.windows(2) {
        if w[1] < w[0] {
            falling = true;
        } else if w[1] > w[0] && falling {
            return false;
        }
    }
    true
}

fn unarmed_base(arena: &ArenaScenario, armament: &ArmamentProfile) -> Result<f64> {
    match arena {
        ArenaScenario::Complex(_) => armament.p_tilde1.ok_or_else(|| {
            Error::RangeViolation("p_tilde1 is required for a complex scenario".into())
        }),
        _ => Ok(armament.p1),
    }
}

fn armed_base(arena: &ArenaScenario, armament: &ArmamentProfile) -> Result<f64> {
    match arena {
        ArenaScenario::Complex(_) => armament.p_tilde2.ok_or_else(|| {
            Error::RangeViolation("p_tilde2 is required for a complex scenario".into())
        }),
        _ => Ok(armament.p2),
    }
}

/// Per-minute fight success probabilities over the fight horizon.
///
/// Armed: `g` with that minute's joiner count and headcount. Unarmed: the
/// constant single-fighter probability (nobody joins an unarmed fighter).
pub fn effective_fight_probabilities(
    arena: &ArenaScenario,
    armament: &ArmamentProfile,
    profile: &MultiArmedProfile,
    armed: bool,
) -> Result<Vec<f64>> {
    let pools = arena.census_profile().map_err(|e| match e {
        Error::DegenerateScenario(_) => Error::RangeViolation(
            "multi_armed profiles are not supported for hallway scenarios".into(),
        ),
        other => other,
    })?;
    if !armed {
        let p1 = unarmed_base(arena, armament)?;
        return Ok(vec![p1; pools.len()]);
    }
    let p2 = armed_base(arena, armament)?;
    let p_f = profile.p_f(p2);
    pools
        .iter()
        .enumerate()
        .map(|(idx, &pool)| {
            let minute = idx as u32 + 1;
            let j = profile
                .j_schedule
                .value(minute, pool)
                .ok_or_else(|| Error::ScheduleViolation("schedule too short".into()))?;
            g(p2, p_f, j, pool)
        })
        .collect()
}

/// Survival table with the fight row driven by the per-minute joint
/// probabilities; hide and run rows are identical to the single-civilian
/// table for the same scenario.
pub fn multi_armed_table(
    arena: &ArenaScenario,
    armament: &ArmamentProfile,
    profile: &MultiArmedProfile,
    armed: bool,
    rule: HorizonRule,
) -> Result<SurvivalTable> {
    let probs = effective_fight_probabilities(arena, armament, profile, armed)?;
    let p_at = |i: u32| probs[i as usize - 1];
    Ok(match arena {
        ArenaScenario::Closed(s) => SurvivalTable {
            case: CaseTag::from_horizons(s.t1(), s.t2()),
            fight: closed_fight_row_with(s, p_at),
            hide: closed_hide_row(s),
            run: None,
        },
        ArenaScenario::Open(s) => {
            let p_r = armament
                .p_r
                .ok_or_else(|| Error::RangeViolation("p_r is required for an open scenario".into()))?;
            open_table_raw(s.n(), s.m(), s.e(), s.t2(), p_at, p_r, rule)
        }
        ArenaScenario::Complex(s) => {
            let p_run = armament.p_r_tilde.ok_or_else(|| {
                Error::RangeViolation("p_r_tilde is required for a complex scenario".into())
            })?;
            phase2_table_with(s, p_at, p_run, rule)
        }
        ArenaScenario::Hallway(_) => {
            return Err(Error::RangeViolation(
                "multi_armed profiles are not supported for hallway scenarios".into(),
            ))
        }
    })
}
