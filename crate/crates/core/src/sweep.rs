//! Parameter sweeps and machine-checkable restatements of the model's
//! qualitative findings.

use crate::analytic::{closed_table, HorizonRule};
use crate::config::SweepFile;
use crate::error::{Error, Result};
use crate::multi_armed::peak_armed_count;
use crate::policy::{hallway_first_minute, hallway_survival, optimal_deviation, HallwayContinuation};
use crate::scenario::{ArenaScenario, ClosedScenario, ScenarioBundle};
use crate::survival_table;
use crate::table::{Action, CaseTag};

/// Outcome of evaluating one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub case: Option<CaseTag>,
    pub armed_first_action: Action,
    pub armed_deviation_minute: Option<u32>,
    pub armed_survival: f64,
    pub unarmed_first_action: Action,
    pub unarmed_deviation_minute: Option<u32>,
    pub unarmed_survival: f64,
    /// Armed minus unarmed achieved survival.
    pub survival_gap: f64,
    /// Fighter count maximizing the joint success at the opening headcount,
    /// when a joint-fight profile is present.
    pub g_peak: Option<u64>,
}

/// One grid point: its coordinates and either an outcome or the validation
/// failure that made the point unusable.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub coordinates: Vec<(String, f64)>,
    pub outcome: std::result::Result<SweepOutcome, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axes: Vec<String>,
    pub rows: Vec<SweepRow>,
}

fn plan_summary(bundle: &ScenarioBundle, armed: bool) -> Result<(Action, Option<u32>, f64)> {
    if let ArenaScenario::Hallway(h) = &bundle.arena {
        let action = hallway_first_minute(&bundle.armament, armed)?;
        let survival = hallway_survival(h, &bundle.armament, armed, HallwayContinuation::HideOnly)?;
        return Ok((action, None, survival));
    }
    let table = survival_table(bundle, armed, HorizonRule::ArrivalCapped)?;
    let plan = optimal_deviation(&table);
    let first = plan.steps.first().map(|s| s.action).unwrap_or(Action::Hide);
    Ok((first, plan.deviation.map(|(k, _)| k), plan.achieved))
}

fn evaluate(bundle: &ScenarioBundle) -> Result<SweepOutcome> {
    let (armed_first_action, armed_deviation_minute, armed_survival) =
        plan_summary(bundle, true)?;
    let (unarmed_first_action, unarmed_deviation_minute, unarmed_survival) =
        plan_summary(bundle, false)?;
    let case = match &bundle.arena {
        ArenaScenario::Closed(s) => Some(CaseTag::from_horizons(s.t1(), s.t2())),
        ArenaScenario::Open(s) => Some(CaseTag::from_horizons(s.t1(), s.t2())),
        ArenaScenario::Complex(s) => Some(CaseTag::from_horizons(s.t1(), s.t2())),
        ArenaScenario::Hallway(_) => None,
    };
    let g_peak = match &bundle.multi_armed {
        Some(profile) => {
            let p2 = match &bundle.arena {
                ArenaScenario::Complex(_) => bundle.armament.p_tilde2.unwrap_or(bundle.armament.p2),
                _ => bundle.armament.p2,
            };
            let pool = bundle.arena.census_profile()?[0];
            Some(peak_armed_count(p2, profile.p_f(p2), pool))
        }
        None => None,
    };
    Ok(SweepOutcome {
        case,
        armed_first_action,
        armed_deviation_minute,
        armed_survival,
        unarmed_first_action,
        unarmed_deviation_minute,
        unarmed_survival,
        survival_gap: armed_survival - unarmed_survival,
        g_peak,
    })
}

/// Evaluate the grid. Axis values are sorted ascending and points are
/// enumerated in lexicographic order, so the output is a pure function of
/// the specification. Invalid points become skip records, not silent
/// adjustments.
pub fn run_sweep(spec: &SweepFile) -> SweepResult {
    let mut axes: Vec<(String, Vec<f64>)> = spec
        .axes
        .iter()
        .map(|a| {
            let mut values = a.values.clone();
            values.sort_by(|x, y| x.partial_cmp(y).expect("axis values are ordered"));
            (a.param.clone(), values)
        })
        .collect();
    axes.retain(|(_, values)| !values.is_empty());

    let mut rows = Vec::new();
    let mut indices = vec![0usize; axes.len()];
    loop {
        let coordinates: Vec<(String, f64)> = axes
            .iter()
            .zip(&indices)
            .map(|((name, values), &i)| (name.clone(), values[i]))
            .collect();
        let mut point = spec.base.clone();
        let mut setup: Result<()> = Ok(());
        for (name, value) in &coordinates {
            if let Err(e) = point.set_param(name, *value) {
                setup = Err(e);
                break;
            }
        }
        let outcome = match setup {
            Err(e) => Err(e.to_string()),
            Ok(()) => match point.validate() {
                Err(errs) => Err(errs.to_string()),
                Ok(bundle) => evaluate(&bundle).map_err(|e| e.to_string()),
            },
        };
        rows.push(SweepRow { coordinates, outcome });

        // Advance the last axis first; carry like an odometer.
        let mut k = axes.len();
        loop {
            if k == 0 {
                return SweepResult {
                    axes: axes.into_iter().map(|(name, _)| name).collect(),
                    rows,
                };
            }
            k -= 1;
            indices[k] += 1;
            if indices[k] < axes[k].1.len() {
                break;
            }
            indices[k] = 0;
        }
    }
}

impl SweepResult {
    /// One CSV row per grid point, skip records included.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for name in &self.axes {
            out.push_str(name);
            out.push(',');
        }
        out.push_str(
            "status,case,armed_action,armed_deviation_minute,armed_survival,\
             unarmed_action,unarmed_deviation_minute,unarmed_survival,survival_gap,g_peak,note\n",
        );
        for row in &self.rows {
            for (_, value) in &row.coordinates {
                out.push_str(&format!("{value},"));
            }
            match &row.outcome {
                Ok(o) => {
                    let case = match o.case {
                        Some(CaseTag::AuthorityFirst) => "authority_first",
                        Some(CaseTag::ShooterFinishes) => "shooter_finishes",
                        None => "",
                    };
                    let fmt_dev = |d: Option<u32>| {
                        d.map(|k| k.to_string()).unwrap_or_else(|| "none".into())
                    };
                    let g_peak = o.g_peak.map(|g| g.to_string()).unwrap_or_default();
                    out.push_str(&format!(
                        "ok,{case},{},{},{:.6},{},{},{:.6},{:.6},{g_peak},\n",
                        o.armed_first_action,
                        fmt_dev(o.armed_deviation_minute),
                        o.armed_survival,
                        o.unarmed_first_action,
                        fmt_dev(o.unarmed_deviation_minute),
                        o.unarmed_survival,
                        o.survival_gap,
                    ));
                }
                Err(reason) => {
                    out.push_str(&format!(
                        "skipped,,,,,,,,,,\"{}\"\n",
                        reason.replace('"', "\"\"")
                    ));
                }
            }
        }
        out
    }
}

/// Machine-checked restatements of the model's qualitative findings,
/// evaluated on a documented family derived from a base scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FindingsReport {
    /// Every action's survival row is nonincreasing over the active
    /// horizon of the base tables.
    pub survival_decreases_over_time: bool,
    /// A closed arena the authority cannot reach in time forces even an
    /// unarmed civilian to fight at the final sustainable minute.
    pub unarmed_forced_fight_exists: bool,
    /// Some armed civilians still do best by hiding throughout.
    pub armed_hide_throughout_exists: bool,
    /// A better fight probability never delays the deviation minute.
    pub deviation_minute_monotone: bool,
    /// At the base scenario with a single armed fighter, hiding is optimal.
    pub single_armed_base_hides: bool,
    /// The joint fight success peaks strictly inside the fighter range:
    /// past the peak, more armed civilians hurt.
    pub joint_success_peaks_interior: bool,
    /// Non-vacuity: with friendly fire removed the interior peak vanishes
    /// (the curve grows to the boundary), so the previous check can fail.
    pub no_interior_peak_without_friendly_fire: bool,
}

impl FindingsReport {
    /// The six findings proper (the non-vacuity demonstration reported
    /// separately).
    pub fn all_findings_pass(&self) -> bool {
        self.survival_decreases_over_time
            && self.unarmed_forced_fight_exists
            && self.armed_hide_throughout_exists
            && self.deviation_minute_monotone
            && self.single_armed_base_hides
            && self.joint_success_peaks_interior
    }

    pub fn lines(&self) -> Vec<(&'static str, bool)> {
        vec![
            ("survival decreases over time in every row", self.survival_decreases_over_time),
            ("desperate unarmed fight situations exist", self.unarmed_forced_fight_exists),
            ("armed hide-throughout situations exist", self.armed_hide_throughout_exists),
            ("better fighters never deviate later", self.deviation_minute_monotone),
            ("hide is optimal for a lone armed fighter at the base", self.single_armed_base_hides),
            ("joint fight success peaks before everyone is armed", self.joint_success_peaks_interior),
            (
                "without friendly fire the interior peak vanishes (non-vacuity)",
                self.no_interior_peak_without_friendly_fire,
            ),
        ]
    }
}

fn rows_nonincreasing(bundle: &ScenarioBundle, armed: bool) -> Result<bool> {
    let table = survival_table(bundle, armed, HorizonRule::ArrivalCapped)?;
    let active = match &bundle.arena {
        ArenaScenario::Closed(s) => s.t1().min(s.t2()),
        ArenaScenario::Open(s) => s.t1().min(s.t2()),
        ArenaScenario::Complex(s) => s.t1().min(s.t2()),
        ArenaScenario::Hallway(_) => unreachable!("pooled arenas only"),
    } as usize;
    let ok = table.actions().iter().all(|&a| {
        let row = &table.row(a).unwrap()[..active];
        row.windows(2).all(|w| w[1] <= w[0])
    });
    Ok(ok)
}

/// Evaluate all findings against the family derived from `bundle`:
/// the base tables themselves, a closed arena with the base kill rate and
/// four sustainable minutes (authority arriving at minutes 2, 3, and 5),
/// a fight-probability grid at 0.05 resolution, and the joint-success curve
/// over a 20-person pool.
pub fn finding_checks(bundle: &ScenarioBundle) -> Result<FindingsReport> {
    let profile = bundle.multi_armed.as_ref().ok_or_else(|| {
        Error::RangeViolation("finding checks need a multi_armed profile in the base".into())
    })?;
    let armament = &bundle.armament;
    let m = bundle.arena.kill_rate();
    let closed = |t2: u32| ClosedScenario::new(4 * m, m, t2).expect("4m divides by m");

    // (i) Within the base scenario, every row falls over the active horizon.
    let survival_decreases_over_time =
        rows_nonincreasing(bundle, true)? && rows_nonincreasing(bundle, false)?;

    // (ii) Shooter-finishes closed arena: the endgame forces an unarmed fight.
    let endgame = optimal_deviation(&closed_table(&closed(5), armament.p1));
    let unarmed_forced_fight_exists = endgame.deviation == Some((4, Action::Fight));

    // (iii) Authority-first closed arena: some armed fight probabilities
    // still favor hiding throughout.
    let armed_hide_throughout_exists = (1..=13).any(|steps| {
        let p2 = steps as f64 * 0.05;
        optimal_deviation(&closed_table(&closed(2), p2)).deviation.is_none()
    });

    // (iv) Deviation minutes are nonincreasing in the fight probability.
    let mut deviation_minute_monotone = true;
    let mut prev = u32::MAX;
    for steps in 1..=19 {
        let p = steps as f64 * 0.05;
        let minute = optimal_deviation(&closed_table(&closed(3), p))
            .deviation
            .map(|(k, _)| k)
            .unwrap_or(u32::MAX);
        if minute > prev {
            deviation_minute_monotone = false;
        }
        prev = minute;
    }

    // (v) The base scenario with the joint profile forced to one fighter:
    // hiding is the optimal plan even though the civilian is armed.
    let single_armed_base_hides = {
        let mut single = bundle.clone();
        single.multi_armed = None;
        let table = survival_table(&single, true, HorizonRule::ArrivalCapped)?;
        optimal_deviation(&table).deviation.is_none()
    };

    // (vi) The joint success curve peaks strictly inside 1..=20 for the
    // base probabilities, and only because of friendly fire.
    let p2 = match &bundle.arena {
        ArenaScenario::Complex(_) => armament.p_tilde2.unwrap_or(armament.p2),
        _ => armament.p2,
    };
    let p_f = profile.p_f(p2);
    let pool = 20;
    let joint_success_peaks_interior = peak_armed_count(p2, p_f, pool) < pool;
    let no_interior_peak_without_friendly_fire = peak_armed_count(p2, 0.0, pool) == pool;

    Ok(FindingsReport {
        survival_decreases_over_time,
        unarmed_forced_fight_exists,
        armed_hide_throughout_exists,
        deviation_minute_monotone,
        single_armed_base_hides,
        joint_success_peaks_interior,
        no_interior_peak_without_friendly_fire,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{AxisFile, ScenarioFile};

    const BASE: &str = r#"{
        "arena": "open",
        "N": 210, "m": 15, "e": 25, "T2": 4,
        "armament": {"p1": 0.05, "p2": 0.3, "p_r": 0.1},
        "multi_armed": {
            "p_f": 0.1,
            "K_schedule": {"floor_ratio": 4},
            "j_schedule": {"floor_ratio": 20}
        }
    }"#;

    fn sweep_with_axes(axes: Vec<AxisFile>) -> SweepFile {
        SweepFile { base: ScenarioFile::from_json(BASE).unwrap(), axes }
    }

    #[test]
    fn empty_axes_single_evaluation() {
        let result = run_sweep(&sweep_with_axes(vec![]));
        assert_eq!(result.rows.len(), 1);
        let outcome = result.rows[0].outcome.as_ref().unwrap();
        assert_eq!(outcome.armed_first_action, Action::Fight);
        assert_eq!(outcome.unarmed_first_action, Action::Hide);
        assert!(outcome.survival_gap > 0.0);
    }

    #[test]
    fn invalid_points_become_skip_records() {
        let result = run_sweep(&sweep_with_axes(vec![AxisFile {
            param: "T2".into(),
            values: vec![4.0, 6.0], // T2 = 6 makes the ragged tail reachable
        }]));
        assert_eq!(result.rows.len(), 2);
        assert!(result.rows[0].outcome.is_ok());
        let reason = result.rows[1].outcome.as_ref().unwrap_err();
        assert!(reason.contains("divisibility"), "{reason}");
    }

    #[test]
    fn grid_rows_are_sorted_and_deterministic() {
        let spec = sweep_with_axes(vec![
            AxisFile { param: "p2".into(), values: vec![0.9, 0.2] },
            AxisFile { param: "p_r".into(), values: vec![0.3, 0.1] },
        ]);
        let a = run_sweep(&spec);
        let b = run_sweep(&spec);
        assert_eq!(a, b);
        assert_eq!(a.to_csv(), b.to_csv());
        let coords: Vec<Vec<f64>> = a
            .rows
            .iter()
            .map(|r| r.coordinates.iter().map(|(_, v)| *v).collect())
            .collect();
        assert_eq!(
            coords,
            vec![vec![0.2, 0.1], vec![0.2, 0.3], vec![0.9, 0.1], vec![0.9, 0.3]]
        );
    }

    #[test]
    fn armed_advantage_is_monotone_threshold_in_p2() {
        // Sweeping the armed fight success: once the armed plan departs
        // from the unarmed plan it stays departed (an up-set in p2).
        let values: Vec<f64> = (1..=19).map(|k| k as f64 * 0.05).collect();
        let spec = sweep_with_axes(vec![AxisFile { param: "p2".into(), values }]);
        let result = run_sweep(&spec);
        let mut seen_divergence = false;
        for row in &result.rows {
            if let Ok(o) = &row.outcome {
                let diverged = o.armed_deviation_minute != o.unarmed_deviation_minute;
                if seen_divergence {
                    assert!(diverged, "divergence must persist as p2 grows");
                }
                seen_divergence |= diverged;
            }
        }
        assert!(seen_divergence);
    }

    #[test]
    fn csv_layout() {
        let result = run_sweep(&sweep_with_axes(vec![AxisFile {
            param: "p2".into(),
            values: vec![0.2],
        }]));
        let csv = result.to_csv();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "p2,status,case,armed_action,armed_deviation_minute,armed_survival,\
             unarmed_action,unarmed_deviation_minute,unarmed_survival,survival_gap,g_peak,note"
        );
        assert!(lines.next().unwrap().starts_with("0.2,ok,authority_first,"));
    }

    #[test]
    fn findings_pass_on_reference_family() {
        let bundle = ScenarioFile::from_json(BASE).unwrap().validate().unwrap();
        let report = finding_checks(&bundle).unwrap();
        assert!(report.all_findings_pass(), "{report:?}");
        assert!(report.no_interior_peak_without_friendly_fire);
    }

    #[test]
    fn findings_need_a_joint_profile() {
        let mut file = ScenarioFile::from_json(BASE).unwrap();
        file.multi_armed = None;
        let bundle = file.validate().unwrap();
        assert!(finding_checks(&bundle).is_err());
    }
}
