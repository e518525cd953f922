//! Turning survival tables into per-minute action recommendations.
//!
//! The sequential rule scans minutes in order and deviates from hiding the
//! first time fighting or running beats continuing to hide. Ties prefer
//! hiding, then running, then fighting. When the shooter would clear the
//! arena before the authority arrives, the zero in the hide row forces a
//! deviation at the final sustainable minute (the endgame).

use crate::analytic::closed_hide_row;
use crate::error::{Error, Result};
use crate::scenario::{ArmamentProfile, ClosedScenario, HallwayScenario};
use crate::table::{Action, SurvivalTable};

/// One recommended minute of the plan, with the survival probability the
/// table assigns to being on-plan through that minute.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanStep {
    pub minute: u32,
    pub action: Action,
    pub probability: f64,
}

/// Comparison record for one scanned minute.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleTrace {
    pub minute: u32,
    pub hide: f64,
    pub best_deviation: f64,
    pub deviation_action: Action,
    pub fired: bool,
}

/// A resolved plan: hide up to at most one deviation minute, or hide
/// throughout.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionPlan {
    pub steps: Vec<PlanStep>,
    pub deviation: Option<(u32, Action)>,
    /// Whole-incident survival probability the plan achieves (the table
    /// entry of the deviation, or the final hide entry).
    pub achieved: f64,
    pub trace: Vec<RuleTrace>,
}

impl ActionPlan {
    /// CSV rendering: `minute,action,probability`, six decimal places.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("minute,action,probability\n");
        for s in &self.steps {
            out.push_str(&format!("{},{},{:.6}\n", s.minute, s.action, s.probability));
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            out.push_str(&format!("minute {:>2}: {:<5}  ({:.3})\n", s.minute, s.action.label(), s.probability));
        }
        match self.deviation {
            Some((minute, action)) => out.push_str(&format!(
                "deviate: {} at minute {} for a {:.3} chance of survival\n",
                action.label(),
                minute,
                self.achieved
            )),
            None => out.push_str(&format!(
                "hide throughout for a {:.3} chance of survival\n",
                self.achieved
            )),
        }
        out
    }
}

/// Best deviation candidate at a 1-based minute, honoring the run-over-fight
/// tie order.
fn best_deviation(table: &SurvivalTable, minute: u32) -> (Action, f64) {
    let fight = table.get(Action::Fight, minute).unwrap_or(0.0);
    match table.get(Action::Run, minute) {
        Some(run) if run >= fight => (Action::Run, run),
        _ => (Action::Fight, fight),
    }
}

/// Sequential decision rule over a table whose columns are reachable minutes
/// (build the table with [`crate::HorizonRule::ArrivalCapped`] so trailing
/// columns the authority has already ended do not fire spurious deviations).
pub fn optimal_deviation(table: &SurvivalTable) -> ActionPlan {
    let horizon = table.horizon();
    let mut steps = Vec::new();
    let mut trace = Vec::new();
    for minute in 1..=horizon {
        let hide = table.get(Action::Hide, minute).unwrap();
        let (action, value) = best_deviation(table, minute);
        let fired = value > hide;
        trace.push(RuleTrace {
            minute,
            hide,
            best_deviation: value,
            deviation_action: action,
            fired,
        });
        if fired {
            steps.push(PlanStep { minute, action, probability: value });
            return ActionPlan { steps, deviation: Some((minute, action)), achieved: value, trace };
        }
        steps.push(PlanStep { minute, action: Action::Hide, probability: hide });
    }
    let achieved = if horizon == 0 {
        1.0
    } else {
        table.get(Action::Hide, horizon).unwrap()
    };
    ActionPlan { steps, deviation: None, achieved, trace }
}

/// Minute-by-minute column argmax: the action whose table entry is largest
/// at each minute, evaluated independently (the reading under which each
/// column answers "what if I were still hiding here?"). Ties prefer hide,
/// then run, then fight.
pub fn per_minute_comparison(table: &SurvivalTable) -> Vec<(u32, Action)> {
    (1..=table.horizon())
        .map(|minute| {
            let mut best = (Action::Hide, table.get(Action::Hide, minute).unwrap());
            if let Some(run) = table.get(Action::Run, minute) {
                if run > best.1 {
                    best = (Action::Run, run);
                }
            }
            let fight = table.get(Action::Fight, minute).unwrap();
            if fight > best.1 {
                best = (Action::Fight, fight);
            }
            (minute, best.0)
        })
        .collect()
}

/// Fight-success level below which hiding beats fighting at every minute
/// before the endgame of a closed arena.
///
/// The per-minute firing condition is `p > 1 - m/(N - (k-1)m)`, whose right
/// side falls as `k` grows; the binding minute is the last pre-endgame
/// comparison `k = min(T2, T1 - 1)`, so the threshold is
/// `1 - m/(N - (min(T2, T1-1) - 1) m)`. Below it (or at it, by the hide tie
/// preference) the plan hides for as long as hiding has value.
pub fn hide_threshold(s: &ClosedScenario) -> Result<f64> {
    if s.n() == s.m() {
        return Err(Error::DegenerateScenario(
            "everyone dies in the first minute; no hide/fight trade-off exists".into(),
        ));
    }
    let k_last = s.t2().min(s.t1() - 1) as u64;
    let denom = s.n() - (k_last - 1) * s.m();
    Ok((denom - s.m()) as f64 / denom as f64)
}

/// First-minute decision in a hallway: the largest of the hide-into-arena,
/// run, and fight success probabilities, with ties preferring hide, then
/// run, then fight.
pub fn hallway_first_minute(armament: &ArmamentProfile, armed: bool) -> Result<Action> {
    let p_h = armament
        .p_h
        .ok_or_else(|| Error::RangeViolation("p_h is required for a hallway scenario".into()))?;
    let p_r = armament
        .p_r
        .ok_or_else(|| Error::RangeViolation("p_r is required for a hallway scenario".into()))?;
    let p_fight = armament.fight_tilde(armed).ok_or_else(|| {
        Error::RangeViolation("hallway fight probabilities are required".into())
    })?;
    let mut best = (Action::Hide, p_h);
    if p_r > best.1 {
        best = (Action::Run, p_r);
    }
    if p_fight > best.1 {
        best = (Action::Fight, p_fight);
    }
    Ok(best.0)
}

/// What the civilian does once the shooter reaches the arena he hid in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HallwayContinuation {
    /// Keep hiding inside the arena (the narrative default).
    #[default]
    HideOnly,
    /// Re-run the sequential rule inside the arena.
    Reoptimize,
}

/// Probability of surviving the whole event after hiding into one of the
/// adjacent closed arenas during the hallway minute.
///
/// The shooter searches the arenas in uniform random order, spending the
/// full clearing time in each; the focal civilian's arena is equally likely
/// to be searched first, second, and so on. A round reached only after the
/// authority has arrived contributes certain survival; otherwise the closed
/// arena model applies with the authority clock shifted by the hallway
/// minute and the earlier searches.
pub fn hallway_survival(
    hallway: &HallwayScenario,
    armament: &ArmamentProfile,
    armed: bool,
    continuation: HallwayContinuation,
) -> Result<f64> {
    let p_h = armament
        .p_h
        .ok_or_else(|| Error::RangeViolation("p_h is required for a hallway scenario".into()))?;
    let p = armament.fight(armed);
    let rounds = hallway.arena_count();
    let t1 = hallway.t1() as i64;

    let mut total = 0.0;
    let mut not_entered_yet = 1.0;
    for round in 1..=rounds {
        let arenas_left = (rounds - round + 1) as f64;
        let enters_now = 1.0 / arenas_left;
        let weight = not_entered_yet * enters_now;
        let t2_effective = hallway.t2() as i64 - 1 - (round as i64 - 1) * t1;
        let survival = if t2_effective <= 0 {
            1.0
        } else {
            let inner = ClosedScenario::new(hallway.n(), hallway.m(), t2_effective as u32)
                .expect("hallway validation guarantees the inner arena is well formed");
            match continuation {
                HallwayContinuation::HideOnly => *closed_hide_row(&inner)
                    .last()
                    .expect("closed tables span at least one minute"),
                HallwayContinuation::Reoptimize => {
                    optimal_deviation(&crate::analytic::closed_table(&inner, p)).achieved
                }
            }
        };
        total += weight * survival;
        not_entered_yet *= 1.0 - enters_now;
    }
    Ok(p_h * total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{closed_table, open_survival_table, HorizonRule};
    use crate::multi_armed::multi_armed_table;
    use crate::scenario::{ArenaScenario, FriendlyFire, MultiArmedProfile, OpenScenario, Schedule};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn example_bundle_table(armed: bool) -> SurvivalTable {
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
            friendly_fire: FriendlyFire::Ratio(1.0 / 3.0),
            k_schedule: Schedule::FloorRatio(4),
            j_schedule: Schedule::FloorRatio(20),
        };
        multi_armed_table(&arena, &armament, &profile, armed, HorizonRule::ProductExtended)
            .unwrap()
    }

    #[test]
    fn many_armed_civilians_fight_immediately() {
        let plan = optimal_deviation(&example_bundle_table(true));
        assert_eq!(plan.deviation, Some((1, Action::Fight)));
        assert_abs_diff_eq!(plan.achieved, 0.967575894895, epsilon = 1e-9);
        assert_eq!(plan.steps.len(), 1);
    }

    #[test]
    fn lone_armed_civilian_hides_throughout() {
        let s = OpenScenario::new(210, 15, 25, 4).unwrap();
        let table = open_survival_table(&s, 0.3, 0.1, HorizonRule::ArrivalCapped);
        let plan = optimal_deviation(&table);
        assert_eq!(plan.deviation, None);
        assert!(plan.steps.iter().all(|st| st.action == Action::Hide));
        // Surviving the incident means hiding through the arrival minute.
        assert_abs_diff_eq!(plan.achieved, 4080.0 / 7511.0, epsilon = 1e-12);
    }

    #[test]
    fn certain_fighter_fights_in_minute_one() {
        let s = ClosedScenario::new(20, 5, 2).unwrap();
        let plan = optimal_deviation(&closed_table(&s, 1.0));
        assert_eq!(plan.deviation, Some((1, Action::Fight)));
        assert_eq!(plan.achieved, 1.0);
    }

    #[test]
    fn per_minute_view_of_reference_table() {
        let verdicts = per_minute_comparison(&example_bundle_table(true));
        let actions: Vec<Action> = verdicts.into_iter().map(|(_, a)| a).collect();
        assert_eq!(
            actions,
            vec![Action::Fight, Action::Fight, Action::Fight, Action::Hide, Action::Fight]
        );
    }

    #[test]
    fn plan_probability_matches_table_entry_exactly() {
        let s = ClosedScenario::new(20, 5, 3).unwrap();
        let table = closed_table(&s, 0.6);
        let plan = optimal_deviation(&table);
        // 0.6 < 0.75 and 0.45 < 0.5 keep him hiding; 0.3 > 0.25 fires at 3.
        assert_eq!(plan.deviation, Some((3, Action::Fight)));
        assert_eq!(plan.achieved, table.get(Action::Fight, 3).unwrap());
    }

    #[test]
    fn endgame_forces_deviation_when_shooter_finishes() {
        // Hiding is worthless at the final sustainable minute.
        let s = ClosedScenario::new(20, 5, 6).unwrap();
        let plan = optimal_deviation(&closed_table(&s, 0.05));
        assert_eq!(plan.deviation, Some((4, Action::Fight)));
        assert_abs_diff_eq!(plan.achieved, 0.05 * 0.25, epsilon = 1e-15);
    }

    #[test]
    fn endgame_prefers_running_when_it_beats_fighting() {
        let s = OpenScenario::new(40, 5, 5, 6).unwrap();
        let table = open_survival_table(&s, 0.05, 0.2, HorizonRule::ArrivalCapped);
        let plan = optimal_deviation(&table);
        assert_eq!(plan.deviation, Some((4, Action::Run)));
    }

    #[test]
    fn threshold_reference_values() {
        let s = ClosedScenario::new(20, 5, 2).unwrap();
        assert_abs_diff_eq!(hide_threshold(&s).unwrap(), 2.0 / 3.0, epsilon = 1e-15);
        let s = ClosedScenario::new(210, 15, 2).unwrap();
        assert_abs_diff_eq!(hide_threshold(&s).unwrap(), 1.0 - 15.0 / 195.0, epsilon = 1e-15);
    }

    #[test]
    fn threshold_tightens_with_later_arrivals() {
        // One more pre-endgame comparison lowers the bar for fighting.
        let t2_2 = hide_threshold(&ClosedScenario::new(20, 5, 2).unwrap()).unwrap();
        let t2_3 = hide_threshold(&ClosedScenario::new(20, 5, 3).unwrap()).unwrap();
        assert_abs_diff_eq!(t2_3, 0.5, epsilon = 1e-15);
        assert!(t2_3 < t2_2);
        // p = 0.6 sits between the two: hide-throughout under T2 = 2 but a
        // minute-3 fight under T2 = 3.
        let hide_plan =
            optimal_deviation(&closed_table(&ClosedScenario::new(20, 5, 2).unwrap(), 0.6));
        assert_eq!(hide_plan.deviation, None);
        let fight_plan =
            optimal_deviation(&closed_table(&ClosedScenario::new(20, 5, 3).unwrap(), 0.6));
        assert_eq!(fight_plan.deviation, Some((3, Action::Fight)));
    }

    #[test]
    fn threshold_degenerate_when_everyone_dies_immediately() {
        let s = ClosedScenario::new(5, 5, 2).unwrap();
        assert!(matches!(hide_threshold(&s), Err(Error::DegenerateScenario(_))));
    }

    fn hallway_armament(p_h: f64, p_r: f64, pt1: f64, pt2: f64) -> ArmamentProfile {
        ArmamentProfile {
            p1: 0.1,
            p2: 0.6,
            p_tilde1: Some(pt1),
            p_tilde2: Some(pt2),
            p_r: Some(p_r),
            p_r_tilde: None,
            p_h: Some(p_h),
        }
    }

    #[test]
    fn hallway_first_minute_argmax_and_ties() {
        let a = hallway_armament(0.9, 0.5, 0.1, 0.3);
        assert_eq!(hallway_first_minute(&a, true).unwrap(), Action::Hide);
        let a = hallway_armament(0.4, 0.1, 0.2, 0.45);
        assert_eq!(hallway_first_minute(&a, true).unwrap(), Action::Fight);
        assert_eq!(hallway_first_minute(&a, false).unwrap(), Action::Hide);
        let a = hallway_armament(0.5, 0.5, 0.2, 0.5);
        assert_eq!(hallway_first_minute(&a, true).unwrap(), Action::Hide);
    }

    #[test]
    fn hallway_single_arena_is_hide_times_inner_survival() {
        // K = 1: the shooter reaches the arena at minute 2 with certainty.
        let h = HallwayScenario::new(10, 1, 4, 2, 4).unwrap();
        let a = hallway_armament(0.8, 0.2, 0.1, 0.3);
        // Inner closed arena: N = 4, m = 2, effective T2 = 3 >= T1 = 2.
        let got = hallway_survival(&h, &a, true, HallwayContinuation::HideOnly).unwrap();
        assert_abs_diff_eq!(got, 0.8 * 0.0, epsilon = 1e-15);
        let got = hallway_survival(&h, &a, true, HallwayContinuation::Reoptimize).unwrap();
        assert_abs_diff_eq!(got, 0.8 * 0.6, epsilon = 1e-15);
    }

    #[test]
    fn hallway_immediate_arrival_leaves_only_the_hallway_risk() {
        let h = HallwayScenario::new(30, 3, 4, 2, 1).unwrap();
        let a = hallway_armament(0.7, 0.2, 0.1, 0.3);
        for mode in [HallwayContinuation::HideOnly, HallwayContinuation::Reoptimize] {
            let got = hallway_survival(&h, &a, false, mode).unwrap();
            assert_abs_diff_eq!(got, 0.7, epsilon = 1e-15);
        }
    }

    #[test]
    fn hallway_two_arena_enumeration_oracle() {
        // K = 2, N = 4, m = 2 (T1 = 2), T2 = 6, armed fight 0.6, p_h = 1.
        // Entry orders are equally likely. First: shooter arrives at minute
        // 2 with 5 authority-minutes left; second: arrives at minute 4 with
        // 3 left. Both leave T1 <= T2', so hiding inside is worthless and
        // re-optimizing fights at once for 0.6.
        let h = HallwayScenario::new(9, 2, 4, 2, 6).unwrap();
        let a = hallway_armament(1.0, 0.2, 0.1, 0.3);
        let hide_only = hallway_survival(&h, &a, true, HallwayContinuation::HideOnly).unwrap();
        let reopt = hallway_survival(&h, &a, true, HallwayContinuation::Reoptimize).unwrap();

        // Independent two-branch enumeration.
        let branch = |t2_eff: u32, reoptimize: bool| -> f64 {
            let inner = ClosedScenario::new(4, 2, t2_eff).unwrap();
            if reoptimize {
                optimal_deviation(&closed_table(&inner, 0.6)).achieved
            } else {
                *closed_hide_row(&inner).last().unwrap()
            }
        };
        let expect_hide = 1.0 * (0.5 * branch(5, false) + 0.5 * branch(3, false));
        let expect_reopt = 1.0 * (0.5 * branch(5, true) + 0.5 * branch(3, true));
        assert_abs_diff_eq!(hide_only, expect_hide, epsilon = 1e-12);
        assert_abs_diff_eq!(reopt, expect_reopt, epsilon = 1e-12);
        assert_abs_diff_eq!(hide_only, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(reopt, 0.6, epsilon = 1e-12);
    }

    #[test]
    fn hallway_round_weights_are_uniform() {
        // With certain survival in every round, the weights must sum to 1.
        let h = HallwayScenario::new(50, 4, 4, 2, 1).unwrap();
        let a = hallway_armament(0.35, 0.2, 0.1, 0.3);
        let got = hallway_survival(&h, &a, true, HallwayContinuation::HideOnly).unwrap();
        assert_abs_diff_eq!(got, 0.35, epsilon = 1e-12);
    }

    proptest! {
        /// A better fighter never deviates later.
        #[test]
        fn deviation_minute_monotone_in_fight_success(
            m in 1u64..8,
            t1 in 2u32..7,
            t2 in 1u32..9,
            p_lo_steps in 1u32..19,
            p_hi_steps in 1u32..19,
        ) {
            let n = m * t1 as u64;
            let s = ClosedScenario::new(n, m, t2).unwrap();
            let (lo, hi) = if p_lo_steps <= p_hi_steps {
                (p_lo_steps, p_hi_steps)
            } else {
                (p_hi_steps, p_lo_steps)
            };
            let p_lo = lo as f64 * 0.05;
            let p_hi = hi as f64 * 0.05;
            let minute = |p: f64| {
                optimal_deviation(&closed_table(&s, p))
                    .deviation
                    .map(|(k, _)| k)
                    .unwrap_or(u32::MAX)
            };
            prop_assert!(minute(p_hi) <= minute(p_lo));
        }

        /// The endgame guarantee: hiding is never recommended at the final
        /// sustainable minute when the shooter would finish first.
        #[test]
        fn no_hide_recommended_at_endgame(
            m in 1u64..8,
            t1 in 1u32..7,
            extra in 0u32..4,
            p_steps in 1u32..20,
        ) {
            let n = m * t1 as u64;
            let t2 = t1 + extra; // shooter finishes: T1 <= T2
            let s = ClosedScenario::new(n, m, t2).unwrap();
            let plan = optimal_deviation(&closed_table(&s, p_steps as f64 * 0.05));
            let (minute, _) = plan.deviation.expect("a deviation is forced");
            prop_assert!(minute <= t1);
            for step in &plan.steps {
                if step.minute == t1 {
                    prop_assert!(step.action != Action::Hide);
                }
            }
        }
    }
}
