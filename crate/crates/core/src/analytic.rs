//! Closed- and open-arena survival tables for a single civilian of focus.
//!
//! Every entry is a product of integer ratios evaluated exactly (see
//! [`crate::exact`]), divided once at the end. The hide row carries the
//! prefix products; fight and run entries at minute `i` are the action
//! success probability times the hide prefix through minute `i - 1`, with
//! `hide(0) = 1` so that `fight(1) = p` holds uniformly.

use crate::exact::RatioProduct;
use crate::scenario::{ClosedScenario, OpenScenario};
use crate::table::{CaseTag, SurvivalTable};

/// How far an open-arena table extends past the authority arrival.
///
/// `ArrivalCapped` ends the table at the arrival minute when the authority
/// wins the race (the self-consistent convention: later minutes are never
/// reached). `ProductExtended` keeps printing the per-minute survival
/// products through the last sustainable minute, matching the layout of the
/// reference tables, even though those trailing columns describe an incident
/// the authority has already ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HorizonRule {
    ArrivalCapped,
    ProductExtended,
}

/// Hide row of a closed arena: `1 - i*m/N` while the shooter is active,
/// constant after the authority arrives, zero once the arena empties.
pub fn closed_hide_row(s: &ClosedScenario) -> Vec<f64> {
    let (n, m, t1, t2) = (s.n(), s.m(), s.t1(), s.t2());
    let horizon = t1.max(t2);
    let cap = t1.min(t2); // survival stops changing (or hits zero) here
    (1..=horizon)
        .map(|i| {
            let i = i.min(cap) as u64;
            (n - i * m) as f64 / n as f64
        })
        .collect()
}

/// Fight row of a closed arena with a per-minute success probability.
pub(crate) fn closed_fight_row_with(
    s: &ClosedScenario,
    mut p_at: impl FnMut(u32) -> f64,
) -> Vec<f64> {
    let (n, m, t1, t2) = (s.n(), s.m(), s.t1(), s.t2());
    let horizon = t1.max(t2);
    (1..=horizon)
        .map(|i| {
            if i <= t1.min(t2) {
                // Hide through i-1 minutes, then stake everything on the fight.
                p_at(i) * ((n - (i as u64 - 1) * m) as f64 / n as f64)
            } else if t1 > t2 {
                // Authority already arrived; surviving means having hidden so far.
                (n - t2 as u64 * m) as f64 / n as f64
            } else {
                0.0
            }
        })
        .collect()
}

/// Fight row of a closed arena with constant success probability `p`.
pub fn closed_fight_row(s: &ClosedScenario, p: f64) -> Vec<f64> {
    closed_fight_row_with(s, |_| p)
}

/// Both rows of the closed arena as a table (no run option in a closed room).
pub fn closed_table(s: &ClosedScenario, p: f64) -> SurvivalTable {
    SurvivalTable {
        case: CaseTag::from_horizons(s.t1(), s.t2()),
        fight: closed_fight_row(s, p),
        hide: closed_hide_row(s),
        run: None,
    }
}

/// Core open-arena table on raw parameters. `e = 0` is accepted here (it
/// reduces the open dynamics to the closed ones; used as a regression
/// identity), so scenario-level validation must happen before this call.
#[doc(hidden)]
pub fn open_table_raw(
    n: u64,
    m: u64,
    e: u64,
    t2: u32,
    mut fight_at: impl FnMut(u32) -> f64,
    p_r: f64,
    rule: HorizonRule,
) -> SurvivalTable {
    let t1 = (n / (e + m)) as u32;
    let case = CaseTag::from_horizons(t1, t2);
    let horizon = match rule {
        HorizonRule::ArrivalCapped => t2,
        HorizonRule::ProductExtended => t1.max(t2),
    };
    let product_minutes = t1.min(horizon);

    // Prefix hide products H[0..=product_minutes], H[0] = 1.
    let mut prefixes = Vec::with_capacity(product_minutes as usize + 1);
    prefixes.push(1.0);
    let mut acc = RatioProduct::one();
    for k in 1..=product_minutes {
        let exposed = (n - e) - (k as u64 - 1) * (e + m);
        acc.mul_ratio(exposed - m, exposed);
        prefixes.push(acc.value());
    }

    // Only consult the fight probability inside the product region: minutes
    // past it are zeros and per-minute probabilities may not extend there.
    let fight = (1..=horizon)
        .map(|i| {
            if i <= product_minutes {
                fight_at(i) * prefixes[i as usize - 1]
            } else {
                0.0
            }
        })
        .collect();
    let run = (1..=horizon)
        .map(|i| {
            if i <= product_minutes {
                p_r * prefixes[i as usize - 1]
            } else {
                0.0
            }
        })
        .collect();
    let hide = (1..=horizon)
        .map(|i| {
            if i <= product_minutes {
                prefixes[i as usize]
            } else {
                0.0
            }
        })
        .collect();

    SurvivalTable { case, fight, hide, run: Some(run) }
}

/// Fight, hide, and run rows of an open arena for fight success `p` and run
/// success `p_r`.
pub fn open_survival_table(
    s: &OpenScenario,
    p: f64,
    p_r: f64,
    rule: HorizonRule,
) -> SurvivalTable {
    open_table_raw(s.n(), s.m(), s.e(), s.t2(), |_| p, p_r, rule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::OpenScenario;
    use approx::assert_abs_diff_eq;

    fn assert_rows_eq(got: &[f64], want: &[f64]) {
        assert_eq!(got.len(), want.len(), "row length");
        for (g, w) in got.iter().zip(want) {
            assert_abs_diff_eq!(g, w, epsilon = 1e-12);
        }
    }

    #[test]
    fn closed_hide_authority_first() {
        let s = ClosedScenario::new(20, 5, 2).unwrap();
        assert_rows_eq(&closed_hide_row(&s), &[0.75, 0.50, 0.50, 0.50]);
    }

    #[test]
    fn closed_hide_shooter_finishes() {
        let s = ClosedScenario::new(20, 5, 6).unwrap();
        assert_rows_eq(&closed_hide_row(&s), &[0.75, 0.50, 0.25, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn closed_hide_single_minute_arena() {
        // Everyone dies in the first minute when N = m.
        let s = ClosedScenario::new(5, 5, 3).unwrap();
        assert_eq!(closed_hide_row(&s)[0], 0.0);
    }

    #[test]
    fn closed_fight_certain_success() {
        let s = ClosedScenario::new(20, 5, 2).unwrap();
        assert_eq!(closed_fight_row(&s, 1.0)[0], 1.0);
    }

    #[test]
    fn closed_fight_shooter_finishes() {
        let s = ClosedScenario::new(20, 5, 6).unwrap();
        assert_rows_eq(&closed_fight_row(&s, 0.6), &[0.60, 0.45, 0.30, 0.15, 0.0, 0.0]);
    }

    #[test]
    fn closed_fight_after_arrival_equals_hide_value() {
        let s = ClosedScenario::new(20, 5, 2).unwrap();
        let row = closed_fight_row(&s, 0.6);
        assert_abs_diff_eq!(row[2], 0.50, epsilon = 1e-12);
        assert_abs_diff_eq!(row[3], 0.50, epsilon = 1e-12);
    }

    #[test]
    fn open_reference_rows_product_extended() {
        // Independently computed exact products for the 210-person reference
        // scenario: hide prefixes 34/37, 884/1073, 5304/7511, 4080/7511,
        // 1632/7511.
        let s = OpenScenario::new(210, 15, 25, 4).unwrap();
        let t = open_survival_table(&s, 0.3, 0.1, HorizonRule::ProductExtended);
        assert_eq!(t.horizon(), 5);
        assert_rows_eq(
            &t.hide,
            &[
                34.0 / 37.0,
                884.0 / 1073.0,
                5304.0 / 7511.0,
                4080.0 / 7511.0,
                1632.0 / 7511.0,
            ],
        );
        assert_rows_eq(
            &t.fight,
            &[
                0.3,
                0.3 * 34.0 / 37.0,
                0.3 * 884.0 / 1073.0,
                0.3 * 5304.0 / 7511.0,
                0.3 * 4080.0 / 7511.0,
            ],
        );
        assert_rows_eq(
            t.run.as_ref().unwrap(),
            &[
                0.1,
                0.1 * 34.0 / 37.0,
                0.1 * 884.0 / 1073.0,
                0.1 * 5304.0 / 7511.0,
                0.1 * 4080.0 / 7511.0,
            ],
        );
    }

    #[test]
    fn open_arrival_capped_ends_at_t2() {
        let s = OpenScenario::new(210, 15, 25, 4).unwrap();
        let t = open_survival_table(&s, 0.3, 0.1, HorizonRule::ArrivalCapped);
        assert_eq!(t.horizon(), 4);
        assert_abs_diff_eq!(t.hide[3], 4080.0 / 7511.0, epsilon = 1e-12);
    }

    #[test]
    fn open_shooter_finishes_zero_tail() {
        // N = 40, e = 5, m = 5: T1 = 4 <= T2 = 6. The hide row hits zero at
        // T1 (the last factor is exactly zero) and everything past T1 is 0.
        let s = OpenScenario::new(40, 5, 5, 6).unwrap();
        let t = open_survival_table(&s, 0.6, 0.2, HorizonRule::ArrivalCapped);
        assert_eq!(t.horizon(), 6);
        assert_eq!(t.hide[3], 0.0);
        assert_eq!(t.hide[4], 0.0);
        assert_eq!(t.fight[4], 0.0);
        assert!(t.fight[3] > 0.0); // fighting at T1 still has value
        assert_eq!(t.run.as_ref().unwrap()[5], 0.0);
        // Product-extended is identical when the shooter finishes first.
        let t2 = open_survival_table(&s, 0.6, 0.2, HorizonRule::ProductExtended);
        assert_eq!(t, t2);
    }

    #[test]
    fn fight_and_run_are_scaled_hide_prefixes() {
        let s = OpenScenario::new(240, 15, 25, 9).unwrap();
        let t = open_survival_table(&s, 0.35, 0.12, HorizonRule::ArrivalCapped);
        let run = t.run.as_ref().unwrap();
        for i in 2..=t.horizon() as usize {
            if t.hide[i - 1] == 0.0 && t.fight[i - 1] == 0.0 {
                continue;
            }
            assert_abs_diff_eq!(t.fight[i - 1], 0.35 * t.hide[i - 2], epsilon = 1e-12);
            assert_abs_diff_eq!(run[i - 1], 0.12 * t.hide[i - 2], epsilon = 1e-12);
        }
    }

    #[test]
    fn closed_equals_open_with_zero_exit_rate() {
        for (n, m, t2) in [(20u64, 5u64, 2u32), (20, 5, 6), (60, 4, 7), (9, 3, 1)] {
            let s = ClosedScenario::new(n, m, t2).unwrap();
            let open = open_table_raw(n, m, 0, t2, |_| 0.4, 0.1, HorizonRule::ProductExtended);
            let hide = closed_hide_row(&s);
            // The open product telescopes to the closed ratio for e = 0;
            // compare over the shared product region.
            let shared = (s.t1().min(s.t2())) as usize;
            for (a, b) in hide.iter().zip(&open.hide).take(shared) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-12);
            }
            let fight = closed_fight_row(&s, 0.4);
            for (a, b) in fight.iter().zip(&open.fight).take(shared) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn hide_strictly_decreases_on_active_horizon() {
        let s = OpenScenario::new(240, 15, 25, 5).unwrap();
        let t = open_survival_table(&s, 0.3, 0.1, HorizonRule::ArrivalCapped);
        let active = s.t1().min(s.t2()) as usize;
        for i in 1..active {
            assert!(t.hide[i] < t.hide[i - 1]);
        }
    }
}
