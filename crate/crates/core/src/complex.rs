//! Three-phase complex-arena model.
//!
//! Phase 0 (initiation) kills `N - N1` people before anyone reacts. Phase 1
//! (maximum capacity) runs open-arena dynamics at rates `(m1, e1)` for a
//! fixed number of minutes; its victim pools thin from the full initial
//! headcount `N`. Phase 2 (seek and shoot) runs open-arena dynamics on the
//! `N2` people still present, at the reduced rates `(m2, e2)`, racing the
//! authority arrival.

use crate::analytic::{open_table_raw, HorizonRule};
use crate::exact::RatioProduct;
use crate::scenario::{ArmamentProfile, ComplexScenario};
use crate::table::{CaseTag, SurvivalTable};

/// Survival picture across all three phases.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseBreakdown {
    /// Probability of surviving the initiation: `N1 / N`.
    pub phase0_survival: f64,
    /// Deviation options during the evacuation phase, one column per minute.
    pub phase1_table: SurvivalTable,
    /// Probability of being alive and still present when the final phase
    /// starts (hide was the only way to get here).
    pub p_s: f64,
    /// Deviation options during the final phase.
    pub phase2_table: SurvivalTable,
}

/// Probability of being alive in the arena at the beginning of the final
/// phase: the initiation survival times the evacuation-phase hide products.
pub fn p_s(s: &ComplexScenario) -> f64 {
    let mut acc = RatioProduct::one();
    acc.mul_ratio(s.n1(), s.n());
    for k in 1..=s.phase1_minutes() {
        let exposed = s.phase1_exposed(k).expect("validated phase-1 horizon");
        acc.mul_ratio(exposed - s.m1(), exposed);
    }
    acc.value()
}

/// Evacuation-phase table: open-arena rows on `(N, m1, e1)` over the phase's
/// minutes, each entry scaled by the initiation survival `N1/N`. Fighting
/// uses the evacuation-phase success probability, running uses `p_r`.
pub fn phase1_table(s: &ComplexScenario, armament: &ArmamentProfile, armed: bool) -> SurvivalTable {
    let p_fight = armament
        .fight_tilde(armed)
        .expect("validated complex armament has evacuation-phase fight probabilities");
    let p_run = armament.p_r.expect("validated complex armament has p_r");
    let phase0 = s.n1() as f64 / s.n() as f64;

    let minutes = s.phase1_minutes();
    let mut prefixes = Vec::with_capacity(minutes as usize + 1);
    prefixes.push(1.0);
    let mut acc = RatioProduct::one();
    for k in 1..=minutes {
        let exposed = s.phase1_exposed(k).expect("validated phase-1 horizon");
        acc.mul_ratio(exposed - s.m1(), exposed);
        prefixes.push(acc.value());
    }

    let fight = (1..=minutes)
        .map(|i| phase0 * p_fight * prefixes[i as usize - 1])
        .collect();
    let run = (1..=minutes)
        .map(|i| phase0 * p_run * prefixes[i as usize - 1])
        .collect();
    let hide = (1..=minutes).map(|i| phase0 * prefixes[i as usize]).collect();

    SurvivalTable {
        case: CaseTag::from_horizons(s.t1(), s.t2()),
        fight,
        hide,
        run: Some(run),
    }
}

/// Final-phase table with a per-minute fight success probability, every
/// entry prefixed by `p_s`.
pub(crate) fn phase2_table_with(
    s: &ComplexScenario,
    fight_at: impl FnMut(u32) -> f64,
    p_run: f64,
    rule: HorizonRule,
) -> SurvivalTable {
    let ps = p_s(s);
    let mut t = open_table_raw(s.n2(), s.m2(), s.e2(), s.t2(), fight_at, p_run, rule);
    for v in t
        .fight
        .iter_mut()
        .chain(t.hide.iter_mut())
        .chain(t.run.as_mut().unwrap().iter_mut())
    {
        *v *= ps;
    }
    t
}

/// Final-phase table for a single civilian: fighting uses the final-phase
/// probabilities `p1`/`p2`, running uses `p_r_tilde`.
pub fn phase2_table(
    s: &ComplexScenario,
    armament: &ArmamentProfile,
    armed: bool,
    rule: HorizonRule,
) -> SurvivalTable {
    let p = armament.fight(armed);
    let p_run = armament
        .p_r_tilde
        .expect("validated complex armament has p_r_tilde");
    phase2_table_with(s, |_| p, p_run, rule)
}

/// Full three-phase breakdown for a single civilian.
pub fn phase_breakdown(
    s: &ComplexScenario,
    armament: &ArmamentProfile,
    armed: bool,
    rule: HorizonRule,
) -> PhaseBreakdown {
    PhaseBreakdown {
        phase0_survival: s.n1() as f64 / s.n() as f64,
        phase1_table: phase1_table(s, armament, armed),
        p_s: p_s(s),
        phase2_table: phase2_table(s, armament, armed, rule),
    }
}

impl PhaseBreakdown {
    /// CSV rendering with a `phase` column:
    /// `phase,minute,fight,hide,run`, six decimal places.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("phase,minute,fight,hide,run\n");
        let mut push = |phase: &str, table: &SurvivalTable| {
            let run = table.run.as_ref().expect("complex tables have run rows");
            for (i, ((fight, hide), run)) in
                table.fight.iter().zip(&table.hide).zip(run).enumerate()
            {
                out.push_str(&format!(
                    "{},{},{fight:.6},{hide:.6},{run:.6}\n",
                    phase,
                    i + 1,
                ));
            }
        };
        push("1", &self.phase1_table);
        push("2", &self.phase2_table);
        out
    }
}
