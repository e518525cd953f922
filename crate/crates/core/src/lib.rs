//! Per-minute survival probabilities and optimal fight/hide/run actions for
//! a civilian during a modeled active-shooter incident.
//!
//! The crate covers three arena models (closed, open, and complex
//! three-phase), a hallway interaction, and a multiple-armed-civilians
//! extension with friendly fire. Every analytic probability can be checked
//! against an independent Monte Carlo simulation of the same generative
//! assumptions ([`oracle`]), and parameter sweeps turn the model's
//! qualitative findings into machine-checkable reports ([`sweep`]).

pub mod analytic;
pub mod complex;
pub mod config;
pub mod error;
pub mod exact;
pub mod multi_armed;
pub mod oracle;
pub mod policy;
pub mod scenario;
pub mod sweep;
pub mod table;

pub use analytic::{closed_table, open_survival_table, HorizonRule};
pub use error::{Error, ValidationErrors};

/// Survival table for a validated bundle: the joint-fight row when a
/// `multi_armed` profile is present, the single-civilian row otherwise.
/// Complex arenas yield the final-phase table.
pub fn survival_table(
    bundle: &ScenarioBundle,
    armed: bool,
    rule: HorizonRule,
) -> Result<SurvivalTable, Error> {
    if let Some(profile) = &bundle.multi_armed {
        return multi_armed::multi_armed_table(&bundle.arena, &bundle.armament, profile, armed, rule);
    }
    match &bundle.arena {
        ArenaScenario::Closed(s) => Ok(closed_table(s, bundle.armament.fight(armed))),
        ArenaScenario::Open(s) => {
            let p_r = bundle.armament.p_r.ok_or_else(|| {
                Error::RangeViolation("p_r is required for an open scenario".into())
            })?;
            Ok(open_survival_table(s, bundle.armament.fight(armed), p_r, rule))
        }
        ArenaScenario::Complex(s) => Ok(complex::phase2_table(s, &bundle.armament, armed, rule)),
        ArenaScenario::Hallway(_) => Err(Error::DegenerateScenario(
            "hallway scenarios use the first-minute rule and round survival, not a table".into(),
        )),
    }
}
pub use scenario::{
    ArenaScenario, ArmamentProfile, ClosedScenario, ComplexScenario, FriendlyFire,
    HallwayScenario, MultiArmedProfile, OpenScenario, ScenarioBundle, Schedule,
};
pub use table::{Action, CaseTag, SurvivalTable};
