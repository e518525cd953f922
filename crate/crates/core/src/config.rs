//! Scenario and sweep file formats.
//!
//! A scenario file is a JSON document with an `arena` discriminator, the
//! integer parameters of that arena, an `armament` object, and an optional
//! `multi_armed` object. Parsing is lenient about which fields appear;
//! semantic validation ([`ScenarioFile::validate`]) enforces presence and
//! every model invariant, reporting all violations at once.

use serde::{Deserialize, Serialize};

use crate::error::{Error, ValidationErrors};
use crate::scenario::{
    ArenaScenario, ArmamentProfile, ClosedScenario, ComplexScenario, FriendlyFire,
    HallwayScenario, MultiArmedProfile, OpenScenario, ScenarioBundle, Schedule,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub arena: String,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e: Option<u64>,
    #[serde(rename = "T2", skip_serializing_if = "Option::is_none")]
    pub t2: Option<u32>,
    #[serde(rename = "N1", skip_serializing_if = "Option::is_none")]
    pub n1: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m1: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m2: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e1: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e2: Option<u64>,
    /// Evacuation-phase duration of a complex arena (the lowercase `n`).
    #[serde(rename = "n", skip_serializing_if = "Option::is_none")]
    pub phase1_minutes: Option<u32>,
    #[serde(rename = "M", skip_serializing_if = "Option::is_none")]
    pub hallway_population: Option<u64>,
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub arena_count: Option<u32>,
    pub armament: ArmamentFile,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub multi_armed: Option<MultiArmedFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmamentFile {
    pub p1: f64,
    pub p2: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_tilde1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_tilde2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_r_tilde: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_h: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiArmedFile {
    /// Friendly-fire ratio: `p_f = c * p2`. Give either `c` or `p_f`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_f: Option<f64>,
    #[serde(rename = "K_schedule")]
    pub k_schedule: ScheduleFile,
    pub j_schedule: ScheduleFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScheduleFile {
    Explicit(Vec<u64>),
    FloorRatio { floor_ratio: u64 },
}

impl From<&ScheduleFile> for Schedule {
    fn from(f: &ScheduleFile) -> Schedule {
        match f {
            ScheduleFile::Explicit(v) => Schedule::Explicit(v.clone()),
            ScheduleFile::FloorRatio { floor_ratio } => Schedule::FloorRatio(*floor_ratio),
        }
    }
}

impl From<&Schedule> for ScheduleFile {
    fn from(s: &Schedule) -> ScheduleFile {
        match s {
            Schedule::Explicit(v) => ScheduleFile::Explicit(v.clone()),
            Schedule::FloorRatio(d) => ScheduleFile::FloorRatio { floor_ratio: *d },
        }
    }
}

impl ScenarioFile {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario files always serialize")
    }

    /// Semantic validation: build the typed bundle, reporting every
    /// violated invariant.
    pub fn validate(&self) -> Result<ScenarioBundle, ValidationErrors> {
        fn need<T: Copy>(
            errs: &mut Vec<Error>,
            arena: &str,
            name: &str,
            v: Option<T>,
            zero: T,
        ) -> T {
            match v {
                Some(v) => v,
                None => {
                    errs.push(Error::RangeViolation(format!(
                        "{name} is required for a {arena} scenario"
                    )));
                    zero
                }
            }
        }

        let mut errs = Vec::new();
        let kind = self.arena.as_str();
        let arena = match kind {
            "closed" => {
                let n = need(&mut errs, kind, "N", self.n, 0);
                let m = need(&mut errs, kind, "m", self.m, 0);
                let t2 = need(&mut errs, kind, "T2", self.t2, 0);
                if errs.is_empty() {
                    ClosedScenario::new(n, m, t2).map(ArenaScenario::Closed)
                } else {
                    Err(ValidationErrors(Vec::new()))
                }
            }
            "open" => {
                let n = need(&mut errs, kind, "N", self.n, 0);
                let m = need(&mut errs, kind, "m", self.m, 0);
                let e = need(&mut errs, kind, "e", self.e, 0);
                let t2 = need(&mut errs, kind, "T2", self.t2, 0);
                if errs.is_empty() {
                    OpenScenario::new(n, m, e, t2).map(ArenaScenario::Open)
                } else {
                    Err(ValidationErrors(Vec::new()))
                }
            }
            "complex" => {
                let n = need(&mut errs, kind, "N", self.n, 0);
                let n1 = need(&mut errs, kind, "N1", self.n1, 0);
                let m1 = need(&mut errs, kind, "m1", self.m1, 0);
                let m2 = need(&mut errs, kind, "m2", self.m2, 0);
                let e1 = need(&mut errs, kind, "e1", self.e1, 0);
                let e2 = need(&mut errs, kind, "e2", self.e2, 0);
                let minutes = need(&mut errs, kind, "n", self.phase1_minutes, 0);
                let t2 = need(&mut errs, kind, "T2", self.t2, 0);
                if errs.is_empty() {
                    ComplexScenario::new(n, n1, m1, m2, e1, e2, minutes, t2)
                        .map(ArenaScenario::Complex)
                } else {
                    Err(ValidationErrors(Vec::new()))
                }
            }
            "hallway" => {
                let population = need(&mut errs, kind, "M", self.hallway_population, 0);
                let count = need(&mut errs, kind, "K", self.arena_count, 0);
                let n = need(&mut errs, kind, "N", self.n, 0);
                let m = need(&mut errs, kind, "m", self.m, 0);
                let t2 = need(&mut errs, kind, "T2", self.t2, 0);
                if errs.is_empty() {
                    HallwayScenario::new(population, count, n, m, t2).map(ArenaScenario::Hallway)
                } else {
                    Err(ValidationErrors(Vec::new()))
                }
            }
            other => {
                errs.push(Error::RangeViolation(format!(
                    "unknown arena {other:?}; expected closed, open, complex, or hallway"
                )));
                Err(ValidationErrors(Vec::new()))
            }
        };

        let armament = ArmamentProfile {
            p1: self.armament.p1,
            p2: self.armament.p2,
            p_tilde1: self.armament.p_tilde1,
            p_tilde2: self.armament.p_tilde2,
            p_r: self.armament.p_r,
            p_r_tilde: self.armament.p_r_tilde,
            p_h: self.armament.p_h,
        };

        let multi_armed = match &self.multi_armed {
            None => None,
            Some(f) => match (f.c, f.p_f) {
                (Some(_), Some(_)) => {
                    errs.push(Error::RangeViolation(
                        "give either c or p_f in multi_armed, not both".into(),
                    ));
                    None
                }
                (None, None) => {
                    errs.push(Error::RangeViolation(
                        "multi_armed needs a friendly-fire probability: c or p_f".into(),
                    ));
                    None
                }
                (Some(c), None) => Some(MultiArmedProfile {
                    friendly_fire: FriendlyFire::Ratio(c),
                    k_schedule: (&f.k_schedule).into(),
                    j_schedule: (&f.j_schedule).into(),
                }),
                (None, Some(p_f)) => Some(MultiArmedProfile {
                    friendly_fire: FriendlyFire::Explicit(p_f),
                    k_schedule: (&f.k_schedule).into(),
                    j_schedule: (&f.j_schedule).into(),
                }),
            },
        };

        let bundle = ScenarioBundle::assemble(arena, armament, multi_armed, &self.arena);
        match (bundle, errs.is_empty()) {
            (Ok(b), true) => Ok(b),
            (Ok(_), false) => Err(ValidationErrors(errs)),
            (Err(mut e), _) => {
                errs.append(&mut e.0);
                Err(ValidationErrors(errs))
            }
        }
    }

    /// Override a parameter by its file-format name. Integer fields reject
    /// fractional values.
    pub fn set_param(&mut self, name: &str, value: f64) -> Result<(), Error> {
        let as_u64 = |v: f64| -> Result<u64, Error> {
            if v.fract() != 0.0 || v < 0.0 || !v.is_finite() {
                Err(Error::RangeViolation(format!(
                    "{name} takes a nonnegative integer, got {v}"
                )))
            } else {
                Ok(v as u64)
            }
        };
        match name {
            "N" => self.n = Some(as_u64(value)?),
            "m" => self.m = Some(as_u64(value)?),
            "e" => self.e = Some(as_u64(value)?),
            "T2" => self.t2 = Some(as_u64(value)? as u32),
            "N1" => self.n1 = Some(as_u64(value)?),
            "m1" => self.m1 = Some(as_u64(value)?),
            "m2" => self.m2 = Some(as_u64(value)?),
            "e1" => self.e1 = Some(as_u64(value)?),
            "e2" => self.e2 = Some(as_u64(value)?),
            "n" => self.phase1_minutes = Some(as_u64(value)? as u32),
            "M" => self.hallway_population = Some(as_u64(value)?),
            "K" => self.arena_count = Some(as_u64(value)? as u32),
            "p1" => self.armament.p1 = value,
            "p2" => self.armament.p2 = value,
            "p_tilde1" => self.armament.p_tilde1 = Some(value),
            "p_tilde2" => self.armament.p_tilde2 = Some(value),
            "p_r" => self.armament.p_r = Some(value),
            "p_r_tilde" => self.armament.p_r_tilde = Some(value),
            "p_h" => self.armament.p_h = Some(value),
            "c" => {
                let m = self.multi_armed.as_mut().ok_or_else(|| {
                    Error::RangeViolation("c needs a multi_armed section".into())
                })?;
                m.c = Some(value);
                m.p_f = None;
            }
            "p_f" => {
                let m = self.multi_armed.as_mut().ok_or_else(|| {
                    Error::RangeViolation("p_f needs a multi_armed section".into())
                })?;
                m.p_f = Some(value);
                m.c = None;
            }
            other => {
                return Err(Error::RangeViolation(format!(
                    "unknown parameter {other:?}"
                )))
            }
        }
        Ok(())
    }
}

impl ScenarioBundle {
    /// Render back to the file format (round-trips through validation).
    pub fn to_file(&self) -> ScenarioFile {
        let mut file = ScenarioFile {
            arena: self.arena.kind().to_string(),
            n: None,
            m: None,
            e: None,
            t2: Some(self.arena.t2()),
            n1: None,
            m1: None,
            m2: None,
            e1: None,
            e2: None,
            phase1_minutes: None,
            hallway_population: None,
            arena_count: None,
            armament: ArmamentFile {
                p1: self.armament.p1,
                p2: self.armament.p2,
                p_tilde1: self.armament.p_tilde1,
                p_tilde2: self.armament.p_tilde2,
                p_r: self.armament.p_r,
                p_r_tilde: self.armament.p_r_tilde,
                p_h: self.armament.p_h,
            },
            multi_armed: self.multi_armed.as_ref().map(|m| {
                let (c, p_f) = match m.friendly_fire {
                    FriendlyFire::Ratio(c) => (Some(c), None),
                    FriendlyFire::Explicit(p) => (None, Some(p)),
                };
                MultiArmedFile {
                    c,
                    p_f,
                    k_schedule: (&m.k_schedule).into(),
                    j_schedule: (&m.j_schedule).into(),
                }
            }),
        };
        match &self.arena {
            ArenaScenario::Closed(s) => {
                file.n = Some(s.n());
                file.m = Some(s.m());
            }
            ArenaScenario::Open(s) => {
                file.n = Some(s.n());
                file.m = Some(s.m());
                file.e = Some(s.e());
            }
            ArenaScenario::Complex(s) => {
                file.n = Some(s.n());
                file.n1 = Some(s.n1());
                file.m1 = Some(s.m1());
                file.m2 = Some(s.m2());
                file.e1 = Some(s.e1());
                file.e2 = Some(s.e2());
                file.phase1_minutes = Some(s.phase1_minutes());
            }
            ArenaScenario::Hallway(s) => {
                file.hallway_population = Some(s.hallway_population());
                file.arena_count = Some(s.arena_count());
                file.n = Some(s.n());
                file.m = Some(s.m());
            }
        }
        file
    }
}

/// Sweep specification: a scenario file plus an `axes` array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepFile {
    #[serde(flatten)]
    pub base: ScenarioFile,
    pub axes: Vec<AxisFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisFile {
    pub param: String,
    pub values: Vec<f64>,
}

impl SweepFile {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}
