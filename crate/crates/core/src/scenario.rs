//! Scenario parameter bundles and their validation.
//!
//! Every downstream formula assumes whole-minute bookkeeping: headcounts are
//! exact integers and the arena empties (or the authority arrives) on a
//! minute boundary. Constructors here collect *every* violated invariant
//! instead of stopping at the first, so a bad input file is diagnosed in one
//! pass. Once built, a scenario is immutable and safe to share across
//! threads.

use crate::error::{Error, Result, ValidationErrors};

/// Closed arena: no exits, killing rate `m` per minute, authority at `t2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClosedScenario {
    n: u64,
    m: u64,
    t2: u32,
}

impl ClosedScenario {
    pub fn new(n: u64, m: u64, t2: u32) -> Result<Self, ValidationErrors> {
        let mut errs = Vec::new();
        if n < 1 {
            errs.push(Error::RangeViolation("N must be at least 1".into()));
        }
        if m < 1 {
            errs.push(Error::RangeViolation("m must be at least 1".into()));
        }
        if t2 < 1 {
            errs.push(Error::RangeViolation("T2 must be at least 1".into()));
        }
        if n >= 1 && m >= 1 && !n.is_multiple_of(m) {
            errs.push(Error::DivisibilityViolation(format!(
                "N = {n} is not a multiple of the killing rate m = {m}"
            )));
        }
        if errs.is_empty() {
            Ok(ClosedScenario { n, m, t2 })
        } else {
            Err(ValidationErrors(errs))
        }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn t2(&self) -> u32 {
        self.t2
    }

    /// Minutes until the arena empties absent resistance.
    pub fn t1(&self) -> u32 {
        (self.n / self.m) as u32
    }

    /// Civilians present at the beginning of minute `i` (1-based).
    pub fn census(&self, minute: u32) -> Result<u64> {
        in_horizon(minute, self.t1())?;
        Ok(self.n - (minute as u64 - 1) * self.m)
    }
}

/// Open arena: unconstrained exits at rate `e`, kills at rate `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OpenScenario {
    n: u64,
    m: u64,
    e: u64,
    t2: u32,
}

impl OpenScenario {
    pub fn new(n: u64, m: u64, e: u64, t2: u32) -> Result<Self, ValidationErrors> {
        let mut errs = Vec::new();
        for (name, v) in [("N", n), ("m", m), ("e", e)] {
            if v < 1 {
                errs.push(Error::RangeViolation(format!("{name} must be at least 1")));
            }
        }
        if t2 < 1 {
            errs.push(Error::RangeViolation("T2 must be at least 1".into()));
        }
        if e >= 1 && m >= 1 && e + m >= n {
            errs.push(Error::RangeViolation(format!(
                "exit rate must satisfy e < N - m (got e = {e}, N - m = {})",
                n.saturating_sub(m)
            )));
        } else if e >= 1 && m >= 1 && !n.is_multiple_of(e + m) {
            // A ragged tail is tolerable only when the authority arrives
            // strictly before it: the table then never reaches the minute
            // where the pool cannot sustain a full e + m departure.
            let t1 = (n / (e + m)) as u32;
            if t1 <= t2 {
                errs.push(Error::DivisibilityViolation(format!(
                    "N = {n} is not a multiple of e + m = {} and the shooter \
                     would outlast the authority window (T1 = {t1} <= T2 = {t2})",
                    e + m
                )));
            }
        }
        if errs.is_empty() {
            Ok(OpenScenario { n, m, e, t2 })
        } else {
            Err(ValidationErrors(errs))
        }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn e(&self) -> u64 {
        self.e
    }

    pub fn t2(&self) -> u32 {
        self.t2
    }

    /// Whole minutes the arena can sustain full exit-plus-kill departures.
    pub fn t1(&self) -> u32 {
        (self.n / (self.e + self.m)) as u32
    }

    /// True when the arena empties exactly at minute `t1`.
    pub fn exact_horizon(&self) -> bool {
        self.n.is_multiple_of(self.e + self.m)
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.exact_horizon() {
            out.push(format!(
                "N = {} leaves a remainder of {} people after minute {}; \
                 those minutes lie beyond the authority arrival and are never reached",
                self.n,
                self.n % (self.e + self.m),
                self.t1()
            ));
        }
        out
    }

    /// Civilians present at the beginning of minute `i`.
    pub fn census(&self, minute: u32) -> Result<u64> {
        in_horizon(minute, self.t1())?;
        Ok(self.n - (minute as u64 - 1) * (self.e + self.m))
    }

    /// Pool the shooter draws victims from during minute `i`, after that
    /// minute's exiters have left.
    pub fn exposed(&self, minute: u32) -> Result<u64> {
        Ok(self.census(minute)? - self.e)
    }
}

/// Complex arena: confused initiation, congested evacuation for a fixed
/// number of minutes, then free-exit seek-and-shoot dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComplexScenario {
    n: u64,
    n1: u64,
    m1: u64,
    m2: u64,
    e1: u64,
    e2: u64,
    phase1_minutes: u32,
    t2: u32,
}

impl ComplexScenario {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n: u64,
        n1: u64,
        m1: u64,
        m2: u64,
        e1: u64,
        e2: u64,
        phase1_minutes: u32,
        t2: u32,
    ) -> Result<Self, ValidationErrors> {
        let mut errs = Vec::new();
        for (name, v) in [("N", n), ("N1", n1), ("m1", m1), ("m2", m2), ("e1", e1), ("e2", e2)] {
            if v < 1 {
                errs.push(Error::RangeViolation(format!("{name} must be at least 1")));
            }
        }
        if t2 < 1 {
            errs.push(Error::RangeViolation("T2 must be at least 1".into()));
        }
        if n1 >= n {
            errs.push(Error::OrderingViolation(format!(
                "initiation must kill someone: need N > N1 (got N = {n}, N1 = {n1})"
            )));
        }
        if m1 <= m2 {
            errs.push(Error::OrderingViolation(format!(
                "the killing rate must drop in the final phase: need m1 > m2 \
                 (got m1 = {m1}, m2 = {m2})"
            )));
        }
        let drained = phase1_minutes as u64 * (e1 + m1);
        if n1 <= drained {
            errs.push(Error::RangeViolation(format!(
                "no one would remain for the final phase: need N1 > n*(e1+m1) \
                 (got N1 = {n1}, n*(e1+m1) = {drained})"
            )));
        } else {
            let n2 = n1 - drained;
            if e2 + m2 >= n2 {
                errs.push(Error::RangeViolation(format!(
                    "exit rate must satisfy e2 < N2 - m2 (got e2 = {e2}, N2 = {n2})"
                )));
            } else if !n2.is_multiple_of(e2 + m2) {
                let t1 = (n2 / (e2 + m2)) as u32;
                if t1 <= t2 {
                    errs.push(Error::DivisibilityViolation(format!(
                        "N2 = {n2} is not a multiple of e2 + m2 = {} and the shooter \
                         would outlast the authority window (T1 = {t1} <= T2 = {t2})",
                        e2 + m2
                    )));
                }
            }
        }
        if errs.is_empty() {
            Ok(ComplexScenario { n, n1, m1, m2, e1, e2, phase1_minutes, t2 })
        } else {
            Err(ValidationErrors(errs))
        }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn n1(&self) -> u64 {
        self.n1
    }

    pub fn m1(&self) -> u64 {
        self.m1
    }

    pub fn m2(&self) -> u64 {
        self.m2
    }

    pub fn e1(&self) -> u64 {
        self.e1
    }

    pub fn e2(&self) -> u64 {
        self.e2
    }

    pub fn phase1_minutes(&self) -> u32 {
        self.phase1_minutes
    }

    pub fn t2(&self) -> u32 {
        self.t2
    }

    /// Headcount at the beginning of the final phase.
    pub fn n2(&self) -> u64 {
        self.n1 - self.phase1_minutes as u64 * (self.e1 + self.m1)
    }

    /// Whole minutes the final phase can sustain.
    pub fn t1(&self) -> u32 {
        (self.n2() / (self.e2 + self.m2)) as u32
    }

    pub fn exact_horizon(&self) -> bool {
        self.n2().is_multiple_of(self.e2 + self.m2)
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.exact_horizon() {
            out.push(format!(
                "N2 = {} leaves a remainder of {} people after final-phase minute {}; \
                 those minutes lie beyond the authority arrival and are never reached",
                self.n2(),
                self.n2() % (self.e2 + self.m2),
                self.t1()
            ));
        }
        out
    }

    /// Victim-pool headcount schedule during evacuation minute `k`: the
    /// crowd thins from the full initial headcount `N` at rate `e1 + m1`.
    pub fn phase1_census(&self, minute: u32) -> Result<u64> {
        in_horizon(minute, self.phase1_minutes)?;
        Ok(self.n - (minute as u64 - 1) * (self.e1 + self.m1))
    }

    pub fn phase1_exposed(&self, minute: u32) -> Result<u64> {
        Ok(self.phase1_census(minute)? - self.e1)
    }

    /// Headcount at the beginning of final-phase minute `i`.
    pub fn phase2_census(&self, minute: u32) -> Result<u64> {
        in_horizon(minute, self.t1())?;
        Ok(self.n2() - (minute as u64 - 1) * (self.e2 + self.m2))
    }

    pub fn phase2_exposed(&self, minute: u32) -> Result<u64> {
        Ok(self.phase2_census(minute)? - self.e2)
    }
}

/// Hallway interaction: `hallway_population` people in a hallway adjoining
/// `arena_count` closed arenas that the shooter will search one by one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HallwayScenario {
    hallway_population: u64,
    arena_count: u32,
    n: u64,
    m: u64,
    t2: u32,
}

impl HallwayScenario {
    pub fn new(
        hallway_population: u64,
        arena_count: u32,
        n: u64,
        m: u64,
        t2: u32,
    ) -> Result<Self, ValidationErrors> {
        let mut errs = Vec::new();
        if hallway_population < 1 {
            errs.push(Error::RangeViolation("M must be at least 1".into()));
        }
        if arena_count < 1 {
            errs.push(Error::RangeViolation("K must be at least 1".into()));
        }
        for (name, v) in [("N", n), ("m", m)] {
            if v < 1 {
                errs.push(Error::RangeViolation(format!("{name} must be at least 1")));
            }
        }
        if t2 < 1 {
            errs.push(Error::RangeViolation("T2 must be at least 1".into()));
        }
        if n * arena_count as u64 >= hallway_population {
            errs.push(Error::RangeViolation(format!(
                "arena occupancy must satisfy N < M/K (got N = {n}, M = {hallway_population}, \
                 K = {arena_count})"
            )));
        }
        if n >= 1 && m >= 1 && !n.is_multiple_of(m) {
            errs.push(Error::DivisibilityViolation(format!(
                "N = {n} is not a multiple of the killing rate m = {m}"
            )));
        }
        if errs.is_empty() {
            Ok(HallwayScenario { hallway_population, arena_count, n, m, t2 })
        } else {
            Err(ValidationErrors(errs))
        }
    }

    pub fn hallway_population(&self) -> u64 {
        self.hallway_population
    }

    pub fn arena_count(&self) -> u32 {
        self.arena_count
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn t2(&self) -> u32 {
        self.t2
    }

    /// Minutes the shooter spends clearing one arena.
    pub fn t1(&self) -> u32 {
        (self.n / self.m) as u32
    }
}

/// Single-civilian success probabilities. Fields not needed by an arena may
/// be absent; bundle validation enforces presence per arena type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmamentProfile {
    /// Unarmed fight success.
    pub p1: f64,
    /// Armed fight success.
    pub p2: f64,
    /// Hallway / evacuation-phase unarmed fight success.
    pub p_tilde1: Option<f64>,
    /// Hallway / evacuation-phase armed fight success.
    pub p_tilde2: Option<f64>,
    /// Run success (open arena; evacuation phase of a complex arena).
    pub p_r: Option<f64>,
    /// Run success during the final phase of a complex arena.
    pub p_r_tilde: Option<f64>,
    /// Hallway hide-into-arena success.
    pub p_h: Option<f64>,
}

impl ArmamentProfile {
    /// Fight success for the plain closed/open setting.
    pub fn fight(&self, armed: bool) -> f64 {
        if armed {
            self.p2
        } else {
            self.p1
        }
    }

    /// Fight success for hallway interactions and the evacuation phase.
    pub fn fight_tilde(&self, armed: bool) -> Option<f64> {
        if armed {
            self.p_tilde2
        } else {
            self.p_tilde1
        }
    }

    fn check(&self, arena_kind: &str) -> Vec<Error> {
        let mut errs = Vec::new();
        let mut range = |name: &str, v: f64| {
            if !(v > 0.0 && v <= 1.0) || !v.is_finite() {
                errs.push(Error::RangeViolation(format!(
                    "{name} = {v} must lie in (0, 1]"
                )));
            }
        };
        range("p1", self.p1);
        range("p2", self.p2);
        for (name, v) in [
            ("p_tilde1", self.p_tilde1),
            ("p_tilde2", self.p_tilde2),
            ("p_r", self.p_r),
            ("p_r_tilde", self.p_r_tilde),
            ("p_h", self.p_h),
        ] {
            if let Some(v) = v {
                range(name, v);
            }
        }
        if self.p1 >= self.p2 {
            errs.push(Error::OrderingViolation(format!(
                "armed fighting must beat unarmed: need p1 < p2 (got p1 = {}, p2 = {})",
                self.p1, self.p2
            )));
        }
        if let (Some(a), Some(b)) = (self.p_tilde1, self.p_tilde2) {
            if a >= b {
                errs.push(Error::OrderingViolation(format!(
                    "need p_tilde1 < p_tilde2 (got {a} and {b})"
                )));
            }
        }
        let required: &[(&str, Option<f64>)] = match arena_kind {
            "open" => &[("p_r", self.p_r)],
            "complex" => &[
                ("p_tilde1", self.p_tilde1),
                ("p_tilde2", self.p_tilde2),
                ("p_r", self.p_r),
                ("p_r_tilde", self.p_r_tilde),
            ],
            "hallway" => &[
                ("p_tilde1", self.p_tilde1),
                ("p_tilde2", self.p_tilde2),
                ("p_r", self.p_r),
                ("p_h", self.p_h),
            ],
            _ => &[],
        };
        for (name, v) in required {
            if v.is_none() {
                errs.push(Error::RangeViolation(format!(
                    "{name} is required for a {arena_kind} scenario"
                )));
            }
        }
        errs
    }
}

/// How many armed civilians remain, and how many join a fight, given the
/// headcount at the start of a minute.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Schedule {
    /// One value per minute, in order.
    Explicit(Vec<u64>),
    /// `max(1, floor(pool / divisor))`.
    FloorRatio(u64),
}

impl Schedule {
    /// Value for 1-based `minute` given that minute's headcount.
    pub fn value(&self, minute: u32, pool: u64) -> Option<u64> {
        match self {
            Schedule::Explicit(v) => v.get(minute as usize - 1).copied(),
            Schedule::FloorRatio(d) => Some((pool / d).max(1)),
        }
    }
}

/// Friendly-fire probability, either tied to the armed fight success by a
/// ratio or given outright.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FriendlyFire {
    /// `p_f = c * p` for the context's armed fight success `p`.
    Ratio(f64),
    Explicit(f64),
}

/// Joint-fight parameters for the multiple-armed-civilians extension.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiArmedProfile {
    pub friendly_fire: FriendlyFire,
    /// Armed civilians alive at the start of each minute.
    pub k_schedule: Schedule,
    /// Fighters who join a fight started that minute.
    pub j_schedule: Schedule,
}

impl MultiArmedProfile {
    /// Friendly-fire probability for a context whose armed fight success is
    /// `p_fight`.
    pub fn p_f(&self, p_fight: f64) -> f64 {
        match self.friendly_fire {
            FriendlyFire::Ratio(c) => c * p_fight,
            FriendlyFire::Explicit(p) => p,
        }
    }

    /// Check the schedules against a headcount sequence (minute 1 first) and
    /// the arena's per-minute kill rate. Returns accumulated errors and
    /// advisory warnings.
    pub fn check_schedules(&self, pools: &[u64], kill_rate: u64) -> (Vec<Error>, Vec<String>) {
        let mut errs = Vec::new();
        let mut warnings = Vec::new();
        let mut prev_j: Option<u64> = None;
        let mut prev_k: Option<u64> = None;
        for (idx, &pool) in pools.iter().enumerate() {
            let minute = idx as u32 + 1;
            let (k, j) = match (
                self.k_schedule.value(minute, pool),
                self.j_schedule.value(minute, pool),
            ) {
                (Some(k), Some(j)) => (k, j),
                _ => {
                    errs.push(Error::ScheduleViolation(format!(
                        "explicit schedule is shorter than the {}-minute horizon",
                        pools.len()
                    )));
                    break;
                }
            };
            if !(1 <= j && j <= k && k <= pool) {
                errs.push(Error::ScheduleViolation(format!(
                    "minute {minute}: need 1 <= j <= K <= pool (got j = {j}, K = {k}, pool = {pool})"
                )));
            }
            if let Some(pj) = prev_j {
                if j > pj {
                    errs.push(Error::ScheduleViolation(format!(
                        "joiners must not grow over time: j rose from {pj} to {j} at minute {minute}"
                    )));
                }
            }
            if let Some(pk) = prev_k {
                if matches!(self.k_schedule, Schedule::Explicit(_)) {
                    // Literal bound: armed count may not jump up by the kill rate.
                    if k > pk && k - pk >= kill_rate {
                        errs.push(Error::ScheduleViolation(format!(
                            "minute {minute}: K grew by {} which is not below the kill rate {kill_rate}",
                            k - pk
                        )));
                    }
                    if pk > k && pk - k >= kill_rate {
                        warnings.push(format!(
                            "minute {minute}: armed civilians drop by {} which meets or exceeds \
                             the kill rate {kill_rate}",
                            pk - k
                        ));
                    }
                }
            }
            prev_j = Some(j);
            prev_k = Some(k);
        }
        (errs, warnings)
    }

    fn check(&self, base_fight: f64) -> Vec<Error> {
        let mut errs = Vec::new();
        match self.friendly_fire {
            FriendlyFire::Ratio(c) => {
                if !(c > 0.0 && c < 1.0) || !c.is_finite() {
                    errs.push(Error::RangeViolation(format!(
                        "friendly-fire ratio c = {c} must lie in (0, 1)"
                    )));
                }
            }
            FriendlyFire::Explicit(p) => {
                if !(p > 0.0 && p < base_fight) || !p.is_finite() {
                    errs.push(Error::RangeViolation(format!(
                        "friendly-fire probability p_f = {p} must lie in (0, {base_fight})"
                    )));
                }
            }
        }
        if let Schedule::FloorRatio(d) = self.k_schedule {
            if d < 1 {
                errs.push(Error::RangeViolation("K divisor must be at least 1".into()));
            }
        }
        if let Schedule::FloorRatio(d) = self.j_schedule {
            if d < 1 {
                errs.push(Error::RangeViolation("j divisor must be at least 1".into()));
            }
        }
        errs
    }
}

/// One of the four arena models.
#[derive(Debug, Clone, PartialEq)]
pub enum ArenaScenario {
    Closed(ClosedScenario),
    Open(OpenScenario),
    Complex(ComplexScenario),
    Hallway(HallwayScenario),
}

impl ArenaScenario {
    pub fn kind(&self) -> &'static str {
        match self {
            ArenaScenario::Closed(_) => "closed",
            ArenaScenario::Open(_) => "open",
            ArenaScenario::Complex(_) => "complex",
            ArenaScenario::Hallway(_) => "hallway",
        }
    }

    pub fn t2(&self) -> u32 {
        match self {
            ArenaScenario::Closed(s) => s.t2(),
            ArenaScenario::Open(s) => s.t2(),
            ArenaScenario::Complex(s) => s.t2(),
            ArenaScenario::Hallway(s) => s.t2(),
        }
    }

    pub fn warnings(&self) -> Vec<String> {
        match self {
            ArenaScenario::Open(s) => s.warnings(),
            ArenaScenario::Complex(s) => s.warnings(),
            _ => Vec::new(),
        }
    }

    /// Headcounts at the start of each minute of the fight horizon
    /// (the final phase, for a complex arena).
    pub fn census_profile(&self) -> Result<Vec<u64>> {
        let pools = match self {
            ArenaScenario::Closed(s) => (1..=s.t1())
                .map(|i| s.census(i))
                .collect::<Result<Vec<_>>>()?,
            ArenaScenario::Open(s) => (1..=s.t1())
                .map(|i| s.census(i))
                .collect::<Result<Vec<_>>>()?,
            ArenaScenario::Complex(s) => (1..=s.t1())
                .map(|i| s.phase2_census(i))
                .collect::<Result<Vec<_>>>()?,
            ArenaScenario::Hallway(_) => {
                return Err(Error::DegenerateScenario(
                    "per-minute pools are not defined for hallway scenarios".into(),
                ))
            }
        };
        Ok(pools)
    }

    pub fn kill_rate(&self) -> u64 {
        match self {
            ArenaScenario::Closed(s) => s.m(),
            ArenaScenario::Open(s) => s.m(),
            ArenaScenario::Complex(s) => s.m2(),
            ArenaScenario::Hallway(s) => s.m(),
        }
    }
}

/// Exposed survivor pool during 1-based `minute`: the people the shooter can
/// hit once that minute's exiters are out. For a complex arena this covers
/// the final (seek-and-shoot) phase.
pub fn remaining_civilians(arena: &ArenaScenario, minute: u32) -> Result<u64> {
    match arena {
        ArenaScenario::Closed(s) => s.census(minute),
        ArenaScenario::Open(s) => s.exposed(minute),
        ArenaScenario::Complex(s) => s.phase2_exposed(minute),
        ArenaScenario::Hallway(_) => Err(Error::DegenerateScenario(
            "per-minute pools are not defined for hallway scenarios".into(),
        )),
    }
}

/// A validated arena + armament (+ optional joint-fight) package.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioBundle {
    pub arena: ArenaScenario,
    pub armament: ArmamentProfile,
    pub multi_armed: Option<MultiArmedProfile>,
}

impl ScenarioBundle {
    /// Assemble and cross-validate. Collects every violation across the
    /// arena, the armament, and the schedules.
    pub fn assemble(
        arena: std::result::Result<ArenaScenario, ValidationErrors>,
        armament: ArmamentProfile,
        multi_armed: Option<MultiArmedProfile>,
        arena_kind: &str,
    ) -> Result<Self, ValidationErrors> {
        let mut errs = Vec::new();
        let arena = match arena {
            Ok(a) => Some(a),
            Err(e) => {
                errs.extend(e.0);
                None
            }
        };
        errs.extend(armament.check(arena_kind));
        if let Some(profile) = &multi_armed {
            let base_fight = if arena_kind == "complex" {
                armament.p_tilde2.unwrap_or(armament.p2)
            } else {
                armament.p2
            };
            errs.extend(profile.check(base_fight));
            match &arena {
                Some(ArenaScenario::Hallway(_)) => {
                    errs.push(Error::RangeViolation(
                        "multi_armed profiles are not supported for hallway scenarios".into(),
                    ));
                }
                Some(arena) => {
                    if let Ok(pools) = arena.census_profile() {
                        let (schedule_errs, _) =
                            profile.check_schedules(&pools, arena.kill_rate());
                        errs.extend(schedule_errs);
                    }
                }
                None => {}
            }
        }
        match (arena, errs.is_empty()) {
            (Some(arena), true) => Ok(ScenarioBundle { arena, armament, multi_armed }),
            _ => Err(ValidationErrors(errs)),
        }
    }

    /// Re-run every check against the already-typed values. Validation is
    /// idempotent: a bundle that was built successfully passes unchanged.
    pub fn revalidate(&self) -> Result<(), ValidationErrors> {
        let arena = Ok(self.arena.clone());
        let again = Self::assemble(
            arena,
            self.armament,
            self.multi_armed.clone(),
            self.arena.kind(),
        )?;
        debug_assert_eq!(&again, self);
        Ok(())
    }

    /// Scenario warnings plus schedule warnings, for display.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = self.arena.warnings();
        if let Some(profile) = &self.multi_armed {
            if let Ok(pools) = self.arena.census_profile() {
                let (_, w) = profile.check_schedules(&pools, self.arena.kill_rate());
                out.extend(w);
            }
        }
        out
    }
}

fn in_horizon(minute: u32, horizon: u32) -> Result<()> {
    if minute < 1 || minute > horizon {
        Err(Error::OutOfHorizon { minute, horizon })
    } else {
        Ok(())
    }
}
