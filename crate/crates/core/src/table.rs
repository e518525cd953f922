//! Action-by-minute survival tables and their renderings.

use std::fmt;

/// What the civilian of focus does during a minute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Action {
    Fight,
    Hide,
    Run,
}

impl Action {
    pub fn label(&self) -> &'static str {
        match self {
            Action::Fight => "fight",
            Action::Hide => "hide",
            Action::Run => "run",
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Which side wins the race between the authority and the shooter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseTag {
    /// The authority arrives before the arena can empty (T1 > T2).
    AuthorityFirst,
    /// The shooter can clear the arena before the authority arrives (T1 <= T2).
    ShooterFinishes,
}

impl CaseTag {
    pub fn from_horizons(t1: u32, t2: u32) -> Self {
        if t1 > t2 {
            CaseTag::AuthorityFirst
        } else {
            CaseTag::ShooterFinishes
        }
    }
}

/// Row meaning: fight/run entries are "hide until this minute, then act";
/// hide entries are "still alive after hiding through this minute".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSemantics {
    DeviateAtMinute,
    HideThrough,
}

/// Survival probabilities for each action over the incident horizon.
///
/// Entry conventions: `fight[i-1]` is the probability of surviving the whole
/// incident when hiding for minutes `1..i-1` and fighting at minute `i`
/// (same for `run`); `hide[i-1]` is the probability of being alive after
/// hiding through minutes `1..=i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalTable {
    pub case: CaseTag,
    pub fight: Vec<f64>,
    pub hide: Vec<f64>,
    pub run: Option<Vec<f64>>,
}

impl SurvivalTable {
    pub fn horizon(&self) -> u32 {
        self.fight.len() as u32
    }

    /// Ordered row labels present in this table.
    pub fn actions(&self) -> Vec<Action> {
        let mut out = vec![Action::Fight, Action::Hide];
        if self.run.is_some() {
            out.push(Action::Run);
        }
        out
    }

    pub fn semantics(action: Action) -> RowSemantics {
        match action {
            Action::Hide => RowSemantics::HideThrough,
            _ => RowSemantics::DeviateAtMinute,
        }
    }

    pub fn row(&self, action: Action) -> Option<&[f64]> {
        match action {
            Action::Fight => Some(&self.fight),
            Action::Hide => Some(&self.hide),
            Action::Run => self.run.as_deref(),
        }
    }

    /// Value at a 1-based minute.
    pub fn get(&self, action: Action, minute: u32) -> Option<f64> {
        self.row(action)?.get(minute as usize - 1).copied()
    }

    /// All entries lie in [0, 1].
    pub fn well_formed(&self) -> bool {
        self.actions()
            .iter()
            .flat_map(|&a| self.row(a).unwrap())
            .all(|&v| (0.0..=1.0).contains(&v) && v.is_finite())
    }

    /// CSV rendering: `minute,fight,hide[,run]`, six decimal places.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("minute,fight,hide");
        if self.run.is_some() {
            out.push_str(",run");
        }
        out.push('\n');
        for (i, (fight, hide)) in self.fight.iter().zip(&self.hide).enumerate() {
            out.push_str(&format!("{},{fight:.6},{hide:.6}", i + 1));
            if let Some(run) = &self.run {
                out.push_str(&format!(",{:.6}", run[i]));
            }
            out.push('\n');
        }
        out
    }

    /// Text rendering mirroring the row/column layout of the reference
    /// tables: one row per action, three decimal places.
    pub fn to_text(&self) -> String {
        render_rows(
            self.horizon(),
            self.actions()
                .into_iter()
                .map(|a| (a.label().to_string(), self.row(a).unwrap().to_vec()))
                .collect(),
        )
    }
}

/// Shared text layout for one-row-per-action tables, including multi-row
/// variants (armed and unarmed fight rows side by side).
pub fn render_rows(horizon: u32, rows: Vec<(String, Vec<f64>)>) -> String {
    let label_width = rows
        .iter()
        .map(|(l, _)| l.len())
        .max()
        .unwrap_or(6)
        .max("minute".len());
    let mut out = format!("{:<label_width$}", "minute");
    for i in 1..=horizon {
        out.push_str(&format!(" {i:>6}"));
    }
    out.push('\n');
    for (label, values) in rows {
        out.push_str(&format!("{label:<label_width$}"));
        for v in values {
            out.push_str(&format!(" {v:>6.3}"));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> SurvivalTable {
        SurvivalTable {
            case: CaseTag::AuthorityFirst,
            fight: vec![0.6, 0.45],
            hide: vec![0.75, 0.5],
            run: Some(vec![0.1, 0.075]),
        }
    }

    #[test]
    fn csv_layout() {
        let csv = table().to_csv();
        assert_eq!(
            csv,
            "minute,fight,hide,run\n1,0.600000,0.750000,0.100000\n2,0.450000,0.500000,0.075000\n"
        );
    }

    #[test]
    fn csv_omits_run_when_absent() {
        let mut t = table();
        t.run = None;
        assert!(t.to_csv().starts_with("minute,fight,hide\n"));
    }

    #[test]
    fn text_layout_rows() {
        let text = table().to_text();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[0].starts_with("minute"));
        assert!(lines[1].contains("0.600"));
        assert!(lines[3].contains("0.075"));
    }

    #[test]
    fn get_is_one_based() {
        let t = table();
        assert_eq!(t.get(Action::Hide, 1), Some(0.75));
        assert_eq!(t.get(Action::Fight, 3), None);
    }

    #[test]
    fn case_tag_split() {
        assert_eq!(CaseTag::from_horizons(4, 2), CaseTag::AuthorityFirst);
        assert_eq!(CaseTag::from_horizons(4, 4), CaseTag::ShooterFinishes);
    }
}
