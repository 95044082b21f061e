//! Stratified success rates.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::EvalRecord;
use crate::task::{Category, Difficulty};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Rate {
    pub correct: usize,
    pub attempted: usize,
    pub rate: f64,
}

impl Rate {
    fn add(&mut self, correct: bool) {
        self.attempted += 1;
        self.correct += correct as usize;
        self.rate = self.correct as f64 / self.attempted as f64;
    }
}

/// Strata with no attempts are absent rather than reported as zero.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub overall: Rate,
    pub by_category: BTreeMap<Category, Rate>,
    pub by_difficulty: BTreeMap<Difficulty, Rate>,
    pub by_stratum: BTreeMap<Category, BTreeMap<Difficulty, Rate>>,
    /// Records whose request failed; excluded from every rate.
    pub errored: usize,
    pub records: usize,
}

pub fn summarize(records: &[EvalRecord]) -> Report {
    let mut report = Report {
        records: records.len(),
        ..Report::default()
    };
    for r in records {
        if r.error.is_some() {
            report.errored += 1;
            continue;
        }
        report.overall.add(r.correct);
        report.by_category.entry(r.category).or_default().add(r.correct);
        report.by_difficulty.entry(r.difficulty).or_default().add(r.correct);
        report
            .by_stratum
            .entry(r.category)
            .or_default()
            .entry(r.difficulty)
            .or_default()
            .add(r.correct);
    }
    report
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// Plain-text table: categories down, difficulties across.
    pub fn to_text(&self) -> String {
        let cell = |r: Option<&Rate>| match r {
            Some(r) => format!("{:.3} ({}/{})", r.rate, r.correct, r.attempted),
            None => "-".to_string(),
        };
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<16}{:>18}{:>18}{:>18}{:>18}",
            "category", "easy", "medium", "hard", "all"
        );
        for category in Category::ALL {
            let strata = self.by_stratum.get(&category);
            let _ = write!(out, "{:<16}", category.name());
            for difficulty in Difficulty::ALL {
                let _ = write!(out, "{:>18}", cell(strata.and_then(|s| s.get(&difficulty))));
            }
            let _ = writeln!(out, "{:>18}", cell(self.by_category.get(&category)));
        }
        let _ = write!(out, "{:<16}", "all");
        for difficulty in Difficulty::ALL {
            let _ = write!(out, "{:>18}", cell(self.by_difficulty.get(&difficulty)));
        }
        let overall = (self.overall.attempted > 0).then_some(&self.overall);
        let _ = writeln!(out, "{:>18}", cell(overall));
        let _ = writeln!(out, "errored: {} of {} records", self.errored, self.records);
        out
    }
}
