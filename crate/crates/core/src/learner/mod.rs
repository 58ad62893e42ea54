//! Observation tables and the learning loop for residual nominal languages.
//!
//! Whenever the table is not join-closed, every word up to the length of the
//! offending extension becomes a row label, so the labels are always all
//! words up to some length `l`.

mod hypothesis;
mod table;

use std::fmt;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::orbits::{AlphabetError, Word};
use crate::teacher::{EquivalenceAnswer, Teacher};

pub use hypothesis::{Hypothesis, HypothesisError, HypothesisState};
pub use table::{ClosednessDefect, ConsistencyDefect, ObservationTable};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_eq: u64,
    pub max_l: usize,
    pub wall_time: Option<Duration>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_eq: 50,
            max_l: 6,
            wall_time: None,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, PartialEq, Eq)]
pub struct LearnStats {
    pub membership_queries: u64,
    pub equivalence_queries: u64,
    pub closedness_rounds: u64,
    pub consistency_rounds: u64,
    pub final_l: usize,
    pub diverged: bool,
    pub wall_time_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DivergeReason {
    /// Closing the table needs row labels longer than allowed.
    RowLength {
        needed: usize,
    },
    EquivalenceQueries,
    WallTime,
}

impl fmt::Display for DivergeReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DivergeReason::RowLength { needed } => {
                write!(f, "closing the table needs row labels of length {needed}")
            }
            DivergeReason::EquivalenceQueries => f.write_str("equivalence query budget exhausted"),
            DivergeReason::WallTime => f.write_str("wall-time budget exhausted"),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Outcome {
    Learned(Hypothesis),
    Diverged(DivergeReason),
}

#[derive(Debug, Error)]
pub enum LearnError {
    #[error("membership query failed: {0}")]
    Membership(#[from] AlphabetError),
    #[error(transparent)]
    Hypothesis(#[from] HypothesisError),
    #[error("counterexample {0} adds no new column")]
    Stalled(Word),
}

/// Extra invariant checks run by [`learn_with`].
#[derive(Clone, Copy, Debug, Default)]
pub struct Checks {
    /// Assert that every consistency repair strictly refines the row
    /// preorder on label pairs.
    pub preorder_refines: bool,
}

#[derive(Debug)]
pub struct LearnResult {
    pub outcome: Outcome,
    pub stats: LearnStats,
    /// One line per loop event.
    pub trace: Vec<String>,
    pub table: ObservationTable,
    /// Hypotheses built (each checked against the table).
    pub hypotheses: u64,
    /// Invariant violations found along the way; empty on a sound run.
    pub violations: Vec<String>,
}

impl LearnResult {
    pub fn hypothesis(&self) -> Option<&Hypothesis> {
        match &self.outcome {
            Outcome::Learned(h) => Some(h),
            Outcome::Diverged(_) => None,
        }
    }
}

pub fn learn(teacher: &Teacher, budget: &Budget) -> Result<LearnResult, LearnError> {
    learn_with(teacher, budget, Checks::default())
}

pub fn learn_with(
    teacher: &Teacher,
    budget: &Budget,
    checks: Checks,
) -> Result<LearnResult, LearnError> {
    let start = Instant::now();
    let mq0 = teacher.membership.query_count();
    let mut table = ObservationTable::new(teacher.alphabet().clone());
    let mut stats = LearnStats::default();
    let mut trace = Vec::new();
    let mut violations = Vec::new();
    let mut hypotheses = 0;
    let over_time = || budget.wall_time.is_some_and(|t| start.elapsed() > t);

    let outcome = 'outer: loop {
        loop {
            if over_time() {
                break 'outer Outcome::Diverged(DivergeReason::WallTime);
            }
            table.fill(&teacher.membership)?;
            if let Some(d) = table.find_closedness_defect() {
                let needed = d.s.len() + 1;
                if needed > budget.max_l {
                    trace.push(format!("closedness defect {} exceeds l budget", d.word()));
                    break 'outer Outcome::Diverged(DivergeReason::RowLength { needed });
                }
                table.close_step(&d);
                stats.closedness_rounds += 1;
                trace.push(format!("close: {} -> l = {}", d.word(), table.l()));
                continue;
            }
            if let Some(d) = table.find_consistency_defect() {
                let before = checks.preorder_refines.then(|| table.row_preorder());
                table.consistency_step(&d);
                stats.consistency_rounds += 1;
                trace.push(format!(
                    "consistency: {} <= {} split by {} {}",
                    d.s1, d.s2, d.a, d.e
                ));
                if let Some(before) = before {
                    table.fill(&teacher.membership)?;
                    let after = table.row_preorder();
                    if !(after.is_subset(&before) && after.len() < before.len()) {
                        violations.push(format!("preorder did not refine after {} {}", d.a, d.e));
                    }
                }
                continue;
            }
            break;
        }

        let hyp = table.build_hypothesis()?;
        hypotheses += 1;
        let bad = hyp.table_disagreements(&table);
        if !bad.is_empty() {
            violations.push(format!(
                "hypothesis disagrees with the table on {} words, first {}",
                bad.len(),
                bad[0]
            ));
        }
        trace.push(format!(
            "hypothesis: {} state orbits, {} transition lines",
            hyp.automaton.states.len(),
            hyp.automaton.transitions.len()
        ));
        if stats.equivalence_queries >= budget.max_eq {
            break Outcome::Diverged(DivergeReason::EquivalenceQueries);
        }
        stats.equivalence_queries += 1;
        match teacher.equivalence.equivalent(&hyp.automaton) {
            EquivalenceAnswer::Yes => {
                trace.push("equivalence: yes".to_string());
                break Outcome::Learned(hyp);
            }
            EquivalenceAnswer::Counterexample(cex) => {
                trace.push(format!("equivalence: counterexample {cex}"));
                if !table.add_columns(cex.clone()) {
                    return Err(LearnError::Stalled(cex));
                }
            }
        }
    };

    stats.membership_queries = teacher.membership.query_count() - mq0;
    stats.final_l = table.l();
    stats.diverged = matches!(outcome, Outcome::Diverged(_));
    stats.wall_time_ms = start.elapsed().as_millis() as u64;
    if let Outcome::Diverged(r) = &outcome {
        trace.push(format!("diverged: {r}"));
    }
    Ok(LearnResult {
        outcome,
        stats,
        trace,
        table,
        hypotheses,
        violations,
    })
}
