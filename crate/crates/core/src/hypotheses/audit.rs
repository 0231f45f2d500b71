//! Cross-checker auditor: on a stream of setups, whenever a stronger
//! hypothesis set holds, the weaker one must too. Setups with undecided
//! verdicts in the consequent are excluded and counted.

use rayon::prelude::*;

use crate::error::Result;
use crate::setup::LocalisationSetup;

use super::{check_c2, check_riou, check_t0, find, riou_applies, CheckBudget, Status};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditCase {
    /// Index of the setup in the input stream.
    pub index: usize,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AuditReport {
    pub total: usize,
    /// Setups where the pushout-embedding clauses hold.
    pub riou_antecedent: usize,
    /// Antecedent holds but a connectivity grade fails.
    pub riou_violations: Vec<AuditCase>,
    /// Setups where grade 0 and cofinality both hold.
    pub c2_antecedent: usize,
    /// Antecedent holds but an arrow or pair grade fails.
    pub c2_violations: Vec<AuditCase>,
    /// Setups excluded from a conclusion because a consequent was undecided.
    pub unknown_tainted: usize,
    /// Setups where all grades hold but cofinality fails, kept as evidence
    /// that cofinality is strictly stronger.
    pub strictness_examples: Vec<usize>,
}

impl AuditReport {
    pub fn pass(&self) -> bool {
        self.riou_violations.is_empty() && self.c2_violations.is_empty()
    }
}

#[derive(Default)]
struct Record {
    riou_antecedent: bool,
    riou_violation: Option<String>,
    c2_antecedent: bool,
    c2_violation: Option<String>,
    tainted: bool,
    strict: bool,
}

fn audit_one(setup: &LocalisationSetup, budget: &CheckBudget) -> Result<Record> {
    let mut rec = Record::default();
    let t0 = check_t0(setup, budget)?;
    let t0_fail = t0
        .iter()
        .find(|r| r.status.is_fails())
        .map(|r| format!("{}: {}", r.id, r.status));
    let t0_unknown = t0.iter().any(|r| r.status.is_unknown());

    let riou = check_riou(setup)?;
    if riou_applies(&riou) {
        if t0_unknown {
            rec.tainted = true;
        } else {
            rec.riou_antecedent = true;
            rec.riou_violation = t0_fail.clone();
        }
    }

    let c2 = check_c2(setup, budget)?;
    let cof = &find(&c2, "c2.1'").expect("report present").status;
    let grade0 = &find(&c2, "c2.0").expect("report present").status;
    if grade0.is_holds() && cof.is_holds() {
        let later_unknown = ["t0.1", "t0.2"]
            .iter()
            .any(|id| find(&t0, id).is_some_and(|r| r.status.is_unknown()));
        let later_fail = ["t0.1", "t0.2"]
            .iter()
            .filter_map(|id| find(&t0, id))
            .find(|r| r.status.is_fails())
            .map(|r| format!("{}: {}", r.id, r.status));
        if later_unknown {
            rec.tainted = true;
        } else {
            rec.c2_antecedent = true;
            rec.c2_violation = later_fail;
        }
    }

    if t0_fail.is_none() && !t0_unknown && matches!(cof, Status::Fails { .. }) {
        rec.strict = true;
    }
    Ok(rec)
}

/// Run the implication audit over a stream of setups, in parallel.
pub fn implication_audit(
    setups: &[LocalisationSetup],
    budget: &CheckBudget,
) -> Result<AuditReport> {
    let records: Vec<Record> = setups
        .par_iter()
        .map(|s| audit_one(s, budget))
        .collect::<Result<Vec<_>>>()?;

    let mut report = AuditReport { total: setups.len(), ..AuditReport::default() };
    for (i, rec) in records.iter().enumerate() {
        if rec.riou_antecedent {
            report.riou_antecedent += 1;
            if let Some(detail) = &rec.riou_violation {
                report.riou_violations.push(AuditCase { index: i, detail: detail.clone() });
            }
        }
        if rec.c2_antecedent {
            report.c2_antecedent += 1;
            if let Some(detail) = &rec.c2_violation {
                report.c2_violations.push(AuditCase { index: i, detail: detail.clone() });
            }
        }
        if rec.tainted {
            report.unknown_tainted += 1;
        }
        if rec.strict {
            report.strictness_examples.push(i);
        }
    }
    Ok(report)
}
