//! Versioned JSON reports. A report is a pure function of the command, the
//! input text, and the flags: records are sorted by id and all maps are
//! ordered, so re-running is byte-identical.

use std::collections::BTreeMap;

use serde::Serialize;
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

/// How a single record bears on the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Outcome {
    Pass,
    /// Budget ran out or a verdict stayed three-valued.
    Inconclusive,
    Fail,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub id: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExitSummary {
    pub code: i32,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct JsonReport {
    pub schema_version: u32,
    pub command: String,
    /// SHA-256 of the input document, hex.
    pub input_digest: String,
    pub seed: u64,
    pub budgets: BTreeMap<String, u64>,
    pub records: Vec<CheckRecord>,
    pub exit: ExitSummary,
    #[serde(skip)]
    outcomes: Vec<Outcome>,
}

pub fn digest(text: &str) -> String {
    let mut h = Sha256::new();
    h.update(text.as_bytes());
    let out = h.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

impl JsonReport {
    pub fn new(command: &str, input: &str, seed: u64, budgets: BTreeMap<String, u64>) -> JsonReport {
        JsonReport {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            input_digest: digest(input),
            seed,
            budgets,
            records: Vec::new(),
            exit: ExitSummary { code: 0, detail: String::new() },
            outcomes: Vec::new(),
        }
    }

    pub fn push(&mut self, id: impl Into<String>, status: impl Into<String>, outcome: Outcome) {
        self.records.push(CheckRecord {
            id: id.into(),
            status: status.into(),
            witness: None,
            certificate: None,
        });
        self.outcomes.push(outcome);
    }

    pub fn push_witness(
        &mut self,
        id: impl Into<String>,
        status: impl Into<String>,
        outcome: Outcome,
        witness: impl Into<String>,
    ) {
        self.push(id, status, outcome);
        self.records.last_mut().expect("just pushed").witness = Some(witness.into());
    }

    pub fn attach_certificate(&mut self, payload: impl Into<String>) {
        self.records.last_mut().expect("a record exists").certificate = Some(payload.into());
    }

    /// Sort records, settle the exit code (0 pass / 1 fail / 2 inconclusive)
    /// and return it.
    pub fn finalize(&mut self) -> i32 {
        let mut order: Vec<usize> = (0..self.records.len()).collect();
        order.sort_by(|&a, &b| {
            self.records[a].id.cmp(&self.records[b].id).then(a.cmp(&b))
        });
        self.records = order.iter().map(|&i| self.records[i].clone()).collect();
        self.outcomes = order.iter().map(|&i| self.outcomes[i]).collect();
        let worst = self.outcomes.iter().max().copied().unwrap_or(Outcome::Pass);
        let (code, detail) = match worst {
            Outcome::Pass => (0, "all checks passed".to_string()),
            Outcome::Inconclusive => (2, "inconclusive within budget".to_string()),
            Outcome::Fail => {
                let first = self
                    .records
                    .iter()
                    .zip(&self.outcomes)
                    .find(|(_, &o)| o == Outcome::Fail)
                    .map(|(r, _)| r.id.clone())
                    .unwrap_or_default();
                (1, format!("failed: {first}"))
            }
        };
        self.exit = ExitSummary { code, detail };
        code
    }

    pub fn render(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serialises");
        out.push('\n');
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_matches_known_value() {
        assert_eq!(
            digest(""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
        assert_eq!(
            digest("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn records_sort_and_exit_code_takes_the_worst() {
        let mut r = JsonReport::new("check", "x", 0, BTreeMap::new());
        r.push("b", "holds", Outcome::Pass);
        r.push_witness("a", "unknown", Outcome::Inconclusive, "budget");
        assert_eq!(r.finalize(), 2);
        assert_eq!(r.records[0].id, "a");

        r.push_witness("c", "fails", Outcome::Fail, "w");
        assert_eq!(r.finalize(), 1);
        assert_eq!(r.exit.detail, "failed: c");
    }

    #[test]
    fn rendering_is_reproducible() {
        let build = || {
            let mut r = JsonReport::new(
                "check",
                "category X {}",
                7,
                BTreeMap::from([("pi1".to_string(), 100u64)]),
            );
            r.push("t0.0", "holds", Outcome::Pass);
            r.finalize();
            r.render()
        };
        assert_eq!(build(), build());
    }

    #[test]
    fn equal_ids_keep_insertion_order() {
        let mut r = JsonReport::new("c", "", 0, BTreeMap::new());
        r.push_witness("x", "first", Outcome::Pass, "1");
        r.push_witness("x", "second", Outcome::Pass, "2");
        r.finalize();
        assert_eq!(r.records[0].status, "first");
        assert_eq!(r.records[1].status, "second");
    }
}
