//! Named check outcomes collected by the verifiers.

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyMode {
    /// Every check, including exhaustive and brute-force ones.
    Full,
    /// Skips brute-force faithfulness and exhaustive action-axiom checks.
    Fast,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail { counterexample: String },
    Skipped { reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub label: String,
    #[serde(flatten)]
    pub outcome: Outcome,
}

impl Verdict {
    pub fn pass(label: &str) -> Self {
        Verdict {
            label: label.into(),
            outcome: Outcome::Pass,
        }
    }

    pub fn fail(label: &str, counterexample: impl Into<String>) -> Self {
        Verdict {
            label: label.into(),
            outcome: Outcome::Fail {
                counterexample: counterexample.into(),
            },
        }
    }

    pub fn skipped(label: &str, reason: impl Into<String>) -> Self {
        Verdict {
            label: label.into(),
            outcome: Outcome::Skipped {
                reason: reason.into(),
            },
        }
    }

    /// `Pass` when `check` is `Ok`, otherwise `Fail` carrying the error text.
    pub fn from_check(label: &str, check: std::result::Result<(), String>) -> Self {
        match check {
            Ok(()) => Verdict::pass(label),
            Err(c) => Verdict::fail(label, c),
        }
    }

    pub fn is_pass(&self) -> bool {
        self.outcome == Outcome::Pass
    }

    pub fn is_fail(&self) -> bool {
        matches!(self.outcome, Outcome::Fail { .. })
    }
}

/// True when no verdict failed; skipped checks do not count against.
pub fn all_passed(verdicts: &[Verdict]) -> bool {
    !verdicts.iter().any(Verdict::is_fail)
}
