//! Verdicts, witnesses, and the numerics policy.

use serde::{Deserialize, Serialize};

use crate::num::{ExtReal, Mode};

/// Outcome of a membership or certification check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decision {
    Accepted,
    Rejected,
    /// The certified bracket straddles the bound at the requested tolerance;
    /// the caller must tighten the tolerance to decide.
    Inconclusive,
}

/// The concrete violation behind a rejection: enough to recompute it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    /// Violating parameter (member label, `p` value, cell, …).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parameter: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome: Option<String>,
    /// The level `ε` at which a p-constraint failed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<ExtReal>,
    /// The attained value of the binding quantity.
    pub attained: ExtReal,
    /// The bound it had to respect.
    pub bound: ExtReal,
}

/// Result record of every membership check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub decision: Decision,
    /// Slack of the binding constraint: `bound − attained` (negative on
    /// rejection). For inconclusive verdicts, the slack of the certified
    /// upper bound.
    pub margin: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    /// Certified bracket `[lower, upper]` of the binding quantity when the
    /// check went through an envelope.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bracket: Option<(f64, f64)>,
    pub mode: Mode,
}

impl Verdict {
    pub fn accepted(margin: f64, mode: Mode) -> Self {
        Verdict {
            decision: Decision::Accepted,
            margin,
            witness: None,
            bracket: None,
            mode,
        }
    }

    pub fn rejected(witness: Witness, mode: Mode) -> Self {
        let margin = witness.bound.to_f64() - witness.attained.to_f64();
        Verdict {
            decision: Decision::Rejected,
            margin,
            witness: Some(witness),
            bracket: None,
            mode,
        }
    }

    pub fn inconclusive(bracket: (f64, f64), bound: f64, mode: Mode) -> Self {
        Verdict {
            decision: Decision::Inconclusive,
            margin: bound - bracket.1,
            witness: None,
            bracket: Some(bracket),
            mode,
        }
    }

    pub fn with_bracket(mut self, bracket: (f64, f64)) -> Self {
        self.bracket = Some(bracket);
        self
    }

    pub fn is_accepted(&self) -> bool {
        self.decision == Decision::Accepted
    }

    pub fn is_rejected(&self) -> bool {
        self.decision == Decision::Rejected
    }

    /// Combines per-constraint verdicts: rejected dominates, then
    /// inconclusive; margins take the minimum.
    pub fn combine(self, other: Verdict) -> Verdict {
        use Decision::*;
        let mode = self.mode.combine(other.mode);
        let (mut worse, better) = match (self.decision, other.decision) {
            (Rejected, _) => (self, other),
            (_, Rejected) => (other, self),
            (Inconclusive, _) => (self, other),
            (_, Inconclusive) => (other, self),
            _ => {
                if self.margin <= other.margin {
                    (self, other)
                } else {
                    (other, self)
                }
            }
        };
        worse.margin = worse.margin.min(better.margin);
        worse.mode = mode;
        worse
    }
}

/// How an operation is allowed to compute.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericsPolicy {
    pub mode: Mode,
    /// Certification tolerance used by binary64 envelope brackets.
    pub tolerance: f64,
}

impl NumericsPolicy {
    pub fn exact() -> Self {
        NumericsPolicy {
            mode: Mode::ExactRational,
            tolerance: 0.0,
        }
    }

    pub fn binary64(tolerance: f64) -> Self {
        NumericsPolicy {
            mode: Mode::Binary64,
            tolerance,
        }
    }
}

impl Default for NumericsPolicy {
    fn default() -> Self {
        NumericsPolicy::binary64(1e-9)
    }
}
