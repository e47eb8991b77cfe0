//! Verification reports: one measured claim, its numbers, and a verdict that
//! is always recomputable from those numbers.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Less,
    #[serde(rename = "<=")]
    LessEqual,
    #[serde(rename = "=")]
    Equal,
    #[serde(rename = ">=")]
    GreaterEqual,
    #[serde(rename = ">")]
    Greater,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Less => "<",
            Relation::LessEqual => "<=",
            Relation::Equal => "=",
            Relation::GreaterEqual => ">=",
            Relation::Greater => ">",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// A strict relation whose margin is within tolerance of zero.
    Inconclusive,
}

/// Normalized signed slack `(lhs − rhs) / max(|lhs|, |rhs|)`.
pub fn normalized_margin(lhs: f64, rhs: f64) -> f64 {
    let scale = lhs.abs().max(rhs.abs());
    if scale == 0.0 {
        0.0
    } else {
        (lhs - rhs) / scale
    }
}

/// Verdict for `lhs relation rhs` at a normalized tolerance.
///
/// Non-strict relations pass when violated by at most `tolerance`. Strict
/// relations pass only when the margin exceeds `tolerance`; a margin inside
/// `[−tolerance, tolerance]` is inconclusive.
pub fn judge(relation: Relation, margin: f64, tolerance: f64) -> Verdict {
    if !margin.is_finite() {
        return Verdict::Fail;
    }
    let ok = |b: bool| if b { Verdict::Pass } else { Verdict::Fail };
    match relation {
        Relation::LessEqual => ok(margin <= tolerance),
        Relation::GreaterEqual => ok(margin >= -tolerance),
        Relation::Equal => ok(margin.abs() <= tolerance),
        Relation::Greater if margin > tolerance => Verdict::Pass,
        Relation::Less if margin < -tolerance => Verdict::Pass,
        Relation::Greater | Relation::Less if margin.abs() <= tolerance => Verdict::Inconclusive,
        Relation::Greater | Relation::Less => Verdict::Fail,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub claim_id: String,
    pub inputs: BTreeMap<String, Value>,
    pub lhs: f64,
    pub rhs: f64,
    pub relation: Relation,
    pub margin: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub pass: bool,
    pub notes: String,
}

impl CheckReport {
    pub fn new(claim_id: impl Into<String>, lhs: f64, relation: Relation, rhs: f64, tolerance: f64) -> Self {
        let margin = normalized_margin(lhs, rhs);
        let verdict = judge(relation, margin, tolerance);
        CheckReport {
            claim_id: claim_id.into(),
            inputs: BTreeMap::new(),
            lhs,
            rhs,
            relation,
            margin,
            tolerance,
            verdict,
            pass: verdict == Verdict::Pass,
            notes: String::new(),
        }
    }

    pub fn input(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.inputs.insert(key.to_string(), value.into());
        self
    }

    pub fn note(mut self, text: impl AsRef<str>) -> Self {
        if !self.notes.is_empty() {
            self.notes.push_str("; ");
        }
        self.notes.push_str(text.as_ref());
        self
    }

    /// True when the stored margin, verdict and pass flag follow from `lhs`, `rhs`, `relation`.
    pub fn is_consistent(&self) -> bool {
        let margin = normalized_margin(self.lhs, self.rhs);
        let verdict = judge(self.relation, margin, self.tolerance);
        (margin == self.margin || (margin.is_nan() && self.margin.is_nan()))
            && verdict == self.verdict
            && self.pass == (verdict == Verdict::Pass)
    }

    /// One human-readable summary line.
    pub fn summary_line(&self) -> String {
        let tag = match self.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        };
        format!(
            "[{tag}] {}: {:.6e} {} {:.6e} (margin {:+.3e}, tol {:.1e})",
            self.claim_id, self.lhs, self.relation, self.rhs, self.margin, self.tolerance
        )
    }
}
