use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
    /// A search ran out of budget; the payload is a sound lower bound only.
    LowerBound,
}

/// A verdict plus the counterexample backing a `Fail`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification<W> {
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<W>,
}

impl<W> Verification<W> {
    pub fn pass() -> Self {
        Verification {
            verdict: Verdict::Pass,
            witness: None,
        }
    }

    pub fn fail(witness: W) -> Self {
        Verification {
            verdict: Verdict::Fail,
            witness: Some(witness),
        }
    }

    pub fn from_witness(witness: Option<W>) -> Self {
        match witness {
            Some(w) => Verification::fail(w),
            None => Verification::pass(),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}
