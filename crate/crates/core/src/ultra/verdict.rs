use std::fmt;

use serde::{Deserialize, Serialize};

/// What every nonprincipal ultrafilter agrees on for a set `{t : …}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum FrechetVerdict {
    /// True for every `t ≥ threshold`.
    HoldsCofinitely { threshold: usize },
    /// False for every `t ≥ threshold`.
    FailsCofinitely { threshold: usize },
    /// Neither tail could be certified.
    Undecided,
}

impl FrechetVerdict {
    pub fn negate(self) -> Self {
        match self {
            FrechetVerdict::HoldsCofinitely { threshold } => {
                FrechetVerdict::FailsCofinitely { threshold }
            }
            FrechetVerdict::FailsCofinitely { threshold } => {
                FrechetVerdict::HoldsCofinitely { threshold }
            }
            FrechetVerdict::Undecided => FrechetVerdict::Undecided,
        }
    }

    pub fn holds(&self) -> bool {
        matches!(self, FrechetVerdict::HoldsCofinitely { .. })
    }

    pub fn fails(&self) -> bool {
        matches!(self, FrechetVerdict::FailsCofinitely { .. })
    }

    pub fn threshold(&self) -> Option<usize> {
        match self {
            FrechetVerdict::HoldsCofinitely { threshold }
            | FrechetVerdict::FailsCofinitely { threshold } => Some(*threshold),
            FrechetVerdict::Undecided => None,
        }
    }

    /// Certified value with threshold, when decided.
    pub fn decided(value: bool, threshold: usize) -> Self {
        if value {
            FrechetVerdict::HoldsCofinitely { threshold }
        } else {
            FrechetVerdict::FailsCofinitely { threshold }
        }
    }
}

impl fmt::Display for FrechetVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrechetVerdict::HoldsCofinitely { threshold } => write!(f, "holds from t = {threshold}"),
            FrechetVerdict::FailsCofinitely { threshold } => write!(f, "fails from t = {threshold}"),
            FrechetVerdict::Undecided => f.write_str("undecided"),
        }
    }
}

/// A verdict together with the truth values observed on `0..horizon`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LosOutcome {
    #[serde(flatten)]
    pub verdict: FrechetVerdict,
    pub bitmap: Vec<bool>,
}

impl LosOutcome {
    pub fn negate(self) -> Self {
        LosOutcome {
            verdict: self.verdict.negate(),
            bitmap: self.bitmap.into_iter().map(|b| !b).collect(),
        }
    }

    pub fn bitmap_string(&self) -> String {
        self.bitmap.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

/// Start of the last maximal constant run.
pub(crate) fn final_run_start(bits: &[bool]) -> usize {
    match bits.last() {
        None => 0,
        Some(&last) => bits
            .iter()
            .rposition(|&b| b != last)
            .map_or(0, |i| i + 1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn runs_and_negation() {
        assert_eq!(final_run_start(&[false, true, true]), 1);
        assert_eq!(final_run_start(&[true, true]), 0);
        assert_eq!(final_run_start(&[true, false, true, false]), 3);
        let v = FrechetVerdict::HoldsCofinitely { threshold: 4 };
        assert_eq!(v.negate(), FrechetVerdict::FailsCofinitely { threshold: 4 });
        assert_eq!(v.negate().negate(), v);
        assert_eq!(FrechetVerdict::Undecided.negate(), FrechetVerdict::Undecided);
    }
}
