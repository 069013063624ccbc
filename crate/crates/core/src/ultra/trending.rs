use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::los::los_eval;
use super::sequence::{StructureSequence, TailRule};
use super::verdict::FrechetVerdict;
use crate::error::Result;
use crate::structure::Formula;

/// Three-valued truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truth {
    Holds,
    Fails,
    Unknown,
}

impl Truth {
    fn and(self, other: Truth) -> Truth {
        match (self, other) {
            (Truth::Fails, _) | (_, Truth::Fails) => Truth::Fails,
            (Truth::Unknown, _) | (_, Truth::Unknown) => Truth::Unknown,
            _ => Truth::Holds,
        }
    }
}

impl From<FrechetVerdict> for Truth {
    fn from(v: FrechetVerdict) -> Self {
        match v {
            FrechetVerdict::HoldsCofinitely { .. } => Truth::Holds,
            FrechetVerdict::FailsCofinitely { .. } => Truth::Fails,
            FrechetVerdict::Undecided => Truth::Unknown,
        }
    }
}

impl fmt::Display for Truth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Truth::Holds => "holds",
            Truth::Fails => "fails",
            Truth::Unknown => "unknown",
        })
    }
}

/// The three trending conditions:
/// 1. `|M_s| ≤ |M_t|` whenever `s ≤ t`;
/// 2. `|M_t| → ∞`;
/// 3. for each `i`, `M_i` embeds into almost every `M_t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrendingReport {
    pub sizes_monotone: Truth,
    pub sizes_unbounded: Truth,
    pub eventually_embeds: Truth,
    /// Condition 3 for each `i < horizon`.
    pub per_factor: Vec<Truth>,
}

impl TrendingReport {
    pub fn verdict(&self) -> Truth {
        self.sizes_monotone
            .and(self.sizes_unbounded)
            .and(self.eventually_embeds)
    }

    /// Names of the conditions certified false.
    pub fn failures(&self) -> Vec<&'static str> {
        [
            ("sizes not monotone", self.sizes_monotone),
            ("sizes bounded", self.sizes_unbounded),
            ("some factor does not eventually embed", self.eventually_embeds),
        ]
        .into_iter()
        .filter(|(_, t)| *t == Truth::Fails)
        .map(|(name, _)| name)
        .collect()
    }
}

/// Checks the trending conditions. Rule-generated tails are certified from
/// the rule; the explicit prefix is checked against them through Łoś
/// evaluation.
pub fn is_trending(seq: &StructureSequence, horizon: usize) -> Result<TrendingReport> {
    let horizon = horizon.max(seq.prefix_len() + 1);
    let sizes = (0..horizon).map(|t| seq.size(t)).collect::<Result<Vec<_>>>()?;
    let certified_tail = !matches!(seq.tail(), TailRule::Custom { .. });

    let sizes_monotone = if sizes.windows(2).any(|w| w[0] > w[1]) {
        Truth::Fails
    } else if certified_tail {
        Truth::Holds
    } else {
        Truth::Unknown
    };
    let sizes_unbounded = match seq.tail() {
        TailRule::Chain { a: 0, .. } => Truth::Fails,
        TailRule::Chain { .. } | TailRule::CofinalChain(_) => Truth::Holds,
        TailRule::Custom { .. } => Truth::Unknown,
    };

    let mut per_factor = Vec::with_capacity(horizon);
    for i in 0..horizon {
        let truth = if i >= seq.prefix_len() && certified_tail {
            Truth::Holds
        } else {
            let phi = Formula::Embeds(Arc::new((*seq.member(i)?).clone()));
            los_eval(seq, &phi, &[], horizon)?.verdict.into()
        };
        per_factor.push(truth);
    }
    let eventually_embeds = per_factor.iter().fold(Truth::Holds, |acc, &t| acc.and(t));
    let eventually_embeds = if eventually_embeds == Truth::Holds && !certified_tail {
        Truth::Unknown
    } else {
        eventually_embeds
    };
    Ok(TrendingReport {
        sizes_monotone,
        sizes_unbounded,
        eventually_embeds,
        per_factor,
    })
}
