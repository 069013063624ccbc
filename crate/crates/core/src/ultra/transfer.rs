use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::coloring::PerCoordColorings;
use super::sequence::StructureSequence;
use super::trending::{is_trending, TrendingReport, Truth};
use super::verdict::final_run_start;
use crate::arrow::ArrowInstance;
use crate::error::{Error, Result};
use crate::structure::{FinStructure, SubsetCopy};

/// Colors of the `A`-copies inside each `B`-copy of one factor.
struct Shadow {
    b_colors: Vec<Vec<Option<usize>>>,
}

impl Shadow {
    fn new(
        m: &FinStructure,
        b: &FinStructure,
        a: &FinStructure,
        mut color: impl FnMut(&SubsetCopy) -> Result<Option<usize>>,
    ) -> Result<Self> {
        let inst = ArrowInstance::new(m, b, a, 1, 1)?;
        let colors = inst
            .a_copies
            .iter()
            .map(&mut color)
            .collect::<Result<Vec<_>>>()?;
        let b_colors = inst
            .b_members
            .iter()
            .map(|members| members.iter().map(|&i| colors[i]).collect())
            .collect();
        Ok(Shadow { b_colors })
    }

    fn phi(&self, s: &BTreeSet<usize>) -> bool {
        self.b_colors
            .iter()
            .any(|cs| cs.iter().all(|c| c.is_some_and(|c| s.contains(&c))))
    }

    fn select(&self, k: usize, d: usize) -> Option<BTreeSet<usize>> {
        let mut pick: Vec<usize> = (0..d).collect();
        if d > k {
            return None;
        }
        loop {
            let s: BTreeSet<usize> = pick.iter().copied().collect();
            if self.phi(&s) {
                return Some(s);
            }
            let mut i = d;
            loop {
                if i == 0 {
                    return None;
                }
                i -= 1;
                if pick[i] < k - d + i {
                    pick[i] += 1;
                    for j in i + 1..d {
                        pick[j] = pick[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }
}

/// `M ⊨ φ_{B,S}`: some copy of `b` has every copy of `a` inside it colored
/// from `s`. Copies the oracle leaves uncolored count as outside `s`.
pub fn phi_bs_eval(
    m: &FinStructure,
    b: &FinStructure,
    a: &FinStructure,
    color: impl Fn(&SubsetCopy) -> Option<usize>,
    s: &BTreeSet<usize>,
) -> Result<bool> {
    Ok(Shadow::new(m, b, a, |c| Ok(color(c)))?.phi(s))
}

/// The lexicographically least `d`-subset `S ⊆ k` with `M ⊨ φ_{B,S}`.
pub fn select_s(
    m: &FinStructure,
    b: &FinStructure,
    a: &FinStructure,
    color: impl Fn(&SubsetCopy) -> Option<usize>,
    k: usize,
    d: usize,
) -> Result<Option<BTreeSet<usize>>> {
    if d == 0 {
        return Err(Error::InvalidArgument("d must be at least 1".into()));
    }
    Ok(Shadow::new(m, b, a, |c| Ok(color(c)))?.select(k, d))
}

/// Outcome of the finite shadow of the ultraproduct transfer argument.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransferReport {
    pub k: usize,
    pub d: usize,
    pub horizon: usize,
    pub trending: TrendingReport,
    /// `S_t` for each coordinate, `None` when no `d`-subset works or `t ∉ Z`.
    pub selected: Vec<Option<BTreeSet<usize>>>,
    /// Start of the final run on which some `S_t` exists, if the range ends
    /// inside such a run.
    pub exists_from: Option<usize>,
    /// The most frequent `S_t` on the tail window, least first on ties.
    pub s0: Option<BTreeSet<usize>>,
    /// Number of coordinates in the window with `S_t = S₀`.
    pub recurrence: usize,
    pub window: (usize, usize),
}

impl TransferReport {
    pub fn exists_bitmap(&self) -> Vec<bool> {
        self.selected.iter().map(Option::is_some).collect()
    }
}

/// Runs the per-coordinate selection behind the transfer argument: checks the
/// sequence is trending, picks `S_t` in each factor, and reports where a
/// selection exists together with the recurrent choice `S₀`.
pub fn transfer_shadow(
    seq: &StructureSequence,
    cols: &PerCoordColorings,
    b: &FinStructure,
    d: usize,
    horizon: usize,
) -> Result<TransferReport> {
    if d == 0 {
        return Err(Error::InvalidArgument("d must be at least 1".into()));
    }
    if horizon < seq.prefix_len() {
        return Err(Error::HorizonBelowPrefix {
            horizon,
            prefix: seq.prefix_len(),
        });
    }
    let trending = is_trending(seq, horizon)?;
    if trending.verdict() == Truth::Fails {
        return Err(Error::NotTrending(trending.failures().join(", ")));
    }
    let a = cols.pattern();
    let k = cols.k();
    let mut selected = Vec::with_capacity(horizon);
    for t in 0..horizon {
        if !cols.in_domain(t) {
            selected.push(None);
            continue;
        }
        let m = seq.member(t)?;
        let shadow = Shadow::new(&m, b, a, |c| cols.color_at(t, &m, c))?;
        selected.push(shadow.select(k, d));
    }
    let bits: Vec<bool> = selected.iter().map(Option::is_some).collect();
    let exists_from = bits
        .last()
        .copied()
        .unwrap_or(false)
        .then(|| final_run_start(&bits));
    let window = (exists_from.unwrap_or(0), horizon);
    let mut counts: BTreeMap<&BTreeSet<usize>, usize> = BTreeMap::new();
    for s in selected[window.0..window.1].iter().flatten() {
        *counts.entry(s).or_default() += 1;
    }
    let mut best: Option<(&BTreeSet<usize>, usize)> = None;
    for (s, n) in counts {
        if best.is_none_or(|(_, m)| n > m) {
            best = Some((s, n));
        }
    }
    Ok(TransferReport {
        k,
        d,
        horizon,
        trending,
        s0: best.map(|(s, _)| s.clone()),
        recurrence: best.map_or(0, |(_, n)| n),
        selected,
        exists_from,
        window,
    })
}
