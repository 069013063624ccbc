use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::coloring::Coloring;
use crate::error::{Error, Result};
use crate::structure::{canonical_code, enumerate_copies, FinStructure, SubsetCopy};

/// Search counters; informational only.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ArrowOutcome {
    Holds,
    /// A coloring under which no copy of the big structure is ℓ-chromatic.
    /// `no_big_copy` marks the vacuous case where the ambient structure has
    /// no copy of the big structure at all.
    Fails { witness: Coloring, no_big_copy: bool },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArrowVerdict {
    pub outcome: ArrowOutcome,
    pub stats: SearchStats,
}

impl PartialEq for ArrowVerdict {
    fn eq(&self, other: &Self) -> bool {
        self.outcome == other.outcome
    }
}

impl Eq for ArrowVerdict {}

impl ArrowVerdict {
    pub fn holds(&self) -> bool {
        matches!(self.outcome, ArrowOutcome::Holds)
    }

    pub fn witness(&self) -> Option<&Coloring> {
        match &self.outcome {
            ArrowOutcome::Fails { witness, .. } => Some(witness),
            ArrowOutcome::Holds => None,
        }
    }
}

/// The combinatorial skeleton of `C → (B)^A_{k,ℓ}`: copies of `A`, and for
/// every copy of `B` the indices of the `A`-copies inside it.
#[derive(Debug, Clone)]
pub struct ArrowInstance {
    pub a_copies: Vec<SubsetCopy>,
    pub b_copies: Vec<SubsetCopy>,
    pub b_members: Vec<Vec<usize>>,
    pub k: usize,
    pub l: usize,
    pattern: crate::structure::CanonicalCode,
    /// `closing[i]`: B-copies whose largest A-copy index is `i`.
    closing: Vec<Vec<usize>>,
}

fn combinations(items: &[usize], r: usize, out: &mut Vec<Vec<usize>>) {
    fn rec(items: &[usize], r: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < r - cur.len() {
                break;
            }
            cur.push(items[i]);
            rec(items, r, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(items, r, 0, &mut Vec::new(), out);
}

impl ArrowInstance {
    pub fn new(
        c: &FinStructure,
        b: &FinStructure,
        a: &FinStructure,
        k: usize,
        l: usize,
    ) -> Result<Self> {
        if !c.same_signature(b) || !c.same_signature(a) {
            return Err(Error::SignatureMismatch);
        }
        if k == 0 || l == 0 {
            return Err(Error::InvalidArgument("k and ℓ must be at least 1".into()));
        }
        if k > 64 {
            return Err(Error::InvalidArgument("at most 64 colors are supported".into()));
        }
        let a_copies = enumerate_copies(a, c);
        let b_copies = enumerate_copies(b, c);
        let mut b_members = Vec::with_capacity(b_copies.len());
        let mut subsets = Vec::new();
        for bc in &b_copies {
            subsets.clear();
            combinations(bc.elements(), a.size(), &mut subsets);
            let mut members: Vec<usize> = subsets
                .iter()
                .filter_map(|s| {
                    a_copies
                        .binary_search_by(|x| x.elements().cmp(s.as_slice()))
                        .ok()
                })
                .collect();
            members.sort_unstable();
            b_members.push(members);
        }
        let mut closing = vec![Vec::new(); a_copies.len()];
        for (bi, members) in b_members.iter().enumerate() {
            if let Some(&last) = members.last() {
                closing[last].push(bi);
            }
        }
        Ok(ArrowInstance {
            a_copies,
            b_copies,
            b_members,
            k,
            l,
            pattern: canonical_code(a),
            closing,
        })
    }

    fn witness(&self, colors: Vec<usize>) -> Coloring {
        Coloring::from_domain(self.pattern.clone(), self.k, self.a_copies.clone(), colors)
    }

    /// Distinct colors on a B-copy under a complete coloring.
    pub fn chromatic(&self, bi: usize, colors: &[usize]) -> usize {
        let mask = self.b_members[bi]
            .iter()
            .fold(0u64, |m, &i| m | 1 << colors[i]);
        mask.count_ones() as usize
    }

    /// Verdict without search when it is forced by counting.
    fn trivial(&self) -> Option<ArrowOutcome> {
        if self.b_copies.is_empty() {
            return Some(ArrowOutcome::Fails {
                witness: self.witness(vec![0; self.a_copies.len()]),
                no_big_copy: true,
            });
        }
        if self.l >= self.k || self.b_members.iter().any(|m| m.len() <= self.l) {
            return Some(ArrowOutcome::Holds);
        }
        None
    }

    /// True if assigning `colors[pos]` closes an ℓ-chromatic B-copy.
    fn closes_good_copy(&self, pos: usize, colors: &[usize]) -> bool {
        self.closing[pos]
            .iter()
            .any(|&bi| self.chromatic(bi, colors) <= self.l)
    }

    /// Depth-first search for a bad coloring, colors tried in increasing order
    /// with first-use canonical naming.
    fn dfs(&self, colors: &mut Vec<usize>, max_used: usize, nodes: &mut u64) -> bool {
        let pos = colors.len();
        if pos == self.a_copies.len() {
            return true;
        }
        let limit = self.k.min(max_used + 1);
        for color in 0..limit {
            *nodes += 1;
            colors.push(color);
            if !self.closes_good_copy(pos, colors)
                && self.dfs(colors, max_used.max(color + 1), nodes)
            {
                return true;
            }
            colors.pop();
        }
        false
    }

    /// Canonical prefixes of the given depth that survive pruning, in search
    /// order.
    fn prefixes(&self, depth: usize, nodes: &mut u64) -> Vec<(Vec<usize>, usize)> {
        let mut out = Vec::new();
        fn rec(
            inst: &ArrowInstance,
            depth: usize,
            colors: &mut Vec<usize>,
            max_used: usize,
            nodes: &mut u64,
            out: &mut Vec<(Vec<usize>, usize)>,
        ) {
            if colors.len() == depth {
                out.push((colors.clone(), max_used));
                return;
            }
            let pos = colors.len();
            for color in 0..inst.k.min(max_used + 1) {
                *nodes += 1;
                colors.push(color);
                if !inst.closes_good_copy(pos, colors) {
                    rec(inst, depth, colors, max_used.max(color + 1), nodes, out);
                }
                colors.pop();
            }
        }
        rec(self, depth, &mut Vec::new(), 0, nodes, &mut out);
        out
    }

    pub fn solve(&self) -> ArrowVerdict {
        if let Some(outcome) = self.trivial() {
            return ArrowVerdict {
                outcome,
                stats: SearchStats::default(),
            };
        }
        let mut nodes = 0;
        let mut colors = Vec::with_capacity(self.a_copies.len());
        let outcome = if self.dfs(&mut colors, 0, &mut nodes) {
            ArrowOutcome::Fails {
                witness: self.witness(colors),
                no_big_copy: false,
            }
        } else {
            ArrowOutcome::Holds
        };
        ArrowVerdict {
            outcome,
            stats: SearchStats { nodes },
        }
    }

    /// Splits the top of the search tree across rayon workers. The first
    /// failing prefix in search order wins, so the witness equals the
    /// sequential one.
    pub fn solve_parallel(&self) -> ArrowVerdict {
        if let Some(outcome) = self.trivial() {
            return ArrowVerdict {
                outcome,
                stats: SearchStats::default(),
            };
        }
        let depth = self.a_copies.len().min(8);
        let mut prefix_nodes = 0;
        let prefixes = self.prefixes(depth, &mut prefix_nodes);
        let total = AtomicU64::new(prefix_nodes);
        let found = prefixes.par_iter().find_map_first(|(prefix, max_used)| {
            let mut colors = prefix.clone();
            let mut nodes = 0;
            let hit = self.dfs(&mut colors, *max_used, &mut nodes);
            total.fetch_add(nodes, Ordering::Relaxed);
            hit.then_some(colors)
        });
        let outcome = match found {
            Some(colors) => ArrowOutcome::Fails {
                witness: self.witness(colors),
                no_big_copy: false,
            },
            None => ArrowOutcome::Holds,
        };
        ArrowVerdict {
            outcome,
            stats: SearchStats {
                nodes: total.into_inner(),
            },
        }
    }
}

/// Decides `C → (B)^A_{k,ℓ}`.
pub fn arrow_check(
    c: &FinStructure,
    b: &FinStructure,
    a: &FinStructure,
    k: usize,
    l: usize,
) -> Result<ArrowVerdict> {
    Ok(ArrowInstance::new(c, b, a, k, l)?.solve())
}

/// Same verdict and witness as [`arrow_check`], searched on the rayon pool.
pub fn arrow_check_parallel(
    c: &FinStructure,
    b: &FinStructure,
    a: &FinStructure,
    k: usize,
    l: usize,
) -> Result<ArrowVerdict> {
    Ok(ArrowInstance::new(c, b, a, k, l)?.solve_parallel())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrow::chromatic_count;
    use crate::structure::Signature;

    #[test]
    fn ramsey_three_three_boundary() {
        let a = FinStructure::chain(2);
        let b = FinStructure::chain(3);
        let holds = arrow_check(&FinStructure::chain(6), &b, &a, 2, 1).unwrap();
        assert!(holds.holds());
        let c5 = FinStructure::chain(5);
        let fails = arrow_check(&c5, &b, &a, 2, 1).unwrap();
        let w = fails.witness().expect("5-chain fails");
        for bc in enumerate_copies(&b, &c5) {
            assert!(chromatic_count(w, &c5, &b, &bc).unwrap() > 1);
        }
    }

    #[test]
    fn trivial_cases() {
        let a = FinStructure::chain(2);
        let b = FinStructure::chain(3);
        let c = FinStructure::chain(4);
        assert!(arrow_check(&c, &b, &a, 3, 3).unwrap().holds());
        assert!(arrow_check(&c, &b, &a, 1, 1).unwrap().holds());
        let v = arrow_check(&FinStructure::chain(2), &b, &a, 2, 1).unwrap();
        match v.outcome {
            ArrowOutcome::Fails {
                no_big_copy,
                witness,
            } => {
                assert!(no_big_copy);
                assert!(witness.colors().iter().all(|&c| c == 0));
            }
            ArrowOutcome::Holds => panic!("vacuous instance must fail"),
        }
        assert!(arrow_check(&c, &b, &a, 0, 1).is_err());
        let g = FinStructure::clique(3);
        assert_eq!(
            arrow_check(&g, &b, &a, 2, 1).unwrap_err(),
            Error::SignatureMismatch
        );
        let _ = Signature::order();
    }

    #[test]
    fn first_witness_uses_canonical_colors() {
        let a = FinStructure::chain(2);
        let b = FinStructure::chain(3);
        let v = arrow_check(&FinStructure::chain(5), &b, &a, 2, 1).unwrap();
        let w = v.witness().unwrap();
        assert_eq!(w.colors()[0], 0);
    }

    #[test]
    fn parallel_matches_sequential() {
        let a = FinStructure::chain(2);
        let b = FinStructure::chain(3);
        for n in 3..=6 {
            let c = FinStructure::chain(n);
            for k in 1..=3 {
                let s = arrow_check(&c, &b, &a, k, 1).unwrap();
                let p = arrow_check_parallel(&c, &b, &a, k, 1).unwrap();
                assert_eq!(s, p, "n={n} k={k}");
            }
        }
    }
}
