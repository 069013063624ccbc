use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::node::{e_cmp, Node};
use super::set::{extensions, TreeSet};
use crate::error::{Error, Result};

/// Height of the node on tree level `level` with lexicographic rank `rank`.
pub fn w0_height(level: usize, rank: usize) -> usize {
    3 * ((1usize << level) - 1 + rank)
}

/// The node of `W₀` reached by following `path` (a node of `2^{<ω}` read as
/// a sequence of directions). Its bit at each ancestor's height is the
/// direction taken there; every other bit is 0.
pub fn w0_node(path: &Node) -> Node {
    let level = path.len();
    let mut out = Node::root();
    let mut rank = 0usize;
    for j in 0..level {
        out = out.pad_zeros(w0_height(j, rank));
        let d = path.bit(j);
        out.push(d);
        rank = 2 * rank + d as usize;
    }
    out.pad_zeros(w0_height(level, rank))
}

/// `W₀` restricted to heights below `depth`, built level by level with the
/// leftmost admissible placement.
pub fn build_w0(depth: usize) -> Result<TreeSet> {
    if depth < 3 {
        return Err(Error::InsufficientDepth(format!(
            "W₀ needs depth at least 3, got {depth}"
        )));
    }
    let mut out = TreeSet::new();
    for level in 0.. {
        if w0_height(level, 0) >= depth {
            break;
        }
        for rank in 0..1usize << level {
            if w0_height(level, rank) >= depth {
                break;
            }
            let path = Node::from_bits((0..level).rev().map(|j| rank >> j & 1 == 1));
            out.insert(w0_node(&path));
        }
    }
    Ok(out)
}

/// Outcome of checking the `W₀` properties; `zero_fill` is `None` when the
/// property was not requested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct W0Check {
    pub root: bool,
    pub heights: bool,
    pub tree: bool,
    pub e_order: bool,
    pub separated: bool,
    pub zero_fill: Option<bool>,
}

impl W0Check {
    pub fn all(&self) -> bool {
        self.root
            && self.heights
            && self.tree
            && self.e_order
            && self.separated
            && self.zero_fill.unwrap_or(true)
    }

    /// `(property, passed)` pairs in the order (1)–(6).
    pub fn items(&self) -> Vec<(&'static str, bool)> {
        let mut v = vec![
            ("root", self.root),
            ("heights", self.heights),
            ("tree", self.tree),
            ("e_order", self.e_order),
            ("separated", self.separated),
        ];
        if let Some(z) = self.zero_fill {
            v.push(("zero_fill", z));
        }
        v
    }
}

/// Groups a meet-closed set with a root into tree levels, or `None` if the
/// set does not branch like an initial part of `2^{<ω}`.
fn tree_levels(w: &TreeSet) -> Option<Vec<Vec<Node>>> {
    if w.is_empty() || w.root().is_none() || !w.is_meet_closed() {
        return None;
    }
    let pre = w.preorder();
    let mut level_of: BTreeMap<&Node, usize> = BTreeMap::new();
    let mut levels: Vec<Vec<Node>> = Vec::new();
    for n in w.iter() {
        let lvl = pre
            .iter()
            .filter(|a| a.len() < n.len() && a.is_prefix_of(n))
            .count();
        level_of.insert(n, lvl);
        if levels.len() <= lvl {
            levels.resize(lvl + 1, Vec::new());
        }
        levels[lvl].push(n.clone());
    }
    for n in w.iter() {
        for d in [false, true] {
            let children = extensions(&pre, &n.child(d))
                .iter()
                .filter(|c| level_of[c] == level_of[n] + 1)
                .count();
            if children > 1 {
                return None;
            }
        }
    }
    let last = levels.len() - 1;
    let full = levels
        .iter()
        .enumerate()
        .all(|(l, nodes)| nodes.len() == 1 << l || (l == last && nodes.len() < 1 << l));
    full.then_some(levels)
}

fn check_common(w: &TreeSet) -> (bool, bool, bool) {
    let Some(levels) = tree_levels(w) else {
        return (false, false, false);
    };
    let e_order = levels.iter().all(|lvl| {
        let mut by_e = lvl.clone();
        by_e.sort_by(e_cmp);
        by_e.windows(2).all(|p| p[0].len() < p[1].len())
    });
    let separated = levels.windows(2).all(|p| {
        let top = p[0].iter().map(Node::len).max().unwrap_or(0);
        p[1].iter().all(|n| n.len() > top)
    });
    (true, e_order, separated)
}

/// Checks properties (1)–(6) of `W₀` for a set meant to be `W₀` below
/// `depth`.
pub fn check_w0(w: &TreeSet, depth: usize) -> W0Check {
    let root = w.root().map(Node::is_root).unwrap_or(false);
    let mut per_height = vec![0usize; depth];
    let mut in_range = true;
    for n in w.iter() {
        match per_height.get_mut(n.len()) {
            Some(c) => *c += 1,
            None => in_range = false,
        }
    }
    let heights = in_range
        && per_height
            .iter()
            .enumerate()
            .all(|(h, &c)| if h % 3 == 0 { c == 1 } else { c == 0 });
    let (tree, e_order, separated) = check_common(w);
    let zero_fill = w.iter().all(|s| {
        (0..s.len()).all(|i| !s.bit(i) || w.contains(&s.truncate(i)))
    });
    W0Check {
        root,
        heights,
        tree,
        e_order,
        separated,
        zero_fill: Some(zero_fill),
    }
}

/// Checks a pruned subtree: its root is `expected_root`, heights are distinct
/// and at least 3 apart, and (3)–(5) hold.
pub fn check_pruned(z: &TreeSet, expected_root: &Node) -> W0Check {
    let root = z.root() == Some(expected_root);
    let heights: Vec<usize> = z.iter().map(Node::len).collect();
    let spaced = heights.windows(2).all(|p| p[1] >= p[0] + 3);
    let (tree, e_order, separated) = check_common(z);
    W0Check {
        root,
        heights: spaced,
        tree,
        e_order,
        separated,
        zero_fill: None,
    }
}

/// One round of grafting: above every terminal node of `W₀ ∩ 2^{<depth}`,
/// a copy of the same tree is rooted at the node's leftmost extension to
/// height `depth`.
pub fn graft_shadow(depth: usize) -> Result<TreeSet> {
    let w = build_w0(depth)?;
    let pre = w.preorder();
    let mut out = w.clone();
    for leaf in w.iter().filter(|n| extensions(&pre, n).len() == 1) {
        let base = leaf.pad_zeros(depth);
        for v in w.iter() {
            out.insert(base.extend(v.bits()));
        }
    }
    Ok(out)
}
