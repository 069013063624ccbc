use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use super::devlin::devlin_types;
use super::node::{e_cmp, Node};
use super::set::{extensions, meet_closure, TreeSet};
use super::types::{embedding_type, TypeCode};
use super::w0::w0_node;
use crate::error::{Error, Result};

/// A pruned subtree `Z ≅ 2^{<levels}` together with the node of `Z` at each
/// path, and, when pruned against an antichain `Y`, the injection
/// `f: Z → Y` with `z⌢0 ⊑ f(z)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pruned {
    pub tree: TreeSet,
    pub at_path: BTreeMap<Node, Node>,
    pub leaf_of: BTreeMap<Node, Node>,
}

fn lowest<'a>(candidates: impl Iterator<Item = &'a Node>) -> Option<&'a Node> {
    candidates.min_by(|a, b| a.len().cmp(&b.len()).then_with(|| e_cmp(a, b)))
}

/// Upper bound on candidate placements tried before giving up.
const SEARCH_BUDGET: u64 = 2_000_000;

struct PruneSearch {
    upre: Vec<Node>,
    ypre: Option<Vec<Node>>,
    levels: usize,
    max_height: usize,
    /// `(path, slot of the parent, direction, level)`; slot 0 is the root.
    slots: Vec<(Node, usize, bool, usize)>,
    chosen: Vec<Node>,
    steps: u64,
}

impl PruneSearch {
    fn splits(&self, n: &Node) -> bool {
        [false, true]
            .iter()
            .all(|&d| !extensions(&self.upre, &n.child(d)).is_empty())
    }

    fn leaf_for(&self, z: &Node) -> Option<Node> {
        let ypre = self.ypre.as_ref()?;
        lowest(extensions(ypre, &z.child(false)).iter()).cloned()
    }

    fn admissible(&self, n: &Node, level: usize) -> bool {
        (level + 1 == self.levels || self.splits(n))
            && (self.ypre.is_none() || self.leaf_for(n).is_some())
    }

    fn floor_after(&self, z: &Node) -> usize {
        match self.leaf_for(z) {
            Some(f) => (z.len() + 3).max(f.len() + 1),
            None => z.len() + 3,
        }
    }

    fn fill(&mut self, i: usize, floor: usize) -> Result<bool> {
        if i == self.slots.len() {
            return Ok(true);
        }
        let remaining = self.slots.len() - i;
        if floor + 3 * (remaining - 1) > self.max_height {
            return Ok(false);
        }
        let (_, parent, d, level) = self.slots[i].clone();
        let mut candidates: Vec<Node> = extensions(&self.upre, &self.chosen[parent].child(d))
            .iter()
            .filter(|n| n.len() >= floor && self.admissible(n, level))
            .cloned()
            .collect();
        candidates.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| e_cmp(a, b)));
        for c in candidates {
            self.steps += 1;
            if self.steps > SEARCH_BUDGET {
                return Err(Error::InsufficientDepth("pruning search budget exhausted".into()));
            }
            let next_floor = self.floor_after(&c);
            self.chosen.push(c);
            if self.fill(i + 1, next_floor)? {
                return Ok(true);
            }
            self.chosen.pop();
        }
        Ok(false)
    }
}

fn prune_inner(u: &TreeSet, y: Option<&TreeSet>, levels: usize) -> Result<Pruned> {
    if levels == 0 {
        return Err(Error::InvalidArgument("at least one level is required".into()));
    }
    if u.is_empty() {
        return Err(Error::EmptyTreeSet);
    }
    if !u.is_meet_closed() {
        return Err(Error::NotMeetClosed);
    }
    let root = u.root().ok_or(Error::NotMeetClosed)?.clone();
    let mut slots = vec![(Node::root(), 0, false, 0)];
    let mut level_start = 0;
    for level in 1..levels {
        let level_end = slots.len();
        for parent in level_start..level_end {
            for d in [false, true] {
                slots.push((slots[parent].0.child(d), parent, d, level));
            }
        }
        level_start = level_end;
    }
    let mut search = PruneSearch {
        upre: u.preorder(),
        ypre: y.map(TreeSet::preorder),
        levels,
        max_height: u.max_height().unwrap_or(0) + 3,
        slots,
        chosen: Vec::new(),
        steps: 0,
    };
    if !search.admissible(&root, 0) {
        return Err(Error::InsufficientDepth(format!("root {root} does not branch")));
    }
    let floor = search.floor_after(&root);
    search.chosen.push(root);
    if !search.fill(1, floor)? {
        return Err(Error::InsufficientDepth(format!(
            "no pruned subtree with {levels} levels"
        )));
    }
    let mut out = Pruned {
        tree: TreeSet::new(),
        at_path: BTreeMap::new(),
        leaf_of: BTreeMap::new(),
    };
    for ((path, ..), z) in search.slots.iter().zip(&search.chosen) {
        if let Some(f) = search.leaf_for(z) {
            out.leaf_of.insert(z.clone(), f);
        }
        out.tree.insert(z.clone());
        out.at_path.insert(path.clone(), z.clone());
    }
    Ok(out)
}

/// Prunes a meet-closed set to a subtree isomorphic to `2^{<levels}` whose
/// heights are at least 3 apart, increase along `<_E` within a level, and
/// separate consecutive levels. Slots are filled level by level in `<_E`
/// order, each with the lowest node that still lets the remaining slots be
/// filled.
pub fn prune_perfect(u: &TreeSet, levels: usize) -> Result<TreeSet> {
    Ok(prune_inner(u, None, levels)?.tree)
}

/// As [`prune_perfect`] on `Y^∧`, additionally choosing for each `z` the
/// lowest `f(z) ∈ Y` with `z⌢0 ⊑ f(z)`, and keeping every later node of `Z`
/// above `f(z)`.
pub fn prune_with_leaves(y: &TreeSet, levels: usize) -> Result<Pruned> {
    if !y.is_antichain() {
        return Err(Error::NotAnAntichain);
    }
    let u = meet_closure(y)?;
    prune_inner(&u, Some(y), levels)
}

/// Path sets of `W₀` realizing each Devlin `n`-type, searched in the first
/// `levels` levels.
#[derive(Debug, Clone)]
pub struct W0Representatives {
    pub levels: usize,
    pub paths: BTreeMap<TypeCode, Vec<Node>>,
}

fn antichains(nodes: &[Node], n: usize, mut visit: impl FnMut(&[Node]) -> bool) {
    fn rec(
        nodes: &[Node],
        n: usize,
        start: usize,
        cur: &mut Vec<Node>,
        visit: &mut dyn FnMut(&[Node]) -> bool,
    ) -> bool {
        if cur.len() == n {
            return visit(cur);
        }
        for i in start..nodes.len() {
            if cur
                .iter()
                .any(|c| c.is_prefix_of(&nodes[i]) || nodes[i].is_prefix_of(c))
            {
                continue;
            }
            cur.push(nodes[i].clone());
            let stop = rec(nodes, n, i + 1, cur, visit);
            cur.pop();
            if stop {
                return true;
            }
        }
        false
    }
    rec(nodes, n, 0, &mut Vec::new(), &mut visit);
}

fn reps_cache() -> &'static Mutex<HashMap<usize, Arc<W0Representatives>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<W0Representatives>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Finds, for every Devlin `n`-type, an antichain of `W₀` realizing it,
/// using as few levels as possible. Cached per `n`.
pub fn w0_representatives(n: usize) -> Result<Arc<W0Representatives>> {
    if let Some(hit) = reps_cache().lock().expect("cache poisoned").get(&n) {
        return Ok(hit.clone());
    }
    let wanted: BTreeSet<TypeCode> = devlin_types(n)?.codes.iter().cloned().collect();
    let max_levels = 2 * n + 4;
    for levels in 1..=max_levels {
        let paths: Vec<Node> = (0..levels)
            .flat_map(|l| {
                (0..1usize << l)
                    .map(move |r| Node::from_bits((0..l).rev().map(move |j| r >> j & 1 == 1)))
            })
            .collect();
        let mut found: BTreeMap<TypeCode, Vec<Node>> = BTreeMap::new();
        antichains(&paths, n, |set| {
            let image: TreeSet = set.iter().map(w0_node).collect();
            if let Ok(code) = embedding_type(&image) {
                if wanted.contains(&code) {
                    found.entry(code).or_insert_with(|| set.to_vec());
                }
            }
            found.len() == wanted.len()
        });
        if found.len() == wanted.len() {
            let reps = Arc::new(W0Representatives {
                levels,
                paths: found,
            });
            reps_cache()
                .lock()
                .expect("cache poisoned")
                .insert(n, reps.clone());
            return Ok(reps);
        }
    }
    Err(Error::InsufficientDepth(format!(
        "W₀ representatives for n = {n} not found within {max_levels} levels"
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// Read off a pruned copy of `W₀` inside `Y`.
    Guided,
    /// Found by scanning `n`-subsets of `Y`.
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeWitness {
    pub code: TypeCode,
    pub witness: TreeSet,
    pub route: Route,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeSearch {
    pub n: usize,
    pub found: Vec<TypeWitness>,
    pub missing: Vec<TypeCode>,
}

/// Looks for a witness of every Devlin `n`-type inside the antichain `Y`.
///
/// A copy of `W₀` is pruned out of `Y^∧` with an injection into `Y`, and
/// representatives of each type are transported along it; any type not
/// confirmed this way is searched for among all `n`-subsets of `Y`.
pub fn find_all_types_in(y: &TreeSet, n: usize) -> Result<TypeSearch> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if !y.is_antichain() {
        return Err(Error::NotAnAntichain);
    }
    let types = devlin_types(n)?;
    let mut remaining: BTreeSet<TypeCode> = types.codes.iter().cloned().collect();
    let mut found = Vec::new();
    if y.len() >= n {
        let reps = w0_representatives(n)?;
        if let Ok(pruned) = prune_with_leaves(y, reps.levels) {
            for (code, paths) in &reps.paths {
                let witness: TreeSet = paths
                    .iter()
                    .map(|p| pruned.leaf_of[&pruned.at_path[p]].clone())
                    .collect();
                if witness.len() == n && embedding_type(&witness)? == *code {
                    remaining.remove(code);
                    found.push(TypeWitness {
                        code: code.clone(),
                        witness,
                        route: Route::Guided,
                    });
                }
            }
        }
        if !remaining.is_empty() {
            let nodes: Vec<Node> = y.iter().cloned().collect();
            antichains(&nodes, n, |set| {
                let witness: TreeSet = set.iter().cloned().collect();
                if let Ok(code) = embedding_type(&witness) {
                    if remaining.remove(&code) {
                        found.push(TypeWitness {
                            code,
                            witness,
                            route: Route::Exhaustive,
                        });
                    }
                }
                remaining.is_empty()
            });
        }
    }
    found.sort_by(|a, b| a.code.cmp(&b.code));
    Ok(TypeSearch {
        n,
        found,
        missing: remaining.into_iter().collect(),
    })
}
