use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::node::{common_prefix_len, meet, preorder_cmp, Node};
use crate::error::{Error, Result};

/// A finite set of tree nodes, iterated by height then lexicographically.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TreeSet(BTreeSet<Node>);

impl TreeSet {
    pub fn new() -> Self {
        TreeSet::default()
    }

    pub fn insert(&mut self, n: Node) -> bool {
        self.0.insert(n)
    }

    pub fn contains(&self, n: &Node) -> bool {
        self.0.contains(n)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Node> + '_ {
        self.0.iter()
    }

    pub fn nodes(&self) -> &BTreeSet<Node> {
        &self.0
    }

    /// Nodes in depth-first order.
    pub fn preorder(&self) -> Vec<Node> {
        let mut v: Vec<Node> = self.0.iter().cloned().collect();
        v.sort_by(preorder_cmp);
        v
    }

    /// Pairwise `⊑`-incomparable.
    pub fn is_antichain(&self) -> bool {
        let pre = self.preorder();
        pre.windows(2).all(|w| !w[0].is_prefix_of(&w[1]))
    }

    pub fn is_meet_closed(&self) -> bool {
        let pre = self.preorder();
        pre.windows(2).all(|w| self.contains(&meet(&w[0], &w[1])))
    }

    /// The `⊑`-least element, when there is one.
    pub fn root(&self) -> Option<&Node> {
        let first = self.0.iter().next()?;
        self.0.iter().all(|n| first.is_prefix_of(n)).then_some(first)
    }

    /// Maximum node height, `None` when empty.
    pub fn max_height(&self) -> Option<usize> {
        self.0.iter().next_back().map(Node::len)
    }
}

impl FromIterator<Node> for TreeSet {
    fn from_iter<I: IntoIterator<Item = Node>>(iter: I) -> Self {
        TreeSet(iter.into_iter().collect())
    }
}

impl Extend<Node> for TreeSet {
    fn extend<I: IntoIterator<Item = Node>>(&mut self, iter: I) {
        self.0.extend(iter)
    }
}

impl IntoIterator for TreeSet {
    type Item = Node;
    type IntoIter = std::collections::btree_set::IntoIter<Node>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a TreeSet {
    type Item = &'a Node;
    type IntoIter = std::collections::btree_set::Iter<'a, Node>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for TreeSet {
    /// One node per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for n in &self.0 {
            writeln!(f, "{n}")?;
        }
        Ok(())
    }
}

/// `A^∧ = {s ∧ t : s, t ∈ A}`. Meets of depth-first neighbours suffice.
pub fn meet_closure<'a>(a: impl IntoIterator<Item = &'a Node>) -> Result<TreeSet> {
    let mut pre: Vec<Node> = a.into_iter().cloned().collect();
    if pre.is_empty() {
        return Err(Error::EmptyTreeSet);
    }
    pre.sort_by(preorder_cmp);
    pre.dedup();
    let mut out: TreeSet = pre.iter().cloned().collect();
    for w in pre.windows(2) {
        out.insert(w[0].truncate(common_prefix_len(&w[0], &w[1])));
    }
    Ok(out)
}

/// `X = {w⌢01 : w ∈ W}`.
pub fn antichain_x(w: &TreeSet) -> TreeSet {
    w.iter().map(|n| n.extend([false, true])).collect()
}

/// The nodes extending `prefix` in a slice sorted depth-first.
pub(crate) fn extensions<'a>(pre: &'a [Node], prefix: &Node) -> &'a [Node] {
    let lo = pre.partition_point(|x| preorder_cmp(x, prefix) == std::cmp::Ordering::Less);
    let len = pre[lo..]
        .iter()
        .take_while(|x| prefix.is_prefix_of(x))
        .count();
    &pre[lo..lo + len]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(items: &[&str]) -> TreeSet {
        items.iter().map(|s| s.parse().unwrap()).collect()
    }

    #[test]
    fn closure_examples() {
        let c = meet_closure(&set(&["00", "01", "1"])).unwrap();
        assert_eq!(c, set(&["e", "0", "00", "01", "1"]));
        assert_eq!(c.len(), 5);
        assert_eq!(meet_closure(&set(&["0110"])).unwrap(), set(&["0110"]));
        assert_eq!(meet_closure(&set(&["0", "00"])).unwrap(), set(&["0", "00"]));
        assert_eq!(meet_closure(&TreeSet::new()), Err(Error::EmptyTreeSet));
    }

    #[test]
    fn closure_matches_pairwise_definition() {
        let a = set(&["0010", "0111", "1", "110", "0", "01101"]);
        let mut brute = TreeSet::new();
        for s in &a {
            for t in &a {
                brute.insert(meet(s, t));
            }
        }
        assert_eq!(meet_closure(&a).unwrap(), brute);
    }

    #[test]
    fn antichain_image() {
        assert_eq!(antichain_x(&set(&["e"])), set(&["01"]));
        let w = set(&["e", "000", "100000"]);
        let x = antichain_x(&w);
        assert_eq!(x.len(), w.len());
        assert!(x.is_antichain());
        assert!(!w.is_antichain());
    }

    #[test]
    fn root_and_extensions() {
        let s = set(&["0", "00", "01", "011"]);
        assert_eq!(s.root().unwrap().to_string(), "0");
        assert!(set(&["0", "1"]).root().is_none());
        let pre = s.preorder();
        let ext: Vec<String> = extensions(&pre, &"01".parse().unwrap())
            .iter()
            .map(|n| n.to_string())
            .collect();
        assert_eq!(ext, ["01", "011"]);
    }
}
