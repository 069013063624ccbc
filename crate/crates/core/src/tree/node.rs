use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A node of the binary tree `2^{<ω}`: a finite 0/1 sequence, packed
/// most-significant bit first into 64-bit words.
///
/// Nodes are ordered by height first, then lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Node {
    len: usize,
    words: Vec<u64>,
}

impl Node {
    /// The empty sequence `⟨⟩`.
    pub fn root() -> Self {
        Node {
            len: 0,
            words: Vec::new(),
        }
    }

    pub fn from_bits(bits: impl IntoIterator<Item = bool>) -> Self {
        let mut n = Node::root();
        for b in bits {
            n.push(b);
        }
        n
    }

    /// Height `|s|`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_root(&self) -> bool {
        self.len == 0
    }

    pub fn is_empty(&self) -> bool {
        self.is_root()
    }

    /// Bit `s(i)`; panics when `i ≥ |s|`.
    pub fn bit(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range for node of height {}", self.len);
        self.words[i / 64] >> (63 - i % 64) & 1 == 1
    }

    pub fn push(&mut self, b: bool) {
        if self.len.is_multiple_of(64) {
            self.words.push(0);
        }
        if b {
            self.words[self.len / 64] |= 1 << (63 - self.len % 64);
        }
        self.len += 1;
    }

    /// `s⌢b`.
    pub fn child(&self, b: bool) -> Node {
        let mut n = self.clone();
        n.push(b);
        n
    }

    /// `s⌢bits`.
    pub fn extend(&self, bits: impl IntoIterator<Item = bool>) -> Node {
        let mut n = self.clone();
        for b in bits {
            n.push(b);
        }
        n
    }

    /// `s⌢0…0` of total height `height` (no-op if already that tall).
    pub fn pad_zeros(&self, height: usize) -> Node {
        let mut n = self.clone();
        while n.len < height {
            n.push(false);
        }
        n
    }

    /// The initial segment `s ↾ len`.
    pub fn truncate(&self, len: usize) -> Node {
        let len = len.min(self.len);
        let mut words = self.words[..len.div_ceil(64)].to_vec();
        if !len.is_multiple_of(64) {
            let last = words.len() - 1;
            words[last] &= !(u64::MAX >> (len % 64));
        }
        Node { len, words }
    }

    /// `s ⊑ t`.
    pub fn is_prefix_of(&self, other: &Node) -> bool {
        self.len <= other.len && common_prefix_len(self, other) == self.len
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.bit(i))
    }
}

/// Length of the longest common initial segment.
pub fn common_prefix_len(s: &Node, t: &Node) -> usize {
    let max = s.len.min(t.len);
    for (i, (a, b)) in s.words.iter().zip(&t.words).enumerate() {
        let x = a ^ b;
        if x != 0 {
            return (i * 64 + x.leading_zeros() as usize).min(max);
        }
    }
    max
}

/// `s ∧ t`, the longest common initial segment.
pub fn meet(s: &Node, t: &Node) -> Node {
    s.truncate(common_prefix_len(s, t))
}

/// `s <_lex t` for `⊑`-incomparable nodes.
pub fn lex_less(s: &Node, t: &Node) -> Result<bool> {
    let m = common_prefix_len(s, t);
    if m == s.len || m == t.len {
        return Err(Error::ComparableNodes);
    }
    Ok(!s.bit(m))
}

/// Strict `s <_E t`: a node sits between its 0-side and its 1-side.
pub fn e_less(s: &Node, t: &Node) -> bool {
    let m = common_prefix_len(s, t);
    match (m == s.len, m == t.len) {
        (true, true) => false,
        (true, false) => t.bit(m),
        (false, true) => !s.bit(m),
        (false, false) => !s.bit(m),
    }
}

/// `<_E` as an [`Ordering`].
pub fn e_cmp(s: &Node, t: &Node) -> Ordering {
    if s == t {
        Ordering::Equal
    } else if e_less(s, t) {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

/// Depth-first (preorder) order: a node precedes its extensions, and the
/// 0-side precedes the 1-side. Extensions of a node form an interval.
pub fn preorder_cmp(s: &Node, t: &Node) -> Ordering {
    let m = common_prefix_len(s, t);
    match (m == s.len, m == t.len) {
        (true, true) => Ordering::Equal,
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        (false, false) => {
            if s.bit(m) {
                Ordering::Greater
            } else {
                Ordering::Less
            }
        }
    }
}

impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len
            .cmp(&other.len)
            .then_with(|| self.words.cmp(&other.words))
    }
}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len == 0 {
            return f.write_str("e");
        }
        for b in self.bits() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Node({self})")
    }
}

impl FromStr for Node {
    type Err = Error;

    /// `e` is the root; otherwise a string over `{0,1}`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "e" {
            return Ok(Node::root());
        }
        if s.is_empty() {
            return Err(Error::InvalidArgument("empty node; write `e` for the root".into()));
        }
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidArgument(format!("bad node character {other:?}"))),
            })
            .collect::<Result<Vec<bool>>>()
            .map(Node::from_bits)
    }
}

impl From<Node> for String {
    fn from(n: Node) -> String {
        n.to_string()
    }
}

impl TryFrom<String> for Node {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(s: &str) -> Node {
        s.parse().unwrap()
    }

    #[test]
    fn meets() {
        assert_eq!(meet(&n("010"), &n("011")), n("01"));
        assert_eq!(meet(&n("0110"), &n("0110")), n("0110"));
        assert_eq!(meet(&n("0011"), &n("1")), Node::root());
        let long_a = Node::from_bits((0..130).map(|i| i % 3 == 0));
        let mut long_b = long_a.truncate(100);
        long_b.push(!long_a.bit(100));
        assert_eq!(meet(&long_a, &long_b), long_a.truncate(100));
    }

    #[test]
    fn lex_examples() {
        assert!(lex_less(&n("00"), &n("01")).unwrap());
        assert!(!lex_less(&n("10"), &n("01")).unwrap());
        assert!(lex_less(&n("011"), &n("10")).unwrap());
        assert_eq!(lex_less(&n("0"), &n("01")), Err(Error::ComparableNodes));
    }

    #[test]
    fn e_examples() {
        assert!(e_less(&n("0"), &Node::root()));
        assert!(e_less(&Node::root(), &n("1")));
        assert!(e_less(&n("01"), &n("10")));
        assert!(!e_less(&n("01"), &n("01")));
    }

    #[test]
    fn parse_and_print() {
        assert_eq!(Node::root().to_string(), "e");
        assert_eq!(n("0110").to_string(), "0110");
        assert!("012".parse::<Node>().is_err());
        assert!("".parse::<Node>().is_err());
    }

    #[test]
    fn truncate_clears_tail() {
        let a = n("1111");
        assert_eq!(a.truncate(2), n("11"));
        assert_eq!(a.truncate(0), Node::root());
        assert!(n("11").is_prefix_of(&a));
        assert!(!n("10").is_prefix_of(&a));
    }

    #[test]
    fn order_is_height_then_lex() {
        let mut v = [n("1"), n("00"), Node::root(), n("0"), n("01")];
        v.sort();
        let s: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        assert_eq!(s, ["e", "0", "1", "00", "01"]);
    }
}
