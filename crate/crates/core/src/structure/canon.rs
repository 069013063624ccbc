//! Canonical codes for finite relational structures.
//!
//! The code of a structure is the lexicographically least serialization over
//! all relabelings of its universe. The serialization lists a 4-byte size
//! header followed by one byte per possible tuple, ordered so that all tuples
//! over positions `0..=j` precede any tuple mentioning position `j + 1`. Each
//! prefix of the code therefore depends only on which elements were placed in
//! the first positions, which lets the search keep only minimal prefixes.
//! Transposition automorphisms (twin elements) are collapsed before branching.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::model::{FinStructure, Signature};
use crate::error::{Error, Result};

/// Canonical isomorphism-class code of a finite structure.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct CanonicalCode(Vec<u8>);

impl CanonicalCode {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    /// Universe size encoded in the header.
    pub fn size(&self) -> usize {
        u32::from_be_bytes([self.0[0], self.0[1], self.0[2], self.0[3]]) as usize
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        let bytes = hex::decode(s.trim())
            .map_err(|e| Error::InvalidArgument(format!("bad hex code: {e}")))?;
        if bytes.len() < 4 {
            return Err(Error::InvalidArgument("code shorter than its header".into()));
        }
        Ok(CanonicalCode(bytes))
    }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl From<CanonicalCode> for String {
    fn from(c: CanonicalCode) -> String {
        c.to_hex()
    }
}

impl TryFrom<String> for CanonicalCode {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        CanonicalCode::from_hex(&s)
    }
}

/// Tuples over `0..=j` whose maximum entry is `j`, in lexicographic order.
fn block_tuples(arity: usize, j: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut t = vec![0; arity];
    loop {
        if t.contains(&j) {
            out.push(t.clone());
        }
        let mut i = arity;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if t[i] < j {
                t[i] += 1;
                for x in &mut t[i + 1..] {
                    *x = 0;
                }
                break;
            }
        }
    }
}

struct Layout {
    /// `blocks[j]` lists, per symbol, the position tuples introduced at `j`.
    blocks: Vec<Vec<Vec<Vec<usize>>>>,
}

impl Layout {
    fn new(signature: &Signature, n: usize) -> Self {
        let blocks = (0..n)
            .map(|j| {
                signature
                    .relations()
                    .iter()
                    .map(|r| block_tuples(r.arity, j))
                    .collect()
            })
            .collect();
        Layout { blocks }
    }

    /// Bytes contributed by position `j` under the placement `order`
    /// (`order[p]` is the original element at position `p`).
    fn block(&self, s: &FinStructure, order: &[usize], j: usize, out: &mut Vec<u8>) {
        let mut buf = Vec::with_capacity(4);
        for (sym, tuples) in self.blocks[j].iter().enumerate() {
            for t in tuples {
                buf.clear();
                buf.extend(t.iter().map(|&p| order[p]));
                out.push(s.holds(sym, &buf) as u8);
            }
        }
    }
}

/// Partition of the universe into classes of elements whose transposition is
/// an automorphism.
fn twin_classes(s: &FinStructure) -> Vec<usize> {
    let n = s.size();
    let mut class: Vec<usize> = (0..n).collect();
    for u in 0..n {
        if class[u] != u {
            continue;
        }
        for (v, c) in class.iter_mut().enumerate().skip(u + 1) {
            if *c == v && swap_is_automorphism(s, u, v) {
                *c = u;
            }
        }
    }
    class
}

fn swap_is_automorphism(s: &FinStructure, u: usize, v: usize) -> bool {
    let swap = |x: usize| {
        if x == u {
            v
        } else if x == v {
            u
        } else {
            x
        }
    };
    let mut buf = Vec::new();
    for (sym, rel) in s.relations().iter().enumerate() {
        for t in rel.tuples() {
            if t.iter().any(|&x| x == u || x == v) {
                buf.clear();
                buf.extend(t.iter().map(|&x| swap(x)));
                if !s.holds(sym, &buf) {
                    return false;
                }
            }
        }
    }
    true
}

/// Computes the canonical code together with one minimizing placement
/// (`order[p]` = original element placed at position `p`).
pub fn canonical_form(s: &FinStructure) -> (CanonicalCode, Vec<usize>) {
    let n = s.size();
    let layout = Layout::new(s.signature(), n);
    let class = twin_classes(s);
    let mut code = (n as u32).to_be_bytes().to_vec();
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    let mut block = Vec::new();
    for j in 0..n {
        let mut best: Option<Vec<u8>> = None;
        let mut next: Vec<Vec<usize>> = Vec::new();
        for partial in &frontier {
            let mut used = vec![false; n];
            for &x in partial {
                used[x] = true;
            }
            let mut tried_class = vec![false; n];
            for v in 0..n {
                if used[v] || std::mem::replace(&mut tried_class[class[v]], true) {
                    continue;
                }
                let mut order = partial.clone();
                order.push(v);
                block.clear();
                layout.block(s, &order, j, &mut block);
                match &best {
                    Some(b) if block > *b => {}
                    Some(b) if block == *b => next.push(order),
                    _ => {
                        best = Some(block.clone());
                        next.clear();
                        next.push(order);
                    }
                }
            }
        }
        code.extend_from_slice(best.as_deref().unwrap_or(&[]));
        frontier = next;
    }
    let order = frontier.into_iter().next().unwrap_or_default();
    (CanonicalCode(code), order)
}

pub fn canonical_code(s: &FinStructure) -> CanonicalCode {
    canonical_form(s).0
}

/// Isomorphism test via canonical codes; false across signatures.
pub fn are_isomorphic(a: &FinStructure, b: &FinStructure) -> bool {
    a.same_signature(b) && a.size() == b.size() && canonical_code(a) == canonical_code(b)
}

/// Rebuilds the canonical representative encoded by `code`.
pub fn structure_from_code(
    signature: impl Into<Arc<Signature>>,
    code: &CanonicalCode,
) -> Result<FinStructure> {
    let signature = signature.into();
    let n = code.size();
    if n == 0 {
        return Err(Error::InvalidArgument("code encodes an empty universe".into()));
    }
    let layout = Layout::new(&signature, n);
    let body = &code.as_bytes()[4..];
    let expected: usize = layout
        .blocks
        .iter()
        .flat_map(|b| b.iter().map(|t| t.len()))
        .sum();
    if body.len() != expected {
        return Err(Error::InvalidArgument(format!(
            "code body has {} bytes, signature requires {expected}",
            body.len()
        )));
    }
    let mut interps = vec![Vec::new(); signature.len()];
    let mut pos = 0;
    for blocks in &layout.blocks {
        for (sym, tuples) in blocks.iter().enumerate() {
            for t in tuples {
                match body[pos] {
                    0 => {}
                    1 => interps[sym].push(t.clone()),
                    b => {
                        return Err(Error::InvalidArgument(format!("invalid code byte {b}")));
                    }
                }
                pos += 1;
            }
        }
    }
    FinStructure::new(signature, n, interps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn digraph(n: usize, arcs: &[(usize, usize)]) -> FinStructure {
        let sig = Signature::new([("R", 2)]).unwrap();
        FinStructure::new(sig, n, vec![arcs.iter().map(|&(a, b)| vec![a, b]).collect()]).unwrap()
    }

    #[test]
    fn block_tuples_are_prefix_ordered() {
        assert_eq!(block_tuples(2, 0), vec![vec![0, 0]]);
        assert_eq!(
            block_tuples(2, 1),
            vec![vec![0, 1], vec![1, 0], vec![1, 1]]
        );
        assert_eq!(block_tuples(1, 3), vec![vec![3]]);
    }

    #[test]
    fn relabelled_three_cycles_are_isomorphic() {
        let a = digraph(3, &[(0, 1), (1, 2), (2, 0)]);
        let b = digraph(3, &[(1, 0), (0, 2), (2, 1)]);
        assert!(are_isomorphic(&a, &b));
        let path = digraph(3, &[(0, 1), (1, 2)]);
        assert!(!are_isomorphic(&a, &path));
    }

    #[test]
    fn chain_and_antichain_differ() {
        let chain = FinStructure::chain(2);
        let anti = FinStructure::empty(Signature::order(), 2).unwrap();
        assert!(!are_isomorphic(&chain, &anti));
    }

    #[test]
    fn point_code_is_fixed() {
        let p = FinStructure::empty(Signature::graph(), 1).unwrap();
        assert_eq!(canonical_code(&p).to_hex(), "0000000100");
        let q = FinStructure::empty(Signature::new(Vec::<(String, usize)>::new()).unwrap(), 1)
            .unwrap();
        assert_eq!(canonical_code(&q).to_hex(), "00000001");
    }

    #[test]
    fn decode_round_trips() {
        let s = digraph(4, &[(0, 1), (1, 2), (3, 3), (2, 0)]);
        let code = canonical_code(&s);
        let back = structure_from_code(s.signature().clone(), &code).unwrap();
        assert!(are_isomorphic(&s, &back));
        assert_eq!(canonical_code(&back), code);
    }

    #[test]
    fn twin_pruning_handles_large_empty_structure() {
        let s = FinStructure::empty(Signature::graph(), 10).unwrap();
        let c = canonical_code(&s);
        assert_eq!(c.size(), 10);
        assert!(c.as_bytes()[4..].iter().all(|&b| b == 0));
    }
}
