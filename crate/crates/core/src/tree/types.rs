use std::fmt;

use serde::{Deserialize, Serialize};

use super::node::Node;
use super::set::{meet_closure, TreeSet};
use crate::error::{Error, Result};

/// Canonical encoding of an embedding type.
///
/// The nodes of `A^∧` are listed by height, then lexicographically. Each
/// node contributes its dense height rank, whether it belongs to `A`, the
/// index of its parent in `A^∧`, the direction taken from that parent, and
/// its bits at every lower height occurring in `A^∧`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct TypeCode(Vec<u8>);

impl TypeCode {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        hex::decode(s.trim())
            .map(TypeCode)
            .map_err(|e| Error::InvalidArgument(format!("bad hex type code: {e}")))
    }

    /// Number of nodes in the encoded set.
    pub fn set_size(&self) -> usize {
        u32::from_be_bytes([self.0[0], self.0[1], self.0[2], self.0[3]]) as usize
    }
}

impl fmt::Display for TypeCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl From<TypeCode> for String {
    fn from(c: TypeCode) -> String {
        c.to_hex()
    }
}

impl TryFrom<String> for TypeCode {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        TypeCode::from_hex(&s)
    }
}

const NO_PARENT: u32 = u32::MAX;

/// The embedding type of a nonempty finite set.
pub fn embedding_type(a: &TreeSet) -> Result<TypeCode> {
    let closure = meet_closure(a)?;
    let nodes: Vec<&Node> = closure.iter().collect();
    let mut heights: Vec<usize> = nodes.iter().map(|n| n.len()).collect();
    heights.dedup();
    let rank = |h: usize| heights.binary_search(&h).expect("height present") as u32;

    let mut out = Vec::new();
    out.extend_from_slice(&(a.len() as u32).to_be_bytes());
    out.extend_from_slice(&(nodes.len() as u32).to_be_bytes());
    for (i, t) in nodes.iter().enumerate() {
        let r = rank(t.len());
        out.extend_from_slice(&r.to_be_bytes());
        out.push(a.contains(t) as u8);
        let parent = (0..i)
            .rev()
            .find(|&j| nodes[j].len() < t.len() && nodes[j].is_prefix_of(t));
        match parent {
            Some(p) => {
                out.extend_from_slice(&(p as u32).to_be_bytes());
                out.push(t.bit(nodes[p].len()) as u8);
            }
            None => {
                out.extend_from_slice(&NO_PARENT.to_be_bytes());
                out.push(0);
            }
        }
        for &h in &heights[..r as usize] {
            out.push(t.bit(h) as u8);
        }
    }
    Ok(TypeCode(out))
}

/// Whether `A` and `B` have the same embedding type.
pub fn same_embedding_type(a: &TreeSet, b: &TreeSet) -> Result<bool> {
    Ok(embedding_type(a)? == embedding_type(b)?)
}

/// Whether `A` realizes a Devlin embedding type: `A` is the set of terminal
/// nodes of `A^∧`, heights in `A^∧` are distinct, and every node passes to
/// the left at each lower height of `A^∧` that is not one of its ancestors.
pub fn is_devlin(a: &TreeSet) -> Result<bool> {
    let closure = meet_closure(a)?;
    let nodes: Vec<&Node> = closure.iter().collect();
    let terminal = nodes
        .iter()
        .filter(|s| !nodes.iter().any(|t| t.len() > s.len() && s.is_prefix_of(t)));
    if !terminal.clone().all(|s| a.contains(s)) || terminal.count() != a.len() {
        return Ok(false);
    }
    if nodes.windows(2).any(|w| w[0].len() == w[1].len()) {
        return Ok(false);
    }
    for (i, t) in nodes.iter().enumerate() {
        for s in &nodes[..i] {
            if !s.is_prefix_of(t) && t.bit(s.len()) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
