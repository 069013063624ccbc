use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::node::Node;
use super::set::TreeSet;
use super::types::{embedding_type, is_devlin, TypeCode};
use crate::error::{Error, Result};

/// The `m`-th tangent number (`m` odd), read off the Seidel–Entringer
/// boustrophedon triangle.
pub fn tangent(m: u32) -> Result<u128> {
    if m.is_multiple_of(2) {
        return Err(Error::EvenTangentIndex(m));
    }
    let overflow = || Error::Overflow(format!("tangent({m})"));
    let mut row: Vec<u128> = vec![1];
    for k in 1..=m as usize {
        let mut next = vec![0u128; k + 1];
        for j in 1..=k {
            next[j] = next[j - 1]
                .checked_add(row[k - j])
                .ok_or_else(overflow)?;
        }
        row = next;
    }
    Ok(row[m as usize])
}

/// An increasing full binary tree on nodes `0..N`: node `i` hangs below
/// `parent[i]` on side `side[i]`, and labels grow downwards.
#[derive(Debug, Clone)]
struct MeetShape {
    parent: Vec<usize>,
    side: Vec<bool>,
}

impl MeetShape {
    /// Concrete representative: node `i` sits at height `i`, extends its
    /// parent by its side bit and is padded with zeros.
    fn realize(&self) -> TreeSet {
        let total = self.parent.len();
        let mut strings: Vec<Node> = Vec::with_capacity(total);
        strings.push(Node::root());
        for i in 1..total {
            let s = strings[self.parent[i]].child(self.side[i]).pad_zeros(i);
            strings.push(s);
        }
        let mut has_child = vec![false; total];
        for i in 1..total {
            has_child[self.parent[i]] = true;
        }
        (0..total)
            .filter(|&i| !has_child[i])
            .map(|i| strings[i].clone())
            .collect()
    }
}

fn meet_shapes(n: usize) -> Vec<MeetShape> {
    let total = 2 * n - 1;
    let mut out = Vec::new();
    let mut children = vec![[false; 2]; total];
    let mut shape = MeetShape {
        parent: vec![0],
        side: vec![false],
    };
    fn rec(
        total: usize,
        children: &mut Vec<[bool; 2]>,
        shape: &mut MeetShape,
        out: &mut Vec<MeetShape>,
    ) {
        let i = shape.parent.len();
        let half = children.iter().filter(|c| c[0] != c[1]).count();
        if half > total - i {
            return;
        }
        if i == total {
            out.push(shape.clone());
            return;
        }
        for p in 0..i {
            for d in [false, true] {
                if children[p][d as usize] {
                    continue;
                }
                children[p][d as usize] = true;
                shape.parent.push(p);
                shape.side.push(d);
                rec(total, children, shape, out);
                shape.parent.pop();
                shape.side.pop();
                children[p][d as usize] = false;
            }
        }
    }
    rec(total, &mut children, &mut shape, &mut out);
    out
}

/// Codes of all Devlin types of `n`-sets realizable in `2^{≤depth}`, sorted.
///
/// A Devlin `n`-set has `2n − 1` distinct heights in its meet closure, so
/// nothing is found below depth `2n − 2`; from there on every type appears.
pub fn enumerate_devlin_types(n: usize, depth: usize) -> Result<Vec<TypeCode>> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if depth + 2 < 2 * n {
        return Ok(Vec::new());
    }
    let codes: BTreeSet<TypeCode> = meet_shapes(n)
        .par_iter()
        .map(|shape| {
            let a = shape.realize();
            debug_assert!(is_devlin(&a).unwrap_or(false));
            embedding_type(&a)
        })
        .collect::<Result<_>>()?;
    Ok(codes.into_iter().collect())
}

/// Result of [`devlin_types`]: the sorted codes and the depth at which the
/// count stabilized.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DevlinTypes {
    pub n: usize,
    pub depth: usize,
    pub codes: Vec<TypeCode>,
}

fn cache() -> &'static Mutex<HashMap<usize, Arc<DevlinTypes>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<DevlinTypes>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// All Devlin types of `n`-sets, enumerated from depth `2(2n − 1)` upwards
/// until the count agrees at two successive depths. Cached per `n`.
pub fn devlin_types(n: usize) -> Result<Arc<DevlinTypes>> {
    if let Some(hit) = cache().lock().expect("cache poisoned").get(&n) {
        return Ok(hit.clone());
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let mut depth = 2 * (2 * n - 1);
    let mut codes = enumerate_devlin_types(n, depth)?;
    loop {
        let next = enumerate_devlin_types(n, depth + 1)?;
        if next.len() == codes.len() {
            break;
        }
        codes = next;
        depth += 1;
    }
    let found = Arc::new(DevlinTypes { n, depth, codes });
    cache()
        .lock()
        .expect("cache poisoned")
        .insert(n, found.clone());
    Ok(found)
}

/// Color of a set under the Devlin-type coloring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DevlinColor {
    /// Index of the type in the sorted code list.
    Type(usize),
    /// The set realizes no Devlin type.
    Sentinel,
}

impl DevlinColor {
    /// Total-coloring view: the sentinel is folded into color 0.
    pub fn as_color(self) -> usize {
        match self {
            DevlinColor::Type(i) => i,
            DevlinColor::Sentinel => 0,
        }
    }
}

pub fn devlin_color(a: &TreeSet, n: usize) -> Result<DevlinColor> {
    if a.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: a.len(),
        });
    }
    if !is_devlin(a)? {
        return Ok(DevlinColor::Sentinel);
    }
    let code = embedding_type(a)?;
    let types = devlin_types(n)?;
    Ok(types
        .codes
        .binary_search(&code)
        .map(DevlinColor::Type)
        .unwrap_or(DevlinColor::Sentinel))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(items: &[&str]) -> TreeSet {
        items.iter().map(|s| s.parse().unwrap()).collect()
    }

    #[test]
    fn tangent_numbers() {
        let got: Vec<u128> = [1, 3, 5, 7, 9, 11].iter().map(|&m| tangent(m).unwrap()).collect();
        assert_eq!(got, [1, 2, 16, 272, 7936, 353792]);
        assert_eq!(tangent(4), Err(Error::EvenTangentIndex(4)));
        assert!(tangent(101).is_err());
    }

    #[test]
    fn small_counts() {
        assert_eq!(enumerate_devlin_types(1, 2).unwrap().len(), 1);
        assert_eq!(enumerate_devlin_types(2, 2).unwrap().len(), 2);
        assert_eq!(enumerate_devlin_types(3, 6).unwrap().len(), 16);
        assert!(enumerate_devlin_types(3, 3).unwrap().is_empty());
        assert_eq!(devlin_types(2).unwrap().codes.len(), 2);
    }

    #[test]
    fn colors() {
        assert_eq!(devlin_color(&set(&["0110"]), 1).unwrap(), DevlinColor::Type(0));
        let a = devlin_color(&set(&["0", "10"]), 2).unwrap();
        let b = devlin_color(&set(&["00", "1"]), 2).unwrap();
        assert_ne!(a, b);
        assert!(matches!(a, DevlinColor::Type(_)) && matches!(b, DevlinColor::Type(_)));
        assert_eq!(devlin_color(&set(&["0", "00"]), 2).unwrap(), DevlinColor::Sentinel);
        assert_eq!(devlin_color(&set(&["1", "01"]), 2).unwrap(), DevlinColor::Sentinel);
        assert_eq!(DevlinColor::Sentinel.as_color(), 0);
        assert!(devlin_color(&set(&["0"]), 2).is_err());
    }
}
