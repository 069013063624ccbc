use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A relation symbol with its arity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelationSymbol {
    pub name: String,
    pub arity: usize,
}

/// A finite relational signature. Symbol order is significant: it fixes the
/// order of interpretations, serializations and canonical codes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Signature {
    relations: Vec<RelationSymbol>,
}

fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Signature {
    pub fn new<S: Into<String>>(relations: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let relations: Vec<RelationSymbol> = relations
            .into_iter()
            .map(|(name, arity)| RelationSymbol {
                name: name.into(),
                arity,
            })
            .collect();
        for (i, r) in relations.iter().enumerate() {
            if !is_identifier(&r.name) {
                return Err(Error::InvalidSignature(format!(
                    "symbol name {:?} is not an identifier",
                    r.name
                )));
            }
            if r.arity == 0 {
                return Err(Error::InvalidSignature(format!("symbol {} has arity 0", r.name)));
            }
            if relations[..i].iter().any(|o| o.name == r.name) {
                return Err(Error::InvalidSignature(format!("duplicate symbol {}", r.name)));
            }
        }
        Ok(Signature { relations })
    }

    /// The signature `{lt/2}` of linear orders.
    pub fn order() -> Self {
        Signature::new([("lt", 2)]).expect("valid signature")
    }

    /// The signature `{E/2}` of (symmetric, irreflexive) graphs.
    pub fn graph() -> Self {
        Signature::new([("E", 2)]).expect("valid signature")
    }

    pub fn relations(&self) -> &[RelationSymbol] {
        &self.relations
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|r| r.name == name)
    }

    pub fn arity(&self, symbol: usize) -> usize {
        self.relations[symbol].arity
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.relations.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}/{}", r.name, r.arity)?;
        }
        Ok(())
    }
}

/// Interpretation of one relation symbol: a sorted, duplicate-free tuple set,
/// with a dense bitset for arity at most two.
#[derive(Debug, Clone)]
pub struct Relation {
    arity: usize,
    size: usize,
    tuples: Vec<Vec<usize>>,
    dense: Option<Vec<u64>>,
}

impl PartialEq for Relation {
    fn eq(&self, other: &Self) -> bool {
        self.arity == other.arity && self.size == other.size && self.tuples == other.tuples
    }
}

impl Eq for Relation {}

impl Relation {
    fn new(arity: usize, size: usize, mut tuples: Vec<Vec<usize>>) -> Self {
        tuples.sort_unstable();
        tuples.dedup();
        let dense = (arity <= 2).then(|| {
            let cells = size.pow(arity as u32);
            let mut bits = vec![0u64; cells.div_ceil(64).max(1)];
            for t in &tuples {
                let idx = dense_index(size, t);
                bits[idx / 64] |= 1 << (idx % 64);
            }
            bits
        });
        Relation {
            arity,
            size,
            tuples,
            dense,
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn tuples(&self) -> &[Vec<usize>] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    #[inline]
    pub fn contains(&self, tuple: &[usize]) -> bool {
        debug_assert_eq!(tuple.len(), self.arity);
        match &self.dense {
            Some(bits) => {
                if tuple.iter().any(|&x| x >= self.size) {
                    return false;
                }
                let idx = dense_index(self.size, tuple);
                bits[idx / 64] >> (idx % 64) & 1 == 1
            }
            None => self
                .tuples
                .binary_search_by(|t| t.as_slice().cmp(tuple))
                .is_ok(),
        }
    }
}

#[inline]
fn dense_index(size: usize, tuple: &[usize]) -> usize {
    tuple.iter().fold(0, |acc, &x| acc * size + x)
}

/// A finite relational structure on the universe `0..size`, which carries the
/// natural integer order as its ambient linear order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinStructure {
    signature: Arc<Signature>,
    size: usize,
    relations: Vec<Relation>,
}

impl FinStructure {
    /// Builds a structure, one tuple list per relation symbol in signature
    /// order. Duplicate tuples are collapsed.
    pub fn new(
        signature: impl Into<Arc<Signature>>,
        size: usize,
        interpretations: Vec<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        let signature = signature.into();
        if size == 0 {
            return Err(Error::InvalidStructure("universe must be nonempty".into()));
        }
        if interpretations.len() != signature.len() {
            return Err(Error::InvalidStructure(format!(
                "expected {} interpretations, got {}",
                signature.len(),
                interpretations.len()
            )));
        }
        let mut relations = Vec::with_capacity(signature.len());
        for (sym, tuples) in signature.relations().iter().zip(interpretations) {
            for t in &tuples {
                if t.len() != sym.arity {
                    return Err(Error::InvalidStructure(format!(
                        "tuple {:?} has length {} but {} has arity {}",
                        t,
                        t.len(),
                        sym.name,
                        sym.arity
                    )));
                }
                if let Some(&bad) = t.iter().find(|&&x| x >= size) {
                    return Err(Error::IndexOutOfRange { index: bad, size });
                }
            }
            relations.push(Relation::new(sym.arity, size, tuples));
        }
        Ok(FinStructure {
            signature,
            size,
            relations,
        })
    }

    /// Structure with every relation empty.
    pub fn empty(signature: impl Into<Arc<Signature>>, size: usize) -> Result<Self> {
        let signature = signature.into();
        let n = signature.len();
        FinStructure::new(signature, size, vec![Vec::new(); n])
    }

    /// The `n`-element chain `0 < 1 < ... < n-1` in the order signature.
    pub fn chain(n: usize) -> Self {
        let mut lt = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                lt.push(vec![i, j]);
            }
        }
        FinStructure::new(Signature::order(), n, vec![lt]).expect("chain is well formed")
    }

    /// Undirected simple graph; each edge is stored in both directions.
    pub fn graph(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut e = Vec::with_capacity(edges.len() * 2);
        for &(a, b) in edges {
            if a == b {
                return Err(Error::InvalidStructure(format!("loop at vertex {a}")));
            }
            e.push(vec![a, b]);
            e.push(vec![b, a]);
        }
        FinStructure::new(Signature::graph(), n, vec![e])
    }

    /// Complete graph on `n` vertices.
    pub fn clique(n: usize) -> Self {
        let edges: Vec<_> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        FinStructure::graph(n, &edges).expect("clique is well formed")
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub(crate) fn signature_arc(&self) -> &Arc<Signature> {
        &self.signature
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn relation(&self, symbol: usize) -> &Relation {
        &self.relations[symbol]
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    #[inline]
    pub fn holds(&self, symbol: usize, tuple: &[usize]) -> bool {
        self.relations[symbol].contains(tuple)
    }

    pub fn same_signature(&self, other: &FinStructure) -> bool {
        Arc::ptr_eq(&self.signature, &other.signature) || self.signature == other.signature
    }

    /// Relabels the universe: element `i` of `self` becomes `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<FinStructure> {
        if perm.len() != self.size {
            return Err(Error::LengthMismatch {
                expected: self.size,
                got: perm.len(),
            });
        }
        let mut seen = vec![false; self.size];
        for &p in perm {
            if p >= self.size || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidArgument("relabeling is not a permutation".into()));
            }
        }
        let interps = self
            .relations
            .iter()
            .map(|r| {
                r.tuples()
                    .iter()
                    .map(|t| t.iter().map(|&x| perm[x]).collect())
                    .collect()
            })
            .collect();
        FinStructure::new(self.signature.clone(), self.size, interps)
    }
}

/// A copy of some pattern inside an ambient structure, identified with the
/// strictly increasing list of its universe indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct SubsetCopy(Vec<usize>);

impl SubsetCopy {
    pub fn new(elements: Vec<usize>, ambient_size: usize) -> Result<Self> {
        if let Some(&bad) = elements.iter().find(|&&x| x >= ambient_size) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                size: ambient_size,
            });
        }
        if elements.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(format!(
                "copy elements {elements:?} are not strictly increasing"
            )));
        }
        Ok(SubsetCopy(elements))
    }

    /// Sorts and deduplicates arbitrary indices into a copy.
    pub fn from_unsorted(mut elements: Vec<usize>) -> Self {
        elements.sort_unstable();
        elements.dedup();
        SubsetCopy(elements)
    }

    pub(crate) fn from_sorted_unchecked(elements: Vec<usize>) -> Self {
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        SubsetCopy(elements)
    }

    pub fn elements(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True if every element of `self` lies in `other`.
    pub fn is_subset_of(&self, other: &SubsetCopy) -> bool {
        let mut it = other.0.iter();
        self.0.iter().all(|x| it.any(|y| y == x))
    }
}

impl fmt::Display for SubsetCopy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

/// A map from the universe of a source structure into a target universe,
/// `image[i]` being the image of source element `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EmbeddingMap {
    pub image: Vec<usize>,
}

impl EmbeddingMap {
    pub fn new(image: Vec<usize>) -> Self {
        EmbeddingMap { image }
    }

    pub fn image_copy(&self) -> SubsetCopy {
        SubsetCopy::from_unsorted(self.image.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signature_rejects_duplicates_and_zero_arity() {
        assert!(Signature::new([("R", 2), ("R", 1)]).is_err());
        assert!(Signature::new([("R", 0)]).is_err());
        assert!(Signature::new([("1R", 2)]).is_err());
        assert!(Signature::new(Vec::<(String, usize)>::new()).is_ok());
    }

    #[test]
    fn structure_validates_tuples() {
        let sig = Signature::new([("R", 2)]).unwrap();
        assert_eq!(
            FinStructure::new(sig.clone(), 2, vec![vec![vec![0, 2]]]),
            Err(Error::IndexOutOfRange { index: 2, size: 2 })
        );
        assert!(FinStructure::new(sig.clone(), 2, vec![vec![vec![0]]]).is_err());
        assert!(FinStructure::new(sig, 0, vec![vec![]]).is_err());
    }

    #[test]
    fn dense_and_sparse_lookup_agree() {
        let sig = Signature::new([("T", 3), ("E", 2)]).unwrap();
        let s = FinStructure::new(
            sig,
            4,
            vec![vec![vec![0, 1, 2], vec![3, 3, 0]], vec![vec![1, 0]]],
        )
        .unwrap();
        assert!(s.holds(0, &[3, 3, 0]));
        assert!(!s.holds(0, &[0, 1, 3]));
        assert!(s.holds(1, &[1, 0]));
        assert!(!s.holds(1, &[0, 1]));
    }

    #[test]
    fn copy_validation() {
        assert!(SubsetCopy::new(vec![0, 2], 3).is_ok());
        assert!(SubsetCopy::new(vec![2, 0], 3).is_err());
        assert!(SubsetCopy::new(vec![0, 3], 3).is_err());
        let a = SubsetCopy::new(vec![1, 3], 5).unwrap();
        let b = SubsetCopy::new(vec![0, 1, 2, 3], 5).unwrap();
        assert!(a.is_subset_of(&b));
        assert!(!b.is_subset_of(&a));
    }
}
