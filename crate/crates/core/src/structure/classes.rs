//! Enumerators for classes of finite structures, joint-embedding witnesses and
//! cofinal chains through an age.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use super::canon::{canonical_code, CanonicalCode};
use super::embed::embeds;
use super::model::{FinStructure, Signature};
use crate::error::{Error, Result};

/// A class of finite structures listed up to isomorphism in nondecreasing
/// size, and by canonical code within a size.
pub trait ClassEnumerator: Send + Sync {
    fn signature(&self) -> &Signature;

    /// Largest size this enumerator will produce.
    fn max_size(&self) -> usize;

    /// Members of the given size, sorted by canonical code.
    fn members_of_size(&self, size: usize) -> Vec<FinStructure>;

    fn iter(&self) -> Box<dyn Iterator<Item = FinStructure> + '_> {
        Box::new((1..=self.max_size()).flat_map(move |n| self.members_of_size(n)))
    }
}

fn sorted_classes(candidates: impl IntoIterator<Item = FinStructure>) -> Vec<FinStructure> {
    let mut by_code: BTreeMap<CanonicalCode, FinStructure> = BTreeMap::new();
    for s in candidates {
        by_code.entry(canonical_code(&s)).or_insert(s);
    }
    by_code.into_values().collect()
}

/// Finite linear orders.
#[derive(Debug, Clone)]
pub struct Chains {
    signature: Signature,
    pub max_size: usize,
}

impl Chains {
    pub fn new(max_size: usize) -> Self {
        Chains {
            signature: Signature::order(),
            max_size,
        }
    }
}

impl ClassEnumerator for Chains {
    fn signature(&self) -> &Signature {
        &self.signature
    }
    fn max_size(&self) -> usize {
        self.max_size
    }
    fn members_of_size(&self, size: usize) -> Vec<FinStructure> {
        if size == 0 || size > self.max_size {
            return Vec::new();
        }
        vec![FinStructure::chain(size)]
    }
}

/// Complete graphs.
#[derive(Debug, Clone)]
pub struct Cliques {
    signature: Signature,
    pub max_size: usize,
}

impl Cliques {
    pub fn new(max_size: usize) -> Self {
        Cliques {
            signature: Signature::graph(),
            max_size,
        }
    }
}

impl ClassEnumerator for Cliques {
    fn signature(&self) -> &Signature {
        &self.signature
    }
    fn max_size(&self) -> usize {
        self.max_size
    }
    fn members_of_size(&self, size: usize) -> Vec<FinStructure> {
        if size == 0 || size > self.max_size {
            return Vec::new();
        }
        vec![FinStructure::clique(size)]
    }
}

/// All finite simple graphs (symmetric irreflexive `E`).
pub struct Graphs {
    signature: Signature,
    pub max_size: usize,
    cache: Mutex<BTreeMap<usize, Arc<Vec<FinStructure>>>>,
}

impl Graphs {
    pub fn new(max_size: usize) -> Self {
        Graphs {
            signature: Signature::graph(),
            max_size,
            cache: Mutex::new(BTreeMap::new()),
        }
    }
}

impl ClassEnumerator for Graphs {
    fn signature(&self) -> &Signature {
        &self.signature
    }
    fn max_size(&self) -> usize {
        self.max_size
    }
    fn members_of_size(&self, size: usize) -> Vec<FinStructure> {
        if size == 0 || size > self.max_size {
            return Vec::new();
        }
        if let Some(v) = self.cache.lock().expect("cache lock").get(&size) {
            return v.as_ref().clone();
        }
        let pairs: Vec<(usize, usize)> = (0..size)
            .flat_map(|i| (i + 1..size).map(move |j| (i, j)))
            .collect();
        let all = (0u64..1 << pairs.len()).map(|mask| {
            let edges: Vec<_> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            FinStructure::graph(size, &edges).expect("edges in range")
        });
        let v = Arc::new(sorted_classes(all));
        self.cache
            .lock()
            .expect("cache lock")
            .insert(size, v.clone());
        v.as_ref().clone()
    }
}

/// Every structure over a signature, up to isomorphism.
pub struct AllStructures {
    signature: Signature,
    pub max_size: usize,
}

impl AllStructures {
    pub fn new(signature: Signature, max_size: usize) -> Self {
        AllStructures {
            signature,
            max_size,
        }
    }
}

impl ClassEnumerator for AllStructures {
    fn signature(&self) -> &Signature {
        &self.signature
    }
    fn max_size(&self) -> usize {
        self.max_size
    }
    fn members_of_size(&self, size: usize) -> Vec<FinStructure> {
        if size == 0 || size > self.max_size {
            return Vec::new();
        }
        // all tuples per symbol
        let tuple_sets: Vec<Vec<Vec<usize>>> = self
            .signature
            .relations()
            .iter()
            .map(|r| {
                let mut out = Vec::new();
                let total = size.pow(r.arity as u32);
                for mut code in 0..total {
                    let mut t = vec![0; r.arity];
                    for slot in t.iter_mut().rev() {
                        *slot = code % size;
                        code /= size;
                    }
                    out.push(t);
                }
                out
            })
            .collect();
        let total_bits: usize = tuple_sets.iter().map(Vec::len).sum();
        assert!(total_bits < 24, "AllStructures is limited to tiny universes");
        let sig = Arc::new(self.signature.clone());
        let all = (0u64..1 << total_bits).map(|mask| {
            let mut bit = 0;
            let interps = tuple_sets
                .iter()
                .map(|ts| {
                    ts.iter()
                        .filter(|_| {
                            let on = mask >> bit & 1 == 1;
                            bit += 1;
                            on
                        })
                        .cloned()
                        .collect()
                })
                .collect();
            FinStructure::new(sig.clone(), size, interps).expect("tuples in range")
        });
        sorted_classes(all)
    }
}

/// Restricts another enumerator to the members satisfying a predicate.
pub struct Filtered<E, F> {
    inner: E,
    keep: F,
}

impl<E, F> Filtered<E, F>
where
    E: ClassEnumerator,
    F: Fn(&FinStructure) -> bool + Send + Sync,
{
    pub fn new(inner: E, keep: F) -> Self {
        Filtered { inner, keep }
    }
}

impl<E, F> ClassEnumerator for Filtered<E, F>
where
    E: ClassEnumerator,
    F: Fn(&FinStructure) -> bool + Send + Sync,
{
    fn signature(&self) -> &Signature {
        self.inner.signature()
    }
    fn max_size(&self) -> usize {
        self.inner.max_size()
    }
    fn members_of_size(&self, size: usize) -> Vec<FinStructure> {
        self.inner
            .members_of_size(size)
            .into_iter()
            .filter(|s| (self.keep)(s))
            .collect()
    }
}

/// First enumerated structure into which both `a` and `b` embed.
pub fn jep_witness(
    a: &FinStructure,
    b: &FinStructure,
    class: &dyn ClassEnumerator,
) -> Result<FinStructure> {
    if !a.same_signature(b) || a.signature() != class.signature() {
        return Err(Error::SignatureMismatch);
    }
    let lower = a.size().max(b.size());
    (lower..=class.max_size())
        .flat_map(|n| class.members_of_size(n))
        .find(|c| embeds(a, c) && embeds(b, c))
        .ok_or(Error::EnumeratorExhausted)
}

/// Builds `B_0 = A_0`, `B_t = jep(B_{t-1}, A_{t-1})` and verifies membership,
/// the chain embeddings `B_{t-1} ↪ B_t` and `A_r ↪ B_t` for all `r < t`.
pub fn cofinal_chain(
    age_enumeration: &[FinStructure],
    length: usize,
    class: &dyn ClassEnumerator,
) -> Result<Vec<FinStructure>> {
    if length == 0 {
        return Err(Error::InvalidArgument("length must be at least 1".into()));
    }
    if age_enumeration.len() + 1 < length {
        return Err(Error::InvalidArgument(format!(
            "chain of length {length} needs {} enumerated structures",
            length - 1
        )));
    }
    let first = age_enumeration
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty age enumeration".into()))?;
    let mut chain = vec![first.clone()];
    for t in 1..length {
        let next = jep_witness(&chain[t - 1], &age_enumeration[t - 1], class)?;
        chain.push(next);
    }
    verify_cofinal_chain(age_enumeration, &chain, class)?;
    Ok(chain)
}

/// Checks the three cofinal-chain conditions on an already built chain.
pub fn verify_cofinal_chain(
    age_enumeration: &[FinStructure],
    chain: &[FinStructure],
    class: &dyn ClassEnumerator,
) -> Result<()> {
    let in_class = |s: &FinStructure| {
        let code = canonical_code(s);
        class
            .members_of_size(s.size())
            .iter()
            .any(|m| canonical_code(m) == code)
    };
    for (t, b) in chain.iter().enumerate() {
        if !in_class(b) {
            return Err(Error::InvalidStructure(format!("B_{t} is not in the class")));
        }
        if t > 0 && !embeds(&chain[t - 1], b) {
            return Err(Error::InvalidStructure(format!("B_{} does not embed in B_{t}", t - 1)));
        }
        for (r, a) in age_enumeration.iter().enumerate().take(t) {
            if !embeds(a, b) {
                return Err(Error::InvalidStructure(format!("A_{r} does not embed in B_{t}")));
            }
        }
    }
    Ok(())
}

/// Lazily extended cofinal chain over an infinite age listing `A_n`.
pub struct CofinalChainRule {
    name: String,
    age_member: Box<dyn Fn(usize) -> FinStructure + Send + Sync>,
    class: Box<dyn ClassEnumerator>,
    built: Mutex<Vec<Arc<FinStructure>>>,
}

impl CofinalChainRule {
    pub fn new(
        name: impl Into<String>,
        age_member: impl Fn(usize) -> FinStructure + Send + Sync + 'static,
        class: impl ClassEnumerator + 'static,
    ) -> Self {
        CofinalChainRule {
            name: name.into(),
            age_member: Box::new(age_member),
            class: Box::new(class),
            built: Mutex::new(Vec::new()),
        }
    }

    /// Linear orders with `A_n` the `(n+1)`-chain.
    pub fn chains() -> Self {
        CofinalChainRule::new("chains", |n| FinStructure::chain(n + 1), Chains::new(usize::MAX / 2))
    }

    /// Complete graphs with `A_n` the `(n+1)`-clique.
    pub fn cliques() -> Self {
        CofinalChainRule::new(
            "cliques",
            |n| FinStructure::clique(n + 1),
            Cliques::new(usize::MAX / 2),
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn signature(&self) -> &Signature {
        self.class.signature()
    }

    pub fn age_member(&self, n: usize) -> FinStructure {
        (self.age_member)(n)
    }

    /// `B_t`, extending the recursion as needed.
    pub fn member(&self, t: usize) -> Result<Arc<FinStructure>> {
        let mut built = self.built.lock().expect("chain lock");
        while built.len() <= t {
            let next = match built.last() {
                None => self.age_member(0),
                Some(prev) => {
                    let a = self.age_member(built.len() - 1);
                    jep_witness(prev, &a, self.class.as_ref())?
                }
            };
            built.push(Arc::new(next));
        }
        Ok(built[t].clone())
    }
}

impl std::fmt::Debug for CofinalChainRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CofinalChainRule")
            .field("name", &self.name)
            .finish()
    }
}
