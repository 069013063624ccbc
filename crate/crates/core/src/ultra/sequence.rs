use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::structure::{CofinalChainRule, FinStructure, Signature};

type Generator = dyn Fn(usize) -> Result<FinStructure> + Send + Sync;

/// How factors past the explicit prefix are generated.
#[derive(Clone)]
pub enum TailRule {
    /// `M_t` is the linear order of size `a·t + b`.
    Chain { a: usize, b: usize },
    /// `M_t` is the `t`-th member of a cofinal chain.
    CofinalChain(Arc<CofinalChainRule>),
    /// Arbitrary generator; nothing is certified about it.
    Custom { name: String, generator: Arc<Generator> },
}

impl TailRule {
    pub fn custom(
        name: impl Into<String>,
        generator: impl Fn(usize) -> Result<FinStructure> + Send + Sync + 'static,
    ) -> Self {
        TailRule::Custom {
            name: name.into(),
            generator: Arc::new(generator),
        }
    }
}

impl fmt::Debug for TailRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for TailRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TailRule::Chain { a, b } => write!(f, "chain({a}*t+{b})"),
            TailRule::CofinalChain(rule) => write!(f, "cofinal({})", rule.name()),
            TailRule::Custom { name, .. } => write!(f, "custom({name})"),
        }
    }
}

/// A sequence `(M_t)_{t∈ω}` of finite structures: an explicit prefix and a
/// tail rule.
pub struct StructureSequence {
    signature: Arc<Signature>,
    prefix: Vec<Arc<FinStructure>>,
    tail: TailRule,
    cache: Mutex<BTreeMap<usize, Arc<FinStructure>>>,
}

impl fmt::Debug for StructureSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StructureSequence")
            .field("signature", &self.signature.to_string())
            .field("prefix_len", &self.prefix.len())
            .field("tail", &self.tail)
            .finish()
    }
}

const CACHE_LIMIT: usize = 4096;

impl StructureSequence {
    pub fn new(signature: Signature, prefix: Vec<FinStructure>, tail: TailRule) -> Result<Self> {
        for (t, m) in prefix.iter().enumerate() {
            if m.signature() != &signature {
                return Err(Error::InvalidStructure(format!(
                    "prefix structure {t} has signature {}, expected {signature}",
                    m.signature()
                )));
            }
        }
        if let TailRule::Chain { b: 0, .. } = tail {
            return Err(Error::InvalidArgument(
                "chain tail needs b ≥ 1 so that every factor is nonempty".into(),
            ));
        }
        let tail_signature = match &tail {
            TailRule::Chain { .. } => Some(Signature::order()),
            TailRule::CofinalChain(rule) => Some(rule.signature().clone()),
            TailRule::Custom { .. } => None,
        };
        if let Some(ts) = tail_signature {
            if ts != signature {
                return Err(Error::SignatureMismatch);
            }
        }
        Ok(StructureSequence {
            signature: Arc::new(signature),
            prefix: prefix.into_iter().map(Arc::new).collect(),
            tail,
            cache: Mutex::new(BTreeMap::new()),
        })
    }

    /// `M_t = chain(a·t + b)` with no explicit prefix.
    ///
    /// # Panics
    /// If `b = 0`.
    pub fn chain(a: usize, b: usize) -> Self {
        StructureSequence::new(Signature::order(), Vec::new(), TailRule::Chain { a, b })
            .expect("chain tail needs b ≥ 1")
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn prefix_len(&self) -> usize {
        self.prefix.len()
    }

    pub fn prefix(&self) -> &[Arc<FinStructure>] {
        &self.prefix
    }

    pub fn tail(&self) -> &TailRule {
        &self.tail
    }

    /// `|M_t|`, without building the structure when the rule gives it.
    pub fn size(&self, t: usize) -> Result<usize> {
        if t < self.prefix.len() {
            return Ok(self.prefix[t].size());
        }
        match &self.tail {
            TailRule::Chain { a, b } => a
                .checked_mul(t)
                .and_then(|x| x.checked_add(*b))
                .ok_or_else(|| Error::Overflow(format!("size of M_{t}"))),
            _ => Ok(self.member(t)?.size()),
        }
    }

    /// `M_t`.
    pub fn member(&self, t: usize) -> Result<Arc<FinStructure>> {
        if t < self.prefix.len() {
            return Ok(self.prefix[t].clone());
        }
        if let Some(hit) = self.cache.lock().expect("sequence cache").get(&t) {
            return Ok(hit.clone());
        }
        let m = match &self.tail {
            TailRule::Chain { .. } => Arc::new(FinStructure::chain(self.size(t)?)),
            TailRule::CofinalChain(rule) => rule.member(t)?,
            TailRule::Custom { generator, .. } => {
                let m = generator(t)?;
                if m.signature() != self.signature.as_ref() {
                    return Err(Error::InvalidStructure(format!(
                        "custom rule produced signature {} at t = {t}",
                        m.signature()
                    )));
                }
                Arc::new(m)
            }
        };
        let mut cache = self.cache.lock().expect("sequence cache");
        if cache.len() < CACHE_LIMIT {
            cache.insert(t, m.clone());
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_sequences() {
        let s = StructureSequence::chain(1, 1);
        assert_eq!(s.size(4).unwrap(), 5);
        assert_eq!(s.member(4).unwrap().size(), 5);
        assert_eq!(s.prefix_len(), 0);
    }

    #[test]
    fn prefix_and_signature_checks() {
        let g = Signature::graph();
        let bad = StructureSequence::new(g.clone(), vec![], TailRule::Chain { a: 1, b: 1 });
        assert_eq!(bad.unwrap_err(), Error::SignatureMismatch);
        let empty = StructureSequence::new(Signature::order(), vec![], TailRule::Chain { a: 1, b: 0 });
        assert!(empty.is_err());
        let s = StructureSequence::new(
            Signature::order(),
            vec![FinStructure::chain(3)],
            TailRule::Chain { a: 0, b: 2 },
        )
        .unwrap();
        assert_eq!(s.size(0).unwrap(), 3);
        assert_eq!(s.size(9).unwrap(), 2);
        let custom = StructureSequence::new(
            g,
            vec![],
            TailRule::custom("bad", |_| Ok(FinStructure::chain(2))),
        )
        .unwrap();
        assert!(custom.member(0).is_err());
    }

    #[test]
    fn cofinal_tail() {
        let s = StructureSequence::new(
            Signature::order(),
            vec![],
            TailRule::CofinalChain(Arc::new(CofinalChainRule::chains())),
        )
        .unwrap();
        assert_eq!(s.size(5).unwrap(), 5);
    }
}
