use std::fmt;

use serde::{Deserialize, Serialize};

use super::sequence::StructureSequence;
use crate::error::{Error, Result};
use crate::structure::SubsetCopy;

/// Tail rule for the coordinates `a[t]` of an element of the product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoordRule {
    /// `a[t] = i`.
    ConstIndex(usize),
    /// The least element `0`.
    Min,
    /// The greatest element `|M_t| − 1`.
    Max,
    /// `⌊p·t/q⌋`, clamped to `|M_t| − 1`.
    Scaled { p: usize, q: usize },
}

impl fmt::Display for CoordRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoordRule::ConstIndex(i) => write!(f, "const({i})"),
            CoordRule::Min => f.write_str("min"),
            CoordRule::Max => f.write_str("max"),
            CoordRule::Scaled { p, q } => write!(f, "scaled({p}/{q})"),
        }
    }
}

/// An element `a ∈ ∏ M_t`, given by explicit leading coordinates and a rule.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UltraElement {
    pub prefix: Vec<usize>,
    pub rule: CoordRule,
}

impl UltraElement {
    pub fn new(prefix: Vec<usize>, rule: CoordRule) -> Result<Self> {
        if let CoordRule::Scaled { q: 0, .. } = rule {
            return Err(Error::InvalidArgument("scaled rule needs q ≥ 1".into()));
        }
        Ok(UltraElement { prefix, rule })
    }

    pub fn constant(i: usize) -> Self {
        UltraElement {
            prefix: Vec::new(),
            rule: CoordRule::ConstIndex(i),
        }
    }

    pub fn scaled(p: usize, q: usize) -> Result<Self> {
        UltraElement::new(Vec::new(), CoordRule::Scaled { p, q })
    }

    /// `a[t]` in a factor of the given size, or `None` when the coordinate
    /// falls outside the universe.
    pub fn value_at(&self, t: usize, size: usize) -> Option<usize> {
        let v = match (self.prefix.get(t), self.rule) {
            (Some(&v), _) => v,
            (None, CoordRule::ConstIndex(i)) => i,
            (None, CoordRule::Min) => 0,
            (None, CoordRule::Max) => size.checked_sub(1)?,
            (None, CoordRule::Scaled { p, q }) => {
                let raw = (p as u128 * t as u128 / q as u128).min(usize::MAX as u128) as usize;
                raw.min(size.checked_sub(1)?)
            }
        };
        (v < size).then_some(v)
    }
}

impl fmt::Display for UltraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rule)?;
        if !self.prefix.is_empty() {
            let p: Vec<String> = self.prefix.iter().map(|v| v.to_string()).collect();
            write!(f, " prefix={}", p.join(","))?;
        }
        Ok(())
    }
}

/// `A[t] = {a[t] : a ∈ ā}` as an increasing list.
pub fn project_copy(elems: &[UltraElement], seq: &StructureSequence, t: usize) -> Result<SubsetCopy> {
    let size = seq.size(t)?;
    let mut vals = Vec::with_capacity(elems.len());
    for e in elems {
        let v = e.value_at(t, size).ok_or_else(|| Error::IndexOutOfRange {
            index: e.prefix.get(t).copied().unwrap_or(match e.rule {
                CoordRule::ConstIndex(i) => i,
                _ => 0,
            }),
            size,
        })?;
        vals.push(v);
    }
    Ok(SubsetCopy::from_unsorted(vals))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projections() {
        let seq = StructureSequence::chain(1, 1);
        let consts = [UltraElement::constant(0), UltraElement::constant(2)];
        for t in 3..10 {
            assert_eq!(project_copy(&consts, &seq, t).unwrap().elements(), &[0, 2]);
        }
        assert!(project_copy(&consts, &seq, 1).is_err());

        let collapsing = [
            UltraElement::new(vec![1, 1], CoordRule::ConstIndex(0)).unwrap(),
            UltraElement::constant(1),
        ];
        assert_eq!(project_copy(&collapsing, &seq, 1).unwrap().elements(), &[1]);
        assert_eq!(project_copy(&collapsing, &seq, 2).unwrap().elements(), &[0, 1]);

        let scaled = [UltraElement::scaled(1, 3).unwrap(), UltraElement::scaled(2, 3).unwrap()];
        for t in 0..20 {
            let expect: Vec<usize> = {
                let mut v = vec![t / 3, 2 * t / 3];
                v.dedup();
                v
            };
            assert_eq!(project_copy(&scaled, &seq, t).unwrap().elements(), expect.as_slice());
        }
    }

    #[test]
    fn coordinate_values() {
        let max = UltraElement::new(vec![], CoordRule::Max).unwrap();
        assert_eq!(max.value_at(3, 7), Some(6));
        assert_eq!(max.value_at(3, 0), None);
        assert_eq!(UltraElement::scaled(5, 1).unwrap().value_at(4, 7), Some(6));
        assert_eq!(UltraElement::constant(9).value_at(0, 3), None);
        assert!(UltraElement::scaled(1, 0).is_err());
    }
}
