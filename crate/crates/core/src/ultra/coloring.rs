use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use super::element::{project_copy, UltraElement};
use super::los::copy_defined;
use super::sequence::StructureSequence;
use super::verdict::{final_run_start, FrechetVerdict, LosOutcome};
use crate::error::{Error, Result};
use crate::structure::{canonical_code, induced_substructure, CanonicalCode, FinStructure, SubsetCopy};
use crate::tree::{antichain_x, build_w0, devlin_color, devlin_types, preorder_cmp, w0_height, Node, TreeSet};

type CustomColor = dyn Fn(usize, &FinStructure, &SubsetCopy) -> usize + Send + Sync;

/// How `c_t` colors the copies of the pattern in `M_t`.
#[derive(Clone)]
pub enum ColoringRule {
    Constant(usize),
    /// A seeded hash of `t` and the copy.
    Hashed { seed: u64 },
    /// `t mod 2`.
    Parity,
    /// Chains only: the copy is sent order-preservingly into the antichain of
    /// the skew tree and colored by its Devlin type.
    ByDevlin { n: usize },
    Custom { name: String, color: Arc<CustomColor> },
}

impl fmt::Debug for ColoringRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ColoringRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColoringRule::Constant(j) => write!(f, "constant({j})"),
            ColoringRule::Hashed { seed } => write!(f, "hashed({seed})"),
            ColoringRule::Parity => f.write_str("parity"),
            ColoringRule::ByDevlin { n } => write!(f, "by-devlin({n})"),
            ColoringRule::Custom { name, .. } => write!(f, "custom({name})"),
        }
    }
}

/// Explicit colors at one coordinate, overriding the rule there.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoordOverride {
    /// Color for every copy not listed in `copies`.
    pub default: Option<usize>,
    pub copies: BTreeMap<SubsetCopy, usize>,
}

/// A family `(c_t)_{t ∈ Z}` of `k`-colorings of the copies of a pattern in
/// each factor, defined on the cofinite set `Z = ω ∖ excluded`.
#[derive(Debug)]
pub struct PerCoordColorings {
    k: usize,
    pattern: FinStructure,
    pattern_code: CanonicalCode,
    rule: ColoringRule,
    excluded: BTreeSet<usize>,
    overrides: BTreeMap<usize, CoordOverride>,
    embeddings: Mutex<BTreeMap<usize, Arc<Vec<Node>>>>,
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

impl PerCoordColorings {
    pub fn new(pattern: FinStructure, k: usize, rule: ColoringRule) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        match &rule {
            ColoringRule::Constant(j) if *j >= k => {
                return Err(Error::InvalidArgument(format!("color {j} out of range for k = {k}")))
            }
            ColoringRule::ByDevlin { n } => {
                if *n != pattern.size() {
                    return Err(Error::LengthMismatch {
                        expected: pattern.size(),
                        got: *n,
                    });
                }
                let types = devlin_types(*n)?.codes.len();
                if k < types {
                    return Err(Error::InvalidArgument(format!(
                        "Devlin coloring of {n}-sets needs k ≥ {types}"
                    )));
                }
            }
            _ => {}
        }
        Ok(PerCoordColorings {
            k,
            pattern_code: canonical_code(&pattern),
            pattern,
            rule,
            excluded: BTreeSet::new(),
            overrides: BTreeMap::new(),
            embeddings: Mutex::new(BTreeMap::new()),
        })
    }

    pub fn with_excluded(mut self, excluded: impl IntoIterator<Item = usize>) -> Self {
        self.excluded.extend(excluded);
        self
    }

    pub fn with_override(mut self, t: usize, ov: CoordOverride) -> Result<Self> {
        let bad = ov.default.into_iter().chain(ov.copies.values().copied()).find(|&c| c >= self.k);
        if let Some(c) = bad {
            return Err(Error::InvalidArgument(format!("color {c} out of range for k = {}", self.k)));
        }
        self.overrides.insert(t, ov);
        Ok(self)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn pattern(&self) -> &FinStructure {
        &self.pattern
    }

    pub fn rule(&self) -> &ColoringRule {
        &self.rule
    }

    pub fn excluded(&self) -> &BTreeSet<usize> {
        &self.excluded
    }

    pub fn overrides(&self) -> &BTreeMap<usize, CoordOverride> {
        &self.overrides
    }

    pub fn in_domain(&self, t: usize) -> bool {
        !self.excluded.contains(&t)
    }

    /// The first `size` nodes of the antichain in lexicographic order.
    fn antichain_prefix(&self, size: usize) -> Result<Arc<Vec<Node>>> {
        let mut levels = 0;
        while (1usize << (levels + 1)) - 1 < size {
            levels += 1;
        }
        if let Some(hit) = self.embeddings.lock().expect("embedding cache").get(&levels) {
            return Ok(hit.clone());
        }
        let w = build_w0(w0_height(levels + 1, 0))?;
        let mut nodes: Vec<Node> = antichain_x(&w).iter().cloned().collect();
        nodes.sort_by(preorder_cmp);
        let nodes = Arc::new(nodes);
        self.embeddings
            .lock()
            .expect("embedding cache")
            .insert(levels, nodes.clone());
        Ok(nodes)
    }

    /// `c_t(copy)`, or `None` when `t ∉ Z`. The copy must be a copy of the
    /// pattern in `m`.
    pub fn color_at(&self, t: usize, m: &FinStructure, copy: &SubsetCopy) -> Result<Option<usize>> {
        if self.excluded.contains(&t) {
            return Ok(None);
        }
        if copy.len() != self.pattern.size()
            || canonical_code(&induced_substructure(m, copy)?) != self.pattern_code
        {
            return Err(Error::NotACopy(copy.elements().to_vec()));
        }
        if let Some(ov) = self.overrides.get(&t) {
            if let Some(&c) = ov.copies.get(copy) {
                return Ok(Some(c));
            }
            if let Some(c) = ov.default {
                return Ok(Some(c));
            }
        }
        let c = match &self.rule {
            ColoringRule::Constant(j) => *j,
            ColoringRule::Parity => t % 2 % self.k,
            ColoringRule::Hashed { seed } => {
                let h = copy
                    .elements()
                    .iter()
                    .fold(splitmix(seed ^ splitmix(t as u64)), |h, &x| splitmix(h ^ x as u64));
                (h % self.k as u64) as usize
            }
            ColoringRule::ByDevlin { n } => {
                if m.signature() != &crate::structure::Signature::order() {
                    return Err(Error::InvalidArgument(
                        "Devlin coloring is defined on chains only".into(),
                    ));
                }
                let nodes = self.antichain_prefix(m.size())?;
                let set: TreeSet = copy.elements().iter().map(|&i| nodes[i].clone()).collect();
                devlin_color(&set, *n)?.as_color()
            }
            ColoringRule::Custom { color, .. } => {
                let c = color(t, m, copy);
                if c >= self.k {
                    return Err(Error::InvalidArgument(format!(
                        "custom rule produced color {c} for k = {}",
                        self.k
                    )));
                }
                c
            }
        };
        Ok(Some(c))
    }

    /// Coordinate past which the rule alone decides the colors.
    fn rule_threshold(&self) -> usize {
        let ex = self.excluded.iter().next_back().map_or(0, |t| t + 1);
        let ov = self.overrides.keys().next_back().map_or(0, |t| t + 1);
        ex.max(ov)
    }
}

/// Color of an internal copy of the pattern in the ultraproduct.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum InternalColor {
    /// `{t : c_t(A′[t]) = color}` is certified cofinite from `threshold`.
    Certified { color: usize, threshold: usize },
    /// No color class could be certified on the given range.
    Undecided { bitmaps: Vec<Vec<bool>> },
}

/// Per-coordinate truth of `c_t(A′[t]) = j`; false where the copy is not a
/// copy of the pattern or `t ∉ Z`.
fn class_bitmaps(
    cols: &PerCoordColorings,
    elems: &[UltraElement],
    seq: &StructureSequence,
    defined: &[bool],
    horizon: usize,
) -> Result<Vec<Vec<bool>>> {
    let mut out = vec![vec![false; horizon]; cols.k];
    for t in 0..horizon {
        if !defined[t] {
            continue;
        }
        let m = seq.member(t)?;
        let copy = project_copy(elems, seq, t)?;
        if let Some(c) = cols.color_at(t, &m, &copy)? {
            out[c][t] = true;
        }
    }
    Ok(out)
}

/// Verdict on `{t ∈ Z : A′[t] ≅ A and c_t(A′[t]) = j}`. Only constant rules
/// are certified past the range.
pub fn class_verdict(
    cols: &PerCoordColorings,
    elems: &[UltraElement],
    seq: &StructureSequence,
    j: usize,
    horizon: usize,
) -> Result<LosOutcome> {
    if j >= cols.k {
        return Err(Error::InvalidArgument(format!("color {j} out of range for k = {}", cols.k)));
    }
    let defined = copy_defined(elems, &cols.pattern, seq, horizon)?;
    let bitmap = class_bitmaps(cols, elems, seq, &defined.bitmap, horizon)?.swap_remove(j);
    let verdict = match (&cols.rule, defined.verdict) {
        (_, FrechetVerdict::FailsCofinitely { threshold }) => FrechetVerdict::FailsCofinitely {
            threshold: threshold.max(final_run_start(&bitmap)),
        },
        (ColoringRule::Constant(c), FrechetVerdict::HoldsCofinitely { threshold }) => {
            let from = threshold.max(cols.rule_threshold());
            let run = final_run_start(&bitmap);
            if from < horizon && run <= from {
                FrechetVerdict::decided(*c == j, run)
            } else {
                FrechetVerdict::Undecided
            }
        }
        _ => FrechetVerdict::Undecided,
    };
    Ok(LosOutcome { verdict, bitmap })
}

/// The color of the internal copy `A′` under the ultraproduct coloring, when
/// some color class is certified cofinite. Fails with
/// [`Error::CopyUndefined`] when `A′[t]` is certified not to be a copy.
pub fn internal_color(
    cols: &PerCoordColorings,
    elems: &[UltraElement],
    seq: &StructureSequence,
    horizon: usize,
) -> Result<InternalColor> {
    let defined = copy_defined(elems, &cols.pattern, seq, horizon)?;
    if defined.verdict.fails() {
        return Err(Error::CopyUndefined);
    }
    let bitmaps = class_bitmaps(cols, elems, seq, &defined.bitmap, horizon)?;
    let mut certified = Vec::new();
    for j in 0..cols.k {
        let v = class_verdict(cols, elems, seq, j, horizon)?;
        if let FrechetVerdict::HoldsCofinitely { threshold } = v.verdict {
            certified.push((j, threshold));
        }
    }
    match certified.as_slice() {
        [] => Ok(InternalColor::Undecided { bitmaps }),
        [(color, threshold)] => Ok(InternalColor::Certified {
            color: *color,
            threshold: *threshold,
        }),
        _ => unreachable!("color classes are disjoint, so at most one is cofinite"),
    }
}
