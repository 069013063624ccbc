use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structure::{
    canonical_code, enumerate_copies, induced_substructure, are_isomorphic, CanonicalCode,
    FinStructure, SubsetCopy,
};

/// A total `k`-coloring of the copies of a pattern inside an ambient structure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    k: usize,
    pattern: CanonicalCode,
    copies: Vec<SubsetCopy>,
    colors: Vec<usize>,
}

impl Coloring {
    /// Colors every copy of `pattern` in `ambient` through `f`.
    pub fn new(
        ambient: &FinStructure,
        pattern: &FinStructure,
        k: usize,
        mut f: impl FnMut(&SubsetCopy) -> usize,
    ) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        let copies = enumerate_copies(pattern, ambient);
        let colors: Vec<usize> = copies.iter().map(&mut f).collect();
        if let Some(&c) = colors.iter().find(|&&c| c >= k) {
            return Err(Error::InvalidArgument(format!("color {c} out of range for k = {k}")));
        }
        Ok(Coloring {
            k,
            pattern: canonical_code(pattern),
            copies,
            colors,
        })
    }

    /// Builds a coloring from explicit copies and colors, checking that the
    /// domain is exactly the set of copies of `pattern` in `ambient`.
    pub fn from_parts(
        ambient: &FinStructure,
        pattern: &FinStructure,
        k: usize,
        copies: Vec<SubsetCopy>,
        colors: Vec<usize>,
    ) -> Result<Self> {
        if copies.len() != colors.len() {
            return Err(Error::LengthMismatch {
                expected: copies.len(),
                got: colors.len(),
            });
        }
        let mut pairs: Vec<_> = copies.into_iter().zip(colors).collect();
        pairs.sort();
        let (copies, colors): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        if copies != enumerate_copies(pattern, ambient) {
            return Err(Error::InvalidArgument(
                "coloring domain differs from the copies of the pattern".into(),
            ));
        }
        if let Some(&c) = colors.iter().find(|&&c| c >= k) {
            return Err(Error::InvalidArgument(format!("color {c} out of range for k = {k}")));
        }
        Ok(Coloring {
            k,
            pattern: canonical_code(pattern),
            copies,
            colors,
        })
    }

    /// Internal constructor for copies already known to be the full domain.
    pub(crate) fn from_domain(
        pattern: CanonicalCode,
        k: usize,
        copies: Vec<SubsetCopy>,
        colors: Vec<usize>,
    ) -> Self {
        Coloring {
            k,
            pattern,
            copies,
            colors,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn pattern(&self) -> &CanonicalCode {
        &self.pattern
    }

    pub fn copies(&self) -> &[SubsetCopy] {
        &self.copies
    }

    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    pub fn color_of(&self, copy: &SubsetCopy) -> Option<usize> {
        self.copies
            .binary_search(copy)
            .ok()
            .map(|i| self.colors[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SubsetCopy, usize)> {
        self.copies.iter().zip(self.colors.iter().copied())
    }
}

/// Number of distinct colors on the copies of the pattern inside `b`, which
/// must itself be a copy of `big` in the ambient structure.
pub fn chromatic_count(
    c: &Coloring,
    ambient: &FinStructure,
    big: &FinStructure,
    b: &SubsetCopy,
) -> Result<usize> {
    let sub = induced_substructure(ambient, b)?;
    if !are_isomorphic(&sub, big) {
        return Err(Error::NotACopy(b.elements().to_vec()));
    }
    let mut seen = Vec::new();
    for (copy, color) in c.iter() {
        if copy.is_subset_of(b) && !seen.contains(&color) {
            seen.push(color);
        }
    }
    Ok(seen.len())
}
