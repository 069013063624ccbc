use std::collections::BTreeSet;
use std::ops::ControlFlow;

use super::canon::{canonical_code, CanonicalCode};
use super::model::{EmbeddingMap, FinStructure, SubsetCopy};
use crate::error::{Error, Result};

/// Substructure induced on the elements of `s`, relabelled by position.
pub fn induced_substructure(n: &FinStructure, s: &SubsetCopy) -> Result<FinStructure> {
    if let Some(&bad) = s.elements().iter().find(|&&x| x >= n.size()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            size: n.size(),
        });
    }
    if s.is_empty() {
        return Err(Error::InvalidArgument("empty copy".into()));
    }
    let mut pos = vec![usize::MAX; n.size()];
    for (i, &x) in s.elements().iter().enumerate() {
        pos[x] = i;
    }
    let interps = n
        .relations()
        .iter()
        .map(|rel| {
            rel.tuples()
                .iter()
                .filter(|t| t.iter().all(|&x| pos[x] != usize::MAX))
                .map(|t| t.iter().map(|&x| pos[x]).collect())
                .collect()
        })
        .collect();
    FinStructure::new(n.signature_arc().clone(), s.len(), interps)
}

/// Calls `f` on every tuple over `0..size` of the given arity.
fn for_each_tuple(size: usize, arity: usize, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    let mut t = vec![0; arity];
    loop {
        if !f(&t) {
            return false;
        }
        let mut i = arity;
        loop {
            if i == 0 {
                return true;
            }
            i -= 1;
            t[i] += 1;
            if t[i] < size {
                break;
            }
            t[i] = 0;
        }
    }
}

/// True iff `m` is injective and preserves every relation in both directions.
pub fn is_embedding(a: &FinStructure, b: &FinStructure, m: &EmbeddingMap) -> bool {
    if !a.same_signature(b) || m.image.len() != a.size() {
        return false;
    }
    if m.image.iter().any(|&x| x >= b.size()) {
        return false;
    }
    let mut seen = BTreeSet::new();
    if !m.image.iter().all(|&x| seen.insert(x)) {
        return false;
    }
    let mut buf = Vec::new();
    a.signature()
        .relations()
        .iter()
        .enumerate()
        .all(|(sym, r)| {
            for_each_tuple(a.size(), r.arity, |t| {
                buf.clear();
                buf.extend(t.iter().map(|&x| m.image[x]));
                a.holds(sym, t) == b.holds(sym, &buf)
            })
        })
}

/// Backtracking embedding search. Images are tried in increasing order, so
/// embeddings are produced in lexicographic order of their image lists.
struct EmbeddingSearch<'a> {
    a: &'a FinStructure,
    b: &'a FinStructure,
    /// Per source position `i` and symbol: source tuples over `0..=i` that
    /// mention `i`, together with whether they hold in `a`.
    checks: Vec<Vec<(usize, Vec<usize>, bool)>>,
}

impl<'a> EmbeddingSearch<'a> {
    fn new(a: &'a FinStructure, b: &'a FinStructure) -> Self {
        let checks = (0..a.size())
            .map(|i| {
                let mut v = Vec::new();
                for (sym, r) in a.signature().relations().iter().enumerate() {
                    for_each_tuple(i + 1, r.arity, |t| {
                        if t.contains(&i) {
                            v.push((sym, t.to_vec(), a.holds(sym, t)));
                        }
                        true
                    });
                }
                v
            })
            .collect();
        EmbeddingSearch { a, b, checks }
    }

    fn consistent(&self, image: &[usize], buf: &mut Vec<usize>) -> bool {
        let i = image.len() - 1;
        self.checks[i].iter().all(|(sym, t, truth)| {
            buf.clear();
            buf.extend(t.iter().map(|&x| image[x]));
            self.b.holds(*sym, buf) == *truth
        })
    }

    fn run(&self, f: &mut dyn FnMut(&[usize]) -> ControlFlow<()>) -> ControlFlow<()> {
        if self.a.size() > self.b.size() {
            return ControlFlow::Continue(());
        }
        let mut image = Vec::with_capacity(self.a.size());
        let mut used = vec![false; self.b.size()];
        let mut buf = Vec::new();
        self.step(&mut image, &mut used, &mut buf, f)
    }

    fn step(
        &self,
        image: &mut Vec<usize>,
        used: &mut [bool],
        buf: &mut Vec<usize>,
        f: &mut dyn FnMut(&[usize]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if image.len() == self.a.size() {
            return f(image);
        }
        for v in 0..self.b.size() {
            if used[v] {
                continue;
            }
            image.push(v);
            if self.consistent(image, buf) {
                used[v] = true;
                let r = self.step(image, used, buf, f);
                used[v] = false;
                if r.is_break() {
                    image.pop();
                    return r;
                }
            }
            image.pop();
        }
        ControlFlow::Continue(())
    }
}

/// Visits every embedding of `a` into `b` in lexicographic order of images.
pub fn for_each_embedding(
    a: &FinStructure,
    b: &FinStructure,
    mut f: impl FnMut(&[usize]) -> ControlFlow<()>,
) -> Result<()> {
    if !a.same_signature(b) {
        return Err(Error::SignatureMismatch);
    }
    let _ = EmbeddingSearch::new(a, b).run(&mut f);
    Ok(())
}

pub fn enumerate_embeddings(a: &FinStructure, b: &FinStructure) -> Result<Vec<EmbeddingMap>> {
    let mut out = Vec::new();
    for_each_embedding(a, b, |img| {
        out.push(EmbeddingMap::new(img.to_vec()));
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// First embedding of `a` into `b`, if any.
pub fn find_embedding(a: &FinStructure, b: &FinStructure) -> Result<Option<EmbeddingMap>> {
    let mut found = None;
    for_each_embedding(a, b, |img| {
        found = Some(EmbeddingMap::new(img.to_vec()));
        ControlFlow::Break(())
    })?;
    Ok(found)
}

/// `a ↪ b`.
pub fn embeds(a: &FinStructure, b: &FinStructure) -> bool {
    matches!(find_embedding(a, b), Ok(Some(_)))
}

/// Codes of all substructures of `s` (every nonempty subset), grouped by size.
fn substructure_codes(s: &FinStructure) -> Vec<BTreeSet<CanonicalCode>> {
    let mut by_size = vec![BTreeSet::new(); s.size() + 1];
    let mut subset = Vec::new();
    fn rec(
        s: &FinStructure,
        start: usize,
        subset: &mut Vec<usize>,
        by_size: &mut [BTreeSet<CanonicalCode>],
    ) {
        for x in start..s.size() {
            subset.push(x);
            let copy = SubsetCopy::from_sorted_unchecked(subset.clone());
            let sub = induced_substructure(s, &copy).expect("indices in range");
            by_size[subset.len()].insert(canonical_code(&sub));
            rec(s, x + 1, subset, by_size);
            subset.pop();
        }
    }
    rec(s, 0, &mut subset, &mut by_size);
    by_size
}

/// Visits the copies of `a` in `n` in lexicographic order of their element
/// lists. Partial subsets are pruned as soon as they stop being isomorphic to
/// a substructure of `a`.
pub fn for_each_copy(
    a: &FinStructure,
    n: &FinStructure,
    mut f: impl FnMut(&SubsetCopy) -> ControlFlow<()>,
) -> Result<()> {
    if !a.same_signature(n) {
        return Err(Error::SignatureMismatch);
    }
    if a.size() > n.size() {
        return Ok(());
    }
    let sub_codes = substructure_codes(a);
    let mut subset = Vec::with_capacity(a.size());
    let _ = copy_step(n, a.size(), &sub_codes, 0, &mut subset, &mut f);
    Ok(())
}

fn copy_step(
    n: &FinStructure,
    target: usize,
    sub_codes: &[BTreeSet<CanonicalCode>],
    start: usize,
    subset: &mut Vec<usize>,
    f: &mut dyn FnMut(&SubsetCopy) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let remaining = target - subset.len();
    for x in start..n.size() {
        if n.size() - x < remaining {
            break;
        }
        subset.push(x);
        let copy = SubsetCopy::from_sorted_unchecked(subset.clone());
        let sub = induced_substructure(n, &copy).expect("indices in range");
        if sub_codes[subset.len()].contains(&canonical_code(&sub)) {
            let r = if subset.len() == target {
                f(&copy)
            } else {
                copy_step(n, target, sub_codes, x + 1, subset, f)
            };
            if r.is_break() {
                subset.pop();
                return r;
            }
        }
        subset.pop();
    }
    ControlFlow::Continue(())
}

/// All copies of `a` in `n`, in lexicographic order. Empty across signatures.
pub fn enumerate_copies(a: &FinStructure, n: &FinStructure) -> Vec<SubsetCopy> {
    let mut out = Vec::new();
    let _ = for_each_copy(a, n, |c| {
        out.push(c.clone());
        ControlFlow::Continue(())
    });
    out
}

/// `N ⊨ θ_A(b̄)`: the map sending the `i`-th element of `A` to `b̄[i]` is an
/// isomorphism onto the substructure induced on `b̄`.
pub fn theta_check(a: &FinStructure, n: &FinStructure, tuple: &[usize]) -> Result<bool> {
    if tuple.len() != a.size() {
        return Err(Error::LengthMismatch {
            expected: a.size(),
            got: tuple.len(),
        });
    }
    Ok(is_embedding(a, n, &EmbeddingMap::new(tuple.to_vec())))
}

/// Codes of the isomorphism classes of substructures of `n` with at most
/// `max_size` elements, sorted.
pub fn age(n: &FinStructure, max_size: usize) -> Result<Vec<CanonicalCode>> {
    if max_size == 0 {
        return Err(Error::InvalidArgument("max_size must be at least 1".into()));
    }
    let mut codes = BTreeSet::new();
    let mut subset = Vec::new();
    fn rec(
        n: &FinStructure,
        max: usize,
        start: usize,
        subset: &mut Vec<usize>,
        codes: &mut BTreeSet<CanonicalCode>,
    ) {
        if subset.len() == max {
            return;
        }
        for x in start..n.size() {
            subset.push(x);
            let copy = SubsetCopy::from_sorted_unchecked(subset.clone());
            codes.insert(canonical_code(
                &induced_substructure(n, &copy).expect("indices in range"),
            ));
            rec(n, max, x + 1, subset, codes);
            subset.pop();
        }
    }
    rec(n, max_size, 0, &mut subset, &mut codes);
    Ok(codes.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::{are_isomorphic, Signature};

    fn path3() -> FinStructure {
        FinStructure::graph(3, &[(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn induced_examples() {
        let c3 = FinStructure::chain(3);
        let s = SubsetCopy::new(vec![0, 2], 3).unwrap();
        assert_eq!(induced_substructure(&c3, &s).unwrap(), FinStructure::chain(2));
        let all = SubsetCopy::new(vec![0, 1, 2], 3).unwrap();
        assert_eq!(induced_substructure(&c3, &all).unwrap(), c3);
        let g = induced_substructure(&path3(), &s).unwrap();
        assert!(g.relation(0).is_empty());
        let bad = SubsetCopy::from_unsorted(vec![0, 5]);
        assert!(induced_substructure(&c3, &bad).is_err());
    }

    #[test]
    fn embedding_examples() {
        let c2 = FinStructure::chain(2);
        let c3 = FinStructure::chain(3);
        assert!(is_embedding(&c2, &c2, &EmbeddingMap::new(vec![0, 1])));
        assert!(!is_embedding(&c2, &c2, &EmbeddingMap::new(vec![0, 0])));
        assert!(!is_embedding(&c2, &c3, &EmbeddingMap::new(vec![2, 0])));
        assert!(is_embedding(&c2, &c3, &EmbeddingMap::new(vec![0, 2])));
    }

    #[test]
    fn enumerate_embeddings_examples() {
        let e = enumerate_embeddings(&FinStructure::chain(2), &FinStructure::chain(3)).unwrap();
        let images: Vec<_> = e.iter().map(|m| m.image.clone()).collect();
        assert_eq!(images, vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        let anti = FinStructure::empty(Signature::graph(), 2).unwrap();
        assert!(enumerate_embeddings(&anti, &FinStructure::clique(3))
            .unwrap()
            .is_empty());
        let point = FinStructure::empty(Signature::graph(), 1).unwrap();
        assert_eq!(enumerate_embeddings(&point, &path3()).unwrap().len(), 3);
        assert_eq!(
            enumerate_embeddings(&point, &FinStructure::chain(3)),
            Err(Error::SignatureMismatch)
        );
    }

    #[test]
    fn enumerate_copies_examples() {
        let copies = enumerate_copies(&FinStructure::chain(2), &FinStructure::chain(4));
        assert_eq!(copies.len(), 6);
        assert!(copies.windows(2).all(|w| w[0] < w[1]));
        assert!(enumerate_copies(&FinStructure::chain(3), &FinStructure::chain(2)).is_empty());
        let tri = enumerate_copies(&FinStructure::clique(3), &FinStructure::clique(4));
        assert_eq!(tri.len(), 4);
    }

    #[test]
    fn theta_examples() {
        let c2 = FinStructure::chain(2);
        let c3 = FinStructure::chain(3);
        assert!(theta_check(&c2, &c3, &[0, 2]).unwrap());
        assert!(!theta_check(&c2, &c3, &[2, 0]).unwrap());
        let edge = FinStructure::clique(2);
        assert!(!theta_check(&edge, &path3(), &[0, 2]).unwrap());
        assert!(theta_check(&c2, &c3, &[0]).is_err());
    }

    #[test]
    fn age_examples() {
        assert_eq!(age(&FinStructure::chain(3), 3).unwrap().len(), 3);
        let empty5 = FinStructure::empty(Signature::graph(), 5).unwrap();
        assert_eq!(age(&empty5, 2).unwrap().len(), 2);
        let codes = age(&path3(), 2).unwrap();
        assert_eq!(codes.len(), 3);
        let point = FinStructure::empty(Signature::graph(), 1).unwrap();
        assert!(codes.contains(&canonical_code(&point)));
        assert!(age(&path3(), 0).is_err());
    }

    #[test]
    fn copies_are_isomorphic_to_pattern() {
        let g = FinStructure::graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)]).unwrap();
        let p = path3();
        for c in enumerate_copies(&p, &g) {
            assert!(are_isomorphic(&induced_substructure(&g, &c).unwrap(), &p));
        }
    }
}
