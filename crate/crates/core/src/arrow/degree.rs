use super::search::arrow_check;
use crate::error::Result;
use crate::structure::{ClassEnumerator, FinStructure};

/// Least `ℓ ≤ l_max` for which some member `C` of the class with
/// `|C| ≤ size_cap` satisfies `C → (B)^A_{k,ℓ}`, with the first such `C` in
/// enumeration order. This only bounds the small Ramsey degree.
pub fn degree_search(
    a: &FinStructure,
    class: &dyn ClassEnumerator,
    k: usize,
    b: &FinStructure,
    l_max: usize,
    size_cap: usize,
) -> Result<Option<(usize, FinStructure)>> {
    let top = size_cap.min(class.max_size());
    let members: Vec<FinStructure> = (b.size().max(1)..=top)
        .flat_map(|n| class.members_of_size(n))
        .collect();
    for l in 1..=l_max {
        for c in &members {
            if arrow_check(c, b, a, k, l)?.holds() {
                return Ok(Some((l, c.clone())));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::{are_isomorphic, Chains};

    #[test]
    fn ramsey_number_as_degree_bound() {
        let a = FinStructure::chain(2);
        let b = FinStructure::chain(3);
        let class = Chains::new(8);
        let (l, c) = degree_search(&a, &class, 2, &b, 2, 6).unwrap().unwrap();
        assert_eq!(l, 1);
        assert!(are_isomorphic(&c, &FinStructure::chain(6)));
        assert!(degree_search(&a, &class, 2, &b, 1, 5).unwrap().is_none());
    }

    #[test]
    fn point_has_degree_one() {
        let p = FinStructure::chain(1);
        let class = Chains::new(4);
        for k in 1..=4 {
            let (l, c) = degree_search(&p, &class, k, &p, 3, 4).unwrap().unwrap();
            assert_eq!(l, 1);
            assert_eq!(c.size(), 1);
        }
    }
}
