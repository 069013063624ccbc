use rand::Rng;

use super::node::Node;
use super::set::{antichain_x, meet_closure, TreeSet};
use super::w0::w0_node;

/// A random perfect subtree `V` of `W₀` with `levels` levels: each child
/// step follows the required direction and then, while the branch still has
/// some of its `skips` budget, occasionally drops one more `W₀` level.
pub fn random_w0_subtree<R: Rng + ?Sized>(rng: &mut R, levels: usize, skips: usize) -> TreeSet {
    let mut out = TreeSet::new();
    let mut layer = vec![(Node::root(), skips)];
    for level in 0..levels {
        let mut next = Vec::new();
        for (path, budget) in layer {
            out.insert(w0_node(&path));
            if level + 1 == levels {
                continue;
            }
            for d in [false, true] {
                let mut child = path.child(d);
                let mut budget = budget;
                if budget > 0 && rng.gen_bool(0.3) {
                    child.push(rng.gen_bool(0.5));
                    budget -= 1;
                }
                next.push((child, budget));
            }
        }
        layer = next;
    }
    out
}

/// `{v⌢01 : v ∈ V}` for a random perfect subtree `V` of `W₀`: a dense
/// sub-antichain of `X`.
pub fn random_dense_subcopy<R: Rng + ?Sized>(rng: &mut R, levels: usize, skips: usize) -> TreeSet {
    antichain_x(&random_w0_subtree(rng, levels, skips))
}

/// A random meet-closed tree below `2^{<height_bound}` that branches at
/// least `levels` times along every branch.
///
/// A skeleton of `2^levels − 1` nodes is laid out slot by slot, level by
/// level, at random heights at least 3 apart; each node extends its parent
/// by the required direction and then random bits. Up to `noise` random
/// extensions are added above every skeleton node before closing under
/// meets.
pub fn random_perfect_subtree<R: Rng + ?Sized>(
    rng: &mut R,
    height_bound: usize,
    levels: usize,
    noise: usize,
) -> Option<TreeSet> {
    let count = (1usize << levels) - 1;
    let room = height_bound.checked_sub(2 * count.saturating_sub(1))?;
    if room < count {
        return None;
    }
    let mut offsets = rand::seq::index::sample(rng, room, count).into_vec();
    offsets.sort_unstable();
    let heights: Vec<usize> = offsets.iter().enumerate().map(|(i, v)| v + 2 * i).collect();

    let random_bits = |rng: &mut R, n: usize| -> Vec<bool> { (0..n).map(|_| rng.gen_bool(0.5)).collect() };
    let mut skeleton: Vec<Node> = Vec::with_capacity(count);
    skeleton.push(Node::from_bits(random_bits(rng, heights[0])));
    for (slot, &h) in heights.iter().enumerate().skip(1) {
        let parent = &skeleton[(slot - 1) / 2];
        let d = slot % 2 == 0;
        let pad = h - parent.len() - 1;
        let node = parent.child(d).extend(random_bits(rng, pad));
        skeleton.push(node);
    }
    let mut nodes: Vec<Node> = skeleton.clone();
    for s in &skeleton {
        for _ in 0..rng.gen_range(0..=noise) {
            if s.len() + 1 >= height_bound {
                break;
            }
            let extra = rng.gen_range(1..height_bound - s.len());
            nodes.push(s.extend(random_bits(rng, extra)));
        }
    }
    meet_closure(&nodes).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn subcopies_are_antichains_in_x() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let y = random_dense_subcopy(&mut rng, 4, 2);
        assert_eq!(y.len(), 15);
        assert!(y.is_antichain());
    }

    #[test]
    fn perfect_subtrees_fit_their_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random_perfect_subtree(&mut rng, 64, 4, 3).unwrap();
        assert!(u.is_meet_closed());
        assert!(u.len() >= 15);
        assert!(u.max_height().unwrap() < 64);
        assert!(random_perfect_subtree(&mut rng, 40, 4, 0).is_none());
    }
}
