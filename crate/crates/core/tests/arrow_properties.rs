use proptest::prelude::*;
use ramsey_core::arrow::{arrow_check, arrow_check_parallel, chromatic_count, ArrowOutcome};
use ramsey_core::structure::{enumerate_copies, induced_substructure, FinStructure, SubsetCopy};

fn graph_from_mask(n: usize, mask: u32) -> FinStructure {
    let mut edges = Vec::new();
    let mut bit = 0;
    for i in 0..n {
        for j in i + 1..n {
            if mask >> bit & 1 == 1 {
                edges.push((i, j));
            }
            bit += 1;
        }
    }
    FinStructure::graph(n, &edges).unwrap()
}

/// Tries every k-coloring of the A-copies.
fn naive_holds(c: &FinStructure, b: &FinStructure, a: &FinStructure, k: usize, l: usize) -> bool {
    let a_copies = enumerate_copies(a, c);
    let b_copies = enumerate_copies(b, c);
    let inside: Vec<Vec<usize>> = b_copies
        .iter()
        .map(|bc| {
            (0..a_copies.len())
                .filter(|&i| a_copies[i].is_subset_of(bc))
                .collect()
        })
        .collect();
    let m = a_copies.len();
    let mut colors = vec![0usize; m];
    loop {
        let good = inside.iter().any(|idx| {
            let mut seen: Vec<usize> = idx.iter().map(|&i| colors[i]).collect();
            seen.sort_unstable();
            seen.dedup();
            seen.len() <= l
        });
        if !good {
            return false;
        }
        let mut pos = 0;
        loop {
            if pos == m {
                return true;
            }
            colors[pos] += 1;
            if colors[pos] < k {
                break;
            }
            colors[pos] = 0;
            pos += 1;
        }
    }
}

fn pattern() -> impl Strategy<Value = FinStructure> {
    prop_oneof![
        Just(graph_from_mask(1, 0)),
        Just(graph_from_mask(2, 1)),
        Just(graph_from_mask(2, 0)),
    ]
}

fn instance() -> impl Strategy<Value = (FinStructure, FinStructure, FinStructure, usize, usize)> {
    (pattern(), 2usize..=3, 0u32..8, 4usize..=6, any::<u32>(), 1usize..=3, 1usize..=2).prop_map(
        |(a, bn, bmask, cn, cmask, k, l)| {
            let b = graph_from_mask(bn.max(a.size()), bmask);
            let c = graph_from_mask(cn, cmask);
            (c, b, a, k, l)
        },
    )
}

fn small_enough(c: &FinStructure, a: &FinStructure, k: usize) -> bool {
    let m = enumerate_copies(a, c).len();
    m <= 12 && (k as f64).powi(m as i32) <= 300_000.0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn matches_naive_oracle((c, b, a, k, l) in instance()) {
        prop_assume!(small_enough(&c, &a, k));
        let v = arrow_check(&c, &b, &a, k, l).unwrap();
        let no_b = enumerate_copies(&b, &c).is_empty();
        prop_assert_eq!(v.holds(), !no_b && naive_holds(&c, &b, &a, k, l));
    }

    #[test]
    fn witnesses_are_sound((c, b, a, k, l) in instance()) {
        let v = arrow_check(&c, &b, &a, k, l).unwrap();
        if let ArrowOutcome::Fails { witness, no_big_copy } = &v.outcome {
            let b_copies = enumerate_copies(&b, &c);
            prop_assert_eq!(*no_big_copy, b_copies.is_empty());
            let a_copies = enumerate_copies(&a, &c);
            prop_assert_eq!(witness.copies(), a_copies.as_slice());
            for bc in &b_copies {
                prop_assert!(chromatic_count(witness, &c, &b, bc).unwrap() > l);
            }
        }
    }

    #[test]
    fn monotone_in_l_and_antitone_in_k((c, b, a, k, l) in instance()) {
        if arrow_check(&c, &b, &a, k, l).unwrap().holds() {
            prop_assert!(arrow_check(&c, &b, &a, k, l + 1).unwrap().holds());
            for k2 in 1..k {
                prop_assert!(arrow_check(&c, &b, &a, k2, l).unwrap().holds());
            }
        }
    }

    #[test]
    fn ambient_monotone((c2, b, a, k, l) in instance()) {
        let sub = SubsetCopy::new((0..c2.size() - 1).collect(), c2.size()).unwrap();
        let c = induced_substructure(&c2, &sub).unwrap();
        if arrow_check(&c, &b, &a, k, l).unwrap().holds() {
            prop_assert!(arrow_check(&c2, &b, &a, k, l).unwrap().holds());
        }
    }

    #[test]
    fn isomorphism_invariant(
        (c, b, a, k, l) in instance(),
        seed in any::<u64>(),
    ) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut pc: Vec<usize> = (0..c.size()).collect();
        pc.shuffle(&mut rng);
        let mut pb: Vec<usize> = (0..b.size()).collect();
        pb.shuffle(&mut rng);
        let c2 = c.relabel(&pc).unwrap();
        let b2 = b.relabel(&pb).unwrap();
        prop_assert_eq!(
            arrow_check(&c, &b, &a, k, l).unwrap().holds(),
            arrow_check(&c2, &b2, &a, k, l).unwrap().holds()
        );
    }

    #[test]
    fn parallel_agrees((c, b, a, k, l) in instance()) {
        prop_assert_eq!(
            arrow_check(&c, &b, &a, k, l).unwrap(),
            arrow_check_parallel(&c, &b, &a, k, l).unwrap()
        );
    }
}
