use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;
use ramsey_core::arrow::arrow_check;
use ramsey_core::structure::{
    canonical_code, qf_eval, Assignment, CofinalChainRule, FinStructure, Formula, Signature,
    SubsetCopy,
};
use ramsey_core::ultra::*;
use ramsey_core::Error;

fn lt(a: usize, b: usize) -> Formula {
    Formula::rel(0, vec![a, b])
}

fn direct_truth(seq: &StructureSequence, phi: &Formula, elems: &[UltraElement], t: usize) -> bool {
    let m = seq.member(t).unwrap();
    let mut asg = Assignment::new();
    for v in phi.free_vars() {
        match elems[v].value_at(t, m.size()) {
            Some(x) => {
                asg.set(v, Some(x));
            }
            None => return false,
        }
    }
    qf_eval(&m, phi, &asg, None).unwrap()
}

#[test]
fn sentence_examples() {
    let seq = StructureSequence::chain(1, 1);
    let pair = Formula::exists(vec![0, 1], lt(0, 1));
    let out = los_eval(&seq, &pair, &[], 20).unwrap();
    assert_eq!(out.verdict, FrechetVerdict::HoldsCofinitely { threshold: 1 });
    assert!(!out.bitmap[0] && out.bitmap[1..].iter().all(|&b| b));

    let irreflexive = Formula::not(Formula::exists(vec![0], lt(0, 0)));
    let out = los_eval(&seq, &irreflexive, &[], 20).unwrap();
    assert_eq!(out.verdict, FrechetVerdict::HoldsCofinitely { threshold: 0 });

    let negated = los_eval(&seq, &Formula::not(pair.clone()), &[], 20).unwrap();
    assert_eq!(negated.verdict, FrechetVerdict::FailsCofinitely { threshold: 1 });
}

#[test]
fn custom_parity_is_undecided() {
    let seq = StructureSequence::new(
        Signature::order(),
        vec![],
        TailRule::custom("parity", |t| Ok(FinStructure::chain(1 + t % 2))),
    )
    .unwrap();
    let pair = Formula::exists(vec![0, 1], lt(0, 1));
    let out = los_eval(&seq, &pair, &[], 10).unwrap();
    assert_eq!(out.verdict, FrechetVerdict::Undecided);
    assert_eq!(out.bitmap_string(), "0101010101");
}

#[test]
fn argument_errors() {
    let seq = StructureSequence::new(
        Signature::order(),
        vec![FinStructure::chain(1), FinStructure::chain(2)],
        TailRule::Chain { a: 1, b: 1 },
    )
    .unwrap();
    let pair = Formula::exists(vec![0, 1], lt(0, 1));
    assert_eq!(
        los_eval(&seq, &pair, &[], 1).unwrap_err(),
        Error::HorizonBelowPrefix { horizon: 1, prefix: 2 }
    );
    let colored = Formula::ColorIs { args: vec![0], color: 0 };
    assert_eq!(
        los_eval(&seq, &colored, &[UltraElement::constant(0)], 5).unwrap_err(),
        Error::MissingColorOracle
    );
    assert_eq!(
        los_eval(&seq, &lt(0, 1), &[UltraElement::constant(0)], 5).unwrap_err(),
        Error::UnboundVariable(1)
    );
}

#[test]
fn threshold_beyond_horizon_is_undecided() {
    let seq = StructureSequence::chain(1, 1);
    let big = Formula::Embeds(Arc::new(FinStructure::chain(30)));
    let out = los_eval(&seq, &big, &[], 10).unwrap();
    assert_eq!(out.verdict, FrechetVerdict::Undecided);
    let out = los_eval(&seq, &big, &[], 40).unwrap();
    assert_eq!(out.verdict, FrechetVerdict::HoldsCofinitely { threshold: 29 });
}

#[test]
fn copy_definedness() {
    let seq = StructureSequence::chain(1, 1);
    let a = FinStructure::chain(2);
    let scaled = [UltraElement::scaled(1, 3).unwrap(), UltraElement::scaled(2, 3).unwrap()];
    let out = copy_defined(&scaled, &a, &seq, 30).unwrap();
    let first = (0..30).find(|t| t / 3 != 2 * t / 3).unwrap();
    assert_eq!(out.verdict, FrechetVerdict::HoldsCofinitely { threshold: first });

    let same = [UltraElement::constant(1), UltraElement::constant(1)];
    assert!(copy_defined(&same, &a, &seq, 30).unwrap().verdict.fails());
    assert!(matches!(
        copy_defined(&same[..1], &a, &seq, 30),
        Err(Error::LengthMismatch { .. })
    ));
}

#[test]
fn age_union_examples() {
    let seq = StructureSequence::chain(1, 1);
    let three = canonical_code(&FinStructure::chain(3));
    let loop_ = FinStructure::new(Signature::order(), 1, vec![vec![vec![0, 0]]]).unwrap();
    let out = age_union_check(&seq, &[three, canonical_code(&loop_)], 20).unwrap();
    assert_eq!(out[0].1.verdict, FrechetVerdict::HoldsCofinitely { threshold: 2 });
    assert_eq!(out[1].1.verdict, FrechetVerdict::FailsCofinitely { threshold: 0 });
}

#[test]
fn cofinal_chain_sentences() {
    let seq = StructureSequence::new(
        Signature::graph(),
        vec![FinStructure::clique(4)],
        TailRule::CofinalChain(Arc::new(CofinalChainRule::cliques())),
    )
    .unwrap();
    let k3 = Formula::Embeds(Arc::new(FinStructure::clique(3)));
    let out = los_eval(&seq, &k3, &[], 12).unwrap();
    assert!(out.verdict.holds());
    let no_edge = Formula::exists(
        vec![0, 1],
        Formula::And(vec![
            Formula::not(Formula::Eq(0, 1)),
            Formula::not(Formula::rel(0, vec![0, 1])),
        ]),
    );
    let out = los_eval(&seq, &no_edge, &[], 12).unwrap();
    assert_eq!(out.verdict, FrechetVerdict::Undecided);
    let both = Formula::And(vec![k3, Formula::not(no_edge)]);
    assert_eq!(los_eval(&seq, &both, &[], 12).unwrap().verdict, FrechetVerdict::Undecided);
}

#[test]
fn internal_colors() {
    let seq = StructureSequence::chain(1, 1);
    let a = FinStructure::chain(2);
    let elems = [UltraElement::constant(0), UltraElement::constant(3)];
    let cols = PerCoordColorings::new(a.clone(), 3, ColoringRule::Constant(2))
        .unwrap()
        .with_excluded([5, 9])
        .with_override(
            12,
            CoordOverride {
                default: Some(0),
                ..Default::default()
            },
        )
        .unwrap();
    assert_eq!(
        internal_color(&cols, &elems, &seq, 30).unwrap(),
        InternalColor::Certified { color: 2, threshold: 13 }
    );
    let parity = PerCoordColorings::new(a.clone(), 2, ColoringRule::Parity).unwrap();
    assert!(matches!(
        internal_color(&parity, &elems, &seq, 30).unwrap(),
        InternalColor::Undecided { .. }
    ));
    let collapsed = [UltraElement::constant(1), UltraElement::constant(1)];
    assert_eq!(
        internal_color(&cols, &collapsed, &seq, 30).unwrap_err(),
        Error::CopyUndefined
    );
    assert!(PerCoordColorings::new(a, 2, ColoringRule::Constant(2)).is_err());
}

#[test]
fn devlin_coloring_of_chains() {
    let seq = StructureSequence::chain(1, 1);
    let a = FinStructure::chain(2);
    let cols = PerCoordColorings::new(a, 2, ColoringRule::ByDevlin { n: 2 }).unwrap();
    let m = seq.member(10).unwrap();
    let mut seen = BTreeSet::new();
    for i in 0..11 {
        for j in i + 1..11 {
            let copy = SubsetCopy::new(vec![i, j], 11).unwrap();
            seen.insert(cols.color_at(10, &m, &copy).unwrap().unwrap());
        }
    }
    assert_eq!(seen, BTreeSet::from([0, 1]));
    assert!(PerCoordColorings::new(FinStructure::chain(2), 1, ColoringRule::ByDevlin { n: 2 }).is_err());
}

#[test]
fn trending_conditions() {
    let report = is_trending(&StructureSequence::chain(1, 1), 10).unwrap();
    assert_eq!(report.verdict(), Truth::Holds);
    let bounded = is_trending(&StructureSequence::chain(0, 3), 10).unwrap();
    assert_eq!(bounded.sizes_unbounded, Truth::Fails);
    let shrinking = StructureSequence::new(
        Signature::order(),
        vec![FinStructure::chain(5)],
        TailRule::Chain { a: 1, b: 1 },
    )
    .unwrap();
    let report = is_trending(&shrinking, 10).unwrap();
    assert_eq!(report.sizes_monotone, Truth::Fails);
    assert_eq!(report.eventually_embeds, Truth::Holds);
    let cofinal = StructureSequence::new(
        Signature::order(),
        vec![],
        TailRule::CofinalChain(Arc::new(CofinalChainRule::chains())),
    )
    .unwrap();
    assert_eq!(is_trending(&cofinal, 8).unwrap().verdict(), Truth::Holds);
}

#[test]
fn select_s_examples() {
    let c3 = FinStructure::chain(3);
    let a = FinStructure::chain(2);
    let rainbow = |c: &SubsetCopy| Some(c.elements()[0] + c.elements()[1] - 1);
    assert_eq!(select_s(&c3, &c3, &a, rainbow, 3, 1).unwrap(), None);
    assert_eq!(
        select_s(&c3, &c3, &a, rainbow, 3, 3).unwrap(),
        Some(BTreeSet::from([0, 1, 2]))
    );
    assert_eq!(
        select_s(&c3, &c3, &a, |_| Some(1), 2, 1).unwrap(),
        Some(BTreeSet::from([1]))
    );
    assert!(select_s(&c3, &c3, &a, |_| Some(1), 2, 0).is_err());
    assert!(phi_bs_eval(&c3, &c3, &a, rainbow, &BTreeSet::from([0, 1, 2])).unwrap());
}

#[test]
fn transfer_shadow_on_chains() {
    let seq = StructureSequence::chain(1, 1);
    let a = FinStructure::chain(2);
    let b = FinStructure::chain(3);
    let c5 = FinStructure::chain(5);
    let bad = arrow_check(&c5, &b, &a, 2, 1).unwrap();
    let witness = bad.witness().unwrap().clone();
    let rule = ColoringRule::Custom {
        name: "ramsey-bad".into(),
        color: Arc::new(move |t, _m, copy| {
            let e = copy.elements();
            if t <= 4 {
                witness.color_of(copy).unwrap()
            } else {
                (e[0] + e[1]) % 2
            }
        }),
    };
    let cols = PerCoordColorings::new(a.clone(), 2, rule).unwrap();
    let report = transfer_shadow(&seq, &cols, &b, 1, 16).unwrap();
    assert_eq!(report.exists_from, Some(5));
    assert!(report.selected[4].is_none());
    assert_eq!(report.window, (5, 16));

    let constant = PerCoordColorings::new(a.clone(), 2, ColoringRule::Constant(1)).unwrap();
    let report = transfer_shadow(&seq, &constant, &b, 1, 12).unwrap();
    assert_eq!(report.s0, Some(BTreeSet::from([1])));
    assert_eq!(report.recurrence, report.window.1 - report.window.0);

    let full = transfer_shadow(&seq, &constant, &b, 2, 12).unwrap();
    assert_eq!(full.exists_from, Some(2));

    let bounded = StructureSequence::chain(0, 4);
    assert!(matches!(
        transfer_shadow(&bounded, &constant, &b, 1, 12),
        Err(Error::NotTrending(_))
    ));
}

fn coord_rule() -> impl Strategy<Value = CoordRule> {
    prop_oneof![
        (0usize..6).prop_map(CoordRule::ConstIndex),
        Just(CoordRule::Min),
        Just(CoordRule::Max),
        (0usize..5, 1usize..4).prop_map(|(p, q)| CoordRule::Scaled { p, q }),
    ]
}

fn element() -> impl Strategy<Value = UltraElement> {
    (prop::collection::vec(0usize..5, 0..3), coord_rule())
        .prop_map(|(prefix, rule)| UltraElement::new(prefix, rule).unwrap())
}

fn atom(vars: usize) -> impl Strategy<Value = Formula> {
    prop_oneof![
        (0..vars, 0..vars).prop_map(|(a, b)| lt(a, b)),
        (0..vars, 0..vars).prop_map(|(a, b)| Formula::Eq(a, b)),
    ]
}

fn qf(vars: usize) -> impl Strategy<Value = Formula> {
    atom(vars).prop_recursive(2, 8, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            prop::collection::vec(inner.clone(), 1..3).prop_map(Formula::And),
            prop::collection::vec(inner, 1..3).prop_map(Formula::Or),
        ]
    })
}

/// Free variables 0..2, quantified variables 3 and 4.
fn formula() -> impl Strategy<Value = Formula> {
    prop_oneof![
        qf(3),
        qf(4).prop_map(|body| Formula::exists(vec![3], body)),
        qf(5).prop_map(|body| Formula::not(Formula::exists(vec![3, 4], body))),
        (qf(3), qf(5)).prop_map(|(a, body)| Formula::And(vec![a, Formula::exists(vec![3, 4], body)])),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn certified_chain_verdicts_match_far_coordinates(
        a in 0usize..3,
        b in 1usize..4,
        elems in prop::collection::vec(element(), 3),
        phi in formula(),
    ) {
        let seq = StructureSequence::chain(a, b);
        let out = los_eval(&seq, &phi, &elems, 40).unwrap();
        for (t, &bit) in out.bitmap.iter().enumerate() {
            prop_assert_eq!(bit, direct_truth(&seq, &phi, &elems, t));
        }
        if let Some(threshold) = out.verdict.threshold() {
            let value = out.verdict.holds();
            for t in threshold..100 {
                prop_assert_eq!(direct_truth(&seq, &phi, &elems, t), value, "t = {}", t);
            }
        }
        let neg = los_eval(&seq, &Formula::not(phi.clone()), &elems, 40).unwrap();
        let size = seq.size(100).unwrap();
        if phi.free_vars().iter().all(|&v| elems[v].value_at(100, size).is_some()) {
            prop_assert_eq!(neg.verdict.holds(), out.verdict.fails());
            prop_assert_eq!(neg.verdict.fails(), out.verdict.holds());
        }
    }

    #[test]
    fn constant_colorings_are_recovered(
        k in 1usize..4,
        color in 0usize..4,
        excluded in prop::collection::btree_set(0usize..15, 0..4),
        over_t in prop::collection::vec(0usize..15, 0..3),
        far in 4usize..8,
    ) {
        let color = color % k;
        let seq = StructureSequence::chain(1, 1);
        let mut cols = PerCoordColorings::new(FinStructure::chain(2), k, ColoringRule::Constant(color))
            .unwrap()
            .with_excluded(excluded);
        for t in over_t {
            cols = cols
                .with_override(t, CoordOverride { default: Some((color + 1) % k), ..Default::default() })
                .unwrap();
        }
        let elems = [UltraElement::constant(1), UltraElement::constant(far)];
        match internal_color(&cols, &elems, &seq, 30).unwrap() {
            InternalColor::Certified { color: c, .. } => prop_assert_eq!(c, color),
            other => prop_assert!(false, "not certified: {:?}", other),
        }
    }
}

#[test]
fn diverging_coordinates_are_certified() {
    let seq = StructureSequence::chain(2, 1);
    let elems = [UltraElement::scaled(1, 2).unwrap(), UltraElement::scaled(3, 2).unwrap()];
    let between = Formula::exists(vec![2, 3], Formula::And(vec![lt(0, 2), lt(2, 3), lt(3, 1)]));
    let out = los_eval(&seq, &between, &elems, 30).unwrap();
    let first = (0..30).find(|&t| 3 * t / 2 - t / 2 >= 3).unwrap();
    assert_eq!(out.verdict, FrechetVerdict::HoldsCofinitely { threshold: first });
    let top = [UltraElement::new(vec![], CoordRule::Max).unwrap()];
    let above = Formula::exists(vec![1], lt(0, 1));
    assert_eq!(
        los_eval(&seq, &above, &top, 30).unwrap().verdict,
        FrechetVerdict::FailsCofinitely { threshold: 0 }
    );
}
