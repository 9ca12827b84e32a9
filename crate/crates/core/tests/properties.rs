//! Property-based invariants over randomly generated models and formulas.

use ctxprob::lang::{Formula, Model, PredicateId};
use ctxprob::measurement::{mean_conditional, MeasurementProcedure, MeasurementRegistry};
use ctxprob::muprob::MuContextualStructure;
use ctxprob::prob::{Event, FiniteProbabilitySpace};
use ctxprob::qstruct::{induced_preorder, StateProbabilityFamily};
use ctxprob::rational::{ratio, Rational};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;
use std::collections::BTreeSet;

const POINTS: usize = 6;

fn weights_strategy() -> impl Strategy<Value = Vec<Rational>> {
    proptest::collection::vec(0u32..50, POINTS).prop_map(|mut nums| {
        if nums.iter().all(|&x| x == 0) {
            nums[0] = 1;
        }
        let total: u32 = nums.iter().sum();
        nums.into_iter()
            .map(|k| Rational::new(BigInt::from(k), BigInt::from(total)))
            .collect()
    })
}

fn space_strategy() -> impl Strategy<Value = FiniteProbabilitySpace> {
    weights_strategy().prop_map(|ws| {
        FiniteProbabilitySpace::new(
            ws.into_iter()
                .enumerate()
                .map(|(i, w)| (format!("u{i}"), w))
                .collect(),
        )
        .unwrap()
    })
}

fn event_strategy() -> impl Strategy<Value = Event> {
    proptest::collection::btree_set(0..POINTS, 0..=POINTS).prop_map(Event::new)
}

prop_compose! {
    fn model_strategy()(exts in proptest::collection::vec(
        proptest::collection::btree_set(0..POINTS, 0..=POINTS), 4))
        -> Model
    {
        let labels: Vec<String> = (0..POINTS).map(|i| format!("u{i}")).collect();
        let mut model = Model::new(labels).unwrap();
        let preds = [
            PredicateId::state("s0"),
            PredicateId::state("s1"),
            PredicateId::property("E", "c1"),
            PredicateId::property("E", "c2"),
        ];
        for (pred, ext) in preds.into_iter().zip(exts) {
            model.insert_extension(pred, Event::new(ext)).unwrap();
        }
        model
    }
}

fn formula_strategy() -> impl Strategy<Value = Formula> {
    let atom = prop_oneof![
        Just(Formula::state("s0")),
        Just(Formula::state("s1")),
        Just(Formula::property("E", "c1")),
        Just(Formula::property("E", "c2")),
    ];
    atom.prop_recursive(6, 64, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.and(b)),
            (inner.clone(), inner).prop_map(|(a, b)| a.or(b)),
        ]
    })
}

proptest! {
    #[test]
    fn measure_is_additive_and_monotone(
        space in space_strategy(),
        a in event_strategy(),
        b in event_strategy(),
    ) {
        let pa = space.measure(&a).unwrap();
        let pb = space.measure(&b).unwrap();
        let union = space.measure(&a.union(&b)).unwrap();
        let meet = space.measure(&a.intersection(&b)).unwrap();
        // inclusion–exclusion, hence additivity on disjoint pairs
        prop_assert_eq!(union.clone() + meet, pa.clone() + pb.clone());
        if a.is_subset(&b) {
            prop_assert!(pa <= pb);
        }
        prop_assert!(union <= Rational::one());
    }

    #[test]
    fn conditional_with_fixed_event_is_a_measure(
        space in space_strategy(),
        a in event_strategy(),
        b in event_strategy(),
        given in event_strategy(),
    ) {
        prop_assume!(!space.measure(&given).unwrap().is_zero());
        let full = space.full_event();
        prop_assert!(space.conditional(&full, &given).unwrap().is_one());
        let pa = space.conditional(&a, &given).unwrap();
        let complement = space.conditional(&a.complement(space.len()), &given).unwrap();
        prop_assert_eq!(pa.clone() + complement, Rational::one());
        if a.is_disjoint(&b) {
            let pb = space.conditional(&b, &given).unwrap();
            let both = space.conditional(&a.union(&b), &given).unwrap();
            prop_assert_eq!(both, pa + pb);
        }
    }

    #[test]
    fn extension_is_a_boolean_homomorphism(
        model in model_strategy(),
        f in formula_strategy(),
        g in formula_strategy(),
    ) {
        let n = model.universe_len();
        let ef = model.extension(&f).unwrap();
        let eg = model.extension(&g).unwrap();
        prop_assert_eq!(model.extension(&f.clone().not()).unwrap(), ef.complement(n));
        prop_assert_eq!(model.extension(&f.clone().and(g.clone())).unwrap(), ef.intersection(&eg));
        prop_assert_eq!(model.extension(&f.clone().or(g.clone())).unwrap(), ef.union(&eg));
    }

    #[test]
    fn logical_preorder_is_reflexive_and_transitive(
        model in model_strategy(),
        f in formula_strategy(),
        g in formula_strategy(),
        h in formula_strategy(),
    ) {
        prop_assert!(model.logical_leq(&f, &f).unwrap());
        if model.logical_leq(&f, &g).unwrap() && model.logical_leq(&g, &h).unwrap() {
            prop_assert!(model.logical_leq(&f, &h).unwrap());
        }
        // conjunction weakening and disjunction introduction
        prop_assert!(model.logical_leq(&f.clone().and(g.clone()), &f).unwrap());
        prop_assert!(model.logical_leq(&f.clone(), &f.clone().or(g.clone())).unwrap());
    }

    #[test]
    fn printing_then_parsing_is_identity(f in formula_strategy()) {
        let printed = f.to_string();
        let reparsed: Formula = printed.parse().unwrap();
        prop_assert_eq!(reparsed, f);
    }

    #[test]
    fn mean_is_a_convex_combination_of_context_conditionals(
        model in model_strategy(),
        weights in weights_strategy(),
        w1 in 1u32..8,
    ) {
        // procedure over two contexts with nonuniform weights
        let xi = FiniteProbabilitySpace::new(
            weights.into_iter().enumerate().map(|(i, w)| (format!("u{i}"), w)).collect(),
        ).unwrap();
        let s = MuContextualStructure::new(model, xi).unwrap();
        let b = Formula::state("s0");
        prop_assume!(s.is_positive(&b).unwrap());

        let nu1 = Rational::new(BigInt::from(w1), BigInt::from(8));
        let nu2 = Rational::one() - nu1.clone();
        let contexts = FiniteProbabilitySpace::new(vec![
            ("c1".to_string(), nu1),
            ("c2".to_string(), nu2),
        ]).unwrap();
        let mut reg = MeasurementRegistry::new();
        reg.insert(
            MeasurementProcedure::new("M", [ctxprob::lang::PropertyId::new("E")], contexts)
                .unwrap(),
        ).unwrap();

        let a = Formula::property("E", "c1");
        let p1 = s.mu_conditional(&a, &b).unwrap();
        let p2 = s.mu_conditional(&Formula::property("E", "c2"), &b).unwrap();
        let mean = mean_conditional(&s, &reg, &a, &b, &"M".into()).unwrap();
        let lo = p1.clone().min(p2.clone());
        let hi = p1.max(p2);
        prop_assert!(lo <= mean && mean <= hi);
    }

    #[test]
    fn preorder_from_families_is_reflexive_and_transitive(
        rows in proptest::collection::vec(proptest::collection::vec(0u32..=4, 3), 2)
    ) {
        // two states, three properties, values on the 1/4 grid
        let mut family: StateProbabilityFamily<Rational> = StateProbabilityFamily::new();
        for (si, row) in rows.iter().enumerate() {
            for (pi, v) in row.iter().enumerate() {
                family.insert(
                    format!("s{si}").into(),
                    format!("e{pi}").into(),
                    ratio(i64::from(*v), 4),
                ).unwrap();
            }
        }
        let pre = induced_preorder(&family, &Rational::zero()).unwrap();
        prop_assert!(pre.is_reflexive());
        prop_assert!(pre.is_transitive());
        let classes = pre.equivalence_classes();
        let total: usize = classes.iter().map(Vec::len).sum();
        prop_assert_eq!(total, pre.properties.len());
    }

    #[test]
    fn state_only_means_ignore_the_procedure(
        model in model_strategy(),
        weights in weights_strategy(),
    ) {
        let xi = FiniteProbabilitySpace::new(
            weights.into_iter().enumerate().map(|(i, w)| (format!("u{i}"), w)).collect(),
        ).unwrap();
        let s = MuContextualStructure::new(model, xi).unwrap();
        let a = Formula::state("s1");
        let b = Formula::state("s0");
        prop_assume!(s.is_positive(&b).unwrap());

        let mut reg = MeasurementRegistry::new();
        for (id, ctxs) in [("M1", vec!["c1", "c2"]), ("M2", vec!["d1"])] {
            let contexts = FiniteProbabilitySpace::uniform(
                ctxs.into_iter().map(String::from).collect(),
            ).unwrap();
            reg.insert(
                MeasurementProcedure::new(id, [ctxprob::lang::PropertyId::new("E")], contexts)
                    .unwrap(),
            ).unwrap();
        }
        let m1 = mean_conditional(&s, &reg, &a, &b, &"M1".into()).unwrap();
        let m2 = mean_conditional(&s, &reg, &a, &b, &"M2".into()).unwrap();
        let direct = s.mu_conditional(&a, &b).unwrap();
        prop_assert_eq!(&m1, &direct);
        prop_assert_eq!(&m2, &direct);
    }
}

/// Context labels can be permuted (together with their weights and the
/// predicate extensions they index) without changing the mean.
#[test]
fn mean_is_invariant_under_context_relabeling() {
    let labels: Vec<String> = (0..4).map(|i| format!("u{i}")).collect();
    let build = |swap: bool| {
        let (c1, c2) = if swap { ("c2", "c1") } else { ("c1", "c2") };
        let mut model = Model::new(labels.clone()).unwrap();
        model
            .insert_extension(PredicateId::state("s0"), Event::new([0, 1]))
            .unwrap();
        model
            .insert_extension(PredicateId::property("E", c1), Event::new([0, 1]))
            .unwrap();
        model
            .insert_extension(PredicateId::property("E", c2), Event::new([2]))
            .unwrap();
        let xi = FiniteProbabilitySpace::uniform(labels.clone()).unwrap();
        let s = MuContextualStructure::new(model, xi).unwrap();
        let contexts = FiniteProbabilitySpace::new(vec![
            (c1.to_string(), ratio(1, 4)),
            (c2.to_string(), ratio(3, 4)),
        ])
        .unwrap();
        let mut reg = MeasurementRegistry::new();
        reg.insert(
            MeasurementProcedure::new("M", [ctxprob::lang::PropertyId::new("E")], contexts)
                .unwrap(),
        )
        .unwrap();
        let a = Formula::property("E", c1);
        let b = Formula::state("s0");
        mean_conditional(&s, &reg, &a, &b, &"M".into()).unwrap()
    };
    assert_eq!(build(false), build(true));
}

/// Lindenbaum quotients never have more classes than subsets of the
/// universe reachable from the atoms.
#[test]
fn lindenbaum_class_count_is_bounded() {
    let labels: Vec<String> = (0..4).map(|i| format!("u{i}")).collect();
    let mut model = Model::new(labels).unwrap();
    model
        .insert_extension(PredicateId::state("a"), Event::new([0, 1]))
        .unwrap();
    model
        .insert_extension(PredicateId::state("b"), Event::new([1, 2]))
        .unwrap();
    let a = Formula::state("a");
    let b = Formula::state("b");
    let mut formulas: Vec<Formula> = Vec::new();
    for f in [&a, &b] {
        for g in [&a, &b] {
            formulas.push(f.clone().and(g.clone()));
            formulas.push(f.clone().or(g.clone()));
            formulas.push(f.clone().and(g.clone()).not());
        }
    }
    let quotient = ctxprob::lang::lindenbaum_classes(&model, &formulas).unwrap();
    // two atoms over four points reach at most 16 extensions
    assert!(quotient.class_count() <= 16);
    // commutativity lands in one class
    let pair = ctxprob::lang::lindenbaum_classes(
        &model,
        &[a.clone().and(b.clone()), b.and(a)],
    )
    .unwrap();
    assert_eq!(pair.class_count(), 1);
}

/// Distinct procedure context sets are fine as long as the weighted means
/// agree; mismatched weights must be detected.
#[test]
fn disjoint_context_sets_compare_by_mean() {
    let labels: Vec<String> = (0..4).map(|i| format!("u{i}")).collect();
    let mut model = Model::new(labels.clone()).unwrap();
    model
        .insert_extension(PredicateId::state("s0"), Event::new([0, 1]))
        .unwrap();
    // M1's two contexts give conditionals 1 and 0; M2's single context 1/2
    model
        .insert_extension(PredicateId::property("E", "c1"), Event::new([0, 1]))
        .unwrap();
    model
        .insert_extension(PredicateId::property("E", "c2"), Event::new([3]))
        .unwrap();
    model
        .insert_extension(PredicateId::property("E", "d1"), Event::new([0, 2]))
        .unwrap();
    let xi = FiniteProbabilitySpace::uniform(labels).unwrap();
    let s = MuContextualStructure::new(model, xi).unwrap();

    let mut reg = MeasurementRegistry::new();
    reg.insert(
        MeasurementProcedure::new(
            "M1",
            [ctxprob::lang::PropertyId::new("E")],
            FiniteProbabilitySpace::uniform(vec!["c1".into(), "c2".into()]).unwrap(),
        )
        .unwrap(),
    )
    .unwrap();
    reg.insert(
        MeasurementProcedure::new(
            "M2",
            [ctxprob::lang::PropertyId::new("E")],
            FiniteProbabilitySpace::uniform(vec!["d1".into()]).unwrap(),
        )
        .unwrap(),
    )
    .unwrap();

    let a = Formula::property("E", "c1");
    let b = Formula::state("s0");
    let report = ctxprob::measurement::check_procedure_independence(
        &s,
        &reg,
        &a,
        &b,
        Rational::zero(),
    )
    .unwrap();
    assert!(report.pass(), "means: {:?}", report.means);
    assert_eq!(report.means.len(), 2);

    // the same comparison fails once M2's context stops matching the mean
    let mut model2 = Model::new(
        (0..4).map(|i| format!("u{i}")).collect::<Vec<_>>(),
    )
    .unwrap();
    model2
        .insert_extension(PredicateId::state("s0"), Event::new([0, 1]))
        .unwrap();
    model2
        .insert_extension(PredicateId::property("E", "c1"), Event::new([0, 1]))
        .unwrap();
    model2
        .insert_extension(PredicateId::property("E", "c2"), Event::new([3]))
        .unwrap();
    model2
        .insert_extension(PredicateId::property("E", "d1"), Event::new([0, 1]))
        .unwrap();
    let xi2 = FiniteProbabilitySpace::uniform(
        (0..4).map(|i| format!("u{i}")).collect::<Vec<_>>(),
    )
    .unwrap();
    let s2 = MuContextualStructure::new(model2, xi2).unwrap();
    let report2 = ctxprob::measurement::check_procedure_independence(
        &s2,
        &reg,
        &a,
        &b,
        Rational::zero(),
    )
    .unwrap();
    assert!(!report2.pass());
    assert_eq!(report2.max_deviation, ratio(1, 2));
}

/// Exercise a cross-check of the set of BTreeSet members flowing through
/// events: no duplicate indices survive construction.
#[test]
fn events_deduplicate_members() {
    let e = Event::new([3, 1, 3, 1, 2]);
    let members: BTreeSet<usize> = e.members().collect();
    assert_eq!(members.len(), e.len());
    assert_eq!(e.len(), 3);
}
