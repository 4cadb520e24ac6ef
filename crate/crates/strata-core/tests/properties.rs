//! Property tests over the seeded corpus: constructor laws, poset facts,
//! radial arithmetic, serialization round-trips.

use proptest::prelude::*;

use strata_core::corpus::{generate_corpus, CorpusSpec};
use strata_core::doc::{parse_space, serialize_space, SpaceDocument};
use strata_core::id::{ChartId, StratumId};
use strata_core::samples::LinkSample;
use strata_core::space::{cone_over, product_smooth, SmoothFactor};
use strata_core::tube::{
    canonical_tube_for_cone, radial_stretch, radium, separate_tubes, transition_point,
    TMStructure, TubePoint,
};
use strata_core::unbend::space_with_tubes;
use strata_core::validate::validate_pseudomanifold;

fn one_member(seed: u64) -> strata_core::space::PresentedSpace {
    generate_corpus(&CorpusSpec {
        seed,
        count: 1,
        ..CorpusSpec::default()
    })
    .remove(0)
    .space
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generated_spaces_satisfy_the_axioms(seed in any::<u64>()) {
        let space = one_member(seed);
        let report = validate_pseudomanifold(&space);
        prop_assert!(report.is_clean(), "{report}");
        let tm = separate_tubes(&space, &TMStructure::canonical(&space));
        let report = strata_core::tube::validate_tm(&space, &tm);
        prop_assert!(report.is_clean(), "{report}");
    }

    #[test]
    fn cone_and_product_length_laws(seed in any::<u64>()) {
        let space = one_member(seed);
        if space.compact {
            let cone = cone_over(&space).unwrap();
            prop_assert_eq!(cone.length(), space.length() + 1);
            prop_assert_eq!(cone.poset.len(), space.poset.len() + 1);
        }
        let product = product_smooth(&SmoothFactor::new("U", 2, false), &space);
        prop_assert_eq!(product.length(), space.length());
        prop_assert_eq!(product.dim, space.dim + 2);
    }

    #[test]
    fn closure_meets_incidence_neighborhood_in_the_stratum(seed in any::<u64>()) {
        let space = one_member(seed);
        for s in space.poset.ids() {
            let q = space.poset_query(s).unwrap();
            let both: Vec<_> = q.closure.intersection(&q.incidence_neighborhood).collect();
            prop_assert_eq!(both, vec![s]);
        }
    }

    #[test]
    fn classification_matches_the_poset(seed in any::<u64>()) {
        let space = one_member(seed);
        let cls = space.classify_strata();
        prop_assert_eq!(cls.minimal.clone(), space.poset.minima());
        prop_assert_eq!(cls.regular.clone(), space.poset.maxima());
        for s in &cls.singular {
            prop_assert!(!cls.regular.contains(s));
        }
        // minimal strata of positive-length components are singular
        for s in space.min_strata() {
            prop_assert!(cls.singular.contains(&s));
        }
    }

    #[test]
    fn iso_check_is_reflexive(seed in any::<u64>()) {
        let space = one_member(seed);
        prop_assert!(strata_core::iso::iso_check(&space, &space).is_some());
        // and never matches a space of different length
        if space.compact {
            let longer = cone_over(&space).unwrap();
            prop_assert!(strata_core::iso::iso_check(&space, &longer).is_none());
        }
    }

    #[test]
    fn radial_stretch_composes(l1 in 0.1f64..4.0, l2 in 0.1f64..4.0, r in 0.0f64..2.0) {
        let cone = strata_core::fixtures::cone_s1();
        let tube = canonical_tube_for_cone(&cone).unwrap();
        let point = TubePoint {
            chart: ChartId::new("c0"),
            u: vec![],
            link: LinkSample::new(StratumId::atom("S1"), 0),
            r,
        };
        let once = radial_stretch(&tube, l2, &radial_stretch(&tube, l1, &point).unwrap()).unwrap();
        let both = radial_stretch(&tube, l1 * l2, &point).unwrap();
        prop_assert!((once.r - both.r).abs() < 1e-12);
        prop_assert_eq!(radium(&tube, &once).unwrap(), once.r);
    }

    #[test]
    fn transitions_preserve_the_radium(r in 0.0f64..2.0, idx in 0u8..8) {
        let space = strata_core::fixtures::twisted_cone_z4();
        let tube = &space.tubes[&StratumId::vertex()];
        let point = TubePoint {
            chart: ChartId::new("c0"),
            u: vec![],
            link: LinkSample::new(StratumId::atom("S1"), idx),
            r,
        };
        let moved = transition_point(tube, &point, &ChartId::new("c1")).unwrap();
        prop_assert_eq!(moved.r, r);
        let back = transition_point(tube, &moved, &ChartId::new("c0")).unwrap();
        prop_assert_eq!(back.link, point.link);
    }

    #[test]
    fn documents_round_trip(seed in any::<u64>()) {
        let space = one_member(seed);
        let tm = separate_tubes(&space, &TMStructure::canonical(&space));
        let text = serialize_space(&space, &tm);
        let doc = parse_space(&text).unwrap();
        match &doc {
            SpaceDocument::Presented { space: parsed, .. } => {
                prop_assert_eq!(&space_with_tubes(&space, &tm), parsed);
            }
            _ => prop_assert!(false, "expected a presented document"),
        }
        let (space2, tm2) = doc.resolve().unwrap();
        prop_assert_eq!(serialize_space(&space2, &tm2), text);
    }
}

/// Independent oracle: the longest strict chain by exhaustive enumeration.
fn oracle_longest_chain(space: &strata_core::space::PresentedSpace) -> u32 {
    fn extend(
        space: &strata_core::space::PresentedSpace,
        last: &StratumId,
    ) -> u32 {
        space
            .poset
            .ids()
            .filter(|t| space.poset.lt(last, t))
            .map(|t| 1 + extend(space, t))
            .max()
            .unwrap_or(0)
    }
    space
        .poset
        .ids()
        .map(|s| extend(space, s))
        .max()
        .unwrap_or(0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn length_matches_the_enumeration_oracle(seed in any::<u64>()) {
        let space = one_member(seed);
        prop_assert_eq!(space.length(), oracle_longest_chain(&space));
        for s in space.poset.ids() {
            let direct = space.stratum_length(s).unwrap();
            let by_oracle = space
                .poset
                .ids()
                .filter(|t| space.poset.lt(s, t))
                .map(|t| 1 + space.stratum_length(t).unwrap())
                .max()
                .unwrap_or(0);
            prop_assert_eq!(direct, by_oracle);
        }
    }
}

#[test]
fn fixture_lengths_match_the_oracle() {
    // frozen expectations computed with the enumeration oracle
    let cases: [(strata_core::space::PresentedSpace, u32); 3] = [
        (strata_core::fixtures::smooth_m(), 0),
        (strata_core::fixtures::cone_s1(), 1),
        (strata_core::fixtures::cone_sigma(), 2),
    ];
    for (space, expected) in cases {
        assert_eq!(oracle_longest_chain(&space), expected);
        assert_eq!(space.length(), expected);
    }
}

#[test]
fn pushforward_round_trips_through_the_inverse() {
    use strata_core::morphism::{pushforward_tubes, StratMorphism};
    let sigma = strata_core::fixtures::sigma_s1();
    let tm = separate_tubes(&sigma, &TMStructure::canonical(&sigma));
    let mut swap = StratMorphism::identity(&sigma);
    swap.stratum_map
        .insert(StratumId::pole(true), StratumId::pole(false));
    swap.stratum_map
        .insert(StratumId::pole(false), StratumId::pole(true));
    let pushed = pushforward_tubes(&swap, &sigma, &sigma, &tm).unwrap();
    // the swap is its own inverse, so pushing twice restores the structure
    let back = pushforward_tubes(&swap, &sigma, &sigma, &pushed).unwrap();
    assert_eq!(back.tubes, tm.tubes);
    assert_eq!(back.families, tm.families);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn identity_lifts_to_the_identity_over_the_corpus(seed in any::<u64>()) {
        use strata_core::id::Sign;
        use strata_core::morphism::StratMorphism;
        use strata_core::unbend::{lift_morphism, unbend_space, ProcessingOrder};
        let space = one_member(seed);
        let tm = separate_tubes(&space, &TMStructure::canonical(&space));
        let result = unbend_space(&space, &tm, ProcessingOrder::Canonical).unwrap();
        let id = StratMorphism::identity(&space);
        let lifted = lift_morphism(
            &id,
            Sign::Plus,
            &result,
            &result,
            &strata_core::samples::GridSpec::default(),
        )
        .unwrap();
        for class in result.space().poset.ids() {
            prop_assert_eq!(&lifted.stratum_map[class], class);
        }
    }
}
