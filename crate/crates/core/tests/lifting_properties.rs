use facetlift::lifting::{compatibility_holds, lift2, lift2_expression, lift3, lift3_expression};
use facetlift::polytope::{enumerate_facets_brute, tightness};
use facetlift::{BellExpression, DeterministicStrategy, Rational, Scenario};
use proptest::prelude::*;

fn facets(settings: &[usize]) -> Vec<BellExpression> {
    enumerate_facets_brute(&Scenario::new(settings.to_vec()).unwrap()).unwrap()
}

fn random_expression(sc: Scenario) -> impl Strategy<Value = BellExpression> {
    prop::collection::vec(-3i64..=3, sc.dimension()).prop_map(move |cs| {
        BellExpression::from_coefficients(
            sc.clone(),
            cs.into_iter().map(|c| Rational::new(c.into(), 2.into())).collect(),
        )
        .unwrap()
    })
}

/// Prepends the new party's outcomes to a strategy of the old parties.
fn with_new_party(outcomes: &[i8], rest: &DeterministicStrategy) -> DeterministicStrategy {
    let mut all = vec![outcomes.to_vec()];
    all.extend(rest.outcomes().iter().cloned());
    DeterministicStrategy::new(all).unwrap()
}

#[test]
fn lift2_of_facet_pairs_in_f23_is_tight() {
    let fs = facets(&[2, 3]);
    assert!(!fs.is_empty());
    for f in &fs {
        for g in &fs {
            let (_, diag) = lift2(f, g).unwrap();
            assert_eq!(diag.inputs_tight, vec![true, true]);
            assert!(diag.output_tight);
        }
    }
}

#[test]
fn lift3_sufficiency_on_f22_triples() {
    let fs = facets(&[2, 2]);
    let mut compatible = 0;
    for a in &fs {
        for b in &fs {
            for c in &fs {
                let (ok, witness) = compatibility_holds(a, b, c).unwrap();
                assert_eq!(ok, witness.is_none());
                if ok {
                    compatible += 1;
                    let out = lift3_expression(a, b, c).unwrap();
                    assert!(tightness(&out).unwrap().is_tight);
                }
            }
        }
    }
    assert!(compatible > 0);
}

#[test]
fn degenerate_lift3_choices_leave_a_setting_unused() {
    let fs = facets(&[2, 2]);
    let (i, j) = (&fs[0], &fs[5]);
    let zero = |e: &BellExpression, k: usize| e.block(k).unwrap().is_zero();
    assert!(zero(&lift3_expression(i, i, j).unwrap(), 1));
    assert!(zero(&lift3_expression(i, j, i).unwrap(), 2));
    assert!(zero(&lift3_expression(i, j, &-j).unwrap(), 0));
    assert!(zero(&lift2_expression(j, j).unwrap(), 1));
}

#[test]
fn failed_compatibility_is_reported_with_witness() {
    let sc = Scenario::new(vec![2, 2]).unwrap();
    let e = |t: &[usize]| BellExpression::delta(sc.clone(), t).unwrap();
    let (i0, i2, i3) = (e(&[0, 0]), e(&[0, 1]), e(&[1, 0]));
    let (_, diag) = lift3(&i0, &i2, &i3).unwrap();
    assert_eq!(diag.compatibility_valid, Some(false));
    let w = diag.compatibility_witness.unwrap();
    let i1 = i2.try_add(&i3).unwrap().try_sub(&i0).unwrap();
    assert_eq!(i1.evaluate(&w).unwrap(), Rational::from_integer(3.into()));
}

fn triple() -> impl Strategy<Value = (BellExpression, BellExpression, BellExpression, u128)> {
    let sc = Scenario::new(vec![2, 3]).unwrap();
    (
        random_expression(sc.clone()),
        random_expression(sc.clone()),
        random_expression(sc),
        0u128..32,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lift3_restricts_to_its_inputs((i0, i2, i3, idx) in triple()) {
        let out = lift3_expression(&i0, &i2, &i3).unwrap();
        let rest = DeterministicStrategy::from_index(i0.scenario(), idx);
        let i1 = i2.try_add(&i3).unwrap().try_sub(&i0).unwrap();
        let v = |a: &[i8]| out.evaluate(&with_new_party(a, &rest)).unwrap();
        prop_assert_eq!(v(&[1, 1, 1]), i0.evaluate(&rest).unwrap());
        prop_assert_eq!(v(&[1, -1, 1]), i2.evaluate(&rest).unwrap());
        prop_assert_eq!(v(&[1, 1, -1]), i3.evaluate(&rest).unwrap());
        prop_assert_eq!(v(&[1, -1, -1]), i1.evaluate(&rest).unwrap());
    }

    #[test]
    fn lift2_restricts_to_its_inputs((ip, im, _, idx) in triple()) {
        let out = lift2_expression(&ip, &im).unwrap();
        let rest = DeterministicStrategy::from_index(ip.scenario(), idx);
        prop_assert_eq!(out.evaluate(&with_new_party(&[1, 1], &rest)).unwrap(), ip.evaluate(&rest).unwrap());
        prop_assert_eq!(out.evaluate(&with_new_party(&[1, -1], &rest)).unwrap(), im.evaluate(&rest).unwrap());
    }

    #[test]
    fn lift2_output_tight_iff_both_inputs_tight(
        picks in (0usize..24, 0usize..24, 0usize..4, 0usize..4)
    ) {
        // each input is a facet, a facet midpoint, a shrunk facet or a facet
        let fs = facets(&[2, 2]);
        let variant = |i: usize, kind: usize| -> BellExpression {
            let f = &fs[i % fs.len()];
            match kind {
                0 => f.try_add(&fs[(i + 3) % fs.len()]).unwrap().scaled(&Rational::new(1.into(), 2.into())),
                1 => f.scaled(&Rational::new(1.into(), 2.into())),
                _ => f.clone(),
            }
        };
        let a = variant(picks.0, picks.2);
        let b = variant(picks.1, picks.3);
        let (_, diag) = lift2(&a, &b).unwrap();
        prop_assert_eq!(diag.output_tight, diag.inputs_tight[0] && diag.inputs_tight[1]);
    }
}
