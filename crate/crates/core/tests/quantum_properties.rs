use facetlift::lifting::{four_party_19, lift2_expression, mabk, wbz333};
use facetlift::quantum::{
    bell_operator, correlation_tensor, eigh, make_state, seesaw_maximize, seesaw_trace, spectrum,
    sum_squared_correlations, CMatrix, MeasurementSettings, QuantumState, SeesawConfig, Triad,
};
use facetlift::{BellExpression, Rational, Scenario};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pauli(c: usize) -> CMatrix {
    let mut v = [0.0; 3];
    v[c] = 1.0;
    CMatrix::pauli_observable(v)
}

fn kron_all(ms: &[CMatrix]) -> CMatrix {
    ms[1..].iter().fold(ms[0].clone(), |acc, m| acc.kron(m))
}

/// Bell operator summed term by term from explicit Kronecker products.
fn operator_oracle(e: &BellExpression, s: &MeasurementSettings) -> CMatrix {
    let n = e.scenario().parties();
    let mut out = CMatrix::zeros(1 << n);
    for (t, c) in e.terms() {
        let factors: Vec<CMatrix> = (0..n)
            .map(|p| CMatrix::pauli_observable(s.directions()[p][t[p]]))
            .collect();
        let w = c.numer().to_string().parse::<f64>().unwrap() / c.denom().to_string().parse::<f64>().unwrap();
        out.add_scaled(w, &kron_all(&factors));
    }
    out
}

/// Eigenvalues of a Hermitian matrix via the real symmetric embedding
/// `[[Re, -Im], [Im, Re]]`, whose spectrum is the original one doubled.
fn eigenvalues_oracle(m: &CMatrix) -> Vec<f64> {
    let n = m.dim();
    let big = DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let z = m[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let mut vals: Vec<f64> = big.symmetric_eigen().eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    vals.into_iter().step_by(2).collect()
}

fn random_state(n: usize, rng: &mut ChaCha8Rng) -> QuantumState {
    let pure = QuantumState::random_pure(n, rng).unwrap();
    if rng.random_bool(0.5) {
        pure
    } else {
        let other = QuantumState::random_pure(n, rng).unwrap();
        let w = rng.random_range(0.0..1.0);
        QuantumState::mixture(&[(w, &pure), (1.0 - w, &other)]).unwrap()
    }
}

fn random_expression(settings: Vec<usize>, rng: &mut ChaCha8Rng) -> BellExpression {
    let sc = Scenario::new(settings).unwrap();
    let coeffs = (0..sc.dimension())
        .map(|_| Rational::new(rng.random_range(-4i64..=4).into(), 4.into()))
        .collect();
    BellExpression::from_coefficients(sc, coeffs).unwrap()
}

fn max_abs(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn negation_asymmetry(values: &[f64]) -> f64 {
    let neg: Vec<f64> = values.iter().rev().map(|v| -v).collect();
    max_abs(values, &neg)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn operator_matches_kronecker_oracle(seed in any::<u64>(), shape in prop::sample::select(vec![vec![2, 2], vec![3, 2], vec![2, 3, 1], vec![3, 3, 3]])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = random_expression(shape, &mut rng);
        let s = MeasurementSettings::random(e.scenario(), &mut rng);
        let op = bell_operator(&e, &s).unwrap();
        prop_assert!(op.max_abs_diff(&operator_oracle(&e, &s)) < 1e-12);
        prop_assert!(op.hermitian_defect() < 1e-12);
    }

    #[test]
    fn jacobi_matches_reference_eigensolver(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = random_expression(vec![3, 2, 3], &mut rng);
        let s = MeasurementSettings::random(e.scenario(), &mut rng);
        let op = bell_operator(&e, &s).unwrap();
        let sp = spectrum(&op).unwrap();
        prop_assert!(max_abs(&sp.eigenvalues, &eigenvalues_oracle(&op)) < 1e-8);
        prop_assert_eq!(sp.eigenvalues.len(), 8);
        prop_assert_eq!(sp.levels.iter().map(|l| l.multiplicity).sum::<usize>(), 8);
        let total: f64 = sp.eigenvalues.iter().sum();
        prop_assert!((total - op.trace().re).abs() < 1e-8);
    }

    #[test]
    fn correlations_match_direct_traces(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let state = random_state(3, &mut rng);
        let t = correlation_tensor(&state, None).unwrap();
        for idx in t.tensor().indices() {
            let p = kron_all(&idx.iter().map(|&c| pauli(c)).collect::<Vec<_>>());
            let direct = state.density().trace_product(&p).re;
            prop_assert!((t.get(&idx) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn sum_of_squares_is_invariant_under_local_rotations(seed in any::<u64>(), n in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let state = random_state(n, &mut rng);
        let bases: Vec<Triad> = (0..n).map(|_| Triad::random(&mut rng)).collect();
        let rotated = correlation_tensor(&state, Some(&bases)).unwrap().sum_squares();
        prop_assert!((rotated - sum_squared_correlations(&state)).abs() < 1e-9);
    }

    #[test]
    fn spectrum_is_symmetric_with_a_two_setting_party(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = wbz333();
        let lifted = lift2_expression(&b, &b.try_add(&random_expression(vec![3, 3, 3], &mut rng)).unwrap()).unwrap();
        for e in [mabk(3).unwrap(), mabk(4).unwrap(), lifted] {
            let s = MeasurementSettings::random(e.scenario(), &mut rng);
            let sp = spectrum(&bell_operator(&e, &s).unwrap()).unwrap();
            prop_assert!(negation_asymmetry(&sp.eigenvalues) < 1e-8);
        }
    }

    #[test]
    fn seesaw_sweeps_never_decrease(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = four_party_19();
        let state = random_state(4, &mut rng);
        let start = MeasurementSettings::random(e.scenario(), &mut rng);
        let (trace, _) = seesaw_trace(&e, &state, start, &SeesawConfig::default()).unwrap();
        for w in trace.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-12, "{} -> {}", w[0], w[1]);
        }
    }
}

#[test]
fn coplanar_settings_restore_spectrum_symmetry() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let e = four_party_19();
    for _ in 0..5 {
        let mut dirs: Vec<Vec<[f64; 3]>> = MeasurementSettings::random(e.scenario(), &mut rng)
            .directions()
            .to_vec();
        // one party measures in the x-y plane
        for v in dirs[2].iter_mut() {
            let r = (v[0] * v[0] + v[1] * v[1]).sqrt();
            *v = [v[0] / r, v[1] / r, 0.0];
        }
        let s = MeasurementSettings::new(dirs).unwrap();
        let sp = spectrum(&bell_operator(&e, &s).unwrap()).unwrap();
        assert!(negation_asymmetry(&sp.eigenvalues) < 1e-8);
    }
}

#[test]
fn three_setting_operators_need_not_have_symmetric_spectra() {
    // non-coplanar three-setting directions on every party break the symmetry
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let e = four_party_19();
    let worst = (0..5)
        .map(|_| {
            let s = MeasurementSettings::random(e.scenario(), &mut rng);
            negation_asymmetry(&spectrum(&bell_operator(&e, &s).unwrap()).unwrap().eigenvalues)
        })
        .fold(0.0, f64::max);
    assert!(worst > 1e-3, "{worst}");
}

#[test]
fn seesaw_is_bounded_by_the_operator_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let config = SeesawConfig {
        restarts: 6,
        ..SeesawConfig::default()
    };
    let e = four_party_19();
    for _ in 0..6 {
        let state = random_state(4, &mut rng);
        let r = seesaw_maximize(&e, &state, &config).unwrap();
        let op = bell_operator(&e, &r.settings).unwrap();
        let top = eigh(&op).unwrap().values[0];
        assert!(r.value <= top + 1e-8, "{} > {top}", r.value);
        let direct = state.expectation(&op).unwrap();
        assert!((direct - r.value).abs() < 1e-10);
    }
}

#[test]
fn product_states_admit_no_violation() {
    let e = four_party_19();
    let r = seesaw_maximize(&e, &make_state("product-zeros", &[4.0]).unwrap(), &SeesawConfig::default()).unwrap();
    assert!(r.value <= 1.0 + 1e-9, "{}", r.value);
}

#[test]
fn custom_amplitudes_are_normalized() {
    let s = QuantumState::from_amplitudes(&[Complex64::new(3.0, 0.0), Complex64::new(0.0, 4.0)]).unwrap();
    assert!((s.density()[(0, 0)].re - 0.36).abs() < 1e-15);
    assert!((s.purity() - 1.0).abs() < 1e-12);
}
