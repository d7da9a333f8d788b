//! Reproduction report: every published number this crate can recompute,
//! side by side with the computed value and the tolerance used to compare.

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_4, SQRT_2};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::lifting::{
    compatibility_holds, four_party_19, lift2_expression, mabk, symmetry_images, wbz333,
};
use crate::polytope::{enumerate_facets_brute, lr_max, strategy_count, tightness};
use crate::quantum::{
    bell_operator, contract_coefficients, correlation_tensor, eigh, generalized_ghz, make_state,
    mabk_critical_lambda, seesaw_maximize, seesaw_trace, spectrum, sum_squared_correlations,
    CMatrix, MeasurementSettings, QuantumState, SeesawConfig, SettingAngles, Triad,
};
use crate::scenario::{ratio, BellExpression, Rational, Scenario};

/// Number of acceptance criteria.
pub const CRITERIA: u8 = 13;

/// Published violation factors are quoted to three decimals.
pub const VIOLATION_TOLERANCE: f64 = 0.002;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub criterion: u8,
    pub quantity: String,
    pub reference: String,
    pub computed: String,
    pub tolerance: String,
    pub pass: bool,
}

impl ReportRow {
    fn exact(criterion: u8, quantity: &str, reference: impl fmt::Display, computed: impl fmt::Display, pass: bool) -> Self {
        Self {
            criterion,
            quantity: quantity.into(),
            reference: reference.to_string(),
            computed: computed.to_string(),
            tolerance: "exact".into(),
            pass,
        }
    }

    fn real(criterion: u8, quantity: &str, reference: f64, computed: f64, tol: f64) -> Self {
        Self {
            criterion,
            quantity: quantity.into(),
            reference: sig6(reference),
            computed: sig6(computed),
            tolerance: format!("±{}", sig6(tol)),
            pass: (computed - reference).abs() <= tol,
        }
    }

    /// One-sided comparison described by `relation`, e.g. `"<= 1 + 1e-6"`.
    fn bound(criterion: u8, quantity: &str, relation: &str, computed: f64, pass: bool) -> Self {
        Self {
            criterion,
            quantity: quantity.into(),
            reference: relation.into(),
            computed: sig6(computed),
            tolerance: "one-sided".into(),
            pass,
        }
    }

    fn error(criterion: u8, message: String) -> Self {
        Self {
            criterion,
            quantity: "evaluation".into(),
            reference: "no error".into(),
            computed: message,
            tolerance: "-".into(),
            pass: false,
        }
    }
}

impl fmt::Display for ReportRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{:>2}] {} {}: reference {}, computed {}, tolerance {}",
            self.criterion,
            if self.pass { "PASS" } else { "FAIL" },
            self.quantity,
            self.reference,
            self.computed,
            self.tolerance
        )
    }
}

/// Six significant digits.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    if (-4..=9).contains(&magnitude) {
        let decimals = (5 - magnitude).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.5e}")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub rows: Vec<ReportRow>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn criterion_passed(&self, criterion: u8) -> bool {
        self.rows.iter().filter(|r| r.criterion == criterion).all(|r| r.pass)
    }
}

fn chsh_explicit() -> BellExpression {
    let h = ratio(1, 2);
    BellExpression::from_terms(
        Scenario::new(vec![2, 2]).expect("valid scenario"),
        [
            (vec![0, 0], h.clone()),
            (vec![0, 1], h.clone()),
            (vec![1, 0], h.clone()),
            (vec![1, 1], -h),
        ],
    )
    .expect("in range")
}

fn one() -> Rational {
    Rational::from_integer(1.into())
}

/// See-saw optimum for `expr` on `state`, polished by extra sweeps that run
/// until the value stops increasing.
fn optimal_settings(
    expr: &BellExpression,
    state: &QuantumState,
    config: &SeesawConfig,
) -> Result<(f64, MeasurementSettings)> {
    let best = seesaw_maximize(expr, state, config)?;
    let polish = SeesawConfig {
        max_sweeps: 5000,
        tol: 0.0,
        ..config.clone()
    };
    let (trace, settings) = seesaw_trace(expr, state, best.settings, &polish)?;
    let value = trace.iter().copied().fold(best.value, f64::max);
    Ok((value, settings))
}

fn criterion_1() -> Result<Vec<ReportRow>> {
    let chsh = mabk(2)?;
    let lr = lr_max(&chsh)?;
    let t = tightness(&chsh)?;
    let single = Scenario::new(vec![2])?;
    let lifted = lift2_expression(
        &BellExpression::delta(single.clone(), &[0])?,
        &BellExpression::delta(single, &[1])?,
    )?;
    Ok(vec![
        ReportRow::exact(1, "lrMax(mabk(2))", 1, &lr, lr == one()),
        ReportRow::exact(1, "tightness rank of mabk(2) (D = 4)", 4, t.rank, t.rank == 4 && t.dimension == 4 && t.is_tight),
        ReportRow::exact(1, "lift2(delta0, delta1) equals the CHSH tensor", true, lifted == chsh_explicit(), lifted == chsh_explicit()),
    ])
}

fn criterion_2() -> Result<Vec<ReportRow>> {
    let facets = enumerate_facets_brute(&Scenario::new(vec![2, 2])?)?;
    let mut all_tight = true;
    for f in &facets {
        for g in &facets {
            all_tight &= tightness(&lift2_expression(f, g)?)?.is_tight;
        }
    }
    // valid but non-tight inputs: midpoints of distinct facets and shrunk facets
    let mut non_tight = Vec::new();
    for (i, f) in facets.iter().enumerate() {
        non_tight.push(f.scaled(&ratio(1, 2)));
        for g in &facets[i + 1..] {
            let mid = f.try_add(g)?.scaled(&ratio(1, 2));
            if !tightness(&mid)?.is_tight {
                non_tight.push(mid);
            }
        }
    }
    let mut never_tight = true;
    for n in &non_tight {
        for f in &facets {
            never_tight &= !tightness(&lift2_expression(n, f)?)?.is_tight;
            never_tight &= !tightness(&lift2_expression(f, n)?)?.is_tight;
        }
    }
    Ok(vec![
        ReportRow::exact(2, "F_22 facet count", 16, facets.len(), facets.len() == 16),
        ReportRow::exact(2, "lift2 of every F_22 facet pair is tight (256 pairs)", true, all_tight, all_tight),
        ReportRow::exact(
            2,
            &format!("lift2 with a non-tight input is never tight ({} inputs, both slots)", non_tight.len()),
            true,
            never_tight,
            never_tight,
        ),
    ])
}

fn criterion_3(config: &SeesawConfig) -> Result<Vec<ReportRow>> {
    let mut rows = Vec::new();
    for n in 2..=4usize {
        let e = mabk(n)?;
        let t = tightness(&e)?;
        let want = 1usize << n;
        rows.push(ReportRow::exact(3, &format!("tightness rank of mabk({n})"), want, t.rank, t.is_tight && t.rank == want));
        let v = seesaw_maximize(&e, &make_state("ghz", &[n as f64])?, config)?.value;
        rows.push(ReportRow::real(3, &format!("see-saw mabk({n}) on ghz({n})"), SQRT_2.powi(n as i32 - 1), v, 1e-6));
    }
    let e = mabk(4)?;
    let (_, settings) = optimal_settings(&e, &make_state("ghz4", &[])?, config)?;
    let sp = spectrum(&bell_operator(&e, &settings)?)?;
    let nonzero: Vec<f64> = sp.eigenvalues.iter().copied().filter(|v| v.abs() > 1e-8).collect();
    let target = 2.0 * SQRT_2;
    let pass = nonzero.len() == 2 && (nonzero[0] - target).abs() <= 1e-8 && (nonzero[1] + target).abs() <= 1e-8;
    rows.push(ReportRow {
        criterion: 3,
        quantity: "nonzero eigenvalues of mabk(4) at optimal settings".into(),
        reference: format!("±{}", sig6(target)),
        computed: nonzero.iter().map(|v| sig6(*v)).collect::<Vec<_>>().join(", "),
        tolerance: "±1e-8".into(),
        pass,
    });
    Ok(rows)
}

fn criterion_4() -> Result<Vec<ReportRow>> {
    let b = wbz333();
    let lr = lr_max(&b)?;
    let t = tightness(&b)?;
    let (b1, b2, b3) = symmetry_images();
    let identity = b.try_add(&b1)? == b2.try_add(&b3)?;
    Ok(vec![
        ReportRow::exact(4, "lrMax(wbz333)", 1, &lr, lr == one()),
        ReportRow::exact(4, "tightness rank of wbz333", 27, t.rank, t.is_tight && t.rank == 27),
        ReportRow::exact(4, "B + B1 = B2 + B3", true, identity, identity),
    ])
}

fn criterion_5() -> Result<Vec<ReportRow>> {
    let e = four_party_19();
    let lr = lr_max(&e)?;
    let strategies = strategy_count(e.scenario());
    let t = tightness(&e)?;
    let b = wbz333();
    let (_, b2, b3) = symmetry_images();
    let (compatible, _) = compatibility_holds(&b, &b2, &b3)?;
    Ok(vec![
        ReportRow::exact(5, "lrMax(fourParty19)", 1, &lr, lr == one()),
        ReportRow::exact(5, "deterministic strategies enumerated", 4096, strategies, strategies == 4096),
        ReportRow::exact(5, "tightness rank of fourParty19", 81, t.rank, t.is_tight && t.rank == 81),
        ReportRow::exact(5, "compatibility of (B, B2, B3)", true, compatible, compatible),
    ])
}

/// Published violation factors of the four-party inequality.
pub const PUBLISHED_VIOLATIONS: [(&str, &str, f64); 5] = [
    ("GHZ", "ghz4", 2.263),
    ("W", "w4", 1.448),
    ("PDC", "pdc", 1.612),
    ("chi", "chi", 1.579),
    ("cluster", "cluster4", 1.759),
];

fn criterion_6(config: &SeesawConfig) -> Result<Vec<ReportRow>> {
    let e = four_party_19();
    PUBLISHED_VIOLATIONS
        .iter()
        .map(|(label, name, paper)| {
            let v = seesaw_maximize(&e, &make_state(name, &[])?, config)?.value;
            Ok(ReportRow::real(6, &format!("violation factor, {label} state"), *paper, v, VIOLATION_TOLERANCE))
        })
        .collect()
}

/// Published spectrum of the four-party operator at the GHZ-optimal settings,
/// positive half in descending order.
pub const PUBLISHED_SPECTRUM: [f64; 8] = [2.263, 1.494, 0.449, 0.449, 0.449, 0.120, 0.120, 0.120];

fn ghz_optimal_operator(config: &SeesawConfig) -> Result<CMatrix> {
    let e = four_party_19();
    let (_, settings) = optimal_settings(&e, &make_state("ghz4", &[])?, config)?;
    bell_operator(&e, &settings)
}

fn criterion_7(config: &SeesawConfig) -> Result<Vec<ReportRow>> {
    let sp = spectrum(&ghz_optimal_operator(config)?)?;
    let mut expected: Vec<f64> = PUBLISHED_SPECTRUM.to_vec();
    expected.extend(PUBLISHED_SPECTRUM.iter().rev().map(|v| -v));
    let worst = sp
        .eigenvalues
        .iter()
        .zip(&expected)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let smallest = sp.eigenvalues.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
    Ok(vec![
        ReportRow {
            criterion: 7,
            quantity: "fourParty19 spectrum at GHZ-optimal settings".into(),
            reference: "±2.263, ±1.494, ±0.449 (x3), ±0.120 (x3)".into(),
            computed: sp
                .levels
                .iter()
                .map(|l| format!("{} (x{})", sig6(l.value), l.multiplicity))
                .collect::<Vec<_>>()
                .join(", "),
            tolerance: format!("±{VIOLATION_TOLERANCE} per eigenvalue (worst {})", sig6(worst)),
            pass: sp.eigenvalues.len() == 16 && worst <= VIOLATION_TOLERANCE,
        },
        ReportRow::bound(7, "smallest |eigenvalue|", ">= 0.1", smallest, smallest >= 0.1),
    ])
}

/// Angles (degrees) of the generalized GHZ grid checked for violation.
pub fn violation_grid() -> Vec<f64> {
    (1..=20).map(|k| 45.0 * k as f64 / 21.0).collect()
}

fn criterion_8(config: &SeesawConfig) -> Result<Vec<ReportRow>> {
    let e = four_party_19();
    let v = seesaw_maximize(&e, &generalized_ghz(1.4324f64.to_radians())?, config)?.value;
    let mut worst_formula = 0.0f64;
    for k in 0..50 {
        let lambda = FRAC_PI_4 * k as f64 / 49.0;
        let s = sum_squared_correlations(&generalized_ghz(lambda)?);
        worst_formula = worst_formula.max((s - (5.0 - 4.0 * (4.0 * lambda).cos())).abs());
    }
    let mut weakest = f64::INFINITY;
    for deg in violation_grid() {
        let value = seesaw_maximize(&e, &generalized_ghz(deg.to_radians())?, config)?.value;
        weakest = weakest.min(value);
    }
    Ok(vec![
        ReportRow::bound(8, "see-saw at lambda = 1.4324 deg (published 1.001)", ">= 1.000", v, v >= 1.0),
        ReportRow::bound(8, "max |sum T^2 - (5 - 4 cos 4 lambda)| over 50 angles", "<= 1e-9", worst_formula, worst_formula <= 1e-9),
        ReportRow::bound(8, "smallest optimum over the 20-angle grid in (0, 45) deg", "> 1", weakest, weakest > 1.0),
    ])
}

/// Published lower bound on the critical angle (degrees).
pub const PUBLISHED_CRITICAL_LAMBDA: f64 = 10.3524;

fn criterion_9(config: &SeesawConfig) -> Result<Vec<ReportRow>> {
    let lambda = mabk_critical_lambda(config, 1e-4)?;
    let analytic = 0.5 * (1.0 / 8f64.sqrt()).asin().to_degrees();
    let e = mabk(4)?;
    let above = seesaw_maximize(&e, &generalized_ghz(15f64.to_radians())?, config)?.value;
    let below = seesaw_maximize(&e, &generalized_ghz(5f64.to_radians())?, config)?.value;
    Ok(vec![
        ReportRow::real(9, "MABK critical angle (deg)", PUBLISHED_CRITICAL_LAMBDA, lambda, 0.01),
        ReportRow::real(9, "critical angle vs sin(2 lambda) = 1/sqrt(8) (deg)", analytic, lambda, 0.01),
        ReportRow::bound(9, "mabk(4) optimum at 15 deg", "> 1", above, above > 1.0),
        ReportRow::bound(9, "mabk(4) optimum at 5 deg", "<= 1 + 1e-6", below, below <= 1.0 + 1e-6),
    ])
}

fn random_angles<R: Rng>(rng: &mut R) -> SettingAngles {
    SettingAngles {
        chi: rng.random_range(0.0..std::f64::consts::TAU),
        theta: rng.random_range(0.0..std::f64::consts::PI),
        phi: rng.random_range(0.0..std::f64::consts::TAU),
    }
}

fn criterion_10(seed: u64) -> Result<Vec<ReportRow>> {
    let e = four_party_19();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_norm = 0.0f64;
    for _ in 0..100 {
        let bases: Vec<Triad> = (0..4).map(|_| Triad::random(&mut rng)).collect();
        let angles: Vec<SettingAngles> = (0..4).map(|_| random_angles(&mut rng)).collect();
        let settings = MeasurementSettings::from_angles(&angles, &bases)?;
        let alpha = contract_coefficients(&e, &settings, Some(&bases))?;
        worst_norm = worst_norm.max((16.0 * alpha.sum_squares() - 16.0).abs());
    }
    let mut worst_trace = 0.0f64;
    for k in 0..100 {
        let pure = QuantumState::random_pure(4, &mut rng)?;
        let state = if k % 2 == 0 { pure } else { pure.depolarized(rng.random_range(0.0..1.0))? };
        let settings = MeasurementSettings::random(e.scenario(), &mut rng);
        let bases: Vec<Triad> = (0..4).map(|_| Triad::random(&mut rng)).collect();
        let t = correlation_tensor(&state, Some(&bases))?;
        let alpha = contract_coefficients(&e, &settings, Some(&bases))?;
        let direct = state.expectation(&bell_operator(&e, &settings)?)?;
        worst_trace = worst_trace.max((t.tensor().dot(&alpha) - direct).abs());
    }
    Ok(vec![
        ReportRow::bound(10, "max |sum (4 alpha)^2 - 16| over 100 parametrized draws", "<= 1e-9", worst_norm, worst_norm <= 1e-9),
        ReportRow::bound(10, "max |<T, alpha> - Tr(rho B)| over 100 random pairs", "<= 1e-10", worst_trace, worst_trace <= 1e-10),
    ])
}

fn eigenstate_mixture(vectors: &CMatrix, picks: &[usize]) -> Result<QuantumState> {
    let mut rho = CMatrix::zeros(vectors.dim());
    for &k in picks {
        rho.add_scaled(1.0 / picks.len() as f64, &CMatrix::outer(&vectors.column(k)));
    }
    QuantumState::from_density(rho)
}

fn criterion_11(config: &SeesawConfig) -> Result<Vec<ReportRow>> {
    let op = ghz_optimal_operator(config)?;
    let eig = eigh(&op)?;
    let five = eigenstate_mixture(&eig.vectors, &[0, 1, 2, 3, 4])?.expectation(&op)?;
    let derived = (2.263 + 1.494 + 3.0 * 0.449) / 5.0;

    let e = mabk(4)?;
    let (_, settings) = optimal_settings(&e, &make_state("ghz4", &[])?, config)?;
    let mop = bell_operator(&e, &settings)?;
    let meig = eigh(&mop)?;
    let mut worst = f64::NEG_INFINITY;
    for i in 0..16 {
        for j in i + 1..16 {
            for k in j + 1..16 {
                worst = worst.max(eigenstate_mixture(&meig.vectors, &[i, j, k])?.expectation(&mop)?);
            }
        }
    }
    let limit = 2.0 * SQRT_2 / 3.0;
    Ok(vec![
        ReportRow::real(11, "fourParty19 on the five top eigenstates, equal mixture", derived, five, VIOLATION_TOLERANCE),
        ReportRow::bound(11, "same mixture exceeds the local bound", "> 1", five, five > 1.0),
        ReportRow::bound(
            11,
            "max mabk(4) over equal mixtures of three eigenstates (560 triples)",
            "<= 2 sqrt(2)/3 + 1e-8",
            worst,
            worst <= limit + 1e-8,
        ),
    ])
}

fn criterion_12(config: &SeesawConfig) -> Result<Vec<ReportRow>> {
    let e = four_party_19();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut worst_value = f64::NEG_INFINITY;
    let mut worst_sum = 0.0f64;
    for _ in 0..20 {
        let pure = QuantumState::random_pure(4, &mut rng)?;
        // white noise scales every correlation by the visibility
        let target: f64 = rng.random_range(0.5..1.0);
        let p = (target / sum_squared_correlations(&pure)).sqrt().min(1.0);
        let state = pure.depolarized(p)?;
        worst_sum = worst_sum.max(sum_squared_correlations(&state));
        worst_value = worst_value.max(seesaw_maximize(&e, &state, config)?.value);
    }
    Ok(vec![
        ReportRow::bound(12, "max sum T^2 of the 20 noisy states", "<= 1", worst_sum, worst_sum <= 1.0),
        ReportRow::bound(12, "max see-saw optimum over those states", "<= 1 + 1e-6", worst_value, worst_value <= 1.0 + 1e-6),
    ])
}

fn criterion_13() -> Result<Vec<ReportRow>> {
    let f22 = enumerate_facets_brute(&Scenario::new(vec![2, 2])?)?;
    let nonzero = |e: &BellExpression| e.terms().count();
    let chsh_like = f22.iter().filter(|f| nonzero(f) == 4).count();
    let single = f22.iter().filter(|f| nonzero(f) == 1).count();
    let f222 = enumerate_facets_brute(&Scenario::new(vec![2, 2, 2])?)?;
    let mut all_tight = true;
    for f in f22.iter().chain(&f222) {
        all_tight &= tightness(f)?.is_tight;
    }
    let lifted: BTreeSet<Vec<Rational>> = f22
        .iter()
        .flat_map(|f| f22.iter().map(move |g| (f, g)))
        .map(|(f, g)| lift2_expression(f, g).map(|e| e.coefficients().to_vec()))
        .collect::<Result<_>>()?;
    let oracle: BTreeSet<Vec<Rational>> = f222.iter().map(|e| e.coefficients().to_vec()).collect();
    Ok(vec![
        ReportRow::exact(13, "F_22 facets (2^(2^2))", 16, f22.len(), f22.len() == 16),
        ReportRow::exact(13, "F_22 CHSH variants / single correlations", "8 / 8", format!("{chsh_like} / {single}"), chsh_like == 8 && single == 8),
        ReportRow::exact(13, "F_222 facets (2^(2^3))", 256, f222.len(), f222.len() == 256),
        ReportRow::exact(13, "every oracle facet passes tightness", true, all_tight, all_tight),
        ReportRow::exact(13, "lift2 pairs of F_22 facets give exactly the F_222 facets", true, lifted == oracle, lifted == oracle),
    ])
}

/// Rows of one criterion (1..=13). Errors become a failing row.
pub fn run_criterion(criterion: u8, config: &SeesawConfig) -> Vec<ReportRow> {
    let rows = match criterion {
        1 => criterion_1(),
        2 => criterion_2(),
        3 => criterion_3(config),
        4 => criterion_4(),
        5 => criterion_5(),
        6 => criterion_6(config),
        7 => criterion_7(config),
        8 => criterion_8(config),
        9 => criterion_9(config),
        10 => criterion_10(config.seed),
        11 => criterion_11(config),
        12 => criterion_12(config),
        13 => criterion_13(),
        other => Err(crate::Error::InvalidArgument(format!("no criterion {other}"))),
    };
    rows.unwrap_or_else(|e| vec![ReportRow::error(criterion, e.to_string())])
}

/// The full report, in criterion order.
pub fn reproduce_report(config: &SeesawConfig) -> Report {
    Report {
        rows: (1..=CRITERIA).flat_map(|c| run_criterion(c, config)).collect(),
    }
}
