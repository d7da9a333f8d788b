//! Adding an observer to known facets.
//!
//! Two-setting lift: from facets `I+`, `I-` of a scenario, the expression
//! `(a0 + a1)/2 · I+ + (a0 - a1)/2 · I-` is a facet of the scenario with a
//! new two-setting party, and every such facet arises this way.
//!
//! Three-setting lift: from facets `I0`, `I2`, `I3`,
//! `a0 (I2 + I3)/2 + a1 (I0 - I2)/2 + a2 (I0 - I3)/2` is a facet whenever
//! `I1 = I2 + I3 - I0` is itself a valid inequality (compatibility). The
//! condition is sufficient only.
//!
//! The new party is prepended as party 0.

use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::polytope::{lr_maximizer, tightness};
use crate::scenario::{ratio, BellExpression, DeterministicStrategy, PartyMap, Rational, Scenario, SignedSettingMap};

/// Certification results attached to a lift.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiftDiagnostics {
    pub inputs_tight: Vec<bool>,
    /// `None` for two-setting lifts.
    pub compatibility_valid: Option<bool>,
    pub output_tight: bool,
    /// Strategy on which `I1 > 1` when compatibility fails.
    #[serde(skip)]
    pub compatibility_witness: Option<DeterministicStrategy>,
}

/// Two-setting lift without certification.
pub fn lift2_expression(i_plus: &BellExpression, i_minus: &BellExpression) -> Result<BellExpression> {
    let half = ratio(1, 2);
    let first = (i_plus.try_add(i_minus)?).scaled(&half);
    let second = (i_plus.try_sub(i_minus)?).scaled(&half);
    BellExpression::stack_new_party(&[first, second])
}

/// Two-setting lift, with tightness of inputs and output certified by brute
/// force.
pub fn lift2(i_plus: &BellExpression, i_minus: &BellExpression) -> Result<(BellExpression, LiftDiagnostics)> {
    let out = lift2_expression(i_plus, i_minus)?;
    let diagnostics = LiftDiagnostics {
        inputs_tight: vec![tightness(i_plus)?.is_tight, tightness(i_minus)?.is_tight],
        compatibility_valid: None,
        output_tight: tightness(&out)?.is_tight,
        compatibility_witness: None,
    };
    Ok((out, diagnostics))
}

/// `I1 = I2 + I3 - I0`, the expression the new party sees on outcomes (1,-1,-1).
pub fn compatibility_expression(
    i0: &BellExpression,
    i2: &BellExpression,
    i3: &BellExpression,
) -> Result<BellExpression> {
    i2.try_add(i3)?.try_sub(i0)
}

/// Whether `I2 + I3 - I0` is valid (`lr_max <= 1`); a maximizing strategy is
/// returned when it is not.
pub fn compatibility_holds(
    i0: &BellExpression,
    i2: &BellExpression,
    i3: &BellExpression,
) -> Result<(bool, Option<DeterministicStrategy>)> {
    let i1 = compatibility_expression(i0, i2, i3)?;
    let (max, witness) = lr_maximizer(&i1)?;
    if max <= Rational::one() {
        Ok((true, None))
    } else {
        Ok((false, Some(witness)))
    }
}

/// Three-setting lift without certification.
pub fn lift3_expression(
    i0: &BellExpression,
    i2: &BellExpression,
    i3: &BellExpression,
) -> Result<BellExpression> {
    let half = ratio(1, 2);
    let s0 = i2.try_add(i3)?.scaled(&half);
    let s1 = i0.try_sub(i2)?.scaled(&half);
    let s2 = i0.try_sub(i3)?.scaled(&half);
    BellExpression::stack_new_party(&[s0, s1, s2])
}

/// Three-setting lift. When compatibility fails the expression is still
/// returned, together with a witness; it is then not guaranteed valid.
pub fn lift3(
    i0: &BellExpression,
    i2: &BellExpression,
    i3: &BellExpression,
) -> Result<(BellExpression, LiftDiagnostics)> {
    let out = lift3_expression(i0, i2, i3)?;
    let (compatible, witness) = compatibility_holds(i0, i2, i3)?;
    let diagnostics = LiftDiagnostics {
        inputs_tight: vec![
            tightness(i0)?.is_tight,
            tightness(i2)?.is_tight,
            tightness(i3)?.is_tight,
        ],
        compatibility_valid: Some(compatible),
        output_tight: tightness(&out)?.is_tight,
        compatibility_witness: witness,
    };
    Ok((out, diagnostics))
}

/// Compatibility conditions needed when the added party has `k` settings:
/// `2^(k-1) - k`. Only `k <= 3` is implemented as a lift.
pub fn compatibility_condition_count(k: u32) -> u64 {
    assert!((1..64).contains(&k), "k must be in 1..64");
    (1u64 << (k - 1)) - u64::from(k)
}

fn swap01(parties: usize) -> SignedSettingMap {
    SignedSettingMap::uniform(parties, PartyMap::new(vec![1, 0], vec![1, 1]).expect("valid map"))
}

/// The n-party MABK expression, built by repeated two-setting lifts of
/// `E_{k-1}` and its primed copy (settings 0 and 1 swapped on every party).
pub fn mabk(n: usize) -> Result<BellExpression> {
    if n < 1 {
        return Err(Error::InvalidArgument("MABK needs at least one party".into()));
    }
    let single = Scenario::new(vec![2])?;
    let mut e = BellExpression::delta(single.clone(), &[0])?;
    let mut primed = BellExpression::delta(single, &[1])?;
    for k in 2..=n {
        e = lift2_expression(&e, &primed)?;
        primed = e.apply_map(&swap01(k))?;
    }
    Ok(e)
}

/// The 3x3x3 inequality
///
/// ```text
/// 1/4 [ A0 (B1 + B2)(C1 - C2) + (A1 - A2) B0 (C1 + C2) + (A1 + A2)(B1 - B2) C0
///       + 1/2 (A1 + A2)(B1 + B2)(C1 + C2) + 1/2 (A1 - A2)(B1 - B2)(C1 - C2) ] <= 1
/// ```
pub fn wbz333() -> BellExpression {
    let sc = Scenario::uniform(3, 3).expect("valid scenario");
    let x0: &[(usize, i64)] = &[(0, 1)];
    let plus: &[(usize, i64)] = &[(1, 1), (2, 1)];
    let minus: &[(usize, i64)] = &[(1, 1), (2, -1)];
    let terms: [(Rational, [&[(usize, i64)]; 3]); 5] = [
        (ratio(1, 4), [x0, plus, minus]),
        (ratio(1, 4), [minus, x0, plus]),
        (ratio(1, 4), [plus, minus, x0]),
        (ratio(1, 8), [plus, plus, plus]),
        (ratio(1, 8), [minus, minus, minus]),
    ];
    let mut acc = BellExpression::zeros(sc.clone());
    for (c, forms) in terms {
        let t = BellExpression::from_product(sc.clone(), c, &forms).expect("well-formed product");
        acc = &acc + &t;
    }
    acc
}

/// The three symmetry transformations applied uniformly to every party of
/// the 3x3x3 inequality: `x0 <-> x1`, `x0 <-> x2`, and the cycle
/// `x0 -> x2, x1 -> x0, x2 -> x1` (coefficients of setting 0 move to setting
/// 2, and so on).
pub fn wbz_transformation(k: usize) -> Result<SignedSettingMap> {
    let perm = match k {
        1 => vec![1, 0, 2],
        2 => vec![2, 1, 0],
        3 => vec![2, 0, 1],
        _ => return Err(Error::InvalidArgument(format!("no transformation {k}"))),
    };
    Ok(SignedSettingMap::uniform(3, PartyMap::new(perm, vec![1, 1, 1])?))
}

/// The literal signed substitution `x0 -> -x2, x2 -> x0`. It does not satisfy
/// `B + B1 = B2 + B3`; kept for comparison with [`wbz_transformation`].
pub fn wbz_signed_substitution() -> SignedSettingMap {
    SignedSettingMap::uniform(3, PartyMap::new(vec![2, 1, 0], vec![-1, 1, 1]).expect("valid map"))
}

/// Images `(B1, B2, B3)` of [`wbz333`] under the three transformations.
pub fn symmetry_images() -> (BellExpression, BellExpression, BellExpression) {
    let b = wbz333();
    let image = |k| b.apply_map(&wbz_transformation(k).expect("k in 1..=3")).expect("shape matches");
    (image(1), image(2), image(3))
}

/// The four-party 3x3x3x3 inequality: `lift3(B, B2, B3)` with the added party
/// moved to the last position (D).
pub fn four_party_19() -> BellExpression {
    let b = wbz333();
    let (_, b2, b3) = symmetry_images();
    let lifted = lift3_expression(&b, &b2, &b3).expect("shared scenario");
    lifted.permute_parties(&[1, 2, 3, 0]).expect("valid permutation")
}

/// Direct transcription of the fully expanded four-party inequality, term
/// by term, for comparison with [`four_party_19`].
pub fn four_party_19_transcription() -> BellExpression {
    let sc = Scenario::uniform(4, 3).expect("valid scenario");
    type F = &'static [(usize, i64)];
    let a0: F = &[(0, 1)];
    let a1: F = &[(1, 1)];
    let a2: F = &[(2, 1)];
    let rows: [(i64, [F; 4]); 13] = [
        (-1, [a0, &[(0, 1), (2, -1)], &[(0, 1), (1, 1)], &[(1, 1), (2, -1)]]),
        (1, [a0, &[(1, 1), (0, -1)], &[(0, 1), (2, 1)], &[(0, 1), (1, -1)]]),
        (1, [a0, &[(1, 1), (2, 1)], &[(1, 1), (2, -1)], &[(1, 1), (2, 1)]]),
        (1, [a0, &[(0, 1), (1, 1)], &[(0, 1), (1, 1)], &[(0, 1), (2, -1)]]),
        (1, [a0, &[(0, 1), (1, -1)], &[(0, 1), (2, 1)], &[(0, 1), (2, -1)]]),
        (-1, [a1, &[(0, 1), (2, 1)], &[(0, 1), (2, -1)], &[(1, 1), (2, 1)]]),
        (1, [a1, &[(1, 1), (2, -1)], &[(0, 1), (1, 1)], &[(1, 1), (2, -1)]]),
        (1, [a1, &[(0, 1), (1, -1)], &[(1, 1), (2, 1)], &[(1, 1), (2, -1)]]),
        (1, [a1, &[(0, 1), (1, 1)], &[(0, 1), (2, -1)], &[(0, 1), (2, 1)]]),
        (1, [a1, &[(0, 1), (1, 1)], &[(1, 1), (2, 1)], &[(0, 1), (2, 1)]]),
        (1, [a2, &[(0, 1), (1, 1)], &[(0, 1), (1, -1)], &[(1, 1), (2, -1)]]),
        (1, [a2, &[(0, 1), (2, -1)], &[(0, 1), (1, -1)], &[(1, 1), (2, 1)]]),
        (1, [a2, &[(0, -1), (1, 1)], &[(0, 1), (2, 1)], &[(1, 1), (2, 1)]]),
    ];
    let mut acc = BellExpression::zeros(sc.clone());
    for (sign, forms) in rows {
        let t = BellExpression::from_product(sc.clone(), ratio(sign, 8), &forms)
            .expect("well-formed product");
        acc = &acc + &t;
    }
    acc
}

/// One coefficient where two expressions disagree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TermDiscrepancy {
    pub settings: Vec<usize>,
    #[serde(serialize_with = "crate::document::serialize_rational")]
    pub computed: Rational,
    #[serde(serialize_with = "crate::document::serialize_rational")]
    pub transcribed: Rational,
}

/// Term-by-term comparison of [`four_party_19`] with its transcription.
/// Empty when they agree.
pub fn compare_four_party_19_transcription() -> Vec<TermDiscrepancy> {
    let computed = four_party_19();
    let transcribed = four_party_19_transcription();
    computed
        .scenario()
        .tuples()
        .zip(computed.coefficients().iter().zip(transcribed.coefficients()))
        .filter(|(_, (a, b))| a != b)
        .map(|(settings, (a, b))| TermDiscrepancy {
            settings,
            computed: a.clone(),
            transcribed: b.clone(),
        })
        .collect()
}
