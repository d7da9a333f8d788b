//! Brute-force exploration of the full correlation polytope.
//!
//! Every deterministic strategy is enumerated explicitly, so all results are
//! exact. Work is split over strategy indices with rayon; reductions pick the
//! lowest index on ties, which keeps output independent of scheduling.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{solve_square, EchelonBasis};
use crate::scenario::{BellExpression, DeterministicStrategy, Rational, Scenario};

/// Default bound on the number of strategies any enumeration may visit.
pub const DEFAULT_MAX_STRATEGIES: u128 = 1 << 24;

/// Hard limits for [`enumerate_facets_brute`].
pub const FACET_ORACLE_MAX_DIMENSION: usize = 8;
pub const FACET_ORACLE_MAX_VERTICES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationCap {
    pub max_strategies: u128,
}

impl Default for EnumerationCap {
    fn default() -> Self {
        Self {
            max_strategies: DEFAULT_MAX_STRATEGIES,
        }
    }
}

impl EnumerationCap {
    fn check(&self, scenario: &Scenario) -> Result<()> {
        let requested = strategy_count(scenario);
        if requested > self.max_strategies {
            Err(Error::CapExceeded {
                requested,
                cap: self.max_strategies,
            })
        } else {
            Ok(())
        }
    }
}

/// `2^(total settings)`, saturating.
pub fn strategy_count(scenario: &Scenario) -> u128 {
    let bits = scenario.total_settings();
    if bits >= 128 {
        u128::MAX
    } else {
        1u128 << bits
    }
}

/// Number of distinct admissible vectors, `2^(total settings - parties + 1)`.
pub fn distinct_vertex_count(scenario: &Scenario) -> u128 {
    let bits = scenario.total_settings() + 1 - scenario.parties();
    if bits >= 128 {
        u128::MAX
    } else {
        1u128 << bits
    }
}

/// All `2^(total settings)` strategies in lexicographic order of the
/// concatenated outcome bits (+1 before -1).
pub fn enumerate_strategies(
    scenario: &Scenario,
    cap: EnumerationCap,
) -> Result<impl Iterator<Item = DeterministicStrategy> + '_> {
    cap.check(scenario)?;
    let count = strategy_count(scenario);
    Ok((0..count).map(move |i| DeterministicStrategy::from_index(scenario, i)))
}

/// Canonical strategy number `index`: every party after the first has its
/// first outcome fixed to +1, the remaining outcomes are read from `index`
/// most significant bit first. Distinct indices give distinct vertices and
/// every vertex is reached once.
fn canonical_strategy(scenario: &Scenario, index: u128) -> DeterministicStrategy {
    let free = scenario.total_settings() + 1 - scenario.parties();
    let mut bit = free;
    let outcomes = scenario
        .settings()
        .iter()
        .enumerate()
        .map(|(p, &m)| {
            (0..m)
                .map(|s| {
                    if p > 0 && s == 0 {
                        return 1;
                    }
                    bit -= 1;
                    if (index >> bit) & 1 == 0 {
                        1
                    } else {
                        -1
                    }
                })
                .collect()
        })
        .collect();
    DeterministicStrategy::new(outcomes).expect("canonical outcomes are ±1")
}

/// One representative strategy per distinct admissible vector.
pub fn distinct_vertices(
    scenario: &Scenario,
    cap: EnumerationCap,
) -> Result<Vec<DeterministicStrategy>> {
    cap.check(scenario)?;
    Ok((0..distinct_vertex_count(scenario))
        .map(|i| canonical_strategy(scenario, i))
        .collect())
}

/// Coefficients over a common denominator, for cheap exact evaluation.
enum Numerators {
    Small(Vec<i64>),
    Big(Vec<BigInt>),
}

struct ScaledForm {
    numerators: Numerators,
    denominator: BigInt,
}

/// Exact value of the scaled form on a vertex, as a numerator over the form's
/// common denominator.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum ScaledValue {
    Small(i128),
    Big(BigInt),
}

impl ScaledValue {
    fn into_big(self) -> BigInt {
        match self {
            ScaledValue::Small(v) => BigInt::from(v),
            ScaledValue::Big(v) => v,
        }
    }
}

impl ScaledForm {
    fn new(expr: &BellExpression) -> Self {
        let denominator = expr
            .coefficients()
            .iter()
            .fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let big: Vec<BigInt> = expr
            .coefficients()
            .iter()
            .map(|c| c.numer() * (&denominator / c.denom()))
            .collect();
        let small: Option<Vec<i64>> = big
            .iter()
            .map(|n| n.to_i64().filter(|v| v.unsigned_abs() < (1 << 40)))
            .collect();
        let numerators = match small {
            Some(s) => Numerators::Small(s),
            None => Numerators::Big(big),
        };
        Self {
            numerators,
            denominator,
        }
    }

    fn value(&self, vertex: &[i8]) -> ScaledValue {
        match &self.numerators {
            Numerators::Small(n) => ScaledValue::Small(
                n.iter()
                    .zip(vertex)
                    .map(|(&c, &v)| i128::from(c) * i128::from(v))
                    .sum(),
            ),
            Numerators::Big(n) => ScaledValue::Big(
                n.iter()
                    .zip(vertex)
                    .fold(BigInt::zero(), |acc, (c, &v)| if v > 0 { acc + c } else { acc - c }),
            ),
        }
    }

    fn is_one(&self, value: &ScaledValue) -> bool {
        match value {
            ScaledValue::Small(v) => self.denominator.to_i128() == Some(*v),
            ScaledValue::Big(v) => v == &self.denominator,
        }
    }

    fn to_rational(&self, value: ScaledValue) -> Rational {
        Rational::new(value.into_big(), self.denominator.clone())
    }
}

/// Exact local-realistic maximum together with the lowest-index canonical
/// strategy attaining it.
pub fn lr_maximizer_with_cap(
    expr: &BellExpression,
    cap: EnumerationCap,
) -> Result<(Rational, DeterministicStrategy)> {
    let scenario = expr.scenario();
    cap.check(scenario)?;
    let form = ScaledForm::new(expr);
    let count = distinct_vertex_count(scenario);
    let (value, index) = (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let v = canonical_strategy(scenario, u128::from(i)).vertex();
            (form.value(&v), i)
        })
        .reduce_with(|a, b| {
            // larger value wins, lower index on ties
            if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                b
            } else {
                a
            }
        })
        .expect("at least one strategy");
    Ok((form.to_rational(value), canonical_strategy(scenario, u128::from(index))))
}

pub fn lr_maximizer(expr: &BellExpression) -> Result<(Rational, DeterministicStrategy)> {
    lr_maximizer_with_cap(expr, EnumerationCap::default())
}

/// Exact maximum of the expression over all deterministic strategies.
pub fn lr_max(expr: &BellExpression) -> Result<Rational> {
    lr_maximizer(expr).map(|(v, _)| v)
}

pub fn lr_max_with_cap(expr: &BellExpression, cap: EnumerationCap) -> Result<Rational> {
    lr_maximizer_with_cap(expr, cap).map(|(v, _)| v)
}

/// Outcome of the facet test for a normalized expression.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TightnessReport {
    #[serde(serialize_with = "crate::document::serialize_rational")]
    pub lr_max: Rational,
    /// Distinct admissible vectors with value exactly 1.
    pub saturating_count: usize,
    /// Rank of those vectors over the rationals.
    pub rank: usize,
    pub dimension: usize,
    pub is_valid: bool,
    pub is_tight: bool,
}

pub fn tightness_with_cap(expr: &BellExpression, cap: EnumerationCap) -> Result<TightnessReport> {
    let scenario = expr.scenario();
    cap.check(scenario)?;
    let form = ScaledForm::new(expr);
    let count = distinct_vertex_count(scenario) as u64;
    let evaluated: Vec<(ScaledValue, Option<Vec<i8>>)> = (0..count)
        .into_par_iter()
        .map(|i| {
            let v = canonical_strategy(scenario, u128::from(i)).vertex();
            let value = form.value(&v);
            let sat = form.is_one(&value).then_some(v);
            (value, sat)
        })
        .collect();

    let max = evaluated
        .iter()
        .map(|(v, _)| v)
        .max()
        .cloned()
        .expect("at least one strategy");
    let lr_max = form.to_rational(max);

    let dimension = scenario.dimension();
    let mut basis = EchelonBasis::new(dimension);
    let mut saturating_count = 0;
    for v in evaluated.into_iter().filter_map(|(_, s)| s) {
        saturating_count += 1;
        if !basis.is_full() {
            basis.push(v.into_iter().map(BigInt::from));
        }
    }
    let is_valid = lr_max <= Rational::one();
    let rank = basis.rank();
    Ok(TightnessReport {
        lr_max,
        saturating_count,
        rank,
        dimension,
        is_valid,
        is_tight: is_valid && rank == dimension,
    })
}

/// Validity (`lr_max <= 1`) and facet certification: the vertices saturating
/// the inequality must span the full space.
pub fn tightness(expr: &BellExpression) -> Result<TightnessReport> {
    tightness_with_cap(expr, EnumerationCap::default())
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            break;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
    out
}

/// Every facet `a·v <= 1` of the correlation polytope of a tiny scenario,
/// found by solving `a·v = 1` on each `D`-subset of distinct vertices and
/// keeping the valid solutions. Results are deduplicated and sorted by
/// coefficient tuple.
pub fn enumerate_facets_brute(scenario: &Scenario) -> Result<Vec<BellExpression>> {
    let dimension = scenario.dimension();
    if dimension > FACET_ORACLE_MAX_DIMENSION {
        return Err(Error::CapExceeded {
            requested: dimension as u128,
            cap: FACET_ORACLE_MAX_DIMENSION as u128,
        });
    }
    let nv = distinct_vertex_count(scenario);
    if nv > FACET_ORACLE_MAX_VERTICES as u128 {
        return Err(Error::CapExceeded {
            requested: nv,
            cap: FACET_ORACLE_MAX_VERTICES as u128,
        });
    }
    let vertices: Vec<Vec<BigInt>> = distinct_vertices(scenario, EnumerationCap::default())?
        .iter()
        .map(|s| s.vertex().into_iter().map(BigInt::from).collect())
        .collect();
    let ones = vec![BigInt::one(); dimension];

    let found: Vec<Vec<Rational>> = combinations(vertices.len(), dimension)
        .into_par_iter()
        .filter_map(|subset| {
            let a: Vec<Vec<BigInt>> = subset.iter().map(|&i| vertices[i].clone()).collect();
            let normal = solve_square(&a, &ones)?;
            let valid = vertices.iter().all(|v| {
                let dot: Rational = normal
                    .iter()
                    .zip(v)
                    .map(|(c, x)| c * Rational::from_integer(x.clone()))
                    .sum();
                dot <= Rational::one()
            });
            valid.then_some(normal)
        })
        .collect();

    let unique: BTreeSet<Vec<Rational>> = found.into_iter().collect();
    unique
        .into_iter()
        .map(|c| BellExpression::from_coefficients(scenario.clone(), c))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::ratio;

    fn s(v: &[usize]) -> Scenario {
        Scenario::new(v.to_vec()).unwrap()
    }

    fn expr(sc: &[usize], terms: &[(&[usize], i64, i64)]) -> BellExpression {
        BellExpression::from_terms(
            s(sc),
            terms.iter().map(|(t, p, q)| (t.to_vec(), ratio(*p, *q))),
        )
        .unwrap()
    }

    fn chsh() -> BellExpression {
        expr(&[2, 2], &[(&[0, 0], 1, 2), (&[0, 1], 1, 2), (&[1, 0], 1, 2), (&[1, 1], -1, 2)])
    }

    #[test]
    fn strategy_counts() {
        let cap = EnumerationCap::default();
        assert_eq!(enumerate_strategies(&s(&[2, 2]), cap).unwrap().count(), 16);
        assert_eq!(enumerate_strategies(&s(&[3, 3, 3, 3]), cap).unwrap().count(), 4096);
        assert_eq!(enumerate_strategies(&s(&[1]), cap).unwrap().count(), 2);
    }

    #[test]
    fn strategies_are_unique_and_ordered() {
        let sc = s(&[2, 1, 2]);
        let all: Vec<_> = enumerate_strategies(&sc, EnumerationCap::default()).unwrap().collect();
        let set: std::collections::HashSet<_> = all.iter().cloned().collect();
        assert_eq!(set.len(), all.len());
        let keys: Vec<Vec<i8>> = all.iter().map(|st| st.outcomes().concat()).collect();
        let mut sorted = keys.clone();
        sorted.sort_by(|a, b| b.cmp(a)); // +1 sorts before -1
        assert_eq!(keys, sorted);
    }

    #[test]
    fn cap_is_enforced() {
        let cap = EnumerationCap { max_strategies: 15 };
        assert!(matches!(
            enumerate_strategies(&s(&[2, 2]), cap).map(|_| ()),
            Err(Error::CapExceeded { requested: 16, cap: 15 })
        ));
        assert!(lr_max_with_cap(&chsh(), cap).is_err());
        let big = s(&[5, 5, 5, 5, 5]);
        assert!(matches!(
            lr_max(&BellExpression::zeros(big)),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn distinct_vertices_are_distinct() {
        for sc in [s(&[2, 2]), s(&[2, 3, 2]), s(&[1, 1, 1]), s(&[3])] {
            let vs = distinct_vertices(&sc, EnumerationCap::default()).unwrap();
            let set: std::collections::HashSet<Vec<i8>> = vs.iter().map(|v| v.vertex()).collect();
            assert_eq!(set.len() as u128, distinct_vertex_count(&sc));
            let all: std::collections::HashSet<Vec<i8>> =
                enumerate_strategies(&sc, EnumerationCap::default())
                    .unwrap()
                    .map(|v| v.vertex())
                    .collect();
            assert_eq!(set, all);
        }
    }

    #[test]
    fn lr_max_examples() {
        assert_eq!(lr_max(&chsh()).unwrap(), ratio(1, 1));
        let sum = expr(&[2, 2], &[(&[0, 0], 1, 2), (&[0, 1], 1, 2), (&[1, 0], 1, 2), (&[1, 1], 1, 2)]);
        assert_eq!(lr_max(&sum).unwrap(), ratio(2, 1));
        assert_eq!(lr_max(&BellExpression::zeros(s(&[2, 2]))).unwrap(), ratio(0, 1));
    }

    #[test]
    fn maximizer_attains_max() {
        let e = expr(&[2, 3], &[(&[0, 0], 1, 3), (&[1, 2], -2, 3), (&[0, 1], 1, 5)]);
        let (m, w) = lr_maximizer(&e).unwrap();
        assert_eq!(e.evaluate(&w).unwrap(), m);
        let brute = enumerate_strategies(e.scenario(), EnumerationCap::default())
            .unwrap()
            .map(|st| e.evaluate(&st).unwrap())
            .max()
            .unwrap();
        assert_eq!(m, brute);
    }

    #[test]
    fn big_coefficients_take_exact_path() {
        let huge = Rational::new(BigInt::from(10).pow(30) + 1u32, BigInt::from(10).pow(30));
        let e = BellExpression::from_terms(s(&[1, 1]), [(vec![0, 0], huge.clone())]).unwrap();
        assert_eq!(lr_max(&e).unwrap(), huge);
    }

    #[test]
    fn tightness_examples() {
        let r = tightness(&chsh()).unwrap();
        assert_eq!((r.rank, r.is_tight, r.lr_max.clone()), (4, true, ratio(1, 1)));
        let e00 = expr(&[2, 2], &[(&[0, 0], 1, 1)]);
        let r = tightness(&e00).unwrap();
        assert!(r.is_tight);
        assert_eq!(r.rank, 4);
        let half = expr(&[2, 2], &[(&[0, 0], 1, 2), (&[0, 1], 1, 2)]);
        let r = tightness(&half).unwrap();
        assert!(r.is_valid && !r.is_tight);
        assert_eq!(r.rank, 2);
        let scaled = chsh().scaled(&ratio(2, 1));
        let r = tightness(&scaled).unwrap();
        assert!(!r.is_valid && !r.is_tight);
        assert!(r.rank <= r.saturating_count.min(r.dimension));
    }

    #[test]
    fn combinations_count() {
        assert_eq!(combinations(5, 2).len(), 10);
        assert_eq!(combinations(16, 8).len(), 12870);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert!(combinations(2, 3).is_empty());
    }

    #[test]
    fn facets_of_single_correlation() {
        let f = enumerate_facets_brute(&s(&[1, 1])).unwrap();
        assert_eq!(f.len(), 2);
        assert!(f.contains(&expr(&[1, 1], &[(&[0, 0], 1, 1)])));
        assert!(f.contains(&expr(&[1, 1], &[(&[0, 0], -1, 1)])));
    }

    #[test]
    fn facets_of_chsh_scenario() {
        let f = enumerate_facets_brute(&s(&[2, 2])).unwrap();
        assert_eq!(f.len(), 16);
        let single = f
            .iter()
            .filter(|e| e.terms().count() == 1)
            .count();
        let chsh_like = f
            .iter()
            .filter(|e| e.terms().count() == 4 && e.terms().all(|(_, c)| c.numer().magnitude() == &1u32.into() && c.denom() == &BigInt::from(2)))
            .count();
        assert_eq!((single, chsh_like), (8, 8));
        assert!(f.contains(&chsh()));
        for e in &f {
            assert!(tightness(e).unwrap().is_tight);
        }
    }

    #[test]
    fn facet_oracle_caps() {
        assert!(matches!(
            enumerate_facets_brute(&s(&[2, 2, 2, 2])),
            Err(Error::CapExceeded { .. })
        ));
        assert!(matches!(
            enumerate_facets_brute(&s(&[4, 2])),
            Err(Error::CapExceeded { .. })
        ));
    }
}
