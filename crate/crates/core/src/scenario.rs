//! Measurement scenarios and exact Bell expressions.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact arbitrary-precision rational.
pub type Rational = BigRational;

/// Builds a rational from a small numerator and denominator.
pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Number of settings per party.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Scenario {
    settings: Vec<usize>,
}

impl Scenario {
    pub fn new(settings: Vec<usize>) -> Result<Self> {
        if settings.is_empty() {
            return Err(Error::InvalidScenario("scenario needs at least one party".into()));
        }
        if let Some(p) = settings.iter().position(|&m| m == 0) {
            return Err(Error::InvalidScenario(format!(
                "party {p} has zero settings"
            )));
        }
        Ok(Self { settings })
    }

    /// `parties` observers with `m` settings each.
    pub fn uniform(parties: usize, m: usize) -> Result<Self> {
        Self::new(vec![m; parties])
    }

    pub fn settings(&self) -> &[usize] {
        &self.settings
    }

    pub fn parties(&self) -> usize {
        self.settings.len()
    }

    /// Length of any coefficient tensor over this scenario.
    pub fn dimension(&self) -> usize {
        self.settings.iter().product()
    }

    /// Total number of local settings, i.e. outcome bits of a strategy.
    pub fn total_settings(&self) -> usize {
        self.settings.iter().sum()
    }

    /// Row-major flat index of a setting tuple (party 0 most significant).
    pub fn flat_index(&self, tuple: &[usize]) -> Result<usize> {
        if tuple.len() != self.parties() {
            return Err(Error::ShapeMismatch(format!(
                "setting tuple {tuple:?} has {} entries, scenario has {} parties",
                tuple.len(),
                self.parties()
            )));
        }
        let mut flat = 0;
        for (p, (&s, &m)) in tuple.iter().zip(&self.settings).enumerate() {
            if s >= m {
                return Err(Error::ShapeMismatch(format!(
                    "index out of bounds: setting {s} for party {p} with {m} settings"
                )));
            }
            flat = flat * m + s;
        }
        Ok(flat)
    }

    /// Inverse of [`Scenario::flat_index`].
    pub fn tuple_of(&self, mut flat: usize) -> Vec<usize> {
        let mut tuple = vec![0; self.parties()];
        for (slot, &m) in tuple.iter_mut().zip(&self.settings).rev() {
            *slot = flat % m;
            flat /= m;
        }
        tuple
    }

    /// All setting tuples in flat-index order.
    pub fn tuples(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.dimension()).map(move |i| self.tuple_of(i))
    }

    fn check_same(&self, other: &Scenario) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ScenarioMismatch {
                left: self.settings.clone(),
                right: other.settings.clone(),
            })
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.settings.iter().map(|m| m.to_string()).collect();
        write!(f, "{}", parts.join("x"))
    }
}

/// One ±1 outcome per setting per party.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DeterministicStrategy {
    outcomes: Vec<Vec<i8>>,
}

impl DeterministicStrategy {
    pub fn new(outcomes: Vec<Vec<i8>>) -> Result<Self> {
        for (p, party) in outcomes.iter().enumerate() {
            if party.is_empty() {
                return Err(Error::InvalidStrategy(format!("party {p} has no outcomes")));
            }
            if let Some(v) = party.iter().find(|&&v| v != 1 && v != -1) {
                return Err(Error::InvalidStrategy(format!(
                    "outcome {v} for party {p} is not ±1"
                )));
            }
        }
        Ok(Self { outcomes })
    }

    /// Decodes the `index`-th strategy in lexicographic order of the
    /// concatenated outcome bits, bit 0 meaning +1 and bit 1 meaning -1.
    pub fn from_index(scenario: &Scenario, index: u128) -> Self {
        let total = scenario.total_settings();
        let mut bit = total;
        let outcomes = scenario
            .settings()
            .iter()
            .map(|&m| {
                (0..m)
                    .map(|_| {
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
        Self { outcomes }
    }

    pub fn outcomes(&self) -> &[Vec<i8>] {
        &self.outcomes
    }

    pub fn matches(&self, scenario: &Scenario) -> bool {
        self.outcomes.len() == scenario.parties()
            && self
                .outcomes
                .iter()
                .zip(scenario.settings())
                .all(|(o, &m)| o.len() == m)
    }

    pub fn check_matches(&self, scenario: &Scenario) -> Result<()> {
        if self.matches(scenario) {
            Ok(())
        } else {
            let shape: Vec<usize> = self.outcomes.iter().map(Vec::len).collect();
            Err(Error::ShapeMismatch(format!(
                "strategy shape {shape:?} does not match scenario {scenario}"
            )))
        }
    }

    /// Returns a copy with every outcome of `party` negated.
    pub fn negate_party(&self, party: usize) -> Self {
        let mut out = self.clone();
        for v in &mut out.outcomes[party] {
            *v = -*v;
        }
        out
    }

    /// The admissible vector: tensor product of the outcome vectors, in flat
    /// index order.
    pub fn vertex(&self) -> Vec<i8> {
        let mut v: Vec<i8> = vec![1];
        for party in &self.outcomes {
            v = v
                .iter()
                .flat_map(|&x| party.iter().map(move |&y| x * y))
                .collect();
        }
        v
    }
}

impl fmt::Display for DeterministicStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .outcomes
            .iter()
            .map(|o| {
                let s: Vec<&str> = o.iter().map(|&v| if v > 0 { "+" } else { "-" }).collect();
                s.concat()
            })
            .collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Dense tensor of exact rational coefficients over a scenario.
///
/// The value on a strategy is the sum over setting tuples of the coefficient
/// times the product of one outcome per party.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BellExpression {
    scenario: Scenario,
    coeffs: Vec<Rational>,
}

impl BellExpression {
    pub fn zeros(scenario: Scenario) -> Self {
        let coeffs = vec![Rational::zero(); scenario.dimension()];
        Self { scenario, coeffs }
    }

    pub fn from_coefficients(scenario: Scenario, coeffs: Vec<Rational>) -> Result<Self> {
        if coeffs.len() != scenario.dimension() {
            return Err(Error::ShapeMismatch(format!(
                "{} coefficients for scenario {scenario} of dimension {}",
                coeffs.len(),
                scenario.dimension()
            )));
        }
        Ok(Self { scenario, coeffs })
    }

    /// Sparse construction; repeated tuples accumulate.
    pub fn from_terms<I>(scenario: Scenario, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, Rational)>,
    {
        let mut expr = Self::zeros(scenario);
        for (tuple, c) in terms {
            let i = expr.scenario.flat_index(&tuple)?;
            expr.coeffs[i] += c;
        }
        Ok(expr)
    }

    /// Single correlation term with coefficient 1.
    pub fn delta(scenario: Scenario, tuple: &[usize]) -> Result<Self> {
        Self::from_terms(scenario, [(tuple.to_vec(), Rational::one())])
    }

    /// `coefficient` times a product of per-party linear forms in the local
    /// observables. Each form lists `(setting, weight)` pairs, so
    /// `A0 (B1 + B2)` is `[[(0, 1)], [(1, 1), (2, 1)]]`.
    pub fn from_product(
        scenario: Scenario,
        coefficient: Rational,
        forms: &[&[(usize, i64)]],
    ) -> Result<Self> {
        if forms.len() != scenario.parties() {
            return Err(Error::ShapeMismatch(format!(
                "{} linear forms for {} parties",
                forms.len(),
                scenario.parties()
            )));
        }
        let mut terms: Vec<(Vec<usize>, Rational)> = vec![(Vec::new(), coefficient)];
        for form in forms {
            let mut next = Vec::with_capacity(terms.len() * form.len());
            for (tuple, c) in &terms {
                for &(s, w) in form.iter() {
                    let mut t = tuple.clone();
                    t.push(s);
                    next.push((t, c * Rational::from_integer(BigInt::from(w))));
                }
            }
            terms = next;
        }
        Self::from_terms(scenario, terms)
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coefficient(&self, tuple: &[usize]) -> Result<&Rational> {
        Ok(&self.coeffs[self.scenario.flat_index(tuple)?])
    }

    /// Nonzero terms in flat-index (lexicographic tuple) order.
    pub fn terms(&self) -> impl Iterator<Item = (Vec<usize>, &Rational)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.scenario.tuple_of(i), c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn scaled(&self, factor: &Rational) -> Self {
        Self {
            scenario: self.scenario.clone(),
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(rational_to_f64).collect()
    }

    /// Exact value on a deterministic strategy.
    pub fn evaluate(&self, strategy: &DeterministicStrategy) -> Result<Rational> {
        strategy.check_matches(&self.scenario)?;
        let mut acc = Rational::zero();
        for (c, v) in self.coeffs.iter().zip(strategy.vertex()) {
            if c.is_zero() {
                continue;
            }
            if v > 0 {
                acc += c;
            } else {
                acc -= c;
            }
        }
        Ok(acc)
    }

    /// Signed relabeling of local settings.
    pub fn apply_map(&self, map: &SignedSettingMap) -> Result<Self> {
        map.check_shape(&self.scenario)?;
        let mut out = Self::zeros(self.scenario.clone());
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let tuple = self.scenario.tuple_of(i);
            let mut sign = 1i8;
            let image: Vec<usize> = tuple
                .iter()
                .zip(&map.parties)
                .map(|(&s, pm)| {
                    sign *= pm.signs[s];
                    pm.perm[s]
                })
                .collect();
            let j = self.scenario.flat_index(&image)?;
            if sign > 0 {
                out.coeffs[j] += c;
            } else {
                out.coeffs[j] -= c;
            }
        }
        Ok(out)
    }

    /// Reorders parties: party `order[k]` of `self` becomes party `k`.
    pub fn permute_parties(&self, order: &[usize]) -> Result<Self> {
        let n = self.scenario.parties();
        let mut seen = vec![false; n];
        if order.len() != n || order.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidArgument(format!(
                "{order:?} is not a permutation of {n} parties"
            )));
        }
        let settings = order.iter().map(|&p| self.scenario.settings[p]).collect();
        let scenario = Scenario::new(settings)?;
        let mut out = Self::zeros(scenario);
        for (i, c) in self.coeffs.iter().enumerate() {
            let tuple = self.scenario.tuple_of(i);
            let image: Vec<usize> = order.iter().map(|&p| tuple[p]).collect();
            let j = out.scenario.flat_index(&image)?;
            out.coeffs[j] = c.clone();
        }
        Ok(out)
    }

    /// Prepends a party whose setting `k` carries `blocks[k]`.
    pub(crate) fn stack_new_party(blocks: &[BellExpression]) -> Result<Self> {
        let first = blocks
            .first()
            .ok_or_else(|| Error::InvalidArgument("no blocks to stack".into()))?;
        for b in blocks {
            first.scenario.check_same(&b.scenario)?;
        }
        let mut settings = vec![blocks.len()];
        settings.extend_from_slice(first.scenario.settings());
        let coeffs = blocks.iter().flat_map(|b| b.coeffs.iter().cloned()).collect();
        Self::from_coefficients(Scenario::new(settings)?, coeffs)
    }

    /// Slice at a fixed setting of party 0.
    pub fn block(&self, setting: usize) -> Result<Self> {
        if self.scenario.parties() < 2 {
            return Err(Error::InvalidArgument("cannot slice a single-party expression".into()));
        }
        let rest = Scenario::new(self.scenario.settings[1..].to_vec())?;
        let d = rest.dimension();
        if setting >= self.scenario.settings[0] {
            return Err(Error::ShapeMismatch(format!("setting {setting} out of range")));
        }
        let coeffs = self.coeffs[setting * d..(setting + 1) * d].to_vec();
        Self::from_coefficients(rest, coeffs)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&Rational, &Rational) -> Rational) -> Result<Self> {
        self.scenario.check_same(&other.scenario)?;
        Ok(Self {
            scenario: self.scenario.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }
}

impl fmt::Display for BellExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (tuple, c) in self.terms() {
            let idx: Vec<String> = tuple.iter().map(|s| s.to_string()).collect();
            if c.is_negative() {
                write!(f, "{}{} E[{}]", if first { "-" } else { " - " }, c.abs(), idx.join(","))?;
            } else {
                write!(f, "{}{} E[{}]", if first { "" } else { " + " }, c, idx.join(","))?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Panics on scenario mismatch; use [`BellExpression::try_add`] otherwise.
impl Add for &BellExpression {
    type Output = BellExpression;
    fn add(self, rhs: Self) -> BellExpression {
        self.try_add(rhs).expect("scenario mismatch in expression addition")
    }
}

/// Panics on scenario mismatch; use [`BellExpression::try_sub`] otherwise.
impl Sub for &BellExpression {
    type Output = BellExpression;
    fn sub(self, rhs: Self) -> BellExpression {
        self.try_sub(rhs).expect("scenario mismatch in expression subtraction")
    }
}

impl Neg for &BellExpression {
    type Output = BellExpression;
    fn neg(self) -> BellExpression {
        BellExpression {
            scenario: self.scenario.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

/// Coefficient-wise exact linear combination.
pub fn linear_combine(terms: &[(Rational, &BellExpression)]) -> Result<BellExpression> {
    let (_, first) = terms
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty linear combination".into()))?;
    let mut out = BellExpression::zeros(first.scenario.clone());
    for (w, e) in terms {
        out.scenario.check_same(&e.scenario)?;
        if w.is_zero() {
            continue;
        }
        for (o, c) in out.coeffs.iter_mut().zip(&e.coeffs) {
            *o += w * c;
        }
    }
    Ok(out)
}

pub(crate) fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
    })
}

/// Relabeling of one party's settings: the observable at setting `i` is
/// replaced by `signs[i]` times the observable at setting `perm[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartyMap {
    perm: Vec<usize>,
    signs: Vec<i8>,
}

impl PartyMap {
    pub fn new(perm: Vec<usize>, signs: Vec<i8>) -> Result<Self> {
        let m = perm.len();
        if signs.len() != m {
            return Err(Error::InvalidMap(format!(
                "{} signs for a permutation of {m} settings",
                signs.len()
            )));
        }
        let mut seen = vec![false; m];
        for &j in &perm {
            if j >= m || std::mem::replace(&mut seen[j], true) {
                return Err(Error::InvalidMap(format!("{perm:?} is not a bijection on 0..{m}")));
            }
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidMap(format!("signs {signs:?} must be ±1")));
        }
        Ok(Self { perm, signs })
    }

    pub fn identity(m: usize) -> Self {
        Self {
            perm: (0..m).collect(),
            signs: vec![1; m],
        }
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn inverse(&self) -> Self {
        let m = self.perm.len();
        let mut perm = vec![0; m];
        let mut signs = vec![1; m];
        for (i, (&j, &s)) in self.perm.iter().zip(&self.signs).enumerate() {
            perm[j] = i;
            signs[j] = s;
        }
        Self { perm, signs }
    }

    /// `self` applied first, then `next`.
    pub fn then(&self, next: &PartyMap) -> Result<Self> {
        if next.perm.len() != self.perm.len() {
            return Err(Error::InvalidMap("composing maps of different sizes".into()));
        }
        let perm = self.perm.iter().map(|&j| next.perm[j]).collect();
        let signs = self
            .perm
            .iter()
            .zip(&self.signs)
            .map(|(&j, &s)| s * next.signs[j])
            .collect();
        Ok(Self { perm, signs })
    }
}

/// Per-party signed relabeling of settings.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignedSettingMap {
    parties: Vec<PartyMap>,
}

impl SignedSettingMap {
    pub fn new(parties: Vec<PartyMap>) -> Self {
        Self { parties }
    }

    /// The same party map on each of `parties` observers.
    pub fn uniform(parties: usize, map: PartyMap) -> Self {
        Self {
            parties: vec![map; parties],
        }
    }

    pub fn identity(scenario: &Scenario) -> Self {
        Self {
            parties: scenario.settings().iter().map(|&m| PartyMap::identity(m)).collect(),
        }
    }

    pub fn parties(&self) -> &[PartyMap] {
        &self.parties
    }

    pub fn inverse(&self) -> Self {
        Self {
            parties: self.parties.iter().map(PartyMap::inverse).collect(),
        }
    }

    pub fn then(&self, next: &SignedSettingMap) -> Result<Self> {
        if self.parties.len() != next.parties.len() {
            return Err(Error::InvalidMap("composing maps with different party counts".into()));
        }
        let parties = self
            .parties
            .iter()
            .zip(&next.parties)
            .map(|(a, b)| a.then(b))
            .collect::<Result<_>>()?;
        Ok(Self { parties })
    }

    /// Applies the map to a strategy, so that
    /// `expr.apply_map(m).evaluate(s) == expr.evaluate(m.pull_back(s))`.
    pub fn pull_back(&self, strategy: &DeterministicStrategy) -> Result<DeterministicStrategy> {
        if strategy.outcomes().len() != self.parties.len() {
            return Err(Error::ShapeMismatch("strategy/map party count".into()));
        }
        let outcomes = strategy
            .outcomes()
            .iter()
            .zip(&self.parties)
            .map(|(o, pm)| {
                if o.len() != pm.perm.len() {
                    return Err(Error::ShapeMismatch("strategy/map setting count".into()));
                }
                Ok(pm.perm.iter().zip(&pm.signs).map(|(&j, &s)| s * o[j]).collect())
            })
            .collect::<Result<_>>()?;
        DeterministicStrategy::new(outcomes)
    }

    fn check_shape(&self, scenario: &Scenario) -> Result<()> {
        let ok = self.parties.len() == scenario.parties()
            && self
                .parties
                .iter()
                .zip(scenario.settings())
                .all(|(pm, &m)| pm.perm.len() == m);
        if ok {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!(
                "setting map shape does not match scenario {scenario}"
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chsh() -> BellExpression {
        let s = Scenario::new(vec![2, 2]).unwrap();
        BellExpression::from_terms(
            s,
            [
                (vec![0, 0], ratio(1, 2)),
                (vec![0, 1], ratio(1, 2)),
                (vec![1, 0], ratio(1, 2)),
                (vec![1, 1], ratio(-1, 2)),
            ],
        )
        .unwrap()
    }

    fn strat(o: &[&[i8]]) -> DeterministicStrategy {
        DeterministicStrategy::new(o.iter().map(|p| p.to_vec()).collect()).unwrap()
    }

    #[test]
    fn scenario_rejects_zero_settings() {
        assert!(Scenario::new(vec![2, 0]).is_err());
        assert!(Scenario::new(vec![]).is_err());
        assert_eq!(Scenario::new(vec![3, 3, 3]).unwrap().dimension(), 27);
    }

    #[test]
    fn flat_index_roundtrip() {
        let s = Scenario::new(vec![2, 3, 4]).unwrap();
        for i in 0..s.dimension() {
            assert_eq!(s.flat_index(&s.tuple_of(i)).unwrap(), i);
        }
        assert!(s.flat_index(&[0, 3, 0]).is_err());
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(chsh().evaluate(&strat(&[&[1, 1], &[1, 1]])).unwrap(), ratio(1, 1));
        let zero = BellExpression::zeros(Scenario::new(vec![2, 2]).unwrap());
        assert!(zero.evaluate(&strat(&[&[1, -1], &[-1, 1]])).unwrap().is_zero());
        let e00 = BellExpression::delta(Scenario::new(vec![2, 2]).unwrap(), &[0, 0]).unwrap();
        assert_eq!(e00.evaluate(&strat(&[&[1, 1], &[1, 1]])).unwrap(), ratio(1, 1));
    }

    #[test]
    fn evaluate_shape_mismatch() {
        assert!(chsh().evaluate(&strat(&[&[1, 1, 1], &[1, 1]])).is_err());
        assert!(chsh().evaluate(&strat(&[&[1, 1]])).is_err());
    }

    #[test]
    fn strategy_rejects_non_unit_outcomes() {
        assert!(DeterministicStrategy::new(vec![vec![1, 0]]).is_err());
        assert!(DeterministicStrategy::new(vec![vec![]]).is_err());
    }

    #[test]
    fn strategy_index_order_is_lexicographic() {
        let s = Scenario::new(vec![2, 1]).unwrap();
        let first = DeterministicStrategy::from_index(&s, 0);
        assert_eq!(first.outcomes(), &[vec![1, 1], vec![1]]);
        let one = DeterministicStrategy::from_index(&s, 1);
        assert_eq!(one.outcomes(), &[vec![1, 1], vec![-1]]);
        let last = DeterministicStrategy::from_index(&s, 7);
        assert_eq!(last.outcomes(), &[vec![-1, -1], vec![-1]]);
    }

    #[test]
    fn linear_combine_cancels() {
        let i = chsh();
        let z = linear_combine(&[(ratio(1, 1), &i), (ratio(-1, 1), &i)]).unwrap();
        assert!(z.is_zero());
        assert!(linear_combine(&[]).is_err());
        let other = BellExpression::zeros(Scenario::new(vec![3, 2]).unwrap());
        assert!(matches!(
            linear_combine(&[(ratio(1, 1), &i), (ratio(1, 1), &other)]),
            Err(Error::ScenarioMismatch { .. })
        ));
    }

    #[test]
    fn from_product_expands() {
        // A0 (B0 + B1) - A1 (B0 - B1) over 2x2, times 1/2 gives CHSH up to A relabel
        let s = Scenario::new(vec![2, 2]).unwrap();
        let a = BellExpression::from_product(s.clone(), ratio(1, 2), &[&[(0, 1), (1, 1)], &[(0, 1)]]).unwrap();
        let b = BellExpression::from_product(s, ratio(1, 2), &[&[(0, 1), (1, -1)], &[(1, 1)]]).unwrap();
        assert_eq!(&a + &b, chsh());
    }

    #[test]
    fn identity_map_is_noop() {
        let e = chsh();
        let id = SignedSettingMap::identity(e.scenario());
        assert_eq!(e.apply_map(&id).unwrap(), e);
    }

    #[test]
    fn map_then_inverse_is_identity() {
        let e = chsh();
        let pm = PartyMap::new(vec![1, 0], vec![-1, 1]).unwrap();
        let m = SignedSettingMap::uniform(2, pm);
        let back = e.apply_map(&m).unwrap().apply_map(&m.inverse()).unwrap();
        assert_eq!(back, e);
        let composed = m.then(&m.inverse()).unwrap();
        assert_eq!(composed, SignedSettingMap::identity(e.scenario()));
    }

    #[test]
    fn party_map_rejects_non_bijection() {
        assert!(PartyMap::new(vec![0, 0], vec![1, 1]).is_err());
        assert!(PartyMap::new(vec![0, 2], vec![1, 1]).is_err());
        assert!(PartyMap::new(vec![0, 1], vec![1, 2]).is_err());
    }

    #[test]
    fn pull_back_matches_apply_map() {
        let e = chsh();
        let m = SignedSettingMap::new(vec![
            PartyMap::new(vec![1, 0], vec![1, -1]).unwrap(),
            PartyMap::identity(2),
        ]);
        let mapped = e.apply_map(&m).unwrap();
        for i in 0..16 {
            let s = DeterministicStrategy::from_index(e.scenario(), i);
            assert_eq!(
                mapped.evaluate(&s).unwrap(),
                e.evaluate(&m.pull_back(&s).unwrap()).unwrap()
            );
        }
    }

    #[test]
    fn permute_parties_moves_axes() {
        let s = Scenario::new(vec![2, 3]).unwrap();
        let e = BellExpression::delta(s, &[1, 2]).unwrap();
        let p = e.permute_parties(&[1, 0]).unwrap();
        assert_eq!(p.scenario().settings(), &[3, 2]);
        assert_eq!(p.coefficient(&[2, 1]).unwrap(), &ratio(1, 1));
        assert!(e.permute_parties(&[0, 0]).is_err());
    }
}
