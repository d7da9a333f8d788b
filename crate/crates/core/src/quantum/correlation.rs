//! Pauli-product correlation tensors and coefficient contraction.

use num_complex::Complex64;

use super::settings::{MeasurementSettings, Triad};
use super::state::QuantumState;
use super::tensor::RealTensor;
use crate::error::{Error, Result};
use crate::scenario::{rational_to_f64, BellExpression};

/// Slack allowed on `|T| <= 1` before a tensor is rejected.
pub const CORRELATION_SLACK: f64 = 1e-9;

/// `T[i_0, .., i_{n-1}] = Tr(rho sigma_{i_0} x .. x sigma_{i_{n-1}})` with
/// indices 0, 1, 2 for the three local basis directions.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationTensor {
    parties: usize,
    tensor: RealTensor,
}

impl CorrelationTensor {
    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn tensor(&self) -> &RealTensor {
        &self.tensor
    }

    pub fn get(&self, index: &[usize]) -> f64 {
        self.tensor.get(index)
    }

    pub fn sum_squares(&self) -> f64 {
        self.tensor.sum_squares()
    }
}

/// `Tr(rho P)` for the Pauli string with per-qubit codes 0=x, 1=y, 2=z.
/// Qubit `q` is bit `n - 1 - q` of a basis index.
fn pauli_expectation(rho: &super::matrix::CMatrix, n: usize, codes: &[usize]) -> f64 {
    let dim = 1usize << n;
    let mut xmask = 0usize;
    let mut ymask = 0usize;
    let mut zmask = 0usize;
    for (q, &c) in codes.iter().enumerate() {
        let bit = 1 << (n - 1 - q);
        match c {
            0 => xmask |= bit,
            1 => {
                xmask |= bit;
                ymask |= bit;
            }
            _ => zmask |= bit,
        }
    }
    // P|r> = phase(r) |r ^ xmask>, so Tr(rho P) = sum_r rho[r][r ^ x] phase(r)
    let mut acc = Complex64::new(0.0, 0.0);
    for r in 0..dim {
        let mut phase = Complex64::new(1.0, 0.0);
        // sigma_y |0> = i|1>, sigma_y |1> = -i|0>
        let ybits = r & ymask;
        let ones = ybits.count_ones();
        let zeros = ymask.count_ones() - ones;
        let i_pow = (zeros + 3 * ones) % 4;
        phase *= Complex64::i().powu(i_pow);
        if (r & zmask).count_ones() % 2 == 1 {
            phase = -phase;
        }
        acc += rho[(r, r ^ xmask)] * phase;
    }
    acc.re
}

/// All `3^n` Pauli-product expectation values, optionally in rotated local
/// bases (one triad per party).
pub fn correlation_tensor(
    state: &QuantumState,
    bases: Option<&[Triad]>,
) -> Result<CorrelationTensor> {
    let n = state.qubits();
    let shape = vec![3; n];
    let mut tensor = RealTensor::zeros(shape);
    let indices: Vec<Vec<usize>> = tensor.indices().collect();
    for idx in indices {
        let v = pauli_expectation(state.density(), n, &idx);
        tensor.set(&idx, v);
    }
    if let Some(bases) = bases {
        if bases.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "{} bases for {n} parties",
                bases.len()
            )));
        }
        for (p, b) in bases.iter().enumerate() {
            let checked = Triad::new(b.0)?;
            tensor = tensor.mode_product(p, &checked.lab_to_basis(), 3);
        }
    }
    if let Some(bad) = tensor.data().iter().find(|x| x.abs() > 1.0 + CORRELATION_SLACK) {
        return Err(Error::InvalidState(format!("correlation {bad} outside [-1, 1]")));
    }
    Ok(CorrelationTensor { parties: n, tensor })
}

/// `sum T^2` in the computational bases; local rotations leave it unchanged.
pub fn sum_squared_correlations(state: &QuantumState) -> f64 {
    correlation_tensor(state, None)
        .expect("computational bases are orthonormal")
        .sum_squares()
}

/// Coefficient tensor of `expr` as floats, shaped by its scenario.
pub(crate) fn coefficient_tensor(expr: &BellExpression) -> RealTensor {
    RealTensor::new(
        expr.scenario().settings().to_vec(),
        expr.coefficients().iter().map(rational_to_f64).collect(),
    )
}

/// `alpha[c_0, .., c_{n-1}] = sum_s coeff[s] prod_p (v_{p, s_p} . X^p_{c_p})`,
/// so that `<T, alpha> = Tr(rho B)` when `T` uses the same bases.
pub fn contract_coefficients(
    expr: &BellExpression,
    settings: &MeasurementSettings,
    bases: Option<&[Triad]>,
) -> Result<RealTensor> {
    settings.check_matches(expr.scenario())?;
    let n = expr.scenario().parties();
    if let Some(b) = bases {
        if b.len() != n {
            return Err(Error::ShapeMismatch(format!("{} bases for {n} parties", b.len())));
        }
    }
    let mut alpha = coefficient_tensor(expr);
    for p in 0..n {
        let m = match bases {
            Some(b) => settings.party_matrix_in(p, &Triad::new(b[p].0)?),
            None => settings.party_matrix(p),
        };
        alpha = alpha.mode_product(p, &m, 3);
    }
    Ok(alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::state::make_state;

    #[test]
    fn ghz_parity_and_w_parity() {
        let ghz = correlation_tensor(&make_state("ghz4", &[]).unwrap(), None).unwrap();
        assert!((ghz.get(&[2, 2, 2, 2]) - 1.0).abs() < 1e-15);
        assert!((ghz.get(&[0, 0, 0, 0]) - 1.0).abs() < 1e-15);
        // two y's flip the sign: <XXYY> = -1 for GHZ
        assert!((ghz.get(&[0, 0, 1, 1]) + 1.0).abs() < 1e-15);
        let w = correlation_tensor(&make_state("w4", &[]).unwrap(), None).unwrap();
        assert!((w.get(&[2, 2, 2, 2]) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_qubit_bloch_vector() {
        let s = QuantumState::from_amplitudes(&[
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
        ])
        .unwrap();
        let t = correlation_tensor(&s, None).unwrap();
        // |+i> has Bloch vector (0, 1, 0)
        assert!(t.get(&[0]).abs() < 1e-15);
        assert!((t.get(&[1]) - 1.0).abs() < 1e-15);
        assert!(t.get(&[2]).abs() < 1e-15);
    }

    #[test]
    fn product_state_sum() {
        let s = make_state("product-zeros", &[4.0]).unwrap();
        assert!((sum_squared_correlations(&s) - 1.0).abs() < 1e-15);
        let g = make_state("ghz4", &[]).unwrap();
        assert!((sum_squared_correlations(&g) - 9.0).abs() < 1e-12);
    }

    #[test]
    fn single_correlator_contraction() {
        let e = BellExpression::delta(crate::Scenario::new(vec![1, 1]).unwrap(), &[0, 0]).unwrap();
        let s = MeasurementSettings::new(vec![vec![[0.0, 0.0, 1.0]], vec![[0.0, 0.0, 1.0]]]).unwrap();
        let a = contract_coefficients(&e, &s, None).unwrap();
        for idx in a.indices() {
            let expected = if idx == [2, 2] { 1.0 } else { 0.0 };
            assert_eq!(a.get(&idx), expected);
        }
    }
}
