use num_complex::Complex64;
use serde::Serialize;

use super::correlation::contract_coefficients;
use super::eigen::eigh;
use super::matrix::CMatrix;
use super::settings::MeasurementSettings;
use super::state::MAX_QUBITS;
use crate::error::{Error, Result};
use crate::scenario::BellExpression;

/// Eigenvalues closer than this are reported as one degenerate level.
pub const DEGENERACY_TOLERANCE: f64 = 1e-6;

/// Adds `weight * sigma_{c_0} x .. x sigma_{c_{n-1}}` to `out`.
fn add_pauli_string(out: &mut CMatrix, n: usize, codes: &[usize], weight: f64) {
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
    for r in 0..1usize << n {
        let ones = (r & ymask).count_ones();
        let zeros = ymask.count_ones() - ones;
        let mut phase = Complex64::i().powu((zeros + 3 * ones) % 4);
        if (r & zmask).count_ones() % 2 == 1 {
            phase = -phase;
        }
        // column r carries P|r> = phase |r ^ x>
        out[(r ^ xmask, r)] += phase * weight;
    }
}

/// `sum_s coeff[s] (v_{0,s_0} . sigma) x .. x (v_{n-1,s_{n-1}} . sigma)`.
pub fn bell_operator(expr: &BellExpression, settings: &MeasurementSettings) -> Result<CMatrix> {
    let n = expr.scenario().parties();
    if n > MAX_QUBITS {
        return Err(Error::ShapeMismatch(format!(
            "{n} parties exceeds the supported {MAX_QUBITS} qubits"
        )));
    }
    let alpha = contract_coefficients(expr, settings, None)?;
    let mut op = CMatrix::zeros(1 << n);
    for idx in alpha.indices() {
        let w = alpha.get(&idx);
        if w != 0.0 {
            add_pauli_string(&mut op, n, &idx, w);
        }
    }
    Ok(op)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Level {
    pub value: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    /// Descending, with multiplicity.
    pub eigenvalues: Vec<f64>,
    pub levels: Vec<Level>,
}

impl Spectrum {
    pub fn max(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }
}

fn group_levels(values: &[f64]) -> Vec<Level> {
    let mut levels: Vec<(f64, Vec<f64>)> = Vec::new();
    for &v in values {
        match levels.last_mut() {
            Some((first, members)) if (*first - v).abs() <= DEGENERACY_TOLERANCE => members.push(v),
            _ => levels.push((v, vec![v])),
        }
    }
    levels
        .into_iter()
        .map(|(_, m)| Level {
            value: m.iter().sum::<f64>() / m.len() as f64,
            multiplicity: m.len(),
        })
        .collect()
}

pub fn spectrum(op: &CMatrix) -> Result<Spectrum> {
    let eigenvalues = eigh(op)?.values;
    let levels = group_levels(&eigenvalues);
    Ok(Spectrum { eigenvalues, levels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lifting::mabk;
    use crate::scenario::Scenario;

    #[test]
    fn zz_operator() {
        let e = BellExpression::delta(Scenario::new(vec![1, 1]).unwrap(), &[0, 0]).unwrap();
        let z = [0.0, 0.0, 1.0];
        let s = MeasurementSettings::new(vec![vec![z], vec![z]]).unwrap();
        let op = bell_operator(&e, &s).unwrap();
        let zz = CMatrix::pauli_observable(z).kron(&CMatrix::pauli_observable(z));
        assert!(op.max_abs_diff(&zz) < 1e-15);
        let sp = spectrum(&op).unwrap();
        assert_eq!(sp.eigenvalues.len(), 4);
        assert_eq!(
            sp.levels,
            vec![
                Level { value: 1.0, multiplicity: 2 },
                Level { value: -1.0, multiplicity: 2 }
            ]
        );
    }

    #[test]
    fn matches_explicit_kron_sum() {
        let e = mabk(2).unwrap();
        let s = MeasurementSettings::new(vec![
            vec![[0.6, 0.0, 0.8], [0.0, 1.0, 0.0]],
            vec![[0.0, 0.6, 0.8], [1.0, 0.0, 0.0]],
        ])
        .unwrap();
        let mut expected = CMatrix::zeros(4);
        for (t, c) in e.terms() {
            let a = CMatrix::pauli_observable(s.directions()[0][t[0]]);
            let b = CMatrix::pauli_observable(s.directions()[1][t[1]]);
            expected.add_scaled(crate::scenario::rational_to_f64(c), &a.kron(&b));
        }
        assert!(bell_operator(&e, &s).unwrap().max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn chsh_tsirelson_norm() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let s = MeasurementSettings::new(vec![
            vec![[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]],
            vec![[r, 0.0, r], [r, 0.0, -r]],
        ])
        .unwrap();
        let sp = spectrum(&bell_operator(&mabk(2).unwrap(), &s).unwrap()).unwrap();
        let norm = sp.max().abs().max(sp.min().abs());
        assert!((norm - 2f64.sqrt()).abs() < 1e-12, "{norm}");
    }

    #[test]
    fn zero_matrix_spectrum() {
        let sp = spectrum(&CMatrix::zeros(4)).unwrap();
        assert_eq!(sp.levels, vec![Level { value: 0.0, multiplicity: 4 }]);
    }
}
