//! Density matrices on qubits and the named library states.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::eigen::eigh;
use super::matrix::CMatrix;
use crate::error::{Error, Result};

/// Tolerance for Hermiticity and unit trace of a density matrix.
pub const STATE_TOLERANCE: f64 = 1e-12;
/// Most negative eigenvalue accepted for a density matrix.
pub const POSITIVITY_TOLERANCE: f64 = 1e-10;
/// Largest supported qubit count.
pub const MAX_QUBITS: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    qubits: usize,
    rho: CMatrix,
}

fn qubits_for(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::InvalidState(format!("dimension {dim} is not 2^n with n >= 1")));
    }
    let n = dim.trailing_zeros() as usize;
    if n > MAX_QUBITS {
        return Err(Error::InvalidState(format!("{n} qubits exceeds the supported {MAX_QUBITS}")));
    }
    Ok(n)
}

impl QuantumState {
    /// Pure state from amplitudes in the computational basis (party 0 is the
    /// most significant bit). The vector is normalized.
    pub fn from_amplitudes(amplitudes: &[Complex64]) -> Result<Self> {
        let qubits = qubits_for(amplitudes.len())?;
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 1e-300) || !norm.is_finite() {
            return Err(Error::InvalidState("amplitude vector has zero or non-finite norm".into()));
        }
        let psi: Vec<Complex64> = amplitudes.iter().map(|a| a / norm).collect();
        Ok(Self {
            qubits,
            rho: CMatrix::outer(&psi),
        })
    }

    pub fn from_real_amplitudes(amplitudes: &[f64]) -> Result<Self> {
        let a: Vec<Complex64> = amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_amplitudes(&a)
    }

    /// Validated density matrix.
    pub fn from_density(rho: CMatrix) -> Result<Self> {
        let qubits = qubits_for(rho.dim())?;
        let defect = rho.hermitian_defect();
        if defect > STATE_TOLERANCE {
            return Err(Error::InvalidState(format!("density matrix not Hermitian ({defect:e})")));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > STATE_TOLERANCE || tr.im.abs() > STATE_TOLERANCE {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let min = eigh(&rho)?.values.last().copied().unwrap_or(0.0);
        if min < -POSITIVITY_TOLERANCE {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { qubits, rho })
    }

    pub fn maximally_mixed(qubits: usize) -> Result<Self> {
        let dim = 1usize << qubits;
        qubits_for(dim)?;
        Ok(Self {
            qubits,
            rho: CMatrix::identity(dim).scaled(1.0 / dim as f64),
        })
    }

    /// Convex combination; weights must be non-negative and sum to 1.
    pub fn mixture(parts: &[(f64, &QuantumState)]) -> Result<Self> {
        let (_, first) = parts
            .first()
            .ok_or_else(|| Error::InvalidState("empty mixture".into()))?;
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        if parts.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > STATE_TOLERANCE {
            return Err(Error::InvalidState(format!("mixture weights sum to {total}")));
        }
        let mut rho = CMatrix::zeros(first.rho.dim());
        for (w, s) in parts {
            if s.qubits != first.qubits {
                return Err(Error::InvalidState("mixing states of different sizes".into()));
            }
            rho.add_scaled(*w, &s.rho);
        }
        Ok(Self {
            qubits: first.qubits,
            rho,
        })
    }

    /// `p rho + (1 - p) I / 2^n`.
    pub fn depolarized(&self, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("visibility {p} outside [0, 1]")));
        }
        let noise = Self::maximally_mixed(self.qubits)?;
        Self::mixture(&[(p, self), (1.0 - p, &noise)])
    }

    /// Haar-random pure state.
    pub fn random_pure<R: Rng + ?Sized>(qubits: usize, rng: &mut R) -> Result<Self> {
        let dim = 1usize << qubits;
        let amps: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self::from_amplitudes(&amps)
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn density(&self) -> &CMatrix {
        &self.rho
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        self.rho.trace_product(&self.rho).re
    }

    /// `Re Tr(rho · op)`.
    pub fn expectation(&self, op: &CMatrix) -> Result<f64> {
        if op.dim() != self.rho.dim() {
            return Err(Error::ShapeMismatch(format!(
                "operator of dimension {} on a {}-qubit state",
                op.dim(),
                self.qubits
            )));
        }
        Ok(self.rho.trace_product(op).re)
    }
}

/// Library of named pure states.
#[derive(Debug, Clone, PartialEq)]
pub enum NamedState {
    Ghz4,
    /// `cos(lambda)|0000> + sin(lambda)|1111>`, `lambda` in `[0, pi/4]`.
    GeneralizedGhz(f64),
    W4,
    /// Four-photon parametric down-conversion state.
    Pdc,
    /// Four-qubit state that teleports an arbitrary two-qubit state.
    Chi,
    Cluster4,
    /// `(|00> + |11>)/sqrt(2)`.
    BellPair,
    Ghz(usize),
    ProductZeros(usize),
    Custom(Vec<Complex64>),
}

fn basis_amplitudes(qubits: usize, terms: &[(&str, f64)]) -> Vec<f64> {
    let mut a = vec![0.0; 1 << qubits];
    for (bits, w) in terms {
        debug_assert_eq!(bits.len(), qubits);
        a[usize::from_str_radix(bits, 2).expect("binary label")] += w;
    }
    a
}

fn kron_vec(parts: &[[f64; 2]]) -> Vec<f64> {
    let mut v = vec![1.0];
    for p in parts {
        v = v.iter().flat_map(|x| p.iter().map(move |y| x * y)).collect();
    }
    v
}

impl NamedState {
    /// Parses `ghz4`, `w4`, `pdc`, `chi`, `cluster4`, `bell-pair`,
    /// `generalized-ghz` (one parameter, radians), `ghz` and `product-zeros`
    /// (one parameter, qubit count).
    pub fn parse(name: &str, params: &[f64]) -> Result<Self> {
        let want = |k: usize| -> Result<()> {
            if params.len() == k {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!(
                    "state {name} takes {k} parameter(s), got {}",
                    params.len()
                )))
            }
        };
        let count = |x: f64| -> Result<usize> {
            if x.fract() == 0.0 && x >= 1.0 && x <= MAX_QUBITS as f64 {
                Ok(x as usize)
            } else {
                Err(Error::InvalidArgument(format!("qubit count {x} outside 1..={MAX_QUBITS}")))
            }
        };
        let state = match name {
            "ghz4" => {
                want(0)?;
                Self::Ghz4
            }
            "w4" => {
                want(0)?;
                Self::W4
            }
            "pdc" => {
                want(0)?;
                Self::Pdc
            }
            "chi" => {
                want(0)?;
                Self::Chi
            }
            "cluster4" => {
                want(0)?;
                Self::Cluster4
            }
            "bell-pair" => {
                want(0)?;
                Self::BellPair
            }
            "generalized-ghz" => {
                want(1)?;
                Self::GeneralizedGhz(params[0])
            }
            "ghz" => {
                want(1)?;
                Self::Ghz(count(params[0])?)
            }
            "product-zeros" => {
                want(1)?;
                Self::ProductZeros(count(params[0])?)
            }
            "custom" => {
                return Err(Error::InvalidArgument(
                    "custom states need amplitudes; use NamedState::Custom".into(),
                ))
            }
            other => return Err(Error::InvalidArgument(format!("unknown state {other:?}"))),
        };
        Ok(state)
    }

    pub fn build(&self) -> Result<QuantumState> {
        let h = 0.5;
        match self {
            Self::Ghz4 => Self::Ghz(4).build(),
            Self::GeneralizedGhz(lambda) => {
                if !(0.0..=FRAC_PI_4 + 1e-12).contains(lambda) {
                    return Err(Error::InvalidArgument(format!(
                        "lambda {lambda} outside [0, pi/4]"
                    )));
                }
                let (s, c) = lambda.sin_cos();
                QuantumState::from_real_amplitudes(&basis_amplitudes(4, &[("0000", c), ("1111", s)]))
            }
            Self::W4 => QuantumState::from_real_amplitudes(&basis_amplitudes(
                4,
                &[("0001", h), ("0010", h), ("0100", h), ("1000", h)],
            )),
            Self::Pdc => {
                let r = (1.0f64 / 3.0).sqrt();
                QuantumState::from_real_amplitudes(&basis_amplitudes(
                    4,
                    &[
                        ("0011", r),
                        ("1100", r),
                        ("0101", -r * h),
                        ("0110", r * h),
                        ("1001", r * h),
                        ("1010", -r * h),
                    ],
                ))
            }
            Self::Chi => {
                let r = 1.0 / (2.0 * 2f64.sqrt());
                QuantumState::from_real_amplitudes(&basis_amplitudes(
                    4,
                    &[
                        ("0000", r),
                        ("0011", -r),
                        ("0101", -r),
                        ("0110", r),
                        ("1001", r),
                        ("1010", r),
                        ("1100", r),
                        ("1111", r),
                    ],
                ))
            }
            Self::Cluster4 => {
                let p = [FRAC_1_SQRT_2, FRAC_1_SQRT_2];
                let m = [FRAC_1_SQRT_2, -FRAC_1_SQRT_2];
                let z0 = [1.0, 0.0];
                let z1 = [0.0, 1.0];
                let terms = [
                    kron_vec(&[p, z0, p, z0]),
                    kron_vec(&[p, z0, m, z1]),
                    kron_vec(&[m, z1, m, z0]),
                    kron_vec(&[m, z1, p, z1]),
                ];
                let amps: Vec<f64> = (0..16).map(|i| terms.iter().map(|t| t[i] * h).sum()).collect();
                QuantumState::from_real_amplitudes(&amps)
            }
            Self::BellPair => Self::Ghz(2).build(),
            Self::Ghz(n) => {
                qubits_for(1 << n)?;
                let mut a = vec![0.0; 1 << n];
                a[0] = FRAC_1_SQRT_2;
                a[(1 << n) - 1] = FRAC_1_SQRT_2;
                QuantumState::from_real_amplitudes(&a)
            }
            Self::ProductZeros(n) => {
                qubits_for(1 << n)?;
                let mut a = vec![0.0; 1 << n];
                a[0] = 1.0;
                QuantumState::from_real_amplitudes(&a)
            }
            Self::Custom(amps) => QuantumState::from_amplitudes(amps),
        }
    }
}

/// Builds a named state; see [`NamedState::parse`].
pub fn make_state(name: &str, params: &[f64]) -> Result<QuantumState> {
    NamedState::parse(name, params)?.build()
}
