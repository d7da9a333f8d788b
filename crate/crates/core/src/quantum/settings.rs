use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::Scenario;

/// Tolerance on the norm of a measurement direction.
pub const UNIT_TOLERANCE: f64 = 1e-12;
/// Tolerance on the orthonormality of a local basis.
pub const TRIAD_TOLERANCE: f64 = 1e-10;

pub type Vec3 = [f64; 3];

pub(crate) fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

/// Uniform random direction on the unit sphere.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    loop {
        let v: Vec3 = [rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)];
        let n = norm(&v);
        if n > 1e-8 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

/// Orthonormal local basis; rows are the basis directions `X1, X2, X3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Triad(pub [Vec3; 3]);

impl Triad {
    pub fn new(rows: [Vec3; 3]) -> Result<Self> {
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { 1.0 } else { 0.0 };
                let d = dot(&rows[i], &rows[j]);
                if (d - expected).abs() > TRIAD_TOLERANCE {
                    return Err(Error::InvalidSettings(format!(
                        "basis is not orthonormal: <X{i}, X{j}> = {d}"
                    )));
                }
            }
        }
        Ok(Self(rows))
    }

    /// The computational x, y, z axes.
    pub fn standard() -> Self {
        Self([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    }

    /// Random rotation of the standard axes (Gram-Schmidt of Gaussian rows).
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let a = random_unit_vector(rng);
        let b = loop {
            let c = random_unit_vector(rng);
            let p = dot(&a, &c);
            let r = [c[0] - p * a[0], c[1] - p * a[1], c[2] - p * a[2]];
            let n = norm(&r);
            if n > 1e-6 {
                break [r[0] / n, r[1] / n, r[2] / n];
            }
        };
        let c = [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ];
        Self([a, b, c])
    }

    pub fn rows(&self) -> &[Vec3; 3] {
        &self.0
    }

    /// Row-major 3x3 matrix with entry `[c][i] = X_i[c]`, mapping lab
    /// components to basis components under a mode product.
    pub(crate) fn lab_to_basis(&self) -> Vec<f64> {
        let mut m = vec![0.0; 9];
        for i in 0..3 {
            for c in 0..3 {
                m[c * 3 + i] = self.0[i][c];
            }
        }
        m
    }

    /// Lab-frame vector with the given basis components.
    pub fn combine(&self, coords: Vec3) -> Vec3 {
        let mut v = [0.0; 3];
        for (i, w) in coords.iter().enumerate() {
            for c in 0..3 {
                v[c] += w * self.0[i][c];
            }
        }
        v
    }
}

/// Local angles of one party: the first two settings are
/// `cos(chi) X1 ± sin(chi) X2`, the third is
/// `sin(theta) sin(phi) X1 + sin(theta) cos(phi) X2 + cos(theta) X3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SettingAngles {
    pub chi: f64,
    pub theta: f64,
    pub phi: f64,
}

/// One unit direction per setting per party. The observable of a setting
/// is `v · sigma`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSettings {
    directions: Vec<Vec<Vec3>>,
}

impl MeasurementSettings {
    pub fn new(directions: Vec<Vec<Vec3>>) -> Result<Self> {
        for (p, party) in directions.iter().enumerate() {
            for (s, v) in party.iter().enumerate() {
                let n = norm(v);
                if (n - 1.0).abs() > UNIT_TOLERANCE || !n.is_finite() {
                    return Err(Error::InvalidSettings(format!(
                        "direction for party {p} setting {s} has norm {n}"
                    )));
                }
            }
        }
        Ok(Self { directions })
    }

    /// Three settings per party from local angles and bases.
    pub fn from_angles(angles: &[SettingAngles], bases: &[Triad]) -> Result<Self> {
        if angles.len() != bases.len() {
            return Err(Error::InvalidSettings(format!(
                "{} angle sets for {} bases",
                angles.len(),
                bases.len()
            )));
        }
        let directions = angles
            .iter()
            .zip(bases)
            .map(|(a, t)| {
                let (sc, cc) = a.chi.sin_cos();
                let (st, ct) = a.theta.sin_cos();
                let (sp, cp) = a.phi.sin_cos();
                vec![
                    t.combine([cc, sc, 0.0]),
                    t.combine([cc, -sc, 0.0]),
                    t.combine([st * sp, st * cp, ct]),
                ]
            })
            .collect();
        Self::new(directions)
    }

    pub fn random<R: Rng + ?Sized>(scenario: &Scenario, rng: &mut R) -> Self {
        Self {
            directions: scenario
                .settings()
                .iter()
                .map(|&m| (0..m).map(|_| random_unit_vector(rng)).collect())
                .collect(),
        }
    }

    /// All settings of every party along `v`.
    pub fn constant(scenario: &Scenario, v: Vec3) -> Result<Self> {
        Self::new(
            scenario
                .settings()
                .iter()
                .map(|&m| vec![v; m])
                .collect(),
        )
    }

    pub fn directions(&self) -> &[Vec<Vec3>] {
        &self.directions
    }

    pub(crate) fn directions_mut(&mut self) -> &mut [Vec<Vec3>] {
        &mut self.directions
    }

    pub fn check_matches(&self, scenario: &Scenario) -> Result<()> {
        let shape: Vec<usize> = self.directions.iter().map(Vec::len).collect();
        if shape == scenario.settings() {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!(
                "settings shape {shape:?} does not match scenario {scenario}"
            )))
        }
    }

    /// Party `p` directions as a row-major `m x 3` matrix.
    pub(crate) fn party_matrix(&self, p: usize) -> Vec<f64> {
        self.directions[p].iter().flat_map(|v| v.iter().copied()).collect()
    }

    /// Party `p` directions expressed in `basis`: row-major `m x 3`.
    pub(crate) fn party_matrix_in(&self, p: usize, basis: &Triad) -> Vec<f64> {
        self.directions[p]
            .iter()
            .flat_map(|v| basis.rows().iter().map(move |x| dot(v, x)))
            .collect()
    }
}
