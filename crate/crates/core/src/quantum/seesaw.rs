//! Alternating maximization of a Bell expectation over measurement
//! directions.
//!
//! With every other party fixed, the expectation is linear in each setting
//! direction `v` of party `p`: it equals `sum_s v_s . W_s`. The update sets
//! `v_s = W_s / |W_s|`, which never decreases the value. Restarts begin from
//! uniformly random directions; restart `r` draws from stream `r` of a
//! ChaCha generator keyed by the master seed, so the result does not depend
//! on thread scheduling.

use log::{debug, info};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::correlation::{coefficient_tensor, correlation_tensor};
use super::settings::{MeasurementSettings, Vec3};
use super::state::QuantumState;
use super::tensor::RealTensor;
use crate::error::{Error, Result};
use crate::polytope::lr_max;
use crate::scenario::{rational_to_f64, BellExpression, Rational};

/// Effective vectors shorter than this leave the direction unchanged.
const DEGENERATE_NORM: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct SeesawConfig {
    pub restarts: usize,
    pub max_sweeps: usize,
    /// Stop once a sweep improves the value by less than this.
    pub tol: f64,
    pub seed: u64,
}

impl Default for SeesawConfig {
    fn default() -> Self {
        Self {
            restarts: 50,
            max_sweeps: 500,
            tol: 1e-10,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SeesawResult {
    pub value: f64,
    pub settings: MeasurementSettings,
    /// False if the best restart hit the sweep limit.
    pub converged: bool,
    pub best_restart: usize,
    pub sweeps: usize,
}

struct Problem {
    coeffs: RealTensor,
    corr: RealTensor,
}

struct Run {
    value: f64,
    settings: MeasurementSettings,
    converged: bool,
    sweeps: usize,
}

impl Problem {
    fn new(expr: &BellExpression, state: &QuantumState) -> Result<Self> {
        let n = expr.scenario().parties();
        if n != state.qubits() {
            return Err(Error::ShapeMismatch(format!(
                "{n}-party expression on a {}-qubit state",
                state.qubits()
            )));
        }
        Ok(Self {
            coeffs: coefficient_tensor(expr),
            corr: correlation_tensor(state, None)?.tensor().clone(),
        })
    }

    fn parties(&self) -> usize {
        self.coeffs.shape().len()
    }

    fn value(&self, settings: &MeasurementSettings) -> f64 {
        let mut alpha = self.coeffs.clone();
        for p in 0..self.parties() {
            alpha = alpha.mode_product(p, &settings.party_matrix(p), 3);
        }
        alpha.dot(&self.corr)
    }

    /// Row-major `m_p x 3` effective vectors of party `p`.
    fn effective(&self, settings: &MeasurementSettings, p: usize) -> Vec<f64> {
        let mut partial = self.coeffs.clone();
        for q in (0..self.parties()).filter(|&q| q != p) {
            partial = partial.mode_product(q, &settings.party_matrix(q), 3);
        }
        partial.contract_except(&self.corr, p)
    }

    fn sweep(&self, settings: &mut MeasurementSettings) {
        for p in 0..self.parties() {
            let w = self.effective(settings, p);
            for (s, dir) in settings.directions_mut()[p].iter_mut().enumerate() {
                let row: Vec3 = [w[3 * s], w[3 * s + 1], w[3 * s + 2]];
                let norm = super::settings::norm(&row);
                if norm > DEGENERATE_NORM {
                    *dir = [row[0] / norm, row[1] / norm, row[2] / norm];
                }
            }
        }
    }

    fn run(
        &self,
        mut settings: MeasurementSettings,
        config: &SeesawConfig,
        mut trace: Option<&mut Vec<f64>>,
    ) -> Run {
        let mut value = self.value(&settings);
        if let Some(t) = trace.as_deref_mut() {
            t.push(value);
        }
        for sweep in 1..=config.max_sweeps {
            self.sweep(&mut settings);
            let next = self.value(&settings);
            if let Some(t) = trace.as_deref_mut() {
                t.push(next);
            }
            let gain = next - value;
            value = next;
            if gain < config.tol {
                return Run {
                    value,
                    settings,
                    converged: true,
                    sweeps: sweep,
                };
            }
        }
        Run {
            value,
            settings,
            converged: false,
            sweeps: config.max_sweeps,
        }
    }
}

/// Random starting directions of restart `restart`.
pub fn initial_settings(expr: &BellExpression, seed: u64, restart: usize) -> MeasurementSettings {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    MeasurementSettings::random(expr.scenario(), &mut rng)
}

/// Best local maximum of `Tr(rho B)` over `config.restarts` random starts.
pub fn seesaw_maximize(
    expr: &BellExpression,
    state: &QuantumState,
    config: &SeesawConfig,
) -> Result<SeesawResult> {
    if config.restarts == 0 {
        return Err(Error::InvalidArgument("need at least one restart".into()));
    }
    let problem = Problem::new(expr, state)?;
    let runs: Vec<Run> = (0..config.restarts)
        .into_par_iter()
        .map(|r| problem.run(initial_settings(expr, config.seed, r), config, None))
        .collect();
    let (best_restart, best) = runs
        .into_iter()
        .enumerate()
        .reduce(|a, b| if b.1.value > a.1.value { b } else { a })
        .expect("at least one restart");
    if !best.converged {
        debug!("best restart {best_restart} stopped at the sweep limit");
    }
    Ok(SeesawResult {
        value: best.value,
        settings: best.settings,
        converged: best.converged,
        best_restart,
        sweeps: best.sweeps,
    })
}

/// One run from `initial`; returns the value before the first sweep and
/// after every sweep, plus the final settings.
pub fn seesaw_trace(
    expr: &BellExpression,
    state: &QuantumState,
    initial: MeasurementSettings,
    config: &SeesawConfig,
) -> Result<(Vec<f64>, MeasurementSettings)> {
    initial.check_matches(expr.scenario())?;
    let problem = Problem::new(expr, state)?;
    let mut trace = Vec::new();
    let run = problem.run(initial, config, Some(&mut trace));
    Ok((trace, run.settings))
}

/// Optimized expectation divided by the local-realistic bound. Expressions
/// whose bound is not 1 are rescaled first.
pub fn violation_factor(
    expr: &BellExpression,
    state: &QuantumState,
    config: &SeesawConfig,
) -> Result<SeesawResult> {
    let bound = lr_max(expr)?;
    let one = Rational::from_integer(1.into());
    if bound == one {
        return seesaw_maximize(expr, state, config);
    }
    if bound <= Rational::from_integer(0.into()) {
        return Err(Error::InvalidArgument(format!(
            "local bound {bound} is not positive; cannot normalize"
        )));
    }
    info!("rescaling expression by 1/{bound} to normalize its local bound");
    let scaled = expr.scaled(&(one / &bound));
    let result = seesaw_maximize(&scaled, state, config)?;
    debug!("unnormalized optimum {}", result.value * rational_to_f64(&bound));
    Ok(result)
}
