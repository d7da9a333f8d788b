//! Violation thresholds for generalized GHZ states.

use super::seesaw::{seesaw_maximize, SeesawConfig};
use super::state::{NamedState, QuantumState};
use crate::error::Result;
use crate::lifting::mabk;

/// An optimum counts as a violation only if it exceeds 1 by more than this.
pub const VIOLATION_MARGIN: f64 = 1e-9;

/// `cos(lambda)|0000> + sin(lambda)|1111>` with `lambda` in radians.
pub fn generalized_ghz(lambda: f64) -> Result<QuantumState> {
    NamedState::GeneralizedGhz(lambda).build()
}

/// Bisection on `[0, 45]` degrees for the angle above which the
/// four-party MABK expression is violated by the generalized GHZ state.
/// Returns degrees; stops when the bracket is narrower than `resolution`.
pub fn mabk_critical_lambda(config: &SeesawConfig, resolution: f64) -> Result<f64> {
    let expr = mabk(4)?;
    let violates = |deg: f64| -> Result<bool> {
        let state = generalized_ghz(deg.to_radians())?;
        Ok(seesaw_maximize(&expr, &state, config)?.value > 1.0 + VIOLATION_MARGIN)
    };
    let (mut lo, mut hi) = (0.0f64, 45.0f64);
    while hi - lo > resolution {
        let mid = 0.5 * (lo + hi);
        if violates(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
