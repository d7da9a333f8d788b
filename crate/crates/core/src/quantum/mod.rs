//! Qubit states, Bell operators, correlation tensors and see-saw
//! optimization of quantum violations.
//!
//! Each party holds one qubit and measures `v · sigma` for a unit vector `v`
//! per setting. Party 0 is the leftmost tensor factor.

pub mod correlation;
pub mod eigen;
pub mod matrix;
pub mod operator;
pub mod seesaw;
pub mod settings;
pub mod state;
pub mod tensor;
pub mod threshold;

pub use correlation::{contract_coefficients, correlation_tensor, sum_squared_correlations, CorrelationTensor};
pub use eigen::{eigh, HermitianEigen};
pub use matrix::CMatrix;
pub use operator::{bell_operator, spectrum, Level, Spectrum};
pub use seesaw::{seesaw_maximize, seesaw_trace, violation_factor, SeesawConfig, SeesawResult};
pub use settings::{MeasurementSettings, SettingAngles, Triad, Vec3};
pub use state::{make_state, NamedState, QuantumState};
pub use tensor::RealTensor;
pub use threshold::{generalized_ghz, mabk_critical_lambda};
