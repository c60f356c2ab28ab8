//! Quantized density evolution for LDPC ensembles over binary-input channels,
//! including non-symmetric ones, plus a Monte Carlo belief-propagation
//! simulator for cross-checks.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod channel;
mod convolution;
pub mod de;
pub mod degree;
pub mod density;
pub mod error;
pub mod gamma;
pub mod grid;
pub mod mc;

pub use channel::{Channel, ChannelFamily, ChannelParameter};
pub use de::{
    de_step_coset, de_step_linear, decodable, run_de, stability_check, threshold_search, DeConfig,
    DeMode, DeTrace, IterationRecord, TerminalStatus, ThresholdConfig, ThresholdResult,
};
pub use degree::{DegreeDistribution, EdgePolynomial};
pub use density::{lambda_apply, Density, DensityPair, SignedDensity};
pub use error::{Error, Result};
pub use gamma::{gamma_inverse, gamma_transform, rho_apply, GammaDensity};
pub use grid::LlrGrid;
