//! Finite-length Monte Carlo cross-check: random regular Tanner graphs,
//! belief propagation and bit error rate estimation.

pub mod bp;
pub mod gf2;
pub mod graph;
pub mod sim;

pub use bp::BpOutput;
pub use bp::{boxplus, BpDecoder};
pub use gf2::{BitMatrix, Gf2Solver};
pub use graph::TannerGraph;
pub use sim::{estimate_ber, simulate_block, BerEstimate, BlockResult, McConfig, McMode, McSetup};
