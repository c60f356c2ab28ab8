use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform LLR quantization grid with bin centers at `k * bin_width` for
/// `k` in `-K..=K`.
///
/// The outermost bins at `±M = ±K * bin_width` are saturation buckets: any
/// LLR with `|m| >= M`, including the infinite LLRs of noiseless outputs,
/// lands there.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridSpec", into = "GridSpec")]
pub struct LlrGrid {
    bin_width: f64,
    half_bins: usize,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
struct GridSpec {
    bin_width: f64,
    half_range: f64,
}

impl TryFrom<GridSpec> for LlrGrid {
    type Error = Error;

    fn try_from(spec: GridSpec) -> Result<Self> {
        LlrGrid::new(spec.bin_width, spec.half_range)
    }
}

impl From<LlrGrid> for GridSpec {
    fn from(grid: LlrGrid) -> Self {
        GridSpec {
            bin_width: grid.bin_width,
            half_range: grid.half_range(),
        }
    }
}

impl LlrGrid {
    pub const DEFAULT_BIN_WIDTH: f64 = 0.01;
    pub const DEFAULT_HALF_RANGE: f64 = 25.0;

    /// Builds a grid spanning `[-half_range, half_range]`. `half_range` must be
    /// a whole number of bins.
    pub fn new(bin_width: f64, half_range: f64) -> Result<Self> {
        if !(bin_width.is_finite() && bin_width > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "bin_width must be positive, got {bin_width}"
            )));
        }
        if !(half_range.is_finite() && half_range >= bin_width) {
            return Err(Error::InvalidGrid(format!(
                "half_range must be at least one bin, got {half_range}"
            )));
        }
        let bins = half_range / bin_width;
        let half_bins = bins.round();
        if (bins - half_bins).abs() > 1e-6 {
            return Err(Error::InvalidGrid(format!(
                "half_range {half_range} is not a multiple of bin_width {bin_width}"
            )));
        }
        Ok(LlrGrid {
            bin_width,
            half_bins: half_bins as usize,
        })
    }

    pub fn bin_width(&self) -> f64 {
        self.bin_width
    }

    /// `M`, the LLR value of the outermost bin centers.
    pub fn half_range(&self) -> f64 {
        self.half_bins as f64 * self.bin_width
    }

    /// `K`, the number of bins on each side of zero.
    pub fn half_bins(&self) -> usize {
        self.half_bins
    }

    pub fn bin_count(&self) -> usize {
        2 * self.half_bins + 1
    }

    /// Storage index of the `m = 0` bin.
    pub fn zero_index(&self) -> usize {
        self.half_bins
    }

    /// LLR value at the center of storage index `idx`.
    pub fn center(&self, idx: usize) -> f64 {
        (idx as f64 - self.half_bins as f64) * self.bin_width
    }

    /// Signed bin offset (`k` in `k * bin_width`) of the bin nearest `m`.
    /// Ties round toward zero; values beyond `±M` clip to the boundary.
    pub fn offset_of(&self, m: f64) -> isize {
        if m.is_nan() {
            return 0;
        }
        let k = self.half_bins as f64;
        let scaled = (m.abs() / self.bin_width - 0.5).ceil().max(0.0).min(k);
        let n = scaled as isize;
        if m < 0.0 {
            -n
        } else {
            n
        }
    }

    /// Storage index of the bin nearest `m` (see [`LlrGrid::offset_of`]).
    pub fn index_of(&self, m: f64) -> usize {
        (self.offset_of(m) + self.half_bins as isize) as usize
    }

    pub(crate) fn ensure_same(&self, other: &LlrGrid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(*self, *other))
        }
    }
}

impl Default for LlrGrid {
    fn default() -> Self {
        LlrGrid::new(Self::DEFAULT_BIN_WIDTH, Self::DEFAULT_HALF_RANGE)
            .expect("default grid is valid")
    }
}

impl fmt::Display for LlrGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "LlrGrid(bin_width = {}, half_range = {})",
            self.bin_width,
            self.half_range()
        )
    }
}
