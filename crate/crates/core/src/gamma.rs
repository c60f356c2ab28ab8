//! Check-node domain: measures on `GF(2) × [0, ∞]`.
//!
//! An LLR `m` maps to the pair `(sign, |m|)` where `sign = 0` for `m > 0` and
//! `1` for `m < 0`; mass at `m = 0` is split evenly between both signs. The
//! magnitude axis reuses the LLR grid's bins `0..=K`, so the map and its
//! inverse are exact on the grid. The check-node product of two messages
//! adds signs in `GF(2)` and combines magnitudes with the box-plus operation
//! `2 atanh(tanh(a/2) tanh(b/2))`, tabulated once per grid and rounded to the
//! nearest bin. Bin `K` acts as an infinite LLR and bin 0 as an erasure.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;

use crate::degree::EdgePolynomial;
use crate::density::{Density, SignedDensity};
use crate::error::{Error, Result};
use crate::grid::LlrGrid;

/// Box-plus of two non-negative LLR magnitudes.
pub fn boxplus_magnitude(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    if a.is_infinite() {
        return b;
    }
    if b.is_infinite() {
        return a;
    }
    a.min(b) + (-(a + b)).exp().ln_1p() - (-(a - b).abs()).exp().ln_1p()
}

/// Magnitude bins of an [`LlrGrid`] together with the tabulated box-plus
/// combination rule.
///
/// For a fixed `i`, box-plus with `j` returns `i` itself once `j` is far
/// enough above it. `tail[i]` is the first `j` from which the table row is
/// constantly `i`, and `head[i]` the first `j` whose own tail lies beyond
/// `i`; only `head[i]..tail[i]` needs explicit table lookups.
#[derive(Debug)]
pub struct MagnitudeGrid {
    grid: LlrGrid,
    table: Vec<u16>,
    tail: Vec<u32>,
    head: Vec<u32>,
}

impl PartialEq for MagnitudeGrid {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid
    }
}

impl MagnitudeGrid {
    /// Builds (or fetches from a process-wide cache) the table for `grid`.
    pub fn shared(grid: LlrGrid) -> Result<Arc<MagnitudeGrid>> {
        type Cache = Mutex<HashMap<(u64, usize), Arc<MagnitudeGrid>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let key = (grid.bin_width().to_bits(), grid.half_bins());
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(hit) = cache.lock().expect("cache poisoned").get(&key) {
            return Ok(hit.clone());
        }
        let built = Arc::new(MagnitudeGrid::build(grid)?);
        cache
            .lock()
            .expect("cache poisoned")
            .entry(key)
            .or_insert(built.clone());
        Ok(built)
    }

    fn build(grid: LlrGrid) -> Result<MagnitudeGrid> {
        let k = grid.half_bins();
        if k > u16::MAX as usize {
            return Err(Error::InvalidGrid(format!(
                "at most {} bins per side are supported, got {k}",
                u16::MAX
            )));
        }
        let w = grid.bin_width();
        let side = k + 1;
        let mut table = vec![0u16; side * side];
        table.par_chunks_mut(side).enumerate().for_each(|(i, row)| {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = if i == 0 || j == 0 {
                    0
                } else if i == k {
                    j as u16
                } else if j == k {
                    i as u16
                } else {
                    let v = boxplus_magnitude(i as f64 * w, j as f64 * w);
                    ((v / w + 0.5).floor() as usize).min(k) as u16
                };
            }
        });
        let tail: Vec<u32> = table
            .chunks(side)
            .enumerate()
            .map(|(i, row)| {
                let mut t = side;
                while t > 0 && row[t - 1] as usize == i {
                    t -= 1;
                }
                t as u32
            })
            .collect();
        let head = (0..side)
            .map(|i| tail.iter().position(|&t| t as usize > i).unwrap_or(side) as u32)
            .collect();
        Ok(MagnitudeGrid {
            grid,
            table,
            tail,
            head,
        })
    }

    pub fn grid(&self) -> LlrGrid {
        self.grid
    }

    /// Number of magnitude bins, `K + 1`.
    pub fn len(&self) -> usize {
        self.grid.half_bins() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// LLR magnitude represented by bin `idx`; the last bin stands for `∞`.
    pub fn llr_magnitude(&self, idx: usize) -> f64 {
        if idx == self.grid.half_bins() {
            f64::INFINITY
        } else {
            idx as f64 * self.grid.bin_width()
        }
    }

    /// `ln coth(|m| / 2)` for bin `idx`: `∞` at the erasure bin, 0 at the
    /// saturation bin.
    pub fn magnitude(&self, idx: usize) -> f64 {
        let m = self.llr_magnitude(idx);
        if m == 0.0 {
            f64::INFINITY
        } else if m.is_infinite() {
            0.0
        } else {
            (1.0 / (0.5 * m).tanh()).ln()
        }
    }

    /// Bin of the box-plus of bins `i` and `j`.
    pub fn combine(&self, i: usize, j: usize) -> usize {
        self.table[i * self.len() + j] as usize
    }

    /// `out[combine(i, j)] += a[i] b[j]` over all pairs.
    ///
    /// Pairs with `j >= tail[i]` land in bin `i` and pairs with
    /// `i >= tail[j]` in bin `j`; both are summed in bulk from suffix sums.
    /// The two groups only meet on the diagonal where `tail[i] <= i`.
    fn product(&self, a: &[f64], b: &[f64]) -> Vec<f64> {
        let n = self.len();
        let suffix = |v: &[f64]| {
            let mut s = vec![0.0; n + 1];
            for i in (0..n).rev() {
                s[i] = s[i + 1] + v[i];
            }
            s
        };
        let suffix_a = suffix(a);
        let suffix_b = suffix(b);
        let mut out = vec![0.0; n];
        for (i, o) in out.iter_mut().enumerate() {
            let t = self.tail[i] as usize;
            *o += a[i] * suffix_b[t] + b[i] * suffix_a[t];
            if t <= i {
                *o -= a[i] * b[i];
            }
        }
        for (i, &x) in a.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            let row = &self.table[i * n..(i + 1) * n];
            let (lo, hi) = (self.head[i] as usize, self.tail[i] as usize);
            for j in lo..hi {
                if self.tail[j] as usize > i {
                    out[row[j] as usize] += x * b[j];
                }
            }
        }
        out
    }

    #[cfg(test)]
    fn product_dense(&self, a: &[f64], b: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut out = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                out[self.combine(i, j)] += a[i] * b[j];
            }
        }
        out
    }
}

/// A signed measure on `GF(2) × magnitude bins`.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaDensity {
    bins: Arc<MagnitudeGrid>,
    sign0: Vec<f64>,
    sign1: Vec<f64>,
}

impl GammaDensity {
    pub fn zeros(bins: Arc<MagnitudeGrid>) -> Self {
        let n = bins.len();
        GammaDensity {
            bins,
            sign0: vec![0.0; n],
            sign1: vec![0.0; n],
        }
    }

    /// Unit mass at sign 0, infinite magnitude: the neutral element of
    /// [`GammaDensity::convolve`].
    pub fn unit(bins: Arc<MagnitudeGrid>) -> Self {
        let mut g = Self::zeros(bins);
        let k = g.sign0.len() - 1;
        g.sign0[k] = 1.0;
        g
    }

    pub fn magnitude_grid(&self) -> &Arc<MagnitudeGrid> {
        &self.bins
    }

    /// Mass per magnitude bin for the given sign.
    pub fn sign_masses(&self, sign: u8) -> &[f64] {
        if sign == 0 {
            &self.sign0
        } else {
            &self.sign1
        }
    }

    /// Total mass carried by each sign.
    pub fn sign_marginal(&self) -> (f64, f64) {
        (self.sign0.iter().sum(), self.sign1.iter().sum())
    }

    pub fn total_mass(&self) -> f64 {
        let (a, b) = self.sign_marginal();
        a + b
    }

    fn ensure_same(&self, other: &GammaDensity) -> Result<()> {
        self.bins.grid().ensure_same(&other.bins.grid())
    }

    /// `a · self + b · other`.
    pub fn combine(&self, a: f64, other: &GammaDensity, b: f64) -> Result<GammaDensity> {
        self.ensure_same(other)?;
        let mix = |x: &[f64], y: &[f64]| -> Vec<f64> {
            x.iter().zip(y).map(|(p, q)| a * p + b * q).collect()
        };
        Ok(GammaDensity {
            bins: self.bins.clone(),
            sign0: mix(&self.sign0, &other.sign0),
            sign1: mix(&self.sign1, &other.sign1),
        })
    }

    /// Check-node product: signs add in `GF(2)`, magnitudes combine by
    /// box-plus. Bilinear, so it applies to signed measures too.
    pub fn convolve(&self, other: &GammaDensity) -> Result<GammaDensity> {
        self.ensure_same(other)?;
        // In the sum/difference basis the sign XOR diagonalizes:
        // (s0 + s1) multiplies with (s0 + s1) and (s0 - s1) with (s0 - s1).
        let sum = self
            .bins
            .product(&self.basis(|x, y| x + y), &other.basis(|x, y| x + y));
        let diff = self
            .bins
            .product(&self.basis(|x, y| x - y), &other.basis(|x, y| x - y));
        Ok(GammaDensity {
            bins: self.bins.clone(),
            sign0: sum.iter().zip(&diff).map(|(s, d)| 0.5 * (s + d)).collect(),
            sign1: sum.iter().zip(&diff).map(|(s, d)| 0.5 * (s - d)).collect(),
        })
    }

    fn basis(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        self.sign0
            .iter()
            .zip(&self.sign1)
            .map(|(&x, &y)| f(x, y))
            .collect()
    }
}

/// Maps an LLR measure into the check-node domain.
pub fn gamma_transform(d: &SignedDensity) -> Result<GammaDensity> {
    let bins = MagnitudeGrid::shared(d.grid())?;
    let k = d.grid().half_bins();
    let mass = d.masses();
    let mut g = GammaDensity::zeros(bins);
    for i in 1..=k {
        g.sign0[i] = mass[k + i];
        g.sign1[i] = mass[k - i];
    }
    g.sign0[0] = 0.5 * mass[k];
    g.sign1[0] = 0.5 * mass[k];
    Ok(g)
}

/// Inverse of [`gamma_transform`]; both signs at magnitude 0 merge into the
/// `m = 0` bin.
pub fn gamma_inverse(g: &GammaDensity) -> SignedDensity {
    let grid = g.bins.grid();
    let k = grid.half_bins();
    let mut mass = vec![0.0; grid.bin_count()];
    for i in 1..=k {
        mass[k + i] = g.sign0[i];
        mass[k - i] = g.sign1[i];
    }
    mass[k] = g.sign0[0] + g.sign1[0];
    SignedDensity::from_raw(grid, mass)
}

/// `ρ(g) = Σ_k ρ_k g^{⊛(k-1)}`, with `g^{⊛0}` the unit at infinite
/// magnitude. Powers are built by repeated multiplication by `g`.
pub fn rho_apply(g: &GammaDensity, rho: &EdgePolynomial) -> Result<GammaDensity> {
    let mut acc = GammaDensity::zeros(g.bins.clone());
    let mut power = GammaDensity::unit(g.bins.clone());
    let mut exponent = 0;
    for (k, c) in rho.terms() {
        while exponent < k - 1 {
            power = power.convolve(g)?;
            exponent += 1;
        }
        acc = acc.combine(1.0, &power, c)?;
    }
    Ok(acc)
}

/// Check-node update for a single message density, `Γ⁻¹(ρ(Γ(p)))`.
pub fn check_node(p: &Density, rho: &EdgePolynomial) -> Result<Density> {
    gamma_inverse(&rho_apply(&gamma_transform(p.as_signed())?, rho)?).into_density()
}
