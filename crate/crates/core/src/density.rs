//! Quantized LLR measures and the measure-level primitives density
//! evolution is built from.

use serde::Serialize;

use crate::convolution;
use crate::degree::EdgePolynomial;
use crate::error::{Error, Result};
use crate::grid::LlrGrid;

/// Total-mass tolerance for probability densities.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Negative bin mass tolerated as floating-point noise before a density is
/// rejected.
pub const NEGATIVE_MASS_TOLERANCE: f64 = 1e-9;

/// A real-valued (possibly signed) measure on an [`LlrGrid`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignedDensity {
    grid: LlrGrid,
    mass: Vec<f64>,
}

impl SignedDensity {
    pub fn zeros(grid: LlrGrid) -> Self {
        SignedDensity {
            grid,
            mass: vec![0.0; grid.bin_count()],
        }
    }

    pub fn from_masses(grid: LlrGrid, mass: Vec<f64>) -> Result<Self> {
        if mass.len() != grid.bin_count() {
            return Err(Error::InvalidDensity(format!(
                "expected {} bins, got {}",
                grid.bin_count(),
                mass.len()
            )));
        }
        if let Some(bad) = mass.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidDensity(format!("non-finite mass {bad}")));
        }
        Ok(SignedDensity { grid, mass })
    }

    pub(crate) fn from_raw(grid: LlrGrid, mass: Vec<f64>) -> Self {
        debug_assert_eq!(mass.len(), grid.bin_count());
        SignedDensity { grid, mass }
    }

    pub fn grid(&self) -> LlrGrid {
        self.grid
    }

    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.iter().sum()
    }

    /// Mass of the bin whose center is `offset * bin_width`.
    pub fn mass_at(&self, offset: isize) -> f64 {
        let idx = offset + self.grid.half_bins() as isize;
        if idx < 0 || idx as usize >= self.mass.len() {
            0.0
        } else {
            self.mass[idx as usize]
        }
    }

    /// `self ⊗ other` with saturation at `±M`.
    pub fn convolve(&self, other: &SignedDensity) -> Result<SignedDensity> {
        self.grid.ensure_same(&other.grid)?;
        Ok(SignedDensity {
            grid: self.grid,
            mass: convolution::saturating(&self.mass, &other.mass, self.grid.half_bins()),
        })
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &SignedDensity, b: f64) -> Result<SignedDensity> {
        self.grid.ensure_same(&other.grid)?;
        Ok(SignedDensity {
            grid: self.grid,
            mass: self
                .mass
                .iter()
                .zip(&other.mass)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        })
    }

    pub fn scaled(&self, a: f64) -> SignedDensity {
        SignedDensity {
            grid: self.grid,
            mass: self.mass.iter().map(|x| a * x).collect(),
        }
    }

    pub fn l1_distance(&self, other: &SignedDensity) -> Result<f64> {
        self.grid.ensure_same(&other.grid)?;
        Ok(self
            .mass
            .iter()
            .zip(&other.mass)
            .map(|(x, y)| (x - y).abs())
            .sum())
    }

    /// Turns the measure into a probability density: negative bins down to
    /// `-NEGATIVE_MASS_TOLERANCE` are zeroed, then the result is rescaled to
    /// unit mass.
    pub fn into_density(self) -> Result<Density> {
        let most_negative = self.mass.iter().copied().fold(0.0_f64, f64::min);
        if most_negative < -NEGATIVE_MASS_TOLERANCE {
            return Err(Error::NegativeMass(most_negative));
        }
        let mut mass = self.mass;
        for x in mass.iter_mut() {
            if *x < 0.0 {
                *x = 0.0;
            }
        }
        let total: f64 = mass.iter().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidDensity("zero total mass".into()));
        }
        for x in mass.iter_mut() {
            *x /= total;
        }
        Ok(Density(SignedDensity {
            grid: self.grid,
            mass,
        }))
    }
}

/// A probability measure on an [`LlrGrid`]: non-negative, unit mass.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Density(SignedDensity);

impl Density {
    /// Unit mass in the bin nearest `m0` (ties toward 0, clipped to `±M`).
    pub fn dirac(grid: LlrGrid, m0: f64) -> Density {
        let mut d = SignedDensity::zeros(grid);
        d.mass[grid.index_of(m0)] = 1.0;
        Density(d)
    }

    /// Projects weighted atoms `(llr, probability)` onto the grid; each atom
    /// lands whole in its nearest bin.
    pub fn from_atoms(grid: LlrGrid, atoms: &[(f64, f64)]) -> Result<Density> {
        let mut d = SignedDensity::zeros(grid);
        for &(m, p) in atoms {
            if !(p >= 0.0 && p.is_finite()) || m.is_nan() {
                return Err(Error::InvalidDensity(format!("bad atom ({m}, {p})")));
            }
            d.mass[grid.index_of(m)] += p;
        }
        Density::from_masses(grid, d.mass)
    }

    /// Validates non-negativity and unit total mass (within 1e-9), then
    /// normalizes exactly.
    pub fn from_masses(grid: LlrGrid, mass: Vec<f64>) -> Result<Density> {
        let d = SignedDensity::from_masses(grid, mass)?;
        if let Some(bad) = d.mass.iter().find(|&&x| x < 0.0) {
            return Err(Error::InvalidDensity(format!("negative mass {bad}")));
        }
        let total = d.total_mass();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidDensity(format!("total mass {total} != 1")));
        }
        d.into_density()
    }

    /// Convex combination `Σ w_i d_i`; weights must sum to one.
    pub fn mixture(parts: &[(f64, &Density)]) -> Result<Density> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidDensity("empty mixture".into()))?;
        let grid = first.1.grid();
        let mut mass = vec![0.0; grid.bin_count()];
        for (w, d) in parts {
            grid.ensure_same(&d.grid())?;
            for (acc, x) in mass.iter_mut().zip(d.masses()) {
                *acc += w * x;
            }
        }
        Density::from_masses(grid, mass)
    }

    pub fn grid(&self) -> LlrGrid {
        self.0.grid
    }

    pub fn masses(&self) -> &[f64] {
        &self.0.mass
    }

    pub fn as_signed(&self) -> &SignedDensity {
        &self.0
    }

    pub fn into_signed(self) -> SignedDensity {
        self.0
    }

    pub fn mass_at(&self, offset: isize) -> f64 {
        self.0.mass_at(offset)
    }

    pub fn convolve(&self, other: &Density) -> Result<Density> {
        self.0.convolve(&other.0)?.into_density()
    }

    /// Probability of an incorrect hard decision: mass on `m < 0` plus half
    /// the mass of the `m = 0` bin.
    pub fn error_mass(&self) -> f64 {
        let z = self.grid().zero_index();
        self.0.mass[..z].iter().sum::<f64>() + 0.5 * self.0.mass[z]
    }

    /// `∫ e^{-m/2} dP`, evaluated at bin centers (saturation bins included).
    pub fn bhattacharyya(&self) -> f64 {
        let grid = self.grid();
        self.0
            .mass
            .iter()
            .enumerate()
            .map(|(i, &p)| p * (-0.5 * grid.center(i)).exp())
            .sum()
    }

    pub fn l1_distance(&self, other: &Density) -> Result<f64> {
        self.0.l1_distance(&other.0)
    }

    /// Wasserstein-1 (earth mover's) distance on the LLR line:
    /// `∫ |F_a(m) - F_b(m)| dm` over the grid.
    pub fn wasserstein_distance(&self, other: &Density) -> Result<f64> {
        let grid = self.grid();
        grid.ensure_same(&other.grid())?;
        let mut gap = 0.0;
        let mut total = 0.0;
        let n = self.0.mass.len();
        for i in 0..n - 1 {
            gap += self.0.mass[i] - other.0.mass[i];
            total += gap.abs();
        }
        Ok(total * grid.bin_width())
    }
}

/// `λ(q) = Σ_k λ_k q^{⊗(k-1)}`, with `q^{⊗0} = δ_0`.
pub fn lambda_apply(q: &Density, lambda: &EdgePolynomial) -> Result<Density> {
    let grid = q.grid();
    let mut acc = vec![0.0; grid.bin_count()];
    let mut power = Density::dirac(grid, 0.0);
    let mut exponent = 0;
    for (k, c) in lambda.terms() {
        while exponent < k - 1 {
            power = power.0.convolve(&q.0)?.into_density()?;
            exponent += 1;
        }
        for (a, x) in acc.iter_mut().zip(power.masses()) {
            *a += c * x;
        }
    }
    SignedDensity::from_masses(grid, acc)?.into_density()
}

/// The conditional pair `(P(0), P(1))`: laws of the bit-oriented LLR given
/// that the transmitted bit is 0 or 1.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityPair {
    p0: Density,
    p1: Density,
}

impl DensityPair {
    pub fn new(p0: Density, p1: Density) -> Result<Self> {
        p0.grid().ensure_same(&p1.grid())?;
        Ok(DensityPair { p0, p1 })
    }

    /// A pair with identical components, as produced by symmetric channels.
    pub fn symmetric(p: Density) -> Self {
        DensityPair {
            p1: p.clone(),
            p0: p,
        }
    }

    pub fn p0(&self) -> &Density {
        &self.p0
    }

    pub fn p1(&self) -> &Density {
        &self.p1
    }

    pub fn get(&self, bit: u8) -> &Density {
        if bit == 0 {
            &self.p0
        } else {
            &self.p1
        }
    }

    pub fn grid(&self) -> LlrGrid {
        self.p0.grid()
    }

    /// `⟨P⟩ = (P(0) + P(1)) / 2`.
    pub fn average(&self) -> Density {
        let mass = self
            .p0
            .masses()
            .iter()
            .zip(self.p1.masses())
            .map(|(a, b)| 0.5 * (a + b))
            .collect();
        Density(SignedDensity {
            grid: self.grid(),
            mass,
        })
    }

    /// `(P(0) - P(1)) / 2`.
    pub fn half_difference(&self) -> SignedDensity {
        let mass = self
            .p0
            .masses()
            .iter()
            .zip(self.p1.masses())
            .map(|(a, b)| 0.5 * (a - b))
            .collect();
        SignedDensity {
            grid: self.grid(),
            mass,
        }
    }

    /// `∫ e^{-m/2} dP(0)`.
    pub fn bhattacharyya(&self) -> f64 {
        self.p0.bhattacharyya()
    }

    pub fn into_parts(self) -> (Density, Density) {
        (self.p0, self.p1)
    }
}
