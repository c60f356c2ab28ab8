//! Large-check-degree behavior of the linear recursion.
//!
//! For a binary asymmetric channel the check-node outputs `Q(0)` and `Q(1)`
//! of a degree-`Δ+1` check have characteristic functions on
//! `GF(2) × [0, ∞]` built from `Δ`-th powers of the channel's own
//! characteristic functions. Their difference vanishes geometrically in `Δ`
//! while their average settles only like `1/Δ`; this module evaluates those
//! closed forms, measures the same effect on quantized densities, and fits
//! decay rates.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::de::linear_check_update;
use crate::degree::EdgePolynomial;
use crate::density::{Density, DensityPair};
use crate::error::{Error, Result};
use crate::gamma::GammaDensity;

/// Crossover probabilities of a binary asymmetric channel:
/// `eps0 = P(y=1 | x=0)`, `eps1 = P(y=0 | x=1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BascParams {
    pub eps0: f64,
    pub eps1: f64,
}

impl BascParams {
    pub fn new(eps0: f64, eps1: f64) -> Result<Self> {
        let p = BascParams { eps0, eps1 };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        let ok = |e: f64| (0.0..=1.0).contains(&e);
        if ok(self.eps0) && ok(self.eps1) && self.eps0 + self.eps1 < 1.0 {
            Ok(())
        } else {
            Err(Error::BascDomain {
                eps0: self.eps0,
                eps1: self.eps1,
            })
        }
    }

    /// `ln((1 - ε₀ + ε₁) / (1 - ε₀ - ε₁))` and
    /// `ln((1 + ε₀ - ε₁) / (1 - ε₀ - ε₁))`: the `ln coth(|m|/2)` values of
    /// the output observed without and with a crossover on 0.
    fn magnitudes(&self) -> (f64, f64) {
        let base = 1.0 - self.eps0 - self.eps1;
        (
            ((1.0 - self.eps0 + self.eps1) / base).ln(),
            ((1.0 + self.eps0 - self.eps1) / base).ln(),
        )
    }
}

/// A sample `Φ(k, r)` of a characteristic function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharFnPoint {
    pub k: u8,
    pub r: f64,
    pub value: Complex64,
}

fn check_k(k: u8) -> Result<()> {
    if k <= 1 {
        Ok(())
    } else {
        Err(Error::Precondition(format!("k must be 0 or 1, got {k}")))
    }
}

fn phase(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, x)
}

/// `Φ_x(k, r) = E[(-1)^{k γ₁} e^{i r γ₂}]` for the bit-`x` LLR density of the
/// channel, in closed form.
pub fn phi_basc(x: u8, k: u8, r: f64, p: BascParams) -> Result<Complex64> {
    check_k(k)?;
    p.validate()?;
    let (a, b) = p.magnitudes();
    let sign = if k == 0 { 1.0 } else { -1.0 };
    Ok(match x {
        0 => (1.0 - p.eps0) * phase(r * a) + sign * p.eps0 * phase(r * b),
        1 => (1.0 - p.eps1) * phase(r * b) + sign * p.eps1 * phase(r * a),
        _ => return Err(Error::Precondition(format!("bit must be 0 or 1, got {x}"))),
    })
}

/// `(1-ε₀+ε₁) ln((1-ε₀+ε₁)/(1-ε₀-ε₁)) - (1+ε₀-ε₁) ln((1+ε₀-ε₁)/(1-ε₀-ε₁))`.
pub fn f_minus(p: BascParams) -> Result<f64> {
    p.validate()?;
    if p.eps0 == p.eps1 {
        return Ok(0.0);
    }
    let (a, b) = p.magnitudes();
    Ok((1.0 - p.eps0 + p.eps1) * a - (1.0 + p.eps0 - p.eps1) * b)
}

/// `(1-ε₀+ε₁) ln((1-ε₀+ε₁)/(1-ε₀-ε₁)) + (1+ε₀-ε₁) ln((1+ε₀-ε₁)/(1-ε₀-ε₁))`.
pub fn f_plus(p: BascParams) -> Result<f64> {
    p.validate()?;
    let (a, b) = p.magnitudes();
    Ok((1.0 - p.eps0 + p.eps1) * a + (1.0 + p.eps0 - p.eps1) * b)
}

/// `z^n` through the polar form, so that large powers of small bases keep
/// their phase.
fn polar_pow(z: Complex64, n: u32) -> Complex64 {
    if z == Complex64::new(0.0, 0.0) {
        return z;
    }
    let (modulus, arg) = z.to_polar();
    Complex64::from_polar((n as f64 * modulus.ln()).exp(), n as f64 * arg)
}

fn check_delta(delta: u32) -> Result<()> {
    if delta >= 1 {
        Ok(())
    } else {
        Err(Error::Precondition("delta must be at least 1".into()))
    }
}

/// `2 ((Φ₀(k, r/Δ) - Φ₁(k, r/Δ)) / 2)^Δ`: the characteristic-function gap
/// between `Q(0)` and `Q(1)`.
pub fn diff_term(delta: u32, k: u8, r: f64, p: BascParams) -> Result<Complex64> {
    check_delta(delta)?;
    let s = r / delta as f64;
    let base = (phi_basc(0, k, s, p)? - phi_basc(1, k, s, p)?) * 0.5;
    Ok(polar_pow(base, delta) * 2.0)
}

/// `((Φ₀(k, r/Δ) + Φ₁(k, r/Δ)) / 2)^Δ`: the characteristic function of the
/// average check output.
pub fn avg_term(delta: u32, k: u8, r: f64, p: BascParams) -> Result<Complex64> {
    check_delta(delta)?;
    let s = r / delta as f64;
    let base = (phi_basc(0, k, s, p)? + phi_basc(1, k, s, p)?) * 0.5;
    Ok(polar_pow(base, delta))
}

/// Large-`Δ` limit of [`avg_term`] at `k = 0`: `e^{i (r/2) f₊}`.
pub fn avg_limit(r: f64, p: BascParams) -> Result<Complex64> {
    Ok(phase(0.5 * r * f_plus(p)?))
}

/// Characteristic function of a check-domain measure. Mass at the erasure
/// bin (infinite `γ₂`) contributes only at `r = 0`.
pub fn char_fn(g: &GammaDensity, k: u8, r: f64) -> Result<CharFnPoint> {
    check_k(k)?;
    let bins = g.magnitude_grid();
    let sign = if k == 0 { 1.0 } else { -1.0 };
    let mut value = Complex64::new(0.0, 0.0);
    for idx in 0..bins.len() {
        let w = g.sign_masses(0)[idx] + sign * g.sign_masses(1)[idx];
        if w == 0.0 {
            continue;
        }
        let gamma = bins.magnitude(idx);
        if gamma.is_infinite() {
            if r == 0.0 {
                value += w;
            }
            continue;
        }
        value += phase(r * gamma) * w;
    }
    Ok(CharFnPoint { k, r, value })
}

/// One row of [`empirical_q_gap`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QGapRow {
    pub delta: u32,
    /// Wasserstein-1 distance between `Q(0)` and `Q(1)`.
    pub d01: f64,
    /// Wasserstein-1 distance between `⟨Q⟩` and the erasure `δ₀`.
    pub d_avg: f64,
}

/// Runs the linear check update once on `pair` with check polynomial
/// `x^Δ · rho` for each `Δ` and measures how far apart the two outputs are
/// and how far their average is from a full erasure.
pub fn empirical_q_gap(
    pair: &DensityPair,
    rho: &EdgePolynomial,
    deltas: &[u32],
) -> Result<Vec<QGapRow>> {
    let erasure = Density::dirac(pair.grid(), 0.0);
    deltas
        .iter()
        .map(|&delta| {
            let check = linear_check_update(pair, &rho.shifted(delta as usize))?;
            Ok(QGapRow {
                delta,
                d01: check.p0().wasserstein_distance(check.p1())?,
                d_avg: check.average().wasserstein_distance(&erasure)?,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateModel {
    /// `m ≈ C · base^Δ`; the parameter is `base`.
    Exponential,
    /// `m ≈ C · Δ^exponent`; the parameter is `exponent`.
    PowerLaw,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFit {
    pub model: RateModel,
    pub parameter: f64,
    pub intercept: f64,
    /// Least-squares residual norm of `ln m` relative to its spread about
    /// the mean, `sqrt(1 - R²)`.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub deltas: Vec<u32>,
    pub magnitudes: Vec<f64>,
    pub exponential: ModelFit,
    pub power_law: ModelFit,
}

impl RateFit {
    /// The model with the smaller residual.
    pub fn best(&self) -> &ModelFit {
        if self.exponential.residual <= self.power_law.residual {
            &self.exponential
        } else {
            &self.power_law
        }
    }
}

fn least_squares(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx <= 0.0 || syy <= f64::EPSILON * f64::EPSILON * n * (1.0 + my * my) {
        return Err(Error::Fit("degenerate data: no spread to fit".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok((slope, intercept, (rss / syy).sqrt()))
}

/// Fits `ln m` against `Δ` and against `ln Δ`.
pub fn fit_rate(points: &[(u32, f64)]) -> Result<RateFit> {
    if points.len() < 4 {
        return Err(Error::Fit(format!(
            "need at least 4 points, got {}",
            points.len()
        )));
    }
    if points.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::Fit("deltas must be strictly increasing".into()));
    }
    if let Some(&(d, m)) = points
        .iter()
        .find(|(d, m)| *d == 0 || !(*m > 0.0) || !m.is_finite())
    {
        return Err(Error::Fit(format!(
            "need positive deltas and magnitudes, got ({d}, {m})"
        )));
    }
    let ys: Vec<f64> = points.iter().map(|(_, m)| m.ln()).collect();
    let lin: Vec<f64> = points.iter().map(|(d, _)| *d as f64).collect();
    let log: Vec<f64> = lin.iter().map(|d| d.ln()).collect();
    let (slope, intercept, residual) = least_squares(&lin, &ys)?;
    let exponential = ModelFit {
        model: RateModel::Exponential,
        parameter: slope.exp(),
        intercept,
        residual,
    };
    let (slope, intercept, residual) = least_squares(&log, &ys)?;
    let power_law = ModelFit {
        model: RateModel::PowerLaw,
        parameter: slope,
        intercept,
        residual,
    };
    Ok(RateFit {
        deltas: points.iter().map(|p| p.0).collect(),
        magnitudes: points.iter().map(|p| p.1).collect(),
        exponential,
        power_law,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Channel;
    use crate::gamma::gamma_transform;
    use crate::grid::LlrGrid;
    use approx::assert_abs_diff_eq;

    fn corpus() -> [BascParams; 4] {
        [(0.05, 0.1), (0.1, 0.3), (0.2, 0.2), (0.0, 0.4)]
            .map(|(a, b)| BascParams::new(a, b).unwrap())
    }

    #[test]
    fn phi_at_origin() {
        for p in corpus() {
            assert_eq!(phi_basc(0, 0, 0.0, p).unwrap(), Complex64::new(1.0, 0.0));
            assert_eq!(phi_basc(1, 0, 0.0, p).unwrap(), Complex64::new(1.0, 0.0));
            assert_abs_diff_eq!(
                phi_basc(0, 1, 0.0, p).unwrap().re,
                1.0 - 2.0 * p.eps0,
                epsilon = 1e-15
            );
            assert_abs_diff_eq!(
                phi_basc(1, 1, 0.0, p).unwrap().re,
                1.0 - 2.0 * p.eps1,
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn domain_errors() {
        assert!(BascParams::new(0.6, 0.4).is_err());
        let bad = BascParams {
            eps0: 0.7,
            eps1: 0.5,
        };
        assert!(phi_basc(0, 0, 1.0, bad).is_err());
        assert!(f_minus(bad).is_err());
        assert!(phi_basc(0, 2, 1.0, corpus()[0]).is_err());
        assert!(diff_term(0, 1, 1.0, corpus()[0]).is_err());
    }

    #[test]
    fn f_closed_forms() {
        let eps: f64 = 0.15;
        let p = BascParams::new(eps, eps).unwrap();
        assert_eq!(f_minus(p).unwrap(), 0.0);
        assert_abs_diff_eq!(
            f_plus(p).unwrap(),
            2.0 * (1.0 / (1.0 - 2.0 * eps)).ln(),
            epsilon = 1e-14
        );
        assert_eq!(f_plus(BascParams::new(0.0, 0.0).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn diff_term_at_origin() {
        let p = BascParams::new(0.1, 0.3).unwrap();
        let v = diff_term(2, 1, 0.0, p).unwrap();
        assert_abs_diff_eq!(v.re, 0.08, epsilon = 1e-14);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-14);
        let sym = BascParams::new(0.2, 0.2).unwrap();
        for delta in 1..10 {
            for k in 0..2 {
                assert_eq!(diff_term(delta, k, 0.0, sym).unwrap().norm(), 0.0);
            }
        }
    }

    #[test]
    fn avg_term_at_origin() {
        for p in corpus() {
            for delta in [1, 5, 17] {
                assert_abs_diff_eq!(avg_term(delta, 0, 0.0, p).unwrap().re, 1.0, epsilon = 1e-12);
                let expect = (1.0 - p.eps0 - p.eps1).powi(delta as i32);
                assert_abs_diff_eq!(
                    avg_term(delta, 1, 0.0, p).unwrap().re,
                    expect,
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn polar_power_matches_repeated_product() {
        let z = Complex64::new(0.3, -0.4);
        let mut direct = Complex64::new(1.0, 0.0);
        for _ in 0..7 {
            direct *= z;
        }
        assert!((polar_pow(z, 7) - direct).norm() < 1e-15);
    }

    #[test]
    fn quantized_char_fn_matches_closed_form() {
        let g = LlrGrid::default();
        for p in corpus() {
            let pair = Channel::Basc {
                eps0: p.eps0,
                eps1: p.eps1,
            }
            .initial_pair(g)
            .unwrap();
            for x in 0..2u8 {
                let gd = gamma_transform(pair.get(x).as_signed()).unwrap();
                for k in 0..2u8 {
                    for r in [0.0, 0.1, 0.25, 0.5, 1.0, 3.0] {
                        let q = char_fn(&gd, k, r).unwrap().value;
                        let exact = phi_basc(x, k, r, p).unwrap();
                        // Rounding an LLR m by at most w/2 moves ln coth(m/2)
                        // by at most (w/2) / sinh(m - w/2).
                        let (a, b) = p.magnitudes();
                        let m_min = [a, b]
                            .iter()
                            .map(|g| 2.0 * (-g).exp().atanh())
                            .fold(f64::INFINITY, f64::min);
                        let w = g.bin_width();
                        let bound = r * 0.5 * w / (m_min - 0.5 * w).sinh();
                        let tol =
                            bound
                                .max(1e-12)
                                .min(if r <= 0.25 { 1e-3 } else { f64::INFINITY });
                        assert!((q - exact).norm() <= tol, "{p:?} x={x} k={k} r={r}");
                    }
                }
            }
        }
    }

    #[test]
    fn fit_recovers_models() {
        let geo: Vec<_> = (1..20).map(|d| (d, 2.0 * 0.8f64.powi(d as i32))).collect();
        let fit = fit_rate(&geo).unwrap();
        assert_eq!(fit.best().model, RateModel::Exponential);
        assert_abs_diff_eq!(fit.best().parameter, 0.8, epsilon = 0.01);
        let harm: Vec<_> = (1..20).map(|d| (d, 3.0 / d as f64)).collect();
        let fit = fit_rate(&harm).unwrap();
        assert_eq!(fit.best().model, RateModel::PowerLaw);
        assert_abs_diff_eq!(fit.best().parameter, -1.0, epsilon = 0.05);
    }

    #[test]
    fn fit_rejects_bad_input() {
        let flat: Vec<_> = (1..10).map(|d| (d, 0.5)).collect();
        assert!(matches!(fit_rate(&flat), Err(Error::Fit(_))));
        assert!(fit_rate(&[(1, 1.0), (2, 0.5), (3, 0.2)]).is_err());
        assert!(fit_rate(&[(1, 1.0), (2, 0.5), (3, 0.0), (4, 0.1)]).is_err());
        assert!(fit_rate(&[(1, 1.0), (3, 0.5), (2, 0.2), (4, 0.1)]).is_err());
    }

    #[test]
    fn symmetric_pair_has_no_gap() {
        let g = LlrGrid::new(0.05, 25.0).unwrap();
        let pair = Channel::Bsc { eps: 0.1 }.initial_pair(g).unwrap();
        let rows =
            empirical_q_gap(&pair, &EdgePolynomial::regular(1).unwrap(), &[2, 3, 5]).unwrap();
        for row in rows {
            assert!(row.d01 < 1e-9, "{row:?}");
            assert!(row.d_avg > 0.0);
        }
    }
}
