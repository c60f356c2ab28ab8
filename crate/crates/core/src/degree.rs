//! Edge-perspective degree distributions.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const FRACTION_TOLERANCE: f64 = 1e-12;

/// `Σ_k c_k x^{k-1}` where `c_k` is the fraction of edges attached to
/// degree-`k` nodes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<usize, f64>", into = "BTreeMap<usize, f64>")]
pub struct EdgePolynomial {
    fractions: BTreeMap<usize, f64>,
}

impl TryFrom<BTreeMap<usize, f64>> for EdgePolynomial {
    type Error = Error;

    fn try_from(map: BTreeMap<usize, f64>) -> Result<Self> {
        EdgePolynomial::new(map)
    }
}

impl From<EdgePolynomial> for BTreeMap<usize, f64> {
    fn from(p: EdgePolynomial) -> Self {
        p.fractions
    }
}

impl EdgePolynomial {
    /// Fractions must be non-negative, attached to degrees `>= 1`, and sum
    /// to 1 within 1e-12. Zero entries are dropped.
    pub fn new(fractions: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (k, c) in fractions {
            if k == 0 {
                return Err(Error::InvalidDegrees("degree 0 is not allowed".into()));
            }
            if !(c.is_finite() && c >= 0.0) {
                return Err(Error::InvalidDegrees(format!(
                    "fraction for degree {k} must be non-negative, got {c}"
                )));
            }
            if c > 0.0 {
                *map.entry(k).or_insert(0.0) += c;
            }
        }
        if map.is_empty() {
            return Err(Error::InvalidDegrees("empty polynomial".into()));
        }
        let total: f64 = map.values().sum();
        if (total - 1.0).abs() > FRACTION_TOLERANCE {
            return Err(Error::InvalidDegrees(format!(
                "edge fractions sum to {total}, expected 1"
            )));
        }
        Ok(EdgePolynomial { fractions: map })
    }

    /// The single-term polynomial `x^{degree-1}`.
    pub fn regular(degree: usize) -> Result<Self> {
        Self::new([(degree, 1.0)])
    }

    /// `(degree, fraction)` pairs in increasing degree.
    pub fn terms(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.fractions.iter().map(|(&k, &c)| (k, c))
    }

    pub fn min_degree(&self) -> usize {
        *self.fractions.keys().next().expect("non-empty")
    }

    pub fn max_degree(&self) -> usize {
        *self.fractions.keys().next_back().expect("non-empty")
    }

    pub fn fraction(&self, degree: usize) -> f64 {
        self.fractions.get(&degree).copied().unwrap_or(0.0)
    }

    /// `x^shift · p(x)`: every degree grows by `shift`.
    pub fn shifted(&self, shift: usize) -> Self {
        EdgePolynomial {
            fractions: self
                .fractions
                .iter()
                .map(|(&k, &c)| (k + shift, c))
                .collect(),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.terms().map(|(k, c)| c * x.powi(k as i32 - 1)).sum()
    }

    /// `p'(0)`, the degree-2 fraction.
    pub fn derivative_at_zero(&self) -> f64 {
        self.fraction(2)
    }

    /// `p'(1) = Σ c_k (k - 1)`.
    pub fn derivative_at_one(&self) -> f64 {
        self.terms().map(|(k, c)| c * (k as f64 - 1.0)).sum()
    }
}

impl fmt::Display for EdgePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms()
            .map(|(k, c)| {
                let mono = match k - 1 {
                    0 => "1".to_string(),
                    1 => "x".to_string(),
                    e => format!("x^{e}"),
                };
                if c == 1.0 {
                    mono
                } else {
                    format!("{c}{mono}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Ensemble degree profile `(λ, ρ_Δ)` with `ρ_Δ = x^Δ · ρ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DegreeSpec", into = "DegreeSpec")]
pub struct DegreeDistribution {
    lambda: EdgePolynomial,
    rho: EdgePolynomial,
    shift: usize,
    rho_shifted: EdgePolynomial,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct DegreeSpec {
    lambda: EdgePolynomial,
    rho: EdgePolynomial,
    #[serde(default)]
    shift: usize,
}

impl TryFrom<DegreeSpec> for DegreeDistribution {
    type Error = Error;

    fn try_from(spec: DegreeSpec) -> Result<Self> {
        DegreeDistribution::new(spec.lambda, spec.rho, spec.shift)
    }
}

impl From<DegreeDistribution> for DegreeSpec {
    fn from(d: DegreeDistribution) -> Self {
        DegreeSpec {
            lambda: d.lambda,
            rho: d.rho,
            shift: d.shift,
        }
    }
}

impl DegreeDistribution {
    pub fn new(lambda: EdgePolynomial, rho: EdgePolynomial, shift: usize) -> Result<Self> {
        if lambda.min_degree() < 2 {
            return Err(Error::InvalidDegrees(format!(
                "variable degrees must be >= 2, got λ = {lambda}"
            )));
        }
        let rho_shifted = rho.shifted(shift);
        if rho_shifted.min_degree() < 2 {
            return Err(Error::InvalidDegrees(format!(
                "check degrees must be >= 2 after the shift, got ρ_Δ = {rho_shifted}"
            )));
        }
        Ok(DegreeDistribution {
            lambda,
            rho,
            shift,
            rho_shifted,
        })
    }

    /// Regular `(d_v, d_c)` ensemble, i.e. `(x^{d_v-1}, x^{d_c-1})`.
    pub fn regular(d_v: usize, d_c: usize) -> Result<Self> {
        Self::new(
            EdgePolynomial::regular(d_v)?,
            EdgePolynomial::regular(d_c)?,
            0,
        )
    }

    pub fn with_shift(&self, shift: usize) -> Result<Self> {
        Self::new(self.lambda.clone(), self.rho.clone(), shift)
    }

    pub fn lambda(&self) -> &EdgePolynomial {
        &self.lambda
    }

    /// The unshifted check polynomial.
    pub fn rho_base(&self) -> &EdgePolynomial {
        &self.rho
    }

    /// The check polynomial actually used, `x^Δ · ρ`.
    #[allow(clippy::misnamed_getters)]
    pub fn rho(&self) -> &EdgePolynomial {
        &self.rho_shifted
    }

    pub fn shift(&self) -> usize {
        self.shift
    }
}

impl fmt::Display for DegreeDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(λ = {}, ρ = {})", self.lambda, self.rho_shifted)
    }
}
