//! Binary-input memoryless channels and their initial LLR densities.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::density::{Density, DensityPair};
use crate::error::{Error, Result};
use crate::grid::LlrGrid;

const ROW_TOLERANCE: f64 = 1e-9;
const AWGN_SUBSAMPLES: usize = 16;

/// A binary-input channel. Output LLRs are bit-oriented: the density for
/// transmitted bit `x` is the law of `ln p(y|x) / p(y|1-x)` under
/// `y ~ p(·|x)`, so positive values always favor the transmitted bit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Channel {
    /// Only a transmitted 1 can be corrupted, flipping to 0 with probability
    /// `p`.
    #[serde(rename = "z")]
    ZChannel {
        p: f64,
    },
    Bsc {
        eps: f64,
    },
    /// Binary asymmetric channel: `eps0 = P(y=1 | x=0)`, `eps1 = P(y=0 | x=1)`.
    Basc {
        eps0: f64,
        eps1: f64,
    },
    /// `y = (1 - 2x) + σ n` with standard Gaussian `n`.
    #[serde(rename = "biawgn")]
    BiAwgn {
        sigma: f64,
    },
    /// Finite-output channel given by its transition rows.
    Table {
        p_y_given_0: Vec<f64>,
        p_y_given_1: Vec<f64>,
    },
}

fn check_probability(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::InvalidChannel(format!(
            "{name} must lie in [0, 1], got {v}"
        )))
    }
}

impl Channel {
    pub fn validate(&self) -> Result<()> {
        match self {
            Channel::ZChannel { p } => check_probability("p", *p),
            Channel::Bsc { eps } => check_probability("eps", *eps),
            Channel::Basc { eps0, eps1 } => {
                check_probability("eps0", *eps0)?;
                check_probability("eps1", *eps1)?;
                if eps0 + eps1 >= 1.0 {
                    return Err(Error::InvalidChannel(format!(
                        "eps0 + eps1 must be below 1, got {}",
                        eps0 + eps1
                    )));
                }
                Ok(())
            }
            Channel::BiAwgn { sigma } => {
                if sigma.is_finite() && *sigma > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidChannel(format!(
                        "sigma must be positive, got {sigma}"
                    )))
                }
            }
            Channel::Table {
                p_y_given_0,
                p_y_given_1,
            } => {
                if p_y_given_0.len() != p_y_given_1.len() || p_y_given_0.is_empty() {
                    return Err(Error::InvalidChannel(
                        "transition rows must be non-empty and of equal length".into(),
                    ));
                }
                for (row, name) in [(p_y_given_0, "p_y_given_0"), (p_y_given_1, "p_y_given_1")] {
                    for &v in row.iter() {
                        check_probability(name, v)?;
                    }
                    let total: f64 = row.iter().sum();
                    if (total - 1.0).abs() > ROW_TOLERANCE {
                        return Err(Error::InvalidChannel(format!(
                            "{name} sums to {total}, expected 1"
                        )));
                    }
                }
                Ok(())
            }
        }
    }

    /// Transition rows `(p(y|0), p(y|1))` for finite-output channels.
    pub fn transition_rows(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        match self {
            Channel::ZChannel { p } => Some((vec![1.0, 0.0], vec![*p, 1.0 - p])),
            Channel::Bsc { eps } => Some((vec![1.0 - eps, *eps], vec![*eps, 1.0 - eps])),
            Channel::Basc { eps0, eps1 } => {
                Some((vec![1.0 - eps0, *eps0], vec![*eps1, 1.0 - eps1]))
            }
            Channel::BiAwgn { .. } => None,
            Channel::Table {
                p_y_given_0,
                p_y_given_1,
            } => Some((p_y_given_0.clone(), p_y_given_1.clone())),
        }
    }

    /// Initial LLR densities `(P(0), P(1))` projected onto `grid`. Infinite
    /// LLRs land in the saturation bins.
    pub fn initial_pair(&self, grid: LlrGrid) -> Result<DensityPair> {
        self.validate()?;
        if let Channel::BiAwgn { sigma } = self {
            let p = awgn_density(grid, *sigma)?;
            return Ok(DensityPair::symmetric(p));
        }
        let (row0, row1) = self.transition_rows().expect("finite-output channel");
        let mut atoms0 = Vec::new();
        let mut atoms1 = Vec::new();
        for (&a, &b) in row0.iter().zip(&row1) {
            if a > 0.0 {
                atoms0.push((llr(a, b), a));
            }
            if b > 0.0 {
                atoms1.push((llr(b, a), b));
            }
        }
        DensityPair::new(
            Density::from_atoms(grid, &atoms0)?,
            Density::from_atoms(grid, &atoms1)?,
        )
    }

    /// `⟨P⟩ = (P(0) + P(1)) / 2`, the initial density of the symmetrized
    /// channel seen by a coset code ensemble.
    pub fn coset_initial(&self, grid: LlrGrid) -> Result<Density> {
        Ok(self.initial_pair(grid)?.average())
    }

    /// `(eps0, eps1)` for channels that are binary asymmetric channels.
    pub fn basc_params(&self) -> Result<(f64, f64)> {
        self.validate()?;
        match self {
            Channel::ZChannel { p } => Ok((0.0, *p)),
            Channel::Bsc { eps } => Ok((*eps, *eps)),
            Channel::Basc { eps0, eps1 } => Ok((*eps0, *eps1)),
            other => Err(Error::InvalidChannel(format!(
                "{other} is not a binary asymmetric channel"
            ))),
        }
    }

    /// True when both conditional LLR laws coincide, i.e. the channel output
    /// is symmetric under relabeling the input.
    pub fn is_symmetric(&self) -> bool {
        match self {
            Channel::ZChannel { p } => *p == 0.0,
            Channel::Bsc { .. } | Channel::BiAwgn { .. } => true,
            Channel::Basc { eps0, eps1 } => eps0 == eps1,
            Channel::Table {
                p_y_given_0,
                p_y_given_1,
            } => {
                let key = |a: f64, b: f64| (a.to_bits(), b.to_bits());
                let mut fwd: Vec<_> = p_y_given_0
                    .iter()
                    .zip(p_y_given_1)
                    .map(|(&a, &b)| key(a, b))
                    .collect();
                let mut rev: Vec<_> = p_y_given_0
                    .iter()
                    .zip(p_y_given_1)
                    .map(|(&a, &b)| key(b, a))
                    .collect();
                fwd.sort_unstable();
                rev.sort_unstable();
                fwd == rev
            }
        }
    }

    /// `Σ_y √(p(y|0) p(y|1))` from the channel law itself.
    pub fn exact_bhattacharyya(&self) -> f64 {
        match self {
            Channel::BiAwgn { sigma } => (-0.5 / (sigma * sigma)).exp(),
            _ => {
                let (row0, row1) = self.transition_rows().expect("finite-output channel");
                row0.iter().zip(&row1).map(|(a, b)| (a * b).sqrt()).sum()
            }
        }
    }

    /// Transmits `bit` once and returns the received LLR
    /// `ln p(y|0) / p(y|1)`, positive favoring 0. May be infinite.
    pub fn sample_llr<R: Rng + ?Sized>(&self, bit: u8, rng: &mut R) -> f64 {
        match self {
            Channel::BiAwgn { sigma } => {
                let n: f64 = standard_normal(rng);
                let y = if bit == 0 { 1.0 } else { -1.0 } + sigma * n;
                2.0 * y / (sigma * sigma)
            }
            _ => {
                let (row0, row1) = self.transition_rows().expect("finite-output channel");
                let row = if bit == 0 { &row0 } else { &row1 };
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                let mut y = row.len() - 1;
                for (idx, &p) in row.iter().enumerate() {
                    acc += p;
                    if u < acc {
                        y = idx;
                        break;
                    }
                }
                // Guard against rounding landing on a zero-probability output.
                while row[y] == 0.0 && y > 0 {
                    y -= 1;
                }
                llr(row0[y], row1[y])
            }
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Channel::ZChannel { p } => write!(f, "Z({p})"),
            Channel::Bsc { eps } => write!(f, "BSC({eps})"),
            Channel::Basc { eps0, eps1 } => write!(f, "BASC({eps0}, {eps1})"),
            Channel::BiAwgn { sigma } => write!(f, "BIAWGN({sigma})"),
            Channel::Table { p_y_given_0, .. } => write!(f, "Table({} outputs)", p_y_given_0.len()),
        }
    }
}

fn llr(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        f64::INFINITY
    } else if num == 0.0 {
        f64::NEG_INFINITY
    } else {
        (num / den).ln()
    }
}

/// Box-Muller standard normal draw.
fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Gaussian LLR law with mean `2/σ²` and variance `4/σ²`, integrated over
/// each bin by the midpoint rule; the saturation bins take the exact tails.
fn awgn_density(grid: LlrGrid, sigma: f64) -> Result<Density> {
    let mean = 2.0 / (sigma * sigma);
    let sd = 2.0 / sigma;
    let w = grid.bin_width();
    let k = grid.half_bins();
    let n = grid.bin_count();
    let pdf = |x: f64| {
        let z = (x - mean) / sd;
        (-0.5 * z * z).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt())
    };
    let cdf_upper = |x: f64| 0.5 * libm::erfc((x - mean) / (sd * std::f64::consts::SQRT_2));
    let mut mass = vec![0.0; n];
    let step = w / AWGN_SUBSAMPLES as f64;
    for (idx, slot) in mass.iter_mut().enumerate().take(n - 1).skip(1) {
        let left = grid.center(idx) - 0.5 * w;
        *slot = (0..AWGN_SUBSAMPLES)
            .map(|s| pdf(left + (s as f64 + 0.5) * step))
            .sum::<f64>()
            * step;
    }
    let edge = grid.half_range() - 0.5 * w;
    mass[n - 1] = cdf_upper(edge);
    mass[0] = 1.0 - cdf_upper(-edge);
    let total: f64 = mass.iter().sum();
    if !(total > 0.0) || k == 0 {
        return Err(Error::InvalidChannel(
            "degenerate Gaussian projection".into(),
        ));
    }
    for x in mass.iter_mut() {
        *x /= total;
    }
    Density::from_masses(grid, mass)
}

/// The scalar parameter swept by a [`ChannelFamily`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelParameter {
    P,
    Eps,
    Eps0,
    Eps1,
    Sigma,
}

/// A one-parameter family of channels, assumed to degrade as the parameter
/// grows over `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelFamily {
    pub template: Channel,
    pub parameter: ChannelParameter,
    pub lo: f64,
    pub hi: f64,
}

impl ChannelFamily {
    pub fn new(template: Channel, parameter: ChannelParameter, lo: f64, hi: f64) -> Result<Self> {
        let fam = ChannelFamily {
            template,
            parameter,
            lo,
            hi,
        };
        if !(lo < hi) {
            return Err(Error::InvalidChannel(format!(
                "family range needs lo < hi, got [{lo}, {hi}]"
            )));
        }
        fam.at(lo)?;
        fam.at(hi)?;
        Ok(fam)
    }

    /// Z-channels with crossover in `[lo, hi]`.
    pub fn z_channel(lo: f64, hi: f64) -> Result<Self> {
        Self::new(Channel::ZChannel { p: lo }, ChannelParameter::P, lo, hi)
    }

    /// The member of the family at parameter value `value`.
    pub fn at(&self, value: f64) -> Result<Channel> {
        let ch = match (&self.template, self.parameter) {
            (Channel::ZChannel { .. }, ChannelParameter::P) => Channel::ZChannel { p: value },
            (Channel::Bsc { .. }, ChannelParameter::Eps) => Channel::Bsc { eps: value },
            (Channel::Basc { eps1, .. }, ChannelParameter::Eps0) => Channel::Basc {
                eps0: value,
                eps1: *eps1,
            },
            (Channel::Basc { eps0, .. }, ChannelParameter::Eps1) => Channel::Basc {
                eps0: *eps0,
                eps1: value,
            },
            (Channel::BiAwgn { .. }, ChannelParameter::Sigma) => Channel::BiAwgn { sigma: value },
            (t, p) => {
                return Err(Error::InvalidChannel(format!(
                    "parameter {p:?} cannot be swept on {t}"
                )))
            }
        };
        ch.validate()?;
        Ok(ch)
    }
}
