//! Density evolution recursions, iteration control and threshold search.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::channel::{Channel, ChannelFamily};
use crate::degree::{DegreeDistribution, EdgePolynomial};
use crate::density::{lambda_apply, Density, DensityPair};
use crate::error::{Error, Result};
use crate::gamma::{check_node, gamma_inverse, gamma_transform, rho_apply};
use crate::grid::LlrGrid;

/// Which recursion to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeMode {
    /// All-zero codeword on a symmetric channel.
    Classical,
    /// Linear code ensemble: tracks the pair `(P(0), P(1))`.
    #[serde(rename = "linear")]
    LinearGeneralized,
    /// Coset code ensemble: one density seeded with `⟨P(0)⟩`.
    Coset,
}

impl fmt::Display for DeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DeMode::Classical => "classical",
            DeMode::LinearGeneralized => "linear",
            DeMode::Coset => "coset",
        })
    }
}

/// Per-iteration statistics of the variable-to-check message density.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub l: usize,
    /// Bit error probability of `⟨P⟩`.
    pub p_e: f64,
    /// `∫ e^{-m/2} d⟨P⟩`.
    pub bhattacharyya: f64,
    /// Wasserstein-1 distance between the check outputs `Q(0)` and `Q(1)`;
    /// only tracked by the linear recursion.
    pub q_gap: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalStatus {
    Converged,
    StabilityReached,
    IterationCap,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeTrace {
    pub mode: DeMode,
    pub records: Vec<IterationRecord>,
    pub status: TerminalStatus,
}

impl DeTrace {
    pub fn last(&self) -> &IterationRecord {
        self.records.last().expect("at least one iteration")
    }

    pub fn decodable(&self) -> bool {
        self.status != TerminalStatus::IterationCap
    }
}

/// Output of one linear-ensemble iteration.
#[derive(Clone, Debug)]
pub struct LinearStep {
    /// Next variable-to-check pair.
    pub next: DensityPair,
    /// Check-to-variable pair `(Q(0), Q(1))` that produced it.
    pub check: DensityPair,
}

/// `Q(x) = Γ⁻¹(ρ(Γ⟨P⟩) + (-1)^x ρ(Γ((P(0) - P(1)) / 2)))`, then
/// `P'(x) = init(x) ⊗ λ(Q(x))`.
pub fn de_step_linear(
    state: &DensityPair,
    init: &DensityPair,
    deg: &DegreeDistribution,
) -> Result<LinearStep> {
    state.grid().ensure_same(&init.grid())?;
    let check = linear_check_update(state, deg.rho())?;
    let p0 = init
        .p0()
        .convolve(&lambda_apply(check.p0(), deg.lambda())?)?;
    let p1 = init
        .p1()
        .convolve(&lambda_apply(check.p1(), deg.lambda())?)?;
    Ok(LinearStep {
        next: DensityPair::new(p0, p1)?,
        check,
    })
}

/// Check-node half of the linear recursion: the pair `(Q(0), Q(1))`.
pub fn linear_check_update(state: &DensityPair, rho: &EdgePolynomial) -> Result<DensityPair> {
    let avg = rho_apply(&gamma_transform(state.average().as_signed())?, rho)?;
    let diff = rho_apply(&gamma_transform(&state.half_difference())?, rho)?;
    let q0 = gamma_inverse(&avg.combine(1.0, &diff, 1.0)?).into_density()?;
    let q1 = gamma_inverse(&avg.combine(1.0, &diff, -1.0)?).into_density()?;
    DensityPair::new(q0, q1)
}

/// `P' = init ⊗ λ(Γ⁻¹(ρ(Γ(P))))`.
pub fn de_step_coset(state: &Density, init: &Density, deg: &DegreeDistribution) -> Result<Density> {
    state.grid().ensure_same(&init.grid())?;
    let q = check_node(state, deg.rho())?;
    init.convolve(&lambda_apply(&q, deg.lambda())?)
}

/// `λ'(0) ρ'(1) B`, the local stability product at the fixed point of
/// perfect decoding.
pub fn local_stability_product(bhattacharyya: f64, deg: &DegreeDistribution) -> f64 {
    deg.lambda().derivative_at_zero() * deg.rho().derivative_at_one() * bhattacharyya
}

const STABILITY_SAMPLES: usize = 2000;

/// Whether the Bhattacharyya bound guarantees convergence from the current
/// state.
///
/// On the symmetrized channel one iteration maps a Bhattacharyya value `b`
/// to at most `f(b) = B₀ λ(1 - ρ(1 - b))`, with `B₀` the channel's value.
/// The state is stable when `f(x) < x` on all of `(0, current]`, which makes
/// the bound iterate to zero. Near zero this reduces to
/// `λ'(0) ρ'(1) B₀ < 1`.
pub fn stability_check(current: f64, channel: f64, deg: &DegreeDistribution) -> bool {
    if !(current < 1.0) {
        return false;
    }
    if current <= 0.0 {
        return true;
    }
    if local_stability_product(channel, deg) >= 1.0 {
        return false;
    }
    let bound = |x: f64| channel * deg.lambda().eval(1.0 - deg.rho().eval(1.0 - x));
    let linear = (1..=STABILITY_SAMPLES).map(|i| current * i as f64 / STABILITY_SAMPLES as f64);
    // Log-spaced points cover the approach to zero.
    let small = (1..=200).map(|i| current * 10f64.powf(-12.0 * i as f64 / 200.0));
    linear.chain(small).all(|x| bound(x) < x)
}

/// Stopping rules for [`run_de`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeConfig {
    pub grid: LlrGrid,
    pub max_iter: usize,
    pub p_e_target: f64,
    pub stability_stop: bool,
}

impl Default for DeConfig {
    fn default() -> Self {
        DeConfig {
            grid: LlrGrid::default(),
            max_iter: 100,
            p_e_target: 1e-8,
            stability_stop: true,
        }
    }
}

enum State {
    Single { p: Density, init: Density },
    Pair { p: DensityPair, init: DensityPair },
}

/// Runs density evolution for `ch` until convergence, stability (when
/// enabled) or the iteration cap.
pub fn run_de(
    ch: &Channel,
    deg: &DegreeDistribution,
    mode: DeMode,
    config: &DeConfig,
) -> Result<DeTrace> {
    if config.max_iter == 0 {
        return Err(Error::Precondition("max_iter must be at least 1".into()));
    }
    if mode == DeMode::Classical && !ch.is_symmetric() {
        return Err(Error::Precondition(format!(
            "classical density evolution needs a symmetric channel, got {ch}"
        )));
    }
    let grid = config.grid;
    let pair = ch.initial_pair(grid)?;
    let channel_b = pair.average().bhattacharyya();
    let mut state = match mode {
        DeMode::Classical => State::Single {
            p: pair.p0().clone(),
            init: pair.p0().clone(),
        },
        DeMode::Coset => {
            let avg = pair.average();
            State::Single {
                p: avg.clone(),
                init: avg,
            }
        }
        DeMode::LinearGeneralized => State::Pair {
            p: pair.clone(),
            init: pair,
        },
    };
    let mut records = Vec::new();
    for l in 1..=config.max_iter {
        let (avg, q_gap) = match &mut state {
            State::Single { p, init } => {
                *p = de_step_coset(p, init, deg)?;
                (p.clone(), None)
            }
            State::Pair { p, init } => {
                let step = de_step_linear(p, init, deg)?;
                let gap = step.check.p0().wasserstein_distance(step.check.p1())?;
                *p = step.next;
                (p.average(), Some(gap))
            }
        };
        let record = IterationRecord {
            l,
            p_e: avg.error_mass(),
            bhattacharyya: avg.bhattacharyya(),
            q_gap,
        };
        records.push(record);
        let status = if record.p_e < config.p_e_target {
            Some(TerminalStatus::Converged)
        } else if config.stability_stop && stability_check(record.bhattacharyya, channel_b, deg) {
            Some(TerminalStatus::StabilityReached)
        } else {
            None
        };
        if let Some(status) = status {
            return Ok(DeTrace {
                mode,
                records,
                status,
            });
        }
    }
    Ok(DeTrace {
        mode,
        records,
        status: TerminalStatus::IterationCap,
    })
}

/// Bisection controls for [`threshold_search`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdConfig {
    pub grid: LlrGrid,
    pub iter_cap: usize,
    pub tol: f64,
    pub max_bisections: usize,
    pub p_e_target: f64,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        ThresholdConfig {
            grid: LlrGrid::default(),
            iter_cap: 100,
            tol: 1e-4,
            max_bisections: 30,
            p_e_target: 1e-8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub p_star: f64,
    pub lo: f64,
    pub hi: f64,
    pub evaluations: usize,
    pub mode: DeMode,
}

/// Whether density evolution at `ch` enters the stability region or
/// converges within the iteration cap.
pub fn decodable(
    ch: &Channel,
    deg: &DegreeDistribution,
    mode: DeMode,
    config: &ThresholdConfig,
) -> Result<bool> {
    let de = DeConfig {
        grid: config.grid,
        max_iter: config.iter_cap,
        p_e_target: config.p_e_target,
        stability_stop: true,
    };
    Ok(run_de(ch, deg, mode, &de)?.decodable())
}

/// Bisects the family parameter for the largest decodable value. The family
/// must be decodable at `lo` and not at `hi`.
pub fn threshold_search(
    fam: &ChannelFamily,
    deg: &DegreeDistribution,
    mode: DeMode,
    config: &ThresholdConfig,
) -> Result<ThresholdResult> {
    let mut evaluations = 0;
    let mut probe = |value: f64| -> Result<bool> {
        evaluations += 1;
        decodable(&fam.at(value)?, deg, mode, config)
    };
    let (mut lo, mut hi) = (fam.lo, fam.hi);
    if !probe(lo)? {
        return Err(Error::Bracket(format!(
            "not decodable at the lower end {lo}"
        )));
    }
    if probe(hi)? {
        return Err(Error::Bracket(format!(
            "still decodable at the upper end {hi}"
        )));
    }
    for _ in 0..config.max_bisections {
        if hi - lo <= config.tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if probe(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(ThresholdResult {
        p_star: 0.5 * (lo + hi),
        lo,
        hi,
        evaluations,
        mode,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coarse() -> LlrGrid {
        LlrGrid::new(0.05, 25.0).unwrap()
    }

    #[test]
    fn stability_product_example() {
        // λ = x, ρ = x³, B = 0.9.
        let deg = DegreeDistribution::new(
            EdgePolynomial::regular(2).unwrap(),
            EdgePolynomial::regular(4).unwrap(),
            0,
        )
        .unwrap();
        assert!((local_stability_product(0.9, &deg) - 2.7).abs() < 1e-12);
        assert!(!stability_check(0.9, 0.9, &deg));
    }

    #[test]
    fn perfect_state_is_stable() {
        let deg = DegreeDistribution::regular(3, 4).unwrap();
        assert!(stability_check(0.0, 0.7, &deg));
        assert!(stability_check(1e-3, 0.7, &deg));
        assert!(!stability_check(0.6, 0.7, &deg));
    }

    #[test]
    fn perfect_channel_is_a_fixed_point() {
        let g = coarse();
        let deg = DegreeDistribution::regular(3, 4).unwrap();
        let perfect = Density::dirac(g, f64::INFINITY);
        let pair = DensityPair::symmetric(perfect.clone());
        let step = de_step_linear(&pair, &pair, &deg).unwrap();
        assert!(step.next.p0().l1_distance(&perfect).unwrap() < 1e-12);
        assert!(step.next.p1().l1_distance(&perfect).unwrap() < 1e-12);
        let coset = de_step_coset(&perfect, &perfect, &deg).unwrap();
        assert!(coset.l1_distance(&perfect).unwrap() < 1e-12);
        assert!(coset.error_mass() < 1e-15);
    }

    #[test]
    fn symmetric_pair_gives_equal_checks() {
        let g = coarse();
        let deg = DegreeDistribution::regular(3, 6).unwrap();
        let pair = Channel::Bsc { eps: 0.07 }.initial_pair(g).unwrap();
        let step = de_step_linear(&pair, &pair, &deg).unwrap();
        assert_eq!(step.check.p0(), step.check.p1());
        let coset = de_step_coset(pair.p0(), pair.p0(), &deg).unwrap();
        assert!(step.next.p0().l1_distance(&coset).unwrap() < 1e-12);
    }

    #[test]
    fn classical_rejects_asymmetric_channels() {
        let deg = DegreeDistribution::regular(3, 4).unwrap();
        let err = run_de(
            &Channel::ZChannel { p: 0.3 },
            &deg,
            DeMode::Classical,
            &DeConfig::default(),
        );
        assert!(matches!(err, Err(Error::Precondition(_))));
    }

    #[test]
    fn zero_iterations_rejected() {
        let deg = DegreeDistribution::regular(3, 4).unwrap();
        let cfg = DeConfig {
            max_iter: 0,
            ..DeConfig::default()
        };
        assert!(run_de(&Channel::Bsc { eps: 0.01 }, &deg, DeMode::Coset, &cfg).is_err());
    }

    #[test]
    fn bracket_must_straddle() {
        let deg = DegreeDistribution::regular(3, 4).unwrap();
        let cfg = ThresholdConfig {
            grid: coarse(),
            ..ThresholdConfig::default()
        };
        let fam = ChannelFamily::z_channel(0.47, 0.5).unwrap();
        assert!(matches!(
            threshold_search(&fam, &deg, DeMode::Coset, &cfg),
            Err(Error::Bracket(_))
        ));
    }
}
