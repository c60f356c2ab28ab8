//! Block-level Monte Carlo estimation of the BP bit error rate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bp::BpDecoder;
use super::gf2::Gf2Solver;
use super::graph::TannerGraph;
use crate::channel::Channel;
use crate::error::{Error, Result};

/// Which ensemble the transmitted words are drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum McMode {
    /// Uniform codeword of the sampled linear code.
    #[serde(rename = "linear")]
    LinearRandomCodeword,
    /// Uniform word, decoded in the coset selected by its syndrome.
    #[serde(rename = "coset")]
    CosetSymmetrized,
}

impl std::fmt::Display for McMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            McMode::LinearRandomCodeword => "linear",
            McMode::CosetSymmetrized => "coset",
        })
    }
}

fn default_clamp() -> f64 {
    25.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub n: usize,
    pub d_v: usize,
    pub d_c: usize,
    pub channel: Channel,
    pub mode: McMode,
    pub bp_iterations: usize,
    pub blocks: usize,
    pub seed: u64,
    /// Message magnitude bound inside the decoder.
    #[serde(default = "default_clamp")]
    pub clamp: f64,
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        self.channel.validate()?;
        if self.blocks == 0 {
            return Err(Error::Precondition("at least one block is required".into()));
        }
        if !(self.clamp > 0.0) {
            return Err(Error::Precondition(format!(
                "clamp must be positive, got {}",
                self.clamp
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockResult {
    pub bit_errors: usize,
    pub bits: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BerEstimate {
    pub ber: f64,
    /// Standard error of the mean of the per-block error rates.
    pub stderr: f64,
    pub blocks: usize,
    pub bit_errors: usize,
    pub bits: usize,
    pub per_block: Vec<BlockResult>,
}

/// Graph plus the null-space sampler the linear mode needs; built once per run.
pub struct McSetup {
    pub graph: TannerGraph,
    solver: Option<Gf2Solver>,
}

impl McSetup {
    pub fn new(cfg: &McConfig) -> Result<Self> {
        cfg.validate()?;
        let graph = TannerGraph::sample(cfg.n, cfg.d_v, cfg.d_c, cfg.seed)?;
        let solver = match cfg.mode {
            McMode::LinearRandomCodeword => Some(Gf2Solver::new(&graph.parity_check())),
            McMode::CosetSymmetrized => None,
        };
        Ok(McSetup { graph, solver })
    }
}

/// Per-block generator: the run seed with the block index as stream, so
/// results do not depend on scheduling.
fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block + 1);
    rng
}

/// Transmits and decodes one block; errors are counted against the
/// transmitted word.
pub fn simulate_block(setup: &McSetup, cfg: &McConfig, block: u64) -> BlockResult {
    let g = &setup.graph;
    let mut rng = block_rng(cfg.seed, block);
    let (word, syndrome) = match &setup.solver {
        Some(solver) => (solver.sample(&mut rng), vec![0u8; g.m()]),
        None => {
            let w: Vec<u8> = (0..g.n()).map(|_| rng.gen::<bool>() as u8).collect();
            let s = g.syndrome(&w);
            (w, s)
        }
    };
    let llr: Vec<f64> = word
        .iter()
        .map(|&b| cfg.channel.sample_llr(b, &mut rng))
        .collect();
    let mut decoder = BpDecoder::new(g, cfg.clamp);
    let out = decoder.decode(&llr, &syndrome, cfg.bp_iterations);
    let bit_errors = out.bits.iter().zip(&word).filter(|(a, b)| a != b).count();
    BlockResult {
        bit_errors,
        bits: g.n(),
    }
}

/// Runs `cfg.blocks` blocks, on `workers` threads when given.
pub fn estimate_ber(cfg: &McConfig, workers: Option<usize>) -> Result<BerEstimate> {
    let setup = McSetup::new(cfg)?;
    let run = || -> Vec<BlockResult> {
        (0..cfg.blocks as u64)
            .into_par_iter()
            .map(|b| simulate_block(&setup, cfg, b))
            .collect()
    };
    let per_block = match workers {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    };
    Ok(summarize(per_block))
}

fn summarize(per_block: Vec<BlockResult>) -> BerEstimate {
    let blocks = per_block.len();
    let bit_errors: usize = per_block.iter().map(|r| r.bit_errors).sum();
    let bits: usize = per_block.iter().map(|r| r.bits).sum();
    let rates: Vec<f64> = per_block
        .iter()
        .map(|r| r.bit_errors as f64 / r.bits as f64)
        .collect();
    let mean = rates.iter().sum::<f64>() / blocks as f64;
    let stderr = if blocks > 1 {
        let var = rates.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (blocks - 1) as f64;
        (var / blocks as f64).sqrt()
    } else {
        0.0
    };
    BerEstimate {
        ber: bit_errors as f64 / bits as f64,
        stderr,
        blocks,
        bit_errors,
        bits,
        per_block,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(mode: McMode, p: f64) -> McConfig {
        McConfig {
            n: 400,
            d_v: 3,
            d_c: 4,
            channel: Channel::ZChannel { p },
            mode,
            bp_iterations: 50,
            blocks: 4,
            seed: 7,
            clamp: 25.0,
        }
    }

    #[test]
    fn noiseless_channel_decodes_exactly() {
        for mode in [McMode::LinearRandomCodeword, McMode::CosetSymmetrized] {
            let est = estimate_ber(&cfg(mode, 0.0), Some(1)).unwrap();
            assert_eq!(est.bit_errors, 0);
            assert_eq!(est.bits, 1600);
        }
    }

    #[test]
    fn results_do_not_depend_on_worker_count() {
        let c = cfg(McMode::CosetSymmetrized, 0.35);
        let a = estimate_ber(&c, Some(1)).unwrap();
        let b = estimate_ber(&c, Some(3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn linear_words_are_codewords() {
        let c = cfg(McMode::LinearRandomCodeword, 0.1);
        let setup = McSetup::new(&c).unwrap();
        let solver = setup.solver.as_ref().unwrap();
        let mut rng = block_rng(1, 0);
        let w = solver.sample(&mut rng);
        assert!(setup.graph.syndrome(&w).iter().all(|&s| s == 0));
    }

    #[test]
    fn config_round_trips_through_json() {
        let c = cfg(McMode::LinearRandomCodeword, 0.2);
        let s = serde_json::to_string(&c).unwrap();
        assert!(s.contains("\"mode\":\"linear\""));
        let back: McConfig = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
    }
}
