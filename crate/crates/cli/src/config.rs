//! Run configuration: one JSON document, every field defaulted.

use std::path::{Path, PathBuf};

use ldpc_de::asymptotics::BascParams;
use ldpc_de::mc::McMode;
use ldpc_de::{Channel, ChannelFamily, ChannelParameter, DeMode, DegreeDistribution, LlrGrid};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    De,
    Threshold,
    Rates,
    Qgap,
    Mc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default = "default_degrees")]
    pub degrees: DegreeDistribution,
    #[serde(default = "default_channel")]
    pub channel: Channel,
    #[serde(default)]
    pub grid: LlrGrid,
    #[serde(default = "default_mode")]
    pub mode: DeMode,
    #[serde(default)]
    pub de: DeSection,
    #[serde(default)]
    pub threshold: ThresholdSection,
    #[serde(default)]
    pub rates: RatesSection,
    #[serde(default)]
    pub qgap: QgapSection,
    #[serde(default)]
    pub mc: McSection,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

fn default_degrees() -> DegreeDistribution {
    DegreeDistribution::regular(3, 4).expect("valid regular degrees")
}

fn default_channel() -> Channel {
    Channel::ZChannel { p: 0.3 }
}

fn default_mode() -> DeMode {
    DeMode::LinearGeneralized
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeSection {
    pub max_iter: usize,
    pub p_e_target: f64,
    pub stability_stop: bool,
}

impl Default for DeSection {
    fn default() -> Self {
        DeSection {
            max_iter: 100,
            p_e_target: 1e-8,
            stability_stop: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThresholdSection {
    /// Swept channel parameter; inferred from the channel type when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parameter: Option<ChannelParameter>,
    pub lo: f64,
    pub hi: f64,
    pub tol: f64,
    pub max_bisections: usize,
    pub iter_cap: usize,
    pub p_e_target: f64,
}

impl Default for ThresholdSection {
    fn default() -> Self {
        ThresholdSection {
            parameter: None,
            lo: 0.0,
            hi: 0.5,
            tol: 1e-4,
            max_bisections: 30,
            iter_cap: 100,
            p_e_target: 1e-8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RateTerm {
    Diff,
    Avg,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RatesSection {
    /// Defaults to the crossover pair of `channel`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basc: Option<BascParams>,
    pub term: RateTerm,
    pub k: u8,
    pub r: f64,
    pub deltas: Vec<u32>,
}

impl Default for RatesSection {
    fn default() -> Self {
        RatesSection {
            basc: None,
            term: RateTerm::Diff,
            k: 1,
            r: 1.0,
            deltas: (4..=40).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QgapSection {
    pub deltas: Vec<u32>,
}

impl Default for QgapSection {
    fn default() -> Self {
        QgapSection {
            deltas: (2..=24).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McSection {
    pub n: usize,
    pub d_v: usize,
    pub d_c: usize,
    pub mode: McMode,
    pub bp_iterations: usize,
    pub blocks: usize,
    pub clamp: f64,
    /// Thread count; results do not depend on it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

impl Default for McSection {
    fn default() -> Self {
        McSection {
            n: 10_000,
            d_v: 3,
            d_c: 4,
            mode: McMode::CosetSymmetrized,
            bp_iterations: 100,
            blocks: 10,
            clamp: LlrGrid::DEFAULT_HALF_RANGE,
            workers: None,
        }
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: None,
            degrees: default_degrees(),
            channel: default_channel(),
            grid: LlrGrid::default(),
            mode: default_mode(),
            de: DeSection::default(),
            threshold: ThresholdSection::default(),
            rates: RatesSection::default(),
            qgap: QgapSection::default(),
            mc: McSection::default(),
            seed: 0,
            out: None,
        }
    }
}

/// A configuration problem, located by its field path.
#[derive(Debug)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.path.is_empty() || self.path == "." {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

fn invalid(path: &str, message: impl ToString) -> ConfigError {
    ConfigError {
        path: path.to_string(),
        message: message.to_string(),
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| ConfigError {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid("", format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Replaces grid fields with the given overrides.
    pub fn override_grid(
        &mut self,
        bin_width: Option<f64>,
        half_range: Option<f64>,
    ) -> Result<(), ConfigError> {
        if bin_width.is_none() && half_range.is_none() {
            return Ok(());
        }
        let w = bin_width.unwrap_or(self.grid.bin_width());
        let m = half_range.unwrap_or(self.grid.half_range());
        self.grid = LlrGrid::new(w, m).map_err(|e| invalid("grid", e))?;
        Ok(())
    }

    /// Checks the fields the chosen command reads.
    pub fn validate(&self, command: Command) -> Result<(), ConfigError> {
        match command {
            Command::De => {
                self.channel.validate().map_err(|e| invalid("channel", e))?;
                if self.de.max_iter == 0 {
                    return Err(invalid("de.max_iter", "must be at least 1"));
                }
            }
            Command::Threshold => {
                self.family()?;
                if !(self.threshold.tol > 0.0) {
                    return Err(invalid("threshold.tol", "must be positive"));
                }
                if self.threshold.iter_cap == 0 {
                    return Err(invalid("threshold.iter_cap", "must be at least 1"));
                }
            }
            Command::Rates => {
                self.basc()?;
                if self.rates.k > 1 {
                    return Err(invalid("rates.k", "must be 0 or 1"));
                }
                if self.rates.deltas.is_empty() {
                    return Err(invalid("rates.deltas", "must not be empty"));
                }
            }
            Command::Qgap => {
                self.channel.validate().map_err(|e| invalid("channel", e))?;
                if self.qgap.deltas.is_empty() {
                    return Err(invalid("qgap.deltas", "must not be empty"));
                }
            }
            Command::Mc => {
                self.mc_config().validate().map_err(|e| invalid("mc", e))?;
                let m = &self.mc;
                if m.d_c == 0 || m.d_v == 0 || !(m.n * m.d_v).is_multiple_of(m.d_c) {
                    return Err(invalid("mc", "n * d_v must be a positive multiple of d_c"));
                }
            }
        }
        Ok(())
    }

    pub fn family(&self) -> Result<ChannelFamily, ConfigError> {
        let t = &self.threshold;
        let parameter = match t.parameter {
            Some(p) => p,
            None => match self.channel {
                Channel::ZChannel { .. } => ChannelParameter::P,
                Channel::Bsc { .. } => ChannelParameter::Eps,
                Channel::Basc { .. } => ChannelParameter::Eps1,
                Channel::BiAwgn { .. } => ChannelParameter::Sigma,
                Channel::Table { .. } => {
                    return Err(invalid(
                        "channel",
                        "table channels have no parameter to sweep",
                    ))
                }
            },
        };
        ChannelFamily::new(self.channel.clone(), parameter, t.lo, t.hi)
            .map_err(|e| invalid("threshold", e))
    }

    pub fn basc(&self) -> Result<BascParams, ConfigError> {
        match self.rates.basc {
            Some(p) => BascParams::new(p.eps0, p.eps1).map_err(|e| invalid("rates.basc", e)),
            None => {
                let (e0, e1) = self
                    .channel
                    .basc_params()
                    .map_err(|e| invalid("channel", e))?;
                BascParams::new(e0, e1).map_err(|e| invalid("channel", e))
            }
        }
    }

    pub fn mc_config(&self) -> ldpc_de::mc::McConfig {
        ldpc_de::mc::McConfig {
            n: self.mc.n,
            d_v: self.mc.d_v,
            d_c: self.mc.d_c,
            channel: self.channel.clone(),
            mode: self.mc.mode,
            bp_iterations: self.mc.bp_iterations,
            blocks: self.mc.blocks,
            seed: self.seed,
            clamp: self.mc.clamp,
        }
    }
}
