//! Experiment configuration files.
//!
//! A config is a TOML document. Every field is optional at parse time; the
//! command that runs decides what it needs. Command-line flags are merged on
//! top before anything runs, and the merged value is what gets echoed into
//! the result record.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use qwalk_povm::noise::NoiseParams;
use qwalk_povm::protocols::sic::SicSpec;
use qwalk_povm::protocols::usd::{UsdInput, UsdSpec};
use qwalk_povm::WalkSpec;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Simulate,
    Usd,
    Sic,
    ExtractPovm,
    Compile,
    Noise,
    Tomography,
    Sweep,
}

impl fmt::Display for CommandKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            CommandKind::Simulate => "simulate",
            CommandKind::Usd => "usd",
            CommandKind::Sic => "sic",
            CommandKind::ExtractPovm => "extract-povm",
            CommandKind::Compile => "compile",
            CommandKind::Noise => "noise",
            CommandKind::Tomography => "tomography",
            CommandKind::Sweep => "sweep",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum UsdInputKind {
    Plus,
    Minus,
    Superposition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolKind {
    Usd,
    Sic,
    Custom,
}

/// `plus`/`minus`/`superposition` for usd, `1..=4` for sic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProtocolInput {
    Index(usize),
    Usd(UsdInputKind),
}

/// Which walk to run. Fields not used by `kind` must be absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    pub kind: ProtocolKind,
    /// Angle between the two usd states, degrees.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<ProtocolInput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub walk: Option<WalkSpec>,
}

impl ProtocolConfig {
    pub fn usd(phi: f64, input: UsdInputKind, a: Option<f64>, b: Option<f64>) -> Self {
        Self {
            kind: ProtocolKind::Usd,
            phi: Some(phi),
            input: Some(ProtocolInput::Usd(input)),
            a,
            b,
            walk: None,
        }
    }

    pub fn sic(input: usize) -> Self {
        Self {
            kind: ProtocolKind::Sic,
            phi: None,
            input: Some(ProtocolInput::Index(input)),
            a: None,
            b: None,
            walk: None,
        }
    }

    pub fn custom(walk: WalkSpec) -> Self {
        Self {
            kind: ProtocolKind::Custom,
            phi: None,
            input: None,
            a: None,
            b: None,
            walk: Some(walk),
        }
    }

    /// Checks that exactly the fields used by `kind` are present.
    pub fn validate(&self) -> Result<()> {
        let kind = self.kind;
        let forbid = |present: bool, field: &str| -> Result<()> {
            if present {
                bail!(
                    "protocol.{field} is not used by kind = \"{}\"",
                    format!("{kind:?}").to_lowercase()
                );
            }
            Ok(())
        };
        match kind {
            ProtocolKind::Usd => {
                if self.phi.is_none() {
                    bail!("protocol.phi is required for kind = \"usd\"");
                }
                match self.input {
                    Some(ProtocolInput::Usd(_)) => {}
                    _ => bail!("protocol.input must be \"plus\", \"minus\" or \"superposition\" for kind = \"usd\""),
                }
                forbid(self.walk.is_some(), "walk")
            }
            ProtocolKind::Sic => {
                match self.input {
                    Some(ProtocolInput::Index(_)) => {}
                    _ => bail!("protocol.input must be an integer 1..=4 for kind = \"sic\""),
                }
                forbid(self.phi.is_some(), "phi")?;
                forbid(self.a.is_some() || self.b.is_some(), "a/b")?;
                forbid(self.walk.is_some(), "walk")
            }
            ProtocolKind::Custom => {
                if self.walk.is_none() {
                    bail!("protocol.walk is required for kind = \"custom\"");
                }
                forbid(self.phi.is_some(), "phi")?;
                forbid(self.input.is_some(), "input")?;
                forbid(self.a.is_some() || self.b.is_some(), "a/b")
            }
        }
    }

    pub fn walk_spec(&self) -> Result<WalkSpec> {
        self.validate()?;
        Ok(match self.kind {
            ProtocolKind::Usd => self.usd_spec()?.walk_spec()?,
            ProtocolKind::Sic => SicSpec::new(self.sic_index()?)?.walk_spec(),
            ProtocolKind::Custom => self.walk.clone().expect("validated"),
        })
    }

    pub fn sic_index(&self) -> Result<usize> {
        match (self.kind, self.input) {
            (ProtocolKind::Sic, Some(ProtocolInput::Index(i))) => Ok(i),
            _ => bail!("protocol is not sic"),
        }
    }

    pub fn usd_spec(&self) -> Result<UsdSpec> {
        let (ProtocolKind::Usd, Some(phi), Some(ProtocolInput::Usd(input))) =
            (self.kind, self.phi, self.input)
        else {
            bail!("protocol is not a complete usd configuration");
        };
        let input = match input {
            UsdInputKind::Plus => UsdInput::Plus,
            UsdInputKind::Minus => UsdInput::Minus,
            UsdInputKind::Superposition => match (self.a, self.b) {
                (Some(a), Some(b)) => UsdInput::Superposition { a, b },
                _ => bail!("protocol.a and protocol.b are required for a superposition input"),
            },
        };
        Ok(UsdSpec::new(phi, input)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    #[serde(default = "default_visibility")]
    pub visibility: f64,
    #[serde(default = "default_jitter")]
    pub angle_jitter_deg: f64,
    #[serde(default = "default_counts")]
    pub expected_counts: f64,
    #[serde(default = "default_trials")]
    pub trials: usize,
}

fn default_visibility() -> f64 {
    NoiseParams::default().visibility
}

fn default_jitter() -> f64 {
    NoiseParams::default().angle_jitter_deg
}

fn default_counts() -> f64 {
    NoiseParams::default().expected_counts
}

fn default_trials() -> usize {
    1
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            visibility: default_visibility(),
            angle_jitter_deg: default_jitter(),
            expected_counts: default_counts(),
            trials: default_trials(),
        }
    }
}

impl NoiseConfig {
    pub fn params(&self, seed: u64) -> NoiseParams {
        NoiseParams {
            visibility: self.visibility,
            angle_jitter_deg: self.angle_jitter_deg,
            expected_counts: self.expected_counts,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub start: f64,
    pub stop: f64,
    #[serde(default = "default_sweep_step")]
    pub step: f64,
}

fn default_sweep_step() -> f64 {
    1.0
}

impl SweepConfig {
    /// Angles `start, start + step, …` up to and including `stop`.
    pub fn angles(&self) -> Result<Vec<f64>> {
        let SweepConfig { start, stop, step } = *self;
        if !(start > 0.0 && stop <= 90.0) {
            bail!("sweep range [{start}, {stop}] must lie within (0, 90] degrees");
        }
        if stop < start {
            bail!("sweep range is empty: stop {stop} is below start {start}");
        }
        if step.is_nan() || step <= 0.0 {
            bail!("sweep step must be positive, got {step}");
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize;
        Ok((0..=count)
            .map(|k| {
                let phi = start + k as f64 * step;
                (phi * 1e9).round() / 1e9
            })
            .collect())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TomographyConfig {
    /// Measured `[P(0), P(2), P(4), P(6)]` for inputs 1..=4. Defaults to the
    /// published measurements when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<Vec<[f64; 4]>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<CommandKind>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protocol: Option<ProtocolConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tomography: Option<TomographyConfig>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text)?;
        if let Some(p) = &config.protocol {
            p.validate()?;
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("invalid config {}", path.display()))
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn protocol(&self) -> Result<&ProtocolConfig> {
        self.protocol
            .as_ref()
            .context("no protocol given: pass protocol flags or a [protocol] section")
    }
}

/// Walk spec from a TOML or JSON file, chosen by extension.
pub fn load_walk(path: &Path) -> Result<WalkSpec> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read walk file {}", path.display()))?;
    let parsed = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(anyhow::Error::from)
    } else {
        toml::from_str(&text).map_err(anyhow::Error::from)
    };
    parsed.with_context(|| format!("invalid walk file {}", path.display()))
}
