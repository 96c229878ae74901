use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

mod config;
mod output;
mod run;

use config::{
    load_walk, CommandKind, ExperimentConfig, NoiseConfig, ProtocolConfig, ProtocolInput,
    ProtocolKind, SweepConfig, TomographyConfig, UsdInputKind,
};

/// Quantum-walk measurement toolkit: simulate walks, extract the induced
/// POVMs, plan wave plates, model noise and invert SIC statistics.
#[derive(Debug, Parser)]
#[command(name = "qwalk", version)]
struct Cli {
    /// TOML experiment configuration; flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// RNG seed for noisy runs.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Directory for result files.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evolve any configured walk and tabulate the position distribution.
    Simulate {
        #[command(flatten)]
        protocol: ProtocolArgs,
        #[command(flatten)]
        noise: NoiseArgs,
    },
    /// Unambiguous discrimination of |φ+⟩ and |φ−⟩.
    Usd {
        /// Angle between the states, degrees in (0, 90].
        #[arg(long)]
        phi: Option<f64>,
        #[arg(long, value_enum)]
        input: Option<UsdInputKind>,
        /// Weight of |φ+⟩ for a superposition input.
        #[arg(long)]
        a: Option<f64>,
        /// Weight of |φ−⟩ for a superposition input.
        #[arg(long)]
        b: Option<f64>,
        #[command(flatten)]
        noise: NoiseArgs,
    },
    /// SIC-POVM walk for input state 1..=4.
    Sic {
        #[arg(long)]
        input: Option<usize>,
        #[command(flatten)]
        noise: NoiseArgs,
    },
    /// Per-site measurement operators of the configured walk.
    ExtractPovm {
        #[command(flatten)]
        protocol: ProtocolArgs,
    },
    /// Wave-plate layout realizing the configured coin schedule.
    Compile {
        #[command(flatten)]
        protocol: ProtocolArgs,
    },
    /// Monte Carlo error budget under visibility loss, angle jitter and shot noise.
    Noise {
        #[command(flatten)]
        protocol: ProtocolArgs,
        #[command(flatten)]
        noise: NoiseArgs,
    },
    /// Reconstruct density matrices from SIC outcome rows.
    Tomography {
        /// CSV with header `p0,p2,p4,p6` and one row per input state.
        #[arg(long, value_name = "PATH")]
        rows: Option<PathBuf>,
    },
    /// Inconclusive probability over a range of angles.
    Sweep {
        #[arg(long)]
        start: Option<f64>,
        #[arg(long)]
        stop: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
        #[command(flatten)]
        noise: NoiseArgs,
    },
}

#[derive(Debug, Args)]
struct ProtocolArgs {
    #[arg(long, value_enum)]
    protocol: Option<ProtocolKind>,
    #[arg(long)]
    phi: Option<f64>,
    /// `plus`, `minus` or `superposition` for usd; 1..=4 for sic.
    #[arg(long)]
    input: Option<String>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    /// Walk specification file (TOML, or JSON by extension) for `custom`.
    #[arg(long, value_name = "PATH")]
    walk: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct NoiseArgs {
    /// Interference visibility in [0, 1].
    #[arg(long)]
    visibility: Option<f64>,
    /// Standard deviation of wave-plate angle errors, degrees.
    #[arg(long)]
    jitter: Option<f64>,
    /// Expected detected photons per configuration.
    #[arg(long)]
    counts: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
}

impl NoiseArgs {
    fn any(&self) -> bool {
        self.visibility.is_some()
            || self.jitter.is_some()
            || self.counts.is_some()
            || self.trials.is_some()
    }

    fn apply(&self, config: &mut ExperimentConfig) {
        if !self.any() {
            return;
        }
        let noise = config.noise.get_or_insert_with(NoiseConfig::default);
        if let Some(v) = self.visibility {
            noise.visibility = v;
        }
        if let Some(j) = self.jitter {
            noise.angle_jitter_deg = j;
        }
        if let Some(c) = self.counts {
            noise.expected_counts = c;
        }
        if let Some(t) = self.trials {
            noise.trials = t;
        }
    }
}

fn parse_usd_input(text: &str) -> Result<UsdInputKind> {
    match text {
        "plus" => Ok(UsdInputKind::Plus),
        "minus" => Ok(UsdInputKind::Minus),
        "superposition" => Ok(UsdInputKind::Superposition),
        other => bail!("--input for usd must be plus, minus or superposition, got `{other}`"),
    }
}

fn merge_usd(
    config: &mut ExperimentConfig,
    phi: Option<f64>,
    input: Option<UsdInputKind>,
    a: Option<f64>,
    b: Option<f64>,
) -> Result<()> {
    let current = match config.protocol.take() {
        Some(p) if p.kind == ProtocolKind::Usd => {
            let input = match p.input {
                Some(ProtocolInput::Usd(kind)) => Some(kind),
                _ => None,
            };
            (p.phi, input, p.a, p.b)
        }
        _ => (None, None, None, None),
    };
    let input = input
        .or(current.1)
        .or_else(|| (a.is_some() || b.is_some()).then_some(UsdInputKind::Superposition));
    config.protocol = Some(ProtocolConfig::usd(
        phi.or(current.0)
            .context("usd needs --phi or protocol.phi")?,
        input.context("usd needs --input or protocol.input")?,
        a.or(current.2),
        b.or(current.3),
    ));
    Ok(())
}

fn merge_sic(config: &mut ExperimentConfig, input: Option<usize>) -> Result<()> {
    let current = config.protocol.as_ref().and_then(|p| p.sic_index().ok());
    config.protocol = Some(ProtocolConfig::sic(
        input
            .or(current)
            .context("sic needs --input or protocol.input")?,
    ));
    Ok(())
}

impl ProtocolArgs {
    fn apply(&self, config: &mut ExperimentConfig) -> Result<()> {
        let kind = self.protocol.or(match &config.protocol {
            Some(p) => Some(p.kind),
            None if self.walk.is_some() => Some(ProtocolKind::Custom),
            None => None,
        });
        match kind {
            None => Ok(()),
            Some(ProtocolKind::Usd) => {
                let input = self.input.as_deref().map(parse_usd_input).transpose()?;
                merge_usd(config, self.phi, input, self.a, self.b)
            }
            Some(ProtocolKind::Sic) => {
                let input = self
                    .input
                    .as_deref()
                    .map(|s| s.parse::<usize>())
                    .transpose()
                    .context("--input for sic must be an integer 1..=4")?;
                merge_sic(config, input)
            }
            Some(ProtocolKind::Custom) => {
                if let Some(path) = &self.walk {
                    config.protocol = Some(ProtocolConfig::custom(load_walk(path)?));
                }
                if config
                    .protocol
                    .as_ref()
                    .is_none_or(|p| p.kind != ProtocolKind::Custom)
                {
                    bail!("custom protocol needs --walk or a [protocol.walk] section");
                }
                Ok(())
            }
        }
    }
}

fn read_rows(path: &PathBuf) -> Result<Vec<[f64; 4]>> {
    let mut reader =
        csv::Reader::from_path(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut rows = Vec::new();
    for (i, record) in reader.deserialize::<[f64; 4]>().enumerate() {
        rows.push(record.with_context(|| format!("{}: row {}", path.display(), i + 1))?);
    }
    Ok(rows)
}

/// Config file plus flag overrides.
fn effective_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(out) = &cli.out {
        config.out = Some(out.clone());
    }
    let Some(command) = &cli.command else {
        return Ok(config);
    };
    match command {
        Command::Simulate { protocol, noise } => {
            config.command = Some(CommandKind::Simulate);
            protocol.apply(&mut config)?;
            noise.apply(&mut config);
        }
        Command::Usd {
            phi,
            input,
            a,
            b,
            noise,
        } => {
            config.command = Some(CommandKind::Usd);
            merge_usd(&mut config, *phi, *input, *a, *b)?;
            noise.apply(&mut config);
        }
        Command::Sic { input, noise } => {
            config.command = Some(CommandKind::Sic);
            merge_sic(&mut config, *input)?;
            noise.apply(&mut config);
        }
        Command::ExtractPovm { protocol } => {
            config.command = Some(CommandKind::ExtractPovm);
            protocol.apply(&mut config)?;
        }
        Command::Compile { protocol } => {
            config.command = Some(CommandKind::Compile);
            protocol.apply(&mut config)?;
        }
        Command::Noise { protocol, noise } => {
            config.command = Some(CommandKind::Noise);
            protocol.apply(&mut config)?;
            noise.apply(&mut config);
        }
        Command::Tomography { rows } => {
            config.command = Some(CommandKind::Tomography);
            if let Some(path) = rows {
                config.tomography = Some(TomographyConfig {
                    rows: Some(read_rows(path)?),
                });
            }
        }
        Command::Sweep {
            start,
            stop,
            step,
            noise,
        } => {
            config.command = Some(CommandKind::Sweep);
            let current = config.sweep.clone();
            let start = start.or(current.as_ref().map(|s| s.start));
            let stop = stop.or(current.as_ref().map(|s| s.stop)).or(start);
            let step = step.or(current.as_ref().map(|s| s.step)).unwrap_or(1.0);
            if let (Some(start), Some(stop)) = (start, stop) {
                config.sweep = Some(SweepConfig { start, stop, step });
            }
            noise.apply(&mut config);
        }
    }
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = effective_config(&cli).and_then(|config| run::run(&config));
    match result {
        Ok(record) => {
            let dir = record
                .config
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from("."));
            for file in
                std::iter::once("result.json").chain(record.files.iter().map(String::as_str))
            {
                println!("{}", dir.join(file).display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
