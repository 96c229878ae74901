use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use qwalk_povm::noise::{error_budget, ErrorBudget};
use qwalk_povm::optics::plan_placement;
use qwalk_povm::povm::{match_rank1, PovmElement};
use qwalk_povm::protocols::sic::{sic_vectors, SicSpec, ELEMENT_SITES};
use qwalk_povm::protocols::usd::{self, usd_expected};
use qwalk_povm::reference::SIC_DISTRIBUTIONS;
use qwalk_povm::tomography::project_psd;
use qwalk_povm::{
    evolve, fidelity_report, kraus_from_walk, position_distribution, povm_from_kraus, reconstruct,
    Position, PositionDistribution, SicOutcome, WalkSpec,
};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{
    CommandKind, ExperimentConfig, NoiseConfig, ProtocolConfig, ProtocolKind, UsdInputKind,
};
use crate::output;

/// Self-describing summary written as `result.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub version: String,
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub command: CommandKind,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theory: Option<BTreeMap<Position, f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampled: Option<BTreeMap<Position, f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counts: Option<BTreeMap<Position, u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance: Option<f64>,
    pub derived: BTreeMap<String, serde_json::Value>,
    pub files: Vec<String>,
}

pub fn config_hash(config: &ExperimentConfig) -> Result<String> {
    let canonical = serde_json::to_vec(config)?;
    Ok(hex::encode(Sha256::digest(&canonical)))
}

struct Output {
    theory: Option<PositionDistribution>,
    sampled: Option<PositionDistribution>,
    counts: Option<BTreeMap<Position, u64>>,
    distance: Option<f64>,
    derived: BTreeMap<String, serde_json::Value>,
    files: Vec<String>,
}

impl Output {
    fn new() -> Self {
        Self {
            theory: None,
            sampled: None,
            counts: None,
            distance: None,
            derived: BTreeMap::new(),
            files: Vec::new(),
        }
    }

    fn derive(&mut self, key: &str, value: impl Serialize) -> Result<()> {
        self.derived
            .insert(key.to_string(), serde_json::to_value(value)?);
        Ok(())
    }
}

/// Runs the configured command, writing all files into the output directory.
pub fn run(config: &ExperimentConfig) -> Result<ResultRecord> {
    let command = config
        .command
        .context("no command given: pass a subcommand or set `command` in the config")?;
    let out_dir = config.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&out_dir)
        .with_context(|| format!("cannot create output directory {}", out_dir.display()))?;

    let mut out = Output::new();
    match command {
        CommandKind::Simulate | CommandKind::Usd | CommandKind::Sic => {
            simulate(config, command, &out_dir, &mut out)?
        }
        CommandKind::ExtractPovm => extract(config, &out_dir, &mut out)?,
        CommandKind::Compile => compile(config, &out_dir, &mut out)?,
        CommandKind::Noise => noise(config, &out_dir, &mut out)?,
        CommandKind::Tomography => tomography(config, &out_dir, &mut out)?,
        CommandKind::Sweep => sweep(config, &out_dir, &mut out)?,
    }
    // TOML integers are signed, so seeds above i64::MAX only appear in result.json
    if let Ok(text) = config.to_toml() {
        write_file(&out_dir, "config.toml", &text, &mut out)?;
    }

    let record = ResultRecord {
        version: qwalk_povm::VERSION.to_string(),
        config_hash: config_hash(config)?,
        config: config.clone(),
        command,
        seed: config.seed,
        theory: out.theory.map(|d| d.as_map().clone()),
        sampled: out.sampled.map(|d| d.as_map().clone()),
        counts: out.counts,
        distance: out.distance,
        derived: out.derived,
        files: out.files,
    };
    let path = out_dir.join("result.json");
    let mut text = serde_json::to_string_pretty(&record)?;
    text.push('\n');
    fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(record)
}

/// Engine distribution listed over every site the measurement can report.
fn theory_table(spec: &WalkSpec, povm: &[PovmElement]) -> PositionDistribution {
    let engine = position_distribution(&evolve(spec));
    let mut sites = engine.support();
    sites.extend(
        povm.iter()
            .filter(|e| e.operator.max_abs() > 0.0)
            .map(|e| e.position),
    );
    sites.into_iter().map(|x| (x, engine.get(x))).collect()
}

fn povm_of(spec: &WalkSpec) -> Vec<PovmElement> {
    povm_from_kraus(&kraus_from_walk(
        spec.schedule(),
        spec.steps(),
        spec.initial_position(),
    ))
}

/// Largest gap between the engine and `⟨ψ|E_x|ψ⟩`.
fn povm_residual(spec: &WalkSpec, povm: &[PovmElement], theory: &PositionDistribution) -> f64 {
    let psi = spec.initial_coin();
    povm.iter()
        .map(|e| (e.probability(&psi) - theory.get(e.position)).abs())
        .fold(0.0, f64::max)
}

fn write_file(out_dir: &Path, name: &str, contents: &str, out: &mut Output) -> Result<()> {
    let path = out_dir.join(name);
    fs::write(&path, contents).with_context(|| format!("cannot write {}", path.display()))?;
    out.files.push(name.to_string());
    Ok(())
}

fn simulate(
    config: &ExperimentConfig,
    command: CommandKind,
    out_dir: &Path,
    out: &mut Output,
) -> Result<()> {
    let protocol = config.protocol()?;
    match (command, protocol.kind) {
        (CommandKind::Usd, ProtocolKind::Usd)
        | (CommandKind::Sic, ProtocolKind::Sic)
        | (CommandKind::Simulate, _) => {}
        _ => bail!("command `{command}` does not match the configured protocol"),
    }
    let spec = protocol.walk_spec()?;
    let povm = povm_of(&spec);
    let theory = theory_table(&spec, &povm);
    out.derive("povm_residual", povm_residual(&spec, &povm, &theory))?;

    match protocol.kind {
        ProtocolKind::Usd => {
            let usd_spec = protocol.usd_spec()?;
            let expected = usd_expected(&usd_spec);
            out.derive("eta_err", theory.get(usd::INCONCLUSIVE_SITE))?;
            out.derive("eta_err_expected", expected.inconclusive)?;
            out.derive("idp_bound", usd::inconclusive_bound(usd_spec.phi_deg()))?;
            out.derive("conclusive_plus", theory.get(usd::PLUS_SITE))?;
            out.derive("conclusive_minus", theory.get(usd::MINUS_SITE))?;
        }
        ProtocolKind::Sic => {
            let sic = SicSpec::new(protocol.sic_index()?)?;
            out.derive("forbidden_site", sic.forbidden_site())?;
            out.derive("forbidden_probability", theory.get(sic.forbidden_site()))?;
            let residuals: Vec<f64> = ELEMENT_SITES
                .iter()
                .zip(sic_vectors())
                .map(|(x, xi)| {
                    povm.iter()
                        .find(|e| e.position == *x)
                        .map_or(Ok(f64::INFINITY), |e| {
                            match_rank1(e, &xi, 0.5).map(|m| m.residual)
                        })
                })
                .collect::<qwalk_povm::Result<_>>()?;
            out.derive("sic_element_residuals", residuals)?;
        }
        ProtocolKind::Custom => {}
    }

    if let Some(noise) = &config.noise {
        let budget = run_budget(&spec, noise, config.seed)?;
        let first = &budget.trials[0];
        let total: u64 = first.counts.values().sum();
        out.sampled = Some(
            first
                .counts
                .iter()
                .map(|(x, n)| (*x, *n as f64 / total as f64))
                .collect(),
        );
        out.distance = Some(first.distance);
        out.counts = Some(first.counts.clone());
    }
    let table = output::distribution_csv(&theory, out.counts.as_ref())?;
    write_file(out_dir, "distribution.csv", &table, out)?;
    out.theory = Some(theory);
    Ok(())
}

fn run_budget(spec: &WalkSpec, noise: &NoiseConfig, seed: u64) -> Result<ErrorBudget> {
    Ok(error_budget(spec, &noise.params(seed), noise.trials)?)
}

fn extract(config: &ExperimentConfig, out_dir: &Path, out: &mut Output) -> Result<()> {
    let spec = config.protocol()?.walk_spec()?;
    let povm = povm_of(&spec);
    let theory = theory_table(&spec, &povm);
    let sum = qwalk_povm::povm::povm_sum(&povm);
    out.derive(
        "completeness_defect",
        sum.max_abs_diff(&qwalk_povm::Mat2::identity()),
    )?;
    out.derive("povm_residual", povm_residual(&spec, &povm, &theory))?;
    write_file(out_dir, "povm.csv", &output::povm_csv(&povm)?, out)?;
    write_file(
        out_dir,
        "distribution.csv",
        &output::distribution_csv(&theory, None)?,
        out,
    )?;
    out.theory = Some(theory);
    Ok(())
}

fn compile(config: &ExperimentConfig, out_dir: &Path, out: &mut Output) -> Result<()> {
    let spec = config.protocol()?.walk_spec()?;
    let plan = plan_placement(&spec)?;
    out.derive("plan_max_deviation", plan.max_deviation(spec.schedule()))?;
    out.derive("plate_count", plan.records().len())?;
    write_file(out_dir, "plan.csv", &plan.to_csv(), out)?;
    let povm = povm_of(&spec);
    let theory = theory_table(&spec, &povm);
    write_file(
        out_dir,
        "distribution.csv",
        &output::distribution_csv(&theory, None)?,
        out,
    )?;
    out.theory = Some(theory);
    Ok(())
}

fn noise(config: &ExperimentConfig, out_dir: &Path, out: &mut Output) -> Result<()> {
    let spec = config.protocol()?.walk_spec()?;
    let noise = config.noise.clone().unwrap_or_default();
    let budget = run_budget(&spec, &noise, config.seed)?;
    let povm = povm_of(&spec);
    let theory = theory_table(&spec, &povm);

    let mut pooled: BTreeMap<Position, u64> = theory.iter().map(|(x, _)| (x, 0)).collect();
    for t in &budget.trials {
        for (x, n) in &t.counts {
            *pooled.entry(*x).or_default() += n;
        }
    }
    let total: u64 = pooled.values().sum();
    let sampled: PositionDistribution = pooled
        .iter()
        .map(|(x, n)| (*x, *n as f64 / total as f64))
        .collect();
    out.distance = Some(qwalk_povm::l1_distance(&sampled, &theory));
    out.derive("median_distance", budget.median_distance)?;
    out.derive("p90_distance", budget.p90_distance)?;
    out.derive("mean_distance", budget.mean_distance)?;
    out.derive("mean_fidelity", budget.mean_fidelity)?;
    out.derive("trials", budget.trials.len())?;

    write_file(out_dir, "trials.csv", &output::trials_csv(&budget)?, out)?;
    write_file(
        out_dir,
        "distribution.csv",
        &output::distribution_csv(&theory, Some(&pooled))?,
        out,
    )?;
    out.sampled = Some(sampled);
    out.counts = Some(pooled);
    out.theory = Some(theory);
    Ok(())
}

fn tomography(config: &ExperimentConfig, out_dir: &Path, out: &mut Output) -> Result<()> {
    let rows: Vec<[f64; 4]> = config
        .tomography
        .as_ref()
        .and_then(|t| t.rows.clone())
        .unwrap_or_else(|| SIC_DISTRIBUTIONS.to_vec());
    if rows.len() != 4 {
        bail!(
            "tomography needs exactly four rows (inputs 1..=4), got {}",
            rows.len()
        );
    }
    let outcomes: Vec<SicOutcome> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            SicOutcome::from_positions(*r).with_context(|| format!("tomography row {}", i + 1))
        })
        .collect::<Result<_>>()?;
    let outcomes: [SicOutcome; 4] = outcomes.try_into().expect("length checked");
    let fidelities = fidelity_report(&outcomes);
    let matrices: Vec<_> = outcomes.iter().map(reconstruct).collect();
    let min_eigenvalues: Vec<f64> = matrices.iter().map(|m| m.eigenvalues()[0]).collect();
    let projected_fidelities: Vec<f64> = matrices
        .iter()
        .zip(qwalk_povm::protocols::sic::sic_inputs())
        .map(|(m, psi)| qwalk_povm::state_fidelity(project_psd(m).matrix(), &psi))
        .collect::<qwalk_povm::Result<_>>()?;
    out.derive("fidelities", fidelities)?;
    out.derive("projected_fidelities", projected_fidelities)?;
    out.derive("min_eigenvalues", min_eigenvalues)?;
    write_file(
        out_dir,
        "tomography.csv",
        &output::tomography_csv(&matrices, &fidelities)?,
        out,
    )?;
    Ok(())
}

fn sweep(config: &ExperimentConfig, out_dir: &Path, out: &mut Output) -> Result<()> {
    let range = config
        .sweep
        .as_ref()
        .context("sweep needs a range: pass --start/--stop or a [sweep] section")?;
    let angles = range.angles()?;
    let base = match &config.protocol {
        Some(p) if p.kind == ProtocolKind::Usd => p.clone(),
        Some(_) => bail!("sweep runs the discrimination protocol; protocol kind must be usd"),
        None => ProtocolConfig::usd(angles[0], UsdInputKind::Plus, None, None),
    };
    let noise = config.noise.clone().unwrap_or(NoiseConfig {
        visibility: 1.0,
        angle_jitter_deg: 0.0,
        ..NoiseConfig::default()
    });

    let mut rows = Vec::with_capacity(angles.len());
    for (k, phi) in angles.iter().enumerate() {
        let protocol = ProtocolConfig {
            phi: Some(*phi),
            ..base.clone()
        };
        let usd_spec = protocol.usd_spec()?;
        let theory = usd_expected(&usd_spec).inconclusive;
        let seed = config.seed.wrapping_add(k as u64);
        let budget = run_budget(&usd_spec.walk_spec()?, &noise, seed)?;
        let (hits, total) = budget.trials.iter().fold((0u64, 0u64), |(h, t), trial| {
            (
                h + trial
                    .counts
                    .get(&usd::INCONCLUSIVE_SITE)
                    .copied()
                    .unwrap_or(0),
                t + trial.counts.values().sum::<u64>(),
            )
        });
        rows.push((*phi, theory, hits as f64 / total as f64));
    }
    out.derive("points", rows.len())?;
    write_file(out_dir, "sweep.csv", &output::sweep_csv(&rows)?, out)?;
    Ok(())
}
