//! Seeded experiment runner.
//!
//! An experiment is a config plus `trials` independent trials; trial `i` uses
//! seed `config.seed ^ i`. Output is JSON Lines: one `config` line, one `trial`
//! line per trial in index order, and a closing `summary` line. Trials run in
//! parallel but are flushed in index order, so the bytes depend only on the
//! config.

use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bayesian::{
    brute_force_pure_bne, brute_force_pure_bne_with, build_coloring_hardness_game, bne_regret,
    coin_flip_deltas, is_eps_bne, planted_bne_game, qp_pure_bne_uniform, three_coloring,
    PureBayesProfile, RegretBound, EPS_GADGET,
};
use crate::error::{Error, Result};
use crate::game::{tv_distance, unit, MixedProfile};
use crate::graph::{random_four_regular, sample_planted_clique, PlantedGraph};
use crate::recovery::{soundness_pipeline, ExtractionParams};
use crate::reductions::{
    build_hk_game, build_second_equilibrium_game, build_small_support_game, params_eps_hardness,
    params_small_support, params_value_hardness, ReductionArtifact, ReductionParams,
};
use crate::rng::{seeded, Stream};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "CLIQUENASH_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    CompletenessEps,
    SoundnessEps,
    CompletenessValue,
    SoundnessValue,
    SecondEquilibrium,
    SmallSupport,
    BneGadget,
    BneUniform,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        ExperimentKind::CompletenessEps,
        ExperimentKind::SoundnessEps,
        ExperimentKind::CompletenessValue,
        ExperimentKind::SoundnessValue,
        ExperimentKind::SecondEquilibrium,
        ExperimentKind::SmallSupport,
        ExperimentKind::BneGadget,
        ExperimentKind::BneUniform,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::CompletenessEps => "completeness-eps",
            ExperimentKind::SoundnessEps => "soundness-eps",
            ExperimentKind::CompletenessValue => "completeness-value",
            ExperimentKind::SoundnessValue => "soundness-value",
            ExperimentKind::SecondEquilibrium => "second-equilibrium",
            ExperimentKind::SmallSupport => "small-support",
            ExperimentKind::BneGadget => "bne-gadget",
            ExperimentKind::BneUniform => "bne-uniform",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown experiment {s:?}")))
    }
}

fn default_n_big() -> usize {
    4000
}
fn default_n1() -> usize {
    200
}
fn default_n2() -> usize {
    4
}
fn default_eta() -> f64 {
    0.07
}
fn default_lambda() -> f64 {
    0.8
}
fn default_c2() -> f64 {
    2.0
}
fn default_guess_budget() -> usize {
    10_000
}
fn default_bne_budget() -> u64 {
    6u64.pow(12)
}
fn default_audit_profiles() -> usize {
    100
}
fn default_trials() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    /// Vertices (graph experiments) or actions per player (`bne-uniform`).
    pub n: usize,
    /// Planted clique size, or types per player for `bne-uniform`. Zero runs
    /// the soundness experiments on plain `G(n, ½)`.
    pub k: usize,
    #[serde(default = "default_n_big")]
    pub n_big: usize,
    #[serde(default = "default_n1")]
    pub n1: usize,
    #[serde(default = "default_n2")]
    pub n2: usize,
    #[serde(default = "default_eta")]
    pub eta: f64,
    /// Regret tolerance for success; each experiment has its own default.
    #[serde(default)]
    pub eps: Option<f64>,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    /// Probability mass each player moves from the vertex block to the
    /// auxiliary block in soundness experiments.
    #[serde(default)]
    pub leak: f64,
    #[serde(default = "default_c2")]
    pub c2: f64,
    /// Extraction slacks; default to the reduction's own `s` and `t`.
    #[serde(default)]
    pub extract_s: Option<f64>,
    #[serde(default)]
    pub extract_t: Option<f64>,
    /// Size of the random vertex set played when `k = 0`; defaults to `⌊2 log₂ n⌋ + 10`.
    #[serde(default)]
    pub probe_size: Option<usize>,
    /// Support of the clique profile in `small-support`; defaults to `k`.
    #[serde(default)]
    pub support_bound: Option<usize>,
    #[serde(default = "default_guess_budget")]
    pub guess_budget: usize,
    #[serde(default = "default_bne_budget")]
    pub bne_budget: u64,
    #[serde(default = "default_audit_profiles")]
    pub audit_profiles: usize,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    /// Record wall-clock time per trial; off by default so output is reproducible.
    #[serde(default)]
    pub timings: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind, n: usize, k: usize) -> Self {
        Self {
            experiment,
            n,
            k,
            n_big: default_n_big(),
            n1: default_n1(),
            n2: default_n2(),
            eta: default_eta(),
            eps: None,
            lambda: default_lambda(),
            leak: 0.0,
            c2: default_c2(),
            extract_s: None,
            extract_t: None,
            probe_size: None,
            support_bound: None,
            guess_budget: default_guess_budget(),
            bne_budget: default_bne_budget(),
            audit_profiles: default_audit_profiles(),
            trials: default_trials(),
            seed: 0,
            timings: false,
            out: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.k > self.n && !matches!(self.experiment, ExperimentKind::BneUniform) {
            return bad(format!("k = {} exceeds n = {}", self.k, self.n));
        }
        if !(0.0..1.0).contains(&self.leak) {
            return bad(format!("leak = {} must lie in [0, 1)", self.leak));
        }
        if self.eps.is_some_and(|e| e < 0.0) {
            return bad("eps must be non-negative".into());
        }
        if self.c2 <= 0.0 {
            return bad("c2 must be positive".into());
        }
        match self.experiment {
            ExperimentKind::BneGadget if self.n < 5 => bad("bne-gadget needs n >= 5".into()),
            ExperimentKind::BneUniform if self.n == 0 || self.k == 0 => {
                bad("bne-uniform needs n, k >= 1".into())
            }
            ExperimentKind::CompletenessEps
            | ExperimentKind::CompletenessValue
            | ExperimentKind::SecondEquilibrium
            | ExperimentKind::SmallSupport
                if self.k == 0 =>
            {
                bad("completeness experiments need a planted clique (k >= 1)".into())
            }
            _ => self.reduction_params().map(|_| ()),
        }
    }

    fn probe_size(&self) -> usize {
        self.probe_size
            .unwrap_or_else(|| 2 * (self.n.max(2) as f64).log2().floor() as usize + 10)
            .min(self.n)
    }

    fn reduction_params(&self) -> Result<ReductionParams> {
        Ok(match self.experiment {
            ExperimentKind::CompletenessEps | ExperimentKind::SoundnessEps => {
                params_eps_hardness(self.eta)?.with_n_big(self.n_big)
            }
            ExperimentKind::CompletenessValue
            | ExperimentKind::SoundnessValue
            | ExperimentKind::SecondEquilibrium => params_value_hardness(self.eta)?.with_n_big(self.n_big),
            ExperimentKind::SmallSupport => params_small_support(self.eta)?.with_blocks(self.n1, self.n2),
            ExperimentKind::BneGadget | ExperimentKind::BneUniform => ReductionParams::new(0.5, 0.5, 0.5)?,
        }
        .with_c2(self.c2))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub experiment: ExperimentKind,
    pub trial: usize,
    pub seed: u64,
    pub success: bool,
    pub regret_row: Option<f64>,
    pub regret_col: Option<f64>,
    pub value: Option<f64>,
    pub mass_row: Option<f64>,
    pub mass_col: Option<f64>,
    /// `"ok"` or the extraction error.
    pub extraction: Option<String>,
    pub recovered_match: Option<bool>,
    /// Why a null field is null or why the trial failed.
    pub failure: Option<String>,
    pub details: Value,
    pub wall_time: Option<f64>,
    pub config: ExperimentConfig,
}

impl TrialRecord {
    fn new(config: &ExperimentConfig, trial: usize, seed: u64) -> Self {
        Self {
            experiment: config.experiment,
            trial,
            seed,
            success: false,
            regret_row: None,
            regret_col: None,
            value: None,
            mass_row: None,
            mass_col: None,
            extraction: None,
            recovered_match: None,
            failure: None,
            details: Value::Null,
            wall_time: None,
            config: config.clone(),
        }
    }

    fn set_regret(&mut self, artifact: &ReductionArtifact, profile: &MixedProfile) -> Result<()> {
        let cert = artifact.game.regret(profile)?;
        let vertices = artifact.layout.vertex_block.clone();
        self.regret_row = Some(cert.regret_row);
        self.regret_col = Some(cert.regret_col);
        self.value = Some(cert.value);
        self.mass_row = Some(crate::game::mass(&profile.x, vertices.clone()));
        self.mass_col = Some(crate::game::mass(&profile.y, vertices));
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub experiment: ExperimentKind,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub mean_regret_row: Option<f64>,
    pub mean_regret_col: Option<f64>,
    pub mean_value: Option<f64>,
}

impl Summary {
    pub fn from_records(experiment: ExperimentKind, records: &[TrialRecord]) -> Self {
        let mean = |f: fn(&TrialRecord) -> Option<f64>| {
            let vals: Vec<f64> = records.iter().filter_map(f).collect();
            (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
        };
        let successes = records.iter().filter(|r| r.success).count();
        Self {
            experiment,
            trials: records.len(),
            successes,
            success_rate: successes as f64 / records.len().max(1) as f64,
            mean_regret_row: mean(|r| r.regret_row),
            mean_regret_col: mean(|r| r.regret_col),
            mean_value: mean(|r| r.value),
        }
    }
}

/// One line of experiment output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "kebab-case")]
pub enum OutputLine {
    Config(ExperimentConfig),
    Trial(Box<TrialRecord>),
    Summary(Summary),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::InvalidParameter(format!("unknown format {other:?}"))),
        }
    }
}

pub const CSV_HEADER: &str =
    "experiment,trial,seed,success,regret_row,regret_col,value,mass_row,mass_col,extraction,recovered_match,failure";

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn csv_row(r: &TrialRecord) -> String {
    let num = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    [
        r.experiment.name().to_string(),
        r.trial.to_string(),
        r.seed.to_string(),
        r.success.to_string(),
        num(r.regret_row),
        num(r.regret_col),
        num(r.value),
        num(r.mass_row),
        num(r.mass_col),
        csv_field(r.extraction.as_deref().unwrap_or("")),
        r.recovered_match.map(|b| b.to_string()).unwrap_or_default(),
        csv_field(r.failure.as_deref().unwrap_or("")),
    ]
    .join(",")
}

pub fn trial_seed(master: u64, trial: usize) -> u64 {
    master ^ trial as u64
}

/// Runs every trial, writing output lines to `sink` as trials complete in
/// index order. CSV output carries only the trial rows.
pub fn run_experiment(
    config: &ExperimentConfig,
    format: Format,
    sink: &mut dyn Write,
) -> Result<(Vec<TrialRecord>, Summary)> {
    config.validate()?;
    let write_json = |sink: &mut dyn Write, line: &OutputLine| -> Result<()> {
        serde_json::to_writer(&mut *sink, line)?;
        sink.write_all(b"\n")?;
        Ok(())
    };
    match format {
        Format::Json => write_json(sink, &OutputLine::Config(config.clone()))?,
        Format::Csv => writeln!(sink, "{CSV_HEADER}")?,
    }
    let chunk = rayon::current_num_threads().max(1);
    let mut records = Vec::with_capacity(config.trials);
    for start in (0..config.trials).step_by(chunk) {
        let end = (start + chunk).min(config.trials);
        let batch: Vec<TrialRecord> = (start..end)
            .into_par_iter()
            .map(|i| run_trial(config, i))
            .collect::<Result<_>>()?;
        for r in batch {
            match format {
                Format::Json => write_json(sink, &OutputLine::Trial(Box::new(r.clone())))?,
                Format::Csv => writeln!(sink, "{}", csv_row(&r))?,
            }
            records.push(r);
        }
        sink.flush()?;
    }
    let summary = Summary::from_records(config.experiment, &records);
    if format == Format::Json {
        write_json(sink, &OutputLine::Summary(summary.clone()))?;
    }
    sink.flush()?;
    Ok((records, summary))
}

/// Reruns the trial described by `record` and returns the fresh record.
pub fn replay(record: &TrialRecord) -> Result<TrialRecord> {
    let fresh = run_trial(&record.config, record.trial)?;
    if fresh.seed != record.seed {
        return Err(Error::Format(format!(
            "record seed {} does not match config seed for trial {}",
            record.seed, record.trial
        )));
    }
    Ok(fresh)
}

/// Equality ignoring `wall_time`.
pub fn same_outcome(a: &TrialRecord, b: &TrialRecord) -> bool {
    let strip = |r: &TrialRecord| TrialRecord { wall_time: None, ..r.clone() };
    strip(a) == strip(b)
}

pub fn run_trial(config: &ExperimentConfig, trial: usize) -> Result<TrialRecord> {
    let seed = trial_seed(config.seed, trial);
    let start = Instant::now();
    let mut rec = TrialRecord::new(config, trial, seed);
    match config.experiment {
        ExperimentKind::CompletenessEps | ExperimentKind::CompletenessValue => completeness(config, seed, &mut rec)?,
        ExperimentKind::SoundnessEps | ExperimentKind::SoundnessValue => soundness(config, seed, &mut rec)?,
        ExperimentKind::SecondEquilibrium => second_equilibrium(config, seed, &mut rec)?,
        ExperimentKind::SmallSupport => small_support(config, seed, &mut rec)?,
        ExperimentKind::BneGadget => bne_gadget(config, seed, &mut rec)?,
        ExperimentKind::BneUniform => bne_uniform(config, seed, &mut rec)?,
    }
    if config.timings {
        rec.wall_time = Some(start.elapsed().as_secs_f64());
    }
    Ok(rec)
}

/// Game and profile that a trial of a bimatrix experiment evaluates.
#[derive(Debug, Clone)]
pub struct TrialInstance {
    pub artifact: ReductionArtifact,
    pub profile: MixedProfile,
}

/// Rebuilds the game and profile of a bimatrix trial.
pub fn trial_instance(config: &ExperimentConfig, trial: usize) -> Result<TrialInstance> {
    config.validate()?;
    let seed = trial_seed(config.seed, trial);
    let graph = sample_planted_clique(config.n, config.k, seed)?;
    let params = config.reduction_params()?;
    let artifact = match config.experiment {
        ExperimentKind::SmallSupport => build_small_support_game(&graph, &params, seed)?,
        ExperimentKind::SecondEquilibrium => {
            build_second_equilibrium_game(&build_hk_game(&graph, &params, seed)?, config.lambda)?
        }
        ExperimentKind::BneGadget | ExperimentKind::BneUniform => {
            return Err(Error::InvalidParameter("Bayesian experiments have no bimatrix instance".into()))
        }
        _ => build_hk_game(&graph, &params, seed)?,
    };
    let played = match config.experiment {
        ExperimentKind::SmallSupport => {
            let planted = graph.planted().unwrap_or_default();
            planted[..config.support_bound.unwrap_or(config.k).min(planted.len())].to_vec()
        }
        _ => played_set(config, &graph, seed),
    };
    let leak = match config.experiment {
        ExperimentKind::SoundnessEps | ExperimentKind::SoundnessValue => config.leak,
        _ => 0.0,
    };
    let profile = leaked_profile(&artifact, &played, leak)?;
    Ok(TrialInstance { artifact, profile })
}

/// The planted clique, or a random probe set on plain `G(n, ½)`.
fn played_set(config: &ExperimentConfig, graph: &PlantedGraph, seed: u64) -> Vec<usize> {
    match graph.planted() {
        Some(p) if !p.is_empty() => p.to_vec(),
        _ => {
            let mut rng = seeded(seed, Stream::Profile);
            let mut set = index::sample(&mut rng, config.n, config.probe_size()).into_vec();
            set.sort_unstable();
            set
        }
    }
}

/// Uniform on `set` with mass `leak` moved uniformly onto the auxiliary block.
fn leaked_profile(artifact: &ReductionArtifact, set: &[usize], leak: f64) -> Result<MixedProfile> {
    let dim = artifact.layout.dim;
    let aux: Vec<usize> = artifact.layout.auxiliary().collect();
    let mut x = vec![0.0; dim];
    set.iter().for_each(|&v| x[v] += (1.0 - leak) / set.len() as f64);
    if leak > 0.0 {
        if aux.is_empty() {
            return Err(Error::InvalidParameter("no auxiliary block to leak into".into()));
        }
        aux.iter().for_each(|&v| x[v] += leak / aux.len() as f64);
    }
    MixedProfile::new(x.clone(), x)
}

fn default_eps(config: &ExperimentConfig, fallback: f64) -> f64 {
    config.eps.unwrap_or(fallback)
}

fn completeness(config: &ExperimentConfig, _seed: u64, rec: &mut TrialRecord) -> Result<()> {
    let inst = trial_instance(config, rec.trial)?;
    rec.set_regret(&inst.artifact, &inst.profile)?;
    let eps = default_eps(config, 0.01);
    let regret = rec.regret_row.unwrap_or(0.0).max(rec.regret_col.unwrap_or(0.0));
    let alpha = inst.artifact.params.alpha;
    let value_ok = rec.value.is_some_and(|v| v >= alpha - 1e-9);
    rec.success = regret <= eps + crate::game::TOL && value_ok;
    if !rec.success {
        rec.failure = Some(format!("clique profile has regret {regret:.6} > {eps}"));
    }
    rec.details = json!({ "eps": eps, "alpha": alpha, "max_regret": regret });
    Ok(())
}

fn soundness(config: &ExperimentConfig, _seed: u64, rec: &mut TrialRecord) -> Result<()> {
    let inst = trial_instance(config, rec.trial)?;
    rec.set_regret(&inst.artifact, &inst.profile)?;
    let params = &inst.artifact.params;
    let s = config.extract_s.or(params.s).unwrap_or(0.0);
    let t = config.extract_t.or(params.t).unwrap_or(0.0);
    let extraction = ExtractionParams::with_c2(s, t, config.c2, config.n)?;
    let graph = &inst.artifact.source;
    let planted = graph.planted().filter(|p| !p.is_empty());
    let k = planted.map_or_else(|| config.probe_size(), <[usize]>::len);
    let outcome = soundness_pipeline(graph, &inst.artifact, &inst.profile, &extraction, k);
    let null = planted.is_none();
    match outcome {
        Ok(rcv) => {
            rec.extraction = Some("ok".into());
            let matched = planted.is_some_and(|p| p == rcv.clique.as_slice());
            rec.recovered_match = Some(matched);
            rec.success = if null { false } else { matched };
            if !rec.success {
                rec.failure = Some(if null {
                    format!("recovered a {}-clique from plain G(n, 1/2)", rcv.clique.len())
                } else {
                    "recovered clique differs from the planted one".into()
                });
            }
            rec.details = json!({
                "null": null,
                "target_size": extraction.target_size,
                "s": s, "t": t,
                "report": rcv.report,
                "recovered": rcv.clique,
            });
        }
        Err(e) => {
            let stage = match &e {
                Error::ReconstructionFailed(_) => "reconstruction",
                _ => "extraction",
            };
            rec.extraction = Some(if stage == "extraction" { e.to_string() } else { "ok".into() });
            rec.recovered_match = Some(false);
            rec.success = null;
            rec.failure = Some(format!("{stage}: {e}"));
            rec.details = json!({
                "null": null,
                "target_size": extraction.target_size,
                "s": s, "t": t,
            });
        }
    }
    Ok(())
}

fn second_equilibrium(config: &ExperimentConfig, _seed: u64, rec: &mut TrialRecord) -> Result<()> {
    let inst = trial_instance(config, rec.trial)?;
    let art = &inst.artifact;
    let extra = art.layout.extra_strategy.expect("second-equilibrium layout");
    let dim = art.layout.dim;
    let pure = MixedProfile::new(unit(dim, extra)?, unit(dim, extra)?)?;
    let pure_cert = art.game.regret(&pure)?;
    rec.set_regret(art, &inst.profile)?;
    let tv_row = tv_distance(&inst.profile.x, &pure.x)?;
    let tv_col = tv_distance(&inst.profile.y, &pure.y)?;
    let eps = default_eps(config, 0.01);
    let regret = rec.regret_row.unwrap_or(0.0).max(rec.regret_col.unwrap_or(0.0));
    let pure_ok = pure_cert.regret_row == 0.0 && pure_cert.regret_col == 0.0;
    rec.success = pure_ok && tv_row == 1.0 && tv_col == 1.0 && regret <= eps + crate::game::TOL;
    if !rec.success {
        rec.failure = Some(format!(
            "pure regret ({}, {}), tv ({tv_row}, {tv_col}), clique regret {regret:.6}",
            pure_cert.regret_row, pure_cert.regret_col
        ));
    }
    rec.details = json!({
        "lambda": config.lambda,
        "pure_regret_row": pure_cert.regret_row,
        "pure_regret_col": pure_cert.regret_col,
        "pure_value": pure_cert.value,
        "tv_row": tv_row,
        "tv_col": tv_col,
        "eps": eps,
    });
    Ok(())
}

fn small_support(config: &ExperimentConfig, _seed: u64, rec: &mut TrialRecord) -> Result<()> {
    let inst = trial_instance(config, rec.trial)?;
    let art = &inst.artifact;
    let (mr, mc) = (art.game.m_row(), art.game.m_col());
    let aux = art.layout.auxiliary();
    let complement = aux
        .clone()
        .all(|i| aux.clone().all(|j| mr[[i, j]] + mc[[i, j]] == 1.0));
    let n = config.n;
    let first = &art.layout.copy_blocks[0];
    let copies = art.layout.copy_blocks.iter().all(|b| {
        b.clone().zip(first.clone()).all(|(i, i0)| {
            (0..n).all(|v| mr[[i, v]] == mr[[i0, v]] && mc[[v, i]] == mc[[v, i0]])
        })
    });
    rec.set_regret(art, &inst.profile)?;
    let eps = default_eps(config, art.params.eps.unwrap_or(0.0));
    let regret = rec.regret_row.unwrap_or(0.0).max(rec.regret_col.unwrap_or(0.0));
    rec.success = complement && copies && regret <= eps + crate::game::TOL;
    if !rec.success {
        rec.failure = Some(format!(
            "complement {complement}, copies {copies}, regret {regret:.6} vs {eps}"
        ));
    }
    rec.details = json!({
        "alpha": art.params.alpha,
        "beta": art.params.beta,
        "complement_identity": complement,
        "copy_identity": copies,
        "support": inst.profile.support_x().len(),
        "eps": eps,
    });
    Ok(())
}

fn bne_gadget(config: &ExperimentConfig, seed: u64, rec: &mut TrialRecord) -> Result<()> {
    use rand::Rng;
    let graph = random_four_regular(config.n, seed)?;
    let game = build_coloring_hardness_game(&graph)?;
    let mut rng = seeded(seed, Stream::Profile);
    let mut worst_sum: f64 = 0.0;
    let mut quantized = true;
    for _ in 0..config.audit_profiles {
        let p = PureBayesProfile {
            s_row: (0..config.n).map(|_| rng.random_range(0..6)).collect(),
            s_col: (0..config.n).map(|_| rng.random_range(0..6)).collect(),
        };
        let (dr, dc) = coin_flip_deltas(&game, &p)?;
        worst_sum = worst_sum.max(dr.iter().chain(&dc).sum::<f64>().abs());
        quantized &= dr.iter().chain(&dc).all(|d| {
            let q = d / EPS_GADGET;
            (q - q.round()).abs() * EPS_GADGET < 1e-9
        });
    }
    let colorable = three_coloring(&graph).is_some();
    let audit_ok = worst_sum < 1e-9 && quantized;
    let mut details = json!({
        "three_colorable": colorable,
        "audit_profiles": config.audit_profiles,
        "max_cancellation_error": worst_sum,
        "quantized": quantized,
    });
    rec.success = audit_ok;
    let budget = u128::from(config.bne_budget);
    match brute_force_pure_bne(&game, 0.0, budget) {
        Ok(exact) => {
            let strict = brute_force_pure_bne_with(&game, RegretBound::Below(EPS_GADGET), budget)?;
            let payoff_one = exact.as_ref().map(|p| {
                let cert = bne_regret(&game, p).expect("valid profile");
                cert.p_row.iter().chain(&cert.p_col).all(|&v| (v - 1.0).abs() < 1e-9)
            });
            let consistent = if colorable {
                payoff_one == Some(true)
            } else {
                exact.is_none() && strict.is_none()
            };
            rec.success &= consistent;
            details["exact_bne"] = json!(exact);
            details["strict_bne_below_eps"] = json!(strict);
            details["exact_bne_pays_one"] = json!(payoff_one);
        }
        Err(Error::BudgetExceeded { required, cap }) => {
            details["exhaustive_scan"] = json!(format!("skipped: {required} profiles exceed budget {cap}"));
        }
        Err(e) => return Err(e),
    }
    if !rec.success {
        rec.failure = Some(format!("gadget check failed: {details}"));
    }
    rec.details = details;
    Ok(())
}

fn bne_uniform(config: &ExperimentConfig, seed: u64, rec: &mut TrialRecord) -> Result<()> {
    let (game, planted) = planted_bne_game(config.k, config.n, 0.2, seed)?;
    let eps = default_eps(config, 0.25);
    match qp_pure_bne_uniform(&game, eps, seed, config.guess_budget) {
        Ok((profile, trace)) => {
            let cert = bne_regret(&game, &profile)?;
            let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
            rec.regret_row = Some(max(&cert.regret_row));
            rec.regret_col = Some(max(&cert.regret_col));
            rec.success = is_eps_bne(&game, &profile, eps)?;
            rec.details = json!({
                "eps": eps,
                "path": trace.path,
                "m": trace.m,
                "guesses_tried": trace.guesses_tried,
                "profile": profile,
                "planted": planted,
                "found_planted": profile == planted,
            });
        }
        Err(e @ (Error::BneSearchFailed(_) | Error::BudgetExceeded { .. })) => {
            rec.failure = Some(e.to_string());
            rec.details = json!({ "eps": eps, "planted": planted });
        }
        Err(e) => return Err(e),
    }
    if rec.regret_row.is_none() && rec.failure.is_none() {
        rec.failure = Some("no profile".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(kind: ExperimentKind) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(kind, 40, 14);
        c.n_big = 60;
        c.n1 = 20;
        c.n2 = 2;
        c.trials = 3;
        c.seed = 11;
        c
    }

    fn output(config: &ExperimentConfig, format: Format) -> Vec<u8> {
        let mut buf = Vec::new();
        run_experiment(config, format, &mut buf).unwrap();
        buf
    }

    #[test]
    fn identical_configs_give_identical_bytes() {
        for kind in ExperimentKind::ALL {
            let mut c = small(kind);
            if kind == ExperimentKind::BneGadget {
                c.n = 6;
                c.k = 0;
                c.audit_profiles = 10;
            }
            if kind == ExperimentKind::BneUniform {
                c.n = 3;
                c.k = 3;
            }
            let a = output(&c, Format::Json);
            assert_eq!(a, output(&c, Format::Json), "{}", kind.name());
            let lines: Vec<OutputLine> = a
                .split(|&b| b == b'\n')
                .filter(|l| !l.is_empty())
                .map(|l| serde_json::from_slice(l).unwrap())
                .collect();
            assert_eq!(lines.len(), 5);
            assert!(matches!(lines[0], OutputLine::Config(_)));
            assert!(matches!(lines[4], OutputLine::Summary(_)));
        }
    }

    #[test]
    fn records_replay_exactly() {
        let c = small(ExperimentKind::SoundnessEps);
        let (records, _) = run_experiment(&c, Format::Json, &mut Vec::new()).unwrap();
        for r in &records {
            let json = serde_json::to_string(r).unwrap();
            let back: TrialRecord = serde_json::from_str(&json).unwrap();
            assert!(same_outcome(&replay(&back).unwrap(), r));
        }
    }

    #[test]
    fn single_trial_matches_first_trial_of_longer_run() {
        let mut c = small(ExperimentKind::CompletenessValue);
        let (many, _) = run_experiment(&c, Format::Json, &mut Vec::new()).unwrap();
        c.trials = 1;
        let (one, _) = run_experiment(&c, Format::Json, &mut Vec::new()).unwrap();
        let strip = |r: &TrialRecord| TrialRecord { config: c.clone(), ..r.clone() };
        assert_eq!(strip(&one[0]), strip(&many[0]));
    }

    #[test]
    fn csv_projection_has_fixed_columns() {
        let c = small(ExperimentKind::SecondEquilibrium);
        let out = String::from_utf8(output(&c, Format::Csv)).unwrap();
        let mut lines = out.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        let cols = CSV_HEADER.split(',').count();
        for l in lines {
            assert!(l.split(',').count() >= cols);
            assert!(l.starts_with("second-equilibrium,"));
        }
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut c = small(ExperimentKind::CompletenessEps);
        c.trials = 0;
        assert!(c.validate().is_err());
        let mut c = small(ExperimentKind::CompletenessEps);
        c.k = 0;
        assert!(c.validate().is_err());
        let mut c = small(ExperimentKind::SoundnessValue);
        c.eta = 1.5;
        assert!(c.validate().is_err());
        let json = r#"{"experiment":"soundness-eps","n":10,"k":3,"bogus":1}"#;
        assert!(serde_json::from_str::<ExperimentConfig>(json).is_err());
        assert!("nope".parse::<ExperimentKind>().is_err());
    }

    #[test]
    fn null_soundness_fails_to_recover() {
        let mut c = small(ExperimentKind::SoundnessEps);
        c.k = 0;
        c.probe_size = Some(14);
        let (records, summary) = run_experiment(&c, Format::Json, &mut Vec::new()).unwrap();
        assert!(records.iter().all(|r| r.recovered_match == Some(false)));
        assert_eq!(summary.successes, 3);
    }

    #[test]
    fn timings_only_when_requested() {
        let mut c = small(ExperimentKind::CompletenessEps);
        c.trials = 1;
        assert!(run_trial(&c, 0).unwrap().wall_time.is_none());
        c.timings = true;
        assert!(run_trial(&c, 0).unwrap().wall_time.is_some());
    }
}
