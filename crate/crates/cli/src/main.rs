use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::json;

use cliquenash::approx::{dmp_half_equilibrium, optimal_value_half_equilibrium, small_support_search};
use cliquenash::bayesian::{
    bne_regret, brute_force_pure_bne_with, build_coloring_hardness_game, lift_uniform_bayes,
    qp_pure_bne_uniform, BayesianGame, PureBayesProfile, RegretBound,
};
use cliquenash::graph::{random_four_regular, sample_planted_clique};
use cliquenash::harness::{
    replay, run_experiment, same_outcome, ExperimentConfig, ExperimentKind, Format, OutputLine,
    TrialRecord, OUT_DIR_ENV,
};
use cliquenash::recovery::{soundness_pipeline, ExtractionParams};
use cliquenash::reductions::{
    build_hk_game, build_second_equilibrium_game, build_small_support_game, params_eps_hardness,
    params_small_support, params_small_support_quarter, params_value_hardness, ReductionArtifact,
    ReductionParams,
};
use cliquenash::{BimatrixGame, Error, MixedProfile, PlantedGraph};

/// Failure with the process exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }

    fn verification(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BneSearchFailed(_) => 2,
            Error::PreconditionViolated { .. } | Error::ExtractionFailed(_) | Error::ReconstructionFailed(_) => 3,
            Error::BudgetExceeded { .. } => 4,
            _ => 1,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        // A closed downstream pipe is not an error for a filter-style tool.
        let code = if e.kind() == io::ErrorKind::BrokenPipe { 0 } else { 1 };
        Self { code, message: e.to_string() }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        match e.io_error_kind() {
            Some(kind) => io::Error::new(kind, e).into(),
            None => Self::usage(e.to_string()),
        }
    }
}

type CliResult<T = ()> = std::result::Result<T, Failure>;

#[derive(Parser)]
#[command(name = "cliquenash", version, about = "Approximate equilibria, hidden-clique reductions and Bayesian games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample G(n, 1/2) with a planted k-clique, or a random 4-regular graph.
    GenGraph {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        k: usize,
        /// Random connected 4-regular graph instead (ignores --k).
        #[arg(long)]
        four_regular: bool,
    },
    /// Build a reduction game or Bayesian gadget.
    BuildGame(BuildArgs),
    /// Run a solver on a game file.
    Solve(SolveArgs),
    /// Check a profile against a game and report its regret.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        profile: PathBuf,
        #[arg(long)]
        eps: f64,
    },
    /// Extract a dense subgraph from a profile of a reduction game and rebuild the clique.
    Recover {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        artifact: PathBuf,
        #[arg(long)]
        profile: PathBuf,
        /// Extraction slacks; default to the reduction's own values.
        #[arg(long)]
        s: Option<f64>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long, default_value_t = 2.0)]
        c2: f64,
        /// Required clique size; defaults to the planted size.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Run a seeded multi-trial experiment.
    Experiment(ExperimentArgs),
}

#[derive(Copy, Clone, ValueEnum)]
enum Variant {
    Hk,
    SmallSupport,
    SecondEq,
    BneGadget,
    BneLift,
}

#[derive(Copy, Clone, ValueEnum)]
enum ParamMap {
    /// Additive-ε hardness map.
    Eps,
    /// Optimal-value hardness map.
    Value,
}

#[derive(Args)]
struct BuildArgs {
    variant: Variant,
    #[command(flatten)]
    common: Common,
    /// Input graph; sampled from --n, --k and --seed when absent.
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    k: usize,
    #[arg(long, default_value_t = 0.07)]
    eta: f64,
    #[arg(long, default_value_t = 4000)]
    n_big: usize,
    #[arg(long, default_value_t = 200)]
    n1: usize,
    #[arg(long, default_value_t = 4)]
    n2: usize,
    #[arg(long, default_value_t = 0.8)]
    lambda: f64,
    #[arg(long, value_enum, default_value_t = ParamMap::Eps)]
    map: ParamMap,
    /// Use the 1/4 - η small-support parameter map.
    #[arg(long)]
    quarter: bool,
    /// Source artifact for bne-lift.
    #[arg(long)]
    artifact: Option<PathBuf>,
    /// Types per player for bne-lift.
    #[arg(long, default_value_t = 1)]
    types: usize,
    /// Also write the replayable artifact here.
    #[arg(long)]
    artifact_out: Option<PathBuf>,
}

#[derive(Copy, Clone, ValueEnum)]
enum Algorithm {
    Dmp,
    OptimalHalf,
    SmallSupportSearch,
    QpBne,
    BruteBne,
}

#[derive(Args)]
struct SolveArgs {
    algorithm: Algorithm,
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    game: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    #[arg(long, default_value_t = 0)]
    start_row: usize,
    /// Support bound for small-support-search.
    #[arg(long, default_value_t = 2)]
    support: usize,
    #[arg(long)]
    value_floor: Option<f64>,
    /// Cap on enumerated candidates.
    #[arg(long, default_value_t = 10_000_000_000)]
    budget: u128,
    #[arg(long, default_value_t = 10_000)]
    guess_budget: usize,
    /// brute-bne: require regret strictly below --eps.
    #[arg(long)]
    strict: bool,
    /// qp-bne: write the algorithm trace here.
    #[arg(long)]
    trace_out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    experiment: Option<ExperimentKind>,
    /// JSON config file; command-line flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Rerun the trial records in this file and compare.
    #[arg(long)]
    replay: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutFormat::Json)]
    format: OutFormat,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    n_big: Option<usize>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    leak: Option<f64>,
    /// Record per-trial wall time (makes output run-dependent).
    #[arg(long)]
    timings: bool,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) if f.code == 0 => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> CliResult {
    match command {
        Command::GenGraph { common, n, k, four_regular } => {
            let graph = if four_regular {
                random_four_regular(n, common.seed)?
            } else {
                sample_planted_clique(n, k, common.seed)?
            };
            write_json(common.out.as_deref(), &graph)
        }
        Command::BuildGame(args) => build_game(args),
        Command::Solve(args) => solve(args),
        Command::Verify { common, game, profile, eps } => verify(&common, &game, &profile, eps),
        Command::Recover { common, artifact, profile, s, t, c2, k } => {
            let artifact: ReductionArtifact = read_json(&artifact)?;
            let profile: MixedProfile = read_json(&profile)?;
            let graph = &artifact.source;
            let s = s.or(artifact.params.s).unwrap_or(0.0);
            let t = t.or(artifact.params.t).unwrap_or(0.0);
            let params = ExtractionParams::with_c2(s, t, c2, graph.n())?;
            let k = k
                .or_else(|| graph.planted().map(<[usize]>::len).filter(|&l| l > 0))
                .unwrap_or(params.target_size);
            let recovery = soundness_pipeline(graph, &artifact, &profile, &params, k)?;
            let matches = graph.planted().map(|p| p == recovery.clique.as_slice());
            write_json(
                common.out.as_deref(),
                &json!({ "recovery": recovery, "matches_planted": matches }),
            )
        }
        Command::Experiment(args) => experiment(args),
    }
}

fn build_game(args: BuildArgs) -> CliResult {
    let seed = args.common.seed;
    let out = args.common.out.as_deref();
    let load_graph = |four_regular: bool| -> CliResult<PlantedGraph> {
        match (&args.graph, args.n) {
            (Some(path), _) => read_json(path),
            (None, Some(n)) if four_regular => Ok(random_four_regular(n, seed)?),
            (None, Some(n)) => Ok(sample_planted_clique(n, args.k, seed)?),
            (None, None) => Err(Failure::usage("pass --graph or --n")),
        }
    };
    let artifact = match args.variant {
        Variant::BneGadget => {
            let game = build_coloring_hardness_game(&load_graph(true)?)?;
            return write_json(out, &game);
        }
        Variant::BneLift => {
            let path = args.artifact.as_ref().ok_or_else(|| Failure::usage("bne-lift needs --artifact"))?;
            let artifact: ReductionArtifact = read_json(path)?;
            return write_json(out, &lift_uniform_bayes(&artifact, args.types)?);
        }
        Variant::Hk | Variant::SecondEq => {
            let graph = load_graph(false)?;
            let params = hk_params(args.map, args.eta)?.with_n_big(args.n_big);
            let base = build_hk_game(&graph, &params, seed)?;
            if matches!(args.variant, Variant::SecondEq) {
                build_second_equilibrium_game(&base, args.lambda)?
            } else {
                base
            }
        }
        Variant::SmallSupport => {
            let graph = load_graph(false)?;
            let params = if args.quarter {
                params_small_support_quarter(args.eta)?
            } else {
                params_small_support(args.eta)?
            };
            build_small_support_game(&graph, &params.with_blocks(args.n1, args.n2), seed)?
        }
    };
    if let Some(path) = &args.artifact_out {
        write_json(Some(path), &artifact)?;
    }
    write_json(out, &artifact.game)
}

fn hk_params(map: ParamMap, eta: f64) -> CliResult<ReductionParams> {
    Ok(match map {
        ParamMap::Eps => params_eps_hardness(eta)?,
        ParamMap::Value => params_value_hardness(eta)?,
    })
}

fn solve(args: SolveArgs) -> CliResult {
    let out = args.common.out.as_deref();
    match args.algorithm {
        Algorithm::Dmp => {
            let game: BimatrixGame = read_json(&args.game)?;
            write_json(out, &dmp_half_equilibrium(&game, args.start_row)?)
        }
        Algorithm::OptimalHalf => {
            let game: BimatrixGame = read_json(&args.game)?;
            let (profile, value) = optimal_value_half_equilibrium(&game)?;
            eprintln!("value {value}");
            write_json(out, &profile)
        }
        Algorithm::SmallSupportSearch => {
            let game: BimatrixGame = read_json(&args.game)?;
            match small_support_search(&game, args.eps, args.support, args.value_floor, args.budget)? {
                Some(p) => write_json(out, &p),
                None => Err(Failure::verification(format!(
                    "no {}-equilibrium among {}-uniform profiles",
                    args.eps, args.support
                ))),
            }
        }
        Algorithm::QpBne => {
            let game: BayesianGame = read_json(&args.game)?;
            let (profile, trace) = qp_pure_bne_uniform(&game, args.eps, args.common.seed, args.guess_budget)?;
            if let Some(path) = &args.trace_out {
                write_json(Some(path), &trace)?;
            }
            write_json(out, &profile)
        }
        Algorithm::BruteBne => {
            let game: BayesianGame = read_json(&args.game)?;
            let bound = if args.strict {
                RegretBound::Below(args.eps)
            } else {
                RegretBound::AtMost(args.eps)
            };
            match brute_force_pure_bne_with(&game, bound, args.budget)? {
                Some(p) => write_json(out, &p),
                None => Err(Failure::verification(format!("no pure {}-BNE exists", args.eps))),
            }
        }
    }
}

fn verify(common: &Common, game: &Path, profile: &Path, eps: f64) -> CliResult {
    let game_json: serde_json::Value = read_json(game)?;
    let profile_json: serde_json::Value = read_json(profile)?;
    let (within, report) = if game_json.get("m_row").is_some() {
        let game: BimatrixGame = serde_json::from_value(game_json)?;
        let profile: MixedProfile = serde_json::from_value(profile_json)?;
        let cert = game.regret(&profile)?;
        (game.is_eps_equilibrium(&profile, eps)?, serde_json::to_value(cert)?)
    } else {
        let game: BayesianGame = serde_json::from_value(game_json)?;
        let profile: PureBayesProfile = serde_json::from_value(profile_json)?;
        let cert = bne_regret(&game, &profile)?;
        (cliquenash::bayesian::is_eps_bne(&game, &profile, eps)?, serde_json::to_value(cert)?)
    };
    write_json(common.out.as_deref(), &json!({ "eps": eps, "within_eps": within, "certificate": report }))?;
    if within {
        Ok(())
    } else {
        Err(Failure::verification(format!("profile is not a {eps}-equilibrium")))
    }
}

fn experiment(args: ExperimentArgs) -> CliResult {
    if let Some(path) = &args.replay {
        return replay_records(path, args.common.out.as_deref());
    }
    let mut config = match &args.config {
        Some(path) => read_json::<ExperimentConfig>(path)?,
        None => {
            let kind = args.experiment.ok_or_else(|| Failure::usage("pass --experiment, --config or --replay"))?;
            let n = args.n.ok_or_else(|| Failure::usage("pass --n"))?;
            ExperimentConfig::new(kind, n, args.k.unwrap_or(0))
        }
    };
    if let Some(kind) = args.experiment {
        config.experiment = kind;
    }
    macro_rules! set {
        ($($field:ident),*) => { $(if let Some(v) = args.$field { config.$field = v; })* };
    }
    set!(n, k, n_big, eta, trials, leak);
    if args.eps.is_some() {
        config.eps = args.eps;
    }
    if args.common.seed != 0 || args.config.is_none() {
        config.seed = args.common.seed;
    }
    config.timings |= args.timings;
    let format = match args.format {
        OutFormat::Json => Format::Json,
        OutFormat::Csv => Format::Csv,
    };
    let path = args.common.out.clone().or_else(|| config.out.clone()).or_else(|| {
        std::env::var_os(OUT_DIR_ENV).map(|dir| {
            let ext = if format == Format::Csv { "csv" } else { "jsonl" };
            PathBuf::from(dir).join(format!("{}-seed{}.{ext}", config.experiment.name(), config.seed))
        })
    });
    config.out = None;
    let (_, summary) = match &path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            run_experiment(&config, format, &mut BufWriter::new(File::create(p)?))?
        }
        None => run_experiment(&config, format, &mut io::stdout().lock())?,
    };
    eprintln!(
        "{}: {}/{} trials succeeded",
        config.experiment.name(),
        summary.successes,
        summary.trials
    );
    Ok(())
}

/// Accepts a bare record, a single output line, or a whole JSON Lines file.
fn replay_records(path: &Path, out: Option<&Path>) -> CliResult {
    let mut records = Vec::new();
    let text = fs::read_to_string(path)?;
    if let Ok(r) = serde_json::from_str::<TrialRecord>(&text) {
        records.push(r);
    } else {
        for line in BufReader::new(text.as_bytes()).lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<OutputLine>(&line) {
                Ok(OutputLine::Trial(r)) => records.push(*r),
                Ok(_) => {}
                Err(_) => records.push(serde_json::from_str(&line)?),
            }
        }
    }
    if records.is_empty() {
        return Err(Failure::usage("no trial records to replay"));
    }
    let mut sink: Box<dyn Write> = match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    };
    let mut mismatches = 0;
    for r in &records {
        let fresh = replay(r)?;
        if !same_outcome(&fresh, r) {
            mismatches += 1;
        }
        serde_json::to_writer(&mut sink, &OutputLine::Trial(Box::new(fresh)))?;
        sink.write_all(b"\n")?;
    }
    sink.flush()?;
    if mismatches > 0 {
        return Err(Failure::verification(format!("{mismatches} of {} records did not replay identically", records.len())));
    }
    eprintln!("{} records replayed identically", records.len());
    Ok(())
}

fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let file = File::open(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    serde_json::from_reader(BufReader::new(file))
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> CliResult {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            serde_json::to_writer(&mut w, value)?;
            w.write_all(b"\n")?;
            w.flush()?;
        }
        None => {
            let mut w = io::stdout().lock();
            serde_json::to_writer(&mut w, value)?;
            w.write_all(b"\n")?;
        }
    }
    Ok(())
}
