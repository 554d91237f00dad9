//! `msc3` command line: `synth`, `cluster`, `eval` and `sweep`.
//!
//! Exit codes: 0 success, 1 I/O or file format, 2 usage, 3 degenerate data.
//! Mode numbers are 1-based; member indices are 0-based.

pub mod eval;
pub mod methods;
pub mod sweep;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::io::{load_tensor, save_tensor, TensorFormat};
use crate::msc::{LogBase, MscConfig};
use crate::par::Execution;
use crate::report::{read_json, write_json, ClustersJson};
use crate::spectral::{EigConfig, EigMethod};
use crate::synth::{generate, Component, SynthSpec, TruthJson};
use crate::tensor::{IndexSet, Mode, Tensor3};

pub use methods::{run_method, Method};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "msc3", version, about = "Multi-slice clustering for third-order tensors")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a planted-cluster tensor and its ground truth.
    Synth(SynthArgs),
    /// Cluster a tensor file.
    Cluster(ClusterArgs),
    /// Score a clusters file against ground truth and/or the tensor.
    Eval(EvalArgs),
    /// Sweep signal strength on the two-component benchmark.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    T3b,
    Csv,
}

impl From<FormatArg> for TensorFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::T3b => TensorFormat::T3b,
            FormatArg::Csv => TensorFormat::Csv,
        }
    }
}

fn format_for(path: &Path, arg: Option<FormatArg>) -> TensorFormat {
    arg.map_or_else(|| TensorFormat::from_path(path), Into::into)
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum EigArg {
    Power,
    Exact,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LogBaseArg {
    Natural,
    #[value(name = "2")]
    Two,
    #[value(name = "10")]
    Ten,
}

/// Options shared by every command that runs the clustering.
#[derive(Debug, Clone, Args)]
pub struct AlgoArgs {
    /// MSC threshold parameter.
    #[arg(long, default_value_t = 0.001)]
    pub epsilon: f64,
    #[arg(long, value_enum, default_value = "power")]
    pub eig: EigArg,
    /// Logarithm inside the spread bound and the DBSCAN radius.
    #[arg(long, value_enum, default_value = "natural")]
    pub log_base: LogBaseArg,
    /// Disable data-parallel evaluation.
    #[arg(long)]
    pub sequential: bool,
}

impl AlgoArgs {
    pub fn config(&self) -> Result<MscConfig> {
        if !(self.epsilon > 0.0) {
            return Err(Error::Argument(format!(
                "--epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        Ok(MscConfig {
            eig: EigConfig {
                method: match self.eig {
                    EigArg::Power => EigMethod::Power,
                    EigArg::Exact => EigMethod::Exact,
                },
                ..EigConfig::default()
            },
            log_base: match self.log_base {
                LogBaseArg::Natural => LogBase::Natural,
                LogBaseArg::Two => LogBase::Two,
                LogBaseArg::Ten => LogBase::Ten,
            },
            execution: if self.sequential {
                Execution::Sequential
            } else {
                Execution::Parallel
            },
        })
    }
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Tensor dimensions, e.g. 50,50,50.
    #[arg(long, value_delimiter = ',', required = true, num_args = 1)]
    pub dims: Vec<usize>,
    /// Number of planted rank-1 components.
    #[arg(long, default_value_t = 1)]
    pub rank: usize,
    /// Signal strength per component; a single value is used for all.
    #[arg(long, value_delimiter = ',', default_value = "80")]
    pub gamma: Vec<f64>,
    /// Members per component and mode, as consecutive leading blocks.
    #[arg(long, default_value_t = 10)]
    pub cluster_size: usize,
    /// Explicit member sets for one component, `i,..|j,..|k,..`; repeat per component.
    #[arg(long)]
    pub members: Vec<String>,
    /// Noise standard deviation.
    #[arg(long, default_value_t = 1.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long)]
    pub truth: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "msc-dbscan")]
    pub method: Method,
    #[command(flatten)]
    pub algo: AlgoArgs,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Clusters JSON destination; stdout when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Clusters JSON produced by `cluster`.
    pub clusters: PathBuf,
    #[arg(long)]
    pub truth: Option<PathBuf>,
    #[arg(long)]
    pub tensor: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Signal strengths as start:stop:step.
    #[arg(long)]
    pub gamma: String,
    /// Seeds per signal strength.
    #[arg(long, default_value_t = 10)]
    pub runs: usize,
    /// First seed; run r uses seed + r.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, env = "MSC3_JOBS", default_value_t = 0)]
    pub jobs: usize,
    #[command(flatten)]
    pub algo: AlgoArgs,
    /// Per-run CSV.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Aggregate CSV; defaults to `<output stem>_agg.csv`.
    #[arg(long)]
    pub aggregate: Option<PathBuf>,
    /// Record wall-clock milliseconds (makes the per-run CSV non-reproducible).
    #[arg(long)]
    pub timing: bool,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io { .. } | Error::Json { .. } | Error::Format { .. } => EXIT_IO,
        Error::Degenerate(_) | Error::NoGap | Error::Convergence { .. } => EXIT_DEGENERATE,
        Error::Argument(_) | Error::Validation(_) | Error::Range { .. } => EXIT_USAGE,
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Synth(a) => cmd_synth(&a),
        Command::Cluster(a) => cmd_cluster(&a),
        Command::Eval(a) => cmd_eval(&a),
        Command::Sweep(a) => cmd_sweep(&a),
    }
}

fn parse_members(text: &str, dims: [usize; 3]) -> Result<[IndexSet; 3]> {
    let parts: Vec<&str> = text.split('|').collect();
    if parts.len() != 3 {
        return Err(Error::Argument(format!(
            "--members '{text}' needs three '|'-separated lists"
        )));
    }
    let mut sets = Vec::with_capacity(3);
    for (part, mode) in parts.iter().zip(Mode::ALL) {
        let idx = part
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| s.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::Argument(format!("--members '{text}': bad index list '{part}'")))?;
        sets.push(IndexSet::new(mode, idx, dims[mode.axis()])?);
    }
    Ok(sets.try_into().expect("three sets"))
}

pub fn cmd_synth(a: &SynthArgs) -> Result<i32> {
    let dims: [usize; 3] = a
        .dims
        .clone()
        .try_into()
        .map_err(|_| Error::Argument(format!("--dims needs three values, got {:?}", a.dims)))?;
    if a.rank == 0 {
        return Err(Error::Argument("--rank must be at least 1".into()));
    }
    let gammas = match a.gamma.len() {
        1 => vec![a.gamma[0]; a.rank],
        n if n == a.rank => a.gamma.clone(),
        n => return Err(Error::Argument(format!("--gamma lists {n} values for rank {}", a.rank))),
    };
    let spec = if a.members.is_empty() {
        SynthSpec::leading_blocks(dims, &gammas, a.cluster_size, a.seed, a.noise)?
    } else {
        if a.members.len() != a.rank {
            return Err(Error::Argument(format!(
                "{} --members values for rank {}",
                a.members.len(),
                a.rank
            )));
        }
        let components = a
            .members
            .iter()
            .zip(&gammas)
            .map(|(m, &gamma)| {
                Ok(Component {
                    gamma,
                    members: parse_members(m, dims)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        SynthSpec {
            dims,
            components,
            seed: a.seed,
            noise_scale: a.noise,
        }
    };
    let (t, truth) = generate(&spec)?;
    save_tensor(&t, &a.output, format_for(&a.output, a.format))?;
    if let Some(path) = &a.truth {
        write_json(&truth.to_json(), path)?;
    }
    println!(
        "wrote {} ({}x{}x{}, rank {}, seed {})",
        a.output.display(),
        dims[0],
        dims[1],
        dims[2],
        a.rank,
        a.seed
    );
    Ok(EXIT_OK)
}

fn load(path: &Path, format: Option<FormatArg>) -> Result<Tensor3> {
    load_tensor(path, format_for(path, format))
}

pub fn cmd_cluster(a: &ClusterArgs) -> Result<i32> {
    let config = a.algo.config()?;
    let t = load(&a.input, a.format)?;
    let (modes, tri) = run_method(&t, a.method, a.algo.epsilon, &config)?;
    let doc = ClustersJson::new(a.method.name(), a.algo.epsilon, &modes, &tri);
    match &a.output {
        Some(path) => doc.write(path)?,
        None => println!("{}", doc.to_json_string()),
    }
    let mut degenerate = false;
    for mc in &modes {
        match &mc.failure {
            Some(f) => {
                degenerate |= f.kind == "degenerate";
                eprintln!("{}: failed ({})", mc.mode, f.message);
            }
            None => {
                let sizes: Vec<usize> = mc.clusters.iter().map(IndexSet::len).collect();
                eprintln!(
                    "{}: msc |J|={} clusters {:?} noise {}",
                    mc.mode,
                    mc.msc_cluster.len(),
                    sizes,
                    mc.noise.len()
                );
            }
        }
    }
    eprintln!("{} tricluster(s)", tri.triclusters.len());
    Ok(if degenerate { EXIT_DEGENERATE } else { EXIT_OK })
}

pub fn cmd_eval(a: &EvalArgs) -> Result<i32> {
    let doc = ClustersJson::read(&a.clusters)?;
    let truth = match &a.truth {
        Some(p) => Some(read_json::<TruthJson>(p)?.labels()?),
        None => None,
    };
    let tensor = match &a.tensor {
        Some(p) => Some(load(p, a.format)?),
        None => None,
    };
    if truth.is_none() && tensor.is_none() {
        return Err(Error::Argument("eval needs --truth and/or --tensor".into()));
    }
    let ev = eval::evaluate(&doc, truth.as_ref(), tensor.as_ref())?;
    if let Some(ari) = ev.ari {
        for (mode, v) in Mode::ALL.iter().zip(ari) {
            println!("ari {mode}: {v:.6}");
        }
        println!("ari mean: {:.6}", ev.ari_mean().unwrap_or(f64::NAN));
    }
    for (i, (r, vol)) in ev.rmse.iter().enumerate() {
        println!("rmse tricluster {i} (volume {vol}): {r:.6}");
    }
    if let Some(w) = ev.rmse_weighted {
        println!("rmse weighted: {w:.6}");
    }
    if let Some(path) = &a.csv {
        std::fs::write(path, ev.to_csv()).map_err(|e| Error::io(path, e))?;
    }
    Ok(EXIT_OK)
}

fn aggregate_path(output: &Path) -> PathBuf {
    let stem = output.file_stem().and_then(|s| s.to_str()).unwrap_or("sweep");
    output.with_file_name(format!("{stem}_agg.csv"))
}

pub fn cmd_sweep(a: &SweepArgs) -> Result<i32> {
    let config = a.algo.config()?;
    let gammas = sweep::parse_range(&a.gamma)?;
    if gammas.iter().any(|&g| !(g > 0.0)) {
        return Err(Error::Argument("--gamma values must be positive".into()));
    }
    if a.runs == 0 {
        return Err(Error::Argument("--runs must be at least 1".into()));
    }
    let cfg = sweep::SweepConfig {
        gammas,
        runs: a.runs,
        epsilon: a.algo.epsilon,
        base_seed: a.seed,
        msc: config,
        timing: a.timing,
    };
    let rows = crate::par::with_jobs(a.jobs, || sweep::run_sweep(&cfg, config.execution));
    std::fs::write(&a.output, sweep::rows_csv(&rows)).map_err(|e| Error::io(&a.output, e))?;
    let agg_path = a.aggregate.clone().unwrap_or_else(|| aggregate_path(&a.output));
    let agg = sweep::aggregate(&rows);
    std::fs::write(&agg_path, sweep::aggregate_csv(&agg)).map_err(|e| Error::io(&agg_path, e))?;
    for r in &agg {
        println!(
            "gamma {:>6} {:<10} ari {:.4} ± {:.4}",
            r.gamma,
            r.method.name(),
            r.ari_mean,
            r.ari_std
        );
    }
    println!(
        "wrote {} rows to {} and {}",
        rows.len(),
        a.output.display(),
        agg_path.display()
    );
    Ok(EXIT_OK)
}
