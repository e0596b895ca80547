//! Command-line surface: dataset generation, private synthesis, evaluation,
//! bound evaluation, and the experiment sweeps behind the paper-style plots.
//! All subcommands are deterministic for a fixed `--seed` and emit tidy CSV
//! or JSON for external plotting.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use binsynth_core::bounds::{
    beyond_worst_case_bound, gaussian_bound, kd_mmd_conversion, worst_case_bound, BoundConversion,
};
use binsynth_core::datagen::{
    kl_uniform_mixture_vs_gaussian, optimal_uniform_weights, sample_gaussian_mixture,
    uniform_mixture_as_weighted_dataset, GaussianMixtureSpec,
};
use binsynth_core::grid::GridConfig;
use binsynth_core::kernels::{
    default_eval_net, kde_sup_distance, mmd, mmd_weighted_vs_standard_gaussian, KernelParams,
};
use binsynth_core::noise::RunRng;
use binsynth_core::release::{
    synthesize_data_dependent, synthesize_data_independent, threshold_for_delta, SynthReport,
};
use binsynth_core::tree::{partition_shape, tau_floor, TreeConfig};
use binsynth_core::types::{bounding_box, Dataset, Point, WeightedDataset};

#[derive(Parser)]
#[command(name = "binsynth", version, about = "Private synthetic data by space partitioning")]
struct Cli {
    /// JSON config file; explicit flags override its values
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Release a private synthetic dataset from a CSV input
    Generate(GenerateArgs),
    /// Sweep epsilon and report mean/std MMD per method
    Tradeoff(TradeoffArgs),
    /// Pair empirical error with the Gaussian theory bound over epsilon
    Scaling(ScalingArgs),
    /// Sweep the uniform-mixture box width against a standard Gaussian
    UniformMixture(UniformMixtureArgs),
    /// Evaluate a closed-form bound and print the report as JSON
    Bounds(BoundsArgs),
    /// Generate ground-truth datasets
    Datagen(DatagenArgs),
    /// Compare two datasets with kernel metrics
    Eval(EvalArgs),
}

enum CliError {
    Usage(String),
    Data(String),
}

impl From<binsynth_core::Error> for CliError {
    fn from(e: binsynth_core::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cfg = match load_config(&cli.config) {
        Ok(cfg) => cfg,
        Err(CliError::Usage(m)) | Err(CliError::Data(m)) => {
            eprintln!("error: {m}");
            return ExitCode::from(1);
        }
    };
    let result = match cli.cmd {
        Cmd::Generate(a) => cmd_generate(a, &cfg),
        Cmd::Tradeoff(a) => cmd_tradeoff(a, &cfg),
        Cmd::Scaling(a) => cmd_scaling(a, &cfg),
        Cmd::UniformMixture(a) => cmd_uniform_mixture(a, &cfg),
        Cmd::Bounds(a) => cmd_bounds(a, &cfg),
        Cmd::Datagen(a) => cmd_datagen(a, &cfg),
        Cmd::Eval(a) => cmd_eval(a, &cfg),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(CliError::Data(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

fn load_config(path: &Option<PathBuf>) -> Result<Option<Value>, CliError> {
    match path {
        None => Ok(None),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Usage(format!("config {}: {e}", p.display())))?;
            let v: Value = serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("config {}: {e}", p.display())))?;
            Ok(Some(v))
        }
    }
}

/// Flag value if given, else the config file's entry under `key`.
fn pick<T: DeserializeOwned>(flag: Option<T>, cfg: &Option<Value>, key: &str) -> Option<T> {
    flag.or_else(|| {
        cfg.as_ref()
            .and_then(|v| v.get(key))
            .and_then(|v| serde_json::from_value(v.clone()).ok())
    })
}

fn require<T: DeserializeOwned>(
    flag: Option<T>,
    cfg: &Option<Value>,
    key: &str,
) -> Result<T, CliError> {
    pick(flag, cfg, key).ok_or_else(|| CliError::Usage(format!("missing --{key}")))
}

fn parse_list(s: &str) -> Result<Vec<f64>, CliError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|f| {
            f.trim()
                .parse::<f64>()
                .map_err(|e| CliError::Usage(format!("bad list entry {f:?}: {e}")))
        })
        .collect()
}

fn version_string() -> String {
    format!("binsynth {}", env!("CARGO_PKG_VERSION"))
}

fn write_json(path: &PathBuf, value: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Data(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn read_input(path: &PathBuf) -> Result<Dataset, CliError> {
    binsynth_core::io::read_dataset_path(path).map_err(|e| {
        CliError::Data(format!("input {}: {e}", path.display()))
    })
}

// ---------------------------------------------------------------- generate

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// manifest path; defaults to `<output>.manifest.json`
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// `grid` or `tree`
    #[arg(long)]
    mode: Option<String>,
    /// total privacy budget
    #[arg(long)]
    epsilon: Option<f64>,
    /// tree mode: fraction of the budget spent on partitioning
    #[arg(long, visible_alias = "eps-split")]
    epsilon_split: Option<f64>,
    /// grid mode: bin width
    #[arg(long)]
    width: Option<f64>,
    /// tree mode: maximum final bin edge
    #[arg(long)]
    s1: Option<f64>,
    /// tree mode: minimum final bin edge
    #[arg(long)]
    s2: Option<f64>,
    /// tree mode: stop threshold, a number or `auto`
    #[arg(long)]
    tau: Option<String>,
    /// filtering threshold, a number or `auto` = (8/eps) ln(1/delta)
    #[arg(long)]
    threshold: Option<String>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

fn resolve_threshold(
    raw: Option<String>,
    cfg: &Option<Value>,
    epsilon: f64,
    delta: f64,
) -> Result<f64, CliError> {
    let raw = pick(raw, cfg, "threshold").unwrap_or_else(|| "auto".to_string());
    if raw == "auto" {
        Ok(threshold_for_delta(epsilon, delta)?)
    } else {
        raw.parse::<f64>()
            .map_err(|e| CliError::Usage(format!("bad threshold {raw:?}: {e}")))
    }
}

fn run_synthesis(
    data: &Dataset,
    mode: &str,
    epsilon: f64,
    epsilon_split: f64,
    width: Option<f64>,
    s1: Option<f64>,
    s2: Option<f64>,
    tau_raw: Option<String>,
    threshold: f64,
    delta: f64,
    seed: u64,
    cfg: &Option<Value>,
) -> Result<(SynthReport, Value), CliError> {
    let run = RunRng::new(seed);
    match mode {
        "grid" => {
            let width = width.ok_or_else(|| CliError::Usage("grid mode needs --width".into()))?;
            let config = GridConfig::new(width, epsilon, threshold)?;
            let report = synthesize_data_independent(data, &config, &run)?;
            let echo = json!({
                "mode": "grid", "epsilon": epsilon, "width": width,
                "threshold": threshold, "delta": delta,
            });
            Ok((report, echo))
        }
        "tree" => {
            let s1 = s1.ok_or_else(|| CliError::Usage("tree mode needs --s1".into()))?;
            let s2 = s2.ok_or_else(|| CliError::Usage("tree mode needs --s2".into()))?;
            if !(0.0 < epsilon_split && epsilon_split < 1.0) {
                return Err(CliError::Usage("--epsilon-split must be in (0, 1)".into()));
            }
            let eps_part = epsilon * epsilon_split;
            let eps_rel = epsilon - eps_part;
            let tau_raw = pick(tau_raw, cfg, "tau").unwrap_or_else(|| "auto".to_string());
            let tau = if tau_raw == "auto" {
                let bx = bounding_box(data)?;
                let (h, h_prime) = partition_shape(data.dim(), bx.edge(), s1, s2)?;
                tau_floor(h, h_prime, data.len() as u64, eps_part, delta)?
            } else {
                tau_raw
                    .parse::<f64>()
                    .map_err(|e| CliError::Usage(format!("bad tau {tau_raw:?}: {e}")))?
            };
            let config = TreeConfig::new(eps_part, tau, s1, s2)?;
            let report = synthesize_data_dependent(data, &config, eps_rel, threshold, &run)?;
            let echo = json!({
                "mode": "tree", "epsilon": epsilon,
                "epsilon_partition": eps_part, "epsilon_release": eps_rel,
                "s1": s1, "s2": s2, "tau": tau,
                "threshold": threshold, "delta": delta,
            });
            Ok((report, echo))
        }
        other => Err(CliError::Usage(format!("unknown mode {other:?}"))),
    }
}

fn cmd_generate(a: GenerateArgs, cfg: &Option<Value>) -> Result<(), CliError> {
    let input: PathBuf = require(a.input, cfg, "input")?;
    let output: PathBuf = require(a.output, cfg, "output")?;
    let manifest = pick(a.manifest, cfg, "manifest")
        .unwrap_or_else(|| PathBuf::from(format!("{}.manifest.json", output.display())));
    let mode: String = require(a.mode, cfg, "mode")?;
    let epsilon: f64 = require(a.epsilon, cfg, "epsilon")?;
    let epsilon_split = pick(a.epsilon_split, cfg, "epsilon_split").unwrap_or(0.5);
    let delta = pick(a.delta, cfg, "delta").unwrap_or(0.05);
    let seed = pick(a.seed, cfg, "seed").unwrap_or(0);
    let threshold = resolve_threshold(
        a.threshold,
        cfg,
        if mode == "tree" {
            epsilon * (1.0 - epsilon_split)
        } else {
            epsilon
        },
        delta,
    )?;

    let data = read_input(&input)?;
    let (report, echo) = run_synthesis(
        &data,
        &mode,
        epsilon,
        epsilon_split,
        pick(a.width, cfg, "width"),
        pick(a.s1, cfg, "s1"),
        pick(a.s2, cfg, "s2"),
        a.tau,
        threshold,
        delta,
        seed,
        cfg,
    )?;

    binsynth_core::io::write_weighted_path(&output, &report.output)?;
    write_json(
        &manifest,
        &json!({
            "command": "generate",
            "version": version_string(),
            "seed": seed,
            "input": input.display().to_string(),
            "config": echo,
            "ledger": report.ledger,
            "stats": report.stats,
        }),
    )?;
    Ok(())
}

// ---------------------------------------------------------------- tradeoff

#[derive(Args)]
struct TradeoffArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// comma-separated epsilon values
    #[arg(long)]
    epsilons: Option<String>,
    /// comma-separated subset of {grid, tree}
    #[arg(long)]
    methods: Option<String>,
    #[arg(long)]
    reps: Option<u32>,
    #[arg(long)]
    width: Option<f64>,
    #[arg(long)]
    s1: Option<f64>,
    #[arg(long)]
    s2: Option<f64>,
    #[arg(long, visible_alias = "eps-split")]
    epsilon_split: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    bandwidth: Option<f64>,
    /// reference subsample size for the MMD estimate
    #[arg(long)]
    mmd_subsample: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

/// Deterministic subsample of the data as a unit-weight reference for MMD.
fn mmd_reference(data: &Dataset, size: usize, rng: &mut impl rand::Rng) -> WeightedDataset {
    use rand::seq::SliceRandom;
    let mut points: Vec<Point> = data.points().to_vec();
    points.shuffle(rng);
    points.truncate(size.max(2));
    WeightedDataset::new(points.into_iter().map(|p| (p, 1.0)).collect(), data.dim())
        .expect("unit weights are valid")
}

fn synthetic_mmd(
    reference: &WeightedDataset,
    report: &SynthReport,
    params: &KernelParams,
) -> f64 {
    if report.output.is_empty() {
        return f64::NAN;
    }
    mmd(reference, &report.output, params).unwrap_or(f64::NAN)
}

fn cmd_tradeoff(a: TradeoffArgs, cfg: &Option<Value>) -> Result<(), CliError> {
    let input: PathBuf = require(a.input, cfg, "input")?;
    let output: PathBuf = require(a.output, cfg, "output")?;
    let epsilons = parse_list(
        &pick(a.epsilons, cfg, "epsilons").unwrap_or_else(|| "0.1,0.3,1,3,10".into()),
    )?;
    let methods: String = pick(a.methods, cfg, "methods").unwrap_or_else(|| "grid,tree".into());
    let reps = pick(a.reps, cfg, "reps").unwrap_or(10).max(1);
    let delta = pick(a.delta, cfg, "delta").unwrap_or(0.05);
    let bandwidth = pick(a.bandwidth, cfg, "bandwidth").unwrap_or(1.0);
    let subsample = pick(a.mmd_subsample, cfg, "mmd_subsample").unwrap_or(2000);
    let seed = pick(a.seed, cfg, "seed").unwrap_or(0);
    let epsilon_split = pick(a.epsilon_split, cfg, "epsilon_split").unwrap_or(0.5);
    let width = pick(a.width, cfg, "width");
    let s1 = pick(a.s1, cfg, "s1");
    let s2 = pick(a.s2, cfg, "s2");

    let data = read_input(&input)?;
    let params = KernelParams::new(bandwidth)?;
    let run = RunRng::new(seed);
    let reference = mmd_reference(&data, subsample, &mut run.stream("reference"));

    let mut rows = String::from("method,epsilon,n,mean_mmd,std_mmd\n");
    for method in methods.split(',').map(str::trim) {
        for &eps in &epsilons {
            let mut values = Vec::with_capacity(reps as usize);
            for rep in 0..reps {
                use rand::Rng;
                let rep_seed: u64 = run.stream(&format!("rep/{method}/{eps}/{rep}")).random();
                let threshold = threshold_for_delta(
                    if method == "tree" { eps * (1.0 - epsilon_split) } else { eps },
                    delta,
                )?;
                let (report, _) = run_synthesis(
                    &data,
                    method,
                    eps,
                    epsilon_split,
                    width,
                    s1,
                    s2,
                    Some("auto".into()),
                    threshold,
                    delta,
                    rep_seed,
                    cfg,
                )?;
                values.push(synthetic_mmd(&reference, &report, &params));
            }
            let clean: Vec<f64> = values.iter().cloned().filter(|v| v.is_finite()).collect();
            let (mean, std) = if clean.is_empty() {
                (f64::NAN, f64::NAN)
            } else {
                let mean = clean.iter().sum::<f64>() / clean.len() as f64;
                let var = clean.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                    / clean.len() as f64;
                (mean, var.sqrt())
            };
            rows.push_str(&format!("{method},{eps},{},{mean},{std}\n", data.len()));
        }
    }
    std::fs::write(&output, rows)?;
    Ok(())
}

// ---------------------------------------------------------------- scaling

#[derive(Args)]
struct ScalingArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// per-coordinate std of the (Gaussian) input, for the theory bound
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    width: Option<f64>,
    #[arg(long)]
    epsilons: Option<String>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    reps: Option<u32>,
    #[arg(long)]
    bandwidth: Option<f64>,
    #[arg(long)]
    mmd_subsample: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

fn cmd_scaling(a: ScalingArgs, cfg: &Option<Value>) -> Result<(), CliError> {
    let input: PathBuf = require(a.input, cfg, "input")?;
    let output: PathBuf = require(a.output, cfg, "output")?;
    let sigma: f64 = require(a.sigma, cfg, "sigma")?;
    let width: f64 = require(a.width, cfg, "width")?;
    let epsilons = parse_list(&pick(a.epsilons, cfg, "epsilons").unwrap_or_else(|| {
        "0.1,0.3,1,3,10".into()
    }))?;
    let delta = pick(a.delta, cfg, "delta").unwrap_or(0.05);
    let reps = pick(a.reps, cfg, "reps").unwrap_or(5).max(1);
    let bandwidth = pick(a.bandwidth, cfg, "bandwidth").unwrap_or(1.0);
    let subsample = pick(a.mmd_subsample, cfg, "mmd_subsample").unwrap_or(2000);
    let seed = pick(a.seed, cfg, "seed").unwrap_or(0);

    let data = read_input(&input)?;
    let params = KernelParams::new(bandwidth)?;
    let run = RunRng::new(seed);
    let reference = mmd_reference(&data, subsample, &mut run.stream("reference"));

    let mut rows = String::from("epsilon,n,empirical_mmd,theory_bound,preconditions_met\n");
    for &eps in &epsilons {
        let threshold = threshold_for_delta(eps, delta)?;
        let config = GridConfig::new(width, eps, threshold)?;
        let mut values = Vec::new();
        for rep in 0..reps {
            use rand::Rng;
            let rep_seed: u64 = run.stream(&format!("rep/{eps}/{rep}")).random();
            let report = synthesize_data_independent(&data, &config, &RunRng::new(rep_seed))?;
            values.push(synthetic_mmd(&reference, &report, &params));
        }
        let clean: Vec<f64> = values.into_iter().filter(|v| v.is_finite()).collect();
        let mean = if clean.is_empty() {
            f64::NAN
        } else {
            clean.iter().sum::<f64>() / clean.len() as f64
        };
        let bound = gaussian_bound(data.len() as u64, data.dim() as u32, sigma, width, eps, delta);
        let (theory, met) = match bound.value {
            // KD-sup bound converted to the MMD scale
            Some(v) => (kd_mmd_conversion(BoundConversion::KdSupToMmd, v)?, true),
            None => (f64::NAN, false),
        };
        rows.push_str(&format!("{eps},{},{mean},{theory},{met}\n", data.len()));
    }
    std::fs::write(&output, rows)?;
    Ok(())
}

// ---------------------------------------------------------------- uniform-mixture

#[derive(Args)]
struct UniformMixtureArgs {
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    k: Option<u32>,
    /// comma-separated half-widths c to sweep
    #[arg(long)]
    c_list: Option<String>,
    /// kernel bandwidth for the MMD columns
    #[arg(long)]
    bandwidth: Option<f64>,
    /// size of the fresh standard-normal sample for the sample-MMD column
    #[arg(long)]
    sample_n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

fn cmd_uniform_mixture(a: UniformMixtureArgs, cfg: &Option<Value>) -> Result<(), CliError> {
    let output: PathBuf = require(a.output, cfg, "output")?;
    let k = pick(a.k, cfg, "k").unwrap_or(5);
    let c_list = parse_list(
        &pick(a.c_list, cfg, "c_list")
            .unwrap_or_else(|| "0.1,0.2,0.3,0.4,0.5,0.6,0.8,1.0".into()),
    )?;
    let bandwidth = pick(a.bandwidth, cfg, "bandwidth").unwrap_or(1.0);
    let sample_n = pick(a.sample_n, cfg, "sample_n").unwrap_or(10_000).max(2);
    let seed = pick(a.seed, cfg, "seed").unwrap_or(0);

    let params = KernelParams::new(bandwidth)?;
    // one fresh N(0,1) sample shared across the sweep
    let run = RunRng::new(seed);
    let spec = GaussianMixtureSpec::new(
        1,
        vec![1.0],
        vec![Point::new(vec![0.0])?],
        1.0,
    )?;
    let sample = sample_gaussian_mixture(&spec, sample_n, &mut run.stream("gauss"))?;
    let sample_w = WeightedDataset::from_dataset(&sample);

    let mut rows = String::from("c,kl,closed_form_mmd,sample_mmd\n");
    for &c in &c_list {
        let mixture = optimal_uniform_weights(k, c)?;
        let kl = kl_uniform_mixture_vs_gaussian(&mixture);
        let proxy = uniform_mixture_as_weighted_dataset(&mixture)?;
        let closed = mmd_weighted_vs_standard_gaussian(&proxy, &params)?;
        let sampled = mmd(&sample_w, &proxy, &params)?;
        rows.push_str(&format!("{c},{kl},{closed},{sampled}\n"));
    }
    std::fs::write(&output, rows)?;
    Ok(())
}

// ---------------------------------------------------------------- bounds

#[derive(Args)]
struct BoundsArgs {
    /// worst-case | beyond-worst-case | gaussian | tau | convert
    name: Option<String>,
    #[arg(long, visible_alias = "R")]
    r: Option<f64>,
    #[arg(long)]
    w: Option<f64>,
    #[arg(long)]
    d: Option<u32>,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long, visible_alias = "eps")]
    epsilon: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    /// beyond-worst-case: points in 3t/2-light bins
    #[arg(long)]
    m: Option<u64>,
    /// beyond-worst-case: number of t/2-heavy bins
    #[arg(long, visible_alias = "M")]
    big_m: Option<u64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    h: Option<u32>,
    #[arg(long)]
    hprime: Option<u32>,
    /// convert: `kd-to-mmd` or `mmd-to-kd`
    #[arg(long)]
    direction: Option<String>,
    #[arg(long)]
    value: Option<f64>,
    /// write the JSON report here as well as stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

fn cmd_bounds(a: BoundsArgs, cfg: &Option<Value>) -> Result<(), CliError> {
    let name: String = require(a.name, cfg, "name")?;
    let epsilon = pick(a.epsilon, cfg, "epsilon");
    let delta = pick(a.delta, cfg, "delta");
    let report: Value = match name.as_str() {
        "worst-case" => serde_json::to_value(worst_case_bound(
            require(a.r, cfg, "r")?,
            require(a.w, cfg, "w")?,
            require(a.d, cfg, "d")?,
            require(a.n, cfg, "n")?,
            require(epsilon, cfg, "epsilon")?,
            require(delta, cfg, "delta")?,
        ))
        .expect("report serializes"),
        "beyond-worst-case" => serde_json::to_value(beyond_worst_case_bound(
            require(a.n, cfg, "n")?,
            require(a.m, cfg, "m")?,
            require(a.big_m, cfg, "big_m")?,
            require(epsilon, cfg, "epsilon")?,
            require(delta, cfg, "delta")?,
            require(a.w, cfg, "w")?,
            require(a.d, cfg, "d")?,
        ))
        .expect("report serializes"),
        "gaussian" => serde_json::to_value(gaussian_bound(
            require(a.n, cfg, "n")?,
            require(a.d, cfg, "d")?,
            require(a.sigma, cfg, "sigma")?,
            require(a.w, cfg, "w")?,
            require(epsilon, cfg, "epsilon")?,
            require(delta, cfg, "delta")?,
        ))
        .expect("report serializes"),
        "tau" => {
            let h = require(a.h, cfg, "h")?;
            let hprime = require(a.hprime, cfg, "hprime")?;
            let n = require(a.n, cfg, "n")?;
            let eps = require(epsilon, cfg, "epsilon")?;
            let delta = require(delta, cfg, "delta")?;
            let value = tau_floor(h, hprime, n, eps, delta)?;
            json!({
                "name": "tau-floor",
                "value": value,
                "inputs": {"h": h, "hprime": hprime, "n": n, "epsilon": eps, "delta": delta},
                "preconditions_met": true,
                "explanation": "minimum stop threshold keeping empty nodes unsplit w.h.p.",
            })
        }
        "convert" => {
            let direction: String = require(a.direction, cfg, "direction")?;
            let value = require(a.value, cfg, "value")?;
            let dir = match direction.as_str() {
                "kd-to-mmd" => BoundConversion::KdSupToMmd,
                "mmd-to-kd" => BoundConversion::MmdToKdSup,
                other => {
                    return Err(CliError::Usage(format!("unknown direction {other:?}")))
                }
            };
            json!({
                "name": "conversion",
                "value": kd_mmd_conversion(dir, value)?,
                "inputs": {"value": value},
                "preconditions_met": true,
                "explanation": format!("direction {direction}"),
            })
        }
        other => return Err(CliError::Usage(format!("unknown bound {other:?}"))),
    };
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    println!("{text}");
    if let Some(path) = pick(a.output, cfg, "output") {
        write_json(&path, &report)?;
    }
    Ok(())
}

// ---------------------------------------------------------------- datagen

#[derive(Args)]
struct DatagenArgs {
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// `standard-normal` or `gaussian-mixture`
    #[arg(long)]
    recipe: Option<String>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

fn cmd_datagen(a: DatagenArgs, cfg: &Option<Value>) -> Result<(), CliError> {
    let output: PathBuf = require(a.output, cfg, "output")?;
    let manifest = pick(a.manifest, cfg, "manifest")
        .unwrap_or_else(|| PathBuf::from(format!("{}.manifest.json", output.display())));
    let recipe: String = pick(a.recipe, cfg, "recipe").unwrap_or_else(|| "standard-normal".into());
    let dim = pick(a.dim, cfg, "dim").unwrap_or(1);
    let n = pick(a.n, cfg, "n").unwrap_or(10_000);
    let seed = pick(a.seed, cfg, "seed").unwrap_or(0);
    let run = RunRng::new(seed);

    let (data, spec_echo) = match recipe.as_str() {
        "standard-normal" => {
            let spec = GaussianMixtureSpec::new(
                dim,
                vec![1.0],
                vec![Point::new(vec![0.0; dim])?],
                1.0,
            )?;
            let data = sample_gaussian_mixture(&spec, n, &mut run.stream("data"))?;
            (data, serde_json::to_value(&spec).expect("spec serializes"))
        }
        "gaussian-mixture" => {
            // component means drawn once from the seed and frozen into the
            // manifest for exact reproduction
            let spec = GaussianMixtureSpec::standard_recipe(dim, &mut run.stream("means"))?;
            let data = sample_gaussian_mixture(&spec, n, &mut run.stream("data"))?;
            (data, serde_json::to_value(&spec).expect("spec serializes"))
        }
        other => return Err(CliError::Usage(format!("unknown recipe {other:?}"))),
    };
    binsynth_core::io::write_dataset_path(&output, &data)?;
    write_json(
        &manifest,
        &json!({
            "command": "datagen",
            "version": version_string(),
            "seed": seed,
            "recipe": recipe,
            "n": n,
            "dim": dim,
            "spec": spec_echo,
        }),
    )?;
    Ok(())
}

// ---------------------------------------------------------------- eval

#[derive(Args)]
struct EvalArgs {
    /// reference dataset CSV (plain rows, unit weights)
    #[arg(long)]
    p: Option<PathBuf>,
    /// synthetic dataset CSV with a trailing weight column
    #[arg(long)]
    q: Option<PathBuf>,
    #[arg(long)]
    bandwidth: Option<f64>,
    /// quasi-random fill points added to the KD evaluation net
    #[arg(long)]
    eval_net: Option<usize>,
    #[arg(long)]
    mmd_subsample: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn cmd_eval(a: EvalArgs, cfg: &Option<Value>) -> Result<(), CliError> {
    let p_path: PathBuf = require(a.p, cfg, "p")?;
    let q_path: PathBuf = require(a.q, cfg, "q")?;
    let bandwidth = pick(a.bandwidth, cfg, "bandwidth").unwrap_or(1.0);
    let eval_net = pick(a.eval_net, cfg, "eval_net").unwrap_or(1000);
    let subsample = pick(a.mmd_subsample, cfg, "mmd_subsample").unwrap_or(2000);
    let seed = pick(a.seed, cfg, "seed").unwrap_or(0);

    let p_data = read_input(&p_path)?;
    let q = binsynth_core::io::read_weighted_path(&q_path)
        .map_err(|e| CliError::Data(format!("input {}: {e}", q_path.display())))?;
    let params = KernelParams::new(bandwidth)?;
    let run = RunRng::new(seed);
    let reference = mmd_reference(&p_data, subsample, &mut run.stream("reference"));

    let net = default_eval_net(&reference, &q, eval_net)?;
    let kd_sup = kde_sup_distance(&reference, &q, &net, &params)?;
    let mmd_value = mmd(&reference, &q, &params)?;

    let report = json!({
        "command": "eval",
        "version": version_string(),
        "seed": seed,
        "bandwidth": bandwidth,
        "n_p": p_data.len(),
        "n_q": q.len(),
        "mmd": mmd_value,
        "kd_sup": kd_sup,
    });
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    println!("{text}");
    if let Some(path) = pick(a.output, cfg, "output") {
        write_json(&path, &report)?;
    }
    Ok(())
}
