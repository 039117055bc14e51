use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cast_fdr::correlation::{MeanRowCorrelations, DEFAULT_CLAMP_DELTA};
use cast_fdr::io::{self, ThresholdRow};
use cast_fdr::procedures::threshold_curve;
use cast_fdr::simulation::run_study;
use cast_fdr::testing::{matrix_pvalues, TestVariant};
use cast_fdr::{run_adjustment, AdjustmentConfig, CastError, Method, Result};

#[derive(Parser)]
#[command(name = "castfdr", version, about = "Grouped, correlation-adjusted FDR control")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Adjust a grouped p-value table, or p-values computed from a data matrix.
    Adjust(AdjustArgs),
    /// Run a simulation grid and write summaries and raw counts.
    Simulate(SimulateArgs),
    /// Emit threshold curves for one group with pi0 = 1 and A_B = 1.
    Thresholds(ThresholdArgs),
}

#[derive(Args)]
struct AdjustArgs {
    /// Table with feature, group and pvalue columns.
    #[arg(long, required_unless_present = "matrix")]
    input: Option<PathBuf>,
    #[arg(long)]
    method: Method,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Directory of per-group correlation matrices named <group>.tsv.
    #[arg(long, conflicts_with_all = ["rbar", "matrix"])]
    corr: Option<PathBuf>,
    /// Table with feature and rbar columns.
    #[arg(long, conflicts_with = "matrix")]
    rbar: Option<PathBuf>,
    /// Feature-by-subject data matrix.
    #[arg(long, requires_all = ["pheno", "annot"])]
    matrix: Option<PathBuf>,
    #[arg(long)]
    pheno: Option<PathBuf>,
    #[arg(long)]
    annot: Option<PathBuf>,
    #[arg(long, default_value = "pooled")]
    test: TestVariant,
    #[arg(long, default_value_t = DEFAULT_CLAMP_DELTA)]
    delta: f64,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    /// TOML scenario file; list values define grid axes.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the replicate count of the config.
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long, default_value_t = 20240601)]
    seed: u64,
    #[arg(long)]
    output_dir: PathBuf,
}

#[derive(Args)]
struct ThresholdArgs {
    #[arg(long = "Mg")]
    group_size: usize,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0")]
    rbar: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "gbh,gby,lcast,qcast")]
    methods: Vec<Method>,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = DEFAULT_CLAMP_DELTA)]
    delta: f64,
    #[arg(long)]
    output: PathBuf,
}

fn output_path(path: &Path) -> PathBuf {
    match std::env::var_os("CASTFDR_OUTPUT_ROOT") {
        Some(root) if path.is_relative() => Path::new(&root).join(path),
        _ => path.to_path_buf(),
    }
}

fn adjust(args: AdjustArgs) -> Result<()> {
    let config = AdjustmentConfig { method: args.method, alpha: args.alpha, clamp_delta: args.delta };
    let (set, rbar) = if let Some(matrix) = &args.matrix {
        let (pheno, annot) = (args.pheno.as_ref().expect("required"), args.annot.as_ref().expect("required"));
        let input = io::read_data_matrix(matrix, pheno, annot)?;
        let p = matrix_pvalues(&input.data.values, &input.phenotype, args.test)?;
        let set = input.pvalue_set(&p)?;
        let rbar = if args.method.needs_correlation() { Some(input.mean_correlations(&set)?) } else { None };
        (set, rbar)
    } else {
        let set = io::read_pvalue_table(args.input.as_ref().expect("required"))?;
        let rbar: Option<MeanRowCorrelations<f64>> = match (&args.corr, &args.rbar) {
            (Some(dir), _) => Some(io::read_correlation_dir(dir, &set)?),
            (_, Some(file)) => Some(io::read_mean_correlations(file)?),
            _ => None,
        };
        (set, rbar)
    };
    let result = run_adjustment(&set, rbar.as_ref(), &config)?;
    log::info!("{}: {} of {} rejected", result.method, result.rejections, set.len());
    io::write_adjustment(&result, output_path(&args.output))
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let grid = io::read_scenario_grid(&args.config)?;
    let replicates = args.replicates.unwrap_or_else(|| grid.first().map_or(0, |s| s.replicates));
    if grid.iter().any(|s| s.replicates != replicates) && args.replicates.is_none() {
        return Err(CastError::Config("replicates must not be a grid axis".into()));
    }
    log::info!("{} grid point(s), {} replicate(s) each", grid.len(), replicates);
    let points = run_study(&grid, replicates, args.seed)?;
    io::write_study(&points, output_path(&args.output_dir))
}

fn thresholds(args: ThresholdArgs) -> Result<()> {
    let mut rows = Vec::new();
    for &method in &args.methods {
        for &rbar in &args.rbar {
            let curve = threshold_curve(method, args.group_size, rbar, args.alpha, args.delta)?;
            rows.extend(curve.into_iter().enumerate().map(|(k, threshold)| ThresholdRow {
                method,
                rbar,
                rank: k + 1,
                threshold,
            }));
        }
    }
    io::write_thresholds(&rows, output_path(&args.output))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Some(n) = std::env::var("CASTFDR_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("ignoring CASTFDR_THREADS: {e}");
        }
    }
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Adjust(a) => adjust(a),
        Command::Simulate(a) => simulate(a),
        Command::Thresholds(a) => thresholds(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let message = e.to_string().replace(['\n', '\r'], " ");
            eprintln!("error: kind={} message={message}", e.kind());
            ExitCode::FAILURE
        }
    }
}
