use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use logitcmp::harness::{Manifest, RunSpec, AGGREGATES_FILE, FIGURE_FILE, MANIFEST_FILE, REPLICATIONS_FILE};
use logitcmp::lasso::fit_lasso_path_on_grid;
use logitcmp::metrics::gini_of;
use logitcmp::selection::{Direction, StartModel};
use logitcmp::simgen::{full_grid, Calibration, ScenarioConfig, GRID_N, GRID_ORE, GRID_P, GRID_REPS, GRID_RHO};
use logitcmp::{
    fit_lasso_cv, fit_mle, fit_stepml, load_csv, refit_support, run_application, run_grid, AggregateResult,
    ApplicationSpec, ColumnRef, Dataset, FittedModel, IngestSpec, Method, PipelineConfig, ReplicationResult,
    RunOptions,
};

#[derive(Parser)]
#[command(name = "logitcmp", version, about = "Lasso versus stepwise maximum likelihood for logistic regression")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the Monte Carlo simulation grid.
    Simulate(SimulateArgs),
    /// Repeated 70/30 splits of a real dataset.
    Apply(ApplyArgs),
    /// Fit one or all methods on a CSV and print coefficients.
    Fit(FitArgs),
    /// Repeat a run exactly from its manifest.
    Rerun(RerunArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// All 48 scenarios of the full factorial design.
    #[arg(long, alias = "paper-grid")]
    full_grid: bool,
    /// Covariate counts (comma separated).
    #[arg(long, value_delimiter = ',', conflicts_with = "full_grid")]
    p: Vec<usize>,
    /// Sample sizes (comma separated).
    #[arg(long, value_delimiter = ',', conflicts_with = "full_grid")]
    n: Vec<usize>,
    /// Target outcome rates (comma separated).
    #[arg(long, value_delimiter = ',', conflicts_with = "full_grid")]
    ore: Vec<f64>,
    /// Covariate correlations (comma separated).
    #[arg(long, value_delimiter = ',', conflicts_with = "full_grid")]
    rho: Vec<f64>,
    /// Replications per scenario.
    #[arg(long, default_value_t = GRID_REPS)]
    reps: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    pipeline: PipelineArgs,
}

#[derive(Args)]
struct ApplyArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Label used in output files; defaults to the file stem.
    #[arg(long)]
    name: Option<String>,
    #[arg(long, default_value_t = 100)]
    splits: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    pipeline: PipelineArgs,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, value_enum, default_value_t = FitMethod::All)]
    method: FitMethod,
    /// Fit on every row instead of a stratified train/test split.
    #[arg(long)]
    no_split: bool,
    /// Fixed lasso penalty (per-observation scale) instead of cross-validation.
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[command(flatten)]
    pipeline: PipelineArgs,
}

#[derive(Args)]
struct RerunArgs {
    /// manifest.json of an earlier run.
    #[arg(long)]
    manifest: PathBuf,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct RunArgs {
    /// Output directory; rerunning into the same directory resumes.
    #[arg(long, env = "LOGITCMP_OUT", default_value = "logitcmp-out")]
    out: PathBuf,
    /// Worker threads (0 = all cores).
    #[arg(short = 'j', long, default_value_t = 0)]
    jobs: usize,
    /// No per-replication progress on stderr.
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
struct DataArgs {
    /// JSON ingest sidecar; flags below override its fields.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// CSV file.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Outcome column, by header name or 0-based index.
    #[arg(long)]
    target: Option<String>,
    /// Outcome value mapped to 1.
    #[arg(long)]
    positive: Option<String>,
    #[arg(long)]
    delimiter: Option<char>,
    #[arg(long)]
    no_header: bool,
    /// Columns to one-hot encode (names or indices); default auto-detects.
    #[arg(long, value_delimiter = ',')]
    categorical: Option<Vec<String>>,
}

#[derive(Args)]
struct PipelineArgs {
    /// Methods to run (simulate and apply).
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [MethodArg::Lasso, MethodArg::Lassoml, MethodArg::Stepml])]
    methods: Vec<MethodArg>,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(2..))]
    folds: u64,
    #[arg(long, default_value_t = 0.7)]
    train_frac: f64,
    /// Points on the lasso path.
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(2..))]
    n_lambda: u64,
    /// Smallest λ as a fraction of λ_max (default 0.01 if n > p, else 0.05).
    #[arg(long)]
    lambda_min_ratio: Option<f64>,
    #[arg(long, value_enum, default_value_t = DirectionArg::Both)]
    step_direction: DirectionArg,
    #[arg(long, value_enum, default_value_t = StartArg::Full)]
    step_start: StartArg,
    /// Cap on stepwise model size (default min(p, n − 2)).
    #[arg(long)]
    max_model_size: Option<usize>,
    /// Let stepwise adopt separated fits on their AIC.
    #[arg(long)]
    admit_separated: bool,
    #[arg(long, default_value_t = 1e-8)]
    irls_tol: f64,
    #[arg(long, default_value_t = 50)]
    irls_max_iter: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Lasso,
    Lassoml,
    Stepml,
    Mle,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Lasso => Method::Lasso,
            MethodArg::Lassoml => Method::LassoMl,
            MethodArg::Stepml => Method::StepMl,
            MethodArg::Mle => Method::Mle,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FitMethod {
    Lasso,
    Lassoml,
    Stepml,
    Mle,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Forward,
    Backward,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum StartArg {
    Null,
    Full,
}

impl PipelineArgs {
    fn config(&self) -> Result<PipelineConfig> {
        let mut cfg = PipelineConfig {
            methods: self.methods.iter().map(|&m| m.into()).collect(),
            cv_folds: self.folds as usize,
            train_frac: self.train_frac,
            ..PipelineConfig::default()
        };
        cfg.path.n_lambda = self.n_lambda as usize;
        cfg.path.lambda_min_ratio = self.lambda_min_ratio;
        cfg.irls.tol = self.irls_tol;
        cfg.irls.max_iter = self.irls_max_iter;
        cfg.stepwise.irls = cfg.irls;
        cfg.stepwise.direction = match self.step_direction {
            DirectionArg::Forward => Direction::Forward,
            DirectionArg::Backward => Direction::Backward,
            DirectionArg::Both => Direction::Both,
        };
        cfg.stepwise.start = match self.step_start {
            StartArg::Null => StartModel::InterceptOnly,
            StartArg::Full => StartModel::Full,
        };
        cfg.stepwise.max_model_size = self.max_model_size;
        cfg.stepwise.admit_separated = self.admit_separated;
        cfg.validate()?;
        Ok(cfg)
    }
}

impl DataArgs {
    fn spec(&self) -> Result<IngestSpec> {
        let mut spec = match &self.spec {
            Some(p) => IngestSpec::from_json_file(p).with_context(|| format!("reading {}", p.display()))?,
            None => {
                let (Some(data), Some(target), Some(positive)) = (&self.data, &self.target, &self.positive) else {
                    bail!("give --spec, or all of --data, --target and --positive");
                };
                IngestSpec::new(data, ColumnRef::parse(target), positive.clone())
            }
        };
        if let Some(d) = &self.data {
            spec.path = d.clone();
        }
        if let Some(t) = &self.target {
            spec.target = ColumnRef::parse(t);
        }
        if let Some(p) = &self.positive {
            spec.positive_label = p.clone();
        }
        if let Some(d) = self.delimiter {
            spec.delimiter = d;
        }
        if self.no_header {
            spec.has_header = false;
        }
        if let Some(c) = &self.categorical {
            spec.categorical_columns = Some(c.iter().map(|s| ColumnRef::parse(s)).collect());
        }
        Ok(spec)
    }
}

fn load(spec: &IngestSpec) -> Result<Dataset<f64>> {
    let (data, report) = load_csv(spec).with_context(|| format!("loading {}", spec.path.display()))?;
    eprintln!(
        "{}: {} of {} rows kept, p = {} after encoding, {} positives",
        spec.path.display(),
        report.rows_kept,
        report.rows_read,
        report.p,
        report.positives
    );
    for r in &report.rejected {
        eprintln!("  rejected row {}: {}", r.row, r.reason);
    }
    for c in &report.categorical {
        eprintln!("  {} one-hot encoded, reference level {:?}", c.column, c.levels[0]);
    }
    if !report.zero_variance.is_empty() {
        eprintln!("  zero-variance columns (held at 0): {}", report.zero_variance.join(", "));
    }
    Ok(data)
}

fn progress(total: usize, quiet: bool) -> impl Fn(&ReplicationResult) + Sync {
    let done = AtomicUsize::new(0);
    move |r: &ReplicationResult| {
        let k = done.fetch_add(1, Ordering::Relaxed) + 1;
        if !quiet {
            eprintln!("[{k}/{total}] {} rep {}", r.scenario_id, r.rep_index);
        }
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| format!("{x:.3}"))
}

fn print_aggregates(aggregates: &[AggregateResult]) {
    println!("{:<28} {:>8} {:>8} {:>8} {:>9}", "scenario", "method", "mean", "sd", "valid");
    for a in aggregates {
        for s in &a.arms {
            println!(
                "{:<28} {:>8} {:>8} {:>8} {:>5}/{:<3}",
                a.unit.id,
                s.arm.to_string(),
                fmt_opt(s.mean_gini),
                fmt_opt(s.sd_gini),
                s.n_valid,
                a.n_reps
            );
        }
    }
}

fn print_outputs(dir: &Path) {
    for f in [REPLICATIONS_FILE, AGGREGATES_FILE, FIGURE_FILE, MANIFEST_FILE] {
        eprintln!("wrote {}", dir.join(f).display());
    }
}

fn scenarios(args: &SimulateArgs) -> Result<Vec<ScenarioConfig>> {
    if args.full_grid {
        return Ok(full_grid(args.reps, args.seed));
    }
    let or_default = |v: &Vec<usize>, d: &[usize]| if v.is_empty() { d.to_vec() } else { v.clone() };
    let or_default_f = |v: &Vec<f64>, d: &[f64]| if v.is_empty() { d.to_vec() } else { v.clone() };
    let ps = or_default(&args.p, &GRID_P);
    let ns = or_default(&args.n, &GRID_N);
    let ores = or_default_f(&args.ore, &GRID_ORE);
    let rhos = or_default_f(&args.rho, &GRID_RHO);
    let mut out = Vec::new();
    for &ore in &ores {
        for &rho in &rhos {
            for &p in &ps {
                for &n in &ns {
                    let s = ScenarioConfig {
                        p,
                        n,
                        ore,
                        rho,
                        n_reps: args.reps,
                        master_seed: args.seed,
                    };
                    s.validate()?;
                    out.push(s);
                }
            }
        }
    }
    Ok(out)
}

fn simulate_with(scenarios: &[ScenarioConfig], pipeline: &PipelineConfig, calibration: &Calibration, run: &RunArgs) -> Result<()> {
    if scenarios.iter().any(|s| s.n_reps == 0) {
        bail!("--reps must be at least 1");
    }
    let total = scenarios.iter().map(|s| s.n_reps).sum();
    let cb = progress(total, run.quiet);
    let opts = RunOptions {
        parallelism: run.jobs,
        out_dir: Some(run.out.clone()),
        on_replication: Some(&cb),
    };
    let outcome = run_grid(scenarios, pipeline, calibration, &opts)?;
    if outcome.resumed > 0 {
        eprintln!("resumed {} replications, ran {}", outcome.resumed, outcome.executed);
    }
    print_aggregates(&outcome.aggregates);
    print_outputs(&run.out);
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let scenarios = scenarios(args)?;
    simulate_with(&scenarios, &args.pipeline.config()?, &Calibration::default(), &args.run)
}

fn print_application(a: &AggregateResult) {
    println!(
        "dataset {}: n = {}, p = {} (after encoding), p/n = {:.3}, ORE = {:.3}",
        a.unit.id,
        a.unit.n,
        a.unit.p,
        a.unit.p as f64 / a.unit.n as f64,
        a.unit.ore
    );
    println!("{:<8} {:>10} {:>10} {:>7}", "method", "mean Gini", "SD", "valid");
    for s in &a.arms {
        println!(
            "{:<8} {:>10} {:>10} {:>7}",
            s.arm.to_string(),
            fmt_opt(s.mean_gini),
            fmt_opt(s.sd_gini),
            s.n_valid
        );
    }
}

fn apply_with(data: &Dataset<f64>, app: &ApplicationSpec, pipeline: &PipelineConfig, run: &RunArgs) -> Result<()> {
    let cb = progress(app.n_splits, run.quiet);
    let opts = RunOptions {
        parallelism: run.jobs,
        out_dir: Some(run.out.clone()),
        on_replication: Some(&cb),
    };
    let outcome = run_application(data, app, pipeline, &opts)?;
    print_application(&outcome.aggregates[0]);
    print_outputs(&run.out);
    Ok(())
}

fn cmd_apply(args: &ApplyArgs) -> Result<()> {
    let spec = args.data.spec()?;
    let data = load(&spec)?;
    let name = match &args.name {
        Some(n) => n.clone(),
        None => spec
            .path
            .file_stem()
            .map_or_else(|| "dataset".to_string(), |s| s.to_string_lossy().into_owned()),
    };
    let app = ApplicationSpec {
        name,
        n_splits: args.splits,
        master_seed: args.seed,
        source: Some(spec),
    };
    apply_with(&data, &app, &args.pipeline.config()?, &args.run)
}

fn cmd_rerun(args: &RerunArgs) -> Result<()> {
    let manifest = Manifest::read(&args.manifest).with_context(|| format!("reading {}", args.manifest.display()))?;
    match manifest.run {
        RunSpec::Simulation {
            scenarios,
            calibration,
            pipeline,
        } => simulate_with(&scenarios, &pipeline, &calibration, &args.run),
        RunSpec::Application {
            application,
            data_fingerprint,
            pipeline,
        } => {
            let Some(spec) = &application.source else {
                bail!("manifest does not record where the data came from");
            };
            let data = load(spec)?;
            if logitcmp::harness::data_fingerprint(&data) != data_fingerprint {
                bail!("{} no longer matches the data recorded in the manifest", spec.path.display());
            }
            apply_with(&data, &application, &pipeline, &args.run)
        }
    }
}

fn print_model(data: &Dataset<f64>, model: &FittedModel<f64>) {
    let mut header = format!("== {}", model.method);
    if let Some(l) = model.lambda {
        header.push_str(&format!(" (lambda = {l:.6e})"));
    }
    if model.lasso_fallback {
        header.push_str(" [refit failed; lasso coefficients kept]");
    } else if !model.converged {
        header.push_str(" [not converged]");
    }
    println!("{header}");
    println!("  {:<24} {:>14.8}", "(intercept)", model.alpha);
    for j in 0..data.p() {
        println!("  {:<24} {:>14.8}", data.feature_name(j), model.beta[j]);
    }
}

fn gini_on(model: &FittedModel<f64>, data: &Dataset<f64>) -> Option<f64> {
    if !data.has_both_classes() {
        return None;
    }
    let mu = model.predict_proba(data).ok()?;
    gini_of(mu.as_slice()?, data.y().as_slice()?).ok()
}

fn cmd_fit(args: &FitArgs) -> Result<()> {
    let data = load(&args.data.spec()?)?;
    if !data.has_both_classes() {
        bail!(
            "the outcome has a single class ({} positives of {} rows); nothing to fit",
            data.positives(),
            data.n()
        );
    }
    let cfg = args.pipeline.config()?;
    let (train, test) = if args.no_split {
        (data.clone(), None)
    } else {
        let (tr, te) = logitcmp::split_train_test(&data, cfg.train_frac, args.seed)?;
        (tr, Some(te))
    };
    let methods: Vec<Method> = match args.method {
        FitMethod::All => vec![Method::Lasso, Method::LassoMl, Method::StepMl],
        FitMethod::Lasso => vec![Method::Lasso],
        FitMethod::Lassoml => vec![Method::LassoMl],
        FitMethod::Stepml => vec![Method::StepMl],
        FitMethod::Mle => vec![Method::Mle],
    };

    let lasso = if methods.iter().any(|m| matches!(m, Method::Lasso | Method::LassoMl)) {
        Some(match args.lambda {
            Some(l) => fit_lasso_path_on_grid(&train, &[l], &cfg.path)?.solutions[0].clone(),
            None => fit_lasso_cv(&train, cfg.cv_folds, args.seed, &cfg.path)?.model,
        })
    } else {
        None
    };
    for method in methods {
        let model = match method {
            Method::Lasso => lasso.clone().expect("lasso fitted"),
            Method::LassoMl => refit_support(&train, lasso.as_ref().expect("lasso fitted"), &cfg.irls)?,
            Method::StepMl => fit_stepml(&train, &cfg.stepwise)?,
            Method::Mle => fit_mle(&train, &(0..train.p()).collect::<Vec<_>>(), &cfg.irls)?,
        };
        print_model(&train, &model);
        let train_label = if args.no_split { "all rows" } else { "training" };
        print!("  Gini ({train_label}) {}", fmt_opt(gini_on(&model, &train)));
        if let Some(te) = &test {
            print!("   Gini (test) {}", fmt_opt(gini_on(&model, te)));
        }
        println!();
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Apply(a) => cmd_apply(a),
        Command::Fit(a) => cmd_fit(a),
        Command::Rerun(a) => cmd_rerun(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
