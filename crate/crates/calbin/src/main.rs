//! Command-line front end.
//!
//! Exit codes: 0 success, 2 usage error, 3 data error, 4 computation error.
//! Payloads go to stdout (or to files under `--out`); human-readable
//! summaries go to stderr. Stored metric values are always fractions;
//! `--percent` only changes the stderr summary.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use calbin::{
    calibration_report, default_grid, expected_ence_chi, expected_ence_quadrature, load_csv,
    mad_binned_means, make_binning, mc_ence_realizations, streams, write_diagram_csv,
    write_expected_csv, write_realizations_csv, write_scan_csv, Dataset, Error, InputSpec, Metric,
    MetricSelection, ReportConfig, Result, RngStream, Schema, SimSpec, ZVarMode,
};

#[derive(Parser)]
#[command(
    name = "calbin",
    version,
    about = "Calibration error metrics for regression uncertainty datasets, \
             with binning-independent estimates from a bin-count sweep"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute ENCE and ZVE at a single bin count.
    Compute(ComputeArgs),
    /// Sweep the bin count, fit the metric against sqrt(N), and report the
    /// intercept-based calibration estimate and test.
    Scan(ScanArgs),
    /// Emit the reliability diagram (per-bin RMV vs RMSE) at a bin count.
    Diag(DiagArgs),
    /// Synthetic studies with known ground truth.
    #[command(subcommand)]
    Simulate(SimulateCommand),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchemaArg {
    /// Columns E,u.
    Eu,
    /// Columns R,V,uV; loaded as E = R - V, u = uV.
    Rvu,
}

impl From<SchemaArg> for Schema {
    fn from(s: SchemaArg) -> Self {
        match s {
            SchemaArg::Eu => Schema::Eu,
            SchemaArg::Rvu => Schema::Rvu,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ZVarArg {
    /// Mean-subtracted unbiased sample variance.
    Sample,
    /// Second moment about zero.
    ZeroMean,
}

impl From<ZVarArg> for ZVarMode {
    fn from(z: ZVarArg) -> Self {
        match z {
            ZVarArg::Sample => ZVarMode::Sample,
            ZVarArg::ZeroMean => ZVarMode::ZeroMean,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MetricArg {
    Ence,
    Zve,
    Both,
}

impl From<MetricArg> for MetricSelection {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Ence => MetricSelection::Ence,
            MetricArg::Zve => MetricSelection::Zve,
            MetricArg::Both => MetricSelection::Both,
        }
    }
}

#[derive(Args)]
struct InputArgs {
    /// Input file with a header row.
    #[arg(long)]
    input: PathBuf,
    /// Column layout of the input file.
    #[arg(long, value_enum, default_value = "eu")]
    schema: SchemaArg,
    /// Field delimiter.
    #[arg(long, default_value = ",")]
    delimiter: char,
}

impl InputArgs {
    fn load(&self) -> Result<Dataset> {
        let mut buf = [0u8; 4];
        let d = self.delimiter.encode_utf8(&mut buf).as_bytes();
        if d.len() != 1 {
            return Err(Error::Param {
                module: "cli-io",
                reason: "delimiter must be a single-byte character".into(),
            });
        }
        load_csv(&InputSpec::new(&self.input, self.schema.into()).with_delimiter(d[0]))
    }
}

#[derive(Args)]
struct ComputeArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Bin count.
    #[arg(long)]
    bins: usize,
    #[arg(long, value_enum, default_value = "both")]
    metric: MetricArg,
    #[arg(long, value_enum, default_value = "sample")]
    zvar: ZVarArg,
    /// Present metric values as percentages in the summary.
    #[arg(long)]
    percent: bool,
    /// Directory for output files; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value = "both")]
    metric: MetricArg,
    /// Smallest admissible bin size for the default grid.
    #[arg(long, default_value_t = 30)]
    min_bin_size: usize,
    /// Explicit comma-separated bin counts (overrides the default grid).
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<usize>>,
    /// Fit threshold in sqrt(N) units; only points strictly above it are
    /// fitted.
    #[arg(long, default_value_t = 0.0)]
    fit_threshold: f64,
    #[arg(long, value_enum, default_value = "sample")]
    zvar: ZVarArg,
    /// Bin count for the reliability diagram embedded in the report.
    #[arg(long)]
    bins: Option<usize>,
    /// Present metric values as percentages in the summary.
    #[arg(long)]
    percent: bool,
    /// Seed echoed into the report (scans are deterministic).
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for report.json and series CSVs; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DiagArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Bin count.
    #[arg(long)]
    bins: usize,
    /// Directory for diagram.csv; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum SimulateCommand {
    /// Expected metric curves for homoscedastic normal errors, plus full
    /// Monte Carlo realizations of the estimation pipeline.
    Curves(CurvesArgs),
    /// Monte Carlo vs closed-form mean absolute deviation of binned means.
    Mad(MadArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExpectedMethod {
    /// Sample the scaled chi distribution of the per-bin RMSE.
    ChiMc,
    /// Deterministic quadrature against the chi density.
    Quadrature,
}

#[derive(Args)]
struct CurvesArgs {
    /// Dataset size.
    #[arg(long, default_value_t = 5000)]
    m: usize,
    /// Claimed homoscedastic uncertainties (true error scale is 1).
    #[arg(long, value_delimiter = ',', default_value = "1,1.05,1.1,1.15,1.2,1.25")]
    factors: Vec<f64>,
    /// Explicit comma-separated bin counts (default: sweep grid derived
    /// from --min-bin-size).
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<usize>>,
    #[arg(long, default_value_t = 30)]
    min_bin_size: usize,
    /// Chi draws per bin for the expected curves.
    #[arg(long, default_value_t = 100_000)]
    draws: usize,
    /// Monte Carlo realizations of the full pipeline (0 to skip).
    #[arg(long, default_value_t = 50)]
    realizations: usize,
    /// Claimed uncertainty used for the realizations.
    #[arg(long, default_value_t = 1.0)]
    realization_factor: f64,
    #[arg(long, value_enum, default_value = "chi-mc")]
    method: ExpectedMethod,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory (required: this command emits several files).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct MadArgs {
    /// Scale of the zero-centered normal draws.
    #[arg(long, default_value_t = 1.0)]
    ux: f64,
    /// Sample size.
    #[arg(long, default_value_t = 10_000)]
    m: usize,
    /// Comma-separated bin counts.
    #[arg(long, value_delimiter = ',', default_value = "25,100,400")]
    bins: Vec<usize>,
    #[arg(long, default_value_t = 200)]
    realizations: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for mad.csv; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Compute(args) => cmd_compute(args),
        Command::Scan(args) => cmd_scan(args),
        Command::Diag(args) => cmd_diag(args),
        Command::Simulate(SimulateCommand::Curves(args)) => cmd_simulate_curves(args),
        Command::Simulate(SimulateCommand::Mad(args)) => cmd_simulate_mad(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

fn emit(out: &Option<PathBuf>, name: &str, payload: &[u8]) -> Result<()> {
    match out {
        Some(dir) => {
            ensure_dir(dir)?;
            fs::write(dir.join(name), payload)?;
        }
        None => {
            std::io::stdout().write_all(payload)?;
        }
    }
    Ok(())
}

fn fmt_metric(value: f64, percent: bool) -> String {
    if percent {
        format!("{:.3}%", 100.0 * value)
    } else {
        format!("{value:.5}")
    }
}

fn cmd_compute(args: ComputeArgs) -> Result<()> {
    let dataset = args.input.load()?;
    let binning = make_binning(&dataset, args.bins)?;
    let stats = calbin::bin_stats(&dataset, &binning, args.zvar.into())?;
    let selection: MetricSelection = args.metric.into();
    let ence = selection
        .includes(Metric::Ence)
        .then(|| calbin::ence(&stats))
        .transpose()?;
    let zve = selection
        .includes(Metric::Zve)
        .then(|| calbin::zve(&stats))
        .transpose()?;

    #[derive(serde::Serialize)]
    struct ComputeOutput {
        version: &'static str,
        input: String,
        bins: usize,
        dataset: calbin::DatasetSummary,
        ence: Option<f64>,
        zve: Option<f64>,
    }
    let output = ComputeOutput {
        version: env!("CARGO_PKG_VERSION"),
        input: args.input.input.display().to_string(),
        bins: args.bins,
        dataset: calbin::DatasetSummary::of(&dataset),
        ence,
        zve,
    };
    let mut payload = serde_json::to_vec_pretty(&output).expect("serializable");
    payload.push(b'\n');
    emit(&args.out, "compute.json", &payload)?;

    if let Some(v) = ence {
        eprintln!("ence({} bins) = {}", args.bins, fmt_metric(v, args.percent));
    }
    if let Some(v) = zve {
        // ZVE itself is a ratio >= 1; only its excess over 1 is a fraction.
        eprintln!("zve({} bins) = {v:.5}", args.bins);
        eprintln!("zve - 1      = {}", fmt_metric(v - 1.0, args.percent));
    }
    Ok(())
}

fn cmd_scan(args: ScanArgs) -> Result<()> {
    let dataset = args.input.load()?;
    let config = ReportConfig {
        input: Some(args.input.input.display().to_string()),
        schema: Some(args.input.schema.into()),
        metric: args.metric.into(),
        min_bin_size: args.min_bin_size,
        grid: args.grid.clone(),
        fit_threshold: args.fit_threshold,
        zvar_mode: args.zvar.into(),
        diagram_bins: args.bins,
        percent: args.percent,
        seed: args.seed,
    };
    let report = calibration_report(&dataset, &config)?;

    let mut payload = serde_json::to_vec_pretty(&report).expect("serializable");
    payload.push(b'\n');
    emit(&args.out, "report.json", &payload)?;
    if let Some(dir) = &args.out {
        for section in [&report.ence, &report.zve].into_iter().flatten() {
            let mut buf = Vec::new();
            write_scan_csv(&mut buf, &section.series)?;
            fs::write(dir.join(format!("scan_{}.csv", section.series.metric)), buf)?;
        }
        let mut buf = Vec::new();
        write_diagram_csv(&mut buf, &report.diagram)?;
        fs::write(dir.join("diagram.csv"), buf)?;
    }

    for section in [&report.ence, &report.zve].into_iter().flatten() {
        let fit = &section.fit;
        // The ENCE intercept is a fraction; the ZVE intercept is a ratio
        // near 1, so only its residual gets the percent treatment.
        let percent = args.percent && section.series.metric == Metric::Ence;
        eprintln!(
            "{}: intercept {} (95% CI {} .. {}), slope {:.5}/sqrt(N), {}",
            section.series.metric,
            fmt_metric(fit.intercept, percent),
            fmt_metric(fit.intercept_ci.0, percent),
            fmt_metric(fit.intercept_ci.1, percent),
            fit.slope,
            if fit.calibrated {
                "consistent with calibration"
            } else {
                "miscalibrated"
            }
        );
        eprintln!(
            "{}: residual calibration error {}",
            section.series.metric,
            fmt_metric(fit.residual_error, args.percent)
        );
    }
    Ok(())
}

fn cmd_diag(args: DiagArgs) -> Result<()> {
    let dataset = args.input.load()?;
    let binning = make_binning(&dataset, args.bins)?;
    let stats = calbin::bin_stats(&dataset, &binning, ZVarMode::Sample)?;
    let points = calbin::reliability_diagram(&stats);
    let mut buf = Vec::new();
    write_diagram_csv(&mut buf, &points)?;
    emit(&args.out, "diagram.csv", &buf)?;
    eprintln!("{} diagram points", points.len());
    Ok(())
}

fn cmd_simulate_curves(args: CurvesArgs) -> Result<()> {
    if args.factors.is_empty() {
        return Err(Error::Param {
            module: "cli-io",
            reason: "need at least one factor".into(),
        });
    }
    let grid = match &args.grid {
        Some(g) => {
            let mut g = g.clone();
            g.sort_unstable();
            g.dedup();
            g
        }
        None => {
            let mb = (args.m / args.min_bin_size).min(args.m);
            if mb < 1 {
                return Err(Error::Param {
                    module: "cli-io",
                    reason: format!(
                        "m = {} cannot form bins of at least {} points",
                        args.m, args.min_bin_size
                    ),
                });
            }
            default_grid(mb)
        }
    };

    // Expected curves: one stream per factor, so adding a factor does not
    // shift the others.
    let mut expected_rows: Vec<(f64, usize, f64)> = Vec::new();
    for (fi, &factor) in args.factors.iter().enumerate() {
        let mut rng = RngStream::new(args.seed, streams::EXPECTED_BASE + fi as u64).rng();
        for &n in &grid {
            let value = match args.method {
                ExpectedMethod::ChiMc => {
                    expected_ence_chi(args.m, n, factor, args.draws, &mut rng)?
                }
                ExpectedMethod::Quadrature => {
                    expected_ence_quadrature((args.m / n) as u64, factor)?
                }
            };
            expected_rows.push((factor, n, value));
        }
    }

    ensure_dir(&args.out)?;
    let mut buf = Vec::new();
    write_expected_csv(&mut buf, &expected_rows)?;
    fs::write(args.out.join("expected.csv"), buf)?;

    if args.realizations > 0 {
        let spec = SimSpec {
            m: args.m,
            factor: args.realization_factor,
            grid: grid.clone(),
            draws: 1,
            realizations: args.realizations,
            seed: args.seed,
        };
        let points = mc_ence_realizations(&spec)?;
        let mut buf = Vec::new();
        write_realizations_csv(&mut buf, &points)?;
        fs::write(args.out.join("realizations.csv"), buf)?;
    }

    eprintln!(
        "wrote expected curves for {} factors over {} bin counts to {}",
        args.factors.len(),
        grid.len(),
        args.out.display()
    );
    Ok(())
}

fn cmd_simulate_mad(args: MadArgs) -> Result<()> {
    let mut rows = Vec::new();
    for (bi, &n) in args.bins.iter().enumerate() {
        let mut rng = RngStream::new(args.seed, streams::MAD_BASE + bi as u64).rng();
        let cmp = mad_binned_means(args.ux, args.m, n, args.realizations, &mut rng)?;
        rows.push((n, cmp));
    }
    let mut buf = Vec::new();
    writeln!(buf, "n,mc,closed_form,ratio")?;
    for (n, cmp) in &rows {
        writeln!(
            buf,
            "{},{},{},{}",
            n,
            cmp.mc,
            cmp.closed_form,
            cmp.mc / cmp.closed_form
        )?;
    }
    emit(&args.out, "mad.csv", &buf)?;
    for (n, cmp) in &rows {
        eprintln!(
            "n={}: mc {:.6} vs closed form {:.6} (ratio {:.4})",
            n,
            cmp.mc,
            cmp.closed_form,
            cmp.mc / cmp.closed_form
        );
    }
    Ok(())
}
