//! The `citekinetics` command line.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 numerical
//! non-convergence. Data goes to `--out` files (or standard output when no
//! file is given); diagnostics go to standard error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{burst_interval, BurstPartition};
use crate::dataio::{
    empirical_ccdf, read_input, read_report, write_counts, write_plot_table, write_report, DatasetSummary, InputFormat,
    PlotTable, ReportDocument,
};
use crate::estimation::{compare_models, fit_model, merge_bins, pearson_test, FitMethod, FitReport, GofConfig, ModelKind};
use crate::model::{hazard, ComponentParams, ModelParams, ProcessingTime};
use crate::numerics::OptimizerConfig;
use crate::synthesis::generate_corpus;
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NONCONVERGENCE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "citekinetics", version, about = "Fit and explore the communication model of citation counts")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit one model to a data file and write a report.
    Fit(FitArgs),
    /// Pearson goodness-of-fit of a stored report against a data file.
    Gof(GofArgs),
    /// Fit several models to one data file and rank them by AIC.
    Compare(CompareArgs),
    /// Draw a synthetic corpus from the citation model.
    Sample(SampleArgs),
    /// Print the burst interval and the class boundaries.
    Burst(BurstArgs),
    /// Tabulate the hazard of one regime's processing time.
    Hazard(HazardArgs),
    /// Export the empirical CCDF, optionally with a model column.
    Ccdf(CcdfArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Counts,
    Hist,
}

impl From<Format> for InputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Counts => InputFormat::Counts,
            Format::Hist => InputFormat::Histogram,
        }
    }
}

#[derive(Debug, Args)]
pub struct InputArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Counts)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct GofFlags {
    #[arg(long, default_value_t = 0.1, value_parser = parse_alpha)]
    pub alpha: f64,
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    pub min_bin_count: u64,
}

impl GofFlags {
    fn config(&self) -> GofConfig {
        GofConfig {
            min_bin_count: self.min_bin_count,
            alpha: self.alpha,
        }
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value = "comm", value_parser = parse_model)]
    pub model: ModelKind,
    /// Defaults to the model's usual method.
    #[arg(long, value_parser = parse_method)]
    pub method: Option<FitMethod>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub gof: GofFlags,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GofArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub report: PathBuf,
    #[command(flatten)]
    pub gof: GofFlags,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Comma-separated model names.
    #[arg(long, value_delimiter = ',', required = true, value_parser = parse_model)]
    pub models: Vec<ModelKind>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub gof: GofFlags,
    /// Directory receiving one report per model.
    #[arg(long)]
    pub report_dir: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// c,mu1,lambda1,mu2,lambda2
    #[arg(long, value_parser = parse_model_params)]
    pub params: ModelParams,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(id = "source", required = true, multiple = false, args = ["report", "params"])]
pub struct BurstArgs {
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// c,mu1,lambda1,mu2,lambda2
    #[arg(long, value_parser = parse_model_params)]
    pub params: Option<ModelParams>,
}

#[derive(Debug, Args)]
pub struct HazardArgs {
    /// mu,lambda
    #[arg(long, value_parser = parse_component)]
    pub params: ComponentParams,
    #[arg(long, value_parser = parse_positive)]
    pub tau_max: f64,
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
    pub points: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CcdfArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Adds the fitted model's CCDF as a third column.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_floats(s: &str, n: usize, what: &str) -> std::result::Result<Vec<f64>, String> {
    let v = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| format!("'{x}' is not a number")))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if v.len() != n {
        return Err(format!("expected {n} comma-separated values ({what}), got {}", v.len()));
    }
    Ok(v)
}

fn parse_model_params(s: &str) -> std::result::Result<ModelParams, String> {
    let v = parse_floats(s, 5, "c,mu1,lambda1,mu2,lambda2")?;
    ModelParams::from_array([v[0], v[1], v[2], v[3], v[4]]).map_err(|e| e.to_string())
}

fn parse_component(s: &str) -> std::result::Result<ComponentParams, String> {
    let v = parse_floats(s, 2, "mu,lambda")?;
    ComponentParams::new(v[0], v[1]).map_err(|e| e.to_string())
}

fn parse_model(s: &str) -> std::result::Result<ModelKind, String> {
    s.parse().map_err(|_| {
        let names: Vec<&str> = ModelKind::ALL.iter().map(|k| k.name()).collect();
        format!("unknown model '{s}' (expected one of {})", names.join(", "))
    })
}

fn parse_method(s: &str) -> std::result::Result<FitMethod, String> {
    s.parse().map_err(|_| format!("unknown method '{s}' (expected mle, chi2 or mse)"))
}

fn parse_alpha(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(a) if a > 0.0 && a < 1.0 => Ok(a),
        _ => Err(format!("alpha must be a number in (0, 1), got '{s}'")),
    }
}

fn parse_positive(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("expected a positive number, got '{s}'")),
    }
}

/// Where a command's data goes.
struct Sink<'a> {
    out: Option<&'a Path>,
    stdout: &'a mut dyn Write,
}

impl Sink<'_> {
    fn text(&mut self, s: &str) -> Result<()> {
        match self.out {
            Some(p) => std::fs::write(p, s).map_err(|e| Error::Io {
                path: p.to_path_buf(),
                source: e,
            }),
            None => self.stdout.write_all(s.as_bytes()).map_err(|e| Error::Io {
                path: "<stdout>".into(),
                source: e,
            }),
        }
    }

    fn table(&mut self, t: &PlotTable) -> Result<()> {
        match self.out {
            Some(p) => write_plot_table(t, p),
            None => self.text(&t.to_tsv()),
        }
    }

    fn report(&mut self, doc: &ReportDocument) -> Result<()> {
        match self.out {
            Some(p) => write_report(doc, p),
            None => self.text(&doc.to_text()),
        }
    }
}

fn optimizer(kind: ModelKind, seed: u64) -> OptimizerConfig {
    OptimizerConfig::for_dimension(kind.n_params()).with_seed(seed)
}

/// Fit, keeping the report of a non-converged run.
fn fit_keep(
    kind: ModelKind,
    h: &crate::Histogram,
    method: FitMethod,
    gof: &GofConfig,
    seed: u64,
) -> Result<FitReport> {
    match fit_model(kind, h, method, gof, &optimizer(kind, seed)) {
        Err(Error::FitNotConverged(r)) => Ok(*r),
        other => other,
    }
}

fn cmd_fit(a: &FitArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let h = read_input(&a.input.input, a.input.format.into())?;
    let dataset = DatasetSummary::of(a.input.input.display().to_string(), &h);
    let _ = writeln!(stderr, "{dataset}");
    let method = a.method.unwrap_or(a.model.default_method());
    let report = fit_keep(a.model, &h, method, &a.gof.config(), a.seed)?;
    let converged = report.converged;
    Sink { out: a.out.as_deref(), stdout }.report(&ReportDocument::new(dataset, report))?;
    if converged {
        Ok(EXIT_OK)
    } else {
        let _ = writeln!(stderr, "warning: the optimizer did not converge; report written with converged = false");
        Ok(EXIT_NONCONVERGENCE)
    }
}

fn cmd_gof(a: &GofArgs, stdout: &mut dyn Write) -> Result<i32> {
    let h = read_input(&a.input.input, a.input.format.into())?;
    let doc = read_report(&a.report)?;
    let dist = doc.fit.params.distribution()?;
    let cfg = a.gof.config();
    let binning = merge_bins(&h, &dist, &cfg)?;
    let g = pearson_test(&binning, doc.fit.n_params, cfg.alpha)?;
    let mut s = String::from("# k_lo\tk_hi\tobserved\texpected\n");
    for c in &binning.cells {
        let hi = c.k_hi.map_or("inf".to_string(), |k| k.to_string());
        let _ = writeln!(s, "{}\t{hi}\t{}\t{:.16e}", c.k_lo, c.observed, c.expected);
    }
    let _ = writeln!(
        s,
        "# chi2 = {:.16e}, dof = {}, p = {:.16e}, alpha = {}, {}",
        g.chi2_stat,
        g.dof,
        g.p_value,
        cfg.alpha,
        if g.reject { "rejected" } else { "not rejected" }
    );
    Sink { out: a.out.as_deref(), stdout }.text(&s)?;
    Ok(EXIT_OK)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or("-".to_string(), |x| format!("{x:.16e}"))
}

fn cmd_compare(a: &CompareArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let mut models: Vec<ModelKind> = Vec::new();
    for &m in &a.models {
        if models.contains(&m) {
            let _ = writeln!(stderr, "warning: model '{m}' listed more than once; fitting it once");
        } else {
            models.push(m);
        }
    }
    if models.len() < 2 {
        return Err(Error::Domain("compare needs at least 2 distinct models".into()));
    }
    let h = read_input(&a.input.input, a.input.format.into())?;
    let dataset = DatasetSummary::of(a.input.input.display().to_string(), &h);
    let _ = writeln!(stderr, "{dataset}");
    if let Some(dir) = &a.report_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io {
            path: dir.clone(),
            source: e,
        })?;
    }
    let gof = a.gof.config();
    let mut reports = Vec::with_capacity(models.len());
    let mut all_converged = true;
    for &m in &models {
        let r = fit_keep(m, &h, m.default_method(), &gof, a.seed)?;
        if !r.converged {
            all_converged = false;
            let _ = writeln!(stderr, "warning: fit of {m} did not converge");
        }
        if let Some(dir) = &a.report_dir {
            write_report(&ReportDocument::new(dataset.clone(), r.clone()), dir.join(format!("{m}.report")))?;
        }
        reports.push(r);
    }
    let ranking = compare_models(&reports)?;
    let mut s = String::from("# rank\tmodel\tmethod\tn_params\tlog_likelihood\taic\tdelta_aic\tbic\tp_value\treject\n");
    for (i, r) in ranking.rows.iter().enumerate() {
        let _ = writeln!(
            s,
            "{}\t{}\t{}\t{}\t{:.16e}\t{:.16e}\t{:.16e}\t{:.16e}\t{}\t{}",
            i + 1,
            r.model_kind,
            r.method,
            r.n_params,
            r.log_likelihood,
            r.aic,
            r.delta_aic,
            r.bic,
            fmt_opt(r.p_value),
            r.reject.map_or("-".to_string(), |b| b.to_string())
        );
    }
    Sink { out: a.out.as_deref(), stdout }.text(&s)?;
    Ok(if all_converged { EXIT_OK } else { EXIT_NONCONVERGENCE })
}

fn cmd_sample(a: &SampleArgs, stdout: &mut dyn Write) -> Result<i32> {
    let corpus = generate_corpus(&a.params, a.n, a.seed)?;
    match &a.out {
        Some(p) => write_counts(&corpus.counts, p)?,
        None => {
            let mut s = String::with_capacity(corpus.counts.len() * 4);
            for k in &corpus.counts {
                let _ = writeln!(s, "{k}");
            }
            Sink { out: None, stdout }.text(&s)?;
        }
    }
    Ok(EXIT_OK)
}

/// Text printed by the `burst` command.
pub fn format_burst(p: &BurstPartition) -> String {
    let mut s = String::new();
    match p.interval {
        None => {
            s.push_str("burst interval: empty (the repeated-citation regime never dominates)\n");
            s.push_str("all papers: not_acknowledged\n");
        }
        Some(iv) => {
            let _ = writeln!(s, "burst interval: {p}");
            let _ = writeln!(s, "k_lo = {}", iv.k_lo);
            let _ = writeln!(s, "k_hi = {}", iv.k_hi.map_or("inf".to_string(), |k| k.to_string()));
            if iv.k_lo > 1 {
                let _ = writeln!(s, "not_acknowledged: 1 <= k <= {}", iv.k_lo - 1);
            }
            match iv.k_hi {
                Some(hi) => {
                    let _ = writeln!(s, "burst: {} <= k <= {hi}", iv.k_lo);
                    let _ = writeln!(s, "classic: k >= {}", hi + 1);
                }
                None => {
                    let _ = writeln!(s, "burst: k >= {}", iv.k_lo);
                }
            }
            if p.multiple {
                s.push_str("note: the dominance condition holds on several disjoint ranges; the widest is shown\n");
            }
        }
    }
    s
}

fn cmd_burst(a: &BurstArgs, stdout: &mut dyn Write) -> Result<i32> {
    let params = match (&a.report, &a.params) {
        (Some(path), _) => {
            let doc = read_report(path)?;
            *doc.fit.params.comm().ok_or_else(|| {
                Error::Domain(format!(
                    "{}: burst intervals need a comm report, found {}",
                    path.display(),
                    doc.fit.model_kind
                ))
            })?
        }
        (None, Some(p)) => *p,
        (None, None) => unreachable!("clap requires one source"),
    };
    Sink { out: None, stdout }.text(&format_burst(&burst_interval(&params)))?;
    Ok(EXIT_OK)
}

/// Hazard table on `τ_i = τ_max · i / points`. Points whose survival cannot
/// be resolved become non-finite rows, which the writer drops.
pub fn hazard_table(p: &ComponentParams, tau_max: f64, points: u64) -> Result<PlotTable> {
    let e = p.mean_time();
    let mut t = PlotTable::new(vec!["tau".into(), "h".into(), "tau_over_mean".into(), "h_times_mean".into()]);
    for i in 1..=points {
        let tau = tau_max * i as f64 / points as f64;
        let h = match hazard(p, ProcessingTime::new(tau)?) {
            Ok(h) => h,
            Err(Error::SurvivalUnderflow { .. }) => f64::NAN,
            Err(e) => return Err(e),
        };
        t.push(vec![tau, h, tau / e, h * e])?;
    }
    Ok(t)
}

fn cmd_hazard(a: &HazardArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let t = hazard_table(&a.params, a.tau_max, a.points)?;
    let bad = t.rows.iter().filter(|r| !r[1].is_finite()).count();
    if bad > 0 {
        let _ = writeln!(
            stderr,
            "warning: {bad} points beyond tau = {:e} dropped (survival too small to resolve)",
            crate::model::largest_safe_tau(&a.params)
        );
    }
    Sink { out: a.out.as_deref(), stdout }.table(&t)?;
    Ok(EXIT_OK)
}

fn cmd_ccdf(a: &CcdfArgs, stdout: &mut dyn Write) -> Result<i32> {
    let h = read_input(&a.input.input, a.input.format.into())?;
    let mut table = empirical_ccdf(&h)?;
    if let Some(r) = &a.report {
        let dist = read_report(r)?.fit.params.distribution()?;
        table = table.with_model(&dist);
    }
    Sink { out: a.out.as_deref(), stdout }.table(&table.to_plot_table())?;
    Ok(EXIT_OK)
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::FitNotConverged(_) | Error::Convergence { .. } => EXIT_NONCONVERGENCE,
        _ => EXIT_USAGE,
    }
}

/// Usage line of the subcommand named in `args`, or of the whole tool.
fn usage_for(args: &[OsString]) -> String {
    use clap::CommandFactory;
    let mut cmd = Cli::command();
    cmd.build();
    let name = args.get(1).and_then(|a| a.to_str()).unwrap_or("");
    match cmd.find_subcommand_mut(name) {
        Some(sub) => sub.render_usage().to_string(),
        None => cmd.render_usage().to_string(),
    }
}

/// Parse `args` (including the program name) and run one command.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                if !text.contains("Usage:") {
                    let _ = writeln!(stderr, "\n{}", usage_for(&args));
                }
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_OK
            };
        }
    };
    let result = match &cli.command {
        Command::Fit(a) => cmd_fit(a, stdout, stderr),
        Command::Gof(a) => cmd_gof(a, stdout),
        Command::Compare(a) => cmd_compare(a, stdout, stderr),
        Command::Sample(a) => cmd_sample(a, stdout),
        Command::Burst(a) => cmd_burst(a, stdout),
        Command::Hazard(a) => cmd_hazard(a, stdout, stderr),
        Command::Ccdf(a) => cmd_ccdf(a, stdout),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Entry point of the binary.
pub fn run() -> i32 {
    let mut out = std::io::stdout().lock();
    let mut err = std::io::stderr().lock();
    run_with(std::env::args_os(), &mut out, &mut err)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_with(std::iter::once("citekinetics").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run_capture(&[]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["frobnicate"]).0, EXIT_USAGE);
        let (code, _, err) = run_capture(&["fit", "--input", "x", "--model", "powerlaw"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("unknown model"));
        assert_eq!(run_capture(&["sample", "--params", "0.7,2,1,50", "--n", "5"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["sample", "--params", "1.5,2,1,50,0.5", "--n", "5"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["burst"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["burst", "--params", "1,2,1,2,1", "--report", "r"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["fit", "--input", "x", "--alpha", "1.5"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["hazard", "--params", "2,1", "--tau-max", "0"]).0, EXIT_USAGE);
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, EXIT_OK);
        for c in ["fit", "gof", "compare", "sample", "burst", "hazard", "ccdf"] {
            assert!(out.contains(c), "{c}");
        }
    }

    #[test]
    fn sample_to_stdout_is_deterministic() {
        let a = run_capture(&["sample", "--params", "0.7,2,1,50,0.5", "--n", "100", "--seed", "3"]);
        let b = run_capture(&["sample", "--params", "0.7,2,1,50,0.5", "--n", "100", "--seed", "3"]);
        assert_eq!(a.0, EXIT_OK);
        assert_eq!(a.1, b.1);
        assert_eq!(a.1.lines().count(), 100);
        let (code, _, err) = run_capture(&["sample", "--params", "0.7,2,1,50,0.5", "--n", "0"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.starts_with("error:"));
    }

    #[test]
    fn burst_prints_boundaries() {
        let (code, out, _) = run_capture(&["burst", "--params", "1,2,1,50,0.5"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("empty"));
        let m = ModelParams::from_array([0.7, 2.0, 1.0, 50.0, 0.5]).unwrap();
        let (_, out, _) = run_capture(&["burst", "--params", "0.7,2,1,50,0.5"]);
        assert_eq!(out, format_burst(&burst_interval(&m)));
        assert!(out.contains("k_lo = "));
    }

    #[test]
    fn hazard_matches_curve_on_safe_points() {
        let p = ComponentParams::new(2.0, 1.0).unwrap();
        let t = hazard_table(&p, 20.0, 40).unwrap();
        let grid: Vec<f64> = t.rows.iter().map(|r| r[0]).collect();
        let c = crate::analysis::hazard_curve(&p, &grid).unwrap();
        for (row, &(tau, h)) in t.rows.iter().zip(&c.points) {
            assert_eq!((row[0], row[1]), (tau, h));
            assert_eq!(row[2], tau / 2.0);
            assert_eq!(row[3], h * 2.0);
        }
        let far = hazard_table(&p, 1e6, 10).unwrap();
        assert!(far.rows.iter().any(|r| r[1].is_nan()));
        assert!(far.to_tsv().contains("# dropped"));
    }
}
