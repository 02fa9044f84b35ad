use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use tubegeo::{
    build_candidate, catalog, expansion_fits, run_suite, tube_profile_table, CaseSpec, CatalogOptions, CheckResult,
    Error, IsoparametricCandidate, Suite, SuiteOptions, VerificationReport,
};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "tubegeo", version, about = "Tube shape operators and focal-variety verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Catalog operations.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Run a verification suite on one catalog case and write a report.
    Verify(RunArgs),
    /// Write the tube shape profile along one ray as CSV (or JSON).
    TubeProfile(RunArgs),
    /// Check the small-t expansions of the Fermi metric and shape operator.
    MetricExpansion(RunArgs),
}

#[derive(Subcommand, Debug)]
enum CatalogAction {
    /// One line per catalog entry with its focal dimensions and gate status.
    List {
        /// Keep entries whose label contains this substring.
        #[arg(long = "match")]
        pattern: Option<String>,
        #[arg(long, hide = true)]
        perturb_cartan: Option<f64>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Default)]
struct RunArgs {
    /// Catalog case name, e.g. `sn-clifford` or `sn-clifford(1,2)`.
    #[arg(long)]
    case: Option<String>,
    #[arg(long)]
    suite: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    q: Option<usize>,
    /// Base points per focal variety.
    #[arg(long)]
    base: Option<usize>,
    /// Normal directions per base point.
    #[arg(long)]
    dirs: Option<usize>,
    #[arg(long)]
    t_min: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    /// Series seed time of the Riccati integration.
    #[arg(long)]
    t0: Option<f64>,
    /// Maximal integrator step.
    #[arg(long)]
    step: Option<f64>,
    /// Integrator error tolerance per step.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// JSON file with any of the above keys; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, hide = true)]
    perturb_cartan: Option<f64>,
}

/// Keys accepted in a `--config` file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct FileConfig {
    case: Option<String>,
    suite: Option<String>,
    n: Option<usize>,
    p: Option<usize>,
    q: Option<usize>,
    base: Option<usize>,
    dirs: Option<usize>,
    t_min: Option<f64>,
    t_max: Option<f64>,
    steps: Option<usize>,
    t0: Option<f64>,
    step: Option<f64>,
    tol: Option<f64>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    format: Option<Format>,
    /// Check tolerance overrides keyed by check-name prefix.
    #[serde(default)]
    tolerances: BTreeMap<String, f64>,
}

/// Flags merged over the config file over built-in defaults.
#[derive(Debug)]
struct RunConfig {
    spec: CaseSpec,
    suite: Option<Suite>,
    options: SuiteOptions,
    out: Option<PathBuf>,
    format: Option<Format>,
    perturb_cartan: Option<f64>,
}

/// A usage problem: exit code 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

/// Split `name(a,b)` into the name and its size arguments.
fn parse_case(raw: &str) -> anyhow::Result<(String, Vec<usize>)> {
    let Some((name, rest)) = raw.split_once('(') else {
        return Ok((raw.to_string(), Vec::new()));
    };
    let inner = rest.strip_suffix(')').ok_or_else(|| usage(format!("malformed case label {raw}")))?;
    let args = inner
        .split(',')
        .map(|s| s.trim().parse::<usize>().map_err(|_| usage(format!("malformed case label {raw}"))))
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok((name.to_string(), args))
}

impl RunConfig {
    fn resolve(args: RunArgs) -> anyhow::Result<RunConfig> {
        let file: FileConfig = match &args.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
                serde_json::from_str(&text).map_err(|e| usage(format!("bad config {}: {e}", path.display())))?
            }
            None => FileConfig::default(),
        };
        let raw_case = args.case.or(file.case).ok_or_else(|| usage("--case is required"))?;
        let (name, sizes) = parse_case(&raw_case)?;
        let (mut n, mut p, mut q) = (args.n.or(file.n), args.p.or(file.p), args.q.or(file.q));
        match (name.as_str(), sizes.as_slice()) {
            (_, []) => {}
            ("sn-clifford", [a, b]) => {
                p = p.or(Some(*a));
                q = q.or(Some(*b));
            }
            (_, [a]) => n = n.or(Some(*a)),
            _ => return Err(usage(format!("malformed case label {raw_case}"))),
        }
        let spec = CaseSpec::from_parts(&name, n, p, q).map_err(|e| usage(e.to_string()))?;
        let suite = match args.suite.or(file.suite) {
            Some(s) => Some(Suite::parse(&s).ok_or_else(|| usage(format!("unknown suite {s}")))?),
            None => None,
        };
        let d = SuiteOptions::default();
        let options = SuiteOptions {
            n_base: args.base.or(file.base).unwrap_or(d.n_base),
            n_dirs: args.dirs.or(file.dirs).unwrap_or(d.n_dirs),
            seed: args.seed.or(file.seed).unwrap_or(d.seed),
            t0: args.t0.or(file.t0).unwrap_or(d.t0),
            step: args.step.or(file.step).unwrap_or(d.step),
            tol: args.tol.or(file.tol).unwrap_or(d.tol),
            t_min: args.t_min.or(file.t_min),
            t_max: args.t_max.or(file.t_max),
            steps: args.steps.or(file.steps).unwrap_or(d.steps),
            tolerances: file.tolerances,
            ..d
        };
        let positive = [("t0", options.t0), ("step", options.step), ("tol", options.tol)];
        if let Some((k, v)) = positive.iter().find(|(_, v)| !(*v > 0.0)) {
            return Err(usage(format!("--{k} must be positive, got {v}")));
        }
        if let Some((k, v)) = options.tolerances.iter().find(|(_, v)| !(**v > 0.0)) {
            return Err(usage(format!("tolerance override {k} must be positive, got {v}")));
        }
        if options.n_base == 0 || options.n_dirs == 0 {
            return Err(usage("--base and --dirs must be at least 1"));
        }
        Ok(RunConfig {
            spec,
            suite,
            options,
            out: args.out.or(file.out),
            format: args.format.or(file.format),
            perturb_cartan: args.perturb_cartan,
        })
    }

    fn candidate(&self) -> anyhow::Result<IsoparametricCandidate> {
        let opts = CatalogOptions {
            perturb_cartan: self.perturb_cartan.unwrap_or(0.0),
            ..CatalogOptions::default()
        };
        Ok(build_candidate(self.spec, &opts)?)
    }
}

fn timestamp() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

/// `--out`, or a fresh `case-suite-timestamp.ext` name that never overwrites.
fn output_path(out: &Option<PathBuf>, case: &str, suite: &str, ext: &str) -> PathBuf {
    if let Some(p) = out {
        return p.clone();
    }
    let slug: String = case
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
        .collect();
    let stem = format!("{slug}-{suite}-{}", timestamp());
    let mut path = PathBuf::from(format!("{stem}.{ext}"));
    let mut k = 1;
    while path.exists() {
        path = PathBuf::from(format!("{stem}-{k}.{ext}"));
        k += 1;
    }
    path
}

fn write_file(path: &Path, text: &str) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn reports_json(reports: &[VerificationReport]) -> anyhow::Result<String> {
    let mut s = match reports {
        [one] => serde_json::to_string_pretty(one)?,
        many => serde_json::to_string_pretty(many)?,
    };
    s.push('\n');
    Ok(s)
}

fn checks_csv(reports: &[VerificationReport]) -> String {
    let mut s = String::from("suite,check,statistic,tolerance,pass\n");
    for r in reports {
        for c in &r.checks {
            let _ = writeln!(
                s,
                "{},\"{}\",{:.16e},{:.16e},{}",
                r.suite,
                c.name.replace('"', "'"),
                c.statistic,
                c.tolerance,
                c.pass
            );
        }
    }
    s
}

/// A report standing in for a suite that refused to run a gated-out case.
fn gate_report(c: &IsoparametricCandidate, suite: &str, opts: &SuiteOptions) -> VerificationReport {
    let mut r = VerificationReport::new(&c.label, suite, "admission gates", opts.provenance(c));
    for g in &c.gates {
        r.check(CheckResult::holds(format!("gate {}", g.gate), g.passed));
    }
    r.note("case refused: an admission gate failed");
    r
}

fn emit_reports(cfg: &RunConfig, c: &IsoparametricCandidate, suite: &str, reports: &[VerificationReport]) -> anyhow::Result<u8> {
    let (ext, text) = match cfg.format.unwrap_or(Format::Json) {
        Format::Json => ("json", reports_json(reports)?),
        Format::Csv => ("csv", checks_csv(reports)),
    };
    let path = output_path(&cfg.out, &c.label, suite, ext);
    write_file(&path, &text)?;
    let pass = reports.iter().all(|r| r.pass);
    for r in reports {
        println!("{}  {}  {}", r.case, r.suite, if r.pass { "PASS" } else { "FAIL" });
        for f in r.failed_checks() {
            println!("    {}: {:e} (tolerance {:e})", f.name, f.statistic, f.tolerance);
        }
    }
    println!("report: {}", path.display());
    Ok(if pass { 0 } else { EXIT_FAIL })
}

fn cmd_catalog_list(pattern: Option<String>, perturb_cartan: Option<f64>) -> anyhow::Result<u8> {
    let opts = CatalogOptions {
        perturb_cartan: perturb_cartan.unwrap_or(0.0),
        ..CatalogOptions::default()
    };
    for c in catalog(&opts)? {
        if pattern.as_deref().is_none_or(|p| c.label.contains(p)) {
            println!("{}", c.listing());
        }
    }
    Ok(0)
}

fn cmd_verify(args: RunArgs) -> anyhow::Result<u8> {
    let cfg = RunConfig::resolve(args)?;
    let suite = cfg.suite.ok_or_else(|| usage("--suite is required"))?;
    let c = cfg.candidate()?;
    if !c.admitted() {
        let r = gate_report(&c, suite.name(), &cfg.options);
        return emit_reports(&cfg, &c, suite.name(), &[r]);
    }
    let reports = run_suite(&c, suite, &cfg.options)?;
    emit_reports(&cfg, &c, suite.name(), &reports)
}

fn cmd_tube_profile(args: RunArgs) -> anyhow::Result<u8> {
    let cfg = RunConfig::resolve(args)?;
    let c = cfg.candidate()?;
    if !c.admitted() {
        let r = gate_report(&c, "tube-profile", &cfg.options);
        return emit_reports(&cfg, &c, "tube-profile", &[r]);
    }
    let table = tube_profile_table(&c, &cfg.options)?;
    if let Some(t) = table.focal_t {
        return Err(Error::StepFailure {
            t,
            estimate: f64::INFINITY,
        }
        .into());
    }
    let text = match cfg.format.unwrap_or(Format::Csv) {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&table)?),
        Format::Csv => {
            let k = table.rows.first().map_or(0, |r| r.2.len());
            let mut s = String::from("t,H");
            for i in 1..=k {
                let _ = write!(s, ",lambda_{i}");
            }
            s.push_str(",riccati_residual\n");
            for (t, h, lambdas, resid) in &table.rows {
                let _ = write!(s, "{t:.16e},{h:.16e}");
                for l in lambdas {
                    let _ = write!(s, ",{l:.16e}");
                }
                let _ = writeln!(s, ",{resid:.16e}");
            }
            s
        }
    };
    let ext = if cfg.format == Some(Format::Json) { "json" } else { "csv" };
    let path = output_path(&cfg.out, &c.label, "tube-profile", ext);
    write_file(&path, &text)?;
    println!("{}  tube-profile  {} rows", c.label, table.rows.len());
    println!("profile: {}", path.display());
    Ok(0)
}

fn cmd_metric_expansion(args: RunArgs) -> anyhow::Result<u8> {
    let cfg = RunConfig::resolve(args)?;
    let c = cfg.candidate()?;
    if !c.admitted() {
        let r = gate_report(&c, "metric-expansion", &cfg.options);
        return emit_reports(&cfg, &c, "metric-expansion", &[r]);
    }
    if cfg.format == Some(Format::Csv) {
        let mut s = String::from("patch,ray,expansion,t,remainder\n");
        for f in expansion_fits(&c, &cfg.options)? {
            for (what, fit) in [("metric", &f.metric), ("series", &f.series)] {
                for (t, rem) in &fit.points {
                    let _ = writeln!(s, "{},{},{what},{t:.16e},{rem:.16e}", f.patch, f.ray);
                }
            }
        }
        let path = output_path(&cfg.out, &c.label, "metric-expansion", "csv");
        write_file(&path, &s)?;
        println!("remainders: {}", path.display());
        return Ok(0);
    }
    let reports = run_suite(&c, Suite::MetricExpansion, &cfg.options)?;
    emit_reports(&cfg, &c, "metric-expansion", &reports)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Usage>().is_some() {
        return EXIT_USAGE;
    }
    match err.downcast_ref::<Error>() {
        Some(Error::InvalidInput(_) | Error::UnknownCase(_)) => EXIT_USAGE,
        Some(Error::GateFailed { .. }) => EXIT_FAIL,
        Some(_) => EXIT_NUMERIC,
        // I/O and serialization failures
        None => EXIT_NUMERIC,
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("TUBEGEO_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let result = match cli.command {
        Command::Catalog {
            action: CatalogAction::List { pattern, perturb_cartan },
        } => cmd_catalog_list(pattern, perturb_cartan),
        Command::Verify(a) => cmd_verify(a),
        Command::TubeProfile(a) => cmd_tube_profile(a),
        Command::MetricExpansion(a) => cmd_metric_expansion(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
