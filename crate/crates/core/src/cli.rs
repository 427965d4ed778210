//! `poncelet` command-line front end.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::centers::{default_registry, CenterRegistry, Derived};
use crate::conic::{AxisEllipse, ConicPair, Family, Point2, QuarticImplicit};
use crate::error::GeometryError;
use crate::invariants::{
    homothetic_brocard_angle, sweep, sweep_all, sweep_parameters, Invariant,
};
use crate::loci::{
    conjecture1_batch, locus_table_with, ratio_grid, spot_checks, table1_centers, verify_locus_with,
    x16_radius_scan, LocusFit, LocusKind, Normalization, TableColumn, CONJECTURE_SEED,
    DEFAULT_SAMPLES,
};
use crate::orbits::{family_polygon, tune_caustic_for_closure};
use crate::transforms::{
    affine_certificate_i, affine_certificate_ii, group_isolation_check, observations,
    rotation_certificate_i, rotation_certificate_ii, similarity_certificate_iii, Certificate,
};
use crate::triangle::Triangle;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("degenerate data: {0}")]
    Degenerate(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Degenerate(_) => EXIT_DEGENERATE,
        }
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        match e {
            GeometryError::Domain(_)
            | GeometryError::DegenerateParameter(_)
            | GeometryError::UnknownCenter(_)
            | GeometryError::Parse(_)
            | GeometryError::Arity { .. } => CliError::Config(e.to_string()),
            _ => CliError::Degenerate(e.to_string()),
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{}: {e}", path.display()))
}

#[derive(Debug, Parser)]
#[command(name = "poncelet", version, about = "Poncelet 3-periodic families: orbits, invariants, loci and certificates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a family and write vertices and metrics as CSV.
    Orbit(RunArgs),
    /// Sweep invariants and report deviations as JSON.
    Invariants(RunArgs),
    /// Sample, classify and plot the locus of one or more centers.
    Locus(RunArgs),
    /// Reproduce the locus-type table.
    Table1(RunArgs),
    /// Run transformation certificates and conic observations.
    Certify(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Text,
    Csv,
    Json,
}

/// Flags shared by every subcommand. Any flag given overrides the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// JSON file with a [`RunConfig`].
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    /// Circumradius (poristic, brocard).
    #[arg(long = "R", allow_negative_numbers = true)]
    pub big_r: Option<f64>,
    /// Inradius (poristic).
    #[arg(long, allow_negative_numbers = true)]
    pub r: Option<f64>,
    /// Brocard angle in radians (brocard).
    #[arg(long, allow_negative_numbers = true)]
    pub omega: Option<f64>,
    /// Polygon period; values above 3 tune the caustic for closure.
    #[arg(long)]
    pub period: Option<usize>,
    /// Center index; repeat or comma-separate for several.
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<u32>,
    /// reference, excentral or orthic.
    #[arg(long)]
    pub derived: Option<String>,
    /// Row or sample count.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Invariant names for `invariants`.
    #[arg(long, value_delimiter = ',')]
    pub invariant: Vec<String>,
    /// Relations for `certify`.
    #[arg(long, value_delimiter = ',')]
    pub relation: Vec<String>,
    /// Table columns for `table1`.
    #[arg(long, value_delimiter = ',')]
    pub column: Vec<String>,
    /// Extra centers, one `k, name, expression` per line.
    #[arg(long)]
    pub registry: Option<PathBuf>,
    /// CSV output path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON output path (stdout otherwise).
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// SVG output path (`locus`).
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Outputs {
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

/// Everything a run needs. Loaded from JSON, then overridden by flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub family: Option<Family>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    #[serde(rename = "R")]
    pub big_r: Option<f64>,
    pub r: Option<f64>,
    pub omega: Option<f64>,
    pub period: Option<usize>,
    pub centers: Vec<u32>,
    pub derived: Option<Derived>,
    pub samples: Option<usize>,
    pub tolerance: Option<f64>,
    pub invariants: Vec<Invariant>,
    pub relations: Vec<String>,
    pub columns: Vec<TableColumn>,
    pub registry: Option<PathBuf>,
    pub outputs: Outputs,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        serde_json::from_str(&text).map_err(|e| io_err(path, e))
    }

    /// Config file (if any) with the flags laid over it.
    pub fn from_args(args: &RunArgs) -> Result<Self, CliError> {
        let mut cfg = match &args.config {
            Some(p) => Self::load(p)?,
            None => Self::default(),
        };
        if let Some(f) = &args.family {
            cfg.family = Some(f.parse()?);
        }
        macro_rules! over {
            ($($field:ident <- $arg:ident),*) => { $(if args.$arg.is_some() { cfg.$field = args.$arg; })* };
        }
        over!(a <- a, b <- b, big_r <- big_r, r <- r, omega <- omega, period <- period, samples <- n, tolerance <- tol);
        if !args.k.is_empty() {
            cfg.centers = args.k.clone();
        }
        if let Some(d) = &args.derived {
            cfg.derived = Some(d.parse()?);
        }
        if !args.invariant.is_empty() {
            cfg.invariants = args.invariant.iter().map(|s| s.parse()).collect::<Result<_, _>>()?;
        }
        if !args.relation.is_empty() {
            cfg.relations = args.relation.clone();
        }
        if !args.column.is_empty() {
            cfg.columns = args.column.iter().map(|s| s.parse()).collect::<Result<_, _>>()?;
        }
        if args.registry.is_some() {
            cfg.registry = args.registry.clone();
        }
        if args.out.is_some() {
            cfg.outputs.csv = args.out.clone();
        }
        if args.json.is_some() {
            cfg.outputs.json = args.json.clone();
        }
        if args.svg.is_some() {
            cfg.outputs.svg = args.svg.clone();
        }
        if args.format.is_some() {
            cfg.outputs.format = args.format;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        for (name, v) in [("a", self.a), ("b", self.b), ("R", self.big_r), ("r", self.r), ("omega", self.omega)] {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return Err(CliError::Config(format!("{name} must be positive and finite, got {v}")));
                }
            }
        }
        if let (Some(a), Some(b)) = (self.a, self.b) {
            if b > a {
                return Err(CliError::Config(format!("need a ≥ b, got a = {a}, b = {b}")));
            }
        }
        if let Some(p) = self.period {
            if p < 3 {
                return Err(CliError::Config(format!("period must be at least 3, got {p}")));
            }
        }
        if let Some(t) = self.tolerance {
            if !(t.is_finite() && t > 0.0) {
                return Err(CliError::Config(format!("tolerance must be positive, got {t}")));
            }
        }
        if self.samples == Some(0) {
            return Err(CliError::Config("sample count must be positive".to_string()));
        }
        Ok(())
    }

    fn ab(&self) -> Result<(f64, f64), CliError> {
        match (self.a, self.b) {
            (Some(a), Some(b)) => Ok((a, b)),
            _ => Err(CliError::Config("--a and --b are required".to_string())),
        }
    }

    fn ab_or_default(&self) -> (f64, f64) {
        (self.a.unwrap_or(2.0), self.b.unwrap_or(1.0))
    }

    fn family(&self) -> Result<Family, CliError> {
        self.family.ok_or_else(|| CliError::Config("--family is required".to_string()))
    }

    /// The pair named by the config. Poristic and Brocard pairs fall back to
    /// the `(a, b)` images used by the locus table when `R` is not given.
    pub fn pair(&self) -> Result<ConicPair, CliError> {
        let family = self.family()?;
        let period = self.period.unwrap_or(3);
        let pair = match family {
            Family::Poristic => match (self.big_r, self.r) {
                (Some(big_r), Some(r)) => ConicPair::poristic(big_r, r)?,
                _ => {
                    let (a, b) = self.ab()?;
                    ConicPair::poristic((a + b) / 2.0, a * b / (a + b))?
                }
            },
            Family::Brocard => match (self.big_r, self.omega) {
                (Some(big_r), Some(omega)) => ConicPair::brocard(big_r, omega)?,
                _ => {
                    let (a, b) = self.ab()?;
                    ConicPair::brocard(a, homothetic_brocard_angle(a, b))?
                }
            },
            _ if period > 3 => {
                let (a, b) = self.ab()?;
                tune_caustic_for_closure(&AxisEllipse::centered(a, b)?, family, period)?
            }
            Family::Confocal => {
                let (a, b) = self.ab()?;
                ConicPair::confocal(a, b)?
            }
            Family::Incircle => {
                let (a, b) = self.ab()?;
                ConicPair::incircle(a, b)?
            }
            Family::Circumellipse => {
                let (a, b) = self.ab()?;
                ConicPair::circumellipse(a, b)?
            }
            Family::Homothetic => {
                let (a, b) = self.ab()?;
                ConicPair::homothetic(a, b)?
            }
        };
        if period > 3 && pair.period != period {
            return Err(CliError::Config(format!("period {period} is only supported for the concentric families")));
        }
        Ok(pair)
    }

    pub fn registry(&self) -> Result<CenterRegistry, CliError> {
        match &self.registry {
            Some(p) => Ok(CenterRegistry::with_extension_file(p)?),
            None => Ok(default_registry().clone()),
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
            let _ = write!(err, "{e}");
            return code;
        }
    };
    match execute(&cli.command, out) {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_FAIL,
        Err(e) => {
            let _ = writeln!(err, "poncelet: {e}");
            e.exit_code()
        }
    }
}

/// Runs one command. `Ok(false)` means the run completed but some check failed.
pub fn execute(command: &Command, out: &mut dyn Write) -> Result<bool, CliError> {
    match command {
        Command::Orbit(a) => cmd_orbit(&RunConfig::from_args(a)?, out),
        Command::Invariants(a) => cmd_invariants(&RunConfig::from_args(a)?, out),
        Command::Locus(a) => cmd_locus(&RunConfig::from_args(a)?, out),
        Command::Table1(a) => cmd_table1(&RunConfig::from_args(a)?, out),
        Command::Certify(a) => cmd_certify(&RunConfig::from_args(a)?, out),
    }
}

/// 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| io_err(path, e))
}

fn emit(path: Option<&PathBuf>, contents: &[u8], out: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => write_file(p, contents),
        None => out.write_all(contents).map_err(|e| CliError::Config(format!("stdout: {e}"))),
    }
}

fn emit_json(cfg: &RunConfig, doc: &serde_json::Value, out: &mut dyn Write) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(doc).map_err(|e| CliError::Config(e.to_string()))?;
    text.push('\n');
    emit(cfg.outputs.json.as_ref(), text.as_bytes(), out)
}

fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::Config(format!("csv: {e}"));
    w.write_record(header).map_err(fail)?;
    for r in rows {
        w.write_record(r).map_err(fail)?;
    }
    w.into_inner().map_err(|e| CliError::Config(format!("csv: {e}")))
}

fn polygon_metrics(v: &[Point2]) -> [f64; 3] {
    let n = v.len();
    let mut perim = 0.0;
    let mut sq = 0.0;
    let mut area2 = 0.0;
    for i in 0..n {
        let (p, q) = (v[i], v[(i + 1) % n]);
        let s = p.dist(q);
        perim += s;
        sq += s * s;
        area2 += p.cross(q);
    }
    [perim, sq, 0.5 * area2.abs()]
}

pub fn cmd_orbit(cfg: &RunConfig, out: &mut dyn Write) -> Result<bool, CliError> {
    let pair = cfg.pair()?;
    let n = cfg.samples.unwrap_or(100);
    let mut header = vec!["t".to_string()];
    for i in 1..=pair.period {
        header.push(format!("x{i}"));
        header.push(format!("y{i}"));
    }
    let triangle = pair.period == 3;
    let metrics: &[&str] = if triangle { &["L", "L2", "A", "r", "R", "omega"] } else { &["L", "L2", "A"] };
    header.extend(metrics.iter().map(|s| s.to_string()));
    let mut rows = Vec::with_capacity(n);
    for t in sweep_parameters(n) {
        let Ok(v) = family_polygon(&pair, t) else { continue };
        let mut row = vec![num(t)];
        for p in &v {
            row.push(num(p.x));
            row.push(num(p.y));
        }
        if triangle {
            let Ok(tri) = Triangle::new(v[0], v[1], v[2]) else { continue };
            let m = tri.metrics();
            for x in [m.perimeter, m.sum_sq_sides, m.area, m.inradius, m.circumradius, m.brocard_angle] {
                row.push(num(x));
            }
        } else {
            row.extend(polygon_metrics(&v).iter().map(|&x| num(x)));
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::Degenerate(GeometryError::AllSamplesDegenerate.to_string()));
    }
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    emit(cfg.outputs.csv.as_ref(), &csv_bytes(&header, &rows)?, out)?;
    Ok(true)
}

pub fn cmd_invariants(cfg: &RunConfig, out: &mut dyn Write) -> Result<bool, CliError> {
    let pair = cfg.pair()?;
    let samples = cfg.samples.unwrap_or(1000);
    let tol = cfg.tolerance.unwrap_or(1e-9);
    let reports = if cfg.invariants.is_empty() {
        sweep_all(&pair, samples)?
    } else {
        if pair.period > 3 {
            if let Some(bad) = cfg.invariants.iter().find(|i| !i.polygonal()) {
                return Err(CliError::Config(format!("{} is not defined for {}-gons", bad.name(), pair.period)));
            }
        }
        cfg.invariants
            .iter()
            .map(|&i| sweep(&pair, i, samples))
            .collect::<Result<Vec<_>, _>>()?
    };
    let pass = reports.iter().all(|r| r.deviation() < tol);
    let doc = json!({
        "command": "invariants",
        "pair": pair,
        "samples": samples,
        "tolerance": tol,
        "pass": pass,
        "reports": reports,
    });
    emit_json(cfg, &doc, out)?;
    Ok(pass)
}

pub fn cmd_locus(cfg: &RunConfig, out: &mut dyn Write) -> Result<bool, CliError> {
    let pair = cfg.pair()?;
    if cfg.centers.is_empty() {
        return Err(CliError::Config("--k is required".to_string()));
    }
    let registry = cfg.registry()?;
    let n = cfg.samples.unwrap_or(DEFAULT_SAMPLES);
    let tol = cfg.tolerance.unwrap_or(1e-6);
    let derived = cfg.derived.unwrap_or_default();
    let fits = cfg
        .centers
        .iter()
        .map(|&k| verify_locus_with(&registry, &pair, k, derived, n))
        .collect::<Result<Vec<_>, _>>()?;
    let pass = fits.iter().all(|f| f.matches_expected(tol).unwrap_or(true));
    if let Some(path) = &cfg.outputs.csv {
        let mut rows = Vec::new();
        for f in &fits {
            for (t, p) in f.params.iter().zip(&f.points) {
                rows.push(vec![f.k.to_string(), num(*t), num(p.x), num(p.y)]);
            }
        }
        write_file(path, &csv_bytes(&["k", "t", "x", "y"], &rows)?)?;
    }
    if let Some(path) = &cfg.outputs.svg {
        write_file(path, locus_svg(&pair, &fits).as_bytes())?;
    }
    let matches: Vec<Option<bool>> = fits.iter().map(|f| f.matches_expected(tol)).collect();
    let doc = json!({
        "command": "locus",
        "pair": pair,
        "samples": n,
        "tolerance": tol,
        "pass": pass,
        "fits": fits,
        "matches_expected": matches,
    });
    emit_json(cfg, &doc, out)?;
    Ok(pass)
}

pub fn cmd_table1(cfg: &RunConfig, out: &mut dyn Write) -> Result<bool, CliError> {
    let (a, b) = cfg.ab_or_default();
    let registry = cfg.registry()?;
    let n = cfg.samples.unwrap_or(DEFAULT_SAMPLES);
    let columns = if cfg.columns.is_empty() { TableColumn::ALL.to_vec() } else { cfg.columns.clone() };
    let ks = if cfg.centers.is_empty() { table1_centers() } else { cfg.centers.clone() };
    let table = locus_table_with(&registry, &columns, &ks, a, b, n)?;
    let spots = spot_checks(a, b, n)?;
    let pass = table.all_pass() && spots.iter().all(|s| s.pass());
    match cfg.outputs.format.unwrap_or(OutputFormat::Text) {
        OutputFormat::Text => {
            let mut s = table.render();
            for f in table.failures() {
                let _ = writeln!(
                    s,
                    "mismatch X{} {}: expected {}, observed {}",
                    f.k,
                    f.column.header(),
                    f.expected.as_deref().unwrap_or("-"),
                    f.observed
                );
            }
            for sc in &spots {
                let _ = writeln!(
                    s,
                    "spot {} X{}: expected {}, observed {} [{}]",
                    sc.family,
                    sc.k,
                    sc.expected.label(),
                    sc.observed.map_or("?", |c| c.label()),
                    if sc.pass() { "ok" } else { "FAIL" }
                );
            }
            let _ = writeln!(s, "{}", if pass { "PASS" } else { "FAIL" });
            emit(cfg.outputs.csv.as_ref(), s.as_bytes(), out)?;
        }
        OutputFormat::Csv => {
            let rows: Vec<Vec<String>> = table
                .cells
                .iter()
                .map(|c| {
                    vec![
                        c.k.to_string(),
                        c.column.header().to_string(),
                        c.expected.clone().unwrap_or_default(),
                        c.observed.clone(),
                        c.incidence_residual.map(num).unwrap_or_default(),
                        c.conic_residual.map(num).unwrap_or_default(),
                        c.pass.map(|p| p.to_string()).unwrap_or_default(),
                    ]
                })
                .collect();
            let bytes = csv_bytes(
                &["k", "column", "expected", "observed", "incidence_residual", "conic_residual", "pass"],
                &rows,
            )?;
            emit(cfg.outputs.csv.as_ref(), &bytes, out)?;
        }
        OutputFormat::Json => {}
    }
    if cfg.outputs.format == Some(OutputFormat::Json) || cfg.outputs.json.is_some() {
        let doc = json!({
            "command": "table1",
            "pass": pass,
            "table": table,
            "spot_checks": spots,
        });
        emit_json(cfg, &doc, out)?;
    }
    Ok(pass)
}

pub const DEFAULT_RELATIONS: [&str; 7] = ["thm2", "thm3", "thm5", "thm6", "thm7", "obs", "isolation"];

/// One certificate per relation name. `obs` expands to the observation checks.
pub fn certificates(relation: &str, a: f64, b: f64, samples: usize) -> Result<Vec<Certificate>, CliError> {
    Ok(match relation.to_ascii_lowercase().as_str() {
        "thm2" => vec![rotation_certificate_i(a, b, samples)?],
        "thm3" => vec![affine_certificate_i(a, b, samples)?],
        "thm5" => vec![affine_certificate_ii(a, b, samples)?],
        "thm6" => vec![rotation_certificate_ii(a, b, samples)?],
        "thm7" => vec![similarity_certificate_iii(a, b, samples)?],
        "obs" | "observations" => observations(a, b, samples)?.iter().map(Certificate::from).collect(),
        "isolation" => vec![Certificate::from(&group_isolation_check()?)],
        "conjecture1" => {
            let batch = conjecture1_batch(CONJECTURE_SEED, 50, 10, DEFAULT_SAMPLES)?;
            let mut c = Certificate::new("conjecture1", batch.non_confocal.len() + batch.confocal.len(), batch.max_confocal_residual(), batch.conic_ceiling)
                .with("seed", batch.seed as f64)
                .with("non_conic_floor", batch.non_conic_floor)
                .with("min_non_confocal_residual", batch.min_non_confocal_residual())
                .with("max_confocal_residual", batch.max_confocal_residual())
                .note("numerical evidence over random pairs, not a proof");
            c.pass = batch.non_confocal_ok() && batch.confocal_ok();
            vec![c]
        }
        "obs4" | "x16" => {
            let ratios = ratio_grid(0.25, 24);
            let mut c = Certificate::new("obs4", ratios.len(), f64::INFINITY, 1e-3);
            for norm in Normalization::ALL {
                let scan = x16_radius_scan(&ratios, norm)?;
                let key = format!("{norm:?}").to_ascii_lowercase();
                if let Some(x) = scan.argmin {
                    c = c.with(&format!("{key}_argmin"), x);
                    c.discrepancy = c.discrepancy.min((x - 3.0).abs());
                }
            }
            c.pass = c.discrepancy < c.tolerance;
            vec![c.note("distance of the nearest X16-radius minimum from a/b = 3 over the tested normalizations")]
        }
        other => return Err(CliError::Config(format!("unknown relation `{other}`"))),
    })
}

pub fn cmd_certify(cfg: &RunConfig, out: &mut dyn Write) -> Result<bool, CliError> {
    let (a, b) = cfg.ab_or_default();
    let samples = cfg.samples.unwrap_or(200);
    let relations: Vec<String> = if cfg.relations.is_empty() || cfg.relations.iter().any(|r| r == "all") {
        DEFAULT_RELATIONS.iter().map(|s| s.to_string()).collect()
    } else {
        cfg.relations.clone()
    };
    let mut certs = Vec::new();
    for r in &relations {
        certs.extend(certificates(r, a, b, samples)?);
    }
    let pass = certs.iter().all(|c| c.pass);
    let doc = json!({
        "command": "certify",
        "a": a,
        "b": b,
        "samples": samples,
        "pass": pass,
        "certificates": certs,
    });
    emit_json(cfg, &doc, out)?;
    Ok(pass)
}

const SVG_SIZE: f64 = 600.0;
const PALETTE: [&str; 6] = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

fn gradient(q: &QuarticImplicit, p: Point2, h: f64) -> Point2 {
    let dx = (q.eval(Point2::new(p.x + h, p.y)) - q.eval(Point2::new(p.x - h, p.y))) / (2.0 * h);
    let dy = (q.eval(Point2::new(p.x, p.y + h)) - q.eval(Point2::new(p.x, p.y - h))) / (2.0 * h);
    Point2::new(dx, dy)
}

/// Newton projection of `p` onto the zero set of `q`.
fn project(q: &QuarticImplicit, mut p: Point2, scale: f64) -> Point2 {
    let h = 1e-6 * scale;
    for _ in 0..20 {
        let f = q.eval(p);
        let g = gradient(q, p, h);
        let g2 = g.norm_sq();
        if !(g2 > 0.0) {
            break;
        }
        let step = f / g2;
        p = Point2::new(p.x - step * g.x, p.y - step * g.y);
        if (step * g2.sqrt()).abs() < 1e-14 * scale {
            break;
        }
    }
    p
}

fn svg_ellipse(s: &mut String, c: Point2, a: f64, b: f64, angle: f64, style: &str) {
    let _ = writeln!(
        s,
        r#"  <ellipse cx="{}" cy="{}" rx="{}" ry="{}" transform="rotate({} {} {})" {style}/>"#,
        c.x,
        c.y,
        a,
        b,
        angle.to_degrees(),
        c.x,
        c.y
    );
}

fn svg_polyline(s: &mut String, pts: &[Point2], style: &str) {
    let coords: Vec<String> = pts.iter().map(|p| format!("{},{}", p.x, p.y)).collect();
    let _ = writeln!(s, r#"  <polyline points="{}" {style}/>"#, coords.join(" "));
}

/// Schematic SVG 1.1 plot: outer and inner conics, the sampled loci and,
/// dashed, each closed-form curve that is known.
pub fn locus_svg(pair: &ConicPair, fits: &[LocusFit]) -> String {
    let mut extent = pair.outer.center.norm() + pair.outer.a.max(pair.outer.b);
    for f in fits {
        for p in &f.points {
            if p.is_finite() {
                extent = extent.max(p.x.abs()).max(p.y.abs());
            }
        }
    }
    let extent = 1.1 * extent;
    let w = 2.0 * extent / SVG_SIZE;
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SVG_SIZE}" height="{SVG_SIZE}" viewBox="{} {} {} {}">"#,
        -extent,
        -extent,
        2.0 * extent,
        2.0 * extent
    );
    let _ = writeln!(s, "<title>{} family loci</title>", pair.family);
    let _ = writeln!(s, r#"<g transform="scale(1,-1)" fill="none">"#);
    let stroke = |color: &str, width: f64| format!(r#"stroke="{color}" stroke-width="{}""#, width);
    for (c, color) in [(&pair.outer, "#000000"), (&pair.inner, "#7f7f7f")] {
        svg_ellipse(&mut s, c.center, c.a, c.b, 0.0, &stroke(color, w * 1.5));
    }
    for (i, f) in fits.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let _ = writeln!(s, r#"  <g id="X{}">"#, f.k);
        let r = 1.2 * w;
        for p in f.points.iter().filter(|p| p.is_finite()) {
            let _ = writeln!(s, r#"    <circle cx="{}" cy="{}" r="{r}" fill="{color}" stroke="none"/>"#, p.x, p.y);
        }
        if let Some(exp) = &f.expected {
            let dashed = format!(r#"{} stroke-dasharray="{} {}""#, stroke(color, w), 6.0 * w, 4.0 * w);
            match &exp.kind {
                LocusKind::Point { at } => {
                    let d = 6.0 * w;
                    svg_polyline(&mut s, &[Point2::new(at.x - d, at.y - d), Point2::new(at.x + d, at.y + d)], &stroke(color, w));
                    svg_polyline(&mut s, &[Point2::new(at.x - d, at.y + d), Point2::new(at.x + d, at.y - d)], &stroke(color, w));
                }
                LocusKind::Circle { center, radius } => svg_ellipse(&mut s, *center, *radius, *radius, 0.0, &dashed),
                LocusKind::Ellipse { center, a, b } => svg_ellipse(&mut s, *center, *a, *b, 0.0, &dashed),
                LocusKind::Quartic { curve } => {
                    let scale = pair.scale();
                    let mut pts: Vec<Point2> = f
                        .points
                        .iter()
                        .filter(|p| p.is_finite())
                        .map(|&p| project(curve, p, scale))
                        .collect();
                    if let Some(&first) = pts.first() {
                        pts.push(first);
                    }
                    svg_polyline(&mut s, &pts, &dashed);
                }
            }
        }
        let _ = writeln!(s, "  </g>");
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, "</svg>");
    s
}
