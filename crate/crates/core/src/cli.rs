//! Command-line front end.
//!
//! Every subcommand writes one table (CSV) or one report (JSON) to stdout.
//! Failures print `{"error": {"kind": ..., "message": ...}}` to stderr and
//! exit with 1; bad flags, config lines or a missing `--input` exit with 2.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::catalog::{bump, spatial_grid_for, spectral_bump, spectral_gaussian, TestFunction};
use crate::convolution::{convolve_on, kernel_k, translate, KernelContext};
use crate::error::Error;
use crate::model::{strip_halfwidth, GridFunction, LebesgueExponent, Parameters, SpatialGrid, SpectralFunction, SpectralGrid};
use crate::paley_wiener::{exponential_type, operator_radius, pw_membership, spectral_radius};
use crate::quadrature::QuadratureSpec;
use crate::special::OpdamG;
use crate::transform::{
    forward_on, hy_ratio, inverse_on, plancherel_energy, roundtrip, spectral_cutoff, strip_eval, DEFAULT_CUTOFF_TOL,
};

const DEFAULT_ALPHA: f64 = 1.0;
const DEFAULT_BETA: f64 = 0.25;
/// Spacing of default spatial grids.
const X_SPACING: f64 = 0.01;
/// Spacing of default spectral grids.
const LAMBDA_SPACING: f64 = 0.05;
/// Tolerance of the `chi` rule when `--tol` is absent.
const KERNEL_TOL: f64 = 1e-10;

#[derive(Debug, Parser)]
#[command(name = "opdam", version, about = "Cherednik-Opdam transform on the real line")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Default, Args)]
struct Common {
    #[arg(long, global = true, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    beta: Option<f64>,
    /// Half-width of the spatial grid.
    #[arg(long, global = true)]
    x_max: Option<f64>,
    /// Number of spatial nodes.
    #[arg(long, global = true)]
    x_steps: Option<usize>,
    /// Spectral cutoff.
    #[arg(long, global = true)]
    lambda_max: Option<f64>,
    /// Number of spectral nodes.
    #[arg(long, global = true)]
    lambda_steps: Option<usize>,
    /// Quadrature tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Input table, `x,f_re,f_im` or `lambda,g_re,g_im`.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    output: Option<Format>,
    /// File of `key = value` lines; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
struct FunctionArg {
    /// Built-in function used when `--input` is absent.
    #[arg(long, default_value = "mixed_gaussian", value_parser = parse_function)]
    function: TestFunction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Spectrum {
    Bump,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Route {
    Spectral,
    Operator,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Table of G_lambda(x).
    EvalG {
        /// Comma-separated real parts of lambda; defaults to the spectral grid.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        lambda: Option<Vec<f64>>,
        /// Imaginary part added to every lambda.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        eta: f64,
        /// Comma-separated points; defaults to the spatial grid.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Option<Vec<f64>>,
    },
    /// Forward transform of `--input`.
    Transform {
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        eta: f64,
    },
    /// Inverse transform of a spectral `--input`.
    Inverse,
    /// Forward then inverse transform; reports the relative L2 error.
    Roundtrip {
        #[command(flatten)]
        f: FunctionArg,
    },
    /// Spatial energy against both spectral energy forms.
    Plancherel {
        #[command(flatten)]
        f: FunctionArg,
    },
    /// Hausdorff-Young ratios.
    Hy {
        #[command(flatten)]
        f: FunctionArg,
        #[arg(long, value_delimiter = ',', default_value = "1,1.2,1.5")]
        p: Vec<f64>,
        /// Run over every built-in function.
        #[arg(long)]
        family: bool,
    },
    /// Transform in the strip next to its Hausdorff-Young bound.
    Strip {
        #[command(flatten)]
        f: FunctionArg,
        #[arg(long, default_value_t = 1.5)]
        p: f64,
        #[arg(long, value_delimiter = ',', default_value = "0,1,3", allow_hyphen_values = true)]
        xi: Vec<f64>,
        /// Defaults to half the strip width on either side and zero.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        eta: Option<Vec<f64>>,
    },
    /// tau_shift f on the spatial grid.
    Translate {
        #[command(flatten)]
        f: FunctionArg,
        #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
        shift: f64,
    },
    /// f * g on the spatial grid.
    Convolve {
        #[arg(long, default_value = "bump", value_parser = parse_function)]
        function: TestFunction,
        /// Second factor as a table; overrides `--with-function`.
        #[arg(long)]
        with: Option<PathBuf>,
        #[arg(long, default_value = "bump", value_parser = parse_function)]
        with_function: TestFunction,
    },
    /// Slice z -> K(x, y, z) at midpoints of `[-|x|-|y|, |x|+|y|]`.
    Kernel {
        #[arg(long, default_value_t = 0.7, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, default_value_t = 1.1, allow_hyphen_values = true)]
        y: f64,
    },
    /// Calibrated kernel constant M.
    Calibrate,
    /// Support radius from spectral moments or from powers of L.
    PwRadius {
        #[arg(long, value_enum, default_value = "spectral")]
        route: Route,
        /// Built-in spectrum when `--input` is absent.
        #[arg(long, value_enum, default_value = "bump")]
        spectrum: Spectrum,
        #[arg(long, default_value_t = 2.0)]
        radius: f64,
        #[arg(long, default_value_t = 0.1)]
        sharpness: f64,
        /// Largest moment; at most 2 on the operator route.
        #[arg(long)]
        n_max: Option<u32>,
        /// Difference step on the operator route.
        #[arg(long, default_value_t = 1e-3)]
        h: f64,
        /// Function for the operator route.
        #[arg(long, default_value = "bump", value_parser = parse_function)]
        function: TestFunction,
    },
    /// Growth rate of |H f(i eta)|.
    PwType {
        /// Built-in function instead of the default bump.
        #[arg(long, value_parser = parse_function)]
        function: Option<TestFunction>,
        /// Support radius of the default bump.
        #[arg(long, default_value_t = 1.5)]
        radius: f64,
        #[arg(long, default_value_t = 0.01)]
        sharpness: f64,
        #[arg(long, default_value_t = 5.0)]
        eta_min: f64,
        #[arg(long, default_value_t = 15.0)]
        eta_max: f64,
        #[arg(long, default_value_t = 21)]
        samples: usize,
    },
    /// Weighted norms of powers of L.
    PwMember {
        #[arg(long, default_value = "bump", value_parser = parse_function)]
        function: TestFunction,
        #[arg(long, default_value_t = 2)]
        m_max: u32,
        #[arg(long, default_value_t = 2)]
        n_max: u32,
        #[arg(long, default_value_t = 2)]
        n_spectral: u32,
        #[arg(long, default_value_t = 1e-3)]
        h: f64,
    },
}

fn parse_function(s: &str) -> std::result::Result<TestFunction, String> {
    TestFunction::from_name(s).ok_or_else(|| {
        let names: Vec<&str> = TestFunction::FAMILY.iter().map(|f| f.name()).collect();
        format!("unknown function `{s}`; expected one of {}", names.join(", "))
    })
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(String),
    Compute(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// Parses `argv` (program name first), runs the subcommand and returns the
/// exit code. Output goes to stdout and stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] with explicit sinks.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let result = Settings::resolve(cli.common).and_then(|s| {
        let rendered = execute(&s, &cli.command)?;
        Ok(rendered.render(s.format))
    });
    match result {
        Ok(text) => match out.write_all(text.as_bytes()) {
            Ok(()) => 0,
            Err(e) => report(err, "io", &e.to_string(), 1),
        },
        Err(Failure::Usage(msg)) => report(err, "usage", &msg, 2),
        Err(Failure::Io(msg)) => report(err, "io", &msg, 1),
        Err(Failure::Compute(e)) => report(err, e.kind(), &e.to_string(), 1),
    }
}

fn report(err: &mut dyn Write, kind: &str, message: &str, code: i32) -> i32 {
    let obj = json!({ "error": { "kind": kind, "message": message } });
    let _ = writeln!(err, "{obj}");
    code
}

/// Flags merged with the config file.
#[derive(Debug, Clone)]
struct Settings {
    params: Parameters,
    x_max: Option<f64>,
    x_steps: Option<usize>,
    lambda_max: Option<f64>,
    lambda_steps: Option<usize>,
    tol: Option<f64>,
    input: Option<PathBuf>,
    format: Format,
}

impl Settings {
    fn resolve(mut flags: Common) -> Outcome<Self> {
        if let Some(path) = flags.config.clone() {
            let text = fs::read_to_string(&path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            apply_config(&mut flags, &text)?;
        }
        let params = Parameters::new(flags.alpha.unwrap_or(DEFAULT_ALPHA), flags.beta.unwrap_or(DEFAULT_BETA))?;
        if let Some(t) = flags.tol {
            if !(t > 0.0) {
                return Err(Failure::Usage(format!("--tol must be positive, got {t}")));
            }
        }
        Ok(Self {
            params,
            x_max: flags.x_max,
            x_steps: flags.x_steps,
            lambda_max: flags.lambda_max,
            lambda_steps: flags.lambda_steps,
            tol: flags.tol,
            input: flags.input,
            format: flags.output.unwrap_or(Format::Csv),
        })
    }

    fn spec(&self) -> QuadratureSpec {
        match self.tol {
            Some(t) => QuadratureSpec::default().with_tol(t),
            None => QuadratureSpec::default(),
        }
    }

    fn kernel(&self) -> Outcome<KernelContext> {
        Ok(KernelContext::calibrated(&self.params, self.tol.unwrap_or(KERNEL_TOL))?)
    }

    /// `[-X, X]` with the given defaults; the node count defaults to `spacing`.
    fn spatial_grid(&self, x_max: f64, spacing: f64) -> Outcome<SpatialGrid> {
        let x = self.x_max.unwrap_or(x_max);
        let n = self.x_steps.unwrap_or_else(|| odd_count(x, spacing));
        Ok(SpatialGrid::new(x, n)?)
    }

    /// Grid wide enough for the built-in functions.
    fn default_spatial_grid(&self, spacing: f64) -> Outcome<SpatialGrid> {
        let wide = spatial_grid_for(self.params.rho(), spacing);
        self.spatial_grid(wide.half_width(), spacing)
    }

    fn spectral_grid(&self, cutoff: f64, spacing: f64, eta: f64) -> Outcome<SpectralGrid> {
        let l = self.lambda_max.unwrap_or(cutoff);
        let n = self.lambda_steps.unwrap_or_else(|| odd_count(l, spacing));
        Ok(SpectralGrid::new(-l, l, n, eta)?)
    }

    fn require_input(&self, command: &str) -> Outcome<&Path> {
        self.input
            .as_deref()
            .ok_or_else(|| Failure::Usage(format!("`{command}` needs --input <csv>")))
    }

    /// `--input` if given, else `function` sampled on the default grid.
    fn spatial_source(&self, function: TestFunction, spacing: f64) -> Outcome<GridFunction> {
        match &self.input {
            Some(path) => read_spatial(path),
            None => Ok(function.sample(self.default_spatial_grid(spacing)?)),
        }
    }
}

/// Smallest odd count with spacing at most `spacing` on `[-x, x]`.
fn odd_count(x: f64, spacing: f64) -> usize {
    2 * (x / spacing).ceil().max(1.0) as usize + 1
}

fn apply_config(flags: &mut Common, text: &str) -> Outcome<()> {
    for (line_no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |what: &str| Failure::Usage(format!("config line {}: {what}: `{raw}`", line_no + 1));
        let (key, value) = line.split_once('=').ok_or_else(|| bad("expected key = value"))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        let num = || value.parse::<f64>().map_err(|_| bad("not a number"));
        let count = || value.parse::<usize>().map_err(|_| bad("not a count"));
        match key.as_str() {
            "alpha" => set(&mut flags.alpha, num()?),
            "beta" => set(&mut flags.beta, num()?),
            "x-max" => set(&mut flags.x_max, num()?),
            "x-steps" => set(&mut flags.x_steps, count()?),
            "lambda-max" => set(&mut flags.lambda_max, num()?),
            "lambda-steps" => set(&mut flags.lambda_steps, count()?),
            "tol" => set(&mut flags.tol, num()?),
            "input" => set(&mut flags.input, PathBuf::from(value)),
            "output" => set(&mut flags.output, Format::from_str(value, true).map_err(|_| bad("expected csv or json"))?),
            _ => return Err(bad("unknown key")),
        }
    }
    Ok(())
}

/// Fills `slot` unless a flag already did.
fn set<T>(slot: &mut Option<T>, value: T) {
    if slot.is_none() {
        *slot = Some(value);
    }
}

enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) if v.is_finite() => format!("{v:.16e}"),
            Cell::Num(v) if v.is_nan() => "nan".into(),
            Cell::Num(v) => if *v > 0.0 { "inf" } else { "-inf" }.into(),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(v) => v.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => json!(v),
            Cell::Int(v) => json!(v),
            Cell::Bool(v) => json!(v),
            Cell::Text(v) => json!(v),
        }
    }
}

struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        // writes to a Vec cannot fail
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
    }

    fn json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: serde_json::Map<String, Value> =
                        self.header.iter().zip(row).map(|(h, c)| (h.to_string(), c.json())).collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

fn num(v: f64) -> Cell {
    Cell::Num(v)
}

/// What a subcommand produced: a table, or a report with its CSV view.
enum Rendered {
    Table(Table),
    Report { json: Value, csv: Table },
}

impl Rendered {
    fn report<T: Serialize>(value: &T, csv: Table) -> Outcome<Self> {
        let json = serde_json::to_value(value).map_err(|e| Failure::Io(e.to_string()))?;
        Ok(Rendered::Report { json, csv })
    }

    /// Report whose CSV view lists its scalar fields as `field,value`.
    fn scalar_report<T: Serialize>(value: &T) -> Outcome<Self> {
        let json = serde_json::to_value(value).map_err(|e| Failure::Io(e.to_string()))?;
        let mut csv = Table::new(&["field", "value"]);
        if let Value::Object(map) = &json {
            for (k, v) in map {
                let cell = match v {
                    Value::Number(n) if n.is_f64() => num(n.as_f64().unwrap_or(f64::NAN)),
                    Value::Number(n) => Cell::Int(n.as_i64().unwrap_or_default()),
                    Value::Bool(b) => Cell::Bool(*b),
                    Value::Null => num(f64::INFINITY),
                    Value::String(t) => Cell::Text(t.clone()),
                    other => Cell::Text(other.to_string()),
                };
                csv.push(vec![Cell::Text(k.clone()), cell]);
            }
        }
        Ok(Rendered::Report { json, csv })
    }

    fn render(&self, format: Format) -> String {
        match (self, format) {
            (Rendered::Table(t), Format::Csv) | (Rendered::Report { csv: t, .. }, Format::Csv) => t.csv(),
            (Rendered::Table(t), Format::Json) => pretty(&t.json()),
            (Rendered::Report { json, .. }, Format::Json) => pretty(json),
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values are serializable");
    s.push('\n');
    s
}

fn read_rows(path: &Path, header: [&str; 3]) -> Outcome<(Vec<f64>, Vec<Complex64>)> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let found = reader.headers().map_err(|e| Failure::Io(e.to_string()))?.clone();
    let found: Vec<&str> = found.iter().map(str::trim).collect();
    if found != header {
        return Err(Failure::Io(format!(
            "{}: expected header {}, found {}",
            path.display(),
            header.join(","),
            found.join(",")
        )));
    }
    let mut nodes = Vec::new();
    let mut values = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Failure::Io(e.to_string()))?;
        let field = |k: usize| -> Outcome<f64> {
            record
                .get(k)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| Failure::Io(format!("{}: row {} column {} is not a number", path.display(), i + 1, k + 1)))
        };
        nodes.push(field(0)?);
        values.push(Complex64::new(field(1)?, field(2)?));
    }
    Ok((nodes, values))
}

/// Checks that `nodes` are the uniform grid from `first` to `last`.
fn check_uniform(nodes: &[f64]) -> crate::Result<()> {
    let n = nodes.len();
    if n < 3 {
        return Err(Error::InvalidGrid(format!("need at least 3 rows, got {n}")));
    }
    let (a, b) = (nodes[0], nodes[n - 1]);
    let h = (b - a) / (n - 1) as f64;
    let scale = a.abs().max(b.abs());
    for (k, &v) in nodes.iter().enumerate() {
        if (v - (a + h * k as f64)).abs() > 1e-9 * scale {
            return Err(Error::InvalidGrid(format!("row {} at {v} breaks the uniform spacing {h}", k + 1)));
        }
    }
    Ok(())
}

fn read_spatial(path: &Path) -> Outcome<GridFunction> {
    let (xs, values) = read_rows(path, ["x", "f_re", "f_im"])?;
    check_uniform(&xs)?;
    let (a, b) = (xs[0], xs[xs.len() - 1]);
    if (a + b).abs() > 1e-9 * b.abs() {
        return Err(Error::InvalidGrid(format!("spatial grid must be symmetric, got [{a}, {b}]")).into());
    }
    let grid = SpatialGrid::new(b, xs.len())?;
    Ok(GridFunction::new(grid, values)?)
}

fn read_spectral(path: &Path) -> Outcome<SpectralFunction> {
    let (ls, values) = read_rows(path, ["lambda", "g_re", "g_im"])?;
    check_uniform(&ls)?;
    let grid = SpectralGrid::new(ls[0], ls[ls.len() - 1], ls.len(), 0.0)?;
    Ok(SpectralFunction::new(grid, values)?)
}

fn spatial_table(f: &GridFunction) -> Table {
    let mut t = Table::new(&["x", "f_re", "f_im"]);
    for (x, v) in f.grid().nodes().zip(f.values()) {
        t.push(vec![num(x), num(v.re), num(v.im)]);
    }
    t
}

fn spectral_table(g: &SpectralFunction) -> Table {
    let mut t = Table::new(&["lambda", "g_re", "g_im"]);
    for (l, v) in g.grid().nodes().zip(g.values()) {
        t.push(vec![num(l.re), num(v.re), num(v.im)]);
    }
    t
}

/// Uniform points over `[-x, x]`.
fn points(x: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.0];
    }
    (0..n).map(|k| -x + 2.0 * x * k as f64 / (n - 1) as f64).collect()
}

#[derive(Serialize)]
struct RoundtripSummary {
    function: String,
    x_max: f64,
    x_steps: usize,
    lambda_max: f64,
    lambda_steps: usize,
    relative_error: f64,
}

#[derive(Serialize)]
struct CalibrationSummary {
    alpha: f64,
    beta: f64,
    #[serde(rename = "M")]
    m: f64,
    chi_degree: usize,
}

fn source_name(s: &Settings, function: TestFunction) -> String {
    match &s.input {
        Some(p) => p.display().to_string(),
        None => function.name().to_string(),
    }
}

fn execute(s: &Settings, command: &Command) -> Outcome<Rendered> {
    let params = s.params;
    match command {
        Command::EvalG { lambda, eta, x } => {
            let lambdas = match lambda {
                Some(v) => v.clone(),
                None => points(s.lambda_max.unwrap_or(5.0), s.lambda_steps.unwrap_or(11)),
            };
            let xs = match x {
                Some(v) => v.clone(),
                None => points(s.x_max.unwrap_or(3.0), s.x_steps.unwrap_or(61)),
            };
            let mut t = Table::new(&["lambda_re", "lambda_im", "x", "g_re", "g_im"]);
            for &l in &lambdas {
                let g = OpdamG::new(params, Complex64::new(l, *eta));
                for &x in &xs {
                    let v = g.eval(x)?;
                    t.push(vec![num(l), num(*eta), num(x), num(v.re), num(v.im)]);
                }
            }
            Ok(Rendered::Table(t))
        }
        Command::Transform { eta } => {
            let f = read_spatial(s.require_input("transform")?)?;
            let cutoff = match s.lambda_max {
                Some(l) => l,
                None => spectral_cutoff(&params, &f, 1.0, 0.0, DEFAULT_CUTOFF_TOL)?,
            };
            let grid = s.spectral_grid(cutoff, LAMBDA_SPACING, *eta)?;
            Ok(Rendered::Table(spectral_table(&forward_on(&params, &f, grid)?)))
        }
        Command::Inverse => {
            let g = read_spectral(s.require_input("inverse")?)?;
            let grid = s.spatial_grid(5.0, X_SPACING)?;
            Ok(Rendered::Table(spatial_table(&inverse_on(&params, &g, grid)?)))
        }
        Command::Roundtrip { f: fa } => {
            let f = s.spatial_source(fa.function, X_SPACING)?;
            let cutoff = match s.lambda_max {
                Some(l) => l,
                None => spectral_cutoff(&params, &f, 1.0, 0.0, DEFAULT_CUTOFF_TOL)?,
            };
            let grid = s.spectral_grid(cutoff, LAMBDA_SPACING, 0.0)?;
            let (_, err) = roundtrip(&params, &f, grid)?;
            Rendered::scalar_report(&RoundtripSummary {
                function: source_name(s, fa.function),
                x_max: f.grid().half_width(),
                x_steps: f.grid().points(),
                lambda_max: grid.lambda_max(),
                lambda_steps: grid.points(),
                relative_error: err,
            })
        }
        Command::Plancherel { f: fa } => {
            let f = s.spatial_source(fa.function, X_SPACING)?;
            Rendered::scalar_report(&plancherel_energy(&params, &f, &s.spec())?)
        }
        Command::Hy { f: fa, p, family } => {
            let functions: Vec<TestFunction> = if *family { TestFunction::FAMILY.to_vec() } else { vec![fa.function] };
            let exps = p.iter().map(|&v| LebesgueExponent::new(v)).collect::<crate::Result<Vec<_>>>()?;
            let mut t = Table::new(&["function", "p", "q", "ratio"]);
            for func in functions {
                let f = if *family { func.sample(s.default_spatial_grid(X_SPACING)?) } else { s.spatial_source(func, X_SPACING)? };
                let name = if *family { func.name().to_string() } else { source_name(s, func) };
                for e in &exps {
                    let r = hy_ratio(&params, &f, *e, &s.spec())?;
                    t.push(vec![Cell::Text(name.clone()), num(e.p()), num(e.q()), num(r)]);
                }
            }
            Ok(Rendered::Table(t))
        }
        Command::Strip { f: fa, p, xi, eta } => {
            let f = s.spatial_source(fa.function, X_SPACING)?;
            let e = LebesgueExponent::new(*p)?;
            let etas = match eta {
                Some(v) => v.clone(),
                None => {
                    let half = strip_halfwidth(&params, e);
                    vec![-0.5 * half, 0.0, 0.5 * half]
                }
            };
            let mut t = Table::new(&["xi", "eta", "h_re", "h_im", "bound", "holds"]);
            for &x in xi {
                for &y in &etas {
                    let v = strip_eval(&params, &f, x, y, e, &s.spec())?;
                    t.push(vec![num(x), num(y), num(v.value.0.re), num(v.value.0.im), num(v.bound), Cell::Bool(v.holds)]);
                }
            }
            Ok(Rendered::Table(t))
        }
        Command::Translate { f: fa, shift } => {
            let ctx = s.kernel()?;
            let ys = points(s.x_max.unwrap_or(3.0), s.x_steps.unwrap_or(61));
            let mut t = Table::new(&["x", "f_re", "f_im"]);
            let source = match &s.input {
                Some(path) => Some(read_spatial(path)?),
                None => None,
            };
            for y in ys {
                let v = match &source {
                    Some(f) => translate(&ctx, f, *shift, y)?,
                    None => ctx.translate_fn(|u| Complex64::new(fa.function.eval(u), 0.0), *shift, y)?,
                };
                t.push(vec![num(y), num(v.re), num(v.im)]);
            }
            Ok(Rendered::Table(t))
        }
        Command::Convolve {
            function,
            with,
            with_function,
        } => {
            let ctx = s.kernel()?;
            let base = spatial_grid_for(params.rho(), X_SPACING);
            let f = match &s.input {
                Some(path) => read_spatial(path)?,
                None => function.sample(base),
            };
            let g = match with {
                Some(path) => read_spatial(path)?,
                None => with_function.sample(base),
            };
            let out = s.spatial_grid(3.0, 0.1)?;
            Ok(Rendered::Table(spatial_table(&convolve_on(&ctx, &f, &g, out)?)))
        }
        Command::Kernel { x, y } => {
            let ctx = s.kernel()?;
            let reach = x.abs() + y.abs();
            let n = s.x_steps.unwrap_or(40);
            let mut t = Table::new(&["z", "k"]);
            for k in 0..n {
                let z = -reach + (k as f64 + 0.5) * 2.0 * reach / n as f64;
                t.push(vec![num(z), num(kernel_k(&ctx, *x, *y, z)?)]);
            }
            Ok(Rendered::Table(t))
        }
        Command::Calibrate => {
            let ctx = s.kernel()?;
            Rendered::scalar_report(&CalibrationSummary {
                alpha: params.alpha(),
                beta: params.beta(),
                m: ctx.m,
                chi_degree: ctx.chi_degree,
            })
        }
        Command::PwRadius {
            route,
            spectrum,
            radius,
            sharpness,
            n_max,
            h,
            function,
        } => {
            let report = match route {
                Route::Spectral => {
                    let g = match &s.input {
                        Some(path) => read_spectral(path)?,
                        None => {
                            let (cutoff, spacing) = match spectrum {
                                Spectrum::Bump => (radius + 0.5, 0.005),
                                Spectrum::Gaussian => (40.0, 0.01),
                            };
                            let grid = s.spectral_grid(cutoff, spacing, 0.0)?;
                            match spectrum {
                                Spectrum::Bump => spectral_bump(grid, *radius, *sharpness),
                                Spectrum::Gaussian => spectral_gaussian(grid),
                            }
                        }
                    };
                    spectral_radius(&params, &g, n_max.unwrap_or(crate::paley_wiener::DEFAULT_N_MAX))?
                }
                Route::Operator => {
                    let grid = s.default_spatial_grid(X_SPACING)?;
                    let f = |x: f64| Complex64::new(function.eval(x), 0.0);
                    operator_radius(&params, &f, grid, n_max.unwrap_or(2), *h, &s.spec())?
                }
            };
            let mut t = Table::new(&["n", "r_n"]);
            for &(n, r) in &report.moment_sequence {
                t.push(vec![Cell::Int(n as i64), num(r)]);
            }
            Rendered::report(&report, t)
        }
        Command::PwType {
            function,
            radius,
            sharpness,
            eta_min,
            eta_max,
            samples,
        } => {
            let f = match (&s.input, function) {
                (None, None) => {
                    let grid = s.spatial_grid(radius + 0.5, 0.002)?;
                    GridFunction::from_real_fn(grid, |x| bump(x, 0.0, *radius, *sharpness))
                }
                (_, f) => s.spatial_source(f.unwrap_or(TestFunction::Bump), 0.002)?,
            };
            let report = exponential_type(&params, &f, (*eta_min, *eta_max), *samples)?;
            let mut t = Table::new(&["eta", "log_abs_h"]);
            for &(e, v) in &report.samples {
                t.push(vec![num(e), num(v)]);
            }
            Rendered::report(&report, t)
        }
        Command::PwMember {
            function,
            m_max,
            n_max,
            n_spectral,
            h,
        } => {
            let grid = s.default_spatial_grid(X_SPACING)?;
            let f = |x: f64| Complex64::new(function.eval(x), 0.0);
            let report = pw_membership(&params, &f, grid, *h, *m_max, *n_max, *n_spectral, &s.spec())?;
            let mut t = Table::new(&["m", "n", "value", "resolved"]);
            for e in &report.table {
                t.push(vec![Cell::Int(e.m as i64), Cell::Int(e.n as i64), num(e.value), Cell::Bool(e.resolved)]);
            }
            Rendered::report(&report, t)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("opdam").chain(args.iter().copied());
        let code = run_with(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn eval_g_is_normalized_at_origin() {
        let (code, out, _) = run_capture(&["eval-g", "--alpha", "0.5", "--beta", "-0.5", "--lambda", "2", "--x", "0"]);
        assert_eq!(code, 0);
        let row = out.lines().nth(1).unwrap();
        let cells: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cells[2], 0.0);
        assert!((cells[3] - 1.0).abs() < 1e-15 && cells[4].abs() < 1e-15, "{row}");
    }

    #[test]
    fn transform_without_input_is_a_usage_error() {
        let (code, out, err) = run_capture(&["transform"]);
        assert_eq!(code, 2);
        assert!(out.is_empty());
        let v: Value = serde_json::from_str(err.trim()).unwrap();
        assert_eq!(v["error"]["kind"], "usage");
    }

    #[test]
    fn unknown_flag_is_a_usage_error() {
        assert_eq!(run_capture(&["calibrate", "--nope"]).0, 2);
        assert_eq!(run_capture(&["hy", "--function", "cosine"]).0, 2);
    }

    #[test]
    fn computation_failure_exits_one() {
        let (code, _, err) = run_capture(&["eval-g", "--alpha", "-2"]);
        assert_eq!(code, 1);
        let v: Value = serde_json::from_str(err.trim()).unwrap();
        assert_eq!(v["error"]["kind"], "invalid_parameters");
    }

    #[test]
    fn config_file_with_flag_override() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        fs::write(&path, "# parameters\nalpha = 0.5\nbeta = -0.5\noutput = json\n").unwrap();
        let conf = path.to_str().unwrap();
        let (code, out, _) = run_capture(&["calibrate", "--config", conf, "--alpha", "1.0", "--beta", "0.25"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["alpha"], 1.0);
        assert!(v["M"].as_f64().unwrap() > 0.0);

        fs::write(&path, "gamma = 3\n").unwrap();
        assert_eq!(run_capture(&["calibrate", "--config", conf]).0, 2);
    }

    #[test]
    fn csv_roundtrip_through_files() {
        let dir = tempfile::tempdir().unwrap();
        let f = TestFunction::MixedGaussian.sample(SpatialGrid::new(8.0, 801).unwrap());
        let path = dir.path().join("f.csv");
        fs::write(&path, spatial_table(&f).csv()).unwrap();
        let back = read_spatial(&path).unwrap();
        assert_eq!(back.grid(), f.grid());
        for (a, b) in back.values().iter().zip(f.values()) {
            assert!((a - b).norm() <= 1e-16 * b.norm().max(1e-300) * 10.0);
        }
    }

    #[test]
    fn spectral_input_must_be_uniform() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.csv");
        fs::write(&path, "lambda,g_re,g_im\n0,1,0\n1,1,0\n3,1,0\n").unwrap();
        let (code, _, err) = run_capture(&["inverse", "--input", path.to_str().unwrap()]);
        assert_eq!(code, 1);
        assert!(err.contains("invalid_grid"), "{err}");
    }
}
