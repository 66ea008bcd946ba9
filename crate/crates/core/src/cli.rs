//! Command-line front end.

use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::bounds_report;
use crate::builtin;
use crate::cycles::{cycle_basis, cycle_counts, shortest_cycle_length, WalkFilter, DEFAULT_LENGTH_CAP};
use crate::error::{Error, Result};
use crate::graph::{validate_graph, FundamentalGraph, GraphFile};
use crate::lattice;
use crate::operator::Operator;
use crate::spectrum::{
    self, band_structure_with, default_grid, flux_sweep, spectral_set, sweep_grid, SpectrumOptions,
    DEFAULT_FLAT_TOL,
};
use crate::traces::{evaluate_trace, trace_power_family, trace_via_cycles};
use crate::trigpoly::Budget;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "magtrace", version, about = "Bands, trace formulas and bandwidth bounds for magnetic operators on periodic graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Band structure and spectral set.
    Spectrum(SpectrumArgs),
    /// Cross-check the two trace engines.
    Traces(TracesArgs),
    /// Closed-walk census and cycle basis.
    Cycles(CyclesArgs),
    /// Bandwidth bounds report.
    Bounds(BoundsArgs),
    /// Band intervals along a flux family.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum OperatorArg {
    Adjacency,
    Laplacian,
    Schrodinger,
}

impl From<OperatorArg> for Operator {
    fn from(o: OperatorArg) -> Self {
        match o {
            OperatorArg::Adjacency => Operator::Adjacency,
            OperatorArg::Laplacian => Operator::Laplacian,
            OperatorArg::Schrodinger => Operator::Schrodinger,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Graph description file (JSON).
    #[arg(long, conflicts_with = "builtin")]
    pub graph: Option<PathBuf>,
    /// Builtin graph, e.g. `example41(pi)` or `kagome(0,pi)`.
    #[arg(long)]
    pub builtin: Option<String>,
    #[arg(long, value_enum, default_value = "laplacian")]
    pub operator: OperatorArg,
    /// Grid points per axis (default depends on dimension).
    #[arg(long)]
    pub grid: Option<usize>,
    /// Directory for CSV output.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = DEFAULT_FLAT_TOL)]
    pub flat_tol: f64,
}

#[derive(Args, Debug)]
pub struct TracesArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 6)]
    pub n_max: usize,
    /// Random quasimomenta for the matrix-power check.
    #[arg(long, default_value_t = 50)]
    pub samples: usize,
    /// Add this phase to every edge before the symbolic engine runs.
    #[arg(long, hide = true)]
    pub corrupt_phases: Option<f64>,
}

#[derive(Args, Debug)]
pub struct CyclesArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 4)]
    pub n_max: usize,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = DEFAULT_LENGTH_CAP)]
    pub n_cap: usize,
    /// Skip the band-structure run used for the sandwich check.
    #[arg(long)]
    pub no_spectrum: bool,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    /// `example41`, `kagome`, `scaled` (phases of the graph source times t)
    /// or `harper:Q`.
    #[arg(long)]
    pub family: String,
    #[arg(long, default_value_t = 64)]
    pub steps: usize,
    #[arg(long, default_value_t = DEFAULT_FLAT_TOL)]
    pub flat_tol: f64,
}

/// Evaluate a numeric argument such as `pi/2`, `-2*pi/3`, `1e-3` or `0.25`.
pub fn parse_number(s: &str) -> Result<f64> {
    let bad = || Error::InvalidArgument(format!("cannot parse number `{s}`"));
    let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
    let mut p = NumParser { chars: &chars, pos: 0 };
    let v = p.expr().ok_or_else(bad)?;
    if p.pos != chars.len() || !v.is_finite() {
        return Err(bad());
    }
    Ok(v)
}

struct NumParser<'a> {
    chars: &'a [char],
    pos: usize,
}

impl NumParser<'_> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn expr(&mut self) -> Option<f64> {
        let mut v = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            let t = self.term()?;
            v = if op == '+' { v + t } else { v - t };
        }
        Some(v)
    }

    fn term(&mut self) -> Option<f64> {
        let mut v = self.unary()?;
        loop {
            match self.peek() {
                Some(op @ ('*' | '/')) => {
                    self.pos += 1;
                    let f = self.unary()?;
                    v = if op == '*' { v * f } else { v / f };
                }
                // implicit product, as in `2pi`
                Some('p') => v *= self.atom()?,
                _ => return Some(v),
            }
        }
    }

    fn unary(&mut self) -> Option<f64> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Some(-self.unary()?)
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Option<f64> {
        let rest = &self.chars[self.pos..];
        if rest.starts_with(&['p', 'i']) {
            self.pos += 2;
            return Some(PI);
        }
        if rest.first() == Some(&'(') {
            self.pos += 1;
            let v = self.expr()?;
            if self.peek() != Some(')') {
                return None;
            }
            self.pos += 1;
            return Some(v);
        }
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '.') {
            self.pos += 1;
        }
        if self.pos > start && matches!(self.peek(), Some('e' | 'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some('+' | '-')) {
                self.pos += 1;
            }
            let digits = self.pos;
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                self.pos += 1;
            }
            if self.pos == digits {
                self.pos = save;
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse().ok()
    }
}

/// Build a graph from `name(args)`.
pub fn parse_builtin(expr: &str) -> Result<FundamentalGraph> {
    let expr = expr.trim();
    let (name, args) = match expr.find('(') {
        Some(i) => {
            let inner = expr[i + 1..]
                .strip_suffix(')')
                .ok_or_else(|| Error::InvalidArgument(format!("unbalanced parentheses in `{expr}`")))?;
            (&expr[..i], inner)
        }
        None => (expr, ""),
    };
    let nums: Vec<f64> = if args.trim().is_empty() {
        Vec::new()
    } else {
        args.split(',').map(parse_number).collect::<Result<_>>()?
    };
    let arity = |want: &[usize]| -> Result<()> {
        if want.contains(&nums.len()) {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "`{name}` takes {want:?} arguments, got {}",
                nums.len()
            )))
        }
    };
    let integer = |x: f64| -> Result<i64> {
        if x.fract() == 0.0 {
            Ok(x as i64)
        } else {
            Err(Error::InvalidArgument(format!("`{x}` is not an integer")))
        }
    };
    match name {
        "square" | "square_lattice" => {
            arity(&[0, 2])?;
            let a = if nums.is_empty() { [0.0; 2] } else { [nums[0], nums[1]] };
            Ok(builtin::square_lattice(a[0], a[1]))
        }
        "hexagonal" => {
            arity(&[0, 3])?;
            let mut a = [0.0; 3];
            a.iter_mut().zip(&nums).for_each(|(s, v)| *s = *v);
            Ok(builtin::hexagonal(a))
        }
        "kagome" => {
            arity(&[0, 2, 6])?;
            match nums.len() {
                0 => Ok(builtin::kagome_fluxes(0.0, 0.0)),
                2 => Ok(builtin::kagome_fluxes(nums[0], nums[1])),
                _ => {
                    let mut a = [0.0; 6];
                    a.copy_from_slice(&nums);
                    Ok(builtin::kagome(a))
                }
            }
        }
        "example41" => {
            arity(&[0, 1])?;
            Ok(builtin::example41(nums.first().copied().unwrap_or(0.0)))
        }
        "harper" | "harper_extended" => {
            arity(&[2])?;
            builtin::harper_extended(integer(nums[0])?, integer(nums[1])?)
        }
        "random" => {
            arity(&[1])?;
            Ok(builtin::random_graph(integer(nums[0])? as u64))
        }
        other => Err(Error::InvalidArgument(format!("unknown builtin `{other}`"))),
    }
}

pub fn load_graph(common: &Common) -> Result<FundamentalGraph> {
    match (&common.graph, &common.builtin) {
        (Some(path), None) => validate_graph(&GraphFile::load(path)?),
        (None, Some(expr)) => parse_builtin(expr),
        _ => Err(Error::InvalidArgument(
            "give exactly one of --graph or --builtin".into(),
        )),
    }
}

fn csv_writer(dir: &Path, name: &str) -> Result<csv::Writer<fs::File>> {
    fs::create_dir_all(dir)?;
    Ok(csv::Writer::from_path(dir.join(name))?)
}

fn grid_for(common: &Common, g: &FundamentalGraph) -> usize {
    common.grid.unwrap_or_else(|| default_grid(g.dimension()))
}

fn cmd_spectrum(a: &SpectrumArgs, out: &mut dyn Write) -> Result<i32> {
    let g = load_graph(&a.common)?;
    let op: Operator = a.common.operator.into();
    let bs = band_structure_with(&g, op, SpectrumOptions::new(grid_for(&a.common, &g)))?;
    let set = spectral_set(&bs, a.flat_tol);

    let mut w = csv_writer(&a.common.out, "bands.csv")?;
    let mut header: Vec<String> = (1..=g.dimension()).map(|i| format!("k_index_{i}")).collect();
    header.extend(["j".into(), "lambda".into()]);
    w.write_record(&header)?;
    for i in 0..bs.grid.len() {
        let idx = bs.grid.multi_index(i);
        for (j, l) in bs.at(i).iter().enumerate() {
            let mut rec: Vec<String> = idx.iter().map(|x| x.to_string()).collect();
            rec.push((j + 1).to_string());
            rec.push(format!("{l:.12}"));
            w.write_record(&rec)?;
        }
    }
    w.flush()?;

    let mut w = csv_writer(&a.common.out, "spectral_set.csv")?;
    w.write_record(["lo", "hi", "flat", "multiplicity"])?;
    for &(lo, hi) in &set.intervals {
        w.write_record([format!("{lo:.12}"), format!("{hi:.12}"), "false".into(), "1".into()])?;
    }
    for f in &set.flat {
        let v = format!("{:.12}", f.value);
        w.write_record([v.clone(), v, "true".into(), f.multiplicity.to_string()])?;
    }
    w.flush()?;

    writeln!(out, "operator {op}, grid {} per axis, {} bands", bs.grid.points, bs.num_bands)?;
    for (j, b) in bs.bands.iter().enumerate() {
        let kind = if b.width() < a.flat_tol { "flat" } else { "band" };
        writeln!(out, "  {kind} {}: [{:.9}, {:.9}]", j + 1, b.min.value, b.max.value)?;
    }
    writeln!(out, "total bandwidth {:.9}", bs.total_bandwidth())?;
    writeln!(out, "spectrum measure {:.9}", set.measure())?;
    for warning in &bs.warnings {
        writeln!(out, "warning: {warning}")?;
    }
    Ok(EXIT_OK)
}

fn cmd_traces(a: &TracesArgs, out: &mut dyn Write) -> Result<i32> {
    let g = load_graph(&a.common)?;
    let op: Operator = a.common.operator.into();
    if a.n_max == 0 || a.n_max > DEFAULT_LENGTH_CAP {
        return Err(Error::InvalidArgument(format!("--n-max must be in 1..={DEFAULT_LENGTH_CAP}")));
    }
    let symbolic_graph = match a.corrupt_phases {
        Some(delta) => {
            let phases: Vec<f64> = g.phases().iter().map(|p| p + delta).collect();
            g.with_phases(&phases)?
        }
        None => g.clone(),
    };
    let family = trace_power_family(&symbolic_graph, op, a.n_max, &Budget::new(Budget::DEFAULT))?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.common.seed);
    let ks: Vec<Vec<f64>> = (0..a.samples)
        .map(|_| (0..g.dimension()).map(|_| rng.random_range(-PI..PI)).collect())
        .collect();

    let mut w = csv_writer(&a.common.out, "traces.csv")?;
    w.write_record(["n", "m", "real", "imag", "oracle_real", "oracle_imag", "abs_diff"])?;
    let mut all_ok = true;
    for s in &family {
        let oracle = trace_via_cycles(&g, op, s.n)?;
        let keys: std::collections::BTreeSet<_> =
            s.coefficients.keys().chain(oracle.coefficients.keys()).cloned().collect();
        for m in keys {
            let (x, y) = (s.coefficient(&m), oracle.coefficient(&m));
            w.write_record([
                s.n.to_string(),
                lattice::format_index(&m),
                format!("{:.15e}", x.re),
                format!("{:.15e}", x.im),
                format!("{:.15e}", y.re),
                format!("{:.15e}", y.im),
                format!("{:.3e}", (x - y).norm()),
            ])?;
        }
        let coeff_diff = s.max_abs_diff(&oracle);
        let mut matrix_diff = 0.0f64;
        for k in &ks {
            let h = spectrum::fiber_matrix(&g, op, k);
            let mut p = h.clone();
            for _ in 1..s.n {
                p = &p * &h;
            }
            matrix_diff = matrix_diff.max((evaluate_trace(s, k)? - p.trace().re).abs());
        }
        let ok = coeff_diff <= 1e-9 && matrix_diff <= 1e-7;
        all_ok &= ok;
        writeln!(
            out,
            "n={} terms={} engine_diff={coeff_diff:.3e} matrix_diff={matrix_diff:.3e} {}",
            s.n,
            s.coefficients.len(),
            if ok { "ok" } else { "MISMATCH" }
        )?;
    }
    w.flush()?;
    Ok(if all_ok { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn cmd_cycles(a: &CyclesArgs, out: &mut dyn Write) -> Result<i32> {
    let g = load_graph(&a.common)?;
    let mut w = csv_writer(&a.common.out, "cycles.csv")?;
    w.write_record(["n", "m", "count"])?;
    for n in 1..=a.n_max {
        let c = cycle_counts(&g, n)?;
        for (m, count) in &c.by_index {
            w.write_record([n.to_string(), lattice::format_index(m), count.to_string()])?;
        }
        writeln!(
            out,
            "n={n} N={} N^0={} N^+={} N^odd={}",
            c.total,
            c.count(&lattice::zero(g.dimension())),
            c.nonzero(),
            c.odd()
        )?;
    }
    w.flush()?;
    match shortest_cycle_length(&g, &WalkFilter::NonzeroIndex, DEFAULT_LENGTH_CAP) {
        Ok(s) => writeln!(out, "shortest nonzero-index cycle length {} (p={})", s.n, s.p)?,
        Err(Error::NotFoundWithinCap { cap }) => writeln!(out, "no nonzero-index cycle up to length {cap}")?,
        Err(e) => return Err(e),
    }
    let basis = cycle_basis(&g)?;
    writeln!(out, "cycle basis (betti {}):", basis.betti())?;
    for (c, m) in basis.cycles().iter().zip(basis.indices()) {
        writeln!(out, "  edges [{}] index ({})", lattice::format_index(c), lattice::format_index(m))?;
    }
    Ok(EXIT_OK)
}

fn cmd_bounds(a: &BoundsArgs, out: &mut dyn Write) -> Result<i32> {
    let g = load_graph(&a.common)?;
    let op: Operator = a.common.operator.into();
    let mut report = bounds_report(&g, op, a.n_cap)?;
    let mut code = EXIT_OK;
    if !a.no_spectrum {
        let bs = band_structure_with(&g, op, SpectrumOptions::new(grid_for(&a.common, &g)))?;
        if !report.attach(bs.total_bandwidth(), 1e-4) {
            code = EXIT_CHECK_FAILED;
        }
    }
    let mut w = csv_writer(&a.common.out, "bounds.csv")?;
    w.write_record(["kind", "n", "m", "value", "bound"])?;
    for (kind, n, m, value, bound) in report.rows() {
        w.write_record([kind, n.to_string(), m, format!("{value:.12}"), format!("{bound:.12}")])?;
    }
    w.flush()?;
    writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
    Ok(code)
}

type Family = Box<dyn Fn(f64) -> Result<FundamentalGraph> + Sync>;

fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write) -> Result<i32> {
    let op: Operator = a.common.operator.into();
    let flat_tol = a.flat_tol;
    let mut rows: Vec<(f64, Vec<(f64, f64)>)> = Vec::new();
    let mut summary: Vec<String> = Vec::new();
    if a.steps < 2 {
        return Err(Error::InvalidArgument("--steps must be at least 2".into()));
    }
    if let Some(q_max) = a.family.strip_prefix("harper:") {
        let q_max: i64 = q_max
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad harper range `{q_max}`")))?;
        for q in 1..=q_max {
            for p in 0..q {
                if lattice::gcd(p, q) != 1 {
                    continue;
                }
                let g = builtin::harper_extended(p, q)?;
                let grid = a.common.grid.unwrap_or(128);
                let bs = band_structure_with(&g, op, SpectrumOptions::new(grid))?;
                let set = spectral_set(&bs, flat_tol);
                summary.push(format!(
                    "p/q={p}/{q} measure {:.6} bounds ({:.6}, {:.6})",
                    set.measure(),
                    2.0 * (5f64.sqrt() + 1.0) / q as f64,
                    4.0 * PI / q as f64
                ));
                rows.push((p as f64 / q as f64, bs.intervals()));
            }
        }
    } else {
        let (ts, family): (Vec<f64>, Family) =
            match a.family.as_str() {
                "example41" => (
                    sweep_grid(0.0, 2.0 * PI, a.steps, false)?,
                    Box::new(|t| Ok(builtin::example41(t))),
                ),
                "kagome" => (
                    sweep_grid(0.0, 2.0 * PI, a.steps, false)?,
                    Box::new(|t| Ok(builtin::kagome_fluxes(t, t))),
                ),
                "scaled" => {
                    let g = load_graph(&a.common)?;
                    (
                        sweep_grid(0.0, 1.0, a.steps, true)?,
                        Box::new(move |t| Ok(g.with_scaled_phases(t))),
                    )
                }
                other => {
                    return Err(Error::InvalidArgument(format!("unknown sweep family `{other}`")))
                }
            };
        let dim = family(0.0)?.dimension();
        let grid = a.common.grid.unwrap_or_else(|| default_grid(dim));
        for p in flux_sweep(&family, &ts, op, SpectrumOptions::new(grid), flat_tol) {
            match p.bands {
                Ok(bands) => {
                    summary.push(format!(
                        "t={:.6} bandwidth {:.9}{}",
                        p.t,
                        p.total_bandwidth,
                        if p.all_flat { " flat" } else { "" }
                    ));
                    rows.push((p.t, bands));
                }
                Err(e) => summary.push(format!("t={:.6} failed: {e}", p.t)),
            }
        }
    }
    let mut w = csv_writer(&a.common.out, "sweep.csv")?;
    w.write_record(["t", "j", "lo", "hi"])?;
    for (t, bands) in &rows {
        for (j, (lo, hi)) in bands.iter().enumerate() {
            w.write_record([format!("{t:.12}"), (j + 1).to_string(), format!("{lo:.12}"), format!("{hi:.12}")])?;
        }
    }
    w.flush()?;
    for line in summary {
        writeln!(out, "{line}")?;
    }
    Ok(EXIT_OK)
}

fn common(cmd: &Command) -> &Common {
    match cmd {
        Command::Spectrum(a) => &a.common,
        Command::Traces(a) => &a.common,
        Command::Cycles(a) => &a.common,
        Command::Bounds(a) => &a.common,
        Command::Sweep(a) => &a.common,
    }
}

/// Run a parsed command, writing the summary to `out`; returns the exit code.
pub fn run(cli: &Cli, out: &mut dyn Write) -> i32 {
    let cmd = &cli.command;
    let go = || {
        let mut buf = Vec::new();
        let code = match cmd {
            Command::Spectrum(a) => cmd_spectrum(a, &mut buf),
            Command::Traces(a) => cmd_traces(a, &mut buf),
            Command::Cycles(a) => cmd_cycles(a, &mut buf),
            Command::Bounds(a) => cmd_bounds(a, &mut buf),
            Command::Sweep(a) => cmd_sweep(a, &mut buf),
        };
        (code, buf)
    };
    let (result, buf) = match common(cmd).threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(go),
            Err(e) => (Err(Error::InvalidArgument(e.to_string())), Vec::new()),
        },
        None => go(),
    };
    if out.write_all(&buf).is_err() {
        return EXIT_NUMERIC;
    }
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                EXIT_VALIDATION
            } else {
                EXIT_NUMERIC
            }
        }
    }
}
