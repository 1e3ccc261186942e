//! The `lemon` command line. [`run`] parses arguments, dispatches to a
//! subcommand and returns the process exit code.

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use crate::constants;
use crate::curve::CurveTrace;
use crate::error::Error;
use crate::genmap::{self, GenMapKind, SingularCurveId};
use crate::geometry::Table as Billiard;
use crate::manifolds::{self, BasePoint, BranchKind, Side};
use crate::output::{self, bounds_of, envelope, fmt17, json_f64, phase_table, svg_scatter, Cell, Series, Table};
use crate::parallel::{curve_c, CurveKind};
use crate::periodic::{self, exhaustive_theta_fixed_points, PeriodicOrbit, Rect, B_MAX};
use crate::phase;
use crate::verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "lemon", version, about = "Lemon billiards: orbits, curves, manifolds and checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Right-arc phase portrait from seeded random initial conditions.
    Phase,
    /// Period-2 and period-6 orbits in angular and line coordinates.
    Orbit,
    /// All Theta-fixed points found by Newton from a seed lattice.
    Periodic,
    /// The curves C_Phi, C_Psi, C_prl, their mirrors and the singular curves.
    Curves,
    /// Stable branch of P0 and unstable branch of Q0 with their diagonal crossings.
    Manifold,
    /// Splitting measurement over a range of b.
    SplittingSweep,
    /// Critical parameters with the residual of their defining equations.
    Constants,
    /// Run the acceptance checks; the report goes to standard output and the
    /// table to `--out` when given.
    Verify,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Phase => "phase",
            Command::Orbit => "orbit",
            Command::Periodic => "periodic",
            Command::Curves => "curves",
            Command::Manifold => "manifold",
            Command::SplittingSweep => "splitting-sweep",
            Command::Constants => "constants",
            Command::Verify => "verify",
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
    Svg,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Opts {
    /// Table parameter (distance between the two circle centres).
    #[arg(long, global = true)]
    pub b: Option<f64>,
    /// Range of b: START END STEPS, endpoints included.
    #[arg(long, global = true, num_args = 3, value_names = ["START", "END", "STEPS"], allow_negative_numbers = true)]
    pub b_range: Option<Vec<String>>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Billiard steps per trajectory (phase).
    #[arg(long, global = true)]
    pub iterations: Option<usize>,
    /// Number of trajectories (phase), seed lattice side (periodic) or
    /// samples per curve (curves).
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; all cores when absent.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Check selection for verify: a group, a name fragment or an id.
    #[arg(long, global = true)]
    pub filter: Option<String>,
}

/// Failure of a subcommand, mapped to an exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Internal(String),
    Verify(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain { .. } => CliError::Usage(e.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// What a subcommand produced, before it is written.
pub struct Report {
    pub table: Table,
    pub config: Value,
    /// Replaces the table rows as JSON `results` when set.
    pub results: Option<Value>,
    pub residuals: Value,
    pub svg: Option<Vec<CurveTrace>>,
    /// Scatter series are drawn as dots, others as polylines.
    pub scatter: bool,
}

impl Report {
    fn new(table: Table, config: Value) -> Self {
        Report {
            table,
            config,
            results: None,
            residuals: json!({}),
            svg: None,
            scatter: false,
        }
    }

    fn render(&self, command: Command, format: Format) -> CliResult<Vec<u8>> {
        match format {
            Format::Csv => Ok(self.table.to_csv()),
            Format::Json => {
                let results = self.results.clone().unwrap_or_else(|| self.table.to_json());
                let v = envelope(command.name(), self.config.clone(), results, self.residuals.clone());
                Ok(output::to_json_string(&v).into_bytes())
            }
            Format::Svg => {
                let curves = self
                    .svg
                    .as_ref()
                    .ok_or_else(|| CliError::Usage(format!("{} has no svg output", command.name())))?;
                let series: Vec<Series> = curves
                    .iter()
                    .map(|c| Series {
                        label: &c.label,
                        points: &c.points,
                        polyline: !self.scatter,
                    })
                    .collect();
                Ok(svg_scatter(&series, bounds_of(&series)).into_bytes())
            }
        }
    }
}

/// Parse `args` (including the program name), run and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            EXIT_USAGE
        }
        Err(CliError::Internal(m)) => {
            eprintln!("error: {m}");
            EXIT_INTERNAL
        }
        Err(CliError::Verify(m)) => {
            eprintln!("{m}");
            EXIT_VERIFY
        }
    }
}

pub fn execute(cli: &Cli) -> CliResult<()> {
    let opts = &cli.opts;
    let pool = {
        let mut p = rayon::ThreadPoolBuilder::new();
        if let Some(n) = opts.threads {
            if n == 0 {
                return Err(CliError::Usage("--threads must be at least 1".into()));
            }
            p = p.num_threads(n);
        }
        p.build().map_err(|e| CliError::Internal(e.to_string()))?
    };
    pool.install(|| {
        if cli.command == Command::Verify {
            return cmd_verify(opts);
        }
        let report = match cli.command {
            Command::Phase => cmd_phase(opts)?,
            Command::Orbit => cmd_orbit(opts)?,
            Command::Periodic => cmd_periodic(opts)?,
            Command::Curves => cmd_curves(opts)?,
            Command::Manifold => cmd_manifold(opts)?,
            Command::SplittingSweep => cmd_splitting_sweep(opts)?,
            Command::Constants => cmd_constants(opts)?,
            Command::Verify => unreachable!(),
        };
        emit(opts, &report.render(cli.command, opts.format)?)
    })
}

fn emit(opts: &Opts, bytes: &[u8]) -> CliResult<()> {
    match &opts.out {
        Some(p) => std::fs::write(p, bytes)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
        }
    }
    Ok(())
}

/// Values of b requested by `--b` or `--b-range`; `default` when neither is given.
pub fn b_values(opts: &Opts, default: f64) -> CliResult<Vec<f64>> {
    let bs = match (&opts.b, &opts.b_range) {
        (Some(_), Some(_)) => return Err(CliError::Usage("give --b or --b-range, not both".into())),
        (Some(b), None) => vec![*b],
        (None, None) => vec![default],
        (None, Some(r)) => {
            let num = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| CliError::Usage(format!("--b-range: `{s}` is not a number")))
            };
            let (lo, hi) = (num(&r[0])?, num(&r[1])?);
            let steps: usize = r[2]
                .parse()
                .map_err(|_| CliError::Usage(format!("--b-range: `{}` is not a step count", r[2])))?;
            if steps == 0 {
                return Err(CliError::Usage("--b-range needs at least one step".into()));
            }
            if steps == 1 {
                vec![lo]
            } else {
                (0..steps)
                    .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
                    .collect()
            }
        }
    };
    for &b in &bs {
        if !(b > 1.0 && b < 2.0) || !b.is_finite() {
            return Err(CliError::Usage(format!("b = {b} is outside (1, 2)")));
        }
    }
    Ok(bs)
}

fn single_b(opts: &Opts, default: f64) -> CliResult<f64> {
    if opts.b_range.is_some() {
        return Err(CliError::Usage("this command takes --b, not --b-range".into()));
    }
    Ok(b_values(opts, default)?[0])
}

fn b_range_json(bs: &[f64]) -> Value {
    Value::Array(bs.iter().map(|&b| json_f64(b)).collect())
}

fn cmd_phase(opts: &Opts) -> CliResult<Report> {
    let b = single_b(opts, 1.51)?;
    let count = opts.grid.unwrap_or(200);
    let iterations = opts.iterations.unwrap_or(2000);
    let t = Billiard::new(b)?;
    let trajs = phase::phase_portrait(&t, opts.seed, count, iterations);
    let table = phase_table(&trajs);
    let stopped: Vec<Value> = trajs
        .iter()
        .filter_map(|tr| {
            tr.stopped
                .as_ref()
                .map(|why| json!({"traj_id": tr.id, "reason": why}))
        })
        .collect();
    let config = json!({
        "b": json_f64(b),
        "seed": opts.seed,
        "trajectories": count,
        "iterations": iterations,
        "rng": "ChaCha8, seed_from_u64",
    });
    let mut r = Report::new(table, config);
    r.results = Some(json!({"samples": r.table.to_json(), "stopped": stopped}));
    r.residuals = json!({"stopped_trajectories": stopped.len()});
    let pts: Vec<[f64; 2]> = trajs
        .iter()
        .flat_map(|tr| tr.samples.iter().map(|&(_, phi, theta)| [phi, theta]))
        .collect();
    r.svg = Some(vec![CurveTrace::from_points("phase", pts)]);
    r.scatter = true;
    Ok(r)
}

fn orbit_rows(table: &mut Table, name: &str, b: f64, o: &PeriodicOrbit) {
    for (i, l) in o.points_line.iter().enumerate() {
        let (arc, phi, theta) = match o.points_angular.as_ref().and_then(|a| a.get(i)) {
            Some(a) => (format!("{:?}", a.arc).to_lowercase(), a.phi, a.theta),
            None => ("none".to_string(), f64::NAN, f64::NAN),
        };
        table.push(vec![
            b.into(),
            name.into(),
            i.into(),
            l.d_left.into(),
            l.d_right.into(),
            arc.into(),
            phi.into(),
            theta.into(),
            o.multiplier_half_trace.into(),
            format!("{:?}", o.classification).to_lowercase().into(),
        ]);
    }
}

fn cmd_orbit(opts: &Opts) -> CliResult<Report> {
    let bs = b_values(opts, 1.55)?;
    let mut table = Table::new(&[
        "b",
        "orbit",
        "index",
        "d_left",
        "d_right",
        "arc",
        "phi",
        "theta",
        "half_trace",
        "stability",
    ]);
    let mut residuals = Vec::new();
    let mut curves = Vec::new();
    for &b in &bs {
        let t = Billiard::new(b)?;
        let mut orbits = vec![("o2", periodic::orbit_o2(&t))];
        if let Ok(o) = periodic::orbit_elliptic6(&t) {
            orbits.push(("elliptic6", o));
        }
        if let Ok(o) = periodic::orbit_hyperbolic6(&t) {
            orbits.push(("hyperbolic6", o));
        }
        for (name, o) in &orbits {
            orbit_rows(&mut table, name, b, o);
            let closing = if *name == "o2" {
                o.angular_closing_error(&t).and_then(|r| r.ok())
            } else {
                o.line_closing_error(&t).ok()
            };
            residuals.push(json!({"b": json_f64(b), "orbit": name, "closing_error": closing.map(json_f64)}));
            curves.push(CurveTrace::from_points(
                format!("{name} b={}", fmt17(b)),
                o.points_line.iter().map(|l| l.to_array()).collect(),
            ));
        }
    }
    let mut r = Report::new(table, json!({"b": b_range_json(&bs)}));
    r.residuals = Value::Array(residuals);
    r.svg = Some(curves);
    r.scatter = true;
    Ok(r)
}

fn cmd_periodic(opts: &Opts) -> CliResult<Report> {
    let bs = b_values(opts, 1.52)?;
    let grid = opts.grid.unwrap_or(200);
    let region = Rect::square(0.0, 1.0);
    let mut table = Table::new(&["b", "d_left", "d_right", "half_trace", "stability", "in_domain", "residual"]);
    let mut curves = Vec::new();
    for &b in &bs {
        let t = Billiard::new(b)?;
        let found = exhaustive_theta_fixed_points(&t, region, grid);
        for p in &found {
            let ht = genmap::jacobian(&t, GenMapKind::Theta, p)?.half_trace();
            let res = genmap::apply(&t, GenMapKind::Theta, p)?.dist(p);
            table.push(vec![
                b.into(),
                p.d_left.into(),
                p.d_right.into(),
                ht.into(),
                format!("{:?}", periodic::classify(ht)).to_lowercase().into(),
                genmap::in_domain(&t, p).to_string().into(),
                res.into(),
            ]);
        }
        curves.push(CurveTrace::from_points(
            format!("theta-fixed b={}", fmt17(b)),
            found.iter().map(|p| p.to_array()).collect(),
        ));
    }
    let config = json!({"b": b_range_json(&bs), "grid": grid, "region": [0.0, 1.0]});
    let mut r = Report::new(table, config);
    r.svg = Some(curves);
    r.scatter = true;
    Ok(r)
}

fn cmd_curves(opts: &Opts) -> CliResult<Report> {
    let b = single_b(opts, 1.6)?;
    let n = opts.grid.unwrap_or(400).max(2);
    let t = Billiard::new(b)?;
    let mut curves: Vec<CurveTrace> = Vec::new();
    for kind in CurveKind::ALL {
        curves.extend(curve_c(&t, kind, n)?);
    }
    for id in SingularCurveId::ALL {
        let c = genmap::singular_curve(&t, id, n);
        if !c.is_empty() {
            curves.push(c);
        }
    }
    for (k, name) in [(GenMapKind::Phi, "Fix(Phi)"), (GenMapKind::Psi, "Fix(Psi)")] {
        let mut c = genmap::fixed_locus(&t, k, n)?;
        c.label = name.to_string();
        curves.push(c);
    }
    let mut table = Table::new(&["curve", "index", "param", "d_left", "d_right"]);
    for c in &curves {
        for (i, (p, s)) in c.points.iter().zip(&c.params).enumerate() {
            table.push(vec![c.label.as_str().into(), i.into(), (*s).into(), p[0].into(), p[1].into()]);
        }
    }
    let mut residuals = serde_json::Map::new();
    for (kind, map) in [(CurveKind::Phi, GenMapKind::Phi), (CurveKind::Psi, GenMapKind::Psi)] {
        let c = &curve_c(&t, kind, n)?[0];
        let mut worst = 0.0f64;
        for p in &c.points {
            if let Ok(q) = genmap::apply(&t, map, &crate::geometry::LineState::from_array(*p)) {
                worst = worst.max(c.distance_to(q.to_array()));
            }
        }
        residuals.insert(format!("{}_invariance", kind.name()), json_f64(worst));
    }
    let mut r = Report::new(table, json!({"b": json_f64(b), "samples": n}));
    r.residuals = Value::Object(residuals);
    r.svg = Some(curves);
    Ok(r)
}

fn cmd_manifold(opts: &Opts) -> CliResult<Report> {
    let b = single_b(opts, 1.51)?;
    let t = Billiard::new(b)?;
    let s = manifolds::grow_branch(&t, BasePoint::P0, BranchKind::Stable, Side::PlusQuadrant, manifolds::DEFAULT_BUDGET)?;
    let u = manifolds::grow_branch(&t, BasePoint::Q0, BranchKind::Unstable, Side::PlusQuadrant, manifolds::DEFAULT_BUDGET)?;
    let mut table = Table::new(&["branch", "index", "sigma", "d_left", "d_right"]);
    let mut residuals = Vec::new();
    let mut curves = Vec::new();
    for (name, br) in [("stable_P0", &s), ("unstable_Q0", &u)] {
        for (i, (p, sg)) in br.polyline.points.iter().zip(&br.polyline.params).enumerate() {
            table.push(vec![name.into(), i.into(), (*sg).into(), p[0].into(), p[1].into()]);
        }
        let crossing = manifolds::diagonal_crossing(&t, br);
        residuals.push(json!({
            "branch": name,
            "invariance_defect": json_f64(manifolds::invariance_defect(&t, br)?),
            "growth_steps": br.growth_steps,
            "factor": json_f64(br.factor),
            "crossing": crossing.map(|c| json!({
                "d_left": json_f64(c.point.d_left),
                "d_right": json_f64(c.point.d_right),
                "angle": json_f64(c.angle),
                "sigma": json_f64(c.sigma),
            })),
        }));
        let mut c = br.polyline.clone();
        c.label = name.to_string();
        curves.push(c);
    }
    let mut r = Report::new(table, json!({"b": json_f64(b), "seed_offset": json_f64(manifolds::SEED_OFFSET)}));
    r.residuals = Value::Array(residuals);
    r.svg = Some(curves);
    Ok(r)
}

fn cmd_splitting_sweep(opts: &Opts) -> CliResult<Report> {
    let bs = if opts.b.is_none() && opts.b_range.is_none() {
        (0..12).map(|i| 1.505 + 0.055 * i as f64 / 11.0).collect()
    } else {
        b_values(opts, 1.51)?
    };
    if let Some(b) = bs.iter().find(|&&b| !(b > 1.5 && b < B_MAX)) {
        return Err(CliError::Usage(format!("b = {b} is outside (1.5, 1 + 2^-1/2)")));
    }
    let rows: Vec<(f64, Option<manifolds::Splitting>, String)> = bs
        .par_iter()
        .map(|&b| {
            let res = Billiard::new(b).and_then(|t| manifolds::splitting(&t));
            match res {
                Ok(s) => (b, Some(s), "ok".to_string()),
                Err(e) => (b, None, format!("failed: {e}")),
            }
        })
        .collect();
    let mut table = Table::new(&["b", "delta", "angle_s", "angle_u", "status"]);
    let mut curve = Vec::new();
    for (b, s, status) in &rows {
        let (d, a_s, a_u) = s.map_or((f64::NAN, f64::NAN, f64::NAN), |s| (s.delta, s.angle_s, s.angle_u));
        table.push(vec![(*b).into(), d.into(), a_s.into(), a_u.into(), status.as_str().into()]);
        if let Some(s) = s {
            curve.push([*b, s.angle_defect]);
        }
    }
    let residuals = Value::Array(
        rows.iter()
            .map(|(b, s, _)| json!({
                    "b": json_f64(*b),
                    "angle_defect": s.map(|s| json_f64(s.angle_defect)),
                    "resolution": s.map(|s| json_f64(s.resolution)),
                }))
            .collect(),
    );
    let mut r = Report::new(table, json!({"b": b_range_json(&bs)}));
    r.residuals = residuals;
    r.svg = Some(vec![CurveTrace::from_points("angle_defect", curve)]);
    r.scatter = true;
    Ok(r)
}

fn cmd_constants(opts: &Opts) -> CliResult<Report> {
    if opts.b.is_some() || opts.b_range.is_some() {
        return Err(CliError::Usage("constants takes no --b".into()));
    }
    let cs = constants::all_constants();
    let mut table = Table::new(&["name", "value", "residual"]);
    for c in &cs {
        table.push(vec![Cell::Text(c.name.into()), c.value.into(), c.residual.into()]);
    }
    let mut r = Report::new(table, json!({}));
    r.residuals = Value::Object(cs.iter().map(|c| (c.name.to_string(), json_f64(c.residual))).collect());
    Ok(r)
}

fn cmd_verify(opts: &Opts) -> CliResult<()> {
    if opts.format == Format::Svg {
        return Err(CliError::Usage("verify has no svg output".into()));
    }
    let filter = opts.filter.as_deref();
    let selected: Vec<_> = verify::checks().into_iter().filter(|c| verify::selected(c, filter)).collect();
    if selected.is_empty() {
        return Err(CliError::Usage(format!("--filter {} selects no checks", filter.unwrap_or(""))));
    }
    let mut results = Vec::new();
    for c in &selected {
        let r = verify::run_check(c);
        println!("{}", verify::report_line(&r));
        results.push(r);
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    let mut table = Table::new(&["id", "name", "group", "passed", "worst", "tolerance", "seconds", "detail"]);
    for r in &results {
        table.push(vec![
            r.id.into(),
            r.name.into(),
            r.group.into(),
            r.passed.to_string().into(),
            r.worst.into(),
            r.tolerance.into(),
            r.seconds.into(),
            r.detail.as_str().into(),
        ]);
    }
    let bytes = match opts.format {
        Format::Csv => table.to_csv(),
        Format::Json => {
            let v = envelope(
                "verify",
                json!({"filter": filter}),
                table.to_json(),
                json!({"failed": failed, "total": results.len()}),
            );
            output::to_json_string(&v).into_bytes()
        }
        Format::Svg => unreachable!(),
    };
    if opts.out.is_some() {
        emit(opts, &bytes)?;
    }
    if failed > 0 {
        return Err(CliError::Verify(format!("{failed} of {} checks failed", results.len())));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(args: &[&str]) -> Opts {
        let mut v = vec!["lemon", "constants"];
        v.extend_from_slice(args);
        Cli::try_parse_from(v).unwrap().opts
    }

    #[test]
    fn b_range_includes_endpoints() {
        let bs = b_values(&opts(&["--b-range", "1.5", "1.6", "3"]), 0.0).unwrap();
        assert_eq!(bs.len(), 3);
        assert_eq!(bs[0], 1.5);
        assert!((bs[2] - 1.6).abs() < 1e-15);
    }

    #[test]
    fn invalid_b_is_a_usage_error() {
        assert!(matches!(b_values(&opts(&["--b", "2.5"]), 0.0), Err(CliError::Usage(_))));
        assert!(matches!(
            b_values(&opts(&["--b-range", "1.5", "1.6", "0"]), 0.0),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(
            b_values(&opts(&["--b", "1.5", "--b-range", "1.5", "1.6", "2"]), 0.0),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(["lemon", "nonsense"]), EXIT_USAGE);
        assert_eq!(run(["lemon", "phase", "--b", "7"]), EXIT_USAGE);
        assert_eq!(run(["lemon", "constants", "--format", "svg"]), EXIT_USAGE);
        assert_eq!(run(["lemon", "verify", "--filter", "no-such-check"]), EXIT_USAGE);
    }
}
