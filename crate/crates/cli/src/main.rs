//! `hypmetric`: evaluate densities and distances, run certification suites,
//! and manage the density-grid cache.
//!
//! Every run prints one JSON document on stdout. Exit codes: 0 pass,
//! 1 failed certificate, 2 usage, 3 domain, 4 data integrity.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use hypmetric::cache::{self, DensityGrid};
use hypmetric::dbar::{self, Coefficient, WitnessDomain};
use hypmetric::inequalities::suites::{self, SuiteConfig};
use hypmetric::inequalities::CheckOptions;
use hypmetric::kobayashi::{GeodesicGrid, MetricDomain};
use hypmetric::motions::{self, MotionSpec};
use hypmetric::rho01::{self, DensityModel, DomainTag, Method, AGARD_DEFAULT_TOL};
use hypmetric::{Certificate, Error};

/// Version of every JSON document the binary emits.
const SCHEMA_VERSION: &str = "1";

#[derive(Parser)]
#[command(name = "hypmetric", version, about = "Hyperbolic densities, Kobayashi distances and certified inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a density or a distance.
    #[command(subcommand)]
    Eval(EvalCommand),
    /// Run a certification suite and write its report.
    Certify(CertifyArgs),
    /// Build, verify or clear precomputed density grids.
    #[command(subcommand)]
    Cache(CacheCommand),
}

#[derive(Subcommand)]
enum EvalCommand {
    /// Density of the twice-punctured plane at a point.
    Rho01 {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_point)]
        z: Complex64,
        #[arg(long, value_enum, default_value_t = EvalMethod::Auto)]
        method: EvalMethod,
        /// Relative tolerance of the area integral.
        #[arg(long, default_value_t = AGARD_DEFAULT_TOL)]
        tol: f64,
    },
    /// Kobayashi distance between two points of a domain.
    Kobayashi {
        #[arg(long, value_enum, default_value_t = DomainArg::Disk)]
        domain: DomainArg,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_point)]
        from: Complex64,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_point)]
        to: Complex64,
        /// Nodes per side of the fast-marching grid (twice-punctured plane).
        #[arg(long, default_value_t = 257)]
        grid: usize,
        /// Half-width of the fast-marching square (twice-punctured plane).
        #[arg(long, default_value_t = 4.0)]
        extent: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum EvalMethod {
    Agard,
    Modular,
    Auto,
}

#[derive(Clone, Copy, ValueEnum)]
enum DomainArg {
    Disk,
    PuncturedDisk,
    TwicePunctured,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Harnack,
    Landau,
    Prop3,
    Schottky,
    Hempel,
    MotionsHolder,
    DbarProp5,
    DbarProp6,
    All,
}

impl Suite {
    const EACH: [Suite; 8] = [
        Suite::Harnack,
        Suite::Landau,
        Suite::Prop3,
        Suite::Schottky,
        Suite::Hempel,
        Suite::MotionsHolder,
        Suite::DbarProp5,
        Suite::DbarProp6,
    ];

    fn name(self) -> &'static str {
        match self {
            Suite::Harnack => "harnack",
            Suite::Landau => "landau",
            Suite::Prop3 => "prop3",
            Suite::Schottky => "schottky",
            Suite::Hempel => "hempel",
            Suite::MotionsHolder => "motions-holder",
            Suite::DbarProp5 => "dbar-prop5",
            Suite::DbarProp6 => "dbar-prop6",
            Suite::All => "all",
        }
    }
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(value_enum)]
    suite: Suite,
    /// Random functions (or query points, for the motion and ∂̄ suites).
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Disk points per function.
    #[arg(long, default_value_t = 10)]
    points: usize,
    /// Drawn from the clock and recorded in the report when absent.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "R", default_value_t = 3f64.ln())]
    r: f64,
    #[arg(long = "Rprime", default_value_t = 1.0)]
    rprime: f64,
    /// Multiplies every certified constant; values below 1 are negative
    /// controls.
    #[arg(long, default_value_t = 1.0)]
    constant_scale: f64,
    #[arg(long, default_value = "certificates.json")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum CacheCommand {
    /// Precompute a density grid of the twice-punctured plane.
    Build {
        #[arg(long)]
        dir: Option<PathBuf>,
        /// `x0,x1,y0,y1`.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_bounds, default_value = "-4,4,-4,4")]
        bounds: [f64; 4],
        /// Nodes per side.
        #[arg(long, default_value_t = 65)]
        n: usize,
        #[arg(long, value_enum, default_value_t = EvalMethod::Modular)]
        method: EvalMethod,
        #[arg(long, default_value_t = AGARD_DEFAULT_TOL)]
        tol: f64,
    },
    /// Re-evaluate a random fraction of the nodes of every grid.
    Verify {
        #[arg(long)]
        dir: Option<PathBuf>,
        #[arg(long, default_value_t = 0.01)]
        fraction: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Remove every grid.
    Clear {
        #[arg(long)]
        dir: Option<PathBuf>,
    },
}

fn parse_point(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected RE,IM, got {s:?}"));
    }
    let re = parts[0].trim().parse::<f64>().map_err(|e| format!("{s:?}: {e}"))?;
    let im = parts[1].trim().parse::<f64>().map_err(|e| format!("{s:?}: {e}"))?;
    Ok(Complex64::new(re, im))
}

fn parse_bounds(s: &str) -> Result<[f64; 4], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{s:?}: {e}")))
        .collect::<Result<_, _>>()?;
    v.try_into().map_err(|_| format!("expected x0,x1,y0,y1, got {s:?}"))
}

/// A run's outcome: the JSON to print and the exit code.
struct Outcome {
    doc: Value,
    code: u8,
}

fn ok(doc: Value) -> Outcome {
    Outcome { doc, code: 0 }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Corrupt { .. } | Error::Io(_) => 4,
        Error::AtSample { source, .. } => exit_code(source),
        _ => 3,
    }
}

fn error_doc(kind: &str, message: &str, code: u8) -> Value {
    json!({"schema_version": SCHEMA_VERSION, "error": kind, "message": message, "exit_code": code})
}

fn core_error(e: &Error) -> Outcome {
    let code = exit_code(e);
    let mut doc = error_doc(e.kind(), &e.to_string(), code);
    if let Error::Corrupt { file, .. } = e {
        doc["file"] = json!(file);
    }
    Outcome { doc, code }
}

fn point(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn eval(cmd: EvalCommand) -> Result<Outcome, Error> {
    match cmd {
        EvalCommand::Rho01 { z, method, tol } => {
            let v = match method {
                EvalMethod::Agard => rho01::rho01_agard(z, tol)?,
                EvalMethod::Modular => rho01::rho01_modular(z)?,
                EvalMethod::Auto => rho01::rho01_auto(z, tol)?,
            };
            Ok(ok(json!({
                "schema_version": SCHEMA_VERSION,
                "z": point(z),
                "rho": v.rho,
                "method": v.method.name(),
                "err_est": v.err_est,
            })))
        }
        EvalCommand::Kobayashi {
            domain,
            from,
            to,
            grid,
            extent,
        } => {
            let (name, d) = match domain {
                DomainArg::Disk => ("disk", MetricDomain::Disk),
                DomainArg::PuncturedDisk => ("punctured-disk", MetricDomain::PuncturedDisk),
                DomainArg::TwicePunctured => ("twice-punctured", MetricDomain::TwicePuncturedPlane),
            };
            for p in [from, to] {
                if !d.contains(p) {
                    return Err(Error::domain(format!("{p} is not in the {name} domain")));
                }
            }
            let (distance, method) = match d.distance(from, to) {
                Some(r) => (r?, "closed-form"),
                None => {
                    let model = DensityModel::twice_punctured();
                    let mut g = GeodesicGrid::new(&model, [-extent, extent, -extent, extent], grid, grid)?;
                    g.solve(from)?;
                    let arrival = g
                        .distance_at(to)?
                        .value()
                        .ok_or_else(|| Error::domain(format!("{to} is not reached inside the grid")))?;
                    (arrival, "fast-marching")
                }
            };
            Ok(ok(json!({
                "schema_version": SCHEMA_VERSION,
                "domain": name,
                "from": point(from),
                "to": point(to),
                "distance": distance,
                "method": method,
            })))
        }
    }
}

/// Seeded points in `|z| < radius`, drawn from stream `stream` of `seed`.
fn disk_points(seed: u64, stream: u64, n: usize, radius: f64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    (0..n)
        .map(|_| Complex64::from_polar(radius * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU)))
        .collect()
}

fn run_suite(suite: Suite, args: &CertifyArgs, seed: u64) -> Result<Vec<Value>, Error> {
    let cfg = SuiteConfig::new(args.samples, args.points, seed).scaled(args.constant_scale);
    let scale = args.constant_scale;
    let one = |c: Certificate| -> Result<Vec<Value>, Error> { Ok(vec![serde_json::to_value(c).expect("serialises")]) };
    match suite {
        Suite::Harnack => one(suites::harnack_suite(&cfg)?),
        Suite::Landau => one(suites::landau_suite(&cfg)?),
        Suite::Prop3 => one(suites::prop3_suite(&cfg)?),
        Suite::Schottky => one(suites::schottky_suite(&cfg, args.r, args.rprime)?),
        Suite::Hempel => one(suites::hempel_suite(&cfg)?),
        Suite::MotionsHolder => {
            let opts = CheckOptions::with_seed(seed).tolerance(1e-9).scaled(scale);
            let mut out = Vec::new();
            for spec in [
                MotionSpec::two_point_example(),
                MotionSpec::radial_stretch(&[Complex64::new(0.5, 0.0), Complex64::new(2.0, 1.0)]),
            ] {
                let m = motions::build_motion(spec, args.r)?;
                let pts = motions::ball_samples(&m, args.r, args.samples, seed);
                let report = motions::check_holder_spherical(&m, args.r, &pts, &m.all_pairs(), &opts)?;
                out.push(serde_json::to_value(report).expect("serialises"));
            }
            Ok(out)
        }
        Suite::DbarProp5 => {
            let a = Coefficient::DiskIndicator {
                c: Complex64::new(0.3, 0.0),
                center: Complex64::new(0.0, 0.0),
                radius: 1.0,
            };
            let w = dbar::make_witness(a, Complex64::new(3.0, 0.0), 1.0, WitnessDomain::Disk, 4.0, 1.5)?;
            let pts = disk_points(seed, 0, args.samples, 0.99);
            one(dbar::check_prop5(&w, &pts, &CheckOptions::with_seed(seed).scaled(scale))?)
        }
        Suite::DbarProp6 => {
            let a = Coefficient::DiskIndicator {
                c: Complex64::new(0.3, 0.0),
                center: Complex64::new(0.0, 0.0),
                radius: 1.0,
            };
            let w = dbar::make_witness(a, Complex64::new(3.0, 0.0), 1.0, WitnessDomain::Plane, 4.0, 1.5)?;
            let pts = disk_points(seed, 0, args.samples, 2.0);
            let opts = CheckOptions::with_seed(seed).tolerance(1e-6).scaled(scale);
            let mut out = one(dbar::check_prop6(&w, &pts, &opts)?)?;
            out.extend(one(dbar::check_prop6_corollaries(&w, &opts)?)?);
            Ok(out)
        }
        Suite::All => {
            let mut out = Vec::new();
            for s in Suite::EACH {
                out.extend(run_suite(s, args, seed)?);
            }
            Ok(out)
        }
    }
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn certify(args: CertifyArgs) -> Result<Outcome, Error> {
    let seed = args.seed.unwrap_or_else(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_nanos() as u64)
            .unwrap_or(0)
    });
    if !(args.constant_scale > 0.0) || !args.constant_scale.is_finite() {
        return Err(Error::domain(format!("constant scale must be positive, got {}", args.constant_scale)));
    }
    let certificates = run_suite(args.suite, &args, seed)?;
    let pass = certificates.iter().all(|c| c["pass"] == json!(true));
    let report = json!({
        "schema_version": SCHEMA_VERSION,
        "suite": args.suite.name(),
        "seed": seed,
        "samples": args.samples,
        "points": args.points,
        "R": args.r,
        "Rprime": args.rprime,
        "constant_scale": args.constant_scale,
        "pass": pass,
        "certificates": certificates,
        "generated_at_unix": unix_now(),
    });
    write_report(&args.out, &report)?;
    Ok(Outcome {
        doc: report,
        code: if pass { 0 } else { 1 },
    })
}

fn write_report(path: &Path, report: &Value) -> Result<(), Error> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, serde_json::to_string_pretty(report).expect("serialises") + "\n")?;
    Ok(())
}

fn model_for(method: Method, tol: f64) -> Result<DensityModel, Error> {
    DensityModel::new(DomainTag::TwicePuncturedPlane, method, tol)
}

fn cache(cmd: CacheCommand) -> Result<Outcome, Error> {
    match cmd {
        CacheCommand::Build {
            dir,
            bounds,
            n,
            method,
            tol,
        } => {
            let dir = dir.unwrap_or_else(cache::cache_dir);
            let method = match method {
                EvalMethod::Agard => Method::AgardIntegral,
                EvalMethod::Modular => Method::ModularCovering,
                EvalMethod::Auto => Method::Auto,
            };
            let grid = DensityGrid::build(&model_for(method, tol)?, bounds, n, n)?;
            fs::create_dir_all(&dir)?;
            let path = dir.join(cache::cache_file_name(&grid.header));
            grid.write(&path)?;
            Ok(ok(json!({
                "schema_version": SCHEMA_VERSION,
                "action": "build",
                "files": [path.display().to_string()],
                "nodes": grid.header.len(),
            })))
        }
        CacheCommand::Verify { dir, fraction, seed } => {
            if !(fraction > 0.0 && fraction <= 1.0) {
                return Err(Error::domain(format!("fraction must be in (0, 1], got {fraction}")));
            }
            let dir = dir.unwrap_or_else(cache::cache_dir);
            let mut files = Vec::new();
            for path in cache::list_grids(&dir)? {
                let name = path.display().to_string();
                let grid = DensityGrid::read(&path)?;
                let method = Method::from_tag(grid.header.method).ok_or_else(|| Error::Corrupt {
                    file: name.clone(),
                    reason: format!("unknown method tag {}", grid.header.method),
                })?;
                let model = model_for(method, grid.header.tolerance.max(1e-12))?;
                let worst = grid.verify(&model, fraction, seed, &name)?;
                files.push(json!({"file": name, "worst_deviation": worst}));
            }
            Ok(ok(json!({
                "schema_version": SCHEMA_VERSION,
                "action": "verify",
                "files": files,
            })))
        }
        CacheCommand::Clear { dir } => {
            let dir = dir.unwrap_or_else(cache::cache_dir);
            let removed = cache::clear(&dir)?;
            Ok(ok(json!({
                "schema_version": SCHEMA_VERSION,
                "action": "clear",
                "removed": removed,
            })))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            let doc = error_doc("usage", e.to_string().lines().next().unwrap_or("usage error"), 2);
            emit(&doc);
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Eval(cmd) => eval(cmd),
        Command::Certify(args) => certify(args),
        Command::Cache(cmd) => cache(cmd),
    };
    let outcome = result.unwrap_or_else(|e| core_error(&e));
    emit(&outcome.doc);
    ExitCode::from(outcome.code)
}

/// Write errors (a closed pipe) are ignored; the exit code still reports.
fn emit(doc: &Value) {
    let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(doc).expect("serialises"));
}
