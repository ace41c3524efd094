//! Randomized certification suites over the admissible families.
//!
//! Function `k` of a suite draws from the ChaCha stream `k` of the suite seed,
//! so a suite replays bit-identically and any subset of functions can be rerun
//! alone. Per-function certificates merge into one record whose witness is
//! prefixed by the function index.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::family::{self, disk_point};
use super::{
    check_arg_refined, check_harnack, check_hempel_implicit, check_landau, check_prop3,
    check_punctured_disk_harnack, check_schottky, CheckOptions,
};
use crate::certificate::{Certificate, SlackRecord};
use crate::error::{Error, Result};
use crate::function::{AnalyticFunction, Codomain, Expr};
use crate::geometry::{BaseDisk, MobiusMap};
use crate::rho01::c01;

/// Radius of the disk the sample points are drawn from.
pub const SAMPLE_RADIUS: f64 = 0.9;

/// Tolerance for certificates that rely on numeric derivatives.
pub const DERIVATIVE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub functions: usize,
    pub points: usize,
    pub seed: u64,
    pub constant_scale: f64,
}

impl SuiteConfig {
    pub fn new(functions: usize, points: usize, seed: u64) -> Self {
        Self {
            functions,
            points,
            seed,
            constant_scale: 1.0,
        }
    }

    pub fn scaled(mut self, scale: f64) -> Self {
        self.constant_scale = scale;
        self
    }

    fn stream(&self, k: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(k as u64);
        rng
    }

    fn options(&self, tolerance: f64) -> CheckOptions {
        CheckOptions {
            seed: self.seed,
            tolerance,
            constant_scale: self.constant_scale,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.functions == 0 || self.points == 0 {
            return Err(Error::domain("sample counts must be at least 1"));
        }
        Ok(())
    }
}

fn absorb(total: SlackRecord, k: usize, cert: &Certificate) -> SlackRecord {
    let mut witness = vec![k as f64];
    witness.extend_from_slice(&cert.witness);
    let part = SlackRecord {
        count: cert.samples,
        worst: cert.worst_slack,
        witness,
        index: k,
    };
    total.merge(part)
}

fn finish(rec: SlackRecord, name: &str, cfg: &SuiteConfig, tolerance: f64) -> Result<Certificate> {
    let mut cert = rec.finish(name, cfg.seed, tolerance)?;
    cert.constants.insert("C01".into(), c01());
    cert.constants.insert("functions".into(), cfg.functions as f64);
    if cfg.constant_scale != 1.0 {
        cert.constants.insert("constant_scale".into(), cfg.constant_scale);
    }
    Ok(cert)
}

fn random_pairs(rng: &mut ChaCha8Rng, n: usize) -> Vec<(Complex64, Complex64)> {
    let z0 = disk_point(rng, 0.5);
    (0..n).map(|_| (disk_point(rng, SAMPLE_RADIUS), z0)).collect()
}

pub fn harnack_suite(cfg: &SuiteConfig) -> Result<Certificate> {
    cfg.validate()?;
    let opts = cfg.options(1e-9);
    let disk = BaseDisk::unit();
    let mut rec = SlackRecord::new();
    for k in 0..cfg.functions {
        let mut rng = cfg.stream(k);
        let u = family::positive_real_part(&mut rng);
        let pairs = random_pairs(&mut rng, cfg.points);
        rec = absorb(rec, k, &check_harnack(&u, &disk, &pairs, &opts)?);
    }
    finish(rec, "harnack", cfg, opts.tolerance)
}

pub fn landau_suite(cfg: &SuiteConfig) -> Result<Certificate> {
    cfg.validate()?;
    let opts = cfg.options(DERIVATIVE_TOLERANCE);
    let disk = BaseDisk::unit();
    let mut rec = SlackRecord::new();
    for k in 0..cfg.functions {
        let mut rng = cfg.stream(k);
        let (_, f) = family::omitting_01(&mut rng);
        let pts: Vec<Complex64> = (0..cfg.points).map(|_| disk_point(&mut rng, SAMPLE_RADIUS)).collect();
        rec = absorb(rec, k, &check_landau(&f, &disk, &pts, &opts)?);
    }
    finish(rec, "landau", cfg, opts.tolerance)
}

/// The two-point envelopes (for `log|f|` and for a continuous
/// `log f`) and the argument-refined envelope, on every function.
pub fn prop3_suite(cfg: &SuiteConfig) -> Result<Certificate> {
    cfg.validate()?;
    let opts = cfg.options(1e-9);
    let disk = BaseDisk::unit();
    let mut rec = SlackRecord::new();
    for k in 0..cfg.functions {
        let mut rng = cfg.stream(k);
        let (_, f) = family::omitting_01(&mut rng);
        let pairs = random_pairs(&mut rng, cfg.points);
        let a = check_prop3(&f, &disk, &pairs, true, &opts)?;
        let b = check_arg_refined(&f, &disk, &pairs, &opts)?;
        rec = absorb(rec, k, &a);
        rec = absorb(rec, k, &b);
    }
    finish(rec, "prop3", cfg, opts.tolerance)
}

pub fn hempel_suite(cfg: &SuiteConfig) -> Result<Certificate> {
    cfg.validate()?;
    let opts = cfg.options(1e-9);
    let disk = BaseDisk::unit();
    let mut rec = SlackRecord::new();
    for k in 0..cfg.functions {
        let mut rng = cfg.stream(k);
        let (_, f) = family::omitting_01(&mut rng);
        let pairs = random_pairs(&mut rng, cfg.points);
        rec = absorb(rec, k, &check_hempel_implicit(&f, &disk, &pairs, &opts)?);
    }
    finish(rec, "hempel", cfg, opts.tolerance)
}

pub fn punctured_disk_suite(cfg: &SuiteConfig) -> Result<Certificate> {
    cfg.validate()?;
    let opts = cfg.options(1e-9);
    let disk = BaseDisk::unit();
    let mut rec = SlackRecord::new();
    for k in 0..cfg.functions {
        let mut rng = cfg.stream(k);
        let f = family::punctured_disk_valued(&mut rng);
        let pairs = random_pairs(&mut rng, cfg.points);
        rec = absorb(rec, k, &check_punctured_disk_harnack(&f, &disk, &pairs, &opts)?);
    }
    finish(rec, "punctured-disk-harnack", cfg, opts.tolerance)
}

/// `|f(z)| ≤ M(R, R′)` over the family with base point 0, `|f(0)| ≤ R′`, and
/// points of the closed Kobayashi ball of radius `R` (half of them on its
/// boundary circle). Function 0 is the covering `S` itself, function 1 is
/// `1/S`. The certificate reports the bound and the empirical supremum.
pub fn schottky_suite(cfg: &SuiteConfig, r: f64, rp: f64) -> Result<Certificate> {
    cfg.validate()?;
    if !(r >= 0.0) || !(rp > 0.0) {
        return Err(Error::domain(format!("need R ≥ 0 and R′ > 0, got R = {r}, R′ = {rp}")));
    }
    let opts = cfg.options(1e-9);
    let disk = BaseDisk::unit();
    let z0 = Complex64::new(0.0, 0.0);
    let radius = disk.kobayashi_ball_radius(r) * (1.0 - 1e-12);
    let mut rec = SlackRecord::new();
    let mut sup: f64 = 0.0;
    let mut bound = f64::NAN;
    for k in 0..cfg.functions {
        let mut rng = cfg.stream(k);
        let s = AnalyticFunction::new(Expr::covering(), Codomain::OmitsZeroOne);
        let f = match k {
            0 => s,
            1 => family::reciprocal(&s),
            _ => {
                let mut chosen = None;
                for _ in 0..100 {
                    let (_, f) = family::omitting_01(&mut rng);
                    let v = f.eval(z0)?.norm();
                    if v <= rp {
                        chosen = Some(f);
                        break;
                    }
                    let g = family::reciprocal(&f);
                    if 1.0 / v <= rp {
                        chosen = Some(g);
                        break;
                    }
                }
                chosen.ok_or_else(|| Error::domain(format!("no family member with |f(0)| ≤ {rp}")))?
            }
        };
        if f.eval(z0)?.norm() > rp {
            continue;
        }
        let mut pts: Vec<Complex64> = (0..cfg.points)
            .map(|i| {
                if i % 2 == 0 {
                    Complex64::from_polar(radius, rand::Rng::gen_range(&mut rng, 0.0..std::f64::consts::TAU))
                } else {
                    disk_point(&mut rng, radius)
                }
            })
            .collect();
        if k < 2 {
            pts.push(Complex64::new(-radius, 0.0));
            pts.push(Complex64::new(radius, 0.0));
        }
        let cert = check_schottky(&f, &disk, z0, r, rp, &pts, &opts)?;
        sup = sup.max(cert.constants["empirical_sup"]);
        bound = cert.constants["bound"];
        rec = absorb(rec, k, &cert);
    }
    let mut cert = finish(rec, "schottky", cfg, opts.tolerance)?;
    cert.constants.insert("bound".into(), bound);
    cert.constants.insert("empirical_sup".into(), sup);
    cert.constants.insert("R".into(), r);
    cert.constants.insert("Rprime".into(), rp);
    Ok(cert)
}

/// Ratios of the two-point quotient to its upper envelope for the covering
/// `S` at the real points `−r`; they tend to 1 as `r → 0`.
pub fn covering_envelope_ratios(radii: &[f64]) -> Result<Vec<f64>> {
    let s = AnalyticFunction::new(Expr::covering(), Codomain::OmitsZeroOne);
    let disk = BaseDisk::unit();
    let c = c01();
    radii
        .iter()
        .map(|&r| {
            let z = Complex64::new(-r, 0.0);
            let q = (c + s.eval(z)?.norm().ln().abs()) / c;
            Ok(q / disk.kobayashi(z, Complex64::new(0.0, 0.0))?.exp())
        })
        .collect()
}

/// Same for the argument-refined quotient along an arbitrary direction.
pub fn covering_arg_refined_ratios(points: &[Complex64]) -> Result<Vec<f64>> {
    let s = AnalyticFunction::new(Expr::covering(), Codomain::OmitsZeroOne);
    let disk = BaseDisk::unit();
    let c = c01();
    let z0 = Complex64::new(0.0, 0.0);
    points
        .iter()
        .map(|&z| {
            let lz = super::anchored_log(&s, &disk, 0, z)?;
            let l0 = super::anchored_log(&s, &disk, 0, z0)?;
            let rotated = lz - Complex64::new(0.0, l0.im);
            let q = (c + rotated.norm()) / (c + l0.re.abs());
            Ok(q / disk.kobayashi(z, z0)?.exp())
        })
        .collect()
}

/// The covering precomposed with a rotation, `S(e^{iθ}z)`; extremal for
/// every envelope at the origin.
pub fn rotated_covering(theta: f64) -> AnalyticFunction {
    let rot = MobiusMap::disk_automorphism(Complex64::new(0.0, 0.0), theta).expect("rotation");
    AnalyticFunction::new(Expr::covering().compose(Expr::mobius(rot)), Codomain::OmitsZeroOne)
}
