//! Closed-form bounds and pointwise certifiers for Harnack, Landau and
//! Schottky-type inequalities on a disk base.
//!
//! Every certifier audits its function's codomain at the points it uses,
//! computes a slack per sample and folds the samples into a [`Certificate`].
//! Two-sided multiplicative envelopes use log-space slack
//! `κ − |log ratio|`; one-sided bounds use `(bound − value)/max(1, |bound|)`
//! unless stated otherwise.
//!
//! [`CheckOptions::constant_scale`] multiplies the constant of the bound
//! (`C₀,₁` where it occurs, otherwise `κ`); values below 1 give negative
//! controls.

pub mod family;
pub mod suites;

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::certificate::{envelope_slack, upper_slack, Certificate, SlackRecord};
use crate::error::{Error, Result};
use crate::function::{AnalyticFunction, Codomain};
use crate::geometry::BaseDisk;
use crate::rho01::{c01, hempel_radial_integral};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckOptions {
    pub seed: u64,
    pub tolerance: f64,
    pub constant_scale: f64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            tolerance: 1e-9,
            constant_scale: 1.0,
        }
    }
}

impl CheckOptions {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    pub fn tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn scaled(mut self, scale: f64) -> Self {
        self.constant_scale = scale;
        self
    }

    fn c(&self) -> f64 {
        c01() * self.constant_scale
    }
}

/// `(e^{−κ}, e^{κ})`.
pub fn harnack_envelope(kappa: f64) -> Result<(f64, f64)> {
    if !(kappa >= 0.0) {
        return Err(Error::domain(format!("κ = {kappa} must be nonnegative")));
    }
    Ok(((-kappa).exp(), kappa.exp()))
}

/// `|f(z0)|^α M^{1−α}` with `α = e^{−κ}`.
pub fn two_constants_bound(f_at_z0: Complex64, m: f64, kappa: f64) -> Result<f64> {
    let a = f_at_z0.norm();
    if !(a > 0.0 && a < m) {
        return Err(Error::domain(format!("|f(z0)| = {a} must lie in (0, {m})")));
    }
    if !(kappa >= 0.0) {
        return Err(Error::domain(format!("κ = {kappa} must be nonnegative")));
    }
    let alpha = (-kappa).exp();
    Ok((alpha * a.ln() + (1.0 - alpha) * m.ln()).exp())
}

fn check_omits_01(w: Complex64) -> Result<()> {
    if w == Complex64::new(0.0, 0.0) || w == Complex64::new(1.0, 0.0) {
        return Err(Error::Puncture { z: w });
    }
    Ok(())
}

/// `|V|_κ · |f| · (C₀,₁ + |log|f||)`.
pub fn landau_bound(f_val: Complex64, royden_norm: f64) -> Result<f64> {
    landau_bound_with(f_val, royden_norm, c01())
}

fn landau_bound_with(f_val: Complex64, royden_norm: f64, c: f64) -> Result<f64> {
    check_omits_01(f_val)?;
    if !(royden_norm >= 0.0) {
        return Err(Error::domain(format!("|V|_κ = {royden_norm} must be nonnegative")));
    }
    let r = f_val.norm();
    Ok(royden_norm * r * (c + r.ln().abs()))
}

/// `(C₀,₁ + |Re h(z0)|) e^κ + |Im h(z0)| − C₀,₁`.
pub fn cor4_growth_bound(h_at_z0: Complex64, kappa: f64) -> f64 {
    cor4_bound_with(h_at_z0, kappa, c01())
}

fn cor4_bound_with(h0: Complex64, kappa: f64, c: f64) -> f64 {
    (c + h0.re.abs()) * kappa.exp() + h0.im.abs() - c
}

/// `e^{−C₀,₁}(e^{C₀,₁} max(1, R′))^{e^R}`, evaluated as
/// `exp(C₀,₁(e^R − 1) + e^R log max(1, R′))`.
pub fn schottky_bound(r: f64, rp: f64) -> Result<f64> {
    schottky_bound_with(r, rp, c01())
}

fn schottky_bound_with(r: f64, rp: f64, c: f64) -> Result<f64> {
    if !(r >= 0.0) || !(rp > 0.0) {
        return Err(Error::domain(format!("need R ≥ 0 and R′ > 0, got R = {r}, R′ = {rp}")));
    }
    Ok(log_schottky(r, rp, c).exp())
}

/// `log M(R, R′)`; finite where `M` itself overflows.
pub fn log_schottky_bound(r: f64, rp: f64) -> Result<f64> {
    if !(r >= 0.0) || !(rp > 0.0) {
        return Err(Error::domain(format!("need R ≥ 0 and R′ > 0, got R = {r}, R′ = {rp}")));
    }
    Ok(log_schottky(r, rp, c01()))
}

fn log_schottky(r: f64, rp: f64, c: f64) -> f64 {
    c * (r.exp() - 1.0) + r.exp() * rp.max(1.0).ln()
}

/// Checks `f` against `codomain` at every point.
pub fn audit_points(f: &AnalyticFunction, codomain: Codomain, points: &[Complex64]) -> Result<()> {
    for &z in points {
        let w = f.eval(z).map_err(|e| e.at_sample(z))?;
        if !(codomain.margin(w) > 0.0) {
            return Err(Error::Audit {
                witness: z,
                reason: format!("value {w} violates {codomain:?}"),
            });
        }
    }
    Ok(())
}

fn pair_points(pairs: &[(Complex64, Complex64)]) -> Vec<Complex64> {
    pairs.iter().flat_map(|&(a, b)| [a, b]).collect()
}

fn pair_witness(z: Complex64, z0: Complex64) -> [f64; 4] {
    [z.re, z.im, z0.re, z0.im]
}

/// Continuous logarithm of `f` at `z`, anchored at the disk centre with the
/// principal value plus `2πi·branch`.
pub fn anchored_log(f: &AnalyticFunction, disk: &BaseDisk, branch: i64, z: Complex64) -> Result<Complex64> {
    let anchor = f.eval(disk.center)?;
    if anchor.norm() == 0.0 {
        return Err(Error::Singular { z: disk.center });
    }
    let l0 = anchor.ln() + Complex64::new(0.0, 2.0 * PI * branch as f64);
    if z == disk.center {
        return Ok(l0);
    }
    f.continuous_log(disk.center, z, l0)
}

fn check_in(disk: &BaseDisk, points: &[Complex64]) -> Result<()> {
    for &z in points {
        if !disk.contains(z) {
            return Err(Error::domain(format!("point {z} is outside the base disk")));
        }
    }
    Ok(())
}

/// `e^{−κ} ≤ u(z)/u(z0) ≤ e^{κ}` for `u = Re F`, `F` holomorphic with
/// positive real part.
pub fn check_harnack(
    f: &AnalyticFunction,
    disk: &BaseDisk,
    pairs: &[(Complex64, Complex64)],
    opts: &CheckOptions,
) -> Result<Certificate> {
    let pts = pair_points(pairs);
    check_in(disk, &pts)?;
    audit_points(f, Codomain::PositiveRealPart, &pts)?;
    let mut rec = SlackRecord::new();
    for (k, &(z, z0)) in pairs.iter().enumerate() {
        let ratio = f.eval(z)?.re / f.eval(z0)?.re;
        let kappa = disk.kobayashi(z, z0)? * opts.constant_scale;
        rec.push(k, envelope_slack(ratio, kappa), &pair_witness(z, z0));
    }
    rec.finish("harnack", opts.seed, opts.tolerance)
}

/// `|f(z)| ≤ |f(z0)|^α M^{1−α}` for nonvanishing `f` with `|f| < M`;
/// slack in log space.
pub fn check_two_constants(
    f: &AnalyticFunction,
    disk: &BaseDisk,
    z0: Complex64,
    m: f64,
    points: &[Complex64],
    opts: &CheckOptions,
) -> Result<Certificate> {
    check_in(disk, points)?;
    audit_points(f, Codomain::BoundedNonvanishing { bound: m }, points)?;
    audit_points(f, Codomain::BoundedNonvanishing { bound: m }, &[z0])?;
    let f0 = f.eval(z0)?;
    let mut rec = SlackRecord::new();
    for (k, &z) in points.iter().enumerate() {
        let kappa = disk.kobayashi(z, z0)? * opts.constant_scale;
        let bound = two_constants_bound(f0, m, kappa)?;
        let slack = bound.ln() - f.eval(z)?.norm().ln();
        rec.push(k, slack, &[z.re, z.im]);
    }
    rec.finish("two-constants", opts.seed, opts.tolerance)
}

/// Sample-level record of the `log|f|` and `log f` envelopes for one function.
fn prop3_slacks(
    f: &AnalyticFunction,
    disk: &BaseDisk,
    z: Complex64,
    z0: Complex64,
    use_log_branch: bool,
    c: f64,
) -> Result<f64> {
    let kappa = disk.kobayashi(z, z0)?;
    let (fz, f0) = (f.eval(z)?, f.eval(z0)?);
    let q = |w: Complex64| c + w.norm().ln().abs();
    let mut slack = envelope_slack(q(fz) / q(f0), kappa);
    if use_log_branch {
        let lz = anchored_log(f, disk, 0, z)?;
        let l0 = anchored_log(f, disk, 0, z0)?;
        slack = slack.min(envelope_slack((c + lz.norm()) / (c + l0.norm()), kappa));
    }
    Ok(slack)
}

/// `e^{−κ} ≤ (C₀,₁ + |log|f(z)||)/(C₀,₁ + |log|f(z0)||) ≤ e^{κ}` and, with
/// `use_log_branch`, the same for a continuous `log f`.
pub fn check_prop3(
    f: &AnalyticFunction,
    disk: &BaseDisk,
    pairs: &[(Complex64, Complex64)],
    use_log_branch: bool,
    opts: &CheckOptions,
) -> Result<Certificate> {
    let pts = pair_points(pairs);
    check_in(disk, &pts)?;
    audit_points(f, Codomain::OmitsZeroOne, &pts)?;
    let c = opts.c();
    let mut rec = SlackRecord::new();
    for (k, &(z, z0)) in pairs.iter().enumerate() {
        let s = prop3_slacks(f, disk, z, z0, use_log_branch, c).map_err(|e| e.at_sample(z))?;
        rec.push(k, s, &pair_witness(z, z0));
    }
    let mut cert = rec.finish("prop3", opts.seed, opts.tolerance)?;
    cert.constants.insert("C01".into(), c);
    Ok(cert)
}

fn arg_refined_slack(f: &AnalyticFunction, disk: &BaseDisk, z: Complex64, z0: Complex64, c: f64) -> Result<f64> {
    let kappa = disk.kobayashi(z, z0)?;
    let lz = anchored_log(f, disk, 0, z)?;
    let l0 = anchored_log(f, disk, 0, z0)?;
    // log(e^{−i arg f(z0)} f(z)) on the branch that is real at z0
    let rotated = lz - Complex64::new(0.0, l0.im);
    let ratio = (c + rotated.norm()) / (c + l0.re.abs());
    Ok(envelope_slack(ratio, kappa))
}

/// `e^{−κ} ≤ (C₀,₁ + |log e^{−i arg f(z0)} f(z)|)/(C₀,₁ + |log|f(z0)||) ≤ e^{κ}`.
pub fn check_arg_refined(
    f: &AnalyticFunction,
    disk: &BaseDisk,
    pairs: &[(Complex64, Complex64)],
    opts: &CheckOptions,
) -> Result<Certificate> {
    let pts = pair_points(pairs);
    check_in(disk, &pts)?;
    audit_points(f, Codomain::OmitsZeroOne, &pts)?;
    let c = opts.c();
    let mut rec = SlackRecord::new();
    for (k, &(z, z0)) in pairs.iter().enumerate() {
        let s = arg_refined_slack(f, disk, z, z0, c).map_err(|e| e.at_sample(z))?;
        rec.push(k, s, &pair_witness(z, z0));
    }
    let mut cert = rec.finish("arg-refined", opts.seed, opts.tolerance)?;
    cert.constants.insert("C01".into(), c);
    Ok(cert)
}

/// `|h(z)| ≤ (C₀,₁ + |Re h(z0)|)e^{κ} + |Im h(z0)| − C₀,₁` for `h` omitting
/// `2πiℤ`.
pub fn check_cor4(
    h: &AnalyticFunction,
    disk: &BaseDisk,
    pairs: &[(Complex64, Complex64)],
    opts: &CheckOptions,
) -> Result<Certificate> {
    let pts = pair_points(pairs);
    check_in(disk, &pts)?;
    audit_points(h, Codomain::OmitsTwoPiIZ, &pts)?;
    let c = opts.c();
    let mut rec = SlackRecord::new();
    for (k, &(z, z0)) in pairs.iter().enumerate() {
        let kappa = disk.kobayashi(z, z0)?;
        let bound = cor4_bound_with(h.eval(z0)?, kappa, c);
        rec.push(k, upper_slack(h.eval(z)?.norm(), bound), &pair_witness(z, z0));
    }
    let mut cert = rec.finish("cor4", opts.seed, opts.tolerance)?;
    cert.constants.insert("C01".into(), c);
    Ok(cert)
}

/// `|f′(z)| ≤ |V|_κ |f(z)| (C₀,₁ + |log|f(z)||)` for `V = ∂/∂z`, derivative by
/// Richardson-extrapolated central differences.
pub fn check_landau(
    f: &AnalyticFunction,
    disk: &BaseDisk,
    points: &[Complex64],
    opts: &CheckOptions,
) -> Result<Certificate> {
    check_in(disk, points)?;
    audit_points(f, Codomain::OmitsZeroOne, points)?;
    let c = opts.c();
    let mut rec = SlackRecord::new();
    for (k, &z) in points.iter().enumerate() {
        let v = disk.royden_norm(z, Complex64::new(1.0, 0.0))?;
        let bound = landau_bound_with(f.eval(z)?, v, c)?;
        let d = f.derivative(z).map_err(|e| e.at_sample(z))?.norm();
        rec.push(k, upper_slack(d, bound), &[z.re, z.im]);
    }
    let mut cert = rec.finish("landau", opts.seed, opts.tolerance)?;
    cert.constants.insert("C01".into(), c);
    Ok(cert)
}

/// `|f(z)| ≤ M(R, R′)` for `|f(z0)| ≤ R′` and `κ(z, z0) ≤ R`; slack is
/// `log M − log|f(z)|`.
#[allow(clippy::too_many_arguments)]
pub fn check_schottky(
    f: &AnalyticFunction,
    disk: &BaseDisk,
    z0: Complex64,
    r: f64,
    rp: f64,
    points: &[Complex64],
    opts: &CheckOptions,
) -> Result<Certificate> {
    check_in(disk, points)?;
    audit_points(f, Codomain::OmitsZeroOne, points)?;
    audit_points(f, Codomain::OmitsZeroOne, &[z0])?;
    let f0 = f.eval(z0)?.norm();
    if f0 > rp {
        return Err(Error::domain(format!("|f(z0)| = {f0} exceeds R′ = {rp}")));
    }
    let log_bound = log_schottky(r, rp, opts.c());
    let mut rec = SlackRecord::new();
    let mut sup: f64 = 0.0;
    for (k, &z) in points.iter().enumerate() {
        let kappa = disk.kobayashi(z, z0)?;
        if kappa > r * (1.0 + 1e-12) {
            return Err(Error::domain(format!("κ({z}, z0) = {kappa} exceeds R = {r}")));
        }
        let v = f.eval(z)?.norm();
        sup = sup.max(v);
        rec.push(k, log_bound - v.ln(), &[z.re, z.im]);
    }
    let mut cert = rec.finish("schottky", opts.seed, opts.tolerance)?;
    cert.constants.insert("bound".into(), log_bound.exp());
    cert.constants.insert("log_bound".into(), log_bound);
    cert.constants.insert("empirical_sup".into(), sup);
    Ok(cert)
}

/// `|∫_{|f(z0)|}^{|f(z)|} ρ₀,₁(−r) dr| ≤ κ(z, z0)`.
pub fn check_hempel_implicit(
    f: &AnalyticFunction,
    disk: &BaseDisk,
    pairs: &[(Complex64, Complex64)],
    opts: &CheckOptions,
) -> Result<Certificate> {
    let pts = pair_points(pairs);
    check_in(disk, &pts)?;
    audit_points(f, Codomain::OmitsZeroOne, &pts)?;
    let mut rec = SlackRecord::new();
    for (k, &(z, z0)) in pairs.iter().enumerate() {
        let i = hempel_radial_integral(f.eval(z0)?.norm(), f.eval(z)?.norm()).map_err(|e| e.at_sample(z))?;
        let kappa = disk.kobayashi(z, z0)? * opts.constant_scale;
        rec.push(k, upper_slack(i, kappa), &pair_witness(z, z0));
    }
    rec.finish("hempel", opts.seed, opts.tolerance)
}

/// `e^{−κ} ≤ log(1/|f(z)|)/log(1/|f(z0)|) ≤ e^{κ}` for `f` with values in
/// the punctured disk.
pub fn check_punctured_disk_harnack(
    f: &AnalyticFunction,
    disk: &BaseDisk,
    pairs: &[(Complex64, Complex64)],
    opts: &CheckOptions,
) -> Result<Certificate> {
    let pts = pair_points(pairs);
    check_in(disk, &pts)?;
    audit_points(f, Codomain::PuncturedDisk, &pts)?;
    let mut rec = SlackRecord::new();
    for (k, &(z, z0)) in pairs.iter().enumerate() {
        let ratio = (-f.eval(z)?.norm().ln()) / (-f.eval(z0)?.norm().ln());
        let kappa = disk.kobayashi(z, z0)? * opts.constant_scale;
        rec.push(k, envelope_slack(ratio, kappa), &pair_witness(z, z0));
    }
    rec.finish("punctured-disk-harnack", opts.seed, opts.tolerance)
}
