//! Normalized holomorphic motions of finite label sets over a disk, their
//! injectivity audit, derivative-ratio bounds and Hölder certificates.
//!
//! A motion assigns to every label `w ∈ E` a track `z ↦ φ(z, w)` with
//! `φ(z0, w) = w`. Labels `0`, `1`, `∞` must be present with constant tracks.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::certificate::{upper_slack, Certificate, SlackRecord};
use crate::error::{Error, Result};
use crate::function::{AnalyticFunction, Codomain, Expr};
use crate::geometry::{spherical_distance, BaseDisk, ExtendedPoint, MobiusMap};
use crate::inequalities::{log_schottky_bound, CheckOptions};
use crate::rho01::c01;

/// Nodes per side of the first audit grid.
pub const AUDIT_GRID: usize = 64;
/// Largest audit grid side reached by doubling.
pub const MAX_AUDIT_GRID: usize = 512;
/// Relative change of the minimum separation that ends refinement.
pub const SEPARATION_STABILITY: f64 = 0.1;
/// Relative separation `|a − b|/max(|a|, |b|)` treated as a collision.
pub const COLLISION_THRESHOLD: f64 = 1e-10;
/// Tolerance of `φ(z0, w) = w` and of the fixed tracks.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// One label and its track; `expr = None` is the constant track.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackSpec {
    pub label: ExtendedPoint,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expr: Option<Expr>,
}

impl TrackSpec {
    pub fn fixed(label: ExtendedPoint) -> Self {
        Self { label, expr: None }
    }

    pub fn moving(label: Complex64, expr: Expr) -> Self {
        Self {
            label: ExtendedPoint::Finite(label),
            expr: Some(expr),
        }
    }
}

/// Motion description file: base point, optional base disk, labelled tracks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotionSpec {
    pub base: Complex64,
    #[serde(default)]
    pub disk: BaseDisk,
    pub tracks: Vec<TrackSpec>,
}

fn normalizing_tracks() -> Vec<TrackSpec> {
    vec![
        TrackSpec::fixed(ExtendedPoint::Finite(c(0.0, 0.0))),
        TrackSpec::fixed(ExtendedPoint::Finite(c(1.0, 0.0))),
        TrackSpec::fixed(ExtendedPoint::Infinity),
    ]
}

impl MotionSpec {
    pub fn new(base: Complex64, tracks: Vec<TrackSpec>) -> Self {
        Self {
            base,
            disk: BaseDisk::unit(),
            tracks,
        }
    }

    /// `φ(z, w) = w` on `{0, 1, ∞} ∪ extra`.
    pub fn identity(extra: &[Complex64]) -> Self {
        let mut tracks = normalizing_tracks();
        tracks.extend(extra.iter().map(|&w| TrackSpec::fixed(ExtendedPoint::Finite(w))));
        Self::new(c(0.0, 0.0), tracks)
    }

    /// `{0, 1, ∞}` fixed, `2 + z/4` and `i(1 + z/4)`, based at 0.
    pub fn two_point_example() -> Self {
        let mut tracks = normalizing_tracks();
        tracks.push(TrackSpec::moving(c(2.0, 0.0), Expr::affine(c(0.25, 0.0), c(2.0, 0.0))));
        tracks.push(TrackSpec::moving(c(0.0, 1.0), Expr::affine(c(0.0, 0.25), c(0.0, 1.0))));
        Self::new(c(0.0, 0.0), tracks)
    }

    /// Restriction of the radial stretch `φ(z, w) = w·|w|^{2z/(1−z)}` to
    /// `{0, 1, ∞} ∪ labels`. At `z = −r` it is `w ↦ w|w|^{−2r/(1+r)}`, whose
    /// Hölder exponent at 0 is exactly `(1−r)/(1+r) = e^{−κ(0, −r)}`.
    pub fn radial_stretch(labels: &[Complex64]) -> Self {
        let ratio = MobiusMap::new(c(1.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)).expect("nonsingular");
        let mut tracks = normalizing_tracks();
        for &w in labels {
            let s = 2.0 * w.norm().ln();
            let expr = Expr::constant(w).mul(Expr::affine(c(s, 0.0), c(0.0, 0.0)).compose(Expr::mobius(ratio)).exp());
            tracks.push(TrackSpec::moving(w, expr));
        }
        Self::new(c(0.0, 0.0), tracks)
    }

    /// The motion `1/φ` with labels `1/w`; the spherical metric is invariant.
    pub fn inverted(&self) -> Self {
        let tracks = self
            .tracks
            .iter()
            .map(|t| {
                let label = t.label.invert();
                match (&t.expr, is_normalizing(t.label)) {
                    (Some(e), false) => TrackSpec {
                        label,
                        expr: Some(Expr::real(1.0).div(e.clone())),
                    },
                    _ => TrackSpec::fixed(label),
                }
            })
            .collect();
        Self {
            base: self.base,
            disk: self.disk,
            tracks,
        }
    }

    /// Tracks reordered: new track `k` is old track `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.tracks.len()];
        if perm.len() != self.tracks.len() || perm.iter().any(|&p| p >= seen.len() || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::domain("not a permutation of the tracks"));
        }
        Ok(Self {
            base: self.base,
            disk: self.disk,
            tracks: perm.iter().map(|&p| self.tracks[p].clone()).collect(),
        })
    }
}

fn is_normalizing(w: ExtendedPoint) -> bool {
    match w {
        ExtendedPoint::Infinity => true,
        ExtendedPoint::Finite(z) => z == c(0.0, 0.0) || z == c(1.0, 0.0),
    }
}

fn label_complex(w: ExtendedPoint) -> Complex64 {
    w.finite().unwrap_or(c(f64::INFINITY, 0.0))
}

/// Outcome of the injectivity audit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotionAudit {
    /// Kobayashi radius of the audited ball about the base point.
    pub radius: f64,
    pub grid: usize,
    /// Smallest spherical distance between two tracks.
    pub min_separation: f64,
    /// Smallest `|a − b|/max(|a|, |b|)`; invariant under `w ↦ 1/w` and
    /// scaling, so tracks crowding 0 or ∞ are not mistaken for collisions.
    pub min_relative_separation: f64,
    /// Whether doubling reached a relative change below 10%.
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMotion {
    pub spec: MotionSpec,
    pub labels: Vec<ExtendedPoint>,
    tracks: Vec<Option<AnalyticFunction>>,
    pub normalized: bool,
    pub audit: MotionAudit,
}

impl FiniteMotion {
    pub fn base(&self) -> Complex64 {
        self.spec.base
    }

    pub fn disk(&self) -> BaseDisk {
        self.spec.disk
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// `φ(z, w_k)`.
    pub fn value(&self, k: usize, z: Complex64) -> Result<ExtendedPoint> {
        match &self.tracks[k] {
            None => Ok(self.labels[k]),
            Some(f) => Ok(ExtendedPoint::Finite(f.eval(z)?)),
        }
    }

    pub fn track(&self, k: usize) -> Option<&AnalyticFunction> {
        self.tracks[k].as_ref()
    }

    /// Indices of labels outside `{0, 1, ∞}`.
    pub fn free_labels(&self) -> Vec<usize> {
        (0..self.len()).filter(|&k| !is_normalizing(self.labels[k])).collect()
    }

    /// All unordered label pairs.
    pub fn all_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
    }

    fn check_query(&self, z: Complex64, r: f64) -> Result<()> {
        let d = self.disk().kobayashi(z, self.base())?;
        if d > r * (1.0 + 1e-12) + 1e-15 {
            return Err(Error::domain(format!("query {z} is at Kobayashi distance {d} > R = {r} from the base point")));
        }
        Ok(())
    }
}

/// Point of the closed Kobayashi ball of radius `R` about the base, from a
/// point `ζ` of the Euclidean disk `|ζ| ≤ tanh(R/2)`.
fn ball_point(disk: &BaseDisk, base_unit: Complex64, zeta: Complex64) -> Complex64 {
    disk.from_unit((zeta + base_unit) / (Complex64::new(1.0, 0.0) + base_unit.conj() * zeta))
}

/// `|a − b|/max(|a|, |b|)`, and 1 against ∞.
fn relative_separation(a: ExtendedPoint, b: ExtendedPoint) -> f64 {
    match (a, b) {
        (ExtendedPoint::Infinity, ExtendedPoint::Infinity) => 0.0,
        (ExtendedPoint::Finite(a), ExtendedPoint::Finite(b)) => {
            let m = a.norm().max(b.norm());
            if m == 0.0 {
                0.0
            } else {
                (a - b).norm() / m
            }
        }
        _ => 1.0,
    }
}

struct Scan {
    min: f64,
    zeta: Complex64,
    pair: (usize, usize),
    spherical: f64,
}

fn separations(values: &[ExtendedPoint], best: &mut Scan, zeta: Complex64) {
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            best.spherical = best.spherical.min(spherical_distance(values[i], values[j]));
            let d = relative_separation(values[i], values[j]);
            if d < best.min {
                best.min = d;
                best.zeta = zeta;
                best.pair = (i, j);
            }
        }
    }
}

/// Validates a motion description and audits it on the closed Kobayashi ball
/// of radius `audit_radius` about the base point.
pub fn build_motion(spec: MotionSpec, audit_radius: f64) -> Result<FiniteMotion> {
    if !(audit_radius >= 0.0) || !audit_radius.is_finite() {
        return Err(Error::domain(format!("audit radius must be finite and ≥ 0, got {audit_radius}")));
    }
    let disk = spec.disk;
    let base = spec.base;
    if !disk.contains(base) {
        return Err(Error::domain(format!("base point {base} is outside the base disk")));
    }
    let labels: Vec<ExtendedPoint> = spec.tracks.iter().map(|t| t.label).collect();
    for (i, a) in labels.iter().enumerate() {
        for b in &labels[i + 1..] {
            if relative_separation(*a, *b) <= COLLISION_THRESHOLD {
                return Err(Error::Injectivity {
                    z: base,
                    w1: label_complex(*a),
                    w2: label_complex(*b),
                });
            }
        }
    }
    for (need, name) in [
        (ExtendedPoint::Finite(c(0.0, 0.0)), "0"),
        (ExtendedPoint::Finite(c(1.0, 0.0)), "1"),
        (ExtendedPoint::Infinity, "∞"),
    ] {
        if !labels.contains(&need) {
            return Err(Error::Normalization(format!("label {name} is missing")));
        }
    }
    let mut tracks = Vec::with_capacity(labels.len());
    for t in &spec.tracks {
        match (&t.expr, t.label) {
            (None, _) => tracks.push(None),
            (Some(_), ExtendedPoint::Infinity) => {
                return Err(Error::Normalization("the track of ∞ must be constant".into()));
            }
            (Some(e), ExtendedPoint::Finite(w)) => {
                let f = AnalyticFunction::new(e.clone(), Codomain::Any);
                let v = f.eval(base)?;
                if (v - w).norm() > NORMALIZATION_TOLERANCE * w.norm().max(1.0) {
                    return Err(Error::Normalization(format!("φ(z0, {w}) = {v} ≠ {w}")));
                }
                tracks.push(Some(f));
            }
        }
    }
    let mut motion = FiniteMotion {
        spec,
        labels,
        tracks,
        normalized: true,
        audit: MotionAudit {
            radius: audit_radius,
            grid: 0,
            min_separation: f64::INFINITY,
            min_relative_separation: f64::INFINITY,
            stable: true,
        },
    };
    audit_injectivity(&mut motion)?;
    Ok(motion)
}

fn values_at(m: &FiniteMotion, z: Complex64) -> Result<Vec<ExtendedPoint>> {
    let mut out = Vec::with_capacity(m.len());
    for k in 0..m.len() {
        let v = m.value(k, z).map_err(|e| e.at_sample(z))?;
        if let (ExtendedPoint::Finite(w), ExtendedPoint::Finite(x)) = (m.labels[k], v) {
            if !x.re.is_finite() || !x.im.is_finite() {
                return Err(Error::Singular { z });
            }
            if is_normalizing(m.labels[k]) && (x - w).norm() > NORMALIZATION_TOLERANCE {
                return Err(Error::Normalization(format!("track of {w} moves to {x} at z = {z}")));
            }
        }
        out.push(v);
    }
    Ok(out)
}

fn scan_grid(m: &FiniteMotion, n: usize, t: f64) -> Result<Scan> {
    let disk = m.disk();
    let a = disk.to_unit(m.base());
    let mut best = Scan {
        min: f64::INFINITY,
        zeta: c(0.0, 0.0),
        pair: (0, 0),
        spherical: f64::INFINITY,
    };
    separations(&values_at(m, m.base())?, &mut best, c(0.0, 0.0));
    let h = if n > 1 { 2.0 * t / (n - 1) as f64 } else { 0.0 };
    for i in 0..n {
        for j in 0..n {
            let zeta = c(-t + h * i as f64, -t + h * j as f64);
            if zeta.norm() > t {
                continue;
            }
            let z = ball_point(&disk, a, zeta);
            separations(&values_at(m, z)?, &mut best, zeta);
        }
    }
    Ok(best)
}

/// Pattern search on one pair's separation around a grid minimum.
fn zoom(m: &FiniteMotion, start: &Scan, t: f64, h0: f64) -> Result<Scan> {
    let disk = m.disk();
    let a = disk.to_unit(m.base());
    let (p, q) = start.pair;
    let sep = |zeta: Complex64| -> Result<f64> {
        let z = ball_point(&disk, a, zeta);
        Ok(relative_separation(m.value(p, z)?, m.value(q, z)?))
    };
    let mut best = Scan {
        min: start.min,
        zeta: start.zeta,
        pair: start.pair,
        spherical: start.spherical,
    };
    let mut h = h0;
    for _ in 0..24 {
        let centre = best.zeta;
        for i in -4i32..=4 {
            for j in -4i32..=4 {
                let mut zeta = centre + c(i as f64, j as f64) * (h / 4.0);
                if zeta.norm() > t {
                    zeta *= t / zeta.norm();
                }
                let d = sep(zeta)?;
                if d < best.min {
                    best.min = d;
                    best.zeta = zeta;
                }
            }
        }
        h /= 4.0;
    }
    Ok(best)
}

fn audit_injectivity(m: &mut FiniteMotion) -> Result<()> {
    let t = m.disk().kobayashi_ball_radius(m.audit.radius) / m.disk().radius;
    let mut n = AUDIT_GRID;
    let mut scan = scan_grid(m, n, t)?;
    let mut stable = false;
    while scan.min > COLLISION_THRESHOLD && n < MAX_AUDIT_GRID {
        let next = scan_grid(m, 2 * n, t)?;
        n *= 2;
        let change = (scan.min - next.min).abs() / next.min.max(f64::MIN_POSITIVE);
        scan = next;
        if change <= SEPARATION_STABILITY {
            stable = true;
            break;
        }
    }
    if scan.min > COLLISION_THRESHOLD && t > 0.0 {
        let refined = zoom(m, &scan, t, 2.0 * t / (n - 1) as f64)?;
        if refined.min < scan.min {
            scan = refined;
        }
    }
    if scan.min <= COLLISION_THRESHOLD {
        let a = m.disk().to_unit(m.base());
        return Err(Error::Injectivity {
            z: ball_point(&m.disk(), a, scan.zeta),
            w1: label_complex(m.labels[scan.pair.0]),
            w2: label_complex(m.labels[scan.pair.1]),
        });
    }
    m.audit.grid = n;
    m.audit.min_separation = scan.spherical;
    m.audit.min_relative_separation = scan.min;
    m.audit.stable = stable || t == 0.0;
    Ok(())
}

/// `|V|_κ·(2C₀,₁ + 2 min(|log|f1||, |log|1−f1||) + |log|f1−f2||)`.
pub fn lemma2_ratio_bound(f1: Complex64, f2: Complex64, royden_norm: f64) -> Result<f64> {
    let one = c(1.0, 0.0);
    for v in [f1, f2] {
        if v.norm() == 0.0 || v == one || !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::domain(format!("value {v} must lie in ℂ∖{{0, 1}}")));
        }
    }
    if f1 == f2 {
        return Err(Error::domain(format!("coincident values {f1}")));
    }
    if !(royden_norm >= 0.0) {
        return Err(Error::domain(format!("Royden norm must be ≥ 0, got {royden_norm}")));
    }
    let m = f1.norm().ln().abs().min((one - f1).norm().ln().abs());
    Ok(royden_norm * (2.0 * c01() + 2.0 * m + (f1 - f2).norm().ln().abs()))
}

/// `|V(f1−f2)|/|f1−f2| ≤ lemma2_ratio_bound` for every pair of free tracks at
/// every point, with a seeded random direction per point.
pub fn check_velocity_ratios(m: &FiniteMotion, points: &[Complex64], opts: &CheckOptions) -> Result<Certificate> {
    let disk = m.disk();
    let free = m.free_labels();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut rec = SlackRecord::new();
    for (s, &z) in points.iter().enumerate() {
        if !disk.contains(z) {
            return Err(Error::domain(format!("point {z} is outside the base disk")));
        }
        let dir = Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
        let royden = disk.royden_norm(z, dir)?;
        for (a, &i) in free.iter().enumerate() {
            for &j in &free[a + 1..] {
                let (v1, d1) = track_jet(m, i, z)?;
                let (v2, d2) = track_jet(m, j, z)?;
                let bound = lemma2_ratio_bound(v1, v2, royden * opts.constant_scale).map_err(|e| e.at_sample(z))?;
                let ratio = ((d1 - d2) * dir).norm() / (v1 - v2).norm();
                rec.push(s, upper_slack(ratio, bound), &[z.re, z.im, i as f64, j as f64]);
            }
        }
    }
    let mut cert = rec.finish("velocity-ratio", opts.seed, opts.tolerance)?;
    cert.constants.insert("C01".into(), c01());
    Ok(cert)
}

fn track_jet(m: &FiniteMotion, k: usize, z: Complex64) -> Result<(Complex64, Complex64)> {
    match m.track(k) {
        Some(f) => Ok((f.eval(z)?, f.derivative(z)?)),
        None => Ok((label_complex(m.labels[k]), c(0.0, 0.0))),
    }
}

/// `log C_R` with `C_R = max(5, 5^α e^{C(1−α)} 2M)`, `M = M(R, 3)`,
/// `C = 2C₀,₁ + 2 log M`, `α = e^{−R}`.
pub fn log_holder_constant(r: f64) -> Result<f64> {
    let log_m = log_schottky_bound(r, 3.0)?;
    let alpha = (-r).exp();
    let big_c = 2.0 * c01() + 2.0 * log_m;
    Ok(5f64.ln().max(alpha * 5f64.ln() + big_c * (1.0 - alpha) + 2f64.ln() + log_m))
}

pub fn holder_constant(r: f64) -> Result<f64> {
    Ok(log_holder_constant(r)?.exp())
}

/// `log C(R, R′)` with `C(R, R′) = C_R·(1 + M(R, R′)²)`, which serves both
/// sides of the Euclidean form.
pub fn log_euclidean_constant(r: f64, rp: f64) -> Result<f64> {
    let log_m = log_schottky_bound(r, rp)?;
    Ok(log_holder_constant(r)? + 2.0 * log_m + (-2.0 * log_m).exp().ln_1p())
}

/// `(1−r)/(1+r)`: the exponent `e^{−R}` over the disk `|z| < r` about 0.
pub fn disk_holder_exponent(r: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::domain(format!("radius must be in [0, 1), got {r}")));
    }
    Ok((1.0 - r) / (1.0 + r))
}

/// Least-squares slope of `log LHS` against `log |w1 − w2|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub exponent: f64,
    /// 95% confidence band of the slope.
    pub band: [f64; 2],
    pub points: usize,
}

fn fit_slope(xy: &[(f64, f64)]) -> Option<ExponentFit> {
    let n = xy.len();
    if n < 3 {
        return None;
    }
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx < 1e-6 {
        return None;
    }
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let rss: f64 = xy.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
    let (lo, hi) = if n > 2 {
        let se = (rss / (n - 2) as f64 / sxx).sqrt();
        let t = StudentsT::new(0.0, 1.0, (n - 2) as f64).ok()?.inverse_cdf(0.975);
        (slope - t * se, slope + t * se)
    } else {
        (slope, slope)
    };
    Some(ExponentFit {
        exponent: slope,
        band: [lo, hi],
        points: n,
    })
}

/// The smallest per-query slope; a motion is Hölder with exponent at most it.
fn fitted_exponent(groups: &[Vec<(f64, f64)>]) -> Option<ExponentFit> {
    let per_query = groups
        .iter()
        .filter_map(|g| fit_slope(g))
        .min_by(|a, b| a.exponent.total_cmp(&b.exponent));
    per_query.or_else(|| fit_slope(&groups.concat()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderReport {
    #[serde(flatten)]
    pub certificate: Certificate,
    #[serde(rename = "R")]
    pub radius: f64,
    pub alpha: f64,
    /// `e^{−R}` written as `(1−r)/(1+r)` with `r = tanh(R/2)`.
    pub disk_exponent: f64,
    pub log_constant: f64,
    /// `C_R`, saturated at the largest finite double.
    pub constant: f64,
    pub quotients: Vec<f64>,
    pub fitted_exponent: Option<f64>,
    pub exponent_band: Option<[f64; 2]>,
}

fn validate_pairs(m: &FiniteMotion, pairs: &[(usize, usize)]) -> Result<()> {
    for &(i, j) in pairs {
        if i >= m.len() || j >= m.len() || i == j {
            return Err(Error::domain(format!("invalid label pair ({i}, {j})")));
        }
    }
    Ok(())
}

fn holder_report(
    cert: Certificate,
    r: f64,
    log_c: f64,
    quotients: Vec<f64>,
    groups: &[Vec<(f64, f64)>],
) -> HolderReport {
    let fit = fitted_exponent(groups);
    HolderReport {
        certificate: cert,
        radius: r,
        alpha: (-r).exp(),
        disk_exponent: disk_holder_exponent((r / 2.0).tanh()).unwrap_or(0.0),
        log_constant: log_c,
        constant: log_c.exp().min(f64::MAX),
        quotients,
        fitted_exponent: fit.map(|f| f.exponent),
        exponent_band: fit.map(|f| f.band),
    }
}

/// Spherical Hölder inequality with exponent `e^{−R}` and the constant `C_R`
/// at every `(z, pair)` of `points × pairs`. Slacks are in log space.
pub fn check_holder_spherical(
    m: &FiniteMotion,
    r: f64,
    points: &[Complex64],
    pairs: &[(usize, usize)],
    opts: &CheckOptions,
) -> Result<HolderReport> {
    validate_pairs(m, pairs)?;
    let alpha = (-r).exp();
    let log_c = log_holder_constant(r)? + opts.constant_scale.ln();
    let mut rec = SlackRecord::new();
    let mut quotients = Vec::with_capacity(points.len() * pairs.len());
    let mut groups = Vec::with_capacity(points.len());
    for (s, &z) in points.iter().enumerate() {
        m.check_query(z, r)?;
        let values = values_at(m, z)?;
        let mut group = Vec::with_capacity(pairs.len());
        for (p, &(i, j)) in pairs.iter().enumerate() {
            let lhs = spherical_distance(values[i], values[j]);
            let sep = spherical_distance(m.labels[i], m.labels[j]);
            if lhs <= 0.0 {
                return Err(Error::Injectivity {
                    z,
                    w1: label_complex(m.labels[i]),
                    w2: label_complex(m.labels[j]),
                });
            }
            quotients.push(lhs / sep.powf(alpha));
            group.push((sep.ln(), lhs.ln()));
            let slack = log_c + alpha * sep.ln() - lhs.ln();
            rec.push(s * pairs.len() + p, slack, &[z.re, z.im, i as f64, j as f64]);
        }
        groups.push(group);
    }
    let mut cert = rec.finish("holder-spherical", opts.seed, opts.tolerance)?;
    cert.constants.insert("C01".into(), c01());
    Ok(holder_report(cert, r, log_c, quotients, &groups))
}

/// `(|w1−w2|/C)^{e^R} ≤ |φ(z,w1) − φ(z,w2)| ≤ C|w1−w2|^{e^{−R}}` with
/// `C = C(R, R′)` for labels in `|w| < R′`. Slacks are in log space.
pub fn check_holder_euclidean(
    m: &FiniteMotion,
    r: f64,
    rp: f64,
    points: &[Complex64],
    pairs: &[(usize, usize)],
    opts: &CheckOptions,
) -> Result<HolderReport> {
    validate_pairs(m, pairs)?;
    for &(i, j) in pairs {
        for k in [i, j] {
            match m.labels[k] {
                ExtendedPoint::Finite(w) if w.norm() < rp => {}
                w => return Err(Error::domain(format!("label {w:?} is outside |w| < R′ = {rp}"))),
            }
        }
    }
    let alpha = (-r).exp();
    let log_c = log_euclidean_constant(r, rp)? + opts.constant_scale.ln();
    let mut rec = SlackRecord::new();
    let mut quotients = Vec::with_capacity(points.len() * pairs.len());
    let mut groups = Vec::with_capacity(points.len());
    for (s, &z) in points.iter().enumerate() {
        m.check_query(z, r)?;
        let values = values_at(m, z)?;
        let mut group = Vec::with_capacity(pairs.len());
        for (p, &(i, j)) in pairs.iter().enumerate() {
            let dw = (label_complex(m.labels[i]) - label_complex(m.labels[j])).norm();
            let dphi = (label_complex(values[i]) - label_complex(values[j])).norm();
            if dphi <= 0.0 {
                return Err(Error::Injectivity {
                    z,
                    w1: label_complex(m.labels[i]),
                    w2: label_complex(m.labels[j]),
                });
            }
            quotients.push(dphi / dw.powf(alpha));
            group.push((dw.ln(), dphi.ln()));
            let upper = log_c + alpha * dw.ln() - dphi.ln();
            let lower = dphi.ln() - (dw.ln() - log_c) / alpha;
            rec.push(s * pairs.len() + p, upper.min(lower), &[z.re, z.im, i as f64, j as f64]);
        }
        groups.push(group);
    }
    let mut cert = rec.finish("holder-euclidean", opts.seed, opts.tolerance)?;
    cert.constants.insert("C01".into(), c01());
    cert.constants.insert("Rprime".into(), rp);
    Ok(holder_report(cert, r, log_c, quotients, &groups))
}

/// Seeded query points of the closed Kobayashi ball of radius `R` about the
/// base point.
pub fn ball_samples(m: &FiniteMotion, r: f64, n: usize, seed: u64) -> Vec<Complex64> {
    let disk = m.disk();
    let a = disk.to_unit(m.base());
    let t = (r / 2.0).tanh() * (1.0 - 1e-12);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let zeta = Complex64::from_polar(t * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU));
            ball_point(&disk, a, zeta)
        })
        .collect()
}
