//! The hyperbolic density `ρ₀,₁` of `ℂ∖{0,1}` by two independent routes, the
//! constant `C₀,₁ = 1/ρ₀,₁(−1)`, the radial integral along the negative axis,
//! and the two-sided density bounds.
//!
//! * Area integral: `1/ρ(z) = (1/2π) ∫ |z(z−1)| / (|ζ||ζ−1||ζ−z|) dS(ζ)`.
//! * Covering: `ρ(λ(τ)) |λ′(τ)| = 1/Im τ` with the modular function `λ`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

use crate::cache::DensityGrid;
use crate::certificate::{Certificate, SlackRecord};
use crate::error::{Error, Result};
use crate::geometry::{ensure_finite, poincare_disk_density, punctured_disk_density};
use crate::modular;
use crate::quadrature::{integrate, integrate_rect, QuadOptions};
use crate::special::gamma;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainTag {
    UnitDisk,
    PuncturedDisk,
    TwicePuncturedPlane,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    AgardIntegral,
    ModularCovering,
    Auto,
    /// Closed-form density of the disk or punctured disk.
    ClosedForm,
}

impl Method {
    pub fn tag(self) -> u8 {
        match self {
            Method::AgardIntegral => 1,
            Method::ModularCovering => 2,
            Method::Auto => 3,
            Method::ClosedForm => 4,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Method> {
        match tag {
            1 => Some(Method::AgardIntegral),
            2 => Some(Method::ModularCovering),
            3 => Some(Method::Auto),
            4 => Some(Method::ClosedForm),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::AgardIntegral => "agard",
            Method::ModularCovering => "modular",
            Method::Auto => "auto",
            Method::ClosedForm => "closed-form",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityValue {
    pub rho: f64,
    /// Absolute error estimate.
    pub err_est: f64,
    /// Evaluator that actually produced the value.
    pub method: Method,
}

/// Default relative tolerance for the area integral.
pub const AGARD_DEFAULT_TOL: f64 = 1e-8;

/// Evaluatable density of a named domain.
#[derive(Debug, Clone)]
pub struct DensityModel {
    pub domain: DomainTag,
    pub method: Method,
    pub tolerance: f64,
    pub cache: Option<Arc<DensityGrid>>,
}

impl DensityModel {
    pub fn new(domain: DomainTag, method: Method, tolerance: f64) -> Result<Self> {
        if !(tolerance > 0.0) {
            return Err(Error::domain(format!("tolerance {tolerance} must be positive")));
        }
        Ok(Self {
            domain,
            method,
            tolerance,
            cache: None,
        })
    }

    pub fn unit_disk() -> Self {
        Self {
            domain: DomainTag::UnitDisk,
            method: Method::ClosedForm,
            tolerance: 1e-15,
            cache: None,
        }
    }

    pub fn punctured_disk() -> Self {
        Self {
            domain: DomainTag::PuncturedDisk,
            method: Method::ClosedForm,
            tolerance: 1e-15,
            cache: None,
        }
    }

    pub fn twice_punctured() -> Self {
        Self {
            domain: DomainTag::TwicePuncturedPlane,
            method: Method::Auto,
            tolerance: AGARD_DEFAULT_TOL,
            cache: None,
        }
    }

    pub fn with_cache(mut self, grid: Arc<DensityGrid>) -> Self {
        self.cache = Some(grid);
        self
    }

    /// Whether `z` lies in the domain.
    pub fn contains(&self, z: Complex64) -> bool {
        let r = z.norm();
        match self.domain {
            DomainTag::UnitDisk => r < 1.0,
            DomainTag::PuncturedDisk => r > 0.0 && r < 1.0,
            DomainTag::TwicePuncturedPlane => z != Complex64::new(0.0, 0.0) && z != Complex64::new(1.0, 0.0),
        }
    }

    pub fn punctures(&self) -> Vec<Complex64> {
        match self.domain {
            DomainTag::UnitDisk => vec![],
            DomainTag::PuncturedDisk => vec![Complex64::new(0.0, 0.0)],
            DomainTag::TwicePuncturedPlane => vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        }
    }

    pub fn density(&self, z: Complex64) -> Result<DensityValue> {
        if let Some(rho) = self.cache.as_ref().and_then(|g| g.lookup(z)) {
            return Ok(DensityValue {
                rho,
                err_est: rho * self.tolerance,
                method: Method::from_tag(g_method(self)).unwrap_or(self.method),
            });
        }
        match self.domain {
            DomainTag::UnitDisk => Ok(closed(poincare_disk_density(z)?)),
            DomainTag::PuncturedDisk => Ok(closed(punctured_disk_density(z)?)),
            DomainTag::TwicePuncturedPlane => match self.method {
                Method::AgardIntegral => rho01_agard(z, self.tolerance),
                Method::ModularCovering => rho01_modular(z),
                Method::Auto | Method::ClosedForm => rho01_auto(z, self.tolerance),
            },
        }
    }

    pub fn rho(&self, z: Complex64) -> Result<f64> {
        Ok(self.density(z)?.rho)
    }
}

fn g_method(m: &DensityModel) -> u8 {
    m.cache.as_ref().map(|g| g.header.method).unwrap_or(0)
}

fn closed(rho: f64) -> DensityValue {
    DensityValue {
        rho,
        err_est: rho * 1e-15,
        method: Method::ClosedForm,
    }
}

fn check_off_punctures(z: Complex64) -> Result<()> {
    ensure_finite(z, "z")?;
    if z == Complex64::new(0.0, 0.0) || z == Complex64::new(1.0, 0.0) {
        return Err(Error::Puncture { z });
    }
    Ok(())
}

/// Partition-of-unity exponent: chart `s` carries weight
/// `|ζ−s|^{−K} / Σ_u |ζ−u|^{−K}`.
const POU_EXPONENT: i32 = 4;

/// `ρ₀,₁(z)` from the area integral.
///
/// The plane is covered by three polar charts centred at `0`, `1` and `z`
/// with a smooth partition of unity; in chart `s` the radius is
/// `r = L t/(1−t)`, `t ∈ [0,1)`, where `L` is the distance from `s` to the
/// nearest other singularity. The polar Jacobian cancels the chart's own
/// singularity, the weight suppresses the other two, and the far field maps to
/// a bounded integrand near `t = 1`, so each chart is a smooth integral over
/// `[0, 2π] × [0, 1]`.
pub fn rho01_agard(z: Complex64, tol: f64) -> Result<DensityValue> {
    check_off_punctures(z)?;
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tolerance {tol} must be positive")));
    }
    let sing = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), z];
    let pref = (z * (z - 1.0)).norm();
    let opts = QuadOptions {
        abs_tol: 0.0,
        rel_tol: tol / 2.0,
        max_evals: 4_000_000,
    };
    let mut total = 0.0;
    let mut err = 0.0;
    for s in 0..3 {
        let others: Vec<Complex64> = (0..3).filter(|&u| u != s).map(|u| sing[u]).collect();
        let l = others.iter().map(|&u| (u - sing[s]).norm()).fold(f64::INFINITY, f64::min);
        let centre = sing[s];
        let (o1, o2) = (others[0], others[1]);
        let f = |theta: f64, t: f64| -> f64 {
            let r = l * t / (1.0 - t);
            let zeta = centre + Complex64::from_polar(r, theta);
            let d1 = (zeta - o1).norm_sqr();
            let d2 = (zeta - o2).norm_sqr();
            let ds = r * r;
            if d1 == 0.0 || d2 == 0.0 {
                return 0.0;
            }
            let k2 = POU_EXPONENT / 2;
            let w = 1.0 / (1.0 + (ds / d1).powi(k2) + (ds / d2).powi(k2));
            w * pref / (d1 * d2).sqrt() * l / ((1.0 - t) * (1.0 - t))
        };
        let r = integrate_rect(f, [0.0, 0.0], [2.0 * PI, 1.0], &opts);
        if !r.converged {
            return Err(Error::Accuracy {
                achieved: r.error / r.value.abs().max(f64::MIN_POSITIVE),
                requested: tol,
            });
        }
        total += r.value;
        err += r.error;
    }
    // 1/ρ = total/2π
    let rho = 2.0 * PI / total;
    Ok(DensityValue {
        rho,
        err_est: rho * err / total,
        method: Method::AgardIntegral,
    })
}

/// `ρ₀,₁(z)` through the modular covering of the upper half-plane.
pub fn rho01_modular(z: Complex64) -> Result<DensityValue> {
    check_off_punctures(z)?;
    let (rho, err_est) = modular::rho01_via_covering(z)?;
    Ok(DensityValue {
        rho,
        err_est,
        method: Method::ModularCovering,
    })
}

/// Covering method at distance ≥ 1e−3 from the punctures and `|z| ≤ 1e8`,
/// area integral otherwise.
pub fn rho01_auto(z: Complex64, tol: f64) -> Result<DensityValue> {
    check_off_punctures(z)?;
    let dist = z.norm().min((z - 1.0).norm());
    if dist >= 1e-3 && z.norm() <= 1e8 {
        rho01_modular(z)
    } else {
        rho01_agard(z, tol)
    }
}

/// `ρ₀,₁` by the covering method; the default evaluator for certifiers.
pub fn rho01(z: Complex64) -> Result<f64> {
    Ok(rho01_auto(z, AGARD_DEFAULT_TOL)?.rho)
}

/// `C₀,₁ = 1/ρ₀,₁(−1) = Γ(1/4)⁴/(4π²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct C01Constant {
    pub value: f64,
}

impl C01Constant {
    /// Re-derivation `(1/π) ∫ |ζ(ζ²−1)|^{−1} dS`, i.e. the area integral at −1.
    pub fn agard(tol: f64) -> Result<DensityValue> {
        let d = rho01_agard(Complex64::new(-1.0, 0.0), tol)?;
        Ok(DensityValue {
            rho: 1.0 / d.rho,
            err_est: d.err_est / (d.rho * d.rho),
            method: Method::AgardIntegral,
        })
    }
}

pub fn c01_constant() -> C01Constant {
    C01Constant {
        value: gamma(0.25).powi(4) / (4.0 * PI * PI),
    }
}

/// Shorthand for `c01_constant().value`.
pub fn c01() -> f64 {
    c01_constant().value
}

/// `|∫_{r1}^{r2} ρ₀,₁(−r) dr|`, computed in the variable `s = log r`.
///
/// Both endpoints must be positive; the integrand behaves like
/// `1/(r log 1/r)` at 0 and the integral diverges there.
pub fn hempel_radial_integral(r1: f64, r2: f64) -> Result<f64> {
    for r in [r1, r2] {
        if r == 0.0 {
            return Err(Error::Divergence(
                "radial integral of ρ₀,₁(−r) diverges at r = 0".into(),
            ));
        }
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::domain(format!("radius {r} must be positive and finite")));
        }
    }
    if r1 == r2 {
        return Ok(0.0);
    }
    let (a, b) = (r1.min(r2).ln(), r1.max(r2).ln());
    let mut failure = None;
    let f = |s: f64| -> f64 {
        let r = s.exp();
        match rho01_modular(Complex64::new(-r, 0.0)) {
            Ok(d) => d.rho * r,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };
    let res = integrate(f, a, b, &QuadOptions::relative(1e-12));
    if let Some(e) = failure {
        return Err(e);
    }
    if !res.converged {
        return Err(Error::Accuracy {
            achieved: res.error / res.value.abs(),
            requested: 1e-12,
        });
    }
    Ok(res.value.abs())
}

/// Certifies, at every sample,
/// `|z||log|z|| ≤ 1/ρ(z) ≤ |z|(C₀,₁ + |log|z||)` and, for `|z| < 1`,
/// `ρ(z) ≥ ρ(−|z|) ≥ 1/(|z|(C₀,₁ + log 1/|z|))`. Slacks are relative.
pub fn check_density_bounds(samples: &[Complex64], seed: u64, tolerance: f64) -> Result<Certificate> {
    let c = c01();
    let mut rec = SlackRecord::new();
    for (i, &z) in samples.iter().enumerate() {
        let rho = rho01(z).map_err(|e| e.at_sample(z))?;
        let r = z.norm();
        let lr = r.ln();
        let inv = 1.0 / rho;
        let lower = r * lr.abs();
        let upper = r * (c + lr.abs());
        let mut slack = ((inv - lower) / inv).min((upper - inv) / upper);
        if r < 1.0 {
            let rho_neg = rho01(Complex64::new(-r, 0.0)).map_err(|e| e.at_sample(z))?;
            let floor = 1.0 / (r * (c - lr));
            slack = slack
                .min((rho - rho_neg) / rho_neg)
                .min((rho_neg - floor) / rho_neg);
        }
        rec.push(i, slack, &[z.re, z.im]);
    }
    let mut cert = rec.finish("density-bounds", seed, tolerance)?;
    cert.constants.insert("C01".into(), c);
    Ok(cert)
}
