//! Complex-plane primitives: Möbius maps, the Poincaré metric of the unit disk
//! (curvature −1, density `2/(1−|z|²)`), the punctured disk, the chordal metric
//! on the Riemann sphere and the Royden norm on centred balls.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// A point of the finite plane. All operations except [`spherical_distance`]
/// reject non-finite coordinates.
pub type ComplexPoint = Complex64;

pub(crate) fn ensure_finite(z: Complex64, what: &str) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{what} must be finite, got {z}")))
    }
}

fn ensure_in_disk(z: Complex64, what: &str) -> Result<()> {
    ensure_finite(z, what)?;
    if z.norm_sqr() < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{what} = {z} is not in the open unit disk")))
    }
}

/// Point of the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtendedPoint {
    Finite(Complex64),
    Infinity,
}

impl ExtendedPoint {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            ExtendedPoint::Finite(z) => Some(z),
            ExtendedPoint::Infinity => None,
        }
    }

    /// `1/w` on the sphere.
    pub fn invert(self) -> ExtendedPoint {
        match self {
            ExtendedPoint::Infinity => ExtendedPoint::Finite(Complex64::new(0.0, 0.0)),
            ExtendedPoint::Finite(z) if z == Complex64::new(0.0, 0.0) => ExtendedPoint::Infinity,
            ExtendedPoint::Finite(z) => ExtendedPoint::Finite(z.inv()),
        }
    }
}

impl From<Complex64> for ExtendedPoint {
    fn from(z: Complex64) -> Self {
        ExtendedPoint::Finite(z)
    }
}

/// `z ↦ (az + b)/(cz + d)` with `ad − bc ≠ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobiusMap {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl MobiusMap {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        for (v, n) in [(a, "a"), (b, "b"), (c, "c"), (d, "d")] {
            ensure_finite(v, n)?;
        }
        let det = a * d - b * c;
        if det.norm() == 0.0 {
            return Err(Error::domain("Möbius map is degenerate (ad − bc = 0)"));
        }
        Ok(Self { a, b, c, d })
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self { a: one, b: zero, c: zero, d: one }
    }

    /// Disk automorphism `ζ ↦ e^{iθ}(ζ − p)/(1 − p̄ζ)`, `|p| < 1`.
    pub fn disk_automorphism(p: Complex64, theta: f64) -> Result<Self> {
        ensure_in_disk(p, "automorphism centre")?;
        let rot = Complex64::from_polar(1.0, theta);
        Self::new(rot, -rot * p, -p.conj(), Complex64::new(1.0, 0.0))
    }

    /// `ζ ↦ (ζ + z′)/(1 + z̄′ζ)`: sends 0 to `z′` and `−z′` to 0.
    pub fn base_change(zp: Complex64) -> Result<Self> {
        ensure_in_disk(zp, "base point")?;
        let one = Complex64::new(1.0, 0.0);
        Self::new(one, zp, zp.conj(), one)
    }

    /// Involution `η ↦ (p − η)/(1 − p̄η)` exchanging 0 and `p`.
    pub fn swap(p: Complex64) -> Result<Self> {
        ensure_in_disk(p, "swap point")?;
        Self::new(
            Complex64::new(-1.0, 0.0),
            p,
            -p.conj(),
            Complex64::new(1.0, 0.0),
        )
    }

    pub fn determinant(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn pole(&self) -> Option<Complex64> {
        if self.c == Complex64::new(0.0, 0.0) {
            None
        } else {
            Some(-self.d / self.c)
        }
    }

    pub fn apply(&self, z: Complex64) -> Result<Complex64> {
        ensure_finite(z, "z")?;
        let den = self.c * z + self.d;
        if den.norm() == 0.0 {
            return Err(Error::Singular { z });
        }
        Ok((self.a * z + self.b) / den)
    }

    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        let den = self.c * z + self.d;
        if den.norm() == 0.0 {
            return Err(Error::Singular { z });
        }
        Ok(self.determinant() / (den * den))
    }

    /// `self ∘ other`, i.e. the map of the coefficient product.
    pub fn compose(&self, other: &MobiusMap) -> MobiusMap {
        MobiusMap {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    pub fn inverse(&self) -> MobiusMap {
        MobiusMap {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }
}

/// Tangent vector `V ∈ T_z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentVector {
    pub base: Complex64,
    pub direction: Complex64,
}

impl TangentVector {
    pub fn new(base: Complex64, direction: Complex64) -> Result<Self> {
        ensure_finite(base, "base")?;
        ensure_finite(direction, "direction")?;
        Ok(Self { base, direction })
    }
}

/// Poincaré distance in the unit disk, `2 artanh |z1 − z2|/|1 − z̄1 z2|`.
pub fn poincare_disk_distance(z1: Complex64, z2: Complex64) -> Result<f64> {
    ensure_in_disk(z1, "z1")?;
    ensure_in_disk(z2, "z2")?;
    let num = (z1 - z2).norm();
    if num == 0.0 {
        return Ok(0.0);
    }
    let den = (Complex64::new(1.0, 0.0) - z1.conj() * z2).norm();
    // (A+B)(A−B) = (1−|z1|²)(1−|z2|²) avoids cancellation near the circle.
    let prod = (1.0 - z1.norm_sqr()) * (1.0 - z2.norm_sqr());
    Ok(((den + num) * (den + num) / prod).ln())
}

pub fn poincare_disk_density(z: Complex64) -> Result<f64> {
    ensure_in_disk(z, "z")?;
    Ok(2.0 / (1.0 - z.norm_sqr()))
}

/// Density `1/(|z| log(1/|z|))` of the complete metric on `D∖{0}`.
pub fn punctured_disk_density(z: Complex64) -> Result<f64> {
    ensure_in_disk(z, "z")?;
    let r = z.norm();
    if r == 0.0 {
        return Err(Error::Puncture { z });
    }
    Ok(1.0 / (r * (1.0 / r).ln()))
}

/// Hyperbolic distance in `D∖{0}`, through the covering `w ↦ e^w` of the left
/// half-plane, minimised over the deck translations `w ↦ w + 2πik`.
pub fn punctured_disk_distance(z1: Complex64, z2: Complex64) -> Result<f64> {
    punctured_disk_density(z1)?;
    punctured_disk_density(z2)?;
    let w1 = z1.ln();
    let w2 = z2.ln();
    let k0 = ((w1.im - w2.im) / (2.0 * PI)).round() as i64;
    let mut best = f64::INFINITY;
    for k in (k0 - 1)..=(k0 + 1) {
        let w2k = w2 + Complex64::new(0.0, 2.0 * PI * k as f64);
        let t = (w1 - w2k).norm() / (w1 + w2k.conj()).norm();
        best = best.min(2.0 * t.atanh());
    }
    Ok(best)
}

/// Chordal distance `|w1 − w2|/(√(1+|w1|²)√(1+|w2|²))`, continued to ∞.
pub fn spherical_distance(w1: ExtendedPoint, w2: ExtendedPoint) -> f64 {
    match (w1, w2) {
        (ExtendedPoint::Infinity, ExtendedPoint::Infinity) => 0.0,
        (ExtendedPoint::Finite(w), ExtendedPoint::Infinity)
        | (ExtendedPoint::Infinity, ExtendedPoint::Finite(w)) => {
            1.0 / (1.0 + w.norm_sqr()).sqrt()
        }
        (ExtendedPoint::Finite(a), ExtendedPoint::Finite(b)) => {
            (a - b).norm() / ((1.0 + a.norm_sqr()).sqrt() * (1.0 + b.norm_sqr()).sqrt())
        }
    }
}

fn euclidean_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Royden norm `2‖V‖/R` of a tangent vector at the centre of the ball `‖z‖ < R`.
pub fn ball_royden_norm(v: &[Complex64], radius: f64) -> Result<f64> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::domain(format!("ball radius must be positive, got {radius}")));
    }
    for c in v {
        ensure_finite(*c, "tangent component")?;
    }
    Ok(2.0 * euclidean_norm(v) / radius)
}

/// Kobayashi distance from the centre of `‖z‖ < R` in `ℂⁿ`: the length
/// `log((R+‖z‖)/(R−‖z‖))` of the extremal linear disk `ζ ↦ Rζ z/‖z‖`.
pub fn kobayashi_ball_center(z: &[Complex64], radius: f64) -> Result<f64> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::domain(format!("ball radius must be positive, got {radius}")));
    }
    for c in z {
        ensure_finite(*c, "point component")?;
    }
    let n = euclidean_norm(z);
    if n >= radius {
        return Err(Error::domain(format!("‖z‖ = {n} is not inside the ball of radius {radius}")));
    }
    Ok(((radius + n) / (radius - n)).ln())
}

/// Euclidean disk `|z − center| < radius` used as a base manifold; its Kobayashi
/// geometry is the Poincaré geometry pulled back through the affine chart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaseDisk {
    pub center: Complex64,
    pub radius: f64,
}

impl Default for BaseDisk {
    fn default() -> Self {
        Self::unit()
    }
}

impl BaseDisk {
    pub fn unit() -> Self {
        Self {
            center: Complex64::new(0.0, 0.0),
            radius: 1.0,
        }
    }

    pub fn new(center: Complex64, radius: f64) -> Result<Self> {
        ensure_finite(center, "disk centre")?;
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::domain(format!("disk radius must be positive, got {radius}")));
        }
        Ok(Self { center, radius })
    }

    pub fn to_unit(&self, z: Complex64) -> Complex64 {
        (z - self.center) / self.radius
    }

    pub fn from_unit(&self, zeta: Complex64) -> Complex64 {
        self.center + zeta * self.radius
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.to_unit(z).norm_sqr() < 1.0
    }

    pub fn kobayashi(&self, z1: Complex64, z2: Complex64) -> Result<f64> {
        poincare_disk_distance(self.to_unit(z1), self.to_unit(z2))
    }

    /// `|V|_κ` for `V = direction` at `z`.
    pub fn royden_norm(&self, z: Complex64, direction: Complex64) -> Result<f64> {
        Ok(poincare_disk_density(self.to_unit(z))? * direction.norm() / self.radius)
    }

    /// Euclidean radius (about the centre) of the Kobayashi ball of radius `r`
    /// about the centre.
    pub fn kobayashi_ball_radius(&self, r: f64) -> f64 {
        self.radius * (r / 2.0).tanh()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn mobius_examples() {
        let z = c(0.3, 0.1);
        assert_eq!(MobiusMap::identity().apply(z).unwrap(), z);
        let psi = MobiusMap::base_change(c(0.5, 0.0)).unwrap();
        assert!(psi.apply(c(-0.5, 0.0)).unwrap().norm() < 1e-15);
        assert_relative_eq!(psi.apply(c(0.0, 0.0)).unwrap().re, 0.5);
        let swap = MobiusMap::swap(c(0.5, 0.0)).unwrap();
        assert_relative_eq!(swap.apply(c(0.0, 0.0)).unwrap().re, 0.5);
        assert!(swap.apply(c(0.5, 0.0)).unwrap().norm() < 1e-15);
    }

    #[test]
    fn mobius_pole_is_singular() {
        let m = MobiusMap::new(c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(-2.0, 0.0)).unwrap();
        assert!(matches!(m.apply(c(2.0, 0.0)), Err(Error::Singular { .. })));
        assert!(MobiusMap::new(c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)).is_err());
    }

    #[test]
    fn mobius_composition_is_coefficient_product() {
        let m1 = MobiusMap::disk_automorphism(c(0.2, -0.4), 0.7).unwrap();
        let m2 = MobiusMap::base_change(c(-0.1, 0.3)).unwrap();
        let z = c(0.15, 0.25);
        let lhs = m1.apply(m2.apply(z).unwrap()).unwrap();
        let rhs = m1.compose(&m2).apply(z).unwrap();
        assert!((lhs - rhs).norm() < 1e-14);
        let back = m1.inverse().apply(m1.apply(z).unwrap()).unwrap();
        assert!((back - z).norm() < 1e-14);
    }

    #[test]
    fn disk_distance_examples() {
        assert_relative_eq!(
            poincare_disk_distance(c(0.0, 0.0), c(0.5, 0.0)).unwrap(),
            3f64.ln(),
            epsilon = 1e-15
        );
        assert_eq!(poincare_disk_distance(c(0.2, 0.1), c(0.2, 0.1)).unwrap(), 0.0);
        let moved = (0.7 - 0.3) / (1.0 - 0.21);
        assert_relative_eq!(
            poincare_disk_distance(c(0.3, 0.0), c(0.7, 0.0)).unwrap(),
            poincare_disk_distance(c(0.0, 0.0), c(moved, 0.0)).unwrap(),
            epsilon = 1e-14
        );
        assert!(poincare_disk_distance(c(1.0, 0.0), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn density_examples() {
        assert_eq!(poincare_disk_density(c(0.0, 0.0)).unwrap(), 2.0);
        assert_relative_eq!(poincare_disk_density(c(0.5, 0.0)).unwrap(), 8.0 / 3.0);
        assert_relative_eq!(
            poincare_disk_density(c(0.0, 0.9)).unwrap(),
            2.0 / 0.19,
            max_relative = 1e-14
        );
        assert!(poincare_disk_density(c(0.0, 1.0)).is_err());

        let e = std::f64::consts::E;
        assert_relative_eq!(punctured_disk_density(c(-1.0 / e, 0.0)).unwrap(), e, max_relative = 1e-14);
        assert_relative_eq!(
            punctured_disk_density(c(0.0, (-2f64).exp())).unwrap(),
            e * e / 2.0,
            max_relative = 1e-14
        );
        assert_eq!(
            punctured_disk_density(c(0.3, 0.0)).unwrap(),
            punctured_disk_density(c(0.0, 0.3)).unwrap()
        );
        assert!(matches!(punctured_disk_density(c(0.0, 0.0)), Err(Error::Puncture { .. })));
        assert!(punctured_disk_density(c(1.0, 0.0)).is_err());
    }

    #[test]
    fn spherical_examples() {
        let f = |z: Complex64| ExtendedPoint::Finite(z);
        assert_relative_eq!(
            spherical_distance(f(c(0.0, 0.0)), f(c(1.0, 0.0))),
            0.5f64.sqrt(),
            epsilon = 1e-15
        );
        assert_eq!(spherical_distance(f(c(2.0, 3.0)), f(c(2.0, 3.0))), 0.0);
        assert_eq!(spherical_distance(f(c(0.0, 0.0)), ExtendedPoint::Infinity), 1.0);
    }

    #[test]
    fn royden_and_ball_examples() {
        assert_eq!(ball_royden_norm(&[c(1.0, 0.0)], 1.0).unwrap(), 2.0);
        assert_eq!(ball_royden_norm(&[c(0.0, 0.0)], 1.0).unwrap(), 0.0);
        assert_relative_eq!(ball_royden_norm(&[c(0.0, 3.0)], 2.0).unwrap(), 3.0);
        assert!(ball_royden_norm(&[c(1.0, 0.0)], 0.0).is_err());

        let r = 2.0;
        assert_relative_eq!(
            kobayashi_ball_center(&[c(0.6, 0.0), c(0.0, 0.8)], r).unwrap(),
            3f64.ln(),
            epsilon = 1e-14
        );
        assert_eq!(kobayashi_ball_center(&[c(0.0, 0.0), c(0.0, 0.0)], r).unwrap(), 0.0);
        assert_relative_eq!(
            kobayashi_ball_center(&[c(0.37, 0.0)], 1.0).unwrap(),
            poincare_disk_distance(c(0.0, 0.0), c(0.37, 0.0)).unwrap(),
            epsilon = 1e-14
        );
        assert!(kobayashi_ball_center(&[c(2.0, 0.0)], r).is_err());
    }

    #[test]
    fn punctured_distance_matches_radial_integral() {
        // Radial segments are geodesics: ∫ dr/(r log 1/r) = log(log(1/r1)/log(1/r2)).
        let (r1, r2) = (0.05, 0.6);
        let d = punctured_disk_distance(c(-r1, 0.0), c(-r2, 0.0)).unwrap();
        let exact = ((1.0 / r1).ln() / (1.0 / r2).ln()).ln();
        assert_relative_eq!(d, exact, max_relative = 1e-12);
        // Rotation invariance.
        let a = c(0.3, 0.2);
        let b = c(-0.1, 0.5);
        let rot = Complex64::from_polar(1.0, 1.1);
        assert_relative_eq!(
            punctured_disk_distance(a, b).unwrap(),
            punctured_disk_distance(a * rot, b * rot).unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn base_disk_royden_matches_density() {
        let b = BaseDisk::new(c(1.0, 1.0), 2.0).unwrap();
        let z = c(1.5, 0.5);
        let v = b.royden_norm(z, c(1.0, 0.0)).unwrap();
        let h = 1e-6;
        let d = b.kobayashi(z, z + c(h, 0.0)).unwrap() / h;
        assert_relative_eq!(v, d, max_relative = 1e-5);
    }
}
