//! Special functions: gamma (through `statrs`), the complete elliptic integral of
//! the first kind for complex parameter via the arithmetic-geometric mean, and
//! Jacobi theta constants with their `τ`-derivatives.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

/// Arithmetic-geometric mean with the "right" root choice at each step
/// (`|a_{n+1} − b_{n+1}| ≤ |a_{n+1} + b_{n+1}|`), which selects the principal
/// value when `Re b > 0`.
pub fn agm(a: Complex64, b: Complex64) -> Complex64 {
    let (mut a, mut b) = (a, b);
    for _ in 0..64 {
        if (a - b).norm() <= 1e-16 * a.norm() {
            break;
        }
        let a1 = (a + b) * 0.5;
        let mut b1 = (a * b).sqrt();
        if (a1 - b1).norm() > (a1 + b1).norm() {
            b1 = -b1;
        }
        a = a1;
        b = b1;
    }
    a
}

/// Complete elliptic integral `K(m) = ∫₀^{π/2} (1 − m sin²θ)^{−1/2} dθ` in the
/// parameter convention, principal branch (cut along `[1, ∞)`).
pub fn ellip_k(m: Complex64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    if (one - m).norm() == 0.0 {
        return Err(Error::Singular { z: m });
    }
    let mean = agm(one, (one - m).sqrt());
    Ok(Complex64::new(PI / 2.0, 0.0) / mean)
}

/// Theta constants `θ₂, θ₃, θ₄` at `q = e^{iπτ}` together with `dθ/dτ`.
#[derive(Debug, Clone, Copy)]
pub struct ThetaConstants {
    pub theta2: Complex64,
    pub theta3: Complex64,
    pub theta4: Complex64,
    pub dtheta2: Complex64,
    pub dtheta3: Complex64,
    pub dtheta4: Complex64,
}

/// Largest `|q|` accepted by [`theta_constants`]; callers reduce `τ` to the
/// modular fundamental domain first, where `|q| ≤ e^{−π√3/2} ≈ 0.066`.
pub const MAX_NOME: f64 = 0.5;

pub fn theta_constants(tau: Complex64) -> Result<ThetaConstants> {
    if !(tau.im > 0.0) || !tau.re.is_finite() {
        return Err(Error::domain(format!("τ = {tau} is not in the upper half-plane")));
    }
    let ipi_tau = Complex64::new(0.0, PI) * tau;
    let nome = (-PI * tau.im).exp();
    if nome >= MAX_NOME {
        return Err(Error::Internal(format!(
            "theta series nome |q| = {nome:.3} too large (τ = {tau} not reduced)"
        )));
    }
    let ipi = Complex64::new(0.0, PI);
    let one = Complex64::new(1.0, 0.0);

    let mut t2 = Complex64::new(0.0, 0.0);
    let mut d2 = Complex64::new(0.0, 0.0);
    let mut t3 = one;
    let mut d3 = Complex64::new(0.0, 0.0);
    let mut t4 = one;
    let mut d4 = Complex64::new(0.0, 0.0);

    for n in 0..200u32 {
        let nh = n as f64 + 0.5;
        let e2 = nh * nh;
        let term2 = (ipi_tau * e2).exp();
        t2 += term2 * 2.0;
        d2 += term2 * ipi * (2.0 * e2);
        let small2 = term2.norm() * 2.0 <= 1e-17 * t2.norm();

        let small34 = if n >= 1 {
            let e3 = (n as f64) * (n as f64);
            let term3 = (ipi_tau * e3).exp();
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            t3 += term3 * 2.0;
            d3 += term3 * ipi * (2.0 * e3);
            t4 += term3 * (2.0 * sign);
            d4 += term3 * ipi * (2.0 * e3 * sign);
            term3.norm() * 2.0 <= 1e-17
        } else {
            false
        };
        if small2 && small34 {
            return Ok(ThetaConstants {
                theta2: t2,
                theta3: t3,
                theta4: t4,
                dtheta2: d2,
                dtheta3: d3,
                dtheta4: d4,
            });
        }
    }
    Err(Error::Internal(format!("theta series did not converge at τ = {tau}")))
}
