//! The elliptic modular function `λ = θ₂⁴/θ₃⁴`, the universal covering of
//! `ℂ∖{0,1}` by the upper half-plane, together with its derivative, its inverse
//! and the anharmonic symmetry group of `{0, 1, ∞}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use crate::error::{Error, Result};
use crate::geometry::MobiusMap;
use crate::special::{ellip_k, theta_constants};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// The six Möbius maps permuting `{0, 1, ∞}`; each is an isometry of the
/// hyperbolic metric of `ℂ∖{0,1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Anharmonic {
    Identity,
    /// `z ↦ 1 − z`
    OneMinus,
    /// `z ↦ 1/z`
    Inverse,
    /// `z ↦ 1/(1 − z)`
    InverseOneMinus,
    /// `z ↦ z/(z − 1)`
    OverMinusOne,
    /// `z ↦ (z − 1)/z`
    MinusOneOver,
}

impl Anharmonic {
    pub const ALL: [Anharmonic; 6] = [
        Anharmonic::Identity,
        Anharmonic::OneMinus,
        Anharmonic::Inverse,
        Anharmonic::InverseOneMinus,
        Anharmonic::OverMinusOne,
        Anharmonic::MinusOneOver,
    ];

    pub fn mobius(self) -> MobiusMap {
        let (one, zero) = (c(1.0, 0.0), c(0.0, 0.0));
        let (a, b, cc, d) = match self {
            Anharmonic::Identity => (one, zero, zero, one),
            Anharmonic::OneMinus => (-one, one, zero, one),
            Anharmonic::Inverse => (zero, one, one, zero),
            Anharmonic::InverseOneMinus => (zero, one, -one, one),
            Anharmonic::OverMinusOne => (one, zero, one, -one),
            Anharmonic::MinusOneOver => (one, -one, one, zero),
        };
        MobiusMap { a, b, c: cc, d }
    }

    /// Action on `τ` realising this map: `λ(word(τ)) = self(λ(τ))`.
    /// `τ+1` realises `z/(z−1)`, `−1/τ` realises `1 − z`.
    fn tau_word(self) -> &'static [TauMove] {
        use TauMove::*;
        match self {
            Anharmonic::Identity => &[],
            Anharmonic::OneMinus => &[Invert],
            Anharmonic::OverMinusOne => &[Translate],
            // F∘G: apply G (−1/τ) first, then F (τ+1).
            Anharmonic::MinusOneOver => &[Invert, Translate],
            Anharmonic::InverseOneMinus => &[Translate, Invert],
            Anharmonic::Inverse => &[Invert, Translate, Invert],
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum TauMove {
    Translate,
    Invert,
}

/// `λ(τ)` and `dλ/dτ`.
#[derive(Debug, Clone, Copy)]
pub struct LambdaValue {
    pub value: Complex64,
    pub derivative: Complex64,
}

fn lambda_reduced(tau: Complex64) -> Result<LambdaValue> {
    let th = theta_constants(tau)?;
    let ratio = th.theta2 / th.theta3;
    let value = ratio.powi(4);
    let derivative = value * 4.0 * (th.dtheta2 / th.theta2 - th.dtheta3 / th.theta3);
    Ok(LambdaValue { value, derivative })
}

/// Evaluates `λ(τ)` and `λ′(τ)` for any `τ` in the upper half-plane.
///
/// `τ` is first carried into the standard fundamental domain of `SL₂(ℤ)`; the
/// moves `τ ↦ τ ± 1` and `τ ↦ −1/τ` act on `λ` by `z ↦ z/(z−1)` and `z ↦ 1−z`.
pub fn lambda(tau: Complex64) -> Result<LambdaValue> {
    if !(tau.im > 0.0) || !tau.re.is_finite() || !tau.im.is_finite() {
        return Err(Error::domain(format!("τ = {tau} is not in the upper half-plane")));
    }
    // λ(τ) = outer(λ(γτ)), dγτ/dτ tracked through `gamma`.
    let mut outer = MobiusMap::identity();
    let mut gamma = MobiusMap::identity();
    let mut t = tau;
    let f = Anharmonic::OverMinusOne.mobius();
    let g = Anharmonic::OneMinus.mobius();
    for _ in 0..10_000 {
        let shift = t.re.round();
        if shift != 0.0 {
            t -= shift;
            let shift_map = MobiusMap {
                a: c(1.0, 0.0),
                b: c(-shift, 0.0),
                c: c(0.0, 0.0),
                d: c(1.0, 0.0),
            };
            gamma = shift_map.compose(&gamma);
            if (shift as i64).rem_euclid(2) == 1 {
                outer = outer.compose(&f);
            }
        }
        if t.norm_sqr() < 1.0 - 1e-15 {
            t = -t.inv();
            let inv_map = MobiusMap {
                a: c(0.0, 0.0),
                b: c(-1.0, 0.0),
                c: c(1.0, 0.0),
                d: c(0.0, 0.0),
            };
            gamma = inv_map.compose(&gamma);
            outer = outer.compose(&g);
        } else {
            let inner = lambda_reduced(t)?;
            let value = outer.apply(inner.value)?;
            let derivative =
                outer.derivative(inner.value)? * inner.derivative * gamma.derivative(tau)?;
            return Ok(LambdaValue { value, derivative });
        }
    }
    Err(Error::Internal(format!("modular reduction of τ = {tau} did not terminate")))
}

/// Image of `z` with the smallest modulus under the anharmonic group, with the
/// map used. The image satisfies `|w| ≤ 1` and `Re w ≤ 1/2`.
pub fn reduce_point(z: Complex64) -> Result<(Complex64, Anharmonic)> {
    if z.norm() == 0.0 || (z - 1.0).norm() == 0.0 {
        return Err(Error::Puncture { z });
    }
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::domain(format!("z = {z} must be finite")));
    }
    let mut best = (z, Anharmonic::Identity);
    for a in Anharmonic::ALL {
        let w = a.mobius().apply(z)?;
        if w.norm() < best.0.norm() {
            best = (w, a);
        }
    }
    Ok(best)
}

fn newton_polish(mut tau: Complex64, target: Complex64) -> Result<Complex64> {
    for _ in 0..8 {
        let lv = lambda(tau)?;
        let step = (lv.value - target) / lv.derivative;
        let mut next = tau - step;
        // Keep the iterate in the half-plane.
        while next.im <= 0.0 {
            next = (next + tau) * 0.5;
            if (next - tau).norm() < 1e-300 {
                break;
            }
        }
        tau = next;
        if step.norm() <= 1e-15 * tau.norm().max(1.0) {
            break;
        }
    }
    Ok(tau)
}

/// A preimage `τ` of `w` under `λ` for `w` already reduced by [`reduce_point`]
/// (`|w| ≤ 1`, `Re w ≤ 1/2`): `τ = i K(1−w)/K(w)` with principal branches,
/// polished by Newton iteration on `λ(τ) = w`.
fn lambda_inverse_reduced(w: Complex64) -> Result<Complex64> {
    let flip = w.im < 0.0;
    let wq = if flip { w.conj() } else { w };
    let k = ellip_k(wq)?;
    let kp = ellip_k(c(1.0, 0.0) - wq)?;
    let mut tau = c(0.0, 1.0) * kp / k;
    if !(tau.im > 0.0) {
        return Err(Error::Internal(format!("period ratio for {w} left the half-plane")));
    }
    tau = newton_polish(tau, wq)?;
    if flip {
        // λ(−τ̄) = conj λ(τ)
        tau = -tau.conj();
    }
    let check = lambda(tau)?.value;
    if (check - w).norm() > 1e-10 * w.norm().max(1e-300) && (check - w).norm() > 1e-14 {
        return Err(Error::Internal(format!("λ-inversion residual {} at {w}", (check - w).norm())));
    }
    Ok(tau)
}

/// Some `τ` in the upper half-plane with `λ(τ) = z`.
pub fn lambda_inverse(z: Complex64) -> Result<Complex64> {
    let (w, map) = reduce_point(z)?;
    // z = map⁻¹(w); find the word for map⁻¹ and push τ_w through it.
    let inv = Anharmonic::ALL
        .into_iter()
        .find(|a| {
            let comp = a.mobius().compose(&map.mobius());
            let probe = c(0.3, 0.7);
            comp.apply(probe).map(|v| (v - probe).norm() < 1e-12).unwrap_or(false)
        })
        .ok_or_else(|| Error::Internal("anharmonic group not closed".into()))?;
    let mut tau = lambda_inverse_reduced(w)?;
    for mv in inv.tau_word() {
        tau = match mv {
            TauMove::Translate => tau + 1.0,
            TauMove::Invert => -tau.inv(),
        };
    }
    Ok(tau)
}

/// Hyperbolic density of `ℂ∖{0,1}` computed through the covering:
/// `ρ(λ(τ)) |λ′(τ)| = 1/Im τ`. Returns `(ρ, estimated absolute error)`.
pub fn rho01_via_covering(z: Complex64) -> Result<(f64, f64)> {
    let (w, map) = reduce_point(z)?;
    let tau = lambda_inverse_reduced(w)?;
    let lv = lambda(tau)?;
    let rho_w = 1.0 / (tau.im * lv.derivative.norm());
    // ρ(z) = ρ(B z) |B′(z)|
    let jac = map.mobius().derivative(z)?.norm();
    let rho = rho_w * jac;
    Ok((rho, rho * 1e-13))
}

/// The universal covering `S: D → ℂ∖{0,1}`, `S(ζ) = λ(1 + i(1+ζ)/(1−ζ))`.
/// It satisfies `S(0) = −1`, `S′(0) = 2/ρ₀,₁(−1) > 0`, and maps the real
/// diameter onto the negative real axis.
pub fn covering_tau_map() -> MobiusMap {
    // τ = ((i−1)ζ + (1+i)) / (−ζ + 1)
    MobiusMap {
        a: c(-1.0, 1.0),
        b: c(1.0, 1.0),
        c: c(-1.0, 0.0),
        d: c(1.0, 0.0),
    }
}

pub fn covering(zeta: Complex64) -> Result<LambdaValue> {
    if zeta.norm_sqr() >= 1.0 {
        return Err(Error::domain(format!("ζ = {zeta} is not in the unit disk")));
    }
    let m = covering_tau_map();
    let tau = m.apply(zeta)?;
    let lv = lambda(tau)?;
    Ok(LambdaValue {
        value: lv.value,
        derivative: lv.derivative * m.derivative(zeta)?,
    })
}


#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn lambda_special_values() {
        // λ(i) = 1/2, λ(1+i) = −1
        let v = lambda(c(0.0, 1.0)).unwrap().value;
        assert!((v - c(0.5, 0.0)).norm() < 1e-14);
        let v = lambda(c(1.0, 1.0)).unwrap().value;
        assert!((v - c(-1.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn lambda_derivative_identity() {
        // λ′ = iπ λ θ₄⁴ at reduced points
        let tau = c(0.3, 1.2);
        let lv = lambda(tau).unwrap();
        let th = theta_constants(tau).unwrap();
        let expected = c(0.0, PI) * lv.value * th.theta4.powi(4);
        assert!((lv.derivative - expected).norm() < 1e-12 * expected.norm());
    }

    #[test]
    fn reduction_is_consistent() {
        // λ is Γ(2)-invariant: λ(τ+2) = λ(τ), λ(τ/(2τ+1)) = λ(τ)
        let tau = c(0.37, 0.21);
        let a = lambda(tau).unwrap();
        let b = lambda(tau + 2.0).unwrap();
        let cc = lambda(tau / (tau * 2.0 + 1.0)).unwrap();
        assert!((a.value - b.value).norm() < 1e-11 * a.value.norm());
        assert!((a.value - cc.value).norm() < 1e-11 * a.value.norm());
        let h = 1e-6;
        let fd = (lambda(tau + h).unwrap().value - lambda(tau - h).unwrap().value) / (2.0 * h);
        assert!((fd - a.derivative).norm() < 1e-6 * a.derivative.norm());
    }

    #[test]
    fn inverse_round_trip() {
        for z in [c(0.3, 0.4), c(-2.0, 0.0), c(5.0, -3.0), c(1e-6, 1e-7), c(0.5, 0.0), c(1.0, 1e-9)] {
            let tau = lambda_inverse(z).unwrap();
            assert!(tau.im > 0.0);
            let back = lambda(tau).unwrap().value;
            assert!((back - z).norm() < 1e-9 * z.norm().max(1.0), "{z}: {back}");
        }
    }

    #[test]
    fn density_at_minus_one() {
        let (rho, _) = rho01_via_covering(c(-1.0, 0.0)).unwrap();
        assert_relative_eq!(rho, 0.228_473_290_522_231_8, max_relative = 1e-12);
    }

    #[test]
    fn covering_normalisation() {
        let s = covering(c(0.0, 0.0)).unwrap();
        assert!((s.value - c(-1.0, 0.0)).norm() < 1e-13);
        assert!(s.derivative.im.abs() < 1e-12 && s.derivative.re > 0.0);
        // real diameter goes to the negative axis
        let v = covering(c(-0.3, 0.0)).unwrap().value;
        assert!(v.re < 0.0 && v.im.abs() < 1e-12);
    }
}
