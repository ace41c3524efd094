//! Seeded random families of admissible test functions on the unit disk.
//!
//! Functions omitting `{0, 1}` come in three kinds:
//! * `A ∘ S ∘ (c·m)`: the covering `S` after a random disk automorphism `m`
//!   and a fixed contraction `c`, then a random anharmonic map `A`;
//! * `−exp(x₀ + Σ cₙzⁿ)` with `Σ|cₙ| < π`, so the exponent never reaches
//!   `iπ(2ℤ+1)`;
//! * `c + r·m(z)` with the image disk avoiding `0` and `1`.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::function::{AnalyticFunction, Codomain, Expr};
use crate::geometry::MobiusMap;
use crate::modular::Anharmonic;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    Covering,
    NegExp,
    Affine,
}

/// Largest `|m(0)|` of the random automorphisms; keeps `|m(z)| ≤ 0.975` for
/// `|z| ≤ 0.9`.
pub const MAX_SHIFT: f64 = 0.6;

/// Covering members are `S(COVERING_CONTRACTION·m(z))`. Near the circle `S`
/// comes within `e^{−π/Im τ}` of `0`, `1` or `∞`, which rounds onto an
/// omitted value once `Im τ` drops below about `0.1`; the contraction keeps
/// `Im τ ≥ 0.12` on the sampling disk.
pub const COVERING_CONTRACTION: f64 = 0.8;

/// Uniform point of the disk `|z| < radius`.
pub fn disk_point<R: Rng>(rng: &mut R, radius: f64) -> Complex64 {
    let r = radius * rng.gen::<f64>().sqrt();
    Complex64::from_polar(r, rng.gen_range(0.0..2.0 * PI))
}

pub fn automorphism<R: Rng>(rng: &mut R, max_shift: f64) -> MobiusMap {
    let p = disk_point(rng, max_shift);
    MobiusMap::disk_automorphism(p, rng.gen_range(0.0..2.0 * PI)).expect("|p| < 1")
}

pub fn covering_member<R: Rng>(rng: &mut R) -> AnalyticFunction {
    let m = automorphism(rng, MAX_SHIFT);
    let a = Anharmonic::ALL[rng.gen_range(0..6)];
    let inner = Expr::covering().compose(Expr::affine(Complex64::new(COVERING_CONTRACTION, 0.0), Complex64::new(0.0, 0.0)).compose(Expr::mobius(m)));
    let expr = if a == Anharmonic::Identity {
        inner
    } else {
        Expr::mobius(a.mobius()).compose(inner)
    };
    AnalyticFunction::new(expr, Codomain::OmitsZeroOne).named("covering")
}

pub fn neg_exp_member<R: Rng>(rng: &mut R) -> AnalyticFunction {
    let degree = rng.gen_range(1..=4);
    let budget = 0.95 * PI * rng.gen::<f64>();
    let raw: Vec<Complex64> = (0..degree)
        .map(|_| Complex64::from_polar(rng.gen::<f64>(), rng.gen_range(0.0..2.0 * PI)))
        .collect();
    let total: f64 = raw.iter().map(|c| c.norm()).sum::<f64>().max(f64::MIN_POSITIVE);
    let mut coeffs = vec![Complex64::new(rng.gen_range(-4.0..4.0), 0.0)];
    coeffs.extend(raw.iter().map(|c| c * (budget / total)));
    AnalyticFunction::new(Expr::series(coeffs, 1.0).exp().neg(), Codomain::OmitsZeroOne).named("neg-exp")
}

pub fn affine_member<R: Rng>(rng: &mut R) -> AnalyticFunction {
    let centre = loop {
        let c = disk_point(rng, 3.0);
        if c.norm() > 0.05 && (c - 1.0).norm() > 0.05 {
            break c;
        }
    };
    let r = 0.99 * rng.gen::<f64>() * centre.norm().min((centre - 1.0).norm());
    let m = automorphism(rng, MAX_SHIFT);
    let expr = Expr::affine(Complex64::new(r, 0.0), centre).compose(Expr::mobius(m));
    AnalyticFunction::new(expr, Codomain::OmitsZeroOne).named("affine")
}

/// One admissible function omitting `{0, 1}`, mixed 1/2 covering, 3/10
/// negated exponential, 1/5 affine.
pub fn omitting_01<R: Rng>(rng: &mut R) -> (FamilyKind, AnalyticFunction) {
    let u: f64 = rng.gen();
    if u < 0.5 {
        (FamilyKind::Covering, covering_member(rng))
    } else if u < 0.8 {
        (FamilyKind::NegExp, neg_exp_member(rng))
    } else {
        (FamilyKind::Affine, affine_member(rng))
    }
}

/// `1/f`, which omits `{0, 1}` whenever `f` does.
pub fn reciprocal(f: &AnalyticFunction) -> AnalyticFunction {
    AnalyticFunction::new(Expr::real(1.0).div(f.expr.clone()), Codomain::OmitsZeroOne)
}

/// `a·(1+m(z))/(1−m(z)) + b + i·t` with `a > 0`, `b ≥ 0`: positive real part.
pub fn positive_real_part<R: Rng>(rng: &mut R) -> AnalyticFunction {
    let m = automorphism(rng, MAX_SHIFT);
    let cayley = MobiusMap::new(
        Complex64::new(1.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(1.0, 0.0),
    )
    .expect("nonsingular");
    let a = rng.gen_range(0.1..3.0);
    let b = if rng.gen::<bool>() { rng.gen_range(0.0..2.0) } else { 0.0 };
    let t = rng.gen_range(-2.0..2.0);
    let expr = Expr::affine(Complex64::new(a, 0.0), Complex64::new(b, t)).compose(Expr::mobius(cayley.compose(&m)));
    AnalyticFunction::new(expr, Codomain::PositiveRealPart).named("poisson")
}

/// `exp(−F)` with `Re F > 0`: values in the punctured disk.
pub fn punctured_disk_valued<R: Rng>(rng: &mut R) -> AnalyticFunction {
    let f = positive_real_part(rng);
    AnalyticFunction::new(f.expr.neg().exp(), Codomain::PuncturedDisk).named("exp-poisson")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn members_are_admissible_on_the_sampling_disk() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pts: Vec<Complex64> = (0..64).map(|_| disk_point(&mut rng, 0.9)).collect();
        for _ in 0..60 {
            let (_, f) = omitting_01(&mut rng);
            f.audit(pts.iter()).unwrap();
            reciprocal(&f).audit(pts.iter()).unwrap();
            positive_real_part(&mut rng).audit(pts.iter()).unwrap();
            punctured_disk_valued(&mut rng).audit(pts.iter()).unwrap();
        }
    }

    #[test]
    fn seeded_draws_replay() {
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..5).map(|_| omitting_01(&mut rng).1).collect::<Vec<_>>()
        };
        assert_eq!(draw(3), draw(3));
        assert_ne!(draw(3), draw(4));
    }
}
