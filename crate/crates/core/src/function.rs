//! Expression trees for holomorphic test functions and maps.
//!
//! Trees serialise to JSON (tagged by `"op"`), evaluate pointwise, and
//! differentiate numerically by central differences with Richardson
//! extrapolation. Each function declares a codomain constraint that is audited
//! on sample sets before the function is used by a certifier.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::MobiusMap;
use crate::modular;

/// Step used for numeric derivatives.
pub const DERIVATIVE_STEP: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Expr {
    Const {
        value: Complex64,
    },
    Identity,
    /// `a z + b`
    Affine {
        a: Complex64,
        b: Complex64,
    },
    Mobius {
        map: MobiusMap,
    },
    Exp {
        arg: Box<Expr>,
    },
    /// Principal logarithm shifted by `2πi·branch`.
    Log {
        arg: Box<Expr>,
        branch: i64,
    },
    /// `Σ cₙ zⁿ`, valid for `|z| < radius`.
    Series {
        coeffs: Vec<Complex64>,
        radius: f64,
    },
    /// Modular function `λ` of an upper-half-plane argument.
    Lambda {
        arg: Box<Expr>,
    },
    /// `outer(inner(z))`
    Compose {
        outer: Box<Expr>,
        inner: Box<Expr>,
    },
    Add {
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Sub {
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Mul {
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Div {
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Neg {
        arg: Box<Expr>,
    },
    Powi {
        arg: Box<Expr>,
        n: i32,
    },
}

impl Expr {
    pub fn constant(value: Complex64) -> Expr {
        Expr::Const { value }
    }

    pub fn real(value: f64) -> Expr {
        Expr::Const {
            value: Complex64::new(value, 0.0),
        }
    }

    pub fn z() -> Expr {
        Expr::Identity
    }

    pub fn affine(a: Complex64, b: Complex64) -> Expr {
        Expr::Affine { a, b }
    }

    pub fn mobius(map: MobiusMap) -> Expr {
        Expr::Mobius { map }
    }

    pub fn exp(self) -> Expr {
        Expr::Exp { arg: Box::new(self) }
    }

    pub fn log(self, branch: i64) -> Expr {
        Expr::Log {
            arg: Box::new(self),
            branch,
        }
    }

    pub fn lambda(self) -> Expr {
        Expr::Lambda { arg: Box::new(self) }
    }

    pub fn series(coeffs: Vec<Complex64>, radius: f64) -> Expr {
        Expr::Series { coeffs, radius }
    }

    pub fn compose(self, inner: Expr) -> Expr {
        Expr::Compose {
            outer: Box::new(self),
            inner: Box::new(inner),
        }
    }

    pub fn powi(self, n: i32) -> Expr {
        Expr::Powi {
            arg: Box::new(self),
            n,
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(self, rhs: Expr) -> Expr {
        Expr::Add {
            lhs: Box::new(self),
            rhs: Box::new(rhs),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(self, rhs: Expr) -> Expr {
        Expr::Sub {
            lhs: Box::new(self),
            rhs: Box::new(rhs),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, rhs: Expr) -> Expr {
        Expr::Mul {
            lhs: Box::new(self),
            rhs: Box::new(rhs),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(self, rhs: Expr) -> Expr {
        Expr::Div {
            lhs: Box::new(self),
            rhs: Box::new(rhs),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Expr {
        Expr::Neg { arg: Box::new(self) }
    }

    /// The covering `S(ζ) = λ(1 + i(1+ζ)/(1−ζ))` with `S(0) = −1`, `S′(0) > 0`.
    pub fn covering() -> Expr {
        Expr::mobius(modular::covering_tau_map()).lambda()
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let v = match self {
            Expr::Const { value } => *value,
            Expr::Identity => z,
            Expr::Affine { a, b } => a * z + b,
            Expr::Mobius { map } => map.apply(z)?,
            Expr::Exp { arg } => arg.eval(z)?.exp(),
            Expr::Log { arg, branch } => {
                let w = arg.eval(z)?;
                if w.norm() == 0.0 {
                    return Err(Error::Singular { z });
                }
                w.ln() + Complex64::new(0.0, 2.0 * PI * *branch as f64)
            }
            Expr::Series { coeffs, radius } => {
                if z.norm() >= *radius {
                    return Err(Error::domain(format!(
                        "series evaluated at {z} outside its radius {radius}"
                    )));
                }
                coeffs
                    .iter()
                    .rev()
                    .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
            }
            Expr::Lambda { arg } => modular::lambda(arg.eval(z)?)?.value,
            Expr::Compose { outer, inner } => outer.eval(inner.eval(z)?)?,
            Expr::Add { lhs, rhs } => lhs.eval(z)? + rhs.eval(z)?,
            Expr::Sub { lhs, rhs } => lhs.eval(z)? - rhs.eval(z)?,
            Expr::Mul { lhs, rhs } => lhs.eval(z)? * rhs.eval(z)?,
            Expr::Div { lhs, rhs } => {
                let d = rhs.eval(z)?;
                if d.norm() == 0.0 {
                    return Err(Error::Singular { z });
                }
                lhs.eval(z)? / d
            }
            Expr::Neg { arg } => -arg.eval(z)?,
            Expr::Powi { arg, n } => {
                let w = arg.eval(z)?;
                if *n < 0 && w.norm() == 0.0 {
                    return Err(Error::Singular { z });
                }
                w.powi(*n)
            }
        };
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::Singular { z })
        }
    }

    fn contains_log(&self) -> bool {
        match self {
            Expr::Log { .. } => true,
            Expr::Const { .. }
            | Expr::Identity
            | Expr::Affine { .. }
            | Expr::Mobius { .. }
            | Expr::Series { .. } => false,
            Expr::Exp { arg } | Expr::Lambda { arg } | Expr::Neg { arg } | Expr::Powi { arg, .. } => {
                arg.contains_log()
            }
            Expr::Compose { outer, inner } => outer.contains_log() || inner.contains_log(),
            Expr::Add { lhs, rhs }
            | Expr::Sub { lhs, rhs }
            | Expr::Mul { lhs, rhs }
            | Expr::Div { lhs, rhs } => lhs.contains_log() || rhs.contains_log(),
        }
    }
}

/// Declared constraint on the values of a function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Codomain {
    Any,
    OmitsZero,
    OmitsZeroOne,
    /// `Re f > 0`
    PositiveRealPart,
    /// `0 < |f| < 1`
    PuncturedDisk,
    /// `|f| < 1`
    UnitDisk,
    /// `0 < |f| < bound`
    BoundedNonvanishing { bound: f64 },
    /// Values avoid `2πiℤ`.
    OmitsTwoPiIZ,
}

impl Codomain {
    /// Distance-like margin of `w` from violating the constraint; negative or
    /// zero means violation.
    pub fn margin(&self, w: Complex64) -> f64 {
        match self {
            Codomain::Any => f64::INFINITY,
            Codomain::OmitsZero => w.norm(),
            Codomain::OmitsZeroOne => w.norm().min((w - 1.0).norm()),
            Codomain::PositiveRealPart => w.re,
            Codomain::PuncturedDisk => w.norm().min(1.0 - w.norm()),
            Codomain::UnitDisk => 1.0 - w.norm(),
            Codomain::BoundedNonvanishing { bound } => w.norm().min(bound - w.norm()),
            Codomain::OmitsTwoPiIZ => {
                let k = (w.im / (2.0 * PI)).round();
                (w - Complex64::new(0.0, 2.0 * PI * k)).norm()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticFunction {
    pub expr: Expr,
    pub codomain: Codomain,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl AnalyticFunction {
    pub fn new(expr: Expr, codomain: Codomain) -> Self {
        Self {
            expr,
            codomain,
            name: None,
        }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.expr.eval(z)
    }

    /// `f′(z)` by central differences along the real direction with two levels
    /// of Richardson extrapolation.
    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        self.derivative_with_step(z, DERIVATIVE_STEP)
    }

    pub fn derivative_with_step(&self, z: Complex64, h: f64) -> Result<Complex64> {
        let d = |h: f64| -> Result<Complex64> {
            Ok((self.eval(z + h)? - self.eval(z - h)?) / (2.0 * h))
        };
        let d1 = d(h)?;
        let d2 = d(h / 2.0)?;
        let d4 = d(h / 4.0)?;
        let r1 = (d2 * 4.0 - d1) / 3.0;
        let r2 = (d4 * 4.0 - d2) / 3.0;
        Ok((r2 * 16.0 - r1) / 15.0)
    }

    /// Checks the declared codomain on every point; the first violation is
    /// returned with its witness.
    pub fn audit<'a>(&self, points: impl IntoIterator<Item = &'a Complex64>) -> Result<()> {
        for &z in points {
            let w = self.eval(z).map_err(|e| e.at_sample(z))?;
            if !(self.codomain.margin(w) > 0.0) {
                return Err(Error::Audit {
                    witness: z,
                    reason: format!("value {w} violates {:?}", self.codomain),
                });
            }
        }
        Ok(())
    }

    /// Walks the segment `[a, b]` and rejects jumps of size > π between
    /// adjacent samples at the finest resolution (a principal-log cut).
    pub fn audit_continuity(&self, a: Complex64, b: Complex64) -> Result<()> {
        if !self.expr.contains_log() {
            return Ok(());
        }
        const STEPS: usize = 256;
        let mut prev = self.eval(a)?;
        for k in 1..=STEPS {
            let z = a + (b - a) * (k as f64 / STEPS as f64);
            let v = self.eval(z)?;
            if (v - prev).norm() > PI {
                let zl = a + (b - a) * ((k - 1) as f64 / STEPS as f64);
                let (loc, jump) = locate_jump(self, zl, z)?;
                if jump > PI {
                    return Err(Error::Branch { location: loc, jump });
                }
            }
            prev = v;
        }
        Ok(())
    }

    /// Continuous logarithm of `f` along `[a, b]`, starting from `log_at_a`.
    /// Arguments are unwrapped; a step whose principal argument increment
    /// exceeds π/2 is bisected, and a branch error is raised if bisection
    /// cannot bring it under π.
    pub fn continuous_log(&self, a: Complex64, b: Complex64, log_at_a: Complex64) -> Result<Complex64> {
        const STEPS: usize = 16;
        let mut log = log_at_a;
        let mut prev_z = a;
        let mut prev_f = self.eval(a)?;
        for k in 1..=STEPS {
            let z = a + (b - a) * (k as f64 / STEPS as f64);
            log = self.advance_log(prev_z, prev_f, z, log, 0)?;
            prev_f = self.eval(z)?;
            prev_z = z;
        }
        Ok(log)
    }

    fn advance_log(
        &self,
        z0: Complex64,
        f0: Complex64,
        z1: Complex64,
        log0: Complex64,
        depth: u32,
    ) -> Result<Complex64> {
        let f1 = self.eval(z1)?;
        if f1.norm() == 0.0 {
            return Err(Error::Singular { z: z1 });
        }
        let step = (f1 / f0).ln();
        if step.im.abs() <= PI / 2.0 {
            return Ok(log0 + step);
        }
        if depth >= 30 {
            if step.im.abs() >= PI {
                return Err(Error::Branch {
                    location: z1,
                    jump: step.im.abs(),
                });
            }
            return Ok(log0 + step);
        }
        let zm = (z0 + z1) * 0.5;
        let lm = self.advance_log(z0, f0, zm, log0, depth + 1)?;
        let fm = self.eval(zm)?;
        self.advance_log(zm, fm, z1, lm, depth + 1)
    }
}

fn locate_jump(f: &AnalyticFunction, mut lo: Complex64, mut hi: Complex64) -> Result<(Complex64, f64)> {
    let mut flo = f.eval(lo)?;
    let mut fhi = f.eval(hi)?;
    for _ in 0..60 {
        let mid = (lo + hi) * 0.5;
        let fm = f.eval(mid)?;
        if (fm - flo).norm() >= (fhi - fm).norm() {
            hi = mid;
            fhi = fm;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    Ok(((lo + hi) * 0.5, (fhi - flo).norm()))
}
