//! Discrete Cauchy transform, Schwarz reconstruction, and exact witnesses for
//! the log-Lipschitz ∂̄-conditions on the disk and on the plane.
//!
//! Fields are piecewise constant on square cells centred at the grid nodes.
//! The transform `Th(z) = −(1/π)∫ h(ζ)/(ζ − z) dS` of such a field is summed
//! node by node with the kernel integrated exactly over each cell, so it is
//! exact for the piecewise-constant field at every point of the plane.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::cache::{DensityGrid, GridHeader, FIELD_TAG};
use crate::certificate::{Certificate, SlackRecord};
use crate::error::{Error, Result};
use crate::inequalities::CheckOptions;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Complex values on the nodes of a rectangle with square cells.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub header: GridHeader,
    pub values: Vec<Complex64>,
}

impl GridField {
    pub fn zeros(bounds: [f64; 4], nx: usize, ny: usize) -> Result<Self> {
        let header = GridHeader::new(bounds, nx, ny, FIELD_TAG, 0.0)?;
        let (hx, hy) = header.step();
        if (hx - hy).abs() > 1e-9 * hx {
            return Err(Error::domain(format!("cells must be square, got {hx} × {hy}")));
        }
        Ok(Self {
            header,
            values: vec![ZERO; nx * ny],
        })
    }

    pub fn from_fn(bounds: [f64; 4], nx: usize, ny: usize, f: impl Fn(Complex64) -> Complex64) -> Result<Self> {
        let mut field = Self::zeros(bounds, nx, ny)?;
        for j in 0..ny {
            for i in 0..nx {
                let z = field.node(i, j);
                let v = f(z);
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(Error::domain(format!("field value {v} at {z} is not finite")));
                }
                let k = field.header.index(i, j);
                field.values[k] = v;
            }
        }
        Ok(field)
    }

    pub fn nx(&self) -> usize {
        self.header.nx as usize
    }

    pub fn ny(&self) -> usize {
        self.header.ny as usize
    }

    pub fn step(&self) -> f64 {
        self.header.step().0
    }

    pub fn node(&self, i: usize, j: usize) -> Complex64 {
        self.header.node(i, j)
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[self.header.index(i, j)]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `(Σ |v|^p h²)^{1/p}`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let h2 = self.step().powi(2);
        self.values.iter().map(|v| v.norm().powf(p)).sum::<f64>().powf(1.0 / p) * h2.powf(1.0 / p)
    }

    /// `½(∂x + i∂y)` by central differences; `None` on the border.
    pub fn dbar(&self, i: usize, j: usize) -> Option<Complex64> {
        if i == 0 || j == 0 || i + 1 >= self.nx() || j + 1 >= self.ny() {
            return None;
        }
        let h = self.step();
        let dx = (self.get(i + 1, j) - self.get(i - 1, j)) / (2.0 * h);
        let dy = (self.get(i, j + 1) - self.get(i, j - 1)) / (2.0 * h);
        Some((dx + c(0.0, 1.0) * dy) * 0.5)
    }

    /// Shares the density-grid layout: the field tag and two planes holding
    /// real and imaginary parts.
    pub fn to_bytes(&self) -> Vec<u8> {
        let re = self.values.iter().map(|v| v.re).collect();
        let im = self.values.iter().map(|v| v.im).collect();
        DensityGrid::new(self.header, vec![re, im])
            .expect("planes match the header")
            .to_bytes()
    }

    pub fn from_bytes(bytes: &[u8], file: &str) -> Result<Self> {
        let grid = DensityGrid::from_bytes(bytes, file)?;
        let corrupt = |reason: &str| Error::Corrupt {
            file: file.to_string(),
            reason: reason.to_string(),
        };
        if grid.header.method != FIELD_TAG {
            return Err(corrupt("not a field file"));
        }
        if grid.planes.len() != 2 {
            return Err(corrupt("a field needs exactly two planes"));
        }
        let values = grid.planes[0].iter().zip(&grid.planes[1]).map(|(&a, &b)| c(a, b)).collect();
        Ok(Self {
            header: grid.header,
            values,
        })
    }
}

/// `−(1/π)∫ dS(u)/(u − d)` over the square `[−h/2, h/2]²`, from
/// `∫∫ dA/w = (1/2i)∮ w̄/w dw` with `w = u − d`, edge by edge.
pub fn cell_kernel(d: Complex64, h: f64) -> Complex64 {
    let e = h / 2.0;
    let corners = [c(-e, -e), c(e, -e), c(e, e), c(-e, e)];
    let mut acc = ZERO;
    for k in 0..4 {
        let (z0, z1) = (corners[k], corners[(k + 1) % 4]);
        let (w0, w1) = (z0 - d, z1 - d);
        if k % 2 == 0 {
            // horizontal edge: w̄ = w − 2is
            let s = z0.im - d.im;
            acc += w1 - w0;
            if s != 0.0 {
                acc -= c(0.0, 2.0 * s) * (w1 / w0).ln();
            }
        } else {
            // vertical edge: w̄ = 2s − w
            let s = z0.re - d.re;
            acc -= w1 - w0;
            if s != 0.0 {
                acc += (w1 / w0).ln() * (2.0 * s);
            }
        }
    }
    -(acc / c(0.0, 2.0)) / PI
}

fn sources(field: &GridField) -> Vec<(usize, usize, Complex64)> {
    let mut out = Vec::new();
    for j in 0..field.ny() {
        for i in 0..field.nx() {
            let v = field.get(i, j);
            if v != ZERO {
                out.push((i, j, v));
            }
        }
    }
    out
}

/// `Th(z)` at an arbitrary point, summed over the nonzero cells.
pub fn cauchy_at(field: &GridField, z: Complex64) -> Complex64 {
    let h = field.step();
    let mut acc = ZERO;
    for (i, j, v) in sources(field) {
        acc += v * cell_kernel(z - field.node(i, j), h);
    }
    acc
}

/// `Th` on the nodes of the field's own grid; with `normalize_at_zero` the
/// result is `Th − Th(0)`. Direct summation over nonzero source cells with a
/// Toeplitz kernel table, split across threads by target rows.
pub fn cauchy_transform(field: &GridField, normalize_at_zero: bool) -> Result<GridField> {
    let (nx, ny) = (field.nx(), field.ny());
    let h = field.step();
    let wx = 2 * nx - 1;
    let mut table = vec![ZERO; wx * (2 * ny - 1)];
    for n in 0..2 * ny - 1 {
        for m in 0..wx {
            let d = c((m as f64 - (nx - 1) as f64) * h, (n as f64 - (ny - 1) as f64) * h);
            table[n * wx + m] = cell_kernel(d, h);
        }
    }
    let src = sources(field);
    let mut out = GridField::zeros(field.header.bounds, nx, ny)?;
    let threads = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let rows_per = ny.div_ceil(threads).max(1);
    let (table, src) = (&table, &src);
    std::thread::scope(|s| {
        for (chunk, rows) in out.values.chunks_mut(rows_per * nx).enumerate() {
            s.spawn(move || {
                for (k, o) in rows.iter_mut().enumerate() {
                    let t = chunk * rows_per * nx + k;
                    let (it, jt) = (t % nx, t / nx);
                    let mut acc = ZERO;
                    for &(is, js, v) in src {
                        acc += v * table[(jt + ny - 1 - js) * wx + (it + nx - 1 - is)];
                    }
                    *o = acc;
                }
            });
        }
    });
    if normalize_at_zero {
        let t0 = cauchy_at(field, ZERO);
        for v in &mut out.values {
            *v -= t0;
        }
    }
    Ok(out)
}

/// Largest `|∂̄_h(Th) − h|` over nodes at least `margin` nodes from the border.
pub fn dbar_residual(transform: &GridField, source: &GridField, margin: usize) -> f64 {
    let mut worst: f64 = 0.0;
    let m = margin.max(1);
    for j in m..source.ny().saturating_sub(m) {
        for i in m..source.nx().saturating_sub(m) {
            if let Some(d) = transform.dbar(i, j) {
                worst = worst.max((d - source.get(i, j)).norm());
            }
        }
    }
    worst
}

/// Holomorphic `h` on the disk with prescribed boundary imaginary part and
/// `Re h(0) = 0`, by the trapezoidal Schwarz integral
/// `h(z) = (i/N) Σ v_k (ζ_k + z)/(ζ_k − z)`, `ζ_k = e^{2πik/N}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchwarzIntegral {
    samples: Vec<f64>,
    nodes: Vec<Complex64>,
}

pub fn schwarz_reconstruct(im_boundary: &[f64]) -> Result<SchwarzIntegral> {
    if im_boundary.is_empty() {
        return Err(Error::domain("no boundary samples"));
    }
    if let Some(v) = im_boundary.iter().find(|v| !v.is_finite()) {
        return Err(Error::domain(format!("boundary value {v} is not finite")));
    }
    let n = im_boundary.len();
    let nodes = (0..n).map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)).collect();
    Ok(SchwarzIntegral {
        samples: im_boundary.to_vec(),
        nodes,
    })
}

impl SchwarzIntegral {
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if z.norm() >= 1.0 {
            return Err(Error::domain(format!("{z} is not in the open unit disk")));
        }
        let mut acc = ZERO;
        for (v, zeta) in self.samples.iter().zip(&self.nodes) {
            acc += (zeta + z) / (zeta - z) * *v;
        }
        Ok(acc * c(0.0, 1.0) / self.samples.len() as f64)
    }

    /// Values on a grid; nodes outside `|z| ≤ radius` hold 0.
    pub fn grid(&self, bounds: [f64; 4], nx: usize, ny: usize, radius: f64) -> Result<GridField> {
        if !(radius < 1.0) {
            return Err(Error::domain(format!("radius {radius} must be < 1")));
        }
        let mut field = GridField::zeros(bounds, nx, ny)?;
        for j in 0..ny {
            for i in 0..nx {
                let z = field.node(i, j);
                if z.norm() <= radius {
                    let k = field.header.index(i, j);
                    field.values[k] = self.eval(z)?;
                }
            }
        }
        Ok(field)
    }

    /// Largest `|∂̄h|` at the points by fourth-order central differences.
    pub fn cauchy_riemann_residual(&self, points: &[Complex64], step: f64) -> Result<f64> {
        let d = |z: Complex64, dir: Complex64| -> Result<Complex64> {
            let f = |t: f64| self.eval(z + dir * t);
            Ok((f(-2.0 * step)? - f(2.0 * step)? + (f(step)? - f(-step)?) * 8.0) / (12.0 * step))
        };
        let mut worst: f64 = 0.0;
        for &z in points {
            let r = (d(z, c(1.0, 0.0))? + c(0.0, 1.0) * d(z, c(0.0, 1.0))?) * 0.5;
            worst = worst.max(r.norm());
        }
        Ok(worst)
    }
}

/// `|Re h(z)| ≤ 2K/(1 − |z|)` for boundary data bounded by `K`.
pub fn schwarz_growth_bound(sup_im: f64, z: Complex64) -> Result<f64> {
    if z.norm() >= 1.0 {
        return Err(Error::domain(format!("{z} is not in the open unit disk")));
    }
    Ok(2.0 * sup_im / (1.0 - z.norm()))
}

fn holder_kernel_norm(q: f64, inner: bool, radius: f64) -> f64 {
    // ‖1/|ζ|‖_{L^q} over |ζ| < radius (inner) or |ζ| > 1 (outer)
    if inner {
        (2.0 * PI * radius.powf(2.0 - q) / (2.0 - q)).powf(1.0 / q)
    } else if q.is_infinite() {
        1.0
    } else {
        (2.0 * PI / (q - 2.0)).powf(1.0 / q)
    }
}

fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else {
        p / (p - 1.0)
    }
}

/// `c₀(p)` with `|â| ≤ c₀(p)‖A‖_{L^p(D)}` for the disk transform
/// `â(z) = −(1/π)∫_D (1/(ζ−z) − 1/ζ) a dS`, `|a| ≤ A`: Hölder against
/// `‖1/|ζ−z|‖_{L^q(D)} ≤ ‖1/|ζ|‖_{L^q(2D)}` and `‖1/|ζ|‖_{L^q(D)}`.
pub fn c0(p: f64) -> Result<f64> {
    if !(p > 2.0) || !p.is_finite() {
        return Err(Error::domain(format!("need 2 < p < ∞, got {p}")));
    }
    let q = conjugate(p);
    Ok((holder_kernel_norm(q, true, 2.0) + holder_kernel_norm(q, true, 1.0)) / PI)
}

/// `c₁(p, p′)` with `|â| ≤ c₁(‖A‖_p + ‖A‖_{p′})` and also
/// `osc Re â ≤ c₁(‖A‖_p + ‖A‖_{p′})` for the plane transform: the kernel
/// split at `|ζ − z| = 1` with Hölder on each part.
pub fn c1(p: f64, p_prime: f64) -> Result<f64> {
    if !(p > 2.0) || !p.is_finite() {
        return Err(Error::domain(format!("need 2 < p < ∞, got {p}")));
    }
    if !(1.0..2.0).contains(&p_prime) {
        return Err(Error::domain(format!("need 1 ≤ p′ < 2, got {p_prime}")));
    }
    let near = holder_kernel_norm(conjugate(p), true, 1.0);
    let far = holder_kernel_norm(conjugate(p_prime), false, 1.0);
    Ok(2.0 / PI * near.max(far))
}

/// The constant `c` of the disk envelope: `π + 3·2^{1−2/p}c₀(p)‖A‖_p` bounds
/// both exponents (the left one after moving `z` to the centre).
pub fn prop5_constant(p: f64, norm_a: f64) -> Result<f64> {
    Ok(PI + 3.0 * 2f64.powf(1.0 - 2.0 / p) * c0(p)? * norm_a)
}

/// `(e^{−c/(1−r)^{2−2/p}}, e^{c/(1−r)})`.
pub fn prop5_envelope(c: f64, p: f64, r: f64) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::domain(format!("radius must be in [0, 1), got {r}")));
    }
    Ok(((-c / (1.0 - r).powf(2.0 - 2.0 / p)).exp(), (c / (1.0 - r)).exp()))
}

/// Coefficient `a` of `∂̄g = a·g`.
#[derive(Debug, Clone, PartialEq)]
pub enum Coefficient {
    Zero,
    /// `c` on `|z − center| < radius`.
    DiskIndicator { c: Complex64, center: Complex64, radius: f64 },
    /// `c·e^{−|z − center|²/width²}`.
    Gaussian { c: Complex64, center: Complex64, width: f64 },
    /// Piecewise constant on the cells of a grid.
    Grid(GridField),
}

/// Maximiser of `(1 − e^{−x²})/x` on `x > 0`, by golden section.
fn gaussian_profile_peak() -> f64 {
    let q = |x: f64| (1.0 - (-x * x).exp()) / x;
    let (mut a, mut b) = (0.1, 5.0);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let x1 = b - g * (b - a);
        let x2 = a + g * (b - a);
        if q(x1) < q(x2) {
            a = x1;
        } else {
            b = x2;
        }
    }
    (a + b) / 2.0
}

impl Coefficient {
    pub fn value(&self, z: Complex64) -> Complex64 {
        match self {
            Coefficient::Zero => ZERO,
            Coefficient::DiskIndicator { c, center, radius } => {
                if (z - center).norm() < *radius {
                    *c
                } else {
                    ZERO
                }
            }
            Coefficient::Gaussian { c, center, width } => c * (-(z - center).norm_sqr() / (width * width)).exp(),
            Coefficient::Grid(field) => {
                let h = field.step();
                let [x0, _, y0, _] = field.header.bounds;
                let i = ((z.re - x0) / h).round();
                let j = ((z.im - y0) / h).round();
                if i < 0.0 || j < 0.0 || i >= field.nx() as f64 || j >= field.ny() as f64 {
                    return ZERO;
                }
                field.get(i as usize, j as usize)
            }
        }
    }

    /// `Ta(z)`; for radial coefficients `c·q(|w|)/w·|w|`-type closed forms.
    pub fn transform(&self, z: Complex64) -> Complex64 {
        match self {
            Coefficient::Zero => ZERO,
            Coefficient::DiskIndicator { c, center, radius } => {
                let w = z - center;
                if w.norm() < *radius {
                    c * w.conj()
                } else {
                    c * radius * radius / w
                }
            }
            Coefficient::Gaussian { c, center, width } => {
                let w = z - center;
                let s2 = width * width;
                if w.norm_sqr() < 1e-300 {
                    return ZERO;
                }
                // (1 − e^{−|w|²/s²})/w, with expm1 for small |w|
                c * (-(-w.norm_sqr() / s2).exp_m1()) * s2 / w
            }
            Coefficient::Grid(field) => cauchy_at(field, z),
        }
    }

    /// `‖a‖_{L^p(ℂ)}`; exact for the closed-form kinds.
    pub fn lp_norm(&self, p: f64) -> f64 {
        match self {
            Coefficient::Zero => 0.0,
            Coefficient::DiskIndicator { c, radius, .. } => c.norm() * (PI * radius * radius).powf(1.0 / p),
            Coefficient::Gaussian { c, width, .. } => c.norm() * (PI * width * width / p).powf(1.0 / p),
            Coefficient::Grid(field) => field.lp_norm(p),
        }
    }

    /// `z ↦ a(z + s)`.
    pub fn shifted(&self, s: Complex64) -> Coefficient {
        match self {
            Coefficient::Zero => Coefficient::Zero,
            Coefficient::DiskIndicator { c, center, radius } => Coefficient::DiskIndicator {
                c: *c,
                center: center - s,
                radius: *radius,
            },
            Coefficient::Gaussian { c, center, width } => Coefficient::Gaussian {
                c: *c,
                center: center - s,
                width: *width,
            },
            Coefficient::Grid(field) => {
                let [x0, x1, y0, y1] = field.header.bounds;
                let mut g = field.clone();
                g.header.bounds = [x0 - s.re, x1 - s.re, y0 - s.im, y1 - s.im];
                Coefficient::Grid(g)
            }
        }
    }

    /// Points whose hull carries the extremes of every harmonic function of
    /// `Ta` over the plane: for radial kinds the image of `Ta` is the closed
    /// disk of radius `|c|·q*`, sampled on its circle; for grids the nodes
    /// and the limit 0 at ∞.
    fn transform_image(&self) -> Result<Vec<Complex64>> {
        const CIRCLE: usize = 1 << 16;
        let radius = match self {
            Coefficient::Zero => return Ok(vec![ZERO]),
            Coefficient::DiskIndicator { c, radius, .. } => c.norm() * radius,
            Coefficient::Gaussian { c, width, .. } => {
                let x = gaussian_profile_peak();
                c.norm() * width * (1.0 - (-x * x).exp()) / x
            }
            Coefficient::Grid(field) => {
                let mut v = cauchy_transform(field, false)?.values;
                v.push(ZERO);
                return Ok(v);
            }
        };
        let mut v: Vec<Complex64> = (0..CIRCLE)
            .map(|k| Complex64::from_polar(radius, 2.0 * PI * k as f64 / CIRCLE as f64))
            .collect();
        v.push(ZERO);
        Ok(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessDomain {
    Disk,
    Plane,
}

/// `â` = normalized transform of `a`, `g = g0·e^{â}`, `f = M·e^{−g}`; then
/// `∂̄f = −f·g·a`, so `|f_z̄| = |a||f||log M/f|` with `log M/f = g`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogLipschitzWitness {
    pub coefficient: Coefficient,
    pub g0: Complex64,
    pub m: f64,
    pub domain: WitnessDomain,
    pub p: f64,
    pub p_prime: f64,
    transform_at_zero: Complex64,
    /// Values of `â` carrying its extremes over the plane.
    image: Vec<Complex64>,
}

/// Polar midpoint nodes of the unit disk.
const DISK_RADII: usize = 200;
const DISK_ANGLES: usize = 400;

fn disk_node(k: usize, l: usize) -> (Complex64, f64) {
    let dr = 1.0 / DISK_RADII as f64;
    let dt = 2.0 * PI / DISK_ANGLES as f64;
    let r = (k as f64 + 0.5) * dr;
    (Complex64::from_polar(r, (l as f64 + 0.5) * dt), r * dr * dt)
}

pub fn make_witness(
    coefficient: Coefficient,
    g0: Complex64,
    m: f64,
    domain: WitnessDomain,
    p: f64,
    p_prime: f64,
) -> Result<LogLipschitzWitness> {
    if !(g0.re > 1.0) {
        return Err(Error::domain(format!("need Re g0 > 1, got {g0}")));
    }
    c1(p, p_prime)?;
    match domain {
        WitnessDomain::Plane if !(m >= 1.0) || !m.is_finite() => {
            return Err(Error::domain(format!("need M ≥ 1, got {m}")));
        }
        WitnessDomain::Disk if m != 1.0 => {
            return Err(Error::domain(format!("disk witnesses use M = 1, got {m}")));
        }
        _ => {}
    }
    let t0 = coefficient.transform(ZERO);
    let image = coefficient.transform_image()?.into_iter().map(|w| w - t0).collect();
    let w = LogLipschitzWitness {
        coefficient,
        g0,
        m,
        domain,
        p,
        p_prime,
        transform_at_zero: t0,
        image,
    };
    match domain {
        WitnessDomain::Plane => {
            // |f| < 1 and Re log M/f > 0: Re g > log M, min over the image circle
            let floor = m.ln().max(0.0);
            for (k, v) in w.image.iter().enumerate() {
                let re_g = (g0 * v.exp()).re;
                if !(re_g > floor) {
                    return Err(Error::Hypothesis {
                        i: k,
                        j: 0,
                        reason: format!("Re log M/f = {re_g} ≤ log M = {floor}"),
                    });
                }
            }
        }
        WitnessDomain::Disk => {
            // |f| < 1/e ⇔ Re g > 1 at every polar node
            for k in 0..DISK_RADII {
                for l in 0..DISK_ANGLES {
                    let (z, _) = disk_node(k, l);
                    let re_g = w.g(z).re;
                    if !(re_g > 1.0) {
                        return Err(Error::Hypothesis {
                            i: k,
                            j: l,
                            reason: format!("|f| = e^{{−{re_g}}} ≥ 1/e at {z}"),
                        });
                    }
                }
            }
        }
    }
    Ok(w)
}

impl LogLipschitzWitness {
    pub fn hat_a(&self, z: Complex64) -> Complex64 {
        self.coefficient.transform(z) - self.transform_at_zero
    }

    /// `log M/f`.
    pub fn g(&self, z: Complex64) -> Complex64 {
        self.g0 * self.hat_a(z).exp()
    }

    pub fn f(&self, z: Complex64) -> Complex64 {
        (-self.g(z)).exp() * self.m
    }

    /// `|a||f||log M/f|`, equal to `|f_z̄|` by construction.
    pub fn dbar_modulus(&self, z: Complex64) -> f64 {
        self.coefficient.value(z).norm() * self.f(z).norm() * self.g(z).norm()
    }

    /// `|a|·|log M/f|/log(M/|f|)`, the admissible `A` of the disk hypothesis.
    pub fn disk_a(&self, z: Complex64) -> f64 {
        let g = self.g(z);
        self.coefficient.value(z).norm() * g.norm() / g.re
    }

    /// `‖A‖_{L^p(D)}` by polar midpoint sums (disk), or `‖a‖_{L^p}` (plane).
    pub fn a_norm(&self, p: f64) -> f64 {
        match self.domain {
            WitnessDomain::Plane => self.coefficient.lp_norm(p),
            WitnessDomain::Disk => {
                let mut acc = 0.0;
                for k in 0..DISK_RADII {
                    for l in 0..DISK_ANGLES {
                        let (z, da) = disk_node(k, l);
                        acc += self.disk_a(z).powf(p) * da;
                    }
                }
                acc.powf(1.0 / p)
            }
        }
    }

    /// The witness for `z ↦ f(z + s)`: coefficient shifted and `g0 = g(s)`.
    pub fn shifted(&self, s: Complex64) -> Result<LogLipschitzWitness> {
        if self.domain != WitnessDomain::Plane {
            return Err(Error::domain("only plane witnesses shift"));
        }
        make_witness(self.coefficient.shifted(s), self.g(s), self.m, self.domain, self.p, self.p_prime)
    }

    /// `(sup e^{Re â}, sup e^{−Re â})` over the plane.
    pub fn one_sided_constants(&self) -> (f64, f64) {
        let hi = self.image.iter().map(|w| w.re).fold(f64::NEG_INFINITY, f64::max);
        let lo = self.image.iter().map(|w| w.re).fold(f64::INFINITY, f64::min);
        (hi.exp(), (-lo).exp())
    }

    /// `e^{osc Re â}`; invariant under shifts of the witness.
    pub fn shift_invariant_constant(&self) -> f64 {
        let (r, l) = self.one_sided_constants();
        r * l
    }

    fn re_g_range(&self) -> (f64, f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut cos_min = f64::INFINITY;
        for w in &self.image {
            let g = self.g0 * w.exp();
            lo = lo.min(g.re);
            hi = hi.max(g.re);
            cos_min = cos_min.min(g.re / g.norm());
        }
        (lo, hi, cos_min)
    }
}

fn require(w: &LogLipschitzWitness, domain: WitnessDomain) -> Result<()> {
    if w.domain != domain {
        return Err(Error::domain(format!("witness is on the {:?} domain, not {:?}", w.domain, domain)));
    }
    Ok(())
}

/// `e^{−c/(1−|z|)^{2−2/p}} ≤ log(1/|f(z)|)/log(1/|f(0)|) ≤ e^{c/(1−|z|)}`
/// with `c = prop5_constant(p, ‖A‖_p)`. Slacks are in log space.
pub fn check_prop5(w: &LogLipschitzWitness, points: &[Complex64], opts: &CheckOptions) -> Result<Certificate> {
    require(w, WitnessDomain::Disk)?;
    let norm = w.a_norm(w.p);
    let cst = prop5_constant(w.p, norm)? * opts.constant_scale;
    let denom = -w.f(ZERO).norm().ln();
    let mut rec = SlackRecord::new();
    for (k, &z) in points.iter().enumerate() {
        let r = z.norm();
        if r >= 1.0 {
            return Err(Error::domain(format!("point {z} is outside the unit disk")));
        }
        let ratio = -w.f(z).norm().ln() / denom;
        let upper = cst / (1.0 - r) - ratio.ln();
        let lower = ratio.ln() + cst / (1.0 - r).powf(2.0 - 2.0 / w.p);
        rec.push(k, upper.min(lower), &[z.re, z.im, ratio]);
    }
    let mut cert = rec.finish("prop5", opts.seed, opts.tolerance)?;
    cert.constants.insert("c".into(), cst);
    cert.constants.insert("c0".into(), c0(w.p)?);
    cert.constants.insert("p".into(), w.p);
    cert.constants.insert("norm_A_p".into(), norm);
    Ok(cert)
}

/// `C⁻¹ ≤ |log M/f(z)|/|log M/f(0)| ≤ C`, certified side by side with
/// `C_right = sup e^{Re â}` and `C_left = sup e^{−Re â}`; their product
/// `C = e^{osc Re â}` is the shift-invariant two-sided constant.
pub fn check_prop6(w: &LogLipschitzWitness, points: &[Complex64], opts: &CheckOptions) -> Result<Certificate> {
    require(w, WitnessDomain::Plane)?;
    let (cr, cl) = w.one_sided_constants();
    let (lcr, lcl) = ((cr * opts.constant_scale).ln(), (cl * opts.constant_scale).ln());
    let denom = w.g(ZERO).norm();
    let mut rec = SlackRecord::new();
    let (mut max_ratio, mut min_ratio) = (f64::NEG_INFINITY, f64::INFINITY);
    for (k, &z) in points.iter().enumerate() {
        let ratio = w.g(z).norm() / denom;
        max_ratio = max_ratio.max(ratio);
        min_ratio = min_ratio.min(ratio);
        rec.push(k, (lcr - ratio.ln()).min(ratio.ln() + lcl), &[z.re, z.im, ratio]);
    }
    let mut cert = rec.finish("prop6", opts.seed, opts.tolerance)?;
    let norms = w.coefficient.lp_norm(w.p) + w.coefficient.lp_norm(w.p_prime);
    let k1 = c1(w.p, w.p_prime)?;
    for (key, v) in [
        ("C", cr * cl),
        ("C_right", cr),
        ("C_left", cl),
        ("max_ratio", max_ratio),
        ("min_ratio", min_ratio),
        ("c1", k1),
        ("norm_A_p", w.coefficient.lp_norm(w.p)),
        ("norm_A_p_prime", w.coefficient.lp_norm(w.p_prime)),
        ("C_bound", (k1 * norms).exp()),
    ] {
        cert.constants.insert(key.into(), v);
    }
    Ok(cert)
}

/// Corollaries on a plane witness, one sample each:
/// 0. `inf|f| > 0`, including the limit at ∞ (contrapositive of vanishing);
/// 1. `sup|f/M| ≤ (inf|f/M|)^{1/C₂}` with `C₂ = e^{osc Re â}/min cos arg g`;
/// 2. for `F = e^{â}`, which has `|F_z̄| = |a||F|`:
///    `sup|F| ≤ C(A)·inf|F|` with `C(A) = e^{c₁(‖A‖_p + ‖A‖_{p′})}`.
pub fn check_prop6_corollaries(w: &LogLipschitzWitness, opts: &CheckOptions) -> Result<Certificate> {
    require(w, WitnessDomain::Plane)?;
    let (lo, hi, cos_min) = w.re_g_range();
    let mut rec = SlackRecord::new();
    let inf_f = w.m * (-hi).exp();
    rec.push(0, inf_f, &[0.0, inf_f]);
    let c2 = w.shift_invariant_constant() / cos_min * opts.constant_scale;
    // −log sup|f/M| = min Re g ≥ max Re g / C₂
    rec.push(1, (c2 * lo - hi) / hi, &[1.0, c2]);
    let (cr, cl) = w.one_sided_constants();
    let osc = (cr * cl).ln();
    let norms = w.coefficient.lp_norm(w.p) + w.coefficient.lp_norm(w.p_prime);
    let log_ca = c1(w.p, w.p_prime)? * norms + opts.constant_scale.ln();
    rec.push(2, log_ca - osc, &[2.0, log_ca]);
    let mut cert = rec.finish("prop6-corollaries", opts.seed, opts.tolerance)?;
    for (key, v) in [
        ("inf_abs_f", inf_f),
        ("sup_abs_f", w.m * (-lo).exp()),
        ("C2", c2),
        ("cos_min", cos_min),
        ("log_C_A", log_ca),
        ("lipschitz_sup_over_inf", osc.exp()),
    ] {
        cert.constants.insert(key.into(), v);
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, QuadOptions};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn indicator(n: usize, half: f64) -> GridField {
        GridField::from_fn([-half, half, -half, half], n, n, |z| {
            if z.norm() < 1.0 {
                c(1.0, 0.0)
            } else {
                ZERO
            }
        })
        .unwrap()
    }

    /// `−(1/π)∫_D dS/(ζ − z)` as a 1D integral over directions from `z` of
    /// the chord of the disk on that ray: `∫ (R_out − R_in) e^{−iθ} dθ`.
    fn disk_transform_oracle(z: Complex64) -> Complex64 {
        let chord = |t: f64, part: usize| -> f64 {
            let u = Complex64::from_polar(1.0, t);
            let b = (z.conj() * u).re;
            let disc = b * b - (z.norm_sqr() - 1.0);
            if disc <= 0.0 {
                return 0.0;
            }
            let (r1, r2) = (-b - disc.sqrt(), -b + disc.sqrt());
            let len = r2.max(0.0) - r1.max(0.0);
            if part == 0 {
                len * t.cos()
            } else {
                -len * t.sin()
            }
        };
        let o = QuadOptions {
            abs_tol: 1e-13,
            rel_tol: 1e-12,
            max_evals: 2_000_000,
        };
        // from outside only the cone of half-angle asin(1/|z|) about −z meets D
        let (a, b) = if z.norm() < 1.0 {
            (0.0, 2.0 * PI)
        } else {
            let (phi, half) = ((-z).arg(), (1.0 / z.norm()).asin());
            (phi - half, phi + half)
        };
        let re = integrate(|t| chord(t, 0), a, b, &o).value;
        let im = integrate(|t| chord(t, 1), a, b, &o).value;
        -c(re, im) / PI
    }

    #[test]
    fn cell_kernel_matches_far_field_and_symmetry() {
        let h = 0.1;
        assert!(cell_kernel(ZERO, h).norm() < 1e-15);
        for d in [c(0.7, 0.2), c(-0.3, 0.9), c(2.0, -1.0)] {
            let series = (-h * h / d + h.powi(6) / (60.0 * d.powi(5))) * (-1.0 / PI);
            assert_relative_eq!(cell_kernel(d, h).re, series.re, epsilon = 1e-10);
            assert_relative_eq!(cell_kernel(d, h).im, series.im, epsilon = 1e-10);
            assert!((cell_kernel(-d, h) + cell_kernel(d, h)).norm() < 1e-15);
        }
        // singular cell: brute-force midpoint sum
        let d = c(0.013, -0.021);
        let n = 2000;
        let mut acc = ZERO;
        for i in 0..n {
            for j in 0..n {
                let u = c(-h / 2.0 + (i as f64 + 0.5) * h / n as f64, -h / 2.0 + (j as f64 + 0.5) * h / n as f64);
                acc += 1.0 / (u - d);
            }
        }
        let brute = -acc * (h / n as f64).powi(2) / PI;
        assert!((brute - cell_kernel(d, h)).norm() < 1e-4 * h, "{brute} {}", cell_kernel(d, h));
    }

    #[test]
    fn zero_field_transforms_to_zero() {
        let f = GridField::zeros([-1.0, 1.0, -1.0, 1.0], 17, 17).unwrap();
        assert!(cauchy_transform(&f, true).unwrap().max_abs() == 0.0);
    }

    #[test]
    fn disk_indicator_transform_matches_closed_form() {
        let mut errs = Vec::new();
        for n in [65, 129] {
            let f = indicator(n, 1.5);
            let t = cauchy_transform(&f, true).unwrap();
            let h = f.step();
            let mut err: f64 = 0.0;
            for j in 0..n {
                for i in 0..n {
                    let z = f.node(i, j);
                    let exact = if z.norm() < 1.0 { z.conj() } else { 1.0 / z };
                    err = err.max((t.get(i, j) - exact).norm());
                }
            }
            assert!(err <= 5.0 * h, "n = {n}: {err} > 5h = {}", 5.0 * h);
            errs.push(err);
            let z0 = f.node(n / 2, n / 2);
            assert!(z0.norm() < 1e-12 && t.get(n / 2, n / 2).norm() < 1e-15);
        }
        assert!(errs[1] < 0.6 * errs[0], "{errs:?}");
    }

    #[test]
    fn closed_form_agrees_with_independent_quadrature() {
        let a = Coefficient::DiskIndicator {
            c: c(1.0, 0.0),
            center: ZERO,
            radius: 1.0,
        };
        for k in 0..20 {
            let r = if k < 10 { 0.09 * k as f64 + 0.03 } else { 1.1 + 0.3 * (k - 10) as f64 };
            let z = Complex64::from_polar(r, 0.7 * k as f64 + 0.1);
            let oracle = disk_transform_oracle(z);
            assert!((a.transform(z) - oracle).norm() < 1e-9, "{z}: {} vs {oracle}", a.transform(z));
        }
    }

    #[test]
    fn gaussian_transform_is_consistent_with_grid_sum() {
        let a = Coefficient::Gaussian {
            c: c(0.4, 0.1),
            center: c(0.2, -0.1),
            width: 0.5,
        };
        let field = GridField::from_fn([-3.0, 3.0, -3.0, 3.0], 241, 241, |z| a.value(z)).unwrap();
        for z in [c(0.0, 0.0), c(0.5, 0.5), c(-1.0, 0.3), c(2.5, 2.5)] {
            assert!((cauchy_at(&field, z) - a.transform(z)).norm() < 1e-3, "{z}");
        }
    }

    #[test]
    fn smooth_fields_invert_dbar_at_first_order_or_better() {
        let bump = |z: Complex64| {
            let r2 = z.norm_sqr();
            if r2 < 1.0 {
                c((1.0 - r2).powi(3), 0.5 * (1.0 - r2).powi(3))
            } else {
                ZERO
            }
        };
        let mut res = Vec::new();
        for n in [41, 81] {
            let f = GridField::from_fn([-1.25, 1.25, -1.25, 1.25], n, n, bump).unwrap();
            let t = cauchy_transform(&f, true).unwrap();
            let r = dbar_residual(&t, &f, 1);
            assert!(r <= 5.0 * f.step() * f.max_abs(), "{r}");
            res.push(r);
        }
        assert!(res[1] <= 0.55 * res[0], "{res:?}");
    }

    #[test]
    fn schwarz_examples() {
        let n = 4096;
        let ts: Vec<f64> = (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect();
        let zero = schwarz_reconstruct(&vec![0.0; n]).unwrap();
        assert_eq!(zero.eval(c(0.3, 0.2)).unwrap(), ZERO);
        let s = schwarz_reconstruct(&ts.iter().map(|t| t.sin()).collect::<Vec<_>>()).unwrap();
        let co = schwarz_reconstruct(&ts.iter().map(|t| t.cos()).collect::<Vec<_>>()).unwrap();
        let mut worst: f64 = 0.0;
        for k in 0..200 {
            let z = Complex64::from_polar(0.9 * (k as f64 / 200.0).sqrt(), 0.37 * k as f64);
            worst = worst.max((s.eval(z).unwrap() - z).norm());
            worst = worst.max((co.eval(z).unwrap() - c(0.0, 1.0) * z).norm());
        }
        assert!(worst <= 1e-10, "{worst}");
        assert!(schwarz_reconstruct(&[0.0, f64::NAN]).is_err());
        assert!(s.eval(c(1.0, 0.0)).is_err());
        let g = s.grid([-1.0, 1.0, -1.0, 1.0], 21, 21, 0.9).unwrap();
        assert!((g.get(15, 10) - g.node(15, 10)).norm() < 1e-10);
        assert_eq!(g.get(0, 0), ZERO);
    }

    #[test]
    fn schwarz_growth_bound_holds() {
        let n = 2048;
        let data: Vec<f64> = (0..n).map(|k| if k < n / 2 { 1.0 } else { -1.0 }).collect();
        let s = schwarz_reconstruct(&data).unwrap();
        for r in [0.0, 0.5, 0.9, 0.99] {
            let z = c(r, 0.0);
            assert!(s.eval(z).unwrap().re.abs() <= schwarz_growth_bound(1.0, z).unwrap());
        }
        assert!(s.eval(ZERO).unwrap().re.abs() < 1e-14);
    }

    #[test]
    fn field_bytes_round_trip() {
        let f = GridField::from_fn([-1.0, 1.0, -1.0, 1.0], 5, 5, |z| z * z).unwrap();
        let back = GridField::from_bytes(&f.to_bytes(), "mem").unwrap();
        assert_eq!(back, f);
    }

    fn indicator_witness(domain: WitnessDomain, m: f64) -> LogLipschitzWitness {
        let a = Coefficient::DiskIndicator {
            c: c(0.3, 0.0),
            center: ZERO,
            radius: 1.0,
        };
        make_witness(a, c(3.0, 0.0), m, domain, 4.0, 1.5).unwrap()
    }

    #[test]
    fn zero_coefficient_witness() {
        let w = make_witness(Coefficient::Zero, c(2.0, 0.5), 1.0, WitnessDomain::Plane, 4.0, 1.5).unwrap();
        assert_eq!(w.f(c(0.4, 9.0)), w.f(ZERO));
        let cert = check_prop6(&w, &[c(1.0, 1.0), c(-5.0, 2.0)], &CheckOptions::default()).unwrap();
        assert!(cert.pass);
        assert_eq!(cert.constants["C"], 1.0);
        let cor = check_prop6_corollaries(&w, &CheckOptions::default()).unwrap();
        assert!(cor.pass);
        let d = make_witness(Coefficient::Zero, c(2.0, 0.0), 1.0, WitnessDomain::Disk, 4.0, 1.5).unwrap();
        assert!(check_prop5(&d, &[c(0.5, 0.0)], &CheckOptions::default()).unwrap().pass);
    }

    #[test]
    fn indicator_witness_plane() {
        let w = indicator_witness(WitnessDomain::Plane, 1f64.exp());
        assert_relative_eq!(w.hat_a(c(0.5, 0.2)).re, 0.15, epsilon = 1e-15);
        assert_relative_eq!(w.hat_a(c(2.0, 0.0)).re, 0.15, epsilon = 1e-15);
        let ratio = w.g(c(0.5, 0.0)).norm() / w.g(ZERO).norm();
        assert_relative_eq!(ratio, 0.15f64.exp(), max_relative = 1e-14);
        assert!((ratio - 1.1618).abs() < 1e-4);
        let (cr, cl) = w.one_sided_constants();
        assert_relative_eq!(cr, 0.3f64.exp(), max_relative = 1e-12);
        assert_relative_eq!(cl, 0.3f64.exp(), max_relative = 1e-12);
        let pts: Vec<Complex64> = (0..=40)
            .flat_map(|i| (0..=40).map(move |j| c(-2.0 + 0.1 * i as f64, -2.0 + 0.1 * j as f64)))
            .filter(|z| z.norm() <= 2.0)
            .collect();
        let cert = check_prop6(&w, &pts, &CheckOptions::default().tolerance(1e-6)).unwrap();
        assert!(cert.pass);
        assert!((cert.constants["max_ratio"] - 0.3f64.exp()).abs() < 1e-3);
        assert!(cert.constants["C"] <= cert.constants["C_bound"]);
        // tight one-sided constants: a 5% cut is violated
        let neg = check_prop6(&w, &pts, &CheckOptions::default().tolerance(1e-6).scaled(0.95)).unwrap();
        assert!(!neg.pass);
        let cor = check_prop6_corollaries(&w, &CheckOptions::default()).unwrap();
        assert!(cor.pass, "{}", cor.to_json());
    }

    #[test]
    fn shifted_witness_keeps_the_shift_invariant_constant() {
        let w = indicator_witness(WitnessDomain::Plane, 1.0);
        let s = c(5.0, 0.0);
        let ws = w.shifted(s).unwrap();
        for z in [c(0.0, 0.0), c(0.3, -0.2), c(-4.5, 0.1)] {
            assert!((ws.f(z) - w.f(z + s)).norm() < 1e-12 * w.f(z + s).norm().max(1e-300));
        }
        assert_relative_eq!(ws.shift_invariant_constant(), w.shift_invariant_constant(), max_relative = 1e-9);
        let pts: Vec<Complex64> = (0..50).map(|k| Complex64::from_polar(0.1 * k as f64, 0.9 * k as f64) - s).collect();
        assert!(check_prop6(&ws, &pts, &CheckOptions::default().tolerance(1e-6)).unwrap().pass);
    }

    #[test]
    fn indicator_witness_disk() {
        let w = indicator_witness(WitnessDomain::Disk, 1.0);
        let z = c(0.5, 0.0);
        let ratio = -w.f(z).norm().ln() / -w.f(ZERO).norm().ln();
        assert_relative_eq!(ratio, 0.15f64.exp(), max_relative = 1e-12);
        let cert = check_prop5(&w, &[z, c(0.0, 0.9), c(-0.99, 0.0)], &CheckOptions::default()).unwrap();
        assert!(cert.pass);
        let (lo, hi) = prop5_envelope(cert.constants["c"], 4.0, 0.5).unwrap();
        assert!(lo < ratio && ratio < hi);
        // |f| ≥ 1/e somewhere: g0 too small
        let a = Coefficient::DiskIndicator {
            c: c(0.3, 0.0),
            center: ZERO,
            radius: 1.0,
        };
        assert!(matches!(
            make_witness(a, c(1.1, 0.0), 1.0, WitnessDomain::Disk, 4.0, 1.5),
            Err(Error::Hypothesis { .. })
        ));
    }

    #[test]
    fn envelope_widens_towards_the_circle() {
        let cst = prop5_constant(4.0, 1.0).unwrap();
        let mut prev = (1.0, 1.0);
        for k in 0..20 {
            let (lo, hi) = prop5_envelope(cst, 4.0, k as f64 / 20.0).unwrap();
            assert!(lo <= prev.0 && hi >= prev.1);
            prev = (lo, hi);
        }
    }

    #[test]
    fn constants_degenerate_towards_p_equal_two() {
        assert!(c0(2.001).unwrap() > c0(3.0).unwrap());
        assert!(c0(2.0).is_err());
        assert!(c1(4.0, 2.0).is_err());
        assert!(c1(4.0, 1.0).unwrap().is_finite());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn witnesses_satisfy_the_pointwise_identity(
            cr in -0.5f64..0.5, ci in -0.5f64..0.5, cx in -1.0f64..1.0, cy in -1.0f64..1.0,
            width in 0.3f64..1.5, zx in -2.0f64..2.0, zy in -2.0f64..2.0,
        ) {
            let a = Coefficient::Gaussian { c: c(cr, ci), center: c(cx, cy), width };
            let w = make_witness(a, c(3.0, 0.0), 1.0, WitnessDomain::Plane, 4.0, 1.5).unwrap();
            let z = c(zx, zy);
            let h = 1e-5;
            let dx = (w.f(z + h) - w.f(z - h)) / (2.0 * h);
            let dy = (w.f(z + c(0.0, h)) - w.f(z - c(0.0, h))) / (2.0 * h);
            let dbar = (dx + c(0.0, 1.0) * dy) * 0.5;
            let scale = w.f(z).norm().max(1e-300);
            prop_assert!((dbar.norm() - w.dbar_modulus(z)).abs() <= 1e-6 * scale);
            prop_assert!(w.hat_a(ZERO).norm() == 0.0);
            let cert = check_prop6(&w, &[z], &CheckOptions::default().tolerance(1e-6)).unwrap();
            prop_assert!(cert.pass);
            prop_assert!(cert.constants["C"] <= cert.constants["C_bound"]);
            prop_assert!(check_prop6_corollaries(&w, &CheckOptions::default()).unwrap().pass);
        }
    }
}
