//! Kobayashi distance on planar domains.
//!
//! Exact values on the disk and from the centre of a norm ball, upper bounds
//! from chains of holomorphic disks, and first-arrival distances for a density
//! `ρ(z)|dz|` by fast marching on a rectangular grid.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::cache::{DensityGrid, GridHeader};
use crate::certificate::{Certificate, SlackRecord};
use crate::error::{Error, Result};
use crate::function::AnalyticFunction;
use crate::geometry::{poincare_disk_distance, punctured_disk_distance};
use crate::quadrature::{integrate, QuadOptions};
use crate::rho01::{DensityModel, DomainTag};

pub use crate::geometry::kobayashi_ball_center;

/// Joint-continuity tolerance for chain audits.
pub const CHAIN_TOLERANCE: f64 = 1e-9;

/// Kobayashi distance of the unit disk (the Poincaré distance).
pub fn kobayashi_disk(z1: Complex64, z2: Complex64) -> Result<f64> {
    poincare_disk_distance(z1, z2)
}

/// One link `h_j(ζ)` of a chain with its parameter `ζ_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainStep {
    pub map: AnalyticFunction,
    pub zeta: Complex64,
}

/// Chain of holomorphic disks from `start` to `end`:
/// `h₁(0) = start`, `h_{j+1}(0) = h_j(ζ_j)`, `h_N(ζ_N) = end`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskChain {
    pub start: Complex64,
    pub end: Complex64,
    pub steps: Vec<ChainStep>,
}

impl DiskChain {
    /// Checks the parameter bounds and every joint; joint `j` is the junction
    /// before step `j` (joint `N` is the end point).
    pub fn audit(&self) -> Result<()> {
        let mismatch = |a: Complex64, b: Complex64| (a - b).norm() / a.norm().max(b.norm()).max(1.0);
        if self.steps.is_empty() {
            let m = mismatch(self.start, self.end);
            if m > CHAIN_TOLERANCE {
                return Err(Error::MalformedChain { joint: 0, mismatch: m });
            }
            return Ok(());
        }
        let mut prev = self.start;
        for (j, step) in self.steps.iter().enumerate() {
            if !(step.zeta.norm() < 1.0) {
                return Err(Error::domain(format!("chain parameter ζ_{j} = {} is not in the disk", step.zeta)));
            }
            let origin = step.map.eval(Complex64::new(0.0, 0.0))?;
            let m = mismatch(origin, prev);
            if !(m <= CHAIN_TOLERANCE) {
                return Err(Error::MalformedChain { joint: j, mismatch: m });
            }
            prev = step.map.eval(step.zeta)?;
        }
        let m = mismatch(prev, self.end);
        if !(m <= CHAIN_TOLERANCE) {
            return Err(Error::MalformedChain {
                joint: self.steps.len(),
                mismatch: m,
            });
        }
        Ok(())
    }
}

/// `Σ log((1+|ζ_j|)/(1−|ζ_j|))` after auditing the chain.
pub fn chain_length(chain: &DiskChain) -> Result<f64> {
    chain.audit()?;
    Ok(chain
        .steps
        .iter()
        .map(|s| {
            let r = s.zeta.norm();
            ((1.0 + r) / (1.0 - r)).ln()
        })
        .sum())
}

/// First-arrival value at a grid node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arrival {
    Reached(f64),
    /// No path inside the grid reaches the node.
    Unreachable,
}

impl Arrival {
    pub fn value(self) -> Option<f64> {
        match self {
            Arrival::Reached(v) => Some(v),
            Arrival::Unreachable => None,
        }
    }
}

/// Rectangular grid carrying densities and, after a solve, arrival values.
#[derive(Debug, Clone)]
pub struct GeodesicGrid {
    pub header: GridHeader,
    /// Radius of the disks removed around punctures.
    pub excision_radius: f64,
    pub punctures: Vec<Complex64>,
    /// `None` on excluded nodes.
    pub density: Vec<Option<f64>>,
    pub distance: Vec<Arrival>,
    pub source: Option<Complex64>,
}

#[derive(Clone, Copy)]
struct Front {
    t: f64,
    idx: usize,
}
impl PartialEq for Front {
    fn eq(&self, o: &Self) -> bool {
        self.t == o.t && self.idx == o.idx
    }
}
impl Eq for Front {}
impl PartialOrd for Front {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Front {
    // min-heap on arrival, ties by index for determinism
    fn cmp(&self, o: &Self) -> Ordering {
        o.t.total_cmp(&self.t).then_with(|| o.idx.cmp(&self.idx))
    }
}

/// Axis neighbours in counter-clockwise order; the diagonal between axis
/// neighbours `k` and `k+1` is their sum.
const AXES: [(i64, i64); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];

impl GeodesicGrid {
    /// Samples `model` on an `nx × ny` node grid over `bounds = [x0, x1, y0, y1]`.
    /// Nodes outside the domain, or within `3h` of a puncture, are excluded.
    pub fn new(model: &DensityModel, bounds: [f64; 4], nx: usize, ny: usize) -> Result<Self> {
        let header = GridHeader::new(bounds, nx, ny, model.method.tag(), model.tolerance)?;
        let (hx, hy) = header.step();
        if ((hx - hy) / hx).abs() > 1e-9 {
            return Err(Error::domain(format!("grid cells must be square, got {hx} × {hy}")));
        }
        let excision_radius = 3.0 * hx;
        let punctures = model.punctures();
        let mut density = vec![None; header.len()];
        for j in 0..ny {
            for i in 0..nx {
                let z = header.node(i, j);
                if !model.contains(z) || punctures.iter().any(|p| (z - p).norm() < excision_radius) {
                    continue;
                }
                let rho = model.rho(z).map_err(|e| e.at_sample(z))?;
                if !(rho > 0.0) || !rho.is_finite() {
                    return Err(Error::Internal(format!("density {rho} at {z} is not positive")));
                }
                density[header.index(i, j)] = Some(rho);
            }
        }
        Ok(Self {
            header,
            excision_radius,
            punctures,
            distance: vec![Arrival::Unreachable; header.len()],
            density,
            source: None,
        })
    }

    pub fn step(&self) -> f64 {
        self.header.step().0
    }

    fn neighbour(&self, i: usize, j: usize, di: i64, dj: i64) -> Option<usize> {
        let (ni, nj) = (i as i64 + di, j as i64 + dj);
        if ni < 0 || nj < 0 || ni >= self.header.nx as i64 || nj >= self.header.ny as i64 {
            return None;
        }
        let k = self.header.index(ni as usize, nj as usize);
        self.density[k].is_some().then_some(k)
    }

    /// Fills first-arrival distances from `source`.
    ///
    /// The source's cell corners are seeded with `ρ·|node − source|`; each
    /// accepted node then relaxes its neighbours through the eight triangles
    /// (axis neighbour, diagonal neighbour) of the stencil.
    pub fn solve(&mut self, source: Complex64) -> Result<()> {
        let h = self.step();
        let hdr = self.header;
        let fi = (source.re - hdr.bounds[0]) / h;
        let fj = (source.im - hdr.bounds[2]) / hdr.step().1;
        if !(fi >= 0.0 && fj >= 0.0 && fi <= (hdr.nx - 1) as f64 && fj <= (hdr.ny - 1) as f64) {
            return Err(Error::domain(format!("source {source} lies outside the grid")));
        }
        let n = hdr.len();
        self.distance = vec![Arrival::Unreachable; n];
        self.source = None;
        let mut tent = vec![f64::INFINITY; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();

        let (i0, j0) = (fi.floor() as usize, fj.floor() as usize);
        let mut seeded = false;
        for (i, j) in [(i0, j0), (i0 + 1, j0), (i0, j0 + 1), (i0 + 1, j0 + 1)] {
            if i >= hdr.nx as usize || j >= hdr.ny as usize {
                continue;
            }
            let k = hdr.index(i, j);
            let d = (hdr.node(i, j) - source).norm();
            if d > 1.5 * h {
                continue;
            }
            if let Some(rho) = self.density[k] {
                tent[k] = rho * d;
                heap.push(Front { t: tent[k], idx: k });
                seeded = true;
            }
        }
        if !seeded {
            return Err(Error::domain(format!("source {source} lies on an excluded node")));
        }
        self.source = Some(source);

        let mut last = 0.0f64;
        while let Some(Front { t, idx }) = heap.pop() {
            if done[idx] || t > tent[idx] {
                continue;
            }
            if t < last - 1e-12 * last.max(1.0) {
                return Err(Error::Internal(format!("non-monotone front: {t} after {last}")));
            }
            last = last.max(t);
            done[idx] = true;
            self.distance[idx] = Arrival::Reached(t);
            let (i, j) = (idx % hdr.nx as usize, idx / hdr.nx as usize);
            for di in -1..=1i64 {
                for dj in -1..=1i64 {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let Some(nb) = self.neighbour(i, j, di, dj) else { continue };
                    if done[nb] {
                        continue;
                    }
                    let cand = self.relax(nb, &|m| done[m], &tent, h);
                    if cand < tent[nb] {
                        tent[nb] = cand;
                        heap.push(Front { t: cand, idx: nb });
                    }
                }
            }
        }
        Ok(())
    }

    /// Best update of node `k` over the eight stencil triangles.
    fn relax(&self, k: usize, done: &dyn Fn(usize) -> bool, tent: &[f64], h: f64) -> f64 {
        let nx = self.header.nx as usize;
        let (i, j) = (k % nx, k / nx);
        let rho_k = self.density[k].expect("relaxed node is included");
        let accepted = |di: i64, dj: i64| -> Option<(f64, f64)> {
            let nb = self.neighbour(i, j, di, dj)?;
            done(nb).then(|| (tent[nb], self.density[nb].expect("included")))
        };
        let mut best = f64::INFINITY;
        for q in 0..4 {
            let (ax, ay) = AXES[q];
            let a = accepted(ax, ay);
            if let Some((ta, ra)) = a {
                best = best.min(ta + 0.5 * (rho_k + ra) * h);
            }
            for (bx, by) in [AXES[(q + 1) % 4], AXES[(q + 3) % 4]] {
                let (dx, dy) = (ax + bx, ay + by);
                let Some((tb, rb)) = accepted(dx, dy) else { continue };
                best = best.min(tb + 0.5 * (rho_k + rb) * h * std::f64::consts::SQRT_2);
                if let Some((ta, ra)) = a {
                    best = best.min(triangle_update(ta, tb, rho_k, ra, rb, h));
                }
            }
        }
        best
    }

    /// Arrival at `z`: exact at nodes, otherwise bilinear over the enclosing
    /// cell when all four corners are reached.
    pub fn distance_at(&self, z: Complex64) -> Result<Arrival> {
        if self.source.is_none() {
            return Err(Error::domain("grid has not been solved"));
        }
        let hdr = self.header;
        let (hx, hy) = hdr.step();
        let fi = (z.re - hdr.bounds[0]) / hx;
        let fj = (z.im - hdr.bounds[2]) / hy;
        if !(fi >= 0.0 && fj >= 0.0 && fi <= (hdr.nx - 1) as f64 && fj <= (hdr.ny - 1) as f64) {
            return Err(Error::domain(format!("query {z} lies outside the grid")));
        }
        let (ri, rj) = (fi.round(), fj.round());
        if (fi - ri).abs() < 1e-9 && (fj - rj).abs() < 1e-9 {
            return Ok(self.distance[hdr.index(ri as usize, rj as usize)]);
        }
        let i0 = (fi.floor() as usize).min(hdr.nx as usize - 2);
        let j0 = (fj.floor() as usize).min(hdr.ny as usize - 2);
        let (s, t) = (fi - i0 as f64, fj - j0 as f64);
        let mut acc = 0.0;
        for (di, dj, w) in [
            (0, 0, (1.0 - s) * (1.0 - t)),
            (1, 0, s * (1.0 - t)),
            (0, 1, (1.0 - s) * t),
            (1, 1, s * t),
        ] {
            match self.distance[hdr.index(i0 + di, j0 + dj)] {
                Arrival::Reached(v) => acc += w * v,
                Arrival::Unreachable => return Ok(Arrival::Unreachable),
            }
        }
        Ok(Arrival::Reached(acc))
    }

    /// Largest discrete eikonal defect `|T(k) − min over stencil|` relative to
    /// `ρh`, over solved interior nodes other than the seeds.
    pub fn eikonal_residual(&self) -> f64 {
        let h = self.step();
        let n = self.header.len();
        let tent: Vec<f64> = self
            .distance
            .iter()
            .map(|a| a.value().unwrap_or(f64::INFINITY))
            .collect();
        let mut worst: f64 = 0.0;
        for k in 0..n {
            let (Some(rho), Arrival::Reached(t)) = (self.density[k], self.distance[k]) else { continue };
            if t <= 2.0 * rho * h {
                continue;
            }
            let upd = self.relax(k, &|m| tent[m] < t, &tent, h);
            worst = worst.max((t - upd).abs() / (rho * h));
        }
        worst
    }

    /// Exports density and distance planes in the cache layout; excluded
    /// nodes hold NaN and unreachable nodes hold +∞.
    pub fn export(&self) -> Result<DensityGrid> {
        let dens = self.density.iter().map(|d| d.unwrap_or(f64::NAN)).collect();
        let dist = self
            .distance
            .iter()
            .zip(&self.density)
            .map(|(a, d)| match (a, d) {
                (_, None) => f64::NAN,
                (Arrival::Reached(v), _) => *v,
                (Arrival::Unreachable, _) => f64::INFINITY,
            })
            .collect();
        DensityGrid::new(self.header, vec![dens, dist])
    }
}

/// Semi-Lagrangian update from the segment between an axis neighbour `a`
/// (distance `h`) and a diagonal neighbour `b` (distance `h√2`):
/// `min_s (1−s)Ta + s Tb + ρ̄ h √(1+s²)` with `ρ̄` the mean of the node
/// density and the density interpolated at the foot point.
fn triangle_update(ta: f64, tb: f64, rho_k: f64, ra: f64, rb: f64, h: f64) -> f64 {
    let d = tb - ta;
    let mut s = 0.0;
    let mut rho = 0.5 * (rho_k + ra);
    for _ in 0..3 {
        let u = -d / (rho * h);
        s = if u <= 0.0 {
            0.0
        } else if u >= std::f64::consts::FRAC_1_SQRT_2 {
            1.0
        } else {
            u / (1.0 - u * u).sqrt()
        };
        rho = 0.5 * (rho_k + (1.0 - s) * ra + s * rb);
    }
    ta + s * d + rho * h * (1.0 + s * s).sqrt()
}

/// Grid-refinement record for a single source/query pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementReport {
    pub steps: Vec<f64>,
    pub values: Vec<f64>,
    /// `|value_k − value_{k+1}|`
    pub changes: Vec<f64>,
    /// `max changes_k / steps_k`, the fitted first-order constant.
    pub fitted_constant: f64,
}

/// Solves on successively refined grids (node counts `n`) and reports how the
/// distance at `query` changes.
pub fn refinement_study(
    model: &DensityModel,
    bounds: [f64; 4],
    resolutions: &[usize],
    source: Complex64,
    query: Complex64,
) -> Result<RefinementReport> {
    let mut steps = vec![];
    let mut values = vec![];
    for &n in resolutions {
        let mut g = GeodesicGrid::new(model, bounds, n, n)?;
        g.solve(source)?;
        let v = g
            .distance_at(query)?
            .value()
            .ok_or_else(|| Error::domain(format!("query {query} is unreachable")))?;
        steps.push(g.step());
        values.push(v);
    }
    let changes: Vec<f64> = values.windows(2).map(|w| (w[0] - w[1]).abs()).collect();
    let fitted_constant = changes
        .iter()
        .zip(&steps)
        .map(|(c, h)| c / h)
        .fold(0.0, f64::max);
    Ok(RefinementReport {
        steps,
        values,
        changes,
        fitted_constant,
    })
}

/// Symmetry and triangle inequality of grid distances among `anchors`.
///
/// Every anchor is a source on an `n × n` grid and on its `(2n−1) × (2n−1)`
/// refinement; the grid tolerance is the largest change of an anchor-to-anchor
/// distance under that refinement. On the fine grid each triple `(a, b, c)`
/// contributes `min(d(a,b) + d(b,c) − d(a,c), −|d(a,b) − d(b,a)|)` over its
/// rotations, certified against `2 ×` the grid tolerance.
pub fn check_grid_metric(
    model: &DensityModel,
    bounds: [f64; 4],
    n: usize,
    anchors: &[Complex64],
    triples: &[(usize, usize, usize)],
    seed: u64,
) -> Result<Certificate> {
    if let Some(t) = triples.iter().find(|t| t.0.max(t.1).max(t.2) >= anchors.len()) {
        return Err(Error::domain(format!("triple {t:?} names a missing anchor")));
    }
    let table = |nodes: usize| -> Result<Vec<Vec<f64>>> {
        let mut g = GeodesicGrid::new(model, bounds, nodes, nodes)?;
        let mut rows = Vec::with_capacity(anchors.len());
        for &a in anchors {
            g.solve(a)?;
            let row = anchors
                .iter()
                .map(|&b| {
                    g.distance_at(b)?
                        .value()
                        .ok_or_else(|| Error::domain(format!("anchor {b} is unreachable from {a}")))
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        Ok(rows)
    };
    let coarse = table(n)?;
    let fine = table(2 * n - 1)?;
    let mut grid_tol: f64 = 0.0;
    for (rc, rf) in coarse.iter().zip(&fine) {
        for (x, y) in rc.iter().zip(rf) {
            grid_tol = grid_tol.max((x - y).abs());
        }
    }
    let d = |i: usize, j: usize| fine[i][j];
    let mut rec = SlackRecord::new();
    for (k, &(a, b, c)) in triples.iter().enumerate() {
        let mut slack = f64::INFINITY;
        for (x, y, z) in [(a, b, c), (b, c, a), (c, a, b)] {
            slack = slack.min(d(x, y) + d(y, z) - d(x, z)).min(-(d(x, y) - d(y, x)).abs());
        }
        rec.push(k, slack, &[a as f64, b as f64, c as f64]);
    }
    let mut cert = rec.finish("grid-metric", seed, 2.0 * grid_tol)?;
    cert.constants.insert("grid_tolerance".into(), grid_tol);
    Ok(cert)
}

/// Planar hyperbolic domain used as source or target of a contraction check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricDomain {
    Disk,
    PuncturedDisk,
    TwicePuncturedPlane,
}

impl MetricDomain {
    fn model(self) -> DensityModel {
        match self {
            MetricDomain::Disk => DensityModel::unit_disk(),
            MetricDomain::PuncturedDisk => DensityModel::punctured_disk(),
            MetricDomain::TwicePuncturedPlane => DensityModel::twice_punctured(),
        }
    }

    pub fn tag(self) -> DomainTag {
        self.model().domain
    }

    pub fn contains(self, z: Complex64) -> bool {
        self.model().contains(z)
    }

    /// Closed-form distance where one exists.
    pub fn distance(self, z1: Complex64, z2: Complex64) -> Option<Result<f64>> {
        match self {
            MetricDomain::Disk => Some(poincare_disk_distance(z1, z2)),
            MetricDomain::PuncturedDisk => Some(punctured_disk_distance(z1, z2)),
            MetricDomain::TwicePuncturedPlane => None,
        }
    }

    /// Length of `γ(t) = z1 + t(z2 − z1)` pushed through `f` (identity when
    /// `f` is `None`): `∫ ρ(f(γ)) |f′(γ)| |z2 − z1| dt`.
    pub fn path_length(self, f: Option<&AnalyticFunction>, z1: Complex64, z2: Complex64) -> Result<f64> {
        let model = self.model();
        let dz = z2 - z1;
        let mut failure = None;
        let g = |t: f64| -> f64 {
            let z = z1 + dz * t;
            let r = (|| -> Result<f64> {
                let (w, jac) = match f {
                    Some(f) => (f.eval(z)?, f.derivative(z)?.norm()),
                    None => (z, 1.0),
                };
                Ok(model.rho(w)? * jac * dz.norm())
            })();
            r.unwrap_or_else(|e| {
                failure.get_or_insert(e);
                0.0
            })
        };
        let res = integrate(g, 0.0, 1.0, &QuadOptions::relative(1e-10));
        if let Some(e) = failure {
            return Err(e);
        }
        if !res.converged {
            return Err(Error::Accuracy {
                achieved: res.error / res.value.abs(),
                requested: 1e-10,
            });
        }
        Ok(res.value)
    }
}

/// Certifies `κ_X(f(z), f(z′)) ≤ κ_B(z, z′)` on every pair.
///
/// When both domains have closed-form distances the slack is
/// `κ_B − κ_X(f(z), f(z′))`. Otherwise the segment `[z, z′]` is used as a test
/// path: `L_X(f∘γ) ≤ L_B(γ)` follows from the infinitesimal contraction, and
/// `L_B(γ) = κ_B` whenever the segment is a geodesic of the source.
pub fn verify_schwarz_contraction(
    f: &AnalyticFunction,
    source: MetricDomain,
    target: MetricDomain,
    pairs: &[(Complex64, Complex64)],
    seed: u64,
    tolerance: f64,
) -> Result<Certificate> {
    let mut rec = SlackRecord::new();
    for (k, &(z1, z2)) in pairs.iter().enumerate() {
        for z in [z1, z2] {
            if !source.contains(z) {
                return Err(Error::domain(format!("pair point {z} is outside the source domain")));
            }
            let w = f.eval(z).map_err(|e| e.at_sample(z))?;
            if !target.contains(w) {
                return Err(Error::Audit {
                    witness: z,
                    reason: format!("f({z}) = {w} leaves the target domain"),
                });
            }
        }
        let slack = match (source.distance(z1, z2), target.distance(f.eval(z1)?, f.eval(z2)?)) {
            (Some(kb), Some(kx)) => kb? - kx?,
            _ => source.path_length(None, z1, z2)? - target.path_length(Some(f), z1, z2)?,
        };
        rec.push(k, slack, &[z1.re, z1.im, z2.re, z2.im]);
    }
    rec.finish("schwarz-contraction", seed, tolerance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{Codomain, Expr};
    use crate::geometry::MobiusMap;
    use crate::rho01::Method;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn id_step(zeta: Complex64) -> ChainStep {
        ChainStep {
            map: AnalyticFunction::new(Expr::z(), Codomain::UnitDisk),
            zeta,
        }
    }

    fn translate_step(from: Complex64, zeta: Complex64) -> ChainStep {
        // disk automorphism sending 0 to `from`
        let m = MobiusMap::base_change(from).unwrap();
        ChainStep {
            map: AnalyticFunction::new(Expr::mobius(m), Codomain::UnitDisk),
            zeta,
        }
    }

    #[test]
    fn chain_examples() {
        let one = DiskChain {
            start: c(0.0, 0.0),
            end: c(0.5, 0.0),
            steps: vec![id_step(c(0.5, 0.0))],
        };
        assert_relative_eq!(chain_length(&one).unwrap(), 3f64.ln(), max_relative = 1e-15);

        let p = c(0.5, 0.0);
        let q = MobiusMap::base_change(p).unwrap().apply(c(0.5, 0.0)).unwrap();
        let two = DiskChain {
            start: c(0.0, 0.0),
            end: q,
            steps: vec![id_step(c(0.5, 0.0)), translate_step(p, c(0.5, 0.0))],
        };
        assert_relative_eq!(chain_length(&two).unwrap(), 2.0 * 3f64.ln(), max_relative = 1e-15);

        let empty = DiskChain {
            start: c(0.2, 0.1),
            end: c(0.2, 0.1),
            steps: vec![],
        };
        assert_eq!(chain_length(&empty).unwrap(), 0.0);
    }

    #[test]
    fn broken_chain_names_the_joint() {
        let broken = DiskChain {
            start: c(0.0, 0.0),
            end: c(0.9, 0.0),
            steps: vec![id_step(c(0.5, 0.0)), translate_step(c(0.6, 0.0), c(0.1, 0.0))],
        };
        match chain_length(&broken) {
            Err(Error::MalformedChain { joint, .. }) => assert_eq!(joint, 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn fast_marching_disk_coarse() {
        let mut g = GeodesicGrid::new(&DensityModel::unit_disk(), [-1.0, 1.0, -1.0, 1.0], 257, 257).unwrap();
        g.solve(c(0.0, 0.0)).unwrap();
        assert_eq!(g.distance_at(c(0.0, 0.0)).unwrap(), Arrival::Reached(0.0));
        let d = g.distance_at(c(0.5, 0.0)).unwrap().value().unwrap();
        assert!((d / 3f64.ln() - 1.0).abs() < 0.03, "{d}");
        assert!(g.eikonal_residual() < 1e-9);
    }

    #[test]
    fn grid_metric_on_the_disk() {
        let anchors = [c(0.0, 0.0), c(0.4, 0.1), c(-0.3, 0.5), c(0.1, -0.6)];
        let triples = [(0, 1, 2), (1, 2, 3), (0, 2, 3), (0, 1, 3)];
        let cert = check_grid_metric(&DensityModel::unit_disk(), [-1.0, 1.0, -1.0, 1.0], 65, &anchors, &triples, 0).unwrap();
        assert!(cert.pass, "{}", cert.to_json());
        assert!(cert.constants["grid_tolerance"] > 0.0);
        assert!(check_grid_metric(&DensityModel::unit_disk(), [-1.0, 1.0, -1.0, 1.0], 17, &anchors, &[(0, 1, 9)], 0).is_err());
    }

    #[test]
    fn source_checks() {
        let model = DensityModel::new(DomainTag::TwicePuncturedPlane, Method::ModularCovering, 1e-12).unwrap();
        let mut g = GeodesicGrid::new(&model, [-2.0, 2.0, -2.0, 2.0], 41, 41).unwrap();
        assert!(g.solve(c(0.0, 0.0)).is_err());
        assert!(g.solve(c(5.0, 0.0)).is_err());
        assert!(g.distance_at(c(0.5, 0.5)).is_err());
        g.solve(c(-1.0, 0.0)).unwrap();
        assert!(g.distance_at(c(0.0, 0.0)).unwrap() == Arrival::Unreachable);
        let ex = g.export().unwrap();
        assert_eq!(ex.planes.len(), 2);
    }

    #[test]
    fn contraction_examples() {
        let auto = AnalyticFunction::new(
            Expr::mobius(MobiusMap::disk_automorphism(c(0.3, -0.2), 0.7).unwrap()),
            Codomain::UnitDisk,
        );
        let pairs = [(c(0.1, 0.2), c(-0.5, 0.3)), (c(0.0, 0.0), c(0.6, -0.6))];
        let cert = verify_schwarz_contraction(&auto, MetricDomain::Disk, MetricDomain::Disk, &pairs, 0, 1e-9).unwrap();
        assert!(cert.pass);
        assert!(cert.worst_slack.abs() < 1e-9);

        let sq = AnalyticFunction::new(Expr::z().powi(2), Codomain::UnitDisk);
        let radial: Vec<_> = [0.1, 0.5, 0.9].iter().map(|&r| (c(0.0, 0.0), c(r, 0.0))).collect();
        assert!(verify_schwarz_contraction(&sq, MetricDomain::Disk, MetricDomain::Disk, &radial, 0, 1e-12)
            .unwrap()
            .pass);

        let incl = AnalyticFunction::new(Expr::z(), Codomain::OmitsZeroOne);
        let segs = [(c(-0.1, 0.0), c(-0.8, 0.0)), (c(0.0, 0.05), c(0.0, 0.7)), (c(0.3, 0.3), c(0.5, 0.5))];
        let cert = verify_schwarz_contraction(
            &incl,
            MetricDomain::PuncturedDisk,
            MetricDomain::TwicePuncturedPlane,
            &segs,
            0,
            1e-9,
        )
        .unwrap();
        assert!(cert.pass, "{cert:?}");
        assert!(cert.worst_slack > 0.0);
    }

    #[test]
    fn contraction_rejects_range_violation() {
        let f = AnalyticFunction::new(Expr::affine(c(1.0, 0.0), c(0.5, 0.0)), Codomain::UnitDisk);
        let r = verify_schwarz_contraction(&f, MetricDomain::Disk, MetricDomain::Disk, &[(c(0.0, 0.0), c(0.6, 0.0))], 0, 1e-9);
        assert!(matches!(r, Err(Error::Audit { .. })));
    }
}
