//! Bit-exact binary grids of density (and optionally distance or complex field)
//! values.
//!
//! Layout, all little-endian:
//!
//! | bytes | content |
//! |-------|---------|
//! | 5     | magic `RHO01` |
//! | 2     | version (u16) |
//! | 32    | bounds `x0, x1, y0, y1` (4 × f64) |
//! | 8     | dims `nx, ny` (2 × u32) |
//! | 1     | method or field-kind tag (u8) |
//! | 8     | tolerance (f64) |
//!
//! followed by one or more row-major planes of `nx·ny` f64 values; the plane
//! count is the payload length divided by the plane size. Excluded nodes hold
//! NaN. A `<file>.sha256` sidecar with the hex digest of the whole file guards
//! against tampering.

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::rho01::{DensityModel, Method};

pub const MAGIC: &[u8; 5] = b"RHO01";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 5 + 2 + 32 + 8 + 1 + 8;
/// Field-kind tag for complex grid fields (real and imaginary planes).
pub const FIELD_TAG: u8 = 0x10;
/// Environment variable overriding the default cache directory.
pub const CACHE_DIR_ENV: &str = "HYPMETRIC_CACHE_DIR";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridHeader {
    /// `x0, x1, y0, y1`
    pub bounds: [f64; 4],
    pub nx: u32,
    pub ny: u32,
    pub method: u8,
    pub tolerance: f64,
}

impl GridHeader {
    pub fn new(bounds: [f64; 4], nx: usize, ny: usize, method: u8, tolerance: f64) -> Result<Self> {
        if nx < 2 || ny < 2 || nx > u32::MAX as usize || ny > u32::MAX as usize {
            return Err(Error::domain(format!("grid dims {nx}×{ny} out of range")));
        }
        if !(bounds[0] < bounds[1] && bounds[2] < bounds[3]) || bounds.iter().any(|b| !b.is_finite()) {
            return Err(Error::domain(format!("invalid bounds {bounds:?}")));
        }
        Ok(Self {
            bounds,
            nx: nx as u32,
            ny: ny as u32,
            method,
            tolerance,
        })
    }

    pub fn len(&self) -> usize {
        self.nx as usize * self.ny as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn step(&self) -> (f64, f64) {
        (
            (self.bounds[1] - self.bounds[0]) / (self.nx - 1) as f64,
            (self.bounds[3] - self.bounds[2]) / (self.ny - 1) as f64,
        )
    }

    pub fn node(&self, i: usize, j: usize) -> Complex64 {
        let (hx, hy) = self.step();
        Complex64::new(self.bounds[0] + i as f64 * hx, self.bounds[2] + j as f64 * hy)
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx as usize + i
    }

    fn encode(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        for b in self.bounds {
            out.extend_from_slice(&b.to_le_bytes());
        }
        out.extend_from_slice(&self.nx.to_le_bytes());
        out.extend_from_slice(&self.ny.to_le_bytes());
        out.push(self.method);
        out.extend_from_slice(&self.tolerance.to_le_bytes());
    }

    fn decode(bytes: &[u8], file: &str) -> Result<Self> {
        let corrupt = |reason: &str| Error::Corrupt {
            file: file.to_string(),
            reason: reason.to_string(),
        };
        if bytes.len() < HEADER_LEN {
            return Err(corrupt("truncated header"));
        }
        if &bytes[0..5] != MAGIC {
            return Err(corrupt("bad magic"));
        }
        let version = u16::from_le_bytes([bytes[5], bytes[6]]);
        if version != VERSION {
            return Err(corrupt(&format!("unsupported version {version}")));
        }
        let f = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().expect("8 bytes"));
        let u = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().expect("4 bytes"));
        let bounds = [f(7), f(15), f(23), f(31)];
        let (nx, ny) = (u(39), u(43));
        let method = bytes[47];
        let tolerance = f(48);
        GridHeader::new(bounds, nx as usize, ny as usize, method, tolerance)
            .map_err(|e| corrupt(&e.to_string()))
    }
}

/// A grid header with one or more value planes.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    pub header: GridHeader,
    pub planes: Vec<Vec<f64>>,
}

impl DensityGrid {
    pub fn new(header: GridHeader, planes: Vec<Vec<f64>>) -> Result<Self> {
        if planes.is_empty() || planes.iter().any(|p| p.len() != header.len()) {
            return Err(Error::domain("every plane must hold nx·ny values"));
        }
        Ok(Self { header, planes })
    }

    /// Evaluates `model` at every node; nodes outside the domain hold NaN.
    pub fn build(model: &DensityModel, bounds: [f64; 4], nx: usize, ny: usize) -> Result<Self> {
        let header = GridHeader::new(bounds, nx, ny, model.method.tag(), model.tolerance)?;
        let mut plane = vec![f64::NAN; header.len()];
        for j in 0..ny {
            for i in 0..nx {
                let z = header.node(i, j);
                if model.contains(z) {
                    plane[header.index(i, j)] = model.rho(z).map_err(|e| e.at_sample(z))?;
                }
            }
        }
        Self::new(header, vec![plane])
    }

    pub fn density(&self) -> &[f64] {
        &self.planes[0]
    }

    /// Stored density if `z` is exactly a grid node.
    pub fn lookup(&self, z: Complex64) -> Option<f64> {
        let h = &self.header;
        let (hx, hy) = h.step();
        let fi = ((z.re - h.bounds[0]) / hx).round();
        let fj = ((z.im - h.bounds[2]) / hy).round();
        if fi < 0.0 || fj < 0.0 || fi >= h.nx as f64 || fj >= h.ny as f64 {
            return None;
        }
        let (i, j) = (fi as usize, fj as usize);
        if h.node(i, j) != z {
            return None;
        }
        let v = self.planes[0][h.index(i, j)];
        v.is_finite().then_some(v)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + 8 * self.header.len() * self.planes.len());
        self.header.encode(&mut out);
        for p in &self.planes {
            for v in p {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8], file: &str) -> Result<Self> {
        let header = GridHeader::decode(bytes, file)?;
        let payload = &bytes[HEADER_LEN..];
        let plane_bytes = 8 * header.len();
        if payload.is_empty() || !payload.len().is_multiple_of(plane_bytes) {
            return Err(Error::Corrupt {
                file: file.to_string(),
                reason: format!("payload of {} bytes is not a whole number of planes", payload.len()),
            });
        }
        let planes = payload
            .chunks_exact(plane_bytes)
            .map(|chunk| {
                chunk
                    .chunks_exact(8)
                    .map(|b| f64::from_le_bytes(b.try_into().expect("8 bytes")))
                    .collect()
            })
            .collect();
        Ok(Self { header, planes })
    }

    /// Writes the grid and its digest sidecar.
    pub fn write(&self, path: &Path) -> Result<()> {
        let bytes = self.to_bytes();
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        fs::write(path, &bytes)?;
        fs::write(sidecar(path), hex::encode(Sha256::digest(&bytes)))?;
        Ok(())
    }

    /// Reads a grid, rejecting digest mismatches and malformed layouts.
    pub fn read(path: &Path) -> Result<Self> {
        let name = path.display().to_string();
        let bytes = fs::read(path)?;
        let expected = fs::read_to_string(sidecar(path)).map_err(|_| Error::Corrupt {
            file: name.clone(),
            reason: "missing digest sidecar".into(),
        })?;
        if hex::encode(Sha256::digest(&bytes)) != expected.trim() {
            return Err(Error::Corrupt {
                file: name,
                reason: "digest mismatch".into(),
            });
        }
        Self::from_bytes(&bytes, &name)
    }

    /// Re-evaluates a seeded random `fraction` of the included nodes and
    /// reports the worst relative deviation; a deviation above the grid's
    /// tolerance (floored at 1e−12) is a corruption error.
    pub fn verify(&self, model: &DensityModel, fraction: f64, seed: u64, file: &str) -> Result<f64> {
        let h = &self.header;
        let included: Vec<usize> = (0..h.len()).filter(|&k| self.planes[0][k].is_finite()).collect();
        if included.is_empty() {
            return Ok(0.0);
        }
        let n = ((included.len() as f64 * fraction).ceil() as usize).clamp(1, included.len());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tol = h.tolerance.max(1e-12);
        let mut worst: f64 = 0.0;
        for k in sample(&mut rng, included.len(), n) {
            let idx = included[k];
            let (i, j) = (idx % h.nx as usize, idx / h.nx as usize);
            let z = h.node(i, j);
            let live = model.rho(z)?;
            let stored = self.planes[0][idx];
            let dev = ((stored - live) / live).abs();
            if !(dev <= tol) {
                return Err(Error::Corrupt {
                    file: file.to_string(),
                    reason: format!("node ({i}, {j}) stores {stored}, live value {live}"),
                });
            }
            worst = worst.max(dev);
        }
        Ok(worst)
    }
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".sha256");
    PathBuf::from(s)
}

/// `$HYPMETRIC_CACHE_DIR`, or `.hypmetric-cache` in the working directory.
pub fn cache_dir() -> PathBuf {
    std::env::var_os(CACHE_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(".hypmetric-cache"))
}

/// File name derived from the header, so each (region, resolution, method,
/// tolerance) key has one file.
pub fn cache_file_name(header: &GridHeader) -> String {
    let mut bytes = Vec::new();
    header.encode(&mut bytes);
    let digest = hex::encode(Sha256::digest(&bytes));
    format!("rho01-{}-{}.bin", Method::from_tag(header.method).map(|m| m.name()).unwrap_or("field"), &digest[..16])
}

/// Grid files (`*.bin`) in `dir`, sorted.
pub fn list_grids(dir: &Path) -> Result<Vec<PathBuf>> {
    if !dir.exists() {
        return Ok(vec![]);
    }
    let mut out: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "bin"))
        .collect();
    out.sort();
    Ok(out)
}

/// Removes grid files and their sidecars; returns the number of grids removed.
pub fn clear(dir: &Path) -> Result<usize> {
    let grids = list_grids(dir)?;
    for g in &grids {
        fs::remove_file(g)?;
        let s = sidecar(g);
        if s.exists() {
            fs::remove_file(s)?;
        }
    }
    Ok(grids.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rho01::DomainTag;

    fn model() -> DensityModel {
        DensityModel::new(DomainTag::TwicePuncturedPlane, Method::ModularCovering, 1e-12).unwrap()
    }

    #[test]
    fn header_layout() {
        let g = DensityGrid::build(&model(), [-1.0, 1.0, -1.0, 1.0], 5, 5).unwrap();
        let bytes = g.to_bytes();
        assert_eq!(&bytes[..5], b"RHO01");
        assert_eq!(bytes.len(), HEADER_LEN + 25 * 8);
        assert_eq!(bytes[47], Method::ModularCovering.tag());
        // the node at the origin is a puncture
        assert!(g.density()[12].is_nan());
        assert!(g.lookup(Complex64::new(0.0, 0.0)).is_none());
    }

    #[test]
    fn round_trip_is_bit_exact_and_hits_reproduce() {
        let dir = tempfile::tempdir().unwrap();
        let g = DensityGrid::build(&model(), [-2.0, 2.0, -1.5, 1.5], 9, 7).unwrap();
        let path = dir.path().join(cache_file_name(&g.header));
        g.write(&path).unwrap();
        let back = DensityGrid::read(&path).unwrap();
        assert_eq!(back.to_bytes(), g.to_bytes());
        let z = g.header.node(3, 2);
        let m = model().with_cache(std::sync::Arc::new(back));
        assert_eq!(m.rho(z).unwrap().to_bits(), g.lookup(z).unwrap().to_bits());
        assert!(g.verify(&model(), 1.0, 1, "x").unwrap() <= 1e-12);
    }

    #[test]
    fn tampering_is_detected() {
        let dir = tempfile::tempdir().unwrap();
        let g = DensityGrid::build(&model(), [-2.0, 2.0, -1.5, 1.5], 4, 4).unwrap();
        let path = dir.path().join("g.bin");
        g.write(&path).unwrap();
        let mut bytes = fs::read(&path).unwrap();
        let last = bytes.len() - 3;
        bytes[last] ^= 0x40;
        fs::write(&path, &bytes).unwrap();
        assert!(matches!(DensityGrid::read(&path), Err(Error::Corrupt { .. })));
        // a consistent digest over altered values is caught by re-evaluation
        fs::write(sidecar(&path), hex::encode(Sha256::digest(&bytes))).unwrap();
        let g2 = DensityGrid::read(&path).unwrap();
        assert!(matches!(g2.verify(&model(), 1.0, 0, "g.bin"), Err(Error::Corrupt { .. })));
    }

    #[test]
    fn clear_counts_and_tolerates_empty() {
        let dir = tempfile::tempdir().unwrap();
        assert_eq!(clear(dir.path()).unwrap(), 0);
        let g = DensityGrid::build(&model(), [2.0, 3.0, 0.0, 1.0], 3, 3).unwrap();
        g.write(&dir.path().join("a.bin")).unwrap();
        assert_eq!(clear(dir.path()).unwrap(), 1);
        assert!(fs::read_dir(dir.path()).unwrap().next().is_none());
        assert_eq!(clear(&dir.path().join("missing")).unwrap(), 0);
    }
}
