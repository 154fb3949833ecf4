use std::hash::{Hash, Hasher};

use crate::model::Vec3;
use crate::quadrature::SphericalRule;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GridMode {
    /// Uniform 3D box of momenta.
    CartesianSlab,
    /// Constant-energy cut `q_z = +sqrt(2 eps - q_x^2 - q_y^2)` over a
    /// `(q_x, q_y)` raster.
    Hemisphere,
    /// Constant-energy sphere sampled by a quadrature rule.
    FullSphere,
}

/// Momentum samples in atomic units.
#[derive(Debug, Clone)]
pub struct MomentumGrid {
    mode: GridMode,
    samples: Vec<Vec3>,
    valid: Vec<bool>,
    /// Raster shape: `[n_x, n_y]` for hemispheres, `[n, n, n]` for slabs.
    shape: Vec<usize>,
    /// Photoelectron energy (hartree) for constant-energy modes.
    energy: Option<f64>,
    /// Half-width of the raster.
    extent: f64,
    fingerprint: u64,
}

/// Symmetric raster coordinate: exactly antisymmetric under `i -> n-1-i`.
fn raster(i: usize, n: usize, half_width: f64) -> f64 {
    if n == 1 {
        return 0.0;
    }
    half_width * ((2 * i) as f64 - (n - 1) as f64) / (n - 1) as f64
}

impl MomentumGrid {
    fn finish(mode: GridMode, samples: Vec<Vec3>, valid: Vec<bool>, shape: Vec<usize>, energy: Option<f64>, extent: f64) -> Self {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        mode.hash(&mut h);
        shape.hash(&mut h);
        for (s, v) in samples.iter().zip(&valid) {
            s.x.to_bits().hash(&mut h);
            s.y.to_bits().hash(&mut h);
            s.z.to_bits().hash(&mut h);
            v.hash(&mut h);
        }
        Self { mode, samples, valid, shape, energy, extent, fingerprint: h.finish() }
    }

    /// Uniform cube `[-q_max, q_max]^3` with `n` points per axis.
    pub fn cartesian_slab(q_max: f64, n: usize) -> Result<Self> {
        if !(q_max > 0.0) || n < 2 {
            return Err(Error::InvalidInput("slab needs q_max > 0 and n >= 2".into()));
        }
        let mut samples = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    samples.push(Vec3::new(raster(i, n, q_max), raster(j, n, q_max), raster(k, n, q_max)));
                }
            }
        }
        let valid = vec![true; samples.len()];
        Ok(Self::finish(GridMode::CartesianSlab, samples, valid, vec![n, n, n], None, q_max))
    }

    /// All directions of a spherical rule at `|q| = sqrt(2 energy)`.
    pub fn sphere(energy: f64, rule: &SphericalRule) -> Result<Self> {
        if !(energy > 0.0) {
            return Err(Error::InvalidInput(format!("photoelectron energy {energy} must be positive")));
        }
        let q = (2.0 * energy).sqrt();
        let samples: Vec<Vec3> = rule.directions().iter().map(|d| d * q).collect();
        let valid = vec![true; samples.len()];
        Ok(Self::finish(GridMode::FullSphere, samples, valid, vec![samples_len(rule)], Some(energy), q))
    }

    pub fn mode(&self) -> GridMode {
        self.mode
    }

    pub fn samples(&self) -> &[Vec3] {
        &self.samples
    }

    pub fn valid_mask(&self) -> &[bool] {
        &self.valid
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|v| **v).count()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn energy(&self) -> Option<f64> {
        self.energy
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    /// Identity used as a cache key.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// Volume element of a cartesian slab.
    pub fn cell_volume(&self) -> Option<f64> {
        match self.mode {
            GridMode::CartesianSlab => {
                let n = self.shape[0];
                Some((2.0 * self.extent / (n - 1) as f64).powi(3))
            }
            _ => None,
        }
    }

    /// Raster coordinates `(q_x, q_y)` of a hemisphere grid.
    pub fn raster_axes(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        if self.mode != GridMode::Hemisphere {
            return None;
        }
        let (nx, ny) = (self.shape[0], self.shape[1]);
        Some((
            (0..nx).map(|i| raster(i, nx, self.extent)).collect(),
            (0..ny).map(|j| raster(j, ny, self.extent)).collect(),
        ))
    }
}

fn samples_len(rule: &SphericalRule) -> usize {
    rule.len()
}

/// Hemispherical constant-energy cut over an `n_x x n_y` raster covering
/// `[-q_max, q_max]^2`. Samples outside the kinematic disc
/// `q_x^2 + q_y^2 <= 2 energy` are marked invalid. Sample `(i, j)` has index
/// `i * n_y + j`. `energy` and `q_max` in atomic units; `q_max = None` uses
/// the disc radius.
pub fn build_hemisphere(energy: f64, nx: usize, ny: usize, q_max: Option<f64>) -> Result<MomentumGrid> {
    if !(energy > 0.0 && energy.is_finite()) {
        return Err(Error::InvalidInput(format!("photoelectron energy {energy} must be positive")));
    }
    if nx < 2 || ny < 2 {
        return Err(Error::InvalidInput("hemisphere raster needs at least 2x2 samples".into()));
    }
    let q2 = 2.0 * energy;
    let radius = q2.sqrt();
    let q_max = q_max.unwrap_or(radius);
    if !(q_max > 0.0) {
        return Err(Error::InvalidInput("q_max must be positive".into()));
    }
    let mut samples = Vec::with_capacity(nx * ny);
    let mut valid = Vec::with_capacity(nx * ny);
    for i in 0..nx {
        let qx = raster(i, nx, q_max);
        for j in 0..ny {
            let qy = raster(j, ny, q_max);
            let rho2 = qx * qx + qy * qy;
            if rho2 <= q2 {
                samples.push(Vec3::new(qx, qy, (q2 - rho2).sqrt()));
                valid.push(true);
            } else {
                samples.push(Vec3::new(qx, qy, 0.0));
                valid.push(false);
            }
        }
    }
    Ok(MomentumGrid::finish(GridMode::Hemisphere, samples, valid, vec![nx, ny], Some(energy), q_max))
}
