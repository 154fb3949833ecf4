//! Time-dependent electron-density change of a wave packet of singlet single
//! excitations, relative to the closed-shell ground state.
//!
//! With `Psi(t) = sum_K D_K(t) |i_K -> a_K>` the change is
//! `sum_{K,L} D_K^* D_L (delta_{i_K i_L} phi_{a_K} phi_{a_L} - delta_{a_K a_L} phi_{i_K} phi_{i_L})`.
//! The one-particle density matrix is built from the determinant expansions
//! rather than from that closed form, so CSF phase conventions cannot leak
//! into the result. Positive values are electron excess, negative values
//! holes.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::model::{evaluate_orbital, GridValues, OrbitalSet, SlaterDeterminant, SpinOrbital, Vec3, VolumetricGrid, WavePacket};
use crate::units::angstrom_to_bohr;
use crate::{Error, Result};

/// Symmetric orthogonal box, bohr. Point `(i, j, k)` sits at
/// `origin + spacing * (i, j, k)` with `origin = -spacing * (counts - 1) / 2`,
/// so reflections through the coordinate planes map grid points onto grid
/// points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityGrid {
    pub spacing: f64,
    pub counts: [usize; 3],
}

impl DensityGrid {
    pub fn new(spacing: f64, counts: [usize; 3]) -> Result<Self> {
        if !(spacing > 0.0 && spacing.is_finite()) || counts.iter().any(|&n| n < 2) {
            return Err(Error::InvalidInput("density grid needs a positive spacing and >= 2 points per axis".into()));
        }
        Ok(Self { spacing, counts })
    }

    /// Smallest symmetric box holding every nucleus plus `padding` on each
    /// side. Nuclei in bohr; `padding` and `spacing` in Å.
    pub fn around_nuclei(nuclei: &[(u32, Vec3)], padding_angstrom: f64, spacing_angstrom: f64) -> Result<Self> {
        let h = angstrom_to_bohr(spacing_angstrom);
        let pad = angstrom_to_bohr(padding_angstrom);
        let mut counts = [0usize; 3];
        for (a, c) in counts.iter_mut().enumerate() {
            let extent = nuclei.iter().map(|(_, p)| p[a].abs()).fold(0.0, f64::max) + pad;
            *c = 2 * (extent / h).ceil() as usize + 1;
        }
        Self::new(h, counts)
    }

    pub fn origin(&self) -> Vec3 {
        Vec3::new(
            -self.spacing * (self.counts[0] - 1) as f64 / 2.0,
            -self.spacing * (self.counts[1] - 1) as f64 / 2.0,
            -self.spacing * (self.counts[2] - 1) as f64 / 2.0,
        )
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Point of flat index `idx` (third axis fastest).
    pub fn point(&self, idx: usize) -> Vec3 {
        let [_, n1, n2] = self.counts;
        let (i, j, k) = (idx / (n1 * n2), (idx / n2) % n1, idx % n2);
        let c = |n: usize, m: usize| self.spacing * (2.0 * m as f64 - (n - 1) as f64) / 2.0;
        Vec3::new(c(self.counts[0], i), c(n1, j), c(n2, k))
    }

    pub fn voxel_volume(&self) -> f64 {
        self.spacing.powi(3)
    }

    fn volumetric(&self, values: Vec<f64>) -> Result<VolumetricGrid> {
        VolumetricGrid::cubic(self.origin(), self.spacing, self.counts, GridValues::Real(values))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityFrame {
    pub grid: VolumetricGrid,
    pub time: f64,
    /// Integrated electron excess (>= 0).
    pub positive: f64,
    /// Integrated hole charge (<= 0).
    pub negative: f64,
}

impl DensityFrame {
    pub fn values(&self) -> &[f64] {
        self.grid.real_values().expect("density frames are real")
    }

    pub fn total(&self) -> f64 {
        self.positive + self.negative
    }
}

/// Spin-summed `<bra| a+_p a_q |ket>` for determinant expansions.
fn transition_rdm(bra: &BTreeMap<SlaterDeterminant, f64>, ket: &BTreeMap<SlaterDeterminant, f64>, n: usize) -> DMatrix<f64> {
    let mut g = DMatrix::zeros(n, n);
    for (det, ck) in ket {
        for q in det.spin_orbitals() {
            let Some((s1, reduced)) = det.annihilate(q) else { continue };
            for p in 0..n {
                let Some((s2, out)) = reduced.create(SpinOrbital::new(p, q.spin)) else { continue };
                if let Some(cb) = bra.get(&out) {
                    g[(p, q.orbital)] += cb * ck * s1 * s2;
                }
            }
        }
    }
    g
}

/// Density-matrix pieces of a supported wave packet.
struct DensityModel {
    /// `gamma^{IJ}` for every member pair.
    pairs: Vec<Vec<DMatrix<f64>>>,
    reference: DMatrix<f64>,
    /// Orbitals touched by any `gamma^{IJ} - reference`.
    active: Vec<usize>,
}

fn density_model(wp: &WavePacket, orbitals: &OrbitalSet) -> Result<DensityModel> {
    let n = orbitals.len();
    if wp.n_orbitals() != n {
        return Err(Error::BasisMismatch(wp.n_orbitals(), n));
    }
    let n_occ = orbitals.n_occupied();
    if wp.n_electrons() != 2 * n_occ {
        return Err(Error::Unsupported("density change needs members built on the closed-shell reference".into()));
    }
    for (i, m) in wp.members().iter().enumerate() {
        for (_, csf) in m.state.expansion() {
            if csf.holes().len() != 1 || csf.particles().len() != 1 || csf.twice_s() != 0 {
                return Err(Error::Unsupported(format!(
                    "member {i}: density change supports singlet single excitations only"
                )));
            }
        }
    }
    let dets: Vec<_> = wp.members().iter().map(|m| m.state.determinants()).collect();
    let pairs: Vec<Vec<DMatrix<f64>>> = dets.iter().map(|b| dets.iter().map(|k| transition_rdm(b, k, n)).collect()).collect();
    let mut reference = DMatrix::zeros(n, n);
    for o in 0..n_occ {
        reference[(o, o)] = 2.0;
    }
    let mut active = std::collections::BTreeSet::new();
    for (i, row) in pairs.iter().enumerate() {
        for (j, g) in row.iter().enumerate() {
            let d = if i == j { g - &reference } else { g.clone() };
            for p in 0..n {
                for q in 0..n {
                    if d[(p, q)].abs() > 1e-14 {
                        active.insert(p);
                        active.insert(q);
                    }
                }
            }
        }
    }
    Ok(DensityModel { pairs, reference, active: active.into_iter().collect() })
}

impl DensityModel {
    /// `gamma(t) - gamma_ground`, real part.
    fn delta(&self, wp: &WavePacket, t: f64) -> Result<DMatrix<f64>> {
        let c: Vec<Complex64> = (0..wp.len()).map(|i| wp.phase(i, t)).collect::<Result<_>>()?;
        let norm: f64 = c.iter().map(|x| x.norm_sqr()).sum();
        let mut d = -&self.reference * norm;
        for (i, row) in self.pairs.iter().enumerate() {
            for (j, g) in row.iter().enumerate() {
                d += g * (c[i].conj() * c[j]).re;
            }
        }
        Ok(d)
    }
}

/// Orbital values at every grid point, `[active orbital][point]`.
fn orbital_values(orbitals: &OrbitalSet, active: &[usize], grid: &DensityGrid) -> Result<Vec<Vec<f64>>> {
    active
        .iter()
        .map(|&o| {
            let mo = orbitals.get(o)?;
            (0..grid.len()).into_par_iter().map(|idx| evaluate_orbital(mo, &grid.point(idx))).collect()
        })
        .collect()
}

fn frame(grid: &DensityGrid, values: Vec<f64>, time: f64) -> Result<DensityFrame> {
    let dv = grid.voxel_volume();
    let positive = values.iter().filter(|v| **v > 0.0).sum::<f64>() * dv;
    let negative = values.iter().filter(|v| **v < 0.0).sum::<f64>() * dv;
    Ok(DensityFrame { grid: grid.volumetric(values)?, time, positive, negative })
}

/// Density change at each time in `times` (a.u.) on a shared grid.
pub fn density_timeseries(wp: &WavePacket, orbitals: &OrbitalSet, grid: &DensityGrid, times: &[f64]) -> Result<Vec<DensityFrame>> {
    let model = density_model(wp, orbitals)?;
    let phi = orbital_values(orbitals, &model.active, grid)?;
    times
        .iter()
        .map(|&t| {
            let d = model.delta(wp, t)?;
            let na = model.active.len();
            let mut terms = Vec::new();
            for a in 0..na {
                for b in a..na {
                    let (p, q) = (model.active[a], model.active[b]);
                    let w = if a == b { d[(p, q)] } else { d[(p, q)] + d[(q, p)] };
                    if w != 0.0 {
                        terms.push((a, b, w));
                    }
                }
            }
            let values: Vec<f64> = (0..grid.len())
                .into_par_iter()
                .map(|idx| terms.iter().map(|&(a, b, w)| w * phi[a][idx] * phi[b][idx]).sum())
                .collect();
            frame(grid, values, t)
        })
        .collect()
}

pub fn density_change(wp: &WavePacket, orbitals: &OrbitalSet, grid: &DensityGrid, t: f64) -> Result<DensityFrame> {
    Ok(density_timeseries(wp, orbitals, grid, &[t])?.remove(0))
}
