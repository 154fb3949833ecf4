use nalgebra::Matrix3;
use num_complex::Complex64;

use super::Vec3;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum GridValues {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

impl GridValues {
    pub fn len(&self) -> usize {
        match self {
            GridValues::Real(v) => v.len(),
            GridValues::Complex(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Values sampled on a parallelepiped lattice `origin + i a + j b + k c`.
///
/// Storage is z-fastest (`index = (i * n1 + j) * n2 + k`), the cube-file order.
/// Lengths are in bohr.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumetricGrid {
    origin: Vec3,
    /// Rows are the three step vectors.
    axes: Matrix3<f64>,
    counts: [usize; 3],
    values: GridValues,
}

impl VolumetricGrid {
    pub fn new(origin: Vec3, axes: Matrix3<f64>, counts: [usize; 3], values: GridValues) -> Result<Self> {
        if counts.iter().any(|&n| n < 2) {
            return Err(Error::InvalidInput(format!("grid counts {counts:?} must be >= 2 per axis")));
        }
        let det = axes.determinant();
        let scale = axes.row(0).norm() * axes.row(1).norm() * axes.row(2).norm();
        if !(det.abs() > 1e-12 * scale) {
            return Err(Error::InvalidInput("grid axes are linearly dependent".into()));
        }
        let n = counts.iter().product::<usize>();
        if values.len() != n {
            return Err(Error::InvalidInput(format!(
                "grid holds {} values, counts imply {n}",
                values.len()
            )));
        }
        Ok(Self { origin, axes, counts, values })
    }

    /// Orthogonal grid with the same spacing on every axis.
    pub fn cubic(origin: Vec3, spacing: f64, counts: [usize; 3], values: GridValues) -> Result<Self> {
        Self::new(origin, Matrix3::identity() * spacing, counts, values)
    }

    pub fn origin(&self) -> Vec3 {
        self.origin
    }

    pub fn axes(&self) -> &Matrix3<f64> {
        &self.axes
    }

    pub fn axis(&self, a: usize) -> Vec3 {
        self.axes.row(a).transpose()
    }

    pub fn counts(&self) -> [usize; 3] {
        self.counts
    }

    pub fn values(&self) -> &GridValues {
        &self.values
    }

    pub fn real_values(&self) -> Option<&[f64]> {
        match &self.values {
            GridValues::Real(v) => Some(v),
            GridValues::Complex(_) => None,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn voxel_volume(&self) -> f64 {
        self.axes.determinant().abs()
    }

    pub fn is_orthogonal(&self) -> bool {
        let (a, b, c) = (self.axis(0), self.axis(1), self.axis(2));
        let tol = 1e-10 * a.norm() * b.norm().max(c.norm());
        a.dot(&b).abs() < tol && a.dot(&c).abs() < tol && b.dot(&c).abs() < tol
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.counts[1] + j) * self.counts[2] + k
    }

    /// `(i, j, k)` of a flat index.
    #[inline]
    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let k = idx % self.counts[2];
        let ij = idx / self.counts[2];
        [ij / self.counts[1], ij % self.counts[1], k]
    }

    pub fn point(&self, i: usize, j: usize, k: usize) -> Vec3 {
        self.origin + self.axis(0) * i as f64 + self.axis(1) * j as f64 + self.axis(2) * k as f64
    }

    pub fn points(&self) -> impl Iterator<Item = Vec3> + '_ {
        (0..self.len()).map(move |idx| {
            let [i, j, k] = self.unravel(idx);
            self.point(i, j, k)
        })
    }

    /// Same lattice, new values.
    pub fn with_values(&self, values: GridValues) -> Result<Self> {
        Self::new(self.origin, self.axes, self.counts, values)
    }

    /// Trilinear interpolation of real values; zero outside the grid.
    pub fn interpolate(&self, r: &Vec3) -> f64 {
        let values = match &self.values {
            GridValues::Real(v) => v,
            GridValues::Complex(v) => {
                return self.interpolate_with(r, |idx| v[idx].re);
            }
        };
        self.interpolate_with(r, |idx| values[idx])
    }

    fn interpolate_with(&self, r: &Vec3, at: impl Fn(usize) -> f64) -> f64 {
        // Fractional lattice coordinates: r - origin = f^T A.
        let inv = match self.axes.transpose().try_inverse() {
            Some(m) => m,
            None => return 0.0,
        };
        let f = inv * (r - self.origin);
        let mut base = [0usize; 3];
        let mut frac = [0.0f64; 3];
        for a in 0..3 {
            let upper = (self.counts[a] - 1) as f64;
            if !(f[a] >= 0.0 && f[a] <= upper) {
                return 0.0;
            }
            let fl = f[a].floor().min(upper - 1.0);
            base[a] = fl as usize;
            frac[a] = f[a] - fl;
        }
        let mut acc = 0.0;
        for corner in 0..8 {
            let (di, dj, dk) = (corner >> 2 & 1, corner >> 1 & 1, corner & 1);
            let w = (if di == 1 { frac[0] } else { 1.0 - frac[0] })
                * (if dj == 1 { frac[1] } else { 1.0 - frac[1] })
                * (if dk == 1 { frac[2] } else { 1.0 - frac[2] });
            if w != 0.0 {
                acc += w * at(self.index(base[0] + di, base[1] + dj, base[2] + dk));
            }
        }
        acc
    }

    /// Riemann sum of the real values times the voxel volume.
    pub fn integrate(&self) -> f64 {
        match &self.values {
            GridValues::Real(v) => v.iter().sum::<f64>() * self.voxel_volume(),
            GridValues::Complex(v) => v.iter().map(|c| c.re).sum::<f64>() * self.voxel_volume(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear_grid() -> VolumetricGrid {
        let counts = [3, 4, 5];
        let origin = Vec3::new(-1.0, 0.0, 0.5);
        let spacing = 0.5;
        let mut values = Vec::new();
        for i in 0..3 {
            for j in 0..4 {
                for k in 0..5 {
                    let p = origin + Vec3::new(i as f64, j as f64, k as f64) * spacing;
                    values.push(1.0 + 2.0 * p.x - p.y + 0.5 * p.z);
                }
            }
        }
        VolumetricGrid::cubic(origin, spacing, counts, GridValues::Real(values)).unwrap()
    }

    #[test]
    fn trilinear_is_exact_for_linear_fields() {
        let g = linear_grid();
        let r = Vec3::new(-0.3, 1.1, 1.7);
        let exact = 1.0 + 2.0 * r.x - r.y + 0.5 * r.z;
        assert!((g.interpolate(&r) - exact).abs() < 1e-12);
    }

    #[test]
    fn zero_outside() {
        let g = linear_grid();
        assert_eq!(g.interpolate(&Vec3::new(5.0, 0.0, 1.0)), 0.0);
        assert_eq!(g.interpolate(&Vec3::new(-1.0001, 0.0, 1.0)), 0.0);
    }

    #[test]
    fn upper_corner_is_inside() {
        let g = linear_grid();
        let r = g.point(2, 3, 4);
        let exact = 1.0 + 2.0 * r.x - r.y + 0.5 * r.z;
        assert!((g.interpolate(&r) - exact).abs() < 1e-12);
    }

    #[test]
    fn rejects_degenerate_axes_and_counts() {
        let axes = Matrix3::new(1.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 0.0, 1.0);
        let v = GridValues::Real(vec![0.0; 8]);
        assert!(VolumetricGrid::new(Vec3::zeros(), axes, [2, 2, 2], v.clone()).is_err());
        assert!(VolumetricGrid::cubic(Vec3::zeros(), 1.0, [1, 2, 4], v.clone()).is_err());
        assert!(VolumetricGrid::cubic(Vec3::zeros(), 1.0, [2, 2, 3], v).is_err());
    }

    #[test]
    fn unravel_inverts_index() {
        let g = linear_grid();
        for idx in 0..g.len() {
            let [i, j, k] = g.unravel(idx);
            assert_eq!(g.index(i, j, k), idx);
        }
    }
}
