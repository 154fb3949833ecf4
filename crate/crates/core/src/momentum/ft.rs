use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{MomentumAmplitude, MomentumGrid};
use crate::model::{GaussianPrimitive, MolecularOrbital, OrbitalRepr, Vec3, VolumetricGrid};
use crate::{Error, Result};

/// Physicists' Hermite polynomial `H_n(u)`.
fn hermite(n: u32, u: f64) -> f64 {
    let mut h0 = 1.0;
    if n == 0 {
        return h0;
    }
    let mut h1 = 2.0 * u;
    for k in 1..n {
        let h2 = 2.0 * u * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// Closed-form transform of a normalized Cartesian Gaussian.
///
/// Per axis, `\int x^l e^{-a x^2} e^{-i q x} dx = (-i)^l (2 sqrt a)^{-l}
/// H_l(q / 2 sqrt a) sqrt(pi/a) e^{-q^2/4a}`, and the center contributes
/// `e^{-i q.R}`.
pub fn gaussian_ft(prim: &GaussianPrimitive, q: &Vec3) -> Complex64 {
    let alpha = prim.exponent();
    let two_sqrt_a = 2.0 * alpha.sqrt();
    let powers = prim.powers();
    let mut poly = 1.0;
    for axis in 0..3 {
        let l = powers[axis];
        if l > 0 {
            poly *= hermite(l, q[axis] / two_sqrt_a) / two_sqrt_a.powi(l as i32);
        }
    }
    let total: u32 = powers.iter().sum();
    let radial = prim.norm() * (PI / alpha).powf(1.5) * (-q.norm_squared() / (4.0 * alpha)).exp()
        / (2.0 * PI).powf(1.5);
    // (-i)^L
    let i_power = match total % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    };
    i_power * (radial * poly) * Complex64::from_polar(1.0, -q.dot(&prim.center()))
}

/// Transform of one orbital at one momentum.
pub fn orbital_ft_at(mo: &MolecularOrbital, q: &Vec3) -> Result<Complex64> {
    match &mo.repr {
        OrbitalRepr::Lcao { primitives, coefficients } => {
            if primitives.is_empty() {
                return Err(Error::EmptyOrbital(mo.label.to_string()));
            }
            Ok(lcao_ft(primitives, coefficients, q))
        }
        OrbitalRepr::Grid(grid) => {
            check_grid(grid)?;
            Ok(grid_ft(grid, q))
        }
    }
}

fn lcao_ft(primitives: &[GaussianPrimitive], coefficients: &[f64], q: &Vec3) -> Complex64 {
    primitives
        .iter()
        .zip(coefficients)
        .fold(Complex64::new(0.0, 0.0), |acc, (p, c)| acc + gaussian_ft(p, q) * *c)
}

fn check_grid(grid: &VolumetricGrid) -> Result<()> {
    if !grid.is_orthogonal() {
        return Err(Error::Unsupported("Fourier transform of a grid with non-orthogonal axes".into()));
    }
    if grid.real_values().is_none() {
        return Err(Error::Unsupported("Fourier transform of a complex-valued orbital grid".into()));
    }
    Ok(())
}

/// Riemann sum `(2 pi)^{-3/2} dV sum_r e^{-i q.r} phi(r)`, factorized along
/// the three lattice directions.
fn grid_ft(grid: &VolumetricGrid, q: &Vec3) -> Complex64 {
    let values = grid.real_values().expect("checked by caller");
    let [n0, n1, n2] = grid.counts();
    let step_phase = |axis: usize, n: usize| -> Vec<Complex64> {
        let dq = q.dot(&grid.axis(axis));
        (0..n).map(|k| Complex64::from_polar(1.0, -dq * k as f64)).collect()
    };
    let p0 = step_phase(0, n0);
    let p1 = step_phase(1, n1);
    let p2 = step_phase(2, n2);
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..n0 {
        let mut plane = Complex64::new(0.0, 0.0);
        for j in 0..n1 {
            let row = &values[grid.index(i, j, 0)..grid.index(i, j, 0) + n2];
            let mut line = Complex64::new(0.0, 0.0);
            for (v, ph) in row.iter().zip(&p2) {
                line += ph * *v;
            }
            plane += line * p1[j];
        }
        total += plane * p0[i];
    }
    let origin = Complex64::from_polar(1.0, -q.dot(&grid.origin()));
    total * origin * grid.voxel_volume() / (2.0 * PI).powf(1.5)
}

/// Transform of an orbital at every valid sample of `grid`; invalid samples
/// hold zero. Samples are evaluated independently, so the result does not
/// depend on how the work is split across threads.
pub fn orbital_ft(mo: &MolecularOrbital, orbital_index: usize, grid: &MomentumGrid) -> Result<MomentumAmplitude> {
    let samples = grid.samples();
    let valid = grid.valid_mask();
    let values: Vec<Complex64> = match &mo.repr {
        OrbitalRepr::Lcao { primitives, coefficients } => {
            if primitives.is_empty() {
                return Err(Error::EmptyOrbital(mo.label.to_string()));
            }
            samples
                .par_iter()
                .zip(valid.par_iter())
                .map(|(q, &ok)| if ok { lcao_ft(primitives, coefficients, q) } else { Complex64::new(0.0, 0.0) })
                .collect()
        }
        OrbitalRepr::Grid(g) => {
            check_grid(g)?;
            samples
                .par_iter()
                .zip(valid.par_iter())
                .map(|(q, &ok)| if ok { grid_ft(g, q) } else { Complex64::new(0.0, 0.0) })
                .collect()
        }
    };
    Ok(MomentumAmplitude::new(orbital_index, grid.fingerprint(), values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{GridValues, OrbitalLabel};

    #[test]
    fn s_type_at_origin() {
        let g = GaussianPrimitive::s(Vec3::zeros(), 1.0).unwrap();
        let f = gaussian_ft(&g, &Vec3::zeros());
        assert!((f.re - (2.0 * PI).powf(-0.75)).abs() < 1e-15);
        assert!(f.im.abs() < 1e-16);
        assert!((f.re - 0.2519).abs() < 1e-4);
    }

    #[test]
    fn p_type_vanishes_at_origin() {
        for powers in [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1], [2, 1, 0]] {
            let g = GaussianPrimitive::new(Vec3::new(0.2, 0.1, -0.4), 0.9, powers).unwrap();
            assert_eq!(gaussian_ft(&g, &Vec3::zeros()).norm(), 0.0);
        }
    }

    #[test]
    fn translation_covariance() {
        let g = GaussianPrimitive::new(Vec3::new(0.3, -0.2, 0.5), 1.3, [1, 0, 2]).unwrap();
        let d = Vec3::new(1.7, -0.4, 2.2);
        let h = g.translated(d);
        for q in [Vec3::new(0.5, 1.0, -0.7), Vec3::new(-2.0, 0.1, 0.3)] {
            let expected = gaussian_ft(&g, &q) * Complex64::from_polar(1.0, -q.dot(&d));
            assert!((gaussian_ft(&h, &q) - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn grid_transform_matches_closed_form() {
        let prim = GaussianPrimitive::new(Vec3::new(0.1, 0.0, -0.2), 1.0, [0, 0, 1]).unwrap();
        let h = 0.2;
        let n = 61;
        let origin = Vec3::new(-6.0, -6.0, -6.0);
        let mut values = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    values.push(prim.value(&(origin + Vec3::new(i as f64, j as f64, k as f64) * h)));
                }
            }
        }
        let grid = VolumetricGrid::cubic(origin, h, [n, n, n], GridValues::Real(values)).unwrap();
        let mo = MolecularOrbital::grid(OrbitalLabel::HOMO, grid);
        for q in [Vec3::new(0.3, 0.2, 0.8), Vec3::new(-1.0, 0.5, 1.5)] {
            let a = orbital_ft_at(&mo, &q).unwrap();
            let b = gaussian_ft(&prim, &q);
            assert!((a - b).norm() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn skewed_grid_is_unsupported() {
        let axes = nalgebra::Matrix3::new(1.0, 0.0, 0.0, 0.5, 1.0, 0.0, 0.0, 0.0, 1.0);
        let grid = VolumetricGrid::new(Vec3::zeros(), axes, [2, 2, 2], GridValues::Real(vec![0.0; 8])).unwrap();
        let mo = MolecularOrbital::grid(OrbitalLabel::HOMO, grid);
        assert!(matches!(orbital_ft_at(&mo, &Vec3::zeros()), Err(Error::Unsupported(_))));
    }
}
