//! Nested adaptive Gauss-Kronrod (7/15) cubature for the momentum-space
//! transform `(2 pi)^{-3/2} \int g(r) exp(-i q.r) d^3r` of one primitive.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use attopmm::model::{GaussianPrimitive, Vec3};
use attopmm::momentum::gaussian_ft;
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const XK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.000000000000000000000000000000000,
];
const WK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// 15-point Kronrod value and the QUADPACK error estimate
/// `resasc * min(1, (200 |K - G| / resasc)^1.5)`.
fn kronrod(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut values = [Complex64::new(0.0, 0.0); 15];
    values[7] = f(c);
    for j in 0..7 {
        values[j] = f(c - h * XK[j]);
        values[14 - j] = f(c + h * XK[j]);
    }
    let weight = |i: usize| WK[if i < 8 { i } else { 14 - i }];
    let k: Complex64 = (0..15).map(|i| values[i] * weight(i)).sum();
    let mut g = values[7] * WG[3];
    for j in (1..7).step_by(2) {
        g += (values[j] + values[14 - j]) * WG[j / 2];
    }
    let mean = k * 0.5;
    let resasc = h * (0..15).map(|i| weight(i) * (values[i] - mean).norm()).sum::<f64>();
    let raw = ((k - g) * h).norm();
    let err = if resasc > 0.0 { resasc * (200.0 * raw / resasc).powf(1.5).min(1.0) } else { raw };
    (k * h, err)
}

/// Globally adaptive: starts from `initial` equal pieces and bisects the
/// piece with the largest error estimate until the summed estimate is
/// below `tol`.
pub fn adaptive(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64, tol: f64, initial: usize) -> Complex64 {
    let h = (b - a) / initial as f64;
    let mut pieces: Vec<_> = (0..initial)
        .map(|i| {
            let (lo, hi) = (a + h * i as f64, a + h * (i + 1) as f64);
            let (k, err) = kronrod(f, lo, hi);
            (lo, hi, k, err)
        })
        .collect();
    for _ in 0..2000 {
        let total: f64 = pieces.iter().map(|p| p.3).sum();
        if total <= tol {
            break;
        }
        let worst = (0..pieces.len()).max_by(|&i, &j| pieces[i].3.total_cmp(&pieces[j].3)).unwrap();
        let (lo, hi, _, _) = pieces.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (kl, el) = kronrod(f, lo, mid);
        let (kr, er) = kronrod(f, mid, hi);
        pieces.push((lo, mid, kl, el));
        pieces.push((mid, hi, kr, er));
    }
    pieces.iter().map(|p| p.2).sum()
}

/// Half-width beyond which `|x|^l exp(-a x^2)` is below `e^-32` of its peak.
fn half_width(alpha: f64, l: u32) -> f64 {
    (32.0 / alpha).sqrt() + 2.0 * (l as f64 / alpha).sqrt()
}

/// Nested adaptive integration over the box around the center. The
/// integrand factors per axis; each factor is hoisted out of the inner
/// integrals it does not depend on.
pub fn numeric_ft(prim: &GaussianPrimitive, q: &Vec3, tol: f64) -> Complex64 {
    let c = prim.center();
    let a = prim.exponent();
    let l = prim.powers();
    let w = l.map(|l| half_width(a, l));
    let factor = |axis: usize, x: f64| {
        let d = x - c[axis];
        Complex64::from_polar(d.powi(l[axis] as i32) * (-a * d * d).exp(), -q[axis] * x)
    };
    // starting pieces span three Gaussian widths or two oscillations,
    // whichever is shorter
    let pieces = |axis: usize| {
        let h = (3.0 / a.sqrt()).min(4.0 * PI / q[axis].abs().max(1e-12));
        (2.0 * w[axis] / h).ceil() as usize
    };
    let n = [pieces(0), pieces(1), pieces(2)];
    let z_int = |scale: Complex64| adaptive(&|z| scale * factor(2, z), c.z - w[2], c.z + w[2], tol, n[2]);
    let total = adaptive(
        &|x| {
            let fx = factor(0, x);
            adaptive(&|y| z_int(fx * factor(1, y)), c.y - w[1], c.y + w[1], tol, n[1])
        },
        c.x - w[0],
        c.x + w[0],
        tol,
        n[0],
    );
    total * prim.norm() / (2.0 * PI).powf(1.5)
}

#[derive(Debug, Default)]
pub struct TransformReport {
    pub samples: usize,
    pub max_relative_error: f64,
    pub elapsed: Duration,
}

/// Random normalized primitives with total angular momentum up to 3 at
/// random momenta with `|q|^2 / 4a <= 6`. Exponents span 0.3..3 bohr^-2.
pub fn random_cases(seed: u64, n: usize) -> Vec<(GaussianPrimitive, Vec3)> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let alpha: f64 = rng.random_range(0.3..3.0);
            let mut powers = [0u32; 3];
            for _ in 0..rng.random_range(0..=3) {
                powers[rng.random_range(0..3)] += 1;
            }
            let center = Vec3::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let q_max = (24.0 * alpha).sqrt();
            let dir = loop {
                let v = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                let n = v.norm();
                if n > 0.1 && n <= 1.0 {
                    break v / n;
                }
            };
            let q = dir * (q_max * rng.random_range(0.0f64..1.0).cbrt());
            (GaussianPrimitive::new(center, alpha, powers).unwrap(), q)
        })
        .collect()
}

pub fn compare(seed: u64, n: usize, tol: f64) -> TransformReport {
    let start = Instant::now();
    let mut report = TransformReport::default();
    for (prim, q) in random_cases(seed, n) {
        let exact = gaussian_ft(&prim, &q);
        let numeric = numeric_ft(&prim, &q, tol);
        report.max_relative_error = report.max_relative_error.max((numeric - exact).norm() / exact.norm());
        report.samples += 1;
    }
    report.elapsed = start.elapsed();
    report
}
