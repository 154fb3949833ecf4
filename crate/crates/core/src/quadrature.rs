//! Gauss-Legendre rules and the spherical product rule used for angle
//! integration.

use std::f64::consts::PI;

use crate::model::Vec3;
use crate::{Error, Result};

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        // Newton iteration on P_n from Tricomi's initial guess. Only the upper
        // half is computed; the lower half is mirrored so the rule is exactly
        // symmetric.
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn on_interval(&self, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let x = self.nodes.iter().map(|t| mid + half * t).collect();
        let w = self.weights.iter().map(|w| w * half).collect();
        (x, w)
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let dp = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, dp)
}

/// Largest polynomial degree accepted by [`SphericalRule::new`].
pub const MAX_SPHERICAL_DEGREE: usize = 1023;

/// Product rule on the unit sphere: Gauss-Legendre in `cos(theta)` times the
/// uniform trapezoid in `phi`. Integrates spherical harmonics up to `degree`
/// exactly; weights sum to `4 pi`.
#[derive(Debug, Clone)]
pub struct SphericalRule {
    degree: usize,
    directions: Vec<Vec3>,
    weights: Vec<f64>,
}

impl SphericalRule {
    pub fn new(degree: usize) -> Result<Self> {
        if degree == 0 || degree > MAX_SPHERICAL_DEGREE {
            return Err(Error::Unsupported(format!(
                "spherical quadrature degree {degree} (supported: 1..={MAX_SPHERICAL_DEGREE})"
            )));
        }
        let n_theta = degree / 2 + 1;
        let n_phi = degree + 1;
        let gl = GaussLegendre::new(n_theta);
        let mut directions = Vec::with_capacity(n_theta * n_phi);
        let mut weights = Vec::with_capacity(n_theta * n_phi);
        let dphi = 2.0 * PI / n_phi as f64;
        for (ct, wt) in gl.nodes().iter().zip(gl.weights()) {
            let st = (1.0 - ct * ct).max(0.0).sqrt();
            for k in 0..n_phi {
                let phi = dphi * k as f64;
                directions.push(Vec3::new(st * phi.cos(), st * phi.sin(), *ct));
                weights.push(wt * dphi);
            }
        }
        Ok(Self { degree, directions, weights })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn directions(&self) -> &[Vec3] {
        &self.directions
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate(&self, f: impl Fn(&Vec3) -> f64) -> f64 {
        self.directions.iter().zip(&self.weights).map(|(d, w)| w * f(d)).sum()
    }
}
