//! Dense Fock-space reference for annihilation overlaps.
//!
//! Spin-orbital `p = 2 * orbital + (spin == down)`; Fock basis index is the
//! occupation bitmask; `a_p` carries the Jordan-Wigner string over `q < p`.
//! Nothing here uses the library's operator algebra.

use std::time::{Duration, Instant};

use attopmm::csf_algebra::{csf_overlap_map, state_overlap_map, OverlapChannel};
use attopmm::model::{ConfigurationStateFunction, Coupling, ElectronicState, Spin};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub type Dense = Vec<Vec<f64>>;

fn zeros(dim: usize) -> Dense {
    vec![vec![0.0; dim]; dim]
}

pub fn annihilator(n_so: usize, p: usize) -> Dense {
    let dim = 1 << n_so;
    let mut a = zeros(dim);
    for n in 0..dim {
        if n >> p & 1 == 1 {
            let string = (n & ((1 << p) - 1)).count_ones();
            a[n ^ (1 << p)][n] = if string.is_multiple_of(2) { 1.0 } else { -1.0 };
        }
    }
    a
}

pub fn transpose(a: &Dense) -> Dense {
    let dim = a.len();
    let mut t = zeros(dim);
    for (i, row) in a.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            t[j][i] = *v;
        }
    }
    t
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let dim = a.len();
    let mut c = zeros(dim);
    for i in 0..dim {
        for k in 0..dim {
            let aik = a[i][k];
            if aik != 0.0 {
                for j in 0..dim {
                    c[i][j] += aik * b[k][j];
                }
            }
        }
    }
    c
}

fn add(a: &mut Dense, b: &Dense, s: f64) {
    for (ra, rb) in a.iter_mut().zip(b) {
        for (x, y) in ra.iter_mut().zip(rb) {
            *x += s * y;
        }
    }
}

pub fn apply(a: &Dense, v: &[f64]) -> Vec<f64> {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Operators for `n` spatial orbitals.
pub struct Fock {
    pub n_orbitals: usize,
    pub a: Vec<Dense>,
    pub s2: Dense,
    pub sz: Dense,
}

impl Fock {
    pub fn new(n_orbitals: usize) -> Self {
        let n_so = 2 * n_orbitals;
        let dim = 1 << n_so;
        let a: Vec<Dense> = (0..n_so).map(|p| annihilator(n_so, p)).collect();
        let ad: Vec<Dense> = a.iter().map(transpose).collect();
        let mut sz = zeros(dim);
        let mut s_plus = zeros(dim);
        for o in 0..n_orbitals {
            let (up, dn) = (2 * o, 2 * o + 1);
            add(&mut sz, &matmul(&ad[up], &a[up]), 0.5);
            add(&mut sz, &matmul(&ad[dn], &a[dn]), -0.5);
            add(&mut s_plus, &matmul(&ad[up], &a[dn]), 1.0);
        }
        // S^2 = S- S+ + Sz^2 + Sz
        let mut s2 = matmul(&transpose(&s_plus), &s_plus);
        add(&mut s2, &matmul(&sz, &sz), 1.0);
        add(&mut s2, &sz, 1.0);
        Self { n_orbitals, a, s2, sz }
    }

    pub fn vector(&self, expansion: &[(f64, ConfigurationStateFunction)]) -> Vec<f64> {
        let mut v = vec![0.0; 1 << (2 * self.n_orbitals)];
        for (c, csf) in expansion {
            for (d, det) in csf.expansion() {
                v[det.bits() as usize] += c * d;
            }
        }
        v
    }
}

fn so_index(orbital: usize, spin: Spin) -> usize {
    2 * orbital + usize::from(spin == Spin::Down)
}

/// Every CSF of `n_electrons` in `n_orbitals`: all occupations, all
/// genealogical paths, all spin projections.
pub fn all_csfs(n_orbitals: usize, n_electrons: usize) -> Vec<ConfigurationStateFunction> {
    let mut out = Vec::new();
    for code in 0..3usize.pow(n_orbitals as u32) {
        let occ: Vec<u8> = (0..n_orbitals).map(|i| (code / 3usize.pow(i as u32) % 3) as u8).collect();
        if occ.iter().map(|&n| n as usize).sum::<usize>() != n_electrons {
            continue;
        }
        let open = occ.iter().filter(|&&n| n == 1).count();
        for path in 0..(1usize << open) {
            let text: String = (0..open).map(|k| if path >> k & 1 == 0 { 'u' } else { 'd' }).collect();
            let parsed = if open == 0 { Coupling::unique(0) } else { text.parse() };
            let Ok(coupling) = parsed else { continue };
            let twice_s = coupling.twice_s() as i32;
            for twice_m in (-twice_s..=twice_s).step_by(2) {
                out.push(ConfigurationStateFunction::from_occupation(occ.clone(), coupling.clone(), twice_m).unwrap());
            }
        }
    }
    out
}

#[derive(Debug, Default)]
pub struct SweepReport {
    pub systems: usize,
    pub csfs: usize,
    pub pairs: usize,
    /// Worst `|library - dense|` over all channels.
    pub max_overlap_error: f64,
    /// Worst deviation of CSF norm, `S^2` and `S_z` from their labels.
    pub max_spin_error: f64,
    pub elapsed: Duration,
}

fn compare(fock: &Fock, channels: &[OverlapChannel], f: &[f64], i: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for orbital in 0..fock.n_orbitals {
        for spin in [Spin::Up, Spin::Down] {
            let dense = dot(f, &apply(&fock.a[so_index(orbital, spin)], i));
            let lib = channels
                .iter()
                .filter(|c| c.orbital == orbital && c.spin == spin)
                .map(|c| c.coefficient)
                .sum::<f64>();
            worst = worst.max((dense - lib).abs());
        }
    }
    worst
}

fn random_state(csfs: &[ConfigurationStateFunction], rng: &mut StdRng, k: usize) -> Vec<(f64, ConfigurationStateFunction)> {
    let mut picks: Vec<(f64, ConfigurationStateFunction)> =
        (0..k).map(|_| (rng.random_range(-1.0..1.0), csfs[rng.random_range(0..csfs.len())].clone())).collect();
    let norm = picks.iter().map(|(c, _)| c * c).sum::<f64>().sqrt();
    picks.iter_mut().for_each(|(c, _)| *c /= norm * 1.000001);
    picks
}

/// All systems with at most 8 spin-orbitals and 4 electrons. Every CSF pair
/// with electron counts N and N-1, plus random CSF superpositions on both
/// sides.
pub fn sweep(seed: u64) -> SweepReport {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(seed);
    let mut report = SweepReport::default();
    for n_orbitals in 1..=4 {
        let fock = Fock::new(n_orbitals);
        for n_electrons in 1..=4.min(2 * n_orbitals) {
            report.systems += 1;
            let initials = all_csfs(n_orbitals, n_electrons);
            let finals = all_csfs(n_orbitals, n_electrons - 1);
            report.csfs += initials.len();
            for csf in &initials {
                let v = fock.vector(&[(1.0, csf.clone())]);
                let s = csf.twice_s() as f64 / 2.0;
                let m = csf.twice_m() as f64 / 2.0;
                let e = (dot(&v, &v) - 1.0)
                    .abs()
                    .max((dot(&v, &apply(&fock.s2, &v)) - s * (s + 1.0)).abs())
                    .max((dot(&v, &apply(&fock.sz, &v)) - m).abs());
                report.max_spin_error = report.max_spin_error.max(e);
            }
            let initial_vecs: Vec<Vec<f64>> = initials.iter().map(|c| fock.vector(&[(1.0, c.clone())])).collect();
            for fin in &finals {
                let state = ElectronicState::new(0.0, vec![(1.0, fin.clone())]).unwrap();
                let fv = fock.vector(state.expansion());
                for (csf, iv) in initials.iter().zip(&initial_vecs) {
                    let channels = csf_overlap_map(&state, csf).unwrap();
                    report.max_overlap_error = report.max_overlap_error.max(compare(&fock, &channels, &fv, iv));
                    report.pairs += 1;
                }
            }
            for _ in 0..50 {
                let f_exp = random_state(&finals, &mut rng, 3);
                let i_exp = random_state(&initials, &mut rng, 3);
                let f_state = ElectronicState::new(0.0, f_exp).unwrap();
                let i_state = ElectronicState::new(0.0, i_exp).unwrap();
                let channels = state_overlap_map(&f_state, &i_state).unwrap();
                let err = compare(&fock, &channels, &fock.vector(f_state.expansion()), &fock.vector(i_state.expansion()));
                report.max_overlap_error = report.max_overlap_error.max(err);
                report.pairs += 1;
            }
        }
    }
    report.elapsed = start.elapsed();
    report
}
