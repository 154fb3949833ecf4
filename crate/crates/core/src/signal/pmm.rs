use num_complex::Complex64;
use rayon::prelude::*;

use super::{coherent_sum, ProbabilityModel, SignalModel};
use crate::momentum::{build_hemisphere, orbital_ft, MomentumGrid};
use crate::{Error, Result};

/// Probabilities on one momentum grid with the time-independent work done
/// once: transforms, Dyson contractions and envelopes. Only the member
/// phases change with the probe time.
pub struct PmmEvaluator<'a> {
    model: &'a SignalModel,
    grid: MomentumGrid,
    channels: Vec<usize>,
    outer: Vec<f64>,
    n_members: usize,
    /// `[sample][channel][member]`, flattened.
    amps: Vec<[Complex64; 2]>,
    prefactor: Vec<f64>,
}

impl<'a> PmmEvaluator<'a> {
    /// `grid` must be a constant-energy grid.
    pub fn new(model: &'a SignalModel, grid: MomentumGrid, kind: ProbabilityModel) -> Result<Self> {
        let eps = grid
            .energy()
            .ok_or_else(|| Error::InvalidInput("probabilities need a constant-energy grid".into()))?;
        let channels: Vec<usize> = (0..model.channels().len()).filter(|&c| model.channel_active(c, eps, kind)).collect();
        let skipped: Vec<usize> = (0..model.channels().len())
            .filter(|c| !channels.contains(c))
            .map(|c| model.channels()[c].final_index)
            .collect();
        if !skipped.is_empty() {
            log::debug!("eps = {eps:.6} Ha: skipped final states {skipped:?}");
        }
        let factors: Vec<(f64, Vec<f64>)> = channels.iter().map(|&c| model.envelope_factors(c, eps, kind)).collect();

        let mut orbital_slot = vec![usize::MAX; model.orbitals().len()];
        let mut transforms = Vec::new();
        for o in model.active_orbitals() {
            orbital_slot[o] = transforms.len();
            transforms.push(orbital_ft(model.orbitals().get(o)?, o, &grid)?);
        }

        let n_members = model.wave_packet().len();
        let valid = grid.valid_mask();
        let amps: Vec<[Complex64; 2]> = (0..grid.len())
            .into_par_iter()
            .flat_map_iter(|s| {
                let ok = valid[s];
                let per_channel: Vec<[Complex64; 2]> = channels
                    .iter()
                    .zip(&factors)
                    .flat_map(|(&c, (_, inner))| {
                        if ok {
                            model.member_amplitudes(c, inner, &|o| transforms[orbital_slot[o]].values()[s])
                        } else {
                            vec![[Complex64::new(0.0, 0.0); 2]; n_members]
                        }
                    })
                    .collect();
                per_channel.into_iter()
            })
            .collect();
        let prefactor = grid
            .samples()
            .iter()
            .zip(valid)
            .map(|(q, &ok)| if ok { model.prefactor(q) } else { 0.0 })
            .collect();
        Ok(Self {
            model,
            grid,
            channels,
            outer: factors.into_iter().map(|(o, _)| o).collect(),
            n_members,
            amps,
            prefactor,
        })
    }

    pub fn grid(&self) -> &MomentumGrid {
        &self.grid
    }

    /// Final-state labels that passed the envelope cutoff.
    pub fn channel_labels(&self) -> Vec<usize> {
        self.channels.iter().map(|&c| self.model.channels()[c].final_index).collect()
    }

    /// Probability at every sample; invalid samples are zero.
    pub fn evaluate(&self, t_p: f64) -> Vec<f64> {
        let phases = self.model.phases(t_p);
        let stride = self.channels.len() * self.n_members;
        let valid = self.grid.valid_mask();
        (0..self.grid.len())
            .into_par_iter()
            .map(|s| {
                if !valid[s] || stride == 0 {
                    return 0.0;
                }
                let block = &self.amps[s * stride..(s + 1) * stride];
                let total: f64 = block
                    .chunks(self.n_members)
                    .zip(&self.outer)
                    .map(|(amps, w)| w * coherent_sum(amps, &phases))
                    .sum();
                self.prefactor[s] * total
            })
            .collect()
    }
}

/// Photoelectron momentum map on a hemispherical cut. Momenta in atomic
/// units; sample `(i, j)` is `values[i * qy.len() + j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmm {
    /// Photoelectron energy, hartree.
    pub energy: f64,
    pub t_p: f64,
    pub model: ProbabilityModel,
    pub qx: Vec<f64>,
    pub qy: Vec<f64>,
    pub values: Vec<f64>,
    pub valid: Vec<bool>,
    /// Final-state labels that contributed.
    pub channels: Vec<usize>,
}

impl Pmm {
    pub fn shape(&self) -> [usize; 2] {
        [self.qx.len(), self.qy.len()]
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.qy.len() + j]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }

    /// Image under `(q_x, q_y) -> (-q_x, -q_y)`. The raster is symmetric,
    /// so this reverses the sample order.
    pub fn point_reflected(&self) -> Self {
        let mut out = self.clone();
        out.values.reverse();
        out.valid.reverse();
        out
    }

    /// `||a - b|| / ||a||` over valid samples.
    pub fn normalized_l2_difference(&self, other: &Pmm) -> f64 {
        let (mut num, mut den) = (0.0, 0.0);
        for ((a, b), ok) in self.values.iter().zip(&other.values).zip(&self.valid) {
            if *ok {
                num += (a - b) * (a - b);
                den += a * a;
            }
        }
        if den == 0.0 {
            0.0
        } else {
            (num / den).sqrt()
        }
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|v| **v).count()
    }
}

fn to_pmm(ev: &PmmEvaluator, values: Vec<f64>, t_p: f64, model: ProbabilityModel) -> Pmm {
    let (qx, qy) = ev.grid().raster_axes().expect("hemisphere grid");
    Pmm {
        energy: ev.grid().energy().expect("constant-energy grid"),
        t_p,
        model,
        qx,
        qy,
        values,
        valid: ev.grid().valid_mask().to_vec(),
        channels: ev.channel_labels(),
    }
}

/// Maps at several probe times on one `n x n` hemisphere at energy `eps`.
pub fn pmm_series(model: &SignalModel, eps: f64, times: &[f64], n: usize, kind: ProbabilityModel) -> Result<Vec<Pmm>> {
    let ev = PmmEvaluator::new(model, build_hemisphere(eps, n, n, None)?, kind)?;
    Ok(times.iter().map(|&t| to_pmm(&ev, ev.evaluate(t), t, kind)).collect())
}

/// Map at energy `eps` (hartree) and probe time `t_p` on an `n x n`
/// hemisphere covering the kinematic disc.
pub fn pmm_cut(model: &SignalModel, eps: f64, t_p: f64, n: usize, kind: ProbabilityModel) -> Result<Pmm> {
    Ok(pmm_series(model, eps, &[t_p], n, kind)?.remove(0))
}

/// Uniform average of maps at `n_e` energies spanning
/// `[eps_c - d_eps/2, eps_c + d_eps/2]`, one map per entry of `times`.
/// Every energy is evaluated on the `(q_x, q_y)` raster of the central disc.
/// The average is defined only where every energy contributes, so the valid
/// region is the disc of the lowest energy; samples outside it are zero.
pub fn energy_average_pmm(
    model: &SignalModel,
    eps_c: f64,
    d_eps: f64,
    n_e: usize,
    times: &[f64],
    n: usize,
    kind: ProbabilityModel,
) -> Result<Vec<Pmm>> {
    if !(d_eps > 0.0) || n_e < 2 {
        return Err(Error::InvalidInput("energy averaging needs a positive width and at least 2 samples".into()));
    }
    let e_lo = eps_c - 0.5 * d_eps;
    if e_lo <= 0.0 {
        return Err(Error::InvalidInput("averaging window reaches zero kinetic energy".into()));
    }
    let center = build_hemisphere(eps_c, n, n, None)?;
    let q_max = center.extent();
    let covered = build_hemisphere(e_lo, n, n, Some(q_max))?.valid_mask().to_vec();
    let mut sums = vec![vec![0.0; center.len()]; times.len()];
    let mut channels = std::collections::BTreeSet::new();
    for k in 0..n_e {
        let e = e_lo + d_eps * k as f64 / (n_e - 1) as f64;
        let ev = PmmEvaluator::new(model, build_hemisphere(e, n, n, Some(q_max))?, kind)?;
        channels.extend(ev.channel_labels());
        for (t, sum) in times.iter().zip(&mut sums) {
            for ((acc, v), ok) in sum.iter_mut().zip(ev.evaluate(*t)).zip(&covered) {
                if *ok {
                    *acc += v;
                }
            }
        }
    }
    let (qx, qy) = center.raster_axes().expect("hemisphere grid");
    Ok(times
        .iter()
        .zip(sums)
        .map(|(&t_p, sum)| Pmm {
            energy: eps_c,
            t_p,
            model: kind,
            qx: qx.clone(),
            qy: qy.clone(),
            values: sum.into_iter().map(|s| s / n_e as f64).collect(),
            valid: covered.clone(),
            channels: channels.iter().copied().collect(),
        })
        .collect())
}

/// Amplitude `|X(q)|` of the oscillating part `Re(X exp(i w t))` from maps at
/// `0, T/4, T/2, 3T/4`.
pub fn oscillation_amplitude(maps: &[Pmm; 4]) -> Vec<f64> {
    (0..maps[0].values.len())
        .map(|s| {
            let c = maps[0].values[s] - maps[2].values[s];
            let d = maps[3].values[s] - maps[1].values[s];
            0.5 * (c * c + d * d).sqrt()
        })
        .collect()
}

/// Position `(q_x, q_y)` (a.u.) and amplitude of the strongest oscillation.
/// Ties keep the first sample in raster order.
pub fn strongest_oscillation(maps: &[Pmm; 4]) -> (f64, f64, f64) {
    let amp = oscillation_amplitude(maps);
    let ny = maps[0].qy.len();
    let (best, value) = amp
        .iter()
        .enumerate()
        .filter(|(s, _)| maps[0].valid[*s])
        .fold((0, f64::NEG_INFINITY), |acc, (s, &v)| if v > acc.1 { (s, v) } else { acc });
    (maps[0].qx[best / ny], maps[0].qy[best % ny], value)
}
