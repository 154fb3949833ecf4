//! Photoelectron observables: probabilities for short and finite probe
//! pulses, momentum maps on constant-energy cuts and angle-integrated
//! spectra.
//!
//! Short pulse:
//! `P = K |eps.q|^2 sum_{F,s} g_F(eps_e) |sum_o d_{F,o,s}(t_p) F(phi_o)(q)|^2`
//! with `g_F = exp(-(Omega_F - eps_e)^2 tau^2 / (4 ln2))` and
//! `Omega_F = omega_in + <E> - E_F`.
//! Finite pulse: the envelope moves inside the coherent member sum at
//! amplitude level with `8 ln2` and per-member energies. Both use the same
//! prefactor `K = tau^2 I0 / (8 pi ln2 omega^2 c)`, set to 1 in relative
//! mode.

mod pmm;
mod spectrum;

use std::collections::BTreeSet;
use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::csf_algebra::{assemble_dyson, state_overlap_map, DysonOrbital, OverlapChannel};
use crate::model::{
    ConfigurationStateFunction, ElectronicState, OrbitalSet, ProbePulse, Spin, Vec3, WavePacket, WavePacketMember,
};
use crate::momentum::orbital_ft_at;
use crate::units::{ev_to_hartree, SPEED_OF_LIGHT_AU};
use crate::{Error, Result};

pub use pmm::{
    energy_average_pmm, oscillation_amplitude, pmm_cut, pmm_series, strongest_oscillation, Pmm, PmmEvaluator,
};
pub use spectrum::{angle_integrated_spectra, angle_integrated_spectrum, Spectrum, SpectrumKind};

/// Channels whose envelope falls below this at the requested energy are
/// skipped.
pub const ENVELOPE_CUTOFF: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrefactorMode {
    /// Only `|eps.q|^2`; the constant `tau^2 I0 / (8 pi ln2 omega^2 c)` is 1.
    #[default]
    Relative,
    /// Full prefactor with `I0` in atomic units.
    Absolute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ProbabilityModel {
    /// Envelope on the probability of each final state.
    #[default]
    Short,
    /// Envelope on each member amplitude inside the coherent sum.
    Long,
}

/// `exp(-(Omega_F - eps)^2 tau^2 / (4 ln2))`, atomic units.
pub fn envelope_short(omega_f: f64, eps: f64, tau: f64) -> f64 {
    let d = omega_f - eps;
    (-d * d * tau * tau / (4.0 * LN_2)).exp()
}

/// `exp(-(omega_in + E_I - E_F - eps)^2 tau^2 / (8 ln2))`, atomic units.
pub fn envelope_long(omega_in: f64, e_i: f64, e_f: f64, eps: f64, tau: f64) -> f64 {
    let d = omega_in + e_i - e_f - eps;
    (-d * d * tau * tau / (8.0 * LN_2)).exp()
}

/// Full width at half maximum of [`envelope_short`] in energy, `4 ln2 / tau`.
pub fn envelope_fwhm(tau: f64) -> f64 {
    4.0 * LN_2 / tau
}

/// Width at which the amplitude `sqrt(envelope_short)` drops to one half,
/// `sqrt(2)` times [`envelope_fwhm`].
pub fn amplitude_fwhm(tau: f64) -> f64 {
    2f64.sqrt() * envelope_fwhm(tau)
}

/// One final state as seen by the probe.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralChannel {
    /// Label of the final state in its table.
    pub final_index: usize,
    /// `E_F`, hartree.
    pub final_energy: f64,
    /// `omega_in + <E> - E_F`, hartree.
    pub omega: f64,
    /// `<Phi_F| a_{o,s} |Phi_I>` per wave-packet member.
    pub members: Vec<Vec<OverlapChannel>>,
    /// True when two or more members overlap with this final state.
    pub time_dependent: bool,
}

impl SpectralChannel {
    pub fn contributes(&self) -> bool {
        self.members.iter().any(|m| !m.is_empty())
    }
}

/// Everything needed to evaluate probabilities: pulse, wave packet, final
/// states and orbitals.
#[derive(Debug, Clone)]
pub struct SignalModel {
    pulse: ProbePulse,
    wave_packet: WavePacket,
    finals: Vec<(usize, ElectronicState)>,
    orbitals: OrbitalSet,
    channels: Vec<SpectralChannel>,
    prefactor: PrefactorMode,
}

impl SignalModel {
    /// `finals` pairs each final state with its table label.
    pub fn new(
        pulse: ProbePulse,
        wave_packet: WavePacket,
        finals: Vec<(usize, ElectronicState)>,
        orbitals: OrbitalSet,
        prefactor: PrefactorMode,
    ) -> Result<Self> {
        if finals.is_empty() {
            return Err(Error::InvalidInput("no final states".into()));
        }
        if wave_packet.n_orbitals() != orbitals.len() {
            return Err(Error::BasisMismatch(wave_packet.n_orbitals(), orbitals.len()));
        }
        let mean = wave_packet.mean_energy();
        let channels = finals
            .iter()
            .map(|(index, state)| {
                let members = wave_packet
                    .members()
                    .iter()
                    .map(|m| state_overlap_map(state, &m.state))
                    .collect::<Result<Vec<_>>>()?;
                let time_dependent = members.iter().filter(|m| !m.is_empty()).count() >= 2;
                Ok(SpectralChannel {
                    final_index: *index,
                    final_energy: state.energy(),
                    omega: pulse.photon_energy + mean - state.energy(),
                    members,
                    time_dependent,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { pulse, wave_packet, finals, orbitals, channels, prefactor })
    }

    pub fn pulse(&self) -> &ProbePulse {
        &self.pulse
    }

    pub fn wave_packet(&self) -> &WavePacket {
        &self.wave_packet
    }

    pub fn orbitals(&self) -> &OrbitalSet {
        &self.orbitals
    }

    pub fn channels(&self) -> &[SpectralChannel] {
        &self.channels
    }

    pub fn finals(&self) -> &[(usize, ElectronicState)] {
        &self.finals
    }

    pub fn prefactor_mode(&self) -> PrefactorMode {
        self.prefactor
    }

    /// Same physics with another pulse; channel overlaps are reused.
    pub fn with_pulse(&self, pulse: ProbePulse) -> Self {
        let mut out = self.clone();
        let mean = out.wave_packet.mean_energy();
        for ch in &mut out.channels {
            ch.omega = pulse.photon_energy + mean - ch.final_energy;
        }
        out.pulse = pulse;
        out
    }

    /// Only the final states with the given labels.
    pub fn restricted_to(&self, labels: &[usize]) -> Result<Self> {
        let finals: Vec<_> = self.finals.iter().filter(|(i, _)| labels.contains(i)).cloned().collect();
        Self::new(self.pulse, self.wave_packet.clone(), finals, self.orbitals.clone(), self.prefactor)
    }

    /// Beat period of the first two members.
    pub fn period(&self) -> Option<f64> {
        self.wave_packet.two_level_period()
    }

    pub fn dyson(&self, final_index: usize, t_p: f64) -> Result<DysonOrbital> {
        let (_, state) = self
            .finals
            .iter()
            .find(|(i, _)| *i == final_index)
            .ok_or_else(|| Error::InvalidInput(format!("no final state {final_index}")))?;
        assemble_dyson(state, final_index, &self.wave_packet, t_p)
    }

    /// Orbital indices appearing in any channel.
    pub fn active_orbitals(&self) -> BTreeSet<usize> {
        self.channels
            .iter()
            .flat_map(|c| c.members.iter().flatten().map(|o| o.orbital))
            .collect()
    }

    /// `K |eps.q|^2`.
    pub fn prefactor(&self, q: &Vec3) -> f64 {
        let pol = self.pulse.polarization.dot(q);
        let base = pol * pol;
        match self.prefactor {
            PrefactorMode::Relative => base,
            PrefactorMode::Absolute => {
                let p = &self.pulse;
                base * p.duration * p.duration * p.peak_intensity
                    / (8.0 * PI * LN_2 * p.photon_energy * p.photon_energy * SPEED_OF_LIGHT_AU)
            }
        }
    }

    /// Whether channel `c` passes the envelope cutoff at energy `eps`.
    pub(crate) fn channel_active(&self, c: usize, eps: f64, model: ProbabilityModel) -> bool {
        let ch = &self.channels[c];
        if !ch.contributes() {
            return false;
        }
        let tau = self.pulse.duration;
        match model {
            ProbabilityModel::Short => envelope_short(ch.omega, eps, tau) >= ENVELOPE_CUTOFF,
            ProbabilityModel::Long => self.wave_packet.members().iter().enumerate().any(|(i, m)| {
                !ch.members[i].is_empty() && {
                    let g = envelope_long(self.pulse.photon_energy, m.energy, ch.final_energy, eps, tau);
                    g * g >= ENVELOPE_CUTOFF
                }
            }),
        }
    }

    /// Envelope factors of channel `c` at energy `eps`: an outer weight on
    /// the probability and one inner factor per member amplitude. Short
    /// pulses put the envelope outside the coherent sum, finite pulses
    /// inside it.
    pub(crate) fn envelope_factors(&self, c: usize, eps: f64, model: ProbabilityModel) -> (f64, Vec<f64>) {
        let ch = &self.channels[c];
        let tau = self.pulse.duration;
        let members = self.wave_packet.members();
        match model {
            ProbabilityModel::Short => (envelope_short(ch.omega, eps, tau), vec![1.0; members.len()]),
            ProbabilityModel::Long => (
                1.0,
                members
                    .iter()
                    .map(|m| envelope_long(self.pulse.photon_energy, m.energy, ch.final_energy, eps, tau))
                    .collect(),
            ),
        }
    }

    /// Per-member, per-spin amplitudes `g_I sum_o <F|a_{o,s}|I> F(phi_o)(q)`
    /// of channel `c`, given transforms indexed by orbital.
    pub(crate) fn member_amplitudes(
        &self,
        c: usize,
        inner: &[f64],
        ft: &dyn Fn(usize) -> Complex64,
    ) -> Vec<[Complex64; 2]> {
        self.channels[c]
            .members
            .iter()
            .zip(inner)
            .map(|(overlaps, g)| {
                let mut a = [Complex64::new(0.0, 0.0); 2];
                for ch in overlaps {
                    let s = match ch.spin {
                        Spin::Up => 0,
                        Spin::Down => 1,
                    };
                    a[s] += ft(ch.orbital) * (ch.coefficient * g);
                }
                a
            })
            .collect()
    }

    pub(crate) fn phases(&self, t_p: f64) -> Vec<Complex64> {
        (0..self.wave_packet.len())
            .map(|i| self.wave_packet.phase(i, t_p).expect("member index in range"))
            .collect()
    }

    fn probability(&self, q: &Vec3, t_p: f64, model: ProbabilityModel) -> Result<f64> {
        let q2 = q.norm_squared();
        if q2 == 0.0 {
            log::warn!("probability requested at q = 0; returning 0");
            return Ok(0.0);
        }
        let eps = 0.5 * q2;
        let mut ft = vec![Complex64::new(0.0, 0.0); self.orbitals.len()];
        for o in self.active_orbitals() {
            ft[o] = orbital_ft_at(self.orbitals.get(o)?, q)?;
        }
        let phases = self.phases(t_p);
        let mut total = 0.0;
        for c in (0..self.channels.len()).filter(|&c| self.channel_active(c, eps, model)) {
            let (outer, inner) = self.envelope_factors(c, eps, model);
            let amps = self.member_amplitudes(c, &inner, &|o| ft[o]);
            total += outer * coherent_sum(&amps, &phases);
        }
        Ok(self.prefactor(q) * total)
    }
}

/// `sum_s |sum_I phase_I a_{I,s}|^2`.
pub(crate) fn coherent_sum(amps: &[[Complex64; 2]], phases: &[Complex64]) -> f64 {
    let mut total = 0.0;
    for s in 0..2 {
        let mut d = Complex64::new(0.0, 0.0);
        for (a, ph) in amps.iter().zip(phases) {
            d += ph * a[s];
        }
        total += d.norm_sqr();
    }
    total
}

/// Short-pulse probability at momentum `q` (a.u.) and probe time `t_p`.
pub fn probability_short(model: &SignalModel, q: &Vec3, t_p: f64) -> Result<f64> {
    model.probability(q, t_p, ProbabilityModel::Short)
}

/// Finite-duration probability with per-member envelopes.
pub fn probability_long(model: &SignalModel, q: &Vec3, t_p: f64) -> Result<f64> {
    model.probability(q, t_p, ProbabilityModel::Long)
}

/// Ground-state reference and its one-hole final states. Binding energies
/// in eV, HOMO first; final state `k + 1` has its hole in `H-k`.
pub fn ground_state_scenario(
    orbitals: &OrbitalSet,
    binding_energies_ev: &[f64],
) -> Result<(WavePacket, Vec<(usize, ElectronicState)>)> {
    if binding_energies_ev.is_empty() {
        return Err(Error::InvalidInput("ground-state scenario needs binding energies".into()));
    }
    let n = orbitals.len();
    let n_occ = orbitals.n_occupied();
    if binding_energies_ev.len() > n_occ {
        return Err(Error::InvalidInput(format!(
            "{} binding energies for {n_occ} occupied orbitals",
            binding_energies_ev.len()
        )));
    }
    let reference = ConfigurationStateFunction::excitation(n, n_occ, &[], &[], None, None)?;
    let ground = ElectronicState::new(0.0, vec![(1.0, reference)])?;
    let wp = WavePacket::new(
        vec![WavePacketMember { coefficient: Complex64::new(1.0, 0.0), energy: 0.0, state: ground }],
        0.0,
    )?;
    let finals = binding_energies_ev
        .iter()
        .enumerate()
        .map(|(k, be)| {
            let csf = ConfigurationStateFunction::excitation(n, n_occ, &[n_occ - 1 - k], &[], None, None)?;
            Ok((k + 1, ElectronicState::new(ev_to_hartree(*be), vec![(1.0, csf)])?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((wp, finals))
}
