use num_complex::Complex64;

use super::ElectronicState;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct WavePacketMember {
    pub coefficient: Complex64,
    /// Hartree.
    pub energy: f64,
    pub state: ElectronicState,
}

/// Coherent superposition `sum_I C_I exp(-i E_I (t - t0)) |Phi_I>`.
#[derive(Debug, Clone, PartialEq)]
pub struct WavePacket {
    members: Vec<WavePacketMember>,
    t0: f64,
    mean_energy: f64,
}

impl WavePacket {
    /// Fails unless `sum |C_I|^2 = 1` within 1e-10; nothing is renormalized.
    pub fn new(members: Vec<WavePacketMember>, t0: f64) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidInput("wave packet without members".into()));
        }
        let norm: f64 = members.iter().map(|m| m.coefficient.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::WavePacketNorm { norm });
        }
        let n_el = members[0].state.n_electrons();
        let n_orb = members[0].state.n_orbitals();
        for m in &members {
            if m.state.n_electrons() != n_el {
                return Err(Error::InvalidInput("wave packet members differ in electron count".into()));
            }
            if m.state.n_orbitals() != n_orb {
                return Err(Error::BasisMismatch(n_orb, m.state.n_orbitals()));
            }
        }
        let mean_energy = members.iter().map(|m| m.coefficient.norm_sqr() * m.energy).sum();
        Ok(Self { members, t0, mean_energy })
    }

    pub fn members(&self) -> &[WavePacketMember] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    /// `<E> = sum |C_I|^2 E_I` (hartree).
    pub fn mean_energy(&self) -> f64 {
        self.mean_energy
    }

    pub fn n_electrons(&self) -> usize {
        self.members[0].state.n_electrons()
    }

    pub fn n_orbitals(&self) -> usize {
        self.members[0].state.n_orbitals()
    }

    /// `C_I exp(-i E_I (t - t0))`, all in atomic units.
    pub fn phase(&self, index: usize, t: f64) -> Result<Complex64> {
        let m = self
            .members
            .get(index)
            .ok_or(Error::IndexOutOfRange { index, len: self.members.len() })?;
        Ok(m.coefficient * Complex64::from_polar(1.0, -m.energy * (t - self.t0)))
    }

    /// Beat period `2 pi / |E_2 - E_1|` when exactly two distinct energies are
    /// populated.
    pub fn period(&self) -> Option<f64> {
        let mut energies: Vec<f64> = self
            .members
            .iter()
            .filter(|m| m.coefficient.norm_sqr() > 0.0)
            .map(|m| m.energy)
            .collect();
        energies.sort_by(f64::total_cmp);
        energies.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        match energies.as_slice() {
            [a, b] => Some(2.0 * std::f64::consts::PI / (b - a)),
            _ => None,
        }
    }

    /// Beat period from the first two members, regardless of populations.
    pub fn two_level_period(&self) -> Option<f64> {
        match self.members.as_slice() {
            [a, b, ..] if (a.energy - b.energy).abs() > 1e-14 => {
                Some(2.0 * std::f64::consts::PI / (a.energy - b.energy).abs())
            }
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ConfigurationStateFunction;
    use crate::units::{ev_to_hartree, fs_to_au};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn state(e: f64) -> ElectronicState {
        let csf = ConfigurationStateFunction::excitation(2, 1, &[], &[], None, None).unwrap();
        ElectronicState::new(e, vec![(1.0, csf)]).unwrap()
    }

    fn packet(c1: Complex64, c2: Complex64, e1: f64, e2: f64) -> Result<WavePacket> {
        WavePacket::new(
            vec![
                WavePacketMember { coefficient: c1, energy: e1, state: state(e1) },
                WavePacketMember { coefficient: c2, energy: e2, state: state(e2) },
            ],
            0.0,
        )
    }

    #[test]
    fn norm_is_enforced() {
        let c = Complex64::new(0.7, 0.0);
        assert!(matches!(packet(c, c, 0.1, 0.2), Err(Error::WavePacketNorm { .. })));
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let wp = packet(h, h, 0.1, 0.2).unwrap();
        assert!((wp.mean_energy() - 0.15).abs() < 1e-15);
    }

    #[test]
    fn phase_at_t0_is_coefficient() {
        let c1 = Complex64::new(0.6, 0.0);
        let c2 = Complex64::new(0.0, 0.8);
        let wp = packet(c1, c2, 0.1, 0.2).unwrap();
        assert_eq!(wp.phase(0, 0.0).unwrap(), c1);
        assert_eq!(wp.phase(1, 0.0).unwrap(), c2);
        assert!(wp.phase(2, 0.0).is_err());
        for t in [-3.0, 1.0, 1e4] {
            assert!((wp.phase(1, t).unwrap().norm() - 0.8).abs() < 1e-15);
        }
    }

    #[test]
    fn beat_period_closes_the_relative_phase() {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let period = fs_to_au(5.73);
        let de = 2.0 * PI / period;
        let wp = packet(h, h, 0.13, 0.13 + de).unwrap();
        let rel = |t: f64| (wp.phase(1, t).unwrap() / wp.phase(0, t).unwrap()).arg();
        assert!((wp.period().unwrap() - period).abs() < 1e-9);
        let closure = (wp.phase(1, period).unwrap() / wp.phase(0, period).unwrap() - 1.0).norm();
        assert!(closure < 1e-12, "{closure}");
        assert!(rel(period / 2.0).abs() > 3.14);

        // The rounded splitting 0.7218 eV closes the cycle to ~1e-3 rad.
        let wp = packet(h, h, 0.13, 0.13 + ev_to_hartree(0.7218)).unwrap();
        let phase = ev_to_hartree(0.7218) * period;
        assert!((phase - 2.0 * PI).abs() < 1e-3);
        assert!((wp.phase(1, period).unwrap() / wp.phase(0, period).unwrap() - 1.0).norm() < 1e-3);
    }
}
