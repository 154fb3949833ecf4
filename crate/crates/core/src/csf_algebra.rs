//! Annihilation-operator algebra on determinants and CSFs, and Dyson orbital
//! assembly.
//!
//! Sign convention: determinants are kept in canonical order (orbital index
//! ascending, spin up before down) and `a_p` acting on a determinant carries
//! `(-1)^(number of occupied spin-orbitals before p)`. CSF determinant
//! expansions are built with sign +1 in that order (see
//! [`ConfigurationStateFunction`]). Relative phases inside one Dyson orbital
//! are convention independent; the overall sign of each one is not.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::model::{ConfigurationStateFunction, ElectronicState, SlaterDeterminant, Spin, SpinOrbital, WavePacket};
use crate::{Error, Result};

/// Coefficients below this magnitude are dropped.
pub const PRUNE_THRESHOLD: f64 = 1e-14;

/// `a_{orbital,spin} |det>`; `None` is the vacuum miss (spin-orbital empty).
pub fn annihilate(det: &SlaterDeterminant, orbital: usize, spin: Spin) -> Option<(f64, SlaterDeterminant)> {
    det.annihilate(SpinOrbital::new(orbital, spin))
}

/// One `(orbital, spin)` channel of an N -> N-1 overlap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapChannel {
    pub orbital: usize,
    pub spin: Spin,
    pub coefficient: f64,
}

fn check_pair(final_state: &ElectronicState, n_orbitals: usize, n_electrons: usize) -> Result<()> {
    if final_state.n_orbitals() != n_orbitals {
        return Err(Error::BasisMismatch(final_state.n_orbitals(), n_orbitals));
    }
    if final_state.n_electrons() + 1 != n_electrons {
        return Err(Error::ElectronCount { final_count: final_state.n_electrons(), initial_count: n_electrons });
    }
    Ok(())
}

fn accumulate(
    final_dets: &BTreeMap<SlaterDeterminant, f64>,
    weight: f64,
    initial: &[(f64, SlaterDeterminant)],
    out: &mut BTreeMap<(usize, Spin), f64>,
) {
    for (ci, det) in initial {
        for so in det.spin_orbitals() {
            if let Some((sign, reduced)) = det.annihilate(so) {
                if let Some(cf) = final_dets.get(&reduced) {
                    *out.entry((so.orbital, so.spin)).or_insert(0.0) += weight * cf * sign * ci;
                }
            }
        }
    }
}

fn into_channels(map: BTreeMap<(usize, Spin), f64>) -> Vec<OverlapChannel> {
    map.into_iter()
        .filter(|(_, c)| c.abs() >= PRUNE_THRESHOLD)
        .map(|((orbital, spin), coefficient)| OverlapChannel { orbital, spin, coefficient })
        .collect()
}

/// All channels `(o, s)` with `<final| a_{o,s} |csf> != 0`, computed by
/// expanding both sides into determinants. Sorted by (orbital, spin).
pub fn csf_overlap_map(final_state: &ElectronicState, initial: &ConfigurationStateFunction) -> Result<Vec<OverlapChannel>> {
    check_pair(final_state, initial.n_orbitals(), initial.n_electrons())?;
    let final_dets = final_state.determinants();
    let mut out = BTreeMap::new();
    accumulate(&final_dets, 1.0, initial.expansion(), &mut out);
    Ok(into_channels(out))
}

/// Same as [`csf_overlap_map`] for a full CSF-expanded initial state.
pub fn state_overlap_map(final_state: &ElectronicState, initial: &ElectronicState) -> Result<Vec<OverlapChannel>> {
    check_pair(final_state, initial.n_orbitals(), initial.n_electrons())?;
    let final_dets = final_state.determinants();
    let mut out = BTreeMap::new();
    for (c, csf) in initial.expansion() {
        accumulate(&final_dets, *c, csf.expansion(), &mut out);
    }
    Ok(into_channels(out))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DysonTerm {
    pub coefficient: Complex64,
    pub orbital: usize,
    pub spin: Spin,
}

/// `phi_F^D(r, t_p) = <Phi_F| psi(r) |Psi(t_p)>` as a combination of
/// molecular orbitals times spin functions.
#[derive(Debug, Clone, PartialEq)]
pub struct DysonOrbital {
    terms: Vec<DysonTerm>,
    final_index: usize,
    t_p: f64,
    /// Per wave-packet member: `<Phi_F| a |Phi_I>` without `C_I` or phase.
    members: Vec<Vec<OverlapChannel>>,
}

impl DysonOrbital {
    pub fn terms(&self) -> &[DysonTerm] {
        &self.terms
    }

    pub fn final_index(&self) -> usize {
        self.final_index
    }

    pub fn probe_time(&self) -> f64 {
        self.t_p
    }

    /// Un-phased per-member overlaps.
    pub fn member_overlaps(&self) -> &[Vec<OverlapChannel>] {
        &self.members
    }

    /// `phi_{FI}^D(t)`: member `index` with `C_I exp(-i E_I (t - t0))` applied.
    pub fn member_terms(&self, wp: &WavePacket, index: usize, t: f64) -> Result<Vec<DysonTerm>> {
        let phase = wp.phase(index, t)?;
        let overlaps = self.members.get(index).ok_or(Error::IndexOutOfRange { index, len: self.members.len() })?;
        Ok(overlaps
            .iter()
            .map(|ch| DysonTerm { coefficient: phase * ch.coefficient, orbital: ch.orbital, spin: ch.spin })
            .collect())
    }

    pub fn coefficient(&self, orbital: usize, spin: Spin) -> Complex64 {
        self.terms
            .iter()
            .find(|t| t.orbital == orbital && t.spin == spin)
            .map_or(Complex64::new(0.0, 0.0), |t| t.coefficient)
    }

    /// `sum |c|^2`, the Dyson norm for an orthonormal orbital basis.
    pub fn norm2(&self) -> f64 {
        self.terms.iter().map(|t| t.coefficient.norm_sqr()).sum()
    }

    /// Number of wave-packet members with a nonzero overlap.
    pub fn contributing_members(&self) -> usize {
        self.members.iter().filter(|m| !m.is_empty()).count()
    }
}

/// Assemble the Dyson orbital of `final_state` (index `final_index` in its
/// table) with the wave packet at probe time `t_p`.
pub fn assemble_dyson(final_state: &ElectronicState, final_index: usize, wp: &WavePacket, t_p: f64) -> Result<DysonOrbital> {
    let members = wp
        .members()
        .iter()
        .map(|m| state_overlap_map(final_state, &m.state))
        .collect::<Result<Vec<_>>>()?;
    let mut merged: BTreeMap<(usize, Spin), Complex64> = BTreeMap::new();
    for (i, overlaps) in members.iter().enumerate() {
        let phase = wp.phase(i, t_p)?;
        for ch in overlaps {
            *merged.entry((ch.orbital, ch.spin)).or_insert(Complex64::new(0.0, 0.0)) += phase * ch.coefficient;
        }
    }
    let terms = merged
        .into_iter()
        .filter(|(_, c)| c.norm() >= PRUNE_THRESHOLD)
        .map(|((orbital, spin), coefficient)| DysonTerm { coefficient, orbital, spin })
        .collect();
    Ok(DysonOrbital { terms, final_index, t_p, members })
}
