use std::collections::BTreeMap;

use super::{ConfigurationStateFunction, SlaterDeterminant};
use crate::{Error, Result};

/// Eigenstate as a (possibly truncated) CSF expansion. Energy in hartree.
#[derive(Debug, Clone, PartialEq)]
pub struct ElectronicState {
    energy: f64,
    expansion: Vec<(f64, ConfigurationStateFunction)>,
    n_electrons: usize,
    n_orbitals: usize,
}

impl ElectronicState {
    pub fn new(energy: f64, expansion: Vec<(f64, ConfigurationStateFunction)>) -> Result<Self> {
        let first = expansion
            .first()
            .ok_or_else(|| Error::InvalidInput("electronic state with empty expansion".into()))?;
        let n_electrons = first.1.n_electrons();
        let n_orbitals = first.1.n_orbitals();
        for (_, csf) in &expansion {
            if csf.n_electrons() != n_electrons {
                return Err(Error::InvalidInput(format!(
                    "CSFs with {} and {} electrons in one state",
                    n_electrons,
                    csf.n_electrons()
                )));
            }
            if csf.n_orbitals() != n_orbitals {
                return Err(Error::BasisMismatch(n_orbitals, csf.n_orbitals()));
            }
        }
        let norm2: f64 = expansion.iter().map(|(c, _)| c * c).sum();
        if norm2 > 1.0 + 1e-6 {
            return Err(Error::InvalidInput(format!("state coefficients have squared norm {norm2} > 1")));
        }
        if !energy.is_finite() {
            return Err(Error::InvalidInput("state energy must be finite".into()));
        }
        Ok(Self { energy, expansion, n_electrons, n_orbitals })
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn expansion(&self) -> &[(f64, ConfigurationStateFunction)] {
        &self.expansion
    }

    pub fn n_electrons(&self) -> usize {
        self.n_electrons
    }

    pub fn n_orbitals(&self) -> usize {
        self.n_orbitals
    }

    pub fn coefficient_norm2(&self) -> f64 {
        self.expansion.iter().map(|(c, _)| c * c).sum()
    }

    /// Copy with the CSF coefficients scaled to unit norm.
    pub fn renormalized(&self) -> Self {
        let n = self.coefficient_norm2().sqrt();
        let mut out = self.clone();
        if n > 0.0 {
            out.expansion.iter_mut().for_each(|(c, _)| *c /= n);
        }
        out
    }

    /// Determinant expansion with contributions from all CSFs merged.
    pub fn determinants(&self) -> BTreeMap<SlaterDeterminant, f64> {
        let mut out = BTreeMap::new();
        for (c, csf) in &self.expansion {
            for (d_coeff, det) in csf.expansion() {
                *out.entry(*det).or_insert(0.0) += c * d_coeff;
            }
        }
        out.retain(|_, v| v.abs() > 1e-14);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_mixed_electron_counts_and_overnormalized() {
        let a = ConfigurationStateFunction::excitation(3, 2, &[1], &[], None, None).unwrap();
        let b = ConfigurationStateFunction::excitation(3, 2, &[], &[], None, None).unwrap();
        assert!(ElectronicState::new(0.0, vec![(0.5, a.clone()), (0.5, b)]).is_err());
        assert!(ElectronicState::new(0.0, vec![(1.1, a.clone())]).is_err());
        assert!(ElectronicState::new(0.0, vec![]).is_err());
        let s = ElectronicState::new(0.1, vec![(-0.95, a)]).unwrap();
        assert!((s.renormalized().coefficient_norm2() - 1.0).abs() < 1e-15);
    }
}
