use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;

use super::{orbital_ft, MomentumGrid};
use crate::model::OrbitalSet;
use crate::Result;

/// Transform of one orbital over one momentum grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumAmplitude {
    orbital: usize,
    grid: u64,
    values: Vec<Complex64>,
}

impl MomentumAmplitude {
    pub fn new(orbital: usize, grid: u64, values: Vec<Complex64>) -> Self {
        Self { orbital, grid, values }
    }

    pub fn orbital(&self) -> usize {
        self.orbital
    }

    pub fn grid_fingerprint(&self) -> u64 {
        self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
}

/// Amplitudes keyed by `(orbital index, grid fingerprint)`. Time enters only
/// through Dyson coefficients, so one entry serves every probe delay.
#[derive(Debug, Default)]
pub struct AmplitudeCache {
    entries: HashMap<(usize, u64), Arc<MomentumAmplitude>>,
    misses: usize,
}

impl AmplitudeCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_compute(&mut self, orbitals: &OrbitalSet, index: usize, grid: &MomentumGrid) -> Result<Arc<MomentumAmplitude>> {
        let key = (index, grid.fingerprint());
        if let Some(hit) = self.entries.get(&key) {
            return Ok(Arc::clone(hit));
        }
        self.misses += 1;
        let amp = Arc::new(orbital_ft(orbitals.get(index)?, index, grid)?);
        self.entries.insert(key, Arc::clone(&amp));
        Ok(amp)
    }

    /// Number of transforms actually computed.
    pub fn misses(&self) -> usize {
        self.misses
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn clear(&mut self) {
        self.entries.clear();
    }
}
