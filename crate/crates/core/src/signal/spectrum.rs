use super::{PmmEvaluator, ProbabilityModel, SignalModel};
use crate::momentum::MomentumGrid;
use crate::quadrature::SphericalRule;
use crate::{Error, Result};

/// Which initial state a spectrum belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpectrumKind {
    GroundState,
    Excited,
}

impl SpectrumKind {
    pub fn tag(self) -> &'static str {
        match self {
            SpectrumKind::GroundState => "S0",
            SpectrumKind::Excited => "excited",
        }
    }
}

/// `S(eps) = q \int P(q n) dOmega` at `q = sqrt(2 eps)`; energies in hartree.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub energies: Vec<f64>,
    pub values: Vec<f64>,
    pub kind: SpectrumKind,
    pub t_p: f64,
    pub degree: usize,
}

impl Spectrum {
    pub fn peak(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }
}

/// Spectra at several probe times. The angular integral uses the product
/// rule of the given degree.
pub fn angle_integrated_spectra(
    model: &SignalModel,
    energies: &[f64],
    times: &[f64],
    degree: usize,
    kind: ProbabilityModel,
    tag: SpectrumKind,
) -> Result<Vec<Spectrum>> {
    if energies.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::InvalidInput("spectrum energies must be positive".into()));
    }
    let rule = SphericalRule::new(degree)?;
    let mut values = vec![Vec::with_capacity(energies.len()); times.len()];
    for &e in energies {
        let ev = PmmEvaluator::new(model, MomentumGrid::sphere(e, &rule)?, kind)?;
        let q = (2.0 * e).sqrt();
        for (t, out) in times.iter().zip(&mut values) {
            let p = ev.evaluate(*t);
            let integral: f64 = p.iter().zip(rule.weights()).map(|(p, w)| p * w).sum();
            out.push(q * integral);
        }
    }
    Ok(times
        .iter()
        .zip(values)
        .map(|(&t_p, values)| Spectrum { energies: energies.to_vec(), values, kind: tag, t_p, degree })
        .collect())
}

pub fn angle_integrated_spectrum(
    model: &SignalModel,
    energies: &[f64],
    t_p: f64,
    degree: usize,
    kind: ProbabilityModel,
    tag: SpectrumKind,
) -> Result<Spectrum> {
    Ok(angle_integrated_spectra(model, energies, &[t_p], degree, kind, tag)?.remove(0))
}
