use super::Vec3;
use crate::{Error, Result};

/// Probe pulse with intensity profile `I0 exp(-4 ln2 ((t - t_p)/tau)^2)`.
/// Atomic units throughout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbePulse {
    pub photon_energy: f64,
    pub polarization: Vec3,
    /// FWHM of the intensity profile.
    pub duration: f64,
    pub peak_intensity: f64,
    pub arrival: f64,
}

impl ProbePulse {
    pub fn new(photon_energy: f64, polarization: Vec3, duration: f64, peak_intensity: f64, arrival: f64) -> Result<Self> {
        if !(photon_energy > 0.0 && photon_energy.is_finite()) {
            return Err(Error::InvalidInput(format!("photon energy {photon_energy} must be positive")));
        }
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(Error::InvalidInput(format!("pulse duration {duration} must be positive")));
        }
        if (polarization.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!(
                "polarization {:?} is not a unit vector",
                polarization.as_slice()
            )));
        }
        if !(peak_intensity >= 0.0 && peak_intensity.is_finite()) {
            return Err(Error::InvalidInput("peak intensity must be non-negative".into()));
        }
        Ok(Self { photon_energy, polarization, duration, peak_intensity, arrival })
    }

    pub fn with_arrival(&self, arrival: f64) -> Self {
        Self { arrival, ..*self }
    }

    pub fn with_duration(&self, duration: f64) -> Result<Self> {
        Self::new(self.photon_energy, self.polarization, duration, self.peak_intensity, self.arrival)
    }

    pub fn intensity(&self, t: f64) -> f64 {
        let x = (t - self.arrival) / self.duration;
        self.peak_intensity * (-4.0 * std::f64::consts::LN_2 * x * x).exp()
    }
}
