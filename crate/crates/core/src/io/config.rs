//! Scenario configuration (TOML). Unknown keys are rejected; physical values
//! are range-checked by [`ScenarioConfig::validate`].

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use crate::signal::PrefactorMode;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub orbitals: OrbitalSource,
    pub wave_packet: WavePacketSpec,
    pub final_states: FinalStatesSpec,
    pub pulse: PulseSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_state: Option<GroundStateSpec>,
    #[serde(default)]
    pub outputs: OutputSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case", deny_unknown_fields)]
pub enum OrbitalSource {
    /// Hückel pentacene over p_y Gaussians of the given exponent (bohr^-2).
    BuiltinHuckel {
        #[serde(default = "default_exponent")]
        exponent: f64,
    },
    /// One cube file per orbital in energy order.
    CubeFiles { files: Vec<String>, n_occupied: usize },
    /// JSON file with `n_occupied` and `orbitals: [{primitives, coefficients}]`.
    Lcao { path: String },
}

fn default_exponent() -> f64 {
    crate::huckel::DEFAULT_P_EXPONENT
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WavePacketSpec {
    #[serde(default)]
    pub t0_fs: f64,
    pub members: Vec<MemberSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemberSpec {
    /// `[re, im]` of C_I.
    pub coefficient: [f64; 2],
    pub energy_ev: f64,
    pub terms: Vec<CsfTermSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsfTermSpec {
    pub coefficient: f64,
    #[serde(default)]
    pub holes: Vec<String>,
    #[serde(default)]
    pub particles: Vec<String>,
    /// Genealogical path such as `ud`; omitted when unique.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CiNormalization {
    /// Coefficients exactly as tabulated.
    #[default]
    AsPrinted,
    /// Each final state rescaled to unit norm.
    Renormalize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FinalStatesSpec {
    /// Path relative to the config file, or `builtin:pentacene`.
    pub table: String,
    #[serde(default)]
    pub normalization: CiNormalization,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSpec {
    pub photon_energy_ev: f64,
    pub polarization: [f64; 3],
    pub duration_fs: f64,
    #[serde(default = "one")]
    pub peak_intensity: f64,
    /// Probe arrival times; defaults to `{0, T/4, T/2, 3T/4}`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arrival_fs: Option<Vec<f64>>,
    #[serde(default)]
    pub prefactor: PrefactorMode,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundStateSpec {
    /// Two `(label, binding energy eV)` anchors for an affine map of orbital
    /// energies, used when `binding_energies_ev` is absent.
    #[serde(default)]
    pub anchors: Vec<AnchorSpec>,
    /// Explicit binding energies, HOMO first.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub binding_energies_ev: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnchorSpec {
    pub label: String,
    pub binding_ev: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    pub pmm_energies_ev: Vec<f64>,
    pub pmm_grid: usize,
    pub spectrum_range_ev: [f64; 2],
    pub spectrum_step_ev: f64,
    pub spectrum_degree: usize,
    pub density_spacing_angstrom: f64,
    pub density_padding_angstrom: f64,
    pub energy_resolution_ev: f64,
    pub energy_samples: usize,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            pmm_energies_ev: vec![99.0],
            pmm_grid: 201,
            spectrum_range_ev: [88.0, 102.0],
            spectrum_step_ev: 0.1,
            spectrum_degree: 127,
            density_spacing_angstrom: 0.15,
            density_padding_angstrom: 4.0,
            energy_resolution_ev: 1.0,
            energy_samples: 5,
        }
    }
}

fn check(ok: bool, message: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Config(message()))
    }
}

fn positive(x: f64) -> bool {
    x > 0.0 && x.is_finite()
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            e => e,
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Hex SHA-256 of the canonical serialization.
    pub fn digest(&self) -> Result<String> {
        Ok(hex::encode(Sha256::digest(self.to_toml()?.as_bytes())))
    }

    pub fn validate(&self) -> Result<()> {
        match &self.orbitals {
            OrbitalSource::BuiltinHuckel { exponent } => {
                check(positive(*exponent), || format!("orbital exponent {exponent} must be positive"))?
            }
            OrbitalSource::CubeFiles { files, n_occupied } => {
                check(!files.is_empty(), || "cube-files source lists no files".into())?;
                check(*n_occupied <= files.len(), || "n_occupied exceeds the number of cube files".into())?;
            }
            OrbitalSource::Lcao { path } => check(!path.is_empty(), || "lcao source needs a path".into())?,
        }

        let wp = &self.wave_packet;
        check(wp.t0_fs.is_finite(), || "t0_fs must be finite".into())?;
        check(!wp.members.is_empty(), || "wave packet has no members".into())?;
        for (i, m) in wp.members.iter().enumerate() {
            check(m.coefficient.iter().all(|c| c.is_finite()), || format!("member {i}: coefficient not finite"))?;
            check(m.energy_ev.is_finite(), || format!("member {i}: energy not finite"))?;
            check(!m.terms.is_empty(), || format!("member {i}: no CSF terms"))?;
            for t in &m.terms {
                check(t.coefficient.is_finite(), || format!("member {i}: CSF coefficient not finite"))?;
            }
        }

        let p = &self.pulse;
        check(positive(p.photon_energy_ev), || format!("photon energy {} eV must be positive", p.photon_energy_ev))?;
        check(positive(p.duration_fs), || format!("pulse duration {} fs must be positive", p.duration_fs))?;
        check(positive(p.peak_intensity), || "peak intensity must be positive".into())?;
        let norm = p.polarization.iter().map(|x| x * x).sum::<f64>().sqrt();
        check((norm - 1.0).abs() < 1e-9, || format!("polarization has length {norm}, expected 1"))?;
        if let Some(ts) = &p.arrival_fs {
            check(!ts.is_empty() && ts.iter().all(|t| t.is_finite()), || "arrival_fs must be a non-empty finite list".into())?;
        }

        if let Some(g) = &self.ground_state {
            match &g.binding_energies_ev {
                Some(be) => check(!be.is_empty() && be.iter().all(|e| positive(*e)), || {
                    "binding energies must be positive".into()
                })?,
                None => check(g.anchors.len() == 2 && g.anchors.iter().all(|a| positive(a.binding_ev)), || {
                    "ground state needs two positive binding-energy anchors or explicit energies".into()
                })?,
            }
        }

        let o = &self.outputs;
        check(!o.pmm_energies_ev.is_empty() && o.pmm_energies_ev.iter().all(|e| positive(*e)), || {
            "pmm energies must be positive".into()
        })?;
        check(o.pmm_grid >= 3, || "pmm grid needs at least 3 samples per axis".into())?;
        let [lo, hi] = o.spectrum_range_ev;
        check(positive(lo) && hi > lo && hi.is_finite(), || format!("bad spectrum range [{lo}, {hi}]"))?;
        check(positive(o.spectrum_step_ev), || "spectrum step must be positive".into())?;
        check(
            (1..=crate::quadrature::MAX_SPHERICAL_DEGREE).contains(&o.spectrum_degree),
            || format!("spectrum degree {} unsupported", o.spectrum_degree),
        )?;
        check(positive(o.density_spacing_angstrom), || "density spacing must be positive".into())?;
        check(o.density_padding_angstrom >= 0.0 && o.density_padding_angstrom.is_finite(), || {
            "density padding must be non-negative".into()
        })?;
        check(positive(o.energy_resolution_ev), || "energy resolution must be positive".into())?;
        check(o.energy_samples >= 2, || "energy averaging needs at least 2 samples".into())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn shipped() -> ScenarioConfig {
        ScenarioConfig::from_toml(crate::scenario::PENTACENE_CONFIG).unwrap()
    }

    #[test]
    fn shipped_config_parses() {
        let c = shipped();
        assert_eq!(c.wave_packet.members.len(), 2);
        assert_eq!(c.pulse.photon_energy_ev, 100.0);
        assert_eq!(c.final_states.normalization, CiNormalization::AsPrinted);
    }

    #[test]
    fn round_trip() {
        let c = shipped();
        assert_eq!(ScenarioConfig::from_toml(&c.to_toml().unwrap()).unwrap(), c);
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = format!("{}\n[extra]\nx = 1\n", crate::scenario::PENTACENE_CONFIG);
        assert!(matches!(ScenarioConfig::from_toml(&text), Err(Error::Config(_))));
        let text = crate::scenario::PENTACENE_CONFIG.replace("duration_fs = 0.5", "duration_fs = 0.5\nwidth = 2");
        assert!(ScenarioConfig::from_toml(&text).is_err());
    }

    #[test]
    fn ranges_checked() {
        for (from, to) in [
            ("duration_fs = 0.5", "duration_fs = -0.5"),
            ("photon_energy_ev = 100.0", "photon_energy_ev = 0.0"),
            ("polarization = [0.0, 1.0, 0.0]", "polarization = [0.0, 1.0, 0.5]"),
        ] {
            let text = crate::scenario::PENTACENE_CONFIG.replace(from, to);
            assert_ne!(text, crate::scenario::PENTACENE_CONFIG, "{from}");
            assert!(ScenarioConfig::from_toml(&text).is_err(), "{to}");
        }
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(shipped().digest().unwrap(), shipped().digest().unwrap());
        assert_eq!(shipped().digest().unwrap().len(), 64);
    }

    proptest! {
        #[test]
        fn round_trip_with_overrides(tau in 0.01f64..20.0, omega in 10.0f64..500.0, grid in 3usize..400,
                                     ts in proptest::collection::vec(-50.0f64..50.0, 1..6)) {
            let mut c = shipped();
            c.pulse.duration_fs = tau;
            c.pulse.photon_energy_ev = omega;
            c.pulse.arrival_fs = Some(ts);
            c.outputs.pmm_grid = grid;
            prop_assert_eq!(ScenarioConfig::from_toml(&c.to_toml().unwrap()).unwrap(), c);
        }
    }
}
