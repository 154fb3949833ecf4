//! Assembly of a runnable scenario from a [`ScenarioConfig`]: orbitals,
//! wave packet, final states, pulse and the optional ground-state reference.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Deserialize;

use crate::huckel::{build_pentacene_graph, huckel_orbitals, koopmans_binding_energies, HuckelOrbitals};
use crate::io::config::{CiNormalization, OrbitalSource, ScenarioConfig};
use crate::io::cube::read_cube;
use crate::io::table::{parse_final_state_table, read_final_state_table, FinalStateTable, TableBasis};
use crate::model::{
    ConfigurationStateFunction, ElectronicState, GaussianPrimitive, MolecularOrbital, OrbitalLabel, OrbitalSet,
    ProbePulse, Vec3, WavePacket, WavePacketMember,
};
use crate::signal::{ground_state_scenario, SignalModel};
use crate::units::{angstrom_to_bohr, ev_to_hartree, fs_to_au, hartree_to_ev};
use crate::{Error, Result};

pub const PENTACENE_CONFIG: &str = include_str!("../data/pentacene.toml");
pub const PENTACENE_TABLE: &str = include_str!("../data/pentacene_table1.tsv");

const BUILTIN_TABLE: &str = "builtin:pentacene";

#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    /// SHA-256 of the canonical config serialization.
    pub digest: String,
    pub orbitals: OrbitalSet,
    /// Present for the built-in Hückel source.
    pub huckel: Option<HuckelOrbitals>,
    /// `(atomic number, position in bohr)`.
    pub nuclei: Vec<(u32, Vec3)>,
    pub wave_packet: WavePacket,
    pub table: FinalStateTable,
    pub pulse: ProbePulse,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LcaoFile {
    n_occupied: usize,
    orbitals: Vec<LcaoOrbital>,
    #[serde(default)]
    atoms: Vec<LcaoAtom>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LcaoOrbital {
    primitives: Vec<LcaoPrimitive>,
    coefficients: Vec<f64>,
}

/// Centers in bohr.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LcaoPrimitive {
    center: [f64; 3],
    exponent: f64,
    powers: [u32; 3],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LcaoAtom {
    number: u32,
    position: [f64; 3],
}

fn resolve(base: &Path, p: &str) -> PathBuf {
    let p = Path::new(p);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

type LoadedOrbitals = (OrbitalSet, Option<HuckelOrbitals>, Vec<(u32, Vec3)>);

fn load_orbitals(source: &OrbitalSource, base: &Path) -> Result<LoadedOrbitals> {
    match source {
        OrbitalSource::BuiltinHuckel { exponent } => {
            let graph = build_pentacene_graph();
            let h = huckel_orbitals(&graph, *exponent)?;
            let nuclei = graph.nuclei().into_iter().map(|(z, p)| (z, p.map(angstrom_to_bohr))).collect();
            Ok((h.set.clone(), Some(h), nuclei))
        }
        OrbitalSource::CubeFiles { files, n_occupied } => {
            let mut orbitals = Vec::with_capacity(files.len());
            let mut nuclei = Vec::new();
            for (i, f) in files.iter().enumerate() {
                let cube = read_cube(&resolve(base, f))?;
                if i == 0 {
                    nuclei = cube.atoms.iter().map(|a| (a.number, a.position)).collect();
                }
                orbitals.push(MolecularOrbital::grid(OrbitalLabel::from_index(i, *n_occupied), cube.grid));
            }
            Ok((OrbitalSet::new(orbitals, *n_occupied)?, None, nuclei))
        }
        OrbitalSource::Lcao { path } => {
            let path = resolve(base, path);
            let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            let file: LcaoFile = serde_json::from_str(&text)
                .map_err(|e| Error::Parse { path: path.display().to_string(), line: e.line(), message: e.to_string() })?;
            let orbitals = file
                .orbitals
                .into_iter()
                .enumerate()
                .map(|(i, o)| {
                    let prims = o
                        .primitives
                        .iter()
                        .map(|p| GaussianPrimitive::new(Vec3::from(p.center), p.exponent, p.powers))
                        .collect::<Result<Vec<_>>>()?;
                    MolecularOrbital::lcao(OrbitalLabel::from_index(i, file.n_occupied), prims, o.coefficients)
                })
                .collect::<Result<Vec<_>>>()?;
            let nuclei = file.atoms.iter().map(|a| (a.number, Vec3::from(a.position))).collect();
            Ok((OrbitalSet::new(orbitals, file.n_occupied)?, None, nuclei))
        }
    }
}

fn label_indices(labels: &[String], orbitals: &OrbitalSet) -> Result<Vec<usize>> {
    labels.iter().map(|l| orbitals.index_of(l.parse()?)).collect()
}

impl Scenario {
    /// Relative paths in `config` resolve against `base_dir`.
    pub fn from_config(config: ScenarioConfig, base_dir: &Path) -> Result<Self> {
        config.validate()?;
        let digest = config.digest()?;
        let (orbitals, huckel, nuclei) = load_orbitals(&config.orbitals, base_dir)?;
        let n = orbitals.len();
        let n_occ = orbitals.n_occupied();

        let wp_spec = &config.wave_packet;
        let members = wp_spec
            .members
            .iter()
            .map(|m| {
                let expansion = m
                    .terms
                    .iter()
                    .map(|t| {
                        let coupling = t.coupling.as_deref().map(str::parse).transpose()?;
                        let csf = ConfigurationStateFunction::excitation(
                            n,
                            n_occ,
                            &label_indices(&t.holes, &orbitals)?,
                            &label_indices(&t.particles, &orbitals)?,
                            coupling,
                            None,
                        )?;
                        Ok((t.coefficient, csf))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let energy = ev_to_hartree(m.energy_ev);
                Ok(WavePacketMember {
                    coefficient: Complex64::new(m.coefficient[0], m.coefficient[1]),
                    energy,
                    state: ElectronicState::new(energy, expansion)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let wave_packet = WavePacket::new(members, fs_to_au(wp_spec.t0_fs))?;

        let basis = TableBasis { n_orbitals: n, n_occupied: n_occ };
        let mut table = if config.final_states.table == BUILTIN_TABLE {
            parse_final_state_table(PENTACENE_TABLE, BUILTIN_TABLE, basis)?
        } else {
            read_final_state_table(&resolve(base_dir, &config.final_states.table), basis)?
        };
        if config.final_states.normalization == CiNormalization::Renormalize {
            table = table.renormalized();
        }

        let p = &config.pulse;
        let pulse = ProbePulse::new(
            ev_to_hartree(p.photon_energy_ev),
            Vec3::from(p.polarization),
            fs_to_au(p.duration_fs),
            p.peak_intensity,
            0.0,
        )?;

        let mean_ev = hartree_to_ev(wave_packet.mean_energy());
        log::info!("<E> = {mean_ev:.6} eV");
        if let Some(from_table) = table.mean_energy_from_omega(p.photon_energy_ev) {
            log::info!("<E> implied by the printed Omega of the first final state: {from_table:.6} eV");
        }
        for m in table.omega_mismatches(p.photon_energy_ev, mean_ev) {
            log::warn!(
                "final state {}: printed Omega {:.3} eV, computed {:.3} eV",
                m.index,
                m.printed_ev,
                m.computed_ev
            );
        }

        Ok(Self { config, digest, orbitals, huckel, nuclei, wave_packet, table, pulse })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let config = ScenarioConfig::read(path)?;
        Self::from_config(config, path.parent().unwrap_or(Path::new(".")))
    }

    /// The shipped pentacene scenario.
    pub fn pentacene() -> Result<Self> {
        Self::from_config(ScenarioConfig::from_toml(PENTACENE_CONFIG)?, Path::new("."))
    }

    pub fn finals(&self) -> Vec<(usize, ElectronicState)> {
        self.table.states.iter().map(|s| (s.index, s.state.clone())).collect()
    }

    pub fn signal_model(&self) -> Result<SignalModel> {
        SignalModel::new(
            self.pulse,
            self.wave_packet.clone(),
            self.finals(),
            self.orbitals.clone(),
            self.config.pulse.prefactor,
        )
    }

    /// Beat period of the first two members (a.u.).
    pub fn period(&self) -> Result<f64> {
        self.wave_packet
            .two_level_period()
            .ok_or_else(|| Error::InvalidInput("wave packet has no beat period".into()))
    }

    /// Configured probe times (a.u.), or `{0, T/4, T/2, 3T/4}`.
    pub fn arrival_times(&self) -> Result<Vec<f64>> {
        match &self.config.pulse.arrival_fs {
            Some(ts) => Ok(ts.iter().map(|t| fs_to_au(*t)).collect()),
            None => {
                let t = self.period()?;
                Ok((0..4).map(|k| t * k as f64 / 4.0).collect())
            }
        }
    }

    /// Binding energies (eV, HOMO first) of the ground-state reference.
    pub fn ground_binding_energies(&self) -> Result<Vec<f64>> {
        let g = self
            .config
            .ground_state
            .as_ref()
            .ok_or_else(|| Error::Config("no ground_state section".into()))?;
        if let Some(be) = &g.binding_energies_ev {
            return Ok(be.clone());
        }
        let huckel = self
            .huckel
            .as_ref()
            .ok_or_else(|| Error::Unsupported("binding-energy anchors need Hückel orbital energies".into()))?;
        let a = (g.anchors[0].label.parse()?, g.anchors[0].binding_ev);
        let b = (g.anchors[1].label.parse()?, g.anchors[1].binding_ev);
        let mut be = koopmans_binding_energies(huckel, a, b)?;
        be.reverse();
        Ok(be)
    }

    /// Ground-state reference with Koopmans one-hole final states.
    pub fn ground_state_model(&self) -> Result<SignalModel> {
        let (wp, finals) = ground_state_scenario(&self.orbitals, &self.ground_binding_energies()?)?;
        SignalModel::new(self.pulse, wp, finals, self.orbitals.clone(), self.config.pulse.prefactor)
    }
}
