use std::path::{Path, PathBuf};

use attopmm::density::{density_timeseries, DensityGrid};
use attopmm::io::config::ScenarioConfig;
use attopmm::io::export::{write_density, write_pmm, write_spectra, ExportMeta};
use attopmm::model::OrbitalLabel;
use attopmm::scenario::Scenario;
use attopmm::signal::{
    angle_integrated_spectra, energy_average_pmm, envelope_short, pmm_series, Pmm, ProbabilityModel, SignalModel,
    SpectrumKind,
};
use attopmm::units::{au_to_fs, ev_to_hartree, fs_to_au, hartree_to_ev};
use attopmm::{Error, Result};

use crate::{Cli, Command, Figure, Overrides};

pub fn run(cli: &Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::InvalidInput("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    }
    let overrides = match &cli.command {
        Command::Validate { overrides }
        | Command::Pmm { overrides, .. }
        | Command::Spectrum { overrides, .. }
        | Command::Density { overrides }
        | Command::Dyson { overrides, .. }
        | Command::ReproduceFigure { overrides, .. } => overrides,
    };
    let scenario = load(cli.config.as_deref(), overrides)?;
    if cli.validate {
        println!("config ok sha256 {}", scenario.digest);
        return Ok(());
    }
    let out = Output::new(&cli.out)?;
    match &cli.command {
        Command::Validate { .. } => validate(&scenario),
        Command::Pmm { long, average, .. } => {
            let kind = if *long { ProbabilityModel::Long } else { ProbabilityModel::Short };
            pmm_maps(&scenario, &out, Path::new(""), kind, *average)
        }
        Command::Spectrum { long, .. } => {
            let kind = if *long { ProbabilityModel::Long } else { ProbabilityModel::Short };
            let times = scenario.arrival_times()?;
            for (k, t) in times.iter().enumerate() {
                spectra(&scenario, &out, Path::new(""), &format!("spectrum_t{k}.dat"), *t, kind)?;
            }
            Ok(())
        }
        Command::Density { .. } => density(&scenario, &out, Path::new("")),
        Command::Dyson { final_index, overrides } => {
            let t = single(&overrides.tp, "--tp")?.unwrap_or(0.0);
            dyson(&scenario, *final_index, fs_to_au(t))
        }
        Command::ReproduceFigure { figure, overrides } => reproduce(&scenario, &out, *figure, overrides),
    }
}

fn single(values: &Option<Vec<f64>>, flag: &str) -> Result<Option<f64>> {
    match values.as_deref() {
        None => Ok(None),
        Some([v]) => Ok(Some(*v)),
        Some(_) => Err(Error::InvalidInput(format!("{flag} takes a single value here"))),
    }
}

/// Applies `o` to the configuration and validates the result. Relative
/// paths resolve against the config file's directory.
fn load(path: Option<&Path>, o: &Overrides) -> Result<Scenario> {
    let (mut config, base) = match path {
        Some(p) => (ScenarioConfig::read(p)?, p.parent().map(Path::to_path_buf).unwrap_or_default()),
        None => (ScenarioConfig::from_toml(attopmm::scenario::PENTACENE_CONFIG)?, PathBuf::from(".")),
    };
    if let Some(e) = &o.energy {
        config.outputs.pmm_energies_ev = e.clone();
    }
    if let Some(t) = &o.tp {
        config.pulse.arrival_fs = Some(t.clone());
    }
    if let Some(taus) = &o.tau {
        // fig6 reads the whole list; elsewhere the first entry is the pulse.
        config.pulse.duration_fs = *taus.first().ok_or_else(|| Error::InvalidInput("--tau needs a value".into()))?;
    }
    if let Some(n) = o.grid {
        config.outputs.pmm_grid = n;
    }
    if let Some(r) = o.resolution {
        config.outputs.energy_resolution_ev = r;
    }
    if let Some(n) = o.energy_samples {
        config.outputs.energy_samples = n;
    }
    if let Some(d) = o.degree {
        config.outputs.spectrum_degree = d;
    }
    if let Some(s) = o.step {
        config.outputs.spectrum_step_ev = s;
    }
    if let Some(r) = &o.range {
        config.outputs.spectrum_range_ev = [r[0], r[1]];
    }
    if let Some(h) = o.spacing {
        config.outputs.density_spacing_angstrom = h;
    }
    if let Some(p) = o.padding {
        config.outputs.density_padding_angstrom = p;
    }
    Scenario::from_config(config, &base)
}

struct Output {
    root: PathBuf,
}

impl Output {
    fn new(root: &Path) -> Result<Self> {
        std::fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
        Ok(Self { root: root.to_path_buf() })
    }

    fn path(&self, sub: &Path, name: &str) -> Result<PathBuf> {
        let dir = self.root.join(sub);
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        Ok(dir.join(name))
    }
}

fn meta(s: &Scenario, duration: f64) -> ExportMeta {
    ExportMeta {
        config_digest: s.digest.clone(),
        prefactor: s.config.pulse.prefactor,
        photon_energy_ev: s.config.pulse.photon_energy_ev,
        duration_fs: au_to_fs(duration),
    }
}

fn log_channels(model: &SignalModel, pmm: &Pmm) {
    let skipped: Vec<usize> =
        model.channels().iter().map(|c| c.final_index).filter(|f| !pmm.channels.contains(f)).collect();
    log::info!(
        "{:.3} eV: channels {:?}, truncated {:?}",
        hartree_to_ev(pmm.energy),
        pmm.channels,
        skipped
    );
}

fn write_maps(s: &Scenario, model: &SignalModel, out: &Output, sub: &Path, stem: &str, maps: &[Pmm]) -> Result<()> {
    let m = meta(s, model.pulse().duration);
    if let Some(first) = maps.first() {
        log_channels(model, first);
    }
    for (k, pmm) in maps.iter().enumerate() {
        let path = out.path(sub, &format!("{stem}_t{k}.dat"))?;
        write_pmm(&path, pmm, &m)?;
        println!("{}", path.display());
    }
    Ok(())
}

fn maps_at(s: &Scenario, model: &SignalModel, eps: f64, kind: ProbabilityModel, average: bool) -> Result<Vec<Pmm>> {
    let o = &s.config.outputs;
    let times = s.arrival_times()?;
    if average {
        energy_average_pmm(model, eps, ev_to_hartree(o.energy_resolution_ev), o.energy_samples, &times, o.pmm_grid, kind)
    } else {
        pmm_series(model, eps, &times, o.pmm_grid, kind)
    }
}

fn pmm_maps(s: &Scenario, out: &Output, sub: &Path, kind: ProbabilityModel, average: bool) -> Result<()> {
    let model = s.signal_model()?;
    for e in &s.config.outputs.pmm_energies_ev {
        let maps = maps_at(s, &model, ev_to_hartree(*e), kind, average)?;
        write_maps(s, &model, out, sub, &format!("pmm_e{e:.2}"), &maps)?;
    }
    Ok(())
}

fn spectrum_energies(s: &Scenario) -> Vec<f64> {
    let o = &s.config.outputs;
    let [lo, hi] = o.spectrum_range_ev;
    let n = ((hi - lo) / o.spectrum_step_ev + 1e-9).floor() as usize + 1;
    (0..n).map(|k| ev_to_hartree(lo + o.spectrum_step_ev * k as f64)).collect()
}

fn spectra(s: &Scenario, out: &Output, sub: &Path, name: &str, t_p: f64, kind: ProbabilityModel) -> Result<()> {
    let energies = spectrum_energies(s);
    let degree = s.config.outputs.spectrum_degree;
    let mut curves = Vec::new();
    if s.config.ground_state.is_some() {
        let gs = s.ground_state_model()?;
        curves.extend(angle_integrated_spectra(&gs, &energies, &[t_p], degree, kind, SpectrumKind::GroundState)?);
    } else {
        log::info!("no ground_state section: S0 curve omitted");
    }
    let model = s.signal_model()?;
    curves.extend(angle_integrated_spectra(&model, &energies, &[t_p], degree, kind, SpectrumKind::Excited)?);
    let path = out.path(sub, name)?;
    write_spectra(&path, &curves, &meta(s, model.pulse().duration))?;
    println!("{}", path.display());
    Ok(())
}

fn density(s: &Scenario, out: &Output, sub: &Path) -> Result<()> {
    let o = &s.config.outputs;
    let grid = DensityGrid::around_nuclei(&s.nuclei, o.density_padding_angstrom, o.density_spacing_angstrom)?;
    let frames = density_timeseries(&s.wave_packet, &s.orbitals, &grid, &s.arrival_times()?)?;
    let m = meta(s, s.pulse.duration);
    for (k, f) in frames.iter().enumerate() {
        log::info!("t = {:.4} fs: +{:.6e} / {:.6e} electrons", au_to_fs(f.time), f.positive, f.negative);
        let path = out.path(sub, &format!("density_t{k}.cube"))?;
        write_density(&path, f, &s.nuclei, &m)?;
        println!("{}", path.display());
    }
    Ok(())
}

fn validate(s: &Scenario) -> Result<()> {
    let model = s.signal_model()?;
    let p = &s.config.pulse;
    println!("config_sha256 {}", s.digest);
    println!("period_fs {:.6}", au_to_fs(s.period()?));
    println!("mean_energy_ev {:.6}", hartree_to_ev(s.wave_packet.mean_energy()));
    println!("photon_energy_ev {:.6}", p.photon_energy_ev);
    println!("duration_fs {:.6}", p.duration_fs);
    let arrivals: Vec<String> = s.arrival_times()?.iter().map(|t| format!("{:.6}", au_to_fs(*t))).collect();
    println!("arrival_fs {}", arrivals.join(" "));
    let eps = ev_to_hartree(s.config.outputs.pmm_energies_ev[0]);
    println!(
        "{:>5} {:>12} {:>12} {:>12} {:>8} {:>8} {:>12}",
        "final",
        "E_F_eV",
        "Omega_eV",
        "printed_eV",
        "members",
        "beating",
        format!("env@{:.1}eV", hartree_to_ev(eps))
    );
    for c in model.channels() {
        let printed = s
            .table
            .states
            .iter()
            .find(|f| f.index == c.final_index)
            .and_then(|f| f.omega_ev)
            .map_or("-".to_string(), |w| format!("{w:.6}"));
        let members: Vec<String> =
            c.members.iter().enumerate().filter(|(_, m)| !m.is_empty()).map(|(i, _)| (i + 1).to_string()).collect();
        println!(
            "{:>5} {:>12.6} {:>12.6} {:>12} {:>8} {:>8} {:>12.4e}",
            c.final_index,
            hartree_to_ev(c.final_energy),
            hartree_to_ev(c.omega),
            printed,
            if members.is_empty() { "-".to_string() } else { members.join(",") },
            c.time_dependent,
            envelope_short(c.omega, eps, model.pulse().duration)
        );
    }
    Ok(())
}

fn dyson(s: &Scenario, final_index: usize, t_p: f64) -> Result<()> {
    let model = s.signal_model()?;
    let d = model.dyson(final_index, t_p)?;
    println!("final {final_index} t_p_fs {:.6} norm2 {:.12e}", au_to_fs(t_p), d.norm2());
    println!("{:>6} {:>5} {:>20} {:>20} {:>20}", "orbital", "spin", "re", "im", "abs");
    for t in d.terms() {
        let label = OrbitalLabel::from_index(t.orbital, s.orbitals.n_occupied());
        println!(
            "{:>6} {:>5} {:>20.12e} {:>20.12e} {:>20.12e}",
            label.to_string(),
            t.spin.to_string(),
            t.coefficient.re,
            t.coefficient.im,
            t.coefficient.norm()
        );
    }
    Ok(())
}

/// Default pulse durations of the resolution study: 0.5 fs, T/4 and T/2.
fn fig6_durations(s: &Scenario, o: &Overrides) -> Result<Vec<f64>> {
    match &o.tau {
        Some(t) => Ok(t.iter().map(|t| fs_to_au(*t)).collect()),
        None => {
            let period = s.period()?;
            Ok(vec![fs_to_au(0.5), period / 4.0, period / 2.0])
        }
    }
}

fn reproduce(s: &Scenario, out: &Output, figure: Figure, o: &Overrides) -> Result<()> {
    let kind = ProbabilityModel::Short;
    match figure {
        Figure::Fig2 => density(s, out, Path::new("fig2")),
        Figure::Fig3 => {
            let t = single(&o.tp, "--tp")?.map_or(0.0, fs_to_au);
            spectra(s, out, Path::new("fig3"), "spectrum.dat", t, kind)
        }
        Figure::Fig4 => {
            let model = s.signal_model()?;
            let e = o.energy.as_ref().and_then(|e| e.first().copied()).unwrap_or(99.0);
            let maps = maps_at(s, &model, ev_to_hartree(e), kind, false)?;
            write_maps(s, &model, out, Path::new("fig4"), &format!("pmm_e{e:.2}"), &maps)
        }
        Figure::Fig5 => {
            let model = s.signal_model()?;
            let energies = o.energy.clone().unwrap_or_else(|| vec![90.0, 93.0, 96.0, 99.0]);
            for e in energies {
                let maps = maps_at(s, &model, ev_to_hartree(e), kind, false)?;
                write_maps(s, &model, out, Path::new("fig5"), &format!("pmm_e{e:.2}"), &maps)?;
            }
            Ok(())
        }
        Figure::Fig6 => {
            let base = s.signal_model()?;
            let e = o.energy.as_ref().and_then(|e| e.first().copied()).unwrap_or(99.0);
            for (r, tau) in fig6_durations(s, o)?.into_iter().enumerate() {
                let model = base.with_pulse(s.pulse.with_duration(tau)?);
                let maps = maps_at(s, &model, ev_to_hartree(e), ProbabilityModel::Long, true)?;
                write_maps(s, &model, out, Path::new("fig6"), &format!("pmm_tau{r}"), &maps)?;
            }
            Ok(())
        }
    }
}
