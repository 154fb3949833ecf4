//! `#`-headered whitespace-delimited result files and density cubes.
//!
//! Header lines are `# key value...`; the last header line is
//! `# columns name...`. Numbers are written with 17 significant digits so
//! the bundled reader recovers them exactly. Momenta in 1/Å, energies in
//! eV, times in fs.

use std::fmt::Write as _;
use std::path::Path;

use super::cube::{write_cube, Cube, CubeAtom};
use crate::density::DensityFrame;
use crate::model::Vec3;
use crate::signal::{Pmm, PrefactorMode, ProbabilityModel, Spectrum};
use crate::units::{au_to_fs, au_to_inv_angstrom, hartree_to_ev};
use crate::{Error, Result};

/// Provenance shared by every export of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExportMeta {
    pub config_digest: String,
    pub prefactor: PrefactorMode,
    pub photon_energy_ev: f64,
    pub duration_fs: f64,
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn model_name(m: ProbabilityModel) -> &'static str {
    match m {
        ProbabilityModel::Short => "short-pulse",
        ProbabilityModel::Long => "finite-pulse",
    }
}

fn prefactor_name(p: PrefactorMode) -> &'static str {
    match p {
        PrefactorMode::Relative => "relative",
        PrefactorMode::Absolute => "absolute",
    }
}

fn common_header(out: &mut String, kind: &str, meta: &ExportMeta) {
    let _ = writeln!(out, "# attopmm {kind}");
    let _ = writeln!(out, "# config_sha256 {}", meta.config_digest);
    let _ = writeln!(out, "# photon_energy_ev {}", num(meta.photon_energy_ev));
    let _ = writeln!(out, "# duration_fs {}", num(meta.duration_fs));
    let _ = writeln!(out, "# prefactor {}", prefactor_name(meta.prefactor));
}

/// One row `q_x q_y value` per valid sample, in raster order.
pub fn pmm_to_string(pmm: &Pmm, meta: &ExportMeta) -> String {
    let mut out = String::new();
    common_header(&mut out, "pmm", meta);
    let _ = writeln!(out, "# energy_ev {}", num(hartree_to_ev(pmm.energy)));
    let _ = writeln!(out, "# t_p_fs {}", num(au_to_fs(pmm.t_p)));
    let _ = writeln!(out, "# model {}", model_name(pmm.model));
    let _ = writeln!(out, "# raster {} {}", pmm.qx.len(), pmm.qy.len());
    let _ = writeln!(out, "# valid_samples {}", pmm.valid_count());
    let channels: Vec<String> = pmm.channels.iter().map(|c| c.to_string()).collect();
    let _ = writeln!(out, "# channels {}", channels.join(" "));
    let _ = writeln!(out, "# units q: 1/angstrom, value: probability per unit of the prefactor");
    let _ = writeln!(out, "# columns q_x q_y value");
    let ny = pmm.qy.len();
    for (s, v) in pmm.values.iter().enumerate() {
        if pmm.valid[s] {
            let (qx, qy) = (au_to_inv_angstrom(pmm.qx[s / ny]), au_to_inv_angstrom(pmm.qy[s % ny]));
            let _ = writeln!(out, "{} {} {}", num(qx), num(qy), num(*v));
        }
    }
    out
}

/// Curves sharing one energy axis, one column per curve.
pub fn spectra_to_string(spectra: &[Spectrum], meta: &ExportMeta) -> Result<String> {
    let first = spectra.first().ok_or_else(|| Error::InvalidInput("no spectra to export".into()))?;
    if spectra.iter().any(|s| s.energies != first.energies) {
        return Err(Error::InvalidInput("spectra must share their energy samples".into()));
    }
    let mut out = String::new();
    common_header(&mut out, "spectrum", meta);
    let names: Vec<String> = spectra.iter().map(|s| s.kind.tag().to_string()).collect();
    let _ = writeln!(out, "# curves {}", names.join(" "));
    for s in spectra {
        let _ = writeln!(out, "# t_p_fs.{} {}", s.kind.tag(), num(au_to_fs(s.t_p)));
    }
    let _ = writeln!(out, "# angular_degree {}", first.degree);
    let _ = writeln!(out, "# units energy: eV, value: q * integral of P over directions");
    let _ = writeln!(out, "# columns energy_ev {}", names.join(" "));
    for (k, e) in first.energies.iter().enumerate() {
        let _ = write!(out, "{}", num(hartree_to_ev(*e)));
        for s in spectra {
            let _ = write!(out, " {}", num(s.values[k]));
        }
        out.push('\n');
    }
    Ok(out)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn write_pmm(path: &Path, pmm: &Pmm, meta: &ExportMeta) -> Result<()> {
    write_text(path, &pmm_to_string(pmm, meta))
}

pub fn write_spectra(path: &Path, spectra: &[Spectrum], meta: &ExportMeta) -> Result<()> {
    write_text(path, &spectra_to_string(spectra, meta)?)
}

/// A result file read back.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    /// Header entries in file order, excluding `columns`.
    pub header: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl ResultTable {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.header.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

pub fn parse_result_table(text: &str, path: &str) -> Result<ResultTable> {
    let err = |line: usize, message: String| Error::Parse { path: path.to_string(), line, message };
    let mut header = Vec::new();
    let mut columns = None;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if let Some(h) = line.strip_prefix('#') {
            let h = h.trim();
            let (key, value) = h.split_once(' ').unwrap_or((h, ""));
            if key == "columns" {
                columns = Some(value.split_whitespace().map(String::from).collect::<Vec<_>>());
            } else {
                header.push((key.to_string(), value.trim().to_string()));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let cols = columns.as_ref().ok_or_else(|| err(i + 1, "data before the columns header".into()))?;
        let row = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| err(i + 1, format!("'{t}' is not a number"))))
            .collect::<Result<Vec<_>>>()?;
        if row.len() != cols.len() {
            return Err(err(i + 1, format!("expected {} values, found {}", cols.len(), row.len())));
        }
        rows.push(row);
    }
    let columns = columns.ok_or_else(|| err(0, "missing columns header".into()))?;
    Ok(ResultTable { header, columns, rows })
}

pub fn read_result_table(path: &Path) -> Result<ResultTable> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_result_table(&text, &path.display().to_string())
}

/// Cube of a density frame with the nuclei (bohr) as atom records.
pub fn density_cube(frame: &DensityFrame, nuclei: &[(u32, Vec3)], meta: &ExportMeta) -> Cube {
    Cube {
        comments: [
            format!("attopmm density change t_fs={} config_sha256={}", num(au_to_fs(frame.time)), meta.config_digest),
            format!("positive={} negative={} (electrons)", num(frame.positive), num(frame.negative)),
        ],
        atoms: nuclei
            .iter()
            .map(|(z, p)| CubeAtom { number: *z, charge: *z as f64, position: *p })
            .collect(),
        grid: frame.grid.clone(),
    }
}

pub fn write_density(path: &Path, frame: &DensityFrame, nuclei: &[(u32, Vec3)], meta: &ExportMeta) -> Result<()> {
    write_cube(path, &density_cube(frame, nuclei, meta))
}
