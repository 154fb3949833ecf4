//! Final-state CI tables.
//!
//! Tab-separated, one row per CSF term. `#` starts a comment; blank lines are
//! skipped; a first row starting with `final` is a header.
//!
//! | column        | content                                                |
//! |---------------|--------------------------------------------------------|
//! | `final`       | final-state index F (1-based)                          |
//! | `energy_ev`   | E_F in eV                                              |
//! | `omega_ev`    | printed Omega_F in eV, or `-`                          |
//! | `coefficient` | CI coefficient                                         |
//! | `holes`       | comma-separated orbital labels emptied, e.g. `H-1,H`   |
//! | `particles`   | comma-separated orbital labels filled, or `-`          |
//! | `coupling`    | genealogical spin path such as `udu`, or `-` if unique |
//!
//! Rows of one final state must repeat the same energy and Omega. All states
//! are built with the maximal spin projection.

use std::collections::BTreeMap;
use std::path::Path;

use crate::model::{ConfigurationStateFunction, Coupling, ElectronicState, OrbitalLabel};
use crate::units::ev_to_hartree;
use crate::{Error, Result};

pub const COLUMNS: [&str; 7] = ["final", "energy_ev", "omega_ev", "coefficient", "holes", "particles", "coupling"];

/// Size of the closed-shell reference the holes and particles refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableBasis {
    pub n_orbitals: usize,
    pub n_occupied: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FinalState {
    pub index: usize,
    pub energy_ev: f64,
    pub omega_ev: Option<f64>,
    pub state: ElectronicState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FinalStateTable {
    pub states: Vec<FinalState>,
}

/// A printed Omega_F that disagrees with `omega_in + <E> - E_F`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaMismatch {
    pub index: usize,
    pub printed_ev: f64,
    pub computed_ev: f64,
}

pub const OMEGA_WARN_EV: f64 = 0.05;

impl FinalStateTable {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&FinalState> {
        self.states.iter().find(|s| s.index == index)
    }

    pub fn renormalized(&self) -> Self {
        Self {
            states: self
                .states
                .iter()
                .map(|s| FinalState { state: s.state.renormalized(), ..s.clone() })
                .collect(),
        }
    }

    /// `<E> = Omega_F + E_F - omega_in` from the first row with a printed
    /// Omega (eV).
    pub fn mean_energy_from_omega(&self, photon_ev: f64) -> Option<f64> {
        self.states
            .iter()
            .find_map(|s| s.omega_ev.map(|o| o + s.energy_ev - photon_ev))
    }

    /// Printed Omega values off by more than [`OMEGA_WARN_EV`].
    pub fn omega_mismatches(&self, photon_ev: f64, mean_energy_ev: f64) -> Vec<OmegaMismatch> {
        self.states
            .iter()
            .filter_map(|s| {
                let printed = s.omega_ev?;
                let computed = photon_ev + mean_energy_ev - s.energy_ev;
                ((printed - computed).abs() > OMEGA_WARN_EV).then_some(OmegaMismatch {
                    index: s.index,
                    printed_ev: printed,
                    computed_ev: computed,
                })
            })
            .collect()
    }
}

struct Row {
    line: usize,
    final_index: usize,
    energy: f64,
    omega: Option<f64>,
    coefficient: f64,
    holes: Vec<usize>,
    particles: Vec<usize>,
    coupling: Option<Coupling>,
}

fn parse_labels(field: &str, basis: TableBasis, err: &dyn Fn(String) -> Error) -> Result<Vec<usize>> {
    if field == "-" || field.is_empty() {
        return Ok(vec![]);
    }
    field
        .split(',')
        .map(|s| {
            let label: OrbitalLabel = s.parse().map_err(|_| err(format!("bad orbital label '{}'", s.trim())))?;
            label
                .index(basis.n_occupied, basis.n_orbitals)
                .ok_or_else(|| err(format!("orbital {label} is outside the basis")))
        })
        .collect()
}

fn parse_row(line: &str, lineno: usize, basis: TableBasis, path: &str) -> Result<Row> {
    let err = |message: String| Error::Parse { path: path.to_string(), line: lineno, message };
    let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
    if fields.len() != COLUMNS.len() {
        return Err(err(format!("expected {} tab-separated fields, found {}", COLUMNS.len(), fields.len())));
    }
    let num = |i: usize| -> Result<f64> {
        let v: f64 = fields[i].parse().map_err(|_| err(format!("{} '{}' is not a number", COLUMNS[i], fields[i])))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(err(format!("{} must be finite", COLUMNS[i])))
        }
    };
    let final_index: usize = fields[0].parse().map_err(|_| err(format!("final index '{}' is not a positive integer", fields[0])))?;
    if final_index == 0 {
        return Err(err("final indices start at 1".into()));
    }
    let omega = if fields[2] == "-" { None } else { Some(num(2)?) };
    let coupling = match fields[6] {
        "-" | "" => None,
        tag => Some(tag.parse::<Coupling>().map_err(|_| err(format!("unparseable coupling tag '{tag}'")))?),
    };
    Ok(Row {
        line: lineno,
        final_index,
        energy: num(1)?,
        omega,
        coefficient: num(3)?,
        holes: parse_labels(fields[4], basis, &err)?,
        particles: parse_labels(fields[5], basis, &err)?,
        coupling,
    })
}

/// Parse a table; `path` is only used in error messages.
pub fn parse_final_state_table(text: &str, path: &str, basis: TableBasis) -> Result<FinalStateTable> {
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        if rows.is_empty() && line.trim_start().starts_with("final") {
            continue;
        }
        rows.push(parse_row(line, i + 1, basis, path)?);
    }
    if rows.is_empty() {
        return Err(Error::Parse { path: path.to_string(), line: 0, message: "table contains no final states".into() });
    }

    let mut grouped: BTreeMap<usize, Vec<Row>> = BTreeMap::new();
    for row in rows {
        grouped.entry(row.final_index).or_default().push(row);
    }
    let mut states = Vec::with_capacity(grouped.len());
    for (index, rows) in grouped {
        let first = &rows[0];
        let err = |line: usize, message: String| Error::Parse { path: path.to_string(), line, message };
        for r in &rows[1..] {
            if r.energy != first.energy || r.omega != first.omega {
                return Err(err(r.line, format!("final state {index} repeats with a different energy or omega")));
            }
        }
        let expansion = rows
            .iter()
            .map(|r| {
                ConfigurationStateFunction::excitation(
                    basis.n_orbitals,
                    basis.n_occupied,
                    &r.holes,
                    &r.particles,
                    r.coupling.clone(),
                    None,
                )
                .map(|csf| (r.coefficient, csf))
                .map_err(|e| err(r.line, e.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        let state = ElectronicState::new(ev_to_hartree(first.energy), expansion).map_err(|e| err(first.line, e.to_string()))?;
        states.push(FinalState { index, energy_ev: first.energy, omega_ev: first.omega, state });
    }
    Ok(FinalStateTable { states })
}

pub fn read_final_state_table(path: &Path, basis: TableBasis) -> Result<FinalStateTable> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_final_state_table(&text, &path.display().to_string(), basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Spin;

    const BASIS: TableBasis = TableBasis { n_orbitals: 22, n_occupied: 11 };

    fn parse(text: &str) -> Result<FinalStateTable> {
        parse_final_state_table(text, "t.tsv", BASIS)
    }

    #[test]
    fn one_hole_doublet() {
        let t = parse("1\t5.0\t98.9\t-0.95\tH\t-\t-\n").unwrap();
        let s = &t.states[0];
        assert_eq!((s.index, s.energy_ev, s.omega_ev), (1, 5.0, Some(98.9)));
        assert_eq!(s.state.n_electrons(), 21);
        let (c, csf) = &s.state.expansion()[0];
        assert_eq!(*c, -0.95);
        assert_eq!(csf.twice_s(), 1);
        assert_eq!(csf.twice_m(), 1);
        assert_eq!(csf.holes(), &[10]);
        // the HOMO keeps its up electron
        let det = csf.expansion()[0].1;
        assert!(det.is_occupied(crate::model::SpinOrbital::new(10, Spin::Up)));
        assert!(!det.is_occupied(crate::model::SpinOrbital::new(10, Spin::Down)));
    }

    #[test]
    fn three_open_shells_with_both_couplings() {
        let text = "final\tenergy_ev\tomega_ev\tcoefficient\tholes\tparticles\tcoupling\n\
                    6\t9.7\t94.2\t-0.59\tH,H\tL+2\t-\n\
                    6\t9.7\t94.2\t0.62\tH-2,H\tL\tudu\n\
                    6\t9.7\t94.2\t-0.28\tH-2,H\tL\tuud\n";
        let t = parse(text).unwrap();
        let e = t.states[0].state.expansion();
        assert_eq!(e.len(), 3);
        assert_eq!(e[1].1.coupling().to_string(), "udu");
        assert_eq!(e[2].1.coupling().to_string(), "uud");
        assert_eq!(e[1].1.twice_s(), 1);
    }

    #[test]
    fn empty_file_is_an_error() {
        assert!(matches!(parse(""), Err(Error::Parse { .. })));
        assert!(matches!(parse("# only comments\n\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn bad_coupling_tag() {
        let err = parse("4\t8.7\t-\t0.5\tH-1,H\tL\tuxd\n").unwrap_err();
        match err {
            Error::Parse { line, message, .. } => {
                assert_eq!(line, 1);
                assert!(message.contains("coupling"));
            }
            e => panic!("{e}"),
        }
        // a path that leaves a negative intermediate spin
        assert!(parse("4\t8.7\t-\t0.5\tH-1,H\tL\tduu\n").is_err());
    }

    #[test]
    fn norm_above_one_rejected() {
        let err = parse("1\t5.0\t-\t0.9\tH\t-\t-\n1\t5.0\t-\t0.5\tH-4\t-\t-\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn inconsistent_energies_rejected() {
        assert!(parse("1\t5.0\t-\t0.5\tH\t-\t-\n1\t5.1\t-\t0.5\tH-4\t-\t-\n").is_err());
    }

    #[test]
    fn omega_validation() {
        let t = parse("1\t5.0\t98.9\t-0.95\tH\t-\t-\n2\t6.7\t97.5\t-0.94\tH-2\t-\t-\n").unwrap();
        let mean = t.mean_energy_from_omega(100.0).unwrap();
        assert!((mean - 3.9).abs() < 1e-12);
        let bad = t.omega_mismatches(100.0, mean);
        assert_eq!(bad.len(), 1);
        assert_eq!(bad[0].index, 2);
    }

    #[test]
    fn renormalize_mode() {
        let t = parse("3\t7.5\t-\t-0.83\tH,H\tL\t-\n3\t7.5\t-\t0.31\tH-4\t-\t-\n").unwrap();
        assert!((t.renormalized().states[0].state.coefficient_norm2() - 1.0).abs() < 1e-12);
    }
}
