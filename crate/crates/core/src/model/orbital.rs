use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use super::{GaussianPrimitive, Vec3, VolumetricGrid};
use crate::{Error, Result};

/// Orbital position relative to the frontier: `H-k` (k below the HOMO) or
/// `L+k` (k above the LUMO).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OrbitalLabel {
    Occupied(usize),
    Virtual(usize),
}

impl OrbitalLabel {
    pub const HOMO: OrbitalLabel = OrbitalLabel::Occupied(0);
    pub const LUMO: OrbitalLabel = OrbitalLabel::Virtual(0);

    /// Index into an orbital list with `n_occupied` occupied orbitals, ordered
    /// by energy.
    pub fn index(self, n_occupied: usize, n_orbitals: usize) -> Option<usize> {
        let idx = match self {
            OrbitalLabel::Occupied(k) => n_occupied.checked_sub(k + 1)?,
            OrbitalLabel::Virtual(k) => n_occupied + k,
        };
        (idx < n_orbitals).then_some(idx)
    }

    pub fn from_index(index: usize, n_occupied: usize) -> Self {
        if index < n_occupied {
            OrbitalLabel::Occupied(n_occupied - 1 - index)
        } else {
            OrbitalLabel::Virtual(index - n_occupied)
        }
    }
}

impl fmt::Display for OrbitalLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            OrbitalLabel::Occupied(0) => write!(f, "H"),
            OrbitalLabel::Occupied(k) => write!(f, "H-{k}"),
            OrbitalLabel::Virtual(0) => write!(f, "L"),
            OrbitalLabel::Virtual(k) => write!(f, "L+{k}"),
        }
    }
}

impl FromStr for OrbitalLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidInput(format!("bad orbital label '{s}'"));
        let (head, rest) = s.split_at(s.find(['-', '+']).unwrap_or(s.len()));
        let offset = if rest.is_empty() {
            0
        } else {
            rest[1..].trim().parse::<usize>().map_err(|_| bad())?
        };
        match (head.trim(), rest.chars().next()) {
            ("H" | "HOMO", None | Some('-')) => Ok(OrbitalLabel::Occupied(offset)),
            ("L" | "LUMO", None | Some('+')) => Ok(OrbitalLabel::Virtual(offset)),
            _ => Err(bad()),
        }
    }
}

/// Behavior under one Cartesian reflection. Only used by symmetry tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
    None,
}

impl Parity {
    pub fn sign(self) -> Option<f64> {
        match self {
            Parity::Even => Some(1.0),
            Parity::Odd => Some(-1.0),
            Parity::None => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OrbitalRepr {
    Lcao { primitives: Vec<GaussianPrimitive>, coefficients: Vec<f64> },
    Grid(VolumetricGrid),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MolecularOrbital {
    pub label: OrbitalLabel,
    pub repr: OrbitalRepr,
    /// Parity under x -> -x, y -> -y, z -> -z.
    pub parity: [Parity; 3],
}

impl MolecularOrbital {
    pub fn lcao(label: OrbitalLabel, primitives: Vec<GaussianPrimitive>, coefficients: Vec<f64>) -> Result<Self> {
        if primitives.len() != coefficients.len() {
            return Err(Error::InvalidInput(format!(
                "orbital {label}: {} primitives but {} coefficients",
                primitives.len(),
                coefficients.len()
            )));
        }
        if primitives.is_empty() {
            return Err(Error::EmptyOrbital(label.to_string()));
        }
        Ok(Self {
            label,
            repr: OrbitalRepr::Lcao { primitives, coefficients },
            parity: [Parity::None; 3],
        })
    }

    pub fn grid(label: OrbitalLabel, grid: VolumetricGrid) -> Self {
        Self { label, repr: OrbitalRepr::Grid(grid), parity: [Parity::None; 3] }
    }

    pub fn with_parity(mut self, parity: [Parity; 3]) -> Self {
        self.parity = parity;
        self
    }

    /// Analytic `<self|other>` for two LCAO orbitals.
    pub fn overlap(&self, other: &Self) -> Result<f64> {
        match (&self.repr, &other.repr) {
            (
                OrbitalRepr::Lcao { primitives: pa, coefficients: ca },
                OrbitalRepr::Lcao { primitives: pb, coefficients: cb },
            ) => {
                let mut s = 0.0;
                for (a, wa) in pa.iter().zip(ca) {
                    for (b, wb) in pb.iter().zip(cb) {
                        s += wa * wb * a.overlap(b);
                    }
                }
                Ok(s)
            }
            _ => Err(Error::Unsupported("analytic overlap needs LCAO orbitals".into())),
        }
    }
}

/// `phi(r)`. Grid-backed orbitals are interpolated trilinearly and vanish
/// outside their grid.
pub fn evaluate_orbital(mo: &MolecularOrbital, r: &Vec3) -> Result<f64> {
    match &mo.repr {
        OrbitalRepr::Lcao { primitives, coefficients } => {
            if primitives.is_empty() {
                return Err(Error::EmptyOrbital(mo.label.to_string()));
            }
            Ok(primitives.iter().zip(coefficients).map(|(p, c)| c * p.value(r)).sum())
        }
        OrbitalRepr::Grid(grid) => {
            if grid.is_empty() {
                return Err(Error::EmptyOrbital(mo.label.to_string()));
            }
            Ok(grid.interpolate(r))
        }
    }
}

/// Energy-ordered orbital basis shared by all states of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitalSet {
    orbitals: Vec<MolecularOrbital>,
    n_occupied: usize,
}

impl OrbitalSet {
    pub fn new(orbitals: Vec<MolecularOrbital>, n_occupied: usize) -> Result<Self> {
        if n_occupied > orbitals.len() {
            return Err(Error::InvalidInput(format!(
                "{n_occupied} occupied orbitals but only {} in the set",
                orbitals.len()
            )));
        }
        for (i, mo) in orbitals.iter().enumerate() {
            let expected = OrbitalLabel::from_index(i, n_occupied);
            if mo.label != expected {
                return Err(Error::InvalidInput(format!(
                    "orbital {i} is labelled {} but should be {expected}",
                    mo.label
                )));
            }
        }
        Ok(Self { orbitals, n_occupied })
    }

    pub fn len(&self) -> usize {
        self.orbitals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbitals.is_empty()
    }

    pub fn n_occupied(&self) -> usize {
        self.n_occupied
    }

    pub fn orbitals(&self) -> &[MolecularOrbital] {
        &self.orbitals
    }

    pub fn get(&self, index: usize) -> Result<&MolecularOrbital> {
        self.orbitals.get(index).ok_or(Error::IndexOutOfRange { index, len: self.orbitals.len() })
    }

    pub fn index_of(&self, label: OrbitalLabel) -> Result<usize> {
        label
            .index(self.n_occupied, self.orbitals.len())
            .ok_or_else(|| Error::InvalidInput(format!("orbital {label} is not in the basis")))
    }

    pub fn by_label(&self, label: OrbitalLabel) -> Result<&MolecularOrbital> {
        self.get(self.index_of(label)?)
    }

    pub fn label(&self, index: usize) -> OrbitalLabel {
        OrbitalLabel::from_index(index, self.n_occupied)
    }

    /// Analytic Gram matrix (LCAO orbitals only).
    pub fn gram_matrix(&self) -> Result<DMatrix<f64>> {
        let n = self.orbitals.len();
        let mut g = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let s = self.orbitals[i].overlap(&self.orbitals[j])?;
                g[(i, j)] = s;
                g[(j, i)] = s;
            }
        }
        Ok(g)
    }
}
