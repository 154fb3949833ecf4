use std::fmt;
use std::str::FromStr;

use super::{SlaterDeterminant, Spin, SpinOrbital};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpinStep {
    /// Intermediate spin raised by 1/2.
    Up,
    /// Intermediate spin lowered by 1/2.
    Down,
}

/// Genealogical spin-coupling path over the open shells, taken in ascending
/// orbital order. `"udu"` couples the first two open shells to a singlet and
/// the third on top; `"uud"` goes through an intermediate triplet.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Coupling(Vec<SpinStep>);

impl Coupling {
    pub fn new(steps: Vec<SpinStep>) -> Result<Self> {
        let mut twice_s: i32 = 0;
        for (i, step) in steps.iter().enumerate() {
            twice_s += match step {
                SpinStep::Up => 1,
                SpinStep::Down => -1,
            };
            if twice_s < 0 {
                return Err(Error::InvalidInput(format!(
                    "coupling path goes below zero spin at step {}",
                    i + 1
                )));
            }
        }
        Ok(Self(steps))
    }

    /// The only possible path for zero or one open shell.
    pub fn unique(open_shells: usize) -> Result<Self> {
        match open_shells {
            0 => Ok(Self(vec![])),
            1 => Ok(Self(vec![SpinStep::Up])),
            n => Err(Error::InvalidInput(format!(
                "{n} open shells need an explicit coupling (e.g. 'ud', 'udu', 'uud')"
            ))),
        }
    }

    pub fn steps(&self) -> &[SpinStep] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn twice_s(&self) -> u32 {
        self.0.iter().filter(|s| **s == SpinStep::Up).count() as u32
            - self.0.iter().filter(|s| **s == SpinStep::Down).count() as u32
    }
}

impl FromStr for Coupling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let steps = s
            .trim()
            .chars()
            .map(|c| match c {
                'u' | 'U' => Ok(SpinStep::Up),
                'd' | 'D' => Ok(SpinStep::Down),
                _ => Err(Error::InvalidInput(format!("bad coupling tag '{s}'"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(steps)
    }
}

impl fmt::Display for Coupling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            f.write_str(match s {
                SpinStep::Up => "u",
                SpinStep::Down => "d",
            })?;
        }
        Ok(())
    }
}

/// Clebsch-Gordan coefficient for adding one electron of spin `m` to an
/// intermediate spin `twice_s/2` along a genealogical step.
fn genealogical_factor(twice_s: i32, step: SpinStep, spin: Spin, twice_m_new: i32) -> f64 {
    let s = twice_s as f64 / 2.0;
    let m = twice_m_new as f64 / 2.0;
    let denom = 2.0 * s + 1.0;
    let plus = ((s + m + 0.5) / denom).max(0.0).sqrt();
    let minus = ((s - m + 0.5) / denom).max(0.0).sqrt();
    match (step, spin) {
        (SpinStep::Up, Spin::Up) => plus,
        (SpinStep::Up, Spin::Down) => minus,
        (SpinStep::Down, Spin::Up) => -minus,
        (SpinStep::Down, Spin::Down) => plus,
    }
}

/// Spin-adapted configuration, stored as its explicit determinant expansion.
///
/// Determinants list closed shells and open shells in canonical order with
/// sign +1; the open-shell spin function follows the genealogical coupling.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigurationStateFunction {
    occupation: Vec<u8>,
    holes: Vec<usize>,
    particles: Vec<usize>,
    coupling: Coupling,
    twice_s: u32,
    twice_m: i32,
    expansion: Vec<(f64, SlaterDeterminant)>,
}

impl ConfigurationStateFunction {
    /// CSF for a spatial occupation (entries 0, 1 or 2 per orbital).
    pub fn from_occupation(occupation: Vec<u8>, coupling: Coupling, twice_m: i32) -> Result<Self> {
        if let Some(bad) = occupation.iter().find(|&&n| n > 2) {
            return Err(Error::InvalidInput(format!("orbital occupation {bad} exceeds 2")));
        }
        if occupation.len() > super::MAX_ORBITALS {
            return Err(Error::InvalidInput(format!("{} orbitals exceed the limit", occupation.len())));
        }
        let open: Vec<usize> = (0..occupation.len()).filter(|&i| occupation[i] == 1).collect();
        if open.len() != coupling.len() {
            return Err(Error::InvalidInput(format!(
                "coupling '{coupling}' has {} steps for {} open shells",
                coupling.len(),
                open.len()
            )));
        }
        let twice_s = coupling.twice_s();
        if twice_m.unsigned_abs() > twice_s || (twice_s as i32 - twice_m) % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "spin projection {twice_m}/2 incompatible with S = {twice_s}/2"
            )));
        }
        let closed_bits = occupation
            .iter()
            .enumerate()
            .filter(|(_, &n)| n == 2)
            .fold(0u128, |acc, (i, _)| acc | 0b11u128 << (2 * i));

        let mut expansion = Vec::new();
        for assignment in 0u64..(1u64 << open.len()) {
            let mut coeff = 1.0;
            let mut twice_s_run = 0i32;
            let mut twice_m_run = 0i32;
            let mut bits = closed_bits;
            for (k, (&orb, step)) in open.iter().zip(coupling.steps()).enumerate() {
                let spin = if assignment >> k & 1 == 0 { Spin::Up } else { Spin::Down };
                let new_m = twice_m_run + spin.twice_m();
                let new_s = twice_s_run + if *step == SpinStep::Up { 1 } else { -1 };
                if new_m.abs() > new_s {
                    coeff = 0.0;
                    break;
                }
                coeff *= genealogical_factor(twice_s_run, *step, spin, new_m);
                twice_s_run = new_s;
                twice_m_run = new_m;
                bits |= 1u128 << SpinOrbital::new(orb, spin).position();
            }
            if twice_m_run == twice_m && coeff.abs() > 1e-14 {
                expansion.push((coeff, SlaterDeterminant::from_bits(bits)));
            }
        }
        expansion.sort_by_key(|a| a.1);
        Ok(Self { occupation, holes: vec![], particles: vec![], coupling, twice_s, twice_m, expansion })
    }

    /// CSF obtained from a closed-shell reference with `n_reference` doubly
    /// occupied orbitals by removing electrons from `holes` (an orbital may
    /// appear twice) and adding them to `particles`.
    ///
    /// `coupling` defaults to the unique path when at most one shell is open;
    /// `twice_m` defaults to the maximal projection `2S`.
    pub fn excitation(
        n_orbitals: usize,
        n_reference: usize,
        holes: &[usize],
        particles: &[usize],
        coupling: Option<Coupling>,
        twice_m: Option<i32>,
    ) -> Result<Self> {
        if n_reference > n_orbitals {
            return Err(Error::InvalidInput("reference larger than the orbital basis".into()));
        }
        let mut occ = vec![0u8; n_orbitals];
        occ[..n_reference].iter_mut().for_each(|n| *n = 2);
        for &h in holes {
            match occ.get_mut(h) {
                Some(n) if *n > 0 => *n -= 1,
                _ => return Err(Error::InvalidInput(format!("cannot remove an electron from orbital {h}"))),
            }
        }
        for &p in particles {
            match occ.get_mut(p) {
                Some(n) if *n < 2 => *n += 1,
                _ => return Err(Error::InvalidInput(format!("cannot add an electron to orbital {p}"))),
            }
        }
        let open = occ.iter().filter(|&&n| n == 1).count();
        let coupling = match coupling {
            Some(c) => c,
            None => Coupling::unique(open)?,
        };
        let twice_m = twice_m.unwrap_or(coupling.twice_s() as i32);
        let mut csf = Self::from_occupation(occ, coupling, twice_m)?;
        csf.holes = holes.to_vec();
        csf.particles = particles.to_vec();
        Ok(csf)
    }

    pub fn occupation(&self) -> &[u8] {
        &self.occupation
    }

    pub fn n_orbitals(&self) -> usize {
        self.occupation.len()
    }

    pub fn n_electrons(&self) -> usize {
        self.occupation.iter().map(|&n| n as usize).sum()
    }

    pub fn holes(&self) -> &[usize] {
        &self.holes
    }

    pub fn particles(&self) -> &[usize] {
        &self.particles
    }

    pub fn coupling(&self) -> &Coupling {
        &self.coupling
    }

    pub fn twice_s(&self) -> u32 {
        self.twice_s
    }

    pub fn twice_m(&self) -> i32 {
        self.twice_m
    }

    pub fn expansion(&self) -> &[(f64, SlaterDeterminant)] {
        &self.expansion
    }
}
