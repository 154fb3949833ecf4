use std::fmt;

use crate::{Error, Result};

/// Spatial orbitals representable in one determinant (two spin-orbitals each
/// in a 128-bit occupation word).
pub const MAX_ORBITALS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn flipped(self) -> Spin {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }

    /// Twice the spin projection.
    pub fn twice_m(self) -> i32 {
        match self {
            Spin::Up => 1,
            Spin::Down => -1,
        }
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Spin::Up => "up",
            Spin::Down => "down",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinOrbital {
    pub orbital: usize,
    pub spin: Spin,
}

impl SpinOrbital {
    pub fn new(orbital: usize, spin: Spin) -> Self {
        Self { orbital, spin }
    }

    /// Canonical position: orbital index first, up before down.
    #[inline]
    pub fn position(self) -> usize {
        2 * self.orbital + usize::from(self.spin == Spin::Down)
    }

    fn from_position(p: usize) -> Self {
        Self { orbital: p / 2, spin: if p.is_multiple_of(2) { Spin::Up } else { Spin::Down } }
    }
}

/// Determinant over spin-orbitals, always stored in canonical order
/// (orbital index ascending, up before down). Operator signs are defined
/// relative to that order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SlaterDeterminant {
    bits: u128,
}

impl SlaterDeterminant {
    pub const VACUUM: SlaterDeterminant = SlaterDeterminant { bits: 0 };

    pub fn from_bits(bits: u128) -> Self {
        Self { bits }
    }

    pub fn bits(&self) -> u128 {
        self.bits
    }

    /// Build `|s_1 s_2 ... s_n>` from an arbitrary ordering. Returns the sign of
    /// the permutation to canonical order together with the determinant.
    pub fn from_spin_orbitals(list: &[SpinOrbital]) -> Result<(f64, Self)> {
        let mut positions = Vec::with_capacity(list.len());
        for so in list {
            if so.orbital >= MAX_ORBITALS {
                return Err(Error::InvalidInput(format!(
                    "orbital index {} exceeds the {MAX_ORBITALS}-orbital limit",
                    so.orbital
                )));
            }
            positions.push(so.position());
        }
        let mut inversions = 0usize;
        for i in 0..positions.len() {
            for j in i + 1..positions.len() {
                match positions[i].cmp(&positions[j]) {
                    std::cmp::Ordering::Greater => inversions += 1,
                    std::cmp::Ordering::Equal => {
                        return Err(Error::InvalidInput(format!(
                            "spin-orbital ({}, {}) occupied twice",
                            list[i].orbital, list[i].spin
                        )))
                    }
                    std::cmp::Ordering::Less => {}
                }
            }
        }
        let bits = positions.iter().fold(0u128, |acc, &p| acc | 1u128 << p);
        let sign = if inversions.is_multiple_of(2) { 1.0 } else { -1.0 };
        Ok((sign, Self { bits }))
    }

    pub fn n_electrons(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_occupied(&self, so: SpinOrbital) -> bool {
        so.orbital < MAX_ORBITALS && self.bits >> so.position() & 1 == 1
    }

    /// Occupied spin-orbitals in canonical order.
    pub fn spin_orbitals(&self) -> Vec<SpinOrbital> {
        let mut out = Vec::with_capacity(self.n_electrons());
        let mut b = self.bits;
        while b != 0 {
            let p = b.trailing_zeros() as usize;
            out.push(SpinOrbital::from_position(p));
            b &= b - 1;
        }
        out
    }

    /// Number of electrons in spin-orbitals canonically before `so`.
    #[inline]
    pub fn count_before(&self, so: SpinOrbital) -> u32 {
        let p = so.position();
        let mask = if p == 0 { 0 } else { (1u128 << p) - 1 };
        (self.bits & mask).count_ones()
    }

    /// Twice the total spin projection.
    pub fn twice_m(&self) -> i32 {
        self.spin_orbitals().iter().map(|s| s.spin.twice_m()).sum()
    }

    /// Highest spatial orbital index touched plus one.
    pub fn orbital_extent(&self) -> usize {
        if self.bits == 0 {
            0
        } else {
            (127 - self.bits.leading_zeros() as usize) / 2 + 1
        }
    }

    /// `a_so |self>`: `None` when `so` is empty, otherwise the sign
    /// `(-1)^(electrons before so)` and the reduced determinant.
    pub fn annihilate(&self, so: SpinOrbital) -> Option<(f64, SlaterDeterminant)> {
        if !self.is_occupied(so) {
            return None;
        }
        let sign = if self.count_before(so).is_multiple_of(2) { 1.0 } else { -1.0 };
        Some((sign, Self { bits: self.bits & !(1u128 << so.position()) }))
    }

    /// `a+_so |self>`: `None` when `so` is already occupied.
    pub fn create(&self, so: SpinOrbital) -> Option<(f64, SlaterDeterminant)> {
        if so.orbital >= MAX_ORBITALS || self.is_occupied(so) {
            return None;
        }
        let sign = if self.count_before(so).is_multiple_of(2) { 1.0 } else { -1.0 };
        Some((sign, Self { bits: self.bits | 1u128 << so.position() }))
    }
}

impl fmt::Display for SlaterDeterminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, so) in self.spin_orbitals().iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}{}", so.orbital, if so.spin == Spin::Up { "a" } else { "b" })?;
        }
        write!(f, ">")
    }
}
