//! Physical constants and unit conversion. Everything inside the crate is in
//! atomic units; eV, fs and Å appear only in configuration and exports.

pub const HARTREE_EV: f64 = 27.211386;
pub const BOHR_ANGSTROM: f64 = 0.529177;
pub const AU_TIME_FS: f64 = 0.02418884;
pub const SPEED_OF_LIGHT_AU: f64 = 137.036;

#[inline]
pub fn ev_to_hartree(ev: f64) -> f64 {
    ev / HARTREE_EV
}

#[inline]
pub fn hartree_to_ev(ha: f64) -> f64 {
    ha * HARTREE_EV
}

#[inline]
pub fn fs_to_au(fs: f64) -> f64 {
    fs / AU_TIME_FS
}

#[inline]
pub fn au_to_fs(t: f64) -> f64 {
    t * AU_TIME_FS
}

#[inline]
pub fn angstrom_to_bohr(a: f64) -> f64 {
    a / BOHR_ANGSTROM
}

#[inline]
pub fn bohr_to_angstrom(b: f64) -> f64 {
    b * BOHR_ANGSTROM
}

/// Momentum: inverse Å to inverse bohr.
#[inline]
pub fn inv_angstrom_to_au(k: f64) -> f64 {
    k * BOHR_ANGSTROM
}

#[inline]
pub fn au_to_inv_angstrom(k: f64) -> f64 {
    k / BOHR_ANGSTROM
}
