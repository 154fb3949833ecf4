//! Momentum-space machinery: Fourier transforms of orbitals and momentum
//! sample grids.
//!
//! Convention: `F(phi)(q) = (2 pi)^{-3/2} \int d^3r exp(-i q.r) phi(r)`. The
//! minus sign in the exponent is used everywhere; for real orbitals the other
//! sign only relabels `q -> -q`.

mod amplitude;
mod ft;
mod grid;

pub use amplitude::{AmplitudeCache, MomentumAmplitude};
pub use ft::{gaussian_ft, orbital_ft, orbital_ft_at};
pub use grid::{build_hemisphere, GridMode, MomentumGrid};
