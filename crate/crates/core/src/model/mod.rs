//! Domain types shared by the algebra, transform and signal layers.

mod csf;
mod determinant;
mod gaussian;
mod grid;
mod orbital;
mod pulse;
mod state;
mod wavepacket;

pub use csf::{ConfigurationStateFunction, Coupling, SpinStep};
pub use determinant::{SlaterDeterminant, Spin, SpinOrbital, MAX_ORBITALS};
pub use gaussian::{double_factorial, GaussianPrimitive};
pub use grid::{GridValues, VolumetricGrid};
pub use orbital::{
    evaluate_orbital, MolecularOrbital, OrbitalLabel, OrbitalRepr, OrbitalSet, Parity,
};
pub use pulse::ProbePulse;
pub use state::ElectronicState;
pub use wavepacket::{WavePacket, WavePacketMember};

pub type Vec3 = nalgebra::Vector3<f64>;
