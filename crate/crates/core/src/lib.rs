//! Constrained-Willmore stability of the CMC Clifford tori
//! `T_r = r S¹ × s S¹ ⊂ S³`.
//!
//! [`spectrum`] evaluates the closed-form spectrum of the constrained
//! stability operator, [`revolution`] and [`oracle`] measure the same
//! second variation by finite differences on surfaces of revolution, and
//! [`verify`] runs the checks that tie the two together.

pub mod error;
pub mod fourier;
pub mod numdiff;
pub mod oracle;
pub mod revolution;
pub mod roots;
pub mod spectrum;
pub mod tensor;
pub mod torus;
pub mod verify;

pub use error::{Error, Result};
pub use oracle::{Direction, ModeVerification, OracleReport, VariationSpec};
pub use revolution::{clifford_profile, conformal_class, surface_data, willmore_energy, Profile, SurfaceData};
pub use spectrum::{eigenvalue, morse_index, spectrum_table, thresholds, SpectrumEntry, StabilityReport};
pub use torus::{geometric_data, make_torus, willmore_energy_clifford, GeometricData, TorusParameter};
