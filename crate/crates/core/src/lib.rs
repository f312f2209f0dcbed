//! Free rigid body on `so(4)`.
//!
//! The crate covers the Lie–Poisson dynamics of a generic `so(4)` rigid body,
//! its eight quadratic first integrals, the twelve Cartan equilibria on every
//! regular adjoint orbit, and two independent routes to stability:
//! linearization on the orbit (spectral) and energy–Casimir Lyapunov
//! functions built from the conserved quantities (nonlinear).
//!
//! Module map:
//!
//! - [`inertia`], [`state`], [`body`], [`integrals`]: coordinates, the
//!   equations of motion and the conserved quantities.
//! - [`equilibria`]: the equilibrium set and its intersection with an orbit.
//! - [`spectral`]: linearization, the characteristic quartic and the
//!   spectral classification of the bifurcating equilibria.
//! - [`lyapunov`]: multiplier solving, constrained Hessians and certificates.
//! - [`dynamics`]: fixed-step integration and perturbation probes.
//! - [`verify`]: self-check suites shared by the CLI and the tests.

pub use nalgebra;

pub mod body;
pub mod dynamics;
pub mod equilibria;
mod error;
pub mod inertia;
pub mod integrals;
pub mod linalg;
pub mod lyapunov;
pub mod roots;
mod serde_helpers;
pub mod spectral;
pub mod state;
pub mod tolerance;
pub mod verify;

pub use body::{omega_from_m, vector_field};
pub use equilibria::{
    ab_from_orbit, cartan_equilibria, is_equilibrium, s_family_basis, Equilibrium,
    EquilibriumFamily, OrbitParams, SFamilySign, WeylImage,
};
pub use error::{Error, Result};
pub use inertia::InertiaSpectrum;
pub use integrals::{
    integral_gradient, integral_value, poisson_bracket, popov_decomposition, IntegralId,
    PopovDecomposition, QuadraticForm,
};
pub use state::So4State;
