//! Normalized ground states of the quasilinear Schrödinger equation
//!
//! ```text
//! -Δu - Δ(u²)u + λu = u^{p-1}   in ℝ^N
//! ```
//!
//! in the mass-supercritical window 4 + 4/N < p < 2·2*. The library solves
//! the radial profile at fixed frequency λ by shooting on the dual
//! (semilinear) equation, projects profiles onto the Pohozaev manifold,
//! assembles the mass-frequency-energy branch λ ↦ (a, M_a), and checks the
//! structural and asymptotic behavior of that branch at desk scale: the
//! free-boundary small-mass limit, the semilinear and Talenti large-mass
//! limits, the zero-mass threshold a₀ for N ≥ 5, and an independent
//! min-max oracle for M_a.

pub mod curves;
pub mod dual;
pub mod error;
pub mod fiber;
pub mod interp;
pub mod io;
pub mod ivp;
pub mod minimize;
pub mod oracle;
pub mod params;
pub mod radial;
pub mod shooting;
pub mod verify;

pub use error::{Error, Result};
pub use fiber::{fiber_scale, project_pohozaev, reduced_energy, FiberPolynomial, Projection, Side};
pub use params::Params;
pub use radial::{functionals, gn_ratio, FunctionalValues, GNReport, RadialProfile};
