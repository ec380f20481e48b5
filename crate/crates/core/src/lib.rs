//! Bloch-wave torus solutions of the generalized Weierstrass representation
//! of surfaces in R⁴, together with numerical audits of every algebraic and
//! geometric condition the construction relies on.
//!
//! Layout:
//! - [`wirtinger`], [`quadrature`]: complex calculus and one-form integration
//! - [`spinor`]: exponential spinor components, Dirac residuals, metric
//! - [`torus`]: the parameter family, side conditions, Dehn twists
//! - [`immersion`]: coordinates in R⁴ and the flat-torus audit
//! - [`io`]: sampling, exporters, audit reports and the command line

pub mod error;
pub mod expform;
pub mod immersion;
pub mod io;
pub mod quadrature;
pub mod spinor;
pub mod torus;
pub mod wirtinger;

pub use num_complex::Complex64 as C64;

pub use error::{Error, Result};
pub use immersion::{closed_form_coordinates, integrated_coordinates, radii_audit, ImmersionPoint, PhaseState};
pub use spinor::{DiracConvention, Doublet, SpinorComponent};
pub use torus::{
    build_solution, build_wave_vectors, DehnTwist, ExponentMode, Lattice, RealityBranch, TorusParameters, TorusSolution,
    WaveVectorSet,
};
pub use wirtinger::{integrate_one_form, IntegrationPath, OneForm};
