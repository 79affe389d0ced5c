//! Classical side: Poisson algebras of the reduced phase spaces, orbit-type
//! strata, momentum maps and the highest-weight decomposition of polynomials
//! on symmetric matrices.

pub mod decomposition;
pub mod momentum;
pub mod poisson;
pub mod poly;

pub use decomposition::{monomial_decomposition, restriction_kernel, Exponents, Restriction};
pub use momentum::{
    momentum_o, momentum_sp, sp_residual, symmetric_projection, symplectic_form, ParticleConfig,
    SymmetricProjection,
};
pub use poisson::{
    canoe_point, canoe_tau, classify_stratum, numerical_rank, reduce_point, semicone_point,
    PhasePoint, PoissonTable,
};
pub use poly::{Monomial, PolyFunction};
