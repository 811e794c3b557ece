//! Oscillatory integrals `I(λ,s) = ∬ e^{iλ(φ(x) − s·x)} a(x) dx` whose phase φ has a
//! corank-two D-type singularity at the origin.
//!
//! The crate has two halves that deliberately do not share arithmetic:
//!
//! * exact lattice/series layer (`rat`, `poly`, `newton`, `normalform`) — everything is
//!   `BigRational`, no floats, so Newton distances and the discrete invariants (m, n)
//!   come out as identities, and
//! * numeric layer (`phase`, `oscint`, `randol`) — f64 evaluation of phase families,
//!   oscillation-aware adaptive quadrature and the Randol maximal-function experiments
//!   (decay fits, annulus sums, critical Lebesgue exponents).

pub mod newton;
pub mod normalform;
pub mod oscint;
pub mod phase;
pub mod poly;
pub mod randol;
pub mod rat;

pub use rat::Rat;
