//! Descent via 2-isogeny on elliptic curves y^2 = x^3 + ax over the
//! rationals and their quadratic twists.
//!
//! The crate computes certified phi- and phi-hat-Selmer groups by deciding
//! local solvability of the quartic torsors d y^2 = d^2 + e x^4 at every bad
//! place, derives upper bounds on dim_F2 Sha[2] (with the parity refinement
//! under a finiteness assumption), searches for twist parameters meeting the
//! congruence/splitting gates that force those bounds to vanish, runs the
//! imaginary-quadratic #K(S,2) = 8 pipeline, and evaluates the computable
//! local/global cohomology growth bounds.
//!
//! Modules:
//! - [`arith`] — exact integer kernel (primality, factoring, Jacobi symbols)
//! - [`localfield`] — completions of Q, Hilbert symbols, proof-carrying
//!   torsor solvability (including the unramified quadratic extension of Q_2)
//! - [`descent`] — bad sets, the field Selmer group Q(S,2), Selmer reports,
//!   Sha[2] bounds
//! - [`twistlab`] — twist condition gates, twist searches, genus theory, the
//!   imaginary-quadratic pipeline
//! - [`cohomgrowth`] — local cohomology orders at good primes, growth and
//!   Tamagawa-ratio lower bounds, split-prime searches
//!
//! Everything is exact integer/rational arithmetic; no floating point enters
//! any bound.

pub use num_rational;

pub mod arith;
pub mod cohomgrowth;
pub mod descent;
pub mod localfield;
pub mod twistlab;
