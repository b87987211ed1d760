//! Affine automorphic functions of closed-form entire functions.
//!
//! Given an entire function `f`, the crate locates the critical points of
//! `f`, and at each critical point `z₀` enumerates the maps
//! `Φ(z) = e^{iπθ} z + b` with `θ = 2k/n` and `Φ(z₀) = z₀`, where `n` is the
//! order of the zero of `f − f(z₀)` at `z₀`. Each candidate is then checked
//! against `f(Φ(z)) = f(z)`, exactly for Gaussian-rational polynomials and
//! numerically otherwise.

pub mod expr;
pub mod series;
pub mod roots;
pub mod serde_complex;
pub mod symmetry;
pub mod cli;
