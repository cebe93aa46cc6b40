//! Superintegrable planar Hamiltonians for a neutral particle of arbitrary spin.
//!
//! The Hamiltonian is `H = p²/2m + μ(s, n)/|x|` in the plane, where the spin
//! matrix `μ` is anti-diagonal in the `|s,k⟩` basis and carries one complex
//! coefficient `α_k` per spin projection (with `α_k* = α_{-k}`). Such systems
//! keep two extra conserved integrals `A_x, A_y` which, together with
//! `J_z = L_z + s_z`, close into a hidden SO(3) on the bound spectrum.
//!
//! Layout:
//!
//! * [`spin`] builds exact spin-s matrices.
//! * [`interaction`] builds and validates `μ` from `α_k` (matrix-element form)
//!   or from the operator polynomial coefficients `β_k`.
//! * [`radial`] splits the problem into fixed-`J_z` coupled-channel radial
//!   problems, solves their bound states and groups them into multiplets.
//! * [`lattice`] represents `H`, `J_z`, `p_i` and `A_i` on a 2D grid and
//!   checks the integral algebra by residual convergence studies.
//!
//! Half-integer quantities (`k`, `j_z`, `j`) are stored as doubled integers.

pub mod convergence;
pub mod error;
pub mod halfint;
pub mod interaction;
pub mod lattice;
pub mod radial;
pub mod spin;

pub use error::{Error, Result};
pub use halfint::HalfInt;
pub use interaction::{
    betas_to_alphas, check_conditions, mu_from_alphas, mu_from_betas, mu_squared_diagonal,
    preset, BetaSpec, ConditionReport, InteractionSpec, MuMatrix, Preset,
};
pub use spin::{build_spin_rep, SpinRep};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Map over a slice, in parallel when the `parallel` feature is on. Output
/// order always follows input order.
pub(crate) fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}
