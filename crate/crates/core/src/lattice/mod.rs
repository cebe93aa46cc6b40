//! Grid representation of `H`, `J_z`, `p_i` and the hidden integrals `A_i`,
//! with residual convergence studies of their algebra.

mod commutator;
mod grid;
mod ladder;
mod ops;

pub use commutator::*;
pub use grid::*;
pub use ladder::*;
pub use ops::*;
