//! Fixed-`J_z` coupled-channel radial problems and their bound spectra.

mod banded;
mod grid;
mod multiplet;
mod predict;
mod sector;
mod solve;

pub use banded::BlockTridiag;
pub use grid::{RadialGrid, MIN_RADIAL_POINTS};
pub use multiplet::{degeneracy_report, DegeneracyReport, IrrepCount, Member, Multiplet};
pub use predict::{level_energy, match_level, predicted_spectrum, LevelMatch, PredictedLevel};
pub use sector::{
    assemble, build_sector, max_spacing, Channel, ChannelBlock, Coupling, Sector, SectorHamiltonian,
};
pub use solve::{
    default_continuum_guard, solve_bound, solve_sectors, BoundState, EigenStrategy, SolveOptions,
    Spectrum, EDGE_FRACTION,
};
