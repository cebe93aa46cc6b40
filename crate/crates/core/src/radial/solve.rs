//! Bound states of one sector.
//!
//! A sector splits exactly into independent pieces: each pair of channels
//! `(k, -k)` with `k > 0`, plus the lone `k = 0` channel for integer spin.
//! Rephasing channel `-k` by `e^{-i arg α_k}` makes each piece real
//! symmetric, and in interleaved ordering it is block tridiagonal.

use nalgebra::DMatrix;
use serde::Serialize;

use super::banded::BlockTridiag;
use super::grid::RadialGrid;
use super::sector::{Sector, SectorHamiltonian};
use crate::{Error, Result, C64};

/// Fraction of the box (from the outer wall) used for the confinement guard.
pub const EDGE_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenStrategy {
    /// Sturm bisection plus inverse iteration on each decoupled piece.
    #[default]
    Banded,
    /// Full dense hermitian eigendecomposition of the sector matrix.
    Dense,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolveOptions {
    /// Keep only energies below `-continuum_guard`. `None` uses
    /// `10 / (2 m r_max²)`.
    pub continuum_guard: Option<f64>,
    /// Drop states with more than this fraction of their norm in the outer
    /// [`EDGE_FRACTION`] of the box. These feel the wall.
    pub max_edge_weight: f64,
    pub strategy: EigenStrategy,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            continuum_guard: None,
            max_edge_weight: 1e-6,
            strategy: EigenStrategy::Banded,
        }
    }
}

impl SolveOptions {
    pub fn guard(&self, mass: f64, grid: &RadialGrid) -> f64 {
        self.continuum_guard
            .unwrap_or_else(|| default_continuum_guard(mass, grid.r_max()))
    }
}

pub fn default_continuum_guard(mass: f64, r_max: f64) -> f64 {
    10.0 / (2.0 * mass * r_max * r_max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundState {
    pub energy: f64,
    /// `2|k|` of the channel pair the state lives in.
    pub pair_two_k: i32,
    /// `u_c(r_i)` per channel, normalized so that `Σ_c Σ_i |u|² h = 1`.
    pub channels: Vec<Vec<C64>>,
    pub edge_weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub sector: Sector,
    pub grid: RadialGrid,
    /// Ascending energy.
    pub states: Vec<BoundState>,
}

impl Spectrum {
    pub fn energies(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.energy).collect()
    }

    pub fn two_jz(&self) -> i32 {
        self.sector.two_jz
    }
}

pub fn solve_bound(h: &SectorHamiltonian, opts: &SolveOptions) -> Result<Spectrum> {
    let guard = opts.guard(h.sector.mass, &h.grid);
    let mut states = match opts.strategy {
        EigenStrategy::Banded => solve_banded(h, -guard)?,
        EigenStrategy::Dense => solve_dense(h, -guard),
    };
    states.retain(|s| s.edge_weight <= opts.max_edge_weight);
    states.sort_by(|a, b| a.energy.total_cmp(&b.energy).then(b.pair_two_k.cmp(&a.pair_two_k)));
    Ok(Spectrum {
        sector: h.sector.clone(),
        grid: h.grid,
        states,
    })
}

/// Channel groups that decouple: `(k-channel, -k-channel)` or a lone `k = 0`.
fn pieces(h: &SectorHamiltonian) -> Vec<(usize, Option<usize>)> {
    let dim = h.n_channels();
    (0..dim.div_ceil(2))
        .map(|a| {
            let b = dim - 1 - a;
            (a, (b != a).then_some(b))
        })
        .collect()
}

fn coupling(h: &SectorHamiltonian, row: usize, col: usize) -> C64 {
    h.couplings
        .iter()
        .filter(|c| c.row == row && c.col == col)
        .map(|c| c.alpha)
        .sum()
}

fn solve_banded(h: &SectorHamiltonian, upper: f64) -> Result<Vec<BoundState>> {
    let n = h.grid.n_points();
    let mut out = Vec::new();
    for (a, b) in pieces(h) {
        let pair_two_k = h.sector.channels[a].two_k.abs();
        match b {
            None => {
                // k = 0: single channel with real potential α_0 / r
                let alpha0 = coupling(h, a, a).re;
                let blk = &h.blocks[a];
                let diag = (0..n).map(|i| blk.diag[i] + alpha0 * h.inv_r[i]).collect();
                let m = BlockTridiag::new(1, diag, blk.off.clone());
                for e in m.eigenvalues_below(upper) {
                    let x = m.eigenvector(e)?;
                    let mut channels = vec![vec![C64::new(0.0, 0.0); n]; h.n_channels()];
                    channels[a] = x.iter().map(|v| C64::from(*v)).collect();
                    out.push(finish(h, e, pair_two_k, channels));
                }
            }
            Some(b) => {
                let alpha = coupling(h, a, b);
                let strength = alpha.norm();
                let phase = if strength > 0.0 { alpha / strength } else { C64::new(1.0, 0.0) };
                let (ba, bb) = (&h.blocks[a], &h.blocks[b]);
                let mut diag = Vec::with_capacity(4 * n);
                for i in 0..n {
                    let c = strength * h.inv_r[i];
                    diag.extend([ba.diag[i], c, c, bb.diag[i]]);
                }
                let mut off = Vec::with_capacity(2 * n);
                for i in 0..n.saturating_sub(1) {
                    off.extend([ba.off[i], bb.off[i]]);
                }
                let m = BlockTridiag::new(2, diag, off);
                for e in m.eigenvalues_below(upper) {
                    let x = m.eigenvector(e)?;
                    let mut channels = vec![vec![C64::new(0.0, 0.0); n]; h.n_channels()];
                    channels[a] = (0..n).map(|i| C64::from(x[2 * i])).collect();
                    // u_b = conj(phase) w_b undoes the rephasing
                    channels[b] = (0..n).map(|i| phase.conj() * x[2 * i + 1]).collect();
                    out.push(finish(h, e, pair_two_k, channels));
                }
            }
        }
    }
    Ok(out)
}

fn solve_dense(h: &SectorHamiltonian, upper: f64) -> Vec<BoundState> {
    let n = h.grid.n_points();
    let dense: DMatrix<C64> = h.to_dense();
    let eig = dense.symmetric_eigen();
    let mut out = Vec::new();
    for (idx, &e) in eig.eigenvalues.iter().enumerate() {
        if e >= upper {
            continue;
        }
        let col = eig.eigenvectors.column(idx);
        let channels: Vec<Vec<C64>> = (0..h.n_channels())
            .map(|c| (0..n).map(|i| col[c * n + i]).collect())
            .collect();
        let weight = |c: usize| channels[c].iter().map(|z| z.norm_sqr()).sum::<f64>();
        let pair_two_k = pieces(h)
            .into_iter()
            .map(|(a, b)| (a, weight(a) + b.map_or(0.0, weight)))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .map(|(a, _)| h.sector.channels[a].two_k.abs())
            .unwrap_or(0);
        out.push(finish(h, e, pair_two_k, channels));
    }
    out
}

/// Normalize to `Σ|u|² h = 1`, fix the phase so the largest-magnitude
/// entry is real positive, and measure the edge weight.
fn finish(h: &SectorHamiltonian, energy: f64, pair_two_k: i32, mut channels: Vec<Vec<C64>>) -> BoundState {
    let spacing = h.grid.spacing();
    let n = h.grid.n_points();
    let total: f64 = channels.iter().flatten().map(|z| z.norm_sqr()).sum();
    let norm = (total * spacing).sqrt();

    let mut pivot = C64::new(1.0, 0.0);
    let mut best = -1.0;
    for ch in &channels {
        for z in ch {
            if z.norm() > best * (1.0 + 1e-12) {
                best = z.norm();
                pivot = *z;
            }
        }
    }
    let fix = if best > 0.0 { pivot.conj() / pivot.norm() } else { C64::new(1.0, 0.0) };
    for ch in channels.iter_mut() {
        for z in ch.iter_mut() {
            *z = *z * fix / norm;
        }
    }

    let edge_start = ((1.0 - EDGE_FRACTION) * n as f64).floor() as usize;
    let edge_weight: f64 = channels
        .iter()
        .map(|ch| ch[edge_start..].iter().map(|z| z.norm_sqr()).sum::<f64>())
        .sum::<f64>()
        * spacing;

    BoundState {
        energy,
        pair_two_k,
        channels,
        edge_weight,
    }
}

/// Solve every sector `two_jz_min, two_jz_min + 2, ..., two_jz_max`.
/// Results come back in ascending `two_jz` regardless of scheduling.
pub fn solve_sectors(
    spec: &crate::InteractionSpec,
    mass: f64,
    two_jz_range: (i32, i32),
    grid: &RadialGrid,
    opts: &SolveOptions,
) -> Result<Vec<Spectrum>> {
    let (lo, hi) = two_jz_range;
    if lo > hi {
        return Err(Error::InvalidParameter(format!("empty sector range {lo}..{hi}")));
    }
    let sectors = (lo..=hi)
        .step_by(2)
        .map(|two_jz| super::build_sector(spec, two_jz, mass))
        .collect::<Result<Vec<_>>>()?;
    let run = |sector: &Sector| -> Result<Spectrum> {
        let ham = super::assemble(sector, spec, grid)?;
        solve_bound(&ham, opts)
    };
    crate::par_map(&sectors, run).into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::{assemble, build_sector};
    use crate::{preset, InteractionSpec, Preset};

    fn dipole_sector(two_jz: i32, r_max: f64, n: usize) -> SectorHamiltonian {
        let spec = preset(Preset::Dipole { k: 1.0 }, 1).unwrap();
        let grid = RadialGrid::new(r_max, n).unwrap();
        let sector = build_sector(&spec, two_jz, 1.0).unwrap();
        assemble(&sector, &spec, &grid).unwrap()
    }

    #[test]
    fn zero_coupling_has_no_bound_states() {
        let spec = InteractionSpec::zero(2).unwrap();
        let grid = RadialGrid::new(30.0, 200).unwrap();
        let h = assemble(&build_sector(&spec, 0, 1.0).unwrap(), &spec, &grid).unwrap();
        let all = solve_bound(
            &h,
            &SolveOptions {
                continuum_guard: Some(-1e9),
                max_edge_weight: 1.0,
                ..Default::default()
            },
        )
        .unwrap();
        // every eigenvalue of the free radial operator is positive
        assert!(all.states.iter().all(|s| s.energy > 0.0));
        assert!(!all.states.is_empty());
        let bound = solve_bound(&h, &SolveOptions::default()).unwrap();
        assert!(bound.states.is_empty());
    }

    #[test]
    fn banded_matches_dense_on_small_grid() {
        let spec = InteractionSpec::from_real_params(2, &[0.8, -0.6, -0.5]).unwrap();
        let grid = RadialGrid::new(25.0, 260).unwrap();
        for two_jz in [-2, 0, 2] {
            let h = assemble(&build_sector(&spec, two_jz, 1.0).unwrap(), &spec, &grid).unwrap();
            let opts = SolveOptions {
                max_edge_weight: 1.0,
                ..Default::default()
            };
            let banded = solve_bound(&h, &opts).unwrap();
            let dense = solve_bound(
                &h,
                &SolveOptions {
                    strategy: EigenStrategy::Dense,
                    ..opts
                },
            )
            .unwrap();
            assert_eq!(banded.states.len(), dense.states.len());
            assert!(!banded.states.is_empty());
            for (b, d) in banded.states.iter().zip(&dense.states) {
                assert!((b.energy - d.energy).abs() < 1e-10, "{} vs {}", b.energy, d.energy);
                // eigenvector of H with the banded energy
                let v: Vec<C64> = b.channels.iter().flatten().copied().collect();
                let hv = h.apply(&v);
                let res: f64 = hv.iter().zip(&v).map(|(x, y)| (x - y * b.energy).norm_sqr()).sum::<f64>().sqrt();
                let vn: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                assert!(res / vn < 1e-8, "residual {}", res / vn);
            }
        }
    }

    #[test]
    fn normalization_and_phase_convention() {
        let h = dipole_sector(1, 30.0, 1500);
        let spec = solve_bound(&h, &SolveOptions::default()).unwrap();
        let hstep = h.grid.spacing();
        for s in &spec.states {
            let norm: f64 = s.channels.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>() * hstep;
            assert!((norm - 1.0).abs() < 1e-12);
            let big = s
                .channels
                .iter()
                .flatten()
                .max_by(|a, b| a.norm().total_cmp(&b.norm()))
                .unwrap();
            assert!(big.im.abs() < 1e-12 && big.re > 0.0);
        }
    }

    #[test]
    fn dipole_ground_level() {
        let h = dipole_sector(1, 30.0, 1500);
        let spec = solve_bound(&h, &SolveOptions::default()).unwrap();
        let e0 = spec.states[0].energy;
        assert!((e0 + 0.5).abs() / 0.5 < 5e-3, "e0 = {e0}");
    }

    #[test]
    fn deterministic_output() {
        let h = dipole_sector(3, 30.0, 800);
        let a = solve_bound(&h, &SolveOptions::default()).unwrap();
        let b = solve_bound(&h, &SolveOptions::default()).unwrap();
        assert_eq!(a, b);
    }
}
