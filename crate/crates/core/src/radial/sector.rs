//! Fixed-`J_z` sectors and their discretized Hamiltonians.
//!
//! `J_z = L_z + s_z` commutes with `H`, so a state with definite `j_z` is a
//! sum over spin projections `k` of `ψ_k(r) e^{iℓφ} |s,k⟩` with `ℓ = j_z - k`.
//! The phase `e^{-2ikφ}` of `μ_{k,-k}` cancels against
//! `e^{i(ℓ_{-k} - ℓ_k)φ} = e^{2ikφ}`, leaving a purely radial coupling
//! `α_k / r` between channels `k` and `-k`.
//!
//! Each channel is discretized in flux form,
//! `-(1/2m) [ (1/r)(r ψ')' - ℓ²ψ/r² ]`, on the cell-centred grid and
//! symmetrized with `u = √r ψ`.

use nalgebra::DMatrix;
use serde::Serialize;

use super::grid::RadialGrid;
use crate::spin::two_k_at;
use crate::{Error, HalfInt, InteractionSpec, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Channel {
    pub two_k: i32,
    pub ell: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sector {
    pub two_s: i32,
    pub two_jz: i32,
    pub mass: f64,
    pub channels: Vec<Channel>,
}

impl Sector {
    pub fn jz(&self) -> HalfInt {
        HalfInt(self.two_jz)
    }

    pub fn channel_index(&self, two_k: i32) -> Option<usize> {
        self.channels.iter().position(|c| c.two_k == two_k)
    }
}

pub fn build_sector(spec: &InteractionSpec, two_jz: i32, mass: f64) -> Result<Sector> {
    let two_s = spec.two_s();
    if !(mass > 0.0) || !mass.is_finite() {
        return Err(Error::InvalidParameter(format!("mass must be positive, got {mass}")));
    }
    if (two_jz - two_s).rem_euclid(2) != 0 {
        return Err(Error::SectorParity {
            two_jz,
            two_s,
            allowed: if two_s % 2 == 0 { "even" } else { "odd" },
        });
    }
    let channels = (0..spec.dim())
        .map(|i| {
            let two_k = two_k_at(two_s, i);
            Channel {
                two_k,
                ell: (two_jz - two_k) / 2,
            }
        })
        .collect();
    Ok(Sector {
        two_s,
        two_jz,
        mass,
        channels,
    })
}

/// Tridiagonal kinetic + centrifugal block of one channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelBlock {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

/// `α/r` coupling from channel `row` to channel `col` (`row == col` for `k = 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupling {
    pub row: usize,
    pub col: usize,
    pub alpha: C64,
}

/// Block-structured sector Hamiltonian. Channel-major ordering: index
/// `c * n_points + i` is channel `c` at node `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorHamiltonian {
    pub sector: Sector,
    pub grid: RadialGrid,
    pub blocks: Vec<ChannelBlock>,
    pub couplings: Vec<Coupling>,
    pub inv_r: Vec<f64>,
}

impl SectorHamiltonian {
    pub fn n_channels(&self) -> usize {
        self.blocks.len()
    }

    pub fn size(&self) -> usize {
        self.n_channels() * self.grid.n_points()
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let n = self.grid.n_points();
        let mut m = DMatrix::zeros(self.size(), self.size());
        for (c, b) in self.blocks.iter().enumerate() {
            let o = c * n;
            for i in 0..n {
                m[(o + i, o + i)] += C64::from(b.diag[i]);
                if i + 1 < n {
                    m[(o + i, o + i + 1)] = C64::from(b.off[i]);
                    m[(o + i + 1, o + i)] = C64::from(b.off[i]);
                }
            }
        }
        for cp in &self.couplings {
            for i in 0..n {
                m[(cp.row * n + i, cp.col * n + i)] += cp.alpha * self.inv_r[i];
            }
        }
        m
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let n = self.grid.n_points();
        let mut out = vec![C64::new(0.0, 0.0); self.size()];
        for (c, b) in self.blocks.iter().enumerate() {
            let o = c * n;
            for i in 0..n {
                let mut acc = v[o + i] * b.diag[i];
                if i > 0 {
                    acc += v[o + i - 1] * b.off[i - 1];
                }
                if i + 1 < n {
                    acc += v[o + i + 1] * b.off[i];
                }
                out[o + i] = acc;
            }
        }
        for cp in &self.couplings {
            for i in 0..n {
                out[cp.row * n + i] += cp.alpha * self.inv_r[i] * v[cp.col * n + i];
            }
        }
        out
    }

    /// Largest `|H_ab - conj(H_ba)|` over the coupling entries (the kinetic
    /// blocks are real symmetric by construction).
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for cp in &self.couplings {
            let partner = self
                .couplings
                .iter()
                .find(|o| o.row == cp.col && o.col == cp.row)
                .map(|o| o.alpha)
                .unwrap_or_default();
            worst = worst.max((cp.alpha - partner.conj()).norm());
        }
        worst
    }
}

pub(crate) fn channel_block(grid: &RadialGrid, ell: i32, mass: f64) -> ChannelBlock {
    let n = grid.n_points();
    let h = grid.spacing();
    let scale = 1.0 / (2.0 * mass);
    let l2 = f64::from(ell * ell);
    let diag = (0..n)
        .map(|i| {
            let r = grid.node(i);
            let inner = if i == 0 { 0.0 } else { grid.face_after(i - 1) };
            let outer = grid.face_after(i);
            scale * ((inner + outer) / (r * h * h) + l2 / (r * r))
        })
        .collect();
    let off = (0..n.saturating_sub(1))
        .map(|i| -scale * grid.face_after(i) / (h * h * (grid.node(i) * grid.node(i + 1)).sqrt()))
        .collect();
    ChannelBlock { diag, off }
}

/// Largest spacing accepted for a given spec: ten nodes per `1/(m max|α|)`.
pub fn max_spacing(spec: &InteractionSpec, mass: f64) -> Option<f64> {
    let a = spec.max_abs_alpha();
    (a > 0.0).then(|| 1.0 / (10.0 * mass * a))
}

pub fn assemble(sector: &Sector, spec: &InteractionSpec, grid: &RadialGrid) -> Result<SectorHamiltonian> {
    if sector.two_s != spec.two_s() {
        return Err(Error::SpinMismatch {
            what: "sector",
            expected: spec.two_s(),
            got: sector.two_s,
        });
    }
    spec.validate()?;
    if let Some(limit) = max_spacing(spec, sector.mass) {
        if grid.spacing() > limit {
            return Err(Error::GridTooCoarse {
                spacing: grid.spacing(),
                limit,
            });
        }
    }

    let blocks = sector
        .channels
        .iter()
        .map(|ch| channel_block(grid, ch.ell, sector.mass))
        .collect();
    let dim = sector.channels.len();
    let couplings = spec
        .alphas()
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm() != 0.0)
        .map(|(row, &alpha)| Coupling {
            row,
            col: dim - 1 - row,
            alpha,
        })
        .collect();
    let inv_r = grid.nodes().iter().map(|r| 1.0 / r).collect();

    Ok(SectorHamiltonian {
        sector: sector.clone(),
        grid: *grid,
        blocks,
        couplings,
        inv_r,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{preset, Preset};

    #[test]
    fn spin_half_channels() {
        let spec = InteractionSpec::zero(1).unwrap();
        let s = build_sector(&spec, 1, 1.0).unwrap();
        assert_eq!(
            s.channels,
            vec![Channel { two_k: 1, ell: 0 }, Channel { two_k: -1, ell: 1 }]
        );
    }

    #[test]
    fn spin_one_channels() {
        let spec = InteractionSpec::zero(2).unwrap();
        let s = build_sector(&spec, 0, 1.0).unwrap();
        let pairs: Vec<(i32, i32)> = s.channels.iter().map(|c| (c.two_k, c.ell)).collect();
        assert_eq!(pairs, vec![(2, -1), (0, 0), (-2, 1)]);
    }

    #[test]
    fn parity_mismatch() {
        let spec = InteractionSpec::zero(1).unwrap();
        match build_sector(&spec, 2, 1.0) {
            Err(Error::SectorParity { allowed, .. }) => assert_eq!(allowed, "odd"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn dense_matches_apply() {
        let spec = InteractionSpec::from_real_params(2, &[0.4, -0.3, -0.7]).unwrap();
        let grid = RadialGrid::new(2.0, 24).unwrap();
        let sector = build_sector(&spec, 2, 1.3).unwrap();
        let h = assemble(&sector, &spec, &grid).unwrap();
        let dense = h.to_dense();
        let v: Vec<C64> = (0..h.size())
            .map(|i| C64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let dv = &dense * nalgebra::DVector::from_vec(v.clone());
        let av = h.apply(&v);
        for (a, b) in av.iter().zip(dv.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
        let herm = (&dense - dense.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(herm < 1e-12);
        assert!(h.hermiticity_error() < 1e-12);
    }

    #[test]
    fn coupling_blocks_are_radially_diagonal() {
        let spec = preset(Preset::Dipole { k: 1.0 }, 1).unwrap();
        let grid = RadialGrid::new(3.0, 40).unwrap();
        let sector = build_sector(&spec, 1, 1.0).unwrap();
        let d = assemble(&sector, &spec, &grid).unwrap().to_dense();
        let n = 40;
        for i in 0..n {
            for j in 0..n {
                let v = d[(i, n + j)];
                if i == j {
                    let expected = C64::new(0.0, -1.0) / grid.node(i);
                    assert!((v - expected).norm() < 1e-14);
                } else {
                    assert_eq!(v, C64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn coarse_grid_rejected() {
        let spec = preset(Preset::Dipole { k: 1.0 }, 1).unwrap();
        let grid = RadialGrid::new(60.0, 100).unwrap();
        let sector = build_sector(&spec, 1, 1.0).unwrap();
        assert!(matches!(
            assemble(&sector, &spec, &grid),
            Err(Error::GridTooCoarse { .. })
        ));
    }
}
