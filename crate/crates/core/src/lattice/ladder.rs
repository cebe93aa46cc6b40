//! Ladder action of `A_+ = A_x + i A_y` on computed bound states, and the
//! Casimir–energy relation.

use serde::Serialize;

use super::grid::{PlaneGrid, SpinorField};
use super::ops::{LatticeCoupling, PlaneOperators};
use crate::radial::{BoundState, Multiplet, RadialGrid, Sector, Spectrum};
use crate::{Error, InteractionSpec, Result, C64};

/// Sample a radial bound state on the plane:
/// `Ψ_c(x) = u_c(r)/√r · e^{i ℓ_c φ}`.
///
/// `ψ = u/√r` is interpolated with a cubic (Catmull–Rom) through the radial
/// nodes, using `ψ(-r) = (-1)^ℓ ψ(r)` for the point below the first node.
/// Outside the radial box the field is zero.
pub fn lift_state(state: &BoundState, sector: &Sector, radial: &RadialGrid, plane: &PlaneGrid) -> SpinorField {
    let dim = sector.channels.len();
    let mut f = SpinorField::zeros(*plane, sector.two_s);
    let h = radial.spacing();
    let profiles: Vec<Vec<C64>> = state
        .channels
        .iter()
        .map(|u| u.iter().enumerate().map(|(i, v)| v / radial.node(i).sqrt()).collect())
        .collect();
    for p in 0..plane.len() {
        let (x, y) = plane.point(p);
        let r = x.hypot(y);
        let phi = y.atan2(x);
        for (c, ch) in sector.channels.iter().enumerate() {
            let v = interpolate(&profiles[c], ch.ell, h, r);
            if v != C64::new(0.0, 0.0) {
                f.data[p * dim + c] = v * C64::from_polar(1.0, f64::from(ch.ell) * phi);
            }
        }
    }
    f
}

fn interpolate(values: &[C64], ell: i32, h: f64, r: f64) -> C64 {
    let n = values.len();
    // node i sits at (i + 1/2) h
    let t = r / h - 0.5;
    if t >= (n - 1) as f64 {
        return C64::new(0.0, 0.0);
    }
    let mirror = if ell.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let at = |i: isize| -> C64 {
        if i < 0 {
            values[(-i - 1) as usize] * mirror
        } else if (i as usize) < n {
            values[i as usize]
        } else {
            C64::new(0.0, 0.0)
        }
    };
    let i0 = t.floor() as isize;
    let u = t - i0 as f64;
    let (p0, p1, p2, p3) = (at(i0 - 1), at(i0), at(i0 + 1), at(i0 + 2));
    // Catmull–Rom on a uniform grid
    let u2 = u * u;
    let u3 = u2 * u;
    (p1 * 2.0 + (p2 - p0) * u + (p0 * 2.0 - p1 * 5.0 + p2 * 4.0 - p3) * u2 + (p1 * 3.0 - p0 - p2 * 3.0 + p3) * u3) * 0.5
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    /// The target sector holds members of the same multiplet.
    Raise,
    /// The target sector is covered but holds no member: `A_+` should annihilate.
    Top,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LadderStep {
    pub kind: StepKind,
    pub from_two_jz: i32,
    pub level_index: usize,
    pub to_two_jz: i32,
    /// `‖A_+ψ‖ / ‖ψ‖`.
    pub norm_ratio: f64,
    /// Fraction of `‖A_+ψ‖²` inside the span of the target members.
    pub overlap: Option<f64>,
    pub leakage: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LadderReport {
    pub energy: f64,
    pub inferred_two_j: Option<i32>,
    pub plane: PlaneGrid,
    pub steps: Vec<LadderStep>,
}

impl LadderReport {
    pub fn max_top_ratio(&self) -> Option<f64> {
        self.steps
            .iter()
            .filter(|s| s.kind == StepKind::Top)
            .map(|s| s.norm_ratio)
            .reduce(f64::max)
    }

    pub fn min_overlap(&self) -> Option<f64> {
        self.steps.iter().filter_map(|s| s.overlap).reduce(f64::min)
    }
}

fn find<'a>(spectra: &'a [Spectrum], two_jz: i32) -> Option<&'a Spectrum> {
    spectra.iter().find(|s| s.sector.two_jz == two_jz)
}

fn lift_member(spectrum: &Spectrum, level_index: usize, plane: &PlaneGrid) -> SpinorField {
    lift_state(&spectrum.states[level_index], &spectrum.sector, &spectrum.grid, plane)
}

/// Modified Gram–Schmidt; drops vectors that are numerically dependent.
fn orthonormalize(vectors: Vec<SpinorField>) -> Vec<SpinorField> {
    let mut basis: Vec<SpinorField> = Vec::new();
    for mut v in vectors {
        let before = v.norm();
        for e in &basis {
            let c = e.inner(&v);
            v.axpy(-c, e);
        }
        let after = v.norm();
        if after > 1e-8 * before {
            v.scale(C64::from(1.0 / after));
            basis.push(v);
        }
    }
    basis
}

/// Apply `A_+` to every member of `multiplet` whose sector `j_z + 1` was
/// solved, and compare with that sector's members of the same multiplet.
pub fn ladder_check(
    spectra: &[Spectrum],
    spec: &InteractionSpec,
    mass: f64,
    multiplet: &Multiplet,
    plane: &PlaneGrid,
) -> Result<LadderReport> {
    let ops = PlaneOperators::new(*plane, &LatticeCoupling::from(spec), mass)?;
    let sectors = multiplet.sectors();
    let checkable: Vec<i32> = sectors
        .iter()
        .copied()
        .filter(|jz| find(spectra, jz + 2).is_some())
        .collect();
    if checkable.is_empty() {
        return Err(Error::MultipletNotAdjacent);
    }
    let mut steps = Vec::new();
    for from in checkable {
        let to = from + 2;
        let source = find(spectra, from).ok_or(Error::MultipletNotAdjacent)?;
        let target = find(spectra, to).ok_or(Error::MultipletNotAdjacent)?;
        let basis = orthonormalize(
            multiplet
                .members_in(to)
                .map(|m| lift_member(target, m.level_index, plane))
                .collect(),
        );
        for m in multiplet.members_in(from) {
            let mut psi = lift_member(source, m.level_index, plane);
            let n = psi.norm();
            psi.scale(C64::from(1.0 / n));
            let raised = ops.a_plus(&psi);
            let norm = raised.norm();
            let (kind, overlap) = if basis.is_empty() {
                (StepKind::Top, None)
            } else {
                let inside: f64 = basis.iter().map(|e| e.inner(&raised).norm_sqr()).sum();
                (StepKind::Raise, Some(inside / (norm * norm)))
            };
            steps.push(LadderStep {
                kind,
                from_two_jz: from,
                level_index: m.level_index,
                to_two_jz: to,
                norm_ratio: norm,
                overlap,
                leakage: overlap.map(|o| 1.0 - o),
            });
        }
    }
    Ok(LadderReport {
        energy: multiplet.energy,
        inferred_two_j: multiplet.inferred_two_j,
        plane: *plane,
        steps,
    })
}

/// How to size the plane grid for a ladder check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LadderGrid {
    /// Spacing in units of the level's length scale `1/√(-2mE)`.
    pub relative_spacing: f64,
    /// The box must hold all but this fraction of every member's norm.
    /// Fields that reach the box edge are hit hard by the zero-ghost
    /// derivatives, so this should be tiny.
    pub tail: f64,
}

impl Default for LadderGrid {
    fn default() -> Self {
        Self {
            relative_spacing: 0.025,
            tail: 1e-12,
        }
    }
}

/// Smallest node radius beyond which at most `tail` of the norm remains.
pub fn support_radius(state: &BoundState, radial: &RadialGrid, tail: f64) -> f64 {
    let h = radial.spacing();
    let n = radial.n_points();
    let total: f64 = state.channels.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>() * h;
    let mut outside = 0.0;
    for i in (0..n).rev() {
        let here: f64 = state.channels.iter().map(|u| u[i].norm_sqr()).sum::<f64>() * h;
        if outside + here > tail * total {
            return radial.face_after(i);
        }
        outside += here;
    }
    radial.face_after(0)
}

/// Plane grid for one multiplet: half extent from the members' support,
/// spacing from the level's length scale, points per axis rounded up to even.
pub fn ladder_plane(spectra: &[Spectrum], multiplet: &Multiplet, mass: f64, cfg: &LadderGrid) -> Result<PlaneGrid> {
    if !(multiplet.energy < 0.0) {
        return Err(Error::InvalidParameter(format!("ladder check needs a bound level, got E = {}", multiplet.energy)));
    }
    if !(cfg.relative_spacing > 0.0) || !(cfg.tail > 0.0) {
        return Err(Error::InvalidParameter("ladder grid spacing and tail must be positive".into()));
    }
    let mut extent: f64 = 0.0;
    for m in &multiplet.members {
        let sp = find(spectra, m.two_jz).ok_or(Error::MultipletNotAdjacent)?;
        extent = extent.max(support_radius(&sp.states[m.level_index], &sp.grid, cfg.tail));
    }
    let spacing = cfg.relative_spacing / (-2.0 * mass * multiplet.energy).sqrt();
    let mut n = (2.0 * extent / spacing).ceil() as usize + 1;
    n += n % 2;
    PlaneGrid::new(extent, n.max(super::grid::MIN_PLANE_POINTS))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CasimirReport {
    pub energy: f64,
    pub two_j: i32,
    pub two_k: i32,
    pub alpha_abs: f64,
    /// `j(j+1)`.
    pub lhs: f64,
    /// `-1/4 - (m/2)|α_k|²/E`.
    pub rhs: f64,
    pub rel_dev: f64,
}

/// `(j(j+1), -1/4 - (m/2)|α|²/E)`.
pub fn casimir_sides(two_j: i32, energy: f64, alpha_abs: f64, mass: f64) -> (f64, f64) {
    let j = f64::from(two_j) / 2.0;
    (j * (j + 1.0), -0.25 - 0.5 * mass * alpha_abs * alpha_abs / energy)
}

/// Check `J² = -1/4 - (m/2)|α_k|²/E` for one multiplet.
///
/// `j` is the one inferred from the sector counts; when that is only a lower
/// bound the matched closed-form level supplies it. `|α_k|` is that of the
/// channel pair the members live in.
pub fn casimir_check(multiplet: &Multiplet, spec: &InteractionSpec, mass: f64) -> Result<CasimirReport> {
    if !(multiplet.energy < 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Casimir check needs a bound level, got E = {}",
            multiplet.energy
        )));
    }
    let two_j = match (multiplet.inferred_two_j, multiplet.lower_bound, multiplet.predicted) {
        (Some(j), false, _) => j,
        (_, _, Some(p)) => p.two_j,
        (Some(j), true, None) => j,
        (None, _, None) => {
            return Err(Error::InvalidParameter("multiplet has no inferred j".into()));
        }
    };
    let two_k = match (multiplet.pair_labels.as_slice(), multiplet.predicted) {
        ([k], _) => *k,
        (_, Some(p)) => p.two_k,
        _ => return Err(Error::InvalidParameter("multiplet has no channel pair".into())),
    };
    let alpha_abs = spec
        .alpha(two_k)
        .ok_or_else(|| Error::InvalidParameter(format!("no coefficient for 2k = {two_k}")))?
        .norm();
    let (lhs, rhs) = casimir_sides(two_j, multiplet.energy, alpha_abs, mass);
    Ok(CasimirReport {
        energy: multiplet.energy,
        two_j,
        two_k,
        alpha_abs,
        lhs,
        rhs,
        rel_dev: ((rhs - lhs) / lhs).abs(),
    })
}
