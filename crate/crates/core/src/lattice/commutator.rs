use serde::Serialize;

use super::grid::{PacketRecipe, PlaneGrid, SpinorField};
use super::ops::{Axis, LatticeCoupling, PlaneOperators};
use crate::convergence::{fit_order, richardson};
use crate::{Error, Result, C64};

const I: C64 = C64::new(0.0, 1.0);

/// Nominal order of the discretization; used to extrapolate the fitted
/// `[A_x, A_y]` constant.
pub const NOMINAL_ORDER: f64 = 2.0;

/// Below this fitted order a residual counts as non-convergent.
pub const NON_CONVERGENT_ORDER: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Pair {
    #[serde(rename = "J_z,H")]
    JzH,
    #[serde(rename = "A_x,H")]
    AxH,
    #[serde(rename = "A_y,H")]
    AyH,
    #[serde(rename = "J_z,A_x")]
    JzAx,
    #[serde(rename = "J_z,A_y")]
    JzAy,
    #[serde(rename = "A_x,A_y")]
    AxAy,
}

impl Pair {
    pub const ALL: [Pair; 6] = [Pair::JzH, Pair::AxH, Pair::AyH, Pair::JzAx, Pair::JzAy, Pair::AxAy];

    pub fn name(self) -> &'static str {
        match self {
            Pair::JzH => "J_z,H",
            Pair::AxH => "A_x,H",
            Pair::AyH => "A_y,H",
            Pair::JzAx => "J_z,A_x",
            Pair::JzAy => "J_z,A_y",
            Pair::AxAy => "A_x,A_y",
        }
    }

    pub fn with_hamiltonian(self) -> bool {
        matches!(self, Pair::JzH | Pair::AxH | Pair::AyH)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// What a residual study must show to pass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualCriteria {
    pub order_min: f64,
    pub order_max: f64,
    /// Optional cap on the finest-grid residual, relative to `‖O₁O₂ψ‖`.
    pub max_final_relative: Option<f64>,
}

impl Default for ResidualCriteria {
    fn default() -> Self {
        Self {
            order_min: 1.6,
            order_max: 2.4,
            max_final_relative: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommutatorReport {
    pub pair: Pair,
    /// Strictly decreasing.
    pub spacings: Vec<f64>,
    /// `‖[O₁,O₂]ψ − RHS ψ‖ / ‖ψ‖` per spacing.
    pub residuals: Vec<f64>,
    /// Same residuals divided by `‖O₁O₂ψ‖` instead.
    pub relative_residuals: Vec<f64>,
    pub order: f64,
    pub order_fit_residual: f64,
    pub verdict: Verdict,
    /// `c` in `[A_x, A_y] = -i c ½{J_z, H}`, extrapolated to zero spacing.
    pub fitted_constant: Option<f64>,
    /// The per-spacing least-squares values behind `fitted_constant`.
    pub fitted_constants: Option<Vec<f64>>,
}

impl CommutatorReport {
    pub fn non_convergent(&self) -> bool {
        !(self.order >= NON_CONVERGENT_ORDER)
    }
}

struct Sample {
    commutator: SpinorField,
    // what the commutator should equal; for (A_x,A_y) this is ½{J_z,H}ψ and the
    // constant is fitted afterwards
    rhs: SpinorField,
    scale: f64,
    psi_norm: f64,
}

fn sample(pair: Pair, ops: &PlaneOperators, psi: &SpinorField) -> Sample {
    let o1 = |f: &SpinorField| match pair {
        Pair::JzH | Pair::JzAx | Pair::JzAy => ops.jz(f),
        Pair::AxH | Pair::AxAy => ops.a(f, Axis::X),
        Pair::AyH => ops.a(f, Axis::Y),
    };
    let o2 = |f: &SpinorField| match pair {
        Pair::JzH | Pair::AxH | Pair::AyH => ops.h(f),
        Pair::JzAx => ops.a(f, Axis::X),
        Pair::JzAy | Pair::AxAy => ops.a(f, Axis::Y),
    };
    let o12 = o1(&o2(psi));
    let commutator = o12.sub(&o2(&o1(psi)));
    let rhs = match pair {
        Pair::JzH | Pair::AxH | Pair::AyH => SpinorField::zeros(*ops.grid(), psi.two_s),
        Pair::JzAx => {
            let mut v = ops.a(psi, Axis::Y);
            v.scale(I);
            v
        }
        Pair::JzAy => {
            let mut v = ops.a(psi, Axis::X);
            v.scale(-I);
            v
        }
        Pair::AxAy => {
            let mut v = ops.jz(&ops.h(psi));
            v.axpy(C64::from(1.0), &ops.h(&ops.jz(psi)));
            v.scale(C64::from(0.5));
            v
        }
    };
    Sample {
        commutator,
        rhs,
        scale: o12.norm(),
        psi_norm: psi.norm(),
    }
}

/// Least-squares `c` minimizing `‖C + i c S‖` over real `c`.
fn fit_constant(commutator: &SpinorField, s: &SpinorField) -> f64 {
    let mut t = s.clone();
    t.scale(-I);
    t.inner(commutator).re / t.inner(&t).re
}

/// Grids must be supplied coarse to fine.
fn check_grids(grids: &[PlaneGrid]) -> Result<()> {
    if grids.len() < 3 {
        return Err(Error::TooFewSpacings {
            needed: 3,
            got: grids.len(),
        });
    }
    if grids.windows(2).any(|w| !(w[1].spacing() < w[0].spacing())) {
        return Err(Error::InvalidGrid("plane grids must have strictly decreasing spacing".into()));
    }
    Ok(())
}

/// Residual convergence study of one commutator identity.
pub fn commutator_residual(
    pair: Pair,
    coupling: &LatticeCoupling,
    mass: f64,
    recipe: &PacketRecipe,
    grids: &[PlaneGrid],
    criteria: &ResidualCriteria,
) -> Result<Vec<CommutatorReport>> {
    commutator_study(&[pair], coupling, mass, recipe, grids, criteria)
}

/// Run several pairs over the same grids. Reports come back in the order of
/// `pairs`; the work itself may be spread over threads.
pub fn commutator_study(
    pairs: &[Pair],
    coupling: &LatticeCoupling,
    mass: f64,
    recipe: &PacketRecipe,
    grids: &[PlaneGrid],
    criteria: &ResidualCriteria,
) -> Result<Vec<CommutatorReport>> {
    check_grids(grids)?;
    if recipe.spin_weights.len() != coupling.dim() {
        return Err(Error::SpinMismatch {
            what: "packet spin weights",
            expected: coupling.two_s,
            got: recipe.spin_weights.len() as i32 - 1,
        });
    }
    // validate every grid up front so a bad packet is reported, not panicked on
    let prepared = grids
        .iter()
        .map(|g| Ok((PlaneOperators::new(*g, coupling, mass)?, recipe.build(g)?)))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(Pair, usize)> = pairs
        .iter()
        .flat_map(|p| (0..grids.len()).map(move |i| (*p, i)))
        .collect();
    let samples = crate::par_map(&jobs, |&(pair, i)| {
        let (ops, psi) = &prepared[i];
        sample(pair, ops, psi)
    });
    let spacings: Vec<f64> = grids.iter().map(|g| g.spacing()).collect();
    pairs
        .iter()
        .enumerate()
        .map(|(pi, &pair)| {
            let chunk = &samples[pi * grids.len()..(pi + 1) * grids.len()];
            let (fitted, constants) = if pair == Pair::AxAy {
                let cs: Vec<f64> = chunk.iter().map(|s| fit_constant(&s.commutator, &s.rhs)).collect();
                let n = cs.len();
                let c = richardson(
                    (spacings[n - 2], cs[n - 2]),
                    (spacings[n - 1], cs[n - 1]),
                    NOMINAL_ORDER,
                );
                (Some(c), Some(cs))
            } else {
                (None, None)
            };
            let mut residuals = Vec::with_capacity(chunk.len());
            let mut relative = Vec::with_capacity(chunk.len());
            for s in chunk {
                let mut expected = s.rhs.clone();
                if let Some(c) = fitted {
                    expected.scale(-I * c);
                }
                let r = s.commutator.sub(&expected).norm();
                residuals.push(r / s.psi_norm);
                relative.push(r / s.scale);
            }
            let fit = fit_order(&spacings, &residuals);
            let (order, order_fit_residual) = fit.map_or((f64::NAN, f64::NAN), |f| (f.order, f.fit_residual));
            let in_band = order >= criteria.order_min && order <= criteria.order_max;
            let small = criteria
                .max_final_relative
                .is_none_or(|cap| relative.last().is_some_and(|r| *r < cap));
            Ok(CommutatorReport {
                pair,
                spacings: spacings.clone(),
                residuals,
                relative_residuals: relative,
                order,
                order_fit_residual,
                verdict: if in_band && small { Verdict::Pass } else { Verdict::Fail },
                fitted_constant: fitted,
                fitted_constants: constants,
            })
        })
        .collect()
}

/// Packet used by default for the residual studies: centred at `(L/2, L/8)`,
/// width `L/20`, a small mean momentum and a generic spin mixture.
pub fn default_packet(half_extent: f64, two_s: i32) -> PacketRecipe {
    let dim = two_s as usize + 1;
    let spin_weights = (0..dim)
        .map(|c| C64::from_polar(1.0 / (1.0 + c as f64), std::f64::consts::FRAC_PI_2 * c as f64))
        .collect();
    PacketRecipe {
        center: (half_extent / 2.0, half_extent / 8.0),
        width: half_extent / 20.0,
        momentum: (0.3, -0.2),
        spin_weights,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interaction::{preset, Preset};

    fn dipole() -> LatticeCoupling {
        LatticeCoupling::from(&preset(Preset::Dipole { k: 1.0 }, 1).unwrap())
    }

    #[test]
    fn jz_commutes_with_h_at_second_order() {
        let grids = PlaneGrid::new(20.0, 64).unwrap().ladder(3);
        let r = commutator_residual(
            Pair::JzH,
            &dipole(),
            1.0,
            &default_packet(20.0, 1),
            &grids,
            &ResidualCriteria::default(),
        )
        .unwrap();
        let r = &r[0];
        assert!(r.residuals.windows(2).all(|w| w[1] < w[0]), "{:?}", r.residuals);
        assert!(r.order > 1.5, "order {}", r.order);
    }

    #[test]
    fn study_needs_three_decreasing_spacings() {
        let g = PlaneGrid::new(20.0, 64).unwrap();
        let crit = ResidualCriteria::default();
        let p = default_packet(20.0, 1);
        assert!(commutator_residual(Pair::JzH, &dipole(), 1.0, &p, &g.ladder(2), &crit).is_err());
        let backwards: Vec<_> = g.ladder(3).into_iter().rev().collect();
        assert!(commutator_residual(Pair::JzH, &dipole(), 1.0, &p, &backwards, &crit).is_err());
    }

    #[test]
    fn packet_must_fit_every_grid() {
        let g = PlaneGrid::new(20.0, 64).unwrap().ladder(3);
        let mut p = default_packet(20.0, 1);
        p.center = (19.0, 0.0);
        assert!(matches!(
            commutator_residual(Pair::JzH, &dipole(), 1.0, &p, &g, &ResidualCriteria::default()),
            Err(Error::InvalidPacket(_))
        ));
    }
}
