use serde::Serialize;

use super::grid::{PlaneGrid, SpinorField};
use crate::interaction::InteractionSpec;
use crate::spin::two_k_at;
use crate::{Error, Result, C64};

const I: C64 = C64::new(0.0, 1.0);

/// Potential model used on the lattice: `V = M/|x|²` with
/// `M = |x|^γ (μ(φ) + d·1)`.
///
/// The physical system is `γ = 1`, `d = 0`. The other knobs exist for the
/// negative controls, which must break the integral algebra. The `α_k` are
/// taken as given, so non-hermitian coefficient sets can be represented too.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticeCoupling {
    pub two_s: i32,
    pub alphas: Vec<C64>,
    pub diag_shift: f64,
    pub exponent: f64,
    pub reading: IndexReading,
}

/// How the position factor in the potential part of `A_i` is indexed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexReading {
    /// `-m ε_ij x_j`: `A_x ∋ -m y`, `A_y ∋ +m x`. Reduces to the known
    /// spin-½ integrals and is the one that commutes with `H`.
    #[default]
    Contracted,
    /// `-m ε_ij x_i`: `A_x ∋ -m x`, `A_y ∋ +m y`. Kept as a negative control.
    Literal,
}

impl From<&InteractionSpec> for LatticeCoupling {
    fn from(spec: &InteractionSpec) -> Self {
        Self {
            two_s: spec.two_s(),
            alphas: spec.alphas().to_vec(),
            diag_shift: 0.0,
            exponent: 1.0,
            reading: IndexReading::Contracted,
        }
    }
}

impl LatticeCoupling {
    pub fn with_diag_shift(mut self, d: f64) -> Self {
        self.diag_shift = d;
        self
    }

    pub fn with_exponent(mut self, gamma: f64) -> Self {
        self.exponent = gamma;
        self
    }

    pub fn with_reading(mut self, reading: IndexReading) -> Self {
        self.reading = reading;
        self
    }

    pub fn dim(&self) -> usize {
        self.two_s as usize + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Axis {
    X,
    Y,
}

/// Discretized `H`, `L_z`, `J_z`, `p_i`, `A_i` on one grid.
///
/// Derivatives are central differences, the Laplacian is the 5-point stencil,
/// and values outside the box are zero.
#[derive(Debug, Clone)]
pub struct PlaneOperators {
    grid: PlaneGrid,
    two_s: i32,
    mass: f64,
    // per point and component: α_c e^{-2i k_c φ} |x|^{γ-2}
    anti: Vec<C64>,
    // per point: d |x|^{γ-2}
    diag: Vec<f64>,
    reading: IndexReading,
}

impl PlaneOperators {
    pub fn new(grid: PlaneGrid, coupling: &LatticeCoupling, mass: f64) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::InvalidParameter(format!("mass must be positive, got {mass}")));
        }
        let dim = coupling.dim();
        if coupling.alphas.len() != dim {
            return Err(Error::CoefficientCount {
                two_s: coupling.two_s,
                expected: dim,
                got: coupling.alphas.len(),
            });
        }
        let mut anti = vec![C64::new(0.0, 0.0); grid.len() * dim];
        let mut diag = vec![0.0; grid.len()];
        for p in 0..grid.len() {
            let (x, y) = grid.point(p);
            let r = x.hypot(y);
            let phi = y.atan2(x);
            let radial = r.powf(coupling.exponent - 2.0);
            for (c, a) in coupling.alphas.iter().enumerate() {
                let two_k = two_k_at(coupling.two_s, c);
                anti[p * dim + c] = a * C64::from_polar(radial, -f64::from(two_k) * phi);
            }
            diag[p] = coupling.diag_shift * radial;
        }
        Ok(Self {
            grid,
            two_s: coupling.two_s,
            mass,
            anti,
            diag,
            reading: coupling.reading,
        })
    }

    pub fn grid(&self) -> &PlaneGrid {
        &self.grid
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    fn dim(&self) -> usize {
        self.two_s as usize + 1
    }

    fn check(&self, f: &SpinorField) {
        assert_eq!(f.grid, self.grid, "field lives on a different grid");
        assert_eq!(f.two_s, self.two_s, "field has a different spin");
    }

    /// Central difference `∂_axis f`.
    pub fn derivative(&self, f: &SpinorField, axis: Axis) -> SpinorField {
        self.check(f);
        let n = self.grid.n();
        let dim = self.dim();
        let inv = 1.0 / (2.0 * self.grid.spacing());
        let stride = match axis {
            Axis::X => n * dim,
            Axis::Y => dim,
        };
        let mut out = SpinorField::zeros(self.grid, self.two_s);
        for p in 0..self.grid.len() {
            let i = match axis {
                Axis::X => p / n,
                Axis::Y => p % n,
            };
            for c in 0..dim {
                let at = p * dim + c;
                let fwd = if i + 1 < n { f.data[at + stride] } else { C64::new(0.0, 0.0) };
                let bwd = if i > 0 { f.data[at - stride] } else { C64::new(0.0, 0.0) };
                out.data[at] = (fwd - bwd) * inv;
            }
        }
        out
    }

    pub fn laplacian(&self, f: &SpinorField) -> SpinorField {
        self.check(f);
        let n = self.grid.n();
        let dim = self.dim();
        let inv = 1.0 / self.grid.spacing().powi(2);
        let mut out = SpinorField::zeros(self.grid, self.two_s);
        for p in 0..self.grid.len() {
            let (ix, iy) = (p / n, p % n);
            for c in 0..dim {
                let at = p * dim + c;
                let mut s = -4.0 * f.data[at];
                if ix > 0 {
                    s += f.data[at - n * dim];
                }
                if ix + 1 < n {
                    s += f.data[at + n * dim];
                }
                if iy > 0 {
                    s += f.data[at - dim];
                }
                if iy + 1 < n {
                    s += f.data[at + dim];
                }
                out.data[at] = s * inv;
            }
        }
        out
    }

    /// `(M/|x|²) f` multiplied pointwise by `weight(x, y)`.
    fn potential_times(&self, f: &SpinorField, weight: impl Fn(f64, f64) -> C64) -> SpinorField {
        let dim = self.dim();
        let mut out = SpinorField::zeros(self.grid, self.two_s);
        for p in 0..self.grid.len() {
            let (x, y) = self.grid.point(p);
            let w = weight(x, y);
            for c in 0..dim {
                let v = self.anti[p * dim + c] * f.data[p * dim + dim - 1 - c] + self.diag[p] * f.data[p * dim + c];
                out.data[p * dim + c] = w * v;
            }
        }
        out
    }

    pub fn p(&self, f: &SpinorField, axis: Axis) -> SpinorField {
        let mut d = self.derivative(f, axis);
        d.scale(-I);
        d
    }

    pub fn h(&self, f: &SpinorField) -> SpinorField {
        let mut out = self.laplacian(f);
        out.scale(C64::from(-0.5 / self.mass));
        out.axpy(C64::from(1.0), &self.potential_times(f, |_, _| C64::from(1.0)));
        out
    }

    /// `L_z = -i(x ∂_y - y ∂_x)`, in one pass.
    pub fn lz(&self, f: &SpinorField) -> SpinorField {
        self.check(f);
        let n = self.grid.n();
        let dim = self.dim();
        let inv = 1.0 / (2.0 * self.grid.spacing());
        let zero = C64::new(0.0, 0.0);
        let mut out = SpinorField::zeros(self.grid, self.two_s);
        for p in 0..self.grid.len() {
            let (ix, iy) = (p / n, p % n);
            let (x, y) = (self.grid.coord(ix), self.grid.coord(iy));
            for c in 0..dim {
                let at = p * dim + c;
                let xp = if ix + 1 < n { f.data[at + n * dim] } else { zero };
                let xm = if ix > 0 { f.data[at - n * dim] } else { zero };
                let yp = if iy + 1 < n { f.data[at + dim] } else { zero };
                let ym = if iy > 0 { f.data[at - dim] } else { zero };
                out.data[at] = -I * (x * (yp - ym) - y * (xp - xm)) * inv;
            }
        }
        out
    }

    pub fn sz(&self, f: &SpinorField) -> SpinorField {
        self.check(f);
        let dim = self.dim();
        let mut out = f.clone();
        for (at, z) in out.data.iter_mut().enumerate() {
            *z *= 0.5 * f64::from(two_k_at(self.two_s, at % dim));
        }
        out
    }

    pub fn jz(&self, f: &SpinorField) -> SpinorField {
        let mut out = self.lz(f);
        let dim = self.dim();
        for (at, z) in out.data.iter_mut().enumerate() {
            *z += 0.5 * f64::from(two_k_at(self.two_s, at % dim)) * f.data[at];
        }
        out
    }

    /// `A_x = ½{p_x, J_z} - m (y/|x|) M/|x|`, `A_y = ½{p_y, J_z} + m (x/|x|) M/|x|`
    /// (with the default [`IndexReading`]).
    pub fn a(&self, f: &SpinorField, axis: Axis) -> SpinorField {
        let mut out = self.p(&self.jz(f), axis);
        out.axpy(C64::from(1.0), &self.jz(&self.p(f, axis)));
        out.scale(C64::from(0.5));
        let m = self.mass;
        let pot = match (axis, self.reading) {
            (Axis::X, IndexReading::Contracted) => self.potential_times(f, |_, y| C64::from(-m * y)),
            (Axis::Y, IndexReading::Contracted) => self.potential_times(f, |x, _| C64::from(m * x)),
            (Axis::X, IndexReading::Literal) => self.potential_times(f, |x, _| C64::from(-m * x)),
            (Axis::Y, IndexReading::Literal) => self.potential_times(f, |_, y| C64::from(m * y)),
        };
        out.axpy(C64::from(1.0), &pot);
        out
    }

    /// `A_+ = A_x + i A_y = ½{p_+, J_z} + i m (x + i y)/|x| · M/|x|`.
    pub fn a_plus(&self, f: &SpinorField) -> SpinorField {
        let p_plus = |g: &SpinorField| {
            let mut out = self.p(g, Axis::X);
            out.axpy(I, &self.p(g, Axis::Y));
            out
        };
        let mut out = p_plus(&self.jz(f));
        out.axpy(C64::from(1.0), &self.jz(&p_plus(f)));
        out.scale(C64::from(0.5));
        let m = self.mass;
        let pot = match self.reading {
            IndexReading::Contracted => self.potential_times(f, |x, y| C64::new(-m * y, m * x)),
            IndexReading::Literal => self.potential_times(f, |x, y| C64::new(-m * x, m * y)),
        };
        out.axpy(C64::from(1.0), &pot);
        out
    }
}

pub fn apply_h(f: &SpinorField, coupling: &LatticeCoupling, mass: f64) -> Result<SpinorField> {
    Ok(PlaneOperators::new(f.grid, coupling, mass)?.h(f))
}

pub fn apply_jz(f: &SpinorField, coupling: &LatticeCoupling, mass: f64) -> Result<SpinorField> {
    Ok(PlaneOperators::new(f.grid, coupling, mass)?.jz(f))
}

pub fn apply_a(f: &SpinorField, axis: Axis, coupling: &LatticeCoupling, mass: f64) -> Result<SpinorField> {
    Ok(PlaneOperators::new(f.grid, coupling, mass)?.a(f, axis))
}
