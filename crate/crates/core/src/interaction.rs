//! The interaction matrix `μ(s, n)`.
//!
//! `μ` is anti-diagonal in the descending-`k` basis with entries
//! `μ_{k,-k}(φ) = α_k e^{-2ikφ}`, where `e^{iφ} = n_1 + i n_2`. Hermiticity
//! requires `α_k* = α_{-k}`, which leaves `2s+1` real parameters.
//!
//! The same matrix can be written as an operator polynomial in
//! `s_+ n_-`, its conjugate and `s_z`, with coefficients `β`. Term `j`
//! (`j = 0, 1, ...`) is
//!
//! ```text
//! β_{s-j} · Π_{i<j}(s_z - s + i) · (s_+ n_-)^{2s-2j} · Π_{i<j}(s_z + s - i)  + h.c.
//! ```
//!
//! The `s_z` fringe factors remove the action on the outermost `2j` states.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::spin::{two_k_at, SpinRep};
use crate::{Error, Result, C64};

/// Relative tolerance for `α_k* = α_{-k}` when validating a spec.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Absolute tolerance (scaled by the largest coefficient) for [`check_conditions`].
pub const CONDITION_TOL: f64 = 1e-13;

/// Coefficients `α_k`, stored by descending `k` (index `i` ↔ `2k = 2s - 2i`).
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionSpec {
    two_s: i32,
    alphas: Vec<C64>,
}

impl InteractionSpec {
    /// Validated constructor: rejects specs that break `α_k* = α_{-k}`.
    pub fn new(two_s: i32, alphas: Vec<C64>) -> Result<Self> {
        let spec = Self::new_unchecked(two_s, alphas)?;
        spec.validate()?;
        Ok(spec)
    }

    /// Only checks the coefficient count. Used for negative controls.
    pub fn new_unchecked(two_s: i32, alphas: Vec<C64>) -> Result<Self> {
        if two_s < 0 {
            return Err(Error::NegativeSpin(two_s));
        }
        let expected = two_s as usize + 1;
        if alphas.len() != expected {
            return Err(Error::CoefficientCount {
                two_s,
                expected,
                got: alphas.len(),
            });
        }
        Ok(Self { two_s, alphas })
    }

    pub fn zero(two_s: i32) -> Result<Self> {
        if two_s < 0 {
            return Err(Error::NegativeSpin(two_s));
        }
        Ok(Self {
            two_s,
            alphas: vec![C64::new(0.0, 0.0); two_s as usize + 1],
        })
    }

    /// Build from `(2k, α_k)` pairs; labels not listed are zero.
    pub fn from_labeled(two_s: i32, entries: &[(i32, C64)]) -> Result<Self> {
        let mut spec = Self::zero(two_s)?;
        for &(two_k, a) in entries {
            let idx = crate::spin::index_of(two_s, two_k).ok_or_else(|| {
                Error::InvalidParameter(format!("label two_k={two_k} is not a projection of two_s={two_s}"))
            })?;
            spec.alphas[idx] = a;
        }
        spec.validate()?;
        Ok(spec)
    }

    /// Build from the `2s+1` real degrees of freedom: `(Re α_k, Im α_k)` for
    /// each `k > 0` in descending order, then the real `α_0` for integer `s`.
    pub fn from_real_params(two_s: i32, params: &[f64]) -> Result<Self> {
        let mut spec = Self::zero(two_s)?;
        if params.len() != spec.alphas.len() {
            return Err(Error::CoefficientCount {
                two_s,
                expected: spec.alphas.len(),
                got: params.len(),
            });
        }
        let dim = spec.alphas.len();
        let mut it = params.iter().copied();
        for i in 0..dim / 2 {
            let a = C64::new(it.next().unwrap(), it.next().unwrap());
            spec.alphas[i] = a;
            spec.alphas[dim - 1 - i] = a.conj();
        }
        if dim % 2 == 1 {
            spec.alphas[dim / 2] = C64::new(it.next().unwrap(), 0.0);
        }
        Ok(spec)
    }

    pub fn two_s(&self) -> i32 {
        self.two_s
    }

    pub fn dim(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[C64] {
        &self.alphas
    }

    pub fn alpha(&self, two_k: i32) -> Option<C64> {
        crate::spin::index_of(self.two_s, two_k).map(|i| self.alphas[i])
    }

    pub fn labeled(&self) -> impl Iterator<Item = (i32, C64)> + '_ {
        self.alphas
            .iter()
            .enumerate()
            .map(|(i, a)| (two_k_at(self.two_s, i), *a))
    }

    pub fn max_abs_alpha(&self) -> f64 {
        self.alphas.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.alphas.iter().all(|a| a.norm() == 0.0)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            two_s: self.two_s,
            alphas: self.alphas.iter().map(|a| a * factor).collect(),
        }
    }

    /// Largest `|α_k* - α_{-k}|`.
    pub fn hermiticity_violation(&self) -> f64 {
        let n = self.alphas.len();
        (0..n)
            .map(|i| (self.alphas[i].conj() - self.alphas[n - 1 - i]).norm())
            .fold(0.0, f64::max)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.alphas.len();
        let tol = HERMITICITY_TOL * self.max_abs_alpha().max(1.0);
        for i in 0..n {
            let lhs = self.alphas[i].conj();
            let rhs = self.alphas[n - 1 - i];
            if (lhs - rhs).norm() > tol {
                return Err(Error::NotHermitian {
                    two_k: two_k_at(self.two_s, i),
                    lhs: show(lhs),
                    rhs: show(rhs),
                });
            }
        }
        Ok(())
    }
}

/// Coefficients `β` of the operator-polynomial form. Index `j` multiplies the
/// term with power `(s_+ n_-)^{2s-2j}` and carries label `2k = 2s - 2j`.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaSpec {
    two_s: i32,
    betas: Vec<C64>,
}

impl BetaSpec {
    pub fn new(two_s: i32, betas: Vec<C64>) -> Result<Self> {
        if two_s < 0 {
            return Err(Error::NegativeSpin(two_s));
        }
        let expected = Self::term_count(two_s);
        if betas.len() != expected {
            return Err(Error::CoefficientCount {
                two_s,
                expected,
                got: betas.len(),
            });
        }
        if betas.iter().any(|b| !b.re.is_finite() || !b.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite beta".into()));
        }
        Ok(Self { two_s, betas })
    }

    /// Build from `(2k, β_k)` pairs with `k = s, s-1, ... ≥ 0`; others are zero.
    pub fn from_labeled(two_s: i32, entries: &[(i32, C64)]) -> Result<Self> {
        let mut betas = vec![C64::new(0.0, 0.0); Self::term_count(two_s.max(0))];
        for &(two_k, b) in entries {
            if two_k < 0 || two_k > two_s || (two_s - two_k) % 2 != 0 {
                return Err(Error::InvalidParameter(format!(
                    "beta label two_k={two_k} not in s, s-1, ..., >= 0 for two_s={two_s}"
                )));
            }
            betas[((two_s - two_k) / 2) as usize] = b;
        }
        Self::new(two_s, betas)
    }

    pub fn term_count(two_s: i32) -> usize {
        (two_s / 2) as usize + 1
    }

    pub fn two_s(&self) -> i32 {
        self.two_s
    }

    pub fn betas(&self) -> &[C64] {
        &self.betas
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MuMatrix {
    pub phi: f64,
    pub m: DMatrix<C64>,
}

/// `e^{-2ikφ}` for doubled label `two_k`.
fn winding(two_k: i32, phi: f64) -> C64 {
    C64::from_polar(1.0, -f64::from(two_k) * phi)
}

/// Evaluate the matrix-element form without validating the spec.
pub fn mu_unchecked(spec: &InteractionSpec, phi: f64) -> DMatrix<C64> {
    let n = spec.dim();
    let mut m = DMatrix::zeros(n, n);
    for (i, a) in spec.alphas.iter().enumerate() {
        m[(i, n - 1 - i)] = a * winding(two_k_at(spec.two_s, i), phi);
    }
    m
}

pub fn mu_from_alphas(spec: &InteractionSpec, phi: f64) -> Result<MuMatrix> {
    spec.validate()?;
    Ok(MuMatrix {
        phi,
        m: mu_unchecked(spec, phi),
    })
}

pub fn mu_from_betas(bspec: &BetaSpec, phi: f64, rep: &SpinRep) -> Result<MuMatrix> {
    if rep.two_s != bspec.two_s {
        return Err(Error::SpinMismatch {
            what: "spin representation",
            expected: bspec.two_s,
            got: rep.two_s,
        });
    }
    let n = rep.dim;
    let s = rep.s();
    let sz = rep.sz_complex();
    let id = DMatrix::<C64>::identity(n, n);
    let step = rep.sp.map(|v| C64::new(v, 0.0)) * C64::from_polar(1.0, -phi);

    let mut mu = DMatrix::<C64>::zeros(n, n);
    for (j, beta) in bspec.betas.iter().enumerate() {
        if *beta == C64::new(0.0, 0.0) {
            continue;
        }
        let mut left = id.clone();
        let mut right = id.clone();
        for i in 0..j {
            let shift = i as f64;
            left = left * (&sz - &id * C64::from(s - shift));
            right = right * (&sz + &id * C64::from(s - shift));
        }
        let power = bspec.two_s as usize - 2 * j;
        let mut ladder = id.clone();
        for _ in 0..power {
            ladder = ladder * &step;
        }
        let term = left * ladder * right * *beta;
        mu += &term + term.adjoint();
    }
    Ok(MuMatrix { phi, m: mu })
}

/// Read `α_k` off the anti-diagonal of the β form evaluated at `φ = 0`.
pub fn betas_to_alphas(bspec: &BetaSpec, rep: &SpinRep) -> Result<InteractionSpec> {
    let mu = mu_from_betas(bspec, 0.0, rep)?;
    let n = rep.dim;
    let alphas = (0..n).map(|i| mu.m[(i, n - 1 - i)]).collect();
    InteractionSpec::new_unchecked(rep.two_s, alphas)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// `(k + k') μ_{kk'} = 0`
    AntiDiagonal,
    /// `s_z μ + μ s_z = 0`
    SzAnticommutation,
    /// `μ_{kk'}(φ) = μ_{kk'}(0) e^{-i(k-k')φ}`, i.e. `[J_z, μ] = 0`
    RotationCovariance,
    /// `μ = μ†`
    Hermiticity,
}

impl Condition {
    pub const ALL: [Condition; 4] = [
        Condition::AntiDiagonal,
        Condition::SzAnticommutation,
        Condition::RotationCovariance,
        Condition::Hermiticity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Condition::AntiDiagonal => "anti_diagonal",
            Condition::SzAnticommutation => "sz_anticommutation",
            Condition::RotationCovariance => "rotation_covariance",
            Condition::Hermiticity => "hermiticity",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionCheck {
    pub condition: Condition,
    pub max_violation: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub tolerance: f64,
    pub angles: Vec<f64>,
    pub checks: Vec<ConditionCheck>,
}

impl ConditionReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, condition: Condition) -> &ConditionCheck {
        self.checks
            .iter()
            .find(|c| c.condition == condition)
            .expect("every condition is checked")
    }
}

/// Sample angles used by the condition checks (nine, spread over the circle).
pub fn sample_angles() -> Vec<f64> {
    (0..9).map(|j| 0.1234 + f64::from(j) * 2.0 * PI / 9.0).collect()
}

/// Run the four structural checks on the spec's `μ`, without rejecting
/// invalid specs: violations are reported, not raised.
pub fn check_conditions(spec: &InteractionSpec) -> ConditionReport {
    check_mu_field(spec.two_s, |phi| mu_unchecked(spec, phi))
}

/// Same checks for an arbitrary angle-dependent spin matrix.
pub fn check_mu_field(two_s: i32, field: impl Fn(f64) -> DMatrix<C64>) -> ConditionReport {
    let n = two_s.max(0) as usize + 1;
    let angles = sample_angles();
    let base = field(0.0);
    let scale = base.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let tolerance = CONDITION_TOL * scale;

    let mut worst = [0.0f64; 4];
    for &phi in std::iter::once(&0.0).chain(angles.iter()) {
        let m = field(phi);
        for r in 0..n {
            let kr = f64::from(two_k_at(two_s, r)) / 2.0;
            for c in 0..n {
                let kc = f64::from(two_k_at(two_s, c)) / 2.0;
                let v = m[(r, c)];
                if r + c != n - 1 {
                    worst[0] = worst[0].max(v.norm());
                }
                // (s_z μ + μ s_z)_{rc} = (k_r + k_c) μ_{rc}
                worst[1] = worst[1].max(((kr + kc) * v).norm());
                let expected = base[(r, c)] * C64::from_polar(1.0, -(kr - kc) * phi);
                worst[2] = worst[2].max((v - expected).norm());
                worst[3] = worst[3].max((v - m[(c, r)].conj()).norm());
            }
        }
    }

    let checks = Condition::ALL
        .iter()
        .zip(worst)
        .map(|(&condition, max_violation)| ConditionCheck {
            condition,
            max_violation,
            passed: max_violation < tolerance,
        })
        .collect();
    ConditionReport {
        tolerance,
        angles,
        checks,
    }
}

/// Diagonal of `μ²`: `α_k α_{-k}` (= `|α_k|²` for a valid spec), descending `k`.
pub fn mu_squared_diagonal(spec: &InteractionSpec) -> Vec<f64> {
    let n = spec.dim();
    (0..n)
        .map(|i| (spec.alphas[i] * spec.alphas[n - 1 - i]).re)
        .collect()
}

/// Spin-½ Hamiltonians with explicit physical couplings.
///
/// Both use the Pauli normalization `s = σ` for the spin operator in the
/// potential, under which the ground level of `Dipole { k }` is `-m k²/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Preset {
    /// `V = -k (σ_x y - σ_y x) / r²`: magnetic dipole next to a line current.
    Dipole { k: f64 },
    /// `V = a (σ_x y - σ_y x) / r² + b (σ_x x + σ_y y) / r²`: adds an electric
    /// dipole in the field of a line charge.
    DipoleElectric { a: f64, b: f64 },
}

impl Preset {
    pub fn name(&self) -> &'static str {
        match self {
            Preset::Dipole { .. } => "dipole",
            Preset::DipoleElectric { .. } => "dipole_electric",
        }
    }
}

/// For spin ½ with `s = σ`:
/// `σ_x sinφ - σ_y cosφ` has upper-right entry `i e^{-iφ}` and
/// `σ_x cosφ + σ_y sinφ` has upper-right entry `e^{-iφ}`, so
/// `Dipole{k}` gives `α_{1/2} = -ik` and `DipoleElectric{a,b}` gives
/// `α_{1/2} = b + ia`.
pub fn preset(p: Preset, two_s: i32) -> Result<InteractionSpec> {
    if two_s != 1 {
        return Err(Error::UnsupportedPreset {
            name: p.name(),
            two_s,
        });
    }
    let alpha = match p {
        Preset::Dipole { k } => C64::new(0.0, -k),
        Preset::DipoleElectric { a, b } => C64::new(b, a),
    };
    InteractionSpec::new(1, vec![alpha, alpha.conj()])
}

fn show(z: C64) -> String {
    let im = if z.im == 0.0 { 0.0 } else { z.im };
    if im < 0.0 {
        format!("{}-{}i", z.re, -im)
    } else {
        format!("{}+{}i", z.re, im)
    }
}
