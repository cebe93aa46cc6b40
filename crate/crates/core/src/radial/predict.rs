//! Closed-form bound spectrum `E = -(m/2) |α_k|² / (j + 1/2)²`.
//!
//! `J² + 1/4 = (j + 1/2)²` on an SO(3) irrep, and `μ²` is diagonal with
//! entries `|α_k|²`, so each channel pair contributes its own tower. Pair
//! `±k` (`k > 0`) realizes `j = k, k+1, ...`, and in sector `j_z` only
//! `j ≥ |j_z|`. The lone `k = 0` channel binds only when `α_0 < 0`.

use serde::Serialize;

use crate::spin::two_k_at;
use crate::{HalfInt, InteractionSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PredictedLevel {
    pub two_j: i32,
    /// `2k ≥ 0`, the label of the pair `±k`.
    pub two_k: i32,
    pub alpha_abs: f64,
    pub energy: f64,
    /// Whether this `(j, k)` combination occurs in the bound spectrum.
    pub realized: bool,
}

pub fn level_energy(mass: f64, alpha_abs: f64, two_j: i32) -> f64 {
    let d = f64::from(two_j) / 2.0 + 0.5;
    -0.5 * mass * alpha_abs * alpha_abs / (d * d)
}

/// Non-negative labels `2k` with a nonzero coefficient, descending.
fn active_pairs(spec: &InteractionSpec) -> Vec<(i32, f64, bool)> {
    (0..spec.dim().div_ceil(2))
        .filter_map(|i| {
            let two_k = two_k_at(spec.two_s(), i);
            let a = spec.alphas()[i];
            let abs = a.norm();
            (abs > 0.0).then(|| (two_k, abs, two_k > 0 || a.re < 0.0))
        })
        .collect()
}

/// Table over the requested `j` values and every pair with nonzero `α_k`.
/// `j` values whose parity does not match `s` cannot occur and are skipped.
pub fn predicted_spectrum(spec: &InteractionSpec, mass: f64, j_values: &[HalfInt]) -> Vec<PredictedLevel> {
    let pairs = active_pairs(spec);
    let mut out = Vec::new();
    for j in j_values {
        let two_j = j.doubled();
        if two_j < 0 || (two_j - spec.two_s()).rem_euclid(2) != 0 {
            continue;
        }
        for &(two_k, alpha_abs, binds) in &pairs {
            out.push(PredictedLevel {
                two_j,
                two_k,
                alpha_abs,
                energy: level_energy(mass, alpha_abs, two_j),
                realized: binds && two_j >= two_k,
            });
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelMatch {
    pub two_j: i32,
    pub two_k: i32,
    pub predicted: f64,
    pub rel_err: f64,
}

/// Closest realized `(j, k)` for a computed energy, with `j ≥ min_two_j/2`.
/// `pair_two_k` restricts the search to one channel pair when known.
pub fn match_level(
    spec: &InteractionSpec,
    mass: f64,
    min_two_j: i32,
    energy: f64,
    pair_two_k: Option<i32>,
) -> Option<LevelMatch> {
    if !(energy < 0.0) {
        return None;
    }
    let parity = spec.two_s().rem_euclid(2);
    let mut best: Option<LevelMatch> = None;
    for (two_k, alpha_abs, binds) in active_pairs(spec) {
        if !binds || pair_two_k.is_some_and(|p| p != two_k) {
            continue;
        }
        let floor = min_two_j.abs().max(two_k);
        let j_est = alpha_abs * (mass / (2.0 * -energy)).sqrt() - 0.5;
        let center = (2.0 * j_est).round() as i32;
        for cand in [center - 2, center - 1, center, center + 1, center + 2] {
            let two_j = cand.max(floor);
            if two_j.rem_euclid(2) != parity {
                continue;
            }
            let predicted = level_energy(mass, alpha_abs, two_j);
            let rel_err = ((energy - predicted) / predicted).abs();
            if best.is_none_or(|b| rel_err < b.rel_err) {
                best = Some(LevelMatch {
                    two_j,
                    two_k,
                    predicted,
                    rel_err,
                });
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{preset, Preset, C64};

    #[test]
    fn dipole_ground() {
        let spec = preset(Preset::Dipole { k: 1.0 }, 1).unwrap();
        let t = predicted_spectrum(&spec, 1.0, &[HalfInt(1)]);
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].energy, -0.5);
        assert!(t[0].realized);
    }

    #[test]
    fn spin_one_value() {
        let spec = InteractionSpec::from_labeled(2, &[(2, C64::new(2.0, 0.0)), (-2, C64::new(2.0, 0.0))]).unwrap();
        let t = predicted_spectrum(&spec, 1.0, &[HalfInt(2)]);
        assert_eq!(t.len(), 1);
        assert!((t[0].energy + 8.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn monotone_towards_zero() {
        let spec = preset(Preset::Dipole { k: 1.0 }, 1).unwrap();
        let js: Vec<HalfInt> = (0..50).map(|n| HalfInt(2 * n + 1)).collect();
        let e: Vec<f64> = predicted_spectrum(&spec, 1.0, &js).iter().map(|p| p.energy).collect();
        assert!(e.windows(2).all(|w| w[0] < w[1] && w[1] < 0.0));
        assert!(e.last().unwrap().abs() < 1e-3);
    }

    #[test]
    fn wrong_parity_skipped() {
        let spec = preset(Preset::Dipole { k: 1.0 }, 1).unwrap();
        assert!(predicted_spectrum(&spec, 1.0, &[HalfInt(2)]).is_empty());
    }

    #[test]
    fn repulsive_center_channel_not_realized() {
        let spec = InteractionSpec::from_real_params(2, &[0.0, 0.0, 0.5]).unwrap();
        let t = predicted_spectrum(&spec, 1.0, &[HalfInt(0)]);
        assert!(!t[0].realized);
        assert!(match_level(&spec, 1.0, 0, -0.1, None).is_none());
    }

    #[test]
    fn matching_respects_floor() {
        let spec = preset(Preset::Dipole { k: 1.0 }, 1).unwrap();
        let m = match_level(&spec, 1.0, 1, -0.1251, None).unwrap();
        assert_eq!((m.two_j, m.two_k), (3, 1));
        // in sector j_z = 3/2 nothing at -1/2 can be realized
        let m = match_level(&spec, 1.0, 3, -0.5, None).unwrap();
        assert_eq!(m.two_j, 3);
        assert!(m.rel_err > 1.0);
    }
}
