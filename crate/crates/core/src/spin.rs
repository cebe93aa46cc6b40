//! Spin-s matrices in the `|s,k⟩` basis, ordered by descending `k`.
//!
//! Row/column `i` carries `k = s - i`, so the first basis vector is the top
//! of the ladder. In this ordering any matrix coupling only `k` with `-k` is
//! anti-diagonal.

use nalgebra::DMatrix;

use crate::{Error, HalfInt, Result, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct SpinRep {
    pub two_s: i32,
    pub dim: usize,
    pub sz: DMatrix<f64>,
    pub sp: DMatrix<f64>,
    pub sm: DMatrix<f64>,
    pub sx: DMatrix<C64>,
    pub sy: DMatrix<C64>,
}

impl SpinRep {
    /// Doubled projection `2k` carried by basis index `i`.
    pub fn two_k(&self, index: usize) -> i32 {
        two_k_at(self.two_s, index)
    }

    pub fn index_of(&self, two_k: i32) -> Option<usize> {
        index_of(self.two_s, two_k)
    }

    pub fn labels(&self) -> impl Iterator<Item = HalfInt> + '_ {
        (0..self.dim).map(|i| HalfInt(self.two_k(i)))
    }

    pub fn s(&self) -> f64 {
        f64::from(self.two_s) / 2.0
    }

    pub fn sz_complex(&self) -> DMatrix<C64> {
        self.sz.map(|v| C64::new(v, 0.0))
    }

    /// `s(s+1)` times the identity.
    pub fn casimir_value(&self) -> f64 {
        let s = self.s();
        s * (s + 1.0)
    }
}

pub(crate) fn two_k_at(two_s: i32, index: usize) -> i32 {
    two_s - 2 * index as i32
}

pub(crate) fn index_of(two_s: i32, two_k: i32) -> Option<usize> {
    if two_k.abs() > two_s || (two_s - two_k) % 2 != 0 {
        return None;
    }
    Some(((two_s - two_k) / 2) as usize)
}

pub fn build_spin_rep(two_s: i32) -> Result<SpinRep> {
    if two_s < 0 {
        return Err(Error::NegativeSpin(two_s));
    }
    let dim = two_s as usize + 1;
    let s = f64::from(two_s) / 2.0;

    let sz = DMatrix::from_fn(dim, dim, |r, c| {
        if r == c {
            f64::from(two_k_at(two_s, r)) / 2.0
        } else {
            0.0
        }
    });

    // s_+ |k> = sqrt(s(s+1) - k(k+1)) |k+1>; k+1 sits one row above k.
    let mut sp = DMatrix::zeros(dim, dim);
    for col in 1..dim {
        let k = f64::from(two_k_at(two_s, col)) / 2.0;
        sp[(col - 1, col)] = (s * (s + 1.0) - k * (k + 1.0)).sqrt();
    }
    let sm = sp.transpose();

    let half = C64::new(0.5, 0.0);
    let spc = sp.map(|v| C64::new(v, 0.0));
    let smc = sm.map(|v| C64::new(v, 0.0));
    let sx = (&spc + &smc) * half;
    let sy = (&spc - &smc) * C64::new(0.0, -0.5);

    Ok(SpinRep {
        two_s,
        dim,
        sz,
        sp,
        sm,
        sx,
        sy,
    })
}
