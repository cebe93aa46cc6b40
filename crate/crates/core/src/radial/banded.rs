//! Real symmetric block-tridiagonal eigenproblems with 1×1 or 2×2 blocks.
//!
//! Node `i` carries a small symmetric block `D_i`; neighbouring nodes are
//! coupled by a diagonal block `T_i`. In interleaved ordering
//! (`index = i * b + c`) the matrix is banded with half-bandwidth `b`.
//!
//! Eigenvalues are located by bisection on the block Sturm count (inertia of
//! the block `LDLᵀ` Schur complements); eigenvectors by inverse iteration
//! with a pivoted band LU.

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BlockTridiag {
    block: usize,
    nodes: usize,
    /// Row-major `b×b` blocks, one per node.
    diag: Vec<f64>,
    /// Diagonal of the coupling block between node `i` and `i+1`: `b` entries each.
    off: Vec<f64>,
}

impl BlockTridiag {
    pub fn new(block: usize, diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert!(block == 1 || block == 2, "block size must be 1 or 2");
        let nodes = diag.len() / (block * block);
        assert_eq!(diag.len(), nodes * block * block);
        assert_eq!(off.len(), nodes.saturating_sub(1) * block);
        Self { block, nodes, diag, off }
    }

    pub fn size(&self) -> usize {
        self.nodes * self.block
    }

    pub fn block_size(&self) -> usize {
        self.block
    }

    fn d(&self, i: usize, r: usize, c: usize) -> f64 {
        self.diag[i * self.block * self.block + r * self.block + c]
    }

    fn t(&self, i: usize, c: usize) -> f64 {
        self.off[i * self.block + c]
    }

    /// Dense copy (interleaved ordering); for tests on small problems.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.size();
        let b = self.block;
        let mut m = vec![vec![0.0; n]; n];
        for i in 0..self.nodes {
            for r in 0..b {
                for c in 0..b {
                    m[i * b + r][i * b + c] = self.d(i, r, c);
                }
                if i + 1 < self.nodes {
                    m[i * b + r][(i + 1) * b + r] = self.t(i, r);
                    m[(i + 1) * b + r][i * b + r] = self.t(i, r);
                }
            }
        }
        m
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let b = self.block;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.nodes {
            for r in 0..b {
                let mut radius = 0.0;
                for c in 0..b {
                    if c != r {
                        radius += self.d(i, r, c).abs();
                    }
                }
                if i > 0 {
                    radius += self.t(i - 1, r).abs();
                }
                if i + 1 < self.nodes {
                    radius += self.t(i, r).abs();
                }
                let center = self.d(i, r, r);
                lo = lo.min(center - radius);
                hi = hi.max(center + radius);
            }
        }
        (lo, hi)
    }

    fn pivot_floor(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        f64::MIN_POSITIVE.sqrt() * lo.abs().max(hi.abs()).max(1.0)
    }

    /// Number of eigenvalues strictly below `sigma`.
    pub fn count_below(&self, sigma: f64) -> usize {
        let floor = self.pivot_floor();
        match self.block {
            1 => self.count_scalar(sigma, floor),
            _ => self.count_pair(sigma, floor),
        }
    }

    fn count_scalar(&self, sigma: f64, floor: f64) -> usize {
        let mut count = 0;
        let mut piv = 1.0;
        for i in 0..self.nodes {
            let mut d = self.d(i, 0, 0) - sigma;
            if i > 0 {
                let t = self.t(i - 1, 0);
                d -= t * t / piv;
            }
            if d.abs() < floor {
                d = -floor;
            }
            if d < 0.0 {
                count += 1;
            }
            piv = d;
        }
        count
    }

    fn count_pair(&self, sigma: f64, floor: f64) -> usize {
        let mut count = 0;
        // Schur complement S = [[p, q], [q, r]] of the previous node
        let (mut p, mut q, mut r) = (1.0, 0.0, 1.0);
        for i in 0..self.nodes {
            let mut np = self.d(i, 0, 0) - sigma;
            let mut nq = self.d(i, 0, 1);
            let mut nr = self.d(i, 1, 1) - sigma;
            if i > 0 {
                let (ta, tb) = (self.t(i - 1, 0), self.t(i - 1, 1));
                let det = p * r - q * q;
                // T S^{-1} T with S^{-1} = [[r, -q], [-q, p]] / det
                np -= ta * ta * r / det;
                nq += ta * tb * q / det;
                nr -= tb * tb * p / det;
            }
            let mut det = np * nr - nq * nq;
            if det.abs() < floor * (np.abs() + nr.abs() + floor) {
                np -= floor;
                nr -= floor;
                det = np * nr - nq * nq;
            }
            count += if det < 0.0 {
                1
            } else if np + nr < 0.0 {
                2
            } else {
                0
            };
            p = np;
            q = nq;
            r = nr;
        }
        count
    }

    /// All eigenvalues below `upper`, ascending, each bisected to near
    /// machine precision.
    pub fn eigenvalues_below(&self, upper: f64) -> Vec<f64> {
        let (lo, hi) = self.gershgorin();
        let upper = upper.min(hi);
        let total = self.count_below(upper);
        let span = lo.abs().max(hi.abs()).max(1.0);
        let mut out = Vec::with_capacity(total);
        let mut left = lo - 1e-12 * span;
        for idx in 0..total {
            // smallest x with count_below(x) > idx
            let mut a = left;
            let mut b = upper;
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if (b - a) <= 4.0 * f64::EPSILON * mid.abs().max(f64::MIN_POSITIVE) {
                    break;
                }
                if self.count_below(mid) > idx {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            let value = 0.5 * (a + b);
            out.push(value);
            left = a;
        }
        out
    }

    /// Unit eigenvector for an eigenvalue estimate by inverse iteration.
    pub fn eigenvector(&self, lambda: f64) -> Result<Vec<f64>> {
        const MAX_ITER: usize = 8;
        let n = self.size();
        let scale = {
            let (lo, hi) = self.gershgorin();
            lo.abs().max(hi.abs()).max(1.0)
        };
        let lu = BandLu::factor(self, lambda, scale);
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.25 * ((i as f64) * 0.7071).sin()).collect();
        normalize(&mut x);
        for iter in 1..=MAX_ITER {
            let mut y = x.clone();
            lu.solve(&mut y);
            normalize(&mut y);
            let overlap: f64 = y.iter().zip(&x).map(|(a, b)| a * b).sum();
            x = y;
            if iter >= 2 && overlap.abs() > 1.0 - 1e-13 {
                return Ok(x);
            }
        }
        let residual = self.residual_norm(&x, lambda);
        if residual < 1e-8 * scale {
            Ok(x)
        } else {
            Err(Error::NoConvergence {
                size: n,
                iterations: MAX_ITER,
            })
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let b = self.block;
        let mut y = vec![0.0; self.size()];
        for i in 0..self.nodes {
            for r in 0..b {
                let mut acc = 0.0;
                for c in 0..b {
                    acc += self.d(i, r, c) * x[i * b + c];
                }
                if i > 0 {
                    acc += self.t(i - 1, r) * x[(i - 1) * b + r];
                }
                if i + 1 < self.nodes {
                    acc += self.t(i, r) * x[(i + 1) * b + r];
                }
                y[i * b + r] = acc;
            }
        }
        y
    }

    pub fn residual_norm(&self, x: &[f64], lambda: f64) -> f64 {
        let y = self.apply(x);
        y.iter()
            .zip(x)
            .map(|(a, b)| (a - lambda * b).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

fn normalize(x: &mut [f64]) {
    let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if n > 0.0 {
        x.iter_mut().for_each(|v| *v /= n);
    }
}

/// Band LU with partial pivoting of `A - σI` (LINPACK `gbfa` layout: the
/// row interchanges widen the upper band to `ku + kl`).
struct BandLu {
    n: usize,
    kl: usize,
    width: usize,
    data: Vec<f64>,
    mult: Vec<f64>,
    piv: Vec<usize>,
}

impl BandLu {
    fn factor(a: &BlockTridiag, sigma: f64, scale: f64) -> Self {
        let n = a.size();
        let kl = a.block;
        let ku = a.block;
        let width = 2 * kl + ku + 1;
        let mut lu = Self {
            n,
            kl,
            width,
            data: vec![0.0; n * width],
            mult: vec![0.0; n * kl],
            piv: vec![0; n],
        };
        let dense_row = |row: usize| -> Vec<(usize, f64)> {
            let b = a.block;
            let (i, r) = (row / b, row % b);
            let mut v = Vec::with_capacity(b + 2);
            if i > 0 {
                v.push(((i - 1) * b + r, a.t(i - 1, r)));
            }
            for c in 0..b {
                let mut val = a.d(i, r, c);
                if c == r {
                    val -= sigma;
                }
                v.push((i * b + c, val));
            }
            if i + 1 < a.nodes {
                v.push(((i + 1) * b + r, a.t(i, r)));
            }
            v
        };
        for row in 0..n {
            for (col, val) in dense_row(row) {
                *lu.at(row, col) = val;
            }
        }

        let tiny = f64::EPSILON * scale;
        for j in 0..n {
            let last = (j + kl).min(n - 1);
            let mut p = j;
            let mut best = lu.get(j, j).abs();
            for r in j + 1..=last {
                let v = lu.get(r, j).abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            lu.piv[j] = p;
            let right = (j + ku + kl).min(n - 1);
            if p != j {
                for c in j..=right {
                    let tmp = lu.get(j, c);
                    *lu.at(j, c) = lu.get(p, c);
                    *lu.at(p, c) = tmp;
                }
            }
            if lu.get(j, j).abs() < tiny {
                *lu.at(j, j) = tiny;
            }
            let pivot = lu.get(j, j);
            for r in j + 1..=last {
                let l = lu.get(r, j) / pivot;
                lu.mult[j * kl + (r - j - 1)] = l;
                if l != 0.0 {
                    for c in j + 1..=right {
                        let v = lu.get(j, c);
                        *lu.at(r, c) -= l * v;
                    }
                }
            }
        }
        lu
    }

    fn at(&mut self, r: usize, c: usize) -> &mut f64 {
        &mut self.data[r * self.width + (c + self.kl - r)]
    }

    fn get(&self, r: usize, c: usize) -> f64 {
        if c + self.kl < r || c + self.kl - r >= self.width {
            return 0.0;
        }
        self.data[r * self.width + (c + self.kl - r)]
    }

    fn solve(&self, b: &mut [f64]) {
        let n = self.n;
        for j in 0..n {
            let p = self.piv[j];
            if p != j {
                b.swap(j, p);
            }
            let last = (j + self.kl).min(n - 1);
            for r in j + 1..=last {
                b[r] -= self.mult[j * self.kl + (r - j - 1)] * b[j];
            }
        }
        let reach = self.width - self.kl - 1;
        for j in (0..n).rev() {
            let right = (j + reach).min(n - 1);
            let mut acc = b[j];
            for c in j + 1..=right {
                acc -= self.get(j, c) * b[c];
            }
            b[j] = acc / self.get(j, j);
        }
    }
}
