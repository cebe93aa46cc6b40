use serde::Serialize;

use crate::{Error, Result, C64};

pub const MIN_PLANE_POINTS: usize = 32;

/// Square grid on `[-L, L]²` with `n` points per axis. `n` must be even so
/// that the origin falls between nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlaneGrid {
    half_extent: f64,
    n: usize,
}

impl PlaneGrid {
    pub fn new(half_extent: f64, n: usize) -> Result<Self> {
        if !(half_extent > 0.0) || !half_extent.is_finite() {
            return Err(Error::InvalidGrid(format!("half extent must be positive, got {half_extent}")));
        }
        if n < MIN_PLANE_POINTS {
            return Err(Error::InvalidGrid(format!("need at least {MIN_PLANE_POINTS} points per axis, got {n}")));
        }
        if n % 2 != 0 {
            return Err(Error::InvalidGrid(format!("points per axis must be even (origin off-grid), got {n}")));
        }
        Ok(Self { half_extent, n })
    }

    pub fn half_extent(&self) -> f64 {
        self.half_extent
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_extent / (self.n - 1) as f64
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.half_extent + i as f64 * self.spacing()
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `(x, y)` of flat point index `ix * n + iy`.
    pub fn point(&self, p: usize) -> (f64, f64) {
        (self.coord(p / self.n), self.coord(p % self.n))
    }

    /// Grid with twice the resolution that keeps `n` even: `2n` points on the
    /// same box (spacing ratio `(2n-1)/(n-1)`, just under 2).
    pub fn refined(&self) -> Self {
        Self {
            half_extent: self.half_extent,
            n: 2 * self.n,
        }
    }

    /// `levels` grids starting from this one, each [`refined`](Self::refined).
    pub fn ladder(&self, levels: usize) -> Vec<Self> {
        std::iter::successors(Some(*self), |g| Some(g.refined()))
            .take(levels)
            .collect()
    }
}

/// Spinor-valued grid function. Layout: `(ix * n + iy) * dim + c`, spin
/// component `c` in descending-`k` order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField {
    pub grid: PlaneGrid,
    pub two_s: i32,
    pub data: Vec<C64>,
}

impl SpinorField {
    pub fn zeros(grid: PlaneGrid, two_s: i32) -> Self {
        let dim = two_s as usize + 1;
        Self {
            grid,
            two_s,
            data: vec![C64::new(0.0, 0.0); grid.len() * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.two_s as usize + 1
    }

    pub fn inner(&self, other: &SpinorField) -> C64 {
        let a2 = self.grid.spacing().powi(2);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum::<C64>()
            * a2
    }

    /// Discrete `L²` norm `(Σ|ψ|² a²)^{1/2}`.
    pub fn norm(&self) -> f64 {
        let a2 = self.grid.spacing().powi(2);
        (self.data.iter().map(|z| z.norm_sqr()).sum::<f64>() * a2).sqrt()
    }

    pub fn scale(&mut self, s: C64) {
        self.data.iter_mut().for_each(|z| *z *= s);
    }

    pub fn axpy(&mut self, alpha: C64, x: &SpinorField) {
        self.data.iter_mut().zip(&x.data).for_each(|(y, x)| *y += alpha * x);
    }

    pub fn sub(&self, other: &SpinorField) -> SpinorField {
        let mut out = self.clone();
        out.axpy(C64::new(-1.0, 0.0), other);
        out
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Gaussian packet description, independent of the grid it is sampled on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PacketRecipe {
    pub center: (f64, f64),
    pub width: f64,
    pub momentum: (f64, f64),
    pub spin_weights: Vec<C64>,
}

impl PacketRecipe {
    pub fn build(&self, grid: &PlaneGrid) -> Result<SpinorField> {
        make_gaussian_packet(self.center, self.width, self.momentum, &self.spin_weights, grid)
    }
}

/// `ψ_k(x) = w_k exp(-|x-c|²/(4 width²) + i p·x)`, normalized on the grid.
pub fn make_gaussian_packet(
    center: (f64, f64),
    width: f64,
    momentum: (f64, f64),
    spin_weights: &[C64],
    grid: &PlaneGrid,
) -> Result<SpinorField> {
    if !(width > 0.0) {
        return Err(Error::InvalidPacket(format!("width must be positive, got {width}")));
    }
    let dim = spin_weights.len();
    if dim == 0 || spin_weights.iter().all(|w| w.norm() == 0.0) {
        return Err(Error::InvalidPacket("spin weights are all zero".into()));
    }
    let from_origin = center.0.hypot(center.1);
    let from_wall = grid.half_extent() - center.0.abs().max(center.1.abs());
    if from_origin < 4.0 * width {
        return Err(Error::InvalidPacket(format!(
            "center is {from_origin} from the origin, need at least 4 widths ({})",
            4.0 * width
        )));
    }
    if from_wall < 4.0 * width {
        return Err(Error::InvalidPacket(format!(
            "center is {from_wall} from the boundary, need at least 4 widths ({})",
            4.0 * width
        )));
    }
    let two_s = dim as i32 - 1;
    let mut f = SpinorField::zeros(*grid, two_s);
    let inv = 1.0 / (4.0 * width * width);
    for p in 0..grid.len() {
        let (x, y) = grid.point(p);
        let d2 = (x - center.0).powi(2) + (y - center.1).powi(2);
        let g = C64::new(-d2 * inv, momentum.0 * x + momentum.1 * y).exp();
        for (c, w) in spin_weights.iter().enumerate() {
            f.data[p * dim + c] = w * g;
        }
    }
    let n = f.norm();
    f.scale(C64::from(1.0 / n));
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_geometry() {
        let g = PlaneGrid::new(10.0, 64).unwrap();
        assert!((g.spacing() - 20.0 / 63.0).abs() < 1e-15);
        assert_eq!(g.coord(0), -10.0);
        assert!((g.coord(63) - 10.0).abs() < 1e-12);
        // origin sits midway between the two central nodes
        assert!((g.coord(31) + g.coord(32)).abs() < 1e-12);
        assert!(PlaneGrid::new(10.0, 63).is_err());
        assert!(PlaneGrid::new(10.0, 30).is_err());
        let l = g.ladder(3);
        assert_eq!(l.iter().map(|g| g.n()).collect::<Vec<_>>(), vec![64, 128, 256]);
    }

    #[test]
    fn packet_is_normalized_real_gaussian() {
        let g = PlaneGrid::new(10.0, 128).unwrap();
        let w = [C64::new(1.0, 0.0), C64::new(1.0, 0.0)];
        let f = make_gaussian_packet((5.0, 0.0), 1.0, (0.0, 0.0), &w, &g).unwrap();
        assert!((f.norm() - 1.0).abs() < 1e-12);
        assert!(f.data.iter().all(|z| z.im == 0.0 && z.re >= 0.0));
    }

    #[test]
    fn packet_preconditions() {
        let g = PlaneGrid::new(10.0, 64).unwrap();
        let w = [C64::new(1.0, 0.0)];
        assert!(make_gaussian_packet((0.0, 0.0), 1.0, (0.0, 0.0), &w, &g).is_err());
        assert!(make_gaussian_packet((8.0, 0.0), 1.0, (0.0, 0.0), &w, &g).is_err());
        assert!(make_gaussian_packet((5.0, 0.0), 1.0, (0.0, 0.0), &[C64::new(0.0, 0.0)], &g).is_err());
    }
}
