use serde::Serialize;

use crate::{Error, Result};

pub const MIN_RADIAL_POINTS: usize = 16;

/// Cell-centred radial grid on `(0, r_max)`.
///
/// Node `i` (0-based) sits at `r_i = (i + 1/2) h` with `h = r_max / n_points`;
/// cell faces sit at `r = i h`, so the first face is the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialGrid {
    r_max: f64,
    n_points: usize,
}

impl RadialGrid {
    pub fn new(r_max: f64, n_points: usize) -> Result<Self> {
        if !(r_max > 0.0) || !r_max.is_finite() {
            return Err(Error::InvalidGrid(format!("r_max must be positive, got {r_max}")));
        }
        if n_points < MIN_RADIAL_POINTS {
            return Err(Error::InvalidGrid(format!(
                "n_points must be at least {MIN_RADIAL_POINTS}, got {n_points}"
            )));
        }
        Ok(Self { r_max, n_points })
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn spacing(&self) -> f64 {
        self.r_max / self.n_points as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.spacing()
    }

    /// Face between node `i` and node `i + 1`.
    pub fn face_after(&self, i: usize) -> f64 {
        (i + 1) as f64 * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.node(i)).collect()
    }

    /// Same box, `factor` times as many points.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            r_max: self.r_max,
            n_points: self.n_points * factor,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_are_cell_centres() {
        let g = RadialGrid::new(4.0, 16).unwrap();
        assert_eq!(g.spacing(), 0.25);
        assert_eq!(g.node(0), 0.125);
        assert_eq!(g.node(15), 3.875);
        assert!(g.nodes().iter().all(|r| *r > 0.0));
        assert_eq!(g.face_after(15), 4.0);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(RadialGrid::new(0.0, 100).is_err());
        assert!(RadialGrid::new(10.0, 15).is_err());
        assert!(RadialGrid::new(f64::NAN, 100).is_err());
    }
}
