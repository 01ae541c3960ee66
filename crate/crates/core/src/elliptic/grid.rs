use crate::error::{LabError, Result};

/// Uniform grid on `[0, L] x [0, ell]` with `(nx + 1) x (ny + 1)` nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NozzleGrid {
    pub length: f64,
    pub width: f64,
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
}

impl NozzleGrid {
    pub fn new(length: f64, width: f64, nx: usize, ny: usize) -> Result<Self> {
        if nx < 4 || ny < 4 {
            return Err(LabError::InvalidInput(format!("grid needs nx, ny >= 4, got {nx} x {ny}")));
        }
        if !(length > 0.0 && width > 0.0 && length.is_finite() && width.is_finite()) {
            return Err(LabError::InvalidInput("nozzle dimensions must be positive".into()));
        }
        Ok(Self {
            length,
            width,
            nx,
            ny,
            hx: length / nx as f64,
            hy: width / ny as f64,
        })
    }

    pub fn n_nodes(&self) -> usize {
        (self.nx + 1) * (self.ny + 1)
    }

    /// Row-major node index, `x1` outer.
    #[inline]
    pub fn node(&self, i: usize, j: usize) -> usize {
        i * (self.ny + 1) + j
    }

    #[inline]
    pub fn x1(&self, i: usize) -> f64 {
        if i == self.nx {
            self.length
        } else {
            i as f64 * self.hx
        }
    }

    #[inline]
    pub fn x2(&self, j: usize) -> f64 {
        if j == self.ny {
            self.width
        } else {
            j as f64 * self.hy
        }
    }

    /// Control-volume fraction along `x1` (1/2 on the inlet and outlet).
    #[inline]
    pub(crate) fn theta_x(&self, i: usize) -> f64 {
        if i == 0 || i == self.nx {
            0.5
        } else {
            1.0
        }
    }

    #[inline]
    pub(crate) fn theta_y(&self, j: usize) -> f64 {
        if j == 0 || j == self.ny {
            0.5
        } else {
            1.0
        }
    }

    /// Area of the control volume around node `(i, j)`.
    #[inline]
    pub fn cell_area(&self, i: usize, j: usize) -> f64 {
        self.hx * self.theta_x(i) * self.hy * self.theta_y(j)
    }
}

/// Nodal scalar field, row-major by `x1` then `x2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field2D {
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
}

impl Field2D {
    pub fn zeros(grid: &NozzleGrid) -> Self {
        Self {
            nx: grid.nx,
            ny: grid.ny,
            values: vec![0.0; grid.n_nodes()],
        }
    }

    pub fn from_fn(grid: &NozzleGrid, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.n_nodes());
        for i in 0..=grid.nx {
            for j in 0..=grid.ny {
                values.push(f(i, j));
            }
        }
        Self {
            nx: grid.nx,
            ny: grid.ny,
            values,
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * (self.ny + 1) + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.values[i * (self.ny + 1) + j] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Field2D) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_geometry() {
        let g = NozzleGrid::new(2.0, 1.0, 8, 4).unwrap();
        assert_eq!(g.hx, 0.25);
        assert_eq!(g.n_nodes(), 45);
        assert_eq!(g.node(1, 0), 5);
        let total: f64 = (0..=8).flat_map(|i| (0..=4).map(move |j| (i, j))).map(|(i, j)| g.cell_area(i, j)).sum();
        assert!((total - 2.0).abs() < 1e-14);
        assert!(NozzleGrid::new(1.0, 1.0, 3, 8).is_err());
    }

    #[test]
    fn field_access() {
        let g = NozzleGrid::new(1.0, 1.0, 4, 4).unwrap();
        let f = Field2D::from_fn(&g, |i, j| (10 * i + j) as f64);
        assert_eq!(f.get(3, 2), 32.0);
        assert_eq!(f.max(), 44.0);
    }
}
