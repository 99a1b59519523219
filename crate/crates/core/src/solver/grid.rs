//! Cartesian grids in one or two dimensions with a box or ball shaped domain,
//! and the node-valued fields that live on them.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::params::BoundaryData;

/// Shape of the computational domain inside the bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainShape {
    /// Every node strictly inside the box is interior.
    Box,
    /// Nodes with `|x − center| < radius` are interior.
    Ball { center: [f64; 2], radius: f64 },
}

/// Uniform grid with spacing `h`; every node that is not interior carries Dirichlet data.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDomain {
    dim: usize,
    lower: [f64; 2],
    cells: [usize; 2],
    h: f64,
    shape: DomainShape,
    interior: Vec<bool>,
    interior_nodes: Vec<usize>,
}

impl GridDomain {
    /// Interval `[a, b]` split into `cells` cells.
    pub fn box_1d(a: f64, b: f64, cells: usize) -> Result<Self> {
        if !(b > a) || cells < 2 {
            return Err(Error::InvalidGrid(format!("need a < b and >= 2 cells, got [{a}, {b}] / {cells}")));
        }
        Self::build(1, [a, 0.0], [cells, 0], (b - a) / cells as f64, DomainShape::Box)
    }

    /// Square `[lo, hi]²` split into `cells × cells` cells.
    pub fn box_2d(lo: f64, hi: f64, cells: usize) -> Result<Self> {
        if !(hi > lo) || cells < 2 {
            return Err(Error::InvalidGrid(format!("need lo < hi and >= 2 cells, got [{lo}, {hi}] / {cells}")));
        }
        Self::build(2, [lo, lo], [cells, cells], (hi - lo) / cells as f64, DomainShape::Box)
    }

    /// Ball of `radius` about the origin with spacing `radius / cells_per_radius`,
    /// embedded in a box padded by `pad_cells` layers of boundary nodes.
    pub fn ball(dim: usize, radius: f64, cells_per_radius: usize, pad_cells: usize) -> Result<Self> {
        if !(dim == 1 || dim == 2) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not supported")));
        }
        if !(radius > 0.0) || cells_per_radius < 2 || pad_cells < 1 {
            return Err(Error::InvalidGrid("ball needs radius > 0, >= 2 cells per radius, >= 1 pad layer".into()));
        }
        let h = radius / cells_per_radius as f64;
        let half = cells_per_radius + pad_cells;
        let lo = -(half as f64) * h;
        let cells = [2 * half, if dim == 2 { 2 * half } else { 0 }];
        Self::build(
            dim,
            [lo, if dim == 2 { lo } else { 0.0 }],
            cells,
            h,
            DomainShape::Ball { center: [0.0; 2], radius },
        )
    }

    fn build(dim: usize, lower: [f64; 2], cells: [usize; 2], h: f64, shape: DomainShape) -> Result<Self> {
        let mut grid = Self { dim, lower, cells, h, shape, interior: Vec::new(), interior_nodes: Vec::new() };
        let total = grid.len();
        grid.interior = (0..total).map(|k| grid.classify(k)).collect();
        grid.interior_nodes = (0..total).filter(|&k| grid.interior[k]).collect();
        if grid.interior_nodes.is_empty() {
            return Err(Error::InvalidGrid("no interior nodes".into()));
        }
        for &k in &grid.interior_nodes {
            let (i, j) = grid.ij(k);
            let edge = i == 0 || i == grid.cells[0] || (dim == 2 && (j == 0 || j == grid.cells[1]));
            if edge {
                return Err(Error::InvalidGrid("interior node on the bounding box edge".into()));
            }
        }
        Ok(grid)
    }

    fn classify(&self, k: usize) -> bool {
        let (i, j) = self.ij(k);
        match self.shape {
            DomainShape::Box => i > 0 && i < self.cells[0] && (self.dim == 1 || (j > 0 && j < self.cells[1])),
            DomainShape::Ball { center, radius } => {
                let x = self.coords(k);
                let r2: f64 = (0..self.dim).map(|d| (x[d] - center[d]).powi(2)).sum();
                r2 < radius * radius * (1.0 - 1e-12)
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn shape(&self) -> DomainShape {
        self.shape
    }

    pub fn cells(&self) -> [usize; 2] {
        self.cells
    }

    pub fn lower(&self) -> [f64; 2] {
        self.lower
    }

    /// Nodes along each axis (1 along an unused axis).
    pub fn nodes_per_axis(&self) -> [usize; 2] {
        [self.cells[0] + 1, if self.dim == 2 { self.cells[1] + 1 } else { 1 }]
    }

    pub fn len(&self) -> usize {
        let [nx, ny] = self.nodes_per_axis();
        nx * ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i + self.nodes_per_axis()[0] * j
    }

    pub fn ij(&self, k: usize) -> (usize, usize) {
        let nx = self.nodes_per_axis()[0];
        (k % nx, k / nx)
    }

    /// Node coordinates; the second entry is zero in one dimension.
    pub fn coords(&self, k: usize) -> [f64; 2] {
        let (i, j) = self.ij(k);
        [self.lower[0] + i as f64 * self.h, if self.dim == 2 { self.lower[1] + j as f64 * self.h } else { 0.0 }]
    }

    pub fn is_interior(&self, k: usize) -> bool {
        self.interior[k]
    }

    pub fn interior_mask(&self) -> &[bool] {
        &self.interior
    }

    pub fn interior_nodes(&self) -> &[usize] {
        &self.interior_nodes
    }

    pub fn boundary_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&k| !self.interior[k])
    }

    /// Neighbour of `k` shifted by `(di, dj)` nodes, if it exists.
    pub fn offset(&self, k: usize, di: isize, dj: isize) -> Option<usize> {
        let (i, j) = self.ij(k);
        let [nx, ny] = self.nodes_per_axis();
        let ii = i as isize + di;
        let jj = j as isize + dj;
        (ii >= 0 && jj >= 0 && (ii as usize) < nx && (jj as usize) < ny).then(|| self.index(ii as usize, jj as usize))
    }

    /// Upper corner of the bounding box.
    pub fn upper(&self) -> [f64; 2] {
        [self.lower[0] + self.cells[0] as f64 * self.h, self.lower[1] + self.cells[1] as f64 * self.h]
    }

    /// Distance from `x` to the boundary of the domain (box faces or sphere).
    pub fn distance_to_boundary(&self, x: &[f64]) -> f64 {
        match self.shape {
            DomainShape::Box => {
                let up = self.upper();
                (0..self.dim).map(|d| (x[d] - self.lower[d]).min(up[d] - x[d])).fold(f64::INFINITY, f64::min)
            }
            DomainShape::Ball { center, radius } => {
                let r: f64 = (0..self.dim).map(|d| (x[d] - center[d]).powi(2)).sum::<f64>().sqrt();
                radius - r
            }
        }
    }

    /// Grid with twice the spacing, when the cell counts allow it.
    pub fn coarsen(&self) -> Option<Self> {
        let even = self.cells[0].is_multiple_of(2) && (self.dim == 1 || self.cells[1].is_multiple_of(2));
        if !even || self.cells[0] / 2 < 8 {
            return None;
        }
        let cells = [self.cells[0] / 2, self.cells[1] / 2];
        let coarse = Self::build(self.dim, self.lower, cells, 2.0 * self.h, self.shape).ok()?;
        // A coarse ball must still be padded by a boundary layer.
        coarse
            .interior_nodes
            .iter()
            .all(|&k| {
                let (i, j) = coarse.ij(k);
                i > 0 && i < cells[0] && (self.dim == 1 || (j > 0 && j < cells[1]))
            })
            .then_some(coarse)
    }

    /// Samples `g` at every node (interior nodes included).
    pub fn sample(&self, g: &BoundaryData) -> Vec<f64> {
        (0..self.len()).map(|k| g.eval(&self.coords(k)[..self.dim])).collect()
    }

    /// Multilinear interpolation of nodal `values` at `x`; `None` outside the box.
    pub fn interpolate(&self, values: &[f64], x: &[f64]) -> Option<f64> {
        let mut base = [0usize; 2];
        let mut frac = [0.0f64; 2];
        for d in 0..self.dim {
            let t = (x[d] - self.lower[d]) / self.h;
            let tol = 1e-9;
            if t < -tol || t > self.cells[d] as f64 + tol {
                return None;
            }
            let t = t.clamp(0.0, self.cells[d] as f64);
            let mut b = t.floor() as usize;
            if b >= self.cells[d] {
                b = self.cells[d] - 1;
            }
            base[d] = b;
            frac[d] = t - b as f64;
        }
        if self.dim == 1 {
            let k = self.index(base[0], 0);
            return Some(values[k] * (1.0 - frac[0]) + values[k + 1] * frac[0]);
        }
        let k00 = self.index(base[0], base[1]);
        let k10 = k00 + 1;
        let k01 = self.index(base[0], base[1] + 1);
        let k11 = k01 + 1;
        let (fx, fy) = (frac[0], frac[1]);
        Some(
            values[k00] * (1.0 - fx) * (1.0 - fy)
                + values[k10] * fx * (1.0 - fy)
                + values[k01] * (1.0 - fx) * fy
                + values[k11] * fx * fy,
        )
    }

    /// Nearest node to `x`.
    pub fn nearest_node(&self, x: &[f64]) -> usize {
        let mut idx = [0usize; 2];
        for d in 0..self.dim {
            let t = ((x[d] - self.lower[d]) / self.h).round();
            idx[d] = t.clamp(0.0, self.cells[d] as f64) as usize;
        }
        self.index(idx[0], idx[1])
    }
}

/// Bookkeeping of one iterative solve.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    pub max_update: f64,
    pub residual_norm: f64,
    pub bracket_violations: usize,
    pub converged: bool,
}

/// Node values on a grid together with the report of the solve that produced them.
#[derive(Debug, Clone)]
pub struct SolutionField {
    pub values: Vec<f64>,
    pub grid: Arc<GridDomain>,
    pub report: SolveReport,
}

impl SolutionField {
    pub fn new(grid: Arc<GridDomain>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!("expected {} node values, got {}", grid.len(), values.len())));
        }
        Ok(Self { values, grid, report: SolveReport::default() })
    }

    /// Samples a closed-form function at every node.
    pub fn from_fn<F: Fn(&[f64]) -> f64>(grid: Arc<GridDomain>, f: F) -> Self {
        let dim = grid.dim();
        let values = (0..grid.len()).map(|k| f(&grid.coords(k)[..dim])).collect();
        Self { values, grid, report: SolveReport::default() }
    }

    pub fn same_grid(&self, other: &SolutionField) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }

    /// `max |values|` over interior nodes.
    pub fn interior_sup(&self) -> f64 {
        self.grid.interior_nodes().iter().map(|&k| self.values[k].abs()).fold(0.0, f64::max)
    }

    pub fn at(&self, x: &[f64]) -> Option<f64> {
        self.grid.interpolate(&self.values, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_grid_layout() {
        let g = GridDomain::box_2d(-1.0, 1.0, 4).unwrap();
        assert_eq!(g.len(), 25);
        assert_eq!(g.interior_nodes().len(), 9);
        assert_eq!(g.coords(g.index(2, 2)), [0.0, 0.0]);
        assert_eq!(g.boundary_nodes().count(), 16);
        assert_eq!(g.offset(g.index(0, 0), -1, 0), None);
    }

    #[test]
    fn ball_grid_keeps_boundary_layer() {
        let g = GridDomain::ball(2, 1.0, 8, 2).unwrap();
        assert!(g.interior_nodes().iter().all(|&k| {
            let x = g.coords(k);
            x[0].hypot(x[1]) < 1.0
        }));
        // (1, 0) lies on the sphere and therefore carries data.
        let k = g.nearest_node(&[1.0, 0.0]);
        assert!(!g.is_interior(k));
        assert!((g.distance_to_boundary(&[0.5, 0.0]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn interpolation_reproduces_bilinear() {
        let g = Arc::new(GridDomain::box_2d(-1.0, 1.0, 8).unwrap());
        let f = SolutionField::from_fn(g.clone(), |x| 1.0 + 2.0 * x[0] - x[1] + 0.5 * x[0] * x[1]);
        let v = f.at(&[0.13, -0.71]).unwrap();
        let exact = 1.0 + 0.26 + 0.71 + 0.5 * 0.13 * -0.71;
        assert!((v - exact).abs() < 1e-14);
        assert!(f.at(&[1.5, 0.0]).is_none());
    }

    #[test]
    fn coarsening_halves_cells() {
        let g = GridDomain::box_2d(-1.0, 1.0, 64).unwrap();
        let c = g.coarsen().unwrap();
        assert_eq!(c.cells(), [32, 32]);
        assert_eq!(c.h(), 2.0 * g.h());
        assert!(GridDomain::box_2d(-1.0, 1.0, 14).unwrap().coarsen().is_none());
    }
}
