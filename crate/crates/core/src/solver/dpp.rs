//! Dynamic programming iteration of the tug-of-war with noise:
//! `u(x) = (α₀/2)[max_{B_ε(x)} u + min_{B_ε(x)} u] + β₀ · mean_{B_ε(x)} u`.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::params::{game_weights, BoundaryData, GameWeights};

use super::config::{Scheme, SolverConfig};
use super::grid::{GridDomain, SolutionField, SolveReport};

/// Node offsets `(di, dj)` of the closed ball of radius `eps`, ordered by `(dj, di)`
/// so that the first hit of a scan is the lexicographically first node.
pub fn ball_offsets(dim: usize, eps: f64, h: f64) -> Vec<(isize, isize)> {
    let r = (eps / h * (1.0 + 1e-12)).floor() as isize;
    let r2 = (eps / h) * (eps / h) * (1.0 + 1e-12);
    let dj_range = if dim == 2 { -r..=r } else { 0..=0 };
    let mut out = Vec::new();
    for dj in dj_range {
        for di in -r..=r {
            if ((di * di + dj * dj) as f64) <= r2 {
                out.push((di, dj));
            }
        }
    }
    out
}

/// Resolved ball neighbourhoods of every interior node.
#[derive(Debug, Clone)]
pub struct BallStencil {
    pub weights: GameWeights,
    /// Flat offsets into the node array, same order as [`ball_offsets`].
    pub offsets: Vec<isize>,
}

impl BallStencil {
    pub fn new(grid: &GridDomain, p: f64, eps: f64) -> Result<Self> {
        let weights = game_weights(p, grid.dim())?;
        let nx = grid.nodes_per_axis()[0] as isize;
        let raw = ball_offsets(grid.dim(), eps, grid.h());
        for &k in grid.interior_nodes() {
            for &(di, dj) in &raw {
                if grid.offset(k, di, dj).is_none() {
                    return Err(Error::InvalidGrid(format!(
                        "the eps-ball of node {k} leaves the grid; pad the boundary strip to ceil(eps/h) layers"
                    )));
                }
            }
        }
        Ok(Self { weights, offsets: raw.iter().map(|&(di, dj)| di + nx * dj).collect() })
    }

    /// `(argmax, argmin, mean)` over the ball of node `k`, first hit on ties.
    pub fn extremes(&self, u: &[f64], k: usize) -> (usize, usize, f64) {
        let (mut imax, mut imin) = (k, k);
        let (mut vmax, mut vmin) = (f64::NEG_INFINITY, f64::INFINITY);
        let mut sum = 0.0;
        for &o in &self.offsets {
            let j = (k as isize + o) as usize;
            let v = u[j];
            sum += v;
            if v > vmax {
                vmax = v;
                imax = j;
            }
            if v < vmin {
                vmin = v;
                imin = j;
            }
        }
        (imax, imin, sum / self.offsets.len() as f64)
    }

    pub fn apply(&self, u: &[f64], k: usize) -> f64 {
        let (imax, imin, mean) = self.extremes(u, k);
        let GameWeights { alpha0, beta0 } = self.weights;
        if alpha0 == 0.0 {
            mean
        } else {
            0.5 * alpha0 * (u[imax] + u[imin]) + beta0 * mean
        }
    }
}

/// Jacobi iteration of the DPP with `u = g` on every non-interior node.
pub fn dpp_iterate(
    grid: Arc<GridDomain>,
    g: &BoundaryData,
    p: f64,
    eps: f64,
    config: &SolverConfig,
) -> Result<SolutionField> {
    let config = SolverConfig { scheme: Scheme::DppIter, eps_dpp: Some(eps), ..*config };
    config.validate(&grid)?;
    let stencil = BallStencil::new(&grid, p, eps)?;
    let mut u = grid.sample(g);
    let interior = grid.interior_nodes();
    let bn: Vec<usize> = grid.boundary_nodes().collect();
    let mean = bn.iter().map(|&k| u[k]).sum::<f64>() / bn.len() as f64;
    for &k in interior {
        u[k] = mean;
    }
    let mut next = Vec::new();
    let mut report = SolveReport::default();
    for it in 1..=config.max_iter {
        interior.par_iter().with_min_len(256).map(|&k| stencil.apply(&u, k)).collect_into_vec(&mut next);
        let mut max_update = 0.0f64;
        for (&k, &v) in interior.iter().zip(&next) {
            max_update = max_update.max((v - u[k]).abs());
            u[k] = v;
        }
        report.iterations = it;
        report.max_update = max_update;
        if max_update < config.tol {
            report.converged = true;
            break;
        }
    }
    report.residual_norm = interior.iter().map(|&k| (stencil.apply(&u, k) - u[k]).abs()).fold(0.0, f64::max);
    Ok(SolutionField { values: u, grid, report })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offsets_are_ordered_and_symmetric() {
        let off = ball_offsets(2, 2.0, 1.0);
        assert_eq!(off.len(), 13);
        assert_eq!(off[0], (0, -2));
        assert!(off.windows(2).all(|w| (w[0].1, w[0].0) < (w[1].1, w[1].0)));
        assert_eq!(ball_offsets(1, 3.0, 1.0).len(), 7);
    }

    #[test]
    fn ties_pick_the_first_node() {
        let g = GridDomain::ball(2, 1.0, 8, 3).unwrap();
        let st = BallStencil::new(&g, 4.0, 2.0 * g.h()).unwrap();
        let u = vec![1.0; g.len()];
        let k = g.index(11, 11);
        let (imax, imin, mean) = st.extremes(&u, k);
        assert_eq!(imax, g.index(11, 9));
        assert_eq!(imin, imax);
        assert_eq!(mean, 1.0);
    }

    #[test]
    fn linear_data_is_a_fixed_point_in_one_dimension() {
        let g = Arc::new(GridDomain::ball(1, 1.0, 32, 4).unwrap());
        let cfg = SolverConfig { tol: 1e-12, ..SolverConfig::default() };
        let u = dpp_iterate(g.clone(), &BoundaryData::new(|x| x[0]), 2.0, 4.0 * g.h(), &cfg).unwrap();
        assert!(u.report.converged);
        for &k in g.interior_nodes() {
            assert!((u.values[k] - g.coords(k)[0]).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_thin_strip_and_small_p() {
        let g = Arc::new(GridDomain::ball(2, 1.0, 16, 1).unwrap());
        let cfg = SolverConfig::default();
        let data = BoundaryData::constant(1.0);
        assert!(matches!(dpp_iterate(g.clone(), &data, 4.0, 4.0 * g.h(), &cfg), Err(Error::InvalidGrid(_))));
        assert_eq!(
            dpp_iterate(g.clone(), &data, 1.5, 2.0 * g.h(), &cfg).unwrap_err(),
            Error::UnsupportedGameRange(1.5)
        );
        assert!(matches!(dpp_iterate(g.clone(), &data, 4.0, g.h(), &cfg), Err(Error::InvalidConfig(_))));
    }
}
