//! Comparison, rescaling, flatness and Liouville experiments on top of the solvers.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::params::{compute_beta, compute_cnd, BoundaryData, ProblemSpec, StructuralParams, ThieleSpec};
use crate::radial::LiouvilleSupersolution;

use super::config::SolverConfig;
use super::grid::{GridDomain, SolutionField, SolveReport};
use super::relax::solve_dirichlet;

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub holds: bool,
    /// Interior nodes where `u_sub > u_super + tol`.
    pub violations: Vec<usize>,
    pub max_excess: f64,
}

/// Checks `u_sub ≤ u_super + tol` at interior nodes, given the ordering on the boundary.
pub fn comparison_check(u_sub: &SolutionField, u_super: &SolutionField, tol: f64) -> Result<ComparisonReport> {
    if !u_sub.same_grid(u_super) {
        return Err(Error::GridMismatch);
    }
    let grid = &u_sub.grid;
    if let Some(k) = grid.boundary_nodes().find(|&k| u_sub.values[k] > u_super.values[k] + tol) {
        return Err(Error::NotApplicable(format!("boundary data are not ordered at node {k}")));
    }
    let mut violations = Vec::new();
    let mut max_excess = f64::NEG_INFINITY;
    for &k in grid.interior_nodes() {
        let excess = u_sub.values[k] - u_super.values[k];
        max_excess = max_excess.max(excess);
        if excess > tol {
            violations.push(k);
        }
    }
    Ok(ComparisonReport { holds: violations.is_empty(), violations, max_excess })
}

/// `v(x) = u(ρx)/κ` on the same nodes, with the modulus
/// `a_{κ,ρ}(x) = ρ^{2+γ}/κ^{γ+1−m} · a(ρx)` that `v` solves.
pub fn rescale(
    u: &SolutionField,
    rho: f64,
    kappa: f64,
    thiele: &ThieleSpec,
    params: &StructuralParams,
) -> Result<(SolutionField, ThieleSpec)> {
    if !(rho > 0.0 && rho <= 1.0) || !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::InvalidParams(format!("need 0 < rho <= 1 and kappa > 0, got {rho}, {kappa}")));
    }
    let grid = u.grid.clone();
    let dim = grid.dim();
    let mut values = vec![0.0; grid.len()];
    for (k, v) in values.iter_mut().enumerate() {
        let x = grid.coords(k);
        let y: Vec<f64> = x[..dim].iter().map(|xi| rho * xi).collect();
        *v = grid.interpolate(&u.values, &y).ok_or(Error::RescaleOutOfDomain)? / kappa;
    }
    let factor = rho.powf(2.0 + params.gamma) / kappa.powf(params.gap());
    Ok((SolutionField { values, grid, report: u.report.clone() }, thiele.scaled(factor, rho)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlatnessReport {
    pub zeta: f64,
    /// `sup_{B_{1/2}} u` over nodes.
    pub sup_half_ball: f64,
    pub report: SolveReport,
}

/// Solves with modulus `ζ² λ₀` and data `C_ND(ζ² λ₀) |x|^β`, which vanish at the
/// origin and stay below one on the unit scale, and measures `sup_{B_{1/2}} u`.
pub fn flatness_experiment(
    zeta: f64,
    params: &StructuralParams,
    lambda0: f64,
    grid: Arc<GridDomain>,
    config: &SolverConfig,
) -> Result<FlatnessReport> {
    if !(zeta >= 0.0 && zeta.is_finite()) {
        return Err(Error::InvalidParams(format!("zeta must be non-negative, got {zeta}")));
    }
    let beta = compute_beta(params)?;
    let base = ThieleSpec::constant(lambda0)?;
    let modulus = zeta * zeta * lambda0;
    let (thiele, data) = if modulus > 0.0 {
        let c = compute_cnd(params, modulus)?;
        let g = BoundaryData::new(move |x: &[f64]| c * x.iter().map(|v| v * v).sum::<f64>().sqrt().powf(beta));
        (base.scaled(zeta * zeta, 1.0)?, g)
    } else {
        (base.scaled(0.0, 1.0)?, BoundaryData::constant(0.0))
    };
    let problem = ProblemSpec::new(*params, thiele, data)?;
    let sol = solve_dirichlet(&problem, grid.clone(), config)?.solution;
    let dim = grid.dim();
    let sup_half_ball = grid
        .interior_nodes()
        .iter()
        .filter(|&&k| grid.coords(k)[..dim].iter().map(|v| v * v).sum::<f64>() < 0.25)
        .map(|&k| sol.values[k])
        .fold(0.0, f64::max);
    Ok(FlatnessReport { zeta, sup_half_ball, report: sol.report })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LiouvilleMode {
    /// Data `|x|^s` on `∂B_R`, `s < β`.
    Growth { s: f64 },
    /// Data `θ C_ND R^β` on `∂B_R`, `θ < 1`.
    Level { theta: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiouvilleRow {
    pub outer_radius: f64,
    /// `sup_{∂B_R} g / (C_ND R^β)`.
    pub sup_ratio: f64,
    pub probe_values: Vec<f64>,
    /// `v_R` at the probes; `NaN` when the data exceed `C_ND R^β`.
    pub barrier_values: Vec<f64>,
    pub report: SolveReport,
}

/// Solves on `B_R` for each `R` by pulling back to the unit ball: `v(x) = u(Rx)`
/// solves the problem with modulus `R^{2+γ} λ₀`.
pub fn liouville_sweep(
    mode: LiouvilleMode,
    params: &StructuralParams,
    lambda0: f64,
    radii: &[f64],
    probes: &[Vec<f64>],
    cells_per_radius: usize,
    config: &SolverConfig,
) -> Result<Vec<LiouvilleRow>> {
    let beta = compute_beta(params)?;
    let c_nd = compute_cnd(params, lambda0)?;
    match mode {
        LiouvilleMode::Level { theta } if !(0.0..1.0).contains(&theta) => {
            return Err(Error::NotApplicable(format!("level theta must lie in [0, 1), got {theta}")))
        }
        LiouvilleMode::Growth { s } if !(s >= 0.0 && s < beta) => {
            return Err(Error::NotApplicable(format!("growth rate {s} must lie in [0, beta = {beta})")))
        }
        _ => {}
    }
    let grid = Arc::new(GridDomain::ball(params.n, 1.0, cells_per_radius, 1)?);
    let mut rows = Vec::with_capacity(radii.len());
    for &r in radii {
        if !(r > 0.0) {
            return Err(Error::InvalidParams(format!("outer radius must be positive, got {r}")));
        }
        let (data, sup) = match mode {
            LiouvilleMode::Level { theta } => {
                let level = theta * c_nd * r.powf(beta);
                (BoundaryData::constant(level), level)
            }
            LiouvilleMode::Growth { s } => {
                let g = BoundaryData::new(move |x: &[f64]| (r * x.iter().map(|v| v * v).sum::<f64>().sqrt()).powf(s));
                (g, r.powf(s))
            }
        };
        let thiele = ThieleSpec::constant(lambda0)?.scaled(r.powf(2.0 + params.gamma), r)?;
        let problem = ProblemSpec::new(*params, thiele, data)?;
        let sol = solve_dirichlet(&problem, grid.clone(), config)?.solution;
        let barrier = LiouvilleSupersolution::new(sup, r, params, lambda0).ok();
        let mut probe_values = Vec::with_capacity(probes.len());
        let mut barrier_values = Vec::with_capacity(probes.len());
        for x in probes {
            let y: Vec<f64> = x.iter().map(|v| v / r).collect();
            probe_values.push(sol.at(&y).ok_or(Error::RescaleOutOfDomain)?);
            barrier_values.push(barrier.map_or(f64::NAN, |b| b.value(x)));
        }
        rows.push(LiouvilleRow {
            outer_radius: r,
            sup_ratio: sup / (c_nd * r.powf(beta)),
            probe_values,
            barrier_values,
            report: sol.report,
        });
    }
    Ok(rows)
}
