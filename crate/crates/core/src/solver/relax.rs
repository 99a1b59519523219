//! Damped red-black relaxation of the regularized finite-difference operator.
//!
//! At an interior node the discrete operator is `tr(A D²u) ≈ (S − D u_k)/h²` with
//! `A = Id + (p − 2) q ⊗ q`, `q = g/(|g|² + ε²)^{1/2}` and `g` the central
//! gradient, which does not involve `u_k`. The mixed derivative uses the
//! diagonal pair matching the sign of `A₁₂`, so all neighbour weights are
//! non-negative whenever `A₁₁, A₂₂ ≥ |A₁₂|`.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::operators::positive_power;
use crate::params::{BoundaryData, ProblemSpec, StructuralParams, ThieleSpec};

use super::config::SolverConfig;
use super::grid::{GridDomain, SolutionField, SolveReport};

#[derive(Debug, Clone, Copy)]
pub(crate) struct Stencil {
    /// Weighted neighbour sum.
    pub s: f64,
    /// Sum of the weights.
    pub d: f64,
    /// Gradient weight `(|g|² + ε²)^{γ/2}`.
    pub k: f64,
}

pub(crate) fn stencil(grid: &GridDomain, u: &[f64], k: usize, p: f64, gamma: f64, eps_g: f64) -> Stencil {
    let h = grid.h();
    let nx = grid.nodes_per_axis()[0];
    let e2 = eps_g * eps_g;
    if grid.dim() == 1 {
        let (w, e) = (u[k - 1], u[k + 1]);
        let g = (e - w) / (2.0 * h);
        let reg = g * g + e2;
        let q2 = if reg > 0.0 { g * g / reg } else { 0.0 };
        let a = 1.0 + (p - 2.0) * q2;
        return Stencil { s: a * (e + w), d: 2.0 * a, k: gradient_weight(reg, gamma) };
    }
    let (e, w, n, s) = (u[k + 1], u[k - 1], u[k + nx], u[k - nx]);
    let gx = (e - w) / (2.0 * h);
    let gy = (n - s) / (2.0 * h);
    let reg = gx * gx + gy * gy + e2;
    let (qx, qy) = if reg > 0.0 { (gx / reg.sqrt(), gy / reg.sqrt()) } else { (0.0, 0.0) };
    let a11 = 1.0 + (p - 2.0) * qx * qx;
    let a22 = 1.0 + (p - 2.0) * qy * qy;
    let a12 = (p - 2.0) * qx * qy;
    let diag = if a12 >= 0.0 { u[k + nx + 1] + u[k - nx - 1] } else { u[k + nx - 1] + u[k - nx + 1] };
    let c = a12.abs();
    Stencil {
        s: (a11 - c) * (e + w) + (a22 - c) * (n + s) + c * diag,
        d: 2.0 * (a11 + a22 - c),
        k: gradient_weight(reg, gamma),
    }
}

fn gradient_weight(reg: f64, gamma: f64) -> f64 {
    if gamma == 0.0 {
        1.0
    } else if gamma == 1.0 {
        reg.sqrt()
    } else {
        reg.powf(0.5 * gamma)
    }
}

/// Non-negative root of `d v + b v^m = s`, or zero when there is none.
pub(crate) fn pointwise_root(s: f64, d: f64, b: f64, m: f64, guess: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    if b == 0.0 {
        return s / d;
    }
    if m == 0.0 {
        return ((s - b) / d).max(0.0);
    }
    if m == 1.0 {
        return s / (d + b);
    }
    if m == 0.5 {
        // Quadratic in t = √v; the rationalized form avoids cancellation.
        let t = 2.0 * s / (b + (b * b + 4.0 * d * s).sqrt());
        return t * t;
    }
    let (mut lo, mut hi) = (0.0f64, s / d);
    let phi = |v: f64| d * v + b * v.powf(m) - s;
    let mut v = guess.clamp(lo, hi);
    if v == 0.0 {
        v = 0.5 * hi;
    }
    for _ in 0..100 {
        let f = phi(v);
        if f > 0.0 {
            hi = v;
        } else {
            lo = v;
        }
        let df = d + b * m * v.powf(m - 1.0);
        let mut next = v - f / df;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - v).abs() <= 1e-15 * v.max(f64::MIN_POSITIVE) || hi - lo <= 1e-15 * hi {
            return next;
        }
        v = next;
    }
    v
}

fn colors(grid: &GridDomain) -> [Vec<usize>; 2] {
    let mut out = [Vec::new(), Vec::new()];
    for &k in grid.interior_nodes() {
        let (i, j) = grid.ij(k);
        out[(i + j) % 2].push(k);
    }
    out
}

/// Red-black damped Jacobi-within-colour sweeps until the largest update falls
/// below `tol`. Each colour is computed from a frozen copy and then written, so
/// the result does not depend on the worker count.
fn iterate<F>(grid: &GridDomain, u: &mut [f64], config: &SolverConfig, truncate: bool, rule: F) -> SolveReport
where
    F: Fn(usize, &[f64]) -> f64 + Sync,
{
    let colors = colors(grid);
    let mut buf = Vec::new();
    let mut report = SolveReport::default();
    for it in 1..=config.max_iter {
        let mut max_update = 0.0f64;
        for nodes in &colors {
            nodes.par_iter().with_min_len(512).map(|&k| rule(k, u)).collect_into_vec(&mut buf);
            for (&k, &v) in nodes.iter().zip(&buf) {
                let old = u[k];
                let mut new = old + config.relax * (v - old);
                if truncate {
                    new = new.max(0.0);
                }
                max_update = max_update.max((new - old).abs());
                u[k] = new;
            }
        }
        report.iterations = it;
        report.max_update = max_update;
        if !max_update.is_finite() {
            break;
        }
        if max_update < config.tol {
            report.converged = true;
            break;
        }
    }
    report
}

fn boundary_values(grid: &GridDomain, g: &BoundaryData) -> Vec<f64> {
    grid.sample(g)
}

/// Initial interior guess: interpolate a coarse solve when the grid can be
/// coarsened, otherwise the mean of the boundary data.
fn p_harmonic_values(grid: &GridDomain, g: &BoundaryData, p: f64, config: &SolverConfig) -> (Vec<f64>, SolveReport) {
    let mut u = boundary_values(grid, g);
    let dim = grid.dim();
    if let Some(coarse) = grid.coarsen() {
        let (cu, _) = p_harmonic_values(&coarse, g, p, config);
        for &k in grid.interior_nodes() {
            let x = grid.coords(k);
            if let Some(v) = coarse.interpolate(&cu, &x[..dim]) {
                u[k] = v;
            }
        }
    } else {
        let bn: Vec<usize> = grid.boundary_nodes().collect();
        let mean = bn.iter().map(|&k| u[k]).sum::<f64>() / bn.len() as f64;
        for &k in grid.interior_nodes() {
            u[k] = mean;
        }
    }
    let eps_g = config.eps_g_for(grid);
    let report = iterate(grid, &mut u, config, false, |k, u| {
        let st = stencil(grid, u, k, p, 0.0, eps_g);
        st.s / st.d
    });
    (u, report)
}

/// Fixed point of the regularized discrete `Δ_p^N u = 0` with Dirichlet data `g`.
pub fn solve_p_harmonic(
    grid: Arc<GridDomain>,
    g: &BoundaryData,
    p: f64,
    config: &SolverConfig,
) -> Result<SolutionField> {
    config.validate(&grid)?;
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidParams(format!("p must exceed 1, got {p}")));
    }
    let (values, mut report) = p_harmonic_values(&grid, g, p, config);
    report.residual_norm = grid
        .interior_nodes()
        .iter()
        .map(|&k| {
            let st = stencil(&grid, &values, k, p, 0.0, config.eps_g_for(&grid));
            ((st.s - st.d * values[k]) / (grid.h() * grid.h())).abs()
        })
        .fold(0.0, f64::max);
    Ok(SolutionField { values, grid, report })
}

/// Solution of the dead-core problem with its Perron bracket `u_♭ ≤ u ≤ u^♯`.
#[derive(Debug, Clone)]
pub struct DirichletSolution {
    pub solution: SolutionField,
    /// `u^♯`: the p-harmonic function with the same data.
    pub upper: SolutionField,
    /// `u_♭`: solves the operator equal to `Λ₀ ‖g‖_∞^m` with the same data.
    pub lower: SolutionField,
}

fn modulus_values(grid: &GridDomain, thiele: &ThieleSpec) -> Result<Vec<f64>> {
    let dim = grid.dim();
    let mut a = vec![0.0; grid.len()];
    for &k in grid.interior_nodes() {
        a[k] = thiele.eval(&grid.coords(k)[..dim])?;
    }
    Ok(a)
}

struct Levels {
    upper: Vec<f64>,
    lower: Vec<f64>,
    u: Vec<f64>,
    upper_report: SolveReport,
    lower_report: SolveReport,
    report: SolveReport,
}

/// Nested iteration: the coarsest level starts from `u^♯`, every finer level
/// from the interpolated coarse iterates, with the fine boundary data kept.
fn dirichlet_levels(problem: &ProblemSpec, grid: &GridDomain, config: &SolverConfig, f_low: f64) -> Result<Levels> {
    let dim = grid.dim();
    let data = boundary_values(grid, &problem.boundary);
    let a = modulus_values(grid, &problem.thiele)?;
    let eps_g = config.eps_g_for(grid);
    let h2 = grid.h() * grid.h();
    let StructuralParams { p, gamma, m, .. } = problem.params;

    let (mut upper, mut lower, mut u);
    let coarse_levels = match grid.coarsen() {
        Some(coarse) => Some((dirichlet_levels(problem, &coarse, config, f_low)?, coarse)),
        None => None,
    };
    match coarse_levels {
        Some((c, coarse)) => {
            let lift = |cv: &[f64]| {
                let mut v = data.clone();
                for &k in grid.interior_nodes() {
                    if let Some(x) = coarse.interpolate(cv, &grid.coords(k)[..dim]) {
                        v[k] = x;
                    }
                }
                v
            };
            upper = lift(&c.upper);
            lower = lift(&c.lower);
            u = lift(&c.u);
        }
        None => {
            let mean = grid.boundary_nodes().map(|k| data[k]).sum::<f64>() / grid.boundary_nodes().count() as f64;
            upper = data.clone();
            for &k in grid.interior_nodes() {
                upper[k] = mean;
            }
            lower = upper.clone();
            u = upper.clone();
        }
    }
    let upper_report = iterate(grid, &mut upper, config, false, |k, u| {
        let st = stencil(grid, u, k, p, 0.0, eps_g);
        st.s / st.d
    });
    if grid.coarsen().is_none() {
        lower.clone_from(&upper);
        u.clone_from(&upper);
    }
    // At a vanishing gradient ε_g = h² makes the forcing of u_♭ an O(1) jump
    // per node when γ ≥ 1, which stalls the sweeps; the bracket is regularized at scale h.
    let eps_low = eps_g.max(grid.h());
    let lower_report = iterate(grid, &mut lower, config, false, |k, u| {
        let st = stencil(grid, u, k, p, gamma, eps_low);
        (st.s - f_low * h2 / st.k) / st.d
    });
    let report = iterate(grid, &mut u, config, true, |k, u| {
        let st = stencil(grid, u, k, p, gamma, eps_g);
        pointwise_root(st.s, st.d, a[k] * h2 / st.k, m, u[k])
    });
    Ok(Levels { upper, lower, u, upper_report, lower_report, report })
}

pub fn solve_dirichlet(
    problem: &ProblemSpec,
    grid: Arc<GridDomain>,
    config: &SolverConfig,
) -> Result<DirichletSolution> {
    config.validate(&grid)?;
    let params = problem.params;
    if params.n != grid.dim() {
        return Err(Error::InvalidGrid(format!("problem is {}-D, grid is {}-D", params.n, grid.dim())));
    }
    let data = boundary_values(&grid, &problem.boundary);
    let mut g_sup = 0.0f64;
    for k in grid.boundary_nodes() {
        if data[k] < 0.0 {
            return Err(Error::NegativeBoundaryData(data[k]));
        }
        g_sup = g_sup.max(data[k]);
    }
    let a = modulus_values(&grid, &problem.thiele)?;
    let a_max = grid.interior_nodes().iter().map(|&k| a[k]).fold(0.0, f64::max);
    let f_low = a_max * positive_power(g_sup, params.m);
    let eps_g = config.eps_g_for(&grid);

    let Levels { upper, lower, u, upper_report, lower_report, mut report } =
        dirichlet_levels(problem, &grid, config, f_low)?;

    let slack = config.u_tol();
    report.bracket_violations =
        grid.interior_nodes().iter().filter(|&&k| u[k] > upper[k] + slack || u[k] < lower[k] - slack).count();
    let field = SolutionField { values: u, grid: grid.clone(), report: SolveReport::default() };
    report.residual_norm = discrete_residual(&field, &params, &problem.thiele, Some(eps_g))?
        .into_iter()
        .fold(0.0, |acc, r| acc.max(r.abs()));
    let solution = SolutionField { report, ..field };
    let upper = SolutionField { values: upper, grid: grid.clone(), report: upper_report };
    let lower = SolutionField { values: lower, grid, report: lower_report };
    Ok(DirichletSolution { solution, upper, lower })
}

/// Node-wise discrete residual `K (S − D u)/h² − a u_+^m` (zero on boundary nodes).
///
/// With `m = 0` a node where `u = 0` is read with the set-valued indicator
/// `[0, 1]`, so only the excess above `a` counts.
pub fn discrete_residual(
    field: &SolutionField,
    params: &StructuralParams,
    thiele: &ThieleSpec,
    eps_g: Option<f64>,
) -> Result<Vec<f64>> {
    let grid = &field.grid;
    let eps_g = eps_g.unwrap_or(grid.h() * grid.h());
    let h2 = grid.h() * grid.h();
    let a = modulus_values(grid, thiele)?;
    let u = &field.values;
    let mut out = vec![0.0; grid.len()];
    for &k in grid.interior_nodes() {
        let st = stencil(grid, u, k, params.p, params.gamma, eps_g);
        let op = st.k * (st.s - st.d * u[k]) / h2;
        out[k] = if params.m == 0.0 && u[k] <= 0.0 {
            (op - a[k]).max(0.0) + op.min(0.0)
        } else {
            op - a[k] * positive_power(u[k], params.m)
        };
    }
    Ok(out)
}
