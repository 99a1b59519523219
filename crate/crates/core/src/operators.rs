//! Pointwise operator kernels: the normalized p- and ∞-Laplacians, the Pucci
//! extremal operators, discrete jets, and the PDE residual used as an oracle
//! everywhere else.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::params::{StructuralParams, ThieleSpec};
use crate::solver::grid::GridDomain;

/// First and second derivatives at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointJet {
    pub grad: DVector<f64>,
    pub hess: DMatrix<f64>,
}

impl PointJet {
    pub fn new(grad: DVector<f64>, hess: DMatrix<f64>) -> Result<Self> {
        if hess.nrows() != grad.len() || hess.ncols() != grad.len() {
            return Err(Error::InvalidParams("jet dimensions disagree".into()));
        }
        ensure_symmetric(&hess)?;
        Ok(Self { grad, hess })
    }

    pub fn zero(n: usize) -> Self {
        Self { grad: DVector::zeros(n), hess: DMatrix::zeros(n, n) }
    }

    pub fn dim(&self) -> usize {
        self.grad.len()
    }
}

fn ensure_symmetric(hess: &DMatrix<f64>) -> Result<()> {
    if !hess.is_square() {
        return Err(Error::NonSymmetric);
    }
    let scale = hess.amax().max(f64::MIN_POSITIVE);
    let asym = (hess - hess.transpose()).amax();
    if asym > 1e-12 * scale {
        return Err(Error::NonSymmetric);
    }
    Ok(())
}

/// Ellipticity constants of `Δ_p^N`: `min{1, p−1}` and `max{1, p−1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticityBounds {
    pub lambda: f64,
    pub big_lambda: f64,
}

impl EllipticityBounds {
    pub fn for_p(p: f64) -> Self {
        Self { lambda: (p - 1.0).min(1.0), big_lambda: (p - 1.0).max(1.0) }
    }
}

/// `⟨D²u ĝ, ĝ⟩` with `ĝ = ∇u/|∇u|`.
pub fn normalized_inf_laplacian(jet: &PointJet) -> Result<f64> {
    let norm = jet.grad.norm();
    if norm == 0.0 {
        return Err(Error::VanishingGradient);
    }
    let dir = &jet.grad / norm;
    Ok(dir.dot(&(&jet.hess * &dir)))
}

/// `Δu + (p − 2) Δ_∞^N u`.
pub fn normalized_p_laplacian(jet: &PointJet, p: f64) -> Result<f64> {
    Ok(jet.hess.trace() + (p - 2.0) * normalized_inf_laplacian(jet)?)
}

/// Eigenvalues of a symmetric matrix: closed form for `n ≤ 2`, tridiagonal QR otherwise.
pub fn symmetric_eigenvalues(hess: &DMatrix<f64>) -> Result<Vec<f64>> {
    ensure_symmetric(hess)?;
    match hess.nrows() {
        0 => Ok(Vec::new()),
        1 => Ok(vec![hess[(0, 0)]]),
        2 => {
            let (a, b, d) = (hess[(0, 0)], hess[(0, 1)], hess[(1, 1)]);
            let mean = 0.5 * (a + d);
            let rad = (0.25 * (a - d) * (a - d) + b * b).sqrt();
            Ok(vec![mean - rad, mean + rad])
        }
        _ => Ok(SymmetricEigen::new(hess.clone()).eigenvalues.iter().copied().collect()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PucciSign {
    Minus,
    Plus,
}

/// Pucci extremal operators over coefficient matrices with spectrum in `[λ, Λ]`.
pub fn pucci(hess: &DMatrix<f64>, lambda: f64, big_lambda: f64, sign: PucciSign) -> Result<f64> {
    if !(lambda > 0.0 && big_lambda >= lambda) {
        return Err(Error::InvalidParams(format!("need 0 < lambda <= Lambda, got {lambda}, {big_lambda}")));
    }
    let eig = symmetric_eigenvalues(hess)?;
    let (pos, neg): (f64, f64) =
        eig.iter().fold((0.0, 0.0), |(p, n), &e| if e > 0.0 { (p + e, n) } else { (p, n + e) });
    Ok(match sign {
        PucciSign::Minus => lambda * pos + big_lambda * neg,
        PucciSign::Plus => big_lambda * pos + lambda * neg,
    })
}

/// `tr H + (p − 2) λ` for `λ` the smallest and largest eigenvalue of `H`: the
/// range of `Δ_p^N` over all unit directions, used where the gradient vanishes.
pub fn zero_gradient_bracket(hess: &DMatrix<f64>, p: f64) -> Result<(f64, f64)> {
    let eig = symmetric_eigenvalues(hess)?;
    let lo = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tr = hess.trace();
    let a = tr + (p - 2.0) * lo;
    let b = tr + (p - 2.0) * hi;
    Ok((a.min(b), a.max(b)))
}

/// `(u_+)^m`, with the indicator convention `χ_{u>0}` at `m = 0`.
#[inline]
pub fn positive_power(u: f64, m: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if m == 0.0 {
        1.0
    } else if m == 1.0 {
        u
    } else {
        u.powf(m)
    }
}

/// Something that can report a value and a jet at a point.
pub trait JetField {
    fn dim(&self) -> usize;
    fn value_and_jet(&self, x: &[f64]) -> Result<(f64, PointJet)>;
}

/// Value of `|∇u|^γ Δ_p^N u − a(x) u_+^m` at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub value: f64,
    /// `γ < 0` and `|∇u|` at or below the regularization floor.
    pub singular: bool,
    /// `Δ_p^N` range over unit directions when the gradient vanishes exactly.
    pub bracket: Option<(f64, f64)>,
}

/// PDE residual with the regularized direction `g/(|g|² + ε²)^{1/2}` and, for
/// `γ < 0`, the weight `(|g|² + ε²)^{γ/2}`. Analytic jets use `eps_g = 0`.
pub fn pde_residual<F: JetField + ?Sized>(
    field: &F,
    x: &[f64],
    params: &StructuralParams,
    thiele: &ThieleSpec,
    eps_g: f64,
) -> Result<Residual> {
    let (u, jet) = field.value_and_jet(x)?;
    let a = thiele.eval(x)?;
    Ok(residual_from_jet(u, &jet, a, params, eps_g))
}

/// Same as [`pde_residual`] for an already evaluated jet and modulus value.
pub fn residual_from_jet(u: f64, jet: &PointJet, a: f64, params: &StructuralParams, eps_g: f64) -> Residual {
    let g2 = jet.grad.norm_squared();
    let reg2 = g2 + eps_g * eps_g;
    let lap = if reg2 > 0.0 {
        let q = &jet.grad / reg2.sqrt();
        jet.hess.trace() + (params.p - 2.0) * q.dot(&(&jet.hess * &q))
    } else {
        jet.hess.trace()
    };
    let bracket = (g2 == 0.0).then(|| zero_gradient_bracket(&jet.hess, params.p).ok()).flatten();
    let gamma = params.gamma;
    let (weight, singular) = if gamma == 0.0 {
        (1.0, false)
    } else if gamma > 0.0 {
        (g2.sqrt().powf(gamma), false)
    } else {
        let w = reg2.powf(0.5 * gamma);
        (w, g2.sqrt() <= eps_g || !w.is_finite())
    };
    let operator = if weight.is_finite() { weight * lap } else { 0.0 };
    Residual { value: operator - a * positive_power(u, params.m), singular, bracket }
}

/// Central-difference jet at grid node `k`: second order gradient, 3-point second
/// derivatives and the 4-corner mixed derivative.
pub fn discrete_jet(grid: &GridDomain, values: &[f64], k: usize) -> Result<PointJet> {
    let h = grid.h();
    let n = grid.dim();
    let at = |di: isize, dj: isize| -> Result<f64> {
        grid.offset(k, di, dj).map(|j| values[j]).ok_or(Error::StencilOutOfDomain(k))
    };
    let c = values[k];
    let mut grad = DVector::zeros(n);
    let mut hess = DMatrix::zeros(n, n);
    let (e, w) = (at(1, 0)?, at(-1, 0)?);
    grad[0] = (e - w) / (2.0 * h);
    hess[(0, 0)] = (e - 2.0 * c + w) / (h * h);
    if n == 2 {
        let (nn, s) = (at(0, 1)?, at(0, -1)?);
        grad[1] = (nn - s) / (2.0 * h);
        hess[(1, 1)] = (nn - 2.0 * c + s) / (h * h);
        let mixed = (at(1, 1)? - at(1, -1)? - at(-1, 1)? + at(-1, -1)?) / (4.0 * h * h);
        hess[(0, 1)] = mixed;
        hess[(1, 0)] = mixed;
    }
    Ok(PointJet { grad, hess })
}
