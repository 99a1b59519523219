use crate::error::{Error, Result};

use super::grid::GridDomain;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    FdRelax,
    DppIter,
}

/// Iteration controls shared by the finite-difference and DPP solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub scheme: Scheme,
    /// Gradient regularization; `None` means `h²`.
    pub eps_g: Option<f64>,
    pub relax: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// Ball radius of the DPP; required by [`Scheme::DppIter`].
    pub eps_dpp: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { scheme: Scheme::FdRelax, eps_g: None, relax: 0.8, tol: 1e-8, max_iter: 200_000, eps_dpp: None }
    }
}

impl SolverConfig {
    pub fn dpp(eps: f64) -> Self {
        Self { scheme: Scheme::DppIter, eps_dpp: Some(eps), ..Self::default() }
    }

    pub fn validate(&self, grid: &GridDomain) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidConfig(format!("tol must be positive, got {}", self.tol)));
        }
        if !(self.relax > 0.0 && self.relax <= 1.0) {
            return Err(Error::InvalidConfig(format!("relax must lie in (0, 1], got {}", self.relax)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be positive".into()));
        }
        if let Some(e) = self.eps_g {
            if !(e >= 0.0) {
                return Err(Error::InvalidConfig(format!("eps_g must be non-negative, got {e}")));
            }
        }
        if self.scheme == Scheme::DppIter {
            match self.eps_dpp {
                Some(e) if e >= 2.0 * grid.h() * (1.0 - 1e-12) => {}
                Some(e) => return Err(Error::InvalidConfig(format!("eps_dpp = {e} is below 2h = {}", 2.0 * grid.h()))),
                None => return Err(Error::InvalidConfig("dpp_iter needs eps_dpp".into())),
            }
        }
        Ok(())
    }

    pub fn eps_g_for(&self, grid: &GridDomain) -> f64 {
        self.eps_g.unwrap_or(grid.h() * grid.h())
    }

    /// Threshold below which a node counts as dead core.
    pub fn u_tol(&self) -> f64 {
        10.0 * self.tol
    }
}
