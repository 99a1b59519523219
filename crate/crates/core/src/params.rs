//! Structural parameters of `|∇u|^γ Δ_p^N u = a(x) u_+^m` and every exponent or
//! constant that follows from them in closed form.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Dimension and exponents `(n, p, γ, m)` of one problem instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructuralParams {
    pub n: usize,
    pub p: f64,
    pub gamma: f64,
    pub m: f64,
}

impl StructuralParams {
    /// Validates `p > 1`, `γ > −1` and `0 ≤ m ≤ γ + 1`.
    ///
    /// `m = γ + 1` is accepted and reported by [`StructuralParams::is_critical`].
    pub fn new(n: usize, p: f64, gamma: f64, m: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParams("dimension must be at least 1".into()));
        }
        if !(p.is_finite() && gamma.is_finite() && m.is_finite()) {
            return Err(Error::InvalidParams("exponents must be finite".into()));
        }
        if p <= 1.0 {
            return Err(Error::InvalidParams(format!("p must exceed 1, got {p}")));
        }
        if gamma <= -1.0 {
            return Err(Error::InvalidParams(format!("gamma must exceed -1, got {gamma}")));
        }
        if m < 0.0 {
            return Err(Error::InvalidParams(format!("m must be non-negative, got {m}")));
        }
        if m > gamma + 1.0 {
            return Err(Error::InvalidParams(format!("m = {m} exceeds gamma + 1 = {}", gamma + 1.0)));
        }
        Ok(Self { n, p, gamma, m })
    }

    /// `m = γ + 1`: no dead core, strong maximum principle regime.
    pub fn is_critical(&self) -> bool {
        self.m == self.gamma + 1.0
    }

    /// `γ + 1 − m`, the homogeneity gap that every exponent divides by.
    pub fn gap(&self) -> f64 {
        self.gamma + 1.0 - self.m
    }

    fn require_subcritical(&self) -> Result<()> {
        if self.is_critical() {
            Err(Error::CriticalRegime)
        } else {
            Ok(())
        }
    }

    /// `n − 1 + (p − 1)(b − 1)`, the radial operator factor of `|x|^b`.
    fn radial_factor(&self, exponent: f64) -> f64 {
        (self.n as f64 - 1.0) + (self.p - 1.0) * (exponent - 1.0)
    }
}

/// Growth exponent `β = (γ + 2)/(γ + 1 − m)`.
pub fn compute_beta(params: &StructuralParams) -> Result<f64> {
    params.require_subcritical()?;
    Ok((params.gamma + 2.0) / params.gap())
}

/// Growth exponent with a Hénon weight `dist(x, F)^α`: `(γ + 2 + α)/(γ + 1 − m)`.
pub fn compute_beta_henon(params: &StructuralParams, alpha: f64) -> Result<f64> {
    params.require_subcritical()?;
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidThiele(format!("Hénon exponent must be >= 0, got {alpha}")));
    }
    Ok((params.gamma + 2.0 + alpha) / params.gap())
}

/// Coefficient `c` making `c|x|^b` an exact solution with constant modulus `weight`
/// (or `weight |x|^{b(γ+1−m) − γ − 2}` when `b` carries a Hénon shift).
pub(crate) fn profile_coefficient(params: &StructuralParams, exponent: f64, weight: f64) -> f64 {
    let gap = params.gap();
    let factor = params.radial_factor(exponent);
    assert!(factor > 0.0, "radial operator factor must be positive");
    exponent.powf(-(params.gamma + 1.0) / gap) * (weight / factor).powf(1.0 / gap)
}

/// Radial constant `c_{n,γ,m,p} = β^{−(γ+1)/(γ+1−m)} [n−1+(p−1)(β−1)]^{−1/(γ+1−m)}`.
pub fn compute_radial_constant(params: &StructuralParams) -> Result<f64> {
    let beta = compute_beta(params)?;
    Ok(profile_coefficient(params, beta, 1.0))
}

/// Non-degeneracy constant
/// `C_ND = β^{−(γ+1)/(γ+1−m)} [λ₀/(n−1+(p−1)(β−1))]^{1/(γ+1−m)}`.
pub fn compute_cnd(params: &StructuralParams, lambda0: f64) -> Result<f64> {
    let beta = compute_beta(params)?;
    if !(lambda0 > 0.0 && lambda0.is_finite()) {
        return Err(Error::InvalidThiele(format!("lambda0 must be positive, got {lambda0}")));
    }
    Ok(profile_coefficient(params, beta, lambda0))
}

/// Tug-of-war-with-noise probabilities: `α₀` for the coin-toss move, `β₀` for noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GameWeights {
    pub alpha0: f64,
    pub beta0: f64,
}

/// `α₀ = (p − 2)/(p + n)`, `β₀ = (n + 2)/(p + n)`. Only defined for `p ≥ 2`.
pub fn compute_game_weights(params: &StructuralParams) -> Result<GameWeights> {
    game_weights(params.p, params.n)
}

pub(crate) fn game_weights(p: f64, n: usize) -> Result<GameWeights> {
    if !(p >= 2.0) {
        return Err(Error::UnsupportedGameRange(p));
    }
    let n = n as f64;
    let alpha0 = (p - 2.0) / (p + n);
    Ok(GameWeights { alpha0, beta0: 1.0 - alpha0 })
}

/// Closed-form exponents and constants shared by every module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedExponents {
    pub beta: f64,
    pub c_rad: f64,
    pub c_nd: f64,
    /// `(1 + m)/(γ + 1 − m)`, equal to `β − 1`.
    pub grad_exp: f64,
    /// `γm/(γ + 1 − m)`.
    pub l2_exp: f64,
    pub beta_henon: Option<f64>,
}

impl DerivedExponents {
    pub fn compute(params: &StructuralParams, thiele: &ThieleSpec) -> Result<Self> {
        let beta = compute_beta(params)?;
        let gap = params.gap();
        let lambda0 = thiele.lambda0();
        // The Hénon weight has no positive lower bound; its profile constant uses the weight.
        let c_nd = if lambda0 > 0.0 {
            compute_cnd(params, lambda0)?
        } else {
            profile_coefficient(params, beta, thiele.profile_weight())
        };
        Ok(Self {
            beta,
            c_rad: compute_radial_constant(params)?,
            c_nd,
            grad_exp: (1.0 + params.m) / gap,
            l2_exp: params.gamma * params.m / gap,
            beta_henon: match thiele {
                ThieleSpec::Henon { alpha, .. } => Some(compute_beta_henon(params, *alpha)?),
                _ => None,
            },
        })
    }
}

type PointFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Absorption coefficient `a(x)` (the Thiele modulus).
#[derive(Clone)]
pub enum ThieleSpec {
    Constant {
        value: f64,
    },
    /// A bounded field with declared bounds `λ₀ ≤ a(x) ≤ Λ₀`.
    Field {
        lambda0: f64,
        big_lambda0: f64,
        field: PointFn,
    },
    /// `weight · dist(x, F)^α` for a finite point set `F`.
    Henon {
        weight: f64,
        alpha: f64,
        set: Vec<Vec<f64>>,
    },
    /// `factor · a(ρ x)`, produced by rescaling.
    Scaled {
        factor: f64,
        rho: f64,
        inner: Box<ThieleSpec>,
    },
}

impl fmt::Debug for ThieleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant { value } => f.debug_struct("Constant").field("value", value).finish(),
            Self::Field { lambda0, big_lambda0, .. } => f
                .debug_struct("Field")
                .field("lambda0", lambda0)
                .field("big_lambda0", big_lambda0)
                .finish_non_exhaustive(),
            Self::Henon { weight, alpha, set } => {
                f.debug_struct("Henon").field("weight", weight).field("alpha", alpha).field("set", set).finish()
            }
            Self::Scaled { factor, rho, inner } => {
                f.debug_struct("Scaled").field("factor", factor).field("rho", rho).field("inner", inner).finish()
            }
        }
    }
}

impl ThieleSpec {
    pub fn constant(value: f64) -> Result<Self> {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::InvalidThiele(format!("constant modulus must be positive, got {value}")));
        }
        Ok(Self::Constant { value })
    }

    pub fn field<F>(lambda0: f64, big_lambda0: f64, field: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        if !(lambda0 > 0.0 && big_lambda0 >= lambda0 && big_lambda0.is_finite()) {
            return Err(Error::InvalidThiele(format!(
                "need 0 < lambda0 <= Lambda0 < inf, got {lambda0}, {big_lambda0}"
            )));
        }
        Ok(Self::Field { lambda0, big_lambda0, field: Arc::new(field) })
    }

    pub fn henon(weight: f64, alpha: f64, set: Vec<Vec<f64>>) -> Result<Self> {
        if !(weight > 0.0 && weight.is_finite()) {
            return Err(Error::InvalidThiele(format!("Hénon weight must be positive, got {weight}")));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidThiele(format!("Hénon exponent must be positive, got {alpha}")));
        }
        if set.is_empty() {
            return Err(Error::InvalidThiele("Hénon set F must not be empty".into()));
        }
        Ok(Self::Henon { weight, alpha, set })
    }

    /// `factor · a(ρ x)`.
    pub fn scaled(&self, factor: f64, rho: f64) -> Result<Self> {
        if !(factor >= 0.0 && factor.is_finite() && rho > 0.0 && rho.is_finite()) {
            return Err(Error::InvalidThiele(format!("bad scaling factor {factor} / rho {rho}")));
        }
        Ok(Self::Scaled { factor, rho, inner: Box::new(self.clone()) })
    }

    /// Evaluates `a(x)`, enforcing the declared bounds of field variants.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        match self {
            Self::Constant { value } => Ok(*value),
            Self::Field { lambda0, big_lambda0, field } => {
                let a = field(x);
                if a < *lambda0 || a > *big_lambda0 || !a.is_finite() {
                    return Err(Error::InvalidThiele(format!(
                        "a(x) = {a} outside [{lambda0}, {big_lambda0}] at {x:?}"
                    )));
                }
                Ok(a)
            }
            Self::Henon { weight, alpha, set } => {
                let d = set.iter().map(|q| distance(x, q)).fold(f64::INFINITY, f64::min);
                Ok(weight * d.powf(*alpha))
            }
            Self::Scaled { factor, rho, inner } => {
                let y: Vec<f64> = x.iter().map(|xi| rho * xi).collect();
                Ok(factor * inner.eval(&y)?)
            }
        }
    }

    /// Declared lower bound `λ₀` (zero for Hénon weights).
    pub fn lambda0(&self) -> f64 {
        match self {
            Self::Constant { value } => *value,
            Self::Field { lambda0, .. } => *lambda0,
            Self::Henon { .. } => 0.0,
            Self::Scaled { factor, inner, .. } => factor * inner.lambda0(),
        }
    }

    /// Declared upper bound `Λ₀`, when one is known without a domain.
    pub fn big_lambda0(&self) -> Option<f64> {
        match self {
            Self::Constant { value } => Some(*value),
            Self::Field { big_lambda0, .. } => Some(*big_lambda0),
            Self::Henon { .. } => None,
            Self::Scaled { factor, inner, .. } => inner.big_lambda0().map(|b| factor * b),
        }
    }

    /// Multiplicative weight of the variant (the constant, `λ₀`, or the Hénon weight).
    pub fn profile_weight(&self) -> f64 {
        match self {
            Self::Henon { weight, .. } => *weight,
            Self::Scaled { factor, inner, .. } => factor * inner.profile_weight(),
            other => other.lambda0(),
        }
    }
}

pub(crate) fn distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Dirichlet data `g ≥ 0` sampled wherever a boundary node needs it.
#[derive(Clone)]
pub struct BoundaryData(PointFn);

impl BoundaryData {
    pub fn new<F>(g: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self(Arc::new(g))
    }

    pub fn constant(value: f64) -> Self {
        Self::new(move |_| value)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.0)(x)
    }
}

impl fmt::Debug for BoundaryData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("BoundaryData(..)")
    }
}

/// One PDE instance: exponents, modulus, boundary data, and eagerly derived constants.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub params: StructuralParams,
    pub thiele: ThieleSpec,
    pub boundary: BoundaryData,
    /// `None` in the critical regime, where `β` does not exist.
    pub derived: Option<DerivedExponents>,
}

impl ProblemSpec {
    pub fn new(params: StructuralParams, thiele: ThieleSpec, boundary: BoundaryData) -> Result<Self> {
        let derived = if params.is_critical() { None } else { Some(DerivedExponents::compute(&params, &thiele)?) };
        Ok(Self { params, thiele, boundary, derived })
    }

    pub fn derived(&self) -> Result<&DerivedExponents> {
        self.derived.as_ref().ok_or(Error::CriticalRegime)
    }
}
