//! Closed-form solutions and barriers with analytic jets.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::operators::{residual_from_jet, JetField, PointJet};
use crate::params::{
    compute_beta, compute_beta_henon, compute_cnd, distance, profile_coefficient, StructuralParams, ThieleSpec,
};

/// `c (|x − x₀| − r)_+^β`.
///
/// With `r = 0`, or in one dimension, and `c` the profile constant of the modulus,
/// this solves the equation exactly away from `x₀`. For `n ≥ 2` and `r > 0` the
/// curvature term makes it a strict supersolution.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialDeadCore {
    pub center: Vec<f64>,
    pub core_radius: f64,
    pub coefficient: f64,
    pub beta: f64,
    pub params: StructuralParams,
}

impl RadialDeadCore {
    pub fn new(
        params: StructuralParams,
        coefficient: f64,
        beta: f64,
        center: Vec<f64>,
        core_radius: f64,
    ) -> Result<Self> {
        if center.len() != params.n {
            return Err(Error::InvalidParams(format!(
                "center has {} coordinates, dimension is {}",
                center.len(),
                params.n
            )));
        }
        if !(coefficient > 0.0 && coefficient.is_finite()) || !(core_radius >= 0.0) || !(beta > 1.0) {
            return Err(Error::InvalidParams(format!(
                "bad profile: c = {coefficient}, r = {core_radius}, beta = {beta}"
            )));
        }
        Ok(Self { center, core_radius, coefficient, beta, params })
    }

    /// Profile with `c = C_ND(λ₀)` and `β` from the structural parameters.
    pub fn exact(params: StructuralParams, lambda0: f64, center: Vec<f64>, core_radius: f64) -> Result<Self> {
        let beta = compute_beta(&params)?;
        let c = compute_cnd(&params, lambda0)?;
        Self::new(params, c, beta, center, core_radius)
    }

    /// `c |x − x₀|^β̂`, exact for the weight `w |x − x₀|^α`.
    pub fn henon(params: StructuralParams, weight: f64, alpha: f64, center: Vec<f64>) -> Result<Self> {
        let beta = compute_beta_henon(&params, alpha)?;
        if !(weight > 0.0) {
            return Err(Error::InvalidThiele(format!("Hénon weight must be positive, got {weight}")));
        }
        let c = profile_coefficient(&params, beta, weight);
        Self::new(params, c, beta, center, 0.0)
    }

    /// `x ↦ u(x₀ + ρ (x − x₀)) / κ`, again a profile about the same center.
    pub fn rescaled(&self, rho: f64, kappa: f64) -> Result<Self> {
        if !(rho > 0.0 && kappa > 0.0) {
            return Err(Error::InvalidParams(format!("need rho, kappa > 0, got {rho}, {kappa}")));
        }
        Self::new(
            self.params,
            self.coefficient * rho.powf(self.beta) / kappa,
            self.beta,
            self.center.clone(),
            self.core_radius / rho,
        )
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let s = distance(x, &self.center) - self.core_radius;
        if s <= 0.0 {
            0.0
        } else {
            self.coefficient * s.powf(self.beta)
        }
    }

    /// `|∇u|` in closed form.
    pub fn gradient_norm(&self, x: &[f64]) -> f64 {
        let s = distance(x, &self.center) - self.core_radius;
        if s <= 0.0 {
            0.0
        } else {
            self.coefficient * self.beta * s.powf(self.beta - 1.0)
        }
    }

    /// Value and analytic jet.
    pub fn eval(&self, x: &[f64]) -> Result<(f64, PointJet)> {
        let n = self.params.n;
        let rho = distance(x, &self.center);
        let s = rho - self.core_radius;
        let (c, b) = (self.coefficient, self.beta);
        if s < 0.0 {
            return Ok((0.0, PointJet::zero(n)));
        }
        if s == 0.0 {
            // The second derivative jumps across the core sphere unless β > 2.
            if b < 2.0 || (b == 2.0 && self.core_radius > 0.0) {
                return Err(Error::NonSmoothPoint);
            }
            let hess = if b == 2.0 { DMatrix::identity(n, n) * (2.0 * c) } else { DMatrix::zeros(n, n) };
            return Ok((0.0, PointJet { grad: DVector::zeros(n), hess }));
        }
        let dir = DVector::from_iterator(n, x.iter().zip(&self.center).map(|(a, o)| (a - o) / rho));
        let radial = dir.clone() * dir.transpose();
        let d1 = c * b * s.powf(b - 1.0);
        let d2 = c * b * (b - 1.0) * s.powf(b - 2.0);
        let tangential = DMatrix::identity(n, n) - &radial;
        let hess = radial * d2 + tangential * (d1 / rho);
        Ok((c * s.powf(b), PointJet { grad: dir * d1, hess }))
    }
}

impl JetField for RadialDeadCore {
    fn dim(&self) -> usize {
        self.params.n
    }

    fn value_and_jet(&self, x: &[f64]) -> Result<(f64, PointJet)> {
        self.eval(x)
    }
}

/// `Ψ(x) = c |x − x₀|^β`, the comparison function behind non-degeneracy.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerBarrier {
    profile: RadialDeadCore,
}

impl PowerBarrier {
    pub fn new(params: StructuralParams, coefficient: f64, center: Vec<f64>) -> Result<Self> {
        let beta = compute_beta(&params)?;
        Ok(Self { profile: RadialDeadCore::new(params, coefficient, beta, center, 0.0)? })
    }

    /// Largest `c` for which `|∇Ψ|^γ Δ_p^N Ψ ≤ λ₀ Ψ^m`.
    pub fn admissible_bound(params: &StructuralParams, lambda0: f64) -> Result<f64> {
        compute_beta(params)?;
        if !(lambda0 > 0.0) {
            return Err(Error::InvalidThiele(format!("lambda0 must be positive, got {lambda0}")));
        }
        let (g, m, n, p) = (params.gamma, params.m, params.n as f64, params.p);
        let gap = params.gap();
        let num = gap.powf(2.0 + g) * lambda0;
        let den = (2.0 + g).powf(1.0 + g) * (gap * (n - 1.0) + (p - 1.0) * (1.0 + m));
        Ok((num / den).powf(1.0 / gap))
    }

    pub fn coefficient(&self) -> f64 {
        self.profile.coefficient
    }

    pub fn beta(&self) -> f64 {
        self.profile.beta
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.profile.value(x)
    }

    /// Largest residual `|∇Ψ|^γ Δ_p^N Ψ − a Ψ^m` over `samples`; non-positive
    /// whenever the coefficient is admissible and `a ≥ λ₀`.
    pub fn max_residual(&self, thiele: &ThieleSpec, samples: &[Vec<f64>]) -> Result<f64> {
        let mut worst = f64::NEG_INFINITY;
        for x in samples {
            let (u, jet) = self.profile.eval(x)?;
            let a = thiele.eval(x)?;
            worst = worst.max(residual_from_jet(u, &jet, a, &self.profile.params, 0.0).value);
        }
        Ok(worst)
    }
}

impl JetField for PowerBarrier {
    fn dim(&self) -> usize {
        self.profile.params.n
    }

    fn value_and_jet(&self, x: &[f64]) -> Result<(f64, PointJet)> {
        self.profile.eval(x)
    }
}

/// `Φ_a`: `e^{−a|x|²} − κ₀` on `d/2 ≤ |x| ≤ d` with `κ₀ = e^{−a d²}`,
/// `e^{−a d²/4} − κ₀` inside `B_{d/2}` and zero outside `B_d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpBarrier {
    pub a: f64,
    pub d: f64,
    pub kappa0: f64,
    pub n: usize,
}

impl ExpBarrier {
    pub fn new(a: f64, d: f64, n: usize) -> Result<Self> {
        if !(d > 0.0 && d.is_finite()) || n == 0 {
            return Err(Error::InvalidParams(format!("annulus scale must be positive, got {d}")));
        }
        if !(a >= 2.0 / (d * d) && a.is_finite()) {
            return Err(Error::InvalidParams(format!("decay rate must be >= 2/d^2 = {}, got {a}", 2.0 / (d * d))));
        }
        Ok(Self { a, d, kappa0: (-a * d * d).exp(), n })
    }

    /// Lower bound `a d e^{−a d²}` for `|∇Φ_a|` on the annulus.
    pub fn gradient_floor(&self) -> f64 {
        self.a * self.d * (-self.a * self.d * self.d).exp()
    }

    pub fn in_annulus(&self, x: &[f64]) -> bool {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        r >= 0.5 * self.d && r <= self.d
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        if r2 > self.d * self.d {
            0.0
        } else if r2 < 0.25 * self.d * self.d {
            (-0.25 * self.a * self.d * self.d).exp() - self.kappa0
        } else {
            (-self.a * r2).exp() - self.kappa0
        }
    }

    /// Jet of the annulus formula; the jet vanishes on the two constant pieces.
    pub fn eval(&self, x: &[f64]) -> (f64, PointJet) {
        let n = self.n;
        let v = self.value(x);
        if !self.in_annulus(x) {
            return (v, PointJet::zero(n));
        }
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let e = (-self.a * r2).exp();
        let xv = DVector::from_column_slice(x);
        let grad = &xv * (-2.0 * self.a * e);
        let hess = (&xv * xv.transpose() * (4.0 * self.a * self.a) - DMatrix::identity(n, n) * (2.0 * self.a)) * e;
        (v, PointJet { grad, hess })
    }
}

impl JetField for ExpBarrier {
    fn dim(&self) -> usize {
        self.n
    }

    fn value_and_jet(&self, x: &[f64]) -> Result<(f64, PointJet)> {
        Ok(self.eval(x))
    }
}

/// Minimum of `|∇Φ_a|^γ Δ_p^N Φ_a − a(x) Φ_a^{1+γ}` over annulus samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SignReport {
    pub min_residual: f64,
    pub argmin: usize,
    pub nonnegative: bool,
}

pub fn exp_barrier_residual_sign(
    barrier: &ExpBarrier,
    params: &StructuralParams,
    thiele: &ThieleSpec,
    samples: &[Vec<f64>],
) -> Result<SignReport> {
    if !params.is_critical() {
        return Err(Error::NotApplicable("the exponential barrier needs m = gamma + 1".into()));
    }
    if samples.is_empty() {
        return Err(Error::InsufficientSignal("no annulus samples".into()));
    }
    let mut report = SignReport { min_residual: f64::INFINITY, argmin: 0, nonnegative: true };
    for (i, x) in samples.iter().enumerate() {
        if !barrier.in_annulus(x) {
            return Err(Error::OutsideAnnulus);
        }
        let (u, jet) = barrier.eval(x);
        let r = residual_from_jet(u, &jet, thiele.eval(x)?, params, 0.0).value;
        if r < report.min_residual {
            report.min_residual = r;
            report.argmin = i;
        }
    }
    report.nonnegative = report.min_residual >= 0.0;
    Ok(report)
}

/// Smallest decay rate (to relative precision `1e−6`) for which the annulus
/// residual is non-negative on `samples`, starting from `2/d²` and doubling.
pub fn calibrate_exp_barrier(
    d: f64,
    params: &StructuralParams,
    thiele: &ThieleSpec,
    samples: &[Vec<f64>],
) -> Result<ExpBarrier> {
    let ok = |a: f64| -> Result<bool> {
        Ok(exp_barrier_residual_sign(&ExpBarrier::new(a, d, params.n)?, params, thiele, samples)?.nonnegative)
    };
    let mut lo = 2.0 / (d * d);
    if ok(lo)? {
        return ExpBarrier::new(lo, d, params.n);
    }
    let mut hi = 2.0 * lo;
    let mut doublings = 0;
    while !ok(hi)? {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 60 {
            return Err(Error::NotApplicable("no decay rate makes the barrier a subsolution".into()));
        }
    }
    while hi - lo > 1e-6 * hi {
        let mid = 0.5 * (lo + hi);
        if ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    ExpBarrier::new(hi, d, params.n)
}

/// `v_R(x) = C_ND [|x| − R(1 − θ̃^{1/β})]_+^β` with `θ̃ = sup_{∂B_R} u / (C_ND R^β)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiouvilleSupersolution {
    pub outer_radius: f64,
    pub boundary_sup: f64,
    pub c_nd: f64,
    pub beta: f64,
}

impl LiouvilleSupersolution {
    pub fn new(boundary_sup: f64, outer_radius: f64, params: &StructuralParams, lambda0: f64) -> Result<Self> {
        let beta = compute_beta(params)?;
        let c_nd = compute_cnd(params, lambda0)?;
        if !(outer_radius > 0.0) || !(boundary_sup >= 0.0) {
            return Err(Error::InvalidParams(format!("need R > 0 and sup >= 0, got {outer_radius}, {boundary_sup}")));
        }
        if boundary_sup > c_nd * outer_radius.powf(beta) {
            return Err(Error::NotApplicable(format!(
                "boundary sup {boundary_sup} exceeds C_ND R^beta = {}",
                c_nd * outer_radius.powf(beta)
            )));
        }
        Ok(Self { outer_radius, boundary_sup, c_nd, beta })
    }

    /// `θ̃ = sup_{∂B_R} u / (C_ND R^β)`.
    pub fn theta(&self) -> f64 {
        self.boundary_sup / (self.c_nd * self.outer_radius.powf(self.beta))
    }

    /// Radius of the ball on which `v_R` vanishes.
    pub fn core_radius(&self) -> f64 {
        self.outer_radius * (1.0 - self.theta().powf(1.0 / self.beta))
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let s = r - self.core_radius();
        if s <= 0.0 {
            0.0
        } else {
            self.c_nd * s.powf(self.beta)
        }
    }
}

pub fn liouville_supersolution_eval(
    sup_r: f64,
    outer_radius: f64,
    params: &StructuralParams,
    lambda0: f64,
    x: &[f64],
) -> Result<f64> {
    Ok(LiouvilleSupersolution::new(sup_r, outer_radius, params, lambda0)?.value(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::pde_residual;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params(n: usize, p: f64, gamma: f64, m: f64) -> StructuralParams {
        StructuralParams::new(n, p, gamma, m).unwrap()
    }

    #[test]
    fn quarter_square_in_the_plane() {
        let prm = params(2, 2.0, 0.0, 0.0);
        let u = RadialDeadCore::exact(prm, 1.0, vec![0.0, 0.0], 0.0).unwrap();
        let a = ThieleSpec::constant(1.0).unwrap();
        for x in [[0.3, 0.1], [-0.7, 0.2], [0.0, 1.5]] {
            assert_relative_eq!(u.value(&x), 0.25 * (x[0] * x[0] + x[1] * x[1]), max_relative = 1e-14);
            assert!(pde_residual(&u, &x, &prm, &a, 0.0).unwrap().value.abs() < 1e-14);
        }
        let (_, j) = u.eval(&[0.0, 0.0]).unwrap();
        assert_relative_eq!(j.hess[(0, 0)], 0.5);
    }

    #[test]
    fn inside_core_and_unit_distance() {
        let u = RadialDeadCore::exact(params(2, 3.0, 1.0, 0.5), 1.0, vec![0.1, -0.2], 0.3).unwrap();
        let (v, j) = u.eval(&[0.15, -0.1]).unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(j, PointJet::zero(2));
        assert_relative_eq!(u.value(&[1.4, -0.2]), u.coefficient, max_relative = 1e-14);
    }

    #[test]
    fn jet_on_core_sphere_is_rejected_when_not_smooth() {
        let u = RadialDeadCore::exact(params(1, 2.0, 1.0, 0.0), 1.0, vec![0.0], 0.5).unwrap();
        assert!(u.beta < 2.0);
        assert_eq!(u.eval(&[0.5]), Err(Error::NonSmoothPoint));
    }

    #[test]
    fn analytic_jet_matches_finite_differences() {
        let u = RadialDeadCore::exact(params(2, 3.0, 1.0, 0.5), 1.0, vec![0.0, 0.0], 0.3).unwrap();
        let x = [0.6, 0.4];
        let (_, j) = u.eval(&x).unwrap();
        let err = |h: f64| {
            let f = |dx: f64, dy: f64| u.value(&[x[0] + dx, x[1] + dy]);
            let gx = (f(h, 0.0) - f(-h, 0.0)) / (2.0 * h);
            let hxy = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h);
            let hyy = (f(0.0, h) - 2.0 * f(0.0, 0.0) + f(0.0, -h)) / (h * h);
            (gx - j.grad[0]).abs() + (hxy - j.hess[(0, 1)]).abs() + (hyy - j.hess[(1, 1)]).abs()
        };
        assert!(err(0.02) / err(0.01) >= 3.5);
    }

    #[test]
    fn radial_residual_sweep() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1usize, 2] {
            for p in [1.5, 2.0, 3.0] {
                for gamma in [-0.5, 0.0, 1.0] {
                    for m in [0.0, 0.5 * (gamma + 1.0)] {
                        for lambda0 in [0.5, 1.0, 2.0] {
                            let prm = params(n, p, gamma, m);
                            let r = if n == 1 { 0.25 } else { 0.0 };
                            let center = vec![0.0; n];
                            let u = RadialDeadCore::exact(prm, lambda0, center, r).unwrap();
                            let a = ThieleSpec::constant(lambda0).unwrap();
                            for _ in 0..200 {
                                let s = rng.gen_range(0.05..=1.0);
                                let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                                let x = if n == 1 {
                                    vec![if theta < 3.0 { r + s } else { -r - s }]
                                } else {
                                    vec![s * theta.cos(), s * theta.sin()]
                                };
                                let res = pde_residual(&u, &x, &prm, &a, 0.0).unwrap().value;
                                assert!(res.abs() <= 1e-8, "{prm:?} l0={lambda0} x={x:?} res={res}");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn planar_profile_with_core_is_a_supersolution() {
        let prm = params(2, 3.0, 1.0, 0.5);
        let u = RadialDeadCore::exact(prm, 1.0, vec![0.0, 0.0], 0.3).unwrap();
        let a = ThieleSpec::constant(1.0).unwrap();
        let res = pde_residual(&u, &[0.8, 0.0], &prm, &a, 0.0).unwrap().value;
        assert!(res < 0.0);
    }

    #[test]
    fn rescaling_normalizes_coefficient() {
        let prm = params(2, 3.0, 1.0, 0.5);
        let u = RadialDeadCore::exact(prm, 1.0, vec![0.0, 0.0], 0.0).unwrap();
        let rho: f64 = 0.5;
        let kappa = u.coefficient * rho.powf(u.beta);
        let v = u.rescaled(rho, kappa).unwrap();
        assert_relative_eq!(v.coefficient, 1.0, max_relative = 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let x = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let direct = u.value(&[rho * x[0], rho * x[1]]) / kappa;
            assert_relative_eq!(direct, v.value(&x), max_relative = 1e-12);
        }
    }

    #[test]
    fn power_barrier_bound_and_sign() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (n, p, g, m) in [(2, 3.0, 1.0, 0.5), (2, 2.0, 0.0, 0.0), (1, 1.5, -0.5, 0.2), (2, 4.0, 2.0, 1.0)] {
            let prm = params(n, p, g, m);
            let bound = PowerBarrier::admissible_bound(&prm, 1.5).unwrap();
            assert_relative_eq!(bound, compute_cnd(&prm, 1.5).unwrap(), max_relative = 1e-12);
            let psi = PowerBarrier::new(prm, bound, vec![0.0; n]).unwrap();
            let a = ThieleSpec::field(1.5, 3.0, |x: &[f64]| 1.5 + x[0] * x[0]).unwrap();
            let samples: Vec<Vec<f64>> = (0..200).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
            assert!(psi.max_residual(&a, &samples).unwrap() <= 1e-12);
        }
    }

    fn annulus_samples(d: f64, count: usize) -> Vec<Vec<f64>> {
        (0..count)
            .map(|i| {
                let t = i as f64 / count as f64;
                let r = d * (0.5 + 0.5 * ((i * 7) % count) as f64 / (count - 1) as f64);
                let th = std::f64::consts::TAU * t;
                vec![r * th.cos(), r * th.sin()]
            })
            .collect()
    }

    #[test]
    fn exp_barrier_calibration() {
        let prm = params(2, 2.0, 0.0, 1.0);
        let a = ThieleSpec::constant(1.0).unwrap();
        let d = 0.5;
        let samples = annulus_samples(d, 100);
        let at_floor = ExpBarrier::new(8.0, d, 2).unwrap();
        assert!(!exp_barrier_residual_sign(&at_floor, &prm, &a, &samples).unwrap().nonnegative);
        let cal = calibrate_exp_barrier(d, &prm, &a, &samples).unwrap();
        // The operator alone turns positive once a d² / 4 exceeds (1 + (n−1)/(p−1)) / 2.
        assert!(cal.a > 16.0);
        assert!(exp_barrier_residual_sign(&cal, &prm, &a, &samples).unwrap().min_residual >= 0.0);
        assert!(cal.gradient_floor() > 0.0);
        assert_eq!(exp_barrier_residual_sign(&cal, &prm, &a, &[vec![0.1, 0.0]]), Err(Error::OutsideAnnulus));
    }

    #[test]
    fn exp_barrier_outside_pieces() {
        let prm = params(2, 3.0, 1.0, 2.0);
        let b = ExpBarrier::new(20.0, 0.5, 2).unwrap();
        let a = ThieleSpec::constant(1.0).unwrap();
        let inside = pde_residual(&b, &[0.05, 0.0], &prm, &a, 0.0).unwrap().value;
        assert!(inside <= 0.0);
        assert_eq!(pde_residual(&b, &[0.9, 0.0], &prm, &a, 0.0).unwrap().value, 0.0);
        assert_relative_eq!(b.value(&[0.1, 0.0]), (-20.0f64 * 0.0625).exp() - b.kappa0);
    }

    #[test]
    fn liouville_examples() {
        let prm = params(2, 2.0, 0.0, 0.0);
        let v = LiouvilleSupersolution::new(1.0, 4.0, &prm, 1.0).unwrap();
        assert_relative_eq!(v.theta(), 0.25);
        assert_eq!(v.value(&[0.0, 0.0]), 0.0);
        assert_relative_eq!(v.value(&[4.0, 0.0]), 1.0, max_relative = 1e-14);
        assert_relative_eq!(v.value(&[3.0, 0.0]), 0.25, max_relative = 1e-14);
        let near_one = LiouvilleSupersolution::new(4.0 * (1.0 - 1e-12), 4.0, &prm, 1.0).unwrap();
        assert_relative_eq!(near_one.value(&[1.0, 1.0]), 0.5, max_relative = 1e-9);
        assert!(matches!(LiouvilleSupersolution::new(4.1, 4.0, &prm, 1.0), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn liouville_collapse_is_monotone_in_r() {
        let prm = params(2, 3.0, 1.0, 0.5);
        let c_nd = compute_cnd(&prm, 1.0).unwrap();
        let beta = compute_beta(&prm).unwrap();
        let theta = 0.3;
        for x in [[0.5, 0.0], [2.0, 1.0], [5.0, -3.0]] {
            let mut last = f64::INFINITY;
            for r in [8.0, 10.0, 16.0, 32.0, 64.0] {
                let v = liouville_supersolution_eval(theta * c_nd * f64::powf(r, beta), r, &prm, 1.0, &x).unwrap();
                assert!(v <= last);
                last = v;
            }
        }
    }
}
