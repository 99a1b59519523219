//! Monte Carlo tug-of-war with noise played on the nodes of a DPP grid.
//!
//! With probability `β₀` the token jumps to a uniformly chosen node of the
//! `ε`-ball; with probability `α₀` a fair coin picks the player, and the
//! maximizer (minimizer) moves to the argmax (argmin) of the reference value.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::params::{game_weights, BoundaryData, GameWeights};
use crate::solver::{BallStencil, SolutionField};

#[derive(Debug, Clone)]
pub struct GameConfig {
    pub p: f64,
    pub eps: f64,
    pub n_walks: usize,
    /// `None` means `50 (diam/ε)²`.
    pub max_steps: Option<usize>,
    pub seed: u64,
    /// Payoff collected on the first non-interior node.
    pub payoff: BoundaryData,
}

impl GameConfig {
    /// `(α₀, β₀)` in dimension `n`.
    pub fn weights(&self, n: usize) -> Result<GameWeights> {
        game_weights(self.p, n)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkStats {
    pub n_walks: usize,
    pub mean: f64,
    pub sd: f64,
    /// `1.96 sd / √n_walks`.
    pub ci_half_width: f64,
    pub mean_exit_time: f64,
    pub truncated: usize,
    /// More than 1% of the walks hit `max_steps`.
    pub truncation_warning: bool,
}

impl WalkStats {
    /// `|mean − value| ≤ max(3 CI, 0.02 osc F)`.
    pub fn agrees_with(&self, value: f64, payoff_osc: f64) -> bool {
        (self.mean - value).abs() <= (3.0 * self.ci_half_width).max(0.02 * payoff_osc)
    }
}

#[derive(Clone, Copy)]
struct Walk {
    payoff: f64,
    steps: usize,
    truncated: bool,
}

/// Sum of a slice by recursive halving, independent of the worker count.
fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        v.iter().sum()
    } else {
        let mid = v.len() / 2;
        pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
    }
}

/// Plays `n_walks` games from the node nearest `x0` against the strategies read
/// off `value_ref`.
pub fn run_game(x0: &[f64], value_ref: &SolutionField, config: &GameConfig) -> Result<WalkStats> {
    let grid = &value_ref.grid;
    let dim = grid.dim();
    let weights = game_weights(config.p, dim)?;
    if !(config.eps >= 2.0 * grid.h() * (1.0 - 1e-12)) {
        return Err(Error::InvalidConfig(format!("eps = {} is below 2h = {}", config.eps, 2.0 * grid.h())));
    }
    if config.n_walks == 0 {
        return Err(Error::InvalidConfig("n_walks must be positive".into()));
    }
    let start = grid.nearest_node(x0);
    if !grid.is_interior(start) {
        return Err(Error::InvalidConfig(format!("start point {x0:?} is not interior")));
    }
    let stencil = BallStencil::new(grid, config.p, config.eps)?;
    let u = &value_ref.values;
    let n = grid.len();
    let mut best = vec![(0usize, 0usize); n];
    for &k in grid.interior_nodes() {
        let (imax, imin, _) = stencil.extremes(u, k);
        best[k] = (imax, imin);
    }
    let (lo, hi) = (grid.lower(), grid.upper());
    let diam = (0..dim).map(|d| (hi[d] - lo[d]).powi(2)).sum::<f64>().sqrt();
    let max_steps = config.max_steps.unwrap_or_else(|| (50.0 * (diam / config.eps).powi(2)).ceil() as usize);
    let offsets = &stencil.offsets;
    let payoff: Vec<f64> =
        (0..n).map(|k| if grid.is_interior(k) { 0.0 } else { config.payoff.eval(&grid.coords(k)[..dim]) }).collect();

    let walks: Vec<Walk> = (0..config.n_walks)
        .into_par_iter()
        .with_min_len(256)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(i as u64);
            let mut k = start;
            for step in 0..max_steps {
                if !grid.is_interior(k) {
                    return Walk { payoff: payoff[k], steps: step, truncated: false };
                }
                let t: f64 = rng.gen();
                k = if t < weights.beta0 {
                    (k as isize + offsets[rng.gen_range(0..offsets.len())]) as usize
                } else if rng.gen::<bool>() {
                    best[k].0
                } else {
                    best[k].1
                };
            }
            if !grid.is_interior(k) {
                return Walk { payoff: payoff[k], steps: max_steps, truncated: false };
            }
            Walk { payoff: u[k], steps: max_steps, truncated: true }
        })
        .collect();

    let count = walks.len() as f64;
    let pay: Vec<f64> = walks.iter().map(|w| w.payoff).collect();
    let mean = pairwise_sum(&pay) / count;
    let dev: Vec<f64> = pay.iter().map(|v| (v - mean) * (v - mean)).collect();
    let sd = if walks.len() > 1 { (pairwise_sum(&dev) / (count - 1.0)).sqrt() } else { 0.0 };
    let steps: Vec<f64> = walks.iter().map(|w| w.steps as f64).collect();
    let truncated = walks.iter().filter(|w| w.truncated).count();
    Ok(WalkStats {
        n_walks: walks.len(),
        mean,
        sd,
        ci_half_width: 1.96 * sd / count.sqrt(),
        mean_exit_time: pairwise_sum(&steps) / count,
        truncated,
        truncation_warning: truncated as f64 > 0.01 * count,
    })
}
