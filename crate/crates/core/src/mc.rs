//! Monte Carlo oracle for the supremum (or infimum) of a strictly stable
//! process on [0, t].
//!
//! Paths are sampled on a uniform grid with exact increments and the grid
//! maximum is recorded at two resolutions, n and n/2 steps. The
//! discretisation bias of order n^{−1/α} is removed by Richardson
//! extrapolation path by path, so the standard errors cover the
//! extrapolated estimator.

use crate::catalog::StableParams;
use crate::error::{Error, Result};
use crate::wh::Side;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub side: Side,
    pub t: f64,
    pub n_paths: usize,
    /// Fine resolution; a power of two, at least 2.
    pub n_steps: usize,
    pub seed: u64,
    /// Points for E exp(−ξ X↑_t).
    pub xi: Vec<f64>,
    /// Points for P(X↑_t ≤ x).
    pub x: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub xi: f64,
    pub value: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McCdfEstimate {
    pub x: f64,
    pub value: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McSummary {
    pub n_paths: usize,
    pub n_steps: usize,
    pub estimates: Vec<McEstimate>,
    pub cdf: Vec<McCdfEstimate>,
}

/// Increments of X over one grid step.
#[derive(Debug, Clone, Copy)]
enum Increment {
    Normal { sd: f64 },
    Cauchy { scale: f64, drift: f64 },
    /// Chambers–Mallows–Stuck for S_α(σ, β, 0).
    Cms { alpha: f64, shift: f64, factor: f64, scale: f64 },
}

impl Increment {
    fn new(p: &StableParams, dt: f64) -> Result<Increment> {
        let alpha = p.alpha;
        if (alpha - 2.0).abs() < 1e-12 {
            // f = k²ξ², variance 2k² per unit time
            return Ok(Increment::Normal { sd: p.k * (2.0 * dt).sqrt() });
        }
        if (alpha - 1.0).abs() < 1e-12 {
            // f = (c − ib)ξ: Cauchy with scale c and drift b
            return Ok(Increment::Cauchy { scale: p.a.re * dt, drift: -p.a.im * dt });
        }
        let beta = p.beta.ok_or_else(|| Error::OutOfRange("skewness undefined".into()))?;
        let t = (alpha * FRAC_PI_2).tan();
        Ok(Increment::Cms {
            alpha,
            shift: (beta * t).atan() / alpha,
            factor: (1.0 + beta * beta * t * t).powf(1.0 / (2.0 * alpha)),
            scale: p.k * dt.powf(1.0 / alpha),
        })
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            Increment::Normal { sd } => {
                let z: f64 = StandardNormal.sample(rng);
                sd * z
            }
            Increment::Cauchy { scale, drift } => {
                let v = PI * (rng.gen::<f64>() - 0.5);
                scale * v.tan() + drift
            }
            Increment::Cms { alpha, shift, factor, scale } => {
                let v = PI * (rng.gen::<f64>() - 0.5);
                let w: f64 = Exp1.sample(rng);
                let a = alpha * (v + shift);
                let x = factor * a.sin() / v.cos().powf(1.0 / alpha) * ((v - a).cos() / w).powf((1.0 - alpha) / alpha);
                scale * x
            }
        }
    }
}

#[derive(Default, Clone, Copy)]
struct Moments {
    sum: f64,
    sq: f64,
}

impl Moments {
    fn push(&mut self, y: f64) {
        self.sum += y;
        self.sq += y * y;
    }

    fn finish(&self, n: usize) -> (f64, f64) {
        let n = n as f64;
        let mean = self.sum / n;
        let var = ((self.sq / n - mean * mean) * n / (n - 1.0)).max(0.0);
        (mean, (var / n).sqrt())
    }
}

/// Simulates sup (Up) or −inf (Down) of X on [0, t].
pub fn mc_sup(p: &StableParams, cfg: &McConfig) -> Result<McSummary> {
    let n = cfg.n_steps;
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::DomainViolation(format!("n_steps = {n} must be a power of two >= 2")));
    }
    if cfg.n_paths < 2 || !(cfg.t > 0.0) {
        return Err(Error::DomainViolation("need at least 2 paths and t > 0".into()));
    }
    let p = match cfg.side {
        Side::Up => *p,
        Side::Down => p.dual(),
    };
    let inc = Increment::new(&p, cfg.t / n as f64)?;
    let c = 2f64.powf(1.0 / p.alpha);
    let rich = |fine: f64, coarse: f64| (c * fine - coarse) / (c - 1.0);
    let mut lap = vec![Moments::default(); cfg.xi.len()];
    let mut cdf = vec![Moments::default(); cfg.x.len()];
    for path in 0..cfg.n_paths {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(path as u64);
        let (mut x, mut fine, mut coarse) = (0.0f64, 0.0f64, 0.0f64);
        for k in 1..=n {
            x += inc.sample(&mut rng);
            fine = fine.max(x);
            if k % 2 == 0 {
                coarse = coarse.max(x);
            }
        }
        for (m, &xi) in lap.iter_mut().zip(&cfg.xi) {
            m.push(rich((-xi * fine).exp(), (-xi * coarse).exp()));
        }
        for (m, &y) in cdf.iter_mut().zip(&cfg.x) {
            let ind = |s: f64| if s <= y { 1.0 } else { 0.0 };
            m.push(rich(ind(fine), ind(coarse)));
        }
    }
    let estimates = lap
        .iter()
        .zip(&cfg.xi)
        .map(|(m, &xi)| {
            let (value, stderr) = m.finish(cfg.n_paths);
            McEstimate { xi, value, stderr }
        })
        .collect();
    let cdf = cdf
        .iter()
        .zip(&cfg.x)
        .map(|(m, &x)| {
            let (value, stderr) = m.finish(cfg.n_paths);
            McCdfEstimate { x, value, stderr }
        })
        .collect();
    Ok(McSummary { n_paths: cfg.n_paths, n_steps: n, estimates, cdf })
}

/// Samples X_t directly, for checking the increment law.
pub fn sample_marginal(p: &StableParams, t: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    let inc = Increment::new(p, t)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n).map(|_| inc.sample(&mut rng)).collect())
}
