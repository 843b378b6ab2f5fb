//! The curve of real values ζ_f(r), λ_f(r) and the balance classification.

use crate::error::{Error, Result};
use crate::rogers::{transform, RogersFunction, Transform};
use crate::C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

/// One point of the curve of real values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub r: f64,
    pub zeta: C64,
    pub lam: f64,
    pub zeta_prime: C64,
    pub lam_prime: f64,
    pub arg_zeta: f64,
    /// ζ = ±ir extension
    pub on_axis: bool,
}

impl CurveSample {
    pub fn new(r: f64, zeta: C64, lam: f64, zeta_prime: C64, lam_prime: f64, on_axis: bool) -> Self {
        CurveSample { r, zeta, lam, zeta_prime, lam_prime, arg_zeta: zeta.arg(), on_axis }
    }
}

/// π/36
pub const DEFAULT_MARGIN: f64 = PI / 36.0;
const THETA_DELTA: f64 = 1e-9;
const BISECTIONS: usize = 64;
const DIFF_STEP: f64 = 1e-5;

/// Locates ζ_f(r) without derivatives.
fn locate(f: &RogersFunction, r: f64) -> Result<(C64, bool)> {
    let g = |th: f64| -> Result<f64> {
        let v = f.at(C64::from_polar(r, th)).im;
        if v.is_nan() {
            Err(Error::RootNotBracketed(r))
        } else {
            Ok(v)
        }
    };
    let (mut lo, mut hi) = (-FRAC_PI_2 + THETA_DELTA, FRAC_PI_2 - THETA_DELTA);
    let (glo, ghi) = (g(lo)?, g(hi)?);
    if glo >= 0.0 && ghi > 0.0 {
        if glo == 0.0 {
            return Ok((C64::from_polar(r, lo), false));
        }
        return Ok((C64::new(0.0, -r), true));
    }
    if glo < 0.0 && ghi < 0.0 {
        return Ok((C64::new(0.0, r), true));
    }
    if ghi == 0.0 {
        return Ok((C64::from_polar(r, hi), false));
    }
    for _ in 0..BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((C64::from_polar(r, 0.5 * (lo + hi)), false))
}

/// ζ_f(r) with λ_f(r) and their r-derivatives.
///
/// Catalog curves are used when attached; otherwise bisection in the angle
/// with central differences in r.
pub fn zeta(f: &RogersFunction, r: f64) -> Result<CurveSample> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::OutOfRange(format!("radius {r} must be positive and finite")));
    }
    if let Some(c) = &f.closed_forms().curve {
        return Ok(c(r));
    }
    zeta_numeric(f, r)
}

/// As [`zeta`] but never uses closed forms.
pub fn zeta_numeric(f: &RogersFunction, r: f64) -> Result<CurveSample> {
    let (z, on_axis) = locate(f, r)?;
    let lam = f.at(z).re;
    let h = DIFF_STEP * r;
    let (zp, zm) = (locate(f, r + h)?, locate(f, r - h)?);
    let zeta_prime = if zp.1 == zm.1 { (zp.0 - zm.0) / (2.0 * h) } else { one_sided(f, r, z, on_axis, h)? };
    let lam_prime = if zp.1 == zm.1 {
        (f.at(zp.0).re - f.at(zm.0).re) / (2.0 * h)
    } else {
        let (z1, _) = locate(f, if on_axis == zp.1 { r + h } else { r - h })?;
        let s = if on_axis == zp.1 { 1.0 } else { -1.0 };
        s * (f.at(z1).re - lam) / h
    };
    Ok(CurveSample::new(r, z, lam, zeta_prime, lam_prime, on_axis))
}

fn one_sided(f: &RogersFunction, r: f64, z: C64, on_axis: bool, h: f64) -> Result<C64> {
    // Near a junction with the imaginary axis use the side that shares the flag.
    let (zp, ap) = locate(f, r + h)?;
    if ap == on_axis {
        Ok((zp - z) / h)
    } else {
        let (zm, _) = locate(f, r - h)?;
        Ok((z - zm) / h)
    }
}

/// Log-spaced samples of the curve of real values.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveGrid {
    pub samples: Vec<CurveSample>,
    pub r_min: f64,
    pub r_max: f64,
    pub balanced_sup_arg: f64,
    /// Maximal radial runs off the imaginary axis; a run touching the
    /// grid end is reported as extending to 0 or ∞.
    pub gamma_interval: Vec<(f64, f64)>,
    pub margin: f64,
}

pub fn curve_grid(f: &RogersFunction, r_min: f64, r_max: f64, n: usize) -> Result<CurveGrid> {
    if !(r_min > 0.0 && r_max > r_min && r_max.is_finite()) {
        return Err(Error::OutOfRange(format!("need 0 < r_min < r_max, got {r_min}, {r_max}")));
    }
    if n < 16 {
        return Err(Error::OutOfRange(format!("curve grid needs n >= 16, got {n}")));
    }
    let (l0, l1) = (r_min.ln(), r_max.ln());
    let samples = (0..n)
        .map(|k| zeta(f, (l0 + (l1 - l0) * k as f64 / (n - 1) as f64).exp()))
        .collect::<Result<Vec<_>>>()?;
    let balanced_sup_arg = samples.iter().map(|s| s.arg_zeta.abs()).fold(0.0, f64::max);
    let mut gamma_interval = Vec::new();
    let mut start: Option<f64> = None;
    for (k, s) in samples.iter().enumerate() {
        match (s.on_axis, start) {
            (false, None) => {
                start = Some(if k == 0 { 0.0 } else { junction(f, samples[k - 1].r, s.r)? });
            }
            (true, Some(a)) => {
                gamma_interval.push((a, junction(f, samples[k - 1].r, s.r)?));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(a) = start {
        gamma_interval.push((a, f64::INFINITY));
    }
    Ok(CurveGrid { samples, r_min, r_max, balanced_sup_arg, gamma_interval, margin: DEFAULT_MARGIN })
}

/// Radius where the on_axis flag flips between r0 and r1.
fn junction(f: &RogersFunction, r0: f64, r1: f64) -> Result<f64> {
    let flag0 = zeta(f, r0)?.on_axis;
    let (mut lo, mut hi) = (r0, r1);
    for _ in 0..60 {
        let mid = (lo * hi).sqrt();
        if zeta(f, mid)?.on_axis == flag0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Balance {
    Balanced,
    NearlyBalanced,
    Neither,
    Inconclusive,
}

impl CurveGrid {
    pub fn decades(&self) -> f64 {
        (self.r_max / self.r_min).log10()
    }

    fn simply_balanced(&self, margin: f64) -> bool {
        self.samples.iter().all(|s| !s.on_axis) && self.balanced_sup_arg <= FRAC_PI_2 - margin
    }
}

/// Classifies f from its grid. Nearly balanced needs f itself so that the
/// Möbius-transformed function can be sampled.
pub fn classify_balance(f: &RogersFunction, grid: &CurveGrid, margin: f64) -> Balance {
    if grid.decades() < 4.0 - 1e-9 {
        return Balance::Inconclusive;
    }
    if grid.simply_balanced(margin) {
        return Balance::Balanced;
    }
    if grid.gamma_interval.len() != 1 {
        return Balance::Neither;
    }
    let (r0, rinf) = grid.gamma_interval[0];
    if r0 == 0.0 {
        // no leading axis run, so the sup-arg test above would have
        // to be satisfied
        return Balance::Neither;
    }
    let side = |r: f64, at: f64| -> Option<C64> {
        let s = zeta(f, r).ok()?;
        if s.on_axis {
            Some(C64::new(0.0, at * s.zeta.im.signum()))
        } else {
            None
        }
    };
    let z0 = match side(r0 * 0.999, r0) {
        Some(z) => z,
        None => return Balance::Inconclusive,
    };
    let zinf = if rinf.is_finite() {
        match side(rinf * 1.001, rinf) {
            Some(z) => Some(z),
            None => return Balance::Inconclusive,
        }
    } else {
        None
    };
    let g = match transform(f, Transform::Mobius(z0, zinf)) {
        Ok(g) => g,
        Err(_) => return Balance::Inconclusive,
    };
    match curve_grid(&g, grid.r_min, grid.r_max, grid.samples.len()) {
        Ok(gg) if gg.simply_balanced(margin) => Balance::NearlyBalanced,
        Ok(_) => Balance::Neither,
        Err(_) => Balance::Inconclusive,
    }
}

/// One row per sample: r, Re ζ, Im ζ, λ, λ', Re ζ', Im ζ', on_axis.
pub fn grid_rows(grid: &CurveGrid) -> Vec<[f64; 8]> {
    grid.samples
        .iter()
        .map(|s| {
            [
                s.r,
                s.zeta.re,
                s.zeta.im,
                s.lam,
                s.lam_prime,
                s.zeta_prime.re,
                s.zeta_prime.im,
                if s.on_axis { 1.0 } else { 0.0 },
            ]
        })
        .collect()
}
