//! Extended factors f↑(τ;ξ), f↓(τ;ξ) of f + τ, the normalised κ↑, κ↓, κ•,
//! boundary values on τ < 0 and the integral identity.

use crate::curve::{classify_balance, zeta, Balance, CurveGrid, CurveSample};
use crate::error::{Error, Result};
use crate::quad::{integrate_halfline, QuadOptions, QuadResult};
use crate::rogers::{classify, default_probe_scales, difference_quotient, BoundHint, RogersFunction};
use crate::wh::{wh_product, wh_ratio, Side, WHValue, WhPath};
use crate::C64;
use serde::{Deserialize, Serialize};
use std::cell::RefCell;
use std::f64::consts::PI;

/// κ↑(τ;ξ), κ↓(τ;ξ) and κ•(τ) at one (τ, ξ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaValue {
    pub kappa_up: C64,
    pub kappa_down: C64,
    pub kappa_dot: C64,
    pub tau: C64,
    pub xi: C64,
    /// Relative error estimate.
    pub err: f64,
}

fn check_tau(tau: C64) -> Result<()> {
    if !(tau.re.is_finite() && tau.im.is_finite()) || (tau.im == 0.0 && tau.re <= 0.0) {
        return Err(Error::TauOnCut(format!("{tau}")));
    }
    Ok(())
}

fn check_xi(xi1: f64, xi2: f64) -> Result<()> {
    if !(xi1 > 0.0 && xi2 > 0.0 && xi1.is_finite() && xi2.is_finite()) {
        return Err(Error::DomainViolation(format!("need xi1, xi2 > 0, got {xi1}, {xi2}")));
    }
    Ok(())
}

pub(crate) fn require_balanced(f: &RogersFunction, grid: Option<&CurveGrid>) -> Result<()> {
    match grid {
        Some(g) if classify_balance(f, g, g.margin) == Balance::Balanced => Ok(()),
        _ => Err(Error::NotBalanced),
    }
}

const CURVE_WINDOW: (f64, f64) = (1e-150, 1e150);

/// ∫₀^∞ k(sample) dr along the curve of real values.
fn curve_integral<K>(f: &RogersFunction, splits: &[f64], k: K, opts: &QuadOptions) -> Result<QuadResult>
where
    K: Fn(&CurveSample) -> C64,
{
    curve_integral_in(f, CURVE_WINDOW, splits, k, opts)
}

pub(crate) fn curve_integral_in<K>(
    f: &RogersFunction,
    window: (f64, f64),
    splits: &[f64],
    k: K,
    opts: &QuadOptions,
) -> Result<QuadResult>
where
    K: Fn(&CurveSample) -> C64,
{
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let g = |r: f64| -> C64 {
        // the curve cannot be located in the far tails, whose contribution
        // is below double precision for every integrand used here
        if !(window.0..=window.1).contains(&r) {
            return C64::new(0.0, 0.0);
        }
        match zeta(f, r) {
            Ok(s) => k(&s),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                C64::new(0.0, 0.0)
            }
        }
    };
    let mut sp: Vec<f64> = splits.iter().copied().filter(|x| *x > 0.0 && x.is_finite()).collect();
    sp.sort_by(|a, b| a.total_cmp(b));
    sp.dedup();
    let q = integrate_halfline(&g, &sp, opts);
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(q),
    }
}

/// Radius where λ(r) = −Re τ, the near-pole of λ'/(λ+τ) for τ close to
/// the negative half-line.
fn pole_radius(f: &RogersFunction, grid: &CurveGrid, tau: C64) -> Option<f64> {
    let target = -tau.re;
    if !(target > 0.0) {
        return None;
    }
    let w = grid.samples.windows(2).find(|w| (w[0].lam - target) * (w[1].lam - target) <= 0.0)?;
    let (mut lo, mut hi) = (w[0].r, w[1].r);
    let up = w[1].lam > w[0].lam;
    for _ in 0..60 {
        let mid = (lo * hi).sqrt();
        let l = zeta(f, mid).ok()?.lam;
        if (l < target) == up {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some((lo * hi).sqrt())
}

fn arg_kernel(side: Side, z: C64, xi1: f64, xi2: f64) -> f64 {
    let i = C64::new(0.0, 1.0);
    match side {
        Side::Up => ((z - i * xi2) / (z - i * xi1)).arg(),
        Side::Down => ((z + i * xi1) / (z + i * xi2)).arg(),
    }
}

/// f↑(τ;ξ1)/f↑(τ;ξ2) (or Down) by the curve formula; any τ off the cut.
pub fn xwh_ratio_curve(
    f: &RogersFunction,
    side: Side,
    tau: C64,
    xi1: f64,
    xi2: f64,
    grid: &CurveGrid,
    opts: &QuadOptions,
) -> Result<WHValue> {
    check_tau(tau)?;
    check_xi(xi1, xi2)?;
    require_balanced(f, Some(grid))?;
    if xi1 == xi2 {
        return Ok(WHValue { value: C64::new(1.0, 0.0), err: 0.0, path: WhPath::Curve, converged: true });
    }
    let mut splits = vec![xi1, xi2, 1.0];
    splits.extend(pole_radius(f, grid, tau));
    let q = curve_integral(
        f,
        &splits,
        |s| {
            let a = arg_kernel(side, s.zeta, xi1, xi2);
            if a == 0.0 {
                C64::new(0.0, 0.0)
            } else {
                a * s.lam_prime / (PI * (s.lam + tau))
            }
        },
        opts,
    )?;
    let value = q.value.exp();
    Ok(WHValue { value, err: value.norm() * q.err_estimate, path: WhPath::Curve, converged: q.converged })
}

/// f↑(τ;ξ1)/f↑(τ;ξ2) or the Down analogue.
///
/// τ > 0 goes through the real-axis formula for f + τ, other τ through
/// the curve formula, which needs a balanced f and its grid.
pub fn xwh_ratio(
    f: &RogersFunction,
    side: Side,
    tau: C64,
    xi1: f64,
    xi2: f64,
    grid: Option<&CurveGrid>,
    opts: &QuadOptions,
) -> Result<WHValue> {
    check_tau(tau)?;
    check_xi(xi1, xi2)?;
    if tau.im == 0.0 {
        return wh_ratio(&f.shifted(tau), side, C64::new(xi1, 0.0), C64::new(xi2, 0.0), opts);
    }
    let g = grid.ok_or(Error::NotBalanced)?;
    xwh_ratio_curve(f, side, tau, xi1, xi2, g, opts)
}

/// f↑(τ;ξ1)·f↓(τ;ξ2) by the curve formula.
pub fn xwh_product_curve(
    f: &RogersFunction,
    tau: C64,
    xi1: f64,
    xi2: f64,
    grid: &CurveGrid,
    opts: &QuadOptions,
) -> Result<WHValue> {
    check_tau(tau)?;
    check_xi(xi1, xi2)?;
    require_balanced(f, Some(grid))?;
    let i = C64::new(0.0, 1.0);
    let mut splits = vec![xi1, xi2, 1.0];
    splits.extend(pole_radius(f, grid, tau));
    let q = curve_integral(
        f,
        &splits,
        |s| {
            let a = ((s.zeta + i * xi2) / (s.zeta - i * xi1)).arg();
            a * s.lam_prime / (PI * (s.lam + tau))
        },
        opts,
    )?;
    let value = tau * q.value.exp();
    Ok(WHValue { value, err: value.norm() * q.err_estimate, path: WhPath::Curve, converged: q.converged })
}

/// f↑(τ;ξ1)·f↓(τ;ξ2); path selection as in [`xwh_ratio`].
pub fn xwh_product(
    f: &RogersFunction,
    tau: C64,
    xi1: f64,
    xi2: f64,
    grid: Option<&CurveGrid>,
    opts: &QuadOptions,
) -> Result<WHValue> {
    check_tau(tau)?;
    check_xi(xi1, xi2)?;
    if tau.im == 0.0 {
        return wh_product(&f.shifted(tau), C64::new(xi1, 0.0), C64::new(xi2, 0.0), opts);
    }
    let g = grid.ok_or(Error::NotBalanced)?;
    xwh_product_curve(f, tau, xi1, xi2, g, opts)
}

/// f(∞⁻) for bounded f.
fn bound_value(f: &RogersFunction) -> Result<Option<f64>> {
    Ok(match f.bound_hint() {
        BoundHint::Bounded(a) => Some(a),
        BoundHint::Unbounded => None,
        BoundHint::Unknown => {
            let c = classify(f, &default_probe_scales())?;
            c.is_bounded.then_some(c.f_at_infinity)
        }
    })
}

/// κ•(τ): (τ + a)/(1 + a) for bounded f with a = f(∞⁻), otherwise 1.
pub fn kappa_dot(f: &RogersFunction, tau: f64) -> Result<C64> {
    if !(tau > 0.0) {
        return Err(Error::TauOnCut(format!("{tau}")));
    }
    let a = bound_value(f)?;
    Ok(C64::new(a.map_or(1.0, |a| (tau + a) / (1.0 + a)), 0.0))
}

/// f↑(1;1) = f↓(1;1), the common value of the normalised factors of f + 1.
fn unit_factor(f: &RogersFunction, opts: &QuadOptions) -> Result<WHValue> {
    let one = C64::new(1.0, 0.0);
    let p = wh_product(&f.shifted(one), one, one, opts)?;
    Ok(WHValue { value: p.value.sqrt(), err: 0.5 * p.err / p.value.norm().sqrt(), ..p })
}

/// log(√κ•(τ) κ(τ;1)/f↑(1;1)) from the single-integral formula at ξ = 1.
fn kappa_log_at_one(f: &RogersFunction, side: Side, tau: f64, opts: &QuadOptions) -> QuadResult {
    let i = C64::new(0.0, 1.0);
    let (t, one) = (C64::new(tau, 0.0), C64::new(1.0, 0.0));
    let g = |r: f64| -> C64 {
        let fr = f.at_real(r);
        let d = (fr + t).ln() - (fr + one).ln();
        let k = match side {
            Side::Up => d / (i - r),
            Side::Down => d / (i + r),
        };
        C64::new(-k.im / PI, 0.0)
    };
    integrate_halfline(&g, &[1.0], opts)
}

/// κ↑(τ;ξ), κ↓(τ;ξ) and κ•(τ) for τ > 0 and ξ off the cut (−∞, 0].
///
/// κ(τ;1) comes from the single-integral formula, other ξ from the
/// factor ratio of f + τ.
pub fn kappa(f: &RogersFunction, tau: f64, xi: C64, opts: &QuadOptions) -> Result<KappaValue> {
    check_tau(C64::new(tau, 0.0))?;
    let dot = kappa_dot(f, tau)?;
    let u = unit_factor(f, opts)?.require("kappa: f(1;1)")?;
    let one = C64::new(1.0, 0.0);
    let g = f.shifted(C64::new(tau, 0.0));
    let mut err = u.err / u.value.norm();
    let mut at = |side: Side| -> Result<C64> {
        let q = kappa_log_at_one(f, side, tau, opts).require("kappa: normalising integral")?;
        let base = u.value * q.value.exp() / dot.sqrt();
        err += q.err_estimate;
        if xi == one {
            return Ok(base);
        }
        let r = wh_ratio(&g, side, xi, one, opts)?.require("kappa: factor ratio")?;
        err += r.err / r.value.norm();
        Ok(base * r.value)
    };
    let kappa_up = at(Side::Up)?;
    let kappa_down = at(Side::Down)?;
    Ok(KappaValue { kappa_up, kappa_down, kappa_dot: dot, tau: C64::new(tau, 0.0), xi, err })
}

/// κ↑(τ;ξ) (or κ↓) through the curve of real values, for balanced
/// unbounded f and any τ off the cut.
pub fn kappa_curve(
    f: &RogersFunction,
    side: Side,
    tau: C64,
    xi: f64,
    grid: &CurveGrid,
    opts: &QuadOptions,
) -> Result<WHValue> {
    check_tau(tau)?;
    check_xi(xi, 1.0)?;
    require_balanced(f, Some(grid))?;
    if bound_value(f)?.is_some() {
        return Err(Error::OutOfRange("the curve formula for kappa needs an unbounded f".into()));
    }
    let i = C64::new(0.0, 1.0);
    let u = unit_factor(f, opts)?;
    let mut splits = vec![xi, 1.0];
    splits.extend(pole_radius(f, grid, tau));
    let one = C64::new(1.0, 0.0);
    let q = curve_integral(
        f,
        &splits,
        |s| {
            // log κ↑ carries −Arg(ζ−iξ), log κ↓ carries +Arg(ζ+iξ)
            let (a, b) = match side {
                Side::Up => (-(s.zeta - i * xi).arg(), -(s.zeta - i).arg()),
                Side::Down => ((s.zeta + i * xi).arg(), (s.zeta + i).arg()),
            };
            (s.lam_prime / PI) * (a / (s.lam + tau) - b / (s.lam + one))
        },
        opts,
    )?;
    // boundary term at r = 0 of the integration by parts, where ζ → 0
    let lam0 = classify(f, &default_probe_scales())?.f_at_zero.re;
    let value = u.value * q.value.exp() * ((lam0 + tau) / (lam0 + 1.0)).sqrt();
    Ok(WHValue {
        value,
        err: value.norm() * (q.err_estimate + u.err / u.value.norm()),
        path: WhPath::Curve,
        converged: q.converged && u.converged,
    })
}

pub(crate) fn on_curve(f: &RogersFunction, r: f64) -> Result<CurveSample> {
    let s = zeta(f, r)?;
    if s.on_axis || !(s.zeta.re > 0.0) {
        return Err(Error::NotOnCurve(r));
    }
    Ok(s)
}

/// Boundary value of f↑(τ;ξ1)/f↑(τ;ξ2) (or Down) as τ → −λ_f(r) from
/// the upper half-plane, from the factors of the difference quotient
/// f_[ζ] at ζ = ζ_f(r).
pub fn xwh_boundary(
    f: &RogersFunction,
    side: Side,
    r: f64,
    xi1: f64,
    xi2: f64,
    opts: &QuadOptions,
) -> Result<C64> {
    check_xi(xi1, xi2)?;
    let s = on_curve(f, r)?;
    if xi1 == xi2 {
        return Ok(C64::new(1.0, 0.0));
    }
    let g = difference_quotient(f, s.zeta)?;
    let i = C64::new(0.0, 1.0);
    let z = match side {
        Side::Up => s.zeta,
        Side::Down => s.zeta.conj(),
    };
    let q = wh_ratio(&g, side, C64::new(xi2, 0.0), C64::new(xi1, 0.0), opts)?.require("xwh_boundary")?;
    Ok(q.value * (xi1 + i * z) / (xi2 + i * z))
}

/// Boundary value of f↑(τ;ξ1)·f↓(τ;ξ2) as τ → −λ_f(r) from above.
pub fn xwh_boundary_product(f: &RogersFunction, r: f64, xi1: f64, xi2: f64, opts: &QuadOptions) -> Result<C64> {
    check_xi(xi1, xi2)?;
    let s = on_curve(f, r)?;
    let g = difference_quotient(f, s.zeta)?;
    let i = C64::new(0.0, 1.0);
    let q = wh_product(&g, C64::new(xi1, 0.0), C64::new(xi2, 0.0), opts)?.require("xwh_boundary_product")?;
    Ok((xi1 + i * s.zeta) * (xi2 + i * s.zeta.conj()) / q.value)
}

/// sup λ_f: the larger of the grid maximum and f(∞⁻).
fn lambda_sup(f: &RogersFunction, grid: &CurveGrid) -> Result<f64> {
    let c = classify(f, &default_probe_scales())?;
    if !c.is_bounded {
        return Err(Error::OutOfRange("boundary values beyond the curve need a bounded f".into()));
    }
    Ok(grid.samples.iter().map(|s| s.lam).fold(c.f_at_infinity, f64::max))
}

fn beyond_log(
    f: &RogersFunction,
    s: f64,
    xi1: f64,
    xi2: f64,
    kern: impl Fn(C64, C64) -> C64,
    grid: &CurveGrid,
    opts: &QuadOptions,
) -> Result<QuadResult> {
    check_xi(xi1, xi2)?;
    require_balanced(f, Some(grid))?;
    let sup = lambda_sup(f, grid)?;
    if !(s > sup) {
        return Err(Error::OutOfRange(format!("s = {s} must exceed sup lambda = {sup}")));
    }
    curve_integral(
        f,
        &[xi1, xi2, 1.0],
        |c| C64::new(-(kern(c.zeta, c.zeta_prime) * (s - c.lam).ln()).im / PI, 0.0),
        opts,
    )
}

/// f↑(−s;ξ1)/f↑(−s;ξ2) (or Down) for s beyond the range of λ_f, where
/// f + τ extends continuously to τ = −s.
pub fn xwh_boundary_beyond(
    f: &RogersFunction,
    side: Side,
    s: f64,
    xi1: f64,
    xi2: f64,
    grid: &CurveGrid,
    opts: &QuadOptions,
) -> Result<C64> {
    let i = C64::new(0.0, 1.0);
    let q = beyond_log(
        f,
        s,
        xi1,
        xi2,
        |z, zp| match side {
            Side::Up => zp / (i * xi1 - z) - zp / (i * xi2 - z),
            Side::Down => zp / (i * xi1 + z) - zp / (i * xi2 + z),
        },
        grid,
        opts,
    )?
    .require("xwh_boundary_beyond")?;
    Ok(q.value.exp())
}

/// f↑(−s;ξ1)·f↓(−s;ξ2) for s beyond the range of λ_f; negative, since
/// f − s < 0 on the real line.
pub fn xwh_boundary_beyond_product(
    f: &RogersFunction,
    s: f64,
    xi1: f64,
    xi2: f64,
    grid: &CurveGrid,
    opts: &QuadOptions,
) -> Result<C64> {
    let i = C64::new(0.0, 1.0);
    let q = beyond_log(f, s, xi1, xi2, |z, zp| zp / (i * xi1 - z) + zp / (i * xi2 + z), grid, opts)?
        .require("xwh_boundary_beyond_product")?;
    Ok(-q.value.exp())
}

/// ((ξ1+ξ2)/π)∫₀^∞ f_[ζ]↑(ξ1) f_[ζ]↓(ξ2) λ' Re ζ / ((ξ1+iζ)(ξ1−i conj ζ)(ξ2−iζ)(ξ2+i conj ζ)) dr,
/// with ζ = ζ_f(r). Equals 1 for balanced f.
pub fn xwh_integral_identity(
    f: &RogersFunction,
    xi1: f64,
    xi2: f64,
    grid: &CurveGrid,
    opts: &QuadOptions,
) -> Result<f64> {
    check_xi(xi1, xi2)?;
    require_balanced(f, Some(grid))?;
    let i = C64::new(0.0, 1.0);
    let inner = QuadOptions { rel_tol: opts.rel_tol.min(1e-11), ..opts.clone() };
    // the inner factor values carry noise near their own tolerance
    let outer = QuadOptions { rel_tol: opts.rel_tol.max(1e-8), ..opts.clone() };
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    // the quotient overflows in its own real-axis integrals beyond this
    // window; the integrand is O(r^α) at 0 and O(r^-2) at infinity
    let q = curve_integral_in(
        f,
        (1e-60, 1e60),
        &[xi1, xi2, 1.0],
        |s| {
            let z = s.zeta;
            let p = difference_quotient(f, z)
                .and_then(|g| wh_product(&g, C64::new(xi1, 0.0), C64::new(xi2, 0.0), &inner));
            match p {
                Ok(p) => {
                    let den = (xi1 + i * z) * (xi1 - i * z.conj()) * (xi2 - i * z) * (xi2 + i * z.conj());
                    p.value * s.lam_prime * z.re * (xi1 + xi2) / (PI * den)
                }
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    C64::new(0.0, 0.0)
                }
            }
        },
        &outer,
    )?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(q.require("xwh_integral_identity")?.value.re)
}
