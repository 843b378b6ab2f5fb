//! Stationary Wiener–Hopf factors f↑, f↓, normalised by f↑(1) = f↓(1).

use crate::curve::{classify_balance, zeta, Balance, CurveGrid};
use crate::error::{Error, Result};
use crate::quad::{integrate_halfline, QuadOptions, QuadResult};
use crate::rogers::RogersFunction;
use crate::C64;
use serde::{Deserialize, Serialize};
use std::cell::RefCell;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Up,
    Down,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Up => Side::Down,
            Side::Down => Side::Up,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WhPath {
    RealAxis,
    Curve,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WHValue {
    pub value: C64,
    pub err: f64,
    pub path: WhPath,
    pub converged: bool,
}

impl WHValue {
    fn from_log(q: QuadResult, path: WhPath) -> WHValue {
        let value = q.value.exp();
        WHValue { value, err: value.norm() * q.err_estimate, path, converged: q.converged }
    }

    pub fn require(self, ctx: &str) -> Result<WHValue> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NonConvergent { context: ctx.to_string(), err: self.err })
        }
    }
}

/// Log of the function on the positive half-line, (0, ∞) → ℂ.
pub(crate) type AxisLog<'a> = dyn Fn(f64) -> C64 + 'a;

fn check_point(xi: C64) -> Result<()> {
    if !(xi.re.is_finite() && xi.im.is_finite()) || (xi.im == 0.0 && xi.re <= 0.0) {
        return Err(Error::DomainViolation(format!("xi = {xi} lies on the cut (-inf, 0]")));
    }
    Ok(())
}

/// log F↑(ξ) − log F↑(1) from the boundary values L(r) = log F(r), r > 0.
///
/// The line integral is folded onto (0, ∞) with L(−r) = conj L(r). Near
/// the imaginary axis the value of L at the nearly singular point is
/// subtracted; the kernel integrates a constant to zero on ℝ so this
/// leaves the result unchanged.
pub(crate) fn log_rel_up(l: &AxisLog, xi: C64, opts: &QuadOptions) -> QuadResult {
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let s = -xi.im;
    let c = if xi.re < s.abs() {
        if s > 0.0 {
            l(s)
        } else {
            l(-s).conj()
        }
    } else {
        C64::new(0.0, 0.0)
    };
    let kern = move |r: f64| -> C64 {
        let d = xi + i * r;
        if d.norm() < 1e-300 {
            return C64::new(0.0, 0.0);
        }
        one / d - one / (one + i * r)
    };
    let g = |r: f64| -> C64 {
        let lr = l(r);
        let a = lr - c;
        let b = lr.conj() - c;
        let mut v = C64::new(0.0, 0.0);
        if a.norm() != 0.0 {
            v += kern(r) * a;
        }
        if b.norm() != 0.0 {
            v += kern(-r) * b;
        }
        v / (2.0 * PI)
    };
    let mut splits = vec![1.0, xi.norm()];
    if s != 0.0 {
        splits.push(s.abs());
    }
    integrate_halfline(&g, &splits, opts)
}

/// ½ log(F↑(1)F↓(1)) = (1/π)∫₀^∞ Re L(r)/(1+r²) dr.
pub(crate) fn half_log_c(l: &AxisLog, opts: &QuadOptions) -> QuadResult {
    let g = |r: f64| C64::new(l(r).re / (PI * (1.0 + r * r)), 0.0);
    integrate_halfline(&g, &[1.0], opts)
}

pub(crate) fn log_rel(l: &AxisLog, side: Side, xi: C64, opts: &QuadOptions) -> QuadResult {
    match side {
        Side::Up => log_rel_up(l, xi, opts),
        Side::Down => {
            let d = |r: f64| l(r).conj();
            log_rel_up(&d, xi, opts)
        }
    }
}

fn axis_log(f: &RogersFunction) -> Result<impl Fn(f64) -> C64 + '_> {
    if [1e-3, 1.0, 1e3].iter().all(|&r| f.at_real(r).norm() == 0.0) {
        return Err(Error::ZeroFunction);
    }
    Ok(move |r: f64| f.at_real(r).ln())
}

/// log of the normalised factor; in the left half-plane through
/// f↑(w) = f(iw)/f↓(−w) and f↓(w) = f(−iw)/f↑(−w).
fn log_factor(f: &RogersFunction, l: &AxisLog, side: Side, xi: C64, h: QuadResult, opts: &QuadOptions) -> QuadResult {
    if xi.re >= 0.0 {
        return h.combine(log_rel(l, side, xi, opts));
    }
    let i = C64::new(0.0, 1.0);
    let fv = match side {
        Side::Up => f.at(i * xi),
        Side::Down => f.at(-i * xi),
    };
    let other = h.combine(log_rel(l, side.flip(), -xi, opts));
    QuadResult { value: fv.ln() - other.value, ..other }
}

fn neg(q: QuadResult) -> QuadResult {
    QuadResult { value: -q.value, ..q }
}

/// f↑(ξ1)/f↑(ξ2), or the Down analogue, by the real-axis formula.
///
/// Points may lie anywhere off the cut (−∞, 0]; the left half-plane is
/// reached through the factorisation identity.
pub fn wh_ratio(f: &RogersFunction, side: Side, xi1: C64, xi2: C64, opts: &QuadOptions) -> Result<WHValue> {
    check_point(xi1)?;
    check_point(xi2)?;
    let l = axis_log(f)?;
    if xi1 == xi2 {
        return Ok(WHValue { value: C64::new(1.0, 0.0), err: 0.0, path: WhPath::RealAxis, converged: true });
    }
    let h = half_log_c(&l, opts);
    let q = log_factor(f, &l, side, xi1, h, opts).combine(neg(log_factor(f, &l, side, xi2, h, opts)));
    Ok(WHValue::from_log(q, WhPath::RealAxis))
}

/// f↑(ξ1)·f↓(ξ2).
pub fn wh_product(f: &RogersFunction, xi1: C64, xi2: C64, opts: &QuadOptions) -> Result<WHValue> {
    check_point(xi1)?;
    check_point(xi2)?;
    let l = axis_log(f)?;
    let h = half_log_c(&l, opts);
    let q = log_factor(f, &l, Side::Up, xi1, h, opts).combine(log_factor(f, &l, Side::Down, xi2, h, opts));
    Ok(WHValue::from_log(q, WhPath::RealAxis))
}

/// The normalised factor f↑(ξ) or f↓(ξ).
pub fn wh_factor(f: &RogersFunction, side: Side, xi: C64, opts: &QuadOptions) -> Result<WHValue> {
    check_point(xi)?;
    let l = axis_log(f)?;
    let h = half_log_c(&l, opts);
    Ok(WHValue::from_log(log_factor(f, &l, side, xi, h, opts), WhPath::RealAxis))
}

/// Exponent of the curve formulas for f + τ:
/// Up (1/π)∫ Arg((ζ−iξ2)/(ζ−iξ1)) λ'/(λ+τ) dr, Down with (ζ+iξ1)/(ζ+iξ2).
pub(crate) fn curve_log_ratio(
    f: &RogersFunction,
    side: Side,
    xi1: f64,
    xi2: f64,
    tau: C64,
    opts: &QuadOptions,
) -> Result<QuadResult> {
    let i = C64::new(0.0, 1.0);
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let g = |r: f64| -> C64 {
        let s = match zeta(f, r) {
            Ok(s) => s,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                return C64::new(0.0, 0.0);
            }
        };
        let z = s.zeta;
        let arg = match side {
            Side::Up => ((z - i * xi2) / (z - i * xi1)).arg(),
            Side::Down => ((z + i * xi1) / (z + i * xi2)).arg(),
        };
        if arg == 0.0 {
            return C64::new(0.0, 0.0);
        }
        arg * s.lam_prime / (PI * (s.lam + tau))
    };
    let q = integrate_halfline(&g, &[xi1.min(xi2), 1.0, xi1.max(xi2)], opts);
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(q),
    }
}

fn log_form(f: &RogersFunction, side: Side, xi1: f64, xi2: f64, opts: &QuadOptions) -> Result<QuadResult> {
    let i = C64::new(0.0, 1.0);
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let g = |r: f64| -> C64 {
        let s = match zeta(f, r) {
            Ok(s) => s,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                return C64::new(0.0, 0.0);
            }
        };
        let (z, zp) = (s.zeta, s.zeta_prime);
        let k = match side {
            Side::Up => zp / (i * xi1 - z) - zp / (i * xi2 - z),
            Side::Down => zp / (i * xi1 + z) - zp / (i * xi2 + z),
        };
        C64::new(-(k * s.lam.ln()).im / PI, 0.0)
    };
    let q = integrate_halfline(&g, &[xi1.min(xi2), 1.0, xi1.max(xi2)], opts);
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(q),
    }
}

/// f↑(ξ1)/f↑(ξ2) along the curve of real values; the integrated-by-parts
/// Arg form is returned and its distance to the log λ form goes into `err`.
pub fn wh_ratio_curve(
    f: &RogersFunction,
    side: Side,
    xi1: f64,
    xi2: f64,
    grid: &CurveGrid,
    opts: &QuadOptions,
) -> Result<WHValue> {
    if !(xi1 > 0.0 && xi2 > 0.0) {
        return Err(Error::DomainViolation(format!("curve path needs xi1, xi2 > 0, got {xi1}, {xi2}")));
    }
    if classify_balance(f, grid, grid.margin) != Balance::Balanced {
        return Err(Error::NotBalanced);
    }
    if xi1 == xi2 {
        return Ok(WHValue { value: C64::new(1.0, 0.0), err: 0.0, path: WhPath::Curve, converged: true });
    }
    let a = curve_log_ratio(f, side, xi1, xi2, C64::new(0.0, 0.0), opts)?;
    let b = log_form(f, side, xi1, xi2, opts)?;
    let value = a.value.exp();
    let err = value.norm() * (a.err_estimate + (a.value - b.value).norm());
    Ok(WHValue { value, err, path: WhPath::Curve, converged: a.converged && b.converged })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitPoint {
    Zero,
    Infinity,
}

/// lim f↑(ξ)/f̃↑(ξ) (or Down) as ξ → 0⁺ or ∞.
///
/// Evaluated as (f↑(1)/f̃↑(1))·exp(−(1/π)∫ log|f/f̃|/(1+r²) dr)·a^{1/2}·exp(±(1/π)∫ w Arg(f/f̃) dr)
/// with a = lim f/f̃ and w = 1/(r(1+r²)) at zero, r/(1+r²) at infinity.
/// The sign is + for Up at zero and for Down at infinity.
pub fn wh_limit_ratio(
    f: &RogersFunction,
    f_tilde: &RogersFunction,
    side: Side,
    at: LimitPoint,
    opts: &QuadOptions,
) -> Result<f64> {
    let lf = axis_log(f)?;
    let lt = axis_log(f_tilde)?;
    let norm = (half_log_c(&lf, opts).value - half_log_c(&lt, opts).value).re;
    let lr = |r: f64| lf(r) - lt(r);
    let log_mod = integrate_halfline(&|r: f64| C64::new(lr(r).re / (PI * (1.0 + r * r)), 0.0), &[1.0], opts)
        .require("wh_limit_ratio: modulus integral")?;
    let w = |r: f64| match at {
        LimitPoint::Zero => 1.0 / (r * (1.0 + r * r)),
        LimitPoint::Infinity => r / (1.0 + r * r),
    };
    let phase = integrate_halfline(
        &|r: f64| {
            let t = lr(r).im;
            if t == 0.0 {
                C64::new(0.0, 0.0)
            } else {
                C64::new(w(r) * t / PI, 0.0)
            }
        },
        &[1.0],
        opts,
    )
    .require("wh_limit_ratio: phase integral")?;
    // far probes; limits such as r^δ need them
    let probes: &[f64] = match at {
        LimitPoint::Zero => &[1e-40, 1e-20, 1e-10],
        LimitPoint::Infinity => &[1e40, 1e20, 1e10],
    };
    let a = probes
        .iter()
        .map(|&p| (lf(p) - lt(p)).re)
        .find(|v| v.is_finite())
        .ok_or_else(|| Error::Inconclusive("lim f/f_tilde could not be evaluated".into()))?;
    // the phase term enters with opposite signs at the two ends
    let sign = match (side, at) {
        (Side::Up, LimitPoint::Zero) | (Side::Down, LimitPoint::Infinity) => 1.0,
        _ => -1.0,
    };
    Ok((norm - log_mod.value.re + 0.5 * a + sign * phase.value.re).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{brownian_drift, risk_process, stable, stable_convert, StableInput};
    use crate::curve::curve_grid;
    use crate::rogers::{cbf_grid, check_cbf, transform, Transform};
    use proptest::prelude::*;

    fn c(x: f64, y: f64) -> C64 {
        C64::new(x, y)
    }

    fn o() -> QuadOptions {
        QuadOptions::default()
    }

    fn plain(f: &RogersFunction) -> RogersFunction {
        let g = f.clone();
        RogersFunction::new("plain", move |z| g.at(z))
    }

    fn st(alpha: f64, rho: f64) -> RogersFunction {
        stable(&stable_convert(StableInput::Rho { alpha, rho, k: 1.0 }).unwrap())
    }

    #[test]
    fn ratio_examples() {
        let r = wh_ratio(&brownian_drift(0.0), Side::Up, c(4.0, 0.0), c(1.0, 0.0), &o()).unwrap();
        assert!((r.value - 4.0).norm() < 1e-9, "{:?}", r);
        let r = wh_ratio(&st(1.5, 0.6), Side::Up, c(4.0, 0.0), c(1.0, 0.0), &o()).unwrap();
        assert!((r.value - 4f64.powf(0.9)).norm() < 1e-9 * 3.5);
        let r = wh_ratio(&st(1.5, 0.6), Side::Down, c(3.0, 0.0), c(3.0, 0.0), &o()).unwrap();
        assert_eq!(r.value, c(1.0, 0.0));
    }

    #[test]
    fn factor_examples() {
        let f = brownian_drift(1.0);
        let u = wh_factor(&f, Side::Up, c(3.0, 0.0), &o()).unwrap();
        assert!((u.value - 1.5f64.sqrt() * 3.0).norm() < 1e-9);
        // f↓(ξ) = (ξ + 2b)/√(2(1+2b)); the shift is 2b for ½ξ² − ibξ
        let d = wh_factor(&f, Side::Down, c(3.0, 0.0), &o()).unwrap();
        assert!((d.value - 5.0 / 6f64.sqrt()).norm() < 1e-9, "{:?}", d);
        let p = wh_product(&f, c(1.0, 0.0), c(1.0, 0.0), &o()).unwrap();
        assert!((p.value - 1.5).norm() < 1e-9);
        let cauchy = stable(&stable_convert(StableInput::CauchyDrift { c: 1.0, b: 0.0 }).unwrap());
        let u = wh_factor(&cauchy, Side::Up, c(2.0, 0.0), &o()).unwrap();
        assert!((u.value - 2f64.sqrt()).norm() < 1e-9);
        let sq = RogersFunction::new("sq", |z: C64| z * z);
        let p = wh_product(&sq, c(2.0, 1.0), c(0.5, -3.0), &o()).unwrap();
        assert!((p.value - c(2.0, 1.0) * c(0.5, -3.0)).norm() < 1e-9);
        let zero = RogersFunction::new("0", |_| c(0.0, 0.0));
        assert_eq!(wh_factor(&zero, Side::Up, c(1.0, 0.0), &o()).unwrap_err(), Error::ZeroFunction);
    }

    #[test]
    fn factorisation_identity_on_axis() {
        let fs = vec![
            brownian_drift(0.5),
            risk_process(4.0, 1.0).unwrap(),
            st(0.7, 0.4),
            st(1.5, 0.6),
        ];
        for f in &fs {
            for k in 0..20 {
                let x = if k < 10 { -(10f64.powf(-2.0 + 0.4 * k as f64)) } else { 10f64.powf(-2.0 + 0.4 * (k - 10) as f64) };
                // on the axis itself; the boundary values are continuous
                let eps = 0.0;
                let u = wh_factor(f, Side::Up, c(eps, -x), &o()).unwrap();
                let d = wh_factor(f, Side::Down, c(eps, x), &o()).unwrap();
                let want = f.at_real(x);
                assert!((u.value * d.value - want).norm() <= 1e-7 * want.norm(), "{} x={x}: {} vs {want}", f.label(), u.value * d.value);
            }
        }
    }

    #[test]
    fn closed_forms_agree() {
        let fs = vec![brownian_drift(-1.0), risk_process(4.0, 1.0).unwrap(), risk_process(2.0, 0.0).unwrap(), st(0.7, 0.4)];
        for f in &fs {
            let cf = f.closed_forms();
            for &x in &[0.25, 1.0, 4.0] {
                for (side, cl) in [(Side::Up, cf.wh_up.clone().unwrap()), (Side::Down, cf.wh_down.clone().unwrap())] {
                    let v = wh_factor(f, side, c(x, 0.0), &o()).unwrap().value;
                    let w = cl(c(x, 0.0));
                    assert!((v - w).norm() <= 1e-8 * w.norm(), "{} {side:?} {x}: {v} vs {w}", f.label());
                }
            }
        }
    }

    #[test]
    fn factors_are_cbf() {
        for f in [st(1.5, 0.6), brownian_drift(1.0), risk_process(4.0, 1.0).unwrap()] {
            let opts = QuadOptions::default().with_rel_tol(1e-9);
            let g = |z: C64| wh_factor(&f, Side::Up, z, &opts).unwrap().value;
            let rep = check_cbf(&g, &cbf_grid(1e-2, 1e2, 9), 1e-8);
            assert!(rep.passed, "{} {rep:?}", f.label());
        }
    }

    #[test]
    fn scaling_and_inversion() {
        let f = risk_process(4.0, 1.0).unwrap();
        let f3 = f.scaled(3.0);
        let (x1, x2) = (c(0.3, 0.0), c(2.0, 0.5));
        let r = wh_ratio(&f, Side::Up, x1, x2, &o()).unwrap().value;
        let r3 = wh_ratio(&f3, Side::Up, x1, x2, &o()).unwrap().value;
        assert!((r - r3).norm() < 1e-9 * r.norm());
        let p = wh_product(&f, x1, x2, &o()).unwrap().value;
        let p3 = wh_product(&f3, x1, x2, &o()).unwrap().value;
        assert!((p * 3.0 - p3).norm() < 1e-9 * p3.norm());
        // factors of ξ²/f(ξ) are ξ/f↑, ξ/f↓ up to a constant
        let g = transform(&f, Transform::InvReflect).unwrap();
        for side in [Side::Up, Side::Down] {
            let a = wh_ratio(&g, side, c(3.0, 0.0), c(0.5, 0.0), &o()).unwrap().value;
            let b = wh_ratio(&f, side, c(3.0, 0.0), c(0.5, 0.0), &o()).unwrap().value;
            assert!((a - 6.0 / b).norm() < 1e-8 * a.norm());
        }
    }

    #[test]
    fn curve_path() {
        let f = st(1.5, 0.6);
        let g = curve_grid(&f, 1e-3, 1e3, 32).unwrap();
        let v = wh_ratio_curve(&f, Side::Up, 4.0, 1.0, &g, &o()).unwrap();
        assert!((v.value - 4f64.powf(0.9)).norm() < 1e-8 * 3.5, "{v:?}");
        assert!(v.err < 1e-7);
        let d = wh_ratio_curve(&f, Side::Down, 4.0, 1.0, &g, &o()).unwrap();
        assert!((d.value - 4f64.powf(0.6)).norm() < 1e-8 * 3.0, "{d:?}");
        let cauchy = plain(&st(1.0, 0.5));
        let g = curve_grid(&cauchy, 1e-3, 1e3, 32).unwrap();
        let v = wh_ratio_curve(&cauchy, Side::Up, 0.3, 2.0, &g, &o()).unwrap();
        assert!((v.value - (0.15f64).sqrt()).norm() < 1e-7, "{v:?}");
        let bm = brownian_drift(1.0);
        let g = curve_grid(&bm, 1e-3, 1e3, 32).unwrap();
        assert_eq!(wh_ratio_curve(&bm, Side::Up, 2.0, 1.0, &g, &o()).unwrap_err(), Error::NotBalanced);
    }

    #[test]
    fn limit_ratios() {
        let sq = RogersFunction::new("sq", |z: C64| z * z);
        let sq2 = sq.scaled(2.0);
        let v = wh_limit_ratio(&sq2, &sq, Side::Up, LimitPoint::Infinity, &o()).unwrap();
        let far = wh_factor(&sq2, Side::Up, c(1e4, 0.0), &o()).unwrap().value / wh_factor(&sq, Side::Up, c(1e4, 0.0), &o()).unwrap().value;
        assert!((v - far.re).abs() < 1e-8, "{v} {far}");
        assert!((v - 2f64.sqrt()).abs() < 1e-9);
        let bm = brownian_drift(0.0);
        let bt = bm.shifted(c(2.0, 0.0));
        let v = wh_limit_ratio(&bt, &bm, Side::Up, LimitPoint::Infinity, &o()).unwrap();
        assert!((v - 1.0).abs() < 1e-8, "{v}");
        let f = st(1.5, 0.6);
        let g = RogersFunction::sum(&[(1.0, f.clone()), (1.0, st(0.5, 0.5))]).unwrap();
        for side in [Side::Up, Side::Down] {
            let v = wh_limit_ratio(&g, &f, side, LimitPoint::Infinity, &o()).unwrap();
            let far = wh_factor(&g, side, c(1e7, 0.0), &o()).unwrap().value / wh_factor(&f, side, c(1e7, 0.0), &o()).unwrap().value;
            assert!((v - far.re).abs() < 1e-3, "{side:?}: {v} {far}");
        }
        let f0 = st(0.5, 0.5);
        let g0 = RogersFunction::sum(&[(1.0, st(0.8, 0.3)), (1.0, f0.clone())]).unwrap();
        for side in [Side::Up, Side::Down] {
            let v = wh_limit_ratio(&g0, &f0, side, LimitPoint::Zero, &o()).unwrap();
            let near = wh_factor(&g0, side, c(1e-20, 0.0), &o()).unwrap().value / wh_factor(&f0, side, c(1e-20, 0.0), &o()).unwrap().value;
            assert!((v - near.re).abs() < 1e-5, "{side:?}: {v} {near}");
        }
        assert!((wh_limit_ratio(&f, &f, Side::Down, LimitPoint::Zero, &o()).unwrap() - 1.0).abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn estimate_sandwich(b in -2.0f64..2.0, x in 0.01f64..100.0) {
            let f = brownian_drift(b);
            let v = wh_factor(&f, Side::Up, c(x, 0.0), &o()).unwrap().value;
            let f1 = f.at_real(1.0).norm();
            prop_assert!(v.im.abs() < 1e-10 * v.re);
            prop_assert!(v.re >= (f1 / 2.0).sqrt() * x / (1.0 + x) * (1.0 - 1e-10));
            prop_assert!(v.re <= (2.0 * f1).sqrt() * (1.0 + x) * (1.0 + 1e-10));
        }

        #[test]
        fn dual_swaps_sides(alpha in 0.3f64..1.9, x in 0.05f64..20.0) {
            let rho = if alpha <= 1.0 { 0.35 } else { 0.5 + 0.3 * (1.0 / alpha - 0.5) };
            let f = st(alpha, rho);
            let a = wh_factor(&f, Side::Down, c(x, 0.0), &o()).unwrap().value;
            let b = wh_factor(&f.dual(), Side::Up, c(x, 0.0), &o()).unwrap().value;
            prop_assert!((a - b).norm() < 1e-10 * a.norm());
            let c_abs = f.at_real(1.0).norm();
            prop_assert!((a.re - c_abs.sqrt() * x.powf((1.0 - rho) * alpha)).abs() < 1e-8 * a.re);
        }
    }
}
