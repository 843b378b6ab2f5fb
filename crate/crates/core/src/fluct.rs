//! Laws of the supremum and infimum: Laplace transforms for balanced f,
//! the explicit stable formulas, eigenfunction phases and the
//! completeness identity.

use crate::catalog::{stable, StableParams};
use crate::curve::{CurveGrid, CurveSample};
use crate::error::{Error, Result};
use crate::quad::{gamma, integrate, integrate_halfline, QuadOptions, QuadResult};
use crate::rogers::{classify, default_probe_scales, difference_quotient, RogersFunction};
use crate::wh::{wh_factor, AxisLog, Side};
use crate::xwh::{curve_integral_in, on_curve, require_balanced};
use crate::C64;
use serde::{Deserialize, Serialize};
use std::cell::RefCell;
use std::f64::consts::PI;

/// A real value with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub err: f64,
}

/// Arguments of E exp(−ξX↑_t) or E exp(ξX↓_t).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupremumQuery {
    pub t: f64,
    pub xi: f64,
    pub side: Side,
}

impl SupremumQuery {
    pub fn new(side: Side, t: f64, xi: f64) -> Result<Self> {
        if !(t > 0.0 && xi > 0.0 && t.is_finite() && xi.is_finite()) {
            return Err(Error::DomainViolation(format!("need t, xi > 0, got t = {t}, xi = {xi}")));
        }
        Ok(SupremumQuery { t, xi, side })
    }
}

/// Eigenfunction phases at one radius, both in [0, π).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseData {
    pub r: f64,
    pub theta_up: f64,
    pub theta_down: f64,
}

/// F↑(r;x) = oscillatory_part − g.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenfunctionSample {
    pub r: f64,
    pub x: f64,
    pub f: f64,
    pub oscillatory_part: f64,
    pub g: f64,
}

fn finish(q: QuadResult, ctx: &str) -> Result<Estimate> {
    if !q.converged {
        return Err(Error::NonConvergent { context: ctx.into(), err: q.err_estimate });
    }
    Ok(Estimate { value: q.value.re, err: q.err_estimate })
}

// The curve quadratures call the difference quotient, whose own real-axis
// integrals overflow beyond this window.
const QUOT_WINDOW: (f64, f64) = (1e-60, 1e60);

fn tolerances(opts: &QuadOptions) -> (QuadOptions, QuadOptions) {
    let inner = QuadOptions { rel_tol: opts.rel_tol.min(1e-11), ..opts.clone() };
    let outer = QuadOptions { rel_tol: opts.rel_tol.max(1e-8), ..opts.clone() };
    (inner, outer)
}

/// log F↑(ξ) − log F↑(0⁺) for ξ > 0 from L(r) = log F(r) on r > 0 and
/// l0 = log F(0⁺) (real).
///
/// Down uses conj L.
pub(crate) fn log_rel_zero(l: &AxisLog, l0: f64, side: Side, xi: f64, scale: f64, opts: &QuadOptions) -> QuadResult {
    let sgn = match side {
        Side::Up => 1.0,
        Side::Down => -1.0,
    };
    // far outside the scales of ξ and F the integrand is below double
    // precision, while F itself may overflow there
    let (lo, hi) = (1e-100 * xi.min(scale), 1e100 * xi.max(scale));
    let g = |r: f64| -> C64 {
        if r < lo || r > hi {
            return C64::new(0.0, 0.0);
        }
        let lr = l(r);
        if !(lr.re.is_finite() && lr.im.is_finite()) && r > 1e10 * xi.max(scale) {
            return C64::new(0.0, 0.0);
        }
        let d = xi * xi + r * r;
        C64::new((xi * (lr.re - l0) / d - sgn * xi * xi * lr.im / (r * d)) / PI, 0.0)
    };
    integrate_halfline(&g, &[xi, scale], opts)
}

/// c₀ = f(0⁺), snapped to 0 when f still decays at the bottom of the
/// ladder; λ − c₀ has to be accurate down to the smallest radii.
fn f_at_zero(f: &RogersFunction) -> Result<f64> {
    classify(f, &default_probe_scales())?;
    let (v1, v2) = (f.at_real(1e-12).re, f.at_real(1e-16).re);
    Ok(if v2 < 0.5 * v1 { 0.0 } else { v2 })
}

fn psi_at(f: &RogersFunction, s: &CurveSample, c0: f64, side: Side, xi: f64, opts: &QuadOptions) -> Result<QuadResult> {
    if !(s.lam - c0 > 1e-12 * c0) {
        return Err(Error::DomainViolation(format!("lambda({}) does not exceed f(0+)", s.r)));
    }
    let g = difference_quotient(f, s.zeta)?;
    let l = |r: f64| g.at_real(r).ln();
    let l0 = (s.r * s.r / (s.lam - c0)).ln();
    Ok(log_rel_zero(&l, l0, side, xi, s.r, opts))
}

/// Ψ_r(ξ) = f_[ζ(r)]↑(ξ)/f_[ζ(r)]↑(0⁺), or the Down analogue.
pub fn psi_ratio(f: &RogersFunction, side: Side, r: f64, xi: f64, opts: &QuadOptions) -> Result<Estimate> {
    if !(xi > 0.0) {
        return Err(Error::DomainViolation(format!("need xi > 0, got {xi}")));
    }
    let s = on_curve(f, r)?;
    let q = psi_at(f, &s, f_at_zero(f)?, side, xi, opts)?;
    let v = q.value.re.exp();
    finish(QuadResult { value: C64::new(v, 0.0), err_estimate: v * q.err_estimate, ..q }, "psi_ratio")
}

/// E exp(−ξX↑_t) (Up) or E exp(ξX↓_t) (Down) for balanced f, by an
/// integral along the curve of real values.
pub fn extreme_laplace(f: &RogersFunction, q: SupremumQuery, grid: &CurveGrid, opts: &QuadOptions) -> Result<Estimate> {
    let q = SupremumQuery::new(q.side, q.t, q.xi)?;
    require_balanced(f, Some(grid))?;
    let c0 = f_at_zero(f)?;
    let (inner, outer) = tolerances(opts);
    let sgn = match q.side {
        Side::Up => -1.0,
        Side::Down => 1.0,
    };
    let xi = q.xi;
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let scale = grid
        .samples
        .iter()
        .min_by(|a, b| (q.t * a.lam - 1.0).abs().total_cmp(&(q.t * b.lam - 1.0).abs()))
        .map_or(1.0, |s| s.r);
    let r = curve_integral_in(
        f,
        QUOT_WINDOW,
        &[scale, xi, 1.0],
        |s| {
            let decay = q.t * s.lam;
            if s.on_axis || decay > 745.0 || !(s.zeta.re > 0.0) || !(s.lam - c0 > 1e-12 * c0) {
                return C64::new(0.0, 0.0);
            }
            match psi_at(f, s, c0, q.side, xi, &inner) {
                Ok(p) => {
                    let z = s.zeta;
                    let w = xi * z.re / (xi * xi + sgn * 2.0 * xi * z.im + s.r * s.r);
                    C64::new(p.value.re.exp() * w * s.lam_prime / s.lam * (-decay).exp() / PI, 0.0)
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
    finish(r, "extreme_laplace")
}

/// κ(σ;0⁺)/κ(σ;ξ) for the chosen side: the σ-resolvent of the Laplace
/// transform of the supremum (Up) or infimum (Down).
pub fn extreme_laplace_resolvent(f: &RogersFunction, side: Side, sigma: f64, xi: f64, opts: &QuadOptions) -> Result<Estimate> {
    if !(sigma > 0.0 && xi > 0.0) {
        return Err(Error::DomainViolation(format!("need sigma, xi > 0, got {sigma}, {xi}")));
    }
    let c0 = f_at_zero(f)?;
    let l = |r: f64| (f.at_real(r) + sigma).ln();
    let q = log_rel_zero(&l, (c0 + sigma).ln(), side, xi, 1.0, opts);
    let v = (-q.value.re).exp();
    finish(QuadResult { value: C64::new(v, 0.0), err_estimate: v * q.err_estimate, ..q }, "extreme_laplace_resolvent")
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::RhoDegenerate(rho));
    }
    Ok(())
}

fn oriented(p: &StableParams, side: Side) -> Result<StableParams> {
    let p = match side {
        Side::Up => *p,
        Side::Down => p.dual(),
    };
    check_rho(p.rho)?;
    Ok(p)
}

/// I(u) and J(u) of the explicit stable supremum formula.
pub fn stable_sup_ints(alpha: f64, rho: f64, u: f64, opts: &QuadOptions) -> (QuadResult, QuadResult) {
    let (sr, cr) = (rho * PI).sin_cos();
    let (s2, c2) = (2.0 * rho * PI).sin_cos();
    let w = |v: f64| sr / (1.0 + 2.0 * v * cr + v * v);
    let index_one = (alpha - 1.0).abs() < 1e-12;
    let patch = 1e-4 * u;
    let li = |v: f64| -> C64 {
        // scaled by m = max(u, v) so that neither square nor power overflows
        let m = u.max(v);
        let (a, b) = (u / m, v / m);
        let lq = 2.0 * m.ln() + (a * a - 2.0 * a * b * c2 + b * b).ln();
        let l = if index_one {
            0.5 * lq
        } else if (v - u).abs() < patch {
            // removable: (v^α − u^α)/(v − u) → αu^{α−1}
            let d = v - u;
            0.5 * lq - (alpha * u.powf(alpha - 1.0)).ln() - (alpha - 1.0) * d / (2.0 * u)
        } else {
            0.5 * lq + (1.0 - alpha) * m.ln() + ((b - a) / (b.powf(alpha) - a.powf(alpha))).ln()
        };
        C64::new(w(v) * l / PI, 0.0)
    };
    let lj = |v: f64| -> C64 {
        let a = C64::new(u - v * c2, v * s2).arg();
        C64::new((1.0 + v * cr) / (1.0 + 2.0 * v * cr + v * v) * a / (v * PI), 0.0)
    };
    (integrate_halfline(&li, &[u, 1.0], opts), integrate_halfline(&lj, &[u, 1.0], opts))
}

/// E exp(−ξX↑_t) (or E exp(ξX↓_t)) for a strictly stable process,
/// by the explicit single-parameter formula.
pub fn stable_sup_laplace(p: &StableParams, side: Side, t: f64, xi: f64, opts: &QuadOptions) -> Result<Estimate> {
    SupremumQuery::new(side, t, xi)?;
    let p = oriented(p, side)?;
    let (alpha, rho, k) = (p.alpha, p.rho, p.k);
    let (inner, outer) = tolerances(opts);
    let scale = 1.0 / (k * t.powf(1.0 / alpha) * xi);
    if (alpha - 2.0).abs() < 1e-12 {
        let a = k * k * t * xi * xi;
        let g = |u: f64| C64::new(2.0 / PI * (-a * u * u).exp() / (1.0 + u * u), 0.0);
        return finish(integrate_halfline(&g, &[scale, 1.0], &outer), "stable_sup_laplace");
    }
    let (sr, cr) = (rho * PI).sin_cos();
    let c = ((2.0 * rho - 1.0) * alpha * PI / 2.0).cos();
    let a = k.powf(alpha) * t * xi.powf(alpha) / c;
    let converged = RefCell::new(true);
    let g = |u: f64| -> C64 {
        let decay = a * u.powf(alpha);
        if decay > 745.0 {
            return C64::new(0.0, 0.0);
        }
        let (i, j) = stable_sup_ints(alpha, rho, u, &inner);
        if !(i.converged && j.converged) {
            *converged.borrow_mut() = false;
        }
        let h = u.powf(-(2.0 - alpha) * rho) * sr / (1.0 + 2.0 * u * cr + u * u);
        C64::new(alpha / PI * h * (i.value.re + j.value.re - decay).exp(), 0.0)
    };
    let mut q = integrate_halfline(&g, &[scale, 1.0], &outer);
    q.converged &= converged.into_inner();
    finish(q, "stable_sup_laplace")
}

fn require_index_one(p: &StableParams) -> Result<()> {
    if (p.alpha - 1.0).abs() > 1e-12 {
        return Err(Error::OutOfRange(format!("the explicit density needs alpha = 1, got {}", p.alpha)));
    }
    Ok(())
}

/// Density of X↑_t (or of −X↓_t) at x > 0 for a strictly stable process
/// with index one.
pub fn stable1_sup_density(p: &StableParams, side: Side, t: f64, x: f64, opts: &QuadOptions) -> Result<Estimate> {
    require_index_one(p)?;
    let p = oriented(p, side)?;
    if !(t > 0.0 && x > 0.0) {
        return Err(Error::DomainViolation(format!("need t, x > 0, got t = {t}, x = {x}")));
    }
    let rho = p.rho;
    let (sr, cr) = (rho * PI).sin_cos();
    let c = ((2.0 * rho - 1.0) * PI / 2.0).cos();
    let jac = c / (p.k * t);
    let u = x * jac;
    let (i, j) = stable_sup_ints(1.0, rho, u, opts);
    let v = u.powf(-rho) * sr / (1.0 + 2.0 * u * cr + u * u) * (i.value.re + j.value.re).exp() * jac / PI;
    let q = QuadResult {
        value: C64::new(v, 0.0),
        err_estimate: v * (i.err_estimate + j.err_estimate),
        converged: i.converged && j.converged,
        evaluations: i.evaluations + j.evaluations,
    };
    finish(q, "stable1_sup_density")
}

/// Negative moment E (X↑_t)^{−s} for 0 < s < αϱ, from the Mellin
/// transform of the σ-resolvent κ↑(σ;0)/κ↑(σ;ξ):
/// (tσ)^{−s/α}/(Γ(s)Γ(1−s/α)) ∫₀^∞ κ↑(σ;0)/κ↑(σ;ξ) ξ^{s−1} dξ.
pub fn stable_mellin(p: &StableParams, side: Side, t: f64, sigma: f64, s: f64, opts: &QuadOptions) -> Result<Estimate> {
    let p = oriented(p, side)?;
    let alpha = p.alpha;
    if !(t > 0.0 && sigma > 0.0) {
        return Err(Error::DomainViolation(format!("need t, sigma > 0, got t = {t}, sigma = {sigma}")));
    }
    let g = 1.0 - s / alpha;
    if g <= 0.0 && g.fract() == 0.0 {
        return Err(Error::GammaPole(g));
    }
    if s <= 0.0 && s.fract() == 0.0 {
        return Err(Error::GammaPole(s));
    }
    if !(s > 0.0 && s < alpha * p.rho) {
        return Err(Error::OutOfRange(format!("need 0 < s < alpha rho = {}, got {s}", alpha * p.rho)));
    }
    let f = stable(&p);
    let (inner, outer) = tolerances(opts);
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let ratio = |xi: f64| -> f64 {
        match extreme_laplace_resolvent(&f, Side::Up, sigma, xi, &inner) {
            Ok(v) => v.value,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };
    // [ε, E] in y = log ξ; below ε the ratio is 1 and above E it follows
    // its power law ξ^{−αϱ} to double precision
    let scale = sigma.powf(1.0 / alpha);
    let (lo, hi) = ((1e-20 * scale).ln(), (1e20 * scale).ln());
    let h = |y: f64| C64::new(ratio(y.exp()) * (s * y).exp(), 0.0);
    let mut q = QuadResult { value: C64::new(0.0, 0.0), err_estimate: 0.0, converged: true, evaluations: 0 };
    let mut y0 = lo;
    for y1 in [scale.ln() - 5.0, scale.ln(), scale.ln() + 5.0, hi] {
        q = q.combine(integrate(&h, y0, y1, &outer));
        y0 = y1;
    }
    let ar = alpha * p.rho;
    let head = (s * lo).exp() / s;
    let tail = ratio(hi.exp()) * (s * hi).exp() / (ar - s);
    q.value += head + tail;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let pre = (t * sigma).powf(-s / alpha) / (gamma(s) * gamma(g));
    let q = QuadResult { value: q.value * pre, err_estimate: q.err_estimate * pre, ..q };
    finish(q, "stable_mellin")
}

/// The phases ϑ↑(r) = Arg f_[ζ]↑(i conj ζ) and ϑ↓(r) = Arg f_[ζ]↓(iζ).
pub fn theta(f: &RogersFunction, r: f64, opts: &QuadOptions) -> Result<PhaseData> {
    let s = on_curve(f, r)?;
    let g = difference_quotient(f, s.zeta)?;
    let i = C64::new(0.0, 1.0);
    let up = wh_factor(&g, Side::Up, i * s.zeta.conj(), opts)?.require("theta")?;
    let down = wh_factor(&g, Side::Down, i * s.zeta, opts)?.require("theta")?;
    Ok(PhaseData { r, theta_up: up.value.arg(), theta_down: down.value.arg() })
}

/// Laplace transform LF↑(r;ξ) (or LF↓) of the generalised eigenfunction,
/// Re ζ/|g↑(i conj ζ)| · g↑(ξ)/|ξ + iζ|² with g = f_[ζ(r)].
pub fn eigen_laplace(f: &RogersFunction, side: Side, r: f64, xi: f64, opts: &QuadOptions) -> Result<f64> {
    let s = on_curve(f, r)?;
    let g = difference_quotient(f, s.zeta)?;
    eigen_laplace_at(&g, side, &s, xi, opts)
}

fn eigen_laplace_at(g: &RogersFunction, side: Side, s: &CurveSample, xi: f64, opts: &QuadOptions) -> Result<f64> {
    let i = C64::new(0.0, 1.0);
    let z = s.zeta;
    let (w, d) = match side {
        Side::Up => (i * z.conj(), xi + i * z),
        Side::Down => (i * z, xi - i * z),
    };
    let at_w = wh_factor(g, side, w, opts)?.require("eigen_laplace")?;
    let at_xi = wh_factor(g, side, C64::new(xi, 0.0), opts)?.require("eigen_laplace")?;
    Ok(z.re / at_w.value.norm() * at_xi.value.re / d.norm_sqr())
}

/// Weight of G↑(r;x) = ∫₀^∞ w(u)e^{−xu} du, from the jump of f_[ζ]↑ across
/// the negative half-line:
/// w(u) = (1/π) Re ζ/|g↑(i conj ζ)| · Im g↑(−u+i0)/((−u−i conj ζ)(−u+iζ)).
pub fn eigen_weight(f: &RogersFunction, r: f64, u: f64, opts: &QuadOptions) -> Result<f64> {
    setup(f, r, opts)?.weight(u, opts)
}

struct EigenSetup {
    g: RogersFunction,
    s: CurveSample,
    norm: f64,
}

fn setup(f: &RogersFunction, r: f64, opts: &QuadOptions) -> Result<EigenSetup> {
    let s = on_curve(f, r)?;
    let g = difference_quotient(f, s.zeta)?;
    let i = C64::new(0.0, 1.0);
    let at = wh_factor(&g, Side::Up, i * s.zeta.conj(), opts)?.require("eigen_weight")?;
    Ok(EigenSetup { g, s, norm: s.zeta.re / at.value.norm() })
}

impl EigenSetup {
    fn weight(&self, u: f64, opts: &QuadOptions) -> Result<f64> {
        if !(u > 0.0) {
            return Err(Error::DomainViolation(format!("need u > 0, got {u}")));
        }
        let i = C64::new(0.0, 1.0);
        let z = self.s.zeta;
        let w = C64::new(-u, f64::MIN_POSITIVE);
        let gu = wh_factor(&self.g, Side::Up, w, opts)?.require("eigen_weight")?;
        Ok(self.norm * (gu.value / ((w - i * z.conj()) * (w + i * z))).im / PI)
    }

    /// ∫₀^∞ w(u) k(u) du.
    fn integrate<K: Fn(f64) -> f64>(&self, k: K, splits: &[f64], opts: &QuadOptions) -> Result<f64> {
        let (inner, outer) = tolerances(opts);
        let failure: RefCell<Option<Error>> = RefCell::new(None);
        let h = |u: f64| -> C64 {
            let kv = k(u);
            if kv == 0.0 {
                return C64::new(0.0, 0.0);
            }
            match self.weight(u, &inner) {
                Ok(w) => C64::new(w * kv, 0.0),
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    C64::new(0.0, 0.0)
                }
            }
        };
        let mut sp: Vec<f64> = splits.iter().copied().filter(|x| *x > 0.0 && x.is_finite()).collect();
        sp.push(self.s.r);
        let q = integrate_halfline(&h, &sp, &outer);
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        Ok(finish(q, "eigen_weight")?.value)
    }
}

fn sample(e: &EigenSetup, th: f64, x: f64, opts: &QuadOptions) -> Result<EigenfunctionSample> {
    if !(x > 0.0) {
        return Err(Error::DomainViolation(format!("need x > 0, got {x}")));
    }
    let z = e.s.zeta;
    let osc = (z.im * x).exp() * (z.re * x + th).sin();
    let g = e.integrate(|u| if x * u > 745.0 { 0.0 } else { (-x * u).exp() }, &[1.0 / x], opts)?;
    Ok(EigenfunctionSample { r: e.s.r, x, f: osc - g, oscillatory_part: osc, g })
}

/// F↑(r;x) = e^{x Im ζ} sin(x Re ζ + ϑ↑(r)) − G↑(r;x) for balanced f, with
/// G↑ completely monotone in x.
pub fn eigenfunction(f: &RogersFunction, r: f64, x: f64, opts: &QuadOptions) -> Result<EigenfunctionSample> {
    let e = setup(f, r, opts)?;
    let th = theta(f, r, opts)?.theta_up;
    sample(&e, th, x, opts)
}

/// F↑(r;x) (or F↓, through ϱ ↦ 1−ϱ) of a strictly stable process, with
/// the phase (1−ϱ)(1−αϱ)π/2.
pub fn stable_eigenfunction(p: &StableParams, side: Side, r: f64, x: f64, opts: &QuadOptions) -> Result<EigenfunctionSample> {
    let p = oriented(p, side)?;
    if !(r > 0.0) {
        return Err(Error::DomainViolation(format!("need r > 0, got {r}")));
    }
    let th = (1.0 - p.rho) * (1.0 - p.alpha * p.rho) * PI / 2.0;
    let e = setup(&stable(&p), r, opts)?;
    sample(&e, th, x, opts)
}

/// ∫₀^∞ e^{−ξx} G↑(r;x) dx = ∫₀^∞ w(u)/(ξ+u) du.
pub fn eigen_g_laplace(f: &RogersFunction, r: f64, xi: f64, opts: &QuadOptions) -> Result<f64> {
    let e = setup(f, r, opts)?;
    e.integrate(|u| 1.0 / (xi + u), &[xi], opts)
}

/// (ξ1+ξ2)·(2/π)∫₀^∞ LF↑(r;ξ1) LF↓(r;ξ2) |ζ'(r)| dr; equals 1 for
/// balanced f.
pub fn completeness_check(f: &RogersFunction, xi1: f64, xi2: f64, grid: &CurveGrid, opts: &QuadOptions) -> Result<f64> {
    if !(xi1 > 0.0 && xi2 > 0.0) {
        return Err(Error::DomainViolation(format!("need xi1, xi2 > 0, got {xi1}, {xi2}")));
    }
    require_balanced(f, Some(grid))?;
    let (inner, outer) = tolerances(opts);
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    // factors at complex points lose accuracy beyond this window; the
    // integrand is O(r^-2) at infinity and vanishes at 0
    let q = curve_integral_in(
        f,
        (1e-30, 1e30),
        &[xi1, xi2, 1.0],
        |s| {
            if s.on_axis || !(s.zeta.re > 0.0) {
                return C64::new(0.0, 0.0);
            }
            let v = difference_quotient(f, s.zeta).and_then(|g| {
                Ok(eigen_laplace_at(&g, Side::Up, s, xi1, &inner)? * eigen_laplace_at(&g, Side::Down, s, xi2, &inner)?)
            });
            match v {
                Ok(v) => C64::new(2.0 / PI * v * s.zeta_prime.norm() * (xi1 + xi2), 0.0),
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
    Ok(finish(q, "completeness_check")?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{brownian_drift, stable_convert, StableInput};
    use crate::curve::curve_grid;
    use crate::quad::{erfc, extrapolate_limit, integrate};
    use crate::wh::wh_ratio;
    use crate::xwh::xwh_integral_identity;
    use std::f64::consts::FRAC_PI_2;

    fn o() -> QuadOptions {
        QuadOptions::default()
    }

    fn sp(alpha: f64, rho: f64) -> StableParams {
        stable_convert(StableInput::Rho { alpha, rho, k: 1.0 }).unwrap()
    }

    fn grid(f: &RogersFunction) -> CurveGrid {
        curve_grid(f, 1e-4, 1e4, 64).unwrap()
    }

    fn square() -> RogersFunction {
        RogersFunction::new("sq", |z: C64| z * z)
    }

    fn up(t: f64, xi: f64) -> SupremumQuery {
        SupremumQuery::new(Side::Up, t, xi).unwrap()
    }

    fn halfline(g: impl Fn(f64) -> f64, splits: &[f64]) -> f64 {
        integrate_halfline(&|x: f64| C64::new(g(x), 0.0), splits, &o().with_rel_tol(1e-10)).value.re
    }

    #[test]
    fn psi_trivial_cases() {
        let f = square();
        for xi in [0.1, 1.0, 7.0] {
            let v = psi_ratio(&f, Side::Up, 1.0, xi, &o()).unwrap();
            assert!((v.value - 1.0).abs() < 1e-12);
        }
        let f = stable(&sp(1.5, 0.6));
        let v = psi_ratio(&f, Side::Up, 1.0, 1e-8, &o()).unwrap();
        assert!((v.value - 1.0).abs() < 1e-6, "{v:?}");
    }

    #[test]
    fn psi_matches_ladder() {
        let f = stable(&sp(1.5, 0.6));
        let s = on_curve(&f, 1.0).unwrap();
        let g = difference_quotient(&f, s.zeta).unwrap();
        for side in [Side::Up, Side::Down] {
            let seq: Vec<(f64, C64)> = [1e-2, 1e-3, 1e-4, 1e-5]
                .iter()
                .map(|&e| (e, wh_ratio(&g, side, C64::new(2.0, 0.0), C64::new(e, 0.0), &o()).unwrap().value))
                .collect();
            let lad = extrapolate_limit(&seq).unwrap().value.re;
            let direct = psi_ratio(&f, side, 1.0, 2.0, &o()).unwrap().value;
            assert!((lad - direct).abs() < 1e-4 * direct, "{side:?} {lad} {direct}");
            // the smallest ladder point alone is already close
            assert!((seq[3].1.re - direct).abs() < 1e-3 * direct);
        }
    }

    #[test]
    fn square_closed_form() {
        let f = square();
        let v = extreme_laplace(&f, up(1.0, 1.0), &grid(&f), &o()).unwrap();
        assert!((v.value - std::f64::consts::E * erfc(1.0)).abs() < 1e-9, "{v:?}");
    }

    #[test]
    fn brownian_reflection_oracle() {
        let f = brownian_drift(0.0);
        let g = grid(&f);
        for (t, xi) in [(1.0, 1.0), (0.5, 3.0), (2.0, 0.2)] {
            // P(X↑_t ∈ dx) = 2 φ_t(x) dx on x > 0
            let dens = |x: f64| 2.0 * (-x * x / (2.0 * t)).exp() / (2.0 * PI * t).sqrt();
            let oracle = halfline(|x| dens(x) * (-xi * x).exp(), &[t.sqrt()]);
            let v = extreme_laplace(&f, up(t, xi), &g, &o()).unwrap();
            assert!((v.value - oracle).abs() < 1e-6, "{t} {xi} {v:?} {oracle}");
        }
    }

    #[test]
    fn total_mass_at_small_xi() {
        let f = stable(&sp(1.5, 0.6));
        let g = grid(&f);
        for side in [Side::Up, Side::Down] {
            let v = extreme_laplace(&f, SupremumQuery::new(side, 1.0, 1e-4).unwrap(), &g, &o()).unwrap();
            assert!((v.value - 1.0).abs() < 1e-3, "{v:?}");
        }
    }

    #[test]
    fn duality() {
        for (alpha, rho) in [(1.5, 0.6), (1.2, 0.3), (0.8, 0.45)] {
            let f = stable(&sp(alpha, rho));
            let d = f.dual();
            let (gf, gd) = (grid(&f), grid(&d));
            for (t, xi) in [(1.0, 1.0), (0.3, 2.0)] {
                let a = extreme_laplace(&f, SupremumQuery::new(Side::Down, t, xi).unwrap(), &gf, &o()).unwrap();
                let b = extreme_laplace(&d, up(t, xi), &gd, &o()).unwrap();
                assert!((a.value - b.value).abs() < 1e-7 * b.value, "{alpha} {rho} {a:?} {b:?}");
            }
        }
    }

    #[test]
    fn monotone_and_completely_monotone_in_t() {
        let f = stable(&sp(1.5, 0.6));
        let g = grid(&f);
        let ts: Vec<f64> = (0..6).map(|k| 0.25 * 2f64.powi(k)).collect();
        let v: Vec<f64> = ts.iter().map(|&t| extreme_laplace(&f, up(t, 1.0), &g, &o()).unwrap().value).collect();
        assert!(v.iter().all(|x| (0.0..=1.0).contains(x)));
        // divided differences on the geometric grid alternate in sign
        let mut d: Vec<f64> = v.clone();
        let mut x = ts.clone();
        for order in 1..=3 {
            d = (0..d.len() - 1).map(|k| (d[k + 1] - d[k]) / (x[k + order] - x[k])).collect();
            let sign = if order % 2 == 1 { -1.0 } else { 1.0 };
            assert!(d.iter().all(|y| y * sign > 0.0), "order {order}: {d:?}");
            x = ts.clone();
        }
        let w: Vec<f64> = [0.5, 1.0, 2.0, 4.0]
            .iter()
            .map(|&xi| extreme_laplace(&f, up(1.0, xi), &g, &o()).unwrap().value)
            .collect();
        assert!(w.windows(2).all(|p| p[1] < p[0]));
    }

    #[test]
    fn resolvent_values() {
        // κ↑(σ;ξ) ∝ ξ + √(2σ) for ½ξ²
        let f = brownian_drift(0.0);
        let v = extreme_laplace_resolvent(&f, Side::Up, 2.0, 1.0, &o()).unwrap();
        assert!((v.value - 2.0 / 3.0).abs() < 1e-10, "{v:?}");
        let v = extreme_laplace_resolvent(&f, Side::Down, 2.0, 1.0, &o()).unwrap();
        assert!((v.value - 2.0 / 3.0).abs() < 1e-10, "{v:?}");
        let f = stable(&sp(1.5, 0.6));
        let v = extreme_laplace_resolvent(&f, Side::Up, 1.0, 1e-6, &o()).unwrap();
        assert!((v.value - 1.0).abs() < 1e-4);
    }

    #[test]
    fn resolvent_is_time_laplace_transform() {
        let f = stable(&sp(1.5, 0.6));
        let g = grid(&f);
        let (sigma, xi) = (1.0, 1.0);
        let q = integrate_halfline(
            &|t: f64| C64::new(sigma * (-sigma * t).exp() * extreme_laplace(&f, up(t, xi), &g, &o()).unwrap().value, 0.0),
            &[1.0 / sigma],
            &o().with_rel_tol(1e-7),
        );
        let r = extreme_laplace_resolvent(&f, Side::Up, sigma, xi, &o()).unwrap();
        assert!((q.value.re - r.value).abs() < 1e-5, "{} {}", q.value.re, r.value);
    }

    #[test]
    fn stable_alpha_two() {
        for k in [1.0, 0.7] {
            let p = stable_convert(StableInput::Rho { alpha: 2.0, rho: 0.5, k }).unwrap();
            for t in [0.5f64, 1.0, 2.0] {
                for xi in [0.5, 1.0, 3.0] {
                    let a = k * xi * t.sqrt();
                    let v = stable_sup_laplace(&p, Side::Up, t, xi, &o()).unwrap();
                    assert!((v.value - (a * a).exp() * erfc(a)).abs() < 1e-9, "{v:?}");
                }
            }
        }
        // the general branch with α = 2 has I = J = 0 and the same value
        let (i, j) = stable_sup_ints(2.0, 0.5, 0.7, &o());
        assert!(i.value.norm() < 1e-12 && j.value.norm() < 1e-12);
    }

    #[test]
    fn stable_formula_matches_general() {
        for (alpha, rho) in [(1.5, 0.6), (1.0, 0.5), (0.8, 0.35)] {
            let p = sp(alpha, rho);
            let f = stable(&p);
            let g = grid(&f);
            for t in [0.5, 1.0, 2.0] {
                for xi in [0.5, 1.0, 2.0] {
                    for side in [Side::Up, Side::Down] {
                        let a = stable_sup_laplace(&p, side, t, xi, &o()).unwrap();
                        let b = extreme_laplace(&f, SupremumQuery::new(side, t, xi).unwrap(), &g, &o()).unwrap();
                        assert!((a.value - b.value).abs() < 1e-7, "{alpha} {rho} {t} {xi} {a:?} {b:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn degenerate_rho_rejected() {
        let p = stable_convert(StableInput::Rho { alpha: 0.5, rho: 1.0, k: 1.0 }).unwrap();
        assert!(matches!(stable_sup_laplace(&p, Side::Up, 1.0, 1.0, &o()), Err(Error::RhoDegenerate(_))));
    }

    #[test]
    fn index_one_density() {
        for rho in [0.3, 0.5, 0.7] {
            let p = sp(1.0, rho);
            let d = |x: f64| stable1_sup_density(&p, Side::Up, 1.0, x, &o()).unwrap().value;
            let mass = halfline(d, &[1.0]);
            assert!((mass - 1.0).abs() < 1e-8, "{rho} {mass}");
            for xi in [0.5, 2.0] {
                let l = halfline(|x| (-xi * x).exp() * d(x), &[1.0, 1.0 / xi]);
                let s = stable_sup_laplace(&p, Side::Up, 1.0, xi, &o()).unwrap().value;
                assert!((l - s).abs() < 1e-7, "{rho} {xi} {l} {s}");
            }
        }
        let p = sp(1.5, 0.5);
        assert!(matches!(stable1_sup_density(&p, Side::Up, 1.0, 1.0, &o()), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn density_scales_with_time() {
        let p = sp(1.0, 0.6);
        let a = stable1_sup_density(&p, Side::Up, 2.0, 3.0, &o()).unwrap().value;
        let b = stable1_sup_density(&p, Side::Up, 1.0, 1.5, &o()).unwrap().value;
        assert!((a - b / 2.0).abs() < 1e-12);
    }

    #[test]
    fn mellin_negative_moments() {
        // f = ξ²: X↑_1 = |√2 N|, E (X↑_1)^{−s} = 2^{−s} Γ((1−s)/2)/√π
        let b = stable_convert(StableInput::Rho { alpha: 2.0, rho: 0.5, k: 1.0 }).unwrap();
        for s in [0.25, 0.5, 0.8] {
            let v = stable_mellin(&b, Side::Up, 1.0, 1.0, s, &o()).unwrap().value;
            let oracle = 2f64.powf(-s) * gamma((1.0 - s) / 2.0) / PI.sqrt();
            assert!((v - oracle).abs() < 1e-8 * oracle, "{s} {v} {oracle}");
            let v4 = stable_mellin(&b, Side::Up, 4.0, 1.0, s, &o()).unwrap().value;
            assert!((v4 - oracle * 2f64.powf(-s)).abs() < 1e-8 * oracle);
        }
        let p = sp(1.5, 0.6);
        let a = stable_mellin(&p, Side::Up, 1.0, 1.0, 0.5, &o()).unwrap().value;
        let c = stable_mellin(&p, Side::Up, 1.0, 2.0, 0.5, &o()).unwrap().value;
        assert!((a - c).abs() < 1e-5 * a);
        let z = stable_mellin(&p, Side::Up, 1.0, 1.0, 1e-4, &o()).unwrap().value;
        assert!((z - 1.0).abs() < 1e-3);
        // Cauchy: against the explicit density
        let p = sp(1.0, 0.5);
        let s = 0.3;
        let m = halfline(|x| x.powf(-s) * stable1_sup_density(&p, Side::Up, 1.0, x, &o()).unwrap().value, &[1.0]);
        let v = stable_mellin(&p, Side::Up, 1.0, 1.0, s, &o()).unwrap().value;
        assert!((m - v).abs() < 1e-6 * m, "{m} {v}");
        assert!(matches!(stable_mellin(&p, Side::Up, 1.0, 1.0, 0.6, &o()), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn phases_closed_form() {
        for (alpha, rho) in [(0.6, 0.3), (1.2, 0.5), (1.8, 0.55), (1.5, 0.6), (0.8, 0.7)] {
            let f = stable(&sp(alpha, rho));
            let want = (1.0 - rho) * (1.0 - alpha * rho) * FRAC_PI_2;
            let want_down = rho * (1.0 - alpha * (1.0 - rho)) * FRAC_PI_2;
            for r in [0.5, 1.0, 8.0] {
                let th = theta(&f, r, &o()).unwrap();
                assert!((th.theta_up - want).abs() < 1e-8, "{alpha} {rho} {th:?}");
                assert!((th.theta_down - want_down).abs() < 1e-8, "{alpha} {rho} {th:?}");
            }
        }
        let th = theta(&square(), 1.0, &o()).unwrap();
        assert!(th.theta_up.abs() < 1e-12 && th.theta_down.abs() < 1e-12);
    }

    #[test]
    fn phase_difference_identity() {
        let fs = [stable(&sp(1.5, 0.6)), stable(&sp(0.7, 0.4)), brownian_drift(0.0), brownian_drift(0.5)];
        for f in &fs {
            for r in [0.3, 1.0, 4.0] {
                let Ok(s) = on_curve(f, r) else { continue };
                let th = theta(f, r, &o()).unwrap();
                let d = th.theta_up - th.theta_down + s.zeta_prime.arg();
                assert!(d.abs() < 1e-6, "{} {r} {th:?} {d}", f.label());
            }
        }
    }

    #[test]
    fn eigenfunction_laplace_transform() {
        for (alpha, rho) in [(1.5, 0.6), (1.0, 0.5), (0.8, 0.45), (1.2, 0.3)] {
            let p = sp(alpha, rho);
            for side in [Side::Up, Side::Down] {
                let q = oriented(&p, side).unwrap();
                let (sr, cr) = (q.rho * PI).sin_cos();
                let th = (1.0 - q.rho) * (1.0 - q.alpha * q.rho) * FRAC_PI_2;
                for (r, xi) in [(1.0, 2.0), (0.5, 1.0)] {
                    let osc = (C64::from_polar(1.0, th) / C64::new(xi + r * cr, -r * sr)).im;
                    let lg = eigen_g_laplace(&stable(&q), r, xi, &o()).unwrap();
                    let lf = eigen_laplace(&stable(&p), side, r, xi, &o()).unwrap();
                    assert!((osc - lg - lf).abs() < 1e-8 * lf, "{alpha} {rho} {side:?} {r}");
                }
            }
        }
    }

    #[test]
    fn eigenfunction_laplace_by_x_quadrature() {
        let p = sp(1.5, 0.6);
        let xi = 2.0;
        let q = integrate(
            &|x: f64| C64::new((-xi * x).exp() * stable_eigenfunction(&p, Side::Up, 1.0, x, &o()).unwrap().f, 0.0),
            1e-9,
            25.0,
            &o().with_rel_tol(1e-7),
        );
        let lf = eigen_laplace(&stable(&p), Side::Up, 1.0, xi, &o()).unwrap();
        assert!((q.value.re - lf).abs() < 1e-4 * lf, "{} {lf}", q.value.re);
    }

    #[test]
    fn eigen_correction_completely_monotone() {
        for (alpha, rho) in [(1.5, 0.6), (0.8, 0.45)] {
            let p = sp(alpha, rho);
            let xs = [0.5, 1.0, 2.0, 4.0];
            let h = 0.25;
            for &x in &xs {
                let g = |k: f64| stable_eigenfunction(&p, Side::Up, 1.0, x + k * h, &o()).unwrap().g;
                let v: Vec<f64> = (0..4).map(|k| g(k as f64)).collect();
                let d = [v[0], v[1] - v[0], v[2] - 2.0 * v[1] + v[0], v[3] - 3.0 * v[2] + 3.0 * v[1] - v[0]];
                for (n, dn) in d.iter().enumerate() {
                    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                    assert!(dn * sign > 0.0, "{alpha} {rho} x = {x} order {n}: {d:?}");
                }
            }
        }
    }

    #[test]
    fn eigenfunction_near_zero() {
        let p = sp(1.0, 0.5);
        let e = stable_eigenfunction(&p, Side::Up, 1.0, 1e-10, &o()).unwrap();
        assert!((e.oscillatory_part - (PI / 8.0).sin()).abs() < 1e-9);
        // F(r; x) = O(x^{1−αϱ}) as x → 0, since LF(r;ξ) = O(ξ^{αϱ−2})
        assert!(e.f.abs() < 1e-4, "{e:?}");
        let e2 = stable_eigenfunction(&p, Side::Up, 1.0, 1e-8, &o()).unwrap();
        assert!((e2.f / e.f - 10.0).abs() < 0.1, "{e:?} {e2:?}");
        let f = stable(&p);
        let g = eigenfunction(&f, 1.0, 0.7, &o()).unwrap();
        let s = stable_eigenfunction(&p, Side::Up, 1.0, 0.7, &o()).unwrap();
        assert!((g.f - s.f).abs() < 1e-10);
    }

    #[test]
    fn completeness() {
        let f = brownian_drift(0.0);
        let v = completeness_check(&f, 1.0, 1.0, &grid(&f), &o()).unwrap();
        assert!((v - 1.0).abs() < 1e-5, "{v}");
        let f = stable(&sp(1.5, 0.55));
        let g = grid(&f);
        let v = completeness_check(&f, 2.0, 0.5, &g, &o()).unwrap();
        assert!((v - 1.0).abs() < 1e-5, "{v}");
        let w = xwh_integral_identity(&f, 2.0, 0.5, &g, &o()).unwrap();
        assert!((v - w).abs() < 1e-8, "{v} {w}");
    }
}
