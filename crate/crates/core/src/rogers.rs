//! The [`RogersFunction`] type: evaluation on the slit plane, classification,
//! grid checks, structure-preserving transforms and the difference quotient.

use crate::catalog::ClosedFormData;
use crate::error::{Error, Result};
use crate::quad::{continuous_log_samples, extrapolate_limit};
use crate::C64;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::sync::Arc;

pub(crate) type Eval = Arc<dyn Fn(C64) -> C64 + Send + Sync>;

/// What is known in advance about the behaviour of f at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundHint {
    Unknown,
    Unbounded,
    /// f(∞⁻), a (real) limit.
    Bounded(f64),
}

/// An evaluable Rogers function.
///
/// The evaluator is only called with `Re ξ >= 0`; values in the left
/// half-plane follow from f(ξ) = conj f(−conj ξ).
#[derive(Clone)]
pub struct RogersFunction {
    eval: Eval,
    deriv: Option<Eval>,
    closed: ClosedFormData,
    label: String,
    bound: BoundHint,
}

impl fmt::Debug for RogersFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RogersFunction")
            .field("label", &self.label)
            .field("bound", &self.bound)
            .field("has_derivative", &self.deriv.is_some())
            .finish()
    }
}

/// Side from which a point on the imaginary axis is approached.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisSide {
    Right,
    Left,
}

impl RogersFunction {
    pub fn new<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(C64) -> C64 + Send + Sync + 'static,
    {
        RogersFunction {
            eval: Arc::new(f),
            deriv: None,
            closed: ClosedFormData::default(),
            label: label.into(),
            bound: BoundHint::Unknown,
        }
    }

    pub fn with_derivative<F>(mut self, d: F) -> Self
    where
        F: Fn(C64) -> C64 + Send + Sync + 'static,
    {
        self.deriv = Some(Arc::new(d));
        self
    }

    pub fn with_closed_forms(mut self, c: ClosedFormData) -> Self {
        self.closed = c;
        self
    }

    pub fn with_bound(mut self, b: BoundHint) -> Self {
        self.bound = b;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn bound_hint(&self) -> BoundHint {
        self.bound
    }

    pub fn closed_forms(&self) -> &ClosedFormData {
        &self.closed
    }

    pub fn has_analytic_derivative(&self) -> bool {
        self.deriv.is_some()
    }

    /// f(ξ) anywhere off the imaginary axis; points on iℝ are taken as
    /// limits from the right.
    #[inline]
    pub fn at(&self, xi: C64) -> C64 {
        if xi.re < 0.0 {
            (self.eval)(-xi.conj()).conj()
        } else {
            (self.eval)(xi)
        }
    }

    /// f(r) for real r.
    #[inline]
    pub fn at_real(&self, r: f64) -> C64 {
        self.at(C64::new(r, 0.0))
    }

    /// Evaluation with an explicit rule for the imaginary axis.
    pub fn evaluate(&self, xi: C64, side: Option<AxisSide>) -> Result<C64> {
        if xi.re != 0.0 {
            return Ok(self.at(xi));
        }
        match side {
            Some(AxisSide::Right) => Ok((self.eval)(xi)),
            Some(AxisSide::Left) => Ok((self.eval)(-xi.conj()).conj()),
            None => Err(Error::ImaginaryAxis(format!("{xi}"))),
        }
    }

    /// f'(ξ), analytic when available, otherwise a central difference.
    pub fn derivative(&self, xi: C64) -> C64 {
        if xi.re < 0.0 {
            return -self.derivative(-xi.conj()).conj();
        }
        if let Some(d) = &self.deriv {
            return d(xi);
        }
        let h = 1e-6 * xi.norm().max(1.0);
        // step along iℝ when close to the axis, so both nodes stay in ℂ_→
        let dir = if xi.re > 2.0 * h { C64::new(h, 0.0) } else { C64::new(0.0, h) };
        (self.at(xi + dir) - self.at(xi - dir)) / (dir * 2.0)
    }

    /// The dual function ξ ↦ f(−ξ), exponent of the dual process.
    pub fn dual(&self) -> RogersFunction {
        let e = self.eval.clone();
        let d = self.deriv.clone();
        let mut g = RogersFunction::new(format!("dual({})", self.label), move |xi: C64| e(xi.conj()).conj())
            .with_bound(self.bound);
        if let Some(d) = d {
            g = g.with_derivative(move |xi: C64| -d(xi.conj()).conj());
        }
        g
    }

    /// c·f for c > 0.
    pub fn scaled(&self, c: f64) -> RogersFunction {
        let e = self.eval.clone();
        let mut g = RogersFunction::new(format!("{c}*({})", self.label), move |xi| e(xi) * c).with_bound(
            match self.bound {
                BoundHint::Bounded(v) => BoundHint::Bounded(c * v),
                b => b,
            },
        );
        if let Some(d) = self.deriv.clone() {
            g = g.with_derivative(move |xi| d(xi) * c);
        }
        g
    }

    /// f + τ. For τ ≥ 0 this is again a Rogers function; complex τ is
    /// allowed for evaluation purposes.
    pub fn shifted(&self, tau: C64) -> RogersFunction {
        let e = self.eval.clone();
        let tau_re = tau.re;
        let mut g = RogersFunction::new(format!("({})+{tau}", self.label), move |xi| e(xi) + tau).with_bound(
            match self.bound {
                BoundHint::Bounded(v) => BoundHint::Bounded(v + tau_re),
                b => b,
            },
        );
        if let Some(d) = self.deriv.clone() {
            g = g.with_derivative(move |xi| d(xi));
        }
        g
    }

    /// Σ wᵢ fᵢ with nonnegative weights.
    pub fn sum(terms: &[(f64, RogersFunction)]) -> Result<RogersFunction> {
        if terms.iter().any(|(w, _)| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidSpec("sum weights must be finite and nonnegative".into()));
        }
        let parts: Vec<(f64, Eval)> = terms.iter().map(|(w, f)| (*w, f.eval.clone())).collect();
        let derivs: Option<Vec<(f64, Eval)>> =
            terms.iter().map(|(w, f)| f.deriv.clone().map(|d| (*w, d))).collect();
        let mut bound = BoundHint::Bounded(0.0);
        for (w, f) in terms {
            bound = match (bound, f.bound) {
                (_, _) if *w == 0.0 => bound,
                (BoundHint::Bounded(a), BoundHint::Bounded(b)) => BoundHint::Bounded(a + w * b),
                (BoundHint::Unknown, _) | (_, BoundHint::Unknown) => BoundHint::Unknown,
                _ => BoundHint::Unbounded,
            };
        }
        let label = terms.iter().map(|(w, f)| format!("{w}*({})", f.label)).collect::<Vec<_>>().join(" + ");
        let mut g = RogersFunction::new(label, move |xi| parts.iter().map(|(w, e)| e(xi) * *w).sum()).with_bound(bound);
        if let Some(ds) = derivs {
            g = g.with_derivative(move |xi| ds.iter().map(|(w, d)| d(xi) * *w).sum());
        }
        Ok(g)
    }
}

/// Result of sampling a property over a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridCheckReport {
    pub n_points: usize,
    pub max_violation: f64,
    pub worst_point: C64,
    pub passed: bool,
}

impl GridCheckReport {
    fn from_violations<I: IntoIterator<Item = (C64, f64)>>(it: I, tol: f64) -> GridCheckReport {
        let mut n = 0;
        let mut worst = (C64::new(0.0, 0.0), 0.0f64);
        for (p, v) in it {
            n += 1;
            let v = if v.is_nan() { f64::INFINITY } else { v };
            if v > worst.1 || n == 1 {
                worst = (p, v.max(worst.1));
            }
        }
        GridCheckReport { n_points: n, max_violation: worst.1, worst_point: worst.0, passed: worst.1 <= tol }
    }

    /// Merge of two reports over disjoint grids.
    pub fn merge(self, o: GridCheckReport, tol: f64) -> GridCheckReport {
        let (wp, mv) = if o.max_violation > self.max_violation {
            (o.worst_point, o.max_violation)
        } else {
            (self.worst_point, self.max_violation)
        };
        GridCheckReport { n_points: self.n_points + o.n_points, max_violation: mv, worst_point: wp, passed: mv <= tol }
    }
}

/// Log-polar grid in the open right half-plane: `n_r` radii in
/// [10⁻³, 10³] times `n_theta` angles strictly inside (−π/2, π/2).
pub fn right_half_plane_grid(n_r: usize, n_theta: usize) -> Vec<C64> {
    let mut g = Vec::with_capacity(n_r * n_theta);
    for i in 0..n_r {
        let r = 10f64.powf(-3.0 + 6.0 * i as f64 / (n_r.max(2) - 1) as f64);
        for j in 0..n_theta {
            let th = -FRAC_PI_2 + PI * (j as f64 + 0.5) / n_theta as f64;
            g.push(C64::from_polar(r, th));
        }
    }
    g
}

/// The 200-point grid used by property checks.
pub fn standard_grid() -> Vec<C64> {
    right_half_plane_grid(20, 10)
}

/// Grid for complete Bernstein checks: upper half-plane points up to angles
/// just below π, plus points on (0, ∞).
pub fn cbf_grid(r_min: f64, r_max: f64, n_r: usize) -> Vec<C64> {
    let angles = [0.05, 0.3, 0.8, 1.3, FRAC_PI_2, 2.0, 2.5, 2.9, 3.1, PI - 1e-3];
    let mut g = Vec::new();
    for i in 0..n_r {
        let t = i as f64 / (n_r.max(2) - 1) as f64;
        let r = r_min * (r_max / r_min).powf(t);
        g.push(C64::new(r, 0.0));
        for &a in &angles {
            g.push(C64::from_polar(r, a));
        }
    }
    g
}

/// Checks Re(f(ξ)/ξ) ≥ −tol on a grid in ℂ_→.
pub fn check_rogers(f: &RogersFunction, grid: &[C64], tol: f64) -> GridCheckReport {
    GridCheckReport::from_violations(
        grid.iter().map(|&xi| (xi, (-(f.at(xi) / xi).re).max(0.0))),
        tol,
    )
}

/// Complete Bernstein test on a grid in the closed upper half-plane.
///
/// Violations are relative to |g|: −Im g/|g| on ℂ↑ and |Im g|/|g|, −Re g/|g|
/// on (0, ∞).
pub fn check_cbf<G: Fn(C64) -> C64 + ?Sized>(g: &G, grid: &[C64], tol: f64) -> GridCheckReport {
    GridCheckReport::from_violations(
        grid.iter().map(|&z| {
            let v = g(z);
            let n = v.norm();
            let viol = if !(n.is_finite()) {
                f64::INFINITY
            } else if n == 0.0 {
                0.0
            } else if z.im > 0.0 {
                (-v.im / n).max(0.0)
            } else {
                ((v.im.abs()) / n).max((-v.re / n).max(0.0))
            };
            (z, viol)
        }),
        tol,
    )
}

/// Checks |ξ f'(ξ)/f(ξ)| ≤ 4(1+√2) + tol on a real grid.
pub fn derivative_bound_check(f: &RogersFunction, grid: &[f64], tol: f64) -> GridCheckReport {
    let bound = 4.0 * (1.0 + 2f64.sqrt());
    GridCheckReport::from_violations(
        grid.iter().map(|&x| {
            let h = 1e-6 * x.max(1e-300);
            let d = (f.at_real(x + h) - f.at_real(x - h)) / (2.0 * h);
            let ratio = (d * x / f.at_real(x)).norm();
            (C64::new(x, 0.0), (ratio - bound).max(0.0))
        }),
        tol,
    )
}

/// Limits of f at 0⁺ and ∞⁻ and the degenerate cases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub is_zero: bool,
    pub is_degenerate: bool,
    pub is_bounded: bool,
    pub f_at_zero: C64,
    /// f(∞⁻) when bounded, +∞ otherwise.
    pub f_at_infinity: f64,
}

/// Geometric probe ladder 10⁻¹⁰ … 10¹⁰.
pub fn default_probe_scales() -> Vec<f64> {
    (-10..=10).map(|k| 10f64.powi(k)).collect()
}

/// Decides c₀ = f(0⁺), boundedness and degeneracy from values on a ladder.
pub fn classify(f: &RogersFunction, probe_scales: &[f64]) -> Result<Classification> {
    let tol = 1e-3;
    let mut ladder: Vec<f64> = probe_scales.iter().copied().filter(|x| *x > 0.0 && x.is_finite()).collect();
    ladder.sort_by(|a, b| a.total_cmp(b));
    if ladder.len() < 4 {
        return Err(Error::InsufficientData(ladder.len()));
    }
    let vals: Vec<C64> = ladder.iter().map(|&x| f.at_real(x)).collect();
    if vals.iter().all(|v| v.norm() == 0.0) {
        return Ok(Classification {
            is_zero: true,
            is_degenerate: true,
            is_bounded: true,
            f_at_zero: C64::new(0.0, 0.0),
            f_at_infinity: 0.0,
        });
    }
    // Degenerate: f(ξ) = −c₁ iξ, least squares for c₁.
    let (mut num, mut den) = (0.0, 0.0);
    for (&x, &v) in ladder.iter().zip(&vals) {
        // f ≈ −i c₁ x, i.e. Im f ≈ −c₁ x
        let w = 1.0 / (x * x);
        num += -v.im * x * w;
        den += x * x * w;
    }
    let c1 = num / den;
    let resid = ladder
        .iter()
        .zip(&vals)
        .map(|(&x, &v)| (v + C64::new(0.0, c1 * x)).norm() / v.norm().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    let is_degenerate = resid <= 1e-10;

    let (v0, v1) = (vals[0], vals[1]);
    if (v0 - v1).norm() > tol * v0.norm().max(1.0) {
        return Err(Error::Inconclusive(format!(
            "f(0+) ladder disagrees: {v1} at {} vs {v0} at {}",
            ladder[1], ladder[0]
        )));
    }
    let f_at_zero = v0;

    let n = vals.len();
    let (w2, w1, w0) = (vals[n - 3], vals[n - 2], vals[n - 1]);
    let (is_bounded, f_at_infinity) = match f.bound {
        BoundHint::Bounded(v) => (true, v),
        BoundHint::Unbounded => (false, f64::INFINITY),
        BoundHint::Unknown => {
            if (w0 - w1).norm() <= tol * w0.norm().max(1.0) {
                (true, w0.re)
            } else if w0.norm() > w1.norm() && w1.norm() > w2.norm() {
                (false, f64::INFINITY)
            } else {
                return Err(Error::Inconclusive(format!(
                    "f(inf) ladder neither settles nor grows: {w2}, {w1}, {w0}"
                )));
            }
        }
    };
    Ok(Classification { is_zero: false, is_degenerate, is_bounded, f_at_zero, f_at_infinity })
}

/// Complete Bernstein functions available to [`Transform::ComposeCbf`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cbf {
    /// ξ^β, β ∈ [0, 1]
    Power(f64),
    /// log(1 + ξ)
    Log1p,
    /// ξ/(ξ + c), c > 0
    Ratio(f64),
}

impl Cbf {
    pub fn eval(&self, z: C64) -> C64 {
        match *self {
            Cbf::Power(b) => {
                if z.norm() == 0.0 {
                    z
                } else {
                    (z.ln() * b).exp()
                }
            }
            Cbf::Log1p => (z + 1.0).ln(),
            Cbf::Ratio(c) => z / (z + c),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Cbf::Power(b) if !(0.0..=1.0).contains(&b) => {
                Err(Error::DomainViolation(format!("CBF power {b} outside [0, 1]")))
            }
            Cbf::Ratio(c) if !(c > 0.0) => Err(Error::DomainViolation(format!("ratio constant {c} must be > 0"))),
            _ => Ok(()),
        }
    }
}

/// Transforms that map Rogers functions to Rogers functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transform {
    /// ξ²/f(ξ)
    InvReflect,
    /// 1/f(1/ξ)
    RecipInv,
    /// ξ² f(1/ξ)
    SquareInv,
    /// ξ^{1−α} f(ξ^α), α ∈ [−1, 1]
    PowerSandwich(f64),
    /// g(f(ξ)) for a complete Bernstein g
    ComposeCbf(Cbf),
    /// c − f(1/ξ), c ≥ f(∞⁻)
    BoundedComplement(f64),
    /// f(ξ + ζ₀)
    Translate(C64),
    /// f(u(ξ)), u(ξ) = ζ₀ + (ζ∞−ζ₀)ξ/(ξ + ζ∞ − ζ₀); ζ∞ = None is translation
    Mobius(C64, Option<C64>),
}

fn cpow(z: C64, a: f64) -> C64 {
    if z.norm() == 0.0 {
        if a > 0.0 {
            C64::new(0.0, 0.0)
        } else if a == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(f64::INFINITY, 0.0)
        }
    } else {
        (z.ln() * a).exp()
    }
}

/// Möbius change of variables of [`Transform::Mobius`].
pub fn mobius_map(z0: C64, zinf: Option<C64>, xi: C64) -> C64 {
    match zinf {
        None => xi + z0,
        Some(zi) => {
            let d = zi - z0;
            z0 + d * xi / (xi + d)
        }
    }
}

/// Applies a transform, returning the composed Rogers function.
pub fn transform(f: &RogersFunction, kind: Transform) -> Result<RogersFunction> {
    let e = f.eval.clone();
    let name = format!("{kind:?}({})", f.label);
    let one = C64::new(1.0, 0.0);
    let needs_nonzero = matches!(kind, Transform::InvReflect | Transform::RecipInv);
    if needs_nonzero {
        let probe = right_half_plane_grid(5, 3);
        if probe.iter().all(|&z| f.at(z).norm() == 0.0) {
            return Err(Error::ZeroFunction);
        }
    }
    let g = match kind {
        Transform::InvReflect => RogersFunction::new(name, move |xi| xi * xi / e(xi)),
        Transform::RecipInv => RogersFunction::new(name, move |xi| one / e(one / xi)),
        Transform::SquareInv => RogersFunction::new(name, move |xi| xi * xi * e(one / xi)),
        Transform::PowerSandwich(a) => {
            if !(-1.0..=1.0).contains(&a) {
                return Err(Error::DomainViolation(format!("sandwich exponent {a} outside [-1, 1]")));
            }
            RogersFunction::new(name, move |xi| {
                let inner = cpow(xi, a);
                // ξ^α stays in the closed right half-plane; route through
                // the conjugation rule for α < 0 images with Re < 0 (none).
                let v = if inner.re < 0.0 { e(-inner.conj()).conj() } else { e(inner) };
                cpow(xi, 1.0 - a) * v
            })
        }
        Transform::ComposeCbf(g) => {
            g.validate()?;
            RogersFunction::new(name, move |xi| g.eval(e(xi)))
        }
        Transform::BoundedComplement(c) => {
            let cl = classify(f, &default_probe_scales())?;
            if !cl.is_bounded {
                return Err(Error::DomainViolation("bounded complement needs a bounded f".into()));
            }
            if c < cl.f_at_infinity - 1e-9 * cl.f_at_infinity.abs().max(1.0) {
                return Err(Error::DomainViolation(format!(
                    "c = {c} below f(inf) = {}",
                    cl.f_at_infinity
                )));
            }
            RogersFunction::new(name, move |xi| c - e(one / xi)).with_bound(BoundHint::Bounded(c - cl.f_at_zero.re))
        }
        Transform::Translate(z0) => {
            if z0.re.abs() > 1e-12 * z0.norm().max(1.0) {
                return Err(Error::DomainViolation(format!("translation {z0} must lie on iℝ")));
            }
            let z0 = C64::new(0.0, z0.im);
            RogersFunction::new(name, move |xi| eval_any(&e, xi + z0))
        }
        Transform::Mobius(z0, zinf) => {
            if z0.re.abs() > 1e-12 * z0.norm().max(1.0) {
                return Err(Error::DomainViolation(format!("zeta_0 = {z0} must lie on iℝ")));
            }
            if let Some(zi) = zinf {
                if zi.re.abs() > 1e-12 * zi.norm().max(1.0) || (zi - z0).norm() == 0.0 {
                    return Err(Error::DomainViolation(format!("zeta_inf = {zi} must lie on iℝ, away from zeta_0")));
                }
            }
            let z0 = C64::new(0.0, z0.im);
            let zinf = zinf.map(|z| C64::new(0.0, z.im));
            RogersFunction::new(name, move |xi| eval_any(&e, mobius_map(z0, zinf, xi)))
        }
    };
    Ok(g)
}

#[inline]
fn eval_any(e: &Eval, xi: C64) -> C64 {
    if xi.re < 0.0 {
        e(-xi.conj()).conj()
    } else {
        e(xi)
    }
}

/// a/b with both scaled first, so that |b|² cannot overflow.
fn cdiv(a: C64, b: C64) -> C64 {
    let s = b.re.abs().max(b.im.abs());
    if !(s > 0.0 && s.is_finite()) {
        return a / b;
    }
    (a / s) / (b / s)
}

/// The difference quotient f_[ζ](ξ) = (ξ−ζ)(ξ+conj ζ)/(f(ξ)−f(ζ)).
///
/// Near ξ = ζ the quotient is replaced by its Taylor expansion, whose
/// coefficients come from a Cauchy integral of f on a small circle.
pub fn difference_quotient(f: &RogersFunction, zeta: C64) -> Result<RogersFunction> {
    if !(zeta.re > 0.0) {
        return Err(Error::DomainViolation(format!("zeta = {zeta} must lie in the open right half-plane")));
    }
    let lam = f.at(zeta);
    let tol = 1e-8 * lam.norm().max(1.0);
    if lam.im.abs() > tol {
        return Err(Error::NotRealValue(lam.im));
    }
    if !(lam.re > 0.0) {
        return Err(Error::DomainViolation(format!("f(zeta) = {lam} is not positive")));
    }
    let lam = lam.re;
    // Taylor coefficients of f(ξ) − λ around ζ.
    let rho = 0.25 * zeta.re.min(zeta.norm());
    const N: usize = 32;
    let samples: Vec<C64> = (0..N)
        .map(|k| f.at(zeta + C64::from_polar(rho, 2.0 * PI * k as f64 / N as f64)) - lam)
        .collect();
    let mut coef = [C64::new(0.0, 0.0); 6];
    for (n, c) in coef.iter_mut().enumerate().skip(1) {
        let mut s = C64::new(0.0, 0.0);
        for (k, v) in samples.iter().enumerate() {
            s += v * C64::from_polar(1.0, -2.0 * PI * (k * n) as f64 / N as f64);
        }
        *c = s / (N as f64 * rho.powi(n as i32));
    }
    if let Some(d) = &f.deriv {
        coef[1] = d(zeta);
    }
    if coef[1].norm() == 0.0 {
        return Err(Error::DomainViolation("f'(zeta) vanishes".into()));
    }
    let e = f.eval.clone();
    let patch = 1e-4 * zeta.norm();
    let zc = zeta.conj();
    let g = move |xi: C64| -> C64 {
        let d = xi - zeta;
        if d.norm() < patch {
            let mut den = coef[5];
            for n in (1..5).rev() {
                den = den * d + coef[n];
            }
            (xi + zc) / den
        } else {
            cdiv(d, e(xi) - lam) * (xi + zc)
        }
    };
    let bound = match f.bound {
        // f_[ζ](ξ) ~ ξ²/f(ξ) at infinity
        BoundHint::Bounded(_) => BoundHint::Unbounded,
        _ => BoundHint::Unknown,
    };
    Ok(RogersFunction::new(format!("quot[{zeta}]({})", f.label), g).with_bound(bound))
}

/// Boundary phase φ(s) = −sign(s) lim_{t↘0} Arg f(t − is), clamped to [0, π].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPhase {
    pub value: f64,
    /// Distance of the extrapolated value outside [0, π] before clamping.
    pub excess: f64,
    pub err: f64,
}

/// Default ladder for [`boundary_phase`], relative to |s|.
pub fn default_phase_ladder() -> Vec<f64> {
    vec![1e-3, 1e-4, 1e-5, 1e-6]
}

pub fn boundary_phase(f: &RogersFunction, s: f64, t_ladder: &[f64]) -> Result<BoundaryPhase> {
    if s == 0.0 || !s.is_finite() {
        return Err(Error::DomainViolation("boundary phase needs s != 0".into()));
    }
    let ts: Vec<f64> = t_ladder.iter().map(|t| t * s.abs()).collect();
    let vals: Vec<C64> = ts.iter().map(|&t| f.at(C64::new(t, -s))).collect();
    let logs = continuous_log_samples(&vals)?;
    let seq: Vec<(f64, C64)> = ts.iter().zip(&logs).map(|(&t, l)| (t, C64::new(l.im, 0.0))).collect();
    let ext = extrapolate_limit(&seq)?;
    // Continuous unwinding may start on the other sheet near the negative axis.
    let mut arg = ext.value.re;
    while arg > PI + 1e-9 {
        arg -= 2.0 * PI;
    }
    while arg < -PI - 1e-9 {
        arg += 2.0 * PI;
    }
    if ext.err > 1e-3 {
        return Err(Error::Inconclusive(format!("phase ladder at s = {s} oscillates (spread {:e})", ext.err)));
    }
    let raw = -s.signum() * arg;
    // −π and π are the same argument; pick the representative in range.
    let raw = if raw < -PI / 2.0 { raw + 2.0 * PI } else { raw };
    let clamped = raw.clamp(0.0, PI);
    Ok(BoundaryPhase { value: clamped, excess: (raw - clamped).abs(), err: ext.err })
}
