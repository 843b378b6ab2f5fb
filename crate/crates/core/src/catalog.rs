//! Concrete Rogers functions, stable parametrisations and the closed-form
//! curves and factors attached to them.

use crate::curve::CurveSample;
use crate::error::{Error, Result};
use crate::rogers::{transform, BoundHint, Cbf, RogersFunction, Transform};
use crate::C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

pub type CurveFn = Arc<dyn Fn(f64) -> CurveSample + Send + Sync>;
pub type FactorFn = Arc<dyn Fn(C64) -> C64 + Send + Sync>;
/// (τ, ξ) ↦ κ(τ; ξ)
pub type KappaFn = Arc<dyn Fn(f64, C64) -> C64 + Send + Sync>;

/// Closed-form knowledge attached to a catalog function.
#[derive(Clone, Default)]
pub struct ClosedFormData {
    pub curve: Option<CurveFn>,
    pub wh_up: Option<FactorFn>,
    pub wh_down: Option<FactorFn>,
    pub kappa_up: Option<KappaFn>,
    pub kappa_down: Option<KappaFn>,
    pub balanced: Option<bool>,
}

impl ClosedFormData {
    pub fn is_empty(&self) -> bool {
        self.curve.is_none()
            && self.wh_up.is_none()
            && self.wh_down.is_none()
            && self.kappa_up.is_none()
            && self.kappa_down.is_none()
            && self.balanced.is_none()
    }

    pub fn zeta(&self, r: f64) -> Option<C64> {
        self.curve.as_ref().map(|c| c(r).zeta)
    }

    pub fn lambda(&self, r: f64) -> Option<f64> {
        self.curve.as_ref().map(|c| c(r).lam)
    }
}

impl std::fmt::Debug for ClosedFormData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ClosedFormData")
            .field("curve", &self.curve.is_some())
            .field("wh_up", &self.wh_up.is_some())
            .field("wh_down", &self.wh_down.is_some())
            .field("kappa_up", &self.kappa_up.is_some())
            .field("kappa_down", &self.kappa_down.is_some())
            .field("balanced", &self.balanced)
            .finish()
    }
}

/// All parametrisations of a strictly stable exponent f(ξ) = aξ^α.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableParams {
    pub alpha: f64,
    pub rho: f64,
    /// Undefined for α = 1.
    pub beta: Option<f64>,
    pub k: f64,
    pub a: C64,
    /// One-sided jump weights; undefined for α ∈ {1, 2}.
    pub c_up: Option<f64>,
    pub c_down: Option<f64>,
    /// Angle of the curve of real values, −Arg(a)/α.
    pub theta: f64,
    pub c_abs: f64,
}

/// The inputs accepted by [`stable_convert`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StableInput {
    Beta { alpha: f64, beta: f64, k: f64 },
    Rho { alpha: f64, rho: f64, k: f64 },
    Jumps { alpha: f64, c_up: f64, c_down: f64 },
    /// α = 1 only: a = c − ib.
    CauchyDrift { c: f64, b: f64 },
    Coefficient { alpha: f64, a: C64 },
}

const ANGLE_TOL: f64 = 1e-12;

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::OutOfRange(format!("alpha = {alpha} outside (0, 2]")));
    }
    Ok(())
}

fn from_coefficient(alpha: f64, a: C64) -> Result<StableParams> {
    check_alpha(alpha)?;
    if !(a.norm() > 0.0) || !a.re.is_finite() || !a.im.is_finite() {
        return Err(Error::OutOfRange(format!("coefficient a = {a} must be finite and nonzero")));
    }
    let arg = a.arg();
    let lim = (alpha * FRAC_PI_2).min((2.0 - alpha) * FRAC_PI_2);
    if arg.abs() > lim + ANGLE_TOL {
        return Err(Error::OutOfRange(format!("|Arg a| = {} exceeds {lim}", arg.abs())));
    }
    let rho = 0.5 - arg / (alpha * PI);
    let k = a.re.powf(1.0 / alpha);
    let (beta, c_up, c_down) = if (alpha - 1.0).abs() < 1e-15 || alpha == 2.0 {
        let beta = if alpha == 2.0 { Some(0.0) } else if a.im == 0.0 { Some(0.0) } else { None };
        (beta, None, None)
    } else {
        let t = (alpha * FRAC_PI_2).tan();
        let beta = -arg.tan() / t;
        // a / s = (c↑ + c↓) cos(απ/2) + i (c↓ − c↑) sin(απ/2), s = ±1
        let s = if alpha < 1.0 { 1.0 } else { -1.0 };
        let (co, si) = ((alpha * FRAC_PI_2).cos(), (alpha * FRAC_PI_2).sin());
        let sum = s * a.re / co;
        let diff = s * a.im / si;
        (Some(beta), Some(0.5 * (sum - diff)), Some(0.5 * (sum + diff)))
    };
    Ok(StableParams {
        alpha,
        rho,
        beta,
        k,
        a,
        c_up,
        c_down,
        theta: -arg / alpha,
        c_abs: a.norm(),
    })
}

/// Converts one stable parametrisation into all the others.
pub fn stable_convert(input: StableInput) -> Result<StableParams> {
    match input {
        StableInput::Beta { alpha, beta, k } => {
            check_alpha(alpha)?;
            if !(-1.0..=1.0).contains(&beta) {
                return Err(Error::OutOfRange(format!("beta = {beta} outside [-1, 1]")));
            }
            if !(k > 0.0) {
                return Err(Error::OutOfRange(format!("k = {k} must be positive")));
            }
            if alpha == 1.0 {
                if beta != 0.0 {
                    return Err(Error::AlphaOneSkewed);
                }
                return from_coefficient(1.0, C64::new(k, 0.0));
            }
            if alpha == 2.0 && beta != 0.0 {
                return Err(Error::OutOfRange("beta must vanish for alpha = 2".into()));
            }
            let t = if alpha == 2.0 { 0.0 } else { (alpha * FRAC_PI_2).tan() };
            let mut p = from_coefficient(alpha, C64::new(1.0, -beta * t) * k.powf(alpha))?;
            p.beta = Some(beta);
            p.k = k;
            Ok(p)
        }
        StableInput::Rho { alpha, rho, k } => {
            check_alpha(alpha)?;
            if !(k > 0.0) {
                return Err(Error::OutOfRange(format!("k = {k} must be positive")));
            }
            let (lo, hi) = if alpha <= 1.0 { (0.0, 1.0) } else { (1.0 - 1.0 / alpha, 1.0 / alpha) };
            if rho < lo - ANGLE_TOL || rho > hi + ANGLE_TOL {
                return Err(Error::OutOfRange(format!("rho = {rho} outside [{lo}, {hi}]")));
            }
            // a = k^α (1 − i tan((2ϱ−1)απ/2)) is singular at |Arg a| = π/2;
            // use the polar form instead.
            let arg = -(rho - 0.5) * alpha * PI;
            if arg.abs() >= FRAC_PI_2 - 1e-15 {
                return Err(Error::OutOfRange(format!(
                    "rho = {rho} gives a degenerate coefficient for alpha = {alpha}"
                )));
            }
            let a = C64::from_polar(k.powf(alpha) / arg.cos(), arg);
            let mut p = from_coefficient(alpha, a)?;
            p.rho = rho;
            p.k = k;
            Ok(p)
        }
        StableInput::Jumps { alpha, c_up, c_down } => {
            check_alpha(alpha)?;
            if alpha == 1.0 || alpha == 2.0 {
                return Err(Error::OutOfRange("jump weights need alpha in (0,1) or (1,2)".into()));
            }
            if !(c_up >= 0.0 && c_down >= 0.0) || c_up + c_down == 0.0 {
                return Err(Error::OutOfRange("jump weights must be nonnegative, not both zero".into()));
            }
            let h = alpha * FRAC_PI_2;
            let mut a = C64::from_polar(c_up, -h) + C64::from_polar(c_down, h);
            if alpha > 1.0 {
                a = -a;
            }
            let mut p = from_coefficient(alpha, a)?;
            p.c_up = Some(c_up);
            p.c_down = Some(c_down);
            Ok(p)
        }
        StableInput::CauchyDrift { c, b } => {
            if !(c >= 0.0) || !b.is_finite() {
                return Err(Error::OutOfRange(format!("need c >= 0 and finite b, got c = {c}, b = {b}")));
            }
            from_coefficient(1.0, C64::new(c, -b))
        }
        StableInput::Coefficient { alpha, a } => from_coefficient(alpha, a),
    }
}

impl StableParams {
    /// Balanced iff |Arg a| < απ/2.
    pub fn is_balanced(&self) -> bool {
        self.a.arg().abs() < self.alpha * FRAC_PI_2 - ANGLE_TOL
    }

    /// The same process with up and down exchanged (ϱ ↦ 1 − ϱ).
    pub fn dual(&self) -> StableParams {
        from_coefficient(self.alpha, self.a.conj()).expect("dual of valid parameters")
    }

    pub fn exponent(&self, xi: C64) -> C64 {
        self.a * cpow(xi, self.alpha)
    }
}

fn cpow(z: C64, a: f64) -> C64 {
    if z.norm() == 0.0 {
        C64::new(0.0, 0.0)
    } else {
        (z.ln() * a).exp()
    }
}

/// Stable parameters as accepted in a [`FunctionSpec`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StableSpec {
    pub alpha: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    /// α = 1: a = c − ib
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_up: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_down: Option<f64>,
}

impl StableSpec {
    pub fn params(&self) -> Result<StableParams> {
        let given = [
            self.rho.is_some(),
            self.beta.is_some(),
            self.c.is_some() || self.b.is_some(),
            self.c_up.is_some() || self.c_down.is_some(),
        ];
        let n = given.iter().filter(|g| **g).count();
        if n > 1 {
            return Err(Error::InvalidSpec(
                "stable: give exactly one of rho, beta, (c, b), (c_up, c_down)".into(),
            ));
        }
        let k = self.k.unwrap_or(1.0);
        let input = if let Some(rho) = self.rho {
            StableInput::Rho { alpha: self.alpha, rho, k }
        } else if let Some(beta) = self.beta {
            StableInput::Beta { alpha: self.alpha, beta, k }
        } else if given[2] {
            if self.alpha != 1.0 {
                return Err(Error::InvalidSpec("stable: (c, b) requires alpha = 1".into()));
            }
            if self.k.is_some() {
                return Err(Error::InvalidSpec("stable: k and c are exclusive".into()));
            }
            StableInput::CauchyDrift { c: self.c.unwrap_or(1.0), b: self.b.unwrap_or(0.0) }
        } else if given[3] {
            if self.k.is_some() {
                return Err(Error::InvalidSpec("stable: k and jump weights are exclusive".into()));
            }
            StableInput::Jumps {
                alpha: self.alpha,
                c_up: self.c_up.unwrap_or(0.0),
                c_down: self.c_down.unwrap_or(0.0),
            }
        } else {
            StableInput::Rho { alpha: self.alpha, rho: 0.5, k }
        };
        stable_convert(input).map_err(|e| InvalidSpecFrom::from(e).0)
    }
}

struct InvalidSpecFrom(Error);

impl From<Error> for InvalidSpecFrom {
    fn from(e: Error) -> Self {
        match e {
            Error::AlphaOneSkewed => InvalidSpecFrom(e),
            other => InvalidSpecFrom(Error::InvalidSpec(format!("stable: {other}"))),
        }
    }
}

/// Serializable description of a Rogers function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    /// ½ξ² − ibξ
    BrownianDrift {
        b: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
    /// aξ^α
    Stable {
        alpha: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rho: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        beta: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        b: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c_up: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c_down: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
    /// aξ^α − i·drift·ξ
    StableWithDrift {
        alpha: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rho: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        beta: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c_up: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c_down: Option<f64>,
        drift: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
    /// −ibξ
    Drift {
        b: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
    /// ξ/(ξ − ai) − ibξ
    RiskProcess {
        a: f64,
        b: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
    Sum {
        terms: Vec<WeightedSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
    Transform {
        kind: String,
        #[serde(default)]
        params: serde_json::Map<String, serde_json::Value>,
        inner: Box<FunctionSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedSpec {
    pub weight: f64,
    pub spec: FunctionSpec,
}

const MAX_DEPTH: usize = 8;

impl FunctionSpec {
    pub fn from_json(s: &str) -> Result<FunctionSpec> {
        serde_json::from_str(s).map_err(|e| Error::InvalidSpec(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }

    pub fn stable(p: &StableParams) -> FunctionSpec {
        if p.alpha == 1.0 {
            FunctionSpec::Stable {
                alpha: 1.0,
                rho: None,
                beta: None,
                k: None,
                c: Some(p.a.re),
                b: Some(-p.a.im),
                c_up: None,
                c_down: None,
                label: None,
            }
        } else {
            FunctionSpec::Stable {
                alpha: p.alpha,
                rho: Some(p.rho),
                beta: None,
                k: Some(p.k),
                c: None,
                b: None,
                c_up: None,
                c_down: None,
                label: None,
            }
        }
    }

    fn depth(&self) -> usize {
        match self {
            FunctionSpec::Sum { terms, .. } => 1 + terms.iter().map(|t| t.spec.depth()).max().unwrap_or(0),
            FunctionSpec::Transform { inner, .. } => 1 + inner.depth(),
            _ => 1,
        }
    }

    fn label(&self) -> Option<&String> {
        match self {
            FunctionSpec::BrownianDrift { label, .. }
            | FunctionSpec::Stable { label, .. }
            | FunctionSpec::StableWithDrift { label, .. }
            | FunctionSpec::Drift { label, .. }
            | FunctionSpec::RiskProcess { label, .. }
            | FunctionSpec::Sum { label, .. }
            | FunctionSpec::Transform { label, .. } => label.as_ref(),
        }
    }

    /// Stable parameters of a pure stable spec.
    pub fn stable_params(&self) -> Result<Option<StableParams>> {
        match self {
            FunctionSpec::Stable { alpha, rho, beta, k, c, b, c_up, c_down, .. } => Ok(Some(
                StableSpec { alpha: *alpha, rho: *rho, beta: *beta, k: *k, c: *c, b: *b, c_up: *c_up, c_down: *c_down }
                    .params()?,
            )),
            _ => Ok(None),
        }
    }
}

fn param_f64(params: &serde_json::Map<String, serde_json::Value>, key: &str) -> Result<Option<f64>> {
    match params.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_f64()
            .map(Some)
            .ok_or_else(|| Error::InvalidSpec(format!("transform parameter {key} must be a number"))),
    }
}

fn require(params: &serde_json::Map<String, serde_json::Value>, key: &str) -> Result<f64> {
    param_f64(params, key)?.ok_or_else(|| Error::InvalidSpec(format!("transform parameter {key} missing")))
}

fn check_keys(params: &serde_json::Map<String, serde_json::Value>, allowed: &[&str]) -> Result<()> {
    for k in params.keys() {
        if !allowed.contains(&k.as_str()) {
            return Err(Error::InvalidSpec(format!("unknown transform parameter {k}")));
        }
    }
    Ok(())
}

/// Parses a transform kind with its parameters.
pub fn parse_transform(kind: &str, params: &serde_json::Map<String, serde_json::Value>) -> Result<Transform> {
    use serde_json::Value;
    let t = match kind {
        "inv_reflect" => {
            check_keys(params, &[])?;
            Transform::InvReflect
        }
        "recip_inv" => {
            check_keys(params, &[])?;
            Transform::RecipInv
        }
        "square_inv" => {
            check_keys(params, &[])?;
            Transform::SquareInv
        }
        "power_sandwich" => {
            check_keys(params, &["alpha"])?;
            Transform::PowerSandwich(require(params, "alpha")?)
        }
        "compose_cbf" => {
            check_keys(params, &["cbf", "beta", "c"])?;
            let name = match params.get("cbf") {
                Some(Value::String(s)) => s.as_str(),
                _ => return Err(Error::InvalidSpec("compose_cbf needs a string parameter cbf".into())),
            };
            match name {
                "power" => Transform::ComposeCbf(Cbf::Power(require(params, "beta")?)),
                "log1p" => Transform::ComposeCbf(Cbf::Log1p),
                "ratio" => Transform::ComposeCbf(Cbf::Ratio(require(params, "c")?)),
                other => return Err(Error::InvalidSpec(format!("unknown cbf {other}"))),
            }
        }
        "bounded_complement" => {
            check_keys(params, &["c"])?;
            Transform::BoundedComplement(require(params, "c")?)
        }
        "translate" => {
            check_keys(params, &["zeta0_im"])?;
            Transform::Translate(C64::new(0.0, require(params, "zeta0_im")?))
        }
        "mobius" => {
            check_keys(params, &["zeta0_im", "zetainf_im"])?;
            Transform::Mobius(
                C64::new(0.0, require(params, "zeta0_im")?),
                param_f64(params, "zetainf_im")?.map(|y| C64::new(0.0, y)),
            )
        }
        other => return Err(Error::InvalidSpec(format!("unknown transform kind {other}"))),
    };
    Ok(t)
}

/// Brownian motion with drift, f(ξ) = ½ξ² − ibξ.
pub fn brownian_drift(b: f64) -> RogersFunction {
    let ib = C64::new(0.0, b);
    let curve: CurveFn = Arc::new(move |r: f64| {
        if r >= b.abs() && r > 0.0 {
            let x = ((r - b.abs()) * (r + b.abs())).sqrt();
            let zp = if x > 0.0 { C64::new(r / x, 0.0) } else { C64::new(f64::INFINITY, 0.0) };
            CurveSample::new(r, C64::new(x, b), 0.5 * r * r, zp, r, false)
        } else {
            let s = if b >= 0.0 { 1.0 } else { -1.0 };
            CurveSample::new(r, C64::new(0.0, r * s), b.abs() * r - 0.5 * r * r, C64::new(0.0, s), b.abs() - r, true)
        }
    });
    let sig = (1.0 + 2.0 * b.abs()).sqrt();
    let (up, down): (FactorFn, FactorFn) = if b >= 0.0 {
        (
            Arc::new(move |z: C64| z * (sig / 2f64.sqrt())),
            Arc::new(move |z: C64| (z + 2.0 * b) / (2f64.sqrt() * sig)),
        )
    } else {
        (
            Arc::new(move |z: C64| (z - 2.0 * b) / (2f64.sqrt() * sig)),
            Arc::new(move |z: C64| z * (sig / 2f64.sqrt())),
        )
    };
    let s1 = (b * b + 2.0).sqrt();
    let pre_up = ((1.0 + s1 + b) / (2.0 * (1.0 + s1 - b))).sqrt();
    let pre_down = ((1.0 + s1 - b) / (2.0 * (1.0 + s1 + b))).sqrt();
    let kup: KappaFn = Arc::new(move |tau: f64, z: C64| (z + (b * b + 2.0 * tau).sqrt() - b) * pre_up);
    let kdown: KappaFn = Arc::new(move |tau: f64, z: C64| (z + (b * b + 2.0 * tau).sqrt() + b) * pre_down);
    RogersFunction::new(format!("brownian_drift(b={b})"), move |z: C64| z * z * 0.5 - ib * z)
        .with_derivative(move |z: C64| z - ib)
        .with_bound(BoundHint::Unbounded)
        .with_closed_forms(ClosedFormData {
            curve: Some(curve),
            wh_up: Some(up),
            wh_down: Some(down),
            kappa_up: Some(kup),
            kappa_down: Some(kdown),
            balanced: Some(b == 0.0),
        })
}

/// Strictly stable exponent f(ξ) = aξ^α.
pub fn stable(p: &StableParams) -> RogersFunction {
    let (a, alpha, rho, c, th) = (p.a, p.alpha, p.rho, p.c_abs, p.theta);
    let e = C64::from_polar(1.0, th);
    let curve: CurveFn = Arc::new(move |r: f64| {
        CurveSample::new(r, e * r, c * r.powf(alpha), e, alpha * c * r.powf(alpha - 1.0), false)
    });
    let sc = c.sqrt();
    let up: FactorFn = Arc::new(move |z: C64| cpow(z, rho * alpha) * sc);
    let down: FactorFn = Arc::new(move |z: C64| cpow(z, (1.0 - rho) * alpha) * sc);
    let mut cf = ClosedFormData {
        curve: Some(curve),
        wh_up: Some(up),
        wh_down: Some(down),
        balanced: Some(p.is_balanced()),
        ..Default::default()
    };
    if alpha == 2.0 {
        let sa = a.re.sqrt();
        cf.kappa_up = Some(Arc::new(move |tau: f64, z: C64| z * sa + tau.sqrt()));
        cf.kappa_down = Some(Arc::new(move |tau: f64, z: C64| z * sa + tau.sqrt()));
    }
    RogersFunction::new(format!("stable(alpha={alpha}, a={a})"), move |z: C64| a * cpow(z, alpha))
        .with_derivative(move |z: C64| a * alpha * cpow(z, alpha - 1.0))
        .with_bound(BoundHint::Unbounded)
        .with_closed_forms(cf)
}

/// Pure drift −ibξ (degenerate).
pub fn drift(b: f64) -> RogersFunction {
    let ib = C64::new(0.0, b);
    RogersFunction::new(format!("drift(b={b})"), move |z: C64| -ib * z)
        .with_derivative(move |_| -ib)
        .with_bound(if b == 0.0 { BoundHint::Bounded(0.0) } else { BoundHint::Unbounded })
}

/// Stable exponent plus drift.
pub fn stable_with_drift(p: &StableParams, b: f64) -> RogersFunction {
    let (a, alpha) = (p.a, p.alpha);
    let ib = C64::new(0.0, b);
    let bal = if b == 0.0 { Some(p.is_balanced()) } else { None };
    RogersFunction::new(format!("stable_with_drift(alpha={alpha}, a={a}, b={b})"), move |z: C64| {
        a * cpow(z, alpha) - ib * z
    })
    .with_derivative(move |z: C64| a * alpha * cpow(z, alpha - 1.0) - ib)
    .with_bound(BoundHint::Unbounded)
    .with_closed_forms(ClosedFormData { balanced: bal, ..Default::default() })
}

/// Classical risk process f(ξ) = ξ/(ξ − ai) − ibξ, a > 0, b ≥ 0.
pub fn risk_process(a: f64, b: f64) -> Result<RogersFunction> {
    if !(a > 0.0) || !(b >= 0.0) {
        return Err(Error::InvalidSpec(format!("risk_process: need a > 0 and b >= 0, got a = {a}, b = {b}")));
    }
    let ia = C64::new(0.0, a);
    let ib = C64::new(0.0, b);
    let f = move |z: C64| z / (z - ia) - ib * z;
    let df = move |z: C64| -ia / ((z - ia) * (z - ia)) - ib;
    // Curve: for b > 0 the circle x² + (y − a)² = a/b, on iℝ elsewhere.
    let curve: CurveFn = Arc::new(move |r: f64| {
        let on_axis = |r: f64| {
            if b > 0.0 {
                // Im f < 0 on the whole half-circle: ζ = ir
                let z = C64::new(0.0, r);
                let lam = f(z).re;
                let lp = (df(z) * C64::new(0.0, 1.0)).re;
                CurveSample::new(r, z, lam, C64::new(0.0, 1.0), lp, true)
            } else {
                let z = C64::new(0.0, -r);
                let lam = f(z).re;
                let lp = (df(z) * C64::new(0.0, -1.0)).re;
                CurveSample::new(r, z, lam, C64::new(0.0, -1.0), lp, true)
            }
        };
        if b == 0.0 {
            return on_axis(r);
        }
        let y = (r * r + a * a - a / b) / (2.0 * a);
        let x2 = r * r - y * y;
        if x2 <= 0.0 {
            return on_axis(r);
        }
        let x = x2.sqrt();
        let dy = r / a;
        let dx = (r - y * dy) / x;
        let z = C64::new(x, y);
        let zp = C64::new(dx, dy);
        let lam = f(z).re;
        let lp = (df(z) * zp).re;
        CurveSample::new(r, z, lam, zp, lp, false)
    });
    let mut cf = ClosedFormData { curve: Some(curve), balanced: Some(false), ..Default::default() };
    if b > 0.0 {
        // f(ξ) = b(−iξ)(iξ + a − 1/b)/(iξ + a)
        let c = a - 1.0 / b;
        let (u, d): (FactorFn, FactorFn) = if c >= 0.0 {
            (Arc::new(|z: C64| z), Arc::new(move |z: C64| (z + c) * b / (z + a)))
        } else {
            (Arc::new(move |z: C64| z - c), Arc::new(move |z: C64| z * b / (z + a)))
        };
        let k = (d(C64::new(1.0, 0.0)).re / u(C64::new(1.0, 0.0)).re).sqrt();
        let (u2, d2) = (u.clone(), d.clone());
        cf.wh_up = Some(Arc::new(move |z| u2(z) * k));
        cf.wh_down = Some(Arc::new(move |z| d2(z) / k));
        // f + τ = b(w₊ − iξ)(iξ + w₋)/(iξ + a)
        let roots = move |tau: f64| {
            let p = 1.0 - a * b + tau;
            let disc = (p * p + 4.0 * a * b * tau).sqrt();
            let wp = if p >= 0.0 { (p + disc) / (2.0 * b) } else { 2.0 * a * tau / (disc - p) };
            let wm = if p >= 0.0 { 2.0 * a * tau / (p + disc) } else { (disc - p) / (2.0 * b) };
            (wp, wm)
        };
        let (wp1, wm1) = roots(1.0);
        let c1 = ((1.0 + wm1) * b / ((1.0 + a) * (1.0 + wp1))).sqrt();
        cf.kappa_up = Some(Arc::new(move |tau: f64, z: C64| (z + roots(tau).0) * c1));
        cf.kappa_down = Some(Arc::new(move |tau: f64, z: C64| (z + roots(tau).1) * b / ((z + a) * c1)));
    } else {
        cf.wh_up = Some(Arc::new(move |_| C64::new((1.0 / (1.0 + a)).sqrt(), 0.0)));
        cf.wh_down = Some(Arc::new(move |z: C64| z / (z + a) * (1.0 + a).sqrt()));
    }
    let bound = if b == 0.0 { BoundHint::Bounded(1.0) } else { BoundHint::Unbounded };
    Ok(RogersFunction::new(format!("risk_process(a={a}, b={b})"), f)
        .with_derivative(df)
        .with_bound(bound)
        .with_closed_forms(cf))
}

/// Builds the Rogers function described by a spec.
pub fn make(spec: &FunctionSpec) -> Result<RogersFunction> {
    if spec.depth() > MAX_DEPTH {
        return Err(Error::InvalidSpec(format!("nesting deeper than {MAX_DEPTH}")));
    }
    let finite = |name: &str, v: f64| -> Result<()> {
        if v.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidSpec(format!("{name} must be finite")))
        }
    };
    let f = match spec {
        FunctionSpec::BrownianDrift { b, .. } => {
            finite("b", *b)?;
            brownian_drift(*b)
        }
        FunctionSpec::Stable { .. } => stable(&spec.stable_params()?.expect("stable spec")),
        FunctionSpec::StableWithDrift { alpha, rho, beta, k, c_up, c_down, drift: d, .. } => {
            finite("drift", *d)?;
            let p = StableSpec {
                alpha: *alpha,
                rho: *rho,
                beta: *beta,
                k: *k,
                c: None,
                b: None,
                c_up: *c_up,
                c_down: *c_down,
            }
            .params()?;
            stable_with_drift(&p, *d)
        }
        FunctionSpec::Drift { b, .. } => {
            finite("b", *b)?;
            drift(*b)
        }
        FunctionSpec::RiskProcess { a, b, .. } => risk_process(*a, *b)?,
        FunctionSpec::Sum { terms, .. } => {
            if terms.is_empty() {
                return Err(Error::InvalidSpec("sum needs at least one term".into()));
            }
            let mut parts = Vec::with_capacity(terms.len());
            for t in terms {
                if !(t.weight >= 0.0) || !t.weight.is_finite() {
                    return Err(Error::InvalidSpec(format!("sum weight {} must be finite and >= 0", t.weight)));
                }
                parts.push((t.weight, make(&t.spec)?));
            }
            RogersFunction::sum(&parts)?
        }
        FunctionSpec::Transform { kind, params, inner, .. } => {
            let t = parse_transform(kind, params)?;
            let g = make(inner)?;
            transform(&g, t).map_err(|e| Error::InvalidSpec(format!("transform {kind}: {e}")))?
        }
    };
    Ok(match spec.label() {
        Some(l) => f.with_label(l.clone()),
        None => f,
    })
}

/// Attached closed forms (empty for sums and transforms).
pub fn closed_forms(f: &RogersFunction) -> ClosedFormData {
    f.closed_forms().clone()
}
