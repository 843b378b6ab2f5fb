//! Numerical integration, limit extrapolation and special functions.
//!
//! All integrals go through one adaptive Gauss–Kronrod (7/15) engine working
//! on a list of mapped segments. Half-line integrals use logarithmic maps, so
//! both `r -> 0` and `r -> inf` are resolved on a geometric scale.

use crate::error::{Error, Result};
use crate::C64;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

/// Tolerances and limits for the adaptive rules.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Excision half-widths for principal values, relative to the excision
    /// window; strictly decreasing.
    pub pv_epsilon_ladder: Vec<f64>,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            rel_tol: 1e-10,
            abs_tol: 1e-13,
            max_subdivisions: 2000,
            pv_epsilon_ladder: vec![1e-2, 1e-3, 1e-4, 1e-5],
        }
    }
}

impl QuadOptions {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(Error::OutOfRange("tolerances must be positive".into()));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::OutOfRange("max_subdivisions must be positive".into()));
        }
        let l = &self.pv_epsilon_ladder;
        if l.iter().any(|&e| !(e > 0.0)) || l.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::OutOfRange(
                "pv ladder must be positive and strictly decreasing".into(),
            ));
        }
        Ok(())
    }
}

/// Value of an integral with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: C64,
    pub err_estimate: f64,
    pub converged: bool,
    pub evaluations: usize,
}

impl QuadResult {
    pub fn re(&self) -> f64 {
        self.value.re
    }

    /// Converts a failed quadrature into [`Error::NonConvergent`].
    pub fn require(self, context: &str) -> Result<QuadResult> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NonConvergent {
                context: context.to_string(),
                err: self.err_estimate,
            })
        }
    }

    /// Sum of two results; convergence is the conjunction.
    pub fn combine(self, other: QuadResult) -> QuadResult {
        QuadResult {
            value: self.value + other.value,
            err_estimate: self.err_estimate + other.err_estimate,
            converged: self.converged && other.converged,
            evaluations: self.evaluations + other.evaluations,
        }
    }
}

// Kronrod 15-point abscissae/weights and the embedded 7-point Gauss weights.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Change of variables applied on a segment.
#[derive(Debug, Clone, Copy)]
enum Map {
    Identity,
    /// r = e^x
    Log,
    /// x in [0,1), r = p exp(-x/(1-x))
    Lower(f64),
    /// x in [0,1), r = p exp(x/(1-x))
    Upper(f64),
}

impl Map {
    #[inline]
    fn apply(self, x: f64) -> Option<(f64, f64)> {
        let (r, jac) = match self {
            Map::Identity => (x, 1.0),
            Map::Log => {
                let r = x.exp();
                (r, r)
            }
            Map::Lower(p) => {
                let om = 1.0 - x;
                let r = p * (-x / om).exp();
                (r, r / (om * om))
            }
            Map::Upper(p) => {
                let om = 1.0 - x;
                let r = p * (x / om).exp();
                (r, r / (om * om))
            }
        };
        if matches!(self, Map::Identity) {
            return Some((r, jac));
        }
        if r > 1e-290 && r < 1e290 && jac.is_finite() {
            Some((r, jac))
        } else {
            None
        }
    }
}

struct Segment {
    map: Map,
    a: f64,
    b: f64,
    value: C64,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn gk15<F: Fn(f64) -> C64 + ?Sized>(g: &F, map: Map, a: f64, b: f64) -> (C64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let eval = |x: f64| -> C64 {
        match map.apply(x) {
            Some((r, jac)) => {
                let v = g(r) * jac;
                if v.re.is_finite() && v.im.is_finite() {
                    v
                } else if matches!(map, Map::Identity) {
                    v
                } else {
                    // Far tails of a mapped half-line: the integrand has
                    // under- or overflowed, its contribution is nil.
                    if r < 1e-100 || r > 1e100 {
                        C64::new(0.0, 0.0)
                    } else {
                        v
                    }
                }
            }
            None => C64::new(0.0, 0.0),
        }
    };
    let fc = eval(c);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    let mut resabs = fc.norm() * WGK[7];
    let mut fv1 = [C64::new(0.0, 0.0); 7];
    let mut fv2 = [C64::new(0.0, 0.0); 7];
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = eval(c - dx);
        let f2 = eval(c + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += (f1 + f2) * WGK[j];
        resabs += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            resg += (f1 + f2) * WG[j / 2];
        }
    }
    let mean = resk * 0.5;
    let mut resasc = WGK[7] * (fc - mean).norm();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - mean).norm() + (fv2[j] - mean).norm());
    }
    let habs = h.abs();
    let value = resk * h;
    let resabs = resabs * habs;
    let resasc = resasc * habs;
    let mut err = ((resk - resg) * h).norm();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    if !(value.re.is_finite() && value.im.is_finite()) {
        err = f64::INFINITY;
    }
    (value, err)
}

fn adapt<F: Fn(f64) -> C64 + ?Sized>(
    g: &F,
    pieces: &[(Map, f64, f64)],
    opts: &QuadOptions,
) -> QuadResult {
    let mut heap = BinaryHeap::new();
    let mut done: Vec<Segment> = Vec::new();
    let mut evals = 0usize;
    for &(map, a, b) in pieces {
        if a == b {
            continue;
        }
        let (value, err) = gk15(g, map, a, b);
        evals += 15;
        heap.push(Segment { map, a, b, value, err });
    }
    let total = |heap: &BinaryHeap<Segment>, done: &[Segment]| -> (C64, f64) {
        let mut v = C64::new(0.0, 0.0);
        let mut e = 0.0;
        for s in heap.iter().chain(done.iter()) {
            v += s.value;
            e += s.err;
        }
        (v, e)
    };
    let mut n_segments = heap.len();
    let (mut value, mut err) = total(&heap, &done);
    let mut iter = 0usize;
    loop {
        let tol = opts.abs_tol.max(opts.rel_tol * value.norm());
        if err <= tol || !err.is_finite() && iter > 0 && err.is_nan() {
            break;
        }
        if n_segments >= opts.max_subdivisions {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        let width = (worst.b - worst.a).abs();
        if width <= 4.0 * f64::EPSILON * worst.a.abs().max(worst.b.abs()).max(f64::MIN_POSITIVE)
            || mid == worst.a
            || mid == worst.b
        {
            done.push(worst);
        } else {
            let (v1, e1) = gk15(g, worst.map, worst.a, mid);
            let (v2, e2) = gk15(g, worst.map, mid, worst.b);
            evals += 30;
            n_segments += 1;
            value += v1 + v2 - worst.value;
            err += e1 + e2 - worst.err;
            heap.push(Segment { map: worst.map, a: worst.a, b: mid, value: v1, err: e1 });
            heap.push(Segment { map: worst.map, a: mid, b: worst.b, value: v2, err: e2 });
        }
        iter += 1;
        if iter % 64 == 0 {
            let t = total(&heap, &done);
            value = t.0;
            err = t.1;
        }
        if heap.is_empty() {
            break;
        }
    }
    let (value, err) = total(&heap, &done);
    let tol = opts.abs_tol.max(opts.rel_tol * value.norm());
    QuadResult {
        value,
        err_estimate: err,
        converged: err.is_finite() && err <= tol,
        evaluations: evals,
    }
}

/// ∫_a^b g(x) dx over a finite interval.
pub fn integrate<F: Fn(f64) -> C64 + ?Sized>(g: &F, a: f64, b: f64, opts: &QuadOptions) -> QuadResult {
    adapt(g, &[(Map::Identity, a, b)], opts)
}

/// Real-valued convenience wrapper around [`integrate`].
pub fn integrate_real<F: Fn(f64) -> f64 + ?Sized>(g: &F, a: f64, b: f64, opts: &QuadOptions) -> QuadResult {
    let h = |x: f64| C64::new(g(x), 0.0);
    integrate(&h, a, b, opts)
}

fn clean_splits(splits: &[f64]) -> Vec<f64> {
    let mut p: Vec<f64> = splits.iter().copied().filter(|x| x.is_finite() && *x > 0.0).collect();
    p.sort_by(|a, b| a.total_cmp(b));
    p.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
    if p.is_empty() {
        p.push(1.0);
    }
    p
}

// Tail segments pre-split at s = 1, 3, 7, 15 in the logarithmic variable.
const TAIL_CUTS: [f64; 6] = [0.0, 0.5, 0.75, 0.875, 0.9375, 1.0];

fn halfline_pieces(splits: &[f64]) -> Vec<(Map, f64, f64)> {
    let p = clean_splits(splits);
    let mut pieces = Vec::new();
    for w in TAIL_CUTS.windows(2) {
        pieces.push((Map::Lower(p[0]), w[0], w[1]));
    }
    for w in p.windows(2) {
        let (la, lb) = (w[0].ln(), w[1].ln());
        let n = ((lb - la).ceil() as usize).clamp(1, 24);
        let h = (lb - la) / n as f64;
        for k in 0..n {
            let a = la + h * k as f64;
            let b = if k + 1 == n { lb } else { la + h * (k + 1) as f64 };
            pieces.push((Map::Log, a, b));
        }
    }
    let last = *p.last().unwrap();
    for w in TAIL_CUTS.windows(2) {
        pieces.push((Map::Upper(last), w[0], w[1]));
    }
    pieces
}

/// ∫_0^∞ g(r) dr, split at the declared points (and at r = 1 when none is given).
///
/// Panels use r = e^s between split points and r = p·exp(±x/(1-x)) on the two
/// tails, so integrable power or logarithmic endpoint behaviour is resolved.
pub fn integrate_halfline<F: Fn(f64) -> C64 + ?Sized>(g: &F, splits: &[f64], opts: &QuadOptions) -> QuadResult {
    adapt(g, &halfline_pieces(splits), opts)
}

/// Real-valued convenience wrapper around [`integrate_halfline`].
pub fn integrate_halfline_real<F: Fn(f64) -> f64 + ?Sized>(g: &F, splits: &[f64], opts: &QuadOptions) -> QuadResult {
    let h = |x: f64| C64::new(g(x), 0.0);
    integrate_halfline(&h, splits, opts)
}

/// ∫_a^∞ g(r) dr for a > 0 (upper tail only).
pub fn integrate_tail<F: Fn(f64) -> C64 + ?Sized>(g: &F, a: f64, opts: &QuadOptions) -> QuadResult {
    let pieces: Vec<_> = TAIL_CUTS.windows(2).map(|w| (Map::Upper(a), w[0], w[1])).collect();
    adapt(g, &pieces, opts)
}

/// ∫_0^b g(r) dr for b > 0 (lower tail only).
pub fn integrate_head<F: Fn(f64) -> C64 + ?Sized>(g: &F, b: f64, opts: &QuadOptions) -> QuadResult {
    let pieces: Vec<_> = TAIL_CUTS.windows(2).map(|w| (Map::Lower(b), w[0], w[1])).collect();
    adapt(g, &pieces, opts)
}

/// Cauchy principal value of ∫_a^b g(v) dv with a simple pole at `s0`.
///
/// `b` may be `f64::INFINITY`; `a = 0` is treated as a possibly singular
/// endpoint. Around the pole the symmetric combination g(s0-t) + g(s0+t) is
/// integrated over (ε, E) for every ε of the ladder (relative to the window
/// half-width E) and the results are extrapolated to ε = 0.
pub fn integrate_pv<F: Fn(f64) -> C64 + ?Sized>(
    g: &F,
    a: f64,
    b: f64,
    s0: f64,
    opts: &QuadOptions,
) -> Result<QuadResult> {
    if !(s0 > a && s0 < b) {
        return Err(Error::DomainViolation(format!("pole {s0} outside ({a}, {b})")));
    }
    opts.validate()?;
    let mut e = s0 - a;
    if b.is_finite() {
        e = e.min(b - s0);
    }
    e *= 0.5;
    let lo = s0 - e;
    let hi = s0 + e;
    let mut outer = if a == 0.0 {
        integrate_head(g, lo, opts)
    } else {
        integrate(g, a, lo, opts)
    };
    let upper = if b.is_finite() {
        integrate(g, hi, b, opts)
    } else {
        integrate_tail(g, hi, opts)
    };
    outer = outer.combine(upper);

    let sym = |t: f64| g(s0 - t) + g(s0 + t);
    let mut acc = C64::new(0.0, 0.0);
    let mut prev = e;
    let mut seq = Vec::with_capacity(opts.pv_epsilon_ladder.len());
    let mut inner_err = 0.0;
    let mut converged = outer.converged;
    let mut evals = outer.evaluations;
    for &rel in &opts.pv_epsilon_ladder {
        let eps = rel * e;
        let piece = integrate(&sym, eps, prev, opts);
        acc += piece.value;
        inner_err += piece.err_estimate;
        converged &= piece.converged;
        evals += piece.evaluations;
        seq.push((eps, acc));
        prev = eps;
    }
    let ext = if seq.len() >= 3 {
        extrapolate_limit(&seq)?
    } else {
        Extrapolated { value: acc, err: 0.0 }
    };
    let value = outer.value + ext.value;
    let err = outer.err_estimate + inner_err + ext.err;
    let tol = opts.abs_tol.max(opts.rel_tol * value.norm()).max(1e3 * f64::EPSILON * value.norm());
    Ok(QuadResult {
        value,
        err_estimate: err,
        converged: converged && (ext.err <= 10.0 * tol || ext.err <= 1e-9 * value.norm().max(1.0)),
        evaluations: evals,
    })
}

/// Extrapolated limit with the disagreement of the last two extrapolants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolated {
    pub value: C64,
    pub err: f64,
}

fn neville_at_zero(pts: &[(f64, C64)]) -> C64 {
    let n = pts.len();
    let mut p: Vec<C64> = pts.iter().map(|&(_, v)| v).collect();
    for m in 1..n {
        for i in 0..n - m {
            let (hi, hj) = (pts[i].0, pts[i + m].0);
            p[i] = (p[i + 1] * hi - p[i] * hj) / (hi - hj);
        }
    }
    p[0]
}

/// Polynomial (Richardson) extrapolation of `(h, value)` pairs to h = 0.
///
/// The parameter must approach 0 monotonically; limits at infinity are
/// handled by passing h = 1/η.
pub fn extrapolate_limit(seq: &[(f64, C64)]) -> Result<Extrapolated> {
    if seq.len() < 3 {
        return Err(Error::InsufficientData(seq.len()));
    }
    let dec = seq.windows(2).all(|w| w[1].0.abs() < w[0].0.abs());
    if !dec {
        return Err(Error::DomainViolation(
            "extrapolation parameter must move monotonically toward 0".into(),
        ));
    }
    let full = neville_at_zero(seq);
    let coarse = neville_at_zero(&seq[..seq.len() - 1]);
    Ok(Extrapolated { value: full, err: (full - coarse).norm() })
}

/// Bernoulli numbers B_0..B_28 (B_1 = -1/2, odd ones above 1 vanish).
const BERNOULLI: [f64; 29] = [
    1.0,
    -0.5,
    1.0 / 6.0,
    0.0,
    -1.0 / 30.0,
    0.0,
    1.0 / 42.0,
    0.0,
    -1.0 / 30.0,
    0.0,
    5.0 / 66.0,
    0.0,
    -691.0 / 2730.0,
    0.0,
    7.0 / 6.0,
    0.0,
    -3617.0 / 510.0,
    0.0,
    43867.0 / 798.0,
    0.0,
    -174611.0 / 330.0,
    0.0,
    854513.0 / 138.0,
    0.0,
    -236364091.0 / 2730.0,
    0.0,
    8553103.0 / 6.0,
    0.0,
    -23749461029.0 / 870.0,
];

/// Principal branch of the dilogarithm Li₂(z) = -∫_0^z log(1-t)/t dt.
pub fn dilog(z: C64) -> Result<C64> {
    let pi2_6 = PI * PI / 6.0;
    if z.im == 0.0 && z.re > 1.0 {
        return Err(Error::BranchCut(format!("{z}")));
    }
    if z == C64::new(0.0, 0.0) {
        return Ok(z);
    }
    if z == C64::new(1.0, 0.0) {
        return Ok(C64::new(pi2_6, 0.0));
    }
    Ok(dilog_unchecked(z))
}

fn dilog_unchecked(z: C64) -> C64 {
    let pi2_6 = PI * PI / 6.0;
    let one = C64::new(1.0, 0.0);
    if z.norm_sqr() > 1.0 {
        // Inversion: Li(z) = -Li(1/z) - π²/6 - ½ log²(-z).
        let l = (-z).ln();
        return -dilog_unchecked(one / z) - pi2_6 - 0.5 * l * l;
    }
    if z.re > 0.5 {
        // Reflection: Li(z) = -Li(1-z) + π²/6 - log z log(1-z).
        let w = one - z;
        if w.norm() == 0.0 {
            return C64::new(pi2_6, 0.0);
        }
        return -dilog_unchecked(w) + pi2_6 - z.ln() * w.ln();
    }
    // Bernoulli series in u = -log(1-z), |u| small here.
    let u = -(one - z).ln();
    let mut term = u;
    let mut sum = C64::new(0.0, 0.0);
    let mut fact = 1.0;
    for (n, &b) in BERNOULLI.iter().enumerate() {
        // term = u^{n+1}, fact = (n+1)!
        fact *= (n + 1) as f64;
        if b != 0.0 {
            sum += term * (b / fact);
        }
        term *= u;
    }
    sum
}

/// Continuous branch of log along an ordered sample path.
///
/// The output starts at the principal log of the first sample and differs
/// from the principal log pointwise by integer multiples of 2πi.
pub fn continuous_log_samples(values: &[C64]) -> Result<Vec<C64>> {
    let mut out = Vec::with_capacity(values.len());
    let Some(&first) = values.first() else {
        return Ok(out);
    };
    if first.norm() == 0.0 {
        return Err(Error::PathTooCoarse { index: 0 });
    }
    out.push(first.ln());
    for k in 1..values.len() {
        let (prev, cur) = (values[k - 1], values[k]);
        if cur.norm() == 0.0 {
            return Err(Error::PathTooCoarse { index: k - 1 });
        }
        let step = (cur / prev).arg();
        if step.abs() > 0.95 * PI {
            return Err(Error::PathTooCoarse { index: k - 1 });
        }
        let im = out[k - 1].im + step;
        out.push(C64::new(cur.norm().ln(), im));
    }
    Ok(out)
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    statrs::function::erf::erfc(x)
}

/// e^{x²} erfc(x), stable for large positive x.
pub fn erfcx(x: f64) -> f64 {
    if x < 25.0 {
        (x * x).exp() * erfc(x)
    } else {
        // Asymptotic series, ample at this range.
        let x2 = x * x;
        let mut s = 1.0;
        let mut t = 1.0;
        for k in 1..8 {
            t *= -((2 * k - 1) as f64) / (2.0 * x2);
            s += t;
        }
        s / (x * PI.sqrt())
    }
}

/// Gamma function on the real line (reflection below 1/2).
pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}
