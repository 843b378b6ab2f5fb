use crate::table::{Cell, Table};
use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;
use rogers_core::curve::{classify_balance, curve_grid, grid_rows};
use rogers_core::fluct::{extreme_laplace, stable1_sup_density, stable_sup_laplace};
use rogers_core::mc::mc_sup;
use rogers_core::quad::QuadOptions;
use rogers_core::rogers::{cbf_grid, check_cbf, check_rogers, standard_grid};
use rogers_core::wh::{wh_factor, wh_ratio};
use rogers_core::xwh::{kappa, xwh_integral_identity};
use rogers_core::{Balance, CurveGrid, Error, FunctionSpec, McConfig, RogersFunction, Side, StableParams, SupremumQuery, C64};

/// Inputs shared by all subcommands once flags are parsed.
pub struct Job {
    pub spec: FunctionSpec,
    pub f: RogersFunction,
    pub opts: QuadOptions,
    pub grid: Option<(f64, f64, usize)>,
    pub tau: Vec<f64>,
    pub xi: Vec<f64>,
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    pub side: Side,
    pub seed: u64,
    pub paths: usize,
    pub steps: usize,
}

/// Some(v) on success, None when the cell did not converge; any other
/// library error is a bad request.
fn cell<T>(r: rogers_core::Result<T>, what: &str) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::NonConvergent { .. }) => Ok(None),
        Err(e) => Err(anyhow!("{what}: {e}")),
    }
}

fn par_rows<I, F>(items: &[I], f: F) -> Result<Vec<Vec<Cell>>>
where
    I: Sync,
    F: Fn(&I) -> Result<Vec<Cell>> + Sync,
{
    items.par_iter().map(|i| f(i)).collect()
}

fn pairs(a: &[f64], b: &[f64]) -> Vec<(f64, f64)> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| (x, y))).collect()
}

fn nan_row(n: usize) -> Vec<Cell> {
    vec![Cell::Num(f64::NAN); n]
}

fn finish(mut t: Table) -> Table {
    let k = t.columns.iter().position(|c| *c == "converged").expect("converged column");
    t.failed = t.rows.iter().any(|r| r[k] == Cell::Bool(false));
    t
}

fn log_grid(g: (f64, f64, usize)) -> Result<Vec<f64>> {
    let (a, b, n) = g;
    if !(a > 0.0 && b > a && b.is_finite() && n >= 2) {
        bail!("grid needs 0 < rmin < rmax and n >= 2");
    }
    Ok((0..n).map(|k| (a.ln() + (b / a).ln() * k as f64 / (n - 1) as f64).exp()).collect())
}

fn side_name(s: Side) -> &'static str {
    match s {
        Side::Up => "up",
        Side::Down => "down",
    }
}

fn stable_params(job: &Job) -> Result<StableParams> {
    job.spec
        .stable_params()
        .map_err(|e| anyhow!("{e}"))?
        .ok_or_else(|| anyhow!("this command needs a spec with family \"stable\""))
}

impl Job {
    fn curve(&self, default: (f64, f64, usize)) -> Result<CurveGrid> {
        let (a, b, n) = self.grid.unwrap_or(default);
        curve_grid(&self.f, a, b, n).context("curve grid")
    }
}

pub fn eval(job: &Job) -> Result<Table> {
    let mut t = Table::new("eval", &["r", "f_re", "f_im", "converged"]);
    for r in log_grid(job.grid.unwrap_or((1e-2, 1e2, 64)))? {
        let v = job.f.at_real(r);
        let ok = v.re.is_finite() && v.im.is_finite();
        t.push(vec![r.into(), v.re.into(), v.im.into(), ok.into()]);
    }
    Ok(finish(t))
}

pub fn curve(job: &Job) -> Result<Table> {
    let g = job.curve((1e-2, 1e2, 64))?;
    let mut t = Table::new(
        "curve",
        &[
            "r",
            "zeta_re",
            "zeta_im",
            "lambda",
            "lambda_prime",
            "zeta_prime_re",
            "zeta_prime_im",
            "on_axis",
            "arg_zeta",
            "converged",
        ],
    );
    for (row, s) in grid_rows(&g).iter().zip(&g.samples) {
        let mut cells: Vec<Cell> = row[..7].iter().map(|&x| x.into()).collect();
        cells.push((row[7] != 0.0).into());
        cells.push(s.arg_zeta.into());
        cells.push(true.into());
        t.push(cells);
    }
    Ok(finish(t))
}

pub fn wh(job: &Job) -> Result<Table> {
    let cols = [
        "xi",
        "up_re",
        "up_im",
        "down_re",
        "down_im",
        "ratio_up_re",
        "ratio_up_im",
        "ratio_down_re",
        "ratio_down_im",
        "err",
        "converged",
    ];
    let mut t = Table::new("wh", &cols);
    let one = C64::new(1.0, 0.0);
    t.rows = par_rows(&job.xi, |&xi| {
        let z = C64::new(xi, 0.0);
        let vals = [
            wh_factor(&job.f, Side::Up, z, &job.opts),
            wh_factor(&job.f, Side::Down, z, &job.opts),
            wh_ratio(&job.f, Side::Up, z, one, &job.opts),
            wh_ratio(&job.f, Side::Down, z, one, &job.opts),
        ];
        let mut row = vec![xi.into()];
        let (mut err, mut ok) = (0.0f64, true);
        for v in vals {
            match cell(v, "wh")? {
                Some(w) => {
                    row.push(w.value.re.into());
                    row.push(w.value.im.into());
                    err = err.max(w.err / w.value.norm());
                    ok &= w.converged;
                }
                None => {
                    row.extend(nan_row(2));
                    ok = false;
                }
            }
        }
        row.push(err.into());
        row.push(ok.into());
        Ok(row)
    })?;
    Ok(finish(t))
}

pub fn kappa_table(job: &Job) -> Result<Table> {
    let cols =
        ["tau", "xi", "kappa_up_re", "kappa_up_im", "kappa_down_re", "kappa_down_im", "kappa_dot", "err", "converged"];
    let mut t = Table::new("kappa", &cols);
    t.rows = par_rows(&pairs(&job.tau, &job.xi), |&(tau, xi)| {
        let mut row = vec![tau.into(), xi.into()];
        match cell(kappa(&job.f, tau, C64::new(xi, 0.0), &job.opts), "kappa")? {
            Some(k) => {
                for x in [k.kappa_up.re, k.kappa_up.im, k.kappa_down.re, k.kappa_down.im, k.kappa_dot.re, k.err] {
                    row.push(x.into());
                }
                row.push(true.into());
            }
            None => {
                row.extend(nan_row(6));
                row.push(false.into());
            }
        }
        Ok(row)
    })?;
    Ok(finish(t))
}

fn estimate_row(head: Vec<Cell>, e: Option<rogers_core::Estimate>) -> Vec<Cell> {
    let mut row = head;
    match e {
        Some(e) => row.extend([e.value.into(), e.err.into(), true.into()]),
        None => row.extend([f64::NAN.into(), f64::NAN.into(), false.into()]),
    }
    row
}

pub fn sup(job: &Job) -> Result<Table> {
    let g = job.curve((1e-4, 1e4, 64))?;
    let mut t = Table::new("sup", &["side", "t", "xi", "value", "err", "converged"]);
    let side = side_name(job.side);
    t.rows = par_rows(&pairs(&job.t, &job.xi), |&(tt, xi)| {
        let q = SupremumQuery::new(job.side, tt, xi).map_err(|e| anyhow!("{e}"))?;
        let e = cell(extreme_laplace(&job.f, q, &g, &job.opts), "sup")?;
        Ok(estimate_row(vec![side.into(), tt.into(), xi.into()], e))
    })?;
    Ok(finish(t))
}

pub fn stable_sup(job: &Job) -> Result<Table> {
    let p = stable_params(job)?;
    let side = side_name(job.side);
    if !job.x.is_empty() {
        let mut t = Table::new("stable-sup", &["side", "t", "x", "density", "err", "converged"]);
        t.rows = par_rows(&pairs(&job.t, &job.x), |&(tt, x)| {
            let e = cell(stable1_sup_density(&p, job.side, tt, x, &job.opts), "stable-sup")?;
            Ok(estimate_row(vec![side.into(), tt.into(), x.into()], e))
        })?;
        return Ok(finish(t));
    }
    let mut t = Table::new("stable-sup", &["side", "t", "xi", "value", "err", "converged"]);
    t.rows = par_rows(&pairs(&job.t, &job.xi), |&(tt, xi)| {
        let e = cell(stable_sup_laplace(&p, job.side, tt, xi, &job.opts), "stable-sup")?;
        Ok(estimate_row(vec![side.into(), tt.into(), xi.into()], e))
    })?;
    Ok(finish(t))
}

pub fn mc(job: &Job) -> Result<Table> {
    let p = stable_params(job)?;
    let [tt] = job.t[..] else { bail!("mc takes exactly one --t value") };
    let cfg = McConfig {
        side: job.side,
        t: tt,
        n_paths: job.paths,
        n_steps: job.steps,
        seed: job.seed,
        xi: job.xi.clone(),
        x: job.x.clone(),
    };
    let s = mc_sup(&p, &cfg).map_err(|e| anyhow!("mc: {e}"))?;
    let mut t = Table::new("mc", &["side", "quantity", "point", "value", "stderr", "paths", "steps", "converged"]);
    let side = side_name(job.side);
    let meta = |q: &str, pt: f64, v: f64, se: f64| {
        vec![
            side.into(),
            q.into(),
            pt.into(),
            v.into(),
            se.into(),
            Cell::Int(s.n_paths as u64),
            Cell::Int(s.n_steps as u64),
            true.into(),
        ]
    };
    for e in &s.estimates {
        t.push(meta("laplace", e.xi, e.value, e.stderr));
    }
    for e in &s.cdf {
        t.push(meta("cdf", e.x, e.value, e.stderr));
    }
    Ok(finish(t))
}

struct Check {
    name: &'static str,
    status: &'static str,
    value: f64,
    tol: f64,
}

impl Check {
    fn of(name: &'static str, value: f64, tol: f64) -> Check {
        Check { name, status: if value <= tol { "pass" } else { "fail" }, value, tol }
    }

    fn flagged(name: &'static str, tol: f64) -> Check {
        Check { name, status: "fail", value: f64::NAN, tol }
    }
}

fn rel(a: C64, b: C64) -> f64 {
    let d = (a - b).norm() / b.norm();
    if d.is_nan() {
        f64::INFINITY
    } else {
        d
    }
}

/// Worst relative error over a set of cells, or None if a cell did not
/// converge.
fn worst<F: Fn(f64) -> rogers_core::Result<f64> + Sync>(pts: &[f64], f: F) -> Result<Option<f64>> {
    let v: Vec<Option<f64>> =
        pts.par_iter().map(|&x| cell(f(x), "check")).collect::<Result<Vec<_>>>()?;
    Ok(v.into_iter().try_fold(0.0f64, |m, e| e.map(|e| m.max(e))))
}

pub fn check(job: &Job) -> Result<Table> {
    let f = &job.f;
    let o = &job.opts;
    let ladder = [1e-2, 0.1, 0.5, 1.0, 3.0, 10.0, 100.0];
    let mut out = Vec::new();

    let r = check_rogers(f, &standard_grid(), 1e-8);
    out.push(Check::of("rogers_property", r.max_violation, 1e-8));

    let fact = worst(&ladder, |x| {
        let up = wh_factor(f, Side::Up, C64::new(0.0, -x), o)?.require("factor")?;
        let down = wh_factor(f, Side::Down, C64::new(0.0, x), o)?.require("factor")?;
        Ok(rel(up.value * down.value, f.at_real(x)))
    })?;
    out.push(fact.map_or(Check::flagged("factorisation_identity", 1e-7), |v| Check::of("factorisation_identity", v, 1e-7)));

    let one = C64::new(1.0, 0.0);
    let norm = worst(&[1.0], |_| {
        let up = wh_factor(f, Side::Up, one, o)?.require("factor")?;
        let down = wh_factor(f, Side::Down, one, o)?.require("factor")?;
        Ok(rel(up.value, down.value))
    })?;
    out.push(norm.map_or(Check::flagged("normalisation", 1e-8), |v| Check::of("normalisation", v, 1e-8)));

    let pts = cbf_grid(1e-2, 1e2, 5);
    for (name, side) in [("cbf_factor_up", Side::Up), ("cbf_factor_down", Side::Down)] {
        let g = |z: C64| wh_factor(f, side, z, o).map_or(C64::new(f64::NAN, f64::NAN), |v| v.value);
        out.push(Check::of(name, check_cbf(&g, &pts, 1e-8).max_violation, 1e-8));
    }

    let kf = worst(&[0.5, 2.0], |x| {
        let a = kappa(f, 1.0, C64::new(0.0, -x), o)?;
        let b = kappa(f, 1.0, C64::new(0.0, x), o)?;
        Ok(rel(a.kappa_dot * a.kappa_up * b.kappa_down, f.at_real(x) + 1.0))
    })?;
    out.push(kf.map_or(Check::flagged("kappa_factorisation", 1e-7), |v| Check::of("kappa_factorisation", v, 1e-7)));

    let g = job.curve((1e-4, 1e4, 64))?;
    if classify_balance(f, &g, g.margin) == Balance::Balanced {
        let id = worst(&[1.0], |_| Ok((xwh_integral_identity(f, 1.0, 2.0, &g, o)? - 1.0).abs()))?;
        out.push(id.map_or(Check::flagged("integral_identity", 1e-5), |v| Check::of("integral_identity", v, 1e-5)));
    } else {
        out.push(Check { name: "integral_identity", status: "skip", value: f64::NAN, tol: 1e-5 });
    }

    let mut t = Table::new("check", &["name", "status", "value", "tol"]);
    t.failed = out.iter().any(|c| c.status == "fail");
    for c in out {
        t.push(vec![c.name.into(), c.status.into(), c.value.into(), c.tol.into()]);
    }
    Ok(t)
}
