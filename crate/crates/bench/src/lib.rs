//! Shared fixtures for the benchmark suite.
use rogers_core::catalog::{brownian_drift, risk_process, stable, stable_convert};
use rogers_core::{RogersFunction, StableInput, StableParams};

pub fn stable_params(alpha: f64, rho: f64) -> StableParams {
    stable_convert(StableInput::Rho { alpha, rho, k: 1.0 }).expect("valid stable parameters")
}

/// Brownian motion with drift, a stable law and the risk process.
pub fn fixtures() -> Vec<(&'static str, RogersFunction)> {
    vec![
        ("bm_drift", brownian_drift(0.5)),
        ("stable_1.5_0.6", stable(&stable_params(1.5, 0.6))),
        ("risk_4_1", risk_process(4.0, 1.0).expect("valid risk process")),
    ]
}
