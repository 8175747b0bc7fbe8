//! Closed-form rescaled dynamics on exact cones — the flow oracle.
//!
//! With `h_ρ = h₀` the transversal pair decouples: `ρ̈(τ) = −ρ|η₀|²` with
//! `|η|_{h₀}` conserved, while `(y, η)` follow the boundary Hamilton flow
//! in τ. From an entry point this gives `ρ(τ) = sin(τk)/k`,
//! `ξ̄₀(τ) = cos(τk)`, `k = |η₀|_{h₀}`, and the arrival time `τ⁺ = π/k`.

use crate::geometry::boundary::BoundaryManifold;
use crate::num::linalg::BVec;

/// State of the cone flow at rescaled time τ from an entry point.
pub fn entry_state(boundary: &BoundaryManifold, y0: &BVec, eta0: &BVec, tau: f64) -> (f64, f64, BVec, BVec) {
    let k = boundary.conorm(y0, eta0);
    let (rho, xibar0) = if k == 0.0 {
        (tau, 1.0)
    } else {
        ((tau * k).sin() / k, (tau * k).cos())
    };
    let (y, eta) = boundary.exact_flow(y0, eta0, tau);
    (rho, xibar0, y, eta)
}

/// Cone flow from a general collar state `(ρ₀, ξ̄₀₀, y₀, η₀)`.
pub fn general_state(
    boundary: &BoundaryManifold,
    rho0: f64,
    xibar0: f64,
    y0: &BVec,
    eta0: &BVec,
    tau: f64,
) -> (f64, f64, BVec, BVec) {
    let k = boundary.conorm(y0, eta0);
    let (rho, xi) = if k == 0.0 {
        (rho0 + xibar0 * tau, xibar0)
    } else {
        let (s, c) = (tau * k).sin_cos();
        (rho0 * c + xibar0 / k * s, xibar0 * c - rho0 * k * s)
    };
    let (y, eta) = boundary.exact_flow(y0, eta0, tau);
    (rho, xi, y, eta)
}

/// Rescaled arrival time from entry: `τ⁺ = π / |η₀|_{h₀}`.
pub fn tau_plus(boundary: &BoundaryManifold, y0: &BVec, eta0: &BVec) -> f64 {
    std::f64::consts::PI / boundary.conorm(y0, eta0)
}

/// Unrescaled time elapsed between rescaled times `τ_a < τ_b` strictly
/// inside `(0, τ⁺)`: `t = k·(cot(k τ_a) − cot(k τ_b))`.
pub fn t_between(k: f64, tau_a: f64, tau_b: f64) -> f64 {
    let cot = |x: f64| x.cos() / x.sin();
    k * (cot(k * tau_a) - cot(k * tau_b))
}
