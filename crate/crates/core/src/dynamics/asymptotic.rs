//! Asymptotic bound verification for outgoing trajectories and the
//! large-|η| (tilde) dynamic checks.

use crate::dynamics::flow::{integrate_flow_until, AccFn, FlowOptions};
use crate::dynamics::linearized::TildeSystem;
use crate::dynamics::phase::{Chart, PhasePoint};
use crate::error::{Error, Result};
use crate::geometry::MetricModel;
use crate::num::fit::{line_fit, LineFit};
use crate::num::linalg::{bmat_inv, bquad, BVec};
use crate::num::ode::{self, EventDirection, EventSpec, OdeOptions};

/// Report of the outgoing-trajectory bounds.
#[derive(Clone, Debug)]
pub struct AsymptoticReport {
    pub samples: usize,
    /// All samples satisfied `ρ(t) ≥ ρ₀/(1 + ρ₀ t)` up to 1e−8 relative.
    pub lower_bounds_ok: bool,
    /// Worst violation of the lower bound (relative).
    pub worst_violation: f64,
    /// Empirical constant in `ρ(t) ≤ C ρ₀/(1 + ρ₀ t)`.
    pub c_rho: f64,
    /// Empirical constant in `|η(t)| ∈ |η₀| e^{±C ρ₀}`.
    pub c_eta: f64,
    /// Fitted slope of `1 − ξ̄₀²` against `1 + ρ₀ t` (should be ≤ −2 + 0.1).
    pub xi_decay_slope: Option<f64>,
    /// Samples skipped because guards tripped before enough decay.
    pub skipped_trapped: usize,
}

/// Verify the outgoing-flow bounds on a set of collar phase points with
/// `ρ ≤ ε` and `ξ̄₀ ≤ 0`.
pub fn asymptotic_bounds_check(
    model: &MetricModel,
    samples: &[PhasePoint],
    opts: &FlowOptions,
) -> Result<AsymptoticReport> {
    let d = model.boundary_dim();
    let mut worst_violation: f64 = 0.0;
    let mut c_rho: f64 = 1.0;
    let mut c_eta: f64 = 0.0;
    let mut skipped = 0usize;
    let mut log_base: Vec<f64> = Vec::new();
    let mut log_xi: Vec<f64> = Vec::new();
    let mut used = 0usize;

    for z in samples {
        let Some((rho0, y0, xibar0, eta0)) = z.as_collar() else {
            return Err(Error::ChartOutOfRange("asymptotic samples must be collar points".into()));
        };
        if xibar0 > 0.0 {
            return Err(Error::InvalidModel("asymptotic samples must be outgoing (ξ̄₀ ≤ 0)".into()));
        }
        let h = model.collar_jet1(rho0, &y0).h;
        let w = bmat_inv(&h, d);
        let eta0_norm = bquad(&w, &eta0, &eta0, d).sqrt();
        // unrescaled time accumulator dt = ρ⁻² dτ (collar: ρ is the coordinate);
        // stop at ρ = ρ₀/50 — the t-quadrature diverges at the face itself
        let acc: Vec<AccFn> = vec![Box::new(|_c: Chart, s: &[f64]| 1.0 / (s[0] * s[0]))];
        let rho_stop = rho0 / 50.0;
        let stop: crate::dynamics::flow::RecordFn =
            Box::new(move |_c: Chart, s: &[f64]| s[0] - rho_stop);
        let mut fopts = *opts;
        fopts.tau_max = 1e4;
        let flow = integrate_flow_until(model, z, fopts.tau_max, &fopts, &acc, &[], Some(&stop))?;
        let traj = &flow.trajectory;
        let reached_floor = traj
            .eval_raw(traj.tau_end)
            .1
            .first()
            .map(|&r| r <= rho_stop * 1.01)
            .unwrap_or(false);
        if !reached_floor {
            skipped += 1;
            continue;
        }
        used += 1;
        let tau_end = traj.tau_end;
        // sample along the trajectory, avoiding the terminal event itself
        for i in 0..60 {
            let tau = tau_end * (i as f64 + 0.5) / 61.0;
            let (_, s) = traj.eval_raw(tau);
            let rho = s[0];
            let t = s[crate::dynamics::phase::STATE_W];
            if t <= 0.0 || rho <= 0.0 {
                continue;
            }
            let bound = rho0 / (1.0 + rho0 * t);
            let viol = (bound - rho) / bound;
            worst_violation = worst_violation.max(viol);
            c_rho = c_rho.max(rho / bound);
            let y = [s[2], s[3]];
            let eta = [s[4], s[5]];
            let hh = model.collar_jet1(rho, &y).h;
            let ww = bmat_inv(&hh, d);
            let en = bquad(&ww, &eta, &eta, d).sqrt();
            if eta0_norm > 1e-12 && rho0 > 0.0 {
                c_eta = c_eta.max((en / eta0_norm).ln().abs() / rho0);
            }
            // normalize each sample by its initial value so the pooled fit
            // shares one intercept: (1−ξ̄₀²)(t)/(1−ξ̄₀²)(0) ~ (1+ρ₀t)^{-2}
            let xi2 = 1.0 - s[1] * s[1];
            let xi2_0 = 1.0 - xibar0 * xibar0;
            if xi2 > 1e-13 && xi2_0 > 1e-13 && i % 6 == 0 {
                log_base.push((1.0 + rho0 * t).ln());
                log_xi.push((xi2 / xi2_0).ln());
            }
        }
    }
    if used == 0 {
        return Err(Error::InsufficientSamples { need: 1, got: 0 });
    }
    let xi_decay_slope = if log_base.len() >= 4 {
        Some(line_fit(&log_base, &log_xi)?.slope)
    } else {
        None
    };
    Ok(AsymptoticReport {
        samples: used,
        lower_bounds_ok: worst_violation <= 1e-8,
        worst_violation,
        c_rho,
        c_eta,
        xi_decay_slope,
        skipped_trapped: skipped,
    })
}

/// Result of the large-|η| limiting-dynamic check at one ε.
#[derive(Clone, Debug)]
pub struct TildeSample {
    pub eps: f64,
    /// `sup |ρ̃(s) − (τ_ε/επ) sin(επ s/τ_ε)|`
    pub sup_rho_resid: f64,
    /// `sup |ξ̃₀(s) − cos(επ s/τ_ε)|`
    pub sup_xi_resid: f64,
    /// `ε⁻¹ τ⁺(y₀, ε⁻¹η₀)`
    pub s_exit: f64,
    /// `sup ρ̃` along the trajectory (equals `|η₀| · sup ρ`).
    pub sup_rho_scaled: f64,
}

#[derive(Clone, Debug)]
pub struct TildeReport {
    pub samples: Vec<TildeSample>,
    /// Fitted ε-slope of the sup residuals (≥ 1 − 0.1 expected).
    pub rho_resid_slope: Option<LineFit>,
    pub xi_resid_slope: Option<LineFit>,
    /// Fitted ε-slope of |ε⁻¹τ⁺ − π|.
    pub tau_slope: Option<LineFit>,
    /// Empirical constant in `sup ρ ≤ C/|η₀|`.
    pub c_sup_rho: f64,
    /// All residuals vanished to tolerance (exact-cone case).
    pub exact: bool,
}

/// Integrate the rescaled-in-ε (tilde) dynamic from `(0, 1, y₀, η₀)` up to
/// `ρ̃ = 0` and return the exit time and dense output.
pub fn integrate_tilde(
    model: &MetricModel,
    eps: f64,
    y0: &BVec,
    eta0: &BVec,
    rtol: f64,
) -> Result<(f64, ode::DenseOutput)> {
    let sys = TildeSystem { model, eps };
    let state = [0.0, 1.0, y0[0], y0[1], eta0[0], eta0[1]];
    let events = vec![EventSpec::terminal(|_t, s: &[f64]| s[0], EventDirection::Falling)];
    let opts = OdeOptions { rtol, atol: rtol * 1e-2, ..Default::default() };
    let sol = ode::integrate(&sys, 0.0, &state, 8.0, &events, &opts)?;
    if !matches!(sol.stop, ode::StopReason::Event(0)) {
        return Err(Error::TrappedGeodesic);
    }
    Ok((sol.t_end, sol.dense))
}

/// Check the limiting description of near-boundary trajectories against the
/// ε-ladder: residual profiles, arrival-time expansion, and `sup ρ ≤ C/|η₀|`.
pub fn tilde_dynamic_check(
    model: &MetricModel,
    y0: &BVec,
    eta0: &BVec,
    eps_ladder: &[f64],
) -> Result<TildeReport> {
    let k0 = model.boundary().conorm(y0, eta0);
    if (k0 - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidModel(format!("tilde check needs |η₀|_h₀ = 1, got {k0}")));
    }
    let mut samples = Vec::new();
    let mut c_sup: f64 = 0.0;
    for &eps in eps_ladder {
        let (s_exit, dense) = integrate_tilde(model, eps, y0, eta0, 1e-12)?;
        let mut sup_rho: f64 = 0.0;
        let mut sup_xi: f64 = 0.0;
        let mut sup_rho_raw: f64 = 0.0;
        let omega = std::f64::consts::PI / s_exit;
        for i in 0..=200 {
            let s = s_exit * i as f64 / 200.0;
            let v = dense.eval(s);
            sup_rho = sup_rho.max((v[0] - (omega * s).sin() / omega).abs());
            sup_xi = sup_xi.max((v[1] - (omega * s).cos()).abs());
            sup_rho_raw = sup_rho_raw.max(v[0]);
        }
        c_sup = c_sup.max(sup_rho_raw);
        samples.push(TildeSample {
            eps,
            sup_rho_resid: sup_rho,
            sup_xi_resid: sup_xi,
            s_exit,
            sup_rho_scaled: sup_rho_raw,
        });
    }
    let floor = 1e-10;
    let exact = samples.iter().all(|s| {
        s.sup_rho_resid < floor && s.sup_xi_resid < floor && (s.s_exit - std::f64::consts::PI).abs() < 1e-9
    });
    let fit_of = |f: &dyn Fn(&TildeSample) -> f64| -> Result<Option<LineFit>> {
        let mut lx = Vec::new();
        let mut ly = Vec::new();
        for s in &samples {
            let v = f(s);
            if v > floor {
                lx.push(s.eps.ln());
                ly.push(v.ln());
            }
        }
        if lx.len() >= 3 {
            Ok(Some(line_fit(&lx, &ly)?))
        } else {
            Ok(None)
        }
    };
    Ok(TildeReport {
        rho_resid_slope: fit_of(&|s| s.sup_rho_resid)?,
        xi_resid_slope: fit_of(&|s| s.sup_xi_resid)?,
        tau_slope: fit_of(&|s| (s.s_exit - std::f64::consts::PI).abs())?,
        c_sup_rho: c_sup,
        exact,
        samples,
    })
}
