//! The rescaled geodesic field `X̄ = ρ⁻²X` and its integration to the
//! boundary faces.
//!
//! Integration runs in rescaled time τ in whichever chart is active:
//! collar coordinates `(ρ, y, ξ̄₀, η)` where the field extends smoothly to
//! ρ = 0 and boundary arrival is a regular transversal event, and cap
//! coordinates `(u, ξ)` for warped models. Chart transitions are located
//! by events at `r = 2` (inward) and `r = 2.2` (outward). Quadrature
//! accumulators ride the solver as extra state components.

use crate::dynamics::phase::{
    cap_to_collar, collar_to_cap, constraint_value, Chart, PhasePoint, STATE_W,
};
use crate::dynamics::trajectory::{Arrival, FlowDiagnostics, Segment, Trajectory};
use crate::error::{Error, Result};
use crate::geometry::boundary::{BoundaryManifold, SPHERE_CHART_MARGIN};
use crate::geometry::model::chart;
use crate::geometry::MetricModel;
use crate::num::linalg::{bmat_inv, bmat_mulvec, bquad, cmat_inv, cmat_mulvec, cquad, BVec};
use crate::num::ode::{self, EventDirection, EventSpec, OdeOptions, OdeSystem};

/// Options for flow integration.
#[derive(Clone, Copy, Debug)]
pub struct FlowOptions {
    pub rtol: f64,
    pub atol: f64,
    /// τ budget before reporting the possibly-trapped sentinel.
    pub tau_max: f64,
    /// Interior radius floor `r ≥ rho_min_interior` for global normal-form
    /// models (tip capture guard).
    pub rho_min_interior: f64,
    /// Constraint drift budget per unit τ; steps beyond it are rejected.
    pub drift_budget: f64,
    /// Project `ξ̄₀` back onto the constraint after each accepted step
    /// (off by default: projection can mask integrator bugs).
    pub project_constraint: bool,
    /// Disable the cap chart (testing aid; trajectories must then stay in
    /// the collar).
    pub collar_only: bool,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions {
            rtol: 1e-11,
            atol: 1e-13,
            tau_max: 1e3,
            rho_min_interior: 1e-6,
            drift_budget: 1e-9,
            project_constraint: false,
            collar_only: false,
        }
    }
}

/// Quadrature accumulator: integrand in τ as a function of the flow state.
pub type AccFn<'a> = Box<dyn Fn(Chart, &[f64]) -> f64 + 'a>;
/// Recording event function (роots located in τ, any crossing direction).
pub type RecordFn<'a> = Box<dyn Fn(Chart, &[f64]) -> f64 + 'a>;

pub struct RecordHit {
    pub index: usize,
    pub tau: f64,
    pub chart: Chart,
    pub state: Vec<f64>,
}

pub struct Flow {
    pub trajectory: Trajectory,
    /// Accumulator values at the trajectory end.
    pub acc_end: Vec<f64>,
    pub hits: Vec<RecordHit>,
}

/// Evaluate `X̄` in the collar chart: returns
/// `(dρ/dτ, dξ̄₀/dτ, dy/dτ, dη/dτ)` packed in the six-slot layout.
pub fn rescaled_field(model: &MetricModel, s: &[f64]) -> [f64; STATE_W] {
    let d = model.boundary_dim();
    let (rho, xibar0) = (s[0], s[1]);
    let y = [s[2], s[3]];
    let eta = [s[4], s[5]];
    let jet = model.collar_jet1(rho, &y);
    let w = bmat_inv(&jet.h, d);
    let weta = bmat_mulvec(&w, &eta, d);
    let e2 = bquad(&w, &eta, &eta, d); // |η|²_{h_ρ}
    let dr_e2 = -bquad(&jet.dr_h, &weta, &weta, d); // ∂ρ|η|²
    let mut out = [0.0; STATE_W];
    out[0] = xibar0;
    out[1] = -rho * (e2 + 0.5 * rho * dr_e2);
    for k in 0..d {
        out[2 + k] = weta[k];
        out[4 + k] = 0.5 * bquad(&jet.dy_h[k], &weta, &weta, d); // = −½∂y|η|²
    }
    out
}

/// Hamiltonian field in the cap chart, rescaled by the global bdf:
/// `du/dτ = ρ⁻² G⁻¹ξ`, `dξ/dτ = ρ⁻² · ½ (G⁻¹ξ)ᵀ ∂G (G⁻¹ξ)`.
pub fn cap_field(model: &MetricModel, s: &[f64]) -> [f64; STATE_W] {
    let n = model.dim();
    let u = [s[0], s[1], s[2]];
    let xi = [s[3], s[4], s[5]];
    let (g, dg) = model.cap_metric_jet1(&u);
    let w = cmat_inv(&g, n);
    let v = cmat_mulvec(&w, &xi, n);
    let r = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
    let rho = model.rho_global_of_r(r);
    let inv_rho2 = 1.0 / (rho * rho);
    let mut out = [0.0; STATE_W];
    for i in 0..n {
        out[i] = v[i] * inv_rho2;
        out[3 + i] = 0.5 * cquad(&dg[i], &v, &v, n) * inv_rho2;
    }
    out
}

struct FlowSystem<'a> {
    model: &'a MetricModel,
    chart: Chart,
    accumulators: &'a [AccFn<'a>],
}

impl OdeSystem for FlowSystem<'_> {
    fn dim(&self) -> usize {
        STATE_W + self.accumulators.len()
    }
    fn eval(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
        let core = match self.chart {
            Chart::Collar => rescaled_field(self.model, y),
            Chart::Cap => cap_field(self.model, y),
        };
        dy[..STATE_W].copy_from_slice(&core);
        for (k, acc) in self.accumulators.iter().enumerate() {
            dy[STATE_W + k] = acc(self.chart, y);
        }
    }
}

fn cap_radius(s: &[f64]) -> f64 {
    (s[0] * s[0] + s[1] * s[1] + s[2] * s[2]).sqrt()
}

/// Integrate the rescaled flow from `start` towards `tau_target`
/// (signed; negative target integrates backwards), carrying optional
/// quadrature accumulators and recording events.
pub fn integrate_flow(
    model: &MetricModel,
    start: &PhasePoint,
    tau_target: f64,
    opts: &FlowOptions,
    accumulators: &[AccFn],
    records: &[RecordFn],
) -> Result<Flow> {
    integrate_flow_until(model, start, tau_target, opts, accumulators, records, None)
}

/// As [`integrate_flow`], with an extra caller-supplied terminal stop
/// (triggered when its value crosses zero downwards); the stop is reported
/// as a [`Arrival::MaxTau`]-style truncation with the trajectory ending at
/// the located time.
pub fn integrate_flow_until(
    model: &MetricModel,
    start: &PhasePoint,
    tau_target: f64,
    opts: &FlowOptions,
    accumulators: &[AccFn],
    records: &[RecordFn],
    stop: Option<&RecordFn>,
) -> Result<Flow> {
    let mut chart_now = start.chart();
    if chart_now == Chart::Cap && !model.has_cap() {
        return Err(Error::ChartOutOfRange("model has no cap chart".into()));
    }
    let mut state: Vec<f64> = start.to_state().to_vec();
    state.extend(std::iter::repeat_n(0.0, accumulators.len()));
    let mut tau = 0.0;
    let dir = if tau_target >= 0.0 { 1.0 } else { -1.0 };
    let target = dir * tau_target.abs().min(opts.tau_max);

    let mut segments: Vec<Segment> = Vec::new();
    let mut hits: Vec<RecordHit> = Vec::new();
    let mut diags = FlowDiagnostics::default();
    let mut arrival = Arrival::MaxTau;

    // event indices within the assembled list
    let is_sphere = matches!(model.section(), BoundaryManifold::Sphere { .. });

    for _segment_guard in 0..64 {
        let sys = FlowSystem { model, chart: chart_now, accumulators };
        let mut events: Vec<EventSpec> = Vec::new();
        let mut ev_kind: Vec<&str> = Vec::new();
        match chart_now {
            Chart::Collar => {
                events.push(EventSpec::terminal(|_t, s: &[f64]| s[0], EventDirection::Falling));
                ev_kind.push("exit");
                if model.has_cap() && !opts.collar_only {
                    events.push(EventSpec::terminal(
                        |_t, s: &[f64]| s[0] - 1.0 / chart::SWITCH_IN_R,
                        EventDirection::Rising,
                    ));
                    ev_kind.push("switch_in");
                } else if !model.has_cap() {
                    let guard = 1.0 / opts.rho_min_interior;
                    events.push(EventSpec::terminal(
                        move |_t, s: &[f64]| s[0] - guard,
                        EventDirection::Rising,
                    ));
                    ev_kind.push("tip");
                } else {
                    // collar_only: error out if the trajectory dives past the cap switch
                    events.push(EventSpec::terminal(
                        |_t, s: &[f64]| s[0] - 1.0 / chart::COLLAR_MIN_R,
                        EventDirection::Rising,
                    ));
                    ev_kind.push("collar_limit");
                }
                if is_sphere {
                    events.push(EventSpec::terminal(
                        |_t, s: &[f64]| s[2] - SPHERE_CHART_MARGIN * 1.5,
                        EventDirection::Falling,
                    ));
                    ev_kind.push("band");
                    events.push(EventSpec::terminal(
                        |_t, s: &[f64]| std::f64::consts::PI - SPHERE_CHART_MARGIN * 1.5 - s[2],
                        EventDirection::Falling,
                    ));
                    ev_kind.push("band");
                }
            }
            Chart::Cap => {
                events.push(EventSpec::terminal(
                    |_t, s: &[f64]| cap_radius(s) - chart::SWITCH_OUT_R,
                    EventDirection::Rising,
                ));
                ev_kind.push("switch_out");
            }
        }
        if let Some(stop_fn) = stop {
            events.push(EventSpec::terminal(
                move |_t, s: &[f64]| stop_fn(chart_now, s),
                EventDirection::Falling,
            ));
            ev_kind.push("stop");
        }
        let n_builtin = events.len();
        for r in records {
            let rr: &RecordFn = r;
            events.push(EventSpec::recording(move |_t, s: &[f64]| rr(chart_now, s), EventDirection::Any));
            ev_kind.push("record");
        }

        let cons_chart = chart_now;
        let post_step: Option<Box<dyn Fn(&mut [f64])>> =
            if opts.project_constraint && chart_now == Chart::Collar {
                Some(Box::new(move |s: &mut [f64]| {
                    // rescale ξ̄₀ onto the constraint surface
                    let d = model.boundary_dim();
                    let y = [s[2], s[3]];
                    let eta = [s[4], s[5]];
                    let h = model.collar_jet1(s[0], &y).h;
                    let w = bmat_inv(&h, d);
                    let rest = 1.0 - s[0] * s[0] * bquad(&w, &eta, &eta, d);
                    if rest > 0.0 {
                        s[1] = s[1].signum() * rest.sqrt();
                    }
                }))
            } else {
                None
            };
        let ode_opts = OdeOptions {
            rtol: opts.rtol,
            atol: opts.atol,
            h0: None,
            h_max: Some(1.0),
            max_steps: 400_000,
            constraint: Some((
                Box::new(move |s: &[f64]| constraint_value(model, cons_chart, s)),
                opts.drift_budget,
            )),
            post_step,
        };

        let sol = ode::integrate(&sys, tau, &state, target, &events, &ode_opts)?;
        diags.steps += sol.stats.steps;
        diags.rejected += sol.stats.rejected;
        diags.max_constraint_rate = diags.max_constraint_rate.max(sol.stats.max_constraint_rate);
        for h in &sol.hits {
            if h.index >= n_builtin {
                hits.push(RecordHit {
                    index: h.index - n_builtin,
                    tau: h.t,
                    chart: chart_now,
                    state: h.y.clone(),
                });
            }
        }
        segments.push(Segment { chart: chart_now, dense: sol.dense.clone() });
        tau = sol.t_end;
        state = sol.y_end.clone();

        match sol.stop {
            ode::StopReason::ReachedEnd => {
                arrival = Arrival::MaxTau;
                break;
            }
            ode::StopReason::MaxSteps => {
                return Err(Error::StepSizeUnderflow { t: tau, h: 0.0 });
            }
            ode::StopReason::Event(idx) => match ev_kind[idx] {
                "exit" => {
                    arrival = Arrival::Boundary;
                    break;
                }
                "tip" => {
                    arrival = Arrival::TipGuard;
                    break;
                }
                "stop" => {
                    arrival = Arrival::MaxTau;
                    break;
                }
                "collar_limit" => {
                    return Err(Error::ChartOutOfRange(
                        "trajectory left the collar with the cap chart disabled".into(),
                    ));
                }
                "band" => {
                    return Err(Error::ChartOutOfRange(
                        "sphere trajectory left the coordinate band".into(),
                    ));
                }
                "switch_in" => {
                    let core = collar_to_cap(model, &state)?;
                    state[..STATE_W].copy_from_slice(&core);
                    chart_now = Chart::Cap;
                }
                "switch_out" => {
                    let core = cap_to_collar(model, &state)?;
                    state[..STATE_W].copy_from_slice(&core);
                    chart_now = Chart::Collar;
                }
                _ => unreachable!(),
            },
        }
    }

    // sample the constraint defect along the trajectory
    let mut max_defect: f64 = 0.0;
    for seg in &segments {
        let n_probe = 16;
        for i in 0..=n_probe {
            let t = seg.dense.t_start + (seg.dense.t_end - seg.dense.t_start) * i as f64 / n_probe as f64;
            let s = seg.dense.eval(t);
            if seg.chart == Chart::Collar || cap_radius(&s) > 0.0 {
                max_defect = max_defect.max((constraint_value(model, seg.chart, &s) - 1.0).abs());
            }
        }
    }
    diags.max_constraint_defect = max_defect;

    let acc_end = state[STATE_W..].to_vec();
    Ok(Flow {
        trajectory: Trajectory {
            segments,
            tau_start: 0.0,
            tau_end: tau,
            arrival,
            diagnostics: diags,
            direction: dir,
        },
        acc_end,
        hits,
    })
}

/// Integrate a trajectory with no accumulators or records.
pub fn integrate(
    model: &MetricModel,
    start: &PhasePoint,
    tau_target: f64,
    opts: &FlowOptions,
) -> Result<Trajectory> {
    Ok(integrate_flow(model, start, tau_target, opts, &[], &[])?.trajectory)
}

/// Forward trajectory from an entry point `(y₀, η₀) ∈ ∂₋S*M` up to exit.
pub fn integrate_entry(
    model: &MetricModel,
    y0: &BVec,
    eta0: &BVec,
    opts: &FlowOptions,
) -> Result<Trajectory> {
    integrate(model, &PhasePoint::entry(*y0, *eta0), opts.tau_max, opts)
}

/// Exact closed-form boundary geodesic flow `e^{sH₀}` (re-exported here as
/// the boundary-flow operation).
pub fn boundary_flow(boundary: &BoundaryManifold, y: &BVec, eta: &BVec, s: f64) -> (BVec, BVec) {
    boundary.exact_flow(y, eta, s)
}
