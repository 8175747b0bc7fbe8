//! Jacobi fields along geodesics, conjugate-point detection, and growth
//! bounds.
//!
//! The base geodesic, a parallel orthonormal frame `{γ̇, Y₁, …, Y_{n−1}}`,
//! and the perpendicular Jacobi components `U, U̇` are integrated jointly
//! in unrescaled time. The curvature operator `𝒦_ab = ⟨R(Y_a, γ̇)γ̇, Y_b⟩`
//! is assembled from the collar frame Riemann tensor (stable down to the
//! faces) or the generic cap-chart Riemann tensor. Frame orthonormality is
//! monitored, not re-imposed.

use crate::dynamics::flow::{cap_field, rescaled_field};
use crate::dynamics::phase::{cap_to_collar, collar_to_cap, Chart, PhasePoint, STATE_W};
use crate::error::{Error, Result};
use crate::geometry::boundary::BoundaryManifold;
use crate::geometry::curvature::{collar_frame_gram, collar_riemann_frame, riemann_general};
use crate::geometry::model::chart as chart_geom;
use crate::geometry::MetricModel;
use crate::num::linalg::{cquad, CMat, CVec};
use crate::num::ode::{self, DenseOutput, EventDirection, EventSpec, OdeOptions, OdeSystem};

/// Options for Jacobi integration (time variable is unrescaled t).
#[derive(Clone, Copy, Debug)]
pub struct JacobiOptions {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for JacobiOptions {
    fn default() -> Self {
        JacobiOptions { rtol: 1e-11, atol: 1e-13 }
    }
}

fn base_rate_t(model: &MetricModel, chart: Chart, s: &[f64], out: &mut [f64]) {
    match chart {
        Chart::Collar => {
            let f = rescaled_field(model, s);
            let r2 = s[0] * s[0];
            for i in 0..STATE_W {
                out[i] = r2 * f[i];
            }
        }
        Chart::Cap => {
            let f = cap_field(model, s);
            let r = (s[0] * s[0] + s[1] * s[1] + s[2] * s[2]).sqrt();
            let rho = model.rho_global_of_r(r);
            let r2 = rho * rho;
            for i in 0..STATE_W {
                out[i] = r2 * f[i];
            }
        }
    }
}

/// Coordinate velocity (dx/dt) of the base point.
fn base_velocity(model: &MetricModel, chart: Chart, s: &[f64]) -> CVec {
    let mut rate = [0.0; STATE_W];
    base_rate_t(model, chart, s, &mut rate);
    match chart {
        Chart::Collar => [rate[0], rate[2], rate[3]],
        Chart::Cap => [rate[0], rate[1], rate[2]],
    }
}

fn coordinate_metric(model: &MetricModel, chart: Chart, s: &[f64]) -> CMat {
    match chart {
        Chart::Collar => {
            let d = model.boundary_dim();
            let rho = s[0];
            let h = model.collar_jet1(rho, &[s[2], s[3]]).h;
            let mut g = [[0.0; 3]; 3];
            g[0][0] = 1.0 / rho.powi(4);
            for i in 0..d {
                for j in 0..d {
                    g[i + 1][j + 1] = h[i][j] / (rho * rho);
                }
            }
            g
        }
        Chart::Cap => model.cap_metric_jet1(&[s[0], s[1], s[2]]).0,
    }
}

fn christoffels(model: &MetricModel, chart: Chart, s: &[f64]) -> [[[f64; 3]; 3]; 3] {
    match chart {
        Chart::Collar => crate::tensors::derivative::collar_christoffels(model, s[0], &[s[2], s[3]]),
        Chart::Cap => crate::tensors::derivative::cap_christoffels(model, &[s[0], s[1], s[2]]),
    }
}

/// `𝒦_ab = ⟨R(Y_a, γ̇)γ̇, Y_b⟩` for coordinate vectors.
fn curvature_operator(
    model: &MetricModel,
    chart: Chart,
    s: &[f64],
    vel: &CVec,
    frame: &[CVec],
) -> [[f64; 2]; 2] {
    let n = model.dim();
    let d = model.boundary_dim();
    let mut out = [[0.0; 2]; 2];
    match chart {
        Chart::Collar => {
            let rho = s[0];
            let y = [s[2], s[3]];
            let rfr = collar_riemann_frame(model, rho, &y);
            // coordinate -> frame components: v_frame = (v⁰/ρ², vⁱ/ρ)
            let tofr = |v: &CVec| -> CVec {
                let mut f = [0.0; 3];
                f[0] = v[0] / (rho * rho);
                for i in 0..d {
                    f[1 + i] = v[1 + i] / rho;
                }
                f
            };
            let vf = tofr(vel);
            let yf: Vec<CVec> = frame.iter().map(tofr).collect();
            let _ = collar_frame_gram(model, rho, &y);
            for a in 0..d {
                for b in 0..d {
                    let mut k = 0.0;
                    for i in 0..n {
                        for j in 0..n {
                            for p in 0..n {
                                for q in 0..n {
                                    let r = rfr[i][j][p][q];
                                    if r != 0.0 {
                                        k += r * yf[a][i] * vf[j] * vf[p] * yf[b][q];
                                    }
                                }
                            }
                        }
                    }
                    out[a][b] = k;
                }
            }
        }
        Chart::Cap => {
            let u = [s[0], s[1], s[2]];
            let (g, dg, ddg) = model.cap_metric_jet2(&u);
            let rl = riemann_general(n, &g, &dg, &ddg);
            for a in 0..d {
                for b in 0..d {
                    let mut k = 0.0;
                    for i in 0..n {
                        for j in 0..n {
                            for p in 0..n {
                                for q in 0..n {
                                    let r = rl[i][j][p][q];
                                    if r != 0.0 {
                                        k += r * frame[a][i] * vel[j] * vel[p] * frame[b][q];
                                    }
                                }
                            }
                        }
                    }
                    out[a][b] = k;
                }
            }
        }
    }
    out
}

struct JacobiSystem<'a> {
    model: &'a MetricModel,
    chart: Chart,
    ncols: usize,
}

impl JacobiSystem<'_> {
    fn n(&self) -> usize {
        self.model.dim()
    }
    fn d(&self) -> usize {
        self.model.boundary_dim()
    }
    fn frame_off(&self) -> usize {
        STATE_W
    }
    fn cols_off(&self) -> usize {
        STATE_W + self.n() * self.d()
    }
}

impl OdeSystem for JacobiSystem<'_> {
    fn dim(&self) -> usize {
        self.cols_off() + self.ncols * 2 * self.d()
    }
    fn eval(&self, _t: f64, v: &[f64], dv: &mut [f64]) {
        let (n, d) = (self.n(), self.d());
        dv.fill(0.0);
        base_rate_t(self.model, self.chart, v, dv);
        let vel = base_velocity(self.model, self.chart, v);
        let gamma = christoffels(self.model, self.chart, v);
        // parallel transport of the frame vectors: Ẏ^k = −Γ^k_{ij} ẋ^i Y^j
        let fo = self.frame_off();
        let mut frame: Vec<CVec> = Vec::with_capacity(d);
        for a in 0..d {
            let y = [v[fo + a * n], v[fo + a * n + 1], if n > 2 { v[fo + a * n + 2] } else { 0.0 }];
            frame.push(y);
            for k in 0..n {
                let mut s = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        let g = gamma[k][i][j];
                        if g != 0.0 {
                            s -= g * vel[i] * y[j];
                        }
                    }
                }
                dv[fo + a * n + k] = s;
            }
        }
        // Jacobi columns: Ü = −𝒦 U
        let kop = curvature_operator(self.model, self.chart, v, &vel, &frame);
        let co = self.cols_off();
        for c in 0..self.ncols {
            let base = co + c * 2 * d;
            for a in 0..d {
                dv[base + a] = v[base + d + a];
                let mut s = 0.0;
                for b in 0..d {
                    s -= kop[a][b] * v[base + b];
                }
                dv[base + d + a] = s;
            }
        }
    }
}

/// Dense Jacobi solution across chart segments.
pub struct JacobiField {
    pub segments: Vec<(Chart, DenseOutput)>,
    pub t_end: f64,
    pub d: usize,
    n: usize,
    ncols: usize,
    /// Worst frame-orthonormality defect sampled along the run.
    pub frame_defect: f64,
}

impl JacobiField {
    fn segment_at(&self, t: f64) -> &(Chart, DenseOutput) {
        for seg in &self.segments {
            if t >= seg.1.t_start - 1e-12 && t <= seg.1.t_end + 1e-12 {
                return seg;
            }
        }
        self.segments.last().unwrap()
    }
    pub fn eval_raw(&self, t: f64) -> (Chart, Vec<f64>) {
        let seg = self.segment_at(t);
        (seg.0, seg.1.eval(t))
    }
    /// Perpendicular components `(U, U̇)` of column `c` at time t.
    pub fn component(&self, t: f64, c: usize) -> ([f64; 2], [f64; 2]) {
        let (_, v) = self.eval_raw(t);
        let co = STATE_W + self.n * self.d + c * 2 * self.d;
        let mut u = [0.0; 2];
        let mut du = [0.0; 2];
        for a in 0..self.d {
            u[a] = v[co + a];
            du[a] = v[co + self.d + a];
        }
        (u, du)
    }
    /// Determinant of the matrix solution at time t.
    pub fn det(&self, t: f64) -> f64 {
        assert_eq!(self.ncols, self.d);
        let mut m = [[0.0; 2]; 2];
        for c in 0..self.d {
            let (u, _) = self.component(t, c);
            for a in 0..self.d {
                m[a][c] = u[a];
            }
        }
        match self.d {
            1 => m[0][0],
            _ => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        }
    }
    pub fn base_point(&self, t: f64) -> PhasePoint {
        let (chart, v) = self.eval_raw(t);
        PhasePoint::from_state(chart, &v[..STATE_W])
    }
}

fn convert_vector(model: &MetricModel, from: Chart, s: &[f64], v: &CVec) -> Result<CVec> {
    match (from, model.section()) {
        (Chart::Collar, BoundaryManifold::Circle { .. }) => {
            let (rho, th) = (s[0], s[2]);
            let r = 1.0 / rho;
            let (sn, cs) = th.sin_cos();
            // u = r(cosθ, sinθ): δu = δr·n + r δθ·t, δr = −δρ/ρ²
            let dr = -v[0] / (rho * rho);
            Ok([dr * cs - r * sn * v[1], dr * sn + r * cs * v[1], 0.0])
        }
        (Chart::Collar, BoundaryManifold::Sphere { .. }) => {
            let (rho, th, ph) = (s[0], s[2], s[3]);
            let r = 1.0 / rho;
            let (st, ct) = th.sin_cos();
            let (sp, cp) = ph.sin_cos();
            let n = [st * cp, st * sp, ct];
            let nt = [ct * cp, ct * sp, -st];
            let np = [-st * sp, st * cp, 0.0];
            let dr = -v[0] / (rho * rho);
            let mut out = [0.0; 3];
            for i in 0..3 {
                out[i] = dr * n[i] + r * (nt[i] * v[1] + np[i] * v[2]);
            }
            Ok(out)
        }
        (Chart::Cap, BoundaryManifold::Circle { .. }) => {
            let u = [s[0], s[1]];
            let r = (u[0] * u[0] + u[1] * u[1]).sqrt();
            let dr = (u[0] * v[0] + u[1] * v[1]) / r;
            let dth = (-u[1] * v[0] + u[0] * v[1]) / (r * r);
            // δρ = −δr/r²
            Ok([-dr / (r * r), dth, 0.0])
        }
        (Chart::Cap, BoundaryManifold::Sphere { .. }) => {
            let u = [s[0], s[1], s[2]];
            let r = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
            let th = (u[2] / r).clamp(-1.0, 1.0).acos();
            let ph = u[1].atan2(u[0]);
            let (st, ct) = th.sin_cos();
            let (sp, cp) = ph.sin_cos();
            let n = [st * cp, st * sp, ct];
            let nt = [ct * cp, ct * sp, -st];
            let np = [-st * sp, st * cp, 0.0];
            let dot = |a: &[f64; 3]| a[0] * v[0] + a[1] * v[1] + a[2] * v[2];
            let dr = dot(&n);
            Ok([-dr / (r * r), dot(&nt) / r, dot(&np) / (r * st * st)])
        }
        _ => Err(Error::ChartTransition("unsupported section for vector conversion".into())),
    }
}

/// Integrate the augmented Jacobi system from an anchor phase point.
/// `columns` supplies initial `(U, U̇)` pairs per column.
pub fn jacobi_integrate(
    model: &MetricModel,
    z0: &PhasePoint,
    columns: &[([f64; 2], [f64; 2])],
    t_end: f64,
    opts: &JacobiOptions,
) -> Result<JacobiField> {
    let n = model.dim();
    let d = model.boundary_dim();
    let ncols = columns.len();
    let mut chart_now = z0.chart();
    let mut state = vec![0.0; STATE_W + n * d + ncols * 2 * d];
    state[..STATE_W].copy_from_slice(&z0.to_state());

    // orthonormal frame at the anchor: γ̇ then Gram-Schmidt completions
    {
        let g = coordinate_metric(model, chart_now, &state[..STATE_W]);
        let vel = base_velocity(model, chart_now, &state[..STATE_W]);
        let vnorm = cquad(&g, &vel, &vel, n).sqrt();
        let vunit = [vel[0] / vnorm, vel[1] / vnorm, vel[2] / vnorm];
        let mut built: Vec<CVec> = vec![vunit];
        let candidates: [CVec; 3] = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        for cand in candidates.iter() {
            if built.len() == n {
                break;
            }
            let mut w = *cand;
            for b in &built {
                let c = cquad(&g, &w, b, n);
                for i in 0..n {
                    w[i] -= c * b[i];
                }
            }
            let nw = cquad(&g, &w, &w, n);
            if nw > 1e-12 {
                let nw = nw.sqrt();
                for x in w.iter_mut() {
                    *x /= nw;
                }
                built.push(w);
            }
        }
        if built.len() < n {
            return Err(Error::DegeneratePlane);
        }
        for a in 0..d {
            for k in 0..n {
                state[STATE_W + a * n + k] = built[1 + a][k];
            }
        }
    }
    let co = STATE_W + n * d;
    for (c, (u, du)) in columns.iter().enumerate() {
        for a in 0..d {
            state[co + c * 2 * d + a] = u[a];
            state[co + c * 2 * d + d + a] = du[a];
        }
    }

    let mut t = 0.0;
    let mut segments = Vec::new();
    let mut frame_defect: f64 = 0.0;
    for _guard in 0..64 {
        let sys = JacobiSystem { model, chart: chart_now, ncols };
        let mut events: Vec<EventSpec> = Vec::new();
        let mut kinds: Vec<&str> = Vec::new();
        match chart_now {
            Chart::Collar => {
                if model.has_cap() {
                    events.push(EventSpec::terminal(
                        |_t, s: &[f64]| s[0] - 1.0 / chart_geom::SWITCH_IN_R,
                        EventDirection::Rising,
                    ));
                    kinds.push("in");
                }
                events.push(EventSpec::terminal(|_t, s: &[f64]| s[0] - 1e-7, EventDirection::Falling));
                kinds.push("face");
            }
            Chart::Cap => {
                events.push(EventSpec::terminal(
                    |_t, s: &[f64]| {
                        (s[0] * s[0] + s[1] * s[1] + s[2] * s[2]).sqrt() - chart_geom::SWITCH_OUT_R
                    },
                    EventDirection::Rising,
                ));
                kinds.push("out");
            }
        }
        let ode_opts = OdeOptions { rtol: opts.rtol, atol: opts.atol, h_max: Some(5.0), ..Default::default() };
        let sol = ode::integrate(&sys, t, &state, t_end, &events, &ode_opts)?;
        segments.push((chart_now, sol.dense.clone()));
        t = sol.t_end;
        state = sol.y_end.clone();
        // frame orthonormality monitor at segment ends
        {
            let g = coordinate_metric(model, chart_now, &state[..STATE_W]);
            let vel = base_velocity(model, chart_now, &state[..STATE_W]);
            let vn = cquad(&g, &vel, &vel, n).sqrt();
            for a in 0..d {
                let ya = [state[STATE_W + a * n], state[STATE_W + a * n + 1], if n > 2 { state[STATE_W + a * n + 2] } else { 0.0 }];
                frame_defect = frame_defect.max((cquad(&g, &ya, &ya, n) - 1.0).abs());
                let vdot = cquad(&g, &ya, &vel, n) / vn;
                frame_defect = frame_defect.max(vdot.abs());
            }
        }
        match sol.stop {
            ode::StopReason::ReachedEnd => break,
            ode::StopReason::MaxSteps => return Err(Error::StepSizeUnderflow { t, h: 0.0 }),
            ode::StopReason::Event(idx) => match kinds[idx] {
                "face" => break,
                "in" => {
                    let mut newstate = state.clone();
                    let core = collar_to_cap(model, &state[..STATE_W])?;
                    newstate[..STATE_W].copy_from_slice(&core);
                    for a in 0..d {
                        let y = [state[STATE_W + a * n], state[STATE_W + a * n + 1], if n > 2 { state[STATE_W + a * n + 2] } else { 0.0 }];
                        let conv = convert_vector(model, Chart::Collar, &state[..STATE_W], &y)?;
                        for k in 0..n {
                            newstate[STATE_W + a * n + k] = conv[k];
                        }
                    }
                    state = newstate;
                    chart_now = Chart::Cap;
                }
                "out" => {
                    let mut newstate = state.clone();
                    let core = cap_to_collar(model, &state[..STATE_W])?;
                    newstate[..STATE_W].copy_from_slice(&core);
                    for a in 0..d {
                        let y = [state[STATE_W + a * n], state[STATE_W + a * n + 1], if n > 2 { state[STATE_W + a * n + 2] } else { 0.0 }];
                        let conv = convert_vector(model, Chart::Cap, &state[..STATE_W], &y)?;
                        for k in 0..n {
                            newstate[STATE_W + a * n + k] = conv[k];
                        }
                    }
                    state = newstate;
                    chart_now = Chart::Collar;
                }
                _ => unreachable!(),
            },
        }
    }
    Ok(JacobiField { segments, t_end: t, d, n, ncols, frame_defect })
}

/// Zeros of `det U(t)` for the matrix solution with `U(0) = 0`,
/// `U̇(0) = Id`: conjugate times to the anchor, located by sign change and
/// bisection.
pub fn conjugate_scan(
    model: &MetricModel,
    z0: &PhasePoint,
    t_window: f64,
    opts: &JacobiOptions,
) -> Result<Vec<f64>> {
    let d = model.boundary_dim();
    let mut cols = Vec::new();
    for c in 0..d {
        let mut du = [0.0; 2];
        du[c] = 1.0;
        cols.push(([0.0; 2], du));
    }
    let jf = jacobi_integrate(model, z0, &cols, t_window, opts)?;
    let mut zeros = Vec::new();
    let nprobe = 2000;
    let mut prev_t = jf.t_end * 1e-6; // skip the trivial zero at t = 0
    let mut prev = jf.det(prev_t);
    for i in 1..=nprobe {
        let t = jf.t_end * 1e-6 + (jf.t_end * (1.0 - 1e-6)) * i as f64 / nprobe as f64;
        let v = jf.det(t);
        if prev != 0.0 && v != 0.0 && prev.signum() != v.signum() {
            let (mut lo, mut hi) = (prev_t, t);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if jf.det(mid).signum() == prev.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            zeros.push(0.5 * (lo + hi));
        }
        prev = v;
        prev_t = t;
    }
    Ok(zeros)
}

/// Growth-envelope report for outgoing Jacobi data.
#[derive(Clone, Debug)]
pub struct GrowthReport {
    pub samples: usize,
    /// Fitted constant in `|J̇(t)| ≤ C(|J(0)|ρ₀³ + |J̇(0)|)`.
    pub c_dot: f64,
    /// Fitted constant in `|J(t)| ≤ |J(0)| + C(|J(0)|ρ₀³ + |J̇(0)|)t`.
    pub c_lin: f64,
    pub envelope_ok: bool,
}

/// Verify the outgoing Jacobi growth envelope on collar samples
/// (`ξ̄₀ ≤ 0`), reporting the fitted constants.
pub fn jacobi_growth_check(
    model: &MetricModel,
    samples: &[(PhasePoint, [f64; 2], [f64; 2])],
    t_end: f64,
    opts: &JacobiOptions,
) -> Result<GrowthReport> {
    let d = model.boundary_dim();
    let mut c_dot: f64 = 0.0;
    let mut c_lin: f64 = 0.0;
    for (z, u0, du0) in samples {
        let Some((rho0, ..)) = z.as_collar() else {
            return Err(Error::ChartOutOfRange("growth samples must be collar points".into()));
        };
        let jf = jacobi_integrate(model, z, &[(*u0, *du0)], t_end, opts)?;
        let norm = |v: &[f64; 2]| (v[0] * v[0] + v[1] * v[1]).sqrt();
        let _ = d;
        let budget = norm(u0) * rho0.powi(3) + norm(du0);
        if budget <= 0.0 {
            continue;
        }
        for i in 1..=40 {
            let t = jf.t_end * i as f64 / 40.0;
            let (u, du) = jf.component(t, 0);
            c_dot = c_dot.max(norm(&du) / budget);
            if t > 0.0 {
                let growth = (norm(&u) - norm(u0)).max(0.0);
                c_lin = c_lin.max(growth / (budget * t));
            }
        }
    }
    Ok(GrowthReport { samples: samples.len(), c_dot, c_lin, envelope_ok: c_dot.is_finite() && c_lin.is_finite() })
}
