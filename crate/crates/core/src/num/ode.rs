//! Embedded Dormand-Prince 5(4) integrator with dense output and event
//! location.
//!
//! The flow integrations in this crate all run through this stepper. Dense
//! output uses the standard fourth-order continuous extension, events are
//! located on the dense output by bisection, and an optional constraint
//! monitor rejects steps whose invariant drift exceeds a per-unit-time
//! budget.

use crate::error::{Error, Result};

pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn eval(&self, t: f64, y: &[f64], dy: &mut [f64]);
}

impl<F: Fn(f64, &[f64], &mut [f64])> OdeSystem for (usize, F) {
    fn dim(&self) -> usize {
        self.0
    }
    fn eval(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        (self.1)(t, y, dy)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EventDirection {
    /// Trigger when g crosses from negative to positive.
    Rising,
    /// Trigger when g crosses from positive to negative.
    Falling,
    Any,
}

pub struct EventSpec<'a> {
    pub g: Box<dyn Fn(f64, &[f64]) -> f64 + 'a>,
    pub direction: EventDirection,
    pub terminal: bool,
}

impl<'a> EventSpec<'a> {
    pub fn terminal(g: impl Fn(f64, &[f64]) -> f64 + 'a, direction: EventDirection) -> Self {
        EventSpec { g: Box::new(g), direction, terminal: true }
    }
    pub fn recording(g: impl Fn(f64, &[f64]) -> f64 + 'a, direction: EventDirection) -> Self {
        EventSpec { g: Box::new(g), direction, terminal: false }
    }
}

pub struct OdeOptions<'a> {
    pub rtol: f64,
    pub atol: f64,
    pub h0: Option<f64>,
    pub h_max: Option<f64>,
    pub max_steps: usize,
    /// Invariant monitor: steps with |c(y1) - c(y0)| > budget * |h| are
    /// rejected. The observed worst rate is reported in the statistics.
    pub constraint: Option<(Box<dyn Fn(&[f64]) -> f64 + 'a>, f64)>,
    /// Applied to the state after each accepted step (dense output for the
    /// completed step is unaffected).
    pub post_step: Option<Box<dyn Fn(&mut [f64]) + 'a>>,
}

impl Default for OdeOptions<'_> {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-10,
            atol: 1e-12,
            h0: None,
            h_max: None,
            max_steps: 2_000_000,
            constraint: None,
            post_step: None,
        }
    }
}

#[derive(Clone)]
pub struct DenseSegment {
    pub t0: f64,
    pub h: f64,
    rcont: [Vec<f64>; 5],
}

impl DenseSegment {
    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        let theta = (t - self.t0) / self.h;
        let th1 = 1.0 - theta;
        for i in 0..out.len() {
            out[i] = self.rcont[0][i]
                + theta
                    * (self.rcont[1][i]
                        + th1 * (self.rcont[2][i] + theta * (self.rcont[3][i] + th1 * self.rcont[4][i])));
        }
    }
    pub fn eval_component(&self, t: f64, i: usize) -> f64 {
        let theta = (t - self.t0) / self.h;
        let th1 = 1.0 - theta;
        self.rcont[0][i]
            + theta * (self.rcont[1][i] + th1 * (self.rcont[2][i] + theta * (self.rcont[3][i] + th1 * self.rcont[4][i])))
    }
}

#[derive(Clone)]
pub struct DenseOutput {
    pub segments: Vec<DenseSegment>,
    pub t_start: f64,
    pub t_end: f64,
    dim: usize,
}

impl DenseOutput {
    pub fn dim(&self) -> usize {
        self.dim
    }
    fn locate(&self, t: f64) -> &DenseSegment {
        let fwd = self.t_end >= self.t_start;
        // binary search over segment starts
        let mut lo = 0usize;
        let mut hi = self.segments.len() - 1;
        while lo < hi {
            let mid = (lo + hi + 1) / 2;
            let s = &self.segments[mid];
            let starts_before = if fwd { s.t0 <= t } else { s.t0 >= t };
            if starts_before {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        &self.segments[lo]
    }
    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        self.locate(t).eval_into(t, out)
    }
    pub fn eval(&self, t: f64) -> Vec<f64> {
        let mut v = vec![0.0; self.dim];
        self.eval_into(t, &mut v);
        v
    }
    pub fn eval_component(&self, t: f64, i: usize) -> f64 {
        self.locate(t).eval_component(t, i)
    }
}

pub struct EventHit {
    pub index: usize,
    pub t: f64,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    ReachedEnd,
    Event(usize),
    MaxSteps,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct OdeStats {
    pub steps: usize,
    pub rejected: usize,
    /// Worst observed |Δc|/|h| over accepted steps.
    pub max_constraint_rate: f64,
}

pub struct OdeSolution {
    pub t_end: f64,
    pub y_end: Vec<f64>,
    pub dense: DenseOutput,
    pub hits: Vec<EventHit>,
    pub stop: StopReason,
    pub stats: OdeStats,
}

// Dormand-Prince coefficients.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

fn initial_step(sys: &dyn OdeSystem, t0: f64, y0: &[f64], f0: &[f64], dir: f64, rtol: f64, atol: f64, span: f64) -> f64 {
    let n = y0.len();
    let mut d0: f64 = 0.0;
    let mut d1: f64 = 0.0;
    for i in 0..n {
        let sc = atol + rtol * y0[i].abs();
        d0 += (y0[i] / sc).powi(2);
        d1 += (f0[i] / sc).powi(2);
    }
    d0 = (d0 / n as f64).sqrt();
    d1 = (d1 / n as f64).sqrt();
    let mut h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h = h.min(0.1 * span.abs());
    // second-derivative probe
    let mut y1 = vec![0.0; n];
    for i in 0..n {
        y1[i] = y0[i] + dir * h * f0[i];
    }
    let mut f1 = vec![0.0; n];
    sys.eval(t0 + dir * h, &y1, &mut f1);
    let mut d2: f64 = 0.0;
    for i in 0..n {
        let sc = atol + rtol * y0[i].abs();
        d2 += ((f1[i] - f0[i]) / sc).powi(2);
    }
    d2 = (d2 / n as f64).sqrt() / h;
    let dm = d1.max(d2);
    let h1 = if dm <= 1e-15 { (h * 1e-3).max(1e-6) } else { (0.01 / dm).powf(0.2) };
    dir * h.min(h1).min(span.abs())
}

/// Integrate `sys` from `(t0, y0)` towards `t_end` (either direction).
pub fn integrate(
    sys: &dyn OdeSystem,
    t0: f64,
    y0: &[f64],
    t_end: f64,
    events: &[EventSpec],
    opts: &OdeOptions,
) -> Result<OdeSolution> {
    let n = sys.dim();
    assert_eq!(y0.len(), n);
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let span = t_end - t0;

    let mut stats = OdeStats::default();
    let mut dense = DenseOutput { segments: Vec::new(), t_start: t0, t_end: t0, dim: n };
    let mut hits: Vec<EventHit> = Vec::new();

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k: Vec<Vec<f64>> = (0..7).map(|_| vec![0.0; n]).collect();
    sys.eval(t, &y, &mut k[0]);

    if span == 0.0 {
        return Ok(OdeSolution { t_end: t, y_end: y, dense, hits, stop: StopReason::ReachedEnd, stats });
    }

    let h_max = opts.h_max.unwrap_or(span.abs());
    let mut h = opts
        .h0
        .map(|v| dir * v.abs())
        .unwrap_or_else(|| initial_step(sys, t0, y0, &k[0], dir, opts.rtol, opts.atol, span));
    h = dir * h.abs().min(h_max);

    let mut g_prev: Vec<f64> = events.iter().map(|e| (e.g)(t, &y)).collect();
    let c_prev_init = opts.constraint.as_ref().map(|(c, _)| c(&y));
    let mut c_prev = c_prev_init.unwrap_or(0.0);

    let mut ytmp = vec![0.0; n];
    let mut y_new = vec![0.0; n];
    let mut first_k = true;

    loop {
        if stats.steps + stats.rejected > opts.max_steps {
            dense.t_end = t;
            return Ok(OdeSolution { t_end: t, y_end: y, dense, hits, stop: StopReason::MaxSteps, stats });
        }
        // clip to the end point
        let mut last = false;
        if (t + h - t_end) * dir >= 0.0 {
            h = t_end - t;
            last = true;
        }
        if h.abs() < 1e-14 * (t.abs().max(1.0)) {
            if last {
                dense.t_end = t;
                return Ok(OdeSolution { t_end: t, y_end: y, dense, hits, stop: StopReason::ReachedEnd, stats });
            }
            return Err(Error::StepSizeUnderflow { t, h });
        }

        if !first_k {
            sys.eval(t, &y, &mut k[0]);
        }
        first_k = false;

        for s in 1..7 {
            for i in 0..n {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s) {
                    let a = A[s][j];
                    if a != 0.0 {
                        acc += a * kj[i];
                    }
                }
                ytmp[i] = y[i] + h * acc;
            }
            let (stage_t, dst) = (t + C[s] * h, s);
            let (head, tail) = k.split_at_mut(dst);
            let _ = head;
            sys.eval(stage_t, &ytmp, &mut tail[0]);
            if s == 6 {
                // stage 7 input is the 5th order solution itself
            }
        }
        // y_new from row 7 of A (the b coefficients); k[6] was evaluated at y from A[6] row,
        // which equals the 5th-order solution, so y_new == ytmp of stage 7.
        y_new.copy_from_slice(&ytmp);

        // error estimate
        let mut err: f64 = 0.0;
        for i in 0..n {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                if E[j] != 0.0 {
                    e += E[j] * kj[i];
                }
            }
            e *= h;
            let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            err += (e / sc) * (e / sc);
        }
        err = (err / n as f64).sqrt();

        let mut accept = err <= 1.0;
        let mut constraint_rate = 0.0;
        if accept {
            if let Some((cmon, budget)) = opts.constraint.as_ref() {
                let c_new = cmon(&y_new);
                constraint_rate = (c_new - c_prev).abs() / h.abs();
                if constraint_rate > *budget && h.abs() > 1e-12 {
                    accept = false;
                }
            }
        }

        if !accept {
            stats.rejected += 1;
            let fac = if err > 1.0 { (0.9 * err.powf(-0.2)).max(0.2) } else { 0.5 };
            h *= fac;
            if h.abs() < 1e-15 * t.abs().max(1.0) {
                return Err(Error::StepSizeUnderflow { t, h });
            }
            continue;
        }

        // dense output coefficients
        let mut rcont: [Vec<f64>; 5] =
            [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]];
        for i in 0..n {
            let dy = y_new[i] - y[i];
            rcont[0][i] = y[i];
            rcont[1][i] = dy;
            rcont[2][i] = h * k[0][i] - dy;
            rcont[3][i] = dy - h * k[6][i] - rcont[2][i];
            let mut d = 0.0;
            for (j, kj) in k.iter().enumerate() {
                if D[j] != 0.0 {
                    d += D[j] * kj[i];
                }
            }
            rcont[4][i] = h * d;
        }
        let seg = DenseSegment { t0: t, h, rcont };
        let t_new = t + h;

        // event scan on this step
        let mut terminal_hit: Option<(usize, f64)> = None;
        let mut step_hits: Vec<(usize, f64)> = Vec::new();
        for (idx, ev) in events.iter().enumerate() {
            let g0 = g_prev[idx];
            let g1 = (ev.g)(t_new, &y_new);
            let crossed = match ev.direction {
                EventDirection::Rising => g0 < 0.0 && g1 >= 0.0,
                EventDirection::Falling => g0 > 0.0 && g1 <= 0.0,
                EventDirection::Any => (g0 < 0.0 && g1 >= 0.0) || (g0 > 0.0 && g1 <= 0.0),
            };
            if crossed {
                let t_star = locate_root(&seg, &ev.g, t, t_new, g0, g1);
                if ev.terminal {
                    match terminal_hit {
                        Some((_, tbest)) if (t_star - tbest) * dir >= 0.0 => {}
                        _ => terminal_hit = Some((idx, t_star)),
                    }
                } else {
                    step_hits.push((idx, t_star));
                }
            }
            g_prev[idx] = g1;
        }

        if let Some((idx, t_star)) = terminal_hit {
            // record non-terminal hits occurring before the stop
            step_hits.retain(|&(_, te)| (te - t_star) * dir <= 0.0);
            step_hits.sort_by(|a, b| ((a.1 - t0) * dir).partial_cmp(&((b.1 - t0) * dir)).unwrap());
            for (i2, te) in step_hits {
                let mut ye = vec![0.0; n];
                seg.eval_into(te, &mut ye);
                hits.push(EventHit { index: i2, t: te, y: ye });
            }
            let mut ystar = vec![0.0; n];
            seg.eval_into(t_star, &mut ystar);
            dense.segments.push(seg);
            dense.t_end = t_star;
            stats.steps += 1;
            stats.max_constraint_rate = stats.max_constraint_rate.max(constraint_rate);
            hits.push(EventHit { index: idx, t: t_star, y: ystar.clone() });
            return Ok(OdeSolution { t_end: t_star, y_end: ystar, dense, hits, stop: StopReason::Event(idx), stats });
        }
        step_hits.sort_by(|a, b| ((a.1 - t0) * dir).partial_cmp(&((b.1 - t0) * dir)).unwrap());
        for (i2, te) in step_hits {
            let mut ye = vec![0.0; n];
            seg.eval_into(te, &mut ye);
            hits.push(EventHit { index: i2, t: te, y: ye });
        }

        dense.segments.push(seg);
        dense.t_end = t_new;
        stats.steps += 1;
        stats.max_constraint_rate = stats.max_constraint_rate.max(constraint_rate);
        if let Some(hook) = opts.post_step.as_ref() {
            hook(&mut y_new);
            for (idx, ev) in events.iter().enumerate() {
                g_prev[idx] = (ev.g)(t_new, &y_new);
            }
        }
        if let Some((cmon, _)) = opts.constraint.as_ref() {
            c_prev = cmon(&y_new);
        }

        std::mem::swap(&mut y, &mut y_new);
        t = t_new;
        if last {
            return Ok(OdeSolution { t_end: t, y_end: y, dense, hits, stop: StopReason::ReachedEnd, stats });
        }
        let fac = (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
        h = (h * fac).clamp(-h_max, h_max);
        if h == 0.0 {
            h = dir * 1e-14;
        }
    }
}

fn locate_root(
    seg: &DenseSegment,
    g: &(dyn Fn(f64, &[f64]) -> f64 + '_),
    mut ta: f64,
    mut tb: f64,
    mut ga: f64,
    _gb: f64,
) -> f64 {
    let mut buf = vec![0.0; seg.rcont[0].len()];
    for _ in 0..90 {
        let tm = 0.5 * (ta + tb);
        if tm == ta || tm == tb {
            break;
        }
        seg.eval_into(tm, &mut buf);
        let gm = g(tm, &buf);
        if gm == 0.0 {
            return tm;
        }
        if (ga < 0.0) == (gm < 0.0) {
            ta = tm;
            ga = gm;
        } else {
            tb = tm;
        }
    }
    tb
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    struct Sho;
    impl OdeSystem for Sho {
        fn dim(&self) -> usize {
            2
        }
        fn eval(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
            dy[0] = y[1];
            dy[1] = -y[0];
        }
    }

    #[test]
    fn harmonic_oscillator_accuracy() {
        let opts = OdeOptions { rtol: 1e-12, atol: 1e-14, ..Default::default() };
        let sol = integrate(&Sho, 0.0, &[1.0, 0.0], 10.0, &[], &opts).unwrap();
        assert_relative_eq!(sol.y_end[0], 10.0_f64.cos(), epsilon = 1e-10);
        assert_relative_eq!(sol.y_end[1], -(10.0_f64.sin()), epsilon = 1e-10);
    }

    #[test]
    fn dense_output_accuracy() {
        let opts = OdeOptions { rtol: 1e-12, atol: 1e-14, ..Default::default() };
        let sol = integrate(&Sho, 0.0, &[1.0, 0.0], 10.0, &[], &opts).unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..1000 {
            let t = 10.0 * (i as f64 + 0.5) / 1000.0;
            let v = sol.dense.eval(t);
            worst = worst.max((v[0] - t.cos()).abs()).max((v[1] + t.sin()).abs());
        }
        assert!(worst < 5e-10, "dense output error {worst:e}");
    }

    #[test]
    fn backward_integration() {
        let opts = OdeOptions { rtol: 1e-12, atol: 1e-14, ..Default::default() };
        let sol = integrate(&Sho, 0.0, &[1.0, 0.0], -3.0, &[], &opts).unwrap();
        assert_relative_eq!(sol.y_end[0], 3.0_f64.cos(), epsilon = 1e-10);
        assert_relative_eq!(sol.y_end[1], 3.0_f64.sin(), epsilon = 1e-10);
    }

    #[test]
    fn event_location() {
        // stop when y0 crosses zero going down: first root of cos(t) at pi/2
        let ev = vec![EventSpec::terminal(|_t: f64, y: &[f64]| y[0], EventDirection::Falling)];
        let opts = OdeOptions { rtol: 1e-12, atol: 1e-14, ..Default::default() };
        let sol = integrate(&Sho, 0.0, &[1.0, 0.0], 10.0, &ev, &opts).unwrap();
        assert_relative_eq!(sol.t_end, std::f64::consts::FRAC_PI_2, epsilon = 1e-12);
        assert!(matches!(sol.stop, StopReason::Event(0)));
    }

    #[test]
    fn recording_events_collect_all_roots() {
        let ev = vec![EventSpec::recording(|_t: f64, y: &[f64]| y[0], EventDirection::Any)];
        let opts = OdeOptions { rtol: 1e-11, atol: 1e-13, ..Default::default() };
        let sol = integrate(&Sho, 0.0, &[1.0, 0.0], 10.0, &ev, &opts).unwrap();
        // roots of cos at pi/2, 3pi/2, 5pi/2 -> 3 roots below 10
        assert_eq!(sol.hits.len(), 3);
        assert_relative_eq!(sol.hits[1].t, 1.5 * std::f64::consts::PI, epsilon = 1e-10);
    }

    #[test]
    fn constraint_rejection_keeps_energy() {
        let cons: Box<dyn Fn(&[f64]) -> f64> = Box::new(|y: &[f64]| y[0] * y[0] + y[1] * y[1]);
        let opts = OdeOptions {
            rtol: 1e-9,
            atol: 1e-11,
            constraint: Some((cons, 1e-9)),
            ..Default::default()
        };
        let sol = integrate(&Sho, 0.0, &[1.0, 0.0], 20.0, &[], &opts).unwrap();
        let e = sol.y_end[0] * sol.y_end[0] + sol.y_end[1] * sol.y_end[1];
        assert!((e - 1.0).abs() < 1e-9 * 21.0);
        assert!(sol.stats.max_constraint_rate <= 1e-9);
    }
}
