//! Dense-output trajectories of the rescaled flow.

use crate::dynamics::phase::{Chart, PhasePoint, STATE_W};
use crate::error::{Error, Result};
use crate::num::ode::DenseOutput;

/// Why the integration stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Arrival {
    /// Reached the boundary face (`ρ = 0` located to event tolerance).
    Boundary,
    /// τ guard hit before boundary arrival: possibly trapped.
    MaxTau,
    /// Dived below the interior radius floor (cone-tip capture guard).
    TipGuard,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct FlowDiagnostics {
    pub steps: usize,
    pub rejected: usize,
    /// Worst |dC/dτ| over accepted steps (C the Hamiltonian constraint).
    pub max_constraint_rate: f64,
    /// Worst |C − 1| sampled along the trajectory.
    pub max_constraint_defect: f64,
}

#[derive(Clone)]
pub struct Segment {
    pub chart: Chart,
    pub dense: DenseOutput,
}

/// An integral curve of `X̄` with dense output across chart segments.
#[derive(Clone)]
pub struct Trajectory {
    pub segments: Vec<Segment>,
    pub tau_start: f64,
    pub tau_end: f64,
    pub arrival: Arrival,
    pub diagnostics: FlowDiagnostics,
    /// +1 forward, −1 backward.
    pub direction: f64,
}

impl Trajectory {
    /// Rescaled arrival time: `Some(τ⁺)` (forward) or `Some(τ⁻)` (backward)
    /// when the boundary was reached, `None` when trapped/guarded
    /// (the ±∞ sentinel).
    pub fn arrival_tau(&self) -> Option<f64> {
        match self.arrival {
            Arrival::Boundary => Some(self.tau_end),
            _ => None,
        }
    }

    fn segment_at(&self, tau: f64) -> &Segment {
        let dir = self.direction;
        for seg in &self.segments {
            let (a, b) = (seg.dense.t_start, seg.dense.t_end);
            if (tau - a) * dir >= -1e-14 && (b - tau) * dir >= -1e-14 {
                return seg;
            }
        }
        // clamp to the last segment
        self.segments.last().expect("trajectory has segments")
    }

    /// Raw state (chart, 6 flow components + accumulators) at τ.
    pub fn eval_raw(&self, tau: f64) -> (Chart, Vec<f64>) {
        let seg = self.segment_at(tau);
        (seg.chart, seg.dense.eval(tau))
    }

    pub fn eval(&self, tau: f64) -> PhasePoint {
        let (chart, s) = self.eval_raw(tau);
        PhasePoint::from_state(chart, &s)
    }

    /// Final phase point.
    pub fn end_point(&self) -> PhasePoint {
        self.eval(self.tau_end)
    }

    /// Exit data `(y, η)` on the boundary face, when the trajectory arrived.
    pub fn exit_boundary_point(&self) -> Result<(crate::num::linalg::BVec, crate::num::linalg::BVec)> {
        if self.arrival != Arrival::Boundary {
            return Err(Error::TrappedGeodesic);
        }
        match self.end_point() {
            PhasePoint::Collar { y, eta, .. } => Ok((y, eta)),
            _ => Err(Error::ChartTransition("boundary arrival not in collar chart".into())),
        }
    }

    /// Unrescaled time elapsed between two interior rescaled times,
    /// `t(τ_b) − t(τ_a) = ∫ ρ⁻² dτ`, by quadrature over the dense output.
    /// Diverges at the boundary ends; both arguments must be strictly
    /// inside `(tau_start, tau_end)`. Intended for reporting between
    /// interior cut points (the length pipeline carries the quadrature as
    /// solver state instead).
    pub fn t_between(
        &self,
        model: &crate::geometry::MetricModel,
        tau_a: f64,
        tau_b: f64,
    ) -> Result<f64> {
        crate::num::quad::integrate(
            |tau| {
                let (chart, s) = self.eval_raw(tau);
                let rho = match chart {
                    Chart::Collar => s[0],
                    Chart::Cap => {
                        let r = (s[0] * s[0] + s[1] * s[1] + s[2] * s[2]).sqrt();
                        model.rho_global_of_r(r)
                    }
                };
                1.0 / (rho * rho)
            },
            tau_a,
            tau_b,
            1e-10,
            1e-12,
        )
    }

    /// Number of accumulator components carried alongside the flow.
    pub fn n_accumulators(&self) -> usize {
        self.segments.first().map(|s| s.dense.dim() - STATE_W).unwrap_or(0)
    }

    /// Accumulator value at τ (index within the accumulator block).
    pub fn accumulator(&self, tau: f64, idx: usize) -> f64 {
        let seg = self.segment_at(tau);
        seg.dense.eval_component(tau, STATE_W + idx)
    }
}
