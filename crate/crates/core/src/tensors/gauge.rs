//! Gauge normalization: kill the transversal (`dρ/ρ²`) components of a
//! decaying symmetric tensor with a symmetrized derivative.
//!
//! For order 1, `u = q₀` with `q₀(ρ,y) = ∫₀^ρ s⁻² f₀(s,y) ds` removes the
//! transversal component exactly. For order 2 the mixed component is
//! removed by a tangential 1-form `q₁` solving the collar ODE
//! `d(ρ q₁)/dρ = (∂ρh · h⁻¹)(ρ q₁) + 2F/ρ`, `F = f(E₀,Eᵢ) − ½ρ ∂y q₀`,
//! integrated from the decaying solution at ρ = 0.

use crate::error::{Error, Result};
use crate::geometry::MetricModel;
use crate::num::linalg::{bmat_inv, bmat_mul, bmat_mulvec, BVec};
use crate::num::ode::{self, OdeOptions, OdeSystem};
use crate::tensors::derivative::sym_derivative_collar;
use crate::tensors::field::TensorField;
use crate::tensors::sym::SymTensor;

/// The gauge potential of order `m − 1`, evaluated by integrating the
/// collar ODE from the boundary at each requested point.
pub struct GaugePotential<'a> {
    pub model: &'a MetricModel,
    pub f: &'a dyn TensorField,
    pub m: usize,
}

struct GaugeOde<'a> {
    model: &'a MetricModel,
    f: &'a dyn TensorField,
    m: usize,
    y: BVec,
}

// state: [q0, ∂y1 q0, ∂y2 q0, p1, p2] with p = ρ q1
impl OdeSystem for GaugeOde<'_> {
    fn dim(&self) -> usize {
        5
    }
    fn eval(&self, rho: f64, v: &[f64], dv: &mut [f64]) {
        let d = self.model.boundary_dim();
        dv.fill(0.0);
        if rho <= 0.0 {
            return;
        }
        let (fv, _, fdy) = self.f.collar_jet(self.model, rho, &self.y);
        let trans = vec![0usize; self.m];
        let f0 = fv.get(&trans);
        dv[0] = f0 / (rho * rho);
        for k in 0..d {
            dv[1 + k] = fdy[k].get(&trans) / (rho * rho);
        }
        if self.m == 2 {
            let jet = self.model.collar_jet1(rho, &self.y);
            let w = bmat_inv(&jet.h, d);
            let aw = bmat_mul(&jet.dr_h, &w, d);
            let p = [v[3], v[4]];
            let awp = bmat_mulvec(&aw, &p, d);
            for i in 0..d {
                let fmix = fv.get(&[0, i + 1]);
                let big_f = fmix - 0.5 * rho * v[1 + i];
                dv[3 + i] = awp[i] + 2.0 * big_f / rho;
            }
        }
    }
}

impl GaugePotential<'_> {
    /// `(q₀, ∂y q₀, q₁)` at a collar point.
    fn solve(&self, rho: f64, y: &BVec) -> (f64, [f64; 2], [f64; 2]) {
        // q ~ ρ^{k−1} with k ≥ 2: below this floor everything is zero to
        // far beyond working precision
        if rho <= 1e-10 {
            return (0.0, [0.0; 2], [0.0; 2]);
        }
        let sys = GaugeOde { model: self.model, f: self.f, m: self.m, y: *y };
        let opts = OdeOptions { rtol: 1e-12, atol: 1e-14, ..Default::default() };
        let sol = ode::integrate(&sys, 0.0, &[0.0; 5], rho, &[], &opts).expect("gauge ode");
        let v = sol.y_end;
        (v[0], [v[1], v[2]], [v[3] / rho, v[4] / rho])
    }
}

impl TensorField for GaugePotential<'_> {
    fn order(&self) -> usize {
        self.m - 1
    }
    fn decay(&self) -> f64 {
        (self.f.decay() - 1.0).max(0.0)
    }
    fn collar_value(&self, model: &MetricModel, rho: f64, y: &BVec) -> SymTensor {
        let n = model.dim();
        let (q0, _, q1) = self.solve(rho, y);
        let mut t = SymTensor::zeros(n, self.m - 1);
        if self.m == 1 {
            t.set(&[], q0);
        } else {
            t.set(&[0], q0);
            for i in 0..model.boundary_dim() {
                t.set(&[i + 1], q1[i]);
            }
        }
        t
    }
    fn cap_value(&self, model: &MetricModel, _u: &[f64; 3]) -> SymTensor {
        SymTensor::zeros(model.dim(), self.m - 1)
    }
    fn collar_jet(&self, model: &MetricModel, rho: f64, y: &BVec) -> (SymTensor, SymTensor, [SymTensor; 2]) {
        let n = model.dim();
        let d = model.boundary_dim();
        let (q0, dyq0, q1) = self.solve(rho, y);
        let trans = vec![0usize; self.m];
        let fv = self.f.collar_value(model, rho, y);
        let f0 = fv.get(&trans);
        let mut v = SymTensor::zeros(n, self.m - 1);
        let mut dr = SymTensor::zeros(n, self.m - 1);
        let mut dy = [SymTensor::zeros(n, self.m - 1), SymTensor::zeros(n, self.m - 1)];
        if self.m == 1 {
            v.set(&[], q0);
            dr.set(&[], f0 / (rho * rho));
            for k in 0..d {
                dy[k].set(&[], dyq0[k]);
            }
        } else {
            v.set(&[0], q0);
            dr.set(&[0], f0 / (rho * rho));
            for k in 0..d {
                dy[k].set(&[0], dyq0[k]);
            }
            // ∂ρ q1 from the ODE right-hand side; ∂y q1 by finite differences
            let jet = model.collar_jet1(rho, y);
            let w = bmat_inv(&jet.h, d);
            let aw = bmat_mul(&jet.dr_h, &w, d);
            let p = [q1[0] * rho, q1[1] * rho];
            let awp = bmat_mulvec(&aw, &p, d);
            for i in 0..d {
                v.set(&[i + 1], q1[i]);
                let fmix = fv.get(&[0, i + 1]);
                let big_f = fmix - 0.5 * rho * dyq0[i];
                let dpdr = awp[i] + 2.0 * big_f / rho;
                dr.set(&[i + 1], (dpdr - q1[i]) / rho);
            }
            let h = 1e-5;
            for k in 0..d {
                let mut yp = *y;
                yp[k] += h;
                let mut ym = *y;
                ym[k] -= h;
                let (_, _, q1p) = self.solve(rho, &yp);
                let (_, _, q1m) = self.solve(rho, &ym);
                for i in 0..d {
                    dy[k].set(&[i + 1], (q1p[i] - q1m[i]) / (2.0 * h));
                }
            }
        }
        (v, dr, dy)
    }
    fn cap_jet(&self, model: &MetricModel, _u: &[f64; 3]) -> (SymTensor, [SymTensor; 3]) {
        let n = model.dim();
        let z = SymTensor::zeros(n, self.m - 1);
        (z.clone(), [z.clone(), z.clone(), z])
    }
}

/// Result of gauge normalization.
pub struct GaugeReport {
    /// Sup over the verification grid of the transversal components of
    /// `f − Du`.
    pub max_transversal_residual: f64,
    /// Grid used for the check.
    pub grid_points: usize,
}

/// Build the gauge potential for `f` of order `m ∈ {1, 2}` and verify that
/// the transversal components of `f − Du` vanish on a collar grid.
pub fn gauge_normalize<'a>(
    model: &'a MetricModel,
    f: &'a dyn TensorField,
    rho_check: f64,
) -> Result<(GaugePotential<'a>, GaugeReport)> {
    let m = f.order();
    if m == 0 || m > 2 {
        return Err(Error::InvalidModel("gauge normalization supports orders 1 and 2".into()));
    }
    if f.decay() < 2.0 {
        return Err(Error::DecayHypothesis(format!(
            "gauge normalization needs decay k ≥ 2, got {}",
            f.decay()
        )));
    }
    let pot = GaugePotential { model, f, m };
    let d = model.boundary_dim();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for ir in 1..=6 {
        let rho = rho_check * ir as f64 / 6.0;
        for iy in 0..4 {
            let y = if d == 1 {
                [crate::geometry::boundary::TWO_PI * iy as f64 / 4.0 + 0.1, 0.0]
            } else {
                [0.4 + 0.55 * iy as f64, 0.9 * iy as f64 + 0.3]
            };
            let du = sym_derivative_collar(model, &pot, rho, &y);
            let fv = f.collar_value(model, rho, &y);
            // transversal components of the residual
            crate::tensors::sym::for_each_index(model.dim(), m, |idx| {
                if idx.contains(&0) {
                    worst = worst.max((fv.get(idx) - du.get(idx)).abs());
                }
            });
            count += 1;
        }
    }
    Ok((pot, GaugeReport { max_transversal_residual: worst, grid_points: count }))
}
