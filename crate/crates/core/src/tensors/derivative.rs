//! Symmetrized covariant derivative `D = S(∇)` from the model's
//! Christoffel symbols, in either chart.

use crate::dynamics::phase::Chart;
use crate::geometry::MetricModel;
use crate::num::linalg::{bmat_inv, bmat_mul, BVec};
use crate::tensors::field::TensorField;
use crate::tensors::sym::SymTensor;

/// Coordinate Christoffels `Γ^k_{ij}` in the collar chart
/// (index 0 = ρ, 1.. = y).
pub fn collar_christoffels(model: &MetricModel, rho: f64, y: &BVec) -> [[[f64; 3]; 3]; 3] {
    let d = model.boundary_dim();
    let jet = model.collar_jet1(rho, y);
    let w = bmat_inv(&jet.h, d);
    let wa = bmat_mul(&w, &jet.dr_h, d);
    let mut g = [[[0.0; 3]; 3]; 3];
    g[0][0][0] = -2.0 / rho;
    for i in 0..d {
        for j in 0..d {
            g[0][i + 1][j + 1] = rho * jet.h[i][j] - 0.5 * rho * rho * jet.dr_h[i][j];
        }
        for k in 0..d {
            let v = 0.5 * wa[k][i] - if k == i { 1.0 / rho } else { 0.0 };
            g[k + 1][0][i + 1] = v;
            g[k + 1][i + 1][0] = v;
        }
    }
    // slice Christoffels of h_ρ
    for k in 0..d {
        for i in 0..d {
            for j in 0..d {
                let mut s = 0.0;
                for l in 0..d {
                    s += w[k][l] * (jet.dy_h[i][j][l] + jet.dy_h[j][i][l] - jet.dy_h[l][i][j]);
                }
                g[k + 1][i + 1][j + 1] = 0.5 * s;
            }
        }
    }
    g
}

/// Coordinate Christoffels in the cap chart.
pub fn cap_christoffels(model: &MetricModel, u: &[f64; 3]) -> [[[f64; 3]; 3]; 3] {
    let n = model.dim();
    let (gmat, dg) = model.cap_metric_jet1(u);
    let w = crate::num::linalg::cmat_inv(&gmat, n);
    let mut g = [[[0.0; 3]; 3]; 3];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for l in 0..n {
                    s += w[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
                }
                g[k][i][j] = 0.5 * s;
            }
        }
    }
    g
}

fn nabla(n: usize, order: usize, c: &SymTensor, dc: &[SymTensor; 3], gamma: &[[[f64; 3]; 3]; 3]) -> SymTensor {
    // (∇C)_{α, I} = ∂_α C_I − Σ_s Γ^β_{α i_s} C_{I[s→β]}
    let mut out = SymTensor::zeros(n, order + 1);
    crate::tensors::sym::for_each_index(n, order + 1, |idx| {
        let alpha = idx[0];
        let inner = &idx[1..];
        let mut v = dc[alpha].get(inner);
        for s in 0..order {
            let mut rep = inner.to_vec();
            for beta in 0..n {
                rep[s] = beta;
                let g = gamma[beta][alpha][inner[s]];
                if g != 0.0 {
                    v -= g * c.get(&rep);
                }
            }
        }
        out.set(idx, v);
    });
    out
}

/// Symmetrized derivative at a collar point, returned in frame components.
pub fn sym_derivative_collar(
    model: &MetricModel,
    field: &dyn TensorField,
    rho: f64,
    y: &BVec,
) -> SymTensor {
    let n = model.dim();
    let m = field.order();
    let (f, fdr, fdy) = field.collar_jet(model, rho, y);
    // frame -> coordinate: C_I = F_I ρ^{-(m + t_I)}, t_I = #transversal slots
    let mut c = SymTensor::zeros(n, m);
    let mut dc = [SymTensor::zeros(n, m), SymTensor::zeros(n, m), SymTensor::zeros(n, m)];
    crate::tensors::sym::for_each_index(n, m, |idx| {
        let t = idx.iter().filter(|&&i| i == 0).count();
        let s = rho.powi(-((m + t) as i32));
        let fv = f.get(idx);
        c.set(idx, fv * s);
        dc[0].set(idx, fdr.get(idx) * s - (m + t) as f64 * fv * s / rho);
        for k in 0..n - 1 {
            dc[1 + k].set(idx, fdy[k].get(idx) * s);
        }
    });
    let gamma = collar_christoffels(model, rho, y);
    let dsym = nabla(n, m, &c, &dc, &gamma).symmetrized();
    // coordinate -> frame for the (m+1)-tensor
    let mut out = SymTensor::zeros(n, m + 1);
    crate::tensors::sym::for_each_index(n, m + 1, |jdx| {
        let t = jdx.iter().filter(|&&i| i == 0).count();
        let s = rho.powi((m + 1 + t) as i32);
        out.set(jdx, dsym.get(jdx) * s);
    });
    out
}

/// Symmetrized derivative at a cap point (coordinate components).
pub fn sym_derivative_cap(model: &MetricModel, field: &dyn TensorField, u: &[f64; 3]) -> SymTensor {
    let n = model.dim();
    let m = field.order();
    let (c, dc) = field.cap_jet(model, u);
    let gamma = cap_christoffels(model, u);
    nabla(n, m, &c, &dc, &gamma).symmetrized()
}

/// `Du` as a field of order `m + 1` (values only; no further derivatives).
pub struct DerivedField<'a> {
    pub base: &'a dyn TensorField,
}

impl TensorField for DerivedField<'_> {
    fn order(&self) -> usize {
        self.base.order() + 1
    }
    fn decay(&self) -> f64 {
        // the scattering covariant derivative gains one frame order:
        // ∇(dρ/ρ²) = ½∂ρh − h/ρ is O(ρ) in frame components, and likewise
        // for tangential fields
        self.base.decay() + 1.0
    }
    fn collar_value(&self, model: &MetricModel, rho: f64, y: &BVec) -> SymTensor {
        sym_derivative_collar(model, self.base, rho, y)
    }
    fn cap_value(&self, model: &MetricModel, u: &[f64; 3]) -> SymTensor {
        sym_derivative_cap(model, self.base, u)
    }
    fn collar_jet(&self, _m: &MetricModel, _r: f64, _y: &BVec) -> (SymTensor, SymTensor, [SymTensor; 2]) {
        unimplemented!("second derivatives of derived fields are not provided")
    }
    fn cap_jet(&self, _m: &MetricModel, _u: &[f64; 3]) -> (SymTensor, [SymTensor; 3]) {
        unimplemented!("second derivatives of derived fields are not provided")
    }
}

/// Evaluate `Du` at a chart point.
pub fn sym_derivative_at(
    model: &MetricModel,
    field: &dyn TensorField,
    chart: Chart,
    state: &[f64],
) -> SymTensor {
    match chart {
        Chart::Collar => sym_derivative_collar(model, field, state[0], &[state[2], state[3]]),
        Chart::Cap => sym_derivative_cap(model, field, &[state[0], state[1], state[2]]),
    }
}
