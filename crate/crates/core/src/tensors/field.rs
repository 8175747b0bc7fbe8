//! Symmetric tensor fields with analytic coefficient data.
//!
//! Collar fields carry scattering-frame components (`{dρ/ρ², dy_i/ρ}`
//! duals), cap fields coordinate components. Coefficients are analytic
//! callables (powers of ρ times boundary trigonometric/harmonic scalars,
//! radial Gaussians, interior bumps) so quadrature accuracy is never
//! limited by interpolation.

use crate::geometry::perturbation::{BoundaryScalar, CapBump, CapTensor, RhoCutoff};
use crate::geometry::MetricModel;
use crate::num::linalg::BVec;
use crate::tensors::sym::SymTensor;

/// Scalar coefficient on the collar: `ρ^k · χ(ρ) · Σ_j ρ^j s_j(y)`.
#[derive(Clone, Debug)]
pub struct CollarScalar {
    pub k: f64,
    pub cutoff: Option<RhoCutoff>,
    pub terms: Vec<(u32, BoundaryScalar)>,
}

impl CollarScalar {
    pub fn simple(k: f64, s: BoundaryScalar) -> Self {
        CollarScalar { k, cutoff: None, terms: vec![(0, s)] }
    }

    pub fn constant(k: f64, c: f64) -> Self {
        Self::simple(k, BoundaryScalar::Constant(c))
    }

    /// Value, ∂ρ and ∂y at a collar point (ρ > 0 required when `k < 1`
    /// because of the ρ-derivative).
    pub fn jet(&self, rho: f64, y: &BVec) -> (f64, f64, [f64; 2]) {
        let (chi, chip, _) = match &self.cutoff {
            Some(c) => c.jet(rho),
            None => (1.0, 0.0, 0.0),
        };
        let mut base = 0.0;
        let mut base_dr = 0.0;
        let mut base_dy = [0.0; 2];
        for (j, s) in &self.terms {
            let (v, dy, _) = s.jet(y);
            let rj = rho.powi(*j as i32);
            base += rj * v;
            if *j >= 1 {
                base_dr += *j as f64 * rho.powi(*j as i32 - 1) * v;
            }
            base_dy[0] += rj * dy[0];
            base_dy[1] += rj * dy[1];
        }
        let rk = if self.k == 0.0 { 1.0 } else { rho.powf(self.k) };
        let rk_dr = if self.k == 0.0 { 0.0 } else { self.k * rho.powf(self.k - 1.0) };
        let val = rk * chi * base;
        let dr = rk_dr * chi * base + rk * chip * base + rk * chi * base_dr;
        let dy = [rk * chi * base_dy[0], rk * chi * base_dy[1]];
        (val, dr, dy)
    }

    pub fn value(&self, rho: f64, y: &BVec) -> f64 {
        let (chi, _, _) = match &self.cutoff {
            Some(c) => c.jet(rho),
            None => (1.0, 0.0, 0.0),
        };
        let mut base = 0.0;
        for (j, s) in &self.terms {
            base += rho.powi(*j as i32) * s.value(y);
        }
        let rk = if self.k == 0.0 { 1.0 } else { rho.powf(self.k) };
        rk * chi * base
    }
}

/// Frame components with their ρ- and y-derivatives.
pub type CollarTensorJet = (SymTensor, SymTensor, [SymTensor; 2]);
/// Coordinate components with their u-derivatives.
pub type CapTensorJet = (SymTensor, [SymTensor; 3]);

/// A symmetric tensor field evaluated per chart.
pub trait TensorField {
    fn order(&self) -> usize;
    /// Leading decay order k in `|f|_g ≤ C ρ^k`.
    fn decay(&self) -> f64;
    /// Transversality depth ℓ: components with more than ℓ transversal
    /// slots vanish near ∂M (ℓ = order means no restriction, ℓ = 0 means
    /// fully tangential).
    fn transversal_depth(&self) -> usize {
        self.order()
    }
    /// Scattering-frame components at a collar point.
    fn collar_value(&self, model: &MetricModel, rho: f64, y: &BVec) -> SymTensor;
    /// Coordinate components at a cap point (zero for collar-supported fields).
    fn cap_value(&self, model: &MetricModel, u: &[f64; 3]) -> SymTensor;
    /// Frame components with ∂ρ and ∂y derivatives (needed by the
    /// symmetrized derivative).
    fn collar_jet(&self, model: &MetricModel, rho: f64, y: &BVec) -> CollarTensorJet;
    /// Coordinate components with ∂u derivatives.
    fn cap_jet(&self, model: &MetricModel, u: &[f64; 3]) -> CapTensorJet;
}

/// Collar field given by per-component frame coefficients (symmetric in
/// the multi-index); zero in the cap.
pub struct CollarFrameField {
    pub order: usize,
    pub decay: f64,
    pub transversal_depth: usize,
    /// Components keyed by nondecreasing frame multi-indices.
    pub comps: Vec<(Vec<usize>, CollarScalar)>,
}

impl CollarFrameField {
    pub fn scalar(c: CollarScalar) -> Self {
        CollarFrameField { order: 0, decay: c.k, transversal_depth: 0, comps: vec![(vec![], c)] }
    }
}

impl TensorField for CollarFrameField {
    fn order(&self) -> usize {
        self.order
    }
    fn decay(&self) -> f64 {
        self.decay
    }
    fn transversal_depth(&self) -> usize {
        self.transversal_depth
    }
    fn collar_value(&self, model: &MetricModel, rho: f64, y: &BVec) -> SymTensor {
        let n = model.dim();
        let mut t = SymTensor::zeros(n.max(1), self.order);
        for (idx, c) in &self.comps {
            t.set_sym(idx, c.value(rho, y));
        }
        t
    }
    fn cap_value(&self, model: &MetricModel, _u: &[f64; 3]) -> SymTensor {
        SymTensor::zeros(model.dim().max(1), self.order)
    }
    fn collar_jet(&self, model: &MetricModel, rho: f64, y: &BVec) -> (SymTensor, SymTensor, [SymTensor; 2]) {
        let n = model.dim();
        let mut v = SymTensor::zeros(n.max(1), self.order);
        let mut dr = SymTensor::zeros(n.max(1), self.order);
        let mut dy = [SymTensor::zeros(n.max(1), self.order), SymTensor::zeros(n.max(1), self.order)];
        for (idx, c) in &self.comps {
            let (cv, cdr, cdy) = c.jet(rho, y);
            v.set_sym(idx, cv);
            dr.set_sym(idx, cdr);
            dy[0].set_sym(idx, cdy[0]);
            dy[1].set_sym(idx, cdy[1]);
        }
        (v, dr, dy)
    }
    fn cap_jet(&self, model: &MetricModel, _u: &[f64; 3]) -> (SymTensor, [SymTensor; 3]) {
        let n = model.dim().max(1);
        (
            SymTensor::zeros(n, self.order),
            [SymTensor::zeros(n, self.order), SymTensor::zeros(n, self.order), SymTensor::zeros(n, self.order)],
        )
    }
}

/// Radial Gaussian scalar `amp · e^{−(r/width)²}` with `r` the model's
/// interior radius; defined on both charts (collar: `r = 1/ρ`).
pub struct GaussianRadial {
    pub amp: f64,
    pub width: f64,
}

impl TensorField for GaussianRadial {
    fn order(&self) -> usize {
        0
    }
    fn decay(&self) -> f64 {
        // decays faster than any power
        50.0
    }
    fn transversal_depth(&self) -> usize {
        0
    }
    fn collar_value(&self, _model: &MetricModel, rho: f64, _y: &BVec) -> SymTensor {
        let v = if rho <= 0.0 { 0.0 } else { self.amp * (-1.0 / (rho * rho * self.width * self.width)).exp() };
        SymTensor::scalar(v)
    }
    fn cap_value(&self, _model: &MetricModel, u: &[f64; 3]) -> SymTensor {
        let r2 = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
        SymTensor::scalar(self.amp * (-r2 / (self.width * self.width)).exp())
    }
    fn collar_jet(&self, model: &MetricModel, rho: f64, y: &BVec) -> (SymTensor, SymTensor, [SymTensor; 2]) {
        let v = self.collar_value(model, rho, y);
        let w2 = self.width * self.width;
        let dv = v.get(&[]) * (2.0 / (rho * rho * rho * w2));
        let mut dr = SymTensor::scalar(dv);
        let _ = &mut dr;
        (v, dr, [SymTensor::scalar(0.0), SymTensor::scalar(0.0)])
    }
    fn cap_jet(&self, model: &MetricModel, u: &[f64; 3]) -> (SymTensor, [SymTensor; 3]) {
        let v = self.cap_value(model, u);
        let w2 = self.width * self.width;
        let vv = v.get(&[]);
        let g = |k: usize| SymTensor::scalar(vv * (-2.0 * u[k] / w2));
        (v, [g(0), g(1), g(2)])
    }
}

/// Cap-chart field with bump-modulated constant coordinate components;
/// zero on the collar (compact interior support).
pub struct CapCoordField {
    pub order: usize,
    pub bump: CapBump,
    /// Constant coefficient array (symmetric), indexed like SymTensor.
    pub coeff: SymTensor,
}

impl CapCoordField {
    pub fn from_tensor2(model_dim: usize, t: &CapTensor) -> Self {
        let mut coeff = SymTensor::zeros(model_dim, 2);
        for i in 0..model_dim {
            for j in 0..model_dim {
                coeff.set(&[i, j], t.coeff[i][j]);
            }
        }
        CapCoordField { order: 2, bump: t.bump, coeff }
    }
}

impl TensorField for CapCoordField {
    fn order(&self) -> usize {
        self.order
    }
    fn decay(&self) -> f64 {
        50.0
    }
    fn collar_value(&self, model: &MetricModel, _rho: f64, _y: &BVec) -> SymTensor {
        SymTensor::zeros(model.dim().max(1), self.order)
    }
    fn cap_value(&self, model: &MetricModel, u: &[f64; 3]) -> SymTensor {
        let n = model.dim();
        let b = self.bump.value(u, n);
        let mut t = self.coeff.clone();
        t.scale(b);
        t
    }
    fn collar_jet(&self, model: &MetricModel, _rho: f64, _y: &BVec) -> (SymTensor, SymTensor, [SymTensor; 2]) {
        let n = model.dim().max(1);
        let z = SymTensor::zeros(n, self.order);
        (z.clone(), z.clone(), [z.clone(), z])
    }
    fn cap_jet(&self, model: &MetricModel, u: &[f64; 3]) -> (SymTensor, [SymTensor; 3]) {
        let n = model.dim();
        let (b, g, _) = self.bump.jet(u, n);
        let mut v = self.coeff.clone();
        v.scale(b);
        let mk = |s: f64| {
            let mut t = self.coeff.clone();
            t.scale(s);
            t
        };
        (v, [mk(g[0]), mk(g[1]), mk(g[2])])
    }
}

/// The metric itself as an order-2 scattering tensor (`lift ≡ 1` on the
/// unit bundle).
pub struct MetricField;

impl TensorField for MetricField {
    fn order(&self) -> usize {
        2
    }
    fn decay(&self) -> f64 {
        0.0
    }
    fn collar_value(&self, model: &MetricModel, rho: f64, y: &BVec) -> SymTensor {
        // frame components: g(E₀,E₀) = 1, g(Eᵢ,Eⱼ) = h_ij
        let n = model.dim();
        let d = model.boundary_dim();
        let h = model.collar_jet1(rho, y).h;
        let mut t = SymTensor::zeros(n, 2);
        t.set(&[0, 0], 1.0);
        for i in 0..d {
            for j in 0..d {
                t.set(&[i + 1, j + 1], h[i][j]);
            }
        }
        t
    }
    fn cap_value(&self, model: &MetricModel, u: &[f64; 3]) -> SymTensor {
        let n = model.dim();
        let (g, _) = model.cap_metric_jet1(u);
        let mut t = SymTensor::zeros(n, 2);
        for i in 0..n {
            for j in 0..n {
                t.set(&[i, j], g[i][j]);
            }
        }
        t
    }
    fn collar_jet(&self, _model: &MetricModel, _rho: f64, _y: &BVec) -> (SymTensor, SymTensor, [SymTensor; 2]) {
        unimplemented!("metric field jets are not used")
    }
    fn cap_jet(&self, _model: &MetricModel, _u: &[f64; 3]) -> (SymTensor, [SymTensor; 3]) {
        unimplemented!("metric field jets are not used")
    }
}
