//! Metric models in normal form near the boundary.
//!
//! Every model exposes the collar family `h_ρ(y)` (with two derivatives in
//! each variable) on its collar chart where `g = dρ²/ρ⁴ + h_ρ/ρ²` holds
//! exactly. Warped-product models additionally expose a cap chart in
//! Euclidean-type coordinates `u` where the metric is `φ(r) I + χ(r) u uᵀ`
//! plus optional compactly supported interior patches (an added symmetric
//! 2-tensor or a conformal factor).

use crate::error::{Error, Result};
use crate::geometry::boundary::BoundaryManifold;
use crate::geometry::perturbation::{CapBump, CapTensor, CollarPerturbation};
use crate::geometry::profile::WarpedProfile;
use crate::num::linalg::{BMat, BVec, bmat_inv, bmat_min_eig, bmat_mul, BZERO, CMat, CZERO};

/// Collar metric data `(h, h⁻¹, ∂ρh, ∂yh)` in the scattering frame.
#[derive(Clone, Debug)]
pub struct CollarMetric {
    pub h: BMat,
    pub h_inv: BMat,
    pub dr_h: BMat,
    pub dy_h: [BMat; 2],
}

/// First-order collar jet (the flow needs nothing more).
#[derive(Clone, Debug)]
pub struct CollarJet1 {
    pub h: BMat,
    pub dr_h: BMat,
    pub dy_h: [BMat; 2],
}

/// Second-order collar jet for curvature and Christoffel derivatives.
#[derive(Clone, Debug)]
pub struct CollarJet2 {
    pub h: BMat,
    pub dr_h: BMat,
    pub drr_h: BMat,
    pub dy_h: [BMat; 2],
    pub dry_h: [BMat; 2],
    pub dyy_h: [[BMat; 2]; 2],
}

#[derive(Clone, Debug)]
pub enum InteriorPatch {
    None,
    /// `g + s·q` with `q` compactly supported in the cap chart.
    AddTensor { q: CapTensor, s: f64 },
    /// `e^{2φ} g` with `φ` compactly supported in the cap chart.
    Conformal { phi: CapBump },
}

#[derive(Clone, Debug)]
pub enum Family {
    /// `h_ρ = h₀(y)` for all ρ; normal-form chart covers everything except
    /// the guarded tip.
    ExactCone,
    /// `h_ρ = h₀ + ρ^m χ(ρ) P₀(y)`; same global chart as the cone.
    PerturbedConic { order: u32, pert: CollarPerturbation },
    /// `dr² + f(r)² ĥ` over a unit section, with cap chart and optional
    /// interior patch. Collar family `h_ρ = ρ² f(1/ρ)² ĥ(y)`.
    Warped { profile: WarpedProfile, patch: InteriorPatch },
}

#[derive(Clone, Debug)]
pub struct MetricModel {
    /// Boundary manifold `(∂M, h₀)`; for warped models this is the section
    /// scaled by the tail slope.
    boundary: BoundaryManifold,
    /// Coordinate section: equals `boundary` except for warped models,
    /// where it is the unit section `ĥ`.
    section: BoundaryManifold,
    pub family: Family,
}

/// Chart geometry constants for warped models (in the radius variable).
pub mod chart {
    /// Collar chart is valid for `r ≥ COLLAR_MIN_R` (ρ ≤ 1).
    pub const COLLAR_MIN_R: f64 = 1.0;
    /// Inward chart switch collar → cap.
    pub const SWITCH_IN_R: f64 = 2.0;
    /// Outward chart switch cap → collar (hysteresis avoids chattering).
    pub const SWITCH_OUT_R: f64 = 2.2;
    /// Interior patches must be supported inside this radius.
    pub const PATCH_MAX_R: f64 = 1.9;
    /// Tip guard for global normal-form models (`r = 1/ρ` below 1e-6).
    pub const RHO_TIP_GUARD: f64 = 1e6;
}

impl MetricModel {
    pub fn exact_cone(boundary: BoundaryManifold) -> Self {
        MetricModel { section: boundary.clone(), boundary, family: Family::ExactCone }
    }

    pub fn perturbed_conic(
        boundary: BoundaryManifold,
        order: u32,
        pert: CollarPerturbation,
    ) -> Result<Self> {
        if order < 1 {
            return Err(Error::InvalidModel("perturbation order must be >= 1".into()));
        }
        pert.tensor.validate(&boundary)?;
        let m = MetricModel {
            section: boundary.clone(),
            boundary,
            family: Family::PerturbedConic { order, pert },
        };
        m.check_positive_definite()?;
        Ok(m)
    }

    /// Warped product over a unit circle or unit sphere section.
    pub fn warped(section: BoundaryManifold, profile: WarpedProfile, patch: InteriorPatch) -> Result<Self> {
        match section {
            BoundaryManifold::Circle { length } if (length - super::boundary::TWO_PI).abs() < 1e-12 => {}
            BoundaryManifold::Sphere { radius } if (radius - 1.0).abs() < 1e-12 => {}
            _ => {
                return Err(Error::InvalidModel(
                    "warped models take a unit circle or unit sphere section".into(),
                ))
            }
        }
        if let InteriorPatch::AddTensor { q, .. } = &patch {
            let c = q.bump.center;
            let reach = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt() + q.bump.sigma;
            if reach > chart::PATCH_MAX_R {
                return Err(Error::InvalidModel(format!(
                    "patch support reaches r={reach}, beyond the cap region"
                )));
            }
        }
        if let InteriorPatch::Conformal { phi } = &patch {
            let c = phi.center;
            let reach = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt() + phi.sigma;
            if reach > chart::PATCH_MAX_R {
                return Err(Error::InvalidModel(format!(
                    "conformal patch reaches r={reach}, beyond the cap region"
                )));
            }
        }
        let boundary = section.scaled(profile.slope);
        Ok(MetricModel { boundary, section, family: Family::Warped { profile, patch } })
    }

    /// Warped product with the convexity flag: fails if `f'' < 0` anywhere.
    pub fn warped_convex(section: BoundaryManifold, profile: WarpedProfile) -> Result<Self> {
        if !profile.second_derivative_sign_ok(true) {
            return Err(Error::InvalidModel("profile is not convex (f'' changes sign)".into()));
        }
        Self::warped(section, profile, InteriorPatch::None)
    }

    /// The Euclidean plane as a warped product (`f(r) = r` everywhere).
    pub fn euclidean_plane() -> Self {
        Self::warped(
            BoundaryManifold::Circle { length: super::boundary::TWO_PI },
            WarpedProfile::euclidean(),
            InteriorPatch::None,
        )
        .unwrap()
    }

    pub fn boundary(&self) -> &BoundaryManifold {
        &self.boundary
    }

    /// Coordinate section carrying the collar family (`ĥ` for warped
    /// models, `h₀` otherwise).
    pub fn section(&self) -> &BoundaryManifold {
        &self.section
    }

    pub fn boundary_dim(&self) -> usize {
        self.boundary.dim()
    }

    pub fn dim(&self) -> usize {
        self.boundary_dim() + 1
    }

    pub fn has_cap(&self) -> bool {
        matches!(self.family, Family::Warped { .. })
    }

    pub fn profile(&self) -> Option<&WarpedProfile> {
        match &self.family {
            Family::Warped { profile, .. } => Some(profile),
            _ => None,
        }
    }

    pub fn patch(&self) -> Option<&InteriorPatch> {
        match &self.family {
            Family::Warped { patch, .. } => Some(patch),
            _ => None,
        }
    }

    /// Upper ρ limit of the collar chart.
    pub fn rho_collar(&self) -> f64 {
        match self.family {
            Family::Warped { .. } => 1.0 / chart::COLLAR_MIN_R,
            _ => chart::RHO_TIP_GUARD,
        }
    }

    /// Is `(ρ, y)` inside the collar chart.
    pub fn collar_ok(&self, rho: f64, y: &BVec) -> bool {
        rho >= 0.0 && rho <= self.rho_collar() && self.section.chart_ok(y)
    }

    /// First-order collar jet; caller must keep inside the collar chart.
    pub fn collar_jet1(&self, rho: f64, y: &BVec) -> CollarJet1 {
        match &self.family {
            Family::ExactCone => CollarJet1 {
                h: self.boundary.metric(y),
                dr_h: BZERO,
                dy_h: self.boundary.metric_dy(y),
            },
            Family::PerturbedConic { order, pert } => {
                let m = *order as i32;
                let (chi, chip, _) = pert.cutoff.jet(rho);
                let (p, dp, _) = pert.tensor.jet(&self.boundary, y);
                let rm = rho.powi(m);
                let rm1 = if m >= 1 { rho.powi(m - 1) } else { 0.0 };
                let c = rm * chi;
                let cr = m as f64 * rm1 * chi + rm * chip;
                let h0 = self.boundary.metric(y);
                let dh0 = self.boundary.metric_dy(y);
                let mut h = BZERO;
                let mut dr_h = BZERO;
                let mut dy_h = [BZERO; 2];
                for i in 0..2 {
                    for j in 0..2 {
                        h[i][j] = h0[i][j] + c * p[i][j];
                        dr_h[i][j] = cr * p[i][j];
                        for k in 0..2 {
                            dy_h[k][i][j] = dh0[k][i][j] + c * dp[k][i][j];
                        }
                    }
                }
                CollarJet1 { h, dr_h, dy_h }
            }
            Family::Warped { profile, .. } => {
                let (w, wp, _) = profile.w_jet(rho);
                let hh = self.section.metric(y);
                let dhh = self.section.metric_dy(y);
                let mut h = BZERO;
                let mut dr_h = BZERO;
                let mut dy_h = [BZERO; 2];
                for i in 0..2 {
                    for j in 0..2 {
                        h[i][j] = w * hh[i][j];
                        dr_h[i][j] = wp * hh[i][j];
                        for k in 0..2 {
                            dy_h[k][i][j] = w * dhh[k][i][j];
                        }
                    }
                }
                CollarJet1 { h, dr_h, dy_h }
            }
        }
    }

    /// Second-order collar jet.
    pub fn collar_jet2(&self, rho: f64, y: &BVec) -> CollarJet2 {
        match &self.family {
            Family::ExactCone => CollarJet2 {
                h: self.boundary.metric(y),
                dr_h: BZERO,
                drr_h: BZERO,
                dy_h: self.boundary.metric_dy(y),
                dry_h: [BZERO; 2],
                dyy_h: self.boundary.metric_dyy(y),
            },
            Family::PerturbedConic { order, pert } => {
                let m = *order as i32;
                let (chi, chip, chipp) = pert.cutoff.jet(rho);
                let (p, dp, ddp) = pert.tensor.jet(&self.boundary, y);
                let rm = rho.powi(m);
                let rm1 = if m >= 1 { rho.powi(m - 1) } else { 0.0 };
                let rm2 = if m >= 2 { rho.powi(m - 2) } else { 0.0 };
                let mf = m as f64;
                let c = rm * chi;
                let cr = mf * rm1 * chi + rm * chip;
                let crr = mf * (mf - 1.0) * rm2 * chi + 2.0 * mf * rm1 * chip + rm * chipp;
                let h0 = self.boundary.metric(y);
                let dh0 = self.boundary.metric_dy(y);
                let ddh0 = self.boundary.metric_dyy(y);
                let mut out = CollarJet2 {
                    h: BZERO,
                    dr_h: BZERO,
                    drr_h: BZERO,
                    dy_h: [BZERO; 2],
                    dry_h: [BZERO; 2],
                    dyy_h: [[BZERO; 2]; 2],
                };
                for i in 0..2 {
                    for j in 0..2 {
                        out.h[i][j] = h0[i][j] + c * p[i][j];
                        out.dr_h[i][j] = cr * p[i][j];
                        out.drr_h[i][j] = crr * p[i][j];
                        for k in 0..2 {
                            out.dy_h[k][i][j] = dh0[k][i][j] + c * dp[k][i][j];
                            out.dry_h[k][i][j] = cr * dp[k][i][j];
                            for l in 0..2 {
                                out.dyy_h[k][l][i][j] = ddh0[k][l][i][j] + c * ddp[k][l][i][j];
                            }
                        }
                    }
                }
                out
            }
            Family::Warped { profile, .. } => {
                let (w, wp, wpp) = profile.w_jet(rho);
                let hh = self.section.metric(y);
                let dhh = self.section.metric_dy(y);
                let ddhh = self.section.metric_dyy(y);
                let mut out = CollarJet2 {
                    h: BZERO,
                    dr_h: BZERO,
                    drr_h: BZERO,
                    dy_h: [BZERO; 2],
                    dry_h: [BZERO; 2],
                    dyy_h: [[BZERO; 2]; 2],
                };
                for i in 0..2 {
                    for j in 0..2 {
                        out.h[i][j] = w * hh[i][j];
                        out.dr_h[i][j] = wp * hh[i][j];
                        out.drr_h[i][j] = wpp * hh[i][j];
                        for k in 0..2 {
                            out.dy_h[k][i][j] = w * dhh[k][i][j];
                            out.dry_h[k][i][j] = wp * dhh[k][i][j];
                            for l in 0..2 {
                                out.dyy_h[k][l][i][j] = w * ddhh[k][l][i][j];
                            }
                        }
                    }
                }
                out
            }
        }
    }

    /// Metric data in the scattering frame with validity checks
    /// (chart range, positive definiteness, `h·h⁻¹ = Id`).
    pub fn metric_at(&self, rho: f64, y: &BVec) -> Result<CollarMetric> {
        if !self.collar_ok(rho, y) {
            return Err(Error::ChartOutOfRange(format!(
                "(rho={rho}, y=({}, {})) not in the collar chart",
                y[0], y[1]
            )));
        }
        let d = self.boundary_dim();
        let j = self.collar_jet1(rho, y);
        let min_eig = bmat_min_eig(&j.h, d);
        if min_eig <= 0.0 {
            return Err(Error::NonPositiveDefinite { rho, min_eig });
        }
        let h_inv = bmat_inv(&j.h, d);
        let id = bmat_mul(&j.h, &h_inv, d);
        for i in 0..d {
            for k in 0..d {
                let want = if i == k { 1.0 } else { 0.0 };
                debug_assert!((id[i][k] - want).abs() < 1e-13);
            }
        }
        Ok(CollarMetric { h: j.h, h_inv, dr_h: j.dr_h, dy_h: j.dy_h })
    }

    fn check_positive_definite(&self) -> Result<()> {
        let d = self.boundary_dim();
        // deterministic grid over the collar support
        for ir in 0..20 {
            let rho = 0.5 * (ir as f64 + 0.5) / 20.0;
            for iy in 0..16 {
                let y = [
                    0.15 + std::f64::consts::PI * 0.85 * (iy % 4) as f64 / 4.0,
                    super::boundary::TWO_PI * (iy / 4) as f64 / 4.0,
                ];
                let j = self.collar_jet1(rho, &y);
                let min_eig = bmat_min_eig(&j.h, d);
                if min_eig <= 0.0 {
                    return Err(Error::NonPositiveDefinite { rho, min_eig });
                }
            }
        }
        Ok(())
    }

    /// Global boundary defining function evaluated at interior radius `r`
    /// (warped models only; equals `1/r` for `r ≥ 1` and flattens to 1 at
    /// the center).
    pub fn rho_global_of_r(&self, r: f64) -> f64 {
        if r >= 1.0 {
            return 1.0 / r;
        }
        if r <= 0.5 {
            return 1.0;
        }
        let t = (r - 0.5) / 0.5;
        let t2 = t * t;
        let t3 = t2 * t;
        // quintic with m(0.5)=1, m'(0.5)=0, m''(0.5)=0, m(1)=1, m'(1)=1, m''(1)=0
        let m = 1.0 - 2.0 * t3 + 3.5 * t2 * t2 - 1.5 * t2 * t3;
        1.0 / m
    }

    /// Cap metric `G` and its gradient at `u` (warped models with patches).
    pub fn cap_metric_jet1(&self, u: &[f64; 3]) -> (CMat, [CMat; 3]) {
        let (g, dg, _) = self.cap_metric_jets(u, false);
        (g, dg)
    }

    /// Cap metric with first and second derivatives.
    pub fn cap_metric_jet2(&self, u: &[f64; 3]) -> (CMat, [CMat; 3], [[CMat; 3]; 3]) {
        self.cap_metric_jets(u, true)
    }

    fn cap_metric_jets(&self, u: &[f64; 3], second: bool) -> (CMat, [CMat; 3], [[CMat; 3]; 3]) {
        let Family::Warped { profile, patch } = &self.family else {
            panic!("cap chart only exists on warped models");
        };
        let n = self.dim();
        let r = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
        let cf = profile.cap_factors(r);
        let mut g = CZERO;
        let mut dg = [CZERO; 3];
        let mut ddg = [[CZERO; 3]; 3];
        let delta = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
        for i in 0..n {
            for j in 0..n {
                g[i][j] = cf.phi * delta(i, j) + cf.chi * u[i] * u[j];
                for k in 0..n {
                    dg[k][i][j] = cf.alpha * u[k] * delta(i, j)
                        + cf.beta * u[k] * u[i] * u[j]
                        + cf.chi * (delta(i, k) * u[j] + delta(j, k) * u[i]);
                    if second {
                        for l in 0..n {
                            ddg[l][k][i][j] = cf.alpha1 * u[l] * u[k] * delta(i, j)
                                + cf.alpha * delta(k, l) * delta(i, j)
                                + cf.beta1 * u[l] * u[k] * u[i] * u[j]
                                + cf.beta
                                    * (delta(k, l) * u[i] * u[j]
                                        + delta(i, l) * u[k] * u[j]
                                        + delta(j, l) * u[k] * u[i]
                                        + u[l] * delta(i, k) * u[j]
                                        + u[l] * delta(j, k) * u[i])
                                + cf.chi * (delta(i, k) * delta(j, l) + delta(j, k) * delta(i, l));
                        }
                    }
                }
            }
        }
        match patch {
            InteriorPatch::None => {}
            InteriorPatch::AddTensor { q, s } => {
                let (qv, dq, ddq) = q.jet(u, n);
                for i in 0..n {
                    for j in 0..n {
                        g[i][j] += s * qv[i][j];
                        for k in 0..n {
                            dg[k][i][j] += s * dq[k][i][j];
                            if second {
                                for l in 0..n {
                                    ddg[l][k][i][j] += s * ddq[l][k][i][j];
                                }
                            }
                        }
                    }
                }
            }
            InteriorPatch::Conformal { phi } => {
                let (p, gp, hp) = phi.jet(u, n);
                let e = (2.0 * p).exp();
                let mut g2 = CZERO;
                let mut dg2 = [CZERO; 3];
                let mut ddg2 = [[CZERO; 3]; 3];
                for i in 0..n {
                    for j in 0..n {
                        g2[i][j] = e * g[i][j];
                        for k in 0..n {
                            dg2[k][i][j] = e * (dg[k][i][j] + 2.0 * gp[k] * g[i][j]);
                            if second {
                                for l in 0..n {
                                    ddg2[l][k][i][j] = e
                                        * (ddg[l][k][i][j]
                                            + 2.0 * gp[l] * dg[k][i][j]
                                            + 2.0 * gp[k] * dg[l][i][j]
                                            + (4.0 * gp[k] * gp[l] + 2.0 * hp[k][l]) * g[i][j]);
                                }
                            }
                        }
                    }
                }
                g = g2;
                dg = dg2;
                ddg = ddg2;
            }
        }
        (g, dg, ddg)
    }

    /// Replace the interior patch (returns a modified clone).
    pub fn with_patch(&self, patch: InteriorPatch) -> Result<Self> {
        match &self.family {
            Family::Warped { profile, .. } => {
                Self::warped(self.section.clone(), profile.clone(), patch)
            }
            _ => Err(Error::InvalidModel("interior patches require a warped model".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::boundary::TWO_PI;
    use crate::geometry::perturbation::{BoundaryScalar, BoundaryTensor, RhoCutoff};
    use crate::geometry::profile::CapKind;
    use crate::num::central_diff4;
    use approx::assert_relative_eq;

    fn pert_circle() -> CollarPerturbation {
        CollarPerturbation {
            cutoff: RhoCutoff { rho_s: 0.25 },
            tensor: BoundaryTensor::Conformal(BoundaryScalar::CircleTrig {
                terms: vec![(0.15, 1.0, 0.3), (0.08, 3.0, 1.1)],
            }),
        }
    }

    #[test]
    fn exact_cone_is_rho_independent() {
        let m = MetricModel::exact_cone(BoundaryManifold::circle(TWO_PI).unwrap());
        for &rho in &[0.0, 0.3, 2.0] {
            let cm = m.metric_at(rho, &[1.0, 0.0]).unwrap();
            assert_relative_eq!(cm.h[0][0], 1.0, epsilon = 1e-15);
            assert_eq!(cm.dr_h[0][0], 0.0);
        }
    }

    #[test]
    fn euclidean_plane_collar_is_unit_circle() {
        // f(r)=r, ρ=1/r: h_ρ = dθ² exactly
        let m = MetricModel::euclidean_plane();
        for &rho in &[0.01, 0.2, 0.9] {
            let cm = m.metric_at(rho, &[0.4, 0.0]).unwrap();
            assert_relative_eq!(cm.h[0][0], 1.0, epsilon = 1e-13);
            assert!(cm.dr_h[0][0].abs() < 1e-12);
        }
    }

    #[test]
    fn perturbed_conic_order2_has_flat_derivative_at_zero() {
        let mut p = pert_circle();
        p.cutoff = RhoCutoff { rho_s: 0.25 };
        let m = MetricModel::perturbed_conic(BoundaryManifold::circle(TWO_PI).unwrap(), 2, p).unwrap();
        let cm = m.metric_at(0.0, &[0.7, 0.0]).unwrap();
        assert_eq!(cm.dr_h[0][0], 0.0);
    }

    #[test]
    fn collar_jets_match_finite_differences() {
        let m = MetricModel::perturbed_conic(BoundaryManifold::circle(TWO_PI).unwrap(), 1, pert_circle())
            .unwrap();
        let (rho, y) = (0.08, [0.9, 0.0]);
        let j2 = m.collar_jet2(rho, &y);
        let fd_r = central_diff4(|x| m.collar_jet1(x, &y).h[0][0], rho, 1e-5);
        assert_relative_eq!(j2.dr_h[0][0], fd_r, epsilon = 1e-9, max_relative = 1e-8);
        let fd_rr = central_diff4(|x| m.collar_jet1(x, &y).dr_h[0][0], rho, 1e-5);
        assert_relative_eq!(j2.drr_h[0][0], fd_rr, epsilon = 1e-7, max_relative = 1e-7);
        let fd_y = central_diff4(|x| m.collar_jet1(rho, &[x, 0.0]).h[0][0], y[0], 1e-5);
        assert_relative_eq!(j2.dy_h[0][0][0], fd_y, epsilon = 1e-9);

        // warped sphere model jets
        let prof = WarpedProfile::new(CapKind::Flat, 1.0, 4.0, 2.0).unwrap();
        let w = MetricModel::warped(BoundaryManifold::sphere(1.0).unwrap(), prof, InteriorPatch::None)
            .unwrap();
        let (rho, y) = (0.31, [1.2, 0.4]);
        let j2 = w.collar_jet2(rho, &y);
        let fd_r = central_diff4(|x| w.collar_jet1(x, &y).h[1][1], rho, 1e-5);
        assert_relative_eq!(j2.dr_h[1][1], fd_r, epsilon = 1e-8, max_relative = 1e-8);
        let fd_ry = central_diff4(|x| w.collar_jet1(rho, &[x, 0.4]).dr_h[1][1], y[0], 1e-5);
        assert_relative_eq!(j2.dry_h[0][1][1], fd_ry, epsilon = 1e-8, max_relative = 1e-7);
    }

    #[test]
    fn cap_metric_matches_polar_form() {
        // dr² + f(r)² dθ² at u: radial vector has |·|=1, angular |e_θ| = f
        let prof = WarpedProfile::new(CapKind::Flat, 1.0, 4.0, 0.5).unwrap();
        let m = MetricModel::warped(
            BoundaryManifold::circle(TWO_PI).unwrap(),
            prof.clone(),
            InteriorPatch::None,
        )
        .unwrap();
        let u: [f64; 3] = [1.3, 0.6, 0.0];
        let r = (u[0] * u[0] + u[1] * u[1]).sqrt();
        let (g, _) = m.cap_metric_jet1(&u);
        let ur = [u[0] / r, u[1] / r, 0.0];
        let ut = [-u[1] / r, u[0] / r, 0.0];
        let quad = |v: &[f64; 3], w: &[f64; 3]| {
            let mut s = 0.0;
            for i in 0..2 {
                for j in 0..2 {
                    s += v[i] * g[i][j] * w[j];
                }
            }
            s
        };
        let (f, _, _) = prof.eval(r);
        assert_relative_eq!(quad(&ur, &ur), 1.0, epsilon = 1e-12);
        assert_relative_eq!(quad(&ut, &ut), (f / r) * (f / r), epsilon = 1e-12);
        assert_relative_eq!(quad(&ur, &ut), 0.0, epsilon = 1e-13);
    }

    #[test]
    fn cap_metric_jets_match_fd() {
        let prof = WarpedProfile::new(CapKind::SphericalCap, 1.2, 5.0, 0.8).unwrap();
        let m = MetricModel::warped(BoundaryManifold::sphere(1.0).unwrap(), prof, InteriorPatch::None)
            .unwrap();
        let u = [0.4, -0.3, 0.5];
        let (_, dg, ddg) = m.cap_metric_jet2(&u);
        for k in 0..3 {
            for (i, j) in [(0, 0), (0, 1), (1, 2), (2, 2)] {
                let fd = central_diff4(
                    |x| {
                        let mut uu = u;
                        uu[k] = x;
                        m.cap_metric_jet1(&uu).0[i][j]
                    },
                    u[k],
                    1e-5,
                );
                assert_relative_eq!(dg[k][i][j], fd, epsilon = 1e-9, max_relative = 1e-8);
                let fd2 = central_diff4(
                    |x| {
                        let mut uu = u;
                        uu[k] = x;
                        m.cap_metric_jet1(&uu).1[k][i][j]
                    },
                    u[k],
                    1e-5,
                );
                assert_relative_eq!(ddg[k][k][i][j], fd2, epsilon = 1e-7, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn positive_definiteness_at_many_random_collar_points() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4242);
        let models: Vec<MetricModel> = vec![
            MetricModel::exact_cone(BoundaryManifold::sphere(1.0).unwrap()),
            MetricModel::perturbed_conic(BoundaryManifold::circle(TWO_PI).unwrap(), 1, pert_circle())
                .unwrap(),
            MetricModel::warped(
                BoundaryManifold::sphere(1.0).unwrap(),
                WarpedProfile::new(CapKind::SphericalCap, 1.2, 5.0, 0.7).unwrap(),
                InteriorPatch::None,
            )
            .unwrap(),
        ];
        for m in &models {
            let d = m.boundary_dim();
            let rho_hi = 0.9 * m.rho_collar().min(1.0);
            for _ in 0..10_000 {
                let rho = rng.gen_range(0.0..rho_hi);
                let y = [rng.gen_range(0.2..3.0), rng.gen_range(0.0..TWO_PI)];
                let h = m.collar_jet1(rho, &y).h;
                assert!(
                    crate::num::linalg::bmat_min_eig(&h, d) > 0.0,
                    "h not positive definite at rho={rho}"
                );
            }
        }
    }

    #[test]
    fn normal_form_residual_vanishes() {
        // |∇ρ|_g/ρ² = 1 exactly in the collar: g^{ρρ} = ρ⁴ by construction,
        // so the residual is zero identically for every family. Verify the
        // warped identity |d(1/r)|_g = 1/r² from the cap side instead.
        let prof = WarpedProfile::new(CapKind::Flat, 1.0, 4.0, 2.0).unwrap();
        let m = MetricModel::warped(BoundaryManifold::circle(TWO_PI).unwrap(), prof, InteriorPatch::None)
            .unwrap();
        let u: [f64; 3] = [1.1, 0.9, 0.0];
        let r = (u[0] * u[0] + u[1] * u[1]).sqrt();
        let (g, _) = m.cap_metric_jet1(&u);
        let ginv = crate::num::linalg::cmat_inv(&g, 2);
        // dρ with ρ = 1/r: dρ = -û/r² in u coordinates
        let drho = [-u[0] / (r * r * r), -u[1] / (r * r * r), 0.0];
        let norm2 = crate::num::linalg::cquad(&ginv, &drho, &drho, 2);
        let rho = 1.0 / r;
        assert_relative_eq!(norm2.sqrt() / (rho * rho), 1.0, epsilon = 1e-12);
    }
}
