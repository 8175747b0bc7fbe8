//! Large-|η| boundary limits of weighted transforms.
//!
//! Along entries `(y₀, ε⁻¹η₀)` with `|η₀|_{h₀} = 1`, the weighted transform
//! `ε^{1−k} ∫₀^{τ⁺} ρ^{k−2} π*_m f dτ` converges to a time-π ray transform
//! on the boundary:
//! `Σ_ℓ (m over ℓ) ∫₀^π sin^{k+m−ℓ−2}(s) cos^ℓ(s) · f(E₀^ℓ, α̇^{m−ℓ}) ds`
//! with `α` the unit-speed boundary geodesic from `(y₀, η₀^♯)`. The same
//! mechanism scaled as `|η₀|^{j+1} I₀(ρ² f̄)` recovers the per-order jets of
//! `f̄` against `∫₀^π sin^j(s) f̄_j(α(s)) ds`.

use crate::dynamics::flow::{integrate_flow, AccFn, FlowOptions};
use crate::dynamics::phase::PhasePoint;
use crate::error::{Error, Result};
use crate::geometry::perturbation::BoundaryScalar;
use crate::geometry::MetricModel;
use crate::num::fit::{line_fit, richardson};
use crate::num::linalg::{bmat_mulvec, BVec};
use crate::tensors::{lift_state, TensorField};
use crate::transform::rho_global;

/// Result of the π-transform limit check.
#[derive(Clone, Debug)]
pub struct PiTransformResult {
    /// Richardson-extrapolated flow-side limit.
    pub limit_estimate: f64,
    /// Closed boundary quadrature.
    pub boundary_value: f64,
    pub gap: f64,
    /// Fitted ε-convergence rate of the flow-side values (None when the
    /// values are exact to tolerance at every ε).
    pub rate: Option<f64>,
    /// Raw ladder `(ε, value)`.
    pub table: Vec<(f64, f64)>,
}

/// Flow side of the boundary π-transform: weighted transforms along
/// `(y₀, ε⁻¹η₀)`, Richardson extrapolation, and the boundary quadrature.
pub fn boundary_pi_transform(
    model: &MetricModel,
    f: &dyn TensorField,
    y0: &BVec,
    eta0: &BVec,
    weight_k: f64,
    eps_ladder: &[f64],
    opts: &FlowOptions,
) -> Result<PiTransformResult> {
    if weight_k < 2.0 {
        return Err(Error::DecayHypothesis("pi-transform weight needs k ≥ 2".into()));
    }
    let norm = model.boundary().conorm(y0, eta0);
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidModel("pi-transform entry needs |η₀|_{h₀} = 1".into()));
    }
    let mut table = Vec::new();
    for &eps in eps_ladder {
        let eta_in = [eta0[0] / eps, eta0[1] / eps];
        let acc: Vec<AccFn> = vec![Box::new(move |chart, s: &[f64]| {
            let (sf, _) = crate::transform::floored_state(chart, s);
            let rho = rho_global(model, chart, &sf).max(1e-120);
            rho.powf(weight_k - 2.0) * lift_state(model, f, chart, &sf)
        })];
        let z0 = PhasePoint::entry(*y0, eta_in);
        let flow = integrate_flow(model, &z0, opts.tau_max, opts, &acc, &[])?;
        flow.trajectory.arrival_tau().ok_or(Error::TrappedGeodesic)?;
        table.push((eps, eps.powf(1.0 - weight_k) * flow.acc_end[0]));
    }
    let eps: Vec<f64> = table.iter().map(|p| p.0).collect();
    let vals: Vec<f64> = table.iter().map(|p| p.1).collect();
    let fit = richardson(&eps, &vals, 2.min(eps.len().saturating_sub(2)))?;
    let limit = fit.value;
    let boundary_value = boundary_pi_quadrature(model, f, y0, eta0, weight_k)?;
    // convergence rate of |value(ε) − limit|
    let mut lx = Vec::new();
    let mut ly = Vec::new();
    for (e, v) in &table {
        let r = (v - limit).abs();
        if r > 1e-11 {
            lx.push(e.ln());
            ly.push(r.ln());
        }
    }
    let rate = if lx.len() >= 3 { Some(line_fit(&lx, &ly)?.slope) } else { None };
    Ok(PiTransformResult {
        limit_estimate: limit,
        boundary_value,
        gap: (limit - boundary_value).abs(),
        rate,
        table,
    })
}

/// The closed boundary quadrature
/// `Σ_ℓ (m over ℓ) ∫₀^π sin^{k+m−ℓ−2} cos^ℓ · f(E₀^ℓ, α̇^{m−ℓ})(0, α(s)) ds`.
pub fn boundary_pi_quadrature(
    model: &MetricModel,
    f: &dyn TensorField,
    y0: &BVec,
    eta0: &BVec,
    weight_k: f64,
) -> Result<f64> {
    let b = model.boundary().clone();
    let d = b.dim();
    let m = f.order();
    let binom = |m: usize, l: usize| -> f64 {
        let mut v = 1.0;
        for i in 0..l {
            v = v * (m - i) as f64 / (i + 1) as f64;
        }
        v
    };
    crate::num::quad::integrate(
        |s| {
            let (ys, es) = b.exact_flow(y0, eta0, s);
            let w = b.inv_metric(&ys);
            let vel = bmat_mulvec(&w, &es, d);
            let fv = f.collar_value(model, 0.0, &ys);
            let e0: [f64; 3] = [1.0, 0.0, 0.0];
            let tang: [f64; 3] = [0.0, vel[0], vel[1]];
            let mut total = 0.0;
            for l in 0..=m {
                let mut vecs: Vec<&[f64; 3]> = Vec::with_capacity(m);
                for _ in 0..l {
                    vecs.push(&e0);
                }
                for _ in 0..(m - l) {
                    vecs.push(&tang);
                }
                let comp = fv.eval_mixed(&vecs);
                if comp != 0.0 {
                    total += binom(m, l)
                        * s.sin().powf(weight_k + (m - l) as f64 - 2.0)
                        * s.cos().powi(l as i32)
                        * comp;
                }
            }
            total
        },
        0.0,
        std::f64::consts::PI,
        1e-11,
        1e-13,
    )
}

/// One row of the jet-determination probe.
#[derive(Clone, Debug)]
pub struct JetProbeRow {
    pub jet_order: u32,
    /// Richardson limit of `|η₀|^{j+1} I₀(ρ² f̄^{(j)})`.
    pub fitted_limit: f64,
    /// `∫₀^π sin^j(s) f̄_j(α(s)) ds`.
    pub boundary_value: f64,
    pub gap: f64,
}

/// Probe of the per-order boundary determination for `f = ρ² f̄`,
/// `f̄ = Σ_j ρ^j f̄_j`: for each `j ≤ depth`, lower jets are removed
/// analytically and the scaled transform `|η₀|^{j+1} I₀` is extrapolated
/// against the boundary quadrature with weight `sin^j`.
pub fn i0_jet_probe(
    model: &MetricModel,
    jets: &[BoundaryScalar],
    depth: u32,
    y0: &BVec,
    eta0: &BVec,
    eps_ladder: &[f64],
    opts: &FlowOptions,
) -> Result<Vec<JetProbeRow>> {
    if depth as usize >= jets.len() {
        return Err(Error::InvalidModel("probe depth exceeds the provided jets".into()));
    }
    let b = model.boundary().clone();
    let norm = b.conorm(y0, eta0);
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidModel("jet probe entry needs |η₀|_{h₀} = 1".into()));
    }
    let mut rows = Vec::new();
    for j in 0..=depth {
        // remainder f̄^{(j)} = Σ_{i≥j} ρ^i f̄_i, integrated as ∫ f̄^{(j)} dτ
        let mut table_eps = Vec::new();
        let mut table_val = Vec::new();
        for &eps in eps_ladder {
            let eta_in = [eta0[0] / eps, eta0[1] / eps];
            let jets_ref = jets;
            let acc: Vec<AccFn> = vec![Box::new(move |chart, s: &[f64]| {
                let (sf, _) = crate::transform::floored_state(chart, s);
                let rho = rho_global(model, chart, &sf);
                let y = [sf[2], sf[3]];
                let mut v = 0.0;
                for (i, fj) in jets_ref.iter().enumerate().skip(j as usize) {
                    v += rho.powi(i as i32) * fj.value(&y);
                }
                v
            })];
            let z0 = PhasePoint::entry(*y0, eta_in);
            let flow = integrate_flow(model, &z0, opts.tau_max, opts, &acc, &[])?;
            flow.trajectory.arrival_tau().ok_or(Error::TrappedGeodesic)?;
            table_eps.push(eps);
            table_val.push(flow.acc_end[0] / eps.powi(j as i32 + 1));
        }
        let fit = richardson(&table_eps, &table_val, 2.min(table_eps.len().saturating_sub(2)))?;
        let boundary_value = crate::num::quad::integrate(
            |s| {
                let (ys, _) = b.exact_flow(y0, eta0, s);
                s.sin().powi(j as i32) * jets[j as usize].value(&ys)
            },
            0.0,
            std::f64::consts::PI,
            1e-12,
            1e-14,
        )?;
        rows.push(JetProbeRow {
            jet_order: j,
            fitted_limit: fit.value,
            boundary_value,
            gap: (fit.value - boundary_value).abs(),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::boundary::TWO_PI;
    use crate::geometry::perturbation::{BoundaryTensor, CollarPerturbation, RhoCutoff};
    use crate::geometry::{BoundaryManifold, MetricModel};
    use crate::num::fit::dyadic;
    use crate::tensors::field::{CollarFrameField, CollarScalar};
    use approx::assert_relative_eq;

    fn opts() -> FlowOptions {
        FlowOptions { rtol: 1e-12, atol: 1e-13, ..Default::default() }
    }

    fn perturbed_circle() -> MetricModel {
        let pert = CollarPerturbation {
            cutoff: RhoCutoff { rho_s: 0.25 },
            tensor: BoundaryTensor::Conformal(BoundaryScalar::CircleTrig {
                terms: vec![(0.1, 1.0, 0.6)],
            }),
        };
        MetricModel::perturbed_conic(BoundaryManifold::circle(TWO_PI).unwrap(), 1, pert).unwrap()
    }

    #[test]
    fn constant_scalar_k3_gives_two() {
        // m = 0, f ≡ 1 near the boundary, k = 3: boundary value ∫ sin = 2
        let m = perturbed_circle();
        let f = CollarFrameField::scalar(CollarScalar::constant(0.0, 1.0));
        let r = boundary_pi_transform(&m, &f, &[0.7, 0.0], &[1.0, 0.0], 3.0, &dyadic(0.02, 6), &opts())
            .unwrap();
        assert_relative_eq!(r.boundary_value, 2.0, epsilon = 1e-10);
        assert!(r.gap < 1e-4, "pi-transform gap {}", r.gap);
        let rate = r.rate.unwrap();
        assert!(rate >= 0.9, "convergence rate {rate}");
    }

    #[test]
    fn constant_scalar_k2_gives_pi() {
        let m = perturbed_circle();
        let f = CollarFrameField::scalar(CollarScalar::constant(0.0, 1.0));
        let r = boundary_pi_transform(&m, &f, &[0.2, 0.0], &[1.0, 0.0], 2.0, &dyadic(0.02, 6), &opts())
            .unwrap();
        assert_relative_eq!(r.boundary_value, std::f64::consts::PI, epsilon = 1e-10);
        assert!(r.gap < 1e-4, "pi-transform gap {}", r.gap);
    }

    #[test]
    fn exact_cone_pi_transform_converges_fast() {
        let m = MetricModel::exact_cone(BoundaryManifold::circle(TWO_PI).unwrap());
        let f = CollarFrameField::scalar(CollarScalar::simple(
            0.0,
            BoundaryScalar::CircleTrig { terms: vec![(1.0, 1.0, 0.0), (0.5, 0.0, 0.0)] },
        ));
        let r = boundary_pi_transform(&m, &f, &[0.4, 0.0], &[1.0, 0.0], 3.0, &dyadic(0.02, 5), &opts())
            .unwrap();
        assert!(r.gap < 1e-6, "cone pi-transform gap {}", r.gap);
    }

    #[test]
    fn jet_probe_constant_and_harmonic() {
        let m = perturbed_circle();
        // f̄ = 1 + ρ·cos(y) + ρ²·(0.3 + 0.5 sin-ish)
        let jets = vec![
            BoundaryScalar::Constant(1.0),
            BoundaryScalar::CircleTrig { terms: vec![(1.0, 1.0, 0.0)] },
            BoundaryScalar::CircleTrig { terms: vec![(0.5, 2.0, 0.4), (0.3, 0.0, 0.0)] },
        ];
        let rows = i0_jet_probe(&m, &jets, 2, &[0.9, 0.0], &[1.0, 0.0], &dyadic(0.02, 6), &opts())
            .unwrap();
        // j = 0: ∫ sin⁰ · 1 = π
        assert_relative_eq!(rows[0].boundary_value, std::f64::consts::PI, epsilon = 1e-10);
        for row in &rows {
            assert!(
                row.gap < 2e-4 * (1.0 + row.boundary_value.abs()),
                "jet {} gap {}",
                row.jet_order,
                row.gap
            );
        }
        // first harmonic at j = 1 integrates against sin(s) around the closed
        // geodesic: nonzero in general; parity case checked below
    }

    #[test]
    fn jet_probe_odd_harmonic_vanishes_by_parity() {
        // f̄₀ a first harmonic: ∫₀^π sin⁰(s)·cos(y₀ + s) ds = −2 sin(y₀)...
        // the parity-null case is the j = 1 weight against the first harmonic
        // flowed from y₀ = π/2: ∫ sin(s) cos(π/2 + s) ds = −π/2·sin(y₀)·...
        // use the clean case: j = 0 weight, harmonic centred so the closed
        // integral vanishes: y₀ = π/2 gives ∫₀^π cos(π/2 + s) ds = −2.
        // Instead check the genuinely odd case: weight sin¹ against
        // cos(y₀+s) with y₀ = 0: ∫ sin(s)cos(s) ds = 0.
        let m = perturbed_circle();
        let jets = vec![
            BoundaryScalar::Constant(0.0),
            BoundaryScalar::CircleTrig { terms: vec![(1.0, 1.0, 0.0)] },
        ];
        let rows = i0_jet_probe(&m, &jets, 1, &[0.0, 0.0], &[1.0, 0.0], &dyadic(0.02, 6), &opts())
            .unwrap();
        assert!(rows[1].boundary_value.abs() < 1e-12);
        assert!(rows[1].fitted_limit.abs() < 2e-4, "parity limit {}", rows[1].fitted_limit);
    }

    #[test]
    fn half_circle_resonant_boundary_value_recorded() {
        // boundary circle of radius 1/2 (length π): the closed geodesic wraps
        // once over time π; the π-transform of the constant is still 2 for
        // k = 3 — record and check the quadrature path
        let m = MetricModel::exact_cone(BoundaryManifold::circle(std::f64::consts::PI).unwrap());
        let f = CollarFrameField::scalar(CollarScalar::constant(0.0, 1.0));
        let v = boundary_pi_quadrature(&m, &f, &[0.3, 0.0], &[0.5, 0.0], 3.0).unwrap();
        assert_relative_eq!(v, 2.0, epsilon = 1e-10);
    }

    #[test]
    fn order2_tensor_limit_with_transversal_part() {
        // mixed tensor: check the flow limit against the Σ_ℓ quadrature
        let m = perturbed_circle();
        let f = CollarFrameField {
            order: 2,
            decay: 0.0,
            transversal_depth: 2,
            comps: vec![
                (vec![0, 0], CollarScalar::constant(0.0, 0.7)),
                (vec![0, 1], CollarScalar::simple(0.0, BoundaryScalar::CircleTrig { terms: vec![(0.4, 1.0, 0.2)] })),
                (vec![1, 1], CollarScalar::constant(0.0, 1.1)),
            ],
        };
        let r = boundary_pi_transform(&m, &f, &[1.3, 0.0], &[1.0, 0.0], 2.0, &dyadic(0.02, 6), &opts())
            .unwrap();
        assert!(r.gap < 3e-4, "order-2 pi-transform gap {}", r.gap);
    }
}
