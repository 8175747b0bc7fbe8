//! Randomized property checks.

use conic_lens_core::dynamics::flow::{integrate, FlowOptions};
use conic_lens_core::dynamics::phase::PhasePoint;
use conic_lens_core::geometry::boundary::TWO_PI;
use conic_lens_core::geometry::{BoundaryManifold, MetricModel};
use conic_lens_core::tensors::SymTensor;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn symmetrization_is_projection(vals in proptest::collection::vec(-5.0f64..5.0, 27)) {
        let mut t = SymTensor::zeros(3, 3);
        let mut it = vals.iter();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    t.set(&[i, j, k], *it.next().unwrap());
                }
            }
        }
        let s = t.symmetrized();
        let ss = s.symmetrized();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    prop_assert!((s.get(&[i, j, k]) - ss.get(&[i, j, k])).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn cone_flow_composition(y0 in 0.0f64..TWO_PI, k in 0.5f64..3.0, split in 0.1f64..0.9) {
        let m = MetricModel::exact_cone(BoundaryManifold::circle(TWO_PI).unwrap());
        let opts = FlowOptions { rtol: 1e-11, atol: 1e-13, ..Default::default() };
        let z0 = PhasePoint::entry([y0, 0.0], [k, 0.0]);
        let total = 0.8 * std::f64::consts::PI / k;
        let t1 = split * total;
        let full = integrate(&m, &z0, total, &opts).unwrap();
        let part1 = integrate(&m, &z0, t1, &opts).unwrap();
        let part2 = integrate(&m, &part1.end_point(), total - t1, &opts).unwrap();
        let a = full.end_point().to_state();
        let b = part2.end_point().to_state();
        for i in 0..6 {
            prop_assert!((a[i] - b[i]).abs() < 1e-8, "composition defect {} at {}", (a[i] - b[i]).abs(), i);
        }
    }

    #[test]
    fn constraint_conserved_on_random_warped_entries(y0 in 0.0f64..TWO_PI, k in 0.3f64..2.5) {
        let prof = conic_lens_core::geometry::WarpedProfile::new(
            conic_lens_core::geometry::CapKind::Flat, 1.0, 4.0, 2.0).unwrap();
        let m = MetricModel::warped(
            BoundaryManifold::circle(TWO_PI).unwrap(), prof,
            conic_lens_core::geometry::InteriorPatch::None).unwrap();
        let opts = FlowOptions { rtol: 1e-11, atol: 1e-13, ..Default::default() };
        let traj = conic_lens_core::dynamics::integrate_entry(&m, &[y0, 0.0], &[k, 0.0], &opts).unwrap();
        let tp = traj.arrival_tau().unwrap();
        prop_assert!(traj.diagnostics.max_constraint_defect <= 1e-9 * (1.0 + tp));
    }
}
