//! Property tests for the invariants of the construction and the tooling.

use proptest::prelude::*;
use weier_torus::expform::ExpForm;
use weier_torus::immersion::{coordinate_forms, integrated_coordinates, radii_audit, Section};
use weier_torus::io::grid::{sample_surface, write_sample_csv};
use weier_torus::io::mesh::{MeshData, Projection};
use weier_torus::io::SamplingGrid;
use weier_torus::spinor::{metric_density, periodicity_check};
use weier_torus::torus::dehn::dehn_twist;
use weier_torus::wirtinger::{integrate_one_form, wirtinger_dz, FnForm};
use weier_torus::{
    build_solution, build_wave_vectors, closed_form_coordinates, DehnTwist, IntegrationPath, Lattice, SpinorComponent,
    TorusParameters, C64,
};

fn c64(range: f64) -> impl Strategy<Value = C64> {
    (-range..range, -range..range).prop_map(|(re, im)| C64::new(re, im))
}

fn winding() -> impl Strategy<Value = i64> {
    prop_oneof![-3i64..=-1, 1i64..=3]
}

prop_compose! {
    fn torus_params()(l1 in 1.0f64..5.0, l2 in -1.0f64..1.0, a in -1.0f64..1.0, b in -1.0f64..1.0,
                      n in winding(), c in c64(2.0).prop_filter("nonzero", |c| c.norm() > 0.1))
                      -> TorusParameters {
        TorusParameters::new(Lattice::new(l1, l2).unwrap(), a, b, n, c).unwrap()
    }
}

prop_compose! {
    fn twist()(p in 1u64..=12, q in 1u64..=12) -> DehnTwist {
        DehnTwist::new(p, q).unwrap()
    }
}

fn rel_close(x: C64, y: C64, tol: f64) -> bool {
    (x - y).norm() <= tol * x.norm().max(y.norm()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exponent_additivity(amp in c64(2.0), k in c64(2.0), h in c64(2.0), z in c64(1.5), w in c64(1.5)) {
        let c = SpinorComponent::new(amp, k, h);
        let shift = (C64::i() * (k * w + h * w.conj())).exp();
        prop_assert!(rel_close(c.eval(z + w).unwrap(), c.eval(z).unwrap() * shift, 1e-12));
    }

    #[test]
    fn analytic_derivative_matches_finite_difference(amp in c64(2.0), k in c64(2.0), h in c64(2.0), z in c64(1.0)) {
        let c = SpinorComponent::new(amp, k, h);
        prop_assume!(c.exponent(z).im.abs() < 10.0);
        let numeric = wirtinger_dz(|z| c.eval(z).unwrap(), z, 1e-5).unwrap();
        prop_assert!((numeric - C64::i() * k * c.eval(z).unwrap()).norm() < 1e-6);
    }

    #[test]
    fn periodicity_ratio_is_constant(p in torus_params(), zs in prop::collection::vec(c64(1.0), 2..8)) {
        let sol = build_solution(&p).unwrap();
        for comp in [sol.doublet1.psi, sol.doublet1.phi, sol.doublet2.psi, sol.doublet2.phi] {
            let rep = periodicity_check(&comp, &p.lattice, p.n, &zs).unwrap();
            prop_assert!(rep.ratio_spread < 1e-12, "spread {}", rep.ratio_spread);
        }
    }

    #[test]
    fn metric_density_gauge_invariance(p in torus_params(), theta in 0.0f64..std::f64::consts::TAU, z in c64(1.0)) {
        let sol = build_solution(&p).unwrap();
        let base = metric_density(&sol.doublet1, &sol.doublet2, z).unwrap();
        for k in 0..4 {
            let quarter = C64::i().powi(k);
            let g = metric_density(&sol.doublet1.gauge(quarter), &sol.doublet2.gauge(quarter), z).unwrap();
            prop_assert_eq!(g.density, base.density);
        }
        let phase = C64::from_polar(1.0, theta);
        let g = metric_density(&sol.doublet1.gauge(phase), &sol.doublet2.gauge(phase), z).unwrap();
        prop_assert!((g.density - base.density).abs() <= 1e-14 * base.density.abs());
    }

    #[test]
    fn wave_vectors_are_affine_in_a_and_b(p in torus_params(), step in 0.01f64..0.5) {
        let at = |a: f64, b: f64| build_wave_vectors(&p.with_a(a).with_b(b));
        let (w0, w1, w2) = (at(p.a, p.b), at(p.a + step, p.b), at(p.a + 2.0 * step, p.b));
        prop_assert!(((w2.k1 - w1.k1) - (w1.k1 - w0.k1)).norm() < 1e-12);
        prop_assert!(((w2.h1 - w1.h1) - (w1.h1 - w0.h1)).norm() < 1e-12);
        let (v1, v2) = (at(p.a, p.b + step), at(p.a, p.b + 2.0 * step));
        prop_assert!(((v2.k1 - v1.k1) - (v1.k1 - w0.k1)).norm() < 1e-12);
        prop_assert!(((v2.h1 - v1.h1) - (v1.h1 - w0.h1)).norm() < 1e-12);
    }

    #[test]
    fn amplitude_identity_is_exact_for_unit_amplitude(p in torus_params()) {
        let p = TorusParameters { c: C64::new(1.0, 0.0), ..p };
        let res = weier_torus::torus::conditions::amplitude_conditions_residual(&build_solution(&p).unwrap());
        prop_assert_eq!(res[0], C64::new(0.0, 0.0));
        prop_assert_eq!(res[1], C64::new(0.0, 0.0));
    }

    #[test]
    fn dehn_composition_and_identity(p in torus_params(), t1 in twist(), t2 in twist()) {
        prop_assert_eq!(dehn_twist(&p, DehnTwist::IDENTITY).unwrap(), p);
        let stepwise = dehn_twist(&dehn_twist(&p, t1).unwrap(), t2).unwrap();
        let composed = dehn_twist(&p, t1.then(t2).unwrap()).unwrap();
        prop_assert_eq!(stepwise, composed);
    }

    #[test]
    fn twisted_winding_keeps_doublet1_periodic_along_lambda1(p in torus_params(), t in twist()) {
        let twisted = dehn_twist(&p, t).unwrap();
        let rebuilt = TorusParameters { n: p.n * t.p as i64, ..twisted };
        let w = build_wave_vectors(&rebuilt);
        let lhs = (w.k1.re + w.h1.re) * rebuilt.lattice.lambda1();
        let rhs = rebuilt.n as f64 * std::f64::consts::PI;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs());
    }

    #[test]
    fn one_form_linearity(alpha in c64(2.0), beta in c64(2.0), end in c64(2.0)) {
        let w1 = FnForm::new(|z: C64| z.exp(), |z: C64| z.conj());
        let w2 = FnForm::new(|z: C64| z * z, |z: C64| (z.conj() * 0.5).sin());
        let combo = FnForm::new(
            |z: C64| alpha * (z.exp()) + beta * (z * z),
            |z: C64| alpha * z.conj() + beta * (z.conj() * 0.5).sin(),
        );
        let path = IntegrationPath::new(vec![C64::new(0.0, 0.0), C64::new(0.7, -0.4), end]).unwrap();
        let tol = 1e-10;
        let i1 = integrate_one_form(&w1, &path, tol).unwrap();
        let i2 = integrate_one_form(&w2, &path, tol).unwrap();
        let ic = integrate_one_form(&combo, &path, tol).unwrap();
        let scale = 1.0 + alpha.norm() + beta.norm();
        prop_assert!((ic - (alpha * i1 + beta * i2)).norm() < 10.0 * tol * scale);
    }

    #[test]
    fn path_reversal_negates(p in torus_params(), end in c64(1.0), mid in c64(1.0)) {
        let sol = build_solution(&p).unwrap();
        let path = IntegrationPath::new(vec![C64::new(0.0, 0.0), mid, end]).unwrap();
        let tol = 1e-10;
        for form in coordinate_forms(&sol).iter() {
            let fwd = integrate_one_form(form, &path, tol).unwrap();
            let back = integrate_one_form(form, &path.reversed(), tol).unwrap();
            prop_assert!((fwd + back).norm() <= 2.0 * tol * (1.0 + fwd.norm()));
        }
    }

    #[test]
    fn origin_is_the_base_point(p in torus_params(), w in c64(1.0)) {
        prop_assume!(w.norm() > 1e-3);
        let sol = build_solution(&p).unwrap();
        let zero = C64::new(0.0, 0.0);
        let closed = closed_form_coordinates(&sol, zero, Default::default()).unwrap();
        prop_assert_eq!(closed.as_array(), [0.0; 4]);
        // Paths have two distinct vertices at least, so the origin is reached
        // through the loop out to w and back.
        let tol = 1e-10;
        let path = IntegrationPath::new(vec![zero, w, zero]).unwrap();
        let integrated = integrated_coordinates(&sol, &path, tol).unwrap();
        prop_assert!(integrated.point.as_array().iter().all(|x| x.abs() <= 2.0 * tol), "{:?}", integrated.point);
    }

    #[test]
    fn unit_phase_biconditional(p in torus_params()) {
        let sol = build_solution(&p).unwrap();
        let ts: Vec<f64> = (0..40).map(|i| 0.1 * i as f64).collect();
        let audit = radii_audit(&sol, &ts, Section::Half).unwrap();
        prop_assert!(audit.unit_phase_consistent);
    }

    #[test]
    fn mesh_topology(nu in 2usize..20, nv in 2usize..20) {
        let sol = build_solution(&TorusParameters::default()).unwrap();
        let grid = SamplingGrid::new(nu, nv).unwrap();
        let mesh = MeshData::build(&sol, grid, Projection::default(), Default::default()).unwrap();
        prop_assert_eq!(mesh.vertices.len(), nu * nv);
        prop_assert_eq!(mesh.faces.len(), nu * nv);
        prop_assert_eq!(mesh.edge_count(), 2 * nu * nv);
        prop_assert_eq!(mesh.euler_characteristic(), 0);
    }

    #[test]
    fn csv_row_count(p in torus_params(), nu in 2usize..12, nv in 2usize..12) {
        let sol = build_solution(&p).unwrap();
        let table = sample_surface(&sol, SamplingGrid::new(nu, nv).unwrap(), Default::default());
        let mut buf = Vec::new();
        write_sample_csv(&table, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        prop_assert!(!text.contains('\r'));
        prop_assert_eq!(text.lines().count(), 1 + nu * nv);
    }
}

#[test]
fn exp_forms_expose_exactness_on_grid() {
    // The x1 form is closed at every sampled parameter set; this guards the
    // premise used by the path-independence checks.
    let sol = build_solution(&TorusParameters::default()).unwrap();
    let forms: [ExpForm; 4] = coordinate_forms(&sol);
    let pts: Vec<C64> = (0..5).map(|i| C64::new(0.3 * i as f64, -0.2 * i as f64)).collect();
    assert!(forms[0].exactness_residual(&pts) < 1e-12);
}
