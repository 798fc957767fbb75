use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use jetsphere_core::embeddings::{
    embed_sphere, lambda_inv, lambda_map, make_body, BodyFunction, SpherePoint,
};
use jetsphere_core::forms::{
    integrate_boundary, integrate_interior, obstruction_integral, radial_ball_integral,
    random_polynomial, scaling_study, stokes_case, Coordinate, CubeFunction, Differentiation,
    FormDomain, FormIntegralSpec, Polynomial,
};
use jetsphere_core::metrics::sphere_bracketing;
use jetsphere_core::{box_distance, jet_to_point, SmoothExpr};

fn arcs(polys: &[Polynomial]) -> Vec<Arc<dyn CubeFunction>> {
    polys
        .iter()
        .map(|p| Arc::new(p.clone()) as Arc<dyn CubeFunction>)
        .collect()
}

fn random_polys(seed: u64, dim: usize) -> Vec<Polynomial> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..dim)
        .map(|_| random_polynomial(&mut rng, dim, 3))
        .collect()
}

#[test]
fn swapping_two_functions_negates_both_sides() {
    for seed in 0..4 {
        let polys = random_polys(seed, 3);
        let mut swapped = polys.clone();
        swapped.swap(0, 2);
        let a = stokes_case(&polys, 8).unwrap();
        let b = stokes_case(&swapped, 8).unwrap();
        assert!(
            (a.interior.value + b.interior.value).abs() <= 1e-12 * (1.0 + a.interior.value.abs())
        );
        assert!(
            (a.boundary.value + b.boundary.value).abs() <= 1e-12 * (1.0 + a.boundary.value.abs())
        );
    }
}

#[test]
fn finite_differences_agree_with_analytic_gradients() {
    let polys = random_polys(11, 3);
    for domain in [FormDomain::CubeInterior, FormDomain::CubeBoundary] {
        let spec = FormIntegralSpec::new(arcs(&polys), domain, 8);
        let fd = spec
            .clone()
            .with_differentiation(Differentiation::FiniteDifference { step: 1e-5 });
        let run = |s: &FormIntegralSpec| match domain {
            FormDomain::CubeInterior => integrate_interior(s).unwrap(),
            FormDomain::CubeBoundary => integrate_boundary(s).unwrap(),
        };
        let (a, b) = (run(&spec), run(&fd));
        assert!(
            (a.value - b.value).abs() <= 1e-7 * a.value.abs().max(1.0),
            "{a:?} vs {b:?}"
        );
    }
}

#[test]
fn cubic_stokes_pair() {
    let g1 = Polynomial::new(3, vec![(1.0, vec![1, 1, 1])]);
    let case = stokes_case(
        &[
            g1,
            Polynomial::new(3, vec![(1.0, vec![0, 1, 0])]),
            Polynomial::new(3, vec![(1.0, vec![0, 0, 1])]),
        ],
        16,
    )
    .unwrap();
    assert!(case.pass, "{case:?}");
    assert!(case.interior.value.abs() < 1e-12);
}

#[test]
fn polynomial_integrals_are_resolution_stable() {
    let polys = random_polys(5, 3);
    let fs = arcs(&polys);
    let a = integrate_boundary(&FormIntegralSpec::new(
        fs.clone(),
        FormDomain::CubeBoundary,
        16,
    ))
    .unwrap();
    let b = integrate_boundary(&FormIntegralSpec::new(fs, FormDomain::CubeBoundary, 32)).unwrap();
    assert!(
        (a.value - b.value).abs() < 1e-8,
        "{} vs {}",
        a.value,
        b.value
    );
}

#[test]
fn coordinate_functions_give_the_cube_volume() {
    let fs: Vec<Arc<dyn CubeFunction>> = (0..3)
        .map(|j| Arc::new(Coordinate(j)) as Arc<dyn CubeFunction>)
        .collect();
    let b = integrate_boundary(&FormIntegralSpec::new(fs, FormDomain::CubeBoundary, 4)).unwrap();
    assert!((b.value - 8.0).abs() < 1e-12);
}

#[test]
fn obstruction_converges_to_the_radial_value() {
    let body = BodyFunction::assemble(2, 1, false).unwrap();
    let oracle = radial_ball_integral(&body, 64).unwrap();
    let values: Vec<_> = [16, 32, 64]
        .iter()
        .map(|&r| obstruction_integral(&body, r).unwrap())
        .collect();
    for v in &values {
        assert!(v.is_certified_nonzero(), "{v:?}");
        assert!(v.value > 0.0);
    }
    assert!((values[2].value - values[1].value).abs() <= values[1].error);
    assert!((values[2].value - oracle).abs() < (values[0].value - oracle).abs());
    assert!((values[2].value - oracle).abs() / oracle < 1e-6);
}

#[test]
fn doubling_m_multiplies_by_sixteen() {
    let body = make_body(2, 1).unwrap();
    let s = scaling_study(&body, &[1.0, 2.0], 16, &[1.0]).unwrap();
    let ratio = s.rows[1].integral / s.rows[0].integral;
    assert!((ratio / 16.0 - 1.0).abs() < 0.01, "{ratio}");
}

#[test]
fn lambda_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in [2, 3] {
        for _ in 0..1000 {
            let x: Vec<f64> = (0..n)
                .map(|_| rand::Rng::random_range(&mut rng, -1.0..1.0))
                .collect();
            let back = lambda_inv(&lambda_map(&x).unwrap()).unwrap();
            for (a, b) in x.iter().zip(&back) {
                assert!((a - b).abs() <= 1e-12, "{x:?} -> {back:?}");
            }
        }
    }
}

#[test]
fn sphere_branches_meet_at_the_equator() {
    let body = BodyFunction::assemble(2, 2, false).unwrap();
    for i in 0..1000 {
        let a = i as f64 * std::f64::consts::TAU / 1000.0;
        let dir = [a.cos(), a.sin()];
        let upper = body.jet(&dir).unwrap();
        let lower = upper.negate_jet();
        let eq = embed_sphere(&body, &SpherePoint::from_polar(&dir, 1.0, true).unwrap()).unwrap();
        for ((u, d), e) in upper.coords().zip(lower.coords()).zip(eq.coords()) {
            assert!((u - d).abs() <= 1e-12 && (u - e).abs() <= 1e-12);
        }
    }
}

#[test]
fn sphere_embedding_is_bracketed_by_lift_length() {
    let body = BodyFunction::assemble(2, 1, false).unwrap();
    let r = sphere_bracketing(&body, 200, 0, 64).unwrap();
    assert!(r.c_emp.is_finite() && r.c_emp > 0.0, "{r:?}");
}

#[test]
fn jet_lift_distance_matches_a_direct_evaluation() {
    let g = SmoothExpr::coord(0).sin() * SmoothExpr::coord(1);
    let p = jet_to_point(&g, &[0.1, 0.2], 2).unwrap();
    let q = jet_to_point(&g, &[0.1, 0.2], 2).unwrap();
    assert_eq!(box_distance(&p, &q).unwrap(), 0.0);
    let q = jet_to_point(&g, &[0.1 + 1e-3, 0.2], 2).unwrap();
    let d = box_distance(&p, &q).unwrap();
    assert!(d > 0.0 && d < 0.1, "{d}");
}
