use std::f64::consts::PI;

use hypquake::duality::*;
use hypquake::moebius::MinkowskiVec;
use hypquake::scalar::{with_precision, BigReal, Real};
use nalgebra::{DMatrix, Matrix4};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn mv(c: [f64; 4]) -> MinkowskiVec<f64> {
    MinkowskiVec { coords: c }
}

fn plane(c: [f64; 4]) -> OrientedPlane {
    OrientedPlane::from_normal(mv(c)).unwrap()
}

fn e(k: usize) -> [f64; 4] {
    let mut c = [0.0; 4];
    c[k] = 1.0;
    c
}

fn pair_of_planes(rng: &mut ChaCha8Rng) -> (OrientedPlane, OrientedPlane) {
    (random_plane(rng, 2.0), random_plane(rng, 2.0))
}

/// Points of the plane, as orthogonal projections of a few fixed points of
/// the hyperboloid, sent to the Poincaré ball.
fn ball_points(p: &OrientedPlane) -> Vec<[f64; 3]> {
    let n = p.normal().coords;
    let pair = |a: &[f64; 4], b: &[f64; 4]| -a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
    let mut out = Vec::new();
    for (r, u) in [(0.0, [1.0, 0.0, 0.0]), (0.9, [0.0, 1.0, 0.0]), (0.7, [0.6, 0.0, 0.8]), (1.1, [-0.48, 0.6, -0.64]), (0.5, [0.0, -0.6, 0.8])] {
        let z: [f64; 4] = [f64::cosh(r), f64::sinh(r) * u[0], f64::sinh(r) * u[1], f64::sinh(r) * u[2]];
        let s = pair(&z, &n);
        let mut x = [0.0; 4];
        for k in 0..4 {
            x[k] = z[k] - s * n[k];
        }
        let scale = (-pair(&x, &x)).sqrt();
        let x = x.map(|c| c / scale);
        out.push([x[1] / (1.0 + x[0]), x[2] / (1.0 + x[0]), x[3] / (1.0 + x[0])]);
    }
    out
}

/// Generalized sphere `a|y|^2 + D.y + E = 0` through the points, as the
/// null vector of the linear system.
fn fit_sphere(pts: &[[f64; 3]]) -> [f64; 5] {
    let mut m = DMatrix::zeros(pts.len(), 5);
    for (i, y) in pts.iter().enumerate() {
        m[(i, 0)] = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
        m[(i, 1)] = y[0];
        m[(i, 2)] = y[1];
        m[(i, 3)] = y[2];
        m[(i, 4)] = 1.0;
    }
    let svd = m.svd(false, true);
    let k = svd.singular_values.imin();
    let v = svd.v_t.expect("requested").row(k).into_owned();
    [v[0], v[1], v[2], v[3], v[4]]
}

/// Absolute inversive product of two generalized spheres: `|cos θ|` for
/// spheres meeting at angle `θ`, `cosh d` for planes at hyperbolic distance
/// `d` when both are orthogonal to the unit sphere.
fn inversive(s: &[f64; 5], t: &[f64; 5]) -> f64 {
    let dot = |a: &[f64; 5], b: &[f64; 5]| a[1] * b[1] + a[2] * b[2] + a[3] * b[3] - 2.0 * (a[0] * b[4] + a[4] * b[0]);
    (dot(s, t) / (dot(s, s).sqrt() * dot(t, t).sqrt())).abs()
}

fn ball_oracle(p1: &OrientedPlane, p2: &OrientedPlane) -> f64 {
    inversive(&fit_sphere(&ball_points(p1)), &fit_sphere(&ball_points(p2)))
}

#[test]
fn plane_dual_examples() {
    let p = plane(e(3));
    assert_eq!(plane_dual(&p).vector().coords, e(3));
    assert_eq!(plane_dual(&p.reversed()).vector().coords, e(3).map(|x| -x));
    let json = serde_json::to_string(&p).unwrap();
    assert_eq!(json, "[0.0,0.0,0.0,1.0]");
    let back: OrientedPlane = serde_json::from_str(&json).unwrap();
    assert_eq!(back, p);
    assert!(serde_json::from_str::<OrientedPlane>("[1.0,0.0,0.0,0.0]").is_err());
}

#[test]
fn classification_examples() {
    let theta: f64 = 0.7;
    let p1 = plane(e(3));
    let p2 = plane([0.0, 0.0, theta.sin(), theta.cos()]);
    let p = theta.cos() * 1.0;
    match classify_plane_pair(&p1, &p2).unwrap() {
        PlanePair::Intersecting { angle } => {
            assert!((angle - p.acos()).abs() < 1e-15);
            assert!((angle - 0.7).abs() < 1e-14);
        }
        other => panic!("{other:?}"),
    }
    match dual_segment_type(&plane_dual(&p1), &plane_dual(&p2)).unwrap() {
        DualSegment::Spacelike { length } => assert!((length - 0.7).abs() < 1e-14),
        other => panic!("{other:?}"),
    }

    let d: f64 = 1.3;
    let p3 = plane([d.sinh(), 0.0, 0.0, d.cosh()]);
    match classify_plane_pair(&p1, &p3).unwrap() {
        PlanePair::Disjoint { distance, nested } => {
            assert!(nested);
            assert!((distance - d.cosh().acosh()).abs() < 1e-15);
            assert!((distance - 1.3).abs() < 1e-12);
        }
        other => panic!("{other:?}"),
    }
    match dual_segment_type(&plane_dual(&p1), &plane_dual(&p3)).unwrap() {
        DualSegment::Timelike { length, connected } => {
            assert!(connected);
            assert!((length - 1.3).abs() < 1e-12);
        }
        other => panic!("{other:?}"),
    }

    // e3 + (e0 + e1): unit, pairing 1 with e3.
    let p4 = plane([1.0, 1.0, 0.0, 1.0]);
    assert_eq!(classify_plane_pair(&p1, &p4).unwrap(), PlanePair::Asymptotic { nested: true });
    assert_eq!(classify_plane_pair(&p1, &p4.reversed()).unwrap(), PlanePair::Asymptotic { nested: false });
    assert_eq!(
        dual_segment_type(&plane_dual(&p1), &plane_dual(&p4)).unwrap(),
        DualSegment::Lightlike { connected: true }
    );

    assert!(classify_plane_pair(&p1, &p1).is_err());
    assert!(classify_plane_pair(&p1, &p1.reversed()).is_err());
    assert!(dual_segment_type(&plane_dual(&p1), &plane_dual(&p1.reversed())).is_err());
}

#[test]
fn interior_and_exterior_angles() {
    // Half-spaces {x3 < 0} and {x2 < 0} meet at a right angle.
    let pair = classify_plane_pair(&plane(e(3)), &plane(e(2))).unwrap();
    assert!((pair.interior_angle().unwrap() - PI / 2.0).abs() < 1e-15);
    // {x3 < 0} and {x2 sin t + x3 cos t > 0} form a thin wedge of opening t.
    let t: f64 = 0.3;
    let pair = classify_plane_pair(&plane(e(3)), &plane([0.0, 0.0, -t.sin(), -t.cos()])).unwrap();
    assert!((pair.interior_angle().unwrap() - t).abs() < 1e-14);
    let inside = HPoint::new(mv([1.0f64.cosh(), 0.0, 1.0f64.sinh() * (t / 2.0).cos(), -(1.0f64.sinh()) * (t / 2.0).sin()])).unwrap();
    assert!(inside.signed_distance(&plane(e(3))) < 0.0);
    assert!(inside.signed_distance(&plane([0.0, 0.0, -t.sin(), -t.cos()])) < 0.0);
}

#[test]
fn random_pair_dictionary() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut cases = [0usize; 3];
    for k in 0..100 {
        let (p1, p2) = pair_of_planes(&mut rng);
        let pair = classify_plane_pair(&p1, &p2).unwrap();
        let seg = dual_segment_type(&plane_dual(&p1), &plane_dual(&p2)).unwrap();
        assert!(dictionary_agrees(&pair, &seg, 1e-9), "pair {k}: {pair:?} vs {seg:?}");
        let oracle = ball_oracle(&p1, &p2);
        match pair {
            PlanePair::Intersecting { angle } => {
                cases[0] += 1;
                assert!((angle.cos().abs() - oracle).abs() < 1e-9, "pair {k}: {angle} vs {oracle}");
            }
            PlanePair::Disjoint { distance, .. } => {
                cases[1 + usize::from(distance > 1.0)] += 1;
                assert!((distance.cosh() - oracle).abs() < 1e-9 * oracle, "pair {k}: {} vs {oracle}", distance.cosh());
            }
            PlanePair::Asymptotic { .. } => panic!("measure-zero case at pair {k}"),
        }
    }
    assert!(cases.iter().all(|&c| c > 0), "{cases:?}");
}

#[test]
fn duality_is_an_involution() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..100 {
        let p = random_plane(&mut rng, 3.0);
        let back = plane_dual(&p).dual_plane();
        let err = (0..4).map(|k| (back.normal().coords[k] - p.normal().coords[k]).abs()).fold(0.0, f64::max);
        assert!(err <= 1e-12);
        let rev = plane_dual(&p.reversed());
        for k in 0..4 {
            assert_eq!(rev.vector().coords[k], -p.normal().coords[k]);
        }
    }
}

fn lengths(pair: &PlanePair) -> (u8, f64) {
    match *pair {
        PlanePair::Intersecting { angle } => (0, angle),
        PlanePair::Asymptotic { nested } => (1, f64::from(u8::from(nested))),
        PlanePair::Disjoint { distance, nested } => (2 + u8::from(nested), distance),
    }
}

#[test]
fn lorentz_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let pairs: Vec<_> = (0..20).map(|_| pair_of_planes(&mut rng)).collect();
    for _ in 0..10 {
        let m: Matrix4<f64> = random_lorentz(&mut rng, 1.0);
        let g = Matrix4::from_diagonal(&nalgebra::Vector4::new(-1.0, 1.0, 1.0, 1.0));
        assert!((m.transpose() * g * m - g).abs().max() < 1e-12);
        assert!(m[(0, 0)] > 0.0);
        for (p1, p2) in &pairs {
            let a = lengths(&classify_plane_pair(p1, p2).unwrap());
            let b = lengths(&classify_plane_pair(&p1.transform(&m).unwrap(), &p2.transform(&m).unwrap()).unwrap());
            assert_eq!(a.0, b.0);
            assert!((a.1 - b.1).abs() < 1e-9);
        }
        let x = random_point(&mut rng, 1.0);
        let img = HPoint::new(x.vector().transform(&m)).unwrap();
        let (p, _) = &pairs[0];
        let d0 = x.signed_distance(p);
        let d1 = img.signed_distance(&p.transform(&m).unwrap());
        assert!((d0 - d1).abs() < 1e-9);
    }
}

#[test]
fn equidistant_examples() {
    let c = equidistant_curvatures(&1.0f64).unwrap();
    assert!((c.k - (-0.419974)).abs() < 1e-6);
    assert!((c.k_third - (-0.724062)).abs() < 1e-6);
    assert!((k_star(&c.k) - c.k_third).abs() < 1e-12);

    let c = equidistant_curvatures(&1e-3f64).unwrap();
    assert!(c.k > -1.0 && c.k < -0.999);
    assert!((c.k_third / -1e6 - 1.0).abs() < 1e-6);

    let c = equidistant_curvatures(&5.0f64).unwrap();
    assert!(c.k < 0.0 && c.k > -1e-3);
    assert!(c.k_third < 0.0 && c.k_third > -1e-3);

    assert!(equidistant_curvatures(&0.0f64).is_err());
    assert!(equidistant_curvatures(&-1.0f64).is_err());
}

#[test]
fn curvature_relation_on_a_grid() {
    for j in 0..50 {
        let d = 0.05 + (5.0 - 0.05) * j as f64 / 49.0;
        let c = equidistant_curvatures(&d).unwrap();
        // The identity -1/(cosh^2 - 1) = -1/sinh^2, computed without the
        // cancellation in K + 1.
        let stable = c.k / (1.0 / (d.cosh() * d.cosh()) * (d.sinh() * d.sinh()));
        assert!((c.k_third - stable).abs() < 1e-12, "d = {d}");
        assert!((c.k_third - k_star(&c.k)).abs() <= 1e-12 * c.k_third.abs(), "d = {d}");
        with_precision(256, || {
            let db = BigReal::from_f64(d);
            let cb = equidistant_curvatures(&db).unwrap();
            let gap = (cb.k_third.clone() - k_star(&cb.k)).abs().to_f64();
            assert!(gap < 1e-60, "d = {d}: {gap:e}");
            assert!((cb.k_third.to_f64() - c.k_third).abs() <= 1e-13 * c.k_third.abs());
        });
    }
}

/// Scale factors of the induced metric and of the third fundamental form of
/// the surface at distance `d` from `{x3 = 0}`, measured along a geodesic of
/// the plane by finite differences.
fn measured_scales(d: f64) -> (f64, f64) {
    let y = |s: f64| [s.cosh() * 0.4f64.cosh(), s.sinh(), s.cosh() * 0.4f64.sinh(), 0.0];
    let x = |s: f64| {
        let v = y(s);
        [v[0] * d.cosh(), v[1] * d.cosh(), v[2] * d.cosh(), d.sinh()]
    };
    let nrm = |s: f64| {
        let v = y(s);
        [v[0] * d.sinh(), v[1] * d.sinh(), v[2] * d.sinh(), d.cosh()]
    };
    let speed = |f: &dyn Fn(f64) -> [f64; 4]| {
        let h = 1e-5;
        let (a, b) = (f(0.3 + h), f(0.3 - h));
        let v: Vec<f64> = (0..4).map(|k| (a[k] - b[k]) / (2.0 * h)).collect();
        (-v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3]).sqrt()
    };
    let base = speed(&y);
    (speed(&x) / base, speed(&nrm) / base)
}

#[test]
fn equidistant_surface_scales() {
    for d in [0.2, 1.0, 2.5] {
        let (i, iii) = measured_scales(d);
        let c = equidistant_curvatures(&d).unwrap();
        assert!((-1.0 / (i * i) - c.k).abs() < 1e-8, "d = {d}");
        assert!((-1.0 / (iii * iii) - c.k_third).abs() < 1e-8 * c.k_third.abs(), "d = {d}");
    }
}

#[test]
fn two_faces() {
    let theta: f64 = 0.9;
    let faces = [plane(e(3)), plane([0.0, 0.0, theta.sin(), theta.cos()])];
    let dual = polyhedral_dual(&faces, &[(0, 1)]).unwrap();
    assert_eq!(dual.vertices.len(), 2);
    assert_eq!(dual.edges.len(), 1);
    assert!((dual.edges[0].length - theta).abs() < 1e-14);
    assert!((dual.edges[0].interior_angle - (PI - theta)).abs() < 1e-14);
}

#[test]
fn symmetric_faces_around_an_axis() {
    let tilt: f64 = 0.5;
    let faces: Vec<_> = (0..3)
        .map(|j| {
            let a = 2.0 * PI * j as f64 / 3.0;
            plane([0.0, tilt.sin() * a.cos(), tilt.sin() * a.sin(), tilt.cos()])
        })
        .collect();
    let dual = polyhedral_dual(&faces, &[(0, 1), (1, 2), (2, 0)]).unwrap();
    let l0 = dual.edges[0].length;
    for edge in &dual.edges {
        assert!((edge.length - l0).abs() < 1e-14);
    }
    let p = tilt.sin().powi(2) * (2.0 * PI / 3.0).cos() + tilt.cos().powi(2);
    assert!((l0 - p.acos()).abs() < 1e-14);
}

#[test]
fn random_four_face_caps() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut built = 0;
    while built < 10 {
        let faces: Vec<_> = (0..4).map(|_| random_plane(&mut rng, 0.5)).collect();
        let adjacency = [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)];
        let all_meet = adjacency.iter().all(|&(i, j)| {
            matches!(classify_plane_pair(&faces[i], &faces[j]), Ok(PlanePair::Intersecting { .. }))
        });
        let result = polyhedral_dual(&faces, &adjacency);
        if !all_meet {
            assert!(result.is_err());
            continue;
        }
        let dual = result.unwrap();
        for edge in &dual.edges {
            let (i, j) = edge.faces;
            let PlanePair::Intersecting { angle } = classify_plane_pair(&faces[i], &faces[j]).unwrap() else {
                unreachable!()
            };
            assert!((edge.length - angle).abs() < 1e-10);
            assert!((ball_oracle(&faces[i], &faces[j]) - angle.cos().abs()).abs() < 1e-9);
        }
        built += 1;
    }
}

#[test]
fn non_convex_caps_are_rejected() {
    let faces = [plane(e(3)), plane([1.3f64.sinh(), 0.0, 0.0, 1.3f64.cosh()])];
    let err = polyhedral_dual(&faces, &[(0, 1)]).unwrap_err();
    assert!(err.to_string().contains("not a convex cap"));
    assert!(polyhedral_dual(&faces, &[(0, 2)]).is_err());
    assert!(polyhedral_dual(&faces, &[(1, 1)]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn classification_is_symmetric(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p1, p2) = pair_of_planes(&mut rng);
        let a = lengths(&classify_plane_pair(&p1, &p2).unwrap());
        let b = lengths(&classify_plane_pair(&p2, &p1).unwrap());
        prop_assert_eq!(a.0, b.0);
        prop_assert!((a.1 - b.1).abs() < 1e-12);
    }

    #[test]
    fn dictionary_holds(seed in any::<u64>(), rapidity in 0.0f64..1.5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p1, p2) = pair_of_planes(&mut rng);
        let m = random_lorentz(&mut rng, rapidity);
        let (q1, q2) = (p1.transform(&m).unwrap(), p2.transform(&m).unwrap());
        let pair = classify_plane_pair(&q1, &q2).unwrap();
        let seg = dual_segment_type(&plane_dual(&q1), &plane_dual(&q2)).unwrap();
        prop_assert!(dictionary_agrees(&pair, &seg, 1e-9));
    }

    #[test]
    fn reversing_one_plane(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p1, p2) = pair_of_planes(&mut rng);
        let a = classify_plane_pair(&p1, &p2).unwrap();
        let b = classify_plane_pair(&p1, &p2.reversed()).unwrap();
        match (a, b) {
            (PlanePair::Intersecting { angle: x }, PlanePair::Intersecting { angle: y }) => {
                prop_assert!((x + y - PI).abs() < 1e-12)
            }
            (PlanePair::Disjoint { distance: x, nested: n }, PlanePair::Disjoint { distance: y, nested: m }) => {
                prop_assert!((x - y).abs() < 1e-12);
                prop_assert!(n != m);
            }
            other => prop_assert!(false, "{:?}", other),
        }
    }
}
