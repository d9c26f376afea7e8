use hypquake::earthquake::{
    asymptotic_slope, earthquake, fn_twist_coords, verify_length_estimate, EarthquakePath, Method,
};
use hypquake::laminations::{EnumerationBudget, MultiCurve};
use hypquake::surface::{CurveClass, FenchelNielsen, MarkedSurface, PantsGraph};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(s: &str) -> CurveClass {
    CurveClass::parse(s).unwrap()
}

fn topo() -> PantsGraph {
    PantsGraph::standard(2).unwrap()
}

fn random_fn(rng: &mut ChaCha8Rng) -> FenchelNielsen {
    FenchelNielsen::new(
        (0..3).map(|_| rng.gen_range(0.5..3.0)).collect(),
        (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect(),
    )
}

fn random_pants_support(rng: &mut ChaCha8Rng) -> MultiCurve {
    let t = topo();
    let mut comps = Vec::new();
    while comps.is_empty() {
        for j in 0..3 {
            if rng.gen_bool(0.5) {
                comps.push((t.curve_class(j), rng.gen_range(0.1..5.0)));
            }
        }
    }
    MultiCurve::new(comps).unwrap()
}

fn spectrum(s: &MarkedSurface) -> Vec<f64> {
    s.lengths(&topo().marking_set()).unwrap()
}

fn quake(f: &FenchelNielsen, l: &MultiCurve, t: f64, m: Method) -> MarkedSurface {
    earthquake(&EarthquakePath::new(&topo(), f, l, t, m), &EnumerationBudget::default()).unwrap()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn zero_scale_is_identity() {
    let f = FenchelNielsen::new(vec![1.1, 2.2, 0.8], vec![0.4, -0.1, 0.9]);
    let base = spectrum(&MarkedSurface::new(&topo(), &f).unwrap());
    let l = MultiCurve::new(vec![(c("b1"), 2.0), (c("a1 b1 A1 B1"), 1.0)]).unwrap();
    for m in [Method::FnTwist, Method::HolonomyInsert] {
        assert!(max_diff(&spectrum(&quake(&f, &l, 0.0, m)), &base) < 1e-10);
    }
}

#[test]
fn support_lengths_are_constant() {
    let f = FenchelNielsen::new(vec![1.4, 0.9, 2.1], vec![0.2, 0.3, -0.6]);
    let l = MultiCurve::single(c("b1"), 1.0).unwrap();
    for t in [0.1, 1.0, 7.0, 40.0] {
        for m in [Method::FnTwist, Method::HolonomyInsert] {
            assert!((quake(&f, &l, t, m).length(&c("b1")).unwrap() - 1.4).abs() < 1e-10);
        }
    }
    // General support through the insertion path.
    let l = MultiCurve::single(c("a1"), 0.7).unwrap();
    let l0 = MarkedSurface::new(&topo(), &f).unwrap().length(&c("a1")).unwrap();
    for t in [0.5, 3.0, 20.0] {
        let s = quake(&f, &l, t, Method::HolonomyInsert);
        assert!(s.residual() < 1e-8);
        assert!((s.length(&c("a1")).unwrap() - l0).abs() < 1e-10);
    }
}

#[test]
fn methods_agree_on_pants_support() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..20 {
        let f = random_fn(&mut rng);
        let l = random_pants_support(&mut rng);
        let t = rng.gen_range(0.0..3.0);
        let ins = quake(&f, &l, t, Method::HolonomyInsert);
        assert!(ins.residual() < 1e-8, "{}", ins.residual());
        let d = max_diff(&spectrum(&ins), &spectrum(&quake(&f, &l, t, Method::FnTwist)));
        assert!(d < 1e-7, "{f:?} {t}: {d:e}");
    }
}

#[test]
fn right_earthquake_is_the_inverse_twist() {
    let f = FenchelNielsen::new(vec![1.0, 1.3, 0.9], vec![0.0, 0.5, -0.2]);
    let l = MultiCurve::new(vec![(c("b2"), 1.5), (c("a1 b1 A1 B1"), 0.5)]).unwrap();
    let b = EnumerationBudget::default();
    let right = earthquake(&EarthquakePath::new(&topo(), &f, &l, 2.0, Method::HolonomyInsert).right(), &b).unwrap();
    let coords = fn_twist_coords(&EarthquakePath::new(&topo(), &f, &l, 2.0, Method::FnTwist)).unwrap();
    let mirrored = f.twisted(&[0.0, -(coords.twists[1] - f.twists[1]), -(coords.twists[2] - f.twists[2])]);
    let expected = spectrum(&MarkedSurface::new(&topo(), &mirrored).unwrap());
    assert!(max_diff(&spectrum(&right), &expected) < 1e-7);
}

#[test]
fn left_orientation_pinned_by_full_twist() {
    // On the symmetric surface a1 and b1 cross orthogonally, and a full left
    // twist along b1 carries a1 b1 to a curve as long as a1: the common
    // perpendicular d of the two copies of b1.
    let (ch, sh) = (0.75f64.cosh(), 0.75f64.sinh());
    let d = ((ch + ch * ch) / (sh * sh)).acosh();
    let f = FenchelNielsen::uniform(2, 1.5);
    let l = MultiCurve::single(c("b1"), 1.0).unwrap();
    for m in [Method::FnTwist, Method::HolonomyInsert] {
        let s = quake(&f, &l, 1.5, m);
        assert!((s.length(&c("a1 b1")).unwrap() - d).abs() < 1e-10);
    }
    let b = EnumerationBudget::default();
    let right = earthquake(&EarthquakePath::new(&topo(), &f, &l, 1.5, Method::FnTwist).right(), &b).unwrap();
    assert!((right.length(&c("a1 b1")).unwrap() - d).abs() > 0.1);
    assert!((right.length(&c("a1 B1")).unwrap() - d).abs() < 1e-10);
}

#[test]
fn flow_property() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..5 {
        let f = random_fn(&mut rng);
        let l = random_pants_support(&mut rng);
        let (t1, t2) = (rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0));
        let mid = fn_twist_coords(&EarthquakePath::new(&topo(), &f, &l, t1, Method::FnTwist)).unwrap();
        for m in [Method::FnTwist, Method::HolonomyInsert] {
            let two_step = spectrum(&quake(&mid, &l, t2, m));
            let one_step = spectrum(&quake(&f, &l, t1 + t2, m));
            assert!(max_diff(&two_step, &one_step) < 1e-7, "{m:?} {f:?} {l:?} {t1} {t2} {:e} {two_step:?} {one_step:?}", max_diff(&two_step, &one_step));
        }
    }
}

#[test]
fn estimate_on_crossing_and_disjoint_curves() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let f = random_fn(&mut rng);
    let l = MultiCurve::single(c("b1"), 1.0).unwrap();
    let b = EnumerationBudget::default();
    let grid = [0.1, 1.0, 10.0, 50.0];
    let cert = verify_length_estimate(&topo(), &f, &l, &c("a1"), &grid, 1e-6, Method::FnTwist, &b).unwrap();
    assert!(cert.pass, "{cert:?}");
    assert_eq!(cert.intersection, 1.0);
    let cert = verify_length_estimate(&topo(), &f, &l, &c("a2"), &grid, 1e-6, Method::FnTwist, &b).unwrap();
    assert!(cert.pass);
    assert_eq!(cert.intersection, 0.0);
    assert!(cert.rows.iter().all(|r| (r.measured - cert.base_length).abs() < 1e-9));
    assert!(verify_length_estimate(&topo(), &f, &l, &c("a2"), &[], 1e-6, Method::FnTwist, &b).is_err());
}

#[test]
fn estimate_along_non_pants_support() {
    let f = FenchelNielsen::new(vec![1.2, 1.0, 1.6], vec![0.1, -0.3, 0.2]);
    let b = EnumerationBudget::default();
    let l = MultiCurve::single(c("a1 a2"), 0.8).unwrap();
    for g in ["b1", "a1 b1 A1 B1", "b1 b2", "a2"] {
        let cert =
            verify_length_estimate(&topo(), &f, &l, &c(g), &[0.5, 2.0, 8.0], 1e-6, Method::HolonomyInsert, &b).unwrap();
        assert!(cert.pass, "{g}: {cert:?}");
    }
}

#[test]
fn slope_tends_to_intersection() {
    let f = FenchelNielsen::new(vec![0.9, 1.7, 1.1], vec![0.5, 0.0, -0.4]);
    let b = EnumerationBudget::default();
    let l = MultiCurve::single(c("b1"), 1.0).unwrap();
    let l0 = MarkedSurface::new(&topo(), &f).unwrap().length(&c("a1")).unwrap();
    let s1 = asymptotic_slope(&topo(), &f, &l, &c("a1"), 1e3, Method::FnTwist, &b).unwrap();
    assert!((s1 - 1.0).abs() <= 1e-3 * l0 + 1e-6);
    let s2 = asymptotic_slope(&topo(), &f, &l.scaled(2.0).unwrap(), &c("a1"), 1e3, Method::FnTwist, &b).unwrap();
    assert!((s2 - 2.0 * s1).abs() <= 2.0 * l0 / 1e3 + 1e-6);
    let s0 = asymptotic_slope(&topo(), &f, &l, &c("a2"), 1e3, Method::FnTwist, &b).unwrap();
    assert!(s0 <= l0 / 1e3 + 1e-6 + 2.0 / 1e3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn insertion_closes_up(
        l in proptest::collection::vec(0.5f64..3.0, 3),
        tw in proptest::collection::vec(-1.0f64..1.0, 3),
        w in 0.1f64..5.0,
        t in 0.0f64..10.0,
    ) {
        let f = FenchelNielsen::new(l, tw);
        let lam = MultiCurve::single(c("a1 b1 A1 B1"), w).unwrap();
        let s = quake(&f, &lam, t, Method::HolonomyInsert);
        prop_assert!(s.residual() < 1e-8);
        let fast = quake(&f, &lam, t, Method::FnTwist);
        prop_assert!(max_diff(&spectrum(&s), &spectrum(&fast)) < 1e-7);
    }
}
