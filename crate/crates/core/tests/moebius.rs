use hypquake::error::Error;
use hypquake::moebius::{
    axis, classify_isometry, geodesics_link, translation_length, BoundaryPoint, GeodesicLine, Isometry2, IsometryKind,
    MinkowskiVec,
};
use hypquake::scalar::{with_precision, BigReal, Real};
use proptest::prelude::*;

type Iso = Isometry2<f64>;

fn m(a: f64, b: f64, c: f64, d: f64) -> Iso {
    Iso::from_f64(a, b, c, d).unwrap()
}

fn fin(x: f64) -> BoundaryPoint {
    BoundaryPoint::Finite(x)
}

fn line(u: BoundaryPoint, v: BoundaryPoint) -> GeodesicLine {
    GeodesicLine::new(u, v).unwrap()
}

fn endpoints(l: &GeodesicLine) -> (BoundaryPoint, BoundaryPoint) {
    (l.start, l.end)
}

#[test]
fn classification() {
    let e = 0.5f64.exp();
    assert_eq!(classify_isometry(&Iso::identity()), IsometryKind::Identity);
    assert_eq!(classify_isometry(&m(e, 0.0, 0.0, 1.0 / e)), IsometryKind::Hyperbolic);
    assert_eq!(classify_isometry(&m(1.0, 1.0, 0.0, 1.0)), IsometryKind::Parabolic);
    assert_eq!(classify_isometry(&m(0.0, -1.0, 1.0, 0.0)), IsometryKind::Elliptic);
}

#[test]
fn translation_lengths() {
    let e = 0.5f64.exp();
    assert!((translation_length(&m(e, 0.0, 0.0, 1.0 / e)).unwrap() - 1.0).abs() < 1e-14);
    let expected = 2.0 * (1.5f64).acosh();
    assert!((translation_length(&m(2.0, 1.0, 1.0, 1.0)).unwrap() - expected).abs() < 1e-14);
    assert!((expected - 1.924847).abs() < 1e-6);
    assert!(matches!(
        translation_length(&m(1.0, 1.0, 0.0, 1.0)),
        Err(Error::NotHyperbolic { .. })
    ));
}

#[test]
fn scalar_types_agree() {
    let g32 = Isometry2::<f32>::from_f64(2.0, 1.0, 1.0, 1.0).unwrap();
    assert!((g32.translation_length().unwrap() as f64 - 2.0 * 1.5f64.acosh()).abs() < 1e-5);
    let lb = with_precision(200, || {
        Isometry2::<BigReal>::from_f64(2.0, 1.0, 1.0, 1.0)
            .unwrap()
            .translation_length()
            .unwrap()
            .to_f64()
    });
    assert!((lb - 2.0 * 1.5f64.acosh()).abs() < 1e-15);
}

#[test]
fn axes() {
    let e = 0.5f64.exp();
    let (u, v) = endpoints(&axis(&m(e, 0.0, 0.0, 1.0 / e)).unwrap());
    assert_eq!((u, v), (fin(0.0), BoundaryPoint::Infinity));
    let (u, v) = endpoints(&axis(&m(2.0, 1.0, 1.0, 1.0)).unwrap());
    let s5 = 5f64.sqrt();
    let mut got = [u.finite().unwrap(), v.finite().unwrap()];
    got.sort_by(f64::total_cmp);
    assert!((got[0] - (1.0 - s5) / 2.0).abs() < 1e-14 && (got[1] - (1.0 + s5) / 2.0).abs() < 1e-14);
    let shift = m(1.0, 1.0, 0.0, 1.0);
    let g = m(2.0, 1.0, 1.0, 1.0);
    let (u2, v2) = endpoints(&axis(&g.conjugate_by(&shift)).unwrap());
    assert!((u2.finite().unwrap() - u.finite().unwrap() - 1.0).abs() < 1e-13);
    assert!((v2.finite().unwrap() - v.finite().unwrap() - 1.0).abs() < 1e-13);
}

#[test]
fn linking_examples() {
    let inf = BoundaryPoint::Infinity;
    assert!(geodesics_link(&line(fin(0.0), inf), &line(fin(-1.0), fin(1.0))).unwrap());
    assert!(!geodesics_link(&line(fin(0.0), fin(1.0)), &line(fin(2.0), fin(3.0))).unwrap());
    assert!(geodesics_link(&line(fin(0.0), fin(2.0)), &line(fin(1.0), fin(3.0))).unwrap());
    assert!(matches!(
        geodesics_link(&line(fin(0.0), fin(2.0)), &line(fin(2.0), fin(3.0))),
        Err(Error::Degenerate(_))
    ));
}

fn entries() -> impl Strategy<Value = Iso> {
    (-3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0)
        .prop_filter("positive determinant", |(a, b, c, d)| a * d - b * c > 0.05)
        .prop_map(|(a, b, c, d)| m(a, b, c, d))
}

fn hyperbolic() -> impl Strategy<Value = Iso> {
    (entries(), 0.1f64..4.0).prop_map(|(h, l)| Iso::diagonal_translation(&l).conjugate_by(&h))
}

fn lines() -> impl Strategy<Value = GeodesicLine> {
    (-5.0f64..5.0, -5.0f64..5.0)
        .prop_filter("distinct", |(u, v)| (u - v).abs() > 1e-3)
        .prop_map(|(u, v)| line(fin(u), fin(v)))
}

proptest! {
    #[test]
    fn length_is_a_class_function(g in hyperbolic(), h in entries()) {
        let l = g.translation_length().unwrap();
        prop_assert!((g.inverse().translation_length().unwrap() - l).abs() < 1e-10);
        prop_assert!((g.conjugate_by(&h).translation_length().unwrap() - l).abs() < 1e-10 * (1.0 + l));
    }

    #[test]
    fn length_of_powers(g in hyperbolic(), n in 1usize..=5) {
        let l = g.translation_length().unwrap();
        let mut p = Iso::identity();
        for _ in 0..n {
            p = &p * &g;
        }
        prop_assert!((p.translation_length().unwrap() - n as f64 * l).abs() < 1e-9 * (1.0 + n as f64 * l));
    }

    #[test]
    fn composition_is_associative(a in entries(), b in entries(), c in entries()) {
        let x = &(&a * &b) * &c;
        let y = &a * &(&b * &c);
        let scale = 1.0 + [x.a, x.b, x.c, x.d].iter().map(|v| v.abs()).fold(0.0, f64::max);
        for (p, q) in [(x.a, y.a), (x.b, y.b), (x.c, y.c), (x.d, y.d)] {
            prop_assert!((p - q).abs() < 1e-12 * scale);
        }
    }

    #[test]
    fn linking_symmetric_and_invariant(a in lines(), b in lines(), h in entries()) {
        let gap = [a.start, a.end].iter().flat_map(|p| [b.start, b.end].map(|q| p.gap(&q))).fold(f64::MAX, f64::min);
        prop_assume!(gap > 1e-3);
        let l = geodesics_link(&a, &b).unwrap();
        prop_assert_eq!(l, geodesics_link(&b, &a).unwrap());
        prop_assert_eq!(l, geodesics_link(&a.image(&h), &b.image(&h)).unwrap());
    }

    #[test]
    fn minkowski_pairing_bilinear(
        x in proptest::array::uniform4(-5.0f64..5.0),
        y in proptest::array::uniform4(-5.0f64..5.0),
        z in proptest::array::uniform4(-5.0f64..5.0),
        s in -3.0f64..3.0,
    ) {
        let v = |c: [f64; 4]| MinkowskiVec::new(c[0], c[1], c[2], c[3]);
        let (x, y, z) = (v(x), v(y), v(z));
        prop_assert!((x.pairing(&y) - y.pairing(&x)).abs() < 1e-12);
        let sum: [f64; 4] = std::array::from_fn(|k| x.coords[k] * s + z.coords[k]);
        let lhs = v(sum).pairing(&y);
        let rhs = s * x.pairing(&y) + z.pairing(&y);
        prop_assert!((lhs - rhs).abs() < 1e-12 * (1.0 + lhs.abs()));
    }
}
