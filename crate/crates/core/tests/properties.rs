use std::f64::consts::TAU;

use num_complex::Complex;
use proptest::prelude::*;

use hfbem::bem::{AssemblyOptions, BoundarySpace, Mesh, Target};
use hfbem::curves::Curve;
use hfbem::kernels::{kernel_dx, kernel_dy, kernel_s, Formulation};
use hfbem::scattering::{solve_scattering, IncidentField};
use hfbem::spectral::{apply, FourierCoefficients, MultiplierKind, MultiplierOperator, WaveNumber};

const M: usize = 48;

fn coeffs(re: &[f64], im: &[f64]) -> FourierCoefficients<f64> {
    let v = re.iter().zip(im).map(|(&a, &b)| Complex::new(a, b)).collect();
    FourierCoefficients::from_vec(v).unwrap()
}

fn band() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    let n = 2 * M + 1;
    (
        proptest::collection::vec(-1.0f64..1.0, n),
        proptest::collection::vec(-1.0f64..1.0, n),
    )
}

fn kind() -> impl Strategy<Value = MultiplierKind<f64>> {
    prop_oneof![
        Just(MultiplierKind::TwoA),
        Just(MultiplierKind::TwoAInverse),
        Just(MultiplierKind::SingleLayer),
        Just(MultiplierKind::DoubleLayer),
        Just(MultiplierKind::DtNPlus),
        Just(MultiplierKind::Identity),
    ]
}

fn dist(a: &FourierCoefficients<f64>, b: &FourierCoefficients<f64>) -> f64 {
    a.axpy(Complex::new(-1.0, 0.0), b).l2_norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn multipliers_are_linear(k in 2.0f64..30.0, kd in kind(), u in band(), v in band(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let op = MultiplierOperator::new(kd, WaveNumber::new(k).unwrap()).unwrap();
        let (u, v) = (coeffs(&u.0, &u.1), coeffs(&v.0, &v.1));
        let (ca, cb) = (Complex::new(a, 0.5 * b), Complex::new(b, -a));
        let lhs = apply(&op, &u.scale(ca).axpy(cb, &v)).unwrap();
        let rhs = apply(&op, &u).unwrap().scale(ca).axpy(cb, &apply(&op, &v).unwrap());
        prop_assert!(dist(&lhs, &rhs) <= 1e-12 * (1.0 + rhs.l2_norm()));
    }

    #[test]
    fn compositions_commute(k in 2.0f64..30.0, a in kind(), b in kind(), u in band()) {
        let k = WaveNumber::new(k).unwrap();
        let (oa, ob) = (MultiplierOperator::new(a, k).unwrap(), MultiplierOperator::new(b, k).unwrap());
        let u = coeffs(&u.0, &u.1);
        let ab = apply(&MultiplierOperator::compose(&[oa.clone(), ob.clone()]).unwrap(), &u).unwrap();
        let ba = apply(&MultiplierOperator::compose(&[ob.clone(), oa.clone()]).unwrap(), &u).unwrap();
        let seq = apply(&oa, &apply(&ob, &u).unwrap()).unwrap();
        prop_assert!(dist(&ab, &ba) <= 1e-12 * (1.0 + ab.l2_norm()));
        prop_assert!(dist(&ab, &seq) <= 1e-12 * (1.0 + ab.l2_norm()));
    }

    #[test]
    fn identity_preserves_norm(k in 2.0f64..30.0, u in band()) {
        let u = coeffs(&u.0, &u.1);
        let op = MultiplierOperator::new(MultiplierKind::Identity, WaveNumber::new(k).unwrap()).unwrap();
        let direct: f64 = u.as_slice().iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let n = apply(&op, &u).unwrap().l2_norm();
        prop_assert!((n - direct).abs() <= 1e-13 * direct);
        prop_assert!((n - u.l2_norm()).abs() <= 1e-13 * direct);
    }

    #[test]
    fn inverse_is_a_contraction(k in 5.0f64..40.0, u in band()) {
        let u = coeffs(&u.0, &u.1);
        let op = MultiplierOperator::new(MultiplierKind::TwoAInverse, WaveNumber::new(k).unwrap()).unwrap();
        prop_assert!(apply(&op, &u).unwrap().l2_norm() <= u.l2_norm() * (1.0 + 1e-12));
    }

    #[test]
    fn normals_are_unit(t in 0.0f64..TAU, a in 0.3f64..3.0, b in 0.3f64..3.0) {
        for c in [Curve::Ellipse(a, b), Curve::Kite, Curve::Circle(a)] {
            let n = c.normal(t);
            let d = c.derivative(t);
            prop_assert!((n[0].hypot(n[1]) - 1.0).abs() <= 1e-14);
            prop_assert!((n[0] * d[0] + n[1] * d[1]).abs() <= 1e-14 * d[0].hypot(d[1]));
        }
    }

    #[test]
    fn equal_axes_ellipse_is_a_circle(t in 0.0f64..TAU, r in 0.3f64..3.0) {
        let (e, c) = (Curve::Ellipse(r, r), Curve::Circle(r));
        for (p, q) in [(e.position(t), c.position(t)), (e.normal(t), c.normal(t))] {
            prop_assert!((p[0] - q[0]).abs() <= 1e-14 * r && (p[1] - q[1]).abs() <= 1e-14 * r);
        }
        prop_assert!((e.curvature(t) - c.curvature(t)).abs() <= 1e-13 / r);
    }

    #[test]
    fn kernels_are_reciprocal(k in 1.0f64..50.0, s in 0.0f64..TAU, t in 0.0f64..TAU) {
        prop_assume!((s - t).abs() > 1e-3);
        let c = Curve::<f64>::Kite;
        let (x, y) = (c.point(s), c.point(t));
        let (a, b) = (kernel_s(k, &x, &y).unwrap() / y.jac, kernel_s(k, &y, &x).unwrap() / x.jac);
        prop_assert!((a - b).norm() <= 1e-14 * a.norm().max(1.0));
        let (a, b) = (kernel_dx(k, &x, &y).unwrap() / y.jac, kernel_dy(k, &y, &x).unwrap() / x.jac);
        prop_assert!((a - b).norm() <= 1e-13 * a.norm().max(1.0));
    }

    #[test]
    fn projection_is_idempotent(n in 4usize..24, p in 0usize..3, w in -3i64..=3, re in -1.0f64..1.0) {
        let space = BoundarySpace::new(Mesh::uniform_parameter(Curve::Kite, n).unwrap(), p).unwrap();
        let f = move |t: f64| Complex::new(re, 0.3) * Complex::new(0.0, w as f64 * t).exp();
        let once = space.l2_project(&Target::Function(&f)).unwrap();
        let twice = space.l2_project(&Target::Density(&space, &once)).unwrap();
        prop_assert!(twice.sub(&once).l2_norm() <= 1e-12 * (1.0 + once.l2_norm()));
    }
}

#[test]
fn single_precision_pipeline() {
    let space = BoundarySpace::<f32>::new(Mesh::for_hk(Curve::Circle(1.0), 5.0, 0.5).unwrap(), 0).unwrap();
    let inc = IncidentField::plane_wave(5.0f32, 0.0).unwrap();
    let sol = solve_scattering(&space, &inc, Formulation::Indirect, AssemblyOptions::default()).unwrap();
    assert!(sol.relative_residual < 1e-3);
    let u = sol.reconstruct_field(&[[2.0f32, 0.5]]).unwrap();
    assert!(u[0].norm().is_finite() && u[0].norm() < 3.0);
}
