use adp_core::lambda::{lambda, lambda_estimate, theta, theta_from_lambda, LambdaPoint, SmoothCutoff};

const RS: [f64; 5] = [2.0, 5.0, 10.0, 20.0, 50.0];
const ZS: [f64; 5] = [1e-3, 1e-2, 0.1, 1.0, 10.0];

#[test]
fn conjugation_on_grid() {
    let c = SmoothCutoff::default();
    for r in RS {
        for z in ZS {
            let l = lambda(LambdaPoint::new(r, z).unwrap(), c).unwrap();
            let m = lambda(LambdaPoint::new(-r, z).unwrap(), c).unwrap();
            assert!((l - m.conj()).norm() <= 1e-9 * l.norm(), "r = {r}, Z = {z}");
        }
    }
}

#[test]
fn converges_on_grid() {
    let c = SmoothCutoff::new(1.0 / 32.0).unwrap();
    for r in RS {
        for z in ZS {
            let e = lambda_estimate(LambdaPoint::new(r, z).unwrap(), c).unwrap();
            assert!(e.est_error <= 1e-7 * e.value.norm());
        }
    }
}

#[test]
fn theta_is_lambda_post_processing() {
    let c = SmoothCutoff::default();
    let p = LambdaPoint::new(1.0, 0.3).unwrap();
    let l = lambda(p, c).unwrap();
    let t = theta(p, c).unwrap();
    assert_eq!(t, theta_from_lambda(1.0, l));
    let direct = 0.5 * ((num_complex::Complex64::new(1.0, 1.0 / std::f64::consts::PI.sinh())) * l).re;
    assert!((t - direct).abs() <= 1e-15 * l.norm());
}
