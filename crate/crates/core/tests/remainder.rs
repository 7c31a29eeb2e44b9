use adp_core::envelope::{calibrate_then_assert, ENVELOPE_SLACK};
use adp_core::mb_integral::{integral_i, majorant_decomposition, RemainderKernel};

const RS: [f64; 5] = [2.0, 5.0, 10.0, 20.0, 50.0];
const YS: [f64; 4] = [1.0, 10.0, 100.0, 1000.0];

fn scaled(r: f64, y: f64) -> f64 {
    integral_i(r, y).unwrap().norm() * y / r
}

#[test]
fn remainder_is_order_r_over_y() {
    let calibration = [scaled(2.0, 10.0), scaled(5.0, 100.0)];
    let grid: Vec<f64> = RS.iter().flat_map(|&r| YS.iter().map(move |&y| scaled(r, y))).collect();
    let check = calibrate_then_assert(&calibration, &grid, ENVELOPE_SLACK);
    assert!(check.passes(), "{check:?}");
    for r in [5.0, 20.0] {
        for y in [10.0, 100.0] {
            assert!(scaled(r, 2.0 * y) <= ENVELOPE_SLACK * check.calibrated);
        }
    }
}

#[test]
fn majorant_bounds_the_remainder() {
    for r in RS {
        let total = majorant_decomposition(r).unwrap().total;
        for y in YS {
            let i = integral_i(r, y).unwrap();
            assert!(i.re.is_finite() && i.im.is_finite());
            // the majorant drops a factor between π and 4π of the exact modulus
            assert!(i.norm() * y <= 2.0 * total * (1.0 + 1e-6), "r = {r}, y = {y}");
        }
    }
}

#[test]
fn dominant_pieces() {
    for r in [2.0, 5.0, 10.0, 20.0, 50.0, 100.0] {
        let b = majorant_decomposition(r).unwrap();
        assert!(b.dominant() >= 0.5 * b.total, "r = {r}");
    }
}

#[test]
fn outer_piece_scaling() {
    let pieces: Vec<[f64; 7]> = [2.0, 5.0, 10.0, 20.0, 50.0, 100.0]
        .iter()
        .map(|&r| majorant_decomposition(r).unwrap().pieces)
        .collect();
    let rs = [2.0f64, 5.0, 10.0, 20.0, 50.0, 100.0];
    let i2: Vec<f64> = rs.iter().zip(&pieces).map(|(r, p)| p[1] * r.powf(1.5)).collect();
    let i4: Vec<f64> = rs.iter().zip(&pieces).map(|(r, p)| p[3] / r).collect();
    assert!(calibrate_then_assert(&i2[..1], &i2[1..], 1.0).passes());
    assert!(calibrate_then_assert(&i4[..2], &i4[2..], ENVELOPE_SLACK).passes());
}

#[test]
fn step_halving_is_stable() {
    for r in RS {
        for y in YS {
            let k = RemainderKernel::new(r, y).unwrap();
            let a = k.estimate_at_level(y, 0).unwrap();
            let b = k.estimate_at_level(y, 1).unwrap();
            assert!((a - b).norm() <= 1e-8 * b.norm(), "r = {r}, y = {y}");
        }
    }
}
