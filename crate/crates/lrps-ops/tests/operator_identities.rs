//! Adjoint, linearity and gradient identities, checked against
//! finite-difference and Monte-Carlo oracles.

use lrps_core::{chacha_rng, gaussian_matrix, gaussian_vec, restrict_to_support, DenseMatrix};
use lrps_ops::{MeasurementOperator, ObservationVector};

fn operators(seed: u64) -> Vec<(&'static str, MeasurementOperator<f64>)> {
    vec![
        ("identity", MeasurementOperator::identity(6, 5)),
        (
            "mask",
            MeasurementOperator::uniform_mask(6, 5, 0.4, seed).unwrap(),
        ),
        (
            "gaussian",
            MeasurementOperator::gaussian(6, 5, 12, seed).unwrap(),
        ),
    ]
}

#[test]
fn adjoint_identity_holds_for_all_kinds() {
    let mut rng = chacha_rng(100);
    for (name, op) in operators(42) {
        for _ in 0..20 {
            let x = gaussian_matrix::<f64>(6, 5, &mut rng);
            let y = ObservationVector::new(gaussian_vec(op.output_dim(), &mut rng)).unwrap();
            let ax = op.apply(&x).unwrap();
            let aty = op.adjoint(&y).unwrap();
            let lhs = lrps_core::dot(ax.as_slice(), y.as_slice());
            let rhs = x.dot(&aty);
            let scale = lhs.abs().max(rhs.abs()).max(1e-30);
            assert!(
                (lhs - rhs).abs() / scale <= 1e-10,
                "{name}: <Ax,y>={lhs} vs <x,A*y>={rhs}"
            );
        }
    }
}

#[test]
fn apply_and_adjoint_are_linear() {
    let mut rng = chacha_rng(200);
    for (name, op) in operators(43) {
        let x = gaussian_matrix::<f64>(6, 5, &mut rng);
        let z = gaussian_matrix::<f64>(6, 5, &mut rng);
        let (alpha, beta) = (0.7, -1.3);
        let combo = x.scale(alpha).add(&z.scale(beta));
        let lhs = op.apply(&combo).unwrap();
        let mut rhs = op.apply(&x).unwrap().into_vec();
        let azv = op.apply(&z).unwrap().into_vec();
        for (r, &a) in rhs.iter_mut().zip(&azv) {
            *r = *r * alpha + beta * a;
        }
        let num: f64 = lhs
            .as_slice()
            .iter()
            .zip(&rhs)
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let den: f64 = rhs.iter().map(|&b| b * b).sum::<f64>().sqrt().max(1e-30);
        assert!(num / den <= 1e-12, "{name}: superposition violated");
    }
}

#[test]
fn mask_adjoint_of_apply_restricts_to_omega() {
    let mut rng = chacha_rng(300);
    let op = MeasurementOperator::<f64>::uniform_mask(7, 4, 0.5, 9).unwrap();
    let x = gaussian_matrix::<f64>(7, 4, &mut rng);
    let back = op.adjoint(&op.apply(&x).unwrap()).unwrap();
    let expected = restrict_to_support(&x, op.omega().unwrap()).unwrap();
    assert_eq!(back, expected);
}

/// Central finite differences of `f(X) = ||y - A X||_2^2`.
fn finite_difference_gradient(
    op: &MeasurementOperator<f64>,
    y: &ObservationVector<f64>,
    x: &DenseMatrix<f64>,
) -> DenseMatrix<f64> {
    let f = |m: &DenseMatrix<f64>| -> f64 {
        let r = op.residual(y, m).unwrap();
        lrps_core::dot(r.as_slice(), r.as_slice())
    };
    let scale = x.max_abs().max(1.0);
    let h = 1e-5 * scale;
    let mut g = DenseMatrix::zeros(x.rows(), x.cols());
    for i in 0..x.rows() {
        for j in 0..x.cols() {
            let mut plus = x.clone();
            plus.set(i, j, x.get(i, j) + h);
            let mut minus = x.clone();
            minus.set(i, j, x.get(i, j) - h);
            g.set(i, j, (f(&plus) - f(&minus)) / (2.0 * h));
        }
    }
    g
}

#[test]
fn gradient_matches_central_differences() {
    let mut rng = chacha_rng(400);
    for (name, op) in operators(44) {
        let truth = gaussian_matrix::<f64>(6, 5, &mut rng);
        let y = op.apply(&truth).unwrap();
        let x = gaussian_matrix::<f64>(6, 5, &mut rng);
        let g = op.gradient(&y, &x).unwrap();
        let fd = finite_difference_gradient(&op, &y, &x);
        let rel = g.sub(&fd).frobenius_norm() / fd.frobenius_norm().max(1e-30);
        assert!(rel <= 1e-6, "{name}: gradient mismatch {rel:e}");
    }
}

#[test]
fn gaussian_columns_have_unit_expected_norm() {
    // p = 200 rows, ambient 10x10: mean squared column norm within 5% of 1.
    let op = MeasurementOperator::<f64>::gaussian(10, 10, 200, 77).unwrap();
    let mut total = 0.0;
    for col in 0..100 {
        let mut e = DenseMatrix::zeros(10, 10);
        e.set(col / 10, col % 10, 1.0);
        let y = op.apply(&e).unwrap();
        total += lrps_core::dot(y.as_slice(), y.as_slice());
    }
    let mean = total / 100.0;
    assert!((mean - 1.0).abs() < 0.05, "mean column energy {mean}");
}

#[test]
fn gaussian_concentrates_on_rank_one_inputs() {
    let mut rng = chacha_rng(500);
    let op = MeasurementOperator::<f64>::gaussian(10, 10, 500, 78).unwrap();
    for _ in 0..5 {
        let u = gaussian_vec::<f64>(10, &mut rng);
        let v = gaussian_vec::<f64>(10, &mut rng);
        let x = DenseMatrix::from_fn(10, 10, |i, j| u[i] * v[j]);
        let y = op.apply(&x).unwrap();
        let ratio = lrps_core::dot(y.as_slice(), y.as_slice()) / x.norm_sq();
        assert!((0.8..=1.2).contains(&ratio), "energy ratio {ratio}");
    }
}

mod properties {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn adjoint_identity_randomized(seed in 0u64..10_000, kind in 0usize..3) {
            let op = match kind {
                0 => MeasurementOperator::<f64>::identity(4, 3),
                1 => MeasurementOperator::uniform_mask(4, 3, 0.5, seed).unwrap(),
                _ => MeasurementOperator::gaussian(4, 3, 7, seed).unwrap(),
            };
            let mut rng = chacha_rng(seed ^ 0xabcd);
            let x = gaussian_matrix::<f64>(4, 3, &mut rng);
            let y = ObservationVector::new(gaussian_vec(op.output_dim(), &mut rng)).unwrap();
            let lhs = lrps_core::dot(op.apply(&x).unwrap().as_slice(), y.as_slice());
            let rhs = x.dot(&op.adjoint(&y).unwrap());
            let scale = lhs.abs().max(rhs.abs()).max(1e-30);
            prop_assert!((lhs - rhs).abs() / scale <= 1e-10);
        }
    }
}
