//! Kernel-level checks against independent oracles.

use lrps_core::{
    chacha_rng, gaussian_matrix, project_rank_k, project_sparse_s, randomized_rank_k,
    restrict_to_support, svd, thin_qr_q, DenseMatrix, MatrixF64, SubspaceBasis, SupportSet,
};

/// Two-sided Jacobi eigensolver for symmetric matrices, kept independent of
/// the production one-sided SVD path: eigenvalues sorted nonincreasing.
fn symmetric_eigenvalues(a: &MatrixF64) -> Vec<f64> {
    let n = a.rows();
    assert_eq!(n, a.cols());
    let mut m: Vec<Vec<f64>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(m[p][q].abs());
            }
        }
        if off < 1e-12 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p][q];
                if apq.abs() < 1e-14 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..n {
                    let mip = m[i][p];
                    let miq = m[i][q];
                    m[i][p] = c * mip - s * miq;
                    m[i][q] = s * mip + c * miq;
                }
                for i in 0..n {
                    let mpi = m[p][i];
                    let mqi = m[q][i];
                    m[p][i] = c * mpi - s * mqi;
                    m[q][i] = s * mpi + c * mqi;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    eig.sort_by(|a, b| b.partial_cmp(a).unwrap());
    eig
}

/// Repeated argmax selection, deliberately naive, with lexicographic ties.
fn brute_force_top_s(m: &MatrixF64, s: usize) -> Vec<(usize, usize)> {
    let mut taken = vec![false; m.rows() * m.cols()];
    let mut picks = Vec::with_capacity(s);
    for _ in 0..s {
        let mut best: Option<(f64, usize, usize)> = None;
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                if taken[r * m.cols() + c] {
                    continue;
                }
                let mag = m.get(r, c).abs();
                let better = match best {
                    None => true,
                    Some((bm, _, _)) => mag > bm,
                };
                if better {
                    best = Some((mag, r, c));
                }
            }
        }
        let (_, r, c) = best.unwrap();
        taken[r * m.cols() + c] = true;
        picks.push((r, c));
    }
    picks.sort_unstable();
    picks
}

#[test]
fn svd_cross_checked_against_symmetric_eigensolver() {
    let mut rng = chacha_rng(2024);
    let m = gaussian_matrix::<f64>(20, 30, &mut rng);
    let f = svd(&m, 1e-13).unwrap();

    let rec_err = f.reconstruct().sub(&m).frobenius_norm() / m.frobenius_norm();
    assert!(rec_err <= 1e-10, "reconstruction error {rec_err:e}");

    // Squared singular values must match the eigenvalues of m^T m.
    let gram = m.tr_mul(&m);
    let eig = symmetric_eigenvalues(&gram);
    let s1sq = f.singular_values[0] * f.singular_values[0];
    for (j, &s) in f.singular_values.iter().enumerate() {
        assert!(
            (s * s - eig[j]).abs() <= 1e-8 * s1sq,
            "sigma_{j}^2 = {} vs eig {}",
            s * s,
            eig[j]
        );
    }

    // Orthonormality of both factors.
    let r = f.singular_values.len();
    let eye = MatrixF64::identity(r);
    assert!(
        f.left_vectors
            .tr_mul(&f.left_vectors)
            .sub(&eye)
            .frobenius_norm()
            < 1e-8
    );
    assert!(
        f.right_vectors
            .tr_mul(&f.right_vectors)
            .sub(&eye)
            .frobenius_norm()
            < 1e-8
    );
}

#[test]
fn eckart_young_identity_on_random_instances() {
    let mut rng = chacha_rng(7);
    for trial in 0..100 {
        let rows = 3 + (trial % 6);
        let cols = 3 + (trial % 4);
        let m = gaussian_matrix::<f64>(rows, cols, &mut rng);
        let f = svd(&m, 1e-13).unwrap();
        for k in 1..rows.min(cols) {
            let (p, _) = project_rank_k(&m, k).unwrap();
            let err_sq = m.sub(&p).norm_sq();
            let tail_sq: f64 = f.singular_values[k..].iter().map(|s| s * s).sum();
            assert!(
                (err_sq - tail_sq).abs() <= 1e-8 * m.norm_sq().max(1e-300),
                "trial {trial} k {k}: {err_sq} vs {tail_sq}"
            );
        }
    }
}

#[test]
fn rank_projection_error_equals_trailing_spectrum_10x10() {
    let mut rng = chacha_rng(11);
    let m = gaussian_matrix::<f64>(10, 10, &mut rng);
    let f = svd(&m, 1e-13).unwrap();
    let (p, basis) = project_rank_k(&m, 3).unwrap();
    let err_sq = m.sub(&p).norm_sq();
    let tail_sq: f64 = f.singular_values[3..].iter().map(|s| s * s).sum();
    assert!((err_sq - tail_sq).abs() <= 1e-10 * m.norm_sq());
    assert_eq!(basis.rank(), 3);
}

#[test]
fn sparse_projection_matches_brute_force_on_200_instances() {
    let mut rng = chacha_rng(5);
    for trial in 0..200 {
        let rows = 2 + (trial % 7);
        let cols = 2 + ((trial / 7) % 7);
        let m = gaussian_matrix::<f64>(rows, cols, &mut rng);
        let s = 1 + (trial % 16).min(rows * cols - 1);
        let (thresholded, support) = project_sparse_s(&m, s).unwrap();
        let expected = brute_force_top_s(&m, s);
        assert_eq!(support.entries(), expected.as_slice(), "trial {trial}");
        for r in 0..rows {
            for c in 0..cols {
                let want = if expected.contains(&(r, c)) {
                    m.get(r, c)
                } else {
                    0.0
                };
                assert_eq!(thresholded.get(r, c), want);
            }
        }
    }
}

#[test]
fn random_6x6_top_10_matches_brute_force() {
    let mut rng = chacha_rng(17);
    let m = gaussian_matrix::<f64>(6, 6, &mut rng);
    let (_, support) = project_sparse_s(&m, 10).unwrap();
    assert_eq!(support.entries(), brute_force_top_s(&m, 10).as_slice());
}

fn random_basis(ambient: usize, rank: usize, seed: u64) -> SubspaceBasis<f64> {
    let mut rng = chacha_rng(seed);
    let g = gaussian_matrix::<f64>(ambient, rank, &mut rng);
    let q = thin_qr_q(&g);
    let mut cols = Vec::with_capacity(ambient * rank);
    for j in 0..rank {
        for i in 0..ambient {
            cols.push(q.get(i, j));
        }
    }
    SubspaceBasis::from_columns(ambient, cols).unwrap()
}

#[test]
fn basis_union_matches_qr_concatenation_oracle() {
    let a = random_basis(8, 2, 21);
    let b = random_basis(8, 2, 22);
    let union = a.union(&b).unwrap();
    assert_eq!(union.rank(), 4);

    // Oracle: projector from a Householder QR of the concatenated columns.
    let concat = a.to_matrix().unwrap().hcat(&b.to_matrix().unwrap());
    let q = thin_qr_q(&concat);
    let oracle = q.mul_tr(&q);
    assert!(union.projector().sub(&oracle).frobenius_norm() < 1e-10);
}

#[test]
fn union_span_contains_both_operands() {
    let a = random_basis(9, 3, 31);
    let b = random_basis(9, 2, 32);
    let union = a.union(&b).unwrap();
    for basis in [&a, &b] {
        let m = basis.to_matrix().unwrap();
        let projected = union.project(&m).unwrap();
        assert!(projected.sub(&m).frobenius_norm() < 1e-10);
    }
}

#[test]
fn projection_satisfies_pythagoras_and_idempotence() {
    let mut rng = chacha_rng(41);
    let m = gaussian_matrix::<f64>(8, 5, &mut rng);
    let b = random_basis(8, 2, 42);
    let p = b.project(&m).unwrap();
    let complement = m.sub(&p);

    assert!((m.norm_sq() - (p.norm_sq() + complement.norm_sq())).abs() < 1e-10);
    assert!(p.dot(&complement).abs() < 1e-10);
    let pp = b.project(&p).unwrap();
    assert!(pp.sub(&p).frobenius_norm() < 1e-12);

    // Self-adjointness: <P m, n> == <m, P n>.
    let n = gaussian_matrix::<f64>(8, 5, &mut rng);
    let pn = b.project(&n).unwrap();
    assert!((p.dot(&n) - m.dot(&pn)).abs() < 1e-10);
}

#[test]
fn full_space_projection_is_identity() {
    let mut rng = chacha_rng(51);
    let m = gaussian_matrix::<f64>(4, 6, &mut rng);
    let b = random_basis(4, 4, 52);
    let p = b.project(&m).unwrap();
    assert!(p.sub(&m).frobenius_norm() < 1e-10 * m.frobenius_norm());
}

#[test]
fn restriction_keeps_exact_values_on_random_support() {
    let mut rng = chacha_rng(61);
    let m = gaussian_matrix::<f64>(7, 5, &mut rng);
    let support = SupportSet::new(7, 5, vec![(0, 0), (1, 4), (3, 2), (6, 0), (5, 3)]).unwrap();
    let restricted = restrict_to_support(&m, &support).unwrap();
    let mut nonzeros = 0;
    for r in 0..7 {
        for c in 0..5 {
            if support.contains(r, c) {
                assert_eq!(restricted.get(r, c), m.get(r, c));
                nonzeros += 1;
            } else {
                assert_eq!(restricted.get(r, c), 0.0);
            }
        }
    }
    assert_eq!(nonzeros, 5);
}

#[test]
fn randomized_rank_k_tracks_exact_projection() {
    // 50x50 with singular values 1/j^2.
    let mut rng = chacha_rng(71);
    let left = thin_qr_q(&gaussian_matrix::<f64>(50, 50, &mut rng));
    let right = thin_qr_q(&gaussian_matrix::<f64>(50, 50, &mut rng));
    let mut scaled = left.clone();
    for j in 0..50 {
        let s = 1.0 / ((j + 1) as f64).powi(2);
        for i in 0..50 {
            scaled.set(i, j, left.get(i, j) * s);
        }
    }
    let m = scaled.mul_tr(&right);

    let (exact, _) = project_rank_k(&m, 5).unwrap();
    let exact_err = m.sub(&exact).frobenius_norm();
    let (approx, basis) = randomized_rank_k(&m, 5, 5, 2, 9).unwrap();
    let approx_err = m.sub(&approx).frobenius_norm();
    assert!(basis.rank() <= 5);
    assert!(
        approx_err <= 1.5 * exact_err,
        "randomized {approx_err:e} vs exact {exact_err:e}"
    );
}

#[test]
fn randomized_full_rank_matches_exact_truncation() {
    let mut rng = chacha_rng(81);
    let m = gaussian_matrix::<f64>(8, 8, &mut rng);
    let k = 8;
    let (exact, _) = project_rank_k(&m, k).unwrap();
    let (approx, _) = randomized_rank_k(&m, k, 0, 2, 3).unwrap();
    assert!(approx.sub(&exact).frobenius_norm() <= 1e-8 * m.frobenius_norm());
}

#[test]
fn kernels_instantiate_for_f32() {
    let mut rng = chacha_rng(91);
    let m = gaussian_matrix::<f32>(6, 4, &mut rng);
    let f = svd(&m, 1e-5f32).unwrap();
    let err = f.reconstruct().sub(&m).frobenius_norm();
    assert!(err <= 1e-4 * m.frobenius_norm());
    let (p, _) = project_rank_k(&m, 2).unwrap();
    assert!(p.frobenius_norm() <= m.frobenius_norm() + 1e-5);
}

mod properties {
    use super::*;
    use proptest::prelude::*;

    fn small_matrix() -> impl Strategy<Value = MatrixF64> {
        (2usize..=8, 2usize..=8).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-10.0f64..10.0, r * c)
                .prop_map(move |data| DenseMatrix::from_vec(r, c, data).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn sparse_projection_equals_brute_force(m in small_matrix(), s_raw in 1usize..=16) {
            let s = s_raw.min(m.rows() * m.cols());
            let (_, support) = project_sparse_s(&m, s).unwrap();
            let expected = brute_force_top_s(&m, s);
            prop_assert_eq!(support.entries(), expected.as_slice());
        }

        #[test]
        fn projections_are_non_expansive(m in small_matrix()) {
            let norm = m.frobenius_norm();
            let slack = 1e-9 * (1.0 + norm);
            let k = m.rows().min(m.cols()) - 1;
            if k >= 1 {
                let (p, _) = project_rank_k(&m, k).unwrap();
                prop_assert!(p.frobenius_norm() <= norm + slack);
            }
            let (p, _) = project_sparse_s(&m, 2).unwrap();
            prop_assert!(p.frobenius_norm() <= norm + slack);
            let b = random_basis(m.rows(), 1, 7);
            let p = b.project(&m).unwrap();
            prop_assert!(p.frobenius_norm() <= norm + slack);
        }

        #[test]
        fn restriction_is_elementwise(m in small_matrix(), seed in 0u64..1000) {
            let mut rng = chacha_rng(seed);
            let take = ((m.rows() * m.cols()) / 2).max(1);
            let linear = lrps_core::sample_without_replacement(m.rows() * m.cols(), take, &mut rng);
            let entries: Vec<_> = linear.iter().map(|&i| (i / m.cols(), i % m.cols())).collect();
            let support = SupportSet::new(m.rows(), m.cols(), entries).unwrap();
            let r = restrict_to_support(&m, &support).unwrap();
            for row in 0..m.rows() {
                for col in 0..m.cols() {
                    let want = if support.contains(row, col) { m.get(row, col) } else { 0.0 };
                    prop_assert_eq!(r.get(row, col), want);
                }
            }
        }
    }
}
