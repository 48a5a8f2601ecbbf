// Copyright 2026 The lqrlr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


mod common;

use common::*;
use lqrlr_core::linalg::{eigenvalues, spectral_abscissa, svd};
use lqrlr_core::lyapunov::{primal_residual, residual_bound, solve_lyapunov_cont, solve_lyapunov_dual, LyapunovSolver, Precision};
use lqrlr_core::{Error, Matrix};
use proptest::prelude::*;

#[test]
fn spectral_abscissa_examples() {
    assert_eq!(spectral_abscissa(&Matrix::from_rows(&[[-1.0]])).unwrap(), -1.0);
    let damped = Matrix::from_rows(&[[0.0, 1.0], [-1.0, -2.0]]);
    assert!((spectral_abscissa(&damped).unwrap() + 1.0).abs() < 1e-7);
    let local = Matrix::from_rows(&[[1.0, 1.0], [1.0, 3.0]]);
    assert!((spectral_abscissa(&local).unwrap() - (2.0 + 2f64.sqrt())).abs() < 1e-12);
}

#[test]
fn spectral_abscissa_is_transpose_invariant() {
    let mut rng = rng(11);
    for _ in 0..50 {
        let m = random_matrix(&mut rng, 10, 10);
        let a = spectral_abscissa(&m).unwrap();
        let b = spectral_abscissa(&m.transpose()).unwrap();
        assert!((a - b).abs() <= 1e-10, "{a} vs {b}");
    }
}

#[test]
fn eigenvalues_of_block_triangular_matrix() {
    let m = Matrix::from_rows(&[[2.0, 5.0, 1.0], [0.0, -1.0, 4.0], [0.0, -4.0, -1.0]]);
    let mut eig = eigenvalues(&m).unwrap();
    eig.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    assert!((eig[0].re + 1.0).abs() < 1e-12 && (eig[0].im + 4.0).abs() < 1e-12);
    assert!((eig[1].re + 1.0).abs() < 1e-12 && (eig[1].im - 4.0).abs() < 1e-12);
    assert!((eig[2].re - 2.0).abs() < 1e-12 && eig[2].im == 0.0);
}

#[test]
fn lyapunov_closed_forms() {
    let p = solve_lyapunov_cont(&Matrix::identity(2).scale(-1.0), &Matrix::identity(2)).unwrap();
    assert!((&p - &Matrix::identity(2).scale(0.5)).max_abs() < 1e-15);
    let p = solve_lyapunov_cont(&Matrix::from_diag(&[-1.0, -2.0]), &Matrix::identity(2)).unwrap();
    assert!((&p - &Matrix::from_diag(&[0.5, 0.25])).max_abs() < 1e-15);
    let l = solve_lyapunov_dual(&Matrix::from_rows(&[[-1.0]]), &Matrix::from_rows(&[[1.0]])).unwrap();
    assert!((l[(0, 0)] - 0.5).abs() < 1e-15);
}

#[test]
fn lyapunov_matches_kronecker_on_triangular_example() {
    let a = Matrix::from_rows(&[[-1.0, 1.0], [0.0, -2.0]]);
    let w = Matrix::identity(2);
    let p = solve_lyapunov_cont(&a, &w).unwrap();
    assert!(rel_diff(&p, &kronecker_lyapunov(&a, &w)) < 1e-12);
    let l = solve_lyapunov_dual(&a, &w).unwrap();
    assert!(rel_diff(&l, &solve_lyapunov_cont(&a.transpose(), &w).unwrap()) < 1e-14);
}

#[test]
fn lyapunov_residual_bound_on_random_systems() {
    let mut rng = rng(2024);
    for trial in 0..60 {
        let n = 1 + trial % 20;
        let a = random_stable(&mut rng, n);
        let w = random_spd(&mut rng, n);
        let p = solve_lyapunov_cont(&a, &w).unwrap();
        let res = primal_residual(&a, &w, &p).frobenius_norm();
        let bound = residual_bound(&a, &w, &p);
        assert!(res <= bound, "n={n}: residual {res:e} bound {bound:e}");
        assert_eq!(p.asymmetry(), 0.0);
        let l = solve_lyapunov_dual(&a, &w).unwrap();
        let at = a.transpose();
        let res = primal_residual(&at, &w, &l).frobenius_norm();
        let bound = residual_bound(&at, &w, &l);
        assert!(res <= bound, "dual n={n}: residual {res:e} bound {bound:e}");
    }
}

#[test]
fn extended_precision_on_poorly_damped_system() {
    // Rotation at frequency 1 with damping 1e-6: P = I/(2·1e-6) for W = I.
    let eps = 1e-6;
    let a = Matrix::from_rows(&[[-eps, 1.0], [-1.0, -eps]]);
    let w = Matrix::identity(2);
    let exact = Matrix::identity(2).scale(0.5 / eps);
    let solver = LyapunovSolver::new(&a).unwrap().with_precision(Precision::Extended);
    let p = solver.solve(&w).unwrap();
    assert!(rel_diff(&p, &exact) < 1e-12, "{p:?}");
    let mut rng = rng(31);
    for n in [3, 7, 12, 18] {
        let a = random_stable(&mut rng, n);
        let w = random_spd(&mut rng, n);
        let working = solve_lyapunov_cont(&a, &w).unwrap();
        let extended = LyapunovSolver::new(&a).unwrap().with_precision(Precision::Extended).solve(&w).unwrap();
        assert!(primal_residual(&a, &w, &extended).frobenius_norm() <= residual_bound(&a, &w, &extended));
        assert!(rel_diff(&extended, &working) < 1e-10);
    }
}

#[test]
fn lyapunov_agrees_with_kronecker_up_to_five_states() {
    let mut rng = rng(5);
    for trial in 0..50 {
        let n = 1 + trial % 5;
        let a = random_stable(&mut rng, n);
        let w = random_spd(&mut rng, n);
        let p = solve_lyapunov_cont(&a, &w).unwrap();
        assert!(rel_diff(&p, &kronecker_lyapunov(&a, &w)) <= 1e-8);
    }
}

#[test]
fn schur_path_agrees_with_kronecker_above_threshold() {
    let mut rng = rng(6);
    for n in [9, 12, 15] {
        let a = random_stable(&mut rng, n);
        let w = random_spd(&mut rng, n);
        let p = solve_lyapunov_cont(&a, &w).unwrap();
        assert!(rel_diff(&p, &kronecker_lyapunov(&a, &w)) <= 1e-8, "n={n}");
    }
}

#[test]
fn psd_weight_gives_psd_solution() {
    let mut rng = rng(8);
    for n in [3, 7, 14] {
        let a = random_stable(&mut rng, n);
        let g = random_matrix(&mut rng, n, 1);
        let p = solve_lyapunov_cont(&a, &g.matmul_tr(&g)).unwrap();
        let e = lqrlr_core::linalg::sym_eigen(&p).unwrap();
        assert!(e.values[0] >= -1e-12 * e.values[n - 1].abs());
    }
}

#[test]
fn lyapunov_is_bitwise_deterministic() {
    let mut rng = rng(9);
    let a = random_stable(&mut rng, 12);
    let w = random_spd(&mut rng, 12);
    let p1 = solve_lyapunov_cont(&a, &w).unwrap();
    let p2 = solve_lyapunov_cont(&a, &w).unwrap();
    assert_eq!(p1.as_slice(), p2.as_slice());
}

#[test]
fn unstable_matrix_is_rejected_with_abscissa() {
    let a = Matrix::from_rows(&[[0.5]]);
    match LyapunovSolver::new(&a) {
        Err(Error::Unstable { abscissa }) => assert_eq!(abscissa, 0.5),
        other => panic!("expected Unstable, got {other:?}"),
    }
}

#[test]
fn svd_examples() {
    let s = svd(&Matrix::from_diag(&[3.0, 1.0])).unwrap();
    assert_eq!(s.s, [3.0, 1.0]);
    let s = svd(&Matrix::zeros(2, 2)).unwrap();
    assert_eq!(s.s, [0.0, 0.0]);
    let ortho = s.u.tr_matmul(&s.u);
    assert!((&ortho - &Matrix::identity(2)).max_abs() < 1e-12);
}

fn check_svd(m: &Matrix) {
    let f = svd(m).unwrap();
    let norm = m.frobenius_norm();
    assert!((&f.recompose() - m).frobenius_norm() <= 1e-10 * norm.max(1e-300));
    assert!(f.s.windows(2).all(|w| w[0] >= w[1]));
    assert!(f.s.iter().all(|&s| s >= 0.0));
    let k = f.s.len();
    assert!((&f.u.tr_matmul(&f.u) - &Matrix::identity(k)).max_abs() <= 1e-10);
    assert!((&f.v.tr_matmul(&f.v) - &Matrix::identity(k)).max_abs() <= 1e-10);
    let energy: f64 = f.s.iter().map(|s| s * s).sum();
    assert!((energy - norm * norm).abs() <= 1e-10 * norm * norm);
}

#[test]
fn svd_random_shapes() {
    let mut rng = rng(3);
    for (r, c) in [(3, 5), (5, 3), (1, 4), (4, 1), (20, 10), (10, 20), (7, 7)] {
        check_svd(&random_matrix(&mut rng, r, c));
    }
    // Rank-deficient and badly scaled inputs.
    let u = random_matrix(&mut rng, 8, 2);
    let v = random_matrix(&mut rng, 6, 2);
    check_svd(&u.matmul_tr(&v));
    let mut tiny = random_matrix(&mut rng, 6, 4);
    tiny.as_mut_slice()[..6].iter_mut().for_each(|x| *x *= 1e-200);
    check_svd(&tiny);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn singular_values_are_orthogonally_invariant(seed in any::<u64>(), rows in 1usize..7, cols in 1usize..7) {
        let mut rng = rng(seed);
        let m = random_matrix(&mut rng, rows, cols);
        let left = random_orthogonal(&mut rng, rows);
        let right = random_orthogonal(&mut rng, cols);
        let s0 = svd(&m).unwrap().s;
        let s1 = svd(&left.matmul(&m).matmul(&right)).unwrap().s;
        for (a, b) in s0.iter().zip(&s1) {
            prop_assert!((a - b).abs() <= 1e-10 * (1.0 + s0[0]));
        }
    }
}
