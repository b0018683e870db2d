use lieobs::eigen::spectrum_report;
use lieobs::expm::mat_exp;
use lieobs::group::{is_in_group, project_algebra, GroupFamily, GroupKind, CONSTRUCTED_TOL};
use lieobs::logm::{mat_log_gregory, mat_log_principal};
use lieobs::matrix::{adjoint, commutator, inverse_general, inverse_neumann};
use lieobs::{NumericOptions, SquareMatrix};
use proptest::prelude::*;

fn matrix(n: usize) -> impl Strategy<Value = SquareMatrix> {
    prop::collection::vec(-1.0f64..1.0, n * n).prop_map(move |v| SquareMatrix::new(n, &v).unwrap())
}

/// Nonzero matrix rescaled to the given 2-norm.
fn with_norm(m: SquareMatrix, r: f64) -> SquareMatrix {
    let norm = m.operator_norm();
    if norm == 0.0 {
        SquareMatrix::zeros(m.dim())
    } else {
        m.scale(r / norm)
    }
}

fn family(kind: GroupKind) -> GroupFamily {
    GroupFamily::new(kind, 3).unwrap()
}

/// Well-conditioned invertible matrix: identity plus a bounded perturbation.
fn invertible() -> impl Strategy<Value = SquareMatrix> {
    (matrix(3), 0.0f64..0.8).prop_map(|(m, r)| &SquareMatrix::identity(3) + &with_norm(m, r))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn exp_then_log_recovers_small_arguments(m in matrix(3), r in 0.0f64..0.6, k in 0usize..3) {
        let kind = [GroupKind::GL, GroupKind::SO, GroupKind::SL][k];
        let a = project_algebra(&with_norm(m, r), family(kind)).unwrap().into_matrix();
        let a = with_norm(a, r);
        let back = mat_log_principal(&mat_exp(&a).unwrap()).unwrap();
        prop_assert!((&back - &a).operator_norm() <= 1e-9);
    }

    #[test]
    fn log_then_exp_recovers_matrices(m in matrix(3), r in 0.0f64..3.0) {
        let x = mat_exp(&with_norm(m, r)).unwrap();
        prop_assume!(!spectrum_report(&x, &NumericOptions::default()).unwrap().has_nonpositive_real_eigenvalue);
        let back = mat_exp(&mat_log_principal(&x).unwrap()).unwrap();
        prop_assert!((&back - &x).operator_norm() <= 1e-9 * x.operator_norm());
    }

    #[test]
    fn exp_and_log_commute_with_conjugation(x in invertible(), m in matrix(3), r in 0.0f64..0.6) {
        let a = with_norm(m, r);
        let lhs = mat_exp(&adjoint(&x, &a).unwrap()).unwrap();
        let rhs = adjoint(&x, &mat_exp(&a).unwrap()).unwrap();
        prop_assert!((&lhs - &rhs).operator_norm() <= 1e-9);
        let e = mat_exp(&a).unwrap();
        let lhs = mat_log_principal(&adjoint(&x, &e).unwrap()).unwrap();
        let rhs = adjoint(&x, &mat_log_principal(&e).unwrap()).unwrap();
        prop_assert!((&lhs - &rhs).operator_norm() <= 1e-9);
    }

    #[test]
    fn log_commutes_with_polynomials_in_the_argument(
        m in matrix(3),
        r in 0.0f64..2.5,
        c in prop::array::uniform3(-2.0f64..2.0),
    ) {
        let x = mat_exp(&with_norm(m, r)).unwrap();
        prop_assume!(!spectrum_report(&x, &NumericOptions::default()).unwrap().has_nonpositive_real_eigenvalue);
        let b = SquareMatrix::identity(3)
            .scale(c[0])
            .add_scaled(c[1], &x)
            .add_scaled(c[2], &(&x * &x));
        let l = mat_log_principal(&x).unwrap();
        let scale = l.operator_norm().max(1.0) * b.operator_norm().max(1.0);
        prop_assert!(commutator(&l, &b).unwrap().operator_norm() <= 1e-9 * scale);
    }

    #[test]
    fn operator_norm_is_submultiplicative(a in matrix(4), b in matrix(4)) {
        let ab = (&a * &b).operator_norm();
        prop_assert!(ab <= a.operator_norm() * b.operator_norm() * (1.0 + 1e-12) + 1e-15);
    }

    #[test]
    fn neumann_inverse_matches_lu(m in matrix(3), r in 0.0f64..0.9) {
        let x = &SquareMatrix::identity(3) + &with_norm(m, r);
        let a = inverse_neumann(&x, &NumericOptions::default()).unwrap();
        let b = inverse_general(&x).unwrap();
        prop_assert!((&a - &b).operator_norm() <= 1e-9);
    }

    #[test]
    fn gregory_agrees_with_principal(m in matrix(3), r in 0.0f64..1.0) {
        let x = mat_exp(&with_norm(m, r)).unwrap();
        let g = mat_log_gregory(&x, &NumericOptions::default()).unwrap();
        let p = mat_log_principal(&x).unwrap();
        prop_assert!((&g - &p).operator_norm() <= 1e-9);
    }

    #[test]
    fn exp_of_algebra_lands_in_group(m in matrix(3), r in 0.0f64..2.0, k in 0usize..3) {
        let f = family([GroupKind::GL, GroupKind::SO, GroupKind::SL][k]);
        let a = with_norm(project_algebra(&m, f).unwrap().into_matrix(), r);
        prop_assert!(is_in_group(&mat_exp(&a).unwrap(), f, CONSTRUCTED_TOL).unwrap());
    }

    #[test]
    fn log_spectrum_lies_in_the_strip(m in matrix(3), r in 0.0f64..6.0) {
        let x = mat_exp(&with_norm(m, r)).unwrap();
        prop_assume!(!spectrum_report(&x, &NumericOptions::default()).unwrap().has_nonpositive_real_eigenvalue);
        let l = mat_log_principal(&x).unwrap();
        let spec = spectrum_report(&l, &NumericOptions::default()).unwrap();
        prop_assert!(spec.eigenvalues.iter().all(|z| z.im.abs() < core::f64::consts::PI));
    }
}

#[test]
fn spectrum_flags_on_examples() {
    let opts = NumericOptions::default();
    assert!(!spectrum_report(&SquareMatrix::identity(3), &opts).unwrap().has_nonpositive_real_eigenvalue);
    assert!(spectrum_report(&SquareMatrix::from_diagonal(&[-1.0, 2.0]), &opts)
        .unwrap()
        .has_nonpositive_real_eigenvalue);
    let half_turn = SquareMatrix::from_diagonal(&[-1.0, -1.0, 1.0]);
    let rep = spectrum_report(&half_turn, &opts).unwrap();
    assert!(rep.has_nonpositive_real_eigenvalue);
    assert_eq!(rep.eigenvalues.len(), 3);
}
