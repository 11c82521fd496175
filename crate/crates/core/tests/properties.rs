//! Randomized invariants for the dense Hermitian eigensolver and the
//! operator square root, driven by proptest shrinking.

use amou::numerics::{herm_eig, herm_sqrt, ComplexMatrix, Tolerances};
use num_complex::Complex64;
use proptest::prelude::*;

fn hermitian_strategy(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    let entries = prop::collection::vec(-5.0f64..5.0, n * n * 2);
    entries.prop_map(move |vals| {
        let a = ComplexMatrix::from_fn(n, n, |i, j| {
            Complex64::new(vals[2 * (i * n + j)], vals[2 * (i * n + j) + 1])
        });
        a.add(&a.adjoint()).scale(0.5)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eig_reconstructs_and_orders(h in hermitian_strategy(4)) {
        let tol = Tolerances::default();
        let (values, vectors) = herm_eig(&h, &tol).unwrap();
        // Descending eigenvalues.
        for w in values.windows(2) {
            prop_assert!(w[0] >= w[1] - 1e-12);
        }
        // V is unitary.
        let gram = vectors.adjoint().mul(&vectors);
        prop_assert!(gram.approx_eq(&ComplexMatrix::identity(4), 1e-10));
        // V diag(values) V* = h.
        let d = ComplexMatrix::diag_real(&values);
        let back = vectors.mul(&d).mul(&vectors.adjoint());
        prop_assert!(back.approx_eq(&h, 1e-9 * (1.0 + h.max_abs())));
    }

    #[test]
    fn sqrt_squares_back(h in hermitian_strategy(3)) {
        let tol = Tolerances::default();
        // Shift to a PSD matrix.
        let (values, _) = herm_eig(&h, &tol).unwrap();
        let shift = -values.last().copied().unwrap_or(0.0);
        let psd = h.add(&ComplexMatrix::identity(3).scale(shift.max(0.0)));
        let root = herm_sqrt(&psd, &tol).unwrap();
        let squared = root.mul(&root);
        prop_assert!(squared.approx_eq(&psd, 1e-8 * (1.0 + psd.max_abs())));
        // The root is PSD itself.
        let (rv, _) = herm_eig(&root, &tol).unwrap();
        prop_assert!(rv.last().copied().unwrap_or(0.0) > -1e-10);
    }

    #[test]
    fn abs_value_is_positive_and_norm_preserving(h in hermitian_strategy(3)) {
        use amou::{Element, SpaceSpec};
        let tol = Tolerances::default();
        let space = SpaceSpec::new(vec![3]).unwrap();
        let x = Element::new(space, (1, 1), vec![h]).unwrap();
        let abs = x.abs_value(&tol).unwrap();
        prop_assert!(abs.min_eigenvalue(&tol).unwrap() > -1e-9 * (1.0 + x.max_abs()));
        prop_assert!((abs.order_unit_norm() - x.order_unit_norm()).abs()
            < 1e-9 * (1.0 + x.max_abs()));
    }
}
