use proptest::prelude::*;

use symflow::dynamics::{lax_residual, vector_field};
use symflow::invariants::{invariant_table, poly_power, recursion_indices, recursion_residual};
use symflow::lie::{hom_defect, n_bracket, n_bracket_jacobi_defect};
use symflow::matrix::{eig_sym, frobenius, sym_coords, Matrix, SkewMatrix, SymMatrix};
use symflow::poisson::{bracket_frozen, bracket_lp, canonical_form, casimir_lp_gradients, tensor_b};

fn square(n: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-1.0f64..1.0, n * n).prop_map(move |v| Matrix::from_row_major(n, n, v).unwrap())
}

fn sym(n: usize) -> impl Strategy<Value = SymMatrix> {
    square(n).prop_map(|m| SymMatrix::symmetrize(&m))
}

fn skew(n: usize) -> impl Strategy<Value = SkewMatrix> {
    square(n).prop_map(|m| SkewMatrix::antisymmetrize(&m))
}

/// `(X, Y, N)` of a common size in `2..=7`.
fn triple() -> impl Strategy<Value = (SymMatrix, SymMatrix, SkewMatrix)> {
    (2usize..=7).prop_flat_map(|n| (sym(n), sym(n), skew(n)))
}

/// `(X, Y, N, Z)` of a common size in `2..=7`.
fn quad() -> impl Strategy<Value = (SymMatrix, SymMatrix, SkewMatrix, SymMatrix)> {
    (2usize..=7).prop_flat_map(|n| (sym(n), sym(n), skew(n), sym(n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn brackets_are_antisymmetric((x, y, n, w) in quad()) {
        let lp = bracket_lp(&y, &w, &x, &n).unwrap() + bracket_lp(&w, &y, &x, &n).unwrap();
        let fr = bracket_frozen(&y, &w, &n).unwrap() + bracket_frozen(&w, &y, &n).unwrap();
        prop_assert!(lp.abs() < 1e-12);
        prop_assert!(fr.abs() < 1e-12);
        let nb = n_bracket(&x, &y, &n).unwrap().add(&n_bracket(&y, &x, &n).unwrap());
        prop_assert!(nb.norm_max() < 1e-14);
    }

    #[test]
    fn n_bracket_identities((x, y, n, z) in quad()) {
        prop_assert!(n_bracket_jacobi_defect(&x, &y, &z, &n).unwrap() < 1e-12);
        prop_assert!(hom_defect(&x, &y, &n).unwrap() < 1e-12);
    }

    #[test]
    fn sym_coords_are_isometric((x, y, _n) in triple()) {
        let cx = sym_coords(&x);
        let cy = sym_coords(&y);
        let dot: f64 = cx.iter().zip(&cy).map(|(a, b)| a * b).sum();
        prop_assert!((dot - frobenius(&x, &y).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn vector_field_scales_bihomogeneously((x, _y, n) in triple(), s in 0.2f64..3.0, t in 0.2f64..3.0) {
        let base = vector_field(&x, &n).unwrap();
        let scaled = vector_field(&x.scale(s), &n.scale(t)).unwrap();
        let expected = base.scale(s * s * t);
        prop_assert!(scaled.sub(&expected).norm_max() <= 1e-12 * (1.0 + expected.norm_max()));
    }

    #[test]
    fn lax_pair_holds((x, _y, n) in triple(), lambda in -2.0f64..2.0) {
        prop_assert!(lax_residual(&x, &n, lambda).unwrap() < 1e-11);
    }

    #[test]
    fn invariant_scaling((x, _y, n) in triple(), s in 0.3f64..2.0, t in 0.3f64..2.0) {
        let a = invariant_table(&x, &n).unwrap();
        let b = invariant_table(&x.scale(s), &n.scale(t)).unwrap();
        for (idx, v) in &a.values {
            let factor = s.powi((idx.k - idx.two_r) as i32) * t.powi(idx.two_r as i32);
            let w = b.values[idx];
            prop_assert!((w - factor * v).abs() <= 1e-10 * (1.0 + w.abs()), "{} {} {}", idx, w, factor * v);
        }
    }

    #[test]
    fn odd_lambda_coefficients_vanish((x, _y, n) in triple(), k in 1usize..=6) {
        let tr = poly_power(&x, &n, k).unwrap().trace();
        let scale = (x.norm_fro() + n.norm_fro()).max(1.0).powi(k as i32);
        for (j, c) in tr.iter().enumerate() {
            if j % 2 == 1 {
                prop_assert!(c.abs() <= 1e-12 * scale, "j = {} coefficient {}", j, c);
            }
        }
    }

    #[test]
    fn recursion_holds((x, _y, n) in triple()) {
        for (k, r) in recursion_indices(x.n()) {
            prop_assert!(recursion_residual(&x, &n, k, r).unwrap() < 1e-10, "(k, r) = ({}, {})", k, r);
        }
    }

    #[test]
    fn eigenvalues_sum_to_trace((x, _y, _n) in triple()) {
        let e = eig_sym(&x, 1e-14).unwrap();
        let sum: f64 = e.values.iter().sum();
        prop_assert!((sum - x.trace()).abs() < 1e-12);
    }

    #[test]
    fn lp_casimirs_annihilated_by_b(
        (x, n) in (2usize..=7).prop_flat_map(|n| (sym(n), skew(n))),
    ) {
        let nc = canonical_form(&n, 1e-9).unwrap();
        let xc = nc.to_canonical(&x).unwrap();
        if let Ok(grads) = casimir_lp_gradients(&nc, &xc) {
            for g in grads {
                let r = tensor_b(&xc, &g, &nc.n_canonical).unwrap();
                prop_assert!(r.norm_max() < 1e-8 * (1.0 + g.norm_max()));
            }
        }
    }
}
