use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use toeplitz_pcg::transforms::dft_inverse;
use toeplitz_pcg::{
    norm2, CirculantOperator, CoefficientSequence, EvenRule, SymbolModel, ToeplitzSystem,
};

fn complex_vec(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len).prop_map(|v| {
        v.into_iter()
            .map(|(re, im)| Complex64::new(re, im))
            .collect()
    })
}

fn toeplitz_case() -> impl Strategy<Value = (CoefficientSequence, Vec<Complex64>)> {
    (1usize..=128).prop_flat_map(|n| {
        (-2.0f64..4.0, complex_vec(n - 1), complex_vec(n)).prop_map(|(c0, rest, x)| {
            let mut coeffs = vec![Complex64::new(c0, 0.0)];
            coeffs.extend(rest);
            (CoefficientSequence::new(coeffs, true).unwrap(), x)
        })
    })
}

fn dense_toeplitz(c: &CoefficientSequence, n: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, n, |j, k| c.get(j as i64 - k as i64))
}

fn dense_circulant(col: &[Complex64]) -> DMatrix<Complex64> {
    let n = col.len();
    DMatrix::from_fn(n, n, |j, k| col[(j + n - k) % n])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn fast_matvec_matches_dense((c, x) in toeplitz_case()) {
        let n = x.len();
        let t = ToeplitzSystem::new(&c, n).unwrap();
        let fast = t.matvec(&x).unwrap();
        let dense = dense_toeplitz(&c, n) * nalgebra::DVector::from_vec(x.clone());
        let diff: Vec<Complex64> = fast.iter().zip(dense.iter()).map(|(a, b)| a - b).collect();
        let scale = dense.norm().max(f64::MIN_POSITIVE);
        prop_assert!(norm2(&diff) / scale < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn circulant_solve_on_random_hpd(
        (eigs, b) in (3usize..=257).prop_flat_map(|n| (prop::collection::vec(0.1f64..10.0, n), complex_vec(n)))
    ) {
        let spectrum: Vec<Complex64> = eigs.iter().map(|&l| Complex64::new(l, 0.0)).collect();
        let col = dft_inverse(&spectrum).unwrap();
        let s = CirculantOperator::new(col.clone()).unwrap();
        prop_assert!(s.is_hermitian());
        prop_assert!(s.is_positive_definite());
        let x = s.solve(&b).unwrap();
        let r = dense_circulant(&col) * nalgebra::DVector::from_vec(x) - nalgebra::DVector::from_vec(b.clone());
        prop_assert!(r.norm() / norm2(&b) < 1e-12);
    }
}

#[test]
fn strang_eigenvalues_sample_the_truncated_symbol() {
    // odd n: the Strang eigenvalues are the partial Fourier sum over |k| <= n/2 on the grid 2 pi j / n
    let c = SymbolModel::random_phase(7, 40).realize(2);
    let n = 41;
    let truncated = CoefficientSequence::new(c.nonneg_half()[..=n / 2].to_vec(), true).unwrap();
    let s = CirculantOperator::strang(&c, n, EvenRule::Average).unwrap();
    let mut expected: Vec<f64> = (0..n)
        .map(|j| truncated.evaluate(2.0 * std::f64::consts::PI * j as f64 / n as f64))
        .collect();
    expected.sort_by(f64::total_cmp);
    let got = s.sorted_eigenvalues().unwrap();
    for (g, e) in got.iter().zip(&expected) {
        assert!((g - e).abs() < 1e-12, "{g} vs {e}");
    }
}

#[test]
fn strang_copies_the_central_diagonals() {
    let c = SymbolModel::random_phase(11, 64).realize(5);
    for n in [64usize, 65] {
        let s = CirculantOperator::strang(&c, n, EvenRule::Zero).unwrap();
        let dense = dense_circulant(s.first_column());
        // below the wrap point every diagonal of S equals the Toeplitz one
        let reach = (n - 1) / 2;
        for j in 0..n {
            for k in 0..n {
                let d = j as i64 - k as i64;
                if d.unsigned_abs() as usize <= reach {
                    assert_eq!(dense[(j, k)], c.get(d), "n={n} ({j},{k})");
                }
            }
        }
    }
}
