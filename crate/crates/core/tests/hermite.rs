use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use raman_photostat::linalg::{CMatrix, CVector};
use raman_photostat::special_fn::{
    generating_function_value, hermite_diagonal_zero, hermite_multi, hermite_multi_scaled, legendre,
    ln_factorial, HermiteParams, HermiteTable, LegendreReduction, MultiIndex,
};
use raman_photostat::Error;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn random_symmetric(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> CMatrix {
    let mut r = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in i..dim {
            let z = Complex64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale));
            r[(i, j)] = z;
            r[(j, i)] = z;
        }
    }
    r
}

fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> CVector {
    DVector::from_fn(dim, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

#[test]
fn one_dimensional_table_matches_physicists_hermite() {
    // R = [2], y = x gives the physicists' H_n(x)
    let x = 0.7;
    let p = HermiteParams::new(CMatrix::from_element(1, 1, c(2.0)), DVector::from_element(1, c(x))).unwrap();
    let expected = [1.0, 2.0 * x, 4.0 * x * x - 2.0, 8.0 * x.powi(3) - 12.0 * x, 16.0 * x.powi(4) - 48.0 * x * x + 12.0];
    for (n, e) in expected.iter().enumerate() {
        let h = hermite_multi(&p, &MultiIndex(vec![n])).unwrap();
        assert!((h - c(*e)).norm() < 1e-13 * e.abs().max(1.0), "n = {n}");
    }
}

#[test]
fn single_mode_generating_series_matches_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let r = random_symmetric(&mut rng, 2, 0.5);
        let y = random_vector(&mut rng, 2);
        let params = HermiteParams::from_shift(r.clone(), y.clone()).unwrap();
        let table = HermiteTable::build(&params, &MultiIndex(vec![40, 40])).unwrap();
        let lambda: f64 = 0.3;
        let series: Complex64 = (0..=40)
            .map(|n| table.normalized(&[n, n]).unwrap() * lambda.powi(n as i32))
            .sum();
        let closed = generating_function_value(&r, &y, &[lambda]).unwrap();
        assert!((series - closed).norm() < 1e-10 * closed.norm(), "{series} vs {closed}");
    }
}

#[test]
fn two_mode_generating_series_matches_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..5 {
        let r = random_symmetric(&mut rng, 4, 0.4);
        let y = random_vector(&mut rng, 4);
        let params = HermiteParams::from_shift(r.clone(), y.clone()).unwrap();
        let k = 22;
        let table = HermiteTable::build(&params, &MultiIndex(vec![k; 4])).unwrap();
        let lambda = [0.25f64, -0.2];
        let mut series = c(0.0);
        for n in 0..=k {
            for m in 0..=k {
                series += table.normalized(&[n, m, n, m]).unwrap()
                    * lambda[0].powi(n as i32)
                    * lambda[1].powi(m as i32);
            }
        }
        let closed = generating_function_value(&r, &y, &lambda).unwrap();
        assert!((series - closed).norm() < 1e-9 * closed.norm(), "{series} vs {closed}");
    }
}

#[test]
fn legendre_reduction_matches_recurrence() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..20 {
        let r = random_symmetric(&mut rng, 2, 1.0);
        let table = HermiteTable::build(&HermiteParams::at_origin(r.clone()).unwrap(), &MultiIndex(vec![25, 25])).unwrap();
        let red = LegendreReduction::new(&r).unwrap();
        let diag = red.normalized_diagonal(r[(0, 1)], 25);
        for (n, d) in diag.iter().enumerate() {
            let rec = table.normalized(&[n, n]).unwrap();
            assert!((rec - d).norm() < 1e-10 * rec.norm().max(1e-12), "n = {n}");
        }
        let direct = hermite_diagonal_zero(&r, 8).unwrap();
        assert!((direct - table.value(&[8, 8]).unwrap()).norm() < 1e-9 * direct.norm());
    }
}

#[test]
fn legendre_low_orders() {
    for x in [-0.9f64, -0.2, 0.0, 0.4, 1.0, 3.0] {
        assert_eq!(legendre(0, x), 1.0);
        assert!((legendre(1, x) - x).abs() < 1e-15);
        assert!((legendre(2, x) - 0.5 * (3.0 * x * x - 1.0)).abs() < 1e-13);
        assert!((legendre(3, x) - 0.5 * (5.0 * x.powi(3) - 3.0 * x)).abs() < 1e-12);
    }
    assert!((legendre(7, 1.0f64) - 1.0).abs() < 1e-14);
}

#[test]
fn raw_values_overflow_but_scaled_form_survives() {
    let r = CMatrix::from_row_slice(2, 2, &[c(0.0), c(0.9), c(0.9), c(0.0)]);
    let p = HermiteParams::at_origin(r).unwrap();
    let n = MultiIndex(vec![160, 160]);
    assert!(matches!(hermite_multi(&p, &n), Err(Error::Overflow { .. })));
    let scaled = hermite_multi_scaled(&p, &n).unwrap();
    let expected = 160.0 * 0.9f64.ln() + ln_factorial(160);
    assert!((scaled.ln_abs() - expected).abs() < 1e-9);
}

#[test]
fn rejects_asymmetric_matrix() {
    let r = CMatrix::from_row_slice(2, 2, &[c(0.0), c(0.5), c(0.4), c(0.0)]);
    assert!(HermiteParams::at_origin(r).is_err());
}
