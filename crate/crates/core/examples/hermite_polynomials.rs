// Multivariable Hermite polynomials: recurrence table, Legendre reduction
// of the diagonal values, and the generating function.
//
// Run with `cargo run --example hermite_polynomials`.

use num_complex::Complex64;
use raman_photostat::linalg::{CMatrix, CVector};
use raman_photostat::special_fn::{
    generating_function_value, hermite_multi_scaled, HermiteParams, HermiteTable, LegendreReduction, MultiIndex,
};

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn main() {
    let r = CMatrix::from_row_slice(2, 2, &[Complex64::new(0.2, 0.1), c(-0.45), c(-0.45), Complex64::new(0.2, -0.1)]);
    let params = HermiteParams::at_origin(r.clone()).expect("symmetric R");
    let table = HermiteTable::build(&params, &MultiIndex(vec![12, 12])).expect("table");
    let legendre = LegendreReduction::new(&r).expect("reduction").normalized_diagonal(r[(0, 1)], 12);

    println!("{:>3} {:>26} {:>26}", "n", "H_nn(0,0)/n! recurrence", "Legendre form");
    for (n, l) in legendre.iter().enumerate() {
        let h = table.normalized(&[n, n]).expect("entry");
        println!("{n:>3} {:>26.14} {:>26.14}", h.re, l.re);
    }

    // G(lambda) = sum lambda^n / n! H_nn, truncated, against the closed form
    let y = CVector::zeros(2);
    let lambda: f64 = 0.4;
    let series: Complex64 = (0..=12).map(|n| table.normalized(&[n, n]).unwrap() * lambda.powi(n as i32)).sum();
    let closed = generating_function_value(&r, &y, &[lambda]).expect("closed form");
    println!("generating function at {lambda}: series {:.12}, closed form {:.12}", series.re, closed.re);

    let big = hermite_multi_scaled(&params, &MultiIndex(vec![200, 200])).expect("scaled value");
    println!("ln |H_(200,200)(0,0)| = {:.6}", big.ln_abs());
}
