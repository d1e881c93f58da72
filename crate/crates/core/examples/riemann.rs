//! Riemann sums with λ slices against exact integrals.

use lambda_arith::riemann::{geom_square_bridge, integral_check, FuncExpr};
use lambda_arith::scalar::{Rational, Scalar};

fn main() {
    let b = Scalar::from_rational(Rational::new(7.into(), 3.into()));
    let x = FuncExpr::x();
    let cases = [
        ("x", x.clone()),
        ("x^2", FuncExpr::power(2)),
        ("e^-x", FuncExpr::exp_linear(Scalar::from_int(-1))),
        ("(b - x) x", FuncExpr::constant(b.clone()).sub(&x).mul(&x)),
    ];
    for (name, f) in &cases {
        let r = integral_check(f, &Scalar::zero(), &b, 4).unwrap();
        println!("{name:>10} on [0, 7/3]: {r}");
    }

    let bridge = geom_square_bridge(&Scalar::one(), 4).unwrap();
    println!("\n(sum x^n)^2 dx^2 at x = 1 - 1/lam: ~ {} vs {}", bridge.standard_part, bridge.analytic_value);
}
