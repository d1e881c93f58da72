//! Exact constants and rigorous enclosures.

use lambda_arith::scalar::{Rational, Scalar};
use num_traits::ToPrimitive;

fn main() {
    let half = Rational::new(1.into(), 2.into());
    let ln2 = Scalar::ln_rational(&Rational::from_integer(2.into())).unwrap();
    let e_inv = Scalar::exp_rational(-Rational::from_integer(1.into()));
    let root = Scalar::rational_power(&Rational::from_integer(2.into()), &half).unwrap();

    for (name, s) in [("ln 2", &ln2), ("1/e", &e_inv), ("sqrt 2", &root), ("pi", &Scalar::pi())] {
        let i = s.eval(128);
        println!("{name:>7} = {s:<10} ~ {:<20} enclosure width {:.1e}", i.to_f64(), i.width().to_f64().unwrap());
    }

    // ln 8 - 3 ln 2 cancels symbolically
    let ln8 = Scalar::ln_rational(&Rational::from_integer(8.into())).unwrap();
    let diff = &ln8 - &ln2.scale(&Rational::from_integer(3.into()));
    println!("ln 8 - 3 ln 2 = {diff}");

    let square = &root * &root;
    println!("sqrt(2)^2 = {square}");
    println!("(e^-1)^2 = {}", &e_inv * &e_inv);
}
