//! Counting sets inside the universe of size λ.

use lambda_arith::expr::LambdaExpr;
use lambda_arith::oracle::{strata_by_enumeration, strata_total};
use lambda_arith::sets::{card, mapping_gap, MappingScheme, SetExpr};

fn main() {
    let lam = LambdaExpr::lambda();
    let sets = [
        SetExpr::naturals(),
        SetExpr::Integers,
        SetExpr::Rationals,
        SetExpr::Evens,
        SetExpr::Squares,
        SetExpr::binary_strings(),
        SetExpr::Strings { alphabet: 26, length: lam.clone() },
    ];
    for s in &sets {
        println!("|{s}| = {}", card(s).unwrap());
    }

    println!();
    for m in MappingScheme::ALL {
        println!("{m:>13}: {} left unreached", mapping_gap(m, &lam).unwrap());
    }

    let (sum, pow) = strata_total(20);
    let counts = strata_by_enumeration(12);
    println!("\nsum_k C(20, k) = {sum} = 2^20 = {pow}");
    println!("12-bit strings by number of ones: {counts:?}");
}
