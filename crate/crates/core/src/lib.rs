pub mod cli;
pub mod error;
pub mod expr;
pub mod oracle;
pub mod riemann;
pub mod scalar;
pub mod scenarios;
pub mod sets;
pub mod summation;
