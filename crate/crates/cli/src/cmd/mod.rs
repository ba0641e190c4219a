pub mod analyze;
pub mod counterexample;
pub mod gen;
pub mod solve;
pub mod sweep;
