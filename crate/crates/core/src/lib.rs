pub mod approx;
pub mod arith;
pub mod chains;
pub mod cones;
pub mod exponents;
pub mod roots;
