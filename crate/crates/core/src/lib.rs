//! Exact computer algebra over GF(2) for Hochschild cochains of finite
//! dg-algebras, homotopy inner products, and the BV operators they induce.

pub mod bv;
pub mod dga;
pub mod hip;
pub mod hochschild;
pub mod f2lin;
