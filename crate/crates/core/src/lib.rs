pub mod cli;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod inequalities;
pub mod ks_single;
pub mod ks_two;
pub mod qm;
pub mod quadrature;
