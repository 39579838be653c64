//! Blow-up criteria and radial simulation for a quasilinear parabolic–elliptic
//! Keller–Segel system with logistic source.

pub mod elliptic;
pub mod dynamics;
pub mod mesh;
pub mod moments;
pub mod quadrature;
pub mod regions;
pub mod scenario;
pub mod tridiag;
