//! Simulation and analysis toolkit for frustrated Ising lattices.

pub mod analysis;
pub mod clockmc;
mod fft;
pub mod lattice;
pub mod quench;
pub mod rng;
pub mod schedule;
pub mod shim;
