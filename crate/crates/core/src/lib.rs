pub mod automorphism;
pub mod cli;
pub mod dirichlet;
pub mod dual_group;
pub mod error;
pub mod hausdorff;
pub mod io;
pub mod random;
pub mod spectrum;
pub mod torus;
pub mod verify;
