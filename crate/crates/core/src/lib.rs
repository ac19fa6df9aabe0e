#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod eg3;
pub mod harmonic;
pub mod linalg;
pub mod martin;
pub mod rational;
pub mod smc;
pub mod spectral;
pub mod words;
