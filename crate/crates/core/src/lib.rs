pub mod bench;
pub mod cli;
pub mod error;
pub mod gen;
pub mod io;
pub mod matrix;
pub mod mnn;
pub mod prob;
pub mod report;
pub mod spectral;
