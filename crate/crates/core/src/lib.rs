//! Shock formation in 2D compressible Euler flow, followed through the
//! acoustic geometry: an Eulerian solver in log-density form, an eikonal
//! function, a lattice of characteristics carrying the inverse foliation
//! density `mu`, and the diagnostics that read the shock off them.

pub mod checkpoint;
pub mod config;
pub mod diagnostics;
pub mod eikonal;
pub mod eos;
pub mod error;
pub mod euler;
pub mod filter;
pub mod geometry;
pub mod grid;
pub mod interp;
pub mod plane_wave;
pub mod report;
pub mod runner;
pub mod stencil;
pub mod study;
pub mod tracer;
