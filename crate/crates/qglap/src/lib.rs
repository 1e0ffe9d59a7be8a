//! Spectra of Laplace operators on finite compact metric graphs.
//!
//! Vertex couplings are of delta or delta-prime type with a real (or
//! infinite) coupling constant per vertex. The crate provides two
//! formulations of the eigenvalue condition -- the vertex M-matrix
//! determinant `det(B - M(lambda))` and the entire edge-wise matching
//! determinant -- together with a spectrum scanner, a finite-difference
//! oracle, and the trace-formula / sigma-multiset machinery used to test
//! and search for isospectral coupling configurations.

pub mod edge_secular;
pub mod error;
pub mod fd;
pub mod graph;
pub mod isospectral;
pub mod mfunction;
pub mod point;
pub mod spectrum;
pub mod zeros;

pub use error::Error;
pub use graph::{Coupling, Edge, MarkedGraph, VertexType};
pub use point::SpectralPoint;
pub use spectrum::{ScanConfig, Spectrum, SpectrumMethod};
