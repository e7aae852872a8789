//! Single-particle coherence under particle loss.

pub mod linalg;
pub mod channel;
pub mod dynamics;
pub mod linear_optics;
pub mod spectra;
