//! Spectral theory of `h`-parametrized matrix families on `ℂ^d`: operator
//! brackets and quasinilpotent equivalence, family spectra via uniform tail
//! invertibility, and local spectra.

pub mod bracket;
pub mod family;
pub mod harness;
pub mod linalg;
pub mod local;
mod par;
pub mod spectra;
