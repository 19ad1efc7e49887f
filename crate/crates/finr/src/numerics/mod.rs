//! Dense linear algebra, deterministic RNG, uniform-grid DFT, symmetric
//! eigendecomposition, and the finite-difference gradient oracle.

pub mod dft;
pub mod eigh;
pub mod fdiff;
pub mod mat;
pub mod rng;

pub use dft::{dft_uniform, SpectrumBin, SpectrumReport};
pub use eigh::eigh;
pub use fdiff::{finite_diff_grad, max_rel_deviation};
pub use mat::{dot, max_abs_diff, norm2, Mat};
pub use rng::Rng;
