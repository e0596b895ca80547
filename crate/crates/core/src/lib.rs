//! Differentially private synthetic data generation by space partitioning.
//!
//! Given a sensitive numerical dataset in `R^d`, the crate produces an
//! epsilon-DP weighted synthetic dataset by binning the space (either a
//! regular grid or a recursively built KD-tree), adding Laplace noise to the
//! per-bin counts, and filtering small noisy counts. Empty bins are handled
//! implicitly so that the algorithms scale to bin counts far beyond what can
//! be enumerated.
//!
//! Fidelity of the released dataset is measured with Gaussian-kernel density
//! distances and MMD ([`kernels`]), and the closed-form utility bounds for
//! the grid pipeline are available in [`bounds`].

pub mod bounds;
pub mod datagen;
pub mod grid;
pub mod io;
pub mod kernels;
pub mod noise;
pub mod release;
pub mod tree;
pub mod types;

mod error;

pub use error::Error;
pub type Result<T> = std::result::Result<T, Error>;
