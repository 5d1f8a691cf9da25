//! Dense kernels: LU, resolvents, inverse iteration, spectral probing,
//! Fourier multipliers and the matrix exponential.

pub mod accurate;
pub mod dft;
pub mod eigen;
pub mod expm;
pub mod lu;
pub mod spectrum;
pub mod symmetric;

pub use accurate::{dot2, mul_vec2, refined_resolvent, CompensatedSum};
pub use dft::{apply_multiplier, real_dft_multiplier_matrix};
pub use eigen::{eigenpair_near, EigenPair};
pub use expm::matrix_exponential;
pub use lu::{lu_factor, resolvent, shifted_factor, LuFactors};
pub use spectrum::{
    gap_estimate, gershgorin_interval, rightmost_real_eigenvalue, sigma_min, sigma_min_from_lu,
    spectral_gap, GapEstimate,
};
pub use symmetric::{symmetric_eigen, SymmetricEigen};
