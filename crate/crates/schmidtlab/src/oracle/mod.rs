//! Independent numerical verification: Nyström + SVD oracles for the kernel
//! spectra and residual checks of the two bilinear generating-function
//! identities the analytic spectra rest on.

pub mod identities;
pub mod nystrom;
pub mod quad;

pub use identities::{verify_hardy_hille, verify_mehler};
pub use nystrom::{
    kernel_svd_1d, numeric_k_cartesian, numeric_k_radial, radial_kernel_svd, sinc_radial_svd,
    KernelTag, NumericalSpectrum,
};
pub use quad::{gauss_hermite_grid, half_line_radial_grid, GridKind, QuadratureGrid};
