//! Numerical primitives shared by the samplers, the kernel evaluators and
//! the tabulation code.

mod eigen;
mod matrix;
mod quadrature;
mod quantile;
mod roots;

pub use eigen::{hermitian_eigenvalues, tridiagonalize, SymTridiagonal};
pub use matrix::{complex_determinant, real_determinant, ComplexMatrix};
pub use quadrature::{gauss_legendre, QuadratureRule};
pub use quantile::{empirical_quantile, quantile_sorted};
pub use roots::{solve_root_bracketed, DEFAULT_ROOT_TOL};

pub use num_complex::Complex64;
