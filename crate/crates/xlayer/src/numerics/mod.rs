//! Shared numerical machinery: adaptive quadrature, special functions, and
//! characteristic-function inversion.

mod inversion;
mod quad;
mod special;

pub use inversion::{cf_inversion, TailDirection};
pub use quad::{adaptive_quadrature, adaptive_quadrature_half_line, QuadratureResult, Tolerance};
pub use special::{beta_function, gauss_2f1_family, ln_gamma, regularized_gamma_upper};
