//! Special-function kernels: modified Bessel `I0`, adaptive quadrature on
//! finite and semi-infinite ranges, complex log-gamma, a Mellin–Barnes
//! evaluator for Meijer-G functions and a golden-section line search.

mod bessel;
mod gamma;
mod meijer;
mod quadrature;
mod search;

pub use bessel::{bessel_i0, bessel_i0_scaled};
pub use gamma::{ln_gamma_complex, ln_sin_pi};
pub use meijer::{meijer_g_ln1p, meijer_g_mellin_barnes, ContourConfig, ContourShape, MeijerGSpec, MellinBarnes};
pub use quadrature::{integrate, integrate_semi_infinite, integrate_semi_infinite_with_breaks, Quadrature, Tolerance};
pub use search::golden_section_min;
