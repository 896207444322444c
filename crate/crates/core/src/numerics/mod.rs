//! Quadrature, special functions, root finding and interpolation.

mod interp;
mod quadrature;
mod roots;
mod special;

pub use interp::MonotoneCubic;
pub use quadrature::{
    integrate, integrate_decaying, integrate_panels, QuadratureSpec, SpecialValue,
};
pub use roots::bisect;
pub use special::{
    exp_integral_ei, exp_integral_en, gamma_zero, ln_gamma, upper_incomplete_gamma_reg,
};
