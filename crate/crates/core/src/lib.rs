//! Numerical study of smooth solitary waves of the Novikov equation
//!
//! ```text
//! u_t - u_xxt = u^2 u_xxx - 4 u^2 u_x + 3 u u_x u_xx
//! ```
//!
//! The crate constructs the one-parameter family of smooth solitary waves on
//! a nonzero background `k`, assembles the linearization of the associated
//! action functional around a wave, locates its spectrum with
//! compound-matrix Evans functions and argument-principle winding counts,
//! and evaluates the Vakhitov-Kolokolov stability condition through
//! closed-form quadratures.
//!
//! Everything is generic over the floating-point scalar (`f64` by default;
//! see the aliases at the crate root).

pub mod error;
pub mod evans;
pub mod numerics;
pub mod operators;
pub mod profile;
pub mod scalar;
pub mod spectrum;
pub mod vk;

pub use error::{Error, Result};
pub use scalar::Real;

// Concrete double-precision aliases; single precision compiles but is far
// too coarse for the spectral tolerances used here.
pub type Tolerances = numerics::Tolerances<f64>;
pub type WaveParams = profile::WaveParams<f64>;
pub type GridSpec = profile::GridSpec<f64>;
pub type WaveProfile = profile::WaveProfile<f64>;







/// C-style `%.12e` formatting used by every CSV writer.
pub fn fmt_e(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{:.12e}", x);
    // rust renders exponents as `e-5` / `e7`; normalize to `e-05` / `e+07`
    let (mant, exp) = s.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("exponent digits");
    format!("{mant}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
}

#[cfg(test)]
mod tests {
    use super::fmt_e;

    #[test]
    fn c_style_scientific_format() {
        assert_eq!(fmt_e(0.0), "0.000000000000e+00");
        assert_eq!(fmt_e(1.0), "1.000000000000e+00");
        assert_eq!(fmt_e(-0.16237976320958225), "-1.623797632096e-01");
        assert_eq!(fmt_e(826.3625493664405), "8.263625493664e+02");
        assert_eq!(fmt_e(1e-120), "1.000000000000e-120");
    }
}
