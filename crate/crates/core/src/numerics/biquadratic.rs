//! Closed-form roots of the biquadratic `mu^4 - a2 mu^2 - a0 = 0`.
//!
//! The flat-state matrix of the fourth-order eigenvalue system is in
//! companion form with zero odd entries, so its characteristic polynomial is
//! exactly this biquadratic.

use num_complex::Complex;

use crate::scalar::{lit, Real};

/// The four roots `+-sqrt(z+-)` with `z+- = (a2 +- sqrt(a2^2 + 4 a0)) / 2`,
/// sorted by real part descending (ties by imaginary part descending).
/// Repeated roots are returned with multiplicity.
pub fn biquadratic_roots<S: Real>(a2: Complex<S>, a0: Complex<S>) -> [Complex<S>; 4] {
    let four = lit::<S>(4.0);
    let half = lit::<S>(0.5);
    let disc = (a2 * a2 + a0 * four).sqrt();
    let zp = (a2 + disc) * half;
    let zm = (a2 - disc) * half;
    let rp = zp.sqrt();
    let rm = zm.sqrt();
    let mut roots = [rp, -rp, rm, -rm];
    roots.sort_by(|a, b| {
        b.re.partial_cmp(&a.re)
            .unwrap()
            .then(b.im.partial_cmp(&a.im).unwrap())
    });
    roots
}

/// Sum and product of the two roots with positive real part.
///
/// These are the symmetric functions of the "growing" pair; they are
/// continuous in `(a2, a0)` as long as no root touches the imaginary axis,
/// which is what makes contour evaluations consistent without any
/// branch matching.
pub fn positive_pair_symmetric<S: Real>(
    a2: Complex<S>,
    a0: Complex<S>,
) -> Option<(Complex<S>, Complex<S>)> {
    let roots = biquadratic_roots(a2, a0);
    let scale = (S::one() + a2.norm() + a0.norm()).sqrt();
    let pos: Vec<_> = roots.iter().filter(|r| r.re > S::zero()).collect();
    if pos.len() != 2 {
        return None;
    }
    // reject roots hugging the imaginary axis (essential spectrum)
    for r in roots.iter() {
        if r.re.abs() <= lit::<S>(1e-12) * scale {
            return None;
        }
    }
    Some((*pos[0] + *pos[1], *pos[0] * *pos[1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn factored_real_case() {
        // (mu^2 - 4)(mu^2 - 1) = mu^4 - 5 mu^2 + 4  =>  a2 = 5, a0 = -4
        let r = biquadratic_roots(c(5.0, 0.0), c(-4.0, 0.0));
        let expect = [2.0, 1.0, -1.0, -2.0];
        for (ri, ei) in r.iter().zip(expect) {
            assert!((ri.re - ei).abs() < 1e-14 && ri.im.abs() < 1e-14, "{r:?}");
        }
    }

    #[test]
    fn double_roots_kept_with_multiplicity() {
        // (mu^2 - 1)^2 = mu^4 - 2 mu^2 + 1  =>  a2 = 2, a0 = -1
        let r = biquadratic_roots(c(2.0, 0.0), c(-1.0, 0.0));
        assert!((r[0].re - 1.0).abs() < 1e-14);
        assert!((r[1].re - 1.0).abs() < 1e-14);
        assert!((r[2].re + 1.0).abs() < 1e-14);
        assert!((r[3].re + 1.0).abs() < 1e-14);
    }

    #[test]
    fn flat_state_roots_of_reference_wave() {
        // companion entries at lambda = 0 for c = 1, k from the reference wave:
        // roots must be {+-2, +-sqrt((c-4k^2)/(c-k^2))}
        let cc = 1.0f64;
        let k: f64 = 0.16965101487305628;
        let k83 = k.powf(8.0 / 3.0);
        let f_inf = -2.0 / k83;
        let g_inf = (8.0 * cc - 14.0 * k * k) / ((cc - k * k) * k83);
        let w0 = -9.0 * (k * (cc - k * k).powf(1.5)).powf(-2.0 / 3.0);
        let a0 = (g_inf + 2.0 * w0) / f_inf;
        let a2 = (f_inf - g_inf) / f_inf;
        let r = biquadratic_roots(c(a2, 0.0), c(a0, 0.0));
        let ck = ((cc - 4.0 * k * k) / (cc - k * k)).sqrt();
        assert!((ck - 0.9545139265563596).abs() < 1e-12);
        let expect = [2.0, ck, -ck, -2.0];
        for (ri, ei) in r.iter().zip(expect) {
            assert!((ri.re - ei).abs() < 1e-10 && ri.im.abs() < 1e-12, "{r:?}");
        }
    }

    #[test]
    fn symmetric_pair_on_double_root() {
        let sp = positive_pair_symmetric(c(2.0, 0.0), c(-1.0, 0.0)).unwrap();
        assert!((sp.0.re - 2.0).abs() < 1e-14);
        assert!((sp.1.re - 1.0).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn residuals_are_small(a2r in -50.0..50.0f64, a2i in -50.0..50.0f64,
                               a0r in -50.0..50.0f64, a0i in -50.0..50.0f64) {
            let a2 = c(a2r, a2i);
            let a0 = c(a0r, a0i);
            let bound = 1e-12 * (1.0 + a2.norm() + a0.norm());
            for mu in biquadratic_roots(a2, a0) {
                let res = mu.powu(4) - a2 * mu * mu - a0;
                prop_assert!(res.norm() <= bound, "mu={mu} residual={}", res.norm());
            }
        }
    }
}
