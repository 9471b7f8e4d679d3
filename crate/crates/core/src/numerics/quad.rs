//! Adaptive Gauss-Kronrod (7-15) quadrature with an optional square-root
//! substitution for integrands carrying an inverse-square-root singularity at
//! the upper endpoint.

use crate::error::{Error, Result};
use crate::scalar::{as_f64, lit, Real};

/// Kronrod abscissae on [0, 1] (symmetric), 15-point rule.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
/// Kronrod weights matching `XGK`.
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
/// Gauss weights for the embedded 7-point rule (odd Kronrod abscissae).
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// How the integrand behaves at the endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadMode {
    /// Integrand is smooth on the closed interval.
    Plain,
    /// Integrand has an inverse-square-root singularity at the upper
    /// endpoint; substitute `phi = b - s^2` before integrating.
    SqrtUpper,
}

fn kronrod_panel<S: Real, F: Fn(S) -> S>(f: &F, a: S, b: S) -> (S, S) {
    let center = (a + b) * lit(0.5);
    let half = (b - a) * lit(0.5);
    let fc = f(center);
    let mut kron = fc * lit(WGK[7]);
    let mut gauss = fc * lit(WG[3]);
    for j in 0..7 {
        let dx = half * lit(XGK[j]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kron = kron + lit::<S>(WGK[j]) * (f1 + f2);
        if j % 2 == 1 {
            gauss = gauss + lit::<S>(WG[j / 2]) * (f1 + f2);
        }
    }
    (kron * half, (kron - gauss) * half)
}

/// Globally adaptive integration of a smooth integrand on `[a, b]`,
/// refining the worst panel first.
fn adaptive<S: Real, F: Fn(S) -> S>(f: &F, a: S, b: S, rel_tol: S) -> Result<S> {
    const MAX_PANELS: usize = 20_000;

    struct Panel<S> {
        err: S,
        a: S,
        b: S,
        val: S,
    }
    impl<S: Real> PartialEq for Panel<S> {
        fn eq(&self, other: &Self) -> bool {
            self.err == other.err
        }
    }
    impl<S: Real> Eq for Panel<S> {}
    impl<S: Real> PartialOrd for Panel<S> {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    impl<S: Real> Ord for Panel<S> {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            self.err.partial_cmp(&other.err).unwrap_or(std::cmp::Ordering::Equal)
        }
    }

    let mut heap = std::collections::BinaryHeap::new();
    let (v, e) = kronrod_panel(f, a, b);
    let mut total = v;
    let mut total_err = e.abs();
    heap.push(Panel { err: e.abs(), a, b, val: v });

    while heap.len() < MAX_PANELS {
        let scale = total.abs().max(lit(1e-300));
        if total_err <= rel_tol * scale {
            return Ok(total);
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = (worst.a + worst.b) * lit(0.5);
        if mid == worst.a || mid == worst.b {
            heap.push(worst);
            break; // interval at machine resolution
        }
        let (v1, e1) = kronrod_panel(f, worst.a, mid);
        let (v2, e2) = kronrod_panel(f, mid, worst.b);
        total = total - worst.val + v1 + v2;
        total_err = total_err - worst.err + e1.abs() + e2.abs();
        heap.push(Panel { err: e1.abs(), a: worst.a, b: mid, val: v1 });
        heap.push(Panel { err: e2.abs(), a: mid, b: worst.b, val: v2 });
    }

    // incremental sums drift after many updates; recompute before judging
    let total: S = heap.iter().fold(S::zero(), |acc, p| acc + p.val);
    let err: S = heap.iter().fold(S::zero(), |acc, p| acc + p.err);
    if err <= rel_tol * total.abs().max(lit(1e-300)) {
        return Ok(total);
    }
    Err(Error::QuadratureNonConvergence {
        estimate: as_f64(total),
        error: as_f64(err),
    })
}

/// Integrate `g` over `(a, b)` to relative tolerance `tol`.
///
/// With [`QuadMode::SqrtUpper`] the substitution `phi = b - s^2`
/// (`d phi = -2 s ds`) turns an inverse-square-root singularity at `b` into a
/// smooth integrand on `[0, sqrt(b - a)]`.
pub fn quad_singular<S: Real, F: Fn(S) -> S>(
    g: F,
    a: S,
    b: S,
    mode: QuadMode,
    tol: S,
) -> Result<S> {
    if !(b > a) {
        return Err(Error::Parameter(format!(
            "quadrature interval is empty: [{}, {}]",
            as_f64(a),
            as_f64(b)
        )));
    }
    match mode {
        QuadMode::Plain => adaptive(&g, a, b, tol),
        QuadMode::SqrtUpper => {
            let smax = (b - a).sqrt();
            let two = lit::<S>(2.0);
            let h = |s: S| {
                let phi = b - s * s;
                g(phi) * two * s
            };
            adaptive(&h, S::zero(), smax, tol)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_sqrt_singularity() {
        // int_0^1 1/sqrt(1-phi) dphi = 2
        let v = quad_singular(
            |p: f64| 1.0 / (1.0 - p).sqrt(),
            0.0,
            1.0,
            QuadMode::SqrtUpper,
            1e-12,
        )
        .unwrap();
        assert!((v - 2.0).abs() < 1e-9, "got {v}");
    }

    #[test]
    fn zero_integrand() {
        let v = quad_singular(|_: f64| 0.0, 0.0, 1.0, QuadMode::Plain, 1e-9).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn phi_over_sqrt_one_minus_phi_squared() {
        // antiderivative -sqrt(1-phi^2): integral over [0,1] is 1.
        // The singularity density is 1/sqrt(1-phi^2) ~ 1/sqrt(2(1-phi)).
        let v = quad_singular(
            |p: f64| p / (1.0 - p * p).sqrt(),
            0.0,
            1.0,
            QuadMode::SqrtUpper,
            1e-12,
        )
        .unwrap();
        assert!((v - 1.0).abs() < 1e-9, "got {v}");
    }

    #[test]
    fn sqrt_upper_agrees_with_clipped_plain() {
        let g = |p: f64| (1.5 + p.sin()) / (2.0 - p).sqrt();
        let (a, b) = (0.0, 2.0);
        let full = quad_singular(g, a, b, QuadMode::SqrtUpper, 1e-12).unwrap();
        let clipped = quad_singular(g, a, b - 1e-8 * (b - a), QuadMode::Plain, 1e-10).unwrap();
        // the clipped tail carries ~ 2*sqrt(eps) of mass
        assert!(
            (full - clipped).abs() / full.abs() < 1e-3,
            "full {full} clipped {clipped}"
        );
        let nearly = quad_singular(g, a, b - 1e-8 * (b - a), QuadMode::SqrtUpper, 1e-12).unwrap();
        assert!((nearly - clipped).abs() / clipped.abs() < 1e-6);
    }

    #[test]
    fn empty_interval_is_error() {
        assert!(quad_singular(|p: f64| p, 1.0, 1.0, QuadMode::Plain, 1e-9).is_err());
    }
}
