//! Evans functions by the compound-matrix (second exterior power) method.
//!
//! The fourth-order eigenvalue system `(1 - dx^2)(L0 - lambda)v + 2 omega0 v = 0`
//! is written as a companion first-order system `U' = A(x, lambda) U` with
//!
//! ```text
//! row 4 = ( (G - G'' + 2 omega0 - lambda)/F,
//!           (F' - F''' - 2 G')/F,
//!           (F + lambda - G - 3 F'')/F,
//!           -3 F'/F )
//! ```
//!
//! Solutions decaying at `-inf` (resp. `+inf`) span two-dimensional spaces;
//! their second exterior powers satisfy the lifted 6x6 system and are
//! integrated from the tails to the matching point `x = 0`, where the
//! exterior pairing produces the Evans determinant `D(lambda)`. The
//! companion structure makes the flat-state characteristic polynomial a
//! biquadratic, and the initial wedge depends only on the symmetric
//! functions (sum, product) of the two roots in each half plane, which keeps
//! contour evaluations continuous without branch matching.
//!
//! A 2x2 variant handles the local comparison operator
//! `Ltilde = L0 + 2 omega0 f`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::numerics::biquadratic::{biquadratic_roots, positive_pair_symmetric};
use crate::numerics::ode::integrate_final;
use crate::numerics::Tolerances;
use crate::operators::{coef_row, CoefRow, CoefficientField};
use crate::scalar::{as_f64, lit, Real};

/// The linearized eigenvalue system around one wave, ready for Evans
/// evaluations at a chosen truncation.
#[derive(Debug, Clone, Copy)]
pub struct EvansSystem<'a, S: Real> {
    pub field: &'a CoefficientField<S>,
    /// Half-length of the integration interval (tail formulas extend the
    /// profile smoothly, so this may exceed the grid truncation).
    pub l_trunc: S,
    /// Renormalization segments per half line.
    pub segments: usize,
}

impl<'a, S: Real> EvansSystem<'a, S> {
    pub fn new(field: &'a CoefficientField<S>) -> Self {
        EvansSystem {
            field,
            l_trunc: field.profile.l,
            segments: 4,
        }
    }

    pub fn with_truncation(field: &'a CoefficientField<S>, l_trunc: S) -> Self {
        EvansSystem {
            field,
            l_trunc,
            segments: 4,
        }
    }

    /// Companion row at a point, complexified for the spectral parameter.
    pub fn row4(&self, row: &CoefRow<S>, lambda: Complex<S>) -> [Complex<S>; 4] {
        row4_entries(row, self.field.omega0, lambda)
    }

    /// Full 4x4 system matrix at `x` (tests and diagnostics).
    pub fn a_matrix(&self, x: S, lambda: Complex<S>) -> [[Complex<S>; 4]; 4] {
        let row = self.field.row_at(x);
        companion(self.row4(&row, lambda))
    }

    /// Companion coefficients of the flat-state matrix: the characteristic
    /// polynomial is `mu^4 - a2 mu^2 - a0` with
    /// `a0 = (G_inf + 2 omega0 - lambda)/F_inf`,
    /// `a2 = (F_inf - G_inf + lambda)/F_inf`.
    ///
    /// Both are the `x -> inf` limits of the interior row-4 entries; the
    /// `flat_state` tests below pin this form against the eigenvalues
    /// `{±2, ±C(k)}` at `lambda = 0`.
    pub fn asymptotic_companion(&self, lambda: Complex<S>) -> (Complex<S>, Complex<S>) {
        asymptotic_companion(self.field, lambda)
    }
}

fn row4_entries<S: Real>(row: &CoefRow<S>, omega0: S, lambda: Complex<S>) -> [Complex<S>; 4] {
    let re = |x: S| Complex::new(x, S::zero());
    let two_w0 = lit::<S>(2.0) * omega0;
    let f = re(row.f);
    [
        (re(row.g - row.g2 + two_w0) - lambda) / f,
        re((row.f1 - row.f3 - lit::<S>(2.0) * row.g1) / row.f),
        (re(row.f - row.g - lit::<S>(3.0) * row.f2) + lambda) / f,
        re(-lit::<S>(3.0) * row.f1 / row.f),
    ]
}

fn asymptotic_companion<S: Real>(
    field: &CoefficientField<S>,
    lambda: Complex<S>,
) -> (Complex<S>, Complex<S>) {
    let re = |x: S| Complex::new(x, S::zero());
    let f_inf = re(field.f_inf);
    let a0 = (re(field.g_inf + lit::<S>(2.0) * field.omega0) - lambda) / f_inf;
    let a2 = (re(field.f_inf - field.g_inf) + lambda) / f_inf;
    (a2, a0)
}

fn companion<S: Real>(row4: [Complex<S>; 4]) -> [[Complex<S>; 4]; 4] {
    let z = Complex::new(S::zero(), S::zero());
    let one = Complex::new(S::one(), S::zero());
    let mut m = [[z; 4]; 4];
    m[0][1] = one;
    m[1][2] = one;
    m[2][3] = one;
    m[3] = row4;
    m
}

/// The asymptotic splitting off the essential spectrum: the four flat-state
/// roots (two per half plane) and the symmetric functions of the growing
/// pair.
#[derive(Debug, Clone)]
pub struct Splitting<S: Real> {
    /// Roots sorted by real part descending.
    pub roots: [Complex<S>; 4],
    /// Sum of the two roots with positive real part.
    pub s_plus: Complex<S>,
    /// Product of the two roots with positive real part.
    pub p_plus: Complex<S>,
}

/// Eigenvector of a companion matrix for eigenvalue `mu`.
pub fn vandermonde<S: Real>(mu: Complex<S>) -> [Complex<S>; 4] {
    [Complex::new(S::one(), S::zero()), mu, mu * mu, mu * mu * mu]
}

pub fn asymptotic_splitting<S: Real>(
    lambda: Complex<S>,
    field: &CoefficientField<S>,
) -> Result<Splitting<S>> {
    let (a2, a0) = asymptotic_companion(field, lambda);
    let roots = biquadratic_roots(a2, a0);
    match positive_pair_symmetric(a2, a0) {
        Some((s, p)) => Ok(Splitting {
            roots,
            s_plus: s,
            p_plus: p,
        }),
        None => Err(Error::EssentialSpectrum {
            re: as_f64(lambda.re),
            im: as_f64(lambda.im),
        }),
    }
}

/// Second exterior power of a 4x4 matrix on coordinates
/// `w_ij = u_i v_j - u_j v_i`, ordered `(12, 13, 14, 23, 24, 34)`.
/// Its eigenvalue on `v(mu_i) ^ v(mu_j)` is `mu_i + mu_j`.
pub fn compound_lift<S: Real>(m: &[[Complex<S>; 4]; 4]) -> [[Complex<S>; 6]; 6] {
    const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let z = Complex::new(S::zero(), S::zero());
    let mut out = [[z; 6]; 6];
    for (r, &(i, j)) in PAIRS.iter().enumerate() {
        for (s, &(k, l)) in PAIRS.iter().enumerate() {
            let mut acc = z;
            // (M w)_{ij} = sum_m (M_im w_mj + M_jm w_im), w antisymmetric
            for mi in 0..4 {
                if (mi, j) == (k, l) {
                    acc = acc + m[i][mi];
                } else if (j, mi) == (k, l) {
                    acc = acc - m[i][mi];
                }
                if (i, mi) == (k, l) {
                    acc = acc + m[j][mi];
                } else if (mi, i) == (k, l) {
                    acc = acc - m[j][mi];
                }
            }
            out[r][s] = acc;
        }
    }
    out
}

/// Wedge of the two Vandermonde eigenvectors with root sum `s` and product
/// `p`, divided by the constant factor `mu2 - mu1`:
/// `(1, s, s^2 - p, p, p s, p^2)`. Depends only on symmetric functions of
/// the pair, so it is continuous in `lambda` wherever the splitting
/// persists, and stays nonzero even for repeated roots.
fn symmetric_wedge<S: Real>(s: Complex<S>, p: Complex<S>) -> [Complex<S>; 6] {
    let one = Complex::new(S::one(), S::zero());
    [one, s, s * s - p, p, p * s, p * p]
}

/// One Evans evaluation. `|D(lambda)| = |value| * exp(renorm_log)`; the
/// phase of `value` is the determinant's phase in a truncation-independent
/// normalization (the analytic, nonvanishing tail-growth factor is stripped,
/// which changes neither zeros nor winding counts).
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct EvansEvaluation<S: Real> {
    pub lambda_re: S,
    pub lambda_im: S,
    pub value_re: S,
    pub value_im: S,
    pub renorm_log: S,
    pub ok: bool,
}

impl<S: Real> EvansEvaluation<S> {
    pub fn lambda(&self) -> Complex<S> {
        Complex::new(self.lambda_re, self.lambda_im)
    }

    pub fn value(&self) -> Complex<S> {
        Complex::new(self.value_re, self.value_im)
    }

    /// `ln |D(lambda)|` including all stripped factors.
    pub fn log_abs(&self) -> S {
        self.value().norm().ln() + self.renorm_log
    }

    /// Unit-modulus phase of the determinant.
    pub fn unit(&self) -> Complex<S> {
        let v = self.value();
        v / Complex::new(v.norm(), S::zero())
    }
}

const IM: usize = 6;

fn pack<S: Real>(w: &[Complex<S>; 6]) -> [S; 12] {
    let mut y = [S::zero(); 12];
    for i in 0..6 {
        y[i] = w[i].re;
        y[IM + i] = w[i].im;
    }
    y
}

fn unpack<S: Real>(y: &[S]) -> [Complex<S>; 6] {
    std::array::from_fn(|i| Complex::new(y[i], y[IM + i]))
}

fn wedge_norm<S: Real>(w: &[Complex<S>; 6]) -> S {
    w.iter().fold(S::zero(), |acc, c| acc + c.norm_sqr()).sqrt()
}

/// Exterior pairing of the half-line wedges at the matching point: the
/// coefficient of the full 4-form.
fn pairing<S: Real>(wp: &[Complex<S>; 6], wm: &[Complex<S>; 6]) -> Complex<S> {
    wp[0] * wm[5] - wp[1] * wm[4] + wp[2] * wm[3] + wp[3] * wm[2] - wp[4] * wm[1] + wp[5] * wm[0]
}

/// Integrate one half line of the lifted system with the growth rate of the
/// tracked wedge removed, renormalizing between segments. `sign = +1` runs
/// from `-L` to `0`, `sign = -1` from `+L` down to `0`. Returns the wedge at
/// the matching point and the log of all positive factors stripped along
/// the way.
fn integrate_half_line<S: Real>(
    sys: &EvansSystem<S>,
    lambda: Complex<S>,
    growth: Complex<S>,
    wedge0: [Complex<S>; 6],
    sign: S,
    tol: &Tolerances<S>,
) -> Result<([Complex<S>; 6], S)> {
    let field = sys.field;
    let p = *field.params();
    let (a, c) = (p.a, p.c);
    let omega0 = field.omega0;
    let omega1 = field.omega1;

    // the profile enters through its dense representation (analytic tail
    // beyond the shot), keeping both half lines exactly even in x
    let rhs = move |x: S, y: &[S], dy: &mut [S]| {
        let (phi, dphi) = field.profile.phi_dphi_at(x);
        let row = coef_row(phi, dphi, a, c, omega1);
        let lifted = compound_lift(&companion(row4_entries(&row, omega0, lambda)));
        let w = unpack(y);
        for i in 0..6 {
            let mut acc = -growth * w[i];
            for j in 0..6 {
                acc = acc + lifted[i][j] * w[j];
            }
            dy[i] = acc.re;
            dy[IM + i] = acc.im;
        }
    };

    let x_start = -sign * sys.l_trunc;
    let mut y: Vec<S> = pack(&wedge0).to_vec();
    let mut log_stripped = S::zero();
    let n_seg = sys.segments.max(1);
    for seg in 0..n_seg {
        let t0 = x_start * (S::one() - lit::<S>(seg as f64) / lit(n_seg as f64));
        let t1 = x_start * (S::one() - lit::<S>((seg + 1) as f64) / lit(n_seg as f64));
        y = integrate_final(&rhs, &y, t0, t1, tol)?;
        let w = unpack(&y);
        let r = wedge_norm(&w);
        if !(r > S::zero()) || !r.is_finite() {
            return Err(Error::Winding(format!(
                "wedge norm degenerated to {} on segment {seg}",
                as_f64(r)
            )));
        }
        for i in 0..6 {
            y[i] = y[i] / r;
            y[IM + i] = y[IM + i] / r;
        }
        log_stripped = log_stripped + r.ln();
    }
    Ok((unpack(&y), log_stripped))
}

/// Evaluate the Evans function of the fourth-order system at `lambda`,
/// which must lie off the essential spectrum `[sigma0, inf)`.
pub fn evans_eval<S: Real>(
    lambda: Complex<S>,
    sys: &EvansSystem<S>,
    tol: &Tolerances<S>,
) -> Result<EvansEvaluation<S>> {
    let split = asymptotic_splitting(lambda, sys.field)?;
    let (s, p) = (split.s_plus, split.p_plus);
    let l = sys.l_trunc;

    // the decaying pair at -inf is the growing one, {mu1+, mu2+}; at +inf it
    // is {-mu1+, -mu2+} with sum -s and the same product
    let wedge_plus = symmetric_wedge(s, p);
    let wedge_minus = symmetric_wedge(-s, p);
    let n0 = wedge_norm(&wedge_plus);
    let scaled_plus = wedge_plus.map(|cc| cc / n0);
    let scaled_minus = wedge_minus.map(|cc| cc / n0);

    let (wp, log_p) = integrate_half_line(sys, lambda, s, scaled_plus, S::one(), tol)?;
    let (wm, log_m) = integrate_half_line(sys, lambda, -s, scaled_minus, -S::one(), tol)?;

    // the stripped growth factor exp(2 s L) is analytic and nonvanishing, so
    // dropping it entirely leaves windings and zero locations untouched and
    // makes the reported value's phase independent of the truncation
    let value = pairing(&wp, &wm);
    let renorm_log = lit::<S>(2.0) * l * s.re + log_p + log_m + lit::<S>(2.0) * n0.ln();

    Ok(EvansEvaluation {
        lambda_re: lambda.re,
        lambda_im: lambda.im,
        value_re: value.re,
        value_im: value.im,
        renorm_log,
        ok: value.re.is_finite() && value.im.is_finite() && renorm_log.is_finite(),
    })
}

/// Evaluate the 2x2 Evans function of the comparison operator
/// `Ltilde = L0 + 2 omega0 f` at `lambda`, off its essential spectrum
/// `[sigma0/4, inf)`. The flat-state decay rate is
/// `nu = sqrt((sigma0/4 - lambda) k^{8/3} / 2)`.
pub fn evans_eval_sl<S: Real>(
    lambda: Complex<S>,
    field: &CoefficientField<S>,
    l_trunc: S,
    tol: &Tolerances<S>,
) -> Result<EvansEvaluation<S>> {
    let p = *field.params();
    let (a, c, k) = (p.a, p.c, p.k);
    let omega0 = field.omega0;
    let omega1 = field.omega1;
    let edge = field.sigma0 / lit(4.0);

    let k83 = k.powf(lit(8.0 / 3.0));
    let nu = ((Complex::new(edge, S::zero()) - lambda) * (k83 * lit::<S>(0.5))).sqrt();
    if !(nu.re > lit(1e-12)) {
        return Err(Error::EssentialSpectrum {
            re: as_f64(lambda.re),
            im: as_f64(lambda.im),
        });
    }

    let make_rhs = |growth: Complex<S>| {
        move |x: S, y: &[S], dy: &mut [S]| {
            let (phi, dphi) = field.profile.phi_dphi_at(x);
            let row = coef_row(phi, dphi, a, c, omega1);
            let v = Complex::new(y[0], y[2]);
            let w = Complex::new(y[1], y[3]);
            let dv = w - growth * v;
            let gv = (lambda - Complex::new(row.g + lit::<S>(2.0) * omega0 * row.fw, S::zero())) * v;
            let dw = (gv - w * row.f1) / row.f - growth * w;
            dy[0] = dv.re;
            dy[2] = dv.im;
            dy[1] = dw.re;
            dy[3] = dw.im;
        }
    };

    let n0 = (S::one() + nu.norm_sqr()).sqrt();
    let mut ends = [[Complex::new(S::zero(), S::zero()); 2]; 2];
    let mut log_stripped = S::zero();
    for (idx, sign) in [S::one(), -S::one()].into_iter().enumerate() {
        let x_start = -sign * l_trunc;
        let dir = if sign > S::zero() { nu } else { -nu };
        let mut y = vec![S::one() / n0, dir.re / n0, S::zero(), dir.im / n0];
        let rhs = make_rhs(dir);
        let n_seg = 4;
        for seg in 0..n_seg {
            let t0 = x_start * (S::one() - lit::<S>(seg as f64) / lit(n_seg as f64));
            let t1 = x_start * (S::one() - lit::<S>((seg + 1) as f64) / lit(n_seg as f64));
            y = integrate_final(&rhs, &y, t0, t1, tol)?;
            let v = Complex::new(y[0], y[2]);
            let w = Complex::new(y[1], y[3]);
            let r = (v.norm_sqr() + w.norm_sqr()).sqrt();
            if !(r > S::zero()) || !r.is_finite() {
                return Err(Error::Winding(format!(
                    "solution norm degenerated to {} on segment {seg}",
                    as_f64(r)
                )));
            }
            for yi in y.iter_mut().take(4) {
                *yi = *yi / r;
            }
            log_stripped = log_stripped + r.ln();
        }
        ends[idx] = [Complex::new(y[0], y[2]), Complex::new(y[1], y[3])];
    }

    // as in the fourth-order case, the growth factor exp(2 nu L) is dropped
    let value = ends[0][0] * ends[1][1] - ends[0][1] * ends[1][0];
    let renorm_log = lit::<S>(2.0) * l_trunc * nu.re + log_stripped + lit::<S>(2.0) * n0.ln();

    Ok(EvansEvaluation {
        lambda_re: lambda.re,
        lambda_im: lambda.im,
        value_re: value.re,
        value_im: value.im,
        renorm_log,
        ok: value.re.is_finite() && value.im.is_finite() && renorm_log.is_finite(),
    })
}

/// CSV export of Evans evaluations:
/// `Re lambda, Im lambda, Re D, Im D, renorm_log`.
pub fn write_evaluations_csv<S: Real, W: std::io::Write>(
    evals: &[EvansEvaluation<S>],
    w: &mut W,
) -> Result<()> {
    writeln!(w, "re_lambda,im_lambda,re_d,im_d,renorm_log")?;
    for e in evals {
        writeln!(
            w,
            "{},{},{},{},{}",
            crate::fmt_e(as_f64(e.lambda_re)),
            crate::fmt_e(as_f64(e.lambda_im)),
            crate::fmt_e(as_f64(e.value_re)),
            crate::fmt_e(as_f64(e.value_im)),
            crate::fmt_e(as_f64(e.renorm_log)),
        )?;
    }
    Ok(())
}
