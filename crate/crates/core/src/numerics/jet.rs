//! Truncated Taylor-series ("jet") arithmetic.
//!
//! A `Jet<S, N>` holds Taylor coefficients `c[i] = f^(i)(x0) / i!` of a
//! scalar function at a point. Arithmetic propagates coefficients through
//! sums, products, quotients and real powers, which is how the wave code
//! obtains closed-form derivatives of the momentum density and of the
//! linearized-operator coefficients without any grid differencing.

use crate::scalar::{int, lit, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet<S, const N: usize> {
    pub c: [S; N],
}

impl<S: Real, const N: usize> Jet<S, N> {
    pub fn constant(v: S) -> Self {
        let mut c = [S::zero(); N];
        c[0] = v;
        Jet { c }
    }

    /// The identity jet `x0 + t`.
    pub fn variable(v: S) -> Self {
        let mut c = [S::zero(); N];
        c[0] = v;
        if N > 1 {
            c[1] = S::one();
        }
        Jet { c }
    }

    pub fn value(&self) -> S {
        self.c[0]
    }

    /// n-th derivative: `c[n] * n!`.
    pub fn derivative(&self, n: usize) -> S {
        let mut fact = S::one();
        for i in 2..=n {
            fact = fact * int(i as i64);
        }
        self.c[n] * fact
    }

    /// Jet of the derivative function f', truncated one order lower.
    pub fn differentiate(&self) -> Self {
        let mut c = [S::zero(); N];
        for i in 1..N {
            c[i - 1] = self.c[i] * int(i as i64);
        }
        Jet { c }
    }

    pub fn scale(&self, s: S) -> Self {
        let mut c = self.c;
        for ci in &mut c {
            *ci = *ci * s;
        }
        Jet { c }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut c = self.c;
        for i in 0..N {
            c[i] = c[i] + other.c[i];
        }
        Jet { c }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut c = self.c;
        for i in 0..N {
            c[i] = c[i] - other.c[i];
        }
        Jet { c }
    }

    pub fn add_scalar(&self, s: S) -> Self {
        let mut c = self.c;
        c[0] = c[0] + s;
        Jet { c }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut c = [S::zero(); N];
        for i in 0..N {
            for j in 0..N - i {
                c[i + j] = c[i + j] + self.c[i] * other.c[j];
            }
        }
        Jet { c }
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    /// Real power `u^alpha`; requires `u(x0) > 0`.
    pub fn powf(&self, alpha: S) -> Self {
        let u0 = self.c[0];
        debug_assert!(u0 > S::zero(), "jet powf needs a positive leading value");
        let mut p = [S::zero(); N];
        p[0] = u0.powf(alpha);
        for n in 1..N {
            // n * u0 * p_n = sum_{m=1..n} (alpha*m - (n-m)) * u_m * p_{n-m}
            let mut acc = S::zero();
            for m in 1..=n {
                let w = alpha * int(m as i64) - int((n - m) as i64);
                acc = acc + w * self.c[m] * p[n - m];
            }
            p[n] = acc / (int::<S>(n as i64) * u0);
        }
        Jet { c: p }
    }

    pub fn recip(&self) -> Self {
        self.powf(-S::one())
    }
}

/// Jet of the wave profile `phi` at a point, built from `(phi, phi')` by
/// recursively applying the profile equation
/// `phi'' = phi - a (c - phi^2)^{-3/2}`.
pub fn profile_jet<S: Real, const N: usize>(phi: S, dphi: S, a: S, c: S) -> Jet<S, N> {
    let mut f = Jet::<S, N>::constant(phi);
    if N > 1 {
        f.c[1] = dphi;
    }
    // each pass fixes one more coefficient: c[n+2] from the rhs at order n
    for n in 0..N.saturating_sub(2) {
        let w = Jet::<S, N>::constant(c).sub(&f.square());
        let rhs = f.sub(&w.powf(lit(-1.5)).scale(a));
        let np1 = int::<S>((n + 1) as i64);
        let np2 = int::<S>((n + 2) as i64);
        f.c[n + 2] = rhs.c[n] / (np1 * np2);
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powf_matches_binomial_series() {
        // (1 + t)^alpha around t=0: coefficients C(alpha, n)
        let alpha = 1.7f64;
        let u = Jet::<f64, 5>::variable(1.0);
        let p = u.powf(alpha);
        let mut binom = 1.0;
        for n in 0..5 {
            if n > 0 {
                binom *= (alpha - (n as f64 - 1.0)) / n as f64;
            }
            assert!(
                (p.c[n] - binom).abs() < 1e-14,
                "n={n}: {} vs {binom}",
                p.c[n]
            );
        }
    }

    #[test]
    fn product_rule() {
        // (x^2)(x^3) = x^5 truncated to order 5: coefficient of t^5 at x0=1
        let x = Jet::<f64, 6>::variable(2.0);
        let lhs = x.square().mul(&x.square().mul(&x));
        let rhs = x.powf(5.0);
        for n in 0..6 {
            assert!((lhs.c[n] - rhs.c[n]).abs() < 1e-10, "n={n}");
        }
    }

    #[test]
    fn sqrt_derivatives() {
        // d/dt sqrt(4 + t) at 0: 1/4; second: -1/32 (coefficient -1/64)
        let u = Jet::<f64, 3>::variable(4.0);
        let s = u.powf(0.5);
        assert!((s.c[0] - 2.0).abs() < 1e-15);
        assert!((s.derivative(1) - 0.25).abs() < 1e-15);
        assert!((s.derivative(2) + 1.0 / 32.0).abs() < 1e-15);
    }

    #[test]
    fn profile_jet_satisfies_the_ode() {
        let (a, c) = (0.1623797632095823f64, 1.0);
        let (phi, dphi) = (0.5, -0.2);
        let f: Jet<f64, 7> = profile_jet(phi, dphi, a, c);
        // phi'' must equal phi - a (c - phi^2)^{-3/2} as functions (all orders)
        let w = Jet::<f64, 7>::constant(c).sub(&f.square());
        let rhs = f.sub(&w.powf(-1.5).scale(a));
        let d2 = f.differentiate().differentiate();
        for n in 0..5 {
            assert!(
                (d2.c[n] - rhs.c[n]).abs() < 1e-12 * (1.0 + rhs.c[n].abs()),
                "order {n}: {} vs {}",
                d2.c[n],
                rhs.c[n]
            );
        }
    }

    #[test]
    fn profile_jet_matches_finite_differences() {
        // compare third derivative against central differences of the
        // first derivative of the jet rebuilt at shifted points
        let (a, c) = (0.1623797632095823f64, 1.0);
        let (phi0, dphi0) = (0.7, -0.15);
        let f: Jet<f64, 6> = profile_jet(phi0, dphi0, a, c);
        let h = 1e-5;
        // advance (phi, dphi) to +-h by evaluating the jet itself
        let eval = |j: &Jet<f64, 6>, t: f64| {
            let mut v = 0.0;
            for n in (0..6).rev() {
                v = v * t + j.c[n];
            }
            v
        };
        let phi_p = eval(&f, h);
        let phi_m = eval(&f, -h);
        let d2_fd = (phi_p - 2.0 * phi0 + phi_m) / (h * h);
        assert!((d2_fd - f.derivative(2)).abs() < 1e-5);
    }
}
