//! The one-parameter family of smooth solitary waves.
//!
//! For a fixed speed `c > 0` and integration constant `0 < a < 3√3 c²/16`,
//! the traveling profile solves
//!
//! ```text
//! phi - phi'' = a / (c - phi^2)^{3/2},      (1/2) phi'^2 = E - V(phi),
//! V(phi) = -phi^2/2 + a phi / (c sqrt(c - phi^2)),
//! ```
//!
//! a homoclinic loop of the planar system at the saddle `(k, 0)`. Profiles
//! are produced by shooting along the unstable direction `(1, C(k))` and
//! reflected evenly about the crest; the momentum density
//! `mu = a (c - phi^2)^{-3/2}` and its derivatives come from jet arithmetic,
//! never from grid differencing.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::jet::{profile_jet, Jet};
use crate::numerics::ode::{integrate_ode_until, OdeSolution};
use crate::numerics::quad::{quad_singular, QuadMode};
use crate::numerics::root::{find_root, find_root_newton};
use crate::numerics::Tolerances;
use crate::scalar::{as_f64, lit, Real};

/// Admissible wave parameters and the phase-plane landmarks derived from
/// them.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct WaveParams<S: Real> {
    /// Wave speed.
    pub c: S,
    /// Integration constant of the profile equation.
    pub a: S,
    /// Asymptotic endstate; `phi -> k` at spatial infinity.
    pub k: S,
    /// Energy level of the homoclinic orbit.
    pub energy: S,
    /// Saddle abscissa (equals `k`).
    pub phi_minus: S,
    /// Center abscissa, the second root of `a = phi (c - phi^2)^{3/2}`.
    pub phi_plus: S,
    /// Crest value, the turning point `E = V(phi_max)`.
    pub phi_max: S,
    /// `C(k) = sqrt((c - 4k^2)/(c - k^2))`, the saddle's unstable rate.
    pub decay_rate: S,
}

/// Largest admissible integration constant, `3 sqrt(3) c^2 / 16`.
pub fn a_max<S: Real>(c: S) -> S {
    lit::<S>(3.0) * lit::<S>(3.0).sqrt() * c * c / lit::<S>(16.0)
}

/// `a(k) = k (c - k^2)^{3/2}` on the solitary-wave family.
pub fn a_of_k<S: Real>(k: S, c: S) -> S {
    k * (c - k * k).powf(lit(1.5))
}

/// The potential `V(phi; a, c) = -phi^2/2 + a phi / (c sqrt(c - phi^2))`.
pub fn potential<S: Real>(phi: S, a: S, c: S) -> Result<S> {
    if phi * phi >= c {
        return Err(Error::Parameter(format!(
            "potential undefined at phi = {} (phi^2 >= c)",
            as_f64(phi)
        )));
    }
    Ok(-phi * phi * lit::<S>(0.5) + a * phi / (c * (c - phi * phi).sqrt()))
}

/// `V'(phi; a, c)`; vanishes exactly where `a = phi (c - phi^2)^{3/2}`.
pub fn dpotential<S: Real>(phi: S, a: S, c: S) -> Result<S> {
    if phi * phi >= c {
        return Err(Error::Parameter(format!(
            "potential undefined at phi = {} (phi^2 >= c)",
            as_f64(phi)
        )));
    }
    let w = c - phi * phi;
    Ok(-phi + a / (c * w.sqrt()) + a * phi * phi / (c * w.powf(lit(1.5))))
}

impl<S: Real> WaveParams<S> {
    /// Build the parameter bundle from the endstate `k`.
    pub fn from_k(k: S, c: S, tol: &Tolerances<S>) -> Result<Self> {
        if !(c > S::zero()) {
            return Err(Error::Parameter(format!("wave speed c = {} <= 0", as_f64(c))));
        }
        let half_sqrt_c = c.sqrt() * lit::<S>(0.5);
        if !(k > S::zero() && k < half_sqrt_c) {
            return Err(Error::Parameter(format!(
                "endstate k = {} outside (0, sqrt(c)/2 = {})",
                as_f64(k),
                as_f64(half_sqrt_c)
            )));
        }
        let a = a_of_k(k, c);
        let energy = k * k * (c - lit::<S>(2.0) * k * k) / (lit::<S>(2.0) * c);
        let decay_rate =
            ((c - lit::<S>(4.0) * k * k) / (c - k * k)).sqrt();

        // second root of a - phi (c - phi^2)^{3/2} on (sqrt(c)/2, sqrt(c))
        let d = |p: S| a - p * (c - p * p).powf(lit(1.5));
        let dd = |p: S| {
            let w = c - p * p;
            -w.powf(lit(1.5)) + lit::<S>(3.0) * p * p * w.sqrt()
        };
        let sc = c.sqrt();
        let phi_plus = find_root_newton(
            d,
            dd,
            half_sqrt_c * (S::one() + lit(1e-12)),
            sc * (S::one() - lit(1e-13)),
            tol.root_tol,
        )?;

        // crest: E - V(phi) = 0 on (phi_plus, sqrt(c))
        let ev = |p: S| energy - potential(p, a, c).unwrap();
        let dev = |p: S| -dpotential(p, a, c).unwrap();
        let phi_max = find_root_newton(
            ev,
            dev,
            phi_plus * (S::one() + lit(1e-12)),
            sc * (S::one() - lit(1e-13)),
            tol.root_tol,
        )?;

        Ok(WaveParams {
            c,
            a,
            k,
            energy,
            phi_minus: k,
            phi_plus,
            phi_max,
            decay_rate,
        })
    }

    /// Build the parameter bundle from the integration constant `a`.
    pub fn from_a(a: S, c: S, tol: &Tolerances<S>) -> Result<Self> {
        let k = k_from_a(a, c, tol)?;
        Self::from_k(k, c, tol)
    }
}

/// Invert `a(k)` on `(0, sqrt(c)/2)` — the smaller of the two roots.
pub fn k_from_a<S: Real>(a: S, c: S, tol: &Tolerances<S>) -> Result<S> {
    if !(c > S::zero()) {
        return Err(Error::Parameter(format!("wave speed c = {} <= 0", as_f64(c))));
    }
    if !(a > S::zero() && a < a_max(c)) {
        return Err(Error::Parameter(format!(
            "integration constant a = {} outside (0, {})",
            as_f64(a),
            as_f64(a_max(c))
        )));
    }
    let half = c.sqrt() * lit::<S>(0.5);
    // da/dk = (c - k^2)^{1/2} (c - 4 k^2), positive on (0, sqrt(c)/2)
    find_root_newton(
        |k: S| a_of_k(k, c) - a,
        |k: S| (c - k * k).sqrt() * (c - lit::<S>(4.0) * k * k),
        half * lit(1e-14),
        half * (S::one() - lit(1e-14)),
        tol.root_tol * lit(1e-3),
    )
}

/// Grid/truncation controls for [`shoot_profile`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GridSpec<S: Real> {
    /// Lower bound for the half-length `L`.
    pub l_min: S,
    /// Grid points per half interval; spacing is `L / points_per_half`.
    pub points_per_half: usize,
    /// Unstable-direction offset at the start of the shot, relative to
    /// `sqrt(c)`.
    pub offset_rel: S,
    /// Target for `|phi(±L) - k|`, relative to `sqrt(c)`.
    pub tail_rel: S,
}

impl<S: Real> Default for GridSpec<S> {
    fn default() -> Self {
        GridSpec {
            l_min: lit(25.0),
            points_per_half: 4096,
            offset_rel: lit(1e-8),
            tail_rel: lit(1e-11),
        }
    }
}

/// A grid-sampled solitary wave together with the dense shot that produced
/// it. Immutable after construction.
#[derive(Debug, Clone)]
pub struct WaveProfile<S: Real> {
    pub params: WaveParams<S>,
    /// Truncation half-length; the grid spans `[-L, L]`.
    pub l: S,
    pub x: Vec<S>,
    pub phi: Vec<S>,
    pub dphi: Vec<S>,
    pub mu0: Vec<S>,
    pub mu1: Vec<S>,
    pub mu2: Vec<S>,
    pub mu3: Vec<S>,
    pub mu4: Vec<S>,
    /// Dense trajectory of the shot, covering `[0, crest_x]` in shot time.
    shot: OdeSolution<S>,
    /// Distance from the offset point to the crest.
    crest_x: S,
    /// Offset at the start of the shot.
    eps0: S,
    tolerances: Tolerances<S>,
}

/// Right-hand side of the planar profile system.
fn profile_rhs<S: Real>(a: S, c: S) -> impl Fn(S, &[S], &mut [S]) {
    move |_x, u: &[S], du: &mut [S]| {
        du[0] = u[1];
        du[1] = u[0] - a * (c - u[0] * u[0]).powf(lit(-1.5));
    }
}

/// Construct the wave by shooting from the unstable direction of the saddle.
pub fn shoot_profile<S: Real>(
    params: &WaveParams<S>,
    grid: &GridSpec<S>,
    tol: &Tolerances<S>,
) -> Result<WaveProfile<S>> {
    let (a, c, k) = (params.a, params.c, params.k);
    let rate = params.decay_rate;
    let eps0 = grid.offset_rel * c.sqrt();

    // generous span: tail travel plus core width
    let amp = params.phi_max - k;
    let x_max = (amp / eps0).ln() / rate + lit(40.0);
    let y0 = [k + eps0, eps0 * rate];
    // ride the unstable manifold until the first turning point
    let shot = integrate_ode_until(
        profile_rhs(a, c),
        &y0,
        S::zero(),
        x_max,
        tol,
        |_x, y: &[S]| y[1] <= S::zero(),
    )
    .map_err(|e| Error::Shooting(format!("unstable-manifold shot failed: {e}")))?;

    if shot.final_state()[1] > S::zero() {
        return Err(Error::Shooting(
            "no turning point reached; parameters too close to the boundary?".into(),
        ));
    }
    let xs = shot.step_xs();
    let bhi = *xs.last().expect("at least one step");
    let blo = if xs.len() >= 2 { xs[xs.len() - 2] } else { S::zero() };
    let crest_x = if shot.eval_vec(bhi)[1] == S::zero() {
        bhi
    } else {
        find_root(|x| shot.eval_vec(x)[1], blo, bhi, lit(1e-15))?
    };

    let crest = shot.eval_vec(crest_x);
    if crest[0] * crest[0] >= c {
        return Err(Error::Shooting(format!(
            "trajectory left the admissible strip: phi = {}",
            as_f64(crest[0])
        )));
    }

    // truncation guaranteeing |phi(±L) - k| <= tail_rel sqrt(c)
    let l = grid
        .l_min
        .max(crest_x + (grid.offset_rel / grid.tail_rel).ln() / rate);

    let mut profile = WaveProfile {
        params: *params,
        l,
        x: Vec::new(),
        phi: Vec::new(),
        dphi: Vec::new(),
        mu0: Vec::new(),
        mu1: Vec::new(),
        mu2: Vec::new(),
        mu3: Vec::new(),
        mu4: Vec::new(),
        shot,
        crest_x,
        eps0,
        tolerances: *tol,
    };

    let n = grid.points_per_half;
    let h = l / lit(n as f64);
    let total = 2 * n + 1;
    profile.x.reserve(total);
    for i in 0..total {
        let x = (lit::<S>(i as f64) - lit(n as f64)) * h;
        profile.x.push(x);
    }
    for i in 0..total {
        let (p, dp) = profile.phi_dphi_at(profile.x[i]);
        let d = derivatives_closed_form(p, dp, params);
        profile.phi.push(p);
        profile.dphi.push(dp);
        profile.mu0.push(d[0]);
        profile.mu1.push(d[1]);
        profile.mu2.push(d[2]);
        profile.mu3.push(d[3]);
        profile.mu4.push(d[4]);
    }
    Ok(profile)
}

impl<S: Real> WaveProfile<S> {
    /// `(phi, phi')` anywhere on `[-L, L]` (and beyond, via the tail law).
    /// Even reflection about the crest is exact by construction.
    pub fn phi_dphi_at(&self, x: S) -> (S, S) {
        let t = x.abs();
        let k = self.params.k;
        let rate = self.params.decay_rate;
        // shot time runs from the offset point (crest at self.crest_x)
        let shot_t = self.crest_x - t;
        let (p, mut dp) = if shot_t < S::zero() {
            let eps = self.eps0 * (rate * shot_t).exp();
            (k + eps, -rate * eps)
        } else {
            let u = self.shot.eval_vec(shot_t);
            (u[0], -u[1])
        };
        if x < S::zero() {
            dp = -dp;
        } else if x == S::zero() {
            dp = S::zero();
        }
        (p, dp)
    }

    pub fn grid_len(&self) -> usize {
        self.x.len()
    }

    pub fn grid_step(&self) -> S {
        self.x[1] - self.x[0]
    }

    pub fn tolerances(&self) -> &Tolerances<S> {
        &self.tolerances
    }

    /// Header describing the profile for serialized output.
    pub fn header(&self) -> ProfileHeader<S> {
        ProfileHeader {
            params: self.params,
            l: self.l,
            grid_points: self.x.len(),
            grid_step: self.grid_step(),
            tolerances: self.tolerances,
        }
    }

    /// CSV table `x, phi, dphi, mu0..mu4` with a resolved-configuration
    /// comment header.
    pub fn write_csv<W: std::io::Write>(&self, w: &mut W) -> Result<()> {
        writeln!(
            w,
            "# wave profile: c={} a={} k={} L={} n={}",
            as_f64(self.params.c),
            as_f64(self.params.a),
            as_f64(self.params.k),
            as_f64(self.l),
            self.x.len()
        )?;
        let t = &self.tolerances;
        writeln!(
            w,
            "# tolerances: ode_rel={} ode_abs={} root_tol={} quad_tol={}",
            as_f64(t.ode_rel),
            as_f64(t.ode_abs),
            as_f64(t.root_tol),
            as_f64(t.quad_tol)
        )?;
        writeln!(w, "x,phi,dphi,mu0,mu1,mu2,mu3,mu4")?;
        let e = |v: S| crate::fmt_e(as_f64(v));
        for i in 0..self.x.len() {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                e(self.x[i]),
                e(self.phi[i]),
                e(self.dphi[i]),
                e(self.mu0[i]),
                e(self.mu1[i]),
                e(self.mu2[i]),
                e(self.mu3[i]),
                e(self.mu4[i])
            )?;
        }
        Ok(())
    }
}

/// Serializable profile header (parameters, truncation, grid info).
#[derive(Debug, Clone, Serialize)]
pub struct ProfileHeader<S: Real> {
    pub params: WaveParams<S>,
    pub l: S,
    pub grid_points: usize,
    pub grid_step: S,
    pub tolerances: Tolerances<S>,
}

/// The quadrature inverse `x(phi)` on the right half line:
/// `x = ∫_phi^{phi_max} d xi / sqrt(2 (E - V(xi)))`.
pub fn x_of_phi<S: Real>(params: &WaveParams<S>, phi: S, tol: &Tolerances<S>) -> Result<S> {
    if !(phi > params.k && phi < params.phi_max) {
        return Err(Error::Parameter(format!(
            "phi = {} outside (k, phi_max) = ({}, {})",
            as_f64(phi),
            as_f64(params.k),
            as_f64(params.phi_max)
        )));
    }
    if phi == params.phi_max {
        return Ok(S::zero());
    }
    let (a, c, energy) = (params.a, params.c, params.energy);
    quad_singular(
        |xi: S| {
            let v = potential(xi, a, c).unwrap();
            (lit::<S>(2.0) * (energy - v)).sqrt().recip()
        },
        phi,
        params.phi_max,
        QuadMode::SqrtUpper,
        tol.quad_tol,
    )
}

/// Momentum density `mu = a (c - phi^2)^{-3/2}` and its first four
/// derivatives, closed-form from `(phi, phi')` through the profile equation.
pub fn derivatives_closed_form<S: Real>(phi: S, dphi: S, params: &WaveParams<S>) -> [S; 5] {
    let f: Jet<S, 5> = profile_jet(phi, dphi, params.a, params.c);
    let w = Jet::<S, 5>::constant(params.c).sub(&f.square());
    let mu = w.powf(lit(-1.5)).scale(params.a);
    [
        mu.derivative(0),
        mu.derivative(1),
        mu.derivative(2),
        mu.derivative(3),
        mu.derivative(4),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    const REF_A: f64 = 0.16237976320958225; // 3 sqrt(3) / 32
    const REF_K: f64 = 0.16965101487305628; // endstate of the reference wave

    fn tol() -> Tolerances<f64> {
        Tolerances::default()
    }

    #[test]
    fn boundary_endstate_rejected() {
        assert!(WaveParams::from_k(0.5, 1.0, &tol()).is_err());
        assert!(WaveParams::from_k(0.0, 1.0, &tol()).is_err());
        assert!(WaveParams::from_k(-0.1, 1.0, &tol()).is_err());
        // supremum of a(k) sits at k = sqrt(c)/2
        let a_near: f64 = a_of_k(0.5 - 1e-9, 1.0);
        assert!((a_near - a_max(1.0)).abs() < 1e-8);
    }

    #[test]
    fn reference_wave_constants() {
        let p = WaveParams::from_k(REF_K, 1.0, &tol()).unwrap();
        assert!((p.a - REF_A).abs() < 1e-12);
        assert!((p.decay_rate - 0.9545139265563596).abs() < 1e-12);
        // E at k = 0.25: k^2 (1 - 2k^2)/2
        let q = WaveParams::from_k(0.25, 1.0, &tol()).unwrap();
        assert!((q.energy - 0.02734375).abs() < 1e-15);
    }

    #[test]
    fn k_from_a_roundtrip_and_limits() {
        let t = tol();
        for k in [0.1, 0.2, 0.3, 0.4] {
            let p = WaveParams::from_k(k, 1.0, &t).unwrap();
            let back = k_from_a(p.a, 1.0, &t).unwrap();
            assert!((back - k).abs() < 1e-10, "k={k} back={back}");
        }
        // peakon limit: a -> 0+ gives k -> 0+
        let small = k_from_a(1e-8, 1.0, &t).unwrap();
        assert!(small > 0.0 && small < 1e-6);
        assert!(k_from_a(0.9, 1.0, &t).is_err());
        assert!(k_from_a(-0.1, 1.0, &t).is_err());
    }

    #[test]
    fn potential_critical_points() {
        let t = tol();
        let p = WaveParams::from_a(REF_A, 1.0, &t).unwrap();
        assert_eq!(potential(0.0, p.a, p.c).unwrap(), 0.0);
        assert!(dpotential(p.phi_minus, p.a, p.c).unwrap().abs() < 1e-10);
        assert!(dpotential(p.phi_plus, p.a, p.c).unwrap().abs() < 1e-10);
        let res = p.energy - potential(p.phi_max, p.a, p.c).unwrap();
        assert!(res.abs() < 1e-12, "E - V(phi_max) = {res}");
        assert!(potential(1.1, p.a, p.c).is_err());
        // ordering k < sqrt(c)/2 < phi_plus < phi_max < sqrt(c)
        assert!(p.k < 0.5 && 0.5 < p.phi_plus && p.phi_plus < p.phi_max && p.phi_max < 1.0);
    }

    fn reference_profile() -> WaveProfile<f64> {
        let t = tol();
        let p = WaveParams::from_a(REF_A, 1.0, &t).unwrap();
        shoot_profile(&p, &GridSpec::default(), &t).unwrap()
    }

    #[test]
    fn shot_lands_on_crest_and_tails() {
        let w = reference_profile();
        let p = &w.params;
        let n = w.x.len() / 2;
        assert_eq!(w.x[n], 0.0);
        assert!((w.phi[n] - p.phi_max).abs() < 1e-8, "crest {}", w.phi[n]);
        assert_eq!(w.dphi[n], 0.0);
        let tail = (w.phi[0] - p.k).abs();
        assert!(tail < 1e-10 * p.c.sqrt(), "tail {tail}");
        assert!((w.phi[w.x.len() - 1] - p.k).abs() < 1e-10);
    }

    #[test]
    fn energy_is_conserved_on_the_grid() {
        let w = reference_profile();
        let p = &w.params;
        for i in 0..w.x.len() {
            let res = 0.5 * w.dphi[i] * w.dphi[i] - p.energy
                + potential(w.phi[i], p.a, p.c).unwrap();
            assert!(res.abs() < 1e-8, "x={} residual={res}", w.x[i]);
        }
    }

    #[test]
    fn profile_is_even_monotone_and_admissible() {
        let w = reference_profile();
        let p = &w.params;
        let m = w.x.len();
        let n = m / 2;
        for i in 0..m {
            assert!((w.phi[i] - w.phi[m - 1 - i]).abs() < 1e-12, "evenness at {i}");
            assert!(w.phi[i] * w.phi[i] < p.c);
            assert!(w.phi[i] > p.k - 1e-12);
            assert!(w.mu0[i] > 0.0);
        }
        for i in n..m - 1 {
            assert!(w.phi[i + 1] < w.phi[i], "monotone decrease at {i}");
        }
        // mu touches k only asymptotically
        assert!(w.mu0[0] - p.k < 1e-9);
        assert!(w.mu0[m - 1] - p.k < 1e-9);
        assert!(w.mu0[n] > p.k);
    }

    #[test]
    fn pointwise_quadrature_identity() {
        let w = reference_profile();
        let p = &w.params;
        for i in (0..w.x.len()).step_by(97) {
            let lhs = 0.5 * w.dphi[i] * w.dphi[i];
            let rhs = p.energy + 0.5 * w.phi[i] * w.phi[i]
                - p.a * w.phi[i] / (p.c * (p.c - w.phi[i] * w.phi[i]).sqrt());
            assert!((lhs - rhs).abs() < 1e-8);
        }
    }

    #[test]
    fn momentum_density_closed_form() {
        let w = reference_profile();
        let p = &w.params;
        let n = w.x.len() / 2;
        // mu = a (c - phi^2)^{-3/2} > 0 pointwise
        for i in (0..w.x.len()).step_by(41) {
            let mu = p.a * (p.c - w.phi[i] * w.phi[i]).powf(-1.5);
            assert!((w.mu0[i] - mu).abs() < 1e-12 * mu);
        }
        // odd derivatives vanish at the crest, mu''(0) < 0
        assert_eq!(w.mu1[n], 0.0);
        assert_eq!(w.mu3[n], 0.0);
        assert!(w.mu2[n] < 0.0);
        // mu' = 3 a phi phi' (c - phi^2)^{-5/2}
        for i in (0..w.x.len()).step_by(53) {
            let expect = 3.0 * p.a * w.phi[i] * w.dphi[i]
                * (p.c - w.phi[i] * w.phi[i]).powf(-2.5);
            assert!((w.mu1[i] - expect).abs() < 1e-10 * (1.0 + expect.abs()));
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        // dense grid so the fourth-order stencil itself resolves the crest
        let t = tol();
        let p = WaveParams::from_a(REF_A, 1.0, &t).unwrap();
        let grid = GridSpec {
            points_per_half: 16384,
            ..GridSpec::default()
        };
        let w = shoot_profile(&p, &grid, &t).unwrap();
        let h = w.grid_step();
        let m = w.x.len();
        let fd_check = |vals: &[f64], derivs: &[f64], label: &str| {
            let mut worst: f64 = 0.0;
            let scale = derivs.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            for i in 2..m - 2 {
                let fd = (vals[i - 2] - 8.0 * vals[i - 1] + 8.0 * vals[i + 1] - vals[i + 2])
                    / (12.0 * h);
                worst = worst.max((fd - derivs[i]).abs());
            }
            assert!(worst < 1e-6 * scale, "{label}: worst {worst}, scale {scale}");
        };
        fd_check(&w.mu0, &w.mu1, "mu0 -> mu1");
        fd_check(&w.mu1, &w.mu2, "mu1 -> mu2");
        fd_check(&w.mu2, &w.mu3, "mu2 -> mu3");
        fd_check(&w.mu3, &w.mu4, "mu3 -> mu4");
    }

    #[test]
    fn quadrature_inverse_agrees_with_the_shot() {
        let t = tol();
        let w = reference_profile();
        let p = &w.params;
        assert!(x_of_phi(p, p.phi_max + 1e-3, &t).is_err());
        assert!(x_of_phi(p, p.k, &t).is_err());
        // monotone divergence toward the saddle; the integrand is nearly
        // log-singular there, so probe it with a loose tolerance
        let loose = Tolerances { quad_tol: 1e-6, ..t };
        let deep = x_of_phi(p, p.k + 1e-6 * (p.phi_max - p.k), &loose).unwrap();
        let shallow = x_of_phi(p, p.k + 1e-3 * (p.phi_max - p.k), &loose).unwrap();
        assert!(deep > shallow && shallow > 0.0);
        // agreement with the shot at ten interior stations
        for j in 1..=10 {
            let phi = p.k + (p.phi_max - p.k) * j as f64 / 11.0;
            let x = x_of_phi(p, phi, &t).unwrap();
            let (phi_shot, _) = w.phi_dphi_at(x);
            assert!(
                (phi_shot - phi).abs() < 1e-6,
                "station {j}: phi {phi} vs shot {phi_shot}"
            );
        }
    }

    #[test]
    fn csv_and_header_roundtrip() {
        let w = reference_profile();
        let mut buf = Vec::new();
        w.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# wave profile:"));
        assert!(text.contains("x,phi,dphi,mu0,mu1,mu2,mu3,mu4"));
        assert_eq!(text.lines().count(), w.x.len() + 3);
        let json = serde_json::to_string(&w.header()).unwrap();
        assert!(json.contains("\"phi_max\""));
    }
}
