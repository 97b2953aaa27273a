//! Oscillatory-integral decay laboratory: the one-dimensional cutoff
//! integrals against the A-projection and the spherical function, the
//! two-dimensional integral J over a translated group element, the
//! eight-dimensional profile pairings I and J2 evaluated by a hybrid of
//! tensor Gauss rules (radial pair) and shifted quasi-Monte Carlo
//! (cylinder variables), phase-gradient certificates, and log-log decay
//! fitting.

use std::sync::Arc;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::geometry::{dist_a, relative_coords};
use crate::group::{a_derivatives, a_explicit, make_a, make_n, mk_coords, GroupElement};
use crate::harmonic::{cutoff_b, KLambda, PhiTable};
use crate::quad::{gauss_legendre, integrate_adaptive_c};
use crate::{Error, Result};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

// ---------------------------------------------------------------------------
// cutoff functions

/// Smooth cutoff supported in [-1, 1] with a recorded table of derivative
/// maxima (orders 1..8, measured on a grid from a Chebyshev fit).
#[derive(Clone)]
pub struct CutoffChi {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub derivative_bounds: [f64; 8],
}

impl std::fmt::Debug for CutoffChi {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CutoffChi")
            .field("derivative_bounds", &self.derivative_bounds)
            .finish()
    }
}

impl CutoffChi {
    /// The standard bump exp(1 - 1/(1 - t^2)), normalized to 1 at 0.
    pub fn standard() -> Self {
        let f = |t: f64| {
            let t2 = t * t;
            if t2 >= 1.0 {
                0.0
            } else {
                (1.0 - 1.0 / (1.0 - t2)).exp()
            }
        };
        let bounds = chebyshev_derivative_bounds(&f, 8);
        CutoffChi {
            f: Arc::new(f),
            derivative_bounds: bounds,
        }
    }

    /// The identically zero cutoff.
    pub fn zero() -> Self {
        CutoffChi {
            f: Arc::new(|_| 0.0),
            derivative_bounds: [0.0; 8],
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t.abs() >= 1.0 {
            0.0
        } else {
            (self.f)(t)
        }
    }

    /// Plain integral of the cutoff, used by the oracle checks.
    pub fn integral(&self) -> f64 {
        crate::quad::integrate_gl(|t| self.eval(t), -1.0, 1.0, 128)
    }
}

/// Max absolute values of the first `orders` derivatives on a dense grid,
/// from a degree-799 Chebyshev fit on [-1, 1].
fn chebyshev_derivative_bounds<F: Fn(f64) -> f64>(f: &F, orders: usize) -> [f64; 8] {
    let n = 800usize;
    // Chebyshev-Gauss sampling
    let mut coeffs = vec![0.0f64; n];
    let samples: Vec<f64> = (0..n)
        .map(|j| f((std::f64::consts::PI * (j as f64 + 0.5) / n as f64).cos()))
        .collect();
    for (k, ck) in coeffs.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (j, s) in samples.iter().enumerate() {
            acc += s * (std::f64::consts::PI * k as f64 * (j as f64 + 0.5) / n as f64).cos();
        }
        *ck = 2.0 * acc / n as f64;
    }
    let clenshaw = |a: &[f64], x: f64| -> f64 {
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for &ak in a.iter().skip(1).rev() {
            let b0 = 2.0 * x * b1 - b2 + ak;
            b2 = b1;
            b1 = b0;
        }
        x * b1 - b2 + a[0] / 2.0
    };
    let differentiate = |a: &[f64]| -> Vec<f64> {
        let m = a.len();
        let mut b = vec![0.0f64; m];
        for k in (0..m - 1).rev() {
            let upper = if k + 2 < m { b[k + 2] } else { 0.0 };
            b[k] = upper + 2.0 * (k as f64 + 1.0) * a[k + 1];
        }
        b[0] /= 2.0;
        // restore the halved-first-coefficient convention
        b[0] *= 2.0;
        b
    };
    let mut out = [0.0f64; 8];
    let mut cur = coeffs;
    for (ord, slot) in out.iter_mut().enumerate().take(orders) {
        cur = differentiate(&cur);
        let mut mx = 0.0f64;
        for i in 0..2048 {
            let x = -1.0 + 2.0 * (i as f64 + 0.5) / 2048.0;
            mx = mx.max(clenshaw(&cur, x).abs());
        }
        *slot = mx;
        let _ = ord;
    }
    out
}

// ---------------------------------------------------------------------------
// one-dimensional integrals

/// First one-dimensional integral: the cutoff against
/// exp(i s' t' - i s A(k n(z,tau) a(t + t'))), with k in the maximal
/// compact. The A-value is taken through the closed formula after
/// extracting the section coordinates of k once.
pub fn int1d_a(
    chi0: &CutoffChi,
    s: f64,
    s_prime: f64,
    k: &GroupElement,
    z: Complex64,
    tau: f64,
    t: f64,
) -> Result<Complex64> {
    let mk = mk_coords(k)?;
    let integrand = |tp: f64| -> Complex64 {
        let w = chi0.eval(tp);
        if w == 0.0 {
            return c(0.0, 0.0);
        }
        let a = a_explicit(0.0, &mk.coset, z, tau, t + tp);
        c(0.0, s_prime * tp - s * a).exp() * w
    };
    let (v, _) = integrate_adaptive_c(integrand, -1.0, 1.0, 1e-13, 1e-8, 4096)?;
    Ok(v)
}

/// Second one-dimensional integral: the cutoff against
/// e^{i s' t'} phi_s(n(z,tau) a(t + t')).
pub fn int1d_phi(
    chi0: &CutoffChi,
    s: f64,
    s_prime: f64,
    z: Complex64,
    tau: f64,
    t: f64,
) -> Result<Complex64> {
    // radial reach over the cutoff support
    let mut t_max: f64 = 0.0;
    for i in 0..=32 {
        let tp = -1.0 + i as f64 / 16.0;
        t_max = t_max.max(dist_a(z, tau, t + tp));
    }
    let table = PhiTable::build(s, t_max + 0.1)?;
    let integrand = |tp: f64| -> Complex64 {
        let w = chi0.eval(tp);
        if w == 0.0 {
            return c(0.0, 0.0);
        }
        let phi = table.eval(dist_a(z, tau, t + tp));
        c(0.0, s_prime * tp).exp() * (w * phi)
    };
    let (v, _) = integrate_adaptive_c(integrand, -1.0, 1.0, 1e-13, 1e-8, 4096)?;
    Ok(v)
}

/// Cartan radius of a(-t1) g a(t2) through the closed action formula.
fn sandwich_radius(g: &GroupElement, t1: f64, t2: f64) -> f64 {
    let wts = [0.5f64, 0.0, -0.5];
    let m = &g.mat;
    // v = scaled matrix applied to the origin lift (-1, 0, 1)
    let mut v = [c(0.0, 0.0); 3];
    for (i, vi) in v.iter_mut().enumerate() {
        let row = [m.at(i, 0), m.at(i, 1), m.at(i, 2)];
        let li = (-t1 * wts[i]).exp();
        let col0 = (t2 * wts[0]).exp();
        let col2 = (t2 * wts[2]).exp();
        *vi = (row[0] * (-col0) + row[2] * col2) * li;
    }
    let num = (v[0] - v[2]).norm_sqr();
    let den = -2.0 * (2.0 * (v[0] * v[2].conj()).re + v[1].norm_sqr());
    let ratio = (num / den).max(1.0);
    2.0 * ratio.sqrt().acosh()
}

/// Two-dimensional integral J(s, s1, s2, g; chi0): nested adaptive
/// quadrature of chi(t1) chi(t2) e^{-i s1 t1 + i s2 t2}
/// phi_s(a(-t1) g a(t2)), with the spherical factor served from one dense
/// radial table per call.
pub fn integral_j(
    s: f64,
    s1: f64,
    s2: f64,
    g: &GroupElement,
    chi0: &CutoffChi,
) -> Result<Complex64> {
    // radial reach over the square
    let mut t_max: f64 = 0.0;
    for i in 0..=8 {
        for j in 0..=8 {
            let t1 = -1.0 + i as f64 / 4.0;
            let t2 = -1.0 + j as f64 / 4.0;
            t_max = t_max.max(sandwich_radius(g, t1, t2));
        }
    }
    let table = PhiTable::build(s, t_max + 0.3)?;
    let sandwich_fixed = |t1: f64, t2: f64| table.eval(sandwich_radius(g, t1, t2));
    let outer = |t1: f64| -> Complex64 {
        let w1 = chi0.eval(t1);
        if w1 == 0.0 {
            return c(0.0, 0.0);
        }
        let inner = integrate_adaptive_c(
            |t2| {
                let w2 = chi0.eval(t2);
                if w2 == 0.0 {
                    return c(0.0, 0.0);
                }
                c(0.0, -s1 * t1 + s2 * t2).exp() * (w1 * w2 * sandwich_fixed(t1, t2))
            },
            -1.0,
            1.0,
            1e-13,
            1e-8,
            4096,
        )
        .map(|(v, _)| v)
        .unwrap_or(c(f64::NAN, f64::NAN));
        inner
    };
    let (v, _) = integrate_adaptive_c(outer, -1.0, 1.0, 1e-12, 1e-8, 4096)?;
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::QuadratureNotConverged("inner integral of J"));
    }
    Ok(v)
}

// ---------------------------------------------------------------------------
// windowed profiles and cylinder cutoffs

/// Frequency placement of a profile relative to the window around lambda.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandFlag {
    InBand,
    OutOfBand,
}

/// Separable profile u(z, tau) v(t): the cylinder factor is supported in
/// the closed lambda^{-1/2} cylinder, the pulse v is exactly band-limited
/// by construction (synthesized from a smooth compactly supported
/// frequency window), and the whole profile has unit L2 norm.
#[derive(Debug, Clone)]
pub struct WindowedProfile {
    pub lambda: f64,
    pub beta: f64,
    pub flag: BandFlag,
    /// carrier frequency (0 for the low-pass out-of-band pulse)
    pub carrier: f64,
    /// half-width of the synthesized frequency window
    pub window: f64,
    v_table: crate::interp::CubicSpline,
    v_t_max: f64,
    scale: f64,
}

fn bump01(u: f64) -> f64 {
    // smooth bump on [-1, 1]
    let u2 = u * u;
    if u2 >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - u2)).exp()
    }
}

impl WindowedProfile {
    /// Low-pass pulse with spectrum in [-window, window]; out of band as
    /// long as window < lambda - beta.
    pub fn out_of_band(lambda: f64, beta: f64, window: f64) -> Result<WindowedProfile> {
        if !(window > 0.0 && window < lambda - beta) {
            return Err(Error::domain(format!(
                "window {window} must lie in (0, lambda - beta = {})",
                lambda - beta
            )));
        }
        Self::build(lambda, beta, BandFlag::OutOfBand, 0.0, window)
    }

    /// Carrier pulse at frequency lambda with spectrum in
    /// +-[lambda - window, lambda + window]; in band when window <= beta.
    /// The window is capped so the pulse is long enough to reach past the
    /// near-cutoff region.
    pub fn in_band(lambda: f64, beta: f64) -> Result<WindowedProfile> {
        let window = (beta / 2.0).min(3.0);
        Self::build(lambda, beta, BandFlag::InBand, lambda, window)
    }

    fn build(
        lambda: f64,
        beta: f64,
        flag: BandFlag,
        carrier: f64,
        window: f64,
    ) -> Result<WindowedProfile> {
        if !(lambda > 0.0 && beta > 0.0) {
            return Err(Error::domain("lambda and beta must be positive"));
        }
        // pulse synthesis from the frequency window: the tail of the
        // synthesized pulse decays like exp(-sqrt(2 W t)), so the table
        // must extend far enough for the spectral leakage target
        let t_max = (272.25 / (2.0 * window)).clamp(5.0, 30.0);
        let max_freq = carrier + window;
        let dt = (0.1 / max_freq.max(1.0)).min(2e-3);
        let n = (t_max / dt).ceil() as usize;
        let grid: Vec<f64> = (0..=n).map(|i| i as f64 * dt).collect();
        let values: Vec<f64> = grid
            .iter()
            .map(|&t| {
                let base = crate::quad::integrate_gl(
                    |s| bump01(s / window) * (s * t).cos(),
                    0.0,
                    window,
                    160,
                ) / std::f64::consts::PI;
                base * (carrier * t).cos() * if carrier > 0.0 { 2.0 } else { 1.0 }
            })
            .collect();
        let v_table = crate::interp::CubicSpline::new(grid, values);
        let mut profile = WindowedProfile {
            lambda,
            beta,
            flag,
            carrier,
            window,
            v_table,
            v_t_max: t_max,
            scale: 1.0,
        };
        let norm = profile.l2_norm();
        if norm <= 0.0 {
            return Err(Error::domain("degenerate profile"));
        }
        profile.scale = 1.0 / norm;
        Ok(profile)
    }

    fn v_raw(&self, t: f64) -> f64 {
        let a = t.abs();
        if a >= self.v_t_max {
            0.0
        } else {
            self.v_table.eval(a)
        }
    }

    /// Cylinder factor: supported in the closed lambda^{-1/2} cylinder.
    fn u_factor(&self, z: Complex64, tau: f64) -> f64 {
        let s = self.lambda.sqrt();
        bump01(z.norm() * s) * bump01(tau * s)
    }

    /// The profile value.
    pub fn eval(&self, z: Complex64, tau: f64, t: f64) -> f64 {
        self.scale * self.u_factor(z, tau) * self.v_raw(t)
    }

    /// Plain L2 norm over the Euclidean coordinates. The pulse energy is
    /// computed through Parseval from the exact frequency window, which
    /// also covers the truncated tail.
    pub fn l2_norm(&self) -> f64 {
        let s = self.lambda.sqrt();
        let disc = crate::quad::integrate_gl(
            |r| bump01(r).powi(2) * 2.0 * std::f64::consts::PI * r,
            0.0,
            1.0,
            64,
        ) / (s * s);
        let tau_part = crate::quad::integrate_gl(|u| bump01(u).powi(2), -1.0, 1.0, 64) / s;
        // ||v||^2 = (1/pi) int_0^W B(s)^2 ds per carrier image (one image
        // at carrier 0, two disjoint images otherwise)
        let images = if self.carrier > 0.0 { 2.0 } else { 1.0 };
        let t_part = images / std::f64::consts::PI
            * crate::quad::integrate_gl(|u| bump01(u / self.window).powi(2), 0.0, self.window, 128);
        (disc * tau_part * t_part).sqrt() * self.scale
    }

    /// Frequency-domain leakage: fraction of the pulse energy outside the
    /// allowed region (out-of-band: outside the complement of
    /// +-[lambda - beta, lambda + beta]; in-band: outside the band).
    pub fn band_leakage(&self) -> f64 {
        let vhat = |xi: f64| -> f64 {
            2.0 * crate::quad::integrate_gl(
                |t| self.v_raw(t) * (xi * t).cos(),
                0.0,
                self.v_t_max,
                4096,
            )
        };
        // Parseval total of the tabulated (unscaled) pulse
        let images = if self.carrier > 0.0 { 2.0 } else { 1.0 };
        let total = 2.0
            * images
            * crate::quad::integrate_gl(|u| bump01(u / self.window).powi(2), 0.0, self.window, 128);
        let energy_on = |lo: f64, hi: f64| -> f64 {
            if hi <= lo {
                return 0.0;
            }
            2.0 * crate::quad::integrate_gl(|xi| vhat(xi).powi(2), lo, hi, 512)
        };
        let bad = match self.flag {
            BandFlag::OutOfBand => energy_on(self.lambda - self.beta, self.lambda + self.beta),
            BandFlag::InBand => {
                energy_on(0.0, self.lambda - self.beta)
                    + energy_on(self.lambda + self.beta, 3.0 * self.lambda)
            }
        };
        bad / total
    }
}

/// Nonnegative smooth cutoff on the closed cylinder times (-1, 1), used as
/// the window b of the profile pairings.
#[derive(Debug, Clone, Copy)]
pub struct CylinderCutoff {
    pub lambda: f64,
    pub t_edge: f64,
}

impl CylinderCutoff {
    pub fn new(lambda: f64) -> Self {
        CylinderCutoff {
            lambda,
            t_edge: 0.95,
        }
    }

    fn plateau(u: f64) -> f64 {
        // 1 for |u| <= 1/2, 0 for |u| >= 1
        let a = 2.0 * u.abs();
        let f = |v: f64| if v > 0.0 { (-1.0 / v).exp() } else { 0.0 };
        let num = f(2.0 - a);
        let den = num + f(a - 1.0);
        if den == 0.0 {
            if a <= 1.0 {
                1.0
            } else {
                0.0
            }
        } else {
            num / den
        }
    }

    pub fn eval(&self, z: Complex64, tau: f64, t: f64) -> f64 {
        let s = self.lambda.sqrt();
        Self::plateau(z.norm() * s) * Self::plateau(tau * s) * Self::plateau(t / self.t_edge)
    }
}

// ---------------------------------------------------------------------------
// the eight-dimensional pairings

/// Sampling controls for the hybrid integrator.
#[derive(Debug, Clone, Copy)]
pub struct QmcOpts {
    /// quasi-Monte Carlo points on the six cylinder variables
    pub n_points: usize,
    /// independent Cranley-Patterson shifts for the error estimate
    pub n_shifts: usize,
    /// Gauss order along the oscillatory difference coordinate
    pub gauss_u: usize,
    /// Gauss order along the mean coordinate
    pub gauss_v: usize,
    pub seed: u64,
}

impl Default for QmcOpts {
    fn default() -> Self {
        QmcOpts {
            n_points: 4096,
            n_shifts: 8,
            gauss_u: 96,
            gauss_v: 24,
            seed: 1,
        }
    }
}

const HALTON_BASES: [u32; 6] = [2, 3, 5, 7, 11, 13];

fn halton(index: u64, base: u32) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    let mut i = index + 1;
    let b = base as f64;
    while i > 0 {
        f /= b;
        r += f * (i % base as u64) as f64;
        i /= base as u64;
    }
    r
}

/// Radial kernel choices for the pairing integrand.
pub enum RadialKernel<'a> {
    /// The full Paley-Wiener kernel.
    Kernel(&'a KLambda),
    /// The kernel times one member of the radial cutoff partition.
    CutKernel {
        k: &'a KLambda,
        piece: u8,
        beta: f64,
        eps0: f64,
    },
    /// The far cutoff times the spherical function (the J2 integrand).
    FarPhi {
        phi: &'a PhiTable,
        beta: f64,
        eps0: f64,
    },
}

impl RadialKernel<'_> {
    fn eval(&self, d: f64) -> f64 {
        match self {
            RadialKernel::Kernel(k) => k.kernel.eval(d),
            RadialKernel::CutKernel {
                k,
                piece,
                beta,
                eps0,
            } => {
                let b = cutoff_b(*piece, *beta, *eps0, d).expect("validated parameters");
                if b == 0.0 {
                    0.0
                } else {
                    b * k.kernel.eval(d)
                }
            }
            RadialKernel::FarPhi { phi, beta, eps0 } => {
                let b = cutoff_b(2, *beta, *eps0, d).expect("validated parameters");
                if b == 0.0 {
                    0.0
                } else {
                    b * phi.eval(d)
                }
            }
        }
    }

    /// Radius beyond which the kernel vanishes identically.
    fn support(&self) -> f64 {
        match self {
            RadialKernel::Kernel(k) => k.kernel.support_radius,
            RadialKernel::CutKernel {
                k,
                piece,
                beta,
                eps0,
            } => {
                let cut = match piece {
                    1 => 2.0 * beta.powf(-0.5 + eps0),
                    _ => 2.0,
                };
                k.kernel.support_radius.min(cut)
            }
            RadialKernel::FarPhi { .. } => 2.0,
        }
    }
}

/// Profile pairing against a radial kernel conjugated by g:
/// the integral of conj(b phi)(1) (b phi)(2)
/// kernel(a(-t1) n(-z1,-tau1) g n(z2,tau2) a(t2)) 16 e^{-2 t1 - 2 t2}
/// over two copies of cylinder x (-1, 1).
///
/// Returns the value together with the shifted-QMC standard error.
pub fn pair_with_kernel(
    profile: &WindowedProfile,
    g: Option<&GroupElement>,
    b: &CylinderCutoff,
    kernel: &RadialKernel<'_>,
    opts: &QmcOpts,
) -> Result<(Complex64, f64)> {
    if opts.n_points * opts.n_shifts > (1 << 21) {
        return Err(Error::BudgetExceeded(format!(
            "QMC budget {} x {}",
            opts.n_points, opts.n_shifts
        )));
    }
    let lambda = profile.lambda;
    let radius = lambda.powf(-0.5);
    let t_edge = b.t_edge;
    let support = kernel.support();
    // difference-coordinate reach: the kernel vanishes once the radial
    // argument exceeds its support, and that argument is >= |t2 - t1| - slack
    let slack = 6.0 * radius + 0.05;
    let u_max = (support + slack).min(2.0 * t_edge);
    let (un, uw) = gauss_legendre(opts.gauss_u).clone();
    let (vn, vw) = gauss_legendre(opts.gauss_v).clone();
    let mut rng = StdRng::seed_from_u64(opts.seed);
    let mut shift_values = Vec::with_capacity(opts.n_shifts);
    // jacobian of the cylinder map per copy: disc area x tau extent
    let cyl_vol = std::f64::consts::PI * radius * radius * 2.0 * radius;
    let vol = cyl_vol * cyl_vol;
    let identity_path = g.is_none();
    let gmat = g.cloned();
    for _ in 0..opts.n_shifts {
        let shift: [f64; 6] = std::array::from_fn(|_| rng.gen::<f64>());
        let mut acc = c(0.0, 0.0);
        for idx in 0..opts.n_points {
            let mut x = [0.0f64; 6];
            for (d, xv) in x.iter_mut().enumerate() {
                let h = halton(idx as u64, HALTON_BASES[d]);
                *xv = (h + shift[d]).fract();
            }
            let z1 = Complex64::from_polar(radius * x[0].sqrt(), 2.0 * std::f64::consts::PI * x[1]);
            let tau1 = radius * (2.0 * x[2] - 1.0);
            let z2 = Complex64::from_polar(radius * x[3].sqrt(), 2.0 * std::f64::consts::PI * x[4]);
            let tau2 = radius * (2.0 * x[5] - 1.0);
            // middle element: n(-z1,-tau1) g n(z2,tau2) (or the closed
            // relative form when g is the identity)
            let mid = if identity_path {
                None
            } else {
                let g = gmat.as_ref().unwrap();
                Some(make_n(-z1, -tau1)?.mul(g).mul(&make_n(z2, tau2)?))
            };
            let (zr, taur) = relative_coords(z1, tau1, 0.0, z2, tau2, 0.0);
            // inner Gauss over rotated pair coordinates
            let mut inner = c(0.0, 0.0);
            for (iu, &xu) in un.iter().enumerate() {
                let u = u_max * xu;
                let v_half = t_edge - u.abs() / 2.0;
                if v_half <= 0.0 {
                    continue;
                }
                let mut along = c(0.0, 0.0);
                for (iv, &xv) in vn.iter().enumerate() {
                    let v = v_half * xv;
                    let t1 = v - u / 2.0;
                    let t2 = v + u / 2.0;
                    let p1 = b.eval(z1, tau1, t1) * profile.eval(z1, tau1, t1);
                    if p1 == 0.0 {
                        continue;
                    }
                    let p2 = b.eval(z2, tau2, t2) * profile.eval(z2, tau2, t2);
                    if p2 == 0.0 {
                        continue;
                    }
                    let d = match &mid {
                        None => {
                            // a(-t1) n(zr, taur) a(t2): radial distance in
                            // scaled relative coordinates
                            dist_a(zr * (-t1 / 2.0).exp(), taur * (-t1).exp(), t2 - t1)
                        }
                        Some(m) => sandwich_radius(m, t1, t2),
                    };
                    if d >= support {
                        continue;
                    }
                    let kv = kernel.eval(d);
                    if kv == 0.0 {
                        continue;
                    }
                    let amp = p1 * p2 * kv * 16.0 * (-2.0 * t1 - 2.0 * t2).exp();
                    along += c(amp, 0.0) * vw[iv] * v_half;
                }
                inner += along * uw[iu] * u_max;
            }
            acc += inner;
        }
        shift_values.push(acc * (vol / opts.n_points as f64));
    }
    let n = shift_values.len() as f64;
    let mean = shift_values.iter().sum::<Complex64>() / n;
    let var = shift_values
        .iter()
        .map(|v| (v - mean).norm_sqr())
        .sum::<f64>()
        / (n - 1.0).max(1.0);
    let se = (var / n).sqrt();
    Ok((mean, se))
}

/// The profile pairing I(lambda, phi, g) with the full kernel. At the
/// identity the exact correlation reduction is used (deterministic, with a
/// refinement error estimate); away from it the hybrid Gauss/quasi-MC
/// integrator takes over.
pub fn integral_i(
    k: &KLambda,
    profile: &WindowedProfile,
    g: &GroupElement,
    b: &CylinderCutoff,
    opts: &QmcOpts,
) -> Result<(Complex64, f64)> {
    let is_identity =
        crate::linalg::frobenius(&g.mat.sub(&crate::linalg::ComplexMat3::identity())) == 0.0;
    if is_identity {
        let pairing = ProfilePairing::new(profile, b);
        let (v, e) = pairing.pair_with_error(&RadialKernel::Kernel(k), &PairingOrders::default());
        Ok((c(v, 0.0), e))
    } else {
        pair_with_kernel(profile, Some(g), b, &RadialKernel::Kernel(k), opts)
    }
}

/// The near/far split of the pairing at the identity: the near piece uses
/// b1 k_lambda and the far piece b2 k_lambda, evaluated by the same
/// reduced quadrature so the two add back to the full pairing.
#[allow(clippy::type_complexity)]
pub fn split_i(
    k: &KLambda,
    beta: f64,
    eps0: f64,
    profile: &WindowedProfile,
    b: &CylinderCutoff,
) -> Result<((f64, f64), (f64, f64))> {
    if profile.flag != BandFlag::OutOfBand {
        return Err(Error::domain(
            "split pairing requires an out-of-band profile",
        ));
    }
    let pairing = ProfilePairing::new(profile, b);
    let orders = PairingOrders::default();
    let near = pairing.pair_with_error(
        &RadialKernel::CutKernel {
            k,
            piece: 1,
            beta,
            eps0,
        },
        &orders,
    );
    let far = pairing.pair_with_error(
        &RadialKernel::CutKernel {
            k,
            piece: 2,
            beta,
            eps0,
        },
        &orders,
    );
    Ok((near, far))
}

/// The far-cutoff spherical pairing J2(phi, s), by the reduced quadrature.
pub fn integral_j2(
    profile: &WindowedProfile,
    s: f64,
    lambda: f64,
    beta: f64,
    eps0: f64,
    b: &CylinderCutoff,
) -> Result<(f64, f64)> {
    if (s - lambda).abs() > beta / 2.0 {
        return Err(Error::domain(
            "spectral parameter outside |s - lambda| <= beta/2",
        ));
    }
    let table = PhiTable::build(s, 2.2)?;
    let kernel = RadialKernel::FarPhi {
        phi: &table,
        beta,
        eps0,
    };
    let pairing = ProfilePairing::new(profile, b);
    // the spherical kernel oscillates across the whole pair range
    let orders = PairingOrders {
        n_r: 128,
        ..PairingOrders::default()
    };
    Ok(pairing.pair_with_error(&kernel, &orders))
}

/// Quasi-Monte Carlo evaluation of J2, kept as an independent cross-check
/// of the reduced quadrature.
pub fn integral_j2_qmc(
    profile: &WindowedProfile,
    s: f64,
    lambda: f64,
    beta: f64,
    eps0: f64,
    b: &CylinderCutoff,
    opts: &QmcOpts,
) -> Result<(Complex64, f64)> {
    if (s - lambda).abs() > beta / 2.0 {
        return Err(Error::domain(
            "spectral parameter outside |s - lambda| <= beta/2",
        ));
    }
    let table = PhiTable::build(s, 2.2)?;
    let kernel = RadialKernel::FarPhi {
        phi: &table,
        beta,
        eps0,
    };
    let mut o = *opts;
    o.gauss_u = o.gauss_u.max(128);
    pair_with_kernel(profile, None, b, &kernel, &o)
}

// ---------------------------------------------------------------------------
// correlation-reduced pairing at the identity
//
// For g = e the pairing integrand couples the two cylinder copies only
// through the relative coordinates, and the profile and window are radial
// in z and even in tau. Integrating the absolute cylinder variables first
// yields a twisted autocorrelation C(zeta, sigma) that is radial in zeta,
// after which the whole eight-dimensional integral collapses to an exact
// four-dimensional tensor quadrature over (rho, tau, t1, t2). Unlike the
// quasi-Monte Carlo route, this resolves the near-diagonal kernel spike
// deterministically.

/// Gauss orders of the reduced four-dimensional quadrature. The radial
/// triple (u, rho, tau) is integrated in spherical coordinates centered at
/// the cone point of the radial distance, where the distance is r times a
/// smooth function, so the rules converge at spectral rate.
#[derive(Debug, Clone, Copy)]
pub struct PairingOrders {
    pub n_r: usize,
    pub n_theta: usize,
    pub n_phi: usize,
    pub n_m: usize,
}

impl Default for PairingOrders {
    fn default() -> Self {
        PairingOrders {
            n_r: 96,
            n_theta: 48,
            n_phi: 32,
            n_m: 24,
        }
    }
}

impl PairingOrders {
    fn scaled(&self, f: f64) -> PairingOrders {
        let s = |n: usize| ((n as f64 * f).round() as usize).max(4);
        PairingOrders {
            n_r: s(self.n_r),
            n_theta: s(self.n_theta),
            n_phi: s(self.n_phi),
            n_m: s(self.n_m),
        }
    }
}

/// Twisted autocorrelation of the cylinder window on a fine grid:
/// C(zeta, sigma) = int w(z, tau) w(z + zeta, tau + sigma - 2 Im(z zeta^-))
/// over one cylinder copy, with w the product of the profile cylinder
/// factor and the window cylinder factor.
struct TwistedCorrelation {
    zeta_max: f64,
    sigma_max: f64,
    nz: usize,
    ns: usize,
    values: Vec<f64>,
}

impl TwistedCorrelation {
    fn build(profile: &WindowedProfile, b: &CylinderCutoff) -> TwistedCorrelation {
        let radius = profile.lambda.powf(-0.5);
        let sp = profile.lambda.sqrt();
        let sb = b.lambda.sqrt();
        let w = |z: Complex64, tau: f64| -> f64 {
            bump01(z.norm() * sp)
                * bump01(tau * sp)
                * CylinderCutoff::plateau(z.norm() * sb)
                * CylinderCutoff::plateau(tau * sb)
        };
        let zeta_max = 2.0 * radius;
        let sigma_max = 2.0 * radius + 4.0 * radius * radius;
        // coarse tensor-Gauss evaluation
        let ncz = 48usize;
        let ncs = 64usize;
        let order = 20usize;
        let (nodes, weights) = gauss_legendre(order);
        let map = |i: usize, a: f64, b: f64| {
            let m = 0.5 * (a + b);
            let h = 0.5 * (b - a);
            (m + h * nodes[i], h * weights[i])
        };
        let mut coarse = vec![0.0f64; ncz * ncs];
        let zeta_grid: Vec<f64> = (0..ncz)
            .map(|i| zeta_max * i as f64 / (ncz - 1) as f64)
            .collect();
        let sigma_grid: Vec<f64> = (0..ncs)
            .map(|j| -sigma_max + 2.0 * sigma_max * j as f64 / (ncs - 1) as f64)
            .collect();
        for (iz, &zeta) in zeta_grid.iter().enumerate() {
            for (is, &sigma) in sigma_grid.iter().enumerate() {
                let mut acc = 0.0;
                for ix in 0..order {
                    let (x, wx) = map(ix, -radius, radius);
                    for iy in 0..order {
                        let (y, wy) = map(iy, -radius, radius);
                        let w1z = Complex64::new(x, y);
                        for itau in 0..order {
                            let (tau, wtau) = map(itau, -radius, radius);
                            let w1 = w(w1z, tau);
                            if w1 == 0.0 {
                                continue;
                            }
                            // zeta taken real: Im(z zeta^-) = y zeta
                            let w2 = w(Complex64::new(x + zeta, y), tau + sigma - 2.0 * y * zeta);
                            if w2 == 0.0 {
                                continue;
                            }
                            acc += w1 * w2 * wx * wy * wtau;
                        }
                    }
                }
                coarse[iz * ncs + is] = acc;
            }
        }
        // bicubic upsampling to a fine bilinear grid
        let nz = 384usize;
        let ns = 512usize;
        let row_splines: Vec<crate::interp::CubicSpline> = (0..ncz)
            .map(|iz| {
                crate::interp::CubicSpline::new(
                    sigma_grid.clone(),
                    coarse[iz * ncs..(iz + 1) * ncs].to_vec(),
                )
            })
            .collect();
        let mut values = vec![0.0f64; nz * ns];
        for js in 0..ns {
            let sigma = -sigma_max + 2.0 * sigma_max * js as f64 / (ns - 1) as f64;
            let col: Vec<f64> = row_splines.iter().map(|sp| sp.eval(sigma)).collect();
            let col_spline = crate::interp::CubicSpline::new(zeta_grid.clone(), col);
            for iz in 0..nz {
                let zeta = zeta_max * iz as f64 / (nz - 1) as f64;
                values[iz * ns + js] = col_spline.eval(zeta);
            }
        }
        TwistedCorrelation {
            zeta_max,
            sigma_max,
            nz,
            ns,
            values,
        }
    }

    fn eval(&self, zeta: f64, sigma: f64) -> f64 {
        let z = zeta.abs();
        if z >= self.zeta_max || sigma.abs() >= self.sigma_max {
            return 0.0;
        }
        let fz = z / self.zeta_max * (self.nz - 1) as f64;
        let fs = (sigma + self.sigma_max) / (2.0 * self.sigma_max) * (self.ns - 1) as f64;
        let iz = (fz as usize).min(self.nz - 2);
        let is = (fs as usize).min(self.ns - 2);
        let az = fz - iz as f64;
        let asig = fs - is as f64;
        let v00 = self.values[iz * self.ns + is];
        let v01 = self.values[iz * self.ns + is + 1];
        let v10 = self.values[(iz + 1) * self.ns + is];
        let v11 = self.values[(iz + 1) * self.ns + is + 1];
        v00 * (1.0 - az) * (1.0 - asig)
            + v01 * (1.0 - az) * asig
            + v10 * az * (1.0 - asig)
            + v11 * az * asig
    }
}

/// Precomputed state for identity-centered pairings of one profile and
/// window: the twisted cylinder autocorrelation plus the pulse factors.
pub struct ProfilePairing {
    profile: WindowedProfile,
    b: CylinderCutoff,
    corr: TwistedCorrelation,
}

impl ProfilePairing {
    pub fn new(profile: &WindowedProfile, b: &CylinderCutoff) -> ProfilePairing {
        ProfilePairing {
            profile: profile.clone(),
            b: *b,
            corr: TwistedCorrelation::build(profile, b),
        }
    }

    fn pulse(&self, t: f64) -> f64 {
        self.profile.scale * self.profile.v_raw(t) * CylinderCutoff::plateau(t / self.b.t_edge)
    }

    /// The reduced four-dimensional quadrature at the given orders:
    /// spherical coordinates u = r cos(theta), 2 rho = r sin(theta)
    /// cos(phi), tau = r sin(theta) sin(phi) over the half space rho >= 0,
    /// then a Gauss rule over the pair mean m.
    pub fn pair(&self, kernel: &RadialKernel<'_>, orders: &PairingOrders) -> f64 {
        let t_edge = self.b.t_edge;
        let support = kernel.support();
        let rho_max = self.corr.zeta_max * (0.5 * t_edge).exp();
        let tau_max = self.corr.sigma_max * t_edge.exp();
        let u_max = 2.0 * t_edge;
        let r_max = (u_max * u_max + 4.0 * rho_max * rho_max + tau_max * tau_max).sqrt();
        let (rn, rw) = gauss_legendre(orders.n_r);
        let (thn, thw) = gauss_legendre(orders.n_theta);
        let (phn, phw) = gauss_legendre(orders.n_phi);
        let (mn, mw) = gauss_legendre(orders.n_m);
        use std::f64::consts::PI;
        let mut total = 0.0;
        for (i_r, &xr) in rn.iter().enumerate() {
            let r = r_max * 0.5 * (xr + 1.0);
            let wr = rw[i_r] * r_max * 0.5;
            for (i_t, &xt) in thn.iter().enumerate() {
                let theta = PI * 0.5 * (xt + 1.0);
                let wth = thw[i_t] * PI * 0.5;
                let u = r * theta.cos();
                let v_half = t_edge - u.abs() / 2.0;
                if v_half <= 0.0 {
                    continue;
                }
                let s_th = theta.sin();
                let mut phi_acc = 0.0;
                for (i_p, &xp) in phn.iter().enumerate() {
                    // phi in (-pi/2, pi/2) keeps rho nonnegative
                    let phi = PI * 0.5 * xp;
                    let wph = phw[i_p] * PI * 0.5;
                    let rho = 0.5 * r * s_th * phi.cos();
                    let tau = r * s_th * phi.sin();
                    if rho > rho_max || tau.abs() > tau_max {
                        continue;
                    }
                    let d = dist_a(c(rho, 0.0), tau, u);
                    if d >= support {
                        continue;
                    }
                    let kv = kernel.eval(d);
                    if kv == 0.0 {
                        continue;
                    }
                    let mut m_acc = 0.0;
                    for (i_m, &xm) in mn.iter().enumerate() {
                        let m = v_half * xm;
                        let t1 = m - u / 2.0;
                        let t2 = m + u / 2.0;
                        let p1 = self.pulse(t1);
                        if p1 == 0.0 {
                            continue;
                        }
                        let p2 = self.pulse(t2);
                        if p2 == 0.0 {
                            continue;
                        }
                        let corr = self.corr.eval((t1 / 2.0).exp() * rho, t1.exp() * tau);
                        if corr == 0.0 {
                            continue;
                        }
                        m_acc += p1 * p2 * corr * 16.0 * (-2.0 * t2).exp() * mw[i_m] * v_half;
                    }
                    // volume element du drho dtau = r^2 sin(theta)/2, and
                    // the z-angle contributes 2 pi rho
                    phi_acc += m_acc * kv * 2.0 * PI * rho * wph;
                }
                total += phi_acc * wr * wth * r * r * s_th * 0.5;
            }
        }
        total
    }

    /// Value together with an order-refinement error estimate.
    pub fn pair_with_error(&self, kernel: &RadialKernel<'_>, orders: &PairingOrders) -> (f64, f64) {
        let coarse = self.pair(kernel, orders);
        let fine = self.pair(kernel, &orders.scaled(1.4));
        (fine, (fine - coarse).abs())
    }
}

// ---------------------------------------------------------------------------
// phase-gradient certificate

/// Box half-widths for the certificate grid.
#[derive(Debug, Clone, Copy)]
pub struct BoxBounds {
    pub x: f64,
    pub y: f64,
    pub tau: f64,
    pub t: f64,
}

/// Minimum over a grid in the box of the full four-variable gradient of
/// the phase A(k n(x + i y, tau) a(t)) - rho t. The derivative formulas
/// give the gradient in the group chart; the Euclidean coordinates add the
/// cocycle factors of the coordinate change.
pub fn phase_gradient_certificate(
    k: &GroupElement,
    rho: f64,
    bounds: &BoxBounds,
    n_grid: usize,
) -> Result<f64> {
    if rho.abs() > 2.0 / 3.0 {
        return Err(Error::domain("certificate requires |rho| <= 2/3"));
    }
    let n = n_grid.max(2);
    let mut min_grad = f64::INFINITY;
    for ix in 0..n {
        let x = bounds.x * (2.0 * (ix as f64 + 0.5) / n as f64 - 1.0);
        for iy in 0..n {
            let y = bounds.y * (2.0 * (iy as f64 + 0.5) / n as f64 - 1.0);
            for itau in 0..n {
                let tau = bounds.tau * (2.0 * (itau as f64 + 0.5) / n as f64 - 1.0);
                for it in 0..n {
                    let t = bounds.t * (2.0 * (it as f64 + 0.5) / n as f64 - 1.0);
                    let z = c(x, y);
                    let gpt = k.mul(&make_n(z, tau)?).mul(&make_a(t)?);
                    let ad = a_derivatives(&gpt)?;
                    let emt = (-t).exp();
                    let emt2 = (-t / 2.0).exp();
                    let gx = emt2 * ad.dx - 2.0 * y * emt * ad.dtau;
                    let gy = emt2 * ad.dy + 2.0 * x * emt * ad.dtau;
                    let gtau = emt * ad.dtau;
                    let gt = ad.dt - rho;
                    let norm = (gx * gx + gy * gy + gtau * gtau + gt * gt).sqrt();
                    min_grad = min_grad.min(norm);
                }
            }
        }
    }
    Ok(min_grad)
}

// ---------------------------------------------------------------------------
// decay fitting and reports

/// One sampled point of a decay sweep.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DecayPoint {
    pub s: f64,
    pub abs_value: f64,
    pub std_err: f64,
}

/// Result of a log-log decay fit with a pass/fail verdict.
#[derive(Debug, Clone, Serialize)]
pub struct DecayReport {
    pub grid: Vec<DecayPoint>,
    pub fitted_slope: Option<f64>,
    pub threshold_pass: bool,
    /// all sampled magnitudes sat below the floating noise floor
    pub degenerate: bool,
}

/// Least-squares slope of log |value| against log s, passing when the
/// slope is at most `max_slope`. Data entirely below the 1e-14 noise
/// floor is reported as a degenerate pass with no slope.
pub fn fit_decay(points: &[DecayPoint], max_slope: f64) -> Result<DecayReport> {
    if points.len() < 5 {
        return Err(Error::DegenerateFit("need at least 5 grid points"));
    }
    if !points.windows(2).all(|w| w[1].s > w[0].s) {
        return Err(Error::DegenerateFit("grid must be strictly increasing"));
    }
    if points.iter().all(|p| p.abs_value.abs() < 1e-14) {
        return Ok(DecayReport {
            grid: points.to_vec(),
            fitted_slope: None,
            threshold_pass: true,
            degenerate: true,
        });
    }
    if points.iter().any(|p| !(p.abs_value > 0.0)) {
        return Err(Error::DegenerateFit("values must be positive"));
    }
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for p in points {
        let x = p.s.ln();
        let y = p.abs_value.ln();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    Ok(DecayReport {
        grid: points.to_vec(),
        fitted_slope: Some(slope),
        threshold_pass: slope <= max_slope,
        degenerate: false,
    })
}

impl DecayReport {
    /// CSV export with columns (s, abs_value, std_err).
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> std::io::Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["s", "abs_value", "std_err"])?;
        for p in &self.grid {
            wtr.write_record([
                format!("{:.6}", p.s),
                format!("{:.12e}", p.abs_value),
                format!("{:.3e}", p.std_err),
            ])?;
        }
        wtr.flush()
    }

    /// JSON export including the fitted slope and pass flags.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable report")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{make_m, random_k0, KCoset};
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn chi_properties() {
        let chi = CutoffChi::standard();
        assert_eq!(chi.eval(0.0), 1.0);
        assert_eq!(chi.eval(1.0), 0.0);
        assert_eq!(chi.eval(-1.2), 0.0);
        assert!(chi.integral() > 1.1 && chi.integral() < 1.3);
        // derivative bounds grow with the order and are attained maxima
        assert!(chi.derivative_bounds[0] > 1.0 && chi.derivative_bounds[0] < 3.0);
        for i in 1..8 {
            assert!(chi.derivative_bounds[i] > chi.derivative_bounds[i - 1]);
        }
        assert_eq!(CutoffChi::zero().integral(), 0.0);
    }

    #[test]
    fn int1d_a_with_central_k_reduces_to_plain_integral() {
        // for k in M, the phase is (s' - s) t' plus a constant, so at
        // s' = s the modulus is the plain integral of the cutoff
        let chi = CutoffChi::standard();
        let k = make_m(0.7, -0.4);
        let v = int1d_a(&chi, 37.0, 37.0, &k, c(0.2, 0.1), -0.1, 0.15).unwrap();
        assert!((v.norm() - chi.integral()).abs() < 1e-10);
    }

    #[test]
    fn int1d_zero_cutoff() {
        let chi = CutoffChi::zero();
        let k = random_k0(&mut StdRng::seed_from_u64(2));
        assert_eq!(
            int1d_a(&chi, 50.0, 50.0, &k, c(0.0, 0.0), 0.0, 0.0).unwrap(),
            c(0.0, 0.0)
        );
        assert_eq!(
            int1d_phi(&chi, 50.0, 50.0, c(0.1, 0.0), 0.0, 0.0).unwrap(),
            c(0.0, 0.0)
        );
    }

    #[test]
    fn j_reduces_at_identity() {
        // at g = e with s1 = s2 the double integral collapses to the
        // autocorrelation of the cutoff against the radial factor
        let chi = CutoffChi::standard();
        let s = 25.0;
        let s1 = 25.0;
        let j = integral_j(s, s1, s1, &GroupElement::identity(), &chi).unwrap();
        let table = PhiTable::build(s, 2.3).unwrap();
        let (oracle, _) = integrate_adaptive_c(
            |u| {
                let corr =
                    crate::quad::integrate_gl(|v| chi.eval(v) * chi.eval(u + v), -1.0, 1.0, 96);
                c(0.0, s1 * u).exp() * (corr * table.eval(u))
            },
            -2.0,
            2.0,
            1e-12,
            1e-8,
            4096,
        )
        .unwrap();
        assert!(
            (j - oracle).norm() <= 1e-6 * oracle.norm().max(1e-9),
            "j = {j}, oracle = {oracle}"
        );
    }

    #[test]
    fn j_zero_cutoff() {
        let j = integral_j(
            40.0,
            40.0,
            40.0,
            &GroupElement::identity(),
            &CutoffChi::zero(),
        )
        .unwrap();
        assert_eq!(j, c(0.0, 0.0));
    }

    #[test]
    fn profile_is_normalized_and_band_limited() {
        let p = WindowedProfile::out_of_band(40.0, 32.0, 6.0).unwrap();
        assert!((p.l2_norm() - 1.0).abs() < 1e-6);
        assert!(p.band_leakage() < 1e-6, "leakage {}", p.band_leakage());
        // support inside the closed cylinder
        assert_eq!(p.eval(c(0.2, 0.0), 0.0, 0.1), 0.0);
        assert!(p.eval(c(0.05, 0.0), 0.05, 0.1).abs() > 0.0);
        let q = WindowedProfile::in_band(40.0, 16.0).unwrap();
        assert!((q.l2_norm() - 1.0).abs() < 1e-6);
        assert!(
            q.band_leakage() < 1e-6,
            "in-band leakage {}",
            q.band_leakage()
        );
        assert!(WindowedProfile::out_of_band(40.0, 32.0, 9.0).is_err());
    }

    #[test]
    fn certificate_at_identity() {
        // rho = 0, k = e: the t-component of the gradient at the center is
        // close to 1, so the min over a small box is positive
        let bounds = BoxBounds {
            x: 0.2,
            y: 0.2,
            tau: 0.2,
            t: 0.2,
        };
        let v = phase_gradient_certificate(&GroupElement::identity(), 0.0, &bounds, 6).unwrap();
        assert!(v > 0.5, "certificate {v}");
        assert!(phase_gradient_certificate(&GroupElement::identity(), 0.8, &bounds, 4).is_err());
    }

    #[test]
    fn certificate_k_section_component() {
        // at the section point alpha = 1, beta = 0 the t-component is 1 - rho
        let k = crate::group::make_k(&KCoset::new(c(1.0, 0.0), c(0.0, 0.0)).unwrap()).unwrap();
        let bounds = BoxBounds {
            x: 1e-6,
            y: 1e-6,
            tau: 1e-6,
            t: 1e-6,
        };
        let v = phase_gradient_certificate(&k, 0.0, &bounds, 2).unwrap();
        assert!((v - 1.0).abs() < 1e-4, "gradient {v}");
    }

    #[test]
    fn fit_decay_exact_power_law() {
        let pts: Vec<DecayPoint> = (1..=8)
            .map(|i| {
                let s = 10.0 * i as f64;
                DecayPoint {
                    s,
                    abs_value: s.powi(-3),
                    std_err: 0.0,
                }
            })
            .collect();
        let rep = fit_decay(&pts, -2.5).unwrap();
        assert!((rep.fitted_slope.unwrap() + 3.0).abs() < 1e-9);
        assert!(rep.threshold_pass);
        // constant data
        let flat: Vec<DecayPoint> = (1..=6)
            .map(|i| DecayPoint {
                s: i as f64,
                abs_value: 2.0,
                std_err: 0.0,
            })
            .collect();
        let rep = fit_decay(&flat, -1.0).unwrap();
        assert!(rep.fitted_slope.unwrap().abs() < 1e-12);
        assert!(!rep.threshold_pass);
        // all-noise data passes as degenerate
        let tiny: Vec<DecayPoint> = (1..=6)
            .map(|i| DecayPoint {
                s: i as f64,
                abs_value: 1e-16,
                std_err: 0.0,
            })
            .collect();
        let rep = fit_decay(&tiny, -3.0).unwrap();
        assert!(rep.degenerate && rep.threshold_pass && rep.fitted_slope.is_none());
        // malformed input
        assert!(fit_decay(&tiny[0..3], -3.0).is_err());
    }

    #[test]
    fn decay_report_serialization() {
        let pts: Vec<DecayPoint> = (1..=5)
            .map(|i| DecayPoint {
                s: i as f64,
                abs_value: 1.0 / i as f64,
                std_err: 1e-4,
            })
            .collect();
        let rep = fit_decay(&pts, -0.5).unwrap();
        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("s,abs_value,std_err\n"));
        assert_eq!(text.lines().count(), 6);
        let json = rep.to_json();
        assert!(json.contains("fitted_slope"));
    }

    #[test]
    fn halton_is_low_discrepancy_ish() {
        // crude equidistribution check on the first coordinate pair
        let n = 4096;
        let mut count = 0;
        for i in 0..n {
            let x = halton(i, 2);
            let y = halton(i, 3);
            if x < 0.5 && y < 0.5 {
                count += 1;
            }
        }
        let frac = count as f64 / n as f64;
        assert!((frac - 0.25).abs() < 0.01, "fraction {frac}");
    }
}
