//! Spherical-function harmonic analysis on the complex hyperbolic plane:
//! the spherical function through two independent backends, Helgason and
//! Harish-Chandra transforms, the Plancherel density with its calibrated
//! normalization, Paley-Wiener kernels built by spherical synthesis and
//! radial self-convolution, and the radial cutoff partition.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::geometry::{calibration_bump, dist_a, haar_weight, polar_density};
use crate::group::{a_explicit, KCoset};
use crate::interp::{CubicSpline, HermiteTable};
use crate::quad::integrate_adaptive;
use crate::{Error, Result};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Tempered spectral parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralParam(pub f64);

impl SpectralParam {
    pub fn new(s: f64) -> Result<Self> {
        if !s.is_finite() {
            return Err(Error::NonFinite("spectral parameter"));
        }
        Ok(SpectralParam(s))
    }
}

/// Even radial function tabulated on [0, support_radius].
#[derive(Debug, Clone)]
pub struct RadialFunction {
    spline: CubicSpline,
    pub support_radius: f64,
}

impl RadialFunction {
    /// Builds from samples on a nonnegative grid; the function is extended
    /// evenly and clamped to zero outside the support.
    pub fn from_samples(grid: Vec<f64>, values: Vec<f64>, support_radius: f64) -> Result<Self> {
        if grid.iter().chain(values.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("radial samples"));
        }
        if grid.first().map_or(true, |&g| g < 0.0) {
            return Err(Error::domain("radial grid must start at t >= 0"));
        }
        Ok(RadialFunction {
            spline: CubicSpline::new(grid, values),
            support_radius,
        })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let r = t.abs();
        if r >= self.support_radius {
            0.0
        } else {
            self.spline.eval(r)
        }
    }

    /// CSV export with columns (t, value).
    pub fn write_csv<W: std::io::Write>(&self, w: W, step: f64) -> std::io::Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["t", "value"])?;
        let mut t = 0.0;
        while t <= self.support_radius + step / 2.0 {
            wtr.write_record([format!("{t:.6}"), format!("{:.12e}", self.eval(t))])?;
            t += step;
        }
        wtr.flush()
    }
}

/// Which evaluation route the spherical function takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiBackend {
    /// Harish-Chandra integral over the compact group, by quadrature.
    KQuadrature,
    /// The radial second-order eigen-equation, integrated from a series
    /// start at the origin.
    RadialODE,
}

/// Spherical function by direct quadrature of the compact-group integral:
/// the integrand depends only on the first SU(2) coordinate, so the
/// Euler-angle product rule collapses to a (theta, phase) double rule with
/// measure sin(theta)/(4 pi) d(theta) d(psi).
fn phi_k_quadrature(s: f64, t: f64, tol: f64) -> Result<(f64, f64)> {
    let integrand = |alpha: Complex64| -> Complex64 {
        // A(k(alpha, beta) a(t)) = t - log |(alpha+1)/2 - (alpha-1) e^t / 2|^2
        let f = (alpha + 1.0) * 0.5 - (alpha - 1.0) * 0.5 * t.exp();
        let a = t - f.norm_sqr().ln();
        (c(1.0, s) * a).exp()
    };
    let mut prev: Option<Complex64> = None;
    let mut n = 16usize;
    while n <= 2048 {
        let (nodes, weights) = crate::quad::gauss_legendre(n);
        let mut acc = c(0.0, 0.0);
        for i in 0..n {
            // theta in [0, pi], weight sin(theta)/2
            let theta = std::f64::consts::PI * 0.5 * (nodes[i] + 1.0);
            let w = weights[i] * std::f64::consts::PI * 0.5 * theta.sin() * 0.5;
            let rho = (theta / 2.0).cos();
            // phase average over the alpha circle of radius rho
            let m = n.max(8);
            let mut ring = c(0.0, 0.0);
            for j in 0..m {
                let psi = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
                ring += integrand(Complex64::from_polar(rho, psi));
            }
            acc += ring * (w / m as f64);
        }
        if let Some(p) = prev {
            if (acc - p).norm() <= tol * acc.norm().max(1.0) {
                return Ok((acc.re, acc.im));
            }
        }
        prev = Some(acc);
        n *= 2;
    }
    Err(Error::QuadratureNotConverged(
        "spherical K-integral escalation",
    ))
}

/// Dense solution table of the radial eigen-equation
/// u'' + (coth(t/2) + coth t) u' + (1 + s^2) u = 0, u(0) = 1, u'(0) = 0.
#[derive(Debug, Clone)]
pub struct PhiTable {
    pub s: f64,
    table: HermiteTable,
}

impl PhiTable {
    /// Builds the table out to `t_max`. The start uses the even series
    /// through t^6 to clear the coth singularity, then fixed-step RK4 with
    /// steps graded near the origin.
    pub fn build(s: f64, t_max: f64) -> Result<PhiTable> {
        Self::build_with_step(s, t_max, 1.0)
    }

    /// Same with a step multiplier; coarser steps trade accuracy for
    /// speed in bulk sweeps (the phase error scales like the fourth power
    /// of the multiplier).
    pub fn build_with_step(s: f64, t_max: f64, step_scale: f64) -> Result<PhiTable> {
        if !s.is_finite() || !t_max.is_finite() {
            return Err(Error::NonFinite("phi table parameters"));
        }
        let s = s.abs(); // phi_s = phi_{-s}
        let lam = 1.0 + s * s;
        let c2 = -lam / 8.0;
        let c4 = lam * (2.0 + lam) / 192.0;
        // t^4 balance: 48 c6 + 2 c4 - c2/20 + (1 + s^2)(c4 + ...) collected
        let c6 = (c2 / 20.0 - (2.0 + lam) * c4) / 48.0;
        let t_end = t_max.max(0.2);
        let t0 = 1e-3;
        let u0 = 1.0 + c2 * t0 * t0 + c4 * t0.powi(4) + c6 * t0.powi(6);
        let du0 = 2.0 * c2 * t0 + 4.0 * c4 * t0.powi(3) + 6.0 * c6 * t0.powi(5);
        let rhs = |t: f64, u: f64, du: f64| -> f64 {
            -((t / 2.0).tanh().recip() + t.tanh().recip()) * du - lam * u
        };
        let h_target = (step_scale * 0.005 / (1.0 + s)).min(1e-3);
        let mut ts = vec![0.0, t0];
        let mut us = vec![1.0, u0];
        let mut dus = vec![0.0, du0];
        let mut t = t0;
        let mut u = u0;
        let mut du = du0;
        while t < t_end {
            let h = h_target.min((t / 4.0).max(1e-4)).min(t_end - t);
            let k1u = du;
            let k1v = rhs(t, u, du);
            let k2u = du + 0.5 * h * k1v;
            let k2v = rhs(t + 0.5 * h, u + 0.5 * h * k1u, du + 0.5 * h * k1v);
            let k3u = du + 0.5 * h * k2v;
            let k3v = rhs(t + 0.5 * h, u + 0.5 * h * k2u, du + 0.5 * h * k2v);
            let k4u = du + h * k3v;
            let k4v = rhs(t + h, u + h * k3u, du + h * k3v);
            u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
            du += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            t += h;
            ts.push(t);
            us.push(u);
            dus.push(du);
        }
        Ok(PhiTable {
            s,
            table: HermiteTable::new(ts, us, dus),
        })
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.table.eval(t.abs())
    }

    pub fn t_max(&self) -> f64 {
        self.table.x_max()
    }
}

/// Spherical function phi_s(a(t)) through the selected backend; real for
/// real spectral parameter.
pub fn spherical_phi(s: SpectralParam, t: f64, backend: PhiBackend) -> Result<f64> {
    if !t.is_finite() {
        return Err(Error::NonFinite("radial coordinate"));
    }
    if t.abs() > 6.0 {
        return Err(Error::domain(
            "radial coordinate beyond the desk range |t| <= 6",
        ));
    }
    match backend {
        PhiBackend::KQuadrature => {
            let (re, im) = phi_k_quadrature(s.0, t, 1e-8)?;
            debug_assert!(im.abs() < 1e-7 * re.abs().max(1.0));
            Ok(re)
        }
        PhiBackend::RadialODE => Ok(PhiTable::build(s.0, t.abs())?.eval(t)),
    }
}

/// Harish-Chandra transform of a compactly supported radial function:
/// integral of f(t) phi_{-s}(a(t)) against the polar density.
pub fn hc_transform(f: &RadialFunction, s: SpectralParam) -> Result<f64> {
    let table = PhiTable::build(s.0, f.support_radius)?;
    hc_transform_with(f, &table)
}

/// Same as [`hc_transform`] with a caller-provided spherical table (the
/// table is symmetric in s, so it serves both signs).
pub fn hc_transform_with(f: &RadialFunction, phi: &PhiTable) -> Result<f64> {
    let (v, _) = integrate_adaptive(
        |t| f.eval(t) * phi.eval(t) * polar_density(t),
        0.0,
        f.support_radius,
        1e-12,
        1e-9,
        4096,
    )?;
    Ok(v)
}

/// Helgason transform of a compactly supported function on the plane at
/// spectral parameter s and boundary coset k: quadrature over Iwasawa
/// coordinates with the weight 4 e^{-2t}.
///
/// The function is sampled in Iwasawa coordinates (z, tau, t).
pub fn helgason_transform<F>(
    f: &F,
    support_radius: f64,
    s: SpectralParam,
    kcoset: &KCoset,
) -> Result<Complex64>
where
    F: Fn(Complex64, f64, f64) -> f64,
{
    if support_radius > 3.0 {
        return Err(Error::domain("support radius beyond desk range 3"));
    }
    let r = support_radius;
    let rho_max = (r.cosh() - 1.0).sqrt() * 1.001;
    let tau_max = (2.0 * r.exp() * (r.cosh() - 1.0)).sqrt() * 1.001;
    let mut prev: Option<Complex64> = None;
    for order in [16usize, 24, 32, 44, 60, 80] {
        let (nodes, weights) = crate::quad::gauss_legendre(order);
        let map = |i: usize, a: f64, b: f64| {
            let m = 0.5 * (a + b);
            let h = 0.5 * (b - a);
            (m + h * nodes[i], h * weights[i])
        };
        let mut acc = c(0.0, 0.0);
        for it in 0..order {
            let (t, wt) = map(it, -r, r);
            for ix in 0..order {
                let (x, wx) = map(ix, -rho_max, rho_max);
                for iy in 0..order {
                    let (y, wy) = map(iy, -rho_max, rho_max);
                    for itau in 0..order {
                        let (tau, wtau) = map(itau, -tau_max, tau_max);
                        let z = c(x, y);
                        let fv = f(z, tau, t);
                        if fv == 0.0 {
                            continue;
                        }
                        let a = a_explicit(0.0, kcoset, z, tau, t);
                        let kernel = (c(1.0, -s.0) * a).exp();
                        acc += kernel * (fv * haar_weight(t) * wt * wx * wy * wtau);
                    }
                }
            }
        }
        if let Some(p) = prev {
            if (acc - p).norm() <= 1e-7 + 1e-6 * acc.norm() {
                return Ok(acc);
            }
        }
        prev = Some(acc);
    }
    Err(Error::QuadratureNotConverged(
        "Helgason transform escalation",
    ))
}

/// Shape of the Plancherel density: s^3 coth(pi s), series-stabilized near
/// the origin. This is the rank-one density for root multiplicities (2, 1)
/// up to the overall calibrated constant.
pub fn plancherel_shape(s: f64) -> f64 {
    let x = std::f64::consts::PI * s;
    if x.abs() < 1e-2 {
        s * s / std::f64::consts::PI + std::f64::consts::PI * s.powi(4) / 3.0
    } else {
        s * s * s / x.tanh()
    }
}

/// Calibration of the overall Plancherel constant: for a radial bump f,
/// Fourier inversion at the origin reads f(o) = integral of f^(s) d nu(s),
/// which pins the constant multiplying the shape.
fn calibrate_plancherel_constant() -> f64 {
    let radius = 1.0;
    let grid: Vec<f64> = {
        let n = 160;
        (0..=n).map(|i| radius * i as f64 / n as f64).collect()
    };
    let values: Vec<f64> = grid.iter().map(|&t| calibration_bump(t / radius)).collect();
    let f = RadialFunction::from_samples(grid, values, radius).expect("finite bump");
    let f_origin = calibration_bump(0.0);
    let integral = spectral_integral_of_hc(&f, 400.0);
    f_origin / integral
}

/// Spectral-side integral of f^(s) d nu(s) / (calibrated constant): the
/// composite-Simpson sum of hc(f)(s) * shape(s) up to `s_max`, stopping
/// early once the integrand stays negligible.
pub fn spectral_integral_of_hc(f: &RadialFunction, s_max: f64) -> f64 {
    let ds = 0.25;
    let n = ((s_max / ds) as usize) & !1; // even count for Simpson
    let mut acc = 0.0;
    let mut small_run = 0usize;
    let scale = f.eval(0.0).abs().max(1e-12);
    for k in 0..=n {
        let s = k as f64 * ds;
        let table = PhiTable::build_with_step(s, f.support_radius, 4.0).expect("table");
        let fhat = hc_transform_with(f, &table).expect("transform");
        let term = fhat * plancherel_shape(s);
        let w = if k == 0 || k == n {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += w * term;
        if term.abs() < 1e-10 * scale {
            small_run += 1;
            if small_run > 60 {
                break;
            }
        } else {
            small_run = 0;
        }
    }
    acc * ds / 3.0
}

static PLANCHEREL_CONSTANT: OnceLock<f64> = OnceLock::new();

/// The calibrated constant multiplying [`plancherel_shape`].
pub fn plancherel_constant() -> f64 {
    *PLANCHEREL_CONSTANT.get_or_init(calibrate_plancherel_constant)
}

/// Plancherel density d nu / ds at s >= 0.
pub fn plancherel_density(s: SpectralParam) -> f64 {
    plancherel_constant() * plancherel_shape(s.0)
}

/// Parameters of the Paley-Wiener window h(s) = (sin(c s)/(c s))^exponent.
#[derive(Debug, Clone, Copy)]
pub struct PaleyWienerSpec {
    pub c: f64,
    pub exponent: u32,
}

impl Default for PaleyWienerSpec {
    fn default() -> Self {
        // even exponent >= 6 keeps h * s^3 absolutely integrable against
        // the Plancherel growth; with c = 1/16 the synthesized kernel
        // lives in [-3/4, 3/4], comfortably inside the unit window.
        PaleyWienerSpec {
            c: 1.0 / 16.0,
            exponent: 6,
        }
    }
}

impl PaleyWienerSpec {
    pub fn new(c: f64, exponent: u32) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::domain("frequency scale must be positive"));
        }
        if exponent % 2 != 0 || exponent < 4 {
            return Err(Error::domain("exponent must be an even integer >= 4"));
        }
        Ok(PaleyWienerSpec { c, exponent })
    }

    /// The window value h(u).
    pub fn h(&self, u: f64) -> f64 {
        crate::group::sinc(self.c * u).powi(self.exponent as i32)
    }

    /// h0_lambda(s) = h(s - lambda) + h(-s - lambda).
    pub fn h0(&self, lambda: f64, s: f64) -> f64 {
        self.h(s - lambda) + self.h(-s - lambda)
    }

    /// Predicted support radius of the synthesized kernel.
    pub fn support_radius(&self) -> f64 {
        self.c * self.exponent as f64
    }
}

/// A Paley-Wiener pair: the radial kernel with transform concentrated at
/// lambda, together with the spec that built it.
#[derive(Debug, Clone)]
pub struct KLambda {
    pub lambda: f64,
    pub spec: PaleyWienerSpec,
    pub kernel: RadialFunction,
    /// First-stage kernel (before self-convolution), kept for diagnostics.
    pub half_kernel: RadialFunction,
}

/// Builds the kernel k_lambda: spherical synthesis of h0_lambda into the
/// half kernel, radial self-convolution, and renormalization so the
/// transform matches (h0_lambda)^2 at s = lambda.
pub fn build_klambda(lambda: f64, spec: &PaleyWienerSpec) -> Result<KLambda> {
    if !(lambda >= 10.0) {
        return Err(Error::domain("lambda must be >= 10 at desk scale"));
    }
    if spec.exponent < 6 {
        // with exponent 4 the synthesis integral against the s^3 density
        // is not absolutely convergent
        return Err(Error::domain(
            "exponent 4 does not decay against the s^3 Plancherel growth; use >= 6",
        ));
    }
    let r0 = spec.support_radius();
    let c_pl = plancherel_constant();

    // --- stage 1: half kernel on [0, 1.25 r0] by spectral synthesis
    let dr = (0.1 / lambda).min(1.5e-3);
    let r_max = 1.25 * r0;
    let n_r = (r_max / dr).ceil() as usize;
    let r_grid: Vec<f64> = (0..=n_r).map(|i| i as f64 * dr).collect();
    let ds = 0.25;
    let s_max = lambda + (4.0 * lambda).max(400.0);
    let n_s = ((s_max / ds).ceil() as usize) | 1; // odd for Simpson pairs
    let mut half = vec![0.0f64; r_grid.len()];
    for k in 0..=n_s {
        let s = k as f64 * ds;
        let weight = if k == 0 || k == n_s {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        } * ds
            / 3.0;
        let amp = spec.h0(lambda, s) * c_pl * plancherel_shape(s) * weight;
        if amp == 0.0 {
            continue;
        }
        let table = PhiTable::build(s, r_max)?;
        for (i, &r) in r_grid.iter().enumerate() {
            half[i] += amp * table.eval(r);
        }
    }
    let half_kernel = RadialFunction::from_samples(r_grid.clone(), half, r0)?;

    // --- stage 2: radial self-convolution on [0, 1.1 * 2 r0]
    let conv_r_max = 2.2 * r0;
    let n_cr = (conv_r_max / dr).ceil() as usize;
    let cr_grid: Vec<f64> = (0..=n_cr).map(|i| i as f64 * dr).collect();
    let conv = radial_convolution_samples(&half_kernel, &half_kernel, &cr_grid, 48);

    // measured support against the Paley-Wiener prediction
    let peak = conv.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut measured = 0.0;
    for (i, v) in conv.iter().enumerate() {
        if v.abs() > 1e-8 * peak {
            measured = cr_grid[i];
        }
    }
    if measured > 2.0 * r0 * 1.05 {
        return Err(Error::SupportOverflow {
            measured,
            predicted: 2.0 * r0,
        });
    }

    let kernel_raw = RadialFunction::from_samples(cr_grid.clone(), conv.clone(), 2.0 * r0)?;
    // renormalize: the transform at s = lambda must equal h0(lambda)^2
    let target = spec.h0(lambda, lambda).powi(2);
    let measured_peak = hc_transform(&kernel_raw, SpectralParam(lambda))?;
    if measured_peak.abs() < 1e-12 {
        return Err(Error::QuadratureNotConverged("kernel transform vanished"));
    }
    let scale = target / measured_peak;
    let conv_scaled: Vec<f64> = conv.iter().map(|v| v * scale).collect();
    let kernel = RadialFunction::from_samples(cr_grid, conv_scaled, 2.0 * r0)?;
    Ok(KLambda {
        lambda,
        spec: *spec,
        kernel,
        half_kernel,
    })
}

/// Samples of the group convolution of two radial functions at the given
/// radii. (f x g)(a(r) . o) reduces to a 3-d Iwasawa integral over
/// (rho, tau, t) with the second radius read off after conjugating by
/// a(-r); the z-angle is integrated analytically.
pub fn radial_convolution_samples(
    f: &RadialFunction,
    g: &RadialFunction,
    radii: &[f64],
    order: usize,
) -> Vec<f64> {
    let rf = f.support_radius;
    let rg = g.support_radius;
    let rho_max = (rf.cosh() - 1.0).sqrt() * 1.001;
    let tau_max = (2.0 * rf.exp() * (rf.cosh() - 1.0)).sqrt() * 1.001;
    let (nodes, weights) = crate::quad::gauss_legendre(order);
    let map = |i: usize, a: f64, b: f64| {
        let m = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        (m + h * nodes[i], h * weights[i])
    };
    radii
        .iter()
        .map(|&r| {
            let er2 = (-r / 2.0).exp();
            let er = (-r).exp();
            let mut acc = 0.0;
            for it in 0..order {
                let (t, wt) = map(it, -rf, rf);
                for itau in 0..order {
                    let (tau, wtau) = map(itau, -tau_max, tau_max);
                    for irho in 0..order {
                        let (rho, wrho) = map(irho, 0.0, rho_max);
                        let a1 = dist_a(c(rho, 0.0), tau, t);
                        if a1 >= rf {
                            continue;
                        }
                        let v1 = f.eval(a1);
                        if v1 == 0.0 {
                            continue;
                        }
                        let a2 = dist_a(c(er2 * rho, 0.0), er * tau, t - r);
                        if a2 >= rg {
                            continue;
                        }
                        let v2 = g.eval(a2);
                        acc += v1
                            * v2
                            * haar_weight(t)
                            * 2.0
                            * std::f64::consts::PI
                            * rho
                            * wt
                            * wtau
                            * wrho;
                    }
                }
            }
            acc
        })
        .collect()
}

/// Smooth transition equal to 1 for u <= 1 and 0 for u >= 2. The
/// exp(-1/v^2) bridge decays faster in frequency than the exp(-1/v) one,
/// which keeps the spectral leakage of the radial cutoffs small.
fn smooth_step_down(u: f64) -> f64 {
    let f = |v: f64| if v > 0.0 { (-1.0 / (v * v)).exp() } else { 0.0 };
    let num = f(2.0 - u);
    let den = num + f(u - 1.0);
    if den == 0.0 {
        if u <= 1.0 {
            1.0
        } else {
            0.0
        }
    } else {
        num / den
    }
}

/// The radial cutoff partition: b0 is an even bump equal to 1 on [-1, 1]
/// and 0 outside [-2, 2]; b1(t) = b0(beta^{1/2 - eps0} t); b2 = b0 - b1.
pub fn cutoff_b(i: u8, beta: f64, eps0: f64, t: f64) -> Result<f64> {
    if !(beta >= 4.0) {
        return Err(Error::domain("beta must be >= 4"));
    }
    if !(eps0 > 0.0 && eps0 < 0.125) {
        return Err(Error::domain("eps0 must lie in (0, 1/8)"));
    }
    let b0 = smooth_step_down(t.abs());
    let b1 = smooth_step_down((beta.powf(0.5 - eps0) * t).abs());
    Ok(match i {
        0 => b0,
        1 => b1,
        2 => b0 - b1,
        _ => return Err(Error::domain("cutoff index must be 0, 1, or 2")),
    })
}

/// Transform of the near cutoff of the kernel: the Harish-Chandra
/// transform of b1 * k_lambda, by polar quadrature.
pub fn k1_hat(k: &KLambda, s: SpectralParam, beta: f64, eps0: f64) -> Result<f64> {
    let width = 2.0 * beta.powf(-0.5 + eps0);
    let upper = width.min(k.kernel.support_radius);
    let table = PhiTable::build(s.0, upper)?;
    let (v, _) = integrate_adaptive(
        |t| {
            let b1 = cutoff_b(1, beta, eps0, t).expect("validated parameters");
            b1 * k.kernel.eval(t) * table.eval(t) * polar_density(t)
        },
        0.0,
        upper,
        1e-12,
        1e-9,
        4096,
    )?;
    Ok(v)
}

/// Convolution of two compactly supported functions where the right factor
/// is radial, evaluated at one point given in Iwasawa coordinates. The
/// integral runs over Iwasawa coordinates of the left factor.
pub fn convolve_with_radial<F>(
    f: &F,
    f_radius: f64,
    g: &RadialFunction,
    z0: Complex64,
    tau0: f64,
    t0: f64,
    order: usize,
) -> f64
where
    F: Fn(Complex64, f64, f64) -> f64,
{
    let r = f_radius;
    let rho_max = (r.cosh() - 1.0).sqrt() * 1.001;
    let tau_max = (2.0 * r.exp() * (r.cosh() - 1.0)).sqrt() * 1.001;
    let (nodes, weights) = crate::quad::gauss_legendre(order);
    let map = |i: usize, a: f64, b: f64| {
        let m = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        (m + h * nodes[i], h * weights[i])
    };
    let mut acc = 0.0;
    for it in 0..order {
        let (t, wt) = map(it, -r, r);
        for ix in 0..order {
            let (x, wx) = map(ix, -rho_max, rho_max);
            for iy in 0..order {
                let (y, wy) = map(iy, -rho_max, rho_max);
                for itau in 0..order {
                    let (tau, wtau) = map(itau, -tau_max, tau_max);
                    let z = c(x, y);
                    let fv = f(z, tau, t);
                    if fv == 0.0 {
                        continue;
                    }
                    // distance from y = n(z,tau)a(t).o to x0 = n(z0,tau0)a(t0).o
                    let (zr, taur) = crate::geometry::relative_coords(z, tau, t, z0, tau0, t0);
                    let d = dist_a(zr, taur, t0 - t);
                    let gv = g.eval(d);
                    if gv == 0.0 {
                        continue;
                    }
                    acc += fv * gv * haar_weight(t) * wt * wx * wy * wtau;
                }
            }
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_at_origin_is_one() {
        for s in [0.0, 1.0, 5.0, 20.0] {
            let v = spherical_phi(SpectralParam(s), 0.0, PhiBackend::KQuadrature).unwrap();
            assert!((v - 1.0).abs() < 1e-10, "s = {s}: {v}");
            let v = spherical_phi(SpectralParam(s), 0.0, PhiBackend::RadialODE).unwrap();
            assert!((v - 1.0).abs() < 1e-10, "s = {s}: {v}");
        }
    }

    #[test]
    fn phi_symmetric_in_s() {
        for s in [1.0, 5.0, 20.0] {
            for t in [0.5, 1.0, 2.0] {
                let a = spherical_phi(SpectralParam(s), t, PhiBackend::KQuadrature).unwrap();
                let b = spherical_phi(SpectralParam(-s), t, PhiBackend::KQuadrature).unwrap();
                assert!((a - b).abs() < 1e-8, "s = {s}, t = {t}");
            }
        }
    }

    #[test]
    fn phi_backends_agree() {
        for s in [1.0, 5.0, 20.0, 50.0] {
            for t in [0.1, 0.5, 1.0, 2.0, 3.0] {
                let a = spherical_phi(SpectralParam(s), t, PhiBackend::KQuadrature).unwrap();
                let b = spherical_phi(SpectralParam(s), t, PhiBackend::RadialODE).unwrap();
                assert!((a - b).abs() < 1e-6, "s = {s}, t = {t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn phi_bounded_by_one() {
        for s in [2.0, 10.0, 40.0] {
            let table = PhiTable::build(s, 4.0).unwrap();
            for i in 0..200 {
                let t = i as f64 * 0.02;
                assert!(table.eval(t).abs() <= 1.0 + 1e-9);
            }
        }
    }

    #[test]
    fn eigen_equation_residual_of_k_quadrature_samples() {
        // validates the measure identification behind the K-integral
        let h = 1e-3;
        for s in [1.0, 2.0] {
            for t in [0.4, 0.8, 1.3] {
                let f =
                    |u: f64| spherical_phi(SpectralParam(s), u, PhiBackend::KQuadrature).unwrap();
                let u0 = f(t);
                let up = f(t + h);
                let um = f(t - h);
                let d1 = (up - um) / (2.0 * h);
                let d2 = (up - 2.0 * u0 + um) / (h * h);
                let residual =
                    d2 + ((t / 2.0).tanh().recip() + t.tanh().recip()) * d1 + (1.0 + s * s) * u0;
                assert!(
                    residual.abs() < 1e-4,
                    "s = {s}, t = {t}: residual {residual}"
                );
            }
        }
    }

    #[test]
    fn hc_transform_of_zero() {
        let grid: Vec<f64> = (0..=10).map(|i| i as f64 * 0.1).collect();
        let f = RadialFunction::from_samples(grid, vec![0.0; 11], 1.0).unwrap();
        assert_eq!(hc_transform(&f, SpectralParam(3.0)).unwrap(), 0.0);
    }

    #[test]
    fn hc_transform_symmetric_in_s() {
        let grid: Vec<f64> = (0..=100).map(|i| i as f64 * 0.01).collect();
        let vals: Vec<f64> = grid.iter().map(|&t| calibration_bump(t)).collect();
        let f = RadialFunction::from_samples(grid, vals, 1.0).unwrap();
        let a = hc_transform(&f, SpectralParam(7.0)).unwrap();
        let b = hc_transform(&f, SpectralParam(-7.0)).unwrap();
        assert!((a - b).abs() < 1e-8);
    }

    #[test]
    fn plancherel_shape_behavior() {
        // ratio to s^3 stays in a narrow band for s >= 10
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        let mut s = 10.0;
        while s <= 100.0 {
            let r = plancherel_shape(s) / (s * s * s);
            lo = lo.min(r);
            hi = hi.max(r);
            s += 1.0;
        }
        assert!(hi / lo < 4.0, "band [{lo}, {hi}]");
        assert!(plancherel_shape(0.0) >= 0.0 && plancherel_shape(0.0).is_finite());
        // continuity across the series switch
        let a = plancherel_shape(1e-2 / std::f64::consts::PI - 1e-9);
        let b = plancherel_shape(1e-2 / std::f64::consts::PI + 1e-9);
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn cutoff_partition() {
        let beta = 16.0;
        let eps0 = 0.1;
        assert_eq!(cutoff_b(1, beta, eps0, 0.0).unwrap(), 1.0);
        let w = beta.powf(-0.5 + eps0);
        assert_eq!(cutoff_b(1, beta, eps0, 3.0 * w).unwrap(), 0.0);
        // b0 = b1 + b2 pointwise exactly
        for i in 0..100 {
            let t = -2.5 + i as f64 * 0.05;
            let b0 = cutoff_b(0, beta, eps0, t).unwrap();
            let b1 = cutoff_b(1, beta, eps0, t).unwrap();
            let b2 = cutoff_b(2, beta, eps0, t).unwrap();
            assert_eq!(b0 - b1 - b2, 0.0);
        }
        assert!(cutoff_b(1, 2.0, eps0, 0.0).is_err());
        assert!(cutoff_b(1, beta, 0.2, 0.0).is_err());
    }

    #[test]
    fn cutoff_derivatives_scale_with_beta() {
        // finite differences of order n of b1 scale like (beta^{1/2-eps0})^n
        let eps0 = 0.1;
        let h = 1e-3;
        let max_fd = |beta: f64, order: u32| -> f64 {
            let f = |t: f64| cutoff_b(1, beta, eps0, t).unwrap();
            let mut m = 0.0f64;
            for i in 0..800 {
                let t = -2.0 + i as f64 * 0.005;
                let d = match order {
                    1 => (f(t + h) - f(t - h)) / (2.0 * h),
                    2 => (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h),
                    3 => {
                        (f(t + 2.0 * h) - 2.0 * f(t + h) + 2.0 * f(t - h) - f(t - 2.0 * h))
                            / (2.0 * h * h * h)
                    }
                    _ => unreachable!(),
                };
                m = m.max(d.abs());
            }
            m
        };
        for order in [1u32, 2, 3] {
            let a = max_fd(16.0, order);
            let b = max_fd(64.0, order);
            let predicted = (64.0f64 / 16.0).powf(order as f64 * (0.5 - eps0));
            let measured = b / a;
            assert!(
                measured / predicted > 0.5 && measured / predicted < 2.0,
                "order {order}: measured ratio {measured}, predicted {predicted}"
            );
        }
    }

    #[test]
    fn paley_wiener_spec_guards() {
        assert!(PaleyWienerSpec::new(0.0625, 6).is_ok());
        assert!(PaleyWienerSpec::new(0.0625, 5).is_err());
        assert!(PaleyWienerSpec::new(0.0625, 2).is_err());
        assert!(PaleyWienerSpec::new(-1.0, 6).is_err());
        let spec = PaleyWienerSpec::default();
        assert_eq!(spec.h(0.0), 1.0);
        assert!(spec.h(7.3) >= 0.0);
        // build rejects the divergent exponent-4 choice
        let bad = PaleyWienerSpec {
            c: 1.0 / 16.0,
            exponent: 4,
        };
        assert!(matches!(
            build_klambda(40.0, &bad),
            Err(Error::DomainViolation(_))
        ));
    }

    #[test]
    fn radial_function_csv() {
        let grid: Vec<f64> = (0..=10).map(|i| i as f64 * 0.1).collect();
        let vals: Vec<f64> = grid.iter().map(|&t| 1.0 - t).collect();
        let f = RadialFunction::from_samples(grid, vals, 1.0).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf, 0.25).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,value\n"));
        assert_eq!(text.lines().count(), 6);
    }
}
