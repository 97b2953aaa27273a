//! The verification suites: each one runs the checks of one acceptance
//! area at the configured thresholds and returns a report. A check that
//! errors is recorded as a failure without aborting the suite.

use std::time::Instant;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use hyplane::geometry::{
    self, calibrate_polar_constant, calibration_bump, cartan_radius, dist_a, dist_a_dt,
};
use hyplane::group::{
    a_derivatives, a_explicit, a_proj, dist_to_subgroup, grad_k_a, iwasawa, make_a, make_k, make_n,
    mk_coords, phi_action, random_group_element, random_k0, uniformization_xi, GroupElement,
    KCoset, SubgroupTag,
};
use hyplane::harmonic::{
    build_klambda, hc_transform, helgason_transform, k1_hat, plancherel_shape,
    radial_convolution_samples, spectral_integral_of_hc, spherical_phi, KLambda, PaleyWienerSpec,
    PhiBackend, PhiTable, RadialFunction, SpectralParam,
};
use hyplane::hecke::{amplifier_t, tt_star_expansion, HeckeAlgebra, HeckeElement, Signature};
use hyplane::linalg::frobenius;
use hyplane::oscillatory::{
    fit_decay, int1d_a, int1d_phi, integral_i, integral_j, integral_j2, integral_j2_qmc,
    pair_with_kernel, phase_gradient_certificate, split_i, BoxBounds, CutoffChi, CylinderCutoff,
    DecayPoint, QmcOpts, RadialKernel, WindowedProfile,
};

use crate::config::{ExperimentConfig, SuiteKind};
use crate::report::{CheckRecord, SuiteReport};

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Records the outcome of one named check; an error becomes a failing
/// record carrying NaN.
fn check(
    records: &mut Vec<CheckRecord>,
    name: &str,
    threshold: f64,
    f: impl FnOnce() -> hyplane::Result<(f64, bool)>,
) {
    match f() {
        Ok((measured, pass)) => records.push(CheckRecord::new(name, measured, threshold, pass)),
        Err(e) => {
            records.push(CheckRecord::new(
                format!("{name} [error: {e}]"),
                f64::NAN,
                threshold,
                false,
            ));
        }
    }
}

/// Runs the configured suite and returns its report (artifacts are written
/// into the configured output directory by the caller through
/// [`crate::report::emit_report`]; the decay suite additionally writes its
/// sweep files here).
pub fn run_suite(cfg: &ExperimentConfig) -> SuiteReport {
    let start = Instant::now();
    let records = match cfg.suite {
        SuiteKind::Group => run_group(cfg),
        SuiteKind::Geometry => run_geometry(cfg),
        SuiteKind::Spherical => run_spherical(cfg),
        SuiteKind::Transforms => run_transforms(cfg),
        SuiteKind::DecayJ => run_decay_j(cfg),
        SuiteKind::DecayI => run_decay_i(cfg),
        SuiteKind::SplitI => run_split_i(cfg),
        SuiteKind::Hecke => run_hecke(cfg),
    };
    let mut report = SuiteReport::new(
        cfg.suite.name(),
        cfg.seed,
        cfg.non_default_thresholds(),
        records,
    );
    report.runtime_seconds = start.elapsed().as_secs_f64();
    report
}

// ---------------------------------------------------------------------------
// group structure and derivatives

pub fn run_group(cfg: &ExperimentConfig) -> Vec<CheckRecord> {
    let th = &cfg.thresholds;
    let mut records = Vec::new();
    let block = Instant::now();

    // Iwasawa round trip on random elements within chart distance 2
    check(
        &mut records,
        "iwasawa_roundtrip_max",
        th.iwasawa_roundtrip,
        || {
            let mut rng = StdRng::seed_from_u64(cfg.seed ^ 0x11);
            let samples: Vec<GroupElement> = (0..cfg.quadrature.sample_large)
                .map(|_| random_group_element(&mut rng, 2.0))
                .collect();
            let worst = samples
                .par_iter()
                .map(|g| {
                    let iw = iwasawa(g)?;
                    Ok(frobenius(&iw.reconstruct()?.mat.sub(&g.mat)))
                })
                .try_reduce(|| 0.0f64, |a, b| Ok(a.max(b)))?;
            Ok((worst, worst <= th.iwasawa_roundtrip))
        },
    );

    check(&mut records, "phi_action_law_max", th.action_law, || {
        let mut rng = StdRng::seed_from_u64(cfg.seed ^ 0x12);
        let mut worst = 0.0f64;
        for _ in 0..200 {
            let g = random_group_element(&mut rng, 0.8);
            let h = random_group_element(&mut rng, 0.8);
            let k = random_k0(&mut rng);
            let lhs = phi_action(&g.mul(&h), &k)?;
            let rhs = phi_action(&h, &phi_action(&g, &k)?)?;
            worst = worst.max(frobenius(&lhs.mat.sub(&rhs.mat)));
        }
        Ok((worst, worst <= th.action_law))
    });

    check(&mut records, "a_splitting_max", th.a_splitting, || {
        let mut rng = StdRng::seed_from_u64(cfg.seed ^ 0x13);
        let mut worst = 0.0f64;
        for _ in 0..200 {
            let k = random_k0(&mut rng);
            let y = random_group_element(&mut rng, 0.8);
            let z = random_group_element(&mut rng, 0.8);
            let lhs = a_proj(&k.mul(&y.inverse()).mul(&z))?;
            let phik = phi_action(&y.inverse(), &k)?;
            let rhs = a_proj(&phik.mul(&z))? - a_proj(&phik.mul(&y))?;
            worst = worst.max((lhs - rhs).abs());
        }
        Ok((worst, worst <= th.a_splitting))
    });

    check(
        &mut records,
        "explicit_a_formula_max",
        th.explicit_a,
        || {
            let mut rng = StdRng::seed_from_u64(cfg.seed ^ 0x14);
            let mut worst = 0.0f64;
            for _ in 0..cfg.quadrature.sample_small {
                let g = random_group_element(&mut rng, 1.0);
                let iw = iwasawa(&g)?;
                let mk = mk_coords(&iw.k)?;
                let z = c64(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
                let tau = rng.gen::<f64>() - 0.5;
                let t = rng.gen::<f64>() - 0.5;
                let direct = a_proj(&g.mul(&make_n(z, tau)?).mul(&make_a(t)?))?;
                let formula = a_explicit(iw.t, &mk.coset, z, tau, t);
                worst = worst.max((direct - formula).abs());
            }
            Ok((worst, worst <= th.explicit_a))
        },
    );

    let group_runtime = block.elapsed().as_secs_f64();
    records.push(CheckRecord::new(
        "runtime_group_block_seconds",
        group_runtime,
        30.0,
        group_runtime < 30.0,
    ));

    let block = Instant::now();

    check(
        &mut records,
        "a_derivatives_fd_max",
        th.derivative_fd,
        || {
            let mut rng = StdRng::seed_from_u64(cfg.seed ^ 0x15);
            let h = 1e-5;
            let mut worst = 0.0f64;
            for _ in 0..cfg.quadrature.sample_small {
                let g = random_group_element(&mut rng, 1.0);
                let d = a_derivatives(&g)?;
                let fd = |gp: GroupElement, gm: GroupElement| -> hyplane::Result<f64> {
                    Ok((a_proj(&gp)? - a_proj(&gm)?) / (2.0 * h))
                };
                let dt = fd(g.mul(&make_a(h)?), g.mul(&make_a(-h)?))?;
                let dx = fd(
                    g.mul(&make_n(c64(h, 0.0), 0.0)?),
                    g.mul(&make_n(c64(-h, 0.0), 0.0)?),
                )?;
                let dy = fd(
                    g.mul(&make_n(c64(0.0, h), 0.0)?),
                    g.mul(&make_n(c64(0.0, -h), 0.0)?),
                )?;
                let dtau = fd(
                    g.mul(&make_n(c64(0.0, 0.0), h)?),
                    g.mul(&make_n(c64(0.0, 0.0), -h)?),
                )?;
                worst = worst
                    .max((d.dt - dt).abs())
                    .max((d.dx - dx).abs())
                    .max((d.dy - dy).abs())
                    .max((d.dtau - dtau).abs());
            }
            Ok((worst, worst <= th.derivative_fd))
        },
    );

    check(&mut records, "grad_k_origin_max", th.derivative_fd, || {
        let mut rng = StdRng::seed_from_u64(cfg.seed ^ 0x16);
        let mut worst = 0.0f64;
        for _ in 0..cfg.quadrature.sample_small {
            let z = c64(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            let tau = rng.gen::<f64>() - 0.5;
            let t = rng.gen::<f64>() - 0.5;
            let g = grad_k_a([0.0; 3], z, tau, t);
            // closed first-order value (2 Im z, -2 Re z, tau)
            worst = worst
                .max((g[0] - 2.0 * z.im).abs())
                .max((g[1] + 2.0 * z.re).abs())
                .max((g[2] - tau).abs());
        }
        Ok((worst, worst <= th.derivative_fd))
    });

    check(&mut records, "uniformization_sigma_min", 0.0, || {
        let mut sigma = f64::INFINITY;
        let n = 20usize;
        for ir in 0..n {
            let r = 0.15 * (ir as f64 + 1.0) / n as f64;
            for ix in 0..n {
                // spiral over the direction sphere
                let ct = -1.0 + 2.0 * (ix as f64 + 0.5) / n as f64;
                let st = (1.0 - ct * ct).sqrt();
                let ph = 2.399963 * ix as f64; // golden-angle spacing
                let dir = [st * ph.cos(), st * ph.sin(), ct];
                for iz in 0..n {
                    let zr = -0.5 + (iz as f64 + 0.5) / n as f64;
                    for it in 0..n {
                        let tv = -0.5 + (it as f64 + 0.5) / n as f64;
                        let tauv = 0.37 * zr - 0.11 * tv; // shear to cover the box
                        let xi = uniformization_xi(r, dir, c64(zr, 0.3 * tv), tauv, tv)?;
                        sigma = sigma.min(xi.abs());
                    }
                }
            }
        }
        Ok((sigma, sigma > 0.0))
    });

    for delta in [0.1, 0.2, 0.4] {
        check(
            &mut records,
            &format!("uniform_boundedness_sigma_delta_{delta}"),
            0.0,
            || {
                let mut rng = StdRng::seed_from_u64(cfg.seed ^ 0x17);
                // random samples plus one section element bisected to sit
                // just past the distance threshold
                let mut pool: Vec<GroupElement> = Vec::new();
                let (mut lo, mut hi) = (0.0f64, 2.0f64);
                for _ in 0..40 {
                    let mid = 0.5 * (lo + hi);
                    let k = make_k(&KCoset::from_su2_exp([mid, 0.0, 0.0]))?;
                    if dist_to_subgroup(&k, SubgroupTag::M)? < 1.05 * delta {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                pool.push(make_k(&KCoset::from_su2_exp([hi, 0.0, 0.0]))?);
                let mut sigma = f64::INFINITY;
                let mut kept = 0;
                while kept < 40 {
                    let k = if pool.is_empty() {
                        random_k0(&mut rng)
                    } else {
                        pool.pop().expect("nonempty")
                    };
                    if dist_to_subgroup(&k, SubgroupTag::M)? < delta {
                        continue;
                    }
                    kept += 1;
                    for iz in 0..5 {
                        for itau in 0..5 {
                            for it in 0..5 {
                                let z = c64(-0.4 + 0.2 * iz as f64, 0.1 * iz as f64 - 0.2);
                                let tau = -0.4 + 0.2 * itau as f64;
                                let t = -0.4 + 0.2 * it as f64;
                                let g = k.mul(&make_n(z, tau)?).mul(&make_a(t)?);
                                let d = a_derivatives(&g)?;
                                sigma = sigma.min(1.0 - d.dt);
                            }
                        }
                    }
                }
                Ok((sigma, sigma > 0.0))
            },
        );
    }

    let deriv_runtime = block.elapsed().as_secs_f64();
    records.push(CheckRecord::new(
        "runtime_derivative_block_seconds",
        deriv_runtime,
        60.0,
        deriv_runtime < 60.0,
    ));
    records
}

// ---------------------------------------------------------------------------
// geometry

pub fn run_geometry(cfg: &ExperimentConfig) -> Vec<CheckRecord> {
    let th = &cfg.thresholds;
    let mut records = Vec::new();
    let block = Instant::now();

    check(
        &mut records,
        "dist_a_vs_cartan_max",
        th.dist_consistency,
        || {
            let mut rng = StdRng::seed_from_u64(cfg.seed ^ 0x21);
            let mut worst = 0.0f64;
            for _ in 0..cfg.quadrature.sample_large {
                let z = c64(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
                let tau = 2.0 * (rng.gen::<f64>() - 0.5);
                let t = 2.0 * (rng.gen::<f64>() - 0.5);
                let g = make_n(z, tau)?.mul(&make_a(t)?);
                worst = worst.max((dist_a(z, tau, t) - cartan_radius(&g)?).abs());
            }
            Ok((worst, worst <= th.dist_consistency))
        },
    );

    check(
        &mut records,
        "kn_derivative_constant",
        th.kn_derivative_k_max,
        || {
            let eps0 = 0.05;
            let mut k_measured = 0.0f64;
            for lam in [1e3f64, 1e4] {
                for beta in [1e2f64, 10f64.powf(2.5)] {
                    let scale = lam.recip() * beta.powf(1.0 - 2.0 * eps0);
                    let t_lo = beta.powf(-0.5 + eps0);
                    for iz in 0..6 {
                        let rho = lam.powf(-0.5) * iz as f64 / 5.0;
                        for itau in 0..6 {
                            let tau = lam.powf(-0.5) * (itau as f64 / 5.0 - 0.5) * 2.0;
                            for it in 0..24 {
                                let t = t_lo * (1.0 / t_lo).powf(it as f64 / 23.0);
                                for sgn in [-1.0, 1.0] {
                                    let d = dist_a_dt(c64(rho, 0.0), tau, sgn * t, 1)?;
                                    k_measured = k_measured.max((d - sgn).abs() / scale);
                                }
                            }
                        }
                    }
                }
            }
            Ok((k_measured, k_measured <= th.kn_derivative_k_max))
        },
    );

    for order in [2u32, 3, 4] {
        check(
            &mut records,
            &format!("kn_higher_order_{order}_constant"),
            f64::INFINITY,
            || {
                let eps0 = 0.05;
                let (lam, beta) = (1e4f64, 1e2f64);
                let scale = lam.recip() * beta.powf(0.5 - eps0).powi(order as i32 + 1);
                let t_lo = beta.powf(-0.5 + eps0);
                let mut k_measured = 0.0f64;
                for iz in 0..6 {
                    let rho = lam.powf(-0.5) * iz as f64 / 5.0;
                    for it in 0..24 {
                        let t = t_lo * (1.0 / t_lo).powf(it as f64 / 23.0);
                        let d = dist_a_dt(c64(rho, 0.0), 0.0, t, order)?;
                        k_measured = k_measured.max(d.abs() / scale);
                    }
                }
                Ok((k_measured, k_measured.is_finite()))
            },
        );
    }

    check(&mut records, "kn_lower_bound_t_constant", 0.0, || {
        let eps0 = 0.05;
        let (lam, beta) = (1e4f64, 1e2f64);
        let radial = beta.powf(-0.5 + eps0);
        let mut c_measured = f64::INFINITY;
        for iz in 0..30 {
            let rho = lam.powf(-0.5) * iz as f64 / 29.0;
            for itau in 0..30 {
                let tau = lam.powf(-0.5) * (2.0 * itau as f64 / 29.0 - 1.0);
                for it in 0..200 {
                    let t = -1.0 + 2.0 * (it as f64 + 0.5) / 200.0;
                    if dist_a(c64(rho, 0.0), tau, t) >= radial {
                        c_measured = c_measured.min(t.abs() / radial);
                    }
                }
            }
        }
        Ok((c_measured, c_measured > 0.0))
    });

    check(&mut records, "dist_a_dt_fd_max", 1e-5, || {
        let mut rng = StdRng::seed_from_u64(cfg.seed ^ 0x22);
        let h = 1e-3;
        let mut worst = 0.0f64;
        for _ in 0..200 {
            let z = c64(
                0.3 * (rng.gen::<f64>() - 0.5),
                0.3 * (rng.gen::<f64>() - 0.5),
            );
            let tau = 0.3 * (rng.gen::<f64>() - 0.5);
            let t = 0.4 + rng.gen::<f64>();
            let f = |u: f64| dist_a(z, tau, u);
            let fd1 = (f(t + h) - f(t - h)) / (2.0 * h);
            let fd2 = (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h);
            let fd3 = (f(t + 2.0 * h) - 2.0 * f(t + h) + 2.0 * f(t - h) - f(t - 2.0 * h))
                / (2.0 * h * h * h);
            worst = worst
                .max((dist_a_dt(z, tau, t, 1)? - fd1).abs())
                .max((dist_a_dt(z, tau, t, 2)? - fd2).abs())
                .max(((dist_a_dt(z, tau, t, 3)? - fd3) / 20.0).abs());
        }
        Ok((worst, worst <= 1e-5))
    });

    check(&mut records, "polar_constant_spread_rel", 1e-4, || {
        let c1 = calibrate_polar_constant(1.0, 48);
        let f2 = |a: f64| calibration_bump(a / 0.8).powi(2);
        let c2 = geometry::radial_volume_integral_iwasawa(&f2, 0.8, 48)
            / geometry::radial_volume_integral_polar(&f2, 0.8, 48);
        let f3 = |a: f64| calibration_bump(a / 1.3) * (1.0 + a * a);
        let c3 = geometry::radial_volume_integral_iwasawa(&f3, 1.3, 48)
            / geometry::radial_volume_integral_polar(&f3, 1.3, 48);
        let spread = ((c1 - c2).abs()).max((c1 - c3).abs()) / c1;
        Ok((spread, spread <= 1e-4))
    });

    let runtime = block.elapsed().as_secs_f64();
    records.push(CheckRecord::new(
        "runtime_seconds",
        runtime,
        60.0,
        runtime < 60.0,
    ));
    records
}

// ---------------------------------------------------------------------------
// spherical functions

pub fn run_spherical(cfg: &ExperimentConfig) -> Vec<CheckRecord> {
    let th = &cfg.thresholds;
    let mut records = Vec::new();
    let block = Instant::now();

    check(&mut records, "phi_origin_max", th.phi_origin, || {
        let mut worst = 0.0f64;
        for s in [0.0, 1.0, 5.0, 20.0, 40.0] {
            for backend in [PhiBackend::KQuadrature, PhiBackend::RadialODE] {
                let v = spherical_phi(SpectralParam(s), 0.0, backend)?;
                worst = worst.max((v - 1.0).abs());
            }
        }
        Ok((worst, worst <= th.phi_origin))
    });

    check(
        &mut records,
        "phi_backend_agreement_max",
        th.backend_agreement,
        || {
            let cases: Vec<(f64, f64)> = [1.0, 2.0, 5.0, 10.0, 20.0, 35.0, 50.0]
                .iter()
                .flat_map(|&s| [0.1, 0.5, 1.0, 2.0, 3.0].iter().map(move |&t| (s, t)))
                .collect();
            let worst = cases
                .par_iter()
                .map(|&(s, t)| {
                    let a = spherical_phi(SpectralParam(s), t, PhiBackend::KQuadrature)?;
                    let b = spherical_phi(SpectralParam(s), t, PhiBackend::RadialODE)?;
                    Ok((a - b).abs())
                })
                .try_reduce(|| 0.0f64, |a, b| Ok(a.max(b)))?;
            Ok((worst, worst <= th.backend_agreement))
        },
    );

    check(&mut records, "phi_decay_slope", th.phi_slope_tol, || {
        let t = 1.0;
        let mut points = Vec::new();
        let n = 40;
        for i in 0..n {
            let s = 10.0 * (30.0f64).powf(i as f64 / (n - 1) as f64);
            let table = PhiTable::build(s + 4.0, t + 0.2)?;
            // envelope: maximum over half an oscillation period in s
            let mut env = 0.0f64;
            for j in 0..8 {
                let sj = s + std::f64::consts::PI / t * j as f64 / 8.0;
                let tb = PhiTable::build(sj, t + 0.1)?;
                env = env.max(tb.eval(t).abs());
            }
            let _ = table;
            points.push(DecayPoint {
                s: s * t,
                abs_value: env,
                std_err: 0.0,
            });
        }
        let fit = fit_decay(&points, -1.0)?;
        let slope = fit.fitted_slope.unwrap_or(0.0);
        let dev = (slope - th.phi_slope).abs();
        Ok((slope, dev <= th.phi_slope_tol))
    });

    check(
        &mut records,
        "plancherel_band_ratio",
        th.plancherel_band,
        || {
            let mut lo = f64::INFINITY;
            let mut hi = 0.0f64;
            let mut s = 10.0;
            while s <= 100.0 {
                let r = plancherel_shape(s) / (s * s * s);
                lo = lo.min(r);
                hi = hi.max(r);
                s += 0.5;
            }
            let band = hi / lo;
            Ok((band, band <= th.plancherel_band))
        },
    );

    check(
        &mut records,
        "inversion_residual_max_rel",
        th.inversion_residual,
        || {
            let mut worst = 0.0f64;
            for (radius, power) in [(0.8, 1), (1.0, 2), (1.2, 1)] {
                let n = 160;
                let grid: Vec<f64> = (0..=n).map(|i| radius * i as f64 / n as f64).collect();
                let values: Vec<f64> = grid
                    .iter()
                    .map(|&t| calibration_bump(t / radius).powi(power))
                    .collect();
                let f = RadialFunction::from_samples(grid, values, radius)?;
                let f0 = f.eval(0.0);
                let spectral =
                    hyplane::harmonic::plancherel_constant() * spectral_integral_of_hc(&f, 400.0);
                worst = worst.max((spectral - f0).abs() / f0.abs());
            }
            Ok((worst, worst <= th.inversion_residual))
        },
    );

    let runtime = block.elapsed().as_secs_f64();
    records.push(CheckRecord::new(
        "runtime_seconds",
        runtime,
        300.0,
        runtime < 300.0,
    ));
    records
}

// ---------------------------------------------------------------------------
// transforms

pub fn run_transforms(cfg: &ExperimentConfig) -> Vec<CheckRecord> {
    let th = &cfg.thresholds;
    let mut records = Vec::new();
    let block = Instant::now();
    let lambda = cfg.lambda_grid[0];
    let spec = PaleyWienerSpec::default();

    let k = match build_klambda(lambda, &spec) {
        Ok(k) => k,
        Err(e) => {
            records.push(CheckRecord::new(
                format!("kernel_build [error: {e}]"),
                f64::NAN,
                0.0,
                false,
            ));
            return records;
        }
    };

    check(
        &mut records,
        "hc_roundtrip_max_rel",
        th.hc_roundtrip_rel,
        || {
            let mut worst = 0.0f64;
            for s in [lambda - 1.0, lambda, lambda + 1.0] {
                let hc = hc_transform(&k.kernel, SpectralParam(s))?;
                let target = spec.h0(lambda, s).powi(2);
                worst = worst.max((hc / target - 1.0).abs());
            }
            Ok((worst, worst <= th.hc_roundtrip_rel))
        },
    );

    check(&mut records, "kernel_transform_min", -1e-4, || {
        // the transform is a square, so apart from the synthesis noise
        // floor (a tenth of the round-trip tolerance) it stays nonnegative
        let mut min_v = f64::INFINITY;
        let mut s = 0.0;
        while s <= lambda + 40.0 {
            min_v = min_v.min(hc_transform(&k.kernel, SpectralParam(s))?);
            s += 2.0;
        }
        Ok((min_v, min_v >= -1e-4))
    });

    check(
        &mut records,
        "kernel_envelope_constant",
        f64::INFINITY,
        || {
            let mut k_env = 0.0f64;
            let mut t = 1.0 / lambda;
            while t <= k.kernel.support_radius {
                let bound = lambda.powi(3) * (1.0 + lambda * t).powf(-1.5);
                k_env = k_env.max(k.kernel.eval(t).abs() / bound);
                t += 0.003;
            }
            Ok((k_env, k_env.is_finite()))
        },
    );

    // cross-regime ratio at the example parameters (beta = 8)
    check(
        &mut records,
        "k1hat_cross_ratio_beta8",
        th.k1hat_cross_ratio,
        || {
            let beta = 8.0;
            let at_peak = k1_hat(&k, SpectralParam(lambda), beta, cfg.eps0)?;
            let at_quarter = k1_hat(&k, SpectralParam(lambda / 4.0), beta, cfg.eps0)?;
            let ratio = (at_quarter / at_peak).abs();
            Ok((ratio, ratio <= th.k1hat_cross_ratio))
        },
    );

    check(&mut records, "k1hat_peak_constant", f64::INFINITY, || {
        let mut k_one = 0.0f64;
        for beta in [8.0, 16.0, 32.0] {
            let at_peak = k1_hat(&k, SpectralParam(lambda), beta, cfg.eps0)?;
            k_one = k_one.max(at_peak.abs() * beta.powf(0.5 - cfg.eps0));
        }
        Ok((k_one, k_one.is_finite()))
    });

    check(&mut records, "k1hat_symmetry", 1e-8, || {
        let a = k1_hat(&k, SpectralParam(lambda), 16.0, cfg.eps0)?;
        let b = k1_hat(&k, SpectralParam(-lambda), 16.0, cfg.eps0)?;
        let diff = (a - b).abs();
        Ok((diff, diff <= 1e-8))
    });

    check(&mut records, "helgason_radial_consistency", 1e-6, || {
        // radial test function: transform must not depend on the boundary
        // coset and must agree with the Harish-Chandra transform
        let radius = 0.8f64;
        let f = |z: Complex64, tau: f64, t: f64| calibration_bump(dist_a(z, tau, t) / radius);
        let n = 120;
        let grid: Vec<f64> = (0..=n).map(|i| radius * i as f64 / n as f64).collect();
        let values: Vec<f64> = grid.iter().map(|&t| calibration_bump(t / radius)).collect();
        let fr = RadialFunction::from_samples(grid, values, radius)?;
        let s = SpectralParam(3.0);
        let hc = hc_transform(&fr, s)?;
        let mut worst = 0.0f64;
        for coset in [
            KCoset::new(c64(1.0, 0.0), c64(0.0, 0.0))?,
            KCoset::new(c64(0.6, 0.0), c64(0.0, 0.8))?,
            KCoset::new(c64(0.0, 0.28), c64(-0.96, 0.0))?,
        ] {
            let h = helgason_transform(&f, radius, s, &coset)?;
            worst = worst.max((h - c64(hc, 0.0)).norm());
        }
        Ok((worst, worst <= 1e-6))
    });

    check(&mut records, "convolution_identity_rel", 1e-4, || {
        // radial pair: transform of the convolution is the product of
        // transforms
        let rf = 0.5f64;
        let rg = 0.4f64;
        let n = 100;
        let mk = |radius: f64, pow: i32| -> hyplane::Result<RadialFunction> {
            let grid: Vec<f64> = (0..=n).map(|i| radius * i as f64 / n as f64).collect();
            let values: Vec<f64> = grid
                .iter()
                .map(|&t| calibration_bump(t / radius).powi(pow))
                .collect();
            RadialFunction::from_samples(grid, values, radius)
        };
        let f = mk(rf, 1)?;
        let g = mk(rg, 2)?;
        let radii: Vec<f64> = (0..=220)
            .map(|i| (rf + rg) * 1.05 * i as f64 / 220.0)
            .collect();
        let conv = radial_convolution_samples(&f, &g, &radii, 32);
        let fg = RadialFunction::from_samples(radii, conv, rf + rg)?;
        let mut worst = 0.0f64;
        for s in [2.0, 5.0] {
            let lhs = hc_transform(&fg, SpectralParam(s))?;
            let rhs = hc_transform(&f, SpectralParam(s))? * hc_transform(&g, SpectralParam(s))?;
            worst = worst.max((lhs - rhs).abs() / rhs.abs());
        }
        Ok((worst, worst <= 1e-4))
    });

    let runtime = block.elapsed().as_secs_f64();
    records.push(CheckRecord::new(
        "runtime_seconds",
        runtime,
        600.0,
        runtime < 600.0,
    ));
    records
}

// ---------------------------------------------------------------------------
// decay of J

/// Bisects an offset in the unipotent direction to the requested distance
/// from MA.
fn unipotent_at_distance(target: f64) -> hyplane::Result<GroupElement> {
    let mut lo = 0.0;
    let mut hi = 1.5;
    for _ in 0..48 {
        let mid = 0.5 * (lo + hi);
        let g = make_n(c64(mid, 0.0), 0.0)?;
        if dist_to_subgroup(&g, SubgroupTag::MA)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    make_n(c64(0.5 * (lo + hi), 0.0), 0.0)
}

pub fn run_decay_j(cfg: &ExperimentConfig) -> Vec<CheckRecord> {
    let th = &cfg.thresholds;
    let mut records = Vec::new();
    let block = Instant::now();
    let chi = CutoffChi::standard();
    let beta = cfg.beta;
    let eps0 = cfg.eps0;

    let mut sweep: Vec<(f64, f64, f64, f64, f64)> = Vec::new(); // (s, s1, s2, dist, absJ)
    check(&mut records, "j_decay_slope", th.j_slope_max, || {
        // one group element pinned to the hypothesis distance at the top
        // of the grid; the decay is then measured in s at fixed g, which
        // matches the per-s quantifier of the nonstationary bound
        let s_top = *cfg.s_grid.last().expect("validated nonempty");
        let target = 2.0 * s_top.powf(-0.5 + eps0) * beta.sqrt();
        let g = unipotent_at_distance(target)?;
        let d = dist_to_subgroup(&g, SubgroupTag::MA)?;
        let mut points = Vec::new();
        for &s in &cfg.s_grid {
            let j = integral_j(s, s, s, &g, &chi)?;
            sweep.push((s, s, s, d, j.norm()));
            points.push(DecayPoint {
                s,
                abs_value: j.norm(),
                std_err: 0.0,
            });
        }
        if points.len() >= 5 {
            let fit = fit_decay(&points, th.j_slope_max)?;
            Ok((fit.fitted_slope.unwrap_or(0.0), fit.threshold_pass))
        } else {
            // least-squares by hand for the short grid
            let n = points.len() as f64;
            let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
            for p in &points {
                let x = p.s.ln();
                let y = p.abs_value.ln();
                sx += x;
                sy += y;
                sxx += x * x;
                sxy += x * y;
            }
            let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
            Ok((slope, slope <= th.j_slope_max))
        }
    });

    check(&mut records, "j_abs_at_top", th.j_abs_at_top, || {
        let v = sweep
            .iter()
            .fold(
                (0.0, 0.0),
                |acc, &(s, _, _, _, j)| if s > acc.0 { (s, j) } else { acc },
            )
            .1;
        if v == 0.0 && sweep.is_empty() {
            return Err(hyplane::Error::DegenerateFit("sweep failed upstream"));
        }
        Ok((v, v <= th.j_abs_at_top))
    });

    check(&mut records, "j_control_ratio", th.j_control_ratio, || {
        let s_top = *cfg.s_grid.last().expect("validated nonempty");
        let hyp = sweep.iter().find(|&&(s, ..)| s == s_top).map(|&(.., j)| j);
        let hyp = hyp.ok_or(hyplane::Error::DegenerateFit("sweep failed upstream"))?;
        let ctrl = integral_j(s_top, s_top, s_top, &make_a(0.2)?, &chi)?.norm();
        let ratio = ctrl / hyp;
        Ok((ratio, ratio >= th.j_control_ratio))
    });

    // one-dimensional integral examples at the top spectral parameter
    check(&mut records, "int1d_a_hypothesis_regime", 1e-6, || {
        let s = *cfg.s_grid.last().expect("validated nonempty");
        let k = make_k(&KCoset::from_su2_exp([1.7, 0.0, 0.0]))?;
        let v = int1d_a(&chi, s, s + beta / 2.0, &k, c64(0.2, 0.1), -0.1, 0.1)?;
        Ok((v.norm(), v.norm() <= 1e-6))
    });

    check(&mut records, "int1d_a_monotone_in_distance", 1.1, || {
        let s = *cfg.s_grid.last().expect("validated nonempty");
        let mut prev = f64::INFINITY;
        let mut worst_ratio = 0.0f64;
        for r in [0.45, 0.7, 1.0, 1.4, 1.7] {
            let k = make_k(&KCoset::from_su2_exp([r, 0.0, 0.0]))?;
            let v = int1d_a(&chi, s, s + beta / 2.0, &k, c64(0.2, 0.1), -0.1, 0.1)?.norm();
            if prev.is_finite() {
                worst_ratio = worst_ratio.max(v / prev);
            }
            prev = v;
        }
        Ok((worst_ratio, worst_ratio <= 1.1))
    });

    check(&mut records, "int1d_phi_hypothesis_regime", 1e-5, || {
        let s = *cfg.s_grid.last().expect("validated nonempty");
        let z = 2.0 * s.powf(-0.5 + eps0) * beta.sqrt();
        let v = int1d_phi(&chi, s, s + beta / 2.0, c64(z, 0.0), 0.0, 0.1)?;
        Ok((v.norm(), v.norm() <= 1e-5))
    });

    check(&mut records, "int1d_phi_control_ratio", 1e2, || {
        let s = *cfg.s_grid.last().expect("validated nonempty");
        let z = 2.0 * s.powf(-0.5 + eps0) * beta.sqrt();
        let hyp = int1d_phi(&chi, s, s + beta / 2.0, c64(z, 0.0), 0.0, 0.1)?.norm();
        let ctrl = int1d_phi(&chi, s, s + beta / 2.0, c64(0.0, 0.0), 0.0, 0.0)?.norm();
        let ratio = ctrl / hyp;
        Ok((ratio, ratio >= 1e2))
    });

    // sweep artifacts
    if !sweep.is_empty() {
        let _ = std::fs::create_dir_all(&cfg.output_dir);
        let mut csv_text = String::from("s,s1,s2,dist_to_MA,abs_J,std_err\n");
        for &(s, s1, s2, d, j) in &sweep {
            csv_text.push_str(&format!("{s},{s1},{s2},{d:.6},{j:.10e},0.0\n"));
        }
        let _ = std::fs::write(cfg.output_dir.join("decay_j_sweep.csv"), csv_text);
        let points: Vec<DecayPoint> = sweep
            .iter()
            .map(|&(s, _, _, _, j)| DecayPoint {
                s,
                abs_value: j,
                std_err: 0.0,
            })
            .collect();
        if points.len() >= 5 {
            if let Ok(rep) = fit_decay(&points, th.j_slope_max) {
                let _ = std::fs::write(cfg.output_dir.join("decay_j_sweep.json"), rep.to_json());
            }
        }
    }

    let runtime = block.elapsed().as_secs_f64();
    records.push(CheckRecord::new(
        "runtime_seconds",
        runtime,
        900.0,
        runtime < 900.0,
    ));
    records
}

// ---------------------------------------------------------------------------
// decay of I: phase certificates and kernel support

pub fn run_decay_i(cfg: &ExperimentConfig) -> Vec<CheckRecord> {
    let mut records = Vec::new();
    let block = Instant::now();
    let width = 2.0 * cfg.beta.max(4.0).powf(-0.5 + cfg.eps0);
    let bounds = BoxBounds {
        x: width,
        y: width,
        tau: width,
        t: width,
    };

    check(&mut records, "phase_certificate_min", 0.0, || {
        let mut rng = StdRng::seed_from_u64(cfg.seed ^ 0x31);
        let cases: Vec<(GroupElement, f64)> = (0..100)
            .map(|_| {
                let k = random_k0(&mut rng);
                let rho = (rng.gen::<f64>() * 2.0 - 1.0) * 2.0 / 3.0;
                (k, rho)
            })
            .collect();
        let min = cases
            .par_iter()
            .map(|(k, rho)| phase_gradient_certificate(k, *rho, &bounds, 8))
            .try_reduce(|| f64::INFINITY, |a, b| Ok(a.min(b)))?;
        Ok((min, min > 0.0))
    });

    check(
        &mut records,
        "phase_certificate_grid_stability",
        0.10,
        || {
            let mut rng = StdRng::seed_from_u64(cfg.seed ^ 0x32);
            let k = random_k0(&mut rng);
            let rho = 0.4;
            let coarse = phase_gradient_certificate(&k, rho, &bounds, 16)?;
            let fine = phase_gradient_certificate(&k, rho, &bounds, 32)?;
            let rel = (fine - coarse).abs() / fine.abs();
            Ok((rel, rel <= 0.10))
        },
    );

    let lambda = cfg.lambda_grid[0];
    let spec = PaleyWienerSpec::default();
    match (
        build_klambda(lambda, &spec),
        WindowedProfile::out_of_band(lambda, 32.0, 2.0),
    ) {
        (Ok(k), Ok(profile)) => {
            let b = CylinderCutoff::new(lambda);
            check(&mut records, "i_kernel_support_vanishing", 0.0, || {
                let (v, se) = integral_i(
                    &k,
                    &profile,
                    &make_a(4.0)?,
                    &b,
                    &QmcOpts {
                        seed: cfg.seed,
                        ..QmcOpts::default()
                    },
                )?;
                let total = v.norm() + se;
                Ok((total, total == 0.0))
            });
            check(&mut records, "i_positivity_at_identity", 0.0, || {
                let (v, err) = integral_i(
                    &k,
                    &profile,
                    &GroupElement::identity(),
                    &b,
                    &QmcOpts {
                        seed: cfg.seed,
                        ..QmcOpts::default()
                    },
                )?;
                Ok((v.re, v.re >= -3.0 * err && v.im == 0.0))
            });
        }
        (Err(e), _) | (_, Err(e)) => {
            records.push(CheckRecord::new(
                format!("pairing_setup [error: {e}]"),
                f64::NAN,
                0.0,
                false,
            ));
        }
    }

    let runtime = block.elapsed().as_secs_f64();
    records.push(CheckRecord::new(
        "runtime_seconds",
        runtime,
        120.0,
        runtime < 120.0,
    ));
    records
}

// ---------------------------------------------------------------------------
// split of I

pub fn run_split_i(cfg: &ExperimentConfig) -> Vec<CheckRecord> {
    let th = &cfg.thresholds;
    let mut records = Vec::new();
    let block = Instant::now();
    let lambda = cfg.lambda_grid[0];
    let spec = PaleyWienerSpec::default();
    let eps0 = cfg.eps0;

    let setup = (|| -> hyplane::Result<(KLambda, WindowedProfile, CylinderCutoff)> {
        let k = build_klambda(lambda, &spec)?;
        let profile = WindowedProfile::out_of_band(lambda, 32.0, 2.0)?;
        Ok((k, profile, CylinderCutoff::new(lambda)))
    })();
    let (k, profile, b) = match setup {
        Ok(v) => v,
        Err(e) => {
            records.push(CheckRecord::new(
                format!("pairing_setup [error: {e}]"),
                f64::NAN,
                0.0,
                false,
            ));
            return records;
        }
    };

    check(&mut records, "profile_band_leakage", 1e-6, || {
        let leak = profile.band_leakage();
        Ok((leak, leak < 1e-6))
    });

    let full = integral_i(
        &k,
        &profile,
        &GroupElement::identity(),
        &b,
        &QmcOpts {
            seed: cfg.seed,
            ..QmcOpts::default()
        },
    );

    let mut i2_beta16: Option<(f64, f64)> = None;
    for beta in [8.0, 16.0, 32.0] {
        check(
            &mut records,
            &format!("split_additivity_beta_{beta}"),
            0.0,
            || {
                let (iv, ie) = full
                    .clone()
                    .map_err(|_| hyplane::Error::DegenerateFit("full pairing failed"))?;
                let ((i1, e1), (i2, e2)) = split_i(&k, beta, eps0, &profile, &b)?;
                if beta == 16.0 {
                    i2_beta16 = Some((i2, e2));
                }
                let residual = (i1 + i2 - iv.re).abs();
                let budget = 3.0 * (e1 + e2 + ie) + 1e-12;
                Ok((residual, residual <= budget))
            },
        );
    }

    check(&mut records, "i1_constant_over_beta", f64::INFINITY, || {
        let mut k1 = 0.0f64;
        for beta in [8.0, 16.0, 32.0] {
            let ((i1, _), _) = split_i(&k, beta, eps0, &profile, &b)?;
            k1 = k1.max(i1.abs() * beta.powf(0.5 - eps0));
        }
        Ok((k1, k1.is_finite()))
    });

    check(&mut records, "i2_abs_beta16", th.i2_abs, || {
        let (i2, _) = i2_beta16.ok_or(hyplane::Error::DegenerateFit("split at beta 16 missing"))?;
        Ok((i2.abs(), i2.abs() <= th.i2_abs))
    });

    let qmc_i2 = pair_with_kernel(
        &profile,
        None,
        &b,
        &RadialKernel::CutKernel {
            k: &k,
            piece: 2,
            beta: 16.0,
            eps0,
        },
        &QmcOpts {
            seed: cfg.seed + 1,
            n_points: 2 * cfg.quadrature.qmc_points,
            gauss_u: 128,
            ..QmcOpts::default()
        },
    );

    check(&mut records, "i2_cross_method_agreement", 0.0, || {
        let (i2, e2) =
            i2_beta16.ok_or(hyplane::Error::DegenerateFit("split at beta 16 missing"))?;
        let (qv, qse) = qmc_i2
            .clone()
            .map_err(|_| hyplane::Error::DegenerateFit("qmc evaluation failed"))?;
        let diff = (qv.re - i2).abs();
        // combined statistical error plus the inner-rule resolution floor
        let budget = 4.0 * (qse + e2) + 0.01 * i2.abs();
        Ok((diff, diff <= budget))
    });

    check(&mut records, "i2_qmc_se_fraction", th.se_fraction, || {
        let (_, qse) = qmc_i2
            .clone()
            .map_err(|_| hyplane::Error::DegenerateFit("qmc evaluation failed"))?;
        let frac = qse / th.i2_abs;
        Ok((frac, frac <= th.se_fraction))
    });

    check(&mut records, "i_kernel_support_vanishing", 0.0, || {
        let (v, se) = integral_i(
            &k,
            &profile,
            &make_a(4.0)?,
            &b,
            &QmcOpts {
                seed: cfg.seed,
                ..QmcOpts::default()
            },
        )?;
        let total = v.norm() + se;
        Ok((total, total == 0.0))
    });

    check(&mut records, "j2_abs_out_of_band", th.j2_abs, || {
        let (j2, _) = integral_j2(&profile, lambda, lambda, 16.0, eps0, &b)?;
        Ok((j2.abs(), j2.abs() <= th.j2_abs))
    });

    check(&mut records, "j2_cross_method_agreement", 0.0, || {
        let (j2, e) = integral_j2(&profile, lambda, lambda, 16.0, eps0, &b)?;
        let (qv, qse) = integral_j2_qmc(
            &profile,
            lambda,
            lambda,
            16.0,
            eps0,
            &b,
            &QmcOpts {
                seed: cfg.seed + 3,
                ..QmcOpts::default()
            },
        )?;
        let diff = (qv.re - j2).abs();
        let budget = 4.0 * (qse + e) + 1e-9;
        Ok((diff, diff <= budget))
    });

    check(
        &mut records,
        "j2_in_band_control_ratio_measured",
        f64::INFINITY,
        || {
            // recorded contrast between the in-band and out-of-band profiles;
            // at lambda = 40 both values sit at the same cutoff-leakage floor,
            // so only the measurement is asserted
            let (j2, _) = integral_j2(&profile, lambda, lambda, 16.0, eps0, &b)?;
            let in_band = WindowedProfile::in_band(lambda, 16.0)?;
            let (j2i, _) = integral_j2(&in_band, lambda, lambda, 16.0, eps0, &b)?;
            let ratio = (j2i / j2).abs();
            Ok((ratio, ratio.is_finite()))
        },
    );

    let runtime = block.elapsed().as_secs_f64();
    records.push(CheckRecord::new(
        "runtime_seconds",
        runtime,
        1200.0,
        runtime < 1200.0,
    ));
    records
}

// ---------------------------------------------------------------------------
// Hecke algebra (exact)

pub fn run_hecke(cfg: &ExperimentConfig) -> Vec<CheckRecord> {
    let mut records = Vec::new();
    let block = Instant::now();
    let exact = |ok: bool| if ok { (0.0, true) } else { (1.0, false) };

    for &q in &cfg.q_list {
        check(&mut records, &format!("hecke_relation_q{q}"), 0.0, || {
            let alg = HeckeAlgebra::new(q)?;
            let lhs = alg.convolve(
                &HeckeElement::phi(q, Signature::new(1, 0, 0)?),
                &HeckeElement::phi(q, Signature::new(1, 1, 0)?),
            )?;
            let expect = HeckeElement::phi(q, Signature::new(2, 1, 0)?).add(
                &HeckeElement::phi(q, Signature::new(1, 1, 1)?).scale(
                    &hyplane::hecke::coefficient_from_integer((q * q + q + 1) as i64),
                ),
            );
            Ok(exact(lhs == expect))
        });

        check(&mut records, &format!("coset_counts_q{q}"), 0.0, || {
            let alg = HeckeAlgebra::new(q)?;
            let want = (q * q + q + 1) as usize;
            let a = alg.coset_reps(Signature::new(1, 0, 0)?)?.degree();
            let b = alg.coset_reps(Signature::new(1, 1, 0)?)?.degree();
            Ok(exact(a == want && b == want))
        });
    }

    for &q in cfg.q_list.iter().filter(|&&q| q <= 3) {
        check(&mut records, &format!("tt_star_families_q{q}"), 0.0, || {
            let first = tt_star_expansion(q, 0.9, 0.0)?;
            let second = tt_star_expansion(q, 0.1, 0.8)?;
            Ok(exact(first.all_in_families && second.all_in_families))
        });
    }

    check(
        &mut records,
        "tt_star_max_bound_ratio",
        f64::INFINITY,
        || {
            // worst admissible eigenvalue at the smallest place
            let rep = tt_star_expansion(2, 0.5, 0.0)?;
            Ok((rep.max_bound_ratio, rep.max_bound_ratio.is_finite()))
        },
    );

    check(&mut records, "associativity_exact", 0.0, || {
        let q = 2;
        let alg = HeckeAlgebra::new(q)?;
        let a = HeckeElement::phi(q, Signature::new(1, 0, 0)?);
        let b = HeckeElement::phi(q, Signature::new(1, 1, 0)?);
        let c = HeckeElement::phi(q, Signature::new(0, 0, -1)?);
        let left = alg.convolve(&alg.convolve(&a, &b)?, &c)?;
        let right = alg.convolve(&a, &alg.convolve(&b, &c)?)?;
        Ok(exact(left == right))
    });

    check(&mut records, "commutativity_exact", 0.0, || {
        let q = 3;
        let alg = HeckeAlgebra::new(q)?;
        let a = HeckeElement::phi(q, Signature::new(2, 1, 0)?);
        let b = HeckeElement::phi(q, Signature::new(1, 0, 0)?);
        Ok(exact(alg.convolve(&a, &b)? == alg.convolve(&b, &a)?))
    });

    check(&mut records, "adjoint_anti_multiplicative", 0.0, || {
        let q = 2;
        let alg = HeckeAlgebra::new(q)?;
        let a = HeckeElement::phi(q, Signature::new(1, 0, 0)?);
        let b = HeckeElement::phi(q, Signature::new(1, 1, 0)?);
        let lhs = alg.convolve(&a, &b)?.adjoint();
        let rhs = alg.convolve(&b.adjoint(), &a.adjoint())?;
        Ok(exact(lhs == rhs))
    });

    check(&mut records, "amplifier_guard", 0.0, || {
        Ok(exact(amplifier_t(2, 0.4, 0.4).is_err()))
    });

    let runtime = block.elapsed().as_secs_f64();
    records.push(CheckRecord::new(
        "runtime_seconds",
        runtime,
        120.0,
        runtime < 120.0,
    ));
    records
}
