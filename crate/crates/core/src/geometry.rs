//! The Siegel domain model of the complex hyperbolic plane: the group
//! action, Bergman distance, Iwasawa coordinates, the radial distance
//! function A(z, tau, t) with its t-derivatives, tubes and cylinders, and
//! the invariant measures in both coordinate systems.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::group::{Form, GroupElement};
use crate::quad::integrate_gl;
use crate::{Error, Result};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Point (z1, z2) of the Siegel domain 2 Re(z1) + |z2|^2 < 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiegelPoint {
    pub z1: Complex64,
    pub z2: Complex64,
}

impl SiegelPoint {
    pub fn new(z1: Complex64, z2: Complex64) -> Result<Self> {
        if !(z1.is_finite() && z2.is_finite()) {
            return Err(Error::NonFinite("Siegel coordinates"));
        }
        let p = SiegelPoint { z1, z2 };
        if !p.in_domain() {
            return Err(Error::domain("point outside the Siegel domain"));
        }
        Ok(p)
    }

    pub fn in_domain(&self) -> bool {
        2.0 * self.z1.re + self.z2.norm_sqr() < 0.0
    }

    /// The origin o = (-1, 0).
    pub fn origin() -> Self {
        SiegelPoint {
            z1: c(-1.0, 0.0),
            z2: c(0.0, 0.0),
        }
    }

    /// Standard lift (z1, z2, 1).
    pub fn lift(&self) -> [Complex64; 3] {
        [self.z1, self.z2, c(1.0, 0.0)]
    }
}

/// Projective action of U(2,1) on the Siegel domain.
pub fn act(g: &GroupElement, p: &SiegelPoint) -> Result<SiegelPoint> {
    if g.form != Form::JAntidiag {
        return Err(Error::domain(
            "Siegel action requires the antidiagonal form",
        ));
    }
    let v = g.mat.apply(p.lift());
    if v[2].norm() < 1e-13 {
        return Err(Error::BoundaryDegeneracy(v[2].norm()));
    }
    SiegelPoint::new(v[0] / v[2], v[1] / v[2])
}

/// Hermitian pairing of the antidiagonal form on lifts.
fn herm(z: &[Complex64; 3], w: &[Complex64; 3]) -> Complex64 {
    z[0] * w[2].conj() + z[1] * w[1].conj() + z[2] * w[0].conj()
}

/// Bergman distance: cosh^2(d/2) = <z,w><w,z> / (<z,z><w,w>).
pub fn bergman_dist(p: &SiegelPoint, q: &SiegelPoint) -> f64 {
    let zp = p.lift();
    let zq = q.lift();
    let num = herm(&zp, &zq).norm_sqr();
    let den = herm(&zp, &zp).re * herm(&zq, &zq).re;
    // both self-pairings are negative inside the domain, so den > 0
    let ratio = (num / den).max(1.0);
    2.0 * ratio.sqrt().acosh()
}

/// Cartan radius: distance from the origin to g . o. This equals the
/// unique nonnegative A with g in K0 a(A) K0.
pub fn cartan_radius(g: &GroupElement) -> Result<f64> {
    let p = act(g, &SiegelPoint::origin())?;
    Ok(bergman_dist(&SiegelPoint::origin(), &p))
}

/// Radial distance function:
/// cosh A = cosh t + e^{-t} (|z|^4 + 2|z|^2 + tau^2) / 2 + |z|^2.
pub fn dist_a(z: Complex64, tau: f64, t: f64) -> f64 {
    let zz = z.norm_sqr();
    let p = zz * zz + 2.0 * zz + tau * tau;
    let e = t.cosh() + 0.5 * (-t).exp() * p + zz;
    e.max(1.0).acosh()
}

/// Analytic t-derivatives of [`dist_a`] of orders 1 through 4, obtained by
/// propagating a derivative jet through A = acosh(E(t)) with the guarded
/// quotient A' = E' / sinh A. Refuses to evaluate at the cone point.
pub fn dist_a_dt(z: Complex64, tau: f64, t: f64, order: u32) -> Result<f64> {
    if !(1..=4).contains(&order) {
        return Err(Error::domain("derivative order must be in 1..=4"));
    }
    let a0 = dist_a(z, tau, t);
    if a0 <= 1e-8 {
        return Err(Error::ConePoint(a0));
    }
    let zz = z.norm_sqr();
    let p = zz * zz + 2.0 * zz + tau * tau;
    let em = 0.5 * (-t).exp() * p;
    // E and its first four derivatives
    let e0 = t.cosh() + em + zz;
    let e1 = t.sinh() - em;
    let e2 = t.cosh() + em;
    let e3 = t.sinh() - em;
    let e4 = t.cosh() + em;
    // jet of E^2 - 1 to order 3 in t
    let q0 = e0 * e0 - 1.0;
    let q1 = 2.0 * e0 * e1;
    let q2 = 2.0 * e0 * e2 + 2.0 * e1 * e1;
    let q3 = 2.0 * e0 * e3 + 6.0 * e1 * e2;
    // jet of sinh A = sqrt(E^2 - 1) to order 3
    let s0 = q0.max(0.0).sqrt();
    if s0 <= 1e-14 {
        return Err(Error::ConePoint(a0));
    }
    let s1 = q1 / (2.0 * s0);
    let s2 = (q2 - 2.0 * s1 * s1) / (2.0 * s0);
    let s3 = (q3 - 6.0 * s1 * s2) / (2.0 * s0);
    // jet of D = E' / sinh A; its entries are A', A'', A''', A''''
    let d0 = e1 / s0;
    let d1 = (e2 - d0 * s1) / s0;
    let d2 = (e3 - 2.0 * d1 * s1 - d0 * s2) / s0;
    let d3 = (e4 - 3.0 * d2 * s1 - 3.0 * d1 * s2 - d0 * s3) / s0;
    Ok(match order {
        1 => d0,
        2 => d1,
        3 => d2,
        _ => d3,
    })
}

/// Coordinates of the relative displacement:
/// (n(z1,t1) a(t1))^{-1} n(z2,t2) a(t2) = n(z, tau) a(t2 - t1) with
/// z = e^{-t1/2} (z2 - z1), tau = e^{-t1} (tau2 - tau1 + 2 Im(z1 conj(z2))).
pub fn relative_coords(
    z1: Complex64,
    tau1: f64,
    t1: f64,
    z2: Complex64,
    tau2: f64,
    t2: f64,
) -> (Complex64, f64) {
    let _ = t2;
    let z = (z2 - z1) * (-t1 / 2.0).exp();
    let tau = (-t1).exp() * (tau2 - tau1 + 2.0 * (z1 * z2.conj()).im);
    (z, tau)
}

/// Iwasawa-coordinate density of the invariant measure: 4 e^{-2t}.
pub fn haar_weight(t: f64) -> f64 {
    4.0 * (-2.0 * t).exp()
}

/// Reduced Iwasawa-coordinate integral of a radial function f(A):
/// integrates f(A(z, tau, t)) 4 e^{-2t} dz dtau dt with the z-angle done
/// analytically (2 pi rho drho).
pub fn radial_volume_integral_iwasawa<F: Fn(f64) -> f64>(f: &F, radius: f64, order: usize) -> f64 {
    let rho_max = (radius.cosh() - 1.0).sqrt() * 1.001;
    let tau_max = (2.0 * radius.exp() * (radius.cosh() - 1.0)).sqrt() * 1.001;
    integrate_gl(
        |t| {
            integrate_gl(
                |tau| {
                    integrate_gl(
                        |rho| {
                            let a = dist_a(c(rho, 0.0), tau, t);
                            if a >= radius {
                                0.0
                            } else {
                                f(a) * 2.0 * std::f64::consts::PI * rho
                            }
                        },
                        0.0,
                        rho_max,
                        order,
                    )
                },
                -tau_max,
                tau_max,
                order,
            ) * haar_weight(t)
        },
        -radius,
        radius,
        order,
    )
}

/// Polar-side integral of f against sinh^2(t/2) sinh(t) dt, without the
/// overall constant.
pub fn radial_volume_integral_polar<F: Fn(f64) -> f64>(f: &F, radius: f64, order: usize) -> f64 {
    integrate_gl(
        |t| f(t) * (t / 2.0).sinh().powi(2) * t.sinh(),
        0.0,
        radius,
        order,
    )
}

/// Smooth compactly supported bump profile used for calibrations:
/// exp(-1/(1 - u^2)) scaled to vanish at |u| = 1.
pub fn calibration_bump(u: f64) -> f64 {
    let u2 = u * u;
    if u2 >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - u2)).exp()
    }
}

/// Calibrates the polar-density constant by equating the Iwasawa-coordinate
/// and polar-coordinate integrals of one radial bump of the given support.
pub fn calibrate_polar_constant(radius: f64, order: usize) -> f64 {
    let f = |a: f64| calibration_bump(a / radius);
    let iw = radial_volume_integral_iwasawa(&f, radius, order);
    let pol = radial_volume_integral_polar(&f, radius, order);
    iw / pol
}

static POLAR_CONSTANT: OnceLock<f64> = OnceLock::new();

/// The calibrated polar constant c with dVol = c sinh^2(t/2) sinh(t) dt
/// on radial functions.
pub fn polar_constant() -> f64 {
    *POLAR_CONSTANT.get_or_init(|| calibrate_polar_constant(1.0, 48))
}

/// Polar density of the invariant measure: c sinh^2(t/2) sinh(t), t >= 0.
pub fn polar_density(t: f64) -> f64 {
    polar_constant() * (t / 2.0).sinh().powi(2) * t.sinh()
}

/// A tube around the geodesic segment g0 . { a(t) . o : |t| <= 1/2 } with
/// cross-section lambda^{-1/2}.
#[derive(Debug, Clone)]
pub struct TubeSpec {
    pub center: GroupElement,
    pub lambda: f64,
}

impl TubeSpec {
    pub fn new(center: GroupElement, lambda: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda < 1.0 {
            return Err(Error::domain("tube lambda must be >= 1"));
        }
        Ok(TubeSpec { center, lambda })
    }
}

/// Closed tube membership, by pulling back through the tube center.
pub fn in_tube(p: &SiegelPoint, spec: &TubeSpec) -> Result<bool> {
    let q = act(&spec.center.inverse(), p)?;
    let scale = spec.lambda.powf(-0.5);
    // Iwasawa coordinates of the pulled-back point
    let z = -q.z2.conj() / 2f64.sqrt();
    let tau = q.z1.im;
    let arg = -q.z1.re - 0.5 * q.z2.norm_sqr();
    if arg <= 0.0 {
        return Err(Error::domain("pulled-back point outside the Siegel domain"));
    }
    let t = arg.ln();
    Ok(z.norm() <= scale && tau.abs() <= scale && t.abs() <= 0.5)
}

/// Open cylinder membership: |z| < lambda^{-1/2} and |tau| < lambda^{-1/2}.
pub fn in_cylinder(z: Complex64, tau: f64, lambda: f64) -> bool {
    let scale = lambda.powf(-0.5);
    z.norm() < scale && tau.abs() < scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{make_a, make_n, random_group_element, random_k0};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn action_basics() {
        let o = SiegelPoint::origin();
        let e = GroupElement::identity();
        let p = act(&e, &o).unwrap();
        assert!((p.z1 - o.z1).norm() < 1e-15 && (p.z2 - o.z2).norm() < 1e-15);
        // n(z, tau) a(t) . o = (-e^t - |z|^2 + i tau, -sqrt2 conj(z))
        let z = c(0.0, 0.2);
        let (tau, t) = (0.1, 0.3);
        let g = make_n(z, tau).unwrap().mul(&make_a(t).unwrap());
        let q = act(&g, &o).unwrap();
        let want1 = c(-t.exp() - z.norm_sqr(), tau);
        let want2 = -z.conj() * 2f64.sqrt();
        assert!((q.z1 - want1).norm() < 1e-14);
        assert!((q.z2 - want2).norm() < 1e-14);
    }

    #[test]
    fn action_is_a_group_action() {
        let mut rng = StdRng::seed_from_u64(51);
        let o = SiegelPoint::origin();
        for _ in 0..60 {
            let g = random_group_element(&mut rng, 1.0);
            let h = random_group_element(&mut rng, 1.0);
            let p = act(&h, &o).unwrap();
            let lhs = act(&g, &p).unwrap();
            let rhs = act(&g.mul(&h), &o).unwrap();
            assert!((lhs.z1 - rhs.z1).norm() < 1e-10);
            assert!((lhs.z2 - rhs.z2).norm() < 1e-10);
        }
    }

    #[test]
    fn bergman_basics() {
        let o = SiegelPoint::origin();
        assert!(bergman_dist(&o, &o) < 1e-12);
        // the torus geodesic is unit speed
        let t = 0.7;
        let p = act(&make_a(t).unwrap(), &o).unwrap();
        assert!((bergman_dist(&o, &p) - t).abs() < 1e-12);
    }

    #[test]
    fn bergman_invariance() {
        let mut rng = StdRng::seed_from_u64(53);
        let o = SiegelPoint::origin();
        for _ in 0..60 {
            let g = random_group_element(&mut rng, 1.2);
            let x = random_group_element(&mut rng, 1.2);
            let y = random_group_element(&mut rng, 1.2);
            let p = act(&x, &o).unwrap();
            let q = act(&y, &o).unwrap();
            let d1 = bergman_dist(&p, &q);
            let d2 = bergman_dist(&act(&g, &p).unwrap(), &act(&g, &q).unwrap());
            assert!((d1 - d2).abs() < 1e-10);
        }
    }

    #[test]
    fn cartan_radius_values() {
        let mut rng = StdRng::seed_from_u64(59);
        for _ in 0..10 {
            let k = random_k0(&mut rng);
            assert!(cartan_radius(&k).unwrap() < 1e-7);
        }
        let n1 = make_n(c(1.0, 0.0), 0.0).unwrap();
        assert!((cartan_radius(&n1).unwrap() - 3.5f64.acosh()).abs() < 1e-12);
        let n2 = make_n(c(0.0, 0.0), 1.0).unwrap();
        assert!((cartan_radius(&n2).unwrap() - 1.5f64.acosh()).abs() < 1e-12);
    }

    #[test]
    fn dist_a_closed_form() {
        assert!((dist_a(c(0.0, 0.0), 0.0, 0.8) - 0.8).abs() < 1e-14);
        assert!((dist_a(c(0.0, 0.0), 0.0, -0.8) - 0.8).abs() < 1e-14);
        assert!((dist_a(c(1.0, 0.0), 0.0, 0.0) - 3.5f64.acosh()).abs() < 1e-14);
    }

    #[test]
    fn dist_a_matches_cartan_radius() {
        let mut rng = StdRng::seed_from_u64(61);
        for _ in 0..500 {
            let z = c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            let tau = 2.0 * (rng.gen::<f64>() - 0.5);
            let t = 2.0 * (rng.gen::<f64>() - 0.5);
            let g = make_n(z, tau).unwrap().mul(&make_a(t).unwrap());
            let d1 = dist_a(z, tau, t);
            let d2 = cartan_radius(&g).unwrap();
            assert!((d1 - d2).abs() < 1e-10, "{d1} vs {d2}");
        }
    }

    #[test]
    fn dist_a_dt_simple_cases() {
        // A(0, 0, t) = |t|, so the first derivative is sign(t)
        assert!((dist_a_dt(c(0.0, 0.0), 0.0, 0.5, 1).unwrap() - 1.0).abs() < 1e-12);
        assert!((dist_a_dt(c(0.0, 0.0), 0.0, -0.5, 1).unwrap() + 1.0).abs() < 1e-12);
        assert!(matches!(
            dist_a_dt(c(0.0, 0.0), 0.0, 0.0, 1),
            Err(Error::ConePoint(_))
        ));
        assert!(matches!(
            dist_a_dt(c(0.1, 0.0), 0.0, 0.1, 7),
            Err(Error::DomainViolation(_))
        ));
    }

    #[test]
    fn dist_a_dt_matches_finite_differences() {
        let mut rng = StdRng::seed_from_u64(67);
        let h = 1e-3;
        for _ in 0..200 {
            let z = c(
                0.3 * (rng.gen::<f64>() - 0.5),
                0.3 * (rng.gen::<f64>() - 0.5),
            );
            let tau = 0.3 * (rng.gen::<f64>() - 0.5);
            let t = 0.4 + rng.gen::<f64>();
            let f = |u: f64| dist_a(z, tau, u);
            let d1 = dist_a_dt(z, tau, t, 1).unwrap();
            let d2 = dist_a_dt(z, tau, t, 2).unwrap();
            let d3 = dist_a_dt(z, tau, t, 3).unwrap();
            let fd1 = (f(t + h) - f(t - h)) / (2.0 * h);
            let fd2 = (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h);
            let fd3 = (f(t + 2.0 * h) - 2.0 * f(t + h) + 2.0 * f(t - h) - f(t - 2.0 * h))
                / (2.0 * h * h * h);
            assert!((d1 - fd1).abs() < 1e-5);
            assert!((d2 - fd2).abs() < 1e-5);
            assert!((d3 - fd3).abs() < 2e-4);
        }
    }

    #[test]
    fn relative_coords_matrix_identity() {
        let mut rng = StdRng::seed_from_u64(71);
        for _ in 0..500 {
            let z1 = c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            let z2 = c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            let tau1 = rng.gen::<f64>() - 0.5;
            let tau2 = rng.gen::<f64>() - 0.5;
            let t1 = rng.gen::<f64>() - 0.5;
            let t2 = rng.gen::<f64>() - 0.5;
            let (z, tau) = relative_coords(z1, tau1, t1, z2, tau2, t2);
            let lhs = make_n(z1, tau1)
                .unwrap()
                .mul(&make_a(t1).unwrap())
                .inverse()
                .mul(&make_n(z2, tau2).unwrap())
                .mul(&make_a(t2).unwrap());
            let rhs = make_n(z, tau).unwrap().mul(&make_a(t2 - t1).unwrap());
            let diff = crate::linalg::frobenius(&lhs.mat.sub(&rhs.mat));
            assert!(diff < 1e-10, "residual {diff}");
        }
        // degenerate cases
        let (z, tau) = relative_coords(c(0.3, 0.1), 0.2, 0.5, c(0.3, 0.1), 0.2, 0.5);
        assert!(z.norm() < 1e-15 && tau.abs() < 1e-15);
        let (z, _) = relative_coords(c(0.1, 0.0), 0.0, 0.0, c(0.4, 0.0), 0.0, 0.0);
        assert!((z - c(0.3, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn haar_weight_at_zero() {
        assert_eq!(haar_weight(0.0), 4.0);
    }

    #[test]
    fn polar_density_at_zero() {
        assert_eq!(polar_density(0.0), 0.0);
    }

    #[test]
    fn polar_constant_is_stable_across_bumps() {
        // three different bump shapes must give the same constant
        let c1 = calibrate_polar_constant(1.0, 48);
        let f2 = |a: f64| calibration_bump(a / 0.8).powi(2);
        let c2 = radial_volume_integral_iwasawa(&f2, 0.8, 48)
            / radial_volume_integral_polar(&f2, 0.8, 48);
        let f3 = |a: f64| calibration_bump(a / 1.3) * (1.0 + a * a);
        let c3 = radial_volume_integral_iwasawa(&f3, 1.3, 48)
            / radial_volume_integral_polar(&f3, 1.3, 48);
        assert!((c1 - c2).abs() / c1 < 1e-4, "c1 = {c1}, c2 = {c2}");
        assert!((c1 - c3).abs() / c1 < 1e-4, "c1 = {c1}, c3 = {c3}");
        // small-ball asymptotics predict 8 pi^2
        let predicted = 8.0 * std::f64::consts::PI * std::f64::consts::PI;
        assert!((c1 - predicted).abs() / predicted < 1e-2, "c1 = {c1}");
    }

    #[test]
    fn tube_and_cylinder_membership() {
        let o = SiegelPoint::origin();
        let spec = TubeSpec::new(GroupElement::identity(), 100.0).unwrap();
        assert!(in_tube(&o, &spec).unwrap());
        // |z| twice the width: outside
        let z = c(0.2, 0.0); // 2 * lambda^{-1/2}
        let p = act(&make_n(z, 0.0).unwrap(), &o).unwrap();
        assert!(!in_tube(&p, &spec).unwrap());
        // boundary |t| = 1/2 is inside (closed tube)
        let p = act(&make_a(0.5).unwrap(), &o).unwrap();
        assert!(in_tube(&p, &spec).unwrap());
        // open cylinder is strict
        assert!(!in_cylinder(c(0.1, 0.0), 0.0, 100.0));
        assert!(in_cylinder(c(0.0999, 0.0), 0.05, 100.0));
        assert!(TubeSpec::new(GroupElement::identity(), 0.5).is_err());
    }
}
