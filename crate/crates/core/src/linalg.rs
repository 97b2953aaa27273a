//! Dense 3x3 complex linear algebra: products, norms, exponential and
//! principal logarithm, and the chart distance built from them.
//!
//! The ambient space is M_3(C) with the Euclidean (Frobenius) norm of the
//! matrix viewed as a 9-dimensional complex vector. Nothing here is generic
//! over the dimension: three-by-three is all the rest of the crate needs,
//! and the closed forms (adjugate inverse, cubic eigenvalues) are both
//! faster and easier to audit than a general solver.

use num_complex::Complex64;

use crate::{Error, Result};

/// Row-major 3x3 complex matrix. Entries are kept finite by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexMat3 {
    pub m: [Complex64; 9],
}

/// Absolute/relative tolerances used by the round-trip style checks.
#[derive(Debug, Clone, Copy)]
pub struct MatrixTolerance {
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Default for MatrixTolerance {
    fn default() -> Self {
        MatrixTolerance {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
        }
    }
}

impl MatrixTolerance {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Result<Self> {
        if !(abs_tol > 0.0 && rel_tol > 0.0) {
            return Err(Error::domain("tolerances must be positive"));
        }
        Ok(MatrixTolerance { abs_tol, rel_tol })
    }
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

impl ComplexMat3 {
    pub fn new(m: [Complex64; 9]) -> Result<Self> {
        let a = ComplexMat3 { m };
        a.check_finite()?;
        Ok(a)
    }

    /// Build from three rows.
    pub fn from_rows(r0: [Complex64; 3], r1: [Complex64; 3], r2: [Complex64; 3]) -> Self {
        ComplexMat3 {
            m: [
                r0[0], r0[1], r0[2], r1[0], r1[1], r1[2], r2[0], r2[1], r2[2],
            ],
        }
    }

    pub fn zero() -> Self {
        ComplexMat3 { m: [ZERO; 9] }
    }

    pub fn identity() -> Self {
        let mut m = [ZERO; 9];
        m[0] = ONE;
        m[4] = ONE;
        m[8] = ONE;
        ComplexMat3 { m }
    }

    pub fn diag(d0: Complex64, d1: Complex64, d2: Complex64) -> Self {
        let mut m = [ZERO; 9];
        m[0] = d0;
        m[4] = d1;
        m[8] = d2;
        ComplexMat3 { m }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.m[3 * i + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.m[3 * i + j] = v;
    }

    pub fn check_finite(&self) -> Result<()> {
        for z in &self.m {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite("matrix entry"));
            }
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    #[inline]
    pub fn mul(&self, other: &ComplexMat3) -> ComplexMat3 {
        let a = &self.m;
        let b = &other.m;
        let mut c = [ZERO; 9];
        for i in 0..3 {
            for j in 0..3 {
                c[3 * i + j] = a[3 * i] * b[j] + a[3 * i + 1] * b[3 + j] + a[3 * i + 2] * b[6 + j];
            }
        }
        ComplexMat3 { m: c }
    }

    /// Matrix-vector product.
    #[inline]
    pub fn apply(&self, v: [Complex64; 3]) -> [Complex64; 3] {
        let a = &self.m;
        [
            a[0] * v[0] + a[1] * v[1] + a[2] * v[2],
            a[3] * v[0] + a[4] * v[1] + a[5] * v[2],
            a[6] * v[0] + a[7] * v[1] + a[8] * v[2],
        ]
    }

    pub fn add(&self, other: &ComplexMat3) -> ComplexMat3 {
        let mut m = [ZERO; 9];
        for (i, e) in m.iter_mut().enumerate() {
            *e = self.m[i] + other.m[i];
        }
        ComplexMat3 { m }
    }

    pub fn sub(&self, other: &ComplexMat3) -> ComplexMat3 {
        let mut m = [ZERO; 9];
        for (i, e) in m.iter_mut().enumerate() {
            *e = self.m[i] - other.m[i];
        }
        ComplexMat3 { m }
    }

    pub fn scale(&self, c: Complex64) -> ComplexMat3 {
        let mut m = [ZERO; 9];
        for (i, e) in m.iter_mut().enumerate() {
            *e = self.m[i] * c;
        }
        ComplexMat3 { m }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexMat3 {
        let a = &self.m;
        ComplexMat3 {
            m: [
                a[0].conj(),
                a[3].conj(),
                a[6].conj(),
                a[1].conj(),
                a[4].conj(),
                a[7].conj(),
                a[2].conj(),
                a[5].conj(),
                a[8].conj(),
            ],
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0] + self.m[4] + self.m[8]
    }

    pub fn det(&self) -> Complex64 {
        let a = &self.m;
        a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6])
            + a[2] * (a[3] * a[7] - a[4] * a[6])
    }

    /// Inverse via the adjugate formula.
    pub fn inverse(&self) -> Result<ComplexMat3> {
        let d = self.det();
        if d.norm() < 1e-300 || !d.is_finite() {
            return Err(Error::SingularInput("3x3 inverse"));
        }
        let a = &self.m;
        let inv = |x: Complex64| x / d;
        Ok(ComplexMat3 {
            m: [
                inv(a[4] * a[8] - a[5] * a[7]),
                inv(a[2] * a[7] - a[1] * a[8]),
                inv(a[1] * a[5] - a[2] * a[4]),
                inv(a[5] * a[6] - a[3] * a[8]),
                inv(a[0] * a[8] - a[2] * a[6]),
                inv(a[2] * a[3] - a[0] * a[5]),
                inv(a[3] * a[7] - a[4] * a[6]),
                inv(a[1] * a[6] - a[0] * a[7]),
                inv(a[0] * a[4] - a[1] * a[3]),
            ],
        })
    }
}

/// Product of two matrices (free-function form of [`ComplexMat3::mul`]).
pub fn mat_mul(a: &ComplexMat3, b: &ComplexMat3) -> ComplexMat3 {
    a.mul(b)
}

/// Frobenius norm: sqrt of the sum of squared entry moduli.
pub fn frobenius(a: &ComplexMat3) -> f64 {
    a.m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Maximum absolute column sum, used to pick the exp scaling.
fn one_norm(a: &ComplexMat3) -> f64 {
    (0..3)
        .map(|j| (0..3).map(|i| a.at(i, j).norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn is_strictly_upper(a: &ComplexMat3) -> bool {
    [0usize, 3, 4, 6, 7, 8].iter().all(|&k| a.m[k] == ZERO)
}

/// Matrix exponential.
///
/// Strictly upper triangular input (the nilpotent chart) is evaluated by the
/// exact quadratic polynomial I + x + x^2/2; everything else goes through
/// order-13 Pade with scaling and squaring.
pub fn mat_exp(x: &ComplexMat3) -> Result<ComplexMat3> {
    x.check_finite()?;
    if is_strictly_upper(x) {
        // x^3 = 0, so the series terminates after the quadratic term.
        let x2 = x.mul(x);
        return Ok(ComplexMat3::identity()
            .add(x)
            .add(&x2.scale(Complex64::new(0.5, 0.0))));
    }
    // Scaling and squaring with the [13/13] Pade approximant.
    const THETA_13: f64 = 5.371920351148152;
    let norm = one_norm(x);
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil().max(0.0) as u32
    } else {
        0
    };
    let a = x.scale(Complex64::new(1.0 / f64::powi(2.0, s as i32), 0.0));

    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    let a2 = a.mul(&a);
    let a4 = a2.mul(&a2);
    let a6 = a2.mul(&a4);
    let re = |c: f64| Complex64::new(c, 0.0);
    let id = ComplexMat3::identity();
    let u_inner = a6
        .scale(re(B[13]))
        .add(&a4.scale(re(B[11])))
        .add(&a2.scale(re(B[9])));
    let u_poly = a6
        .mul(&u_inner)
        .add(&a6.scale(re(B[7])))
        .add(&a4.scale(re(B[5])))
        .add(&a2.scale(re(B[3])))
        .add(&id.scale(re(B[1])));
    let u = a.mul(&u_poly);
    let v_inner = a6
        .scale(re(B[12]))
        .add(&a4.scale(re(B[10])))
        .add(&a2.scale(re(B[8])));
    let v = a6
        .mul(&v_inner)
        .add(&a6.scale(re(B[6])))
        .add(&a4.scale(re(B[4])))
        .add(&a2.scale(re(B[2])))
        .add(&id.scale(re(B[0])));
    // exp(a) ~= (v - u)^{-1} (v + u)
    let num = v.add(&u);
    let den = v.sub(&u);
    let mut r = den.inverse()?.mul(&num);
    for _ in 0..s {
        r = r.mul(&r);
    }
    Ok(r)
}

/// Eigenvalues of a 3x3 complex matrix via the characteristic cubic
/// (Cardano). Accuracy is ample for branch/singularity classification.
pub fn eigenvalues(a: &ComplexMat3) -> [Complex64; 3] {
    let tr = a.trace();
    let a2 = a.mul(a);
    // coefficients of lambda^3 + p2 lambda^2 + p1 lambda + p0
    let p2 = -tr;
    let p1 = (tr * tr - a2.trace()) * 0.5;
    let p0 = -a.det();
    // depressed cubic t^3 + p t + q, lambda = t - p2/3
    let shift = p2 / 3.0;
    let p = p1 - p2 * p2 / 3.0;
    let q = p2 * p2 * p2 * (2.0 / 27.0) - p2 * p1 / 3.0 + p0;
    let disc = (q * q * 0.25 + p * p * p / 27.0).sqrt();
    // pick the cube-root branch maximizing |u| for stability
    let c1 = -q * 0.5 + disc;
    let c2 = -q * 0.5 - disc;
    let c = if c1.norm() >= c2.norm() { c1 } else { c2 };
    let u = c.powf(1.0 / 3.0);
    let omega = Complex64::new(-0.5, 0.75f64.sqrt());
    let mut roots = [ZERO; 3];
    for (k, r) in roots.iter_mut().enumerate() {
        let w = omega.powu(k as u32);
        let uk = u * w;
        let t = if uk.norm() > 1e-30 {
            uk - p / (uk * 3.0)
        } else {
            uk
        };
        *r = t - shift;
    }
    roots
}

/// Principal square root by the Denman-Beavers iteration. Assumes no
/// eigenvalue on the closed negative real axis (checked by the caller).
fn sqrtm(a: &ComplexMat3) -> Result<ComplexMat3> {
    let mut y = *a;
    let mut z = ComplexMat3::identity();
    let half = Complex64::new(0.5, 0.0);
    for _ in 0..60 {
        let yi = y.inverse()?;
        let zi = z.inverse()?;
        let y_next = y.add(&zi).scale(half);
        let z_next = z.add(&yi).scale(half);
        let delta = frobenius(&y_next.sub(&y));
        y = y_next;
        z = z_next;
        if delta < 1e-16 * (1.0 + frobenius(&y)) {
            return Ok(y);
        }
    }
    Ok(y)
}

/// Principal matrix logarithm by inverse scaling and squaring.
///
/// Errors with `SingularInput` for non-invertible input and `BranchCut`
/// when an eigenvalue lies on the closed negative real axis, which signals
/// that the input is outside the chart.
pub fn mat_log(m: &ComplexMat3) -> Result<ComplexMat3> {
    m.check_finite()?;
    let scale = frobenius(m).max(1e-300);
    let eigs = eigenvalues(m);
    for ev in &eigs {
        if ev.norm() < 1e-13 * scale {
            return Err(Error::SingularInput("matrix log of singular matrix"));
        }
        if ev.re < 0.0 && ev.im.abs() < 1e-12 * ev.norm() {
            return Err(Error::BranchCut("eigenvalue on the negative real axis"));
        }
    }
    let mut a = *m;
    let mut k = 0u32;
    while frobenius(&a.sub(&ComplexMat3::identity())) > 0.25 {
        a = sqrtm(&a)?;
        k += 1;
        if k > 50 {
            return Err(Error::BranchCut("square-root chain did not contract"));
        }
    }
    // Gregory series for log(I + e) with ||e|| <= 0.25.
    let e = a.sub(&ComplexMat3::identity());
    let mut term = e;
    let mut acc = ComplexMat3::zero();
    for n in 1..=48 {
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        acc = acc.add(&term.scale(Complex64::new(sign / n as f64, 0.0)));
        term = term.mul(&e);
        if frobenius(&term) < 1e-20 {
            break;
        }
    }
    Ok(acc.scale(Complex64::new(f64::powi(2.0, k as i32), 0.0)))
}

/// Checks entrywise closeness under the given tolerance.
pub fn approx_eq(a: &ComplexMat3, b: &ComplexMat3, tol: &MatrixTolerance) -> bool {
    let scale = frobenius(a).max(frobenius(b));
    frobenius(&a.sub(b)) <= tol.abs_tol + tol.rel_tol * scale
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_products() {
        let i = ComplexMat3::identity();
        assert_eq!(frobenius(&i.mul(&i).sub(&i)), 0.0);
    }

    #[test]
    fn frobenius_values() {
        assert_eq!(frobenius(&ComplexMat3::zero()), 0.0);
        assert!((frobenius(&ComplexMat3::identity()) - 3f64.sqrt()).abs() < 1e-15);
        // antidiagonal of ones
        let j = ComplexMat3::from_rows(
            [c(0., 0.), c(0., 0.), c(1., 0.)],
            [c(0., 0.), c(1., 0.), c(0., 0.)],
            [c(1., 0.), c(0., 0.), c(0., 0.)],
        );
        assert!((frobenius(&j) - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn exp_zero_is_identity() {
        let e = mat_exp(&ComplexMat3::zero()).unwrap();
        assert_eq!(frobenius(&e.sub(&ComplexMat3::identity())), 0.0);
    }

    #[test]
    fn exp_nilpotent_matches_quadratic() {
        // generic strictly upper triangular matrix
        let x = ComplexMat3::from_rows(
            [c(0., 0.), c(1.3, -0.4), c(0.2, 0.9)],
            [c(0., 0.), c(0., 0.), c(-0.7, 0.1)],
            [c(0., 0.), c(0., 0.), c(0., 0.)],
        );
        let e = mat_exp(&x).unwrap();
        let x2 = x.mul(&x);
        let expect = ComplexMat3::identity().add(&x).add(&x2.scale(c(0.5, 0.0)));
        assert_eq!(e.m, expect.m);
    }

    #[test]
    fn log_of_identity_is_zero() {
        let l = mat_log(&ComplexMat3::identity()).unwrap();
        assert!(frobenius(&l) < 1e-15);
    }

    #[test]
    fn log_of_positive_diagonal() {
        let t = 0.4f64;
        let a = ComplexMat3::diag(
            c((t / 2.0).exp(), 0.0),
            c(1.0, 0.0),
            c((-t / 2.0).exp(), 0.0),
        );
        let l = mat_log(&a).unwrap();
        let h = ComplexMat3::diag(c(0.2, 0.0), c(0.0, 0.0), c(-0.2, 0.0));
        assert!(frobenius(&l.sub(&h)) < 1e-13);
    }

    #[test]
    fn log_rejects_negative_real_eigenvalue() {
        let m = ComplexMat3::diag(c(-1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0));
        assert!(matches!(mat_log(&m), Err(Error::BranchCut(_))));
    }

    #[test]
    fn log_rejects_singular() {
        let m = ComplexMat3::diag(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0));
        assert!(matches!(mat_log(&m), Err(Error::SingularInput(_))));
    }

    #[test]
    fn eigenvalues_of_diagonal() {
        let m = ComplexMat3::diag(c(2.0, 1.0), c(-0.3, 0.0), c(0.5, -0.5));
        let mut evs = eigenvalues(&m).to_vec();
        evs.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((evs[0] - c(-0.3, 0.0)).norm() < 1e-10);
        assert!((evs[1] - c(0.5, -0.5)).norm() < 1e-10);
        assert!((evs[2] - c(2.0, 1.0)).norm() < 1e-10);
    }

    #[test]
    fn rejects_nan() {
        let mut m = ComplexMat3::identity();
        m.set(0, 0, c(f64::NAN, 0.0));
        assert!(matches!(mat_exp(&m), Err(Error::NonFinite(_))));
    }
}
