//! Structure theory of G0 = U(2,1): subgroup parametrizations, the Iwasawa
//! decomposition and its A-projection, the Cayley transform, the right
//! action of the group on its maximal compact, and the analytic derivative
//! formulas of A along one-parameter families.
//!
//! Conventions. The Hermitian form is the antidiagonal J (ones on the
//! antidiagonal); K0 is the set of elements that are both J-unitary and
//! ordinarily unitary. The split torus is a(t) = diag(e^{t/2}, 1, e^{-t/2}),
//! the unipotent group is parametrized by n(z, tau), and cosets of M in K0
//! are parametrized by an SU(2) pair (alpha, beta) with
//! |alpha|^2 + |beta|^2 = 1.

use num_complex::Complex64;
use rand::Rng;

use crate::linalg::{frobenius, mat_exp, mat_log, ComplexMat3};
use crate::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Which Hermitian form a matrix preserves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    /// Antidiagonal form (the Siegel-model form).
    JAntidiag,
    /// Diagonal form diag(1, 1, -1), reached through the Cayley transform.
    J1Diag,
}

/// The Gram matrix of the given form.
pub fn form_matrix(form: Form) -> ComplexMat3 {
    match form {
        Form::JAntidiag => ComplexMat3::from_rows(
            [cr(0.), cr(0.), cr(1.)],
            [cr(0.), cr(1.), cr(0.)],
            [cr(1.), cr(0.), cr(0.)],
        ),
        Form::J1Diag => ComplexMat3::diag(cr(1.), cr(1.), cr(-1.)),
    }
}

/// Element of the unitary group of the tagged Hermitian form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupElement {
    pub mat: ComplexMat3,
    pub form: Form,
}

impl GroupElement {
    pub fn new(mat: ComplexMat3, form: Form) -> Result<Self> {
        mat.check_finite()?;
        Ok(GroupElement { mat, form })
    }

    pub fn identity() -> Self {
        GroupElement {
            mat: ComplexMat3::identity(),
            form: Form::JAntidiag,
        }
    }

    /// Residual of the defining relation g* J g = J.
    pub fn form_residual(&self) -> f64 {
        let j = form_matrix(self.form);
        frobenius(&self.mat.adjoint().mul(&j).mul(&self.mat).sub(&j))
    }

    /// Residual of ordinary unitarity g* g = I (zero on the maximal compact).
    pub fn unitarity_residual(&self) -> f64 {
        frobenius(
            &self
                .mat
                .adjoint()
                .mul(&self.mat)
                .sub(&ComplexMat3::identity()),
        )
    }

    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        debug_assert_eq!(self.form, other.form, "mixed-form product");
        GroupElement {
            mat: self.mat.mul(&other.mat),
            form: self.form,
        }
    }

    /// Group inverse, using g^{-1} = J g* J (exact for form-preserving g).
    pub fn inverse(&self) -> GroupElement {
        let j = form_matrix(self.form);
        GroupElement {
            mat: j.mul(&self.mat.adjoint()).mul(&j),
            form: self.form,
        }
    }
}

/// Torus element a(t) = exp(tH) = diag(e^{t/2}, 1, e^{-t/2}).
pub fn make_a(t: f64) -> Result<GroupElement> {
    if !t.is_finite() {
        return Err(Error::NonFinite("make_a parameter"));
    }
    Ok(GroupElement {
        mat: ComplexMat3::diag(cr((t / 2.0).exp()), cr(1.0), cr((-t / 2.0).exp())),
        form: Form::JAntidiag,
    })
}

/// Unipotent element n(z, tau).
pub fn make_n(z: Complex64, tau: f64) -> Result<GroupElement> {
    if !(z.re.is_finite() && z.im.is_finite() && tau.is_finite()) {
        return Err(Error::NonFinite("make_n parameters"));
    }
    let s2 = cr(2f64.sqrt());
    Ok(GroupElement {
        mat: ComplexMat3::from_rows(
            [cr(1.0), s2 * z, c(-z.norm_sqr(), tau)],
            [cr(0.0), cr(1.0), -s2 * z.conj()],
            [cr(0.0), cr(0.0), cr(1.0)],
        ),
        form: Form::JAntidiag,
    })
}

/// Product law of the unipotent group in (z, tau) coordinates:
/// n(z1, t1) n(z2, t2) = n(z1 + z2, t1 + t2 + 2 Im(conj(z1) z2)).
pub fn heisenberg_product(z1: Complex64, tau1: f64, z2: Complex64, tau2: f64) -> (Complex64, f64) {
    (z1 + z2, tau1 + tau2 + 2.0 * (z1.conj() * z2).im)
}

/// Element of M (the centralizer of the torus in K0):
/// diag(e^{i theta}, e^{i psi}, e^{i theta}).
pub fn make_m(theta: f64, psi: f64) -> GroupElement {
    let et = Complex64::from_polar(1.0, theta);
    let ep = Complex64::from_polar(1.0, psi);
    GroupElement {
        mat: ComplexMat3::diag(et, ep, et),
        form: Form::JAntidiag,
    }
}

/// Representative of the nontrivial Weyl element.
pub fn weyl_w0() -> GroupElement {
    GroupElement {
        mat: ComplexMat3::from_rows(
            [cr(0.), cr(0.), cr(-1.)],
            [cr(0.), cr(-1.), cr(0.)],
            [cr(-1.), cr(0.), cr(0.)],
        ),
        form: Form::JAntidiag,
    }
}

/// Coordinates of a coset of M in K0 through the SU(2) section.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KCoset {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl KCoset {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite()) {
            return Err(Error::NonFinite("KCoset coordinates"));
        }
        let res = (alpha.norm_sqr() + beta.norm_sqr() - 1.0).abs();
        if res > 1e-8 {
            return Err(Error::NormViolation("|alpha|^2 + |beta|^2 = 1", res));
        }
        Ok(KCoset { alpha, beta })
    }

    /// SU(2) product of sections: exactly the 2x2 matrix product.
    pub fn compose(&self, other: &KCoset) -> KCoset {
        KCoset {
            alpha: self.alpha * other.alpha - self.beta * other.beta.conj(),
            beta: self.alpha * other.beta + self.beta * other.alpha.conj(),
        }
    }

    /// Coset of exp(r1 X~1 + r2 X~2 + r3 X~3): (cos r + i r3 sin(r)/r,
    /// sin(r)/r (i r1 - r2)).
    pub fn from_su2_exp(r: [f64; 3]) -> KCoset {
        let rn = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        let sc = sinc(rn);
        KCoset {
            alpha: c(rn.cos(), r[2] * sc),
            beta: c(-r[1] * sc, r[0] * sc),
        }
    }
}

/// sin(r)/r, stable near zero.
pub fn sinc(r: f64) -> f64 {
    if r.abs() < 1e-4 {
        let r2 = r * r;
        1.0 - r2 / 6.0 + r2 * r2 / 120.0
    } else {
        r.sin() / r
    }
}

/// (cos r - sinc r) / r^2 = sinc'(r) / r, stable near zero.
fn sinc_prime_over_r(r: f64) -> f64 {
    if r.abs() < 1e-3 {
        let r2 = r * r;
        -1.0 / 3.0 + r2 / 30.0 - r2 * r2 / 840.0
    } else {
        (r.cos() - sinc(r)) / (r * r)
    }
}

/// K0 element of the SU(2) section through the Cayley transform.
pub fn make_k(coset: &KCoset) -> Result<GroupElement> {
    let res = (coset.alpha.norm_sqr() + coset.beta.norm_sqr() - 1.0).abs();
    if res > 1e-8 {
        return Err(Error::NormViolation("|alpha|^2 + |beta|^2 = 1", res));
    }
    let a = coset.alpha;
    let b = coset.beta;
    let s2 = cr(1.0 / 2f64.sqrt());
    Ok(GroupElement {
        mat: ComplexMat3::from_rows(
            [(a + 1.0) * 0.5, b * s2, (a - 1.0) * 0.5],
            [-b.conj() * s2, a.conj(), -b.conj() * s2],
            [(a - 1.0) * 0.5, b * s2, (a + 1.0) * 0.5],
        ),
        form: Form::JAntidiag,
    })
}

/// The Cayley matrix C (an involution: C^{-1} = C).
pub fn cayley_matrix() -> ComplexMat3 {
    let s = 1.0 / 2f64.sqrt();
    ComplexMat3::from_rows(
        [cr(s), cr(0.), cr(s)],
        [cr(0.), cr(1.), cr(0.)],
        [cr(s), cr(0.), cr(-s)],
    )
}

/// Conjugation by the Cayley matrix, flipping the form tag.
pub fn cayley(g: &GroupElement) -> GroupElement {
    let cm = cayley_matrix();
    GroupElement {
        mat: cm.mul(&g.mat).mul(&cm),
        form: match g.form {
            Form::JAntidiag => Form::J1Diag,
            Form::J1Diag => Form::JAntidiag,
        },
    }
}

/// Result of the Iwasawa decomposition g = n(z, tau) a(t) k.
#[derive(Debug, Clone, Copy)]
pub struct IwasawaCoords {
    pub z: Complex64,
    pub tau: f64,
    pub t: f64,
    pub k: GroupElement,
}

impl IwasawaCoords {
    /// Rebuilds n(z, tau) a(t) k.
    pub fn reconstruct(&self) -> Result<GroupElement> {
        Ok(make_n(self.z, self.tau)?.mul(&make_a(self.t)?).mul(&self.k))
    }
}

/// Iwasawa decomposition computed geometrically through the Siegel action:
/// the coordinates (z, tau, t) are read off g . o and k is the remainder.
pub fn iwasawa(g: &GroupElement) -> Result<IwasawaCoords> {
    if g.form != Form::JAntidiag {
        return Err(Error::domain("iwasawa requires the antidiagonal form"));
    }
    g.mat.check_finite()?;
    let res = g.form_residual();
    if res > 1e-8 {
        return Err(Error::NormViolation("group membership residual", res));
    }
    // action on the standard lift of the origin o = (-1, 0)
    let v = g.mat.apply([cr(-1.0), cr(0.0), cr(1.0)]);
    if v[2].norm() < 1e-13 {
        return Err(Error::BoundaryDegeneracy(v[2].norm()));
    }
    let z1 = v[0] / v[2];
    let z2 = v[1] / v[2];
    let z = -z2.conj() / 2f64.sqrt();
    let tau = z1.im;
    let arg = -z1.re - 0.5 * z2.norm_sqr();
    if arg <= 0.0 {
        return Err(Error::domain("Siegel invariant violated in iwasawa"));
    }
    let t = arg.ln();
    let n = make_n(z, tau)?;
    let a = make_a(t)?;
    let k = a.inverse().mul(&n.inverse()).mul(g);
    Ok(IwasawaCoords { z, tau, t, k })
}

/// The A-projection: the t-coordinate of the Iwasawa decomposition.
pub fn a_proj(g: &GroupElement) -> Result<f64> {
    Ok(iwasawa(g)?.t)
}

/// The K0-part of the Iwasawa decomposition.
pub fn kappa(g: &GroupElement) -> Result<GroupElement> {
    Ok(iwasawa(g)?.k)
}

/// The right action of G0 on K0 sending k to kappa(k g).
pub fn phi_action(g: &GroupElement, k: &GroupElement) -> Result<GroupElement> {
    kappa(&k.mul(g))
}

/// Decomposition of a K0 element as m(theta, psi) k(alpha, beta).
/// The pair (alpha, beta) is unique; this returns it together with the
/// diagonal phases of m.
#[derive(Debug, Clone, Copy)]
pub struct MkDecomposition {
    pub theta_phase: Complex64,
    pub psi_phase: Complex64,
    pub coset: KCoset,
}

pub fn mk_coords(k: &GroupElement) -> Result<MkDecomposition> {
    let res = k.form_residual().max(k.unitarity_residual());
    if res > 1e-7 {
        return Err(Error::NormViolation("K0 membership", res));
    }
    let k11 = k.mat.at(0, 0);
    let k12 = k.mat.at(0, 1);
    let k13 = k.mat.at(0, 2);
    // first row of m k(alpha, beta) is e^{i theta} ((alpha+1)/2, beta/sqrt2, (alpha-1)/2)
    let et = k11 - k13;
    if (et.norm() - 1.0).abs() > 1e-6 {
        return Err(Error::NormViolation(
            "mk phase extraction",
            (et.norm() - 1.0).abs(),
        ));
    }
    let et = et / et.norm();
    let alpha = (k11 + k13) / et;
    let beta = k12 * 2f64.sqrt() / et;
    let coset = KCoset::new(alpha, beta)?;
    // second row carries e^{i psi}: k22 = e^{i psi} conj(alpha), k21 = -e^{i psi} conj(beta)/sqrt2
    let ep = if alpha.norm() >= beta.norm() {
        k.mat.at(1, 1) / alpha.conj()
    } else {
        -k.mat.at(1, 0) * 2f64.sqrt() / beta.conj()
    };
    let ep = ep / ep.norm();
    Ok(MkDecomposition {
        theta_phase: et,
        psi_phase: ep,
        coset,
    })
}

/// Closed form of the A-projection: for g = n a(t0) m k(alpha, beta),
/// A(g n(z, tau) a(t)) = t0 + t - log | (alpha-1)/2 (-e^t - |z|^2 + i tau)
/// - beta conj(z) + (alpha+1)/2 |^2.
pub fn a_explicit(t0: f64, coset: &KCoset, z: Complex64, tau: f64, t: f64) -> f64 {
    let w = c(-t.exp() - z.norm_sqr(), tau);
    let f = (coset.alpha - 1.0) * 0.5 * w - coset.beta * z.conj() + (coset.alpha + 1.0) * 0.5;
    t0 + t - f.norm_sqr().ln()
}

/// First partial derivatives of the A-projection along the four
/// one-parameter families through g: (d/dt, d/dx, d/dy, d/dtau) evaluated
/// at the identity offset. For g = n a(t0) m k(alpha, beta) these are
/// (Re alpha, 2 Re beta, 2 Im beta, Im alpha).
#[derive(Debug, Clone, Copy)]
pub struct ADerivatives {
    pub dt: f64,
    pub dx: f64,
    pub dy: f64,
    pub dtau: f64,
}

pub fn a_derivatives(g: &GroupElement) -> Result<ADerivatives> {
    let iw = iwasawa(g)?;
    let mk = mk_coords(&iw.k)?;
    Ok(ADerivatives {
        dt: mk.coset.alpha.re,
        dx: 2.0 * mk.coset.beta.re,
        dy: 2.0 * mk.coset.beta.im,
        dtau: mk.coset.alpha.im,
    })
}

/// Chart radius for [`uniformization_xi`]; fixed after an offline sweep
/// confirming no sign change of xi inside it.
pub const XI_CHART_RADIUS: f64 = 0.15;

/// The uniformization quotient xi(r, X, z, tau, t) =
/// (1 - dA/dt(exp(rX) n(z,tau) a(t))) / r^2, bounded away from zero on
/// compact boxes.
pub fn uniformization_xi(r: f64, x_dir: [f64; 3], z: Complex64, tau: f64, t: f64) -> Result<f64> {
    if !(r != 0.0 && r.abs() <= XI_CHART_RADIUS) {
        return Err(Error::domain(format!(
            "uniformization chart requires 0 < |r| <= {XI_CHART_RADIUS}, got {r}"
        )));
    }
    let norm = (x_dir[0].powi(2) + x_dir[1].powi(2) + x_dir[2].powi(2)).sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NormViolation(
            "direction must be unit",
            (norm - 1.0).abs(),
        ));
    }
    let k = make_k(&KCoset::from_su2_exp([
        r * x_dir[0],
        r * x_dir[1],
        r * x_dir[2],
    ]))?;
    let g = k.mul(&make_n(z, tau)?).mul(&make_a(t)?);
    let d = a_derivatives(&g)?;
    Ok((1.0 - d.dt) / (r * r))
}

/// Analytic gradient of A(exp(r1 X~1 + r2 X~2 + r3 X~3) n(z, tau) a(t))
/// with respect to (r1, r2, r3), from the closed A-formula and the closed
/// form of the section exponential.
pub fn grad_k_a(rvec: [f64; 3], z: Complex64, tau: f64, t: f64) -> [f64; 3] {
    let r = (rvec[0] * rvec[0] + rvec[1] * rvec[1] + rvec[2] * rvec[2]).sqrt();
    let sc = sinc(r);
    let q = sinc_prime_over_r(r);
    let alpha = c(r.cos(), rvec[2] * sc);
    let beta = c(-rvec[1] * sc, rvec[0] * sc);
    let w = c(-t.exp() - z.norm_sqr(), tau);
    let f = (alpha - 1.0) * 0.5 * w - beta * z.conj() + (alpha + 1.0) * 0.5;
    let f_nsq = f.norm_sqr();
    let mut grad = [0.0; 3];
    for (i, g) in grad.iter_mut().enumerate() {
        let delta = |j: usize| if i == j { 1.0 } else { 0.0 };
        let dalpha = cr(-rvec[i] * sc) + I * cr(delta(2) * sc + rvec[2] * q * rvec[i]);
        let dbeta = (I * cr(rvec[0]) - cr(rvec[1])) * cr(q * rvec[i])
            + (I * cr(delta(0)) - cr(delta(1))) * cr(sc);
        let df = dalpha * (w + 1.0) * 0.5 - dbeta * z.conj();
        *g = -2.0 * (f.conj() * df).re / f_nsq;
    }
    grad
}

/// The 3x3 matrices X~1, X~2, X~3 spanning the section tangent space.
pub fn xtilde_basis() -> [ComplexMat3; 3] {
    let s = 1.0 / 2f64.sqrt();
    let x1 = ComplexMat3::from_rows(
        [cr(0.), c(0., s), cr(0.)],
        [c(0., s), cr(0.), c(0., s)],
        [cr(0.), c(0., s), cr(0.)],
    );
    let x2 = ComplexMat3::from_rows(
        [cr(0.), cr(-s), cr(0.)],
        [cr(s), cr(0.), cr(s)],
        [cr(0.), cr(-s), cr(0.)],
    );
    let x3 = ComplexMat3::from_rows(
        [c(0., 0.5), cr(0.), c(0., 0.5)],
        [cr(0.), c(0., -1.), cr(0.)],
        [c(0., 0.5), cr(0.), c(0., 0.5)],
    );
    [x1, x2, x3]
}

/// Chart distance d(g, h) = || log(g^{-1} h) ||.
pub fn dist(g: &GroupElement, h: &GroupElement) -> Result<f64> {
    if g.form != h.form {
        return Err(Error::domain("distance between mixed forms"));
    }
    Ok(frobenius(&mat_log(&g.inverse().mul(h).mat)?))
}

/// Parametrized subgroups for distance queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubgroupTag {
    /// Centralizer of the torus in K0: diag(e^{i th}, e^{i ps}, e^{i th}).
    M,
    /// M times the split torus.
    MA,
    /// Diagonal subgroup; inside U(2,1) this coincides with MA.
    T0,
}

fn subgroup_point(tag: SubgroupTag, params: [f64; 3]) -> GroupElement {
    match tag {
        SubgroupTag::M => make_m(params[0], params[1]),
        SubgroupTag::MA | SubgroupTag::T0 => {
            let m = make_m(params[0], params[1]);
            let a = make_a(params[2]).expect("finite torus parameter");
            m.mul(&a)
        }
    }
}

/// Distance from g to the parametrized subgroup: coarse grid over the
/// subgroup parameters followed by derivative-free local descent.
pub fn dist_to_subgroup(g: &GroupElement, tag: SubgroupTag) -> Result<f64> {
    use std::f64::consts::PI;
    g.mat.check_finite()?;
    let dim = match tag {
        SubgroupTag::M => 2,
        _ => 3,
    };
    let objective = |params: [f64; 3]| -> f64 {
        let s = subgroup_point(tag, params);
        match dist(&s, g) {
            Ok(d) => d,
            Err(_) => f64::INFINITY,
        }
    };
    // 16^dim coarse grid: theta, psi over [0, 2 pi), t over [-3, 3]
    let n = 16;
    let mut best = f64::INFINITY;
    let mut best_p = [0.0; 3];
    for i in 0..n {
        let theta = 2.0 * PI * i as f64 / n as f64;
        for j in 0..n {
            let psi = 2.0 * PI * j as f64 / n as f64;
            let t_range = if dim == 3 { n } else { 1 };
            for l in 0..t_range {
                let t = if dim == 3 {
                    -3.0 + 6.0 * (l as f64 + 0.5) / n as f64
                } else {
                    0.0
                };
                let v = objective([theta, psi, t]);
                if v < best {
                    best = v;
                    best_p = [theta, psi, t];
                }
            }
        }
    }
    if !best.is_finite() {
        return Err(Error::BranchCut("no chart point on the subgroup grid"));
    }
    // compass search: 60 sweeps, halving the step when no move helps
    let mut step = [2.0 * PI / n as f64, 2.0 * PI / n as f64, 6.0 / n as f64];
    for _ in 0..60 {
        let mut improved = false;
        for d in 0..dim {
            for sgn in [-1.0, 1.0] {
                let mut p = best_p;
                p[d] += sgn * step[d];
                let v = objective(p);
                if v < best {
                    best = v;
                    best_p = p;
                    improved = true;
                }
            }
        }
        if !improved {
            for s in &mut step {
                *s *= 0.5;
            }
        }
        if step[0] < 1e-9 && best < 1e-12 {
            break;
        }
    }
    Ok(best)
}

/// Basis of the Lie algebra u(2,1) (X* J + J X = 0), nine real dimensions:
/// torus, two root spaces with their opposites, and the centralizer m.
pub fn u21_basis() -> [ComplexMat3; 9] {
    let h = ComplexMat3::diag(cr(0.5), cr(0.0), cr(-0.5));
    let n_re = ComplexMat3::from_rows(
        [cr(0.), cr(1.), cr(0.)],
        [cr(0.), cr(0.), cr(-1.)],
        [cr(0.), cr(0.), cr(0.)],
    );
    let n_im = ComplexMat3::from_rows(
        [cr(0.), c(0., 1.), cr(0.)],
        [cr(0.), cr(0.), c(0., 1.)],
        [cr(0.), cr(0.), cr(0.)],
    );
    let n_tau = ComplexMat3::from_rows(
        [cr(0.), cr(0.), c(0., 1.)],
        [cr(0.), cr(0.), cr(0.)],
        [cr(0.), cr(0.), cr(0.)],
    );
    let nb_re = ComplexMat3::from_rows(
        [cr(0.), cr(0.), cr(0.)],
        [cr(-1.), cr(0.), cr(0.)],
        [cr(0.), cr(1.), cr(0.)],
    );
    let nb_im = ComplexMat3::from_rows(
        [cr(0.), cr(0.), cr(0.)],
        [c(0., 1.), cr(0.), cr(0.)],
        [cr(0.), c(0., 1.), cr(0.)],
    );
    let nb_tau = ComplexMat3::from_rows(
        [cr(0.), cr(0.), cr(0.)],
        [cr(0.), cr(0.), cr(0.)],
        [c(0., 1.), cr(0.), cr(0.)],
    );
    let m1 = ComplexMat3::diag(c(0., 1.), cr(0.), c(0., 1.));
    let m2 = ComplexMat3::diag(cr(0.), c(0., 1.), cr(0.));
    [h, n_re, n_im, n_tau, nb_re, nb_im, nb_tau, m1, m2]
}

/// Random group element at chart distance at most `radius` from the
/// identity, sampled as exp of a random Lie-algebra direction.
pub fn random_group_element<R: Rng>(rng: &mut R, radius: f64) -> GroupElement {
    let basis = u21_basis();
    let mut xi = ComplexMat3::zero();
    for b in &basis {
        let coeff: f64 = rng.gen::<f64>() * 2.0 - 1.0;
        xi = xi.add(&b.scale(cr(coeff)));
    }
    let norm = frobenius(&xi);
    let target = radius * rng.gen::<f64>();
    if norm > 1e-12 {
        xi = xi.scale(cr(target / norm));
    }
    GroupElement {
        mat: mat_exp(&xi).expect("exp of finite matrix"),
        form: Form::JAntidiag,
    }
}

/// Haar-ish random element of K0 (random M part times uniform SU(2) section).
pub fn random_k0<R: Rng>(rng: &mut R) -> GroupElement {
    use std::f64::consts::PI;
    let theta = rng.gen::<f64>() * 2.0 * PI;
    let psi = rng.gen::<f64>() * 2.0 * PI;
    // uniform point on S^3
    let mut v = [0.0f64; 4];
    loop {
        let mut s = 0.0;
        for e in &mut v {
            *e = rng.gen::<f64>() * 2.0 - 1.0;
            s += *e * *e;
        }
        if s > 1e-6 && s <= 1.0 {
            let n = s.sqrt();
            for e in &mut v {
                *e /= n;
            }
            break;
        }
    }
    let coset = KCoset {
        alpha: c(v[0], v[1]),
        beta: c(v[2], v[3]),
    };
    make_m(theta, psi).mul(&make_k(&coset).expect("unit coset"))
}
