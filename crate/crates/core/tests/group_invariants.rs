//! Quantified invariants of the matrix chart and the group structure.

use hyplane::group::{
    dist, dist_to_subgroup, make_a, make_m, make_n, random_group_element, u21_basis, GroupElement,
    SubgroupTag,
};
use hyplane::linalg::{frobenius, mat_exp, mat_log, ComplexMat3};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn cr(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[test]
fn exp_log_round_trip_within_unit_ball() {
    let mut rng = StdRng::seed_from_u64(101);
    let basis = u21_basis();
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let mut xi = ComplexMat3::zero();
        for b in &basis {
            xi = xi.add(&b.scale(cr(rng.gen::<f64>() * 2.0 - 1.0)));
        }
        let norm = frobenius(&xi);
        let target = rng.gen::<f64>();
        xi = xi.scale(cr(target / norm.max(1e-12)));
        let g = mat_exp(&xi).unwrap();
        let back = mat_exp(&mat_log(&g).unwrap()).unwrap();
        worst = worst.max(frobenius(&back.sub(&g)));
    }
    assert!(worst <= 1e-10, "round-trip error {worst}");
}

#[test]
fn chart_distance_left_invariant() {
    let mut rng = StdRng::seed_from_u64(103);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let x = random_group_element(&mut rng, 1.0);
        let g = random_group_element(&mut rng, 1.0);
        let h = random_group_element(&mut rng, 1.0);
        let d1 = dist(&g, &h).unwrap();
        let d2 = dist(&x.mul(&g), &x.mul(&h)).unwrap();
        worst = worst.max((d1 - d2).abs());
    }
    assert!(worst <= 1e-12, "invariance defect {worst}");
}

#[test]
fn subgroup_members_have_zero_distance() {
    let mut rng = StdRng::seed_from_u64(107);
    // members of M and of MA in equal parts
    for i in 0..500 {
        let theta = rng.gen::<f64>() * std::f64::consts::TAU;
        let psi = rng.gen::<f64>() * std::f64::consts::TAU;
        let m = make_m(theta, psi);
        let (g, tag) = if i % 2 == 0 {
            (m, SubgroupTag::M)
        } else {
            let t = rng.gen::<f64>() * 4.0 - 2.0;
            (m.mul(&make_a(t).unwrap()), SubgroupTag::MA)
        };
        let d = dist_to_subgroup(&g, tag).unwrap();
        assert!(d <= 1e-8, "member distance {d}");
    }
}

#[test]
fn nilpotent_exponential_is_polynomial() {
    let mut rng = StdRng::seed_from_u64(109);
    for _ in 0..200 {
        let z = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
        let tau = rng.gen::<f64>() - 0.5;
        let s2 = cr(2f64.sqrt());
        let x = ComplexMat3::from_rows(
            [cr(0.0), s2 * z, Complex64::new(0.0, tau)],
            [cr(0.0), cr(0.0), -s2 * z.conj()],
            [cr(0.0), cr(0.0), cr(0.0)],
        );
        let e = mat_exp(&x).unwrap();
        let quadratic = ComplexMat3::identity()
            .add(&x)
            .add(&x.mul(&x).scale(cr(0.5)));
        assert_eq!(e.m, quadratic.m, "nilpotent exponential must be exact");
        // and it reproduces the unipotent parametrization
        let n = make_n(z, tau).unwrap();
        assert!(frobenius(&e.sub(&n.mat)) < 1e-15);
    }
}

#[test]
fn subgroup_distance_rejects_chartless_input() {
    // far from every chart point only when the whole grid fails; a
    // unitary with an antipodal spectrum still resolves through the grid
    let g = GroupElement {
        mat: ComplexMat3::diag(cr(-1.0), cr(-1.0), cr(-1.0)),
        form: hyplane::group::Form::JAntidiag,
    };
    // -I lies in M (theta = psi = pi), so the distance is zero
    let d = dist_to_subgroup(&g, SubgroupTag::M).unwrap();
    assert!(d <= 1e-8, "central element distance {d}");
}
