//! Quadrature kit: Gauss-Legendre rules with cached nodes, an adaptive
//! Gauss-Kronrod 7-15 integrator, and a periodic trapezoid rule.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::Mutex;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::{Error, Result};

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
///
/// Computed by Newton iteration on the Legendre recurrence and cached.
pub fn gauss_legendre(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static CACHE: OnceLock<Mutex<std::collections::HashMap<usize, &'static (Vec<f64>, Vec<f64>)>>> =
        OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(std::collections::HashMap::new()));
    let mut guard = cache.lock().unwrap();
    if let Some(r) = guard.get(&n) {
        return r;
    }
    let computed: &'static (Vec<f64>, Vec<f64>) = Box::leak(Box::new(compute_gl(n)));
    guard.insert(n, computed);
    computed
}

fn compute_gl(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for j in 0..m {
        let mut x = (std::f64::consts::PI * (j as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre P_n(x) and P'_n(x) by recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[j] = -x;
        nodes[n - 1 - j] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[j] = w;
        weights[n - 1 - j] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// n-point Gauss-Legendre integral of `f` over [a, b].
pub fn integrate_gl<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize) -> f64 {
    let (x, w) = gauss_legendre(n);
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = 0.0;
    for i in 0..n {
        acc += w[i] * f(c + h * x[i]);
    }
    acc * h
}

/// Complex-valued Gauss-Legendre integral over [a, b].
pub fn integrate_gl_c<F: FnMut(f64) -> Complex64>(mut f: F, a: f64, b: f64, n: usize) -> Complex64 {
    let (x, w) = gauss_legendre(n);
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        acc += f(c + h * x[i]) * w[i];
    }
    acc * h
}

/// Trapezoid rule for a periodic integrand over one full period [a, b).
/// Spectrally accurate for smooth periodic functions.
pub fn integrate_periodic<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    n: usize,
) -> Complex64 {
    let h = (b - a) / n as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        acc += f(a + h * i as f64);
    }
    acc * h
}

// Gauss-Kronrod 7-15 abscissae and weights (positive half).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut res_g = fc * WG[3];
    let mut res_k = fc * WGK[7];
    for j in 0..7 {
        let x = h * XGK[j];
        let f1 = f(c - x);
        let f2 = f(c + x);
        res_k += (f1 + f2) * WGK[j];
        if j % 2 == 1 {
            res_g += (f1 + f2) * WG[j / 2];
        }
    }
    let err = ((res_k - res_g) * h).norm();
    (res_k * h, err)
}

struct Interval {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Interval {}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.partial_cmp(&other.err).unwrap_or(Ordering::Equal)
    }
}

/// Adaptive Gauss-Kronrod integration of a complex integrand.
///
/// Splits the interval with the largest error estimate until the global
/// estimate satisfies `abs_tol + rel_tol * |I|`, up to `max_subdiv`
/// subdivisions (default cap 4096 = 2^12).
pub fn integrate_adaptive_c<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_subdiv: usize,
) -> Result<(Complex64, f64)> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::NonFinite("integration bounds"));
    }
    let (v, e) = gk15(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Interval {
        a,
        b,
        value: v,
        err: e,
    });
    let mut total_v = v;
    let mut total_e = e;
    let mut splits = 0usize;
    while total_e > abs_tol + rel_tol * total_v.norm() {
        if splits >= max_subdiv {
            return Err(Error::QuadratureNotConverged("adaptive GK subdivision cap"));
        }
        let worst = heap.pop().expect("heap nonempty");
        // Floating-point floor: refuse to split an interval of zero width.
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::QuadratureNotConverged("interval underflow"));
        }
        let (v1, e1) = gk15(&mut f, worst.a, mid);
        let (v2, e2) = gk15(&mut f, mid, worst.b);
        total_v += v1 + v2 - worst.value;
        total_e += e1 + e2 - worst.err;
        heap.push(Interval {
            a: worst.a,
            b: mid,
            value: v1,
            err: e1,
        });
        heap.push(Interval {
            a: mid,
            b: worst.b,
            value: v2,
            err: e2,
        });
        splits += 1;
    }
    Ok((total_v, total_e))
}

/// Real-valued adaptive Gauss-Kronrod wrapper.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_subdiv: usize,
) -> Result<(f64, f64)> {
    let (v, e) = integrate_adaptive_c(
        |x| Complex64::new(f(x), 0.0),
        a,
        b,
        abs_tol,
        rel_tol,
        max_subdiv,
    )?;
    Ok((v.re, e))
}
