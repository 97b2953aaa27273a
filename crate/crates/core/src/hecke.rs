//! Exact spherical Hecke algebra of GL(3) over a local field with residue
//! size q: double-coset basis indexed by decreasing integer triples, left
//! coset enumeration in Hermite form, exact rational convolution, the
//! adjoint involution, and the amplifier built on the relation
//! Phi(1,0,0) * Phi(1,1,0) = Phi(2,1,0) + (q^2 + q + 1) Phi(1,1,1).
//!
//! Everything here is exact: matrix entries are integers (after central
//! normalization) and coefficients are arbitrary-precision rationals, so
//! algebra identities are checked with equality rather than tolerances.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Decreasing integer triple indexing a double coset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Signature {
    pub a1: i32,
    pub a2: i32,
    pub a3: i32,
}

impl Signature {
    pub fn new(a1: i32, a2: i32, a3: i32) -> Result<Self> {
        if !(a1 >= a2 && a2 >= a3) {
            return Err(Error::domain("signature must be decreasing"));
        }
        Ok(Signature { a1, a2, a3 })
    }

    pub fn from_unsorted(mut v: [i32; 3]) -> Self {
        v.sort_unstable_by(|a, b| b.cmp(a));
        Signature {
            a1: v[0],
            a2: v[1],
            a3: v[2],
        }
    }

    /// Central shift by c: adds c to every entry.
    pub fn shifted(&self, c: i32) -> Signature {
        Signature {
            a1: self.a1 + c,
            a2: self.a2 + c,
            a3: self.a3 + c,
        }
    }

    /// Shift making the smallest entry zero, returned with the shift used.
    pub fn normalized(&self) -> (Signature, i32) {
        (self.shifted(-self.a3), self.a3)
    }

    pub fn sum(&self) -> i32 {
        self.a1 + self.a2 + self.a3
    }

    /// The signature of the inverse coset: (-a3, -a2, -a1).
    pub fn adjoint(&self) -> Signature {
        Signature {
            a1: -self.a3,
            a2: -self.a2,
            a3: -self.a1,
        }
    }
}

/// 3x3 integer matrix, row-major.
pub type IMat3 = [i128; 9];

fn imul(a: &IMat3, b: &IMat3) -> IMat3 {
    let mut c = [0i128; 9];
    for i in 0..3 {
        for j in 0..3 {
            c[3 * i + j] = a[3 * i] * b[j] + a[3 * i + 1] * b[3 + j] + a[3 * i + 2] * b[6 + j];
        }
    }
    c
}

fn idet(a: &IMat3) -> i128 {
    a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6])
        + a[2] * (a[3] * a[7] - a[4] * a[6])
}

/// Adjugate: a * adj(a) = det(a) I.
fn iadjugate(a: &IMat3) -> IMat3 {
    [
        a[4] * a[8] - a[5] * a[7],
        a[2] * a[7] - a[1] * a[8],
        a[1] * a[5] - a[2] * a[4],
        a[5] * a[6] - a[3] * a[8],
        a[0] * a[8] - a[2] * a[6],
        a[2] * a[3] - a[0] * a[5],
        a[3] * a[7] - a[4] * a[6],
        a[1] * a[6] - a[0] * a[7],
        a[0] * a[4] - a[1] * a[3],
    ]
}

fn vp_int(mut x: i128, p: i128) -> Option<i32> {
    if x == 0 {
        return None;
    }
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    Some(v)
}

fn min_val(vals: impl Iterator<Item = Option<i32>>) -> Option<i32> {
    vals.flatten().min()
}

/// Valuations of the elementary divisors of an integer matrix at p, sorted
/// descending (largest divisor first), computed from gcd-of-minors:
/// v1 = min entry valuation, v1 + v2 = min 2x2 minor valuation,
/// v1 + v2 + v3 = det valuation.
pub fn smith_signature_int(m: &IMat3, p: i128) -> Result<Signature> {
    let det = idet(m);
    if det == 0 {
        return Err(Error::SingularInput("smith signature of singular matrix"));
    }
    let v1 = min_val(m.iter().map(|&x| vp_int(x, p))).expect("nonzero matrix");
    let adj = iadjugate(m);
    // entries of the adjugate are (up to sign) the 2x2 minors
    let v12 = min_val(adj.iter().map(|&x| vp_int(x, p))).expect("nonsingular");
    let vdet = vp_int(det, p).expect("nonzero det");
    let v2 = v12 - v1;
    let v3 = vdet - v12;
    Ok(Signature {
        a1: v3,
        a2: v2,
        a3: v1,
    })
}

/// Smith signature of a rational matrix whose denominators are powers of p,
/// given as an integer matrix together with the power s of p that divides
/// it (matrix value = int / p^s).
pub fn smith_signature_scaled(m: &IMat3, p: i128, scale_pow: i32) -> Result<Signature> {
    Ok(smith_signature_int(m, p)?.shifted(-scale_pow))
}

/// Left-coset representative table for one double coset.
#[derive(Debug, Clone)]
pub struct CosetTable {
    pub q: u32,
    pub signature: Signature,
    /// Representatives of the centrally normalized signature (a3 = 0);
    /// the true representative is the integer matrix divided by p^{-shift}.
    pub reps: Vec<IMat3>,
    pub shift: i32,
}

impl CosetTable {
    pub fn degree(&self) -> usize {
        self.reps.len()
    }

    /// Representatives as (numerator matrix, power of p in the denominator).
    pub fn reps_rational(&self) -> Vec<(IMat3, i32)> {
        self.reps.iter().map(|r| (*r, -self.shift.min(0))).collect()
    }
}

/// Work caps for coset enumeration and convolution pair counting.
const ENUM_BUDGET: u64 = 4_000_000;
const PAIR_BUDGET: u64 = 1_000_000;

/// The Hecke algebra at one split place with residue size q (a prime at
/// desk scale). Owns a cache of coset tables, keyed by the normalized
/// signature sum, so repeated convolutions do not re-enumerate.
pub struct HeckeAlgebra {
    pub q: u32,
    tables: Mutex<HashMap<i32, HashMap<Signature, std::sync::Arc<Vec<IMat3>>>>>,
}

impl HeckeAlgebra {
    pub fn new(q: u32) -> Result<Self> {
        if ![2u32, 3, 5].contains(&q) {
            return Err(Error::domain(format!(
                "residue size {q} outside desk scale {{2,3,5}}"
            )));
        }
        Ok(HeckeAlgebra {
            q,
            tables: Mutex::new(HashMap::new()),
        })
    }

    fn p(&self) -> i128 {
        self.q as i128
    }

    /// Estimated number of Hermite matrices of determinant p^n.
    fn enumeration_size(&self, n: i32) -> u64 {
        let p = self.q as u64;
        let mut total = 0u64;
        for b1 in 0..=n {
            for b2 in 0..=(n - b1) {
                total = total.saturating_add(p.pow((2 * b1 + b2) as u32));
            }
        }
        total
    }

    /// Builds (or fetches) the classification of all column-Hermite
    /// matrices with determinant p^n by their Smith signature.
    fn classified(&self, n: i32) -> Result<HashMap<Signature, std::sync::Arc<Vec<IMat3>>>> {
        {
            let guard = self.tables.lock().unwrap();
            if let Some(m) = guard.get(&n) {
                return Ok(m.clone());
            }
        }
        if self.enumeration_size(n) > ENUM_BUDGET {
            return Err(Error::BudgetExceeded(format!(
                "coset enumeration for determinant p^{n} at q = {}",
                self.q
            )));
        }
        let p = self.p();
        let mut by_sig: HashMap<Signature, Vec<IMat3>> = HashMap::new();
        // Column Hermite form: upper triangular, diagonal (p^b1, p^b2, p^b3),
        // in row i the entries right of the diagonal reduced mod p^bi.
        for b1 in 0..=n {
            for b2 in 0..=(n - b1) {
                let b3 = n - b1 - b2;
                let d1 = p.pow(b1 as u32);
                let d2 = p.pow(b2 as u32);
                let d3 = p.pow(b3 as u32);
                for h12 in 0..d1 {
                    for h13 in 0..d1 {
                        for h23 in 0..d2 {
                            let m: IMat3 = [d1, h12, h13, 0, d2, h23, 0, 0, d3];
                            let sig = smith_signature_int(&m, p)?;
                            by_sig.entry(sig).or_default().push(m);
                        }
                    }
                }
            }
        }
        let shared: HashMap<Signature, std::sync::Arc<Vec<IMat3>>> = by_sig
            .into_iter()
            .map(|(k, v)| (k, std::sync::Arc::new(v)))
            .collect();
        let mut guard = self.tables.lock().unwrap();
        guard.insert(n, shared.clone());
        Ok(shared)
    }

    /// Complete list of left-coset representatives of the double coset of
    /// the given signature.
    pub fn coset_reps(&self, sig: Signature) -> Result<CosetTable> {
        if sig.a1 - sig.a3 > 4 {
            return Err(Error::BudgetExceeded(format!(
                "signature spread {} exceeds desk bound 4",
                sig.a1 - sig.a3
            )));
        }
        let (norm, shift) = sig.normalized();
        let classified = self.classified(norm.sum())?;
        let reps = classified
            .get(&norm)
            .map(|v| v.as_ref().clone())
            .unwrap_or_default();
        assert!(
            !reps.is_empty(),
            "every double coset has at least one representative"
        );
        Ok(CosetTable {
            q: self.q,
            signature: sig,
            reps,
            shift,
        })
    }

    fn degree(&self, normalized: Signature) -> Result<u64> {
        let classified = self.classified(normalized.sum())?;
        Ok(classified
            .get(&normalized)
            .map(|v| v.len() as u64)
            .unwrap_or(0))
    }

    /// Exact convolution of two elements of the algebra.
    ///
    /// Both factors are centrally shifted to nonnegative signatures, every
    /// pair of representatives is multiplied and classified, and the pair
    /// count for each target coset is divided by that coset's degree (the
    /// division is always exact).
    pub fn convolve(&self, h1: &HeckeElement, h2: &HeckeElement) -> Result<HeckeElement> {
        if h1.q != self.q || h2.q != self.q {
            return Err(Error::domain("convolution requires matching residue size"));
        }
        let p = self.p();
        let mut acc: BTreeMap<Signature, BigRational> = BTreeMap::new();
        let mut pair_budget = 0u64;
        for (sig1, c1) in &h1.terms {
            for (sig2, c2) in &h2.terms {
                let (n1, s1) = sig1.normalized();
                let (n2, s2) = sig2.normalized();
                let t1 = self.coset_reps(n1)?;
                let t2 = self.coset_reps(n2)?;
                pair_budget += (t1.reps.len() * t2.reps.len()) as u64;
                if pair_budget > PAIR_BUDGET {
                    return Err(Error::BudgetExceeded(format!(
                        "convolution pair count {pair_budget}"
                    )));
                }
                let mut counts: HashMap<Signature, u64> = HashMap::new();
                for x in &t1.reps {
                    for y in &t2.reps {
                        let prod = imul(x, y);
                        let sig = smith_signature_int(&prod, p)?;
                        *counts.entry(sig).or_insert(0) += 1;
                    }
                }
                let weight = c1 * c2;
                for (sig, pairs) in counts {
                    let deg = self.degree(sig)?;
                    assert!(deg > 0 && pairs % deg == 0, "inexact coset division");
                    let coeff = &weight * BigRational::from_integer(BigInt::from(pairs / deg));
                    let shifted = sig.shifted(s1 + s2);
                    let entry = acc.entry(shifted).or_insert_with(BigRational::zero);
                    *entry += coeff;
                }
            }
        }
        acc.retain(|_, v| !v.is_zero());
        Ok(HeckeElement {
            q: self.q,
            terms: acc,
        })
    }
}

/// Finite rational linear combination of double-coset characteristic
/// functions at a fixed place.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeckeElement {
    pub q: u32,
    pub terms: BTreeMap<Signature, BigRational>,
}

impl HeckeElement {
    pub fn zero(q: u32) -> Self {
        HeckeElement {
            q,
            terms: BTreeMap::new(),
        }
    }

    /// The basis element Phi(sig).
    pub fn phi(q: u32, sig: Signature) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(sig, BigRational::one());
        HeckeElement { q, terms }
    }

    /// Identity of the algebra: Phi(0,0,0).
    pub fn identity(q: u32) -> Self {
        HeckeElement::phi(
            q,
            Signature {
                a1: 0,
                a2: 0,
                a3: 0,
            },
        )
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            for (s, v) in &self.terms {
                terms.insert(*s, v * c);
            }
        }
        HeckeElement { q: self.q, terms }
    }

    pub fn add(&self, other: &HeckeElement) -> Self {
        assert_eq!(self.q, other.q);
        let mut terms = self.terms.clone();
        for (s, v) in &other.terms {
            let e = terms.entry(*s).or_insert_with(BigRational::zero);
            *e += v;
        }
        terms.retain(|_, v| !v.is_zero());
        HeckeElement { q: self.q, terms }
    }

    pub fn coeff(&self, sig: &Signature) -> BigRational {
        self.terms
            .get(sig)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Adjoint: signature (a1,a2,a3) goes to (-a3,-a2,-a1) with conjugated
    /// (here: identical, real) coefficients.
    pub fn adjoint(&self) -> Self {
        let mut terms = BTreeMap::new();
        for (s, v) in &self.terms {
            terms.insert(s.adjoint(), v.clone());
        }
        HeckeElement { q: self.q, terms }
    }
}

/// JSON wire format: {"q": ..., "terms": [{"sig": [a1,a2,a3], "num": ..,
/// "den": ..}, ...]}.
#[derive(Debug, Serialize, Deserialize)]
pub struct HeckeElementJson {
    pub q: u32,
    pub terms: Vec<HeckeTermJson>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct HeckeTermJson {
    pub sig: [i32; 3],
    pub num: i64,
    pub den: i64,
}

impl HeckeElement {
    pub fn to_json(&self) -> Result<String> {
        let mut terms = Vec::new();
        for (s, v) in &self.terms {
            let num = v.numer().to_i64().ok_or_else(|| {
                Error::domain("coefficient numerator exceeds the JSON integer range")
            })?;
            let den = v.denom().to_i64().ok_or_else(|| {
                Error::domain("coefficient denominator exceeds the JSON integer range")
            })?;
            terms.push(HeckeTermJson {
                sig: [s.a1, s.a2, s.a3],
                num,
                den,
            });
        }
        let doc = HeckeElementJson { q: self.q, terms };
        serde_json::to_string_pretty(&doc).map_err(|e| Error::domain(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: HeckeElementJson =
            serde_json::from_str(s).map_err(|e| Error::domain(e.to_string()))?;
        let mut terms = BTreeMap::new();
        for t in doc.terms {
            let sig = Signature::new(t.sig[0], t.sig[1], t.sig[2])?;
            if t.den == 0 {
                return Err(Error::domain("zero denominator"));
            }
            let v = BigRational::new(BigInt::from(t.num), BigInt::from(t.den));
            if !v.is_zero() {
                terms.insert(sig, v);
            }
        }
        Ok(HeckeElement { q: doc.q, terms })
    }
}

fn rational_from_f64(x: f64, what: &'static str) -> Result<BigRational> {
    if !x.is_finite() {
        return Err(Error::NonFinite(what));
    }
    BigRational::from_float(x).ok_or(Error::NonFinite(what))
}

/// The amplifier element: Phi(1,0,0)/(a q) when |a| >= 1/2, otherwise
/// Phi(2,1,0)/(b q^2); both eigenvalues below 1/2 is inconsistent input.
pub fn amplifier_t(q: u32, a_eig: f64, b_eig: f64) -> Result<HeckeElement> {
    if !(a_eig.is_finite() && b_eig.is_finite()) {
        return Err(Error::NonFinite("Hecke eigenvalue"));
    }
    if a_eig.abs() >= 0.5 {
        let norm =
            rational_from_f64(a_eig, "a eigenvalue")? * BigRational::from_integer(BigInt::from(q));
        Ok(HeckeElement::phi(q, Signature::new(1, 0, 0)?).scale(&norm.recip()))
    } else if b_eig.abs() >= 0.5 {
        let norm = rational_from_f64(b_eig, "b eigenvalue")?
            * BigRational::from_integer(BigInt::from(q * q));
        Ok(HeckeElement::phi(q, Signature::new(2, 1, 0)?).scale(&norm.recip()))
    } else {
        Err(Error::EigenvaluePairInvalid(a_eig.abs(), b_eig.abs()))
    }
}

/// One term of the T T* expansion with its size diagnostic.
#[derive(Debug, Clone)]
pub struct TtStarTerm {
    pub sig: Signature,
    pub coeff: BigRational,
    /// |alpha| q^{a1 - a3}, the quantity the coefficient bound controls.
    pub bound_ratio: f64,
    /// Whether the signature lies in one of the three admissible families.
    pub in_families: bool,
}

/// Expansion of T T* with the per-term bound report.
#[derive(Debug, Clone)]
pub struct TtStarReport {
    pub element: HeckeElement,
    pub terms: Vec<TtStarTerm>,
    pub max_bound_ratio: f64,
    pub all_in_families: bool,
}

/// Membership in one of the three (range, trace) families that constrain
/// the support of the amplifier square.
pub fn signature_in_families(s: &Signature) -> bool {
    let within = |lo: i32, hi: i32| [s.a1, s.a2, s.a3].iter().all(|&a| (lo..=hi).contains(&a));
    (within(-1, 2) && s.sum() == 2)
        || (within(-2, 2) && s.sum() == 0)
        || (within(-2, 1) && s.sum() == -2)
}

pub fn tt_star_expansion(q: u32, a_eig: f64, b_eig: f64) -> Result<TtStarReport> {
    let algebra = HeckeAlgebra::new(q)?;
    let t = amplifier_t(q, a_eig, b_eig)?;
    let prod = algebra.convolve(&t, &t.adjoint())?;
    let mut terms = Vec::new();
    let mut max_ratio = 0.0f64;
    let mut all_fam = true;
    for (sig, coeff) in &prod.terms {
        let abs = coeff.abs();
        let scale = BigRational::from_integer(BigInt::from(q).pow((sig.a1 - sig.a3) as u32));
        let ratio = (abs * scale).to_f64().unwrap_or(f64::INFINITY);
        let fam = signature_in_families(sig);
        all_fam &= fam;
        max_ratio = max_ratio.max(ratio);
        terms.push(TtStarTerm {
            sig: *sig,
            coeff: coeff.clone(),
            bound_ratio: ratio,
            in_families: fam,
        });
    }
    Ok(TtStarReport {
        element: prod,
        terms,
        max_bound_ratio: max_ratio,
        all_in_families: all_fam,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(a: i32, b: i32, c: i32) -> Signature {
        Signature::new(a, b, c).unwrap()
    }

    fn int(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn trivial_coset_table() {
        let alg = HeckeAlgebra::new(2).unwrap();
        let t = alg.coset_reps(sig(0, 0, 0)).unwrap();
        assert_eq!(t.degree(), 1);
        assert_eq!(t.reps[0], [1, 0, 0, 0, 1, 0, 0, 0, 1]);
    }

    #[test]
    fn coset_counts() {
        let alg2 = HeckeAlgebra::new(2).unwrap();
        assert_eq!(alg2.coset_reps(sig(1, 0, 0)).unwrap().degree(), 7);
        let alg3 = HeckeAlgebra::new(3).unwrap();
        assert_eq!(alg3.coset_reps(sig(1, 1, 0)).unwrap().degree(), 13);
        // degree of (2,1,0) is (q^2+q)(q^2+q+1)
        assert_eq!(alg2.coset_reps(sig(2, 1, 0)).unwrap().degree(), 6 * 7);
        assert_eq!(alg3.coset_reps(sig(2, 1, 0)).unwrap().degree(), 12 * 13);
    }

    #[test]
    fn smith_signature_basics() {
        assert_eq!(
            smith_signature_int(&[4, 0, 0, 0, 2, 0, 0, 0, 1], 2).unwrap(),
            sig(2, 1, 0)
        );
        // unimodular integer matrix
        assert_eq!(
            smith_signature_int(&[1, 5, 3, 0, 1, 7, 0, 0, 1], 2).unwrap(),
            sig(0, 0, 0)
        );
        assert!(matches!(
            smith_signature_int(&[1, 0, 0, 0, 1, 0, 1, 0, 0], 2),
            Err(Error::SingularInput(_))
        ));
    }

    #[test]
    fn products_of_reps_land_in_expected_cosets() {
        let alg = HeckeAlgebra::new(2).unwrap();
        let t1 = alg.coset_reps(sig(1, 0, 0)).unwrap();
        let t2 = alg.coset_reps(sig(1, 1, 0)).unwrap();
        for x in &t1.reps {
            for y in &t2.reps {
                let s = smith_signature_int(&imul(x, y), 2).unwrap();
                assert!(s == sig(2, 1, 0) || s == sig(1, 1, 1), "unexpected {s:?}");
            }
        }
    }

    #[test]
    fn identity_convolution() {
        let alg = HeckeAlgebra::new(3).unwrap();
        let h = HeckeElement::phi(3, sig(1, 0, 0)).scale(&int(5)).add(
            &HeckeElement::phi(3, sig(1, 1, 0))
                .scale(&BigRational::new(BigInt::from(2), BigInt::from(7))),
        );
        let conv = alg.convolve(&HeckeElement::identity(3), &h).unwrap();
        assert_eq!(conv, h);
        let conv2 = alg.convolve(&h, &HeckeElement::identity(3)).unwrap();
        assert_eq!(conv2, h);
    }

    #[test]
    fn hecke_relation_all_desk_primes() {
        for q in [2u32, 3, 5] {
            let alg = HeckeAlgebra::new(q).unwrap();
            let lhs = alg
                .convolve(
                    &HeckeElement::phi(q, sig(1, 0, 0)),
                    &HeckeElement::phi(q, sig(1, 1, 0)),
                )
                .unwrap();
            let expect = HeckeElement::phi(q, sig(2, 1, 0))
                .add(&HeckeElement::phi(q, sig(1, 1, 1)).scale(&int((q * q + q + 1) as i64)));
            assert_eq!(lhs, expect, "relation failed at q = {q}");
        }
    }

    #[test]
    fn convolution_commutes() {
        let alg = HeckeAlgebra::new(2).unwrap();
        let basis = [
            sig(1, 0, 0),
            sig(1, 1, 0),
            sig(1, 1, 1),
            sig(2, 1, 0),
            sig(0, 0, -1),
        ];
        for (i, s1) in basis.iter().enumerate() {
            for s2 in basis.iter().skip(i) {
                let h1 = HeckeElement::phi(2, *s1);
                let h2 = HeckeElement::phi(2, *s2);
                let ab = alg.convolve(&h1, &h2).unwrap();
                let ba = alg.convolve(&h2, &h1).unwrap();
                assert_eq!(ab, ba, "commutativity failed for {s1:?} * {s2:?}");
            }
        }
    }

    #[test]
    fn adjoint_involution_and_value() {
        let h = HeckeElement::phi(2, sig(1, 0, 0)).scale(&int(3)).add(
            &HeckeElement::phi(2, sig(2, 1, 0))
                .scale(&BigRational::new(BigInt::from(-1), BigInt::from(4))),
        );
        assert_eq!(h.adjoint().adjoint(), h);
        assert_eq!(
            HeckeElement::phi(2, sig(1, 0, 0)).adjoint(),
            HeckeElement::phi(2, sig(0, 0, -1))
        );
        assert_eq!(
            HeckeElement::identity(5).adjoint(),
            HeckeElement::identity(5)
        );
    }

    #[test]
    fn rep_inversion_oracle_for_adjoint() {
        // invert all representatives of (1,0,0) at q = 2 and re-classify:
        // inverse = adjugate / det, det = p, so classify the adjugate and
        // shift by the determinant valuation
        let alg = HeckeAlgebra::new(2).unwrap();
        let t = alg.coset_reps(sig(1, 0, 0)).unwrap();
        assert_eq!(t.degree(), 7);
        for x in &t.reps {
            let adj = iadjugate(x);
            let n = vp_int(idet(x), 2).unwrap();
            let s = smith_signature_scaled(&adj, 2, n).unwrap();
            assert_eq!(s, sig(0, 0, -1));
        }
    }

    #[test]
    fn convolution_with_negative_entries_uses_central_shift() {
        // Phi(1,0,0) * Phi(0,0,-1) = (q^2+q+1) Phi(0,0,0) + Phi(1,0,-1)
        let q = 3u32;
        let alg = HeckeAlgebra::new(q).unwrap();
        let lhs = alg
            .convolve(
                &HeckeElement::phi(q, sig(1, 0, 0)),
                &HeckeElement::phi(q, sig(0, 0, -1)),
            )
            .unwrap();
        let expect = HeckeElement::phi(q, sig(0, 0, 0))
            .scale(&int((q * q + q + 1) as i64))
            .add(&HeckeElement::phi(q, sig(1, 0, -1)));
        assert_eq!(lhs, expect);
    }

    #[test]
    fn amplifier_branches() {
        // first branch: (a, b) = (1, 0.1), q = 2 gives Phi(1,0,0)/2
        let t = amplifier_t(2, 1.0, 0.1).unwrap();
        assert_eq!(t.terms.len(), 1);
        assert_eq!(
            t.coeff(&sig(1, 0, 0)),
            BigRational::new(BigInt::from(1), BigInt::from(2))
        );
        // second branch: (a, b) = (0.1, 1), q = 3 gives Phi(2,1,0)/9
        let t = amplifier_t(3, 0.1, 1.0).unwrap();
        assert_eq!(
            t.coeff(&sig(2, 1, 0)),
            BigRational::new(BigInt::from(1), BigInt::from(9))
        );
        // both small: guarded
        assert!(matches!(
            amplifier_t(2, 0.4, 0.4),
            Err(Error::EigenvaluePairInvalid(_, _))
        ));
    }

    #[test]
    fn tt_star_first_branch_exact() {
        // worst case |a| = 1/2 at q = 2: T T* = 4/q^2 (Phi(1,0,0) * Phi(0,0,-1))
        // = 7 Phi(0,0,0) + Phi(1,0,-1); bound ratios are 7 and 1 * q^2 = 4
        let rep = tt_star_expansion(2, 0.5, 0.0).unwrap();
        assert!(rep.all_in_families);
        assert_eq!(rep.element.coeff(&sig(0, 0, 0)), int(7));
        assert_eq!(rep.element.coeff(&sig(1, 0, -1)), int(1));
        assert_eq!(rep.max_bound_ratio, 7.0);
    }

    #[test]
    fn tt_star_identity_coefficient_counts_cosets() {
        // before normalization, (Phi * Phi*)(e) equals the degree q^2+q+1
        for q in [2u32, 3] {
            let alg = HeckeAlgebra::new(q).unwrap();
            let phi = HeckeElement::phi(q, sig(1, 0, 0));
            let prod = alg.convolve(&phi, &phi.adjoint()).unwrap();
            assert_eq!(prod.coeff(&sig(0, 0, 0)), int((q * q + q + 1) as i64));
        }
    }

    #[test]
    fn tt_star_families_both_branches() {
        for q in [2u32, 3] {
            for (a, b) in [(0.9, 0.0), (0.1, 0.8)] {
                let rep = tt_star_expansion(q, a, b).unwrap();
                assert!(rep.all_in_families, "family violation at q = {q}");
                assert!(rep.max_bound_ratio.is_finite());
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let h = HeckeElement::phi(2, sig(1, 0, -1))
            .scale(&BigRational::new(BigInt::from(-3), BigInt::from(8)));
        let s = h.to_json().unwrap();
        let back = HeckeElement::from_json(&s).unwrap();
        assert_eq!(h, back);
    }

    #[test]
    fn budget_guards() {
        let alg = HeckeAlgebra::new(5).unwrap();
        assert!(matches!(
            alg.coset_reps(sig(5, 0, 0)),
            Err(Error::BudgetExceeded(_))
        ));
        assert!(HeckeAlgebra::new(7).is_err());
    }
}

/// Convenience constructor for integer coefficients.
pub fn coefficient_from_integer(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}
