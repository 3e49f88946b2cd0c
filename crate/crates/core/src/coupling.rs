//! Wigner 3j symbols in exact rational arithmetic and triple-product integrals
//! of real spherical harmonics.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};
use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{Float, One, Signed, ToPrimitive, Zero};

use crate::spectral::{n_coeffs, SpectralField};
use crate::symmetry::GroupName;
use crate::{Error, Result};

/// Largest degree accepted by [`wigner3j`].
pub const MAX_DEGREE: i64 = 64;

fn factorial(n: i64) -> BigUint {
    (1..=n.max(0) as u64).fold(BigUint::one(), |acc, k| acc * k)
}

/// Nearest f64 to `num/den`.
fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let shift = den.bits() as i64 - num.bits() as i64 + 64;
    let q = if shift >= 0 { (num << shift as usize) / den } else { num / (den << (-shift) as usize) };
    q.to_f64().unwrap_or(f64::INFINITY) * 2.0_f64.powi(-shift as i32)
}

/// Exact square and sign: the 3j symbol equals `sign · sqrt(num/den)`.
struct Exact3j {
    sign: i8,
    num: BigUint,
    den: BigUint,
}

impl Exact3j {
    fn zero() -> Self {
        Self { sign: 0, num: BigUint::zero(), den: BigUint::one() }
    }
    fn to_f64(&self) -> f64 {
        f64::from(self.sign) * ratio_to_f64(&self.num, &self.den).sqrt()
    }
}

fn selection_ok(j: [i64; 3], m: [i64; 3]) -> bool {
    let [j1, j2, j3] = j;
    m.iter().zip(&j).all(|(mi, ji)| mi.abs() <= *ji)
        && m.iter().sum::<i64>() == 0
        && j3 >= (j1 - j2).abs()
        && j3 <= j1 + j2
        && !(m.iter().all(|x| *x == 0) && (j1 + j2 + j3) % 2 == 1)
}

fn racah(j: [i64; 3], m: [i64; 3]) -> Exact3j {
    if !selection_ok(j, m) {
        return Exact3j::zero();
    }
    let [j1, j2, j3] = j;
    let [m1, m2, m3] = m;
    // Alternating sum over k with a common denominator.
    let kmin = 0.max(j2 - j3 - m1).max(j1 - j3 + m2);
    let kmax = (j1 + j2 - j3).min(j1 - m1).min(j2 + m2);
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for k in kmin..=kmax {
        let d: BigUint = factorial(k)
            * factorial(j3 - j2 + k + m1)
            * factorial(j3 - j1 + k - m2)
            * factorial(j1 + j2 - j3 - k)
            * factorial(j1 - k - m1)
            * factorial(j2 - k + m2);
        let d = BigInt::from_biguint(Sign::Plus, d);
        let term_sign = if k % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        num = &num * &d + term_sign * &den;
        den *= d;
        let g = num.gcd(&den);
        if !g.is_zero() && !g.is_one() {
            num /= &g;
            den /= &g;
        }
    }
    if num.is_zero() {
        return Exact3j::zero();
    }
    let mut sign: i8 = if num.is_negative() { -1 } else { 1 };
    if (j1 - j2 - m3).rem_euclid(2) == 1 {
        sign = -sign;
    }
    let s_num = num.magnitude().clone();
    let s_den = den.magnitude().clone();
    let tri = factorial(j1 + j2 - j3) * factorial(j1 - j2 + j3) * factorial(-j1 + j2 + j3);
    let facs = factorial(j1 + m1)
        * factorial(j1 - m1)
        * factorial(j2 + m2)
        * factorial(j2 - m2)
        * factorial(j3 + m3)
        * factorial(j3 - m3);
    let mut n = tri * facs * &s_num * &s_num;
    let mut d = factorial(j1 + j2 + j3 + 1) * &s_den * &s_den;
    let g = n.gcd(&d);
    n /= &g;
    d /= &g;
    Exact3j { sign, num: n, den: d }
}

/// Wigner 3j symbol `(ℓ₁ ℓ₂ ℓ₃; m₁ m₂ m₃)` from the Racah formula in exact arithmetic.
pub fn wigner3j(l1: i64, l2: i64, l3: i64, m1: i64, m2: i64, m3: i64) -> Result<f64> {
    for l in [l1, l2, l3] {
        if l > MAX_DEGREE {
            return Err(Error::DegreeTooLarge(l as usize));
        }
        if l < 0 {
            return Err(Error::OutOfRange(alloc::format!("negative degree {l}")));
        }
    }
    Ok(racah([l1, l2, l3], [m1, m2, m3]).to_f64())
}

/// Squared 3j symbol as an exact reduced fraction `(num, den)`.
pub fn wigner3j_squared_exact(l1: i64, l2: i64, l3: i64, m1: i64, m2: i64, m3: i64) -> (BigUint, BigUint) {
    let e = racah([l1, l2, l3], [m1, m2, m3]);
    (e.num, e.den)
}

/// `(ℓ ℓ ℓ; 0 0 0)²` from the alternating binomial sum, exact.
pub fn equal_degree_3j_squared(l: u64) -> (BigUint, BigUint) {
    let mut sum = BigInt::zero();
    let mut binom = BigUint::one();
    for k in 0..=l {
        let b = BigInt::from_biguint(Sign::Plus, binom.clone());
        let cube = &b * &b * &b;
        if k % 2 == 0 {
            sum += cube;
        } else {
            sum -= cube;
        }
        binom = binom * (l - k) / (k + 1);
    }
    let s = sum.magnitude().clone();
    let lf = factorial(l as i64);
    let mut num = &lf * &lf * &lf * &s * &s;
    let mut den = factorial(3 * l as i64 + 1);
    let g = num.gcd(&den);
    if !g.is_zero() {
        num /= &g;
        den /= &g;
    }
    (num, den)
}

/// `∫ Y_{ℓ0}³` from the binomial formula; zero for odd ℓ.
pub fn axisym_triple_closed_form(l: usize) -> f64 {
    let (num, den) = equal_degree_3j_squared(l as u64);
    let k = (2 * l + 1) as f64;
    (k * k * k / (4.0 * PI)).sqrt() * ratio_to_f64(&num, &den)
}

/// Complex Gaunt integral `∫ Y_{ℓ₁m₁} Y_{ℓ₂m₂} Y_{ℓ₃m₃}` for Condon–Shortley harmonics.
fn complex_gaunt(cache: &mut Cache, l: [i64; 3], m: [i64; 3]) -> f64 {
    if m.iter().sum::<i64>() != 0 {
        return 0.0;
    }
    let w0 = cache.get(l, [0, 0, 0]);
    if w0 == 0.0 {
        return 0.0;
    }
    let wm = cache.get(l, m);
    let k = ((2 * l[0] + 1) * (2 * l[1] + 1) * (2 * l[2] + 1)) as f64;
    (k / (4.0 * PI)).sqrt() * w0 * wm
}

/// Memo table for 3j values.
#[derive(Default)]
struct Cache {
    map: BTreeMap<([i64; 3], [i64; 3]), f64>,
}

impl Cache {
    fn get(&mut self, l: [i64; 3], m: [i64; 3]) -> f64 {
        *self.map.entry((l, m)).or_insert_with(|| racah(l, m).to_f64())
    }
}

/// Row of the unitary map from complex to real harmonics: `Y^R_m = Σ (coeff, complex order)`.
/// Coefficients are `(re, im)`.
pub(crate) fn real_from_complex(m: i64) -> Vec<((f64, f64), i64)> {
    let s = FRAC_1_SQRT_2;
    let parity = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    match m {
        0 => vec![((1.0, 0.0), 0)],
        m if m > 0 => vec![((parity * s, 0.0), m), ((s, 0.0), -m)],
        m => {
            let mu = -m;
            vec![((0.0, -parity * s), mu), ((0.0, s), -mu)]
        }
    }
}

fn cmul(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn real_triple_cached(cache: &mut Cache, l: [i64; 3], m: [i64; 3]) -> f64 {
    let [l1, l2, l3] = l;
    if (l1 + l2 + l3) % 2 == 1 || l3 < (l1 - l2).abs() || l3 > l1 + l2 {
        return 0.0;
    }
    let mut acc = (0.0, 0.0);
    for (c1, k1) in real_from_complex(m[0]) {
        for (c2, k2) in real_from_complex(m[1]) {
            for (c3, k3) in real_from_complex(m[2]) {
                if k1 + k2 + k3 != 0 {
                    continue;
                }
                let g = complex_gaunt(cache, l, [k1, k2, k3]);
                if g != 0.0 {
                    let c = cmul(cmul(c1, c2), c3);
                    acc.0 += c.0 * g;
                    acc.1 += c.1 * g;
                }
            }
        }
    }
    debug_assert!(acc.1.abs() < 1e-12, "imaginary residue {}", acc.1);
    acc.0
}

/// `∫ Y_{ℓ₁m₁} Y_{ℓ₂m₂} Y_{ℓ₃m₃}` over the unit sphere in the real basis.
pub fn real_triple_product(l1: usize, m1: i64, l2: usize, m2: i64, l3: usize, m3: i64) -> Result<f64> {
    for (l, m) in [(l1, m1), (l2, m2), (l3, m3)] {
        if m.unsigned_abs() as usize > l {
            return Err(Error::OutOfRange(alloc::format!("order {m} exceeds degree {l}")));
        }
        if l as i64 > MAX_DEGREE {
            return Err(Error::DegreeTooLarge(l));
        }
    }
    Ok(real_triple_cached(&mut Cache::default(), [l1 as i64, l2 as i64, l3 as i64], [m1, m2, m3]))
}

/// Canonical key: the three `(ℓ, m)` pairs sorted ascending.
pub type TripleKey = [(usize, i64); 3];

pub fn canonical_key(mut k: TripleKey) -> TripleKey {
    k.sort();
    k
}

/// Nonzero real triple products up to a degree cutoff, keyed canonically.
#[derive(Clone, Debug, PartialEq)]
pub struct TripleProductTable {
    l_max: usize,
    entries: BTreeMap<TripleKey, f64>,
}

impl TripleProductTable {
    pub fn build(l_max: usize) -> Self {
        let mut cache = Cache::default();
        let mut entries = BTreeMap::new();
        let idx: Vec<(usize, i64)> = (0..n_coeffs(l_max)).map(crate::spectral::degree_order).collect();
        for a in 0..idx.len() {
            for b in a..idx.len() {
                for c in b..idx.len() {
                    let (la, ma) = idx[a];
                    let (lb, mb) = idx[b];
                    let (lc, mc) = idx[c];
                    if (la + lb + lc) % 2 == 1 || lc > la + lb || lc + la < lb || lc + lb < la {
                        continue;
                    }
                    let v = real_triple_cached(&mut cache, [la as i64, lb as i64, lc as i64], [ma, mb, mc]);
                    if v != 0.0 {
                        entries.insert([idx[a], idx[b], idx[c]], v);
                    }
                }
            }
        }
        Self { l_max, entries }
    }

    pub fn from_entries(l_max: usize, entries: impl IntoIterator<Item = (TripleKey, f64)>) -> Self {
        let entries = entries.into_iter().map(|(k, v)| (canonical_key(k), v)).collect();
        Self { l_max, entries }
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Value for any ordering of the three index pairs.
    pub fn get(&self, key: TripleKey) -> f64 {
        self.entries.get(&canonical_key(key)).copied().unwrap_or(0.0)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&TripleKey, &f64)> {
        self.entries.iter()
    }
}

/// Coefficients of `e²`, by squaring on the grid and analyzing back.
pub fn expand_pointwise_square(e: &SpectralField) -> Result<SpectralField> {
    let l_max = e.l_max();
    let needed = 2 * e.effective_degree();
    if needed > l_max {
        return Err(Error::ResolutionMismatch { grid: l_max, needed });
    }
    let grid = crate::spectral::build_grid(l_max);
    let g = grid.synthesize(e)?;
    grid.analyze(&g.map(|x| x * x), l_max)
}

/// One coefficient of a reference expansion of `e_K²`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExpansionCheck {
    pub ell: usize,
    pub group: GroupName,
    pub degree: usize,
    pub order: i64,
    pub expected: f64,
    pub computed: f64,
}

/// Reference coefficients of `e_K²` at `ℓ = 1, 3`, every other coefficient zero.
/// `Re Y_{ℓm}` of the complex basis is `Y_{ℓm}/√2` in the real one.
fn reference_squares() -> Vec<(usize, GroupName, Vec<(usize, i64, f64)>)> {
    let s = 1.0 / PI.sqrt();
    let h = 0.5 * s;
    let re = FRAC_1_SQRT_2;
    let r13 = 13f64.sqrt();
    vec![
        (1, GroupName::O2m, vec![(0, 0, 0.5 * s), (2, 0, s / 5f64.sqrt())]),
        (3, GroupName::O2m, vec![(0, 0, h), (2, 0, h * 4.0 / (3.0 * 5f64.sqrt())), (4, 0, h * 6.0 / 11.0), (6, 0, h * 100.0 / (33.0 * r13))]),
        (
            3,
            GroupName::Om,
            vec![
                (0, 0, h),
                (4, 0, -h * 7.0 / 11.0),
                (4, 4, h * re * 70f64.sqrt() / 11.0),
                (6, 0, h * 10.0 / (11.0 * r13)),
                (6, 4, h * re * 10.0 * 14f64.sqrt() / (11.0 * r13)),
            ],
        ),
        (
            3,
            GroupName::D6d,
            // The m = 0 part of `e²` is a positive multiple of sin⁶θ, which fixes these signs.
            vec![
                (0, 0, h),
                (2, 0, -h * 5f64.sqrt() / 3.0),
                (4, 0, h * 3.0 / 11.0),
                (6, 0, -h * 5.0 / (33.0 * r13)),
                (6, 6, h * re * 10.0 * 7f64.sqrt() / 429f64.sqrt()),
            ],
        ),
    ]
}

/// Every coefficient of `e_K²` (degree `≤ 2ℓ`) against the reference expansions.
pub fn square_expansion_checks() -> Result<Vec<ExpansionCheck>> {
    let mut out = Vec::new();
    for (ell, group, terms) in reference_squares() {
        let e = crate::symmetry::fix_generator(group, ell, 2 * ell)?;
        let sq = expand_pointwise_square(&e)?;
        for i in 0..n_coeffs(2 * ell) {
            let (degree, order) = crate::spectral::degree_order(i);
            let expected = terms.iter().find(|t| t.0 == degree && t.1 == order).map_or(0.0, |t| t.2);
            out.push(ExpansionCheck { ell, group, degree, order, expected, computed: sq.coeffs()[i] });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt_pi() -> f64 {
        PI.sqrt()
    }

    #[test]
    fn small_3j_values() {
        assert_eq!(wigner3j(1, 1, 1, 0, 0, 0).unwrap(), 0.0);
        let (n, d) = wigner3j_squared_exact(2, 2, 2, 0, 0, 0);
        assert_eq!((n, d), (BigUint::from(2u32), BigUint::from(35u32)));
        // (1 1 0; 1 -1 0) = 1/√3
        assert!((wigner3j(1, 1, 0, 1, -1, 0).unwrap() - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        // (1 1 2; 1 -1 0) = 1/√30
        assert!((wigner3j(1, 1, 2, 1, -1, 0).unwrap() - 1.0 / 30f64.sqrt()).abs() < 1e-15);
        // (2 2 2; 1 -1 0) = 1/√70 · ... sign check against symmetry
        let a = wigner3j(2, 2, 2, 1, -1, 0).unwrap();
        let b = wigner3j(2, 2, 2, -1, 1, 0).unwrap();
        assert!((a - b).abs() < 1e-15);
        assert!(wigner3j(65, 1, 65, 0, 0, 0).is_err());
    }

    #[test]
    fn racah_agrees_with_binomial_formula() {
        for l in 0..=10i64 {
            let a = wigner3j_squared_exact(l, l, l, 0, 0, 0);
            let b = equal_degree_3j_squared(l as u64);
            if l % 2 == 1 {
                assert!(a.0.is_zero() && b.0.is_zero());
            } else {
                assert_eq!(a, b, "l = {l}");
            }
        }
        let (n, d) = equal_degree_3j_squared(4);
        assert_eq!((n, d), (BigUint::from(18u32), BigUint::from(1001u32)));
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(axisym_triple_closed_form(1), 0.0);
        let v2 = 5f64.sqrt() / (7.0 * sqrt_pi());
        assert!((axisym_triple_closed_form(2) - v2).abs() < 1e-15);
        let v4 = 243.0 / (1001.0 * sqrt_pi());
        assert!((axisym_triple_closed_form(4) - v4).abs() < 1e-15);
        let r = real_triple_product(2, 0, 2, 0, 2, 0).unwrap();
        assert!((r - v2).abs() < 1e-15);
        let c = real_triple_product(0, 0, 0, 0, 0, 0).unwrap();
        assert!((c - 0.5 / sqrt_pi()).abs() < 1e-15);
    }

    #[test]
    fn table_is_symmetric_and_obeys_selection_rules() {
        let t = TripleProductTable::build(3);
        for (k, v) in t.entries() {
            let [(a, _), (b, _), (c, _)] = *k;
            assert!((a + b + c) % 2 == 0 && c <= a + b && *v != 0.0);
            let p = t.get([k[2], k[0], k[1]]);
            assert_eq!(p, *v);
        }
        assert_eq!(t.get([(1, 0), (1, 0), (1, 0)]), 0.0);
    }

    #[test]
    fn reference_expansions() {
        for c in square_expansion_checks().unwrap() {
            assert!((c.computed - c.expected).abs() < 1e-12, "{c:?}");
        }
    }

    #[test]
    fn square_expansions() {
        let e = SpectralField::basis(8, 1, 0);
        let sq = expand_pointwise_square(&e).unwrap();
        let s = 1.0 / sqrt_pi();
        assert!((sq.get(0, 0) - 0.5 * s).abs() < 1e-14);
        assert!((sq.get(2, 0) - s / 5f64.sqrt()).abs() < 1e-14);
        let c = SpectralField::basis(4, 0, 0);
        let sq = expand_pointwise_square(&c).unwrap();
        assert!((sq.get(0, 0) - 0.5 / sqrt_pi()).abs() < 1e-14);
        assert!(expand_pointwise_square(&SpectralField::basis(5, 3, 0)).is_err());
    }
}
