//! Factored determinant formulas for `Z_n x H`.
//!
//! * [`theorem1_eval`] evaluates a `Z_n x H` determinant as a product of `H`
//!   determinants over the n-th roots of unity, grouped by divisor of `n` into
//!   rational integers.
//! * [`split_z2`] is its `n = 2` specialisation, staying over the integers.
//! * [`det_z2d8`] and [`det_z2q8`] are the closed forms in terms of four cubics.
//!
//! # Pack layout
//!
//! A [`QuartetPack`] `(f1, f2, g1, g2)` stores the coefficient of `x^j` as the
//! coefficient of `(0, R^j)`, `(1, R^j)`, `(0, FR^j)`, `(1, FR^j)` in
//! `Z2 x D8` (respectively `(0, A^j)`, `(1, A^j)`, `(0, BA^j)`, `(1, BA^j)` in
//! `Z2 x Q8`). With the canonical orderings of [`crate::groups`] the group
//! vector is therefore `f1 ++ g1 ++ f2 ++ g2`.

use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cyclotomic::{
    conjugate_product, eval_poly_at_root, CyclotomicError, CyclotomicNumber, GaussianInt,
};
use crate::groupring::{bareiss_determinant, group_matrix_of, GroupRingElement, GroupRingError};
use crate::groups::{direct_product, make_cyclic, make_dihedral, make_quaternion, FiniteGroup};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FactoredError {
    #[error("expected {expected} coefficients, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("cyclic factor order must be positive")]
    ZeroCyclicOrder,
    #[error(transparent)]
    Cyclotomic(#[from] CyclotomicError),
    #[error(transparent)]
    GroupRing(#[from] GroupRingError),
}

/// Integer cubic `c0 + c1 x + c2 x^2 + c3 x^3`.
pub type Cubic = [i64; 4];

/// `H(x) = (x + 1)(x^2 + 1)`.
pub const H_CUBIC: Cubic = [1, 1, 1, 1];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuartetPack {
    pub f1: Cubic,
    pub f2: Cubic,
    pub g1: Cubic,
    pub g2: Cubic,
}

impl QuartetPack {
    pub const fn new(f1: Cubic, f2: Cubic, g1: Cubic, g2: Cubic) -> Self {
        QuartetPack { f1, f2, g1, g2 }
    }

    pub const fn identity() -> Self {
        QuartetPack::new([1, 0, 0, 0], [0; 4], [0; 4], [0; 4])
    }

    /// Coefficients in canonical group order (`f1 ++ g1 ++ f2 ++ g2`).
    pub fn to_vector(&self) -> [i64; 16] {
        let mut v = [0i64; 16];
        v[0..4].copy_from_slice(&self.f1);
        v[4..8].copy_from_slice(&self.g1);
        v[8..12].copy_from_slice(&self.f2);
        v[12..16].copy_from_slice(&self.g2);
        v
    }

    pub fn from_vector(v: &[i64]) -> Result<Self, FactoredError> {
        if v.len() != 16 {
            return Err(FactoredError::LengthMismatch {
                expected: 16,
                found: v.len(),
            });
        }
        let cubic = |s: usize| -> Cubic { [v[s], v[s + 1], v[s + 2], v[s + 3]] };
        Ok(QuartetPack::new(cubic(0), cubic(8), cubic(4), cubic(12)))
    }

    pub fn to_element(&self, variant: PackGroup) -> GroupRingElement {
        GroupRingElement::from_i64s(variant.group(), &self.to_vector())
            .expect("pack vectors have length 16")
    }
}

/// Which order-16 group a pack encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PackGroup {
    #[serde(rename = "z2xd8")]
    Z2xD8,
    #[serde(rename = "z2xq8")]
    Z2xQ8,
}

impl PackGroup {
    pub fn name(self) -> &'static str {
        match self {
            PackGroup::Z2xD8 => "z2xd8",
            PackGroup::Z2xQ8 => "z2xq8",
        }
    }

    /// Shared table of `Z2 x D8` or `Z2 x Q8`.
    pub fn group(self) -> Arc<FiniteGroup> {
        static D8: OnceLock<Arc<FiniteGroup>> = OnceLock::new();
        static Q8: OnceLock<Arc<FiniteGroup>> = OnceLock::new();
        let z2 = || make_cyclic(2).expect("Z2");
        match self {
            PackGroup::Z2xD8 => D8
                .get_or_init(|| {
                    Arc::new(direct_product(&z2(), &make_dihedral(8).expect("D8")).expect("Z2xD8"))
                })
                .clone(),
            PackGroup::Z2xQ8 => Q8
                .get_or_init(|| Arc::new(direct_product(&z2(), &make_quaternion()).expect("Z2xQ8")))
                .clone(),
        }
    }

    /// Sign joining the two Gaussian norms in `ell(z)`.
    fn ell_sign(self) -> i64 {
        match self {
            PackGroup::Z2xD8 => -1,
            PackGroup::Z2xQ8 => 1,
        }
    }
}

/// Parts of a closed-form evaluation; `_pos` is `z = 1`, `_neg` is `z = -1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorBreakdown {
    #[serde(with = "crate::decimal")]
    pub m1_pos: BigInt,
    #[serde(with = "crate::decimal")]
    pub m2_pos: BigInt,
    #[serde(with = "crate::decimal")]
    pub ell_pos: BigInt,
    #[serde(with = "crate::decimal")]
    pub m1_neg: BigInt,
    #[serde(with = "crate::decimal")]
    pub m2_neg: BigInt,
    #[serde(with = "crate::decimal")]
    pub ell_neg: BigInt,
    #[serde(with = "crate::decimal")]
    pub d_pos: BigInt,
    #[serde(with = "crate::decimal")]
    pub d_neg: BigInt,
    #[serde(with = "crate::decimal")]
    pub total: BigInt,
}

fn eval_real(c: &Cubic, x: i64) -> BigInt {
    c.iter()
        .rev()
        .fold(BigInt::zero(), |acc, &k| acc * x + BigInt::from(k))
}

fn add_scaled(a: &Cubic, z: i64, b: &Cubic) -> [BigInt; 4] {
    std::array::from_fn(|i| BigInt::from(a[i]) + BigInt::from(z) * BigInt::from(b[i]))
}

fn breakdown(p: &QuartetPack, variant: PackGroup) -> FactorBreakdown {
    let sign = variant.ell_sign();
    let part = |z: i64| {
        let f_at = |x: i64| eval_real(&p.f1, x) + z * eval_real(&p.f2, x);
        let g_at = |x: i64| eval_real(&p.g1, x) + z * eval_real(&p.g2, x);
        let sq = |v: BigInt| &v * &v;
        let m1 = sq(f_at(1)) - sq(g_at(1));
        let m2 = sq(f_at(-1)) - sq(g_at(-1));
        let fi = GaussianInt::eval_poly(&add_scaled(&p.f1, z, &p.f2));
        let gi = GaussianInt::eval_poly(&add_scaled(&p.g1, z, &p.g2));
        let ell = fi.norm() + sign * gi.norm();
        let d = &m1 * &m2 * &ell * &ell;
        (m1, m2, ell, d)
    };
    let (m1_pos, m2_pos, ell_pos, d_pos) = part(1);
    let (m1_neg, m2_neg, ell_neg, d_neg) = part(-1);
    let total = &d_pos * &d_neg;
    FactorBreakdown {
        m1_pos,
        m2_pos,
        ell_pos,
        m1_neg,
        m2_neg,
        ell_neg,
        d_pos,
        d_neg,
        total,
    }
}

/// Closed-form `Z2 x D8` determinant: `ell(z)` is the difference of norms.
pub fn det_z2d8(p: &QuartetPack) -> FactorBreakdown {
    breakdown(p, PackGroup::Z2xD8)
}

/// Closed-form `Z2 x Q8` determinant: `ell(z)` is the sum of norms.
pub fn det_z2q8(p: &QuartetPack) -> FactorBreakdown {
    breakdown(p, PackGroup::Z2xQ8)
}

pub fn det_pack(p: &QuartetPack, variant: PackGroup) -> FactorBreakdown {
    breakdown(p, variant)
}

/// Closed-form total in `i128`, `None` on overflow. Used by the sweeps.
pub fn pack_total_i128(p: &QuartetPack, variant: PackGroup) -> Option<i128> {
    #[inline]
    fn ev(c: &Cubic) -> (i128, i128, i128, i128) {
        let [a, b, cc, d] = c.map(|v| v as i128);
        // p(1), p(-1), Re p(i), Im p(i)
        (a + b + cc + d, a - b + cc - d, a - cc, b - d)
    }
    let f1 = ev(&p.f1);
    let f2 = ev(&p.f2);
    let g1 = ev(&p.g1);
    let g2 = ev(&p.g2);
    let sign = variant.ell_sign() as i128;
    let mut total: i128 = 1;
    for z in [1i128, -1] {
        let fa = f1.0 + z * f2.0;
        let ga = g1.0 + z * g2.0;
        let fb = f1.1 + z * f2.1;
        let gb = g1.1 + z * g2.1;
        let fr = f1.2 + z * f2.2;
        let fim = f1.3 + z * f2.3;
        let gr = g1.2 + z * g2.2;
        let gim = g1.3 + z * g2.3;
        let m1 = fa.checked_mul(fa)?.checked_sub(ga.checked_mul(ga)?)?;
        let m2 = fb.checked_mul(fb)?.checked_sub(gb.checked_mul(gb)?)?;
        let nf = fr.checked_mul(fr)?.checked_add(fim.checked_mul(fim)?)?;
        let ng = gr.checked_mul(gr)?.checked_add(gim.checked_mul(gim)?)?;
        let ell = nf.checked_add(sign.checked_mul(ng)?)?;
        let d = m1.checked_mul(m2)?.checked_mul(ell)?.checked_mul(ell)?;
        total = total.checked_mul(d)?;
    }
    Some(total)
}

/// Splits a `Z2 x H` vector (a-block then b-block) into `a + b` and `a - b`.
///
/// The `Z2 x H` determinant is `det(plus) * det(minus)`.
pub fn split_z2(
    h: &Arc<FiniteGroup>,
    coeffs: &[BigInt],
) -> Result<(GroupRingElement, GroupRingElement), FactoredError> {
    let m = h.order();
    if coeffs.len() != 2 * m {
        return Err(FactoredError::LengthMismatch {
            expected: 2 * m,
            found: coeffs.len(),
        });
    }
    let (a, b) = coeffs.split_at(m);
    let plus = a.iter().zip(b).map(|(x, y)| x + y).collect();
    let minus = a.iter().zip(b).map(|(x, y)| x - y).collect();
    Ok((
        GroupRingElement::new(Arc::clone(h), plus)?,
        GroupRingElement::new(Arc::clone(h), minus)?,
    ))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorFactor {
    pub divisor: usize,
    #[serde(with = "crate::decimal")]
    pub value: BigInt,
}

/// Result of [`theorem1_eval`]: one integer per divisor `d | n` and their product.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Theorem1Result {
    pub factors: Vec<DivisorFactor>,
    #[serde(with = "crate::decimal")]
    pub total: BigInt,
}

impl Theorem1Result {
    pub fn factor(&self, d: usize) -> Option<&BigInt> {
        self.factors
            .iter()
            .find(|f| f.divisor == d)
            .map(|f| &f.value)
    }
}

/// `H` determinant of `sum_h (sum_i a_{ih} y^i) h` for `y = w_d^j`.
fn root_factor(
    n: usize,
    h: &FiniteGroup,
    coeffs: &[BigInt],
    d: usize,
    j: usize,
) -> Result<CyclotomicNumber, FactoredError> {
    let m = h.order();
    let entries = (0..m)
        .map(|g| {
            let column: Vec<BigInt> = (0..n).map(|i| coeffs[i * m + g].clone()).collect();
            eval_poly_at_root(&column, d, j)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let sample = CyclotomicNumber::zero(d)?;
    Ok(bareiss_determinant(group_matrix_of(h, &entries), &sample))
}

/// Determinant of `sum_{i,h} a_{ih} (i, h)` on `Z_n x H`, evaluated as a product
/// of `H` determinants at the n-th roots of unity.
///
/// `coeffs[i * |H| + h] = a_{ih}`. Values at the primitive d-th roots are
/// multiplied together for each `d | n`, which yields a rational integer.
pub fn theorem1_eval(
    n: usize,
    h: &FiniteGroup,
    coeffs: &[BigInt],
) -> Result<Theorem1Result, FactoredError> {
    if n == 0 {
        return Err(FactoredError::ZeroCyclicOrder);
    }
    let expected = n * h.order();
    if coeffs.len() != expected {
        return Err(FactoredError::LengthMismatch {
            expected,
            found: coeffs.len(),
        });
    }
    let mut factors = Vec::new();
    let mut total = BigInt::one();
    for d in (1..=n).filter(|d| n.is_multiple_of(*d)) {
        let values = (0..d)
            .filter(|j| j.gcd(&d) == 1)
            .map(|j| root_factor(n, h, coeffs, d, j))
            .collect::<Result<Vec<_>, _>>()?;
        let value = conjugate_product(&values)?;
        total *= &value;
        factors.push(DivisorFactor { divisor: d, value });
    }
    Ok(Theorem1Result { factors, total })
}

/// `true` when the two halves of an odd total agree mod 16.
pub fn halves_congruent_mod16(b: &FactorBreakdown) -> bool {
    let sixteen = BigInt::from(16);
    (&b.d_pos - &b.d_neg).mod_floor(&sixteen).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupring::det_naive;
    use crate::groups::{make_cyclic, parse_group};

    const H: Cubic = H_CUBIC;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    fn add(a: Cubic, b: Cubic) -> Cubic {
        std::array::from_fn(|i| a[i] + b[i])
    }

    #[test]
    fn one_plus_h_gives_seventeen_on_both_groups() {
        let p = QuartetPack::new(add([1, 0, 0, 0], H), H, H, H);
        assert_eq!(det_z2d8(&p).total, BigInt::from(17));
        assert_eq!(det_z2q8(&p).total, BigInt::from(17));
        assert_eq!(det_naive(&p.to_element(PackGroup::Z2xD8)), BigInt::from(17));
        assert_eq!(det_naive(&p.to_element(PackGroup::Z2xQ8)), BigInt::from(17));
    }

    #[test]
    fn identity_pack() {
        let b = det_z2d8(&QuartetPack::identity());
        for v in [
            &b.m1_pos, &b.m2_pos, &b.ell_pos, &b.m1_neg, &b.m2_neg, &b.ell_neg,
        ] {
            assert!(v.is_one());
        }
        assert!(b.total.is_one());
    }

    #[test]
    fn twenty_five_breakdown() {
        let p = QuartetPack::new([1, 1, 1, 0], [0, 1, 0, -1], [1, 1, 0, 0], [1, 0, -1, 0]);
        let b = det_z2d8(&p);
        assert_eq!(b.m1_pos, BigInt::from(5));
        assert_eq!(b.m2_pos, BigInt::from(1));
        assert_eq!(b.ell_pos, BigInt::from(-1));
        assert_eq!(b.d_pos, BigInt::from(5));
        assert_eq!(b.d_neg, BigInt::from(5));
        assert_eq!(b.total, BigInt::from(25));
        assert_eq!(det_naive(&p.to_element(PackGroup::Z2xD8)), BigInt::from(25));
    }

    #[test]
    fn quaternion_examples() {
        let p = QuartetPack::new([0, 0, 0, -1], [0; 4], [0, 0, -1, -1], [0; 4]);
        let b = det_z2q8(&p);
        assert_eq!(b.m1_pos, BigInt::from(-3));
        assert_eq!(b.ell_pos, BigInt::from(3));
        assert_eq!(b.d_pos, BigInt::from(-27));
        assert_eq!(b.d_neg, BigInt::from(-27));
        assert_eq!(b.total, BigInt::from(729));

        let p = QuartetPack::new(H, [0; 4], [1, -1, 0, 0], [0; 4]);
        let b = det_z2q8(&p);
        assert_eq!(b.m1_pos, BigInt::from(16));
        assert_eq!(b.m2_pos, BigInt::from(-4));
        assert_eq!(b.ell_pos, BigInt::from(2));
        assert_eq!(b.total, BigInt::from(1 << 16));
        assert_eq!(
            det_naive(&p.to_element(PackGroup::Z2xQ8)),
            BigInt::from(1 << 16)
        );
    }

    #[test]
    fn fast_path_matches_bigint() {
        let p = QuartetPack::new([3, -2, 1, 0], [1, 1, -1, 2], [0, 2, 2, -1], [-3, 0, 1, 1]);
        for v in [PackGroup::Z2xD8, PackGroup::Z2xQ8] {
            let slow = det_pack(&p, v).total;
            assert_eq!(BigInt::from(pack_total_i128(&p, v).unwrap()), slow);
        }
        let huge = QuartetPack::new([i64::MAX / 8, 0, 0, 0], [0; 4], [0; 4], [0; 4]);
        assert_eq!(pack_total_i128(&huge, PackGroup::Z2xD8), None);
    }

    #[test]
    fn vector_layout_round_trip() {
        let p = QuartetPack::new(
            [1, 2, 3, 4],
            [5, 6, 7, 8],
            [9, 10, 11, 12],
            [13, 14, 15, 16],
        );
        let v = p.to_vector();
        assert_eq!(&v[4..8], &[9, 10, 11, 12]);
        assert_eq!(QuartetPack::from_vector(&v).unwrap(), p);
        assert!(QuartetPack::from_vector(&v[..15]).is_err());
    }

    #[test]
    fn split_examples() {
        let d8 = Arc::new(parse_group("d8").unwrap());
        let p = QuartetPack::new(add([1, 0, 0, 0], H), H, H, H);
        let coeffs: Vec<BigInt> = big(&p.to_vector());
        let (plus, minus) = split_z2(&d8, &coeffs).unwrap();
        assert_eq!(det_naive(&plus), BigInt::from(17));
        assert_eq!(det_naive(&minus), BigInt::one());
        assert_eq!(plus.coeffs()[0], BigInt::from(3));
        assert_eq!(plus.coeffs()[4], BigInt::from(2));

        // b = 0: the determinant is a square
        let mut v = vec![0i64; 16];
        v[..8].copy_from_slice(&[2, 1, 0, 0, 1, 0, 0, 0]);
        let (plus, minus) = split_z2(&d8, &big(&v)).unwrap();
        assert_eq!(plus, minus);
        let full = det_naive(&GroupRingElement::from_i64s(PackGroup::Z2xD8.group(), &v).unwrap());
        assert_eq!(full, det_naive(&plus).pow(2));

        // a = b: the minus half vanishes
        let v: Vec<i64> = (0..16).map(|i| (i % 8) as i64 - 3).collect();
        let (_, minus) = split_z2(&d8, &big(&v)).unwrap();
        assert!(minus.coeffs().iter().all(Zero::is_zero));
        assert!(
            det_naive(&GroupRingElement::from_i64s(PackGroup::Z2xD8.group(), &v).unwrap())
                .is_zero()
        );

        assert!(matches!(
            split_z2(&d8, &big(&[1, 2, 3])),
            Err(FactoredError::LengthMismatch {
                expected: 16,
                found: 3
            })
        ));
    }

    #[test]
    fn root_of_unity_examples() {
        let z2 = make_cyclic(2).unwrap();
        let r = theorem1_eval(2, &z2, &big(&[1, 0, 1, 0])).unwrap();
        assert_eq!(r.factor(1), Some(&BigInt::from(4)));
        assert_eq!(r.factor(2), Some(&BigInt::zero()));
        assert!(r.total.is_zero());

        let z1 = make_cyclic(1).unwrap();
        let r = theorem1_eval(4, &z1, &big(&[2, 1, 0, 0])).unwrap();
        assert_eq!(r.total, BigInt::from(15));
        assert_eq!(r.factor(4), Some(&BigInt::from(5)));

        let d8 = make_dihedral(8).unwrap();
        let p = QuartetPack::new(add([1, 0, 0, 0], H), H, H, H);
        let r = theorem1_eval(2, &d8, &big(&p.to_vector())).unwrap();
        assert_eq!(r.total, BigInt::from(17));

        assert_eq!(
            theorem1_eval(0, &z1, &[]),
            Err(FactoredError::ZeroCyclicOrder)
        );
        assert!(matches!(
            theorem1_eval(3, &z2, &big(&[1, 2])),
            Err(FactoredError::LengthMismatch {
                expected: 6,
                found: 2
            })
        ));
    }

    #[test]
    fn breakdown_serializes_as_decimal_strings() {
        let json = serde_json::to_value(det_z2d8(&QuartetPack::identity())).unwrap();
        assert_eq!(json["total"], serde_json::json!("1"));
        let pack_json = serde_json::to_value(QuartetPack::identity()).unwrap();
        assert_eq!(pack_json["f1"], serde_json::json!([1, 0, 0, 0]));
    }
}
