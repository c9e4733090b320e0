//! Integral group ring elements, group matrices and the exact determinant
//! every factored formula is checked against.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::groups::FiniteGroup;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupRingError {
    #[error("coefficient vector has length {found}, group {group} has order {expected}")]
    LengthMismatch {
        group: String,
        expected: usize,
        found: usize,
    },
    #[error("elements live in different groups ({0} vs {1})")]
    GroupMismatch(String, String),
}

/// Integral domain with exact division, the only structure Bareiss needs.
pub trait ExactDomain: Clone {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero_elem(&self) -> bool;
    fn mul_ref(&self, other: &Self) -> Self;
    fn sub_ref(&self, other: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    /// `self / divisor`, where the quotient is known to exist in the domain.
    fn exact_div(&self, divisor: &Self) -> Self;
}

impl ExactDomain for BigInt {
    fn zero_like(&self) -> Self {
        BigInt::zero()
    }
    fn one_like(&self) -> Self {
        BigInt::one()
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn exact_div(&self, divisor: &Self) -> Self {
        debug_assert!((self % divisor).is_zero(), "inexact Bareiss division");
        self / divisor
    }
}

/// Fraction-free (Bareiss) determinant of a square matrix.
///
/// Pivots on the first nonzero entry at or below the diagonal and tracks the
/// parity of row swaps. A column with no usable pivot gives zero immediately.
/// `sample` supplies the ring context for the empty matrix case.
pub fn bareiss_determinant<R: ExactDomain>(mut m: Vec<Vec<R>>, sample: &R) -> R {
    let n = m.len();
    if n == 0 {
        return sample.one_like();
    }
    debug_assert!(m.iter().all(|row| row.len() == n), "matrix must be square");
    let mut negate = false;
    let mut prev = sample.one_like();
    for k in 0..n {
        if m[k][k].is_zero_elem() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero_elem()) {
                Some(i) => {
                    m.swap(k, i);
                    negate = !negate;
                }
                None => return sample.zero_like(),
            }
        }
        let (upper, lower) = m.split_at_mut(k + 1);
        let pivot_row = &upper[k];
        let pivot = &pivot_row[k];
        for row in lower.iter_mut() {
            let lead = row[k].clone();
            for j in k + 1..n {
                let cross = pivot.mul_ref(&row[j]).sub_ref(&lead.mul_ref(&pivot_row[j]));
                row[j] = cross.exact_div(&prev);
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if negate {
        det.neg_ref()
    } else {
        det
    }
}

/// An element `sum_g a_g g` of `Z[G]`, coefficients in canonical group order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupRingElement {
    group: Arc<FiniteGroup>,
    coeffs: Vec<BigInt>,
}

impl GroupRingElement {
    pub fn new(group: Arc<FiniteGroup>, coeffs: Vec<BigInt>) -> Result<Self, GroupRingError> {
        if coeffs.len() != group.order() {
            return Err(GroupRingError::LengthMismatch {
                group: group.name().to_string(),
                expected: group.order(),
                found: coeffs.len(),
            });
        }
        Ok(GroupRingElement { group, coeffs })
    }

    pub fn from_i64s(group: Arc<FiniteGroup>, coeffs: &[i64]) -> Result<Self, GroupRingError> {
        Self::new(group, coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero(group: Arc<FiniteGroup>) -> Self {
        let coeffs = vec![BigInt::zero(); group.order()];
        GroupRingElement { group, coeffs }
    }

    /// The basis element `g` (coefficient 1 at `g`, 0 elsewhere).
    pub fn basis(group: Arc<FiniteGroup>, g: usize) -> Self {
        let mut x = Self::zero(group);
        x.coeffs[g] = BigInt::one();
        x
    }

    pub fn identity(group: Arc<FiniteGroup>) -> Self {
        Self::basis(group, 0)
    }

    pub fn all_ones(group: Arc<FiniteGroup>) -> Self {
        let coeffs = vec![BigInt::one(); group.order()];
        GroupRingElement { group, coeffs }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.coeffs
    }

    /// Convolution product `xy = sum_g (sum_{hk=g} a_h b_k) g`.
    pub fn multiply(&self, other: &Self) -> Result<Self, GroupRingError> {
        if self.group != other.group {
            return Err(GroupRingError::GroupMismatch(
                self.group.name().to_string(),
                other.group.name().to_string(),
            ));
        }
        let g = &self.group;
        let mut out = vec![BigInt::zero(); g.order()];
        for (h, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (k, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[g.mul(h, k)] += a * b;
                }
            }
        }
        Ok(GroupRingElement {
            group: Arc::clone(g),
            coeffs: out,
        })
    }

    /// Left translate `g * x`: the coefficient of `h` moves to `g h`.
    pub fn translate(&self, g: usize) -> Self {
        let grp = &self.group;
        let mut out = vec![BigInt::zero(); grp.order()];
        for (h, a) in self.coeffs.iter().enumerate() {
            out[grp.mul(g, h)] = a.clone();
        }
        GroupRingElement {
            group: Arc::clone(grp),
            coeffs: out,
        }
    }
}

/// Square matrix with entry `(g, h) = a_{g h^-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupMatrix {
    entries: Vec<Vec<BigInt>>,
}

impl GroupMatrix {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, row: usize, col: usize) -> &BigInt {
        &self.entries[row][col]
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.entries
    }

    pub fn into_rows(self) -> Vec<Vec<BigInt>> {
        self.entries
    }
}

/// Generic group-matrix layout: `entry(g, h) = coeffs[g h^-1]`.
pub(crate) fn group_matrix_of<T: Clone>(group: &FiniteGroup, coeffs: &[T]) -> Vec<Vec<T>> {
    let n = group.order();
    (0..n)
        .map(|g| {
            (0..n)
                .map(|h| coeffs[group.mul(g, group.inv(h))].clone())
                .collect()
        })
        .collect()
}

pub fn group_matrix(x: &GroupRingElement) -> GroupMatrix {
    GroupMatrix {
        entries: group_matrix_of(&x.group, &x.coeffs),
    }
}

/// Exact group determinant by Bareiss elimination over the integers.
pub fn det_naive(x: &GroupRingElement) -> BigInt {
    bareiss_determinant(group_matrix(x).into_rows(), &BigInt::zero())
}

/// Determinant of an arbitrary square integer matrix.
pub fn det_integer_matrix(rows: Vec<Vec<BigInt>>) -> BigInt {
    bareiss_determinant(rows, &BigInt::zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::parse_group;

    fn grp(name: &str) -> Arc<FiniteGroup> {
        Arc::new(parse_group(name).unwrap())
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    /// Cofactor expansion along the first row; independent of Bareiss.
    fn cofactor_det(m: &[Vec<BigInt>]) -> BigInt {
        let n = m.len();
        if n == 0 {
            return BigInt::one();
        }
        let mut total = BigInt::zero();
        for c in 0..n {
            let minor: Vec<Vec<BigInt>> = m[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|&(j, _)| j != c)
                        .map(|(_, v)| v.clone())
                        .collect()
                })
                .collect();
            let term = &m[0][c] * cofactor_det(&minor);
            if c % 2 == 0 {
                total += term;
            } else {
                total -= term;
            }
        }
        total
    }

    #[test]
    fn z2_matrix_shape() {
        let x = GroupRingElement::from_i64s(grp("z2"), &[5, 7]).unwrap();
        assert_eq!(
            group_matrix(&x).into_rows(),
            vec![ints(&[5, 7]), ints(&[7, 5])]
        );
    }

    #[test]
    fn z3_matrix_rows_are_permutations() {
        let x = GroupRingElement::from_i64s(grp("z3"), &[1, 1, 0]).unwrap();
        let m = group_matrix(&x);
        for row in m.rows() {
            let mut sorted = row.clone();
            sorted.sort();
            assert_eq!(sorted, ints(&[0, 1, 1]));
        }
        assert_eq!(det_naive(&x), BigInt::from(2));
        assert_eq!(cofactor_det(m.rows()), BigInt::from(2));
    }

    #[test]
    fn z4_circulant() {
        let x = GroupRingElement::from_i64s(grp("z4"), &[2, 1, 0, 0]).unwrap();
        let m = group_matrix(&x);
        assert_eq!(cofactor_det(m.rows()), BigInt::from(15));
        assert_eq!(det_naive(&x), BigInt::from(15));
    }

    #[test]
    fn identity_and_all_ones() {
        for name in ["z1", "z5", "d8", "q8", "z2xd8"] {
            let g = grp(name);
            assert_eq!(
                det_naive(&GroupRingElement::identity(g.clone())),
                BigInt::one()
            );
            let ones = det_naive(&GroupRingElement::all_ones(g.clone()));
            if g.order() > 1 {
                assert!(ones.is_zero(), "{name}");
            }
        }
    }

    #[test]
    fn convolution_examples() {
        let z2 = grp("z2");
        let a = GroupRingElement::from_i64s(z2.clone(), &[1, 1]).unwrap();
        let b = GroupRingElement::from_i64s(z2, &[1, -1]).unwrap();
        assert_eq!(a.multiply(&b).unwrap().coeffs(), ints(&[0, 0]).as_slice());

        let z4 = grp("z4");
        let a = GroupRingElement::from_i64s(z4.clone(), &[1, 1, 0, 0]).unwrap();
        let b = GroupRingElement::from_i64s(z4.clone(), &[0, 0, 1, 0]).unwrap();
        assert_eq!(
            a.multiply(&b).unwrap().coeffs(),
            ints(&[0, 0, 1, 1]).as_slice()
        );
        let one = GroupRingElement::identity(z4);
        assert_eq!(a.multiply(&one).unwrap(), a);
    }

    #[test]
    fn errors() {
        let z3 = grp("z3");
        assert!(matches!(
            GroupRingElement::from_i64s(z3.clone(), &[1, 2]),
            Err(GroupRingError::LengthMismatch {
                expected: 3,
                found: 2,
                ..
            })
        ));
        let a = GroupRingElement::identity(z3);
        let b = GroupRingElement::identity(grp("z4"));
        assert!(matches!(
            a.multiply(&b),
            Err(GroupRingError::GroupMismatch(..))
        ));
    }

    #[test]
    fn bareiss_matches_cofactor_with_zero_pivots() {
        let m = vec![ints(&[0, 2, 1]), ints(&[0, 3, 4]), ints(&[5, 1, 1])];
        assert_eq!(det_integer_matrix(m.clone()), cofactor_det(&m));
        let singular = vec![ints(&[0, 1]), ints(&[0, 7])];
        assert!(det_integer_matrix(singular).is_zero());
        assert_eq!(det_integer_matrix(Vec::new()), BigInt::one());
    }

    #[test]
    fn small_pseudorandom_matrices_agree_with_cofactor() {
        let mut state = 12345u64;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 33) % 7) as i64 - 3
        };
        for n in 1..=6 {
            for _ in 0..40 {
                let m: Vec<Vec<BigInt>> = (0..n)
                    .map(|_| (0..n).map(|_| BigInt::from(next())).collect())
                    .collect();
                assert_eq!(det_integer_matrix(m.clone()), cofactor_det(&m));
            }
        }
    }

    #[test]
    fn translation_invariance() {
        let g = grp("q8");
        let x = GroupRingElement::from_i64s(g.clone(), &[3, -1, 0, 2, 1, 1, -2, 0]).unwrap();
        let d = det_naive(&x);
        for h in 0..g.order() {
            assert_eq!(det_naive(&x.translate(h)), d);
        }
    }
}
