//! Finite groups stored as dense Cayley tables.
//!
//! Every constructor fixes a canonical element ordering, and all coefficient
//! vectors elsewhere in the crate are indexed by it:
//!
//! * `Z_n`: element `i` is the residue `i`.
//! * `D_2n`: `R^0..R^{n-1}` then `FR^0..FR^{n-1}`, with `RF = FR^{n-1}`.
//! * `Q_8`: `A^0..A^3` then `BA^0..BA^3`, with `B^2 = A^2` and `AB = BA^{-1}`.
//! * `G x H`: the pair `(g, h)` sits at `index_G(g) * |H| + index_H(h)`.
//!
//! Index 0 is always the identity.

use std::collections::BTreeMap;

use thiserror::Error;

/// Largest group order the tables are allowed to reach.
pub const MAX_ORDER: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("group order must be positive")]
    ZeroOrder,
    #[error("dihedral group order must be even, got {0}")]
    OddDihedral(usize),
    #[error("group order {0} exceeds the supported maximum of {MAX_ORDER}")]
    TooLarge(usize),
    #[error("unrecognized group name `{0}`")]
    UnknownName(String),
}

/// A violated group axiom, reported by [`FiniteGroup::check_axioms`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AxiomViolation {
    #[error("index 0 is not a two-sided identity at element {0}")]
    Identity(usize),
    #[error("inverse table wrong at element {0}")]
    Inverse(usize),
    #[error("associativity fails at ({0}, {1}, {2})")]
    Associativity(usize, usize, usize),
    #[error("multiplication table entry out of range at ({0}, {1})")]
    OutOfRange(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    name: String,
    labels: Vec<String>,
    table: Vec<usize>,
    inverses: Vec<usize>,
}

impl FiniteGroup {
    /// Builds a group from a multiplication law on `0..labels.len()`.
    ///
    /// The law is tabulated once; the inverse table is found by scanning rows.
    /// The axioms are not checked here, see [`FiniteGroup::check_axioms`].
    fn from_law(
        name: impl Into<String>,
        labels: Vec<String>,
        law: impl Fn(usize, usize) -> usize,
    ) -> Result<Self, GroupError> {
        let order = labels.len();
        if order == 0 {
            return Err(GroupError::ZeroOrder);
        }
        if order > MAX_ORDER {
            return Err(GroupError::TooLarge(order));
        }
        let mut table = Vec::with_capacity(order * order);
        for a in 0..order {
            for b in 0..order {
                table.push(law(a, b));
            }
        }
        let inverses = (0..order)
            .map(|a| {
                (0..order)
                    .find(|&b| table[a * order + b] == 0)
                    .unwrap_or(usize::MAX)
            })
            .collect();
        Ok(FiniteGroup {
            name: name.into(),
            labels,
            table,
            inverses,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, g: usize) -> &str {
        &self.labels[g]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub const fn identity(&self) -> usize {
        0
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order() + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (a + 1..n).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Smallest `k >= 1` with `g^k = 1`.
    pub fn element_order(&self, g: usize) -> usize {
        let mut power = g;
        let mut k = 1;
        while power != 0 {
            power = self.mul(power, g);
            k += 1;
        }
        k
    }

    /// Map from element order to the number of elements of that order.
    pub fn order_spectrum(&self) -> BTreeMap<usize, usize> {
        let mut spectrum = BTreeMap::new();
        for g in 0..self.order() {
            *spectrum.entry(self.element_order(g)).or_insert(0) += 1;
        }
        spectrum
    }

    /// Exhaustive check of closure, identity, inverses and associativity.
    pub fn check_axioms(&self) -> Result<(), AxiomViolation> {
        let n = self.order();
        for a in 0..n {
            for b in 0..n {
                if self.mul(a, b) >= n {
                    return Err(AxiomViolation::OutOfRange(a, b));
                }
            }
        }
        for g in 0..n {
            if self.mul(0, g) != g || self.mul(g, 0) != g {
                return Err(AxiomViolation::Identity(g));
            }
            let inv = self.inv(g);
            if inv >= n || self.mul(g, inv) != 0 || self.mul(inv, g) != 0 {
                return Err(AxiomViolation::Inverse(g));
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = self.mul(a, b);
                for c in 0..n {
                    if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                        return Err(AxiomViolation::Associativity(a, b, c));
                    }
                }
            }
        }
        Ok(())
    }
}

/// The cyclic group `Z_n` under addition mod `n`.
pub fn make_cyclic(n: usize) -> Result<FiniteGroup, GroupError> {
    if n == 0 {
        return Err(GroupError::ZeroOrder);
    }
    let labels = (0..n).map(|i| i.to_string()).collect();
    FiniteGroup::from_law(format!("Z{n}"), labels, |a, b| (a + b) % n)
}

/// The dihedral group of order `two_n`, elements `R^j` then `FR^j`.
pub fn make_dihedral(two_n: usize) -> Result<FiniteGroup, GroupError> {
    if two_n == 0 {
        return Err(GroupError::ZeroOrder);
    }
    if !two_n.is_multiple_of(2) {
        return Err(GroupError::OddDihedral(two_n));
    }
    let n = two_n / 2;
    let labels = (0..n)
        .map(|j| format!("R^{j}"))
        .chain((0..n).map(|j| format!("FR^{j}")))
        .collect();
    // (F^e1 R^a)(F^e2 R^b) = F^(e1+e2) R^((-1)^e2 a + b), using R^a F = F R^-a.
    FiniteGroup::from_law(format!("D{two_n}"), labels, move |x, y| {
        let (e1, a) = (x / n, x % n);
        let (e2, b) = (y / n, y % n);
        let rot = if e2 == 1 { (n - a) % n } else { a };
        ((e1 + e2) % 2) * n + (rot + b) % n
    })
}

/// The quaternion group of order 8, elements `A^i` then `BA^i`.
pub fn make_quaternion() -> FiniteGroup {
    let labels = (0..4)
        .map(|i| format!("A^{i}"))
        .chain((0..4).map(|i| format!("BA^{i}")))
        .collect();
    // (B^e1 A^a)(B^e2 A^b) = B^(e1+e2) A^((-1)^e2 a + b), and B^2 = A^2.
    FiniteGroup::from_law("Q8", labels, |x, y| {
        let (e1, a) = (x / 4, x % 4);
        let (e2, b) = (y / 4, y % 4);
        let rot = if e2 == 1 { (4 - a) % 4 } else { a };
        let c = (rot + b) % 4;
        if e1 == 1 && e2 == 1 {
            (c + 2) % 4
        } else {
            (e1 + e2) * 4 + c
        }
    })
    .expect("Q8 is within the order cap")
}

/// `G x H` with componentwise multiplication; `(g, h)` has index `g * |H| + h`.
pub fn direct_product(g: &FiniteGroup, h: &FiniteGroup) -> Result<FiniteGroup, GroupError> {
    let m = h.order();
    let order = g.order() * m;
    if order > MAX_ORDER {
        return Err(GroupError::TooLarge(order));
    }
    let labels = (0..order)
        .map(|x| format!("({},{})", g.label(x / m), h.label(x % m)))
        .collect();
    FiniteGroup::from_law(format!("{}x{}", g.name(), h.name()), labels, |x, y| {
        g.mul(x / m, y / m) * m + h.mul(x % m, y % m)
    })
}

fn parse_factor(token: &str) -> Result<FiniteGroup, GroupError> {
    let unknown = || GroupError::UnknownName(token.to_string());
    if token == "q8" {
        return Ok(make_quaternion());
    }
    let (kind, digits) = token.split_at(1.min(token.len()));
    let n: usize = digits.parse().map_err(|_| unknown())?;
    if n > MAX_ORDER {
        return Err(GroupError::TooLarge(n));
    }
    match kind {
        "z" => make_cyclic(n),
        "d" => make_dihedral(n),
        _ => Err(unknown()),
    }
}

/// Parses names such as `z4`, `d8`, `q8`, `z2xq8` or `z2xz2xz4`.
///
/// Products associate to the right, so `z2xz2xz4` is `Z2 x (Z2 x Z4)` and the
/// leading factor always carries the slowest-varying index.
pub fn parse_group(name: &str) -> Result<FiniteGroup, GroupError> {
    let lower = name.trim().to_ascii_lowercase();
    let factors = lower
        .split('x')
        .map(parse_factor)
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| match e {
            GroupError::UnknownName(_) => GroupError::UnknownName(name.to_string()),
            other => other,
        })?;
    let mut iter = factors.into_iter().rev();
    let mut acc = iter
        .next()
        .ok_or_else(|| GroupError::UnknownName(name.to_string()))?;
    for factor in iter {
        acc = direct_product(&factor, &acc)?;
    }
    Ok(acc)
}
