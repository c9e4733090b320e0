use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arithmetic::{
    factorize, four_squares_constrained, perfect_square_root, ArithmeticError,
};
use crate::factored::{det_pack, theorem1_eval, Cubic, FactoredError, PackGroup, QuartetPack};
use crate::groupring::{det_naive, GroupRingElement};
use crate::groups::{make_cyclic, parse_group, FiniteGroup, MAX_ORDER};

use super::{
    classify, classify_prop1, classify_z2d8, classify_z2q8, Certificate, ClassifyError, EvenForm,
    GroupTag, OddCase, Verdict,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("{value} is not a determinant on {group}")]
    NotMember { value: i128, group: GroupTag },
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Arithmetic(#[from] ArithmeticError),
    #[error(transparent)]
    Factored(#[from] FactoredError),
    #[error("witness coefficients overflow 64 bits")]
    Overflow,
    #[error("no constrained sum of squares found for {0}")]
    NoDecomposition(u64),
    #[error("no witness family for certificate {0}")]
    NoFamily(String),
    #[error("witness for {claimed} evaluates to {found}")]
    VerificationFailed { claimed: i128, found: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessPayload {
    Pack {
        pack: QuartetPack,
    },
    /// Coefficients in canonical group order.
    Vector {
        #[serde(with = "crate::decimal::vec")]
        coeffs: Vec<BigInt>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessResult {
    pub group: GroupTag,
    pub family: String,
    pub payload: WitnessPayload,
    #[serde(with = "crate::decimal")]
    pub claimed_value: i128,
    pub verified: bool,
}

impl WitnessResult {
    pub fn pack(&self) -> Option<&QuartetPack> {
        match &self.payload {
            WitnessPayload::Pack { pack } => Some(pack),
            WitnessPayload::Vector { .. } => None,
        }
    }
}

const H: [i128; 4] = [1, 1, 1, 1];

/// `base + shift * H` as an `i64` cubic.
fn plus_h(base: [i128; 4], shift: i128) -> Result<Cubic, WitnessError> {
    let mut out = [0i64; 4];
    for i in 0..4 {
        let c = shift
            .checked_mul(H[i])
            .and_then(|v| v.checked_add(base[i]))
            .ok_or(WitnessError::Overflow)?;
        out[i] = i64::try_from(c).map_err(|_| WitnessError::Overflow)?;
    }
    Ok(out)
}

fn pack_of(parts: [([i128; 4], i128); 4]) -> Result<QuartetPack, WitnessError> {
    let [f1, f2, g1, g2] = parts;
    Ok(QuartetPack::new(
        plus_h(f1.0, f1.1)?,
        plus_h(f2.0, f2.1)?,
        plus_h(g1.0, g1.1)?,
        plus_h(g2.0, g2.1)?,
    ))
}

fn variant_of(group: GroupTag) -> Option<PackGroup> {
    match group {
        GroupTag::Z2xD8 => Some(PackGroup::Z2xD8),
        GroupTag::Z2xQ8 => Some(PackGroup::Z2xQ8),
        _ => None,
    }
}

/// Closed form and naive determinant must both reproduce `value`.
fn checked_pack(
    group: GroupTag,
    family: &str,
    value: i128,
    pack: QuartetPack,
) -> Result<WitnessResult, WitnessError> {
    let variant = variant_of(group).expect("pack groups only");
    let closed = det_pack(&pack, variant).total;
    let naive = det_naive(&pack.to_element(variant));
    let want = BigInt::from(value);
    if closed != want || naive != want {
        let found = if closed != want { closed } else { naive };
        return Err(WitnessError::VerificationFailed {
            claimed: value,
            found: found.to_string(),
        });
    }
    Ok(WitnessResult {
        group,
        family: family.to_string(),
        payload: WitnessPayload::Pack { pack },
        claimed_value: value,
        verified: true,
    })
}

/// `(1 + kH, kH, kH, kH)`, value `1 + 16k`.
fn one_mod_16(k: i128) -> Result<QuartetPack, WitnessError> {
    pack_of([([1, 0, 0, 0], k), ([0; 4], k), ([0; 4], k), ([0; 4], k)])
}

/// `a b` with `a = b = +-3, +-5 mod 16`.
fn d8_odd_split(a: i128, b: i128) -> Result<(&'static str, QuartetPack), WitnessError> {
    let (a, b) = if [11, 13].contains(&a.rem_euclid(16)) {
        (-a, -b)
    } else {
        (a, b)
    };
    let c = a.rem_euclid(16);
    let (t, k) = ((a - c) / 16, (b - c) / 16);
    let (p, q) = (t + k, t - k);
    match c {
        5 => Ok((
            "five_mod_16",
            pack_of([
                ([1, 1, 1, 0], p),
                ([0, 1, 0, -1], q),
                ([1, 1, 0, 0], p),
                ([1, 0, -1, 0], q),
            ])?,
        )),
        3 => Ok((
            "three_mod_16",
            pack_of([
                ([1, 1, 0, 0], p),
                ([1, 1, -1, -1], q),
                ([1, 1, 0, -1], p),
                ([0, 1, 0, -1], q),
            ])?,
        )),
        _ => Ok(("one_mod_16", one_mod_16((a * b - 1) / 16)?)),
    }
}

fn quarter(x: i64) -> i128 {
    assert_eq!(x.rem_euclid(4), 0, "alignment leaves {x} indivisible by 4");
    (x / 4) as i128
}

fn q8_odd_pack(
    s1: i128,
    s2: i128,
    ell1: u64,
    ell2: u64,
    case: OddCase,
) -> Result<QuartetPack, WitnessError> {
    let q1 = four_squares_constrained(ell1)?;
    let mut q2 = four_squares_constrained(ell2)?;
    let align = |x: &mut i64, target: i64| {
        if (*x - target).rem_euclid(4) != 0 {
            *x = -*x;
        }
    };
    align(&mut q2.a, q1.a);
    align(&mut q2.b, q1.b);
    align(&mut q2.c, q1.c);
    let m = (s1 + 3) / 8;
    let k = match case {
        OddCase::Res1 => (s2 + 3) / 8,
        OddCase::Res2 => (5 - s2) / 8,
    };
    assert_eq!((m - k).rem_euclid(2), 0, "certificate parity");
    let (hp, hm) = ((m + k) / 2, (m - k) / 2);
    let (a1, b1, c1, d1) = (q1.a, q1.b, q1.c, q1.d);
    let (a2, b2, c2, d2) = (q2.a, q2.b, q2.c, q2.d);
    let (f1, f2) = match case {
        OddCase::Res1 => (
            [
                quarter(d1 + d2),
                quarter(b1 + b2 - 2),
                -quarter(d1 + d2),
                -quarter(b1 + b2 + 2),
            ],
            [
                quarter(d1 - d2),
                quarter(b1 - b2),
                -quarter(d1 - d2),
                -quarter(b1 - b2),
            ],
        ),
        OddCase::Res2 => (
            [
                quarter(d1 + d2 - 2),
                quarter(b1 + b2 - 2),
                -quarter(d1 + d2 + 2),
                -quarter(b1 + b2 + 2),
            ],
            [
                quarter(d1 - d2 + 2),
                quarter(b1 - b2),
                -quarter(d1 - d2 - 2),
                -quarter(b1 - b2),
            ],
        ),
    };
    let g1 = [
        quarter(c1 + c2 - 2),
        quarter(a1 + a2 - 2),
        -quarter(c1 + c2 + 2),
        -quarter(a1 + a2 + 2),
    ];
    let g2 = [
        quarter(c1 - c2),
        quarter(a1 - a2),
        -quarter(c1 - c2),
        -quarter(a1 - a2),
    ];
    pack_of([(f1, hp), (f2, hm), (g1, hp), (g2, hm)])
}

/// `2p = A^2 + B^2 + C^2 + D^2` with `A, C = 1`, `B = 0`, `D = 2 (mod 4)`.
fn two_p_squares(p: u64) -> Result<[i64; 4], WitnessError> {
    let target = 2 * p;
    let signed = |x: u64| if x % 4 == 1 { x as i64 } else { -(x as i64) };
    let mut a = 1u64;
    while a * a < target {
        let mut c = 1u64;
        while c <= a && a * a + c * c < target {
            let rest = target - a * a - c * c;
            let mut e = 0u64;
            while e * e <= rest {
                if let Some(f) = perfect_square_root(rest - e * e) {
                    if e.is_multiple_of(4) && f % 4 == 2 {
                        return Ok([signed(a), e as i64, signed(c), f as i64]);
                    }
                }
                e += 2;
            }
            c += 2;
        }
        a += 2;
    }
    Err(WitnessError::NoDecomposition(target))
}

/// `2 ell - 4 = X^2 + Y^2 + Z^2` with `X = 1`, `Y = 3`, `Z = 2 (mod 4)`.
fn two_ell_squares(ell: u64) -> Result<[i64; 3], WitnessError> {
    let target = 2 * ell - 4;
    let mut x = 1u64;
    while x * x < target {
        let mut y = 1u64;
        while x * x + y * y < target {
            if let Some(z) = perfect_square_root(target - x * x - y * y) {
                if z % 4 == 2 {
                    let sx = if x % 4 == 1 { x as i64 } else { -(x as i64) };
                    let sy = if y % 4 == 3 { y as i64 } else { -(y as i64) };
                    return Ok([sx, sy, z as i64]);
                }
            }
            y += 2;
        }
        x += 2;
    }
    Err(WitnessError::NoDecomposition(target))
}

fn even_pack(form: &EvenForm) -> Result<QuartetPack, WitnessError> {
    let z = [0i128; 4];
    match *form {
        EvenForm::D8Pow18 { m } => pack_of([
            ([1, 1, 1, 0], -m),
            ([1, 0, -1, -1], -m),
            ([1, 1, 0, -1], m),
            ([0, 1, 0, 0], m),
        ]),
        EvenForm::D8Pow17 { m } => pack_of([
            (H, m),
            ([1, 1, 0, 0], m),
            ([0, 1, 0, 0], m),
            ([1, 0, 1, -1], m),
        ]),
        EvenForm::D8Pow16OneMod4 { m } => pack_of([
            (H, m),
            ([1, 1, -1, -1], m),
            ([1, 1, -1, -1], m),
            ([1, -1, 0, 0], m),
        ]),
        EvenForm::D8Pow16ThreeMod4 { m } => pack_of([
            ([1, 1, 1, 0], -m),
            ([1, 1, 0, -1], -m),
            ([1, 0, 0, -1], -m),
            ([0, 1, -1, 0], -m),
        ]),
        EvenForm::Q8Pow19 { m } => pack_of([
            ([1, 1, 1, 0], -m),
            ([0, -1, 0, -1], -m),
            ([0, 1, 0, 1], m),
            ([0, 0, 0, -1], m),
        ]),
        EvenForm::Q8Pow18Odd { m } => {
            let (up, down) = ((m + 1) / 2, (m - 1) / 2);
            pack_of([
                ([1, 0, 1, 0], up),
                (z, down),
                ([-1, -1, 0, 0], up),
                (z, down),
            ])
        }
        EvenForm::Q8Pow17 { m, p } => {
            let [a, b, c, d] = two_p_squares(p)?;
            let (a, b, c, d) = (
                (a as i128 - 1) / 4,
                b as i128 / 4,
                (c as i128 - 1) / 4,
                (d as i128 - 2) / 4,
            );
            // a(1 - x^2) + b x (1 - x^2)
            let ab = [a, b, -a, -b];
            let cd = [c, d, -c, -d];
            let add = |u: [i128; 4], v: [i128; 4]| std::array::from_fn(|i| u[i] + v[i]);
            pack_of([
                (add(H, ab), m),
                (add([0, 1, -1, 1], ab), m),
                (add([1, 1, 0, 0], cd), m),
                (add([0, 1, 0, 0], cd), m),
            ])
        }
        EvenForm::Q8Pow16OneMod4 { m } => pack_of([(H, m), (z, m), ([1, -1, 0, 0], m), (z, m)]),
        EvenForm::Q8Pow16Type2 { t, s } => pack_of([
            (H, t + s),
            ([1, 0, 1, -1], t - s),
            (z, t - s),
            ([0, 0, 0, 1], t + s),
        ]),
        EvenForm::Q8Pow16Type1 { m, ell } => {
            let [x, y, zz] = two_ell_squares(ell)?;
            let a = (x as i128 - 1) / 4;
            let c = (y as i128 + 1) / 4;
            let d = (zz as i128 + 2) / 4;
            // (1 - x^2)(c + d x)
            let cd = [c, d, -c, -d];
            let add = |u: [i128; 4], v: [i128; 4]| std::array::from_fn(|i| u[i] + v[i]);
            pack_of([
                (add([1, -1, 1, 0], [a, 0, -a, 0]), m),
                (add([0, -1, -1, 0], [a, 0, -a, 0]), m),
                (add([0, -1, 0, 0], cd), m),
                (add([-1, -1, 0, 0], cd), m),
            ])
        }
        EvenForm::D16Pow10 { .. } => Err(WitnessError::NoFamily(form.tag().to_string())),
    }
}

/// Builds and checks the pack of one even family.
pub fn witness_even_form(form: &EvenForm) -> Result<WitnessResult, WitnessError> {
    let value = form.value().ok_or(WitnessError::Overflow)?;
    let pack = even_pack(form)?;
    checked_pack(form.group(), form.tag(), value, pack)
}

/// Even family instances with `|m|, |t|, |s| <= 4`, `p in {3, 7, 11}` and
/// `ell in {5, 9, 13}`.
pub fn even_family_sweep(group: GroupTag) -> Vec<EvenForm> {
    let r = -4i128..=4;
    let mut out = Vec::new();
    match group {
        GroupTag::Z2xD8 => {
            for m in r {
                out.extend([
                    EvenForm::D8Pow18 { m },
                    EvenForm::D8Pow17 { m },
                    EvenForm::D8Pow16OneMod4 { m },
                    EvenForm::D8Pow16ThreeMod4 { m },
                ]);
            }
        }
        GroupTag::Z2xQ8 => {
            for m in r.clone() {
                out.push(EvenForm::Q8Pow19 { m });
                if m % 2 != 0 {
                    out.push(EvenForm::Q8Pow18Odd { m });
                }
                out.push(EvenForm::Q8Pow16OneMod4 { m });
                out.extend([3, 7, 11].map(|p| EvenForm::Q8Pow17 { m, p }));
                out.extend([5, 9, 13].map(|ell| EvenForm::Q8Pow16Type1 { m, ell }));
                out.extend(r.clone().map(|s| EvenForm::Q8Pow16Type2 { t: m, s }));
            }
        }
        _ => {}
    }
    out
}

/// Realises a member verdict as an explicit element.
pub fn witness_for_verdict(v: &Verdict) -> Result<WitnessResult, WitnessError> {
    let n = v.value;
    if !v.member || !v.verify() {
        return Err(WitnessError::NotMember {
            value: n,
            group: v.group,
        });
    }
    match (v.group, v.certificate) {
        (GroupTag::Z2xD8 | GroupTag::Z2xQ8, Certificate::OddOneMod16 { k }) => {
            checked_pack(v.group, "one_mod_16", n, one_mod_16(k)?)
        }
        (GroupTag::Z2xD8, Certificate::OddNineSplit { m, k }) => {
            let (family, pack) = d8_odd_split(m, m + 16 * k)?;
            checked_pack(v.group, family, n, pack)
        }
        (GroupTag::Z2xD8, Certificate::PrimeCriterion { p }) => {
            let (family, pack) = d8_odd_split(p as i128, n / p as i128)?;
            checked_pack(v.group, family, n, pack)
        }
        (
            GroupTag::Z2xQ8,
            Certificate::QuaternionOdd {
                s1,
                s2,
                ell1,
                ell2,
                case,
            },
        ) => {
            let family = match case {
                OddCase::Res1 => "quaternion_res1",
                OddCase::Res2 => "quaternion_res2",
            };
            checked_pack(v.group, family, n, q8_odd_pack(s1, s2, ell1, ell2, case)?)
        }
        (_, Certificate::EvenValuation { form, .. }) => witness_even_form(&form),
        (GroupTag::Z2xCyclic { t }, Certificate::CyclicPair { m, k }) => cyclic_vector(n, t, m, k),
        (_, Certificate::OneModOrder { modulus, k }) if modulus == v.group.order() => {
            let group = finite_group(v.group)?;
            let k = i64::try_from(k).map_err(|_| WitnessError::Overflow)?;
            let x = witness_one_mod_order(&group, k)?;
            Ok(WitnessResult {
                group: v.group,
                family: "one_mod_order".to_string(),
                payload: WitnessPayload::Vector {
                    coeffs: x.into_coeffs(),
                },
                claimed_value: n,
                verified: true,
            })
        }
        (_, c) => Err(WitnessError::NoFamily(format!("{c:?}"))),
    }
}

fn finite_group(tag: GroupTag) -> Result<Arc<FiniteGroup>, WitnessError> {
    if tag.order() > MAX_ORDER as u64 {
        return Err(WitnessError::NoFamily(format!(
            "{tag} exceeds order {MAX_ORDER}"
        )));
    }
    parse_group(&tag.to_string())
        .map(Arc::new)
        .map_err(|e| WitnessError::NoFamily(e.to_string()))
}

fn require_member(v: Verdict) -> Result<Verdict, WitnessError> {
    if v.member {
        Ok(v)
    } else {
        Err(WitnessError::NotMember {
            value: v.value,
            group: v.group,
        })
    }
}

/// Explicit `Z2 x D8` pack with determinant `n`.
pub fn witness_z2d8(n: i128) -> Result<WitnessResult, WitnessError> {
    witness_for_verdict(&require_member(classify_z2d8(n)?)?)
}

/// Explicit `Z2 x Q8` pack with determinant `n`.
pub fn witness_z2q8(n: i128) -> Result<WitnessResult, WitnessError> {
    witness_for_verdict(&require_member(classify_z2q8(n)?)?)
}

/// Coefficients on `Z2 x Z_t` (the `y^0` block, then `y^1`) of
/// `F(x, y) = prod ((x^p - 1)/(x - 1))^a + k (y + 1)(x^t - 1)/(x - 1)`
/// over `p^a || m`, reduced mod `x^t - 1`.
pub fn witness_cyclic(n: i128, t: u64) -> Result<WitnessResult, WitnessError> {
    let v = require_member(classify_prop1(n, GroupTag::Z2xCyclic { t })?)?;
    match v.certificate {
        Certificate::CyclicPair { m, k } => cyclic_vector(n, t, m, k),
        c => Err(WitnessError::NoFamily(format!("{c:?}"))),
    }
}

fn cyclic_vector(n: i128, t: u64, m: i128, k: i128) -> Result<WitnessResult, WitnessError> {
    if 2 * t > MAX_ORDER as u64 {
        return Err(WitnessError::NoFamily(format!(
            "z2xz{t} exceeds order {MAX_ORDER}"
        )));
    }
    let t = t as usize;
    let mut f = vec![BigInt::from(0); t];
    f[0] = BigInt::from(1);
    for (p, e) in factorize(m)?.primes {
        for _ in 0..e {
            let mut next = vec![BigInt::from(0); t];
            for (i, c) in f.iter().enumerate() {
                for j in 0..p as usize {
                    next[(i + j) % t] += c;
                }
            }
            f = next;
        }
    }
    let k = BigInt::from(k);
    let coeffs: Vec<BigInt> = f
        .into_iter()
        .map(|c| c + &k)
        .chain(std::iter::repeat_n(k.clone(), t))
        .collect();
    let zt = make_cyclic(t).map_err(|e| WitnessError::NoFamily(e.to_string()))?;
    let total = theorem1_eval(2, &zt, &coeffs)?.total;
    if total != BigInt::from(n) {
        return Err(WitnessError::VerificationFailed {
            claimed: n,
            found: total.to_string(),
        });
    }
    Ok(WitnessResult {
        group: GroupTag::Z2xCyclic { t: t as u64 },
        family: "cyclic_pair".to_string(),
        payload: WitnessPayload::Vector { coeffs },
        claimed_value: n,
        verified: true,
    })
}

/// `1 + k` on the identity and `k` elsewhere; determinant `1 + k |G|`.
pub fn witness_one_mod_order(
    group: &Arc<FiniteGroup>,
    k: i64,
) -> Result<GroupRingElement, WitnessError> {
    let mut coeffs = vec![k; group.order()];
    coeffs[group.identity()] = k.checked_add(1).ok_or(WitnessError::Overflow)?;
    let x =
        GroupRingElement::from_i64s(Arc::clone(group), &coeffs).expect("length matches the group");
    let want = BigInt::from(1) + BigInt::from(k) * group.order();
    let found = det_naive(&x);
    if found != want {
        return Err(WitnessError::VerificationFailed {
            claimed: i128::try_from(&want).unwrap_or(i128::MAX),
            found: found.to_string(),
        });
    }
    Ok(x)
}

/// Classifies and, for members, builds a witness.
pub fn classify_and_witness(
    group: GroupTag,
    n: i128,
) -> Result<(Verdict, Option<WitnessResult>), WitnessError> {
    let v = classify(group, n)?;
    let w = if v.member {
        Some(witness_for_verdict(&v)?)
    } else {
        None
    };
    Ok((v, w))
}
