use crate::arithmetic::{factorize, residue, signed_divisor_pairs, two_adic_split, Factorization};

use super::{
    Certificate, ClassifyError, EvenForm, GroupTag, NonMemberReason, OddCase, Verdict, VALUE_LIMIT,
};

fn in_range(n: i128) -> Result<(), ClassifyError> {
    if n.unsigned_abs() >= VALUE_LIMIT {
        Err(ClassifyError::OutOfRange(n))
    } else {
        Ok(())
    }
}

fn factor(n: i128) -> Factorization {
    factorize(n).expect("nonzero value below 2^63")
}

/// Dispatches on the group tag.
pub fn classify(group: GroupTag, n: i128) -> Result<Verdict, ClassifyError> {
    match group {
        GroupTag::Z2xD8 => classify_z2d8(n),
        GroupTag::Z2xQ8 => classify_z2q8(n),
        GroupTag::D16 => classify_d16(n),
        _ => classify_prop1(n, group),
    }
}

/// First signed pair `(m, m')`, `m m' = n`, with `m = m' mod 16`. Odd `n` only.
pub fn d8_divisor_pair_test(n: i128) -> Option<(i128, i128)> {
    if n % 2 == 0 {
        return None;
    }
    let f = factor(n);
    let pair = signed_divisor_pairs(&f).find(|&(m, mp)| residue(mp - m, 16) == 0);
    pair
}

/// Smallest prime `p | n` with `p = +-3, +-5 mod 16`, for `n = 9 mod 16`.
pub fn d8_prime_criterion_test(n: i128) -> Option<u64> {
    if residue(n, 16) != 9 {
        return None;
    }
    factor(n)
        .primes
        .iter()
        .map(|&(p, _)| p)
        .find(|p| [3, 5, 11, 13].contains(&(p % 16)))
}

fn low_valuation(n: i128, group: GroupTag, required: u32) -> Option<Verdict> {
    let (v, _) = two_adic_split(n)?;
    (v < required)
        .then(|| Verdict::rejected(n, group, NonMemberReason::LowValuation { v2: v, required }))
}

fn bad_odd_residue(n: i128, group: GroupTag) -> Verdict {
    Verdict::rejected(
        n,
        group,
        NonMemberReason::ResidueClass {
            modulus: 16,
            residue: residue(n, 16) as u64,
        },
    )
}

pub fn classify_z2d8(n: i128) -> Result<Verdict, ClassifyError> {
    in_range(n)?;
    let g = GroupTag::Z2xD8;
    if n % 2 != 0 {
        let pair = d8_divisor_pair_test(n);
        let prime = d8_prime_criterion_test(n);
        let r = residue(n, 16);
        if pair.is_some() != (r == 1 || prime.is_some()) {
            return Err(ClassifyError::TestsDisagree(n));
        }
        return Ok(match (r, pair) {
            (1, _) => Verdict::member(n, g, Certificate::OddOneMod16 { k: (n - 1) / 16 }),
            (_, Some((m, mp))) => Verdict {
                corroboration: prime.map(|p| Certificate::PrimeCriterion { p }),
                ..Verdict::member(
                    n,
                    g,
                    Certificate::OddNineSplit {
                        m,
                        k: (mp - m) / 16,
                    },
                )
            },
            (9, None) => Verdict::rejected(n, g, NonMemberReason::NoDivisorSplit),
            _ => bad_odd_residue(n, g),
        });
    }
    if let Some(v) = low_valuation(n, g, 16) {
        return Ok(v);
    }
    let Some((v, w)) = two_adic_split(n) else {
        let form = EvenForm::D8Pow18 { m: 0 };
        return Ok(Verdict::member(
            n,
            g,
            Certificate::EvenValuation { v2: None, form },
        ));
    };
    let form = match v {
        v if v >= 18 => EvenForm::D8Pow18 { m: n >> 18 },
        17 => EvenForm::D8Pow17 { m: (w - 1) / 2 },
        _ if residue(w, 4) == 1 => EvenForm::D8Pow16OneMod4 { m: (w - 1) / 4 },
        _ => EvenForm::D8Pow16ThreeMod4 { m: (w + 1) / 4 },
    };
    Ok(Verdict::member(
        n,
        g,
        Certificate::EvenValuation { v2: Some(v), form },
    ))
}

/// `(s1, s2, ell1, ell2, case)` with the smallest `ell1 ell2`.
fn quaternion_odd_split(n: i128) -> Option<Certificate> {
    let f = factor(n);
    let mut roots: Vec<u64> = f.square_root_divisors().collect();
    roots.sort_unstable();
    for big_l in roots {
        let l128 = big_l as i128;
        let q = n / (l128 * l128);
        let fl = factor(l128);
        let mut ells: Vec<u64> = fl.divisors().collect();
        ells.sort_unstable();
        let fq = factor(q);
        for &ell1 in &ells {
            let ell2 = big_l / ell1;
            if ell1 % 4 != 3 || ell2 % 4 != 3 {
                continue;
            }
            let dl = ell1 as i128 - ell2 as i128;
            for (s1, s2) in signed_divisor_pairs(&fq) {
                if residue(s1, 8) != 5 || residue(s2, 8) != 5 {
                    continue;
                }
                let case = if residue(s1 - s2, 16) == 0 && residue(dl, 8) == 0 {
                    OddCase::Res1
                } else if residue(s1 - s2 - 8, 16) == 0 && residue(dl - 4, 8) == 0 {
                    OddCase::Res2
                } else {
                    continue;
                };
                return Some(Certificate::QuaternionOdd {
                    s1,
                    s2,
                    ell1,
                    ell2,
                    case,
                });
            }
        }
    }
    None
}

fn q8_sixteen(w: i128) -> Result<EvenForm, NonMemberReason> {
    if residue(w, 4) == 1 {
        return Ok(EvenForm::Q8Pow16OneMod4 { m: (w - 1) / 4 });
    }
    if residue(w, 8) == 3 {
        return Ok(EvenForm::Q8Pow16Type2 {
            t: (w - 3) / 8,
            s: 0,
        });
    }
    let f = factor(w);
    if let Some((u, v)) =
        signed_divisor_pairs(&f).find(|&(u, v)| residue(u, 8) == 3 && residue(v, 8) == 5)
    {
        return Ok(EvenForm::Q8Pow16Type2 {
            t: (u - 3) / 8,
            s: (v - 1) / 4,
        });
    }
    let mut ells: Vec<u64> = f.square_root_divisors().collect();
    ells.sort_unstable();
    ells.into_iter()
        .find(|&l| l % 4 == 1 && l >= 5)
        .map(|ell| {
            let rest = w / (ell as i128 * ell as i128);
            EvenForm::Q8Pow16Type1 {
                m: (rest + 1) / 4,
                ell,
            }
        })
        .ok_or(NonMemberReason::NoSevenModEightForm)
}

pub fn classify_z2q8(n: i128) -> Result<Verdict, ClassifyError> {
    in_range(n)?;
    let g = GroupTag::Z2xQ8;
    if n % 2 != 0 {
        return Ok(match residue(n, 16) {
            1 => Verdict::member(n, g, Certificate::OddOneMod16 { k: (n - 1) / 16 }),
            9 => match quaternion_odd_split(n) {
                Some(c) => Verdict::member(n, g, c),
                None => Verdict::rejected(n, g, NonMemberReason::NoQuaternionSplit),
            },
            _ => bad_odd_residue(n, g),
        });
    }
    if let Some(v) = low_valuation(n, g, 16) {
        return Ok(v);
    }
    let Some((v, w)) = two_adic_split(n) else {
        let form = EvenForm::Q8Pow19 { m: 0 };
        return Ok(Verdict::member(
            n,
            g,
            Certificate::EvenValuation { v2: None, form },
        ));
    };
    let form = match v {
        v if v >= 19 => Ok(EvenForm::Q8Pow19 { m: n >> 19 }),
        18 => Ok(EvenForm::Q8Pow18Odd { m: w }),
        17 => factor(w)
            .primes
            .iter()
            .find(|&&(p, e)| e >= 2 && p % 4 == 3)
            .map(|&(p, _)| EvenForm::Q8Pow17 {
                m: (w / (p as i128 * p as i128) - 1) / 2,
                p,
            })
            .ok_or(NonMemberReason::NoPrimeSquare),
        _ => q8_sixteen(w),
    };
    Ok(match form {
        Ok(form) => Verdict::member(n, g, Certificate::EvenValuation { v2: Some(v), form }),
        Err(reason) => Verdict::rejected(n, g, reason),
    })
}

pub fn classify_d16(n: i128) -> Result<Verdict, ClassifyError> {
    in_range(n)?;
    let g = GroupTag::D16;
    if residue(n, 4) == 1 {
        let cert = Certificate::OneModOrder {
            modulus: 4,
            k: (n - 1) / 4,
        };
        return Ok(Verdict::member(n, g, cert));
    }
    let v2 = two_adic_split(n).map(|(v, _)| v);
    match v2 {
        Some(v) if v < 10 => {
            let reason = if v == 0 {
                NonMemberReason::ResidueClass {
                    modulus: 4,
                    residue: 3,
                }
            } else {
                NonMemberReason::LowValuation {
                    v2: v,
                    required: 10,
                }
            };
            Ok(Verdict::rejected(n, g, reason))
        }
        _ => {
            let form = EvenForm::D16Pow10 { m: n >> 10 };
            Ok(Verdict::member(
                n,
                g,
                Certificate::EvenValuation { v2, form },
            ))
        }
    }
}

/// Odd values on `Z2 x Z_t`, `Z2^r` and `Z2^r x Z4`.
///
/// The cyclic certificate uses the largest `m > 0` with `m <= |m'|`.
pub fn classify_prop1(n: i128, group: GroupTag) -> Result<Verdict, ClassifyError> {
    if !group.is_prop1() {
        return Err(ClassifyError::UnsupportedGroup(group.to_string()));
    }
    let group = group.validate()?;
    in_range(n)?;
    if n % 2 == 0 {
        return Err(ClassifyError::OddValuesOnly(n));
    }
    let order = group.order() as i128;
    if let GroupTag::Z2xCyclic { .. } = group {
        let f = factor(n);
        let best = f
            .divisors()
            .map(|d| d as i128)
            .filter(|&m| m * m <= n.abs())
            .filter(|&m| residue(n / m - m, order) == 0)
            .max();
        return Ok(match best {
            Some(m) => {
                let k = (n / m - m) / order;
                Verdict::member(n, group, Certificate::CyclicPair { m, k })
            }
            None => Verdict::rejected(n, group, NonMemberReason::NoDivisorSplit),
        });
    }
    let r = residue(n, order);
    Ok(if r == 1 {
        let cert = Certificate::OneModOrder {
            modulus: order as u64,
            k: (n - 1) / order,
        };
        Verdict::member(n, group, cert)
    } else {
        let reason = NonMemberReason::ResidueClass {
            modulus: order as u64,
            residue: r as u64,
        };
        Verdict::rejected(n, group, reason)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn member(v: &Verdict) -> bool {
        assert!(v.verify(), "{v:?}");
        v.member
    }

    #[test]
    fn z2d8_examples() {
        let v = classify_z2d8(17).unwrap();
        assert_eq!(v.certificate, Certificate::OddOneMod16 { k: 1 });
        assert!(member(&v));
        assert!(!member(&classify_z2d8(89).unwrap()));
        assert!(!member(&classify_z2d8(1 << 15).unwrap()));
        assert!(member(&classify_z2d8(5 << 16).unwrap()));
        let v = classify_z2d8(25).unwrap();
        assert_eq!(v.certificate, Certificate::OddNineSplit { m: 5, k: 0 });
        assert_eq!(v.corroboration, Some(Certificate::PrimeCriterion { p: 5 }));
        assert!(member(&v));
        assert!(member(&classify_z2d8(0).unwrap()));
        assert!(!member(&classify_z2d8(3).unwrap()));
        assert!(!member(&classify_z2d8(-21).unwrap()));
        assert_eq!(
            classify_z2d8(1 << 63),
            Err(ClassifyError::OutOfRange(1 << 63))
        );
    }

    #[test]
    fn z2q8_examples() {
        let v = classify_z2q8(729).unwrap();
        assert_eq!(
            v.certificate,
            Certificate::QuaternionOdd {
                s1: -3,
                s2: -3,
                ell1: 3,
                ell2: 3,
                case: OddCase::Res1
            }
        );
        assert!(member(&v));
        assert!(!member(&classify_z2q8(25).unwrap()));
        assert!(!member(&classify_z2q8(7 << 16).unwrap()));
        let v = classify_z2q8(9 << 17).unwrap();
        assert_eq!(
            v.certificate,
            Certificate::EvenValuation {
                v2: Some(17),
                form: EvenForm::Q8Pow17 { m: 0, p: 3 }
            }
        );
        assert!(member(&v));
        assert!(!member(&classify_z2q8(5 << 17).unwrap()));
        assert!(member(&classify_z2q8(0).unwrap()));
        assert!(member(&classify_z2q8(1 << 16).unwrap()));
        // 2^16 * 175 = 2^16 * 7 * 25, ell = 5
        let v = classify_z2q8(175 << 16).unwrap();
        assert!(member(&v));
        // 2^16 * 15 = 2^16 * 3 * 5; -15 = 1 mod 4
        assert!(member(&classify_z2q8(-(15 << 16)).unwrap()));
        assert!(member(&classify_z2q8(15 << 16).unwrap()));
    }

    #[test]
    fn d16_examples() {
        assert!(member(&classify_d16(5).unwrap()));
        assert!(member(&classify_d16(3 << 10).unwrap()));
        assert!(!member(&classify_d16(7).unwrap()));
        assert!(!member(&classify_d16(2).unwrap()));
        assert!(member(&classify_d16(0).unwrap()));
    }

    #[test]
    fn abelian_family_examples() {
        let z2z4 = GroupTag::Z2xCyclic { t: 4 };
        let v = classify_prop1(33, z2z4).unwrap();
        assert_eq!(v.certificate, Certificate::CyclicPair { m: 3, k: 1 });
        assert!(member(&v));
        let v = classify_prop1(9, z2z4).unwrap();
        assert_eq!(v.certificate, Certificate::CyclicPair { m: 3, k: 0 });
        assert!(!member(
            &classify_prop1(9, GroupTag::Z2Power { rank: 4 }).unwrap()
        ));
        assert!(member(
            &classify_prop1(17, GroupTag::Z2Power { rank: 4 }).unwrap()
        ));
        assert!(member(
            &classify_prop1(9, GroupTag::Z2xCyclic { t: 8 }).unwrap()
        ));
        assert!(!member(
            &classify_prop1(3, GroupTag::Z2xCyclic { t: 8 }).unwrap()
        ));
        assert_eq!(
            classify_prop1(10, z2z4),
            Err(ClassifyError::OddValuesOnly(10))
        );
        assert!(classify_prop1(9, GroupTag::Z2xD8).is_err());
    }

    #[test]
    fn dual_tests_agree_on_small_odd_values() {
        for n in (-4001..=4001).step_by(2) {
            classify_z2d8(n).unwrap();
        }
    }
}
