//! Membership in the integer group determinant set `S(G)`.
//!
//! Each `classify_*` returns a [`Verdict`] whose [`Certificate`] is enough to
//! re-check the answer with a few multiplications and residues. The
//! `witness_*` builders turn member certificates into explicit group ring
//! elements whose determinant is recomputed before being returned.

mod classify;
mod witness;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::arithmetic::{is_prime, residue, two_adic_split};

pub use classify::{
    classify, classify_d16, classify_prop1, classify_z2d8, classify_z2q8, d8_divisor_pair_test,
    d8_prime_criterion_test,
};
pub use witness::{
    classify_and_witness, even_family_sweep, witness_cyclic, witness_even_form,
    witness_for_verdict, witness_one_mod_order, witness_z2d8, witness_z2q8, WitnessError,
    WitnessPayload, WitnessResult,
};

/// Inputs must satisfy `|n| < 2^63`.
pub const VALUE_LIMIT: u128 = 1 << 63;

/// Groups with a known characterization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupTag {
    Z2xD8,
    Z2xQ8,
    D16,
    /// `Z2 x Z_t`, `t` a power of two.
    Z2xCyclic {
        t: u64,
    },
    /// `Z2^rank`.
    Z2Power {
        rank: u32,
    },
    /// `Z2^rank x Z4`.
    Z2PowerXZ4 {
        rank: u32,
    },
}

impl GroupTag {
    /// `|G|`.
    pub fn order(self) -> u64 {
        match self {
            GroupTag::Z2xD8 | GroupTag::Z2xQ8 | GroupTag::D16 => 16,
            GroupTag::Z2xCyclic { t } => 2 * t,
            GroupTag::Z2Power { rank } => 1 << rank,
            GroupTag::Z2PowerXZ4 { rank } => 4 << rank,
        }
    }

    pub fn is_prop1(self) -> bool {
        matches!(
            self,
            GroupTag::Z2xCyclic { .. } | GroupTag::Z2Power { .. } | GroupTag::Z2PowerXZ4 { .. }
        )
    }

    fn validate(self) -> Result<Self, ClassifyError> {
        let ok = match self {
            GroupTag::Z2xCyclic { t } => t.is_power_of_two() && t <= 1 << 40,
            GroupTag::Z2Power { rank } => (1..=40).contains(&rank),
            GroupTag::Z2PowerXZ4 { rank } => (1..=40).contains(&rank),
            _ => true,
        };
        if ok {
            Ok(self)
        } else {
            Err(ClassifyError::UnsupportedGroup(self.to_string()))
        }
    }
}

/// Written as a product name understood by [`crate::groups::parse_group`].
impl fmt::Display for GroupTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let z2s = |r: u32| vec!["z2"; r as usize].join("x");
        match *self {
            GroupTag::Z2xD8 => f.write_str("z2xd8"),
            GroupTag::Z2xQ8 => f.write_str("z2xq8"),
            GroupTag::D16 => f.write_str("d16"),
            GroupTag::Z2xCyclic { t } => write!(f, "z2xz{t}"),
            GroupTag::Z2Power { rank } => f.write_str(&z2s(rank)),
            GroupTag::Z2PowerXZ4 { rank } => write!(f, "{}xz4", z2s(rank)),
        }
    }
}

/// Accepts `z2xd8`, `z2xq8`, `d16`, `z2xz<t>`, `z2^r`, `z2^rxz4` and the
/// spelled-out products `z2xz2x...` with an optional trailing `z4`.
impl FromStr for GroupTag {
    type Err = ClassifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let name = s.trim().to_ascii_lowercase();
        let unsupported = || ClassifyError::UnsupportedGroup(s.to_string());
        let mut powers: Vec<String> = Vec::new();
        for part in name.split('x') {
            match part.split_once('^') {
                Some(("z2", r)) => {
                    let r: usize = r.parse().map_err(|_| unsupported())?;
                    powers.extend(std::iter::repeat_n("z2".to_string(), r));
                }
                Some(_) => return Err(unsupported()),
                None => powers.push(part.to_string()),
            }
        }
        let factors: Vec<&str> = powers.iter().map(String::as_str).collect();
        let tag = match factors.as_slice() {
            ["z2", "d8"] => GroupTag::Z2xD8,
            ["z2", "q8"] => GroupTag::Z2xQ8,
            ["d16"] => GroupTag::D16,
            ["z2", last] if last.starts_with('z') && *last != "z2" => {
                let t: u64 = last[1..].parse().map_err(|_| unsupported())?;
                GroupTag::Z2xCyclic { t }
            }
            fs if !fs.is_empty() && fs.iter().all(|f| *f == "z2") => GroupTag::Z2Power {
                rank: fs.len() as u32,
            },
            [init @ .., "z4"] if !init.is_empty() && init.iter().all(|f| *f == "z2") => {
                GroupTag::Z2PowerXZ4 {
                    rank: init.len() as u32,
                }
            }
            _ => return Err(unsupported()),
        };
        tag.validate()
    }
}

impl Serialize for GroupTag {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GroupTag {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("|{0}| must be below 2^63")]
    OutOfRange(i128),
    #[error("{0} is even; only odd values are characterized for this family")]
    OddValuesOnly(i128),
    #[error("no characterization available for group {0}")]
    UnsupportedGroup(String),
    #[error("divisor-pair and prime tests disagree on {0}")]
    TestsDisagree(i128),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OddCase {
    Res1,
    Res2,
}

/// Parametrised even families. Each variant names the integer it encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum EvenForm {
    /// `2^18 m` on `Z2 x D8`.
    D8Pow18 {
        #[serde(with = "crate::decimal")]
        m: i128,
    },
    /// `2^17 (2m + 1)` on `Z2 x D8`.
    D8Pow17 {
        #[serde(with = "crate::decimal")]
        m: i128,
    },
    /// `2^16 (4m + 1)` on `Z2 x D8`.
    D8Pow16OneMod4 {
        #[serde(with = "crate::decimal")]
        m: i128,
    },
    /// `2^16 (4m - 1)` on `Z2 x D8`.
    D8Pow16ThreeMod4 {
        #[serde(with = "crate::decimal")]
        m: i128,
    },
    /// `2^19 m` on `Z2 x Q8`.
    Q8Pow19 {
        #[serde(with = "crate::decimal")]
        m: i128,
    },
    /// `2^18 m`, `m` odd, on `Z2 x Q8`.
    Q8Pow18Odd {
        #[serde(with = "crate::decimal")]
        m: i128,
    },
    /// `2^17 (2m + 1) p^2`, `p = 3 mod 4` prime, on `Z2 x Q8`.
    Q8Pow17 {
        #[serde(with = "crate::decimal")]
        m: i128,
        #[serde(with = "crate::decimal")]
        p: u64,
    },
    /// `2^16 (4m + 1)` on `Z2 x Q8`.
    Q8Pow16OneMod4 {
        #[serde(with = "crate::decimal")]
        m: i128,
    },
    /// `2^16 (8t + 3)(4s + 1)` on `Z2 x Q8`.
    Q8Pow16Type2 {
        #[serde(with = "crate::decimal")]
        t: i128,
        #[serde(with = "crate::decimal")]
        s: i128,
    },
    /// `2^16 (4m - 1) ell^2`, `ell = 1 mod 4`, `ell >= 5`, on `Z2 x Q8`.
    Q8Pow16Type1 {
        #[serde(with = "crate::decimal")]
        m: i128,
        #[serde(with = "crate::decimal")]
        ell: u64,
    },
    /// `2^10 m` on `D16`.
    D16Pow10 {
        #[serde(with = "crate::decimal")]
        m: i128,
    },
}

impl EvenForm {
    /// Encoded integer, `None` on overflow.
    pub fn value(&self) -> Option<i128> {
        let shl = |v: i128, e: u32| v.checked_mul(1i128 << e);
        match *self {
            EvenForm::D8Pow18 { m } => shl(m, 18),
            EvenForm::D8Pow17 { m } => shl(m.checked_mul(2)?.checked_add(1)?, 17),
            EvenForm::D8Pow16OneMod4 { m } | EvenForm::Q8Pow16OneMod4 { m } => {
                shl(m.checked_mul(4)?.checked_add(1)?, 16)
            }
            EvenForm::D8Pow16ThreeMod4 { m } => shl(m.checked_mul(4)?.checked_sub(1)?, 16),
            EvenForm::Q8Pow19 { m } => shl(m, 19),
            EvenForm::Q8Pow18Odd { m } => shl(m, 18),
            EvenForm::Q8Pow17 { m, p } => {
                let p = p as i128;
                shl(
                    m.checked_mul(2)?
                        .checked_add(1)?
                        .checked_mul(p.checked_mul(p)?)?,
                    17,
                )
            }
            EvenForm::Q8Pow16Type2 { t, s } => {
                let a = t.checked_mul(8)?.checked_add(3)?;
                let b = s.checked_mul(4)?.checked_add(1)?;
                shl(a.checked_mul(b)?, 16)
            }
            EvenForm::Q8Pow16Type1 { m, ell } => {
                let l = ell as i128;
                shl(
                    m.checked_mul(4)?
                        .checked_sub(1)?
                        .checked_mul(l.checked_mul(l)?)?,
                    16,
                )
            }
            EvenForm::D16Pow10 { m } => shl(m, 10),
        }
    }

    /// Range conditions on the parameters beyond the value itself.
    fn side_conditions_hold(&self) -> bool {
        match *self {
            EvenForm::Q8Pow18Odd { m } => m % 2 != 0,
            EvenForm::Q8Pow17 { p, .. } => p % 4 == 3 && is_prime(p),
            EvenForm::Q8Pow16Type1 { ell, .. } => ell % 4 == 1 && ell >= 5,
            _ => true,
        }
    }

    pub fn group(&self) -> GroupTag {
        use EvenForm::*;
        match self {
            D8Pow18 { .. } | D8Pow17 { .. } | D8Pow16OneMod4 { .. } | D8Pow16ThreeMod4 { .. } => {
                GroupTag::Z2xD8
            }
            D16Pow10 { .. } => GroupTag::D16,
            _ => GroupTag::Z2xQ8,
        }
    }

    /// Snake-case family name.
    pub fn tag(&self) -> &'static str {
        match self {
            EvenForm::D8Pow18 { .. } => "d8_pow18",
            EvenForm::D8Pow17 { .. } => "d8_pow17",
            EvenForm::D8Pow16OneMod4 { .. } => "d8_pow16_one_mod4",
            EvenForm::D8Pow16ThreeMod4 { .. } => "d8_pow16_three_mod4",
            EvenForm::Q8Pow19 { .. } => "q8_pow19",
            EvenForm::Q8Pow18Odd { .. } => "q8_pow18_odd",
            EvenForm::Q8Pow17 { .. } => "q8_pow17",
            EvenForm::Q8Pow16OneMod4 { .. } => "q8_pow16_one_mod4",
            EvenForm::Q8Pow16Type2 { .. } => "q8_pow16_type2",
            EvenForm::Q8Pow16Type1 { .. } => "q8_pow16_type1",
            EvenForm::D16Pow10 { .. } => "d16_pow10",
        }
    }
}

/// Why a value is not a determinant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum NonMemberReason {
    /// The value falls in an excluded residue class.
    ResidueClass { modulus: u64, residue: u64 },
    /// The 2-adic valuation is below the smallest even family.
    LowValuation { v2: u32, required: u32 },
    /// No signed divisor pair with the required congruence.
    NoDivisorSplit,
    /// No `(s1, s2, ell1, ell2)` split satisfying either residue condition.
    NoQuaternionSplit,
    /// `2^17 w` with no `p^2 | w`, `p = 3 mod 4`.
    NoPrimeSquare,
    /// `2^16 w`, `w = 7 mod 8`, matching neither admissible shape.
    NoSevenModEightForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// `value = 1 + 16k`.
    OddOneMod16 {
        #[serde(with = "crate::decimal")]
        k: i128,
    },
    /// `value = m (m + 16k)`, `m` odd.
    OddNineSplit {
        #[serde(with = "crate::decimal")]
        m: i128,
        #[serde(with = "crate::decimal")]
        k: i128,
    },
    /// `value = 9 mod 16` with a prime factor `p = +-3, +-5 mod 16`.
    PrimeCriterion {
        #[serde(with = "crate::decimal")]
        p: u64,
    },
    /// `value = s1 s2 (ell1 ell2)^2`.
    QuaternionOdd {
        #[serde(with = "crate::decimal")]
        s1: i128,
        #[serde(with = "crate::decimal")]
        s2: i128,
        #[serde(with = "crate::decimal")]
        ell1: u64,
        #[serde(with = "crate::decimal")]
        ell2: u64,
        case: OddCase,
    },
    /// Even member; `v2` is `None` for zero.
    EvenValuation {
        v2: Option<u32>,
        form: EvenForm,
    },
    /// `value = m (m + k |G|)`, `m > 0` odd.
    CyclicPair {
        #[serde(with = "crate::decimal")]
        m: i128,
        #[serde(with = "crate::decimal")]
        k: i128,
    },
    /// `value = 1 + k * modulus`.
    OneModOrder {
        modulus: u64,
        #[serde(with = "crate::decimal")]
        k: i128,
    },
    NotMember {
        reason: NonMemberReason,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    #[serde(with = "crate::decimal")]
    pub value: i128,
    pub group: GroupTag,
    pub member: bool,
    pub certificate: Certificate,
    /// Second, independent certificate when one exists.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corroboration: Option<Certificate>,
}

impl Verdict {
    pub(crate) fn member(value: i128, group: GroupTag, certificate: Certificate) -> Self {
        Verdict {
            value,
            group,
            member: true,
            certificate,
            corroboration: None,
        }
    }

    pub(crate) fn rejected(value: i128, group: GroupTag, reason: NonMemberReason) -> Self {
        Verdict {
            value,
            group,
            member: false,
            certificate: Certificate::NotMember { reason },
            corroboration: None,
        }
    }

    /// Recomputes the certificates' identities.
    ///
    /// Members need a certificate valid for the group; non-members only have
    /// their residue and valuation claims re-checked, since the remaining
    /// reasons record the outcome of an exhaustive divisor search.
    pub fn verify(&self) -> bool {
        let main = certificate_holds(self.value, self.group, &self.certificate);
        let extra = self
            .corroboration
            .is_none_or(|c| certificate_holds(self.value, self.group, &c));
        let kind_ok = self.member != matches!(self.certificate, Certificate::NotMember { .. });
        main && extra && kind_ok
    }
}

fn certificate_holds(n: i128, group: GroupTag, cert: &Certificate) -> bool {
    let mul = |a: i128, b: i128| a.checked_mul(b);
    match *cert {
        Certificate::OddOneMod16 { k } => {
            matches!(group, GroupTag::Z2xD8 | GroupTag::Z2xQ8)
                && mul(16, k).and_then(|v| v.checked_add(1)) == Some(n)
        }
        Certificate::OddNineSplit { m, k } => {
            group == GroupTag::Z2xD8
                && m % 2 != 0
                && mul(16, k)
                    .and_then(|v| v.checked_add(m))
                    .and_then(|mp| mul(m, mp))
                    == Some(n)
        }
        Certificate::PrimeCriterion { p } => {
            group == GroupTag::Z2xD8
                && is_prime(p)
                && [3, 5, 11, 13].contains(&(p % 16))
                && n % p as i128 == 0
                && residue(n, 16) == 9
        }
        Certificate::QuaternionOdd {
            s1,
            s2,
            ell1,
            ell2,
            case,
        } => {
            let (l1, l2) = (ell1 as i128, ell2 as i128);
            let product = mul(s1, s2)
                .and_then(|s| mul(l1, l2).and_then(|l| mul(l, l)).and_then(|l| mul(s, l)));
            let case_ok = match case {
                OddCase::Res1 => residue(s1 - s2, 16) == 0 && residue(l1 - l2, 8) == 0,
                OddCase::Res2 => residue(s1 - s2 - 8, 16) == 0 && residue(l1 - l2 - 4, 8) == 0,
            };
            group == GroupTag::Z2xQ8
                && product == Some(n)
                && residue(s1, 8) == 5
                && residue(s2, 8) == 5
                && ell1 % 4 == 3
                && ell2 % 4 == 3
                && case_ok
        }
        Certificate::EvenValuation { v2, form } => {
            form.group() == group
                && form.side_conditions_hold()
                && form.value() == Some(n)
                && two_adic_split(n).map(|(v, _)| v) == v2
        }
        Certificate::CyclicPair { m, k } => {
            let GroupTag::Z2xCyclic { .. } = group else {
                return false;
            };
            m > 0
                && m % 2 != 0
                && mul(k, group.order() as i128)
                    .and_then(|v| v.checked_add(m))
                    .and_then(|mp| mul(m, mp))
                    == Some(n)
        }
        Certificate::OneModOrder { modulus, k } => {
            let expected = match group {
                GroupTag::D16 => 4,
                GroupTag::Z2Power { .. } | GroupTag::Z2PowerXZ4 { .. } => group.order(),
                _ => return false,
            };
            modulus == expected && mul(k, modulus as i128).and_then(|v| v.checked_add(1)) == Some(n)
        }
        Certificate::NotMember { reason } => match reason {
            NonMemberReason::ResidueClass {
                modulus,
                residue: r,
            } => modulus > 0 && residue(n, modulus as i128) == r as i128,
            NonMemberReason::LowValuation { v2, required } => {
                v2 < required && two_adic_split(n).map(|(v, _)| v) == Some(v2)
            }
            _ => true,
        },
    }
}
