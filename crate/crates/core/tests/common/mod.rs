//! Oracles shared by the integration tests. They avoid the library's
//! determinant code so agreement is meaningful.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::Rng;

use groupdet::groups::FiniteGroup;

/// Primes just below 2^62, found with [`slow_is_prime`] on first use.
fn oracle_primes() -> &'static [u64] {
    use std::sync::OnceLock;
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let mut out = Vec::new();
        let mut c = (1u64 << 62) - 1;
        while out.len() < 24 {
            if slow_is_prime(c) {
                out.push(c);
            }
            c -= 2;
        }
        out
    })
}

/// Miller-Rabin with a fixed base set written independently of the library.
pub fn slow_is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let mulm = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powm = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mulm(r, b);
            }
            b = mulm(b, b);
            e >>= 1;
        }
        r
    };
    'bases: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powm(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulm(x, x);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn det_mod(rows: &[Vec<BigInt>], p: u64) -> u64 {
    let n = rows.len();
    let pb = BigInt::from(p);
    let mut m: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| {
                    let v = x.mod_floor(&pb);
                    u64::try_from(v).unwrap()
                })
                .collect()
        })
        .collect();
    let mulm = |a: u64, b: u64| ((a as u128 * b as u128) % p as u128) as u64;
    let inv = |a: u64| {
        let (mut b, mut e, mut r) = (a, p - 2, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                r = mulm(r, b);
            }
            b = mulm(b, b);
            e >>= 1;
        }
        r
    };
    let mut det = 1u64;
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| m[r][col] != 0) else {
            return 0;
        };
        if piv != col {
            m.swap(piv, col);
            det = (p - det) % p;
        }
        det = mulm(det, m[col][col]);
        let iv = inv(m[col][col]);
        for r in col + 1..n {
            if m[r][col] == 0 {
                continue;
            }
            let f = mulm(m[r][col], iv);
            let (top, bottom) = m.split_at_mut(r);
            for (x, &y) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                *x = (*x + p - mulm(f, y)) % p;
            }
        }
    }
    det
}

/// Exact determinant by elimination modulo many primes and CRT, sized by
/// Hadamard's bound.
pub fn det_multimodular(rows: &[Vec<BigInt>]) -> BigInt {
    let mut bound_sq = BigInt::one();
    for r in rows {
        let s: BigInt = r.iter().map(|x| x * x).sum();
        bound_sq *= s.max(BigInt::one());
    }
    // need modulus > 2 * sqrt(bound_sq)
    let target = (bound_sq.sqrt() + 1u32) * 2u32;
    let mut modulus = BigInt::one();
    let mut acc = BigInt::zero();
    for &p in oracle_primes() {
        if modulus > target {
            break;
        }
        let r = BigInt::from(det_mod(rows, p));
        let pb = BigInt::from(p);
        // acc + modulus * t = r (mod p)
        let mi = modulus.modpow(&(&pb - 2u32), &pb);
        let t = ((r - &acc).mod_floor(&pb) * mi).mod_floor(&pb);
        acc += &modulus * t;
        modulus *= pb;
    }
    assert!(modulus > target, "oracle ran out of primes");
    if &acc * 2u32 > modulus {
        acc - modulus
    } else {
        acc
    }
}

/// `M[g][h] = a_{g h^-1}` built straight from the group table.
pub fn oracle_group_matrix(g: &FiniteGroup, a: &[BigInt]) -> Vec<Vec<BigInt>> {
    let n = g.order();
    (0..n)
        .map(|r| (0..n).map(|c| a[g.mul(r, g.inv(c))].clone()).collect())
        .collect()
}

pub fn oracle_group_det(g: &FiniteGroup, a: &[BigInt]) -> BigInt {
    det_multimodular(&oracle_group_matrix(g, a))
}

pub fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&c| BigInt::from(c)).collect()
}

pub fn random_vec(rng: &mut impl Rng, len: usize, lo: i64, hi: i64) -> Vec<i64> {
    (0..len).map(|_| rng.gen_range(lo..=hi)).collect()
}

/// `Res(f, g)` as the Sylvester determinant; coefficients low degree first.
pub fn resultant(f: &[BigInt], g: &[BigInt]) -> BigInt {
    let trim = |p: &[BigInt]| {
        let mut v = p.to_vec();
        while v.len() > 1 && v.last().is_some_and(|c| c.is_zero()) {
            v.pop();
        }
        v
    };
    let (f, g) = (trim(f), trim(g));
    let (m, n) = (f.len() - 1, g.len() - 1);
    if g.len() == 1 && g[0].is_zero() {
        return BigInt::zero();
    }
    if m == 0 {
        return f[0].pow(n as u32);
    }
    if n == 0 {
        return g[0].pow(m as u32);
    }
    let size = m + n;
    let mut rows = vec![vec![BigInt::zero(); size]; size];
    for i in 0..n {
        for (j, c) in f.iter().rev().enumerate() {
            rows[i][i + j] = c.clone();
        }
    }
    for i in 0..m {
        for (j, c) in g.iter().rev().enumerate() {
            rows[n + i][i + j] = c.clone();
        }
    }
    det_multimodular(&rows)
}
