//! Number-theoretic helpers: 64-bit factorization, divisor streams, residues
//! and the constrained four-square decomposition used by quaternion witnesses.

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Trial division runs over the primes below this bound before Pollard rho.
pub const TRIAL_DIVISION_BOUND: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithmeticError {
    #[error("cannot factor zero")]
    Zero,
    #[error("|{0}| must be below 2^63")]
    OutOfRange(i128),
    #[error("{0} is not congruent to 3 mod 4")]
    NotThreeModFour(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    pub sign: i8,
    /// `(prime, exponent)` pairs in increasing prime order.
    pub primes: Vec<(u64, u32)>,
}

impl Factorization {
    /// Reconstructs the factored integer.
    pub fn value(&self) -> i128 {
        let magnitude: i128 = self
            .primes
            .iter()
            .map(|&(p, e)| (p as i128).pow(e))
            .product();
        self.sign as i128 * magnitude
    }

    pub fn magnitude(&self) -> u64 {
        self.primes.iter().map(|&(p, e)| p.pow(e)).product()
    }

    /// Positive divisors, streamed in mixed-radix order of the exponents.
    pub fn divisors(&self) -> Divisors {
        Divisors::new(self.primes.clone())
    }

    /// Positive `d` with `d^2` dividing the factored integer.
    pub fn square_root_divisors(&self) -> Divisors {
        Divisors::new(
            self.primes
                .iter()
                .filter(|&&(_, e)| e >= 2)
                .map(|&(p, e)| (p, e / 2))
                .collect(),
        )
    }
}

/// Lazy iterator over the positive divisors of a factored integer.
#[derive(Debug, Clone)]
pub struct Divisors {
    primes: Vec<(u64, u32)>,
    exps: Vec<u32>,
    current: u64,
    done: bool,
}

impl Divisors {
    fn new(primes: Vec<(u64, u32)>) -> Self {
        let exps = vec![0; primes.len()];
        Divisors {
            primes,
            exps,
            current: 1,
            done: false,
        }
    }
}

impl Iterator for Divisors {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.done {
            return None;
        }
        let out = self.current;
        // advance the mixed-radix counter, first prime fastest
        let mut i = 0;
        loop {
            if i == self.primes.len() {
                self.done = true;
                break;
            }
            let (p, e) = self.primes[i];
            if self.exps[i] < e {
                self.exps[i] += 1;
                self.current *= p;
                break;
            }
            self.current /= p.pow(self.exps[i]);
            self.exps[i] = 0;
            i += 1;
        }
        Some(out)
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A nontrivial factor of the odd composite `n` (Brent's variant of rho).
fn pollard_brent(n: u64) -> u64 {
    debug_assert!(n % 2 == 1 && !is_prime(n));
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut ys) = (2u64, 2u64, 2u64);
        let mut q = 1u64;
        let mut g = 1u64;
        let mut r = 1u64;
        const BATCH: u64 = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += BATCH;
            }
            r *= 2;
        }
        if g == n {
            // batch overshot; replay one step at a time
            loop {
                ys = f(ys);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn small_primes() -> &'static [u64] {
    use std::sync::OnceLock;
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let bound = TRIAL_DIVISION_BOUND as usize;
        let mut sieve = vec![true; bound];
        let mut out = Vec::new();
        for i in 2..bound {
            if sieve[i] {
                out.push(i as u64);
                let mut j = i * i;
                while j < bound {
                    sieve[j] = false;
                    j += i;
                }
            }
        }
        out
    })
}

fn collect_factors(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_brent(n);
    collect_factors(d, out);
    collect_factors(n / d, out);
}

/// Complete factorization of a nonzero integer with `|n| < 2^63`.
pub fn factorize(n: i128) -> Result<Factorization, ArithmeticError> {
    if n == 0 {
        return Err(ArithmeticError::Zero);
    }
    if n.unsigned_abs() >= 1u128 << 63 {
        return Err(ArithmeticError::OutOfRange(n));
    }
    let sign = if n < 0 { -1 } else { 1 };
    let mut rest = n.unsigned_abs() as u64;
    let mut primes: Vec<(u64, u32)> = Vec::new();
    for &p in small_primes() {
        if p * p > rest {
            break;
        }
        if rest.is_multiple_of(p) {
            let mut e = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                e += 1;
            }
            primes.push((p, e));
        }
    }
    if rest > 1 {
        let mut large = Vec::new();
        collect_factors(rest, &mut large);
        large.sort_unstable();
        for p in large {
            match primes.last_mut() {
                Some((q, e)) if *q == p => *e += 1,
                _ => primes.push((p, 1)),
            }
        }
    }
    Ok(Factorization { sign, primes })
}

/// Every ordered pair `(u, v)` with `u * v = n`, positive `u` first and then
/// the negated pairs, each exactly once.
pub fn signed_divisor_pairs(f: &Factorization) -> impl Iterator<Item = (i128, i128)> + '_ {
    let n = f.value();
    let positive = f.divisors().map(move |d| (d as i128, n / d as i128));
    let negative = f.divisors().map(move |d| (-(d as i128), -(n / d as i128)));
    positive.chain(negative)
}

/// Canonical residue of `n` in `[0, modulus)`.
pub fn residue(n: i128, modulus: i128) -> i128 {
    assert!(modulus > 0, "modulus must be positive");
    n.rem_euclid(modulus)
}

/// `(v, w)` with `n = 2^v * w`, `w` odd; `None` for zero.
pub fn two_adic_split(n: i128) -> Option<(u32, i128)> {
    if n == 0 {
        return None;
    }
    let v = n.trailing_zeros();
    Some((v, n >> v))
}

pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u64;
    while x.checked_mul(x).is_none_or(|sq| sq > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|sq| sq <= n) {
        x += 1;
    }
    x
}

pub fn perfect_square_root(n: u64) -> Option<u64> {
    let r = isqrt(n);
    (r * r == n).then_some(r)
}

/// `ell = a^2 + b^2 + c^2 + d^2` with `a, b, c` odd and `d` even.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FourSquares {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl FourSquares {
    pub fn sum(&self) -> i128 {
        [self.a, self.b, self.c, self.d]
            .iter()
            .map(|&x| (x as i128) * (x as i128))
            .sum()
    }

    /// Checks the sum, the parity pattern, and the 2-adic size of `d`
    /// forced by `ell mod 8`.
    pub fn satisfies_invariants(&self, ell: u64) -> bool {
        let odd = |x: i64| x.rem_euclid(2) == 1;
        let parity = odd(self.a) && odd(self.b) && odd(self.c) && !odd(self.d);
        let d_class = match ell % 8 {
            7 => self.d.rem_euclid(4) == 2,
            3 => self.d.rem_euclid(4) == 0,
            _ => false,
        };
        self.sum() == ell as i128 && parity && d_class
    }
}

/// Lexicographically smallest `(A, B, C, D)` with `A >= B >= C >= 0` odd,
/// `D >= 0` even and `A^2 + B^2 + C^2 + D^2 = ell`, for `ell = 3 mod 4`.
pub fn four_squares_constrained(ell: u64) -> Result<FourSquares, ArithmeticError> {
    if ell % 4 != 3 {
        return Err(ArithmeticError::NotThreeModFour(ell));
    }
    let mut a = 1u64;
    while a * a <= ell {
        for b in (1..=a).step_by(2) {
            for c in (1..=b).step_by(2) {
                let used = a * a + b * b + c * c;
                if used > ell {
                    break;
                }
                if let Some(d) = perfect_square_root(ell - used) {
                    if d % 2 == 0 {
                        return Ok(FourSquares {
                            a: a as i64,
                            b: b as i64,
                            c: c as i64,
                            d: d as i64,
                        });
                    }
                }
            }
        }
        a += 2;
    }
    unreachable!("every ell = 3 mod 4 is a sum of three odd squares and one even square")
}
