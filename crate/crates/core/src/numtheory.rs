//! Elementary number theory on checked `u64`: factorization, divisors,
//! totients, unit groups and multiplicative orders.
//!
//! Everything here is trial-division based. Inputs are desk-scale (the CLI
//! caps moduli well below `10^7`), so nothing cleverer is warranted.

use crate::error::{Error, Result};

/// Prime factorization as `(prime, exponent)` pairs, primes strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Factorization {
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// Distinct primes in increasing order.
    pub fn primes(&self) -> impl DoubleEndedIterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Multiplies the factorization back out.
    pub fn value(&self) -> Result<u64> {
        self.factors.iter().try_fold(1u64, |acc, &(p, e)| {
            p.checked_pow(e)
                .and_then(|pe| acc.checked_mul(pe))
                .ok_or(Error::Overflow("factorization product"))
        })
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: u64, b: u64) -> Result<u64> {
    if a == 0 || b == 0 {
        return Err(Error::InvalidArgument("lcm of zero".into()));
    }
    (a / gcd(a, b)).checked_mul(b).ok_or(Error::Overflow("lcm"))
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn factorize(mut n: u64) -> Factorization {
    assert!(n >= 1, "factorize requires n >= 1");
    let mut factors = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            factors.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        factors.push((n, 1));
    }
    Factorization { factors }
}

/// All positive divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    assert!(n >= 1, "divisors requires n >= 1");
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d != n / d {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn euler_phi(n: u64) -> u64 {
    assert!(n >= 1, "euler_phi requires n >= 1");
    factorize(n)
        .factors()
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

/// The unit group `U_n` as an ascending list; the first entry is always 1.
pub fn units(n: u64) -> Vec<u64> {
    assert!(n >= 2, "units requires n >= 2");
    (1..n).filter(|&k| gcd(k, n) == 1).collect()
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
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

/// Least `x >= 1` with `k^x = 1 (mod n)`.
pub fn mult_order(k: u64, n: u64) -> Result<u64> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "multiplicative order needs modulus >= 2, got {n}"
        )));
    }
    let k = k % n;
    if gcd(k, n) != 1 {
        return Err(Error::NotAUnit(k, n));
    }
    let mut x = 1u64;
    let mut acc = k;
    while acc != 1 {
        acc = mul_mod(acc, k, n);
        x += 1;
    }
    Ok(x)
}
