//! Integer polynomials, cyclotomic polynomials by two independent routes,
//! and companion matrices.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::intmat::IntMatrix;
use crate::numtheory::{divisors, factorize};

/// Dense polynomial over `i64`, `coeffs[i]` is the coefficient of `x^i`.
/// No trailing zeros are stored; the zero polynomial is empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPolynomial {
    coeffs: Vec<i64>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<i64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn zero() -> Self {
        IntPolynomial::default()
    }

    pub fn one() -> Self {
        IntPolynomial::new(vec![1])
    }

    /// `c * x^k`
    pub fn monomial(c: i64, k: usize) -> Self {
        let mut coeffs = vec![0; k + 1];
        coeffs[k] = c;
        IntPolynomial::new(coeffs)
    }

    /// `x^n - 1`
    pub fn x_pow_minus_one(n: usize) -> Self {
        let mut coeffs = vec![0; n + 1];
        coeffs[0] = -1;
        coeffs[n] += 1;
        IntPolynomial::new(coeffs)
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> i64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1
    }

    pub fn coeff(&self, i: usize) -> i64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn add(&self, other: &IntPolynomial) -> Result<IntPolynomial> {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n)
            .map(|i| {
                self.coeff(i)
                    .checked_add(other.coeff(i))
                    .ok_or(Error::Overflow("polynomial sum"))
            })
            .collect::<Result<Vec<_>>>()
            .map(IntPolynomial::new)
    }

    pub fn neg(&self) -> Result<IntPolynomial> {
        self.coeffs
            .iter()
            .map(|c| {
                c.checked_neg()
                    .ok_or(Error::Overflow("polynomial negation"))
            })
            .collect::<Result<Vec<_>>>()
            .map(IntPolynomial::new)
    }

    pub fn sub(&self, other: &IntPolynomial) -> Result<IntPolynomial> {
        self.add(&other.neg()?)
    }

    pub fn mul(&self, other: &IntPolynomial) -> Result<IntPolynomial> {
        if self.is_zero() || other.is_zero() {
            return Ok(IntPolynomial::zero());
        }
        let mut out = vec![0i64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = a
                    .checked_mul(b)
                    .and_then(|p| out[i + j].checked_add(p))
                    .ok_or(Error::Overflow("polynomial product"))?;
            }
        }
        Ok(IntPolynomial::new(out))
    }

    /// Exact quotient `self / divisor`; errors if the remainder is nonzero
    /// or a quotient coefficient would be fractional.
    pub fn divexact(&self, divisor: &IntPolynomial) -> Result<IntPolynomial> {
        let dd = divisor
            .degree()
            .ok_or_else(|| Error::InvalidArgument("division by the zero polynomial".into()))?;
        let Some(nd) = self.degree() else {
            return Ok(IntPolynomial::zero());
        };
        if nd < dd {
            return Err(Error::InexactDivision);
        }
        let lead = divisor.leading();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0i64; nd - dd + 1];
        for shift in (0..=nd - dd).rev() {
            let top = rem[shift + dd];
            if top == 0 {
                continue;
            }
            if top % lead != 0 {
                return Err(Error::InexactDivision);
            }
            let q = top / lead;
            quot[shift] = q;
            for (i, &d) in divisor.coeffs.iter().enumerate() {
                rem[shift + i] = q
                    .checked_mul(d)
                    .and_then(|p| rem[shift + i].checked_sub(p))
                    .ok_or(Error::Overflow("polynomial division"))?;
            }
        }
        if rem.iter().any(|&c| c != 0) {
            return Err(Error::InexactDivision);
        }
        Ok(IntPolynomial::new(quot))
    }

    /// Horner evaluation at a square matrix.
    pub fn eval_matrix(&self, m: &IntMatrix) -> Result<IntMatrix> {
        if !m.is_square() {
            return Err(Error::Shape(
                "polynomial evaluation needs a square matrix".into(),
            ));
        }
        let n = m.rows();
        let mut acc = IntMatrix::zeros(n, n);
        for &c in self.coeffs.iter().rev() {
            acc = acc.mul(m)?.add_scaled_identity(c)?;
        }
        Ok(acc)
    }
}

impl fmt::Display for IntPolynomial {
    /// Ascending degree, e.g. `1 - x + x^2`; unit coefficients are elided
    /// on non-constant terms.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let mag = c.unsigned_abs();
            if first {
                if c < 0 {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c < 0 { " - " } else { " + " })?;
            }
            first = false;
            match (k, mag) {
                (0, _) => write!(f, "{mag}")?,
                (1, 1) => f.write_str("x")?,
                (1, _) => write!(f, "{mag}*x")?,
                (_, 1) => write!(f, "x^{k}")?,
                (_, _) => write!(f, "{mag}*x^{k}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Reduced fraction with positive denominator, `i128` checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Rational {
    num: i128,
    den: i128,
}

fn gcd_i128(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Rational {
    fn from_int(v: i64) -> Self {
        Rational {
            num: v as i128,
            den: 1,
        }
    }

    fn reduced(num: i128, den: i128) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        let g = gcd_i128(num, den).max(1);
        let (mut num, mut den) = (num / g, den / g);
        if den < 0 {
            num = num.checked_neg().ok_or(Error::Overflow("rational"))?;
            den = den.checked_neg().ok_or(Error::Overflow("rational"))?;
        }
        Ok(Rational { num, den })
    }

    fn is_zero(self) -> bool {
        self.num == 0
    }

    fn mul(self, o: Rational) -> Result<Self> {
        let num = self
            .num
            .checked_mul(o.num)
            .ok_or(Error::Overflow("rational"))?;
        let den = self
            .den
            .checked_mul(o.den)
            .ok_or(Error::Overflow("rational"))?;
        Rational::reduced(num, den)
    }

    fn div(self, o: Rational) -> Result<Self> {
        self.mul(Rational::reduced(o.den, o.num)?)
    }

    fn sub(self, o: Rational) -> Result<Self> {
        let l = self.num.checked_mul(o.den);
        let r = o.num.checked_mul(self.den);
        let num = match (l, r) {
            (Some(l), Some(r)) => l.checked_sub(r),
            _ => None,
        }
        .ok_or(Error::Overflow("rational"))?;
        let den = self
            .den
            .checked_mul(o.den)
            .ok_or(Error::Overflow("rational"))?;
        Rational::reduced(num, den)
    }
}

type QPoly = Vec<Rational>;

fn q_trim(mut p: QPoly) -> QPoly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn q_monic(p: QPoly) -> Result<QPoly> {
    let Some(&lead) = p.last() else {
        return Ok(p);
    };
    p.into_iter().map(|c| c.div(lead)).collect()
}

fn q_rem(a: &QPoly, b: &QPoly) -> Result<QPoly> {
    let mut r = a.clone();
    let db = b.len() - 1;
    let lead = b[db];
    while r.len() > db {
        let top = *r.last().expect("nonempty");
        if top.is_zero() {
            r.pop();
            continue;
        }
        let q = top.div(lead)?;
        let shift = r.len() - 1 - db;
        for (i, &c) in b.iter().enumerate() {
            r[shift + i] = r[shift + i].sub(q.mul(c)?)?;
        }
        r = q_trim(r);
    }
    Ok(q_trim(r))
}

/// Monic gcd over the rationals, via the Euclidean algorithm with monic
/// normalization at each step.
fn q_gcd(a: QPoly, b: QPoly) -> Result<QPoly> {
    let (mut a, mut b) = (q_monic(q_trim(a))?, q_monic(q_trim(b))?);
    while !b.is_empty() {
        let r = q_monic(q_rem(&a, &b)?)?;
        a = b;
        b = r;
    }
    Ok(a)
}

/// Primitive integer polynomial with positive leading coefficient that is a
/// rational multiple of `p`.
fn primitive_part(p: &QPoly) -> Result<IntPolynomial> {
    let denom_lcm = p.iter().try_fold(1i128, |acc, c| {
        let g = gcd_i128(acc, c.den);
        (acc / g)
            .checked_mul(c.den)
            .ok_or(Error::Overflow("denominator lcm"))
    })?;
    let scaled: Vec<i128> = p
        .iter()
        .map(|c| {
            (denom_lcm / c.den)
                .checked_mul(c.num)
                .ok_or(Error::Overflow("clearing denominators"))
        })
        .collect::<Result<_>>()?;
    let content = scaled.iter().fold(0i128, |g, &c| gcd_i128(g, c)).max(1);
    let sign = if scaled.last().is_some_and(|&c| c < 0) {
        -1
    } else {
        1
    };
    let coeffs = scaled
        .into_iter()
        .map(|c| i64::try_from(sign * c / content).map_err(|_| Error::Overflow("coefficient")))
        .collect::<Result<Vec<_>>>()?;
    Ok(IntPolynomial::new(coeffs))
}

fn to_q(p: &IntPolynomial) -> QPoly {
    p.coeffs().iter().map(|&c| Rational::from_int(c)).collect()
}

/// `Q_i(x) = Σ_{j < p_i} x^{n j / p_i}` where `p_1 > p_2 > ...` are the
/// distinct primes of `n`; `i` is 1-based.
pub fn q_polynomial(n: u64, i: usize) -> Result<IntPolynomial> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("Q_i needs n >= 2, got {n}")));
    }
    let primes: Vec<u64> = factorize(n).primes().rev().collect();
    let p = *i
        .checked_sub(1)
        .and_then(|idx| primes.get(idx))
        .ok_or_else(|| {
            Error::InvalidArgument(format!(
                "index {i} out of range: {n} has {} distinct primes",
                primes.len()
            ))
        })?;
    let step = usize::try_from(n / p).map_err(|_| Error::Overflow("degree"))?;
    let mut coeffs = vec![0i64; step * (p as usize - 1) + 1];
    for j in 0..p as usize {
        coeffs[j * step] = 1;
    }
    Ok(IntPolynomial::new(coeffs))
}

/// Number of distinct primes of `n`, i.e. the range of `i` in `q_polynomial`.
pub fn q_count(n: u64) -> usize {
    factorize(n).factors().len()
}

/// `Φ_n` as the common divisor of all `Q_i`.
pub fn cyclotomic_via_gcd(n: u64) -> Result<IntPolynomial> {
    if n < 2 {
        return Err(Error::InvalidArgument(
            "the gcd route needs n >= 2; use the division route for n = 1".into(),
        ));
    }
    let mut acc: Option<QPoly> = None;
    for i in 1..=q_count(n) {
        let q = to_q(&q_polynomial(n, i)?);
        acc = Some(match acc {
            None => q_monic(q)?,
            Some(g) => q_gcd(g, q)?,
        });
    }
    primitive_part(&acc.expect("n >= 2 has a prime factor"))
}

/// `Φ_n = (x^n - 1) / Π_{d | n, d < n} Φ_d`, built bottom-up over the
/// divisors of `n`.
pub fn cyclotomic_via_division(n: u64) -> Result<IntPolynomial> {
    if n < 1 {
        return Err(Error::InvalidArgument(
            "cyclotomic index must be >= 1".into(),
        ));
    }
    let mut table: BTreeMap<u64, IntPolynomial> = BTreeMap::new();
    for d in divisors(n) {
        let mut denom = IntPolynomial::one();
        for e in divisors(d) {
            if e < d {
                denom = denom.mul(&table[&e])?;
            }
        }
        let deg = usize::try_from(d).map_err(|_| Error::Overflow("degree"))?;
        let phi = IntPolynomial::x_pow_minus_one(deg).divexact(&denom)?;
        table.insert(d, phi);
    }
    Ok(table.remove(&n).expect("n divides itself"))
}

/// Companion matrix: ones on the superdiagonal, last row holds the negated
/// non-leading coefficients.
pub fn companion_matrix(poly: &IntPolynomial) -> Result<IntMatrix> {
    let m = match poly.degree() {
        Some(d) if d >= 1 => d,
        _ => {
            return Err(Error::InvalidArgument(
                "companion matrix needs degree >= 1".into(),
            ))
        }
    };
    if !poly.is_monic() {
        return Err(Error::InvalidArgument(format!("{poly} is not monic")));
    }
    let mut c = IntMatrix::zeros(m, m);
    for i in 0..m - 1 {
        c.set(i, i + 1, 1);
    }
    for j in 0..m {
        let v = poly
            .coeff(j)
            .checked_neg()
            .ok_or(Error::Overflow("companion row"))?;
        c.set(m - 1, j, v);
    }
    Ok(c)
}
