//! Finite case: which bijections of an `n`-element set are automorphisms of
//! `Z_n`, or of `Z_p x Z_p` when `n = p^2`, and explicit witnesses for them.
//!
//! Points of `Z_p x Z_p` are indexed as `x + p*y` for the vector `(x, y)`.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numtheory::{divisors, euler_phi, gcd, is_prime, lcm, mul_mod, mult_order, units};
use crate::structures::{structure_of, CycleStructure, Permutation};

/// Largest prime accepted by the `GL_2` oracle.
pub const GL2_ORACLE_MAX_P: u64 = 13;

/// Largest prime accepted for `Z_p x Z_p` realization and enumeration.
pub const P2_MAX_P: u64 = 1000;

/// Default cost budget (elementary steps) for the `GL_n` oracle.
pub const DEFAULT_ORACLE_BUDGET: u64 = 10_000_000;

fn as_u64(n: usize) -> u64 {
    n as u64
}

fn require_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

fn require_unit(n: u64, k: u64) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "modulus must be >= 2, got {n}"
        )));
    }
    if gcd(k % n, n) != 1 {
        return Err(Error::NotAUnit(k, n));
    }
    Ok(())
}

/// Cycle structure of `x -> k x` on `Z_n` by the counting formula:
/// `[U_n : <k>]` cycles of length `ord_n(k)` from the units, and each
/// nonzero non-unit `z` lies on a cycle of length `ord_{n/gcd(z,n)}(k)`.
pub fn cyclic_structure_for_unit(n: u64, k: u64) -> Result<CycleStructure> {
    require_unit(n, k)?;
    let k = k % n;
    let ell = mult_order(k, n)?;
    let mut points_by_length: HashMap<u64, u64> = HashMap::new();
    let mut order_mod: HashMap<u64, u64> = HashMap::new();
    for z in 1..n {
        let g = gcd(z, n);
        if g == 1 {
            continue;
        }
        let z_prime = n / g;
        let lambda = match order_mod.get(&z_prime) {
            Some(&o) => o,
            None => {
                let o = mult_order(k, z_prime)?;
                order_mod.insert(z_prime, o);
                o
            }
        };
        *points_by_length.entry(lambda).or_default() += 1;
    }
    let mut rows = vec![((ell) as usize, (euler_phi(n) / ell) as usize), (1, 1)];
    for (lambda, points) in points_by_length {
        debug_assert_eq!(points % lambda, 0);
        rows.push((lambda as usize, (points / lambda) as usize));
    }
    Ok(CycleStructure::canonicalize(rows))
}

/// The same structure, computed by building `x -> k x mod n` explicitly.
pub fn cyclic_structure_oracle(n: u64, k: u64) -> Result<CycleStructure> {
    require_unit(n, k)?;
    let perm = Permutation::from_fn(n as usize, |x| mul_mod(x as u64, k, n) as usize)?;
    Ok(structure_of(&perm))
}

pub fn cyclic_structures(n: u64) -> Result<BTreeSet<CycleStructure>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("n must be >= 2, got {n}")));
    }
    units(n)
        .into_iter()
        .map(|k| cyclic_structure_for_unit(n, k))
        .collect()
}

/// Smallest unit `k` whose multiplication map on `Z_n` has the same cycle
/// structure as `perm`.
pub fn check_cyclic(perm: &Permutation) -> Option<u64> {
    let n = as_u64(perm.len());
    if n == 1 {
        return Some(1);
    }
    let target = structure_of(perm);
    units(n)
        .into_iter()
        .find(|&k| cyclic_structure_for_unit(n, k).is_ok_and(|s| s == target))
}

/// `labeling[a]` is the element of `Z_n` that point `a` is identified with;
/// the identification turns `perm` into `x -> multiplier * x`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CyclicWitness {
    pub modulus: u64,
    pub multiplier: u64,
    pub labeling: Vec<u64>,
}

impl CyclicWitness {
    /// Checks `labeling` is a bijection onto `Z_n` and
    /// `labeling(f(a)) = k * labeling(a)` for every point `a`.
    pub fn verify(&self, perm: &Permutation) -> bool {
        let n = self.modulus;
        if self.labeling.len() != perm.len() || as_u64(perm.len()) != n {
            return false;
        }
        if n > 1 && gcd(self.multiplier % n, n) != 1 {
            return false;
        }
        let mut hit = vec![false; perm.len()];
        for &l in &self.labeling {
            if l >= n || std::mem::replace(&mut hit[l as usize], true) {
                return false;
            }
        }
        (0..perm.len())
            .all(|a| self.labeling[perm.apply(a)] == mul_mod(self.multiplier, self.labeling[a], n))
    }
}

/// Pairs the orbits of `perm` with those of `model` (positionally, in
/// matching order) and maps `perm`'s orbit `(a_0, a_1, ...)` onto the model
/// orbit `(z, g z, ...)`. Returns `labeling[a] = model point`.
fn match_cycles(perm: &Permutation, model: &Permutation) -> Result<Vec<usize>> {
    let ours = perm.cycles_for_matching();
    let theirs = model.cycles_for_matching();
    if ours.len() != theirs.len() {
        return Err(Error::NotRealizable("cycle structures differ".into()));
    }
    let mut labeling = vec![usize::MAX; perm.len()];
    for (a, z) in ours.iter().zip(&theirs) {
        if a.len() != z.len() {
            return Err(Error::NotRealizable("cycle structures differ".into()));
        }
        for (&pa, &pz) in a.iter().zip(z) {
            labeling[pa] = pz;
        }
    }
    Ok(labeling)
}

pub fn realize_cyclic(perm: &Permutation) -> Result<CyclicWitness> {
    let n = as_u64(perm.len());
    let k = check_cyclic(perm).ok_or_else(|| {
        Error::NotRealizable(format!(
            "no unit of Z_{n} acts with cycle structure {}",
            structure_of(perm)
        ))
    })?;
    let model = Permutation::from_fn(perm.len(), |x| mul_mod(x as u64, k, n.max(1)) as usize)?;
    let labeling = match_cycles(perm, &model)?
        .into_iter()
        .map(as_u64)
        .collect();
    let witness = CyclicWitness {
        modulus: n,
        multiplier: k,
        labeling,
    };
    if !witness.verify(perm) {
        return Err(Error::Verification("cyclic witness".into()));
    }
    Ok(witness)
}

/// Invertible 2x2 matrix over `F_p`, acting on column vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct FpMatrix2 {
    pub p: u64,
    pub entries: [[u64; 2]; 2],
}

impl FpMatrix2 {
    pub fn new(p: u64, entries: [[u64; 2]; 2]) -> Result<Self> {
        require_prime(p)?;
        let entries = entries.map(|row| row.map(|v| v % p));
        let m = FpMatrix2 { p, entries };
        if m.det() == 0 {
            return Err(Error::InvalidArgument(format!(
                "matrix {entries:?} is singular mod {p}"
            )));
        }
        Ok(m)
    }

    pub fn identity(p: u64) -> Self {
        FpMatrix2 {
            p,
            entries: [[1, 0], [0, 1]],
        }
    }

    pub fn det(&self) -> u64 {
        let [[a, b], [c, d]] = self.entries;
        let p = self.p;
        (mul_mod(a, d, p) + p - mul_mod(b, c, p)) % p
    }

    pub fn apply(&self, (x, y): (u64, u64)) -> (u64, u64) {
        let [[a, b], [c, d]] = self.entries;
        let p = self.p;
        (
            (mul_mod(a, x, p) + mul_mod(b, y, p)) % p,
            (mul_mod(c, x, p) + mul_mod(d, y, p)) % p,
        )
    }

    pub fn mul(&self, other: &FpMatrix2) -> FpMatrix2 {
        let p = self.p;
        let a = self.entries;
        let b = other.entries;
        let mut out = [[0u64; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (mul_mod(a[i][0], b[0][j], p) + mul_mod(a[i][1], b[1][j], p)) % p;
            }
        }
        FpMatrix2 { p, entries: out }
    }

    pub fn inverse(&self) -> FpMatrix2 {
        let p = self.p;
        let [[a, b], [c, d]] = self.entries;
        let inv_det = inverse_mod_prime(self.det(), p);
        let neg = |v: u64| (p - v % p) % p;
        FpMatrix2 {
            p,
            entries: [
                [mul_mod(d, inv_det, p), mul_mod(neg(b), inv_det, p)],
                [mul_mod(neg(c), inv_det, p), mul_mod(a, inv_det, p)],
            ],
        }
    }

    /// The action on the `p^2` points `x + p*y`.
    pub fn as_permutation(&self) -> Permutation {
        let p = self.p;
        Permutation::from_fn((p * p) as usize, |i| {
            let (x, y) = self.apply(index_to_vector(i, p));
            (x + p * y) as usize
        })
        .expect("invertible matrices act bijectively")
    }
}

fn index_to_vector(i: usize, p: u64) -> (u64, u64) {
    let i = i as u64;
    (i % p, i / p)
}

fn inverse_mod_prime(a: u64, p: u64) -> u64 {
    crate::numtheory::pow_mod(a, p - 2, p)
}

fn pow_mod_p(a: u64, e: u64, p: u64) -> u64 {
    crate::numtheory::pow_mod(a, e, p)
}

/// Closed-form enumeration over the three rational canonical form families.
pub fn p2_structures(p: u64) -> Result<BTreeSet<CycleStructure>> {
    require_prime(p)?;
    if p > P2_MAX_P {
        return Err(Error::InvalidArgument(format!(
            "p = {p} exceeds limit {P2_MAX_P}"
        )));
    }
    Ok(p2_families(p).into_iter().map(|(s, _)| s).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum P2Family {
    /// Element of order `d` in `F_{p^2}^*`, `d | p^2-1`, `d ∤ p-1`.
    Irreducible(u64),
    /// Jordan block `[[a, 1], [0, a]]` with `ord(a) = d`.
    Jordan(u64),
    /// `diag(a1, a2)` with orders `d1 <= d2`.
    Diagonal(u64, u64),
}

fn p2_families(p: u64) -> Vec<(CycleStructure, P2Family)> {
    let ps = (p - 1) as usize;
    let psq = (p * p - 1) as usize;
    let mut out = Vec::new();
    let dp = divisors(p - 1);
    for &d1 in &dp {
        for &d2 in dp.iter().filter(|&&d2| d2 >= d1) {
            let l = lcm(d1, d2).expect("small") as usize;
            let (d1u, d2u) = (d1 as usize, d2 as usize);
            let s = CycleStructure::canonicalize([
                (l, ps * ps / l),
                (d1u, ps / d1u),
                (d2u, ps / d2u),
                (1, 1),
            ]);
            out.push((s, P2Family::Diagonal(d1, d2)));
        }
    }
    for &d in &dp {
        let du = d as usize;
        let s = CycleStructure::canonicalize([(p as usize * du, ps / du), (du, ps / du), (1, 1)]);
        out.push((s, P2Family::Jordan(d)));
    }
    for d in divisors(p * p - 1) {
        let du = d as usize;
        let s = CycleStructure::canonicalize([(du, psq / du), (1, 1)]);
        // d | p-1 is already produced by the diagonal family with d1 = d2 = d.
        if !(p - 1).is_multiple_of(d) {
            out.push((s, P2Family::Irreducible(d)));
        }
    }
    out
}

/// Brute force: every invertible 2x2 matrix over `F_p`, acting on `p^2` points.
pub fn gl2_oracle(p: u64) -> Result<BTreeSet<CycleStructure>> {
    require_prime(p)?;
    if p > GL2_ORACLE_MAX_P {
        return Err(Error::InvalidArgument(format!(
            "GL_2 oracle is limited to p <= {GL2_ORACLE_MAX_P}, got {p}"
        )));
    }
    let mut out = BTreeSet::new();
    for a in 0..p {
        for b in 0..p {
            for c in 0..p {
                for d in 0..p {
                    if let Ok(m) = FpMatrix2::new(p, [[a, b], [c, d]]) {
                        out.insert(structure_of(&m.as_permutation()));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Brute force over all `n x n` matrices over `F_p`; singular ones are
/// skipped. Cost is estimated as `p^(n^2) * p^n` and checked against `budget`.
pub fn gln_oracle(p: u64, n: usize, budget: u64) -> Result<BTreeSet<CycleStructure>> {
    require_prime(p)?;
    if n == 0 {
        return Err(Error::InvalidArgument("dimension must be >= 1".into()));
    }
    let cost = (p as u128)
        .checked_pow((n * n + n) as u32)
        .unwrap_or(u128::MAX);
    if cost > budget as u128 {
        return Err(Error::BudgetExceeded { cost, budget });
    }
    let points = p.pow(n as u32) as usize;
    let candidates = p.pow((n * n) as u32);
    let vectors: Vec<Vec<u64>> = (0..points).map(|i| digits(i as u64, p, n)).collect();
    let mut out = BTreeSet::new();
    for code in 0..candidates {
        let m: Vec<u64> = digits(code, p, n * n);
        if rank_mod_p(&m, n, p) < n {
            continue;
        }
        let perm = Permutation::from_fn(points, |i| {
            let v = &vectors[i];
            let mut idx = 0u64;
            for r in (0..n).rev() {
                let s = (0..n).fold(0u64, |acc, c| (acc + m[r * n + c] * v[c]) % p);
                idx = idx * p + s;
            }
            idx as usize
        })?;
        out.insert(structure_of(&perm));
    }
    Ok(out)
}

/// Base-`p` digits of `v`, least significant first.
fn digits(mut v: u64, p: u64, len: usize) -> Vec<u64> {
    (0..len)
        .map(|_| {
            let d = v % p;
            v /= p;
            d
        })
        .collect()
}

fn rank_mod_p(m: &[u64], n: usize, p: u64) -> usize {
    let mut a: Vec<Vec<u64>> = (0..n).map(|r| m[r * n..(r + 1) * n].to_vec()).collect();
    let mut rank = 0;
    for col in 0..n {
        let Some(piv) = (rank..n).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(rank, piv);
        let inv = inverse_mod_prime(a[rank][col], p);
        for r in 0..n {
            if r != rank && a[r][col] != 0 {
                let f = mul_mod(a[r][col], inv, p);
                let pivot_row = a[rank].clone();
                for (x, &y) in a[r].iter_mut().zip(&pivot_row) {
                    *x = (*x + p - mul_mod(f, y, p)) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn require_p2_domain(perm: &Permutation, p: u64) -> Result<()> {
    require_prime(p)?;
    if p > P2_MAX_P {
        return Err(Error::InvalidArgument(format!(
            "p = {p} exceeds limit {P2_MAX_P}"
        )));
    }
    if as_u64(perm.len()) != p * p {
        return Err(Error::InvalidArgument(format!(
            "permutation has {} points, expected p^2 = {}",
            perm.len(),
            p * p
        )));
    }
    Ok(())
}

/// Auto-property on `p^2` points: the cyclic structures are contained in
/// the `Z_p x Z_p` ones, so membership in the latter decides it.
pub fn check_auto_p2(perm: &Permutation, p: u64) -> Result<bool> {
    require_p2_domain(perm, p)?;
    Ok(p2_structures(p)?.contains(&structure_of(perm)))
}

/// Smallest element of `F_p^*` of order `p - 1`.
pub fn primitive_root(p: u64) -> Result<u64> {
    require_prime(p)?;
    if p == 2 {
        return Ok(1);
    }
    (2..p)
        .find(|&g| mult_order(g, p) == Ok(p - 1))
        .ok_or(Error::Verification(format!("no primitive root mod {p}")))
}

/// Lexicographically smallest monic irreducible `x^2 + b x + c` over `F_p`,
/// returned as `(b, c)`.
pub fn irreducible_quadratic(p: u64) -> Result<(u64, u64)> {
    require_prime(p)?;
    for b in 0..p {
        for c in 0..p {
            let has_root =
                (0..p).any(|x| (mul_mod(x, x, p) + mul_mod(b, x, p) + c).is_multiple_of(p));
            if !has_root {
                return Ok((b, c));
            }
        }
    }
    Err(Error::Verification(format!(
        "no irreducible quadratic mod {p}"
    )))
}

/// `F_{p^2} = F_p[x] / (x^2 + b x + c)`, elements `u + v x` stored as `(u, v)`.
#[derive(Debug, Clone, Copy)]
struct QuadraticField {
    p: u64,
    b: u64,
    c: u64,
}

impl QuadraticField {
    fn mul(&self, (u1, v1): (u64, u64), (u2, v2): (u64, u64)) -> (u64, u64) {
        let p = self.p;
        // x^2 = -b x - c
        let vv = mul_mod(v1, v2, p);
        let u = (mul_mod(u1, u2, p) + p - mul_mod(vv, self.c, p)) % p;
        let v = (mul_mod(u1, v2, p) + mul_mod(v1, u2, p) + p - mul_mod(vv, self.b, p)) % p;
        (u, v)
    }

    fn pow(&self, mut base: (u64, u64), mut e: u64) -> (u64, u64) {
        let mut acc = (1, 0);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    fn order(&self, g: (u64, u64)) -> u64 {
        let mut acc = g;
        let mut k = 1;
        while acc != (1, 0) {
            acc = self.mul(acc, g);
            k += 1;
        }
        k
    }

    /// Smallest generator of the multiplicative group, by index `u + p v`.
    fn generator(&self) -> (u64, u64) {
        let target = self.p * self.p - 1;
        (1..self.p * self.p)
            .map(|i| (i % self.p, i / self.p))
            .find(|&g| self.order(g) == target)
            .expect("finite field multiplicative groups are cyclic")
    }

    /// Matrix of multiplication by `u + v x` in the basis `{1, x}`.
    fn multiplication_matrix(&self, (u, v): (u64, u64)) -> [[u64; 2]; 2] {
        let p = self.p;
        [
            [u, (p - mul_mod(self.c, v, p)) % p],
            [v, (u + p - mul_mod(self.b, v, p)) % p],
        ]
    }
}

/// A matrix over `F_p` whose action on `Z_p x Z_p` has cycle structure `cs`,
/// chosen from the Jordan-form family that produces `cs`.
pub fn p2_matrix_for_structure(p: u64, cs: &CycleStructure) -> Result<FpMatrix2> {
    require_prime(p)?;
    if p > P2_MAX_P {
        return Err(Error::InvalidArgument(format!(
            "p = {p} exceeds limit {P2_MAX_P}"
        )));
    }
    let family = p2_families(p)
        .into_iter()
        .find(|(s, _)| s == cs)
        .map(|(_, f)| f)
        .ok_or_else(|| {
            Error::NotRealizable(format!(
                "{cs} is not the cycle structure of any element of GL_2(F_{p})"
            ))
        })?;
    let matrix = match family {
        P2Family::Diagonal(d1, d2) => {
            let g = primitive_root(p)?;
            let a1 = pow_mod_p(g, (p - 1) / d1, p);
            let a2 = pow_mod_p(g, (p - 1) / d2, p);
            FpMatrix2::new(p, [[a1, 0], [0, a2]])?
        }
        P2Family::Jordan(d) => {
            let g = primitive_root(p)?;
            let a = pow_mod_p(g, (p - 1) / d, p);
            FpMatrix2::new(p, [[a, 1], [0, a]])?
        }
        P2Family::Irreducible(d) => {
            let (b, c) = irreducible_quadratic(p)?;
            let field = QuadraticField { p, b, c };
            let beta = field.pow(field.generator(), (p * p - 1) / d);
            FpMatrix2::new(p, field.multiplication_matrix(beta))?
        }
    };
    if structure_of(&matrix.as_permutation()) != *cs {
        return Err(Error::Verification(format!(
            "constructed matrix {:?} does not have structure {cs}",
            matrix.entries
        )));
    }
    Ok(matrix)
}

/// `labeling[a]` is the vector of `Z_p x Z_p` identified with point `a`;
/// under it `perm` becomes `v -> matrix * v`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct P2Witness {
    pub p: u64,
    pub matrix: FpMatrix2,
    pub labeling: Vec<(u64, u64)>,
}

impl P2Witness {
    pub fn verify(&self, perm: &Permutation) -> bool {
        let p = self.p;
        if as_u64(perm.len()) != p * p || self.labeling.len() != perm.len() || self.matrix.p != p {
            return false;
        }
        let mut hit = vec![false; perm.len()];
        for &(x, y) in &self.labeling {
            if x >= p || y >= p || std::mem::replace(&mut hit[(x + p * y) as usize], true) {
                return false;
            }
        }
        (0..perm.len()).all(|a| self.labeling[perm.apply(a)] == self.matrix.apply(self.labeling[a]))
    }
}

pub fn realize_p2(perm: &Permutation, p: u64) -> Result<P2Witness> {
    if !check_auto_p2(perm, p)? {
        return Err(Error::NotRealizable(format!(
            "{} is not the cycle structure of an automorphism of Z_{p} x Z_{p}",
            structure_of(perm)
        )));
    }
    let matrix = p2_matrix_for_structure(p, &structure_of(perm))?;
    let labeling = match_cycles(perm, &matrix.as_permutation())?
        .into_iter()
        .map(|i| index_to_vector(i, p))
        .collect();
    let witness = P2Witness {
        p,
        matrix,
        labeling,
    };
    if !witness.verify(perm) {
        return Err(Error::Verification("Z_p x Z_p witness".into()));
    }
    Ok(witness)
}
