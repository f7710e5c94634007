//! Countably infinite case: deciding whether a structure descriptor is the
//! structure of an automorphism of some `Z^m`, and building a unimodular
//! matrix that realizes it.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::intmat::IntMatrix;
use crate::numtheory::{divisors, euler_phi, lcm};
use crate::poly::{companion_matrix, cyclotomic_via_gcd};
use crate::structures::ZStructureDescriptor;

/// Smallest superset of `lengths` closed under pairwise lcm.
pub fn lcm_closure(lengths: &BTreeSet<u64>) -> Result<BTreeSet<u64>> {
    let mut closed = lengths.clone();
    loop {
        let mut added = Vec::new();
        for &a in &closed {
            for &b in closed.range(a..) {
                let l = lcm(a, b)?;
                if !closed.contains(&l) {
                    added.push(l);
                }
            }
        }
        if added.is_empty() {
            return Ok(closed);
        }
        closed.extend(added);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// Condition 5: cycles of lengths `a` and `b` force one of length `lcm`.
    MissingLcm { a: u64, b: u64, lcm: u64 },
    /// No non-zero cycles and no chains: the set would be a single point.
    NotCountablyInfinite,
}

impl Violation {
    pub fn condition(&self) -> Option<u8> {
        match self {
            Violation::MissingLcm { .. } => Some(5),
            Violation::NotCountablyInfinite => None,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingLcm { a, b, lcm } => write!(
                f,
                "condition 5 violated: missing {lcm} (lcm of {a} and {b})"
            ),
            Violation::NotCountablyInfinite => {
                f.write_str("not countably infinite: no non-zero cycles and no chains")
            }
        }
    }
}

/// Conditions 1 to 4 hold by construction of the descriptor; this checks
/// lcm closure and that the underlying set is infinite.
pub fn validate_descriptor(d: &ZStructureDescriptor) -> std::result::Result<(), Vec<Violation>> {
    let mut violations = Vec::new();
    if d.lengths.is_empty() && !d.has_chains {
        violations.push(Violation::NotCountablyInfinite);
    }
    for &a in &d.lengths {
        for &b in d.lengths.range(a..) {
            // An lcm beyond u64 can never be listed.
            let l = lcm(a, b).unwrap_or(u64::MAX);
            if !d.lengths.contains(&l) {
                violations.push(Violation::MissingLcm { a, b, lcm: l });
            }
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// `P_n`: the companion matrix of `Φ_n` for `n >= 2`, `[[1]]` for `n = 1`.
pub fn pure_cycle_matrix(n: u64) -> Result<IntMatrix> {
    match n {
        0 => Err(Error::InvalidArgument("cycle length must be >= 1".into())),
        1 => Ok(IntMatrix::identity(1)),
        _ => companion_matrix(&cyclotomic_via_gcd(n)?),
    }
}

/// Certificate that every nonzero integer vector has orbit length exactly
/// `n`: `M^n = I`, and `M^d - I` is nonsingular for each proper divisor `d`.
pub fn verify_pure_cycle(m: &IntMatrix, n: u64) -> Result<bool> {
    if !m.is_square() {
        return Err(Error::Shape(
            "verify_pure_cycle needs a square matrix".into(),
        ));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("cycle length must be >= 1".into()));
    }
    let id = IntMatrix::identity(m.rows());
    if m.pow(n)? != id {
        return Ok(false);
    }
    for d in divisors(n) {
        if d < n && m.pow(d)?.sub(&id)?.det()? == 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn chain_block() -> IntMatrix {
    IntMatrix::from_rows(&[vec![1, 1], vec![1, 0]]).expect("2x2")
}

/// Finite-horizon certificate that `M` has no non-zero cycles of length
/// up to `horizon`: `det(M^k - I) != 0` for `1 <= k <= horizon`.
pub fn verify_chain_block(m: &IntMatrix, horizon: u64) -> Result<bool> {
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be >= 1".into()));
    }
    let id = IntMatrix::identity(m.rows());
    let mut power = id.clone();
    for _ in 0..horizon {
        power = power.mul(m)?;
        if power.sub(&id)?.det()? == 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockLabel {
    Cycle(u64),
    Chain,
}

impl fmt::Display for BlockLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockLabel::Cycle(n) => write!(f, "{n}"),
            BlockLabel::Chain => f.write_str("chain"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub label: BlockLabel,
    pub offset: usize,
    pub size: usize,
}

impl Serialize for Block {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Block", 3)?;
        st.serialize_field("label", &self.label.to_string())?;
        st.serialize_field("offset", &self.offset)?;
        st.serialize_field("size", &self.size)?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZnRealization {
    pub descriptor: ZStructureDescriptor,
    pub matrix: IntMatrix,
    pub blocks: Vec<Block>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orbit {
    Cycle(u64),
    Chain,
}

impl fmt::Display for Orbit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Orbit::Cycle(n) => write!(f, "cycle of length {n}"),
            Orbit::Chain => f.write_str("chain"),
        }
    }
}

/// Orbit type of `v` under `M`, given that every cycle length of `M`
/// divides `lcm(lengths)`.
pub fn classify_vector(m: &IntMatrix, v: &[i64], lengths: &BTreeSet<u64>) -> Result<Orbit> {
    if v.len() != m.cols() || !m.is_square() {
        return Err(Error::Shape(format!(
            "vector of length {} against {}x{} matrix",
            v.len(),
            m.rows(),
            m.cols()
        )));
    }
    let ell = lengths.iter().try_fold(1u64, |acc, &l| lcm(acc, l))?;
    let mut x = v.to_vec();
    for step in 1..=ell {
        x = m.mul_vec(&x)?;
        if x == v {
            return Ok(Orbit::Cycle(step));
        }
    }
    Ok(Orbit::Chain)
}

fn basis_vector(dim: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; dim];
    v[i] = 1;
    v
}

/// Chain certificate horizon used by [`build_automorphism`].
pub fn chain_horizon(lengths: &BTreeSet<u64>) -> u64 {
    2 * lengths.iter().copied().chain([16]).max().expect("nonempty")
}

/// Block-diagonal `P_{n_1}, ..., P_{n_s}` (ascending `n_i`), followed by the
/// chain block when the descriptor has chains. The result is checked:
/// unimodular, each block's first basis vector has the block's cycle
/// length, and the chain block passes its certificate.
pub fn build_automorphism(d: &ZStructureDescriptor) -> Result<ZnRealization> {
    if let Err(v) = validate_descriptor(d) {
        let msgs: Vec<String> = v.iter().map(ToString::to_string).collect();
        return Err(Error::NotRealizable(msgs.join("; ")));
    }
    let mut mats = Vec::new();
    let mut blocks = Vec::new();
    let mut offset = 0;
    for &n in &d.lengths {
        let p = pure_cycle_matrix(n)?;
        debug_assert_eq!(p.rows() as u64, euler_phi(n));
        if !verify_pure_cycle(&p, n)? {
            return Err(Error::Verification(format!("P_{n} is not pure {n}-cyclic")));
        }
        blocks.push(Block {
            label: BlockLabel::Cycle(n),
            offset,
            size: p.rows(),
        });
        offset += p.rows();
        mats.push(p);
    }
    if d.has_chains {
        let c = chain_block();
        if !verify_chain_block(&c, chain_horizon(&d.lengths))? {
            return Err(Error::Verification("chain block has a short cycle".into()));
        }
        blocks.push(Block {
            label: BlockLabel::Chain,
            offset,
            size: c.rows(),
        });
        offset += c.rows();
        mats.push(c);
    }
    let matrix = IntMatrix::block_diag(&mats)?;
    debug_assert_eq!(matrix.rows(), offset);
    if !matrix.is_unimodular()? {
        return Err(Error::Verification(
            "assembled matrix is not unimodular".into(),
        ));
    }
    for b in &blocks {
        let got = classify_vector(&matrix, &basis_vector(offset, b.offset), &d.lengths)?;
        let want = match b.label {
            BlockLabel::Cycle(n) => Orbit::Cycle(n),
            BlockLabel::Chain => Orbit::Chain,
        };
        if got != want {
            return Err(Error::Verification(format!(
                "basis vector at offset {} is a {got}, expected {want}",
                b.offset
            )));
        }
    }
    Ok(ZnRealization {
        descriptor: d.clone(),
        matrix,
        blocks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lens(v: &[u64]) -> BTreeSet<u64> {
        v.iter().copied().collect()
    }

    fn desc(v: &[u64], chains: bool) -> ZStructureDescriptor {
        ZStructureDescriptor::new(v.iter().copied(), chains).unwrap()
    }

    #[test]
    fn closure_examples() {
        assert_eq!(lcm_closure(&lens(&[6, 15])).unwrap(), lens(&[6, 15, 30]));
        assert_eq!(lcm_closure(&lens(&[7])).unwrap(), lens(&[7]));
        assert_eq!(
            lcm_closure(&lens(&[2, 3, 5])).unwrap(),
            lens(&[2, 3, 5, 6, 10, 15, 30])
        );
    }

    #[test]
    fn validation() {
        assert_eq!(validate_descriptor(&desc(&[6, 15, 30], true)), Ok(()));
        assert_eq!(
            validate_descriptor(&desc(&[6, 15], true)),
            Err(vec![Violation::MissingLcm {
                a: 6,
                b: 15,
                lcm: 30
            }])
        );
        assert_eq!(
            validate_descriptor(&desc(&[], false)),
            Err(vec![Violation::NotCountablyInfinite])
        );
        assert_eq!(validate_descriptor(&desc(&[], true)), Ok(()));
        assert_eq!(
            Violation::MissingLcm {
                a: 6,
                b: 15,
                lcm: 30
            }
            .to_string(),
            "condition 5 violated: missing 30 (lcm of 6 and 15)"
        );
    }

    #[test]
    fn pure_cycle_examples() {
        assert_eq!(pure_cycle_matrix(1).unwrap(), IntMatrix::identity(1));
        assert_eq!(
            pure_cycle_matrix(6).unwrap().to_rows(),
            vec![vec![0, 1], vec![-1, 1]]
        );
        let p30 = pure_cycle_matrix(30).unwrap();
        assert_eq!(p30.rows(), 8);
        assert_eq!(p30.row(7), &[-1, -1, 0, 1, 1, 1, 0, -1]);
        assert_eq!(pure_cycle_matrix(2).unwrap().to_rows(), vec![vec![-1]]);
    }

    #[test]
    fn pure_cycle_certificates() {
        let p6 = pure_cycle_matrix(6).unwrap();
        assert!(verify_pure_cycle(&p6, 6).unwrap());
        assert!(verify_pure_cycle(&IntMatrix::identity(3), 1).unwrap());
        assert!(!verify_pure_cycle(&p6, 3).unwrap());
        // I + M^3 = 0
        assert!(p6.pow(3).unwrap().add_scaled_identity(1).unwrap().is_zero());
        // diag(P_2, P_3) has orbits of length 2, 3 and 6.
        let mixed =
            IntMatrix::block_diag(&[pure_cycle_matrix(2).unwrap(), pure_cycle_matrix(3).unwrap()])
                .unwrap();
        assert!(!verify_pure_cycle(&mixed, 6).unwrap());
    }

    #[test]
    fn pure_cycle_for_all_small_n() {
        for n in 1..=100 {
            let p = pure_cycle_matrix(n).unwrap();
            assert_eq!(p.rows() as u64, euler_phi(n));
            assert!(p.is_unimodular().unwrap(), "n = {n}");
            assert!(verify_pure_cycle(&p, n).unwrap(), "n = {n}");
        }
    }

    #[test]
    fn chain_certificates() {
        assert!(verify_chain_block(&chain_block(), 30).unwrap());
        assert!(!verify_chain_block(&IntMatrix::identity(2), 1).unwrap());
        assert!(!verify_chain_block(&pure_cycle_matrix(6).unwrap(), 6).unwrap());
        assert!(verify_chain_block(&chain_block(), 90).unwrap());
        assert!(verify_chain_block(&chain_block(), 200).is_err());
    }

    #[test]
    fn example_build() {
        let r = build_automorphism(&desc(&[6, 15, 30], true)).unwrap();
        assert_eq!(r.matrix.rows(), 20);
        let layout: Vec<(String, usize, usize)> = r
            .blocks
            .iter()
            .map(|b| (b.label.to_string(), b.offset, b.size))
            .collect();
        assert_eq!(
            layout,
            vec![
                ("6".into(), 0, 2),
                ("15".into(), 2, 8),
                ("30".into(), 10, 8),
                ("chain".into(), 18, 2)
            ]
        );
        assert_eq!(
            build_automorphism(&desc(&[1], false)).unwrap().matrix,
            IntMatrix::identity(1)
        );
        let two = build_automorphism(&desc(&[2], false)).unwrap();
        assert_eq!(two.matrix.to_rows(), vec![vec![-1]]);
        assert!(verify_pure_cycle(&two.matrix, 2).unwrap());
        assert!(matches!(
            build_automorphism(&desc(&[6, 15], true)),
            Err(Error::NotRealizable(_))
        ));
        let chains_only = build_automorphism(&desc(&[], true)).unwrap();
        assert_eq!(chains_only.matrix, chain_block());
    }

    #[test]
    fn classification() {
        let p6 = pure_cycle_matrix(6).unwrap();
        assert_eq!(
            classify_vector(&p6, &[1, 0], &lens(&[6])).unwrap(),
            Orbit::Cycle(6)
        );
        assert_eq!(
            classify_vector(&p6, &[0, 0], &lens(&[6])).unwrap(),
            Orbit::Cycle(1)
        );
        let r = build_automorphism(&desc(&[6, 15, 30], true)).unwrap();
        let mut v = vec![0i64; 20];
        v[0] = 1;
        v[10] = 1;
        // e_1 + e_11 sits in the 6- and 30-blocks.
        assert_eq!(
            classify_vector(&r.matrix, &v, &lens(&[6, 15, 30])).unwrap(),
            Orbit::Cycle(30)
        );
        let mut w = vec![0i64; 20];
        w[0] = 1;
        w[2] = 1;
        assert_eq!(
            classify_vector(&r.matrix, &w, &lens(&[6, 15, 30])).unwrap(),
            Orbit::Cycle(30)
        );
        let mut c = vec![0i64; 20];
        c[19] = 1;
        assert_eq!(
            classify_vector(&r.matrix, &c, &lens(&[6, 15, 30])).unwrap(),
            Orbit::Chain
        );
        assert!(classify_vector(&p6, &[1, 0, 0], &lens(&[6])).is_err());
    }

    /// Valid descriptors with lengths in 1..=36: random seeds closed under lcm,
    /// discarded if the closure leaves the range.
    fn descriptor_strategy() -> impl Strategy<Value = ZStructureDescriptor> {
        (prop::collection::btree_set(1u64..=36, 0..4), any::<bool>()).prop_filter_map(
            "closure leaves 1..=36 or empty",
            |(seed, chains)| {
                let closed = lcm_closure(&seed).ok()?;
                if closed.iter().any(|&l| l > 36) || (closed.is_empty() && !chains) {
                    return None;
                }
                ZStructureDescriptor::new(closed, chains).ok()
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn built_realizations_classify_correctly(
            d in descriptor_strategy(),
            samples in prop::collection::vec(prop::collection::vec(-3i64..=3, 256), 8),
        ) {
            let r = build_automorphism(&d).unwrap();
            let dim = r.matrix.rows();
            prop_assert!(r.matrix.is_unimodular().unwrap());
            prop_assert_eq!(r.blocks.iter().map(|b| b.size).sum::<usize>(), dim);
            let closure = lcm_closure(&d.lengths).unwrap();
            for b in &r.blocks {
                let want = match b.label {
                    BlockLabel::Cycle(n) => Orbit::Cycle(n),
                    BlockLabel::Chain => Orbit::Chain,
                };
                prop_assert_eq!(classify_vector(&r.matrix, &basis_vector(dim, b.offset), &d.lengths).unwrap(), want);
            }
            for s in &samples {
                let v = &s[..dim.min(s.len())];
                if v.len() < dim {
                    continue;
                }
                let got = classify_vector(&r.matrix, v, &d.lengths).unwrap();
                match got {
                    Orbit::Chain => prop_assert!(d.has_chains),
                    Orbit::Cycle(k) => {
                        prop_assert!(k == 1 || closure.contains(&k), "length {} outside closure", k);
                        for m in [2i64, 3] {
                            let mv: Vec<i64> = v.iter().map(|x| x * m).collect();
                            prop_assert_eq!(classify_vector(&r.matrix, &mv, &d.lengths).unwrap(), Orbit::Cycle(k));
                        }
                    }
                }
                if got == Orbit::Chain {
                    let image = r.matrix.mul_vec(v).unwrap();
                    let scaled: Vec<i64> = image.iter().map(|x| x * 2).collect();
                    prop_assert_eq!(classify_vector(&r.matrix, &scaled, &d.lengths).unwrap(), Orbit::Chain);
                }
            }
        }

        #[test]
        fn closure_is_idempotent_and_monotone(
            small in prop::collection::btree_set(1u64..=24, 1..4),
            extra in prop::collection::btree_set(1u64..=24, 0..3),
        ) {
            let c = lcm_closure(&small).unwrap();
            prop_assert_eq!(lcm_closure(&c).unwrap(), c.clone());
            let big: BTreeSet<u64> = small.union(&extra).copied().collect();
            prop_assert!(c.is_subset(&lcm_closure(&big).unwrap()));
            prop_assert!(validate_descriptor(&ZStructureDescriptor::new(c, false).unwrap()).is_ok());
        }
    }
}
