//! Permutations, finite cycle structures and the symbolic descriptors used
//! for bijections of countably infinite sets, with their text formats.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A bijection of `{0, ..., n-1}`, stored as its image list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        if images.is_empty() {
            return Err(Error::NotBijective("empty domain".into()));
        }
        let n = images.len();
        let mut seen = vec![false; n];
        for (i, &img) in images.iter().enumerate() {
            if img >= n {
                return Err(Error::NotBijective(format!(
                    "image {img} of point {i} is outside 0..{n}"
                )));
            }
            if std::mem::replace(&mut seen[img], true) {
                return Err(Error::NotBijective(format!("{img} is hit twice")));
            }
        }
        Ok(Permutation { images })
    }

    pub fn identity(n: usize) -> Self {
        assert!(n >= 1);
        Permutation {
            images: (0..n).collect(),
        }
    }

    /// Builds a permutation from a closure that is already known to be a
    /// bijection of `0..n`; validated all the same.
    pub fn from_fn(n: usize, f: impl Fn(usize) -> usize) -> Result<Self> {
        Permutation::new((0..n).map(f).collect())
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, point: usize) -> usize {
        self.images[point]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Permutation { images: inv }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Self {
        assert_eq!(self.len(), other.len());
        Permutation {
            images: other.images.iter().map(|&i| self.images[i]).collect(),
        }
    }

    /// Orbits, each starting at its smallest point and following `f`;
    /// listed in order of their starting points.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x);
                x = self.images[x];
            }
            out.push(cycle);
        }
        out
    }

    /// Orbits sorted by length descending, then by smallest point ascending.
    /// This is the order used when matching cycles between two bijections.
    pub fn cycles_for_matching(&self) -> Vec<Vec<usize>> {
        let mut cycles = self.cycles();
        cycles.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
        cycles
    }
}

/// Multiset of `(cycle length, cycle count)` with lengths strictly
/// decreasing and all counts positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycleStructure {
    rows: Vec<(usize, usize)>,
}

impl CycleStructure {
    pub fn canonicalize(rows: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut rows: Vec<(usize, usize)> = rows.into_iter().filter(|&(_, c)| c > 0).collect();
        for &(len, _) in &rows {
            assert!(len >= 1, "cycle length must be positive");
        }
        rows.sort_by_key(|&(len, _)| std::cmp::Reverse(len));
        let mut merged: Vec<(usize, usize)> = Vec::with_capacity(rows.len());
        for (len, count) in rows {
            match merged.last_mut() {
                Some(last) if last.0 == len => last.1 += count,
                _ => merged.push((len, count)),
            }
        }
        CycleStructure { rows: merged }
    }

    pub fn identity(n: usize) -> Self {
        CycleStructure::canonicalize([(1, n)])
    }

    pub fn rows(&self) -> &[(usize, usize)] {
        &self.rows
    }

    /// Size of the underlying set.
    pub fn total(&self) -> usize {
        self.rows.iter().map(|&(l, c)| l * c).sum()
    }

    pub fn count_of(&self, length: usize) -> usize {
        self.rows
            .iter()
            .find(|&&(l, _)| l == length)
            .map_or(0, |&(_, c)| c)
    }

    pub fn is_identity(&self) -> bool {
        self.rows.len() <= 1 && self.rows.iter().all(|&(l, _)| l == 1)
    }
}

pub fn structure_of(perm: &Permutation) -> CycleStructure {
    let mut counts = vec![0usize; perm.len() + 1];
    for cycle in perm.cycles() {
        counts[cycle.len()] += 1;
    }
    CycleStructure::canonicalize(counts.into_iter().enumerate().skip(1))
}

impl fmt::Display for CycleStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (len, count)) in self.rows.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{len}^{count}")?;
        }
        Ok(())
    }
}

impl FromStr for CycleStructure {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut rows: Vec<(usize, usize)> = Vec::new();
        for (col, token) in tokens(text) {
            let (len, count) = token
                .split_once('^')
                .ok_or_else(|| Error::parse(1, col, format!("expected L^C, got {token:?}")))?;
            let len: usize = parse_positive(len, 1, col)?;
            let count: usize = parse_positive(count, 1, col)?;
            if let Some(&(prev, _)) = rows.last() {
                if len >= prev {
                    return Err(Error::parse(
                        1,
                        col,
                        format!("lengths must be strictly descending ({len} after {prev})"),
                    ));
                }
            }
            rows.push((len, count));
        }
        if rows.is_empty() {
            return Err(Error::parse(1, 1, "empty cycle structure"));
        }
        Ok(CycleStructure { rows })
    }
}

pub fn format_structure(cs: &CycleStructure) -> String {
    cs.to_string()
}

pub fn parse_structure(text: &str) -> Result<CycleStructure> {
    text.trim().parse()
}

/// Whitespace-separated tokens with 1-based byte columns.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut rest = line;
    let mut offset = 0usize;
    std::iter::from_fn(move || {
        let skip = rest.len() - rest.trim_start().len();
        rest = &rest[skip..];
        offset += skip;
        if rest.is_empty() {
            return None;
        }
        let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
        let tok = &rest[..end];
        let col = offset + 1;
        rest = &rest[end..];
        offset += end;
        Some((col, tok))
    })
}

fn parse_positive(s: &str, line: usize, col: usize) -> Result<usize> {
    match s.parse::<usize>() {
        Ok(v) if v >= 1 => Ok(v),
        _ => Err(Error::parse(
            line,
            col,
            format!("expected a positive integer, got {s:?}"),
        )),
    }
}

/// Parses the two-line permutation format: `n`, then `n` images.
pub fn parse_permutation(text: &str) -> Result<Permutation> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (n_line, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, 1, "missing point count"))?;
    let mut header_tokens = tokens(header);
    let (col, n_tok) = header_tokens
        .next()
        .ok_or_else(|| Error::parse(n_line + 1, 1, "missing point count"))?;
    let n = parse_positive(n_tok, n_line + 1, col)?;
    if let Some((col, extra)) = header_tokens.next() {
        return Err(Error::parse(
            n_line + 1,
            col,
            format!("unexpected token {extra:?}"),
        ));
    }

    let (img_line, body) = lines
        .next()
        .ok_or_else(|| Error::parse(n_line + 2, 1, "missing image line"))?;
    let mut images = Vec::with_capacity(n);
    for (col, tok) in tokens(body) {
        let v: usize = tok.parse().map_err(|_| {
            Error::parse(
                img_line + 1,
                col,
                format!("expected an image index, got {tok:?}"),
            )
        })?;
        images.push(v);
    }
    if images.len() != n {
        return Err(Error::parse(
            img_line + 1,
            body.len() + 1,
            format!("expected {n} images, found {}", images.len()),
        ));
    }
    if let Some((line, _)) = lines.next() {
        return Err(Error::parse(
            line + 1,
            1,
            "trailing content after image line",
        ));
    }
    Permutation::new(images)
}

pub fn format_permutation(perm: &Permutation) -> String {
    let images: Vec<String> = perm.images().iter().map(usize::to_string).collect();
    format!("{}\n{}\n", perm.len(), images.join(" "))
}

/// Finite description of a bijection on a countably infinite set.
///
/// `lengths` holds every non-zero cycle length that occurs (each occurring
/// infinitely often). The zero cycle is implicit: `1 ∈ lengths` means
/// infinitely many fixed points, otherwise the zero cycle is the only one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ZStructureDescriptor {
    pub lengths: BTreeSet<u64>,
    pub has_chains: bool,
}

impl ZStructureDescriptor {
    pub fn new(lengths: impl IntoIterator<Item = u64>, has_chains: bool) -> Result<Self> {
        let lengths: BTreeSet<u64> = lengths.into_iter().collect();
        if lengths.contains(&0) {
            return Err(Error::InvalidArgument("cycle length 0".into()));
        }
        Ok(ZStructureDescriptor {
            lengths,
            has_chains,
        })
    }
}

impl fmt::Display for ZStructureDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lengths: Vec<String> = self.lengths.iter().map(u64::to_string).collect();
        write!(
            f,
            "lengths={} chains={}",
            lengths.join(","),
            if self.has_chains { "yes" } else { "no" }
        )
    }
}

impl FromStr for ZStructureDescriptor {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lengths = None;
        let mut chains = None;
        for (col, token) in tokens(text) {
            let (key, value) = token.split_once('=').ok_or_else(|| {
                Error::parse(1, col, format!("expected key=value, got {token:?}"))
            })?;
            match key {
                "lengths" if lengths.is_none() => {
                    lengths =
                        Some(parse_length_list(value).map_err(|msg| Error::parse(1, col, msg))?)
                }
                "chains" if chains.is_none() => {
                    chains = Some(match value {
                        "yes" => true,
                        "no" => false,
                        _ => return Err(Error::parse(1, col, "chains must be yes or no")),
                    })
                }
                _ => return Err(Error::parse(1, col, format!("unexpected key {key:?}"))),
            }
        }
        let lengths = lengths.ok_or_else(|| Error::parse(1, 1, "missing lengths="))?;
        let chains = chains.ok_or_else(|| Error::parse(1, 1, "missing chains="))?;
        ZStructureDescriptor::new(lengths, chains)
    }
}

/// Comma-separated positive integers; the empty string is the empty list.
pub fn parse_length_list(text: &str) -> std::result::Result<Vec<u64>, String> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|s| match s.trim().parse::<u64>() {
            Ok(v) if v >= 1 => Ok(v),
            _ => Err(format!("invalid cycle length {s:?}")),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cs(rows: &[(usize, usize)]) -> CycleStructure {
        CycleStructure::canonicalize(rows.iter().copied())
    }

    #[test]
    fn structure_examples() {
        assert_eq!(structure_of(&Permutation::identity(12)), cs(&[(1, 12)]));
        let neg8 = Permutation::from_fn(8, |x| (8 - x) % 8).unwrap();
        assert_eq!(neg8.images(), &[0, 7, 6, 5, 4, 3, 2, 1]);
        assert_eq!(structure_of(&neg8).rows(), &[(2, 3), (1, 2)]);
        let times5 = Permutation::from_fn(12, |x| 5 * x % 12).unwrap();
        assert_eq!(structure_of(&times5).rows(), &[(2, 4), (1, 4)]);
    }

    #[test]
    fn canonicalize_examples() {
        assert_eq!(cs(&[(7, 6), (1, 6), (1, 1)]).rows(), &[(7, 6), (1, 7)]);
        assert_eq!(cs(&[(1, 49)]).rows(), &[(1, 49)]);
        assert_eq!(cs(&[(3, 0), (2, 1)]).rows(), &[(2, 1)]);
        assert_eq!(cs(&[(1, 36), (1, 6), (1, 6), (1, 1)]).rows(), &[(1, 49)]);
    }

    #[test]
    fn permutation_text() {
        let p = parse_permutation("4\n1 0 3 2").unwrap();
        assert_eq!(p.images(), &[1, 0, 3, 2]);
        assert_eq!(parse_permutation("1\n0").unwrap(), Permutation::identity(1));
        assert!(matches!(
            parse_permutation("3\n1 1 2"),
            Err(Error::NotBijective(_))
        ));
        assert_eq!(format_permutation(&p), "4\n1 0 3 2\n");
    }

    #[test]
    fn permutation_parse_errors_carry_position() {
        match parse_permutation("3\n0 x 2") {
            Err(Error::Parse { line, col, .. }) => assert_eq!((line, col), (2, 3)),
            other => panic!("{other:?}"),
        }
        match parse_permutation("3\n0 1") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_permutation(""), Err(Error::Parse { .. })));
        assert!(matches!(parse_permutation("0\n"), Err(Error::Parse { .. })));
        assert!(matches!(
            parse_permutation("2\n0 5"),
            Err(Error::NotBijective(_))
        ));
    }

    #[test]
    fn structure_text() {
        assert_eq!(format_structure(&cs(&[(2, 4), (1, 4)])), "2^4 1^4");
        assert_eq!(format_structure(&cs(&[(1, 9)])), "1^9");
        assert_eq!(
            parse_structure("6^1 2^1 1^1").unwrap().rows(),
            &[(6, 1), (2, 1), (1, 1)]
        );
        assert!(parse_structure("1^2 2^1").is_err());
        assert!(parse_structure("2^1 2^1").is_err());
        assert!(parse_structure("2-1").is_err());
        assert!(parse_structure("2^0").is_err());
        assert!(parse_structure("").is_err());
    }

    #[test]
    fn descriptor_text() {
        let d: ZStructureDescriptor = "lengths=6,15,30 chains=yes".parse().unwrap();
        assert_eq!(
            d.lengths.iter().copied().collect::<Vec<_>>(),
            vec![6, 15, 30]
        );
        assert!(d.has_chains);
        assert_eq!(d.to_string(), "lengths=6,15,30 chains=yes");
        let empty: ZStructureDescriptor = "lengths= chains=no".parse().unwrap();
        assert!(empty.lengths.is_empty());
        assert!("lengths=0 chains=no"
            .parse::<ZStructureDescriptor>()
            .is_err());
        assert!("lengths=3 chains=maybe"
            .parse::<ZStructureDescriptor>()
            .is_err());
        assert!("lengths=3".parse::<ZStructureDescriptor>().is_err());
    }

    fn perm_strategy(max: usize) -> impl Strategy<Value = Permutation> {
        (1..=max)
            .prop_flat_map(|n| Just((0..n).collect::<Vec<usize>>()).prop_shuffle())
            .prop_map(|v| Permutation::new(v).unwrap())
    }

    proptest! {
        #[test]
        fn conjugation_preserves_structure(
            (p, q) in (1usize..40).prop_flat_map(|n| {
                let v: Vec<usize> = (0..n).collect();
                (Just(v.clone()).prop_shuffle(), Just(v).prop_shuffle())
            })
        ) {
            let p = Permutation::new(p).unwrap();
            let q = Permutation::new(q).unwrap();
            let conj = q.compose(&p).compose(&q.inverse());
            prop_assert_eq!(structure_of(&conj), structure_of(&p));
        }

        #[test]
        fn canonicalize_is_idempotent(rows in prop::collection::vec((1usize..20, 0usize..5), 0..10)) {
            let once = CycleStructure::canonicalize(rows);
            let twice = CycleStructure::canonicalize(once.rows().iter().copied());
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn text_formats_round_trip(p in perm_strategy(30)) {
            let text = format_permutation(&p);
            prop_assert_eq!(parse_permutation(&text).unwrap(), p.clone());
            let s = structure_of(&p);
            prop_assert_eq!(s.total(), p.len());
            let rendered = format_structure(&s);
            let reparsed = parse_structure(&rendered).unwrap();
            prop_assert_eq!(format_structure(&reparsed), rendered);
            prop_assert_eq!(reparsed, s);
        }
    }
}
