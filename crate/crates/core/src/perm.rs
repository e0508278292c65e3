//! Permutations of `1..=n`, with 1-based positions throughout.
//!
//! The empty permutation is written `e` in every textual form.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A bijection onto `{1, …, n}` stored as its one-line notation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Permutation(Vec<u8>);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    /// Digits run together (`4312`); only defined for n <= 9.
    Compact,
    /// Space separated (`4 3 1 2`).
    Separated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extremum {
    LrMin,
    LrMax,
    RlMin,
    RlMax,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonotoneKind {
    /// Length 0 or 1: simultaneously the identity and the reverse identity.
    Both(usize),
    Identity(usize),
    ReverseIdentity(usize),
    Neither,
}

impl Permutation {
    pub fn empty() -> Self {
        Permutation(Vec::new())
    }

    pub fn identity(n: usize) -> Self {
        assert!(n <= u8::MAX as usize);
        Permutation((1..=n as u8).collect())
    }

    pub fn reverse_identity(n: usize) -> Self {
        assert!(n <= u8::MAX as usize);
        Permutation((1..=n as u8).rev().collect())
    }

    /// Validates that `values` is a bijection onto `1..=values.len()`.
    pub fn from_values<T: Copy + Into<u32>>(values: &[T]) -> Result<Self> {
        let n = values.len();
        if n > u8::MAX as usize {
            return Err(Error::TooLong(n));
        }
        let mut seen = vec![false; n + 1];
        let mut out = Vec::with_capacity(n);
        for &v in values {
            let v: u32 = v.into();
            if v == 0 || v as usize > n {
                return Err(Error::ValueOutOfRange { value: v, len: n });
            }
            if seen[v as usize] {
                return Err(Error::DuplicateValue(v));
            }
            seen[v as usize] = true;
            out.push(v as u8);
        }
        Ok(Permutation(out))
    }

    /// Caller guarantees the bijection invariant.
    pub(crate) fn from_vec_unchecked(values: Vec<u8>) -> Self {
        debug_assert!(Permutation::from_values(&values).is_ok());
        Permutation(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[u8] {
        &self.0
    }

    /// Value at 1-based position `pos`.
    pub fn at(&self, pos: usize) -> u8 {
        self.0[pos - 1]
    }

    pub fn format(&self, style: Style) -> Result<String> {
        if self.is_empty() {
            return Ok("e".to_string());
        }
        match style {
            Style::Compact => {
                if self.len() > 9 {
                    return Err(Error::CompactTooLong(self.len()));
                }
                Ok(self.0.iter().map(|v| char::from(b'0' + v)).collect())
            }
            Style::Separated => Ok(self
                .0
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(" ")),
        }
    }

    /// Position `i` of the result holds `n + 1 - p[n + 1 - i]`.
    pub fn reverse_complement(&self) -> Self {
        let n = self.len() as u8;
        Permutation(self.0.iter().rev().map(|&v| n + 1 - v).collect())
    }

    /// Ascending 1-based positions of strict extrema in the given scan direction.
    pub fn extrema_positions(&self, kind: Extremum) -> Vec<usize> {
        let n = self.len();
        let mut out = Vec::new();
        match kind {
            Extremum::LrMin | Extremum::LrMax => {
                let mut best: Option<u8> = None;
                for (i, &v) in self.0.iter().enumerate() {
                    let hit = match (best, kind) {
                        (None, _) => true,
                        (Some(b), Extremum::LrMin) => v < b,
                        (Some(b), _) => v > b,
                    };
                    if hit {
                        best = Some(v);
                        out.push(i + 1);
                    }
                }
            }
            Extremum::RlMin | Extremum::RlMax => {
                let mut best: Option<u8> = None;
                for i in (0..n).rev() {
                    let v = self.0[i];
                    let hit = match (best, kind) {
                        (None, _) => true,
                        (Some(b), Extremum::RlMin) => v < b,
                        (Some(b), _) => v > b,
                    };
                    if hit {
                        best = Some(v);
                        out.push(i + 1);
                    }
                }
                out.reverse();
            }
        }
        out
    }

    pub fn monotone_kind(&self) -> MonotoneKind {
        let n = self.len();
        if n <= 1 {
            MonotoneKind::Both(n)
        } else if self.is_identity() {
            MonotoneKind::Identity(n)
        } else if self.is_reverse_identity() {
            MonotoneKind::ReverseIdentity(n)
        } else {
            MonotoneKind::Neither
        }
    }

    pub fn is_identity(&self) -> bool {
        self.0.windows(2).all(|w| w[0] < w[1])
    }

    pub fn is_reverse_identity(&self) -> bool {
        self.0.windows(2).all(|w| w[0] > w[1])
    }
}

/// Order-isomorphic permutation of a sequence of distinct integers.
pub fn normalize<T: Copy + Ord + Into<u64>>(seq: &[T]) -> Result<Permutation> {
    let n = seq.len();
    if n > u8::MAX as usize {
        return Err(Error::TooLong(n));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| seq[i]);
    let mut out = vec![0u8; n];
    for (rank, w) in order.windows(2).enumerate() {
        if seq[w[0]] == seq[w[1]] {
            let v: u64 = seq[w[0]].into();
            return Err(Error::DuplicateValue(v.min(u32::MAX as u64) as u32));
        }
        out[w[0]] = rank as u8 + 1;
    }
    if let Some(&last) = order.last() {
        out[last] = n as u8;
    }
    Ok(Permutation(out))
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        if text == "e" {
            return Ok(Permutation::empty());
        }
        if text.is_empty() {
            return Err(Error::MalformedToken(String::new()));
        }
        let separated = text.chars().any(|c| c.is_whitespace() || c == ',');
        let compact = !separated && text.chars().all(|c| ('1'..='9').contains(&c));
        let values: Vec<u32> = if compact {
            text.bytes().map(|b| (b - b'0') as u32).collect()
        } else {
            text.split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<u32>()
                        .map_err(|_| Error::MalformedToken(t.to_string()))
                })
                .collect::<Result<_>>()?
        };
        Permutation::from_values(&values)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let style = if self.len() <= 9 {
            Style::Compact
        } else {
            Style::Separated
        };
        // format only fails for compact style above length 9
        f.write_str(&self.format(style).map_err(|_| fmt::Error)?)
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    #[test]
    fn parse_forms() {
        assert_eq!(p("14253").values(), &[1, 4, 2, 5, 3]);
        assert!(p("e").is_empty());
        let long = p("11 2 5 1 3 4 6 7 8 9 10");
        assert_eq!(long.len(), 11);
        assert_eq!(long.at(1), 11);
        assert_eq!(p("3,1,2").values(), &[3, 1, 2]);
    }

    #[test]
    fn parse_errors() {
        assert_eq!(
            "1x2".parse::<Permutation>(),
            Err(Error::MalformedToken("1x2".into()))
        );
        assert_eq!("121".parse::<Permutation>(), Err(Error::DuplicateValue(1)));
        assert_eq!(
            "1 2 4".parse::<Permutation>(),
            Err(Error::ValueOutOfRange { value: 4, len: 3 })
        );
        assert!("10".parse::<Permutation>().is_err());
        assert!("".parse::<Permutation>().is_err());
    }

    #[test]
    fn format_styles() {
        let q = Permutation::from_values(&[4u8, 3, 1, 2]).unwrap();
        assert_eq!(q.format(Style::Compact).unwrap(), "4312");
        assert_eq!(Permutation::empty().format(Style::Compact).unwrap(), "e");
        assert_eq!(
            Permutation::identity(2).format(Style::Separated).unwrap(),
            "1 2"
        );
        assert_eq!(
            Permutation::identity(10).format(Style::Compact),
            Err(Error::CompactTooLong(10))
        );
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize(&[5u32, 4, 2, 3]).unwrap(), p("4312"));
        assert_eq!(normalize::<u32>(&[]).unwrap(), Permutation::empty());
        assert_eq!(normalize(&[3u32, 1, 4, 5]).unwrap(), p("2134"));
        assert_eq!(normalize(&[3u32, 1, 3]), Err(Error::DuplicateValue(3)));
    }

    #[test]
    fn reverse_complement_examples() {
        assert_eq!(p("2314").reverse_complement(), p("1423"));
        assert_eq!(p("231").reverse_complement(), p("312"));
        assert_eq!(
            Permutation::empty().reverse_complement(),
            Permutation::empty()
        );
    }

    #[test]
    fn extrema() {
        let q = p("2314");
        assert_eq!(q.extrema_positions(Extremum::LrMin), vec![1, 3]);
        assert_eq!(q.extrema_positions(Extremum::RlMax), vec![4]);
        assert_eq!(q.extrema_positions(Extremum::LrMax), vec![1, 2, 4]);
        assert_eq!(q.extrema_positions(Extremum::RlMin), vec![3, 4]);
        assert_eq!(
            Permutation::reverse_identity(5).extrema_positions(Extremum::LrMin),
            vec![1, 2, 3, 4, 5]
        );
        assert!(Permutation::empty()
            .extrema_positions(Extremum::LrMin)
            .is_empty());
    }

    #[test]
    fn monotone() {
        assert_eq!(p("123").monotone_kind(), MonotoneKind::Identity(3));
        assert_eq!(p("321").monotone_kind(), MonotoneKind::ReverseIdentity(3));
        assert_eq!(p("231").monotone_kind(), MonotoneKind::Neither);
        assert_eq!(p("e").monotone_kind(), MonotoneKind::Both(0));
        assert_eq!(p("1").monotone_kind(), MonotoneKind::Both(1));
    }
}
