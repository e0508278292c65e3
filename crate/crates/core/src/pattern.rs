//! Classical pattern containment, for plain permutations and for strings
//! carrying star placeholders.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::perm::Permutation;

/// Position tuple of an occurrence, 1-based and strictly increasing.
pub type Occurrence = Vec<usize>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Entry {
    Star,
    Int(u32),
}

/// A string of distinct positive integers and stars.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StarString(Vec<Entry>);

impl StarString {
    pub fn new(entries: Vec<Entry>) -> Result<Self> {
        let mut ints: Vec<u32> = entries
            .iter()
            .filter_map(|e| match e {
                Entry::Int(v) => Some(*v),
                Entry::Star => None,
            })
            .collect();
        ints.sort_unstable();
        if let Some(w) = ints.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateValue(w[0]));
        }
        if ints.first() == Some(&0) {
            return Err(Error::MalformedToken("0".into()));
        }
        Ok(StarString(entries))
    }

    pub fn entries(&self) -> &[Entry] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<&Permutation> for StarString {
    fn from(p: &Permutation) -> Self {
        StarString(p.values().iter().map(|&v| Entry::Int(v as u32)).collect())
    }
}

impl FromStr for StarString {
    type Err = Error;

    /// Compact (`54*23`) when there are no separators, else whitespace or
    /// comma separated tokens.
    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let separated = text.chars().any(|c| c.is_whitespace() || c == ',');
        let token = |t: &str| -> Result<Entry> {
            if t == "*" {
                Ok(Entry::Star)
            } else {
                t.parse::<u32>()
                    .map(Entry::Int)
                    .map_err(|_| Error::MalformedToken(t.to_string()))
            }
        };
        let entries = if separated {
            text.split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(token)
                .collect::<Result<Vec<_>>>()?
        } else {
            text.char_indices()
                .map(|(i, _)| token(&text[i..i + 1]))
                .collect::<Result<Vec<_>>>()?
        };
        StarString::new(entries)
    }
}

impl fmt::Display for StarString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let compact = self
            .0
            .iter()
            .all(|e| matches!(e, Entry::Star | Entry::Int(1..=9)));
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 && !compact {
                f.write_str(" ")?;
            }
            match e {
                Entry::Star => f.write_str("*")?,
                Entry::Int(v) => write!(f, "{v}")?,
            }
        }
        Ok(())
    }
}

fn order_isomorphic(a: &[u32], b: &[u32]) -> bool {
    a.len() == b.len()
        && (0..a.len()).all(|i| (i + 1..a.len()).all(|j| (a[i] < a[j]) == (b[i] < b[j])))
}

/// Visits every strictly increasing `k`-subset of `0..n` in lexicographic order.
fn for_each_subset(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        visit(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// All copies of `pattern` in `p`, as 1-based position tuples in
/// lexicographic order. Empty means `p` avoids `pattern`.
pub fn occurrences(p: &Permutation, pattern: &Permutation) -> Vec<Occurrence> {
    let target: Vec<u32> = pattern.values().iter().map(|&v| v as u32).collect();
    let mut out = Vec::new();
    let mut vals = vec![0u32; target.len()];
    for_each_subset(p.len(), target.len(), |idx| {
        for (slot, &i) in vals.iter_mut().zip(idx) {
            *slot = p.values()[i] as u32;
        }
        if order_isomorphic(&vals, &target) {
            out.push(idx.iter().map(|i| i + 1).collect());
        }
    });
    out
}

/// Copies of a star pattern inside a star string. A star in `pattern`
/// matches only a literal star of `s`.
pub fn star_occurrences(s: &StarString, pattern: &StarString) -> Vec<Occurrence> {
    let want_ints: Vec<u32> = pattern
        .entries()
        .iter()
        .filter_map(|e| match e {
            Entry::Int(v) => Some(*v),
            Entry::Star => None,
        })
        .collect();
    let mut out = Vec::new();
    for_each_subset(s.len(), pattern.len(), |idx| {
        let mut got = Vec::with_capacity(want_ints.len());
        for (&i, want) in idx.iter().zip(pattern.entries()) {
            match (s.entries()[i], want) {
                (Entry::Star, Entry::Star) => {}
                (Entry::Int(v), Entry::Int(_)) => got.push(v),
                _ => return,
            }
        }
        if order_isomorphic(&got, &want_ints) {
            out.push(idx.iter().map(|i| i + 1).collect());
        }
    });
    out
}

/// 0-based index triples `(i, j, k)` with `v[i] < v[j] < v[k]`, in
/// lexicographic order.
pub fn increasing_triples(v: &[u8], mut visit: impl FnMut(usize, usize, usize)) {
    let n = v.len();
    for i in 0..n {
        for j in i + 1..n {
            if v[j] <= v[i] {
                continue;
            }
            for k in j + 1..n {
                if v[k] > v[j] {
                    visit(i, j, k);
                }
            }
        }
    }
}

/// First 123 copy in lexicographic position order, 0-based.
pub fn first_increasing_triple(v: &[u8]) -> Option<(usize, usize, usize)> {
    let n = v.len();
    for i in 0..n {
        for j in i + 1..n {
            if v[j] <= v[i] {
                continue;
            }
            if let Some(k) = (j + 1..n).find(|&k| v[k] > v[j]) {
                return Some((i, j, k));
            }
        }
    }
    None
}

pub fn avoids_123(p: &Permutation) -> bool {
    // a 123 copy exists iff some element has a smaller one before it and a
    // larger one after it
    let v = p.values();
    let n = v.len();
    if n < 3 {
        return true;
    }
    let mut suffix_max = vec![0u8; n];
    suffix_max[n - 1] = v[n - 1];
    for i in (0..n - 1).rev() {
        suffix_max[i] = suffix_max[i + 1].max(v[i]);
    }
    let mut prefix_min = v[0];
    for j in 1..n - 1 {
        if prefix_min < v[j] && v[j] < suffix_max[j + 1] {
            return false;
        }
        prefix_min = prefix_min.min(v[j]);
    }
    true
}
