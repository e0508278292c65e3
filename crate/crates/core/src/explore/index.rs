//! Dense integer ids for permutations of bounded length.
//!
//! Permutations of length `n` are ranked lexicographically (Lehmer code in
//! the factorial number system) and offset by the number of shorter
//! permutations, so id order is (length, lexicographic) order.

use crate::error::{Error, Result};
use crate::perm::Permutation;

/// Largest length the explorer will touch: sum of n! for n <= 11 is about 4.4e7.
pub const GUARD: usize = 11;

const FACT: [u64; 13] = {
    let mut f = [1u64; 13];
    let mut i = 1;
    while i < 13 {
        f[i] = f[i - 1] * i as u64;
        i += 1;
    }
    f
};

pub fn factorial(n: usize) -> u64 {
    FACT[n]
}

pub fn rank(v: &[u8]) -> u64 {
    let n = v.len();
    let mut r = 0;
    for i in 0..n {
        let smaller_after = v[i + 1..].iter().filter(|&&x| x < v[i]).count() as u64;
        r += smaller_after * FACT[n - 1 - i];
    }
    r
}

pub fn unrank_into(n: usize, mut r: u64, out: &mut Vec<u8>) {
    let mut pool: Vec<u8> = (1..=n as u8).collect();
    out.clear();
    for i in 0..n {
        let f = FACT[n - 1 - i];
        let d = (r / f) as usize;
        r %= f;
        out.push(pool.remove(d));
    }
}

/// Advances `v` to its lexicographic successor; false at the last permutation.
pub fn next_permutation(v: &mut [u8]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let Some(i) = (0..n - 1).rev().find(|&i| v[i] < v[i + 1]) else {
        return false;
    };
    let j = (i + 1..n).rev().find(|&j| v[j] > v[i]).unwrap();
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

/// Id space for all permutations of length `0..=ceiling`.
#[derive(Debug, Clone)]
pub struct Universe {
    ceiling: usize,
    offsets: Vec<u64>,
}

impl Universe {
    pub fn new(ceiling: usize) -> Result<Self> {
        if ceiling > GUARD {
            return Err(Error::GuardExceeded(ceiling, GUARD));
        }
        let mut offsets = vec![0u64];
        for n in 0..=ceiling {
            offsets.push(offsets[n] + FACT[n]);
        }
        Ok(Universe { ceiling, offsets })
    }

    pub fn ceiling(&self) -> usize {
        self.ceiling
    }

    /// Number of permutations of length at most `len`.
    pub fn count_upto(&self, len: usize) -> u64 {
        self.offsets[len + 1]
    }

    pub fn len(&self) -> u64 {
        self.offsets[self.ceiling + 1]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// First id of length `n`.
    pub fn offset(&self, n: usize) -> u64 {
        self.offsets[n]
    }

    pub fn id(&self, v: &[u8]) -> u32 {
        debug_assert!(v.len() <= self.ceiling);
        (self.offsets[v.len()] + rank(v)) as u32
    }

    pub fn length_of(&self, id: u32) -> usize {
        let id = id as u64;
        self.offsets.partition_point(|&o| o <= id) - 1
    }

    pub fn values_into(&self, id: u32, out: &mut Vec<u8>) {
        let n = self.length_of(id);
        unrank_into(n, id as u64 - self.offsets[n], out);
    }

    pub fn perm(&self, id: u32) -> Permutation {
        let mut v = Vec::new();
        self.values_into(id, &mut v);
        Permutation::from_vec_unchecked(v)
    }
}

/// Every permutation of length `0..=max_len`, by (length, lexicographic).
pub fn enumerate_permutations(max_len: usize) -> Result<impl Iterator<Item = Permutation>> {
    if max_len > GUARD {
        return Err(Error::GuardExceeded(max_len, GUARD));
    }
    Ok((0..=max_len).flat_map(|n| {
        let mut cur: Option<Vec<u8>> = None;
        std::iter::from_fn(move || {
            match &mut cur {
                None => cur = Some((1..=n as u8).collect()),
                Some(v) => {
                    if !next_permutation(v) {
                        return None;
                    }
                }
            }
            cur.clone().map(Permutation::from_vec_unchecked)
        })
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_counts() {
        let all: Vec<_> = enumerate_permutations(0).unwrap().collect();
        assert_eq!(all, vec![Permutation::empty()]);
        assert_eq!(enumerate_permutations(3).unwrap().count(), 10);
        assert_eq!(enumerate_permutations(5).unwrap().count(), 154);
        assert!(matches!(
            enumerate_permutations(12),
            Err(Error::GuardExceeded(12, 11))
        ));
    }

    #[test]
    fn enumeration_order_matches_ids() {
        let u = Universe::new(5).unwrap();
        for (expect, p) in enumerate_permutations(5).unwrap().enumerate() {
            assert_eq!(u.id(p.values()), expect as u32);
            assert_eq!(u.perm(expect as u32), p);
        }
        assert_eq!(u.len(), 154);
        assert_eq!(u.length_of(0), 0);
        assert_eq!(u.length_of(153), 5);
        assert_eq!(u.length_of(34), 5);
        assert_eq!(u.length_of(33), 4);
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&[1, 2, 3]), 0);
        assert_eq!(rank(&[3, 2, 1]), 5);
        assert_eq!(rank(&[2, 3, 1]), 3);
        let mut v = Vec::new();
        unrank_into(4, 23, &mut v);
        assert_eq!(v, vec![4, 3, 2, 1]);
    }
}
