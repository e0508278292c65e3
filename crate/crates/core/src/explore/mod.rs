//! Bounded exhaustive exploration of all permutations up to a length
//! ceiling: class partitions, connecting certificates, and identity
//! reachability.
//!
//! Separation found here is always relative to the ceiling. Two
//! permutations in one class are genuinely equivalent; two in different
//! classes merely have no connecting path that stays within the ceiling.

mod dsu;
mod index;
mod path;

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::pattern::increasing_triples;
use crate::perm::Permutation;
use crate::rewrite::{Rule, RuleSpec};

pub use dsu::DisjointSets;
pub use index::{
    enumerate_permutations, factorial, next_permutation, rank, unrank_into, Universe, GUARD,
};
pub use path::{find_path, reach_identity, replay, Certificate, Move, Step};

pub const FORMAT_VERSION: u32 = 1;

const CHUNK: u64 = 1 << 14;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Class {
    pub id: usize,
    /// Smallest member by (length, lexicographic).
    pub min_rep: Permutation,
    /// Members of length at most `max_len`.
    pub size: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub members: Option<Vec<Permutation>>,
}

/// Classes of all permutations of length `<= max_len`, found by searching
/// permutations of length `<= max_len + slack`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub rule: Rule,
    pub max_len: usize,
    pub slack: usize,
    pub classes: Vec<Class>,
}

#[derive(Serialize, Deserialize)]
struct Document {
    format_version: u32,
    rule: String,
    max_len: usize,
    slack: usize,
    classes: Vec<Class>,
}

impl Partition {
    pub fn ceiling(&self) -> usize {
        self.max_len + self.slack
    }

    pub fn has_members(&self) -> bool {
        self.classes.iter().all(|c| c.members.is_some())
    }

    /// Class index of every member; empty when members were not kept.
    pub fn membership(&self) -> HashMap<Permutation, usize> {
        let mut out = HashMap::new();
        for (idx, c) in self.classes.iter().enumerate() {
            for m in c.members.iter().flatten() {
                out.insert(m.clone(), idx);
            }
        }
        out
    }

    /// Versioned JSON with sorted keys; identical partitions give identical bytes.
    pub fn to_json(&self) -> String {
        let doc = Document {
            format_version: FORMAT_VERSION,
            rule: self.rule.text(),
            max_len: self.max_len,
            slack: self.slack,
            classes: self.classes.clone(),
        };
        let value: Value = serde_json::to_value(doc).expect("plain data");
        let mut text = serde_json::to_string_pretty(&value).expect("plain data");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Document =
            serde_json::from_str(text).map_err(|e| Error::BadDocument(e.to_string()))?;
        if doc.format_version != FORMAT_VERSION {
            return Err(Error::BadDocument(format!(
                "unsupported format_version {}",
                doc.format_version
            )));
        }
        let spec: RuleSpec = doc
            .rule
            .parse()
            .map_err(|e: Error| Error::BadDocument(e.to_string()))?;
        Ok(Partition {
            rule: spec.rule,
            max_len: doc.max_len,
            slack: doc.slack,
            classes: doc.classes,
        })
    }
}

/// Forward edges of every permutation with id in `[start, end)`, all of the
/// same length `n`.
fn forward_edges(
    universe: &Universe,
    rule: &Rule,
    n: usize,
    start: u64,
    end: u64,
) -> Vec<(u32, u32)> {
    let mut cur = Vec::with_capacity(n);
    unrank_into(n, start - universe.offset(n), &mut cur);
    let mut buf = Vec::with_capacity(n);
    let mut targets = Vec::new();
    let mut edges = Vec::new();
    for id in start..end {
        targets.clear();
        increasing_triples(&cur, |i, j, k| {
            rule.forward_into(&cur, [i, j, k], &mut buf);
            targets.push(universe.id(&buf));
        });
        targets.sort_unstable();
        targets.dedup();
        edges.extend(targets.iter().map(|&t| (id as u32, t)));
        next_permutation(&mut cur);
    }
    edges
}

/// Unions every permutation within the ceiling with its forward neighbours.
/// Each edge of the two-way relation is the forward edge of its longer end,
/// so backward moves add nothing here.
pub fn connect(rule: &Rule, universe: &Universe) -> DisjointSets {
    let mut sets = DisjointSets::new(universe.len() as usize);
    for n in 3..=universe.ceiling() {
        let (lo, hi) = (universe.offset(n), universe.offset(n + 1));
        let starts: Vec<u64> = (lo..hi).step_by(CHUNK as usize).collect();
        // bounded batches keep the edge buffers small at large ceilings
        let batch = 4 * rayon::current_num_threads().max(1);
        for group in starts.chunks(batch) {
            let edges: Vec<Vec<(u32, u32)>> = group
                .par_iter()
                .map(|&s| forward_edges(universe, rule, n, s, (s + CHUNK).min(hi)))
                .collect();
            for (a, b) in edges.into_iter().flatten() {
                sets.union(a, b);
            }
        }
    }
    sets
}

pub fn compute_partition(
    rule: &Rule,
    max_len: usize,
    slack: usize,
    keep_members: bool,
) -> Result<Partition> {
    let ceiling = max_len + slack;
    let universe = Universe::new(ceiling)?;
    let mut sets = connect(rule, &universe);

    let limit = universe.count_upto(max_len) as u32;
    let mut class_of_root: HashMap<u32, usize> = HashMap::new();
    let mut classes: Vec<Class> = Vec::new();
    for id in 0..limit {
        let root = sets.find(id);
        let idx = *class_of_root.entry(root).or_insert_with(|| {
            classes.push(Class {
                id: classes.len(),
                min_rep: universe.perm(id),
                size: 0,
                members: keep_members.then(Vec::new),
            });
            classes.len() - 1
        });
        let class = &mut classes[idx];
        class.size += 1;
        if let Some(m) = class.members.as_mut() {
            m.push(universe.perm(id));
        }
    }
    Ok(Partition {
        rule: *rule,
        max_len,
        slack,
        classes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rule {
        s.parse().unwrap()
    }

    #[test]
    fn small_partition_shape() {
        let part = compute_partition(&r("3*2"), 3, 0, true).unwrap();
        // 123 -> 21 is the only edge inside lengths <= 3
        assert_eq!(part.classes.len(), 9);
        let pair = part
            .classes
            .iter()
            .find(|c| c.size == 2)
            .and_then(|c| c.members.clone())
            .unwrap();
        assert_eq!(pair, vec!["21".parse().unwrap(), "123".parse().unwrap()]);
    }

    #[test]
    fn json_round_trip() {
        let part = compute_partition(&r("12*"), 3, 1, true).unwrap();
        let text = part.to_json();
        assert!(text.starts_with("{\n  \"classes\""));
        assert_eq!(Partition::from_json(&text).unwrap(), part);
        let lean = compute_partition(&r("12*"), 3, 1, false).unwrap();
        assert!(!lean.to_json().contains("members"));
        assert!(Partition::from_json("{\"format_version\":2}").is_err());
    }

    #[test]
    fn guard_is_enforced() {
        assert!(matches!(
            compute_partition(&r("3*2"), 8, 4, false),
            Err(Error::GuardExceeded(12, 11))
        ));
    }
}
