use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::index::{Universe, GUARD};
use crate::error::{Error, Result};
use crate::pattern::increasing_triples;
use crate::perm::Permutation;
use crate::rewrite::{BackwardMove, Category, ForwardMove, Rule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "direction", rename_all = "lowercase")]
pub enum Move {
    Forward(ForwardMove),
    Backward(BackwardMove),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    #[serde(rename = "move")]
    pub mv: Move,
    pub result: Permutation,
}

/// A replayable sequence of replacements.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub start: Permutation,
    /// Longest permutation the path may pass through, when declared.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ceiling: Option<usize>,
    pub steps: Vec<Step>,
}

impl Certificate {
    pub fn end(&self) -> &Permutation {
        self.steps.last().map_or(&self.start, |s| &s.result)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Re-executes every step and returns the final permutation. Certificates
/// are untrusted: any illegal move or mismatched result is an error.
pub fn replay(c: &Certificate, rule: &Rule) -> Result<Permutation> {
    let mut cur = c.start.clone();
    for (idx, step) in c.steps.iter().enumerate() {
        let fail = |reason: String| Error::Replay {
            step: idx + 1,
            reason,
        };
        let next = match step.mv {
            Move::Forward(m) => rule.apply_forward(&cur, m),
            Move::Backward(m) => rule.apply_backward(&cur, m),
        }
        .map_err(|e| fail(e.to_string()))?;
        if next != step.result {
            return Err(fail(format!(
                "produces {next}, certificate claims {}",
                step.result
            )));
        }
        if let Some(ceiling) = c.ceiling {
            if next.len() > ceiling {
                return Err(fail(format!(
                    "length {} exceeds ceiling {ceiling}",
                    next.len()
                )));
            }
        }
        cur = next;
    }
    Ok(cur)
}

fn neighbor_ids(rule: &Rule, universe: &Universe, v: &[u8], out: &mut Vec<u32>) {
    out.clear();
    let mut buf = Vec::with_capacity(v.len() + 1);
    increasing_triples(v, |i, j, k| {
        rule.forward_into(v, [i, j, k], &mut buf);
        out.push(universe.id(&buf));
    });
    if v.len() < universe.ceiling() {
        rule.for_each_backward(v, |m| {
            rule.backward_into(v, m, &mut buf);
            out.push(universe.id(&buf));
        });
    }
    out.sort_unstable();
    out.dedup();
}

/// A concrete move taking `from` to `to`, which must be adjacent.
fn move_between(rule: &Rule, from: &Permutation, to: &Permutation) -> Option<Move> {
    if to.len() + 1 == from.len() {
        rule.forward_sites(from)
            .into_iter()
            .find(|&m| rule.apply_forward(from, m).as_ref() == Ok(to))
            .map(Move::Forward)
    } else {
        rule.backward_moves(from)
            .into_iter()
            .find(|&m| rule.apply_backward(from, m).as_ref() == Ok(to))
            .map(Move::Backward)
    }
}

fn certificate_from_ids(rule: &Rule, universe: &Universe, ids: &[u32]) -> Certificate {
    let perms: Vec<Permutation> = ids.iter().map(|&i| universe.perm(i)).collect();
    let steps = perms
        .windows(2)
        .map(|w| Step {
            mv: move_between(rule, &w[0], &w[1]).expect("search only links adjacent permutations"),
            result: w[1].clone(),
        })
        .collect();
    Certificate {
        start: perms[0].clone(),
        ceiling: Some(universe.ceiling()),
        steps,
    }
}

fn chain(parents: &HashMap<u32, u32>, mut id: u32) -> Vec<u32> {
    let mut out = vec![id];
    while parents[&id] != id {
        id = parents[&id];
        out.push(id);
    }
    out
}

/// Shortest connecting certificate among paths staying within `ceiling`,
/// by bidirectional breadth-first search. `None` is inconclusive: a longer
/// excursion might still connect the two.
pub fn find_path(
    rule: &Rule,
    from: &Permutation,
    to: &Permutation,
    ceiling: usize,
) -> Result<Option<Certificate>> {
    if ceiling > GUARD {
        return Err(Error::GuardExceeded(ceiling, GUARD));
    }
    if from.len() > ceiling || to.len() > ceiling {
        return Ok(None);
    }
    let universe = Universe::new(ceiling)?;
    let (src, dst) = (universe.id(from.values()), universe.id(to.values()));
    if src == dst {
        return Ok(Some(certificate_from_ids(rule, &universe, &[src])));
    }

    let mut parents = [HashMap::from([(src, src)]), HashMap::from([(dst, dst)])];
    let mut frontiers = [vec![src], vec![dst]];
    let mut vals = Vec::new();
    let mut nbrs = Vec::new();
    while !frontiers[0].is_empty() && !frontiers[1].is_empty() {
        let side = usize::from(frontiers[1].len() < frontiers[0].len());
        let other = 1 - side;
        let mut next = Vec::new();
        // (node on this side, node on the other side) of the best meeting
        let mut meet: Option<(u32, u32)> = None;
        for &id in &frontiers[side] {
            universe.values_into(id, &mut vals);
            neighbor_ids(rule, &universe, &vals, &mut nbrs);
            for &nb in &nbrs {
                if parents[other].contains_key(&nb) {
                    // all meetings in this layer have the same length on this
                    // side; keep the one closest to the other root
                    let better = match meet {
                        None => true,
                        Some((_, best)) => {
                            chain(&parents[other], nb).len() < chain(&parents[other], best).len()
                        }
                    };
                    if better {
                        meet = Some((id, nb));
                    }
                }
                if let std::collections::hash_map::Entry::Vacant(slot) = parents[side].entry(nb) {
                    slot.insert(id);
                    next.push(nb);
                }
            }
        }
        if let Some((here, there)) = meet {
            let mut near = chain(&parents[side], here);
            near.reverse();
            let far = chain(&parents[other], there);
            let mut ids = near;
            ids.extend(far);
            if side == 1 {
                ids.reverse();
            }
            return Ok(Some(certificate_from_ids(rule, &universe, &ids)));
        }
        frontiers[side] = next;
    }
    Ok(None)
}

/// Searches for a path from `p` to any identity permutation, climbing at
/// most `slack` above `|p|`.
pub fn reach_identity(rule: &Rule, p: &Permutation, slack: usize) -> Result<Certificate> {
    if rule.category() != Category::Decreasing {
        return Err(Error::WrongCategory(rule.category().name()));
    }
    let ceiling = p.len() + slack;
    let universe = Universe::new(ceiling)?;
    let src = universe.id(p.values());
    if p.is_identity() {
        return Ok(certificate_from_ids(rule, &universe, &[src]));
    }
    let mut parents = HashMap::from([(src, src)]);
    let mut frontier = vec![src];
    let mut vals = Vec::new();
    let mut nbrs = Vec::new();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &id in &frontier {
            universe.values_into(id, &mut vals);
            neighbor_ids(rule, &universe, &vals, &mut nbrs);
            for &nb in &nbrs {
                if parents.contains_key(&nb) {
                    continue;
                }
                parents.insert(nb, id);
                if universe.perm(nb).is_identity() {
                    let mut ids = chain(&parents, nb);
                    ids.reverse();
                    return Ok(certificate_from_ids(rule, &universe, &ids));
                }
                next.push(nb);
            }
        }
        frontier = next;
    }
    Err(Error::NotReached { slack, ceiling })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    fn r(s: &str) -> Rule {
        s.parse().unwrap()
    }

    #[test]
    fn one_step_certificate() {
        let c = find_path(&r("31*"), &p("12345"), &p("2134"), 5)
            .unwrap()
            .unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(replay(&c, &r("31*")).unwrap(), p("2134"));
    }

    #[test]
    fn switch_example_connects() {
        let c = find_path(&r("13*"), &p("2314"), &p("231"), 6)
            .unwrap()
            .unwrap();
        assert_eq!(c.end(), &p("231"));
        assert_eq!(replay(&c, &r("13*")).unwrap(), p("231"));
    }

    #[test]
    fn reverse_identity_is_unreachable() {
        for ceiling in [3, 5, 7] {
            assert!(find_path(&r("*12"), &p("321"), &p("123"), ceiling)
                .unwrap()
                .is_none());
        }
    }

    #[test]
    fn replay_rejects_tampering() {
        let c = find_path(&r("31*"), &p("12345"), &p("2134"), 5)
            .unwrap()
            .unwrap();
        let empty = Certificate {
            start: p("2413"),
            ceiling: None,
            steps: vec![],
        };
        assert_eq!(replay(&empty, &r("31*")).unwrap(), p("2413"));

        let mut bad = c.clone();
        bad.steps[0].mv = Move::Forward(ForwardMove { i: 1, j: 2, k: 4 });
        assert!(matches!(
            replay(&bad, &r("31*")),
            Err(Error::Replay { step: 1, .. })
        ));

        let mut bad = c.clone();
        bad.steps[0].result = p("1234");
        assert!(replay(&bad, &r("31*")).is_err());

        let mut low = c;
        low.ceiling = Some(3);
        assert!(replay(&low, &r("31*")).is_err());
    }

    #[test]
    fn unravel_examples() {
        let c = reach_identity(&r("3*2"), &p("21"), 1).unwrap();
        assert_eq!(c.end(), &p("123"));
        assert!(reach_identity(&r("3*2"), &p("123"), 0).unwrap().is_empty());
        let c = reach_identity(&r("3*1"), &p("321"), 4).unwrap();
        assert!(c.end().is_identity());
        assert_eq!(replay(&c, &r("3*1")).unwrap(), *c.end());
        assert!(matches!(
            reach_identity(&r("12*"), &p("21"), 2),
            Err(Error::WrongCategory(_))
        ));
    }

    #[test]
    fn certificate_json_shape() {
        let c = find_path(&r("31*"), &p("12345"), &p("2134"), 5)
            .unwrap()
            .unwrap();
        let text = serde_json::to_string(&c).unwrap();
        assert!(text.contains("\"direction\":\"forward\""));
        let back: Certificate = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
    }
}
