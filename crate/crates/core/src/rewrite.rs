//! The replacement engine for the eighteen rules `123 <-> beta`, where beta
//! holds one star and two of the integers `{1, 2, 3}`.
//!
//! A forward step (`123 -> beta`) picks a copy of 123 and is otherwise
//! deterministic. A backward step (`beta -> 123`) picks two elements forming
//! a copy of beta's integers, a gap for the star, and the relative value of
//! the element that the star turns into.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pattern::{increasing_triples, Entry, StarString};
use crate::perm::Permutation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    Decreasing,
    DropOnly,
    Shift,
    SwitchNeighborDrop,
}

impl Category {
    pub fn name(self) -> &'static str {
        match self {
            Category::Decreasing => "decreasing",
            Category::DropOnly => "drop-only",
            Category::Shift => "shift",
            Category::SwitchNeighborDrop => "switch-neighbor-drop",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One of the eighteen legal right-hand sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rule {
    /// 1-based position of the star.
    star: usize,
    /// beta read left to right, 0 at the star.
    beta: [u8; 3],
}

impl Rule {
    pub fn new(beta: [u8; 3]) -> Result<Self> {
        let stars: Vec<usize> = (0..3).filter(|&i| beta[i] == 0).collect();
        let ints: Vec<u8> = beta.iter().copied().filter(|&v| v != 0).collect();
        let legal =
            stars.len() == 1 && ints.iter().all(|v| (1..=3).contains(v)) && ints[0] != ints[1];
        if !legal {
            return Err(Error::IllegalBeta(beta_text(beta)));
        }
        Ok(Rule {
            star: stars[0] + 1,
            beta,
        })
    }

    /// All eighteen rules, grouped by category.
    pub fn all() -> Vec<Rule> {
        const ORDER: [&str; 18] = [
            "*32", "21*", "*31", "2*1", "3*2", "31*", "*21", "3*1", "32*", // decreasing
            "*23", "1*3", "12*", // drop only
            "*12", "23*", // shift
            "1*2", "13*", "*13", "2*3", // switch with neighbor and drop
        ];
        ORDER.iter().map(|b| b.parse().unwrap()).collect()
    }

    pub fn star_pos(&self) -> usize {
        self.star
    }

    /// Integer at 1-based position `t` of beta; 0 at the star.
    pub fn role(&self, t: usize) -> u8 {
        self.beta[t - 1]
    }

    /// The element of `{1, 2, 3}` absent from beta.
    pub fn missing_rank(&self) -> u8 {
        6 - self.beta.iter().map(|&v| v as u32).sum::<u32>() as u8
    }

    /// beta's two integers, left to right.
    pub fn integers(&self) -> (u8, u8) {
        let ints: Vec<u8> = self.beta.iter().copied().filter(|&v| v != 0).collect();
        (ints[0], ints[1])
    }

    pub fn category(&self) -> Category {
        let (a, b) = self.integers();
        if a > b {
            return Category::Decreasing;
        }
        // increasing: compare integer positions with their positions in 123
        let pos_a: i32 = if self.star == 1 { 2 } else { 1 };
        let pos_b: i32 = if self.star == 3 { 2 } else { 3 };
        match (pos_a - i32::from(a), pos_b - i32::from(b)) {
            (0, 0) => Category::DropOnly,
            (da, db) if da == db => Category::Shift,
            _ => Category::SwitchNeighborDrop,
        }
    }

    pub fn beta(&self) -> StarString {
        let entries = self
            .beta
            .iter()
            .map(|&v| {
                if v == 0 {
                    Entry::Star
                } else {
                    Entry::Int(v as u32)
                }
            })
            .collect();
        StarString::new(entries).expect("legal beta")
    }

    pub fn reverse_complement(&self) -> Rule {
        let mut beta = [0u8; 3];
        for (i, &v) in self.beta.iter().enumerate() {
            beta[2 - i] = if v == 0 { 0 } else { 4 - v };
        }
        Rule::new(beta).expect("reverse complement of a legal beta is legal")
    }

    /// Forward sites: every copy of 123, in lexicographic order.
    pub fn forward_sites(&self, p: &Permutation) -> Vec<ForwardMove> {
        forward_sites(p)
    }

    pub fn apply_forward(&self, p: &Permutation, m: ForwardMove) -> Result<Permutation> {
        let n = p.len();
        let ForwardMove { i, j, k } = m;
        let valid = 1 <= i && i < j && j < k && k <= n && p.at(i) < p.at(j) && p.at(j) < p.at(k);
        if !valid {
            return Err(Error::InvalidSite(i, j, k));
        }
        let mut out = Vec::with_capacity(n);
        self.forward_into(p.values(), [i - 1, j - 1, k - 1], &mut out);
        Ok(Permutation::from_vec_unchecked(out))
    }

    /// Raw forward step on 0-based positions of a 123 copy; writes the
    /// normalized result into `out`.
    pub fn forward_into(&self, v: &[u8], site: [usize; 3], out: &mut Vec<u8>) {
        let a = [v[site[0]], v[site[1]], v[site[2]]];
        let dropped = a[self.missing_rank() as usize - 1];
        let removed = site[self.star - 1];
        out.clear();
        for (idx, &x) in v.iter().enumerate() {
            if idx == removed {
                continue;
            }
            let mut val = x;
            for t in 0..3 {
                if site[t] == idx {
                    val = a[self.beta[t] as usize - 1];
                }
            }
            out.push(if val > dropped { val - 1 } else { val });
        }
    }

    pub fn backward_moves(&self, p: &Permutation) -> Vec<BackwardMove> {
        let mut out = Vec::new();
        self.for_each_backward(p.values(), |m| out.push(m));
        out
    }

    /// Visits legal backward moves in lexicographic `(p1, p2, gap, fresh)` order.
    pub fn for_each_backward(&self, v: &[u8], mut visit: impl FnMut(BackwardMove)) {
        let n = v.len();
        let (b1, b2) = self.integers();
        let z = self.missing_rank();
        for p1 in 1..=n {
            for p2 in p1 + 1..=n {
                let (u1, u2) = (v[p1 - 1], v[p2 - 1]);
                if (u1 < u2) != (b1 < b2) {
                    continue;
                }
                let (gaps, fresh) =
                    self.ranges(n, p1, p2, u1.min(u2) as usize, u1.max(u2) as usize, z);
                for gap in gaps.clone() {
                    for f in fresh.clone() {
                        visit(BackwardMove {
                            p1,
                            p2,
                            gap,
                            fresh: f,
                        });
                    }
                }
            }
        }
    }

    fn ranges(
        &self,
        n: usize,
        p1: usize,
        p2: usize,
        lo: usize,
        hi: usize,
        z: u8,
    ) -> (
        std::ops::RangeInclusive<usize>,
        std::ops::RangeInclusive<usize>,
    ) {
        let gaps = match self.star {
            1 => 0..=p1 - 1,
            2 => p1..=p2 - 1,
            _ => p2..=n,
        };
        let fresh = match z {
            1 => 1..=lo,
            2 => lo + 1..=hi,
            _ => hi + 1..=n + 1,
        };
        (gaps, fresh)
    }

    pub fn is_legal_backward(&self, p: &Permutation, m: BackwardMove) -> bool {
        let n = p.len();
        let BackwardMove { p1, p2, gap, fresh } = m;
        if !(1 <= p1 && p1 < p2 && p2 <= n) {
            return false;
        }
        let (u1, u2) = (p.at(p1), p.at(p2));
        let (b1, b2) = self.integers();
        if (u1 < u2) != (b1 < b2) {
            return false;
        }
        let (gaps, fr) = self.ranges(
            n,
            p1,
            p2,
            u1.min(u2) as usize,
            u1.max(u2) as usize,
            self.missing_rank(),
        );
        gaps.contains(&gap) && fr.contains(&fresh)
    }

    pub fn apply_backward(&self, p: &Permutation, m: BackwardMove) -> Result<Permutation> {
        if !self.is_legal_backward(p, m) {
            return Err(Error::IllegalMove(format!("{m} on {p} under {self}")));
        }
        let mut out = Vec::with_capacity(p.len() + 1);
        self.backward_into(p.values(), m, &mut out);
        Ok(Permutation::from_vec_unchecked(out))
    }

    /// Raw backward step; `m` must be legal for `v`.
    pub fn backward_into(&self, v: &[u8], m: BackwardMove, out: &mut Vec<u8>) {
        let fresh = m.fresh as u8;
        let bump = |x: u8| if x >= fresh { x + 1 } else { x };
        out.clear();
        out.extend(v[..m.gap].iter().map(|&x| bump(x)));
        out.push(fresh);
        out.extend(v[m.gap..].iter().map(|&x| bump(x)));
        // slots in the (n+1)-long result, left to right
        let shifted = |pos: usize| if pos <= m.gap { pos - 1 } else { pos };
        let mut slots = [m.gap, shifted(m.p1), shifted(m.p2)];
        slots.sort_unstable();
        let mut vals = [out[slots[0]], out[slots[1]], out[slots[2]]];
        vals.sort_unstable();
        for (s, v) in slots.iter().zip(vals) {
            out[*s] = v;
        }
    }

    /// Deduplicated one-step results: forward (shorter) and backward (longer).
    pub fn neighbors(&self, p: &Permutation) -> (BTreeSet<Permutation>, BTreeSet<Permutation>) {
        (self.down(p), self.up(p))
    }

    /// Distinct results of one forward step.
    pub fn down(&self, p: &Permutation) -> BTreeSet<Permutation> {
        let mut down = BTreeSet::new();
        let mut buf = Vec::new();
        increasing_triples(p.values(), |i, j, k| {
            self.forward_into(p.values(), [i, j, k], &mut buf);
            down.insert(Permutation::from_vec_unchecked(buf.clone()));
        });
        down
    }

    /// Distinct results of one backward step.
    pub fn up(&self, p: &Permutation) -> BTreeSet<Permutation> {
        let mut up = BTreeSet::new();
        let mut buf = Vec::new();
        self.for_each_backward(p.values(), |m| {
            self.backward_into(p.values(), m, &mut buf);
            up.insert(Permutation::from_vec_unchecked(buf.clone()));
        });
        up
    }
}

fn beta_text(beta: [u8; 3]) -> String {
    beta.iter()
        .map(|&v| if v == 0 { '*' } else { char::from(b'0' + v) })
        .collect()
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&beta_text(self.beta))
    }
}

impl FromStr for Rule {
    type Err = Error;

    /// Parses a bare beta such as `3*2`.
    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let chars: Vec<char> = text.chars().collect();
        if chars.len() != 3 {
            return Err(Error::IllegalBeta(text.to_string()));
        }
        let mut beta = [0u8; 3];
        for (slot, c) in beta.iter_mut().zip(&chars) {
            *slot = match c {
                '*' => 0,
                '1'..='9' => *c as u8 - b'0',
                _ => return Err(Error::IllegalBeta(text.to_string())),
            };
        }
        Rule::new(beta).map_err(|_| Error::IllegalBeta(text.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Both,
    Forward,
    Backward,
}

/// A rule together with the direction(s) named in its text form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RuleSpec {
    pub rule: Rule,
    pub direction: Direction,
}

impl FromStr for RuleSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let (direction, beta) = if let Some(b) = compact.strip_prefix("123<->") {
            (Direction::Both, b)
        } else if let Some(b) = compact.strip_prefix("123->") {
            (Direction::Forward, b)
        } else if let Some(b) = compact.strip_suffix("->123") {
            (Direction::Backward, b)
        } else if compact.len() == 3 && compact.contains('*') {
            (Direction::Both, compact.as_str())
        } else {
            return Err(Error::MalformedRule(text.to_string()));
        };
        Ok(RuleSpec {
            rule: beta.parse()?,
            direction,
        })
    }
}

impl fmt::Display for RuleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.direction {
            Direction::Both => write!(f, "123<->{}", self.rule),
            Direction::Forward => write!(f, "123->{}", self.rule),
            Direction::Backward => write!(f, "{}->123", self.rule),
        }
    }
}

impl Rule {
    /// Canonical bidirectional text, e.g. `123<->3*2`.
    pub fn text(&self) -> String {
        RuleSpec {
            rule: *self,
            direction: Direction::Both,
        }
        .to_string()
    }
}

/// A chosen copy of 123, 1-based positions `i < j < k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ForwardMove {
    pub i: usize,
    pub j: usize,
    pub k: usize,
}

impl fmt::Display for ForwardMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "site {},{},{}", self.i, self.j, self.k)
    }
}

/// Two chosen positions, the star gap (slot `g` sits between positions `g`
/// and `g + 1`), and the value the inserted element takes once existing
/// values `>= fresh` move up by one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BackwardMove {
    pub p1: usize,
    pub p2: usize,
    pub gap: usize,
    pub fresh: usize,
}

impl fmt::Display for BackwardMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "pair {},{} gap {} fresh {}",
            self.p1, self.p2, self.gap, self.fresh
        )
    }
}

pub fn forward_sites(p: &Permutation) -> Vec<ForwardMove> {
    let mut out = Vec::new();
    increasing_triples(p.values(), |i, j, k| {
        out.push(ForwardMove {
            i: i + 1,
            j: j + 1,
            k: k + 1,
        })
    });
    out
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

    fn fw(i: usize, j: usize, k: usize) -> ForwardMove {
        ForwardMove { i, j, k }
    }

    fn bw(p1: usize, p2: usize, gap: usize, fresh: usize) -> BackwardMove {
        BackwardMove { p1, p2, gap, fresh }
    }

    #[test]
    fn parse_rule_examples() {
        let spec: RuleSpec = "123->3*2".parse().unwrap();
        assert_eq!(spec.direction, Direction::Forward);
        assert_eq!(spec.rule.star_pos(), 2);
        assert_eq!(spec.rule.missing_rank(), 1);
        assert_eq!(spec.rule.category(), Category::Decreasing);

        let spec: RuleSpec = "123<->13*".parse().unwrap();
        assert_eq!(spec.direction, Direction::Both);
        assert_eq!(spec.rule.star_pos(), 3);
        assert_eq!(spec.rule.missing_rank(), 2);
        assert_eq!(spec.rule.category(), Category::SwitchNeighborDrop);

        let spec: RuleSpec = "*12->123".parse().unwrap();
        assert_eq!(spec.direction, Direction::Backward);
        assert_eq!(spec.to_string(), "*12->123");

        assert!(matches!(
            "123->132".parse::<RuleSpec>(),
            Err(Error::IllegalBeta(_))
        ));
        assert!(matches!(
            "123->1*1".parse::<RuleSpec>(),
            Err(Error::IllegalBeta(_))
        ));
        assert!(matches!(
            "123=>1*2".parse::<RuleSpec>(),
            Err(Error::MalformedRule(_))
        ));
        assert!("123->*4*".parse::<RuleSpec>().is_err());
    }

    #[test]
    fn categories_partition_the_eighteen() {
        let all = Rule::all();
        assert_eq!(all.len(), 18);
        let names = |c: Category| -> Vec<String> {
            all.iter()
                .filter(|x| x.category() == c)
                .map(|x| x.to_string())
                .collect()
        };
        assert_eq!(
            names(Category::Decreasing),
            ["*32", "21*", "*31", "2*1", "3*2", "31*", "*21", "3*1", "32*"]
        );
        assert_eq!(names(Category::DropOnly), ["*23", "1*3", "12*"]);
        assert_eq!(names(Category::Shift), ["*12", "23*"]);
        assert_eq!(
            names(Category::SwitchNeighborDrop),
            ["1*2", "13*", "*13", "2*3"]
        );
        let distinct: BTreeSet<_> = all.iter().collect();
        assert_eq!(distinct.len(), 18);
    }

    #[test]
    fn reverse_complement_pairs() {
        assert_eq!(r("13*").reverse_complement(), r("*13"));
        assert_eq!(r("12*").reverse_complement(), r("*23"));
        assert_eq!(r("3*2").reverse_complement(), r("2*1"));
        assert_eq!(r("1*2").reverse_complement(), r("2*3"));
        assert_eq!(r("1*3").reverse_complement(), r("1*3"));
        for rule in Rule::all() {
            assert_eq!(rule.reverse_complement().reverse_complement(), rule);
            assert_eq!(rule.reverse_complement().category(), rule.category());
        }
    }

    #[test]
    fn forward_sites_examples() {
        let sites = forward_sites(&p("14253"));
        assert!(sites.contains(&fw(1, 3, 4)));
        assert!(forward_sites(&Permutation::reverse_identity(6)).is_empty());
        assert_eq!(forward_sites(&p("1234")).len(), 4);
    }

    #[test]
    fn apply_forward_examples() {
        assert_eq!(
            r("3*2").apply_forward(&p("14253"), fw(1, 3, 4)).unwrap(),
            p("4312")
        );
        assert_eq!(
            r("31*").apply_forward(&p("12345"), fw(1, 2, 3)).unwrap(),
            p("2134")
        );
        assert_eq!(
            r("12*").apply_forward(&p("1234"), fw(1, 2, 3)).unwrap(),
            p("123")
        );
        assert_eq!(
            r("3*2").apply_forward(&p("14253"), fw(1, 2, 3)),
            Err(Error::InvalidSite(1, 2, 3))
        );
        assert!(r("3*2").apply_forward(&p("123"), fw(1, 2, 4)).is_err());
    }

    #[test]
    fn backward_moves_examples() {
        assert_eq!(r("*12").backward_moves(&p("12")), vec![bw(1, 2, 0, 3)]);
        assert!(r("*12")
            .backward_moves(&Permutation::reverse_identity(5))
            .is_empty());

        let rule = r("3*1");
        let moves = rule.backward_moves(&p("3124"));
        let on_pair: Vec<_> = moves.iter().filter(|m| (m.p1, m.p2) == (1, 2)).collect();
        assert_eq!(on_pair, vec![&bw(1, 2, 1, 2), &bw(1, 2, 1, 3)]);
        let results: Vec<_> = on_pair
            .iter()
            .map(|m| rule.apply_backward(&p("3124"), **m).unwrap())
            .collect();
        assert!(results.contains(&p("12435")));
    }

    #[test]
    fn apply_backward_examples() {
        assert_eq!(
            r("3*2").apply_backward(&p("21"), bw(1, 2, 1, 1)).unwrap(),
            p("123")
        );
        assert_eq!(
            r("*12").apply_backward(&p("12"), bw(1, 2, 0, 3)).unwrap(),
            p("123")
        );
        assert_eq!(
            r("3*1")
                .apply_backward(&p("12435"), bw(3, 4, 3, 4))
                .unwrap(),
            p("123456")
        );
        assert!(matches!(
            r("3*2").apply_backward(&p("21"), bw(1, 2, 0, 1)),
            Err(Error::IllegalMove(_))
        ));
        assert!(r("3*2").apply_backward(&p("21"), bw(1, 2, 1, 2)).is_err());
    }

    #[test]
    fn neighbors_examples() {
        for rule in [r("*12"), r("23*")] {
            let (down, up) = rule.neighbors(&Permutation::reverse_identity(4));
            assert!(down.is_empty() && up.is_empty());
        }
        let (down, _) = r("13*").neighbors(&p("123"));
        assert_eq!(down.into_iter().collect::<Vec<_>>(), vec![p("12")]);
        let (down, up) = r("3*2").neighbors(&p("21"));
        assert!(down.is_empty());
        assert!(up.contains(&p("123")));
    }

    #[test]
    fn intermediate_string_of_worked_example() {
        // 14253 under 123 -> 3*2 on the copy 125: the star replaces the 2
        let inter: StarString = "54*23".parse().unwrap();
        let copies = crate::pattern::star_occurrences(&inter, &r("3*2").beta());
        assert!(copies.contains(&vec![1, 3, 4]));
    }
}
