//! Closed-form class identification: a signature per permutation such that
//! two permutations are equivalent under a rule exactly when their
//! signatures agree. No search is involved.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pattern::first_increasing_triple;
use crate::perm::{Extremum, Permutation};
use crate::rewrite::{Category, Rule};

/// The five classes shared by all nine decreasing rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FiveClass {
    Empty,
    One,
    Twelve,
    /// `{123, 21}`
    Pair,
    Bulk,
}

impl fmt::Display for FiveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FiveClass::Empty => "{e}",
            FiveClass::One => "{1}",
            FiveClass::Twelve => "{12}",
            FiveClass::Pair => "{123,21}",
            FiveClass::Bulk => "bulk",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ShiftLabel {
    ReverseIdentity(usize),
    Bulk,
}

/// `(m, p, v)` class invariant for the switch rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Triple {
    pub m: usize,
    pub p: usize,
    pub v: usize,
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.m, self.p, self.v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClassSignature {
    FiveClass(FiveClass),
    /// The 123-avoiding primitive of the class.
    Avoider(Permutation),
    Shift(ShiftLabel),
    SwitchTriple(Triple),
    IsolatedRid(usize),
}

impl ClassSignature {
    /// Image of the signature under reverse complement, matching
    /// `signature_of(rule.reverse_complement(), p.reverse_complement())`.
    pub fn reverse_complement(&self) -> ClassSignature {
        match self {
            ClassSignature::Avoider(t) => ClassSignature::Avoider(t.reverse_complement()),
            other => other.clone(),
        }
    }
}

impl fmt::Display for ClassSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassSignature::FiveClass(c) => write!(f, "five-class {c}"),
            ClassSignature::Avoider(t) => write!(f, "avoider {t}"),
            ClassSignature::Shift(ShiftLabel::ReverseIdentity(n)) => write!(f, "rid {n}"),
            ClassSignature::Shift(ShiftLabel::Bulk) => f.write_str("bulk"),
            ClassSignature::SwitchTriple(t) => write!(f, "triple {t}"),
            ClassSignature::IsolatedRid(n) => write!(f, "isolated rid {n}"),
        }
    }
}

pub fn classify_decreasing(p: &Permutation) -> FiveClass {
    match p.values() {
        [] => FiveClass::Empty,
        [1] => FiveClass::One,
        [1, 2] => FiveClass::Twelve,
        [1, 2, 3] | [2, 1] => FiveClass::Pair,
        _ => FiveClass::Bulk,
    }
}

/// Which of the two drop rules the leftmost-copy reduction runs under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gamma {
    /// `12*`
    DropLargest,
    /// `1*3`
    DropMiddle,
}

impl Gamma {
    pub fn rule(self) -> Rule {
        match self {
            Gamma::DropLargest => "12*".parse().unwrap(),
            Gamma::DropMiddle => "1*3".parse().unwrap(),
        }
    }

    pub fn from_rule(r: &Rule) -> Option<Gamma> {
        match r.to_string().as_str() {
            "12*" => Some(Gamma::DropLargest),
            "1*3" => Some(Gamma::DropMiddle),
            _ => None,
        }
    }
}

/// Leftmost-copy reduction, returning every intermediate state (the input
/// first, the 123-avoiding fixed point last).
pub fn p_canonical_trace(p: &Permutation, gamma: Gamma) -> Vec<Permutation> {
    let rule = gamma.rule();
    let mut trace = vec![p.clone()];
    let mut cur = p.values().to_vec();
    let mut next = Vec::with_capacity(cur.len());
    while let Some((i, j, k)) = first_increasing_triple(&cur) {
        rule.forward_into(&cur, [i, j, k], &mut next);
        std::mem::swap(&mut cur, &mut next);
        trace.push(Permutation::from_vec_unchecked(cur.clone()));
    }
    trace
}

pub fn p_canonical(p: &Permutation, gamma: Gamma) -> Permutation {
    p_canonical_trace(p, gamma)
        .pop()
        .expect("trace is never empty")
}

/// Reduces by the first 123 copy until none remain. Only meaningful for
/// drop-only rules, where the result does not depend on the choices.
pub fn primitive(p: &Permutation, r: &Rule) -> Result<Permutation> {
    if r.category() != Category::DropOnly {
        return Err(Error::WrongCategory(r.category().name()));
    }
    let mut cur = p.values().to_vec();
    let mut next = Vec::with_capacity(cur.len());
    while let Some((i, j, k)) = first_increasing_triple(&cur) {
        r.forward_into(&cur, [i, j, k], &mut next);
        std::mem::swap(&mut cur, &mut next);
    }
    Ok(Permutation::from_vec_unchecked(cur))
}

pub fn shift_label(p: &Permutation) -> ShiftLabel {
    if p.is_reverse_identity() {
        ShiftLabel::ReverseIdentity(p.len())
    } else {
        ShiftLabel::Bulk
    }
}

/// The two base switch rules; `*13` and `2*3` reduce to these through
/// reverse complement.
fn switch_base(r: &Rule) -> Result<(bool, bool)> {
    // (is 13*-family, needs reverse complement)
    match r.to_string().as_str() {
        "13*" => Ok((true, false)),
        "*13" => Ok((true, true)),
        "1*2" => Ok((false, false)),
        "2*3" => Ok((false, true)),
        _ => Err(Error::WrongCategory(r.category().name())),
    }
}

fn lr_min_mask(p: &Permutation) -> Vec<bool> {
    let mut mask = vec![false; p.len()];
    for pos in p.extrema_positions(Extremum::LrMin) {
        mask[pos - 1] = true;
    }
    mask
}

/// `13*`: leftmost non-LR-minimum and the largest non-LR-minimum.
fn triple_13(p: &Permutation) -> Triple {
    let mask = lr_min_mask(p);
    let vals = p.values();
    let m = mask.iter().filter(|&&b| b).count();
    let first = mask.iter().position(|&b| !b).expect("not decreasing");
    let largest = (0..vals.len())
        .filter(|&i| !mask[i])
        .map(|i| vals[i])
        .max()
        .unwrap();
    let v = (0..vals.len())
        .filter(|&i| mask[i] && vals[i] < largest)
        .count();
    Triple { m, p: first, v }
}

/// `1*2`: rightmost non-LR-minimum (counted from the right) and the smallest
/// non-LR-minimum.
fn triple_12(p: &Permutation) -> Triple {
    let mask = lr_min_mask(p);
    let vals = p.values();
    let n = vals.len();
    let m = mask.iter().filter(|&&b| b).count();
    let last = mask.iter().rposition(|&b| !b).expect("not decreasing");
    let smallest = (0..n).filter(|&i| !mask[i]).map(|i| vals[i]).min().unwrap();
    let v = (0..n).filter(|&i| mask[i] && vals[i] < smallest).count();
    Triple {
        m,
        p: n - 1 - last,
        v,
    }
}

pub fn switch_signature(p: &Permutation, r: &Rule) -> Result<ClassSignature> {
    let (family_13, flip) = switch_base(r)?;
    let q = if flip {
        p.reverse_complement()
    } else {
        p.clone()
    };
    if q.is_reverse_identity() {
        return Ok(ClassSignature::IsolatedRid(q.len()));
    }
    let t = if family_13 {
        triple_13(&q)
    } else {
        triple_12(&q)
    };
    Ok(ClassSignature::SwitchTriple(t))
}

/// Shortest member of the class with signature `sig`: one non-LR-minimum
/// carrying value `v + 1`, everything else decreasing.
pub fn switch_canonical(sig: Triple, r: &Rule) -> Result<Permutation> {
    let (family_13, flip) = switch_base(r)?;
    let Triple { m, p, v } = sig;
    let unrealizable = Error::Unrealizable { m, p, v };
    let n = m + 1;
    if m == 0 || v > m || p > m || n > u8::MAX as usize {
        return Err(unrealizable);
    }
    // 0-based slot of the single non-LR-minimum
    let slot = match (family_13, p) {
        (true, 0) => return Err(unrealizable),
        (true, p) => p,
        (false, p) => m - p,
    };
    let mut rest: Vec<u8> = (1..=n as u8)
        .rev()
        .filter(|&x| x as usize != v + 1)
        .collect();
    rest.insert(slot, v as u8 + 1);
    let canon = Permutation::from_vec_unchecked(rest);
    let base_rule: Rule = if family_13 { "13*" } else { "1*2" }.parse().unwrap();
    if switch_signature(&canon, &base_rule)? != ClassSignature::SwitchTriple(sig) {
        return Err(unrealizable);
    }
    Ok(if flip {
        canon.reverse_complement()
    } else {
        canon
    })
}

pub fn signature_of(r: &Rule, p: &Permutation) -> ClassSignature {
    match r.category() {
        Category::Decreasing => ClassSignature::FiveClass(classify_decreasing(p)),
        Category::DropOnly => ClassSignature::Avoider(primitive(p, r).expect("drop-only rule")),
        Category::Shift => ClassSignature::Shift(shift_label(p)),
        Category::SwitchNeighborDrop => switch_signature(p, r).expect("switch rule"),
    }
}

pub fn same_class(r: &Rule, p: &Permutation, q: &Permutation) -> bool {
    signature_of(r, p) == signature_of(r, q)
}
