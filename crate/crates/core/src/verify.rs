//! Reconciles the closed-form classification with bounded search and
//! produces per-claim reports.
//!
//! A merge that the classification forbids is a FAIL. A separation that
//! the classification says should not exist is only INCONCLUSIVE, since a
//! connecting path may need to climb above the search ceiling.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::classify::{
    p_canonical, p_canonical_trace, primitive, signature_of, switch_canonical, ClassSignature,
    Gamma, Triple,
};
use crate::error::{Error, Result};
use crate::explore::{
    compute_partition, enumerate_permutations, find_path, reach_identity, replay, Partition, GUARD,
};
use crate::pattern::avoids_123;
use crate::perm::{normalize, Permutation};
use crate::rewrite::{forward_sites, Category, Rule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Inconclusive,
    Fail,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Inconclusive => 2,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Inconclusive => "INCONCLUSIVE",
            Status::Fail => "FAIL",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// The claim being checked, in words.
    pub anchor: String,
    pub status: Status,
    pub details: String,
}

impl Check {
    fn new(name: &str, anchor: &str, status: Status, details: impl Into<String>) -> Self {
        Check {
            name: name.to_string(),
            anchor: anchor.to_string(),
            status,
            details: details.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub subject: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_len: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slack: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub checks: Vec<Check>,
    pub overall: Status,
}

impl Report {
    fn new(subject: impl Into<String>) -> Self {
        Report {
            subject: subject.into(),
            rule: None,
            max_len: None,
            slack: None,
            samples: None,
            seed: None,
            checks: Vec::new(),
            overall: Status::Pass,
        }
    }

    fn push(&mut self, check: Check) {
        self.overall = self.overall.max(check.status);
        self.checks.push(check);
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json_value(&self) -> Value {
        serde_json::to_value(self).expect("plain data")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut head = self.subject.clone();
        for (k, v) in [
            ("max_len", self.max_len.map(|x| x as u64)),
            ("slack", self.slack.map(|x| x as u64)),
            ("samples", self.samples.map(|x| x as u64)),
            ("seed", self.seed),
        ] {
            if let Some(v) = v {
                head.push_str(&format!(" {k}={v}"));
            }
        }
        out.push_str(&head);
        out.push('\n');
        for c in &self.checks {
            out.push_str(&format!(
                "  {:<12} {}: {}\n",
                c.status.to_string(),
                c.name,
                c.details
            ));
        }
        out.push_str(&format!("  overall: {}\n", self.overall));
        out
    }
}

/// Combined status of several reports.
pub fn overall(reports: &[Report]) -> Status {
    reports
        .iter()
        .map(|r| r.overall)
        .max()
        .unwrap_or(Status::Pass)
}

/// Default `(max_len, slack)` per category.
pub fn default_scale(category: Category) -> (usize, usize) {
    match category {
        Category::Decreasing => (5, 4),
        Category::DropOnly => (6, 0),
        Category::Shift => (6, 3),
        Category::SwitchNeighborDrop => (7, 2),
    }
}

fn anchor_for(category: Category) -> &'static str {
    match category {
        Category::Decreasing => "five classes: {e}, {1}, {12}, {123,21}, all else",
        Category::DropOnly => "one class per 123-avoiding primitive",
        Category::Shift => "each reverse identity isolated, all else one class",
        Category::SwitchNeighborDrop => {
            "classes indexed by (m,p,v) plus isolated reverse identities"
        }
    }
}

fn shortest_members(members: &[Permutation]) -> Vec<&Permutation> {
    let min = members.iter().map(|m| m.len()).min().unwrap_or(0);
    members.iter().filter(|m| m.len() == min).collect()
}

/// Searches until the class count matches the signature count, raising the
/// slack one step at a time when `auto_escalate` is set.
pub fn verify_rule(
    rule: &Rule,
    max_len: usize,
    slack: usize,
    auto_escalate: bool,
) -> Result<Report> {
    if max_len + slack > GUARD {
        return Err(Error::GuardExceeded(max_len + slack, GUARD));
    }
    let theory = theory_count(rule, max_len)?;
    let mut slack = slack;
    loop {
        let part = compute_partition(rule, max_len, slack, true)?;
        let short = part.classes.len() > theory;
        if short && auto_escalate && max_len + slack < GUARD {
            slack += 1;
            continue;
        }
        return verify_partition(rule, &part);
    }
}

fn theory_count(rule: &Rule, max_len: usize) -> Result<usize> {
    let sigs: BTreeSet<ClassSignature> = enumerate_permutations(max_len)?
        .map(|p| signature_of(rule, &p))
        .collect();
    Ok(sigs.len())
}

/// Checks a precomputed partition (which must carry member lists).
pub fn verify_partition(rule: &Rule, part: &Partition) -> Result<Report> {
    if !part.has_members() {
        return Err(Error::BadDocument("partition has no member lists".into()));
    }
    if part.rule != *rule {
        return Err(Error::BadDocument(format!(
            "partition is for {}, not {}",
            part.rule.text(),
            rule.text()
        )));
    }
    let category = rule.category();
    let anchor = anchor_for(category);
    let mut report = Report::new(rule.text());
    report.rule = Some(rule.text());
    report.max_len = Some(part.max_len);
    report.slack = Some(part.slack);

    // class of each signature, and signatures per class
    let mut fibers: BTreeMap<ClassSignature, BTreeSet<usize>> = BTreeMap::new();
    let mut class_sig: Vec<ClassSignature> = Vec::new();
    let mut merge_failure: Option<String> = None;
    for (idx, class) in part.classes.iter().enumerate() {
        let mut sig_here: Option<ClassSignature> = None;
        for m in class.members.iter().flatten() {
            let sig = signature_of(rule, m);
            fibers.entry(sig.clone()).or_default().insert(idx);
            match &sig_here {
                None => sig_here = Some(sig),
                Some(first) if *first != sig && merge_failure.is_none() => {
                    let rep = &class.min_rep;
                    let cert = find_path(rule, rep, m, part.ceiling())?
                        .map(|c| serde_json::to_string(&c).expect("plain data"))
                        .unwrap_or_else(|| "none within ceiling".into());
                    merge_failure = Some(format!(
                        "{rep} [{first}] and {m} [{sig}] share a class; certificate {cert}"
                    ));
                }
                Some(_) => {}
            }
        }
        class_sig.push(sig_here.expect("classes are nonempty"));
    }

    let theory = fibers.len();
    let found = part.classes.len();
    let count_status = match found.cmp(&theory) {
        std::cmp::Ordering::Equal => Status::Pass,
        std::cmp::Ordering::Greater => Status::Inconclusive,
        std::cmp::Ordering::Less => Status::Fail,
    };
    report.push(Check::new(
        "class-count",
        anchor,
        count_status,
        format!(
            "{found} classes found, {theory} signatures realized up to length {}",
            part.max_len
        ),
    ));

    let split = fibers.iter().find(|(_, classes)| classes.len() > 1);
    let fiber_check = match (&merge_failure, split) {
        (Some(msg), _) => Check::new("fibers", anchor, Status::Fail, msg.clone()),
        (None, Some((sig, classes))) => {
            let reps: Vec<String> = classes
                .iter()
                .take(2)
                .map(|&i| part.classes[i].min_rep.to_string())
                .collect();
            Check::new(
                "fibers",
                anchor,
                Status::Inconclusive,
                format!(
                    "signature [{sig}] spread over {} classes (e.g. {}); no path within ceiling {}",
                    classes.len(),
                    reps.join(" and "),
                    part.ceiling()
                ),
            )
        }
        (None, None) => Check::new(
            "fibers",
            anchor,
            Status::Pass,
            "every class is exactly one signature fiber",
        ),
    };
    report.push(fiber_check);

    match category {
        Category::Decreasing => decreasing_checks(rule, part, &mut report)?,
        Category::DropOnly => drop_only_checks(part, &class_sig, &mut report),
        Category::Shift => shift_checks(rule, part, &mut report)?,
        Category::SwitchNeighborDrop => switch_checks(rule, part, &class_sig, &mut report)?,
    }
    Ok(report)
}

fn decreasing_checks(rule: &Rule, part: &Partition, report: &mut Report) -> Result<()> {
    let membership = part.membership();
    let expected: [&[&str]; 4] = [&["e"], &["1"], &["12"], &["21", "123"]];
    let mut status = Status::Pass;
    let mut notes = Vec::new();
    for want in expected {
        let want: BTreeSet<Permutation> = want
            .iter()
            .map(|s| s.parse::<Permutation>().unwrap())
            .filter(|p| p.len() <= part.max_len)
            .collect();
        let Some(first) = want.iter().next() else {
            continue;
        };
        let got: BTreeSet<Permutation> = part.classes[membership[first]]
            .members
            .iter()
            .flatten()
            .cloned()
            .collect();
        let names = |s: &BTreeSet<Permutation>| {
            s.iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        if got != want {
            let st = if got.is_superset(&want) {
                Status::Fail
            } else {
                Status::Inconclusive
            };
            status = status.max(st);
            notes.push(format!(
                "expected {{{}}}, found {{{}}}",
                names(&want),
                names(&got)
            ));
        }
    }
    let details = if notes.is_empty() {
        "the four finite classes have exactly their stated members".to_string()
    } else {
        notes.join("; ")
    };
    report.push(Check::new(
        "finite-classes",
        "{e}, {1}, {12}, {123,21} are closed",
        status,
        details,
    ));

    // every permutation reaches an identity; the spot check covers length <= 5
    let limit = part.max_len.min(5);
    let perms: Vec<Permutation> = enumerate_permutations(limit)?.collect();
    let outcomes: Vec<std::result::Result<usize, String>> = perms
        .par_iter()
        .map(|p| match reach_identity(rule, p, part.slack) {
            Ok(c) => match replay(&c, rule) {
                Ok(end) if end.is_identity() => Ok(c.len()),
                Ok(end) => Err(format!("certificate from {p} ends at {end}")),
                Err(e) => Err(format!("certificate from {p} does not replay: {e}")),
            },
            Err(Error::NotReached { .. }) => Ok(usize::MAX),
            Err(e) => Err(e.to_string()),
        })
        .collect();
    let mut status = Status::Pass;
    let mut details = String::new();
    let mut longest = 0;
    for (p, out) in perms.iter().zip(&outcomes) {
        match out {
            Ok(usize::MAX) => {
                if status == Status::Pass {
                    details = format!("{p} reaches no identity within slack {}", part.slack);
                }
                status = status.max(Status::Inconclusive);
            }
            Ok(len) => longest = longest.max(*len),
            Err(msg) => {
                status = Status::Fail;
                details = msg.clone();
            }
        }
    }
    if status == Status::Pass {
        details = format!(
            "all {} permutations of length <= {limit} reach an identity (longest certificate {longest} steps)",
            perms.len()
        );
    }
    report.push(Check::new(
        "unraveling",
        "every permutation is equivalent to an identity",
        status,
        details,
    ));
    Ok(())
}

fn drop_only_checks(part: &Partition, class_sig: &[ClassSignature], report: &mut Report) {
    let mut bad = None;
    for (class, sig) in part.classes.iter().zip(class_sig) {
        let members = class.members.as_ref().unwrap();
        let shortest = shortest_members(members);
        let ok = shortest.len() == 1 && *sig == ClassSignature::Avoider(shortest[0].clone());
        if !ok && bad.is_none() {
            bad = Some(format!(
                "class of {} has shortest members [{}] but signature [{sig}]",
                class.min_rep,
                shortest
                    .iter()
                    .map(|p| p.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            ));
        }
    }
    report.push(match bad {
        None => Check::new(
            "primitive-is-shortest",
            "the primitive is the unique shortest class member",
            Status::Pass,
            format!(
                "{} classes, each with a unique shortest member equal to its primitive",
                part.classes.len()
            ),
        ),
        Some(msg) => Check::new(
            "primitive-is-shortest",
            "the primitive is the unique shortest class member",
            Status::Fail,
            msg,
        ),
    });

    let avoiders = enumerate_permutations(part.max_len)
        .expect("within guard")
        .filter(avoids_123)
        .count();
    let status = if avoiders == part.classes.len() {
        Status::Pass
    } else if part.classes.len() > avoiders {
        Status::Inconclusive
    } else {
        Status::Fail
    };
    report.push(Check::new(
        "avoider-index",
        "one class per 123-avoiding permutation",
        status,
        format!(
            "{avoiders} avoiders of length <= {}, {} classes",
            part.max_len,
            part.classes.len()
        ),
    ));
}

/// A permutation is isolated when no move applies in either direction.
fn has_no_moves(rule: &Rule, p: &Permutation) -> bool {
    forward_sites(p).is_empty() && rule.backward_moves(p).is_empty()
}

fn shift_checks(rule: &Rule, part: &Partition, report: &mut Report) -> Result<()> {
    let membership = part.membership();
    let mut problems = Vec::new();
    for n in 0..=part.max_len {
        let rid = Permutation::reverse_identity(n);
        let class = &part.classes[membership[&rid]];
        if class.size != 1 || !has_no_moves(rule, &rid) {
            problems.push(format!("rid {n} is not isolated"));
        }
    }
    report.push(Check::new(
        "isolated-reverse-identities",
        "each reverse identity is isolated",
        if problems.is_empty() {
            Status::Pass
        } else {
            Status::Fail
        },
        if problems.is_empty() {
            format!("rid 0..{} are isolated", part.max_len)
        } else {
            problems.join("; ")
        },
    ));

    let bulk = part
        .classes
        .iter()
        .filter(|c| !c.min_rep.is_reverse_identity())
        .count();
    let expected = usize::from(part.max_len >= 2);
    let status = match bulk.cmp(&expected) {
        std::cmp::Ordering::Equal => Status::Pass,
        std::cmp::Ordering::Greater => Status::Inconclusive,
        std::cmp::Ordering::Less => Status::Fail,
    };
    report.push(Check::new(
        "single-bulk",
        "all non-reverse-identities form one class",
        status,
        format!("{bulk} non-isolated classes (expected {expected})"),
    ));
    report.push(bulk_invariant(rule, part)?);
    Ok(())
}

/// Length of the run of smallest values closing the permutation, as in
/// 4 2 3 1 (run 1) or 3 4 2 1 (run 2). Under the star-last shift rule the
/// run is read from the front with the largest values instead.
pub fn trailing_min_depth(rule: &Rule, p: &Permutation) -> usize {
    let q = if rule.star_pos() == 1 {
        p.clone()
    } else {
        p.reverse_complement()
    };
    q.values()
        .iter()
        .rev()
        .zip(1u8..)
        .take_while(|(&x, want)| x == *want)
        .count()
}

/// Tests whether the trailing-minimum depth survives every move. When it
/// does, the non-isolated permutations cannot all share one class.
fn bulk_invariant(rule: &Rule, part: &Partition) -> Result<Check> {
    let anchor = "all non-reverse-identities form one class";
    let upto = (part.max_len + 1).min(8);
    let perms: Vec<Permutation> = enumerate_permutations(upto)?.collect();
    let (moves, broken) = perms
        .par_iter()
        .map(|p| {
            let depth = trailing_min_depth(rule, p);
            let (down, up) = rule.neighbors(p);
            let bad = down
                .iter()
                .chain(&up)
                .find(|q| trailing_min_depth(rule, q) != depth)
                .map(|q| (p.clone(), q.clone()));
            (down.len() + up.len(), bad)
        })
        .reduce(|| (0, None), |a, b| (a.0 + b.0, a.1.or(b.1)));
    if let Some((p, q)) = broken {
        return Ok(Check::new(
            "bulk-invariant",
            anchor,
            Status::Pass,
            format!("trailing-minimum depth is not invariant ({p} is adjacent to {q})"),
        ));
    }

    let mut by_depth: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for (idx, class) in part.classes.iter().enumerate() {
        if !class.min_rep.is_reverse_identity() {
            by_depth
                .entry(trailing_min_depth(rule, &class.min_rep))
                .or_default()
                .insert(idx);
        }
    }
    let bulk: usize = by_depth.values().map(BTreeSet::len).sum();
    let exact = by_depth.values().all(|c| c.len() == 1);
    let reps: Vec<String> = by_depth
        .iter()
        .map(|(d, c)| format!("{} (depth {d})", part.classes[*c.first().unwrap()].min_rep))
        .collect();
    let (status, what) = if by_depth.len() > 1 {
        (Status::Fail, "separates the non-isolated permutations")
    } else {
        (
            Status::Pass,
            "takes a single value on the non-isolated permutations",
        )
    };
    Ok(Check::new(
        "bulk-invariant",
        anchor,
        status,
        format!(
            "trailing-minimum depth is preserved by all {moves} moves from length <= {upto} and {what}: {}{}",
            reps.join(", "),
            if exact && bulk == by_depth.len() {
                "; each depth is exactly one class"
            } else {
                ""
            }
        ),
    ))
}

fn switch_checks(
    rule: &Rule,
    part: &Partition,
    class_sig: &[ClassSignature],
    report: &mut Report,
) -> Result<()> {
    // genuine isolation: no applicable move in either direction
    let mut mismatch = None;
    for p in enumerate_permutations(part.max_len)? {
        if has_no_moves(rule, &p) != p.is_reverse_identity() && mismatch.is_none() {
            mismatch = Some(p);
        }
    }
    let membership = part.membership();
    let rid_alone = (0..=part.max_len).all(|n| {
        let idx = membership[&Permutation::reverse_identity(n)];
        part.classes[idx].size == 1
    });
    let (status, details) = match (mismatch, rid_alone) {
        (None, true) => (
            Status::Pass,
            format!(
                "isolated permutations of length <= {} are exactly the reverse identities",
                part.max_len
            ),
        ),
        (Some(p), _) => (
            Status::Fail,
            format!("{p} breaks isolated <=> reverse identity"),
        ),
        (None, false) => (
            Status::Fail,
            "a reverse identity shares its class".to_string(),
        ),
    };
    report.push(Check::new(
        "isolated-reverse-identities",
        "each reverse identity is isolated",
        status,
        details,
    ));

    let mut bad = None;
    for (class, sig) in part.classes.iter().zip(class_sig) {
        let ClassSignature::SwitchTriple(t) = sig else {
            continue;
        };
        let shortest = shortest_members(class.members.as_ref().unwrap());
        let canon = switch_canonical(*t, rule);
        let ok = shortest.len() == 1 && canon.as_ref() == Ok(shortest[0]);
        if !ok && bad.is_none() {
            bad = Some(format!(
                "class of {} [{t}]: shortest [{}], canonical {:?}",
                class.min_rep,
                shortest
                    .iter()
                    .map(|p| p.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
                canon.map(|c| c.to_string())
            ));
        }
    }
    report.push(Check::new(
        "canonical-shortest",
        "unique shortest member has one non-extremal element",
        if bad.is_none() {
            Status::Pass
        } else {
            Status::Fail
        },
        bad.unwrap_or_else(|| {
            "every non-isolated class's shortest member is its canonical form".into()
        }),
    ));

    report.push(realized_triples(part.max_len, class_sig));
    Ok(())
}

/// Lists which `(m, p, v)` occur, against the box `1 <= p, v <= m`.
fn realized_triples(max_len: usize, class_sig: &[ClassSignature]) -> Check {
    let realized: BTreeSet<Triple> = class_sig
        .iter()
        .filter_map(|s| match s {
            ClassSignature::SwitchTriple(t) => Some(*t),
            _ => None,
        })
        .collect();
    let max_m = max_len.saturating_sub(1);
    let boxed: BTreeSet<Triple> = (1..=max_m)
        .flat_map(|m| (1..=m).flat_map(move |p| (1..=m).map(move |v| Triple { m, p, v })))
        .collect();
    let fmt_set = |s: &BTreeSet<&Triple>| {
        s.iter()
            .map(|t| t.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    let per_m: Vec<String> = (1..=max_m)
        .map(|m| format!("m={m}:{}", realized.iter().filter(|t| t.m == m).count()))
        .collect();
    let missing: BTreeSet<&Triple> = boxed.difference(&realized).collect();
    let outside: BTreeSet<&Triple> = realized.difference(&boxed).collect();
    let details = format!(
        "{} triples realized for m <= {max_m} ({}); box 1<=p,v<=m has {}; box triples not realized: [{}]; realized outside box: [{}]",
        realized.len(),
        per_m.join(" "),
        boxed.len(),
        fmt_set(&missing),
        fmt_set(&outside),
    );
    Check::new(
        "realized-triples",
        "triples (m,p,v) with 1 <= p,v <= m",
        Status::Pass,
        details,
    )
}

/// Checks that reverse complement carries the classes of `rule` onto the
/// classes of its reverse-complement rule.
pub fn verify_symmetry(rule: &Rule, max_len: usize, slack: usize) -> Result<Report> {
    let twin = rule.reverse_complement();
    let a = compute_partition(rule, max_len, slack, true)?;
    let b = compute_partition(&twin, max_len, slack, true)?;
    let b_sets: BTreeSet<BTreeSet<Permutation>> = b
        .classes
        .iter()
        .map(|c| c.members.iter().flatten().cloned().collect())
        .collect();
    let mut missing = None;
    for c in &a.classes {
        let image: BTreeSet<Permutation> = c
            .members
            .iter()
            .flatten()
            .map(|p| p.reverse_complement())
            .collect();
        if !b_sets.contains(&image) {
            missing = Some(c.min_rep.clone());
            break;
        }
    }
    let mut report = Report::new(format!("{} vs {}", rule.text(), twin.text()));
    report.rule = Some(rule.text());
    report.max_len = Some(max_len);
    report.slack = Some(slack);
    let same_count = a.classes.len() == b.classes.len();
    report.push(match (missing, same_count) {
        (None, true) => Check::new(
            "rc-bijection",
            "reverse complement maps classes to classes",
            Status::Pass,
            format!(
                "{} classes correspond under reverse complement",
                a.classes.len()
            ),
        ),
        (Some(p), _) => Check::new(
            "rc-bijection",
            "reverse complement maps classes to classes",
            Status::Fail,
            format!(
                "image of the class of {p} is not a class of {}",
                twin.text()
            ),
        ),
        (None, false) => Check::new(
            "rc-bijection",
            "reverse complement maps classes to classes",
            Status::Fail,
            format!("{} vs {} classes", a.classes.len(), b.classes.len()),
        ),
    });
    Ok(report)
}

/// Runs one maximal forward reduction choosing sites uniformly at random.
fn random_reduction(rule: &Rule, p: &Permutation, rng: &mut ChaCha8Rng) -> Permutation {
    let mut cur = p.clone();
    loop {
        let sites = forward_sites(&cur);
        let Some(&site) = sites.choose(rng) else {
            return cur;
        };
        cur = rule
            .apply_forward(&cur, site)
            .expect("site from forward_sites");
    }
}

pub const CONFLUENCE_ORDERS: usize = 5;
pub const CONFLUENCE_MAX_LEN: usize = 10;

/// Random permutations reduced in several random orders must all land on
/// the primitive (and on the leftmost-copy reduction where it applies).
pub fn verify_confluence(rule: &Rule, samples: usize, seed: u64) -> Result<Report> {
    if rule.category() != Category::DropOnly {
        return Err(Error::WrongCategory(rule.category().name()));
    }
    let gamma = Gamma::from_rule(rule);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = Report::new(format!("confluence {}", rule.text()));
    report.rule = Some(rule.text());
    report.samples = Some(samples);
    report.seed = Some(seed);

    let mut failure = None;
    let mut reductions = 0usize;
    for _ in 0..samples {
        let n = rng.gen_range(0..=CONFLUENCE_MAX_LEN);
        let mut values: Vec<u8> = (1..=n as u8).collect();
        values.shuffle(&mut rng);
        let p = Permutation::from_vec_unchecked(values);
        let prim = primitive(&p, rule)?;
        let canon = gamma.map(|g| p_canonical(&p, g));
        for _ in 0..CONFLUENCE_ORDERS {
            let end = random_reduction(rule, &p, &mut rng);
            reductions += 1;
            let agrees = end == prim && canon.as_ref().is_none_or(|c| *c == end);
            if !agrees && failure.is_none() {
                failure = Some(format!("{p} reduced to {end}, primitive {prim}"));
            }
        }
    }
    report.push(Check::new(
        "order-independence",
        "reduction result does not depend on the chosen copies",
        if failure.is_none() {
            Status::Pass
        } else {
            Status::Fail
        },
        failure.unwrap_or_else(|| {
            format!(
                "{reductions} random reductions of {samples} permutations agree with the primitive"
            )
        }),
    ));

    // the worked example, under every order
    let example: Permutation = "152364".parse().unwrap();
    if rule.to_string() == "12*" {
        let trace = p_canonical_trace(&example, Gamma::DropLargest);
        let expect: Vec<Permutation> = ["152364", "15234", "1524", "152"]
            .iter()
            .map(|s| {
                let digits: Vec<u32> = s.bytes().map(|b| (b - b'0') as u32).collect();
                normalize(&digits).unwrap()
            })
            .collect();
        let ends: BTreeSet<Permutation> = (0..CONFLUENCE_ORDERS)
            .map(|_| random_reduction(rule, &example, &mut rng))
            .collect();
        let ok = trace == expect && ends.len() == 1 && ends.contains(&"132".parse().unwrap());
        report.push(Check::new(
            "worked-example",
            "leftmost-copy reduction of 152364 ends at 132",
            if ok { Status::Pass } else { Status::Fail },
            format!(
                "trace {}",
                trace
                    .iter()
                    .map(|p| p.to_string())
                    .collect::<Vec<_>>()
                    .join(" -> ")
            ),
        ));
    }
    Ok(report)
}

/// Exhaustive check that forward and backward steps are inverse relations.
pub fn verify_inverse_adjacency(rule: &Rule, max_len: usize) -> Result<Report> {
    if max_len > 8 {
        return Err(Error::GuardExceeded(max_len, 8));
    }
    let perms: Vec<Permutation> = enumerate_permutations(max_len)?.collect();
    let outcome: Vec<(usize, usize, Option<String>)> = perms
        .par_iter()
        .map(|p| {
            let (down, up) = rule.neighbors(p);
            let mut bad = None;
            for s in &down {
                if !rule.up(s).contains(p) {
                    bad = Some(format!("{s} is a forward result of {p} but not vice versa"));
                }
            }
            for t in &up {
                if !rule.down(t).contains(p) {
                    bad = Some(format!(
                        "{t} is a backward result of {p} but not vice versa"
                    ));
                }
            }
            (down.len(), up.len(), bad)
        })
        .collect();
    let edges: usize = outcome.iter().map(|o| o.0).sum();
    let isolated = outcome.iter().filter(|o| o.0 == 0 && o.1 == 0).count();
    let failure = outcome.into_iter().find_map(|o| o.2);
    let mut report = Report::new(format!("inverse adjacency {}", rule.text()));
    report.rule = Some(rule.text());
    report.max_len = Some(max_len);
    report.push(Check::new(
        "inverse-adjacency",
        "the two replacement directions are mutually inverse",
        if failure.is_none() {
            Status::Pass
        } else {
            Status::Fail
        },
        failure.unwrap_or_else(|| {
            format!(
                "{} permutations, {edges} forward edges, {isolated} with no moves",
                perms.len()
            )
        }),
    ));
    Ok(report)
}

/// Catalan numbers by the convolution recurrence.
pub fn catalan(upto: usize) -> Vec<u64> {
    let mut c = vec![1u64];
    for k in 0..upto {
        let next = (0..=k).map(|i| c[i] * c[k - i]).sum();
        c.push(next);
    }
    c
}

pub fn catalan_check(max_len: usize) -> Result<Report> {
    if max_len > 10 {
        return Err(Error::GuardExceeded(max_len, 10));
    }
    let mut counts = vec![0u64; max_len + 1];
    for p in enumerate_permutations(max_len)? {
        if avoids_123(&p) {
            counts[p.len()] += 1;
        }
    }
    let expect = catalan(max_len);
    let mut report = Report::new("123-avoiders");
    report.max_len = Some(max_len);
    report.push(Check::new(
        "catalan-counts",
        "123-avoiders of each length are counted by the Catalan numbers",
        if counts == expect {
            Status::Pass
        } else {
            Status::Fail
        },
        format!("brute force {counts:?}, recurrence {expect:?}"),
    ));

    let part_len = max_len.min(7);
    let cumulative: u64 = counts[..=part_len].iter().sum();
    let mut found = Vec::new();
    for rule in Rule::all()
        .into_iter()
        .filter(|r| r.category() == Category::DropOnly)
    {
        let part = compute_partition(&rule, part_len, 0, false)?;
        found.push((rule, part.classes.len() as u64));
    }
    let ok = found.iter().all(|(_, n)| *n == cumulative);
    report.push(Check::new(
        "drop-only-class-counts",
        "one class per 123-avoiding permutation",
        if ok { Status::Pass } else { Status::Fail },
        format!(
            "{cumulative} avoiders of length <= {part_len}; classes {}",
            found
                .iter()
                .map(|(r, n)| format!("{r}={n}"))
                .collect::<Vec<_>>()
                .join(" ")
        ),
    ));
    Ok(report)
}

/// Every rule at its default scale, plus confluence sampling for the
/// drop-only rules.
pub fn verify_all(samples: usize, seed: u64, auto_escalate: bool) -> Result<Vec<Report>> {
    let mut reports = Vec::new();
    for rule in Rule::all() {
        let (max_len, slack) = default_scale(rule.category());
        reports.push(verify_rule(&rule, max_len, slack, auto_escalate)?);
    }
    for rule in Rule::all()
        .into_iter()
        .filter(|r| r.category() == Category::DropOnly)
    {
        reports.push(verify_confluence(&rule, samples, seed)?);
    }
    Ok(reports)
}

/// Keyed by subject, for stable machine output.
pub fn reports_json(reports: &[Report]) -> Value {
    let overall = overall(reports);
    let mut map = serde_json::Map::new();
    map.insert("overall".into(), serde_json::to_value(overall).unwrap());
    map.insert(
        "reports".into(),
        Value::Array(reports.iter().map(Report::to_json_value).collect()),
    );
    Value::Object(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rule {
        s.parse().unwrap()
    }

    #[test]
    fn status_order_and_codes() {
        assert!(Status::Fail > Status::Inconclusive && Status::Inconclusive > Status::Pass);
        assert_eq!(Status::Inconclusive.exit_code(), 2);
        assert_eq!(serde_json::to_string(&Status::Pass).unwrap(), "\"PASS\"");
    }

    #[test]
    fn catalan_recurrence() {
        assert_eq!(catalan(6), vec![1, 1, 2, 5, 14, 42, 132]);
        assert_eq!(catalan(0), vec![1]);
        assert_eq!(catalan(6).iter().sum::<u64>(), 197);
    }

    #[test]
    fn small_drop_only_passes() {
        let rep = verify_rule(&r("1*3"), 4, 0, false).unwrap();
        assert_eq!(rep.overall, Status::Pass, "{}", rep.to_text());
    }

    #[test]
    fn low_slack_is_inconclusive_not_fail() {
        // 123 and 21 cannot meet without reaching length 3, and the bulk
        // needs room to climb
        let rep = verify_rule(&r("3*2"), 4, 0, false).unwrap();
        assert_eq!(rep.overall, Status::Inconclusive, "{}", rep.to_text());
    }

    #[test]
    fn partition_without_members_is_rejected() {
        let part = compute_partition(&r("12*"), 3, 0, false).unwrap();
        assert!(verify_partition(&r("12*"), &part).is_err());
        let part = compute_partition(&r("12*"), 3, 0, true).unwrap();
        assert!(verify_partition(&r("*23"), &part).is_err());
    }

    #[test]
    fn confluence_requires_drop_only() {
        assert!(verify_confluence(&r("3*2"), 1, 0).is_err());
        let rep = verify_confluence(&r("1*3"), 20, 3).unwrap();
        assert_eq!(rep.overall, Status::Pass);
    }
}
