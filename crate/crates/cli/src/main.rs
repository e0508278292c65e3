//! `starperm` command-line entry point.
//!
//! Exit codes: 0 success or PASS, 1 FAIL, 2 INCONCLUSIVE, 64 usage error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use starperm::classify::{self, ClassSignature, Triple};
use starperm::explore::{self, Certificate, Move, Partition};
use starperm::verify::{self, Report, Status};
use starperm::{
    BackwardMove, Category, Direction, Error, ForwardMove, Permutation, Rule, RuleSpec,
};

const USAGE: u8 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "starperm", version)]
#[command(
    about = "Pattern replacements 123 <-> beta on permutations and their equivalence classes"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,

    /// Worker threads for partition search (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Apply one replacement step with explicit move parameters
    Apply {
        #[arg(long)]
        rule: RuleSpec,
        #[arg(long)]
        perm: Permutation,
        /// Forward move: positions i,j,k of a 123 copy.
        #[arg(long, value_parser = parse_list::<3>, conflicts_with_all = ["pair", "gap", "fresh"])]
        site: Option<[usize; 3]>,
        /// Backward move: positions of the two chosen elements.
        #[arg(long, value_parser = parse_list::<2>, requires_all = ["gap", "fresh"])]
        pair: Option<[usize; 2]>,
        /// Backward move: star slot (0..=n, slot g sits after position g).
        #[arg(long)]
        gap: Option<usize>,
        /// Backward move: value of the inserted element.
        #[arg(long)]
        fresh: Option<usize>,
    },
    /// All one-step results in both directions
    Neighbors {
        #[arg(long)]
        rule: RuleSpec,
        #[arg(long)]
        perm: Permutation,
    },
    /// Reduce a permutation to its primitive under a drop-only rule
    Primitive {
        #[arg(long)]
        rule: RuleSpec,
        #[arg(long)]
        perm: Permutation,
        /// Print the leftmost-copy reduction trace (12* and 1*3 only).
        #[arg(long)]
        trace: bool,
    },
    /// Closed-form class signature of a permutation
    Signature {
        #[arg(long)]
        rule: RuleSpec,
        #[arg(long)]
        perm: Permutation,
    },
    /// Shortest member of a switch-rule class, from a triple or a member
    Canonical {
        #[arg(long)]
        rule: RuleSpec,
        /// Triple m,p,v.
        #[arg(long, value_parser = parse_list::<3>, conflicts_with = "perm")]
        sig: Option<[usize; 3]>,
        #[arg(long)]
        perm: Option<Permutation>,
    },
    /// Partition all permutations up to a length by bounded search
    Classes {
        #[arg(long)]
        rule: RuleSpec,
        #[arg(long)]
        max_len: Option<usize>,
        #[arg(long)]
        slack: Option<usize>,
        /// Include member lists.
        #[arg(long)]
        members: bool,
        /// Write the partition document to a file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Shortest connecting certificate within a length ceiling
    Path {
        #[arg(long)]
        rule: RuleSpec,
        #[arg(long)]
        from: Permutation,
        #[arg(long)]
        to: Permutation,
        /// Defaults to the longer endpoint plus two.
        #[arg(long)]
        ceiling: Option<usize>,
    },
    /// Certificate reaching an identity permutation (decreasing rules)
    Unravel {
        #[arg(long)]
        rule: RuleSpec,
        #[arg(long)]
        perm: Permutation,
        #[arg(long, default_value_t = 4)]
        slack: usize,
    },
    /// Check the classification of one rule against bounded search
    Verify {
        #[arg(long)]
        rule: RuleSpec,
        #[arg(long)]
        max_len: Option<usize>,
        #[arg(long)]
        slack: Option<usize>,
        /// Raise the slack until the class count matches, within the guard.
        #[arg(long)]
        auto_slack: bool,
        /// Reuse a partition written by `classes --members --out`.
        #[arg(long = "in", conflicts_with_all = ["max_len", "slack", "auto_slack"])]
        input: Option<PathBuf>,
    },
    /// Verify all eighteen rules at their default scales
    VerifyAll {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random permutations per drop-only confluence check.
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long)]
        auto_slack: bool,
    },
    /// Reverse complement of a permutation or a rule
    Rc {
        #[arg(long, conflicts_with = "rule", required_unless_present = "rule")]
        perm: Option<Permutation>,
        #[arg(long)]
        rule: Option<RuleSpec>,
    },
}

fn parse_list<const N: usize>(text: &str) -> Result<[usize; N], String> {
    let parts: Vec<usize> = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<usize>().map_err(|_| format!("bad number {t:?}")))
        .collect::<Result<_, _>>()?;
    parts
        .try_into()
        .map_err(|_| format!("expected {N} comma-separated numbers"))
}

/// A finished command: what to print and which exit code to return.
struct Outcome {
    text: String,
    code: u8,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, code: 0 }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("plain data")
}

fn render_reports(reports: &[Report], format: Format) -> Outcome {
    let status = verify::overall(reports);
    let text = match format {
        Format::Json => pretty(&verify::reports_json(reports)),
        Format::Csv => {
            let mut out = String::from("subject,check,status,details\n");
            for r in reports {
                for c in &r.checks {
                    out.push_str(&format!(
                        "{},{},{},\"{}\"\n",
                        r.subject,
                        c.name,
                        c.status,
                        c.details.replace('"', "\"\"")
                    ));
                }
            }
            out.pop();
            out
        }
        Format::Text => {
            let mut out: String = reports.iter().map(Report::to_text).collect();
            if reports.len() > 1 {
                out.push_str(&format!("overall: {status}\n"));
            }
            out.trim_end().to_string()
        }
    };
    Outcome {
        text,
        code: status.exit_code() as u8,
    }
}

fn render_certificate(c: &Certificate, format: Format) -> String {
    match format {
        Format::Json => pretty(&serde_json::to_value(c).expect("plain data")),
        Format::Text | Format::Csv => {
            let mut out = c.start.to_string();
            for step in &c.steps {
                let mv = match step.mv {
                    Move::Forward(m) => format!("forward {m}"),
                    Move::Backward(m) => format!("backward {m}"),
                };
                out.push_str(&format!("\n  {mv} -> {}", step.result));
            }
            out
        }
    }
}

fn scale(rule: &Rule, max_len: Option<usize>, slack: Option<usize>) -> (usize, usize) {
    let (l, s) = verify::default_scale(rule.category());
    (max_len.unwrap_or(l), slack.unwrap_or(s))
}

fn run(cli: Cli) -> Result<Outcome, Error> {
    let format = cli.format;
    match cli.command {
        Command::Apply {
            rule,
            perm,
            site,
            pair,
            gap,
            fresh,
        } => {
            let result = match (site, pair, gap, fresh) {
                (Some([i, j, k]), None, _, _) if rule.direction != Direction::Backward => {
                    rule.rule.apply_forward(&perm, ForwardMove { i, j, k })?
                }
                (None, Some([p1, p2]), Some(gap), Some(fresh))
                    if rule.direction != Direction::Forward =>
                {
                    rule.rule
                        .apply_backward(&perm, BackwardMove { p1, p2, gap, fresh })?
                }
                _ => {
                    return Err(Error::IllegalMove(
                        "give --site for a forward step or --pair/--gap/--fresh for a backward step, matching the rule's direction"
                            .into(),
                    ))
                }
            };
            Ok(Outcome::ok(match format {
                Format::Json => pretty(&json!({ "result": result })),
                _ => result.to_string(),
            }))
        }
        Command::Neighbors { rule, perm } => {
            let (down, up) = rule.rule.neighbors(&perm);
            let down: Vec<Permutation> = if rule.direction == Direction::Backward {
                Vec::new()
            } else {
                down.into_iter().collect()
            };
            let up: Vec<Permutation> = if rule.direction == Direction::Forward {
                Vec::new()
            } else {
                up.into_iter().collect()
            };
            let join = |v: &[Permutation]| v.iter().map(|p| p.to_string()).collect::<Vec<_>>();
            Ok(Outcome::ok(match format {
                Format::Json => pretty(&json!({ "down": down, "up": up })),
                Format::Csv => {
                    let mut rows = vec!["direction,permutation".to_string()];
                    rows.extend(join(&down).into_iter().map(|p| format!("down,{p}")));
                    rows.extend(join(&up).into_iter().map(|p| format!("up,{p}")));
                    rows.join("\n")
                }
                Format::Text => format!(
                    "down ({}): {}\nup ({}): {}",
                    down.len(),
                    join(&down).join(" "),
                    up.len(),
                    join(&up).join(" ")
                ),
            }))
        }
        Command::Primitive { rule, perm, trace } => {
            let prim = classify::primitive(&perm, &rule.rule)?;
            let steps = if trace {
                let gamma = classify::Gamma::from_rule(&rule.rule)
                    .ok_or(Error::WrongCategory("leftmost-copy trace needs 12* or 1*3"))?;
                classify::p_canonical_trace(&perm, gamma)
            } else {
                Vec::new()
            };
            Ok(Outcome::ok(match format {
                Format::Json if trace => pretty(&json!({ "primitive": prim, "trace": steps })),
                Format::Json => pretty(&json!({ "primitive": prim })),
                _ if trace => steps
                    .iter()
                    .map(|p| p.to_string())
                    .collect::<Vec<_>>()
                    .join("\n"),
                _ => prim.to_string(),
            }))
        }
        Command::Signature { rule, perm } => {
            let sig = classify::signature_of(&rule.rule, &perm);
            Ok(Outcome::ok(match format {
                Format::Json => pretty(&serde_json::to_value(&sig).expect("plain data")),
                _ => sig.to_string(),
            }))
        }
        Command::Canonical { rule, sig, perm } => {
            let canon = match (sig, perm) {
                (Some([m, p, v]), None) => {
                    classify::switch_canonical(Triple { m, p, v }, &rule.rule)?
                }
                (None, Some(perm)) => match rule.rule.category() {
                    Category::DropOnly => classify::primitive(&perm, &rule.rule)?,
                    Category::SwitchNeighborDrop => {
                        match classify::switch_signature(&perm, &rule.rule)? {
                            ClassSignature::SwitchTriple(t) => {
                                classify::switch_canonical(t, &rule.rule)?
                            }
                            _ => perm,
                        }
                    }
                    c => return Err(Error::WrongCategory(c.name())),
                },
                _ => return Err(Error::IllegalMove("give --sig m,p,v or --perm".into())),
            };
            Ok(Outcome::ok(match format {
                Format::Json => pretty(&json!({ "canonical": canon })),
                _ => canon.to_string(),
            }))
        }
        Command::Classes {
            rule,
            max_len,
            slack,
            members,
            out,
        } => {
            let (l, s) = scale(&rule.rule, max_len, slack);
            let part = explore::compute_partition(&rule.rule, l, s, members)?;
            if let Some(path) = out {
                fs::write(&path, part.to_json())
                    .map_err(|e| Error::BadDocument(format!("{}: {e}", path.display())))?;
            }
            Ok(Outcome::ok(render_partition(&part, format)))
        }
        Command::Path {
            rule,
            from,
            to,
            ceiling,
        } => {
            let ceiling = ceiling.unwrap_or(from.len().max(to.len()) + 2);
            match explore::find_path(&rule.rule, &from, &to, ceiling)? {
                Some(c) => Ok(Outcome::ok(render_certificate(&c, format))),
                None => Ok(Outcome {
                    text: format!("no path from {from} to {to} within ceiling {ceiling}"),
                    code: Status::Inconclusive.exit_code() as u8,
                }),
            }
        }
        Command::Unravel { rule, perm, slack } => {
            match explore::reach_identity(&rule.rule, &perm, slack) {
                Ok(c) => Ok(Outcome::ok(render_certificate(&c, format))),
                Err(e @ Error::NotReached { .. }) => Ok(Outcome {
                    text: e.to_string(),
                    code: Status::Inconclusive.exit_code() as u8,
                }),
                Err(e) => Err(e),
            }
        }
        Command::Verify {
            rule,
            max_len,
            slack,
            auto_slack,
            input,
        } => {
            let report = match input {
                Some(path) => {
                    let text = fs::read_to_string(&path)
                        .map_err(|e| Error::BadDocument(format!("{}: {e}", path.display())))?;
                    let part = Partition::from_json(&text)?;
                    verify::verify_partition(&rule.rule, &part)?
                }
                None => {
                    let (l, s) = scale(&rule.rule, max_len, slack);
                    verify::verify_rule(&rule.rule, l, s, auto_slack)?
                }
            };
            Ok(render_reports(&[report], format))
        }
        Command::VerifyAll {
            seed,
            samples,
            auto_slack,
        } => {
            let reports = verify::verify_all(samples, seed, auto_slack)?;
            Ok(render_reports(&reports, format))
        }
        Command::Rc { perm, rule } => {
            let text = match (perm, rule) {
                (Some(p), _) => p.reverse_complement().to_string(),
                (None, Some(r)) => RuleSpec {
                    rule: r.rule.reverse_complement(),
                    direction: r.direction,
                }
                .to_string(),
                (None, None) => unreachable!("clap requires one of --perm/--rule"),
            };
            Ok(Outcome::ok(match format {
                Format::Json => pretty(&json!({ "result": text })),
                _ => text,
            }))
        }
    }
}

fn render_partition(part: &Partition, format: Format) -> String {
    match format {
        Format::Json => part.to_json().trim_end().to_string(),
        Format::Csv => {
            let mut rows = vec!["id,min_rep,size,members".to_string()];
            for c in &part.classes {
                let members = c
                    .members
                    .iter()
                    .flatten()
                    .map(|p| p.to_string())
                    .collect::<Vec<_>>()
                    .join(" ");
                rows.push(format!("{},{},{},{}", c.id, c.min_rep, c.size, members));
            }
            rows.join("\n")
        }
        Format::Text => {
            let mut out = format!(
                "{} max_len={} slack={}: {} classes",
                part.rule.text(),
                part.max_len,
                part.slack,
                part.classes.len()
            );
            for c in &part.classes {
                out.push_str(&format!("\n  #{} {} size {}", c.id, c.min_rep, c.size));
                if let Some(m) = &c.members {
                    let shown: Vec<String> = m.iter().take(12).map(|p| p.to_string()).collect();
                    let more = if m.len() > 12 { " ..." } else { "" };
                    out.push_str(&format!(": {}{more}", shown.join(" ")));
                }
            }
            out
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(USAGE);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(USAGE);
        }
    }
    match run(cli) {
        Ok(outcome) => {
            println!("{}", outcome.text);
            ExitCode::from(outcome.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(USAGE)
        }
    }
}
