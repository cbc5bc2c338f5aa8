//! Flat, human-auditable certificate files. All numbers are exact: decimal
//! integer pairs `num/den` (or plain integers), infinity as the token `inf`.

use mdpcert_core::certificate::{BoundDir, Certificate, Meta, Objective, Query, Semantics};
use mdpcert_core::model::Strategy;
use mdpcert_core::numeric::{rat, ExtVal, Rank};
use mdpcert_core::stateset::StateSet;
use num::traits::{One, Signed};
use thiserror::Error;

use crate::rational::{format_rat, parse_rat};

#[derive(Debug, Error)]
pub enum CertParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing field '{0}'")]
    Missing(&'static str),
    #[error("probability out of range: state {state} carries {value}")]
    ProbabilityRange { state: usize, value: String },
    #[error("field '{field}' has {got} entries, expected {expected}")]
    Length { field: &'static str, got: usize, expected: usize },
}

fn syntax(line: usize, message: impl Into<String>) -> CertParseError {
    CertParseError::Syntax { line, message: message.into() }
}

pub fn write_certificate(cert: &Certificate) -> String {
    let mut out = String::new();
    out.push_str("certificate v1\n");
    out.push_str(&format!("query {}\n", cert.query.objective));
    if let Some(sem) = cert.query.semantics {
        out.push_str(&format!("semantics {sem}\n"));
    }
    out.push_str(&format!("target {}\n", cert.query.target_label));
    out.push_str(&format!("bound {}\n", cert.query.bound));
    out.push_str(&format!("epsilon {}\n", format_rat(&cert.query.epsilon)));
    out.push_str(&format!("states {}\n", cert.x.len()));
    let values: Vec<String> = cert
        .x
        .iter()
        .map(|v| match v {
            ExtVal::Finite(r) => format_rat(r),
            ExtVal::Infinity => "inf".into(),
        })
        .collect();
    out.push_str(&format!("x {}\n", values.join(" ")));
    if let Some(rank) = &cert.rank {
        out.push_str(&format!("rank {}\n", format_ranks(rank)));
    }
    if let Some(rank2) = &cert.rank2 {
        out.push_str(&format!("rank2 {}\n", format_ranks(rank2)));
    }
    if let Some(strategy) = &cert.strategy {
        let choices: Vec<String> = strategy.choice.iter().map(|a| a.to_string()).collect();
        out.push_str(&format!("strategy {}\n", choices.join(" ")));
    }
    if let Some(tin) = &cert.declared_target {
        let states: Vec<String> = tin.iter().map(|s| s.to_string()).collect();
        if states.is_empty() {
            out.push_str("tin\n");
        } else {
            out.push_str(&format!("tin {}\n", states.join(" ")));
        }
    }
    if !cert.meta.generator.is_empty() {
        out.push_str(&format!("generator {}\n", cert.meta.generator));
    }
    if !cert.meta.config.is_empty() {
        out.push_str(&format!("config {}\n", cert.meta.config));
    }
    out.push_str("end\n");
    out
}

fn format_ranks(ranks: &[Rank]) -> String {
    ranks
        .iter()
        .map(|r| match r {
            Rank::Finite(n) => n.to_string(),
            Rank::Infinity => "inf".into(),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn parse_certificate(text: &str) -> Result<Certificate, CertParseError> {
    let mut objective = None;
    let mut semantics = None;
    let mut target_label = None;
    let mut bound = None;
    let mut epsilon = rat(1, 1_000_000);
    let mut states: Option<usize> = None;
    let mut x: Option<Vec<ExtVal>> = None;
    let mut rank = None;
    let mut rank2 = None;
    let mut strategy = None;
    let mut tin: Option<Vec<usize>> = None;
    let mut generator = String::new();
    let mut config = String::new();
    let mut seen_header = false;
    let mut seen_end = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || seen_end {
            continue;
        }
        let (key, rest) = match line.split_once(char::is_whitespace) {
            Some((k, r)) => (k, r.trim()),
            None => (line, ""),
        };
        match key {
            "certificate" => {
                if rest != "v1" {
                    return Err(syntax(line_no, format!("unsupported version '{rest}'")));
                }
                seen_header = true;
            }
            "query" => {
                objective = Some(match rest {
                    "Pmin" => Objective::Pmin,
                    "Pmax" => Objective::Pmax,
                    "Emin" => Objective::Emin,
                    "Emax" => Objective::Emax,
                    other => return Err(syntax(line_no, format!("unknown objective '{other}'"))),
                });
            }
            "semantics" => {
                semantics = Some(match rest {
                    "inf" => Semantics::Inf,
                    "rho" => Semantics::Rho,
                    other => return Err(syntax(line_no, format!("unknown semantics '{other}'"))),
                });
            }
            "target" => target_label = Some(rest.to_string()),
            "bound" => {
                bound = Some(match rest {
                    "lower" => BoundDir::Lower,
                    "upper" => BoundDir::Upper,
                    other => return Err(syntax(line_no, format!("unknown bound '{other}'"))),
                });
            }
            "epsilon" => {
                epsilon = parse_rat(rest).map_err(|e| syntax(line_no, e))?;
            }
            "states" => {
                states = Some(
                    rest.parse()
                        .map_err(|_| syntax(line_no, format!("bad state count '{rest}'")))?,
                );
            }
            "x" => {
                let mut values = Vec::new();
                for token in rest.split_whitespace() {
                    if token == "inf" {
                        values.push(ExtVal::Infinity);
                    } else {
                        let r = parse_rat(token).map_err(|e| syntax(line_no, e))?;
                        if r.is_negative() {
                            return Err(syntax(line_no, format!("negative value '{token}'")));
                        }
                        values.push(ExtVal::Finite(r));
                    }
                }
                x = Some(values);
            }
            "rank" | "rank2" => {
                let mut ranks = Vec::new();
                for token in rest.split_whitespace() {
                    if token == "inf" {
                        ranks.push(Rank::Infinity);
                    } else {
                        let n: u64 = token
                            .parse()
                            .map_err(|_| syntax(line_no, format!("bad rank '{token}'")))?;
                        ranks.push(Rank::Finite(n));
                    }
                }
                if key == "rank" {
                    rank = Some(ranks);
                } else {
                    rank2 = Some(ranks);
                }
            }
            "strategy" => {
                let mut choices = Vec::new();
                for token in rest.split_whitespace() {
                    let a: usize = token
                        .parse()
                        .map_err(|_| syntax(line_no, format!("bad action '{token}'")))?;
                    choices.push(a);
                }
                strategy = Some(Strategy::new(choices));
            }
            "tin" => {
                let mut set = Vec::new();
                for token in rest.split_whitespace() {
                    let s: usize = token
                        .parse()
                        .map_err(|_| syntax(line_no, format!("bad state '{token}'")))?;
                    set.push(s);
                }
                tin = Some(set);
            }
            "generator" => generator = rest.to_string(),
            "config" => config = rest.to_string(),
            "end" => seen_end = true,
            other => return Err(syntax(line_no, format!("unknown field '{other}'"))),
        }
    }
    if !seen_header {
        return Err(CertParseError::Missing("certificate header"));
    }
    let objective = objective.ok_or(CertParseError::Missing("query"))?;
    let target_label = target_label.ok_or(CertParseError::Missing("target"))?;
    let bound = bound.ok_or(CertParseError::Missing("bound"))?;
    let n = states.ok_or(CertParseError::Missing("states"))?;
    let x = x.ok_or(CertParseError::Missing("x"))?;
    if x.len() != n {
        return Err(CertParseError::Length { field: "x", got: x.len(), expected: n });
    }
    for (field, len) in [("rank", rank.as_ref().map(Vec::len)), ("rank2", rank2.as_ref().map(Vec::len))] {
        if let Some(got) = len {
            if got != n {
                return Err(CertParseError::Length { field, got, expected: n });
            }
        }
    }
    if let Some(strategy) = &strategy {
        if strategy.choice.len() != n {
            return Err(CertParseError::Length {
                field: "strategy",
                got: strategy.choice.len(),
                expected: n,
            });
        }
    }
    if !objective.is_reward() {
        // Reachability certificates carry probabilities.
        for (s, v) in x.iter().enumerate() {
            let ok = match v {
                ExtVal::Finite(r) => *r <= num::BigRational::one(),
                ExtVal::Infinity => false,
            };
            if !ok {
                return Err(CertParseError::ProbabilityRange { state: s, value: v.to_string() });
            }
        }
    }
    let declared_target = match tin {
        Some(set) => {
            for &s in &set {
                if s >= n {
                    return Err(CertParseError::Length { field: "tin", got: s, expected: n });
                }
            }
            Some(StateSet::from_iter(n, set))
        }
        None => None,
    };
    Ok(Certificate {
        query: Query { objective, semantics, target_label, bound, epsilon },
        x,
        rank,
        rank2,
        strategy,
        declared_target,
        meta: Meta { generator, config },
    })
}
