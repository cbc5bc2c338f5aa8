//! The explicit, line-oriented model format.
//!
//! ```text
//! # comment
//! mdp <nStates>
//! label <name> <s1> <s2> ...
//! reward <s> <rational>
//! <s> <a> -> <s'> <p> [, <s''> <p>]...
//! ```
//!
//! Action indices per state must appear densely in order (0, 1, ...).
//! Rationals are exact: `num/den`, integers, or base-10 decimals.

use mdpcert_core::model::{Mdp, MdpBuilder, MdpError};

use num::traits::Zero;
use thiserror::Error;

use crate::rational::{format_rat, parse_rat};

#[derive(Debug, Error)]
pub enum ModelParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("no states declared")]
    NoStates,
    #[error("invalid model: {0}")]
    Semantic(#[from] MdpError),
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> ModelParseError {
    ModelParseError::Syntax { line, column, message: message.into() }
}

pub fn parse_model(text: &str) -> Result<Mdp, ModelParseError> {
    let mut builder: Option<MdpBuilder> = None;
    let mut n_states = 0usize;
    let mut next_action: Vec<usize> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        if line.trim().is_empty() {
            continue;
        }
        let column = raw.len() - raw.trim_start().len() + 1;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens[0] {
            "mdp" => {
                if builder.is_some() {
                    return Err(syntax(line_no, column, "duplicate 'mdp' header"));
                }
                let n: usize = tokens
                    .get(1)
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| syntax(line_no, column, "expected 'mdp <nStates>'"))?;
                if n == 0 {
                    return Err(ModelParseError::NoStates);
                }
                n_states = n;
                next_action = vec![0; n];
                builder = Some(MdpBuilder::new(n));
            }
            "label" => {
                let b = builder
                    .as_mut()
                    .ok_or_else(|| syntax(line_no, column, "'label' before 'mdp' header"))?;
                let name = tokens
                    .get(1)
                    .ok_or_else(|| syntax(line_no, column, "expected 'label <name> <states...>'"))?;
                let mut states = Vec::new();
                for t in &tokens[2..] {
                    let s: usize = t
                        .parse()
                        .map_err(|_| syntax(line_no, column, format!("bad state index '{t}'")))?;
                    if s >= n_states {
                        return Err(syntax(line_no, column, format!("state {s} out of range")));
                    }
                    states.push(s);
                }
                b.set_label(name, states);
            }
            "reward" => {
                let b = builder
                    .as_mut()
                    .ok_or_else(|| syntax(line_no, column, "'reward' before 'mdp' header"))?;
                let s: usize = tokens
                    .get(1)
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| syntax(line_no, column, "expected 'reward <state> <value>'"))?;
                if s >= n_states {
                    return Err(syntax(line_no, column, format!("state {s} out of range")));
                }
                let value = tokens
                    .get(2)
                    .ok_or_else(|| syntax(line_no, column, "missing reward value"))
                    .and_then(|t| parse_rat(t).map_err(|e| syntax(line_no, column, e)))?;
                b.set_reward(s, value);
            }
            _ => {
                // Transition line: <s> <a> -> <succ> <p> [, <succ> <p>]...
                let b = builder
                    .as_mut()
                    .ok_or_else(|| syntax(line_no, column, "transition before 'mdp' header"))?;
                let s: usize = tokens[0]
                    .parse()
                    .map_err(|_| syntax(line_no, column, format!("bad state index '{}'", tokens[0])))?;
                if s >= n_states {
                    return Err(syntax(line_no, column, format!("state {s} out of range")));
                }
                let a: usize = tokens
                    .get(1)
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| syntax(line_no, column, "expected '<state> <action> -> ...'"))?;
                if a != next_action[s] {
                    return Err(syntax(
                        line_no,
                        column,
                        format!("non-contiguous action index {a} for state {s} (expected {})", next_action[s]),
                    ));
                }
                if tokens.get(2) != Some(&"->") {
                    return Err(syntax(line_no, column, "expected '->'"));
                }
                let rest = line
                    .split_once("->")
                    .map(|(_, r)| r)
                    .ok_or_else(|| syntax(line_no, column, "expected '->'"))?;
                let mut transitions = Vec::new();
                for part in rest.split(',') {
                    let pair: Vec<&str> = part.split_whitespace().collect();
                    if pair.len() != 2 {
                        return Err(syntax(line_no, column, format!("expected '<succ> <prob>' in '{part}'")));
                    }
                    let succ: usize = pair[0]
                        .parse()
                        .map_err(|_| syntax(line_no, column, format!("bad successor '{}'", pair[0])))?;
                    let p = parse_rat(pair[1]).map_err(|e| syntax(line_no, column, e))?;
                    transitions.push((succ, p));
                }
                b.push_action(s, transitions);
                next_action[s] += 1;
            }
        }
    }
    let builder = builder.ok_or(ModelParseError::NoStates)?;
    Ok(builder.build()?)
}

pub fn write_model(m: &Mdp) -> String {
    let mut out = String::new();
    out.push_str(&format!("mdp {}\n", m.num_states()));
    for (name, set) in m.labels() {
        out.push_str(&format!("label {}", name));
        for s in set.iter() {
            out.push_str(&format!(" {s}"));
        }
        out.push('\n');
    }
    for s in 0..m.num_states() {
        if !m.reward(s).is_zero() {
            out.push_str(&format!("reward {s} {}\n", format_rat(m.reward(s))));
        }
    }
    for s in 0..m.num_states() {
        for (a, action) in m.enabled(s).iter().enumerate() {
            let parts: Vec<String> = action
                .transitions
                .iter()
                .map(|(t, p)| format!("{t} {}", format_rat(p)))
                .collect();
            out.push_str(&format!("{s} {a} -> {}\n", parts.join(", ")));
        }
    }
    out
}
