//! The property query grammar: `Pmin=?|Pmax=?|Emin=?|Emax=? [F <label>]`
//! with an optional `semantics=inf|rho` flag for reward objectives.

use mdpcert_core::certificate::{Objective, Semantics};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedQuery {
    pub objective: Objective,
    pub semantics: Option<Semantics>,
    pub target_label: String,
}

pub fn parse_query(text: &str) -> Result<ParsedQuery, String> {
    let text = text.trim();
    let (head, rest) = text
        .split_once("=?")
        .ok_or_else(|| format!("expected '<objective>=? [F <label>]' in '{text}'"))?;
    let objective = match head.trim() {
        "Pmin" => Objective::Pmin,
        "Pmax" => Objective::Pmax,
        "Emin" => Objective::Emin,
        "Emax" => Objective::Emax,
        other => return Err(format!("unknown objective '{other}'")),
    };
    let rest = rest.trim();
    let open = rest.find('[').ok_or_else(|| "missing '[F <label>]'".to_string())?;
    let close = rest.find(']').ok_or_else(|| "missing ']'".to_string())?;
    if close < open {
        return Err("mismatched brackets".into());
    }
    let inner = rest[open + 1..close].trim();
    let label = inner
        .strip_prefix('F')
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .ok_or_else(|| format!("expected 'F <label>' inside brackets, got '{inner}'"))?;

    let mut semantics = None;
    let tail = rest[close + 1..].trim();
    if !tail.is_empty() {
        let Some(value) = tail.strip_prefix("semantics=") else {
            return Err(format!("unexpected trailing '{tail}'"));
        };
        if !objective.is_reward() {
            return Err("semantics flag only applies to reward objectives".into());
        }
        semantics = Some(match value.trim() {
            "inf" => Semantics::Inf,
            "rho" => Semantics::Rho,
            other => return Err(format!("unknown semantics '{other}'")),
        });
    }
    if objective.is_reward() && semantics.is_none() {
        semantics = Some(Semantics::Inf);
    }
    Ok(ParsedQuery { objective, semantics, target_label: label.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_reachability_query() {
        let q = parse_query("Pmin=? [F target]").unwrap();
        assert_eq!(q.objective, Objective::Pmin);
        assert_eq!(q.semantics, None);
        assert_eq!(q.target_label, "target");
    }

    #[test]
    fn parses_reward_queries() {
        let q = parse_query("Emin=? [F goal]").unwrap();
        assert_eq!(q.semantics, Some(Semantics::Inf));
        let q = parse_query("Emax=? [F goal] semantics=rho").unwrap();
        assert_eq!(q.semantics, Some(Semantics::Rho));
    }

    #[test]
    fn rejects_bad_queries() {
        assert!(parse_query("Puniform=? [F t]").is_err());
        assert!(parse_query("Pmin=? [G t]").is_err());
        assert!(parse_query("Pmin=? [F t] semantics=rho").is_err());
        assert!(parse_query("Pmin=?").is_err());
    }
}
