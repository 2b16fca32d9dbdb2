//! JSON instance format.
//!
//! ```json
//! {
//!   "kind": "tclass_sscg",
//!   "resources": 2,
//!   "leader_actions": [[0], [1]],
//!   "classes": [{"n": 2, "actions": [0, 1]}],
//!   "follower_costs": [[1, 3, 4, 5, 6], [2, 5, 6, 7, 8]],
//!   "leader_costs": [[1, "7/2", 4, 5, 6], [2, 5, 6, 7, 8]],
//!   "metadata": {"generator": "tclass", "seed": 7}
//! }
//! ```
//!
//! General games carry `"followers": [{"actions": [[0, 1], [2]]}, ...]`
//! instead of `classes`. Cost entries are JSON integers or `"p/q"` strings.

use std::str::FromStr;

use num::{BigInt, One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::game::{CostTable, Follower, FollowerClass, FollowerStructure, Game, Rational};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("{field}: cannot parse {text:?} as a rational")]
    Rational { field: String, text: String },
    #[error("{field}: {message}")]
    Field { field: String, message: String },
    #[error("game fails validation: {0}")]
    Invalid(String),
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        FormatError::Json { line: e.line(), column: e.column(), message: e.to_string() }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGame {
    kind: String,
    resources: usize,
    leader_actions: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    classes: Option<Vec<RawClass>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    followers: Option<Vec<RawFollower>>,
    follower_costs: Vec<Vec<Value>>,
    leader_costs: Vec<Vec<Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    metadata: Option<Value>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawClass {
    n: usize,
    actions: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFollower {
    actions: Vec<Vec<usize>>,
}

/// Parses `"p/q"`, `"-p/q"` or `"n"`.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let valid = |s: &str| {
        let digits = s.strip_prefix('-').unwrap_or(s);
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !valid(num) || !valid(den) {
        return None;
    }
    let num = BigInt::from_str(num).ok()?;
    let den = BigInt::from_str(den).ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Rational::new(num, den))
}

/// Integers become JSON numbers, everything else a `"p/q"` string.
pub fn rational_to_json(value: &Rational) -> Value {
    if value.denom().is_one() {
        if let Some(n) = value.numer().to_i64() {
            return Value::from(n);
        }
    }
    Value::String(format!("{}/{}", value.numer(), value.denom()))
}

pub fn rational_from_json(value: &Value, field: &str) -> Result<Rational, FormatError> {
    let bad = || FormatError::Rational { field: field.to_string(), text: value.to_string() };
    match value {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Rational::from_integer(BigInt::from(i)))
            } else if let Some(u) = n.as_u64() {
                Ok(Rational::from_integer(BigInt::from(u)))
            } else {
                n.as_f64().and_then(Rational::from_float).ok_or_else(bad)
            }
        }
        Value::String(s) => parse_rational(s).ok_or_else(bad),
        _ => Err(bad()),
    }
}

fn table_from_json(rows: &[Vec<Value>], name: &str) -> Result<CostTable, FormatError> {
    let rows = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(x, v)| rational_from_json(v, &format!("{name}[{i}][{x}]")))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CostTable::from_rows(rows))
}

fn table_to_json(table: &CostTable) -> Vec<Vec<Value>> {
    (0..table.resources()).map(|i| table.values(i).iter().map(rational_to_json).collect()).collect()
}

/// Parses and validates a game.
pub fn load_game(text: &str) -> Result<Game, FormatError> {
    let raw: RawGame = serde_json::from_str(text)?;
    let followers = match raw.kind.as_str() {
        "tclass_sscg" => {
            if raw.followers.is_some() {
                return Err(FormatError::Field {
                    field: "followers".into(),
                    message: "not allowed for tclass_sscg".into(),
                });
            }
            let classes = raw.classes.ok_or_else(|| FormatError::Field {
                field: "classes".into(),
                message: "required for tclass_sscg".into(),
            })?;
            FollowerStructure::Classes(
                classes.into_iter().map(|c| FollowerClass { size: c.n, resources: c.actions }).collect(),
            )
        }
        "general_scg" => {
            if raw.classes.is_some() {
                return Err(FormatError::Field {
                    field: "classes".into(),
                    message: "not allowed for general_scg".into(),
                });
            }
            let followers = raw.followers.ok_or_else(|| FormatError::Field {
                field: "followers".into(),
                message: "required for general_scg".into(),
            })?;
            FollowerStructure::General(followers.into_iter().map(|f| Follower { actions: f.actions }).collect())
        }
        other => return Err(FormatError::Field { field: "kind".into(), message: format!("unknown kind {other:?}") }),
    };
    let game = Game {
        resources: raw.resources,
        leader_actions: raw.leader_actions,
        followers,
        follower_costs: table_from_json(&raw.follower_costs, "follower_costs")?,
        leader_costs: table_from_json(&raw.leader_costs, "leader_costs")?,
        metadata: raw.metadata,
    };
    game.validate().into_result().map_err(|e| FormatError::Invalid(e.to_string()))?;
    Ok(game)
}

pub fn save_game(game: &Game) -> String {
    let (classes, followers) = match &game.followers {
        FollowerStructure::Classes(c) => {
            (Some(c.iter().map(|c| RawClass { n: c.size, actions: c.resources.clone() }).collect()), None)
        }
        FollowerStructure::General(f) => {
            (None, Some(f.iter().map(|f| RawFollower { actions: f.actions.clone() }).collect()))
        }
    };
    let raw = RawGame {
        kind: game.kind().as_str().to_string(),
        resources: game.resources,
        leader_actions: game.leader_actions.clone(),
        classes,
        followers,
        follower_costs: table_to_json(&game.follower_costs),
        leader_costs: table_to_json(&game.leader_costs),
        metadata: game.metadata.clone(),
    };
    serde_json::to_string_pretty(&raw).expect("game serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{int, rational};

    #[test]
    fn parses_rational_forms() {
        assert_eq!(parse_rational("3/4"), Some(rational(3, 4)));
        assert_eq!(parse_rational("-6/8"), Some(rational(-3, 4)));
        assert_eq!(parse_rational("12"), Some(int(12)));
        assert_eq!(parse_rational("3/"), None);
        assert_eq!(parse_rational("/4"), None);
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("1.5"), None);
    }

    #[test]
    fn malformed_rational_reports_field() {
        let text = r#"{"kind":"tclass_sscg","resources":1,"leader_actions":[[0]],
            "classes":[{"n":1,"actions":[0]}],
            "follower_costs":[[1,"3/",3,4]],"leader_costs":[[1,2,3,4]]}"#;
        match load_game(text) {
            Err(FormatError::Rational { field, text }) => {
                assert_eq!(field, "follower_costs[0][1]");
                assert_eq!(text, "\"3/\"");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_error_reports_line() {
        let text = "{\n  \"kind\": \"tclass_sscg\",\n  \"resources\": ,\n}";
        match load_game(text) {
            Err(FormatError::Json { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn big_values_survive_as_strings() {
        let big = Rational::from_integer(BigInt::from(10).pow(30));
        assert_eq!(rational_to_json(&big), Value::String(format!("{}/1", big.numer())));
        assert_eq!(rational_from_json(&rational_to_json(&big), "x").unwrap(), big);
        assert_eq!(rational_to_json(&rational(10, 6)), Value::String("5/3".into()));
    }

    #[test]
    fn kind_mismatch_is_rejected() {
        let text = r#"{"kind":"general_scg","resources":1,"leader_actions":[[0]],
            "classes":[{"n":1,"actions":[0]}],
            "follower_costs":[[1,2,3,4]],"leader_costs":[[1,2,3,4]]}"#;
        assert!(matches!(load_game(text), Err(FormatError::Field { .. })));
    }
}
