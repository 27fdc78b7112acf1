//! JSON formats for chains, continuous families and limit augmentations.
//!
//! ```json
//! {"prime": 2, "steps": [{"phi": "x", "gamma": "1/2"}, {"phi": "x^2+2", "gamma": ["2", "0"]}],
//!  "embedding": "minor"}
//! {"prime": 2, "family": [{"phi": "x-2", "gamma": "2"}, ...],
//!  "limit_phi": "x+2", "limit_gamma": ["1", "0"]}
//! ```
//!
//! A continuous family may carry a `"steps"` prefix shared by all members; `"embedding"`
//! and `"limit_gamma"` are optional.

use serde::Deserialize;
use serde_json::{json, Value as Json};

use crate::augment::ContinuousChain;
use crate::chain::InductiveValuation;
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::value::{parse_rational, Embedding, Value};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StepJson {
    phi: String,
    gamma: Json,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChainJson {
    prime: u64,
    #[serde(default)]
    steps: Vec<StepJson>,
    #[serde(default)]
    embedding: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyJson {
    prime: u64,
    #[serde(default)]
    steps: Vec<StepJson>,
    family: Vec<StepJson>,
    #[serde(default)]
    limit_phi: Option<String>,
    #[serde(default)]
    limit_gamma: Option<Json>,
}

/// A continuous family with an optional limit key and value.
#[derive(Clone, Debug)]
pub struct FamilyInput {
    pub chain: ContinuousChain,
    pub limit_phi: Option<Poly>,
    pub limit_gamma: Option<Value>,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidChain(msg.into())
}

fn rational_json(j: &Json) -> Result<crate::value::Q> {
    match j {
        Json::String(s) => parse_rational(s),
        Json::Number(n) if n.is_i64() => Ok(crate::value::q_int(n.as_i64().unwrap())),
        other => Err(Error::Parse(format!("expected a rational, got {other}"))),
    }
}

/// `"a/b"`, an integer, or a two-element array of those.
pub fn value_from_json(j: &Json) -> Result<Value> {
    match j {
        Json::Array(pair) if pair.len() == 2 => Ok(Value::pair(
            rational_json(&pair[0])?,
            rational_json(&pair[1])?,
        )),
        Json::String(s) => s.parse(),
        _ => Ok(Value::Rank1(rational_json(j)?)),
    }
}

pub fn value_to_json(v: &Value) -> Json {
    match v {
        Value::Rank1(q) => json!(q.to_string()),
        Value::Rank2(a, b) => json!([a.to_string(), b.to_string()]),
        Value::Infinity => json!("inf"),
    }
}

fn steps_from_json(steps: &[StepJson]) -> Result<Vec<(Poly, Value)>> {
    steps
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let phi = s
                .phi
                .parse()
                .map_err(|e| bad(format!("step {}: {e}", k + 1)))?;
            let gamma =
                value_from_json(&s.gamma).map_err(|e| bad(format!("step {}: {e}", k + 1)))?;
            Ok((phi, gamma))
        })
        .collect()
}

pub fn chain_from_json(text: &str) -> Result<InductiveValuation> {
    let raw: ChainJson =
        serde_json::from_str(text).map_err(|e| bad(format!("malformed chain file: {e}")))?;
    let steps = steps_from_json(&raw.steps)?;
    let embedding = raw
        .embedding
        .as_deref()
        .map(str::parse::<Embedding>)
        .transpose()
        .map_err(|e| bad(e.to_string()))?;
    InductiveValuation::new(raw.prime, &steps, embedding)
}

pub fn family_from_json(text: &str, seed: u64) -> Result<FamilyInput> {
    let raw: FamilyJson =
        serde_json::from_str(text).map_err(|e| bad(format!("malformed family file: {e}")))?;
    let base = steps_from_json(&raw.steps)?;
    let family = steps_from_json(&raw.family)?;
    let chain = ContinuousChain::new(raw.prime, &base, &family, seed)?;
    let limit_phi = raw
        .limit_phi
        .map(|s| {
            s.parse::<Poly>()
                .map_err(|e| bad(format!("limit_phi: {e}")))
        })
        .transpose()?;
    let limit_gamma = raw
        .limit_gamma
        .as_ref()
        .map(|j| value_from_json(j).map_err(|e| bad(format!("limit_gamma: {e}"))))
        .transpose()?;
    Ok(FamilyInput {
        chain,
        limit_phi,
        limit_gamma,
    })
}

fn steps_to_json(steps: &[(Poly, Value)]) -> Json {
    Json::Array(
        steps
            .iter()
            .map(|(phi, gamma)| json!({"phi": phi.to_string(), "gamma": value_to_json(gamma)}))
            .collect(),
    )
}

pub fn chain_to_json(nu: &InductiveValuation) -> Json {
    let mut out = json!({"prime": nu.p(), "steps": steps_to_json(&nu.steps())});
    if nu.is_rank2() {
        out["embedding"] = json!(nu.embedding().name());
    }
    out
}

pub fn family_to_json(chain: &ContinuousChain) -> Json {
    let mut out = json!({"prime": chain.prime(), "family": steps_to_json(chain.family())});
    if !chain.base().is_empty() {
        out["steps"] = steps_to_json(chain.base());
    }
    out
}
