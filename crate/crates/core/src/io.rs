//! JSON interchange: presentations, homomorphisms, semistable structures and
//! ring descriptors, with schema errors pointing at the offending field.

use std::sync::Arc;

use serde_json::Value;
use thiserror::Error;

use crate::monoid::{MonoidHom, MonoidPresentation};
use crate::ring::FiniteRing;
use crate::semistable::SemistableStructure;
use crate::word::Word;

#[derive(Debug, Error)]
#[error("schema error at {pointer}: {message}")]
pub struct SchemaError {
    /// JSON pointer to the offending field.
    pub pointer: String,
    pub message: String,
}

fn err(pointer: &str, message: impl Into<String>) -> SchemaError {
    SchemaError {
        pointer: pointer.to_string(),
        message: message.into(),
    }
}

fn get<'v>(v: &'v Value, ptr: &str, key: &str) -> Result<&'v Value, SchemaError> {
    v.get(key)
        .ok_or_else(|| err(&format!("{ptr}/{key}"), "missing field"))
}

fn as_u32(v: &Value, ptr: &str) -> Result<u32, SchemaError> {
    v.as_u64()
        .and_then(|x| u32::try_from(x).ok())
        .ok_or_else(|| err(ptr, "expected a non-negative integer"))
}

fn parse_word(v: &Value, ptr: &str) -> Result<Word, SchemaError> {
    let arr = v
        .as_array()
        .ok_or_else(|| err(ptr, "expected an exponent vector"))?;
    arr.iter()
        .enumerate()
        .map(|(i, x)| as_u32(x, &format!("{ptr}/{i}")))
        .collect()
}

/// Parses {"generators": [...], "relations": [[[..],[..]], ...], "bound": n}.
pub fn parse_monoid(
    v: &Value,
    ptr: &str,
    default_bound: u32,
) -> Result<Arc<MonoidPresentation>, SchemaError> {
    let gens_v = get(v, ptr, "generators")?;
    let gens: Vec<String> = gens_v
        .as_array()
        .ok_or_else(|| err(&format!("{ptr}/generators"), "expected an array"))?
        .iter()
        .enumerate()
        .map(|(i, g)| {
            g.as_str()
                .map(String::from)
                .ok_or_else(|| err(&format!("{ptr}/generators/{i}"), "expected a string"))
        })
        .collect::<Result<_, _>>()?;
    let mut relations = Vec::new();
    if let Some(rels) = v.get("relations") {
        let arr = rels
            .as_array()
            .ok_or_else(|| err(&format!("{ptr}/relations"), "expected an array"))?;
        for (i, rel) in arr.iter().enumerate() {
            let pair = rel.as_array().filter(|p| p.len() == 2).ok_or_else(|| {
                err(
                    &format!("{ptr}/relations/{i}"),
                    "expected a pair of exponent vectors",
                )
            })?;
            let l = parse_word(&pair[0], &format!("{ptr}/relations/{i}/0"))?;
            let r = parse_word(&pair[1], &format!("{ptr}/relations/{i}/1"))?;
            relations.push((l, r));
        }
    }
    let bound = match v.get("bound") {
        Some(b) => as_u32(b, &format!("{ptr}/bound"))?,
        None => default_bound,
    };
    MonoidPresentation::new(gens, relations, bound)
        .map_err(|e| err(ptr, format!("invalid presentation: {e}")))
}

/// Parses {"source": ..., "target": ..., "images": [[...], ...]}.
pub fn parse_hom(v: &Value, ptr: &str, default_bound: u32) -> Result<MonoidHom, SchemaError> {
    let source = parse_monoid(
        get(v, ptr, "source")?,
        &format!("{ptr}/source"),
        default_bound,
    )?;
    let target = parse_monoid(
        get(v, ptr, "target")?,
        &format!("{ptr}/target"),
        default_bound,
    )?;
    let imgs_v = get(v, ptr, "images")?;
    let arr = imgs_v
        .as_array()
        .ok_or_else(|| err(&format!("{ptr}/images"), "expected an array"))?;
    let images = arr
        .iter()
        .enumerate()
        .map(|(i, w)| parse_word(w, &format!("{ptr}/images/{i}")))
        .collect::<Result<Vec<_>, _>>()?;
    MonoidHom::new(source, target, images).map_err(|e| {
        err(
            &format!("{ptr}/images"),
            format!("invalid homomorphism: {e}"),
        )
    })
}

/// Parses {"sigma": [[...]], "q0": [...], "Delta": [...], "B": [...]}.
pub fn parse_structure(v: &Value, ptr: &str) -> Result<SemistableStructure, SchemaError> {
    let sigma_v = get(v, ptr, "sigma")?;
    let sigma = sigma_v
        .as_array()
        .ok_or_else(|| err(&format!("{ptr}/sigma"), "expected an array"))?
        .iter()
        .enumerate()
        .map(|(i, w)| parse_word(w, &format!("{ptr}/sigma/{i}")))
        .collect::<Result<Vec<_>, _>>()?;
    let q0 = parse_word(get(v, ptr, "q0")?, &format!("{ptr}/q0"))?;
    let delta = parse_word(get(v, ptr, "Delta")?, &format!("{ptr}/Delta"))?;
    let b = parse_word(get(v, ptr, "B")?, &format!("{ptr}/B"))?;
    Ok(SemistableStructure {
        sigma,
        q0,
        delta,
        b,
    })
}

/// Parses {"kind": "fp"|"gf"|"trunc", "p": .., "k": .., "N": ..}.
pub fn parse_ring(v: &Value, ptr: &str) -> Result<FiniteRing, SchemaError> {
    let kind = get(v, ptr, "kind")?
        .as_str()
        .ok_or_else(|| err(&format!("{ptr}/kind"), "expected a string"))?;
    let p = as_u32(get(v, ptr, "p")?, &format!("{ptr}/p"))? as u8;
    match kind {
        "fp" => FiniteRing::prime_field(p).map_err(|e| err(ptr, e.to_string())),
        "gf" => {
            let k = as_u32(get(v, ptr, "k")?, &format!("{ptr}/k"))? as u8;
            FiniteRing::galois_field(p, k).map_err(|e| err(ptr, e.to_string()))
        }
        "trunc" => {
            let n = as_u32(get(v, ptr, "N")?, &format!("{ptr}/N"))? as u8;
            FiniteRing::truncated_series(p, n).map_err(|e| err(ptr, e.to_string()))
        }
        other => Err(err(
            &format!("{ptr}/kind"),
            format!("unknown ring kind {other:?} (expected fp, gf or trunc)"),
        )),
    }
}

/// Serializes a presentation back to its interchange form.
pub fn monoid_to_json(m: &MonoidPresentation) -> Value {
    serde_json::json!({
        "generators": m.generators(),
        "relations": m.relations(),
        "bound": m.congruence_bound(),
    })
}

pub fn hom_to_json(h: &MonoidHom) -> Value {
    serde_json::json!({
        "source": monoid_to_json(h.source()),
        "target": monoid_to_json(h.target()),
        "images": h.images(),
    })
}

pub fn structure_to_json(s: &SemistableStructure) -> Value {
    serde_json::json!({
        "sigma": s.sigma,
        "q0": s.q0,
        "Delta": s.delta,
        "B": s.b,
    })
}
