//! Browser bindings for a few word, subgroup and primitivity computations.
//!
//! Each exported function takes plain text in the word grammar and returns a
//! JSON string; failures come back as a JS exception carrying the message.

use fgf_core::whitehead::{is_primitive, minimize};
use fgf_core::words::inferred_rank;
use fgf_core::{FreeGroupContext, SubgroupGraph, Word};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct Arithmetic {
    rank: usize,
    product: String,
    inverse: String,
    cyclic_core: String,
    root: Option<(String, u32)>,
}

#[derive(Serialize)]
struct Subgroup {
    rank: usize,
    vertices: usize,
    basis: Vec<String>,
    dump: String,
    member: Option<bool>,
}

#[derive(Serialize)]
struct Primitivity {
    primitive: bool,
    minimal: String,
    witness: String,
}

fn context(texts: &[&str], rank: usize) -> Result<FreeGroupContext, String> {
    let n = if rank == 0 { inferred_rank(texts).map_err(|e| e.to_string())? } else { rank };
    FreeGroupContext::new(n).map_err(|e| e.to_string())
}

fn parse(text: &str, ctx: FreeGroupContext) -> Result<Word, String> {
    Word::parse(text, ctx).map_err(|e| e.to_string())
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("plain data serializes")
}

/// Product of the words on each line, its inverse, cyclic core and root.
pub fn word_arithmetic(lines: &str, rank: usize) -> Result<String, String> {
    let texts: Vec<&str> = lines.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
    let ctx = context(&texts, rank)?;
    let mut product = ctx.identity();
    for t in &texts {
        product = &product * &parse(t, ctx)?;
    }
    let root = product.primitive_root().ok().map(|(r, k)| (r.to_string(), k));
    Ok(json(&Arithmetic {
        rank: ctx.rank(),
        product: product.to_string(),
        inverse: product.invert().to_string(),
        cyclic_core: product.cyclic_reduce().0.to_string(),
        root,
    }))
}

/// Stallings graph of the subgroup generated by the lines of `gens`, and
/// membership of `probe` when it is non-blank.
pub fn subgroup(gens: &str, probe: &str, rank: usize) -> Result<String, String> {
    let texts: Vec<&str> = gens.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
    if texts.is_empty() {
        return Err("enter at least one generator".into());
    }
    let mut all = texts.clone();
    if !probe.trim().is_empty() {
        all.push(probe);
    }
    let ctx = context(&all, rank)?;
    let words = texts.iter().map(|t| parse(t, ctx)).collect::<Result<Vec<_>, _>>()?;
    let h = SubgroupGraph::build(ctx, &words);
    let member = if probe.trim().is_empty() { None } else { Some(h.contains(&parse(probe, ctx)?)) };
    Ok(json(&Subgroup {
        rank: h.rank(),
        vertices: h.vertex_count(),
        basis: h.basis().iter().map(Word::to_string).collect(),
        dump: h.dump(),
        member,
    }))
}

/// Whitehead's decision for one word, with the minimizing automorphism.
pub fn primitivity(word: &str, rank: usize) -> Result<String, String> {
    let ctx = context(&[word], rank)?;
    let w = parse(word, ctx)?;
    let primitive = is_primitive(&w).map_err(|e| e.to_string())?;
    let (min, witness) = minimize(&w).map_err(|e| e.to_string())?;
    Ok(json(&Primitivity { primitive, minimal: min.to_string(), witness: witness.to_string() }))
}

#[wasm_bindgen(js_name = wordArithmetic)]
pub fn word_arithmetic_js(lines: &str, rank: usize) -> Result<String, JsValue> {
    word_arithmetic(lines, rank).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = subgroup)]
pub fn subgroup_js(gens: &str, probe: &str, rank: usize) -> Result<String, JsValue> {
    subgroup(gens, probe, rank).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = primitivity)]
pub fn primitivity_js(word: &str, rank: usize) -> Result<String, JsValue> {
    primitivity(word, rank).map_err(|e| JsValue::from_str(&e))
}
