//! Canonical JSON serialization for fibers, matrices, groups, traces and
//! verification reports.
//!
//! Output is key-sorted by construction (the default `serde_json::Map` is
//! ordered) and therefore byte-stable for fixed input. Matrix entries,
//! invariant factors and every other potentially large integer are emitted as
//! decimal strings; component ids, multiplicities and intersection numbers of
//! built fibers fit machine integers and are emitted as JSON numbers per the
//! wire format.

use num_bigint::BigUint;
use serde_json::{json, Map, Value};

use crate::builders::CurveFamily;
use crate::contraction::{ContractionStep, ContractionTrace, FiberSummary};
use crate::error::{Error, Result};
use crate::fiber::{Component, ComponentId, ComponentKind, Smoothness, SpecialFiber};
use crate::formulas::VerificationReport;
use crate::intlinalg::{bigint_from_json, AbelianGroup, IntMatrix, SmithDecomposition};

fn biguint_value(n: &BigUint) -> Value {
    match u64::try_from(n) {
        Ok(v) => json!(v),
        Err(_) => json!(n.to_string()),
    }
}

fn biguint_from_value(v: &Value) -> Option<BigUint> {
    match v {
        Value::Number(n) => n.as_u64().map(BigUint::from),
        Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

/// Canonical fiber JSON:
/// `{"family": ..., "prime": ..., "components": [...], "pairing": [[a,b,n],...]}`
/// with pairing keys `a < b` sorted lexicographically.
pub fn fiber_to_json(fiber: &SpecialFiber) -> Value {
    let components: Vec<Value> = fiber
        .components()
        .iter()
        .map(|c| {
            json!({
                "id": c.id.0,
                "kind": c.kind.as_str(),
                "label": c.label,
                "multiplicity": biguint_value(&c.multiplicity),
                "smooth_rational": c.smooth_rational.as_str(),
            })
        })
        .collect();
    let pairing: Vec<Value> = fiber
        .pairing()
        .iter()
        .map(|(&(a, b), n)| json!([a.0, b.0, biguint_value(n)]))
        .collect();
    json!({
        "components": components,
        "family": fiber.family().to_string(),
        "pairing": pairing,
        "prime": fiber.prime(),
    })
}

pub fn fiber_to_json_string(fiber: &SpecialFiber) -> String {
    fiber_to_json(fiber).to_string()
}

fn malformed(what: &str) -> Error {
    Error::InvalidParameter(format!("malformed fiber JSON: {what}"))
}

/// Parse the canonical fiber JSON back into a [`SpecialFiber`].
/// Self-intersections are not part of the wire format; re-derive them with
/// [`crate::fiber::self_intersections`] if needed.
pub fn fiber_from_json(text: &str) -> Result<SpecialFiber> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| malformed(&format!("not JSON ({e})")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| malformed("not an object"))?;
    let family: CurveFamily = obj
        .get("family")
        .and_then(Value::as_str)
        .ok_or_else(|| malformed("missing family"))?
        .parse()?;
    let prime = obj
        .get("prime")
        .and_then(Value::as_u64)
        .ok_or_else(|| malformed("missing prime"))?;
    let components_json = obj
        .get("components")
        .and_then(Value::as_array)
        .ok_or_else(|| malformed("missing components"))?;
    let mut components = Vec::with_capacity(components_json.len());
    for c in components_json {
        let id = c
            .get("id")
            .and_then(Value::as_u64)
            .ok_or_else(|| malformed("component id"))?;
        let label = c
            .get("label")
            .and_then(Value::as_str)
            .ok_or_else(|| malformed("component label"))?;
        let multiplicity = c
            .get("multiplicity")
            .and_then(biguint_from_value)
            .ok_or_else(|| malformed("component multiplicity"))?;
        let kind = c
            .get("kind")
            .and_then(Value::as_str)
            .and_then(ComponentKind::parse)
            .ok_or_else(|| malformed("component kind"))?;
        let smooth_rational = c
            .get("smooth_rational")
            .and_then(Value::as_str)
            .and_then(Smoothness::parse)
            .ok_or_else(|| malformed("component smooth_rational"))?;
        components.push(Component {
            id: ComponentId(id as u32),
            label: label.to_string(),
            multiplicity,
            kind,
            smooth_rational,
        });
    }
    let pairing_json = obj
        .get("pairing")
        .and_then(Value::as_array)
        .ok_or_else(|| malformed("missing pairing"))?;
    let mut pairing = Vec::with_capacity(pairing_json.len());
    for entry in pairing_json {
        let triple = entry.as_array().ok_or_else(|| malformed("pairing entry"))?;
        if triple.len() != 3 {
            return Err(malformed("pairing entry arity"));
        }
        let a = triple[0].as_u64().ok_or_else(|| malformed("pairing id"))?;
        let b = triple[1].as_u64().ok_or_else(|| malformed("pairing id"))?;
        let n = biguint_from_value(&triple[2]).ok_or_else(|| malformed("pairing number"))?;
        pairing.push((ComponentId(a as u32), ComponentId(b as u32), n));
    }
    Ok(SpecialFiber::from_parts(family, prime, components, pairing))
}

/// Matrix JSON with decimal-string entries:
/// `{"cols": n, "entries": [["-23", "1", ...], ...], "rows": n}`.
pub fn matrix_to_json(m: &IntMatrix) -> Value {
    let entries: Vec<Value> = (0..m.rows())
        .map(|i| {
            Value::Array(
                m.row_entries(i)
                    .iter()
                    .map(|e| json!(e.to_string()))
                    .collect(),
            )
        })
        .collect();
    json!({
        "cols": m.cols(),
        "entries": entries,
        "rows": m.rows(),
    })
}

/// Parse either the `{"rows", "cols", "entries"}` schema or a bare 2-D array.
/// Entries may be JSON integers or decimal strings.
pub fn matrix_from_json(text: &str) -> Result<IntMatrix> {
    let parse_err = |what: &str| Error::InvalidParameter(format!("malformed matrix JSON: {what}"));
    let value: Value =
        serde_json::from_str(text).map_err(|e| parse_err(&format!("not JSON ({e})")))?;
    let entries = match &value {
        Value::Object(obj) => obj
            .get("entries")
            .and_then(Value::as_array)
            .ok_or_else(|| parse_err("missing entries"))?
            .clone(),
        Value::Array(rows) => rows.clone(),
        _ => return Err(parse_err("expected object or array")),
    };
    if entries.is_empty() {
        return Err(parse_err("empty matrix"));
    }
    let mut rows = Vec::with_capacity(entries.len());
    let mut width = None;
    for row in &entries {
        let cells = row
            .as_array()
            .ok_or_else(|| parse_err("row is not an array"))?;
        match width {
            None => width = Some(cells.len()),
            Some(w) if w != cells.len() => return Err(parse_err("ragged rows")),
            _ => {}
        }
        let mut out = Vec::with_capacity(cells.len());
        for cell in cells {
            out.push(bigint_from_json(cell).ok_or_else(|| parse_err("bad entry"))?);
        }
        rows.push(out);
    }
    if width == Some(0) {
        return Err(parse_err("empty matrix"));
    }
    Ok(IntMatrix::from_bigint_rows(rows))
}

/// `{"free_rank": r, "invariant_factors": ["d1", ...]}`.
pub fn group_to_json(group: &AbelianGroup) -> Value {
    json!({
        "free_rank": group.free_rank(),
        "invariant_factors": group
            .invariant_factors()
            .iter()
            .map(|d| json!(d.to_string()))
            .collect::<Vec<_>>(),
    })
}

/// SNF result: diagonal, divisors and rank; transforms when materialized.
pub fn snf_to_json(snf: &SmithDecomposition) -> Value {
    let mut obj = Map::new();
    obj.insert("d".to_string(), matrix_to_json(&snf.d));
    obj.insert(
        "divisors".to_string(),
        Value::Array(
            snf.divisors()
                .iter()
                .map(|d| json!(d.to_string()))
                .collect(),
        ),
    );
    obj.insert("rank".to_string(), json!(snf.rank()));
    if let Some(u) = &snf.u {
        obj.insert("u".to_string(), matrix_to_json(u));
    }
    if let Some(v) = &snf.v {
        obj.insert("v".to_string(), matrix_to_json(v));
    }
    Value::Object(obj)
}

fn summary_to_json(summary: &FiberSummary) -> Value {
    json!({
        "component_count": summary.component_count,
        "components": summary
            .components
            .iter()
            .map(|(id, label, mult)| json!([id.0, label, biguint_value(mult)]))
            .collect::<Vec<_>>(),
    })
}

fn step_to_json(step: &ContractionStep) -> Value {
    json!({
        "contracted_id": step.contracted_id.0,
        "contracted_label": step.contracted_label,
        "pre_self_intersection": step.pre_self_intersection.to_string(),
        "smoothness_changes": step
            .smoothness_changes
            .iter()
            .map(|(id, old, new)| json!([id.0, old.as_str(), new.as_str()]))
            .collect::<Vec<_>>(),
        "updated_pairs": step
            .updated_pairs
            .iter()
            .map(|(a, b, old, new)| json!([a.0, b.0, biguint_value(old), biguint_value(new)]))
            .collect::<Vec<_>>(),
        "updated_selfs": step
            .updated_selfs
            .iter()
            .map(|(id, old, new)| json!([id.0, old.to_string(), new.to_string()]))
            .collect::<Vec<_>>(),
    })
}

/// Ordered steps with full deltas, plus initial/final summaries.
pub fn trace_to_json(trace: &ContractionTrace) -> Value {
    json!({
        "final": summary_to_json(&trace.final_summary),
        "initial": summary_to_json(&trace.initial),
        "steps": trace.steps.iter().map(step_to_json).collect::<Vec<_>>(),
        "target": trace.target.to_string(),
    })
}

/// Per-check records `{check, computed, expected, pass}` in stable order.
pub fn report_to_json(report: &VerificationReport) -> Value {
    json!({
        "checks": report
            .checks
            .iter()
            .map(|c| {
                json!({
                    "check": c.check,
                    "computed": c.computed,
                    "expected": c.expected,
                    "pass": c.pass,
                })
            })
            .collect::<Vec<_>>(),
        "family": report.family.to_string(),
        "p": report.p,
        "pass": report.pass(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::build_fiber;

    #[test]
    fn fiber_round_trip() {
        let fiber = build_fiber(CurveFamily::NsCoarse, 29).unwrap();
        let text = fiber_to_json_string(&fiber);
        let parsed = fiber_from_json(&text).unwrap();
        assert_eq!(parsed.components(), fiber.components());
        assert_eq!(parsed.pairing(), fiber.pairing());
        // canonical: serializing again gives identical bytes
        assert_eq!(fiber_to_json_string(&parsed), text);
    }

    #[test]
    fn fiber_json_keys_are_sorted() {
        let fiber = build_fiber(CurveFamily::SPlusCoarse, 13).unwrap();
        let text = fiber_to_json_string(&fiber);
        let c = text.find("\"components\"").unwrap();
        let f = text.find("\"family\"").unwrap();
        let pa = text.find("\"pairing\"").unwrap();
        let pr = text.find("\"prime\"").unwrap();
        assert!(c < f && f < pa && pa < pr);
    }

    #[test]
    fn matrix_json_both_shapes() {
        let m = matrix_from_json("[[2,0],[0,3]]").unwrap();
        assert_eq!(m, IntMatrix::from_rows(&[[2, 0], [0, 3]]));
        let schema = matrix_to_json(&m).to_string();
        let again = matrix_from_json(&schema).unwrap();
        assert_eq!(again, m);
        assert!(matrix_from_json("[]").is_err());
        assert!(matrix_from_json("[[1],[2,3]]").is_err());
        assert!(matrix_from_json("{\"rows\": 1}").is_err());
    }

    #[test]
    fn big_entries_survive_as_strings() {
        let text = r#"[["123456789012345678901234567890", "-1"], ["0", "7"]]"#;
        let m = matrix_from_json(text).unwrap();
        assert_eq!(m[(0, 0)].to_string(), "123456789012345678901234567890");
        let back = matrix_to_json(&m);
        assert_eq!(
            back["entries"][0][0],
            serde_json::json!("123456789012345678901234567890")
        );
    }
}
