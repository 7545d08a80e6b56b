//! Graphviz DOT export for fiber dual graphs and contraction sequences.

use std::fmt::Write;

use crate::contraction::ContractionTrace;
use crate::error::Result;
use crate::fiber::SpecialFiber;

/// One node per component labeled "label (mult)", one edge per positive
/// pairing entry labeled with the intersection number.
pub fn fiber_to_dot(fiber: &SpecialFiber) -> String {
    fiber_to_named_dot(fiber, "fiber")
}

fn fiber_to_named_dot(fiber: &SpecialFiber, name: &str) -> String {
    let mut out = String::new();
    writeln!(out, "graph {name} {{").unwrap();
    writeln!(out, "  label=\"{} p={}\";", fiber.family(), fiber.prime()).unwrap();
    for c in fiber.components() {
        writeln!(
            out,
            "  c{} [label=\"{} ({})\"];",
            c.id.0, c.label, c.multiplicity
        )
        .unwrap();
    }
    for (&(a, b), n) in fiber.pairing() {
        writeln!(out, "  c{} -- c{} [label=\"{}\"];", a.0, b.0, n).unwrap();
    }
    writeln!(out, "}}").unwrap();
    out
}

/// One graph per step: the initial fiber, then the fiber after each
/// contraction, replayed from the trace.
pub fn trace_to_dot(initial: &SpecialFiber, trace: &ContractionTrace) -> Result<String> {
    let mut out = fiber_to_named_dot(initial, "step_0");
    let mut fiber = initial.clone();
    for (i, step) in trace.steps.iter().enumerate() {
        let (next, _) = crate::contraction::contract_component(&fiber, step.contracted_id)?;
        fiber = next;
        out.push_str(&fiber_to_named_dot(&fiber, &format!("step_{}", i + 1)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{build_fiber, CurveFamily};
    use crate::contraction::contract_to_minimal;

    #[test]
    fn dot_shape() {
        let fiber = build_fiber(CurveFamily::NsCoarse, 29).unwrap();
        let dot = fiber_to_dot(&fiber);
        assert_eq!(dot.matches(" [label=\"").count(), 11 + 10); // 11 nodes, 10 edges
        assert!(dot.contains("c0 [label=\"A (28)\"];"));
        assert!(dot.contains("c0 -- c5 [label=\"1\"];"));
        assert!(dot.starts_with("graph fiber {"));
    }

    #[test]
    fn trace_dot_has_one_graph_per_step() {
        let fiber = build_fiber(CurveFamily::SPlusCoarse, 17).unwrap();
        let (_, trace) = contract_to_minimal(&fiber).unwrap();
        let dot = trace_to_dot(&fiber, &trace).unwrap();
        assert_eq!(dot.matches("graph step_").count(), trace.steps.len() + 1);
    }
}
