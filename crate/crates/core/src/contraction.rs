//! Castelnuovo blow-down engine: contract smooth rational (-1)-components,
//! update the pairing by the projection formula, and drive fibers to the
//! minimal regular model or the minimal model with normal crossings.
//!
//! Under contraction of E with E^2 = -1, surviving components update by
//! (C.D)' = C.D + (C.E)(D.E) and (C^2)' = C^2 + (C.E)^2; multiplicities never
//! change. All crossing points lying on E merge into the single image point,
//! which is what the normal-crossings test watches.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::fiber::{ComponentId, CrossingPoint, Smoothness, SpecialFiber};
use crate::intlinalg::biguint_to_bigint;

/// Target of a contraction run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContractionTarget {
    Minimal,
    MinimalNcd,
}

impl fmt::Display for ContractionTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ContractionTarget::Minimal => write!(f, "minimal"),
            ContractionTarget::MinimalNcd => write!(f, "ncd"),
        }
    }
}

/// Full delta record of one blow-down.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractionStep {
    pub contracted_id: ComponentId,
    pub contracted_label: String,
    /// Always -1.
    pub pre_self_intersection: BigInt,
    /// (id_a, id_b, old, new) for every pair whose intersection number grew.
    pub updated_pairs: Vec<(ComponentId, ComponentId, BigUint, BigUint)>,
    /// (id, old, new) for every survivor whose self-intersection grew.
    pub updated_selfs: Vec<(ComponentId, BigInt, BigInt)>,
    /// (id, old, new) smoothness downgrades caused by this step.
    pub smoothness_changes: Vec<(ComponentId, Smoothness, Smoothness)>,
}

/// Snapshot of a fiber for trace bookkeeping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberSummary {
    pub component_count: usize,
    pub components: Vec<(ComponentId, String, BigUint)>,
}

impl FiberSummary {
    pub fn of(fiber: &SpecialFiber) -> Self {
        FiberSummary {
            component_count: fiber.components().len(),
            components: fiber
                .components()
                .iter()
                .map(|c| (c.id, c.label.clone(), c.multiplicity.clone()))
                .collect(),
        }
    }
}

/// Ordered record of blow-down steps from a regular model to a minimal one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractionTrace {
    pub initial: FiberSummary,
    pub steps: Vec<ContractionStep>,
    pub final_summary: FiberSummary,
    pub target: ContractionTarget,
}

impl ContractionTrace {
    /// Labels of the contracted components, in order.
    pub fn contracted_labels(&self) -> Vec<&str> {
        self.steps
            .iter()
            .map(|s| s.contracted_label.as_str())
            .collect()
    }

    /// Re-apply the recorded steps to `initial`; reproduces the final fiber.
    pub fn replay(&self, initial: &SpecialFiber) -> Result<SpecialFiber> {
        let mut fiber = initial.clone();
        for step in &self.steps {
            let (next, _) = contract_component(&fiber, step.contracted_id)?;
            fiber = next;
        }
        Ok(fiber)
    }
}

/// Ids of the smooth rational (-1)-components, in ascending id order.
/// Empty when self-intersections are not filled.
pub fn exceptional_candidates(fiber: &SpecialFiber) -> Vec<ComponentId> {
    let minus_one = BigInt::from(-1);
    let mut ids: Vec<ComponentId> = fiber
        .components()
        .iter()
        .filter(|c| c.smooth_rational == Smoothness::SmoothRational)
        .filter(|c| fiber.self_intersection(c.id) == Some(&minus_one))
        .map(|c| c.id)
        .collect();
    ids.sort_unstable();
    ids
}

/// Blow down one smooth rational (-1)-component and return the new fiber with
/// the step record. The zero-fiber rule is checked on the result.
pub fn contract_component(
    fiber: &SpecialFiber,
    id: ComponentId,
) -> Result<(SpecialFiber, ContractionStep)> {
    let component = fiber.component(id).ok_or(Error::UnknownComponent(id))?;
    if component.smooth_rational != Smoothness::SmoothRational {
        return Err(Error::NotContractible(
            id,
            format!("`{}` is not a smooth rational curve", component.label),
        ));
    }
    let selfs = fiber
        .self_intersections()
        .ok_or(Error::SelfIntersectionsMissing)?;
    let minus_one = BigInt::from(-1);
    if selfs.get(&id) != Some(&minus_one) {
        return Err(Error::NotContractible(
            id,
            format!(
                "`{}` has self-intersection {}",
                component.label,
                selfs
                    .get(&id)
                    .map_or_else(|| "unknown".to_string(), |v| v.to_string())
            ),
        ));
    }

    let neighbors = fiber.neighbors(id);
    let mut step = ContractionStep {
        contracted_id: id,
        contracted_label: component.label.clone(),
        pre_self_intersection: minus_one,
        updated_pairs: Vec::new(),
        updated_selfs: Vec::new(),
        smoothness_changes: Vec::new(),
    };

    // Projection formula on the pairing.
    let mut pairing: BTreeMap<(ComponentId, ComponentId), BigUint> = fiber
        .pairing()
        .iter()
        .filter(|(&(a, b), _)| a != id && b != id)
        .map(|(&k, v)| (k, v.clone()))
        .collect();
    for (i, (a, na)) in neighbors.iter().enumerate() {
        for (b, nb) in neighbors.iter().skip(i + 1) {
            let key = if a < b { (*a, *b) } else { (*b, *a) };
            let old = pairing.get(&key).cloned().unwrap_or_default();
            let new = &old + na * nb;
            step.updated_pairs.push((key.0, key.1, old, new.clone()));
            pairing.insert(key, new);
        }
    }
    step.updated_pairs.sort_by_key(|&(a, b, ..)| (a, b));

    // Self-intersections gain (C.E)^2.
    let mut new_selfs = selfs.clone();
    new_selfs.remove(&id);
    for (c, n) in &neighbors {
        let old = new_selfs[c].clone();
        let gain = biguint_to_bigint(n) * biguint_to_bigint(n);
        let new = &old + gain;
        step.updated_selfs.push((*c, old, new.clone()));
        new_selfs.insert(*c, new);
    }
    step.updated_selfs.sort_by_key(|&(c, ..)| c);

    // A surviving smooth rational component through the image point with
    // C.E >= 2 acquires a singular point; UnknownGenus never changes.
    let two = BigUint::from(2u32);
    let mut components = Vec::with_capacity(fiber.components().len() - 1);
    for c in fiber.components() {
        if c.id == id {
            continue;
        }
        let mut c = c.clone();
        let crossing = neighbors
            .iter()
            .find(|(n, _)| *n == c.id)
            .map(|(_, n)| n.clone())
            .unwrap_or_default();
        if c.smooth_rational == Smoothness::SmoothRational && crossing >= two {
            step.smoothness_changes
                .push((c.id, c.smooth_rational, Smoothness::SingularRational));
            c.smooth_rational = Smoothness::SingularRational;
        }
        components.push(c);
    }

    // Merge every crossing point on the contracted curve into its image point.
    let mut merged: BTreeMap<(ComponentId, ComponentId), BigUint> = BTreeMap::new();
    let mut crossings: Vec<CrossingPoint> = Vec::with_capacity(fiber.crossings().len());
    for point in fiber.crossings() {
        let on_contracted = point.local.keys().any(|&(a, b)| a == id || b == id);
        if on_contracted {
            for (&(a, b), n) in &point.local {
                if a != id && b != id {
                    *merged.entry((a, b)).or_default() += n;
                }
            }
        } else {
            crossings.push(point.clone());
        }
    }
    for (i, (a, na)) in neighbors.iter().enumerate() {
        for (b, nb) in neighbors.iter().skip(i + 1) {
            let key = if a < b { (*a, *b) } else { (*b, *a) };
            *merged.entry(key).or_default() += na * nb;
        }
    }
    if !merged.is_empty() {
        crossings.push(CrossingPoint { local: merged });
    }

    let result = SpecialFiber::from_raw(
        fiber.family(),
        fiber.prime(),
        components,
        pairing,
        Some(new_selfs),
        crossings,
    );

    for (cid, residue) in result.zero_fiber_residues()? {
        assert!(
            residue.is_zero(),
            "zero-fiber rule broken at id {cid} after contracting {id}"
        );
    }
    debug_assert!(crossings_match_pairing(&result));

    Ok((result, step))
}

fn crossings_match_pairing(fiber: &SpecialFiber) -> bool {
    let mut totals: BTreeMap<(ComponentId, ComponentId), BigUint> = BTreeMap::new();
    for point in fiber.crossings() {
        for (&key, n) in &point.local {
            *totals.entry(key).or_default() += n;
        }
    }
    totals == *fiber.pairing()
}

/// True iff every crossing point is a transverse crossing (all local pair
/// multiplicities 1) and no component is SingularRational. Two components may
/// meet several times as long as the meetings are at distinct transverse
/// points, which is how the split-family minimal-ncd models look.
pub fn is_ncd(fiber: &SpecialFiber) -> bool {
    fiber
        .components()
        .iter()
        .all(|c| c.smooth_rational != Smoothness::SingularRational)
        && fiber.crossings().iter().all(CrossingPoint::is_transverse)
}

/// Repeatedly contract the lowest-id exceptional candidate until none
/// remains. The final fiber has no smooth rational (-1)-component.
pub fn contract_to_minimal(fiber: &SpecialFiber) -> Result<(SpecialFiber, ContractionTrace)> {
    if fiber.self_intersections().is_none() {
        return Err(Error::SelfIntersectionsMissing);
    }
    let initial = FiberSummary::of(fiber);
    let mut current = fiber.clone();
    let mut steps = Vec::new();
    while let Some(&id) = exceptional_candidates(&current).first() {
        let (next, step) = contract_component(&current, id)?;
        steps.push(step);
        current = next;
    }
    let trace = ContractionTrace {
        initial,
        steps,
        final_summary: FiberSummary::of(&current),
        target: ContractionTarget::Minimal,
    };
    Ok((current, trace))
}

/// Greedily contract exceptional candidates whose contraction preserves
/// [`is_ncd`] (checked by look-ahead on the projection-formula update); stop
/// when no such candidate exists. Requires an ncd input fiber.
pub fn contract_to_minimal_ncd(fiber: &SpecialFiber) -> Result<(SpecialFiber, ContractionTrace)> {
    if fiber.self_intersections().is_none() {
        return Err(Error::SelfIntersectionsMissing);
    }
    if !is_ncd(fiber) {
        return Err(Error::NotNormalCrossings);
    }
    let initial = FiberSummary::of(fiber);
    let mut current = fiber.clone();
    let mut steps = Vec::new();
    'driver: loop {
        for id in exceptional_candidates(&current) {
            let (next, step) = contract_component(&current, id)?;
            if is_ncd(&next) {
                steps.push(step);
                current = next;
                continue 'driver;
            }
        }
        break;
    }
    let trace = ContractionTrace {
        initial,
        steps,
        final_summary: FiberSummary::of(&current),
        target: ContractionTarget::MinimalNcd,
    };
    Ok((current, trace))
}
