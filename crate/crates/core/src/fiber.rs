//! Value types for special fibers and the intersection-theoretic primitives:
//! validation, self-intersection derivation from the zero-fiber rule, full
//! intersection-matrix assembly, and crossing descriptors.
//!
//! A [`SpecialFiber`] is immutable after construction; every operation is a
//! pure function returning fresh values, so fibers are safe to share across
//! threads.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::builders::CurveFamily;
use crate::error::{Error, Result};
use crate::intlinalg::{biguint_to_bigint, IntMatrix};

/// Opaque stable identifier of a fiber component. Ids survive contraction
/// (they are never renumbered), so traces can refer to them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ComponentId(pub u32);

impl fmt::Display for ComponentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Geometric role of a component in the special fiber.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComponentKind {
    /// Central (j-line / moduli) vertical part.
    IgusaVertical,
    /// Horizontal component over a supersingular point.
    Drinfeld,
    /// Small component stemming from a Drinfeld component.
    ExceptionalTail,
    /// Reduced external Igusa part (split-family models).
    External,
    /// Anything else, e.g. the blow-up components at ordinary j = 0, 1728.
    Other,
}

impl ComponentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ComponentKind::IgusaVertical => "IgusaVertical",
            ComponentKind::Drinfeld => "Drinfeld",
            ComponentKind::ExceptionalTail => "ExceptionalTail",
            ComponentKind::External => "External",
            ComponentKind::Other => "Other",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "IgusaVertical" => ComponentKind::IgusaVertical,
            "Drinfeld" => ComponentKind::Drinfeld,
            "ExceptionalTail" => ComponentKind::ExceptionalTail,
            "External" => ComponentKind::External,
            "Other" => ComponentKind::Other,
            _ => return None,
        })
    }
}

/// What is known about a component as an abstract curve. The models only ever
/// need "smooth P^1 / rational but singular / genus unknown".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Smoothness {
    SmoothRational,
    SingularRational,
    UnknownGenus,
}

impl Smoothness {
    pub fn as_str(self) -> &'static str {
        match self {
            Smoothness::SmoothRational => "SmoothRational",
            Smoothness::SingularRational => "SingularRational",
            Smoothness::UnknownGenus => "UnknownGenus",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "SmoothRational" => Smoothness::SmoothRational,
            "SingularRational" => Smoothness::SingularRational,
            "UnknownGenus" => Smoothness::UnknownGenus,
            _ => return None,
        })
    }
}

/// One irreducible component of a special fiber.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub id: ComponentId,
    pub label: String,
    /// Coefficient of the component in the special-fiber divisor; >= 1.
    pub multiplicity: BigUint,
    pub kind: ComponentKind,
    pub smooth_rational: Smoothness,
}

/// A geometric crossing point of the fiber with the local intersection
/// multiplicities of the component pairs meeting there.
///
/// In every freshly built model each point is a transverse crossing of exactly
/// two components. Contraction merges all points lying on the contracted
/// curve into a single image point, which is how local numbers > 1 (and
/// points with three or more branches) arise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossingPoint {
    pub local: BTreeMap<(ComponentId, ComponentId), BigUint>,
}

impl CrossingPoint {
    pub fn is_transverse(&self) -> bool {
        self.local.values().all(|n| *n == BigUint::one())
    }
}

/// A special fiber: ordered components plus a symmetric pairwise intersection
/// pairing, with optional derived self-intersections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecialFiber {
    family: CurveFamily,
    prime: u64,
    components: Vec<Component>,
    /// Intersection numbers of distinct components, keyed by (low id, high id).
    /// Only positive entries are stored.
    pairing: BTreeMap<(ComponentId, ComponentId), BigUint>,
    self_intersections: Option<BTreeMap<ComponentId, BigInt>>,
    crossings: Vec<CrossingPoint>,
}

fn pair_key(a: ComponentId, b: ComponentId) -> (ComponentId, ComponentId) {
    assert_ne!(a, b, "pairing is defined on distinct components");
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl SpecialFiber {
    /// Assemble a fiber from parts. No validation beyond normalizing the
    /// pairing keys: run [`validate_fiber`] to check invariants. Crossing
    /// points are derived as `n` distinct transverse points for a pair with
    /// intersection number `n`, which is exact for every built model.
    pub fn from_parts(
        family: CurveFamily,
        prime: u64,
        components: Vec<Component>,
        pairing: impl IntoIterator<Item = (ComponentId, ComponentId, BigUint)>,
    ) -> Self {
        let mut normalized: BTreeMap<(ComponentId, ComponentId), BigUint> = BTreeMap::new();
        for (a, b, n) in pairing {
            if n.is_zero() {
                continue;
            }
            *normalized.entry(pair_key(a, b)).or_default() += n;
        }
        let crossings = transverse_crossings(&normalized);
        SpecialFiber {
            family,
            prime,
            components,
            pairing: normalized,
            self_intersections: None,
            crossings,
        }
    }

    pub(crate) fn from_raw(
        family: CurveFamily,
        prime: u64,
        components: Vec<Component>,
        pairing: BTreeMap<(ComponentId, ComponentId), BigUint>,
        self_intersections: Option<BTreeMap<ComponentId, BigInt>>,
        crossings: Vec<CrossingPoint>,
    ) -> Self {
        SpecialFiber {
            family,
            prime,
            components,
            pairing,
            self_intersections,
            crossings,
        }
    }

    pub fn family(&self) -> CurveFamily {
        self.family
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn component(&self, id: ComponentId) -> Option<&Component> {
        self.components.iter().find(|c| c.id == id)
    }

    pub fn component_by_label(&self, label: &str) -> Option<&Component> {
        self.components.iter().find(|c| c.label == label)
    }

    pub fn pairing(&self) -> &BTreeMap<(ComponentId, ComponentId), BigUint> {
        &self.pairing
    }

    /// Intersection number of two distinct components (0 when they miss).
    pub fn intersection(&self, a: ComponentId, b: ComponentId) -> BigUint {
        self.pairing
            .get(&pair_key(a, b))
            .cloned()
            .unwrap_or_default()
    }

    pub fn self_intersection(&self, id: ComponentId) -> Option<&BigInt> {
        self.self_intersections.as_ref()?.get(&id)
    }

    pub fn self_intersections(&self) -> Option<&BTreeMap<ComponentId, BigInt>> {
        self.self_intersections.as_ref()
    }

    pub fn crossings(&self) -> &[CrossingPoint] {
        &self.crossings
    }

    /// Components adjacent to `id`, with the intersection number.
    pub fn neighbors(&self, id: ComponentId) -> Vec<(ComponentId, BigUint)> {
        let mut out = Vec::new();
        for (&(a, b), n) in &self.pairing {
            if a == id {
                out.push((b, n.clone()));
            } else if b == id {
                out.push((a, n.clone()));
            }
        }
        out
    }

    pub fn multiplicity_gcd(&self) -> BigUint {
        self.components
            .iter()
            .fold(BigUint::zero(), |acc, c| acc.gcd(&c.multiplicity))
    }

    /// Derive self-intersections from the zero-fiber rule; see
    /// [`self_intersections`].
    pub fn with_self_intersections(self) -> Result<SpecialFiber> {
        self_intersections(self)
    }

    /// Left-hand sides of the zero-fiber rule, one per component:
    /// `sum_j m_j M[i][j]`, which must vanish when self-intersections are
    /// filled.
    pub fn zero_fiber_residues(&self) -> Result<Vec<(ComponentId, BigInt)>> {
        let selfs = self
            .self_intersections
            .as_ref()
            .ok_or(Error::SelfIntersectionsMissing)?;
        let mut out = Vec::with_capacity(self.components.len());
        for c in &self.components {
            let mut acc = biguint_to_bigint(&c.multiplicity)
                * selfs.get(&c.id).ok_or(Error::SelfIntersectionsMissing)?;
            for (other, n) in self.neighbors(c.id) {
                let m = &self
                    .component(other)
                    .ok_or(Error::UnknownComponent(other))?
                    .multiplicity;
                acc += biguint_to_bigint(m) * biguint_to_bigint(&n);
            }
            out.push((c.id, acc));
        }
        Ok(out)
    }
}

fn transverse_crossings(
    pairing: &BTreeMap<(ComponentId, ComponentId), BigUint>,
) -> Vec<CrossingPoint> {
    let mut crossings = Vec::new();
    for (&key, n) in pairing {
        let mut left = n.clone();
        while !left.is_zero() {
            let mut local = BTreeMap::new();
            local.insert(key, BigUint::one());
            crossings.push(CrossingPoint { local });
            left -= BigUint::one();
        }
    }
    crossings
}

/// Outcome of [`validate_fiber`]: hard violations plus informational notes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pass() {
            write!(f, "pass")?;
        } else {
            write!(f, "fail")?;
            for v in &self.violations {
                write!(f, "\n  violation: {v}")?;
            }
        }
        for n in &self.notes {
            write!(f, "\n  note: {n}")?;
        }
        Ok(())
    }
}

/// Check the structural invariants of a fiber. Report-style: never errors.
///
/// Violations: non-positive multiplicities, duplicate labels, dangling ids in
/// the pairing, zero-fiber residues when self-intersections are present.
/// Pairing asymmetry is unrepresentable (intersection numbers are stored on
/// unordered pairs). A disconnected dual graph is flagged as a warning note;
/// a single-component fiber gets a "trivial dual graph" note.
pub fn validate_fiber(fiber: &SpecialFiber) -> ValidationReport {
    let mut report = ValidationReport::default();

    let mut seen_labels = BTreeSet::new();
    let mut ids = BTreeSet::new();
    for c in fiber.components() {
        if !ids.insert(c.id) {
            report.violations.push(format!("duplicate id {}", c.id));
        }
        if !seen_labels.insert(c.label.clone()) {
            report
                .violations
                .push(format!("duplicate label `{}`", c.label));
        }
        if c.multiplicity.is_zero() {
            report
                .violations
                .push(format!("non-positive multiplicity on `{}`", c.label));
        }
    }

    for &(a, b) in fiber.pairing().keys() {
        for id in [a, b] {
            if !ids.contains(&id) {
                report
                    .violations
                    .push(format!("dangling id {id} in pairing"));
            }
        }
    }

    if let Some(selfs) = fiber.self_intersections() {
        for id in selfs.keys() {
            if !ids.contains(id) {
                report
                    .violations
                    .push(format!("dangling id {id} in self-intersections"));
            }
        }
        if selfs.len() == fiber.components().len() {
            if let Ok(residues) = fiber.zero_fiber_residues() {
                for (id, residue) in residues {
                    if !residue.is_zero() {
                        report.violations.push(format!(
                            "zero-fiber rule violated at id {id}: residue {residue}"
                        ));
                    }
                }
            }
        } else {
            report
                .violations
                .push("self-intersections partially filled".to_string());
        }
    }

    if fiber.components().len() == 1 {
        report.notes.push("trivial dual graph".to_string());
    } else if report.pass() && !dual_graph_connected(fiber) {
        report
            .notes
            .push("warning: disconnected dual graph".to_string());
    }

    report
}

/// Fill self-intersections from the zero-fiber rule: intersecting a component
/// with the whole fiber divisor gives 0, so
/// `C^2 = -(1/m_C) * sum_{D != C} m_D (C.D)`.
/// A fiber with a single component gets `C^2 = 0`.
///
/// Errors with [`Error::Divisibility`] when `m_C` does not divide the crossing
/// sum, which signals an inconsistent input configuration.
pub fn self_intersections(fiber: SpecialFiber) -> Result<SpecialFiber> {
    let mut selfs = BTreeMap::new();
    for c in fiber.components() {
        let mut crossing_sum = BigInt::zero();
        for (other, n) in fiber.neighbors(c.id) {
            let m = &fiber
                .component(other)
                .ok_or(Error::UnknownComponent(other))?
                .multiplicity;
            crossing_sum += biguint_to_bigint(m) * biguint_to_bigint(&n);
        }
        let m = biguint_to_bigint(&c.multiplicity);
        let (q, r) = crossing_sum.div_rem(&m);
        if !r.is_zero() {
            return Err(Error::Divisibility {
                label: c.label.clone(),
                multiplicity: c.multiplicity.clone(),
                crossing_sum,
            });
        }
        selfs.insert(c.id, -q);
    }
    let mut fiber = fiber;
    fiber.self_intersections = Some(selfs);
    Ok(fiber)
}

/// Full symmetric intersection matrix of a fiber, in component order.
#[derive(Debug, Clone)]
pub struct IntersectionMatrix {
    pub basis: Vec<ComponentId>,
    pub labels: Vec<String>,
    pub entries: IntMatrix,
}

impl IntersectionMatrix {
    pub fn order(&self) -> usize {
        self.basis.len()
    }

    /// Reindex into the order given by `labels`; fails if a label is missing.
    pub fn in_basis(&self, labels: &[&str]) -> Option<IntersectionMatrix> {
        let perm: Option<Vec<usize>> = labels
            .iter()
            .map(|want| self.labels.iter().position(|l| l == want))
            .collect();
        let perm = perm?;
        if perm.len() != self.order() {
            return None;
        }
        let mut entries = IntMatrix::zeros(perm.len(), perm.len());
        for (i, &pi) in perm.iter().enumerate() {
            for (j, &pj) in perm.iter().enumerate() {
                entries[(i, j)] = self.entries[(pi, pj)].clone();
            }
        }
        Some(IntersectionMatrix {
            basis: perm.iter().map(|&i| self.basis[i]).collect(),
            labels: labels.iter().map(|s| s.to_string()).collect(),
            entries,
        })
    }
}

/// Assemble the full intersection matrix (diagonal: self-intersections,
/// off-diagonal: pairwise intersection numbers) in the fiber's component
/// order. Fills self-intersections on the fly if needed.
pub fn intersection_matrix(fiber: &SpecialFiber) -> Result<IntersectionMatrix> {
    let owned;
    let fiber = if fiber.self_intersections().is_some() {
        fiber
    } else {
        owned = self_intersections(fiber.clone())?;
        &owned
    };
    let n = fiber.components().len();
    let basis: Vec<ComponentId> = fiber.components().iter().map(|c| c.id).collect();
    let labels: Vec<String> = fiber.components().iter().map(|c| c.label.clone()).collect();
    let mut entries = IntMatrix::zeros(n, n);
    for (i, a) in basis.iter().enumerate() {
        entries[(i, i)] = fiber
            .self_intersection(*a)
            .expect("self-intersections filled")
            .clone();
        for (j, b) in basis.iter().enumerate().skip(i + 1) {
            let v = biguint_to_bigint(&fiber.intersection(*a, *b));
            entries[(i, j)] = v.clone();
            entries[(j, i)] = v;
        }
    }
    Ok(IntersectionMatrix {
        basis,
        labels,
        entries,
    })
}

/// Local data of one crossing signature: the completed local ring there is
/// `Zp_ur[[X,Y]]/(X^exponent_a Y^exponent_b - p)`, and `count` points share it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossingDescriptor {
    pub component_a: ComponentId,
    pub component_b: ComponentId,
    pub exponent_a: BigUint,
    pub exponent_b: BigUint,
    pub count: BigUint,
}

/// One descriptor per unordered component pair with positive intersection
/// number. Exponents are the two multiplicities; the count is the intersection
/// number (every crossing of a built model is a normal crossing).
pub fn crossing_local_rings(fiber: &SpecialFiber) -> Vec<CrossingDescriptor> {
    let mut out = Vec::new();
    for (&(a, b), n) in fiber.pairing() {
        let (Some(ca), Some(cb)) = (fiber.component(a), fiber.component(b)) else {
            continue;
        };
        out.push(CrossingDescriptor {
            component_a: a,
            component_b: b,
            exponent_a: ca.multiplicity.clone(),
            exponent_b: cb.multiplicity.clone(),
            count: n.clone(),
        });
    }
    out
}

/// True iff the graph on components, with edges given by positive
/// intersection numbers, is connected. The empty fiber counts as connected.
pub fn dual_graph_connected(fiber: &SpecialFiber) -> bool {
    let ids: Vec<ComponentId> = fiber.components().iter().map(|c| c.id).collect();
    if ids.len() <= 1 {
        return true;
    }
    let mut adjacency: BTreeMap<ComponentId, Vec<ComponentId>> = BTreeMap::new();
    for &(a, b) in fiber.pairing().keys() {
        adjacency.entry(a).or_default().push(b);
        adjacency.entry(b).or_default().push(a);
    }
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([ids[0]]);
    seen.insert(ids[0]);
    while let Some(id) = queue.pop_front() {
        for &next in adjacency.get(&id).into_iter().flatten() {
            if seen.insert(next) {
                queue.push_back(next);
            }
        }
    }
    ids.iter().all(|id| seen.contains(id))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::CurveFamily;

    fn comp(id: u32, label: &str, mult: u64) -> Component {
        Component {
            id: ComponentId(id),
            label: label.to_string(),
            multiplicity: BigUint::from(mult),
            kind: ComponentKind::Other,
            smooth_rational: Smoothness::SmoothRational,
        }
    }

    fn chain_fiber() -> SpecialFiber {
        // 2-component chain, multiplicities (1, 1), one crossing
        SpecialFiber::from_parts(
            CurveFamily::NsCoarse,
            5,
            vec![comp(0, "X", 1), comp(1, "Y", 1)],
            vec![(ComponentId(0), ComponentId(1), BigUint::one())],
        )
    }

    #[test]
    fn chain_self_intersections_and_matrix() {
        let fiber = chain_fiber().with_self_intersections().unwrap();
        assert_eq!(
            fiber.self_intersection(ComponentId(0)),
            Some(&BigInt::from(-1))
        );
        let m = intersection_matrix(&fiber).unwrap();
        assert_eq!(m.entries, IntMatrix::from_rows(&[[-1, 1], [1, -1]]));
        for (_, r) in fiber.zero_fiber_residues().unwrap() {
            assert!(r.is_zero());
        }
    }

    #[test]
    fn single_component_gets_zero() {
        // F = C forces F.C = 0
        let fiber =
            SpecialFiber::from_parts(CurveFamily::SPlusCoarse, 5, vec![comp(7, "B", 1)], []);
        let fiber = fiber.with_self_intersections().unwrap();
        assert_eq!(
            fiber.self_intersection(ComponentId(7)),
            Some(&BigInt::zero())
        );
        let report = validate_fiber(&fiber);
        assert!(report.pass());
        assert!(report
            .notes
            .iter()
            .any(|n| n.contains("trivial dual graph")));
    }

    #[test]
    fn divisibility_error_on_inconsistent_input() {
        // multiplicity 2 component crossed once by a multiplicity 1 component
        let fiber = SpecialFiber::from_parts(
            CurveFamily::NsCoarse,
            5,
            vec![comp(0, "A", 2), comp(1, "B", 1)],
            vec![(ComponentId(0), ComponentId(1), BigUint::one())],
        );
        match fiber.with_self_intersections() {
            Err(Error::Divisibility { label, .. }) => assert_eq!(label, "A"),
            other => panic!("expected DivisibilityError, got {other:?}"),
        }
    }

    #[test]
    fn dangling_id_is_reported() {
        let fiber = SpecialFiber::from_parts(
            CurveFamily::NsCoarse,
            5,
            vec![comp(0, "A", 1)],
            vec![(ComponentId(0), ComponentId(9), BigUint::one())],
        );
        let report = validate_fiber(&fiber);
        assert!(!report.pass());
        assert!(report
            .violations
            .iter()
            .any(|v| v.contains("dangling id 9")));
    }

    #[test]
    fn duplicate_labels_are_reported() {
        let fiber = SpecialFiber::from_parts(
            CurveFamily::NsCoarse,
            5,
            vec![comp(0, "A", 1), comp(1, "A", 1)],
            vec![],
        );
        let report = validate_fiber(&fiber);
        assert!(!report.pass());
        assert!(report
            .violations
            .iter()
            .any(|v| v.contains("duplicate label")));
    }

    #[test]
    fn disconnected_graph_is_a_warning_not_a_violation() {
        let fiber = SpecialFiber::from_parts(
            CurveFamily::NsCoarse,
            5,
            vec![comp(0, "A", 1), comp(1, "B", 1)],
            vec![],
        );
        assert!(!dual_graph_connected(&fiber));
        let report = validate_fiber(&fiber);
        assert!(report.pass());
        assert!(report.notes.iter().any(|n| n.contains("disconnected")));
    }

    #[test]
    fn crossing_descriptors_skip_empty_pairs() {
        let fiber = SpecialFiber::from_parts(
            CurveFamily::NsCoarse,
            29,
            vec![comp(0, "A", 28), comp(1, "D_1", 30), comp(2, "E_1", 1)],
            vec![
                (ComponentId(0), ComponentId(1), BigUint::one()),
                (ComponentId(1), ComponentId(2), BigUint::one()),
                (ComponentId(0), ComponentId(2), BigUint::zero()),
            ],
        );
        let descriptors = crossing_local_rings(&fiber);
        assert_eq!(descriptors.len(), 2);
        let ad = &descriptors[0];
        assert_eq!(ad.exponent_a, BigUint::from(28u32));
        assert_eq!(ad.exponent_b, BigUint::from(30u32));
        assert_eq!(ad.count, BigUint::one());
    }

    #[test]
    fn self_intersections_idempotent_and_deterministic() {
        let once = chain_fiber().with_self_intersections().unwrap();
        let twice = once.clone().with_self_intersections().unwrap();
        assert_eq!(once, twice);
    }
}
