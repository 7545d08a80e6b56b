//! Constructors for the special fibers of the regular models of each curve
//! family at a prime p >= 5.
//!
//! Coarse families come in four shapes depending on p mod 12, driven by
//! whether j = 0 and j = 1728 are ordinary or supersingular. Fine families
//! take the number s_P of supersingular points of the auxiliary moduli
//! problem and attach that many identical generic chains; the rigidified
//! problem has no exceptional chains at j = 0, 1728.
//!
//! Component ids are assigned in a fixed per-family order (central Igusa
//! part, then the j = 1728 block, then the j = 0 block, then the generic
//! chains), so lowest-id tie-breaking in the contraction drivers reproduces
//! the documented contraction sequences. The `ns`/`s` builders interleave
//! each generic chain (D_i, E_i, F_i); the `ns+`/`s+` builders emit all
//! generic Drinfeld components before their tails.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::fiber::{Component, ComponentId, ComponentKind, Smoothness, SpecialFiber};
use crate::primes::is_prime;

/// The eight model families. Fine variants carry s_P >= 1, the number of
/// supersingular points of the auxiliary moduli problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurveFamily {
    NsCoarse,
    NsPlusCoarse,
    SCoarse,
    SPlusCoarse,
    NsFine(u64),
    NsPlusFine(u64),
    SFine(u64),
    SPlusFine(u64),
}

impl CurveFamily {
    pub const COARSE: [CurveFamily; 4] = [
        CurveFamily::NsCoarse,
        CurveFamily::NsPlusCoarse,
        CurveFamily::SCoarse,
        CurveFamily::SPlusCoarse,
    ];

    pub fn is_fine(self) -> bool {
        matches!(
            self,
            CurveFamily::NsFine(_)
                | CurveFamily::NsPlusFine(_)
                | CurveFamily::SFine(_)
                | CurveFamily::SPlusFine(_)
        )
    }

    pub fn is_coarse(self) -> bool {
        !self.is_fine()
    }
}

impl fmt::Display for CurveFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveFamily::NsCoarse => write!(f, "ns"),
            CurveFamily::NsPlusCoarse => write!(f, "ns+"),
            CurveFamily::SCoarse => write!(f, "s"),
            CurveFamily::SPlusCoarse => write!(f, "s+"),
            CurveFamily::NsFine(s) => write!(f, "ns-fine:{s}"),
            CurveFamily::NsPlusFine(s) => write!(f, "ns+-fine:{s}"),
            CurveFamily::SFine(s) => write!(f, "s-fine:{s}"),
            CurveFamily::SPlusFine(s) => write!(f, "s+-fine:{s}"),
        }
    }
}

impl FromStr for CurveFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some((base, count)) = s.split_once(':') {
            let n: u64 = count
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad s_P in family `{s}`")))?;
            return match base {
                "ns-fine" => Ok(CurveFamily::NsFine(n)),
                "ns+-fine" => Ok(CurveFamily::NsPlusFine(n)),
                "s-fine" => Ok(CurveFamily::SFine(n)),
                "s+-fine" => Ok(CurveFamily::SPlusFine(n)),
                _ => Err(Error::InvalidParameter(format!("unknown family `{s}`"))),
            };
        }
        match s {
            "ns" => Ok(CurveFamily::NsCoarse),
            "ns+" => Ok(CurveFamily::NsPlusCoarse),
            "s" => Ok(CurveFamily::SCoarse),
            "s+" => Ok(CurveFamily::SPlusCoarse),
            _ => Err(Error::InvalidParameter(format!("unknown family `{s}`"))),
        }
    }
}

/// Supersingular numerology at p = 12k + i, i in {1, 5, 7, 11}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SupersingularProfile {
    pub p: u64,
    /// k with p = 12k + i.
    pub k: u64,
    /// i = p mod 12.
    pub residue: u64,
    /// Supersingular j-invariants outside {0, 1728}: always k.
    pub generic_count: u64,
    /// j = 0 is supersingular iff p = 2 mod 3.
    pub j0_supersingular: bool,
    /// j = 1728 is supersingular iff p = 3 mod 4.
    pub j1728_supersingular: bool,
    /// Total count: k, k+1, k+1 or k+2 for i = 1, 5, 7, 11.
    pub total: u64,
}

/// Validate p and compute the supersingular counts.
pub fn supersingular_profile(p: u64) -> Result<SupersingularProfile> {
    check_prime(p)?;
    let k = p / 12;
    let residue = p % 12;
    let j0_supersingular = p % 3 == 2;
    let j1728_supersingular = p % 4 == 3;
    let total = k + u64::from(j0_supersingular) + u64::from(j1728_supersingular);
    Ok(SupersingularProfile {
        p,
        k,
        residue,
        generic_count: k,
        j0_supersingular,
        j1728_supersingular,
        total,
    })
}

pub(crate) fn check_prime(p: u64) -> Result<()> {
    if p < 5 || !is_prime(p) {
        return Err(Error::InvalidPrime(p));
    }
    Ok(())
}

struct Assembler {
    components: Vec<Component>,
    pairing: Vec<(ComponentId, ComponentId, BigUint)>,
}

impl Assembler {
    fn new() -> Self {
        Assembler {
            components: Vec::new(),
            pairing: Vec::new(),
        }
    }

    fn push(
        &mut self,
        label: impl Into<String>,
        multiplicity: u64,
        kind: ComponentKind,
        smooth: Smoothness,
    ) -> ComponentId {
        let id = ComponentId(self.components.len() as u32);
        self.components.push(Component {
            id,
            label: label.into(),
            multiplicity: BigUint::from(multiplicity),
            kind,
            smooth_rational: smooth,
        });
        id
    }

    fn cross(&mut self, a: ComponentId, b: ComponentId) {
        self.pairing.push((a, b, BigUint::from(1u32)));
    }

    fn finish(self, family: CurveFamily, p: u64) -> SpecialFiber {
        SpecialFiber::from_parts(family, p, self.components, self.pairing)
    }
}

/// Build the special fiber of the regular model for `family` at `p`, with
/// self-intersections filled (every crossing of a built model is a single
/// normal crossing, so the zero-fiber rule determines the diagonal).
///
/// For fine families the single-node Igusa approximation can make the Igusa
/// self-intersection non-integral for arithmetically inconsistent s_P; in
/// that case the fiber is returned with self-intersections unfilled and a
/// later [`crate::fiber::self_intersections`] call reports the divisibility
/// failure.
pub fn build_fiber(family: CurveFamily, p: u64) -> Result<SpecialFiber> {
    let profile = supersingular_profile(p)?;
    // The component count grows linearly in p (three per supersingular
    // point); refuse configurations too large to materialize.
    const MAX_COMPONENTS: u128 = 1_000_000;
    let estimate: u128 = match family {
        CurveFamily::NsFine(s)
        | CurveFamily::NsPlusFine(s)
        | CurveFamily::SFine(s)
        | CurveFamily::SPlusFine(s) => 3 * u128::from(s) + 3,
        _ => 3 * u128::from(profile.k) + 7,
    };
    if estimate > MAX_COMPONENTS {
        return Err(Error::InvalidParameter(format!(
            "fiber for {family} at p={p} would have about {estimate} components; \
             refusing to build beyond {MAX_COMPONENTS}"
        )));
    }
    let fiber = match family {
        CurveFamily::NsCoarse => build_ns_coarse(&profile),
        CurveFamily::NsPlusCoarse => build_ns_plus_coarse(&profile),
        CurveFamily::SCoarse => build_s_coarse(&profile),
        CurveFamily::SPlusCoarse => build_s_plus_coarse(&profile),
        CurveFamily::NsFine(s) => build_ns_fine(&profile, s)?,
        CurveFamily::NsPlusFine(s) => build_ns_plus_fine(&profile, s)?,
        CurveFamily::SFine(s) => build_s_fine(&profile, s)?,
        CurveFamily::SPlusFine(s) => build_s_plus_fine(&profile, s)?,
    };
    if family.is_coarse() {
        Ok(fiber
            .with_self_intersections()
            .expect("coarse fibers satisfy the zero-fiber rule"))
    } else {
        // Fill when the configuration is integral, else leave unfilled.
        match fiber.clone().with_self_intersections() {
            Ok(filled) => Ok(filled),
            Err(Error::Divisibility { .. }) => Ok(fiber),
            Err(e) => Err(e),
        }
    }
}

fn check_chain_count(s: u64) -> Result<u64> {
    if s < 1 {
        return Err(Error::InvalidParameter(
            "fine families need s_P >= 1".to_string(),
        ));
    }
    Ok(s)
}

/// One Igusa j-line A of multiplicity p-1. Generic chains: D_i (p+1) on A
/// with two multiplicity-1 tails E_i, F_i. At j = 1728: B ((p-1)/2) on A if
/// ordinary, else D_-1 ((p+1)/2) on A with two tails. At j = 0: C ((p-1)/3)
/// if ordinary, else D_0 ((p+1)/3) with two tails.
fn build_ns_coarse(profile: &SupersingularProfile) -> SpecialFiber {
    let p = profile.p;
    let mut asm = Assembler::new();
    let a = asm.push(
        "A",
        p - 1,
        ComponentKind::IgusaVertical,
        Smoothness::SmoothRational,
    );
    if profile.j1728_supersingular {
        let d = asm.push(
            "D_-1",
            (p + 1) / 2,
            ComponentKind::Drinfeld,
            Smoothness::SmoothRational,
        );
        asm.cross(a, d);
        for label in ["E_-1", "F_-1"] {
            let t = asm.push(
                label,
                1,
                ComponentKind::ExceptionalTail,
                Smoothness::SmoothRational,
            );
            asm.cross(d, t);
        }
    } else {
        let b = asm.push(
            "B",
            (p - 1) / 2,
            ComponentKind::Other,
            Smoothness::SmoothRational,
        );
        asm.cross(a, b);
    }
    if profile.j0_supersingular {
        let d = asm.push(
            "D_0",
            (p + 1) / 3,
            ComponentKind::Drinfeld,
            Smoothness::SmoothRational,
        );
        asm.cross(a, d);
        for label in ["E_0", "F_0"] {
            let t = asm.push(
                label,
                1,
                ComponentKind::ExceptionalTail,
                Smoothness::SmoothRational,
            );
            asm.cross(d, t);
        }
    } else {
        let c = asm.push(
            "C",
            (p - 1) / 3,
            ComponentKind::Other,
            Smoothness::SmoothRational,
        );
        asm.cross(a, c);
    }
    for i in 1..=profile.generic_count {
        let d = asm.push(
            format!("D_{i}"),
            p + 1,
            ComponentKind::Drinfeld,
            Smoothness::SmoothRational,
        );
        asm.cross(a, d);
        for prefix in ["E", "F"] {
            let t = asm.push(
                format!("{prefix}_{i}"),
                1,
                ComponentKind::ExceptionalTail,
                Smoothness::SmoothRational,
            );
            asm.cross(d, t);
        }
    }
    asm.finish(CurveFamily::NsCoarse, p)
}

/// Igusa line A of multiplicity (p-1)/2. Generic chains: D_i (p+1) on A
/// carrying E_i ((p+1)/2) and F_i (1). At j = 1728 supersingular: D_-1
/// ((p+1)/2) on A with one multiplicity-1 tail; nothing extra if ordinary.
/// At j = 0 ordinary: chain C ((p-1)/3) on A, then C_0 ((p-1)/6) on C;
/// supersingular: D_0 ((p+1)/3) carrying E_0 ((p+1)/6) and F_0 (1).
fn build_ns_plus_coarse(profile: &SupersingularProfile) -> SpecialFiber {
    let p = profile.p;
    let mut asm = Assembler::new();
    let a = asm.push(
        "A",
        (p - 1) / 2,
        ComponentKind::IgusaVertical,
        Smoothness::SmoothRational,
    );
    if profile.j1728_supersingular {
        let d = asm.push(
            "D_-1",
            (p + 1) / 2,
            ComponentKind::Drinfeld,
            Smoothness::SmoothRational,
        );
        asm.cross(a, d);
        let t = asm.push(
            "F_-1",
            1,
            ComponentKind::ExceptionalTail,
            Smoothness::SmoothRational,
        );
        asm.cross(d, t);
    }
    if profile.j0_supersingular {
        let d = asm.push(
            "D_0",
            (p + 1) / 3,
            ComponentKind::Drinfeld,
            Smoothness::SmoothRational,
        );
        asm.cross(a, d);
        let e = asm.push(
            "E_0",
            (p + 1) / 6,
            ComponentKind::ExceptionalTail,
            Smoothness::SmoothRational,
        );
        asm.cross(d, e);
        let f = asm.push(
            "F_0",
            1,
            ComponentKind::ExceptionalTail,
            Smoothness::SmoothRational,
        );
        asm.cross(d, f);
    } else {
        let c = asm.push(
            "C",
            (p - 1) / 3,
            ComponentKind::Other,
            Smoothness::SmoothRational,
        );
        asm.cross(a, c);
        let c0 = asm.push(
            "C_0",
            (p - 1) / 6,
            ComponentKind::Other,
            Smoothness::SmoothRational,
        );
        asm.cross(c, c0);
    }
    let drinfelds: Vec<ComponentId> = (1..=profile.generic_count)
        .map(|i| {
            let d = asm.push(
                format!("D_{i}"),
                p + 1,
                ComponentKind::Drinfeld,
                Smoothness::SmoothRational,
            );
            asm.cross(a, d);
            d
        })
        .collect();
    for (i, &d) in drinfelds.iter().enumerate() {
        let i = i as u64 + 1;
        let e = asm.push(
            format!("E_{i}"),
            (p + 1) / 2,
            ComponentKind::ExceptionalTail,
            Smoothness::SmoothRational,
        );
        asm.cross(d, e);
        let f = asm.push(
            format!("F_{i}"),
            1,
            ComponentKind::ExceptionalTail,
            Smoothness::SmoothRational,
        );
        asm.cross(d, f);
    }
    asm.finish(CurveFamily::NsPlusCoarse, p)
}

/// Central Igusa j-line A (p-1) plus two reduced external Igusa lines E, F,
/// with no direct A-E, A-F or E-F crossings. Every Drinfeld component meets
/// A, E and F once each: generic D_i (p+1), and at supersingular j = 1728 /
/// j = 0 the lines D_-1 ((p+1)/2) / D_0 ((p+1)/3). Ordinary j = 1728 / j = 0
/// contribute B ((p-1)/2) / C ((p-1)/3) meeting A only.
fn build_s_coarse(profile: &SupersingularProfile) -> SpecialFiber {
    let p = profile.p;
    let mut asm = Assembler::new();
    let a = asm.push(
        "A",
        p - 1,
        ComponentKind::IgusaVertical,
        Smoothness::SmoothRational,
    );
    let e = asm.push("E", 1, ComponentKind::External, Smoothness::SmoothRational);
    let f = asm.push("F", 1, ComponentKind::External, Smoothness::SmoothRational);
    if profile.j1728_supersingular {
        let d = asm.push(
            "D_-1",
            (p + 1) / 2,
            ComponentKind::Drinfeld,
            Smoothness::SmoothRational,
        );
        asm.cross(a, d);
        asm.cross(e, d);
        asm.cross(f, d);
    } else {
        let b = asm.push(
            "B",
            (p - 1) / 2,
            ComponentKind::Other,
            Smoothness::SmoothRational,
        );
        asm.cross(a, b);
    }
    if profile.j0_supersingular {
        let d = asm.push(
            "D_0",
            (p + 1) / 3,
            ComponentKind::Drinfeld,
            Smoothness::SmoothRational,
        );
        asm.cross(a, d);
        asm.cross(e, d);
        asm.cross(f, d);
    } else {
        let c = asm.push(
            "C",
            (p - 1) / 3,
            ComponentKind::Other,
            Smoothness::SmoothRational,
        );
        asm.cross(a, c);
    }
    for i in 1..=profile.generic_count {
        let d = asm.push(
            format!("D_{i}"),
            p + 1,
            ComponentKind::Drinfeld,
            Smoothness::SmoothRational,
        );
        asm.cross(a, d);
        asm.cross(e, d);
        asm.cross(f, d);
    }
    asm.finish(CurveFamily::SCoarse, p)
}

/// Central Igusa A ((p-1)/2) and reduced external Igusa B. Generic D_i (p+1)
/// meet A and B once each and carry C_i ((p+1)/2). At j = 0 ordinary: chain
/// C ((p-1)/3) on A then C_0 ((p-1)/6); supersingular: D_0 ((p+1)/3) meeting
/// A and B, carrying C_0 ((p+1)/6). At j = 1728 supersingular: D_-1
/// ((p+1)/2) meeting A and B, with no further tail (its multiplicity-1
/// crossing is B itself).
fn build_s_plus_coarse(profile: &SupersingularProfile) -> SpecialFiber {
    let p = profile.p;
    let mut asm = Assembler::new();
    let a = asm.push(
        "A",
        (p - 1) / 2,
        ComponentKind::IgusaVertical,
        Smoothness::SmoothRational,
    );
    let b = asm.push("B", 1, ComponentKind::External, Smoothness::SmoothRational);
    if profile.j1728_supersingular {
        let d = asm.push(
            "D_-1",
            (p + 1) / 2,
            ComponentKind::Drinfeld,
            Smoothness::SmoothRational,
        );
        asm.cross(a, d);
        asm.cross(b, d);
    }
    if profile.j0_supersingular {
        let d = asm.push(
            "D_0",
            (p + 1) / 3,
            ComponentKind::Drinfeld,
            Smoothness::SmoothRational,
        );
        asm.cross(a, d);
        asm.cross(b, d);
        let c0 = asm.push(
            "C_0",
            (p + 1) / 6,
            ComponentKind::ExceptionalTail,
            Smoothness::SmoothRational,
        );
        asm.cross(d, c0);
    } else {
        let c = asm.push(
            "C",
            (p - 1) / 3,
            ComponentKind::Other,
            Smoothness::SmoothRational,
        );
        asm.cross(a, c);
        let c0 = asm.push(
            "C_0",
            (p - 1) / 6,
            ComponentKind::Other,
            Smoothness::SmoothRational,
        );
        asm.cross(c, c0);
    }
    let drinfelds: Vec<ComponentId> = (1..=profile.generic_count)
        .map(|i| {
            let d = asm.push(
                format!("D_{i}"),
                p + 1,
                ComponentKind::Drinfeld,
                Smoothness::SmoothRational,
            );
            asm.cross(a, d);
            asm.cross(b, d);
            d
        })
        .collect();
    for (i, &d) in drinfelds.iter().enumerate() {
        let i = i as u64 + 1;
        let c = asm.push(
            format!("C_{i}"),
            (p + 1) / 2,
            ComponentKind::ExceptionalTail,
            Smoothness::SmoothRational,
        );
        asm.cross(d, c);
    }
    asm.finish(CurveFamily::SPlusCoarse, p)
}

/// Fine model: one Igusa part I (a copy of the auxiliary moduli curve,
/// genus unknown) of multiplicity p-1, with s_P identical generic chains.
fn build_ns_fine(profile: &SupersingularProfile, s: u64) -> Result<SpecialFiber> {
    let s = check_chain_count(s)?;
    let p = profile.p;
    let mut asm = Assembler::new();
    let igusa = asm.push(
        "I",
        p - 1,
        ComponentKind::IgusaVertical,
        Smoothness::UnknownGenus,
    );
    for i in 1..=s {
        let d = asm.push(
            format!("D_{i}"),
            p + 1,
            ComponentKind::Drinfeld,
            Smoothness::SmoothRational,
        );
        asm.cross(igusa, d);
        for prefix in ["E", "F"] {
            let t = asm.push(
                format!("{prefix}_{i}"),
                1,
                ComponentKind::ExceptionalTail,
                Smoothness::SmoothRational,
            );
            asm.cross(d, t);
        }
    }
    Ok(asm.finish(CurveFamily::NsFine(s), p))
}

fn build_ns_plus_fine(profile: &SupersingularProfile, s: u64) -> Result<SpecialFiber> {
    let s = check_chain_count(s)?;
    let p = profile.p;
    let mut asm = Assembler::new();
    let igusa = asm.push(
        "I",
        (p - 1) / 2,
        ComponentKind::IgusaVertical,
        Smoothness::UnknownGenus,
    );
    let drinfelds: Vec<ComponentId> = (1..=s)
        .map(|i| {
            let d = asm.push(
                format!("D_{i}"),
                p + 1,
                ComponentKind::Drinfeld,
                Smoothness::SmoothRational,
            );
            asm.cross(igusa, d);
            d
        })
        .collect();
    for (i, &d) in drinfelds.iter().enumerate() {
        let i = i as u64 + 1;
        let e = asm.push(
            format!("E_{i}"),
            (p + 1) / 2,
            ComponentKind::ExceptionalTail,
            Smoothness::SmoothRational,
        );
        asm.cross(d, e);
        let f = asm.push(
            format!("F_{i}"),
            1,
            ComponentKind::ExceptionalTail,
            Smoothness::SmoothRational,
        );
        asm.cross(d, f);
    }
    Ok(asm.finish(CurveFamily::NsPlusFine(s), p))
}

fn build_s_fine(profile: &SupersingularProfile, s: u64) -> Result<SpecialFiber> {
    let s = check_chain_count(s)?;
    let p = profile.p;
    let mut asm = Assembler::new();
    let igusa = asm.push(
        "I",
        p - 1,
        ComponentKind::IgusaVertical,
        Smoothness::UnknownGenus,
    );
    let e = asm.push("E", 1, ComponentKind::External, Smoothness::UnknownGenus);
    let f = asm.push("F", 1, ComponentKind::External, Smoothness::UnknownGenus);
    for i in 1..=s {
        let d = asm.push(
            format!("D_{i}"),
            p + 1,
            ComponentKind::Drinfeld,
            Smoothness::SmoothRational,
        );
        asm.cross(igusa, d);
        asm.cross(e, d);
        asm.cross(f, d);
    }
    Ok(asm.finish(CurveFamily::SFine(s), p))
}

fn build_s_plus_fine(profile: &SupersingularProfile, s: u64) -> Result<SpecialFiber> {
    let s = check_chain_count(s)?;
    let p = profile.p;
    let mut asm = Assembler::new();
    let igusa = asm.push(
        "I",
        (p - 1) / 2,
        ComponentKind::IgusaVertical,
        Smoothness::UnknownGenus,
    );
    let b = asm.push("B", 1, ComponentKind::External, Smoothness::UnknownGenus);
    let drinfelds: Vec<ComponentId> = (1..=s)
        .map(|i| {
            let d = asm.push(
                format!("D_{i}"),
                p + 1,
                ComponentKind::Drinfeld,
                Smoothness::SmoothRational,
            );
            asm.cross(igusa, d);
            asm.cross(b, d);
            d
        })
        .collect();
    for (i, &d) in drinfelds.iter().enumerate() {
        let i = i as u64 + 1;
        let c = asm.push(
            format!("C_{i}"),
            (p + 1) / 2,
            ComponentKind::ExceptionalTail,
            Smoothness::SmoothRational,
        );
        asm.cross(d, c);
    }
    Ok(asm.finish(CurveFamily::SPlusFine(s), p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fiber::{dual_graph_connected, validate_fiber};
    use num_bigint::BigInt;
    use num_traits::One;

    #[test]
    fn profile_examples() {
        let pr = supersingular_profile(13).unwrap();
        assert_eq!((pr.k, pr.total), (1, 1));
        assert!(!pr.j0_supersingular && !pr.j1728_supersingular);

        let pr = supersingular_profile(11).unwrap();
        assert_eq!((pr.k, pr.total), (0, 2));
        assert!(pr.j0_supersingular && pr.j1728_supersingular);

        let pr = supersingular_profile(29).unwrap();
        assert_eq!((pr.k, pr.total), (2, 3));
        assert!(pr.j0_supersingular && !pr.j1728_supersingular);

        assert_eq!(supersingular_profile(4), Err(Error::InvalidPrime(4)));
        assert_eq!(supersingular_profile(9), Err(Error::InvalidPrime(9)));
        assert_eq!(supersingular_profile(3), Err(Error::InvalidPrime(3)));
    }

    #[test]
    fn ns_coarse_29_configuration() {
        let fiber = build_fiber(CurveFamily::NsCoarse, 29).unwrap();
        let got: Vec<(String, u64)> = fiber
            .components()
            .iter()
            .map(|c| (c.label.clone(), u64::try_from(&c.multiplicity).unwrap()))
            .collect();
        let want = [
            ("A", 28),
            ("B", 14),
            ("D_0", 10),
            ("E_0", 1),
            ("F_0", 1),
            ("D_1", 30),
            ("E_1", 1),
            ("F_1", 1),
            ("D_2", 30),
            ("E_2", 1),
            ("F_2", 1),
        ];
        assert_eq!(got.len(), 11);
        for ((gl, gm), (wl, wm)) in got.iter().zip(want.iter()) {
            assert_eq!((gl.as_str(), *gm), (*wl, *wm));
        }
        assert!(validate_fiber(&fiber).pass());
    }

    #[test]
    fn s_plus_coarse_13_configuration() {
        let fiber = build_fiber(CurveFamily::SPlusCoarse, 13).unwrap();
        let got: Vec<(String, u64)> = fiber
            .components()
            .iter()
            .map(|c| (c.label.clone(), u64::try_from(&c.multiplicity).unwrap()))
            .collect();
        assert_eq!(
            got,
            vec![
                ("A".to_string(), 6),
                ("B".to_string(), 1),
                ("C".to_string(), 4),
                ("C_0".to_string(), 2),
                ("D_1".to_string(), 14),
                ("C_1".to_string(), 7),
            ]
        );
    }

    #[test]
    fn ns_fine_7_configuration() {
        let fiber = build_fiber(CurveFamily::NsFine(1), 7).unwrap();
        assert_eq!(fiber.components().len(), 4);
        let igusa = fiber.component_by_label("I").unwrap();
        assert_eq!(igusa.multiplicity, BigUint::from(6u32));
        assert_eq!(igusa.smooth_rational, Smoothness::UnknownGenus);
        let d = fiber.component_by_label("D_1").unwrap();
        assert_eq!(d.multiplicity, BigUint::from(8u32));
        // (p-1) does not divide s_P (p+1) here, so the Igusa node has no
        // integral self-intersection and build leaves the diagonal unfilled.
        assert!(fiber.self_intersections().is_none());
        assert!(matches!(
            fiber.clone().with_self_intersections(),
            Err(Error::Divisibility { .. })
        ));
        // With s_P a multiple of (p-1)/2 the configuration is integral.
        let fiber = build_fiber(CurveFamily::NsFine(3), 7).unwrap();
        assert!(fiber.self_intersections().is_some());
        assert_eq!(
            fiber.self_intersection(ComponentId(0)),
            Some(&BigInt::from(-4))
        );
    }

    #[test]
    fn s_coarse_17_self_intersections() {
        // zero-fiber rule applied by hand to the 12k+5 split configuration
        let fiber = build_fiber(CurveFamily::SCoarse, 17).unwrap();
        for (label, want) in [
            ("D_1", -1i64),
            ("B", -2),
            ("D_0", -3),
            ("A", -2),
            ("E", -24),
        ] {
            let id = fiber.component_by_label(label).unwrap().id;
            assert_eq!(
                fiber.self_intersection(id),
                Some(&BigInt::from(want)),
                "{label}"
            );
        }
    }

    #[test]
    fn bad_parameters() {
        assert_eq!(
            build_fiber(CurveFamily::SPlusCoarse, 4),
            Err(Error::InvalidPrime(4))
        );
        assert!(matches!(
            build_fiber(CurveFamily::NsFine(0), 7),
            Err(Error::InvalidParameter(_))
        ));
        // component count grows linearly in p; huge inputs are refused fast
        assert!(matches!(
            build_fiber(CurveFamily::NsCoarse, 18_446_744_073_709_551_557),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            build_fiber(CurveFamily::SFine(u64::MAX), 7),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn family_strings_round_trip() {
        for family in [
            CurveFamily::NsCoarse,
            CurveFamily::NsPlusCoarse,
            CurveFamily::SCoarse,
            CurveFamily::SPlusCoarse,
            CurveFamily::NsFine(2),
            CurveFamily::NsPlusFine(7),
            CurveFamily::SFine(1),
            CurveFamily::SPlusFine(3),
        ] {
            let s = family.to_string();
            assert_eq!(s.parse::<CurveFamily>().unwrap(), family);
        }
        assert!("q".parse::<CurveFamily>().is_err());
        assert!("ns-fine:x".parse::<CurveFamily>().is_err());
    }

    #[test]
    fn component_counts_per_residue_class() {
        // 1 + 3k + per-case exceptional blocks for ns; fixed shapes elsewhere.
        let count = |family, p| build_fiber(family, p).unwrap().components().len() as u64;
        for p in [13u64, 17, 19, 23, 37, 41, 43, 47, 5, 7, 11, 101] {
            let pr = supersingular_profile(p).unwrap();
            let k = pr.k;
            let ns_expected = match pr.residue {
                1 => 3 + 3 * k,
                5 | 7 => 5 + 3 * k,
                11 => 7 + 3 * k,
                _ => unreachable!(),
            };
            assert_eq!(count(CurveFamily::NsCoarse, p), ns_expected, "ns p={p}");
            let ns_plus_expected = match pr.residue {
                1 => 3 + 3 * k,
                5 => 4 + 3 * k,
                7 => 5 + 3 * k,
                11 => 6 + 3 * k,
                _ => unreachable!(),
            };
            assert_eq!(
                count(CurveFamily::NsPlusCoarse, p),
                ns_plus_expected,
                "ns+ p={p}"
            );
            assert_eq!(count(CurveFamily::SCoarse, p), 5 + k, "s p={p}");
            let s_plus_expected = match pr.residue {
                1 | 5 => 4 + 2 * k,
                7 | 11 => 5 + 2 * k,
                _ => unreachable!(),
            };
            assert_eq!(
                count(CurveFamily::SPlusCoarse, p),
                s_plus_expected,
                "s+ p={p}"
            );
        }
    }

    #[test]
    fn built_fibers_are_sound() {
        for p in crate::primes::primes_in_range(5, 101) {
            for family in CurveFamily::COARSE {
                let fiber = build_fiber(family, p).unwrap();
                let report = validate_fiber(&fiber);
                assert!(report.pass(), "{family} p={p}: {report}");
                assert!(dual_graph_connected(&fiber), "{family} p={p}");
                assert!(fiber.multiplicity_gcd().is_one(), "{family} p={p}");
                assert!(
                    fiber
                        .components()
                        .iter()
                        .any(|c| c.multiplicity == BigUint::one()),
                    "{family} p={p}: no reduced component"
                );
                // every generic Drinfeld component is a (-1)-curve
                for c in fiber.components() {
                    if c.label.starts_with("D_") && c.label != "D_-1" && c.label != "D_0" {
                        assert_eq!(
                            fiber.self_intersection(c.id),
                            Some(&BigInt::from(-1)),
                            "{family} p={p} {}",
                            c.label
                        );
                    }
                }
            }
        }
    }
}
