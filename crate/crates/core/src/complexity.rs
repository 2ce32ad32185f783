//! Complexity measures for handle structures and the orders on them.
//!
//! The engine's termination argument rests on these: triples compared
//! lexicographically, multisets of triples compared by sorting non-increasing
//! and padding with (0,0,0), and the top-level pair where a *smaller* count of
//! loaded 0-handles means a *larger* structure.

use num_bigint::BigInt;
use num_rational::BigRational;
use std::cmp::Ordering;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexityError {
    #[error("surgery bound requires distance at least 2, got {0}")]
    DistanceTooSmall(i64),
}

/// Index of a surface component: -2χ + |γ ∩ F|.
pub fn index_of_component(chi: i64, gamma_hits: u64) -> i64 {
    -2 * chi + gamma_hits as i64
}

/// Index of a 0-handle of the attachment surface: valence + |γ ∩ V| - 2.
pub fn index_of_0handle(f1_touches: u64, gamma_hits: u64) -> i64 {
    f1_touches as i64 + gamma_hits as i64 - 2
}

/// (C1, C2, C3) for one surface component: band count + 1, index, boundary
/// circle count. C1 is always positive for a real component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ComplexityTriple {
    pub c1: i64,
    pub c2: i64,
    pub c3: i64,
}

impl ComplexityTriple {
    pub fn new(c1: i64, c2: i64, c3: i64) -> Self {
        ComplexityTriple { c1, c2, c3 }
    }

    pub fn zero() -> Self {
        ComplexityTriple { c1: 0, c2: 0, c3: 0 }
    }
}

impl Ord for ComplexityTriple {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.c1, self.c2, self.c3).cmp(&(other.c1, other.c2, other.c3))
    }
}

impl PartialOrd for ComplexityTriple {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn compare_triples(a: &ComplexityTriple, b: &ComplexityTriple) -> Ordering {
    a.cmp(b)
}

/// A multiset of triples, stored sorted non-increasing. Repetitions are
/// retained.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ComplexitySet {
    triples: Vec<ComplexityTriple>,
}

impl ComplexitySet {
    pub fn new(mut triples: Vec<ComplexityTriple>) -> Self {
        triples.sort_by(|a, b| b.cmp(a));
        ComplexitySet { triples }
    }

    pub fn empty() -> Self {
        ComplexitySet { triples: Vec::new() }
    }

    pub fn triples(&self) -> &[ComplexityTriple] {
        &self.triples
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn push(&mut self, t: ComplexityTriple) {
        let pos = self.triples.partition_point(|x| *x >= t);
        self.triples.insert(pos, t);
    }
}

/// Sorted-non-increasing comparison, padding the shorter sequence with
/// (0,0,0). Since every real triple has C1 > 0, padding is strictly smaller
/// than any real entry.
pub fn compare_sets(a: &ComplexitySet, b: &ComplexitySet) -> Ordering {
    let n = a.triples.len().max(b.triples.len());
    let zero = ComplexityTriple::zero();
    for i in 0..n {
        let x = a.triples.get(i).unwrap_or(&zero);
        let y = b.triples.get(i).unwrap_or(&zero);
        match x.cmp(y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

/// Complexity of a handle structure: the multiset over positive-index
/// components, plus the count of 0-handles that contain such a component.
/// The count compares REVERSED: with equal multisets, fewer loaded 0-handles
/// means greater complexity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Complexity {
    pub set: ComplexitySet,
    pub loaded_zero_handles: usize,
}

pub fn compare_complexity(a: &Complexity, b: &Complexity) -> Ordering {
    match compare_sets(&a.set, &b.set) {
        Ordering::Equal => b.loaded_zero_handles.cmp(&a.loaded_zero_handles),
        other => other,
    }
}

/// Extended complexity: the multiset over ALL components (non-positive index
/// included), same reversed count rule.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExtendedComplexity {
    pub set: ComplexitySet,
    pub loaded_zero_handles: usize,
}

pub fn compare_extended(a: &ExtendedComplexity, b: &ExtendedComplexity) -> Ordering {
    match compare_sets(&a.set, &b.set) {
        Ordering::Equal => b.loaded_zero_handles.cmp(&a.loaded_zero_handles),
        other => other,
    }
}

/// Per-component raw counts as produced by the surface decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ComponentCounts {
    pub band_cells: u64,
    pub index: i64,
    pub boundary_circles: u64,
    /// Which 0-handle (ball) of the ambient structure carries the component.
    pub zero_handle: usize,
}

impl ComponentCounts {
    pub fn triple(&self) -> ComplexityTriple {
        ComplexityTriple::new(self.band_cells as i64 + 1, self.index, self.boundary_circles as i64)
    }
}

/// Builds both measures from one component scan, so the positive filter and
/// the loaded-0-handle count can never disagree.
pub fn measures_from_components(parts: &[ComponentCounts]) -> (Complexity, ExtendedComplexity) {
    let mut pos = Vec::new();
    let mut all = Vec::new();
    let mut loaded = std::collections::BTreeSet::new();
    for c in parts {
        let t = c.triple();
        all.push(t);
        if c.index > 0 {
            pos.push(t);
            loaded.insert(c.zero_handle);
        }
    }
    let n = loaded.len();
    (
        Complexity { set: ComplexitySet::new(pos), loaded_zero_handles: n },
        ExtendedComplexity { set: ComplexitySet::new(all), loaded_zero_handles: n },
    )
}

/// The positive-filtered multiset alone.
pub fn f_complexity(parts: &[ComponentCounts]) -> ComplexitySet {
    ComplexitySet::new(parts.iter().filter(|c| c.index > 0).map(|c| c.triple()).collect())
}

/// All-components variant used by the extended measure.
pub fn f_complexity_all(parts: &[ComponentCounts]) -> ComplexitySet {
    ComplexitySet::new(parts.iter().map(|c| c.triple()).collect())
}

/// Complexity of a vertical surface: (|S ∩ H²|, |∂S ∩ H¹|) compared
/// lexicographically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VerticalComplexity {
    pub two_handle_discs: u64,
    pub one_handle_arcs: u64,
}

impl VerticalComplexity {
    pub fn new(two_handle_discs: u64, one_handle_arcs: u64) -> Self {
        VerticalComplexity { two_handle_discs, one_handle_arcs }
    }
}

/// The per-component bound |K ∩ F| ≤ (-2χ + |γ ∩ F|) / (2(Δ - 1)), exact.
pub fn surgery_bound(chi: i64, gamma_hits: u64, delta: i64) -> Result<BigRational, ComplexityError> {
    if delta < 2 {
        return Err(ComplexityError::DistanceTooSmall(delta));
    }
    let num = BigInt::from(index_of_component(chi, gamma_hits));
    let den = BigInt::from(2 * (delta - 1));
    Ok(BigRational::new(num, den))
}

/// fr(n·C1 + C2) = n²k1 + n·k2 + k3. The interesting regime has k2 ≠ 0,
/// reported by the flag rather than enforced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FramingValue {
    pub value: i64,
    pub k2_nonzero: bool,
}

pub fn framing_polynomial(k1: i64, k2: i64, k3: i64, n: i64) -> FramingValue {
    FramingValue {
        value: n * n * k1 + n * k2 + k3,
        k2_nonzero: k2 != 0,
    }
}

/// Classifies a non-positive-index 0-handle of the attachment surface by its
/// band valence and suture hits. Only these five shapes can have index ≤ 0;
/// a lone suture hit cannot occur since sutures separate the two region
/// signs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LowIndexCase {
    /// valence 0, no sutures: bare disc, removable with its neighborhood.
    BareDisc,
    /// valence 1, no sutures: collapses with its band.
    CollapsibleFree,
    /// valence 1, one suture hit: collapses, rerouting the suture.
    CollapsibleSutured,
    /// valence 0, two suture hits: product disc.
    ProductDisc,
    /// valence 2, no sutures: part of a band chain (amalgam material).
    ChainLink,
}

pub fn classify_low_index(valence: u64, gamma_hits: u64) -> Option<LowIndexCase> {
    match (valence, gamma_hits) {
        (0, 0) => Some(LowIndexCase::BareDisc),
        (1, 0) => Some(LowIndexCase::CollapsibleFree),
        (1, 1) => Some(LowIndexCase::CollapsibleSutured),
        (0, 2) => Some(LowIndexCase::ProductDisc),
        (2, 0) => Some(LowIndexCase::ChainLink),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Zero};

    #[test]
    fn index_spot_values() {
        // Disc with four suture points has index two.
        assert_eq!(index_of_component(1, 4), 2);
        // Product disc and suture-free annulus both have index zero.
        assert_eq!(index_of_component(1, 2), 0);
        assert_eq!(index_of_component(0, 0), 0);
    }

    #[test]
    fn zero_handle_index() {
        assert_eq!(index_of_0handle(2, 0), 0);
        assert_eq!(index_of_0handle(1, 1), 0);
        assert_eq!(index_of_0handle(3, 1), 2);
    }

    #[test]
    fn triple_order() {
        let a = ComplexityTriple::new(2, 1, 3);
        let b = ComplexityTriple::new(1, 5, 9);
        assert_eq!(compare_triples(&a, &b), Ordering::Greater);
        let c = ComplexityTriple::new(1, 2, 0);
        assert_eq!(compare_triples(&c, &c), Ordering::Equal);
        let d = ComplexityTriple::new(1, 2, 1);
        assert_eq!(compare_triples(&c, &d), Ordering::Less);
    }

    #[test]
    fn set_order_with_padding() {
        let a = ComplexitySet::new(vec![ComplexityTriple::new(2, 1, 1)]);
        let b = ComplexitySet::new(vec![
            ComplexityTriple::new(1, 3, 3),
            ComplexityTriple::new(1, 2, 2),
        ]);
        assert_eq!(compare_sets(&a, &b), Ordering::Greater);

        let empty = ComplexitySet::empty();
        let one = ComplexitySet::new(vec![ComplexityTriple::new(1, 0, 0)]);
        assert_eq!(compare_sets(&empty, &one), Ordering::Less);

        let two = ComplexitySet::new(vec![
            ComplexityTriple::new(1, 1, 1),
            ComplexityTriple::new(1, 1, 1),
        ]);
        let single = ComplexitySet::new(vec![ComplexityTriple::new(1, 1, 1)]);
        assert_eq!(compare_sets(&two, &single), Ordering::Greater);
    }

    #[test]
    fn complexity_reversed_count() {
        let set = ComplexitySet::new(vec![ComplexityTriple::new(2, 1, 1)]);
        let a = Complexity { set: set.clone(), loaded_zero_handles: 2 };
        let b = Complexity { set: set.clone(), loaded_zero_handles: 3 };
        assert_eq!(compare_complexity(&a, &b), Ordering::Greater);

        let big = Complexity {
            set: ComplexitySet::new(vec![ComplexityTriple::new(2, 1, 1)]),
            loaded_zero_handles: 5,
        };
        let small = Complexity {
            set: ComplexitySet::new(vec![ComplexityTriple::new(1, 9, 9)]),
            loaded_zero_handles: 1,
        };
        assert_eq!(compare_complexity(&big, &small), Ordering::Greater);
        assert_eq!(compare_complexity(&a, &a), Ordering::Equal);
    }

    #[test]
    fn extended_sees_zero_index() {
        let a = ExtendedComplexity {
            set: ComplexitySet::new(vec![ComplexityTriple::new(1, 0, 1)]),
            loaded_zero_handles: 0,
        };
        let b = ExtendedComplexity { set: ComplexitySet::empty(), loaded_zero_handles: 0 };
        assert_eq!(compare_extended(&a, &b), Ordering::Greater);
    }

    #[test]
    fn surgery_bound_values() {
        assert_eq!(surgery_bound(-1, 0, 2).unwrap(), BigRational::one());
        assert!(surgery_bound(1, 2, 2).unwrap().is_zero());
        assert_eq!(surgery_bound(0, 6, 4).unwrap(), BigRational::one());
        assert!(surgery_bound(0, 0, 1).is_err());
    }

    #[test]
    fn framing_values() {
        assert_eq!(framing_polynomial(0, 1, 0, 5).value, 5);
        assert_eq!(framing_polynomial(1, 1, 0, 2).value, 6);
        assert!(!framing_polynomial(1, 0, 3, 2).k2_nonzero);
    }

    #[test]
    fn framing_injectivity_scan() {
        // With k2 ≠ 0, n ↦ n²k1 + nk2 + k3 collides only on pairs symmetric
        // about -k2/(2k1); brute-force over a window to confirm at most one
        // collision pair per value.
        let (k1, k2, k3) = (2, 3, -1);
        let mut seen = std::collections::HashMap::new();
        for n in -100i64..=100 {
            let v = framing_polynomial(k1, k2, k3, n).value;
            *seen.entry(v).or_insert(0usize) += 1;
        }
        assert!(seen.values().all(|&c| c <= 2));
        let distinct = seen.len();
        assert!(distinct >= 100);
    }

    #[test]
    fn low_index_classifier() {
        assert_eq!(classify_low_index(0, 0), Some(LowIndexCase::BareDisc));
        assert_eq!(classify_low_index(1, 1), Some(LowIndexCase::CollapsibleSutured));
        assert_eq!(classify_low_index(2, 0), Some(LowIndexCase::ChainLink));
        assert_eq!(classify_low_index(0, 2), Some(LowIndexCase::ProductDisc));
        assert_eq!(classify_low_index(3, 0), None);
    }

    #[test]
    fn fig_pattern_component_counts() {
        // The full tetrahedral pattern: one component, 6 bands, index 4,
        // 4 boundary circles -> triple (7,4,4); the index agrees with the
        // sum over its four valence-three 0-handles.
        let c = ComponentCounts { band_cells: 6, index: 4, boundary_circles: 4, zero_handle: 0 };
        assert_eq!(c.triple(), ComplexityTriple::new(7, 4, 4));
        let per_handle_sum: i64 = (0..4).map(|_| index_of_0handle(3, 0)).sum();
        assert_eq!(per_handle_sum, 4);
        let (cx, ext) = measures_from_components(&[c]);
        assert_eq!(cx.set.triples(), &[ComplexityTriple::new(7, 4, 4)]);
        assert_eq!(cx.loaded_zero_handles, 1);
        assert_eq!(ext.set.len(), 1);
    }
}
