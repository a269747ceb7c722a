//! Stable 2-partitions of the label set, the δ-distance, ε-type
//! classification, arc tests against a cyclic order, and forgetful
//! pushforward.
//!
//! Boundary divisors of the moduli space are indexed by unordered stable
//! 2-partitions of `S` (both parts of size >= 2). A partition is stored as
//! the part not containing label 0, as a bitmask over a carrier set.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::labels::{CyclicOrder, EpsilonWord, Label, LabelSet, MarkedSet};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PartitionError {
    /// The carrier has fewer than four labels; no stable partitions exist.
    #[error("carrier too small: |S| = {0} < 4")]
    TooSmall(usize),
    /// Two partitions over different carriers were combined.
    #[error("mismatched carriers")]
    MismatchedCarrier,
    /// The ε-word length does not match the carrier's movable labels.
    #[error("epsilon word length {word} does not match carrier with {movable} movable labels")]
    LengthMismatch { word: usize, movable: usize },
    /// A partition matched two type classes at once; signals an internal
    /// contradiction, not expected for any valid input.
    #[error("ambiguous type for partition {0}")]
    AmbiguousType(String),
    /// A part violates the stability bound `2 <= |part| <= |S| - 2`.
    #[error("unstable partition: {0}")]
    Unstable(String),
    /// A forget set touching {0, 1, inf} or leaving fewer than four labels.
    #[error("bad forget set: {0}")]
    BadForgetSet(String),
    /// Malformed partition text.
    #[error("bad partition: {0}")]
    BadPartition(String),
}

/// A stable unordered 2-partition of a carrier label set, canonically
/// represented by the part that does not contain label 0.
#[derive(Debug, Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StablePartition {
    carrier: LabelSet,
    side: LabelSet,
}

impl StablePartition {
    /// Build from a carrier and either one of the two parts.
    pub fn new(carrier: LabelSet, part: LabelSet) -> Result<StablePartition, PartitionError> {
        if carrier.len() < 4 {
            return Err(PartitionError::TooSmall(carrier.len()));
        }
        for required in [Label::Zero, Label::One, Label::Inf] {
            if !carrier.contains(required) {
                return Err(PartitionError::BadPartition(format!(
                    "carrier misses distinguished label {required}"
                )));
            }
        }
        if !part.is_subset_of(carrier) {
            return Err(PartitionError::BadPartition(
                "part is not a subset of the carrier".into(),
            ));
        }
        let side = if part.contains(Label::Zero) {
            carrier.difference(part)
        } else {
            part
        };
        if side.len() < 2 || carrier.len() - side.len() < 2 {
            return Err(PartitionError::Unstable(format!(
                "parts of sizes {} and {}",
                side.len(),
                carrier.len() - side.len()
            )));
        }
        Ok(StablePartition { carrier, side })
    }

    pub fn carrier(&self) -> LabelSet {
        self.carrier
    }

    /// The part not containing label 0.
    pub fn side(&self) -> LabelSet {
        self.side
    }

    /// The part containing label 0.
    pub fn zero_side(&self) -> LabelSet {
        self.carrier.difference(self.side)
    }

    /// The part containing the given label.
    pub fn part_of(&self, l: Label) -> LabelSet {
        if self.side.contains(l) {
            self.side
        } else {
            self.zero_side()
        }
    }
}

fn format_part(set: LabelSet, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write!(f, "{{")?;
    for (i, l) in set.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{l}")?;
    }
    write!(f, "}}")
}

impl fmt::Display for StablePartition {
    /// Text form `{0,s2}|{1,inf,s1}`: parts internally sorted, 0-part first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        format_part(self.zero_side(), f)?;
        write!(f, "|")?;
        format_part(self.side, f)
    }
}

impl FromStr for StablePartition {
    type Err = PartitionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s
            .split_once('|')
            .ok_or_else(|| PartitionError::BadPartition(format!("missing | in {s:?}")))?;
        let parse_part = |t: &str| -> Result<LabelSet, PartitionError> {
            let t = t.trim();
            let inner = t
                .strip_prefix('{')
                .and_then(|u| u.strip_suffix('}'))
                .ok_or_else(|| PartitionError::BadPartition(format!("part {t:?} not braced")))?;
            let mut set = LabelSet::EMPTY;
            for token in inner.split(',') {
                let token = token.trim();
                if token.is_empty() {
                    continue;
                }
                let label: Label = token
                    .parse()
                    .map_err(|e| PartitionError::BadPartition(format!("{e}")))?;
                if set.contains(label) {
                    return Err(PartitionError::BadPartition(format!(
                        "duplicate label {label}"
                    )));
                }
                set = set.with(label);
            }
            Ok(set)
        };
        let first = parse_part(a)?;
        let second = parse_part(b)?;
        if !first.intersection(second).is_empty() {
            return Err(PartitionError::BadPartition(
                "parts are not disjoint".into(),
            ));
        }
        StablePartition::new(first.union(second), second)
    }
}

impl Serialize for StablePartition {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Type of a partition with respect to an ε-word: one part is `{α} ∪ T`
/// with `T` a nonempty subset of `S(α)`.
#[derive(Debug, Copy, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PartitionType {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1")]
    One,
    #[serde(rename = "inf")]
    Inf,
}

impl fmt::Display for PartitionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartitionType::Zero => write!(f, "0"),
            PartitionType::One => write!(f, "1"),
            PartitionType::Inf => write!(f, "inf"),
        }
    }
}

/// Image of a boundary divisor under a forgetful map: either the induced
/// stable partition or the whole target space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pushforward {
    Partition(StablePartition),
    WholeSpace,
}

/// All stable 2-partitions of `S`, one per unordered partition.
///
/// The count is `2^(|S|-1) - |S| - 1`.
pub fn enumerate_stable_partitions(
    set: &MarkedSet,
) -> Result<Vec<StablePartition>, PartitionError> {
    let m = set.size();
    if m < 4 {
        return Err(PartitionError::TooSmall(m));
    }
    let carrier = set.carrier();
    let nonzero = carrier.without(Label::Zero);
    let mut out = Vec::with_capacity((1usize << (m - 1)) - m - 1);
    // Subsets of the 0-free labels, masked into place.
    let bits = nonzero.raw();
    let mut sub = bits;
    loop {
        let size = sub.count_ones() as usize;
        if size >= 2 && size <= m - 2 {
            out.push(StablePartition {
                carrier,
                side: LabelSet::from_raw(sub),
            });
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & bits;
    }
    out.sort();
    Ok(out)
}

/// δ-distance: the number of nonempty pairwise intersections of the parts,
/// minus 2. δ = 0 iff the partitions coincide, δ = 2 iff the corresponding
/// divisors are disjoint, δ = 1 iff they meet in codimension two.
pub fn delta(a: &StablePartition, b: &StablePartition) -> Result<u8, PartitionError> {
    if a.carrier != b.carrier {
        return Err(PartitionError::MismatchedCarrier);
    }
    let a1 = a.side;
    let a2 = a.zero_side();
    let b1 = b.side;
    let b2 = b.zero_side();
    let nonempty = [
        a1.intersection(b1),
        a1.intersection(b2),
        a2.intersection(b1),
        a2.intersection(b2),
    ]
    .iter()
    .filter(|s| !s.is_empty())
    .count();
    Ok(nonempty as u8 - 2)
}

/// Classify a partition against an ε-word.
///
/// Returns `Some(α)` iff one part equals `{α} ∪ T` with `T` a nonempty
/// subset of `S(α)`, where `S(0)` and `S(1)` collect the movable labels with
/// that ε value and `S(inf)` is their union. All three classes are checked;
/// a double match is reported as `AmbiguousType` instead of being resolved
/// silently.
pub fn partition_type(
    p: &StablePartition,
    eps: &EpsilonWord,
) -> Result<Option<PartitionType>, PartitionError> {
    let movable = p.carrier.movable();
    if !p.carrier.is_standard() || movable.len() != eps.len() {
        return Err(PartitionError::LengthMismatch {
            word: eps.len(),
            movable: movable.len(),
        });
    }
    let mut s_zero = LabelSet::EMPTY;
    let mut s_one = LabelSet::EMPTY;
    for i in 1..=eps.len() {
        let l = Label::S(i as u8);
        if eps.value(i) == 1 {
            s_one = s_one.with(l);
        } else {
            s_zero = s_zero.with(l);
        }
    }
    let cases = [
        (Label::Zero, s_zero, PartitionType::Zero),
        (Label::One, s_one, PartitionType::One),
        (Label::Inf, s_zero.union(s_one), PartitionType::Inf),
    ];
    let mut found = None;
    for (alpha, allowed, ty) in cases {
        for part in [p.side, p.zero_side()] {
            let t = part.without(alpha);
            if part.contains(alpha) && !t.is_empty() && t.is_subset_of(allowed) {
                if found.is_some() && found != Some(ty) {
                    return Err(PartitionError::AmbiguousType(p.to_string()));
                }
                found = Some(ty);
            }
        }
    }
    Ok(found)
}

/// True iff both parts of the partition are contiguous arcs of the cyclic
/// order, i.e. the partition arises from breaking the circle into two arcs.
pub fn is_arc_partition(
    p: &StablePartition,
    order: &CyclicOrder,
) -> Result<bool, PartitionError> {
    if order.labels_set() != p.carrier {
        return Err(PartitionError::MismatchedCarrier);
    }
    let seq = order.seq();
    let m = seq.len();
    let mut transitions = 0;
    for i in 0..m {
        let here = p.side.contains(seq[i]);
        let next = p.side.contains(seq[(i + 1) % m]);
        if here != next {
            transitions += 1;
        }
    }
    Ok(transitions == 2)
}

/// Induced partition after forgetting the labels in `forget`.
///
/// Returns the induced partition of the smaller carrier when both induced
/// parts keep at least two labels, and `WholeSpace` otherwise.
pub fn pushforward(
    p: &StablePartition,
    forget: LabelSet,
) -> Result<Pushforward, PartitionError> {
    if !forget.is_subset_of(p.carrier) {
        return Err(PartitionError::BadForgetSet(
            "forget set is not contained in the carrier".into(),
        ));
    }
    if !forget.movable().eq(&forget) {
        return Err(PartitionError::BadForgetSet(
            "forget set must avoid {0, 1, inf}".into(),
        ));
    }
    let remaining = p.carrier.difference(forget);
    if remaining.len() < 4 {
        return Err(PartitionError::BadForgetSet(format!(
            "only {} labels would remain",
            remaining.len()
        )));
    }
    let side = p.side.difference(forget);
    let zero_side = p.zero_side().difference(forget);
    if side.len() < 2 || zero_side.len() < 2 {
        return Ok(Pushforward::WholeSpace);
    }
    Ok(Pushforward::Partition(StablePartition {
        carrier: remaining,
        side,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(s: &str) -> StablePartition {
        s.parse().unwrap()
    }

    fn eps(s: &str) -> EpsilonWord {
        s.parse().unwrap()
    }

    #[test]
    fn enumerate_counts() {
        // |S| = 4: the three boundary divisors.
        let three = enumerate_stable_partitions(&MarkedSet::new(1).unwrap()).unwrap();
        assert_eq!(three.len(), 3);
        let texts: Vec<String> = three.iter().map(|p| p.to_string()).collect();
        assert!(texts.contains(&"{0,s1}|{1,inf}".to_string()));
        assert!(texts.contains(&"{0,inf}|{1,s1}".to_string()));
        assert!(texts.contains(&"{0,1}|{inf,s1}".to_string()));

        assert_eq!(
            enumerate_stable_partitions(&MarkedSet::new(2).unwrap())
                .unwrap()
                .len(),
            10
        );
        assert_eq!(
            enumerate_stable_partitions(&MarkedSet::new(3).unwrap())
                .unwrap()
                .len(),
            25
        );
        assert!(matches!(
            enumerate_stable_partitions(&MarkedSet::new(0).unwrap()),
            Err(PartitionError::TooSmall(3))
        ));
    }

    #[test]
    fn delta_examples() {
        let a = part("{0,s2}|{1,inf,s1}");
        assert_eq!(delta(&a, &a).unwrap(), 0);
        assert_eq!(delta(&a, &part("{0,1,inf}|{s1,s2}")).unwrap(), 2);
        assert_eq!(delta(&a, &part("{0,1,s2}|{inf,s1}")).unwrap(), 1);
    }

    #[test]
    fn delta_mismatched_carrier() {
        let a = part("{0,s2}|{1,inf,s1}");
        let b = part("{0,s1}|{1,inf}");
        assert!(matches!(
            delta(&a, &b),
            Err(PartitionError::MismatchedCarrier)
        ));
    }

    #[test]
    fn type_examples() {
        let e = eps("10");
        assert_eq!(
            partition_type(&part("{0,inf,s2}|{1,s1}"), &e).unwrap(),
            Some(PartitionType::One)
        );
        assert_eq!(
            partition_type(&part("{0,1,inf}|{s1,s2}"), &e).unwrap(),
            None
        );
        assert_eq!(
            partition_type(&part("{0,1}|{inf,s1,s2}"), &e).unwrap(),
            Some(PartitionType::Inf)
        );
        assert_eq!(
            partition_type(&part("{0,s2}|{1,inf,s1}"), &e).unwrap(),
            Some(PartitionType::Zero)
        );
    }

    #[test]
    fn type_length_mismatch() {
        assert!(matches!(
            partition_type(&part("{0,s2}|{1,inf,s1}"), &eps("100")),
            Err(PartitionError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn type_never_ambiguous_on_small_sweeps() {
        for n in 1..=4usize {
            let set = MarkedSet::new(n).unwrap();
            let parts = enumerate_stable_partitions(&set).unwrap();
            for bits in 0..(1u32 << n) {
                let word =
                    EpsilonWord::new((0..n).map(|i| bits >> i & 1 == 1).collect()).unwrap();
                for p in &parts {
                    assert!(partition_type(p, &word).is_ok());
                }
            }
        }
    }

    #[test]
    fn arc_examples() {
        let rho = MarkedSet::new(2).unwrap().standard_order();
        assert!(is_arc_partition(&part("{0,1,inf}|{s1,s2}"), &rho).unwrap());
        assert!(!is_arc_partition(&part("{0,inf,s2}|{1,s1}"), &rho).unwrap());
        assert!(is_arc_partition(&part("{0,s1}|{1,inf,s2}"), &rho).unwrap());
    }

    #[test]
    fn pushforward_examples() {
        let p = part("{0,s2}|{1,inf,s1}");
        assert_eq!(
            pushforward(&p, LabelSet::from_labels(&[Label::S(2)])).unwrap(),
            Pushforward::WholeSpace
        );
        assert_eq!(
            pushforward(&p, LabelSet::from_labels(&[Label::S(1)])).unwrap(),
            Pushforward::Partition(part("{0,s2}|{1,inf}"))
        );
        assert_eq!(
            pushforward(&p, LabelSet::EMPTY).unwrap(),
            Pushforward::Partition(p)
        );
    }

    #[test]
    fn pushforward_bad_forget_sets() {
        let p = part("{0,s2}|{1,inf,s1}");
        assert!(matches!(
            pushforward(&p, LabelSet::from_labels(&[Label::One])),
            Err(PartitionError::BadForgetSet(_))
        ));
        assert!(matches!(
            pushforward(&p, LabelSet::from_labels(&[Label::S(1), Label::S(2)])),
            Err(PartitionError::BadForgetSet(_))
        ));
    }

    #[test]
    fn text_roundtrip_and_canonical_zero_side() {
        let p = part("{1,inf,s1}|{0,s2}");
        assert_eq!(p.to_string(), "{0,s2}|{1,inf,s1}");
        assert_eq!(p, part("{0,s2}|{1,inf,s1}"));
        assert!("{0,s1}|{1,s1,inf}".parse::<StablePartition>().is_err());
        assert!("{0}|{1,inf,s1}".parse::<StablePartition>().is_err());
    }
}
