//! Label sets, cyclic orders, ε-words and composition indices.
//!
//! The label set is always `{0, 1, inf} ∪ {s1, …, sn}` for some number `n`
//! of movable labels. Everything downstream (partitions, trees, divisors)
//! is built over these labels; coordinates never appear outside quadrature.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

/// Largest supported number of movable labels (the carrier must fit a u32 mask).
pub const MAX_MOVABLE: usize = 28;

/// Errors raised by label, cycle and composition handling.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum LabelError {
    /// An ε-word that does not start with 1 or does not end with 0.
    #[error("not convergent: {0}")]
    NotConvergent(String),
    /// A circular arrangement with duplicate or missing labels.
    #[error("bad arrangement: {0}")]
    BadArrangement(String),
    /// A composition violating `parts nonempty, every part >= 1, last part >= 2`.
    #[error("invalid composition: {0}")]
    InvalidComposition(String),
    /// A label token that is not `0`, `1`, `inf` or `s<k>`.
    #[error("invalid label: {0}")]
    InvalidLabel(String),
    /// An ε-word with no letters or letters outside {0,1}.
    #[error("invalid epsilon word: {0}")]
    InvalidEpsilon(String),
}

/// One marked point: the three fixed labels plus the movable ones.
#[derive(Debug, Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Zero,
    One,
    Inf,
    /// Movable label `s<k>`, 1-based.
    S(u8),
}

impl Label {
    /// Fixed bit position used by [`LabelSet`] masks.
    pub fn index(self) -> usize {
        match self {
            Label::Zero => 0,
            Label::One => 1,
            Label::Inf => 2,
            Label::S(i) => 2 + i as usize,
        }
    }

    fn from_index(idx: usize) -> Label {
        match idx {
            0 => Label::Zero,
            1 => Label::One,
            2 => Label::Inf,
            i => Label::S((i - 2) as u8),
        }
    }

    pub fn bit(self) -> u32 {
        1u32 << self.index()
    }

    pub fn is_movable(self) -> bool {
        matches!(self, Label::S(_))
    }

    /// Position of the label along the standard circle `0, s1, …, sn, 1, inf`.
    /// Used to pick the canonical reading direction of a cyclic order.
    fn cycle_key(self) -> (u8, u8) {
        match self {
            Label::Zero => (0, 0),
            Label::S(i) => (1, i),
            Label::One => (2, 0),
            Label::Inf => (3, 0),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Zero => write!(f, "0"),
            Label::One => write!(f, "1"),
            Label::Inf => write!(f, "inf"),
            Label::S(i) => write!(f, "s{i}"),
        }
    }
}

impl FromStr for Label {
    type Err = LabelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "0" => Ok(Label::Zero),
            "1" => Ok(Label::One),
            "inf" => Ok(Label::Inf),
            _ => {
                let idx = s
                    .strip_prefix('s')
                    .and_then(|t| t.parse::<u8>().ok())
                    .filter(|&i| i >= 1 && (i as usize) <= MAX_MOVABLE);
                idx.map(Label::S)
                    .ok_or_else(|| LabelError::InvalidLabel(s.to_string()))
            }
        }
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// A set of labels stored as a bitmask; all set algebra on partitions is mask
/// arithmetic so exhaustive sweeps over a thousand partitions stay instant.
#[derive(Debug, Copy, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LabelSet(u32);

impl LabelSet {
    pub const EMPTY: LabelSet = LabelSet(0);

    pub fn from_labels(labels: &[Label]) -> LabelSet {
        labels.iter().fold(LabelSet(0), |acc, &l| acc.with(l))
    }

    pub fn with(self, l: Label) -> LabelSet {
        LabelSet(self.0 | l.bit())
    }

    pub fn without(self, l: Label) -> LabelSet {
        LabelSet(self.0 & !l.bit())
    }

    pub fn contains(self, l: Label) -> bool {
        self.0 & l.bit() != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: LabelSet) -> LabelSet {
        LabelSet(self.0 | other.0)
    }

    pub fn intersection(self, other: LabelSet) -> LabelSet {
        LabelSet(self.0 & other.0)
    }

    pub fn difference(self, other: LabelSet) -> LabelSet {
        LabelSet(self.0 & !other.0)
    }

    pub fn is_subset_of(self, other: LabelSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Labels in ascending `Label` order (0 < 1 < inf < s1 < s2 < …).
    pub fn iter(self) -> impl Iterator<Item = Label> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let idx = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(Label::from_index(idx))
            }
        })
    }

    pub fn raw(self) -> u32 {
        self.0
    }

    pub(crate) fn from_raw(bits: u32) -> LabelSet {
        LabelSet(bits)
    }

    /// The labels `{0, 1, inf, s1, …, sn}`.
    pub fn standard(n: usize) -> LabelSet {
        debug_assert!(n <= MAX_MOVABLE);
        LabelSet((1u32 << (n + 3)) - 1)
    }

    /// True when the set is `{0, 1, inf, s1, …, sn}` for some n (no gaps).
    pub fn is_standard(self) -> bool {
        self.0.count_ones() >= 3 && self.0 == (1u32 << self.0.count_ones()) - 1
    }

    pub fn movable(self) -> LabelSet {
        LabelSet(self.0 & !0b111)
    }
}

impl Serialize for LabelSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

/// The marked set `S = {0, 1, inf, s1, …, sn}` with its standard cyclic order.
///
/// `n = 0` is representable as a degenerate carrier but every divisor and
/// period operation rejects it: the moduli space of three points is a point.
#[derive(Debug, Copy, Clone, PartialEq, Eq)]
pub struct MarkedSet {
    n: usize,
}

impl MarkedSet {
    pub fn new(n: usize) -> Result<MarkedSet, LabelError> {
        if n > MAX_MOVABLE {
            return Err(LabelError::InvalidLabel(format!(
                "n = {n} exceeds the supported maximum {MAX_MOVABLE}"
            )));
        }
        Ok(MarkedSet { n })
    }

    /// Movable label count.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Total label count `|S| = n + 3`.
    pub fn size(&self) -> usize {
        self.n + 3
    }

    pub fn carrier(&self) -> LabelSet {
        LabelSet::standard(self.n)
    }

    pub fn labels(&self) -> impl Iterator<Item = Label> {
        self.carrier().iter()
    }

    /// The standard cyclic order `0, s1, …, sn, 1, inf`.
    pub fn standard_order(&self) -> CyclicOrder {
        let mut seq = vec![Label::Zero];
        seq.extend((1..=self.n).map(|i| Label::S(i as u8)));
        seq.push(Label::One);
        seq.push(Label::Inf);
        canonicalize_cycle(&seq).expect("standard order is a valid arrangement")
    }
}

/// An unoriented cyclic order on a label set, held in canonical form:
/// label 0 first, then the lexicographically smaller of the two reading
/// directions (compared along the standard circle positions).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CyclicOrder {
    seq: Vec<Label>,
}

impl CyclicOrder {
    pub fn len(&self) -> usize {
        self.seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seq.is_empty()
    }

    /// Canonical arrangement, starting at label 0.
    pub fn seq(&self) -> &[Label] {
        &self.seq
    }

    pub fn labels_set(&self) -> LabelSet {
        LabelSet::from_labels(&self.seq)
    }

    /// Movable label count of the carrier.
    pub fn n(&self) -> usize {
        self.len() - 3
    }

    pub fn position(&self, l: Label) -> Option<usize> {
        self.seq.iter().position(|&x| x == l)
    }
}

impl fmt::Display for CyclicOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, l) in self.seq.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for CyclicOrder {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.seq.iter())
    }
}

/// Canonical representative of the unoriented cyclic order given by `raw`.
///
/// Rotations and reflections of `raw` canonicalize identically. The carrier
/// must contain the three distinguished labels and no duplicates.
pub fn canonicalize_cycle(raw: &[Label]) -> Result<CyclicOrder, LabelError> {
    let set = LabelSet::from_labels(raw);
    if set.len() != raw.len() {
        return Err(LabelError::BadArrangement(format!(
            "duplicate label in arrangement of length {}",
            raw.len()
        )));
    }
    for required in [Label::Zero, Label::One, Label::Inf] {
        if !set.contains(required) {
            return Err(LabelError::BadArrangement(format!(
                "missing distinguished label {required}"
            )));
        }
    }
    let m = raw.len();
    let zero_at = raw.iter().position(|&l| l == Label::Zero).unwrap();
    let forward: Vec<Label> = (0..m).map(|i| raw[(zero_at + i) % m]).collect();
    let backward: Vec<Label> = (0..m).map(|i| raw[(zero_at + m - i) % m]).collect();
    let key = |v: &[Label]| v.iter().map(|l| l.cycle_key()).collect::<Vec<_>>();
    let seq = if key(&forward) <= key(&backward) {
        forward
    } else {
        backward
    };
    Ok(CyclicOrder { seq })
}

/// A word `(ε1, …, εn)` over {0,1}; `convergent` means `ε1 = 1` and `εn = 0`.
///
/// Convergence is required by period operations, not by divisor operations.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EpsilonWord {
    bits: Vec<bool>,
}

impl EpsilonWord {
    pub fn new(bits: Vec<bool>) -> Result<EpsilonWord, LabelError> {
        if bits.is_empty() {
            return Err(LabelError::InvalidEpsilon("empty word".into()));
        }
        if bits.len() > MAX_MOVABLE {
            return Err(LabelError::InvalidEpsilon(format!(
                "word length {} exceeds the supported maximum {MAX_MOVABLE}",
                bits.len()
            )));
        }
        Ok(EpsilonWord { bits })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// `ε_i`, 1-based, as 0 or 1.
    pub fn value(&self, i: usize) -> u8 {
        u8::from(self.bits[i - 1])
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// True iff `ε1 = 1` and `εn = 0`.
    pub fn is_convergent(&self) -> bool {
        self.bits[0] && !self.bits[self.bits.len() - 1]
    }

    /// Depth: the number of 1 letters.
    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn word(&self) -> String {
        self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

impl fmt::Display for EpsilonWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.word())
    }
}

impl FromStr for EpsilonWord {
    type Err = LabelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(LabelError::InvalidEpsilon(format!(
                    "unexpected character {c:?} in {s:?}"
                ))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        EpsilonWord::new(bits)
    }
}

impl Serialize for EpsilonWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.word())
    }
}

/// A composition `(n1, …, nm)` with every part >= 1 and the last part >= 2,
/// the convergence condition of the defining series.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CompositionIndex {
    parts: Vec<u32>,
}

impl CompositionIndex {
    pub fn new(parts: Vec<u32>) -> Result<CompositionIndex, LabelError> {
        if parts.is_empty() {
            return Err(LabelError::InvalidComposition("no parts".into()));
        }
        if parts.contains(&0) {
            return Err(LabelError::InvalidComposition(
                "every part must be >= 1".into(),
            ));
        }
        if *parts.last().unwrap() < 2 {
            return Err(LabelError::InvalidComposition(
                "last part must be >= 2".into(),
            ));
        }
        let weight: u32 = parts.iter().sum();
        if weight as usize > MAX_MOVABLE {
            return Err(LabelError::InvalidComposition(format!(
                "weight {weight} exceeds the supported maximum {MAX_MOVABLE}"
            )));
        }
        Ok(CompositionIndex { parts })
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// Weight `n = Σ ni`.
    pub fn weight(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// Depth `m`, the number of parts.
    pub fn depth(&self) -> usize {
        self.parts.len()
    }
}

impl fmt::Display for CompositionIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for CompositionIndex {
    type Err = LabelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| LabelError::InvalidComposition(format!("bad part {t:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        CompositionIndex::new(parts)
    }
}

impl Serialize for CompositionIndex {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.parts.iter())
    }
}

/// The ε-word of a composition: length `weight`, with 1 exactly at positions
/// `1, n1+1, n1+n2+1, …`. The result is always convergent.
pub fn encode_epsilon(c: &CompositionIndex) -> EpsilonWord {
    let mut bits = vec![false; c.weight() as usize];
    let mut pos = 0usize;
    for &p in c.parts() {
        bits[pos] = true;
        pos += p as usize;
    }
    EpsilonWord::new(bits).expect("composition weight >= 2")
}

/// The unique composition whose encoding is `e`: each run `1,0,…,0` of
/// length k becomes a part k. Fails on non-convergent words.
pub fn decode_composition(e: &EpsilonWord) -> Result<CompositionIndex, LabelError> {
    if !e.is_convergent() {
        return Err(LabelError::NotConvergent(format!(
            "epsilon word {e} must start with 1 and end with 0"
        )));
    }
    let mut parts = Vec::new();
    let mut run = 0u32;
    for &b in e.bits() {
        if b {
            if run > 0 {
                parts.push(run);
            }
            run = 1;
        } else {
            run += 1;
        }
    }
    parts.push(run);
    CompositionIndex::new(parts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn comp(parts: &[u32]) -> CompositionIndex {
        CompositionIndex::new(parts.to_vec()).unwrap()
    }

    fn eps(s: &str) -> EpsilonWord {
        s.parse().unwrap()
    }

    #[test]
    fn encode_examples() {
        assert_eq!(encode_epsilon(&comp(&[2])), eps("10"));
        assert_eq!(encode_epsilon(&comp(&[1, 2])), eps("110"));
        assert_eq!(encode_epsilon(&comp(&[3])), eps("100"));
        assert!(encode_epsilon(&comp(&[2, 3])).is_convergent());
    }

    #[test]
    fn decode_examples() {
        assert_eq!(decode_composition(&eps("10")).unwrap(), comp(&[2]));
        assert_eq!(decode_composition(&eps("110")).unwrap(), comp(&[1, 2]));
        assert!(matches!(
            decode_composition(&eps("01")),
            Err(LabelError::NotConvergent(_))
        ));
        assert!(matches!(
            decode_composition(&eps("11")),
            Err(LabelError::NotConvergent(_))
        ));
    }

    #[test]
    fn composition_validation() {
        assert!(CompositionIndex::new(vec![]).is_err());
        assert!(CompositionIndex::new(vec![2, 1]).is_err());
        assert!(CompositionIndex::new(vec![0, 2]).is_err());
        assert!(CompositionIndex::new(vec![1, 2]).is_ok());
    }

    #[test]
    fn cycle_reflection_and_rotation() {
        let a = canonicalize_cycle(&[
            Label::Zero,
            Label::S(1),
            Label::S(2),
            Label::One,
            Label::Inf,
        ])
        .unwrap();
        let b = canonicalize_cycle(&[
            Label::Zero,
            Label::Inf,
            Label::One,
            Label::S(2),
            Label::S(1),
        ])
        .unwrap();
        let c = canonicalize_cycle(&[
            Label::S(1),
            Label::S(2),
            Label::One,
            Label::Inf,
            Label::Zero,
        ])
        .unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(a.seq()[0], Label::Zero);
    }

    #[test]
    fn cycle_standard_direction() {
        // The canonical reading of the standard order keeps s1 right after 0.
        let std = MarkedSet::new(2).unwrap().standard_order();
        assert_eq!(
            std.seq(),
            &[Label::Zero, Label::S(1), Label::S(2), Label::One, Label::Inf]
        );
    }

    #[test]
    fn cycle_bad_arrangements() {
        assert!(matches!(
            canonicalize_cycle(&[Label::Zero, Label::One, Label::One, Label::Inf]),
            Err(LabelError::BadArrangement(_))
        ));
        assert!(matches!(
            canonicalize_cycle(&[Label::Zero, Label::One, Label::S(1)]),
            Err(LabelError::BadArrangement(_))
        ));
    }

    #[test]
    fn label_text_roundtrip() {
        for l in [Label::Zero, Label::One, Label::Inf, Label::S(7)] {
            assert_eq!(l.to_string().parse::<Label>().unwrap(), l);
        }
        assert!("s0".parse::<Label>().is_err());
        assert!("x3".parse::<Label>().is_err());
    }

    #[test]
    fn epsilon_word_parsing() {
        assert_eq!(eps("10").word(), "10");
        assert!(!eps("01").is_convergent());
        assert!("".parse::<EpsilonWord>().is_err());
        assert!("102".parse::<EpsilonWord>().is_err());
    }

    #[test]
    fn marked_set_basics() {
        let s = MarkedSet::new(2).unwrap();
        assert_eq!(s.size(), 5);
        assert_eq!(s.carrier().len(), 5);
        assert!(s.carrier().is_standard());
        // n = 0 is representable (degenerate carrier).
        assert_eq!(MarkedSet::new(0).unwrap().size(), 3);
    }

    #[test]
    fn label_set_order_matches_display_sort() {
        let set = LabelSet::from_labels(&[Label::S(1), Label::Inf, Label::One]);
        let sorted: Vec<String> = set.iter().map(|l| l.to_string()).collect();
        assert_eq!(sorted, vec!["1", "inf", "s1"]);
    }
}
