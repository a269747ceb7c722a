//! Divisor-level invariants: the inductive construction against the direct
//! one, the pentagon decomposition and its failure to persist in higher
//! weight, membership of spurious lifts in the blown-down list, and the
//! certificates on small sweeps.

use std::collections::BTreeSet;

use mzv_moduli::divisors::{
    blown_down_partitions, check_disjoint, check_vertex_avoidance, divisor_a,
    divisor_a_inductive, divisor_b,
};
use mzv_moduli::labels::{EpsilonWord, Label, LabelSet, MarkedSet};
use mzv_moduli::partitions::{enumerate_stable_partitions, StablePartition};

fn eps(s: &str) -> EpsilonWord {
    s.parse().unwrap()
}

fn all_words(n: usize) -> Vec<EpsilonWord> {
    (0..1u32 << n)
        .map(|bits| EpsilonWord::new((0..n).map(|i| bits >> i & 1 == 1).collect()).unwrap())
        .collect()
}

fn std_order(n: usize) -> mzv_moduli::labels::CyclicOrder {
    MarkedSet::new(n).unwrap().standard_order()
}

#[test]
fn inductive_equals_direct_through_weight_six() {
    for n in 1..=6usize {
        for word in all_words(n) {
            assert_eq!(
                divisor_a_inductive(&word).unwrap().components,
                divisor_a(&word).unwrap().components,
                "word {word}"
            );
        }
    }
}

#[test]
fn pentagon_union_is_whole_but_higher_weight_is_proper() {
    let a2 = divisor_a(&eps("10")).unwrap();
    let b2 = divisor_b(&std_order(2)).unwrap();
    assert_eq!(a2.len() + b2.len(), 10);
    assert!(a2.components.is_disjoint(&b2.components));

    let a3 = divisor_a(&eps("100")).unwrap();
    let b3 = divisor_b(&std_order(3)).unwrap();
    let total = enumerate_stable_partitions(&MarkedSet::new(3).unwrap())
        .unwrap()
        .len();
    assert_eq!(a3.len(), 11);
    assert_eq!(b3.len(), 9);
    assert!(a3.len() + b3.len() < total);
    assert_eq!(total, 25);
}

/// Spurious lifts: lifting every component of A(ε1..εn) both ways, the
/// lifts that are *not* components of A(ε1..ε{n+1}) must all sit in the
/// blown-down list, and re-adding the two poles must recover the divisor.
#[test]
fn spurious_lifts_are_blown_down() {
    for n in 1..=5usize {
        for word in all_words(n + 1) {
            let prefix = EpsilonWord::new(word.bits()[..n].to_vec()).unwrap();
            let smaller = divisor_a(&prefix).unwrap();
            let full = divisor_a(&word).unwrap();
            let carrier = LabelSet::standard(n + 1);
            let new_label = Label::S((n + 1) as u8);
            let blown = blown_down_partitions(&MarkedSet::new(n + 1).unwrap()).unwrap();

            let mut lifts: BTreeSet<StablePartition> = BTreeSet::new();
            for comp in &smaller.components {
                for part in [comp.side(), comp.zero_side()] {
                    lifts.insert(StablePartition::new(carrier, part.with(new_label)).unwrap());
                }
            }
            let spurious: Vec<&StablePartition> =
                lifts.difference(&full.components).collect();
            for p in &spurious {
                assert!(blown.contains(p), "spurious lift {p} not blown down");
            }
            // Kept lifts plus the two poles give exactly the new divisor.
            let eps_label = if word.value(n + 1) == 1 {
                Label::One
            } else {
                Label::Zero
            };
            let mut rebuilt: BTreeSet<StablePartition> =
                lifts.intersection(&full.components).copied().collect();
            rebuilt.insert(
                StablePartition::new(
                    carrier,
                    LabelSet::from_labels(&[new_label, eps_label]),
                )
                .unwrap(),
            );
            rebuilt.insert(
                StablePartition::new(
                    carrier,
                    LabelSet::from_labels(&[new_label, Label::Inf]),
                )
                .unwrap(),
            );
            assert_eq!(rebuilt, full.components, "word {word}");
        }
    }
}

/// Blown-down membership is exactly: both forgetful pushforwards stable, or
/// the extra family whose new-label part has no distinguished label.
#[test]
fn blown_down_matches_pushforward_classification() {
    for n_prime in 2..=4usize {
        let set = MarkedSet::new(n_prime).unwrap();
        let blown = blown_down_partitions(&set).unwrap();
        let last = Label::S(n_prime as u8);
        let old_movable = set.carrier().movable().without(last);
        let distinguished = LabelSet::from_labels(&[Label::Zero, Label::One, Label::Inf]);
        for p in enumerate_stable_partitions(&set).unwrap() {
            let p1 = mzv_moduli::partitions::pushforward(&p, LabelSet::from_labels(&[last]))
                .unwrap();
            let p4 = mzv_moduli::partitions::pushforward(&p, old_movable).unwrap();
            let p1_stable = matches!(p1, mzv_moduli::partitions::Pushforward::Partition(_));
            let p4_stable = matches!(p4, mzv_moduli::partitions::Pushforward::Partition(_));
            let part_with_last = p.part_of(last);
            let keel_extra = part_with_last.intersection(distinguished).is_empty();
            let expected = p1_stable && (p4_stable || keel_extra);
            assert_eq!(
                blown.contains(&p),
                expected,
                "n' = {n_prime}, partition {p}"
            );
        }
    }
}

#[test]
fn disjointness_sweep_small_weights() {
    for n in 2..=5usize {
        let rho = std_order(n);
        for word in all_words(n) {
            if !word.is_convergent() {
                continue;
            }
            let report = check_disjoint(&word, &rho).unwrap();
            assert!(report.disjoint, "word {word}");
        }
    }
}

#[test]
fn vertex_avoidance_sweep_small_weights() {
    for n in 2..=5usize {
        let rho = std_order(n);
        for word in all_words(n) {
            if !word.is_convergent() {
                continue;
            }
            let report = check_vertex_avoidance(&word, &rho).unwrap();
            assert!(report.vertex_clear, "word {word}");
            assert!(report.offending_vertex.is_none());
        }
    }
}

/// Weight-8 version of the vertex claim, with the trivalent faces
/// enumerated once and every defining partition type-checked against all
/// convergent words. Every vertex partition lies in the cell-boundary
/// divisor, so this also witnesses that disjointness covers the vertices.
#[test]
fn vertex_partitions_are_typeless_through_weight_eight() {
    let n = 8usize;
    let rho = std_order(n);
    let vertices = mzv_moduli::stasheff::faces(&rho, n).unwrap();
    let b = divisor_b(&rho).unwrap();
    let words: Vec<EpsilonWord> = all_words(n)
        .into_iter()
        .filter(EpsilonWord::is_convergent)
        .collect();
    assert_eq!(words.len(), 64);
    for vertex in &vertices {
        for p in vertex.partitions() {
            assert!(b.contains(p));
            for word in &words {
                assert_eq!(
                    mzv_moduli::partitions::partition_type(p, word).unwrap(),
                    None,
                    "vertex partition {p} typed under {word}"
                );
            }
        }
    }
}

#[test]
fn non_convergent_word_can_touch_the_boundary() {
    // ε = (0,1) reversed convergence: the divisors share components.
    let report = check_disjoint(&eps("01"), &std_order(2)).unwrap();
    assert!(!report.disjoint);
    for shared in &report.shared {
        assert!(divisor_a(&eps("01")).unwrap().contains(shared));
        assert!(divisor_b(&std_order(2)).unwrap().contains(shared));
    }
}
