//! Cells of the real moduli space: the face lattice of the Stasheff
//! polytope attached to a cyclic order.
//!
//! The closure of the open cell labeled by a cyclic order ρ is a Stasheff
//! polytope; its codimension-k faces correspond to sets of k pairwise
//! compatible (δ = 1) arc partitions of ρ, or equivalently to ρ-planar
//! stable trees with k internal edges. Faces are enumerated from subsets of
//! arc partitions and materialized through the tree reconstruction, so the
//! tree route stays the single source of truth.

use std::collections::{BTreeSet, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::labels::{CyclicOrder, Label, MarkedSet};
use crate::partitions::{delta, PartitionError, StablePartition};
use crate::trees::{tree_from_partitions, StableTree, TreeError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StasheffError {
    /// Requested codimension above the polytope dimension.
    #[error("bad codimension {codim} for n = {n}")]
    BadCodim { codim: usize, n: usize },
    /// The carrier has no movable labels; there is no polytope.
    #[error("carrier too small: |S| = {0} < 4")]
    TooSmall(usize),
    /// Faces over different cyclic orders were compared.
    #[error("mismatched cyclic orders")]
    MismatchedOrder,
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// A face of the Stasheff polytope of a cyclic order: a ρ-planar stable
/// tree, equivalently a pairwise-compatible set of arc partitions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Face {
    order: CyclicOrder,
    codim: usize,
    partitions: Vec<StablePartition>,
    tree: StableTree,
}

impl Face {
    pub fn order(&self) -> &CyclicOrder {
        &self.order
    }

    /// Codimension: the number of internal edges of the tree.
    pub fn codim(&self) -> usize {
        self.codim
    }

    pub fn dimension(&self) -> usize {
        self.order.n() - self.codim
    }

    /// The defining arc partitions, sorted.
    pub fn partitions(&self) -> &[StablePartition] {
        &self.partitions
    }

    pub fn tree(&self) -> &StableTree {
        &self.tree
    }
}

/// All arc partitions of the order: the components of the cell-boundary
/// divisor. There are `m(m-3)/2` of them for `|S| = m`.
pub fn facet_partitions(
    order: &CyclicOrder,
) -> Result<BTreeSet<StablePartition>, StasheffError> {
    let carrier = order.labels_set();
    if carrier.len() < 4 {
        return Err(StasheffError::TooSmall(carrier.len()));
    }
    let seq = order.seq();
    let m = seq.len();
    let mut out = BTreeSet::new();
    // Arcs are contiguous runs of length 2..m-2 around the circle.
    for start in 0..m {
        for len in 2..=(m - 2) {
            let mut part = crate::labels::LabelSet::EMPTY;
            for k in 0..len {
                part = part.with(seq[(start + k) % m]);
            }
            out.insert(StablePartition::new(carrier, part)?);
        }
    }
    Ok(out)
}

/// Callback receiving the members of each clique of the target size.
type CliqueVisitor<'a> = Option<&'a mut dyn FnMut(&[usize])>;

/// Index-increasing enumeration of δ=1 cliques among the arcs. `counts`
/// records one entry per clique size; `visit` is called with the members of
/// every clique of size exactly `target`.
fn walk_cliques(
    arcs: &[StablePartition],
    compat: &[u64],
    target: usize,
    counts: &mut [usize],
    visit: &mut CliqueVisitor<'_>,
) {
    fn recurse(
        chosen: &mut Vec<usize>,
        candidates: u64,
        compat: &[u64],
        target: usize,
        counts: &mut [usize],
        visit: &mut CliqueVisitor<'_>,
    ) {
        let size = chosen.len();
        counts[size] += 1;
        if size == target {
            if let Some(f) = visit {
                f(chosen);
            }
        }
        if size >= counts.len() - 1 {
            return;
        }
        let mut rest = candidates;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            chosen.push(i);
            let mask_above = if i + 1 >= 64 { 0 } else { !0u64 << (i + 1) };
            recurse(
                chosen,
                candidates & compat[i] & mask_above,
                compat,
                target,
                counts,
                visit,
            );
            chosen.pop();
        }
    }
    let all = if arcs.len() >= 64 {
        !0u64
    } else {
        (1u64 << arcs.len()) - 1
    };
    recurse(&mut Vec::new(), all, compat, target, counts, visit);
}

fn arc_list_and_compat(
    order: &CyclicOrder,
) -> Result<(Vec<StablePartition>, Vec<u64>), StasheffError> {
    let arcs: Vec<StablePartition> = facet_partitions(order)?.into_iter().collect();
    let mut compat = vec![0u64; arcs.len()];
    for i in 0..arcs.len() {
        for j in 0..arcs.len() {
            if i != j && delta(&arcs[i], &arcs[j])? == 1 {
                compat[i] |= 1u64 << j;
            }
        }
    }
    Ok((arcs, compat))
}

/// All codimension-k faces of the Stasheff polytope of `order`, each
/// materialized as its ρ-planar tree.
pub fn faces(order: &CyclicOrder, codim: usize) -> Result<Vec<Face>, StasheffError> {
    let carrier = order.labels_set();
    if carrier.len() < 4 {
        return Err(StasheffError::TooSmall(carrier.len()));
    }
    let n = order.n();
    if codim > n {
        return Err(StasheffError::BadCodim { codim, n });
    }
    if codim == 0 {
        let tree = StableTree::open_stratum(carrier).embed_in_order(order)?;
        return Ok(vec![Face {
            order: order.clone(),
            codim: 0,
            partitions: Vec::new(),
            tree,
        }]);
    }
    let (arcs, compat) = arc_list_and_compat(order)?;
    let mut counts = vec![0usize; codim + 1];
    let mut out = Vec::new();
    let mut collect = |chosen: &[usize]| {
        let partitions: Vec<StablePartition> = chosen.iter().map(|&i| arcs[i]).collect();
        let tree = tree_from_partitions(&partitions)
            .and_then(|t| t.embed_in_order(order))
            .expect("compatible arc partitions define a planar stratum");
        out.push(Face {
            order: order.clone(),
            codim,
            partitions,
            tree,
        });
    };
    let mut visit: CliqueVisitor<'_> = Some(&mut collect);
    walk_cliques(&arcs, &compat, codim, &mut counts, &mut visit);
    Ok(out)
}

/// Face counts by codimension `0..=n`.
pub fn f_vector(order: &CyclicOrder) -> Result<Vec<usize>, StasheffError> {
    let carrier = order.labels_set();
    if carrier.len() < 4 {
        return Err(StasheffError::TooSmall(carrier.len()));
    }
    let n = order.n();
    let (arcs, compat) = arc_list_and_compat(order)?;
    let mut counts = vec![0usize; n + 1];
    let mut visit: CliqueVisitor<'_> = None;
    walk_cliques(&arcs, &compat, usize::MAX, &mut counts, &mut visit);
    Ok(counts)
}

/// True iff `g` is a codimension-one piece of the boundary of `f`:
/// `codim(g) = codim(f) + 1` and contracting one internal edge of `g`'s
/// tree yields `f`'s tree (equivalently, `f`'s partitions are a subset of
/// `g`'s).
pub fn face_boundary_relation(f: &Face, g: &Face) -> Result<bool, StasheffError> {
    if f.order != g.order {
        return Err(StasheffError::MismatchedOrder);
    }
    if g.codim != f.codim + 1 {
        return Ok(false);
    }
    let g_set: BTreeSet<&StablePartition> = g.partitions.iter().collect();
    Ok(f.partitions.iter().all(|p| g_set.contains(p)))
}

/// Census of the codimension-k cells of the real moduli space, exposed as
/// the disjoint union over all canonical cyclic orders. A locally planar
/// tree shared by several maximal cells is counted per cell and reported as
/// a duplicate, not fused.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellCensus {
    pub codim: usize,
    /// Face count per canonical cyclic order.
    pub per_order: Vec<(CyclicOrder, usize)>,
    pub total: usize,
    /// Distinct locally planar trees across all orders.
    pub distinct_trees: usize,
    pub duplicates: usize,
}

/// Enumerate all canonical cyclic orders of `S` and count codim-k faces per
/// order, reporting cross-order deduplication of locally planar trees.
pub fn cell_census(set: &MarkedSet, codim: usize) -> Result<CellCensus, StasheffError> {
    if set.size() < 4 {
        return Err(StasheffError::TooSmall(set.size()));
    }
    let mut movable: Vec<Label> = set.labels().filter(|l| *l != Label::Zero).collect();
    let mut orders: BTreeSet<Vec<Label>> = BTreeSet::new();
    // Heap's algorithm over the non-zero labels, 0 kept first.
    let k = movable.len();
    let mut counters = vec![0usize; k];
    let push =
        |perm: &[Label], orders: &mut BTreeSet<Vec<Label>>| -> Result<(), StasheffError> {
            let mut arrangement = vec![Label::Zero];
            arrangement.extend_from_slice(perm);
            let canon = crate::labels::canonicalize_cycle(&arrangement)
                .map_err(|_| StasheffError::TooSmall(set.size()))?;
            orders.insert(canon.seq().to_vec());
            Ok(())
        };
    push(&movable, &mut orders)?;
    let mut i = 0;
    while i < k {
        if counters[i] < i {
            if i % 2 == 0 {
                movable.swap(0, i);
            } else {
                movable.swap(counters[i], i);
            }
            push(&movable, &mut orders)?;
            counters[i] += 1;
            i = 0;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }

    let mut per_order = Vec::new();
    let mut distinct: HashSet<StableTree> = HashSet::new();
    let mut total = 0usize;
    for seq in orders {
        let order = crate::labels::canonicalize_cycle(&seq)
            .expect("canonical sequence stays canonical");
        let cell_faces = faces(&order, codim)?;
        total += cell_faces.len();
        per_order.push((order, cell_faces.len()));
        for face in cell_faces {
            distinct.insert(face.tree().clone());
        }
    }
    Ok(CellCensus {
        codim,
        per_order,
        total,
        distinct_trees: distinct.len(),
        duplicates: total - distinct.len(),
    })
}
