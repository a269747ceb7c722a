//! Dual trees of boundary strata.
//!
//! A boundary stratum is encoded by a stable tree with tails labeled by the
//! carrier set: cutting any internal edge produces one stable 2-partition,
//! and a set of partitions determines a stratum exactly when all pairwise
//! δ-distances equal 1. Trees may carry a locally planar structure (a cyclic
//! order of the flags at each vertex), the combinatorial shadow of a real
//! curve's equators.
//!
//! Trees are kept in a canonical form: vertices are numbered in preorder
//! from the vertex holding tail 0, children ordered by the smallest tail
//! label in their subtree, so equality of trees is structural equality.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::labels::{CyclicOrder, Label, LabelSet};
use crate::partitions::{delta, PartitionError, StablePartition};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    /// Some pair of partitions has δ ≠ 1 and therefore defines no stratum.
    #[error("not a stratum: delta({sigma}, {tau}) = {delta}")]
    NotAStratum {
        sigma: String,
        tau: String,
        delta: u8,
    },
    /// The empty set corresponds to the open stratum; use
    /// [`StableTree::open_stratum`] for its single-vertex tree.
    #[error("empty partition set")]
    Empty,
    /// An edge index out of range.
    #[error("not an edge: index {0}")]
    NotAnEdge(usize),
    /// Partitions over different carriers.
    #[error("mismatched carriers")]
    MismatchedCarrier,
    /// The tree cannot be drawn inside the circle of the given cyclic order.
    #[error("not planar for the given order: {0}")]
    NotPlanar(String),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

/// A flag at a vertex: an attached tail or the germ of an edge towards a
/// neighboring vertex.
#[derive(Debug, Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Flag {
    Tail(Label),
    EdgeTo(usize),
}

impl Serialize for Flag {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Flag", 1)?;
        match self {
            Flag::Tail(l) => s.serialize_field("tail", &l.to_string())?,
            Flag::EdgeTo(v) => s.serialize_field("edge_to", v)?,
        }
        s.end()
    }
}

/// Multiset of flag counts together with the stratum dimension
/// `Σ_v (|F(v)| - 3)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StratumSignature {
    /// `|F(v)|` for each vertex, sorted ascending.
    pub flag_counts: Vec<usize>,
    pub dimension: usize,
}

/// The dual tree of a boundary stratum.
///
/// Equality and hashing treat the planar structure per the geometric
/// definition: the cyclic order at each vertex is unoriented independently,
/// so two trees differing by reflecting single vertex cycles are the same
/// cell. The stored lists keep one consistent orientation so contraction
/// can splice them.
#[derive(Debug, Clone)]
pub struct StableTree {
    carrier: LabelSet,
    vertex_count: usize,
    /// Internal edges as vertex pairs `(u, v)` with `u < v`, sorted.
    edges: Vec<(usize, usize)>,
    /// Tail attachment, sorted by label.
    tails: Vec<(Label, usize)>,
    /// Cyclic flag order per vertex, when a locally planar structure is
    /// attached. Stored consistently oriented across vertices.
    planar: Option<Vec<Vec<Flag>>>,
}

impl PartialEq for StableTree {
    fn eq(&self, other: &Self) -> bool {
        self.carrier == other.carrier
            && self.vertex_count == other.vertex_count
            && self.edges == other.edges
            && self.tails == other.tails
            && self.planar.as_deref().map(local_canonical)
                == other.planar.as_deref().map(local_canonical)
    }
}

impl Eq for StableTree {}

impl std::hash::Hash for StableTree {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.carrier.hash(state);
        self.vertex_count.hash(state);
        self.edges.hash(state);
        self.tails.hash(state);
        self.planar.as_deref().map(local_canonical).hash(state);
    }
}

/// Mutable adjacency form used during construction and contraction.
struct Builder {
    carrier: LabelSet,
    tails: Vec<LabelSet>,
    adj: Vec<Vec<usize>>,
    planar: Option<Vec<Vec<Flag>>>,
}

impl Builder {
    fn single_vertex(carrier: LabelSet) -> Builder {
        Builder {
            carrier,
            tails: vec![carrier],
            adj: vec![Vec::new()],
            planar: None,
        }
    }

    fn from_tree(t: &StableTree) -> Builder {
        let mut tails = vec![LabelSet::EMPTY; t.vertex_count];
        for &(l, v) in &t.tails {
            tails[v] = tails[v].with(l);
        }
        let mut adj = vec![Vec::new(); t.vertex_count];
        for &(a, b) in &t.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        Builder {
            carrier: t.carrier,
            tails,
            adj,
            planar: t.planar.clone(),
        }
    }

    /// Tails in the component of `via` after removing the edge `(from, via)`.
    fn tails_beyond(&self, from: usize, via: usize) -> LabelSet {
        let mut seen = vec![false; self.adj.len()];
        seen[from] = true;
        let mut stack = vec![via];
        let mut acc = LabelSet::EMPTY;
        while let Some(v) = stack.pop() {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            acc = acc.union(self.tails[v]);
            for &w in &self.adj[v] {
                if !seen[w] {
                    stack.push(w);
                }
            }
        }
        acc
    }

    /// Split the unique vertex whose flags refine the given side, adding a
    /// new edge between the two halves.
    fn insert_split(&mut self, side: LabelSet) -> Result<(), TreeError> {
        let other = self.carrier.difference(side);
        for v in 0..self.adj.len() {
            let mut side_neighbors = Vec::new();
            let mut ok = true;
            for &w in &self.adj[v] {
                let group = self.tails_beyond(v, w);
                if group.is_subset_of(side) {
                    side_neighbors.push(w);
                } else if !group.is_subset_of(other) {
                    ok = false;
                    break;
                }
            }
            if !ok {
                continue;
            }
            let side_tails = self.tails[v].intersection(side);
            // The new vertex must take at least one flag and leave at least
            // one behind, otherwise the split duplicates an existing edge.
            let moved = side_neighbors.len() + side_tails.len();
            let kept = self.adj[v].len() + self.tails[v].len() - moved;
            if moved == 0 || kept == 0 {
                continue;
            }
            let u = self.adj.len();
            self.tails[v] = self.tails[v].difference(side_tails);
            self.tails.push(side_tails);
            self.adj.push(side_neighbors.clone());
            for &w in &side_neighbors {
                self.adj[v].retain(|&x| x != w);
                for x in self.adj[w].iter_mut() {
                    if *x == v {
                        *x = u;
                    }
                }
            }
            self.adj[v].push(u);
            self.adj[u].push(v);
            return Ok(());
        }
        Err(TreeError::NotAStratum {
            sigma: format!("side {:?}", side.iter().collect::<Vec<_>>()),
            tau: "current tree".into(),
            delta: 2,
        })
    }

    /// Canonical tree: preorder numbering from the tail-0 vertex, children
    /// ordered by the smallest tail label beyond the connecting edge.
    fn finish(self) -> StableTree {
        let count = self.adj.len();
        let root = (0..count)
            .find(|&v| self.tails[v].contains(Label::Zero))
            .expect("label 0 is always present");
        let mut old_to_new = vec![usize::MAX; count];
        let mut order = Vec::with_capacity(count);
        let mut stack = vec![(root, usize::MAX)];
        while let Some((v, parent)) = stack.pop() {
            old_to_new[v] = order.len();
            order.push(v);
            let mut children: Vec<usize> = self.adj[v]
                .iter()
                .copied()
                .filter(|&w| w != parent)
                .collect();
            children.sort_by_key(|&w| {
                self.tails_beyond(v, w)
                    .iter()
                    .next()
                    .expect("every subtree carries a tail")
            });
            // Reverse so the stack pops the smallest subtree first.
            for &w in children.iter().rev() {
                stack.push((w, v));
            }
        }

        let mut edges = Vec::new();
        for v in 0..count {
            for &w in &self.adj[v] {
                if v < w {
                    let (a, b) = (old_to_new[v], old_to_new[w]);
                    edges.push((a.min(b), a.max(b)));
                }
            }
        }
        edges.sort_unstable();

        let mut tails = Vec::new();
        for (v, &new_v) in old_to_new.iter().enumerate() {
            for l in self.tails[v].iter() {
                tails.push((l, new_v));
            }
        }
        tails.sort();

        let planar = self.planar.map(|lists| {
            let mut remapped = vec![Vec::new(); count];
            for (v, list) in lists.into_iter().enumerate() {
                remapped[old_to_new[v]] = list
                    .into_iter()
                    .map(|f| match f {
                        Flag::Tail(l) => Flag::Tail(l),
                        Flag::EdgeTo(w) => Flag::EdgeTo(old_to_new[w]),
                    })
                    .collect();
            }
            normalize_planar(remapped)
        });

        StableTree {
            carrier: self.carrier,
            vertex_count: count,
            edges,
            tails,
            planar,
        }
    }
}

fn rotate_to_min(mut list: Vec<Flag>) -> Vec<Flag> {
    if list.is_empty() {
        return list;
    }
    let min_at = list
        .iter()
        .enumerate()
        .min_by_key(|(_, f)| **f)
        .map(|(i, _)| i)
        .unwrap();
    list.rotate_left(min_at);
    list
}

/// Rotate each vertex cycle to its smallest flag and pick the smaller of the
/// two global reading directions, keeping one consistent orientation across
/// vertices (needed by contraction).
fn normalize_planar(lists: Vec<Vec<Flag>>) -> Vec<Vec<Flag>> {
    let forward: Vec<Vec<Flag>> = lists.iter().cloned().map(rotate_to_min).collect();
    let backward: Vec<Vec<Flag>> = lists
        .into_iter()
        .map(|mut l| {
            l.reverse();
            rotate_to_min(l)
        })
        .collect();
    if forward <= backward {
        forward
    } else {
        backward
    }
}

/// Canonical form under the geometric equality: every vertex cycle is
/// unoriented on its own, so normalize each over rotation and reflection
/// independently.
fn local_canonical(lists: &[Vec<Flag>]) -> Vec<Vec<Flag>> {
    lists
        .iter()
        .map(|list| {
            let fwd = rotate_to_min(list.clone());
            let mut rev = list.clone();
            rev.reverse();
            let bwd = rotate_to_min(rev);
            fwd.min(bwd)
        })
        .collect()
}

impl StableTree {
    /// The single-vertex tree of the open stratum (no internal edges).
    pub fn open_stratum(carrier: LabelSet) -> StableTree {
        Builder::single_vertex(carrier).finish()
    }

    pub fn carrier(&self) -> LabelSet {
        self.carrier
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn tails(&self) -> &[(Label, usize)] {
        &self.tails
    }

    pub fn planar(&self) -> Option<&[Vec<Flag>]> {
        self.planar.as_deref()
    }

    pub fn has_planar_structure(&self) -> bool {
        self.planar.is_some()
    }

    /// Flag count `|F(v)|` = incident edges plus attached tails.
    pub fn flag_count(&self, v: usize) -> usize {
        let degree = self
            .edges
            .iter()
            .filter(|&&(a, b)| a == v || b == v)
            .count();
        let tail_count = self.tails.iter().filter(|&&(_, w)| w == v).count();
        degree + tail_count
    }

    /// The stable partition obtained by cutting the given internal edge.
    pub fn edge_split(&self, edge: usize) -> Result<StablePartition, TreeError> {
        let &(a, b) = self.edges.get(edge).ok_or(TreeError::NotAnEdge(edge))?;
        let builder = Builder::from_tree(self);
        let part = builder.tails_beyond(a, b);
        Ok(StablePartition::new(self.carrier, part)?)
    }

    /// Tails in the component of `via` after cutting the edge `(from, via)`.
    pub fn tails_beyond(&self, from: usize, via: usize) -> LabelSet {
        Builder::from_tree(self).tails_beyond(from, via)
    }

    /// Attach the locally planar structure induced by drawing the tree
    /// inside the circle of `order`; fails unless every edge cut is an arc
    /// of the order.
    pub fn embed_in_order(&self, order: &CyclicOrder) -> Result<StableTree, TreeError> {
        if order.labels_set() != self.carrier {
            return Err(TreeError::MismatchedCarrier);
        }
        let seq = order.seq();
        let m = seq.len();
        let builder = Builder::from_tree(self);
        let arc_start = |set: LabelSet| -> Result<usize, TreeError> {
            let mut start = None;
            let mut transitions = 0;
            for p in 0..m {
                let here = set.contains(seq[p]);
                let prev = set.contains(seq[(p + m - 1) % m]);
                if here != prev {
                    transitions += 1;
                }
                if here && !prev {
                    start = Some(p);
                }
            }
            if transitions != 2 {
                return Err(TreeError::NotPlanar(format!(
                    "flag group {:?} is not an arc of {order}",
                    set.iter().collect::<Vec<_>>()
                )));
            }
            Ok(start.expect("nonempty proper arc has a start"))
        };
        let mut planar = Vec::with_capacity(self.vertex_count);
        for v in 0..self.vertex_count {
            let mut keyed: Vec<(usize, Flag)> = Vec::new();
            for &(l, w) in &self.tails {
                if w == v {
                    keyed.push((order.position(l).unwrap(), Flag::Tail(l)));
                }
            }
            for &w in &builder.adj[v] {
                let group = builder.tails_beyond(v, w);
                keyed.push((arc_start(group)?, Flag::EdgeTo(w)));
            }
            keyed.sort_unstable();
            planar.push(keyed.into_iter().map(|(_, f)| f).collect());
        }
        let mut out = self.clone();
        out.planar = Some(normalize_planar(planar));
        Ok(out)
    }

    /// DOT text of the tree: internal vertices `v<i>`, tails as leaf nodes.
    /// Output is deterministic for a fixed tree.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph stratum {\n");
        for v in 0..self.vertex_count {
            let _ = writeln!(out, "  v{v} [shape=point];");
        }
        for &(l, _) in &self.tails {
            let _ = writeln!(out, "  t_{l} [label=\"{l}\", shape=plaintext];");
        }
        for &(a, b) in &self.edges {
            let _ = writeln!(out, "  v{a} -- v{b};");
        }
        for &(l, v) in &self.tails {
            let _ = writeln!(out, "  v{v} -- t_{l};");
        }
        out.push_str("}\n");
        out
    }
}

impl Serialize for StableTree {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct TailEntry {
            label: String,
            vertex: usize,
        }
        let mut s = serializer.serialize_struct("StableTree", 5)?;
        s.serialize_field("labels", &self.carrier)?;
        s.serialize_field("vertex_count", &self.vertex_count)?;
        s.serialize_field("edges", &self.edges)?;
        let tails: Vec<TailEntry> = self
            .tails
            .iter()
            .map(|&(l, v)| TailEntry {
                label: l.to_string(),
                vertex: v,
            })
            .collect();
        s.serialize_field("tails", &tails)?;
        s.serialize_field("planar", &self.planar)?;
        s.end()
    }
}

/// Reconstruct the unique stable tree whose edge cuts reproduce exactly the
/// given partitions. Requires a nonempty set with pairwise δ = 1.
pub fn tree_from_partitions(parts: &[StablePartition]) -> Result<StableTree, TreeError> {
    let set: BTreeSet<StablePartition> = parts.iter().copied().collect();
    let mut iter = set.iter();
    let first = iter.next().ok_or(TreeError::Empty)?;
    let carrier = first.carrier();
    for p in set.iter() {
        if p.carrier() != carrier {
            return Err(TreeError::MismatchedCarrier);
        }
    }
    let list: Vec<StablePartition> = set.into_iter().collect();
    for i in 0..list.len() {
        for j in i + 1..list.len() {
            let d = delta(&list[i], &list[j])?;
            if d != 1 {
                return Err(TreeError::NotAStratum {
                    sigma: list[i].to_string(),
                    tau: list[j].to_string(),
                    delta: d,
                });
            }
        }
    }
    let mut builder = Builder::single_vertex(carrier);
    for p in &list {
        builder.insert_split(p.side())?;
    }
    Ok(builder.finish())
}

/// The partitions cut by the internal edges of the tree; inverse of
/// [`tree_from_partitions`].
pub fn partitions_from_tree(t: &StableTree) -> BTreeSet<StablePartition> {
    (0..t.edges.len())
        .map(|e| t.edge_split(e).expect("edge index in range"))
        .collect()
}

/// Collapse an internal edge, merging its endpoints. A planar structure, if
/// present, is spliced at the removed flag pair, preserving rotation.
pub fn contract_edge(t: &StableTree, edge: usize) -> Result<StableTree, TreeError> {
    let &(a, b) = t.edges.get(edge).ok_or(TreeError::NotAnEdge(edge))?;
    let mut builder = Builder::from_tree(t);
    // Merge b into a.
    builder.tails[a] = builder.tails[a].union(builder.tails[b]);
    builder.tails[b] = LabelSet::EMPTY;
    let b_neighbors: Vec<usize> = builder.adj[b].iter().copied().filter(|&w| w != a).collect();
    builder.adj[a].retain(|&w| w != b);
    for &w in &b_neighbors {
        builder.adj[a].push(w);
        for x in builder.adj[w].iter_mut() {
            if *x == b {
                *x = a;
            }
        }
    }
    builder.adj[b].clear();

    if let Some(planar) = builder.planar.as_mut() {
        let list_a = planar[a].clone();
        let list_b = planar[b].clone();
        let pos_a = list_a
            .iter()
            .position(|f| *f == Flag::EdgeTo(b))
            .expect("edge flag present at a");
        let pos_b = list_b
            .iter()
            .position(|f| *f == Flag::EdgeTo(a))
            .expect("edge flag present at b");
        let mut merged = Vec::with_capacity(list_a.len() + list_b.len() - 2);
        merged.extend_from_slice(&list_a[..pos_a]);
        for k in 1..list_b.len() {
            merged.push(list_b[(pos_b + k) % list_b.len()]);
        }
        merged.extend_from_slice(&list_a[pos_a + 1..]);
        planar[a] = merged;
        planar[b].clear();
        for (v, list) in planar.iter_mut().enumerate() {
            if v == a || v == b {
                continue;
            }
            for f in list.iter_mut() {
                if *f == Flag::EdgeTo(b) {
                    *f = Flag::EdgeTo(a);
                }
            }
        }
    }

    // Drop the emptied vertex, compacting indices.
    let count = builder.adj.len();
    let kept: Vec<usize> = (0..count).filter(|&v| v != b).collect();
    let mut remap = vec![usize::MAX; count];
    for (new_id, &old_id) in kept.iter().enumerate() {
        remap[old_id] = new_id;
    }
    let compact = Builder {
        carrier: builder.carrier,
        tails: kept.iter().map(|&v| builder.tails[v]).collect(),
        adj: kept
            .iter()
            .map(|&v| builder.adj[v].iter().map(|&w| remap[w]).collect())
            .collect(),
        planar: builder.planar.map(|planar| {
            kept.iter()
                .map(|&v| {
                    planar[v]
                        .iter()
                        .map(|f| match f {
                            Flag::Tail(l) => Flag::Tail(*l),
                            Flag::EdgeTo(w) => Flag::EdgeTo(remap[*w]),
                        })
                        .collect()
                })
                .collect()
        }),
    };
    Ok(compact.finish())
}

/// Multiset of flag counts and the stratum dimension
/// `Σ_v (|F(v)| - 3) = n - #internal edges`.
pub fn stratum_signature(t: &StableTree) -> StratumSignature {
    let mut flag_counts: Vec<usize> = (0..t.vertex_count).map(|v| t.flag_count(v)).collect();
    flag_counts.sort_unstable();
    let dimension = flag_counts.iter().map(|&c| c - 3).sum();
    StratumSignature {
        flag_counts,
        dimension,
    }
}
