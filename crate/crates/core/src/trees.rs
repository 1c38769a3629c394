//! Rooted trees whose vertices are trivalent once frontier edges are added.
//!
//! A tree with `k` edges has `k + 1` vertices `v_0, …, v_k` with root `v_k`.
//! It is stored as the tuple `(n_0, …, n_{k-1})` where `v_{n_i}` is the
//! neighbour of `v_i` that is nearer the root, so `i < n_i ≤ k` always holds.
//! Each vertex `v` carries `3 − deg(v)` frontier slots, and a tree with `k`
//! edges has `k + 3` of them in total.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Valence of every tree vertex once its frontier edges are attached.
pub const VALENCE: usize = 3;

/// Largest polygon edge count for which symmetry tables are materialized.
pub const MAX_SLOTS: usize = 20;

/// Parent-index encoding of a rooted tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TreeCode(Vec<usize>);

impl TreeCode {
    pub fn new(entries: Vec<usize>) -> Self {
        Self(entries)
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn edge_count(&self) -> usize {
        self.0.len()
    }

    /// Number of frontier edges `n = k + 3` of the tree this code describes.
    pub fn polygon_edges(&self) -> usize {
        self.0.len() + VALENCE
    }

    pub fn decode(&self) -> Result<RootedTree> {
        decode(self)
    }
}

impl fmt::Display for TreeCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str(")")
    }
}

impl FromStr for TreeCode {
    type Err = Error;

    /// Accepts `(1,2)`, `1,2`, `1 2` and `()`.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim();
        let inner = inner
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .unwrap_or(inner);
        inner
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .enumerate()
            .map(|(index, t)| {
                t.parse::<usize>().map_err(|_| Error::InvalidCode {
                    index,
                    reason: format!("`{t}` is not a non-negative integer"),
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(TreeCode)
    }
}

/// The least depth-ordered encoding of a rooted-isomorphism class.
///
/// Vertices are numbered deepest level first; within a level the order is
/// chosen so that the resulting tuple is lexicographically least.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CanonicalCode(TreeCode);

impl CanonicalCode {
    pub fn code(&self) -> &TreeCode {
        &self.0
    }

    pub fn entries(&self) -> &[usize] {
        self.0.entries()
    }

    pub fn into_code(self) -> TreeCode {
        self.0
    }

    /// Canonical codes are valid by construction.
    pub fn tree(&self) -> RootedTree {
        decode(&self.0).expect("canonical codes always decode")
    }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A decoded tree with its derived structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedTree {
    parent: Vec<usize>,
    children: Vec<Vec<usize>>,
    depth: Vec<usize>,
    frontier_slots: Vec<usize>,
}

impl RootedTree {
    pub fn vertex_count(&self) -> usize {
        self.children.len()
    }

    pub fn edge_count(&self) -> usize {
        self.parent.len()
    }

    /// Number of frontier slots, i.e. the edge count of the bounded polygon.
    pub fn polygon_edges(&self) -> usize {
        self.edge_count() + VALENCE
    }

    pub fn root(&self) -> usize {
        self.parent.len()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent.get(v).copied()
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn depth(&self, v: usize) -> usize {
        self.depth[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.children[v].len() + usize::from(v != self.root())
    }

    pub fn frontier_slots(&self) -> &[usize] {
        &self.frontier_slots
    }

    /// Number of vertices of valence one in the tree itself.
    pub fn leaf_count(&self) -> usize {
        (0..self.vertex_count())
            .filter(|&v| self.degree(v) == 1)
            .count()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.vertex_count())
            .map(|v| self.degree(v))
            .max()
            .unwrap_or(0)
    }

    /// The code of this tree under its own vertex numbering.
    pub fn encode(&self) -> TreeCode {
        TreeCode(self.parent.clone())
    }

    /// Host vertex of every frontier slot, in search order: vertices by
    /// decreasing index (root first), each repeated once per slot.
    pub fn slot_hosts(&self) -> Vec<usize> {
        (0..self.vertex_count())
            .rev()
            .flat_map(|v| std::iter::repeat(v).take(self.frontier_slots[v]))
            .collect()
    }

    /// Range of slot positions hosted by each vertex (empty when it has none).
    pub fn slot_ranges(&self) -> Vec<Range<usize>> {
        let mut ranges = vec![0..0; self.vertex_count()];
        let mut next = 0;
        for v in (0..self.vertex_count()).rev() {
            ranges[v] = next..next + self.frontier_slots[v];
            next += self.frontier_slots[v];
        }
        ranges
    }
}

/// Decodes and validates a tree code.
pub fn decode(code: &TreeCode) -> Result<RootedTree> {
    let k = code.edge_count();
    let mut children = vec![Vec::new(); k + 1];
    for (i, &p) in code.entries().iter().enumerate() {
        if p <= i || p > k {
            return Err(Error::InvalidCode {
                index: i,
                reason: format!("entry {p} must lie in {}..={k}", i + 1),
            });
        }
        children[p].push(i);
        let degree = children[p].len() + usize::from(p != k);
        if degree > VALENCE {
            return Err(Error::InvalidCode {
                index: i,
                reason: format!("vertex {p} has degree {degree} > {VALENCE}"),
            });
        }
    }
    let mut depth = vec![0; k + 1];
    for v in (0..k).rev() {
        depth[v] = depth[code.0[v]] + 1;
    }
    let frontier_slots = (0..=k)
        .map(|v| VALENCE - children[v].len() - usize::from(v != k))
        .collect();
    Ok(RootedTree {
        parent: code.0.clone(),
        children,
        depth,
        frontier_slots,
    })
}

/// Canonical code of the rooted-isomorphism class of `t`.
pub fn canonicalize(t: &RootedTree) -> CanonicalCode {
    canonical_from_children(&t.children, t.root())
}

/// Canonical form of a tree given by child lists under an arbitrary vertex
/// labeling.
///
/// Levels are processed bottom-up to rank each vertex's subtree class: a
/// vertex ranks earlier when it has more children in the earliest child
/// class. Numbering then proceeds top-down within each level by
/// `(class, parent rank)`, and indices are handed out deepest level first.
fn canonical_from_children(children: &[Vec<usize>], root: usize) -> CanonicalCode {
    let vertex_count = children.len();
    let mut parent = vec![usize::MAX; vertex_count];
    let mut levels: Vec<Vec<usize>> = vec![vec![root]];
    loop {
        let next: Vec<usize> = levels
            .last()
            .unwrap()
            .iter()
            .flat_map(|&v| children[v].iter().map(|&c| (v, c)).collect::<Vec<_>>())
            .map(|(v, c)| {
                parent[c] = v;
                c
            })
            .collect();
        if next.is_empty() {
            break;
        }
        levels.push(next);
    }

    let mut class = vec![0usize; vertex_count];
    let mut below_classes = 0usize;
    for level in levels.iter().rev() {
        let keys: Vec<Vec<usize>> = level
            .iter()
            .map(|&v| {
                let mut counts = vec![0usize; below_classes];
                for &c in &children[v] {
                    counts[class[c]] += 1;
                }
                counts
            })
            .collect();
        let mut distinct: Vec<&Vec<usize>> = keys.iter().collect();
        distinct.sort_by(|a, b| b.cmp(a));
        distinct.dedup();
        for (&v, key) in level.iter().zip(&keys) {
            class[v] = distinct.iter().position(|d| *d == key).unwrap();
        }
        below_classes = distinct.len();
    }

    let mut rank = vec![0usize; vertex_count];
    let mut ordered_levels = Vec::with_capacity(levels.len());
    for level in &levels {
        let mut order = level.clone();
        order.sort_by_key(|&v| (class[v], if v == root { 0 } else { rank[parent[v]] }, v));
        for (r, &v) in order.iter().enumerate() {
            rank[v] = r;
        }
        ordered_levels.push(order);
    }

    let mut index = vec![0usize; vertex_count];
    let mut next = 0;
    for order in ordered_levels.iter().rev() {
        for &v in order {
            index[v] = next;
            next += 1;
        }
    }
    let mut code = vec![0usize; vertex_count - 1];
    for v in 0..vertex_count {
        if v != root {
            code[index[v]] = index[parent[v]];
        }
    }
    CanonicalCode(TreeCode(code))
}

/// All canonical trees with `k` edges, sorted lexicographically.
pub fn enumerate_by_edges(k: usize) -> Vec<CanonicalCode> {
    let mut current = vec![CanonicalCode(TreeCode(Vec::new()))];
    for _ in 0..k {
        let mut grown = BTreeSet::new();
        for code in &current {
            let tree = code.tree();
            for v in 0..tree.vertex_count() {
                if tree.degree(v) < VALENCE {
                    let mut children = tree.children.clone();
                    let leaf = children.len();
                    children.push(Vec::new());
                    children[v].push(leaf);
                    grown.insert(canonical_from_children(&children, tree.root()));
                }
            }
        }
        current = grown.into_iter().collect();
    }
    current
}

/// One canonical representative per rooted tree with `n` frontier slots,
/// ordered by canonical code.
pub fn enumerate_trees(n: usize) -> Result<Vec<CanonicalCode>> {
    if n < VALENCE {
        return Err(Error::InvalidArity(format!(
            "polygon edge count must be at least {VALENCE}, got {n}"
        )));
    }
    Ok(enumerate_by_edges(n - VALENCE))
}

/// Subtree isomorphism class of every vertex; equal ids mean isomorphic
/// rooted subtrees.
pub fn subtree_classes(t: &RootedTree) -> Vec<usize> {
    let mut interned: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut ids = vec![0usize; t.vertex_count()];
    // Children always carry smaller indices than their parent.
    for v in 0..t.vertex_count() {
        let mut key: Vec<usize> = t.children[v].iter().map(|&c| ids[c]).collect();
        key.sort_unstable();
        let fresh = interned.len();
        ids[v] = *interned.entry(key).or_insert(fresh);
    }
    ids
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(m - 1) {
        for pos in 0..m {
            let mut q = p.clone();
            q.insert(pos, m - 1);
            out.push(q);
        }
    }
    out
}

fn subtree_maps(t: &RootedTree, ids: &[usize], u: usize, w: usize) -> Vec<Vec<(usize, usize)>> {
    let mut result = vec![vec![(u, w)]];
    let mut groups: Vec<usize> = t.children[u].iter().map(|&c| ids[c]).collect();
    groups.sort_unstable();
    groups.dedup();
    for id in groups {
        let from: Vec<usize> = t.children[u]
            .iter()
            .copied()
            .filter(|&c| ids[c] == id)
            .collect();
        let to: Vec<usize> = t.children[w]
            .iter()
            .copied()
            .filter(|&c| ids[c] == id)
            .collect();
        let mut options = Vec::new();
        for perm in permutations(from.len()) {
            let mut partial = vec![Vec::new()];
            for (i, &j) in perm.iter().enumerate() {
                let sub = subtree_maps(t, ids, from[i], to[j]);
                partial = partial
                    .iter()
                    .flat_map(|p| {
                        sub.iter().map(move |s| {
                            let mut q: Vec<(usize, usize)> = p.clone();
                            q.extend_from_slice(s);
                            q
                        })
                    })
                    .collect();
            }
            options.extend(partial);
        }
        result = result
            .iter()
            .flat_map(|r| {
                options.iter().map(move |o| {
                    let mut q = r.clone();
                    q.extend_from_slice(o);
                    q
                })
            })
            .collect();
    }
    result
}

/// Root-preserving automorphisms of `t` as vertex maps; the identity is first.
pub fn automorphisms(t: &RootedTree) -> Vec<Vec<usize>> {
    let ids = subtree_classes(t);
    let mut maps: Vec<Vec<usize>> = subtree_maps(t, &ids, t.root(), t.root())
        .into_iter()
        .map(|pairs| {
            let mut m = vec![0; t.vertex_count()];
            for (a, b) in pairs {
                m[a] = b;
            }
            m
        })
        .collect();
    maps.sort();
    maps
}

/// Symmetries of the frontier-slot assignment problem for one tree.
///
/// Swapping two slots at the same vertex never changes the bound, and neither
/// does transporting slot contents along a root-preserving automorphism. An
/// assignment maps each slot position to an index into the bound tuple.
#[derive(Debug, Clone)]
pub struct SlotSymmetry {
    n: usize,
    /// Slot positions hosted by each vertex that has any, in slot order.
    pub slot_groups: Vec<Range<usize>>,
    group_of_slot: Vec<usize>,
    /// Vertex maps of the automorphism group, identity first.
    pub automorphisms: Vec<Vec<usize>>,
    slot_maps: Vec<Vec<usize>>,
}

fn factorial(m: usize) -> u128 {
    (1..=m as u128).product()
}

/// Computes the slot-swap groups and root-preserving automorphisms of `t`.
pub fn automorphism_orbits(t: &RootedTree) -> SlotSymmetry {
    let ranges = t.slot_ranges();
    let slot_groups: Vec<Range<usize>> = ranges
        .iter()
        .rev()
        .filter(|r| !r.is_empty())
        .cloned()
        .collect();
    let n = t.polygon_edges();
    let mut group_of_slot = vec![0; n];
    for (g, r) in slot_groups.iter().enumerate() {
        for p in r.clone() {
            group_of_slot[p] = g;
        }
    }
    let automorphisms = automorphisms(t);
    let slot_maps = automorphisms
        .iter()
        .skip(1)
        .map(|alpha| {
            let mut map = vec![0; n];
            for v in 0..t.vertex_count() {
                for (j, p) in ranges[v].clone().enumerate() {
                    map[p] = ranges[alpha[v]].start + j;
                }
            }
            map
        })
        .collect();
    SlotSymmetry {
        n,
        slot_groups,
        group_of_slot,
        automorphisms,
        slot_maps,
    }
}

impl SlotSymmetry {
    pub fn slot_count(&self) -> usize {
        self.n
    }

    /// Order of the slot-swap subgroup `S_T`.
    pub fn stabilizer_order(&self) -> u128 {
        self.slot_groups
            .iter()
            .map(|g| factorial(g.len()))
            .product()
    }

    /// Number of left cosets of `S_T` in the full symmetric group.
    pub fn coset_count(&self) -> u128 {
        factorial(self.n) / self.stabilizer_order()
    }

    fn sort_groups(&self, a: &mut [u8]) {
        for g in &self.slot_groups {
            a[g.clone()].sort_unstable();
        }
    }

    /// Lexicographically least assignment in the orbit of `a`.
    pub fn canonical_assignment(&self, a: &[u8]) -> Vec<u8> {
        let mut best = a.to_vec();
        self.sort_groups(&mut best);
        let mut image = vec![0u8; self.n];
        for map in &self.slot_maps {
            for (p, &q) in map.iter().enumerate() {
                image[q] = a[p];
            }
            self.sort_groups(&mut image);
            if image < best {
                best.copy_from_slice(&image);
            }
        }
        best
    }

    fn is_representative(&self, a: &[u8], image: &mut [u8]) -> bool {
        self.slot_maps.iter().all(|map| {
            for (p, &q) in map.iter().enumerate() {
                image[q] = a[p];
            }
            self.sort_groups(image);
            &*image >= a
        })
    }

    /// One assignment per orbit, each the lexicographic minimum of its orbit,
    /// listed in increasing lexicographic order.
    pub fn representatives(&self) -> AssignmentTable {
        assert!(
            self.n <= MAX_SLOTS,
            "symmetry tables are limited to {MAX_SLOTS} slots"
        );
        let mut table = AssignmentTable::new(self.n);
        let mut current = vec![0u8; self.n];
        let mut used = vec![false; self.n];
        let mut image = vec![0u8; self.n];
        self.fill(0, &mut current, &mut used, &mut image, &mut table);
        table
    }

    fn fill(
        &self,
        pos: usize,
        current: &mut [u8],
        used: &mut [bool],
        image: &mut [u8],
        out: &mut AssignmentTable,
    ) {
        if pos == self.n {
            if self.is_representative(current, image) {
                out.push(current);
            }
            return;
        }
        let group_start = self.slot_groups[self.group_of_slot[pos]].start;
        let floor = if pos > group_start {
            current[pos - 1] as usize + 1
        } else {
            0
        };
        for x in floor..self.n {
            if !used[x] {
                used[x] = true;
                current[pos] = x as u8;
                self.fill(pos + 1, current, used, image, out);
                used[x] = false;
            }
        }
    }
}

/// Densely packed list of equal-length assignments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssignmentTable {
    width: usize,
    data: Vec<u8>,
}

impl AssignmentTable {
    pub fn new(width: usize) -> Self {
        Self {
            width,
            data: Vec::new(),
        }
    }

    pub fn push(&mut self, a: &[u8]) {
        debug_assert_eq!(a.len(), self.width);
        self.data.extend_from_slice(a);
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.data.len().checked_div(self.width).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, i: usize) -> &[u8] {
        &self.data[i * self.width..(i + 1) * self.width]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[u8]> + '_ {
        self.data.chunks_exact(self.width.max(1))
    }
}
