//! Evaluation of the per-tree bounding function and the minimization over
//! trees and slot assignments.
//!
//! For a tree `T` and bounds placed on its frontier slots, `B_T` is the sum
//! of one triangle area per vertex. A non-root vertex sees two edges on the
//! side away from the root; its triangle is the semicyclic one on those two
//! sides, and the completing side becomes the length carried by the edge
//! towards the root. The root sees three lengths `b_0, b_1, b_2`; each is
//! clamped to `m_i = min(b_i, semicyclic_radius(b_{i+1}, b_{i+2}))` and the
//! root contributes the Heron area of `(m_0, m_1, m_2)`.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forest_io::ForestLibrary;
use crate::hypgeom::{self, HalfSinhLength};
use crate::trees::{self, AssignmentTable, CanonicalCode, RootedTree, MAX_SLOTS, VALENCE};

/// Values within this distance of the minimum count as ties for the witness.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Reduced assignments are split into work items of this many entries.
const CHUNK: usize = 2048;

/// Bound index carried by every frontier slot, slots in search order
/// (see [`RootedTree::slot_hosts`]).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct SlotAssignment(Vec<usize>);

impl SlotAssignment {
    /// Checks that `slots` is a permutation of `0..slots.len()`.
    pub fn new(slots: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; slots.len()];
        for &s in &slots {
            if s >= slots.len() || std::mem::replace(&mut seen[s], true) {
                return Err(Error::InvalidArity(format!(
                    "{slots:?} is not a permutation"
                )));
            }
        }
        Ok(Self(slots))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    fn from_bytes(a: &[u8]) -> Self {
        Self(a.iter().map(|&x| x as usize).collect())
    }

    pub fn slots(&self) -> &[usize] {
        &self.0
    }

    /// The bound placed on each slot.
    pub fn apply(&self, bounds: &[HalfSinhLength]) -> Vec<HalfSinhLength> {
        self.0.iter().map(|&i| bounds[i]).collect()
    }
}

impl fmt::Display for SlotAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "]")
    }
}

#[derive(Debug, Clone, Copy)]
enum Input {
    Slot(usize),
    Edge(usize),
}

/// A tree compiled into the bottom-up evaluation order.
#[derive(Debug, Clone)]
pub struct Crawler {
    slots: usize,
    /// Two away-from-root inputs for each non-root vertex, by vertex index.
    vertices: Vec<[Input; 2]>,
    root: [Input; 3],
}

impl Crawler {
    pub fn new(t: &RootedTree) -> Self {
        let ranges = t.slot_ranges();
        let inputs = |v: usize| -> Vec<Input> {
            t.children(v)
                .iter()
                .map(|&c| Input::Edge(c))
                .chain(ranges[v].clone().map(Input::Slot))
                .collect()
        };
        let vertices = (0..t.root())
            .map(|v| {
                let i = inputs(v);
                [i[0], i[1]]
            })
            .collect();
        let r = inputs(t.root());
        Self {
            slots: t.polygon_edges(),
            vertices,
            root: [r[0], r[1], r[2]],
        }
    }

    pub fn slot_count(&self) -> usize {
        self.slots
    }

    /// Evaluates `B_T` with `slot_value(p)` on slot `p`. `edges` is scratch
    /// space for the internal edge lengths.
    #[inline]
    pub fn evaluate<F>(&self, slot_value: F, edges: &mut Vec<HalfSinhLength>) -> Result<f64>
    where
        F: Fn(usize) -> HalfSinhLength,
    {
        edges.clear();
        let fetch = |input: Input, edges: &[HalfSinhLength]| match input {
            Input::Slot(p) => slot_value(p),
            Input::Edge(e) => edges[e],
        };
        let mut total = 0.0;
        for &[x, y] in &self.vertices {
            let (a, b) = (fetch(x, edges), fetch(y, edges));
            total += hypgeom::semicyclic_area(a, b);
            edges.push(hypgeom::semicyclic_radius(a, b));
        }
        let r = self.root.map(|input| fetch(input, edges));
        let clamp = |i: usize| {
            let other = hypgeom::semicyclic_radius(r[(i + 1) % 3], r[(i + 2) % 3]);
            if other < r[i] {
                other
            } else {
                r[i]
            }
        };
        let root = hypgeom::triangle_area(clamp(0), clamp(1), clamp(2)).map_err(|e| match e {
            Error::Domain { context, argument } => Error::Domain {
                context: format!("root triangle: {context}"),
                argument,
            },
            other => other,
        })?;
        Ok(total + root)
    }
}

/// `B_T` for the tree `t` with `values[p]` placed on slot `p`.
pub fn treecrawler(t: &RootedTree, values: &[HalfSinhLength]) -> Result<f64> {
    if values.len() != t.polygon_edges() {
        return Err(Error::InvalidArity(format!(
            "tree with {} edges needs {} bounds, got {}",
            t.edge_count(),
            t.polygon_edges(),
            values.len()
        )));
    }
    Crawler::new(t).evaluate(|p| values[p], &mut Vec::with_capacity(t.edge_count()))
}

/// One representative assignment per orbit of the tree's symmetries, in
/// increasing lexicographic order.
pub fn reduced_assignments(t: &RootedTree, n: usize) -> Result<Vec<SlotAssignment>> {
    check_slots(t, n)?;
    Ok(trees::automorphism_orbits(t)
        .representatives()
        .iter()
        .map(SlotAssignment::from_bytes)
        .collect())
}

fn check_slots(t: &RootedTree, n: usize) -> Result<()> {
    if t.polygon_edges() != n {
        return Err(Error::InvalidArity(format!(
            "tree has {} frontier slots, not {n}",
            t.polygon_edges()
        )));
    }
    if n > MAX_SLOTS {
        return Err(Error::CostGuard(format!(
            "searches are limited to n ≤ {MAX_SLOTS}"
        )));
    }
    Ok(())
}

/// The older uniform bound `(n − 2)·A_m(d)`.
pub fn flat_bound(n: usize, d: HalfSinhLength) -> Result<f64> {
    if n < VALENCE {
        return Err(Error::InvalidArity(format!(
            "n must be at least {VALENCE}, got {n}"
        )));
    }
    Ok((n - 2) as f64 * hypgeom::a_m(d))
}

/// Where the trees for a search come from.
#[derive(Debug, Clone, Default)]
pub enum TreeSource {
    #[default]
    Native,
    Catalog(Arc<ForestLibrary>),
}

#[derive(Debug, Clone)]
pub struct BoundQuery {
    pub bounds: Vec<HalfSinhLength>,
    pub reduce_symmetry: bool,
    pub tree_source: TreeSource,
}

impl BoundQuery {
    pub fn new(bounds: Vec<HalfSinhLength>) -> Result<Self> {
        if bounds.len() < VALENCE {
            return Err(Error::InvalidArity(format!(
                "need at least {VALENCE} bounds, got {}",
                bounds.len()
            )));
        }
        Ok(Self {
            bounds,
            reduce_symmetry: true,
            tree_source: TreeSource::Native,
        })
    }

    /// Builds a query from raw `sinh(ℓ/2)` values.
    pub fn from_half_sinh(values: &[f64]) -> Result<Self> {
        Self::new(
            values
                .iter()
                .map(|&s| HalfSinhLength::new(s))
                .collect::<Result<_>>()?,
        )
    }

    pub fn reduce_symmetry(mut self, on: bool) -> Self {
        self.reduce_symmetry = on;
        self
    }

    pub fn tree_source(mut self, source: TreeSource) -> Self {
        self.tree_source = source;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundResult {
    /// Minimum of `B_T` over everything examined.
    pub value: f64,
    /// `B_T` at the witness; within [`TIE_TOLERANCE`] of `value`.
    pub witness_value: f64,
    pub witness_tree: CanonicalCode,
    /// 1-based position of the witness tree in its source.
    pub witness_index: usize,
    pub witness_assignment: SlotAssignment,
    pub evaluations: u64,
}

#[derive(Debug)]
struct PlannedTree {
    code: CanonicalCode,
    index: usize,
    crawler: Crawler,
    reps: Option<AssignmentTable>,
}

/// Trees, compiled crawlers and assignment sets for one `n`, reusable
/// across bound tuples.
#[derive(Debug)]
pub struct SearchPlan {
    n: usize,
    trees: Vec<PlannedTree>,
}

#[derive(Debug, Clone, Copy)]
enum Work {
    /// All assignments whose first slot carries this bound index.
    Prefix(usize),
    /// A contiguous block of reduced representatives.
    Block(usize, usize),
}

struct ItemResult {
    min: f64,
    /// Lexicographically increasing, with strictly decreasing values.
    candidates: Vec<(f64, Vec<u8>)>,
    evaluations: u64,
}

impl ItemResult {
    fn new() -> Self {
        Self {
            min: f64::INFINITY,
            candidates: Vec::new(),
            evaluations: 0,
        }
    }

    /// Records `a`, which must come after every earlier `a` in lex order.
    ///
    /// A candidate is only ever needed if nothing earlier has a smaller or
    /// equal value, and only while it stays within tolerance of the minimum.
    #[inline]
    fn offer(&mut self, value: f64, a: &[u8]) {
        self.evaluations += 1;
        if value < self.min {
            self.min = value;
            let limit = value + TIE_TOLERANCE;
            self.candidates.retain(|c| c.0 <= limit);
        }
        if value <= self.min + TIE_TOLERANCE && self.candidates.last().map_or(true, |c| value < c.0)
        {
            self.candidates.push((value, a.to_vec()));
        }
    }
}

fn next_permutation(a: &mut [u8]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

impl SearchPlan {
    pub fn new(n: usize, source: &TreeSource, reduce_symmetry: bool) -> Result<Self> {
        if n < VALENCE {
            return Err(Error::InvalidArity(format!(
                "need at least {VALENCE} bounds, got {n}"
            )));
        }
        if n > MAX_SLOTS {
            return Err(Error::CostGuard(format!(
                "searches are limited to n ≤ {MAX_SLOTS}"
            )));
        }
        let codes: Vec<CanonicalCode> = match source {
            TreeSource::Native => trees::enumerate_trees(n)?,
            TreeSource::Catalog(lib) => lib
                .codes_for_polygon(n)
                .ok_or(Error::MissingCatalog { n, k: n - VALENCE })?
                .iter()
                .map(|c| trees::decode(c).map(|t| trees::canonicalize(&t)))
                .collect::<Result<_>>()?,
        };
        let mut trees: Vec<PlannedTree> = codes
            .into_par_iter()
            .enumerate()
            .map(|(i, code)| {
                let tree = code.tree();
                let reps =
                    reduce_symmetry.then(|| trees::automorphism_orbits(&tree).representatives());
                PlannedTree {
                    crawler: Crawler::new(&tree),
                    code,
                    index: i + 1,
                    reps,
                }
            })
            .collect();
        trees.sort_by(|a, b| a.code.cmp(&b.code));
        Ok(Self { n, trees })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tree_count(&self) -> usize {
        self.trees.len()
    }

    /// Number of `B_T` evaluations one run performs.
    pub fn evaluations_per_run(&self) -> u64 {
        let full: u64 = (1..=self.n as u64).product();
        self.trees
            .iter()
            .map(|t| t.reps.as_ref().map_or(full, |r| r.len() as u64))
            .sum()
    }

    fn work_items(&self) -> Vec<(usize, Work)> {
        let mut items = Vec::new();
        for (ti, t) in self.trees.iter().enumerate() {
            match &t.reps {
                None => items.extend((0..self.n).map(|first| (ti, Work::Prefix(first)))),
                Some(reps) => {
                    let mut start = 0;
                    while start < reps.len() {
                        let end = (start + CHUNK).min(reps.len());
                        items.push((ti, Work::Block(start, end)));
                        start = end;
                    }
                }
            }
        }
        items
    }

    fn run_item(
        &self,
        tree: &PlannedTree,
        work: Work,
        bounds: &[HalfSinhLength],
    ) -> Result<ItemResult> {
        let mut out = ItemResult::new();
        let mut edges = Vec::with_capacity(self.n);
        match work {
            Work::Prefix(first) => {
                let mut a: Vec<u8> = std::iter::once(first)
                    .chain((0..self.n).filter(|&i| i != first))
                    .map(|i| i as u8)
                    .collect();
                loop {
                    let v = tree
                        .crawler
                        .evaluate(|p| bounds[a[p] as usize], &mut edges)?;
                    out.offer(v, &a);
                    if !next_permutation(&mut a[1..]) {
                        break;
                    }
                }
            }
            Work::Block(start, end) => {
                let reps = tree
                    .reps
                    .as_ref()
                    .expect("block work needs representatives");
                for i in start..end {
                    let a = reps.get(i);
                    let v = tree
                        .crawler
                        .evaluate(|p| bounds[a[p] as usize], &mut edges)?;
                    out.offer(v, a);
                }
            }
        }
        Ok(out)
    }

    /// Minimizes over the planned trees and assignments for `bounds`.
    ///
    /// The witness is the lexicographically least `(tree code, assignment)`
    /// whose value is within [`TIE_TOLERANCE`] of the minimum, so the result
    /// does not depend on how the work is scheduled.
    pub fn run(&self, bounds: &[HalfSinhLength]) -> Result<BoundResult> {
        if bounds.len() != self.n {
            return Err(Error::InvalidArity(format!(
                "plan is for n = {}, got {} bounds",
                self.n,
                bounds.len()
            )));
        }
        let items = self.work_items();
        let results: Vec<ItemResult> = items
            .par_iter()
            .map(|&(ti, work)| self.run_item(&self.trees[ti], work, bounds))
            .collect::<Result<_>>()?;

        let value = results.iter().map(|r| r.min).fold(f64::INFINITY, f64::min);
        let limit = value + TIE_TOLERANCE;
        let evaluations = results.iter().map(|r| r.evaluations).sum();
        let (ti, (witness_value, a)) = items
            .iter()
            .zip(&results)
            .find_map(|(&(ti, _), r)| r.candidates.iter().find(|c| c.0 <= limit).map(|c| (ti, c)))
            .ok_or_else(|| Error::Domain {
                context: "no finite bound value".into(),
                argument: value,
            })?;
        let tree = &self.trees[ti];
        Ok(BoundResult {
            value,
            witness_value: *witness_value,
            witness_tree: tree.code.clone(),
            witness_index: tree.index,
            witness_assignment: SlotAssignment::from_bytes(a),
            evaluations,
        })
    }
}

/// Lower bound on the area of a centered dual two-cell whose edges are
/// bounded below by `query.bounds`: the minimum of `B_T(σ(b))` over all
/// trees `T` and permutations `σ`.
pub fn minimize(query: &BoundQuery) -> Result<BoundResult> {
    SearchPlan::new(
        query.bounds.len(),
        &query.tree_source,
        query.reduce_symmetry,
    )?
    .run(&query.bounds)
}
