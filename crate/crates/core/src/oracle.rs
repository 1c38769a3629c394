//! Brute-force references for the test suites. Nothing in the search path
//! calls into this module.
//!
//! Each routine takes a different route from the production code: triangle
//! areas from angle defects instead of Heron, `B_T` by recursion over raw
//! lengths with the root rule applied case by case, minimization over every
//! permutation with no symmetry reduction, and tree counts from exhaustive
//! parent sequences deduplicated by pairwise isomorphism tests.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::hypgeom::HalfSinhLength;
use crate::search::{BoundResult, SlotAssignment, TIE_TOLERANCE};
use crate::trees::{self, CanonicalCode, RootedTree};

/// Largest `n` accepted by [`exhaustive_minimize`].
pub const EXHAUSTIVE_MAX_N: usize = 8;
/// Largest edge count accepted by [`naive_tree_count`].
pub const NAIVE_MAX_K: usize = 7;

/// Running comparison summary.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OracleReport {
    pub checked_cases: usize,
    pub max_discrepancy: f64,
    pub first_failure: Option<String>,
}

impl OracleReport {
    pub fn record(&mut self, discrepancy: f64, tolerance: f64, describe: impl FnOnce() -> String) {
        self.checked_cases += 1;
        if discrepancy.is_nan() || discrepancy > self.max_discrepancy {
            self.max_discrepancy = discrepancy;
        }
        if (discrepancy.is_nan() || discrepancy >= tolerance) && self.first_failure.is_none() {
            self.first_failure = Some(describe());
        }
    }

    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Area `π − (α + β + γ)` with angles from the hyperbolic half-angle
/// formulas on raw lengths.
pub fn angle_defect_area(a: HalfSinhLength, b: HalfSinhLength, c: HalfSinhLength) -> Result<f64> {
    let (la, lb, lc) = (a.to_length(), b.to_length(), c.to_length());
    let p = (la + lb + lc) / 2.0;
    let (pa, pb, pc) = (p - la, p - lb, p - lc);
    if pa <= 0.0 || pb <= 0.0 || pc <= 0.0 {
        return Err(Error::Domain {
            context: format!("lengths ({la}, {lb}, {lc}) violate the triangle inequality"),
            argument: pa.min(pb).min(pc),
        });
    }
    let angle = |opp: f64, x: f64, y: f64| {
        2.0 * (x.sinh() * y.sinh())
            .sqrt()
            .atan2((p.sinh() * opp.sinh()).sqrt())
    };
    let alpha = angle(pa, pb, pc);
    let beta = angle(pb, pa, pc);
    let gamma = angle(pc, pa, pb);
    Ok(PI - alpha - beta - gamma)
}

fn heron_raw(a: f64, b: f64, c: f64) -> f64 {
    let sh = |x: f64| (x / 2.0).sinh();
    let ch = |x: f64| (x / 2.0).cosh();
    let arg = (sh(a).powi(2) + sh(b).powi(2) + sh(c).powi(2) + 2.0) / (2.0 * ch(a) * ch(b) * ch(c));
    2.0 * arg.min(1.0).acos()
}

fn b0_raw(a: f64, b: f64) -> f64 {
    2.0 * ((a / 2.0).sinh().powi(2) + (b / 2.0).sinh().powi(2))
        .sqrt()
        .asinh()
}

/// `B_T` by top-down recursion in raw lengths, with `values[p]` on slot `p`.
pub fn recursive_bound(t: &RootedTree, values: &[HalfSinhLength]) -> Result<f64> {
    if values.len() != t.polygon_edges() {
        return Err(Error::InvalidArity(format!(
            "expected {} values",
            t.polygon_edges()
        )));
    }
    let ranges = t.slot_ranges();
    // Returns (length of the edge towards the root, area below it).
    fn below(
        t: &RootedTree,
        ranges: &[std::ops::Range<usize>],
        values: &[HalfSinhLength],
        v: usize,
    ) -> (f64, f64) {
        let mut sides = Vec::new();
        let mut area = 0.0;
        for &c in t.children(v) {
            let (len, sub) = below(t, ranges, values, c);
            sides.push(len);
            area += sub;
        }
        sides.extend(ranges[v].clone().map(|p| values[p].to_length()));
        let (x, y) = (sides[0], sides[1]);
        let tri = 2.0 * ((x / 2.0).tanh() * (y / 2.0).tanh()).asin();
        (b0_raw(x, y), area + tri)
    }
    let root = t.root();
    let mut sides = Vec::new();
    let mut area = 0.0;
    for &c in t.children(root) {
        let (len, sub) = below(t, &ranges, values, c);
        sides.push(len);
        area += sub;
    }
    sides.extend(ranges[root].clone().map(|p| values[p].to_length()));
    // Only a maximal side may need clamping.
    let max = sides.iter().copied().fold(f64::MIN, f64::max);
    let m: Vec<f64> = (0..3)
        .map(|i| {
            if sides[i] < max {
                sides[i]
            } else {
                sides[i].min(b0_raw(sides[(i + 1) % 3], sides[(i + 2) % 3]))
            }
        })
        .collect();
    Ok(area + heron_raw(m[0], m[1], m[2]))
}

/// Calls `visit` on every permutation of `0..n` (Heap's algorithm).
pub fn heap_permutations(n: usize, mut visit: impl FnMut(&[usize])) {
    let mut a: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    visit(&a);
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            visit(&a);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Minimum of `B_T(σ(b))` over every tree and every permutation, taken
/// literally with no reduction.
pub fn exhaustive_minimize(bounds: &[HalfSinhLength]) -> Result<BoundResult> {
    let n = bounds.len();
    if n > EXHAUSTIVE_MAX_N {
        return Err(Error::CostGuard(format!(
            "exhaustive search is limited to n ≤ {EXHAUSTIVE_MAX_N}"
        )));
    }
    let codes = trees::enumerate_trees(n)?;
    let mut all: Vec<(usize, Vec<usize>, f64)> = Vec::new();
    let mut failure = None;
    for (ti, code) in codes.iter().enumerate() {
        let t = code.tree();
        heap_permutations(n, |perm| {
            let values: Vec<HalfSinhLength> = perm.iter().map(|&i| bounds[i]).collect();
            match recursive_bound(&t, &values) {
                Ok(v) => all.push((ti, perm.to_vec(), v)),
                Err(e) => failure = Some(e),
            }
        });
    }
    if let Some(e) = failure {
        return Err(e);
    }
    let value = all.iter().map(|x| x.2).fold(f64::INFINITY, f64::min);
    let (ti, perm, witness_value) = all
        .iter()
        .filter(|x| x.2 <= value + TIE_TOLERANCE)
        .min_by(|x, y| (&codes[x.0], &x.1).cmp(&(&codes[y.0], &y.1)))
        .cloned()
        .expect("at least one tree");
    Ok(BoundResult {
        value,
        witness_value,
        witness_tree: codes[ti].clone(),
        witness_index: ti + 1,
        witness_assignment: SlotAssignment::new(perm)?,
        evaluations: all.len() as u64,
    })
}

fn isomorphic(t: &RootedTree, u: usize, s: &RootedTree, w: usize) -> bool {
    let (cu, cw) = (t.children(u), s.children(w));
    if cu.len() != cw.len() {
        return false;
    }
    let mut found = false;
    heap_permutations(cw.len(), |perm| {
        if !found
            && cu
                .iter()
                .zip(perm)
                .all(|(&a, &j)| isomorphic(t, a, s, cw[j]))
        {
            found = true;
        }
    });
    found
}

/// Number of rooted-isomorphism classes of trees with `k` edges and all
/// degrees at most three.
pub fn naive_tree_count(k: usize) -> Result<usize> {
    if k > NAIVE_MAX_K {
        return Err(Error::CostGuard(format!(
            "naive tree count is limited to k ≤ {NAIVE_MAX_K}"
        )));
    }
    let mut classes: Vec<RootedTree> = Vec::new();
    let mut code = vec![0usize; k];
    fn walk(i: usize, k: usize, code: &mut Vec<usize>, classes: &mut Vec<RootedTree>) {
        if i == k {
            if let Ok(t) = trees::decode(&trees::TreeCode::new(code.clone())) {
                if !classes
                    .iter()
                    .any(|c| isomorphic(c, c.root(), &t, t.root()))
                {
                    classes.push(t);
                }
            }
            return;
        }
        for p in i + 1..=k {
            code[i] = p;
            walk(i + 1, k, code, classes);
        }
    }
    walk(0, k, &mut code, &mut classes);
    Ok(classes.len())
}

/// Whether two trees are rooted-isomorphic, by direct matching.
pub fn rooted_isomorphic(a: &RootedTree, b: &RootedTree) -> bool {
    a.vertex_count() == b.vertex_count() && isomorphic(a, a.root(), b, b.root())
}

/// Convenience: the canonical codes the oracle search ranges over.
pub fn trees_for(n: usize) -> Result<Vec<CanonicalCode>> {
    trees::enumerate_trees(n)
}
