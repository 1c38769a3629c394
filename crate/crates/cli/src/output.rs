use std::fmt::Write as _;

use centered_bound::{truncate, BoundResult, HalfSinhLength, RootedTree};
use serde::Serialize;

/// Rounds to 15 significant digits so machine output is stable across
/// platforms; the shortest representation of the result is what gets printed.
pub fn sig15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

pub fn fmt_sig15(x: f64) -> String {
    fmt_num(sig15(x))
}

/// Plain decimal for everyday magnitudes, exponent notation otherwise.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 || (1e-5..1e16).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn fmt_truncated(x: f64, digits: u32) -> String {
    format!("{:.*}", digits as usize, truncate(x, digits))
}

#[derive(Debug, Serialize)]
pub struct QueryEcho {
    pub bounds: Vec<f64>,
    pub convention: &'static str,
    pub half_sinh: Vec<f64>,
    pub reduce_symmetry: bool,
    pub tree_source: String,
}

#[derive(Debug, Serialize)]
pub struct OutputRecord {
    pub query: QueryEcho,
    pub n: usize,
    pub value: f64,
    pub value_truncated: String,
    pub truncate_digits: u32,
    pub witness_tree: String,
    pub witness_index: usize,
    pub witness_assignment: Vec<usize>,
    /// The bound carried by each frontier slot of the witness, as `sinh(ℓ/2)`.
    pub witness_slot_bounds: Vec<f64>,
    pub evaluations: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_seconds: Option<f64>,
}

impl OutputRecord {
    pub fn new(
        query: QueryEcho,
        bounds: &[HalfSinhLength],
        result: &BoundResult,
        digits: u32,
    ) -> Self {
        Self {
            n: bounds.len(),
            value: sig15(result.value),
            value_truncated: fmt_truncated(result.value, digits),
            truncate_digits: digits,
            witness_tree: result.witness_tree.to_string(),
            witness_index: result.witness_index,
            witness_assignment: result.witness_assignment.slots().to_vec(),
            witness_slot_bounds: result
                .witness_assignment
                .apply(bounds)
                .into_iter()
                .map(|s| sig15(s.get()))
                .collect(),
            evaluations: result.evaluations,
            elapsed_seconds: None,
            query,
        }
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        let join = |v: &[f64]| v.iter().map(|&x| fmt_num(x)).collect::<Vec<_>>().join(" ");
        let _ = writeln!(
            out,
            "bounds ({})    {}",
            self.query.convention,
            join(&self.query.bounds)
        );
        let _ = writeln!(out, "n                 {}", self.n);
        let _ = writeln!(out, "bound             {}", self.value_truncated);
        let _ = writeln!(out, "value             {}", fmt_num(self.value));
        let _ = writeln!(
            out,
            "witness tree      {} (#{})",
            self.witness_tree, self.witness_index
        );
        let assignment: Vec<String> = self
            .witness_assignment
            .iter()
            .map(usize::to_string)
            .collect();
        let _ = writeln!(out, "assignment        {}", assignment.join(" "));
        let _ = writeln!(out, "slot bounds       {}", join(&self.witness_slot_bounds));
        let _ = writeln!(
            out,
            "evaluations       {}{}",
            self.evaluations,
            if self.query.reduce_symmetry {
                " (symmetry-reduced)"
            } else {
                ""
            }
        );
        if let Some(t) = self.elapsed_seconds {
            let _ = writeln!(out, "elapsed           {t:.3}s");
        }
        out
    }

    pub fn csv(&self) -> String {
        let join = |v: &[f64]| v.iter().map(|&x| fmt_num(x)).collect::<Vec<_>>().join(" ");
        let mut out = String::from(
            "n,bounds,convention,reduce_symmetry,value,value_truncated,witness_tree,witness_index,witness_assignment,evaluations",
        );
        if self.elapsed_seconds.is_some() {
            out.push_str(",elapsed_seconds");
        }
        out.push('\n');
        let assignment: Vec<String> = self
            .witness_assignment
            .iter()
            .map(usize::to_string)
            .collect();
        let _ = write!(
            out,
            "{},{},{},{},{},{},\"{}\",{},{},{}",
            self.n,
            join(&self.query.bounds),
            self.query.convention,
            self.query.reduce_symmetry,
            fmt_num(self.value),
            self.value_truncated,
            self.witness_tree,
            self.witness_index,
            assignment.join(" "),
            self.evaluations
        );
        if let Some(t) = self.elapsed_seconds {
            let _ = write!(out, ",{t}");
        }
        out.push('\n');
        out
    }
}

/// Draws a tree top-down with the root marked `*` and each vertex's
/// frontier slot count.
pub fn render_ascii(t: &RootedTree) -> String {
    fn slots(t: &RootedTree, v: usize) -> String {
        let s = t.frontier_slots()[v];
        format!(
            "v{v}{} [{s} slot{}]",
            if v == t.root() { "*" } else { "" },
            if s == 1 { "" } else { "s" }
        )
    }
    fn walk(t: &RootedTree, v: usize, prefix: &str, out: &mut String) {
        let kids = t.children(v);
        for (i, &c) in kids.iter().enumerate().rev() {
            let last = i == 0;
            let _ = writeln!(
                out,
                "{prefix}{}{}",
                if last { "└─ " } else { "├─ " },
                slots(t, c)
            );
            let deeper = format!("{prefix}{}", if last { "   " } else { "│  " });
            walk(t, c, &deeper, out);
        }
    }
    let mut out = slots(t, t.root());
    out.push('\n');
    walk(t, t.root(), "", &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig15_rounds() {
        assert_eq!(fmt_sig15(std::f64::consts::PI), "3.14159265358979");
        assert_eq!(fmt_sig15(2.0), "2");
        assert_eq!(fmt_truncated(3.29599, 3), "3.295");
        assert_eq!(fmt_truncated(2.0943951, 3), "2.094");
        assert_eq!(fmt_num(1e200), "1e200");
        assert_eq!(fmt_num(0.25), "0.25");
    }

    #[test]
    fn ascii_marks_root() {
        let t = centered_bound::decode(&"(2,2)".parse().unwrap()).unwrap();
        let s = render_ascii(&t);
        assert!(s.starts_with("v2* [1 slot]"));
        assert_eq!(s.lines().count(), 3);
    }
}
