//! Lower bounds on the area of a compact centered dual two-cell in the
//! hyperbolic plane, given lower bounds on its side lengths.
//!
//! The bound is the minimum, over rooted trees `T` with every vertex
//! trivalent after adding `n` frontier edges and over all permutations `σ`
//! of the bounds, of a per-tree function `B_T(σ(b))` built from closed-form
//! triangle areas.
//!
//! ```
//! use centered_bound::{minimize, BoundQuery};
//!
//! // Five edges, each at least 2·asinh(1) long.
//! let result = minimize(&BoundQuery::from_half_sinh(&[1.0; 5]).unwrap()).unwrap();
//! assert_eq!((result.value * 1000.0).floor() / 1000.0, 3.295);
//! ```

pub mod closed_forms;
pub mod error;
pub mod forest_io;
pub mod hypgeom;
pub mod oracle;
pub mod search;
pub mod trees;

pub use error::{Error, Result};
pub use forest_io::{ForestLibrary, ParseError, ParseErrorKind, SourceOrder};
pub use hypgeom::HalfSinhLength;
pub use search::{
    flat_bound, minimize, treecrawler, BoundQuery, BoundResult, SearchPlan, SlotAssignment,
    TreeSource,
};
pub use trees::{canonicalize, decode, enumerate_trees, CanonicalCode, RootedTree, TreeCode};

/// Truncates (rounds towards negative infinity) to `digits` decimals.
pub fn truncate(value: f64, digits: u32) -> f64 {
    let scale = 10f64.powi(digits as i32);
    (value * scale).floor() / scale
}
