//! Tree catalogs on disk.
//!
//! Two layouts are supported.
//!
//! The `forest.txt` layout: line 1 is a key list `L` (0-based) where `L[k]`
//! is the number of lines below the key line at which the section for
//! `k`-edged trees starts. That line holds the number of codes in the
//! section, and each following line holds one code with its entries in
//! reverse order, separated by whitespace. `L[k] = 0` marks an absent
//! section. The single-vertex tree (`k = 0`) has an empty code line.
//!
//! The catalog layout is self-describing and keeps codes in their natural
//! order:
//!
//! ```text
//! centered-bound catalog v1
//! n 3 1
//!
//! n 4 1
//! 1
//! n 5 2
//! 1 2
//! 2 2
//! ```

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::error::{Error, Result};
use crate::trees::{self, CanonicalCode, TreeCode, VALENCE};

/// Environment variable naming a catalog file that replaces native enumeration.
pub const FOREST_ENV: &str = "CENTERED_BOUND_FOREST";

/// First line of the self-describing catalog layout.
pub const CATALOG_MAGIC: &str = "centered-bound catalog v1";

/// Sections beyond this edge count are not checked for completeness.
pub const COMPLETENESS_CHECK_MAX_K: usize = 14;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    /// 1-based line number in the input.
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("empty input")]
    Empty,
    #[error("malformed key line: {0}")]
    MalformedKey(String),
    #[error("section for k = {k}: {reason}")]
    SectionLayout { k: usize, reason: String },
    #[error("section for k = {k}: malformed count line `{text}`")]
    MalformedCount { k: usize, text: String },
    #[error("section for k = {k}: header says {declared} codes but {found} follow")]
    CountMismatch {
        k: usize,
        declared: usize,
        found: usize,
    },
    #[error("section for k = {k}: invalid code: {reason}")]
    InvalidCode { k: usize, reason: String },
    #[error("section for k = {k}: code has {found} entries, expected {k}")]
    WrongLength { k: usize, found: usize },
    #[error("section for k = {k}: tree duplicates the one on line {first_line}")]
    Duplicate { k: usize, first_line: usize },
    #[error("section for k = {k}: holds {found} trees but there are {expected}")]
    Incomplete {
        k: usize,
        found: usize,
        expected: usize,
    },
    #[error("unexpected line `{0}`")]
    Unexpected(String),
    #[error("{0}")]
    Io(String),
}

/// Where the ordering of a library came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceOrder {
    /// Sorted canonical codes from [`trees::enumerate_by_edges`].
    Native,
    /// Whatever order the file listed.
    Loaded,
}

/// Ordered catalog of tree codes, grouped by edge count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForestLibrary {
    sections: BTreeMap<usize, Vec<TreeCode>>,
    pub source_order: SourceOrder,
}

impl ForestLibrary {
    /// Native enumeration for every `n` in `3..=max_n`.
    pub fn native(max_n: usize) -> Self {
        let sections = (0..=max_n.saturating_sub(VALENCE))
            .filter(|_| max_n >= VALENCE)
            .map(|k| {
                let codes = trees::enumerate_by_edges(k)
                    .into_iter()
                    .map(CanonicalCode::into_code)
                    .collect();
                (k, codes)
            })
            .collect();
        Self {
            sections,
            source_order: SourceOrder::Native,
        }
    }

    /// Builds a library from explicit sections, validating every code.
    pub fn from_sections(
        sections: BTreeMap<usize, Vec<TreeCode>>,
        source_order: SourceOrder,
    ) -> Result<Self> {
        for (&k, codes) in &sections {
            for code in codes {
                if code.edge_count() != k {
                    return Err(Error::InvalidCode {
                        index: 0,
                        reason: format!("code {code} filed under k = {k}"),
                    });
                }
                trees::decode(code)?;
            }
        }
        Ok(Self {
            sections,
            source_order,
        })
    }

    pub fn codes(&self, k: usize) -> Option<&[TreeCode]> {
        self.sections.get(&k).map(Vec::as_slice)
    }

    /// Codes for polygons with `n` edges.
    pub fn codes_for_polygon(&self, n: usize) -> Option<&[TreeCode]> {
        n.checked_sub(VALENCE).and_then(|k| self.codes(k))
    }

    pub fn edge_counts(&self) -> impl Iterator<Item = usize> + '_ {
        self.sections.keys().copied()
    }

    pub fn max_edges(&self) -> Option<usize> {
        self.sections.keys().next_back().copied()
    }

    pub fn counts(&self) -> Vec<(usize, usize)> {
        self.sections.iter().map(|(&k, v)| (k, v.len())).collect()
    }

    /// Loads the file named by [`FOREST_ENV`], if set.
    pub fn from_env() -> Option<Result<Self>> {
        std::env::var_os(FOREST_ENV).map(|p| Self::load(Path::new(&p)))
    }

    /// Reads a file in either layout.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| ParseError {
            line: 0,
            kind: ParseErrorKind::Io(format!("{}: {e}", path.display())),
        })?;
        Ok(parse_any(&text)?)
    }
}

fn split_lines(text: &str) -> Vec<&str> {
    let body = text.strip_suffix('\n').unwrap_or(text);
    body.split('\n')
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .collect()
}

fn parse_key(line: &str) -> std::result::Result<Vec<usize>, ParseErrorKind> {
    let trimmed = line.trim();
    let inner = match (trimmed.strip_prefix('['), trimmed.strip_suffix(']')) {
        (Some(_), Some(_)) => &trimmed[1..trimmed.len() - 1],
        (None, None) => trimmed,
        _ => return Err(ParseErrorKind::MalformedKey("unbalanced brackets".into())),
    };
    let entries: Vec<&str> = if inner.contains(',') {
        inner.split(',').map(str::trim).collect()
    } else {
        inner.split_whitespace().collect()
    };
    if entries.is_empty() || entries.iter().all(|e| e.is_empty()) {
        return Err(ParseErrorKind::MalformedKey("no entries".into()));
    }
    entries
        .iter()
        .map(|e| {
            e.parse::<usize>().map_err(|_| {
                ParseErrorKind::MalformedKey(format!("`{e}` is not a non-negative integer"))
            })
        })
        .collect()
}

fn parse_code_line(
    text: &str,
    k: usize,
    reversed: bool,
) -> std::result::Result<TreeCode, ParseErrorKind> {
    let mut entries = text
        .split_whitespace()
        .map(|t| {
            t.parse::<usize>().map_err(|_| ParseErrorKind::InvalidCode {
                k,
                reason: format!("`{t}` is not a non-negative integer"),
            })
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if entries.len() != k {
        return Err(ParseErrorKind::WrongLength {
            k,
            found: entries.len(),
        });
    }
    if reversed {
        entries.reverse();
    }
    let code = TreeCode::new(entries);
    trees::decode(&code).map_err(|e| ParseErrorKind::InvalidCode {
        k,
        reason: e.to_string(),
    })?;
    Ok(code)
}

/// Parses a section's code lines (`first_line` is the 1-based line number of
/// the first code) and checks that they are distinct and complete.
fn read_section(
    lines: &[&str],
    first_line: usize,
    k: usize,
    reversed: bool,
) -> std::result::Result<Vec<TreeCode>, ParseError> {
    let mut seen: HashSet<CanonicalCode> = HashSet::new();
    let mut first_seen: Vec<(CanonicalCode, usize)> = Vec::new();
    let mut codes = Vec::with_capacity(lines.len());
    for (offset, text) in lines.iter().enumerate() {
        let line = first_line + offset;
        let code = parse_code_line(text, k, reversed).map_err(|kind| ParseError { line, kind })?;
        let canonical = trees::canonicalize(&trees::decode(&code).expect("validated above"));
        if !seen.insert(canonical.clone()) {
            let first_line = first_seen
                .iter()
                .find(|(c, _)| *c == canonical)
                .map_or(0, |(_, l)| *l);
            return Err(ParseError {
                line,
                kind: ParseErrorKind::Duplicate { k, first_line },
            });
        }
        first_seen.push((canonical, line));
        codes.push(code);
    }
    if k <= COMPLETENESS_CHECK_MAX_K {
        let expected = trees::enumerate_by_edges(k).len();
        if codes.len() != expected {
            return Err(ParseError {
                line: first_line.saturating_sub(1),
                kind: ParseErrorKind::Incomplete {
                    k,
                    found: codes.len(),
                    expected,
                },
            });
        }
    }
    Ok(codes)
}

/// Parses the `forest.txt` layout.
///
/// The key line is checked against the actual section placement: sections
/// must appear in increasing `k`, back to back, and cover every line.
pub fn parse_forest(text: &str) -> std::result::Result<ForestLibrary, ParseError> {
    if text.is_empty() {
        return Err(ParseError {
            line: 1,
            kind: ParseErrorKind::Empty,
        });
    }
    let lines = split_lines(text);
    let key = parse_key(lines[0]).map_err(|kind| ParseError { line: 1, kind })?;

    let mut sections = BTreeMap::new();
    // Offset (lines below the key) where the next section must begin.
    let mut expected_offset = 1usize;
    for (k, &offset) in key.iter().enumerate() {
        if offset == 0 {
            continue;
        }
        if offset != expected_offset {
            return Err(ParseError {
                line: 1,
                kind: ParseErrorKind::SectionLayout {
                    k,
                    reason: format!("key places it at offset {offset}, but the previous section ends at {expected_offset}"),
                },
            });
        }
        let count_line = offset + 1;
        let Some(count_text) = lines.get(offset) else {
            return Err(ParseError {
                line: count_line,
                kind: ParseErrorKind::SectionLayout {
                    k,
                    reason: "starts past the end of the file".into(),
                },
            });
        };
        let declared: usize = count_text.trim().parse().map_err(|_| ParseError {
            line: count_line,
            kind: ParseErrorKind::MalformedCount {
                k,
                text: count_text.to_string(),
            },
        })?;
        let start = offset + 1;
        let available = lines.len().saturating_sub(start);
        if declared > available {
            return Err(ParseError {
                line: count_line,
                kind: ParseErrorKind::CountMismatch {
                    k,
                    declared,
                    found: available,
                },
            });
        }
        let codes = read_section(&lines[start..start + declared], start + 1, k, true)?;
        sections.insert(k, codes);
        expected_offset = start + declared;
    }
    if sections.is_empty() {
        return Err(ParseError {
            line: 1,
            kind: ParseErrorKind::MalformedKey("no sections".into()),
        });
    }
    if expected_offset < lines.len() {
        return Err(ParseError {
            line: expected_offset + 1,
            kind: ParseErrorKind::Unexpected(lines[expected_offset].to_string()),
        });
    }
    Ok(ForestLibrary {
        sections,
        source_order: SourceOrder::Loaded,
    })
}

/// Writes sections `k ≤ max_k` in the `forest.txt` layout.
///
/// The key is derived from where the sections land.
pub fn write_forest(lib: &ForestLibrary, max_k: usize) -> String {
    let present: Vec<(usize, &Vec<TreeCode>)> =
        lib.sections.range(..=max_k).map(|(&k, v)| (k, v)).collect();
    let mut key = Vec::new();
    let mut offset = 1;
    for &(k, codes) in &present {
        key.resize(k, 0);
        key.push(offset);
        offset += 1 + codes.len();
    }
    let mut out = String::new();
    out.push('[');
    for (i, o) in key.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{o}");
    }
    out.push_str("]\n");
    for (_, codes) in present {
        let _ = writeln!(out, "{}", codes.len());
        for code in codes {
            let line: Vec<String> = code.entries().iter().rev().map(usize::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
    }
    out
}

/// Parses the self-describing catalog layout.
pub fn parse_catalog(text: &str) -> std::result::Result<ForestLibrary, ParseError> {
    let lines = split_lines(text);
    if lines.first().map(|l| l.trim()) != Some(CATALOG_MAGIC) {
        return Err(ParseError {
            line: 1,
            kind: ParseErrorKind::Unexpected(lines.first().unwrap_or(&"").to_string()),
        });
    }
    let mut sections = BTreeMap::new();
    let mut i = 1;
    while i < lines.len() {
        let line = i + 1;
        let header: Vec<&str> = lines[i].split_whitespace().collect();
        let (n, declared) = match header.as_slice() {
            ["n", n, c] => match (n.parse::<usize>(), c.parse::<usize>()) {
                (Ok(n), Ok(c)) if n >= VALENCE => (n, c),
                _ => {
                    return Err(ParseError {
                        line,
                        kind: ParseErrorKind::Unexpected(lines[i].to_string()),
                    })
                }
            },
            _ => {
                return Err(ParseError {
                    line,
                    kind: ParseErrorKind::Unexpected(lines[i].to_string()),
                })
            }
        };
        let k = n - VALENCE;
        if sections.keys().next_back().is_some_and(|&last| last >= k) {
            return Err(ParseError {
                line,
                kind: ParseErrorKind::SectionLayout {
                    k,
                    reason: "sections must appear in increasing n".into(),
                },
            });
        }
        let available = lines.len() - i - 1;
        if declared > available {
            return Err(ParseError {
                line,
                kind: ParseErrorKind::CountMismatch {
                    k,
                    declared,
                    found: available,
                },
            });
        }
        let codes = read_section(&lines[i + 1..i + 1 + declared], line + 1, k, false)?;
        sections.insert(k, codes);
        i += 1 + declared;
    }
    if sections.is_empty() {
        return Err(ParseError {
            line: 1,
            kind: ParseErrorKind::Empty,
        });
    }
    Ok(ForestLibrary {
        sections,
        source_order: SourceOrder::Loaded,
    })
}

/// Writes sections `k ≤ max_k` in the catalog layout.
pub fn write_catalog(lib: &ForestLibrary, max_k: usize) -> String {
    let mut out = String::new();
    out.push_str(CATALOG_MAGIC);
    out.push('\n');
    for (&k, codes) in lib.sections.range(..=max_k) {
        let _ = writeln!(out, "n {} {}", k + VALENCE, codes.len());
        for code in codes {
            let line: Vec<String> = code.entries().iter().map(usize::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
    }
    out
}

/// Parses either layout, picking by the first line.
pub fn parse_any(text: &str) -> std::result::Result<ForestLibrary, ParseError> {
    if text.lines().next().map(str::trim) == Some(CATALOG_MAGIC) {
        parse_catalog(text)
    } else {
        parse_forest(text)
    }
}
