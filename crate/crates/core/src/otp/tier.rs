//! Gestural scores as tier tables, and their one-symbol-per-tier string encoding.
//!
//! A table is a stack of tiers over time slices. It is flattened column by
//! column: all tiers of slice 0 in inventory order, then slice 1, and so on.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::symbol::{Mark, Symbol, Word};

/// The five special tiers that follow the three levels of a reduplicative layout.
pub const SPECIAL_TIERS: [&str; 5] = ["INS", "DEL", "RDEL", "RED", "BASE"];

/// Suffix marking the underlying copy of a surface tier.
pub const UNDERLYING_SUFFIX: &str = "_";
/// Suffix marking the reduplicant-level copy of a surface tier.
pub const REDUPLICANT_SUFFIX: &str = "__";

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TierError {
    #[error("a tier inventory needs at least one tier")]
    EmptyInventory,
    #[error("tier {0} appears twice")]
    DuplicateTier(String),
    #[error("slice {slice} has {found} cells, expected {expected}")]
    SliceWidth {
        slice: usize,
        expected: usize,
        found: usize,
    },
    #[error("tier rows have different lengths ({first} and {other})")]
    RaggedRows { first: usize, other: usize },
    #[error("symbol {symbol} at position {position} is not a tier mark")]
    NotAMark { position: usize, symbol: Symbol },
    #[error("string length {length} is not a multiple of the tier count {tiers}")]
    Length { length: usize, tiers: usize },
    #[error("unknown tier {0}")]
    UnknownTier(String),
}

/// Ordered tier names.
///
/// The reduplicative layout for surface tiers `t1..tT` is `t1..tT`, then the
/// underlying tiers `t1_..tT_`, the reduplicant-level tiers `t1__..tT__`, and
/// finally INS, DEL, RDEL, RED and BASE: `3T + 5` tiers in all.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TierInventory {
    names: Vec<String>,
    surface: Option<usize>,
}

impl TierInventory {
    pub fn reduplicative<S: AsRef<str>>(surface: &[S]) -> Result<Self, TierError> {
        if surface.is_empty() {
            return Err(TierError::EmptyInventory);
        }
        let base: Vec<&str> = surface.iter().map(AsRef::as_ref).collect();
        let mut names: Vec<String> = base.iter().map(|s| s.to_string()).collect();
        names.extend(base.iter().map(|s| alloc::format!("{s}{UNDERLYING_SUFFIX}")));
        names.extend(base.iter().map(|s| alloc::format!("{s}{REDUPLICANT_SUFFIX}")));
        names.extend(SPECIAL_TIERS.iter().map(|s| s.to_string()));
        check_unique(&names)?;
        Ok(TierInventory {
            names,
            surface: Some(base.len()),
        })
    }

    /// Any list of tier names, with no reduplicative structure.
    pub fn plain<S: AsRef<str>>(names: &[S]) -> Result<Self, TierError> {
        if names.is_empty() {
            return Err(TierError::EmptyInventory);
        }
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        check_unique(&names)?;
        Ok(TierInventory { names, surface: None })
    }

    /// Reads a list of names as reduplicative when it has that exact shape.
    pub fn infer<S: AsRef<str>>(names: &[S]) -> Result<Self, TierError> {
        let n = names.len();
        if n > 5 && (n - 5).is_multiple_of(3) {
            let t = (n - 5) / 3;
            if let Ok(inv) = Self::reduplicative(&names[..t]) {
                if inv.names.iter().map(String::as_str).eq(names.iter().map(AsRef::as_ref)) {
                    return Ok(inv);
                }
            }
        }
        Self::plain(names)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Number of surface tiers `T` for a reduplicative layout.
    pub fn surface_count(&self) -> Option<usize> {
        self.surface
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Index of surface tier `n`'s reduplicant-level copy.
    fn reduplicant_tier(&self, n: usize) -> Option<usize> {
        self.surface.map(|t| 2 * t + n)
    }
}

fn check_unique(names: &[String]) -> Result<(), TierError> {
    for (i, n) in names.iter().enumerate() {
        if names[..i].contains(n) {
            return Err(TierError::DuplicateTier(n.clone()));
        }
    }
    Ok(())
}

/// A cell of a tier that breaks constituent bracketing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BracketError {
    pub tier: String,
    pub slice: usize,
    pub found: Mark,
}

impl fmt::Display for BracketError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.slice == usize::MAX {
            write!(f, "tier {}: constituent left open", self.tier)
        } else {
            write!(
                f,
                "tier {}: unexpected {} at slice {}",
                self.tier, self.found, self.slice
            )
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TierTable {
    inventory: TierInventory,
    /// One column of marks per time slice, in inventory order.
    slices: Vec<Vec<Mark>>,
}

impl TierTable {
    pub fn new(inventory: TierInventory, slices: Vec<Vec<Mark>>) -> Result<Self, TierError> {
        for (slice, col) in slices.iter().enumerate() {
            if col.len() != inventory.len() {
                return Err(TierError::SliceWidth {
                    slice,
                    expected: inventory.len(),
                    found: col.len(),
                });
            }
        }
        Ok(TierTable { inventory, slices })
    }

    /// Builds a table from one row of marks per tier.
    pub fn from_rows(inventory: TierInventory, rows: &[Vec<Mark>]) -> Result<Self, TierError> {
        if rows.len() != inventory.len() {
            return Err(TierError::SliceWidth {
                slice: 0,
                expected: inventory.len(),
                found: rows.len(),
            });
        }
        let width = rows[0].len();
        if let Some(r) = rows.iter().find(|r| r.len() != width) {
            return Err(TierError::RaggedRows {
                first: width,
                other: r.len(),
            });
        }
        let slices = (0..width).map(|s| rows.iter().map(|r| r[s]).collect()).collect();
        Ok(TierTable { inventory, slices })
    }

    pub fn inventory(&self) -> &TierInventory {
        &self.inventory
    }

    pub fn num_slices(&self) -> usize {
        self.slices.len()
    }

    pub fn slices(&self) -> &[Vec<Mark>] {
        &self.slices
    }

    pub fn cell(&self, tier: usize, slice: usize) -> Mark {
        self.slices[slice][tier]
    }

    pub fn set_cell(&mut self, tier: usize, slice: usize, mark: Mark) {
        self.slices[slice][tier] = mark;
    }

    pub fn row(&self, tier: usize) -> Vec<Mark> {
        self.slices.iter().map(|c| c[tier]).collect()
    }

    pub fn rows(&self) -> Vec<Vec<Mark>> {
        (0..self.inventory.len()).map(|t| self.row(t)).collect()
    }

    /// Column-major flattening.
    pub fn encode(&self) -> Word {
        self.slices.iter().flatten().map(|m| m.symbol()).collect()
    }

    /// Inverse of [`encode`](Self::encode). Bracketing is not checked here;
    /// see [`bracket_errors`](Self::bracket_errors).
    pub fn decode(word: &[Symbol], inventory: TierInventory) -> Result<Self, TierError> {
        let tiers = inventory.len();
        if !word.len().is_multiple_of(tiers) {
            return Err(TierError::Length {
                length: word.len(),
                tiers,
            });
        }
        let marks = word
            .iter()
            .enumerate()
            .map(|(position, s)| {
                s.mark().ok_or_else(|| TierError::NotAMark {
                    position,
                    symbol: s.clone(),
                })
            })
            .collect::<Result<Vec<Mark>, _>>()?;
        let slices = marks.chunks(tiers).map(<[Mark]>::to_vec).collect();
        Ok(TierTable { inventory, slices })
    }

    /// Cells where a tier is not of the form `(-* [ (+ | \|)* ])* -*`.
    /// A constituent still open at the end is reported with slice `usize::MAX`.
    pub fn bracket_errors(&self) -> Vec<BracketError> {
        let mut out = Vec::new();
        for (t, name) in self.inventory.names().iter().enumerate() {
            let mut inside = false;
            for (slice, col) in self.slices.iter().enumerate() {
                let m = col[t];
                let ok = match (inside, m) {
                    (false, Mark::Out) | (true, Mark::In) | (true, Mark::Boundary) => true,
                    (false, Mark::Open) => {
                        inside = true;
                        true
                    }
                    (true, Mark::Close) => {
                        inside = false;
                        true
                    }
                    _ => false,
                };
                if !ok {
                    out.push(BracketError {
                        tier: name.clone(),
                        slice,
                        found: m,
                    });
                }
            }
            if inside {
                out.push(BracketError {
                    tier: name.clone(),
                    slice: usize::MAX,
                    found: Mark::Open,
                });
            }
        }
        out
    }
}

/// Why a table fails the reduplicant identity check.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum IdentityMismatch {
    #[error("the tier inventory is not reduplicative")]
    NotReduplicative,
    #[error("tier {0} has no complete [ ... ] span")]
    MissingSpan(&'static str),
    #[error("the reduplicant spans {red} slices but the base spans {base}")]
    SpanLength { red: usize, base: usize },
    #[error("reduplicant copy differs at {}", render_cells(.0))]
    Cells(Vec<CellMismatch>),
}

/// A reduplicant-level cell inside the base that does not copy the reduplicant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellMismatch {
    pub tier: String,
    pub slice: usize,
    pub expected: Mark,
    pub found: Mark,
}

fn render_cells(cells: &[CellMismatch]) -> String {
    let parts: Vec<String> = cells
        .iter()
        .map(|c| alloc::format!("({}, {}): expected {} found {}", c.tier, c.slice, c.expected, c.found))
        .collect();
    parts.join(", ")
}

/// The right-facing half of a surface mark, as copied at the first slice of a span.
pub fn right_half(m: Mark) -> Mark {
    match m {
        Mark::Close => Mark::Out,
        Mark::Boundary => Mark::Open,
        other => other,
    }
}

/// The left-facing half of a surface mark, as copied at the last slice of a span.
pub fn left_half(m: Mark) -> Mark {
    match m {
        Mark::Open => Mark::Out,
        Mark::Boundary => Mark::Close,
        other => other,
    }
}

/// First `[` and the following `]` on a tier, inclusive.
fn span(t: &TierTable, tier: usize) -> Option<(usize, usize)> {
    let row = t.row(tier);
    let open = row.iter().position(|&m| m == Mark::Open)?;
    let close = row[open + 1..].iter().position(|&m| m == Mark::Close)? + open + 1;
    Some((open, close))
}

/// Checks that the reduplicant-level tiers inside the BASE span hold a copy of
/// the surface tiers inside the RED span, slice for slice. The first and last
/// slices copy only the half of each mark facing into the span.
///
/// A table with neither a RED nor a BASE span has nothing to check.
pub fn redup_identity_check(t: &TierTable) -> Result<(), IdentityMismatch> {
    let inv = t.inventory();
    let Some(surface) = inv.surface_count() else {
        return Err(IdentityMismatch::NotReduplicative);
    };
    let red_tier = inv.position("RED").ok_or(IdentityMismatch::NotReduplicative)?;
    let base_tier = inv.position("BASE").ok_or(IdentityMismatch::NotReduplicative)?;
    let (red, base) = match (span(t, red_tier), span(t, base_tier)) {
        (None, None) => return Ok(()),
        (None, _) => return Err(IdentityMismatch::MissingSpan("RED")),
        (_, None) => return Err(IdentityMismatch::MissingSpan("BASE")),
        (Some(r), Some(b)) => (r, b),
    };
    let len = red.1 - red.0 + 1;
    if base.1 - base.0 + 1 != len {
        return Err(IdentityMismatch::SpanLength {
            red: len,
            base: base.1 - base.0 + 1,
        });
    }
    let mut cells = Vec::new();
    for n in 0..surface {
        let copy = inv.reduplicant_tier(n).expect("reduplicative layout");
        for d in 0..len {
            let s = t.cell(n, red.0 + d);
            let expected = if d == 0 {
                right_half(s)
            } else if d == len - 1 {
                left_half(s)
            } else {
                s
            };
            let found = t.cell(copy, base.0 + d);
            if found != expected {
                cells.push(CellMismatch {
                    tier: inv.names()[copy].clone(),
                    slice: base.0 + d,
                    expected,
                    found,
                });
            }
        }
    }
    if cells.is_empty() {
        Ok(())
    } else {
        Err(IdentityMismatch::Cells(cells))
    }
}
