//! Tier tables as rows of `NAME: mark mark ...`.
//!
//! Marks may also run together (`C: [-+-]-`). Row order is the tier order of
//! the table; a row set shaped like a reduplicative layout is read as one.

use std::fmt::Write as _;

use wmcfg_core::otp::tier::{TierInventory, TierTable};
use wmcfg_core::{Mark, Symbol, Word};

use crate::{content_lines, FormatError, ParseError};

pub fn parse_tier_table(text: &str) -> Result<TierTable, FormatError> {
    let mut names = Vec::new();
    let mut rows = Vec::new();
    for (line, l) in content_lines(text) {
        let (name, cells) = l
            .split_once(':')
            .ok_or_else(|| ParseError::new(line, "expected `NAME: marks`"))?;
        let name = name.trim();
        if name.is_empty() {
            return Err(ParseError::new(line, "missing tier name").into());
        }
        let row = cells
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| Mark::from_char(c).ok_or_else(|| ParseError::new(line, format!("`{c}` is not a tier mark"))))
            .collect::<Result<Vec<Mark>, _>>()?;
        names.push(name.to_owned());
        rows.push(row);
    }
    let inventory = TierInventory::infer(&names)?;
    Ok(TierTable::from_rows(inventory, &rows)?)
}

/// One row per tier, names padded so the marks line up.
pub fn write_tier_table(t: &TierTable) -> String {
    let width = t
        .inventory()
        .names()
        .iter()
        .map(|n| n.chars().count())
        .max()
        .unwrap_or(0);
    let mut out = String::new();
    for (name, row) in t.inventory().names().iter().zip(t.rows()) {
        write!(out, "{:width$}", format!("{name}:"), width = width + 1).unwrap();
        for m in row {
            write!(out, " {m}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// A flat encoding, one character per mark; whitespace is ignored.
pub fn parse_flat(text: &str) -> Word {
    text.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| Symbol::new(c.encode_utf8(&mut [0u8; 4])))
        .collect()
}
