//! Text formats for grammars, automata and tier tables, plus the pieces the
//! `wmcfg` binary is built from.
//!
//! ```
//! use wmcfg::automaton_text::parse_automaton;
//! use wmcfg::grammar_text::{parse_grammar, write_grammar};
//! use wmcfg::wmcfg_core::otp::eval::{intersect_grammar, PipelineOptions};
//!
//! let g = parse_grammar("S -> A.0 A.1\nA -> (1, 1)\nA -> (0, 0)\nA -> (0 A.0, 0 A.1)\nA -> (1 A.0, 1 A.1)").unwrap();
//! let ends_in_zero = parse_automaton("%start 1\n%final 2\n1 0 0 1\n1 1 0 1\n1 0 1 2\n1 1 0 2").unwrap();
//! let best = intersect_grammar(&g, &ends_in_zero, &PipelineOptions::default()).unwrap();
//! assert_eq!(
//!     write_grammar(&best),
//!     "%start S\nS -> A.0 A.1\nA -> ( 1 , 1 )\nA -> ( 0 A.0 , 0 A.1 )\nA -> ( 1 A.0 , 1 A.1 )\n"
//! );
//! ```

pub mod automaton_text;
pub mod grammar_text;
pub mod tier_text;

pub use wmcfg_core;

use thiserror::Error;
use wmcfg_core::automaton::AutomatonError;
use wmcfg_core::grammar::GrammarError;
use wmcfg_core::otp::tier::TierError;

/// A malformed line in one of the text formats. Lines count from 1.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            message: message.into(),
        }
    }
}

/// Any failure to read one of the text formats.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid grammar: {0}")]
    Grammar(#[from] GrammarError),
    #[error("invalid automaton: {0}")]
    Automaton(#[from] AutomatonError),
    #[error("invalid tier table: {0}")]
    Tier(#[from] TierError),
}

/// Lines with comments and surrounding blanks removed, numbered from 1.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = match l.find('#') {
            Some(p) => &l[..p],
            None => l,
        };
        let l = l.trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}
