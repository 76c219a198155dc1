//! Automaton text format.
//!
//! ```text
//! %states 3
//! %start 1
//! %final 2
//! 1 0 0 1
//! 1 1 0 1
//! 1 0 1 2
//! 1 1 0 2
//! ```
//!
//! Each transition line is `source symbol weight target`. `%states` defaults
//! to one more than the largest state mentioned, `%start` to 0, and
//! `%alphabet` to the symbols on the transitions.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use wmcfg_core::{StateId, Symbol, Transition, WeightedAutomaton};

use crate::{content_lines, FormatError, ParseError};

fn number<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<T, ParseError> {
    tok.parse()
        .map_err(|_| ParseError::new(line, format!("bad {what} `{tok}`")))
}

pub fn parse_automaton(text: &str) -> Result<WeightedAutomaton, FormatError> {
    let mut states: Option<u32> = None;
    let mut start: StateId = 0;
    let mut finals: BTreeSet<StateId> = BTreeSet::new();
    let mut alphabet: Option<BTreeSet<Symbol>> = None;
    let mut transitions = Vec::new();
    let mut largest: StateId = 0;

    for (line, l) in content_lines(text) {
        let words: Vec<&str> = l.split_whitespace().collect();
        match words[0] {
            "%states" if words.len() == 2 => states = Some(number(line, words[1], "state count")?),
            "%start" if words.len() == 2 => {
                start = number(line, words[1], "state")?;
                largest = largest.max(start);
            }
            "%final" => {
                for w in &words[1..] {
                    let q: StateId = number(line, w, "state")?;
                    largest = largest.max(q);
                    finals.insert(q);
                }
            }
            "%alphabet" => alphabet = Some(words[1..].iter().map(|s| Symbol::new(s)).collect()),
            d if d.starts_with('%') => {
                return Err(ParseError::new(line, format!("unknown or malformed directive `{l}`")).into())
            }
            _ if words.len() == 4 => {
                let t = Transition {
                    source: number(line, words[0], "state")?,
                    symbol: Symbol::new(words[1]),
                    weight: number(line, words[2], "weight")?,
                    target: number(line, words[3], "state")?,
                };
                largest = largest.max(t.source).max(t.target);
                transitions.push(t);
            }
            _ => return Err(ParseError::new(line, "expected `source symbol weight target`").into()),
        }
    }
    let states = states.unwrap_or(largest + 1);
    let alphabet = alphabet.unwrap_or_else(|| transitions.iter().map(|t| t.symbol.clone()).collect());
    Ok(WeightedAutomaton::with_alphabet(
        states,
        alphabet,
        start,
        finals,
        transitions,
    )?)
}

/// Canonical text with every directive spelled out.
pub fn write_automaton(a: &WeightedAutomaton) -> String {
    let mut out = String::new();
    writeln!(out, "%states {}", a.num_states()).unwrap();
    writeln!(out, "%start {}", a.start()).unwrap();
    out.push_str("%final");
    for q in a.finals() {
        write!(out, " {q}").unwrap();
    }
    out.push_str("\n%alphabet");
    for s in a.alphabet() {
        write!(out, " {s}").unwrap();
    }
    out.push('\n');
    for t in a.transitions() {
        writeln!(out, "{} {} {} {}", t.source, t.symbol, t.weight, t.target).unwrap();
    }
    out
}
