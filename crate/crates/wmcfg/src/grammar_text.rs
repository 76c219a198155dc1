//! Grammar text format.
//!
//! ```text
//! %start S
//! S -> A.0 A.1
//! A -> ( 0 A.0 , 0 A.1 )
//! A -> ( 1 , 1 ) @2
//! ```
//!
//! Tokens are whitespace separated. `Name.k` is component `k` of category
//! `Name` when `Name` is a known category (a rule's left-hand side, the start,
//! or declared with `%cat Name arity`); any other token is a terminal. A
//! right-hand side may not begin with a terminal that starts with `(`. A rule
//! whose left-hand side has arity above 1 wraps its components in parentheses
//! and separates them with commas. `@w` gives the rule weight; `%empty` marks
//! a grammar without rules. `#` starts a comment, so it cannot be a terminal.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use wmcfg_core::grammar::GrammarLimits;
use wmcfg_core::{Category, Mcfg, McfgRule, Term, Weight};

use crate::{content_lines, FormatError, ParseError};

struct RawRule {
    line: usize,
    lhs: String,
    components: Vec<Vec<String>>,
    weight: Weight,
}

pub fn parse_grammar(text: &str) -> Result<Mcfg, FormatError> {
    parse_grammar_with(text, GrammarLimits::default())
}

pub fn parse_grammar_with(text: &str, limits: GrammarLimits) -> Result<Mcfg, FormatError> {
    let mut start: Option<(usize, String)> = None;
    let mut declared: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    let mut empty_marker: Option<usize> = None;
    let mut raw: Vec<RawRule> = Vec::new();

    for (line, l) in content_lines(text) {
        if let Some(rest) = l.strip_prefix('%') {
            let mut words = rest.split_whitespace();
            match (words.next(), words.next(), words.next(), words.next()) {
                (Some("start"), Some(name), None, None) => {
                    if start.replace((line, name.to_owned())).is_some() {
                        return Err(ParseError::new(line, "second %start directive").into());
                    }
                }
                (Some("cat"), Some(name), Some(arity), None) => {
                    let arity: usize = arity
                        .parse()
                        .map_err(|_| ParseError::new(line, format!("bad arity `{arity}`")))?;
                    declared.insert(name.to_owned(), (line, arity));
                }
                (Some("empty"), None, None, None) => empty_marker = Some(line),
                _ => return Err(ParseError::new(line, format!("unknown directive `{l}`")).into()),
            }
            continue;
        }
        raw.push(parse_rule_line(line, l)?);
    }

    if let (Some(line), false) = (empty_marker, raw.is_empty()) {
        return Err(ParseError::new(line, "%empty in a grammar with rules").into());
    }

    let mut arity: BTreeMap<String, usize> = BTreeMap::new();
    for (name, &(line, a)) in &declared {
        note_arity(&mut arity, name, a, line)?;
    }
    for r in &raw {
        note_arity(&mut arity, &r.lhs, r.components.len(), r.line)?;
    }
    let (start_line, start_name) = match (&start, raw.first()) {
        (Some((line, name)), _) => (*line, name.clone()),
        (None, Some(r)) => (r.line, r.lhs.clone()),
        (None, None) => return Err(ParseError::new(0, "no %start directive and no rules").into()),
    };
    note_arity(&mut arity, &start_name, 1, start_line)?;

    let category = |name: &str| Category::new(name, arity[name]);
    let rules: Vec<McfgRule> = raw
        .iter()
        .map(|r| {
            let rhs = r
                .components
                .iter()
                .map(|seq| seq.iter().map(|tok| resolve(tok, &arity)).collect())
                .collect();
            McfgRule::new(category(&r.lhs), rhs, r.weight)
        })
        .collect();
    let extra: Vec<Category> = declared.keys().map(|n| category(n)).collect();
    Ok(Mcfg::with_categories(category(&start_name), extra, rules, limits)?)
}

fn note_arity(arity: &mut BTreeMap<String, usize>, name: &str, a: usize, line: usize) -> Result<(), ParseError> {
    match arity.get(name) {
        Some(&prev) if prev != a => Err(ParseError::new(
            line,
            format!("category {name} used with arity {a}, earlier with {prev}"),
        )),
        _ => {
            arity.insert(name.to_owned(), a);
            Ok(())
        }
    }
}

fn resolve(tok: &str, arity: &BTreeMap<String, usize>) -> Term {
    if let Some((name, k)) = tok.rsplit_once('.') {
        if let (Some(&a), Ok(k)) = (arity.get(name), k.parse::<usize>()) {
            return Term::comp(&Category::new(name, a), k);
        }
    }
    Term::sym(tok)
}

fn parse_rule_line(line: usize, l: &str) -> Result<RawRule, ParseError> {
    let (lhs, rhs) = l
        .split_once("->")
        .ok_or_else(|| ParseError::new(line, "expected `LHS -> ...`"))?;
    let lhs = lhs.trim();
    if lhs.is_empty() || lhs.contains(char::is_whitespace) {
        return Err(ParseError::new(line, format!("bad left-hand side `{lhs}`")));
    }
    let mut tokens: Vec<&str> = rhs.split_whitespace().collect();
    let mut weight = 0;
    if let Some(w) = tokens.last().and_then(|t| t.strip_prefix('@')) {
        weight = w
            .parse()
            .map_err(|_| ParseError::new(line, format!("bad weight `@{w}`")))?;
        tokens.pop();
    }
    let tuple = tokens.first().is_some_and(|f| f.starts_with('('));
    if tuple && !tokens.last().is_some_and(|l| l.ends_with(')')) {
        return Err(ParseError::new(line, "unclosed `(`"));
    }
    let components = if tuple {
        let n = tokens.len();
        tokens[0] = &tokens[0][1..];
        let last = tokens[n - 1];
        tokens[n - 1] = &last[..last.len() - 1];
        let mut components = vec![Vec::new()];
        for tok in tokens {
            // Decorated names hold commas inside parentheses; elsewhere a
            // comma always separates components.
            let parts: Vec<&str> = if tok.contains(['(', ')']) {
                match tok.strip_suffix(',') {
                    Some(body) => vec![body, ""],
                    None => vec![tok],
                }
            } else {
                tok.split(',').collect()
            };
            for (i, part) in parts.into_iter().enumerate() {
                if i > 0 {
                    components.push(Vec::new());
                }
                if !part.is_empty() {
                    components.last_mut().unwrap().push(part.to_owned());
                }
            }
        }
        components
    } else {
        vec![tokens.iter().map(|t| (*t).to_owned()).collect()]
    };
    if components.iter().any(Vec::is_empty) {
        return Err(ParseError::new(line, "empty component"));
    }
    Ok(RawRule {
        line,
        lhs: lhs.to_owned(),
        components,
        weight,
    })
}

/// Canonical text: `%start`, then `%cat` for categories without rules, then
/// the rules in order. Parsing the output gives back an equal grammar.
pub fn write_grammar(g: &Mcfg) -> String {
    let mut out = String::new();
    writeln!(out, "%start {}", g.start().name()).unwrap();
    for c in g.categories() {
        if c != g.start() && !g.rules().iter().any(|r| &r.lhs == c) {
            writeln!(out, "%cat {} {}", c.name(), c.arity()).unwrap();
        }
    }
    if g.is_empty() {
        out.push_str("%empty\n");
    }
    for r in g.rules() {
        writeln!(out, "{r}").unwrap();
    }
    out
}
