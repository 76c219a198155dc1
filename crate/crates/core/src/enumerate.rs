//! Brute-force enumeration of bounded-length languages.
//!
//! These are the reference oracles: they share no code with the chart engine
//! and compute `(string, minimum weight)` sets by exhaustive expansion.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use thiserror::Error;

use crate::automaton::{StateId, WeightedAutomaton};
use crate::grammar::{validate_normal_form, Category, ChildInstance, Mcfg, McfgRule, NormalFormReport, Term, Weight};
use crate::symbol::Word;

pub const DEFAULT_ENUMERATION_LIMIT: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EnumerationError {
    #[error("enumeration frontier exceeded {limit} entries")]
    LimitExceeded { limit: usize },
    #[error("grammar is not in normal form: {0}")]
    NotNormalForm(NormalFormReport),
}

/// Every string of length ≤ `max_len` accepted by `a`, with its cheapest path weight.
pub fn enumerate_accepted(
    a: &WeightedAutomaton,
    max_len: usize,
    limit: usize,
) -> Result<BTreeMap<Word, Weight>, EnumerationError> {
    let mut out: BTreeMap<Word, Weight> = BTreeMap::new();
    let mut frontier: BTreeMap<(StateId, Word), Weight> = BTreeMap::new();
    frontier.insert((a.start(), Vec::new()), 0);
    for len in 0..=max_len {
        let mut next: BTreeMap<(StateId, Word), Weight> = BTreeMap::new();
        for ((q, w), cost) in &frontier {
            if a.is_final(*q) {
                relax(&mut out, w.clone(), *cost);
            }
            if len == max_len {
                continue;
            }
            for (_, t) in a.outgoing(*q) {
                let mut w2 = w.clone();
                w2.push(t.symbol.clone());
                relax(&mut next, (t.target, w2), cost + t.weight);
            }
        }
        if next.len() + out.len() > limit {
            return Err(EnumerationError::LimitExceeded { limit });
        }
        frontier = next;
    }
    Ok(out)
}

fn relax<K: Ord>(map: &mut BTreeMap<K, Weight>, key: K, w: Weight) -> bool {
    match map.get_mut(&key) {
        Some(old) if *old <= w => false,
        Some(old) => {
            *old = w;
            true
        }
        None => {
            map.insert(key, w);
            true
        }
    }
}

/// Every string of length ≤ `max_len` derivable from the start category, with
/// the minimum total rule weight over its derivations.
pub fn enumerate_strings(g: &Mcfg, max_len: usize, limit: usize) -> Result<BTreeMap<Word, Weight>, EnumerationError> {
    validate_normal_form(g).map_err(EnumerationError::NotNormalForm)?;
    let rules: Vec<(&McfgRule, Vec<ChildInstance>)> = g.rules().iter().map(|r| (r, r.children())).collect();
    let shortest = shortest_yields(&rules);
    let budget = length_budgets(g, &rules, &shortest, max_len);

    let mut tuples: BTreeMap<Category, BTreeMap<Vec<Word>, Weight>> = BTreeMap::new();
    let mut stored = 0usize;
    loop {
        let mut found: Vec<(Category, Vec<Word>, Weight)> = Vec::new();
        for (rule, children) in &rules {
            let Some(&cap) = budget.get(&rule.lhs) else {
                continue;
            };
            let fixed = rule.terminal_count();
            if fixed > cap {
                continue;
            }
            let mut picked = Vec::with_capacity(children.len());
            expand(
                rule,
                children,
                &tuples,
                &shortest,
                cap,
                fixed,
                0,
                &mut picked,
                &mut found,
            );
        }
        let mut changed = false;
        for (cat, tuple, w) in found {
            let entry = tuples.entry(cat).or_default();
            let before = entry.len();
            if relax(entry, tuple, w) {
                changed = true;
                stored += entry.len() - before;
            }
        }
        if stored > limit {
            return Err(EnumerationError::LimitExceeded { limit });
        }
        if !changed {
            break;
        }
    }
    Ok(tuples
        .remove(g.start())
        .unwrap_or_default()
        .into_iter()
        .map(|(mut t, w)| (t.swap_remove(0), w))
        .collect())
}

#[allow(clippy::too_many_arguments)]
fn expand<'t>(
    rule: &McfgRule,
    children: &[ChildInstance],
    tuples: &'t BTreeMap<Category, BTreeMap<Vec<Word>, Weight>>,
    shortest: &BTreeMap<Category, usize>,
    cap: usize,
    used: usize,
    weight: Weight,
    picked: &mut Vec<&'t Vec<Word>>,
    out: &mut Vec<(Category, Vec<Word>, Weight)>,
) {
    let i = picked.len();
    if i == children.len() {
        out.push((
            rule.lhs.clone(),
            build_yield(rule, children, picked),
            rule.weight + weight,
        ));
        return;
    }
    let Some(rest) = children[i + 1..]
        .iter()
        .map(|c| shortest.get(&c.category))
        .sum::<Option<usize>>()
    else {
        return;
    };
    let Some(options) = tuples.get(&children[i].category) else {
        return;
    };
    for (tuple, w) in options {
        let len: usize = tuple.iter().map(Vec::len).sum();
        if used + len + rest > cap {
            continue;
        }
        picked.push(tuple);
        expand(
            rule,
            children,
            tuples,
            shortest,
            cap,
            used + len,
            weight + w,
            picked,
            out,
        );
        picked.pop();
    }
}

fn build_yield(rule: &McfgRule, children: &[ChildInstance], picked: &[&Vec<Word>]) -> Vec<Word> {
    let mut at: BTreeMap<(usize, usize), &Word> = BTreeMap::new();
    for (child, tuple) in children.iter().zip(picked) {
        for &(k, p, m) in &child.uses {
            at.insert((k, p), &tuple[m]);
        }
    }
    rule.rhs
        .iter()
        .enumerate()
        .map(|(k, seq)| {
            let mut s = Vec::new();
            for (p, t) in seq.iter().enumerate() {
                match t {
                    Term::Sym(sym) => s.push(sym.clone()),
                    Term::Ref(_) => s.extend(at[&(k, p)].iter().cloned()),
                }
            }
            s
        })
        .collect()
}

/// Minimum total yield length of each productive category.
fn shortest_yields(rules: &[(&McfgRule, Vec<ChildInstance>)]) -> BTreeMap<Category, usize> {
    let mut best: BTreeMap<Category, usize> = BTreeMap::new();
    loop {
        let mut changed = false;
        for (rule, children) in rules {
            let mut total = rule.terminal_count();
            let mut ok = true;
            for c in children {
                match best.get(&c.category) {
                    Some(n) => total += n,
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok && best.get(&rule.lhs).is_none_or(|&n| total < n) {
                best.insert(rule.lhs.clone(), total);
                changed = true;
            }
        }
        if !changed {
            return best;
        }
    }
}

/// Largest yield length each category may have while still fitting in a
/// start derivation of length ≤ `max_len`.
fn length_budgets(
    g: &Mcfg,
    rules: &[(&McfgRule, Vec<ChildInstance>)],
    shortest: &BTreeMap<Category, usize>,
    max_len: usize,
) -> BTreeMap<Category, usize> {
    let mut context: BTreeMap<Category, usize> = BTreeMap::new();
    if !shortest.contains_key(g.start()) {
        return BTreeMap::new();
    }
    context.insert(g.start().clone(), 0);
    loop {
        let mut changed = false;
        for (rule, children) in rules {
            let Some(&outer) = context.get(&rule.lhs) else {
                continue;
            };
            let lens: Option<Vec<usize>> = children.iter().map(|c| shortest.get(&c.category).copied()).collect();
            let Some(lens) = lens else { continue };
            let all: usize = lens.iter().sum::<usize>() + rule.terminal_count() + outer;
            for (c, own) in children.iter().zip(&lens) {
                let around = all - own;
                if context.get(&c.category).is_none_or(|&n| around < n) {
                    context.insert(c.category.clone(), around);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    context
        .into_iter()
        .filter(|(c, around)| *around <= max_len && shortest[c] + around <= max_len)
        .map(|(c, around)| (c, max_len - around))
        .collect()
}

/// One random derivation from the start category, as a string.
///
/// `pick(n)` must return an index below `n`. Up to depth `max_depth` rules are
/// chosen uniformly; deeper down only rules of minimal derivation height are
/// used, so sampling always terminates. `None` if the start is unproductive.
pub fn sample_string(g: &Mcfg, pick: &mut impl FnMut(usize) -> usize, max_depth: usize) -> Option<Word> {
    let rules: Vec<(&McfgRule, Vec<ChildInstance>)> = g.rules().iter().map(|r| (r, r.children())).collect();
    let heights = derivation_heights(&rules);
    let mut tuple = sample_tuple(&rules, &heights, g.start(), pick, max_depth, 0)?;
    Some(tuple.swap_remove(0))
}

fn rule_height(children: &[ChildInstance], heights: &BTreeMap<Category, usize>) -> Option<usize> {
    children
        .iter()
        .map(|c| heights.get(&c.category).copied())
        .try_fold(0, |m, h| h.map(|h| m.max(h)))
        .map(|m| m + 1)
}

fn derivation_heights(rules: &[(&McfgRule, Vec<ChildInstance>)]) -> BTreeMap<Category, usize> {
    let mut best: BTreeMap<Category, usize> = BTreeMap::new();
    loop {
        let mut changed = false;
        for (rule, children) in rules {
            if let Some(h) = rule_height(children, &best) {
                if best.get(&rule.lhs).is_none_or(|&old| h < old) {
                    best.insert(rule.lhs.clone(), h);
                    changed = true;
                }
            }
        }
        if !changed {
            return best;
        }
    }
}

fn sample_tuple(
    rules: &[(&McfgRule, Vec<ChildInstance>)],
    heights: &BTreeMap<Category, usize>,
    cat: &Category,
    pick: &mut impl FnMut(usize) -> usize,
    max_depth: usize,
    depth: usize,
) -> Option<Vec<Word>> {
    let target = *heights.get(cat)?;
    let options: Vec<&(&McfgRule, Vec<ChildInstance>)> = rules
        .iter()
        .filter(|(r, children)| {
            &r.lhs == cat
                && match rule_height(children, heights) {
                    Some(h) => depth < max_depth || h == target,
                    None => false,
                }
        })
        .collect();
    let (rule, children) = options[pick(options.len())];
    let mut picked = Vec::with_capacity(children.len());
    for c in children {
        picked.push(sample_tuple(rules, heights, &c.category, pick, max_depth, depth + 1)?);
    }
    let refs: Vec<&Vec<Word>> = picked.iter().collect();
    Some(build_yield(rule, children, &refs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::fixtures::*;
    use crate::grammar::fixtures::*;
    use crate::symbol::{word, Symbol};
    use alloc::vec;

    fn strings(g: &Mcfg, n: usize) -> BTreeMap<Word, Weight> {
        enumerate_strings(g, n, DEFAULT_ENUMERATION_LIMIT).unwrap()
    }

    #[test]
    fn ww_contains_fig2_derivation() {
        let l = strings(&ww(), 6);
        assert!(l.contains_key(&word("010010")));
        assert!(!l.contains_key(&word("0100")));
    }

    #[test]
    fn ww_up_to_two() {
        let l = strings(&ww(), 2);
        let expected: BTreeMap<Word, Weight> = [(word("00"), 0), (word("11"), 0)].into_iter().collect();
        assert_eq!(l, expected);
    }

    #[test]
    fn ww_counts() {
        // |{ww : 1 <= |w| <= 3}| = 2 + 4 + 8.
        assert_eq!(strings(&ww(), 6).len(), 14);
        assert_eq!(strings(&ww(), 7).len(), 14);
        assert!(strings(&ww(), 6).keys().all(|w| w[..w.len() / 2] == w[w.len() / 2..]));
    }

    #[test]
    fn weights_take_the_cheapest_derivation() {
        let g = grammar(
            "S",
            &[("S", 1), ("X", 1)],
            &[("S", &["X.0"], 1), ("S", &["a"], 5), ("X", &["a"], 2)],
        );
        assert_eq!(strings(&g, 3)[&word("a")], 3);
    }

    #[test]
    fn limit_is_enforced() {
        assert_eq!(
            enumerate_strings(&ww(), 12, 10),
            Err(EnumerationError::LimitExceeded { limit: 10 })
        );
        let a = WeightedAutomaton::universal([Symbol::new("0"), Symbol::new("1")]);
        assert!(enumerate_accepted(&a, 10, 100).is_err());
    }

    #[test]
    fn final_zero_weights() {
        let l = enumerate_accepted(&final_zero(), 2, DEFAULT_ENUMERATION_LIMIT).unwrap();
        assert_eq!(l[&word("10")], 1);
        assert_eq!(l[&word("01")], 0);
        assert_eq!(l[&word("0")], 1);
        assert!(!l.contains_key(&word("")));
        assert_eq!(l.len(), 6);
    }

    #[test]
    fn no_finals_accepts_nothing() {
        let a = WeightedAutomaton::new(1, 0, [], vec![tr(0, "a", 0, 0)]).unwrap();
        assert!(enumerate_accepted(&a, 4, 100).unwrap().is_empty());
    }

    #[test]
    fn vacuous_constraint_accepts_everything_at_zero() {
        let a = WeightedAutomaton::universal([Symbol::new("0"), Symbol::new("1")]);
        let l = enumerate_accepted(&a, 1, 100).unwrap();
        let expected: BTreeMap<Word, Weight> = [(word(""), 0), (word("0"), 0), (word("1"), 0)].into_iter().collect();
        assert_eq!(l, expected);
    }

    #[test]
    fn unbounded_context_prunes_everything() {
        // S needs at least 5 symbols; nothing fits in 4.
        let g = grammar(
            "S",
            &[("S", 1), ("N", 1)],
            &[("S", &["N.0 a a a a"], 0), ("N", &["N.0 b"], 0), ("N", &["b"], 0)],
        );
        assert!(strings(&g, 4).is_empty());
        assert_eq!(strings(&g, 6).len(), 2);
    }
}
