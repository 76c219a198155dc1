//! Random small grammars and automata, and a brute-force intersection oracle.
//! Shared by the property tests of both crates.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use wmcfg_core::automaton::Transition;
use wmcfg_core::enumerate::{enumerate_accepted, enumerate_strings};
use wmcfg_core::grammar::GrammarLimits;
use wmcfg_core::symbol::Word;
use wmcfg_core::{Category, Mcfg, McfgRule, StateId, Symbol, Term, Weight, WeightedAutomaton};

pub const ALPHABET: [&str; 3] = ["a", "b", "c"];

/// Normal-form grammar over categories S/1, X/1 and P/2, with at most
/// `max_rules` rules, components of 1..=3 items, and weights 0..=2.
pub fn random_grammar(rng: &mut impl Rng, max_rules: usize, alphabet: usize) -> Mcfg {
    random_grammar_with(rng, max_rules, alphabet, true)
}

/// As [`random_grammar`]; without `tuples` only S and X occur (a CFG).
pub fn random_grammar_with(rng: &mut impl Rng, max_rules: usize, alphabet: usize, tuples: bool) -> Mcfg {
    let s = Category::new("S", 1);
    let x = Category::new("X", 1);
    let p = Category::new("P", 2);
    let cats: Vec<Category> = if tuples {
        vec![s.clone(), x.clone(), p.clone()]
    } else {
        vec![s.clone(), x.clone()]
    };
    let singles = [s.clone(), x.clone()];
    let n = rng.gen_range(1..=max_rules);
    let mut rules = Vec::with_capacity(n);
    for i in 0..n {
        let lhs = if i == 0 {
            s.clone()
        } else {
            cats[rng.gen_range(0..cats.len())].clone()
        };
        let lens: Vec<usize> = (0..lhs.arity()).map(|_| rng.gen_range(1..=3)).collect();
        let mut slots: Vec<(usize, usize)> = Vec::new();
        for (k, &l) in lens.iter().enumerate() {
            slots.extend((0..l).map(|q| (k, q)));
        }
        let mut rhs: Vec<Vec<Option<Term>>> = lens.iter().map(|&l| vec![None; l]).collect();
        if tuples && slots.len() >= 2 && rng.gen_bool(0.35) {
            let a = rng.gen_range(0..slots.len());
            let mut b = rng.gen_range(0..slots.len() - 1);
            if b >= a {
                b += 1;
            }
            rhs[slots[a].0][slots[a].1] = Some(Term::comp(&p, 0));
            rhs[slots[b].0][slots[b].1] = Some(Term::comp(&p, 1));
        }
        let rhs: Vec<Vec<Term>> = rhs
            .into_iter()
            .map(|seq| {
                seq.into_iter()
                    .map(|t| {
                        t.unwrap_or_else(|| {
                            if rng.gen_bool(0.65) {
                                Term::sym(ALPHABET[rng.gen_range(0..alphabet)])
                            } else {
                                Term::comp(&singles[rng.gen_range(0..2)], 0)
                            }
                        })
                    })
                    .collect()
            })
            .collect();
        let weight = if rng.gen_bool(0.7) { 0 } else { rng.gen_range(1..=2) };
        rules.push(McfgRule::new(lhs, rhs, weight));
    }
    Mcfg::with_categories(s, vec![x, p], rules, GrammarLimits::default()).expect("generated grammar is valid")
}

/// Automaton with 1..=4 states, edge weights 0..=3, possibly nondeterministic.
pub fn random_automaton(rng: &mut impl Rng, alphabet: usize) -> WeightedAutomaton {
    let n: u32 = rng.gen_range(1..=4);
    let mut transitions = Vec::new();
    for q in 0..n {
        for sym in &ALPHABET[..alphabet] {
            let edges = match rng.gen_range(0..10) {
                0..=2 => 0,
                3..=8 => 1,
                _ => 2,
            };
            for _ in 0..edges {
                transitions.push(Transition {
                    source: q,
                    symbol: Symbol::new(sym),
                    weight: rng.gen_range(0..=3),
                    target: rng.gen_range(0..n),
                });
            }
        }
    }
    let finals: Vec<StateId> = (0..n).filter(|_| rng.gen_bool(0.6)).collect();
    let alphabet: BTreeSet<Symbol> = ALPHABET[..alphabet].iter().map(|s| Symbol::new(s)).collect();
    WeightedAutomaton::with_alphabet(n, alphabet, 0, finals, transitions).expect("generated automaton is valid")
}

/// Deterministic, complete and all-final: a well-formed constraint.
pub fn random_constraint(rng: &mut impl Rng, alphabet: usize) -> WeightedAutomaton {
    let n: u32 = rng.gen_range(1..=4);
    let mut transitions = Vec::new();
    for q in 0..n {
        for sym in &ALPHABET[..alphabet] {
            transitions.push(Transition {
                source: q,
                symbol: Symbol::new(sym),
                weight: rng.gen_range(0..=3),
                target: rng.gen_range(0..n),
            });
        }
    }
    WeightedAutomaton::new(n, 0, 0..n, transitions).expect("generated constraint is valid")
}

type Spans = Vec<(StateId, StateId)>;

/// Minimum of grammar weight plus path weight over every string of `g ∩ a`,
/// by a fixpoint over categories annotated with one state pair per component.
pub fn intersection_minimum(g: &Mcfg, a: &WeightedAutomaton) -> Option<Weight> {
    let mut best: BTreeMap<(Category, Spans), Weight> = BTreeMap::new();
    // Cheapest edge per (state, symbol, target).
    let mut edges: BTreeMap<(StateId, Symbol), BTreeMap<StateId, Weight>> = BTreeMap::new();
    for t in a.transitions() {
        let e = edges.entry((t.source, t.symbol.clone())).or_default();
        let w = e.entry(t.target).or_insert(t.weight);
        *w = (*w).min(t.weight);
    }
    loop {
        let mut found: Vec<((Category, Spans), Weight)> = Vec::new();
        for rule in g.rules() {
            let mut out = Vec::new();
            let mut spans = Vec::new();
            let mut chosen = BTreeMap::new();
            assign(
                rule,
                0,
                a,
                &edges,
                &best,
                &mut chosen,
                &mut spans,
                rule.weight,
                &mut out,
            );
            for (sp, w) in out {
                found.push(((rule.lhs.clone(), sp), w));
            }
        }
        let mut changed = false;
        for (k, w) in found {
            let slot = best.entry(k).or_insert(Weight::MAX);
            if w < *slot {
                *slot = w;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    best.iter()
        .filter(|((c, sp), _)| c == g.start() && sp[0].0 == a.start() && a.is_final(sp[0].1))
        .map(|(_, w)| *w)
        .min()
}

/// Enumerates state assignments for components `k..` of `rule`.
#[allow(clippy::too_many_arguments)]
fn assign(
    rule: &McfgRule,
    k: usize,
    a: &WeightedAutomaton,
    edges: &BTreeMap<(StateId, Symbol), BTreeMap<StateId, Weight>>,
    best: &BTreeMap<(Category, Spans), Weight>,
    chosen: &mut BTreeMap<Category, Spans>,
    spans: &mut Spans,
    weight: Weight,
    out: &mut Vec<(Spans, Weight)>,
) {
    if k == rule.rhs.len() {
        out.push((spans.clone(), weight));
        return;
    }
    for q in a.states() {
        walk(rule, k, 0, q, q, a, edges, best, chosen, spans, weight, out);
    }
}

#[allow(clippy::too_many_arguments)]
fn walk(
    rule: &McfgRule,
    k: usize,
    pos: usize,
    from: StateId,
    q: StateId,
    a: &WeightedAutomaton,
    edges: &BTreeMap<(StateId, Symbol), BTreeMap<StateId, Weight>>,
    best: &BTreeMap<(Category, Spans), Weight>,
    chosen: &mut BTreeMap<Category, Spans>,
    spans: &mut Spans,
    weight: Weight,
    out: &mut Vec<(Spans, Weight)>,
) {
    let seq = &rule.rhs[k];
    if pos == seq.len() {
        spans.push((from, q));
        assign(rule, k + 1, a, edges, best, chosen, spans, weight, out);
        spans.pop();
        return;
    }
    match &seq[pos] {
        Term::Sym(s) => {
            if let Some(next) = edges.get(&(q, s.clone())) {
                for (&t, &w) in next {
                    walk(
                        rule,
                        k,
                        pos + 1,
                        from,
                        t,
                        a,
                        edges,
                        best,
                        chosen,
                        spans,
                        weight + w,
                        out,
                    );
                }
            }
        }
        Term::Ref(r) if r.category.arity() == 1 => {
            let c = r.category.clone();
            let options: Vec<(StateId, Weight)> = best
                .iter()
                .filter(|((bc, sp), _)| *bc == c && sp[0].0 == q)
                .map(|((_, sp), w)| (sp[0].1, *w))
                .collect();
            for (t, w) in options {
                walk(
                    rule,
                    k,
                    pos + 1,
                    from,
                    t,
                    a,
                    edges,
                    best,
                    chosen,
                    spans,
                    weight + w,
                    out,
                );
            }
        }
        Term::Ref(r) => {
            if let Some(sp) = chosen.get(&r.category) {
                let (s0, t) = sp[r.index];
                if s0 == q {
                    walk(rule, k, pos + 1, from, t, a, edges, best, chosen, spans, weight, out);
                }
                return;
            }
            let options: Vec<(Spans, Weight)> = best
                .iter()
                .filter(|((bc, sp), _)| *bc == r.category && sp[r.index].0 == q)
                .map(|((_, sp), w)| (sp.clone(), *w))
                .collect();
            for (sp, w) in options {
                let t = sp[r.index].1;
                chosen.insert(r.category.clone(), sp);
                walk(
                    rule,
                    k,
                    pos + 1,
                    from,
                    t,
                    a,
                    edges,
                    best,
                    chosen,
                    spans,
                    weight + w,
                    out,
                );
                chosen.remove(&r.category);
            }
        }
    }
}

/// Strings of length ≤ `n` whose combined weight equals the global minimum of `g ∩ a`.
pub fn optimal_strings(g: &Mcfg, a: &WeightedAutomaton, n: usize) -> BTreeSet<Word> {
    let Some(min) = intersection_minimum(g, a) else {
        return BTreeSet::new();
    };
    let l = enumerate_strings(g, n, 1_000_000).expect("grammar enumeration");
    let m = enumerate_accepted(a, n, 1_000_000).expect("automaton enumeration");
    l.into_iter()
        .filter(|(w, gw)| m.get(w).is_some_and(|aw| gw + aw == min))
        .map(|(w, _)| w)
        .collect()
}

pub fn language(g: &Mcfg, n: usize) -> BTreeSet<Word> {
    enumerate_strings(g, n, 1_000_000)
        .expect("grammar enumeration")
        .into_keys()
        .collect()
}
