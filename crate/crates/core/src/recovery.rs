//! Grammar recovery: reading the intersection grammar back out of a chart.
//!
//! [`recover`] walks histories right to left from the success items and emits
//! one state-decorated CFG production per distinct right-hand side of each
//! completed item it reaches. [`recombine`] regroups those component
//! productions by their origin MCFG rule into tuple rules over decorated
//! categories such as `A(1,1)(1,2)`, and [`strip_decoration`] renames the
//! result back to plain categories.
//!
//! Recovery can follow either the minimum-weight histories `H` only (the
//! classic procedure) or every step ever proposed. The latter, followed by
//! [`prune_to_optimal`], keeps exactly the globally optimal MCFG derivations.
//! Pruning per component item, as `H` does, can lose those for tuple
//! categories, because the components of one derivation are weighed
//! separately in the chart.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::automaton::StateId;
use crate::chart::{Chart, ChartItem, HistoryEntry, ItemAddr};
use crate::grammar::{trim, Category, ComponentRef, GrammarLimits, Mcfg, McfgRule, RuleId, Term, Weight};
use crate::symbol::Symbol;

/// Default cap on distinct right-hand sides recovered for one item.
pub const DEFAULT_MAX_ALTERNATIVES: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RecoveryError {
    #[error("item {item} has more than {limit} distinct right-hand sides")]
    TooManyAlternatives { item: ItemAddr, limit: usize },
}

/// A pair of automaton states `(from, to)` bounding a component's yield.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Span {
    pub from: StateId,
    pub to: StateId,
}

impl Span {
    pub fn new(from: StateId, to: StateId) -> Self {
        Span { from, to }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.from, self.to)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum AnnotatedTerm {
    Sym(Symbol),
    Ref(ComponentRef, Span),
}

impl fmt::Display for AnnotatedTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnnotatedTerm::Sym(s) => write!(f, "{s}"),
            AnnotatedTerm::Ref(r, span) => write!(f, "{r}{span}"),
        }
    }
}

/// `A#k(i,j) → RHS`, one component of one MCFG rule over a stretch of the automaton.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct AnnotatedProduction {
    pub origin: RuleId,
    pub lhs: ComponentRef,
    pub span: Span,
    pub rhs: Vec<AnnotatedTerm>,
    /// The component rule's own weight plus the weights of the edges it scans.
    pub weight: Weight,
}

impl fmt::Display for AnnotatedProduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) {}{} ->", self.origin, self.lhs, self.span)?;
        for t in &self.rhs {
            write!(f, " {t}")?;
        }
        Ok(())
    }
}

/// Which history steps recovery follows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Histories {
    /// Only the minimum-weight steps `H`, from the minimum-weight success items.
    Optimal,
    /// Every step ever proposed, from every success item.
    All,
}

/// The output of [`recover`]: productions plus the spans of the success items.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecoveredProductions {
    pub productions: Vec<AnnotatedProduction>,
    /// Start-to-final spans of the success items recovery started from, with their weights.
    pub success: Vec<(Span, Weight)>,
}

/// Recovery from the minimum-weight histories only.
pub fn recover(chart: &Chart) -> Result<RecoveredProductions, RecoveryError> {
    recover_with(chart, Histories::Optimal, DEFAULT_MAX_ALTERNATIVES)
}

/// Recovery from every recorded step.
pub fn recover_all(chart: &Chart) -> Result<RecoveredProductions, RecoveryError> {
    recover_with(chart, Histories::All, DEFAULT_MAX_ALTERNATIVES)
}

type Prefixes = BTreeMap<Vec<AnnotatedTerm>, Weight>;

pub fn recover_with(
    chart: &Chart,
    histories: Histories,
    max_alternatives: usize,
) -> Result<RecoveredProductions, RecoveryError> {
    let roots = match histories {
        Histories::Optimal => chart.success_items(),
        Histories::All => chart.all_success_items(),
    };
    let mut walker = Walker {
        chart,
        histories,
        limit: max_alternatives,
        memo: BTreeMap::new(),
        queue: Vec::new(),
    };
    let mut success = Vec::new();
    let mut seen: BTreeSet<ItemAddr> = BTreeSet::new();
    let mut queue: alloc::collections::VecDeque<ItemAddr> = roots.iter().copied().collect();
    for &r in &roots {
        seen.insert(r);
        let it = chart.item(r);
        let span = Span::new(it.start, it.end);
        if !success.iter().any(|(s, _)| *s == span) {
            success.push((span, it.weight));
        }
    }
    let mut productions: Vec<AnnotatedProduction> = Vec::new();
    let mut index: BTreeMap<(RuleId, ComponentRef, Span, Vec<AnnotatedTerm>), usize> = BTreeMap::new();
    while let Some(addr) = queue.pop_front() {
        let it = chart.item(addr);
        let rule = chart.grammar().rule(it.production.rule);
        let span = Span::new(it.start, it.end);
        let rhss = walker.prefixes(addr)?.clone();
        for (rhs, weight) in rhss {
            let key = (it.origin, rule.lhs.clone(), span, rhs);
            match index.get(&key) {
                Some(&i) => {
                    let p = &mut productions[i];
                    p.weight = p.weight.min(weight);
                }
                None => {
                    let (origin, lhs, span, rhs) = key.clone();
                    index.insert(key, productions.len());
                    productions.push(AnnotatedProduction {
                        origin,
                        lhs,
                        span,
                        rhs,
                        weight,
                    });
                }
            }
        }
        for c in walker.queue.drain(..) {
            if seen.insert(c) {
                queue.push_back(c);
            }
        }
    }
    Ok(RecoveredProductions { productions, success })
}

struct Walker<'c, 'a> {
    chart: &'c Chart<'a>,
    histories: Histories,
    limit: usize,
    /// Distinct decorated prefixes `α` of each item, with their cheapest local weight.
    memo: BTreeMap<ItemAddr, Prefixes>,
    /// Completed items referenced by the prefixes built so far.
    queue: Vec<ItemAddr>,
}

impl Walker<'_, '_> {
    fn steps<'i>(&self, it: &'i ChartItem) -> &'i [HistoryEntry] {
        match self.histories {
            Histories::Optimal => it.history(),
            Histories::All => it.alternatives(),
        }
    }

    fn prefixes(&mut self, addr: ItemAddr) -> Result<&Prefixes, RecoveryError> {
        if !self.memo.contains_key(&addr) {
            let built = self.build(addr)?;
            self.memo.insert(addr, built);
        }
        Ok(&self.memo[&addr])
    }

    fn build(&mut self, addr: ItemAddr) -> Result<Prefixes, RecoveryError> {
        let chart = self.chart;
        let it = chart.item(addr);
        let mut out = Prefixes::new();
        if it.is_predicted() {
            out.insert(Vec::new(), chart.grammar().rule(it.production.rule).weight);
            return Ok(out);
        }
        for step in self.steps(it).to_vec() {
            let (term, extra, prev) = match step {
                HistoryEntry::Scan { source, transition } => {
                    let t = chart.automaton().transition(transition);
                    (AnnotatedTerm::Sym(t.symbol.clone()), t.weight, source)
                }
                HistoryEntry::Complete { completed, extended } => {
                    let c = chart.item(completed);
                    let lhs = chart.grammar().rule(c.production.rule).lhs.clone();
                    self.queue.push(completed);
                    (AnnotatedTerm::Ref(lhs, Span::new(c.start, c.end)), 0, extended)
                }
            };
            let before = self.prefixes(prev)?.clone();
            for (mut alpha, w) in before {
                alpha.push(term.clone());
                let w = w + extra;
                let slot = out.entry(alpha).or_insert(w);
                *slot = (*slot).min(w);
            }
            if out.len() > self.limit {
                return Err(RecoveryError::TooManyAlternatives {
                    item: addr,
                    limit: self.limit,
                });
            }
        }
        Ok(out)
    }
}

/// A decorated category's base name and the span of each component.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Decoration {
    pub base: Category,
    pub spans: Vec<Span>,
}

impl Decoration {
    /// `A(1,1)(1,2)`.
    pub fn name(&self) -> String {
        let mut s = String::from(self.base.name());
        for sp in &self.spans {
            s.push_str(&alloc::format!("{sp}"));
        }
        s
    }

    pub fn category(&self) -> Category {
        Category::new(&self.name(), self.base.arity())
    }
}

/// An MCFG over state-decorated categories.
///
/// The start category is the decorated start when recovery found a single
/// success span, and otherwise the undecorated start name with one unit rule
/// per success span.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecoveredMcfg {
    grammar: Mcfg,
    decorations: BTreeMap<String, Decoration>,
}

impl RecoveredMcfg {
    pub fn grammar(&self) -> &Mcfg {
        &self.grammar
    }

    pub fn into_grammar(self) -> Mcfg {
        self.grammar
    }

    pub fn decoration(&self, name: &str) -> Option<&Decoration> {
        self.decorations.get(name)
    }

    pub fn decorations(&self) -> impl Iterator<Item = &Decoration> {
        self.decorations.values()
    }

    /// Same decorations over a different rule set (such as a trimmed one).
    fn with_grammar(&self, grammar: Mcfg) -> RecoveredMcfg {
        let decorations = self
            .decorations
            .iter()
            .filter(|(n, _)| grammar.category(n).is_some())
            .map(|(n, d)| (n.clone(), d.clone()))
            .collect();
        RecoveredMcfg { grammar, decorations }
    }
}

/// Component productions indexed for recombination.
struct Pool<'p> {
    /// `(origin, component index, lhs span)` → productions.
    by_slot: BTreeMap<(RuleId, usize, Span), Vec<&'p AnnotatedProduction>>,
}

impl<'p> Pool<'p> {
    fn new(prods: &'p RecoveredProductions) -> Self {
        let mut by_slot: BTreeMap<(RuleId, usize, Span), Vec<&AnnotatedProduction>> = BTreeMap::new();
        for p in &prods.productions {
            by_slot.entry((p.origin, p.lhs.index, p.span)).or_default().push(p);
        }
        Pool { by_slot }
    }
}

struct Assembler<'g> {
    original: &'g Mcfg,
    decorations: BTreeMap<String, Decoration>,
    rules: Vec<McfgRule>,
    emitted: BTreeSet<(String, Vec<Vec<Term>>)>,
}

impl<'g> Assembler<'g> {
    fn new(original: &'g Mcfg) -> Self {
        Assembler {
            original,
            decorations: BTreeMap::new(),
            rules: Vec::new(),
            emitted: BTreeSet::new(),
        }
    }

    fn decorate(&mut self, base: &Category, spans: Vec<Span>) -> Category {
        let d = Decoration {
            base: base.clone(),
            spans,
        };
        let c = d.category();
        self.decorations.entry(d.name()).or_insert(d);
        c
    }

    /// Turns one production per component into a decorated tuple rule, and
    /// returns the decorated children it refers to.
    fn assemble(&mut self, parts: &[&AnnotatedProduction]) -> Vec<Decoration> {
        let lhs_base = &parts[0].lhs.category;
        let lhs = self.decorate(lhs_base, parts.iter().map(|p| p.span).collect());
        // Child instances: every arity-1 reference is its own child, all
        // references to a tuple category share one.
        let mut tuple_spans: BTreeMap<&Category, Vec<Option<Span>>> = BTreeMap::new();
        for p in parts {
            for t in &p.rhs {
                if let AnnotatedTerm::Ref(r, sp) = t {
                    if r.category.arity() > 1 {
                        let v = tuple_spans
                            .entry(&r.category)
                            .or_insert_with(|| vec![None; r.category.arity()]);
                        v[r.index] = Some(*sp);
                    }
                }
            }
        }
        let mut children = Vec::new();
        let mut tuple_cats: BTreeMap<&Category, Category> = BTreeMap::new();
        for (c, spans) in &tuple_spans {
            let spans: Vec<Span> = spans.iter().map(|s| s.expect("normal form")).collect();
            let d = Decoration {
                base: (*c).clone(),
                spans: spans.clone(),
            };
            children.push(d);
            tuple_cats.insert(c, self.decorate(c, spans));
        }
        let mut rhs = Vec::with_capacity(parts.len());
        for p in parts {
            let mut seq = Vec::with_capacity(p.rhs.len());
            for t in &p.rhs {
                seq.push(match t {
                    AnnotatedTerm::Sym(s) => Term::Sym(s.clone()),
                    AnnotatedTerm::Ref(r, sp) if r.category.arity() == 1 => {
                        children.push(Decoration {
                            base: r.category.clone(),
                            spans: vec![*sp],
                        });
                        Term::comp(&self.decorate(&r.category, vec![*sp]), 0)
                    }
                    AnnotatedTerm::Ref(r, _) => Term::comp(&tuple_cats[&r.category], r.index),
                });
            }
            rhs.push(seq);
        }
        let weight = parts.iter().map(|p| p.weight).sum();
        if self.emitted.insert((String::from(lhs.name()), rhs.clone())) {
            self.rules.push(McfgRule::new(lhs, rhs, weight));
        } else if let Some(r) = self.rules.iter_mut().find(|r| r.lhs == lhs && r.rhs == rhs) {
            r.weight = r.weight.min(weight);
        }
        children
    }

    fn finish(mut self, success: &[(Span, Weight)]) -> RecoveredMcfg {
        let start_base = self.original.start().clone();
        let start = match success {
            [(only, _)] => self.decorate(&start_base, vec![*only]),
            _ => {
                let mut units = Vec::new();
                for (sp, _) in success {
                    let c = self.decorate(&start_base, vec![*sp]);
                    units.push(McfgRule::new(start_base.clone(), vec![vec![Term::comp(&c, 0)]], 0));
                }
                self.rules.splice(0..0, units);
                start_base
            }
        };
        let grammar = Mcfg::with_categories(
            start,
            Vec::new(),
            self.rules,
            GrammarLimits {
                max_arity: self.original.max_arity().max(1),
            },
        )
        .expect("recombined rules of a valid grammar");
        RecoveredMcfg {
            grammar,
            decorations: self.decorations,
        }
    }
}

fn cartesian<'p>(slots: &[&Vec<&'p AnnotatedProduction>], mut f: impl FnMut(&[&'p AnnotatedProduction])) {
    let mut pick = vec![0usize; slots.len()];
    let mut parts: Vec<&AnnotatedProduction> = slots.iter().map(|s| s[0]).collect();
    loop {
        f(&parts);
        let mut k = slots.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            pick[k] += 1;
            if pick[k] < slots[k].len() {
                parts[k] = slots[k][pick[k]];
                break;
            }
            pick[k] = 0;
            parts[k] = slots[k][0];
        }
    }
}

/// Every combination of same-origin component productions, then trimmed.
pub fn recombine(prods: &RecoveredProductions, original: &Mcfg) -> RecoveredMcfg {
    let pool = Pool::new(prods);
    let mut asm = Assembler::new(original);
    for (id, rule) in original.rules_with_ids() {
        let arity = rule.lhs.arity();
        // All span choices per component.
        let per_component: Vec<Vec<&Vec<&AnnotatedProduction>>> = (0..arity)
            .map(|k| {
                pool.by_slot
                    .range((id, k, Span::new(0, 0))..=(id, k, Span::new(StateId::MAX, StateId::MAX)))
                    .map(|(_, v)| v)
                    .collect()
            })
            .collect();
        if per_component.iter().any(Vec::is_empty) {
            continue;
        }
        cartesian_groups(&per_component, |slots| {
            cartesian(slots, |parts| {
                asm.assemble(parts);
            })
        });
    }
    let out = asm.finish(&prods.success);
    let trimmed = trim(&out.grammar);
    out.with_grammar(trimmed)
}

fn cartesian_groups<'a, 'p>(
    groups: &'a [Vec<&'a Vec<&'p AnnotatedProduction>>],
    mut f: impl FnMut(&[&'a Vec<&'p AnnotatedProduction>]),
) {
    let mut pick = vec![0usize; groups.len()];
    let mut cur: Vec<&Vec<&AnnotatedProduction>> = groups.iter().map(|g| g[0]).collect();
    loop {
        f(&cur);
        let mut k = groups.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            pick[k] += 1;
            if pick[k] < groups[k].len() {
                cur[k] = groups[k][pick[k]];
                break;
            }
            pick[k] = 0;
            cur[k] = groups[k][0];
        }
    }
}

/// Like [`recombine`], but only builds decorated categories reachable from
/// the success spans. Same grammar after trimming, built without the
/// cross-product over unrelated spans.
pub fn recombine_reachable(prods: &RecoveredProductions, original: &Mcfg) -> RecoveredMcfg {
    let pool = Pool::new(prods);
    let mut asm = Assembler::new(original);
    let mut by_lhs: BTreeMap<&Category, Vec<RuleId>> = BTreeMap::new();
    for (id, r) in original.rules_with_ids() {
        by_lhs.entry(&r.lhs).or_default().push(id);
    }
    let mut seen: BTreeSet<Decoration> = BTreeSet::new();
    let mut todo: Vec<Decoration> = prods
        .success
        .iter()
        .map(|(sp, _)| Decoration {
            base: original.start().clone(),
            spans: vec![*sp],
        })
        .collect();
    while let Some(d) = todo.pop() {
        if !seen.insert(d.clone()) {
            continue;
        }
        for &id in by_lhs.get(&d.base).into_iter().flatten() {
            let slots: Option<Vec<&Vec<&AnnotatedProduction>>> = d
                .spans
                .iter()
                .enumerate()
                .map(|(k, sp)| pool.by_slot.get(&(id, k, *sp)))
                .collect();
            let Some(slots) = slots else { continue };
            let mut found = Vec::new();
            cartesian(&slots, |parts| found.extend(asm.assemble(parts)));
            todo.extend(found.into_iter().filter(|c| !seen.contains(c)));
        }
    }
    let out = asm.finish(&prods.success);
    let trimmed = trim(&out.grammar);
    out.with_grammar(trimmed)
}

/// Minimum derivation weight of every productive category.
pub fn inside_weights(g: &Mcfg) -> BTreeMap<Category, Weight> {
    let children: Vec<Vec<Category>> = g
        .rules()
        .iter()
        .map(|r| r.children().into_iter().map(|c| c.category).collect())
        .collect();
    let mut best: BTreeMap<Category, Weight> = BTreeMap::new();
    loop {
        let mut changed = false;
        for (rule, kids) in g.rules().iter().zip(&children) {
            let Some(w) = rule_inside(rule, kids, &best) else {
                continue;
            };
            if best.get(&rule.lhs).is_none_or(|&old| w < old) {
                best.insert(rule.lhs.clone(), w);
                changed = true;
            }
        }
        if !changed {
            return best;
        }
    }
}

fn rule_inside(rule: &McfgRule, kids: &[Category], best: &BTreeMap<Category, Weight>) -> Option<Weight> {
    kids.iter().try_fold(rule.weight, |acc, c| best.get(c).map(|w| acc + w))
}

/// Keeps only rules that occur in some minimum-weight derivation of the start
/// category, zeroes all weights, and trims.
pub fn prune_to_optimal(g: &RecoveredMcfg) -> RecoveredMcfg {
    let grammar = g.grammar();
    let inside = inside_weights(grammar);
    let Some(&best) = inside.get(grammar.start()) else {
        return g.with_grammar(Mcfg::empty(grammar.start().clone()));
    };
    let _ = best;
    let tight: Vec<McfgRule> = grammar
        .rules()
        .iter()
        .filter(|r| {
            let kids: Vec<Category> = r.children().into_iter().map(|c| c.category).collect();
            rule_inside(r, &kids, &inside) == inside.get(&r.lhs).copied()
        })
        .cloned()
        .collect();
    let kept = Mcfg::with_categories(
        grammar.start().clone(),
        Vec::new(),
        tight,
        GrammarLimits {
            max_arity: grammar.max_arity(),
        },
    )
    .expect("subset of a valid grammar");
    g.with_grammar(trim(&kept.zero_weights()))
}

/// Zeroes weights and trims, without removing any rule on weight grounds.
pub fn zero_and_trim(g: &RecoveredMcfg) -> RecoveredMcfg {
    g.with_grammar(trim(&g.grammar().zero_weights()))
}

/// Renames decorated categories to plain names.
///
/// The first decoration of each base category met (in rule order, start
/// first) takes the base name; later ones get `_2`, `_3`, … suffixes that do
/// not clash with any other name. Weights are kept.
pub fn strip_decoration(g: &RecoveredMcfg) -> Mcfg {
    let grammar = g.grammar();
    let mut order: Vec<Category> = vec![grammar.start().clone()];
    for r in grammar.rules() {
        order.push(r.lhs.clone());
        order.extend(r.refs().map(|c| c.category.clone()));
    }
    // Plain (undecorated) names are reserved up front.
    let mut used: BTreeSet<String> = grammar
        .categories()
        .filter(|c| g.decoration(c.name()).is_none())
        .map(|c| String::from(c.name()))
        .collect();
    let mut renamed: BTreeMap<Category, Category> = BTreeMap::new();
    for c in order {
        if renamed.contains_key(&c) {
            continue;
        }
        let new = match g.decoration(c.name()) {
            None => c.clone(),
            Some(d) => {
                let base = d.base.name();
                let mut name = String::from(base);
                let mut n = 2;
                while used.contains(&name) {
                    name = alloc::format!("{base}_{n}");
                    n += 1;
                }
                used.insert(name.clone());
                Category::new(&name, c.arity())
            }
        };
        renamed.insert(c, new);
    }
    let rules = grammar
        .rules()
        .iter()
        .map(|r| {
            let rhs = r
                .rhs
                .iter()
                .map(|seq| {
                    seq.iter()
                        .map(|t| match t {
                            Term::Sym(s) => Term::Sym(s.clone()),
                            Term::Ref(c) => Term::comp(&renamed[&c.category], c.index),
                        })
                        .collect()
                })
                .collect();
            McfgRule::new(renamed[&r.lhs].clone(), rhs, r.weight)
        })
        .collect();
    Mcfg::with_categories(
        renamed[grammar.start()].clone(),
        Vec::new(),
        rules,
        GrammarLimits {
            max_arity: grammar.max_arity(),
        },
    )
    .expect("renaming preserves validity")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::fixtures::*;
    use crate::automaton::WeightedAutomaton;
    use crate::chart::intersect;
    use crate::enumerate::{enumerate_accepted, enumerate_strings};
    use crate::grammar::fixtures::*;
    use crate::grammar::validate_normal_form;
    use crate::indexed::decompose;
    use crate::symbol::{word, Word};
    use alloc::string::ToString;

    fn language(g: &Mcfg, n: usize) -> BTreeSet<Word> {
        enumerate_strings(g, n, 1_000_000).unwrap().into_keys().collect()
    }

    /// Strings of `g ∩ a` up to length `n` whose combined weight is minimal.
    fn optimal(g: &Mcfg, a: &WeightedAutomaton, n: usize) -> BTreeSet<Word> {
        let l = enumerate_strings(g, n, 1_000_000).unwrap();
        let m = enumerate_accepted(a, n, 1_000_000).unwrap();
        let both: Vec<(Word, Weight)> = l
            .into_iter()
            .filter_map(|(w, gw)| m.get(&w).map(|aw| (w, gw + aw)))
            .collect();
        let best = both.iter().map(|(_, w)| *w).min();
        both.into_iter()
            .filter(|(_, w)| Some(*w) == best)
            .map(|(w, _)| w)
            .collect()
    }

    fn ends_in_one(n: usize) -> BTreeSet<Word> {
        language(&ww(), n)
            .into_iter()
            .filter(|w| w.last().unwrap().as_str() == "1")
            .collect()
    }

    #[test]
    fn worked_example_productions() {
        let g = decompose(&ww()).unwrap();
        let a = final_zero();
        let chart = intersect(&g, &a);
        let rec = recover(&chart).unwrap();
        let got: BTreeSet<String> = rec.productions.iter().map(|p| p.to_string()).collect();
        let want: BTreeSet<String> = [
            "(1) S(1,2) -> A#0(1,1) A#1(1,2)",
            "(2) A#1(1,2) -> 1",
            "(4) A#1(1,2) -> 0 A#1(1,2)",
            "(5) A#1(1,2) -> 1 A#1(1,2)",
            "(3) A#0(1,1) -> 0",
            "(4) A#0(1,1) -> 0 A#0(1,1)",
            "(5) A#0(1,1) -> 1 A#0(1,1)",
            "(2) A#0(1,1) -> 1",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        assert_eq!(got, want);
        assert_eq!(rec.productions[0].to_string(), "(1) S(1,2) -> A#0(1,1) A#1(1,2)");
        assert_eq!(rec.success, vec![(Span::new(1, 2), 0)]);
    }

    #[test]
    fn worked_example_grammar() {
        let g = decompose(&ww()).unwrap();
        let a = final_zero();
        let chart = intersect(&g, &a);
        let rec = recover(&chart).unwrap();
        let decorated = recombine(&rec, &ww());
        assert_eq!(decorated.grammar().start().name(), "S(1,2)");
        assert!(decorated.decoration("A(1,1)(1,2)").is_some());
        assert_eq!(decorated.grammar().rules().len(), 4);
        let plain = strip_decoration(&zero_and_trim(&decorated));
        let expected = grammar(
            "S",
            &[("S", 1), ("A", 2)],
            &[
                ("S", &["A.0 A.1"], 0),
                ("A", &["1", "1"], 0),
                ("A", &["0 A.0", "0 A.1"], 0),
                ("A", &["1 A.0", "1 A.1"], 0),
            ],
        );
        let as_set = |g: &Mcfg| {
            g.rules()
                .iter()
                .map(|r| alloc::format!("{r:?}"))
                .collect::<BTreeSet<_>>()
        };
        assert_eq!(as_set(&plain), as_set(&expected));
        assert_eq!(language(&plain, 8), ends_in_one(8));
    }

    #[test]
    fn exact_mode_agrees_on_the_example() {
        let g = decompose(&ww()).unwrap();
        let a = final_zero();
        let chart = intersect(&g, &a);
        let rec = recover_all(&chart).unwrap();
        let pruned = prune_to_optimal(&recombine_reachable(&rec, &ww()));
        let plain = strip_decoration(&pruned);
        assert_eq!(plain.rules().len(), 4);
        assert_eq!(language(&plain, 8), ends_in_one(8));
    }

    #[test]
    fn single_scan() {
        let g = grammar("S", &[("S", 1)], &[("S", &["a"], 0)]);
        let a = WeightedAutomaton::new(2, 0, [1], vec![tr(0, "a", 0, 1)]).unwrap();
        let cfg = decompose(&g).unwrap();
        let chart = intersect(&cfg, &a);
        let rec = recover(&chart).unwrap();
        assert_eq!(rec.productions.len(), 1);
        assert_eq!(rec.productions[0].to_string(), "(1) S(0,1) -> a");
    }

    #[test]
    fn equal_cost_paths_give_two_right_hand_sides() {
        // Two states reachable after `a` at equal cost, both continuing with `b`.
        let g = grammar("S", &[("S", 1), ("X", 1)], &[("S", &["X.0 b"], 0), ("X", &["a"], 0)]);
        let a = WeightedAutomaton::new(
            4,
            0,
            [3],
            vec![tr(0, "a", 1, 1), tr(0, "a", 1, 2), tr(1, "b", 0, 3), tr(2, "b", 0, 3)],
        )
        .unwrap();
        let cfg = decompose(&g).unwrap();
        let chart = intersect(&cfg, &a);
        let rec = recover(&chart).unwrap();
        let starts: Vec<String> = rec
            .productions
            .iter()
            .filter(|p| p.lhs.category.name() == "S")
            .map(|p| p.to_string())
            .collect();
        assert_eq!(starts.len(), 2);
        assert!(starts.contains(&"(1) S(0,3) -> X(0,1) b".to_string()));
        assert!(starts.contains(&"(1) S(0,3) -> X(0,2) b".to_string()));
        let out = strip_decoration(&zero_and_trim(&recombine(&rec, &g)));
        assert_eq!(language(&out, 4), optimal(&g, &a, 4));
    }

    #[test]
    fn arity_one_rules_pass_through() {
        let g = grammar("S", &[("S", 1), ("X", 1)], &[("S", &["X.0 X.0"], 0), ("X", &["a"], 0)]);
        let a = WeightedAutomaton::universal([Symbol::new("a")]);
        let cfg = decompose(&g).unwrap();
        let chart = intersect(&cfg, &a);
        let out = recombine(&recover(&chart).unwrap(), &g);
        assert_eq!(out.grammar().rules().len(), 2);
        assert_eq!(out.grammar().rules()[0].to_string(), "S(0,0) -> X(0,0).0 X(0,0).0");
        assert_eq!(strip_decoration(&out), g);
    }

    #[test]
    fn overlapping_spans_are_trimmed() {
        // A three-state cycle: components of A may be assigned spans that
        // never chain, which trimming removes.
        let g = grammar(
            "S",
            &[("S", 1), ("A", 2)],
            &[
                ("S", &["A.0 A.1"], 0),
                ("A", &["a", "a"], 0),
                ("A", &["a A.0", "a A.1"], 0),
            ],
        );
        let a = WeightedAutomaton::new(
            3,
            0,
            [0, 1, 2],
            vec![tr(0, "a", 0, 1), tr(1, "a", 0, 2), tr(2, "a", 0, 0)],
        )
        .unwrap();
        let cfg = decompose(&g).unwrap();
        let chart = intersect(&cfg, &a);
        let rec = recover(&chart).unwrap();
        let all = recombine(&rec, &g);
        let lazy = recombine_reachable(&rec, &g);
        assert_eq!(all.grammar().rules().len(), lazy.grammar().rules().len());
        assert_eq!(validate_normal_form(all.grammar()), Ok(()));
        assert_eq!(language(&strip_decoration(&all), 8), optimal(&g, &a, 8));
    }

    #[test]
    fn tuple_pruning_counterexample() {
        // aa and bb cost 0, ab and ba cost 1: the optimal strings are "ab"-free.
        let g = grammar(
            "S",
            &[("S", 1), ("A", 2)],
            &[("S", &["A.0 A.1"], 0), ("A", &["a", "b"], 0), ("A", &["b", "a"], 0)],
        );
        let a = WeightedAutomaton::new(
            4,
            0,
            [3],
            vec![
                tr(0, "a", 0, 1),
                tr(0, "b", 0, 2),
                tr(1, "a", 0, 3),
                tr(1, "b", 1, 3),
                tr(2, "a", 1, 3),
                tr(2, "b", 0, 3),
            ],
        )
        .unwrap();
        let cfg = decompose(&g).unwrap();
        let chart = intersect(&cfg, &a);
        // Only "ab" and "ba" are in the grammar, both at cost 1.
        let want = optimal(&g, &a, 2);
        assert_eq!(want, [word("ab"), word("ba")].into_iter().collect());
        let exact = strip_decoration(&prune_to_optimal(&recombine_reachable(
            &recover_all(&chart).unwrap(),
            &g,
        )));
        assert_eq!(language(&exact, 2), want);
        let literal = strip_decoration(&zero_and_trim(&recombine(&recover(&chart).unwrap(), &g)));
        assert!(language(&literal, 2).is_empty());
    }

    #[test]
    fn distinct_decorations_get_distinct_names() {
        // Two success spans (final states 1 and 2) force a fresh start and
        // two decorations of S.
        let g = grammar("S", &[("S", 1)], &[("S", &["a"], 0)]);
        let a = WeightedAutomaton::new(3, 0, [1, 2], vec![tr(0, "a", 0, 1), tr(0, "a", 0, 2)]).unwrap();
        let cfg = decompose(&g).unwrap();
        let chart = intersect(&cfg, &a);
        let out = recombine(&recover(&chart).unwrap(), &g);
        assert_eq!(out.grammar().start().name(), "S");
        let plain = strip_decoration(&out);
        let names: BTreeSet<&str> = plain.categories().map(|c| c.name()).collect();
        assert_eq!(names, ["S", "S_2", "S_3"].into_iter().collect());
        assert_eq!(language(&plain, 1), [word("a")].into_iter().collect());
    }

    #[test]
    fn empty_grammar_strips_to_empty() {
        let g = grammar("S", &[("S", 1)], &[("S", &["a"], 0)]);
        let a = WeightedAutomaton::new(2, 0, [1], vec![tr(0, "b", 0, 1)]).unwrap();
        let cfg = decompose(&g).unwrap();
        let chart = intersect(&cfg, &a);
        let rec = recover(&chart).unwrap();
        assert!(rec.productions.is_empty());
        let out = strip_decoration(&recombine(&rec, &g));
        assert!(out.is_empty());
    }
}
