//! Weighted Earley closure of an indexed CFG against a weighted automaton.
//!
//! Items are `(r, w, i, C → α • β, j, H)`: the originating MCFG rule, the
//! cheapest known weight, the automaton states spanned by `α`, and the set of
//! last steps (scan or complete) that reach the item at that weight. Columns
//! group items by their right state `j`, and an item's address is its column
//! plus its ordinal in creation order.
//!
//! Besides `H`, every item keeps all steps ever proposed for it. When a
//! cheaper step arrives for an existing item, the new weight is pushed to
//! every item built from it through that list, so `w` is always the minimum
//! over all known steps and `H` exactly the steps attaining it.

use alloc::collections::{BTreeMap, BinaryHeap};
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Reverse;
use core::fmt::{self, Write};

use crate::automaton::{StateId, WeightedAutomaton};
use crate::grammar::{ComponentRef, RuleId, Term, Weight};
use crate::indexed::IndexedCfg;
use crate::symbol::Symbol;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ItemAddr {
    pub column: StateId,
    pub index: u32,
}

impl ItemAddr {
    pub fn new(column: StateId, index: u32) -> Self {
        ItemAddr { column, index }
    }
}

impl fmt::Display for ItemAddr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.column, self.index)
    }
}

/// An indexed-CFG rule with a dot position in `0..=rhs.len()`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct DottedProduction {
    pub rule: usize,
    pub dot: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum HistoryEntry {
    /// Scanned `transition` from the item at `source`.
    Scan { source: ItemAddr, transition: usize },
    /// `completed` (the finished `A → γ •`) advanced `extended` (the `C → α • A β`).
    Complete { completed: ItemAddr, extended: ItemAddr },
}

impl HistoryEntry {
    /// The item one dot position to the left.
    pub fn previous(&self) -> ItemAddr {
        match *self {
            HistoryEntry::Scan { source, .. } => source,
            HistoryEntry::Complete { extended, .. } => extended,
        }
    }

    fn referenced(&self) -> impl Iterator<Item = ItemAddr> {
        let (a, b) = match *self {
            HistoryEntry::Scan { source, .. } => (source, None),
            HistoryEntry::Complete { completed, extended } => (completed, Some(extended)),
        };
        core::iter::once(a).chain(b)
    }
}

impl fmt::Display for HistoryEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HistoryEntry::Scan { source, .. } => write!(f, "s{source}"),
            HistoryEntry::Complete { completed, extended } => write!(f, "c{completed};{extended}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ChartItem {
    pub origin: RuleId,
    pub weight: Weight,
    pub start: StateId,
    pub production: DottedProduction,
    pub end: StateId,
    history: Vec<HistoryEntry>,
    alternatives: Vec<HistoryEntry>,
    dependents: Vec<ItemAddr>,
}

impl ChartItem {
    /// The steps reaching this item at its current (minimum) weight.
    pub fn history(&self) -> &[HistoryEntry] {
        &self.history
    }

    /// Every step ever proposed for this item, whatever its weight.
    pub fn alternatives(&self) -> &[HistoryEntry] {
        &self.alternatives
    }

    pub fn is_predicted(&self) -> bool {
        self.production.dot == 0
    }
}

/// Order in which the agenda hands out items.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum AgendaOrder {
    /// Most recently created first. Reproduces the item numbering of the
    /// classic worked example, so it is the default.
    #[default]
    Lifo,
    /// Cheapest first (uniform cost), newest first among equals.
    ByWeight,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
struct ItemKey {
    rule: usize,
    dot: usize,
    start: StateId,
    end: StateId,
}

enum Next<'g> {
    Done,
    Sym(&'g Symbol),
    Nt(usize),
}

enum Agenda {
    Lifo(Vec<ItemAddr>),
    ByWeight(BinaryHeap<(Reverse<Weight>, u64, ItemAddr)>, u64),
}

impl Agenda {
    fn push(&mut self, addr: ItemAddr, weight: Weight) {
        match self {
            Agenda::Lifo(stack) => stack.push(addr),
            Agenda::ByWeight(heap, seq) => {
                *seq += 1;
                heap.push((Reverse(weight), *seq, addr));
            }
        }
    }

    fn pop(&mut self) -> Option<ItemAddr> {
        match self {
            Agenda::Lifo(stack) => stack.pop(),
            Agenda::ByWeight(heap, _) => heap.pop().map(|(_, _, a)| a),
        }
    }
}

/// A closed chart together with the grammar and automaton it was built from.
pub struct Chart<'a> {
    grammar: &'a IndexedCfg,
    automaton: &'a WeightedAutomaton,
    columns: Vec<Vec<ChartItem>>,
}

/// Builds the chart for `g ∩ a` with the default agenda order.
pub fn intersect<'a>(g: &'a IndexedCfg, a: &'a WeightedAutomaton) -> Chart<'a> {
    intersect_with(g, a, AgendaOrder::default())
}

pub fn intersect_with<'a>(g: &'a IndexedCfg, a: &'a WeightedAutomaton, order: AgendaOrder) -> Chart<'a> {
    let mut b = Builder::new(g, a, order);
    b.run();
    Chart {
        grammar: g,
        automaton: a,
        columns: b.columns,
    }
}

struct Builder<'a> {
    grammar: &'a IndexedCfg,
    automaton: &'a WeightedAutomaton,
    nts: BTreeMap<&'a ComponentRef, usize>,
    nt_rules: Vec<Vec<usize>>,
    lhs: Vec<usize>,
    columns: Vec<Vec<ChartItem>>,
    keys: BTreeMap<ItemKey, ItemAddr>,
    /// Items ending at a state and waiting for a nonterminal.
    waiting: BTreeMap<(StateId, usize), Vec<ItemAddr>>,
    /// Finished items starting at a state, by left-hand side.
    finished: BTreeMap<(StateId, usize), Vec<ItemAddr>>,
    agenda: Agenda,
}

impl<'a> Builder<'a> {
    fn new(grammar: &'a IndexedCfg, automaton: &'a WeightedAutomaton, order: AgendaOrder) -> Self {
        let mut nts: BTreeMap<&ComponentRef, usize> = BTreeMap::new();
        let intern = |r: &'a ComponentRef, nts: &mut BTreeMap<&'a ComponentRef, usize>| {
            let n = nts.len();
            *nts.entry(r).or_insert(n)
        };
        intern(grammar.start(), &mut nts);
        let mut lhs = Vec::with_capacity(grammar.rules().len());
        for rule in grammar.rules() {
            lhs.push(intern(&rule.lhs, &mut nts));
            for t in &rule.rhs {
                if let Term::Ref(r) = t {
                    intern(r, &mut nts);
                }
            }
        }
        let mut nt_rules = alloc::vec![Vec::new(); nts.len()];
        for (i, &l) in lhs.iter().enumerate() {
            nt_rules[l].push(i);
        }
        Builder {
            grammar,
            automaton,
            nts,
            nt_rules,
            lhs,
            columns: (0..automaton.num_states()).map(|_| Vec::new()).collect(),
            keys: BTreeMap::new(),
            waiting: BTreeMap::new(),
            finished: BTreeMap::new(),
            agenda: match order {
                AgendaOrder::Lifo => Agenda::Lifo(Vec::new()),
                AgendaOrder::ByWeight => Agenda::ByWeight(BinaryHeap::new(), 0),
            },
        }
    }

    fn item(&self, a: ItemAddr) -> &ChartItem {
        &self.columns[a.column as usize][a.index as usize]
    }

    fn item_mut(&mut self, a: ItemAddr) -> &mut ChartItem {
        &mut self.columns[a.column as usize][a.index as usize]
    }

    fn next(&self, rule: usize, dot: usize) -> Next<'a> {
        match self.grammar.rule(rule).rhs.get(dot) {
            None => Next::Done,
            Some(Term::Sym(s)) => Next::Sym(s),
            Some(Term::Ref(r)) => Next::Nt(self.nts[r]),
        }
    }

    fn run(&mut self) {
        let s = self.automaton.start();
        let start_nt = self.nts[self.grammar.start()];
        for r in self.nt_rules[start_nt].clone() {
            self.predict(r, s);
        }
        while let Some(addr) = self.agenda.pop() {
            self.process(addr);
        }
    }

    fn process(&mut self, addr: ItemAddr) {
        let it = self.item(addr);
        let (rule, dot, i, j, w) = (it.production.rule, it.production.dot, it.start, it.end, it.weight);
        match self.next(rule, dot) {
            Next::Done => {
                let nt = self.lhs[rule];
                let waiters = self.waiting.get(&(i, nt)).cloned().unwrap_or_default();
                for x in waiters {
                    let xi = self.item(x);
                    let key = ItemKey {
                        rule: xi.production.rule,
                        dot: xi.production.dot + 1,
                        start: xi.start,
                        end: j,
                    };
                    let entry = HistoryEntry::Complete {
                        completed: addr,
                        extended: x,
                    };
                    self.propose(key, entry, w + xi.weight);
                }
            }
            Next::Sym(a) => {
                let moves: Vec<(usize, StateId, Weight)> = self
                    .automaton
                    .outgoing(j)
                    .filter(|(_, t)| &t.symbol == a)
                    .map(|(ti, t)| (ti, t.target, t.weight))
                    .collect();
                for (ti, target, tw) in moves {
                    let key = ItemKey {
                        rule,
                        dot: dot + 1,
                        start: i,
                        end: target,
                    };
                    let entry = HistoryEntry::Scan {
                        source: addr,
                        transition: ti,
                    };
                    self.propose(key, entry, w + tw);
                }
            }
            Next::Nt(b) => {
                for r in self.nt_rules[b].clone() {
                    self.predict(r, j);
                }
                let done = self.finished.get(&(j, b)).cloned().unwrap_or_default();
                for c in done {
                    let ci = self.item(c);
                    let key = ItemKey {
                        rule,
                        dot: dot + 1,
                        start: i,
                        end: ci.end,
                    };
                    let entry = HistoryEntry::Complete {
                        completed: c,
                        extended: addr,
                    };
                    self.propose(key, entry, ci.weight + w);
                }
            }
        }
    }

    fn predict(&mut self, rule: usize, at: StateId) {
        if let Some(Term::Sym(a)) = self.grammar.rule(rule).rhs.first() {
            if !self.automaton.has_transition_on(at, a) {
                return;
            }
        }
        let key = ItemKey {
            rule,
            dot: 0,
            start: at,
            end: at,
        };
        if !self.keys.contains_key(&key) {
            self.insert(key, None, self.grammar.rule(rule).weight);
        }
    }

    fn insert(&mut self, key: ItemKey, entry: Option<HistoryEntry>, weight: Weight) -> ItemAddr {
        let column = &mut self.columns[key.end as usize];
        let addr = ItemAddr::new(key.end, column.len() as u32);
        let steps: Vec<HistoryEntry> = entry.into_iter().collect();
        column.push(ChartItem {
            origin: self.grammar.rule(key.rule).origin,
            weight,
            start: key.start,
            production: DottedProduction {
                rule: key.rule,
                dot: key.dot,
            },
            end: key.end,
            history: steps.clone(),
            alternatives: steps,
            dependents: Vec::new(),
        });
        self.keys.insert(key, addr);
        match self.next(key.rule, key.dot) {
            Next::Nt(b) => self.waiting.entry((key.end, b)).or_default().push(addr),
            Next::Done => {
                let nt = self.lhs[key.rule];
                self.finished.entry((key.start, nt)).or_default().push(addr)
            }
            Next::Sym(_) => {}
        }
        if let Some(e) = entry {
            self.link(e, addr);
        }
        self.agenda.push(addr, weight);
        addr
    }

    fn link(&mut self, entry: HistoryEntry, addr: ItemAddr) {
        for r in entry.referenced() {
            let deps = &mut self.item_mut(r).dependents;
            if !deps.contains(&addr) {
                deps.push(addr);
            }
        }
    }

    fn entry_weight(&self, e: &HistoryEntry) -> Weight {
        match *e {
            HistoryEntry::Scan { source, transition } => {
                self.item(source).weight + self.automaton.transition(transition).weight
            }
            HistoryEntry::Complete { completed, extended } => self.item(completed).weight + self.item(extended).weight,
        }
    }

    /// Adds a derived candidate, applying the insert / drop / replace / tie rule.
    fn propose(&mut self, key: ItemKey, entry: HistoryEntry, weight: Weight) {
        let Some(&addr) = self.keys.get(&key) else {
            self.insert(key, Some(entry), weight);
            return;
        };
        if !self.item(addr).alternatives.contains(&entry) {
            self.item_mut(addr).alternatives.push(entry);
            self.link(entry, addr);
        }
        let it = self.item_mut(addr);
        if weight > it.weight {
            return;
        }
        if weight == it.weight {
            if !it.history.contains(&entry) {
                it.history.push(entry);
            }
            return;
        }
        it.weight = weight;
        it.history.clear();
        it.history.push(entry);
        self.lower_dependents(addr);
    }

    /// Re-relaxes everything built from `from` after its weight dropped.
    fn lower_dependents(&mut self, from: ItemAddr) {
        let mut work = alloc::vec![from];
        while let Some(x) = work.pop() {
            for d in self.item(x).dependents.clone() {
                let weights: Vec<Weight> = self.item(d).alternatives.iter().map(|e| self.entry_weight(e)).collect();
                let Some(&best) = weights.iter().min() else {
                    continue;
                };
                let it = self.item_mut(d);
                if best > it.weight {
                    continue;
                }
                let lowered = best < it.weight;
                if lowered {
                    it.weight = best;
                    it.history.retain(|_| false);
                }
                for (k, wt) in weights.iter().enumerate() {
                    let e = it.alternatives[k];
                    if *wt == best && !it.history.contains(&e) {
                        it.history.push(e);
                    }
                }
                if lowered {
                    work.push(d);
                }
            }
        }
    }
}

impl<'a> Chart<'a> {
    pub fn grammar(&self) -> &'a IndexedCfg {
        self.grammar
    }

    pub fn automaton(&self) -> &'a WeightedAutomaton {
        self.automaton
    }

    pub fn item(&self, a: ItemAddr) -> &ChartItem {
        &self.columns[a.column as usize][a.index as usize]
    }

    /// The items whose right state is `state`, in creation order.
    pub fn column(&self, state: StateId) -> &[ChartItem] {
        self.columns.get(state as usize).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn items(&self) -> impl Iterator<Item = (ItemAddr, &ChartItem)> {
        self.columns.iter().enumerate().flat_map(|(c, col)| {
            col.iter()
                .enumerate()
                .map(move |(n, it)| (ItemAddr::new(c as StateId, n as u32), it))
        })
    }

    pub fn len(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_complete(&self, it: &ChartItem) -> bool {
        it.production.dot == self.grammar.rule(it.production.rule).rhs.len()
    }

    /// Finished start-symbol items from the start state to a final state, at any weight.
    pub fn all_success_items(&self) -> Vec<ItemAddr> {
        let start = self.grammar.start();
        self.items()
            .filter(|(_, it)| {
                &self.grammar.rule(it.production.rule).lhs == start
                    && self.is_complete(it)
                    && it.start == self.automaton.start()
                    && self.automaton.is_final(it.end)
            })
            .map(|(a, _)| a)
            .collect()
    }

    /// The success items of globally minimal weight; empty when the intersection is.
    pub fn success_items(&self) -> Vec<ItemAddr> {
        let all = self.all_success_items();
        let Some(best) = all.iter().map(|&a| self.item(a).weight).min() else {
            return Vec::new();
        };
        all.into_iter().filter(|&a| self.item(a).weight == best).collect()
    }

    /// `C → α • β` with `#k` suffixes on components of tuple categories.
    pub fn production_text(&self, it: &ChartItem) -> String {
        let rule = self.grammar.rule(it.production.rule);
        let mut s = String::new();
        let _ = write!(s, "{} ->", rule.lhs);
        for (k, t) in rule.rhs.iter().enumerate() {
            if k == it.production.dot {
                s.push_str(" •");
            }
            let _ = write!(s, " {t}");
        }
        if it.production.dot == rule.rhs.len() {
            s.push_str(" •");
        }
        s
    }

    pub fn history_text(entries: &[HistoryEntry]) -> String {
        let mut s = String::from("{");
        for (k, e) in entries.iter().enumerate() {
            if k > 0 {
                s.push_str(", ");
            }
            let _ = write!(s, "{e}");
        }
        s.push('}');
        s
    }

    /// Column-by-column table `#  r  w  production  H`, tab separated.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (c, col) in self.columns.iter().enumerate() {
            if col.is_empty() {
                continue;
            }
            let _ = writeln!(out, "Column {c}");
            out.push_str("#\tr\tw\tproduction\tH\n");
            for (n, it) in col.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{n}\t{}\t{}\t{}\t{}",
                    it.origin,
                    it.weight,
                    self.production_text(it),
                    Self::history_text(&it.history)
                );
            }
        }
        out
    }
}
