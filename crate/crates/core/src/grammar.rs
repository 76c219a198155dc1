//! Multiple context-free grammars.
//!
//! A category of arity `k` derives `k`-tuples of strings. Right-hand sides are
//! written as one sequence per component of the left-hand side; a sequence
//! mixes terminals with references `A.i` to component `i` of a category `A`.
//!
//! References are read as follows: every occurrence of an arity-1 category is
//! its own child, while all component references to a category of arity > 1
//! within one rule denote a single child. The normal form checked by
//! [`validate_normal_form`] (each component of such a category used exactly
//! once) is what makes this reading unambiguous.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::symbol::Symbol;

/// Tropical weight: added along a derivation, minimised across derivations.
pub type Weight = u64;

pub const DEFAULT_MAX_ARITY: usize = 8;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Category {
    name: Arc<str>,
    arity: usize,
}

impl Category {
    pub fn new(name: &str, arity: usize) -> Self {
        Category {
            name: Arc::from(name),
            arity,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Reference to component `index` of this category.
    pub fn component(&self, index: usize) -> ComponentRef {
        ComponentRef {
            category: self.clone(),
            index,
        }
    }
}

impl fmt::Debug for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Component `index` of `category`; the nonterminals of the indexed CFG.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ComponentRef {
    pub category: Category,
    pub index: usize,
}

impl fmt::Debug for ComponentRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.category.name, self.index)
    }
}

/// `A` for arity-1 categories, `A#k` otherwise.
impl fmt::Display for ComponentRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.category.arity == 1 {
            f.write_str(&self.category.name)
        } else {
            write!(f, "{}#{}", self.category.name, self.index)
        }
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Term {
    Sym(Symbol),
    Ref(ComponentRef),
}

impl Term {
    pub fn sym(token: &str) -> Term {
        Term::Sym(Symbol::new(token))
    }

    pub fn comp(category: &Category, index: usize) -> Term {
        Term::Ref(category.component(index))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Sym(s) => write!(f, "{s}"),
            Term::Ref(r) => write!(f, "{r}"),
        }
    }
}

/// One-based rule number, in grammar order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct RuleId(pub u32);

impl RuleId {
    pub fn from_index(i: usize) -> Self {
        RuleId(i as u32 + 1)
    }

    pub fn index(self) -> usize {
        self.0 as usize - 1
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct McfgRule {
    pub lhs: Category,
    /// One sequence per component of `lhs`.
    pub rhs: Vec<Vec<Term>>,
    pub weight: Weight,
}

/// A child of a rule together with where each of its components is used.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ChildInstance {
    pub category: Category,
    /// `(lhs component, position in that sequence, child component)`.
    pub uses: Vec<(usize, usize, usize)>,
}

impl McfgRule {
    pub fn new(lhs: Category, rhs: Vec<Vec<Term>>, weight: Weight) -> Self {
        McfgRule { lhs, rhs, weight }
    }

    pub fn refs(&self) -> impl Iterator<Item = &ComponentRef> {
        self.rhs.iter().flatten().filter_map(|t| match t {
            Term::Ref(r) => Some(r),
            Term::Sym(_) => None,
        })
    }

    /// Children in order of first use.
    pub fn children(&self) -> Vec<ChildInstance> {
        let mut out: Vec<ChildInstance> = Vec::new();
        let mut grouped: BTreeMap<&Category, usize> = BTreeMap::new();
        for (k, seq) in self.rhs.iter().enumerate() {
            for (p, t) in seq.iter().enumerate() {
                let Term::Ref(r) = t else { continue };
                let slot = if r.category.arity == 1 {
                    None
                } else {
                    grouped.get(&r.category).copied()
                };
                match slot {
                    Some(i) => out[i].uses.push((k, p, r.index)),
                    None => {
                        if r.category.arity > 1 {
                            grouped.insert(&r.category, out.len());
                        }
                        out.push(ChildInstance {
                            category: r.category.clone(),
                            uses: vec![(k, p, r.index)],
                        });
                    }
                }
            }
        }
        out
    }

    pub fn terminal_count(&self) -> usize {
        self.rhs.iter().flatten().filter(|t| matches!(t, Term::Sym(_))).count()
    }
}

/// `LHS -> seq` for arity 1, `LHS -> (seq , seq)` otherwise, with `@w` when the weight is nonzero.
/// References print as `Name.k`.
impl fmt::Display for McfgRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ->", self.lhs.name)?;
        let tuple = self.rhs.len() > 1;
        if tuple {
            f.write_str(" (")?;
        }
        for (k, seq) in self.rhs.iter().enumerate() {
            if k > 0 {
                f.write_str(" ,")?;
            }
            for t in seq {
                match t {
                    Term::Sym(s) => write!(f, " {s}")?,
                    Term::Ref(r) => write!(f, " {:?}", r)?,
                }
            }
        }
        if tuple {
            f.write_str(" )")?;
        }
        if self.weight != 0 {
            write!(f, " @{}", self.weight)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GrammarError {
    #[error("start category {name} has arity {arity}, expected 1")]
    StartArity { name: String, arity: usize },
    #[error("category {name} has arity 0")]
    ZeroArity { name: String },
    #[error("category {name} has arity {arity}, above the limit of {limit}")]
    ArityLimit { name: String, arity: usize, limit: usize },
    #[error("category {name} is used with arities {first} and {second}")]
    ArityMismatch { name: String, first: usize, second: usize },
    #[error("rule {rule}: {found} components for a category of arity {expected}")]
    TupleLength {
        rule: RuleId,
        expected: usize,
        found: usize,
    },
    #[error("rule {rule}: {name}.{index} is out of range for arity {arity}")]
    ComponentOutOfRange {
        rule: RuleId,
        name: String,
        index: usize,
        arity: usize,
    },
    #[error("rule {rule}: component {component} is empty (epsilon productions are not supported)")]
    EmptyComponent { rule: RuleId, component: usize },
    #[error("{0}")]
    NotNormalForm(NormalFormReport),
}

/// Which categories a grammar may declare.
#[derive(Clone, Copy, Debug)]
pub struct GrammarLimits {
    pub max_arity: usize,
}

impl Default for GrammarLimits {
    fn default() -> Self {
        GrammarLimits {
            max_arity: DEFAULT_MAX_ARITY,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Mcfg {
    start: Category,
    categories: BTreeMap<Arc<str>, Category>,
    rules: Vec<McfgRule>,
}

impl Mcfg {
    pub fn new(start: Category, rules: Vec<McfgRule>) -> Result<Self, GrammarError> {
        Self::with_categories(start, Vec::new(), rules, GrammarLimits::default())
    }

    /// Builds a grammar that also declares `extra` categories, which may have no rules.
    pub fn with_categories(
        start: Category,
        extra: Vec<Category>,
        rules: Vec<McfgRule>,
        limits: GrammarLimits,
    ) -> Result<Self, GrammarError> {
        if start.arity != 1 {
            return Err(GrammarError::StartArity {
                name: start.name().into(),
                arity: start.arity,
            });
        }
        let mut categories: BTreeMap<Arc<str>, Category> = BTreeMap::new();
        let mut declare = |c: &Category| -> Result<(), GrammarError> {
            if c.arity == 0 {
                return Err(GrammarError::ZeroArity { name: c.name().into() });
            }
            if c.arity > limits.max_arity {
                return Err(GrammarError::ArityLimit {
                    name: c.name().into(),
                    arity: c.arity,
                    limit: limits.max_arity,
                });
            }
            match categories.get(&c.name) {
                Some(prev) if prev.arity != c.arity => Err(GrammarError::ArityMismatch {
                    name: c.name().into(),
                    first: prev.arity,
                    second: c.arity,
                }),
                Some(_) => Ok(()),
                None => {
                    categories.insert(c.name.clone(), c.clone());
                    Ok(())
                }
            }
        };
        declare(&start)?;
        for c in &extra {
            declare(c)?;
        }
        for (i, rule) in rules.iter().enumerate() {
            let id = RuleId::from_index(i);
            declare(&rule.lhs)?;
            if rule.rhs.len() != rule.lhs.arity {
                return Err(GrammarError::TupleLength {
                    rule: id,
                    expected: rule.lhs.arity,
                    found: rule.rhs.len(),
                });
            }
            for (k, seq) in rule.rhs.iter().enumerate() {
                if seq.is_empty() {
                    return Err(GrammarError::EmptyComponent { rule: id, component: k });
                }
            }
            for r in rule.refs() {
                declare(&r.category)?;
                if r.index >= r.category.arity {
                    return Err(GrammarError::ComponentOutOfRange {
                        rule: id,
                        name: r.category.name().into(),
                        index: r.index,
                        arity: r.category.arity,
                    });
                }
            }
        }
        Ok(Mcfg {
            start,
            categories,
            rules,
        })
    }

    /// The grammar of the empty language.
    pub fn empty(start: Category) -> Self {
        let mut categories = BTreeMap::new();
        categories.insert(start.name.clone(), start.clone());
        Mcfg {
            start,
            categories,
            rules: Vec::new(),
        }
    }

    pub fn start(&self) -> &Category {
        &self.start
    }

    pub fn rules(&self) -> &[McfgRule] {
        &self.rules
    }

    pub fn rule(&self, id: RuleId) -> &McfgRule {
        &self.rules[id.index()]
    }

    pub fn rules_with_ids(&self) -> impl Iterator<Item = (RuleId, &McfgRule)> {
        self.rules.iter().enumerate().map(|(i, r)| (RuleId::from_index(i), r))
    }

    pub fn categories(&self) -> impl Iterator<Item = &Category> {
        self.categories.values()
    }

    pub fn category(&self, name: &str) -> Option<&Category> {
        self.categories.get(name)
    }

    /// True when the grammar has no rules (and so derives nothing).
    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn max_arity(&self) -> usize {
        self.categories.values().map(|c| c.arity).max().unwrap_or(1)
    }

    /// Copy of this grammar with every rule weight set to zero.
    pub fn zero_weights(&self) -> Mcfg {
        let mut g = self.clone();
        for r in &mut g.rules {
            r.weight = 0;
        }
        g
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NormalFormViolation {
    pub rule: RuleId,
    pub category: Category,
    /// How often each component of `category` occurs in the rule.
    pub counts: Vec<usize>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NormalFormReport {
    pub violations: Vec<NormalFormViolation>,
}

impl fmt::Display for NormalFormReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(
                f,
                "rule {}: components of {} used {:?} times (each must be used exactly once)",
                v.rule, v.category, v.counts
            )?;
        }
        Ok(())
    }
}

/// Checks that every category of arity > 1 used in a rule has each of its
/// components referenced exactly once in that rule.
pub fn validate_normal_form(g: &Mcfg) -> Result<(), NormalFormReport> {
    let mut violations = Vec::new();
    for (id, rule) in g.rules_with_ids() {
        let mut counts: BTreeMap<&Category, Vec<usize>> = BTreeMap::new();
        for r in rule.refs().filter(|r| r.category.arity > 1) {
            counts.entry(&r.category).or_insert_with(|| vec![0; r.category.arity])[r.index] += 1;
        }
        for (cat, c) in counts {
            if c.iter().any(|&n| n != 1) {
                violations.push(NormalFormViolation {
                    rule: id,
                    category: cat.clone(),
                    counts: c,
                });
            }
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(NormalFormReport { violations })
    }
}

/// Categories that derive at least one tuple.
pub fn productive_categories(g: &Mcfg) -> BTreeSet<Category> {
    let mut productive: BTreeSet<Category> = BTreeSet::new();
    loop {
        let mut changed = false;
        for rule in g.rules() {
            if productive.contains(&rule.lhs) {
                continue;
            }
            if rule.refs().all(|r| productive.contains(&r.category)) {
                productive.insert(rule.lhs.clone());
                changed = true;
            }
        }
        if !changed {
            return productive;
        }
    }
}

/// Removes rules that cannot take part in a derivation from the start category.
///
/// Returns the empty grammar when the start category is unproductive.
pub fn trim(g: &Mcfg) -> Mcfg {
    let productive = productive_categories(g);
    if !productive.contains(g.start()) {
        return Mcfg::empty(g.start().clone());
    }
    let useful: Vec<&McfgRule> = g
        .rules()
        .iter()
        .filter(|r| r.refs().all(|c| productive.contains(&c.category)))
        .collect();
    let mut by_lhs: BTreeMap<&Category, Vec<&McfgRule>> = BTreeMap::new();
    for r in &useful {
        by_lhs.entry(&r.lhs).or_default().push(r);
    }
    let mut reachable: BTreeSet<&Category> = BTreeSet::new();
    let mut stack = vec![g.start()];
    reachable.insert(g.start());
    while let Some(c) = stack.pop() {
        for r in by_lhs.get(c).into_iter().flatten() {
            for child in r.refs() {
                if reachable.insert(&child.category) {
                    stack.push(&child.category);
                }
            }
        }
    }
    let rules: Vec<McfgRule> = useful
        .into_iter()
        .filter(|r| reachable.contains(&r.lhs))
        .cloned()
        .collect();
    let mut categories = BTreeMap::new();
    categories.insert(g.start.name.clone(), g.start.clone());
    for r in &rules {
        categories.insert(r.lhs.name.clone(), r.lhs.clone());
        for c in r.refs() {
            categories.insert(c.category.name.clone(), c.category.clone());
        }
    }
    Mcfg {
        start: g.start.clone(),
        categories,
        rules,
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn s() -> Category {
        Category::new("S", 1)
    }

    pub fn a2() -> Category {
        Category::new("A", 2)
    }

    /// The total-reduplication grammar `{ww | w ∈ {0,1}+}`, rules numbered 1..=5.
    pub fn ww() -> Mcfg {
        let (s, a) = (s(), a2());
        let r = |rhs: Vec<Vec<Term>>| McfgRule::new(a.clone(), rhs, 0);
        Mcfg::new(
            s.clone(),
            vec![
                McfgRule::new(s, vec![vec![Term::comp(&a, 0), Term::comp(&a, 1)]], 0),
                r(vec![vec![Term::sym("1")], vec![Term::sym("1")]]),
                r(vec![vec![Term::sym("0")], vec![Term::sym("0")]]),
                r(vec![
                    vec![Term::sym("0"), Term::comp(&a, 0)],
                    vec![Term::sym("0"), Term::comp(&a, 1)],
                ]),
                r(vec![
                    vec![Term::sym("1"), Term::comp(&a, 0)],
                    vec![Term::sym("1"), Term::comp(&a, 1)],
                ]),
            ],
        )
        .unwrap()
    }

    /// Single-sequence rule helper: whitespace-separated tokens, `X.k` for references.
    pub fn seq(g: &BTreeMap<&str, usize>, text: &str) -> Vec<Term> {
        text.split_whitespace()
            .map(|tok| match tok.rsplit_once('.') {
                Some((name, idx)) if g.contains_key(name) => {
                    Term::comp(&Category::new(name, g[name]), idx.parse().unwrap())
                }
                _ => Term::sym(tok),
            })
            .collect()
    }

    /// Builds a grammar from `(lhs, [components], weight)` triples; arities come from `arities`.
    pub fn grammar(start: &str, arities: &[(&str, usize)], rules: &[(&str, &[&str], Weight)]) -> Mcfg {
        let map: BTreeMap<&str, usize> = arities.iter().copied().collect();
        let rules = rules
            .iter()
            .map(|(lhs, comps, w)| {
                McfgRule::new(
                    Category::new(lhs, map[lhs]),
                    comps.iter().map(|c| seq(&map, c)).collect(),
                    *w,
                )
            })
            .collect();
        let extra = arities.iter().map(|(n, a)| Category::new(n, *a)).collect();
        Mcfg::with_categories(Category::new(start, 1), extra, rules, GrammarLimits::default()).unwrap()
    }
}
