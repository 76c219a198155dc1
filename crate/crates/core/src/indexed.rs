//! The indexed CFG: each MCFG rule split into one CFG rule per component,
//! every piece remembering the MCFG rule it came from.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use crate::grammar::{validate_normal_form, ComponentRef, GrammarError, Mcfg, McfgRule, RuleId, Term, Weight};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IndexedRule {
    pub origin: RuleId,
    pub lhs: ComponentRef,
    pub rhs: Vec<Term>,
    /// Component 0 carries the whole MCFG rule weight, the others carry 0.
    pub weight: Weight,
}

impl fmt::Display for IndexedRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) {} ->", self.origin, self.lhs)?;
        for t in &self.rhs {
            write!(f, " {t}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct IndexedCfg {
    source: Mcfg,
    start: ComponentRef,
    rules: Vec<IndexedRule>,
    by_lhs: BTreeMap<ComponentRef, Vec<usize>>,
    /// `pieces[origin.index()][k]` is the index of component `k` of that MCFG rule.
    pieces: Vec<Vec<usize>>,
}

/// Splits every rule of a normal-form MCFG into per-component CFG rules.
pub fn decompose(g: &Mcfg) -> Result<IndexedCfg, GrammarError> {
    validate_normal_form(g).map_err(GrammarError::NotNormalForm)?;
    let mut rules = Vec::new();
    let mut by_lhs: BTreeMap<ComponentRef, Vec<usize>> = BTreeMap::new();
    let mut pieces = Vec::with_capacity(g.rules().len());
    for (id, rule) in g.rules_with_ids() {
        let mut mine = Vec::with_capacity(rule.rhs.len());
        for (k, seq) in rule.rhs.iter().enumerate() {
            let lhs = rule.lhs.component(k);
            by_lhs.entry(lhs.clone()).or_default().push(rules.len());
            mine.push(rules.len());
            rules.push(IndexedRule {
                origin: id,
                lhs,
                rhs: seq.clone(),
                weight: if k == 0 { rule.weight } else { 0 },
            });
        }
        pieces.push(mine);
    }
    Ok(IndexedCfg {
        source: g.clone(),
        start: g.start().component(0),
        rules,
        by_lhs,
        pieces,
    })
}

impl IndexedCfg {
    /// The MCFG this was decomposed from.
    pub fn source(&self) -> &Mcfg {
        &self.source
    }

    pub fn start(&self) -> &ComponentRef {
        &self.start
    }

    pub fn rules(&self) -> &[IndexedRule] {
        &self.rules
    }

    pub fn rule(&self, index: usize) -> &IndexedRule {
        &self.rules[index]
    }

    /// Indices of the rules rewriting `lhs`, in grammar order.
    pub fn rules_for(&self, lhs: &ComponentRef) -> &[usize] {
        self.by_lhs.get(lhs).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Indices of the component rules of one MCFG rule, by component.
    pub fn pieces_of(&self, origin: RuleId) -> &[usize] {
        &self.pieces[origin.index()]
    }

    /// Reassembles the MCFG by grouping component rules on their origin.
    pub fn recombine(&self) -> Mcfg {
        let mut groups: BTreeMap<RuleId, Vec<&IndexedRule>> = BTreeMap::new();
        for r in &self.rules {
            groups.entry(r.origin).or_default().push(r);
        }
        let rules = groups
            .into_values()
            .map(|mut parts| {
                parts.sort_by_key(|p| p.lhs.index);
                McfgRule::new(
                    parts[0].lhs.category.clone(),
                    parts.iter().map(|p| p.rhs.clone()).collect(),
                    parts.iter().map(|p| p.weight).sum(),
                )
            })
            .collect();
        Mcfg::with_categories(
            self.start.category.clone(),
            self.source.categories().cloned().collect(),
            rules,
            Default::default(),
        )
        .expect("recombined pieces of a valid grammar")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::fixtures::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn shown(cfg: &IndexedCfg) -> Vec<alloc::string::String> {
        cfg.rules().iter().map(|r| r.to_string()).collect()
    }

    #[test]
    fn ww_decomposes_into_the_component_grammar() {
        let cfg = decompose(&ww()).unwrap();
        assert_eq!(
            shown(&cfg),
            vec![
                "(1) S -> A#0 A#1",
                "(2) A#0 -> 1",
                "(2) A#1 -> 1",
                "(3) A#0 -> 0",
                "(3) A#1 -> 0",
                "(4) A#0 -> 0 A#0",
                "(4) A#1 -> 0 A#1",
                "(5) A#0 -> 1 A#0",
                "(5) A#1 -> 1 A#1",
            ]
        );
        assert_eq!(cfg.rules_for(&a2().component(1)).len(), 4);
        assert_eq!(cfg.pieces_of(RuleId(4)), &[5, 6]);
    }

    #[test]
    fn pair_rule_splits_with_shared_origin() {
        let g = grammar(
            "S",
            &[("S", 1), ("B", 2)],
            &[("S", &["B.0 B.1"], 0), ("B", &["0", "1"], 0)],
        );
        let cfg = decompose(&g).unwrap();
        let b: Vec<_> = cfg.rules().iter().filter(|r| r.origin == RuleId(2)).collect();
        assert_eq!(b.len(), 2);
        assert_eq!(b[0].to_string(), "(2) B#0 -> 0");
        assert_eq!(b[1].to_string(), "(2) B#1 -> 1");
    }

    #[test]
    fn arity_one_rule_is_unchanged() {
        let g = grammar(
            "S",
            &[("S", 1), ("A", 2)],
            &[("S", &["A.0 A.1"], 0), ("A", &["a", "b"], 0)],
        );
        let cfg = decompose(&g).unwrap();
        assert_eq!(cfg.rules()[0].rhs, g.rules()[0].rhs[0]);
    }

    #[test]
    fn weight_goes_to_component_zero() {
        let g = grammar(
            "S",
            &[("S", 1), ("A", 2)],
            &[("S", &["A.0 A.1"], 2), ("A", &["a", "b"], 7)],
        );
        let cfg = decompose(&g).unwrap();
        let ws: Vec<_> = cfg.rules().iter().map(|r| r.weight).collect();
        assert_eq!(ws, vec![2, 7, 0]);
    }

    #[test]
    fn non_normal_form_is_rejected() {
        let g = grammar(
            "S",
            &[("S", 1), ("A", 2)],
            &[("S", &["A.0 A.0"], 0), ("A", &["a", "b"], 0)],
        );
        assert!(matches!(decompose(&g), Err(GrammarError::NotNormalForm(_))));
    }

    #[test]
    fn recombine_inverts_decompose() {
        let g = ww();
        assert_eq!(decompose(&g).unwrap().recombine(), g);
    }
}
