//! Weighted finite-state acceptors over [`Symbol`]s.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::grammar::Weight;
use crate::otp::tier::TierTable;
use crate::symbol::Symbol;

pub type StateId = u32;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Transition {
    pub source: StateId,
    pub symbol: Symbol,
    pub weight: Weight,
    pub target: StateId,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum AutomatonError {
    #[error("an automaton needs at least one state")]
    NoStates,
    #[error("state {state} is out of range (the automaton has {num_states} states)")]
    StateOutOfRange { state: StateId, num_states: u32 },
    #[error("transition {index} has an empty label; epsilon transitions are not supported")]
    Epsilon { index: usize },
    #[error("symbol {symbol} of transition {index} is not in the declared alphabet")]
    NotInAlphabet { index: usize, symbol: Symbol },
}

/// `⟨Q, Σ, s, F, M⟩` with dense state ids `0..num_states`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WeightedAutomaton {
    num_states: u32,
    alphabet: Vec<Symbol>,
    start: StateId,
    finals: BTreeSet<StateId>,
    transitions: Vec<Transition>,
    outgoing: Vec<Vec<usize>>,
}

impl WeightedAutomaton {
    /// Builds an automaton whose alphabet is the set of symbols on its transitions.
    pub fn new(
        num_states: u32,
        start: StateId,
        finals: impl IntoIterator<Item = StateId>,
        transitions: Vec<Transition>,
    ) -> Result<Self, AutomatonError> {
        let alphabet = transitions.iter().map(|t| t.symbol.clone()).collect();
        Self::with_alphabet(num_states, alphabet, start, finals, transitions)
    }

    pub fn with_alphabet(
        num_states: u32,
        alphabet: BTreeSet<Symbol>,
        start: StateId,
        finals: impl IntoIterator<Item = StateId>,
        transitions: Vec<Transition>,
    ) -> Result<Self, AutomatonError> {
        if num_states == 0 {
            return Err(AutomatonError::NoStates);
        }
        let check = |state: StateId| {
            if state < num_states {
                Ok(())
            } else {
                Err(AutomatonError::StateOutOfRange { state, num_states })
            }
        };
        check(start)?;
        let finals: BTreeSet<StateId> = finals.into_iter().collect();
        for &f in &finals {
            check(f)?;
        }
        let mut outgoing = vec![Vec::new(); num_states as usize];
        for (index, t) in transitions.iter().enumerate() {
            check(t.source)?;
            check(t.target)?;
            if t.symbol.as_str().is_empty() {
                return Err(AutomatonError::Epsilon { index });
            }
            if !alphabet.contains(&t.symbol) {
                return Err(AutomatonError::NotInAlphabet {
                    index,
                    symbol: t.symbol.clone(),
                });
            }
            outgoing[t.source as usize].push(index);
        }
        Ok(WeightedAutomaton {
            num_states,
            alphabet: alphabet.into_iter().collect(),
            start,
            finals,
            transitions,
            outgoing,
        })
    }

    /// Straight-line acceptor for exactly `word`, all weights zero.
    pub fn from_word(word: &[Symbol]) -> Self {
        let transitions = word
            .iter()
            .enumerate()
            .map(|(i, s)| Transition {
                source: i as StateId,
                symbol: s.clone(),
                weight: 0,
                target: i as StateId + 1,
            })
            .collect();
        let last = word.len() as StateId;
        Self::new(last + 1, 0, [last], transitions).expect("straight-line automaton")
    }

    /// One accepting state with a zero-weight loop per symbol: accepts Σ*.
    pub fn universal(alphabet: impl IntoIterator<Item = Symbol>) -> Self {
        let alphabet: BTreeSet<Symbol> = alphabet.into_iter().collect();
        let transitions = alphabet
            .iter()
            .map(|s| Transition {
                source: 0,
                symbol: s.clone(),
                weight: 0,
                target: 0,
            })
            .collect();
        Self::with_alphabet(1, alphabet, 0, [0], transitions).expect("universal automaton")
    }

    pub fn num_states(&self) -> u32 {
        self.num_states
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        0..self.num_states
    }

    pub fn alphabet(&self) -> &[Symbol] {
        &self.alphabet
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    pub fn finals(&self) -> &BTreeSet<StateId> {
        &self.finals
    }

    pub fn is_final(&self, state: StateId) -> bool {
        self.finals.contains(&state)
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn transition(&self, index: usize) -> &Transition {
        &self.transitions[index]
    }

    /// Transitions leaving `state`, in declaration order, with their indices.
    pub fn outgoing(&self, state: StateId) -> impl Iterator<Item = (usize, &Transition)> {
        self.outgoing[state as usize]
            .iter()
            .map(move |&i| (i, &self.transitions[i]))
    }

    pub fn has_transition_on(&self, state: StateId, symbol: &Symbol) -> bool {
        self.outgoing(state).any(|(_, t)| &t.symbol == symbol)
    }

    pub fn has_nonzero_weights(&self) -> bool {
        self.transitions.iter().any(|t| t.weight != 0)
    }
}

/// Why an automaton cannot serve as a constraint.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConstraintReport {
    /// `(state, symbol)` pairs with more than one transition.
    pub nondeterministic: Vec<(StateId, Symbol)>,
    /// `(state, symbol)` pairs with no transition.
    pub missing: Vec<(StateId, Symbol)>,
    pub non_final: Vec<StateId>,
}

impl ConstraintReport {
    pub fn is_ok(&self) -> bool {
        self.nondeterministic.is_empty() && self.missing.is_empty() && self.non_final.is_empty()
    }
}

impl fmt::Display for ConstraintReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        let pairs = |v: &[(StateId, Symbol)]| {
            v.iter()
                .map(|(q, s)| alloc::format!("({q},{s})"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        if !self.nondeterministic.is_empty() {
            parts.push(alloc::format!("nondeterministic at {}", pairs(&self.nondeterministic)));
        }
        if !self.missing.is_empty() {
            parts.push(alloc::format!("missing transitions {}", pairs(&self.missing)));
        }
        if !self.non_final.is_empty() {
            parts.push(alloc::format!("non-final states {:?}", self.non_final));
        }
        f.write_str(&parts.join("; "))
    }
}

/// A constraint must be deterministic, total over its alphabet, and accept
/// every string, so every state is final.
pub fn validate_constraint(a: &WeightedAutomaton) -> Result<(), ConstraintReport> {
    let mut report = ConstraintReport::default();
    for q in a.states() {
        for s in a.alphabet() {
            match a.outgoing(q).filter(|(_, t)| &t.symbol == s).count() {
                0 => report.missing.push((q, s.clone())),
                1 => {}
                _ => report.nondeterministic.push((q, s.clone())),
            }
        }
        if !a.is_final(q) {
            report.non_final.push(q);
        }
    }
    if report.is_ok() {
        Ok(())
    } else {
        Err(report)
    }
}

/// A validated constraint with its rank label.
#[derive(Clone, Debug)]
pub struct ConstraintAutomaton {
    automaton: WeightedAutomaton,
    label: String,
}

impl ConstraintAutomaton {
    pub fn new(automaton: WeightedAutomaton, label: &str) -> Result<Self, ConstraintReport> {
        validate_constraint(&automaton)?;
        Ok(ConstraintAutomaton {
            automaton,
            label: label.into(),
        })
    }

    pub fn automaton(&self) -> &WeightedAutomaton {
        &self.automaton
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// Chain automaton spelling the table column by column, one edge per tier per slice.
pub fn from_tier_table(t: &TierTable) -> WeightedAutomaton {
    WeightedAutomaton::from_word(&t.encode())
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn tr(source: StateId, symbol: &str, weight: Weight, target: StateId) -> Transition {
        Transition {
            source,
            symbol: Symbol::new(symbol),
            weight,
            target,
        }
    }

    /// The two-state machine that weights strings ending in 0: states 1 and 2,
    /// start 1, final 2, and (nondeterministically) a cost-1 final `0`.
    pub fn final_zero() -> WeightedAutomaton {
        WeightedAutomaton::new(
            3,
            1,
            [2],
            vec![tr(1, "0", 0, 1), tr(1, "1", 0, 1), tr(1, "0", 1, 2), tr(1, "1", 0, 2)],
        )
        .unwrap()
    }

    /// Charges one per `1`.
    pub fn count_ones() -> WeightedAutomaton {
        WeightedAutomaton::new(1, 0, [0], vec![tr(0, "0", 0, 0), tr(0, "1", 1, 0)]).unwrap()
    }
}
