//! Eval: intersect the candidate set with each constraint in rank order,
//! keeping only the candidates of minimal violation at every step.

use alloc::string::String;
use alloc::vec::Vec;

use log::{debug, warn};
use thiserror::Error;

use crate::automaton::{ConstraintAutomaton, Transition, WeightedAutomaton};
use crate::chart::{intersect_with, AgendaOrder};
use crate::grammar::{GrammarError, Mcfg};
use crate::indexed::decompose;
use crate::recovery::{
    prune_to_optimal, recombine, recombine_reachable, recover_with, strip_decoration, zero_and_trim, Histories,
    RecoveredMcfg, RecoveryError, DEFAULT_MAX_ALTERNATIVES,
};

/// How non-optimal derivations are removed after an intersection.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Pruning {
    /// Recover every recorded derivation step, then keep the rules of
    /// minimum-weight derivations of the decorated grammar. Exact for tuple
    /// categories.
    #[default]
    Derivation,
    /// Recover from the minimum-weight chart histories only. Matches the
    /// classic procedure; can drop optimal derivations of tuple categories
    /// whose components are weighed separately.
    Chart,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PipelineOptions {
    pub pruning: Pruning,
    pub agenda: AgendaOrder,
    pub max_alternatives: usize,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            pruning: Pruning::default(),
            agenda: AgendaOrder::default(),
            max_alternatives: DEFAULT_MAX_ALTERNATIVES,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error(transparent)]
    Recovery(#[from] RecoveryError),
    /// No candidate survived an intersection. `stage` counts from 1 in rank order.
    #[error("no candidate survives intersection {stage} ({label})")]
    EmptyCandidateSet { stage: usize, label: String },
}

/// `g ∩ a` keeping only minimum-weight derivations, with state decorations.
///
/// Returns `None` when the intersection is empty.
pub fn intersect_annotated(
    g: &Mcfg,
    a: &WeightedAutomaton,
    opts: &PipelineOptions,
) -> Result<Option<RecoveredMcfg>, PipelineError> {
    let cfg = decompose(g)?;
    let chart = intersect_with(&cfg, a, opts.agenda);
    debug!("chart has {} items", chart.len());
    if chart.success_items().is_empty() {
        return Ok(None);
    }
    let out = match opts.pruning {
        Pruning::Derivation => {
            let prods = recover_with(&chart, Histories::All, opts.max_alternatives)?;
            prune_to_optimal(&recombine_reachable(&prods, g))
        }
        Pruning::Chart => {
            let prods = recover_with(&chart, Histories::Optimal, opts.max_alternatives)?;
            zero_and_trim(&recombine(&prods, g))
        }
    };
    if out.grammar().is_empty() {
        return Ok(None);
    }
    Ok(Some(out))
}

/// `g ∩ a` with only optimal candidates kept, weights zeroed, as a plain grammar.
pub fn intersect_grammar(g: &Mcfg, a: &WeightedAutomaton, opts: &PipelineOptions) -> Result<Mcfg, PipelineError> {
    match intersect_annotated(g, a, opts)? {
        Some(r) => Ok(strip_decoration(&r)),
        None => Err(PipelineError::EmptyCandidateSet {
            stage: 1,
            label: String::from("intersection"),
        }),
    }
}

/// Restricts candidates to those spelled by `input`, ignoring all weights.
pub fn intersect_input(g: &Mcfg, input: &WeightedAutomaton, opts: &PipelineOptions) -> Result<Mcfg, PipelineError> {
    if input.has_nonzero_weights() {
        warn!("input automaton has nonzero weights; they are ignored");
    }
    let flat = zero_automaton(input);
    intersect_grammar(&g.zero_weights(), &flat, opts).map_err(|e| match e {
        PipelineError::EmptyCandidateSet { stage, .. } => PipelineError::EmptyCandidateSet {
            stage,
            label: String::from("input"),
        },
        other => other,
    })
}

fn zero_automaton(a: &WeightedAutomaton) -> WeightedAutomaton {
    let transitions: Vec<Transition> = a
        .transitions()
        .iter()
        .map(|t| Transition { weight: 0, ..t.clone() })
        .collect();
    WeightedAutomaton::with_alphabet(
        a.num_states(),
        a.alphabet().iter().cloned().collect(),
        a.start(),
        a.finals().iter().copied(),
        transitions,
    )
    .expect("same shape as a valid automaton")
}

/// Constraints, highest ranked first.
#[derive(Clone, Debug, Default)]
pub struct ConstraintRanking {
    constraints: Vec<(WeightedAutomaton, String)>,
}

impl ConstraintRanking {
    pub fn new(constraints: Vec<ConstraintAutomaton>) -> Self {
        ConstraintRanking {
            constraints: constraints
                .into_iter()
                .map(|c| (c.automaton().clone(), String::from(c.label())))
                .collect(),
        }
    }

    /// Accepts automata that fail constraint validation (not deterministic,
    /// not total, or with non-final states). Eval still works on them, but a
    /// constraint that rejects some candidate outright acts as a filter.
    pub fn permissive(constraints: Vec<(WeightedAutomaton, String)>) -> Self {
        ConstraintRanking { constraints }
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&WeightedAutomaton, &str)> {
        self.constraints.iter().map(|(a, l)| (a, l.as_str()))
    }
}

/// Folds the candidates through every constraint in rank order.
pub fn eval(candidates: &Mcfg, ranking: &ConstraintRanking, opts: &PipelineOptions) -> Result<Mcfg, PipelineError> {
    let mut current = candidates.clone();
    for (n, (a, label)) in ranking.iter().enumerate() {
        debug!("eval stage {}: {} rules against {label}", n + 1, current.rules().len());
        current = match intersect_annotated(&current, a, opts)? {
            Some(r) => strip_decoration(&r),
            None => {
                return Err(PipelineError::EmptyCandidateSet {
                    stage: n + 1,
                    label: String::from(label),
                })
            }
        };
    }
    Ok(current)
}
