use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::warn;

use wmcfg::automaton_text::parse_automaton;
use wmcfg::grammar_text::{parse_grammar, write_grammar};
use wmcfg::tier_text::{parse_flat, parse_tier_table, write_tier_table};
use wmcfg_core::enumerate::{enumerate_accepted, enumerate_strings, DEFAULT_ENUMERATION_LIMIT};
use wmcfg_core::otp::eval::{eval, intersect_annotated, ConstraintRanking, PipelineError, PipelineOptions, Pruning};
use wmcfg_core::otp::redup::{gen_for_tiers, Direction};
use wmcfg_core::otp::tier::{redup_identity_check, TierInventory, TierTable};
use wmcfg_core::recovery::strip_decoration;
use wmcfg_core::symbol::render_word;
use wmcfg_core::{decompose, intersect_with, AgendaOrder, ConstraintAutomaton, Mcfg, Weight, Word};

/// Weighted MCFG and finite-state intersection, and OT evaluation.
#[derive(Parser)]
#[command(name = "wmcfg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Intersect a grammar with an automaton, keeping minimum-weight derivations.
    Intersect {
        #[arg(short, long)]
        grammar: PathBuf,
        #[arg(short, long)]
        automaton: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Keep state-pair decorations on category names.
        #[arg(long)]
        annotated: bool,
        /// Print the chart, column by column, before the grammar.
        #[arg(long)]
        dump_chart: bool,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Apply ranked constraints in order, keeping the best candidates of each.
    Eval {
        #[arg(short, long)]
        grammar: PathBuf,
        /// Constraint automata, highest ranked first.
        #[arg(short, long = "constraint")]
        constraints: Vec<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// List strings up to a length with their minimal weights.
    Enumerate {
        #[arg(short, long, conflicts_with = "automaton", required_unless_present = "automaton")]
        grammar: Option<PathBuf>,
        #[arg(short, long)]
        automaton: Option<PathBuf>,
        #[arg(long)]
        max_len: usize,
        /// Stop with an error beyond this many partial results.
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_LIMIT)]
        limit: usize,
    },
    /// Print the reduplication grammar for a list of surface tiers.
    GenRedup {
        /// Surface tier names, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        tiers: Vec<String>,
        #[arg(long, value_enum)]
        direction: DirectionArg,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Flatten a tier table to a string, one mark per tier and slice.
    Encode {
        /// Tier table file; `-` reads standard input.
        #[arg(default_value = "-")]
        table: PathBuf,
    },
    /// Read a flat string back into a tier table.
    Decode {
        /// Surface tier names of a reduplicative layout, comma separated.
        #[arg(
            long,
            value_delimiter = ',',
            conflicts_with = "plain",
            required_unless_present = "plain"
        )]
        tiers: Vec<String>,
        /// Tier names of a plain layout, comma separated.
        #[arg(long, value_delimiter = ',')]
        plain: Vec<String>,
        /// Also report whether the reduplicant copies the base.
        #[arg(long)]
        check_identity: bool,
        /// File holding the string; `-` reads standard input.
        #[arg(default_value = "-")]
        input: PathBuf,
    },
}

#[derive(Args)]
struct PipelineArgs {
    /// Prune from the minimum-weight chart histories only. Faster, but can
    /// lose optimal candidates when tuple components are weighed apart.
    #[arg(long)]
    chart_pruning: bool,
    #[arg(long, value_enum, default_value_t = AgendaArg::Lifo)]
    agenda: AgendaArg,
}

impl PipelineArgs {
    fn options(&self) -> PipelineOptions {
        PipelineOptions {
            pruning: if self.chart_pruning {
                Pruning::Chart
            } else {
                Pruning::Derivation
            },
            agenda: match self.agenda {
                AgendaArg::Lifo => AgendaOrder::Lifo,
                AgendaArg::Weight => AgendaOrder::ByWeight,
            },
            ..PipelineOptions::default()
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AgendaArg {
    Lifo,
    Weight,
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    RedFirst,
    BaseFirst,
}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).context("reading standard input")?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn load_grammar(path: &Path) -> Result<Mcfg> {
    parse_grammar(&read_input(path)?).with_context(|| format!("in grammar {}", path.display()))
}

fn load_automaton(path: &Path) -> Result<wmcfg_core::WeightedAutomaton> {
    parse_automaton(&read_input(path)?).with_context(|| format!("in automaton {}", path.display()))
}

fn print_weighted(words: impl IntoIterator<Item = (Word, Weight)>) -> String {
    words
        .into_iter()
        .map(|(w, weight)| format!("{}\t{weight}\n", render_word(&w)))
        .collect()
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Intersect {
            grammar,
            automaton,
            output,
            annotated,
            dump_chart,
            pipeline,
        } => {
            let g = load_grammar(&grammar)?;
            let a = load_automaton(&automaton)?;
            let opts = pipeline.options();
            if dump_chart {
                let cfg = decompose(&g)?;
                let chart = intersect_with(&cfg, &a, opts.agenda);
                io::stdout().write_all(chart.dump().as_bytes())?;
            }
            let out = match intersect_annotated(&g, &a, &opts)? {
                Some(r) if annotated => r.into_grammar(),
                Some(r) => strip_decoration(&r),
                None => Mcfg::empty(g.start().clone()),
            };
            write_output(output.as_deref(), &write_grammar(&out))
        }
        Command::Eval {
            grammar,
            constraints,
            output,
            pipeline,
        } => {
            let g = load_grammar(&grammar)?;
            let mut ranked = Vec::new();
            for path in &constraints {
                let a = load_automaton(path)?;
                let label = path
                    .file_stem()
                    .map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
                if let Err(report) = ConstraintAutomaton::new(a.clone(), &label) {
                    warn!("{label} is not a well-formed constraint ({report}); applying it anyway");
                }
                ranked.push((a, label));
            }
            let out = match eval(&g, &ConstraintRanking::permissive(ranked), &pipeline.options()) {
                Ok(m) => m,
                Err(PipelineError::EmptyCandidateSet { stage, label }) => {
                    warn!("no candidate survives constraint {stage} ({label})");
                    Mcfg::empty(g.start().clone())
                }
                Err(e) => return Err(e.into()),
            };
            write_output(output.as_deref(), &write_grammar(&out))
        }
        Command::Enumerate {
            grammar,
            automaton,
            max_len,
            limit,
        } => {
            let text = match (grammar, automaton) {
                (Some(g), _) => print_weighted(enumerate_strings(&load_grammar(&g)?, max_len, limit)?),
                (None, Some(a)) => print_weighted(enumerate_accepted(&load_automaton(&a)?, max_len, limit)?),
                (None, None) => bail!("give --grammar or --automaton"),
            };
            write_output(None, &text)
        }
        Command::GenRedup {
            tiers,
            direction,
            output,
        } => {
            TierInventory::reduplicative(&tiers)?;
            let dir = match direction {
                DirectionArg::RedFirst => Direction::ReduplicantFirst,
                DirectionArg::BaseFirst => Direction::BaseFirst,
            };
            write_output(output.as_deref(), &write_grammar(&gen_for_tiers(tiers.len(), dir)?))
        }
        Command::Encode { table } => {
            let t =
                parse_tier_table(&read_input(&table)?).with_context(|| format!("in tier table {}", table.display()))?;
            for e in t.bracket_errors() {
                warn!("{e}");
            }
            write_output(None, &format!("{}\n", render_word(&t.encode())))
        }
        Command::Decode {
            tiers,
            plain,
            check_identity,
            input,
        } => {
            let inventory = if plain.is_empty() {
                TierInventory::reduplicative(&tiers)?
            } else {
                TierInventory::plain(&plain)?
            };
            let t = TierTable::decode(&parse_flat(&read_input(&input)?), inventory)?;
            for e in t.bracket_errors() {
                warn!("{e}");
            }
            write_output(None, &write_tier_table(&t))?;
            if check_identity {
                match redup_identity_check(&t) {
                    Ok(()) => eprintln!("identity: ok"),
                    Err(e) => eprintln!("identity: {e}"),
                }
            }
            Ok(())
        }
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(2);
    }
}
