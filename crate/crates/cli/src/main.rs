//! `nomlearn`: membership, universality, anchoring, orbit counting and
//! learning for nominal automata.
//!
//! Exit codes: 0 accept/yes/learned, 1 reject/no/diverged, 2 usage or input
//! error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use nomlearn::automaton::{
    anchor, anchor_top, bounded_universality_counterexample, is_universal_residual, parse,
    Simulator,
};
use nomlearn::learner::{learn, Budget, Outcome};
use nomlearn::orbits::{count_partial_permutations, orbit_counts_by_length};
use nomlearn::teacher::{Language, Teacher};
use nomlearn::{corpus, AlphabetSpec, SymbolicAutomaton, Word};

#[derive(Parser)]
#[command(
    name = "nomlearn",
    version,
    about = "Nominal residual automata toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide membership of a word.
    Member {
        /// Automaton file or `builtin:NAME`
        automaton: String,
        /// Word such as "a(1) a(2) a(1)"; `eps` for the empty word
        word: String,
    },
    /// Decide universality of a residual automaton.
    Universal {
        automaton: String,
        /// Confirm the automaton is residual; the answer is meaningless otherwise
        #[arg(long)]
        assume_residual: bool,
    },
    /// Add anchor letters and states to an automaton.
    Anchor {
        automaton: String,
        /// Also add an accepting initial state looping on every letter
        #[arg(long)]
        top: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Count word orbits up to a length.
    Orbits {
        /// File with `alphabet <tag> <arity>` lines (default: a single unary letter `a`)
        #[arg(long)]
        alphabet: Option<PathBuf>,
        #[arg(long)]
        max_len: usize,
    },
    /// Learn a target language with a simulated teacher.
    Learn(LearnArgs),
    /// Built-in languages.
    Corpus {
        #[command(subcommand)]
        command: CorpusCommand,
    },
}

#[derive(Args)]
struct LearnArgs {
    /// Automaton file or `builtin:NAME`
    #[arg(long)]
    target: String,
    /// Equivalence queries compare all words up to this length
    #[arg(long)]
    eq_depth: Option<usize>,
    #[arg(long, default_value_t = 50)]
    max_eq: u64,
    /// Longest row label allowed
    #[arg(long, default_value_t = 6)]
    max_l: usize,
    /// Wall-time budget in seconds
    #[arg(long)]
    timeout: Option<u64>,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Write statistics as JSON
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Print the loop events to stderr
    #[arg(long)]
    trace: bool,
}

#[derive(Subcommand)]
enum CorpusCommand {
    /// Write the automaton of a built-in language.
    Export {
        name: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// List built-in names.
    List,
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type CmdResult = Result<bool, Failure>;

/// An automaton from a file, or a built-in one with its predicate.
fn load(spec: &str) -> Result<(SymbolicAutomaton, Option<corpus::CorpusEntry>), Failure> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        let e = corpus::get(name)?;
        return Ok((e.automaton.clone(), Some(e)));
    }
    let text = fs::read_to_string(spec).map_err(|e| Failure(format!("{spec}: {e}")))?;
    let aut = parse(&text).map_err(|e| Failure(format!("{spec}: {e}")))?;
    Ok((aut, None))
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn member(automaton: &str, word: &str) -> CmdResult {
    let (aut, _) = load(automaton)?;
    let w: Word = word.parse()?;
    let ok = Simulator::new(&aut).accepts(&w)?;
    println!("{}", if ok { "accept" } else { "reject" });
    Ok(ok)
}

fn universal(automaton: &str, assume_residual: bool) -> CmdResult {
    if !assume_residual {
        return Err(Failure(
            "universality is only decided for residual automata and is undecidable in general; \
             pass --assume-residual to confirm the input is residual"
                .into(),
        ));
    }
    let (aut, _) = load(automaton)?;
    let v = is_universal_residual(&aut);
    if v.universal {
        println!("yes");
    } else {
        let why = v.witness.map(|w| w.to_string()).unwrap_or_default();
        println!("no: {why}");
        if let Some(w) = bounded_universality_counterexample(&aut, 6) {
            println!("rejected word: {w}");
        }
    }
    Ok(v.universal)
}

fn anchor_cmd(automaton: &str, top: bool, output: Option<&Path>) -> CmdResult {
    let (aut, _) = load(automaton)?;
    let out = if top {
        anchor_top(&aut)?
    } else {
        anchor(&aut)?
    };
    emit(&out.to_string(), output)?;
    Ok(true)
}

fn orbits(alphabet: Option<&Path>, max_len: usize) -> CmdResult {
    let alph = match alphabet {
        Some(p) => {
            let text =
                fs::read_to_string(p).map_err(|e| Failure(format!("{}: {e}", p.display())))?;
            parse(&text)
                .map_err(|e| Failure(format!("{}: {e}", p.display())))?
                .alphabet
        }
        None => AlphabetSpec::atoms(),
    };
    let counts = orbit_counts_by_length(&alph, max_len);
    println!("{}", counts.values().sum::<usize>());
    println!("length orbits");
    for (len, n) in &counts {
        println!("{len} {n}");
    }
    println!("k p(k)");
    for k in 0..=alph.atom_dimension() * max_len {
        println!("{k} {}", count_partial_permutations(k));
    }
    Ok(true)
}

fn learn_cmd(args: &LearnArgs) -> CmdResult {
    let (aut, entry) = load(&args.target)?;
    let (target, default_depth): (Arc<dyn Language>, usize) = match &entry {
        Some(e) => (e.predicate.clone(), e.default_eq_depth()),
        None => (Arc::new(Simulator::new(&aut)), 6),
    };
    let teacher = Teacher::new(target, args.eq_depth.unwrap_or(default_depth));
    let budget = Budget {
        max_eq: args.max_eq,
        max_l: args.max_l,
        wall_time: args.timeout.map(Duration::from_secs),
    };
    let res = learn(&teacher, &budget)?;
    if args.trace {
        for line in &res.trace {
            eprintln!("{line}");
        }
    }
    if let Some(p) = &args.stats {
        let json = serde_json::to_string_pretty(&res.stats)?;
        fs::write(p, json + "\n").map_err(|e| Failure(format!("{}: {e}", p.display())))?;
    }
    match &res.outcome {
        Outcome::Learned(h) => {
            emit(&h.automaton.to_string(), args.output.as_deref())?;
            Ok(true)
        }
        Outcome::Diverged(why) => {
            println!("DIVERGED ({why})");
            println!(
                "equivalence_queries {} final_l {}",
                res.stats.equivalence_queries, res.stats.final_l
            );
            Ok(false)
        }
    }
}

fn corpus_cmd(cmd: &CorpusCommand) -> CmdResult {
    match cmd {
        CorpusCommand::Export { name, output } => {
            let e = corpus::get(name)?;
            emit(&e.automaton.to_string(), output.as_deref())?;
        }
        CorpusCommand::List => {
            for n in corpus::names() {
                println!("{n}");
            }
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.command {
        Command::Member { automaton, word } => member(automaton, word),
        Command::Universal {
            automaton,
            assume_residual,
        } => universal(automaton, *assume_residual),
        Command::Anchor {
            automaton,
            top,
            output,
        } => anchor_cmd(automaton, *top, output.as_deref()),
        Command::Orbits { alphabet, max_len } => orbits(alphabet.as_deref(), *max_len),
        Command::Learn(args) => learn_cmd(args),
        Command::Corpus { command } => corpus_cmd(command),
    };
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
