use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use termcode::{read_input, write_file, write_output, CliError};
use termcode_core::casestudies::{reproduce_table, TABLE_NAMES};
use termcode_core::depgraph::{build_dep_digraph, build_labelled_depgraph};
use termcode_core::entropy::{
    self, bound_instance, bound_instance_unlabelled, build_lp_digraph, build_lp_labelled,
};
use termcode_core::guessing::{
    count_winning, max_winning_exhaustive, vertex_names_labelled, GameGraph, GuessingResult,
    Strategy,
};
use termcode_core::normalize::{diversify, normalise, NormalFormInstance};
use termcode_core::search::{
    self, dispersion_max, DispersionProblem, Mode, SearchConfig, SearchResult,
};
use termcode_core::{parse_instance, TermInstance};

#[derive(Parser)]
#[command(name = "termcode", version, about = "Term coding workbench")]
struct Cli {
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Tsv,
    Dot,
    Lp,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exhaustive,
    #[value(alias = "branch-bound")]
    Bnb,
    Local,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Nf,
    Div,
}

#[derive(Args)]
struct Io {
    /// Input file, `-` for stdin, or `corpus/<file>`.
    input: String,
    /// Output file; stdout by default.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    format: Option<Format>,
    /// Human-oriented output.
    #[arg(long)]
    pretty: bool,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    n: u32,
    #[arg(long, value_enum, default_value = "exhaustive")]
    mode: ModeArg,
    /// Cap on interpretations, nodes or moves; the mode's default otherwise.
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    restarts: Option<u32>,
    /// Stop once a code of this size is found.
    #[arg(long)]
    target: Option<u64>,
    /// Writes the best interpretation found.
    #[arg(long)]
    witness: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an instance and print it in canonical form.
    Parse {
        #[command(flatten)]
        io: Io,
    },
    /// Flatten, quotient and remove collisions.
    Normalise {
        #[command(flatten)]
        io: Io,
        #[arg(long, value_enum, default_value = "nf")]
        emit: Emit,
    },
    /// Give every equation its own function symbol.
    Diversify {
        #[command(flatten)]
        io: Io,
    },
    /// Dependency graph of the normal form.
    Graph {
        #[command(flatten)]
        io: Io,
        /// One vertex per equation, labelled by the variable it defines.
        #[arg(long)]
        labelled: bool,
    },
    /// Guessing game of the diversified normal form.
    Guess {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        labelled: bool,
        /// Cap on the number of strategies enumerated.
        #[arg(long, default_value_t = termcode_core::guessing::DEFAULT_BUDGET)]
        budget: u64,
        /// Scores this strategy file instead of searching.
        #[arg(long)]
        strategy: Option<PathBuf>,
        /// Writes the optimal strategy.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Polymatroid upper bound on the code exponent.
    Bound {
        #[command(flatten)]
        io: Io,
        /// Uses the unlabelled dependency digraph.
        #[arg(long)]
        unlabelled: bool,
        /// Largest number of labels accepted.
        #[arg(long, default_value_t = entropy::DEFAULT_CAP)]
        cap: usize,
        /// Writes the LP in CPLEX LP format.
        #[arg(long)]
        emit_lp: Option<PathBuf>,
    },
    /// Largest code over interpretations on an n-element alphabet.
    Search {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Largest image of an output map given by `out` lines.
    Dispersion {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// 0-1 model of the code maximisation in CPLEX LP format.
    Ilp {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        n: u32,
        /// Adds a row demanding at least this many codewords.
        #[arg(long)]
        target: Option<u64>,
        #[arg(long, default_value_t = search::ilp::DEFAULT_ILP_CAP)]
        cap: usize,
    },
    /// Reproduce a bundled case-study table as TSV.
    Case {
        /// One of the table names, or `list`.
        name: String,
        /// Keeps only the rows for this alphabet size.
        #[arg(long)]
        row: Option<u32>,
        /// Includes rows beyond desk scale.
        #[arg(long)]
        all: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Domain(CliError),
}

impl<E: Into<CliError>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Domain(e.into())
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn allow(
    format: Option<Format>,
    allowed: &[Format],
    default: Format,
    cmd: &str,
) -> Result<Format, Failure> {
    match format {
        None => Ok(default),
        Some(f) if allowed.contains(&f) => Ok(f),
        Some(f) => Err(usage(format!(
            "`{cmd}` does not support --format {}",
            f.to_possible_value()
                .expect("no skipped variants")
                .get_name()
        ))),
    }
}

fn instance(io: &Io) -> Result<TermInstance, Failure> {
    Ok(parse_instance(&read_input(&io.input)?).map_err(CliError::from)?)
}

fn normal_form(io: &Io) -> Result<NormalFormInstance, Failure> {
    Ok(normalise(&instance(io)?).0)
}

fn search_config(a: &SearchArgs) -> SearchConfig {
    let mut cfg = match a.mode {
        ModeArg::Exhaustive => SearchConfig::exhaustive(),
        ModeArg::Bnb => SearchConfig::branch_bound(),
        ModeArg::Local => SearchConfig::local(a.seed),
    };
    cfg.seed = a.seed;
    if let Some(b) = a.budget {
        cfg.budget = b;
    }
    if let Some(r) = a.restarts {
        cfg.restarts = r;
    }
    cfg.target = a.target;
    cfg
}

fn search_report(r: &SearchResult, n: u32, vars: usize, io: &Io) -> Result<String, Failure> {
    let status = if r.certified {
        "certified"
    } else {
        "uncertified"
    };
    allow(io.format, &[Format::Tsv], Format::Tsv, "search")?;
    if io.format.is_some() {
        let ideal = (n as u128).checked_pow(vars as u32);
        let ideal_text = ideal.map_or("overflow".to_owned(), |i| i.to_string());
        let ratio = ideal.map_or("0".to_owned(), |i| {
            format!("{:.3}", r.best_count as f64 / i as f64)
        });
        return Ok(format!(
            "n\tcount\tideal\tratio\tcertified\n{n}\t{}\t{ideal_text}\t{ratio}\t{}\n",
            r.best_count,
            if r.certified { "yes" } else { "no" }
        ));
    }
    if io.pretty {
        return Ok(format!(
            "best code: {} ({status}, {} evaluations)\n",
            r.best_count, r.evaluations
        ));
    }
    Ok(format!("{} {status}\n", r.best_count))
}

fn guess_report(r: &GuessingResult, pretty: bool) -> String {
    let gn = r.gn.map_or("-".to_owned(), |g| format!("{g:.6}"));
    if pretty {
        format!("W_{} = {} (guessing number {gn})\n", r.n, r.w)
    } else {
        format!("{}\t{}\t{gn}\n", r.n, r.w)
    }
}

fn play<G: GameGraph>(
    g: &G,
    names: &[String],
    n: u32,
    budget: u64,
    strategy: Option<&PathBuf>,
    witness: Option<&PathBuf>,
) -> Result<GuessingResult, Failure> {
    if let Some(path) = strategy {
        let s = Strategy::parse_text(g, names, &read_input(&path.to_string_lossy())?)?;
        if s.n != n {
            return Err(Failure::Domain(
                termcode_core::Error::Mismatch(format!(
                    "strategy is over n={}, asked for n={n}",
                    s.n
                ))
                .into(),
            ));
        }
        let w = count_winning(g, &s)?;
        let gn = (n >= 2 && w > 0).then(|| (w as f64).ln() / (n as f64).ln());
        return Ok(GuessingResult {
            w,
            n,
            gn,
            strategy: Some(s),
        });
    }
    let r = max_winning_exhaustive(g, n, budget)?;
    if let (Some(path), Some(s)) = (witness, &r.strategy) {
        write_file(path, &s.to_text(names))?;
    }
    Ok(r)
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(k) = cli.threads {
        if k == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| usage(format!("cannot start {k} threads: {e}")))?;
    }
    match cli.command {
        Command::Parse { io } => {
            allow(io.format, &[], Format::Tsv, "parse")?;
            let inst = instance(&io)?;
            let mut text = inst.to_string();
            if io.pretty {
                text = format!(
                    "# {} variables, {} symbols, {} equations\n{text}",
                    inst.num_vars(),
                    inst.signature.len(),
                    inst.equations.len()
                );
            }
            write_output(io.output.as_deref(), &text)?;
        }
        Command::Normalise { io, emit } => {
            let nf = normal_form(&io)?;
            let nf = match emit {
                Emit::Nf => nf,
                Emit::Div => diversify(&nf).nf,
            };
            allow(io.format, &[Format::Tsv], Format::Tsv, "normalise")?;
            let text = if io.format.is_some() {
                nf.provenance_tsv()
            } else {
                nf.to_instance().to_string()
            };
            write_output(io.output.as_deref(), &text)?;
        }
        Command::Diversify { io } => {
            allow(io.format, &[], Format::Tsv, "diversify")?;
            let div = diversify(&normal_form(&io)?);
            write_output(io.output.as_deref(), &div.nf.to_instance().to_string())?;
        }
        Command::Graph { io, labelled } => {
            let format = allow(io.format, &[Format::Dot, Format::Tsv], Format::Dot, "graph")?;
            let nf = normal_form(&io)?;
            let text = match (labelled, format) {
                (true, Format::Tsv) => build_labelled_depgraph(&nf).to_tsv(),
                (true, _) => build_labelled_depgraph(&nf).to_dot(),
                (false, Format::Tsv) => build_dep_digraph(&nf).to_tsv(),
                (false, _) => build_dep_digraph(&nf).to_dot(),
            };
            write_output(io.output.as_deref(), &text)?;
        }
        Command::Guess {
            io,
            n,
            labelled,
            budget,
            strategy,
            witness,
        } => {
            allow(io.format, &[Format::Tsv], Format::Tsv, "guess")?;
            let div = diversify(&normal_form(&io)?);
            let r = if labelled {
                let g = build_labelled_depgraph(&div.nf);
                play(
                    &g,
                    &vertex_names_labelled(&g),
                    n,
                    budget,
                    strategy.as_ref(),
                    witness.as_ref(),
                )?
            } else {
                let g = build_dep_digraph(&div.nf);
                play(
                    &g,
                    &g.names.clone(),
                    n,
                    budget,
                    strategy.as_ref(),
                    witness.as_ref(),
                )?
            };
            write_output(io.output.as_deref(), &guess_report(&r, io.pretty))?;
        }
        Command::Bound {
            io,
            unlabelled,
            cap,
            emit_lp,
        } => {
            allow(io.format, &[], Format::Tsv, "bound")?;
            let inst = instance(&io)?;
            let report = if unlabelled {
                bound_instance_unlabelled(&inst, cap)?
            } else {
                bound_instance(&inst, cap)?
            };
            if let Some(path) = emit_lp {
                let nf = diversify(&normalise(&inst).0).nf;
                let lp = if unlabelled {
                    build_lp_digraph(&build_dep_digraph(&nf), cap)?
                } else {
                    build_lp_labelled(&build_labelled_depgraph(&nf), cap)?
                };
                write_file(&path, &lp.to_cplex())?;
            }
            let text = if io.pretty {
                report.to_text()
            } else {
                format!("{}\n", entropy::fraction(&report.optimum))
            };
            write_output(io.output.as_deref(), &text)?;
        }
        Command::Search { io, search: a } => {
            let inst = instance(&io)?;
            let r = search::search_max(&inst, a.n, &search_config(&a))?;
            if let Some(path) = &a.witness {
                write_file(path, &r.witness.to_text(&inst.signature))?;
            }
            let text = search_report(&r, a.n, inst.num_vars(), &io)?;
            write_output(io.output.as_deref(), &text)?;
        }
        Command::Dispersion { io, search: a } => {
            let prob = DispersionProblem::parse(&read_input(&io.input)?)?;
            let cfg = search_config(&a);
            if cfg.mode == Mode::BranchBound {
                return Err(usage("dispersion supports --mode exhaustive or local"));
            }
            let r = dispersion_max(&prob, a.n, &cfg)?;
            if let Some(path) = &a.witness {
                write_file(path, &r.witness.to_text(&prob.signature))?;
            }
            let text = search_report(&r, a.n, prob.outputs.len(), &io)?;
            write_output(io.output.as_deref(), &text)?;
        }
        Command::Ilp { io, n, target, cap } => {
            allow(io.format, &[Format::Lp], Format::Lp, "ilp")?;
            let model = search::build_ilp(&instance(&io)?, n, target, cap)?;
            write_output(io.output.as_deref(), &model.to_cplex())?;
        }
        Command::Case {
            name,
            row,
            all,
            output,
        } => {
            if name == "list" {
                let mut text = String::new();
                for t in TABLE_NAMES {
                    let _ = writeln!(text, "{t}");
                }
                write_output(output.as_deref(), &text)?;
                return Ok(());
            }
            if !TABLE_NAMES.contains(&name.as_str()) {
                return Err(usage(format!(
                    "unknown table `{name}`; expected one of {}",
                    TABLE_NAMES.join(", ")
                )));
            }
            let table = reproduce_table(&name, all)?;
            let text = match row {
                None => table,
                Some(n) => filter_rows(&table, n),
            };
            write_output(output.as_deref(), &text)?;
        }
    }
    Ok(())
}

/// Keeps the header and the rows whose `n` column equals `n`.
fn filter_rows(table: &str, n: u32) -> String {
    let mut lines = table.lines();
    let Some(header) = lines.next() else {
        return String::new();
    };
    let col = header.split('\t').position(|c| c == "n").unwrap_or(0);
    let want = n.to_string();
    let mut out = format!("{header}\n");
    for line in lines.filter(|l| l.split('\t').nth(col) == Some(want.as_str())) {
        out.push_str(line);
        out.push('\n');
    }
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
