use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use outerspine::complexes::{
    contractibility_pipeline, homology_f2, is_acyclic, reductive_subposet, star_poset, OrderComplex, Verdict,
};
use outerspine::folds::{fold_to_rose, fold_to_rose_randomized, verify_kn_path};
use outerspine::free_words::{enumerate_classes, ConjugacyClass};
use outerspine::marked_graphs::Rose;
use outerspine::sampling::{random_nonstandard_rose, rng_from_seed};
use outerspine::verify::{
    key_lemma_search, nielsen_ball, run_all, run_suite, VerifyOptions, RANK2_BALL_RADIUS, SUITES,
};
use outerspine::whitehead::{half_edge_name, star_graph, whitehead_reduce};
use outerspine::{Error, Limits};

/// Marked roses, folding paths, star graphs and the reductive subcomplex of
/// the star of a rose in the spine of Outer space.
#[derive(Parser)]
#[command(name = "outerspine", version)]
struct Cli {
    /// Longest class length streamed when comparing norms.
    #[arg(long, global = true, env = "OUTERSPINE_LMAX")]
    lmax: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RoseArgs {
    /// Rank of the free group.
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Petal images, comma separated, e.g. `ab,b`.
    #[arg(long, conflicts_with = "rose")]
    phi: Option<String>,
    /// Rose as a JSON file, inline JSON, or `identity`.
    #[arg(long)]
    rose: Option<String>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Emit {
    Text,
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Translation lengths of all classes up to a length, in enumeration order.
    Norm {
        #[command(flatten)]
        rose: RoseArgs,
        #[arg(long, default_value_t = 2)]
        upto: usize,
        /// Specific classes instead of the enumeration.
        classes: Vec<String>,
        #[arg(long, value_enum, default_value_t = Emit::Text)]
        emit: Emit,
    },
    /// A path in the spine from the rose to the standard rose by folding.
    FoldPath {
        #[command(flatten)]
        rose: RoseArgs,
        /// Choose fold witnesses at random with this seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = Emit::Text)]
        emit: Emit,
    },
    /// The star graph of a class.
    StarGraph {
        #[command(flatten)]
        rose: RoseArgs,
        #[arg(long)]
        class: String,
        #[arg(long, value_enum, default_value_t = Emit::Text)]
        emit: Emit,
    },
    /// Norm descent along maximal reductive pairs.
    Reduce {
        #[command(flatten)]
        rose: RoseArgs,
        /// Write the descent trace as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Emit::Text)]
        emit: Emit,
    },
    /// The poset of nonempty ideal trees.
    StarPoset {
        #[command(flatten)]
        rose: RoseArgs,
        #[arg(long, value_enum, default_value_t = Emit::Text)]
        emit: Emit,
    },
    /// Retract the reductive subcomplex of the star onto a point.
    ReductiveComplex {
        #[command(flatten)]
        rose: RoseArgs,
        /// Cross-check with mod-2 homology.
        #[arg(long, value_parser = ["homology"])]
        verify: Option<String>,
        /// Write the retraction trace as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Emit::Text)]
        emit: Emit,
    },
    /// Search for Key Lemma violations.
    KeyLemmaSearch {
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Every rose within a fixed Nielsen radius instead of random ones.
        #[arg(long)]
        exhaustive: bool,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Emit::Text)]
        emit: Emit,
    },
    /// Run acceptance suites: `all` or one of the suite names.
    Verify {
        suite: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Emit::Text)]
        emit: Emit,
    },
}

/// Failures of the command line, distinguished by exit code.
enum Failure {
    Input(String),
    Lib(Error),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Lib(e)
    }
}

type Outcome = Result<(), Failure>;

fn input<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Input(msg.into()))
}

fn load_rose(args: &RoseArgs) -> Result<Rose, Failure> {
    if args.n < 2 {
        return input(format!("rank must be at least 2, got {}", args.n));
    }
    if let Some(phi) = &args.phi {
        let images: Vec<&str> = phi.split(',').map(str::trim).collect();
        if images.len() != args.n {
            return input(format!("--phi gives {} images for rank {}", images.len(), args.n));
        }
        return Ok(Rose::from_images(args.n, &images)?);
    }
    match args.rose.as_deref() {
        None | Some("identity") => Ok(Rose::standard(args.n)),
        Some(text) if text.trim_start().starts_with('{') => Ok(Rose::parse_json(text)?),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{path}: {e}")))?;
            Ok(Rose::parse_json(&text)?)
        }
    }
}

fn print_json(value: &impl Serialize) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

fn write_trace(path: &PathBuf, value: &impl Serialize) -> Outcome {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    std::fs::write(path, text + "\n").map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct NormRow {
    class: String,
    length: usize,
}

fn cmd_norm(args: &RoseArgs, upto: usize, classes: &[String], emit: Emit) -> Outcome {
    let rho = load_rose(args)?;
    let list: Vec<ConjugacyClass> = if classes.is_empty() {
        enumerate_classes(rho.rank(), Some(upto)).collect()
    } else {
        classes
            .iter()
            .map(|c| ConjugacyClass::parse(c, rho.rank()))
            .collect::<Result<_, _>>()?
    };
    let rows: Vec<NormRow> = list
        .iter()
        .map(|w| NormRow {
            class: w.to_string(),
            length: rho.translation_length(w),
        })
        .collect();
    match emit {
        Emit::Json => print_json(&rows),
        _ => rows.iter().for_each(|r| println!("{}\t{}", r.class, r.length)),
    }
    Ok(())
}

fn cmd_fold_path(args: &RoseArgs, seed: Option<u64>, emit: Emit) -> Outcome {
    let rho = load_rose(args)?;
    let run = match seed {
        Some(s) => fold_to_rose_randomized(&rho, &mut rng_from_seed(s))?,
        None => fold_to_rose(&rho)?,
    };
    if !verify_kn_path(&run.path) {
        return Err(Failure::Lib(Error::PipelineDefect(
            "fold path failed verification".into(),
        )));
    }
    match emit {
        Emit::Dot => print!("{}", run.path.to_dot()),
        Emit::Json => print_json(&run),
        Emit::Text => {
            println!(
                "rose {rho}: {} folds, path of {} points",
                run.moves.len(),
                run.path.points.len()
            );
            for (i, m) in run.moves.iter().enumerate() {
                println!(
                    "  {i}: {:?} {:?} edges {} -> {}",
                    m.kind, m.witness, m.edges_before, m.edges_after
                );
            }
        }
    }
    Ok(())
}

fn cmd_star_graph(args: &RoseArgs, class: &str, emit: Emit) -> Outcome {
    let rho = load_rose(args)?;
    let w = ConjugacyClass::parse(class, rho.rank())?;
    let g = star_graph(&rho, &w);
    match emit {
        Emit::Dot => print!("{}", g.to_dot()),
        Emit::Json => print_json(&g),
        Emit::Text => {
            println!("class {w}: {} edges, valences {:?}", g.edges.len(), g.valences());
            println!("petal valence sums {:?}", g.petal_valences());
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct ReduceReport<'a> {
    start: &'a Rose,
    end: &'a Rose,
    steps: &'a [outerspine::whitehead::DescentStep],
}

fn cmd_reduce(args: &RoseArgs, trace: Option<&PathBuf>, emit: Emit, limits: &Limits) -> Outcome {
    let rho = load_rose(args)?;
    let (end, steps) = whitehead_reduce(&rho, limits)?;
    let report = ReduceReport {
        start: &rho,
        end: &end,
        steps: &steps,
    };
    if let Some(path) = trace {
        write_trace(path, &report)?;
    }
    match emit {
        Emit::Json => print_json(&report),
        _ => {
            for (i, s) in steps.iter().enumerate() {
                println!(
                    "  {i}: collapse along {} at {} -> {}",
                    s.mu,
                    half_edge_name(s.half_edge),
                    s.rose
                );
            }
            println!("{rho} reduces in {} steps to {end}", steps.len());
        }
    }
    Ok(())
}

fn cmd_star_poset(args: &RoseArgs, emit: Emit) -> Outcome {
    let rho = load_rose(args)?;
    let p = star_poset(&rho);
    let covers = p.covers();
    match emit {
        Emit::Json => print_json(&serde_json::json!({
            "elements": p.elements(),
            "covers": covers,
        })),
        _ => println!("{} ideal trees, {} cover relations", p.len(), covers.len()),
    }
    Ok(())
}

fn cmd_reductive_complex(
    args: &RoseArgs,
    verify: bool,
    trace_path: Option<&PathBuf>,
    emit: Emit,
    limits: &Limits,
) -> Outcome {
    let rho = load_rose(args)?;
    let (verdict, trace) = contractibility_pipeline(&rho, limits)?;
    if let Some(path) = trace_path {
        write_trace(path, &trace)?;
    }
    let betti = if verify {
        let p = reductive_subposet(&rho, limits)?;
        let betti = homology_f2(&OrderComplex::of_poset(&p)?)?;
        let expected = match verdict {
            Verdict::EmptyComplex => betti.is_empty(),
            Verdict::Contractible => is_acyclic(&betti),
        };
        if !expected {
            return Err(Failure::Check(format!("homology {betti:?} contradicts {verdict:?}")));
        }
        Some(betti)
    } else {
        None
    };
    match emit {
        Emit::Json => print_json(&serde_json::json!({ "verdict": verdict, "betti": betti, "trace": trace })),
        _ => {
            match verdict {
                Verdict::EmptyComplex => println!("empty complex"),
                Verdict::Contractible => println!("contractible ({} retraction steps)", trace.steps.len()),
            }
            if let Some(b) = betti {
                println!("mod-2 Betti numbers {b:?}");
            }
        }
    }
    Ok(())
}

fn cmd_key_lemma_search(n: usize, exhaustive: bool, samples: usize, seed: u64, emit: Emit, limits: &Limits) -> Outcome {
    if n < 2 {
        return input(format!("rank must be at least 2, got {n}"));
    }
    let roses: Vec<Rose> = if exhaustive {
        nielsen_ball(n, RANK2_BALL_RADIUS)
    } else {
        let mut rng = rng_from_seed(seed);
        (0..samples).map(|_| random_nonstandard_rose(&mut rng, n, 8)).collect()
    };
    let tally = key_lemma_search(roses, limits)?;
    match emit {
        Emit::Json => print_json(&tally),
        _ => println!(
            "{} roses, {} instances, {} census cases, {} violations",
            tally.roses, tally.instances, tally.census, tally.violations
        ),
    }
    if tally.violations > 0 {
        return Err(Failure::Lib(Error::ConclusionFailed(format!(
            "{} violations",
            tally.violations
        ))));
    }
    Ok(())
}

fn cmd_verify(suite: &str, opts: &VerifyOptions, emit: Emit) -> Outcome {
    let reports = if suite == "all" {
        run_all(opts)
    } else {
        match run_suite(suite, opts) {
            Some(r) => vec![r],
            None => {
                return input(format!(
                    "unknown suite {suite:?}; expected all or one of {}",
                    SUITES.join(", ")
                ))
            }
        }
    };
    match emit {
        Emit::Json => print_json(&reports),
        _ => reports.iter().for_each(|r| println!("{r}")),
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    if failed > 0 {
        return Err(Failure::Check(format!("{failed} criteria failed")));
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    let mut limits = Limits::from_env();
    if let Some(l) = cli.lmax {
        if l < 2 {
            return input("--lmax must be at least 2");
        }
        limits = limits.with_lmax(l);
    }
    match cli.command {
        Command::Norm {
            rose,
            upto,
            classes,
            emit,
        } => cmd_norm(&rose, upto, &classes, emit),
        Command::FoldPath { rose, seed, emit } => cmd_fold_path(&rose, seed, emit),
        Command::StarGraph { rose, class, emit } => cmd_star_graph(&rose, &class, emit),
        Command::Reduce { rose, trace, emit } => cmd_reduce(&rose, trace.as_ref(), emit, &limits),
        Command::StarPoset { rose, emit } => cmd_star_poset(&rose, emit),
        Command::ReductiveComplex {
            rose,
            verify,
            trace,
            emit,
        } => cmd_reductive_complex(&rose, verify.is_some(), trace.as_ref(), emit, &limits),
        Command::KeyLemmaSearch {
            n,
            exhaustive,
            samples,
            seed,
            emit,
        } => cmd_key_lemma_search(n, exhaustive, samples, seed, emit, &limits),
        Command::Verify {
            suite,
            n,
            samples,
            seed,
            emit,
        } => {
            if n.is_some_and(|n| n < 2) {
                return input("--n must be at least 2");
            }
            let opts = VerifyOptions {
                seed,
                n,
                samples,
                limits,
            };
            cmd_verify(&suite, &opts, emit)
        }
    }
}

/// 0 success, 1 failed check, 2 bad input, 3 undetermined comparison,
/// 4 pipeline defect, 5 any other internal defect.
fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::UndeterminedComparison(_) => 3,
                Error::PipelineDefect(_) => 4,
                e if e.is_defect() => 5,
                _ => 2,
            })
        }
    }
}
