use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use netmod::harness::{self, Batch, Claim, Outcome, Verdict};
use netmod::io::{parse_module, serialize_module, to_dot, DotStyle, ModuleDocument};
use netmod::run::runs_upto;
use netmod::step::{basic_steps, enumerate_all_steps, enumerate_steps, Step};
use netmod::{compose, isomorphism, recognize_run, NetModule, StepUniverse};

#[derive(Parser)]
#[command(name = "netmod", version, about = "Compose Petri net modules and explore their runs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compose two modules, A ∘ B.
    Compose {
        a: PathBuf,
        b: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Module name in the output (default: A_B).
        #[arg(long)]
        name: Option<String>,
    },
    /// List steps of a module: basic steps by default.
    Steps {
        module: PathBuf,
        /// Only steps of transitions with this label.
        #[arg(long)]
        transition: Option<String>,
        /// Every interface designation, not just the basic one.
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t = 10_000, requires = "all")]
        budget: usize,
    },
    /// Enumerate run classes with at most K steps.
    Runs {
        module: PathBuf,
        #[arg(long)]
        max_steps: usize,
        /// Use basic steps only.
        #[arg(long)]
        basic_only: bool,
        /// Step budget when all steps are used.
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        /// Print the number of classes only.
        #[arg(long, conflicts_with = "emit")]
        count: bool,
        /// Write one file per class into DIR.
        #[arg(long, value_name = "DIR")]
        emit: Option<PathBuf>,
    },
    /// Decide whether R is a fold of steps of M.
    Recognize {
        module: PathBuf,
        run: PathBuf,
        #[arg(long)]
        basic_only: bool,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
    },
    /// Check a law of the calculus on given modules or seeded random ones.
    Verify(VerifyArgs),
    /// Render a module as Graphviz DOT.
    ExportDot {
        module: PathBuf,
        #[arg(long, value_enum, default_value_t = Style::System)]
        style: Style,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decide whether two modules are isomorphic.
    Iso { a: PathBuf, b: PathBuf },
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_enum)]
    claim: ClaimArg,
    /// Operand files. Without them a seeded random batch is checked.
    operands: Vec<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of random cases (default depends on the claim).
    #[arg(long)]
    cases: Option<usize>,
    /// Step bound for the composition theorem.
    #[arg(long, default_value_t = harness::DEFAULT_K)]
    max_steps: usize,
    #[arg(long, value_enum, default_value_t = UniverseArg::Basic)]
    universe: UniverseArg,
    #[arg(long, default_value_t = 10_000)]
    budget: usize,
    /// Report the first failing random case unshrunk.
    #[arg(long)]
    no_shrink: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClaimArg {
    Theorem1,
    Composition,
    Associativity,
    Identity,
}

#[derive(Clone, Copy, ValueEnum)]
enum UniverseArg {
    Basic,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum Style {
    System,
    Run,
}

/// Exit status 2 with a message.
struct Failure(String);

type CmdResult = Result<ExitCode, Failure>;

fn load(path: &Path) -> Result<ModuleDocument, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    parse_module(&text).map_err(|e| Failure(format!("{}:{e}", path.display())))
}

fn write_out(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| Failure(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn ser(name: &str, m: &NetModule) -> Result<String, Failure> {
    serialize_module(name, m).map_err(|e| Failure(e.to_string()))
}

fn print_steps(steps: &[Step], truncated: bool) -> CmdResult {
    for (i, s) in steps.iter().enumerate() {
        if i > 0 {
            println!();
        }
        print!("{}", ser(&format!("Step{}", i + 1), s.module())?);
    }
    if truncated {
        eprintln!("step budget exhausted; list truncated");
    }
    Ok(ExitCode::SUCCESS)
}

fn universe(basic_only: bool, budget: usize) -> StepUniverse {
    if basic_only {
        StepUniverse::Basic
    } else {
        StepUniverse::All { budget }
    }
}

fn verify(args: VerifyArgs) -> CmdResult {
    let claim = match args.claim {
        ClaimArg::Theorem1 => Claim::Theorem1,
        ClaimArg::Composition => Claim::CompositionTheorem,
        ClaimArg::Associativity => Claim::Associativity,
        ClaimArg::Identity => Claim::Identity,
    };
    let universe = match args.universe {
        UniverseArg::Basic => StepUniverse::Basic,
        UniverseArg::All => StepUniverse::All { budget: args.budget },
    };
    let verdict: Verdict = if args.operands.is_empty() {
        let mut b = Batch::new(claim, args.seed);
        if let Some(c) = args.cases {
            b.cases = c;
        }
        b.k = args.max_steps;
        b.universe = universe;
        b.shrink = !args.no_shrink;
        harness::run_batch(&b)
    } else {
        let ops = args.operands.iter().map(|p| load(p).map(|d| d.module)).collect::<Result<Vec<_>, _>>()?;
        let mut v = harness::check_claim(claim, &ops, args.max_steps, universe).map_err(|e| Failure(e.to_string()))?;
        v.seed = Some(args.seed);
        if v.outcome == Outcome::NotApplicable {
            return Err(Failure(format!("{claim} not applicable: {}", v.detail)));
        }
        v
    };
    if args.json {
        println!("{}", serde_json::to_string_pretty(&verdict).expect("verdicts serialize"));
    } else {
        let word = match verdict.outcome {
            Outcome::Holds => "holds",
            Outcome::Fails => "FAILS",
            Outcome::Inconclusive => "inconclusive",
            Outcome::NotApplicable => "not applicable",
        };
        println!("{claim}: {word}");
        if !verdict.detail.is_empty() {
            println!("  {}", verdict.detail);
        }
        if let Some(w) = &verdict.witness {
            println!("witness: {}", w.detail);
            if let Some(s) = w.seed {
                println!("  case seed {s}");
            }
            for op in &w.operands {
                println!();
                print!("{op}");
            }
        }
    }
    Ok(match verdict.outcome {
        Outcome::Holds => ExitCode::SUCCESS,
        _ => ExitCode::from(1),
    })
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Compose { a, b, output, name } => {
            let (da, db) = (load(&a)?, load(&b)?);
            let c = compose(&da.module, &db.module).map_err(|e| Failure(e.to_string()))?;
            let name = name.unwrap_or_else(|| format!("{}_{}", da.name, db.name));
            write_out(output.as_deref(), &ser(&name, &c)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Steps { module, transition, all, budget } => {
            let host = load(&module)?.module;
            let Some(label) = transition else {
                if all {
                    let e = enumerate_all_steps(&host, budget);
                    return print_steps(&e.steps, e.truncated);
                }
                return print_steps(&basic_steps(&host), false);
            };
            let t = host
                .transitions()
                .find(|&t| host.element(t).label.name() == label)
                .ok_or_else(|| Failure(format!("no transition labeled {label:?}")))?;
            let e = enumerate_steps(&host, t, if all { budget } else { 0 }).map_err(|e| Failure(e.to_string()))?;
            if all {
                print_steps(&e.steps, e.truncated)
            } else {
                let b = netmod::basic_step(&host, t).map_err(|e| Failure(e.to_string()))?;
                print_steps(&[b], false)
            }
        }
        Command::Runs { module, max_steps, basic_only, budget, count, emit } => {
            let host = load(&module)?.module;
            let set = runs_upto(&host, max_steps, universe(basic_only, budget));
            if set.truncated {
                eprintln!("enumeration truncated");
            }
            if count {
                println!("{}", set.len());
            } else if let Some(dir) = emit {
                fs::create_dir_all(&dir).map_err(|e| Failure(format!("{}: {e}", dir.display())))?;
                for (i, r) in set.iter().enumerate() {
                    let name = format!("Run{i:04}");
                    let path = dir.join(format!("run_{i:04}.netmod"));
                    fs::write(&path, ser(&name, r.net())?).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
                }
                println!("{} runs written to {}", set.len(), dir.display());
            } else {
                for (i, r) in set.iter().enumerate() {
                    if i > 0 {
                        println!();
                    }
                    print!("{}", ser(&format!("Run{i:04}"), r.net())?);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Recognize { module, run, basic_only, budget } => {
            let host = load(&module)?.module;
            let target = load(&run)?.module;
            match recognize_run(&host, &target, universe(basic_only, budget)) {
                Some(steps) => {
                    println!("recognized: fold of {} steps", steps.len());
                    print_steps(&steps, false)
                }
                None => {
                    println!("not recognized");
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Verify(args) => verify(args),
        Command::ExportDot { module, style, output } => {
            let d = load(&module)?;
            let style = match style {
                Style::System => DotStyle::System,
                Style::Run => DotStyle::Run,
            };
            let dot = to_dot(&d.name, &d.module, style).map_err(|e| Failure(e.to_string()))?;
            write_out(output.as_deref(), &dot)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Iso { a, b } => {
            let (da, db) = (load(&a)?, load(&b)?);
            match isomorphism(&da.module, &db.module) {
                Some(map) => {
                    println!("isomorphic");
                    for (i, j) in map.iter().enumerate() {
                        println!("  {} -> {}", da.module.element(i).id, db.module.element(*j).id);
                    }
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    println!("not isomorphic");
                    Ok(ExitCode::from(1))
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = matches!(&cli.command, Command::Verify(a) if a.json);
    match run(cli) {
        Ok(code) => code,
        Err(Failure(msg)) => {
            if json {
                println!("{}", json!({ "error": msg }));
            } else {
                eprintln!("error: {msg}");
            }
            ExitCode::from(2)
        }
    }
}
