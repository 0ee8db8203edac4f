use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_rational::Ratio;

use trigraph_sep::basic::classify_basic;
use trigraph_sep::berge::{is_berge, is_in_class_f};
use trigraph_sep::corpus::{compose_kjoin, generate};
use trigraph_sep::cs_builder::{build_cs_separator, CsBuildOptions};
use trigraph_sep::decomposition::{decompose_tree, find_bsp, DecomposeOptions, PreconditionMode};
use trigraph_sep::format::Document;
use trigraph_sep::kjoin::{build_closure_separator, AllCutsOracle};
use trigraph_sep::seh::kjoin::{extract_biclique_kjoin_unit, BicliqueOracle, KStep, BipartiteOracle, ExhaustiveOracle};
use trigraph_sep::seh::{biclique_violation, extract_biclique, extract_biclique_unweighted, ExtractOptions};
use trigraph_sep::separation::{verify_cs_separator, CsSeparator};
use trigraph_sep::{Error, Limits};

#[derive(Parser)]
#[command(name = "tsep")]
#[command(about = "Clique-stable set separators and bicliques for Berge trigraphs")]
#[command(version)]
struct Cli {
    /// Override a search cap, e.g. `--cap berge=40`. Names: berge,
    /// realizations, cliques, line, doubled, two-join, skew, skew-core.
    #[arg(long = "cap", global = true, value_name = "NAME=N")]
    caps: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Class membership, Berge status, skew-partition and basic class.
    Check { file: PathBuf },
    /// Print the 2-join decomposition tree.
    Decompose {
        file: PathBuf,
        #[command(flatten)]
        pre: Pre,
    },
    /// Build or verify clique-stable set separators.
    Cssep {
        #[command(subcommand)]
        command: CssepCommand,
    },
    /// Extract a biclique or complement biclique.
    Biclique {
        file: PathBuf,
        /// Use the weights in the file instead of unit weights.
        #[arg(long)]
        weights: bool,
        #[command(flatten)]
        pre: Pre,
    },
    /// Pipelines for trigraphs built by generalized k-joins.
    Kjoin {
        #[command(subcommand)]
        command: KjoinCommand,
    },
    /// Build a recipe and print it with its ground truth.
    Gen {
        recipe: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum CssepCommand {
    /// Build a separator, verify it, and print it with its size accounting.
    Build {
        file: PathBuf,
        /// Write the separator here instead of standard output.
        #[arg(long, short)]
        out: Option<PathBuf>,
        #[command(flatten)]
        pre: Pre,
    },
    /// Check a separator file against a trigraph.
    Verify { file: PathBuf, separator: PathBuf },
}

#[derive(Args)]
struct KjoinArgs {
    recipe: String,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum KjoinCommand {
    /// Print the composition tree and the joined trigraph.
    Compose {
        #[command(flatten)]
        args: KjoinArgs,
    },
    /// Separator of the joined trigraph.
    Cssep {
        #[command(flatten)]
        args: KjoinArgs,
        /// Leaves with at most this many vertices take all cuts.
        #[arg(long, default_value_t = 4)]
        p0: usize,
    },
    /// Biclique of the joined trigraph under unit weights.
    Biclique {
        #[command(flatten)]
        args: KjoinArgs,
        #[arg(long, value_name = "P/Q")]
        c: Ratio<u64>,
        /// Leaf oracle: `exhaustive` or `bipartite`.
        #[arg(long, default_value = "exhaustive")]
        oracle: String,
    },
}

#[derive(Args)]
struct Pre {
    /// Skip the class and skew-partition checks.
    #[arg(long)]
    assume: bool,
}

impl Pre {
    fn mode(&self) -> PreconditionMode {
        if self.assume {
            PreconditionMode::Assume
        } else {
            PreconditionMode::Verify
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Verification(_) | Error::OracleContract(_) => 1,
        Error::CapExceeded { .. } => 3,
        Error::ContradictionWitness(_) => 4,
        Error::Precondition(_) | Error::InvalidInput(_) | Error::InvalidStructure(_) | Error::Parse { .. } => 2,
    }
}

fn kind_name(e: &Error) -> &'static str {
    match e {
        Error::CapExceeded { .. } => "cap",
        Error::InvalidInput(_) => "input",
        Error::Precondition(_) => "precondition",
        Error::InvalidStructure(_) => "structure",
        Error::ContradictionWitness(_) => "contradiction",
        Error::Verification(_) => "verification",
        Error::OracleContract(_) => "oracle",
        Error::Parse { .. } => "parse",
    }
}

fn parse_limits(caps: &[String]) -> trigraph_sep::Result<Limits> {
    let mut l = Limits::default();
    for c in caps {
        let bad = || Error::InvalidInput(format!("bad cap `{c}`, expected NAME=N"));
        let (name, val) = c.split_once('=').ok_or_else(bad)?;
        let v: usize = val.trim().parse().map_err(|_| bad())?;
        let slot = match name.trim() {
            "berge" => &mut l.berge,
            "realizations" => &mut l.realizations,
            "cliques" => &mut l.cliques,
            "line" => &mut l.line,
            "doubled" => &mut l.doubled,
            "two-join" => &mut l.two_join,
            "skew" => &mut l.skew,
            "skew-core" => &mut l.skew_core,
            _ => return Err(bad()),
        };
        *slot = v;
    }
    Ok(l)
}

fn read(path: &Path) -> trigraph_sep::Result<String> {
    fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> trigraph_sep::Result<Document> {
    Document::parse(&read(path)?)
}

fn comment(report: &str) -> String {
    report.lines().map(|l| format!("# {l}\n")).collect()
}

fn run(cli: Cli) -> trigraph_sep::Result<String> {
    let limits = parse_limits(&cli.caps)?;
    let mut out = String::new();
    match cli.command {
        Command::Check { file } => {
            let t = load(&file)?.trigraph;
            out.push_str(&format!("n: {}\nswitchable pairs: {}\n", t.n(), t.num_switchable()));
            let (berge, witness) = is_berge(&t, &limits)?;
            match witness {
                Some(w) => out.push_str(&format!("berge: false ({w:?})\n")),
                None => out.push_str(&format!("berge: {berge}\n")),
            }
            let (in_f, why) = is_in_class_f(&t, &limits)?;
            out.push_str(&format!("in class: {in_f}"));
            if let Some(why) = why {
                out.push_str(&format!(" ({why})"));
            }
            out.push('\n');
            match find_bsp(&t, &limits)? {
                Some((a, b)) => out.push_str(&format!("balanced skew-partition: A={a} B={b}\n")),
                None => out.push_str("balanced skew-partition: none\n"),
            }
            out.push_str(&format!("basic: {}\n", classify_basic(&t, &limits)?.kind));
        }
        Command::Decompose { file, pre } => {
            let doc = load(&file)?;
            let opts = DecomposeOptions { limits, precondition: pre.mode(), hints: doc.hints, ..DecomposeOptions::default() };
            out.push_str(&decompose_tree(&doc.trigraph, &opts)?.to_text());
        }
        Command::Cssep { command: CssepCommand::Build { file, out: path, pre } } => {
            let doc = load(&file)?;
            let opts = CsBuildOptions {
                decompose: DecomposeOptions { limits, precondition: pre.mode(), hints: doc.hints, ..DecomposeOptions::default() },
                verify: true,
            };
            let b = build_cs_separator(&doc.trigraph, &opts)?;
            match path {
                Some(p) => {
                    fs::write(&p, b.separator.to_text())
                        .map_err(|e| Error::InvalidInput(format!("{}: {e}", p.display())))?;
                    out.push_str(&b.report());
                }
                None => {
                    out.push_str(&b.separator.to_text());
                    out.push_str(&comment(&b.report()));
                }
            }
        }
        Command::Cssep { command: CssepCommand::Verify { file, separator } } => {
            let t = load(&file)?.trigraph;
            let f = CsSeparator::parse(&read(&separator)?, &t)?;
            let v = verify_cs_separator(&t, &f, &limits)?;
            out.push_str(&format!("cuts: {}\n", f.len()));
            if let Some((k, s)) = v.counterexample {
                return Err(Error::Verification(format!("clique {{{k}}} and stable set {{{s}}} are not separated")));
            }
            out.push_str("verified: true\n");
        }
        Command::Biclique { file, weights, pre } => {
            let doc = load(&file)?;
            let opts = ExtractOptions { limits, precondition: pre.mode(), hints: doc.hints, ..ExtractOptions::default() };
            let t = &doc.trigraph;
            let e = if weights {
                let w = doc.weights.ok_or_else(|| Error::InvalidInput("the file has no weight lines".into()))?;
                let e = extract_biclique(&w, &opts)?;
                if 55 * e.biclique.weight < w.total() {
                    return Err(Error::Verification(format!("weight {} is below 1/55 of {}", e.biclique.weight, w.total())));
                }
                e
            } else {
                let e = extract_biclique_unweighted(t, &opts)?;
                let small = e.biclique.x.len().min(e.biclique.y.len());
                if 55 * small < t.n() {
                    return Err(Error::Verification(format!("smaller side has {small} vertices, below n/55")));
                }
                e
            };
            if let Some(why) = biclique_violation(t, &e.biclique) {
                return Err(Error::Verification(why));
            }
            out.push_str(&e.report());
            out.push_str("verified: true\n");
        }
        Command::Kjoin { command } => match command {
            KjoinCommand::Compose { args } => {
                let tree = compose_kjoin(&args.recipe, args.seed, args.k)?;
                out.push_str(&comment(&tree.to_text()));
                out.push_str(&Document::plain(tree.trigraph().clone()).to_text());
            }
            KjoinCommand::Cssep { args, p0 } => {
                let tree = compose_kjoin(&args.recipe, args.seed, args.k)?;
                let b = build_closure_separator(&tree, &AllCutsOracle, p0, &limits)?;
                let t = tree.trigraph();
                let v = verify_cs_separator(t, &b.separator, &limits)?;
                if let Some((k, s)) = v.counterexample {
                    return Err(Error::Verification(format!("clique {{{k}}} and stable set {{{s}}} are not separated")));
                }
                out.push_str(&b.separator.to_text());
                let mut report = String::new();
                for (i, s) in b.leaf_sizes.iter().enumerate() {
                    report.push_str(&format!("leaf {i}: cuts={s}\n"));
                }
                report.push_str(&format!("total: {}\nverified: true\n", b.separator.len()));
                out.push_str(&comment(&report));
            }
            KjoinCommand::Biclique { args, c, oracle } => {
                let tree = compose_kjoin(&args.recipe, args.seed, args.k)?;
                let oracle: Box<dyn BicliqueOracle> = match oracle.as_str() {
                    "exhaustive" => Box::new(ExhaustiveOracle::default()),
                    "bipartite" => Box::new(BipartiteOracle),
                    other => return Err(Error::InvalidInput(format!("unknown oracle `{other}`"))),
                };
                let e = extract_biclique_kjoin_unit(&tree, c, args.k, oracle.as_ref())?;
                let t = tree.trigraph();
                if let Some(why) = biclique_violation(t, &e.biclique) {
                    return Err(Error::Verification(why));
                }
                let (p, q) = (*c.numer() as u128, *c.denom() as u128);
                let pair = e.steps == [KStep::StrongPair] && e.biclique.weight >= 1;
                if !pair && q * e.biclique.weight < p * t.n() as u128 {
                    return Err(Error::Verification(format!("weight {} is below {c} of {}", e.biclique.weight, t.n())));
                }
                for s in &e.steps {
                    out.push_str(&format!("{s:?}\n"));
                }
                out.push_str(&e.biclique.to_text());
                out.push_str("\nverified: true\n");
            }
        },
        Command::Gen { recipe, seed } => {
            let g = generate(&recipe, seed)?;
            out.push_str(&format!("# recipe {recipe}\n# seed {seed}\n"));
            out.push_str(&g.truth_text());
            let doc = Document { trigraph: g.trigraph.clone(), weights: None, hints: g.hints() };
            out.push_str(&doc.to_text());
        }
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            let code = exit_code(&e);
            let msg = e.to_string().replace('\n', " ");
            eprintln!("tsep: error kind={} exit={code}: {msg}", kind_name(&e));
            ExitCode::from(code)
        }
    }
}
