//! Command-line front end.
//!
//! Errors are reported on stderr as `error[<kind>]: <message>` with exit
//! codes 2 (usage), 3 (invalid point), 4 (`d∘d ≠ 0` or no valid sign
//! convention) and 5 (I/O).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::json;

use crate::chain_operad::{
    check_axioms, check_convention, diff, validate_sign_convention, CellTree, ChainElement,
    Generator, SignConvention,
};
use crate::homology::{build_complex, face_graph, homology_report, is_prime, FaceGraph};
use crate::points::{compose_point, equivalent, normal_form, LabeledPoint};
use crate::trees::{count_binary, enumerate_binary, enumerate_cell_trees, Tree};

#[derive(Debug, Parser)]
#[command(name = "uassoc", version, about = "Unital associahedra: trees, points, chains and homology")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate or count trees.
    #[command(subcommand)]
    Trees(TreesCmd),
    /// Normalize, compose or compare labeled points given as JSON files.
    #[command(subcommand)]
    Point(PointCmd),
    /// Differentials and sign-convention checks in the chain operad.
    #[command(subcommand)]
    Chain(ChainCmd),
    /// Cell counts and integer homology of K^u_{n,m}.
    Homology(ComplexArgs),
    /// Face poset of K^u_{n,m} as DOT or JSON.
    Export(ExportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
    Dot,
}

#[derive(Debug, Args)]
pub struct TreeArgs {
    #[arg(long)]
    pub leaves: usize,
    /// Exact number of black corks (binary trees).
    #[arg(long, conflicts_with = "max_corks")]
    pub corks: Option<usize>,
    /// Upper bound on the number of corks (cell trees).
    #[arg(long)]
    pub max_corks: Option<usize>,
    /// Binary trees with exactly `--corks` black corks (the default).
    #[arg(long, conflicts_with = "cells")]
    pub binary: bool,
    /// Cell trees with at most `--max-corks` black or white corks.
    #[arg(long)]
    pub cells: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum TreesCmd {
    Enum(TreeArgs),
    Count(TreeArgs),
}

#[derive(Debug, Subcommand)]
pub enum PointCmd {
    Normalize {
        file: PathBuf,
    },
    Compose {
        #[arg(long)]
        slot: usize,
        first: PathBuf,
        second: PathBuf,
    },
    Equivalent {
        first: PathBuf,
        second: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct ConventionArg {
    /// `standard`, `printed`, `validated` or a 7-digit coefficient vector.
    #[arg(long, default_value = "validated")]
    pub convention: String,
}

#[derive(Debug, Subcommand)]
pub enum ChainCmd {
    /// Differential of a tree monomial.
    Diff {
        #[arg(long)]
        tree: String,
        #[arg(long)]
        r#mod: Option<u64>,
        #[command(flatten)]
        conv: ConventionArg,
    },
    /// Check d∘d = 0 on all generators with n + 2m up to the weight bound.
    D2check {
        #[arg(long, default_value_t = 8)]
        max_weight: usize,
        #[command(flatten)]
        conv: ConventionArg,
    },
    /// Seeded random checks of the operad axioms and the Leibniz rule.
    Axioms {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[command(flatten)]
        conv: ConventionArg,
    },
}

#[derive(Debug, Args)]
pub struct ComplexArgs {
    #[arg(long)]
    pub arity: usize,
    #[arg(long, default_value_t = 0)]
    pub max_corks: usize,
    #[arg(long)]
    pub r#mod: Option<u64>,
    #[command(flatten)]
    pub conv: ConventionArg,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[command(flatten)]
    pub complex: ComplexArgs,
    #[arg(long, value_enum, default_value_t = Format::Dot)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// A failed command: exit code, error kind and message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
    /// Partial report still printed on stdout.
    pub stdout: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            kind: "usage",
            message: message.into(),
            stdout: String::new(),
        }
    }

    fn point(message: impl Into<String>) -> Self {
        CliError {
            code: 3,
            kind: "invalid-point",
            message: message.into(),
            stdout: String::new(),
        }
    }

    fn d2(message: impl Into<String>) -> Self {
        CliError {
            code: 4,
            kind: "d2",
            message: message.into(),
            stdout: String::new(),
        }
    }

    fn io(path: &Path, err: std::io::Error) -> Self {
        CliError {
            code: 5,
            kind: "io",
            message: format!("{}: {err}", path.display()),
            stdout: String::new(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "error[{}]: {}", self.kind, self.message)
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn convention(arg: &ConventionArg) -> Result<SignConvention, CliError> {
    match arg.convention.as_str() {
        "standard" | "paper" => Ok(SignConvention::standard()),
        "printed" => Ok(SignConvention::printed_cork_free()),
        "validated" => SignConvention::validated().map_err(|e| CliError::d2(e.to_string())),
        v => v.parse().map_err(|e: crate::chain_operad::ChainError| CliError::usage(e.to_string())),
    }
}

fn modulus(p: Option<u64>) -> Result<Option<u64>, CliError> {
    match p {
        Some(p) if !is_prime(p) => Err(CliError::usage(format!("--mod {p} is not prime"))),
        p => Ok(p),
    }
}

/// Runs a parsed command and returns what goes to stdout.
pub fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Trees(cmd) => run_trees(cmd),
        Command::Point(cmd) => run_point(cmd),
        Command::Chain(cmd) => run_chain(cmd),
        Command::Homology(args) => {
            let conv = convention(&args.conv)?;
            let p = modulus(args.r#mod)?;
            let report = homology_report(args.arity, args.max_corks, &conv, p)
                .map_err(|e| CliError::d2(e.to_string()))?;
            Ok(to_json(&report))
        }
        Command::Export(args) => run_export(args),
    }
}

fn run_trees(cmd: TreesCmd) -> Result<String, CliError> {
    let (args, count) = match cmd {
        TreesCmd::Enum(a) => (a, false),
        TreesCmd::Count(a) => (a, true),
    };
    let n = args.leaves;
    let trees: Vec<Tree> = if args.cells {
        let m = args
            .max_corks
            .or(args.corks)
            .ok_or_else(|| CliError::usage("--cells needs --max-corks"))?;
        enumerate_cell_trees(n, m, true)
    } else {
        let m = args
            .corks
            .ok_or_else(|| CliError::usage("binary trees need --corks"))?;
        if count {
            let c = count_binary(n, m);
            return Ok(format!("{c}\n"));
        }
        enumerate_binary(n, m)
    };
    if count {
        return Ok(format!("{}\n", trees.len()));
    }
    Ok(match args.format {
        Format::Json => {
            let v: Vec<String> = trees.iter().map(ToString::to_string).collect();
            to_json(&v)
        }
        _ => trees.iter().fold(String::new(), |mut s, t| {
            let _ = writeln!(s, "{t}");
            s
        }),
    })
}

fn read_point(path: &Path) -> Result<LabeledPoint, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::point(format!("{}: {e}", path.display())))
}

fn run_point(cmd: PointCmd) -> Result<String, CliError> {
    match cmd {
        PointCmd::Normalize { file } => Ok(to_json(&normal_form(&read_point(&file)?))),
        PointCmd::Compose {
            slot,
            first,
            second,
        } => {
            let (a, b) = (read_point(&first)?, read_point(&second)?);
            let c = compose_point(&a, slot, &b).map_err(|e| CliError::point(e.to_string()))?;
            Ok(to_json(&c))
        }
        PointCmd::Equivalent { first, second } => {
            let (a, b) = (read_point(&first)?, read_point(&second)?);
            Ok(to_json(&equivalent(&a, &b)))
        }
    }
}

fn run_chain(cmd: ChainCmd) -> Result<String, CliError> {
    match cmd {
        ChainCmd::Diff { tree, r#mod, conv } => {
            let conv = convention(&conv)?;
            let p = modulus(r#mod)?;
            let t = CellTree::parse(&tree).map_err(|e| CliError::usage(e.to_string()))?;
            let mut d = diff(&ChainElement::monomial(t), &conv);
            if let Some(p) = p {
                d = d.reduce_mod(&BigInt::from(p));
            }
            Ok(to_json(&d))
        }
        ChainCmd::D2check { max_weight, conv } => {
            let selected = convention(&conv)?;
            let search = validate_sign_convention(max_weight)
                .map_err(|e| CliError::d2(e.to_string()))?;
            let gens = Generator::all(max_weight);
            let per_generator: Vec<_> = gens
                .iter()
                .map(|g| {
                    let check = check_convention(&selected, std::slice::from_ref(g));
                    json!({
                        "generator": g.to_string(),
                        "tree": g.tree().to_string(),
                        "pass": check.passes,
                    })
                })
                .collect();
            let passes = per_generator.iter().all(|v| v["pass"] == true);
            let out = to_json(&json!({
                "convention": selected,
                "max_weight": max_weight,
                "pass": passes,
                "generators": per_generator,
                "search": search,
            }));
            if passes {
                Ok(out)
            } else {
                Err(CliError {
                    stdout: out,
                    ..CliError::d2(format!("convention {selected} fails d∘d = 0"))
                })
            }
        }
        ChainCmd::Axioms {
            seed,
            samples,
            conv,
        } => {
            let conv = convention(&conv)?;
            let report = check_axioms(&conv, seed, samples);
            let out = to_json(&json!({
                "seed": seed,
                "convention": conv,
                "pass": report.passed(),
                "report": report,
            }));
            if report.passed() {
                Ok(out)
            } else {
                Err(CliError {
                    stdout: out,
                    ..CliError::d2("operad axioms or Leibniz rule failed")
                })
            }
        }
    }
}

/// Renders the face poset as a DOT digraph.
pub fn to_dot(g: &FaceGraph, name: &str) -> String {
    let mut s = format!("digraph \"{name}\" {{\n");
    for (k, node) in g.nodes.iter().enumerate() {
        let _ = writeln!(
            s,
            "  n{k} [label=\"{}\", dim={}];",
            node.tree, node.dim
        );
    }
    for a in &g.arcs {
        let _ = writeln!(s, "  n{} -> n{} [label=\"{}\"];", a.from, a.to, a.coef);
    }
    s.push_str("}\n");
    s
}

fn run_export(args: ExportArgs) -> Result<String, CliError> {
    let c = &args.complex;
    let conv = convention(&c.conv)?;
    let complex =
        build_complex(c.arity, c.max_corks, &conv).map_err(|e| CliError::d2(e.to_string()))?;
    let graph = face_graph(&complex);
    let text = match args.format {
        Format::Json => to_json(&graph),
        Format::Dot | Format::Text => {
            to_dot(&graph, &format!("K^u_{{{},{}}}", c.arity, c.max_corks))
        }
    };
    match args.output {
        Some(path) => {
            fs::write(&path, &text).map_err(|e| CliError::io(&path, e))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

/// Parses `args`, runs the command and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("{}", CliError::usage(first));
            return 2;
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            0
        }
        Err(e) => {
            print!("{}", e.stdout);
            eprintln!("{e}");
            e.code
        }
    }
}
