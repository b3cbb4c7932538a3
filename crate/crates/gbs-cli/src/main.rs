//! `gbs`: decision procedures for generalized Baumslag-Solitar groups
//! presented as labeled graphs.
//!
//! Exit codes are a stable contract: 0 success/isomorphic, 1 not
//! isomorphic, 2 unsupported or out of scope, 3 invalid input.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gbs_core::betti1::{self, IsoVerdict};
use gbs_core::graph::{classify_elementary, Edge, EdgePath, ElementaryClass, LabeledGraph};
use gbs_core::mobility;
use gbs_core::modular::{modulus_generator, ModulusGenerator};
use gbs_core::moves::{self, reduce};
use gbs_core::num::{One, Signed};
use gbs_cli::{doc, report};

#[derive(Parser)]
#[command(name = "gbs", version, about = "Isomorphism and structure of GBS groups")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate a graph document.
    Validate { file: PathBuf },
    /// Print Betti number, reducedness, elementary class, modulus,
    /// per-edge mobility, s, ascending flag, and PLGI summary.
    Info {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Fully reduce the graph (collapse moves) and emit it.
    Reduce {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Put a Betti-one graph into ascending or non-ascending normal form.
    NormalForm {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Enumerate the reduced labeled graphs of the group (no mobile
    /// edges), or its non-ascending normal forms.
    Enum {
        file: PathBuf,
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Decide whether two labeled graphs present isomorphic groups.
    Iso { file1: PathBuf, file2: PathBuf },
    /// Slide an edge along a path (debug). Prefix an id with `~` to
    /// reverse it.
    Slide {
        file: PathBuf,
        #[arg(long)]
        edge: String,
        #[arg(long)]
        path: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

const EXIT_OK: u8 = 0;
const EXIT_NOT_ISO: u8 = 1;
const EXIT_UNSUPPORTED: u8 = 2;
const EXIT_INVALID: u8 = 3;

fn load(path: &Path) -> Result<LabeledGraph, u8> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        EXIT_INVALID
    })?;
    doc::parse_graph(&text).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        EXIT_INVALID
    })
}

fn write_out(g: &LabeledGraph, output: &Option<PathBuf>) -> u8 {
    let text = doc::emit(g);
    match output {
        None => {
            print!("{text}");
            EXIT_OK
        }
        Some(path) => match std::fs::write(path, text) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                eprintln!("error: cannot write {}: {e}", path.display());
                EXIT_INVALID
            }
        },
    }
}

fn resolve_edge(g: &LabeledGraph, handle: &str) -> Result<Edge, u8> {
    g.edge_by_name(handle).ok_or_else(|| {
        eprintln!("error: no edge named {handle}");
        EXIT_INVALID
    })
}

fn run_normal_form(g: &LabeledGraph, output: &Option<PathBuf>) -> u8 {
    let r = reduce(g);
    if classify_elementary(&r) != ElementaryClass::NonElementary {
        eprintln!("out of scope: elementary group has no normal form here");
        return EXIT_UNSUPPORTED;
    }
    if r.betti_number() != 1 {
        eprintln!("out of scope: normal forms are defined for Betti number one");
        return EXIT_UNSUPPORTED;
    }
    let ascending = betti1::is_ascending_b1(&r).expect("checked").is_some();
    let nf = if ascending {
        betti1::ascending_normal_form(&r)
    } else {
        betti1::nonascending_normal_form(&r)
    };
    match nf {
        Ok(nf) => write_out(&nf, output),
        Err(e) => {
            eprintln!("out of scope: {e}");
            EXIT_UNSUPPORTED
        }
    }
}

fn run_enum(g: &LabeledGraph, limit: Option<usize>) -> u8 {
    let r = reduce(g);
    if classify_elementary(&r) != ElementaryClass::NonElementary {
        eprintln!("out of scope: elementary group");
        return EXIT_UNSUPPORTED;
    }
    let report = mobility::mobility_report(&r).expect("reduced");
    let any_mobile = report.iter().any(|(_, m)| m.is_mobile());
    let graphs = if !any_mobile {
        mobility::enumerate_lg_no_mobile(&r).expect("no mobile edges")
    } else if r.betti_number() == 1
        && betti1::is_ascending_b1(&r).expect("checked").is_none()
        && matches!(
            modulus_generator(&r).expect("Betti one"),
            ModulusGenerator::Cycle { ref q, .. } if q.is_integer() && !q.abs().is_one()
        )
    {
        betti1::enumerate_normal_forms(&r).expect("non-ascending integral modulus")
    } else {
        eprintln!("out of scope: the set of reduced labeled graphs is infinite");
        return EXIT_UNSUPPORTED;
    };
    let docs: Vec<_> = graphs
        .values()
        .take(limit.unwrap_or(usize::MAX))
        .map(doc::to_document)
        .collect();
    println!(
        "{}",
        serde_json::to_string_pretty(&docs).expect("documents serialize")
    );
    EXIT_OK
}

fn run_slide(g: &LabeledGraph, edge: &str, path: &str, output: &Option<PathBuf>) -> u8 {
    let e = match resolve_edge(g, edge) {
        Ok(e) => e,
        Err(code) => return code,
    };
    let mut edges = Vec::new();
    for part in path.split(',').filter(|p| !p.is_empty()) {
        match resolve_edge(g, part.trim()) {
            Ok(x) => edges.push(x),
            Err(code) => return code,
        }
    }
    match moves::slide(g, e, &EdgePath(edges)) {
        Ok(h) => write_out(&h, output),
        Err(err) => {
            eprintln!("invalid slide: {err}");
            EXIT_UNSUPPORTED
        }
    }
}

fn run() -> u8 {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Validate { file } => match load(&file) {
            Ok(_) => {
                println!("valid");
                EXIT_OK
            }
            Err(code) => code,
        },
        Cmd::Info { file, json } => match load(&file) {
            Ok(g) => {
                let rep = report::info(&g);
                if json {
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&rep.json).expect("serializes")
                    );
                } else {
                    print!("{}", rep.text);
                }
                EXIT_OK
            }
            Err(code) => code,
        },
        Cmd::Reduce { file, output } => match load(&file) {
            Ok(g) => write_out(&reduce(&g), &output),
            Err(code) => code,
        },
        Cmd::NormalForm { file, output } => match load(&file) {
            Ok(g) => run_normal_form(&g, &output),
            Err(code) => code,
        },
        Cmd::Enum { file, limit } => match load(&file) {
            Ok(g) => run_enum(&g, limit),
            Err(code) => code,
        },
        Cmd::Iso { file1, file2 } => {
            let g = match load(&file1) {
                Ok(g) => g,
                Err(code) => return code,
            };
            let h = match load(&file2) {
                Ok(h) => h,
                Err(code) => return code,
            };
            match betti1::isomorphic(&g, &h) {
                IsoVerdict::Isomorphic => {
                    println!("ISOMORPHIC");
                    EXIT_OK
                }
                IsoVerdict::NotIsomorphic => {
                    println!("NOT_ISOMORPHIC");
                    EXIT_NOT_ISO
                }
                IsoVerdict::Unsupported(reason) => {
                    println!("UNSUPPORTED({reason})");
                    EXIT_UNSUPPORTED
                }
            }
        }
        Cmd::Slide {
            file,
            edge,
            path,
            output,
        } => match load(&file) {
            Ok(g) => run_slide(&g, &edge, &path, &output),
            Err(code) => code,
        },
    }
}

fn main() -> ExitCode {
    ExitCode::from(run())
}
