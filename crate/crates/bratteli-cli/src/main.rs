//! Command-line front end. Every subcommand is a thin wrapper over the
//! library: read documents, call one library entry point, print documents or
//! reports. Exit codes: 0 success / verified PASS, 1 verified FAIL or
//! refused precondition, 2 usage or parse error, 3 undecidable within the
//! given depth.

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use bratteli::classify::{classify, derive_descriptor};
use bratteli::dsl::{self, Document};
use bratteli::error::Error;
use bratteli::gen::{random_diagram, GenConfig, GenMode};
use bratteli::graph::CycleAnswer;
use bratteli::normalize::{normalize_fd, normalize_unital, trim_dimension_one};
use bratteli::realize::{build_ultragraph, realize_row_finite, InjectionChoice};
use bratteli::tower::{find_mn_chain, simulate_direct_limit, verify_roundtrip, ChainAnswer};
use bratteli::ultragraph::Ultragraph;

#[derive(Parser)]
#[command(
    name = "bratteli",
    version,
    about = "Diagrams, ultragraph realizations, and AF-class membership"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Args)]
struct Common {
    /// Input file; `-` or nothing reads standard input.
    input: Option<PathBuf>,
    /// Output style for reports (documents always print canonically).
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Cap on enumeration frontiers used by quotient searches.
    #[arg(long, default_value_t = 1 << 16)]
    limit: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Fd,
    Unital,
}

#[derive(Subcommand)]
enum Command {
    /// Check every stored invariant of a document.
    Validate(Common),
    /// Keep only the listed levels, multiplying the matrices in between.
    Telescope {
        #[command(flatten)]
        common: Common,
        /// Comma-separated 1-based level numbers, strictly increasing.
        #[arg(long, value_delimiter = ',', required = true)]
        keep: Vec<usize>,
    },
    /// Remove dimension-1 vertices (refused if a scalar quotient exists).
    Trim(Common),
    /// Telescope to the growth normal form.
    Normalize {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long, default_value_t = 16)]
        max_depth: usize,
    },
    /// Build the ultragraph presentation of a diagram.
    Realize {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        depth: usize,
        /// Require strict growth and emit the expanded row-finite graph.
        #[arg(long)]
        row_finite: bool,
    },
    /// Edge matrix of a graph, or the Exel-Laca matrix of an ultragraph.
    ToMatrix(Common),
    /// The canonical ultragraph of a matrix, or a graph seen edge-by-edge.
    ToUltragraph(Common),
    /// Expand an ultragraph into a graph, or a matrix into its dual graph.
    Expand(Common),
    /// Adjoin a unit vertex ranging over the whole vertex set.
    M2Unitize(Common),
    /// Split a graph along its sinks into matrix blocks plus a residual.
    DecomposeSinks(Common),
    /// Run the finite-dimensional tower of a realized ultragraph.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        depth: usize,
    },
    /// Realize, simulate, and compare against the input diagram.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        depth: usize,
    },
    /// Class membership of a descriptor (or of a diagram, derived first).
    Classify {
        #[command(flatten)]
        common: Common,
        /// Analysis depth when the input is a diagram.
        #[arg(long, default_value_t = 8)]
        depth: usize,
    },
    /// Search for n vertices chained through the edge ranges.
    FindChain {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: usize,
    },
    /// Generate a random valid diagram for test corpora.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Mode::Fd)]
        mode: Mode,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long, default_value_t = 4)]
        max_width: usize,
        #[arg(long, default_value_t = 200)]
        max_dim: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, Error::Parse { .. }) {
                ExitCode::from(2)
            } else if e.is_unknown_at_depth() {
                ExitCode::from(3)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn read_input(path: &Option<PathBuf>) -> Result<String, Error> {
    let read_stdin = || {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Error::Other(format!("reading standard input: {e}")))?;
        Ok(buf)
    };
    match path {
        None => read_stdin(),
        Some(p) if p.as_os_str() == "-" => read_stdin(),
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| Error::Other(format!("reading {}: {e}", p.display()))),
    }
}

fn docs(common: &Common) -> Result<Vec<Document>, Error> {
    let text = read_input(&common.input)?;
    dsl::parse_all(&text)
}

fn first_doc(common: &Common) -> Result<Document, Error> {
    docs(common)?
        .into_iter()
        .next()
        .ok_or_else(|| Error::Parse {
            line: 1,
            column: 1,
            message: "empty input".into(),
        })
}

fn want_diagram(doc: Document) -> Result<bratteli::BratteliDiagram, Error> {
    match doc {
        Document::Diagram(d) => Ok(d),
        other => Err(Error::other(format!(
            "expected a diagram document, got a {}",
            other.kind()
        ))),
    }
}

fn want_ultragraph(doc: Document) -> Result<Ultragraph, Error> {
    match doc {
        Document::Ultragraph(u) => Ok(u),
        Document::Realized(r) => Ok(r.ultragraph().clone()),
        other => Err(Error::other(format!(
            "expected an ultragraph document, got a {}",
            other.kind()
        ))),
    }
}

/// A two-column report that renders as plain text or as a keyed block.
struct Report {
    kind: &'static str,
    rows: Vec<(String, String)>,
}

impl Report {
    fn new(kind: &'static str) -> Self {
        Report {
            kind,
            rows: Vec::new(),
        }
    }

    fn row(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.rows.push((key.into(), value.into()));
    }

    fn emit(&self, format: Format) {
        match format {
            Format::Text => {
                for (k, v) in &self.rows {
                    if v.is_empty() {
                        println!("{k}");
                    } else {
                        println!("{k}: {v}");
                    }
                }
            }
            Format::Structured => {
                println!("{} {{", self.kind);
                for (k, v) in &self.rows {
                    println!("  {} = {}", k.replace(' ', "_"), v);
                }
                println!("}}");
            }
        }
    }
}

fn run(cmd: Command) -> Result<ExitCode, Error> {
    match cmd {
        Command::Validate(common) => {
            let doc = first_doc(&common)?;
            let mut report = Report::new("validate");
            let ok = match &doc {
                Document::Diagram(d) => {
                    let r = d.validate();
                    if r.is_valid() {
                        report.row("result", "valid");
                        if r.boundary_waived {
                            report.row("note", "truncation boundary at the final level");
                        }
                    } else {
                        for v in &r.violations {
                            report.row("violation", v.to_string());
                        }
                        report.row("result", "invalid");
                    }
                    r.is_valid()
                }
                Document::Graph(g) => {
                    let list = |items: Vec<String>| {
                        if items.is_empty() {
                            "none".to_string()
                        } else {
                            items.join(" ")
                        }
                    };
                    report.row("cycles", cycle_text(&g.find_cycle()));
                    report.row("sinks", list(g.sinks()));
                    report.row("infinite emitters", list(g.infinite_emitters()));
                    report.row("result", "valid");
                    true
                }
                Document::Ultragraph(u) => {
                    report.row("cycles", cycle_text(&u.find_cycle()));
                    report.row(
                        "source map",
                        if u.source_bijective().is_ok() {
                            "bijective"
                        } else {
                            "not bijective"
                        },
                    );
                    report.row("result", "valid");
                    true
                }
                Document::Realized(r) => {
                    report.row("cycles", cycle_text(&r.ultragraph().find_cycle()));
                    report.row("provenance", "replayed exactly");
                    report.row("result", "valid");
                    true
                }
                Document::Matrix(m) => {
                    report.row("cycles", cycle_text(&m.find_cycle()));
                    report.row("result", "valid");
                    true
                }
                Document::Descriptor(a) => {
                    a.closed()?;
                    report.row("result", "consistent");
                    true
                }
            };
            report.emit(common.format);
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Telescope { common, keep } => {
            let d = want_diagram(first_doc(&common)?)?;
            if keep.contains(&0) {
                return Err(Error::BadKeepList);
            }
            let keep0: Vec<usize> = keep.iter().map(|&k| k - 1).collect();
            let mut t = d.telescope(&keep0)?;
            t.set_name(format!("{}.telescoped", d.name()));
            print!("{}", dsl::print(&Document::Diagram(t)));
            Ok(ExitCode::SUCCESS)
        }
        Command::Trim(common) => {
            let d = want_diagram(first_doc(&common)?)?;
            let t = trim_dimension_one(&d, common.limit)?;
            print!("{}", dsl::print(&Document::Diagram(t)));
            Ok(ExitCode::SUCCESS)
        }
        Command::Normalize {
            common,
            mode,
            max_depth,
        } => {
            let d = want_diagram(first_doc(&common)?)?;
            let n = match mode {
                Mode::Fd => normalize_fd(&d, max_depth, common.limit)?,
                Mode::Unital => normalize_unital(&d, max_depth, common.limit)?,
            };
            print!("{}", dsl::print(&Document::Diagram(n)));
            Ok(ExitCode::SUCCESS)
        }
        Command::Realize {
            common,
            depth,
            row_finite,
        } => {
            let d = want_diagram(first_doc(&common)?)?;
            if row_finite {
                let (_realized, graph) =
                    realize_row_finite(&d, depth, InjectionChoice::Deterministic)?;
                print!("{}", dsl::print(&Document::Graph(graph)));
            } else {
                let realized = build_ultragraph(&d, depth, InjectionChoice::Deterministic)?;
                print!("{}", dsl::print(&Document::Realized(realized)));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::ToMatrix(common) => {
            let m = match first_doc(&common)? {
                Document::Graph(g) => g.edge_matrix()?,
                Document::Ultragraph(u) => u.edge_matrix()?,
                Document::Realized(r) => r.ultragraph().edge_matrix()?,
                other => {
                    return Err(Error::other(format!(
                        "to-matrix takes a graph or ultragraph, got a {}",
                        other.kind()
                    )))
                }
            };
            print!("{}", dsl::print(&Document::Matrix(m)));
            Ok(ExitCode::SUCCESS)
        }
        Command::ToUltragraph(common) => {
            let u = match first_doc(&common)? {
                Document::Matrix(m) => m.canonical_ultragraph()?,
                Document::Graph(g) => Ultragraph::from_graph(&g)?,
                other => {
                    return Err(Error::other(format!(
                        "to-ultragraph takes a matrix or graph, got a {}",
                        other.kind()
                    )))
                }
            };
            print!("{}", dsl::print(&Document::Ultragraph(u)));
            Ok(ExitCode::SUCCESS)
        }
        Command::Expand(common) => {
            let g = match first_doc(&common)? {
                Document::Ultragraph(u) => u.expand()?,
                Document::Realized(r) => r.resolved_truncation()?.expand()?,
                Document::Matrix(m) => m.dual_graph()?,
                other => {
                    return Err(Error::other(format!(
                        "expand takes an ultragraph or matrix, got a {}",
                        other.kind()
                    )))
                }
            };
            print!("{}", dsl::print(&Document::Graph(g)));
            Ok(ExitCode::SUCCESS)
        }
        Command::M2Unitize(common) => {
            let u = want_ultragraph(first_doc(&common)?)?;
            print!("{}", dsl::print(&Document::Ultragraph(u.m2_unitize()?)));
            Ok(ExitCode::SUCCESS)
        }
        Command::DecomposeSinks(common) => {
            let g = match first_doc(&common)? {
                Document::Graph(g) => g,
                other => {
                    return Err(Error::other(format!(
                        "decompose-sinks takes a graph, got a {}",
                        other.kind()
                    )))
                }
            };
            let d = g.decompose_sinks()?;
            // The summary rides along as comments so the residual document
            // still parses in a pipeline.
            for (sink, n) in &d.finite_summands {
                println!("# summand {sink}: {n}");
            }
            for sink in &d.compact_summands {
                println!("# compact summand {sink}");
            }
            if d.continues {
                println!("# continues: the template keeps generating summands");
            }
            print!("{}", dsl::print(&Document::Graph(d.residual)));
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate { common, depth } => {
            let r = match first_doc(&common)? {
                Document::Realized(r) => r,
                Document::Diagram(d) => {
                    build_ultragraph(&d, depth, InjectionChoice::Deterministic)?
                }
                other => {
                    return Err(Error::other(format!(
                        "simulate takes a realized ultragraph or diagram, got a {}",
                        other.kind()
                    )))
                }
            };
            let tower = simulate_direct_limit(&r, depth)?;
            let mut report = Report::new("tower");
            for (n, shape) in tower.shapes.iter().enumerate() {
                report.row(format!("shape {}", n + 1), shape.to_string());
                if n > 0 {
                    report.row(
                        format!("inclusion {}->{}", n, n + 1),
                        tower.inclusions[n - 1]
                            .matrix()
                            .to_string()
                            .replace('\n', " "),
                    );
                }
            }
            report.emit(common.format);
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { common, depth } => {
            let d = want_diagram(first_doc(&common)?)?;
            let report = verify_roundtrip(&d, depth, InjectionChoice::Deterministic)?;
            let mut out = Report::new("verify");
            for level in &report.levels {
                out.row(
                    format!("level {}", level.level),
                    if level.pass { "PASS" } else { "FAIL" },
                );
            }
            if let Some(via) = report.via_graph {
                out.row("graph presentation", if via { "PASS" } else { "FAIL" });
            }
            out.row("result", if report.pass { "PASS" } else { "FAIL" });
            out.emit(common.format);
            Ok(if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Classify { common, depth } => {
            let doc = first_descriptor_or_first(&common)?;
            let descriptor = match doc {
                Document::Descriptor(a) => a,
                Document::Diagram(d) => derive_descriptor(&d, depth, common.limit)?,
                other => {
                    return Err(Error::other(format!(
                        "classify takes a descriptor or diagram, got a {}",
                        other.kind()
                    )))
                }
            };
            let verdict = classify(&descriptor)?;
            let mut report = Report::new("classify");
            for class in bratteli::classify::AlgClass::ALL {
                let cites: Vec<String> = verdict
                    .citations(class)
                    .iter()
                    .map(|r| r.to_string())
                    .collect();
                let status = verdict.status(class);
                report.row(
                    class.short(),
                    if cites.is_empty() {
                        status.to_string()
                    } else {
                        format!("{} [{}]", status, cites.join(" "))
                    },
                );
            }
            report.emit(common.format);
            Ok(ExitCode::SUCCESS)
        }
        Command::FindChain { common, n } => {
            let u = want_ultragraph(first_doc(&common)?)?;
            match find_mn_chain(&u, n)? {
                ChainAnswer::Found(chain) => {
                    println!("chain: {}", chain.join(" "));
                    Ok(ExitCode::SUCCESS)
                }
                ChainAnswer::NotFound => {
                    println!("no chain of length {n}");
                    Ok(ExitCode::from(1))
                }
                ChainAnswer::Unknown => {
                    println!("unknown at this resolution depth");
                    Ok(ExitCode::from(3))
                }
            }
        }
        Command::Gen {
            seed,
            mode,
            depth,
            max_width,
            max_dim,
        } => {
            let cfg = GenConfig {
                mode: match mode {
                    Mode::Fd => GenMode::Realization,
                    Mode::Unital => GenMode::StrictGrowth,
                },
                depth,
                max_width,
                max_dim,
            };
            let d = random_diagram(&cfg, seed);
            print!("{}", dsl::print(&Document::Diagram(d)));
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// For classify: prefer the first descriptor (witness documents come before
/// it in the canonical layout), falling back to the first document.
fn first_descriptor_or_first(common: &Common) -> Result<Document, Error> {
    let all = docs(common)?;
    if let Some(d) = all.iter().find(|d| matches!(d, Document::Descriptor(_))) {
        return Ok(d.clone());
    }
    all.into_iter().next().ok_or_else(|| Error::Parse {
        line: 1,
        column: 1,
        message: "empty input".into(),
    })
}

fn cycle_text(answer: &CycleAnswer) -> String {
    match answer {
        CycleAnswer::Cycle(c) => format!("cycle through {}", c.join(" -> ")),
        CycleAnswer::Acyclic => "none".into(),
        CycleAnswer::AcyclicWithinDepth => "none within the represented depth".into(),
    }
}
