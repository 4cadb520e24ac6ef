//! Command-line surface of the stratified space calculus.
//!
//! Exit codes: 0 on success or a clean report, 1 when a check reports
//! violations, 2 on input errors. Reports are machine-readable documents;
//! diagnostics go to stderr. File writes are atomic (write-temp-rename).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use strata_core::corpus::{generate_corpus, CorpusSpec};
use strata_core::diag::Report;
use strata_core::doc::{
    canonical_bytes, parse_morphism, parse_space, report_to_value, serialize_morphism,
    serialize_space, MorphDocument, SpaceDocument,
};
use strata_core::dot::export_dot;
use strata_core::id::Sign;
use strata_core::morphism::validate_morphism;
use strata_core::samples::GridSpec;
use strata_core::space::PresentedSpace;
use strata_core::tube::{separate_tubes, validate_tm, TMStructure};
use strata_core::unbend::{
    check_double_cover, check_unbending_is_tm, induced_tm_on_unbent, lift_morphism,
    space_with_tubes, unbend_space, ProcessingOrder,
};
use strata_core::unfold::{check_space_laws, functor_harness, lift_to_unfolding, unfold_space};
use strata_core::unfold::{HarnessCorpus, HarnessMorphism, HarnessSpace};
use strata_core::validate::validate_pseudomanifold;

#[derive(Parser)]
#[command(name = "strata", version, about = "stratified space calculus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct IoArgs {
    /// Input document path.
    input: PathBuf,
    /// Output path; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Normalize a space document to its presented form.
    Present {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Validate the pseudomanifold axioms and the tube structure.
    Validate {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Unbend once: remove the minimal part.
    Unbend {
        #[command(flatten)]
        io: IoArgs,
        /// Directory for per-step documents.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Unfold completely: iterate unbendings down to a manifold.
    Unfold {
        #[command(flatten)]
        io: IoArgs,
        /// Directory for per-step documents.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Lift a morphism through the unbendings (or the full unfoldings).
    Lift {
        #[command(flatten)]
        io: IoArgs,
        /// Sign convention for the copies.
        #[arg(long, default_value = "+")]
        sign: String,
        /// Lift through the full unfoldings instead of one unbending.
        #[arg(long)]
        unfold: bool,
    },
    /// Run law checks.
    Check {
        #[command(subcommand)]
        what: CheckCommand,
    },
    /// Export the incidence poset as DOT.
    ExportDot {
        #[command(flatten)]
        io: IoArgs,
        /// Annotate the unbending of the space instead of the space itself.
        #[arg(long)]
        unbend: bool,
    },
}

#[derive(Subcommand)]
enum CheckCommand {
    /// Desingularization laws of one space document.
    Laws {
        #[command(flatten)]
        io: IoArgs,
        /// Grid density override (points per base axis).
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Laws over a generated corpus.
    Corpus {
        /// Generator seed.
        #[arg(long, default_value_t = CorpusSpec::default().seed)]
        seed: u64,
        /// Number of members.
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Functor laws over the morphism documents of a directory, or over
    /// the built-in fixture corpus when no directory is given.
    Functor {
        dir: Option<PathBuf>,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn read_input(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

/// Relative output paths may be redirected under `STRATA_OUT_DIR`.
fn out_path(path: &Path) -> PathBuf {
    match std::env::var_os("STRATA_OUT_DIR") {
        Some(base) if path.is_relative() => Path::new(&base).join(path),
        _ => path.to_path_buf(),
    }
}

/// Atomic write: temp file in the target directory, then rename.
fn write_atomic(raw: &Path, text: &str) -> Result<(), String> {
    let path = out_path(raw);
    let path = path.as_path();
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    let tmp = dir.join(format!(
        ".{}.tmp",
        path.file_name().and_then(|n| n.to_str()).unwrap_or("out")
    ));
    std::fs::write(&tmp, text).map_err(|e| format!("{}: {e}", tmp.display()))?;
    std::fs::rename(&tmp, path).map_err(|e| format!("{}: {e}", path.display()))
}

fn emit(output: Option<&PathBuf>, text: &str) -> Result<(), String> {
    match output {
        Some(path) => write_atomic(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_space(path: &Path) -> Result<(PresentedSpace, TMStructure), String> {
    let text = read_input(path)?;
    let doc = parse_space(&text).map_err(|e| e.to_string())?;
    doc.resolve().map_err(|e| e.to_string())
}

fn grid_spec(n: Option<usize>) -> GridSpec {
    match n {
        Some(n) => GridSpec::with_axis_points(n),
        None => GridSpec::default(),
    }
}

fn presented_doc(space: &PresentedSpace, tm: &TMStructure) -> String {
    serialize_space(space, tm)
}

fn report_exit(report: &Report) -> ExitCode {
    if report.is_clean() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Present { io } => {
            let (space, tm) = load_space(&io.input)?;
            let tm = separate_tubes(&space, &tm);
            emit(io.output.as_ref(), &presented_doc(&space, &tm))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { io } => {
            let (space, tm) = load_space(&io.input)?;
            let mut report = validate_pseudomanifold(&space);
            report.merge(validate_tm(&space, &tm));
            emit(
                io.output.as_ref(),
                &canonical_bytes(&report_to_value("validate", &report)),
            )?;
            if !report.is_clean() {
                eprintln!("{report}");
            }
            Ok(report_exit(&report))
        }
        Command::Unbend { io, trace } => {
            let (space, tm) = load_space(&io.input)?;
            let tm = separate_tubes(&space, &tm);
            let result = unbend_space(&space, &tm, ProcessingOrder::Canonical)
                .map_err(|e| e.to_string())?;
            let induced = induced_tm_on_unbent(&space, &tm, &result);
            let unbent = space_with_tubes(result.space(), &induced);
            let unbent_tm = separate_tubes(&unbent, &induced);
            let mut report = check_double_cover(&result);
            report.merge(check_unbending_is_tm(
                &space,
                &tm,
                &result,
                &induced,
                &GridSpec::default(),
            ));
            if let Some(dir) = trace {
                write_atomic(
                    &dir.join("step1.space"),
                    &presented_doc(&unbent, &unbent_tm),
                )?;
                write_atomic(
                    &dir.join("step1.report"),
                    &canonical_bytes(&report_to_value("unbend", &report)),
                )?;
            }
            emit(io.output.as_ref(), &presented_doc(&unbent, &unbent_tm))?;
            if !report.is_clean() {
                eprintln!("{report}");
            }
            Ok(report_exit(&report))
        }
        Command::Unfold { io, trace } => {
            let (space, tm) = load_space(&io.input)?;
            let tm = separate_tubes(&space, &tm);
            let unfold =
                unfold_space(&space, &tm, ProcessingOrder::Canonical).map_err(|e| e.to_string())?;
            if let Some(dir) = trace.as_ref() {
                for (k, step) in unfold.trace.iter().enumerate() {
                    let step_space = space_with_tubes(step.result.space(), &step.induced);
                    write_atomic(
                        &dir.join(format!("step{}.space", k + 1)),
                        &presented_doc(&step_space, &step.induced),
                    )?;
                }
            }
            let final_space = unfold.final_space();
            let final_tm = TMStructure::canonical(final_space);
            emit(io.output.as_ref(), &presented_doc(final_space, &final_tm))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Lift { io, sign, unfold } => {
            let sign = match sign.as_str() {
                "+" | "plus" => Sign::Plus,
                "-" | "minus" => Sign::Minus,
                other => return Err(format!("unknown sign {other:?}")),
            };
            let text = read_input(&io.input)?;
            let doc = parse_morphism(&text).map_err(|e| e.to_string())?;
            let (dom, dom_tm_raw) = doc.domain.resolve().map_err(|e| e.to_string())?;
            let (cod, cod_tm_raw) = doc.codomain.resolve().map_err(|e| e.to_string())?;
            let dom_tm = separate_tubes(&dom, &dom_tm_raw);
            let cod_tm = separate_tubes(&cod, &cod_tm_raw);
            let grid = GridSpec::default();
            let report = validate_morphism(&dom, &cod, &dom_tm, &cod_tm, &doc.morphism, &grid);
            if !report.is_clean() {
                eprintln!("{report}");
                return Ok(ExitCode::from(1));
            }
            let (lifted, new_dom, new_dom_tm, new_cod, new_cod_tm) = if unfold {
                let dom_uf = unfold_space(&dom, &dom_tm, ProcessingOrder::Canonical)
                    .map_err(|e| e.to_string())?;
                let cod_uf = unfold_space(&cod, &cod_tm, ProcessingOrder::Canonical)
                    .map_err(|e| e.to_string())?;
                let lifted = lift_to_unfolding(&doc.morphism, &dom_uf, &cod_uf, &grid)
                    .map_err(|e| e.to_string())?;
                let fd = dom_uf.final_space().clone();
                let fc = cod_uf.final_space().clone();
                let fd_tm = TMStructure::canonical(&fd);
                let fc_tm = TMStructure::canonical(&fc);
                (lifted, fd, fd_tm, fc, fc_tm)
            } else {
                let dom_ub = unbend_space(&dom, &dom_tm, ProcessingOrder::Canonical)
                    .map_err(|e| e.to_string())?;
                let cod_ub = unbend_space(&cod, &cod_tm, ProcessingOrder::Canonical)
                    .map_err(|e| e.to_string())?;
                let lifted = lift_morphism(&doc.morphism, sign, &dom_ub, &cod_ub, &grid)
                    .map_err(|e| e.to_string())?;
                let dom_ind = induced_tm_on_unbent(&dom, &dom_tm, &dom_ub);
                let cod_ind = induced_tm_on_unbent(&cod, &cod_tm, &cod_ub);
                let ud = space_with_tubes(dom_ub.space(), &dom_ind);
                let uc = space_with_tubes(cod_ub.space(), &cod_ind);
                (lifted, ud, dom_ind, uc, cod_ind)
            };
            let out = MorphDocument {
                domain: SpaceDocument::Presented {
                    space: space_with_tubes(&new_dom, &new_dom_tm),
                    nesting: new_dom_tm.nesting.clone(),
                    families: new_dom_tm.families.clone(),
                },
                codomain: SpaceDocument::Presented {
                    space: space_with_tubes(&new_cod, &new_cod_tm),
                    nesting: new_cod_tm.nesting.clone(),
                    families: new_cod_tm.families.clone(),
                },
                morphism: lifted,
            };
            emit(io.output.as_ref(), &serialize_morphism(&out))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Check { what } => match what {
            CheckCommand::Laws { io, grid } => {
                let (space, tm) = load_space(&io.input)?;
                let tm = separate_tubes(&space, &tm);
                let report = check_space_laws(&space, &tm, &grid_spec(grid));
                emit(
                    io.output.as_ref(),
                    &canonical_bytes(&report_to_value("check-laws", &report)),
                )?;
                if !report.is_clean() {
                    eprintln!("{report}");
                }
                Ok(report_exit(&report))
            }
            CheckCommand::Corpus {
                seed,
                count,
                grid,
                output,
            } => {
                let members = generate_corpus(&CorpusSpec {
                    seed,
                    count,
                    ..CorpusSpec::default()
                });
                let grid = grid_spec(grid);
                let mut report = Report::new();
                for member in &members {
                    let tm = separate_tubes(
                        &member.space,
                        &TMStructure::canonical(&member.space),
                    );
                    let member_report = check_space_laws(&member.space, &tm, &grid);
                    if !member_report.is_clean() {
                        eprintln!("{}: {member_report}", member.name);
                    }
                    report.merge(member_report);
                }
                println!("checked {} members", members.len());
                emit(
                    output.as_ref(),
                    &canonical_bytes(&report_to_value("check-corpus", &report)),
                )?;
                Ok(report_exit(&report))
            }
            CheckCommand::Functor { dir, grid, output } => {
                let corpus = match dir {
                    Some(dir) => harness_from_dir(&dir)?,
                    None => strata_core::fixtures::harness_corpus(),
                };
                let results = functor_harness(&corpus, &grid_spec(grid));
                let mut failed = false;
                let mut lines = String::new();
                for r in &results {
                    let line = format!(
                        "{}: {} [{}]{}\n",
                        r.law,
                        r.member,
                        if r.passed { "pass" } else { "fail" },
                        if r.detail.is_empty() {
                            String::new()
                        } else {
                            format!(" {}", r.detail)
                        }
                    );
                    lines.push_str(&line);
                    failed |= !r.passed;
                }
                emit(output.as_ref(), &lines)?;
                Ok(if failed {
                    ExitCode::from(1)
                } else {
                    ExitCode::SUCCESS
                })
            }
        },
        Command::ExportDot { io, unbend } => {
            let (space, tm) = load_space(&io.input)?;
            let text = if unbend {
                let tm = separate_tubes(&space, &tm);
                let result = unbend_space(&space, &tm, ProcessingOrder::Canonical)
                    .map_err(|e| e.to_string())?;
                export_dot(result.space(), Some(&result.desing))
            } else {
                export_dot(&space, None)
            };
            emit(io.output.as_ref(), &text)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// Builds a harness corpus from the `.morph` documents of a directory; the
/// spaces are the embedded domains and codomains, deduplicated.
fn harness_from_dir(dir: &Path) -> Result<HarnessCorpus, String> {
    let mut spaces: Vec<HarnessSpace> = Vec::new();
    let mut morphisms: Vec<HarnessMorphism> = Vec::new();
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| format!("{}: {e}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "morph"))
        .collect();
    entries.sort();
    let mut intern = |space: PresentedSpace,
                      tm: TMStructure,
                      spaces: &mut Vec<HarnessSpace>|
     -> usize {
        let tm = separate_tubes(&space, &tm);
        let key = serialize_space(&space, &tm);
        if let Some(&i) = index.get(&key) {
            return i;
        }
        let i = spaces.len();
        spaces.push(HarnessSpace {
            name: format!("space-{i}"),
            space,
            tm,
        });
        index.insert(key, i);
        i
    };
    for path in &entries {
        let text = read_input(path)?;
        let doc = parse_morphism(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        let (dom, dom_tm) = doc.domain.resolve().map_err(|e| e.to_string())?;
        let (cod, cod_tm) = doc.codomain.resolve().map_err(|e| e.to_string())?;
        let dom_index = intern(dom, dom_tm, &mut spaces);
        let cod_index = intern(cod, cod_tm, &mut spaces);
        morphisms.push(HarnessMorphism {
            name: path
                .file_stem()
                .and_then(|n| n.to_str())
                .unwrap_or("morphism")
                .to_string(),
            dom: dom_index,
            cod: cod_index,
            morphism: doc.morphism,
        });
    }
    let mut pairs = Vec::new();
    for (gi, g) in morphisms.iter().enumerate() {
        for (fi, f) in morphisms.iter().enumerate() {
            if f.cod == g.dom {
                pairs.push((gi, fi));
            }
        }
    }
    Ok(HarnessCorpus {
        spaces,
        morphisms,
        pairs,
    })
}
