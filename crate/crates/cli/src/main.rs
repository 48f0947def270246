//! `torik`: exact K-stability invariants of Gorenstein toric Fano
//! varieties presented by reflexive lattice polytopes.
//!
//! Exit codes: 0 success / property holds, 1 mathematical negative (not
//! reflexive, mismatch, destabilization pipeline unavailable), 2 usage or
//! parse error. All numeric output is exact; rationals print as `p/q`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::json;

use torik::fixtures::{self, ActionFixture};
use torik::render;
use torik_core::filtration::{
    closed_form_membership, loewy_filtration, polynomial_module, section_module,
    socle_filtration, FiltrationKind, FiltrationTable, UModule,
};
use torik_core::io::{parse_plfunction_json, parse_polytope_json};
use torik_core::plfunc::{Mode, PLFunction};
use torik_core::polytope::LatticePolytope;
use torik_core::roots::{
    enumerate_roots, loewy_socle_invariants, normalize_unique_unipotent, LoewySocle,
    NormalizedPresentation, RootKind,
};
use torik_core::stability::{invariants, Direction};
use torik_core::Error;

#[derive(Parser)]
#[command(
    name = "torik",
    version,
    about = "Exact K-stability invariants of toric Fano varieties from reflexive polytopes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a polytope for reflexivity and print facet diagnostics
    Check {
        /// Polytope JSON file, or a built-in fixture id (`paper:...`)
        input: String,
        /// Write a lattice sketch to this file (two-dimensional inputs)
        #[arg(long, value_name = "FILE")]
        svg: Option<PathBuf>,
    },
    /// List the roots of a reflexive polytope with their kinds
    Roots {
        /// Polytope JSON file, or a built-in fixture id (`paper:...`)
        input: String,
    },
    /// DF and Ding invariants of the test configuration of a PL function
    Invariants {
        /// Polytope JSON file, or a built-in fixture id (`paper:...`)
        input: String,
        /// PL function JSON file, or `loewy` / `socle` for the canonical
        /// functions of the unique-unipotent-root normalization
        #[arg(long, value_name = "FILE|loewy|socle")]
        pl: String,
        /// Filtration direction; inferred from the PL mode when omitted
        #[arg(long, value_enum)]
        direction: Option<DirectionArg>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Run the full pipeline: roots, normalization, both canonical
    /// filtrations, invariants, and stability verdicts
    LoewySocle {
        /// Polytope JSON file, or a built-in fixture id (`paper:...`)
        input: String,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Dimension tables of the canonical filtrations of a graded module
    Filtration {
        /// Polytope JSON file, or a built-in fixture id (`paper:...`);
        /// fixtures with a polynomial-module form use that form
        input: String,
        /// Module degree (capped by TORIK_MAX_DEGREE, default cap 6)
        #[arg(long)]
        degree: u32,
        /// Which filtration to print; both when omitted
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
        #[arg(long, value_enum, default_value_t = EngineArg::Both)]
        engine: EngineArg,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// List or run the built-in fixtures
    Fixtures {
        #[command(subcommand)]
        action: FixturesAction,
    },
}

#[derive(Subcommand)]
enum FixturesAction {
    /// Print every fixture id with a short description
    List,
    /// Recompute all frozen expected values (of one fixture, or all)
    Run { id: Option<String> },
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Dec,
    Inc,
}

impl From<DirectionArg> for Direction {
    fn from(d: DirectionArg) -> Direction {
        match d {
            DirectionArg::Dec => Direction::Decreasing,
            DirectionArg::Inc => Direction::Increasing,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Loewy,
    Socle,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EngineArg {
    Derivation,
    ClosedForm,
    Both,
}

/// A failure that terminates the command with a message on stderr.
struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn negative(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

fn core_failure(e: Error) -> Failure {
    let code = match &e {
        Error::NotReflexive(_) | Error::NoUnipotentRoot => 1,
        _ => 2,
    };
    Failure {
        code,
        message: e.to_string(),
    }
}

fn main() -> ExitCode {
    // die quietly when a downstream pipe closes early (e.g. `| head`)
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Result<ExitCode, Failure> {
    match command {
        Command::Check { input, svg } => cmd_check(&input, svg.as_deref()),
        Command::Roots { input } => cmd_roots(&input),
        Command::Invariants {
            input,
            pl,
            direction,
            format,
        } => cmd_invariants(&input, &pl, direction, format),
        Command::LoewySocle { input, format } => cmd_loewy_socle(&input, format),
        Command::Filtration {
            input,
            degree,
            kind,
            engine,
            format,
        } => cmd_filtration(&input, degree, kind, engine, format),
        Command::Fixtures { action } => cmd_fixtures(action),
    }
}

/// A resolved positional input: a fixture's data or a parsed file.
struct Loaded {
    name: String,
    polytope: Option<LatticePolytope>,
    action: Option<ActionFixture>,
}

fn load(input: &str) -> Result<Loaded, Failure> {
    if input.starts_with("paper:") {
        let fx = fixtures::find(input).ok_or_else(|| {
            usage(format!(
                "unknown fixture `{input}`; run `torik fixtures list`"
            ))
        })?;
        Ok(Loaded {
            name: fx.id.to_string(),
            polytope: fx.polytope,
            action: fx.action,
        })
    } else {
        let text = std::fs::read_to_string(input)
            .map_err(|e| usage(format!("cannot read `{input}`: {e}")))?;
        let p = parse_polytope_json(&text).map_err(core_failure)?;
        Ok(Loaded {
            name: input.to_string(),
            polytope: Some(p),
            action: None,
        })
    }
}

fn require_polytope(loaded: &Loaded) -> Result<&LatticePolytope, Failure> {
    loaded
        .polytope
        .as_ref()
        .ok_or_else(|| usage(format!("`{}` has no polytope", loaded.name)))
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn cmd_check(input: &str, svg: Option<&std::path::Path>) -> Result<ExitCode, Failure> {
    let loaded = load(input)?;
    let p = require_polytope(&loaded)?;
    let report = p.reflexivity();
    println!(
        "polytope: {} (dim {}, {} vertices, {} facets)",
        loaded.name,
        p.dim(),
        p.vertices().len(),
        p.facets().len()
    );
    println!("origin strictly interior: {}", yes_no(report.origin_interior));
    for (i, f) in p.facets().iter().enumerate() {
        let marker = if report.offending_facets.contains(&i) {
            "  [primitive inequality has rhs != -1]"
        } else {
            ""
        };
        println!("  facet {i}: {}{marker}", render::format_facet(f));
    }
    println!("reflexive: {}", yes_no(report.reflexive));
    if let Some(path) = svg {
        if p.dim() != 2 {
            return Err(usage("--svg sketches are only available in dimension 2"));
        }
        std::fs::write(path, render::polygon_svg(p))
            .map_err(|e| usage(format!("cannot write `{}`: {e}", path.display())))?;
        println!("sketch written to {}", path.display());
    }
    Ok(if report.reflexive {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_roots(input: &str) -> Result<ExitCode, Failure> {
    let loaded = load(input)?;
    let p = require_polytope(&loaded)?;
    let roots = enumerate_roots(p).map_err(core_failure)?;
    if roots.is_empty() {
        println!("no roots: the automorphism group is the dense torus (reductive)");
        return Ok(ExitCode::SUCCESS);
    }
    let semisimple = roots
        .iter()
        .filter(|r| r.kind == RootKind::Semisimple)
        .count();
    let unipotent = roots.len() - semisimple;
    println!("{semisimple} semisimple, {unipotent} unipotent");
    for r in &roots {
        let kind = match r.kind {
            RootKind::Semisimple => "semisimple",
            RootKind::Unipotent => "unipotent ",
        };
        println!(
            "  {kind} {} on facet {}: {}",
            render::format_point(&r.point),
            r.facet_index,
            render::format_facet(&p.facets()[r.facet_index])
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn canonical_functions(
    p: &LatticePolytope,
) -> Result<NormalizedPresentation, Failure> {
    normalize_unique_unipotent(p).map_err(core_failure)
}

fn cmd_invariants(
    input: &str,
    pl: &str,
    direction: Option<DirectionArg>,
    format: Format,
) -> Result<ExitCode, Failure> {
    let loaded = load(input)?;
    let p = require_polytope(&loaded)?;
    let (f, inferred): (PLFunction, Direction) = match pl {
        "loewy" => {
            let np = canonical_functions(p)?;
            (np.loewy_function(), Direction::Decreasing)
        }
        "socle" => {
            let np = canonical_functions(p)?;
            (np.socle_function(), Direction::Increasing)
        }
        path => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read `{path}`: {e}")))?;
            let f = parse_plfunction_json(&text).map_err(core_failure)?;
            let dir = match f.mode() {
                Mode::Min => Direction::Decreasing,
                Mode::Max => Direction::Increasing,
            };
            (f, dir)
        }
    };
    let dir = direction.map(Direction::from).unwrap_or(inferred);
    let report = invariants(p, &f, dir).map_err(core_failure)?;
    match format {
        Format::Table => println!("{}", render::kv_table(&render::invariant_rows(&report))),
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("report serializes")
        ),
    }
    Ok(ExitCode::SUCCESS)
}

fn point_json(p: &[BigInt]) -> serde_json::Value {
    json!(p
        .iter()
        .map(|x| i64::try_from(x).expect("root coordinates fit i64"))
        .collect::<Vec<i64>>())
}

fn cmd_loewy_socle(input: &str, format: Format) -> Result<ExitCode, Failure> {
    let loaded = load(input)?;
    let p = require_polytope(&loaded)?;
    match loewy_socle_invariants(p).map_err(core_failure)? {
        LoewySocle::TrivialFiltrations => {
            match format {
                Format::Table => println!(
                    "no unipotent root: both canonical filtrations are trivial \
                     (nothing to destabilize)"
                ),
                Format::Json => println!("{}", json!({ "trivial": true })),
            }
            Ok(ExitCode::SUCCESS)
        }
        LoewySocle::Invariants(inv) => {
            match format {
                Format::Table => {
                    println!(
                        "unipotent root {} normalized to height presentation",
                        render::format_point(&inv.presentation.root.point)
                    );
                    println!();
                    println!("Loewy (decreasing) filtration:");
                    for (k, v) in render::invariant_rows(&inv.loewy) {
                        println!("  {k:<18} {v}");
                    }
                    println!("  verdict: {}", render::verdict(&inv.loewy.df));
                    println!();
                    println!("Socle (increasing) filtration:");
                    for (k, v) in render::invariant_rows(&inv.socle) {
                        println!("  {k:<18} {v}");
                    }
                    println!("  verdict: {}", render::verdict(&inv.socle.df));
                }
                Format::Json => {
                    let value = json!({
                        "trivial": false,
                        "unipotent_root": point_json(&inv.presentation.root.point),
                        "loewy": serde_json::to_value(&inv.loewy).expect("serializes"),
                        "loewy_verdict": render::verdict(&inv.loewy.df),
                        "socle": serde_json::to_value(&inv.socle).expect("serializes"),
                        "socle_verdict": render::verdict(&inv.socle.df),
                    });
                    println!("{}", serde_json::to_string_pretty(&value).expect("json"));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn degree_cap() -> Result<u32, Failure> {
    match std::env::var("TORIK_MAX_DEGREE") {
        Ok(s) => s
            .trim()
            .parse::<u32>()
            .map_err(|_| usage("TORIK_MAX_DEGREE must be a nonnegative integer")),
        Err(std::env::VarError::NotPresent) => Ok(6),
        Err(e) => Err(usage(format!("TORIK_MAX_DEGREE: {e}"))),
    }
}

/// Where a filtration command's module comes from.
enum ModuleSource {
    Sections(Box<NormalizedPresentation>),
    Action(ActionFixture),
}

/// One rendered filtration table: dimensions plus, when every step is a
/// span of basis monomials, the monomial positions per step.
struct RenderedTable {
    kind: FiltrationKind,
    dims: Vec<usize>,
    steps: Option<Vec<Vec<usize>>>,
    engines_agree: Option<bool>,
}

fn kind_name(kind: FiltrationKind) -> &'static str {
    match kind {
        FiltrationKind::Loewy => "loewy",
        FiltrationKind::Socle => "socle",
    }
}

fn table_steps(table: &FiltrationTable) -> (Vec<usize>, Option<Vec<Vec<usize>>>) {
    let dims = table.dims();
    let steps: Option<Vec<Vec<usize>>> = table
        .active_steps()
        .iter()
        .map(|s| s.monomial_indices())
        .collect();
    (dims, steps)
}

fn closed_form_table(
    source: &ModuleSource,
    module: &UModule,
    degree: u32,
    kind: FiltrationKind,
) -> (Vec<usize>, Option<Vec<Vec<usize>>>) {
    match source {
        ModuleSource::Sections(np) => {
            table_steps(&closed_form_membership(np, degree, kind))
        }
        ModuleSource::Action(af) => {
            let bound = af.bound(degree) as isize;
            let range: Vec<isize> = match kind {
                FiltrationKind::Loewy => (0..=bound + 1).collect(),
                FiltrationKind::Socle => (0..=bound).collect(),
            };
            let steps: Vec<Vec<usize>> = range
                .into_iter()
                .map(|i| af.step_indices(module, degree, kind, i))
                .collect();
            (steps.iter().map(Vec::len).collect(), Some(steps))
        }
    }
}

fn cmd_filtration(
    input: &str,
    degree: u32,
    kind: Option<KindArg>,
    engine: EngineArg,
    format: Format,
) -> Result<ExitCode, Failure> {
    let cap = degree_cap()?;
    if degree > cap {
        return Err(usage(format!(
            "degree {degree} exceeds the cap {cap}; raise TORIK_MAX_DEGREE to allow it"
        )));
    }
    let loaded = load(input)?;
    let source = match &loaded.action {
        Some(af) => ModuleSource::Action(af.clone()),
        None => {
            let p = require_polytope(&loaded)?;
            ModuleSource::Sections(Box::new(canonical_functions(p)?))
        }
    };
    let module = match &source {
        ModuleSource::Action(af) => {
            polynomial_module(&af.action, degree).map_err(core_failure)?
        }
        ModuleSource::Sections(np) => section_module(np, degree),
    };
    let kinds: Vec<FiltrationKind> = match kind {
        Some(KindArg::Loewy) => vec![FiltrationKind::Loewy],
        Some(KindArg::Socle) => vec![FiltrationKind::Socle],
        None => vec![FiltrationKind::Loewy, FiltrationKind::Socle],
    };

    let mut rendered = Vec::new();
    for k in kinds {
        let engine_table = match k {
            FiltrationKind::Loewy => loewy_filtration(&module),
            FiltrationKind::Socle => socle_filtration(&module),
        };
        let item = match engine {
            EngineArg::Derivation => {
                let (dims, steps) = table_steps(&engine_table);
                RenderedTable {
                    kind: k,
                    dims,
                    steps,
                    engines_agree: None,
                }
            }
            EngineArg::ClosedForm => {
                let (dims, steps) = closed_form_table(&source, &module, degree, k);
                RenderedTable {
                    kind: k,
                    dims,
                    steps,
                    engines_agree: None,
                }
            }
            EngineArg::Both => {
                let (edims, esteps) = table_steps(&engine_table);
                let (cdims, csteps) = closed_form_table(&source, &module, degree, k);
                let agree = edims == cdims
                    && match (&esteps, &csteps) {
                        (Some(a), Some(b)) => a == b,
                        _ => false,
                    };
                if !agree {
                    return Err(negative(format!(
                        "derivation engine and closed form disagree for the {} \
                         filtration at degree {degree}: dims {edims:?} vs {cdims:?}",
                        kind_name(k)
                    )));
                }
                RenderedTable {
                    kind: k,
                    dims: edims,
                    steps: esteps,
                    engines_agree: Some(true),
                }
            }
        };
        rendered.push(item);
    }

    match format {
        Format::Table => {
            let source_desc = match &source {
                ModuleSource::Sections(_) => "section module of the normalization",
                ModuleSource::Action(_) => "polynomial module",
            };
            println!(
                "module: {} of {} at degree {degree}, dimension {}",
                source_desc,
                loaded.name,
                module.dim()
            );
            for item in &rendered {
                println!();
                let note = match item.engines_agree {
                    Some(true) => "  (derivation and closed-form engines agree)",
                    _ => "",
                };
                println!("{} filtration{note}", kind_name(item.kind));
                println!("  step  dim");
                for (i, d) in item.dims.iter().enumerate() {
                    println!("  {i:<4}  {d}");
                }
            }
        }
        Format::Json => {
            let tables: Vec<serde_json::Value> = rendered
                .iter()
                .map(|item| {
                    let steps = item.steps.as_ref().map(|steps| {
                        steps
                            .iter()
                            .map(|s| {
                                s.iter()
                                    .map(|&i| {
                                        let m = &module.basis()[i];
                                        json!({
                                            "degree": m.degree,
                                            "exponent": point_json(&m.exponent),
                                        })
                                    })
                                    .collect::<Vec<_>>()
                            })
                            .collect::<Vec<_>>()
                    });
                    json!({
                        "kind": kind_name(item.kind),
                        "dims": item.dims,
                        "steps": steps,
                        "engines_agree": item.engines_agree,
                    })
                })
                .collect();
            let value = json!({
                "input": loaded.name,
                "degree": degree,
                "module_dim": module.dim(),
                "tables": tables,
            });
            println!("{}", serde_json::to_string_pretty(&value).expect("json"));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_fixtures(action: FixturesAction) -> Result<ExitCode, Failure> {
    match action {
        FixturesAction::List => {
            for fx in fixtures::all() {
                println!("{:<24} {}", fx.id, fx.summary);
            }
            Ok(ExitCode::SUCCESS)
        }
        FixturesAction::Run { id } => {
            let targets: Vec<fixtures::Fixture> = match id {
                Some(ref id) => vec![fixtures::find(id).ok_or_else(|| {
                    usage(format!("unknown fixture `{id}`; run `torik fixtures list`"))
                })?],
                None => fixtures::all(),
            };
            let mut checks = 0usize;
            let mut failures = 0usize;
            for fx in &targets {
                for r in fixtures::evaluate(fx) {
                    checks += 1;
                    if r.passed() {
                        let v = r.actual.as_ref().expect("passed implies value");
                        println!(
                            "[PASS] {} :: {} = {} ({})",
                            r.fixture, r.label, v, r.provenance
                        );
                    } else {
                        failures += 1;
                        match &r.actual {
                            Ok(v) => println!(
                                "[FAIL] {} :: {}: expected {}, got {} ({})",
                                r.fixture, r.label, r.expected, v, r.provenance
                            ),
                            Err(e) => println!(
                                "[FAIL] {} :: {}: expected {}, error: {e} ({})",
                                r.fixture, r.label, r.expected, r.provenance
                            ),
                        }
                    }
                }
            }
            println!("{checks} checks, {failures} failed");
            Ok(if failures == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}
