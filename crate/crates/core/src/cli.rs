//! The `zzco` command line: build cosheaves from filtration files, compute
//! diagrams, Euler curves, K₀ vectors, pushforwards, and set-module
//! invariants, and run the randomized self-checks.
//!
//! Exit codes: 0 success; 1 I/O or internal failure; 2 unreadable input
//! (including command-line usage errors); 3 semantically invalid input
//! (non-monotone filter, invalid map or module); 4 oracle or self-check
//! mismatch.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::barcode_k::{
    barcode_json, decompose, diagram, diagram_json, k0_class, k0_json, set_decompose, set_k0,
    CoordMode, SetZZModule,
};
use crate::cosheaf::{augmented_module, filtration_module, graded_filtration_module, ZZModule};
use crate::exactlin::FieldSpec;
use crate::reduction::{pairs_to_diagram, persistence_pairs};
use crate::simplicial::{parse_filtration_text, Filtration, SimplicialError};
use crate::stratline::StratifiedLineMap;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INVALID: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;

#[derive(Parser)]
#[command(
    name = "zzco",
    version,
    about = "Zig-zag persistence cosheaves: diagrams, barcodes, K0 classes, and Euler curves"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CoordsArg {
    Strata,
    Values,
}

impl CoordsArg {
    fn mode(self) -> CoordMode {
        match self {
            CoordsArg::Strata => CoordMode::Strata,
            CoordsArg::Values => CoordMode::Values,
        }
    }
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Field characteristic: a prime, or 0 for the rationals.
    #[arg(long, global = true, default_value_t = 2)]
    field: u64,
    /// Homology degrees, comma separated.
    #[arg(long, global = true, value_delimiter = ',', default_value = "0")]
    degree: Vec<usize>,
    /// Output format (k0/euler/diagram/decompose support csv).
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    /// Also write an SVG rendering to this path.
    #[arg(long, global = true)]
    svg: Option<PathBuf>,
    /// Coordinate labels: half-integer strata or filtration values.
    #[arg(long, global = true, value_enum, default_value_t = CoordsArg::Strata)]
    coords: CoordsArg,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomized subcommands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Build the (possibly augmented) cosheaf of a filtration as module JSON.
    Build {
        /// Filtration file: one `v0 v1 ... ; value` per line.
        input: PathBuf,
        /// Add the skyscrapers recording instantaneous events.
        #[arg(long)]
        augmented: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Persistence diagram of a filtration or of a module JSON file.
    Diagram {
        input: PathBuf,
        /// Cross-check monotone input against column reduction (exit 4 on mismatch).
        #[arg(long)]
        oracle: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Euler curve of a filtration, as a K0 vector per stratum.
    Euler {
        input: PathBuf,
        /// Highest homology degree included (default: complex dimension).
        #[arg(long)]
        max_degree: Option<usize>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// K0 class of a module JSON file.
    K0 {
        input: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Interval decomposition (barcode) of a filtration or module.
    Decompose {
        input: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Pushforward of a module along a stratified map file.
    Collapse {
        input: PathBuf,
        /// JSON map spec: source/target vertices plus a stratum assignment.
        #[arg(long)]
        map: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Barcode and K0 of an injective set-valued module JSON file.
    Setmod {
        input: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run the randomized invariant suites and report pass/fail counts.
    Check {
        /// Trials per suite.
        #[arg(long, default_value_t = 25)]
        trials: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Failure {
        Failure { code, message: message.into() }
    }
}

type CmdResult = Result<(), Failure>;

fn read_input(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_PARSE, format!("cannot read {}: {e}", path.display())))
}

fn write_output(text: &str, out: &Option<PathBuf>) -> CmdResult {
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(p) => std::fs::write(p, text)
            .map_err(|e| Failure::new(EXIT_FAIL, format!("cannot write {}: {e}", p.display()))),
    }
}

fn field_spec(c: u64) -> Result<FieldSpec, Failure> {
    FieldSpec::new(c).map_err(|e| Failure::new(EXIT_PARSE, e.to_string()))
}

fn load_filtration(path: &Path) -> Result<Filtration, Failure> {
    let text = read_input(path)?;
    let pairs = parse_filtration_text(&text)
        .map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))?;
    Filtration::sublevel_filtration(pairs).map_err(|e| {
        let code = match e {
            SimplicialError::EmptyFiltration => EXIT_PARSE,
            _ => EXIT_INVALID,
        };
        Failure::new(code, format!("{}: {e}", path.display()))
    })
}

fn load_module(path: &Path) -> Result<ZZModule, Failure> {
    let text = read_input(path)?;
    ZZModule::from_json_str(&text)
        .map_err(|e| Failure::new(EXIT_INVALID, format!("{}: {e}", path.display())))
}

/// Filtration text or module JSON? Decided by the first non-space byte.
enum AnyInput {
    Filtration(Filtration),
    Module(ZZModule),
}

fn load_any(path: &Path) -> Result<AnyInput, Failure> {
    let text = read_input(path)?;
    if text.trim_start().starts_with('{') {
        ZZModule::from_json_str(&text)
            .map(AnyInput::Module)
            .map_err(|e| Failure::new(EXIT_INVALID, format!("{}: {e}", path.display())))
    } else {
        let pairs = parse_filtration_text(&text)
            .map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))?;
        Filtration::sublevel_filtration(pairs)
            .map(AnyInput::Filtration)
            .map_err(|e| {
                let code = match e {
                    SimplicialError::EmptyFiltration => EXIT_PARSE,
                    _ => EXIT_INVALID,
                };
                Failure::new(code, format!("{}: {e}", path.display()))
            })
    }
}

fn json_text(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn k0_csv(k: &crate::barcode_k::K0Class, mode: CoordMode) -> String {
    let mut out = String::from("stratum,value\n");
    for (s, &c) in k.line().strata().zip(k.coeffs()) {
        let label = match mode {
            CoordMode::Strata => s.to_string(),
            CoordMode::Values => match k.line().coord(s) {
                Some(q) => crate::rational::format_rational(q),
                None => {
                    // edges labelled by their open interval
                    let j = s.edge_index().unwrap();
                    let left = if j == 0 {
                        "-inf".to_string()
                    } else {
                        crate::rational::format_rational(&k.line().vertex_coords()[j - 1])
                    };
                    let right = if j == k.line().k() {
                        "inf".to_string()
                    } else {
                        crate::rational::format_rational(&k.line().vertex_coords()[j])
                    };
                    format!("({left},{right})")
                }
            },
        };
        out.push_str(&format!("{label},{c}\n"));
    }
    out
}

fn entries_csv(entries: &[serde_json::Value], columns: &[&str]) -> String {
    let mut out = String::from(&columns.join(","));
    out.push('\n');
    for e in entries {
        let row: Vec<String> = columns
            .iter()
            .map(|c| match e.get(c) {
                Some(serde_json::Value::String(s)) => s.clone(),
                Some(v) => v.to_string(),
                None => String::new(),
            })
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn cmd_build(input: &Path, augmented: bool, common: &CommonArgs) -> CmdResult {
    let field = field_spec(common.field)?;
    let f = load_filtration(input)?;
    let build = |n: usize| {
        if augmented {
            augmented_module(&f, n, field)
        } else {
            filtration_module(&f, n, field)
        }
    };
    let value = if common.degree.len() == 1 {
        build(common.degree[0]).to_json_value()
    } else {
        serde_json::Value::Array(
            common
                .degree
                .iter()
                .map(|&n| {
                    serde_json::json!({ "degree": n, "module": build(n).to_json_value() })
                })
                .collect(),
        )
    };
    write_output(&json_text(&value), &common.out)
}

fn cmd_diagram(input: &Path, oracle: bool, common: &CommonArgs) -> CmdResult {
    let field = field_spec(common.field)?;
    let mode = common.coords.mode();
    let mut entries = Vec::new();
    let mut svg_points = Vec::new();
    let mut max_twice = 0;
    match load_any(input)? {
        AnyInput::Module(m) => {
            if oracle {
                return Err(Failure::new(
                    EXIT_PARSE,
                    "--oracle needs a filtration input",
                ));
            }
            let d = diagram(&decompose(&m));
            entries.extend(diagram_json(&d, None, mode, m.line()));
            svg_points.extend(d.iter().map(|(&(b, dd), &ml)| (b, dd, ml as i64)));
            max_twice = m.line().num_strata();
        }
        AnyInput::Filtration(f) => {
            let pairs = if oracle { Some(persistence_pairs(&f, field)) } else { None };
            for &n in &common.degree {
                let m = filtration_module(&f, n, field);
                let d = diagram(&decompose(&m));
                if let Some(ps) = &pairs {
                    let expected = pairs_to_diagram(ps, n);
                    if d != expected {
                        return Err(Failure::new(
                            EXIT_MISMATCH,
                            format!("degree {n}: cosheaf diagram disagrees with column reduction"),
                        ));
                    }
                }
                entries.extend(diagram_json(&d, Some(n), mode, m.line()));
                svg_points.extend(d.iter().map(|(&(b, dd), &ml)| (b, dd, ml as i64)));
                max_twice = m.line().num_strata();
            }
        }
    }
    if let Some(svg_path) = &common.svg {
        let svg = crate::svg::diagram_svg(&svg_points, max_twice);
        std::fs::write(svg_path, svg)
            .map_err(|e| Failure::new(EXIT_FAIL, format!("cannot write svg: {e}")))?;
    }
    let text = match common.format {
        FormatArg::Json => json_text(&serde_json::Value::Array(entries)),
        FormatArg::Csv => entries_csv(&entries, &["birth", "death", "mult", "degree"]),
    };
    write_output(&text, &common.out)
}

fn cmd_euler(input: &Path, max_degree: Option<usize>, common: &CommonArgs) -> CmdResult {
    let field = field_spec(common.field)?;
    let f = load_filtration(input)?;
    let top = max_degree.unwrap_or_else(|| f.complex().dim().unwrap_or(0));
    let mut graded = graded_filtration_module(&f, field);
    let line = graded.line().clone();
    let mut trimmed = crate::cosheaf::GradedZZModule::new(line, field);
    for (&n, m) in graded.components() {
        if n <= top {
            trimmed.insert(n, m.clone()).expect("same line");
        }
    }
    graded = trimmed;
    let curve = crate::barcode_k::euler_curve(&graded);
    if let Some(svg_path) = &common.svg {
        std::fs::write(svg_path, crate::svg::euler_svg(&curve))
            .map_err(|e| Failure::new(EXIT_FAIL, format!("cannot write svg: {e}")))?;
    }
    let text = match common.format {
        FormatArg::Json => json_text(&k0_json(&curve)),
        FormatArg::Csv => k0_csv(&curve, common.coords.mode()),
    };
    write_output(&text, &common.out)
}

fn cmd_k0(input: &Path, common: &CommonArgs) -> CmdResult {
    let m = load_module(input)?;
    let k = k0_class(&m);
    let text = match common.format {
        FormatArg::Json => json_text(&k0_json(&k)),
        FormatArg::Csv => k0_csv(&k, common.coords.mode()),
    };
    write_output(&text, &common.out)
}

fn cmd_decompose(input: &Path, common: &CommonArgs) -> CmdResult {
    let field = field_spec(common.field)?;
    let mut entries = Vec::new();
    let mut svg_barcode: Option<crate::barcode_k::Barcode> = None;
    let mut stack = |b: crate::barcode_k::Barcode| match &mut svg_barcode {
        None => svg_barcode = Some(b),
        Some(acc) => {
            for (i, &m) in b.iter() {
                acc.add(*i, m);
            }
        }
    };
    match load_any(input)? {
        AnyInput::Module(m) => {
            let b = decompose(&m);
            entries.extend(barcode_json(&b, None));
            stack(b);
        }
        AnyInput::Filtration(f) => {
            for &n in &common.degree {
                let b = decompose(&filtration_module(&f, n, field));
                entries.extend(barcode_json(&b, Some(n)));
                stack(b);
            }
        }
    }
    if let (Some(svg_path), Some(b)) = (&common.svg, &svg_barcode) {
        std::fs::write(svg_path, crate::svg::barcode_svg(b))
            .map_err(|e| Failure::new(EXIT_FAIL, format!("cannot write svg: {e}")))?;
    }
    let text = match common.format {
        FormatArg::Json => json_text(&serde_json::Value::Array(entries)),
        FormatArg::Csv => entries_csv(&entries, &["lo", "hi", "mult", "degree"]),
    };
    write_output(&text, &common.out)
}

fn cmd_collapse(input: &Path, map_path: &Path, common: &CommonArgs) -> CmdResult {
    let m = load_module(input)?;
    let map_text = read_input(map_path)?;
    let map_value: serde_json::Value = serde_json::from_str(&map_text)
        .map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", map_path.display())))?;
    let map = StratifiedLineMap::from_json_value(&map_value)
        .map_err(|e| Failure::new(EXIT_INVALID, format!("{}: {e}", map_path.display())))?;
    let pushed = m
        .pushforward(&map)
        .map_err(|e| Failure::new(EXIT_INVALID, e.to_string()))?;
    write_output(&json_text(&pushed.to_json_value()), &common.out)
}

fn cmd_setmod(input: &Path, common: &CommonArgs) -> CmdResult {
    let text = read_input(input)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", input.display())))?;
    let s = SetZZModule::from_json_value(&value)
        .map_err(|e| Failure::new(EXIT_INVALID, format!("{}: {e}", input.display())))?;
    let b = set_decompose(&s).map_err(|e| Failure::new(EXIT_INVALID, e.to_string()))?;
    let k = set_k0(&s);
    let out = serde_json::json!({
        "barcode": barcode_json(&b, None),
        "k0": k0_json(&k),
    });
    write_output(&json_text(&out), &common.out)
}

fn cmd_check(trials: usize, common: &CommonArgs) -> CmdResult {
    let reports = crate::check::run_all(common.seed, trials);
    let mut text = String::new();
    let mut all_ok = true;
    for r in &reports {
        text.push_str(&r.summary());
        text.push('\n');
        all_ok &= r.passed();
    }
    let total: usize = reports.iter().map(|r| r.trials).sum();
    let failed: usize = reports.iter().map(|r| r.failures.len()).sum();
    text.push_str(&format!("total: {total} checks, {failed} failures\n"));
    write_output(&text, &common.out)?;
    if all_ok {
        Ok(())
    } else {
        Err(Failure::new(EXIT_MISMATCH, "self-check failed"))
    }
}

/// Parse arguments and run; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Build { input, augmented, common } => cmd_build(input, *augmented, common),
        Command::Diagram { input, oracle, common } => cmd_diagram(input, *oracle, common),
        Command::Euler { input, max_degree, common } => cmd_euler(input, *max_degree, common),
        Command::K0 { input, common } => cmd_k0(input, common),
        Command::Decompose { input, common } => cmd_decompose(input, common),
        Command::Collapse { input, map, common } => cmd_collapse(input, map, common),
        Command::Setmod { input, common } => cmd_setmod(input, common),
        Command::Check { trials, common } => cmd_check(*trials, common),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }
}
