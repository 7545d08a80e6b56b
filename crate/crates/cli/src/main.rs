#![forbid(unsafe_code)]
//! Batch command-line interface over the cartan-fibers library.
//!
//! Commands: build | contract | compgroup | verify | snf | export.
//! Exit codes: 0 success, 1 invariant/verification failure, 2 usage error.
//! All JSON output is canonical (sorted keys, decimal-string big integers),
//! so identical invocations produce byte-identical output.

use std::fmt::Write as _;
use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use cartan_fibers::{
    contract_to_minimal, contract_to_minimal_ncd, crossing_local_rings, dot, json, primes,
    smith_normal_form_with, AbelianGroup, ContractionTrace, CurveFamily, Error, PivotStrategy,
    SnfOptions, SpecialFiber, VerificationReport,
};

#[derive(Parser)]
#[command(
    name = "cartan-fibers",
    version,
    about = "Special fibers of Cartan modular curves: build, contract, compute component groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the special fiber of the regular model and emit it.
    Build(BuildArgs),
    /// Contract a built fiber to the minimal (or minimal-ncd) model.
    Contract(ContractArgs),
    /// Compute the component group of the Neron model of the Jacobian.
    Compgroup(RangeArgs),
    /// Run the full pipeline against the closed-form oracles.
    Verify(RangeArgs),
    /// Smith normal form of a matrix file (JSON schema or bare 2-D array).
    Snf(SnfArgs),
    /// Export DOT graphs (fiber, or one graph per contraction step).
    Export(ExportArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Table,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    Minimal,
    Ncd,
}

#[derive(Args)]
struct FamilyArgs {
    /// Family selector: ns | ns+ | s | s+ | ns-fine | ns+-fine | s-fine | s+-fine.
    #[arg(long)]
    family: String,
    /// Supersingular-point count for fine families (>= 1).
    #[arg(long = "s-p")]
    s_p: Option<u64>,
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// The prime p >= 5.
    #[arg(long)]
    p: u64,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct ContractArgs {
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long)]
    p: u64,
    /// Contraction target.
    #[arg(long, value_enum, default_value = "minimal")]
    target: Target,
    /// Also emit the step-by-step trace.
    #[arg(long)]
    trace: bool,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct RangeArgs {
    /// Family selector; `all` means the four coarse families.
    #[arg(long)]
    family: String,
    #[arg(long = "s-p")]
    s_p: Option<u64>,
    /// A single prime.
    #[arg(long, conflicts_with = "p_range")]
    p: Option<u64>,
    /// Inclusive prime range `A..B`; composites are skipped.
    #[arg(long = "p-range")]
    p_range: Option<String>,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct SnfArgs {
    /// Matrix file: `{"rows", "cols", "entries"}` or a bare 2-D array.
    #[arg(long)]
    input: String,
    /// Materialize and emit the unimodular transforms U and V.
    #[arg(long)]
    transforms: bool,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long)]
    p: u64,
    /// With a target, export the contraction sequence instead of the fiber.
    #[arg(long, value_enum)]
    target: Option<Target>,
    #[arg(long)]
    out: Option<String>,
}

enum CliError {
    Usage(String),
    Invariant(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            // Divisibility failures only arise from fine-family s_P choices
            // that are inconsistent with the single-node Igusa configuration,
            // so they are argument errors from the CLI's point of view.
            Error::InvalidPrime(_) | Error::InvalidParameter(_) | Error::Divisibility { .. } => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Invariant(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Build(args) => cmd_build(args),
        Command::Contract(args) => cmd_contract(args),
        Command::Compgroup(args) => cmd_compgroup(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Snf(args) => cmd_snf(args),
        Command::Export(args) => cmd_export(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Invariant(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn parse_family(args: &FamilyArgs) -> Result<CurveFamily, CliError> {
    let base: CurveFamily = if args.family.contains(':') {
        args.family.parse()?
    } else {
        match (args.family.as_str(), args.s_p) {
            ("ns-fine", Some(s)) => CurveFamily::NsFine(s),
            ("ns+-fine", Some(s)) => CurveFamily::NsPlusFine(s),
            ("s-fine", Some(s)) => CurveFamily::SFine(s),
            ("s+-fine", Some(s)) => CurveFamily::SPlusFine(s),
            (f @ ("ns-fine" | "ns+-fine" | "s-fine" | "s+-fine"), None) => {
                return Err(CliError::Usage(format!("family `{f}` requires --s-p")));
            }
            _ => args.family.parse()?,
        }
    };
    if base.is_coarse() && args.s_p.is_some() {
        return Err(CliError::Usage(
            "--s-p only applies to fine families".to_string(),
        ));
    }
    Ok(base)
}

fn emit(out: &Option<String>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Usage(format!("cannot write `{path}`: {e}"))),
        None => {
            use std::io::Write;
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            match writeln!(lock, "{text}") {
                Ok(()) => Ok(()),
                // reader went away (e.g. piped into head)
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => std::process::exit(0),
                Err(e) => Err(CliError::Invariant(format!("stdout: {e}"))),
            }
        }
    }
}

fn fiber_table(fiber: &SpecialFiber) -> String {
    let mut text = String::new();
    writeln!(text, "family {}  p {}", fiber.family(), fiber.prime()).unwrap();
    writeln!(text, "components ({}):", fiber.components().len()).unwrap();
    for c in fiber.components() {
        let self_str = fiber
            .self_intersection(c.id)
            .map_or_else(|| "?".to_string(), |v| v.to_string());
        writeln!(
            text,
            "  {:>3}  {:6}  mult {:>6}  self {:>6}  {:16} {}",
            c.id.0,
            c.label,
            c.multiplicity.to_string(),
            self_str,
            c.kind.as_str(),
            c.smooth_rational.as_str()
        )
        .unwrap();
    }
    writeln!(text, "crossings:").unwrap();
    // The completed-local-ring annotation only applies while every crossing
    // point is a plain double point, i.e. on freshly built models.
    let double_points_only = fiber
        .crossings()
        .iter()
        .all(|pt| pt.local.len() == 1 && pt.is_transverse());
    for d in crossing_local_rings(fiber) {
        let la = &fiber.component(d.component_a).unwrap().label;
        let lb = &fiber.component(d.component_b).unwrap().label;
        if double_points_only {
            writeln!(
                text,
                "  {la} . {lb} = {}  (local ring X^{} Y^{} - p)",
                d.count, d.exponent_a, d.exponent_b
            )
            .unwrap();
        } else {
            writeln!(text, "  {la} . {lb} = {}", d.count).unwrap();
        }
    }
    text.truncate(text.trim_end().len());
    text
}

fn cmd_build(args: BuildArgs) -> Result<(), CliError> {
    let family = parse_family(&args.family)?;
    let fiber = cartan_fibers::build_fiber(family, args.p)?;
    let text = match args.format {
        Format::Json => json::fiber_to_json_string(&fiber),
        Format::Dot => dot::fiber_to_dot(&fiber),
        Format::Table => fiber_table(&fiber),
    };
    emit(&args.out, &text)
}

fn trace_table(trace: &ContractionTrace) -> String {
    let mut text = String::new();
    writeln!(
        text,
        "trace ({} steps, target {}):",
        trace.steps.len(),
        trace.target
    )
    .unwrap();
    for (i, step) in trace.steps.iter().enumerate() {
        writeln!(
            text,
            "  step {:>2}: contract {} (id {})",
            i + 1,
            step.contracted_label,
            step.contracted_id.0
        )
        .unwrap();
        for (a, b, old, new) in &step.updated_pairs {
            writeln!(
                text,
                "           pair ({}, {}): {} -> {}",
                a.0, b.0, old, new
            )
            .unwrap();
        }
        for (id, old, new) in &step.updated_selfs {
            writeln!(text, "           self {}: {} -> {}", id.0, old, new).unwrap();
        }
        for (id, old, new) in &step.smoothness_changes {
            writeln!(
                text,
                "           smoothness {}: {} -> {}",
                id.0,
                old.as_str(),
                new.as_str()
            )
            .unwrap();
        }
    }
    text
}

fn cmd_contract(args: ContractArgs) -> Result<(), CliError> {
    let family = parse_family(&args.family)?;
    let fiber = cartan_fibers::build_fiber(family, args.p)?;
    let (result, trace) = match args.target {
        Target::Minimal => contract_to_minimal(&fiber)?,
        Target::Ncd => contract_to_minimal_ncd(&fiber)?,
    };
    let text = match args.format {
        Format::Json => {
            if args.trace {
                let mut obj = serde_json::Map::new();
                obj.insert("fiber".to_string(), json::fiber_to_json(&result));
                obj.insert("trace".to_string(), json::trace_to_json(&trace));
                serde_json::Value::Object(obj).to_string()
            } else {
                json::fiber_to_json_string(&result)
            }
        }
        Format::Dot => {
            if args.trace {
                dot::trace_to_dot(&fiber, &trace)?
            } else {
                dot::fiber_to_dot(&result)
            }
        }
        Format::Table => {
            let mut text = fiber_table(&result);
            if args.trace {
                text.push('\n');
                text.push_str(&trace_table(&trace));
                text.truncate(text.trim_end().len());
            }
            text
        }
    };
    emit(&args.out, &text)
}

fn parse_range(args: &RangeArgs) -> Result<Vec<u64>, CliError> {
    match (&args.p, &args.p_range) {
        (Some(p), None) => Ok(vec![*p]),
        (None, Some(range)) => {
            let (lo, hi) = range
                .split_once("..")
                .ok_or_else(|| CliError::Usage(format!("bad range `{range}`, expected A..B")))?;
            let lo: u64 = lo
                .parse()
                .map_err(|_| CliError::Usage(format!("bad range endpoint `{lo}`")))?;
            let hi: u64 = hi
                .parse()
                .map_err(|_| CliError::Usage(format!("bad range endpoint `{hi}`")))?;
            if lo < 5 || hi < lo {
                return Err(CliError::Usage(format!(
                    "range endpoints must satisfy 5 <= A <= B, got {lo}..{hi}"
                )));
            }
            Ok(primes::primes_in_range(lo, hi))
        }
        _ => Err(CliError::Usage(
            "exactly one of --p and --p-range is required".to_string(),
        )),
    }
}

fn families_of(args: &RangeArgs) -> Result<Vec<CurveFamily>, CliError> {
    if args.family == "all" {
        if args.s_p.is_some() {
            return Err(CliError::Usage(
                "--s-p only applies to fine families".to_string(),
            ));
        }
        return Ok(CurveFamily::COARSE.to_vec());
    }
    let family = parse_family(&FamilyArgs {
        family: args.family.clone(),
        s_p: args.s_p,
    })?;
    Ok(vec![family])
}

fn cmd_compgroup(args: RangeArgs) -> Result<(), CliError> {
    let families = families_of(&args)?;
    let ps = parse_range(&args)?;
    let mut cells: Vec<(u64, CurveFamily, AbelianGroup)> = Vec::new();
    for &p in &ps {
        for &family in &families {
            let fiber = cartan_fibers::build_fiber(family, p)?;
            let group = cartan_fibers::component_group(&fiber)?;
            cells.push((p, family, group));
        }
    }
    let text = match args.format {
        Format::Json => {
            let rows: Vec<serde_json::Value> = cells
                .iter()
                .map(|(p, family, group)| {
                    serde_json::json!({
                        "family": family.to_string(),
                        "group": json::group_to_json(group),
                        "p": p,
                    })
                })
                .collect();
            serde_json::Value::Array(rows).to_string()
        }
        Format::Dot => {
            return Err(CliError::Usage(
                "compgroup has no DOT rendering".to_string(),
            ));
        }
        Format::Table => {
            if cells.len() == 1 {
                cells[0].2.to_string()
            } else {
                cells
                    .iter()
                    .map(|(p, family, group)| format!("p={p:<4} {family:<5} {group}"))
                    .collect::<Vec<_>>()
                    .join("\n")
            }
        }
    };
    emit(&args.out, &text)
}

fn cmd_verify(args: RangeArgs) -> Result<(), CliError> {
    let families = families_of(&args)?;
    let ps = parse_range(&args)?;
    // Fan out per prime; reports are reassembled in deterministic order.
    let reports: Result<Vec<VerificationReport>, Error> = ps
        .par_iter()
        .map(|&p| {
            families
                .iter()
                .map(|&family| cartan_fibers::verify(family, p))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()
        .map(|groups| groups.into_iter().flatten().collect());
    let reports = reports?;
    let all_pass = reports.iter().all(VerificationReport::pass);
    let text = match args.format {
        Format::Json => {
            let rows: Vec<serde_json::Value> = reports.iter().map(json::report_to_json).collect();
            serde_json::Value::Array(rows).to_string()
        }
        Format::Dot => {
            return Err(CliError::Usage("verify has no DOT rendering".to_string()));
        }
        Format::Table => {
            let mut text = String::new();
            for report in &reports {
                for check in &report.checks {
                    writeln!(
                        text,
                        "p={:<4} {:<5} {:<24} computed={:<28} expected={:<28} {}",
                        report.p,
                        report.family.to_string(),
                        check.check,
                        check.computed,
                        check.expected,
                        if check.pass { "pass" } else { "FAIL" }
                    )
                    .unwrap();
                }
            }
            let failed = reports.iter().filter(|r| !r.pass()).count();
            write!(text, "{} cell(s), {} failing", reports.len(), failed).unwrap();
            text
        }
    };
    emit(&args.out, &text)?;
    if all_pass {
        Ok(())
    } else {
        Err(CliError::Invariant(
            "verification found failing checks".to_string(),
        ))
    }
}

fn cmd_snf(args: SnfArgs) -> Result<(), CliError> {
    let raw = fs::read_to_string(&args.input)
        .map_err(|e| CliError::Usage(format!("cannot read `{}`: {e}", args.input)))?;
    let matrix = json::matrix_from_json(&raw)?;
    let snf = smith_normal_form_with(
        &matrix,
        SnfOptions {
            with_transforms: args.transforms,
            pivot: PivotStrategy::SmallestAbs,
        },
    );
    let text = match args.format {
        Format::Json => json::snf_to_json(&snf).to_string(),
        Format::Dot => return Err(CliError::Usage("snf has no DOT rendering".to_string())),
        Format::Table => {
            let divisors: Vec<String> = snf.divisors().iter().map(|d| d.to_string()).collect();
            let mut text = format!("divisors ({})\nrank {}", divisors.join(","), snf.rank());
            if args.transforms {
                for (name, m) in [("u", snf.u.as_ref()), ("v", snf.v.as_ref())] {
                    if let Some(m) = m {
                        write!(text, "\n{name}:").unwrap();
                        for i in 0..m.rows() {
                            let row: Vec<String> =
                                m.row_entries(i).iter().map(|e| e.to_string()).collect();
                            write!(text, "\n  [{}]", row.join(", ")).unwrap();
                        }
                    }
                }
            }
            text
        }
    };
    emit(&args.out, &text)
}

fn cmd_export(args: ExportArgs) -> Result<(), CliError> {
    let family = parse_family(&args.family)?;
    let fiber = cartan_fibers::build_fiber(family, args.p)?;
    let text = match args.target {
        None => dot::fiber_to_dot(&fiber),
        Some(target) => {
            let (_, trace) = match target {
                Target::Minimal => contract_to_minimal(&fiber)?,
                Target::Ncd => contract_to_minimal_ncd(&fiber)?,
            };
            dot::trace_to_dot(&fiber, &trace)?
        }
    };
    emit(&args.out, &text)
}
