//! `beauville`: classification runs, dimension searches and reproduction checks from the command line.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context as _;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use beauville::beauville::{beauville_dimension, Constraints, Context, Dimension, KernelPolicy};
use beauville::braid::orbit_classes;
use beauville::catalog::{build, load_group_file, parse_group_spec};
use beauville::invariants::candidate_tuples;
use beauville::morphisms::automorphism_group;
use beauville::oracle::{oracle_classify, OracleScope};
use beauville::report::{class_report, orbit_report};
use beauville::triples::TripleType;
use beauville::verify::{oracle_agrees, run_all, Status, VerifyOptions};
use beauville::{Error, FiniteGroup, Limits};

#[derive(Parser)]
#[command(name = "beauville", version, about = "Unmixed Beauville structures on finite groups")]
struct Cli {
    /// Worker threads; defaults to one per core.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classes of generating triples up to automorphisms and braid moves.
    Orbits {
        #[command(flatten)]
        group: GroupArg,
        /// Only triples of this type, in any order.
        #[arg(long = "type", value_parser = parse_type)]
        ty: Option<TripleType>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Biholomorphism classes of unmixed Beauville n-folds.
    Classify {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        chi: Option<i64>,
        /// Type of one factor; repeat once per factor.
        #[arg(long = "type", value_parser = parse_type)]
        types: Vec<TripleType>,
        #[arg(long, value_enum, default_value_t = KernelArg::All)]
        kernels: KernelArg,
        /// Also run the brute-force enumeration and fail on disagreement.
        #[arg(long)]
        oracle: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Least n with an unmixed Beauville n-fold.
    BeauvilleDim {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long, default_value_t = 3)]
        n_max: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Numerically admissible orders, genera and types for threefolds with a given chi.
    Candidates {
        #[arg(long, allow_hyphen_values = true)]
        chi: i64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Reproduces the published classification results.
    VerifyPaper {
        /// Optional heavy checks.
        #[arg(long, value_enum, value_delimiter = ',')]
        include: Vec<Include>,
        /// Moduli for the C_n^3 construction.
        #[arg(long, value_delimiter = ',')]
        nvalues: Vec<u64>,
        /// Directory of GroupFiles covering every group of order below 25.
        #[arg(long)]
        group_files: Option<PathBuf>,
        /// Run only these criteria.
        #[arg(long, value_delimiter = ',')]
        only: Option<Vec<u32>>,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args)]
struct GroupArg {
    /// Group spec such as "C5^2", "PSL(2,7)" or "File(\"g.group\")", or a path to a GroupFile.
    #[arg(long)]
    group: String,
}

#[derive(Args)]
struct OutputArgs {
    /// Defaults to csv for `candidates` and json elsewhere.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelArg {
    Trivial,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Include {
    Z5cubed,
    Znconstruction,
}

fn parse_type(s: &str) -> Result<TripleType, String> {
    let parts: Vec<u32> = s
        .trim_matches(|c| c == '[' || c == ']')
        .split(',')
        .map(|p| p.trim().parse::<u32>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    <[u32; 3]>::try_from(parts).map_err(|p| format!("a type has three entries, got {}", p.len()))
}

/// A run that finished but whose result is a failed check.
#[derive(Debug)]
struct VerificationFailed(String);

impl std::fmt::Display for VerificationFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for VerificationFailed {}

impl OutputArgs {
    fn format(&self) -> Format {
        self.format.unwrap_or(Format::Json)
    }
}

fn load_group(spec: &str, limits: &Limits) -> anyhow::Result<FiniteGroup> {
    let path = Path::new(spec);
    if path.is_file() {
        return Ok(load_group_file(path, limits)?);
    }
    Ok(build(&parse_group_spec(spec)?, limits)?)
}

fn emit(out: &OutputArgs, body: &str) -> anyhow::Result<()> {
    match &out.output {
        Some(path) => std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().lock().write_all(body.as_bytes())?,
    }
    Ok(())
}

fn json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn csv_rows(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn join<T: ToString>(xs: &[T], sep: &str) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(sep)
}

fn type_text(t: &TripleType) -> String {
    format!("[{}]", join(t, ","))
}

fn orbits(group: &GroupArg, ty: Option<TripleType>, out: &OutputArgs, limits: &Limits) -> anyhow::Result<()> {
    let h = load_group(&group.group, limits)?;
    let entries = orbit_report(&h, &orbit_classes(&h, &automorphism_group(&h), ty));
    let body = match out.format() {
        Format::Json => json(&entries)?,
        Format::Csv => csv_rows(
            &["type", "genus", "orbit_size", "braid_orbit_size", "representative"],
            entries.iter().map(|e| {
                vec![
                    type_text(&e.ty),
                    e.genus.to_string(),
                    e.orbit_size.to_string(),
                    e.braid_orbit_size.to_string(),
                    format!("[{}]", e.representative.join(", ")),
                ]
            }),
        )?,
        Format::Text => {
            let mut s = format!("{}: {} class(es)\n", h.label(), entries.len());
            for e in &entries {
                s += &format!(
                    "  type {} genus {} orbit {} (braid orbit {}): [{}]\n",
                    type_text(&e.ty),
                    e.genus,
                    e.orbit_size,
                    e.braid_orbit_size,
                    e.representative.join(", ")
                );
            }
            s
        }
    };
    emit(out, &body)
}

struct ClassifyArgs<'a> {
    group: &'a GroupArg,
    n: usize,
    chi: Option<i64>,
    types: &'a [TripleType],
    kernels: KernelArg,
    oracle: bool,
    out: &'a OutputArgs,
}

fn classify(a: ClassifyArgs<'_>, limits: &Limits) -> anyhow::Result<()> {
    let g = load_group(&a.group.group, limits)?;
    let ctx = Context::new(&g, *limits);
    if !a.types.is_empty() && a.types.len() != a.n {
        return Err(Error::Input(format!("{} types given for n = {}", a.types.len(), a.n)).into());
    }
    let constraints = Constraints {
        chi: a.chi,
        kernels: match a.kernels {
            KernelArg::Trivial => KernelPolicy::Trivial,
            KernelArg::All => KernelPolicy::All,
        },
        types: (!a.types.is_empty()).then(|| a.types.to_vec()),
    };
    let result = ctx.classify(a.n, &constraints)?;
    if a.oracle {
        let oracle = oracle_classify(&g, a.n, &constraints, &OracleScope::Full, limits)?;
        if !oracle_agrees(&ctx, &result, &oracle) {
            return Err(VerificationFailed(format!(
                "fiber route found {} classes, brute force {}",
                result.total(),
                oracle.total()
            ))
            .into());
        }
    }
    let report = class_report(&ctx, &a.group.group, &result, a.oracle);
    let body = match a.out.format() {
        Format::Json => json(&report)?,
        Format::Csv => csv_rows(
            &["index", "kernel_tuple", "triples", "type_tuple", "genera", "chi", "self_intersection", "euler", "kodaira", "canonical_key"],
            report.classes.iter().enumerate().map(|(i, c)| {
                let kernels: Vec<String> = c.kernel_tuple.iter().map(|k| format!("<{}>", k.join(","))).collect();
                let triples: Vec<String> = c.triples.iter().map(|t| format!("[{}]", t.join(", "))).collect();
                let types: Vec<String> = c.type_tuple.iter().map(type_text).collect();
                vec![
                    i.to_string(),
                    kernels.join(" "),
                    triples.join(" "),
                    types.join(" "),
                    join(&c.genera, " "),
                    c.chi.to_string(),
                    c.self_intersection.to_string(),
                    c.euler.to_string(),
                    c.kodaira.to_string(),
                    c.canonical_key.clone(),
                ]
            }),
        )?,
        Format::Text => {
            let mut s = format!("{}, n = {}: {} class(es)\n", report.group_spec, report.n, report.total_count);
            for c in &report.cells {
                let kernels: Vec<String> = c.kernel_tuple.iter().map(|k| format!("<{}>", k.join(","))).collect();
                let types: Vec<String> = c.type_tuple.iter().map(type_text).collect();
                s += &format!("  kernels {} types {}: {}\n", kernels.join(" "), types.join(" "), c.count);
            }
            for d in &report.diagnostics {
                s += &format!("  note: {d}\n");
            }
            if report.oracle_checked {
                s += "  brute force agrees\n";
            }
            s
        }
    };
    emit(a.out, &body)
}

#[derive(Serialize)]
struct DimensionReport<'a> {
    group_spec: &'a str,
    n_max: usize,
    dimension: Dimension,
}

fn dimension(group: &GroupArg, n_max: usize, out: &OutputArgs, limits: &Limits) -> anyhow::Result<()> {
    let g = load_group(&group.group, limits)?;
    let d = beauville_dimension(&Context::new(&g, *limits), n_max)?;
    let body = match out.format() {
        Format::Json => json(&DimensionReport { group_spec: &group.group, n_max, dimension: d })?,
        Format::Csv => {
            let (status, n) = match d {
                Dimension::Exact { n } => ("exact", n),
                Dimension::Indeterminate { n_max } => ("indeterminate", n_max),
            };
            csv_rows(&["group_spec", "status", "n"], [vec![group.group.clone(), status.into(), n.to_string()]])?
        }
        Format::Text => match d {
            Dimension::Exact { n } => format!("d({}) = {n}\n", group.group),
            Dimension::Indeterminate { n_max } => format!("d({}) > {n_max}\n", group.group),
        },
    };
    emit(out, &body)
}

fn candidates(chi: i64, out: &OutputArgs) -> anyhow::Result<()> {
    let list = candidate_tuples(chi)?;
    let body = match out.format.unwrap_or(Format::Csv) {
        Format::Json => json(&list)?,
        Format::Csv | Format::Text => csv_rows(
            &["N", "g1", "g2", "g3", "T1", "T2", "T3"],
            list.iter().map(|c| {
                let mut row = vec![c.order.to_string()];
                row.extend(c.genera.iter().map(ToString::to_string));
                row.extend(c.types.iter().map(type_text));
                row
            }),
        )?,
    };
    emit(out, &body)
}

fn verify(opts: VerifyOptions, out: &OutputArgs) -> anyhow::Result<()> {
    let outcomes = run_all(&opts);
    let body = match out.format() {
        Format::Json => json(&outcomes)?,
        Format::Csv => csv_rows(
            &["id", "name", "status", "seconds", "detail"],
            outcomes.iter().map(|o| {
                vec![o.id.to_string(), o.name.clone(), o.status.to_string(), format!("{:.3}", o.seconds), o.detail.clone()]
            }),
        )?,
        Format::Text => outcomes.iter().map(|o| format!("{o}\n")).collect(),
    };
    emit(out, &body)?;
    let failed: Vec<String> = outcomes.iter().filter(|o| o.status == Status::Fail).map(|o| o.id.to_string()).collect();
    if !failed.is_empty() {
        return Err(VerificationFailed(format!("criteria {} failed", failed.join(", "))).into());
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let limits = Limits::from_env();
    let jobs = cli.jobs;
    beauville::par::with_threads(jobs, move || match &cli.command {
        Command::Orbits { group, ty, out } => orbits(group, *ty, out, &limits),
        Command::Classify { group, n, chi, types, kernels, oracle, out } => classify(
            ClassifyArgs { group, n: *n, chi: *chi, types, kernels: *kernels, oracle: *oracle, out },
            &limits,
        ),
        Command::BeauvilleDim { group, n_max, out } => dimension(group, *n_max, out, &limits),
        Command::Candidates { chi, out } => candidates(*chi, out),
        Command::VerifyPaper { include, nvalues, group_files, only, out } => {
            let zn_values = match (include.contains(&Include::Znconstruction), nvalues.is_empty()) {
                (false, _) => Vec::new(),
                (true, true) => vec![5, 7],
                (true, false) => nvalues.clone(),
            };
            let opts = VerifyOptions {
                z5_cubed: include.contains(&Include::Z5cubed),
                zn_values,
                group_files: group_files.clone(),
                only: only.clone(),
            };
            verify(opts, out)
        }
    })?
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<VerificationFailed>().is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
