//! `gowers-lab`: exact tiny thresholds, bound evaluation, extraction
//! pipelines and witness re-verification from the command line.
//!
//! Exit codes: 0 = value or witness produced, 1 = absent or refuted,
//! 2 = budget exceeded or invalid input.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use serde_json::json;

use gowers_core::blocks::{span, SpanMode};
use gowers_core::bounds::{
    alpha_num, beta_num, bound_g, bound_g_pm, bound_mg, bound_mg_pm, gamma_num, grzegorczyk_e,
    BoundCtx, DigitGuard, GStrategy, MtStrategy, Value,
};
use gowers_core::extract::recheck::{recheck, WitnessClaim};
use gowers_core::extract::{
    extract_multidim_positive, extract_multidim_signed, extract_positive, extract_signed,
    ExtractionReport,
};
use gowers_core::func::FiniteFunction;
use gowers_core::oracle::{BuiltinFamily, Coloring, ColoringOracle, Domain};
use gowers_core::types::enumerate_types;
use gowers_core::verifier::{
    exact_number, holds_at, verify_no_ramsey_degree, ExactQuery, QueryKind,
};
use gowers_core::{Error, FuncBlockSeq, Search, SetBlockSeq};

const DEFAULT_BUDGET: u64 = 100_000_000;
const MAX_ORACLE_ENTRIES: usize = 1_000_000;

#[derive(Parser)]
#[command(name = "gowers-lab", version, about = "Finite Gowers c0 combinatorics toolkit")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker count (1 = fully deterministic sequential mode).
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Node budget; overrides GOWERS_LAB_BUDGET and the built-in default.
    #[arg(long, global = true)]
    budget: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact least thresholds by exhaustive search.
    Exact(ExactArgs),
    /// Evaluate a bound formula or growth function.
    Bounds(BoundsArgs),
    /// Run an extraction pipeline against an oracle.
    Extract(ExtractArgs),
    /// Re-verify a witness file, decide a property at fixed n, or check the
    /// no-Ramsey-degree construction.
    Verify(VerifyArgs),
    /// Enumerate or count types.
    Types(TypesArgs),
    /// Enumerate the span of a block sequence of functions.
    Span(SpanArgs),
}

#[derive(Args)]
struct ExactArgs {
    /// MT | G | G_PM | MG | MG_PM
    #[arg(long)]
    kind: String,
    #[arg(long, default_value_t = 1)]
    k: u32,
    #[arg(long, default_value_t = 1)]
    d: usize,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    r: u32,
    #[arg(long, default_value_t = 8)]
    n_max: usize,
}

#[derive(Args)]
struct BoundsArgs {
    /// E | alpha | beta | gamma | G | G_pm | MG | MG_pm | h
    #[arg(long = "fn")]
    function: String,
    #[arg(long)]
    q: Option<u32>,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    second: Option<u64>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    d: Option<u64>,
    #[arg(long)]
    ell: Option<u64>,
    #[arg(long)]
    m: Option<u64>,
    #[arg(long)]
    r: Option<u64>,
    #[arg(long)]
    x: Option<u64>,
    /// exact | symbolic | table
    #[arg(long, default_value = "symbolic")]
    mt: String,
    /// JSON file of {"d,m,r": value} entries for the table strategy.
    #[arg(long)]
    mt_table: Option<PathBuf>,
    #[arg(long, default_value_t = 8)]
    n_max: usize,
    /// Digit guard (decimal digits) before arithmetic degrades to symbolic.
    #[arg(long, default_value_t = 1_000_000)]
    max_digits: usize,
}

#[derive(Args)]
struct ExtractArgs {
    /// positive | signed | multidim-positive | multidim-signed
    #[arg(long)]
    pipeline: String,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: u32,
    #[arg(long, default_value_t = 1)]
    d: usize,
    #[arg(long)]
    m: usize,
    /// Built-in oracle id (constant, by-type, by-min-supp-sign,
    /// parity-of-sum) or a path to an oracle JSON file.
    #[arg(long)]
    oracle: String,
    /// Colors for built-in oracles.
    #[arg(long)]
    r: Option<u32>,
    /// Write the witness (re-verifiable via `verify --witness`) here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Witness file produced by `extract --out`.
    #[arg(long)]
    witness: Option<PathBuf>,
    /// Property kind for a holds-at check.
    #[arg(long)]
    kind: Option<String>,
    #[arg(long, default_value_t = 1)]
    k: u32,
    #[arg(long, default_value_t = 1)]
    d: usize,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    r: Option<u32>,
    #[arg(long)]
    n: Option<usize>,
    /// Check that the jump coloring realizes all K colors on every block
    /// sequence of length 2K.
    #[arg(long)]
    no_ramsey_degree: bool,
    #[arg(long, default_value_t = 2)]
    big_k: u32,
    /// Alias for --big-k matching the coloring parameter name.
    #[arg(long = "K")]
    cap_k: Option<u32>,
}

#[derive(Args)]
struct TypesArgs {
    #[arg(long)]
    k: u32,
    #[arg(long)]
    d: usize,
    #[arg(long, default_value_t = false)]
    signed: bool,
    /// Print only the count.
    #[arg(long, default_value_t = false)]
    count: bool,
}

#[derive(Args)]
struct SpanArgs {
    /// Inline JSON array of functions ({"n","k","signed","values"}).
    #[arg(long)]
    funcs: Option<String>,
    /// File with the same JSON array.
    #[arg(long)]
    input: Option<PathBuf>,
    /// pos-strict | pos-all | signed-strict | signed-all
    #[arg(long, default_value = "pos-strict")]
    mode: String,
}

/// The serialized witness format: enough to re-run the verification from
/// scratch with no extraction state.
#[derive(Serialize, Deserialize)]
struct WitnessFile {
    pipeline: String,
    n: usize,
    k: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    d: Option<usize>,
    m: usize,
    oracle: ColoringOracle,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    sets: Option<Vec<Vec<usize>>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    funcs: Option<Vec<FiniteFunction>>,
    color: u32,
    examined: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let budget = cli.budget.or_else(|| {
        std::env::var("GOWERS_LAB_BUDGET").ok().and_then(|v| v.parse().ok())
    });
    let search = Search::with_budget(budget.unwrap_or(DEFAULT_BUDGET)).with_jobs(cli.jobs);
    if cli.jobs > 1 {
        // the global pool serves all parallel sweeps
        let _ = gowers_core::configure_thread_pool(cli.jobs);
    }
    match run(&cli, &search) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli, search: &Search) -> Result<ExitCode, Error> {
    match &cli.cmd {
        Cmd::Exact(args) => cmd_exact(cli, search, args),
        Cmd::Bounds(args) => cmd_bounds(cli, search, args),
        Cmd::Extract(args) => cmd_extract(cli, search, args),
        Cmd::Verify(args) => cmd_verify(cli, search, args),
        Cmd::Types(args) => cmd_types(cli, args),
        Cmd::Span(args) => cmd_span(cli, args),
    }
}

fn parse_kind(s: &str) -> Result<QueryKind, Error> {
    QueryKind::parse(s).ok_or_else(|| Error::InvalidInput(format!("unknown kind {s}")))
}

fn cmd_exact(cli: &Cli, search: &Search, args: &ExactArgs) -> Result<ExitCode, Error> {
    let q = ExactQuery {
        kind: parse_kind(&args.kind)?,
        k: args.k,
        d: args.d,
        m: args.m,
        r: args.r,
        n_max: args.n_max,
    };
    match exact_number(search, &q)? {
        Some(v) => {
            match cli.format {
                Format::Text => println!("{v}"),
                Format::Json => println!(
                    "{}",
                    json!({"query": gowers_core::verifier::query_string(&q), "value": v, "n_max": q.n_max})
                ),
            }
            Ok(ExitCode::SUCCESS)
        }
        None => {
            match cli.format {
                Format::Text => println!("absent (no threshold at or below n_max={})", q.n_max),
                Format::Json => println!(
                    "{}",
                    json!({"query": gowers_core::verifier::query_string(&q), "value": null, "n_max": q.n_max})
                ),
            }
            Ok(ExitCode::from(1))
        }
    }
}

fn need<T: Copy>(v: Option<T>, what: &str) -> Result<T, Error> {
    v.ok_or_else(|| Error::InvalidInput(format!("missing --{what}")))
}

fn load_mt_table(path: &PathBuf) -> Result<MtStrategy, Error> {
    let raw: BTreeMap<String, u64> = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let mut entries = BTreeMap::new();
    for (key, value) in raw {
        let parts: Vec<u64> = key
            .split(',')
            .map(|p| p.trim().parse::<u64>())
            .collect::<Result<_, _>>()
            .map_err(|e| Error::InvalidInput(format!("bad table key {key}: {e}")))?;
        if parts.len() != 3 {
            return Err(Error::InvalidInput(format!("table key {key} must be d,m,r")));
        }
        entries.insert((parts[0], parts[1], parts[2]), BigUint::from(value));
    }
    MtStrategy::table(entries)
}

fn cmd_bounds(cli: &Cli, search: &Search, args: &BoundsArgs) -> Result<ExitCode, Error> {
    let guard = DigitGuard { max_digits: args.max_digits };
    let mt = match args.mt.as_str() {
        "symbolic" => MtStrategy::Symbolic,
        "exact" => MtStrategy::ExactTiny { n_max: args.n_max },
        "table" => {
            let path = args
                .mt_table
                .as_ref()
                .ok_or_else(|| Error::InvalidInput("missing --mt-table".into()))?;
            load_mt_table(path)?
        }
        other => return Err(Error::InvalidInput(format!("unknown mt strategy {other}"))),
    };
    let ctx = BoundCtx { mt: &mt, guard, search };
    let g_strategy = GStrategy::ViaBound;

    let value: Value = match args.function.as_str() {
        "E" => {
            let q = need(args.q, "q")?;
            let mut fn_args = vec![BigUint::from(need(args.n, "n")?)];
            if q == 0 {
                fn_args.push(BigUint::from(need(args.second, "second")?));
            }
            Value::Exact(grzegorczyk_e(q, &fn_args, guard)?)
        }
        "alpha" => Value::Exact(alpha_num(need(args.k, "k")?, &BigUint::from(need(args.m, "m")?), guard)?),
        "beta" => Value::Exact(beta_num(need(args.k, "k")?, &BigUint::from(need(args.m, "m")?), guard)?),
        "gamma" => Value::Exact(gamma_num(
            need(args.k, "k")?,
            need(args.d, "d")?,
            &BigUint::from(need(args.m, "m")?),
            guard,
        )?),
        "G" => bound_g(&ctx, need(args.k, "k")?, need(args.m, "m")?, need(args.r, "r")?)?,
        "G_pm" => bound_g_pm(&ctx, need(args.k, "k")?, need(args.m, "m")?, need(args.r, "r")?)?,
        "MG" => bound_mg(
            &ctx,
            need(args.k, "k")?,
            need(args.d, "d")?,
            need(args.m, "m")?,
            need(args.r, "r")?,
            g_strategy,
        )?,
        "MG_pm" => bound_mg_pm(
            &ctx,
            need(args.k, "k")?,
            need(args.d, "d")?,
            need(args.m, "m")?,
            need(args.r, "r")?,
            g_strategy,
        )?,
        "h" => gowers_core::bounds::h_fn(
            &ctx,
            need(args.d, "d")?,
            need(args.ell, "ell")?,
            need(args.r, "r")?,
            need(args.k, "k")?,
            need(args.x, "x")?,
            g_strategy,
        )?,
        other => return Err(Error::InvalidInput(format!("unknown bound function {other}"))),
    };
    match (cli.format, &value) {
        (Format::Text, Value::Exact(v)) => println!("{v}"),
        (Format::Text, Value::Sym(e)) => println!("{}", serde_json::to_string(e)?),
        (Format::Json, Value::Exact(v)) => {
            println!("{}", json!({"fn": args.function, "value": v.to_string()}))
        }
        (Format::Json, Value::Sym(e)) => {
            println!("{}", json!({"fn": args.function, "expression": e}))
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn build_oracle(id_or_path: &str, domain: Domain, r: Option<u32>) -> Result<ColoringOracle, Error> {
    if let Some(family) = BuiltinFamily::from_id(id_or_path) {
        let r = r.ok_or_else(|| Error::InvalidInput("built-in oracles need --r".into()))?;
        return ColoringOracle::builtin(domain, r, family);
    }
    let oracle: ColoringOracle = serde_json::from_str(&std::fs::read_to_string(id_or_path)?)?;
    if let Some(table) = &oracle.table {
        if table.len() > MAX_ORACLE_ENTRIES {
            return Err(Error::InvalidInput(format!(
                "oracle table has {} entries; the cap is {MAX_ORACLE_ENTRIES}",
                table.len()
            )));
        }
    }
    if oracle.domain != domain {
        return Err(Error::DomainMismatch {
            expected: domain.to_string(),
            got: oracle.domain.to_string(),
        });
    }
    if let Some(r) = r {
        if oracle.r != r {
            return Err(Error::InvalidInput(format!(
                "oracle file declares r={}, flags say r={r}",
                oracle.r
            )));
        }
    }
    Ok(oracle)
}

fn cmd_extract(cli: &Cli, search: &Search, args: &ExtractArgs) -> Result<ExitCode, Error> {
    let (domain, uses_d) = match args.pipeline.as_str() {
        "positive" => (Domain::PosSphere { n: args.n, k: args.k }, false),
        "signed" => (Domain::SignedSphere { n: args.n, k: args.k }, false),
        "multidim-positive" => (Domain::PosBlockSeqs { n: args.n, k: args.k, d: args.d }, true),
        "multidim-signed" => (Domain::SignedBlockSeqs { n: args.n, k: args.k, d: args.d }, true),
        other => return Err(Error::InvalidInput(format!("unknown pipeline {other}"))),
    };
    let oracle = Arc::new(build_oracle(&args.oracle, domain, args.r)?);
    let coloring: Arc<dyn Coloring> = oracle.clone();
    let report: ExtractionReport = match args.pipeline.as_str() {
        "positive" => extract_positive(search, args.n, args.k, args.m, coloring)?,
        "signed" => extract_signed(search, args.n, args.k, args.m, coloring)?,
        "multidim-positive" => {
            extract_multidim_positive(search, args.n, args.k, args.d, args.m, coloring)?
        }
        "multidim-signed" => {
            extract_multidim_signed(search, args.n, args.k, args.d, args.m, coloring)?
        }
        _ => unreachable!(),
    };

    match report.witness() {
        Some(w) => {
            let file = WitnessFile {
                pipeline: args.pipeline.clone(),
                n: args.n,
                k: args.k,
                d: uses_d.then_some(args.d),
                m: args.m,
                oracle: (*oracle).clone(),
                sets: w.sets.as_ref().map(|s| s.sets().to_vec()),
                funcs: w.funcs.as_ref().map(|f| f.funcs().to_vec()),
                color: w.color.expect("pipelines always report a color"),
                examined: report.examined,
            };
            let rendered = serde_json::to_string_pretty(&file)?;
            if let Some(path) = &args.out {
                std::fs::write(path, &rendered)?;
            }
            match cli.format {
                Format::Json => println!("{rendered}"),
                Format::Text => {
                    println!("witness found (color {})", file.color);
                    if let Some(sets) = &file.sets {
                        println!("  base: {}", serde_json::to_string(sets)?);
                    }
                    if let Some(funcs) = &file.funcs {
                        for f in funcs {
                            println!("  f: {:?}", f.values());
                        }
                    }
                    println!("  candidates examined: {}", file.examined);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        None => {
            match cli.format {
                Format::Text => println!("absent (n={} is below threshold for this coloring)", args.n),
                Format::Json => println!("{}", json!({"witness": null, "examined": report.examined})),
            }
            Ok(ExitCode::from(1))
        }
    }
}

fn verify_witness_file(search: &Search, path: &PathBuf) -> Result<bool, Error> {
    let file: WitnessFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let funcs = file
        .funcs
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("witness file has no function sequence".into()))
        .and_then(|fs| FuncBlockSeq::new(fs.clone()))?;
    let sets = match &file.sets {
        Some(sets) => Some(SetBlockSeq::new(sets.clone(), file.n)?),
        None => None,
    };
    let claim = match file.pipeline.as_str() {
        "positive" => WitnessClaim::Positive {
            n: file.n,
            k: file.k,
            m: file.m,
            funcs: &funcs,
            color: file.color,
        },
        "signed" => WitnessClaim::Signed {
            n: file.n,
            k: file.k,
            m: file.m,
            sets: sets.as_ref().ok_or_else(|| Error::InvalidInput("signed witness needs a base".into()))?,
            funcs: &funcs,
            color: file.color,
        },
        "multidim-positive" => WitnessClaim::MultidimPositive {
            n: file.n,
            k: file.k,
            d: file.d.ok_or_else(|| Error::InvalidInput("missing d".into()))?,
            m: file.m,
            funcs: &funcs,
            color: file.color,
        },
        "multidim-signed" => WitnessClaim::MultidimSigned {
            n: file.n,
            k: file.k,
            d: file.d.ok_or_else(|| Error::InvalidInput("missing d".into()))?,
            m: file.m,
            sets: sets.as_ref().ok_or_else(|| Error::InvalidInput("signed witness needs a base".into()))?,
            funcs: &funcs,
            color: file.color,
        },
        other => return Err(Error::InvalidInput(format!("unknown pipeline {other}"))),
    };
    recheck(search, &claim, &file.oracle)
}

fn cmd_verify(cli: &Cli, search: &Search, args: &VerifyArgs) -> Result<ExitCode, Error> {
    let verdict = if let Some(path) = &args.witness {
        verify_witness_file(search, path)?
    } else if args.no_ramsey_degree {
        let big_k = args.cap_k.unwrap_or(args.big_k);
        verify_no_ramsey_degree(search, need(args.n, "n")?, big_k)?
    } else if let Some(kind) = &args.kind {
        let q = ExactQuery {
            kind: parse_kind(kind)?,
            k: args.k,
            d: args.d,
            m: need(args.m, "m")?,
            r: need(args.r, "r")?,
            n_max: 0,
        };
        holds_at(search, &q, need(args.n, "n")?)?
    } else {
        return Err(Error::InvalidInput(
            "verify needs --witness, --kind, or --no-ramsey-degree".into(),
        ));
    };
    match cli.format {
        Format::Text => println!("{verdict}"),
        Format::Json => println!("{}", json!({"verdict": verdict})),
    }
    Ok(if verdict { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

/// Line-by-line output that stops quietly when the pipe closes.
fn print_lines<I: IntoIterator<Item = String>>(lines: I) {
    use std::io::Write;
    let stdout = std::io::stdout();
    let mut out = std::io::BufWriter::new(stdout.lock());
    for line in lines {
        if writeln!(out, "{line}").is_err() {
            return;
        }
    }
    let _ = out.flush();
}

fn cmd_types(cli: &Cli, args: &TypesArgs) -> Result<ExitCode, Error> {
    let types = enumerate_types(args.k, args.d, args.signed);
    match (cli.format, args.count) {
        (Format::Text, true) => println!("{}", types.len()),
        (Format::Json, true) => println!("{}", json!({"count": types.len()})),
        (Format::Text, false) => print_lines(types.iter().map(|t| format!("{:?}", t.word()))),
        (Format::Json, false) => println!("{}", serde_json::to_string(&types)?),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_span(cli: &Cli, args: &SpanArgs) -> Result<ExitCode, Error> {
    let raw = match (&args.funcs, &args.input) {
        (Some(inline), None) => inline.clone(),
        (None, Some(path)) => std::fs::read_to_string(path)?,
        _ => return Err(Error::InvalidInput("span needs exactly one of --funcs / --input".into())),
    };
    let funcs: Vec<FiniteFunction> = serde_json::from_str(&raw)?;
    let seq = FuncBlockSeq::new(funcs)?;
    let mode = match args.mode.as_str() {
        "pos-strict" => SpanMode::PosStrict,
        "pos-all" => SpanMode::PosAll,
        "signed-strict" => SpanMode::SignedStrict,
        "signed-all" => SpanMode::SignedAll,
        other => return Err(Error::InvalidInput(format!("unknown span mode {other}"))),
    };
    let elements = span(&seq, mode)?;
    match cli.format {
        Format::Text => print_lines(elements.iter().map(|f| format!("{:?}", f.values()))),
        Format::Json => println!("{}", serde_json::to_string(&elements)?),
    }
    Ok(ExitCode::SUCCESS)
}
