//! `msr`: construct, verify and exercise explicit MSR codes from the command line.
//!
//! Exit codes: 0 success, 1 verification or simulation failure, 2 usage or input error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use msr_core::aset::{ASSet, Variant};
use msr_core::construct::{construct, Parity, QChoice};
use msr_core::gf::Felt;
use msr_core::msr::{simulate, CodeSpec, NodeArray};
use msr_core::par::Exec;
use msr_core::report::Report;
use msr_core::{verify, Error};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Parser)]
#[command(name = "msr", version, about = "Explicit MSR codes with two and three parities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Run every stage on one thread.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Build and certify an (A, S)-set.
    Construct(ConstructArgs),
    /// Re-run every check on a code file.
    Verify {
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Encode a seeded random file into n node columns.
    Encode {
        spec: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Repair one systematic node from the other n - 1.
    Repair {
        spec: PathBuf,
        nodes: PathBuf,
        #[arg(long)]
        node: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recover the file from exactly k nodes.
    Reconstruct {
        spec: PathBuf,
        nodes: PathBuf,
        /// Comma-separated node indices.
        #[arg(long, value_delimiter = ',', required = true)]
        from: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Encode, fail each systematic node, repair and reconstruct.
    Simulate {
        spec: PathBuf,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate (l, k, access, q) for one or more code files.
    Report {
        #[arg(required = true)]
        specs: Vec<PathBuf>,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long)]
    r: usize,
    #[arg(long)]
    m: usize,
    #[arg(long, value_enum, default_value_t = VariantArg::AccessOptimal)]
    variant: VariantArg,
    /// Use exactly this field order instead of searching.
    #[arg(long)]
    q: Option<u64>,
    #[arg(long, value_enum)]
    parity: Option<ParityArg>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, ValueEnum)]
enum VariantArg {
    AccessOptimal,
    Long,
}

#[derive(Copy, Clone, ValueEnum)]
enum ParityArg {
    Odd,
    Even,
}

/// A stored node array together with the seed that produced its file.
#[derive(Serialize, Deserialize)]
struct NodeFile {
    q: u32,
    seed: u64,
    nodes: Vec<String>,
}

#[derive(Serialize)]
struct ReconstructOutput<'a> {
    from: &'a [usize],
    file: Vec<String>,
    matches_systematic: bool,
}

enum Failure {
    Usage(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::VerificationFailed(_) => Failure::Check(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_set(path: &Path) -> Result<ASSet, Failure> {
    ASSet::from_json(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_nodes(code: &CodeSpec, path: &Path) -> Result<(NodeFile, NodeArray), Failure> {
    let file: NodeFile =
        serde_json::from_str(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    if file.q != code.q() {
        return Err(Failure::Usage(format!("node file is over GF({}), code is over GF({})", file.q, code.q())));
    }
    let array = NodeArray::from_hex(code.field(), &file.nodes)?;
    if array.columns.len() != code.n() || array.columns.iter().any(|c| c.len() != code.ell()) {
        return Err(Failure::Usage(format!("node file does not hold {} columns of {} symbols", code.n(), code.ell())));
    }
    Ok((file, array))
}

/// Writes `text` to `out`, or to stdout when no path is given.
fn emit(out: &Option<PathBuf>, text: &str) -> Outcome {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Human-readable lines go to stdout unless stdout carries the artifact.
fn note(out: &Option<PathBuf>, line: &str) {
    if out.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
}

fn cmd_construct(a: &ConstructArgs) -> Outcome {
    let variant = match (a.r, a.variant) {
        (2, VariantArg::AccessOptimal) => Variant::R2AccessOptimal,
        (2, VariantArg::Long) => return Err(Failure::Usage("the long variant needs --r 3".into())),
        (3, VariantArg::AccessOptimal) => Variant::R3AccessOptimal,
        (3, VariantArg::Long) => Variant::R3Long,
        (r, _) => return Err(Failure::Usage(format!("--r must be 2 or 3, got {r}"))),
    };
    let cap = if a.r == 2 { 7 } else { 4 };
    let floor = if variant == Variant::R2AccessOptimal { 2 } else { 1 };
    if a.m < floor || a.m > cap {
        return Err(Failure::Usage(format!("--m must lie in {floor}..={cap} for r = {}", a.r)));
    }
    let choice = match (a.q, a.parity) {
        (Some(_), Some(_)) => return Err(Failure::Usage("--q and --parity are exclusive".into())),
        (Some(q), None) => QChoice::Fixed(q),
        (None, p) => QChoice::Auto(p.map(|p| match p {
            ParityArg::Odd => Parity::Odd,
            ParityArg::Even => Parity::Even,
        })),
    };
    let set = construct(variant, a.m, choice)?;
    emit(&a.out, &set.to_json())?;
    note(&a.out, &format!("q={} k={} ell={} n={}", set.q(), set.k(), set.ell, set.n()));
    Ok(())
}

fn cmd_verify(spec: &Path, out: &Option<PathBuf>, exec: Exec) -> Outcome {
    let set = load_set(spec)?;
    let cert = verify::full(&set, exec)?;
    emit(out, &cert.to_json())?;
    if cert.passed {
        note(out, "PASS");
        Ok(())
    } else {
        Err(Failure::Check(format!("FAIL: {}", cert.failure_summary())))
    }
}

fn cmd_encode(spec: &Path, seed: u64, out: &Option<PathBuf>) -> Outcome {
    let code = CodeSpec::new(load_set(spec)?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let store = code.encode(&code.random_file(&mut rng))?;
    let file = NodeFile { q: code.q(), seed, nodes: store.to_hex(code.field()) };
    emit(out, &serde_json::to_string_pretty(&file).expect("plain data serializes"))
}

fn cmd_repair(spec: &Path, nodes: &Path, node: usize, out: &Option<PathBuf>) -> Outcome {
    let code = CodeSpec::new(load_set(spec)?)?;
    let (_, store) = load_nodes(&code, nodes)?;
    let t = code.repair(&store, node)?;
    emit(out, &t.to_json(code.field()))?;
    let (_, budget) = code.bandwidth_budget();
    if t.recovered != store.columns[node] {
        return Err(Failure::Check(format!("FAIL: repaired node {node} differs from the stored column")));
    }
    note(out, &format!("node {node} repaired: {} symbols sent (budget {budget})", t.symbols_sent));
    Ok(())
}

fn cmd_reconstruct(spec: &Path, nodes: &Path, from: &[usize], out: &Option<PathBuf>) -> Outcome {
    let code = CodeSpec::new(load_set(spec)?)?;
    let (_, store) = load_nodes(&code, nodes)?;
    let picked: Vec<(usize, Vec<Felt>)> = from
        .iter()
        .map(|&i| store.columns.get(i).map(|c| (i, c.clone())))
        .collect::<Option<_>>()
        .ok_or_else(|| Failure::Usage(format!("node indices must be below n = {}", code.n())))?;
    let file = code.reconstruct(&picked)?;
    let systematic: Vec<Felt> = store.columns[..code.k()].concat();
    let chunks = NodeArray { columns: file.chunks(code.ell()).map(<[Felt]>::to_vec).collect() };
    let result = ReconstructOutput { from, file: chunks.to_hex(code.field()), matches_systematic: file == systematic };
    emit(out, &serde_json::to_string_pretty(&result).expect("plain data serializes"))?;
    if result.matches_systematic {
        Ok(())
    } else {
        Err(Failure::Check("FAIL: reconstructed file differs from the systematic nodes".into()))
    }
}

fn cmd_simulate(spec: &Path, trials: usize, seed: u64, json: bool, out: &Option<PathBuf>, exec: Exec) -> Outcome {
    let code = CodeSpec::new(load_set(spec)?)?;
    let report = simulate(&code, trials, seed, exec)?;
    emit(out, &if json { report.to_json() } else { report.table() })?;
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Check("FAIL: simulation found an inexact repair or reconstruct".into()))
    }
}

fn cmd_report(specs: &[PathBuf], json: bool, out: &Option<PathBuf>) -> Outcome {
    let sets = specs.iter().map(|p| load_set(p)).collect::<Result<Vec<_>, _>>()?;
    let report = Report::new(&sets);
    emit(out, &if json { report.to_json() } else { report.table() })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exec = if cli.sequential { Exec::Sequential } else { Exec::default() };
    let outcome = match &cli.command {
        Command::Construct(a) => cmd_construct(a),
        Command::Verify { spec, out } => cmd_verify(spec, out, exec),
        Command::Encode { spec, seed, out } => cmd_encode(spec, *seed, out),
        Command::Repair { spec, nodes, node, out } => cmd_repair(spec, nodes, *node, out),
        Command::Reconstruct { spec, nodes, from, out } => cmd_reconstruct(spec, nodes, from, out),
        Command::Simulate { spec, trials, seed, json, out } => cmd_simulate(spec, *trials, *seed, *json, out, exec),
        Command::Report { specs, json, out } => cmd_report(specs, *json, out),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
