//! Command-line verification reports and data exports for flag varieties
//! over finite fields.
//!
//! Exit codes: 0 — success and every mathematical check passed; 1 — usage,
//! I/O or budget error; 2 — a mathematical check failed.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use steinberg_core::flag::{FlagSpace, DEFAULT_BUDGET};
use steinberg_core::gfq::FieldSpec;
use steinberg_core::kernel::{gram_matrix, k_pairs, kappa, kernel_value, KernelValue};
use steinberg_core::perm::{enumerate_sn, q_factorial};
use steinberg_core::rational::rational_to_string;
use steinberg_core::serial::{biflag_from_json, flag_from_json, BiFlagJson, FlagJson};
use steinberg_core::steinberg::{
    b_invariant_dim_in_steinberg, eta, invariance_suite, pi_j_apply, project_delta, psd_rank,
    steinberg_basis,
};
use steinberg_core::Error as CoreError;

/// Default budget for the quadratic-cost commands (verify, gram), whose Gram
/// stage touches |Fl|² exact rationals. Enumeration-only commands use the
/// library default instead.
const DEFAULT_VERIFY_BUDGET: u64 = 1_000;

#[derive(Parser)]
#[command(name = "steinberg", version, about = "Exact verification of flag varieties over F_q and their Steinberg kernel")]
struct Cli {
    #[command(subcommand)]
    command: Commands,
}

#[derive(Subcommand)]
enum Commands {
    /// Count or enumerate the complete flag variety Fl(n, q)
    Flags {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: u64,
        /// Maximum number of flags to materialize
        #[arg(long)]
        budget: Option<u64>,
        /// Output file (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Tabulate Schubert cells: sigma, I(sigma), |X^sigma|, eta value
    Cells {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Export the full Gram matrix of kernel values as CSV
    Gram {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the full verification suite and write a JSON report
    Verify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        budget: Option<u64>,
        /// Random samples for the invariance checks
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Include wall-clock timings (breaks byte-stability of the report)
        #[arg(long)]
        timings: bool,
        /// Corrupt an intermediate value to exercise the failure path
        #[arg(long, hide = true)]
        inject_fault: Option<String>,
    },
    /// Evaluate k(V, W) and K(V, W) for two serialized flags
    Kernel {
        #[arg(long)]
        flag_a: PathBuf,
        #[arg(long)]
        flag_b: PathBuf,
    },
    /// Operations on windowed flags of Fl(2∞)
    Biflag {
        #[command(subcommand)]
        command: BiflagCommands,
    },
}

#[derive(Subcommand)]
enum BiflagCommands {
    /// Evaluate the infinite kernel for two serialized windowed flags
    Kernel {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

enum CliError {
    Core(CoreError),
    Io(String, std::io::Error),
    Json(String, serde_json::Error),
    Usage(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => match e {
                CoreError::BudgetExceeded { required, budget: _ } => write!(
                    f,
                    "{}; pass --budget {} or set STEINBERG_BUDGET to raise the limit",
                    e, required
                ),
                _ => write!(f, "{}", e),
            },
            CliError::Io(path, e) => write!(f, "{}: {}", path, e),
            CliError::Json(path, e) => write!(f, "{}: {}", path, e),
            CliError::Usage(msg) => write!(f, "{}", msg),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> CliError {
        CliError::Core(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Commands::Flags { n, q, budget, out, format } => run_flags(n, q, budget, out, format),
        Commands::Cells { n, q, budget, out, format } => run_cells(n, q, budget, out, format),
        Commands::Gram { n, q, budget, out } => run_gram(n, q, budget, out),
        Commands::Verify { n, q, budget, samples, seed, out, timings, inject_fault } => {
            run_verify(n, q, budget, samples, seed, out, timings, inject_fault)
        }
        Commands::Kernel { flag_a, flag_b } => run_kernel(flag_a, flag_b),
        Commands::Biflag { command } => match command {
            BiflagCommands::Kernel { a, b } => run_biflag_kernel(a, b),
        },
    }
}

/// Budget resolution order: --budget flag, STEINBERG_BUDGET, per-command default.
fn resolve_budget(flag: Option<u64>, default: u64) -> u64 {
    if let Some(b) = flag {
        return b.max(1);
    }
    if let Ok(v) = std::env::var("STEINBERG_BUDGET") {
        if let Ok(b) = v.parse::<u64>() {
            return b.max(1);
        }
    }
    default
}

fn emit(out: Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(&path, content)
            .map_err(|e| CliError::Io(path.display().to_string(), e)),
        None => {
            print!("{}", content);
            Ok(())
        }
    }
}

fn build_space(n: usize, q: u64, budget: u64) -> Result<Arc<FlagSpace>, CliError> {
    let spec = FieldSpec::shared(q)?;
    Ok(Arc::new(FlagSpace::new(n, &spec, budget)?))
}

fn flag_to_compact_string(flag: &steinberg_core::flag::Flag) -> String {
    flag.subspaces()
        .iter()
        .map(|s| {
            (0..s.dim())
                .map(|r| {
                    s.basis()
                        .row(r)
                        .iter()
                        .map(|e| e.value().to_string())
                        .collect::<Vec<_>>()
                        .join(" ")
                })
                .collect::<Vec<_>>()
                .join(";")
        })
        .collect::<Vec<_>>()
        .join("|")
}

fn run_flags(n: usize, q: u64, budget: Option<u64>, out: Option<PathBuf>, format: Format) -> Result<u8, CliError> {
    let budget = resolve_budget(budget, DEFAULT_BUDGET);
    let space = build_space(n, q, budget)?;
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct FlagsSummary {
                n: usize,
                q: u64,
                flag_count: usize,
            }
            let summary = FlagsSummary { n, q, flag_count: space.len() };
            emit(out, &format!("{}\n", serde_json::to_string_pretty(&summary).unwrap()))?;
        }
        Format::Csv => {
            let mut csv = String::from("index,cell,flag\n");
            for (sigma, range) in space.cells() {
                for i in range.clone() {
                    csv.push_str(&format!(
                        "{},\"{}\",{}\n",
                        i,
                        sigma.one_line(),
                        flag_to_compact_string(&space.flags()[i])
                    ));
                }
            }
            emit(out, &csv)?;
        }
    }
    Ok(0)
}

fn run_cells(n: usize, q: u64, budget: Option<u64>, out: Option<PathBuf>, format: Format) -> Result<u8, CliError> {
    let budget = resolve_budget(budget, DEFAULT_BUDGET);
    let space = build_space(n, q, budget)?;
    #[derive(Serialize)]
    struct CellRow {
        sigma: String,
        inversions: usize,
        size: usize,
        eta: String,
    }
    let rows: Vec<CellRow> = space
        .cells()
        .iter()
        .map(|(sigma, range)| {
            let value = KernelValue::new(sigma.inversions(), q).to_rational();
            CellRow {
                sigma: sigma.one_line(),
                inversions: sigma.inversions(),
                size: range.len(),
                eta: rational_to_string(&value),
            }
        })
        .collect();
    match format {
        Format::Json => {
            emit(out, &format!("{}\n", serde_json::to_string_pretty(&rows).unwrap()))?;
        }
        Format::Csv => {
            let mut csv = String::from("sigma,inversions,size,eta\n");
            for r in rows {
                csv.push_str(&format!("\"{}\",{},{},{}\n", r.sigma, r.inversions, r.size, r.eta));
            }
            emit(out, &csv)?;
        }
    }
    Ok(0)
}

fn run_gram(n: usize, q: u64, budget: Option<u64>, out: Option<PathBuf>) -> Result<u8, CliError> {
    let budget = resolve_budget(budget, DEFAULT_VERIFY_BUDGET);
    let space = build_space(n, q, budget)?;
    let gram = gram_matrix(space.flags())?;
    let m = gram.size();
    let mut csv = String::new();
    let header: Vec<String> = (0..m).map(|i| format!("flag_{}", i)).collect();
    csv.push_str(&header.join(","));
    csv.push('\n');
    for i in 0..m {
        let row: Vec<String> = (0..m).map(|j| rational_to_string(gram.get(i, j))).collect();
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    emit(out, &csv)?;
    Ok(0)
}

#[derive(Serialize)]
struct Check {
    name: String,
    pass: bool,
    detail: String,
}

#[derive(Serialize)]
struct Report {
    n: usize,
    q: u64,
    flag_count: usize,
    cell_sizes: BTreeMap<String, usize>,
    gram_rank: usize,
    steinberg_dim: usize,
    is_psd: bool,
    s: String,
    b_invariant_dim: usize,
    checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timings_ms: Option<BTreeMap<String, u128>>,
}

#[allow(clippy::too_many_arguments)]
fn run_verify(
    n: usize,
    q: u64,
    budget: Option<u64>,
    samples: usize,
    seed: u64,
    out: Option<PathBuf>,
    timings: bool,
    inject_fault: Option<String>,
) -> Result<u8, CliError> {
    let budget = resolve_budget(budget, DEFAULT_VERIFY_BUDGET);
    let mut clocks: BTreeMap<String, u128> = BTreeMap::new();
    let mut checks: Vec<Check> = Vec::new();

    if let Some(kind) = inject_fault.as_deref() {
        if kind != "gram" {
            return Err(CliError::Usage(format!("unknown fault kind '{}' (expected 'gram')", kind)));
        }
    }

    let t0 = Instant::now();
    let space = build_space(n, q, budget)?;
    clocks.insert("enumerate".into(), t0.elapsed().as_millis());

    // cell partition and sizes
    let t = Instant::now();
    let mut cell_sizes = BTreeMap::new();
    let mut partition_ok = true;
    let mut covered = 0usize;
    for (sigma, range) in space.cells() {
        let expected = steinberg_core::perm::q_pow(q, sigma.inversions());
        partition_ok &= range.len() as u128 == expected;
        covered += range.len();
        cell_sizes.insert(sigma.one_line(), range.len());
    }
    partition_ok &= covered == space.len();
    checks.push(Check {
        name: "cell_partition".into(),
        pass: partition_ok,
        detail: format!("{} cells cover {} flags with |X^sigma| = q^I", space.cells().len(), covered),
    });

    // kappa equals inversions, constant per cell
    let mut kappa_ok = true;
    for (sigma, range) in space.cells() {
        let expected = sigma.inversions();
        for i in range.clone() {
            let f = &space.flags()[i];
            kappa_ok &= kappa(f) == expected && &f.cell() == sigma;
        }
    }
    checks.push(Check {
        name: "kappa_inversions".into(),
        pass: kappa_ok,
        detail: "kappa is constant on every cell and equals I(cell_of)".into(),
    });
    clocks.insert("cells".into(), t.elapsed().as_millis());

    // Gram assembly, PSD certificate, rank agreement
    let t = Instant::now();
    let mut gram = gram_matrix(space.flags())?;
    if inject_fault.as_deref() == Some("gram") && gram.size() >= 2 {
        let bad = BigRational::from_integer(BigInt::from(-2));
        gram.set(0, 1, bad.clone());
        gram.set(1, 0, bad);
    }
    let symmetric = gram.is_symmetric();
    checks.push(Check {
        name: "gram_symmetric".into(),
        pass: symmetric,
        detail: format!("{0}x{0} Gram matrix", gram.size()),
    });
    let cert = psd_rank(&gram)?;
    checks.push(Check {
        name: "gram_psd".into(),
        pass: cert.is_psd,
        detail: format!("{} positive pivots", cert.rank),
    });
    clocks.insert("gram_psd".into(), t.elapsed().as_millis());

    let t = Instant::now();
    let basis = steinberg_basis(&space);
    let steinberg_dim = basis.rows();
    let expected_dim = steinberg_core::perm::q_pow(q, n * (n - 1) / 2);
    let rank_ok = cert.rank as u128 == expected_dim && steinberg_dim as u128 == expected_dim;
    checks.push(Check {
        name: "rank_agreement".into(),
        pass: rank_ok,
        detail: format!(
            "gram rank {} vs Steinberg dimension {} vs q^(n(n-1)/2) = {}",
            cert.rank, steinberg_dim, expected_dim
        ),
    });
    clocks.insert("steinberg_basis".into(), t.elapsed().as_millis());

    // eta: recurrence and annihilation by every averaging operator
    let t = Instant::now();
    let eta_fn = eta(&space);
    let mut recurrence_ok = true;
    {
        let mut cell_value = std::collections::HashMap::new();
        for (sigma, range) in space.cells() {
            cell_value.insert(sigma.clone(), eta_fn.values()[range.start].clone());
        }
        let q_rat = BigRational::from_integer(BigInt::from(q));
        for sigma in enumerate_sn(n)? {
            for j in 1..n {
                let tau_sigma = sigma.left_mul_tau(j)?;
                if tau_sigma.inversions() > sigma.inversions() {
                    recurrence_ok &= (&q_rat * &cell_value[&tau_sigma] + &cell_value[&sigma]).is_zero();
                }
            }
        }
    }
    checks.push(Check {
        name: "eta_recurrence".into(),
        pass: recurrence_ok,
        detail: "q*eta[tau_j sigma] + eta[sigma] = 0 on every ascent".into(),
    });
    let mut pi_ok = true;
    for j in 1..n {
        let out_fn = pi_j_apply(&eta_fn, j)?;
        pi_ok &= out_fn.values.iter().all(|v| v.is_zero());
    }
    checks.push(Check {
        name: "pi_eta_zero".into(),
        pass: pi_ok,
        detail: "Pi_j eta = 0 exactly for every j".into(),
    });

    // projection of delta at the standard flag
    let proj = project_delta(&space);
    let proj_ok = proj.residual.is_zero() && proj.scale_matches_dimension_ratio();
    let s_string = rational_to_string(&proj.scale);
    checks.push(Check {
        name: "projection".into(),
        pass: proj_ok,
        detail: format!("P delta_E = s*eta with s = {} and residual 0", s_string),
    });

    // uniqueness of the B-invariant line
    let b_dim = b_invariant_dim_in_steinberg(&space);
    checks.push(Check {
        name: "b_invariant_unique".into(),
        pass: b_dim == 1,
        detail: format!("dimension {}", b_dim),
    });
    clocks.insert("eta_projection".into(), t.elapsed().as_millis());

    // randomized invariance suite
    let t = Instant::now();
    let inv = invariance_suite(&space, samples, seed);
    checks.push(Check {
        name: "gl_invariance".into(),
        pass: inv.all_pass(),
        detail: format!(
            "{} samples, {} kernel mismatches, {} eta mismatches",
            inv.samples, inv.kernel_mismatches, inv.eta_mismatches
        ),
    });
    clocks.insert("invariance".into(), t.elapsed().as_millis());

    // flag count against the Poincaré sum
    let poincare: u128 = enumerate_sn(n)?
        .iter()
        .map(|s| steinberg_core::perm::q_pow(q, s.inversions()))
        .sum();
    let count_ok = space.len() as u128 == poincare && space.len() as u128 == q_factorial(n, q);
    checks.push(Check {
        name: "flag_count".into(),
        pass: count_ok,
        detail: format!("{} flags = sum_sigma q^I(sigma)", space.len()),
    });

    let all_pass = checks.iter().all(|c| c.pass);
    let report = Report {
        n,
        q,
        flag_count: space.len(),
        cell_sizes,
        gram_rank: cert.rank,
        steinberg_dim,
        is_psd: cert.is_psd,
        s: s_string,
        b_invariant_dim: b_dim,
        checks,
        timings_ms: if timings { Some(clocks) } else { None },
    };
    emit(out, &format!("{}\n", serde_json::to_string_pretty(&report).unwrap()))?;
    Ok(if all_pass { 0 } else { 2 })
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Json(path.display().to_string(), e))
}

fn run_kernel(flag_a: PathBuf, flag_b: PathBuf) -> Result<u8, CliError> {
    let a: FlagJson = read_json(&flag_a)?;
    let b: FlagJson = read_json(&flag_b)?;
    let va = flag_from_json(&a)?;
    let vb = flag_from_json(&b)?;
    let k = k_pairs(&va, &vb)?;
    let value = kernel_value(&va, &vb)?;
    #[derive(Serialize)]
    struct KernelOut {
        q: u64,
        n: usize,
        k: usize,
        kernel: String,
    }
    let out = KernelOut {
        q: va.spec().q() as u64,
        n: va.n(),
        k,
        kernel: rational_to_string(&value.to_rational()),
    };
    println!("{}", serde_json::to_string_pretty(&out).unwrap());
    Ok(0)
}

fn run_biflag_kernel(a: PathBuf, b: PathBuf) -> Result<u8, CliError> {
    let ja: BiFlagJson = read_json(&a)?;
    let jb: BiFlagJson = read_json(&b)?;
    let va = biflag_from_json(&ja)?;
    let vb = biflag_from_json(&jb)?;
    let k = steinberg_core::biflag::k_infinite(&va, &vb)?;
    let value = steinberg_core::biflag::kernel_infinite(&va, &vb)?;
    #[derive(Serialize)]
    struct BiKernelOut {
        q: u64,
        window_a: (i64, i64),
        window_b: (i64, i64),
        k: usize,
        kernel: String,
    }
    let out = BiKernelOut {
        q: va.spec().q() as u64,
        window_a: va.window(),
        window_b: vb.window(),
        k,
        kernel: rational_to_string(&value.to_rational()),
    };
    println!("{}", serde_json::to_string_pretty(&out).unwrap());
    Ok(0)
}
