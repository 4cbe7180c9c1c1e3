//! Batch front end: `build`, `verify`, `report` and `export-dot`.
//!
//! [`run`] takes the argument list and output streams and returns the process
//! exit code, so the binary is a one-line wrapper and tests drive it directly.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::artifact::{export_dot, CircuitFile, CoverFile, LoadedCover};
use crate::astrong::{check_astrong, target_coefficients};
use crate::circuit::{expand_coefficients, from_cover2d, from_coverkd, SigmaPiSigmaCircuit, DEFAULT_EXPANSION_BUDGET};
use crate::cover2d::{verify_s2_properties, S2Construction};
use crate::coverkd::{
    verify_sk_properties, HashStrategy, SkConstruction, VerifyMode, VerifyOptions, DEFAULT_VERIFY_CAP,
};
use crate::error::Error;
use crate::zmod::{factorize, Modulus};

pub mod exit {
    pub const PASS: i32 = 0;
    pub const FAIL: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const CONSTRUCTION: i32 = 3;
    pub const UNSUPPORTED_MODULUS: i32 = 4;
}

const MAX_LISTED: usize = 100;

pub const ASYMPTOTIC_NOTE: &str = "note: the circuit-size advantage over the n-1 and C(n,k) baselines is asymptotic; \
no inequality is claimed at these sizes";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Poly {
    /// S_n^2(x, y) via rectangle covers.
    S2,
    /// S_n^k(x^1, ..., x^k) via box covers.
    Sk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Strategy {
    Greedy,
    Randomized,
}

impl From<Strategy> for HashStrategy {
    fn from(s: Strategy) -> Self {
        match s {
            Strategy::Greedy => HashStrategy::Greedy,
            Strategy::Randomized => HashStrategy::Randomized,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "symcirc",
    version,
    about = "Depth-3 circuits for elementary symmetric polynomials mod composite m"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a cover and its circuit and write both as JSON.
    Build(BuildArgs),
    /// Check a cover (or circuit) file.
    Verify(VerifyArgs),
    /// Tabulate construction sizes against the naive baselines.
    Report(ReportArgs),
    /// Export an S_n^2 cover as bipartite graphs in DOT format.
    ExportDot(ExportDotArgs),
}

#[derive(Debug, clap::Args)]
pub struct ConstructionArgs {
    #[arg(long, value_enum)]
    pub poly: Poly,
    /// Degree for `--poly sk`.
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long)]
    pub m: u64,
    /// Hash alphabet size for `--poly sk`; defaults to 2k.
    #[arg(long)]
    pub b: Option<usize>,
    #[arg(long, value_enum, default_value_t = Strategy::Greedy)]
    pub strategy: Strategy,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, clap::Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub construction: ConstructionArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub out: PathBuf,
    /// Defaults to `<out stem>.circuit.json` next to the cover file.
    #[arg(long)]
    pub circuit_out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Monomial-term limit for the coefficient-level check.
    #[arg(long, default_value_t = DEFAULT_EXPANSION_BUDGET)]
    pub expansion_budget: u64,
    /// Box covers are checked exhaustively when n^k is at most this.
    #[arg(long, default_value_t = DEFAULT_VERIFY_CAP)]
    pub verify_cap: u64,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, clap::Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub construction: ConstructionArgs,
    /// Comma-separated list of n.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    /// Write the table here instead of stdout.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct ExportDotArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::PASS };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{rendered}")
            } else {
                write!(out, "{rendered}")
            };
            return code;
        }
    };
    let result = match &cfg.command {
        Command::Build(a) => cmd_build(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Report(a) => cmd_report(a, out),
        Command::ExportDot(a) => cmd_export_dot(a, out),
    };
    match result {
        Ok(code) => code,
        Err(failure) => {
            let _ = writeln!(err, "error: {}", failure.message);
            failure.code
        }
    }
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

type CmdResult = Result<i32, Failure>;

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: exit::USAGE,
        message: message.into(),
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    usage(format!("{}: {e}", path.display()))
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidArgument(_) | Error::Artifact(_) | Error::VariableSpaceMismatch(_) => exit::USAGE,
            Error::UnsupportedModulus { .. } | Error::NotInvertible { .. } => exit::UNSUPPORTED_MODULUS,
            Error::Infeasible(_) | Error::ConstructionFailed { .. } | Error::ExpansionBudget { .. } => {
                exit::CONSTRUCTION
            }
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn modulus_arg(m: u64) -> Result<Modulus, Failure> {
    factorize(m).map_err(|e| usage(e.to_string()))
}

/// A finished construction, either kind.
enum Built {
    S2(S2Construction),
    Sk(SkConstruction),
}

impl Built {
    fn new(c: &ConstructionArgs, n: usize) -> Result<Self, Failure> {
        let modulus = modulus_arg(c.m)?;
        if n < 2 {
            return Err(usage(format!("n must be at least 2, got {n}")));
        }
        match c.poly {
            Poly::S2 => Ok(Built::S2(S2Construction::build(n, &modulus)?)),
            Poly::Sk => {
                if c.k < 2 || c.k > n {
                    return Err(usage(format!("need 2 <= k <= n, got k = {} and n = {n}", c.k)));
                }
                let b = c.b.unwrap_or(2 * c.k);
                Ok(Built::Sk(SkConstruction::build(
                    n,
                    c.k,
                    &modulus,
                    b,
                    c.strategy.into(),
                    c.seed,
                )?))
            }
        }
    }

    fn cover_file(&self, c: &ConstructionArgs) -> CoverFile {
        match self {
            Built::S2(b) => CoverFile::from_s2(b, c.seed),
            Built::Sk(b) => CoverFile::from_sk(b, c.strategy.into(), c.seed),
        }
    }

    fn circuit(&self) -> SigmaPiSigmaCircuit {
        match self {
            Built::S2(b) => from_cover2d(&b.cover),
            Built::Sk(b) => from_coverkd(&b.cover),
        }
    }

    fn initial_items(&self) -> usize {
        match self {
            Built::S2(b) => b.initial.len(),
            Built::Sk(b) => b.initial.len(),
        }
    }

    fn cover_items(&self) -> usize {
        match self {
            Built::S2(b) => b.cover.len(),
            Built::Sk(b) => b.cover.len(),
        }
    }

    fn poly(&self) -> &crate::sympoly::SymmetricPolynomial {
        match self {
            Built::S2(b) => &b.poly,
            Built::Sk(b) => &b.poly,
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| io_failure(path, e))
}

fn default_circuit_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "cover".into());
    out.with_file_name(format!("{stem}.circuit.json"))
}

fn cmd_build(a: &BuildArgs, out: &mut dyn Write) -> CmdResult {
    let c = &a.construction;
    let built = Built::new(c, a.n)?;
    let cover_file = built.cover_file(c);
    let circuit = built.circuit();
    let circuit_path = a.circuit_out.clone().unwrap_or_else(|| default_circuit_path(&a.out));
    write_file(&a.out, &cover_file.to_json())?;
    write_file(&circuit_path, &CircuitFile::from_circuit(&circuit).to_json())?;

    let size = circuit.size();
    let kind = match c.poly {
        Poly::S2 => "s2".to_string(),
        Poly::Sk => format!("sk (k = {})", c.k),
    };
    let _ = writeln!(out, "built {kind} cover: n = {}, m = {}", a.n, circuit.modulus);
    match &built {
        Built::S2(b) => {
            let _ = writeln!(out, "  digits: N = {}, g = {}", b.scheme.base, b.scheme.digits);
        }
        Built::Sk(b) => {
            let _ = writeln!(out, "  hash family: u = {}, b = {}", b.hash.u(), b.hash.b);
        }
    }
    let _ = writeln!(
        out,
        "  initial items: {}, BBR degree: {}, coefficients: {:?}",
        built.initial_items(),
        built.poly().degree(),
        built.poly().coeffs()
    );
    let _ = writeln!(
        out,
        "  gate_total: {}, products r: {}, graph_model_count: {}",
        size.gate_total, size.products, size.graph_model_count
    );
    let _ = writeln!(out, "  seed: {}", c.seed);
    let _ = writeln!(out, "  wrote {} and {}", a.out.display(), circuit_path.display());
    Ok(exit::PASS)
}

fn list_limited<T>(out: &mut dyn Write, items: &[T], mut line: impl FnMut(&T) -> String) {
    for it in items.iter().take(MAX_LISTED) {
        let _ = writeln!(out, "{}", line(it));
    }
    if items.len() > MAX_LISTED {
        let _ = writeln!(out, "... and {} more", items.len() - MAX_LISTED);
    }
}

/// Coefficient-level check of `circuit` against the ordered/unordered target.
fn astrong_stage(
    circuit: &SigmaPiSigmaCircuit,
    k: usize,
    ordered: bool,
    budget: u64,
    out: &mut dyn Write,
) -> Result<bool, Failure> {
    match expand_coefficients(circuit, budget) {
        Ok(expanded) => {
            let target = target_coefficients(circuit.vars.n, k, ordered, &circuit.modulus)?;
            let report = check_astrong(&expanded, &target, &circuit.modulus)?;
            let text = report.to_lines();
            let mut lines = text.lines();
            if let Some(head) = lines.next() {
                let _ = writeln!(out, "{head}");
            }
            let rest: Vec<&str> = lines.collect();
            list_limited(out, &rest, |l| l.to_string());
            Ok(report.passed())
        }
        Err(e @ Error::ExpansionBudget { .. }) => {
            let _ = writeln!(out, "a-strong check skipped: {e}");
            Ok(true)
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> CmdResult {
    let text = fs::read_to_string(&a.input).map_err(|e| io_failure(&a.input, e))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", a.input.display())))?;
    if value.get("gates").is_some() {
        return verify_circuit_file(&text, a, out);
    }
    let file = CoverFile::from_json(&text)?;
    let mut passed;
    let circuit = match file.to_cover()? {
        LoadedCover::Rect(cover) => {
            let report = verify_s2_properties(&cover);
            passed = report.passed();
            let _ = writeln!(
                out,
                "properties: {} ({} cells, {} violations)",
                if passed { "PASS" } else { "FAIL" },
                report.cells_checked,
                report.violations.len()
            );
            list_limited(out, &report.violations, |v| {
                format!(
                    "violation cell ({}, {}) multiplicity={} {:?}",
                    v.i, v.j, v.multiplicity, v.fault
                )
            });
            from_cover2d(&cover)
        }
        LoadedCover::Box(cover) => {
            let opts = VerifyOptions {
                cap: a.verify_cap,
                samples: a.samples,
                seed: a.seed,
            };
            let report = verify_sk_properties(&cover, &opts);
            passed = report.passed();
            let mode = match report.mode {
                VerifyMode::Exhaustive => "exhaustive".to_string(),
                VerifyMode::Sampled { samples, seed } => format!("sampled, {samples} tuples, seed {seed}"),
            };
            let _ = writeln!(
                out,
                "properties: {} ({} tuples, {mode}, {} violations)",
                if passed { "PASS" } else { "FAIL" },
                report.tuples_checked,
                report.violations.len()
            );
            list_limited(out, &report.violations, |v| {
                format!("violation tuple {:?} multiplicity={}", v.tuple, v.multiplicity)
            });
            from_coverkd(&cover)
        }
    };
    passed &= astrong_stage(&circuit, file.k, true, a.expansion_budget, out)?;
    Ok(if passed { exit::PASS } else { exit::FAIL })
}

fn verify_circuit_file(text: &str, a: &VerifyArgs, out: &mut dyn Write) -> CmdResult {
    let circuit = CircuitFile::from_json(text)?.to_circuit()?;
    let groups = circuit.vars.num_groups();
    let (k, ordered) = if groups > 1 {
        (groups, true)
    } else {
        let k = circuit
            .gates
            .first()
            .map(|g| g.forms.len())
            .ok_or_else(|| usage("cannot infer the degree of an empty single-group circuit"))?;
        (k, false)
    };
    let passed = astrong_stage(&circuit, k, ordered, a.expansion_budget, out)?;
    Ok(if passed { exit::PASS } else { exit::FAIL })
}

/// One line of the size table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportRow {
    pub n: usize,
    pub m: u64,
    pub h: usize,
    pub bbr_degree: usize,
    pub distinct_items: usize,
    pub graph_model_count: u128,
    pub gate_total: u64,
    pub graham_pollack_baseline: usize,
    pub naive_baseline: u128,
}

pub const REPORT_HEADER: &str =
    "n,m,h,bbr_degree,distinct_rectangles,graph_model_count,gate_total,graham_pollack_baseline,naive_baseline";

impl ReportRow {
    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.n,
            self.m,
            self.h,
            self.bbr_degree,
            self.distinct_items,
            self.graph_model_count,
            self.gate_total,
            self.graham_pollack_baseline,
            self.naive_baseline
        )
    }
}

fn binomial_u128(n: usize, k: usize) -> u128 {
    (0..k.min(n + 1)).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn cmd_report(a: &ReportArgs, out: &mut dyn Write) -> CmdResult {
    let c = &a.construction;
    if a.n.is_empty() || a.n.iter().any(|&n| n < 2) {
        return Err(usage("every n in the range must be at least 2"));
    }
    let k = match c.poly {
        Poly::S2 => 2,
        Poly::Sk => c.k,
    };
    let mut table = String::from(REPORT_HEADER);
    table.push('\n');
    for &n in &a.n {
        let built = Built::new(c, n)?;
        let size = built.circuit().size();
        let row = ReportRow {
            n,
            m: c.m,
            h: built.initial_items(),
            bbr_degree: built.poly().degree(),
            distinct_items: built.cover_items(),
            graph_model_count: size.graph_model_count,
            gate_total: size.gate_total,
            graham_pollack_baseline: n - 1,
            naive_baseline: binomial_u128(n, k),
        };
        table.push_str(&row.csv());
        table.push('\n');
    }
    match &a.csv {
        Some(path) => {
            write_file(path, &table)?;
            let _ = writeln!(out, "wrote {} rows to {}", a.n.len(), path.display());
        }
        None => {
            let _ = write!(out, "{table}");
        }
    }
    let _ = writeln!(out, "{ASYMPTOTIC_NOTE}");
    Ok(exit::PASS)
}

fn cmd_export_dot(a: &ExportDotArgs, out: &mut dyn Write) -> CmdResult {
    let text = fs::read_to_string(&a.input).map_err(|e| io_failure(&a.input, e))?;
    let cover = match CoverFile::from_json(&text)?.to_cover()? {
        LoadedCover::Rect(c) => c,
        LoadedCover::Box(_) => return Err(usage("export-dot needs an s2 (rect) cover")),
    };
    let export = export_dot(&cover)?;
    fs::create_dir_all(&a.out_dir).map_err(|e| io_failure(&a.out_dir, e))?;
    for (name, dot) in &export.graphs {
        write_file(&a.out_dir.join(name), dot)?;
    }
    write_file(&a.out_dir.join("manifest.csv"), &export.manifest)?;
    let _ = writeln!(
        out,
        "wrote {} graphs and manifest.csv to {}",
        export.graphs.len(),
        a.out_dir.display()
    );
    if export.bad_edges.is_empty() {
        Ok(exit::PASS)
    } else {
        let _ = writeln!(out, "{} edges are not 1 modulo any prime power", export.bad_edges.len());
        list_limited(out, &export.bad_edges, |(i, j)| format!("edge ({i}, {j})"));
        Ok(exit::FAIL)
    }
}
