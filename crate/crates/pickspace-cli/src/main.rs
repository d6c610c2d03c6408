//! Command-line front end: parses JSON problem/point files, dispatches to
//! the library, and emits deterministic machine-readable JSON reports.
//!
//! Exit codes: 0 success, 1 numerical/library failure, 2 usage error.
//! Error paths print a JSON object with an `"error"` key on standard
//! error. Reports are byte-identical across runs with identical inputs and
//! seed, except for the `wall_time_ms` field.

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use pickspace::grammian;
use pickspace::kernels::DEFAULT_WBE_TRUNC;
use pickspace::pick::{self, PickProblem};
use pickspace::realization;
use pickspace::sequences::{self, SeqKind, SeqSpec};
use pickspace::{KernelSpec, Point};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "pickspace", version, about = "Interpolating-sequence diagnostics for complete Pick spaces", disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Write the report to this path instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomized strategies (echoed in the report).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct KernelFlags {
    /// Kernel family: szego, power, dirichlet, drury_arveson, kaluza,
    /// bergman_power, weighted_bergman_exp.
    #[arg(long)]
    kernel: String,
    /// Exponent for power / bergman_power.
    #[arg(long)]
    t: Option<f64>,
    /// Ball dimension for drury_arveson.
    #[arg(long)]
    d: Option<usize>,
    /// Weight exponent for kaluza.
    #[arg(long)]
    alpha: Option<f64>,
    /// Series truncation for weighted_bergman_exp (or kaluza).
    #[arg(long)]
    trunc: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate the kernel matrix, squared norms, and pairwise d_H on a
    /// point file.
    KernelEval {
        #[command(flatten)]
        kernel: KernelFlags,
        /// JSON file with an array of points ([re, im] pairs).
        #[arg(long)]
        points: PathBuf,
    },
    /// Normalized Gram matrix with spectral/separation diagnostics and an
    /// optional certified partition.
    Gram {
        #[command(flatten)]
        kernel: KernelFlags,
        #[arg(long)]
        points: PathBuf,
        /// Partition the points into classes with ||G[C,C] - I|| <= bound.
        #[arg(long)]
        bound: Option<f64>,
    },
    /// Minimal multiplier norm of a single-kernel problem file, with
    /// bisection cross-check.
    PickMinnorm {
        #[arg(long)]
        problem: PathBuf,
        /// Cross-check tolerance (relative) between the closed form and the
        /// bisection oracle.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Minimal multiplier norm of a kernel-pair problem file.
    PairMinnorm {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Count positive squares of [1/k] on a point file (complete Pick test).
    CnpCheck {
        #[command(flatten)]
        kernel: KernelFlags,
        #[arg(long)]
        points: PathBuf,
    },
    /// Build a contractive interpolating multiplier and verify it.
    Realize {
        /// Problem file; must carry a norm budget unless --rho is given.
        #[arg(long)]
        problem: PathBuf,
        /// Norm budget override.
        #[arg(long)]
        rho: Option<f64>,
        /// Optional JSON point file with an extra verification grid.
        #[arg(long)]
        points: Option<PathBuf>,
    },
    /// Generate a bundled sequence.
    SeqGen {
        /// Sequence kind: example55_z, example55_w, example55_union, or
        /// geometric:RATIO (e.g. geometric:0.5).
        #[arg(long)]
        kind: String,
        #[arg(long)]
        n: usize,
    },
    /// Run a bundled experiment: ex55 or essnormal.
    Experiment {
        name: String,
        /// Sequence length for essnormal (default 10).
        #[arg(long)]
        n: Option<usize>,
        /// Weighted-Bergman truncation for ex55.
        #[arg(long)]
        trunc: Option<usize>,
    },
}

/// Usage errors exit 2; numerical/library errors exit 1.
enum CliError {
    Usage(String),
    Numerical(String),
}

impl From<pickspace::Error> for CliError {
    fn from(e: pickspace::Error) -> Self {
        CliError::Numerical(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

impl KernelFlags {
    fn spec(&self) -> CliResult<KernelSpec> {
        let need_t =
            || self.t.ok_or_else(|| CliError::Usage(format!("--kernel {} requires --t", self.kernel)));
        let lib = |r: pickspace::Result<KernelSpec>| r.map_err(CliError::from);
        match self.kernel.as_str() {
            "szego" => Ok(KernelSpec::szego()),
            "power" => lib(KernelSpec::power(need_t()?)),
            "dirichlet" => Ok(KernelSpec::dirichlet()),
            "drury_arveson" => {
                let d = self
                    .d
                    .ok_or_else(|| CliError::Usage("--kernel drury_arveson requires --d".into()))?;
                lib(KernelSpec::drury_arveson(d))
            }
            "kaluza" => {
                let alpha = self
                    .alpha
                    .ok_or_else(|| CliError::Usage("--kernel kaluza requires --alpha".into()))?;
                match self.trunc {
                    Some(t) => lib(KernelSpec::kaluza_trunc(alpha, t)),
                    None => lib(KernelSpec::kaluza(alpha)),
                }
            }
            "bergman_power" => lib(KernelSpec::bergman_power(need_t()?)),
            "weighted_bergman_exp" => {
                lib(KernelSpec::weighted_bergman_exp(self.trunc.unwrap_or(DEFAULT_WBE_TRUNC)))
            }
            other => Err(CliError::Usage(format!("unknown kernel family {other:?}"))),
        }
    }
}

fn read_file(path: &PathBuf, digest: &mut Sha256) -> CliResult<String> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    digest.update(&bytes);
    String::from_utf8(bytes)
        .map_err(|e| CliError::Usage(format!("{} is not UTF-8: {e}", path.display())))
}

fn read_points(path: &PathBuf, digest: &mut Sha256) -> CliResult<Vec<Point>> {
    let text = read_file(path, digest)?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("cannot parse points in {}: {e}", path.display())))
}

fn read_problem(path: &PathBuf, digest: &mut Sha256) -> CliResult<PickProblem> {
    let text = read_file(path, digest)?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("cannot parse problem in {}: {e}", path.display())))
}

fn complex_value(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn matrix_value<F: Fn(usize, usize) -> Complex64>(n: usize, m: usize, f: F) -> Value {
    let rows: Vec<Value> =
        (0..n).map(|i| Value::Array((0..m).map(|j| complex_value(f(i, j))).collect())).collect();
    Value::Array(rows)
}

fn seq_spec(kind: &str, n: usize) -> CliResult<SeqSpec> {
    if let Some(rest) = kind.strip_prefix("geometric:") {
        let ratio: f64 = rest
            .parse()
            .map_err(|_| CliError::Usage(format!("bad geometric ratio {rest:?}")))?;
        return Ok(SeqSpec { kind: SeqKind::Geometric { ratio }, n });
    }
    match kind {
        "example55_z" => Ok(SeqSpec::example55_z(n)),
        "example55_w" => Ok(SeqSpec::example55_w(n)),
        "example55_union" => Ok(SeqSpec::example55_union(n)),
        other => Err(CliError::Usage(format!("unknown sequence kind {other:?}"))),
    }
}

/// Runs the command, returning (tolerances, results).
fn run(cmd: &Cmd, digest: &mut Sha256) -> CliResult<(Value, Value)> {
    match cmd {
        Cmd::KernelEval { kernel, points } => {
            let spec = kernel.spec()?;
            let pts = read_points(points, digest)?;
            let n = pts.len();
            let mut k = vec![vec![Complex64::default(); n]; n];
            let mut dh = vec![vec![0.0f64; n]; n];
            for i in 0..n {
                for j in 0..n {
                    k[i][j] = spec.eval(&pts[i], &pts[j])?;
                    dh[i][j] = spec.dh(&pts[i], &pts[j])?;
                }
            }
            let norms: Vec<f64> =
                pts.iter().map(|p| spec.norm_sq(p)).collect::<pickspace::Result<_>>()?;
            Ok((
                json!({"tail_tol": spec.tail_tol}),
                json!({
                    "family": spec.family_name(),
                    "n": n,
                    "kernel_matrix": matrix_value(n, n, |i, j| k[i][j]),
                    "norm_sq": norms,
                    "dh": dh,
                }),
            ))
        }
        Cmd::Gram { kernel, points, bound } => {
            let spec = kernel.spec()?;
            let pts = read_points(points, digest)?;
            let report = grammian::report(&spec, &pts, *bound)?;
            let g = grammian::gram(&spec, &pts)?;
            let n = pts.len();
            Ok((
                json!({"partition_bound": bound, "tail_tol": spec.tail_tol}),
                json!({
                    "report": report,
                    "gram": matrix_value(n, n, |i, j| g.entry(i, j)),
                }),
            ))
        }
        Cmd::PickMinnorm { problem, tol } => {
            let p = read_problem(problem, digest)?;
            if p.lspec.is_some() {
                return Err(CliError::Usage(
                    "problem has a second kernel; use pair-minnorm".into(),
                ));
            }
            let closed = pick::min_norm(&p)?;
            let bisect = pick::min_norm_bisection(&p)?;
            let gap = (closed.rho_min - bisect.rho_min).abs();
            if gap > tol * (1.0 + closed.rho_min) {
                return Err(CliError::Numerical(format!(
                    "closed form {:.12e} and bisection {:.12e} disagree beyond tol {tol:.1e}",
                    closed.rho_min, bisect.rho_min
                )));
            }
            Ok((
                json!({"cross_check_tol": tol, "psd_tol": "1e-10*(1+lambda_max)"}),
                json!({"result": closed, "bisection_rho_min": bisect.rho_min}),
            ))
        }
        Cmd::PairMinnorm { problem, tol } => {
            let p = read_problem(problem, digest)?;
            if p.lspec.is_none() {
                return Err(CliError::Usage(
                    "problem lacks a second kernel; use pick-minnorm".into(),
                ));
            }
            let closed = pick::pair_min_norm(&p)?;
            Ok((
                json!({"cross_check_tol": tol, "psd_tol": "1e-10*(1+lambda_max)"}),
                json!({"result": closed}),
            ))
        }
        Cmd::CnpCheck { kernel, points } => {
            let spec = kernel.spec()?;
            let pts = read_points(points, digest)?;
            let count = pick::one_positive_square(&spec, &pts)?;
            Ok((
                json!({"sign_tol": "1e-10*(1+scale)", "zero_tol": "1e-12*(1+scale)"}),
                json!({
                    "family": spec.family_name(),
                    "positive_count": count,
                    "flagged_cnp": spec.is_cnp(),
                    "consistent": (count == 1) == spec.is_cnp(),
                }),
            ))
        }
        Cmd::Realize { problem, rho, points } => {
            let p = read_problem(problem, digest)?;
            let rho = rho.or(p.rho).ok_or_else(|| {
                CliError::Usage("no norm budget: give --rho or a \"rho\" field".into())
            })?;
            let r = match &p.lspec {
                None => realization::build_realization(&p.kspec, &p.nodes, &p.targets, rho)?,
                Some(l) => {
                    realization::build_pair_realization(&p.kspec, l, &p.nodes, &p.targets, rho)?
                }
            };
            let mut node_err = 0.0f64;
            let mut values = Vec::new();
            for (node, t) in p.nodes.iter().zip(&p.targets) {
                let v = r.eval_transfer(node)?;
                node_err = node_err.max((v - t).norm());
                values.push(complex_value(v));
            }
            let (cert_min, cert_max) = r.verify_contractive(&p.nodes)?;
            let grid_cert = match points {
                None => Value::Null,
                Some(path) => {
                    let grid = read_points(path, digest)?;
                    let (lmin, lmax) = r.verify_contractive(&grid)?;
                    json!({"lambda_min": lmin, "lambda_max": lmax})
                }
            };
            Ok((
                json!({"unitary_defect_tol": 1e-9, "node_reproduction_tol": 1e-8}),
                json!({
                    "realization": r.export(),
                    "node_values": values,
                    "node_reproduction_error": node_err,
                    "certificate_nodes": {"lambda_min": cert_min, "lambda_max": cert_max},
                    "certificate_grid": grid_cert,
                }),
            ))
        }
        Cmd::SeqGen { kind, n } => {
            let s = seq_spec(kind, *n)?;
            let pts = sequences::gen(&s)?;
            Ok((json!({}), json!({"spec": s, "points": pts})))
        }
        Cmd::Experiment { name, n, trunc } => match name.as_str() {
            "ex55" => experiment_ex55(trunc.unwrap_or(DEFAULT_WBE_TRUNC)),
            "essnormal" => experiment_essnormal(n.unwrap_or(10)),
            other => Err(CliError::Usage(format!("unknown experiment {other:?}"))),
        },
    }
}

/// Finite sections of the union sequence: spectral bounds of the Szego and
/// weighted-Bergman Grams on the first 2m points, plus separation decay.
fn experiment_ex55(trunc: usize) -> CliResult<(Value, Value)> {
    let szego = KernelSpec::szego();
    let wbe = KernelSpec::weighted_bergman_exp(trunc)?;
    let mut rows = Vec::new();
    for m in 4..=10usize {
        let pts = sequences::gen(&SeqSpec::example55_union(2 * m))?;
        let gs = grammian::gram(&szego, &pts)?.spectral_bounds();
        let gw = grammian::gram(&wbe, &pts)?.spectral_bounds();
        let sep = grammian::separation(&szego, &pts)?;
        rows.push(json!({
            "m": m,
            "szego_lambda_min": gs.0,
            "szego_lambda_max": gs.1,
            "wbe_lambda_min": gw.0,
            "wbe_lambda_max": gw.1,
            "separation": sep,
        }));
    }
    let zs = sequences::gen(&SeqSpec::example55_z(11))?;
    let ws = sequences::gen(&SeqSpec::example55_w(10))?;
    let mut decay = Vec::new();
    for j in 1..=10usize {
        decay.push(json!({"j": j, "dh": szego.dh(&zs[j], &ws[j - 1]).map_err(CliError::from)?}));
    }
    Ok((
        json!({"wbe_trunc": trunc, "tail_tol": wbe.tail_tol}),
        json!({"sections": rows, "pair_separation": decay}),
    ))
}

/// The essential-normality lower bound `1 - d_H^2` along the Example 5.5
/// pairs under the Szego kernel.
fn experiment_essnormal(n: usize) -> CliResult<(Value, Value)> {
    let szego = KernelSpec::szego();
    let zs = sequences::gen(&SeqSpec::example55_z(n + 1))?;
    let ws = sequences::gen(&SeqSpec::example55_w(n))?;
    let zs_tail: Vec<Point> = zs[1..].to_vec();
    let vals = sequences::essnormal_bound(&szego, &zs_tail, &ws)?;
    Ok((
        json!({}),
        json!({
            "n": n,
            "values": vals,
            "all_above_three_quarters": vals.iter().skip(3).all(|&v| v >= 0.75),
        }),
    ))
}

/// Renders a JSON value with every non-integer number in `{:.16e}` form
/// (17 significant digits); object keys are already in sorted order, so
/// the output is canonical.
fn render(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_i64() || n.is_u64() {
                out.push_str(&n.to_string());
            } else {
                out.push_str(&format!("{:.16e}", n.as_f64().expect("finite float")));
            }
        }
        Value::String(_) => out.push_str(&v.to_string()),
        Value::Array(a) => {
            out.push('[');
            for (i, x) in a.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                render(x, out);
            }
            out.push(']');
        }
        Value::Object(o) => {
            out.push('{');
            for (i, (k, x)) in o.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(k.clone()).to_string());
                out.push(':');
                render(x, out);
            }
            out.push('}');
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let argv: Vec<String> = std::env::args().skip(1).collect();

    let mut digest = Sha256::new();
    for a in &argv {
        digest.update(a.as_bytes());
        digest.update([0u8]);
    }
    digest.update(cli.seed.to_le_bytes());

    match run(&cli.cmd, &mut digest) {
        Ok((tolerances, results)) => {
            let mut report = Map::new();
            report.insert("schema_version".into(), json!(SCHEMA_VERSION));
            report.insert("command".into(), json!({"argv": argv, "seed": cli.seed}));
            report.insert("inputs_digest".into(), json!(hex_digest(digest.finalize().as_slice())));
            report.insert("tolerances".into(), tolerances);
            report.insert("results".into(), results);
            // wall_time_ms is the only nondeterministic field.
            report.insert("wall_time_ms".into(), json!(start.elapsed().as_millis() as u64));
            let value = Value::Object(report);
            let mut text = String::new();
            render(&value, &mut text);
            text.push('\n');
            match &cli.out {
                None => print!("{text}"),
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &text) {
                        eprintln!("{}", json!({"error": format!("cannot write {}: {e}", path.display())}));
                        return ExitCode::from(1);
                    }
                }
            }
            ExitCode::SUCCESS
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("{}", json!({"error": msg, "kind": "usage"}));
            ExitCode::from(2)
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("{}", json!({"error": msg, "kind": "numerical"}));
            ExitCode::from(1)
        }
    }
}

fn hex_digest(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
