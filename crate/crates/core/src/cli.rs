//! The `starmul` command line. Every subcommand reads JSON files and writes one
//! pretty-printed JSON document to stdout.
//!
//! Exit codes: 0 for success (or a true check), 1 for a well-formed input whose
//! answer is negative, 2 for unreadable or invalid input. Errors are reported
//! on stderr as `{"error": <kind>, "message": <text>}`.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::complex::{
    build_matrices, decompose_by_eigenvalue, embed, embed_real, extend_nilpotent, general_solution,
    reconstruct_star_series, verify_gradient, GenFuncSet, JordanSpecC,
};
use crate::error::{Error, Result};
use crate::json::{
    check_to_json, matrix_from_json, matrix_to_json, mupoly_from_json, mupoly_to_json, pair_to_json, phis_from_json,
    poly_from_json, report_to_json, spec_from_json, system_from_json, table_from_json, JordanSpec,
};
use crate::poly::Poly;
use crate::real::{basis_matrix, extend_real, hypothesis_check, n_power_formula, normalize_real, reconstruct_real, CoeffTable};
use crate::star::{check_solution, star_power, star_product};
use crate::verify::{run_suite, Suite};

#[derive(Debug, Parser)]
#[command(name = "starmul", version, about = "Exact *-multiplication on solutions of ∇f = M∇g")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Star product of two μ-vectors under a system's modulus.
    StarMul {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// k-th star power of a μ-vector.
    StarPow {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        k: u32,
    },
    /// Whether a μ-vector solves the system, with quotient and remainder.
    Check {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        v: PathBuf,
    },
    /// Whether ∇f = M∇g.
    CheckGrad {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
    },
    /// Extends a solution pair to a full μ-vector.
    Extend {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
    },
    /// Embeds a subsystem solution into a larger system, by μ^shift or (1+μ²)^real.
    Embed {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        v: PathBuf,
        #[arg(long, conflicts_with = "real", required_unless_present = "real")]
        shift: Option<usize>,
        #[arg(long)]
        real: Option<usize>,
    },
    /// General solution (f, g, h) from arbitrary functions φ_k.
    Gensol {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        phis: PathBuf,
    },
    /// Star power series reconstruction from φ_k or a coefficient table.
    Reconstruct {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, conflicts_with = "table", required_unless_present = "table")]
        phis: Option<PathBuf>,
        #[arg(long)]
        table: Option<PathBuf>,
        /// Drop terms of total degree above this bound.
        #[arg(long)]
        truncation: Option<u32>,
    },
    /// Basis matrix B of one real block, N = −M^{−T}, and optionally N^a.
    RealBasis {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        a: Option<u32>,
    },
    /// Splits a solution into one component per eigenvalue.
    Decompose {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
    },
    /// Multi-block real reconstruction experiment.
    Hypothesis {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        table: PathBuf,
        #[arg(long, default_value_t = 3)]
        truncation: u32,
    },
    /// Randomized invariant suites.
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
}

/// Failures that are not library errors.
enum Failure {
    Lib(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// A command's JSON answer and whether it is affirmative.
struct Outcome {
    value: Value,
    ok: bool,
}

impl Outcome {
    fn yes(value: Value) -> Self {
        Outcome { value, ok: true }
    }
}

fn read_json(path: &Path) -> std::result::Result<Value, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Lib(Error::Parse(format!("{}: {e}", path.display()))))
}

fn read_with<T>(path: &Path, parse: impl Fn(&Value) -> Result<T>) -> std::result::Result<T, Failure> {
    Ok(parse(&read_json(path)?)?)
}

fn single_complex(spec: &JordanSpecC) -> Result<()> {
    if spec.eigenvalues().len() != 1 {
        return Err(Error::InvalidSpec("this operation needs a single eigenvalue".into()));
    }
    Ok(())
}

fn truncate(p: &Poly, bound: u32) -> Poly {
    let kept = p.terms().filter(|(e, _)| e.iter().sum::<u32>() <= bound).map(|(e, c)| (e.clone(), c.clone()));
    Poly::from_terms(p.ring(), kept).expect("terms come from a valid polynomial")
}

fn execute(cmd: Command) -> std::result::Result<Outcome, Failure> {
    Ok(match cmd {
        Command::StarMul { system, a, b } => {
            let sys = read_with(&system, system_from_json)?;
            let (a, b) = (read_with(&a, mupoly_from_json)?, read_with(&b, mupoly_from_json)?);
            Outcome::yes(mupoly_to_json(&star_product(&a, &b, sys.modulus())?))
        }
        Command::StarPow { system, a, k } => {
            let sys = read_with(&system, system_from_json)?;
            let a = read_with(&a, mupoly_from_json)?;
            Outcome::yes(mupoly_to_json(&star_power(&a, k, sys.modulus())?))
        }
        Command::Check { system, v } => {
            let sys = read_with(&system, system_from_json)?;
            let v = read_with(&v, mupoly_from_json)?;
            let c = check_solution(&sys, &v)?;
            Outcome { ok: c.is_solution, value: check_to_json(&c) }
        }
        Command::CheckGrad { matrix, f, g } => {
            let m = read_with(&matrix, matrix_from_json)?;
            let (f, g) = (read_with(&f, poly_from_json)?, read_with(&g, poly_from_json)?);
            let ok = verify_gradient(&m, &f, &g)?;
            Outcome { ok, value: json!({ "is_solution": ok }) }
        }
        Command::Extend { spec, f, g } => {
            let spec = read_with(&spec, spec_from_json)?;
            let (f, g) = (read_with(&f, poly_from_json)?, read_with(&g, poly_from_json)?);
            let v = match spec {
                JordanSpec::Complex(s) => {
                    single_complex(&s)?;
                    let h = &f - &g.scale(&s.eigenvalues()[0].lambda);
                    extend_nilpotent(&build_matrices(&s).u, &h, &g)?
                }
                JordanSpec::Real(s) => {
                    let (norm, f, g) = normalize_real(&s, &f, &g)?;
                    extend_real(&norm, &f, &g)?
                }
            };
            Outcome::yes(mupoly_to_json(&v))
        }
        Command::Embed { system, v, shift, real } => {
            let sys = read_with(&system, system_from_json)?;
            let v = read_with(&v, mupoly_from_json)?;
            let w = match (shift, real) {
                (Some(s), _) => embed(&v, s, &sys)?,
                (None, Some(k)) => embed_real(&v, k, &sys)?,
                (None, None) => unreachable!("clap requires one of --shift, --real"),
            };
            Outcome::yes(mupoly_to_json(&w))
        }
        Command::Gensol { spec, phis } => {
            let spec = complex_spec(&spec)?;
            let phis = read_with(&phis, phis_from_json)?;
            Outcome::yes(pair_to_json(&general_solution(&spec, &phis)?))
        }
        Command::Reconstruct { spec, phis, table, truncation } => {
            let spec = read_with(&spec, spec_from_json)?;
            let bound = truncation.unwrap_or(u32::MAX);
            let v = match spec {
                JordanSpec::Complex(s) => {
                    single_complex(&s)?;
                    let e = &s.eigenvalues()[0];
                    let phis = match (phis, table) {
                        (Some(p), _) => read_with(&p, phis_from_json)?,
                        (None, Some(t)) => read_with(&t, table_from_json)?.to_phis(e.n1() + 1, |k| e.nu(k))?,
                        (None, None) => unreachable!("clap requires one of --phis, --table"),
                    };
                    let phis = GenFuncSet::new(phis.phis.iter().map(|p| truncate(p, bound)).collect());
                    reconstruct_star_series(&s, &phis)?
                }
                JordanSpec::Real(s) => {
                    if s.sizes().len() != 1 {
                        return Err(Error::InvalidSpec(
                            "real reconstruction is proven for one block only; use `hypothesis` for several".into(),
                        )
                        .into());
                    }
                    let table: CoeffTable = match table {
                        Some(t) => read_with(&t, table_from_json)?,
                        None => return Err(Error::InvalidSpec("a real spec needs --table".into()).into()),
                    };
                    reconstruct_real(&table, s.n1(), bound)?
                }
            };
            Outcome::yes(mupoly_to_json(&v))
        }
        Command::RealBasis { n, a } => {
            let basis = basis_matrix(n)?;
            let mut value = json!({ "n": n, "B": matrix_to_json(&basis.b), "N": matrix_to_json(&basis.n_matrix()?) });
            if let Some(a) = a {
                value["a"] = json!(a);
                value["N_pow"] = matrix_to_json(&n_power_formula(n, a as usize));
            }
            Outcome::yes(value)
        }
        Command::Decompose { spec, f, g } => {
            let spec = complex_spec(&spec)?;
            let (f, g) = (read_with(&f, poly_from_json)?, read_with(&g, poly_from_json)?);
            let parts = decompose_by_eigenvalue(&spec, &f, &g)?;
            Outcome::yes(Value::Array(parts.iter().map(pair_to_json).collect()))
        }
        Command::Hypothesis { spec, table, truncation } => {
            let spec = match read_with(&spec, spec_from_json)? {
                JordanSpec::Real(s) => s,
                JordanSpec::Complex(_) => return Err(Error::InvalidSpec("hypothesis needs a real spec".into()).into()),
            };
            let table = read_with(&table, table_from_json)?;
            let report = hypothesis_check(&spec, &table, truncation)?;
            Outcome { ok: report.agree, value: report_to_json(&report) }
        }
        Command::Verify { suite, seed, trials } => {
            let suite = Suite::parse(&suite)?;
            let reports = run_suite(suite, seed, trials);
            let ok = reports.iter().all(|r| r.passed());
            let props: Vec<Value> = reports
                .iter()
                .map(|r| {
                    json!({
                        "name": r.name,
                        "passed": r.passed(),
                        "trials": r.trials,
                        "failures": r.failures,
                        "first_failure": r.first_failure,
                    })
                })
                .collect();
            Outcome { ok, value: json!({ "suite": suite.name(), "seed": seed, "trials": trials, "passed": ok, "properties": props }) }
        }
    })
}

fn complex_spec(path: &Path) -> std::result::Result<JordanSpecC, Failure> {
    match read_with(path, spec_from_json)? {
        JordanSpec::Complex(s) => Ok(s),
        JordanSpec::Real(_) => Err(Error::InvalidSpec("this operation needs a complex spec".into()).into()),
    }
}

/// Errors whose input was well formed but whose mathematical answer is "no".
fn is_semantic(e: &Error) -> bool {
    matches!(
        e,
        Error::NotASolution(_) | Error::NotClosed { .. } | Error::Verification(_) | Error::CrossEigenvalueMonomial(_)
    )
}

fn report_error(err: &mut dyn Write, kind: &str, message: &str) {
    let record = json!({ "error": kind, "message": message });
    let _ = writeln!(err, "{record}");
}

/// Parses `args` (including the program name) and runs the command, writing
/// to the given streams. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            report_error(err, "usage", e.to_string().trim());
            return 2;
        }
    };
    match execute(cli.command) {
        Ok(outcome) => {
            let text = serde_json::to_string_pretty(&outcome.value).expect("JSON values always serialize");
            let _ = writeln!(out, "{text}");
            if outcome.ok {
                0
            } else {
                1
            }
        }
        Err(Failure::Io(msg)) => {
            report_error(err, "io", &msg);
            2
        }
        Err(Failure::Lib(e)) => {
            report_error(err, e.kind(), &e.to_string());
            if is_semantic(&e) {
                1
            } else {
                2
            }
        }
    }
}
