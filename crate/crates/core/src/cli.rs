//! Command dispatch for the `forestkit` binary.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical or
//! convergence failure.

use std::ffi::OsString;
use std::io::Read;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::accessibility::{audit, default_plan, AuditEntry, Measure};
use crate::digraph::WeightedDigraph;
use crate::edgelist::parse_digraph;
use crate::error::Error;
use crate::forest::{dense_alpha_bound, ForestExpansion};
use crate::markov::{cesaro_limit, inverse_chain, simulate_dissemination};
use crate::oracle::oracle_expansion;
use crate::output::{OutputDocument, Value};
use crate::ranking::{self, ScoreMethod, ScoreVector};
use crate::Matrix;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Largest accepted engine/oracle deviation for `oracle-check`.
pub const ORACLE_TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "forestkit", version, about = "Spanning-forest matrices of weighted digraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Edge-list file; standard input when omitted.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1.0)]
    tau: f64,
    /// Chain parameter for `markov`, dense-measure parameter for `access`/`audit`.
    #[arg(long, global = true)]
    alpha: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Tsv)]
    format: Format,
    /// Significant digits of printed numbers.
    #[arg(long, global = true, default_value_t = 12, value_parser = clap::value_parser!(u32).range(1..=17))]
    precision: u32,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Cap on the number of candidate forests the oracle may enumerate.
    #[arg(long, global = true, default_value_t = 10_000_000)]
    cap: u128,
    #[arg(long, global = true, default_value_t = 100_000)]
    trials: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Strong components, source knots, d' and exclusive reach sets.
    Info,
    /// Forest coefficients, J(tau) and the limiting matrix.
    Forests {
        /// Also print Q_k and J_k.
        #[arg(long)]
        k: Option<usize>,
    },
    /// An accessibility matrix.
    Access {
        #[arg(long, value_enum, default_value_t = DirectionArg::Out)]
        direction: DirectionArg,
        #[arg(long, value_enum, default_value_t = MeasureArg::Parametric)]
        measure: MeasureArg,
    },
    /// Scores and the induced ranking.
    Rank {
        #[arg(long, value_enum, default_value_t = MethodArg::Mean)]
        method: MethodArg,
    },
    /// The inversely corresponding Markov chain and its Cesaro limit.
    Markov {
        /// Run the dissemination simulation instead.
        #[arg(long)]
        simulate: bool,
        #[arg(long, default_value_t = crate::markov::DEFAULT_MAX_ITERS)]
        max_iters: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Checks every accessibility condition on a measure.
    Audit {
        #[arg(long, value_enum, default_value_t = DirectionArg::Out)]
        direction: DirectionArg,
        #[arg(long, value_enum, default_value_t = MeasureArg::Parametric)]
        measure: MeasureArg,
    },
    /// Compares the engine against brute-force forest enumeration.
    OracleCheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Tsv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DirectionArg {
    Out,
    In,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MeasureArg {
    Parametric,
    Limiting,
    Dense,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Kernel,
    Mean,
    Daniels,
    Borda,
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_DATA
    }
}

/// Runs the CLI with `args` (including the program name), reading the
/// digraph from `stdin` when `--input` is absent.
pub fn run<I, T>(args: I, stdin: &mut dyn Read) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    match execute(&cli, stdin) {
        Ok((doc, code)) => {
            let precision = cli.precision as usize;
            let stdout = match cli.format {
                Format::Tsv => doc.render_tsv(precision),
                Format::Json => doc.render_json(precision),
            };
            Outcome {
                code,
                stdout,
                stderr: String::new(),
            }
        }
        Err(Failure::Usage(msg)) => Outcome {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!("forestkit: usage error: {msg}\n"),
        },
        Err(Failure::Lib(e)) => Outcome {
            code: exit_code(&e),
            stdout: String::new(),
            stderr: format!("forestkit: error: {e}\n"),
        },
        Err(Failure::Io(msg)) => Outcome {
            code: EXIT_DATA,
            stdout: String::new(),
            stderr: format!("forestkit: error: {msg}\n"),
        },
    }
}

enum Failure {
    Usage(String),
    Lib(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn read_graph(cli: &Cli, stdin: &mut dyn Read) -> std::result::Result<WeightedDigraph, Failure> {
    let text = match &cli.input {
        Some(path) => {
            std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?
        }
        None => {
            let mut s = String::new();
            stdin
                .read_to_string(&mut s)
                .map_err(|e| Failure::Io(format!("cannot read standard input: {e}")))?;
            s
        }
    };
    Ok(parse_digraph(&text)?)
}

fn one_based(set: &[usize]) -> Vec<usize> {
    set.iter().map(|v| v + 1).collect()
}

fn one_based_sets(sets: &[Vec<usize>]) -> Value {
    Value::VertexSets(sets.iter().map(|s| one_based(s)).collect())
}

fn measure_from(
    cli: &Cli,
    g: &WeightedDigraph,
    direction: DirectionArg,
    measure: MeasureArg,
) -> std::result::Result<Measure, Failure> {
    Ok(match (measure, direction) {
        (MeasureArg::Parametric, DirectionArg::Out) => Measure::Out { tau: cli.tau },
        (MeasureArg::Parametric, DirectionArg::In) => Measure::In { tau: cli.tau },
        (MeasureArg::Limiting, DirectionArg::Out) => Measure::LimitingOut,
        (MeasureArg::Limiting, DirectionArg::In) => Measure::LimitingIn,
        (MeasureArg::Dense, DirectionArg::Out) => {
            let alpha = match cli.alpha {
                Some(a) => a,
                None => dense_alpha_bound(&ForestExpansion::of_graph(g)?)? / 2.0,
            };
            Measure::DenseOut { alpha }
        }
        (MeasureArg::Dense, DirectionArg::In) => {
            return Err(Failure::Usage(
                "the dense measure is defined for --direction out only".into(),
            ))
        }
    })
}

fn measure_param(m: &Measure) -> Option<f64> {
    match *m {
        Measure::Out { tau } | Measure::In { tau } => Some(tau),
        Measure::DenseOut { alpha } => Some(alpha),
        Measure::LimitingOut | Measure::LimitingIn => None,
    }
}

fn push_scores(doc: &mut OutputDocument, scores: &ScoreVector) {
    let report = ranking::rank(scores);
    doc.push("method", Value::Text(scores.method.name().into()));
    if let Some(p) = scores.param {
        doc.push("param", Value::Real(p));
    }
    doc.push("scores", Value::Reals(scores.values.clone()))
        .push("ordering", Value::Vertices(one_based(&report.ordering)))
        .push("tie_groups", one_based_sets(&report.tie_groups));
}

fn audit_record(e: &AuditEntry) -> Vec<(String, Value)> {
    let (vertices, values) = match &e.witness {
        Some(w) => (one_based(&w.vertices), w.values.clone()),
        None => (Vec::new(), Vec::new()),
    };
    let perturbation = e
        .witness
        .as_ref()
        .and_then(|w| w.perturbation)
        .map_or(Vec::new(), |p| vec![(p.tail + 1) as f64, (p.head + 1) as f64, p.delta]);
    vec![
        ("condition".into(), Value::Text(e.condition.name().into())),
        ("verdict".into(), Value::Text(e.verdict.name().into())),
        ("cases".into(), Value::Int(e.cases as i64)),
        ("witness".into(), Value::Vertices(vertices)),
        ("values".into(), Value::Reals(values)),
        ("perturbation".into(), Value::Reals(perturbation)),
    ]
}

fn execute(cli: &Cli, stdin: &mut dyn Read) -> std::result::Result<(OutputDocument, i32), Failure> {
    let g = read_graph(cli, stdin)?;
    let mut doc = OutputDocument::new();
    let mut code = EXIT_OK;
    match &cli.command {
        Command::Info => {
            let info = g.strong_components();
            doc.push("n", Value::Int(g.n() as i64))
                .push("arcs", Value::Int(g.arc_count() as i64))
                .push("components", one_based_sets(&info.components))
                .push("source_knots", one_based_sets(&info.source_knots))
                .push("d_prime", Value::Int(info.d_prime as i64))
                .push("exclusive_reach", one_based_sets(&info.exclusive_reach));
        }
        Command::Forests { k } => {
            let exp = ForestExpansion::of_graph(&g)?;
            let j = exp.j_of_tau(cli.tau)?;
            doc.push("n", Value::Int(g.n() as i64))
                .push("d_prime", Value::Int(exp.d_prime() as i64))
                .push("max_forest_size", Value::Int(exp.max_forest_size() as i64))
                .push("sigma", Value::Reals(exp.sigma_nonzero().to_vec()))
                .push("tau", Value::Real(cli.tau))
                .push("sigma_tau", Value::Real(j.sigma_tau))
                .push("j_tau", Value::Matrix(j.j_matrix))
                .push("j_tilde", Value::Matrix(exp.j_tilde().j_tilde));
            if let Some(k) = *k {
                let q = exp.q(k).cloned().ok_or(Error::IndexBeyondMaxForest {
                    k,
                    max: exp.max_forest_size(),
                })?;
                doc.push("k", Value::Int(k as i64))
                    .push("q_k", Value::Matrix(q))
                    .push("j_k", Value::Matrix(exp.j_k(k)?));
            }
        }
        Command::Access { direction, measure } => {
            let m = measure_from(cli, &g, *direction, *measure)?;
            let p = m.evaluate(&g)?;
            doc.push("measure", Value::Text(p.kind.name().into()));
            if let Some(x) = measure_param(&m) {
                doc.push("param", Value::Real(x));
            }
            doc.push("p", Value::Matrix(p.p));
        }
        Command::Rank { method } => match method {
            MethodArg::Kernel => {
                let basis = ranking::kernel_basis(&g)?;
                let n = g.n();
                let mut values = vec![0.0; n];
                for v in &basis {
                    for (acc, x) in values.iter_mut().zip(v) {
                        *acc += x / basis.len() as f64;
                    }
                }
                let rows = Matrix::from_fn(basis.len(), n, |s, i| basis[s][i]);
                doc.push("basis", Value::Matrix(rows));
                push_scores(
                    &mut doc,
                    &ScoreVector {
                        values,
                        method: ScoreMethod::KernelBasis,
                        param: None,
                    },
                );
            }
            MethodArg::Mean => push_scores(&mut doc, &ranking::mean_limit_scores(&g)?),
            MethodArg::Daniels => push_scores(&mut doc, &ranking::daniels_tree_scores(&g)?),
            MethodArg::Borda => push_scores(&mut doc, &ranking::borda_scores(&g, cli.tau)?),
        },
        Command::Markov { simulate: true, .. } => {
            let est = simulate_dissemination(&g, cli.trials, cli.seed)?;
            doc.push("trials", Value::Int(est.trials as i64))
                .push("seed", Value::Text(est.seed.to_string()))
                .push("accepted", Value::Int(est.accepted as i64))
                .push("estimate", Value::Matrix(est.estimate))
                .push("std_error", Value::Matrix(est.std_error));
        }
        Command::Markov {
            simulate: false,
            max_iters,
            tol,
        } => {
            let chain = inverse_chain(&g, cli.alpha)?;
            let res = cesaro_limit(&chain, *max_iters, *tol);
            let jt = ForestExpansion::of_graph(&g)?.j_tilde();
            let deviation = crate::linalg::max_abs_diff(&res.pi, &jt.matrix().transpose());
            if !res.converged {
                code = EXIT_NUMERICAL;
            }
            doc.push("alpha", Value::Real(chain.alpha))
                .push("p", Value::Matrix(chain.p))
                .push("cesaro", Value::Matrix(res.pi))
                .push("iterations", Value::Int(res.iterations as i64))
                .push("residual", Value::Real(res.residual))
                .push("converged", Value::Bool(res.converged))
                .push("deviation", Value::Real(deviation));
        }
        Command::Audit { direction, measure } => {
            let m = measure_from(cli, &g, *direction, *measure)?;
            let plan = default_plan(&g);
            let report = audit(&m, &g, &plan)?;
            doc.push("measure", Value::Text(m.evaluate(&g)?.kind.name().into()));
            if let Some(x) = measure_param(&m) {
                doc.push("param", Value::Real(x));
            }
            doc.push("perturbations", Value::Int(plan.len() as i64)).push(
                "audit",
                Value::Records(report.entries.iter().map(audit_record).collect()),
            );
        }
        Command::OracleCheck => {
            let exp = ForestExpansion::of_graph(&g)?;
            let oracle = oracle_expansion(&g, cli.cap)?;
            let deviation = oracle.deviation_from(&exp);
            let ok = deviation <= ORACLE_TOL;
            if !ok {
                code = EXIT_NUMERICAL;
            }
            doc.push("n", Value::Int(g.n() as i64))
                .push(
                    "forests",
                    Value::Int(oracle.forests_by_size.iter().sum::<usize>() as i64),
                )
                .push("deviation", Value::Real(deviation))
                .push("tolerance", Value::Real(ORACLE_TOL))
                .push("ok", Value::Bool(ok));
        }
    }
    Ok((doc, code))
}
