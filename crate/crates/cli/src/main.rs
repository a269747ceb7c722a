//! `mzv`: JSON reports and DOT graphs over the moduli boundary
//! combinatorics and multiple-ζ period library.
//!
//! Every subcommand writes a single JSON document to standard output (DOT
//! text with `--dot`), diagnostics to standard error. Exit codes: 0 on
//! success, 1 on certification failure or a divergent integral, 2 on usage
//! errors. Output bytes are deterministic for fixed inputs; floats carry 17
//! significant digits.

use std::io::Write as _;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use mzv_moduli::divisors::{
    check_disjoint, check_vertex_avoidance, divisor_a, divisor_b, DisjointnessReport, Divisor,
};
use mzv_moduli::labels::{
    canonicalize_cycle, encode_epsilon, CompositionIndex, CyclicOrder, EpsilonWord, Label,
    MarkedSet,
};
use mzv_moduli::partitions::{enumerate_stable_partitions, StablePartition};
use mzv_moduli::periods::{
    default_quadrature_order, framed_report, iterated_integral, mzv_integral, mzv_series,
    AnchorSequence, PeriodError, PeriodValue, DEFAULT_SERIES_TRUNCATION,
};
use mzv_moduli::stasheff::{f_vector, faces, Face};
use mzv_moduli::trees::{stratum_signature, tree_from_partitions, StratumSignature};

/// Default cap on the total label count for enumeration subcommands;
/// override with the MZV_MAX_N environment variable.
const DEFAULT_MAX_LABELS: usize = 12;

#[derive(Parser)]
#[command(
    name = "mzv",
    version,
    about = "Boundary combinatorics of genus-0 moduli spaces and multiple zeta period certification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List all stable 2-partitions of the label set with n movable labels
    Divisors {
        /// Number of movable labels
        #[arg(long)]
        n: usize,
    },
    /// Print the singularity divisor A(eps)
    DivisorA {
        /// Composition n1,...,nm (most-natural-first, last part >= 2)
        #[arg(long, conflicts_with = "eps")]
        zeta: Option<String>,
        /// Raw epsilon word such as 110 (need not be convergent)
        #[arg(long)]
        eps: Option<String>,
    },
    /// Print the cell-boundary divisor B(rho)
    DivisorB {
        /// Number of movable labels
        #[arg(long)]
        n: usize,
        /// Comma list of labels giving the cyclic order; canonicalized
        /// before use; defaults to 0,s1,...,sn,1,inf
        #[arg(long)]
        order: Option<String>,
    },
    /// Run the disjointness and vertex-avoidance certificates; exit 0 iff
    /// certified
    Check {
        /// Composition n1,...,nm
        #[arg(long)]
        zeta: String,
    },
    /// Faces or f-vector of the Stasheff polytope of the standard order
    Stasheff {
        /// Number of movable labels
        #[arg(long)]
        n: usize,
        /// List the faces of this codimension
        #[arg(long, conflicts_with = "f_vector")]
        codim: Option<usize>,
        /// Print the face counts by codimension (default)
        #[arg(long = "f-vector")]
        f_vector: bool,
    },
    /// Build the dual tree of a semicolon-separated partition list
    Tree {
        /// Partitions like '{0,s2}|{1,inf,s1};{0,1,s2}|{inf,s1}'
        #[arg(long)]
        partitions: String,
        /// Emit DOT text instead of JSON
        #[arg(long)]
        dot: bool,
    },
    /// Evaluate a multiple zeta value by series and/or iterated integral
    Mzv {
        /// Composition n1,...,nm
        #[arg(long)]
        zeta: String,
        #[arg(long, value_enum, default_value_t = MethodArg::Both)]
        method: MethodArg,
        /// Series truncation bound
        #[arg(short = 'K', long = "truncation")]
        truncation: Option<u64>,
        /// Quadrature order
        #[arg(short = 'Q', long = "quadrature")]
        quadrature: Option<usize>,
    },
    /// Evaluate a generalized iterated integral over the ordered simplex
    Iterint {
        /// Anchors a1,...,an; real like 2 or -0.5, complex like 1+2i
        #[arg(long)]
        a: String,
        /// Quadrature order
        #[arg(short = 'Q', long = "quadrature")]
        quadrature: Option<usize>,
    },
    /// Emit a full framed-motive report for a composition
    Report {
        /// Composition n1,...,nm
        #[arg(long)]
        zeta: String,
        /// Series truncation bound
        #[arg(short = 'K', long = "truncation")]
        truncation: Option<u64>,
        /// Quadrature order
        #[arg(short = 'Q', long = "quadrature")]
        quadrature: Option<usize>,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Series,
    Integral,
    Both,
}

struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn failure(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

/// JSON with floats at 17 significant digits, compact, one trailing newline.
struct SigFig17;

impl serde_json::ser::Formatter for SigFig17 {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigFig17);
    value
        .serialize(&mut ser)
        .expect("report types serialize infallibly");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serializer emits UTF-8")
}

fn max_labels() -> usize {
    std::env::var("MZV_MAX_N")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .unwrap_or(DEFAULT_MAX_LABELS)
}

/// Enumeration guard: |S| = n + 3 must stay under the configured cap.
fn guard_enumeration(n: usize) -> Result<MarkedSet, Failure> {
    let cap = max_labels();
    if n + 3 > cap {
        return Err(usage(format!(
            "|S| = {} exceeds the enumeration cap {cap}; raise MZV_MAX_N to override",
            n + 3
        )));
    }
    MarkedSet::new(n).map_err(|e| usage(e.to_string()))
}

fn parse_composition(text: &str) -> Result<CompositionIndex, Failure> {
    text.parse::<CompositionIndex>()
        .map_err(|e| usage(e.to_string()))
}

fn parse_epsilon(text: &str) -> Result<EpsilonWord, Failure> {
    text.parse::<EpsilonWord>()
        .map_err(|e| usage(e.to_string()))
}

fn parse_order(n: usize, text: Option<&str>) -> Result<CyclicOrder, Failure> {
    let set = guard_enumeration(n)?;
    match text {
        None => Ok(set.standard_order()),
        Some(list) => {
            let labels = list
                .split(',')
                .map(|t| t.trim().parse::<Label>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| usage(e.to_string()))?;
            let order = canonicalize_cycle(&labels).map_err(|e| usage(e.to_string()))?;
            if order.labels_set() != set.carrier() {
                return Err(usage(format!(
                    "order {order} does not cover the labels of |S| = {}",
                    set.size()
                )));
            }
            Ok(order)
        }
    }
}

#[derive(Serialize)]
struct DivisorsOut {
    n: usize,
    count: usize,
    partitions: Vec<String>,
}

#[derive(Serialize)]
struct DivisorOut {
    tag: String,
    n: usize,
    count: usize,
    components: Vec<String>,
}

impl DivisorOut {
    fn new(d: &Divisor, n: usize) -> DivisorOut {
        DivisorOut {
            tag: d.tag.clone(),
            n,
            count: d.len(),
            components: d.components.iter().map(|p| p.to_string()).collect(),
        }
    }
}

#[derive(Serialize)]
struct CheckOut {
    composition: CompositionIndex,
    epsilon: EpsilonWord,
    n: usize,
    divisor_a: DivisorOut,
    divisor_b: DivisorOut,
    disjointness: DisjointnessReport,
    vertex_avoidance: DisjointnessReport,
    certified: bool,
}

#[derive(Serialize)]
struct FVectorOut {
    n: usize,
    order: CyclicOrder,
    f_vector: Vec<usize>,
}

#[derive(Serialize)]
struct FacesOut {
    n: usize,
    order: CyclicOrder,
    codim: usize,
    count: usize,
    faces: Vec<Face>,
}

#[derive(Serialize)]
struct TreeOut {
    partitions: Vec<String>,
    tree: mzv_moduli::trees::StableTree,
    signature: StratumSignature,
}

#[derive(Serialize)]
struct Agreement {
    difference: f64,
    combined_bound: f64,
    within_bounds: bool,
}

#[derive(Serialize)]
struct MzvOut {
    composition: CompositionIndex,
    epsilon: EpsilonWord,
    weight: u32,
    series: Option<PeriodValue>,
    integral: Option<PeriodValue>,
    agreement: Option<Agreement>,
}

#[derive(Serialize)]
struct IterintOut {
    anchors: Vec<String>,
    period: PeriodValue,
}

fn period_failure(e: PeriodError) -> Failure {
    match e {
        PeriodError::BadK { .. } | PeriodError::BadQ(_) => usage(e.to_string()),
        other => failure(other.to_string()),
    }
}

fn format_anchor(re: f64, im: f64) -> String {
    if im == 0.0 {
        format!("{re}")
    } else if re == 0.0 {
        format!("{im}i")
    } else if im < 0.0 {
        format!("{re}{im}i")
    } else {
        format!("{re}+{im}i")
    }
}

fn run(command: Command) -> Result<String, Failure> {
    match command {
        Command::Divisors { n } => {
            let set = guard_enumeration(n)?;
            let parts =
                enumerate_stable_partitions(&set).map_err(|e| usage(e.to_string()))?;
            Ok(to_json(&DivisorsOut {
                n,
                count: parts.len(),
                partitions: parts.iter().map(|p| p.to_string()).collect(),
            }))
        }
        Command::DivisorA { zeta, eps } => {
            let word = match (zeta, eps) {
                (Some(z), None) => encode_epsilon(&parse_composition(&z)?),
                (None, Some(e)) => parse_epsilon(&e)?,
                _ => return Err(usage("divisor-a needs exactly one of --zeta or --eps")),
            };
            guard_enumeration(word.len())?;
            let d = divisor_a(&word).map_err(|e| failure(e.to_string()))?;
            Ok(to_json(&DivisorOut::new(&d, word.len())))
        }
        Command::DivisorB { n, order } => {
            let rho = parse_order(n, order.as_deref())?;
            let d = divisor_b(&rho).map_err(|e| failure(e.to_string()))?;
            Ok(to_json(&DivisorOut::new(&d, n)))
        }
        Command::Check { zeta } => {
            let c = parse_composition(&zeta)?;
            let word = encode_epsilon(&c);
            let n = word.len();
            let set = guard_enumeration(n)?;
            let rho = set.standard_order();
            let a = divisor_a(&word).map_err(|e| failure(e.to_string()))?;
            let b = divisor_b(&rho).map_err(|e| failure(e.to_string()))?;
            let disjointness =
                check_disjoint(&word, &rho).map_err(|e| failure(e.to_string()))?;
            let vertex_avoidance =
                check_vertex_avoidance(&word, &rho).map_err(|e| failure(e.to_string()))?;
            let certified = disjointness.disjoint && vertex_avoidance.vertex_clear;
            let out = to_json(&CheckOut {
                composition: c,
                epsilon: word,
                n,
                divisor_a: DivisorOut::new(&a, n),
                divisor_b: DivisorOut::new(&b, n),
                disjointness,
                vertex_avoidance,
                certified,
            });
            if certified {
                Ok(out)
            } else {
                // Report still goes to stdout; the exit code carries the
                // verdict.
                print!("{out}");
                Err(failure("certification failed"))
            }
        }
        Command::Stasheff { n, codim, f_vector: _ } => {
            let set = guard_enumeration(n)?;
            let rho = set.standard_order();
            match codim {
                Some(k) => {
                    let fs = faces(&rho, k).map_err(|e| usage(e.to_string()))?;
                    Ok(to_json(&FacesOut {
                        n,
                        order: rho,
                        codim: k,
                        count: fs.len(),
                        faces: fs,
                    }))
                }
                None => {
                    let fv = f_vector(&rho).map_err(|e| usage(e.to_string()))?;
                    Ok(to_json(&FVectorOut {
                        n,
                        order: rho,
                        f_vector: fv,
                    }))
                }
            }
        }
        Command::Tree { partitions, dot } => {
            let parts = partitions
                .split(';')
                .map(|t| t.trim().parse::<StablePartition>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| usage(e.to_string()))?;
            let tree = tree_from_partitions(&parts).map_err(|e| failure(e.to_string()))?;
            if dot {
                Ok(tree.to_dot())
            } else {
                let signature = stratum_signature(&tree);
                Ok(to_json(&TreeOut {
                    partitions: parts.iter().map(|p| p.to_string()).collect(),
                    tree,
                    signature,
                }))
            }
        }
        Command::Mzv {
            zeta,
            method,
            truncation,
            quadrature,
        } => {
            let c = parse_composition(&zeta)?;
            let word = encode_epsilon(&c);
            let k = truncation.unwrap_or(DEFAULT_SERIES_TRUNCATION);
            let q = quadrature.unwrap_or_else(|| default_quadrature_order(word.len()));
            let series = if method != MethodArg::Integral {
                Some(mzv_series(&c, k).map_err(period_failure)?)
            } else {
                None
            };
            let integral = if method != MethodArg::Series {
                Some(mzv_integral(&word, q).map_err(period_failure)?)
            } else {
                None
            };
            let agreement = match (&series, &integral) {
                (Some(s), Some(i)) => {
                    let difference = (s.value - i.value).abs();
                    let combined_bound = s.error_bound + i.error_bound;
                    Some(Agreement {
                        difference,
                        combined_bound,
                        within_bounds: difference <= combined_bound,
                    })
                }
                _ => None,
            };
            Ok(to_json(&MzvOut {
                weight: c.weight(),
                epsilon: word,
                composition: c,
                series,
                integral,
                agreement,
            }))
        }
        Command::Iterint { a, quadrature } => {
            let anchors: AnchorSequence = a.parse().map_err(|e: PeriodError| {
                usage(format!("cannot parse --a: {e}"))
            })?;
            let q = quadrature.unwrap_or_else(|| default_quadrature_order(anchors.len()));
            let period = iterated_integral(&anchors, q).map_err(period_failure)?;
            let printed: Vec<String> = anchors
                .values()
                .iter()
                .map(|c| format_anchor(c.re, c.im))
                .collect();
            Ok(to_json(&IterintOut {
                anchors: printed,
                period,
            }))
        }
        Command::Report {
            zeta,
            truncation,
            quadrature,
        } => {
            let c = parse_composition(&zeta)?;
            let weight = c.weight() as usize;
            guard_enumeration(weight)?;
            let k = truncation.unwrap_or(DEFAULT_SERIES_TRUNCATION);
            let q = quadrature.unwrap_or_else(|| default_quadrature_order(weight));
            let report = framed_report(&c, k, q).map_err(period_failure)?;
            Ok(to_json(&report))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(output) => {
            print!("{output}");
            let _ = std::io::stdout().flush();
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
