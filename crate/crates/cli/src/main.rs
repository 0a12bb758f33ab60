use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use unimetric::acceptance::{self, run_all, Config};
use unimetric::circlegeom::smallest_covering_arc;
use unimetric::linalg::json::vector_to_json;
use unimetric::metrics::{distinguish, sup_distance_detailed, tensor_distance};
use unimetric::numrange::numrange_distance;
use unimetric::pauli::{parse_generators, stabilizer_subspace, PauliSubgroup};
use unimetric::search::{minimal_k, SearchProblem};
use unimetric::subsets::{
    face_distance, null_space, separable_distance, SeparableProblem, SubspaceFace,
};
use unimetric::{ComplexMatrix, Error, UnitaryOperator};

const DEFAULT_SEED: u64 = 20240601;

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  1  selftest reported a failing criterion
  2  parse error (malformed JSON, Pauli string or arguments)
  3  dimension mismatch
  4  matrix is not unitary
  5  any other error";

#[derive(Parser)]
#[command(name = "unimetric", version, about = "Distances between unitary operators", after_help = EXIT_CODES)]
struct Cli {
    /// Output format; json unless the subcommand says otherwise.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args)]
struct Pair {
    /// First unitary, as matrix JSON.
    u: PathBuf,
    /// Second unitary, as matrix JSON.
    v: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Sup-metric d(U, V) with the spectral arc and a maximizing state.
    Dist(Pair),
    /// Whether one query can tell U from V with certainty.
    Distinguish(Pair),
    /// Distance of tensor products from the factor distances.
    Tensor {
        #[arg(long)]
        d1: f64,
        #[arg(long)]
        d2: f64,
    },
    /// Distance restricted to states in the span of a basis.
    FaceDist {
        #[command(flatten)]
        pair: Pair,
        /// Matrix JSON whose orthonormal columns span the face.
        #[arg(long)]
        basis: PathBuf,
    },
    /// Distance restricted to product states of C^m (x) C^n.
    SepDist {
        #[command(flatten)]
        pair: Pair,
        /// Factor dimensions, as `m,n`.
        #[arg(long, value_parser = parse_dims)]
        dims: (usize, usize),
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        #[arg(long, env = "UNIMETRIC_SEED")]
        seed: Option<u64>,
    },
    /// Joint eigenspaces of commuting unitaries.
    Nullspace {
        /// Comma-separated matrix JSON paths.
        #[arg(long, value_delimiter = ',', required = true)]
        gens: Vec<PathBuf>,
    },
    /// Stabilizer faces of a Pauli subgroup.
    Stabilizer {
        /// Comma-separated Pauli strings, e.g. `+ZZ,+XX`.
        #[arg(long)]
        gens: String,
    },
    /// Smallest number of search steps reaching a target distance.
    Search {
        #[arg(long, required_unless_present = "n", conflicts_with = "n")]
        alpha: Option<f64>,
        /// Database size; sets alpha = asin(1 / sqrt(N)).
        #[arg(long = "N", id = "n")]
        n: Option<u64>,
        /// Defaults to alpha.
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        #[arg(long)]
        epsilon: f64,
    },
    /// Distance from the origin to the numerical range of M, or of U^dagger V.
    Numrange {
        m: PathBuf,
        v: Option<PathBuf>,
        /// Write the eigenangle polygon as CSV (unitary input only).
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Run the built-in acceptance suite.
    Selftest {
        #[arg(long, env = "UNIMETRIC_SEED")]
        seed: Option<u64>,
        #[arg(
            long,
            hide = true,
            default_value_t = 1.0,
            allow_negative_numbers = true
        )]
        tolerance_scale: f64,
    },
}

#[derive(Debug)]
enum CliError {
    Lib(Error),
    Io(PathBuf, std::io::Error),
    Usage(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(..) => 5,
            CliError::Lib(e) => match e {
                Error::Json(_)
                | Error::Parse { .. }
                | Error::InvalidData { .. }
                | Error::NotFinite { .. } => 2,
                Error::DimensionMismatch { .. }
                | Error::NotSquare { .. }
                | Error::LengthMismatch(..) => 3,
                Error::NotUnitary(_) => 4,
                _ => 5,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
            CliError::Usage(m) => f.write_str(m),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

struct Report {
    json: Value,
    text: String,
    csv: Option<String>,
    exit: u8,
}

impl Report {
    fn new(json: Value, text: String) -> Self {
        Self {
            json,
            text,
            csv: None,
            exit: 0,
        }
    }
}

fn parse_dims(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected m,n")?;
    let m = a.trim().parse().map_err(|e| format!("{a}: {e}"))?;
    let n = b.trim().parse().map_err(|e| format!("{b}: {e}"))?;
    Ok((m, n))
}

fn read_matrix(path: &Path) -> CliResult<ComplexMatrix> {
    let s = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_owned(), e))?;
    Ok(ComplexMatrix::from_json_str(&s)?)
}

fn read_unitary(path: &Path) -> CliResult<UnitaryOperator> {
    Ok(UnitaryOperator::new(read_matrix(path)?)?)
}

fn read_pair(p: &Pair) -> CliResult<(UnitaryOperator, UnitaryOperator)> {
    let u = read_unitary(&p.u)?;
    let v = read_unitary(&p.v)?;
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim().to_string(),
            got: v.dim().to_string(),
        }
        .into());
    }
    Ok((u, v))
}

fn complex_pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn cmd_dist(p: &Pair) -> CliResult<Report> {
    let (u, v) = read_pair(p)?;
    let d = sup_distance_detailed(&u, &v)?;
    let mut json = serde_json::to_value(&d.result).expect("serializable");
    json["alpha"] = json!(d.arc.alpha);
    json["covers_semicircle"] = json!(d.arc.covers_semicircle);
    json["eigen_angles"] = json!(d.eigen_angles);
    let text = format!(
        "d = {}\narc alpha = {}{}\n",
        d.result.value,
        d.arc.alpha,
        if d.arc.covers_semicircle {
            " (covers a semicircle)"
        } else {
            ""
        }
    );
    Ok(Report::new(json, text))
}

fn cmd_distinguish(p: &Pair) -> CliResult<Report> {
    let (u, v) = read_pair(p)?;
    let r = distinguish(&u, &v)?;
    let text = if r.distinguishable {
        format!(
            "distinguishable: d = {}, witness residual {:e}\n",
            r.value,
            r.residual.unwrap_or(f64::NAN)
        )
    } else {
        format!(
            "not distinguishable: d = {}, every state keeps overlap >= {}\n",
            r.value,
            r.overlap_bound.unwrap_or(f64::NAN)
        )
    };
    Ok(Report::new(
        serde_json::to_value(&r).expect("serializable"),
        text,
    ))
}

fn cmd_tensor(d1: f64, d2: f64) -> CliResult<Report> {
    let value = tensor_distance(d1, d2)?;
    Ok(Report::new(
        json!({ "d1": d1, "d2": d2, "value": value }),
        format!("d = {value}\n"),
    ))
}

fn cmd_face_dist(p: &Pair, basis: &Path) -> CliResult<Report> {
    let (u, v) = read_pair(p)?;
    let face = SubspaceFace::new(read_matrix(basis)?)?;
    let r = face_distance(&u, &v, &face)?;
    let text = format!("d_K = {} on a {}-dimensional face\n", r.value, face.dim());
    Ok(Report::new(
        serde_json::to_value(&r).expect("serializable"),
        text,
    ))
}

fn cmd_sep_dist(p: &Pair, dims: (usize, usize), restarts: usize, seed: u64) -> CliResult<Report> {
    let (u, v) = read_pair(p)?;
    if restarts == 0 {
        return Err(CliError::Usage("--restarts must be positive".into()));
    }
    let prob = SeparableProblem {
        restarts,
        ..SeparableProblem::new(dims.0, dims.1, seed)
    };
    let r = separable_distance(&u, &v, &prob)?;
    let mut json = serde_json::to_value(&r).expect("serializable");
    json["seed"] = json!(seed);
    json["restarts"] = json!(restarts);
    let text = format!("d_sep = {} ({} restarts, seed {seed})\n", r.value, restarts);
    Ok(Report::new(json, text))
}

fn cmd_nullspace(gens: &[PathBuf]) -> CliResult<Report> {
    let ops = gens
        .iter()
        .map(|p| read_unitary(p))
        .collect::<CliResult<Vec<_>>>()?;
    let r = null_space(&ops)?;
    let mut text = format!("{} joint eigenspaces\n", r.blocks.len());
    for b in &r.blocks {
        let chars: Vec<String> = b.character.iter().map(|z| format!("{z:.6}")).collect();
        text.push_str(&format!(
            "  dim {}: [{}]\n",
            b.basis_columns.len(),
            chars.join(", ")
        ));
    }
    Ok(Report::new(
        serde_json::to_value(&r).expect("serializable"),
        text,
    ))
}

fn cmd_stabilizer(gens: &str) -> CliResult<Report> {
    let k = PauliSubgroup::generate(parse_generators(gens)?)?;
    let r = stabilizer_subspace(&k)?;
    let faces: Vec<Value> = r
        .faces
        .iter()
        .map(|f| {
            json!({
                "characters": f.characters.iter().map(|&z| complex_pair(z)).collect::<Vec<_>>(),
                "basis": f.face.basis(),
            })
        })
        .collect();
    let generators: Vec<String> = k.generators().iter().map(|g| g.to_string()).collect();
    let json = json!({ "generators": generators, "non_abelian": r.non_abelian, "faces": faces });
    let text = if r.non_abelian {
        "subgroup is not abelian: no common +1 eigenvectors\n".to_string()
    } else {
        format!(
            "{} faces of dimension {}\n",
            r.faces.len(),
            r.faces.first().map_or(0, |f| f.face.dim())
        )
    };
    Ok(Report::new(json, text))
}

fn cmd_search(
    alpha: Option<f64>,
    n: Option<u64>,
    gamma: Option<f64>,
    theta: f64,
    epsilon: f64,
) -> CliResult<Report> {
    let alpha = match (alpha, n) {
        (Some(a), _) => a,
        (None, Some(n)) if n >= 2 => (1.0 / (n as f64).sqrt()).asin(),
        (None, Some(n)) => {
            return Err(Error::InvalidAngles(format!("N = {n} must be at least 2")).into())
        }
        (None, None) => return Err(CliError::Usage("one of --alpha or --N is required".into())),
    };
    let gamma = gamma.unwrap_or(alpha);
    let p = match n {
        Some(n) => SearchProblem::from_n(n, theta, gamma)?,
        None => SearchProblem::new(alpha, theta, gamma)?,
    };
    let r = minimal_k(&p, epsilon)?;
    let json = json!({
        "alpha": p.alpha,
        "gamma": p.gamma,
        "k": r.k,
        "achieved": r.achieved,
        "bound_sqrtN": p.sqrt_n_bound(),
    });
    Ok(Report::new(
        json,
        format!("k = {} reaches d = {}\n", r.k, r.achieved),
    ))
}

fn cmd_numrange(
    m: &Path,
    v: Option<&Path>,
    emit: Option<&Path>,
    want_csv: bool,
) -> CliResult<Report> {
    let matrix = match v {
        Some(v) => {
            let (a, b) = read_pair(&Pair {
                u: m.to_owned(),
                v: v.to_owned(),
            })?;
            a.adjoint_compose(&b)?.into_matrix()
        }
        None => read_matrix(m)?,
    };
    let csv = if emit.is_some() || want_csv {
        let w = UnitaryOperator::new(matrix.clone())?;
        Some(smallest_covering_arc(w.eigen_angles())?.to_csv())
    } else {
        None
    };
    let r = numrange_distance(&matrix)?;
    if let (Some(path), Some(csv)) = (emit, &csv) {
        std::fs::write(path, csv).map_err(|e| CliError::Io(path.to_owned(), e))?;
    }
    let json = json!({
        "distance": r.distance,
        "witness": vector_to_json(&r.witness),
        "value": complex_pair(r.value),
        "phi": r.phi,
    });
    let mut report = Report::new(json, format!("distance from origin = {}\n", r.distance));
    report.csv = csv;
    Ok(report)
}

fn cmd_selftest(seed: u64, tolerance_scale: f64) -> CliResult<Report> {
    let reports = run_all(&Config {
        seed,
        tolerance_scale,
    });
    let all = reports.iter().all(|r| r.passed);
    let rows: Vec<Value> = reports
        .iter()
        .map(|r| {
            json!({
                "id": r.id,
                "name": r.name,
                "passed": r.passed,
                "detail": r.detail,
                "elapsed_ms": r.elapsed.as_secs_f64() * 1e3,
            })
        })
        .collect();
    let mut report = Report::new(
        json!({ "seed": seed, "passed": all, "criteria": rows }),
        acceptance::render(&reports),
    );
    report.exit = if all { 0 } else { 1 };
    Ok(report)
}

fn run(cli: &Cli) -> CliResult<(Report, Format)> {
    let default = match cli.command {
        Command::Selftest { .. } => Format::Text,
        _ => Format::Json,
    };
    let format = cli.format.unwrap_or(default);
    if format == Format::Csv && !matches!(cli.command, Command::Numrange { .. }) {
        return Err(CliError::Usage(
            "csv output is only available for numrange".into(),
        ));
    }
    let report = match &cli.command {
        Command::Dist(p) => cmd_dist(p)?,
        Command::Distinguish(p) => cmd_distinguish(p)?,
        Command::Tensor { d1, d2 } => cmd_tensor(*d1, *d2)?,
        Command::FaceDist { pair, basis } => cmd_face_dist(pair, basis)?,
        Command::SepDist {
            pair,
            dims,
            restarts,
            seed,
        } => cmd_sep_dist(pair, *dims, *restarts, seed.unwrap_or(DEFAULT_SEED))?,
        Command::Nullspace { gens } => cmd_nullspace(gens)?,
        Command::Stabilizer { gens } => cmd_stabilizer(gens)?,
        Command::Search {
            alpha,
            n,
            gamma,
            theta,
            epsilon,
        } => cmd_search(*alpha, *n, *gamma, *theta, *epsilon)?,
        Command::Numrange { m, v, emit } => {
            cmd_numrange(m, v.as_deref(), emit.as_deref(), format == Format::Csv)?
        }
        Command::Selftest {
            seed,
            tolerance_scale,
        } => cmd_selftest(seed.unwrap_or(DEFAULT_SEED), *tolerance_scale)?,
    };
    Ok((report, format))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((report, format)) => {
            let body = match format {
                Format::Json => {
                    let mut s = serde_json::to_string_pretty(&report.json).expect("serializable");
                    s.push('\n');
                    s
                }
                Format::Text => report.text,
                Format::Csv => report.csv.unwrap_or_default(),
            };
            let written = match &cli.output {
                Some(path) => std::fs::write(path, body).map_err(|e| CliError::Io(path.clone(), e)),
                None => {
                    print!("{body}");
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(e.code());
            }
            ExitCode::from(report.exit)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
