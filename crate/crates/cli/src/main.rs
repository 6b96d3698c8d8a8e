use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use gh_lab_core::covering::{projective_cover_bound, CoveringCertificate, VALIDATION_SLACK};
use gh_lab_core::finite_metric::{gh_bruteforce, FiniteMetricSpace, Metric, DEFAULT_GH_CELLS};
use gh_lab_core::gh_bounds::{bounds_table, c_lower, default_certificates, round_sig, verify_distortion, TableMetric};
use gh_lab_core::io::{parse_distance_matrix, parse_points};
use gh_lab_core::odd_maps::{analyze, OddFunction};
use gh_lab_core::sampling::{subseed, DEFAULT_SEED};
use gh_lab_core::sphere_geom::{r_n, t_n};
use gh_lab_core::vr_complex::{build_vr_with_budget, DEFAULT_SIMPLEX_BUDGET};
use gh_lab_core::Error;

const EXIT_INVALID: u8 = 2;
const EXIT_BUDGET: u8 = 3;

/// Bounds on Gromov-Hausdorff distances between spheres, with the
/// supporting computations.
#[derive(Parser, Debug)]
#[command(name = "gh-lab", version)]
struct Cli {
    /// Seed for every sampled quantity.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,

    /// Write the result here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    /// Worker thread cap (0 means one per core).
    #[arg(long, env = "GH_LAB_THREADS", default_value_t = 0, hide_env_values = true)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Table of lower and upper bounds on 2·d_GH(S^n, S^k).
    Table {
        #[arg(long, default_value_t = 7)]
        max_n: usize,
        #[arg(long, default_value_t = 7)]
        max_k: usize,
        #[arg(long, value_enum, default_value_t = MetricArg::Geodesic)]
        metric: MetricArg,
        #[arg(long, value_enum, default_value_t = Format::Markdown)]
        format: Format,
    },
    /// Sample the distortion of the hemisphere correspondence S^{n+1} -> S^n.
    #[command(name = "verify-theorem1")]
    VerifyTheorem1 {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Covering certificate, checked on fresh samples.
    Covering {
        #[arg(long, value_enum)]
        construction: CoverArg,
        /// Sphere dimension (required for simplex and greedy).
        #[arg(long)]
        n: Option<usize>,
        /// Number of projective centers (greedy only).
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Betti numbers over F2 of a Vietoris-Rips complex of a point file.
    VrHomology {
        #[arg(long)]
        points: PathBuf,
        /// Scale in radians; simplices have diameter <= r.
        #[arg(long)]
        r: f64,
        /// Highest homology degree reported.
        #[arg(long, default_value_t = 3)]
        max_dim: usize,
        #[arg(long, default_value_t = DEFAULT_SIMPLEX_BUDGET)]
        budget: usize,
        /// Also write the complex here, one simplex per line.
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Exact Gromov-Hausdorff distance between two distance-matrix files.
    OracleGh {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        /// Limit on |X|·|Y|.
        #[arg(long, default_value_t = DEFAULT_GH_CELLS)]
        max_cells: usize,
    },
    /// Modulus of discontinuity, distortion and oddness of an odd map.
    OddMap {
        #[arg(long, value_enum)]
        construction: OddArg,
        /// Target sphere dimension.
        #[arg(long)]
        n: usize,
        /// Domain sphere dimension (n + 1 for the hemisphere maps, n for the pipeline).
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0.05)]
        eta: f64,
        /// Net scale of the pipeline construction.
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
    },
    /// r_n, t_n and the known exact values of c_{n,k}.
    Constants {
        #[arg(long, default_value_t = 7)]
        max_n: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum MetricArg {
    Geodesic,
    Euclidean,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Format {
    Csv,
    Json,
    Markdown,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum CoverArg {
    Icosahedron,
    #[value(name = "600cell")]
    Cell600,
    Simplex,
    Greedy,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum OddArg {
    #[value(name = "cone_vertex")]
    ConeVertex,
    #[value(name = "equatorial_helmet")]
    EquatorialHelmet,
    #[value(name = "vr_pipeline")]
    VrPipeline,
}

#[derive(Debug)]
enum Failure {
    Lib(Error),
    Io(PathBuf, std::io::Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Lib(e) if e.is_budget() => EXIT_BUDGET,
            _ => EXIT_INVALID,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Lib(e) => write!(f, "{e}"),
            Failure::Io(p, e) => write!(f, "{}: {e}", p.display()),
            Failure::Usage(m) => f.write_str(m),
        }
    }
}

/// Rounds every float to 12 significant digits.
fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => {
            let x = round_sig(n.as_f64().expect("finite"));
            serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_json).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

fn to_json<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn json_text(v: Value) -> String {
    let mut s = serde_json::to_string_pretty(&round_json(v)).expect("values serialize");
    s.push('\n');
    s
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(path.to_owned(), e))
}

fn positive(name: &str, v: usize) -> Result<(), Failure> {
    if v == 0 {
        return Err(Failure::Usage(format!("--{name} must be positive")));
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<String, Failure> {
    let seed = cli.seed;
    match &cli.command {
        Command::Table {
            max_n,
            max_k,
            metric,
            format,
        } => {
            positive("max-n", *max_n)?;
            if max_k < max_n {
                return Err(Failure::Usage("--max-k must be at least --max-n".into()));
            }
            let metric = match metric {
                MetricArg::Geodesic => TableMetric::Geodesic,
                MetricArg::Euclidean => TableMetric::Euclidean,
            };
            let t = bounds_table(*max_n, *max_k, metric, &default_certificates())?;
            Ok(match format {
                Format::Markdown => t.to_markdown(),
                Format::Csv => t.to_csv()?,
                Format::Json => json_text(to_json(&t)),
            })
        }
        Command::VerifyTheorem1 { n, samples } => {
            positive("samples", *samples)?;
            let r = verify_distortion(*n, *samples, seed)?;
            let mut v = to_json(&r);
            v["within_bounds"] = json!(r.within_bounds(1e-9));
            Ok(json_text(v))
        }
        Command::Covering {
            construction,
            n,
            k,
            samples,
        } => {
            positive("samples", *samples)?;
            let need = |x: &Option<usize>, name: &str| x.ok_or_else(|| Failure::Usage(format!("--{name} is required")));
            let cert = match construction {
                CoverArg::Icosahedron => CoveringCertificate::icosahedron(),
                CoverArg::Cell600 => CoveringCertificate::cell600(),
                CoverArg::Simplex => CoveringCertificate::simplex(need(n, "n")?)?,
                CoverArg::Greedy => CoveringCertificate::greedy_projective(need(n, "n")?, need(k, "k")?, *samples, seed)?,
            };
            if n.is_some_and(|n| n != cert.n) {
                return Err(Failure::Usage(format!("{construction:?} lives on S^{}", cert.n)));
            }
            let validation = cert.validate(*samples, subseed(seed, 1), VALIDATION_SLACK)?;
            let mut v = json!({ "certificate": to_json(&cert), "validation": to_json(&validation) });
            if matches!(construction, CoverArg::Icosahedron | CoverArg::Cell600) {
                let quotient = projective_cover_bound(&cert)?;
                v["projective"] = json!({
                    "count": quotient.count,
                    "radius_bound": quotient.radius_bound,
                });
            }
            Ok(json_text(v))
        }
        Command::VrHomology {
            points,
            r,
            max_dim,
            budget,
            export,
        } => {
            if !(r.is_finite() && *r >= 0.0) {
                return Err(Failure::Usage("--r must be a nonnegative number".into()));
            }
            let set = parse_points(&read(points)?)?;
            let space = FiniteMetricSpace::from_points(&set.points, Metric::Geodesic)?;
            let vr = build_vr_with_budget(&space, *r, max_dim + 1, *budget)?;
            let betti = vr.f2_homology(*max_dim)?;
            if let Some(path) = export {
                let mut buf = Vec::new();
                vr.complex().export(&mut buf).map_err(|e| Failure::Io(path.clone(), e))?;
                fs::write(path, buf).map_err(|e| Failure::Io(path.clone(), e))?;
            }
            Ok(format!("{}\n", json!({ "betti": betti.values })))
        }
        Command::OracleGh { x, y, max_cells } => {
            let xs = parse_distance_matrix(&read(x)?)?;
            let ys = parse_distance_matrix(&read(y)?)?;
            let d = gh_bruteforce(&xs, &ys, *max_cells)?;
            Ok(json_text(json!({ "gh": d, "x_size": xs.len(), "y_size": ys.len() })))
        }
        Command::OddMap {
            construction,
            n,
            k,
            samples,
            eta,
            epsilon,
        } => {
            positive("samples", *samples)?;
            let f = match construction {
                OddArg::ConeVertex => OddFunction::cone_vertex(*n)?,
                OddArg::EquatorialHelmet => OddFunction::equatorial_helmet(*n)?,
                OddArg::VrPipeline => OddFunction::vr_pipeline(*n, *epsilon, subseed(seed, 2))?,
            };
            if k.is_some_and(|k| k != f.domain_dim()) {
                return Err(Failure::Usage(format!(
                    "{construction:?} maps S^{} to S^{n}; --k {} is not supported",
                    f.domain_dim(),
                    k.unwrap_or_default()
                )));
            }
            let r = analyze(&f, *eta, *samples, seed)?;
            Ok(json_text(json!({
                "construction": r.construction,
                "k": r.k,
                "n": r.n,
                "eta": r.modulus.eta,
                "samples": r.modulus.samples,
                "delta_hat": r.modulus.delta_hat,
                "diameter_hat": r.modulus.diameter_hat,
                "dis_hat": r.dis_hat,
                "oddness_violations": r.oddness_violations,
            })))
        }
        Command::Constants { max_n } => {
            positive("max-n", *max_n)?;
            let certs = default_certificates();
            let mut rows = Vec::new();
            for n in 1..=*max_n {
                let mut known = Vec::new();
                for k in n..=*max_n + 2 {
                    let lb = c_lower(n, k, &certs)?;
                    if lb.exact {
                        known.push(json!({ "k": k, "value": lb.value, "symbol": lb.symbol() }));
                    }
                }
                rows.push(json!({ "n": n, "r_n": r_n(n)?, "t_n": t_n(n)?, "c_known": known }));
            }
            Ok(json_text(Value::Array(rows)))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("gh-lab: {e}");
            return ExitCode::from(EXIT_INVALID);
        }
    }
    match run(&cli) {
        Ok(text) => {
            let written = match &cli.output {
                Some(path) => fs::write(path, text).map_err(|e| Failure::Io(path.clone(), e)),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            match written {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("gh-lab: {e}");
                    ExitCode::FAILURE
                }
            }
        }
        Err(e) => {
            eprintln!("gh-lab: {e}");
            ExitCode::from(e.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_reaches_nested_floats_only() {
        let v = round_json(json!({ "a": [1.0 / 3.0, 7], "b": { "c": 2.0943951023931957 }, "d": "x" }));
        assert_eq!(v, json!({ "a": [0.333333333333, 7], "b": { "c": 2.09439510239 }, "d": "x" }));
    }

    #[test]
    fn parser_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
