//! `qglap` command-line front end: graph validation, M-matrix and secular
//! function evaluation, spectrum computation, and isospectrality tooling.
//!
//! Exit codes: 0 success, 1 usage error, 2 validation/domain error,
//! 3 numerical warning (suspected missed root).

use clap::{Parser, Subcommand, ValueEnum};
use qglap::edge_secular::secular_edge;
use qglap::graph::fixtures;
use qglap::isospectral::{
    decoupled_isospectrality_check, necessary_check, search_isospectral, trace_sum,
};
use qglap::mfunction::{m_matrix_real, pole_distance, secular_vertex_real, EPS_POLE};
use qglap::spectrum::{compare_spectra, find_spectrum, Verdict};
use qglap::{MarkedGraph, ScanConfig};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

/// 17 significant digits: round-trips exactly through decimal.
fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Parser)]
#[command(name = "qglap", version, about = "Spectra of Laplacians on metric graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Formulation {
    Vertex,
    Edge,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Edge,
    Fd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MatrixFormat {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a graph description.
    Validate { graph: PathBuf },
    /// Print the vertex M-matrix at a real spectral parameter.
    Mmatrix {
        graph: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long, value_enum, default_value = "text")]
        format: MatrixFormat,
    },
    /// Tabulate the secular function(s) over a range of lambda.
    Secular {
        graph: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long)]
        step: f64,
        #[arg(long, value_enum, default_value = "edge")]
        formulation: Formulation,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the spectrum up to a cutoff.
    Spectrum {
        graph: PathBuf,
        #[arg(long = "lambda-max")]
        lambda_max: f64,
        #[arg(long, value_enum, default_value = "edge")]
        method: Method,
        /// Mesh subdivisions per unit length (fd method only).
        #[arg(long, default_value_t = 128)]
        mesh: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the spectra of two graphs.
    Compare {
        graph1: PathBuf,
        graph2: PathBuf,
        #[arg(long = "lambda-max")]
        lambda_max: f64,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
    },
    /// Power sums of the vertex coupling invariants; with a second graph,
    /// the pairwise residuals and the necessary-condition report.
    Traces {
        graph: PathBuf,
        graph2: Option<PathBuf>,
        #[arg(short, long, default_value_t = 6)]
        m: u32,
    },
    /// Search for coupling vectors isospectral to the given graph.
    Search {
        graph: PathBuf,
        #[arg(long = "lambda-max")]
        lambda_max: f64,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
    },
    /// Compare a homogeneous graph against its fully decoupled version.
    Decoupled {
        graph: PathBuf,
        #[arg(long = "lambda-max")]
        lambda_max: f64,
    },
    /// List or emit the built-in example graphs.
    Examples {
        #[command(subcommand)]
        action: ExamplesAction,
    },
}

#[derive(Subcommand)]
enum ExamplesAction {
    List,
    Emit {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_graph(path: &PathBuf) -> Result<MarkedGraph, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    MarkedGraph::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn write_out(out: &Option<PathBuf>, content: &str) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn scan_variable(lambda: f64) -> f64 {
    if lambda >= 0.0 {
        lambda.sqrt()
    } else {
        (-lambda).sqrt()
    }
}

fn run(cli: Cli) -> Result<u8, String> {
    match cli.command {
        Command::Validate { graph } => {
            let g = load_graph(&graph)?;
            println!(
                "ok: {} vertices, {} edges, total length {}",
                g.num_vertices(),
                g.num_edges(),
                fmt_f64(g.total_length())
            );
            Ok(0)
        }
        Command::Mmatrix {
            graph,
            lambda,
            format,
        } => {
            let g = load_graph(&graph)?;
            let m = m_matrix_real(&g, lambda).map_err(|e| e.to_string())?;
            match format {
                MatrixFormat::Json => {
                    let rows: Vec<Vec<String>> = (0..m.nrows())
                        .map(|i| (0..m.ncols()).map(|j| fmt_f64(m[(i, j)])).collect())
                        .collect();
                    let doc = serde_json::json!({
                        "lambda": lambda,
                        "entries": rows,
                    });
                    println!("{}", serde_json::to_string_pretty(&doc).unwrap());
                }
                MatrixFormat::Text => {
                    for i in 0..m.nrows() {
                        let row: Vec<String> =
                            (0..m.ncols()).map(|j| format!("{:>24}", fmt_f64(m[(i, j)]))).collect();
                        println!("{}", row.join(" "));
                    }
                }
            }
            Ok(0)
        }
        Command::Secular {
            graph,
            from,
            to,
            step,
            formulation,
            out,
        } => {
            if !(step > 0.0) || to < from {
                return Err("invalid range: need step > 0 and to >= from".into());
            }
            let g = load_graph(&graph)?;
            let mut csv = String::new();
            match formulation {
                Formulation::Both => csv.push_str("lambda,mu_or_kappa,edge,vertex\n"),
                _ => csv.push_str("lambda,mu_or_kappa,value,formulation\n"),
            }
            let n = ((to - from) / step).round() as usize;
            for i in 0..=n {
                let lambda = from + i as f64 * step;
                if lambda > to + step * 1e-9 {
                    break;
                }
                let x = scan_variable(lambda);
                // vertex formulation is masked near M-matrix poles
                let vertex_cell = || -> Option<f64> {
                    if pole_distance(&g, lambda) < EPS_POLE {
                        return None;
                    }
                    secular_vertex_real(&g, lambda).ok()
                };
                match formulation {
                    Formulation::Edge => {
                        let v = secular_edge(&g, lambda);
                        writeln!(csv, "{},{},{},edge", fmt_f64(lambda), fmt_f64(x), fmt_f64(v))
                            .unwrap();
                    }
                    Formulation::Vertex => {
                        let cell = vertex_cell().map(fmt_f64).unwrap_or_default();
                        writeln!(csv, "{},{},{cell},vertex", fmt_f64(lambda), fmt_f64(x)).unwrap();
                    }
                    Formulation::Both => {
                        let e = secular_edge(&g, lambda);
                        let cell = vertex_cell().map(fmt_f64).unwrap_or_default();
                        writeln!(
                            csv,
                            "{},{},{},{cell}",
                            fmt_f64(lambda),
                            fmt_f64(x),
                            fmt_f64(e)
                        )
                        .unwrap();
                    }
                }
            }
            write_out(&out, &csv)?;
            Ok(0)
        }
        Command::Spectrum {
            graph,
            lambda_max,
            method,
            mesh,
            out,
        } => {
            let g = load_graph(&graph)?;
            let (spec, tag) = match method {
                Method::Edge => (
                    find_spectrum(&g, lambda_max, &ScanConfig::default())
                        .map_err(|e| e.to_string())?,
                    "edge",
                ),
                Method::Fd => {
                    let count = (g.total_length() * lambda_max.max(0.0).sqrt()
                        / std::f64::consts::PI) as usize
                        + 2 * g.num_vertices()
                        + 4;
                    let s = qglap::fd::fd_spectrum(&g, mesh, count).map_err(|e| e.to_string())?;
                    (s, "fd")
                }
            };
            let mut csv = String::from("lambda,multiplicity,method\n");
            for &(lam, m) in &spec.eigenvalues {
                if lam <= lambda_max {
                    writeln!(csv, "{},{m},{tag}", fmt_f64(lam)).unwrap();
                }
            }
            write_out(&out, &csv)?;
            if spec.missed_root_suspected {
                eprintln!("warning: eigenvalue count deviates from the counting-function estimate; a root may have been missed");
                Ok(3)
            } else {
                Ok(0)
            }
        }
        Command::Compare {
            graph1,
            graph2,
            lambda_max,
            tol,
        } => {
            let g1 = load_graph(&graph1)?;
            let g2 = load_graph(&graph2)?;
            let cfg = ScanConfig::default();
            let s1 = find_spectrum(&g1, lambda_max, &cfg).map_err(|e| e.to_string())?;
            let s2 = find_spectrum(&g2, lambda_max, &cfg).map_err(|e| e.to_string())?;
            let r = compare_spectra(&s1, &s2, tol);
            match r.verdict {
                Verdict::Isospectral => println!(
                    "ISOSPECTRAL up to {} ({} eigenvalues, max dev {})",
                    fmt_f64(r.lambda_max),
                    r.compared,
                    fmt_f64(r.max_deviation)
                ),
                Verdict::NotIsospectral => {
                    let mm = r.first_mismatch.as_ref().unwrap();
                    println!(
                        "NOT ISOSPECTRAL: first mismatch at index {} ({} vs {})",
                        mm.index,
                        mm.lambda_left.map(fmt_f64).unwrap_or_else(|| "-".into()),
                        mm.lambda_right.map(fmt_f64).unwrap_or_else(|| "-".into())
                    );
                }
                Verdict::Inconclusive => println!(
                    "INCONCLUSIVE: only {} comparable eigenvalues below {}",
                    r.compared,
                    fmt_f64(r.lambda_max)
                ),
            }
            println!("{}", serde_json::to_string_pretty(&r).unwrap());
            Ok(0)
        }
        Command::Traces { graph, graph2, m } => {
            let g1 = load_graph(&graph)?;
            match graph2 {
                None => {
                    let mut rows = Vec::new();
                    for k in 1..=m.max(1) {
                        let t = trace_sum(&g1, k).map_err(|e| e.to_string())?;
                        rows.push(serde_json::json!({ "m": k, "sum": t }));
                    }
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&serde_json::json!({ "traces": rows }))
                            .unwrap()
                    );
                }
                Some(p2) => {
                    let g2 = load_graph(&p2)?;
                    let report = necessary_check(&g1, &g2, 1e-10).map_err(|e| e.to_string())?;
                    println!("{}", serde_json::to_string_pretty(&report).unwrap());
                }
            }
            Ok(0)
        }
        Command::Search {
            graph,
            lambda_max,
            tol,
        } => {
            let g = load_graph(&graph)?;
            let hits = search_isospectral(&g, lambda_max, tol).map_err(|e| e.to_string())?;
            let doc: Vec<_> = hits
                .iter()
                .map(|(alphas, report)| {
                    serde_json::json!({ "couplings": alphas, "report": report })
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
            Ok(0)
        }
        Command::Decoupled { graph, lambda_max } => {
            let g = load_graph(&graph)?;
            let r = decoupled_isospectrality_check(&g, lambda_max).map_err(|e| e.to_string())?;
            println!("{}", serde_json::to_string_pretty(&r).unwrap());
            Ok(0)
        }
        Command::Examples { action } => match action {
            ExamplesAction::List => {
                for name in fixtures::FIXTURE_NAMES {
                    println!("{name}");
                }
                Ok(0)
            }
            ExamplesAction::Emit { name, out } => {
                let g = fixtures::by_name(&name).map_err(|e| e.to_string())?;
                write_out(&out, &g.to_json())?;
                Ok(0)
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are successes, everything else is usage
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
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
