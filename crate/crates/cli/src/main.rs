//! `qpart`: spectra, partition energies and interlacing checks for metric graphs.

use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use qpart::catalog::{CatalogError, CatalogSpec};
use qpart::graph::{GraphError, MetricGraph};
use qpart::optimize::{
    bound_table, minimize_energy, verify_interlacing, EnergyKind, InterlacingOptions, OptimizeError, SearchOptions,
    DEFAULT_MAX_CANDIDATES,
};
use qpart::spectral::{eigenvalues, neumann_domains, nodal_domains, SpectralError, SpectralProblem, VertexCondition};

#[derive(Parser)]
#[command(name = "qpart", version, about = "Spectral minimal partitions of metric graphs")]
struct Cli {
    /// Worker threads for the parallel parts of the search.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues of the Laplacian as CSV.
    Spectrum {
        graph: String,
        /// `all-standard`, `all-dirichlet`, or one of `s`/`d` per vertex, comma separated.
        #[arg(long, default_value = "all-standard")]
        conditions: String,
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
    /// Estimate the optimal k-partition energy.
    Energy {
        graph: String,
        #[arg(long)]
        k: usize,
        /// D (Dirichlet) or N (natural).
        #[arg(long)]
        kind: EnergyKind,
        #[command(flatten)]
        search: SearchArgs,
        /// Allow graphs, k and meshes beyond the default limits.
        #[arg(long)]
        allow_large: bool,
        /// Print the witness as CSV instead of a summary.
        #[arg(long)]
        csv: bool,
    },
    /// Bound table and interlacing checks for k = 1..=kmax.
    Verify {
        graph: String,
        #[arg(long)]
        kmax: usize,
        /// Meshes to search on, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "8,16")]
        mesh: Vec<usize>,
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
        refine: bool,
        /// Relative tolerance of the heuristic checks.
        #[arg(long, default_value_t = 0.02)]
        tol: f64,
        /// Also compare against the rigid natural energy.
        #[arg(long)]
        rigid: bool,
        #[arg(long, default_value_t = DEFAULT_MAX_CANDIDATES)]
        max_candidates: u128,
        /// Skip the energy search and print eigenvalues and closed-form bounds only.
        #[arg(long)]
        bounds_only: bool,
        #[arg(long, value_enum, default_value_t = Format::Markdown)]
        format: Format,
    },
    /// Nodal and Neumann domain counts of one eigenfunction.
    Nodal {
        graph: String,
        /// 1-based eigenvalue index.
        #[arg(long)]
        index: usize,
        #[arg(long, default_value = "all-standard")]
        conditions: String,
    },
    /// Write a catalog graph in the graph file format.
    Catalog {
        /// A catalog spec such as `star:3` or `windmill:1:4:1`.
        spec: String,
    },
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, default_value_t = 8)]
    mesh: usize,
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    refine: bool,
    /// Restrict the natural energy to rigid partitions.
    #[arg(long)]
    rigid: bool,
    #[arg(long, default_value_t = DEFAULT_MAX_CANDIDATES)]
    max_candidates: u128,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Markdown,
    Csv,
    Json,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Optimize(#[from] OptimizeError),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Catalog(_) | CliError::Graph(_) => 2,
            CliError::Spectral(_) | CliError::Optimize(_) => 3,
        }
    }
}

/// `catalog:<spec>` or a path to a graph file.
fn load(source: &str) -> Result<MetricGraph, CliError> {
    if let Some(spec) = source.strip_prefix("catalog:") {
        return Ok(spec.parse::<CatalogSpec>()?.build());
    }
    let text = std::fs::read_to_string(source).map_err(|e| CliError::Usage(format!("{source}: {e}")))?;
    Ok(MetricGraph::from_json(&text)?)
}

fn problem(g: &MetricGraph, conditions: &str) -> Result<SpectralProblem, CliError> {
    match conditions {
        "all-standard" => Ok(SpectralProblem::standard(g)),
        "all-dirichlet" => Ok(SpectralProblem::all_dirichlet(g)),
        list => {
            let cs = list
                .split(',')
                .map(|c| match c.trim().to_ascii_lowercase().as_str() {
                    "s" | "standard" => Ok(VertexCondition::Standard),
                    "d" | "dirichlet" => Ok(VertexCondition::Dirichlet),
                    other => Err(CliError::Usage(format!("unknown vertex condition `{other}`"))),
                })
                .collect::<Result<Vec<_>, _>>()?;
            SpectralProblem::new(g.clone(), cs).map_err(|e| CliError::Usage(e.to_string()))
        }
    }
}

fn header(g: &MetricGraph) -> String {
    format!("# beta = {}, leaves = {}, length = {}\n", g.betti(), g.leaves().len(), g.total_length())
}

fn spectrum(graph: &str, conditions: &str, count: usize) -> Result<String, CliError> {
    let g = load(graph)?;
    let p = problem(&g, conditions)?;
    let s = eigenvalues(&p, count)?;
    let mut out = header(&g);
    out.push_str("index,eigenvalue,multiplicity\n");
    for (i, (l, m)) in s.eigenvalues.iter().zip(&s.multiplicities).enumerate() {
        writeln!(out, "{},{},{}", i + 1, l, m).unwrap();
    }
    Ok(out)
}

fn energy(graph: &str, k: usize, kind: EnergyKind, a: &SearchArgs, allow_large: bool, csv: bool) -> Result<String, CliError> {
    let g = load(graph)?;
    let opts = SearchOptions {
        mesh: a.mesh,
        refine: a.refine,
        rigid_only: a.rigid,
        max_candidates: a.max_candidates,
        allow_large,
    };
    let est = minimize_energy(&g, k, kind, &opts)?;
    if csv {
        return Ok(est.witness.to_csv());
    }
    let mut out = header(&g);
    writeln!(out, "energy {kind}_{k} = {}", est.value).unwrap();
    writeln!(out, "mesh value = {} (M = {}, refined = {})", est.mesh_value, est.mesh, est.refined).unwrap();
    writeln!(out, "structures = {}, candidates = {}", est.structures, est.candidates).unwrap();
    writeln!(out, "witness rank = {}, rigid = {}", est.witness.rank(), est.witness.is_rigid()).unwrap();
    out.push_str(&est.witness.describe());
    Ok(out)
}

fn nodal(graph: &str, index: usize, conditions: &str) -> Result<String, CliError> {
    let g = load(graph)?;
    let p = problem(&g, conditions)?;
    let nu = nodal_domains(&p, index)?;
    let xi = neumann_domains(&p, index)?;
    let generic = nu.generic && xi.generic;
    let (beta, v1) = (g.betti() as i64, g.leaves().len() as i64);
    let diff = nu.count as i64 - xi.count as i64;
    let mut out = header(&g);
    writeln!(out, "index = {index}, nu = {}, xi = {}, nu - xi = {diff}", nu.count, xi.count).unwrap();
    writeln!(out, "generic = {generic}").unwrap();
    if generic {
        let ok = 1 - beta <= diff && diff <= beta + v1 - 1;
        writeln!(out, "bracket {} <= {diff} <= {}: {}", 1 - beta, beta + v1 - 1, if ok { "pass" } else { "FAIL" }).unwrap();
    } else {
        out.push_str("bracket check skipped: eigenfunction is not generic\n");
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<(String, u8), CliError> {
    match cli.command {
        Command::Spectrum { graph, conditions, count } => Ok((spectrum(&graph, &conditions, count)?, 0)),
        Command::Energy { graph, k, kind, search, allow_large, csv } => {
            Ok((energy(&graph, k, kind, &search, allow_large, csv)?, 0))
        }
        Command::Verify { graph, kmax, mesh, refine, tol, rigid, max_candidates, bounds_only, format } => {
            if kmax == 0 {
                return Err(CliError::Usage("kmax must be at least 1".into()));
            }
            let g = load(&graph)?;
            let report = if bounds_only {
                bound_table(&g, kmax)?
            } else {
                let opts = InterlacingOptions { meshes: mesh, tol, refine, max_candidates, rigid };
                verify_interlacing(&g, kmax, &opts)?
            };
            let text = match format {
                Format::Markdown => report.to_markdown(),
                Format::Csv => report.to_csv(),
                Format::Json => serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
            };
            Ok((text, if report.rigorous_ok() { 0 } else { 1 }))
        }
        Command::Nodal { graph, index, conditions } => Ok((nodal(&graph, index, &conditions)?, 0)),
        Command::Catalog { spec } => {
            let g = spec.strip_prefix("catalog:").unwrap_or(&spec).parse::<CatalogSpec>()?.build();
            Ok((g.to_json() + "\n", 0))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok((text, code)) => {
            print!("{text}");
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
