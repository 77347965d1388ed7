use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use viralcond::generate::generate_detailed;
use viralcond::graph::write_edge_list;
use viralcond::report::{format_trimmed, table1, write_reports_csv, write_table1, write_table2, Table2Row};
use viralcond::{
    analyze, compare_networks, load_edge_list, Error, Graph, NetworkSpec, SolverOptions, SteadyStateSolver,
};

#[derive(Parser)]
#[command(name = "viralcond", version, about = "Viral conductance of undirected networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spectral radius, numerical conductance and heuristics of one network.
    Compute(ComputeArgs),
    /// Sampled infection curve y(s) on [0, rho].
    Curve(CurveArgs),
    /// Write a generated network as an edge list.
    Generate(GenerateArgs),
    /// Closed form against heuristic for six complete bipartite graphs.
    Table1(Table1Args),
    /// Conductance of the realistic-network set.
    Table2(Table2Args),
    /// Infection curves of two networks on a common grid.
    Compare(CompareArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Edge-list file, one `u v` pair per line.
    #[arg(long, value_name = "PATH")]
    graph: Option<PathBuf>,
    /// Generator, e.g. `ring:1000`, `grid2d(30,30)`, `er:1000,2009`.
    #[arg(long = "gen", value_name = "FAMILY:PARAMS")]
    generator: Option<String>,
}

#[derive(Args)]
struct Solver {
    /// Grid points on [0, rho], endpoints included.
    #[arg(long, default_value_t = 101, value_parser = clap::value_parser!(u64).range(3..))]
    points: u64,
    /// Fixed-point tolerance (max componentwise change).
    #[arg(long, default_value_t = 1e-10, allow_negative_numbers = true)]
    tol: f64,
    /// Sweep cap per grid point.
    #[arg(long = "max-iter", default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    max_iter: u64,
    /// Seed for random generators.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct Output {
    /// Output file; standard output when absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Args)]
struct ComputeArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    solver: Solver,
    #[command(flatten)]
    output: Output,
    /// Also write the sampled curve as CSV.
    #[arg(long, value_name = "PATH")]
    curve: Option<PathBuf>,
}

#[derive(Args)]
struct CurveArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    solver: Solver,
    /// Output file; standard output when absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long = "gen", value_name = "FAMILY:PARAMS")]
    generator: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Table1Args {
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct Table2Args {
    /// Directory holding edge lists for the non-generated rows
    /// (abilene, scale-free, hot, stanley-ring, stanley-mesh; `.edges` or `.txt`).
    #[arg(long, value_name = "DIR")]
    topologies: Option<PathBuf>,
    /// Number of seeds for random rows, starting at --seed (default 0).
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    seeds: u64,
    #[command(flatten)]
    solver: Solver,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
#[group(id = "source_a", required = true, multiple = false)]
struct SourceA {
    #[arg(id = "a_graph", long = "a-graph", value_name = "PATH")]
    graph: Option<PathBuf>,
    #[arg(id = "a_gen", long = "a-gen", value_name = "FAMILY:PARAMS")]
    generator: Option<String>,
}

#[derive(Args)]
#[group(id = "source_b", required = true, multiple = false)]
struct SourceB {
    #[arg(id = "b_graph", long = "b-graph", value_name = "PATH")]
    graph: Option<PathBuf>,
    #[arg(id = "b_gen", long = "b-gen", value_name = "FAMILY:PARAMS")]
    generator: Option<String>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    a: SourceA,
    #[command(flatten)]
    b: SourceB,
    #[command(flatten)]
    solver: Solver,
    #[command(flatten)]
    output: Output,
    /// Also write the dual-curve CSV.
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
}

/// An error together with the input it concerns.
struct Failure {
    input: String,
    error: Error,
}

type Outcome<T> = std::result::Result<T, Failure>;

trait Context<T> {
    fn about(self, input: impl AsRef<str>) -> Outcome<T>;
}

impl<T, E: Into<Error>> Context<T> for std::result::Result<T, E> {
    fn about(self, input: impl AsRef<str>) -> Outcome<T> {
        self.map_err(|e| Failure {
            input: input.as_ref().to_owned(),
            error: e.into(),
        })
    }
}

fn exit_code(error: &Error) -> u8 {
    match error {
        Error::Io(_) | Error::Csv(_) => 3,
        Error::Parse { .. } => 4,
        Error::Validation(_) | Error::IsolatedNode { .. } | Error::OutOfRange { .. } => 5,
        Error::Disconnected { .. } => 6,
        Error::Generation(_) => 7,
        Error::NonConvergence { .. } => 8,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Compute(args) => compute(args),
        Command::Curve(args) => curve(args),
        Command::Generate(args) => generate_cmd(args),
        Command::Table1(args) => table1_cmd(args),
        Command::Table2(args) => table2_cmd(args),
        Command::Compare(args) => compare(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { input, error }) => {
            eprintln!("error: {input}: {error}");
            ExitCode::from(exit_code(&error))
        }
    }
}

impl Solver {
    fn options(&self) -> Outcome<SolverOptions> {
        let options = SolverOptions {
            tolerance: self.tol,
            iteration_cap: self.max_iter as usize,
        };
        options.validate().about("--tol")?;
        Ok(options)
    }

    fn grid_points(&self) -> usize {
        self.points as usize
    }
}

/// A loaded network, the name it is reported under and the input it came from.
struct Network {
    name: String,
    input: String,
    graph: Graph,
}

fn load_file(path: &Path) -> Outcome<Network> {
    let shown = path.display().to_string();
    let file = File::open(path).about(&shown)?;
    let graph = load_edge_list(BufReader::new(file)).about(&shown)?;
    let name = path
        .file_stem()
        .map_or_else(|| shown.clone(), |s| s.to_string_lossy().into_owned());
    Ok(Network {
        name,
        input: shown,
        graph,
    })
}

fn load_generated(text: &str, seed: Option<u64>) -> Outcome<Network> {
    let input = format!("--gen {text}");
    let spec = NetworkSpec::parse(text, seed).about(&input)?;
    let generated = generate_detailed(&spec).about(&input)?;
    Ok(Network {
        name: spec.to_string(),
        input,
        graph: generated.graph,
    })
}

fn load(graph: &Option<PathBuf>, generator: &Option<String>, seed: Option<u64>) -> Outcome<Network> {
    match (graph, generator) {
        (Some(path), _) => load_file(path),
        (None, Some(text)) => load_generated(text, seed),
        // clap enforces exactly one source
        (None, None) => unreachable!("no graph source"),
    }
}

fn open_out(out: &Option<PathBuf>) -> Outcome<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path).about(path.display().to_string())?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn out_name(out: &Option<PathBuf>) -> String {
    out.as_ref()
        .map_or_else(|| "<stdout>".to_owned(), |p| p.display().to_string())
}

fn warn_non_converged(name: &str, missed: usize, points: usize) {
    if missed > 0 {
        eprintln!("warning: {name}: {missed} of {points} curve samples hit the iteration cap; V may be inaccurate");
    }
}

fn compute(args: ComputeArgs) -> Outcome<()> {
    let options = args.solver.options()?;
    let net = load(&args.source.graph, &args.source.generator, args.solver.seed)?;
    let analysis = analyze(&net.name, &net.graph, args.solver.grid_points(), options).about(&net.input)?;
    let report = &analysis.report;
    warn_non_converged(&net.name, report.non_converged, args.solver.grid_points());

    let target = out_name(&args.output.out);
    let mut out = open_out(&args.output.out)?;
    match args.output.format {
        Format::Text => out.write_all(report.to_text().as_bytes()).about(&target)?,
        Format::Csv => write_reports_csv(std::slice::from_ref(report), &mut out).about(&target)?,
    }
    out.flush().about(&target)?;

    if let Some(path) = &args.curve {
        let shown = path.display().to_string();
        let file = File::create(path).about(&shown)?;
        analysis.curve.write_csv(BufWriter::new(file)).about(&shown)?;
    }
    Ok(())
}

fn curve(args: CurveArgs) -> Outcome<()> {
    let options = args.solver.options()?;
    let net = load(&args.source.graph, &args.source.generator, args.solver.seed)?;
    let solver = SteadyStateSolver::new(&net.graph, options).about(&net.input)?;
    let curve = solver.sample_curve(args.solver.grid_points()).about(&net.input)?;
    warn_non_converged(&net.name, curve.non_converged(), curve.grid_points());

    let target = out_name(&args.out);
    let mut out = open_out(&args.out)?;
    match args.format {
        Format::Csv => curve.write_csv(&mut out).about(&target)?,
        Format::Text => {
            let mut text = format!("# {} rho={} threshold={}\n", net.name, curve.rho(), 1.0 / curve.rho());
            for p in curve.samples() {
                text.push_str(&format!("{:<24} {:<24} {}\n", p.s, p.y, p.converged));
            }
            out.write_all(text.as_bytes()).about(&target)?;
        }
    }
    out.flush().about(&target)
}

fn generate_cmd(args: GenerateArgs) -> Outcome<()> {
    let net = load_generated(&args.generator, args.seed)?;
    let target = out_name(&args.out);
    let mut out = open_out(&args.out)?;
    write_edge_list(&net.graph, &mut out).about(&target)?;
    out.flush().about(&target)
}

fn table1_cmd(args: Table1Args) -> Outcome<()> {
    let target = out_name(&args.out);
    let mut out = open_out(&args.out)?;
    match args.format {
        Format::Csv => write_table1(&mut out).about(&target)?,
        Format::Text => {
            let mut text = format!("{:>4} {:>4} {:>10} {:>10} {:>9}\n", "M", "N", "V", "V_H", "rel_error");
            for row in table1().about("table1")? {
                text.push_str(&format!(
                    "{:>4} {:>4} {:>10.2} {:>10.2} {:>8.2}%\n",
                    row.m,
                    row.n,
                    row.v,
                    row.v_h,
                    100.0 * row.rel_error
                ));
            }
            out.write_all(text.as_bytes()).about(&target)?;
        }
    }
    out.flush().about(&target)
}

/// Row name and file slug of the networks that are read from disk.
const FILE_ROWS: [(&str, &str); 5] = [
    ("Abilene", "abilene"),
    ("Scale free", "scale-free"),
    ("HOT", "hot"),
    ("Stanley Ring", "stanley-ring"),
    ("Stanley Mesh", "stanley-mesh"),
];

fn topology_file(dir: &Option<PathBuf>, slug: &str) -> Option<PathBuf> {
    let dir = dir.as_ref()?;
    ["edges", "txt"]
        .iter()
        .map(|ext| dir.join(format!("{slug}.{ext}")))
        .find(|p| p.is_file())
}

fn table2_cmd(args: Table2Args) -> Outcome<()> {
    let options = args.solver.options()?;
    let points = args.solver.grid_points();
    if let Some(dir) = &args.topologies {
        if !dir.is_dir() {
            let missing = io::Error::new(io::ErrorKind::NotFound, "not a directory");
            return Err(missing).about(dir.display().to_string());
        }
    }

    let file_row = |name: &str, slug: &str| -> Outcome<Table2Row> {
        match topology_file(&args.topologies, slug) {
            None => Ok(Table2Row::skipped(name, "topology file required")),
            Some(path) => {
                let net = load_file(&path)?;
                let a = analyze(name, &net.graph, points, options).about(path.display().to_string())?;
                warn_non_converged(name, a.report.non_converged, points);
                Ok(Table2Row::from_reports(name, &[a.report]))
            }
        }
    };
    let generated_row = |name: &str, spec: NetworkSpec, seeds: &[u64]| -> Outcome<Table2Row> {
        let reports = seeds
            .par_iter()
            .map(|&seed| {
                let spec = spec.with_seed(seed);
                let input = format!("{spec} seed {seed}");
                let g = generate_detailed(&spec).about(&input)?.graph;
                let a = analyze(name, &g, points, options).about(&input)?;
                warn_non_converged(&input, a.report.non_converged, points);
                Ok(a.report)
            })
            .collect::<Outcome<Vec<_>>>()?;
        Ok(Table2Row::from_reports(name, &reports))
    };

    let base = args.solver.seed.unwrap_or(0);
    let seeds: Vec<u64> = (0..args.seeds).map(|i| base.wrapping_add(i)).collect();
    let er = NetworkSpec::ErdosRenyi {
        nodes: 1000,
        links: 2009,
        seed: base,
    };
    let rows = vec![
        file_row(FILE_ROWS[0].0, FILE_ROWS[0].1)?,
        file_row(FILE_ROWS[1].0, FILE_ROWS[1].1)?,
        file_row(FILE_ROWS[2].0, FILE_ROWS[2].1)?,
        generated_row("Erdős-Rényi", er, &seeds)?,
        file_row(FILE_ROWS[3].0, FILE_ROWS[3].1)?,
        generated_row("Ring", NetworkSpec::Ring { nodes: 1000 }, &[base])?,
        file_row(FILE_ROWS[4].0, FILE_ROWS[4].1)?,
        generated_row("2D-lattice", NetworkSpec::Grid2d { rows: 30, cols: 30 }, &[base])?,
    ];

    let target = out_name(&args.out);
    let mut out = open_out(&args.out)?;
    match args.format {
        Format::Csv => write_table2(&rows, &mut out).about(&target)?,
        Format::Text => out.write_all(table2_text(&rows).as_bytes()).about(&target)?,
    }
    out.flush().about(&target)
}

fn table2_text(rows: &[Table2Row]) -> String {
    let mut text = format!(
        "{:<14} {:>7} {:>7} {:>6} {:>6} {:>7} {:>7} {:>8} {:>7}\n",
        "name", "N", "L", "<d>", "tau_c", "V", "V_H", "rel", "seeds"
    );
    for row in rows {
        match row {
            Table2Row::Computed {
                name,
                nodes,
                links,
                mean_degree,
                threshold,
                v,
                v_h,
                seeds,
                ..
            } => {
                text.push_str(&format!(
                    "{:<14} {:>7.0} {:>7.0} {:>6.2} {:>6.2} {:>7.2} {:>7.2} {:>8} {:>7}\n",
                    name,
                    nodes,
                    links,
                    mean_degree,
                    threshold,
                    v,
                    v_h,
                    format!(
                        "{}%",
                        format_trimmed(100.0 * row.relative_error().unwrap_or(f64::NAN), 0)
                    ),
                    seeds
                ));
            }
            Table2Row::Skipped { name, reason } => text.push_str(&format!("{name:<14} skipped: {reason}\n")),
        }
    }
    text
}

fn compare(args: CompareArgs) -> Outcome<()> {
    let options = args.solver.options()?;
    let a = load(&args.a.graph, &args.a.generator, args.solver.seed)?;
    let b = load(&args.b.graph, &args.b.generator, args.solver.seed)?;
    let pair = format!("{} vs {}", a.input, b.input);
    let cmp = compare_networks(&a.graph, &b.graph, args.solver.grid_points(), options)
        .about(&pair)?
        .with_names(&a.name, &b.name);
    for (name, curve) in [(&a.name, &cmp.first_curve), (&b.name, &cmp.second_curve)] {
        warn_non_converged(name, curve.iter().filter(|p| !p.converged).count(), curve.len());
    }

    let target = out_name(&args.output.out);
    let mut out = open_out(&args.output.out)?;
    match args.output.format {
        Format::Text => out.write_all(cmp.to_text().as_bytes()).about(&target)?,
        Format::Csv => cmp.write_csv(&mut out).about(&target)?,
    }
    out.flush().about(&target)?;

    if let Some(path) = &args.csv {
        let shown = path.display().to_string();
        let file = File::create(path).about(&shown)?;
        cmp.write_csv(BufWriter::new(file)).about(&shown)?;
    }
    Ok(())
}
