use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use zerotemp::disorder::{sample_couplings, Coupling, Descriptor};
use zerotemp::exec::{set_jobs, Exec};
use zerotemp::experiments::{list_experiments, run_experiment, ExperimentConfig};
use zerotemp::geometry::{count_boundary_path_edges, mt_estimate, ForestView, MassFn};
use zerotemp::graph::{read_graph, write_graph, write_window, Boundary, Graph, LoopCatalog, PlanarWindow};
use zerotemp::groundstate::{enumerate_ground_states, unsatisfied_subgraph};

#[derive(Parser)]
#[command(name = "zerotemp", version, about = "Zero-temperature spin dynamics experiments")]
struct Cli {
    /// Master seed (overrides run.seed).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for replica execution; 1 runs sequentially.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output directory for result files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named experiment.
    Run(RunArgs),
    /// List experiments with what they check and their cost.
    List {
        #[arg(long)]
        json: bool,
    },
    /// Build a graph from a recipe and print it in text form.
    Graph {
        /// path:N, cycle:N, complete:N, tree:DEGREE:DEPTH, clique-pair:N,
        /// window:W:H[:free|fixed+|fixed-|periodic], or cylinder:LOW:HIGH:<slice recipe>
        recipe: String,
    },
    /// Exhaustive ground states of a graph.
    Gsp {
        /// Graph recipe, or @FILE for a graph in text form.
        graph: String,
        /// Coupling law, e.g. gaussian, uniform:1, constant.
        #[arg(long, default_value = "gaussian")]
        law: String,
        /// Read couplings from a file instead of sampling them.
        #[arg(long)]
        couplings: Option<PathBuf>,
    },
    /// Enumerate dual loops of a free window.
    Loops {
        width: usize,
        height: usize,
        #[arg(long, default_value_t = 8)]
        max_length: usize,
        /// Print the window with its loops in text form instead of a type table.
        #[arg(long)]
        text: bool,
    },
    /// Spanning forest tools.
    #[command(subcommand)]
    Geometry(GeometryCommand),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment name; may be omitted when the config names one.
    name: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Extra settings as key=value.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

#[derive(Subcommand)]
enum GeometryCommand {
    /// Sample a directed forest (each vertex points up with probability p, else right).
    Forest {
        width: usize,
        height: usize,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
    },
    /// Mass sent and received for a mass function of tree distance.
    Mt {
        /// Forest in text form.
        forest: PathBuf,
        /// eq:K or le:K
        #[arg(long, default_value = "eq:1")]
        mass: String,
        #[arg(long, default_value_t = 8)]
        margin: usize,
    },
    /// Boundary-path edge counts for growing boxes at the forest centre.
    En {
        forest: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "4,8,16")]
        sizes: Vec<usize>,
    },
}

fn parse_boundary(s: &str) -> Result<Boundary> {
    Ok(match s {
        "free" => Boundary::Free,
        "fixed+" => Boundary::Fixed(1),
        "fixed-" => Boundary::Fixed(-1),
        "periodic" => Boundary::Periodic,
        _ => bail!("unknown boundary `{s}`"),
    })
}

fn build_graph(recipe: &str) -> Result<Graph> {
    if let Some(file) = recipe.strip_prefix('@') {
        let text = fs::read_to_string(file).with_context(|| format!("reading {file}"))?;
        return Ok(read_graph(&text)?);
    }
    let parts: Vec<&str> = recipe.splitn(4, ':').collect();
    let arg = |i: usize| -> Result<usize> {
        let s = parts.get(i).with_context(|| format!("recipe `{recipe}` is missing a parameter"))?;
        s.parse().with_context(|| format!("bad number `{s}` in `{recipe}`"))
    };
    Ok(match parts[0] {
        "path" => Graph::path(arg(1)?),
        "cycle" => Graph::cycle(arg(1)?)?,
        "complete" => Graph::complete(arg(1)?),
        "tree" => Graph::regular_tree(arg(1)?, arg(2)? as u32)?,
        "clique-pair" => Graph::shared_clique_pair(arg(1)?)?,
        "window" => {
            let b = parse_boundary(parts.get(3).copied().unwrap_or("free"))?;
            PlanarWindow::new(arg(1)?, arg(2)?, b)?.graph().clone()
        }
        "cylinder" => {
            let lo: i64 = parts.get(1).context("cylinder needs LOW")?.parse()?;
            let hi: i64 = parts.get(2).context("cylinder needs HIGH")?.parse()?;
            let slice = build_graph(parts.get(3).context("cylinder needs a slice recipe")?)?;
            Graph::cylinder(&slice, lo, hi)?
        }
        other => bail!("unknown graph recipe `{other}`"),
    })
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json values serialize"));
}

fn run(cli: &Cli, args: &RunArgs) -> Result<bool> {
    let mut config = match &args.config {
        Some(p) => ExperimentConfig::parse(&fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?)?,
        None => ExperimentConfig::default(),
    };
    if let Some(name) = &args.name {
        config.set("experiment.name", name);
    }
    for kv in &args.sets {
        let (k, v) = kv.split_once('=').with_context(|| format!("`{kv}` is not key=value"))?;
        config.set(k.trim(), v.trim());
    }
    if let Some(s) = cli.seed {
        config.set("run.seed", s);
    }
    if let Some(j) = cli.jobs {
        config.set("run.jobs", j);
    }
    if let Some(o) = &cli.out {
        config.set("run.out", o.display());
    }
    let jobs: usize = config.get("run.jobs", 0)?;
    let exec = if jobs == 1 { Exec::Sequential } else { Exec::Parallel };
    if jobs > 1 {
        set_jobs(jobs);
    }
    let bundle = run_experiment(&config, exec)?;
    if let Some(dir) = config.raw("run.out") {
        let dir = PathBuf::from(dir);
        bundle.write(&dir)?;
        fs::write(dir.join("config.txt"), config.to_text())?;
    }
    print!("{}", bundle.summary_text());
    Ok(bundle.passed)
}

fn geometry(cmd: &GeometryCommand, seed: u64) -> Result<()> {
    match cmd {
        GeometryCommand::Forest { width, height, p } => {
            print!("{}", ForestView::sample_directed(*width, *height, *p, seed)?.to_text());
        }
        GeometryCommand::Mt { forest, mass, margin } => {
            let f = ForestView::from_text(&fs::read_to_string(forest)?)?;
            let mass: MassFn = mass.parse()?;
            let e = mt_estimate(&f, mass, *margin)?;
            print_json(&json!({ "lhs": e.lhs, "rhs": e.rhs, "core_size": e.core_size }));
        }
        GeometryCommand::En { forest, sizes } => {
            let f = ForestView::from_text(&fs::read_to_string(forest)?)?;
            let centre = (f.width() / 2, f.height() / 2);
            println!("n,count,value");
            for &n in sizes {
                let c = count_boundary_path_edges(&f, centre, n)?;
                println!("{n},{c},{}", c as f64 / n as f64);
            }
        }
    }
    Ok(())
}

fn main_inner(cli: &Cli) -> Result<bool> {
    let seed = cli.seed.unwrap_or(1);
    match &cli.command {
        Command::Run(args) => return run(cli, args),
        Command::List { json } => {
            let exps = list_experiments();
            if *json {
                let rows: Vec<_> = exps.iter().map(|e| json!({ "name": e.name, "claim": e.claim, "budget": e.budget, "keys": e.keys })).collect();
                print_json(&json!(rows));
            } else {
                for e in exps {
                    println!("{:<22} {:<6} {}", e.name, e.budget, e.claim);
                }
            }
        }
        Command::Graph { recipe } => print!("{}", write_graph(&build_graph(recipe)?)),
        Command::Gsp { graph, law, couplings } => {
            let g = build_graph(graph)?;
            let c = match couplings {
                Some(p) => Coupling::read(&g, &fs::read_to_string(p)?)?,
                None => sample_couplings(&g, law.parse::<Descriptor>()?, seed)?,
            };
            let report = enumerate_ground_states(&g, &c, Exec::Parallel)?;
            let mut v = report.to_json();
            if let Some(rest) = graph.strip_prefix("window:") {
                let p: Vec<&str> = rest.split(':').collect();
                if p.len() == 2 || p.get(2) == Some(&"free") {
                    let w = PlanarWindow::new(p[0].parse()?, p[1].parse()?, Boundary::Free)?;
                    v["unsatisfied_dual_forest"] = json!(unsatisfied_subgraph(&w, &c, &report.minimizers[0]).forest);
                }
            }
            print_json(&v);
        }
        Command::Loops { width, height, max_length, text } => {
            let w = PlanarWindow::new(*width, *height, Boundary::Free)?;
            let cat = LoopCatalog::build(&w, *max_length)?;
            if *text {
                print!("{}", write_window(&w, cat.loops()));
            } else {
                println!("type,length,area,span,orientations,loops_in_window");
                for (t, ty) in cat.types().iter().enumerate() {
                    let count = (0..cat.len()).filter(|&i| cat.type_of(i) == t).count();
                    println!("{},{},{},{},{},{count}", ty.id(), ty.length, ty.area(), ty.span, ty.orientations);
                }
            }
        }
        Command::Geometry(cmd) => geometry(cmd, seed)?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
