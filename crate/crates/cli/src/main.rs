//! Command-line front end: generate, verify, stats and render.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use graphabstract::corpus::CorpusSource;
use graphabstract::dataset::{
    build_task, default_split_table, emit_stats, find_manifests, load_corpus, split_dir,
    verify_dataset, write_atomic, BuildOptions, GraphFile, Split, SplitSpec, Task, MANIFEST_NAME,
};
use graphabstract::layout::{compute_layout, LayoutAlgorithm};
use graphabstract::render::{render_image, RenderSpec, DEFAULT_RESOLUTION};

#[derive(Parser)]
#[command(
    name = "graphabstract",
    version,
    about = "Build and check graph-reasoning benchmark datasets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate graphs, images and manifests.
    Generate(GenerateArgs),
    /// Recompute every label and check files under the output directory.
    Verify(SelectArgs),
    /// Write per-split histograms and summary tables.
    Stats(SelectArgs),
    /// Lay out and render a single graph file.
    Render(RenderArgs),
}

#[derive(Args)]
struct SelectArgs {
    /// Task to process (repeatable); all tasks when omitted.
    #[arg(long = "task")]
    tasks: Vec<Task>,
    /// Split to process (repeatable); all splits when omitted.
    #[arg(long = "split")]
    splits: Vec<Split>,
    /// Output directory.
    #[arg(long, env = "GRAPHABSTRACT_OUT", default_value = "out")]
    out: PathBuf,
    /// Worker threads.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    workers: u16,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    select: SelectArgs,
    #[arg(long, default_value_t = 0)]
    seed: u32,
    /// Comma-separated layouts, or `none`.
    #[arg(long, default_value = "kamada_kawai,forceatlas2,spectral")]
    layouts: String,
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    resolution: u32,
    /// Edge-list files for the base-graph corpus (repeatable).
    #[arg(long = "corpus")]
    corpus: Vec<PathBuf>,
    /// Override the number of graphs in every selected split.
    #[arg(long)]
    count: Option<usize>,
}

#[derive(Args)]
struct RenderArgs {
    /// Graph JSON file.
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value = "kamada_kawai")]
    layout: LayoutAlgorithm,
    /// PNG destination.
    #[arg(long)]
    output: PathBuf,
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    resolution: u32,
    /// Seed for ForceAtlas2 starting positions.
    #[arg(long, default_value_t = 0)]
    seed: u32,
}

fn parse_layouts(s: &str) -> anyhow::Result<Vec<LayoutAlgorithm>> {
    if s.trim() == "none" {
        return Ok(Vec::new());
    }
    let mut layouts = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let layout: LayoutAlgorithm = part.parse()?;
        if !layouts.contains(&layout) {
            layouts.push(layout);
        }
    }
    Ok(layouts)
}

fn selected<T: Copy + PartialEq>(all: &[T], filter: &[T]) -> Vec<T> {
    all.iter()
        .copied()
        .filter(|x| filter.is_empty() || filter.contains(x))
        .collect()
}

fn generate(args: GenerateArgs) -> anyhow::Result<()> {
    let layouts = parse_layouts(&args.layouts)?;
    let options = BuildOptions {
        layouts,
        render: RenderSpec::with_resolution(args.resolution)?,
        workers: usize::from(args.select.workers),
    };
    let seed = u64::from(args.seed);
    let tasks = selected(&Task::ALL, &args.select.tasks);
    let splits = selected(&Split::ALL, &args.select.splits);
    let source = if args.corpus.is_empty() {
        CorpusSource::Synthetic
    } else {
        CorpusSource::EdgeLists(args.corpus.clone())
    };
    let corpus = if tasks.contains(&Task::Symmetry) {
        if args.corpus.is_empty() {
            eprintln!(
                "warning: no --corpus files given; symmetry bases use the synthetic fallback"
            );
        }
        load_corpus(&source, seed)?
    } else {
        Default::default()
    };

    println!(
        "{:<10} {:<14} {:>6} {:>9} {:>9} {:>10} {:>9}",
        "task", "split", "count", "range", "observed", "collisions", "elapsed"
    );
    let started = Instant::now();
    for task in tasks {
        let specs: Vec<SplitSpec> = default_split_table(seed)
            .into_iter()
            .filter(|s| s.task == task)
            .map(|s| SplitSpec {
                count: args.count.unwrap_or(s.count),
                ..s
            })
            .collect();
        let summaries = build_task(&args.select.out, &specs, &splits, &corpus, &options)
            .with_context(|| format!("building task {task}"))?;
        for s in summaries {
            println!(
                "{:<10} {:<14} {:>6} {:>9} {:>9} {:>10} {:>8.1}s",
                s.spec.task.as_str(),
                s.spec.split.as_str(),
                s.spec.count,
                format!("{}-{}", s.spec.node_range.lo, s.spec.node_range.hi),
                format!("{}-{}", s.min_nodes, s.max_nodes),
                s.collisions,
                s.elapsed.as_secs_f64()
            );
            if s.degenerate_layouts > 0 {
                eprintln!(
                    "warning: {}/{}: {} samples have a layout with most nodes coinciding",
                    s.spec.task, s.spec.split, s.degenerate_layouts
                );
            }
        }
    }
    println!("total {:.1}s", started.elapsed().as_secs_f64());
    Ok(())
}

/// Manifests selected by task and split filters. Missing manifests are a
/// usage error.
fn selected_manifests(args: &SelectArgs) -> Result<Vec<PathBuf>, String> {
    let manifests: Vec<PathBuf> = if args.tasks.is_empty() && args.splits.is_empty() {
        find_manifests(&args.out).map_err(|e| e.to_string())?
    } else {
        let mut found = Vec::new();
        for task in selected(&Task::ALL, &args.tasks) {
            for split in selected(&Split::ALL, &args.splits) {
                let path = split_dir(&args.out, task, split).join(MANIFEST_NAME);
                if path.is_file() {
                    found.push(path);
                } else if !args.tasks.is_empty() && !args.splits.is_empty() {
                    return Err(format!("no manifest at {}", path.display()));
                }
            }
        }
        found
    };
    if manifests.is_empty() {
        return Err(format!("no manifests found under {}", args.out.display()));
    }
    Ok(manifests)
}

fn verify(args: SelectArgs) -> ExitCode {
    let manifests = match selected_manifests(&args) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    set_workers(args.workers);
    let mut failed = false;
    for path in manifests {
        match verify_dataset(&path) {
            Ok(report) => {
                println!(
                    "{}: {} checked, {} failed",
                    path.display(),
                    report.checked,
                    report.failures.len()
                );
                for f in &report.failures {
                    println!("  FAIL {}: {}", f.id, f.reasons.join("; "));
                }
                failed |= !report.passed();
            }
            Err(e) => {
                println!("{}: error: {e}", path.display());
                failed = true;
            }
        }
    }
    if failed {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn set_workers(workers: u16) {
    // Only fails if a global pool already exists, which is fine.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(usize::from(workers))
        .build_global();
}

fn stats(args: SelectArgs) -> ExitCode {
    let manifests = match selected_manifests(&args) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    set_workers(args.workers);
    for path in manifests {
        match emit_stats(&path) {
            Ok(s) => println!("{}", s.to_text()),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
        }
    }
    ExitCode::SUCCESS
}

fn render(args: RenderArgs) -> anyhow::Result<()> {
    let file = GraphFile::load(&args.graph)?;
    let graph = file.graph()?;
    let spec = RenderSpec::with_resolution(args.resolution)?;
    let layout = compute_layout(&graph, args.layout, u64::from(args.seed))?;
    let rendered = render_image(&graph, &layout, &spec)?;
    if rendered.degenerate {
        eprintln!("warning: more than half of the nodes share a position");
    }
    write_atomic(&args.output, &rendered.image.encode_png()?)?;
    Ok(())
}

fn report(result: anyhow::Result<()>) -> ExitCode {
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Generate(args) => report(generate(args)),
        Command::Verify(args) => verify(args),
        Command::Stats(args) => stats(args),
        Command::Render(args) => report(render(args)),
    }
}
