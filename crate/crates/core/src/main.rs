use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use knotscan::image::{
    dataset_gen, graph_to_pd, perceive, render_pd, DatasetOptions, DetectOptions, RasterImage, RenderOptions, Split,
    StrokeStyle,
};
use knotscan::jones::jones;
use knotscan::pd::parse_pd;
use knotscan::pipeline::identify_image;
use knotscan::random::{enumerate_assignments, sample_assignments, Shadow};
use knotscan::table::{builtin_table, load_table, unique_value_stats, InvariantIndex, KnotRecord, StatsClass};

const TABLE_ENV: &str = "KNOT_TABLE";

#[derive(Parser)]
#[command(name = "knotscan", version, about = "Knot diagrams from images to Jones polynomials and table labels")]
struct Cli {
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full image → diagram → Jones → table pipeline.
    Identify {
        image: PathBuf,
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        c0: usize,
        /// Expected under-strand gap in pixels.
        #[arg(long, default_value_t = 6.0)]
        gap: f64,
    },
    /// Jones polynomial of a PD code.
    Jones {
        pd: Option<String>,
        #[arg(long, conflicts_with = "pd")]
        file: Option<PathBuf>,
    },
    /// Percentage of knots with a Jones value unique among knots up to n crossings.
    Stats {
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long)]
        n: usize,
        /// Restrict to knots with exactly n crossings.
        #[arg(long)]
        exactly: bool,
    },
    /// Knot types produced by random crossing assignments on a shadow.
    Random {
        #[arg(long, value_enum)]
        shadow: ShadowKind,
        #[arg(long)]
        k: usize,
        /// Number of random assignments; 0 enumerates all of them.
        #[arg(long, default_value_t = 0)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        c0: usize,
    },
    /// Draw a PD code as a broken-understrand PNG.
    Render {
        #[arg(long)]
        pd: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 512)]
        size: usize,
        #[arg(long, default_value_t = 3.0)]
        stroke: f64,
        #[arg(long, default_value_t = 6.0)]
        gap: f64,
        #[arg(long)]
        seed: u64,
        /// Draw both strands through every crossing.
        #[arg(long)]
        solid: bool,
    },
    /// Generate an augmented, class-balanced image corpus with a manifest.
    Dataset {
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 0.2)]
        test_ratio: f64,
        #[arg(long, default_value_t = 3)]
        min_crossings: usize,
        #[arg(long, default_value_t = 10)]
        max_crossings: usize,
        #[arg(long, default_value_t = 10.0)]
        max_tilt: f64,
    },
    /// Reconstruct a PD code from an image.
    Pd {
        image: PathBuf,
        #[arg(long, default_value_t = 6.0)]
        gap: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ShadowKind {
    Twist,
}

enum Failure {
    /// Bad arguments, unreadable input or unparsable text: exit 1.
    Usage(String),
    /// A pipeline stage failed: exit 2.
    Stage(String),
}

type Outcome = Result<(), Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Stage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn emit_json<T: Serialize>(value: &T) -> Outcome {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value).map_err(usage)?;
    writeln!(out).map_err(usage)
}

/// The environment variable wins over `--table`; the shipped table is the
/// fallback.
fn records(flag: Option<&Path>) -> Result<Vec<KnotRecord>, Failure> {
    let path = std::env::var_os(TABLE_ENV).map(PathBuf::from).or_else(|| flag.map(Path::to_path_buf));
    match path {
        Some(p) => load_table(&p).map_err(|e| usage(format!("{}: {e}", p.display()))),
        None => builtin_table().map_err(usage),
    }
}

fn read_image(path: &Path) -> Result<RasterImage, Failure> {
    RasterImage::from_png(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Outcome {
    let json = cli.json;
    match cli.command {
        Command::Identify { image, table, c0, gap } => {
            let img = read_image(&image)?;
            let index = InvariantIndex::build(&records(table.as_deref())?, c0);
            let report = identify_image(&img, &image.display().to_string(), &index, &DetectOptions { gap });
            if json {
                emit_json(&report)?;
            } else {
                for c in &report.candidates {
                    println!(
                        "{} ({})",
                        c.name,
                        serde_json::to_value(c.chirality).map_err(usage)?.as_str().unwrap_or("")
                    );
                }
                if let Some(j) = &report.jones {
                    println!("jones: {j}");
                }
            }
            match report.failed_stage {
                None => Ok(()),
                Some(stage) => {
                    let s = &report.stages;
                    let detail = [&s.perception, &s.repair, &s.invariant, &s.search]
                        .iter()
                        .find_map(|o| o.detail.clone())
                        .unwrap_or_default();
                    Err(Failure::Stage(format!("{stage} stage: {detail}")))
                }
            }
        }
        Command::Jones { pd, file } => {
            let text = match (pd, file) {
                (Some(t), None) => t,
                (None, Some(f)) => std::fs::read_to_string(&f).map_err(|e| usage(format!("{}: {e}", f.display())))?,
                _ => return Err(usage("give a PD code or --file")),
            };
            let pd = parse_pd(text.trim()).map_err(usage)?;
            let value = jones(&pd).map_err(usage)?;
            if json {
                emit_json(&serde_json::json!({ "pd": pd.to_string(), "jones": value.to_string() }))
            } else {
                println!("{value}");
                Ok(())
            }
        }
        Command::Stats { table, n, exactly } => {
            let class = if exactly { StatsClass::Exactly } else { StatsClass::UpTo };
            let percent = unique_value_stats(&records(table.as_deref())?, n, class).map_err(usage)?;
            if json {
                let class = if exactly { "exactly" } else { "up-to" };
                emit_json(&serde_json::json!({ "n": n, "class": class, "percent": percent }))
            } else {
                println!("{percent:.1}");
                Ok(())
            }
        }
        Command::Random { shadow, k, samples, seed, table, c0 } => {
            let shadow = match shadow {
                ShadowKind::Twist => Shadow::twist(k).map_err(usage)?,
            };
            let index = InvariantIndex::build(&records(table.as_deref())?, c0);
            let dist = if samples == 0 {
                enumerate_assignments(&shadow, &index)
            } else {
                sample_assignments(&shadow, samples, seed, &index)
            }
            .map_err(usage)?;
            if json {
                emit_json(&dist)
            } else {
                for l in &dist.labels {
                    println!("{}\t{}\t{:.6}", l.label, l.count, l.fraction);
                }
                Ok(())
            }
        }
        Command::Render { pd, out, size, stroke, gap, seed, solid } => {
            let pd = parse_pd(pd.trim()).map_err(usage)?;
            let style = if solid { StrokeStyle::Solid } else { StrokeStyle::Broken };
            let img = render_pd(&pd, &RenderOptions { size, stroke, gap, seed, style })
                .map_err(|e| Failure::Stage(format!("render: {e}")))?;
            img.to_png(&out).map_err(|e| usage(format!("{}: {e}", out.display())))?;
            if json {
                emit_json(&serde_json::json!({ "out": out.display().to_string(), "size": size, "crossings": pd.n() }))?;
            }
            Ok(())
        }
        Command::Dataset { table, count, out, seed, test_ratio, min_crossings, max_crossings, max_tilt } => {
            let opts = DatasetOptions {
                count,
                seed,
                test_ratio,
                crossings: min_crossings..=max_crossings,
                render: RenderOptions::default(),
                max_tilt,
            };
            let rows = dataset_gen(&records(table.as_deref())?, &out, &opts).map_err(usage)?;
            let test = rows.iter().filter(|r| r.split == Split::Test).count();
            if json {
                emit_json(&serde_json::json!({
                    "out": out.display().to_string(),
                    "count": rows.len(),
                    "test": test,
                    "manifest": out.join(knotscan::image::MANIFEST_FILE).display().to_string(),
                }))
            } else {
                println!("{} images ({} test) in {}", rows.len(), test, out.display());
                Ok(())
            }
        }
        Command::Pd { image, gap } => {
            let img = read_image(&image)?;
            let (_, graph) =
                perceive(&img, &DetectOptions { gap }).map_err(|e| Failure::Stage(format!("perception stage: {e}")))?;
            let pd = graph_to_pd(&graph).map_err(|e| Failure::Stage(format!("perception stage: {e}")))?;
            if json {
                emit_json(&serde_json::json!({
                    "pd": pd.to_string(),
                    "crossings": pd.n(),
                    "diagnostics": graph.diagnostics,
                }))
            } else {
                println!("{pd}");
                Ok(())
            }
        }
    }
}
