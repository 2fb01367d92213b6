use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};
use stickkit::gadget_lab::{self, LabOptions, Status};
use stickkit::geometry::{render_svg, verify_geometry, Geometry, SvgOptions};
use stickkit::graph::{Graph, VertexId};
use stickkit::recognizer::{recognize, GraphClass, SearchOptions, Verdict};
use stickkit::reduce_biphook::build_biphook;
use stickkit::reduce_sat::{
    artifact_from_parts, build_reduction, decode_assignment, normalize_instance, parse_1in3, witness_order, Assignment,
};
use stickkit::VertexOrder;

/// Exit codes.
const OK: u8 = 0;
const NO: u8 = 1;
const EXHAUSTED: u8 = 2;
const USAGE: u8 = 64;
const DATA: u8 = 65;
const IO: u8 = 66;

#[derive(Parser, Debug)]
#[command(name = "stickkit", version, about = "Stick, BipHook and max point-tolerance graph tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide membership and write a witness geometry on yes.
    Recognize {
        #[arg(long, default_value = "stick")]
        class: GraphClass,
        /// Search-node budget.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        budget: Option<u64>,
        #[arg(long, env = "STICKKIT_WORKERS", default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        workers: u64,
        /// Witness geometry JSON (default: input with extension .geom.json).
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also draw the witness as SVG.
        #[arg(long)]
        svg: Option<PathBuf>,
        input: PathBuf,
    },
    /// Compare a geometry with a graph.
    Verify { graph: PathBuf, geometry: PathBuf },
    /// Build reduction graphs: sat2stick or stick2biphook.
    #[command(subcommand)]
    Reduce(Reduce),
    /// Read the assignment recorded by an order of a reduction graph.
    Decode {
        graph: PathBuf,
        registry: PathBuf,
        order: PathBuf,
    },
    /// Draw a geometry as SVG.
    Render {
        geometry: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = 40)]
        scale: u32,
        #[arg(long)]
        no_labels: bool,
    },
    /// Exhaustive gadget checks: handy, forced-cycle, clause, transmission,
    /// four-cycle, cycles, controls or all.
    GadgetCheck {
        target: String,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        budget: Option<u64>,
        #[arg(long, env = "STICKKIT_WORKERS", default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        workers: u64,
        /// Write the JSON summary here instead of stdout.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum Reduce {
    /// Monotone 1-in-3SAT instance to a stick graph.
    Sat2stick {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Registry sidecar (default: output with extension .registry.json).
        #[arg(long)]
        registry: Option<PathBuf>,
        /// Assignment file, or the assignment itself such as "T F F".
        #[arg(long)]
        witness: Option<String>,
        /// Where to write the witness order.
        #[arg(long = "order-out", visible_alias = "o-order", requires = "witness")]
        order_out: Option<PathBuf>,
    },
    /// Stick graph to its BipHook counterpart.
    Stick2biphook {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        registry: Option<PathBuf>,
    },
}

/// Error carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn fail(code: u8) -> impl FnOnce(anyhow::Error) -> Failure {
    move |error| Failure { code, error }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(fail(IO))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(fail(IO))
}

fn data<T, E: Into<anyhow::Error>>(r: Result<T, E>, what: &str) -> Result<T, Failure> {
    r.map_err(|e| Failure {
        code: DATA,
        error: e.into().context(what.to_string()),
    })
}

fn load_graph(path: &Path) -> Result<Graph, Failure> {
    let text = read(path)?;
    data(Graph::parse(&text), &format!("parsing {}", path.display()))
}

fn load_geometry(path: &Path) -> Result<Geometry, Failure> {
    let text = read(path)?;
    data(Geometry::from_json_str(&text), &format!("parsing {}", path.display()))
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

/// Order file: vertex names or ids separated by whitespace.
fn parse_order(text: &str, names: &BTreeMap<String, VertexId>) -> Result<VertexOrder> {
    let seq = text
        .split_whitespace()
        .map(|tok| {
            names
                .get(tok)
                .copied()
                .or_else(|| tok.parse().ok())
                .ok_or_else(|| anyhow!("unknown vertex {tok:?} in order"))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VertexOrder::from_sequence(seq)?)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Recognize {
            class,
            budget,
            workers,
            output,
            svg,
            input,
        } => {
            let g = load_graph(&input)?;
            let opts = SearchOptions {
                budget,
                workers: workers as usize,
                ..Default::default()
            };
            let out = data(recognize(&g, class, &opts), "recognition")?;
            let verdict = match out.verdict {
                Verdict::Yes => "yes",
                Verdict::No => "no",
                Verdict::Exhausted => "exhausted",
            };
            println!("{verdict}");
            eprintln!("nodes {} prunes {} time {} ms", out.stats.nodes, out.stats.prunes, out.stats.elapsed.as_millis());
            if let Some(w) = out.witness {
                let path = output.unwrap_or_else(|| with_suffix(&input, ".geom.json"));
                write(&path, &w.geometry.to_json_string())?;
                let order: Vec<String> = w.order.sequence().iter().map(|&v| g.label(v)).collect();
                println!("order {}", order.join(" "));
                println!("witness {}", path.display());
                if let Some(p) = svg {
                    write(&p, &render_svg(&w.geometry, &SvgOptions::default()))?;
                }
            }
            Ok(match out.verdict {
                Verdict::Yes => OK,
                Verdict::No => NO,
                Verdict::Exhausted => EXHAUSTED,
            })
        }
        Command::Verify { graph, geometry } => {
            let g = load_graph(&graph)?;
            let geom = load_geometry(&geometry)?;
            let check = data(verify_geometry(&geom, &g), "verification")?;
            let show = |pairs: &[(VertexId, VertexId)]| -> String {
                pairs.iter().map(|&(u, v)| format!("{}-{}", g.label(u), g.label(v))).collect::<Vec<_>>().join(" ")
            };
            if check.matches {
                println!("match");
            } else {
                println!("mismatch");
                if !check.missing.is_empty() {
                    println!("missing {}", show(&check.missing));
                }
                if !check.spurious.is_empty() {
                    println!("spurious {}", show(&check.spurious));
                }
            }
            if !check.touchings.is_empty() {
                eprintln!("warning: touching pairs counted as intersections: {}", show(&check.touchings));
            }
            Ok(if check.matches { OK } else { NO })
        }
        Command::Reduce(Reduce::Sat2stick {
            input,
            output,
            registry,
            witness,
            order_out,
        }) => {
            let text = read(&input)?;
            let original = data(parse_1in3(&text), &format!("parsing {}", input.display()))?;
            let inst = if original.is_normalized() {
                original.clone()
            } else {
                eprintln!("note: instance normalized before reduction");
                normalize_instance(&original)
            };
            let art = data(build_reduction(&inst), "reduction")?;
            write(&output, &art.graph.to_text())?;
            let reg_path = registry.unwrap_or_else(|| with_suffix(&output, ".registry.json"));
            write(&reg_path, &art.registry_json())?;
            let counts = serde_json::to_string_pretty(&art.counts).expect("plain data");
            write(&with_suffix(&output, ".counts.json"), &counts)?;
            println!(
                "vertices {} (13 + 7n + 47m = {}), edges {} ({} explicit, {} incidental, bound {})",
                art.counts.vertices,
                art.counts.vertices_formula,
                art.counts.edges,
                art.counts.explicit_edges,
                art.counts.incidental_edges,
                art.counts.edge_bound
            );
            if let Some(w) = witness {
                let text = match fs::read_to_string(&w) {
                    Ok(t) => t,
                    Err(_) => w.clone(),
                };
                let asg = data(Assignment::parse(&text), "parsing the witness assignment")?;
                let asg = if inst.n == original.n {
                    asg
                } else {
                    asg.extend_to(&original)
                        .ok_or_else(|| anyhow!("assignment does not extend to the normalized instance"))
                        .map_err(fail(NO))?
                };
                let order = match witness_order(&art, &asg) {
                    Ok(o) => o,
                    Err(e) => {
                        println!("no witness: {e}");
                        return Ok(NO);
                    }
                };
                let names: Vec<String> = order.sequence().iter().map(|&v| art.graph.label(v)).collect();
                let path = order_out.unwrap_or_else(|| with_suffix(&output, ".order.txt"));
                write(&path, &(names.join("\n") + "\n"))?;
                println!("witness order {}", path.display());
            }
            Ok(OK)
        }
        Command::Reduce(Reduce::Stick2biphook {
            input,
            output,
            registry,
        }) => {
            let g = load_graph(&input)?;
            let art = data(build_biphook(&g, false), "reduction")?;
            if !g.is_connected() {
                eprintln!("warning: input is disconnected");
            }
            write(&output, &art.gamma.to_text())?;
            let reg_path = registry.unwrap_or_else(|| with_suffix(&output, ".registry.json"));
            write(&reg_path, &art.registry_json())?;
            println!("vertices {}, edges {}", art.gamma.len(), art.gamma.edge_count());
            Ok(OK)
        }
        Command::Decode { graph, registry, order } => {
            let g = load_graph(&graph)?;
            let reg_text = read(&registry)?;
            let reg: BTreeMap<String, VertexId> = data(serde_json::from_str(&reg_text), "parsing the registry")?;
            let art = data(artifact_from_parts(&g, &reg), "reading the artifact")?;
            let order = data(parse_order(&read(&order)?, &reg), "parsing the order")?;
            match decode_assignment(&art, &order) {
                Ok(asg) => {
                    println!("{asg}");
                    Ok(OK)
                }
                Err(e) => {
                    println!("undecodable: {e}");
                    Ok(NO)
                }
            }
        }
        Command::Render {
            geometry,
            output,
            scale,
            no_labels,
        } => {
            let geom = load_geometry(&geometry)?;
            let opts = SvgOptions {
                scale: scale.max(1),
                labels: !no_labels,
            };
            write(&output, &render_svg(&geom, &opts))?;
            Ok(OK)
        }
        Command::GadgetCheck {
            target,
            budget,
            workers,
            json,
        } => {
            let opts = LabOptions {
                budget: budget.or(Some(gadget_lab::DEFAULT_BUDGET)),
                workers: workers as usize,
            };
            let reports = gadget_lab::run_target(&target, &opts).map_err(|e| Failure {
                code: if matches!(e, gadget_lab::LabError::UnknownTarget(_)) { USAGE } else { DATA },
                error: e.into(),
            })?;
            for r in &reports {
                print!("{r}");
            }
            let summary = serde_json::to_string_pretty(&reports).expect("plain data");
            match json {
                Some(p) => write(&p, &summary)?,
                None => println!("{summary}"),
            }
            let expected = if target == "controls" { Status::Refuted } else { Status::Verified };
            let code = if reports.iter().all(|r| r.status == expected) {
                OK
            } else if reports.iter().any(|r| r.status == Status::Exhausted) {
                EXHAUSTED
            } else {
                NO
            };
            Ok(code)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
