use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};

use wayfind::bench::oracle_sweep;
use wayfind::map::MapGraph;
use wayfind::pathfinder::{plan_route, PathError, RouteMode};
use wayfind::service::{self, MapStore};
use wayfind::trace::{parse_trace, replay};
use wayfind::{qr, TripSession};

const EXIT_INVALID: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "wayfind",
    version,
    about = "Indoor navigation over QR-strip floor maps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Serve the session API for every map in a directory.
    Serve {
        #[arg(long)]
        maps: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
    },
    /// Validate a map file.
    Validate { file: PathBuf },
    /// Plan a route between two nodes.
    Plan {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long, value_parser = parse_mode)]
        mode: RouteMode,
        #[arg(long)]
        json: bool,
    },
    /// Replay a scan trace and print one JSON event per line.
    Walk {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        trace: PathBuf,
    },
    /// Print the strip payload of every node.
    Qr {
        #[arg(long)]
        map: PathBuf,
    },
    /// Check the planner against the exhaustive oracle for all destination pairs.
    Bench {
        #[arg(long)]
        map: PathBuf,
    },
}

fn parse_mode(s: &str) -> Result<RouteMode, String> {
    s.parse()
        .map_err(|e: wayfind::pathfinder::ParseModeError| e.to_string())
}

enum Failure {
    Invalid(String),
    Usage(String),
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn load(path: &Path) -> Result<MapGraph, Failure> {
    let text = read(path)?;
    MapGraph::from_json_str(&text).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Serve { maps, port, host } => {
            let store = MapStore::load_dir(&maps).map_err(|e| Failure::Invalid(e.to_string()))?;
            let ids: Vec<&str> = store.ids().collect();
            let addr = SocketAddr::new(host, port);
            eprintln!("serving maps [{}] on http://{addr}", ids.join(", "));
            let rt = tokio::runtime::Runtime::new()
                .map_err(|e| Failure::Usage(format!("cannot start runtime: {e}")))?;
            rt.block_on(service::serve(store, addr))
                .map_err(|e| Failure::Usage(format!("server error: {e}")))
        }
        Command::Validate { file } => {
            let g = load(&file)?;
            for w in g.length_warnings() {
                eprintln!("warning: {w}");
            }
            println!(
                "{}: ok ({} nodes, {} edges, {} destinations)",
                g.map_id(),
                g.nodes().len(),
                g.edges().len(),
                g.destinations().count()
            );
            Ok(())
        }
        Command::Plan {
            map,
            from,
            to,
            mode,
            json,
        } => {
            let g = load(&map)?;
            let route = plan_route(&g, &from, &to, mode).map_err(|e| match e {
                PathError::UnknownNode(_) => Failure::Usage(e.to_string()),
                other => Failure::Invalid(other.to_string()),
            })?;
            if json {
                println!(
                    "{}",
                    serde_json::to_string(&route).expect("route serializes")
                );
            } else {
                let nodes: Vec<&str> = route.nodes.iter().map(|n| n.as_str()).collect();
                println!("route:    {}", nodes.join(" -> "));
                println!("distance: {:.2} m", route.distance);
                println!("turns:    {}", route.turns);
            }
            Ok(())
        }
        Command::Walk { map, trace } => {
            let g = load(&map)?;
            let commands =
                parse_trace(&read(&trace)?).map_err(|e| Failure::Usage(e.to_string()))?;
            let mut session = TripSession::new(Arc::new(g));
            for line in replay(&mut session, &commands) {
                println!(
                    "{}",
                    serde_json::to_string(&line).expect("event serializes")
                );
            }
            Ok(())
        }
        Command::Qr { map } => {
            let g = load(&map)?;
            for n in g.nodes() {
                let payload = qr::encode(g.map_id(), n.id.as_str())
                    .map_err(|e| Failure::Invalid(e.to_string()))?;
                println!("{payload}");
            }
            Ok(())
        }
        Command::Bench { map } => {
            let g = load(&map)?;
            let report = oracle_sweep(&g).map_err(|e| Failure::Invalid(e.to_string()))?;
            println!("{} ordered destination pairs, both modes", report.pairs);
            println!("{:<42} {:>7} {:>8}  result", "check", "pairs", "failures");
            for row in &report.rows {
                println!(
                    "{:<42} {:>7} {:>8}  {}",
                    row.name,
                    row.checked,
                    row.failures.len(),
                    if row.passed() { "PASS" } else { "FAIL" }
                );
                for f in row.failures.iter().take(5) {
                    println!("    {f}");
                }
            }
            println!("elapsed: {:.3} s", report.elapsed.as_secs_f64());
            if report.passed() {
                Ok(())
            } else {
                Err(Failure::Invalid("oracle sweep failed".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INVALID)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
