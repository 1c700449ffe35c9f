//! Command-line front end: run configurations, export revolved meshes and
//! list the available presets.

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use axiflow::driver::{run, RunConfig};
use axiflow::geometry::{BoundaryClass, GeneratingCurve, Topology};
use axiflow::mesh::{export_revolved, read_snapshot};
use axiflow::presets::PRESET_LIST;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "axiflow",
    version,
    about = "Willmore and Helfrich flow of axisymmetric surfaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a JSON configuration and write the run directory.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Revolve a curve snapshot into an OBJ triangle mesh.
    Export {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long, default_value_t = 64)]
        ktheta: usize,
        #[arg(long)]
        obj: PathBuf,
        /// Treat the snapshot as a closed (periodic) curve.
        #[arg(long)]
        periodic: bool,
    },
    /// Preset curves.
    Presets {
        #[command(subcommand)]
        action: PresetAction,
    },
}

#[derive(Subcommand)]
enum PresetAction {
    /// List the preset names.
    List,
}

fn error_json(kind: &str, message: &str) -> String {
    serde_json::json!({ "error": kind, "message": message }).to_string()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, out } => RunConfig::from_file(&config)
            .map_err(|e| error_json(e.kind(), &e.to_string()))
            .and_then(|cfg| {
                run(cfg, &out).map_err(|f| match f.report {
                    Some(r) => serde_json::to_string(&r).expect("failure report serializes"),
                    None => error_json(f.error.kind(), &f.error.to_string()),
                })
            })
            .map(|summary| {
                println!(
                    "{} steps to t = {}, energy {}",
                    summary.steps, summary.final_time, summary.final_diagnostics.energy
                );
                if let Some(n) = summary.error_norms {
                    println!("errors: Linf {:e}, Linf(L2) {:e}", n.linf, n.linf_l2);
                }
            }),
        Command::Export {
            snapshot,
            ktheta,
            obj,
            periodic,
        } => export(&snapshot, ktheta, &obj, periodic)
            .map_err(|e| error_json(e.kind(), &e.to_string())),
        Command::Presets {
            action: PresetAction::List,
        } => {
            for (name, description) in PRESET_LIST {
                println!("{name:<22} {description}");
            }
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(json) => {
            eprintln!("{json}");
            ExitCode::FAILURE
        }
    }
}

/// Endpoints with `x1 = 0` are taken as axis points; the classes of the
/// other endpoints do not affect the mesh.
fn export(snapshot: &PathBuf, ktheta: usize, obj: &PathBuf, periodic: bool) -> axiflow::Result<()> {
    let nodes = read_snapshot(File::open(snapshot)?)?;
    let topology = if periodic {
        Topology::Periodic
    } else {
        let class = |x1: f64| {
            if x1 == 0.0 {
                BoundaryClass::Axis
            } else {
                BoundaryClass::Navier
            }
        };
        let (first, last) = match (nodes.first(), nodes.last()) {
            (Some(a), Some(b)) => (a.x, b.x),
            _ => return Err(axiflow::Error::InvalidCurve("empty snapshot".into())),
        };
        Topology::Interval {
            start: class(first),
            end: class(last),
        }
    };
    let curve = GeneratingCurve::new(nodes, topology)?;
    let mesh = export_revolved(&curve, ktheta)?;
    mesh.write_obj(BufWriter::new(File::create(obj)?))?;
    println!(
        "{} vertices, {} triangles",
        mesh.vertices.len(),
        mesh.triangles.len()
    );
    Ok(())
}
