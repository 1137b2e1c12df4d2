use std::net::{IpAddr, SocketAddr};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gsp_cli::commands::{
    analyze_output, condition_output, entities_output, evaluate_output, load_session, parse_pose, Format,
};
use gsp_singularity::numeric::{Pose, DEFAULT_EPSILON};

/// Singularity analysis of Gough-Stewart type parallel robots.
#[derive(Parser)]
#[command(name = "gsp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Expand, reduce and identify the singularity condition of a robot file.
    Analyze {
        file: PathBuf,
        /// Search all 720 leg orders for the shortest form even when not suggested.
        #[arg(long)]
        auto_reduce: bool,
        /// Entities JSON (`{"entities": [{"kind": "plane", "labels": [...]}, ...]}`) to verify instead of searching.
        #[arg(long, value_name = "FILE")]
        manual: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Evaluate the singularity measure at a platform pose.
    Evaluate {
        file: PathBuf,
        /// tx,ty,tz,qw,qx,qy,qz
        #[arg(long, allow_hyphen_values = true)]
        pose: String,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
        #[arg(long)]
        auto_reduce: bool,
    },
    /// Print the identified singularity condition.
    Condition {
        file: PathBuf,
        #[arg(long)]
        auto_reduce: bool,
        #[arg(long, value_name = "FILE")]
        manual: Option<PathBuf>,
    },
    /// Print entities and legs with world coordinates at a pose.
    Entities {
        file: PathBuf,
        /// tx,ty,tz,qw,qx,qy,qz (default: identity)
        #[arg(long, allow_hyphen_values = true)]
        pose: Option<String>,
    },
    /// Run the HTTP API (and optionally serve static UI assets).
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        #[arg(long, value_name = "DIR")]
        static_dir: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> anyhow::Result<String> {
    match cli.command {
        Command::Analyze {
            file,
            auto_reduce,
            manual,
            format,
        } => Ok(analyze_output(&load_session(&file, auto_reduce, manual.as_deref())?, format)),
        Command::Evaluate {
            file,
            pose,
            epsilon,
            auto_reduce,
        } => {
            let pose = parse_pose(&pose)?;
            evaluate_output(&load_session(&file, auto_reduce, None)?, &pose, epsilon)
        }
        Command::Condition {
            file,
            auto_reduce,
            manual,
        } => Ok(condition_output(&load_session(&file, auto_reduce, manual.as_deref())?)),
        Command::Entities { file, pose } => {
            let pose = pose.as_deref().map(parse_pose).transpose()?.unwrap_or_else(Pose::identity);
            Ok(entities_output(&load_session(&file, false, None)?, &pose))
        }
        Command::Serve { port, host, static_dir } => {
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(gsp_cli::service::serve(SocketAddr::new(host, port), static_dir))?;
            Ok(String::new())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
