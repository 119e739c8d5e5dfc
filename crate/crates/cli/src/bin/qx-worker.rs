//! Worker server: evaluates quotations sent over the wire protocol.

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use qx_cli::{init_tracing, parse_args, EXIT_TRANSPORT};
use qx_core::cluster::{Worker, WorkerConfig};
use qx_core::Fuel;

/// Serve quotation evaluation requests. Prints the bound address on the
/// first line of stdout.
#[derive(Parser)]
#[command(name = "qx-worker", version)]
struct Args {
    /// Address to listen on; port 0 picks a free port.
    #[arg(long, value_name = "HOST:PORT")]
    listen: String,
    /// Default step budget per evaluation.
    #[arg(long, value_name = "N", default_value_t = Fuel::DEFAULT.get(), value_parser = clap::value_parser!(u64).range(1..))]
    fuel: u64,
    /// Evaluations run at the same time.
    #[arg(long, value_name = "K", default_value_t = WorkerConfig::DEFAULT_CONCURRENCY, value_parser = positive)]
    concurrency: usize,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(format!("expected a positive integer, got {s:?}")),
    }
}

#[tokio::main]
async fn main() -> ExitCode {
    let args: Args = match parse_args() {
        Ok(a) => a,
        Err(code) => return code,
    };
    init_tracing();
    let mut cfg = WorkerConfig::new(args.listen);
    cfg.fuel = Fuel::new(args.fuel).expect("validated by clap");
    cfg.max_concurrent = args.concurrency;
    let worker = match Worker::bind(&cfg).await {
        Ok(w) => w,
        Err(e) => {
            eprintln!("qx-worker: cannot listen on {}: {e}", cfg.listen);
            return ExitCode::from(EXIT_TRANSPORT);
        }
    };
    let addr = worker.local_addr().expect("bound socket has an address");
    println!("{addr}");
    let _ = std::io::stdout().flush();
    tokio::select! {
        r = worker.serve() => {
            if let Err(e) = r {
                eprintln!("qx-worker: {e}");
                return ExitCode::from(EXIT_TRANSPORT);
            }
        }
        _ = tokio::signal::ctrl_c() => {}
    }
    ExitCode::SUCCESS
}
