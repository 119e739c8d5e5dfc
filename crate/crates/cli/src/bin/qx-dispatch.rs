//! Dispatcher: accepts client requests and schedules them on a worker pool.

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use qx_cli::{init_tracing, parse_args, split_list, EXIT_TRANSPORT, EXIT_USAGE};
use qx_core::cluster::{Dispatcher, DispatcherConfig, DEFAULT_RETRY_LIMIT};
use tokio::net::TcpListener;

/// Schedule evaluation requests round-robin over healthy workers. Prints
/// the bound address on the first line of stdout.
#[derive(Parser)]
#[command(name = "qx-dispatch", version)]
struct Args {
    #[arg(long, value_name = "HOST:PORT")]
    listen: String,
    /// Comma-separated worker addresses.
    #[arg(long, env = "QX_WORKERS", value_name = "HOST:PORT,...")]
    workers: String,
    /// Further attempts on other workers after a transport failure.
    #[arg(long, default_value_t = DEFAULT_RETRY_LIMIT)]
    retries: u32,
}

#[tokio::main]
async fn main() -> ExitCode {
    let args: Args = match parse_args() {
        Ok(a) => a,
        Err(code) => return code,
    };
    init_tracing();
    let workers = split_list(&args.workers);
    if workers.is_empty() {
        eprintln!("qx-dispatch: --workers lists no addresses");
        return ExitCode::from(EXIT_USAGE);
    }
    let listener = match TcpListener::bind(&args.listen).await {
        Ok(l) => l,
        Err(e) => {
            eprintln!("qx-dispatch: cannot listen on {}: {e}", args.listen);
            return ExitCode::from(EXIT_TRANSPORT);
        }
    };
    let addr = listener.local_addr().expect("bound socket has an address");
    let mut cfg = DispatcherConfig::new(workers);
    cfg.retry_limit = args.retries;
    let dispatcher = Dispatcher::new(cfg);
    println!("{addr}");
    let _ = std::io::stdout().flush();
    tokio::select! {
        r = dispatcher.serve(listener) => {
            if let Err(e) = r {
                eprintln!("qx-dispatch: {e}");
                return ExitCode::from(EXIT_TRANSPORT);
            }
        }
        _ = tokio::signal::ctrl_c() => {}
    }
    ExitCode::SUCCESS
}
