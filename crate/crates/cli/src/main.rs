//! `qx`: the command-line client. See `qx --help` for the subcommands.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand};
use qx_cli::{
    init_tracing, parse_args, sibling_binary, split_list, ServerProcess, EXIT_EVAL, EXIT_TRANSPORT, EXIT_USAGE,
};
use qx_core::cluster::{DispatcherConfig, ExecError};
use qx_core::jsgen::JsModule;
use qx_core::sweep::{bench_csv, make_sweep, render_mandel, run_sweep, spin_job, BenchRow, MandelSpec, SweepError};
use qx_core::wire::ErrorCode;
use qx_core::expr::write_string;
use qx_core::{parse_expr, print_expr, value_to_expr, Expr, Fuel, Ident, RExecutor, Value};

#[derive(Parser)]
#[command(name = "qx", version, about = "Distributed quotation evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Where evaluation happens. `--local` wins over `--dispatcher`, which
/// wins over `--workers`.
#[derive(clap::Args)]
struct Target {
    /// Address of a qx-dispatch process.
    #[arg(long, env = "QX_DISPATCHER", value_name = "HOST:PORT")]
    dispatcher: Option<String>,
    /// Schedule onto these workers from this process instead.
    #[arg(long, env = "QX_WORKERS", value_name = "HOST:PORT,...")]
    workers: Option<String>,
    /// Evaluate in this process.
    #[arg(long)]
    local: bool,
    /// Step budget per request instead of the worker default.
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u64).range(1..))]
    fuel: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the expression in FILE and print its value.
    Eval {
        file: PathBuf,
        #[command(flatten)]
        target: Target,
    },
    /// Evaluate the template in FILE once per value of PARAM.
    Sweep {
        file: PathBuf,
        #[arg(long)]
        param: String,
        /// Comma-separated ints, floats, booleans or strings.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        #[command(flatten)]
        target: Target,
    },
    /// Render the Mandelbrot set to a binary PPM.
    Mandel {
        #[arg(long, default_value_t = 100)]
        width: u32,
        #[arg(long, default_value_t = 100)]
        height: u32,
        /// Center as RE,IM.
        #[arg(long, default_value = "-0.5,0", allow_hyphen_values = true)]
        center: String,
        #[arg(long = "vieww", default_value_t = 3.0)]
        view_w: f64,
        #[arg(long, default_value_t = 100)]
        max_iter: u32,
        #[arg(long, default_value_t = 5)]
        rows_per_task: u32,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        target: Target,
    },
    /// Measure sweep wall time against the number of worker processes.
    Bench {
        #[arg(long, default_value_t = 64)]
        items: usize,
        /// Countdown depth of each item.
        #[arg(long, default_value_t = 200_000)]
        spin: u64,
        /// Comma-separated worker counts; the first is the baseline.
        #[arg(long, default_value = "1,2,4")]
        workers: String,
        /// Timed runs per worker count; the median is reported.
        #[arg(long, default_value_t = 3)]
        runs: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
        /// qx-worker executable; defaults to the one next to qx.
        #[arg(long)]
        worker_bin: Option<PathBuf>,
    },
    /// Translate the expression in FILE to an ECMAScript module.
    Jsgen {
        file: PathBuf,
        /// Name of the emitted definition.
        #[arg(long, default_value = "main")]
        name: String,
        /// Remote functions as NAME:ARITY,...
        #[arg(long)]
        rpc: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Forms demos.
    Form {
        #[command(subcommand)]
        command: FormCommand,
    },
}

#[derive(Subcommand)]
enum FormCommand {
    /// Write the layout and formlet demo page.
    Demo {
        #[arg(long)]
        out: PathBuf,
    },
}

/// A failed command: message for stderr and process exit code.
struct Failure(u8, String);

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Failure(EXIT_USAGE, msg.into())
    }
}

impl From<ExecError> for Failure {
    fn from(e: ExecError) -> Self {
        match e {
            ExecError::Eval(e) => Failure(EXIT_EVAL, e.to_string()),
            ExecError::Transport(t) => Failure(EXIT_TRANSPORT, t.to_string()),
        }
    }
}

impl From<SweepError> for Failure {
    fn from(e: SweepError) -> Self {
        match e {
            SweepError::Task { error, index } => {
                let Failure(code, msg) = Failure::from(error);
                Failure(code, format!("task {index}: {msg}"))
            }
            SweepError::NoHealthyWorkers => Failure(EXIT_TRANSPORT, e.to_string()),
            SweepError::BadResult { .. } => Failure(EXIT_EVAL, e.to_string()),
            other => Failure::usage(other.to_string()),
        }
    }
}

#[tokio::main]
async fn main() -> ExitCode {
    let cli: Cli = match parse_args() {
        Ok(c) => c,
        Err(code) => return code,
    };
    init_tracing();
    match run(cli.command).await {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("qx: {msg}");
            ExitCode::from(code)
        }
    }
}

async fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Eval { file, target } => {
            let expr = read_expr(&file)?;
            let x = executor(&target)?;
            let v = x.eval(&expr).await?;
            println!("{}", print_value(&v)?);
            Ok(())
        }
        Command::Sweep { file, param, values, target } => sweep(&file, &param, &values, &target).await,
        Command::Mandel { width, height, center, view_w, max_iter, rows_per_task, out, target } => {
            let (cx, cy) = parse_center(&center)?;
            let spec = MandelSpec { width, height, cx, cy, view_w, max_iter, rows_per_task };
            spec.validate()?;
            let x = executor(&target)?;
            let bytes = render_mandel(&spec, &x).await?;
            write_file(&out, &bytes)
        }
        Command::Bench { items, spin, workers, runs, csv, worker_bin } => {
            bench(items, spin, &workers, runs.max(1), csv.as_deref(), worker_bin).await
        }
        Command::Jsgen { file, name, rpc, out } => {
            let expr = read_expr(&file)?;
            let mut module = JsModule::new();
            for item in split_list(rpc.as_deref().unwrap_or("")) {
                let (n, arity) = item
                    .split_once(':')
                    .and_then(|(n, a)| Some((n, a.parse::<usize>().ok()?)))
                    .ok_or_else(|| Failure::usage(format!("bad --rpc item {item:?}; expected NAME:ARITY")))?;
                module.add_stub(&ident(n)?, arity).map_err(|e| Failure::usage(e.to_string()))?;
            }
            module.define(&ident(&name)?, &expr).map_err(|e| Failure::usage(e.to_string()))?;
            let text = module.render();
            match out {
                Some(path) => write_file(&path, text.as_bytes()),
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        }
        Command::Form { command: FormCommand::Demo { out } } => {
            write_file(&out, qx_core::forms::demo_document().as_bytes())
        }
    }
}

fn ident(s: &str) -> Result<Ident, Failure> {
    Ident::new(s).map_err(|e| Failure::usage(e.to_string()))
}

fn read_expr(path: &Path) -> Result<Expr, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    parse_expr(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    std::fs::write(path, bytes).map_err(|e| Failure(EXIT_USAGE, format!("cannot write {}: {e}", path.display())))
}

fn executor(t: &Target) -> Result<RExecutor, Failure> {
    let x = if t.local {
        RExecutor::local()
    } else if let Some(addr) = &t.dispatcher {
        RExecutor::remote(addr.clone())
    } else if let Some(list) = &t.workers {
        let workers = split_list(list);
        if workers.is_empty() {
            return Err(Failure::usage("--workers lists no addresses"));
        }
        RExecutor::embedded(DispatcherConfig::new(workers))
    } else {
        return Err(Failure::usage("choose --local, --dispatcher HOST:PORT or --workers HOST:PORT,..."));
    };
    Ok(match t.fuel.and_then(Fuel::new) {
        Some(f) => x.with_fuel(f),
        None => x,
    })
}

fn print_value(v: &Value) -> Result<String, Failure> {
    value_to_expr(v).map(|e| print_expr(&e)).map_err(|e| Failure(EXIT_EVAL, e.to_string()))
}

fn parse_center(s: &str) -> Result<(f64, f64), Failure> {
    let bad = || Failure::usage(format!("bad --center {s:?}; expected RE,IM"));
    let (re, im) = s.split_once(',').ok_or_else(bad)?;
    Ok((re.trim().parse().map_err(|_| bad())?, im.trim().parse().map_err(|_| bad())?))
}

/// Reads a sweep value: int, float, `true`/`false`, else a string.
fn parse_value(s: &str) -> Value {
    if let Ok(i) = s.parse::<i64>() {
        Value::Int(i)
    } else if let Some(f) = s.parse::<f64>().ok().filter(|f| f.is_finite()) {
        Value::Float(f)
    } else if let Ok(b) = s.parse::<bool>() {
        Value::Bool(b)
    } else {
        Value::str(s)
    }
}

async fn sweep(file: &Path, param: &str, values: &str, target: &Target) -> Result<(), Failure> {
    let template = read_expr(file)?;
    let values: Vec<Value> = split_list(values).iter().map(|s| parse_value(s)).collect();
    let mut job = make_sweep(&template, &ident(param)?, &values)?;
    if let Some(f) = target.fuel.and_then(Fuel::new) {
        job = job.with_fuel(f);
    }
    let x = executor(target)?;
    let mut worst = 0;
    for result in run_sweep(&job, &x).await? {
        let failure = match result.map_err(ExecError::from).and_then(|v| Ok(value_to_expr(&v)?)) {
            Ok(e) => {
                println!("{}", print_expr(&e));
                continue;
            }
            Err(ExecError::Eval(e)) => (EXIT_EVAL, e.code.to_string(), e.detail),
            Err(ExecError::Transport(t)) => (EXIT_TRANSPORT, ErrorCode::Unavailable.to_string(), t.to_string()),
        };
        let (code, name, detail) = failure;
        worst = worst.max(code);
        let mut line = format!("(error {name} ");
        write_string(&mut line, &detail);
        line.push(')');
        println!("{line}");
    }
    match worst {
        0 => Ok(()),
        code => Err(Failure(code, "some sweep items failed".into())),
    }
}

async fn bench(
    items: usize,
    spin: u64,
    counts: &str,
    runs: usize,
    csv: Option<&Path>,
    worker_bin: Option<PathBuf>,
) -> Result<(), Failure> {
    let counts: Vec<usize> = split_list(counts)
        .iter()
        .map(|c| c.parse().ok().filter(|&n| n > 0))
        .collect::<Option<_>>()
        .ok_or_else(|| Failure::usage("--workers must be positive integers"))?;
    if counts.is_empty() || items == 0 {
        return Err(Failure::usage("need at least one worker count and one item"));
    }
    let bin = match worker_bin {
        Some(b) => b,
        None => sibling_binary("qx-worker").map_err(|e| Failure::usage(e.to_string()))?,
    };
    let job = spin_job(items, spin);
    let mut timings = Vec::new();
    for &n in &counts {
        let mut procs = Vec::new();
        for _ in 0..n {
            let args = ["--listen", "127.0.0.1:0", "--concurrency", "1"].map(String::from);
            let p = ServerProcess::spawn(&bin, &args)
                .await
                .map_err(|e| Failure(EXIT_TRANSPORT, format!("cannot start {}: {e}", bin.display())))?;
            procs.push(p);
        }
        let mut cfg = DispatcherConfig::new(procs.iter().map(|p| p.addr().to_string()));
        cfg.worker_concurrency = 1;
        let x = RExecutor::embedded(cfg);
        let mut samples = Vec::new();
        for _ in 0..runs {
            let start = Instant::now();
            let results = run_sweep(&job, &x).await?;
            samples.push(start.elapsed());
            if let Some(e) = results.into_iter().find_map(Result::err) {
                return Err(e.into());
            }
        }
        samples.sort();
        let median = samples[samples.len() / 2];
        eprintln!(
            "qx bench: {n} worker(s): median {:.3}s, {:.1} ms/item",
            median.as_secs_f64(),
            per_item_ms(median, items, n)
        );
        timings.push((n, median));
        for mut p in procs {
            let _ = p.kill().await;
        }
    }
    let text = bench_csv(&BenchRow::from_timings(&timings));
    print!("{text}");
    match csv {
        Some(path) => write_file(path, text.as_bytes()),
        None => Ok(()),
    }
}

fn per_item_ms(total: Duration, items: usize, workers: usize) -> f64 {
    total.as_secs_f64() * 1000.0 * workers as f64 / items as f64
}
