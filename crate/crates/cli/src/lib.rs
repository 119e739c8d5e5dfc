//! Support code shared by the `qx`, `qx-worker` and `qx-dispatch` binaries.

use std::io::{self, IsTerminal};
use std::path::{Path, PathBuf};
use std::process::{ExitCode, Stdio};
use std::time::Duration;

use tokio::io::{AsyncBufReadExt, BufReader};
use tokio::process::{Child, Command};

pub const EXIT_OK: u8 = 0;
pub const EXIT_EVAL: u8 = 1;
pub const EXIT_TRANSPORT: u8 = 2;
pub const EXIT_USAGE: u8 = 3;

/// Logs to stderr, filtered by `RUST_LOG` (default `warn`).
pub fn init_tracing() {
    let filter = tracing_subscriber::EnvFilter::try_from_default_env()
        .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("warn"));
    tracing_subscriber::fmt()
        .with_env_filter(filter)
        .with_writer(io::stderr)
        .with_ansi(io::stderr().is_terminal())
        .init();
}

/// Parses arguments, mapping usage errors to exit code 3. Help and version
/// requests print and exit 0.
pub fn parse_args<P: clap::Parser>() -> Result<P, ExitCode> {
    P::try_parse().map_err(|e| {
        let _ = e.print();
        if e.use_stderr() {
            ExitCode::from(EXIT_USAGE)
        } else {
            ExitCode::from(EXIT_OK)
        }
    })
}

/// Splits a comma-separated list, dropping empty items.
pub fn split_list(s: &str) -> Vec<String> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty()).map(String::from).collect()
}

/// A binary that sits next to the running executable, as cargo and
/// installers lay them out.
pub fn sibling_binary(name: &str) -> io::Result<PathBuf> {
    let exe = std::env::current_exe()?;
    let dir = exe.parent().ok_or_else(|| io::Error::other("executable has no parent directory"))?;
    let mut path = dir.join(name);
    if cfg!(windows) {
        path.set_extension("exe");
    }
    if path.exists() {
        Ok(path)
    } else {
        Err(io::Error::new(io::ErrorKind::NotFound, format!("{} not found", path.display())))
    }
}

/// A child server process that printed its bound address on its first
/// stdout line. Killed on drop.
pub struct ServerProcess {
    child: Child,
    addr: String,
}

impl ServerProcess {
    pub async fn spawn(bin: &Path, args: &[String]) -> io::Result<ServerProcess> {
        let mut child = Command::new(bin)
            .args(args)
            .stdin(Stdio::null())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .kill_on_drop(true)
            .spawn()?;
        let stdout = child.stdout.take().expect("stdout is piped");
        let mut lines = BufReader::new(stdout).lines();
        let first = tokio::time::timeout(Duration::from_secs(10), lines.next_line())
            .await
            .map_err(|_| io::Error::new(io::ErrorKind::TimedOut, "server did not report its address"))??;
        let addr = first.ok_or_else(|| io::Error::other("server exited before reporting its address"))?;
        tokio::spawn(async move { while let Ok(Some(_)) = lines.next_line().await {} });
        Ok(ServerProcess { child, addr: addr.trim().to_string() })
    }

    pub fn addr(&self) -> &str {
        &self.addr
    }

    pub async fn kill(&mut self) -> io::Result<()> {
        self.child.kill().await
    }
}
