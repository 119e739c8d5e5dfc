use std::fmt::Write as _;
use std::time::Duration;

use crate::eval::Fuel;
use crate::expr::{parse_expr, Ident};

use super::{make_sweep, SweepJob};

/// `items` CPU-bound tasks, each counting down from `depth` and returning
/// its own index.
pub fn spin_job(items: usize, depth: u64) -> SweepJob {
    let template = parse_expr(&format!(
        "(letrec spin (lam n (if (app (app (var le) (var n)) (int 0)) (int 0) \
           (app (var spin) (app (app (var sub) (var n)) (int 1))))) \
         (app (app (var add) (app (var spin) (int {depth}))) (var i)))"
    ))
    .expect("well-formed template");
    let values: Vec<i64> = (0..items as i64).collect();
    let fuel = Fuel::new(depth.saturating_mul(20).saturating_add(1000)).expect("positive");
    let job = make_sweep(&template, &Ident::new("i").expect("valid name"), &values);
    job.expect("closed template with int values").with_fuel(fuel)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchRow {
    pub workers: usize,
    pub seconds: f64,
    /// Time with the first row's worker count divided by this row's time.
    pub speedup: f64,
}

impl BenchRow {
    /// Rows from `(worker count, wall time)` pairs, relative to the first.
    pub fn from_timings(timings: &[(usize, Duration)]) -> Vec<BenchRow> {
        let Some(&(_, base)) = timings.first() else { return Vec::new() };
        timings
            .iter()
            .map(|&(workers, t)| BenchRow {
                workers,
                seconds: t.as_secs_f64(),
                speedup: base.as_secs_f64() / t.as_secs_f64().max(f64::MIN_POSITIVE),
            })
            .collect()
    }
}

pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("workers,seconds,speedup\n");
    for r in rows {
        writeln!(out, "{},{:.4},{:.3}", r.workers, r.seconds, r.speedup).expect("writing to a String");
    }
    out
}
