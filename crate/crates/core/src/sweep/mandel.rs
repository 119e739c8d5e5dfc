use crate::cluster::RExecutor;
use crate::eval::{Fuel, Value};
use crate::expr::{Expr, Ident};

use super::{run_tasks, SweepError, DEFAULT_MAX_REQUEUES};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MandelSpec {
    pub width: u32,
    pub height: u32,
    pub cx: f64,
    pub cy: f64,
    /// Viewport width in the complex plane.
    pub view_w: f64,
    pub max_iter: u32,
    pub rows_per_task: u32,
}

impl Default for MandelSpec {
    fn default() -> Self {
        MandelSpec { width: 100, height: 100, cx: -0.5, cy: 0.0, view_w: 3.0, max_iter: 100, rows_per_task: 5 }
    }
}

impl MandelSpec {
    pub fn validate(&self) -> Result<(), SweepError> {
        let bad = |m: &str| Err(SweepError::InvalidSpec(m.into()));
        if self.width == 0 || self.height == 0 {
            return bad("width and height must be at least 1");
        }
        if !(self.view_w.is_finite() && self.view_w > 0.0) {
            return bad("viewport width must be positive");
        }
        if !(self.cx.is_finite() && self.cy.is_finite()) {
            return bad("center must be finite");
        }
        if self.max_iter == 0 {
            return bad("max-iter must be at least 1");
        }
        if self.rows_per_task == 0 {
            return bad("rows-per-task must be at least 1");
        }
        Ok(())
    }

    /// `(first row, row count)` for every task, top to bottom.
    pub fn row_chunks(&self) -> Vec<(u32, u32)> {
        (0..self.height)
            .step_by(self.rows_per_task as usize)
            .map(|start| (start, self.rows_per_task.min(self.height - start)))
            .collect()
    }
}

fn call(f: &str, args: impl IntoIterator<Item = Expr>) -> Expr {
    Expr::call(f, args)
}

fn v(name: &str) -> Expr {
    Expr::var(name)
}

fn float(x: f64) -> Expr {
    Expr::float(x).expect("validated spec yields finite constants")
}

/// An expression evaluating to the escape counts of rows
/// `row_start..row_start + row_count`, row-major, as a flat int list.
pub fn mandel_row_expr(spec: &MandelSpec, row_start: u32, row_count: u32) -> Result<Expr, SweepError> {
    spec.validate()?;
    if row_count == 0 || u64::from(row_start) + u64::from(row_count) > u64::from(spec.height) {
        return Err(SweepError::InvalidSpec(format!(
            "rows {row_start}..+{row_count} outside 0..{}",
            spec.height
        )));
    }
    let max = Expr::int(i64::from(spec.max_iter));
    let sq = |x: &str| call("mul", [v(x), v(x)]);

    let step = call(
        "esc",
        [
            v("cr"),
            v("ci"),
            call("add", [call("sub", [sq("zr"), sq("zi")]), v("cr")]),
            call("add", [call("mul", [call("mul", [float(2.0), v("zr")]), v("zi")]), v("ci")]),
            call("add", [v("n"), Expr::int(1)]),
        ],
    );
    let body = Expr::if_(
        call("ge", [v("n"), max.clone()]),
        max,
        Expr::if_(
            call("gt", [call("add", [sq("zr"), sq("zi")]), float(4.0)]),
            v("n"),
            step,
        ),
    );
    let esc = ["cr", "ci", "zr", "zi", "n"].iter().rev().fold(body, |b, p| Expr::lam(p, b));

    let width = f64::from(spec.width);
    let offset = |p: &str, half: f64| {
        call(
            "div",
            [
                call("mul", [call("sub", [call("add", [call("toFloat", [v(p)]), float(0.5)]), float(half)]), float(spec.view_w)]),
                float(width),
            ],
        )
    };
    let re = Expr::lam("px", call("add", [float(spec.cx), offset("px", width / 2.0)]));
    let im = Expr::lam("py", call("sub", [float(spec.cy), offset("py", f64::from(spec.height) / 2.0)]));

    let pixel = Expr::lam("px", call("esc", [call("re", [v("px")]), v("ci"), float(0.0), float(0.0), Expr::int(0)]));
    let row = call("map", [pixel, call("range", [Expr::int(0), Expr::int(i64::from(spec.width) - 1)])]);
    let step_row = Expr::lam("acc", Expr::lam("py", Expr::let_("ci", call("im", [v("py")]), call("append", [v("acc"), row]))));
    let rows = call(
        "foldl",
        [
            step_row,
            Expr::list([]),
            call("range", [Expr::int(i64::from(row_start)), Expr::int(i64::from(row_start) + i64::from(row_count) - 1)]),
        ],
    );
    let program = Expr::let_("re", re, Expr::let_("im", im, rows));
    Ok(Expr::letrec(Ident::new("esc").expect("valid name"), esc, program).expect("esc is a lambda"))
}

/// A budget that always suffices for one task of `rows` rows.
pub fn mandel_task_fuel(spec: &MandelSpec, rows: u32) -> Fuel {
    let pixels = u64::from(rows) * u64::from(spec.width);
    let per_pixel = (u64::from(spec.max_iter) + 1) * 100 + 100;
    let appends = u64::from(rows) * pixels;
    let total = pixels.saturating_mul(per_pixel).saturating_add(appends).saturating_add(1000);
    Fuel::new(total).expect("positive")
}

/// Binary PPM with gray level `255 * count / max_iter` per pixel.
pub fn ppm_bytes(width: u32, height: u32, max_iter: u32, counts: &[u32]) -> Vec<u8> {
    assert_eq!(counts.len(), width as usize * height as usize, "one count per pixel");
    let mut out = format!("P6\n{width} {height}\n255\n").into_bytes();
    out.reserve(counts.len() * 3);
    for &c in counts {
        let gray = (255 * u64::from(c) / u64::from(max_iter)) as u8;
        out.extend_from_slice(&[gray, gray, gray]);
    }
    out
}

/// Sweeps the image in tasks of `rows_per_task` rows and returns the PPM
/// file contents. Any failed task fails the render.
pub async fn render_mandel(spec: &MandelSpec, x: &RExecutor) -> Result<Vec<u8>, SweepError> {
    spec.validate()?;
    let chunks = spec.row_chunks();
    let tasks = chunks
        .iter()
        .map(|&(start, count)| mandel_row_expr(spec, start, count))
        .collect::<Result<Vec<_>, _>>()?;
    let fuel = mandel_task_fuel(spec, spec.rows_per_task);
    let results = run_tasks(tasks, Some(fuel), DEFAULT_MAX_REQUEUES, x).await?;

    let mut counts = Vec::with_capacity(spec.width as usize * spec.height as usize);
    for (index, (result, &(_, rows))) in results.into_iter().zip(&chunks).enumerate() {
        let value = result.map_err(|error| SweepError::Task { index, error })?;
        let bad = |detail: String| SweepError::BadResult { index, detail };
        let Value::List(items) = value else {
            return Err(bad(format!("expected a list, got {}", value.kind())));
        };
        if items.len() != rows as usize * spec.width as usize {
            return Err(bad(format!("expected {} counts, got {}", rows * spec.width, items.len())));
        }
        for item in items.iter() {
            match item {
                Value::Int(c) if (0..=i64::from(spec.max_iter)).contains(c) => counts.push(*c as u32),
                other => return Err(bad(format!("count out of range: {other}"))),
            }
        }
    }
    Ok(ppm_bytes(spec.width, spec.height, spec.max_iter, &counts))
}
