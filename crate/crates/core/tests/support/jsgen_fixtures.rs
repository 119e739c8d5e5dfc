//! Loads the translator fixture corpus.
//!
//! Each `NAME.qx` may start with `; name: IDENT` (the definition name,
//! default `main`) and `; rpc a:1,b:2` header lines. The golden
//! `NAME.js` holds the rendered module without the runtime preamble.
//! Set `QX_BLESS=1` to rewrite goldens.
#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use qx_core::expr::parse_expr;
use qx_core::jsgen::{JsModule, PREAMBLE};
use qx_core::Ident;

pub struct Fixture {
    pub stem: String,
    pub source: PathBuf,
    pub golden: PathBuf,
    pub module_name: Ident,
    pub stubs: Vec<(Ident, usize)>,
    pub text: String,
}

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/jsgen")
}

pub fn load_fixtures(dir: &Path) -> Vec<Fixture> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "qx"))
        .collect();
    paths.sort();
    paths.into_iter().map(|p| load(&p)).collect()
}

fn load(path: &Path) -> Fixture {
    let text = fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let mut module_name = Ident::new("main").unwrap();
    let mut stubs = Vec::new();
    for line in text.lines().map(str::trim).take_while(|l| l.starts_with(';')) {
        let line = line.trim_start_matches(';').trim();
        if let Some(n) = line.strip_prefix("name:") {
            module_name = Ident::new(n.trim()).unwrap();
        } else if let Some(list) = line.strip_prefix("rpc ") {
            for item in list.split(',') {
                let (n, a) = item.trim().split_once(':').expect("rpc item is NAME:ARITY");
                stubs.push((Ident::new(n).unwrap(), a.parse().unwrap()));
            }
        }
    }
    Fixture {
        stem: path.file_stem().unwrap().to_string_lossy().into_owned(),
        source: path.to_path_buf(),
        golden: path.with_extension("js"),
        module_name,
        stubs,
        text,
    }
}

impl Fixture {
    pub fn module(&self) -> JsModule {
        let expr = parse_expr(&self.text).unwrap_or_else(|e| panic!("{}: {e}", self.stem));
        let mut m = JsModule::new();
        for (n, a) in &self.stubs {
            m.add_stub(n, *a).unwrap();
        }
        m.define(&self.module_name, &expr).unwrap_or_else(|e| panic!("{}: {e}", self.stem));
        m
    }

    /// The rendered module with the preamble removed.
    pub fn body(&self) -> String {
        let full = self.module().render();
        full.strip_prefix(PREAMBLE).expect("module starts with the preamble").to_string()
    }

    /// Compares against the golden file, rewriting it when blessing.
    pub fn check_golden(&self) -> Result<(), String> {
        let body = self.body();
        if std::env::var_os("QX_BLESS").is_some() {
            fs::write(&self.golden, &body).unwrap();
        }
        let golden = fs::read_to_string(&self.golden).map_err(|e| format!("{}: {e}", self.golden.display()))?;
        if golden == body {
            Ok(())
        } else {
            Err(format!("{}: output differs from golden\n--- golden\n{golden}\n--- actual\n{body}", self.stem))
        }
    }
}
