use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex;
use serde_json::{json, Value};
use skewfiber::series::CoeffJson;
use skewfiber::{FiberChange, ScaledComplex, TruncatedSeries};

use crate::error::{CliError, CliResult};

/// `[re, im]`; non-finite parts become `null`.
pub fn complex(c: Complex<f64>) -> Value {
    json!([c.re, c.im])
}

/// `[re, im, exp2]` for `(re + i im) 2^exp2`.
pub fn scaled(c: &ScaledComplex<f64>) -> Value {
    match CoeffJson::from_scaled(c) {
        CoeffJson::Scaled(re, im, e) => json!([re, im, e]),
        CoeffJson::Plain(re, im) => json!([re, im, 0]),
    }
}

pub fn series(s: &TruncatedSeries<f64>) -> Value {
    Value::Array(s.coeffs().iter().map(scaled).collect())
}

pub fn change(c: &FiberChange<f64>) -> Value {
    match c {
        FiberChange::Shift(s) | FiberChange::Gauge(s) => json!({"kind": c.kind(), "series": series(s)}),
        FiberChange::Bump { h, k } => json!({"kind": c.kind(), "k": k, "series": series(h)}),
        FiberChange::WScale(s) => json!({"kind": c.kind(), "c": complex(*s)}),
    }
}

pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn create(root: &Path) -> CliResult<Self> {
        fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        Ok(Self { root: root.to_path_buf() })
    }

    pub fn write_with(&self, name: &str, body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> CliResult<PathBuf> {
        let path = self.root.join(name);
        let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        let mut out = BufWriter::new(file);
        body(&mut out)
            .and_then(|_| out.flush())
            .map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }

    pub fn write_json(&self, name: &str, value: &Value) -> CliResult<PathBuf> {
        let text = serde_json::to_string_pretty(value).map_err(|source| CliError::Json {
            context: name.into(),
            source,
        })?;
        self.write_with(name, |out| writeln!(out, "{text}"))
    }
}
