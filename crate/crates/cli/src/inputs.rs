use std::fs;
use std::path::Path;

use num_complex::Complex;
use skewfiber::petals::{FiberPolynomial, VerticalMap};
use skewfiber::series::GermSpec;
use skewfiber::{RotationNumber, RotationSpec, SkewGerm};

use crate::args::MapArgs;
use crate::error::{CliError, CliResult};

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

/// Inline JSON when the argument starts with `{`, a file path otherwise.
pub fn rotation(arg: &str) -> CliResult<(RotationSpec, RotationNumber)> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        read(Path::new(arg))?
    };
    let spec: RotationSpec = serde_json::from_str(&text).map_err(|source| CliError::Json {
        context: "rotation".into(),
        source,
    })?;
    let rot = spec.to_rotation()?;
    Ok((spec, rot))
}

pub fn germ_spec(path: &Path) -> CliResult<GermSpec> {
    serde_json::from_str(&read(path)?).map_err(|source| CliError::Json {
        context: path.display().to_string(),
        source,
    })
}

/// `"re,im"`.
pub fn complex(arg: &str) -> CliResult<Complex<f64>> {
    let parts: Vec<&str> = arg.split(',').map(str::trim).collect();
    let bad = || CliError::Usage(format!("expected \"re,im\", got {arg:?}"));
    if parts.len() != 2 {
        return Err(bad());
    }
    let re: f64 = parts[0].parse().map_err(|_| bad())?;
    let im: f64 = parts[1].parse().map_err(|_| bad())?;
    if !re.is_finite() || !im.is_finite() {
        return Err(bad());
    }
    Ok(Complex::new(re, im))
}

/// `"re,im;re,im;..."`, lowest degree first.
pub fn polynomial(arg: &str) -> CliResult<Vec<Complex<f64>>> {
    let coeffs = arg
        .split(';')
        .filter(|s| !s.trim().is_empty())
        .map(complex)
        .collect::<CliResult<Vec<_>>>()?;
    if coeffs.is_empty() {
        return Err(CliError::Usage("empty polynomial".into()));
    }
    Ok(coeffs)
}

pub enum Map {
    Germ(SkewGerm<f64>),
    Poly(FiberPolynomial<f64>),
}

impl Map {
    pub fn load(args: &MapArgs) -> CliResult<Self> {
        match (&args.germ, &args.poly) {
            (Some(path), None) => Ok(Map::Germ(germ_spec(path)?.to_germ()?)),
            (None, Some(p)) => Ok(Map::Poly(FiberPolynomial(polynomial(p)?))),
            _ => Err(CliError::Usage("give exactly one of --germ and --poly".into())),
        }
    }

    pub fn as_vertical(&self) -> &dyn VerticalMap<f64> {
        match self {
            Map::Germ(g) => g,
            Map::Poly(p) => p,
        }
    }

    /// Fiber map over `z = 0`.
    pub fn central_fiber(&self) -> Vec<Complex<f64>> {
        match self {
            Map::Germ(g) => g.fiber_jet(),
            Map::Poly(p) => p.0.clone(),
        }
    }
}
