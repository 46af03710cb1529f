use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "skewfiber", version, about = "Small divisors, fiber normal forms and parabolic orbit diagnostics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "subcommand", rename_all = "snake_case")]
pub enum Command {
    /// Divisor table, Brjuno partial sums and Cremer exponents.
    Brjuno(BrjunoArgs),
    /// Normal form of a germ, re-verified by replaying the change log.
    Normalize(NormalizeArgs),
    /// Growth profile of the linear or greedy quadratic construction.
    Cremer(CremerArgs),
    /// One orbit with vertical derivative logs and its classification.
    Orbit(OrbitArgs),
    /// Classification grid of one fiber slice.
    Slice(SliceArgs),
    /// Critical-orbit check of the fiber map over z = 0.
    Hypotheses(HypothesesArgs),
    /// Seeded petal invariance and repelling expansion checks.
    Petals(PetalArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct OutArgs {
    /// Output directory (created if missing).
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct BrjunoArgs {
    /// Rotation JSON, inline or a file path.
    #[arg(long)]
    pub rotation: String,
    /// Largest Brjuno index K.
    #[arg(long, default_value_t = 10)]
    pub k_max: u32,
    /// Table size; defaults to 2^(K+1).
    #[arg(long)]
    pub m_max: Option<usize>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct NormalizeArgs {
    #[arg(long)]
    pub germ: PathBuf,
    /// Normalization depth h.
    #[arg(long, default_value_t = 2)]
    pub depth: usize,
    /// Override the germ's z-truncation N.
    #[arg(long)]
    pub trunc_z: Option<usize>,
    /// Override the germ's w-truncation D_w.
    #[arg(long)]
    pub trunc_w: Option<usize>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    Linear,
    Greedy,
}

#[derive(Debug, Args, Serialize)]
pub struct CremerArgs {
    #[arg(long)]
    pub rotation: String,
    #[arg(long, value_enum, default_value_t = Construction::Greedy)]
    pub construction: Construction,
    #[arg(long, default_value_t = 500)]
    pub m_max: usize,
    /// Linear construction: phi_0 as "re,im".
    #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
    pub phi0: String,
    #[command(flatten)]
    pub out: OutArgs,
}

/// Vertical map source: a germ file or a plain fiber polynomial.
#[derive(Debug, Args, Serialize)]
#[group(required = true, multiple = false)]
pub struct MapArgs {
    #[arg(long)]
    pub germ: Option<PathBuf>,
    /// Fiber polynomial coefficients from w^0 up, as "re,im;re,im;...".
    #[arg(long, allow_hyphen_values = true)]
    pub poly: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct IterationArgs {
    #[arg(long, default_value_t = 10_000)]
    pub n_max: usize,
    #[arg(long, default_value_t = 1e6)]
    pub escape: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub cycle_tol: f64,
    /// Consecutive qualifying steps before a verdict.
    #[arg(long, default_value_t = 50)]
    pub confirm: usize,
    #[arg(long, default_value_t = 0.2)]
    pub arg_tol: f64,
    #[arg(long, default_value_t = 64)]
    pub max_period: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct OrbitArgs {
    #[command(flatten)]
    pub map: MapArgs,
    #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
    pub z0: String,
    #[arg(long, allow_hyphen_values = true)]
    pub w0: String,
    /// Keep iterating after a verdict until n_max or escape.
    #[arg(long)]
    pub run_to_end: bool,
    #[command(flatten)]
    pub iteration: IterationArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct SliceArgs {
    #[command(flatten)]
    pub map: MapArgs,
    #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
    pub z0: String,
    /// "re0,re1,im0,im1,res".
    #[arg(long, allow_hyphen_values = true)]
    pub grid: String,
    /// Worker threads; the output does not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
    #[command(flatten)]
    pub iteration: IterationArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct HypothesesArgs {
    #[command(flatten)]
    pub map: MapArgs,
    #[command(flatten)]
    pub iteration: IterationArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct PetalArgs {
    /// Germ to normalize and reduce; without it the tail-free model is used.
    #[arg(long)]
    pub germ: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    pub depth: usize,
    /// Model order k (ignored with --germ).
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Model coefficient b as "re,im" (ignored with --germ).
    #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
    pub b: String,
    #[arg(long, default_value_t = skewfiber::petals::DEFAULT_RHO)]
    pub rho: f64,
    #[arg(long, default_value_t = skewfiber::petals::DEFAULT_ETA)]
    pub eta: f64,
    /// Sampled |z| bound for the invariance check.
    #[arg(long, default_value_t = 0.0)]
    pub z_band: f64,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutArgs,
}
