//! Command-line harness: configuration, dispatch, fitting and report emission.
//!
//! Every subcommand writes its artifacts under `--output` with fixed file
//! names and returns [`CliError::IdentityFailed`] after writing when a
//! checked identity does not hold.

pub mod fit;
pub mod report;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use dp4_core::constants::{finite_density_product, leading_constant, FieldInvariants};
use dp4_core::geometry::serde_rational;
use dp4_core::jigsaw::{alpha_closed_form, compare_degeneracy, jigsaw_check, slice_census, ClemensEdge, FaceTuple, UnitRank};
use dp4_core::surface::{
    count_line_mod_p, count_mod_p, cumulative, direct_count_with, z_divisor_histogram, DirectMethod, GroundRing,
};
use dp4_core::torsor::{torsor_count, torsor_fast_histogram, TorsorMethod};
use dp4_core::Rational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use thiserror::Error;

pub use fit::{fit_log_quadratic, log_spaced, FitResult};
pub use report::{counts_from_csv, counts_to_csv, emit_report, CountRow, Format};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("identity failed: {0}")]
    IdentityFailed(String),
    #[error("i/o failure: {0}")]
    IoFailure(String),
    #[error("degenerate design matrix: {0}")]
    DegenerateDesignMatrix(String),
    #[error("computation failed: {0}")]
    Computation(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::IdentityFailed(_) => 1,
            Self::ConfigInvalid(_) => 2,
            Self::IoFailure(_) => 3,
            Self::DegenerateDesignMatrix(_) | Self::Computation(_) => 4,
        }
    }
}

fn computation<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Computation(e.to_string())
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    serde_rational::parse(s)
}

fn parse_ring(s: &str) -> Result<GroundRing, String> {
    match s {
        "Z" | "z" => Ok(GroundRing::RationalIntegers),
        "Z[i]" | "z[i]" | "Zi" => Ok(GroundRing::GaussianIntegers),
        _ => Err(format!("unknown ring {s:?}; expected Z or Z[i]")),
    }
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map(usize::from).unwrap_or(1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DirectArg {
    TripleLoop,
    Divisor,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TorsorArg {
    Naive,
    Fast,
}

#[derive(Clone, Debug, Parser)]
#[command(name = "dp4", version, about = "Counting, jigsaw and constant checks for a singular quartic del Pezzo surface")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Directory receiving the artifacts.
    #[arg(long, global = true, default_value = ".")]
    pub output: PathBuf,
    /// Output format for count tables.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, global = true, env = "DP4_THREADS", default_value_t = default_threads())]
    pub threads: usize,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Leave `elapsed_s` empty so that outputs are byte-identical across runs.
    #[arg(long, global = true)]
    pub no_timing: bool,
}

#[derive(Clone, Debug, Subcommand)]
pub enum Command {
    /// Integral points on the surface by direct search.
    Count {
        #[arg(long = "bound", required = true, num_args = 1.., value_parser = parse_rational)]
        bounds: Vec<Rational>,
        #[arg(long, default_value = "Z", value_parser = parse_ring)]
        ring: GroundRing,
        #[arg(long, value_enum, default_value_t = DirectArg::Divisor)]
        method: DirectArg,
    },
    /// Integral points counted on the universal torsor.
    TorsorCount {
        #[arg(long = "bound", required = true, num_args = 1.., value_parser = parse_rational)]
        bounds: Vec<Rational>,
        #[arg(long, value_enum, default_value_t = TorsorArg::Fast)]
        method: TorsorArg,
    },
    /// Direct and torsor counts for every integer bound up to `--bound`.
    Compare {
        #[arg(long)]
        bound: u64,
    },
    /// Points of the surface off the lines over F_p.
    Modp {
        #[arg(long = "p", num_args = 1.., default_values_t = [2u64, 3, 5, 7, 11, 13])]
        primes: Vec<u64>,
    },
    /// Face volumes and the partition identities.
    Jigsaw {
        #[arg(long, default_value_t = 1)]
        q: u32,
        /// Face compared against the degeneracy oracle, e.g. "57,57".
        #[arg(long)]
        reference: Option<String>,
    },
    /// Closed form of alpha, optionally checked against the face sum.
    Alpha {
        #[arg(long, default_value_t = 0)]
        q: u32,
        #[arg(long)]
        verify: bool,
    },
    /// Cross sections of the unit-rank-one faces.
    Slices {
        #[arg(long = "a1", num_args = 1.., value_parser = parse_rational, default_values = ["1/5", "2/5", "3/5"])]
        a1: Vec<Rational>,
        /// Values of a0; defaults to (1 + a1)/2 and 9/10.
        #[arg(long = "a0", num_args = 1.., value_parser = parse_rational)]
        a0: Vec<Rational>,
        /// Extra a0 values drawn with `--seed`.
        #[arg(long, default_value_t = 0)]
        samples: usize,
    },
    /// Predicted leading constant for a number field.
    Constant {
        /// Built-in field label: Q, Q(i), Q(sqrt(-3)), Q(sqrt(2)).
        #[arg(long, default_value = "Q")]
        field: String,
        /// JSON file with field invariants; overrides `--field`.
        #[arg(long)]
        field_file: Option<PathBuf>,
        #[arg(long, default_value_t = 10_000_000)]
        prime_bound: u64,
    },
    /// Torsor counts on a log-spaced grid and the log-quadratic fit.
    Fit {
        #[arg(long = "bound", num_args = 1.., value_parser = parse_rational)]
        bounds: Vec<Rational>,
        #[arg(long, default_value_t = 1e4)]
        min: f64,
        #[arg(long, default_value_t = 1e7)]
        max: f64,
        #[arg(long, default_value_t = 20)]
        points: usize,
    },
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.threads == 0 {
            return Err(CliError::ConfigInvalid("--threads must be at least 1".into()));
        }
        let bounds = match &self.command {
            Command::Count { bounds, .. } | Command::TorsorCount { bounds, .. } | Command::Fit { bounds, .. } => {
                bounds.as_slice()
            }
            _ => &[],
        };
        if bounds.iter().any(|b| *b <= Rational::from_integer(0.into())) {
            return Err(CliError::ConfigInvalid("bounds must be positive".into()));
        }
        if bounds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::ConfigInvalid("bounds must be strictly ascending".into()));
        }
        match &self.command {
            Command::Compare { bound: 0 } => Err(CliError::ConfigInvalid("--bound must be positive".into())),
            Command::Fit { bounds, min, max, points } if bounds.is_empty() && !(1.0 < *min && min < max && *points >= 4) => {
                Err(CliError::ConfigInvalid("fit grid needs 1 < min < max and at least 4 points".into()))
            }
            _ => Ok(()),
        }
    }
}

/// What a successful run produced.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    /// Deterministic summary for stdout.
    pub summary: Vec<String>,
    pub files: Vec<PathBuf>,
}

/// Validates the configuration, then dispatches inside a pool of `threads` workers.
pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| CliError::ConfigInvalid(e.to_string()))?;
    pool.install(|| dispatch(config))
}

fn unit_rank(q: u32) -> UnitRank {
    UnitRank::new(q)
}

fn dispatch(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let timing = !cfg.no_timing;
    let out = cfg.output.as_path();
    match &cfg.command {
        Command::Count { bounds, ring, method } => {
            let field = match ring {
                GroundRing::GaussianIntegers => FieldInvariants::gaussian(),
                _ => FieldInvariants::rationals(),
            };
            let m = match method {
                DirectArg::TripleLoop => DirectMethod::TripleLoop,
                DirectArg::Divisor => DirectMethod::Divisor,
            };
            let rows = bounds
                .iter()
                .map(|b| {
                    let r = direct_count_with(b, *ring, m).map_err(computation)?;
                    CountRow::from_result(&r, &field, timing)
                })
                .collect::<Result<Vec<_>, _>>()?;
            count_outcome(&rows, cfg.format, out)
        }
        Command::TorsorCount { bounds, method } => {
            let m = match method {
                TorsorArg::Naive => TorsorMethod::Naive,
                TorsorArg::Fast => TorsorMethod::Fast,
            };
            let field = FieldInvariants::rationals();
            let rows = bounds
                .iter()
                .map(|b| {
                    let r = torsor_count(b, m).map_err(computation)?;
                    CountRow::from_result(&r, &field, timing)
                })
                .collect::<Result<Vec<_>, _>>()?;
            count_outcome(&rows, cfg.format, out)
        }
        Command::Compare { bound } => compare(*bound, out),
        Command::Modp { primes } => modp(primes, out),
        Command::Jigsaw { q, reference } => jigsaw(*q, reference.as_deref(), out),
        Command::Alpha { q, verify } => alpha(*q, *verify),
        Command::Slices { a1, a0, samples } => slices(a1, a0, *samples, cfg.seed, out),
        Command::Constant { field, field_file, prime_bound } => constant(field, field_file.as_deref(), *prime_bound, out),
        Command::Fit { bounds, min, max, points } => {
            let grid: Vec<u64> = if bounds.is_empty() {
                log_spaced(*min, *max, *points)
            } else {
                bounds.iter().map(|b| b.floor().to_integer().to_u64().unwrap_or(0)).collect()
            };
            fit(&grid, cfg.format, timing, out)
        }
    }
}

fn count_outcome(rows: &[CountRow], format: Format, out: &Path) -> Result<Outcome, CliError> {
    let path = emit_report(rows, format, out)?;
    let summary = rows
        .iter()
        .map(|r| {
            let ratio = r.ratio.map(|x| format!("{x:.6}")).unwrap_or_else(|| "-".into());
            format!("B={} N={} ratio={} ({})", r.bound, r.count, ratio, r.method)
        })
        .collect();
    Ok(Outcome { summary, files: vec![path] })
}

fn compare(bound: u64, out: &Path) -> Result<Outcome, CliError> {
    let (direct, torsor) = rayon::join(
        || cumulative(&z_divisor_histogram(bound)),
        || cumulative(&torsor_fast_histogram(bound)),
    );
    let mut table = String::from("B,direct,torsor,status\n");
    let mut mismatches = Vec::new();
    for b in 1..=bound as usize {
        let ok = direct[b] == torsor[b];
        if !ok {
            mismatches.push(b);
        }
        table.push_str(&format!("{b},{},{},{}\n", direct[b], torsor[b], if ok { "ok" } else { "MISMATCH" }));
    }
    let path = report::emit_text(&table, out, "compare.csv")?;
    if let Some(b) = mismatches.first() {
        return Err(CliError::IdentityFailed(format!(
            "direct and torsor counts differ at {} bounds, first B={b}",
            mismatches.len()
        )));
    }
    Ok(Outcome {
        summary: vec![format!("compare: direct = torsor for every B in 1..={bound} (N({bound}) = {})", direct[bound as usize])],
        files: vec![path],
    })
}

fn modp(primes: &[u64], out: &Path) -> Result<Outcome, CliError> {
    let mut table = String::from("p,count,expected,status\n");
    let mut summary = Vec::new();
    let mut failed = Vec::new();
    for &p in primes {
        let count = count_mod_p(p).map_err(|e| CliError::ConfigInvalid(e.to_string()))?;
        let line = count_line_mod_p(p).map_err(|e| CliError::ConfigInvalid(e.to_string()))?;
        let expected = p * p + p;
        let ok = count == expected && line == p + 1;
        if !ok {
            failed.push(p);
        }
        let row = format!("{p},{count},{expected},{}", if ok { "ok" } else { "FAIL" });
        table.push_str(&row);
        table.push('\n');
        summary.push(row);
    }
    let path = report::emit_text(&table, out, "modp.csv")?;
    if !failed.is_empty() {
        return Err(CliError::IdentityFailed(format!("local density count fails for p in {failed:?}")));
    }
    Ok(Outcome { summary, files: vec![path] })
}

#[derive(Serialize)]
struct JigsawDocument {
    report: dp4_core::jigsaw::JigsawReport,
    degeneracy: dp4_core::jigsaw::DegeneracyComparison,
}

fn jigsaw(q: u32, reference: Option<&str>, out: &Path) -> Result<Outcome, CliError> {
    let q = unit_rank(q);
    let reference = match reference {
        Some(s) => s.parse::<FaceTuple>().map_err(|e| CliError::ConfigInvalid(e.to_string()))?,
        None => FaceTuple::uniform(ClemensEdge::E57, q),
    };
    let report = jigsaw_check(q).map_err(|e| match e {
        dp4_core::jigsaw::JigsawError::PartitionFailure(m) => CliError::IdentityFailed(m),
        other => computation(other),
    })?;
    let degeneracy = compare_degeneracy(q, &reference).map_err(|e| CliError::ConfigInvalid(e.to_string()))?;
    let agree = degeneracy.agree;
    let summary = vec![
        format!("q={} faces={} alpha_sum={} closed_form={}", q.get(), report.per_face.len(), report.alpha_sum, report.alpha_closed),
        format!(
            "volume-zero faces: {} (oracle agrees: {}); reference ({}) volume {}",
            report.degenerate_faces.len(),
            agree,
            degeneracy.reference_face,
            degeneracy.reference_volume
        ),
    ];
    let path = report::emit_json(&JigsawDocument { report, degeneracy }, out, "jigsaw.json")?;
    if !agree {
        return Err(CliError::IdentityFailed("volume-zero faces differ from the strict-feasibility oracle".into()));
    }
    Ok(Outcome { summary, files: vec![path] })
}

fn alpha(q: u32, verify: bool) -> Result<Outcome, CliError> {
    let q = unit_rank(q);
    let closed = alpha_closed_form(q);
    let mut summary = vec![format!("alpha(q={}) = {closed}", q.get())];
    if verify {
        let r = jigsaw_check(q).map_err(|e| CliError::IdentityFailed(e.to_string()))?;
        summary.push(format!("face sum = {}", r.alpha_sum));
    }
    Ok(Outcome { summary, files: vec![] })
}

#[derive(Serialize)]
struct SliceDocument {
    censuses: Vec<dp4_core::jigsaw::SliceCensus>,
    /// Positive-piece counts keyed by a1; all a0 agree when invariant.
    counts: std::collections::BTreeMap<String, Vec<usize>>,
    invariant_in_a0: bool,
}

fn slices(a1s: &[Rational], a0s: &[Rational], samples: usize, seed: u64, out: &Path) -> Result<Outcome, CliError> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let one = Rational::from_integer(1.into());
    let mut censuses = Vec::new();
    let mut counts = std::collections::BTreeMap::new();
    let mut invariant = true;
    let mut bad = Vec::new();
    for a1 in a1s {
        let mut values: Vec<Rational> = if a0s.is_empty() {
            vec![(&one + a1) / Rational::from_integer(2.into()), Rational::new(9.into(), 10.into())]
        } else {
            a0s.to_vec()
        };
        for _ in 0..samples {
            // a0 uniform on a grid of [a1, 1] with denominator 1000.
            let t = Rational::new(rng.gen_range(0..=1000).into(), 1000.into());
            values.push(a1 + (&one - a1) * t);
        }
        let mut seen = Vec::new();
        for a0 in values.into_iter().filter(|a0| a1 <= a0) {
            let c = slice_census(a1, &a0).map_err(|e| CliError::ConfigInvalid(e.to_string()))?;
            if !c.fills_rectangle || c.pieces.iter().any(|p| !(3..=4).contains(&p.vertices.len())) {
                bad.push(format!("a1={a1}, a0={a0}"));
            }
            seen.push(c.positive_count);
            censuses.push(c);
        }
        invariant &= seen.windows(2).all(|w| w[0] == w[1]);
        counts.insert(serde_rational::to_string(a1), seen);
    }
    let summary = counts
        .iter()
        .map(|(a1, c)| format!("a1={a1}: positive pieces {c:?}"))
        .collect();
    let path = report::emit_json(&SliceDocument { censuses, counts, invariant_in_a0: invariant }, out, "slices.json")?;
    if !invariant || !bad.is_empty() {
        return Err(CliError::IdentityFailed(format!("slice census not invariant or not a tiling: {bad:?}")));
    }
    Ok(Outcome { summary, files: vec![path] })
}

#[derive(Serialize)]
struct ConstantDocument {
    field: FieldInvariants,
    breakdown: dp4_core::constants::ConstantBreakdown,
    euler_product: Option<dp4_core::constants::EulerProduct>,
}

fn constant(label: &str, file: Option<&Path>, prime_bound: u64, out: &Path) -> Result<Outcome, CliError> {
    let field = match file {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::IoFailure(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| CliError::ConfigInvalid(e.to_string()))?
        }
        None => FieldInvariants::builtin(label)
            .ok_or_else(|| CliError::ConfigInvalid(format!("unknown built-in field {label:?}")))?,
    };
    let breakdown = leading_constant(&field).map_err(|e| CliError::ConfigInvalid(e.to_string()))?;
    let euler_product = finite_density_product(&field, prime_bound).ok();
    let mut summary = vec![format!(
        "{}: c = {} ({}), log exponent {}",
        field.label, breakdown.c.value, breakdown.symbolic_c, breakdown.log_exponent
    )];
    if let Some(e) = &euler_product {
        summary.push(format!("Euler product to {}: {} (tail {:e})", e.prime_bound, e.value, e.tail));
        let limit = breakdown.finite_product.value;
        if !(e.lower <= limit && limit <= e.upper) {
            return Err(CliError::IdentityFailed(format!("Euler product bracket misses {limit}")));
        }
    }
    let path = report::emit_json(&ConstantDocument { field, breakdown, euler_product }, out, "constants.json")?;
    Ok(Outcome { summary, files: vec![path] })
}

/// One grid point of the trend towards the constant.
#[derive(Clone, Debug, Serialize)]
pub struct TrendPoint {
    #[serde(rename = "B")]
    pub bound: u64,
    pub count: u64,
    /// `N / (B (log B)^2)`.
    pub normalized: f64,
    /// `|normalized - c|`.
    pub deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FitDocument {
    pub fit: FitResult,
    pub reference_c: f64,
    pub c2_relative_error: f64,
    pub trend: Vec<TrendPoint>,
}

/// Fast torsor counts at each bound, the fit and the trend of `N/(B log^2 B)`.
pub fn fit_document(grid: &[u64]) -> Result<(FitDocument, Vec<CountRow>), CliError> {
    let field = FieldInvariants::rationals();
    let c = leading_constant(&field).map_err(computation)?.c.value;
    let mut rows = Vec::new();
    let mut samples = Vec::new();
    let mut trend = Vec::new();
    for &b in grid {
        if b < 2 {
            return Err(CliError::ConfigInvalid("fit bounds must exceed 1".into()));
        }
        let r = torsor_count(&Rational::from_integer(b.into()), TorsorMethod::Fast).map_err(computation)?;
        let bf = b as f64;
        let normalized = r.count as f64 / (bf * bf.ln().powi(2));
        trend.push(TrendPoint { bound: b, count: r.count, normalized, deviation: (normalized - c).abs() });
        samples.push((bf, r.count as f64));
        rows.push(CountRow::from_result(&r, &field, true)?);
    }
    let fit = fit_log_quadratic(&samples)?;
    Ok((
        FitDocument { c2_relative_error: (fit.c2 - c).abs() / c, reference_c: c, fit, trend },
        rows,
    ))
}

fn fit(grid: &[u64], format: Format, timing: bool, out: &Path) -> Result<Outcome, CliError> {
    let (doc, mut rows) = fit_document(grid)?;
    if !timing {
        rows.iter_mut().for_each(|r| r.elapsed_s = None);
    }
    let mut files = vec![report::emit_json(&doc, out, "fit.json")?, emit_report(&rows, Format::Csv, out)?];
    if format == Format::Svg {
        let pts: Vec<(f64, f64)> = doc.trend.iter().map(|t| ((t.bound as f64).ln(), t.normalized / doc.reference_c)).collect();
        files.push(report::emit_text(&report::ratio_svg(&pts, "N / (c B log^2 B)"), out, "fit.svg")?);
    }
    Ok(Outcome {
        summary: vec![format!(
            "fit over {} bounds: c2 = {:.6}, c1 = {:.6}, c0 = {:.6}; c = {:.6}, relative error of c2 {:.4}",
            doc.fit.samples, doc.fit.c2, doc.fit.c1, doc.fit.c0, doc.reference_c, doc.c2_relative_error
        )],
        files,
    })
}
