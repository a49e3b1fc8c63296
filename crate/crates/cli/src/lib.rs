//! Commands behind the `siet` binary: design, bounds, simulate and sweep.
//!
//! Each command reads a JSON spec and returns its textual output; the binary
//! only handles argument parsing, file I/O and exit codes.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use siet_core::bounds::{
    check_tuple_feasibility, evaluate_bounds, BoundReport, Constraint, Feasibility, GridPoint,
    Targets,
};
use siet_core::codebook::{
    count_codewords, draw_codewords, Codebook, CodebookFile, CompactCodebook,
};
use siet_core::constellation::{
    build_constellation, max_symbols_per_layer, min_radius_for_dep, Constellation, Layer,
    PackingMode,
};
use siet_core::energy::EnergyModel;
use siet_core::simulator::{estimate_dep, ChannelConfig, DecoderKind};
use siet_core::sweep::{
    frontier, sweep_region, to_csv, LayerCountsMode, ProbabilityGrid, SweepConfig,
};

/// Largest codebook written out word by word; larger ones use the compact form.
pub const ENUMERATION_CAP: u128 = 1_000_000;
/// Default Monte-Carlo trial count.
pub const DEFAULT_TRIALS: u64 = 1_000_000;
const DEFAULT_SEED: u64 = 0;
/// Largest `n·R` for which `M = ⌈2^{nR}⌉` is represented exactly.
const MAX_LOG2_M: f64 = 120.0;
/// Constellations with more symbols than this are not tried by `design`.
const MAX_DESIGN_SYMBOLS: usize = 4096;
/// Per-ring caps `1..=SMALL_CAPS` are always among the design candidates.
const SMALL_CAPS: usize = 64;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("invalid targets: {0}")]
    InvalidTargets(String),
    #[error("infeasible targets; binding constraints: {}", list(binding))]
    InfeasibleTargets {
        binding: Vec<Constraint>,
        /// JSON report with margins, printed on stdout.
        report: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] siet_core::Error),
}

fn list(items: &[Constraint]) -> String {
    if items.is_empty() {
        return "none (no integral type on the grid)".into();
    }
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::InfeasibleTargets { .. } => 1,
            _ => 2,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Options shared by all commands. `None` leaves the spec value in place.
#[derive(Debug, Clone, Default)]
pub struct Options {
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub decoder: Option<DecoderKind>,
    pub packing: Option<PackingMode>,
    pub grid_step: Option<f64>,
    /// `key=value` patches applied to the top-level spec object.
    pub overrides: Vec<String>,
    /// Directory relative codebook paths are resolved against.
    pub base_dir: Option<PathBuf>,
}

pub fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_spec<T: for<'de> Deserialize<'de>>(text: &str, opts: &Options) -> CliResult<T> {
    let mut value: Value =
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("malformed JSON: {e}")))?;
    let object = value
        .as_object_mut()
        .ok_or_else(|| CliError::Input("spec must be a JSON object".into()))?;
    for patch in &opts.overrides {
        let (key, raw) = patch
            .split_once('=')
            .ok_or_else(|| CliError::Input(format!("override `{patch}` is not key=value")))?;
        let parsed = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.into()));
        object.insert(key.to_string(), parsed);
    }
    serde_json::from_value(value).map_err(|e| CliError::Input(e.to_string()))
}

fn grid_total(step: f64) -> CliResult<usize> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(CliError::Input(format!("grid step {step} not in (0,1]")));
    }
    let total = (1.0 / step).round();
    if ((1.0 / step) - total).abs() > 1e-9 * total {
        return Err(CliError::Input(format!(
            "grid step {step} does not divide 1"
        )));
    }
    Ok(total as usize)
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

/// A codebook given inline or as a path to a codebook JSON file.
#[derive(Debug, Clone)]
pub enum CodebookSource {
    Path(PathBuf),
    Inline(CodebookFile),
}

impl<'de> Deserialize<'de> for CodebookSource {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        match Value::deserialize(d)? {
            Value::String(path) => Ok(Self::Path(path.into())),
            other => serde_json::from_value(other)
                .map(Self::Inline)
                .map_err(D::Error::custom),
        }
    }
}

impl CodebookSource {
    fn load(&self, opts: &Options) -> CliResult<CodebookFile> {
        match self {
            Self::Inline(file) => Ok(file.clone()),
            Self::Path(path) => {
                let path = match &opts.base_dir {
                    Some(dir) if path.is_relative() => dir.join(path),
                    _ => path.clone(),
                };
                serde_json::from_str(&read_file(&path)?)
                    .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
            }
        }
    }

    /// Full codebook; compact ones are expanded up to [`ENUMERATION_CAP`].
    fn materialize(&self, opts: &Options) -> CliResult<Codebook> {
        match self.load(opts)? {
            CodebookFile::Full(cb) => Ok(cb),
            CodebookFile::Compact(c) if c.m <= ENUMERATION_CAP => Ok(c.expand()?),
            CodebookFile::Compact(c) => Err(CliError::Input(format!(
                "compact codebook with M = {} exceeds the cap of {ENUMERATION_CAP} codewords",
                c.m
            ))),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSpec {
    pub codebook: CodebookSource,
    pub sigma2: f64,
    #[serde(rename = "B", default)]
    pub b: f64,
    #[serde(default = "one")]
    pub delta: f64,
    #[serde(default)]
    pub model: EnergyModel,
}

fn one() -> f64 {
    1.0
}

pub struct BoundsOutput {
    pub report: BoundReport,
    pub table: String,
    pub json: String,
}

pub fn cmd_bounds(spec_text: &str, opts: &Options) -> CliResult<BoundsOutput> {
    let spec: BoundsSpec = parse_spec(spec_text, opts)?;
    if !(spec.sigma2 > 0.0) || !(0.0..=1.0).contains(&spec.delta) || !spec.b.is_finite() {
        return Err(CliError::Input(
            "need sigma2 > 0, delta in [0,1], finite B".into(),
        ));
    }
    let cb = spec.codebook.materialize(opts)?;
    let report = evaluate_bounds(&cb, spec.sigma2, spec.b, spec.delta, &spec.model)?;
    Ok(BoundsOutput {
        table: report.to_table(),
        json: pretty(&report),
        report,
    })
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSpec {
    pub codebook: CodebookSource,
    pub sigma2: f64,
    #[serde(default)]
    pub trials: Option<u64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub decoder: Option<DecoderKind>,
}

/// Returns the simulation summary as JSON.
pub fn cmd_simulate(spec_text: &str, opts: &Options) -> CliResult<String> {
    let spec: SimulateSpec = parse_spec(spec_text, opts)?;
    let cb = spec.codebook.materialize(opts)?;
    let trials = opts.trials.or(spec.trials).unwrap_or(DEFAULT_TRIALS);
    let seed = opts.seed.or(spec.seed).unwrap_or(DEFAULT_SEED);
    let decoder = opts
        .decoder
        .or(spec.decoder)
        .unwrap_or(DecoderKind::MinDistance);
    let cfg = ChannelConfig::new(spec.sigma2, seed, trials)
        .map_err(|e| CliError::Input(e.to_string()))?;
    let result = estimate_dep(&cb, decoder, &cfg).map_err(|e| match e {
        siet_core::Error::InvalidConfig(msg) => CliError::Input(msg),
        other => other.into(),
    })?;
    Ok(pretty(&result.summary()))
}

#[derive(Debug, Clone, Default)]
pub struct SweepOptions {
    /// Keep only the rate-energy Pareto frontier.
    pub frontier_only: bool,
}

/// Returns the sweep CSV.
pub fn cmd_sweep(spec_text: &str, opts: &Options, sweep_opts: &SweepOptions) -> CliResult<String> {
    let mut cfg: SweepConfig = parse_spec(spec_text, opts)?;
    if let Some(step) = opts.grid_step {
        cfg.p_grid = ProbabilityGrid::Lattice {
            total: grid_total(step)?,
        };
    }
    if let Some(mode) = opts.packing {
        cfg.layer_counts = LayerCountsMode::Packing(mode);
    }
    let out = sweep_region(&cfg).map_err(|e| match e {
        siet_core::Error::GridEmpty | siet_core::Error::NonPositiveInput => {
            CliError::Input(e.to_string())
        }
        other => other.into(),
    })?;
    let points = if sweep_opts.frontier_only {
        if out.points.is_empty() {
            return Err(CliError::Input("no grid point has an integral type".into()));
        }
        frontier(&out.points)?
    } else {
        out.points
    };
    Ok(to_csv(&points, cfg.layers))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignSpec {
    pub n: usize,
    /// Target rate `R`, bits per channel use.
    pub rate_bits: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub sigma2: f64,
    /// Outermost ring amplitude `A_1`.
    pub peak_amplitude: f64,
    /// Maximum number of rings; rings that would reach the origin are dropped.
    pub layers: usize,
    #[serde(default)]
    pub model: EnergyModel,
    #[serde(default)]
    pub grid_step: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DesignOutcome {
    pub verdict: &'static str,
    #[serde(rename = "M")]
    pub m: u128,
    pub radius: f64,
    pub layer_counts: Vec<usize>,
    pub witness: GridPoint,
    /// Present when the codebook was materialized.
    pub report: Option<BoundReport>,
    pub codebook: CodebookFile,
}

#[derive(Serialize)]
struct InfeasibleReport<'a> {
    verdict: &'static str,
    binding: &'a [Constraint],
    #[serde(rename = "M")]
    m: Option<u128>,
    radius: f64,
    layer_counts: Vec<usize>,
    closest: Option<&'a GridPoint>,
}

fn validate_targets(spec: &DesignSpec) -> CliResult<()> {
    let finite = [
        spec.rate_bits,
        spec.b,
        spec.epsilon,
        spec.delta,
        spec.sigma2,
        spec.peak_amplitude,
    ]
    .iter()
    .all(|x| x.is_finite());
    let problem = if !finite {
        Some("targets must be finite")
    } else if spec.n == 0 {
        Some("n must be >= 1")
    } else if spec.rate_bits < 0.0 {
        Some("rate_bits must be >= 0")
    } else if !(spec.epsilon > 0.0 && spec.epsilon <= 1.0) {
        Some("epsilon must lie in (0,1]")
    } else if !(spec.delta > 0.0 && spec.delta <= 1.0) {
        Some("delta must lie in (0,1]")
    } else if !(spec.sigma2 > 0.0) || !(spec.peak_amplitude > 0.0) {
        Some("sigma2 and peak_amplitude must be > 0")
    } else if spec.layers == 0 {
        Some("layers must be >= 1")
    } else {
        None
    };
    match problem {
        Some(p) => Err(CliError::InvalidTargets(p.into())),
        None => Ok(()),
    }
}

/// Common disk radius for the design: the smallest meeting `ε`, or half the
/// peak amplitude when `ε = 1` leaves the error unconstrained.
fn design_radius(spec: &DesignSpec) -> CliResult<f64> {
    if spec.epsilon >= 1.0 {
        return Ok(spec.peak_amplitude / 2.0);
    }
    Ok(min_radius_for_dep(spec.epsilon, spec.n, spec.sigma2)?
        * (1.0 + siet_core::sweep::RADIUS_HEADROOM))
}

/// Ring amplitudes at spacing `2r` below the peak and their packing limits.
fn ring_limits(spec: &DesignSpec, radius: f64, mode: PackingMode) -> CliResult<Vec<(f64, usize)>> {
    let mut rings = Vec::new();
    for c in 0..spec.layers {
        let amplitude = spec.peak_amplitude - 2.0 * radius * c as f64;
        if amplitude <= 0.0 {
            break;
        }
        let limit = match mode {
            PackingMode::Strict if radius > amplitude => 1,
            PackingMode::Paper if radius > 2.0 * amplitude => 1,
            _ => max_symbols_per_layer(amplitude, radius, mode)?,
        };
        rings.push((amplitude, limit));
    }
    Ok(rings)
}

/// Candidate per-ring symbol counts, richest first: the packing limits
/// themselves, then every smaller common cap.
fn candidate_counts(limits: &[usize]) -> Vec<Vec<usize>> {
    let max = limits.iter().copied().max().unwrap_or(1);
    let mut caps: Vec<usize> = limits.to_vec();
    caps.extend(1..=max.min(SMALL_CAPS));
    caps.sort_unstable_by(|a, b| b.cmp(a));
    caps.dedup();
    let mut out: Vec<Vec<usize>> = Vec::new();
    for cap in caps {
        let counts: Vec<usize> = limits.iter().map(|&l| l.min(cap)).collect();
        if counts.iter().sum::<usize>() <= MAX_DESIGN_SYMBOLS && out.last() != Some(&counts) {
            out.push(counts);
        }
    }
    out
}

fn constellation(
    rings: &[(f64, usize)],
    counts: &[usize],
    radius: f64,
) -> CliResult<Constellation> {
    let layers = rings
        .iter()
        .zip(counts)
        .map(|(&(a, _), &l)| Layer::new(a, l, 0.0, radius))
        .collect::<siet_core::Result<Vec<_>>>()?;
    Ok(build_constellation(layers)?)
}

fn materialize(
    cst: Constellation,
    witness: &GridPoint,
    m: u128,
    seed: u64,
) -> CliResult<CodebookFile> {
    let t = &witness.symbol_type;
    if count_codewords(t).as_u128().is_some_and(|count| count < m) {
        return Err(CliError::InfeasibleTargets {
            binding: vec![Constraint::Rate],
            report: String::new(),
        });
    }
    if m > ENUMERATION_CAP {
        return Ok(CodebookFile::Compact(CompactCodebook {
            constellation: cst,
            type_counts: t.to_map(),
            m,
            seed,
        }));
    }
    let words = draw_codewords(t, m as usize, seed)?;
    Ok(CodebookFile::Full(Codebook::new(cst, t.n(), words)?))
}

/// Searches for a constant-composition code meeting `(n, R, B, ε, δ)` and
/// returns it with its bound report.
pub fn cmd_design(spec_text: &str, opts: &Options) -> CliResult<DesignOutcome> {
    let mut spec: DesignSpec = parse_spec(spec_text, opts)?;
    if opts.grid_step.is_some() {
        spec.grid_step = opts.grid_step;
    }
    validate_targets(&spec)?;
    let mode = opts.packing.unwrap_or_default();
    let seed = opts.seed.or(spec.seed).unwrap_or(DEFAULT_SEED);
    let total = match spec.grid_step {
        Some(step) => grid_total(step)?,
        None => spec.n,
    };
    let radius = design_radius(&spec)?;
    let rings = ring_limits(&spec, radius, mode)?;
    let limits: Vec<usize> = rings.iter().map(|r| r.1).collect();

    let log2_m = spec.n as f64 * spec.rate_bits;
    let ceiling = (limits.iter().sum::<usize>() as f64).log2();
    let infeasible = |binding: Vec<Constraint>, m, closest: Option<&GridPoint>| {
        let report = pretty(&InfeasibleReport {
            verdict: "INFEASIBLE",
            binding: &binding,
            m,
            radius,
            layer_counts: limits.clone(),
            closest,
        });
        CliError::InfeasibleTargets { binding, report }
    };
    if spec.rate_bits > ceiling {
        return Err(infeasible(vec![Constraint::Rate], None, None));
    }
    if log2_m > MAX_LOG2_M {
        return Err(CliError::InvalidTargets(format!(
            "n·R = {log2_m} bits exceeds the supported {MAX_LOG2_M}"
        )));
    }
    let m = (2f64.powf(log2_m).ceil() as u128).max(1);
    let targets = Targets {
        n: spec.n,
        m,
        epsilon: spec.epsilon,
        b: spec.b,
        delta: spec.delta,
        sigma2: spec.sigma2,
    };

    let mut binding: Option<Vec<Constraint>> = None;
    let mut closest: Option<GridPoint> = None;
    for counts in candidate_counts(&limits) {
        let cst = constellation(&rings, &counts, radius)?;
        match check_tuple_feasibility(&targets, &cst, total, &spec.model)? {
            Feasibility::Feasible { witness } => {
                let codebook = materialize(cst, &witness, m, seed)?;
                let report = match &codebook {
                    CodebookFile::Full(cb) => Some(evaluate_bounds(
                        cb,
                        spec.sigma2,
                        spec.b,
                        spec.delta,
                        &spec.model,
                    )?),
                    CodebookFile::Compact(_) => None,
                };
                return Ok(DesignOutcome {
                    verdict: "FEASIBLE",
                    m,
                    radius,
                    layer_counts: counts,
                    witness,
                    report,
                    codebook,
                });
            }
            Feasibility::Infeasible {
                binding: b,
                closest: c,
            } => {
                // A candidate with no integral type says nothing about the binding set.
                if c.is_some() {
                    binding = Some(match binding {
                        None => b,
                        Some(prev) => prev.into_iter().filter(|x| b.contains(x)).collect(),
                    });
                }
                let fewer = |a: &GridPoint, b: &GridPoint| {
                    a.margins.violated().len() < b.margins.violated().len()
                };
                if let Some(c) = c {
                    if closest.as_ref().is_none_or(|prev| fewer(&c, prev)) {
                        closest = Some(c);
                    }
                }
            }
        }
    }
    Err(infeasible(
        binding.unwrap_or_default(),
        Some(m),
        closest.as_ref(),
    ))
}

/// Design output as written by the binary: the summary JSON, with the
/// codebook split out when it goes to its own file.
pub fn design_summary(outcome: &DesignOutcome, codebook_path: Option<&Path>) -> String {
    let mut value = serde_json::to_value(outcome).expect("serializable");
    if let Some(path) = codebook_path {
        value["codebook"] = Value::String(path.display().to_string());
    }
    pretty(&value)
}

pub fn codebook_json(outcome: &DesignOutcome) -> String {
    pretty(&outcome.codebook)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_steps() {
        assert_eq!(grid_total(0.1).unwrap(), 10);
        assert_eq!(grid_total(1.0 / 80.0).unwrap(), 80);
        assert!(grid_total(0.3).is_err());
        assert!(grid_total(0.0).is_err());
    }

    #[test]
    fn candidates_richest_first() {
        let c = candidate_counts(&[5, 3]);
        assert_eq!(
            c,
            vec![vec![5, 3], vec![4, 3], vec![3, 3], vec![2, 2], vec![1, 1]]
        );
        let big = candidate_counts(&[5000, 10]);
        assert_eq!(big[0], vec![SMALL_CAPS, 10]);
    }

    #[test]
    fn rings_stop_before_origin() {
        let spec: DesignSpec = serde_json::from_str(
            r#"{"n":4,"rate_bits":0,"B":0,"epsilon":1,"delta":1,"sigma2":1,"peak_amplitude":2,"layers":5}"#,
        )
        .unwrap();
        let r = design_radius(&spec).unwrap();
        assert_eq!(r, 1.0);
        let rings = ring_limits(&spec, r, PackingMode::Strict).unwrap();
        assert_eq!(rings, vec![(2.0, 6)]);
    }

    #[test]
    fn overrides_patch_the_spec() {
        let opts = Options {
            overrides: vec!["n=7".into(), "layers=2".into()],
            ..Options::default()
        };
        let spec: DesignSpec = parse_spec(
            r#"{"n":4,"rate_bits":0,"B":0,"epsilon":1,"delta":1,"sigma2":1,"peak_amplitude":2,"layers":5}"#,
            &opts,
        )
        .unwrap();
        assert_eq!((spec.n, spec.layers), (7, 2));
        assert!(matches!(
            parse_spec::<DesignSpec>("[1]", &Options::default()),
            Err(CliError::Input(_))
        ));
    }
}
