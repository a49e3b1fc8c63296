//! Information-energy sweeps over DEP targets and layer probabilities.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    achievable_dep_equal_radii, achievable_rate_geometric, dep_lower_bound_real, rate_upper_exact,
    rate_upper_stirling, simplex_lattice,
};
use crate::codebook::{type_from_layer_counts, LayerProbabilities};
use crate::constellation::{
    build_constellation, max_symbols_per_layer, min_radius_for_dep, Constellation, Layer,
    PackingMode,
};
use crate::energy::{constant_composition_energy, outage_probability, EnergyModel, EnergyProfile};
use crate::error::{Error, Result};

/// Relative headroom added to the minimal radius so the achievable DEP stays
/// at or below the target after rounding.
pub const RADIUS_HEADROOM: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayerCountsMode {
    /// Fixed `L_c`; a grid point is skipped when a ring cannot hold its count
    /// without overlapping disks.
    Fixed(Vec<usize>),
    /// `L_c` from the packing rule at each ring's amplitude and radius.
    Packing(PackingMode),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbabilityGrid {
    /// Every `k/total` composition over the layers.
    Lattice {
        total: usize,
    },
    Explicit(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n: usize,
    pub layers: usize,
    pub peak_amplitude: f64,
    pub layer_counts: LayerCountsMode,
    pub epsilon_grid: Vec<f64>,
    pub p_grid: ProbabilityGrid,
    pub sigma2: f64,
    #[serde(default)]
    pub model: EnergyModel,
    /// Energy requirement for the `eop` column; defaults to each point's own energy.
    #[serde(default)]
    pub energy_requirement: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DepBoundKind {
    Necessary,
    Achievable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub probs: LayerProbabilities,
    pub epsilon: f64,
    pub radii: Vec<f64>,
    pub amplitudes: Vec<f64>,
    pub layer_counts: Vec<usize>,
    pub rate_bits: f64,
    pub rate_nats: f64,
    /// Stirling relaxation, nats.
    pub rate_stirling: f64,
    /// Geometric packing bound, bits.
    pub rate_achievable_bits: f64,
    pub energy_total: f64,
    pub energy_per_cu: f64,
    pub eop: f64,
    /// Necessary DEP bound for the code holding every word of the type.
    pub dep_lower: f64,
    pub dep_achievable: f64,
    /// What `epsilon` constrains: the radii are sized so the achievable DEP meets it.
    pub dep_bound_kind: DepBoundKind,
}

/// A grid point left out of the sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedPoint {
    pub epsilon: f64,
    pub probs: Option<Vec<f64>>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepOutput {
    pub points: Vec<SweepPoint>,
    pub skipped: Vec<SkippedPoint>,
}

/// Equal-radius constellation for one DEP target: ring amplitudes at minimal
/// spacing `A_{c+1} = A_c − 2r` below the peak.
pub fn constellation_for_epsilon(cfg: &SweepConfig, epsilon: f64) -> Result<Constellation> {
    let radius = min_radius_for_dep(epsilon, cfg.n, cfg.sigma2)? * (1.0 + RADIUS_HEADROOM);
    let mut layers = Vec::with_capacity(cfg.layers);
    for c in 0..cfg.layers {
        let amplitude = cfg.peak_amplitude - 2.0 * radius * c as f64;
        if amplitude <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "layer {c} amplitude {amplitude} not positive at radius {radius}"
            )));
        }
        let count = match &cfg.layer_counts {
            LayerCountsMode::Fixed(counts) => {
                let count = *counts.get(c).ok_or_else(|| {
                    Error::InvalidConfig(format!("no symbol count for layer {c}"))
                })?;
                let limit = max_symbols_per_layer(amplitude, radius, PackingMode::Strict)?;
                if count > limit {
                    return Err(Error::OverlappingRegions(format!(
                        "layer {c}: {count} symbols exceed the packing limit {limit}"
                    )));
                }
                count
            }
            LayerCountsMode::Packing(mode) => max_symbols_per_layer(amplitude, radius, *mode)?,
        };
        layers.push(Layer::new(amplitude, count, 0.0, radius)?);
    }
    build_constellation(layers)
}

fn probability_vectors(cfg: &SweepConfig) -> Result<Vec<Vec<f64>>> {
    let grid = match &cfg.p_grid {
        ProbabilityGrid::Lattice { total } if *total > 0 => simplex_lattice(cfg.layers, *total)
            .into_iter()
            .map(|k| k.into_iter().map(|k| k as f64 / *total as f64).collect())
            .collect(),
        ProbabilityGrid::Lattice { .. } => Vec::new(),
        ProbabilityGrid::Explicit(list) => list.clone(),
    };
    if grid.is_empty() {
        return Err(Error::GridEmpty);
    }
    Ok(grid)
}

fn evaluate_point(
    cfg: &SweepConfig,
    cst: &Constellation,
    epsilon: f64,
    p: &[f64],
) -> Result<SweepPoint> {
    let probs = LayerProbabilities::new(p.to_vec())?;
    let t = type_from_layer_counts(cfg.n, &probs, &cst.layer_counts())?;
    let rate = rate_upper_exact(&t);
    let probabilities = t.probabilities();
    let energy_total = constant_composition_energy(&t, cst, &cfg.model)?;
    let profile = EnergyProfile::from_energies(vec![energy_total])?;
    let requirement = cfg.energy_requirement.unwrap_or(energy_total);
    let radius = cst.layers()[0].radius;
    let log_count = rate.nats * cfg.n as f64;
    let dep_lower = if log_count >= 2f64.ln() && cst.len() >= 2 {
        dep_lower_bound_real(log_count.exp(), cfg.n, &probabilities, cst, cfg.sigma2)?
    } else {
        0.0
    };
    Ok(SweepPoint {
        probs,
        epsilon,
        radii: cst.layers().iter().map(|l| l.radius).collect(),
        amplitudes: cst.layers().iter().map(|l| l.amplitude).collect(),
        layer_counts: cst.layer_counts(),
        rate_bits: rate.bits,
        rate_nats: rate.nats,
        rate_stirling: rate_upper_stirling(cfg.n, &probabilities)?.nats,
        rate_achievable_bits: achievable_rate_geometric(cst)?,
        energy_total,
        energy_per_cu: energy_total / cfg.n as f64,
        eop: outage_probability(&profile, requirement),
        dep_lower,
        dep_achievable: achievable_dep_equal_radii(cfg.n, radius, cfg.sigma2),
        dep_bound_kind: DepBoundKind::Achievable,
    })
}

fn lexicographic(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(a.len().cmp(&b.len()))
}

/// Evaluates every `(ε, p)` pair; output sorted by energy, then `p`, then `ε`.
pub fn sweep_region(cfg: &SweepConfig) -> Result<SweepOutput> {
    if cfg.epsilon_grid.is_empty() {
        return Err(Error::GridEmpty);
    }
    if cfg.n == 0 || cfg.layers == 0 || !(cfg.peak_amplitude > 0.0) || !(cfg.sigma2 > 0.0) {
        return Err(Error::NonPositiveInput);
    }
    let grid = probability_vectors(cfg)?;
    let mut skipped = Vec::new();
    let mut tasks = Vec::new();
    for &epsilon in &cfg.epsilon_grid {
        match constellation_for_epsilon(cfg, epsilon) {
            Ok(cst) => tasks.extend(grid.iter().map(|p| (epsilon, cst.clone(), p.clone()))),
            Err(e) => skipped.push(SkippedPoint {
                epsilon,
                probs: None,
                reason: e.to_string(),
            }),
        }
    }

    let results: Vec<_> = tasks
        .par_iter()
        .map(|(epsilon, cst, p)| evaluate_point(cfg, cst, *epsilon, p))
        .collect();
    let mut points = Vec::new();
    for ((epsilon, _, p), result) in tasks.iter().zip(results) {
        match result {
            Ok(point) => points.push(point),
            Err(e @ (Error::NonIntegralType { .. } | Error::InvalidType(_))) => {
                skipped.push(SkippedPoint {
                    epsilon: *epsilon,
                    probs: Some(p.clone()),
                    reason: e.to_string(),
                })
            }
            Err(e) => return Err(e),
        }
    }
    points.sort_by(|a, b| {
        a.energy_total
            .total_cmp(&b.energy_total)
            .then_with(|| lexicographic(a.probs.as_slice(), b.probs.as_slice()))
            .then_with(|| a.epsilon.total_cmp(&b.epsilon))
    });
    Ok(SweepOutput { points, skipped })
}

/// Pareto-nondominated points under (max rate, max energy), by ascending energy.
pub fn frontier(points: &[SweepPoint]) -> Result<Vec<SweepPoint>> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut order: Vec<&SweepPoint> = points.iter().collect();
    order.sort_by(|a, b| {
        b.energy_total
            .total_cmp(&a.energy_total)
            .then_with(|| b.rate_nats.total_cmp(&a.rate_nats))
    });
    let mut best_rate = f64::NEG_INFINITY;
    let mut out = Vec::new();
    for p in order {
        if p.rate_nats > best_rate {
            best_rate = p.rate_nats;
            out.push(p.clone());
        }
    }
    out.reverse();
    Ok(out)
}

/// CSV with the fixed sweep header.
pub fn to_csv(points: &[SweepPoint], layers: usize) -> String {
    let mut header: Vec<String> = Vec::new();
    header.extend((1..=layers).map(|c| format!("p_{c}")));
    header.push("epsilon".into());
    header.extend((1..=layers).map(|c| format!("r_{c}")));
    header.extend((1..=layers).map(|c| format!("A_{c}")));
    header.extend((1..=layers).map(|c| format!("L_{c}")));
    header.extend(
        [
            "rate_bits",
            "rate_nats",
            "rate_stirling",
            "rate_achievable_bits",
            "energy_total",
            "energy_per_cu",
            "eop",
            "dep_lower",
            "dep_achievable",
        ]
        .map(String::from),
    );
    let mut out = header.join(",");
    out.push('\n');
    for p in points {
        let mut fields: Vec<String> = Vec::new();
        fields.extend(p.probs.as_slice().iter().map(f64::to_string));
        fields.push(p.epsilon.to_string());
        fields.extend(p.radii.iter().map(f64::to_string));
        fields.extend(p.amplitudes.iter().map(f64::to_string));
        fields.extend(p.layer_counts.iter().map(usize::to_string));
        for v in [
            p.rate_bits,
            p.rate_nats,
            p.rate_stirling,
            p.rate_achievable_bits,
            p.energy_total,
            p.energy_per_cu,
            p.eop,
            p.dep_lower,
            p.dep_achievable,
        ] {
            fields.push(v.to_string());
        }
        writeln!(out, "{}", fields.join(",")).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_layer(p_grid: ProbabilityGrid) -> SweepConfig {
        SweepConfig {
            n: 100,
            layers: 2,
            peak_amplitude: 20.0,
            layer_counts: LayerCountsMode::Fixed(vec![5, 5]),
            epsilon_grid: vec![0.01],
            p_grid,
            sigma2: 1.0,
            model: EnergyModel::default(),
            energy_requirement: None,
        }
    }

    fn point(rate: f64, energy: f64) -> SweepPoint {
        SweepPoint {
            probs: LayerProbabilities::new(vec![1.0]).unwrap(),
            epsilon: 0.1,
            radii: vec![1.0],
            amplitudes: vec![1.0],
            layer_counts: vec![1],
            rate_bits: rate / std::f64::consts::LN_2,
            rate_nats: rate,
            rate_stirling: rate,
            rate_achievable_bits: 0.0,
            energy_total: energy,
            energy_per_cu: energy,
            eop: 0.0,
            dep_lower: 0.0,
            dep_achievable: 0.1,
            dep_bound_kind: DepBoundKind::Achievable,
        }
    }

    #[test]
    fn rate_peaks_at_half() {
        let out = sweep_region(&two_layer(ProbabilityGrid::Lattice { total: 10 })).unwrap();
        // Only p = k/10 with 100·p/5 integral survive: all of them.
        assert_eq!(out.points.len(), 11);
        let best = out
            .points
            .iter()
            .max_by(|a, b| a.rate_nats.total_cmp(&b.rate_nats))
            .unwrap();
        assert_eq!(best.probs.as_slice(), &[0.5, 0.5]);
        assert!((best.rate_nats - 2.127).abs() < 5e-4);
        let rate_at = |p: f64| {
            out.points
                .iter()
                .find(|q| (q.probs.as_slice()[0] - p).abs() < 1e-12)
                .unwrap()
                .rate_nats
        };
        for k in 0..5 {
            let (lo, hi) = (k as f64 / 10.0, (k + 1) as f64 / 10.0);
            assert!(rate_at(lo) < rate_at(hi));
            assert!(rate_at(1.0 - lo) < rate_at(1.0 - hi));
        }
        // Energy grows with p and the output is sorted by it.
        assert!(out
            .points
            .windows(2)
            .all(|w| w[0].energy_total <= w[1].energy_total));
        assert_eq!(out.points.last().unwrap().probs.as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn non_integral_points_are_skipped() {
        let cfg = two_layer(ProbabilityGrid::Explicit(vec![
            vec![0.5, 0.5],
            vec![0.33, 0.67],
        ]));
        let out = sweep_region(&cfg).unwrap();
        assert_eq!(out.points.len(), 1);
        assert_eq!(out.skipped.len(), 1);
        assert_eq!(out.skipped[0].probs.as_deref(), Some(&[0.33, 0.67][..]));
    }

    #[test]
    fn empty_grids() {
        let mut cfg = two_layer(ProbabilityGrid::Explicit(vec![]));
        assert!(matches!(sweep_region(&cfg), Err(Error::GridEmpty)));
        cfg.p_grid = ProbabilityGrid::Lattice { total: 0 };
        assert!(matches!(sweep_region(&cfg), Err(Error::GridEmpty)));
        cfg.p_grid = ProbabilityGrid::Lattice { total: 2 };
        cfg.epsilon_grid.clear();
        assert!(matches!(sweep_region(&cfg), Err(Error::GridEmpty)));
    }

    #[test]
    fn amplitudes_at_minimal_spacing() {
        let cfg = two_layer(ProbabilityGrid::Lattice { total: 2 });
        let cst = constellation_for_epsilon(&cfg, 0.01).unwrap();
        let r = cst.layers()[0].radius;
        assert!((cst.layers()[1].amplitude - (20.0 - 2.0 * r)).abs() < 1e-12);
        assert!(crate::constellation::validate_regions(&cst).is_ok());
        let dep = achievable_dep_equal_radii(100, r, 1.0);
        assert!(dep <= 0.01 && dep > 0.01 * (1.0 - 1e-6));
    }

    #[test]
    fn frontier_examples() {
        let single = vec![point(1.0, 1.0)];
        assert_eq!(frontier(&single).unwrap(), single);

        let f = frontier(&[point(1.0, 1.0), point(2.0, 2.0)]).unwrap();
        assert_eq!(f, vec![point(2.0, 2.0)]);

        let f = frontier(&[
            point(3.0, 1.0),
            point(2.0, 2.0),
            point(1.0, 1.5),
            point(1.0, 3.0),
        ])
        .unwrap();
        let pairs: Vec<_> = f.iter().map(|p| (p.rate_nats, p.energy_total)).collect();
        assert_eq!(pairs, vec![(3.0, 1.0), (2.0, 2.0), (1.0, 3.0)]);
        assert!(matches!(frontier(&[]), Err(Error::EmptyInput)));
    }

    #[test]
    fn csv_header() {
        let out = sweep_region(&two_layer(ProbabilityGrid::Lattice { total: 2 })).unwrap();
        let csv = to_csv(&out.points, 2);
        let header = csv.lines().next().unwrap();
        assert_eq!(
            header,
            "p_1,p_2,epsilon,r_1,r_2,A_1,A_2,L_1,L_2,rate_bits,rate_nats,rate_stirling,\
             rate_achievable_bits,energy_total,energy_per_cu,eop,dep_lower,dep_achievable"
        );
        assert_eq!(csv.lines().count(), 1 + out.points.len());
    }
}
