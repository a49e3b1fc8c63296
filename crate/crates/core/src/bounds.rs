//! Necessary conditions and achievability bounds for SIET codes.
//!
//! Logs are natural internally; [`Rate`] carries both nats and bits.

use std::f64::consts::{LN_2, PI, SQRT_2};

use libm::erfc;
use libm::lgamma as ln_gamma;
use rayon::prelude::*;
use serde::Serialize;

use crate::codebook::{
    code_type, log_multinomial, type_from_layer_counts, Codebook, LayerProbabilities, SymbolType,
};
use crate::constellation::{
    farthest_neighbor, max_symbols_per_layer, validate_regions, Constellation, PackingMode,
};
use crate::energy::{max_energy_for_eop, outage_probability, EnergyModel, EnergyProfile};
use crate::error::{Error, Result};

/// An information rate per channel use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rate {
    pub nats: f64,
    pub bits: f64,
}

impl Rate {
    pub fn from_nats(nats: f64) -> Self {
        Self {
            nats,
            bits: nats / LN_2,
        }
    }

    pub fn from_bits(bits: f64) -> Self {
        Self {
            nats: bits * LN_2,
            bits,
        }
    }
}

/// Standard normal tail probability `Q(x) = ½·erfc(x/√2)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / SQRT_2)
}

/// Lower bound on the decoding error probability of any `M`-word code whose
/// average type is `probabilities`:
/// `(M−1)·Q(√(Σ_ℓ n·P(x_ℓ)·d̄_ℓ² / (2σ²)))`, clamped to `[0, 1]`, where `d̄_ℓ`
/// is the distance from `x_ℓ` to its farthest neighbor.
pub fn dep_lower_bound(
    m: usize,
    n: usize,
    probabilities: &[f64],
    cst: &Constellation,
    sigma2: f64,
) -> Result<f64> {
    if m < 2 {
        return Err(Error::InvalidConfig("dep lower bound needs M >= 2".into()));
    }
    dep_lower_bound_real(m as f64, n, probabilities, cst, sigma2)
}

/// [`dep_lower_bound`] with `M` given as a real, for code sizes beyond `usize`.
pub fn dep_lower_bound_real(
    m: f64,
    n: usize,
    probabilities: &[f64],
    cst: &Constellation,
    sigma2: f64,
) -> Result<f64> {
    if !(m >= 2.0) {
        return Err(Error::InvalidConfig("dep lower bound needs M >= 2".into()));
    }
    if !(sigma2 > 0.0) || n == 0 {
        return Err(Error::NonPositiveInput);
    }
    if probabilities.len() != cst.len() {
        return Err(Error::InvalidType(format!(
            "type over {} symbols, constellation has {}",
            probabilities.len(),
            cst.len()
        )));
    }
    if cst.len() < 2 {
        return Err(Error::SingleSymbolConstellation);
    }
    let mut energy = 0.0;
    for (x, &p) in probabilities.iter().enumerate() {
        if p > 0.0 {
            let (_, d) = farthest_neighbor(cst, x)?;
            energy += n as f64 * p * d * d;
        }
    }
    let q = q_function((energy / (2.0 * sigma2)).sqrt());
    let bound = if q == 0.0 { 0.0 } else { (m - 1.0) * q };
    Ok(bound.clamp(0.0, 1.0))
}

/// `(1/n)·ln(n!/∏(n·P(x))!)`: the rate ceiling of a constant-composition code of type `t`.
pub fn rate_upper_exact(t: &SymbolType) -> Rate {
    Rate::from_nats(log_multinomial(t) / t.n() as f64)
}

/// [`rate_upper_exact`] for a possibly fractional average type, with factorials
/// extended through the gamma function.
pub fn rate_upper_exact_real(n: usize, probabilities: &[f64]) -> Rate {
    let nf = n as f64;
    let log_count = ln_gamma(nf + 1.0)
        - probabilities
            .iter()
            .map(|&p| ln_gamma(nf * p + 1.0))
            .sum::<f64>();
    Rate::from_nats(log_count / nf)
}

/// Stirling relaxation of [`rate_upper_exact`]:
///
/// `H(P) + (1/n²)(1/12 − Σ 1/(12P+1)) + (1/n)(ln√(2π) − Σ ln√(2πP)) − (ln n/n)(L−1)/2`
///
/// with the sums over the `L` symbols of nonzero mass.
pub fn rate_upper_stirling(n: usize, probabilities: &[f64]) -> Result<Rate> {
    if n == 0 {
        return Err(Error::NonPositiveInput);
    }
    let support: Vec<f64> = probabilities.iter().copied().filter(|&p| p > 0.0).collect();
    if support.is_empty() {
        return Err(Error::InvalidType("type has no mass".into()));
    }
    let nf = n as f64;
    let l = support.len() as f64;
    let entropy = -support.iter().map(|p| p * p.ln()).sum::<f64>();
    let second_order =
        (1.0 / 12.0 - support.iter().map(|p| 1.0 / (12.0 * p + 1.0)).sum::<f64>()) / (nf * nf);
    let half_ln_2pi = 0.5 * (2.0 * PI).ln();
    let first_order = (half_ln_2pi
        - support
            .iter()
            .map(|p| 0.5 * (2.0 * PI * p).ln())
            .sum::<f64>())
        / nf;
    let log_term = nf.ln() / nf * (l - 1.0) / 2.0;
    Ok(Rate::from_nats(
        entropy + second_order + first_order - log_term,
    ))
}

/// Lower bound on the energy outage probability for requirement `b`.
///
/// Constant-composition codes give the indicator `1{e_𝒞 < b}`; otherwise the
/// fraction of codewords below `b`.
pub fn eop_lower(profile: &EnergyProfile, b: f64, constant_composition: bool) -> f64 {
    if constant_composition {
        if profile.per_codeword()[0] < b {
            1.0
        } else {
            0.0
        }
    } else {
        outage_probability(profile, b)
    }
}

/// Probability that one received symbol lands in its own disk of radius `r`.
pub fn disk_hit_probability(radius: f64, sigma2: f64) -> f64 {
    -(-radius * radius / sigma2).exp_m1()
}

/// `1 − (1 − e^{−r²/σ²})^n`: exact disk-decoder error probability of a
/// blocklength-`n` code with a common radius `r`.
pub fn achievable_dep_equal_radii(n: usize, radius: f64, sigma2: f64) -> f64 {
    -(n as f64 * disk_hit_probability(radius, sigma2).ln()).exp_m1()
}

/// Exact error probability of the product-of-disks decoder:
/// `1 − (1/M)·Σ_i ∏_c (1 − e^{−r_c²/σ²})^{n_c(i)}`.
pub fn achievable_dep(cb: &Codebook, sigma2: f64) -> Result<f64> {
    if !(sigma2 > 0.0) {
        return Err(Error::NonPositiveInput);
    }
    validate_regions(cb.constellation())?;
    let log_hit: Vec<f64> = cb
        .constellation()
        .layers()
        .iter()
        .map(|l| disk_hit_probability(l.radius, sigma2).ln())
        .collect();
    let success: f64 = (0..cb.m())
        .map(|i| {
            cb.layer_usage(i)
                .iter()
                .zip(&log_hit)
                .map(|(&k, lh)| k as f64 * lh)
                .sum::<f64>()
                .exp()
        })
        .sum();
    Ok((1.0 - success / cb.m() as f64).clamp(0.0, 1.0))
}

/// Geometric rate bound `log2(Σ_c ⌊π/(2·arcsin(r_c/(2A_c)))⌋)` in bits.
pub fn achievable_rate_geometric(cst: &Constellation) -> Result<f64> {
    let total = cst
        .layers()
        .iter()
        .map(|l| max_symbols_per_layer(l.amplitude, l.radius, PackingMode::Paper))
        .sum::<Result<usize>>()?;
    Ok((total as f64).log2())
}

/// Rate of the constant-composition code with layer masses `probs`:
/// `(1/n)·log(n!/∏_c ((n·p_c/L_c)!)^{L_c})`.
pub fn achievable_rate_cc(
    n: usize,
    probs: &LayerProbabilities,
    layer_counts: &[usize],
) -> Result<Rate> {
    let t = type_from_layer_counts(n, probs, layer_counts)?;
    Ok(rate_upper_exact(&t))
}

/// `(1/M)·Σ_i 1{Σ_c n_c(i)·(k1·A_c² + k2·A_c⁴) < B}`.
pub fn achievable_eop(cb: &Codebook, b: f64, model: &EnergyModel) -> f64 {
    let per_layer: Vec<f64> = cb
        .constellation()
        .layers()
        .iter()
        .map(|l| model.symbol_energy(l.amplitude))
        .collect();
    let below = (0..cb.m())
        .filter(|&i| {
            let e: f64 = cb
                .layer_usage(i)
                .iter()
                .zip(&per_layer)
                .map(|(&k, e)| k as f64 * e)
                .sum();
            e < b
        })
        .count();
    below as f64 / cb.m() as f64
}

/// All bounds evaluated for one codebook and requirement `(B, δ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub code_rate: Rate,
    pub constant_composition: bool,
    pub dep_lower: f64,
    pub rate_upper_exact: Rate,
    pub rate_upper_stirling: Rate,
    pub eop_lower: f64,
    pub energy_upper: f64,
    pub energy_upper_brute_force: f64,
    pub energy_boundary_case: bool,
    pub dep_achievable: Option<f64>,
    pub rate_achievable_geometric: Option<Rate>,
    pub rate_achievable_cc: Option<Rate>,
    pub eop_achievable: f64,
}

impl BoundReport {
    /// Fixed-order plain-text table.
    pub fn to_table(&self) -> String {
        fn rate(r: &Option<Rate>) -> String {
            r.map_or("n/a".into(), |r| {
                format!("{:.6} nats  {:.6} bits", r.nats, r.bits)
            })
        }
        let rows = [
            ("n", self.n.to_string()),
            ("M", self.m.to_string()),
            ("code rate", rate(&Some(self.code_rate))),
            (
                "constant composition",
                self.constant_composition.to_string(),
            ),
            ("dep lower bound", format!("{:.6e}", self.dep_lower)),
            ("rate upper (exact)", rate(&Some(self.rate_upper_exact))),
            (
                "rate upper (stirling)",
                rate(&Some(self.rate_upper_stirling)),
            ),
            ("eop lower bound", format!("{:.6}", self.eop_lower)),
            ("energy upper (j+)", format!("{:.6e}", self.energy_upper)),
            (
                "energy upper (max feasible)",
                format!("{:.6e}", self.energy_upper_brute_force),
            ),
            (
                "energy boundary case",
                self.energy_boundary_case.to_string(),
            ),
            (
                "dep achievable",
                self.dep_achievable
                    .map_or("n/a (regions overlap)".into(), |d| format!("{d:.6e}")),
            ),
            (
                "rate achievable (geometric)",
                rate(&self.rate_achievable_geometric),
            ),
            ("rate achievable (cc)", rate(&self.rate_achievable_cc)),
            ("eop achievable", format!("{:.6}", self.eop_achievable)),
        ];
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        rows.iter()
            .map(|(k, v)| format!("{k:<width$}  {v}\n"))
            .collect()
    }
}

pub fn evaluate_bounds(
    cb: &Codebook,
    sigma2: f64,
    b: f64,
    delta: f64,
    model: &EnergyModel,
) -> Result<BoundReport> {
    let n = cb.n();
    let m = cb.m();
    let cst = cb.constellation();
    let types = code_type(cb);
    let profile = EnergyProfile::from_codebook(cb, model)?;
    let ceiling = max_energy_for_eop(&profile, delta)?;

    let dep_lower = if m >= 2 {
        dep_lower_bound(m, n, &types.average, cst, sigma2)?
    } else {
        0.0
    };
    let exact = match types.common_type() {
        Some(t) => rate_upper_exact(t),
        None => rate_upper_exact_real(n, &types.average),
    };
    let dep_achievable = match achievable_dep(cb, sigma2) {
        Ok(d) => Some(d),
        Err(Error::OverlappingRegions(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(BoundReport {
        n,
        m,
        code_rate: Rate::from_bits(cb.rate_bits()),
        constant_composition: types.constant_composition,
        dep_lower,
        rate_upper_exact: exact,
        rate_upper_stirling: rate_upper_stirling(n, &types.average)?,
        eop_lower: eop_lower(&profile, b, types.constant_composition),
        energy_upper: ceiling.formula,
        energy_upper_brute_force: ceiling.brute_force,
        energy_boundary_case: ceiling.boundary,
        dep_achievable,
        rate_achievable_geometric: achievable_rate_geometric(cst).ok().map(Rate::from_bits),
        rate_achievable_cc: types.common_type().map(rate_upper_exact),
        eop_achievable: achievable_eop(cb, b, model),
    })
}

/// One of the four achievability inequalities (plus region disjointness).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Constraint {
    Regions,
    Dep,
    Rate,
    Eop,
    Energy,
}

impl std::fmt::Display for Constraint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Regions => "regions",
            Self::Dep => "dep",
            Self::Rate => "rate",
            Self::Eop => "eop",
            Self::Energy => "energy",
        })
    }
}

/// Signed slack of each inequality at one grid point; negative means violated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Margins {
    /// `ε − achievable DEP`.
    pub dep: f64,
    /// `min(geometric, constant-composition rate) − log2(M)/n`, bits.
    pub rate: f64,
    /// `δ − achievable EOP`.
    pub eop: f64,
    /// `ē_{j⁺} − B`.
    pub energy: f64,
}

impl Margins {
    pub fn violated(&self) -> Vec<Constraint> {
        let mut out = Vec::new();
        if self.dep < 0.0 {
            out.push(Constraint::Dep);
        }
        if self.rate < 0.0 {
            out.push(Constraint::Rate);
        }
        if self.eop < 0.0 {
            out.push(Constraint::Eop);
        }
        if self.energy < 0.0 {
            out.push(Constraint::Energy);
        }
        out
    }
}

/// Evaluated achievability quantities for one layer-probability vector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridPoint {
    pub probs: LayerProbabilities,
    #[serde(skip)]
    pub symbol_type: SymbolType,
    pub dep_achievable: f64,
    pub rate_geometric_bits: f64,
    pub rate_cc: Rate,
    pub energy: f64,
    pub eop_achievable: f64,
    pub margins: Margins,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "UPPERCASE")]
pub enum Feasibility {
    Feasible {
        witness: GridPoint,
    },
    Infeasible {
        /// Constraints violated at every evaluated grid point.
        binding: Vec<Constraint>,
        /// Grid point with the fewest violations (lexicographically smallest p on ties).
        closest: Option<GridPoint>,
    },
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Self::Feasible { .. })
    }
}

/// Target tuple for [`check_tuple_feasibility`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Targets {
    pub n: usize,
    #[serde(rename = "M")]
    pub m: u128,
    pub epsilon: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub delta: f64,
    pub sigma2: f64,
}

/// Every composition of `total` into `parts` nonnegative integers, in
/// lexicographic order.
pub fn simplex_lattice(parts: usize, total: usize) -> Vec<Vec<usize>> {
    fn rec(parts: usize, total: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in 0..=total {
            prefix.push(k);
            rec(parts - 1, total - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if parts > 0 {
        rec(parts, total, &mut Vec::new(), &mut out);
    }
    out
}

/// Evaluates the achievability inequalities for the constant-composition code
/// with layer masses `probs` over `cst`. Returns `None` for non-integral types.
pub fn evaluate_grid_point(
    targets: &Targets,
    cst: &Constellation,
    probs: LayerProbabilities,
    model: &EnergyModel,
) -> Result<Option<GridPoint>> {
    let layer_counts = cst.layer_counts();
    let t = match type_from_layer_counts(targets.n, &probs, &layer_counts) {
        Ok(t) => t,
        Err(Error::NonIntegralType { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let sigma2 = targets.sigma2;
    let mut log_success = 0.0;
    for (layer, p) in cst.layers().iter().zip(probs.as_slice()) {
        log_success += targets.n as f64 * p * disk_hit_probability(layer.radius, sigma2).ln();
    }
    let dep = -log_success.exp_m1();
    let rate_geometric_bits = achievable_rate_geometric(cst)?;
    let rate_cc = rate_upper_exact(&t);
    let energy = crate::energy::constant_composition_energy(&t, cst, model)?;
    let eop = if energy < targets.b { 1.0 } else { 0.0 };
    let needed_bits = (targets.m as f64).log2() / targets.n as f64;
    let margins = Margins {
        dep: targets.epsilon - dep,
        rate: rate_geometric_bits.min(rate_cc.bits) - needed_bits,
        eop: targets.delta - eop,
        // A constant-composition profile has a single level, so ē_{j⁺} = e_𝒞.
        energy: energy - targets.b,
    };
    Ok(Some(GridPoint {
        probs,
        symbol_type: t,
        dep_achievable: dep,
        rate_geometric_bits,
        rate_cc,
        energy,
        eop_achievable: eop,
        margins,
    }))
}

/// Searches layer-probability vectors `k/grid_total` for a constant-composition
/// code over `cst` meeting all targets.
pub fn check_tuple_feasibility(
    targets: &Targets,
    cst: &Constellation,
    grid_total: usize,
    model: &EnergyModel,
) -> Result<Feasibility> {
    if targets.n == 0 || targets.m == 0 || grid_total == 0 {
        return Err(Error::NonPositiveInput);
    }
    if let Err(Error::OverlappingRegions(_)) = validate_regions(cst) {
        return Ok(Feasibility::Infeasible {
            binding: vec![Constraint::Regions],
            closest: None,
        });
    }
    let lattice = simplex_lattice(cst.num_layers(), grid_total);
    let points = lattice
        .par_iter()
        .map(|k| {
            let p = k.iter().map(|&k| k as f64 / grid_total as f64).collect();
            evaluate_grid_point(targets, cst, LayerProbabilities::new(p)?, model)
        })
        .collect::<Result<Vec<_>>>()?;
    let points: Vec<GridPoint> = points.into_iter().flatten().collect();

    if let Some(witness) = points.iter().find(|p| p.margins.violated().is_empty()) {
        return Ok(Feasibility::Feasible {
            witness: witness.clone(),
        });
    }
    let mut binding = vec![
        Constraint::Dep,
        Constraint::Rate,
        Constraint::Eop,
        Constraint::Energy,
    ];
    for p in &points {
        let violated = p.margins.violated();
        binding.retain(|c| violated.contains(c));
    }
    if points.is_empty() {
        binding.clear();
    }
    let closest = points
        .iter()
        .min_by_key(|p| p.margins.violated().len())
        .cloned();
    Ok(Feasibility::Infeasible { binding, closest })
}
