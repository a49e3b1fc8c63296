//! Layered circular constellations.
//!
//! A constellation is a union of rings ("layers"). Layer `c` carries `L_c`
//! symbols equally spaced on a circle of amplitude `A_c`, rotated by a phase
//! offset, and every symbol of the layer owns a decoding disk of radius `r_c`.
//! Symbols are enumerated layer-major, angle-ascending, starting at index 0.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed on arcsin arguments before rejecting them.
const ASIN_SLACK: f64 = 1e-12;
/// Relative tolerance used for geometric comparisons (ties, touching disks).
const GEOM_TOL: f64 = 1e-12;

/// One ring of the constellation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub amplitude: f64,
    pub count: usize,
    pub phase: f64,
    pub radius: f64,
}

impl Layer {
    /// Validates the fields and normalizes the phase into `[0, 2π)`.
    pub fn new(amplitude: f64, count: usize, phase: f64, radius: f64) -> Result<Self> {
        if !(amplitude.is_finite() && amplitude > 0.0) {
            return Err(Error::InvalidLayer(format!(
                "amplitude {amplitude} must be > 0"
            )));
        }
        if count == 0 {
            return Err(Error::InvalidLayer("count must be >= 1".into()));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidLayer(format!("radius {radius} must be > 0")));
        }
        if !phase.is_finite() {
            return Err(Error::InvalidLayer(format!("phase {phase} is not finite")));
        }
        let mut phase = phase.rem_euclid(TAU);
        if phase >= TAU {
            phase = 0.0;
        }
        Ok(Self {
            amplitude,
            count,
            phase,
            radius,
        })
    }

    /// Symbol `index` of this layer, `A·exp(i(2π·index/L + α))`.
    pub fn symbol(&self, index: usize) -> Complex64 {
        let angle = TAU * index as f64 / self.count as f64 + self.phase;
        Complex64::from_polar(self.amplitude, angle)
    }

    /// Distance between two adjacent symbols on the ring, `2A·sin(π/L)`.
    pub fn adjacent_chord(&self) -> f64 {
        2.0 * self.amplitude * (PI / self.count as f64).sin()
    }

    /// Per-symbol harvested energy `k1·A² + k2·A⁴` under `model`.
    pub fn symbol_energy(&self, model: &crate::energy::EnergyModel) -> f64 {
        model.symbol_energy(self.amplitude)
    }
}

/// Packing rule for the number of symbols a ring can hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PackingMode {
    /// `⌊π / (2·arcsin(r/(2A)))⌋`, the bound used for the achievable rate.
    Paper,
    /// `⌊π / arcsin(r/A)⌋`: adjacent disks of radius `r` do not overlap.
    #[default]
    Strict,
}

impl std::str::FromStr for PackingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Self::Paper),
            "strict" => Ok(Self::Strict),
            other => Err(Error::InvalidConfig(format!(
                "unknown packing mode `{other}`"
            ))),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ConstellationRepr {
    layers: Vec<Layer>,
}

/// A validated layered constellation with its flattened symbol list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ConstellationRepr", into = "ConstellationRepr")]
pub struct Constellation {
    layers: Vec<Layer>,
    symbols: Vec<Complex64>,
    layer_of: Vec<usize>,
}

impl TryFrom<ConstellationRepr> for Constellation {
    type Error = Error;

    fn try_from(repr: ConstellationRepr) -> Result<Self> {
        build_constellation(repr.layers)
    }
}

impl From<Constellation> for ConstellationRepr {
    fn from(cst: Constellation) -> Self {
        Self { layers: cst.layers }
    }
}

/// Builds a constellation from rings ordered by strictly decreasing amplitude.
pub fn build_constellation(layers: Vec<Layer>) -> Result<Constellation> {
    if layers.is_empty() {
        return Err(Error::EmptyLayers);
    }
    let layers = layers
        .into_iter()
        .map(|l| Layer::new(l.amplitude, l.count, l.phase, l.radius))
        .collect::<Result<Vec<_>>>()?;
    for (index, pair) in layers.windows(2).enumerate() {
        if pair[1].amplitude >= pair[0].amplitude {
            return Err(Error::NonDecreasingAmplitudes { index: index + 1 });
        }
    }

    let mut symbols = Vec::new();
    let mut layer_of = Vec::new();
    for (c, layer) in layers.iter().enumerate() {
        for l in 0..layer.count {
            symbols.push(layer.symbol(l));
            layer_of.push(c);
        }
    }

    let scale = layers[0].amplitude;
    for i in 0..symbols.len() {
        for j in i + 1..symbols.len() {
            if (symbols[i] - symbols[j]).norm() <= GEOM_TOL * scale {
                return Err(Error::DuplicateSymbol {
                    first: i,
                    second: j,
                });
            }
        }
    }

    Ok(Constellation {
        layers,
        symbols,
        layer_of,
    })
}

impl Constellation {
    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn symbols(&self) -> &[Complex64] {
        &self.symbols
    }

    /// Total number of symbols `L = Σ L_c`.
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    /// Layer index of flat symbol `index`.
    pub fn layer_of(&self, index: usize) -> usize {
        self.layer_of[index]
    }

    /// Decoding-disk radius of flat symbol `index`.
    pub fn radius_of(&self, index: usize) -> f64 {
        self.layers[self.layer_of[index]].radius
    }

    pub fn layer_counts(&self) -> Vec<usize> {
        self.layers.iter().map(|l| l.count).collect()
    }

    /// Index range of the symbols belonging to layer `c`.
    pub fn layer_range(&self, c: usize) -> std::ops::Range<usize> {
        let start: usize = self.layers[..c].iter().map(|l| l.count).sum();
        start..start + self.layers[c].count
    }

    pub fn check_index(&self, index: usize) -> Result<()> {
        if index < self.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index,
                len: self.len(),
            })
        }
    }

    /// Index of the symbol whose decoding disk contains `y`, if any.
    ///
    /// Disks are assumed disjoint; the first hit in symbol order is returned.
    pub fn disk_containing(&self, y: Complex64) -> Option<usize> {
        let magnitude = y.norm();
        for (c, layer) in self.layers.iter().enumerate() {
            if (magnitude - layer.amplitude).abs() > layer.radius {
                continue;
            }
            let r2 = layer.radius * layer.radius;
            // Only the two symbols bracketing the angle of y can be closest.
            let step = TAU / layer.count as f64;
            let rel = (y.arg() - layer.phase).rem_euclid(TAU) / step;
            let below = (rel.floor() as usize) % layer.count;
            let above = (below + 1) % layer.count;
            let start = self.layer_range(c).start;
            for l in [below, above] {
                if (y - self.symbols[start + l]).norm_sqr() <= r2 {
                    return Some(start + l);
                }
            }
        }
        None
    }
}

/// Farthest symbol from `symbol_index`, with ties broken by the lowest index.
pub fn farthest_neighbor(cst: &Constellation, symbol_index: usize) -> Result<(usize, f64)> {
    cst.check_index(symbol_index)?;
    if cst.len() < 2 {
        return Err(Error::SingleSymbolConstellation);
    }
    let x = cst.symbols[symbol_index];
    let distances: Vec<f64> = cst.symbols.iter().map(|s| (s - x).norm()).collect();
    let max = distances
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != symbol_index)
        .map(|(_, &d)| d)
        .fold(f64::NEG_INFINITY, f64::max);
    let threshold = max - GEOM_TOL * max.max(1.0);
    let best = distances
        .iter()
        .enumerate()
        .find(|&(j, &d)| j != symbol_index && d >= threshold)
        .map(|(j, _)| j)
        .expect("at least one other symbol");
    Ok((best, distances[best]))
}

fn checked_asin(arg: f64, amplitude: f64, radius: f64) -> Result<f64> {
    if arg > 1.0 + ASIN_SLACK {
        return Err(Error::RadiusTooLarge { amplitude, radius });
    }
    Ok(arg.min(1.0).asin())
}

/// Floor that tolerates round-off just below an exact integer.
fn robust_floor(x: f64) -> usize {
    (x * (1.0 + GEOM_TOL)).floor() as usize
}

/// Largest number of symbols that fits on a ring of `amplitude` with disks of `radius`.
pub fn max_symbols_per_layer(amplitude: f64, radius: f64, mode: PackingMode) -> Result<usize> {
    if !(amplitude > 0.0 && radius > 0.0) || !amplitude.is_finite() || !radius.is_finite() {
        return Err(Error::NonPositiveInput);
    }
    match mode {
        PackingMode::Paper => {
            let half_angle = checked_asin(radius / (2.0 * amplitude), amplitude, radius)?;
            Ok(robust_floor(PI / (2.0 * half_angle)).max(1))
        }
        PackingMode::Strict => {
            let half_angle = checked_asin(radius / amplitude, amplitude, radius)?;
            Ok(robust_floor(PI / half_angle).max(1))
        }
    }
}

/// Smallest common disk radius `r` for which the product-of-disks decoder of a
/// blocklength-`n` constant-composition code has error probability at most `epsilon`.
///
/// Inverts `1 − (1 − exp(−r²/σ²))^n = ε`.
pub fn min_radius_for_dep(epsilon: f64, n: usize, sigma2: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::DomainError(format!(
            "epsilon {epsilon} not in (0,1)"
        )));
    }
    if n == 0 || !(sigma2 > 0.0) || !sigma2.is_finite() {
        return Err(Error::NonPositiveInput);
    }
    // 1 − (1−ε)^{1/n}, without cancellation.
    let per_symbol_miss = -((-epsilon).ln_1p() / n as f64).exp_m1();
    Ok((-sigma2 * per_symbol_miss.ln()).sqrt())
}

/// A pair of adjacent rings whose disks may intersect.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpacingViolation {
    pub outer: usize,
    pub inner: usize,
    pub gap: f64,
    pub required: f64,
}

/// Checks `|A_c − A_{c+1}| ≥ r_c + r_{c+1}` for every adjacent pair of layers.
pub fn validate_layer_spacing(cst: &Constellation) -> Vec<SpacingViolation> {
    cst.layers
        .windows(2)
        .enumerate()
        .filter_map(|(c, pair)| {
            let gap = (pair[0].amplitude - pair[1].amplitude).abs();
            let required = pair[0].radius + pair[1].radius;
            (gap < required * (1.0 - GEOM_TOL)).then_some(SpacingViolation {
                outer: c,
                inner: c + 1,
                gap,
                required,
            })
        })
        .collect()
}

/// Verifies that all decoding disks are pairwise disjoint (ring spacing plus
/// in-ring chord spacing).
pub fn validate_regions(cst: &Constellation) -> Result<()> {
    if let Some(v) = validate_layer_spacing(cst).first() {
        return Err(Error::OverlappingRegions(format!(
            "layers {} and {}: gap {} < {}",
            v.outer, v.inner, v.gap, v.required
        )));
    }
    for (c, layer) in cst.layers.iter().enumerate() {
        if layer.count >= 2 && layer.adjacent_chord() < 2.0 * layer.radius * (1.0 - GEOM_TOL) {
            return Err(Error::OverlappingRegions(format!(
                "layer {c}: chord {} < 2r = {}",
                layer.adjacent_chord(),
                2.0 * layer.radius
            )));
        }
    }
    Ok(())
}
