//! Harvested-energy model and energy-outage analysis.
//!
//! A symbol of magnitude `|x|` delivers `k1·|x|² + k2·|x|⁴` energy units; a
//! codeword delivers the sum over its symbols. Harvesting is deterministic
//! given the transmitted codeword.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codebook::{Codebook, Codeword, LayerProbabilities, SymbolType};
use crate::constellation::Constellation;
use crate::error::{Error, Result};

/// Relative tolerance when grouping codeword energies into unique levels.
const LEVEL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyModel {
    pub k1: f64,
    pub k2: f64,
}

impl Default for EnergyModel {
    fn default() -> Self {
        Self {
            k1: 0.0034,
            k2: 0.3829,
        }
    }
}

impl EnergyModel {
    pub fn new(k1: f64, k2: f64) -> Result<Self> {
        if !(k1 > 0.0 && k2 > 0.0) || !k1.is_finite() || !k2.is_finite() {
            return Err(Error::NonPositiveInput);
        }
        Ok(Self { k1, k2 })
    }

    pub fn symbol_energy(&self, amplitude: f64) -> f64 {
        let a2 = amplitude * amplitude;
        self.k1 * a2 + self.k2 * a2 * a2
    }

    fn layer_energies(&self, cst: &Constellation) -> Vec<f64> {
        cst.layers()
            .iter()
            .map(|l| self.symbol_energy(l.amplitude))
            .collect()
    }
}

/// Sum of `usage[c]·e_c` in layer order.
fn energy_from_layer_usage(usage: &[f64], per_layer: &[f64]) -> f64 {
    usage.iter().zip(per_layer).map(|(u, e)| u * e).sum()
}

/// Energy delivered by codeword `u`.
///
/// Symbols are grouped by layer before summing, so every codeword of a given
/// type gets bit-identical energy.
pub fn codeword_energy(u: &[u32], cst: &Constellation, model: &EnergyModel) -> Result<f64> {
    let mut usage = vec![0.0; cst.num_layers()];
    for &x in u {
        cst.check_index(x as usize)?;
        usage[cst.layer_of(x as usize)] += 1.0;
    }
    Ok(energy_from_layer_usage(&usage, &model.layer_energies(cst)))
}

/// Energy `e_𝒞` shared by all codewords of type `t`.
pub fn constant_composition_energy(
    t: &SymbolType,
    cst: &Constellation,
    model: &EnergyModel,
) -> Result<f64> {
    if t.alphabet() != cst.len() {
        return Err(Error::InvalidType(format!(
            "type over {} symbols, constellation has {}",
            t.alphabet(),
            cst.len()
        )));
    }
    let mut usage = vec![0.0; cst.num_layers()];
    for (x, &c) in t.counts().iter().enumerate() {
        usage[cst.layer_of(x)] += c as f64;
    }
    Ok(energy_from_layer_usage(&usage, &model.layer_energies(cst)))
}

/// `Σ_c n·p_c·(k1·A_c² + k2·A_c⁴)`.
pub fn layered_energy(
    n: usize,
    probs: &LayerProbabilities,
    cst: &Constellation,
    model: &EnergyModel,
) -> Result<f64> {
    if probs.len() != cst.num_layers() {
        return Err(Error::InvalidType(format!(
            "{} layer probabilities for {} layers",
            probs.len(),
            cst.num_layers()
        )));
    }
    let usage: Vec<f64> = probs.as_slice().iter().map(|p| n as f64 * p).collect();
    Ok(energy_from_layer_usage(&usage, &model.layer_energies(cst)))
}

/// Per-codeword energies with their sorted unique levels.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyProfile {
    per_codeword: Vec<f64>,
    levels: Vec<f64>,
    multiplicities: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergySummary {
    #[serde(rename = "M")]
    pub m: usize,
    pub levels: Vec<f64>,
    pub multiplicities: Vec<usize>,
}

impl EnergyProfile {
    pub fn from_energies(per_codeword: Vec<f64>) -> Result<Self> {
        if per_codeword.is_empty() {
            return Err(Error::EmptyInput);
        }
        if per_codeword.iter().any(|e| !e.is_finite() || *e < 0.0) {
            return Err(Error::DomainError(
                "energies must be finite and >= 0".into(),
            ));
        }
        let mut sorted = per_codeword.clone();
        sorted.sort_by(f64::total_cmp);
        let mut levels: Vec<f64> = Vec::new();
        let mut multiplicities: Vec<usize> = Vec::new();
        for e in sorted {
            match levels.last() {
                Some(&level) if e - level <= LEVEL_TOL * level.abs().max(f64::MIN_POSITIVE) => {
                    *multiplicities.last_mut().unwrap() += 1;
                }
                _ => {
                    levels.push(e);
                    multiplicities.push(1);
                }
            }
        }
        Ok(Self {
            per_codeword,
            levels,
            multiplicities,
        })
    }

    pub fn from_codewords(
        words: &[Codeword],
        cst: &Constellation,
        model: &EnergyModel,
    ) -> Result<Self> {
        let energies = words
            .par_iter()
            .map(|w| codeword_energy(w, cst, model))
            .collect::<Result<Vec<_>>>()?;
        Self::from_energies(energies)
    }

    pub fn from_codebook(cb: &Codebook, model: &EnergyModel) -> Result<Self> {
        Self::from_codewords(cb.codewords(), cb.constellation(), model)
    }

    pub fn per_codeword(&self) -> &[f64] {
        &self.per_codeword
    }

    /// Unique levels `ē_1 < … < ē_M′`.
    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    pub fn m(&self) -> usize {
        self.per_codeword.len()
    }

    pub fn summary(&self) -> EnergySummary {
        EnergySummary {
            m: self.m(),
            levels: self.levels.clone(),
            multiplicities: self.multiplicities.clone(),
        }
    }

    /// CSV with columns `codeword_index,energy`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("codeword_index,energy\n");
        for (i, e) in self.per_codeword.iter().enumerate() {
            writeln!(out, "{i},{e}").unwrap();
        }
        out
    }
}

/// Fraction of codewords delivering strictly less than `b`.
pub fn outage_probability(profile: &EnergyProfile, b: f64) -> f64 {
    let below = profile.per_codeword.iter().filter(|&&e| e < b).count();
    below as f64 / profile.m() as f64
}

/// Largest deliverable energy requirement for an outage budget `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyCeiling {
    /// `ē_{j⁺}` with `j⁺ = min{ j : δ ≤ (Σ_{k≤j} mult_k)/M }` (1-based `j`).
    pub formula: f64,
    pub j_plus: usize,
    /// Largest `B` among the unique levels and their midpoints with outage ≤ δ.
    pub brute_force: f64,
    /// `δ` equals a cumulative fraction below the top level; here `formula < brute_force`.
    pub boundary: bool,
}

pub fn max_energy_for_eop(profile: &EnergyProfile, delta: f64) -> Result<EnergyCeiling> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::DomainError(format!("delta {delta} not in [0,1]")));
    }
    let m = profile.m() as f64;
    let top = profile.levels.len();
    let mut cumulative = 0usize;
    let mut j_plus = None;
    let mut boundary = false;
    for (j, &mult) in profile.multiplicities.iter().enumerate() {
        cumulative += mult;
        if j + 1 < top && (delta * m - cumulative as f64).abs() <= 1e-9 {
            boundary = true;
        }
        if j_plus.is_none() && delta <= cumulative as f64 / m {
            j_plus = Some(j);
        }
    }
    // The last cumulative fraction is 1 >= delta, so j⁺ always exists.
    let j_plus = j_plus.expect("cumulative fraction reaches 1");

    let mut candidates = profile.levels.clone();
    candidates.extend(profile.levels.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    let brute_force = candidates
        .into_iter()
        .filter(|&b| outage_probability(profile, b) <= delta)
        .fold(f64::NEG_INFINITY, f64::max);

    Ok(EnergyCeiling {
        formula: profile.levels[j_plus],
        j_plus: j_plus + 1,
        brute_force,
        boundary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebook::{enumerate_codewords, SymbolType};
    use crate::constellation::{build_constellation, Layer};

    fn ring(a: f64, l: usize) -> Layer {
        Layer::new(a, l, 0.0, 0.5).unwrap()
    }

    #[test]
    fn single_unit_symbol() {
        let cst = build_constellation(vec![ring(1.0, 1)]).unwrap();
        let e = codeword_energy(&[0], &cst, &EnergyModel::default()).unwrap();
        assert!((e - 0.3863).abs() < 1e-15);
    }

    #[test]
    fn additivity_and_direct_evaluation() {
        let model = EnergyModel::default();
        let cst = build_constellation(vec![ring(3.0, 2)]).unwrap();
        let e = codeword_energy(&[0, 1], &cst, &model).unwrap();
        assert!((e - 2.0 * (model.k1 * 9.0 + model.k2 * 81.0)).abs() < 1e-12);

        let cst = build_constellation(vec![ring(30.0, 4)]).unwrap();
        let word = vec![0u32; 80];
        let e = codeword_energy(&word, &cst, &model).unwrap();
        let direct = 80.0 * (0.0034 * 900.0 + 0.3829 * 810000.0);
        assert!((e - direct).abs() / direct < 1e-14);
        // Same value from |x|² and |x|⁴ of the complex symbols.
        let from_complex: f64 = word
            .iter()
            .map(|&x| {
                let s = cst.symbols()[x as usize].norm_sqr();
                model.k1 * s + model.k2 * s * s
            })
            .sum();
        assert!((e - from_complex).abs() / direct < 1e-12);
        let t = SymbolType::of_codeword(&word, 4).unwrap();
        assert_eq!(constant_composition_energy(&t, &cst, &model).unwrap(), e);
        assert!(codeword_energy(&[7], &cst, &model).is_err());
    }

    #[test]
    fn constant_composition_examples() {
        let model = EnergyModel::default();
        let bpsk = build_constellation(vec![ring(2.0, 2)]).unwrap();
        let t = SymbolType::new(vec![2, 2]).unwrap();
        let e = constant_composition_energy(&t, &bpsk, &model).unwrap();
        assert!((e - 4.0 * model.symbol_energy(2.0)).abs() < 1e-12);

        let cst = build_constellation(vec![ring(20.0, 5), ring(12.0, 5)]).unwrap();
        let first_only = LayerProbabilities::new(vec![1.0, 0.0]).unwrap();
        let e_max = layered_energy(100, &first_only, &cst, &model).unwrap();
        assert!((e_max - 100.0 * model.symbol_energy(20.0)).abs() < 1e-9);
        for p in [0.0, 0.2, 0.5, 0.8] {
            let probs = LayerProbabilities::new(vec![p, 1.0 - p]).unwrap();
            assert!(layered_energy(100, &probs, &cst, &model).unwrap() <= e_max);
        }

        let half = LayerProbabilities::new(vec![0.5, 0.5]).unwrap();
        let t = crate::codebook::counts_from_layer_probs(100, &half, cst.layers()).unwrap();
        let word = &enumerate_codewords(&t, 1)[0];
        let via_word = codeword_energy(word, &cst, &model).unwrap();
        let via_probs = layered_energy(100, &half, &cst, &model).unwrap();
        assert!((via_word - via_probs).abs() / via_word < 1e-12);
    }

    #[test]
    fn outage_examples() {
        let p = EnergyProfile::from_energies(vec![1.0, 2.0, 3.0]).unwrap();
        assert!((outage_probability(&p, 2.5) - 2.0 / 3.0).abs() < 1e-15);
        let constant = EnergyProfile::from_energies(vec![5.0; 4]).unwrap();
        assert_eq!(outage_probability(&constant, 5.0), 0.0);
        assert_eq!(outage_probability(&constant, 5.0 + 1e-9), 1.0);
    }

    #[test]
    fn levels_and_multiplicities() {
        let p = EnergyProfile::from_energies(vec![3.0, 1.0, 2.0, 1.0 + 1e-12]).unwrap();
        assert_eq!(p.levels(), &[1.0, 2.0, 3.0]);
        assert_eq!(p.multiplicities(), &[2, 1, 1]);
        assert!(EnergyProfile::from_energies(vec![]).is_err());
    }

    #[test]
    fn ceiling_examples() {
        let p = EnergyProfile::from_energies(vec![1.0, 1.0, 2.0, 3.0]).unwrap();
        let c = max_energy_for_eop(&p, 0.6).unwrap();
        assert_eq!(
            (c.formula, c.brute_force, c.j_plus, c.boundary),
            (2.0, 2.0, 2, false)
        );

        let c = max_energy_for_eop(&p, 0.5).unwrap();
        assert_eq!((c.formula, c.brute_force, c.boundary), (1.0, 2.0, true));

        let constant = EnergyProfile::from_energies(vec![7.5; 3]).unwrap();
        let c = max_energy_for_eop(&constant, 0.0).unwrap();
        assert_eq!((c.formula, c.brute_force, c.boundary), (7.5, 7.5, false));

        assert!(max_energy_for_eop(&p, 1.5).is_err());
    }

    #[test]
    fn csv_and_summary() {
        let p = EnergyProfile::from_energies(vec![2.0, 1.5]).unwrap();
        assert_eq!(p.to_csv(), "codeword_index,energy\n0,2\n1,1.5\n");
        let json = serde_json::to_string(&p.summary()).unwrap();
        assert_eq!(json, r#"{"M":2,"levels":[1.5,2.0],"multiplicities":[1,1]}"#);
    }
}
