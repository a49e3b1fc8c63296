//! Symbol types, constant-composition codeword combinatorics and codebooks.

use std::collections::{BTreeMap, HashSet};

use libm::lgamma;
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constellation::{Constellation, Layer};
use crate::error::{Error, Result};

/// A codeword as a vector of flat symbol indices.
pub type Codeword = Vec<u32>;

/// Tolerance on `n·p_c/L_c` being an integer.
const INTEGRALITY_TOL: f64 = 1e-9;

/// Empirical distribution of symbols over a blocklength-`n` word, stored as counts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymbolType {
    counts: Vec<u64>,
    n: usize,
}

impl SymbolType {
    /// `counts[x]` is the number of occurrences of symbol `x`.
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        let n: u64 = counts.iter().sum();
        if n == 0 {
            return Err(Error::InvalidType("blocklength must be >= 1".into()));
        }
        Ok(Self {
            counts,
            n: n as usize,
        })
    }

    /// Type of a single codeword over an alphabet of `alphabet` symbols.
    pub fn of_codeword(word: &[u32], alphabet: usize) -> Result<Self> {
        let mut counts = vec![0u64; alphabet];
        for &x in word {
            let x = x as usize;
            if x >= alphabet {
                return Err(Error::IndexOutOfRange {
                    index: x,
                    len: alphabet,
                });
            }
            counts[x] += 1;
        }
        Self::new(counts)
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alphabet(&self) -> usize {
        self.counts.len()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        let n = self.n as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }

    /// Shannon entropy of the type in nats.
    pub fn entropy_nats(&self) -> f64 {
        entropy_nats(&self.probabilities())
    }

    /// The multiset of symbols in ascending order, the first word in lexicographic order.
    pub fn sorted_word(&self) -> Codeword {
        self.counts
            .iter()
            .enumerate()
            .flat_map(|(x, &c)| std::iter::repeat_n(x as u32, c as usize))
            .collect()
    }

    /// Sparse `{symbol: count}` view, omitting zero counts.
    pub fn to_map(&self) -> BTreeMap<usize, u64> {
        self.counts
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c > 0)
            .map(|(x, &c)| (x, c))
            .collect()
    }

    pub fn from_map(map: &BTreeMap<usize, u64>, alphabet: usize) -> Result<Self> {
        let mut counts = vec![0u64; alphabet];
        for (&x, &c) in map {
            if x >= alphabet {
                return Err(Error::IndexOutOfRange {
                    index: x,
                    len: alphabet,
                });
            }
            counts[x] = c;
        }
        Self::new(counts)
    }
}

/// Entropy in nats of a probability vector; zero entries contribute nothing.
pub fn entropy_nats(p: &[f64]) -> f64 {
    -p.iter()
        .filter(|&&q| q > 0.0)
        .map(|&q| q * q.ln())
        .sum::<f64>()
}

/// Probability mass assigned to each layer, spread evenly over the layer's symbols.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LayerProbabilities {
    p: Vec<f64>,
}

impl LayerProbabilities {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidType("empty probability vector".into()));
        }
        if p.iter().any(|&q| !(q >= 0.0) || !q.is_finite()) {
            return Err(Error::InvalidType(format!(
                "negative or non-finite entry in {p:?}"
            )));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidType(format!("probabilities sum to {total}")));
        }
        Ok(Self { p })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }
}

/// Constant-composition type where every symbol of layer `c` occurs `n·p_c/L_c` times.
pub fn counts_from_layer_probs(
    n: usize,
    probs: &LayerProbabilities,
    layers: &[Layer],
) -> Result<SymbolType> {
    let counts: Vec<usize> = layers.iter().map(|l| l.count).collect();
    type_from_layer_counts(n, probs, &counts)
}

/// Same as [`counts_from_layer_probs`], from the per-layer symbol counts `L_c` alone.
pub fn type_from_layer_counts(
    n: usize,
    probs: &LayerProbabilities,
    layer_counts: &[usize],
) -> Result<SymbolType> {
    if probs.len() != layer_counts.len() {
        return Err(Error::InvalidType(format!(
            "{} layer probabilities for {} layers",
            probs.len(),
            layer_counts.len()
        )));
    }
    let mut counts = Vec::new();
    for (c, (&p, &size)) in probs.as_slice().iter().zip(layer_counts).enumerate() {
        if size == 0 {
            return Err(Error::InvalidType(format!("layer {c} has no symbols")));
        }
        let value = n as f64 * p / size as f64;
        let rounded = value.round();
        if (value - rounded).abs() > INTEGRALITY_TOL * value.max(1.0) {
            return Err(Error::NonIntegralType { layer: c, value });
        }
        counts.extend(std::iter::repeat_n(rounded as u64, size));
    }
    let t = SymbolType::new(counts)?;
    if t.n != n {
        return Err(Error::InvalidType(format!(
            "layer counts sum to {} instead of {n}",
            t.n
        )));
    }
    Ok(t)
}

/// Number of distinct words of a given type.
#[derive(Debug, Clone, PartialEq)]
pub struct CodewordCount {
    pub exact: BigUint,
    /// Natural log of `exact`.
    pub log_count: f64,
}

impl CodewordCount {
    pub fn as_u128(&self) -> Option<u128> {
        self.exact.to_u128()
    }
}

/// Multinomial coefficient `n! / ∏ count_x!`, exact and in log form.
pub fn count_codewords(t: &SymbolType) -> CodewordCount {
    // Product of binomials keeps intermediate values integral.
    let mut exact = BigUint::one();
    let mut placed = 0u64;
    for &c in &t.counts {
        for k in 1..=c {
            exact *= placed + k;
            exact /= k;
        }
        placed += c;
    }
    CodewordCount {
        exact,
        log_count: log_multinomial(t),
    }
}

/// `ln(n! / ∏ count_x!)` via log-gamma.
pub fn log_multinomial(t: &SymbolType) -> f64 {
    lgamma(t.n as f64 + 1.0)
        - t.counts
            .iter()
            .map(|&c| lgamma(c as f64 + 1.0))
            .sum::<f64>()
}

/// Rearranges `word` into the next permutation in lexicographic order.
/// Returns `false` (leaving `word` sorted ascending) after the last one.
fn next_permutation(word: &mut [u32]) -> bool {
    let Some(pivot) = word.windows(2).rposition(|w| w[0] < w[1]) else {
        word.reverse();
        return false;
    };
    let successor = word
        .iter()
        .rposition(|&x| x > word[pivot])
        .expect("a larger element exists past the pivot");
    word.swap(pivot, successor);
    word[pivot + 1..].reverse();
    true
}

/// Streams every word of a type in lexicographic order.
#[derive(Debug, Clone)]
pub struct MultisetPermutations {
    current: Option<Codeword>,
}

impl MultisetPermutations {
    pub fn new(t: &SymbolType) -> Self {
        Self {
            current: Some(t.sorted_word()),
        }
    }
}

impl Iterator for MultisetPermutations {
    type Item = Codeword;

    fn next(&mut self) -> Option<Codeword> {
        let word = self.current.take()?;
        let mut next = word.clone();
        if next_permutation(&mut next) {
            self.current = Some(next);
        }
        Some(word)
    }
}

/// The first `min(count, cap)` words of type `t` in lexicographic order.
pub fn enumerate_codewords(t: &SymbolType, cap: usize) -> Vec<Codeword> {
    MultisetPermutations::new(t).take(cap).collect()
}

/// `m` distinct words of type `t` drawn by seeded shuffles, rejecting repeats.
///
/// Gives up after `100·m` shuffles.
pub fn sample_codewords(t: &SymbolType, m: usize, seed: u64) -> Result<Vec<Codeword>> {
    let total = count_codewords(t).exact;
    if BigUint::from(m) > total {
        return Err(Error::RequestExceedsCount {
            requested: m as u128,
            available: total.to_string(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut word = t.sorted_word();
    let mut seen = HashSet::with_capacity(m);
    let mut out = Vec::with_capacity(m);
    let max_attempts = 100 * m;
    let mut attempts = 0;
    while out.len() < m {
        if attempts == max_attempts {
            return Err(Error::SamplingExhausted {
                requested: m,
                found: out.len(),
                attempts,
            });
        }
        attempts += 1;
        word.shuffle(&mut rng);
        if seen.insert(word.clone()) {
            out.push(word.clone());
        }
    }
    Ok(out)
}

/// `m` distinct words of type `t`: a seeded subset of the full enumeration
/// when the type class has fewer than `4·m` words, [`sample_codewords`]
/// otherwise. Subsets keep lexicographic order.
pub fn draw_codewords(t: &SymbolType, m: usize, seed: u64) -> Result<Vec<Codeword>> {
    let total = count_codewords(t);
    match total.as_u128() {
        Some(count) if count < 4 * m as u128 => {
            if count < m as u128 {
                return Err(Error::RequestExceedsCount {
                    requested: m as u128,
                    available: count.to_string(),
                });
            }
            let all = enumerate_codewords(t, count as usize);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut picked = rand::seq::index::sample(&mut rng, all.len(), m).into_vec();
            picked.sort_unstable();
            Ok(picked.into_iter().map(|i| all[i].clone()).collect())
        }
        _ => sample_codewords(t, m, seed),
    }
}

#[derive(Serialize, Deserialize)]
struct CodebookRepr {
    constellation: Constellation,
    n: usize,
    codewords: Vec<Codeword>,
}

/// A set of distinct codewords over a constellation; decoding disks come from
/// the constellation's per-layer radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CodebookRepr", into = "CodebookRepr")]
pub struct Codebook {
    constellation: Constellation,
    n: usize,
    codewords: Vec<Codeword>,
}

impl TryFrom<CodebookRepr> for Codebook {
    type Error = Error;

    fn try_from(repr: CodebookRepr) -> Result<Self> {
        Codebook::new(repr.constellation, repr.n, repr.codewords)
    }
}

impl From<Codebook> for CodebookRepr {
    fn from(cb: Codebook) -> Self {
        Self {
            constellation: cb.constellation,
            n: cb.n,
            codewords: cb.codewords,
        }
    }
}

impl Codebook {
    pub fn new(constellation: Constellation, n: usize, codewords: Vec<Codeword>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidCodebook("blocklength must be >= 1".into()));
        }
        if codewords.is_empty() {
            return Err(Error::InvalidCodebook(
                "at least one codeword required".into(),
            ));
        }
        let alphabet = constellation.len();
        let mut seen = HashSet::with_capacity(codewords.len());
        for (i, word) in codewords.iter().enumerate() {
            if word.len() != n {
                return Err(Error::InvalidCodebook(format!(
                    "codeword {i} has length {} instead of {n}",
                    word.len()
                )));
            }
            if let Some(&x) = word.iter().find(|&&x| x as usize >= alphabet) {
                return Err(Error::IndexOutOfRange {
                    index: x as usize,
                    len: alphabet,
                });
            }
            if !seen.insert(word.as_slice()) {
                return Err(Error::InvalidCodebook(format!("codeword {i} is repeated")));
            }
        }
        Ok(Self {
            constellation,
            n,
            codewords,
        })
    }

    pub fn constellation(&self) -> &Constellation {
        &self.constellation
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of messages `M`.
    pub fn m(&self) -> usize {
        self.codewords.len()
    }

    pub fn codewords(&self) -> &[Codeword] {
        &self.codewords
    }

    pub fn region_radii(&self) -> Vec<f64> {
        self.constellation
            .layers()
            .iter()
            .map(|l| l.radius)
            .collect()
    }

    /// `n_c(i)`: how many symbols of each layer codeword `i` uses.
    pub fn layer_usage(&self, i: usize) -> Vec<usize> {
        let mut usage = vec![0; self.constellation.num_layers()];
        for &x in &self.codewords[i] {
            usage[self.constellation.layer_of(x as usize)] += 1;
        }
        usage
    }

    /// Information rate `log2(M)/n` in bits per channel use.
    pub fn rate_bits(&self) -> f64 {
        (self.m() as f64).log2() / self.n as f64
    }
}

/// Per-codeword types, their average, and whether they all coincide.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeTypeSummary {
    pub average: Vec<f64>,
    pub per_codeword: Vec<SymbolType>,
    pub constant_composition: bool,
}

impl CodeTypeSummary {
    /// The common type when the code is constant-composition.
    pub fn common_type(&self) -> Option<&SymbolType> {
        self.constant_composition.then(|| &self.per_codeword[0])
    }
}

pub fn code_type(cb: &Codebook) -> CodeTypeSummary {
    let alphabet = cb.constellation.len();
    let per_codeword: Vec<SymbolType> = cb
        .codewords
        .iter()
        .map(|w| SymbolType::of_codeword(w, alphabet).expect("codebook indices are validated"))
        .collect();
    let mut totals = vec![0u64; alphabet];
    for t in &per_codeword {
        for (acc, &c) in totals.iter_mut().zip(&t.counts) {
            *acc += c;
        }
    }
    let denom = (cb.n * cb.m()) as f64;
    let average = totals.iter().map(|&c| c as f64 / denom).collect();
    let constant_composition = per_codeword.windows(2).all(|w| w[0] == w[1]);
    CodeTypeSummary {
        average,
        per_codeword,
        constant_composition,
    }
}

/// Compact description of a sampled constant-composition codebook.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompactCodebook {
    pub constellation: Constellation,
    pub type_counts: BTreeMap<usize, u64>,
    #[serde(rename = "M")]
    pub m: u128,
    pub seed: u64,
}

impl CompactCodebook {
    pub fn symbol_type(&self) -> Result<SymbolType> {
        SymbolType::from_map(&self.type_counts, self.constellation.len())
    }

    /// Materializes the codewords by seeded sampling.
    pub fn expand(&self) -> Result<Codebook> {
        let t = self.symbol_type()?;
        let m = usize::try_from(self.m).map_err(|_| {
            Error::InvalidCodebook(format!("M = {} cannot be materialized", self.m))
        })?;
        let words = draw_codewords(&t, m, self.seed)?;
        Codebook::new(self.constellation.clone(), t.n(), words)
    }
}

/// Either codebook JSON layout.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum CodebookFile {
    Full(Codebook),
    Compact(CompactCodebook),
}

impl<'de> Deserialize<'de> for CodebookFile {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let value = serde_json::Value::deserialize(d)?;
        let full = value.get("codewords").is_some();
        if full {
            serde_json::from_value(value).map(Self::Full)
        } else {
            serde_json::from_value(value).map(Self::Compact)
        }
        .map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::build_constellation;

    fn t(counts: &[u64]) -> SymbolType {
        SymbolType::new(counts.to_vec()).unwrap()
    }

    /// Independent recursive generator: choose the next symbol among those with
    /// remaining multiplicity.
    fn oracle_words(counts: &[u64]) -> Vec<Codeword> {
        fn rec(remaining: &mut Vec<u64>, prefix: &mut Codeword, out: &mut Vec<Codeword>) {
            if remaining.iter().all(|&c| c == 0) {
                out.push(prefix.clone());
                return;
            }
            for x in 0..remaining.len() {
                if remaining[x] > 0 {
                    remaining[x] -= 1;
                    prefix.push(x as u32);
                    rec(remaining, prefix, out);
                    prefix.pop();
                    remaining[x] += 1;
                }
            }
        }
        let mut out = Vec::new();
        rec(&mut counts.to_vec(), &mut Vec::new(), &mut out);
        out
    }

    fn layers(counts: &[usize]) -> Vec<Layer> {
        counts
            .iter()
            .enumerate()
            .map(|(c, &l)| Layer::new(10.0 * (counts.len() - c) as f64, l, 0.0, 1.0).unwrap())
            .collect()
    }

    #[test]
    fn counts_from_probs() {
        let p = LayerProbabilities::new(vec![0.5, 0.5]).unwrap();
        let ty = counts_from_layer_probs(100, &p, &layers(&[5, 5])).unwrap();
        assert_eq!(ty.counts(), &[10; 10]);

        let p = LayerProbabilities::new(vec![1.0]).unwrap();
        assert_eq!(
            counts_from_layer_probs(4, &p, &layers(&[2]))
                .unwrap()
                .counts(),
            &[2, 2]
        );

        let p = LayerProbabilities::new(vec![0.35, 0.65]).unwrap();
        assert!(matches!(
            counts_from_layer_probs(10, &p, &layers(&[7, 13])),
            Err(Error::NonIntegralType { layer: 0, .. })
        ));
    }

    #[test]
    fn layer_probabilities_validation() {
        assert!(LayerProbabilities::new(vec![0.5, 0.6]).is_err());
        assert!(LayerProbabilities::new(vec![-0.5, 1.5]).is_err());
        assert!(LayerProbabilities::new(vec![]).is_err());
    }

    #[test]
    fn small_counts() {
        assert_eq!(count_codewords(&t(&[2, 2])).exact, BigUint::from(6u32));
        let c = count_codewords(&t(&[5, 4, 3]));
        assert_eq!(c.exact, BigUint::from(27720u32));
        assert_eq!(oracle_words(&[5, 4, 3]).len(), 27720);
        assert!((c.log_count - 27720f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn uniform_hundred_over_ten() {
        let c = count_codewords(&t(&[10; 10]));
        assert!((c.log_count / 100.0 - 2.127).abs() < 0.0005);
        let exact_ln = {
            // ln of the BigUint through its bit length and leading digits.
            let bits = c.exact.bits();
            let shift = bits.saturating_sub(64);
            let top = (&c.exact >> shift).to_f64().unwrap();
            top.ln() + shift as f64 * std::f64::consts::LN_2
        };
        assert!((c.log_count - exact_ln).abs() / exact_ln < 1e-9);
    }

    #[test]
    fn enumeration_order_and_content() {
        let words = enumerate_codewords(&t(&[1, 1]), usize::MAX);
        assert_eq!(words, vec![vec![0, 1], vec![1, 0]]);

        let words = enumerate_codewords(&t(&[2, 2]), usize::MAX);
        assert_eq!(words.len(), 6);
        assert!(words.windows(2).all(|w| w[0] < w[1]));
        for w in &words {
            assert_eq!(SymbolType::of_codeword(w, 2).unwrap(), t(&[2, 2]));
        }

        let words = enumerate_codewords(&t(&[5, 4, 3]), 1_000_000);
        assert_eq!(words.len(), 27720);
        let ours: HashSet<_> = words.into_iter().collect();
        let oracle: HashSet<_> = oracle_words(&[5, 4, 3]).into_iter().collect();
        assert_eq!(ours, oracle);

        assert_eq!(enumerate_codewords(&t(&[5, 4, 3]), 10).len(), 10);
    }

    #[test]
    fn sampling() {
        let mut full = sample_codewords(&t(&[2, 2]), 6, 17).unwrap();
        full.sort();
        assert_eq!(full, enumerate_codewords(&t(&[2, 2]), usize::MAX));

        let ty = t(&[10; 10]);
        let words = sample_codewords(&ty, 100, 42).unwrap();
        assert_eq!(words.iter().collect::<HashSet<_>>().len(), 100);
        for w in &words {
            assert_eq!(SymbolType::of_codeword(w, 10).unwrap(), ty);
        }
        assert_eq!(words, sample_codewords(&ty, 100, 42).unwrap());
        assert_ne!(words, sample_codewords(&ty, 100, 43).unwrap());

        assert!(matches!(
            sample_codewords(&t(&[2, 2]), 7, 0),
            Err(Error::RequestExceedsCount { .. })
        ));
    }

    fn binary() -> Constellation {
        build_constellation(vec![Layer::new(1.0, 2, 0.0, 0.5).unwrap()]).unwrap()
    }

    #[test]
    fn code_type_examples() {
        let cb = Codebook::new(binary(), 4, vec![vec![0, 0, 1, 1]]).unwrap();
        let s = code_type(&cb);
        assert_eq!(s.average, vec![0.5, 0.5]);
        assert!(s.constant_composition);

        let cb = Codebook::new(binary(), 3, vec![vec![0, 0, 1], vec![1, 1, 0]]).unwrap();
        let s = code_type(&cb);
        assert_eq!(s.average, vec![0.5, 0.5]);
        assert!(!s.constant_composition);
        assert!(s.common_type().is_none());

        let ty = t(&[2, 1, 1]);
        let cst = build_constellation(vec![Layer::new(1.0, 3, 0.0, 0.5).unwrap()]).unwrap();
        let cb = Codebook::new(cst, 4, enumerate_codewords(&ty, usize::MAX)).unwrap();
        let s = code_type(&cb);
        assert!(s.constant_composition);
        assert_eq!(s.common_type(), Some(&ty));
        assert_eq!(s.average, ty.probabilities());
    }

    #[test]
    fn codebook_validation() {
        assert!(Codebook::new(binary(), 2, vec![]).is_err());
        assert!(Codebook::new(binary(), 2, vec![vec![0, 1], vec![0, 1]]).is_err());
        assert!(Codebook::new(binary(), 2, vec![vec![0, 2]]).is_err());
        assert!(Codebook::new(binary(), 2, vec![vec![0]]).is_err());
    }

    #[test]
    fn codebook_json() {
        let cb = Codebook::new(binary(), 2, vec![vec![0, 1], vec![1, 0]]).unwrap();
        let text = serde_json::to_string(&cb).unwrap();
        assert!(text.starts_with(r#"{"constellation":{"layers":"#));
        assert!(text.ends_with(r#""n":2,"codewords":[[0,1],[1,0]]}"#));
        let parsed: CodebookFile = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed, CodebookFile::Full(cb));

        let compact = CompactCodebook {
            constellation: binary(),
            type_counts: t(&[3, 3]).to_map(),
            m: 5,
            seed: 9,
        };
        let text = serde_json::to_string(&compact).unwrap();
        assert!(text.contains(r#""type_counts":{"0":3,"1":3},"M":5,"seed":9"#));
        let CodebookFile::Compact(back) = serde_json::from_str(&text).unwrap() else {
            panic!("expected compact form");
        };
        let cb = back.expand().unwrap();
        assert_eq!(cb.m(), 5);
        assert!(code_type(&cb).constant_composition);
    }

    #[test]
    fn draw_dense_and_sparse() {
        let dense = t(&[2, 2]);
        let all = draw_codewords(&dense, 6, 1).unwrap();
        assert_eq!(all, enumerate_codewords(&dense, 6));
        let some = draw_codewords(&dense, 4, 1).unwrap();
        assert_eq!(some.len(), 4);
        assert!(some.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(some, draw_codewords(&dense, 4, 1).unwrap());
        assert!(matches!(
            draw_codewords(&dense, 7, 1),
            Err(Error::RequestExceedsCount { .. })
        ));
        let sparse = draw_codewords(&t(&[5, 5]), 3, 2).unwrap();
        assert_eq!(sparse, sample_codewords(&t(&[5, 5]), 3, 2).unwrap());
    }

    #[test]
    fn entropy() {
        assert!((entropy_nats(&[0.5, 0.5]) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(entropy_nats(&[1.0, 0.0]), 0.0);
    }
}
