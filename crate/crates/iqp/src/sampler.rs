//! Approximate sampling from noisy circuit output distributions.
//!
//! The pipeline: estimate the Fourier coefficients of the output
//! distribution up to mask weight ell by Monte Carlo autocorrelation
//! queries to the circuit phase function, damp them by the noise rate,
//! then sample bit by bit from the signed function those coefficients
//! synthesize. Every prefix marginal of the synthesized function is a
//! short signed sum over the stored coefficients, so drawing one sample
//! costs one pass over the coefficient table and negative marginals are
//! repaired on the fly (the "fix" of the signed function).

use crate::error::{Error, Result};
use crate::program::{root_of_unity, XProgram};
use crate::rng::Rng;
use crate::simulate::{Distribution, DENSE_GUARD};
use crate::wht::wht_real;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Exhaustive tree walks over all 2^n prefixes stay cheap up to here.
pub const TREE_GUARD: usize = 20;

/// Black-box access to the phase function f of a circuit:
/// correlate(y, s) = Re(conj(f(y)) f(y xor s)), a value in [-1, 1].
/// The mean of correlate(., s) over uniform y is 2^n p_hat(s).
pub trait PhaseOracle: Sync {
    fn n(&self) -> usize;
    fn correlate(&self, y: u64, s: u64) -> f64;
}

/// Oracle backed by an X-program, with a dense exponent table when n is
/// small enough and direct evaluation otherwise. Phases are roots of
/// unity, so the correlation is a cosine of an exponent difference and
/// comes from a table of 2*den exact values.
pub struct TabulatedOracle<'a> {
    prog: &'a XProgram,
    table: Option<Vec<u8>>,
    cos: Vec<f64>,
    modulus: u32,
}

impl<'a> TabulatedOracle<'a> {
    pub fn new(prog: &'a XProgram) -> Self {
        let table = (prog.n() <= DENSE_GUARD).then(|| prog.exponent_table().expect("guarded"));
        let den = prog.den();
        let modulus = 2 * den;
        let cos = (0..modulus).map(|d| root_of_unity(d, den).re).collect();
        TabulatedOracle {
            prog,
            table,
            cos,
            modulus,
        }
    }

    fn exponent(&self, x: u64) -> u32 {
        match &self.table {
            Some(t) => t[x as usize] as u32,
            None => self.prog.eval_exponent(x),
        }
    }
}

impl PhaseOracle for TabulatedOracle<'_> {
    fn n(&self) -> usize {
        self.prog.n()
    }

    fn correlate(&self, y: u64, s: u64) -> f64 {
        let d = (self.exponent(y ^ s) + self.modulus - self.exponent(y)) % self.modulus;
        self.cos[d as usize]
    }
}

fn binomial_f64(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut b = 1.0;
    for i in 1..=k {
        b = b * (n - k + i) as f64 / i as f64;
    }
    b
}

/// Everything the estimation stage needs, derived once from the target
/// accuracy by choose_parameters.
#[derive(Debug, Clone, Serialize)]
pub struct SamplerConfig {
    /// qubit count
    pub n: usize,
    /// assumed bound on 2^n * sum_s p(s)^2 (anticoncentration constant)
    pub alpha: f64,
    /// target l1 accuracy parameter
    pub delta: f64,
    /// noise rate the coefficients are damped by
    pub epsilon: f64,
    /// largest mask weight kept in the spectrum
    pub ell: usize,
    /// additive accuracy gamma_0 for weight-0 normalized coefficients;
    /// weight k gets gamma_0 (1-epsilon)^(-k/2)
    pub gamma_acc: f64,
    /// batches per coefficient whose median is taken, odd
    pub median_reps: u64,
    /// number of masks with weight between 1 and ell
    pub coeff_count: f64,
}

impl SamplerConfig {
    pub fn gamma_for_weight(&self, k: usize) -> f64 {
        self.gamma_acc * (1.0 - self.epsilon).powf(-(k as f64) / 2.0)
    }

    /// Batch size making a single batch miss gamma_k with probability
    /// at most 1/3 (Hoeffding on [-1, 1] values); the median over
    /// median_reps batches then misses with probability below
    /// 1/(n * coeff_count).
    pub fn samples_for_weight(&self, k: usize) -> u64 {
        let g = self.gamma_for_weight(k);
        (2.0 * 6f64.ln() / (g * g)).ceil() as u64
    }

    /// Total phase-function evaluations one estimation pass costs.
    pub fn total_oracle_evals(&self) -> f64 {
        (1..=self.ell)
            .map(|k| {
                binomial_f64(self.n, k)
                    * self.median_reps as f64
                    * self.samples_for_weight(k) as f64
                    * 2.0
            })
            .sum()
    }

    /// The same config with the truncation weight forced. The
    /// estimation half of the error budget is re-balanced over the
    /// masks actually kept; the truncation half becomes whatever the
    /// forced weight leaves it.
    pub fn with_ell(self, ell: usize) -> SamplerConfig {
        derive_config(self.n, self.alpha, self.delta, self.epsilon, ell.min(self.n))
    }
}

fn derive_config(n: usize, alpha: f64, delta: f64, epsilon: f64, ell: usize) -> SamplerConfig {
    let damped_mass: f64 = (0..=ell)
        .map(|k| binomial_f64(n, k) * (1.0 - epsilon).powi(k as i32))
        .sum();
    let gamma_acc = delta / (2.0 * damped_mass).sqrt();
    let coeff_count: f64 = (1..=ell).map(|k| binomial_f64(n, k)).sum();
    let mut median_reps = (18.0 * (n as f64 * coeff_count).ln()).ceil().max(1.0) as u64;
    if median_reps % 2 == 0 {
        median_reps += 1;
    }
    SamplerConfig {
        n,
        alpha,
        delta,
        epsilon,
        ell,
        gamma_acc,
        median_reps,
        coeff_count,
    }
}

/// Pick truncation weight and per-coefficient accuracies so the sampled
/// distribution lands within delta (in l2-derived l1 budget) of the noisy
/// target, assuming 2^n sum p^2 <= alpha. The truncation tail costs
/// alpha e^(-2 epsilon ell) <= delta^2 / 2 and the estimation errors cost
/// gamma_0^2 sum_(k<=ell) C(n,k) (1-epsilon)^k = delta^2 / 2.
pub fn choose_parameters(n: usize, alpha: f64, delta: f64, epsilon: f64) -> Result<SamplerConfig> {
    if n == 0 {
        return Err(Error::InvalidParam("n must be at least 1".into()));
    }
    if !(alpha >= 1.0) || !alpha.is_finite() {
        return Err(Error::InvalidParam(format!("alpha {alpha} must be >= 1")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParam(format!("delta {delta} outside (0, 1)")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParam(format!(
            "epsilon {epsilon} outside (0, 1)"
        )));
    }
    let ell_raw = ((2.0 * alpha / (delta * delta)).ln() / (2.0 * epsilon)).ceil() as usize;
    Ok(derive_config(n, alpha, delta, epsilon, ell_raw.min(n)))
}

/// Exact normalized autocorrelation a_s = 2^-n sum_y correlate(y, s),
/// equal to 2^n p_hat(s).
pub fn exact_coefficient<O: PhaseOracle + ?Sized>(oracle: &O, s: u64) -> Result<f64> {
    let n = oracle.n();
    if n > DENSE_GUARD {
        return Err(Error::SizeGuard {
            what: "exact autocorrelation",
            requested: n,
            limit: DENSE_GUARD,
        });
    }
    let total: f64 = (0..1u64 << n).map(|y| oracle.correlate(y, s)).sum();
    Ok(total / (1u64 << n) as f64)
}

/// Median of `reps` batch means of `batch` oracle correlations at mask s.
pub fn estimate_coefficient<O: PhaseOracle + ?Sized>(
    oracle: &O,
    s: u64,
    batch: u64,
    reps: u64,
    rng: &Rng,
) -> f64 {
    let n = oracle.n();
    let mut means: Vec<f64> = (0..reps)
        .map(|b| {
            let mut r = rng.split(b);
            let mut acc = 0.0;
            for _ in 0..batch {
                acc += oracle.correlate(r.bits(n), s);
            }
            acc / batch as f64
        })
        .collect();
    means.sort_by(f64::total_cmp);
    let mid = means.len() / 2;
    if means.len() % 2 == 1 {
        means[mid]
    } else {
        0.5 * (means[mid - 1] + means[mid])
    }
}

/// A sparse set of Fourier coefficients of a (possibly signed) function
/// on n-bit strings, sorted by (mask weight, mask value).
#[derive(Debug, Clone, PartialEq)]
pub struct FourierTable {
    n: usize,
    entries: Vec<(u64, f64)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableJson {
    n: usize,
    entries: Vec<EntryJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryJson {
    mask: String,
    coeff: f64,
}

impl FourierTable {
    pub fn new(n: usize, mut entries: Vec<(u64, f64)>) -> Result<Self> {
        if n == 0 || n > 64 {
            return Err(Error::InvalidParam(format!("n {n} outside 1..=64")));
        }
        for &(mask, coeff) in &entries {
            if n < 64 && mask >> n != 0 {
                return Err(Error::Validation(format!(
                    "mask {mask:#x} does not fit in {n} bits"
                )));
            }
            if !coeff.is_finite() {
                return Err(Error::Validation(format!(
                    "coefficient {coeff} at mask {mask:#x} is not finite"
                )));
            }
        }
        entries.sort_by_key(|&(mask, _)| (mask.count_ones(), mask));
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Validation("duplicate mask in table".into()));
        }
        Ok(FourierTable { n, entries })
    }

    /// Keep the nonzero coefficients of a dense spectrum.
    pub fn from_dense(n: usize, coeffs: &[f64]) -> Result<Self> {
        if coeffs.len() != 1usize << n {
            return Err(Error::Dimension(format!(
                "need {} coefficients for n = {n}, got {}",
                1usize << n,
                coeffs.len()
            )));
        }
        FourierTable::new(
            n,
            coeffs
                .iter()
                .enumerate()
                .filter(|&(_, &c)| c != 0.0)
                .map(|(s, &c)| (s as u64, c))
                .collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[(u64, f64)] {
        &self.entries
    }

    pub fn get(&self, mask: u64) -> Option<f64> {
        self.entries
            .iter()
            .find(|&&(m, _)| m == mask)
            .map(|&(_, c)| c)
    }

    /// Damp each coefficient by (1-epsilon)^weight, the Fourier action of
    /// the bit-flip channel.
    pub fn damped(&self, epsilon: f64) -> Result<FourierTable> {
        crate::noise::NoiseParams::new(epsilon)?;
        FourierTable::new(
            self.n,
            self.entries
                .iter()
                .map(|&(m, c)| (m, c * (1.0 - epsilon).powi(m.count_ones() as i32)))
                .collect(),
        )
    }

    /// Mass the synthesized function assigns to the 2^(n-k) strings whose
    /// leading k bits read y: only masks confined to those k bits
    /// contribute, each with a sign set by the prefix.
    pub fn marginal(&self, y: u64, k: usize) -> f64 {
        assert!(k <= self.n, "prefix length {k} exceeds n {}", self.n);
        let top = if k == 0 { 0 } else { y << (self.n - k) };
        let cutoff = (self.n - k) as u32;
        let mut total = 0.0;
        for &(s, c) in &self.entries {
            if s == 0 || s.trailing_zeros() >= cutoff {
                total += if (top & s).count_ones() % 2 == 0 { c } else { -c };
            }
        }
        total * (1u64 << (self.n - k)) as f64
    }

    /// Dense signed function sum_s coeff_s (-1)^(s.x); may dip negative
    /// when the coefficients are estimates.
    pub fn synthesize(&self) -> Result<Vec<f64>> {
        if self.n > DENSE_GUARD {
            return Err(Error::SizeGuard {
                what: "dense synthesis",
                requested: self.n,
                limit: DENSE_GUARD,
            });
        }
        let mut values = vec![0.0; 1 << self.n];
        for &(s, c) in &self.entries {
            values[s as usize] = c;
        }
        wht_real(&mut values);
        Ok(values)
    }

    pub fn to_json(&self) -> String {
        let doc = TableJson {
            n: self.n,
            entries: self
                .entries
                .iter()
                .map(|&(m, c)| EntryJson {
                    mask: format!("{m:x}"),
                    coeff: c,
                })
                .collect(),
        };
        let mut text = serde_json::to_string_pretty(&doc).expect("plain data serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: TableJson = serde_json::from_str(text)?;
        let entries = doc
            .entries
            .iter()
            .map(|e| {
                u64::from_str_radix(&e.mask, 16)
                    .map(|m| (m, e.coeff))
                    .map_err(|err| Error::Parse(format!("bad mask {:?}: {err}", e.mask)))
            })
            .collect::<Result<Vec<_>>>()?;
        FourierTable::new(doc.n, entries)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumSource {
    Exact,
    Estimate,
}

/// Build the damped truncated spectrum of the circuit's output
/// distribution: coefficient (1-epsilon)^|s| a_s 2^-n for every mask with
/// 1 <= |s| <= ell, plus the exact 2^-n at s = 0. The source picks exact
/// autocorrelations or median-of-means estimates.
pub fn build_spectrum(
    prog: &XProgram,
    config: &SamplerConfig,
    source: SpectrumSource,
    rng: &Rng,
) -> Result<FourierTable> {
    if prog.n() != config.n {
        return Err(Error::Dimension(format!(
            "program has {} qubits, config expects {}",
            prog.n(),
            config.n
        )));
    }
    let n = config.n;
    if n > 63 {
        return Err(Error::SizeGuard {
            what: "spectrum mask enumeration",
            requested: n,
            limit: 63,
        });
    }
    let oracle = TabulatedOracle::new(prog);
    let scale = 2f64.powi(-(n as i32));
    let mut masks = Vec::new();
    for k in 1..=config.ell.min(n) {
        let mut s = (1u64 << k) - 1;
        loop {
            masks.push(s);
            // Gosper's hack: next integer with the same popcount
            let c = s & s.wrapping_neg();
            let r = s + c;
            s = (((r ^ s) >> 2) / c) | r;
            if s >> (n - 1) > 1 {
                break;
            }
        }
    }
    if source == SpectrumSource::Exact && n > DENSE_GUARD {
        return Err(Error::SizeGuard {
            what: "exact spectrum",
            requested: n,
            limit: DENSE_GUARD,
        });
    }
    let coeffs: Vec<f64> = masks
        .par_iter()
        .enumerate()
        .map(|(idx, &s)| {
            let k = s.count_ones() as usize;
            let damp = (1.0 - config.epsilon).powi(k as i32);
            if damp == 0.0 {
                return Ok(0.0);
            }
            let a = match source {
                SpectrumSource::Exact => exact_coefficient(&oracle, s)?,
                SpectrumSource::Estimate => estimate_coefficient(
                    &oracle,
                    s,
                    config.samples_for_weight(k),
                    config.median_reps,
                    &rng.split(idx as u64),
                ),
            };
            Ok(damp * a * scale)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut entries = vec![(0u64, scale)];
    entries.extend(masks.into_iter().zip(coeffs));
    FourierTable::new(n, entries)
}

/// Probabilities (q0, q1) for descending to the two children of a prefix
/// whose halves carry signed mass s0 and s1. Negative mass within
/// rounding tolerance of zero is treated as empty; a genuinely negative
/// pair means the table is not a valid signed spectrum.
fn branch_probs(s0: f64, s1: f64) -> Result<(f64, f64)> {
    const NEG_TOL: f64 = -1e-12;
    if s0 < NEG_TOL && s1 < NEG_TOL {
        return Err(Error::Validation(format!(
            "both branch masses negative beyond tolerance: {s0} and {s1}"
        )));
    }
    if s0 < 0.0 && s1 < 0.0 {
        return Ok((0.5, 0.5));
    }
    if s0 < 0.0 {
        return Ok((0.0, 1.0));
    }
    if s1 < 0.0 {
        return Ok((1.0, 0.0));
    }
    let total = s0 + s1;
    if total <= 0.0 {
        Ok((0.5, 0.5))
    } else {
        Ok((s0 / total, s1 / total))
    }
}

/// Bit-by-bit sampler over a coefficient table. Grouping entries by the
/// level at which their mask becomes prefix-confined makes each sample one
/// pass over the table: the child masses follow the parent's by
///   S(y0) = S(y)/2 + 2^(n-k-1) B,  S(y1) = S(y)/2 - 2^(n-k-1) B,
/// where B sums the newly confined coefficients with prefix signs.
pub struct AlgSampler {
    n: usize,
    root: f64,
    levels: Vec<Vec<(u64, f64)>>,
}

impl AlgSampler {
    pub fn new(table: &FourierTable) -> Result<Self> {
        let n = table.n();
        let c0 = table
            .get(0)
            .ok_or_else(|| Error::Validation("table lacks the mask-0 coefficient".into()))?;
        let root = 2f64.powi(n as i32) * c0;
        if !(root > 0.0) {
            return Err(Error::Validation(format!(
                "total signed mass {root} is not positive"
            )));
        }
        let mut levels = vec![Vec::new(); n];
        for &(s, c) in table.entries() {
            if s != 0 {
                levels[n - 1 - s.trailing_zeros() as usize].push((s, c));
            }
        }
        Ok(AlgSampler { n, root, levels })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn children(&self, y: u64, k: usize, mass: f64) -> (f64, f64) {
        let top = if k == 0 { 0 } else { y << (self.n - k) };
        let mut b = 0.0;
        for &(s, c) in &self.levels[k] {
            b += if (top & s).count_ones() % 2 == 0 { c } else { -c };
        }
        let h = (1u64 << (self.n - k - 1)) as f64;
        (mass / 2.0 + h * b, mass / 2.0 - h * b)
    }

    pub fn sample(&self, rng: &mut Rng) -> Result<u64> {
        let mut y = 0u64;
        let mut mass = self.root;
        for k in 0..self.n {
            let (s0, s1) = self.children(y, k, mass);
            let (q0, _) = branch_probs(s0, s1)?;
            let bit = if q0 == 1.0 {
                0
            } else if q0 == 0.0 {
                1
            } else if rng.bernoulli(q0) {
                0
            } else {
                1
            };
            y = y << 1 | bit;
            mass = if bit == 0 { s0 } else { s1 };
        }
        Ok(y)
    }

    /// Draw count samples, one split stream each, so the output is
    /// independent of thread scheduling.
    pub fn sample_many(&self, count: u64, rng: &Rng) -> Result<Vec<u64>> {
        (0..count)
            .into_par_iter()
            .map(|i| {
                let mut r = rng.split(i);
                self.sample(&mut r)
            })
            .collect()
    }
}

/// The full distribution the sampler induces, by walking every prefix a
/// sampling run can reach. Zero-probability branches are pruned, not
/// descended: their leaves keep probability zero by definition, and their
/// masses (possibly meaninglessly negative) never face the branch rules,
/// exactly as in sampling.
pub fn alg_distribution(table: &FourierTable) -> Result<Vec<f64>> {
    let n = table.n();
    if n > TREE_GUARD {
        return Err(Error::SizeGuard {
            what: "exhaustive sampler tree",
            requested: n,
            limit: TREE_GUARD,
        });
    }
    let sampler = AlgSampler::new(table)?;
    let mut out = vec![0.0; 1 << n];
    let mut stack = vec![(0u64, 0usize, sampler.root, 1.0f64)];
    while let Some((y, k, mass, prob)) = stack.pop() {
        if k == n {
            out[y as usize] = prob;
            continue;
        }
        let (s0, s1) = sampler.children(y, k, mass);
        let (q0, q1) = branch_probs(s0, s1)?;
        if q0 > 0.0 {
            stack.push((y << 1, k + 1, s0, prob * q0));
        }
        if q1 > 0.0 {
            stack.push((y << 1 | 1, k + 1, s1, prob * q1));
        }
    }
    Ok(out)
}

/// Redistribute the mass of a signed vector (total must be positive) so
/// nothing is negative, by the same halving descent the sampler performs:
/// a half with nonpositive sum is zeroed and its sibling carries the full
/// parent mass, split proportionally below. Preserves the total.
pub fn fix(values: &[f64]) -> Result<Vec<f64>> {
    if !values.len().is_power_of_two() {
        return Err(Error::Dimension(format!(
            "length {} is not a power of two",
            values.len()
        )));
    }
    let total: f64 = values.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Validation(format!(
            "total signed mass {total} is not positive"
        )));
    }
    let mut out = vec![0.0; values.len()];
    fix_block(values, 0, &mut out, total);
    Ok(out)
}

fn fix_block(block: &[f64], offset: usize, out: &mut [f64], weight: f64) {
    if weight == 0.0 {
        return;
    }
    if block.len() == 1 {
        out[offset] = weight;
        return;
    }
    let half = block.len() / 2;
    let (left, right) = block.split_at(half);
    let s0: f64 = left.iter().sum();
    let s1: f64 = right.iter().sum();
    let (q0, q1) = branch_probs(s0, s1).expect("positive parent mass");
    fix_block(left, offset, out, weight * q0);
    fix_block(right, offset + half, out, weight * q1);
}

/// Spectrum of the uniform distribution over the strings orthogonal to t:
/// coefficient 2^-n at masks 0 and t, nothing else.
pub fn simon_spectrum(n: usize, t: u64) -> Result<FourierTable> {
    if t == 0 || (n < 64 && t >> n != 0) {
        return Err(Error::InvalidParam(format!(
            "t {t:#x} must be a nonzero {n}-bit mask"
        )));
    }
    let c = 2f64.powi(-(n as i32));
    FourierTable::new(n, vec![(0, c), (t, c)])
}

pub fn l1_distance(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "length mismatch in l1 distance");
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Empirical distribution of a batch of n-bit samples.
pub fn empirical(n: usize, samples: &[u64]) -> Result<Distribution> {
    let mut counts = vec![0u64; 1 << n];
    for &s in samples {
        let i = s as usize;
        if i >= counts.len() {
            return Err(Error::Validation(format!(
                "sample {s:#x} does not fit in {n} bits"
            )));
        }
        counts[i] += 1;
    }
    Distribution::from_counts(n, &counts)
}
