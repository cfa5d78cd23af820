//! Classical linear codes protecting circuit output against bit flips.
//!
//! Encoding a circuit by a generator matrix M pushes its output
//! distribution forward along t -> M^T t: the encoded circuit's phase
//! function is f_M(x) = f(Mx), whose amplitude spectrum carries f_hat(t)
//! at each codeword M^T t and nothing anywhere else. Samples therefore
//! land on exact codewords, noise flips a few bits, and a decoder rounds
//! back. The repetition code with majority decoding keeps the failure
//! probability per logical bit at (eps(2-eps))^(r/2).
//!
//! The phase functions here are built from subset indicators, while the
//! row-map form of the encoding acts on parities. encode_xprogram bridges
//! the two: each row's product of block parities is expanded into subset
//! rows with numerators num * (-2)^(sum(|S_i|-1)). Numerators that vanish
//! mod 2*den are dropped, which truncates the expansion to a polynomial
//! number of rows for the dyadic angle families used here. Rows with a
//! zero exponent expand to nothing and disappear.

use crate::error::{Error, Result};
use crate::mask::Mask;
use crate::noise::NoiseParams;
use crate::program::{Row, XProgram};
use crate::rng::Rng;
use crate::simulate::{output_distribution, sample_from_cdf, Distribution};
use rayon::prelude::*;

pub type Decoder = Box<dyn Fn(&Mask) -> u64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodeKind {
    Repetition { r: usize },
    General,
}

pub struct CodeSpec {
    n: usize,
    m: usize,
    generator: Vec<Mask>,
    kind: CodeKind,
    decoder: Decoder,
}

impl CodeSpec {
    /// A general code from its generator rows (row i is the m-bit image of
    /// info bit i) and a decoder. The rows must be linearly independent.
    pub fn new_general(n: usize, m: usize, generator: Vec<Mask>, decoder: Decoder) -> Result<Self> {
        CodeSpec::build(n, m, generator, CodeKind::General, decoder)
    }

    fn build(
        n: usize,
        m: usize,
        generator: Vec<Mask>,
        kind: CodeKind,
        decoder: Decoder,
    ) -> Result<Self> {
        if n == 0 || n > 64 {
            return Err(Error::InvalidParam(format!("info width {n} outside 1..=64")));
        }
        if m < n {
            return Err(Error::InvalidParam(format!(
                "code length {m} shorter than info width {n}"
            )));
        }
        if generator.len() != n {
            return Err(Error::Dimension(format!(
                "{} generator rows for {n} info bits",
                generator.len()
            )));
        }
        for (i, row) in generator.iter().enumerate() {
            if row.highest_bit().map_or(true, |b| b >= m) {
                return Err(Error::Validation(format!(
                    "generator row {i} is empty or exceeds {m} bits"
                )));
            }
        }
        // rank by elimination: reduce each row by earlier pivots
        let mut pivots: Vec<Mask> = Vec::with_capacity(n);
        for (i, row) in generator.iter().enumerate() {
            let mut reduced = row.clone();
            for p in &pivots {
                if !reduced.is_zero()
                    && p.highest_bit() == reduced.highest_bit()
                {
                    reduced = reduced.xor(p);
                }
            }
            // a second pass handles pivots discovered out of order
            let mut changed = true;
            while changed && !reduced.is_zero() {
                changed = false;
                for p in &pivots {
                    if p.highest_bit() == reduced.highest_bit() {
                        reduced = reduced.xor(p);
                        changed = true;
                        break;
                    }
                }
            }
            if reduced.is_zero() {
                return Err(Error::Validation(format!(
                    "generator rows are linearly dependent (row {i})"
                )));
            }
            pivots.push(reduced);
        }
        Ok(CodeSpec {
            n,
            m,
            generator,
            kind,
            decoder,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn kind(&self) -> CodeKind {
        self.kind
    }

    pub fn generator(&self) -> &[Mask] {
        &self.generator
    }

    /// Codeword M^T t: the xor of the generator rows selected by t.
    pub fn encode_word(&self, t: u64) -> Mask {
        let mut word = Mask::zero();
        for (i, row) in self.generator.iter().enumerate() {
            if t >> i & 1 == 1 {
                word = word.xor(row);
            }
        }
        word
    }

    pub fn decode(&self, word: &Mask) -> u64 {
        (self.decoder)(word)
    }
}

/// Repetition code: copy j of bit i sits at position i + j*n, the
/// generator is r identity blocks side by side, and decoding takes the
/// per-bit majority. r must be odd so the majority is always defined.
pub fn repetition_code(n: usize, r: usize) -> Result<CodeSpec> {
    if r % 2 == 0 || r == 0 {
        return Err(Error::InvalidParam(format!(
            "repetition factor {r} must be odd"
        )));
    }
    let generator: Vec<Mask> = (0..n)
        .map(|i| Mask::from_bits((0..r).map(|j| i + j * n)))
        .collect();
    let decoder: Decoder = Box::new(move |word: &Mask| {
        let mut t = 0u64;
        for i in 0..n {
            let votes = (0..r).filter(|&j| word.bit(i + j * n)).count();
            if votes > r / 2 {
                t |= 1 << i;
            }
        }
        t
    });
    CodeSpec::build(n, r * n, generator, CodeKind::Repetition { r }, decoder)
}

/// c * (-2)^k mod modulus.
fn mul_pow_neg2(c: u32, k: u32, modulus: u32) -> u32 {
    let shifted = ((c as u64) << k) % modulus as u64;
    let shifted = shifted as u32;
    if k % 2 == 1 && shifted != 0 {
        modulus - shifted
    } else {
        shifted
    }
}

fn subsets_of_size(bits: &[usize], size: usize, start: usize, acc: &mut Vec<usize>, out: &mut dyn FnMut(&[usize])) {
    if acc.len() == size {
        out(acc);
        return;
    }
    let needed = size - acc.len();
    for i in start..=bits.len().saturating_sub(needed) {
        acc.push(bits[i]);
        subsets_of_size(bits, size, i + 1, acc, out);
        acc.pop();
    }
}

fn expand_row(
    blocks: &[Vec<usize>],
    i: usize,
    acc_bits: &mut Vec<usize>,
    coeff: u32,
    modulus: u32,
    out: &mut Vec<Row>,
) {
    if coeff == 0 {
        return;
    }
    if i == blocks.len() {
        out.push(Row {
            mask: Mask::from_bits(acc_bits.iter().copied()),
            num: coeff,
        });
        return;
    }
    let bits = &blocks[i];
    for size in 1..=bits.len() {
        let c = mul_pow_neg2(coeff, (size - 1) as u32, modulus);
        if c == 0 {
            // larger subsets only gain more factors of 2
            break;
        }
        let mut chosen = Vec::with_capacity(size);
        subsets_of_size(bits, size, 0, &mut chosen, &mut |subset| {
            let before = acc_bits.len();
            acc_bits.extend_from_slice(subset);
            expand_row(blocks, i + 1, acc_bits, c, modulus, out);
            acc_bits.truncate(before);
        });
    }
}

/// The encoded program: satisfies f_M(x) = f(Mx) for every m-bit x, so
/// its output distribution is the pushforward of the original under
/// t -> M^T t. Each row's subset indicator over parities is expanded into
/// subset rows; see the module notes for the coefficient rule.
pub fn encode_xprogram(prog: &XProgram, code: &CodeSpec) -> Result<XProgram> {
    if prog.n() != code.n() {
        return Err(Error::Dimension(format!(
            "program on {} qubits, code encodes {}",
            prog.n(),
            code.n()
        )));
    }
    let modulus = 2 * prog.den();
    let mut rows = Vec::new();
    for row in prog.rows() {
        let blocks: Vec<Vec<usize>> = row
            .mask
            .bits()
            .map(|i| code.generator()[i].bits().collect())
            .collect();
        let mut acc = Vec::new();
        expand_row(&blocks, 0, &mut acc, row.num % modulus, modulus, &mut rows);
    }
    XProgram::new(code.m(), prog.den(), rows)
}

/// The closed-form bound (eps(2-eps))^(r/2) on the probability that
/// majority decoding of r copies fails at flip rate eps/2 per copy.
pub fn per_bit_failure_bound(epsilon: f64, r: usize) -> Result<f64> {
    NoiseParams::new(epsilon)?;
    if r % 2 == 0 || r == 0 {
        return Err(Error::InvalidParam(format!(
            "repetition factor {r} must be odd"
        )));
    }
    Ok((epsilon * (2.0 - epsilon)).powf(r as f64 / 2.0))
}

/// The exact majority failure probability: more than r/2 of r copies
/// flipped, each with probability eps/2.
pub fn per_bit_failure_exact(epsilon: f64, r: usize) -> Result<f64> {
    NoiseParams::new(epsilon)?;
    if r % 2 == 0 || r == 0 {
        return Err(Error::InvalidParam(format!(
            "repetition factor {r} must be odd"
        )));
    }
    let q = epsilon / 2.0;
    let mut total = 0.0;
    for i in r / 2 + 1..=r {
        let mut binom = 1.0;
        for j in 1..=i.min(r - i) {
            binom = binom * (r - i.min(r - i) + j) as f64 / j as f64;
        }
        total += binom * q.powi(i as i32) * (1.0 - q).powi((r - i) as i32);
    }
    Ok(total)
}

/// One protected run: per-shot decoded words in sampling order, their
/// empirical distribution, and failure counts.
pub struct ProtectedRun {
    pub shots: u64,
    pub samples: Vec<u64>,
    pub decoded: Distribution,
    pub word_failures: u64,
    pub bit_failures: u64,
}

impl ProtectedRun {
    pub fn word_failure_rate(&self) -> f64 {
        self.word_failures as f64 / self.shots as f64
    }

    pub fn bit_failure_rate(&self) -> f64 {
        self.bit_failures as f64 / (self.shots as f64 * self.decoded.n() as f64)
    }
}

/// Sample shots from the circuit's distribution, push each through
/// encode -> bit flips -> decode, and tally what comes back. Sampling
/// uses the codeword support of the encoded distribution directly, so m
/// never needs dense simulation.
pub fn protected_pipeline(
    prog: &XProgram,
    code: &CodeSpec,
    noise: &NoiseParams,
    shots: u64,
    rng: &Rng,
) -> Result<ProtectedRun> {
    if prog.n() != code.n() {
        return Err(Error::Dimension(format!(
            "program on {} qubits, code encodes {}",
            prog.n(),
            code.n()
        )));
    }
    if shots == 0 {
        return Err(Error::InvalidParam("no shots requested".into()));
    }
    let dist = output_distribution(prog)?;
    let cdf = dist.cumulative();
    let m = code.m();
    let half = noise.epsilon / 2.0;
    // per-shot split streams keep the run identical for any thread count
    let results: Vec<(u64, u32)> = (0..shots)
        .into_par_iter()
        .map(|i| {
            let mut r = rng.split(i);
            let s = sample_from_cdf(&cdf, &mut r) as u64;
            let word = code.encode_word(s);
            let flips: Vec<usize> = (0..m).filter(|_| r.bernoulli(half)).collect();
            let decoded = code.decode(&word.xor(&Mask::from_bits(flips)));
            (decoded, (decoded ^ s).count_ones())
        })
        .collect();
    let mut counts = vec![0u64; 1 << prog.n()];
    let mut word_failures = 0;
    let mut bit_failures = 0;
    for &(decoded, wrong_bits) in &results {
        counts[decoded as usize] += 1;
        if wrong_bits > 0 {
            word_failures += 1;
        }
        bit_failures += wrong_bits as u64;
    }
    Ok(ProtectedRun {
        shots,
        samples: results.into_iter().map(|(decoded, _)| decoded).collect(),
        decoded: Distribution::from_counts(prog.n(), &counts)?,
        word_failures,
        bit_failures,
    })
}
