//! Exact simulation of X-programs and moment Monte Carlo.
//!
//! The output distribution of H^n.diag(f).H^n on |0^n> is the squared
//! Fourier spectrum of f: p(s) = |2^-n sum_x f(x) (-1)^{s.x}|^2. Dense
//! simulation therefore costs one exponent table plus one transform,
//! O(n 2^n) after the table. Zero-amplitudes and partition functions are
//! computed by streaming over x in Gray-code order while counting how many
//! x land in each exponent class, so the only floating-point work is a
//! final dot product with the root-of-unity table.

use crate::error::{Error, Result};
use crate::mask::bitstring;
use crate::program::{random_sparse_circuit, root_of_unity, SparseParams, XProgram};
use crate::rng::Rng;
use crate::wht::wht_complex;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Dense vectors of 2^n complex amplitudes stay under 8 GB up to here.
pub const DENSE_GUARD: usize = 26;
/// Streaming enumerations of 2^n terms; slow near the top but bounded.
pub const STREAM_GUARD: usize = 40;
/// Monte Carlo over random circuits evaluates 2^n per trial.
pub const MOMENT_GUARD: usize = 20;
/// The grouped fourth-moment sum uses f64 factorials, exact to n! <= 60!.
pub const CLOSED_FORM_GUARD: usize = 60;

pub(crate) fn guard_dense(n: usize) -> Result<()> {
    guard(n, DENSE_GUARD, "dense simulation")
}

fn guard(n: usize, limit: usize, what: &'static str) -> Result<()> {
    if n > limit {
        Err(Error::SizeGuard {
            what,
            requested: n,
            limit,
        })
    } else {
        Ok(())
    }
}

/// A probability distribution over n-bit outcomes, stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    n: usize,
    probs: Vec<f64>,
}

impl Distribution {
    /// Entries must be nonnegative (tiny negative rounding residue up to
    /// -1e-12 is clipped to zero) and sum to 1 within 1e-9.
    pub fn new(n: usize, mut probs: Vec<f64>) -> Result<Self> {
        if probs.len() != 1usize << n {
            return Err(Error::Dimension(format!(
                "distribution over {n} bits needs {} entries, got {}",
                1usize << n,
                probs.len()
            )));
        }
        for (i, p) in probs.iter_mut().enumerate() {
            if *p < 0.0 {
                if *p < -1e-12 {
                    return Err(Error::NegativeMass { index: i, value: *p });
                }
                *p = 0.0;
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Validation(format!(
                "distribution mass {total} is not 1 within 1e-9"
            )));
        }
        Ok(Distribution { n, probs })
    }

    /// Renormalize nonnegative weights to total mass 1. This is the only
    /// constructor that rescales.
    pub fn new_normalized(n: usize, weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidParam("nonpositive total weight".into()));
        }
        Distribution::new(n, weights.iter().map(|w| w / total).collect())
    }

    pub fn from_counts(n: usize, counts: &[u64]) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::InvalidParam("no counts".into()));
        }
        Distribution::new(
            n,
            counts.iter().map(|&c| c as f64 / total as f64).collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, x: u64) -> f64 {
        self.probs[x as usize]
    }

    /// Inclusive prefix sums, for inverse-CDF sampling.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect()
    }

    /// CSV with header `bitstring,prob`, one row per outcome in
    /// lexicographic bitstring order, probabilities at 17 significant
    /// digits (lossless for f64).
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.probs.len() * (self.n + 26));
        out.push_str("bitstring,prob\n");
        for (x, p) in self.probs.iter().enumerate() {
            out.push_str(&bitstring(x as u64, self.n));
            out.push(',');
            out.push_str(&format!("{p:.16e}\n"));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some("bitstring,prob") => {}
            other => {
                return Err(Error::Parse(format!(
                    "expected header 'bitstring,prob', got {other:?}"
                )))
            }
        }
        let mut n = None;
        let mut probs = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let (bits, prob) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("row {i}: missing comma")))?;
            let (x, width) = crate::mask::parse_bitstring(bits)?;
            let n = *n.get_or_insert(width);
            if width != n {
                return Err(Error::Parse(format!("row {i}: inconsistent bit width")));
            }
            if x != i as u64 {
                return Err(Error::Parse(format!(
                    "row {i}: outcomes out of lexicographic order"
                )));
            }
            probs.push(
                prob.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("row {i}: bad probability: {e}")))?,
            );
        }
        let n = n.ok_or_else(|| Error::Parse("empty distribution".into()))?;
        Distribution::new(n, probs)
    }
}

/// Draw an outcome index from inclusive prefix sums by binary search.
pub fn sample_from_cdf(cdf: &[f64], rng: &mut Rng) -> usize {
    let u = rng.next_f64() * cdf.last().copied().unwrap_or(1.0);
    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
}

/// Exact output distribution of the circuit H^n.diag(f).H^n.
pub fn output_distribution(prog: &XProgram) -> Result<Distribution> {
    let table = prog.exponent_table()?;
    let roots = prog.root_table();
    let mut amps: Vec<Complex64> = table.iter().map(|&e| roots[e as usize]).collect();
    wht_complex(&mut amps);
    let scale = 1.0 / (amps.len() as f64 * amps.len() as f64);
    Distribution::new(prog.n(), amps.iter().map(|a| a.norm_sqr() * scale).collect())
}

/// Classes of x by phase exponent, counted exactly over all 2^n inputs by
/// a Gray-code walk; the incremental update per step touches only the rows
/// containing the flipped bit.
fn exponent_class_counts(prog: &XProgram) -> Result<Vec<u64>> {
    guard(prog.n(), STREAM_GUARD, "streaming enumeration")?;
    let n = prog.n();
    let modulus = 2 * prog.den() as i64;
    // per flipped bit: (mask without that bit, numerator)
    let mut by_bit: Vec<Vec<(u64, i64)>> = vec![Vec::new(); n];
    for row in prog.rows() {
        let m = row.mask.as_u64().expect("n <= 64");
        if row.num == 0 {
            continue;
        }
        let mut bits = m;
        while bits != 0 {
            let b = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            by_bit[b].push((m & !(1u64 << b), row.num as i64));
        }
    }
    let mut counts = vec![0u64; modulus as usize];
    let mut x: u64 = 0;
    let mut e: i64 = 0;
    counts[0] += 1;
    for i in 1u64..(1u64 << n) {
        let b = i.trailing_zeros() as usize;
        x ^= 1u64 << b;
        let now_set = x >> b & 1 == 1;
        for &(rest, num) in &by_bit[b] {
            if rest & x == rest {
                e += if now_set { num } else { -num };
            }
        }
        e = e.rem_euclid(modulus);
        counts[e as usize] += 1;
    }
    Ok(counts)
}

/// <0^n| C |0^n> = 2^-n sum_x f(x), summed exactly per exponent class.
pub fn amplitude_zero(prog: &XProgram) -> Result<Complex64> {
    let counts = exponent_class_counts(prog)?;
    let den = prog.den();
    let mut z = Complex64::new(0.0, 0.0);
    for (e, &c) in counts.iter().enumerate() {
        if c != 0 {
            z += root_of_unity(e as u32, den) * c as f64;
        }
    }
    Ok(z / (1u64 << prog.n()) as f64)
}

/// Partition function of the Ising model the program encodes:
/// Z = sum_x w0^(sum_{i<j} w_ij x_i x_j + sum_k v_k x_k) at w0 = e^{i pi/den},
/// with integer couplings w and fields v read off the program rows.
/// Requires every row to touch at most two qubits. Satisfies
/// Z = 2^n * amplitude_zero by an independent evaluation route.
pub fn ising_partition(prog: &XProgram) -> Result<Complex64> {
    guard(prog.n(), STREAM_GUARD, "streaming enumeration")?;
    let n = prog.n();
    let modulus = 2 * prog.den() as i64;
    let mut field = vec![0i64; n];
    let mut coupling = vec![Vec::<(usize, i64)>::new(); n];
    for (i, row) in prog.rows().iter().enumerate() {
        let bits: Vec<usize> = row.mask.bits().collect();
        match bits.as_slice() {
            [q] => field[*q] += row.num as i64,
            [a, b] => {
                coupling[*a].push((*b, row.num as i64));
                coupling[*b].push((*a, row.num as i64));
            }
            _ => {
                return Err(Error::InvalidParam(format!(
                    "row {i} touches {} qubits; the Ising form needs at most 2",
                    bits.len()
                )))
            }
        }
    }
    let mut counts = vec![0u64; modulus as usize];
    let mut x: u64 = 0;
    let mut e: i64 = 0;
    counts[0] += 1;
    for i in 1u64..(1u64 << n) {
        let b = i.trailing_zeros() as usize;
        x ^= 1u64 << b;
        let mut delta = field[b];
        for &(j, w) in &coupling[b] {
            if x >> j & 1 == 1 {
                delta += w;
            }
        }
        e = (e + if x >> b & 1 == 1 { delta } else { -delta }).rem_euclid(modulus);
        counts[e as usize] += 1;
    }
    let den = prog.den();
    let mut z = Complex64::new(0.0, 0.0);
    for (e, &c) in counts.iter().enumerate() {
        if c != 0 {
            z += root_of_unity(e as u32, den) * c as f64;
        }
    }
    Ok(z)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MomentReport {
    pub order: u32,
    pub trials: u64,
    pub mean: f64,
    pub std_error: f64,
}

fn moment_guards(params: &SparseParams, trials: u64) -> Result<()> {
    guard(params.n, MOMENT_GUARD, "moment Monte Carlo")?;
    if trials < 100 {
        return Err(Error::InvalidParam(format!(
            "trials {trials} below the statistical floor of 100"
        )));
    }
    Ok(())
}

fn squared_amplitudes(params: &SparseParams, trials: u64, rng: &Rng) -> Vec<f64> {
    // one split stream per trial, results merged by index: identical for
    // every thread count
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut r = rng.split(t);
            let prog = random_sparse_circuit(params, &mut r);
            amplitude_zero(&prog).expect("guarded").norm_sqr()
        })
        .collect()
}

/// Monte Carlo estimate of E |<0|C|0>|^order over the sparse family,
/// order 2 or 4.
pub fn moment_mc(
    params: &SparseParams,
    order: u32,
    trials: u64,
    rng: &Rng,
) -> Result<MomentReport> {
    if order != 2 && order != 4 {
        return Err(Error::InvalidParam(format!("order {order} not in {{2, 4}}")));
    }
    moment_guards(params, trials)?;
    let values = squared_amplitudes(params, trials, rng);
    let values: Vec<f64> = match order {
        2 => values,
        _ => values.iter().map(|v| v * v).collect(),
    };
    let mean = values.iter().sum::<f64>() / trials as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
        / (trials as f64 - 1.0);
    Ok(MomentReport {
        order,
        trials,
        mean,
        std_error: (var / trials as f64).sqrt(),
    })
}

/// Fraction of sampled circuits with |<0|C|0>|^2 >= alpha * 2^-n.
pub fn paley_zygmund_fraction(
    params: &SparseParams,
    alpha: f64,
    trials: u64,
    rng: &Rng,
) -> Result<f64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParam(format!("alpha {alpha} must be positive")));
    }
    moment_guards(params, trials)?;
    let threshold = alpha / (1u64 << params.n) as f64;
    let hits = squared_amplitudes(params, trials, rng)
        .iter()
        .filter(|&&v| v >= threshold)
        .count();
    Ok(hits as f64 / trials as f64)
}

/// The grouped closed form
///   2^-3n * sum_{a+b+c+d=n} n!/(a!b!c!d!) (1-p)^(C(b,2)+bc+bd+cd),
/// an upper bound for the fourth moment of sparse circuits at edge
/// probability p. (It is not the moment itself: already at n = 1 direct
/// enumeration gives 3/8 while this sum gives 1/2.)
pub fn fourth_moment_closed_form(n: usize, p_edge: f64) -> Result<f64> {
    if n == 0 || n > CLOSED_FORM_GUARD {
        return Err(Error::InvalidParam(format!(
            "n {n} outside 1..={CLOSED_FORM_GUARD}"
        )));
    }
    if !(0.0..=1.0).contains(&p_edge) {
        return Err(Error::InvalidParam(format!("p_edge {p_edge} outside [0, 1]")));
    }
    let mut factorial = vec![1.0f64; n + 1];
    for i in 1..=n {
        factorial[i] = factorial[i - 1] * i as f64;
    }
    let q = 1.0 - p_edge;
    let mut total = 0.0;
    for b in 0..=n {
        for c in 0..=n - b {
            for d in 0..=n - b - c {
                let a = n - b - c - d;
                let multinomial =
                    factorial[n] / (factorial[a] * factorial[b] * factorial[c] * factorial[d]);
                let expo = b * (b.saturating_sub(1)) / 2 + b * c + b * d + c * d;
                total += multinomial * q.powi(expo as i32);
            }
        }
    }
    Ok(total / 8f64.powi(n as i32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mask::Mask;
    use crate::program::Row;

    fn prog(n: usize, rows: &[(&[usize], u32)]) -> XProgram {
        XProgram::new(
            n,
            8,
            rows.iter()
                .map(|(bits, num)| Row {
                    mask: Mask::from_bits(bits.iter().copied()),
                    num: *num,
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn identity_program_is_point_mass() {
        let d = output_distribution(&XProgram::empty(4, 8).unwrap()).unwrap();
        assert_eq!(d.prob(0), 1.0);
        assert!(d.probs()[1..].iter().all(|&p| p == 0.0));
    }

    #[test]
    fn single_i_gate_gives_even_split() {
        // diag(1, i): p = (1/2, 1/2) exactly
        let d = output_distribution(&prog(1, &[(&[0], 4)])).unwrap();
        assert_eq!(d.probs(), &[0.5, 0.5]);
    }

    #[test]
    fn cz_row_matches_brute_transform() {
        let p = prog(2, &[(&[0, 1], 8)]);
        let d = output_distribution(&p).unwrap();
        // independent 4-term transform from the raw f values
        let f = [1.0, 1.0, 1.0, -1.0];
        for s in 0..4usize {
            let mut amp = 0.0;
            for (x, fx) in f.iter().enumerate() {
                let sign = if (s & x).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                amp += sign * fx;
            }
            let expect = (amp / 4.0) * (amp / 4.0);
            assert!((d.prob(s as u64) - expect).abs() < 1e-15);
            assert!((d.prob(s as u64) - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn random_circuits_normalize() {
        for seed in 0..5 {
            let p = random_sparse_circuit(
                &SparseParams::new(10, 3.0).unwrap(),
                &mut Rng::new(seed),
            );
            let d = output_distribution(&p).unwrap();
            let total: f64 = d.probs().iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
            assert!(d.probs().iter().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn relabeling_outcomes_preserves_moment_statistics() {
        // appending X gates permutes outcomes by xor; the multiset of
        // probabilities is unchanged
        let p = random_sparse_circuit(&SparseParams::new(8, 2.0).unwrap(), &mut Rng::new(7));
        let d = output_distribution(&p).unwrap();
        let c = 0b1011_0010u64;
        let mut relabeled: Vec<f64> = (0..256).map(|x| d.prob(x as u64 ^ c)).collect();
        let mut original = d.probs().to_vec();
        relabeled.sort_by(f64::total_cmp);
        original.sort_by(f64::total_cmp);
        assert_eq!(relabeled, original);
        let sq: f64 = d.probs().iter().map(|p| p * p).sum();
        let sq_re: f64 = (0..256).map(|x| d.prob(x as u64 ^ c).powi(2)).sum();
        assert!((sq - sq_re).abs() < 1e-15);
    }

    #[test]
    fn amplitude_zero_examples() {
        assert_eq!(
            amplitude_zero(&XProgram::empty(3, 8).unwrap()).unwrap(),
            Complex64::new(1.0, 0.0)
        );
        // diag(1, i): (1 + i)/2 exactly
        assert_eq!(
            amplitude_zero(&prog(1, &[(&[0], 4)])).unwrap(),
            Complex64::new(0.5, 0.5)
        );
    }

    #[test]
    fn amplitude_matches_direct_sum_and_distribution() {
        let p = random_sparse_circuit(&SparseParams::new(10, 2.5).unwrap(), &mut Rng::new(21));
        let amp = amplitude_zero(&p).unwrap();
        let mut direct = Complex64::new(0.0, 0.0);
        for x in 0..1u64 << 10 {
            direct += p.eval_phase(x).0;
        }
        direct /= 1024.0;
        assert!((amp - direct).norm() < 1e-12);
        let d = output_distribution(&p).unwrap();
        assert!((d.prob(0) - amp.norm_sqr()).abs() < 1e-14);
    }

    #[test]
    fn ising_partition_examples() {
        assert_eq!(
            ising_partition(&XProgram::empty(2, 8).unwrap()).unwrap(),
            Complex64::new(4.0, 0.0)
        );
        // single field v with zeta^v = i: Z = 1 + i exactly
        assert_eq!(
            ising_partition(&prog(1, &[(&[0], 4)])).unwrap(),
            Complex64::new(1.0, 1.0)
        );
    }

    #[test]
    fn ising_equals_scaled_amplitude() {
        for seed in [3u64, 14, 15] {
            let p = random_sparse_circuit(
                &SparseParams::new(9, 3.0).unwrap(),
                &mut Rng::new(seed),
            );
            let z = ising_partition(&p).unwrap();
            let amp = amplitude_zero(&p).unwrap();
            assert!((z - amp * 512.0).norm() < 1e-11, "seed {seed}");
        }
    }

    #[test]
    fn ising_rejects_wide_rows() {
        let p = prog(3, &[(&[0, 1, 2], 2)]);
        assert!(ising_partition(&p).is_err());
    }

    #[test]
    fn second_moment_n1_closed_form() {
        // E_v |1 + zeta^v|^2 / 4 = 1/2
        let report = moment_mc(
            &SparseParams::new(1, 2.0).unwrap(),
            2,
            100_000,
            &Rng::new(5),
        )
        .unwrap();
        assert!(
            (report.mean - 0.5).abs() < 4.0 * report.std_error,
            "mean {} se {}",
            report.mean,
            report.std_error
        );
    }

    #[test]
    fn moment_rejects_bad_inputs() {
        let p = SparseParams::new(4, 1.0).unwrap();
        assert!(moment_mc(&p, 3, 1000, &Rng::new(0)).is_err());
        assert!(moment_mc(&p, 2, 99, &Rng::new(0)).is_err());
        assert!(moment_mc(&SparseParams::new(21, 1.0).unwrap(), 2, 1000, &Rng::new(0)).is_err());
    }

    #[test]
    fn moments_independent_of_thread_count() {
        let params = SparseParams::new(6, 2.0).unwrap();
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| moment_mc(&params, 2, 500, &Rng::new(8)).unwrap())
        };
        let a = run(1);
        let b = run(3);
        assert_eq!(a.mean, b.mean);
        assert_eq!(a.std_error, b.std_error);
    }

    #[test]
    fn closed_form_n1_is_half_for_any_p() {
        for p in [0.0, 0.3, 0.77, 1.0] {
            assert!((fourth_moment_closed_form(1, p).unwrap() - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn closed_form_matches_brute_grouped_sum() {
        for n in 1..=5 {
            for p in [0.0, 0.25, 0.6, 1.0] {
                let fast = fourth_moment_closed_form(n, p).unwrap();
                let brute = crate::brute::fourth_moment_grouped_sum(n, p);
                assert!(
                    (fast - brute).abs() < 1e-13,
                    "n={n} p={p}: {fast} vs {brute}"
                );
            }
        }
    }

    #[test]
    fn closed_form_bounds_small_momentum_run() {
        let params = SparseParams::new(6, 4.0).unwrap();
        let report = moment_mc(&params, 4, 2000, &Rng::new(77)).unwrap();
        let bound = fourth_moment_closed_form(6, params.p_edge()).unwrap();
        assert!(
            report.mean <= bound + 4.0 * report.std_error,
            "mean {} bound {bound} se {}",
            report.mean,
            report.std_error
        );
    }

    #[test]
    fn paley_zygmund_tiny_alpha_passes_every_nonzero_amplitude() {
        // circuits with an exactly vanishing amplitude do exist (6% or so
        // here), so the tiny-threshold fraction equals the fraction of
        // nonzero amplitudes rather than 1; recompute the same circuits
        // (same split streams) and count
        let params = SparseParams::new(6, 2.0).unwrap();
        let trials = 2000u64;
        let base = Rng::new(3);
        let f = paley_zygmund_fraction(&params, 1e-9, trials, &base).unwrap();
        let nonzero = (0..trials)
            .filter(|&t| {
                let prog = random_sparse_circuit(&params, &mut base.split(t));
                amplitude_zero(&prog).unwrap().norm_sqr() > 1e-20
            })
            .count();
        assert_eq!(f, nonzero as f64 / trials as f64);
        assert!(f > 0.8, "most amplitudes should be nonzero, got {f}");
    }

    #[test]
    fn paley_zygmund_n1_five_eighths() {
        // oracle: enumerate the 8 single-qubit phases
        let hits = (0..8)
            .filter(|&v| {
                let z = root_of_unity(2 * v, 8) + Complex64::new(1.0, 0.0);
                z.norm_sqr() / 4.0 >= 0.5
            })
            .count();
        assert_eq!(hits, 5);
        let trials = 100_000u64;
        let f = paley_zygmund_fraction(
            &SparseParams::new(1, 2.0).unwrap(),
            1.0,
            trials,
            &Rng::new(9),
        )
        .unwrap();
        let se = (5.0 / 8.0 * 3.0 / 8.0 / trials as f64).sqrt();
        assert!((f - 0.625).abs() < 4.0 * se, "fraction {f}");
    }

    #[test]
    fn csv_roundtrip_and_order() {
        let p = random_sparse_circuit(&SparseParams::new(4, 2.0).unwrap(), &mut Rng::new(2));
        let d = output_distribution(&p).unwrap();
        let text = d.to_csv();
        assert!(text.starts_with("bitstring,prob\n0000,"));
        let back = Distribution::from_csv(&text).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn csv_rejects_disorder_and_bad_rows() {
        assert!(Distribution::from_csv("prob,bitstring\n").is_err());
        let swapped = "bitstring,prob\n1,5e-1\n0,5e-1\n";
        assert!(Distribution::from_csv(swapped).is_err());
        let bad_width = "bitstring,prob\n0,5e-1\n01,5e-1\n";
        assert!(Distribution::from_csv(bad_width).is_err());
    }

    #[test]
    fn distribution_constructors_validate() {
        assert!(Distribution::new(1, vec![0.5, 0.5, 0.0]).is_err());
        assert!(Distribution::new(1, vec![0.7, 0.4]).is_err());
        assert!(Distribution::new(1, vec![1.1, -0.1]).is_err());
        let clipped = Distribution::new(1, vec![1.0, -1e-13]).unwrap();
        assert_eq!(clipped.prob(1), 0.0);
        let renorm = Distribution::new_normalized(1, vec![3.0, 1.0]).unwrap();
        assert_eq!(renorm.probs(), &[0.75, 0.25]);
    }

    #[test]
    fn cdf_sampling_matches_distribution() {
        let d = Distribution::new(2, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let cdf = d.cumulative();
        let mut rng = Rng::new(31);
        let mut counts = [0u64; 4];
        let shots = 200_000;
        for _ in 0..shots {
            counts[sample_from_cdf(&cdf, &mut rng)] += 1;
        }
        for (x, &c) in counts.iter().enumerate() {
            let p = d.prob(x as u64);
            let se = (p * (1.0 - p) / shots as f64).sqrt();
            assert!((c as f64 / shots as f64 - p).abs() < 4.0 * se);
        }
    }
}
