//! Slow, transparent reference implementations.
//!
//! Everything here recomputes a quantity the fast paths obtain some
//! cleverer way, using nothing but definitions: quadratic-time sums in
//! place of fast transforms, per-node marginal sums in place of the
//! descent recurrence, raw enumeration in place of grouped counting.
//! Tests pit the two routes against each other.

use crate::program::XProgram;
use crate::sampler::FourierTable;
use num_complex::Complex64;

/// |<s| H D H |0>|^2 for every s, straight from the definition: the
/// amplitude at s is the signed mean of the phase values. O(4^n).
pub fn output_distribution_naive(prog: &XProgram) -> Vec<f64> {
    let n = prog.n();
    assert!(n <= 12, "naive transform is quadratic in 2^n");
    let size = 1u64 << n;
    let scale = 1.0 / size as f64;
    let phases: Vec<Complex64> = (0..size).map(|x| prog.eval_phase(x).0).collect();
    (0..size)
        .map(|s| {
            let mut amp = Complex64::new(0.0, 0.0);
            for (x, &f) in phases.iter().enumerate() {
                amp += if (x as u64 & s).count_ones() % 2 == 0 { f } else { -f };
            }
            (amp * scale).norm_sqr()
        })
        .collect()
}

/// Fourier coefficient of the output distribution by the definition
/// p_hat(s) = 2^-n sum_t p(t) (-1)^(s.t), with p itself computed naively.
pub fn fourier_coefficient_direct(prog: &XProgram, s: u64) -> f64 {
    let probs = output_distribution_naive(prog);
    let scale = 1.0 / probs.len() as f64;
    probs
        .iter()
        .enumerate()
        .map(|(t, &p)| {
            if (t as u64 & s).count_ones() % 2 == 0 {
                p * scale
            } else {
                -p * scale
            }
        })
        .sum()
}

/// Total mass of the length-k prefix y: sums every entry whose high k
/// bits equal y.
pub fn prefix_mass(probs: &[f64], y: u64, k: usize) -> f64 {
    let n = probs.len().trailing_zeros() as usize;
    assert!(probs.len().is_power_of_two() && k <= n);
    probs
        .iter()
        .enumerate()
        .filter(|(x, _)| (*x as u64) >> (n - k) == y)
        .map(|(_, &p)| p)
        .sum()
}

/// The distribution the bit-by-bit sampler induces, with every node's
/// mass taken directly from the table marginal rather than the descent
/// recurrence. Branch rules mirror the sampler's exactly, tolerance
/// included; branches drawn with probability zero are never entered,
/// just as a sampling run never enters them.
pub fn alg_distribution_vec(table: &FourierTable) -> Vec<f64> {
    const NEG_TOL: f64 = -1e-12;
    let n = table.n();
    assert!(n <= 20, "walking all prefixes doubles per level");
    let mut out = vec![0.0; 1 << n];
    let mut stack = vec![(0u64, 0usize, 1.0f64)];
    while let Some((y, k, prob)) = stack.pop() {
        if k == n {
            out[y as usize] = prob;
            continue;
        }
        let s0 = table.marginal(y << 1, k + 1);
        let s1 = table.marginal(y << 1 | 1, k + 1);
        assert!(
            s0 >= NEG_TOL || s1 >= NEG_TOL,
            "both branch masses negative beyond tolerance: {s0} and {s1}"
        );
        let (q0, q1) = if s0 < 0.0 && s1 < 0.0 {
            (0.5, 0.5)
        } else if s0 < 0.0 {
            (0.0, 1.0)
        } else if s1 < 0.0 {
            (1.0, 0.0)
        } else if s0 + s1 <= 0.0 {
            (0.5, 0.5)
        } else {
            (s0 / (s0 + s1), s1 / (s0 + s1))
        };
        if q0 > 0.0 {
            stack.push((y << 1, k + 1, prob * q0));
        }
        if q1 > 0.0 {
            stack.push((y << 1 | 1, k + 1, prob * q1));
        }
    }
    out
}

/// The fourth-moment bound by raw enumeration: average q^(number of
/// interacting index pairs) over all 2^n x 2^n choices of (x, y), where
/// the pair (i, j) interacts unless x_i y_j + y_i x_j = 2 y_i y_j.
/// Groups of equal per-bit type counts reproduce the multinomial closed
/// form; this version never groups.
pub fn fourth_moment_grouped_sum(n: usize, p: f64) -> f64 {
    assert!((1..=8).contains(&n), "enumeration covers 4^n pairs");
    let q = 1.0 - p;
    let size = 1u64 << n;
    let mut total = 0.0;
    for x in 0..size {
        for y in 0..size {
            let mut pairs = 0;
            for i in 0..n {
                let (xi, yi) = (x >> i & 1, y >> i & 1);
                for j in i + 1..n {
                    let (xj, yj) = (x >> j & 1, y >> j & 1);
                    if xi * yj + yi * xj != 2 * yi * yj {
                        pairs += 1;
                    }
                }
            }
            total += q.powi(pairs);
        }
    }
    total / 8f64.powi(n as i32)
}

/// The hidden-shift distribution in dense form: uniform on the strings
/// with even overlap against t, zero elsewhere.
pub fn simon_dense(n: usize, t: u64) -> Vec<f64> {
    assert!(n >= 1 && n <= 20 && t > 0 && t < 1u64 << n);
    let size = 1u64 << n;
    (0..size)
        .map(|x| {
            if (x & t).count_ones() % 2 == 0 {
                2.0 / size as f64
            } else {
                0.0
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mask::Mask;
    use crate::program::{random_sparse_circuit, Row, SparseParams};
    use crate::rng::Rng;
    use crate::sampler::{simon_spectrum, FourierTable};
    use crate::simulate::output_distribution;

    #[test]
    fn naive_distribution_matches_fast_transform() {
        for seed in 0..10u64 {
            let params = SparseParams::new(6, 3.0).unwrap();
            let prog = random_sparse_circuit(&params, &mut Rng::new(seed));
            let fast = output_distribution(&prog).unwrap();
            let slow = output_distribution_naive(&prog);
            for (a, b) in fast.probs().iter().zip(&slow) {
                assert!((a - b).abs() < 1e-12, "seed {seed}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn direct_coefficient_matches_transform_route() {
        let params = SparseParams::new(5, 3.0).unwrap();
        let prog = random_sparse_circuit(&params, &mut Rng::new(4));
        let dist = output_distribution(&prog).unwrap();
        let coeffs = crate::noise::fourier_of(&dist);
        for s in 0..32u64 {
            let direct = fourier_coefficient_direct(&prog, s);
            assert!((direct - coeffs[s as usize]).abs() < 1e-12);
        }
    }

    #[test]
    fn prefix_mass_agrees_with_marginals() {
        let probs = vec![0.1, 0.2, 0.05, 0.15, 0.3, 0.0, 0.1, 0.1];
        assert!((prefix_mass(&probs, 0, 0) - 1.0).abs() < 1e-15);
        assert!((prefix_mass(&probs, 1, 1) - 0.5).abs() < 1e-15);
        assert!((prefix_mass(&probs, 0b10, 2) - 0.3).abs() < 1e-15);
        assert_eq!(prefix_mass(&probs, 0b101, 3), 0.0);
    }

    #[test]
    fn simon_dense_matches_its_spectrum() {
        let table = simon_spectrum(4, 0b1010).unwrap();
        let synth = table.synthesize().unwrap();
        let dense = simon_dense(4, 0b1010);
        for (a, b) in synth.iter().zip(&dense) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn grouped_sum_small_cases() {
        // n=1 has no index pairs, so the sum is 4/8 regardless of p
        for p in [0.0, 0.5, 1.0] {
            assert!((fourth_moment_grouped_sum(1, p) - 0.5).abs() < 1e-15);
        }
        // p=0 keeps every term at 1: 4^n / 8^n
        assert!((fourth_moment_grouped_sum(3, 0.0) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn direct_walk_handles_a_plain_table() {
        // exact uniform table: every leaf gets 2^-n
        let table = FourierTable::new(3, vec![(0, 0.125)]).unwrap();
        let dist = alg_distribution_vec(&table);
        for &q in &dist {
            assert!((q - 0.125).abs() < 1e-15);
        }
        let mass: f64 = {
            let point = vec![(0u64, 0.125), (0b100, 0.125)];
            alg_distribution_vec(&FourierTable::new(3, point).unwrap())
                .iter()
                .sum()
        };
        assert!((mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn prefix_mass_checks_the_output_distribution() {
        let prog = XProgram::new(
            3,
            8,
            vec![
                Row { mask: Mask::from_bits([0, 1]), num: 8 },
                Row { mask: Mask::single(2), num: 4 },
            ],
        )
        .unwrap();
        let dist = output_distribution(&prog).unwrap();
        for k in 0..=3usize {
            let mut total = 0.0;
            for y in 0..1u64 << k {
                total += prefix_mass(dist.probs(), y, k);
            }
            assert!((total - 1.0).abs() < 1e-12, "level {k}");
        }
    }
}
