//! In-place Walsh-Hadamard transform, unnormalized: the output at s is
//! sum over x of v[x] * (-1)^popcount(s & x). Applying it twice multiplies
//! by the length, so callers divide by 2^n where the convention needs it.

use num_complex::Complex64;

pub fn wht_complex(v: &mut [Complex64]) {
    debug_assert!(v.len().is_power_of_two());
    let mut h = 1;
    while h < v.len() {
        for block in v.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let x = *a;
                let y = *b;
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

pub fn wht_real(v: &mut [f64]) {
    debug_assert!(v.len().is_power_of_two());
    let mut h = 1;
    while h < v.len() {
        for block in v.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let x = *a;
                let y = *b;
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct(v: &[f64]) -> Vec<f64> {
        let n = v.len();
        (0..n)
            .map(|s| {
                (0..n)
                    .map(|x| {
                        let sign = if (s & x).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                        sign * v[x]
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn matches_direct_transform() {
        let v: Vec<f64> = (0..16).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut fast = v.clone();
        wht_real(&mut fast);
        let slow = direct(&v);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn involution_up_to_length() {
        let v: Vec<f64> = (0..32).map(|i| 1.0 / (i as f64 + 1.0)).collect();
        let mut w = v.clone();
        wht_real(&mut w);
        wht_real(&mut w);
        for (a, b) in w.iter().zip(&v) {
            assert!((a / 32.0 - b).abs() < 1e-12);
        }
    }

    #[test]
    fn complex_agrees_with_real_on_real_input() {
        let v: Vec<f64> = (0..8).map(|i| i as f64 - 3.0).collect();
        let mut c: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let mut r = v;
        wht_complex(&mut c);
        wht_real(&mut r);
        for (a, b) in c.iter().zip(&r) {
            assert!((a.re - b).abs() < 1e-12 && a.im == 0.0);
        }
    }
}
