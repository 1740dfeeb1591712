//! Halton points with Cranley-Patterson rotations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PRIMES: [u32; 32] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
    101, 103, 107, 109, 113, 127, 131,
];

pub const MAX_DIMENSION: usize = PRIMES.len();

/// Radical inverse of `index` in base `PRIMES[dim]`.
pub fn halton(index: u64, dim: usize) -> f64 {
    let b = PRIMES[dim] as u64;
    let inv = 1.0 / b as f64;
    let mut f = inv;
    let mut i = index;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % b) as f64;
        i /= b;
        f *= inv;
    }
    r
}

/// Random shifts in `[0,1)^dim`, one row per replicate.
pub fn shifts(seed: u64, replicates: usize, dim: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..replicates)
        .map(|_| (0..dim).map(|_| rng.random::<f64>()).collect())
        .collect()
}

/// Point `index` of the sequence, rotated by `shift`.
pub fn point(index: u64, shift: &[f64], out: &mut [f64]) {
    for (d, o) in out.iter_mut().enumerate() {
        let v = halton(index + 1, d) + shift[d];
        *o = v - v.floor();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_two_sequence() {
        let got: Vec<f64> = (1..6).map(|i| halton(i, 0)).collect();
        assert_eq!(got, vec![0.5, 0.25, 0.75, 0.125, 0.625]);
    }

    #[test]
    fn shifted_points_stay_in_unit_cube() {
        let sh = shifts(7, 4, 5);
        let mut p = vec![0.0; 5];
        for row in &sh {
            for i in 0..200 {
                point(i, row, &mut p);
                assert!(p.iter().all(|&v| (0.0..1.0).contains(&v)));
            }
        }
    }

    #[test]
    fn integrates_smooth_function() {
        // ∫ x y z over the unit cube = 1/8
        let sh = shifts(1, 1, 3);
        let mut p = vec![0.0; 3];
        let n = 20_000;
        let mut acc = 0.0;
        for i in 0..n {
            point(i, &sh[0], &mut p);
            acc += p[0] * p[1] * p[2];
        }
        assert!((acc / n as f64 - 0.125).abs() < 1e-3);
    }
}
