//! Inputs shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectra::IntMatrix;

/// Seeded `rows × cols` matrix with entries in `-bound..=bound`.
pub fn random_matrix(rows: usize, cols: usize, bound: i64, seed: u64) -> IntMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entries: Vec<i64> = (0..rows * cols).map(|_| rng.gen_range(-bound..=bound)).collect();
    IntMatrix::from_i64(rows, cols, &entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_matrices_repeat() {
        assert_eq!(random_matrix(3, 4, 5, 1), random_matrix(3, 4, 5, 1));
        assert_eq!(random_matrix(3, 4, 5, 1).cols(), 4);
    }
}
