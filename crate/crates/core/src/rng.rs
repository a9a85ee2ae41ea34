//! Counter-based random streams.
//!
//! Every stream is a ChaCha8 generator whose key is built from the master
//! seed and a [`Purpose`] tag, and whose stream id is the replication index.
//! Two streams never share keystream, so replications may run on any thread
//! in any order and still produce identical draws.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// What a stream is used for. Part of the key, so the same replication gets
/// independent streams for data, contamination and estimator draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Purpose {
    Data = 1,
    Contamination = 2,
    Estimator = 3,
    PriorSample = 4,
    Candidates = 5,
    Pilot = 6,
    Validation = 7,
    Covariates = 8,
}

/// A generator for `(master, replication, purpose)`.
pub fn stream(master: u64, replication: u64, purpose: Purpose) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&master.to_le_bytes());
    key[8..16].copy_from_slice(&(purpose as u64).to_le_bytes());
    key[16..24].copy_from_slice(b"tpost-v1");
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(replication);
    rng
}

/// A sub-stream for the `index`-th unit of work inside a stream, e.g. the
/// `index`-th instance of a validation sweep.
pub fn substream(master: u64, replication: u64, purpose: Purpose, index: u64) -> ChaCha8Rng {
    let mut rng = stream(master, replication, purpose);
    // 2^40 words per unit; far beyond what any unit consumes.
    rng.set_word_pos(u128::from(index) << 40);
    rng
}

/// Inverse-CDF categorical draw. Never returns an index of zero weight.
///
/// # Panics
///
/// If no weight is positive.
pub fn sample_categorical<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let last_positive = weights
        .iter()
        .rposition(|w| *w > 0.0)
        .expect("categorical draw needs a positive weight");
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        if *w <= 0.0 {
            continue;
        }
        acc += w;
        if u < acc {
            return i;
        }
    }
    last_positive
}

/// Standard normal vector of length `len`, scaled to unit norm.
///
/// A vector of zeros is redrawn; with `len == 1` the result is `±1`.
pub fn unit_vector<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<f64> {
    use rand_distr::StandardNormal;
    loop {
        let v: Vec<f64> = (0..len).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4)
            .map(|_| stream(7, 3, Purpose::Data).random())
            .collect();
        let mut s = stream(7, 3, Purpose::Data);
        let b: Vec<u64> = (0..4).map(|_| s.random()).collect();
        let mut t = stream(7, 3, Purpose::Data);
        let c: Vec<u64> = (0..4).map(|_| t.random()).collect();
        assert_eq!(b, c);
        assert_eq!(a[0], b[0]);
        let mut other = stream(7, 4, Purpose::Data);
        assert_ne!(other.random::<u64>(), b[0]);
        let mut other = stream(7, 3, Purpose::Estimator);
        assert_ne!(other.random::<u64>(), b[0]);
        let mut sub = substream(7, 3, Purpose::Data, 1);
        assert_ne!(sub.random::<u64>(), b[0]);
    }

    #[test]
    fn categorical_skips_zero_weights() {
        let mut rng = stream(1, 0, Purpose::Validation);
        for _ in 0..10_000 {
            let i = sample_categorical(&[0.0, 0.3, 0.0, 0.7, 0.0], &mut rng);
            assert!(i == 1 || i == 3);
        }
        for _ in 0..100 {
            assert_eq!(sample_categorical(&[1.0, 0.0, 0.0], &mut rng), 0);
        }
    }

    #[test]
    fn unit_vectors_have_unit_norm() {
        let mut rng = stream(2, 0, Purpose::Validation);
        for len in 1..6 {
            let v = unit_vector(len, &mut rng);
            let n: f64 = v.iter().map(|x| x * x).sum();
            assert!((n - 1.0).abs() < 1e-12);
        }
        let mut plus = 0;
        for _ in 0..10_000 {
            let v = unit_vector(1, &mut rng);
            assert!(v[0] == 1.0 || v[0] == -1.0);
            plus += usize::from(v[0] > 0.0);
        }
        // Binomial(1e4, 1/2): sd 50
        assert!((plus as i64 - 5_000).abs() < 200);
    }
}
