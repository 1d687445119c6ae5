use rand::seq::index;
use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

use crate::rng::{substream, Stream};

/// Uniform mini-batches of distinct units, independent across iterations.
///
/// Units are shuffled once at construction; batch positions are then drawn
/// without replacement and mapped through that permutation.
#[derive(Debug, Clone)]
pub(crate) struct BatchSampler {
    order: Vec<usize>,
    rng: ChaCha8Rng,
    size: usize,
}

impl BatchSampler {
    pub(crate) fn new(units: usize, size: usize, seed: u64) -> Self {
        let mut order: Vec<usize> = (0..units).collect();
        order.shuffle(&mut substream(seed, Stream::Shuffle));
        BatchSampler {
            order,
            rng: substream(seed, Stream::Batch),
            size,
        }
    }

    /// Next batch in draw order.
    pub(crate) fn next_batch(&mut self) -> Vec<usize> {
        index::sample(&mut self.rng, self.order.len(), self.size)
            .into_iter()
            .map(|i| self.order[i])
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn batches_are_distinct_and_in_range() {
        let mut s = BatchSampler::new(20, 7, 3);
        for _ in 0..100 {
            let mut b = s.next_batch();
            assert_eq!(b.len(), 7);
            b.sort_unstable();
            b.dedup();
            assert_eq!(b.len(), 7);
            assert!(b.iter().all(|&i| i < 20));
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let a: Vec<_> = (0..10)
            .map({
                let mut s = BatchSampler::new(50, 5, 9);
                move |_| s.next_batch()
            })
            .collect();
        let b: Vec<_> = (0..10)
            .map({
                let mut s = BatchSampler::new(50, 5, 9);
                move |_| s.next_batch()
            })
            .collect();
        assert_eq!(a, b);
    }

    #[test]
    fn roughly_uniform() {
        let mut s = BatchSampler::new(10, 3, 1);
        let mut counts = [0usize; 10];
        for _ in 0..10_000 {
            for i in s.next_batch() {
                counts[i] += 1;
            }
        }
        // Expected 3000 each; binomial std is about 46.
        for c in counts {
            assert!((2750..=3250).contains(&c), "{counts:?}");
        }
    }
}
