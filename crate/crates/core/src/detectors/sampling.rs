//! Weighted resampling over a finite candidate set.

use alloc::vec::Vec;

use rand::Rng;

use crate::Error;

/// One candidate with its raw weight, its normalized weight and the running
/// sum of normalized weights up to and including it.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedCandidate<T> {
    pub item: T,
    pub weight: f64,
    pub normalized_weight: f64,
    pub cumulative: f64,
}

/// A normalized candidate set ready for sampling.
#[derive(Clone, Debug, PartialEq)]
pub struct CandidateSet<T> {
    candidates: Vec<WeightedCandidate<T>>,
    total: f64,
}

impl<T> CandidateSet<T> {
    /// Normalizes the weights. When every weight is zero the set falls back to
    /// a uniform distribution.
    pub fn new(items: impl IntoIterator<Item = (T, f64)>) -> Result<Self, Error> {
        let mut candidates: Vec<WeightedCandidate<T>> = items
            .into_iter()
            .map(|(item, weight)| WeightedCandidate {
                item,
                weight,
                normalized_weight: 0.0,
                cumulative: 0.0,
            })
            .collect();
        if candidates.is_empty() {
            return Err(Error::EmptyCandidateSet);
        }
        if candidates.iter().any(|c| !(c.weight >= 0.0 && c.weight.is_finite())) {
            return Err(Error::InvalidParameter(
                "candidate weights must be finite and nonnegative",
            ));
        }
        let total: f64 = candidates.iter().map(|c| c.weight).sum();
        let n = candidates.len() as f64;
        let mut acc = 0.0;
        for c in candidates.iter_mut() {
            c.normalized_weight = if total > 0.0 { c.weight / total } else { 1.0 / n };
            acc += c.normalized_weight;
            c.cumulative = acc;
        }
        if let Some(last) = candidates.last_mut() {
            last.cumulative = 1.0;
        }
        Ok(Self { candidates, total })
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.total
    }

    pub fn candidates(&self) -> &[WeightedCandidate<T>] {
        &self.candidates
    }

    pub fn get(&self, index: usize) -> &WeightedCandidate<T> {
        &self.candidates[index]
    }

    /// Draws an index; returns it with its normalized probability.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, f64) {
        let i = draw(&self.candidates, rng.random::<f64>());
        (i, self.candidates[i].normalized_weight)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (&T, f64) {
        let (i, p) = self.sample_index(rng);
        (&self.candidates[i].item, p)
    }

    /// Total normalized probability of the candidates matching `pred`.
    pub fn probability_where(&self, mut pred: impl FnMut(&T) -> bool) -> f64 {
        self.candidates
            .iter()
            .filter(|c| pred(&c.item))
            .map(|c| c.normalized_weight)
            .sum()
    }
}

/// First index whose cumulative weight reaches `k`, skipping zero-weight
/// entries that share the preceding cumulative value.
fn draw<T>(candidates: &[WeightedCandidate<T>], k: f64) -> usize {
    let mut i = candidates.partition_point(|c| c.cumulative < k);
    while i + 1 < candidates.len() && candidates[i].normalized_weight == 0.0 {
        i += 1;
    }
    i.min(candidates.len() - 1)
}

/// Draws one candidate from an already normalized slice.
pub fn sample_weighted<'a, T, R: Rng + ?Sized>(
    candidates: &'a [WeightedCandidate<T>],
    rng: &mut R,
) -> Result<(&'a T, f64), Error> {
    if candidates.is_empty() {
        return Err(Error::EmptyCandidateSet);
    }
    let i = draw(candidates, rng.random::<f64>());
    Ok((&candidates[i].item, candidates[i].normalized_weight))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn single_candidate_has_probability_one() {
        let set = CandidateSet::new([("a", 0.3)]).unwrap();
        let mut rng = crate::seeded_rng(1);
        assert_eq!(set.sample(&mut rng), (&"a", 1.0));
    }

    #[test]
    fn zero_weight_is_never_drawn() {
        let set = CandidateSet::new([(0, 0.0), (1, 5.0)]).unwrap();
        let mut rng = crate::seeded_rng(2);
        for _ in 0..1000 {
            assert_eq!(set.sample(&mut rng).0, &1);
        }
        assert_eq!(draw(set.candidates(), 0.0), 1);
    }

    #[test]
    fn all_zero_falls_back_to_uniform() {
        let set = CandidateSet::new([(0, 0.0), (1, 0.0), (2, 0.0), (3, 0.0)]).unwrap();
        assert!(set.candidates().iter().all(|c| c.normalized_weight == 0.25));
    }

    #[test]
    fn empty_and_invalid_sets() {
        assert_eq!(CandidateSet::<u8>::new([]).unwrap_err(), Error::EmptyCandidateSet);
        assert!(CandidateSet::new([(0, -1.0)]).is_err());
        assert!(CandidateSet::new([(0, f64::NAN)]).is_err());
        let empty: Vec<WeightedCandidate<u8>> = vec![];
        let mut rng = crate::seeded_rng(3);
        assert_eq!(sample_weighted(&empty, &mut rng).unwrap_err(), Error::EmptyCandidateSet);
    }

    #[test]
    fn returned_probability_is_the_normalized_weight() {
        let weights = [0.3, 0.0, 1.7, 0.25, 0.9];
        let set = CandidateSet::new(weights.iter().copied().enumerate()).unwrap();
        let total: f64 = weights.iter().sum();
        let mut rng = crate::seeded_rng(4);
        for _ in 0..200 {
            let (&i, p) = set.sample(&mut rng);
            assert_eq!(p, weights[i] / total);
        }
        let sum: f64 = set.candidates().iter().map(|c| c.normalized_weight).sum();
        assert!((sum - 1.0).abs() <= 1e-12);
        assert!(set.candidates().windows(2).all(|w| w[0].cumulative <= w[1].cumulative));
        assert_eq!(set.candidates().last().unwrap().cumulative, 1.0);
    }
}
