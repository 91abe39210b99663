//! Discrete request distributions with exact integer weights.
//!
//! Probabilities are stored as integer weights over a common total, so the
//! enumeration oracle can form exact rational expectations and sampling can
//! use integer inversion (deterministic across platforms, no floating point).

use rand::Rng;
use std::collections::BTreeMap;

use crate::covering::Request;
use crate::error::{Error, Result};

/// A finitely supported distribution over requests.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DiscreteDistribution {
    /// `(request, weight)` pairs, requests distinct and sorted, weights ≥ 1.
    entries: Vec<(Request, u64)>,
    /// Sum of all weights.
    total: u64,
}

impl DiscreteDistribution {
    /// The uniform distribution over distinct requests.
    pub fn uniform(requests: &[Request]) -> Result<DiscreteDistribution> {
        DiscreteDistribution::from_weights(requests.iter().map(|&r| (r, 1)).collect())
    }

    /// A point mass.
    pub fn point(request: Request) -> DiscreteDistribution {
        DiscreteDistribution {
            entries: vec![(request, 1)],
            total: 1,
        }
    }

    /// Build from integer weights. Zero weights are dropped; duplicate
    /// requests are combined; an empty or zero-total distribution is an error.
    pub fn from_weights(weights: Vec<(Request, u64)>) -> Result<DiscreteDistribution> {
        let mut combined: BTreeMap<Request, u64> = BTreeMap::new();
        for (r, w) in weights {
            if w > 0 {
                let slot = combined.entry(r).or_insert(0);
                *slot = slot.checked_add(w).ok_or_else(|| {
                    Error::InvalidInstance("distribution weight overflow".into())
                })?;
            }
        }
        let entries: Vec<(Request, u64)> = combined.into_iter().collect();
        let total = entries
            .iter()
            .try_fold(0u64, |acc, &(_, w)| acc.checked_add(w))
            .ok_or_else(|| Error::InvalidInstance("distribution weight overflow".into()))?;
        if total == 0 {
            return Err(Error::InvalidInstance(
                "distribution must have positive total weight".into(),
            ));
        }
        Ok(DiscreteDistribution { entries, total })
    }

    /// The exact average `(1/k)·Σ dists` of several distributions, with
    /// weights rescaled to a common total and reduced by their gcd.
    pub fn average(dists: &[&DiscreteDistribution]) -> Result<DiscreteDistribution> {
        if dists.is_empty() {
            return Err(Error::InvalidInstance(
                "cannot average zero distributions".into(),
            ));
        }
        // Common denominator: lcm of the totals. Work in u128 and reduce.
        let mut common: u128 = 1;
        for d in dists {
            common = lcm_u128(common, d.total as u128);
        }
        let mut weights: BTreeMap<Request, u128> = BTreeMap::new();
        for d in dists {
            let scale = common / d.total as u128;
            for &(r, w) in &d.entries {
                *weights.entry(r).or_insert(0) += w as u128 * scale;
            }
        }
        let mut g: u128 = 0;
        for &w in weights.values() {
            g = gcd_u128(g, w);
        }
        let reduced: Vec<(Request, u64)> = weights
            .into_iter()
            .map(|(r, w)| {
                let scaled = w / g;
                u64::try_from(scaled)
                    .map(|w64| (r, w64))
                    .map_err(|_| Error::InvalidInstance("averaged weights overflow u64".into()))
            })
            .collect::<Result<_>>()?;
        DiscreteDistribution::from_weights(reduced)
    }

    /// Support with integer weights, sorted by request.
    pub fn entries(&self) -> &[(Request, u64)] {
        &self.entries
    }

    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    pub fn total_weight(&self) -> u64 {
        self.total
    }

    /// Probability of one entry (by position in [`Self::entries`]).
    pub fn probability(&self, idx: usize) -> f64 {
        self.entries[idx].1 as f64 / self.total as f64
    }

    /// Sample by exact integer inversion.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Request {
        let mut ticket = rng.gen_range(0..self.total);
        for &(r, w) in &self.entries {
            if ticket < w {
                return r;
            }
            ticket -= w;
        }
        unreachable!("ticket below total weight must land in some entry")
    }
}

fn gcd_u128(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd_u128(b, a % b)
    }
}

fn lcm_u128(a: u128, b: u128) -> u128 {
    a / gcd_u128(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn probabilities_sum_to_one_exactly() {
        let d = DiscreteDistribution::from_weights(vec![
            (Request::Element(0), 1),
            (Request::Element(1), 3),
        ])
        .unwrap();
        let total: f64 = (0..d.support_size()).map(|i| d.probability(i)).sum();
        assert_eq!(total, 1.0);
        assert_eq!(d.total_weight(), 4);
    }

    #[test]
    fn duplicates_combine_and_zeros_drop() {
        let d = DiscreteDistribution::from_weights(vec![
            (Request::Element(0), 2),
            (Request::Element(0), 3),
            (Request::Element(1), 0),
        ])
        .unwrap();
        assert_eq!(d.entries(), &[(Request::Element(0), 5)]);
        assert!(DiscreteDistribution::from_weights(vec![]).is_err());
    }

    #[test]
    fn average_of_disjoint_uniforms_is_uniform() {
        let d1 =
            DiscreteDistribution::uniform(&[Request::Element(0), Request::Element(1)]).unwrap();
        let d2 =
            DiscreteDistribution::uniform(&[Request::Element(2), Request::Element(3)]).unwrap();
        let avg = DiscreteDistribution::average(&[&d1, &d2]).unwrap();
        assert_eq!(avg.support_size(), 4);
        assert!(avg.entries().iter().all(|&(_, w)| w == 1));
        assert_eq!(avg.total_weight(), 4);
    }

    #[test]
    fn average_handles_unequal_totals_exactly() {
        // (1/2)·[2/3, 1/3] + (1/2)·[1/2, 1/2] = [7/12, 5/12].
        let d1 = DiscreteDistribution::from_weights(vec![
            (Request::Element(0), 2),
            (Request::Element(1), 1),
        ])
        .unwrap();
        let d2 = DiscreteDistribution::from_weights(vec![
            (Request::Element(0), 1),
            (Request::Element(1), 1),
        ])
        .unwrap();
        let avg = DiscreteDistribution::average(&[&d1, &d2]).unwrap();
        assert_eq!(
            avg.entries(),
            &[(Request::Element(0), 7), (Request::Element(1), 5)]
        );
        assert_eq!(avg.total_weight(), 12);
    }

    #[test]
    fn sampling_is_deterministic_and_respects_support() {
        let d = DiscreteDistribution::from_weights(vec![
            (Request::Row(0), 1),
            (Request::Row(1), 9),
        ])
        .unwrap();
        let mut r1 = ChaCha8Rng::seed_from_u64(7);
        let mut r2 = ChaCha8Rng::seed_from_u64(7);
        let a: Vec<Request> = (0..50).map(|_| d.sample(&mut r1)).collect();
        let b: Vec<Request> = (0..50).map(|_| d.sample(&mut r2)).collect();
        assert_eq!(a, b);
        let ones = a.iter().filter(|r| r.index() == 1).count();
        assert!(ones > 30, "weight-9 entry should dominate, got {ones}/50");
    }
}
