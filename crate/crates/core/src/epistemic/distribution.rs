use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};

use super::EpistemicError;
use crate::rational::{self, Rational};

/// A finite probability distribution with exact weights. Zero weights are
/// dropped, so the stored support is exactly the set of positive outcomes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distribution<K: Ord> {
    weights: BTreeMap<K, Rational>,
}

impl<K: Ord + Clone> Distribution<K> {
    pub fn new(weights: impl IntoIterator<Item = (K, Rational)>) -> Result<Self, EpistemicError> {
        let mut map: BTreeMap<K, Rational> = BTreeMap::new();
        for (k, w) in weights {
            if w.is_negative() {
                return Err(EpistemicError::NegativeWeight(w.to_string()));
            }
            *map.entry(k).or_insert_with(rational::zero) += w;
        }
        map.retain(|_, w| !w.is_zero());
        let sum: Rational = map.values().sum();
        if map.is_empty() {
            return Err(EpistemicError::EmptySupport);
        }
        if sum != rational::one() {
            return Err(EpistemicError::NotNormalized { sum: sum.to_string() });
        }
        Ok(Distribution { weights: map })
    }

    pub fn point(k: K) -> Self {
        Distribution { weights: BTreeMap::from([(k, rational::one())]) }
    }

    pub fn uniform(keys: impl IntoIterator<Item = K>) -> Result<Self, EpistemicError> {
        let keys: BTreeSet<K> = keys.into_iter().collect();
        let n = keys.len() as i64;
        if n == 0 {
            return Err(EpistemicError::EmptySupport);
        }
        Self::new(keys.into_iter().map(|k| (k, rational::ratio(1, n))))
    }

    /// Normalizes nonnegative weights with positive total.
    pub fn normalized(weights: impl IntoIterator<Item = (K, Rational)>) -> Result<Self, EpistemicError> {
        let weights: Vec<(K, Rational)> = weights.into_iter().collect();
        let total: Rational = weights.iter().map(|(_, w)| w.clone()).sum();
        if total.is_zero() {
            return Err(EpistemicError::NullEvent);
        }
        Self::new(weights.into_iter().map(|(k, w)| (k, w / &total)))
    }

    pub fn weight(&self, k: &K) -> Rational {
        self.weights.get(k).cloned().unwrap_or_else(rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &Rational)> {
        self.weights.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &K> {
        self.weights.keys()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn mass(&self, event: impl Fn(&K) -> bool) -> Rational {
        self.weights.iter().filter(|(k, _)| event(k)).map(|(_, w)| w.clone()).sum()
    }

    /// Pushforward along `f`.
    pub fn marginal<K2: Ord + Clone>(&self, f: impl Fn(&K) -> K2) -> Distribution<K2> {
        let mut out: BTreeMap<K2, Rational> = BTreeMap::new();
        for (k, w) in &self.weights {
            *out.entry(f(k)).or_insert_with(rational::zero) += w;
        }
        Distribution { weights: out }
    }

    pub fn sum(&self) -> Rational {
        self.weights.values().sum()
    }
}

/// Conditions `prior` on the outcomes satisfying `event`.
pub fn condition<K: Ord + Clone>(
    prior: &Distribution<K>,
    event: impl Fn(&K) -> bool,
) -> Result<Distribution<K>, EpistemicError> {
    let mass = prior.mass(&event);
    if mass.is_zero() {
        return Err(EpistemicError::NullEvent);
    }
    Ok(Distribution {
        weights: prior.iter().filter(|(k, _)| event(k)).map(|(k, w)| (k.clone(), w / &mass)).collect(),
    })
}

/// Bayesian conditionalization on an event given as a set of outcomes.
pub fn bayes_update<K: Ord + Clone>(prior: &Distribution<K>, event: &BTreeSet<K>) -> Result<Distribution<K>, EpistemicError> {
    condition(prior, |k| event.contains(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use proptest::prelude::*;

    #[test]
    fn rejects_bad_weights() {
        let err = Distribution::new([("a", ratio(1, 2)), ("b", ratio(49, 100))]).unwrap_err();
        assert_eq!(err, EpistemicError::NotNormalized { sum: "99/100".into() });
        assert!(Distribution::new([("a", ratio(3, 2)), ("b", ratio(-1, 2))]).is_err());
        assert_eq!(Distribution::<&str>::new([]).unwrap_err(), EpistemicError::EmptySupport);
    }

    #[test]
    fn zero_weights_dropped() {
        let d = Distribution::new([("a", rational::one()), ("b", rational::zero())]).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.weight(&"b"), rational::zero());
    }

    #[test]
    fn full_support_event_keeps_prior() {
        let d = Distribution::new([("a", ratio(1, 3)), ("b", ratio(2, 3))]).unwrap();
        let all: BTreeSet<_> = d.support().cloned().collect();
        assert_eq!(bayes_update(&d, &all).unwrap(), d);
    }

    #[test]
    fn null_event_errors() {
        let d = Distribution::point("a");
        let err = bayes_update(&d, &BTreeSet::from(["z"])).unwrap_err();
        assert_eq!(err.to_string(), "conditioning on null event");
    }

    fn prior_strategy() -> impl Strategy<Value = Distribution<u8>> {
        proptest::collection::vec(0u32..20, 1..8).prop_filter_map("positive total", |ws| {
            let total: u32 = ws.iter().sum();
            if total == 0 {
                return None;
            }
            Distribution::new(ws.iter().enumerate().map(|(i, w)| (i as u8, ratio(*w as i64, total as i64)))).ok()
        })
    }

    proptest! {
        #[test]
        fn total_probability(prior in prior_strategy(), labels in proptest::collection::vec(0u8..3, 8)) {
            // Partition outcomes by label.
            let block = |k: &u8| labels[*k as usize];
            let mut recombined: BTreeMap<u8, Rational> = BTreeMap::new();
            for b in 0..3u8 {
                let mass = prior.mass(|k| block(k) == b);
                if mass.is_zero() {
                    continue;
                }
                let post = condition(&prior, |k| block(k) == b).unwrap();
                prop_assert_eq!(post.sum(), rational::one());
                for (k, w) in post.iter() {
                    *recombined.entry(*k).or_insert_with(rational::zero) += &mass * w;
                }
            }
            for (k, w) in prior.iter() {
                prop_assert_eq!(&recombined[k], w);
            }
        }

        #[test]
        fn posterior_preserves_ratios(prior in prior_strategy(), mask in proptest::collection::vec(any::<bool>(), 8)) {
            let event = |k: &u8| mask[*k as usize];
            if let Ok(post) = condition(&prior, event) {
                for (k, w) in post.iter() {
                    prop_assert!(event(k) && !prior.weight(k).is_zero());
                    for (k2, w2) in post.iter() {
                        prop_assert_eq!(w * prior.weight(k2), w2 * prior.weight(k));
                    }
                }
            } else {
                prop_assert!(prior.mass(event).is_zero());
            }
        }
    }
}
