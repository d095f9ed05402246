use std::collections::HashMap;

use super::Event;
use crate::error::{Error, Result};
use crate::tol;

/// A finite Kolmogorov probability space whose sigma-field is the power set.
///
/// Every point carries a strictly positive weight and the weights sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteKolmogorovSpace {
    ids: Vec<String>,
    weights: Vec<f64>,
    index: HashMap<String, usize>,
}

impl FiniteKolmogorovSpace {
    /// Builds a space from `(id, weight)` pairs; weights must already sum to 1
    /// within the identity tolerance.
    pub fn new(points: impl IntoIterator<Item = (String, f64)>) -> Result<Self> {
        let space = Self::unchecked_sum(points)?;
        let total: f64 = space.weights.iter().sum();
        if !tol::close(total, 1.0, tol::IDENTITY) {
            return Err(Error::Validation(format!("weights sum to {total}, expected 1")));
        }
        Ok(space)
    }

    /// Accepts weights summing to 1 within `tol::LOAD_SUM` and rescales them.
    pub fn renormalized(points: impl IntoIterator<Item = (String, f64)>) -> Result<Self> {
        let mut space = Self::unchecked_sum(points)?;
        let total: f64 = space.weights.iter().sum();
        if !(1.0 - tol::LOAD_SUM..=1.0 + tol::LOAD_SUM).contains(&total) {
            return Err(Error::Validation(format!(
                "weights sum to {total}, outside [1 - {e}, 1 + {e}]",
                e = tol::LOAD_SUM
            )));
        }
        // Only rescale when the sum is off by more than accumulated rounding,
        // so that reloading a canonical document leaves the weights untouched.
        let slack = 2.0 * f64::EPSILON * space.weights.len() as f64;
        if (total - 1.0).abs() > slack {
            for w in &mut space.weights {
                *w /= total;
            }
        }
        Ok(space)
    }

    /// Uniform weights over the given ids.
    pub fn uniform(ids: impl IntoIterator<Item = String>) -> Result<Self> {
        let ids: Vec<String> = ids.into_iter().collect();
        let w = 1.0 / ids.len() as f64;
        Self::renormalized(ids.into_iter().map(|id| (id, w)))
    }

    fn unchecked_sum(points: impl IntoIterator<Item = (String, f64)>) -> Result<Self> {
        let mut ids = Vec::new();
        let mut weights = Vec::new();
        let mut index = HashMap::new();
        for (id, w) in points {
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::Validation(format!(
                    "point `{id}` has non-positive weight {w}"
                )));
            }
            if index.insert(id.clone(), ids.len()).is_some() {
                return Err(Error::Validation(format!("duplicate point id `{id}`")));
            }
            ids.push(id);
            weights.push(w);
        }
        if ids.is_empty() {
            return Err(Error::Validation("space has no points".into()));
        }
        Ok(FiniteKolmogorovSpace { ids, weights, index })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn full(&self) -> Event {
        Event::full(self.len())
    }

    pub fn empty(&self) -> Event {
        Event::empty(self.len())
    }

    pub fn atom(&self, index: usize) -> Event {
        Event::singleton(self.len(), index)
    }

    /// Event from point ids; unknown ids are a validation error.
    pub fn event<S: AsRef<str>>(&self, ids: impl IntoIterator<Item = S>) -> Result<Event> {
        let idx = ids
            .into_iter()
            .map(|id| {
                let id = id.as_ref();
                self.index_of(id)
                    .ok_or_else(|| Error::Validation(format!("unknown point id `{id}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Event::from_indices(self.len(), idx))
    }

    /// Event from zero-based point indices.
    pub fn event_of(&self, indices: impl IntoIterator<Item = usize>) -> Event {
        Event::from_indices(self.len(), indices)
    }

    /// P(e), the sum of member weights.
    pub fn probability(&self, e: &Event) -> f64 {
        debug_assert_eq!(e.space_len(), self.len());
        e.members().map(|i| self.weights[i]).sum()
    }

    /// P(b | c) by Bayes' formula.
    pub fn conditional(&self, b: &Event, c: &Event) -> Result<f64> {
        let pc = self.probability(c);
        if pc <= 0.0 {
            return Err(Error::ZeroConditioningContext);
        }
        Ok(self.probability(&b.intersection(c)) / pc)
    }
}
