use std::collections::HashMap;

use super::{Event, FiniteKolmogorovSpace};
use crate::error::{Error, Result};

/// A real random variable: one value per sample point, in the space's order.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomVariable {
    name: String,
    values: Vec<f64>,
}

impl RandomVariable {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        let name = name.into();
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Validation(format!(
                "variable `{name}` has non-finite value {v}"
            )));
        }
        Ok(RandomVariable { name, values })
    }

    /// Builds a variable from an id → value map, which must be total over the space.
    pub fn from_map(
        name: impl Into<String>,
        space: &FiniteKolmogorovSpace,
        map: &HashMap<String, f64>,
    ) -> Result<Self> {
        let name = name.into();
        for id in map.keys() {
            if space.index_of(id).is_none() {
                return Err(Error::Validation(format!(
                    "variable `{name}` refers to unknown point `{id}`"
                )));
            }
        }
        let values = space
            .ids()
            .iter()
            .map(|id| {
                map.get(id).copied().ok_or_else(|| {
                    Error::Validation(format!("variable `{name}` has no value at point `{id}`"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(name, values)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value_at(&self, index: usize) -> f64 {
        self.values[index]
    }

    /// Distinct values in order of first occurrence along the point ordering.
    pub fn value_set(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for &v in &self.values {
            if !out.contains(&v) {
                out.push(v);
            }
        }
        out
    }

    /// Preimage of `value`.
    pub fn level_set(&self, value: f64) -> Event {
        Event::from_indices(
            self.values.len(),
            self.values
                .iter()
                .enumerate()
                .filter(|(_, &v)| v == value)
                .map(|(i, _)| i),
        )
    }

    /// `(values, level sets)` in value-set order.
    pub fn partition(&self) -> (Vec<f64>, Vec<Event>) {
        let values = self.value_set();
        let cells = values.iter().map(|&v| self.level_set(v)).collect();
        (values, cells)
    }

    /// Pointwise image under `f`.
    pub fn map(&self, name: impl Into<String>, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(name, self.values.iter().map(|&v| f(v)).collect())
    }

    /// E(v | c).
    pub fn conditional_mean(&self, space: &FiniteKolmogorovSpace, c: &Event) -> Result<f64> {
        let pc = space.probability(c);
        if pc <= 0.0 {
            return Err(Error::ZeroConditioningContext);
        }
        Ok(c.members()
            .map(|i| space.weights()[i] * self.values[i])
            .sum::<f64>()
            / pc)
    }
}
