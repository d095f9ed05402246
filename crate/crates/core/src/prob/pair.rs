use super::{Event, FiniteKolmogorovSpace, RandomVariable};
use crate::error::{Error, Result};
use crate::tol;

/// The fixed pair of reference variables `(a, b)` together with their value
/// sets and induced partitions `{A_y}` and `{B_x}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferencePair {
    a: RandomVariable,
    b: RandomVariable,
    a_values: Vec<f64>,
    b_values: Vec<f64>,
    a_partition: Vec<Event>,
    b_partition: Vec<Event>,
}

impl ReferencePair {
    pub fn new(space: &FiniteKolmogorovSpace, a: RandomVariable, b: RandomVariable) -> Result<Self> {
        for v in [&a, &b] {
            if v.values().len() != space.len() {
                return Err(Error::Validation(format!(
                    "variable `{}` has {} values for {} points",
                    v.name(),
                    v.values().len(),
                    space.len()
                )));
            }
        }
        let (a_values, a_partition) = a.partition();
        let (b_values, b_partition) = b.partition();
        Ok(ReferencePair {
            a,
            b,
            a_values,
            b_values,
            a_partition,
            b_partition,
        })
    }

    pub fn a(&self) -> &RandomVariable {
        &self.a
    }

    pub fn b(&self) -> &RandomVariable {
        &self.b
    }

    pub fn a_values(&self) -> &[f64] {
        &self.a_values
    }

    pub fn b_values(&self) -> &[f64] {
        &self.b_values
    }

    pub fn a_partition(&self) -> &[Event] {
        &self.a_partition
    }

    pub fn b_partition(&self) -> &[Event] {
        &self.b_partition
    }

    /// The pair with the roles of `a` and `b` exchanged.
    pub fn swapped(&self) -> ReferencePair {
        ReferencePair {
            a: self.b.clone(),
            b: self.a.clone(),
            a_values: self.b_values.clone(),
            b_values: self.a_values.clone(),
            a_partition: self.b_partition.clone(),
            b_partition: self.a_partition.clone(),
        }
    }

    /// The pair with the `a`-values consumed in the given order.
    pub fn with_a_order(&self, order: &[usize]) -> Result<ReferencePair> {
        let mut seen = vec![false; self.a_values.len()];
        if order.len() != seen.len() || order.iter().any(|&i| i >= seen.len() || std::mem::replace(&mut seen[i], true)) {
            return Err(Error::Precondition(format!(
                "{order:?} is not a permutation of the {} a-values",
                self.a_values.len()
            )));
        }
        let mut out = self.clone();
        out.a_values = order.iter().map(|&i| self.a_values[i]).collect();
        out.a_partition = order.iter().map(|&i| self.a_partition[i].clone()).collect();
        Ok(out)
    }

    pub(crate) fn require_dichotomous_a(&self) -> Result<()> {
        if self.a_values.len() != 2 {
            return Err(Error::NotDichotomous {
                variable: self.a.name().to_string(),
                arity: self.a_values.len(),
                expected: 2,
            });
        }
        Ok(())
    }

    pub(crate) fn require_dichotomous_b(&self) -> Result<()> {
        if self.b_values.len() != 2 {
            return Err(Error::NotDichotomous {
                variable: self.b.name().to_string(),
                arity: self.b_values.len(),
                expected: 2,
            });
        }
        Ok(())
    }

    /// P(A_y | C) for every y.
    pub fn a_distribution(&self, space: &FiniteKolmogorovSpace, c: &Event) -> Result<Vec<f64>> {
        self.a_partition.iter().map(|e| space.conditional(e, c)).collect()
    }

    /// P(B_x | C) for every x.
    pub fn b_distribution(&self, space: &FiniteKolmogorovSpace, c: &Event) -> Result<Vec<f64>> {
        self.b_partition.iter().map(|e| space.conditional(e, c)).collect()
    }

    /// Index of the `a`-cell equal to `c`, if any.
    pub fn a_cell_index(&self, c: &Event) -> Option<usize> {
        self.a_partition.iter().position(|e| e == c)
    }

    /// Fails with `DegenerateContext` unless P(A_y ∩ C) > 0 for every y.
    pub(crate) fn require_a_nondegenerate(&self, space: &FiniteKolmogorovSpace, c: &Event) -> Result<()> {
        if space.probability(c) <= 0.0 {
            return Err(Error::ZeroConditioningContext);
        }
        for (y, cell) in self.a_values.iter().zip(&self.a_partition) {
            if space.probability(&cell.intersection(c)) <= 0.0 {
                return Err(Error::DegenerateContext {
                    variable: self.a.name().to_string(),
                    value: *y,
                });
            }
        }
        Ok(())
    }

    pub(crate) fn distributions_match(
        &self,
        space: &FiniteKolmogorovSpace,
        c1: &Event,
        c2: &Event,
    ) -> Result<bool> {
        let close = |u: Vec<f64>, v: Vec<f64>| {
            u.iter().zip(&v).all(|(x, y)| tol::close(*x, *y, tol::PREDICATE))
        };
        Ok(close(self.a_distribution(space, c1)?, self.a_distribution(space, c2)?)
            && close(self.b_distribution(space, c1)?, self.b_distribution(space, c2)?))
    }
}
