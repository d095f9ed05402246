//! Finite contextual Kolmogorov probability: events, conditioning, reference
//! pairs, transition matrices and the classical predicates built on them.

mod event;
mod pair;
mod space;
mod variable;

pub use event::Event;
pub use pair::ReferencePair;
pub use space::FiniteKolmogorovSpace;
pub use variable::RandomVariable;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tol;

/// Which variable conditions which in a transition matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Orientation {
    /// Entries P(B_x | A_y): rows indexed by `a`-values.
    BGivenA,
    /// Entries P(A_y | B_x): rows indexed by `b`-values.
    AGivenB,
}

/// Row-stochastic matrix of transition probabilities between two partitions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitionMatrix {
    entries: Vec<Vec<f64>>,
    orientation: Orientation,
}

impl TransitionMatrix {
    /// Builds a matrix from rows; each row must sum to 1 within the identity tolerance.
    pub fn from_rows(entries: Vec<Vec<f64>>, orientation: Orientation) -> Result<Self> {
        let width = entries.first().map_or(0, Vec::len);
        for (i, row) in entries.iter().enumerate() {
            if row.len() != width || row.iter().any(|p| !(0.0..=1.0 + tol::IDENTITY).contains(p)) {
                return Err(Error::Validation(format!("row {i} is not a probability vector")));
            }
            let s: f64 = row.iter().sum();
            if !tol::close(s, 1.0, tol::IDENTITY) {
                return Err(Error::Validation(format!("row {i} sums to {s}")));
            }
        }
        Ok(TransitionMatrix {
            entries,
            orientation,
        })
    }

    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.entries.first().map_or(0, Vec::len)
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row][col]
    }

    pub fn entries(&self) -> &[Vec<f64>] {
        &self.entries
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn column_sums(&self) -> Vec<f64> {
        (0..self.cols())
            .map(|j| self.entries.iter().map(|r| r[j]).sum())
            .collect()
    }
}

/// P(e).
pub fn probability(space: &FiniteKolmogorovSpace, e: &Event) -> f64 {
    space.probability(e)
}

/// P(b | c) = P(b ∩ c) / P(c).
pub fn conditional_probability(space: &FiniteKolmogorovSpace, b: &Event, c: &Event) -> Result<f64> {
    space.conditional(b, c)
}

/// Matrix of transition probabilities P^{b/a} (or P^{a/b}).
pub fn transition_matrix(
    space: &FiniteKolmogorovSpace,
    pair: &ReferencePair,
    orientation: Orientation,
) -> Result<TransitionMatrix> {
    let (given, target, given_name) = match orientation {
        Orientation::BGivenA => (pair.a_partition(), pair.b_partition(), pair.a().name()),
        Orientation::AGivenB => (pair.b_partition(), pair.a_partition(), pair.b().name()),
    };
    let mut rows = Vec::with_capacity(given.len());
    for (i, cond) in given.iter().enumerate() {
        if space.probability(cond) <= 0.0 {
            return Err(Error::DegenerateCell(format!("{given_name}#{i}")));
        }
        rows.push(
            target
                .iter()
                .map(|t| space.conditional(t, cond))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    Ok(TransitionMatrix {
        entries: rows,
        orientation,
    })
}

/// True iff P(V_y ∩ C) > 0 for every value y of `v`.
pub fn is_nondegenerate(space: &FiniteKolmogorovSpace, context: &Event, v: &RandomVariable) -> Result<bool> {
    if space.probability(context) <= 0.0 {
        return Err(Error::ZeroConditioningContext);
    }
    let (_, cells) = v.partition();
    Ok(cells
        .iter()
        .all(|cell| space.probability(&cell.intersection(context)) > 0.0))
}

/// True iff every joint cell A_y ∩ B_x has positive probability.
pub fn are_incompatible(space: &FiniteKolmogorovSpace, pair: &ReferencePair) -> bool {
    pair.a_partition().iter().all(|a| {
        pair.b_partition()
            .iter()
            .all(|b| space.probability(&a.intersection(b)) > 0.0)
    })
}

/// Set-level facts about two partitions of the sample space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IncompatibilityStructure {
    /// Every A_j ∩ B_k is nonempty.
    pub cell_nonempty: bool,
    /// No A_j ⊂ B_k and no B_k ⊂ A_j.
    pub no_inclusions: bool,
    /// Nonempty cells imply no inclusions, with equivalence for two-cell partitions.
    pub implication_holds: bool,
}

pub fn check_incompatibility_structure(pair: &ReferencePair) -> IncompatibilityStructure {
    let (ap, bp) = (pair.a_partition(), pair.b_partition());
    let cell_nonempty = ap
        .iter()
        .all(|a| bp.iter().all(|b| !a.is_disjoint(b)));
    let no_inclusions = ap
        .iter()
        .all(|a| bp.iter().all(|b| !a.is_subset(b) && !b.is_subset(a)));
    let mut implication_holds = !cell_nonempty || no_inclusions;
    if ap.len() == 2 && bp.len() == 2 {
        implication_holds &= cell_nonempty == no_inclusions;
    }
    IncompatibilityStructure {
        cell_nonempty,
        no_inclusions,
        implication_holds,
    }
}

/// Σ_y P(a=y | C) P(b=x | A_y ∩ C) for every x.
pub fn classical_total_probability(
    space: &FiniteKolmogorovSpace,
    pair: &ReferencePair,
    context: &Event,
) -> Result<Vec<f64>> {
    pair.require_a_nondegenerate(space, context)?;
    let weights = pair.a_distribution(space, context)?;
    let cells: Vec<Event> = pair
        .a_partition()
        .iter()
        .map(|a| a.intersection(context))
        .collect();
    pair.b_partition()
        .iter()
        .map(|bx| {
            cells
                .iter()
                .zip(&weights)
                .map(|(cell, w)| Ok(w * space.conditional(bx, cell)?))
                .sum()
        })
        .collect()
}

/// Conditional variance D(v | C).
pub fn dispersion(space: &FiniteKolmogorovSpace, v: &RandomVariable, context: &Event) -> Result<f64> {
    let mean = v.conditional_mean(space, context)?;
    let pc = space.probability(context);
    let second: f64 = context
        .members()
        .map(|i| space.weights()[i] * (v.value_at(i) - mean).powi(2))
        .sum();
    Ok(second / pc)
}

/// True iff the matrix is square and every column sums to 1 within the predicate tolerance.
pub fn is_double_stochastic(m: &TransitionMatrix) -> bool {
    m.rows() == m.cols()
        && m.column_sums()
            .iter()
            .all(|s| tol::close(*s, 1.0, tol::PREDICATE))
}

/// The three conditions tied together for dichotomous pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SymmetryReport {
    /// p(b_i | a_j) = p(a_j | b_i) for all i, j.
    pub symmetric: bool,
    pub both_double_stochastic: bool,
    pub uniform_marginals: bool,
}

impl SymmetryReport {
    /// The three conditions agree (always expected for dichotomous pairs).
    pub fn consistent(&self) -> bool {
        self.symmetric == self.both_double_stochastic && self.symmetric == self.uniform_marginals
    }
}

pub fn symmetry_report(space: &FiniteKolmogorovSpace, pair: &ReferencePair) -> Result<SymmetryReport> {
    let ba = transition_matrix(space, pair, Orientation::BGivenA)?;
    let ab = transition_matrix(space, pair, Orientation::AGivenB)?;
    let symmetric = ba.rows() == ab.cols()
        && ba.cols() == ab.rows()
        && (0..ba.rows()).all(|j| {
            (0..ba.cols()).all(|i| tol::close(ba.get(j, i), ab.get(i, j), tol::PREDICATE))
        });
    let uniform = |cells: &[Event]| {
        let u = 1.0 / cells.len() as f64;
        cells
            .iter()
            .all(|c| tol::close(space.probability(c), u, tol::PREDICATE))
    };
    Ok(SymmetryReport {
        symmetric,
        both_double_stochastic: is_double_stochastic(&ba) && is_double_stochastic(&ab),
        uniform_marginals: uniform(pair.a_partition()) && uniform(pair.b_partition()),
    })
}

/// p(b_i | a_j) = p(a_j | b_i) for all i, j.
pub fn is_symmetrically_conditioned(space: &FiniteKolmogorovSpace, pair: &ReferencePair) -> Result<bool> {
    let report = symmetry_report(space, pair)?;
    if pair.a_values().len() == 2 && pair.b_values().len() == 2 {
        debug_assert!(report.consistent(), "symmetry conditions disagree: {report:?}");
    }
    Ok(report.symmetric)
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// Points w1..w4 with A_1 = {w1, w2}, B_1 = {w1, w4}; a, b take values ±1.
    pub fn four_point(weights: [f64; 4]) -> (FiniteKolmogorovSpace, ReferencePair) {
        let space = FiniteKolmogorovSpace::new(
            weights
                .iter()
                .enumerate()
                .map(|(i, &w)| (format!("w{}", i + 1), w)),
        )
        .unwrap();
        let a = RandomVariable::new("a", vec![1.0, 1.0, -1.0, -1.0]).unwrap();
        let b = RandomVariable::new("b", vec![1.0, -1.0, -1.0, 1.0]).unwrap();
        let pair = ReferencePair::new(&space, a, b).unwrap();
        (space, pair)
    }

    pub fn kq(q: f64) -> (FiniteKolmogorovSpace, ReferencePair) {
        let r = (1.0 - 2.0 * q) / 2.0;
        four_point([q, r, q, r])
    }

    /// Event from one-based point labels, e.g. `ctx(&s, &[1, 2, 3])` for C_123.
    pub fn ctx(space: &FiniteKolmogorovSpace, labels: &[usize]) -> Event {
        space.event_of(labels.iter().map(|l| l - 1))
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    const Q: f64 = 0.125;

    #[test]
    fn probability_examples() {
        let (s, pair) = kq(Q);
        assert_eq!(probability(&s, &s.empty()), 0.0);
        assert!((probability(&s, &s.full()) - 1.0).abs() < 1e-15);
        // q + (1 - 2q)/2
        assert!((probability(&s, &pair.b_partition()[0]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn conditional_examples() {
        let (s, pair) = kq(Q);
        let c123 = ctx(&s, &[1, 2, 3]);
        let c234 = ctx(&s, &[2, 3, 4]);
        assert!((conditional_probability(&s, &c123, &c123).unwrap() - 1.0).abs() < 1e-15);
        // 1/(2q+1)
        let p = conditional_probability(&s, &pair.a_partition()[0], &c123).unwrap();
        assert!((p - 1.0 / (2.0 * Q + 1.0)).abs() < 1e-12);
        assert!((p - 0.8).abs() < 1e-12);
        // (1-2q)/(2(1-q)) = 3/7
        let p = conditional_probability(&s, &pair.b_partition()[0], &c234).unwrap();
        assert!((p - 3.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn transition_matrix_examples() {
        let (s, pair) = kq(Q);
        let m = transition_matrix(&s, &pair, Orientation::BGivenA).unwrap();
        let expect = [[2.0 * Q, 1.0 - 2.0 * Q], [1.0 - 2.0 * Q, 2.0 * Q]];
        for (i, row) in expect.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                assert!((m.get(i, j) - e).abs() < 1e-12);
            }
        }
        // brute-force Bayes: P(B1|A1) = 0.1/0.3, P(B1|A2) = 0.4/0.7
        let (s, pair) = four_point([0.1, 0.2, 0.3, 0.4]);
        let m = transition_matrix(&s, &pair, Orientation::BGivenA).unwrap();
        let expect = [[1.0 / 3.0, 2.0 / 3.0], [4.0 / 7.0, 3.0 / 7.0]];
        for (i, row) in expect.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                assert!((m.get(i, j) - e).abs() < 1e-12);
            }
        }
        assert!(!is_double_stochastic(&m));
    }

    #[test]
    fn identical_partitions_give_identity_matrix() {
        let (s, pair) = kq(Q);
        let same = ReferencePair::new(&s, pair.a().clone(), pair.a().clone()).unwrap();
        let m = transition_matrix(&s, &same, Orientation::BGivenA).unwrap();
        assert_eq!(m.entries(), &[vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert!(!are_incompatible(&s, &same));
    }

    #[test]
    fn nondegeneracy_examples() {
        let (s, pair) = kq(Q);
        assert!(is_nondegenerate(&s, &s.full(), pair.a()).unwrap());
        assert!(!is_nondegenerate(&s, &pair.a_partition()[0], pair.a()).unwrap());
        assert!(is_nondegenerate(&s, &pair.b_partition()[0], pair.a()).unwrap());
        assert_eq!(
            is_nondegenerate(&s, &s.empty(), pair.a()),
            Err(Error::ZeroConditioningContext)
        );
    }

    #[test]
    fn incompatibility_examples() {
        let (s, pair) = kq(Q);
        assert!(are_incompatible(&s, &pair));
        // A_1 ⊂ B_1 forces the complement cell A_1 ∩ B_2 to be empty.
        let a = RandomVariable::new("a", vec![1.0, 1.0, -1.0, -1.0]).unwrap();
        let b = RandomVariable::new("b", vec![1.0, 1.0, 1.0, -1.0]).unwrap();
        let nested = ReferencePair::new(&s, a, b).unwrap();
        assert!(!are_incompatible(&s, &nested));
    }

    #[test]
    fn incompatibility_structure_examples() {
        let (_, pair) = kq(Q);
        let r = check_incompatibility_structure(&pair);
        assert!(r.cell_nonempty && r.no_inclusions && r.implication_holds);

        // Seven points: A = {123},{45},{67}; B = {14},{256},{37}.
        let s = FiniteKolmogorovSpace::uniform((1..=7).map(|i| format!("w{i}"))).unwrap();
        let a = RandomVariable::new("a", vec![1., 1., 1., 2., 2., 3., 3.]).unwrap();
        let b = RandomVariable::new("b", vec![1., 2., 3., 1., 2., 2., 3.]).unwrap();
        let r = check_incompatibility_structure(&ReferencePair::new(&s, a, b).unwrap());
        assert!(r.no_inclusions);
        assert!(!r.cell_nonempty);
        assert!(r.implication_holds);

        // Dichotomous pair without inclusions.
        let s = FiniteKolmogorovSpace::uniform((1..=5).map(|i| format!("w{i}"))).unwrap();
        let a = RandomVariable::new("a", vec![0., 0., 1., 1., 1.]).unwrap();
        let b = RandomVariable::new("b", vec![0., 1., 0., 1., 1.]).unwrap();
        let r = check_incompatibility_structure(&ReferencePair::new(&s, a, b).unwrap());
        assert!(r.no_inclusions && r.cell_nonempty);
    }

    #[test]
    fn total_probability_examples() {
        let (s, pair) = kq(Q);
        let c123 = ctx(&s, &[1, 2, 3]);
        let tp = classical_total_probability(&s, &pair, &c123).unwrap();
        assert!((tp[0] - 2.0 * Q / (2.0 * Q + 1.0)).abs() < 1e-12);
        for (x, bx) in pair.b_partition().iter().enumerate() {
            let direct = s.conditional(bx, &c123).unwrap();
            assert!((tp[x] - direct).abs() < 1e-12);
        }

        // Uniform independent pair.
        let s = FiniteKolmogorovSpace::uniform((1..=4).map(|i| format!("w{i}"))).unwrap();
        let a = RandomVariable::new("a", vec![1., 1., 2., 2.]).unwrap();
        let b = RandomVariable::new("b", vec![1., 2., 1., 2.]).unwrap();
        let pair = ReferencePair::new(&s, a, b).unwrap();
        let tp = classical_total_probability(&s, &pair, &s.full()).unwrap();
        assert!((tp[0] - 0.5).abs() < 1e-15 && (tp[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn total_probability_rejects_degenerate_context() {
        let (s, pair) = kq(Q);
        assert!(matches!(
            classical_total_probability(&s, &pair, &pair.a_partition()[0]),
            Err(Error::DegenerateContext { .. })
        ));
    }

    #[test]
    fn dispersion_examples() {
        let (s, pair) = kq(Q);
        for i in 0..4 {
            assert_eq!(dispersion(&s, pair.a(), &s.atom(i)).unwrap(), 0.0);
            assert_eq!(dispersion(&s, pair.b(), &s.atom(i)).unwrap(), 0.0);
        }
        let constant = RandomVariable::new("c", vec![3.0; 4]).unwrap();
        assert!(dispersion(&s, &constant, &s.full()).unwrap().abs() < 1e-15);
        let c234 = ctx(&s, &[2, 3, 4]);
        assert!((dispersion(&s, pair.b(), &c234).unwrap() - 48.0 / 49.0).abs() < 1e-12);
    }

    #[test]
    fn double_stochastic_examples() {
        let (s, pair) = kq(Q);
        assert!(is_double_stochastic(
            &transition_matrix(&s, &pair, Orientation::BGivenA).unwrap()
        ));
        let m = TransitionMatrix::from_rows(vec![vec![1.0, 0.0], vec![1.0, 0.0]], Orientation::BGivenA)
            .unwrap();
        assert!(!is_double_stochastic(&m));
    }

    #[test]
    fn symmetry_examples() {
        let (s, pair) = kq(Q);
        assert!(is_symmetrically_conditioned(&s, &pair).unwrap());
        let (s, pair) = four_point([0.1, 0.2, 0.3, 0.4]);
        let r = symmetry_report(&s, &pair).unwrap();
        assert!(!r.symmetric && r.consistent());
    }
}
