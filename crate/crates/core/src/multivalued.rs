//! Complex amplitudes for reference variables with more than two values,
//! built by splitting the `a`-partition into nested dichotomies.

use itertools::Itertools;
use num_complex::Complex64;
use serde::Serialize;

use crate::complex::{ser_cvec, ComplexAmplitude};
use crate::error::{Error, Result};
use crate::interference::{wrap_angle, Branch};
use crate::prob::{Event, FiniteKolmogorovSpace, ReferencePair};
use crate::tol;

/// Both sides of the additivity, total-probability and contextual
/// total-probability identities for `B` over the disjoint pair `{D_1, D_2}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitDecomposition {
    /// P(B(D_1 ∪ D_2) | C).
    pub lhs: f64,
    /// P(BD_1 | C) + P(BD_2 | C).
    pub additive: f64,
    /// Σ_j P(B | D_j C) P(D_j | C).
    pub total_probability: f64,
    /// Σ_j P(B | D_j) P(D_j | C) + 2λ √(Π_j P(B | D_j) P(D_j | C)).
    pub contextual: f64,
    pub delta: f64,
    /// δ recomputed as Σ_j P(D_j | C)(P(B | D_j C) − P(B | D_j)).
    pub delta_alternative: f64,
    pub lambda: f64,
    /// Largest deviation of any right-hand side from `lhs`.
    pub residual: f64,
}

fn require_positive(space: &FiniteKolmogorovSpace, e: &Event, what: &str) -> Result<f64> {
    let p = space.probability(e);
    if p <= 0.0 {
        return Err(Error::Precondition(format!("P({what}) must be positive")));
    }
    Ok(p)
}

pub fn contextual_total_probability_split(
    space: &FiniteKolmogorovSpace,
    b: &Event,
    d1: &Event,
    d2: &Event,
    c: &Event,
) -> Result<SplitDecomposition> {
    if !d1.is_disjoint(d2) {
        return Err(Error::Precondition("D_1 and D_2 must be disjoint".into()));
    }
    if space.probability(c) <= 0.0 {
        return Err(Error::ZeroConditioningContext);
    }
    let ds = [d1, d2];
    for (j, d) in ds.iter().enumerate() {
        require_positive(space, &b.intersection(d), &format!("B D_{}", j + 1))?;
        require_positive(space, &d.intersection(c), &format!("D_{} C", j + 1))?;
    }
    let lhs = space.conditional(&b.intersection(&d1.union(d2)), c)?;
    let mut additive = 0.0;
    let mut total_probability = 0.0;
    let mut classical = 0.0;
    let mut product = 1.0;
    let mut delta_alternative = 0.0;
    for d in ds {
        let pdc = space.conditional(d, c)?;
        let pbdc = space.conditional(b, &d.intersection(c))?;
        let pbd = space.conditional(b, d)?;
        additive += space.conditional(&b.intersection(d), c)?;
        total_probability += pbdc * pdc;
        classical += pbd * pdc;
        product *= pbd * pdc;
        delta_alternative += pdc * (pbdc - pbd);
    }
    let delta = lhs - classical;
    let lambda = delta / (2.0 * product.sqrt());
    let contextual = classical + 2.0 * lambda * product.sqrt();
    let residual = [additive, total_probability, contextual]
        .iter()
        .map(|r| (r - lhs).abs())
        .fold((delta - delta_alternative).abs(), f64::max);
    Ok(SplitDecomposition {
        lhs,
        additive,
        total_probability,
        contextual,
        delta,
        delta_alternative,
        lambda,
        residual,
    })
}

/// μ with P(B(D_1∪D_2)|C) = P(B|D_1)P(D_1|C) + P(BD_2|C) + 2μ √(P(B|D_1)P(D_1|C)P(BD_2|C)).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MuSplit {
    pub mu: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

pub fn mu_split(
    space: &FiniteKolmogorovSpace,
    b: &Event,
    d1: &Event,
    d2: &Event,
    c: &Event,
) -> Result<MuSplit> {
    if !d1.is_disjoint(d2) {
        return Err(Error::Precondition("D_1 and D_2 must be disjoint".into()));
    }
    if space.probability(c) <= 0.0 {
        return Err(Error::ZeroConditioningContext);
    }
    require_positive(space, &b.intersection(d1), "B D_1")?;
    require_positive(space, &c.intersection(d1), "C D_1")?;
    require_positive(space, &b.intersection(d2).intersection(c), "B D_2 C")?;
    let lhs = space.conditional(&b.intersection(&d1.union(d2)), c)?;
    let head = space.conditional(b, d1)? * space.conditional(d1, c)?;
    let tail = space.conditional(&b.intersection(d2), c)?;
    let root = (head * tail).sqrt();
    let mu = (lhs - head - tail) / (2.0 * root);
    let rhs = head + tail + 2.0 * mu * root;
    Ok(MuSplit {
        mu,
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
    })
}

pub fn mu_coefficient(
    space: &FiniteKolmogorovSpace,
    b: &Event,
    d1: &Event,
    d2: &Event,
    c: &Event,
) -> Result<f64> {
    Ok(mu_split(space, b, d1, d2, c)?.mu)
}

/// One dichotomous split `{A_j, A_{j+1} ∪ … ∪ A_n}` for a fixed `b`-value.
/// At the last level `mu` is λ and `gamma` is θ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitLevel {
    pub mu: f64,
    pub gamma: f64,
    /// arg ψ^{(j)}(x).
    pub alpha: f64,
    /// P(B_x (A_j ∪ … ∪ A_n) | C).
    pub tail: f64,
    #[serde(serialize_with = "ser_complex")]
    pub partial_amplitude: Complex64,
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeChain {
    pub levels: Vec<SplitLevel>,
    /// Phase β per `a`-value, in split order; β of the first value is 0.
    pub beta: Vec<f64>,
    /// P(B_x | A_y) P(A_y | C) per `a`-value, in split order.
    pub cells: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitChain {
    /// Indices into the declared `a`-values, in the order they were split off.
    pub order: Vec<usize>,
    pub outcomes: Vec<OutcomeChain>,
}

impl SplitChain {
    /// max over levels and outcomes of ||ψ^{(j)}(x)|² − tail|.
    pub fn level_residual(&self) -> f64 {
        self.outcomes
            .iter()
            .flat_map(|o| &o.levels)
            .map(|l| (l.partial_amplitude.norm_sqr() - l.tail).abs())
            .fold(0.0, f64::max)
    }

    /// | Σ_y e^{iβ_y} √cell_y − ψ(x) | for the given amplitude.
    pub fn expansion_residual(&self, psi: &[Complex64]) -> f64 {
        self.outcomes
            .iter()
            .zip(psi)
            .map(|(o, z)| {
                let sum: Complex64 = o
                    .beta
                    .iter()
                    .zip(&o.cells)
                    .map(|(b, h)| Complex64::from_polar(h.sqrt(), *b))
                    .sum();
                (sum - z).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// Split order and arccos sign choices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SplitConfig {
    /// Permutation of the declared `a`-value indices; declared order when absent.
    pub order: Option<Vec<usize>>,
    /// `(b-value index, level)` pairs whose phase takes the negative arccos.
    pub negative: Vec<(usize, usize)>,
}

pub fn build_amplitude_nvalued(
    space: &FiniteKolmogorovSpace,
    pair: &ReferencePair,
    context: &Event,
    config: &SplitConfig,
) -> Result<(ComplexAmplitude, SplitChain)> {
    let n = pair.a_values().len();
    if n < 2 {
        return Err(Error::NotDichotomous {
            variable: pair.a().name().to_string(),
            arity: n,
            expected: 2,
        });
    }
    let order: Vec<usize> = config.order.clone().unwrap_or_else(|| (0..n).collect());
    let pair = pair.with_a_order(&order)?;
    pair.require_a_nondegenerate(space, context)?;
    let a_cells = pair.a_partition();
    let pa = pair.a_distribution(space, context)?;

    let mut outcomes = Vec::with_capacity(pair.b_values().len());
    let mut components = Vec::with_capacity(pair.b_values().len());
    let mut last_theta = Vec::with_capacity(pair.b_values().len());
    for (x, bx) in pair.b_partition().iter().enumerate() {
        let mut cells = Vec::with_capacity(n);
        for (y, ay) in a_cells.iter().enumerate() {
            let h = space.conditional(bx, ay)? * pa[y];
            if h <= 0.0 {
                return Err(Error::DegenerateCell(format!(
                    "{}={} ∩ {}={}",
                    pair.a().name(),
                    pair.a_values()[y],
                    pair.b().name(),
                    pair.b_values()[x]
                )));
            }
            cells.push(h);
        }
        // tails[j] = P(B_x (A_j ∪ … ∪ A_n) | C)
        let mut tails = vec![0.0; n];
        let mut union = space.empty();
        for j in (0..n).rev() {
            union = union.union(&a_cells[j]);
            tails[j] = space.conditional(&bx.intersection(&union), context)?;
        }
        let sign = |level: usize| {
            if config.negative.contains(&(x, level)) {
                -1.0
            } else {
                1.0
            }
        };
        let check = |level: usize, mu: f64| -> Result<f64> {
            if mu.abs() > 1.0 + tol::IDENTITY || !mu.is_finite() {
                return Err(Error::SplitOutOfRange {
                    level: level + 1,
                    outcome: pair.b_values()[x],
                    mu,
                });
            }
            Ok(mu.clamp(-1.0, 1.0))
        };

        let mut levels: Vec<SplitLevel> = Vec::with_capacity(n - 1);
        // Last split {A_{n-1}, A_n}.
        let j = n - 2;
        let lam = (tails[j] - cells[j] - cells[j + 1]) / (2.0 * (cells[j] * cells[j + 1]).sqrt());
        let theta = sign(j) * check(j, lam)?.acos();
        let mut psi = Complex64::new(cells[j].sqrt(), 0.0) + Complex64::from_polar(cells[j + 1].sqrt(), theta);
        levels.push(SplitLevel {
            mu: lam,
            gamma: theta,
            alpha: psi.arg(),
            tail: tails[j],
            partial_amplitude: psi,
        });
        for j in (0..n - 2).rev() {
            let root = (cells[j] * tails[j + 1]).sqrt();
            let mu = (tails[j] - cells[j] - tails[j + 1]) / (2.0 * root);
            let gamma = sign(j) * check(j, mu)?.acos();
            let alpha_next = psi.arg();
            psi = Complex64::new(cells[j].sqrt(), 0.0) + Complex64::from_polar(1.0, gamma - alpha_next) * psi;
            levels.push(SplitLevel {
                mu,
                gamma,
                alpha: psi.arg(),
                tail: tails[j],
                partial_amplitude: psi,
            });
        }
        levels.reverse();

        let mut beta = vec![0.0; n];
        for j in 1..n - 1 {
            beta[j] = beta[j - 1] + levels[j - 1].gamma - levels[j].alpha;
        }
        beta[n - 1] = beta[n - 2] + levels[n - 2].gamma;
        let beta: Vec<f64> = beta.into_iter().map(wrap_angle).collect();

        components.push(psi);
        last_theta.push(wrap_angle(levels[n - 2].gamma));
        outcomes.push(OutcomeChain { levels, beta, cells });
    }
    Ok((
        ComplexAmplitude {
            components,
            branch: Branch::Principal,
            theta: last_theta,
        },
        SplitChain { order, outcomes },
    ))
}

/// The outcome of the construction for one split order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderOutcome {
    pub order: Vec<usize>,
    /// Max |ψ(x)|² − P(b=x|C) when representable.
    pub born_residual: Option<f64>,
    #[serde(serialize_with = "ser_opt_cvec")]
    pub amplitude: Option<Vec<Complex64>>,
    /// Why the order is not representable.
    pub failure: Option<String>,
}

fn ser_opt_cvec<S: serde::Serializer>(v: &Option<Vec<Complex64>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => ser_cvec(v, s),
        None => s.serialize_none(),
    }
}

/// Runs the construction for every permutation of the `a`-values.
pub fn all_split_orders(
    space: &FiniteKolmogorovSpace,
    pair: &ReferencePair,
    context: &Event,
) -> Result<Vec<OrderOutcome>> {
    let n = pair.a_values().len();
    let direct = pair.b_distribution(space, context)?;
    Ok((0..n)
        .permutations(n)
        .map(|order| {
            let config = SplitConfig {
                order: Some(order.clone()),
                negative: Vec::new(),
            };
            match build_amplitude_nvalued(space, pair, context, &config) {
                Ok((amp, _)) => OrderOutcome {
                    born_residual: Some(
                        amp.probabilities()
                            .iter()
                            .zip(&direct)
                            .map(|(p, q)| (p - q).abs())
                            .fold(0.0, f64::max),
                    ),
                    amplitude: Some(amp.components),
                    failure: None,
                    order,
                },
                Err(e) => OrderOutcome {
                    order,
                    born_residual: None,
                    amplitude: None,
                    failure: Some(e.to_string()),
                },
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::build_amplitude;
    use crate::linalg::max_abs_diff;
    use crate::prob::fixtures::{ctx, kq};
    use crate::prob::RandomVariable;
    use std::f64::consts::FRAC_PI_2;

    /// 3×3 uniform product space: a = row, b = column.
    fn product9() -> (FiniteKolmogorovSpace, ReferencePair) {
        let s = FiniteKolmogorovSpace::uniform((0..9).map(|i| format!("w{i}"))).unwrap();
        let a = RandomVariable::new("a", (0..9).map(|i| (i / 3) as f64).collect()).unwrap();
        let b = RandomVariable::new("b", (0..9).map(|i| (i % 3) as f64).collect()).unwrap();
        let pair = ReferencePair::new(&s, a, b).unwrap();
        (s, pair)
    }

    #[test]
    fn whole_space_split_reduces_to_dichotomous_formula() {
        let (s, pair) = kq(0.125);
        let c = ctx(&s, &[1, 2, 3]);
        let bx = &pair.b_partition()[0];
        let d = contextual_total_probability_split(&s, bx, &pair.a_partition()[0], &pair.a_partition()[1], &c)
            .unwrap();
        assert!(d.residual < 1e-12);
        assert!((d.lambda + (0.75f64).sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn independent_event_has_zero_lambda() {
        let (s, pair) = product9();
        let b = &pair.b_partition()[1];
        let c = s.full();
        let d = contextual_total_probability_split(&s, b, &pair.a_partition()[0], &pair.a_partition()[2], &c)
            .unwrap();
        assert!(d.lambda.abs() < 1e-12 && d.residual < 1e-12);
    }

    #[test]
    fn split_rejects_overlap_and_null_sets() {
        let (s, pair) = product9();
        let a0 = &pair.a_partition()[0];
        assert!(matches!(
            contextual_total_probability_split(&s, a0, a0, a0, &s.full()),
            Err(Error::Precondition(_))
        ));
        assert_eq!(
            contextual_total_probability_split(&s, a0, a0, &pair.a_partition()[1], &s.empty()),
            Err(Error::ZeroConditioningContext)
        );
    }

    #[test]
    fn mu_matches_closed_form_and_leaves_unit_interval() {
        // B = {0, 2}, D1 = {0, 1}, D2 = {2}, C = {1, 2}: μ = -½ √(w0 w1 / ((w0 + w1) w2)).
        for eps in [0.1, 1e-2, 1e-4] {
            let w = [0.4, 0.4, eps, 0.2 - eps];
            let s = FiniteKolmogorovSpace::new(w.iter().enumerate().map(|(i, &p)| (format!("w{i}"), p))).unwrap();
            let r = mu_split(&s, &s.event_of([0, 2]), &s.event_of([0, 1]), &s.event_of([2]), &s.event_of([1, 2]))
                .unwrap();
            let expected = -0.5 * (w[0] * w[1] / ((w[0] + w[1]) * w[2])).sqrt();
            assert!((r.mu - expected).abs() < 1e-12);
            assert!(r.residual < 1e-12);
            assert_eq!(r.mu.abs() > 1.0, eps < 0.05);
        }
    }

    #[test]
    fn uniform_product_has_right_angle_phases() {
        let (s, pair) = product9();
        let (amp, chain) = build_amplitude_nvalued(&s, &pair, &s.full(), &SplitConfig::default()).unwrap();
        for (x, o) in chain.outcomes.iter().enumerate() {
            for l in &o.levels {
                assert!(l.mu.abs() < 1e-12);
                assert!((l.gamma - FRAC_PI_2).abs() < 1e-12);
            }
            assert!((amp.probabilities()[x] - 1.0 / 3.0).abs() < 1e-12);
        }
        assert!(chain.level_residual() < 1e-12);
        assert!(chain.expansion_residual(&amp.components) < 1e-12);
    }

    #[test]
    fn two_values_reduce_to_the_dichotomous_amplitude() {
        let (s, pair) = kq(0.125);
        let c = ctx(&s, &[1, 2, 3]);
        let psi = build_amplitude(&s, &pair, &c, Branch::Principal).unwrap();
        let config = SplitConfig {
            order: None,
            negative: vec![(1, 0)],
        };
        let (amp, chain) = build_amplitude_nvalued(&s, &pair, &c, &config).unwrap();
        assert!(max_abs_diff(&amp.components, &psi.components) < 1e-12);
        for (x, o) in chain.outcomes.iter().enumerate() {
            assert!((o.beta[1] - psi.theta[x]).abs() < 1e-12);
        }
    }

    #[test]
    fn all_orders_reproduce_born_rule() {
        let w = [0.05, 0.12, 0.08, 0.1, 0.15, 0.09, 0.11, 0.17, 0.13];
        let s = FiniteKolmogorovSpace::new(w.iter().enumerate().map(|(i, &p)| (format!("w{i}"), p))).unwrap();
        let a = RandomVariable::new("a", (0..9).map(|i| (i / 3) as f64).collect()).unwrap();
        let b = RandomVariable::new("b", (0..9).map(|i| (i % 3) as f64).collect()).unwrap();
        let pair = ReferencePair::new(&s, a, b).unwrap();
        let outcomes = all_split_orders(&s, &pair, &s.full()).unwrap();
        assert_eq!(outcomes.len(), 6);
        for o in &outcomes {
            if let Some(r) = o.born_residual {
                assert!(r < 1e-9, "{o:?}");
            }
        }
        assert!(outcomes.iter().any(|o| o.born_residual.is_some()));
    }

    #[test]
    fn out_of_range_split_is_reported() {
        // Concentrate the context on a single cell so that μ leaves [-1, 1].
        let (s, pair) = product9();
        let c = s.event_of([0, 4, 8, 1]);
        match build_amplitude_nvalued(&s, &pair, &c, &SplitConfig::default()) {
            Err(Error::SplitOutOfRange { mu, .. }) => assert!(mu.abs() > 1.0),
            other => panic!("expected SplitOutOfRange, got {other:?}"),
        }
    }
}
