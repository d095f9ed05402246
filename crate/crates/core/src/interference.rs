//! Interference coefficients of the contextual formula of total probability.
//!
//! For a context `C` the classical formula
//! `P(b=x|C) = Σ_y P(a=y|C) P(b=x|a=y)` fails in general. The deviation
//! `δ(x)` and its normalised form `λ(x)` decide whether the context is
//! representable with a trigonometric phase (`|λ| ≤ 1`) or a hyperbolic
//! rapidity (`|λ| ≥ 1`).

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::prob::{
    is_double_stochastic, transition_matrix, Event, FiniteKolmogorovSpace, Orientation,
    ReferencePair, TransitionMatrix,
};
use crate::tol;

/// Per-outcome classification of a single λ value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeClass {
    Trigonometric,
    Hyperbolic,
    Boundary,
}

/// Classification of a whole context.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ContextClass {
    Trigonometric,
    Hyperbolic,
    Mixed,
    Boundary,
}

impl ContextClass {
    /// Admits a trigonometric phase for every outcome.
    pub fn is_trigonometric(self) -> bool {
        matches!(self, ContextClass::Trigonometric | ContextClass::Boundary)
    }

    /// Admits a hyperbolic rapidity for every outcome.
    pub fn is_hyperbolic(self) -> bool {
        matches!(self, ContextClass::Hyperbolic | ContextClass::Boundary)
    }
}

fn outcome_class(lambda: f64) -> OutcomeClass {
    if (lambda.abs() - 1.0).abs() <= tol::BOUNDARY {
        OutcomeClass::Boundary
    } else if lambda.abs() < 1.0 {
        OutcomeClass::Trigonometric
    } else {
        OutcomeClass::Hyperbolic
    }
}

/// The classical pieces of the total-probability formula for one context,
/// together with δ and λ for every `b`-value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterferenceCoefficients {
    #[serde(skip)]
    pub context: Event,
    /// P(a=y | C), in `a`-value order.
    pub a_distribution: Vec<f64>,
    /// P(b=x | C), in `b`-value order.
    pub b_distribution: Vec<f64>,
    /// P^{b/a}, indexed `[y][x]`.
    #[serde(skip)]
    pub transition: TransitionMatrix,
    pub delta: Vec<f64>,
    pub lambda: Vec<f64>,
    pub tags: Vec<OutcomeClass>,
    pub double_stochastic: bool,
}

impl InterferenceCoefficients {
    /// Computes δ and λ for every `b`-value; requires a dichotomous `a`.
    pub fn compute(space: &FiniteKolmogorovSpace, pair: &ReferencePair, context: &Event) -> Result<Self> {
        pair.require_dichotomous_a()?;
        pair.require_a_nondegenerate(space, context)?;
        let transition = transition_matrix(space, pair, Orientation::BGivenA)?;
        let a_distribution = pair.a_distribution(space, context)?;
        let b_distribution = pair.b_distribution(space, context)?;
        let kb = pair.b_values().len();
        let mut delta = Vec::with_capacity(kb);
        let mut lambda = Vec::with_capacity(kb);
        for x in 0..kb {
            let terms: Vec<f64> = (0..2)
                .map(|y| a_distribution[y] * transition.get(y, x))
                .collect();
            let d = b_distribution[x] - terms.iter().sum::<f64>();
            let root = terms.iter().product::<f64>().sqrt();
            if root <= 0.0 {
                let y = terms.iter().position(|t| *t <= 0.0).unwrap_or(0);
                return Err(Error::DegenerateCell(format!(
                    "{}={} ∩ {}={}",
                    pair.a().name(),
                    pair.a_values()[y],
                    pair.b().name(),
                    pair.b_values()[x]
                )));
            }
            delta.push(d);
            lambda.push(d / (2.0 * root));
        }
        let tags = lambda.iter().map(|&l| outcome_class(l)).collect();
        Ok(InterferenceCoefficients {
            context: context.clone(),
            a_distribution,
            b_distribution,
            double_stochastic: is_double_stochastic(&transition),
            transition,
            delta,
            lambda,
            tags,
        })
    }

    /// √(Π_y P(a=y|C) P(b=x|a=y)).
    pub fn cross_root(&self, x: usize) -> f64 {
        (0..2)
            .map(|y| self.a_distribution[y] * self.transition.get(y, x))
            .product::<f64>()
            .sqrt()
    }

    pub fn class(&self) -> ContextClass {
        classify_context(self)
    }
}

/// δ(b=x/a, C) for the `x`-th `b`-value; works for any arity of `a`.
pub fn delta(space: &FiniteKolmogorovSpace, pair: &ReferencePair, context: &Event, x: usize) -> Result<f64> {
    pair.require_a_nondegenerate(space, context)?;
    let m = transition_matrix(space, pair, Orientation::BGivenA)?;
    let pa = pair.a_distribution(space, context)?;
    let bx = &pair.b_partition()[x];
    let classical: f64 = pa.iter().enumerate().map(|(y, p)| p * m.get(y, x)).sum();
    Ok(space.conditional(bx, context)? - classical)
}

/// λ(b=x/a, C) for the `x`-th `b`-value.
pub fn lambda(space: &FiniteKolmogorovSpace, pair: &ReferencePair, context: &Event, x: usize) -> Result<f64> {
    Ok(InterferenceCoefficients::compute(space, pair, context)?.lambda[x])
}

pub fn classify_context(coeffs: &InterferenceCoefficients) -> ContextClass {
    let has = |c| coeffs.tags.contains(&c);
    match (has(OutcomeClass::Trigonometric), has(OutcomeClass::Hyperbolic)) {
        (false, false) => ContextClass::Boundary,
        (true, false) => ContextClass::Trigonometric,
        (false, true) => ContextClass::Hyperbolic,
        (true, true) => ContextClass::Mixed,
    }
}

/// Which of the two conjugate phase representatives to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    #[default]
    Principal,
    Conjugate,
}

impl Branch {
    pub fn flip(self) -> Branch {
        match self {
            Branch::Principal => Branch::Conjugate,
            Branch::Conjugate => Branch::Principal,
        }
    }
}

/// The representation a phase assignment is meant for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Projection {
    Trigonometric,
    Hyperbolic,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseAssignment {
    pub projection: Projection,
    pub branch: Branch,
    /// Angle in [0, 2π) or nonnegative rapidity, per `b`-value.
    pub theta: Vec<f64>,
    /// sign δ(x) per `b`-value (hyperbolic projection only).
    pub epsilon: Option<Vec<i8>>,
    /// k^{b/a} when `b` is dichotomous.
    pub k: Option<f64>,
}

pub(crate) fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// Distance between two angles on the circle.
pub(crate) fn angle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

fn safe_acos(x: f64) -> f64 {
    x.clamp(-1.0, 1.0).acos()
}

fn safe_acosh(x: f64) -> f64 {
    x.max(1.0).acosh()
}

pub fn assign_phases(
    coeffs: &InterferenceCoefficients,
    projection: Projection,
    branch: Branch,
) -> Result<PhaseAssignment> {
    let class = coeffs.class();
    match (class, projection) {
        (ContextClass::Mixed, _) => return Err(Error::MixedContext),
        (ContextClass::Hyperbolic, Projection::Trigonometric) => return Err(Error::HyperbolicContext),
        (ContextClass::Trigonometric, Projection::Hyperbolic) => return Err(Error::TrigonometricContext),
        _ => {}
    }
    let lam = &coeffs.lambda;
    let k = (lam.len() == 2)
        .then(|| k_coefficient(&coeffs.transition))
        .transpose()?;
    match projection {
        Projection::Trigonometric => {
            // Boundary outcomes get exact phases 0 or π.
            let snapped: Vec<f64> = lam
                .iter()
                .zip(&coeffs.tags)
                .map(|(&l, &t)| if t == OutcomeClass::Boundary { l.signum() } else { l })
                .collect();
            let mut theta: Vec<f64> = if lam.len() == 2 {
                let t1 = safe_acos(snapped[0]);
                let t2 = if coeffs.double_stochastic {
                    wrap_angle(t1 + PI)
                } else {
                    wrap_angle(TAU - safe_acos(snapped[1]))
                };
                // cos θ(b_2) = -k cos θ(b_1) holds for every incompatible pair.
                let k = k.unwrap_or(1.0);
                let residual = (t2.cos() + k * t1.cos()).abs().max((t2.cos() - lam[1]).abs());
                if residual > tol::PHASE_CHECK {
                    return Err(Error::PhaseInconsistency(format!(
                        "cos θ(b_2) = {} but λ(b_2) = {} and -k cos θ(b_1) = {}",
                        t2.cos(),
                        lam[1],
                        -k * t1.cos()
                    )));
                }
                vec![t1, t2]
            } else {
                snapped.iter().map(|&l| safe_acos(l)).collect()
            };
            if branch == Branch::Conjugate {
                for t in &mut theta {
                    *t = wrap_angle(TAU - *t);
                }
            }
            Ok(PhaseAssignment {
                projection,
                branch,
                theta,
                epsilon: None,
                k,
            })
        }
        Projection::Hyperbolic => {
            let epsilon: Vec<i8> = coeffs
                .delta
                .iter()
                .map(|&d| if d >= 0.0 { 1 } else { -1 })
                .collect();
            let mut theta: Vec<f64> = lam
                .iter()
                .zip(&coeffs.tags)
                .map(|(&l, &t)| if t == OutcomeClass::Boundary { 0.0 } else { safe_acosh(l.abs()) })
                .collect();
            if let Some(t) = theta.iter().find(|t| **t > tol::MAX_RAPIDITY) {
                return Err(Error::RapidityOverflow(*t));
            }
            if coeffs.double_stochastic && lam.len() == 2 {
                let gap = (lam[0].abs() - lam[1].abs()).abs();
                if gap > tol::PHASE_CHECK * lam[0].abs().max(1.0) {
                    return Err(Error::PhaseInconsistency(format!(
                        "double stochastic but cosh θ(b_1) = {} and cosh θ(b_2) = {}",
                        lam[0].abs(),
                        lam[1].abs()
                    )));
                }
                theta[1] = theta[0];
            }
            Ok(PhaseAssignment {
                projection,
                branch,
                theta,
                epsilon: Some(epsilon),
                k,
            })
        }
    }
}

/// Evaluates the interference formula Σ_y P(a=y|C)P(b=x|a=y) + 2 t(θ(x)) √(…)
/// with `t = cos` or `t = ε cosh`, from freshly computed classical terms.
pub fn reconstruct_probability(
    space: &FiniteKolmogorovSpace,
    pair: &ReferencePair,
    context: &Event,
    phases: &PhaseAssignment,
) -> Result<Vec<f64>> {
    pair.require_dichotomous_a()?;
    pair.require_a_nondegenerate(space, context)?;
    let m = transition_matrix(space, pair, Orientation::BGivenA)?;
    let pa = pair.a_distribution(space, context)?;
    (0..pair.b_values().len())
        .map(|x| {
            let t0 = pa[0] * m.get(0, x);
            let t1 = pa[1] * m.get(1, x);
            let interference = match (&phases.projection, &phases.epsilon) {
                (Projection::Trigonometric, _) => phases.theta[x].cos(),
                (Projection::Hyperbolic, Some(eps)) => f64::from(eps[x]) * phases.theta[x].cosh(),
                (Projection::Hyperbolic, None) => {
                    return Err(Error::Precondition("hyperbolic phases without ε".into()))
                }
            };
            Ok(t0 + t1 + 2.0 * interference * (t0 * t1).sqrt())
        })
        .collect()
}

/// k^{b/a} = √(p_11 p_21 / (p_12 p_22)) for a 2×2 transition matrix.
pub fn k_coefficient(m: &TransitionMatrix) -> Result<f64> {
    if m.rows() != 2 || m.cols() != 2 {
        return Err(Error::Precondition(format!(
            "k coefficient needs a 2×2 matrix, got {}×{}",
            m.rows(),
            m.cols()
        )));
    }
    for i in 0..2 {
        for j in 0..2 {
            if m.get(i, j) <= 0.0 {
                return Err(Error::DegenerateCell(format!("transition entry ({i},{j}) is zero")));
            }
        }
    }
    Ok((m.get(0, 0) * m.get(1, 0) / (m.get(0, 1) * m.get(1, 1))).sqrt())
}

/// Outcome of the search for a single phase shift α with
/// θ_C(b_2) = θ_C(b_1) + α (mod 2π) valid across a family of contexts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlobalAlphaReport {
    /// A common shift, when one exists (π is preferred if admissible).
    pub alpha: Option<f64>,
    /// Two contexts (indices into the input) admitting no common shift.
    pub witness: Option<(usize, usize)>,
    /// Input indices that were not trigonometric and were left out.
    pub skipped: Vec<usize>,
    pub double_stochastic: bool,
    pub k: f64,
    /// Two contexts with different |λ(b_1)|.
    pub distinct_lambda_pair: Option<(usize, usize)>,
    /// A common shift together with distinct |λ| forces double stochasticity.
    pub distinct_lambda_forces_double_stochastic: bool,
    /// With a δ = 0 context, a δ ≠ 0 context and no double stochasticity, no shift exists.
    pub nonzero_delta_excludes_alpha: bool,
}

fn alpha_candidates(lam: &[f64]) -> [f64; 4] {
    let snap = |l: f64| if outcome_class(l) == OutcomeClass::Boundary { l.signum() } else { l };
    let (p1, p2) = (safe_acos(snap(lam[0])), safe_acos(snap(lam[1])));
    [p2 - p1, p2 + p1, -p2 - p1, -p2 + p1].map(wrap_angle)
}

fn admits(cands: &[f64; 4], alpha: f64) -> bool {
    cands.iter().any(|&c| angle_distance(c, alpha) <= tol::PHASE_CHECK)
}

pub fn verify_no_global_alpha(
    space: &FiniteKolmogorovSpace,
    pair: &ReferencePair,
    contexts: &[Event],
) -> Result<GlobalAlphaReport> {
    pair.require_dichotomous_a()?;
    pair.require_dichotomous_b()?;
    let m = transition_matrix(space, pair, Orientation::BGivenA)?;
    let k = k_coefficient(&m)?;
    let mut used = Vec::new();
    let mut skipped = Vec::new();
    for (i, c) in contexts.iter().enumerate() {
        match InterferenceCoefficients::compute(space, pair, c) {
            Ok(co) if co.class().is_trigonometric() => used.push((i, co)),
            _ => skipped.push(i),
        }
    }
    let cands: Vec<[f64; 4]> = used.iter().map(|(_, c)| alpha_candidates(&c.lambda)).collect();

    let mut alpha = None;
    if let Some(first) = cands.first() {
        let mut pool: Vec<f64> = first.to_vec();
        pool.sort_by(|a, b| angle_distance(*a, PI).total_cmp(&angle_distance(*b, PI)));
        alpha = pool
            .into_iter()
            .find(|&al| cands.iter().all(|c| admits(c, al)));
        if let Some(a) = alpha.as_mut() {
            if angle_distance(*a, PI) <= tol::PHASE_CHECK {
                *a = PI;
            }
        }
    }

    let mut witness = None;
    'outer: for i in 0..cands.len() {
        for j in i + 1..cands.len() {
            if !cands[i].iter().any(|&c| admits(&cands[j], c)) {
                witness = Some((used[i].0, used[j].0));
                break 'outer;
            }
        }
    }

    let mut distinct_lambda_pair = None;
    'outer: for i in 0..used.len() {
        for j in i + 1..used.len() {
            if (used[i].1.lambda[0].abs() - used[j].1.lambda[0].abs()).abs() > tol::PHASE_CHECK {
                distinct_lambda_pair = Some((used[i].0, used[j].0));
                break 'outer;
            }
        }
    }

    let ds = is_double_stochastic(&m);
    let has_zero = used.iter().any(|(_, c)| c.delta[0].abs() <= tol::PREDICATE);
    let has_nonzero = used.iter().any(|(_, c)| c.delta[0].abs() > tol::PHASE_CHECK);
    Ok(GlobalAlphaReport {
        distinct_lambda_forces_double_stochastic: ds
            || alpha.is_none()
            || distinct_lambda_pair.is_none(),
        nonzero_delta_excludes_alpha: ds || !(has_zero && has_nonzero) || alpha.is_none(),
        alpha,
        witness,
        skipped,
        double_stochastic: ds,
        k,
        distinct_lambda_pair,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::fixtures::{ctx, four_point, kq};

    const QS: [f64; 4] = [0.05, 0.125, 0.25, 0.4];

    #[test]
    fn delta_vanishes_on_whole_space() {
        for q in QS {
            let (s, pair) = kq(q);
            for x in 0..2 {
                assert!(delta(&s, &pair, &s.full(), x).unwrap().abs() < 1e-15);
            }
        }
        let (s, pair) = four_point([0.1, 0.2, 0.3, 0.4]);
        assert!(delta(&s, &pair, &s.full(), 0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn kq_closed_forms_for_c123() {
        for q in QS {
            let (s, pair) = kq(q);
            let c = ctx(&s, &[1, 2, 3]);
            let d = delta(&s, &pair, &c, 0).unwrap();
            assert!((d - 2.0 * q * (2.0 * q - 1.0) / (2.0 * q + 1.0)).abs() < 1e-12);
            let l = lambda(&s, &pair, &c, 0).unwrap();
            assert!((l + (1.0 - 2.0 * q).sqrt() / 2.0).abs() < 1e-12);
            let co = InterferenceCoefficients::compute(&s, &pair, &c).unwrap();
            assert_eq!(co.class(), ContextClass::Trigonometric);
        }
        let (s, pair) = kq(0.125);
        let l = lambda(&s, &pair, &ctx(&s, &[1, 2, 3]), 0).unwrap();
        assert!((l + 0.433013).abs() < 1e-6);
    }

    #[test]
    fn b_cells_are_boundary_for_kq() {
        let (s, pair) = kq(0.125);
        let co = InterferenceCoefficients::compute(&s, &pair, &pair.b_partition()[0]).unwrap();
        assert!((co.lambda[0] - 1.0).abs() < 1e-12);
        assert!((co.lambda[1] + 1.0).abs() < 1e-12);
        assert_eq!(co.class(), ContextClass::Boundary);
    }

    #[test]
    fn skewed_model_conditioned_on_b1_is_hyperbolic() {
        let (s, pair) = four_point([0.1, 0.2, 0.3, 0.4]);
        let c = pair.b_partition()[0].clone();
        // δ(b_1) = 1 - (0.3·1/3 + 0.7·4/7) = 0.476190…
        let d = delta(&s, &pair, &c, 0).unwrap();
        assert!((d - 0.476190).abs() < 1e-6);
        assert!((d - 10.0 / 21.0).abs() < 1e-12);
        let co = InterferenceCoefficients::compute(&s, &pair, &c).unwrap();
        assert!((co.lambda[0] - 1.36386).abs() < 1e-5);
        // δ(b_2) = -δ(b_1) but the root differs, so |λ(b_2)| is smaller.
        assert!((co.lambda[1] + 1.11359).abs() < 1e-5);
        assert_eq!(co.class(), ContextClass::Hyperbolic);
    }

    #[test]
    fn zero_lambda_is_trigonometric() {
        let (s, pair) = kq(0.125);
        let co = InterferenceCoefficients::compute(&s, &pair, &s.full()).unwrap();
        assert!(co.lambda.iter().all(|l| l.abs() < 1e-15));
        assert_eq!(co.class(), ContextClass::Trigonometric);
        let ph = assign_phases(&co, Projection::Trigonometric, Branch::Principal).unwrap();
        assert!((ph.theta[0] - PI / 2.0).abs() < 1e-12);
        assert!((ph.theta[1] - 1.5 * PI).abs() < 1e-12);
    }

    #[test]
    fn c123_phases_match_conjugate_branch() {
        for q in QS {
            let (s, pair) = kq(q);
            let co = InterferenceCoefficients::compute(&s, &pair, &ctx(&s, &[1, 2, 3])).unwrap();
            let ph = assign_phases(&co, Projection::Trigonometric, Branch::Conjugate).unwrap();
            let t2 = ((1.0 - 2.0 * q).sqrt() / 2.0).acos();
            assert!((ph.theta[1] - t2).abs() < 1e-12);
            assert!(angle_distance(ph.theta[0], t2 - PI) < 1e-12);
        }
    }

    #[test]
    fn boundary_phase_is_zero() {
        let (s, pair) = kq(0.25);
        let co = InterferenceCoefficients::compute(&s, &pair, &pair.b_partition()[0]).unwrap();
        let tr = assign_phases(&co, Projection::Trigonometric, Branch::Principal).unwrap();
        assert_eq!(tr.theta[0], 0.0);
        let hy = assign_phases(&co, Projection::Hyperbolic, Branch::Principal).unwrap();
        assert_eq!(hy.theta[0], 0.0);
        assert_eq!(hy.epsilon, Some(vec![1, -1]));
    }

    #[test]
    fn mixed_and_wrong_projection_are_rejected() {
        let (s, pair) = four_point([0.1, 0.2, 0.3, 0.4]);
        let hyp = InterferenceCoefficients::compute(&s, &pair, &pair.b_partition()[0]).unwrap();
        assert_eq!(
            assign_phases(&hyp, Projection::Trigonometric, Branch::Principal),
            Err(Error::HyperbolicContext)
        );
        let (s, pair) = kq(0.125);
        let tr = InterferenceCoefficients::compute(&s, &pair, &ctx(&s, &[1, 2, 3])).unwrap();
        assert_eq!(
            assign_phases(&tr, Projection::Hyperbolic, Branch::Principal),
            Err(Error::TrigonometricContext)
        );
        let mut mixed = tr.clone();
        mixed.tags = vec![OutcomeClass::Trigonometric, OutcomeClass::Hyperbolic];
        assert_eq!(
            assign_phases(&mixed, Projection::Trigonometric, Branch::Principal),
            Err(Error::MixedContext)
        );
    }

    #[test]
    fn reconstruction_is_exact_on_the_examples() {
        let (s, pair) = kq(0.125);
        let c = ctx(&s, &[1, 2, 3]);
        let co = InterferenceCoefficients::compute(&s, &pair, &c).unwrap();
        for br in [Branch::Principal, Branch::Conjugate] {
            let ph = assign_phases(&co, Projection::Trigonometric, br).unwrap();
            let r = reconstruct_probability(&s, &pair, &c, &ph).unwrap();
            assert!((r[0] - 0.2).abs() < 1e-12 && (r[1] - 0.8).abs() < 1e-12);
        }
        let (s, pair) = four_point([0.1, 0.2, 0.3, 0.4]);
        let c = pair.b_partition()[0].clone();
        let co = InterferenceCoefficients::compute(&s, &pair, &c).unwrap();
        let ph = assign_phases(&co, Projection::Hyperbolic, Branch::Principal).unwrap();
        let r = reconstruct_probability(&s, &pair, &c, &ph).unwrap();
        assert!((r[0] - 1.0).abs() < 1e-12 && r[1].abs() < 1e-12);
    }

    #[test]
    fn k_coefficient_examples() {
        let (s, pair) = kq(0.125);
        let m = transition_matrix(&s, &pair, Orientation::BGivenA).unwrap();
        assert!((k_coefficient(&m).unwrap() - 1.0).abs() < 1e-15);
        let m = TransitionMatrix::from_rows(
            vec![vec![1.0 / 3.0, 2.0 / 3.0], vec![4.0 / 7.0, 3.0 / 7.0]],
            Orientation::BGivenA,
        )
        .unwrap();
        let k = k_coefficient(&m).unwrap();
        assert!((k - (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert!((k - 0.816497).abs() < 1e-6);
        let m = TransitionMatrix::from_rows(vec![vec![0.3, 0.7], vec![0.7, 0.3]], Orientation::BGivenA)
            .unwrap();
        assert!((k_coefficient(&m).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lambda_ratio_equals_minus_k() {
        let (s, pair) = four_point([0.1, 0.2, 0.3, 0.4]);
        let m = transition_matrix(&s, &pair, Orientation::BGivenA).unwrap();
        let k = k_coefficient(&m).unwrap();
        for labels in [&[1, 2, 3][..], &[1, 3], &[2, 4], &[1, 3, 4]] {
            let co = InterferenceCoefficients::compute(&s, &pair, &ctx(&s, labels)).unwrap();
            assert!((co.lambda[1] + k * co.lambda[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn alpha_is_pi_for_double_stochastic_models() {
        let (s, pair) = kq(0.125);
        let family = [s.full(), ctx(&s, &[1, 2, 3]), ctx(&s, &[1, 2, 4]), ctx(&s, &[1, 3])];
        let r = verify_no_global_alpha(&s, &pair, &family).unwrap();
        assert_eq!(r.alpha, Some(PI));
        assert!(r.witness.is_none());
    }

    #[test]
    fn no_alpha_without_double_stochasticity() {
        let (s, pair) = four_point([0.1, 0.2, 0.3, 0.4]);
        let family = [s.full(), ctx(&s, &[1, 2, 3])];
        let r = verify_no_global_alpha(&s, &pair, &family).unwrap();
        assert!(!r.double_stochastic);
        assert_eq!(r.alpha, None);
        assert_eq!(r.witness, Some((0, 1)));
        assert!(r.nonzero_delta_excludes_alpha && r.distinct_lambda_forces_double_stochastic);
    }

    #[test]
    fn single_context_always_has_alpha() {
        let (s, pair) = four_point([0.1, 0.2, 0.3, 0.4]);
        let c = ctx(&s, &[1, 2, 3]);
        let r = verify_no_global_alpha(&s, &pair, std::slice::from_ref(&c)).unwrap();
        let co = InterferenceCoefficients::compute(&s, &pair, &c).unwrap();
        let ph = assign_phases(&co, Projection::Trigonometric, Branch::Principal).unwrap();
        let a = r.alpha.unwrap();
        // Either sign of θ(b_1) may carry the shift.
        let fits = [ph.theta[0], -ph.theta[0]]
            .iter()
            .any(|t| ((t + a).cos() - co.lambda[1]).abs() < 1e-9);
        assert!(fits);
    }
}
