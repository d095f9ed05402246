//! Hyperbolic Hilbert-module projection of hyperbolic contexts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypernum::{exp_j, HyperbolicNumber};
use crate::interference::{assign_phases, Branch, ContextClass, InterferenceCoefficients, Projection};
use crate::prob::{is_double_stochastic, Event, FiniteKolmogorovSpace, ReferencePair, TransitionMatrix};
use crate::tol;

type H = HyperbolicNumber;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HyperbolicAmplitude {
    pub components: Vec<HyperbolicNumber>,
    /// sign δ(x).
    pub epsilon: Vec<i8>,
    /// Rapidities θ(x) ≥ 0.
    pub theta: Vec<f64>,
}

impl HyperbolicAmplitude {
    /// |ψ(x)|² for every `b`-value.
    pub fn probabilities(&self) -> Vec<f64> {
        self.components.iter().map(|z| z.norm_sq()).collect()
    }
}

/// ψ_C(x) = √(P(a_1|C)p(x|a_1)) + ε(x) e^{jθ(x)} √(P(a_2|C)p(x|a_2)).
pub fn build_hyperbolic_amplitude(
    space: &FiniteKolmogorovSpace,
    pair: &ReferencePair,
    context: &Event,
) -> Result<HyperbolicAmplitude> {
    let co = InterferenceCoefficients::compute(space, pair, context)?;
    hyperbolic_from_coefficients(&co)
}

fn hyperbolic_from_coefficients(co: &InterferenceCoefficients) -> Result<HyperbolicAmplitude> {
    match co.class() {
        ContextClass::Mixed => return Err(Error::MixedContext),
        ContextClass::Trigonometric => return Err(Error::TrigonometricContext),
        _ => {}
    }
    let ph = assign_phases(co, Projection::Hyperbolic, Branch::Principal)?;
    let epsilon = ph.epsilon.unwrap_or_default();
    let components = (0..co.lambda.len())
        .map(|x| {
            let first = (co.a_distribution[0] * co.transition.get(0, x)).sqrt();
            let second = (co.a_distribution[1] * co.transition.get(1, x)).sqrt();
            Ok(H::real(first) + exp_j(ph.theta[x])?.scale(f64::from(epsilon[x]) * second))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HyperbolicAmplitude {
        components,
        epsilon,
        theta: ph.theta,
    })
}

/// (ψ, φ) = Σ ψ(x) conj(φ(x)) in G.
pub fn hyperbolic_inner_product(psi: &[HyperbolicNumber], phi: &[HyperbolicNumber]) -> HyperbolicNumber {
    debug_assert_eq!(psi.len(), phi.len());
    psi.iter().zip(phi).map(|(a, b)| *a * b.conj()).sum()
}

/// A basis of the G-module written in `b`-coordinates; row `y` is e_y^a.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GModuleBasis {
    pub vectors: Vec<Vec<HyperbolicNumber>>,
    /// max component of |V conj(V)ᵀ − I|.
    pub unitarity_residual: f64,
}

pub fn g_unitarity_residual(rows: &[Vec<HyperbolicNumber>]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, ri) in rows.iter().enumerate() {
        for (j, rj) in rows.iter().enumerate() {
            let target = if i == j { H::ONE } else { H::ZERO };
            worst = worst.max((hyperbolic_inner_product(ri, rj) - target).max_abs_component());
        }
    }
    worst
}

/// e_1^a = (u_11, u_12), e_2^a = (ε_1 e^{jθ_1} u_21, ε_2 e^{jθ_2} u_22) from the anchor.
pub fn hyperbolic_a_basis(
    space: &FiniteKolmogorovSpace,
    pair: &ReferencePair,
    anchor: &Event,
) -> Result<GModuleBasis> {
    pair.require_dichotomous_a()?;
    pair.require_dichotomous_b()?;
    let co = InterferenceCoefficients::compute(space, pair, anchor)?;
    let psi = hyperbolic_from_coefficients(&co)?;
    let u = |i: usize, j: usize| co.transition.get(i, j).sqrt();
    let second = |x: usize| -> Result<H> {
        Ok(exp_j(psi.theta[x])?.scale(f64::from(psi.epsilon[x]) * u(1, x)))
    };
    let vectors = vec![vec![H::real(u(0, 0)), H::real(u(0, 1))], vec![second(0)?, second(1)?]];
    let residual = g_unitarity_residual(&vectors);
    if residual > tol::BORN {
        return Err(Error::NonUnitaryBasis { residual });
    }
    Ok(GModuleBasis {
        vectors,
        unitarity_residual: residual,
    })
}

/// Coordinates (ψ, e_y) of `psi` in a G-orthonormal basis.
pub fn coordinates(psi: &[HyperbolicNumber], basis: &[Vec<HyperbolicNumber>]) -> Vec<HyperbolicNumber> {
    basis.iter().map(|e| hyperbolic_inner_product(psi, e)).collect()
}

/// Every coordinate lies in G₊.
pub fn check_decomposability(coords: &[HyperbolicNumber]) -> bool {
    coords.iter().all(|v| v.norm_sq() >= -tol::IDENTITY)
}

/// Decomposability of a state in a basis, with the squared norms that decide it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionReport {
    pub coordinates: Vec<HyperbolicNumber>,
    pub norms: Vec<f64>,
    /// When false the squared norms cannot be read as probabilities.
    pub born_interpretable: bool,
}

pub fn decomposition_report(psi: &[HyperbolicNumber], basis: &[Vec<HyperbolicNumber>]) -> DecompositionReport {
    let c = coordinates(psi, basis);
    DecompositionReport {
        norms: c.iter().map(|z| z.norm_sq()).collect(),
        born_interpretable: check_decomposability(&c),
        coordinates: c,
    }
}

/// A G-unitary 2×2 basis in which a state that is decomposable in the
/// `b`-basis stops being decomposable, although each new basis vector is
/// itself decomposable in the `b`-basis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransferWitness {
    pub basis: Vec<Vec<HyperbolicNumber>>,
    pub report: DecompositionReport,
}

/// Rows (u e^{jα}, w e^{jβ}) and (−w e^{j(α+γ)}, u e^{j(β+γ)}) with u² + w² = 1.
pub fn g_unitary_2x2(angle: f64, alpha: f64, beta: f64, gamma: f64) -> Result<Vec<Vec<HyperbolicNumber>>> {
    let (u, w) = (angle.cos(), angle.sin());
    Ok(vec![
        vec![exp_j(alpha)?.scale(u), exp_j(beta)?.scale(w)],
        vec![exp_j(alpha + gamma)?.scale(-w), exp_j(beta + gamma)?.scale(u)],
    ])
}

/// Seeded random search for a [`TransferWitness`].
pub fn find_transfer_witness(psi: &[HyperbolicNumber], seed: u64, attempts: usize) -> Option<TransferWitness> {
    if psi.len() != 2 || !check_decomposability(psi) {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..attempts {
        let basis = g_unitary_2x2(
            rng.gen_range(0.0..std::f64::consts::TAU),
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-3.0..3.0),
        )
        .ok()?;
        debug_assert!(basis.iter().all(|r| check_decomposability(r)));
        let report = decomposition_report(psi, &basis);
        if report.norms.iter().any(|n| *n < -tol::PHASE_CHECK) {
            return Some(TransferWitness { basis, report });
        }
    }
    None
}

/// p(b_1) = Σ p_a(a_i) p_i1 + 2ε cosh θ √(…), p(b_2) = Σ p_a(a_i) p_i2 − 2ε cosh θ √(…),
/// the paired signs keeping the total at 1 for a double stochastic matrix.
pub fn hyperbolic_interference_transform(
    p_a: [f64; 2],
    transition: &TransitionMatrix,
    theta: f64,
    eps: i8,
) -> Result<[f64; 2]> {
    if transition.rows() != 2 || transition.cols() != 2 || !is_double_stochastic(transition) {
        return Err(Error::Precondition("transform needs a 2×2 double stochastic matrix".into()));
    }
    if eps != 1 && eps != -1 {
        return Err(Error::Precondition(format!("ε must be ±1, got {eps}")));
    }
    if !tol::close(p_a[0] + p_a[1], 1.0, tol::IDENTITY) || p_a.iter().any(|p| *p < 0.0) {
        return Err(Error::Precondition(format!("{p_a:?} is not a distribution")));
    }
    let c = exp_j(theta)?.x;
    let e = f64::from(eps);
    let m = |i: usize, j: usize| transition.get(i, j);
    let p1 = p_a[0] * m(0, 0) + p_a[1] * m(1, 0) + 2.0 * e * c * (p_a[0] * m(0, 0) * p_a[1] * m(1, 0)).sqrt();
    let p2 = p_a[0] * m(0, 1) + p_a[1] * m(1, 1) - 2.0 * e * c * (p_a[0] * m(0, 1) * p_a[1] * m(1, 1)).sqrt();
    for (index, value) in [p1, p2].into_iter().enumerate() {
        if !(-tol::IDENTITY..=1.0 + tol::IDENTITY).contains(&value) {
            return Err(Error::OutOfRangeProbability { index, value });
        }
    }
    Ok([p1, p2])
}
