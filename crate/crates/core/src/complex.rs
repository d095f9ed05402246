//! Complex Hilbert-space projection of trigonometric contexts.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interference::{assign_phases, Branch, ContextClass, InterferenceCoefficients, Projection};
use crate::linalg::{inner, max_abs_diff, norm_sq, CMatrix, CVector};
use crate::prob::{Event, FiniteKolmogorovSpace, ReferencePair};
use crate::tol;

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// A state vector in coordinates of the `b`-basis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexAmplitude {
    #[serde(serialize_with = "ser_cvec")]
    pub components: CVector,
    pub branch: Branch,
    /// Trigonometric phases θ(x) used for the second summand.
    pub theta: Vec<f64>,
}

pub(crate) fn ser_cvec<S: serde::Serializer>(v: &CVector, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for z in v {
        seq.serialize_element(&[z.re, z.im])?;
    }
    seq.end()
}

impl ComplexAmplitude {
    /// |ψ(x)|² for every `b`-value.
    pub fn probabilities(&self) -> Vec<f64> {
        self.components.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn norm_sq(&self) -> f64 {
        norm_sq(&self.components)
    }

    pub fn conj(&self) -> ComplexAmplitude {
        ComplexAmplitude {
            components: self.components.iter().map(|z| z.conj()).collect(),
            branch: self.branch.flip(),
            theta: self
                .theta
                .iter()
                .map(|t| crate::interference::wrap_angle(std::f64::consts::TAU - t))
                .collect(),
        }
    }
}

/// ψ_C(x) = √(P(a_1|C) p(x|a_1)) + e^{iθ(x)} √(P(a_2|C) p(x|a_2)).
pub fn build_amplitude(
    space: &FiniteKolmogorovSpace,
    pair: &ReferencePair,
    context: &Event,
    branch: Branch,
) -> Result<ComplexAmplitude> {
    let co = InterferenceCoefficients::compute(space, pair, context)?;
    amplitude_from_coefficients(&co, branch)
}

pub(crate) fn amplitude_from_coefficients(
    co: &InterferenceCoefficients,
    branch: Branch,
) -> Result<ComplexAmplitude> {
    match co.class() {
        ContextClass::Mixed => return Err(Error::MixedContext),
        ContextClass::Hyperbolic => return Err(Error::HyperbolicContext),
        _ => {}
    }
    let ph = assign_phases(co, Projection::Trigonometric, branch)?;
    let components = (0..co.lambda.len())
        .map(|x| {
            let first = (co.a_distribution[0] * co.transition.get(0, x)).sqrt();
            let second = (co.a_distribution[1] * co.transition.get(1, x)).sqrt();
            real(first) + Complex64::from_polar(second, ph.theta[x])
        })
        .collect();
    Ok(ComplexAmplitude {
        components,
        branch,
        theta: ph.theta,
    })
}

/// Which coordinate system a basis or operator refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisLabel {
    B,
    A,
}

/// An ordered family of vectors written in `b`-coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HilbertBasis {
    pub label: BasisLabel,
    /// Row `y` holds the coordinates of the `y`-th basis vector; this is the
    /// change-of-basis matrix V.
    #[serde(serialize_with = "ser_rows")]
    pub vectors: Vec<CVector>,
    pub branch: Branch,
    /// max |V V† − I|.
    pub unitarity_residual: f64,
    pub unitary: bool,
    /// Column sums of P^{b/a}, kept as the witness when V fails to be unitary.
    pub column_sums: Vec<f64>,
}

fn ser_rows<S: serde::Serializer>(v: &[CVector], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for row in v {
        let row: Vec<[f64; 2]> = row.iter().map(|z| [z.re, z.im]).collect();
        seq.serialize_element(&row)?;
    }
    seq.end()
}

fn unitarity_residual(vectors: &[CVector]) -> f64 {
    let v = CMatrix::from_rows(vectors);
    (&(&v * &v.adjoint()) - &CMatrix::identity(v.dim())).max_abs()
}

impl HilbertBasis {
    /// The canonical basis e_x^b.
    pub fn b_basis(n: usize) -> HilbertBasis {
        let vectors = CMatrix::identity(n).rows();
        HilbertBasis {
            label: BasisLabel::B,
            vectors,
            branch: Branch::Principal,
            unitarity_residual: 0.0,
            unitary: true,
            column_sums: vec![1.0; n],
        }
    }

    pub fn matrix(&self) -> CMatrix {
        CMatrix::from_rows(&self.vectors)
    }

    pub fn require_unitary(&self) -> Result<()> {
        if self.unitary {
            Ok(())
        } else {
            Err(Error::NonUnitaryBasis {
                residual: self.unitarity_residual,
            })
        }
    }
}

/// e_1^a = (u_11, u_12), e_2^a = (e^{iθ_1} u_21, e^{iθ_2} u_22) with θ taken
/// from the anchor context. A non-unitary result is returned, not rejected.
pub fn a_basis_for_context(
    space: &FiniteKolmogorovSpace,
    pair: &ReferencePair,
    anchor: &Event,
    branch: Branch,
) -> Result<HilbertBasis> {
    pair.require_dichotomous_a()?;
    pair.require_dichotomous_b()?;
    let co = InterferenceCoefficients::compute(space, pair, anchor)?;
    let psi = amplitude_from_coefficients(&co, branch)?;
    let m = &co.transition;
    let u = |i: usize, j: usize| m.get(i, j).sqrt();
    let vectors = vec![
        vec![real(u(0, 0)), real(u(0, 1))],
        vec![
            Complex64::from_polar(u(1, 0), psi.theta[0]),
            Complex64::from_polar(u(1, 1), psi.theta[1]),
        ],
    ];
    let residual = unitarity_residual(&vectors);
    Ok(HilbertBasis {
        label: BasisLabel::A,
        vectors,
        branch,
        unitarity_residual: residual,
        unitary: residual <= tol::BORN,
        column_sums: m.column_sums(),
    })
}

/// Ω when it is trigonometric, else the first trigonometric context listed.
pub fn default_anchor<'a>(
    space: &FiniteKolmogorovSpace,
    pair: &ReferencePair,
    contexts: impl IntoIterator<Item = &'a Event>,
) -> Option<Event> {
    let trig = |c: &Event| {
        InterferenceCoefficients::compute(space, pair, c)
            .map(|co| co.class().is_trigonometric())
            .unwrap_or(false)
    };
    let full = space.full();
    if trig(&full) {
        return Some(full);
    }
    contexts.into_iter().find(|c| trig(c)).cloned()
}

/// J(A_y) = e_y^a for every `a`-cell.
pub fn extend_to_a_contexts(pair: &ReferencePair, a_basis: &HilbertBasis) -> Vec<(Event, CVector)> {
    pair.a_partition()
        .iter()
        .cloned()
        .zip(a_basis.vectors.iter().cloned())
        .collect()
}

/// |(ψ, e)|².
pub fn born_probability(psi: &[Complex64], basis_vector: &[Complex64]) -> f64 {
    inner(psi, basis_vector).norm_sqr()
}

/// A self-adjoint operator written in `b`-coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HermitianOperator {
    pub matrix: CMatrix,
    /// Basis in which the operator was specified by its eigenvalues.
    pub eigenbasis: BasisLabel,
    /// Coordinate system of `matrix`.
    pub coordinates: BasisLabel,
}

/// Σ_y values[y] e_y e_y†, the operator with eigenvectors `basis` and the given eigenvalues.
pub fn operator_for_variable(values: &[f64], basis: &HilbertBasis) -> Result<HermitianOperator> {
    basis.require_unitary()?;
    if values.len() != basis.vectors.len() {
        return Err(Error::Precondition(format!(
            "{} values for a basis of {} vectors",
            values.len(),
            basis.vectors.len()
        )));
    }
    let matrix = CMatrix::outer_sum(values, &basis.vectors);
    debug_assert!(matrix.hermitian_residual() <= tol::IDENTITY);
    Ok(HermitianOperator {
        matrix,
        eigenbasis: basis.label,
        coordinates: BasisLabel::B,
    })
}

impl HermitianOperator {
    pub fn sum(&self, other: &HermitianOperator) -> Result<HermitianOperator> {
        if self.coordinates != other.coordinates {
            return Err(Error::BasisMismatch);
        }
        Ok(HermitianOperator {
            matrix: &self.matrix + &other.matrix,
            eigenbasis: self.eigenbasis,
            coordinates: self.coordinates,
        })
    }

    /// Largest |A e − y e| over the given eigenpairs.
    pub fn eigen_residual(&self, values: &[f64], vectors: &[CVector]) -> f64 {
        values
            .iter()
            .zip(vectors)
            .map(|(y, e)| {
                let ye: CVector = e.iter().map(|z| z * y).collect();
                max_abs_diff(&self.matrix.apply(e), &ye)
            })
            .fold(0.0, f64::max)
    }
}

/// AB − BA.
pub fn commutator(a: &HermitianOperator, b: &HermitianOperator) -> Result<CMatrix> {
    if a.coordinates != b.coordinates {
        return Err(Error::BasisMismatch);
    }
    Ok(&(&a.matrix * &b.matrix) - &(&b.matrix * &a.matrix))
}

/// (AB + BA) / 2.
pub fn symmetrized_product(a: &HermitianOperator, b: &HermitianOperator) -> Result<HermitianOperator> {
    if a.coordinates != b.coordinates {
        return Err(Error::BasisMismatch);
    }
    let m = (&(&a.matrix * &b.matrix) + &(&b.matrix * &a.matrix)).scale(0.5);
    Ok(HermitianOperator {
        matrix: m,
        eigenbasis: a.eigenbasis,
        coordinates: a.coordinates,
    })
}

/// (A ψ, ψ), with the imaginary residue checked and dropped.
pub fn quantum_average(op: &HermitianOperator, psi: &[Complex64]) -> Result<f64> {
    let z = inner(&op.matrix.apply(psi), psi);
    if z.im.abs() > tol::BORN * op.matrix.max_abs().max(1.0) {
        return Err(Error::Precondition(format!(
            "average has imaginary part {}; operator is not self-adjoint",
            z.im
        )));
    }
    Ok(z.re)
}

/// The state a representable context is mapped to: e_y^a for an `a`-cell,
/// otherwise ψ_C.
pub fn state_for_context(
    space: &FiniteKolmogorovSpace,
    pair: &ReferencePair,
    context: &Event,
    a_basis: &HilbertBasis,
    branch: Branch,
) -> Result<CVector> {
    if let Some(y) = pair.a_cell_index(context) {
        return Ok(a_basis.vectors[y].clone());
    }
    Ok(build_amplitude(space, pair, context, branch)?.components)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AverageReport {
    pub classical: f64,
    pub quantum: f64,
    pub residual: f64,
}

/// E(f(a) + g(b) | C) against ⟨f(â) + g(b̂)⟩_ψ, where `f` and `g` are given as
/// tables over the `a`- and `b`-values.
pub fn verify_average_preservation(
    space: &FiniteKolmogorovSpace,
    pair: &ReferencePair,
    context: &Event,
    f: &[f64],
    g: &[f64],
    a_basis: &HilbertBasis,
    branch: Branch,
) -> Result<AverageReport> {
    if f.len() != pair.a_values().len() || g.len() != pair.b_values().len() {
        return Err(Error::Precondition("function tables do not match the value sets".into()));
    }
    let pc = space.probability(context);
    if pc <= 0.0 {
        return Err(Error::ZeroConditioningContext);
    }
    let fa = pair.a().values().iter().map(|v| f[pair.a_values().iter().position(|y| y == v).unwrap()]);
    let gb = pair.b().values().iter().map(|v| g[pair.b_values().iter().position(|x| x == v).unwrap()]);
    let classical = fa
        .zip(gb)
        .enumerate()
        .filter(|(i, _)| context.contains(*i))
        .map(|(i, (u, v))| space.weights()[i] * (u + v))
        .sum::<f64>()
        / pc;
    let op = operator_for_variable(f, a_basis)?.sum(&operator_for_variable(
        g,
        &HilbertBasis::b_basis(pair.b_values().len()),
    )?)?;
    let psi = state_for_context(space, pair, context, a_basis, branch)?;
    let quantum = quantum_average(&op, &psi)?;
    Ok(AverageReport {
        classical,
        quantum,
        residual: (classical - quantum).abs(),
    })
}

/// Classical and quantum statistics of d = γ(a + b) for a pair with values ±1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionMismatch {
    pub classical_support: Vec<f64>,
    pub classical_probabilities: Vec<f64>,
    /// Eigenvalues of d̂ in ascending order.
    pub quantum_support: Vec<f64>,
    pub quantum_probabilities: Vec<f64>,
    pub classical_average: f64,
    pub quantum_average: f64,
    /// Total variation with both laws viewed as measures on the real line.
    pub total_variation: f64,
    /// Total variation after pairing the atoms of positive classical mass
    /// with the eigenvalues, both in ascending order.
    pub ranked_total_variation: f64,
}

pub fn distribution_mismatch(
    space: &FiniteKolmogorovSpace,
    pair: &ReferencePair,
    context: &Event,
    gamma: f64,
    a_basis: &HilbertBasis,
    branch: Branch,
) -> Result<DistributionMismatch> {
    let pm_one = |vals: &[f64]| {
        let mut v = vals.to_vec();
        v.sort_by(f64::total_cmp);
        v == [-1.0, 1.0]
    };
    if !pm_one(pair.a_values()) || !pm_one(pair.b_values()) {
        return Err(Error::Precondition("both reference variables must take the values ±1".into()));
    }
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::Precondition(format!("γ = {gamma} must be positive")));
    }
    let pc = space.probability(context);
    if pc <= 0.0 {
        return Err(Error::ZeroConditioningContext);
    }
    let classical_support = vec![-2.0 * gamma, 0.0, 2.0 * gamma];
    let mut classical_probabilities = vec![0.0; 3];
    for i in context.members() {
        let d = pair.a().value_at(i) + pair.b().value_at(i);
        let slot = ((d + 2.0) / 2.0).round() as usize;
        classical_probabilities[slot] += space.weights()[i] / pc;
    }
    let scaled = |v: &[f64]| v.iter().map(|x| gamma * x).collect::<Vec<_>>();
    let d_op = operator_for_variable(&scaled(pair.a_values()), a_basis)?.sum(&operator_for_variable(
        &scaled(pair.b_values()),
        &HilbertBasis::b_basis(2),
    )?)?;
    let (vals, vecs) = d_op
        .matrix
        .eigh2()
        .ok_or_else(|| Error::Precondition("d̂ must be 2×2".into()))?;
    let psi = state_for_context(space, pair, context, a_basis, branch)?;
    let quantum_probabilities: Vec<f64> = vecs.iter().map(|e| born_probability(&psi, e)).collect();
    let classical_average = classical_support
        .iter()
        .zip(&classical_probabilities)
        .map(|(x, p)| x * p)
        .sum();
    let quantum_average = quantum_average(&d_op, &psi)?;

    let mut tv = 0.0;
    let mut atoms: Vec<(f64, f64)> = classical_support
        .iter()
        .copied()
        .zip(classical_probabilities.iter().copied())
        .collect();
    for (x, p) in vals.iter().zip(&quantum_probabilities) {
        match atoms.iter_mut().find(|(s, _)| (s - x).abs() <= tol::PREDICATE) {
            Some(atom) => atom.1 -= p,
            None => atoms.push((*x, -p)),
        }
    }
    for (_, m) in &atoms {
        tv += m.abs();
    }
    let positive: Vec<f64> = classical_probabilities
        .iter()
        .copied()
        .filter(|p| *p > tol::PREDICATE)
        .collect();
    let ranked_total_variation = if positive.len() == quantum_probabilities.len() {
        0.5 * positive
            .iter()
            .zip(&quantum_probabilities)
            .map(|(p, q)| (p - q).abs())
            .sum::<f64>()
    } else {
        0.5 * tv
    };
    Ok(DistributionMismatch {
        classical_support,
        classical_probabilities,
        quantum_support: vals.to_vec(),
        quantum_probabilities,
        classical_average,
        quantum_average,
        total_variation: 0.5 * tv,
        ranked_total_variation,
    })
}

/// How the states of a family of contexts were assigned.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContextImage {
    /// Distinct states, in first-use order.
    #[serde(serialize_with = "ser_rows")]
    pub states: Vec<CVector>,
    /// For every input context, the index of its state (None if not representable).
    pub assignment: Vec<Option<usize>>,
    /// Groups of input indices whose `a`- and `b`-distributions coincide.
    pub distribution_groups: Vec<Vec<usize>>,
    /// Pairs `(i, j)` where context `j` had to reuse the state of context `i`.
    pub collisions: Vec<(usize, usize)>,
    /// Input indices that are neither trigonometric nor an `a`-cell.
    pub skipped: Vec<usize>,
}

impl ContextImage {
    pub fn is_injective(&self) -> bool {
        self.collisions.is_empty()
    }
}

/// Maps a family of contexts to states. Within a group of contexts with equal
/// distributions the first gets the principal amplitude, the second its
/// conjugate, and any further context reuses the first state.
pub fn image_of_context_family(
    space: &FiniteKolmogorovSpace,
    pair: &ReferencePair,
    contexts: &[Event],
    a_basis: Option<&HilbertBasis>,
) -> Result<ContextImage> {
    let mut states: Vec<CVector> = Vec::new();
    let mut assignment = vec![None; contexts.len()];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut collisions = Vec::new();
    let mut skipped = Vec::new();

    let intern = |v: CVector, states: &mut Vec<CVector>| -> usize {
        match states.iter().position(|s| max_abs_diff(s, &v) <= tol::BORN) {
            Some(i) => i,
            None => {
                states.push(v);
                states.len() - 1
            }
        }
    };

    for (i, c) in contexts.iter().enumerate() {
        if let Some(y) = pair.a_cell_index(c) {
            match a_basis {
                Some(b) if b.unitary => {
                    assignment[i] = Some(intern(b.vectors[y].clone(), &mut states));
                }
                _ => skipped.push(i),
            }
            continue;
        }
        let co = match InterferenceCoefficients::compute(space, pair, c) {
            Ok(co) if co.class().is_trigonometric() => co,
            _ => {
                skipped.push(i);
                continue;
            }
        };
        let mut group = None;
        for (g, members) in groups.iter().enumerate() {
            if pair.distributions_match(space, &contexts[members[0]], c)? {
                group = Some(g);
                break;
            }
        }
        let g = match group {
            Some(g) => {
                groups[g].push(i);
                g
            }
            None => {
                groups.push(vec![i]);
                groups.len() - 1
            }
        };
        let rank = groups[g].len() - 1;
        let first = groups[g][0];
        let state = match rank {
            0 => amplitude_from_coefficients(&co, Branch::Principal)?.components,
            1 => amplitude_from_coefficients(&co, Branch::Conjugate)?.components,
            _ => {
                collisions.push((first, i));
                assignment[i] = assignment[first];
                continue;
            }
        };
        let idx = intern(state, &mut states);
        // A real amplitude equals its conjugate, so the second context collides too.
        if rank == 1 && Some(idx) == assignment[first] {
            collisions.push((first, i));
        }
        assignment[i] = Some(idx);
    }
    Ok(ContextImage {
        states,
        assignment,
        distribution_groups: groups,
        collisions,
        skipped,
    })
}
