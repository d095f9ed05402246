//! Report assembly for the command-line front end. Contexts are evaluated in
//! parallel; reports list them in declaration order.

use std::fmt::{self, Write as _};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::complex::{
    a_basis_for_context, build_amplitude, commutator, default_anchor, distribution_mismatch, image_of_context_family,
    operator_for_variable, quantum_average, ComplexAmplitude, DistributionMismatch, HermitianOperator, HilbertBasis,
};
use crate::error::{Error, Result};
use crate::hyperbolic::{build_hyperbolic_amplitude, hyperbolic_a_basis, GModuleBasis, HyperbolicAmplitude};
use crate::interference::{
    assign_phases, delta, k_coefficient, Branch, ContextClass, InterferenceCoefficients, OutcomeClass, PhaseAssignment,
    Projection,
};
use crate::linalg::{inner, CMatrix};
use crate::model::{generate_kq, Model};
use crate::multivalued::{build_amplitude_nvalued, SplitChain, SplitConfig};
use crate::prob::{is_double_stochastic, transition_matrix, Event, Orientation};
use crate::verify::context_family;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariableSummary {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContextAnalysis {
    pub name: String,
    pub members: Vec<String>,
    pub probability: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_distribution: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_distribution: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tags: Option<Vec<OutcomeClass>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class: Option<ContextClass>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trigonometric_phases: Option<PhaseAssignment>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hyperbolic_phases: Option<PhaseAssignment>,
    /// Split coefficients for an `a` with more than two values.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub split: Option<SplitChain>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyzeReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    pub a: VariableSummary,
    pub b: VariableSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transition_b_given_a: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transition_a_given_b: Option<Vec<Vec<f64>>>,
    pub double_stochastic: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    pub contexts: Vec<ContextAnalysis>,
}

fn selected(model: &Model, context: Option<&str>) -> Result<Vec<(String, Event)>> {
    match context {
        Some(name) => Ok(vec![(name.to_string(), model.context(name)?.clone())]),
        None => Ok(context_family(model)),
    }
}

fn members(model: &Model, e: &Event) -> Vec<String> {
    e.members().map(|i| model.space.ids()[i].clone()).collect()
}

fn analyze_one(model: &Model, name: &str, event: &Event) -> ContextAnalysis {
    let s = &model.space;
    let pair = &model.pair;
    let mut out = ContextAnalysis {
        name: name.to_string(),
        members: members(model, event),
        probability: s.probability(event),
        a_distribution: pair.a_distribution(s, event).ok(),
        b_distribution: pair.b_distribution(s, event).ok(),
        delta: None,
        lambda: None,
        tags: None,
        class: None,
        trigonometric_phases: None,
        hyperbolic_phases: None,
        split: None,
        error: None,
    };
    if pair.a_values().len() != 2 {
        let d: Result<Vec<f64>> = (0..pair.b_values().len()).map(|x| delta(s, pair, event, x)).collect();
        match d {
            Ok(d) => out.delta = Some(d),
            Err(e) => {
                out.error = Some(e.to_string());
                return out;
            }
        }
        match build_amplitude_nvalued(s, pair, event, &SplitConfig::default()) {
            Ok((_, chain)) => out.split = Some(chain),
            Err(e) => out.error = Some(e.to_string()),
        }
        return out;
    }
    match InterferenceCoefficients::compute(s, pair, event) {
        Ok(co) => {
            out.trigonometric_phases = assign_phases(&co, Projection::Trigonometric, Branch::Principal).ok();
            out.hyperbolic_phases = assign_phases(&co, Projection::Hyperbolic, Branch::Principal).ok();
            out.class = Some(co.class());
            out.delta = Some(co.delta);
            out.lambda = Some(co.lambda);
            out.tags = Some(co.tags);
        }
        Err(e) => out.error = Some(e.to_string()),
    }
    out
}

pub fn analyze(model: &Model, context: Option<&str>) -> Result<AnalyzeReport> {
    let s = &model.space;
    let pair = &model.pair;
    let list = selected(model, context)?;
    let contexts = list.par_iter().map(|(n, e)| analyze_one(model, n, e)).collect();
    let ba = transition_matrix(s, pair, Orientation::BGivenA).ok();
    let ab = transition_matrix(s, pair, Orientation::AGivenB).ok();
    Ok(AnalyzeReport {
        model: model.document.name.clone(),
        a: VariableSummary {
            name: pair.a().name().into(),
            values: pair.a_values().to_vec(),
        },
        b: VariableSummary {
            name: pair.b().name().into(),
            values: pair.b_values().to_vec(),
        },
        double_stochastic: ba.as_ref().is_some_and(is_double_stochastic),
        k: ba.as_ref().and_then(|m| k_coefficient(m).ok()),
        transition_b_given_a: ba.map(|m| m.entries().to_vec()),
        transition_a_given_b: ab.map(|m| m.entries().to_vec()),
        contexts,
    })
}

impl fmt::Display for AnalyzeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(m) = &self.model {
            writeln!(f, "model: {m}")?;
        }
        writeln!(f, "a = {} {:?}, b = {} {:?}", self.a.name, self.a.values, self.b.name, self.b.values)?;
        if let Some(m) = &self.transition_b_given_a {
            writeln!(f, "P(b|a) = {m:?}  double stochastic: {}", self.double_stochastic)?;
        }
        if let Some(k) = self.k {
            writeln!(f, "k = {k}")?;
        }
        for c in &self.contexts {
            write!(f, "{:<12} P = {:<8.5}", c.name, c.probability)?;
            if let Some(e) = &c.error {
                writeln!(f, " {e}")?;
                continue;
            }
            if let Some(class) = c.class {
                write!(f, " {class:?}")?;
            }
            if let Some(d) = &c.delta {
                write!(f, " δ = {}", fmt_vec(d))?;
            }
            if let Some(l) = &c.lambda {
                write!(f, " λ = {}", fmt_vec(l))?;
            }
            if let Some(p) = c.trigonometric_phases.as_ref().or(c.hyperbolic_phases.as_ref()) {
                write!(f, " θ = {}", fmt_vec(&p.theta))?;
            }
            if let Some(chain) = &c.split {
                let mus: Vec<f64> = chain.outcomes.iter().flat_map(|o| o.levels.iter().map(|l| l.mu)).collect();
                write!(f, " μ = {}", fmt_vec(&mus))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("[{}]", parts.join(", "))
}

fn fmt_cvec(v: &[Complex64]) -> String {
    let parts: Vec<String> = v.iter().map(|z| format!("{:.6}{:+.6}i", z.re, z.im)).collect();
    format!("({})", parts.join(", "))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Operators {
    pub a: HermitianOperator,
    pub b: HermitianOperator,
    /// [b̂, â] in `b`-coordinates.
    pub commutator: CMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultivaluedAmplitude {
    pub amplitude: ComplexAmplitude,
    pub chain: SplitChain,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContextRepresentation {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class: Option<ContextClass>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub complex: Option<ComplexAmplitude>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hyperbolic: Option<HyperbolicAmplitude>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub multivalued: Option<MultivaluedAmplitude>,
    /// |(ψ_C, e_y^a)|² in the reported a-basis.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_probabilities: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepresentReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    pub branch: Branch,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub anchor: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_basis: Option<HilbertBasis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hyperbolic_anchor: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hyperbolic_a_basis: Option<GModuleBasis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub operators: Option<Operators>,
    /// Why the a-basis or operators are absent.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub contexts: Vec<ContextRepresentation>,
}

fn represent_one(
    model: &Model,
    name: &str,
    event: &Event,
    branch: Branch,
    a_basis: Option<&HilbertBasis>,
) -> ContextRepresentation {
    let s = &model.space;
    let pair = &model.pair;
    let mut out = ContextRepresentation {
        name: name.to_string(),
        class: None,
        complex: None,
        hyperbolic: None,
        multivalued: None,
        a_probabilities: None,
        error: None,
    };
    if pair.a_values().len() != 2 {
        match build_amplitude_nvalued(s, pair, event, &SplitConfig::default()) {
            Ok((amplitude, chain)) => out.multivalued = Some(MultivaluedAmplitude { amplitude, chain }),
            Err(e) => out.error = Some(e.to_string()),
        }
        return out;
    }
    match InterferenceCoefficients::compute(s, pair, event) {
        Ok(co) => out.class = Some(co.class()),
        Err(e) => {
            out.error = Some(e.to_string());
            return out;
        }
    }
    out.complex = build_amplitude(s, pair, event, branch).ok();
    out.hyperbolic = build_hyperbolic_amplitude(s, pair, event).ok();
    if let (Some(psi), Some(b)) = (&out.complex, a_basis) {
        out.a_probabilities = Some(b.vectors.iter().map(|e| inner(&psi.components, e).norm_sqr()).collect());
    }
    out
}

pub fn represent(model: &Model, context: Option<&str>, branch: Branch, anchor: Option<&str>) -> Result<RepresentReport> {
    let s = &model.space;
    let pair = &model.pair;
    let list = selected(model, context)?;
    let family = context_family(model);
    let mut notes = Vec::new();
    let dichotomous = pair.a_values().len() == 2 && pair.b_values().len() == 2;

    let anchor_event = match anchor {
        Some(name) => Some(model.context(name)?.clone()),
        None if dichotomous => default_anchor(s, pair, family.iter().map(|(_, e)| e)),
        None => None,
    };
    let mut a_basis = None;
    if let Some(e) = &anchor_event {
        match a_basis_for_context(s, pair, e, branch) {
            Ok(b) => {
                if !b.unitary {
                    notes.push(format!(
                        "a-basis is not unitary (residual {:.3e}); operators omitted",
                        b.unitarity_residual
                    ));
                }
                a_basis = Some(b);
            }
            Err(err) => notes.push(format!("no complex a-basis at the anchor: {err}")),
        }
    } else if dichotomous {
        notes.push("no trigonometric context to anchor the a-basis".into());
    }

    let operators = match a_basis.as_ref().filter(|b| b.unitary) {
        Some(basis) => {
            let a = operator_for_variable(pair.a_values(), basis)?;
            let b = operator_for_variable(pair.b_values(), &HilbertBasis::b_basis(2))?;
            let commutator = commutator(&b, &a)?;
            Some(Operators { a, b, commutator })
        }
        None => None,
    };

    // The hyperbolic basis is anchored at the given context when it is
    // hyperbolic, otherwise at the first hyperbolic context of the family.
    let mut hyperbolic_anchor = None;
    let mut hyperbolic_basis = None;
    if dichotomous {
        let is_hyp = |e: &Event| {
            InterferenceCoefficients::compute(s, pair, e).is_ok_and(|c| c.class().is_hyperbolic())
        };
        let candidate = anchor_event
            .as_ref()
            .filter(|e| is_hyp(e))
            .map(|e| (model.describe(e), e.clone()))
            .or_else(|| family.iter().find(|(_, e)| is_hyp(e)).cloned());
        if let Some((name, e)) = candidate {
            match hyperbolic_a_basis(s, pair, &e) {
                Ok(b) => {
                    hyperbolic_basis = Some(b);
                    hyperbolic_anchor = Some(name);
                }
                Err(err) => notes.push(format!("no hyperbolic a-basis at {name}: {err}")),
            }
        }
    }

    let basis_ref = a_basis.as_ref();
    let contexts = list
        .par_iter()
        .map(|(n, e)| represent_one(model, n, e, branch, basis_ref))
        .collect();
    Ok(RepresentReport {
        model: model.document.name.clone(),
        branch,
        anchor: anchor_event.as_ref().map(|e| model.describe(e)),
        a_basis,
        hyperbolic_anchor,
        hyperbolic_a_basis: hyperbolic_basis,
        operators,
        notes,
        contexts,
    })
}

impl fmt::Display for RepresentReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(m) = &self.model {
            writeln!(f, "model: {m}")?;
        }
        writeln!(f, "branch: {:?}", self.branch)?;
        if let (Some(a), Some(b)) = (&self.anchor, &self.a_basis) {
            writeln!(f, "a-basis anchored at {a} (unitary: {}):", b.unitary)?;
            for (y, v) in b.vectors.iter().enumerate() {
                writeln!(f, "  e_{} = {}", y + 1, fmt_cvec(v))?;
            }
        }
        if let Some(ops) = &self.operators {
            writeln!(f, "â = {}", fmt_matrix(&ops.a.matrix))?;
            writeln!(f, "b̂ = {}", fmt_matrix(&ops.b.matrix))?;
            writeln!(f, "[b̂, â] = {}", fmt_matrix(&ops.commutator))?;
        }
        if let (Some(a), Some(b)) = (&self.hyperbolic_anchor, &self.hyperbolic_a_basis) {
            writeln!(f, "hyperbolic a-basis anchored at {a}:")?;
            for (y, v) in b.vectors.iter().enumerate() {
                let parts: Vec<String> = v.iter().map(|z| format!("{:.6}{:+.6}j", z.x, z.y)).collect();
                writeln!(f, "  e_{} = ({})", y + 1, parts.join(", "))?;
            }
        }
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        for c in &self.contexts {
            write!(f, "{:<12}", c.name)?;
            if let Some(class) = c.class {
                write!(f, " {class:?}")?;
            }
            if let Some(psi) = &c.complex {
                write!(f, " ψ = {}", fmt_cvec(&psi.components))?;
            }
            if let Some(psi) = &c.hyperbolic {
                let parts: Vec<String> = psi.components.iter().map(|z| format!("{:.6}{:+.6}j", z.x, z.y)).collect();
                write!(f, " ψ_G = ({})", parts.join(", "))?;
            }
            if let Some(m) = &c.multivalued {
                write!(f, " ψ = {}", fmt_cvec(&m.amplitude.components))?;
            }
            if let Some(e) = &c.error {
                write!(f, " {e}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn fmt_matrix(m: &CMatrix) -> String {
    let rows: Vec<String> = m.rows().iter().map(|r| fmt_cvec(r)).collect();
    format!("[{}]", rows.join(", "))
}

/// One line of the worked-example table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReproductionRow {
    pub quantity: String,
    pub closed_form: f64,
    pub computed: f64,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KqReproduction {
    pub q: f64,
    pub gamma: f64,
    pub rows: Vec<ReproductionRow>,
    pub mismatch: DistributionMismatch,
    pub distinct_states: usize,
}

impl KqReproduction {
    pub fn ok(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    /// Re-judges every row against a single tolerance.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        for r in &mut self.rows {
            r.tolerance = tolerance;
            r.pass = r.residual <= tolerance;
        }
        self
    }
}

struct Rows(Vec<ReproductionRow>);

impl Rows {
    fn push(&mut self, quantity: impl Into<String>, closed_form: f64, computed: f64, tolerance: f64) {
        let residual = (closed_form - computed).abs();
        self.0.push(ReproductionRow {
            quantity: quantity.into(),
            closed_form,
            computed,
            residual,
            tolerance,
            pass: residual <= tolerance,
        });
    }

    fn complex(&mut self, label: &str, expect: &[Complex64], got: &[Complex64], tolerance: f64) {
        for (x, (e, g)) in expect.iter().zip(got).enumerate() {
            self.push(format!("Re {label}(b{})", x + 1), e.re, g.re, tolerance);
            self.push(format!("Im {label}(b{})", x + 1), e.im, g.im, tolerance);
        }
    }
}

/// Recomputes the four-point example by brute force and sets every quantity
/// against its closed form in q.
pub fn kq_reproduction(q: f64, gamma: f64) -> Result<KqReproduction> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::Precondition(format!("γ = {gamma} must be positive")));
    }
    let model = generate_kq(q)?.compile()?;
    let s = &model.space;
    let pair = &model.pair;
    let ctx = |n: &str| model.context(n).cloned();
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let mut rows = Rows(Vec::new());

    let r2 = (1.0 - 2.0 * q).sqrt() / 2.0;
    let sq = (q / 2.0).sqrt();
    for (name, expect) in [("C123", -r2), ("C124", sq), ("C134", r2), ("C234", -sq)] {
        let co = InterferenceCoefficients::compute(s, pair, &ctx(name)?)?;
        rows.push(format!("λ(b1 | {name})"), expect, co.lambda[0], 1e-12);
    }

    let r = ((1.0 - 2.0 * q) / 2.0).sqrt();
    let psi24 = build_amplitude(s, pair, &ctx("C24")?, Branch::Principal)?;
    rows.complex("ψ_C24", &[c(q.sqrt(), r), c(r, -q.sqrt())], &psi24.components, 1e-12);
    let psi13 = build_amplitude(s, pair, &ctx("C13")?, Branch::Conjugate)?;
    rows.complex("ψ_C13", &[c(q.sqrt(), -r), c(r, q.sqrt())], &psi13.components, 1e-12);
    for (x, b) in pair.b_partition().iter().enumerate() {
        let psi = build_amplitude(s, pair, b, Branch::Principal)?;
        let e = &HilbertBasis::b_basis(2).vectors[x];
        rows.complex(&format!("ψ_B{}", x + 1), e, &psi.components, 1e-15);
    }

    // The a-basis anchored at C13 with a conjugate phase choice.
    let basis13 = a_basis_for_context(s, pair, &ctx("C13")?, Branch::Conjugate)?;
    let (s2q, s12q) = ((2.0 * q).sqrt(), (1.0 - 2.0 * q).sqrt());
    rows.complex("e1^a", &[c(s2q, 0.0), c(s12q, 0.0)], &basis13.vectors[0], 1e-12);
    rows.complex("e2^a", &[c(0.0, -s12q), c(0.0, s2q)], &basis13.vectors[1], 1e-12);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let coords = |psi: &[Complex64]| -> Vec<Complex64> { basis13.vectors.iter().map(|e| inner(psi, e)).collect() };
    rows.complex("(ψ_C24, e^a)", &[c(h, 0.0), c(-h, 0.0)], &coords(&psi24.components), 1e-12);
    rows.complex("(ψ_C13, e^a)", &[c(h, 0.0), c(h, 0.0)], &coords(&psi13.components), 1e-12);

    // Averages of a = ±1 and b = ±1 in C234.
    let c234 = ctx("C234")?;
    let omega = a_basis_for_context(s, pair, &s.full(), Branch::Principal)?;
    let psi234 = build_amplitude(s, pair, &c234, Branch::Principal)?;
    let closed = q / (q - 1.0);
    let a_op = operator_for_variable(pair.a_values(), &omega)?;
    let b_op = operator_for_variable(pair.b_values(), &HilbertBasis::b_basis(2))?;
    rows.push("E(b | C234)", closed, pair.b().conditional_mean(s, &c234)?, 1e-10);
    rows.push("<b̂> in ψ_C234", closed, quantum_average(&b_op, &psi234.components)?, 1e-10);
    rows.push("E(a | C234)", closed, pair.a().conditional_mean(s, &c234)?, 1e-10);
    rows.push("<â> in ψ_C234", closed, quantum_average(&a_op, &psi234.components)?, 1e-10);

    // Commutator entry m_21, in the column convention of the operators.
    let m = commutator(&b_op, &a_op)?;
    let (av, bv) = (pair.a_values(), pair.b_values());
    let m12 = (av[0] - av[1]) * (bv[1] - bv[0]) * s2q * s12q;
    rows.push("[b̂, â] m_12", m12, m.get(1, 0).re, 1e-12);
    rows.push("[b̂, â] diagonal", 0.0, m.get(0, 0).norm().max(m.get(1, 1).norm()), 1e-12);

    // The sum d = γ(a + b): classically three atoms, quantum mechanically two.
    let mm = distribution_mismatch(s, pair, &c234, gamma, &omega, Branch::Principal)?;
    let pc = [q / (1.0 - q), (1.0 - 2.0 * q) / (1.0 - q), 0.0];
    for (i, (e, g)) in pc.iter().zip(&mm.classical_probabilities).enumerate() {
        rows.push(format!("P(d = {})", mm.classical_support[i]), *e, *g, 1e-12);
    }
    let z = s2q;
    let quantum = [
        (1.0 + z) * (2.0 - z) / (4.0 * (1.0 - q)),
        (1.0 - z) * (2.0 + z) / (4.0 * (1.0 - q)),
    ];
    for (i, (e, g)) in quantum.iter().zip(&mm.quantum_probabilities).enumerate() {
        rows.push(format!("P(d̂ = {:.6})", mm.quantum_support[i]), *e, *g, 1e-10);
    }
    rows.push("eigenvalue 2γ√(2q)", 2.0 * gamma * z, mm.quantum_support[1], 1e-12);
    rows.push("E(d | C234)", 2.0 * gamma * closed, mm.classical_average, 1e-10);
    rows.push("<d̂> in ψ_C234", 2.0 * gamma * closed, mm.quantum_average, 1e-10);

    let events: Vec<Event> = model.contexts.iter().map(|c| c.event.clone()).collect();
    let image = image_of_context_family(s, pair, &events, Some(&basis13))?;
    rows.push("distinct states", 10.0, image.states.len() as f64, 0.0);

    Ok(KqReproduction {
        q,
        gamma,
        distinct_states: image.states.len(),
        rows: rows.0,
        mismatch: mm,
    })
}

impl fmt::Display for KqReproduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "K(q) with q = {}, γ = {}", self.q, self.gamma)?;
        writeln!(f, "{:<22} {:>22} {:>22} {:>10}  ok", "quantity", "closed form", "computed", "residual")?;
        for r in &self.rows {
            let mut line = String::new();
            write!(
                line,
                "{:<22} {:>22.15} {:>22.15} {:>10.2e}  {}",
                r.quantity,
                r.closed_form,
                r.computed,
                r.residual,
                if r.pass { "yes" } else { "NO" }
            )?;
            writeln!(f, "{line}")?;
        }
        writeln!(
            f,
            "total variation: {:.6} on the line, {:.6} after ranking atoms",
            self.mismatch.total_variation, self.mismatch.ranked_total_variation
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::generate_random_model;
    use crate::model::RandomConstraints;

    #[test]
    fn kq_table_reproduces() {
        for q in [0.05, 0.125, 0.25, 0.4] {
            let r = kq_reproduction(q, 1.0).unwrap();
            let bad: Vec<_> = r.rows.iter().filter(|r| !r.pass).collect();
            assert!(bad.is_empty(), "q = {q}: {bad:#?}");
            assert_eq!(r.distinct_states, 10);
        }
    }

    #[test]
    fn eighth_matches_worked_numbers() {
        let r = kq_reproduction(0.125, 1.0).unwrap();
        let m = &r.mismatch;
        assert!((m.classical_probabilities[0] - 1.0 / 7.0).abs() < 1e-12);
        assert!((m.quantum_probabilities[1] - 5.0 / 14.0).abs() < 1e-12);
        assert!((m.classical_average + 2.0 / 7.0).abs() < 1e-12);
        assert!(m.ranked_total_variation > 0.2);
    }

    #[test]
    fn analyze_lists_family_in_order() {
        let m = generate_kq(0.25).unwrap().compile().unwrap();
        let r = analyze(&m, None).unwrap();
        assert_eq!(r.contexts[0].name, "C12");
        assert_eq!(r.contexts.len(), 11);
        assert!(r.double_stochastic);
        let one = analyze(&m, Some("C123")).unwrap();
        assert_eq!(one.contexts.len(), 1);
        assert_eq!(analyze(&m, Some("nope")).unwrap_err(), Error::UnknownContext("nope".into()));
    }

    #[test]
    fn represent_reports_operators() {
        let m = generate_kq(0.125).unwrap().compile().unwrap();
        let r = represent(&m, None, Branch::Principal, None).unwrap();
        assert_eq!(r.anchor.as_deref(), Some("Omega"));
        let ops = r.operators.unwrap();
        assert!((ops.commutator.get(1, 0).re + 3f64.sqrt()).abs() < 1e-12);
        let c123 = r.contexts.iter().find(|c| c.name == "C123").unwrap();
        let pa = c123.a_probabilities.as_ref().unwrap();
        assert!((pa[0] - 0.8).abs() < 1e-12);
    }

    #[test]
    fn represent_three_valued() {
        let c = RandomConstraints {
            double_stochastic: None,
            incompatible: true,
        };
        let m = generate_random_model(1, 9, [3, 3], c).unwrap().compile().unwrap();
        let r = represent(&m, Some("Omega"), Branch::Principal, None).unwrap();
        assert!(r.a_basis.is_none());
        let ctx = &r.contexts[0];
        assert!(ctx.multivalued.is_some() || ctx.error.is_some());
    }
}
