//! Brute-force verification of the identities and theorems a model must
//! satisfy, collected into a machine-readable report.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::complex::{
    a_basis_for_context, born_probability, build_amplitude, commutator, default_anchor, operator_for_variable,
    verify_average_preservation, HilbertBasis,
};
use crate::error::Error;
use crate::hyperbolic::{build_hyperbolic_amplitude, hyperbolic_a_basis, hyperbolic_interference_transform};
use crate::hypernum::{exp_j, polar, HyperbolicNumber};
use crate::interference::{
    assign_phases, reconstruct_probability, verify_no_global_alpha, Branch, ContextClass, InterferenceCoefficients,
    OutcomeClass, Projection,
};
use crate::model::Model;
use crate::multivalued::{all_split_orders, build_amplitude_nvalued, contextual_total_probability_split, mu_split, SplitConfig};
use crate::prob::{
    are_incompatible, check_incompatibility_structure, classical_total_probability, dispersion, is_double_stochastic,
    symmetry_report, transition_matrix, Event, Orientation,
};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub id: String,
    pub status: Status,
    /// Largest deviation observed, for residual-based checks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Where the worst residual or the violation occurred.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    /// Why the check was skipped.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    /// Number of cases evaluated.
    pub cases: usize,
}

impl Check {
    fn skip(id: &str, reason: impl Into<String>) -> Check {
        Check {
            id: id.into(),
            status: Status::Skip,
            residual: None,
            tolerance: None,
            witness: None,
            reason: Some(reason.into()),
            cases: 0,
        }
    }

    fn predicate(id: &str, ok: bool, witness: Option<String>, cases: usize) -> Check {
        Check {
            id: id.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            residual: None,
            tolerance: None,
            witness,
            reason: None,
            cases,
        }
    }
}

/// Tracks the worst residual over a family of cases.
struct Worst {
    residual: f64,
    witness: Option<String>,
    cases: usize,
    /// A case that failed outright (an unexpected error).
    broken: Option<String>,
}

impl Worst {
    fn new() -> Self {
        Worst {
            residual: 0.0,
            witness: None,
            cases: 0,
            broken: None,
        }
    }

    fn record(&mut self, r: f64, label: impl FnOnce() -> String) {
        self.cases += 1;
        if r > self.residual || r.is_nan() {
            self.residual = r;
            self.witness = Some(label());
        }
    }

    fn broken(&mut self, label: String) {
        self.cases += 1;
        self.broken.get_or_insert(label);
    }

    fn finish(self, id: &str, tolerance: f64, empty_reason: &str) -> Check {
        if self.cases == 0 {
            return Check::skip(id, empty_reason);
        }
        let ok = self.broken.is_none() && self.residual <= tolerance;
        Check {
            id: id.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            residual: Some(self.residual),
            tolerance: Some(tolerance),
            witness: self.broken.or(self.witness),
            reason: None,
            cases: self.cases,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Core,
    Complex,
    Hyperbolic,
    Multivalued,
    All,
}

impl Suite {
    fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "core" => Ok(Suite::Core),
            "complex" => Ok(Suite::Complex),
            "hyperbolic" => Ok(Suite::Hyperbolic),
            "multivalued" => Ok(Suite::Multivalued),
            "all" => Ok(Suite::All),
            _ => Err(format!("unknown suite `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct VerifyOptions {
    /// Replaces every per-check default tolerance when set.
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    pub suite: Suite,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    /// No check failed. Skipped checks carry their reasons and do not count as failures.
    pub fn ok(&self) -> bool {
        self.failed == 0
    }

    pub fn check(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(m) = &self.model {
            writeln!(f, "model: {m}")?;
        }
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skip => "SKIP",
            };
            write!(f, "{tag}  {:<40}", c.id)?;
            if let (Some(r), Some(t)) = (c.residual, c.tolerance) {
                write!(f, " residual {r:.3e} (tol {t:.0e})")?;
            }
            if let Some(w) = &c.witness {
                write!(f, " at {w}")?;
            }
            if let Some(r) = &c.reason {
                write!(f, " ({r})")?;
            }
            writeln!(f)?;
        }
        writeln!(f, "{} passed, {} failed, {} skipped", self.passed, self.failed, self.skipped)
    }
}

/// One context of the verification family with its coefficients, if defined.
struct Ctx {
    name: String,
    event: Event,
    coeffs: Option<InterferenceCoefficients>,
}

/// Declared contexts, Ω and every partition cell, without repeats.
pub fn context_family(model: &Model) -> Vec<(String, Event)> {
    let mut out: Vec<(String, Event)> = model.contexts.iter().map(|c| (c.name.clone(), c.event.clone())).collect();
    let pair = &model.pair;
    let mut extra = vec![("Omega".to_string(), model.space.full())];
    for (v, e) in pair.a_values().iter().zip(pair.a_partition()) {
        extra.push((format!("{}={v}", pair.a().name()), e.clone()));
    }
    for (v, e) in pair.b_values().iter().zip(pair.b_partition()) {
        extra.push((format!("{}={v}", pair.b().name()), e.clone()));
    }
    for (name, e) in extra {
        if !out.iter().any(|(_, f)| *f == e) {
            out.push((name, e));
        }
    }
    out
}

struct Verifier<'m> {
    model: &'m Model,
    ctxs: Vec<Ctx>,
    opts: VerifyOptions,
    checks: Vec<Check>,
    dichotomous_a: bool,
    dichotomous_b: bool,
    ds: bool,
}

const NEEDS_A2: &str = "reference variable a is not dichotomous";
const NEEDS_22: &str = "both reference variables must be dichotomous";

impl<'m> Verifier<'m> {
    fn tol(&self, default: f64) -> f64 {
        self.opts.tolerance.unwrap_or(default)
    }

    fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    fn trig(&self) -> impl Iterator<Item = (&Ctx, &InterferenceCoefficients)> {
        self.ctxs
            .iter()
            .filter_map(|c| c.coeffs.as_ref().map(|co| (c, co)))
            .filter(|(_, co)| co.class().is_trigonometric())
    }

    fn hyp(&self) -> impl Iterator<Item = (&Ctx, &InterferenceCoefficients)> {
        self.ctxs
            .iter()
            .filter_map(|c| c.coeffs.as_ref().map(|co| (c, co)))
            .filter(|(_, co)| co.class().is_hyperbolic())
    }

    // ---- core ----

    fn core(&mut self) {
        let s = &self.model.space;
        let pair = &self.model.pair;

        let total: f64 = s.weights().iter().sum();
        let mut w = Worst::new();
        w.record((total - 1.0).abs(), || "Σ weights".into());
        self.push(w.finish("core.weights_normalized", self.tol(tol::IDENTITY), ""));

        let mut events: Vec<(String, Event)> = self.ctxs.iter().map(|c| (c.name.clone(), c.event.clone())).collect();
        for (a, b) in pair.a_partition().iter().cartesian_product(pair.b_partition()) {
            events.push(("cell".into(), a.intersection(b)));
        }
        let mut range = Worst::new();
        let mut bayes = Worst::new();
        for (cn, c) in self.ctxs.iter().map(|c| (&c.name, &c.event)) {
            let pc = s.probability(c);
            for (bn, b) in &events {
                let Ok(p) = s.conditional(b, c) else {
                    bayes.broken(format!("P({bn} | {cn})"));
                    continue;
                };
                range.record(if p < 0.0 { -p } else { (p - 1.0).max(0.0) }, || format!("P({bn} | {cn})"));
                bayes.record((p * pc - s.probability(&b.intersection(c))).abs(), || format!("P({bn} | {cn})"));
            }
        }
        self.push(range.finish("core.probability_range", self.tol(tol::IDENTITY), "no contexts"));
        self.push(bayes.finish("core.bayes_consistency", self.tol(tol::IDENTITY), "no contexts"));

        let mut total_prob = Worst::new();
        let mut closure = Worst::new();
        for c in &self.ctxs {
            let sum_a: f64 = pair.a_distribution(s, &c.event).map(|v| v.iter().sum()).unwrap_or(f64::NAN);
            let sum_b: f64 = pair.b_distribution(s, &c.event).map(|v| v.iter().sum()).unwrap_or(f64::NAN);
            closure.record((sum_a - 1.0).abs().max((sum_b - 1.0).abs()), || c.name.clone());
            if let Ok(classical) = classical_total_probability(s, pair, &c.event) {
                let direct = pair.b_distribution(s, &c.event).unwrap_or_default();
                let r = classical.iter().zip(&direct).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
                total_prob.record(r, || c.name.clone());
            }
        }
        self.push(total_prob.finish(
            "core.total_probability",
            self.tol(tol::IDENTITY),
            "no a-nondegenerate context",
        ));
        self.push(closure.finish("core.partition_closure", self.tol(tol::IDENTITY), "no contexts"));

        let inc = check_incompatibility_structure(pair);
        let witness = (!inc.implication_holds).then(|| format!("{inc:?}"));
        self.push(Check::predicate("core.incompatibility_structure", inc.implication_holds, witness, 1));

        if self.dichotomous_a && self.dichotomous_b {
            match symmetry_report(s, pair) {
                Ok(r) => {
                    let w = (!r.consistent()).then(|| format!("{r:?}"));
                    self.push(Check::predicate("core.symmetric_conditioning", r.consistent(), w, 1));
                }
                Err(e) => self.push(Check::skip("core.symmetric_conditioning", e.to_string())),
            }
        } else {
            self.push(Check::skip("core.symmetric_conditioning", NEEDS_22));
        }

        // Atoms are dispersion free and cannot be represented by a state.
        let mut disp = Worst::new();
        let mut rejected = true;
        let mut witness = None;
        for i in 0..s.len() {
            let atom = s.atom(i);
            for v in self.model.variables.values() {
                let d = dispersion(s, v, &atom).unwrap_or(f64::NAN);
                disp.record(d.abs(), || format!("{} on {{{}}}", v.name(), s.ids()[i]));
            }
            if self.dichotomous_a {
                let r = build_amplitude(s, pair, &atom, Branch::Principal);
                if !matches!(r, Err(Error::DegenerateContext { .. })) {
                    rejected = false;
                    witness.get_or_insert(s.ids()[i].clone());
                }
            }
        }
        let mut c = disp.finish("core.dispersion_free", self.tol(tol::IDENTITY), "no points");
        if !rejected {
            c.status = Status::Fail;
            c.witness = witness.map(|w| format!("atom {w} produced a state"));
        }
        self.push(c);
    }

    // ---- interference ----

    fn interference(&mut self) {
        let s = &self.model.space;
        let pair = &self.model.pair;
        let kb = pair.b_values().len();

        let mut dsum = Worst::new();
        for c in &self.ctxs {
            if pair.require_a_nondegenerate(s, &c.event).is_err() {
                continue;
            }
            let total: Result<f64, _> = (0..kb).map(|x| crate::interference::delta(s, pair, &c.event, x)).sum();
            match total {
                Ok(t) => dsum.record(t.abs(), || c.name.clone()),
                Err(e) => dsum.broken(format!("{}: {e}", c.name)),
            }
        }
        self.push(dsum.finish(
            "interference.delta_sum",
            self.tol(tol::PREDICATE),
            "no a-nondegenerate context",
        ));

        if !self.dichotomous_a {
            for id in [
                "interference.cd2",
                "interference.classification",
                "interference.reconstruction",
                "interference.phase_k_relation",
                "interference.phase_switch",
                "interference.hyperbolic_lambda_balance",
            ] {
                self.push(Check::skip(id, NEEDS_A2));
            }
            return;
        }

        let mut cd2 = Worst::new();
        let mut class_ok = true;
        let mut class_w = None;
        let mut classified = 0;
        let mut recon = Worst::new();
        for c in &self.ctxs {
            let Some(co) = &c.coeffs else { continue };
            let r: f64 = (0..kb).map(|x| co.lambda[x] * co.cross_root(x)).sum();
            cd2.record(r.abs(), || c.name.clone());

            // Exactly one class, consistent with the per-outcome tags.
            classified += 1;
            let boundary = |l: f64| (l.abs() - 1.0).abs() <= tol::BOUNDARY;
            let all_le = co.lambda.iter().all(|&l| l.abs() < 1.0 || boundary(l));
            let all_ge = co.lambda.iter().all(|&l| l.abs() > 1.0 || boundary(l));
            let expected = match (all_le, all_ge) {
                (true, true) => ContextClass::Boundary,
                (true, false) => ContextClass::Trigonometric,
                (false, true) => ContextClass::Hyperbolic,
                (false, false) => ContextClass::Mixed,
            };
            if co.class() != expected {
                class_ok = false;
                class_w.get_or_insert(c.name.clone());
            }

            let direct = &co.b_distribution;
            let mut projections = Vec::new();
            if co.class().is_trigonometric() {
                projections.push((Projection::Trigonometric, Branch::Principal));
                projections.push((Projection::Trigonometric, Branch::Conjugate));
            }
            if co.class().is_hyperbolic() {
                projections.push((Projection::Hyperbolic, Branch::Principal));
            }
            for (proj, br) in projections {
                match assign_phases(co, proj, br).and_then(|ph| reconstruct_probability(s, pair, &c.event, &ph)) {
                    Ok(p) => {
                        let r = p.iter().zip(direct).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
                        recon.record(r, || format!("{} ({proj:?}, {br:?})", c.name));
                    }
                    Err(e) => recon.broken(format!("{}: {e}", c.name)),
                }
            }
        }
        self.push(cd2.finish("interference.cd2", self.tol(tol::PREDICATE), "no nondegenerate context"));
        self.push(Check::predicate("interference.classification", class_ok, class_w, classified));
        self.push(recon.finish(
            "interference.reconstruction",
            self.tol(tol::PREDICATE),
            "no representable context",
        ));

        if kb != 2 {
            for id in ["interference.phase_k_relation", "interference.phase_switch", "interference.hyperbolic_lambda_balance"] {
                self.push(Check::skip(id, NEEDS_22));
            }
            return;
        }
        let k = transition_matrix(s, pair, Orientation::BGivenA)
            .ok()
            .and_then(|m| crate::interference::k_coefficient(&m).ok());
        let mut t = Worst::new();
        let mut sw = Worst::new();
        for (c, co) in self.trig() {
            let Ok(ph) = assign_phases(co, Projection::Trigonometric, Branch::Principal) else {
                t.broken(c.name.clone());
                continue;
            };
            let (c1, c2) = (ph.theta[0].cos(), ph.theta[1].cos());
            if let Some(k) = k {
                t.record((c2 + k * c1).abs(), || c.name.clone());
            }
            if self.ds {
                sw.record((c2 + c1).abs(), || c.name.clone());
            }
        }
        self.push(t.finish("interference.phase_k_relation", self.tol(tol::PREDICATE), "no trigonometric context"));
        if self.ds {
            self.push(sw.finish("interference.phase_switch", self.tol(tol::PREDICATE), "no trigonometric context"));
        } else {
            self.push(Check::skip("interference.phase_switch", "transition matrix is not double stochastic"));
        }
        if self.ds {
            let mut ka = Worst::new();
            for (c, co) in self.hyp() {
                ka.record((co.lambda[0].abs() - co.lambda[1].abs()).abs(), || c.name.clone());
            }
            self.push(ka.finish("interference.hyperbolic_lambda_balance", self.tol(tol::PREDICATE), "no hyperbolic context"));
        } else {
            self.push(Check::skip("interference.hyperbolic_lambda_balance", "transition matrix is not double stochastic"));
        }
    }

    // ---- complex ----

    fn complex(&mut self) {
        let s = &self.model.space;
        let pair = &self.model.pair;
        let ids = [
            "complex.born_b",
            "complex.normalization",
            "complex.conjugation",
            "complex.born_a",
            "complex.global_alpha",
            "complex.spectral",
            "complex.average_preservation",
            "complex.noncommutativity",
            "complex.b_cells_trigonometric",
        ];
        if !self.dichotomous_a {
            for id in ids {
                self.push(Check::skip(id, NEEDS_A2));
            }
            return;
        }
        let mut born = Worst::new();
        let mut norm = Worst::new();
        let mut conj = Worst::new();
        for (c, co) in self.trig() {
            let p = build_amplitude(s, pair, &c.event, Branch::Principal);
            let q = build_amplitude(s, pair, &c.event, Branch::Conjugate);
            let (Ok(p), Ok(q)) = (p, q) else {
                born.broken(c.name.clone());
                continue;
            };
            for psi in [&p, &q] {
                let r = psi
                    .probabilities()
                    .iter()
                    .zip(&co.b_distribution)
                    .map(|(u, v)| (u - v).abs())
                    .fold(0.0, f64::max);
                born.record(r, || c.name.clone());
                norm.record((psi.norm_sq() - 1.0).abs(), || c.name.clone());
            }
            conj.record(crate::linalg::max_abs_diff(&p.conj().components, &q.components), || {
                c.name.clone()
            });
        }
        let none = "no trigonometric context";
        self.push(born.finish("complex.born_b", self.tol(tol::BORN), none));
        self.push(norm.finish("complex.normalization", self.tol(tol::BORN), none));
        self.push(conj.finish("complex.conjugation", self.tol(tol::BORN), none));

        if !self.dichotomous_b {
            for id in &ids[3..] {
                self.push(Check::skip(id, NEEDS_22));
            }
            return;
        }

        // Born rule in the a-basis: holds under double stochasticity; otherwise
        // the absence of a common phase shift is what must be reported.
        let events: Vec<Event> = self.ctxs.iter().map(|c| c.event.clone()).collect();
        let anchor = default_anchor(s, pair, &events);
        let basis = anchor
            .as_ref()
            .and_then(|a| a_basis_for_context(s, pair, a, Branch::Principal).ok());
        let alpha = verify_no_global_alpha(s, pair, &events);
        if self.ds {
            let mut w = Worst::new();
            match &basis {
                Some(b) if b.unitary => {
                    for (c, co) in self.trig() {
                        let Ok(psi) = build_amplitude(s, pair, &c.event, Branch::Principal) else {
                            continue;
                        };
                        for y in 0..2 {
                            let r = (born_probability(&psi.components, &b.vectors[y]) - co.a_distribution[y]).abs();
                            w.record(r, || c.name.clone());
                        }
                    }
                    self.push(w.finish("complex.born_a", self.tol(tol::BORN), none));
                }
                Some(b) => self.push(Check::predicate(
                    "complex.born_a",
                    false,
                    Some(format!("a-basis residual {:.3e}", b.unitarity_residual)),
                    1,
                )),
                None => self.push(Check::skip("complex.born_a", "no trigonometric anchor context")),
            }
        } else {
            match &alpha {
                Ok(r) if r.distinct_lambda_pair.is_some() => {
                    let (i, j) = r.distinct_lambda_pair.unwrap();
                    let w = format!("{} vs {}", self.ctxs[i].name, self.ctxs[j].name);
                    self.push(Check::predicate("complex.born_a", r.alpha.is_none(), Some(w), 1));
                }
                Ok(_) => self.push(Check::skip(
                    "complex.born_a",
                    "not double stochastic and no two trigonometric contexts with distinct |λ|",
                )),
                Err(e) => self.push(Check::skip("complex.born_a", e.to_string())),
            }
        }

        match &alpha {
            Ok(r) => {
                let mut ok = r.distinct_lambda_forces_double_stochastic && r.nonzero_delta_excludes_alpha;
                let trig_used = events.len() - r.skipped.len();
                if r.double_stochastic && trig_used > 0 {
                    ok &= r.alpha.is_some_and(|a| (a - std::f64::consts::PI).abs() <= tol::PHASE_CHECK);
                }
                let w = match (r.alpha, r.witness) {
                    (Some(a), _) => Some(format!("α = {a}")),
                    (None, Some((i, j))) => Some(format!("no α: {} vs {}", self.ctxs[i].name, self.ctxs[j].name)),
                    (None, None) => None,
                };
                self.push(Check::predicate("complex.global_alpha", ok, w, trig_used));
            }
            Err(e) => self.push(Check::skip("complex.global_alpha", e.to_string())),
        }

        // Operators.
        let b_basis = HilbertBasis::b_basis(2);
        let unitary = basis.as_ref().filter(|b| b.unitary);
        let mut spec = Worst::new();
        let eig = |vals: &[f64], basis: &HilbertBasis, label: &str, w: &mut Worst| match operator_for_variable(vals, basis)
            .ok()
            .and_then(|op| op.matrix.eigh2())
        {
            Some((ev, _)) => {
                let mut expect = vals.to_vec();
                expect.sort_by(f64::total_cmp);
                let r = ev.iter().zip(&expect).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
                w.record(r, || label.to_string());
            }
            None => w.broken(label.to_string()),
        };
        eig(pair.b_values(), &b_basis, pair.b().name(), &mut spec);
        if let Some(ab) = unitary {
            eig(pair.a_values(), ab, pair.a().name(), &mut spec);
        }
        let mut check = spec.finish("complex.spectral", self.tol(tol::BORN), "");
        if unitary.is_none() {
            check.reason = Some("a-basis unavailable or not unitary; only b checked".into());
        }
        self.push(check);

        let Some(ab) = unitary else {
            for id in ["complex.average_preservation", "complex.noncommutativity"] {
                self.push(Check::skip(id, "no unitary a-basis (transition matrix not double stochastic)"));
            }
            self.b_cells_check();
            return;
        };

        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut avg = Worst::new();
        let mut representable: Vec<&Ctx> = self.trig().map(|(c, _)| c).collect();
        for c in &self.ctxs {
            if pair.a_cell_index(&c.event).is_some() && !representable.iter().any(|r| r.event == c.event) {
                representable.push(c);
            }
        }
        for _ in 0..4 {
            let f: Vec<f64> = (0..2).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let g: Vec<f64> = (0..2).map(|_| rng.gen_range(-3.0..3.0)).collect();
            for c in &representable {
                match verify_average_preservation(s, pair, &c.event, &f, &g, ab, Branch::Principal) {
                    Ok(r) => avg.record(r.residual, || c.name.clone()),
                    Err(e) => avg.broken(format!("{}: {e}", c.name)),
                }
            }
        }
        self.push(avg.finish("complex.average_preservation", self.tol(1e-9), "no representable context"));

        if are_incompatible(s, pair) {
            let a_op = operator_for_variable(pair.a_values(), ab);
            let b_op = operator_for_variable(pair.b_values(), &b_basis);
            let m = transition_matrix(s, pair, Orientation::BGivenA);
            match (a_op, b_op, m) {
                (Ok(a), Ok(b), Ok(m)) => {
                    let comm = commutator(&b, &a).map(|c| c.max_abs()).unwrap_or(f64::NAN);
                    let (av, bv) = (pair.a_values(), pair.b_values());
                    let bound = (av[0] - av[1]).abs()
                        * (bv[0] - bv[1]).abs()
                        * m.get(0, 0).sqrt()
                        * m.get(0, 1).sqrt();
                    let mut w = Worst::new();
                    w.record((comm - bound).abs(), || format!("max |[b̂, â]| = {comm}, closed form {bound}"));
                    let mut c = w.finish("complex.noncommutativity", self.tol(tol::IDENTITY), "");
                    if comm.is_nan() || comm <= 0.0 {
                        c.status = Status::Fail;
                    }
                    self.push(c);
                }
                _ => self.push(Check::skip("complex.noncommutativity", "operators unavailable")),
            }
        } else {
            self.push(Check::skip("complex.noncommutativity", "reference variables are not incompatible"));
        }
        self.b_cells_check();
    }

    /// B_1, B_2 trigonometric ⇔ P^{a/b} double stochastic, given P^{b/a} double stochastic.
    fn b_cells_check(&mut self) {
        let s = &self.model.space;
        let pair = &self.model.pair;
        if !self.ds {
            self.push(Check::skip("complex.b_cells_trigonometric", "transition matrix is not double stochastic"));
            return;
        }
        let coeffs: Vec<_> = pair
            .b_partition()
            .iter()
            .map(|b| InterferenceCoefficients::compute(s, pair, b))
            .collect();
        let Ok(coeffs) = coeffs.into_iter().collect::<Result<Vec<_>, _>>() else {
            self.push(Check::skip("complex.b_cells_trigonometric", "a b-cell is a-degenerate"));
            return;
        };
        let ab_ds = transition_matrix(s, pair, Orientation::AGivenB)
            .map(|m| is_double_stochastic(&m))
            .unwrap_or(false);
        let both_trig = coeffs.iter().all(|c| c.class().is_trigonometric());
        let mut ok = both_trig == ab_ds;
        let mut residual = 0.0f64;
        if both_trig {
            for (i, c) in coeffs.iter().enumerate() {
                residual = residual.max((c.lambda[i] - 1.0).abs()).max((c.lambda[1 - i] + 1.0).abs());
            }
            ok &= residual <= self.tol(tol::PREDICATE);
        }
        let w = format!("B cells trigonometric: {both_trig}, P^(a/b) double stochastic: {ab_ds}");
        let mut c = Check::predicate("complex.b_cells_trigonometric", ok, Some(w), 2);
        if both_trig {
            c.residual = Some(residual);
            c.tolerance = Some(self.tol(tol::PREDICATE));
        }
        self.push(c);
    }

    // ---- hyperbolic ----

    fn hyperbolic(&mut self) {
        self.algebra();
        let s = &self.model.space;
        let pair = &self.model.pair;
        let ids = [
            "hyperbolic.born_b",
            "hyperbolic.epsilon_sum",
            "hyperbolic.equal_rapidities",
            "hyperbolic.g_unitarity",
            "hyperbolic.transform_sum",
            "hyperbolic.basic_contexts",
        ];
        if !(self.dichotomous_a && self.dichotomous_b) {
            for id in ids {
                self.push(Check::skip(id, NEEDS_22));
            }
            return;
        }
        let none = "no hyperbolic context";
        let mut born = Worst::new();
        let mut eps_ok = true;
        let mut eps_w = None;
        let mut eps_n = 0;
        let mut cosh = Worst::new();
        let mut unit_ok = true;
        let mut unit_w = None;
        let mut unit_n = 0;
        let mut transform = Worst::new();
        let m = transition_matrix(s, pair, Orientation::BGivenA).ok();
        for (c, co) in self.hyp() {
            let psi = match build_hyperbolic_amplitude(s, pair, &c.event) {
                Ok(p) => p,
                Err(e) => {
                    born.broken(format!("{}: {e}", c.name));
                    continue;
                }
            };
            let r = psi
                .probabilities()
                .iter()
                .zip(&co.b_distribution)
                .map(|(u, v)| (u - v).abs())
                .fold(0.0, f64::max);
            born.record(r, || c.name.clone());
            eps_n += 1;
            if psi.epsilon.iter().map(|&e| i32::from(e)).sum::<i32>() != 0 {
                eps_ok = false;
                eps_w.get_or_insert(c.name.clone());
            }
            if self.ds {
                cosh.record((psi.theta[0].cosh() - psi.theta[1].cosh()).abs(), || c.name.clone());
            }

            // G-unitarity of the anchored basis ⇔ double stochastic with equal rapidities.
            unit_n += 1;
            let equal = (psi.theta[0] - psi.theta[1]).abs() <= tol::PHASE_CHECK;
            let unitary = hyperbolic_a_basis(s, pair, &c.event).is_ok();
            if unitary != (self.ds && equal) {
                unit_ok = false;
                unit_w.get_or_insert(format!("{}: unitary {unitary}", c.name));
            }

            if let (true, Some(m)) = (self.ds, &m) {
                let pa = [co.a_distribution[0], co.a_distribution[1]];
                match hyperbolic_interference_transform(pa, m, psi.theta[0], psi.epsilon[0]) {
                    Ok(p) => {
                        let r = (p[0] + p[1] - 1.0)
                            .abs()
                            .max((p[0] - co.b_distribution[0]).abs())
                            .max((p[1] - co.b_distribution[1]).abs());
                        transform.record(r, || c.name.clone());
                    }
                    Err(e) => transform.broken(format!("{}: {e}", c.name)),
                }
            }
        }
        self.push(born.finish("hyperbolic.born_b", self.tol(tol::BORN), none));
        if eps_n == 0 {
            self.push(Check::skip("hyperbolic.epsilon_sum", none));
            self.push(Check::skip("hyperbolic.g_unitarity", none));
        } else {
            self.push(Check::predicate("hyperbolic.epsilon_sum", eps_ok, eps_w, eps_n));
            self.push(Check::predicate("hyperbolic.g_unitarity", unit_ok, unit_w, unit_n));
        }
        if self.ds {
            self.push(cosh.finish("hyperbolic.equal_rapidities", self.tol(tol::PREDICATE), none));
            self.push(transform.finish("hyperbolic.transform_sum", self.tol(tol::PREDICATE), none));
        } else {
            let why = "transition matrix is not double stochastic";
            self.push(Check::skip("hyperbolic.equal_rapidities", why));
            self.push(Check::skip("hyperbolic.transform_sum", why));
        }
        self.basic_contexts();
    }

    /// λ(b_other | B_x) ≤ −1 always; B_x hyperbolic under double stochasticity;
    /// B_x also trigonometric iff P^{a/b} is double stochastic as well.
    fn basic_contexts(&mut self) {
        let s = &self.model.space;
        let pair = &self.model.pair;
        let ab_ds = transition_matrix(s, pair, Orientation::AGivenB)
            .map(|m| is_double_stochastic(&m))
            .unwrap_or(false);
        let mut ok = true;
        let mut witness = None;
        let mut n = 0;
        for (x, b) in pair.b_partition().iter().enumerate() {
            let Ok(co) = InterferenceCoefficients::compute(s, pair, b) else {
                continue;
            };
            n += 1;
            let other = co.lambda[1 - x];
            let mut fail = |msg: String| {
                ok = false;
                witness.get_or_insert(msg);
            };
            if other > -1.0 + tol::BOUNDARY {
                fail(format!("λ(b_{} | B_{}) = {other}", 2 - x, x + 1));
            }
            if self.ds {
                if !co.class().is_hyperbolic() {
                    fail(format!("B_{} is {:?}", x + 1, co.class()));
                }
                if (co.class() == ContextClass::Boundary) != ab_ds {
                    fail(format!("B_{} class {:?} with P^(a/b) double stochastic {ab_ds}", x + 1, co.class()));
                }
                let own_tag = co.tags[x];
                if ab_ds && own_tag != OutcomeClass::Boundary {
                    fail(format!("λ(b_{} | B_{}) = {}", x + 1, x + 1, co.lambda[x]));
                }
            }
        }
        if n == 0 {
            self.push(Check::skip("hyperbolic.basic_contexts", "b-cells are a-degenerate"));
        } else {
            self.push(Check::predicate("hyperbolic.basic_contexts", ok, witness, n));
        }
    }

    /// Ring laws, multiplicativity of the norm, and cone closure on seeded pairs.
    fn algebra(&mut self) {
        let mut rng = ChaCha8Rng::seed_from_u64(0xa16e);
        let mut w = Worst::new();
        let mut cone_ok = true;
        let mut cone_w = None;
        let h = |r: &mut ChaCha8Rng| HyperbolicNumber::new(r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0));
        for i in 0..1000 {
            let (a, b, c) = (h(&mut rng), h(&mut rng), h(&mut rng));
            let scale = 1.0 + [a, b, c].iter().map(|z| z.max_abs_component()).fold(0.0, f64::max).powi(3);
            let label = || format!("sample {i}");
            w.record(((a * b) * c - a * (b * c)).max_abs_component() / scale, label);
            w.record((a * (b + c) - (a * b + a * c)).max_abs_component() / scale, label);
            w.record((a * b - b * a).max_abs_component() / scale, label);
            w.record(((a * b).norm_sq() - a.norm_sq() * b.norm_sq()).abs() / scale, label);
            if a.is_nonnegative() && b.is_nonnegative() && !(a * b).norm_sq().ge(&(-1e-12 * scale)) {
                cone_ok = false;
                cone_w.get_or_insert(label());
            }
            if a.is_positive() {
                let inv = a.inverse().unwrap_or_default();
                if !inv.is_positive() {
                    cone_ok = false;
                    cone_w.get_or_insert(label());
                }
                w.record((a * inv - HyperbolicNumber::ONE).max_abs_component(), label);
                if let Ok(p) = polar(a) {
                    let back = p.to_number().unwrap_or_default();
                    w.record((back - a).max_abs_component() / (1.0 + a.max_abs_component()), label);
                }
            }
            let (t, u) = (rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
            if let (Ok(et), Ok(eu), Ok(etu)) = (exp_j(t), exp_j(u), exp_j(t + u)) {
                w.record((et * eu - etu).max_abs_component() / etu.max_abs_component(), label);
            }
        }
        let mut c = w.finish("hyperbolic.algebra", self.tol(tol::PREDICATE), "");
        if !cone_ok {
            c.status = Status::Fail;
            c.witness = cone_w;
        }
        self.push(c);
    }

    // ---- multivalued ----

    fn multivalued(&mut self) {
        let s = &self.model.space;
        let pair = &self.model.pair;
        let cells = pair.a_partition();

        let mut ident = Worst::new();
        for c in &self.ctxs {
            for (x, b) in pair.b_partition().iter().enumerate() {
                for (i, j) in (0..cells.len()).tuple_combinations() {
                    if let Ok(r) = contextual_total_probability_split(s, b, &cells[i], &cells[j], &c.event) {
                        ident.record(r.residual, || format!("{} x={x} D=({i},{j})", c.name));
                    }
                }
                for i in 0..cells.len() {
                    let rest = cells
                        .iter()
                        .enumerate()
                        .filter(|(k, _)| *k != i)
                        .fold(s.empty(), |acc, (_, e)| acc.union(e));
                    if let Ok(r) = mu_split(s, b, &cells[i], &rest, &c.event) {
                        ident.record(r.residual, || format!("{} x={x} D1={i}", c.name));
                    }
                }
            }
        }
        self.push(ident.finish(
            "multivalued.split_identities",
            self.tol(tol::IDENTITY),
            "no admissible event tuple",
        ));

        let mut level = Worst::new();
        let mut order = Worst::new();
        let mut unrepresentable = 0;
        for c in &self.ctxs {
            if pair.require_a_nondegenerate(s, &c.event).is_err() {
                continue;
            }
            match build_amplitude_nvalued(s, pair, &c.event, &SplitConfig::default()) {
                Ok((_, chain)) => level.record(chain.level_residual(), || c.name.clone()),
                Err(Error::SplitOutOfRange { .. }) => {}
                Err(Error::DegenerateCell(_)) => continue,
                Err(e) => level.broken(format!("{}: {e}", c.name)),
            }
            let Ok(outcomes) = all_split_orders(s, pair, &c.event) else { continue };
            for o in outcomes {
                match o.born_residual {
                    Some(r) => order.record(r, || format!("{} order {:?}", c.name, o.order)),
                    None => unrepresentable += 1,
                }
            }
        }
        let none = "no context is representable by the split recursion";
        self.push(level.finish("multivalued.level_born", self.tol(1e-9), none));
        let mut c = order.finish("multivalued.order_invariance", self.tol(1e-9), none);
        if unrepresentable > 0 && c.status != Status::Skip {
            c.reason = Some(format!("{unrepresentable} (context, order) pairs had |μ| > 1"));
        }
        self.push(c);
    }
}

pub fn verify_model(model: &Model, suite: Suite, opts: VerifyOptions) -> VerificationReport {
    let s = &model.space;
    let pair = &model.pair;
    let ctxs = context_family(model)
        .into_iter()
        .map(|(name, event)| Ctx {
            coeffs: InterferenceCoefficients::compute(s, pair, &event).ok(),
            name,
            event,
        })
        .collect();
    let ds = transition_matrix(s, pair, Orientation::BGivenA)
        .map(|m| is_double_stochastic(&m))
        .unwrap_or(false);
    let mut v = Verifier {
        model,
        ctxs,
        opts,
        checks: Vec::new(),
        dichotomous_a: pair.a_values().len() == 2,
        dichotomous_b: pair.b_values().len() == 2,
        ds,
    };
    if suite.includes(Suite::Core) {
        v.core();
        v.interference();
    }
    if suite.includes(Suite::Complex) {
        v.complex();
    }
    if suite.includes(Suite::Hyperbolic) {
        v.hyperbolic();
    }
    if suite.includes(Suite::Multivalued) {
        v.multivalued();
    }
    let count = |st| v.checks.iter().filter(|c| c.status == st).count();
    VerificationReport {
        model: model.document.name.clone(),
        suite,
        passed: count(Status::Pass),
        failed: count(Status::Fail),
        skipped: count(Status::Skip),
        checks: v.checks,
    }
}
