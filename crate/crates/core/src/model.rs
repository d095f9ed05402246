//! Model documents: the JSON exchange format, its loader, and generators for
//! the worked four-point family and for seeded random models.

use std::collections::HashMap;
use std::path::Path;

use indexmap::IndexMap;
use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::canonical::to_canonical_string;
use crate::error::{Error, Result};
use crate::prob::{is_double_stochastic, transition_matrix, Event, FiniteKolmogorovSpace, Orientation, RandomVariable, ReferencePair};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSpec {
    pub id: String,
    pub p: f64,
}

/// Names the two reference variables among the declared ones.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    pub a: String,
    pub b: String,
}

/// The parsed JSON model, before any probability is computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub points: Vec<PointSpec>,
    pub variables: IndexMap<String, IndexMap<String, f64>>,
    #[serde(default)]
    pub contexts: IndexMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<PairSpec>,
}

impl ModelDocument {
    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Validation(format!("malformed model JSON: {e}")))
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Validation(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    /// Canonical text: sorted keys, 17 significant digits, explicit pair.
    pub fn to_canonical_json(&self) -> String {
        let mut doc = self.clone();
        if doc.pair.is_none() {
            doc.pair = doc.resolve_pair().ok();
        }
        to_canonical_string(&doc).expect("model documents contain only finite numbers")
    }

    fn resolve_pair(&self) -> Result<PairSpec> {
        if let Some(p) = &self.pair {
            return Ok(p.clone());
        }
        if self.variables.contains_key("a") && self.variables.contains_key("b") {
            return Ok(PairSpec {
                a: "a".into(),
                b: "b".into(),
            });
        }
        if self.variables.len() == 2 {
            let mut names = self.variables.keys();
            return Ok(PairSpec {
                a: names.next().cloned().unwrap_or_default(),
                b: names.next().cloned().unwrap_or_default(),
            });
        }
        Err(Error::Validation(
            "cannot infer the reference pair; declare \"pair\": {\"a\": ..., \"b\": ...}".into(),
        ))
    }

    /// Validates the document and builds the probability objects.
    pub fn compile(&self) -> Result<Model> {
        let space = FiniteKolmogorovSpace::renormalized(self.points.iter().map(|p| (p.id.clone(), p.p)))?;
        let mut variables = IndexMap::new();
        for (name, map) in &self.variables {
            let map: HashMap<String, f64> = map.iter().map(|(k, v)| (k.clone(), *v)).collect();
            variables.insert(name.clone(), RandomVariable::from_map(name.clone(), &space, &map)?);
        }
        let spec = self.resolve_pair()?;
        if spec.a == spec.b {
            return Err(Error::Validation("reference variables a and b must differ".into()));
        }
        let lookup = |n: &str| {
            variables
                .get(n)
                .cloned()
                .ok_or_else(|| Error::Validation(format!("pair refers to undeclared variable `{n}`")))
        };
        let pair = ReferencePair::new(&space, lookup(&spec.a)?, lookup(&spec.b)?)?;
        let mut contexts = Vec::with_capacity(self.contexts.len());
        for (name, members) in &self.contexts {
            if members.is_empty() {
                return Err(Error::Validation(format!("context `{name}` is empty")));
            }
            if let Some(dup) = members.iter().duplicates().next() {
                return Err(Error::Validation(format!("context `{name}` lists `{dup}` twice")));
            }
            let event = space
                .event(members)
                .map_err(|_| Error::Validation(format!("context `{name}` refers to an unknown point")))?;
            contexts.push(NamedContext {
                name: name.clone(),
                event,
            });
        }
        Ok(Model {
            document: self.clone(),
            space,
            variables,
            pair,
            contexts,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedContext {
    pub name: String,
    pub event: Event,
}

/// A validated model ready for analysis.
#[derive(Debug, Clone)]
pub struct Model {
    pub document: ModelDocument,
    pub space: FiniteKolmogorovSpace,
    pub variables: IndexMap<String, RandomVariable>,
    pub pair: ReferencePair,
    pub contexts: Vec<NamedContext>,
}

impl Model {
    pub fn from_json_str(text: &str) -> Result<Self> {
        ModelDocument::from_json_str(text)?.compile()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        ModelDocument::from_path(path)?.compile()
    }

    pub fn context(&self, name: &str) -> Result<&Event> {
        self.contexts
            .iter()
            .find(|c| c.name == name)
            .map(|c| &c.event)
            .ok_or_else(|| Error::UnknownContext(name.to_string()))
    }

    /// Name of a declared context equal to `event`, or its member ids.
    pub fn describe(&self, event: &Event) -> String {
        match self.contexts.iter().find(|c| &c.event == event) {
            Some(c) => c.name.clone(),
            None => format!(
                "{{{}}}",
                event.members().map(|i| self.space.ids()[i].as_str()).join(",")
            ),
        }
    }
}

fn point_ids(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("w{i}")).collect()
}

/// The four-point family with weights (q, r, q, r), r = (1 − 2q)/2,
/// A_1 = {w1, w2} and B_1 = {w1, w4}.
pub fn generate_kq(q: f64) -> Result<ModelDocument> {
    if !(q > 0.0 && q < 0.5) {
        return Err(Error::QOutOfRange(q));
    }
    let r = (1.0 - 2.0 * q) / 2.0;
    let ids = point_ids(4);
    let points = ids
        .iter()
        .zip([q, r, q, r])
        .map(|(id, p)| PointSpec { id: id.clone(), p })
        .collect();
    let var = |vals: [f64; 4]| ids.iter().cloned().zip(vals).collect::<IndexMap<_, _>>();
    let mut variables = IndexMap::new();
    variables.insert("a".to_string(), var([1.0, 1.0, -1.0, -1.0]));
    variables.insert("b".to_string(), var([1.0, -1.0, -1.0, 1.0]));
    let mut contexts = IndexMap::new();
    for size in [2, 3] {
        for subset in (1..=4).combinations(size) {
            let name = format!("C{}", subset.iter().join(""));
            contexts.insert(name, subset.iter().map(|i| format!("w{i}")).collect());
        }
    }
    contexts.insert("Omega".to_string(), ids.clone());
    Ok(ModelDocument {
        name: Some(format!("K(q={q})")),
        points,
        variables,
        contexts,
        pair: Some(PairSpec {
            a: "a".into(),
            b: "b".into(),
        }),
    })
}

/// Constraints on [`generate_random_model`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomConstraints {
    /// `Some(true)` forces P(B_x | A_y) to be double stochastic, `Some(false)`
    /// forbids it, `None` leaves it to chance.
    pub double_stochastic: Option<bool>,
    /// Every cell A_y ∩ B_x receives at least one point.
    pub incompatible: bool,
}

pub const RANDOM_ATTEMPTS: usize = 64;
const RANDOM_CONTEXTS: usize = 4;

fn values_for(arity: usize) -> Vec<f64> {
    if arity == 2 {
        vec![1.0, -1.0]
    } else {
        (1..=arity).map(|v| v as f64).collect()
    }
}

/// A random k × k double stochastic matrix with entries bounded away from 0:
/// a random mixture of the uniform matrix and a few permutation matrices.
fn random_double_stochastic(rng: &mut ChaCha8Rng, k: usize) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; k]; k];
    let terms = 1 + k;
    let mut coeffs: Vec<f64> = (0..=terms).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = coeffs.iter().sum();
    coeffs.iter_mut().for_each(|c| *c /= total);
    for row in m.iter_mut() {
        row.iter_mut().for_each(|v| *v = coeffs[0] / k as f64);
    }
    for c in &coeffs[1..] {
        let mut perm: Vec<usize> = (0..k).collect();
        perm.shuffle(rng);
        for (i, &j) in perm.iter().enumerate() {
            m[i][j] += c;
        }
    }
    m
}

/// Deterministic for a fixed seed. Points are `w1..wn`; contexts are Ω, the
/// `a`- and `b`-cells, and four random subsets with at least two points.
pub fn generate_random_model(
    seed: u64,
    n_points: usize,
    arities: [usize; 2],
    constraints: RandomConstraints,
) -> Result<ModelDocument> {
    let [ka, kb] = arities;
    if ka < 2 || kb < 2 {
        return Err(Error::Precondition("each reference variable needs at least two values".into()));
    }
    if n_points < ka * kb {
        return Err(Error::Precondition(format!(
            "{n_points} points cannot realise {ka} × {kb} value cells"
        )));
    }
    if constraints.double_stochastic == Some(true) && ka != kb {
        return Err(Error::ConstraintUnsatisfiable(0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RANDOM_ATTEMPTS {
        let doc = random_attempt(&mut rng, n_points, ka, kb, constraints);
        if let Some(doc) = doc.filter(|d| satisfies(d, constraints)) {
            return Ok(doc);
        }
    }
    Err(Error::ConstraintUnsatisfiable(RANDOM_ATTEMPTS))
}

fn random_attempt(
    rng: &mut ChaCha8Rng,
    n: usize,
    ka: usize,
    kb: usize,
    constraints: RandomConstraints,
) -> Option<ModelDocument> {
    // Cell of every point, as (y, x).
    let mut cells: Vec<(usize, usize)> = if constraints.incompatible {
        (0..ka).cartesian_product(0..kb).collect()
    } else {
        Vec::new()
    };
    while cells.len() < n {
        cells.push((rng.gen_range(0..ka), rng.gen_range(0..kb)));
    }
    cells.shuffle(rng);

    let mut weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    if constraints.double_stochastic == Some(true) {
        let m = random_double_stochastic(rng, ka);
        let mut pa: Vec<f64> = (0..ka).map(|_| rng.gen_range(0.1..1.0)).collect();
        let s: f64 = pa.iter().sum();
        pa.iter_mut().for_each(|p| *p /= s);
        // Spread each cell's target mass over its points in proportion to the raw weights.
        let mut cell_raw: HashMap<(usize, usize), f64> = HashMap::new();
        for (w, c) in weights.iter().zip(&cells) {
            *cell_raw.entry(*c).or_default() += w;
        }
        for (w, c) in weights.iter_mut().zip(&cells) {
            *w *= pa[c.0] * m[c.0][c.1] / cell_raw[c];
        }
        // Keep only cells with mass; an empty cell would break the matrix.
        if (0..ka).cartesian_product(0..kb).any(|c| !cell_raw.contains_key(&c)) {
            return None;
        }
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);

    let ids = point_ids(n);
    let av = values_for(ka);
    let bv = values_for(kb);
    let mut variables = IndexMap::new();
    variables.insert(
        "a".to_string(),
        ids.iter().cloned().zip(cells.iter().map(|c| av[c.0])).collect(),
    );
    variables.insert(
        "b".to_string(),
        ids.iter().cloned().zip(cells.iter().map(|c| bv[c.1])).collect(),
    );
    let mut contexts = IndexMap::new();
    contexts.insert("Omega".to_string(), ids.clone());
    for (label, vals, pick) in [("A", &av, 0usize), ("B", &bv, 1usize)] {
        for (j, _) in vals.iter().enumerate() {
            let members: Vec<String> = ids
                .iter()
                .zip(&cells)
                .filter(|(_, c)| if pick == 0 { c.0 == j } else { c.1 == j })
                .map(|(id, _)| id.clone())
                .collect();
            if !members.is_empty() {
                contexts.insert(format!("{label}{}", j + 1), members);
            }
        }
    }
    for k in 0..RANDOM_CONTEXTS {
        let size = rng.gen_range(2..=n);
        let mut members: Vec<usize> = rand::seq::index::sample(rng, n, size).into_vec();
        members.sort_unstable();
        contexts.insert(format!("R{}", k + 1), members.iter().map(|&i| ids[i].clone()).collect());
    }
    Some(ModelDocument {
        name: None,
        points: ids.into_iter().zip(weights).map(|(id, p)| PointSpec { id, p }).collect(),
        variables,
        contexts,
        pair: Some(PairSpec {
            a: "a".into(),
            b: "b".into(),
        }),
    })
}

fn satisfies(doc: &ModelDocument, c: RandomConstraints) -> bool {
    let Ok(model) = doc.compile() else {
        return false;
    };
    let (ka, kb) = (model.pair.a_values().len(), model.pair.b_values().len());
    if c.incompatible {
        let all_cells = model.pair.a_partition().iter().all(|a| {
            model
                .pair
                .b_partition()
                .iter()
                .all(|b| model.space.probability(&a.intersection(b)) > 0.0)
        });
        if !all_cells {
            return false;
        }
    }
    match c.double_stochastic {
        None => true,
        Some(want) => {
            let ds = ka == kb
                && transition_matrix(&model.space, &model.pair, Orientation::BGivenA)
                    .map(|m| is_double_stochastic(&m))
                    .unwrap_or(false);
            ds == want
        }
    }
}
