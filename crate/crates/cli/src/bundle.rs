//! Instance bundles: one JSON document, cross-referenced by string ids.
//!
//! ```json
//! {
//!   "norms": { "u": { "dim": 1, "generators": [[1]] } },
//!   "tabular": { "t": { "points": ["a", "b"], "matrix": [[0, 1], [2, 0]] } },
//!   "operators": { "neg": { "matrix": [[-1]], "domain": "u", "codomain": "u" } },
//!   "sequences": { "down": { "space": "u", "points": [[-1], [-2]] } },
//!   "point_sets": { "Y": { "space": "u", "points": [[0], [1], [2], [3]] } },
//!   "functionals": { "f": { "covector": [1] } }
//! }
//! ```
//!
//! Points in a tabular space are labels. Every section is optional.

use std::collections::BTreeMap;

use asymlab::duality::Functional;
use asymlab::quasimetric::{NormMetric, TabularMetric};
use asymlab::{LinOperator, PolyAsymNorm};
use serde::Deserialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBundle {
    #[serde(default)]
    norms: BTreeMap<String, PolyAsymNorm>,
    #[serde(default)]
    tabular: BTreeMap<String, TabularMetric>,
    #[serde(default)]
    operators: BTreeMap<String, RawOperator>,
    #[serde(default)]
    sequences: BTreeMap<String, RawSequence>,
    #[serde(default)]
    point_sets: BTreeMap<String, RawPointSet>,
    #[serde(default)]
    functionals: BTreeMap<String, Functional>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOperator {
    matrix: Vec<Vec<f64>>,
    domain: String,
    codomain: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum RawPoints {
    Vectors(Vec<Vec<f64>>),
    Labels(Vec<String>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSequence {
    space: String,
    points: RawPoints,
    witness_pool: Option<RawPoints>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPointSet {
    space: String,
    points: RawPoints,
    /// External center pool for nets.
    centers: Option<RawPoints>,
}

/// Points resolved against their space.
#[derive(Debug, Clone)]
pub enum Points {
    Vectors {
        space: String,
        metric: NormMetric,
        points: Vec<Vec<f64>>,
        pool: Option<Vec<Vec<f64>>>,
    },
    Labels {
        space: String,
        metric: TabularMetric,
        points: Vec<usize>,
        pool: Option<Vec<usize>>,
    },
}

impl Points {
    pub fn space(&self) -> &str {
        match self {
            Points::Vectors { space, .. } | Points::Labels { space, .. } => space,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Points::Vectors { points, .. } => points.len(),
            Points::Labels { points, .. } => points.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Default)]
pub struct Bundle {
    pub norms: BTreeMap<String, PolyAsymNorm>,
    pub tabular: BTreeMap<String, TabularMetric>,
    pub operators: BTreeMap<String, LinOperator>,
    pub sequences: BTreeMap<String, Points>,
    pub point_sets: BTreeMap<String, Points>,
    pub functionals: BTreeMap<String, Functional>,
}

impl Bundle {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let raw: RawBundle = serde_json::from_str(text)?;
        for id in raw.norms.keys() {
            if raw.tabular.contains_key(id) {
                return Err(CliError::Malformed(format!("id `{id}` names both a norm and a table")));
            }
        }
        let mut b = Bundle { norms: raw.norms, tabular: raw.tabular, ..Default::default() };

        for (id, op) in raw.operators {
            let dom = b.norm(&op.domain, &id)?.clone();
            let cod = b.norm(&op.codomain, &id)?.clone();
            let a = LinOperator::new(op.matrix, dom, cod).map_err(|e| CliError::Malformed(format!("operator `{id}`: {e}")))?;
            b.operators.insert(id, a);
        }
        for (id, s) in raw.sequences {
            let pts = b.resolve_points(&id, &s.space, s.points, s.witness_pool)?;
            if pts.len() < 2 {
                return Err(CliError::Malformed(format!("sequence `{id}` needs at least two points")));
            }
            b.sequences.insert(id, pts);
        }
        for (id, s) in raw.point_sets {
            let pts = b.resolve_points(&id, &s.space, s.points, s.centers)?;
            b.point_sets.insert(id, pts);
        }
        for (id, f) in raw.functionals {
            let f = Functional::new(f.covector).map_err(|e| CliError::Malformed(format!("functional `{id}`: {e}")))?;
            b.functionals.insert(id, f);
        }
        Ok(b)
    }

    fn norm(&self, id: &str, user: &str) -> CliResult<&PolyAsymNorm> {
        self.norms
            .get(id)
            .ok_or_else(|| CliError::Unresolved(format!("`{user}` refers to unknown norm `{id}`")))
    }

    fn resolve_points(
        &self,
        id: &str,
        space: &str,
        points: RawPoints,
        pool: Option<RawPoints>,
    ) -> CliResult<Points> {
        if let Some(p) = self.norms.get(space) {
            let vectors = |raw: RawPoints| -> CliResult<Vec<Vec<f64>>> {
                match raw {
                    RawPoints::Vectors(v) if v.iter().all(|x| x.len() == p.dim()) => Ok(v),
                    RawPoints::Vectors(_) => {
                        Err(CliError::Malformed(format!("`{id}`: points must have dimension {}", p.dim())))
                    }
                    RawPoints::Labels(_) => {
                        Err(CliError::Malformed(format!("`{id}`: norm space `{space}` takes coordinate vectors")))
                    }
                }
            };
            let points = vectors(points)?;
            if points.iter().flatten().any(|v| !v.is_finite()) {
                return Err(CliError::Malformed(format!("`{id}`: coordinates must be finite")));
            }
            return Ok(Points::Vectors {
                space: space.to_string(),
                metric: NormMetric::new(p.clone()),
                points,
                pool: pool.map(vectors).transpose()?,
            });
        }
        if let Some(t) = self.tabular.get(space) {
            let labels = |raw: RawPoints| -> CliResult<Vec<usize>> {
                match raw {
                    RawPoints::Labels(v) => v
                        .iter()
                        .map(|l| t.index(l).map_err(|_| CliError::Unresolved(format!("`{id}`: no point `{l}` in `{space}`"))))
                        .collect(),
                    RawPoints::Vectors(v) if v.is_empty() => Ok(Vec::new()),
                    RawPoints::Vectors(_) => {
                        Err(CliError::Malformed(format!("`{id}`: table `{space}` takes point labels")))
                    }
                }
            };
            return Ok(Points::Labels {
                space: space.to_string(),
                metric: t.clone(),
                points: labels(points)?,
                pool: pool.map(labels).transpose()?,
            });
        }
        Err(CliError::Unresolved(format!("`{id}` refers to unknown space `{space}`")))
    }
}
