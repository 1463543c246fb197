//! The dual cone of an asymmetric normed space.
//!
//! A functional `phi` belongs to the dual cone iff it is bounded above on the
//! unit ball; its norm is that supremum. The polar `{phi : phi <= 1 on B_p}`
//! of a polyhedral norm is `conv({0} ∪ generators)`. Dual distances
//! `sup_{B_p} (phi2 - phi1)` may be `+inf`.

use std::collections::HashSet;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::covering::{self, EpsNetCertificate};
use crate::error::{check_dim, Error, Result};
use crate::ext::ExtReal;
use crate::geometry::VertexForm;
use crate::linalg;
use crate::lp::LpOutcome;
use crate::norms::{NormChoice, PolyAsymNorm};
use crate::operators::LinOperator;
use crate::quasimetric::QuasiMetric;
use crate::tol;

pub const DEFAULT_GRID_DENSITY: usize = 12;
const GRID_SUBSET: usize = 4;

/// A linear functional acting by the standard inner product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Functional {
    pub covector: Vec<f64>,
}

impl Functional {
    pub fn new(covector: Vec<f64>) -> Result<Self> {
        if covector.is_empty() || covector.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("covector must be nonempty and finite".into()));
        }
        Ok(Functional { covector })
    }

    pub fn zero(dim: usize) -> Self {
        Functional { covector: vec![0.0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.covector.len()
    }

    pub fn apply(&self, x: &[f64]) -> f64 {
        linalg::dot(&self.covector, x)
    }
}

/// `||phi| = sup { phi(x) : p(x) <= 1 }`; finite iff `phi` is in the dual cone.
pub fn func_norm(phi: &Functional, p: &PolyAsymNorm) -> Result<ExtReal> {
    p.ball_support(&phi.covector)
}

/// The dual unit ball `B♭_p`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolarBall {
    pub base: PolyAsymNorm,
    /// `0` followed by the generators of `base`.
    pub vertices: Vec<Vec<f64>>,
}

impl PolarBall {
    /// Polar of a valid norm; every vertex is checked to satisfy
    /// `sup_{B_p} <v, x> <= 1`.
    pub fn new(p: &PolyAsymNorm, tol: f64) -> Result<Self> {
        p.ensure_valid()?;
        let mut vertices = vec![vec![0.0; p.dim()]];
        vertices.extend(p.generators().iter().cloned());
        for v in &vertices {
            let s = p.ball_support(v)?;
            if !s.approx_le(ExtReal::Finite(1.0), tol) {
                return Err(Error::InvalidInput(format!("vertex {v:?} has functional norm {s}")));
            }
        }
        Ok(PolarBall { base: p.clone(), vertices })
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    /// `phi(x) <= 1` on the whole unit ball, up to `tol`.
    pub fn contains(&self, phi: &[f64], tol: f64) -> Result<bool> {
        Ok(self.base.ball_support(phi)?.approx_le(ExtReal::Finite(1.0), tol))
    }

    /// Barycentric grid with the given denominator over every subset of at
    /// most four vertices (all vertices when there are fewer), deduplicated,
    /// zero first.
    pub fn simplex_grid(&self, density: usize) -> Vec<Vec<f64>> {
        assert!(density > 0, "grid density must be positive");
        let k = self.vertices.len().min(GRID_SUBSET);
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for subset in (0..self.vertices.len()).combinations(k) {
            for weights in compositions(density, k) {
                let mut phi = vec![0.0; self.dim()];
                for (&w, &vi) in weights.iter().zip(&subset) {
                    if w > 0 {
                        let t = w as f64 / density as f64;
                        for (a, b) in phi.iter_mut().zip(&self.vertices[vi]) {
                            *a += t * b;
                        }
                    }
                }
                let key: Vec<i64> = phi.iter().map(|v| (v * 1e9).round() as i64).collect();
                if seen.insert(key) {
                    out.push(phi);
                }
            }
        }
        // the zero functional sorts first so nets start from it
        if let Some(z) = out.iter().position(|v| v.iter().all(|&c| c == 0.0)) {
            let zero = out.remove(z);
            out.insert(0, zero);
        }
        out
    }
}

/// All `k`-tuples of nonnegative integers summing to `total`.
fn compositions(total: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// `A♭ psi = psi ∘ A`, i.e. the covector `A^T psi`.
pub fn dual_operator(a: &LinOperator, psi: &Functional) -> Result<Functional> {
    check_dim(a.codomain().dim(), psi.dim())?;
    Ok(Functional { covector: a.transpose_apply(&psi.covector) })
}

/// `sup { phi2(x) - phi1(x) : p(x) <= 1 }`, clamped at 0.
pub fn dual_qdist(phi1: &Functional, phi2: &Functional, p: &PolyAsymNorm) -> Result<ExtReal> {
    check_dim(p.dim(), phi1.dim())?;
    let c = linalg::sub(&phi2.covector, &phi1.covector);
    p.ball_support(&c)
}

/// The dual quasi-distance evaluated through the vertex form of `B_p`.
#[derive(Debug, Clone)]
pub struct DualMetric {
    ball: VertexForm,
}

impl DualMetric {
    pub fn new(p: &PolyAsymNorm) -> Self {
        DualMetric { ball: VertexForm::of_unit_ball(p) }
    }
}

impl QuasiMetric for DualMetric {
    type Point = Vec<f64>;

    fn dist(&self, x: &Vec<f64>, y: &Vec<f64>) -> f64 {
        self.ball.support(&linalg::sub(y, x)).max(0.0)
    }
}

/// `{phi : phi(x_i) - phi0(x_i) <= eps for all i}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WFlatNeighborhood {
    pub anchor: Functional,
    pub points: Vec<Vec<f64>>,
    pub epsilon: f64,
}

impl WFlatNeighborhood {
    pub fn new(anchor: Functional, points: Vec<Vec<f64>>, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::NonPositiveEpsilon(epsilon));
        }
        for x in &points {
            check_dim(anchor.dim(), x.len())?;
        }
        Ok(WFlatNeighborhood { anchor, points, epsilon })
    }

    pub fn contains(&self, phi: &Functional) -> bool {
        self.points.iter().all(|x| phi.apply(x) - self.anchor.apply(x) <= self.epsilon)
    }
}

/// `{(phi1, phi2) : phi2(x_i) - phi1(x_i) <= eps for all i}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WFlatEntourage {
    pub points: Vec<Vec<f64>>,
    pub epsilon: f64,
}

impl WFlatEntourage {
    pub fn new(points: Vec<Vec<f64>>, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::NonPositiveEpsilon(epsilon));
        }
        Ok(WFlatEntourage { points, epsilon })
    }

    pub fn contains(&self, phi1: &Functional, phi2: &Functional) -> bool {
        self.points.iter().all(|x| phi2.apply(x) - phi1.apply(x) <= self.epsilon)
    }

    pub fn section(&self, anchor: Functional) -> WFlatNeighborhood {
        WFlatNeighborhood { anchor, points: self.points.clone(), epsilon: self.epsilon }
    }

    /// The entourage on the codomain dual tested at `A x_i`; pairs in it are
    /// mapped by `A♭` into `self`.
    pub fn pullback(&self, a: &LinOperator) -> WFlatEntourage {
        WFlatEntourage { points: self.points.iter().map(|x| a.apply(x)).collect(), epsilon: self.epsilon }
    }
}

/// `delta = eps / ||A|`: `dual_qdist(psi1, psi2, q) <= delta` forces
/// `dual_qdist(A♭psi1, A♭psi2, p) <= eps`. The zero operator admits every
/// radius and returns `+inf`.
pub fn dual_continuity_radius(a: &LinOperator, eps: f64) -> Result<ExtReal> {
    if !(eps > 0.0) {
        return Err(Error::NonPositiveEpsilon(eps));
    }
    match a.flat_norm() {
        ExtReal::Infinite => Err(Error::Unbounded),
        ExtReal::Finite(0.0) => Ok(ExtReal::Infinite),
        ExtReal::Finite(n) => Ok(ExtReal::Finite(eps / n)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchauderReport {
    pub epsilon: f64,
    /// The functionals `A♭psi_k`.
    pub net: Vec<Vec<f64>>,
    /// The `psi_k` in the codomain polar.
    pub preimages: Vec<Vec<f64>>,
    /// Largest distance from the net to a sampled `A♭psi`.
    pub max_deficit: f64,
    pub samples: usize,
    pub grid_density: usize,
    pub verified: bool,
}

/// Finite net of `A♭(B♭_q)` under the dual distance of the domain.
///
/// The net is built by farthest-point insertion at radius `eps` over the
/// simplex-grid sample of the codomain polar, so each sample is within `eps`
/// of a center; `verified` re-checks every sample against `3 eps` with the
/// linear-program distance.
pub fn schauder_certificate(a: &LinOperator, eps: f64, grid_density: usize, tol: f64) -> Result<SchauderReport> {
    if !(eps > 0.0) {
        return Err(Error::NonPositiveEpsilon(eps));
    }
    let verdict = a.is_compact(NormChoice::Base, NormChoice::Base);
    if let Some(w) = verdict.witness_ray {
        return Err(Error::NotCompact { witness: w });
    }
    let polar = PolarBall::new(a.codomain(), tol)?;
    let psis = polar.simplex_grid(grid_density);
    let images: Vec<Vec<f64>> = psis.iter().map(|psi| a.transpose_apply(psi)).collect();
    let metric = DualMetric::new(a.domain());
    let (net, idx) = covering::farthest_point_net_indexed(&metric, &images, eps)?;
    let max_deficit = verify_dual_net(&net, &metric, &images, a.domain());
    Ok(SchauderReport {
        epsilon: eps,
        preimages: idx.iter().map(|&i| psis[i].clone()).collect(),
        net: net.centers,
        max_deficit,
        samples: images.len(),
        grid_density,
        verified: tol::approx_le(max_deficit, 3.0 * eps, tol),
    })
}

/// For each sample the nearest center (by vertex form) is re-measured by LP.
fn verify_dual_net(
    net: &EpsNetCertificate<Vec<f64>>,
    metric: &DualMetric,
    samples: &[Vec<f64>],
    p: &PolyAsymNorm,
) -> f64 {
    samples
        .par_iter()
        .map(|phi| {
            let best = net
                .centers
                .iter()
                .map(|c| metric.dist(c, phi))
                .enumerate()
                .fold((0, f64::INFINITY), |acc, cur| if cur.1 < acc.1 { cur } else { acc });
            match p.ball_support_lp(&linalg::sub(phi, &net.centers[best.0])).expect("dimensions agree") {
                LpOutcome::Optimal { value, .. } => value.max(0.0),
                LpOutcome::Unbounded { .. } => f64::INFINITY,
            }
        })
        .reduce(|| 0.0, f64::max)
}
