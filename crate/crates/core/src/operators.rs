//! Linear operators between polyhedral asymmetric normed spaces.
//!
//! For `mu` a choice of `p`, `pbar`, `p_s` on the domain and `nu` of `q`,
//! `qbar`, `q_s` on the codomain, the semi-Lipschitz norm
//! `sup { nu(Ax) : mu(x) <= 1 }` splits into one ball-support program per
//! generator `b_j` of `nu`: `sup <A^T b_j, x>` over `B_mu`.

use serde::{Deserialize, Serialize};

use crate::covering::{self, CenterSource, EpsNetCertificate};
use crate::error::{check_dim, Error, Result};
use crate::ext::ExtReal;
use crate::geometry::BallSample;
use crate::linalg;
use crate::lp::{self, LpOutcome};
use crate::norms::{NormChoice, PolyAsymNorm};
use crate::quasimetric::{NormMetric, QuasiMetric};
use crate::tol;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinOperator {
    matrix: Vec<Vec<f64>>,
    domain: PolyAsymNorm,
    codomain: PolyAsymNorm,
}

impl LinOperator {
    /// `matrix` is row-major with `codomain.dim()` rows and `domain.dim()`
    /// columns; both norms must satisfy AN1.
    pub fn new(matrix: Vec<Vec<f64>>, domain: PolyAsymNorm, codomain: PolyAsymNorm) -> Result<Self> {
        check_dim(codomain.dim(), matrix.len())?;
        for row in &matrix {
            check_dim(domain.dim(), row.len())?;
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput("operator entries must be finite".into()));
            }
        }
        domain.ensure_valid()?;
        codomain.ensure_valid()?;
        Ok(LinOperator { matrix, domain, codomain })
    }

    pub fn identity(norm: PolyAsymNorm) -> Result<Self> {
        let n = norm.dim();
        let m = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        Self::new(m, norm.clone(), norm)
    }

    pub fn zero(domain: PolyAsymNorm, codomain: PolyAsymNorm) -> Result<Self> {
        let m = vec![vec![0.0; domain.dim()]; codomain.dim()];
        Self::new(m, domain, codomain)
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.matrix
    }

    pub fn domain(&self) -> &PolyAsymNorm {
        &self.domain
    }

    pub fn codomain(&self) -> &PolyAsymNorm {
        &self.codomain
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        linalg::mat_vec(&self.matrix, x)
    }

    /// `A^T y`, the covector of `y ∘ A`.
    pub fn transpose_apply(&self, y: &[f64]) -> Vec<f64> {
        linalg::mat_t_vec(&self.matrix, y, self.domain.dim())
    }

    fn same_spaces(&self, other: &Self) -> Result<()> {
        if self.domain != other.domain || self.codomain != other.codomain {
            return Err(Error::InvalidInput("operators act between different spaces".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_spaces(other)?;
        let m = self.matrix.iter().zip(&other.matrix).map(|(a, b)| linalg::add(a, b)).collect();
        Ok(LinOperator { matrix: m, ..self.clone() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_spaces(other)?;
        let m = self.matrix.iter().zip(&other.matrix).map(|(a, b)| linalg::sub(a, b)).collect();
        Ok(LinOperator { matrix: m, ..self.clone() })
    }

    /// Any real scale; the bounded operators are closed only under `alpha >= 0`.
    pub fn scale(&self, alpha: f64) -> Self {
        let m = self.matrix.iter().map(|r| linalg::scale(r, alpha)).collect();
        LinOperator { matrix: m, ..self.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().flatten().all(|&v| v == 0.0)
    }

    /// `sup { nu(Ax) : mu(x) <= 1 }` with the attaining point or a ray.
    pub fn op_norm_detail(&self, mu: NormChoice, nu: NormChoice) -> NormAttainment {
        let dom = self.domain.select(mu);
        let cod = self.codomain.select(nu);
        let h = vec![1.0; dom.generators().len()];
        let mut best = NormAttainment { value: ExtReal::ZERO, argmax: Some(vec![0.0; dom.dim()]), ray: None };
        let mut best_val = 0.0;
        for b in cod.generators() {
            let c = self.transpose_apply(b);
            match lp::maximize(&c, dom.generators(), &h) {
                LpOutcome::Unbounded { ray } => {
                    return NormAttainment { value: ExtReal::Infinite, argmax: None, ray: Some(ray) };
                }
                LpOutcome::Optimal { value, point } => {
                    if value > best_val {
                        best_val = value;
                        best = NormAttainment { value: ExtReal::clamped(value), argmax: Some(point), ray: None };
                    }
                }
            }
        }
        best
    }

    pub fn op_norm(&self, mu: NormChoice, nu: NormChoice) -> ExtReal {
        self.op_norm_detail(mu, nu).value
    }

    /// `||A|`: the least semi-Lipschitz constant for `(p, q)`.
    pub fn flat_norm(&self) -> ExtReal {
        self.op_norm(NormChoice::Base, NormChoice::Base)
    }

    /// `(true, beta)` with `beta = ||A|_{mu,nu}` when finite.
    pub fn is_bounded(&self, mu: NormChoice, nu: NormChoice) -> (bool, Option<f64>) {
        match self.op_norm(mu, nu) {
            ExtReal::Finite(b) => (true, Some(b)),
            ExtReal::Infinite => (false, None),
        }
    }

    /// `||A||` between the symmetrised norms; always finite, and at most
    /// `||A|` when the latter is finite.
    pub fn sym_op_norm(&self) -> f64 {
        self.op_norm(NormChoice::Symmetric, NormChoice::Symmetric)
            .as_finite()
            .expect("symmetrised unit balls are bounded")
    }

    pub fn norm_report(&self) -> OperatorNormReport {
        let mut extended = Vec::with_capacity(9);
        for mu in NormChoice::ALL {
            for nu in NormChoice::ALL {
                extended.push(PairNorm { mu, nu, value: self.op_norm(mu, nu) });
            }
        }
        OperatorNormReport { flat_norm: self.flat_norm(), sym_norm: self.sym_op_norm(), extended }
    }

    /// Decides `(mu, nu)`-compactness: compact iff `nu(Ad) = 0` on every
    /// recession direction `d` of `B_mu`.
    ///
    /// Each codomain generator `b_j` gives the program
    /// `max <A^T b_j, d>` over `{G_mu d <= 0, |d_i| <= 1}`; a positive optimum
    /// is a witness ray along which `nu(A(t d))` grows linearly.
    pub fn is_compact(&self, mu: NormChoice, nu: NormChoice) -> CompactnessVerdict {
        let dom = self.domain.select(mu);
        let cod = self.codomain.select(nu);
        let n = dom.dim();
        let mut g: Vec<Vec<f64>> = dom.generators().to_vec();
        let mut h = vec![0.0; g.len()];
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            g.push(e.clone());
            e[i] = -1.0;
            g.push(e);
            h.push(1.0);
            h.push(1.0);
        }
        let mut best: Option<(f64, Vec<f64>)> = None;
        for b in cod.generators() {
            let c = self.transpose_apply(b);
            let scale = 1f64.max(linalg::norm_inf(&c));
            if let LpOutcome::Optimal { value, point } = lp::maximize(&c, &g, &h) {
                if value > 1e-9 * scale && best.as_ref().is_none_or(|(v, _)| value > *v) {
                    best = Some((value, point));
                }
            }
        }
        match best {
            None => CompactnessVerdict { compact: true, witness_ray: None, growth: None, mu, nu },
            Some((_, d)) => {
                let d = linalg::scale(&d, 1.0 / linalg::norm_inf(&d));
                let growth = cod.eval_unchecked(&self.apply(&d));
                CompactnessVerdict { compact: false, witness_ray: Some(d), growth: Some(growth), mu, nu }
            }
        }
    }

    /// Greedy epsilon-net of `A(sample)` under `nu`, with the sample points
    /// that generated each center.
    pub fn image_net(&self, nu: NormChoice, sample: &BallSample, eps: f64) -> Result<OperatorNet> {
        let metric = NormMetric::new(self.codomain.select(nu).into_owned());
        let images: Vec<Vec<f64>> = sample.points.iter().map(|x| self.apply(x)).collect();
        let (cert, idx) = covering::greedy_net_indexed(&metric, &images, eps, CenterSource::Set, false)?;
        Ok(OperatorNet {
            nu,
            sample_seed: sample.seed,
            sample_len: sample.len(),
            preimages: idx.iter().map(|&i| sample.points[i].clone()).collect(),
            net: cert,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormAttainment {
    pub value: ExtReal,
    /// Point of `B_mu` attaining a finite value.
    pub argmax: Option<Vec<f64>>,
    /// Recession ray of `B_mu` along which `nu(Ax)` is unbounded.
    pub ray: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairNorm {
    pub mu: NormChoice,
    pub nu: NormChoice,
    pub value: ExtReal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorNormReport {
    pub flat_norm: ExtReal,
    pub sym_norm: f64,
    pub extended: Vec<PairNorm>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompactnessVerdict {
    pub compact: bool,
    pub witness_ray: Option<Vec<f64>>,
    /// `nu(A d)` along the witness ray.
    pub growth: Option<f64>,
    pub mu: NormChoice,
    pub nu: NormChoice,
}

impl CompactnessVerdict {
    /// Net for `A(B_mu ∩ box)` at `eps`; only for compact verdicts.
    pub fn net(&self, a: &LinOperator, sample: &BallSample, eps: f64) -> Result<OperatorNet> {
        if let Some(w) = &self.witness_ray {
            return Err(Error::NotCompact { witness: w.clone() });
        }
        a.image_net(self.nu, sample, eps)
    }
}

/// Net of an operator image over a fixed domain sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorNet {
    pub nu: NormChoice,
    pub sample_seed: u64,
    pub sample_len: usize,
    /// `x_i` with `A x_i` the i-th center.
    pub preimages: Vec<Vec<f64>>,
    pub net: EpsNetCertificate<Vec<f64>>,
}

impl OperatorNet {
    pub fn epsilon(&self) -> f64 {
        self.net.epsilon
    }
}

fn check_same_sample(net: &OperatorNet, sample: &BallSample) -> Result<()> {
    if net.sample_seed != sample.seed || net.sample_len != sample.len() {
        return Err(Error::IncompatibleNets("net was built on a different domain sample".into()));
    }
    Ok(())
}

/// Verifies `min_k nu(Ax - c_k) <= bound` over the sample and returns the
/// certificate with each sample assigned to its nearest center.
fn certify(
    a: &LinOperator,
    nu: NormChoice,
    centers: Vec<Vec<f64>>,
    sample: &BallSample,
    bound: f64,
    tol: f64,
) -> Result<EpsNetCertificate<Vec<f64>>> {
    let metric = NormMetric::new(a.codomain.select(nu).into_owned());
    let mut assignment = Vec::with_capacity(sample.len());
    let mut worst: f64 = 0.0;
    for (i, x) in sample.points.iter().enumerate() {
        let y = a.apply(x);
        let (k, d) = centers
            .iter()
            .enumerate()
            .map(|(k, c)| (k, metric.dist(c, &y)))
            .fold((0, f64::INFINITY), |acc, cur| if cur.1 < acc.1 { cur } else { acc });
        if !tol::approx_le(d, bound, tol) {
            return Err(Error::CertificateFailed { index: i, deficit: d, bound });
        }
        worst = worst.max(d);
        assignment.push(k);
    }
    Ok(EpsNetCertificate { epsilon: bound, strict: false, centers, assignment, max_distance: worst })
}

/// Pairwise sums `A1 x_i + A2 y_j` of two `eps`-nets, verified as a
/// `2 eps`-net for `(A1 + A2)(B_mu)` over the shared sample.
pub fn combine_nets(
    a1: &LinOperator,
    net1: &OperatorNet,
    a2: &LinOperator,
    net2: &OperatorNet,
    sample: &BallSample,
    tol: f64,
) -> Result<EpsNetCertificate<Vec<f64>>> {
    if net1.epsilon() != net2.epsilon() {
        return Err(Error::IncompatibleNets(format!(
            "epsilon {} vs {}",
            net1.epsilon(),
            net2.epsilon()
        )));
    }
    if net1.nu != net2.nu {
        return Err(Error::IncompatibleNets("nets use different codomain norms".into()));
    }
    check_same_sample(net1, sample)?;
    check_same_sample(net2, sample)?;
    let sum = a1.add(a2)?;
    let mut centers = Vec::with_capacity(net1.net.len() * net2.net.len());
    for c1 in &net1.net.centers {
        for c2 in &net2.net.centers {
            centers.push(linalg::add(c1, c2));
        }
    }
    certify(&sum, net1.nu, centers, sample, 2.0 * net1.epsilon(), tol)
}

/// Result of lifting a net of an approximating operator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiftedNet {
    /// 1-based index of the family member used.
    pub n0: usize,
    /// `sup nu(Ax - A_n0 x)` over `B_mu`.
    pub hypothesis: ExtReal,
    /// `max_i nu(A_n0 x_i - A x_i)` over the lifted preimages.
    pub return_term: f64,
    pub preimages: Vec<Vec<f64>>,
    pub certificate: EpsNetCertificate<Vec<f64>>,
}

/// Lifts an `eps`-net `{A_n0 x_i}` of some family member to the
/// `3 eps`-net `{A x_i}` of `A(B_mu)`, through
/// `nu(Ax - Ax_i) <= nu(Ax - A_n0 x) + nu(A_n0 x - A_n0 x_i) + nu(A_n0 x_i - A x_i)`.
///
/// The hypothesis `sup nu(Ax - A_n x) <= eps` bounds the first term only;
/// the last term is evaluated at the finitely many `x_i`, and members are
/// tried in order until the lifted net verifies on the sample.
pub fn limit_of_compacts_net(
    a: &LinOperator,
    family: &[LinOperator],
    mu: NormChoice,
    nu: NormChoice,
    eps: f64,
    sample: &BallSample,
    tol: f64,
) -> Result<LiftedNet> {
    if !(eps > 0.0) {
        return Err(Error::NonPositiveEpsilon(eps));
    }
    let cod = a.codomain.select(nu).into_owned();
    let mut closest: Option<(ExtReal, NormAttainment, usize)> = None;
    let mut last_failure = None;
    for (idx, an) in family.iter().enumerate() {
        let gap = a.sub(an)?.op_norm_detail(mu, nu);
        if !gap.value.approx_le(ExtReal::Finite(eps), tol) {
            if closest.as_ref().is_none_or(|(v, _, _)| gap.value < *v) {
                closest = Some((gap.value, gap, idx));
            }
            continue;
        }
        let net = an.image_net(nu, sample, eps)?;
        let lifted: Vec<Vec<f64>> = net.preimages.iter().map(|x| a.apply(x)).collect();
        let return_term = net
            .preimages
            .iter()
            .map(|x| cod.eval_unchecked(&linalg::sub(&an.apply(x), &a.apply(x))))
            .fold(0.0, f64::max);
        match certify(a, nu, lifted, sample, 3.0 * eps, tol) {
            Ok(certificate) => {
                return Ok(LiftedNet {
                    n0: idx + 1,
                    hypothesis: gap.value,
                    return_term,
                    preimages: net.preimages,
                    certificate,
                })
            }
            Err(e) => last_failure = Some(e),
        }
    }
    if let Some(e) = last_failure {
        return Err(e);
    }
    let (value, att, idx) = closest.ok_or_else(|| Error::InvalidInput("empty operator family".into()))?;
    let diff = a.sub(&family[idx])?;
    let witness = match (att.argmax, att.ray) {
        (Some(x), _) => x,
        (None, Some(d)) => {
            // push along the ray until the excess is visible
            let rate = cod.eval_unchecked(&diff.apply(&d)).max(f64::MIN_POSITIVE);
            linalg::scale(&d, 2.0 * eps / rate)
        }
        (None, None) => unreachable!("attainment carries a point or a ray"),
    };
    let excess = cod.eval_unchecked(&diff.apply(&witness));
    let _ = value;
    Err(Error::HypothesisViolated { witness, excess })
}

/// `sup { nu(Bx - Ax) : x ∈ B_mu }`: the least `eps` with `(A, B)` in the
/// basic entourage `U_{mu,nu;eps}`.
pub fn operator_qdist(a: &LinOperator, b: &LinOperator, mu: NormChoice, nu: NormChoice) -> Result<ExtReal> {
    Ok(b.sub(a)?.op_norm(mu, nu))
}
