//! Cauchy notions for finite sequence prefixes in a quasi-metric space.
//!
//! Every notion quantifies "there is an index `n0` after which ...". On a
//! prefix `x_1..x_N` that is trivially true with `n0 = N`, so verdicts are
//! taken at a horizon: `n0` may range only over `1..=N - min_tail + 1`,
//! i.e. the witnessed tail has at least `min_tail` terms (default: half the
//! prefix, rounded up). Indices in reports are 1-based.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quasimetric::QuasiMetric;

/// Strict comparisons `d < eps` carry a tiny guard against round-off.
fn close(d: f64, eps: f64) -> bool {
    d < eps - 1e-12 * eps.max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Notion {
    LeftRho,
    RightRho,
    Rho,
    LeftK,
    RightK,
    WeaklyLeftK,
    WeaklyRightK,
}

impl Notion {
    pub const ALL: [Notion; 7] = [
        Notion::LeftRho,
        Notion::RightRho,
        Notion::Rho,
        Notion::LeftK,
        Notion::RightK,
        Notion::WeaklyLeftK,
        Notion::WeaklyRightK,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    /// Holds from index `n0`; `witness` is the pool index for the rho notions.
    Holds { n0: usize, witness: Option<usize> },
    /// Fails at every admissible `n0`. `pair` is the first violating pair
    /// for `n0 = 1`: `(k, n)` in the orientation of the definition, or
    /// `(pool index + 1, n)` for the rho notions (checked against the first
    /// pool point).
    Fails { pair: (usize, usize), distance: f64 },
    /// The rho notions with an empty witness pool.
    Undecidable,
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds { .. })
    }

    fn n0(&self) -> Option<usize> {
        match self {
            Verdict::Holds { n0, .. } => Some(*n0),
            _ => None,
        }
    }
}

/// A prefix `x_1..x_N` with a finite pool standing in for "some x in X".
#[derive(Debug, Clone)]
pub struct SequencePrefix<'a, M: QuasiMetric> {
    pub space: &'a M,
    pub points: Vec<M::Point>,
    /// `None` uses the sequence's own points.
    pub witness_pool: Option<Vec<M::Point>>,
}

impl<'a, M: QuasiMetric> SequencePrefix<'a, M> {
    pub fn new(space: &'a M, points: Vec<M::Point>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidInput("a sequence prefix needs at least two points".into()));
        }
        Ok(SequencePrefix { space, points, witness_pool: None })
    }

    pub fn with_pool(mut self, pool: Vec<M::Point>) -> Self {
        self.witness_pool = Some(pool);
        self
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn pool(&self) -> &[M::Point] {
        self.witness_pool.as_deref().unwrap_or(&self.points)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CauchyReport {
    pub epsilon: f64,
    pub horizon: usize,
    /// Largest admissible `n0`.
    pub max_start: usize,
    pub left_rho: Verdict,
    pub right_rho: Verdict,
    pub rho: Verdict,
    pub left_k: Verdict,
    pub right_k: Verdict,
    pub weakly_left_k: Verdict,
    pub weakly_right_k: Verdict,
    /// Whether `x_{n0}` of the weakly-K verdicts is in the pool, which is
    /// what the weakly-K => rho implication needs at finite scale.
    #[serde(skip)]
    weak_witness_in_pool: [bool; 2],
}

impl CauchyReport {
    pub fn verdict(&self, n: Notion) -> &Verdict {
        match n {
            Notion::LeftRho => &self.left_rho,
            Notion::RightRho => &self.right_rho,
            Notion::Rho => &self.rho,
            Notion::LeftK => &self.left_k,
            Notion::RightK => &self.right_k,
            Notion::WeaklyLeftK => &self.weakly_left_k,
            Notion::WeaklyRightK => &self.weakly_right_k,
        }
    }
}

pub fn default_min_tail(n: usize) -> usize {
    n.div_ceil(2)
}

pub fn classify<M: QuasiMetric>(s: &SequencePrefix<'_, M>, eps: f64) -> Result<CauchyReport>
where
    M::Point: PartialEq,
{
    classify_with_tail(s, eps, default_min_tail(s.len()))
}

pub fn classify_with_tail<M: QuasiMetric>(
    s: &SequencePrefix<'_, M>,
    eps: f64,
    min_tail: usize,
) -> Result<CauchyReport>
where
    M::Point: PartialEq,
{
    if !(eps > 0.0) {
        return Err(Error::NonPositiveEpsilon(eps));
    }
    let n = s.len();
    if min_tail == 0 || min_tail > n {
        return Err(Error::InvalidInput(format!("min_tail {min_tail} outside 1..={n}")));
    }
    let max_start = n - min_tail + 1;
    let m = s.space;
    let d: Vec<Vec<f64>> = s
        .points
        .iter()
        .map(|a| s.points.iter().map(|b| m.dist(a, b)).collect())
        .collect();

    // orientation: left uses d[k][n] (earlier, later), right uses d[n][k]
    let k_verdict = |left: bool| -> Verdict {
        let dd = |k: usize, j: usize| if left { d[k][j] } else { d[j][k] };
        let mut last_bad: Option<usize> = None;
        let mut first_pair: Option<(usize, usize, f64)> = None;
        for k in 0..n {
            for j in k..n {
                if !close(dd(k, j), eps) {
                    last_bad = Some(k);
                    if first_pair.is_none() {
                        first_pair = Some((k + 1, j + 1, dd(k, j)));
                    }
                }
            }
        }
        let n0 = last_bad.map_or(1, |k| k + 2);
        if n0 <= max_start {
            Verdict::Holds { n0, witness: None }
        } else {
            let (a, b, dist) = first_pair.expect("a failure has a violating pair");
            Verdict::Fails { pair: (a, b), distance: dist }
        }
    };

    let weak_verdict = |left: bool| -> Verdict {
        let dd = |k: usize, j: usize| if left { d[k][j] } else { d[j][k] };
        for n0 in 0..max_start {
            if (n0..n).all(|j| close(dd(n0, j), eps)) {
                return Verdict::Holds { n0: n0 + 1, witness: None };
            }
        }
        let j = (0..n).find(|&j| !close(dd(0, j), eps)).expect("fails at n0 = 1");
        Verdict::Fails { pair: (1, j + 1), distance: dd(0, j) }
    };

    let rho_verdict = {
        let mut last_bad: Option<usize> = None;
        let mut first_pair: Option<(usize, usize, f64)> = None;
        for k in 0..n {
            for j in k..n {
                let worst = d[k][j].max(d[j][k]);
                if !close(worst, eps) {
                    last_bad = Some(k);
                    if first_pair.is_none() {
                        first_pair = Some((k + 1, j + 1, worst));
                    }
                }
            }
        }
        let n0 = last_bad.map_or(1, |k| k + 2);
        if n0 <= max_start {
            Verdict::Holds { n0, witness: None }
        } else {
            let (a, b, dist) = first_pair.unwrap();
            Verdict::Fails { pair: (a, b), distance: dist }
        }
    };

    let pool = s.pool();
    let pool_verdict = |left: bool| -> Verdict {
        if pool.is_empty() {
            return Verdict::Undecidable;
        }
        let mut best: Option<(usize, usize)> = None;
        for (w, x) in pool.iter().enumerate() {
            let dist = |j: usize| if left { m.dist(x, &s.points[j]) } else { m.dist(&s.points[j], x) };
            let n0 = (0..n).rev().find(|&j| !close(dist(j), eps)).map_or(1, |j| j + 2);
            if best.is_none_or(|(b, _)| n0 < b) {
                best = Some((n0, w));
            }
        }
        let (n0, w) = best.unwrap();
        if n0 <= max_start {
            Verdict::Holds { n0, witness: Some(w) }
        } else {
            let x = &pool[0];
            let dist = |j: usize| if left { m.dist(x, &s.points[j]) } else { m.dist(&s.points[j], x) };
            let j = (0..n).find(|&j| !close(dist(j), eps)).unwrap();
            Verdict::Fails { pair: (1, j + 1), distance: dist(j) }
        }
    };

    let weakly_left_k = weak_verdict(true);
    let weakly_right_k = weak_verdict(false);
    let in_pool = |v: &Verdict| {
        v.n0().is_some_and(|n0| pool.iter().any(|p| *p == s.points[n0 - 1]))
    };
    let weak_witness_in_pool = [in_pool(&weakly_left_k), in_pool(&weakly_right_k)];

    Ok(CauchyReport {
        epsilon: eps,
        horizon: n,
        max_start,
        left_rho: pool_verdict(true),
        right_rho: pool_verdict(false),
        rho: rho_verdict,
        left_k: k_verdict(true),
        right_k: k_verdict(false),
        weakly_left_k,
        weakly_right_k,
        weak_witness_in_pool,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainViolation {
    pub premise: Notion,
    pub conclusion: Notion,
}

/// Checks the implications that hold at every finite horizon:
/// `rho => left-K, right-K`, `left-K => weakly-left-K => left-rho`, and the
/// right-hand chain. The weakly-K => rho link is only checked when the
/// weakly-K witness `x_{n0}` is in the pool, and never against an
/// undecidable verdict. Converses are not checked: they are not theorems.
pub fn check_chain(r: &CauchyReport) -> Vec<ChainViolation> {
    let mut out = Vec::new();
    let mut link = |a: Notion, b: Notion, applicable: bool| {
        if applicable && r.verdict(a).holds() && !r.verdict(b).holds() {
            out.push(ChainViolation { premise: a, conclusion: b });
        }
    };
    link(Notion::Rho, Notion::LeftK, true);
    link(Notion::Rho, Notion::RightK, true);
    link(Notion::LeftK, Notion::WeaklyLeftK, true);
    link(Notion::RightK, Notion::WeaklyRightK, true);
    let decidable = |v: &Verdict| !matches!(v, Verdict::Undecidable);
    link(
        Notion::WeaklyLeftK,
        Notion::LeftRho,
        r.weak_witness_in_pool[0] && decidable(&r.left_rho),
    );
    link(
        Notion::WeaklyRightK,
        Notion::RightRho,
        r.weak_witness_in_pool[1] && decidable(&r.right_rho),
    );
    out
}

/// `rho(x, x_n) <= eps` for the last `tail` terms. Note the orientation:
/// limit first, term second.
pub fn converges_to<M: QuasiMetric>(
    s: &SequencePrefix<'_, M>,
    x: &M::Point,
    eps: f64,
    tail: usize,
) -> Result<bool> {
    if tail == 0 || tail > s.len() {
        return Err(Error::InvalidInput(format!("tail {tail} outside 1..={}", s.len())));
    }
    let start = s.len() - tail;
    Ok(s.points[start..].iter().all(|p| s.space.dist(x, p) <= eps))
}
