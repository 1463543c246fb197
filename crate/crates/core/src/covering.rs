//! Epsilon-nets, diameter covers, and the gap between precompactness and
//! total boundedness on finite sets.
//!
//! Orientation: a center `z` covers `y` when `rho(z, y) <= eps`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quasimetric::QuasiMetric;
use crate::tol;

pub const NET_EXACT_LIMIT: usize = 20;
pub const COVER_EXACT_LIMIT: usize = 16;

fn within(d: f64, eps: f64, strict: bool) -> bool {
    if strict {
        d < eps
    } else {
        d <= eps
    }
}

/// Centers plus an assignment of every covered point to one of them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsNetCertificate<P> {
    pub epsilon: f64,
    pub strict: bool,
    pub centers: Vec<P>,
    /// `assignment[i]` is the center index covering point `i`.
    pub assignment: Vec<usize>,
    /// Largest `rho(center, point)` over the assignment.
    pub max_distance: f64,
}

impl<P: Clone> EpsNetCertificate<P> {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Re-checks every assignment entry against `points`; returns the largest
    /// distance found.
    pub fn verify<M: QuasiMetric<Point = P>>(&self, m: &M, points: &[P], tol: f64) -> Result<f64> {
        if self.assignment.len() != points.len() {
            return Err(Error::InvalidInput(format!(
                "certificate assigns {} points, got {}",
                self.assignment.len(),
                points.len()
            )));
        }
        let mut worst: f64 = 0.0;
        for (i, (&c, y)) in self.assignment.iter().zip(points).enumerate() {
            let d = m.dist(&self.centers[c], y);
            worst = worst.max(d);
            let ok = if self.strict { d < self.epsilon } else { tol::approx_le(d, self.epsilon, tol) };
            if !ok {
                return Err(Error::CertificateFailed { index: i, deficit: d, bound: self.epsilon });
            }
        }
        Ok(worst)
    }
}

fn assign<M: QuasiMetric>(m: &M, centers: &[M::Point], points: &[M::Point]) -> (Vec<usize>, f64) {
    let mut worst: f64 = 0.0;
    let assignment = points
        .iter()
        .map(|y| {
            let (idx, d) = centers
                .iter()
                .enumerate()
                .map(|(i, c)| (i, m.dist(c, y)))
                .fold((0, f64::INFINITY), |acc, cur| if cur.1 < acc.1 { cur } else { acc });
            worst = worst.max(d);
            idx
        })
        .collect();
    (assignment, worst)
}

/// Where greedy centers may come from.
#[derive(Debug, Clone, Copy)]
pub enum CenterSource<'a, P> {
    /// Centers are points of the set itself.
    Set,
    /// Centers are drawn from an external pool.
    Pool(&'a [P]),
}

/// Greedy epsilon-net.
///
/// Each round targets the uncovered point farthest from the chosen centers
/// (`min_c rho(c, y)`, `+inf` before the first pick; ties to the lowest
/// index), then adds the candidate that covers the target and the most
/// still-uncovered points (ties to the lowest index).
pub fn greedy_net<M: QuasiMetric>(
    m: &M,
    ys: &[M::Point],
    eps: f64,
    source: CenterSource<'_, M::Point>,
    strict: bool,
) -> Result<EpsNetCertificate<M::Point>> {
    greedy_net_indexed(m, ys, eps, source, strict).map(|(cert, _)| cert)
}

/// [`greedy_net`] together with the candidate indices of the chosen centers.
pub fn greedy_net_indexed<M: QuasiMetric>(
    m: &M,
    ys: &[M::Point],
    eps: f64,
    source: CenterSource<'_, M::Point>,
    strict: bool,
) -> Result<(EpsNetCertificate<M::Point>, Vec<usize>)> {
    if !(eps > 0.0) && !(eps == 0.0 && !strict) {
        return Err(Error::NonPositiveEpsilon(eps));
    }
    let cands: &[M::Point] = match source {
        CenterSource::Set => ys,
        CenterSource::Pool(p) => p,
    };
    let n = ys.len();
    let words = n.div_ceil(64);
    // covers[c] is a bitset over ys
    let covers: Vec<Vec<u64>> = cands
        .iter()
        .map(|c| {
            let mut bits = vec![0u64; words];
            for (i, y) in ys.iter().enumerate() {
                if within(m.dist(c, y), eps, strict) {
                    bits[i / 64] |= 1 << (i % 64);
                }
            }
            bits
        })
        .collect();

    let mut uncovered = vec![0u64; words];
    for i in 0..n {
        uncovered[i / 64] |= 1 << (i % 64);
    }
    let mut score = vec![f64::INFINITY; n];
    let mut chosen: Vec<usize> = Vec::new();
    let mut remaining = n;
    while remaining > 0 {
        let mut target = None;
        for i in 0..n {
            if uncovered[i / 64] >> (i % 64) & 1 == 1 && target.is_none_or(|t: usize| score[i] > score[t]) {
                target = Some(i);
            }
        }
        let target = target.unwrap();
        let mut pick: Option<(usize, u32)> = None;
        for (c, bits) in covers.iter().enumerate() {
            if bits[target / 64] >> (target % 64) & 1 == 0 {
                continue;
            }
            let gain: u32 = bits.iter().zip(&uncovered).map(|(b, u)| (b & u).count_ones()).sum();
            if pick.is_none_or(|(_, g)| gain > g) {
                pick = Some((c, gain));
            }
        }
        let (pick, gain) = pick.ok_or(Error::Uncoverable(target))?;
        chosen.push(pick);
        for (u, b) in uncovered.iter_mut().zip(&covers[pick]) {
            *u &= !b;
        }
        remaining -= gain as usize;
        for i in 0..n {
            score[i] = score[i].min(m.dist(&cands[pick], &ys[i]));
        }
    }
    let centers: Vec<M::Point> = chosen.iter().map(|&c| cands[c].clone()).collect();
    let (assignment, max_distance) = assign(m, &centers, ys);
    Ok((EpsNetCertificate { epsilon: eps, strict, centers, assignment, max_distance }, chosen))
}

/// Farthest-point net with each target as its own center: `O(N k)` distance
/// evaluations, used for large sample clouds.
pub fn farthest_point_net<M: QuasiMetric>(
    m: &M,
    ys: &[M::Point],
    eps: f64,
) -> Result<EpsNetCertificate<M::Point>> {
    farthest_point_net_indexed(m, ys, eps).map(|(cert, _)| cert)
}

/// [`farthest_point_net`] together with the indices of the chosen centers.
pub fn farthest_point_net_indexed<M: QuasiMetric>(
    m: &M,
    ys: &[M::Point],
    eps: f64,
) -> Result<(EpsNetCertificate<M::Point>, Vec<usize>)> {
    if !(eps > 0.0) {
        return Err(Error::NonPositiveEpsilon(eps));
    }
    let n = ys.len();
    let mut best = vec![f64::INFINITY; n];
    let mut assignment = vec![0usize; n];
    let mut centers = Vec::new();
    let mut index = Vec::new();
    loop {
        // lowest index among the farthest
        let mut target = None;
        for i in 0..n {
            if best[i] > eps && target.is_none_or(|t: usize| best[i] > best[t]) {
                target = Some(i);
            }
        }
        let Some(t) = target else { break };
        let c = centers.len();
        centers.push(ys[t].clone());
        index.push(t);
        for i in 0..n {
            let d = m.dist(&ys[t], &ys[i]);
            if d < best[i] {
                best[i] = d;
                assignment[i] = c;
            }
        }
    }
    let max_distance = best.iter().cloned().fold(0.0, f64::max);
    Ok((EpsNetCertificate { epsilon: eps, strict: false, centers, assignment, max_distance }, index))
}

/// Exact minimum number of centers (taken from `ys`) covering `ys`.
pub fn min_net_size<M: QuasiMetric>(m: &M, ys: &[M::Point], eps: f64) -> Result<usize> {
    Ok(min_net(m, ys, eps)?.len())
}

/// Exact minimum net as a certificate; branch and bound on the lowest
/// uncovered point.
pub fn min_net<M: QuasiMetric>(
    m: &M,
    ys: &[M::Point],
    eps: f64,
) -> Result<EpsNetCertificate<M::Point>> {
    let n = ys.len();
    if n > NET_EXACT_LIMIT {
        return Err(Error::SizeGuard { size: n, limit: NET_EXACT_LIMIT });
    }
    if eps < 0.0 {
        return Err(Error::NonPositiveEpsilon(eps));
    }
    if n == 0 {
        return Ok(EpsNetCertificate {
            epsilon: eps,
            strict: false,
            centers: vec![],
            assignment: vec![],
            max_distance: 0.0,
        });
    }
    let masks: Vec<u32> = ys
        .iter()
        .map(|c| {
            ys.iter()
                .enumerate()
                .filter(|(_, y)| m.dist(c, y) <= eps)
                .fold(0u32, |acc, (i, _)| acc | (1 << i))
        })
        .collect();
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };

    fn search(
        masks: &[u32],
        full: u32,
        covered: u32,
        stack: &mut Vec<usize>,
        best: &mut Vec<usize>,
    ) {
        if covered == full {
            if stack.len() < best.len() {
                *best = stack.clone();
            }
            return;
        }
        if stack.len() + 1 >= best.len() {
            return;
        }
        let first = (!covered & full).trailing_zeros();
        let mut options: Vec<usize> =
            (0..masks.len()).filter(|&c| masks[c] & (1 << first) != 0).collect();
        options.sort_by_key(|&c| std::cmp::Reverse((masks[c] & !covered).count_ones()));
        for c in options {
            stack.push(c);
            search(masks, full, covered | masks[c], stack, best);
            stack.pop();
        }
    }

    let mut best: Vec<usize> = (0..n).collect();
    search(&masks, full, 0, &mut Vec::new(), &mut best);
    let centers: Vec<M::Point> = best.iter().map(|&c| ys[c].clone()).collect();
    let (assignment, max_distance) = assign(m, &centers, ys);
    Ok(EpsNetCertificate { epsilon: eps, strict: false, centers, assignment, max_distance })
}

/// Blocks of diameter at most `epsilon` covering a finite set; blocks hold
/// indices into the covered set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverCertificate {
    pub epsilon: f64,
    pub blocks: Vec<Vec<usize>>,
}

impl CoverCertificate {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn verify<M: QuasiMetric>(&self, m: &M, ys: &[M::Point], tol: f64) -> Result<()> {
        let mut seen = vec![false; ys.len()];
        for b in &self.blocks {
            let pts: Vec<M::Point> = b.iter().map(|&i| ys[i].clone()).collect();
            let d = diameter(m, &pts);
            if !tol::approx_le(d, self.epsilon, tol) {
                return Err(Error::CertificateFailed { index: b[0], deficit: d, bound: self.epsilon });
            }
            b.iter().for_each(|&i| seen[i] = true);
        }
        match seen.iter().position(|s| !s) {
            Some(i) => Err(Error::Uncoverable(i)),
            None => Ok(()),
        }
    }

    /// One point per block becomes a center: a total-boundedness cover
    /// turned into an epsilon-net of the same size.
    pub fn to_net<M: QuasiMetric>(&self, m: &M, ys: &[M::Point]) -> EpsNetCertificate<M::Point> {
        let centers: Vec<M::Point> = self.blocks.iter().map(|b| ys[b[0]].clone()).collect();
        let mut assignment = vec![0; ys.len()];
        let mut worst: f64 = 0.0;
        for (k, b) in self.blocks.iter().enumerate() {
            for &i in b {
                assignment[i] = k;
                worst = worst.max(m.dist(&centers[k], &ys[i]));
            }
        }
        EpsNetCertificate { epsilon: self.epsilon, strict: false, centers, assignment, max_distance: worst }
    }
}

/// `sup rho(x, y)` over ordered pairs, so it equals the `rho_s` diameter.
pub fn diameter<M: QuasiMetric>(m: &M, set: &[M::Point]) -> f64 {
    let mut d: f64 = 0.0;
    for x in set {
        for y in set {
            d = d.max(m.dist(x, y));
        }
    }
    d
}

/// Exact minimum number of blocks with diameter `<= eps`.
pub fn min_cover_size<M: QuasiMetric>(m: &M, ys: &[M::Point], eps: f64) -> Result<usize> {
    Ok(min_cover(m, ys, eps)?.len())
}

/// Exact minimum cover by subset dynamic programming; feasible blocks are
/// cliques of the relation `rho_s <= eps`.
pub fn min_cover<M: QuasiMetric>(m: &M, ys: &[M::Point], eps: f64) -> Result<CoverCertificate> {
    let n = ys.len();
    if n > COVER_EXACT_LIMIT {
        return Err(Error::SizeGuard { size: n, limit: COVER_EXACT_LIMIT });
    }
    if eps < 0.0 {
        return Err(Error::NonPositiveEpsilon(eps));
    }
    let mut compat = vec![0u32; n];
    for i in 0..n {
        for j in 0..n {
            if m.dist(&ys[i], &ys[j]) <= eps && m.dist(&ys[j], &ys[i]) <= eps {
                compat[i] |= 1 << j;
            }
        }
    }
    let size = 1usize << n;
    let mut clique = vec![false; size];
    clique[0] = true;
    for mask in 1..size {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        clique[mask] = clique[rest] && (rest as u32 & !compat[low]) == 0;
    }
    let mut dp = vec![u8::MAX; size];
    let mut choice = vec![0usize; size];
    dp[0] = 0;
    for mask in 1..size {
        let low = mask & mask.wrapping_neg();
        let others = mask ^ low;
        // enumerate submasks of `others`, always including `low`
        let mut sub = others;
        loop {
            let block = sub | low;
            if clique[block] {
                let cand = dp[mask ^ block].saturating_add(1);
                if cand < dp[mask] {
                    dp[mask] = cand;
                    choice[mask] = block;
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & others;
        }
    }
    let mut blocks = Vec::new();
    let mut mask = size - 1;
    while mask != 0 {
        let b = choice[mask];
        blocks.push((0..n).filter(|i| b & (1 << i) != 0).collect());
        mask ^= b;
    }
    Ok(CoverCertificate { epsilon: eps, blocks })
}

/// Greedy diameter cover for sets beyond the exact limit.
pub fn greedy_cover<M: QuasiMetric>(m: &M, ys: &[M::Point], eps: f64) -> CoverCertificate {
    let n = ys.len();
    let mut assigned = vec![false; n];
    let mut blocks = Vec::new();
    for i in 0..n {
        if assigned[i] {
            continue;
        }
        let mut block = vec![i];
        assigned[i] = true;
        for j in i + 1..n {
            if !assigned[j]
                && block.iter().all(|&k| m.dist(&ys[k], &ys[j]) <= eps && m.dist(&ys[j], &ys[k]) <= eps)
            {
                block.push(j);
                assigned[j] = true;
            }
        }
        blocks.push(block);
    }
    CoverCertificate { epsilon: eps, blocks }
}

/// Finite sets are always precompact; the certificate is exact when the set
/// is small enough, greedy otherwise.
pub fn is_precompact_sample<M: QuasiMetric>(
    m: &M,
    ys: &[M::Point],
    eps: f64,
) -> Result<(bool, EpsNetCertificate<M::Point>)> {
    let net = if ys.len() <= NET_EXACT_LIMIT {
        min_net(m, ys, eps)?
    } else {
        greedy_net(m, ys, eps, CenterSource::Set, false)?
    };
    Ok((true, net))
}

pub fn is_totally_bounded_sample<M: QuasiMetric>(
    m: &M,
    ys: &[M::Point],
    eps: f64,
) -> Result<(bool, CoverCertificate)> {
    let cover = if ys.len() <= COVER_EXACT_LIMIT {
        min_cover(m, ys, eps)?
    } else {
        greedy_cover(m, ys, eps)
    };
    Ok((true, cover))
}

/// One row of an epsilon sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub net_size_greedy: usize,
    pub net_size_exact: Option<usize>,
    pub cover_size_exact: Option<usize>,
}

pub fn sweep<M: QuasiMetric>(m: &M, ys: &[M::Point], epsilons: &[f64]) -> Result<Vec<SweepRow>> {
    epsilons
        .iter()
        .map(|&eps| {
            Ok(SweepRow {
                epsilon: eps,
                net_size_greedy: greedy_net(m, ys, eps, CenterSource::Set, false)?.len(),
                net_size_exact: if ys.len() <= NET_EXACT_LIMIT {
                    Some(min_net_size(m, ys, eps)?)
                } else {
                    None
                },
                cover_size_exact: if ys.len() <= COVER_EXACT_LIMIT {
                    Some(min_cover_size(m, ys, eps)?)
                } else {
                    None
                },
            })
        })
        .collect()
}
