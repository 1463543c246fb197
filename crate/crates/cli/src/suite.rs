//! The seeded invariant battery behind `property-suite`.
//!
//! Trial `t` of check `c` draws from its own ChaCha stream `(c << 32) | t`
//! under the run seed, so results do not depend on scheduling.

use asymlab::covering;
use asymlab::duality::{self, Functional, PolarBall, WFlatEntourage};
use asymlab::geometry::{BallSample, VertexForm};
use asymlab::linalg;
use asymlab::operators::{self, LinOperator};
use asymlab::quasimetric::{NormMetric, Symmetrized};
use asymlab::random;
use asymlab::sequences::{self, SequencePrefix};
use asymlab::tol::approx_le;
use asymlab::{ExtReal, NormChoice, PolyAsymNorm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

type Trial = fn(&mut ChaCha8Rng, f64) -> Result<(), String>;

const CHECKS: &[(&str, usize, Trial)] = &[
    ("norm-axioms", 200, norm_axioms),
    ("lp-vs-vertex-form", 200, lp_vs_vertex_form),
    ("sym-norm-below-flat-norm", 200, sym_below_flat),
    ("cone-closure", 200, cone_closure),
    ("compact-implies-bounded", 200, compact_implies_bounded),
    ("operator-qdist-triangle", 200, qdist_triangle),
    ("combine-nets", 20, combine_nets),
    ("lift-nets", 20, lift_nets),
    ("schauder", 10, schauder),
    ("cauchy-chain", 200, cauchy_chain),
    ("net-below-cover", 100, net_below_cover),
    ("dual-continuity", 50, dual_continuity),
    ("wflat-pullback", 200, wflat_pullback),
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub trial: usize,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckSummary {
    pub check: String,
    pub trials: usize,
    pub passed: usize,
    pub failed: usize,
    pub first_failure: Option<Failure>,
}

pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.0).collect()
}

pub fn trial_rng(seed: u64, check: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((check as u64) << 32) | trial as u64);
    rng
}

/// Runs every check; `trials` overrides the per-check counts. Must be called
/// inside the thread pool that should do the work.
pub fn run(seed: u64, tol: f64, trials: Option<usize>) -> Vec<CheckSummary> {
    CHECKS
        .iter()
        .enumerate()
        .map(|(c, &(name, default, f))| {
            let n = trials.unwrap_or(default);
            let outcomes: Vec<Result<(), String>> =
                (0..n).into_par_iter().map(|t| f(&mut trial_rng(seed, c, t), tol)).collect();
            let first_failure = outcomes
                .iter()
                .enumerate()
                .find_map(|(t, o)| o.as_ref().err().map(|d| Failure { trial: t, detail: d.clone() }));
            let failed = outcomes.iter().filter(|o| o.is_err()).count();
            CheckSummary { check: name.to_string(), trials: n, passed: n - failed, failed, first_failure }
        })
        .collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn norm_pair<R: Rng>(rng: &mut R, max_dim: usize) -> (PolyAsymNorm, PolyAsymNorm) {
    let n = rng.random_range(1..=max_dim);
    let k = rng.random_range(1..=max_dim);
    (random::norm(rng, n), random::norm(rng, k))
}

/// `eps` proportional to the spread of `A(sample)`, so nets stay small.
pub fn image_epsilon(a: &LinOperator, sample: &BallSample) -> f64 {
    let qs = a.codomain().symmetrize();
    let spread = sample.points.iter().map(|x| qs.eval_unchecked(&a.apply(x))).fold(0.0_f64, f64::max);
    (0.2 * spread).max(0.05)
}

fn norm_axioms(rng: &mut ChaCha8Rng, tol: f64) -> Result<(), String> {
    let dim = rng.random_range(1..=4);
    let p = random::norm(rng, dim);
    ensure(p.validate().valid, || format!("AN1 fails for {p:?}"))?;
    let ps = p.symmetrize();
    for _ in 0..20 {
        let x = random::vector(rng, dim, 3);
        let y = random::vector(rng, dim, 3);
        let alpha = random::quarter(rng, 3).abs();
        let (px, py) = (p.eval_unchecked(&x), p.eval_unchecked(&y));
        let xy = linalg::add(&x, &y);
        ensure(approx_le(p.eval_unchecked(&xy), px + py, tol), || format!("AN3 at {x:?}, {y:?}"))?;
        let ax = linalg::scale(&x, alpha);
        let hom = p.eval_unchecked(&ax);
        ensure(approx_le(hom, alpha * px, tol) && approx_le(alpha * px, hom, tol), || format!("AN2 at {x:?}"))?;
        let lip = ps.eval_unchecked(&linalg::sub(&x, &y));
        ensure(approx_le((px - py).abs(), lip, tol), || format!("|p(x)-p(y)| > p_s(x-y) at {x:?}, {y:?}"))?;
    }
    Ok(())
}

fn lp_vs_vertex_form(rng: &mut ChaCha8Rng, tol: f64) -> Result<(), String> {
    let dim = rng.random_range(1..=3);
    let p = random::norm(rng, dim);
    let c = random::vector(rng, dim, 2);
    let lp = p.ball_support(&c).map_err(|e| e.to_string())?;
    let vf = VertexForm::of_unit_ball(&p).support(&c).max(0.0);
    let ok = match lp {
        ExtReal::Infinite => vf == f64::INFINITY,
        ExtReal::Finite(v) => approx_le(v, vf, tol) && approx_le(vf, v, tol),
    };
    ensure(ok, || format!("LP {lp} vs vertex form {vf} for c = {c:?}"))
}

fn sym_below_flat(rng: &mut ChaCha8Rng, tol: f64) -> Result<(), String> {
    let (p, q) = norm_pair(rng, 3);
    let a = random::bounded_operator(rng, &p, &q);
    let flat = a.flat_norm().to_f64();
    let sym = a.sym_op_norm();
    ensure(approx_le(sym, flat, tol), || format!("||A|| = {sym} > ||A| = {flat}"))
}

fn cone_closure(rng: &mut ChaCha8Rng, tol: f64) -> Result<(), String> {
    let (p, q) = norm_pair(rng, 3);
    let a = random::bounded_operator(rng, &p, &q);
    let b = random::bounded_operator(rng, &p, &q);
    let alpha = random::quarter(rng, 3).abs();
    let (na, nb) = (a.flat_norm().to_f64(), b.flat_norm().to_f64());
    let sum = a.add(&b).map_err(|e| e.to_string())?.flat_norm();
    ensure(sum.approx_le(ExtReal::Finite(na + nb), tol), || format!("||A+B| = {sum} > {}", na + nb))?;
    let scaled = a.scale(alpha).flat_norm().to_f64();
    ensure(approx_le(scaled, alpha * na, tol) && approx_le(alpha * na, scaled, tol), || {
        format!("||aA| = {scaled} != {alpha} * {na}")
    })
}

fn compact_implies_bounded(rng: &mut ChaCha8Rng, _tol: f64) -> Result<(), String> {
    let (p, q) = norm_pair(rng, 3);
    let a = random::operator(rng, &p, &q);
    for mu in NormChoice::ALL {
        for nu in NormChoice::ALL {
            let v = a.is_compact(mu, nu);
            if v.compact && !a.is_bounded(mu, nu).0 {
                return Err(format!("compact but unbounded for ({mu}, {nu})"));
            }
            if let Some(d) = &v.witness_ray {
                let dom = p.select(mu);
                let rec = dom.generators().iter().all(|g| linalg::dot(g, d) <= 1e-9);
                ensure(rec && v.growth.unwrap_or(0.0) > 0.0, || format!("bad witness {d:?}"))?;
            }
        }
    }
    Ok(())
}

fn qdist_triangle(rng: &mut ChaCha8Rng, tol: f64) -> Result<(), String> {
    let (p, q) = norm_pair(rng, 2);
    let ops: Vec<LinOperator> = (0..3).map(|_| random::operator(rng, &p, &q)).collect();
    let d = |i: usize, j: usize| operators::operator_qdist(&ops[i], &ops[j], NormChoice::Base, NormChoice::Base);
    let (ac, ab, bc) = (d(0, 2).unwrap(), d(0, 1).unwrap(), d(1, 2).unwrap());
    ensure(ac.approx_le(ab + bc, tol), || format!("{ac} > {ab} + {bc}"))
}

fn combine_nets(rng: &mut ChaCha8Rng, tol: f64) -> Result<(), String> {
    let (p, q) = norm_pair(rng, 2);
    let a1 = random::compact_operator(rng, &p, &q);
    let a2 = random::compact_operator(rng, &p, &q);
    let sample = BallSample::new(&p, 10.0, 512, rng.random());
    let eps = image_epsilon(&a1, &sample).max(image_epsilon(&a2, &sample));
    let n1 = a1.image_net(NormChoice::Base, &sample, eps).map_err(|e| e.to_string())?;
    let n2 = a2.image_net(NormChoice::Base, &sample, eps).map_err(|e| e.to_string())?;
    let c = operators::combine_nets(&a1, &n1, &a2, &n2, &sample, tol).map_err(|e| e.to_string())?;
    ensure(approx_le(c.max_distance, 2.0 * eps, tol), || format!("deficit {} > 2 eps", c.max_distance))
}

fn lift_nets(rng: &mut ChaCha8Rng, tol: f64) -> Result<(), String> {
    let (p, q) = norm_pair(rng, 2);
    let a = random::compact_operator(rng, &p, &q);
    let family = random::convergent_family(rng, &a, 400);
    let sample = BallSample::new(&p, 10.0, 512, rng.random());
    let eps = image_epsilon(&a, &sample);
    let l = operators::limit_of_compacts_net(&a, &family, NormChoice::Base, NormChoice::Base, eps, &sample, tol)
        .map_err(|e| e.to_string())?;
    ensure(approx_le(l.certificate.max_distance, 3.0 * eps, tol), || {
        format!("deficit {} > 3 eps", l.certificate.max_distance)
    })
}

pub fn schauder_epsilon(a: &LinOperator) -> f64 {
    (0.25 * a.flat_norm().to_f64()).max(0.05)
}

fn schauder(rng: &mut ChaCha8Rng, tol: f64) -> Result<(), String> {
    let (p, q) = norm_pair(rng, 2);
    let a = random::compact_operator(rng, &p, &q);
    let eps = schauder_epsilon(&a);
    let r = duality::schauder_certificate(&a, eps, 6, tol).map_err(|e| e.to_string())?;
    ensure(r.verified, || format!("max deficit {} > 3 eps = {}", r.max_deficit, 3.0 * eps))
}

fn cauchy_chain(rng: &mut ChaCha8Rng, _tol: f64) -> Result<(), String> {
    let len = rng.random_range(2..=16);
    let eps = [0.5, 1.5, 3.0][rng.random_range(0..3)];
    let report = if rng.random_bool(0.5) {
        let n = rng.random_range(2..=8);
        let t = random::tabular(rng, n);
        let seq = random::index_sequence(rng, t.len(), len);
        sequences::classify(&SequencePrefix::new(&t, seq).map_err(|e| e.to_string())?, eps)
    } else {
        let dim = rng.random_range(1..=2);
        let m = NormMetric::new(random::norm(rng, dim));
        let seq = random::point_sequence(rng, m.dim(), len);
        sequences::classify(&SequencePrefix::new(&m, seq).map_err(|e| e.to_string())?, eps)
    }
    .map_err(|e| e.to_string())?;
    let v = sequences::check_chain(&report);
    ensure(v.is_empty(), || format!("violated links {v:?}"))
}

fn net_below_cover(rng: &mut ChaCha8Rng, _tol: f64) -> Result<(), String> {
    let m = NormMetric::new(random::norm(rng, 2));
    let size = rng.random_range(1..=10);
    let ys: Vec<Vec<f64>> = (0..size).map(|_| random::vector(rng, 2, 2)).collect();
    let eps = [0.25, 0.5, 1.0, 2.0][rng.random_range(0..4)];
    let net = covering::min_net_size(&m, &ys, eps).map_err(|e| e.to_string())?;
    let cover = covering::min_cover_size(&m, &ys, eps).map_err(|e| e.to_string())?;
    let cover_s = covering::min_cover_size(&Symmetrized(&m), &ys, eps).map_err(|e| e.to_string())?;
    ensure(net <= cover && cover == cover_s, || format!("net {net}, cover {cover}, symmetric cover {cover_s}"))
}

/// `psi1` anywhere in the cone spanned by the polar, `psi2 - psi1` inside
/// `delta` times the polar.
pub fn dual_pair<R: Rng>(rng: &mut R, polar: &PolarBall, delta: f64) -> (Functional, Functional) {
    let combo = |rng: &mut R| -> Vec<f64> {
        let w: Vec<f64> = polar.vertices.iter().map(|_| rng.random::<f64>()).collect();
        let total: f64 = w.iter().sum::<f64>().max(f64::MIN_POSITIVE);
        let mut out = vec![0.0; polar.dim()];
        for (wi, v) in w.iter().zip(&polar.vertices) {
            out = linalg::add(&out, &linalg::scale(v, wi / total));
        }
        out
    };
    let base = linalg::scale(&combo(rng), 3.0 * rng.random::<f64>());
    let step = linalg::scale(&combo(rng), delta);
    (Functional { covector: base.clone() }, Functional { covector: linalg::add(&base, &step) })
}

fn dual_continuity(rng: &mut ChaCha8Rng, tol: f64) -> Result<(), String> {
    let (p, q) = norm_pair(rng, 2);
    let a = random::bounded_operator(rng, &p, &q);
    let eps = 0.5;
    let delta = match duality::dual_continuity_radius(&a, eps).map_err(|e| e.to_string())? {
        ExtReal::Finite(d) => d,
        ExtReal::Infinite => 1.0,
    };
    let polar = PolarBall::new(&q, tol).map_err(|e| e.to_string())?;
    for _ in 0..50 {
        let (psi1, psi2) = dual_pair(rng, &polar, delta);
        let pre = duality::dual_qdist(&psi1, &psi2, &q).map_err(|e| e.to_string())?;
        if !pre.approx_le(ExtReal::Finite(delta), tol) {
            continue;
        }
        let f1 = duality::dual_operator(&a, &psi1).map_err(|e| e.to_string())?;
        let f2 = duality::dual_operator(&a, &psi2).map_err(|e| e.to_string())?;
        let post = duality::dual_qdist(&f1, &f2, &p).map_err(|e| e.to_string())?;
        ensure(post.approx_le(ExtReal::Finite(eps), tol), || format!("pair at distance {pre} maps to {post}"))?;
    }
    Ok(())
}

fn wflat_pullback(rng: &mut ChaCha8Rng, _tol: f64) -> Result<(), String> {
    let (p, q) = norm_pair(rng, 3);
    let a = random::operator(rng, &p, &q);
    let xs: Vec<Vec<f64>> = (0..3).map(|_| random::vector(rng, p.dim(), 2)).collect();
    let ent = WFlatEntourage::new(xs, 0.5).map_err(|e| e.to_string())?;
    let back = ent.pullback(&a);
    let psi1 = Functional { covector: random::vector(rng, q.dim(), 1) };
    let psi2 = Functional { covector: random::vector(rng, q.dim(), 1) };
    if back.contains(&psi1, &psi2) {
        let f1 = duality::dual_operator(&a, &psi1).map_err(|e| e.to_string())?;
        let f2 = duality::dual_operator(&a, &psi2).map_err(|e| e.to_string())?;
        ensure(ent.contains(&f1, &f2), || format!("pullback pair {psi1:?}, {psi2:?} escapes"))?;
    }
    Ok(())
}
