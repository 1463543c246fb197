//! Seeded random instances for property runs.
//!
//! Entries are drawn on a quarter grid so that small products and sums stay
//! exact in floating point.

use rand::Rng;

use crate::geometry::VertexForm;
use crate::linalg;
use crate::norms::{NormChoice, PolyAsymNorm};
use crate::operators::LinOperator;
use crate::quasimetric::TabularMetric;

/// Uniform on `{-k/4, ..., k/4}` with `k = 4 * bound`.
pub fn quarter<R: Rng>(rng: &mut R, bound: i32) -> f64 {
    rng.random_range(-4 * bound..=4 * bound) as f64 / 4.0
}

pub fn vector<R: Rng>(rng: &mut R, dim: usize, bound: i32) -> Vec<f64> {
    (0..dim).map(|_| quarter(rng, bound)).collect()
}

/// A valid norm with between `dim` and `dim + 3` generators.
pub fn norm<R: Rng>(rng: &mut R, dim: usize) -> PolyAsymNorm {
    loop {
        let k = rng.random_range(dim..=dim + 3);
        let gens = (0..k).map(|_| vector(rng, dim, 2)).collect();
        if let Ok(p) = PolyAsymNorm::new(dim, gens) {
            if p.validate().valid {
                return p;
            }
        }
    }
}

pub fn operator<R: Rng>(rng: &mut R, domain: &PolyAsymNorm, codomain: &PolyAsymNorm) -> LinOperator {
    let m = (0..codomain.dim()).map(|_| vector(rng, domain.dim(), 2)).collect();
    LinOperator::new(m, domain.clone(), codomain.clone()).expect("valid norms and shapes")
}

/// A random operator with finite `(p, q)` norm; falls back to a compact one.
pub fn bounded_operator<R: Rng>(rng: &mut R, domain: &PolyAsymNorm, codomain: &PolyAsymNorm) -> LinOperator {
    for _ in 0..50 {
        let a = operator(rng, domain, codomain);
        if a.flat_norm().is_finite() {
            return a;
        }
    }
    compact_operator(rng, domain, codomain)
}

/// A random `(p, q)`-compact operator.
///
/// Rejection sampling first; otherwise a random matrix composed with the
/// orthogonal projection that kills the recession rays of `B_p`.
pub fn compact_operator<R: Rng>(rng: &mut R, domain: &PolyAsymNorm, codomain: &PolyAsymNorm) -> LinOperator {
    for _ in 0..50 {
        let a = operator(rng, domain, codomain);
        if a.is_compact(NormChoice::Base, NormChoice::Base).compact {
            return a;
        }
    }
    let n = domain.dim();
    let rays = VertexForm::of_unit_ball(domain).rays;
    let proj = complement_projection(&rays, n);
    let m = operator(rng, domain, codomain);
    let matrix = m
        .matrix()
        .iter()
        .map(|row| {
            (0..n)
                .map(|j| {
                    let v: f64 = (0..n).map(|k| row[k] * proj[k][j]).sum();
                    // rounding residue of an exact zero
                    if v.abs() < 1e-12 { 0.0 } else { v }
                })
                .collect()
        })
        .collect();
    let a = LinOperator::new(matrix, domain.clone(), codomain.clone()).expect("shapes agree");
    if a.is_compact(NormChoice::Base, NormChoice::Base).compact {
        a
    } else {
        LinOperator::zero(domain.clone(), codomain.clone()).expect("valid norms")
    }
}

/// `I - P` with `P` the orthogonal projection onto `span(vs)`.
fn complement_projection(vs: &[Vec<f64>], n: usize) -> Vec<Vec<f64>> {
    // Gram-Schmidt on the rays
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vs {
        let mut w = v.clone();
        for b in &basis {
            let c = linalg::dot(&w, b);
            w = linalg::sub(&w, &linalg::scale(b, c));
        }
        let len = linalg::dot(&w, &w).sqrt();
        if len > 1e-10 {
            basis.push(linalg::scale(&w, 1.0 / len));
        }
    }
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let id = if i == j { 1.0 } else { 0.0 };
                    id - basis.iter().map(|b| b[i] * b[j]).sum::<f64>()
                })
                .collect()
        })
        .collect()
}

/// `A_n = (1 - 1/n) A + (1/n) C` for `n = 1..=len`, with `C` compact and
/// `A - C` bounded, so `sup q(Ax - A_n x) = ||A - C| / n`.
pub fn convergent_family<R: Rng>(rng: &mut R, a: &LinOperator, len: usize) -> Vec<LinOperator> {
    let mut c = compact_operator(rng, a.domain(), a.codomain());
    if !a.sub(&c).expect("same spaces").flat_norm().is_finite() {
        c = LinOperator::zero(a.domain().clone(), a.codomain().clone()).expect("valid norms");
    }
    (1..=len)
        .map(|n| {
            let t = 1.0 / n as f64;
            a.scale(1.0 - t).add(&c.scale(t)).expect("same spaces")
        })
        .collect()
}

/// Finite quasi-metric: shortest-path closure of random integer arc weights
/// in `0..=5`, so some pairs may sit at distance zero.
pub fn tabular<R: Rng>(rng: &mut R, n: usize) -> TabularMetric {
    let mut d: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 0.0 } else { rng.random_range(0..=5) as f64 }).collect())
        .collect();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    let labels = (0..n).map(|i| format!("t{i}")).collect();
    TabularMetric::new(labels, d).expect("shortest paths satisfy the triangle inequality")
}

/// Index sequence into a table, drifting toward a random attractor.
pub fn index_sequence<R: Rng>(rng: &mut R, table_len: usize, len: usize) -> Vec<usize> {
    let target = rng.random_range(0..table_len);
    (0..len)
        .map(|i| {
            if rng.random_range(0..len) < i {
                target
            } else {
                rng.random_range(0..table_len)
            }
        })
        .collect()
}

/// Points in `R^dim`, either a damped walk or a mix of two clusters.
pub fn point_sequence<R: Rng>(rng: &mut R, dim: usize, len: usize) -> Vec<Vec<f64>> {
    let mut x = vector(rng, dim, 3);
    let mut out = Vec::with_capacity(len);
    for n in 1..=len {
        out.push(x.clone());
        let step = vector(rng, dim, 2);
        x = linalg::add(&x, &linalg::scale(&step, 1.0 / (n * n) as f64));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_produce_valid_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for dim in 1..=3 {
            let p = norm(&mut rng, dim);
            let q = norm(&mut rng, dim);
            assert!(p.validate().valid);
            assert!(bounded_operator(&mut rng, &p, &q).flat_norm().is_finite());
            let c = compact_operator(&mut rng, &p, &q);
            assert!(c.is_compact(NormChoice::Base, NormChoice::Base).compact);
            let fam = convergent_family(&mut rng, &c, 5);
            assert_eq!(fam.len(), 5);
        }
        let t = tabular(&mut rng, 8);
        assert_eq!(t.len(), 8);
    }

    #[test]
    fn seeded_streams_repeat() {
        let a = norm(&mut ChaCha8Rng::seed_from_u64(9), 2);
        let b = norm(&mut ChaCha8Rng::seed_from_u64(9), 2);
        assert_eq!(a, b);
    }
}
