//! Vertex form of small pointed polyhedra and deterministic ball sampling.
//!
//! Dimensions here are tiny (the toolkit targets `n <= 4`), so vertices and
//! extreme rays are enumerated by brute force over constraint subsets.

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::linalg;
use crate::norms::PolyAsymNorm;

const FEAS_TOL: f64 = 1e-9;

/// `conv(vertices) + cone(rays)` for a pointed polyhedron.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VertexForm {
    pub dim: usize,
    pub vertices: Vec<Vec<f64>>,
    pub rays: Vec<Vec<f64>>,
}

fn push_unique(set: &mut Vec<Vec<f64>>, v: Vec<f64>) {
    let dup = set.iter().any(|w| {
        let scale = 1f64.max(linalg::norm_inf(w)).max(linalg::norm_inf(&v));
        linalg::norm_inf(&linalg::sub(w, &v)) <= 1e-9 * scale
    });
    if !dup {
        set.push(v);
    }
}

fn feasible(g: &[Vec<f64>], h: &[f64], x: &[f64]) -> bool {
    let scale = 1f64.max(linalg::norm_inf(x));
    g.iter().zip(h).all(|(r, &b)| linalg::dot(r, x) <= b + FEAS_TOL * scale)
}

impl VertexForm {
    /// Vertex form of `{x : G x <= h}`; assumes the polyhedron is pointed
    /// (the rows of `G` span `R^dim`).
    pub fn of_polyhedron(g: &[Vec<f64>], h: &[f64], dim: usize) -> Self {
        let mut vertices = Vec::new();
        for idx in (0..g.len()).combinations(dim) {
            let rows: Vec<Vec<f64>> = idx.iter().map(|&i| g[i].clone()).collect();
            let rhs: Vec<f64> = idx.iter().map(|&i| h[i]).collect();
            if let Some(x) = linalg::solve_square(&rows, &rhs) {
                if feasible(g, h, &x) {
                    push_unique(&mut vertices, x);
                }
            }
        }
        let zeros = vec![0.0; g.len()];
        let mut rays = Vec::new();
        let mut candidates: Vec<Vec<f64>> = Vec::new();
        if dim == 1 {
            candidates.push(vec![1.0]);
        } else {
            for idx in (0..g.len()).combinations(dim - 1) {
                let rows: Vec<Vec<f64>> = idx.iter().map(|&i| g[i].clone()).collect();
                if linalg::rank(&rows, dim) == dim - 1 {
                    if let Some(v) = linalg::null_vector(&rows, dim) {
                        candidates.push(v);
                    }
                }
            }
        }
        for v in candidates {
            for d in [v.clone(), linalg::neg(&v)] {
                let s = linalg::norm_inf(&d);
                let d = linalg::scale(&d, 1.0 / s);
                if feasible(g, &zeros, &d) {
                    push_unique(&mut rays, d);
                }
            }
        }
        VertexForm { dim, vertices, rays }
    }

    pub fn of_unit_ball(p: &PolyAsymNorm) -> Self {
        let h = vec![1.0; p.generators().len()];
        Self::of_polyhedron(p.generators(), &h, p.dim())
    }

    pub fn is_bounded(&self) -> bool {
        self.rays.is_empty()
    }

    /// `sup <c, x>` over the polyhedron; `+inf` when some ray has `<c, r> > 0`.
    pub fn support(&self, c: &[f64]) -> f64 {
        let scale = 1f64.max(linalg::norm_inf(c));
        if self.rays.iter().any(|r| linalg::dot(c, r) > FEAS_TOL * scale) {
            return f64::INFINITY;
        }
        self.vertices
            .iter()
            .map(|v| linalg::dot(c, v))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest absolute vertex coordinate.
    pub fn extent(&self) -> f64 {
        self.vertices.iter().map(|v| linalg::norm_inf(v)).fold(0.0, f64::max)
    }
}

const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += (i % base) as f64 * f;
        i /= base;
        f *= inv;
    }
    r
}

/// Deterministic points of `B_p ∩ [-R, R]^n`.
///
/// Index 0 is the origin, then every vertex of the truncated ball, then
/// Halton points (seeded Cranley-Patterson shift) pulled toward the vertex
/// centroid until they land in the ball. The box is widened beyond `R` when
/// the untruncated ball has vertices outside it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BallSample {
    pub radius: f64,
    pub seed: u64,
    pub points: Vec<Vec<f64>>,
}

pub const DEFAULT_SAMPLE_RADIUS: f64 = 10.0;
pub const DEFAULT_SAMPLE_COUNT: usize = 2048;

impl BallSample {
    pub fn new(p: &PolyAsymNorm, radius: f64, count: usize, seed: u64) -> Self {
        let n = p.dim();
        assert!(n <= PRIMES.len(), "ball sampling supports dim <= {}", PRIMES.len());
        let ball = VertexForm::of_unit_ball(p);
        let radius = radius.max(1.25 * ball.extent());

        let mut g: Vec<Vec<f64>> = p.generators().to_vec();
        let mut h = vec![1.0; g.len()];
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            g.push(e.clone());
            e[i] = -1.0;
            g.push(e);
            h.push(radius);
            h.push(radius);
        }
        let poly = VertexForm::of_polyhedron(&g, &h, n);

        let mut points = vec![vec![0.0; n]];
        points.extend(poly.vertices.iter().cloned());
        let centroid: Vec<f64> = (0..n)
            .map(|j| poly.vertices.iter().map(|v| v[j]).sum::<f64>() / poly.vertices.len() as f64)
            .collect();

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shift: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let mut k = 1u64;
        while points.len() < count {
            let target: Vec<f64> = (0..n)
                .map(|j| {
                    let u = (radical_inverse(k, PRIMES[j]) + shift[j]).fract();
                    (2.0 * u - 1.0) * radius
                })
                .collect();
            k += 1;
            let dir = linalg::sub(&target, &centroid);
            let mut t: f64 = 1.0;
            for (row, &b) in g.iter().zip(&h) {
                let slope = linalg::dot(row, &dir);
                if slope > 0.0 {
                    t = t.min((b - linalg::dot(row, &centroid)) / slope);
                }
            }
            let t = t.max(0.0);
            points.push(linalg::add(&centroid, &linalg::scale(&dir, t)));
        }
        BallSample { radius, seed, points }
    }

    pub fn standard(p: &PolyAsymNorm, seed: u64) -> Self {
        Self::new(p, DEFAULT_SAMPLE_RADIUS, DEFAULT_SAMPLE_COUNT, seed)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertex_form_of_upper_line() {
        let vf = VertexForm::of_unit_ball(&PolyAsymNorm::upper_line());
        assert_eq!(vf.vertices, vec![vec![1.0]]);
        assert_eq!(vf.rays, vec![vec![-1.0]]);
        assert_eq!(vf.support(&[2.0]), 2.0);
        assert_eq!(vf.support(&[-1.0]), f64::INFINITY);
    }

    #[test]
    fn vertex_form_of_square() {
        let vf = VertexForm::of_unit_ball(&PolyAsymNorm::max_norm(2));
        assert_eq!(vf.vertices.len(), 4);
        assert!(vf.is_bounded());
        assert!((vf.support(&[1.0, -2.0]) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn strip_has_one_ray() {
        // {|x1| <= 1, x2 <= 1/2}: vertices (+-1, 1/2), ray (0, -1)
        let p = PolyAsymNorm::new(2, vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 2.0]]).unwrap();
        let vf = VertexForm::of_unit_ball(&p);
        assert_eq!(vf.vertices.len(), 2);
        assert_eq!(vf.rays.len(), 1);
        assert!(vf.rays[0][0].abs() < 1e-12 && (vf.rays[0][1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn samples_lie_in_the_ball_and_box() {
        let p = PolyAsymNorm::new(2, vec![vec![1.0, 0.5], vec![-0.3, 1.0]]).unwrap();
        let s = BallSample::new(&p, 10.0, 512, 7);
        assert_eq!(s.len(), 512);
        assert_eq!(s.points[0], vec![0.0, 0.0]);
        for x in &s.points {
            assert!(p.in_unit_ball(x, 1e-9), "{x:?}");
            assert!(linalg::norm_inf(x) <= s.radius * (1.0 + 1e-9));
        }
        // deterministic under the seed
        assert_eq!(s, BallSample::new(&p, 10.0, 512, 7));
        assert_ne!(s, BallSample::new(&p, 10.0, 512, 8));
    }

    #[test]
    fn radius_grows_to_cover_far_vertices() {
        let p = PolyAsymNorm::new(1, vec![vec![0.01], vec![-0.01]]).unwrap();
        let s = BallSample::new(&p, 10.0, 64, 0);
        assert!(s.radius >= 100.0);
        assert!(s.points.iter().any(|x| (x[0] - 100.0).abs() < 1e-9));
    }
}
