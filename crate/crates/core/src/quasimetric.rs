//! Quasi-metrics: induced by an asymmetric norm or given as a finite table.
//!
//! A quasi-metric drops the symmetry axiom of a metric. The conjugate swaps
//! arguments and the symmetrisation takes the larger orientation. Entourages
//! `{(x, y) : rho(x, y) <= eps}` (or `< eps`) generate the induced
//! quasi-uniformity; everything here works over finite candidate universes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg;
use crate::norms::PolyAsymNorm;
use crate::tol;

/// A (possibly extended) quasi-pseudometric on `Point`.
///
/// Distances are `f64`; extended spaces such as the dual cone may return
/// `f64::INFINITY`.
pub trait QuasiMetric {
    type Point: Clone;

    fn dist(&self, x: &Self::Point, y: &Self::Point) -> f64;
}

impl<M: QuasiMetric + ?Sized> QuasiMetric for &M {
    type Point = M::Point;

    fn dist(&self, x: &Self::Point, y: &Self::Point) -> f64 {
        (**self).dist(x, y)
    }
}

/// `rho(x, y) = p(y - x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NormMetric {
    pub norm: PolyAsymNorm,
}

impl NormMetric {
    pub fn new(norm: PolyAsymNorm) -> Self {
        NormMetric { norm }
    }

    pub fn dim(&self) -> usize {
        self.norm.dim()
    }

    /// Checked distance.
    pub fn distance(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        check_dim(self.dim(), y.len())?;
        Ok(self.dist(&x.to_vec(), &y.to_vec()))
    }
}

impl QuasiMetric for NormMetric {
    type Point = Vec<f64>;

    fn dist(&self, x: &Vec<f64>, y: &Vec<f64>) -> f64 {
        self.norm
            .generators()
            .iter()
            .map(|a| linalg::dot(a, y) - linalg::dot(a, x))
            .fold(0.0, f64::max)
    }
}

/// `rhobar(x, y) = rho(y, x)`.
#[derive(Debug, Clone, Copy)]
pub struct Conjugate<M>(pub M);

impl<M: QuasiMetric> QuasiMetric for Conjugate<M> {
    type Point = M::Point;

    fn dist(&self, x: &Self::Point, y: &Self::Point) -> f64 {
        self.0.dist(y, x)
    }
}

/// `rho_s(x, y) = max(rho(x, y), rho(y, x))`.
#[derive(Debug, Clone, Copy)]
pub struct Symmetrized<M>(pub M);

impl<M: QuasiMetric> QuasiMetric for Symmetrized<M> {
    type Point = M::Point;

    fn dist(&self, x: &Self::Point, y: &Self::Point) -> f64 {
        self.0.dist(x, y).max(self.0.dist(y, x))
    }
}

/// How the triangle inequality was established for a table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TriangleCheck {
    Exhaustive,
    Sampled { triples: u64, seed: u64 },
}

pub const EXHAUSTIVE_LIMIT: usize = 512;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct TabularSpec {
    points: Vec<String>,
    matrix: Vec<Vec<f64>>,
}

/// Distance table over labelled points; points are row indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TabularSpec")]
pub struct TabularMetric {
    points: Vec<String>,
    matrix: Vec<Vec<f64>>,
    #[serde(skip)]
    strict: bool,
    #[serde(skip)]
    check: Option<TriangleCheck>,
}

impl TryFrom<TabularSpec> for TabularMetric {
    type Error = Error;

    fn try_from(s: TabularSpec) -> Result<Self> {
        TabularMetric::new(s.points, s.matrix)
    }
}

impl TabularMetric {
    pub fn new(points: Vec<String>, matrix: Vec<Vec<f64>>) -> Result<Self> {
        Self::with_seed(points, matrix, 0)
    }

    /// Validates shape, zero diagonal, nonnegativity and the triangle
    /// inequality (exhaustive up to 512 points, `10 n^2` seeded triples
    /// beyond), then records whether QM1 holds.
    pub fn with_seed(points: Vec<String>, matrix: Vec<Vec<f64>>, seed: u64) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::InvalidInput("tabular quasi-metric needs at least one point".into()));
        }
        check_dim(n, matrix.len())?;
        for (i, row) in matrix.iter().enumerate() {
            check_dim(n, row.len())?;
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidInput(format!(
                        "entry ({i}, {j}) = {v} is not a finite nonnegative distance"
                    )));
                }
            }
            if row[i] != 0.0 {
                return Err(Error::InvalidInput(format!("diagonal entry {i} is nonzero")));
            }
        }
        for (i, a) in points.iter().enumerate() {
            if points[..i].contains(a) {
                return Err(Error::InvalidInput(format!("duplicate label `{a}`")));
            }
        }

        let triangle = |x: usize, y: usize, z: usize| -> Result<()> {
            let lhs = matrix[x][z];
            let rhs = matrix[x][y] + matrix[y][z];
            if tol::approx_le(lhs, rhs, tol::DEFAULT_TOL) {
                Ok(())
            } else {
                Err(Error::TriangleViolation { x, y, z, lhs, rhs })
            }
        };
        let check = if n <= EXHAUSTIVE_LIMIT {
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        triangle(x, y, z)?;
                    }
                }
            }
            TriangleCheck::Exhaustive
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let triples = 10 * (n as u64) * (n as u64);
            for _ in 0..triples {
                triangle(rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n))?;
            }
            TriangleCheck::Sampled { triples, seed }
        };

        let strict = (0..n).all(|i| (0..i).all(|j| matrix[i][j] > 0.0 || matrix[j][i] > 0.0));
        Ok(TabularMetric { points, matrix, strict, check: Some(check) })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.points
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.matrix
    }

    pub fn index(&self, label: &str) -> Result<usize> {
        self.points
            .iter()
            .position(|p| p == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// QM1 holds; otherwise this is only a quasi-pseudometric.
    pub fn is_strict(&self) -> bool {
        self.strict
    }

    pub fn triangle_check(&self) -> Option<TriangleCheck> {
        self.check
    }

    /// Checked distance by label.
    pub fn distance(&self, x: &str, y: &str) -> Result<f64> {
        Ok(self.matrix[self.index(x)?][self.index(y)?])
    }
}

impl QuasiMetric for TabularMetric {
    type Point = usize;

    fn dist(&self, x: &usize, y: &usize) -> f64 {
        self.matrix[*x][*y]
    }
}

/// Candidates `y` with `rho(x, y) <= r` (or `< r` when `strict`).
pub fn ball<M: QuasiMetric>(
    m: &M,
    x: &M::Point,
    r: f64,
    strict: bool,
    candidates: &[M::Point],
) -> Vec<M::Point> {
    candidates
        .iter()
        .filter(|y| within(m.dist(x, y), r, strict))
        .cloned()
        .collect()
}

fn within(d: f64, r: f64, strict: bool) -> bool {
    if strict {
        d < r
    } else {
        d <= r
    }
}

/// The basic entourage `{(x, y) : rho(x, y) <= eps}` (`< eps` if strict).
#[derive(Debug, Clone, Copy)]
pub struct Entourage<M> {
    pub base: M,
    pub radius: f64,
    pub strict: bool,
}

impl<M: QuasiMetric> Entourage<M> {
    pub fn new(base: M, radius: f64, strict: bool) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::NonPositiveEpsilon(radius));
        }
        Ok(Entourage { base, radius, strict })
    }

    pub fn contains(&self, x: &M::Point, y: &M::Point) -> bool {
        within(self.base.dist(x, y), self.radius, self.strict)
    }

    /// The section `U(x)` restricted to `universe`.
    pub fn apply(&self, x: &M::Point, universe: &[M::Point]) -> Vec<usize> {
        (0..universe.len()).filter(|&j| self.contains(x, &universe[j])).collect()
    }

    /// `U[Z]`: union of sections, as sorted indices into `universe`.
    pub fn image(&self, z: &[M::Point], universe: &[M::Point]) -> Vec<usize> {
        (0..universe.len())
            .filter(|&j| z.iter().any(|zz| self.contains(zz, &universe[j])))
            .collect()
    }

    /// Pairs of `self ∘ other` over `universe`: `(x, z)` such that some `y`
    /// has `(x, y) ∈ self` and `(y, z) ∈ other`.
    pub fn compose_pairs(&self, other: &Entourage<M>, universe: &[M::Point]) -> Vec<(usize, usize)> {
        let n = universe.len();
        let mut out = Vec::new();
        for x in 0..n {
            for z in 0..n {
                if (0..n).any(|y| {
                    self.contains(&universe[x], &universe[y]) && other.contains(&universe[y], &universe[z])
                }) {
                    out.push((x, z));
                }
            }
        }
        out
    }
}

/// Checks `B_{eps/2} ∘ B_{eps/2} ⊆ B_eps` over every triple of `universe`;
/// returns the first failing index triple.
pub fn check_qu2<M: QuasiMetric>(
    m: &M,
    eps: f64,
    universe: &[M::Point],
    tol: f64,
) -> std::result::Result<(), (usize, usize, usize)> {
    let n = universe.len();
    let half = eps / 2.0;
    let d: Vec<Vec<f64>> = universe
        .iter()
        .map(|x| universe.iter().map(|y| m.dist(x, y)).collect())
        .collect();
    for x in 0..n {
        for y in 0..n {
            if d[x][y] > half {
                continue;
            }
            for z in 0..n {
                if d[y][z] <= half && !tol::approx_le(d[x][z], eps, tol) {
                    return Err((x, y, z));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u_metric() -> NormMetric {
        NormMetric::new(PolyAsymNorm::upper_line())
    }

    fn pts(v: &[f64]) -> Vec<Vec<f64>> {
        v.iter().map(|&t| vec![t]).collect()
    }

    #[test]
    fn induced_distances() {
        let m = u_metric();
        assert_eq!(m.distance(&[0.0], &[5.0]).unwrap(), 5.0);
        assert_eq!(m.distance(&[5.0], &[0.0]).unwrap(), 0.0);
        assert_eq!(m.distance(&[2.5], &[2.5]).unwrap(), 0.0);
        assert!(m.distance(&[0.0, 1.0], &[0.0]).is_err());
        let c = Conjugate(&m);
        assert_eq!(c.dist(&vec![0.0], &vec![5.0]), 0.0);
        assert_eq!(Symmetrized(&m).dist(&vec![5.0], &vec![0.0]), 5.0);
    }

    #[test]
    fn balls_under_u() {
        let m = u_metric();
        let cands = pts(&[-10.0, 0.0, 0.5, 1.0, 2.0]);
        let b = ball(&m, &vec![0.0], 1.0, false, &cands);
        assert_eq!(b, pts(&[-10.0, 0.0, 0.5, 1.0]));
        let bc = ball(&Conjugate(&m), &vec![0.0], 1.0, false, &cands);
        assert_eq!(bc, pts(&[0.0, 0.5, 1.0, 2.0]));
        assert!(ball(&m, &vec![3.0], 0.0, false, &cands).len() >= 3);
        assert!(ball(&m, &vec![0.0], 1.0, true, &cands).len() == 3);
    }

    #[test]
    fn entourage_sections() {
        let m = u_metric();
        let universe = pts(&[-2.0, 0.0, 2.0]);
        let u1 = Entourage::new(&m, 1.0, false).unwrap();
        assert_eq!(u1.apply(&vec![0.0], &universe), vec![0, 1]);
        assert_eq!(u1.image(&[vec![0.0]], &universe), u1.apply(&vec![0.0], &universe));
        let u3 = Entourage::new(&m, 3.0, false).unwrap();
        assert_eq!(u3.apply(&vec![0.0], &universe), vec![0, 1, 2]);
        assert!(Entourage::new(&m, 0.0, false).is_err());
    }

    #[test]
    fn composition_of_halves_stays_inside() {
        let m = u_metric();
        let universe = pts(&[-1.0, -0.3, 0.0, 0.2, 0.4, 0.9]);
        let half = Entourage::new(&m, 0.25, false).unwrap();
        let full = Entourage::new(&m, 0.5, false).unwrap();
        for (x, z) in half.compose_pairs(&half, &universe) {
            assert!(full.contains(&universe[x], &universe[z]));
        }
    }

    #[test]
    fn tabular_validation() {
        let labels = vec!["a".to_string(), "b".to_string(), "c".to_string()];
        let ok = TabularMetric::new(
            labels.clone(),
            vec![vec![0.0, 1.0, 2.0], vec![0.0, 0.0, 1.0], vec![0.0, 0.0, 0.0]],
        )
        .unwrap();
        assert!(ok.is_strict());
        assert_eq!(ok.distance("a", "c").unwrap(), 2.0);
        assert!(matches!(ok.distance("a", "z"), Err(Error::UnknownLabel(_))));
        assert_eq!(ok.triangle_check(), Some(TriangleCheck::Exhaustive));

        let bad = TabularMetric::new(
            labels.clone(),
            vec![vec![0.0, 1.0, 5.0], vec![0.0, 0.0, 1.0], vec![0.0, 0.0, 0.0]],
        );
        assert!(matches!(bad, Err(Error::TriangleViolation { x: 0, y: 1, z: 2, .. })));

        let pseudo = TabularMetric::new(
            labels,
            vec![vec![0.0, 0.0, 1.0], vec![0.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]],
        )
        .unwrap();
        assert!(!pseudo.is_strict());
    }

    #[test]
    fn large_tables_are_sampled() {
        let n = 600;
        let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let matrix: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| (i as f64 - j as f64).abs()).collect())
            .collect();
        let t = TabularMetric::with_seed(labels, matrix, 3).unwrap();
        assert_eq!(
            t.triangle_check(),
            Some(TriangleCheck::Sampled { triples: 10 * 600 * 600, seed: 3 })
        );
    }

    #[test]
    fn tabular_json() {
        let t: TabularMetric =
            serde_json::from_str(r#"{"points": ["a", "b"], "matrix": [[0, 1], [2, 0]]}"#).unwrap();
        assert_eq!(t.distance("b", "a").unwrap(), 2.0);
        assert!(serde_json::from_str::<TabularMetric>(
            r#"{"points": ["a"], "matrix": [[0]], "x": 1}"#
        )
        .is_err());
    }

    #[test]
    fn qu2_holds_on_u() {
        let m = u_metric();
        let universe = pts(&[-3.0, -1.0, 0.0, 0.1, 0.35, 0.8, 2.0]);
        assert!(check_qu2(&m, 0.8, &universe, 1e-9).is_ok());
    }
}
