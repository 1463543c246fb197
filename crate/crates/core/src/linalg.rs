//! Small dense helpers over `&[f64]` rows, backed by nalgebra for SVD/LU.

use nalgebra::{DMatrix, DVector};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

pub fn neg(a: &[f64]) -> Vec<f64> {
    a.iter().map(|x| -x).collect()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Dense row-major matrix times vector.
pub fn mat_vec(rows: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    rows.iter().map(|r| dot(r, x)).collect()
}

/// `M^T y` for a row-major `M`.
pub fn mat_t_vec(rows: &[Vec<f64>], y: &[f64], cols: usize) -> Vec<f64> {
    let mut out = vec![0.0; cols];
    for (r, &yi) in rows.iter().zip(y) {
        for (o, &a) in out.iter_mut().zip(r) {
            *o += a * yi;
        }
    }
    out
}

fn to_matrix(rows: &[Vec<f64>], cols: usize) -> DMatrix<f64> {
    // pad to at least `cols` rows so a full SVD exposes the whole null space
    let nrows = rows.len().max(cols).max(1);
    DMatrix::from_fn(nrows, cols, |i, j| rows.get(i).map_or(0.0, |r| r[j]))
}

fn rank_threshold(sv: &DVector<f64>) -> f64 {
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    1e-10 * smax.max(1.0)
}

/// Numerical rank of the row set in `R^cols`.
pub fn rank(rows: &[Vec<f64>], cols: usize) -> usize {
    if cols == 0 || rows.is_empty() {
        return 0;
    }
    let svd = to_matrix(rows, cols).svd(false, false);
    let thr = rank_threshold(&svd.singular_values);
    svd.singular_values.iter().filter(|&&s| s > thr).count()
}

/// A unit vector `x` with `<r, x> = 0` for every row, if the rows do not span.
pub fn null_vector(rows: &[Vec<f64>], cols: usize) -> Option<Vec<f64>> {
    if cols == 0 {
        return None;
    }
    if rows.is_empty() {
        let mut e = vec![0.0; cols];
        e[0] = 1.0;
        return Some(e);
    }
    let m = to_matrix(rows, cols);
    let svd = m.svd(false, true);
    let thr = rank_threshold(&svd.singular_values);
    let v_t = svd.v_t.expect("requested V^T");
    let (idx, smin) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
    if smin > thr {
        return None;
    }
    let mut v: Vec<f64> = v_t.row(idx).iter().cloned().collect();
    // canonical sign: first significant coordinate positive
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-12) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
    Some(v)
}

/// Solves the square system `rows * x = rhs`; `None` when singular.
pub fn solve_square(rows: &[Vec<f64>], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = rhs.len();
    debug_assert_eq!(rows.len(), n);
    if rank(rows, n) < n {
        return None;
    }
    let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    let b = DVector::from_column_slice(rhs);
    m.full_piv_lu().solve(&b).map(|x| x.iter().cloned().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_simple_sets() {
        assert_eq!(rank(&[vec![1.0, 0.0]], 2), 1);
        assert_eq!(rank(&[vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 2.0]], 2), 2);
        assert_eq!(rank(&[vec![1.0, 2.0], vec![2.0, 4.0]], 2), 1);
    }

    #[test]
    fn null_vector_is_orthogonal() {
        let rows = vec![vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0]];
        let v = null_vector(&rows, 3).unwrap();
        for r in &rows {
            assert!(dot(r, &v).abs() < 1e-12);
        }
        assert!((norm_inf(&v) - 0.0).abs() > 0.1);
        assert!(null_vector(&[vec![1.0, 0.0], vec![0.0, 1.0]], 2).is_none());
    }

    #[test]
    fn null_vector_of_single_axis() {
        let v = null_vector(&[vec![1.0, 0.0]], 2).unwrap();
        assert!(v[0].abs() < 1e-12);
        assert!((v[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn solves_square_systems() {
        let x = solve_square(&[vec![2.0, 0.0], vec![1.0, 1.0]], &[4.0, 3.0]).unwrap();
        assert!((x[0] - 2.0).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12);
        assert!(solve_square(&[vec![1.0, 1.0], vec![2.0, 2.0]], &[1.0, 2.0]).is_none());
    }
}
