//! Dense primal simplex for `max <c, x>  s.t.  G x <= h`, `x` free, `h >= 0`.
//!
//! Every supremum in this crate has that shape: `h >= 0` makes the origin
//! feasible, so no phase one is needed. Free variables are split as
//! `x = x+ - x-`; Bland's rule guarantees termination on the highly degenerate
//! unit-ball programs (all right-hand sides equal).

const PIVOT_EPS: f64 = 1e-11;
const MAX_ITERS: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    /// Finite optimum with an attaining point.
    Optimal { value: f64, point: Vec<f64> },
    /// Objective unbounded along `ray`: `G ray <= 0` and `<c, ray> > 0`,
    /// normalised to unit max-norm.
    Unbounded { ray: Vec<f64> },
}

impl LpOutcome {
    pub fn value(&self) -> f64 {
        match self {
            LpOutcome::Optimal { value, .. } => *value,
            LpOutcome::Unbounded { .. } => f64::INFINITY,
        }
    }
}

/// Maximises `<c, x>` over `{x : <g_i, x> <= h_i}`.
///
/// Panics if `h` has a negative entry or shapes disagree.
pub fn maximize(c: &[f64], g: &[Vec<f64>], h: &[f64]) -> LpOutcome {
    let n = c.len();
    let m = g.len();
    assert_eq!(h.len(), m, "rhs length");
    assert!(h.iter().all(|&v| v >= 0.0), "origin must be feasible");
    assert!(g.iter().all(|r| r.len() == n), "constraint width");

    if c.iter().all(|&v| v == 0.0) {
        return LpOutcome::Optimal { value: 0.0, point: vec![0.0; n] };
    }

    let width = 2 * n + m;
    let mut tab = vec![vec![0.0; width]; m];
    let mut rhs = h.to_vec();
    for (i, row) in g.iter().enumerate() {
        for j in 0..n {
            tab[i][j] = row[j];
            tab[i][n + j] = -row[j];
        }
        tab[i][2 * n + i] = 1.0;
    }
    let mut cost = vec![0.0; width];
    for j in 0..n {
        cost[j] = c[j];
        cost[n + j] = -c[j];
    }
    let mut basis: Vec<usize> = (2 * n..2 * n + m).collect();
    let scale = c.iter().fold(1.0f64, |a, v| a.max(v.abs()));

    for _ in 0..MAX_ITERS {
        // Bland: lowest-index improving column
        let Some(enter) = (0..width).find(|&j| cost[j] > PIVOT_EPS * scale) else {
            let mut y = vec![0.0; width];
            for (i, &b) in basis.iter().enumerate() {
                y[b] = rhs[i].max(0.0);
            }
            let point: Vec<f64> = (0..n).map(|j| y[j] - y[n + j]).collect();
            let value = crate::linalg::dot(c, &point);
            return LpOutcome::Optimal { value, point };
        };

        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            let a = tab[i][enter];
            if a > PIVOT_EPS {
                let ratio = rhs[i].max(0.0) / a;
                let better = match leave {
                    None => true,
                    Some(l) => {
                        ratio < best - 1e-14
                            || (ratio <= best + 1e-14 && basis[i] < basis[l])
                    }
                };
                if better {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }

        let Some(r) = leave else {
            let mut y = vec![0.0; width];
            y[enter] = 1.0;
            for (i, &b) in basis.iter().enumerate() {
                y[b] = -tab[i][enter];
            }
            let mut ray: Vec<f64> = (0..n).map(|j| y[j] - y[n + j]).collect();
            let s = crate::linalg::norm_inf(&ray);
            if s > 0.0 {
                ray.iter_mut().for_each(|v| *v /= s);
            }
            return LpOutcome::Unbounded { ray };
        };

        pivot(&mut tab, &mut rhs, &mut cost, r, enter);
        basis[r] = enter;
    }
    panic!("simplex iteration limit exceeded");
}

fn pivot(tab: &mut [Vec<f64>], rhs: &mut [f64], cost: &mut [f64], r: usize, e: usize) {
    let p = tab[r][e];
    tab[r].iter_mut().for_each(|v| *v /= p);
    rhs[r] /= p;
    let prow = tab[r].clone();
    let prhs = rhs[r];
    for (i, row) in tab.iter_mut().enumerate() {
        if i == r {
            continue;
        }
        let f = row[e];
        if f != 0.0 {
            for (v, pv) in row.iter_mut().zip(&prow) {
                *v -= f * pv;
            }
            rhs[i] -= f * prhs;
        }
    }
    let f = cost[e];
    for (v, pv) in cost.iter_mut().zip(&prow) {
        *v -= f * pv;
    }
}
