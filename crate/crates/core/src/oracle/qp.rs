use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::game::{Regime, WeightSystem};

/// Minimises `x'Hx/2 + g'x` subject to `x >= lower` by a primal active-set
/// method. `h` must be symmetric positive definite; `start` must be feasible.
pub fn minimize_box_qp(
    h: &[Vec<f64>],
    g: &[f64],
    lower: &[f64],
    start: &[f64],
) -> Result<Vec<f64>> {
    let n = g.len();
    if h.len() != n || h.iter().any(|r| r.len() != n) || lower.len() != n || start.len() != n {
        return Err(Error::DimensionMismatch {
            what: "quadratic program",
            expected: n,
            found: h.len(),
        });
    }
    if start.iter().zip(lower).any(|(x, l)| x < l) {
        return Err(Error::InvalidProfile(
            "starting point violates a bound".into(),
        ));
    }
    let hscale = h.iter().flatten().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let mut x = start.to_vec();
    let mut bound: Vec<bool> = x.iter().zip(lower).map(|(x, l)| x == l).collect();
    for _ in 0..(50 * (n + 1)) {
        let free: Vec<usize> = (0..n).filter(|&i| !bound[i]).collect();
        // minimiser over the free coordinates with the rest at their bounds
        let mut target = x.clone();
        if !free.is_empty() {
            let a: Vec<Vec<f64>> = free
                .iter()
                .map(|&i| free.iter().map(|&j| h[i][j]).collect())
                .collect();
            let b: Vec<f64> = free
                .iter()
                .map(|&i| {
                    -g[i]
                        - (0..n)
                            .filter(|&j| bound[j])
                            .map(|j| h[i][j] * lower[j])
                            .sum::<f64>()
                })
                .collect();
            let sol = solve_linear(a, b)
                .ok_or_else(|| Error::InvalidProfile("singular quadratic program".into()))?;
            for (&i, v) in free.iter().zip(sol) {
                target[i] = v;
            }
        }
        let mut step = 1.0;
        let mut blocking = None;
        for &i in &free {
            let d = target[i] - x[i];
            if target[i] < lower[i] && d < 0.0 {
                let s = (lower[i] - x[i]) / d;
                if s < step {
                    step = s;
                    blocking = Some(i);
                }
            }
        }
        if let Some(i) = blocking {
            for &j in &free {
                x[j] += step * (target[j] - x[j]);
            }
            x[i] = lower[i];
            bound[i] = true;
            continue;
        }
        x = target;
        let grad: Vec<f64> = (0..n)
            .map(|i| g[i] + (0..n).map(|j| h[i][j] * x[j]).sum::<f64>())
            .collect();
        let xscale = x.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
        let threshold = -1e-12 * hscale * xscale;
        let release = (0..n)
            .filter(|&i| bound[i] && grad[i] < threshold)
            .min_by(|&i, &j| grad[i].total_cmp(&grad[j]));
        match release {
            Some(i) => bound[i] = false,
            None => return Ok(x),
        }
    }
    Err(Error::InvalidProfile(
        "active-set iteration did not converge".into(),
    ))
}

/// Gaussian elimination with partial pivoting.
fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col] == 0.0 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let (upper, lower) = a.split_at_mut(row);
            let (pivot_row, target) = (&upper[col], &mut lower[0]);
            let f = target[col] / pivot_row[col];
            for (t, &p) in target[col..].iter_mut().zip(&pivot_row[col..]) {
                *t -= f * p;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// `argmin_{x >= lower} (x - p)' (h/2) (x - p)`, started from `max(p, lower)`.
fn project_with(h: Vec<Vec<f64>>, p: &[f64], lower: &[f64]) -> Result<Vec<f64>> {
    let g: Vec<f64> = (0..p.len())
        .map(|i| -(0..p.len()).map(|j| h[i][j] * p[j]).sum::<f64>())
        .collect();
    let start: Vec<f64> = p.iter().zip(lower).map(|(a, b)| a.max(*b)).collect();
    minimize_box_qp(&h, &g, lower, &start)
}

/// Minimises `sum (x_i - p_i)^2 / (a_i - eps/m) + (sum x - sum p)^2 / eps`
/// over `x >= lower`.
pub fn epsilon_projection(p: &[f64], lower: &[f64], a: &[f64], eps: f64) -> Result<Vec<f64>> {
    let m = a.len();
    if p.len() != m || lower.len() != m {
        return Err(Error::DimensionMismatch {
            what: "penalised projection",
            expected: m,
            found: p.len(),
        });
    }
    let shift = eps / m as f64;
    if eps.is_nan() || eps <= 0.0 || a.iter().any(|&ai| ai <= shift) {
        return Err(Error::InvalidWeights(
            "eps must be positive and below m * min(a)".into(),
        ));
    }
    let h = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| 2.0 / eps + if i == j { 2.0 / (a[i] - shift) } else { 0.0 })
                .collect()
        })
        .collect();
    project_with(h, p, lower)
}

/// Projection onto `x >= lower` under the weighted inner product, strict regime only.
pub fn norm_projection(p: &[f64], lower: &[f64], w: &WeightSystem) -> Result<Vec<f64>> {
    if w.regime() == Regime::Saturated {
        return Err(Error::SaturatedInnerProduct);
    }
    let a = w.generators();
    let m = a.len();
    if p.len() != m || lower.len() != m {
        return Err(Error::DimensionMismatch {
            what: "norm projection",
            expected: m,
            found: p.len(),
        });
    }
    let c = 1.0 / (1.0 - w.total());
    let h = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| 2.0 * (c + if i == j { 1.0 / a[i] } else { 0.0 }))
                .collect()
        })
        .collect();
    project_with(h, p, lower)
}
