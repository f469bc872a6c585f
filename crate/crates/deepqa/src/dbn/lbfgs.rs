//! Limited-memory BFGS with a strong-Wolfe line search.

use std::collections::VecDeque;

#[derive(Debug, Clone)]
pub struct LbfgsOptions {
    /// Number of (s, y) history pairs kept.
    pub memory: usize,
    pub max_iters: usize,
    /// Stop when the gradient norm drops below this.
    pub grad_tol: f64,
    /// Sufficient-decrease constant.
    pub c1: f64,
    /// Curvature constant.
    pub c2: f64,
    /// Function evaluations allowed per line search.
    pub max_line_search: usize,
}

impl Default for LbfgsOptions {
    fn default() -> Self {
        LbfgsOptions {
            memory: 10,
            max_iters: 500,
            grad_tol: 1e-7,
            c1: 1e-4,
            c2: 0.9,
            max_line_search: 30,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LbfgsOutcome {
    pub position: Vec<f64>,
    pub value: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    /// Set when the line search could not satisfy the Wolfe conditions; the
    /// best iterate reached is returned.
    pub line_search_failed: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Minimizes `f` (value + gradient) from `x0`.
pub fn minimize<F>(mut f: F, x0: Vec<f64>, opts: &LbfgsOptions) -> LbfgsOutcome
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let mut x = x0;
    let (mut fx, mut grad) = f(&x);
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut iterations = 0;
    let mut line_search_failed = false;

    for iter in 0..opts.max_iters {
        if norm(&grad) < opts.grad_tol {
            break;
        }

        let mut direction = two_loop_direction(&grad, &history);
        if dot(&direction, &grad) >= 0.0 {
            // Not a descent direction; restart from steepest descent.
            history.clear();
            direction = grad.iter().map(|g| -g).collect();
        }

        match wolfe_line_search(&mut f, &x, fx, &grad, &direction, opts) {
            Some((x_new, f_new, g_new)) => {
                let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
                let y: Vec<f64> = g_new.iter().zip(&grad).map(|(a, b)| a - b).collect();
                let ys = dot(&y, &s);
                if ys > 1e-12 * norm(&y) * norm(&s) {
                    if history.len() == opts.memory {
                        history.pop_front();
                    }
                    history.push_back((s, y, 1.0 / ys));
                }
                x = x_new;
                fx = f_new;
                grad = g_new;
                iterations = iter + 1;
            }
            None => {
                line_search_failed = true;
                log::warn!("line search failed at iteration {iter}; returning best iterate");
                break;
            }
        }
    }

    LbfgsOutcome {
        grad_norm: norm(&grad),
        position: x,
        value: fx,
        iterations,
        line_search_failed,
    }
}

fn two_loop_direction(grad: &[f64], history: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q = grad.to_vec();
    let mut alphas = Vec::with_capacity(history.len());
    for (s, y, rho) in history.iter().rev() {
        let alpha = rho * dot(s, &q);
        for (qi, yi) in q.iter_mut().zip(y) {
            *qi -= alpha * yi;
        }
        alphas.push(alpha);
    }
    let gamma = history
        .back()
        .map(|(s, y, _)| dot(s, y) / dot(y, y))
        .unwrap_or(1.0);
    let mut r: Vec<f64> = q.iter().map(|v| v * gamma).collect();
    for ((s, y, rho), alpha) in history.iter().zip(alphas.into_iter().rev()) {
        let beta = rho * dot(y, &r);
        for (ri, si) in r.iter_mut().zip(s) {
            *ri += (alpha - beta) * si;
        }
    }
    r.iter_mut().for_each(|v| *v = -*v);
    r
}

type Probe = (Vec<f64>, f64, Vec<f64>);

/// Strong Wolfe line search (bracket + bisection zoom).
fn wolfe_line_search<F>(
    f: &mut F,
    x: &[f64],
    f0: f64,
    g0: &[f64],
    direction: &[f64],
    opts: &LbfgsOptions,
) -> Option<Probe>
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let dphi0 = dot(g0, direction);
    if dphi0 >= 0.0 {
        return None;
    }
    let mut evals = 0usize;
    let mut probe = |alpha: f64| -> (Probe, f64) {
        let xt: Vec<f64> = x
            .iter()
            .zip(direction)
            .map(|(xi, di)| xi + alpha * di)
            .collect();
        let (ft, gt) = f(&xt);
        let slope = dot(&gt, direction);
        ((xt, ft, gt), slope)
    };

    let mut alpha_prev = 0.0f64;
    let mut f_prev = f0;
    let mut alpha = 1.0f64;
    let mut bracket: Option<(f64, f64, f64, f64)> = None; // (lo, f_lo, hi, f_hi)

    while evals < opts.max_line_search {
        let ((xt, ft, gt), slope) = probe(alpha);
        evals += 1;
        if ft > f0 + opts.c1 * alpha * dphi0 || (evals > 1 && ft >= f_prev) {
            bracket = Some((alpha_prev, f_prev, alpha, ft));
            break;
        }
        if slope.abs() <= -opts.c2 * dphi0 {
            return Some((xt, ft, gt));
        }
        if slope >= 0.0 {
            bracket = Some((alpha, ft, alpha_prev, f_prev));
            break;
        }
        alpha_prev = alpha;
        f_prev = ft;
        alpha *= 2.0;
        if alpha > 1e12 {
            return None;
        }
    }

    let (mut lo, mut f_lo, mut hi, mut _f_hi) = bracket?;
    while evals < opts.max_line_search {
        let mid = 0.5 * (lo + hi);
        let ((xt, ft, gt), slope) = probe(mid);
        evals += 1;
        if ft > f0 + opts.c1 * mid * dphi0 || ft >= f_lo {
            hi = mid;
            _f_hi = ft;
        } else {
            if slope.abs() <= -opts.c2 * dphi0 {
                return Some((xt, ft, gt));
            }
            if slope * (hi - lo) >= 0.0 {
                hi = lo;
            }
            lo = mid;
            f_lo = ft;
        }
        if (hi - lo).abs() < 1e-16 {
            break;
        }
    }
    None
}
