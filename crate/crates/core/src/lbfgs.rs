//! Limited-memory quasi-Newton minimizer with strong-Wolfe line search.
//!
//! Two-loop recursion over a bounded history of curvature pairs (Nocedal &
//! Wright, Numerical Optimization, Alg. 7.4/7.5), line search satisfying the
//! strong Wolfe conditions (Alg. 3.5/3.6). Entirely deterministic.

use std::collections::VecDeque;

#[derive(Debug, Clone)]
pub(crate) struct LbfgsOptions {
    /// Number of stored curvature pairs.
    pub memory: usize,
    pub max_iterations: usize,
    /// Stop when the gradient 2-norm drops below this.
    pub grad_tol: f64,
    /// Stop as soon as the objective reaches this value.
    pub loss_floor: f64,
    /// Declare saturation when the relative loss improvement over this many
    /// iterations falls below `saturation_rtol`.
    pub saturation_window: usize,
    pub saturation_rtol: f64,
}

impl Default for LbfgsOptions {
    fn default() -> Self {
        Self {
            memory: 10,
            max_iterations: 2000,
            grad_tol: 1e-9,
            loss_floor: f64::NEG_INFINITY,
            saturation_window: 50,
            saturation_rtol: 1e-7,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct LbfgsOutcome {
    pub x: Vec<f64>,
    pub f: f64,
    /// Outer iterations performed.
    pub iterations: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

const C1: f64 = 1e-4;
const C2: f64 = 0.9;
const MAX_LINE_SEARCH: usize = 30;

/// Minimizes `f` starting from `x0`. The objective returns the value and the
/// gradient at a point.
pub(crate) fn minimize<F>(mut objective: F, x0: Vec<f64>, opts: &LbfgsOptions) -> LbfgsOutcome
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let n = x0.len();
    let mut x = x0;
    let (mut fx, mut grad) = objective(&x);
    if n == 0 {
        return LbfgsOutcome {
            x,
            f: fx,
            iterations: 0,
        };
    }

    let mut s_hist: VecDeque<Vec<f64>> = VecDeque::new();
    let mut y_hist: VecDeque<Vec<f64>> = VecDeque::new();
    let mut rho_hist: VecDeque<f64> = VecDeque::new();
    let mut f_trace: Vec<f64> = vec![fx];
    let mut iterations = 0;

    while iterations < opts.max_iterations {
        if fx <= opts.loss_floor || norm(&grad) < opts.grad_tol {
            break;
        }
        if let Some(&then) = f_trace
            .len()
            .checked_sub(opts.saturation_window + 1)
            .and_then(|k| f_trace.get(k))
        {
            let rel = (then - fx) / then.abs().max(1e-300);
            if rel < opts.saturation_rtol {
                break;
            }
        }

        // Two-loop recursion for the search direction.
        let mut q = grad.clone();
        let mut alphas = Vec::with_capacity(s_hist.len());
        for k in (0..s_hist.len()).rev() {
            let a = rho_hist[k] * dot(&s_hist[k], &q);
            for (qi, yi) in q.iter_mut().zip(&y_hist[k]) {
                *qi -= a * yi;
            }
            alphas.push(a);
        }
        alphas.reverse();
        let gamma = match s_hist.back() {
            Some(s) => {
                let y = y_hist.back().unwrap();
                dot(s, y) / dot(y, y).max(1e-300)
            }
            None => 1.0,
        };
        for qi in q.iter_mut() {
            *qi *= gamma;
        }
        for k in 0..s_hist.len() {
            let b = rho_hist[k] * dot(&y_hist[k], &q);
            let a = alphas[k];
            for (qi, si) in q.iter_mut().zip(&s_hist[k]) {
                *qi += (a - b) * si;
            }
        }
        let mut direction: Vec<f64> = q.iter().map(|v| -v).collect();
        let mut dphi0 = dot(&grad, &direction);
        if dphi0 >= 0.0 {
            // Numerical loss of descent; fall back to steepest descent.
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
            direction = grad.iter().map(|g| -g).collect();
            dphi0 = dot(&grad, &direction);
            if dphi0 >= 0.0 {
                break;
            }
        }

        match line_search(&mut objective, &x, fx, &direction, dphi0) {
            Some((alpha, f_new, g_new)) => {
                let mut s = direction;
                for si in s.iter_mut() {
                    *si *= alpha;
                }
                let x_new: Vec<f64> = x.iter().zip(&s).map(|(xi, si)| xi + si).collect();
                let y: Vec<f64> = g_new.iter().zip(&grad).map(|(a, b)| a - b).collect();
                let sy = dot(&s, &y);
                if sy > 1e-10 * norm(&s) * norm(&y) {
                    s_hist.push_back(s);
                    y_hist.push_back(y);
                    rho_hist.push_back(1.0 / sy);
                    if s_hist.len() > opts.memory {
                        s_hist.pop_front();
                        y_hist.pop_front();
                        rho_hist.pop_front();
                    }
                }
                x = x_new;
                fx = f_new;
                grad = g_new;
                iterations += 1;
                f_trace.push(fx);
            }
            None => break,
        }
    }

    LbfgsOutcome {
        x,
        f: fx,
        iterations,
    }
}

/// Strong-Wolfe line search. Returns `(alpha, f(x + alpha d), grad)` or
/// `None` when no acceptable step is found.
fn line_search<F>(
    objective: &mut F,
    x: &[f64],
    f0: f64,
    d: &[f64],
    dphi0: f64,
) -> Option<(f64, f64, Vec<f64>)>
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let eval = |objective: &mut F, alpha: f64| {
        let xt: Vec<f64> = x.iter().zip(d).map(|(xi, di)| xi + alpha * di).collect();
        let (f, g) = objective(&xt);
        let dphi = dot(&g, d);
        (f, g, dphi)
    };

    let mut alpha_prev = 0.0;
    let mut f_prev = f0;
    let mut dphi_prev = dphi0;
    let mut alpha = 1.0;

    for i in 0..MAX_LINE_SEARCH {
        let (f, g, dphi) = eval(objective, alpha);
        if f > f0 + C1 * alpha * dphi0 || (i > 0 && f >= f_prev) {
            return zoom(
                objective, x, f0, dphi0, d, alpha_prev, f_prev, dphi_prev, alpha, f,
            );
        }
        if dphi.abs() <= -C2 * dphi0 {
            return Some((alpha, f, g));
        }
        if dphi >= 0.0 {
            return zoom(
                objective, x, f0, dphi0, d, alpha, f, dphi, alpha_prev, f_prev,
            );
        }
        alpha_prev = alpha;
        f_prev = f;
        dphi_prev = dphi;
        alpha = (alpha * 2.0).min(1e4);
        if alpha >= 1e4 && i + 1 == MAX_LINE_SEARCH {
            return Some((alpha_prev, f_prev, eval(objective, alpha_prev).1));
        }
    }
    None
}

/// Zoom phase: the interval `[lo, hi]` brackets a strong-Wolfe point.
#[allow(clippy::too_many_arguments)]
fn zoom<F>(
    objective: &mut F,
    x: &[f64],
    f0: f64,
    dphi0: f64,
    d: &[f64],
    mut a_lo: f64,
    mut f_lo: f64,
    mut dphi_lo: f64,
    mut a_hi: f64,
    mut f_hi: f64,
) -> Option<(f64, f64, Vec<f64>)>
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    for _ in 0..MAX_LINE_SEARCH {
        // Quadratic interpolation using f_lo, dphi_lo, f_hi with a bisection
        // safeguard.
        let span = a_hi - a_lo;
        let mut a = a_lo
            + if f_hi.is_finite() {
                let denom = 2.0 * (f_hi - f_lo - dphi_lo * span);
                if denom.abs() > 1e-300 {
                    (-dphi_lo * span * span / denom).clamp(0.1 * span.abs(), 0.9 * span.abs())
                        * span.signum()
                } else {
                    0.5 * span
                }
            } else {
                0.5 * span
            };
        if !a.is_finite() {
            a = a_lo + 0.5 * span;
        }
        let xt: Vec<f64> = x.iter().zip(d).map(|(xi, di)| xi + a * di).collect();
        let (f, g) = objective(&xt);
        let dphi = dot(&g, d);
        if f > f0 + C1 * a * dphi0 || f >= f_lo {
            a_hi = a;
            f_hi = f;
        } else {
            if dphi.abs() <= -C2 * dphi0 {
                return Some((a, f, g));
            }
            if dphi * (a_hi - a_lo) >= 0.0 {
                a_hi = a_lo;
                f_hi = f_lo;
            }
            a_lo = a;
            f_lo = f;
            dphi_lo = dphi;
        }
        if (a_hi - a_lo).abs() < 1e-16 {
            let xt: Vec<f64> = x.iter().zip(d).map(|(xi, di)| xi + a_lo * di).collect();
            let (f, g) = objective(&xt);
            // Accept the best bracketed point when the interval collapses.
            if f < f0 {
                return Some((a_lo, f, g));
            }
            return None;
        }
    }
    None
}
