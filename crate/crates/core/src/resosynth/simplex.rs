//! Nelder–Mead on the unit box.
//!
//! Vertices are clamped to `[0, 1]^n`, so callers map their own bounds onto
//! the box. The run is fully deterministic for a given start point and step.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    /// Edge length of the initial simplex, in box units.
    pub initial_step: f64,
    pub max_iterations: usize,
    /// Stop once the best objective drops below this.
    pub target: f64,
    /// Stop once the objective spread across the simplex drops below this.
    pub spread_tol: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            initial_step: 0.1,
            max_iterations: 500,
            target: 1e-6,
            spread_tol: 1e-15,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    /// The target was reached (as opposed to running out of iterations or
    /// collapsing the simplex).
    pub reached_target: bool,
}

/// Minimize `f` over `[0, 1]^n` starting from `x0`.
///
/// Returns immediately with zero iterations when `f(x0)` already meets the
/// target. Non-finite objective values are treated as `+inf`.
pub fn minimize<F>(mut f: F, x0: &[f64], opts: &SimplexOptions) -> SimplexOutcome
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut eval = |x: &[f64]| {
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };
    let start: Vec<f64> = x0.iter().map(|v| v.clamp(0.0, 1.0)).collect();
    let v0 = eval(&start);
    if v0 < opts.target || n == 0 {
        return SimplexOutcome {
            x: start,
            value: v0,
            iterations: 0,
            reached_target: v0 < opts.target,
        };
    }

    let mut pts = vec![start.clone()];
    for i in 0..n {
        let mut p = start.clone();
        // Step inward when the start sits on the upper face.
        p[i] = if p[i] + opts.initial_step <= 1.0 {
            p[i] + opts.initial_step
        } else {
            p[i] - opts.initial_step
        };
        pts.push(p);
    }
    let mut vals: Vec<f64> = std::iter::once(v0).chain(pts[1..].iter().map(|p| eval(p))).collect();

    let clamp = |p: Vec<f64>| -> Vec<f64> { p.into_iter().map(|v| v.clamp(0.0, 1.0)).collect() };
    let toward = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect() };

    let mut iterations = 0;
    while iterations < opts.max_iterations {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(a.cmp(&b)));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        if vals[0] < opts.target || (vals[n] - vals[0]).abs() < opts.spread_tol {
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for p in &pts[..n] {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v / n as f64;
            }
        }
        let worst = pts[n].clone();
        let reflected = clamp(toward(&centroid, &worst, -1.0));
        let fr = eval(&reflected);

        if fr < vals[0] {
            let expanded = clamp(toward(&centroid, &worst, -2.0));
            let fe = eval(&expanded);
            if fe < fr {
                pts[n] = expanded;
                vals[n] = fe;
            } else {
                pts[n] = reflected;
                vals[n] = fr;
            }
        } else if fr < vals[n - 1] {
            pts[n] = reflected;
            vals[n] = fr;
        } else {
            let (contracted, fc) = if fr < vals[n] {
                let p = clamp(toward(&centroid, &reflected, 0.5));
                let v = eval(&p);
                (p, v)
            } else {
                let p = toward(&centroid, &worst, 0.5);
                let v = eval(&p);
                (p, v)
            };
            if fc < vals[n].min(fr) {
                pts[n] = contracted;
                vals[n] = fc;
            } else {
                let best = pts[0].clone();
                for i in 1..=n {
                    pts[i] = toward(&best, &pts[i], 0.5);
                    vals[i] = eval(&pts[i]);
                }
            }
        }
    }

    let best = (0..=n).min_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(a.cmp(&b))).unwrap_or(0);
    SimplexOutcome {
        x: pts[best].clone(),
        value: vals[best],
        iterations,
        reached_target: vals[best] < opts.target,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_interior_quadratic_minimum() {
        let f = |x: &[f64]| (x[0] - 0.3).powi(2) + 4.0 * (x[1] - 0.7).powi(2);
        let out = minimize(f, &[0.5, 0.5], &SimplexOptions { target: 1e-12, ..Default::default() });
        assert!(out.reached_target);
        assert!((out.x[0] - 0.3).abs() < 1e-5 && (out.x[1] - 0.7).abs() < 1e-5);
    }

    #[test]
    fn respects_box() {
        // Unconstrained minimum at (-1, 2); the box optimum is (0, 1).
        let f = |x: &[f64]| (x[0] + 1.0).powi(2) + (x[1] - 2.0).powi(2);
        let out = minimize(f, &[0.5, 0.5], &SimplexOptions::default());
        assert!(out.x.iter().all(|v| (0.0..=1.0).contains(v)));
        assert!(out.x[0] < 1e-3 && out.x[1] > 1.0 - 1e-3, "{:?}", out.x);
        assert!(!out.reached_target);
    }

    #[test]
    fn zero_iterations_at_target() {
        let out = minimize(|x: &[f64]| x[0] * x[0], &[0.0], &SimplexOptions::default());
        assert_eq!(out.iterations, 0);
        assert!(out.reached_target);
    }

    #[test]
    fn never_worse_than_start() {
        let f = |x: &[f64]| (10.0 * x[0]).sin() + (7.0 * x[1]).cos();
        let x0 = [0.42, 0.17];
        let out = minimize(f, &x0, &SimplexOptions { max_iterations: 30, ..Default::default() });
        assert!(out.value <= f(&x0));
        assert!(out.iterations <= 30);
    }

    #[test]
    fn nan_is_treated_as_worst() {
        let f = |x: &[f64]| if x[0] > 0.8 { f64::NAN } else { (x[0] - 0.6).powi(2) };
        let out = minimize(f, &[0.5], &SimplexOptions { target: 1e-10, ..Default::default() });
        assert!((out.x[0] - 0.6).abs() < 1e-4);
    }

    #[test]
    fn deterministic() {
        let f = |x: &[f64]| (x[0] - 0.1).abs() + (x[1] - 0.9).powi(2) + x[2];
        let a = minimize(f, &[0.5, 0.5, 0.5], &SimplexOptions::default());
        let b = minimize(f, &[0.5, 0.5, 0.5], &SimplexOptions::default());
        assert_eq!(a, b);
    }
}
