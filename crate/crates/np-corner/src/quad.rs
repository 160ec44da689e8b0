//! Gauss-Legendre panel quadrature, Legendre polynomial utilities, and the
//! analytic log-moment weights used for the single-layer self-panel
//! integrals.

use crate::error::{Error, Result};

/// Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// Nodes and weights by Newton iteration on P_n, Chebyshev-initialized.
    pub fn new(order: usize) -> Result<Self> {
        if !(1..=64).contains(&order) {
            return Err(Error::Config(format!("gauss order {order} out of range")));
        }
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n {
            // Chebyshev-like initial guess for the i-th root of P_n
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_with_derivative(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(n, x);
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        Ok(GaussRule { nodes, weights })
    }
}

/// P_n(x) and P_n'(x) by the three-term recurrence.
pub fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// P_0..P_n at x.
pub fn legendre_all(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n == 0 {
        return out;
    }
    out.push(x);
    for k in 2..=n {
        let kf = k as f64;
        let p = ((2.0 * kf - 1.0) * x * out[k - 1] - (kf - 1.0) * out[k - 2]) / kf;
        out.push(p);
    }
    out
}

/// Legendre functions of the second kind Q_0..Q_n on the cut (-1, 1),
/// principal values. Forward recurrence; stable for the orders used here.
pub fn legendre_q_all(n: usize, x: f64) -> Vec<f64> {
    let mut q = Vec::with_capacity(n + 1);
    let q0 = 0.5 * ((1.0 + x) / (1.0 - x)).abs().ln();
    q.push(q0);
    if n == 0 {
        return q;
    }
    q.push(x * q0 - 1.0);
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * q[k] - kf * q[k - 1]) / (kf + 1.0);
        q.push(next);
    }
    q
}

/// Moments q_k(x) = ∫_{-1}^{1} P_k(t) ln|x - t| dt for x strictly inside
/// (-1, 1). q_0 from the antiderivative; q_k for k >= 1 via
/// q_k = 2 (Q_{k+1} - Q_{k-1}) / (2k + 1), after integrating by parts
/// against (P_{k+1} - P_{k-1})' = (2k+1) P_k.
pub fn log_moments(nmax: usize, x: f64) -> Vec<f64> {
    debug_assert!(x.abs() < 1.0);
    let q = legendre_q_all(nmax + 1, x);
    let mut out = Vec::with_capacity(nmax + 1);
    let q0 = (1.0 - x) * (1.0 - x).ln() + (1.0 + x) * (1.0 + x).ln() - 2.0;
    out.push(q0);
    for k in 1..=nmax {
        out.push(2.0 * (q[k + 1] - q[k - 1]) / (2.0 * k as f64 + 1.0));
    }
    out
}

/// Weights w such that sum_j w_j f(t_j) = ∫_{-1}^1 f(t) ln|x - t| dt exactly
/// for f a polynomial of degree < order, where t_j are the Gauss nodes.
///
/// Built by expanding the interpolant of f in Legendre polynomials: the
/// coefficient quadrature c_k = (2k+1)/2 sum_j w_j^G P_k(t_j) f(t_j) is exact
/// because deg(P_k f) <= 2 order - 2.
pub fn log_quadrature_weights(rule: &GaussRule, x: f64) -> Vec<f64> {
    let p = rule.nodes.len();
    let moments = log_moments(p - 1, x);
    let mut w = vec![0.0; p];
    for (j, (&tj, &wj)) in rule.nodes.iter().zip(rule.weights.iter()).enumerate() {
        let pk = legendre_all(p - 1, tj);
        let mut acc = 0.0;
        for k in 0..p {
            acc += (2.0 * k as f64 + 1.0) / 2.0 * wj * pk[k] * moments[k];
        }
        w[j] = acc;
    }
    w
}

/// Row-stochastic barycentric interpolation matrix from values at `from`
/// nodes to values at `to` points.
pub fn interpolation_matrix(from: &[f64], to: &[f64]) -> Vec<Vec<f64>> {
    let n = from.len();
    // barycentric weights
    let mut bw = vec![1.0; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                bw[i] /= from[i] - from[j];
            }
        }
    }
    to.iter()
        .map(|&x| {
            let mut row = vec![0.0; n];
            if let Some(hit) = from.iter().position(|&f| (f - x).abs() < 1e-14) {
                row[hit] = 1.0;
                return row;
            }
            let mut denom = 0.0;
            for i in 0..n {
                let c = bw[i] / (x - from[i]);
                row[i] = c;
                denom += c;
            }
            for r in row.iter_mut() {
                *r /= denom;
            }
            row
        })
        .collect()
}

/// Adaptive quadrature of f on [a, b] by bisected Gauss(15) with Gauss(7)
/// error estimates. Used for arclength and other scalar integrals.
pub fn adaptive_quadrature<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let g15 = GaussRule::new(15).expect("order 15 valid");
    let g7 = GaussRule::new(7).expect("order 7 valid");
    fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rule: &GaussRule) -> f64 {
        let h = 0.5 * (b - a);
        let m = 0.5 * (a + b);
        rule.nodes
            .iter()
            .zip(rule.weights.iter())
            .map(|(&t, &w)| w * f(m + h * t))
            .sum::<f64>()
            * h
    }
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        tol: f64,
        g15: &GaussRule,
        g7: &GaussRule,
        depth: usize,
    ) -> f64 {
        let coarse = panel(f, a, b, g7);
        let fine = panel(f, a, b, g15);
        if (fine - coarse).abs() <= tol * (1.0 + fine.abs()) || depth >= 40 {
            fine
        } else {
            let m = 0.5 * (a + b);
            recurse(f, a, m, tol / 2.0, g15, g7, depth + 1)
                + recurse(f, m, b, tol / 2.0, g15, g7, depth + 1)
        }
    }
    recurse(f, a, b, tol, &g15, &g7, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_rule_integrates_polynomials_exactly() {
        let rule = GaussRule::new(8).unwrap();
        // exact through degree 15
        for deg in 0..=15usize {
            let exact = if deg % 2 == 0 {
                2.0 / (deg as f64 + 1.0)
            } else {
                0.0
            };
            let got: f64 = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(&t, &w)| w * t.powi(deg as i32))
                .sum();
            assert!((got - exact).abs() < 1e-13, "deg {deg}: {got} vs {exact}");
        }
        let wsum: f64 = rule.weights.iter().sum();
        assert!((wsum - 2.0).abs() < 1e-14);
    }

    #[test]
    fn log_moments_match_brute_force() {
        // independent route: split at the singularity and substitute
        // u = w^2 so the integrand w*ln(w) is continuous at the endpoint
        let x = 0.37;
        let moments = log_moments(6, x);
        for (k, &qk) in moments.iter().enumerate() {
            let pk = move |t: f64| legendre_all(k, t)[k];
            let left = adaptive_quadrature(
                &|w: f64| {
                    let u = w * w;
                    4.0 * w * w.max(1e-300).ln() * pk(x - u)
                },
                0.0,
                (x + 1.0f64).sqrt(),
                1e-13,
            );
            let right = adaptive_quadrature(
                &|w: f64| {
                    let u = w * w;
                    4.0 * w * w.max(1e-300).ln() * pk(x + u)
                },
                0.0,
                (1.0 - x).sqrt(),
                1e-13,
            );
            let total = left + right;
            assert!(
                (qk - total).abs() < 1e-10,
                "moment {k}: recurrence {qk} vs brute {total}"
            );
        }
    }

    #[test]
    fn log_weights_integrate_smooth_times_log() {
        let rule = GaussRule::new(16).unwrap();
        let x = rule.nodes[5];
        let w = log_quadrature_weights(&rule, x);
        // f(t) = 3 t^2 - t: integral of f(t) ln|x-t| via moments directly
        let m = log_moments(2, x);
        // 3t^2 - t = 2 P_2 + 1 P_0 - P_1
        let exact = 2.0 * m[2] + m[0] - m[1];
        let got: f64 = rule
            .nodes
            .iter()
            .zip(&w)
            .map(|(&t, &wi)| wi * (3.0 * t * t - t))
            .sum();
        assert!((got - exact).abs() < 1e-12);
    }

    #[test]
    fn interpolation_reproduces_polynomials() {
        let from = GaussRule::new(10).unwrap().nodes;
        let to = GaussRule::new(20).unwrap().nodes;
        let mat = interpolation_matrix(&from, &to);
        let f = |x: f64| 1.0 - 2.0 * x + 0.5 * x.powi(7);
        for (i, &x) in to.iter().enumerate() {
            let got: f64 = mat[i].iter().zip(&from).map(|(&c, &t)| c * f(t)).sum();
            assert!((got - f(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn adaptive_quadrature_arclength_of_circle() {
        let r = 0.7;
        let len = adaptive_quadrature(&|_t: f64| r, 0.0, 2.0 * std::f64::consts::PI, 1e-13);
        assert!((len - 2.0 * std::f64::consts::PI * r).abs() < 1e-12);
        // something less trivial: int_0^1 sqrt(1+4t^2) dt (parabola arclength)
        let v = adaptive_quadrature(&|t: f64| (1.0 + 4.0 * t * t).sqrt(), 0.0, 1.0, 1e-13);
        let exact = 0.5 * (5f64.sqrt() + 0.5 * (2.0 + 5f64.sqrt()).ln());
        assert!((v - exact).abs() < 1e-12, "{v} vs {exact}");
    }
}
