//! Dense complex LU with partial pivoting, a Hager-style 1-norm condition
//! estimator, power-iteration operator norms, and polynomial extrapolation.

use crate::error::{Error, Result};
use crate::C64;
use nalgebra::DMatrix;

/// LU factorization of a dense complex matrix, row-major storage.
pub struct ComplexLu {
    n: usize,
    /// Combined L (unit diagonal, below) and U (on and above).
    lu: Vec<C64>,
    piv: Vec<usize>,
    /// 1-norm of the original matrix.
    norm1: f64,
}

impl ComplexLu {
    pub fn factor(a: &DMatrix<C64>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::Domain("matrix must be square".into()));
        }
        let mut norm1: f64 = 0.0;
        for j in 0..n {
            let col: f64 = (0..n).map(|i| a[(i, j)].norm()).sum();
            norm1 = norm1.max(col);
        }
        let mut lu = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                lu[i * n + j] = a[(i, j)];
            }
        }
        let mut piv = Vec::with_capacity(n);
        for k in 0..n {
            // pivot search in column k
            let mut p = k;
            let mut best = lu[k * n + k].norm();
            for i in (k + 1)..n {
                let v = lu[i * n + k].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return Err(Error::NearSingular(f64::INFINITY));
            }
            piv.push(p);
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
            }
            let pivot = lu[k * n + k];
            let inv = C64::new(1.0, 0.0) / pivot;
            for i in (k + 1)..n {
                let m = lu[i * n + k] * inv;
                lu[i * n + k] = m;
                if m.norm_sqr() != 0.0 {
                    let (rk, ri) = (k * n, i * n);
                    for j in (k + 1)..n {
                        let t = lu[rk + j];
                        lu[ri + j] -= m * t;
                    }
                }
            }
        }
        Ok(ComplexLu { n, lu, piv, norm1 })
    }

    pub fn solve_in_place(&self, b: &mut [C64]) {
        let n = self.n;
        debug_assert_eq!(b.len(), n);
        for k in 0..n {
            b.swap(k, self.piv[k]);
        }
        // Ly = Pb
        for i in 1..n {
            let mut acc = b[i];
            let row = i * n;
            for j in 0..i {
                acc -= self.lu[row + j] * b[j];
            }
            b[i] = acc;
        }
        // Ux = y
        for i in (0..n).rev() {
            let mut acc = b[i];
            let row = i * n;
            for j in (i + 1)..n {
                acc -= self.lu[row + j] * b[j];
            }
            b[i] = acc / self.lu[row + i];
        }
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    /// Solve Aᴴ x = b using the same factorization
    /// (Aᴴ = Uᴴ Lᴴ Pᵀ after PA = LU).
    pub fn solve_adjoint(&self, b: &[C64]) -> Vec<C64> {
        let n = self.n;
        let mut x = b.to_vec();
        // Uᴴ y = b (lower triangular with conjugated entries)
        for i in 0..n {
            let mut acc = x[i];
            for j in 0..i {
                acc -= self.lu[j * n + i].conj() * x[j];
            }
            x[i] = acc / self.lu[i * n + i].conj();
        }
        // Lᴴ z = y (upper triangular, unit diagonal)
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in (i + 1)..n {
                acc -= self.lu[j * n + i].conj() * x[j];
            }
            x[i] = acc;
        }
        // x = Pᵀ z: undo the row swaps in reverse
        for k in (0..n).rev() {
            x.swap(k, self.piv[k]);
        }
        x
    }

    /// Hager/Higham estimate of the 1-norm condition number.
    pub fn condition_estimate(&self) -> f64 {
        let n = self.n;
        let mut x = vec![C64::new(1.0 / n as f64, 0.0); n];
        let mut est = 0.0;
        for _ in 0..5 {
            let y = self.solve(&x);
            est = y.iter().map(|v| v.norm()).sum::<f64>();
            let xi: Vec<C64> = y
                .iter()
                .map(|v| {
                    if v.norm() == 0.0 {
                        C64::new(1.0, 0.0)
                    } else {
                        v / v.norm()
                    }
                })
                .collect();
            let z = self.solve_adjoint(&xi);
            let (mut zmax, mut jmax) = (0.0, 0);
            for (j, v) in z.iter().enumerate() {
                if v.norm() > zmax {
                    zmax = v.norm();
                    jmax = j;
                }
            }
            let zx: f64 = z
                .iter()
                .zip(x.iter())
                .map(|(a, b)| (a.conj() * b).re)
                .sum();
            if zmax <= zx + 1e-14 {
                break;
            }
            x = vec![C64::new(0.0, 0.0); n];
            x[jmax] = C64::new(1.0, 0.0);
        }
        self.norm1 * est
    }
}

/// Spectral-norm estimate by power iteration on BᴴB.
pub fn norm2_estimate(b: &DMatrix<C64>, iters: usize) -> f64 {
    let n = b.ncols();
    let mut v: Vec<C64> = (0..n)
        .map(|i| C64::new(1.0 + (i as f64 * 0.7).sin(), (i as f64 * 0.3).cos()))
        .collect();
    let nrm = |v: &[C64]| v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let s = nrm(&v);
    v.iter_mut().for_each(|x| *x /= s);
    let mut sigma = 0.0;
    for _ in 0..iters {
        // w = B v
        let mut w = vec![C64::new(0.0, 0.0); b.nrows()];
        for i in 0..b.nrows() {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..n {
                acc += b[(i, j)] * v[j];
            }
            w[i] = acc;
        }
        // v = Bᴴ w
        let mut u = vec![C64::new(0.0, 0.0); n];
        for j in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..b.nrows() {
                acc += b[(i, j)].conj() * w[i];
            }
            u[j] = acc;
        }
        let s = nrm(&u);
        if s == 0.0 {
            return 0.0;
        }
        sigma = s.sqrt();
        u.iter_mut().for_each(|x| *x /= s);
        v = u;
    }
    sigma
}

/// Neville evaluation at 0 of the polynomial through `(xs[i], ys[i])`.
/// Used for the Richardson extrapolation of ε-ladders.
pub fn extrapolate_to_zero(xs: &[f64], ys: &[C64]) -> C64 {
    assert_eq!(xs.len(), ys.len());
    let mut t = ys.to_vec();
    let n = t.len();
    for k in 1..n {
        for i in 0..(n - k) {
            let num = t[i + 1] * xs[i] - t[i] * xs[i + k];
            t[i] = num / (xs[i] - xs[i + k]);
        }
    }
    t[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_matrix(n: usize) -> DMatrix<C64> {
        DMatrix::from_fn(n, n, |i, j| {
            let x = ((i * 31 + j * 17) % 101) as f64 / 101.0 - 0.5;
            let y = ((i * 13 + j * 7) % 89) as f64 / 89.0 - 0.5;
            let diag = if i == j { 3.0 } else { 0.0 };
            C64::new(x + diag, y)
        })
    }

    #[test]
    fn lu_solves_and_adjoint_solves() {
        let n = 60;
        let a = test_matrix(n);
        let lu = ComplexLu::factor(&a).unwrap();
        let b: Vec<C64> = (0..n)
            .map(|i| C64::new((i as f64).sin(), (i as f64).cos()))
            .collect();
        let x = lu.solve(&b);
        // residual
        let mut rmax = 0.0f64;
        for i in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..n {
                acc += a[(i, j)] * x[j];
            }
            rmax = rmax.max((acc - b[i]).norm());
        }
        assert!(rmax < 1e-12, "residual {rmax}");
        // adjoint solve
        let y = lu.solve_adjoint(&b);
        let mut rmax = 0.0f64;
        for i in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..n {
                acc += a[(j, i)].conj() * y[j];
            }
            rmax = rmax.max((acc - b[i]).norm());
        }
        assert!(rmax < 1e-12, "adjoint residual {rmax}");
    }

    #[test]
    fn condition_estimate_tracks_truth() {
        // diagonal matrix with known condition number
        let n = 40;
        let a = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(1.0 / (i as f64 + 1.0), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let lu = ComplexLu::factor(&a).unwrap();
        let est = lu.condition_estimate();
        let truth = n as f64; // kappa_1 = (1)/(1/n)
        assert!(
            est >= 0.5 * truth && est <= 2.0 * truth,
            "est {est} truth {truth}"
        );
    }

    #[test]
    fn norm2_estimate_on_known_matrix() {
        let a = DMatrix::from_fn(30, 30, |i, j| {
            if i == j {
                C64::new(if i == 7 { 5.0 } else { 1.0 }, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let s = norm2_estimate(&a, 30);
        assert!((s - 5.0).abs() < 1e-6);
    }

    #[test]
    fn extrapolation_recovers_polynomial_limit() {
        // v(e) = 2 - 3e + e^2; exact at 0 with 3 points
        let xs = [0.08, 0.04, 0.02];
        let ys: Vec<C64> = xs
            .iter()
            .map(|&e| C64::new(2.0 - 3.0 * e + e * e, 0.5 * e))
            .collect();
        let v = extrapolate_to_zero(&xs, &ys);
        assert!((v - C64::new(2.0, 0.0)).norm() < 1e-13);
    }
}
