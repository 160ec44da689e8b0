//! The Mellin symbol of the model corner operator, its spectral contours,
//! and the inverse map onto the half-strip.
//!
//! The symbol is `K̂_α(z) = sin((π−α)z)/sin(πz)`, analytic and rapidly
//! decreasing in the strip `|Re z| < 1`. It is even, commutes with complex
//! conjugation, and flips sign under `α ↦ 2π−α`. Its restriction to the
//! half-strip `{|Re z| < 1/2, Im z < 0}` is a biholomorphism onto the
//! region `Σ̃₁ \ γ₁` enclosed by the contour `Σ₁ = clos K̂_α(−1/2 + iℝ)`
//! minus the real slit `γ₁ = [1−α/π, sin((π−α)/2)]`; `mu_inverse` computes
//! the inverse of that restriction.

use crate::error::{Error, Result};
use crate::C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Opening angle of a curvilinear corner, in radians, `0 < α < 2π`, `α ≠ π`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CornerAngle {
    alpha: f64,
}

impl CornerAngle {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 || alpha >= 2.0 * PI {
            return Err(Error::Domain(format!(
                "corner angle must lie in (0, 2pi), got {alpha}"
            )));
        }
        if (alpha - PI).abs() < 1e-12 {
            return Err(Error::Domain("corner angle pi is not a corner".into()));
        }
        Ok(CornerAngle { alpha })
    }

    pub fn radians(self) -> f64 {
        self.alpha
    }

    /// True for `α < π` (the acute-side representative used by the
    /// half-strip analysis).
    pub fn is_acute_side(self) -> bool {
        self.alpha < PI
    }
}

/// A complex spectral parameter (`λ`, or the permittivity shift `z`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    pub lambda: C64,
}

impl SpectralPoint {
    pub fn new(lambda: C64) -> Result<Self> {
        if !lambda.re.is_finite() || !lambda.im.is_finite() {
            return Err(Error::Domain("spectral point must be finite".into()));
        }
        Ok(SpectralPoint { lambda })
    }
}

/// Tolerance below which a real z is treated as sitting on a nonzero
/// integer pole of the symbol.
const POLE_TOL: f64 = 1e-12;
/// Switch to the even Taylor series of the symbol below this radius.
const SERIES_RADIUS: f64 = 1e-3;

/// `K̂_α(z) = sin((π−α)z)/sin(πz)`, with the removable singularity at the
/// origin filled by the even Taylor series.
pub fn symbol_value(alpha: CornerAngle, z: C64) -> Result<C64> {
    check_pole(z)?;
    let a = PI - alpha.radians();
    if z.norm() < SERIES_RADIUS {
        let (c0, c2) = symbol_taylor_at_zero(alpha);
        let (c4, c6) = symbol_taylor_higher(alpha);
        let z2 = z * z;
        return Ok(c0 + z2 * (c2 + z2 * (c4 + z2 * c6)));
    }
    Ok((a * z).sin() / (PI * z).sin())
}

/// `d/dz K̂_α(z)`, analytic on the same strip; series branch near 0.
pub fn symbol_derivative(alpha: CornerAngle, z: C64) -> Result<C64> {
    check_pole(z)?;
    let a = PI - alpha.radians();
    if z.norm() < SERIES_RADIUS {
        let (_, c2) = symbol_taylor_at_zero(alpha);
        let (c4, c6) = symbol_taylor_higher(alpha);
        let z2 = z * z;
        return Ok(z * (2.0 * c2 + z2 * (4.0 * c4 + z2 * 6.0 * c6)));
    }
    let s = (PI * z).sin();
    Ok((a * (a * z).cos() * s - PI * (a * z).sin() * (PI * z).cos()) / (s * s))
}

fn check_pole(z: C64) -> Result<()> {
    let r = z.re.round();
    if r != 0.0 && (z.re - r).abs() < POLE_TOL && z.im.abs() < POLE_TOL {
        return Err(Error::Pole(format!("{z}")));
    }
    Ok(())
}

/// Leading Taylor data of the symbol at the origin:
/// `c0 = 1 − α/π`, `c2 = α(π−α)(2π−α)/(6π)`.
pub fn symbol_taylor_at_zero(alpha: CornerAngle) -> (f64, f64) {
    let al = alpha.radians();
    (1.0 - al / PI, al * (PI - al) * (2.0 * PI - al) / (6.0 * PI))
}

/// Higher even coefficients (c4, c6) of the same expansion, used by the
/// series branch.
fn symbol_taylor_higher(alpha: CornerAngle) -> (f64, f64) {
    let a = PI - alpha.radians();
    let p2 = PI * PI;
    let c4 = a * (a * a - p2) * (3.0 * a * a - 7.0 * p2) / (360.0 * PI);
    let c6 = (a / PI)
        * (-a.powi(6) / 5040.0 + a.powi(4) * p2 / 720.0 - 7.0 * a * a * p2 * p2 / 2160.0
            + 31.0 * p2 * p2 * p2 / 15120.0);
    (c4, c6)
}

/// Radius `|1 − α/π|` of the essential-spectrum interval produced by the
/// corner.
pub fn essential_spectrum_bound(alpha: CornerAngle) -> f64 {
    (1.0 - alpha.radians() / PI).abs()
}

/// Endpoints of the slit `γ₁ = [1−α/π, sin((π−α)/2)]`; acute side only.
pub fn gamma1_endpoints(alpha: CornerAngle) -> Result<(f64, f64)> {
    if !alpha.is_acute_side() {
        return Err(Error::Domain(
            "gamma1 is defined for alpha < pi; reduce the angle first".into(),
        ));
    }
    let al = alpha.radians();
    Ok((1.0 - al / PI, ((PI - al) / 2.0).sin()))
}

/// True when real `λ` lies on the closed slit `γ₁` (within `tol`).
pub fn on_gamma1(alpha: CornerAngle, lambda: C64, tol: f64) -> Result<bool> {
    let (lo, hi) = gamma1_endpoints(alpha)?;
    Ok(lambda.im.abs() <= tol && lambda.re >= lo - tol && lambda.re <= hi + tol)
}

/// Sampled spectral contour `Σ_{η,α} = clos K̂_α((1/2−η) + iℝ)`.
#[derive(Debug, Clone)]
pub struct SigmaContour {
    pub alpha: CornerAngle,
    pub eta: f64,
    /// `K̂_α((1/2−η) + i t_k)` on the stored grid.
    pub samples: Vec<C64>,
    pub parameter_grid: Vec<f64>,
}

impl SigmaContour {
    /// Nearest distance from `p` to the sampled polyline.
    pub fn distance_to(&self, p: C64) -> f64 {
        let mut best = f64::INFINITY;
        for w in self.samples.windows(2) {
            best = best.min(segment_distance(w[0], w[1], p));
        }
        best
    }

    /// Winding number of the closed polyline (closed through the samples'
    /// common limit 0) about `p`, by summing turn angles.
    pub fn winding_number(&self, p: C64) -> i32 {
        let mut total = 0.0;
        let n = self.samples.len();
        for i in 0..n {
            let a = self.samples[i] - p;
            let b = self.samples[(i + 1) % n] - p;
            total += (b / a).arg();
        }
        (total / (2.0 * PI)).round() as i32
    }

    /// True when no two non-adjacent segments of the polyline intersect.
    pub fn is_simple(&self) -> bool {
        let segs: Vec<(C64, C64)> = self
            .samples
            .windows(2)
            .map(|w| (w[0], w[1]))
            .collect();
        for i in 0..segs.len() {
            for j in (i + 2)..segs.len() {
                if i == 0 && j == segs.len() - 1 {
                    continue;
                }
                if segments_intersect(segs[i], segs[j]) {
                    return false;
                }
            }
        }
        true
    }
}

fn segment_distance(a: C64, b: C64, p: C64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).re * ab.re + (p - a).im * ab.im) / len2;
    let t = t.clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

fn segments_intersect(s1: (C64, C64), s2: (C64, C64)) -> bool {
    let cross = |o: C64, a: C64, b: C64| (a - o).re * (b - o).im - (a - o).im * (b - o).re;
    let (a, b) = s1;
    let (c, d) = s2;
    let d1 = cross(a, b, c);
    let d2 = cross(a, b, d);
    let d3 = cross(c, d, a);
    let d4 = cross(c, d, b);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

/// Sample `Σ_{η,α}` on a tanh-graded grid `t = t_max · tanh(u)` with
/// `n_samples` points over `[−t_max, t_max]`.
pub fn sigma_contour(
    alpha: CornerAngle,
    eta: f64,
    n_samples: usize,
    t_max: f64,
) -> Result<SigmaContour> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::Domain(format!("eta {eta} outside [0,1]")));
    }
    if n_samples < 16 {
        return Err(Error::Domain("need at least 16 samples".into()));
    }
    if t_max <= 0.0 {
        return Err(Error::Domain("t_max must be positive".into()));
    }
    let c = 0.5 - eta;
    // u-range saturating tanh so the endpoints reach ~t_max
    let u_max = 10.0;
    let mut parameter_grid = Vec::with_capacity(n_samples);
    let mut samples = Vec::with_capacity(n_samples);
    for k in 0..n_samples {
        let u = -u_max + 2.0 * u_max * k as f64 / (n_samples - 1) as f64;
        let t = t_max * u.tanh();
        let z = C64::new(c, t);
        parameter_grid.push(t);
        samples.push(symbol_value(alpha, z)?);
    }
    Ok(SigmaContour {
        alpha,
        eta,
        samples,
        parameter_grid,
    })
}

/// Default boundary tolerance of the region membership test.
pub const SIGMA_BOUNDARY_TOL: f64 = 1e-8;
const SIGMA_TEST_SAMPLES: usize = 20_000;

/// Membership of `λ` in the open region `Σ̃_{1,α}`, decided by the winding
/// number of a dense `Σ_{1,α}` polyline. Points within `tol` of the polyline
/// raise [`Error::OnBoundary`].
pub fn in_sigma_tilde(alpha: CornerAngle, lambda: C64) -> Result<bool> {
    in_sigma_tilde_tol(alpha, lambda, SIGMA_BOUNDARY_TOL)
}

pub fn in_sigma_tilde_tol(alpha: CornerAngle, lambda: C64, tol: f64) -> Result<bool> {
    if !alpha.is_acute_side() {
        return Err(Error::Domain(
            "in_sigma_tilde expects alpha < pi; reduce the angle first".into(),
        ));
    }
    let contour = sigma_contour(alpha, 1.0, SIGMA_TEST_SAMPLES, 40.0)?;
    let dist = contour.distance_to(lambda);
    if dist < tol {
        return Err(Error::OnBoundary { dist, tol });
    }
    Ok(contour.winding_number(lambda) != 0)
}

/// Result of inverting the symbol on the half-strip.
#[derive(Debug, Clone, Copy)]
pub struct MuResult {
    pub mu: C64,
    /// `|K̂_α(mu) − λ|` at the returned point.
    pub residual: f64,
    pub iterations: usize,
}

/// Exact inverse of `K̂_{π/2}` on the half-strip:
/// `μ = (2/π)·arccos(1/(2λ))`, equivalently
/// `−(2i/π)·log(1/(2λ) + ((2λ)^{−2} − 1)^{1/2})`, branched so that
/// `|Re μ| ≤ 1/2` and `Im μ ≤ 0`.
///
/// The two printed forms differ only in the branch bookkeeping; a variant
/// with a `1/λ` prefactor in place of `1/π` also circulates but fails the
/// endpoint check `λ = 1/√2 ↦ 1/2`, so this crate uses the arccos-derived
/// normalization throughout.
pub fn mu_closed_form_right_angle(lambda: C64) -> Result<C64> {
    let alpha = CornerAngle::new(PI / 2.0).expect("valid");
    if lambda.norm() < 1e-14 {
        return Err(Error::NotInDomain("lambda = 0 is on the contour".into()));
    }
    let w = C64::new(1.0, 0.0) / (2.0 * lambda);
    let mut z = acos(w) * (2.0 / PI);
    if z.im > 0.0 {
        z = -z;
    }
    // admit boundary values (real segment, imaginary axis) up to rounding
    if z.re.abs() > 0.5 + 1e-9 || z.im > 1e-9 {
        return Err(Error::NotInDomain(format!(
            "lambda {lambda} maps outside the closed half-strip (z = {z})"
        )));
    }
    let resid = (symbol_value(alpha, z)? - lambda).norm();
    if resid > 1e-6 * (1.0 + lambda.norm()) {
        return Err(Error::NotInDomain(format!(
            "closed form inconsistent at lambda {lambda} (residual {resid:e})"
        )));
    }
    Ok(z)
}

/// Principal-branch complex arccos.
fn acos(w: C64) -> C64 {
    // acos(w) = -i log(w + i sqrt(1 - w^2))
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    -i * (w + i * (one - w * w).sqrt()).ln()
}

/// Reduce an obtuse-side angle to the acute side via
/// `K̂_{2π−α} = −K̂_α`: for `α > π` returns `(2π−α, −λ, −1)`, otherwise the
/// identity with sign `+1`.
pub fn reduce_angle(alpha: CornerAngle, lambda: C64) -> (CornerAngle, C64, i32) {
    if alpha.is_acute_side() {
        (alpha, lambda, 1)
    } else {
        (
            CornerAngle::new(2.0 * PI - alpha.radians()).expect("reduced angle valid"),
            -lambda,
            -1,
        )
    }
}

/// Invert the symbol on the half-strip: find `μ` with `K̂_α(μ) = λ`,
/// `|Re μ| ≤ 1/2`, `Im μ ≤ 0`.
///
/// Newton with the analytic derivative. Starts, in order: the `α = π/2`
/// closed form, the small-`|λ|` asymptotic `μ₀ = i·log|λ|/α`, and a fixed
/// grid of points in the half-strip. The half-strip is a univalence domain,
/// so any converged in-strip root is the root; iterates leaving the strip
/// trigger the next start.
pub fn mu_inverse(alpha: CornerAngle, lambda: C64, tol: f64) -> Result<MuResult> {
    if !alpha.is_acute_side() {
        return Err(Error::Domain(
            "mu_inverse expects alpha < pi; apply reduce_angle first".into(),
        ));
    }
    let al = alpha.radians();
    let (c0, _) = symbol_taylor_at_zero(alpha);
    // endpoint lambda = K(0) = 1 - alpha/pi
    if (lambda - C64::new(c0, 0.0)).norm() < 1e-13 {
        return Ok(MuResult {
            mu: C64::new(0.0, 0.0),
            residual: 0.0,
            iterations: 0,
        });
    }
    // domain: inside the contour and off the open slit. Real lambda on the
    // closed slit gamma1 is admitted as a boundary value (mapped to the real
    // segment [0, 1/2], the limit from Im lambda < 0).
    let inside = in_sigma_tilde_tol(alpha, lambda, 1e-12)?;
    if !inside {
        return Err(Error::NotInDomain(format!("lambda {lambda} outside")));
    }

    let mut starts: Vec<C64> = Vec::new();
    if let Ok(z) = mu_closed_form_right_angle(lambda) {
        starts.push(z);
    }
    if lambda.norm() > 1e-14 && lambda.norm() < 1.0 {
        starts.push(C64::new(0.0, lambda.norm().ln() / al));
    }
    for &x0 in &[0.0, -0.25, 0.25, -0.45, 0.45] {
        for &y0 in &[-0.1, -0.4, -1.0, -2.0, -4.0] {
            starts.push(C64::new(x0, y0));
        }
    }

    let mut total_iters = 0usize;
    for &z0 in &starts {
        if let Some(res) = newton_in_strip(alpha, lambda, z0, tol, &mut total_iters) {
            return Ok(res);
        }
    }
    Err(Error::NoConvergence(starts.len()))
}

fn newton_in_strip(
    alpha: CornerAngle,
    lambda: C64,
    z0: C64,
    tol: f64,
    total_iters: &mut usize,
) -> Option<MuResult> {
    let mut z = z0;
    for it in 0..80 {
        *total_iters += 1;
        let f = match symbol_value(alpha, z) {
            Ok(v) => v - lambda,
            Err(_) => return None,
        };
        if f.norm() <= tol {
            return finish_root(alpha, lambda, z, *total_iters + it);
        }
        let df = match symbol_derivative(alpha, z) {
            Ok(v) => v,
            Err(_) => return None,
        };
        if df.norm() < 1e-300 {
            return None;
        }
        let mut step = f / df;
        // damp absurd steps; the symbol is tame inside the strip
        if step.norm() > 2.0 {
            step *= 2.0 / step.norm();
        }
        z -= step;
        // evenness: fold the upper half-strip back down
        if z.im > 0.0 {
            z = -z;
        }
        // restart when far outside the univalence strip
        if z.re.abs() > 1.2 || z.im < -60.0 {
            return None;
        }
    }
    None
}

fn finish_root(alpha: CornerAngle, lambda: C64, z: C64, iterations: usize) -> Option<MuResult> {
    let mut mu = if z.im > 0.0 { -z } else { z };
    // polish once more in case of the fold
    for _ in 0..4 {
        let f = symbol_value(alpha, mu).ok()? - lambda;
        let df = symbol_derivative(alpha, mu).ok()?;
        if df.norm() < 1e-300 {
            break;
        }
        mu -= f / df;
    }
    if mu.im > 0.0 {
        mu = -mu;
    }
    let strip_tol = 1e-8;
    if mu.re.abs() > 0.5 + strip_tol || mu.im > strip_tol {
        return None;
    }
    // clamp boundary dust
    if mu.im > 0.0 {
        mu.im = 0.0;
    }
    let residual = (symbol_value(alpha, mu).ok()? - lambda).norm();
    // sign law: Re mu < 0 for Im lambda > 0, Re mu > 0 for Im lambda < 0
    if lambda.im > 1e-12 && mu.re > strip_tol {
        return None;
    }
    if lambda.im < -1e-12 && mu.re < -strip_tol {
        return None;
    }
    Some(MuResult {
        mu,
        residual,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ca(a: f64) -> CornerAngle {
        CornerAngle::new(a).unwrap()
    }

    #[test]
    fn corner_angle_rejects_degenerate_values() {
        assert!(CornerAngle::new(0.0).is_err());
        assert!(CornerAngle::new(PI).is_err());
        assert!(CornerAngle::new(2.0 * PI).is_err());
        assert!(CornerAngle::new(f64::NAN).is_err());
        assert!(CornerAngle::new(2.0 * PI / 7.0).is_ok());
    }

    #[test]
    fn symbol_closed_form_values() {
        let a = ca(PI / 2.0);
        // K(0) = 1 - alpha/pi = 1/2
        let v = symbol_value(a, C64::new(0.0, 0.0)).unwrap();
        assert_relative_eq!(v.re, 0.5, epsilon = 1e-15);
        assert_eq!(v.im, 0.0);
        // K(1/2) = sin(pi/4)/sin(pi/2)
        let v = symbol_value(a, C64::new(0.5, 0.0)).unwrap();
        assert_relative_eq!(v.re, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        // K(-i) = sinh(pi/2)/sinh(pi) = 0.19926840766919334 (frozen oracle)
        let v = symbol_value(a, C64::new(0.0, -1.0)).unwrap();
        assert_relative_eq!(v.re, 0.19926840766919334, epsilon = 1e-15);
        assert!(v.im.abs() < 1e-16);
    }

    #[test]
    fn symbol_series_branch_agrees_with_direct() {
        // straddle the series radius: compare series value against the
        // direct ratio slightly outside, via a common midpoint evaluation
        for &alpha in &[2.0 * PI / 7.0, PI / 3.0, 3.0 * PI / 4.0] {
            let a = ca(alpha);
            for &r in &[2e-4, 9e-4] {
                for &arg in &[0.3, 1.2, -2.0] {
                    let z = C64::from_polar(r, arg);
                    let series = symbol_value(a, z).unwrap();
                    let aa = PI - alpha;
                    let direct = (aa * z).sin() / (PI * z).sin();
                    assert!(
                        (series - direct).norm() <= 1e-14 * direct.norm() + 1e-18,
                        "alpha={alpha} z={z}: {series} vs {direct}"
                    );
                }
            }
        }
    }

    #[test]
    fn symbol_pole_detection() {
        let a = ca(PI / 3.0);
        assert!(matches!(
            symbol_value(a, C64::new(1.0, 0.0)),
            Err(Error::Pole(_))
        ));
        assert!(matches!(
            symbol_value(a, C64::new(-2.0, 0.0)),
            Err(Error::Pole(_))
        ));
        // z = 0 is removable, not a pole
        assert!(symbol_value(a, C64::new(0.0, 0.0)).is_ok());
    }

    #[test]
    fn taylor_coefficients() {
        let a = ca(PI / 2.0);
        let (c0, c2) = symbol_taylor_at_zero(a);
        assert_relative_eq!(c0, 0.5, epsilon = 1e-15);
        assert_relative_eq!(c2, PI * PI / 16.0, epsilon = 1e-14);
        // odd symmetry of c0 about alpha = pi
        let (c0a, _) = symbol_taylor_at_zero(ca(2.0 * PI / 7.0));
        let (c0b, _) = symbol_taylor_at_zero(ca(2.0 * PI - 2.0 * PI / 7.0));
        assert_relative_eq!(c0a, -c0b, epsilon = 1e-15);
        assert_relative_eq!(c0a, 5.0 / 7.0, epsilon = 1e-15);
        // finite-difference check of c2: second central difference / 2
        let h = 1e-4;
        let f = |z: f64| symbol_value(a, C64::new(z, 0.0)).unwrap().re;
        let fd = (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h) / 2.0;
        assert_relative_eq!(fd, c2, max_relative = 1e-6);
    }

    #[test]
    fn essential_bound_and_gamma1() {
        assert_relative_eq!(essential_spectrum_bound(ca(2.0 * PI / 7.0)), 5.0 / 7.0);
        assert_relative_eq!(essential_spectrum_bound(ca(PI / 2.0)), 0.5);
        assert_relative_eq!(essential_spectrum_bound(ca(3.0 * PI / 2.0)), 0.5);
        let (lo, hi) = gamma1_endpoints(ca(PI / 2.0)).unwrap();
        assert_relative_eq!(lo, 0.5, epsilon = 1e-15);
        assert_relative_eq!(hi, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        // frozen oracle: sin(5pi/14)
        let (lo, hi) = gamma1_endpoints(ca(2.0 * PI / 7.0)).unwrap();
        assert_relative_eq!(lo, 5.0 / 7.0, epsilon = 1e-15);
        assert_relative_eq!(hi, 0.9009688679024191, epsilon = 1e-15);
        assert!(lo <= hi);
        // both endpoints vanish as alpha -> pi
        let (lo, hi) = gamma1_endpoints(ca(PI - 1e-6)).unwrap();
        assert!(lo.abs() < 1e-6 && hi.abs() < 1e-6);
        assert!(gamma1_endpoints(ca(3.0 * PI / 2.0)).is_err());
    }

    #[test]
    fn sigma_contour_eta_half_is_real_segment() {
        let a = ca(2.0 * PI / 7.0);
        let c = sigma_contour(a, 0.5, 512, 30.0).unwrap();
        let rho = essential_spectrum_bound(a);
        for s in &c.samples {
            assert!(s.im.abs() < 1e-14);
            assert!(s.re >= -1e-14 && s.re <= rho + 1e-14);
        }
    }

    #[test]
    fn sigma_contour_eta_one_center_and_decay() {
        let a = ca(PI / 2.0);
        let c = sigma_contour(a, 1.0, 513, 30.0).unwrap();
        // middle sample has t = 0: K(-1/2) = sin((pi-alpha)/2)
        let mid = c.samples[256];
        assert_relative_eq!(mid.re, (PI / 4.0).sin(), epsilon = 1e-12);
        assert!(mid.im.abs() < 1e-12);
        // endpoints decay to ~0 (|symbol| ~ e^{-alpha t} = e^{-15 pi} here)
        assert!(c.samples[0].norm() < 1e-18);
        assert!(c.samples.last().unwrap().norm() < 1e-18);
        // polyline is simple at sample resolution
        let small = sigma_contour(a, 1.0, 700, 30.0).unwrap();
        assert!(small.is_simple());
    }

    #[test]
    fn sigma_tilde_membership() {
        let a27 = ca(2.0 * PI / 7.0);
        assert!(in_sigma_tilde(a27, C64::new(0.3, 0.0)).unwrap());
        assert!(!in_sigma_tilde(a27, C64::new(-0.3, 0.0)).unwrap());
        let a2 = ca(PI / 2.0);
        assert!(in_sigma_tilde(a2, C64::new(0.4, -0.1)).unwrap());
        assert!(!in_sigma_tilde(a2, C64::new(2.0, 0.0)).unwrap());
        // winding count on a brute-force dense polyline agrees; 0 is on the
        // closure of the contour
        assert!(matches!(
            in_sigma_tilde(a2, C64::new(0.0, 0.0)),
            Err(Error::OnBoundary { .. })
        ));
    }

    #[test]
    fn closed_form_right_angle_values() {
        // lambda = 1/2 -> 0
        let z = mu_closed_form_right_angle(C64::new(0.5, 0.0)).unwrap();
        assert!(z.norm() < 1e-12);
        // lambda = 1/sqrt(2) -> 1/2 (boundary)
        let z = mu_closed_form_right_angle(C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)).unwrap();
        assert_relative_eq!(z.re, 0.5, epsilon = 1e-9);
        assert!(z.im.abs() < 1e-9);
        // lambda = 0.3 -> -0.6993983051321196 i (frozen oracle)
        let z = mu_closed_form_right_angle(C64::new(0.3, 0.0)).unwrap();
        assert!(z.re.abs() < 1e-12);
        assert_relative_eq!(z.im, -0.6993983051321196, epsilon = 1e-12);
    }

    #[test]
    fn reduce_angle_cases() {
        let (a, l, s) = reduce_angle(ca(3.0 * PI / 2.0), C64::new(0.2, 0.0));
        assert_relative_eq!(a.radians(), PI / 2.0, epsilon = 1e-15);
        assert_relative_eq!(l.re, -0.2, epsilon = 1e-15);
        assert_eq!(s, -1);
        let (a, l, s) = reduce_angle(ca(PI / 2.0), C64::new(0.2, 0.0));
        assert_relative_eq!(a.radians(), PI / 2.0);
        assert_relative_eq!(l.re, 0.2);
        assert_eq!(s, 1);
        // symbol check of the symmetry at a generic point
        let z = C64::new(0.3, 0.1);
        let v1 = symbol_value(ca(3.0 * PI / 2.0), z).unwrap();
        let v2 = symbol_value(ca(PI / 2.0), z).unwrap();
        assert!((v1 + v2).norm() < 1e-14);
    }

    #[test]
    fn mu_inverse_basic() {
        let a = ca(PI / 2.0);
        // endpoint lambda = 1 - alpha/pi -> mu = 0
        let r = mu_inverse(a, C64::new(0.5, 0.0), 1e-12).unwrap();
        assert!(r.mu.norm() < 1e-12);
        // interior real point matches closed form
        let r = mu_inverse(a, C64::new(0.3, 0.0), 1e-13).unwrap();
        assert!((r.mu - C64::new(0.0, -0.6993983051321196)).norm() < 1e-10);
        assert!(r.residual <= 1e-12);
        // complex points: sign law
        let r = mu_inverse(a, C64::new(0.35, 0.02), 1e-13).unwrap();
        assert!(r.mu.re < 0.0);
        let r = mu_inverse(a, C64::new(0.4, -0.1), 1e-13).unwrap();
        assert!(r.mu.re > 0.0);
        // frozen oracle for the latter: 0.245387081085424 - 0.457579744828667 i
        assert!((r.mu - C64::new(0.245387081085424, -0.457579744828667)).norm() < 1e-10);
        // outside the region
        assert!(mu_inverse(a, C64::new(-0.3, 0.0), 1e-12).is_err());
    }

    #[test]
    fn mu_inverse_gamma1_boundary_is_real() {
        let a = ca(PI / 2.0);
        // interior of the slit: admitted as the boundary value on [0, 1/2]
        let r = mu_inverse(a, C64::new(0.6, 0.0), 1e-12).unwrap();
        assert!(r.mu.im.abs() < 1e-9, "mu = {}", r.mu);
        assert!(r.mu.re > 0.0 && r.mu.re < 0.5);
    }
}
