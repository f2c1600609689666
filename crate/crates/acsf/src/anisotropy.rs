//! The anisotropy factor `g: S¹ → ℝ₊` and its scalar functionals.
//!
//! `g` is a finite Fourier series, which keeps every integral the
//! construction needs in closed form: slab widths and the speed ratio come
//! from the exact antiderivative, derivatives up to second order from the
//! differentiated series. Strict positivity is enforced at construction by a
//! dense grid scan refined near the minimum.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Grid used for the positivity scan and as the starting bracket for the
/// extremum refinement.
const SCAN_POINTS: usize = 4096;

pub const TAU: f64 = 2.0 * std::f64::consts::PI;

/// Normalize an angle to the interval (-pi, pi].
pub fn normalize_angle(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(TAU);
    if t > std::f64::consts::PI {
        t -= TAU;
    }
    t
}

/// Raw series coefficients as they appear in config files:
/// `{"a": [a0, ..., aK], "b": [b1, ..., bK]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnisotropyCoeffs {
    pub a: Vec<f64>,
    #[serde(default)]
    pub b: Vec<f64>,
}

/// A strictly positive trigonometric polynomial on the circle,
/// `g(θ) = a₀ + Σ_k (a_k cos kθ + b_k sin kθ)`.
///
/// Immutable after construction; construction fails unless the series is
/// strictly positive on a dense grid.
#[derive(Debug, Clone)]
pub struct AnisotropyFn {
    /// Cosine coefficients a0..aK.
    a: Vec<f64>,
    /// Sine coefficients b1..bK (index 0 holds b1).
    b: Vec<f64>,
}

/// Extrema and total mass of `g`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AnisotropyStats {
    pub g_min: f64,
    pub g_max: f64,
    /// Sup norm of g on the circle; equals `g_max`.
    pub sup_norm: f64,
    /// Integral of g over the whole circle, `2π·a₀` exactly.
    pub total_integral: f64,
}

impl AnisotropyFn {
    /// Build from cosine coefficients `a0..aK` and sine coefficients
    /// `b1..bK`. Trailing coefficients may be omitted from `b`.
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        let mut a = if a.is_empty() { vec![0.0] } else { a };
        let order = (a.len() - 1).max(b.len());
        a.resize(order + 1, 0.0);
        let mut b = b;
        b.resize(order, 0.0);

        let g = AnisotropyFn { a, b };
        let (min, at) = g.grid_min();
        if min <= 0.0 {
            return Err(Error::PositivityViolation { min, at });
        }
        Ok(g)
    }

    pub fn constant(c: f64) -> Result<Self> {
        AnisotropyFn::new(vec![c], vec![])
    }

    pub fn from_coeffs(c: &AnisotropyCoeffs) -> Result<Self> {
        AnisotropyFn::new(c.a.clone(), c.b.clone())
    }

    /// Parse the JSON form `{"a": [...], "b": [...]}`.
    pub fn from_json(s: &str) -> Result<Self> {
        let c: AnisotropyCoeffs = serde_json::from_str(s)
            .map_err(|e| Error::DegenerateInput(format!("bad anisotropy JSON: {e}")))?;
        Self::from_coeffs(&c)
    }

    pub fn coeffs(&self) -> AnisotropyCoeffs {
        AnisotropyCoeffs {
            a: self.a.clone(),
            b: self.b.clone(),
        }
    }

    /// Truncation order K of the series.
    pub fn order(&self) -> usize {
        self.b.len()
    }

    /// Evaluate the series or one of its first two derivatives.
    ///
    /// `order` 0 gives g itself, 1 and 2 the exact derivatives of the
    /// truncated series. The angle is normalized to (-pi, pi] first so the
    /// 2π-periodicity is honored at the API boundary.
    pub fn eval(&self, theta: f64, order: u8) -> f64 {
        debug_assert!(order <= 2);
        let t = normalize_angle(theta);
        let mut acc = if order == 0 { self.a[0] } else { 0.0 };
        for k in 1..=self.b.len() {
            let kf = k as f64;
            let (s, c) = (kf * t).sin_cos();
            let (ak, bk) = (self.a[k], self.b[k - 1]);
            acc += match order {
                0 => ak * c + bk * s,
                1 => kf * (bk * c - ak * s),
                _ => kf * kf * (-ak * c - bk * s),
            };
        }
        acc
    }

    /// Antiderivative `G(θ) = a₀θ + Σ (a_k sin kθ − b_k cos kθ)/k`; only
    /// differences of it are meaningful.
    fn antiderivative(&self, theta: f64) -> f64 {
        let mut acc = self.a[0] * theta;
        for k in 1..=self.b.len() {
            let kf = k as f64;
            let (s, c) = (kf * theta).sin_cos();
            acc += (self.a[k] * s - self.b[k - 1] * c) / kf;
        }
        acc
    }

    /// Exact integral of the series over `[lo, hi]`.
    pub fn integral(&self, lo: f64, hi: f64) -> f64 {
        self.antiderivative(hi) - self.antiderivative(lo)
    }

    /// Integral of g over the whole circle, `2π·a₀` exactly.
    pub fn total_integral(&self) -> f64 {
        TAU * self.a[0]
    }

    fn grid_min(&self) -> (f64, f64) {
        let mut min = f64::INFINITY;
        let mut at = 0.0;
        for i in 0..SCAN_POINTS {
            let t = -std::f64::consts::PI + TAU * i as f64 / SCAN_POINTS as f64;
            let v = self.eval(t, 0);
            if v < min {
                min = v;
                at = t;
            }
        }
        (min, at)
    }

    /// Extrema (refined) and total integral.
    pub fn stats(&self) -> Result<AnisotropyStats> {
        let (gmin, at) = self.grid_min();
        if gmin <= 0.0 {
            return Err(Error::PositivityViolation { min: gmin, at });
        }
        let h = TAU / SCAN_POINTS as f64;
        let g_min = self.refine_extremum(at, h, false);
        let mut max = f64::NEG_INFINITY;
        let mut max_at = 0.0;
        for i in 0..SCAN_POINTS {
            let t = -std::f64::consts::PI + TAU * i as f64 / SCAN_POINTS as f64;
            let v = self.eval(t, 0);
            if v > max {
                max = v;
                max_at = t;
            }
        }
        let g_max = self.refine_extremum(max_at, h, true);
        Ok(AnisotropyStats {
            g_min,
            g_max,
            sup_norm: g_max,
            total_integral: self.total_integral(),
        })
    }

    /// Golden-section refinement of a bracketed extremum of the smooth
    /// series; the bracket is one scan cell on each side.
    fn refine_extremum(&self, center: f64, h: f64, maximize: bool) -> f64 {
        let sign = if maximize { -1.0 } else { 1.0 };
        let f = |t: f64| sign * self.eval(t, 0);
        let inv_phi = 0.618_033_988_749_894_9;
        let (mut lo, mut hi) = (center - h, center + h);
        let mut x1 = hi - inv_phi * (hi - lo);
        let mut x2 = lo + inv_phi * (hi - lo);
        let (mut f1, mut f2) = (f(x1), f(x2));
        for _ in 0..80 {
            if f1 < f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - inv_phi * (hi - lo);
                f1 = f(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + inv_phi * (hi - lo);
                f2 = f(x2);
            }
            if hi - lo < 1e-13 {
                break;
            }
        }
        sign * f1.min(f2)
    }
}

/// Width of the smallest slab parallel to `(cos ψ, sin ψ)` containing the
/// unit-speed translator: `∫_{ψ−π}^{ψ} g(u) du`, exact for the series.
pub fn slab_width(g: &AnisotropyFn, psi: f64) -> f64 {
    let p = normalize_angle(psi);
    g.integral(p - std::f64::consts::PI, p)
}

/// Speed ratio of the downward translator matching the upward one's slab:
/// `σ = ∫_{π/2}^{3π/2} g / ∫_{−π/2}^{π/2} g`.
pub fn speed_sigma(g: &AnisotropyFn) -> f64 {
    let half_pi = std::f64::consts::FRAC_PI_2;
    g.integral(half_pi, 3.0 * half_pi) / g.integral(-half_pi, half_pi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn g_const() -> AnisotropyFn {
        AnisotropyFn::constant(1.0).unwrap()
    }

    fn g_cos() -> AnisotropyFn {
        AnisotropyFn::new(vec![2.0, 1.0], vec![]).unwrap()
    }

    #[test]
    fn eval_constant_series() {
        assert_eq!(g_const().eval(1.234, 0), 1.0);
    }

    #[test]
    fn eval_two_plus_cos() {
        let g = g_cos();
        assert_eq!(g.eval(0.0, 0), 3.0);
        // second derivative of cos at pi/2 vanishes
        assert!(g.eval(PI / 2.0, 2).abs() < 1e-15);
    }

    #[test]
    fn eval_periodic() {
        let g = AnisotropyFn::new(vec![2.0, 0.3, 0.1], vec![0.2, -0.05]).unwrap();
        for &t in &[0.0, 0.7, -2.9, 3.1] {
            assert!((g.eval(t, 0) - g.eval(t + TAU, 0)).abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let g = AnisotropyFn::new(vec![2.0, 0.5, 0.2], vec![0.3, -0.1]).unwrap();
        let h = 1e-5;
        for &t in &[0.1, 1.0, -2.0, 2.9] {
            let fd1 = (g.eval(t + h, 0) - g.eval(t - h, 0)) / (2.0 * h);
            assert!((fd1 - g.eval(t, 1)).abs() < 1e-8, "order 1 at {t}");
            let fd2 = (g.eval(t + h, 1) - g.eval(t - h, 1)) / (2.0 * h);
            assert!((fd2 - g.eval(t, 2)).abs() < 1e-7, "order 2 at {t}");
        }
    }

    #[test]
    fn stats_constant() {
        let s = g_const().stats().unwrap();
        assert!((s.g_min - 1.0).abs() < 1e-12);
        assert!((s.g_max - 1.0).abs() < 1e-12);
        assert!((s.total_integral - TAU).abs() < 1e-12);
    }

    #[test]
    fn stats_two_plus_cos() {
        let s = g_cos().stats().unwrap();
        assert!((s.g_min - 1.0).abs() < 1e-8);
        assert!((s.g_max - 3.0).abs() < 1e-8);
        assert!((s.total_integral - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn positivity_violation_rejected() {
        let err = AnisotropyFn::new(vec![1.0, -1.5], vec![]).unwrap_err();
        assert_eq!(err.name(), "PositivityViolation");
    }

    #[test]
    fn slab_width_grim_reaper() {
        assert!((slab_width(&g_const(), PI / 2.0) - PI).abs() < 1e-12);
    }

    #[test]
    fn slab_width_two_plus_cos() {
        // antiderivative 2u + sin u over [-pi/2, pi/2]
        assert!((slab_width(&g_cos(), PI / 2.0) - (TAU + 2.0)).abs() < 1e-12);
    }

    #[test]
    fn slab_widths_tile_the_circle() {
        let g = AnisotropyFn::new(vec![2.0, 0.4], vec![0.3]).unwrap();
        for i in 0..16 {
            let psi = -PI + TAU * i as f64 / 16.0;
            let sum = slab_width(&g, psi) + slab_width(&g, psi + PI);
            assert!((sum - g.total_integral()).abs() < 1e-10);
        }
    }

    #[test]
    fn slab_width_periodic_and_bounded() {
        let g = AnisotropyFn::new(vec![2.0, 0.4, 0.2], vec![0.1]).unwrap();
        let s = g.stats().unwrap();
        for i in 0..32 {
            let psi = -PI + TAU * i as f64 / 32.0;
            let w = slab_width(&g, psi);
            assert!((w - slab_width(&g, psi + TAU)).abs() < 1e-10);
            assert!(w >= PI * s.g_min - 1e-10 && w <= PI * s.g_max + 1e-10);
        }
    }

    #[test]
    fn sigma_constant_is_one() {
        assert!((speed_sigma(&g_const()) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sigma_two_plus_cos() {
        let expected = (TAU - 2.0) / (TAU + 2.0);
        assert!((speed_sigma(&g_cos()) - expected).abs() < 1e-14);
    }

    #[test]
    fn sigma_slab_identity() {
        for g in [
            g_cos(),
            AnisotropyFn::new(vec![1.5, 0.2, -0.1], vec![0.4, 0.05]).unwrap(),
        ] {
            let sigma = speed_sigma(&g);
            let w = slab_width(&g, PI / 2.0);
            assert!(((1.0 + sigma) * w - g.total_integral()).abs() < 1e-10);
        }
    }
}
