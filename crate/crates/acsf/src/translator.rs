//! Exact translating solutions.
//!
//! A curve translating with velocity `speed·(cos ψ, sin ψ)` under the flow
//! has curvature `κ(θ) = speed·sin(ψ−θ)/g(θ)` on the open angular range
//! `(ψ−π, ψ)`. Integrating `dx/dθ = cos θ/κ`, `dy/dθ = sin θ/κ` from the
//! anchor angle `ψ−π/2` gives the position profile; the integrands blow up
//! at the range endpoints (the two asymptotic tails), so profiles are
//! truncated at an angular distance `ε` from them.

use crate::anisotropy::{normalize_angle, slab_width, AnisotropyFn};
use crate::error::{Error, Result};
use crate::quadrature;

/// One sampled point of a translator profile.
#[derive(Debug, Clone, Copy)]
pub struct ProfileSample {
    pub theta: f64,
    pub x: f64,
    pub y: f64,
    pub kappa: f64,
}

/// A sampled arc of the translating solution with direction angle `psi`,
/// truncated `eps` away from the singular angles `psi` and `psi - π`.
#[derive(Debug, Clone)]
pub struct TranslatorProfile {
    pub psi: f64,
    pub speed: f64,
    pub eps: f64,
    /// Samples ordered by strictly increasing theta in [ψ−π+ε, ψ−ε].
    pub samples: Vec<ProfileSample>,
    /// Anchor point at θ = ψ − π/2 (the tip).
    pub anchor: (f64, f64),
}

/// Report of the slab-width and asymptote checks for a centered profile.
#[derive(Debug, Clone, Copy)]
pub struct ProfileReport {
    /// Slab width over speed minus the observed extent across the slab;
    /// nonnegative, shrinking to zero with ε.
    pub width_gap: f64,
    /// Worst-case slack in the logarithmic height lower bound at the two
    /// truncated ends; nonnegative when the bound holds.
    pub asymptote_margin: f64,
}

/// Curvature of the translator in direction `psi` at tangent angle `theta`.
pub fn translator_curvature(g: &AnisotropyFn, psi: f64, speed: f64, theta: f64) -> Result<f64> {
    let p = normalize_angle(psi);
    // compare in the angular coordinate centered on the profile range
    let d = normalize_angle(p - theta);
    if d <= 0.0 || d >= std::f64::consts::PI {
        return Err(Error::OutOfAngularRange {
            theta,
            lo: p - std::f64::consts::PI,
            hi: p,
        });
    }
    Ok(speed * d.sin() / g.eval(theta, 0))
}

impl TranslatorProfile {
    pub fn theta_range(&self) -> (f64, f64) {
        (
            self.samples.first().map(|s| s.theta).unwrap_or(0.0),
            self.samples.last().map(|s| s.theta).unwrap_or(0.0),
        )
    }

    /// Translate the whole profile (samples and anchor) by `(dx, dy)`.
    pub fn translated(&self, dx: f64, dy: f64) -> TranslatorProfile {
        let mut p = self.clone();
        p.anchor.0 += dx;
        p.anchor.1 += dy;
        for s in &mut p.samples {
            s.x += dx;
            s.y += dy;
        }
        p
    }

    /// CSV with header `theta,x,y,kappa`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta,x,y,kappa\n");
        for s in &self.samples {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e}\n",
                s.theta, s.x, s.y, s.kappa
            ));
        }
        out
    }
}

/// Build a translator profile with `n` samples uniformly spaced in
/// `[ψ−π+ε, ψ−ε]`, anchored at `(0, 0)` at θ = ψ−π/2.
///
/// Positions come from adaptive quadrature of `cos(u)g(u)/(speed·sin(ψ−u))`
/// and the sine analogue, accumulated segment by segment outward from the
/// anchor so each sample sees at most `n` quadrature tolerances of error.
pub fn build_profile(
    g: &AnisotropyFn,
    psi: f64,
    speed: f64,
    eps: f64,
    n: usize,
) -> Result<TranslatorProfile> {
    assert!(
        eps > 0.0 && eps < std::f64::consts::FRAC_PI_2,
        "eps must lie in (0, pi/2)"
    );
    assert!(n >= 16, "need at least 16 samples");
    assert!(speed > 0.0, "speed must be positive");
    let psi = normalize_angle(psi);

    let lo = psi - std::f64::consts::PI + eps;
    let hi = psi - eps;
    let anchor_theta = psi - std::f64::consts::FRAC_PI_2;
    let seg_tol = (quadrature::DEFAULT_TOL / n as f64).min(1e-12);

    // thetas plus the anchor angle, ordered; remember which are samples
    let step = (hi - lo) / (n - 1) as f64;
    let thetas: Vec<f64> = (0..n).map(|j| lo + step * j as f64).collect();

    let ix = |u: f64| g.eval(u, 0) * u.cos() / (speed * (psi - u).sin());
    let iy = |u: f64| g.eval(u, 0) * u.sin() / (speed * (psi - u).sin());

    // cumulative integrals from the anchor to each sample angle
    let mut xs = vec![0.0; n];
    let mut ys = vec![0.0; n];
    // going up from the anchor
    let mut acc = (0.0, 0.0);
    let mut prev = anchor_theta;
    for (j, &t) in thetas.iter().enumerate() {
        if t <= anchor_theta {
            continue;
        }
        acc.0 += quadrature::integrate(ix, prev, t, seg_tol, quadrature::DEFAULT_BUDGET)?;
        acc.1 += quadrature::integrate(iy, prev, t, seg_tol, quadrature::DEFAULT_BUDGET)?;
        xs[j] = acc.0;
        ys[j] = acc.1;
        prev = t;
    }
    // going down
    acc = (0.0, 0.0);
    prev = anchor_theta;
    for (j, &t) in thetas.iter().enumerate().rev() {
        if t > anchor_theta {
            continue;
        }
        acc.0 -= quadrature::integrate(ix, t, prev, seg_tol, quadrature::DEFAULT_BUDGET)?;
        acc.1 -= quadrature::integrate(iy, t, prev, seg_tol, quadrature::DEFAULT_BUDGET)?;
        xs[j] = acc.0;
        ys[j] = acc.1;
        prev = t;
    }

    let samples = thetas
        .iter()
        .enumerate()
        .map(|(j, &t)| ProfileSample {
            theta: t,
            x: xs[j],
            y: ys[j],
            kappa: speed * (psi - t).sin() / g.eval(t, 0),
        })
        .collect();

    Ok(TranslatorProfile {
        psi,
        speed,
        eps,
        samples,
        anchor: (0.0, 0.0),
    })
}

/// Target coordinate of the anchor along `v⊥ = (sin ψ, −cos ψ)` that makes
/// the two extreme v⊥-coordinates of the untruncated curve negatives of
/// each other.
pub fn centered_anchor_offset(g: &AnisotropyFn, psi: f64, speed: f64) -> f64 {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let pi = std::f64::consts::PI;
    // the v⊥ coordinate grows by (1/speed)·∫ g along the profile
    (g.integral(psi - pi, psi - half_pi) - g.integral(psi - half_pi, psi)) / (2.0 * speed)
}

/// Translate the profile along `v⊥` so the full (ε→0) curve is centered:
/// its two slab walls sit at `±slab_width/(2·speed)` in the v⊥ coordinate.
pub fn center_profile(p: &TranslatorProfile, g: &AnisotropyFn) -> TranslatorProfile {
    let (vpx, vpy) = (p.psi.sin(), -p.psi.cos());
    let current = p.anchor.0 * vpx + p.anchor.1 * vpy;
    let target = centered_anchor_offset(g, p.psi, p.speed);
    let shift = target - current;
    p.translated(shift * vpx, shift * vpy)
}

/// Slab-width and asymptote checks; `p` should be centered.
pub fn profile_checks(p: &TranslatorProfile, g: &AnisotropyFn) -> Result<ProfileReport> {
    let (vpx, vpy) = (p.psi.sin(), -p.psi.cos());
    let (vx, vy) = (p.psi.cos(), p.psi.sin());
    let stats = g.stats()?;

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for s in &p.samples {
        let c = s.x * vpx + s.y * vpy;
        lo = lo.min(c);
        hi = hi.max(c);
    }
    let width_gap = slab_width(g, p.psi) / p.speed - (hi - lo);

    let anchor_h = p.anchor.0 * vx + p.anchor.1 * vy;
    let mut margin = f64::INFINITY;
    for s in [p.samples.first(), p.samples.last()].into_iter().flatten() {
        let h = s.x * vx + s.y * vy;
        let bound = anchor_h - stats.g_min / p.speed * (p.psi - s.theta).sin().ln();
        margin = margin.min(h - bound);
    }
    Ok(ProfileReport {
        width_gap,
        asymptote_margin: margin,
    })
}
