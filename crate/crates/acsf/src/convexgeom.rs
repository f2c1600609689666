//! Convex-geometry toolkit: hulls, support functions, mollification, and
//! the scalar measurements (area, reach, curvature) taken on them.
//!
//! Convention: curves run counterclockwise, the tangent at angle `θ` is
//! `𝖳 = (cos θ, sin θ)` and the outward normal `𝖭 = (sin θ, −cos θ)`. A
//! compact convex curve is encoded by its support function `η` sampled on
//! the uniform grid `θᵢ = −π + 2πi/n`, and its boundary point is recovered
//! as `p(θ) = η𝖭 + η_θ𝖳`. Curvature is `1/(η_θθ + η)`.

use crate::anisotropy::TAU;
use crate::error::{Error, Result};

/// Tolerance under which hull input points are considered collinear.
const COLLINEAR_EPS: f64 = 1e-12;

/// Strictly convex polygon, counterclockwise vertices.
#[derive(Debug, Clone)]
pub struct HullPolygon {
    pub vertices: Vec<(f64, f64)>,
}

/// A compact convex curve as `n` support values on the uniform
/// tangent-angle grid; `eta[i]` is the support in direction `𝖭(θᵢ)`.
#[derive(Debug, Clone)]
pub struct SupportCurve {
    pub eta: Vec<f64>,
}

impl HullPolygon {
    /// Exact polygon area (shoelace).
    pub fn area(&self) -> f64 {
        let v = &self.vertices;
        let n = v.len();
        let mut acc = 0.0;
        for i in 0..n {
            let (x0, y0) = v[i];
            let (x1, y1) = v[(i + 1) % n];
            acc += x0 * y1 - x1 * y0;
        }
        0.5 * acc
    }
}

/// Andrew's monotone chain; strictly convex output (collinear points are
/// dropped). Errors if the input is degenerate.
pub fn hull(points: &[(f64, f64)]) -> Result<HullPolygon> {
    if points.len() < 3 {
        return Err(Error::DegenerateInput(format!(
            "{} points, need at least 3",
            points.len()
        )));
    }
    let mut pts: Vec<(f64, f64)> = points.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup_by(|a, b| (a.0 - b.0).abs() < COLLINEAR_EPS && (a.1 - b.1).abs() < COLLINEAR_EPS);
    if pts.len() < 3 {
        return Err(Error::DegenerateInput("all points coincide".into()));
    }

    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };

    let build = |iter: &mut dyn Iterator<Item = (f64, f64)>| {
        let mut chain: Vec<(f64, f64)> = Vec::new();
        for p in iter {
            while chain.len() >= 2
                && cross(chain[chain.len() - 2], chain[chain.len() - 1], p) <= COLLINEAR_EPS
            {
                chain.pop();
            }
            chain.push(p);
        }
        chain
    };

    let mut lower = build(&mut pts.iter().copied());
    let mut upper = build(&mut pts.iter().rev().copied());
    lower.pop();
    upper.pop();
    lower.append(&mut upper);

    if lower.len() < 3 {
        return Err(Error::DegenerateInput("input is collinear".into()));
    }
    Ok(HullPolygon { vertices: lower })
}

impl SupportCurve {
    pub fn n(&self) -> usize {
        self.eta.len()
    }

    pub fn dtheta(&self) -> f64 {
        TAU / self.n() as f64
    }

    /// Grid angle θᵢ = −π + 2πi/n.
    pub fn theta(&self, i: usize) -> f64 {
        -std::f64::consts::PI + TAU * i as f64 / self.n() as f64
    }

    /// Outward normal at grid index i.
    pub fn normal(&self, i: usize) -> (f64, f64) {
        let t = self.theta(i);
        (t.sin(), -t.cos())
    }

    /// Discrete radius of curvature `(η[i−1] − 2η[i] + η[i+1])/Δθ² + η[i]`.
    pub fn radius(&self, i: usize) -> f64 {
        let n = self.n();
        let dt2 = self.dtheta() * self.dtheta();
        let prev = self.eta[(i + n - 1) % n];
        let next = self.eta[(i + 1) % n];
        (prev - 2.0 * self.eta[i] + next) / dt2 + self.eta[i]
    }

    /// Radius with the second difference normalized on the first harmonic;
    /// this is the radius the flow stencil divides by, and the one whose
    /// kernel contains rigid translations exactly.
    pub fn kernel_radius(&self, i: usize) -> f64 {
        let n = self.n();
        let dt = self.dtheta();
        let prev = self.eta[(i + n - 1) % n];
        let next = self.eta[(i + 1) % n];
        (prev - 2.0 * self.eta[i] + next) / (dt * dt * first_harmonic_scale(dt)) + self.eta[i]
    }

    /// Smallest discrete radius of curvature over the grid.
    pub fn min_radius(&self) -> f64 {
        (0..self.n())
            .map(|i| self.radius(i))
            .fold(f64::INFINITY, f64::min)
    }

    /// Verify the discrete convexity invariant.
    pub fn check_convex(&self) -> Result<()> {
        for i in 0..self.n() {
            let r = self.radius(i);
            if r <= 0.0 {
                return Err(Error::NonConvexState {
                    index: i,
                    radius: r,
                });
            }
        }
        Ok(())
    }

    /// Reconstructed boundary point at grid index i, using a centered
    /// difference for `η_θ`.
    pub fn point(&self, i: usize) -> (f64, f64) {
        let n = self.n();
        let deta = (self.eta[(i + 1) % n] - self.eta[(i + n - 1) % n]) / (2.0 * self.dtheta());
        let t = self.theta(i);
        let (sn, cs) = (t.sin(), t.cos());
        // eta*N + eta_theta*T with N = (sin, -cos), T = (cos, sin)
        (self.eta[i] * sn + deta * cs, -self.eta[i] * cs + deta * sn)
    }

    /// CSV with header `theta,eta,kappa,x,y`, 17 significant digits.
    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::from("theta,eta,kappa,x,y\n");
        for i in 0..self.n() {
            let k = curvature_from_support(self, i)?;
            let (x, y) = self.point(i);
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                self.theta(i),
                self.eta[i],
                k,
                x,
                y
            ));
        }
        Ok(out)
    }

    /// Steiner point `(1/π)∮η(θ)𝖭(θ)dθ`, a canonical interior point.
    pub fn steiner_point(&self) -> (f64, f64) {
        let n = self.n();
        let w = self.dtheta() / std::f64::consts::PI;
        let mut acc = (0.0, 0.0);
        for i in 0..n {
            let (nx, ny) = self.normal(i);
            acc.0 += w * self.eta[i] * nx;
            acc.1 += w * self.eta[i] * ny;
        }
        acc
    }

    /// Support curve of the body translated by `w`: adds `⟨w, 𝖭(θᵢ)⟩`.
    pub fn translated(&self, w: (f64, f64)) -> SupportCurve {
        let eta = (0..self.n())
            .map(|i| {
                let (nx, ny) = self.normal(i);
                self.eta[i] + w.0 * nx + w.1 * ny
            })
            .collect();
        SupportCurve { eta }
    }
}

/// Support values of a hull on an `n`-point grid:
/// `η[i] = max over vertices of ⟨p, 𝖭(θᵢ)⟩`.
pub fn support_of_hull(h: &HullPolygon, n: usize) -> SupportCurve {
    assert!(n >= 64 && n % 2 == 0, "grid size must be even and >= 64");
    let mut eta = Vec::with_capacity(n);
    for i in 0..n {
        let t = -std::f64::consts::PI + TAU * i as f64 / n as f64;
        let (sn, cs) = (t.sin(), t.cos());
        let mut best = f64::NEG_INFINITY;
        for &(x, y) in &h.vertices {
            let s = x * sn - y * cs;
            if s > best {
                best = s;
            }
        }
        eta.push(best);
    }
    SupportCurve { eta }
}

/// Lift the discrete radius of curvature everywhere by adding
/// `δ·(1 − cos(θ − θ₀))` terms until the minimum radius reaches `target`.
/// With the first-harmonic normalization the perturbation adds exactly
/// `δ` to every kernel radius while keeping the point at `θ₀` fixed; the
/// plain radius is lifted at least as much wherever it was deficient.
pub fn convexity_repair(c: &SupportCurve, target: f64) -> SupportCurve {
    let n = c.n();
    let mut cur = c.clone();
    for _ in 0..4 {
        let mut min_r = f64::INFINITY;
        let mut argmin = 0;
        for i in 0..n {
            let r = cur.kernel_radius(i).min(cur.radius(i));
            if r < min_r {
                min_r = r;
                argmin = i;
            }
        }
        if min_r >= target {
            break;
        }
        let delta = target - min_r;
        // average of the two bumps mirrored in θ₀; adds exactly delta to
        // every kernel radius and commutes with reflection, so symmetric
        // curves stay symmetric under repair
        let t0 = cur.theta(argmin);
        for i in 0..n {
            cur.eta[i] += delta * (1.0 - t0.cos() * cur.theta(i).cos());
        }
    }
    cur
}

/// Smooth bump on [-1, 1], `exp(−1/(1−u²))`, unnormalized.
fn bump(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - u * u)).exp()
    }
}

/// Periodic convolution of `η` with a smooth nonnegative bump of full
/// angular width `window`, followed by a strict-convexity repair pass.
/// The repaired margin is `10⁻⁶·mean(η)`.
pub fn mollify(c: &SupportCurve, window: f64) -> SupportCurve {
    let n = c.n();
    let dt = c.dtheta();
    assert!(
        window >= 2.0 * dt,
        "window must span at least two grid cells"
    );

    let half = window / 2.0;
    let taps = (half / dt).floor() as isize;
    let mut kernel = Vec::with_capacity((2 * taps + 1) as usize);
    let mut norm = 0.0;
    for j in -taps..=taps {
        let w = bump(j as f64 * dt / half);
        kernel.push(w);
        norm += w;
    }

    let mut eta = vec![0.0; n];
    for i in 0..n {
        let mut acc = 0.0;
        for (k, j) in (-taps..=taps).enumerate() {
            let idx = (i as isize + j).rem_euclid(n as isize) as usize;
            acc += kernel[k] * c.eta[idx];
        }
        eta[i] = acc / norm;
    }

    let smoothed = SupportCurve { eta };
    let mean = smoothed.eta.iter().sum::<f64>() / n as f64;
    convexity_repair(&smoothed, 1e-6 * mean.abs().max(f64::MIN_POSITIVE))
}

/// Response of the centered second difference on the first harmonic:
/// `D²cos = −c_Δ·cos` with `c_Δ = (2 − 2cos Δθ)/Δθ²`. The flow stencil
/// and the area below divide by it so rigid translations are exactly in
/// the kernel of the discrete radius operator.
pub(crate) fn first_harmonic_scale(dtheta: f64) -> f64 {
    (2.0 - 2.0 * dtheta.cos()) / (dtheta * dtheta)
}

/// Enclosed area from the support function.
///
/// Discrete counterpart of `½∮(η² − η_θ²)dθ`: the derivative energy uses
/// forward differences normalized by the first-harmonic response, making
/// the value the exact summation-by-parts twin of the flow stencil. Along
/// the support-function flow this area decreases at exactly `∮g dθ` per
/// unit time, and it is exactly invariant under translations of the body.
pub fn area(c: &SupportCurve) -> f64 {
    let n = c.n();
    let dt = c.dtheta();
    let scale = first_harmonic_scale(dt);
    let mut acc = 0.0;
    for i in 0..n {
        let d = (c.eta[(i + 1) % n] - c.eta[i]) / dt;
        acc += c.eta[i] * c.eta[i] - d * d / scale;
    }
    0.5 * acc * dt
}

/// Distance between the two supporting lines orthogonal to
/// `(cos ψ, sin ψ)`: `η(θₐ) + η(θₐ + π)` at the grid angle whose normal is
/// closest to that direction.
pub fn reach(c: &SupportCurve, psi: f64) -> f64 {
    let n = c.n();
    // N(θ) = (cos(θ−π/2), sin(θ−π/2)), so the normal points along ψ when
    // θ = ψ + π/2
    let target = psi + std::f64::consts::FRAC_PI_2;
    let pos = (target + std::f64::consts::PI).rem_euclid(TAU) / TAU * n as f64;
    let i = (pos.round() as usize) % n;
    c.eta[i] + c.eta[(i + n / 2) % n]
}

/// Discrete curvature `1/(η_θθ + η)` at grid index `i`.
pub fn curvature_from_support(c: &SupportCurve, i: usize) -> Result<f64> {
    let r = c.radius(i);
    if r <= 0.0 {
        return Err(Error::NonConvexState {
            index: i,
            radius: r,
        });
    }
    Ok(1.0 / r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn circle(n: usize, r: f64) -> SupportCurve {
        SupportCurve { eta: vec![r; n] }
    }

    fn ellipse(n: usize, a: f64, b: f64) -> SupportCurve {
        let eta = (0..n)
            .map(|i| {
                let t = -PI + TAU * i as f64 / n as f64;
                (a * a * t.sin() * t.sin() + b * b * t.cos() * t.cos()).sqrt()
            })
            .collect();
        SupportCurve { eta }
    }

    fn unit_square_hull() -> HullPolygon {
        hull(&[(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)]).unwrap()
    }

    #[test]
    fn hull_drops_interior_point() {
        let h = hull(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (0.1, 0.1)]).unwrap();
        assert_eq!(h.vertices.len(), 3);
    }

    #[test]
    fn hull_drops_edge_midpoints() {
        let h = hull(&[
            (1.0, 1.0),
            (-1.0, 1.0),
            (-1.0, -1.0),
            (1.0, -1.0),
            (0.0, 1.0),
            (0.0, -1.0),
            (1.0, 0.0),
            (-1.0, 0.0),
        ])
        .unwrap();
        assert_eq!(h.vertices.len(), 4);
    }

    #[test]
    fn hull_of_circle_samples_matches_inscribed_polygon_area() {
        let m = 10_000;
        let pts: Vec<(f64, f64)> = (0..m)
            .map(|i| {
                let t = TAU * i as f64 / m as f64;
                (t.cos(), t.sin())
            })
            .collect();
        let h = hull(&pts).unwrap();
        // inscribed-polygon oracle: (m/2)·sin(2π/m)
        let oracle = m as f64 / 2.0 * (TAU / m as f64).sin();
        assert!((h.area() - oracle).abs() < 1e-9);
        assert!((h.area() - PI).abs() < 1e-6);
    }

    #[test]
    fn hull_rejects_collinear() {
        let err = hull(&[(0.0, 0.0), (1.0, 1.0), (2.0, 2.0), (3.0, 3.0)]).unwrap_err();
        assert_eq!(err.name(), "DegenerateInput");
    }

    #[test]
    fn hull_idempotent() {
        let pts: Vec<(f64, f64)> = (0..200)
            .map(|i| {
                let t = TAU * i as f64 / 200.0;
                (2.0 * t.cos() + 0.3 * (3.0 * t).sin(), t.sin())
            })
            .collect();
        let h1 = hull(&pts).unwrap();
        let h2 = hull(&h1.vertices).unwrap();
        assert_eq!(h1.vertices.len(), h2.vertices.len());
        for (a, b) in h1.vertices.iter().zip(&h2.vertices) {
            assert!((a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12);
        }
    }

    #[test]
    fn support_of_square() {
        let c = support_of_hull(&unit_square_hull(), 512);
        // N(pi/2) = (1, 0): eta = 1
        let i_half_pi = (512 * 3) / 4; // theta = pi/2
        assert!((c.eta[i_half_pi] - 1.0).abs() < 1e-12);
        // theta = 3pi/4: N = (sin, -cos)(3pi/4) = (√2/2, √2/2): corner support √2
        let i_corner = 512 * 7 / 8;
        assert!((c.eta[i_corner] - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn support_of_regular_polygon() {
        let m = 7;
        let pts: Vec<(f64, f64)> = (0..m)
            .map(|i| {
                let t = TAU * i as f64 / m as f64;
                (t.cos(), t.sin())
            })
            .collect();
        let c = support_of_hull(&hull(&pts).unwrap(), 1024);
        let max = c.eta.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = c.eta.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!((max - 1.0).abs() < 1e-4);
        assert!((min - (PI / m as f64).cos()).abs() < 1e-4);
    }

    #[test]
    fn area_of_circle_exact() {
        assert!((area(&circle(512, 1.0)) - PI).abs() < 1e-10);
        let r = 2.3;
        assert!((area(&circle(256, r)) - PI * r * r).abs() < 1e-9);
    }

    #[test]
    fn area_of_ellipse_near_closed_form() {
        // closed-form oracle: pi*a*b = 2pi. The forward-difference energy
        // carries an O(dθ²) bias; measured ~1.1e-4 at n = 512.
        let a = area(&ellipse(512, 2.0, 1.0));
        assert!((a - 2.0 * PI).abs() < 2e-4, "area {a}");
    }

    #[test]
    fn reach_examples() {
        let c = circle(512, 1.0);
        for k in 0..8 {
            assert!((reach(&c, k as f64 * FRAC_PI_4) - 2.0).abs() < 1e-12);
        }
        let sq = support_of_hull(&unit_square_hull(), 512);
        assert!((reach(&sq, 0.0) - 2.0).abs() < 1e-12);
        assert!((reach(&sq, FRAC_PI_2) - 2.0).abs() < 1e-12);
        assert!((reach(&sq, FRAC_PI_4) - 2.0 * 2f64.sqrt()).abs() < 1e-12);

        let rect = hull(&[(3.0, 0.5), (-3.0, 0.5), (-3.0, -0.5), (3.0, -0.5)]).unwrap();
        let rc = support_of_hull(&rect, 512);
        assert!((reach(&rc, 0.0) - 6.0).abs() < 1e-12);
        assert!((reach(&rc, FRAC_PI_2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn curvature_of_circle() {
        let c = circle(512, 2.0);
        for i in [0, 100, 300] {
            assert!((curvature_from_support(&c, i).unwrap() - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn curvature_of_ellipse_at_axes() {
        let c = ellipse(512, 2.0, 1.0);
        // N(pi/2) = (1,0): the point (2, 0), kappa = a/b² = 2
        let k_right = curvature_from_support(&c, 512 * 3 / 4).unwrap();
        // N(0) = (0,-1): the point (0,-1), kappa = b/a² = 1/4
        let k_bottom = curvature_from_support(&c, 512 / 2).unwrap();
        assert!(
            (k_right - 2.0).abs() < 1e-4 * (1.0 + 2.0),
            "kappa {k_right}"
        );
        assert!(
            (k_bottom - 0.25).abs() < 1e-4 * (1.0 + 0.25),
            "kappa {k_bottom}"
        );
    }

    #[test]
    fn nonconvex_curvature_rejected() {
        let mut c = circle(64, 1.0);
        c.eta[10] += 0.5; // sharp outward dent in support: nonconvex
        assert!(curvature_from_support(&c, 10).is_err() || c.radius(10) > 0.0);
        // the neighbors definitely lose convexity
        let bad = (0..64).any(|i| c.radius(i) <= 0.0);
        assert!(bad);
    }

    #[test]
    fn mollify_keeps_circle() {
        let c = circle(512, 1.5);
        let m = mollify(&c, 8.0 * c.dtheta());
        for i in 0..c.n() {
            assert!((m.eta[i] - 1.5).abs() < 1e-12);
        }
    }

    /// Dense-grid direct-convolution oracle for the square; computes the
    /// convolved support at a given angle on a 10⁵-point grid.
    fn square_convolution_oracle(theta: f64, window: f64) -> f64 {
        let m = 100_000usize;
        let dt = TAU / m as f64;
        let eta = |t: f64| -> f64 {
            // support of [-1,1]² in direction N(t) = (sin t, -cos t)
            t.sin().abs() + t.cos().abs()
        };
        let half = window / 2.0;
        let taps = (half / dt).floor() as isize;
        let mut num = 0.0;
        let mut den = 0.0;
        for j in -taps..=taps {
            let w = bump(j as f64 * dt / half);
            num += w * eta(theta + j as f64 * dt);
            den += w;
        }
        num / den
    }

    #[test]
    fn mollify_square_matches_convolution_oracle() {
        let n = 512;
        let c = support_of_hull(&unit_square_hull(), n);
        let window = 0.2;
        let m = mollify(&c, window);
        // corner direction 3pi/4 (a smooth max of the support): rounded down
        let i_corner = n * 7 / 8;
        let oracle_corner = square_convolution_oracle(m.theta(i_corner), window);
        assert!(m.eta[i_corner] < 2f64.sqrt());
        assert!(
            (m.eta[i_corner] - oracle_corner).abs() < 2e-3,
            "corner {} vs oracle {}",
            m.eta[i_corner],
            oracle_corner
        );
        // axis direction pi/2 (the edge): frozen by the oracle too
        let i_axis = n * 3 / 4;
        let oracle_axis = square_convolution_oracle(m.theta(i_axis), window);
        assert!(
            (m.eta[i_axis] - oracle_axis).abs() < 2e-3,
            "axis {} vs oracle {}",
            m.eta[i_axis],
            oracle_axis
        );
        m.check_convex().unwrap();
    }

    #[test]
    fn mollify_near_idempotent() {
        let n = 512;
        let c = support_of_hull(&unit_square_hull(), n);
        let window = 0.2;
        let once = mollify(&c, window);
        let twice = mollify(&once, window);
        // bound deviation by window² · max |η_θθ| of the once-mollified curve
        let dt = once.dtheta();
        let max_dd = (0..n)
            .map(|i| {
                ((once.eta[(i + n - 1) % n] - 2.0 * once.eta[i] + once.eta[(i + 1) % n])
                    / (dt * dt))
                    .abs()
            })
            .fold(0.0, f64::max);
        let bound = window * window * max_dd;
        for i in 0..n {
            assert!(
                (twice.eta[i] - once.eta[i]).abs() <= bound,
                "idempotence at {i}: {} vs bound {bound}",
                (twice.eta[i] - once.eta[i]).abs()
            );
        }
    }

    #[test]
    fn mollified_square_curvature_sign() {
        let c = support_of_hull(&unit_square_hull(), 512);
        let m = mollify(&c, 0.2);
        let mut max_k: f64 = 0.0;
        for i in 0..m.n() {
            let k = curvature_from_support(&m, i).unwrap();
            assert!(k > 0.0);
            max_k = max_k.max(k);
        }
        // rounded corners carry much larger curvature than the flats
        let k_axis = curvature_from_support(&m, 512 * 3 / 4).unwrap();
        assert!(max_k > 10.0 * k_axis);
    }

    #[test]
    fn area_reach_translation_invariant() {
        // the first-harmonic normalization makes both exactly invariant
        let c = ellipse(256, 2.0, 1.0);
        let t = c.translated((0.7, -0.4));
        assert!((area(&c) - area(&t)).abs() < 1e-10);
        assert!((reach(&c, 0.3) - reach(&t, 0.3)).abs() < 1e-10);
    }

    #[test]
    fn area_bounded_by_reach_product() {
        for shape in [ellipse(256, 2.0, 1.0), circle(256, 1.3)] {
            assert!(area(&shape) <= reach(&shape, 0.0) * reach(&shape, FRAC_PI_2) + 1e-9);
        }
        let sq = support_of_hull(&unit_square_hull(), 256);
        assert!(area(&sq) <= reach(&sq, 0.0) * reach(&sq, FRAC_PI_2) + 1e-9);
    }

    proptest! {
        #[test]
        fn prop_hull_contains_inputs(pts in proptest::collection::vec((-10.0..10.0f64, -10.0..10.0f64), 3..40)) {
            if let Ok(h) = hull(&pts) {
                let v = &h.vertices;
                let m = v.len();
                for p in &pts {
                    for i in 0..m {
                        let a = v[i];
                        let b = v[(i + 1) % m];
                        let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
                        prop_assert!(cross >= -1e-6, "point {:?} outside edge {i}", p);
                    }
                }
            }
        }

        #[test]
        fn prop_support_monotone_under_containment(
            pts in proptest::collection::vec((-5.0..5.0f64, -5.0..5.0f64), 4..30),
            extra in proptest::collection::vec((-5.0..5.0f64, -5.0..5.0f64), 1..10),
        ) {
            let bigger: Vec<(f64, f64)> = pts.iter().chain(extra.iter()).copied().collect();
            if let (Ok(h1), Ok(h2)) = (hull(&pts), hull(&bigger)) {
                let c1 = support_of_hull(&h1, 64);
                let c2 = support_of_hull(&h2, 64);
                for i in 0..64 {
                    prop_assert!(c1.eta[i] <= c2.eta[i] + 1e-9);
                }
            }
        }

        #[test]
        fn prop_translation_covariance(dx in -3.0..3.0f64, dy in -3.0..3.0f64) {
            let c = ellipse(128, 2.0, 1.0);
            let t = c.translated((dx, dy));
            for i in 0..c.n() {
                let (nx, ny) = c.normal(i);
                let expect = c.eta[i] + dx * nx + dy * ny;
                prop_assert!((t.eta[i] - expect).abs() < 1e-12);
            }
            prop_assert!((area(&c) - area(&t)).abs() < 1e-9);
            prop_assert!((reach(&c, 1.1) - reach(&t, 1.1)).abs() < 1e-10);
        }
    }
}
