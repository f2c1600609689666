//! Compact solutions glued from opposing translators.
//!
//! For a depth `R > 0` the initial curve joins the upward unit-speed
//! translator pushed down by `R` with the downward speed-`σ` translator
//! pushed up by `σR`; `σ` is chosen so both sweep the same slab. The
//! convex hull of the sampled arcs (plus their exact slab-wall limit
//! points) bounds the compact region, and its support function seeds the
//! flow. Flowing to extinction and shifting time so extinction happens at
//! zero produces an old-but-not-ancient approximant of the ancient
//! solution; this module also evaluates the quantitative bounds such a
//! run must satisfy and the convergence diagnostics across depths.

use crate::anisotropy::{slab_width, speed_sigma, AnisotropyFn, TAU};
use crate::convexgeom::{
    area, convexity_repair, curvature_from_support, hull, reach, support_of_hull, SupportCurve,
};
use crate::error::{Error, Result};
use crate::flow::{evolve, FlowState, FlowTrace, StopRule};
use crate::translator::{build_profile, center_profile};

/// Construction parameters for a glued run.
#[derive(Debug, Clone, Copy)]
pub struct RunParams {
    /// Support grid size (even).
    pub n: usize,
    /// Angular truncation of the translator arcs.
    pub eps: f64,
    /// Mollification window recorded with the run and used for the slab
    /// slack in the bound checks.
    pub window: f64,
    /// CFL safety factor.
    pub safety: f64,
    /// Samples per translator arc fed to the hull.
    pub arc_samples: usize,
    /// Extinction is declared at `extinction_fraction · A(0)`.
    pub extinction_fraction: f64,
}

impl Default for RunParams {
    fn default() -> Self {
        RunParams {
            n: 512,
            eps: 1e-4,
            window: 4.0 * TAU / 512.0,
            safety: 0.5,
            arc_samples: 4096,
            extinction_fraction: 1e-3,
        }
    }
}

impl RunParams {
    /// Default parameters at a given grid size; the window tracks the grid.
    pub fn with_n(n: usize) -> Self {
        RunParams {
            n,
            window: 4.0 * TAU / n as f64,
            ..RunParams::default()
        }
    }
}

/// The glued initial curve and its construction record.
#[derive(Debug, Clone)]
pub struct GluedInitial {
    pub r_depth: f64,
    pub sigma: f64,
    pub w_g: f64,
    pub curve: SupportCurve,
    pub params: RunParams,
}

/// A finished old-but-not-ancient run, time-shifted so extinction is at 0.
#[derive(Debug, Clone)]
pub struct AncientRun {
    pub initial: GluedInitial,
    /// Trace in shifted time; all times lie in (t_r, 0).
    pub trace: FlowTrace,
    /// Initial time of the run, `−A(0)/∮g`.
    pub t_r: f64,
    pub sigma: f64,
    pub w_g: f64,
    /// Estimated extinction point (Steiner point of the final state).
    pub extinction_point: (f64, f64),
    /// |upfront extinction estimate − end-state extrapolation|; a
    /// consistency diagnostic for the discrete area law.
    pub extinction_consistency: f64,
}

/// Tip-speed ratios and tip span along a run.
#[derive(Debug, Clone)]
pub struct TipDiagnostics {
    pub times: Vec<f64>,
    /// `1/(g(0)·κ(0,t))`, the bottom tip-speed ratio.
    pub r_minus: Vec<f64>,
    /// `σ/(g(π)·κ(π,t))`, the top tip-speed ratio.
    pub r_plus: Vec<f64>,
    /// Tip span `L(t)`, the height difference of the two tips.
    pub span: Vec<f64>,
    /// `L(t) + t(1+σ)`; nonincreasing in t for a valid run.
    pub span_defect: Vec<f64>,
}

/// One named inequality evaluation.
#[derive(Debug, Clone, serde::Serialize)]
pub struct BoundCheck {
    pub name: &'static str,
    pub passed: bool,
    /// Worst slack; nonnegative iff the bound holds everywhere.
    pub margin: f64,
    pub detail: String,
}

/// Full report of the per-run bound checks.
#[derive(Debug, Clone, serde::Serialize)]
pub struct BoundReport {
    pub checks: Vec<BoundCheck>,
}

impl BoundReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Pairwise sup-norm distances between consecutive-depth runs at common
/// times, plus the finest run's curves as the limit estimate.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub depths: Vec<f64>,
    pub times: Vec<f64>,
    /// `distances[k][j]` is the sup-norm distance between the runs at
    /// depths k and k+1, evaluated at `times[j]`.
    pub distances: Vec<Vec<f64>>,
    /// Support curves of the deepest run at the common times.
    pub limit_curves: Vec<SupportCurve>,
}

/// Area constant `‖g‖²_∞ (1 + σ⁻²) π ln 2` controlling the initial area
/// deficit of the glued curve.
pub fn c_area(g: &AnisotropyFn) -> Result<f64> {
    let stats = g.stats()?;
    let sigma = speed_sigma(g);
    Ok(stats.sup_norm
        * stats.sup_norm
        * (1.0 + 1.0 / (sigma * sigma))
        * std::f64::consts::PI
        * 2f64.ln())
}

/// Reach constant `max(‖g‖_∞, ‖g‖_∞/σ)` controlling the initial
/// horizontal-reach deficit.
pub fn c_reach(g: &AnisotropyFn) -> Result<f64> {
    let stats = g.stats()?;
    let sigma = speed_sigma(g);
    Ok(stats.sup_norm.max(stats.sup_norm / sigma))
}

/// Build the glued initial curve at depth `r_depth`.
pub fn build_initial(g: &AnisotropyFn, r_depth: f64, params: RunParams) -> Result<GluedInitial> {
    if r_depth <= 0.0 {
        return Err(Error::GluingFailure("depth must be positive".into()));
    }
    let sigma = speed_sigma(g);
    let w_g = slab_width(g, std::f64::consts::FRAC_PI_2);

    let plus = center_profile(
        &build_profile(
            g,
            std::f64::consts::FRAC_PI_2,
            1.0,
            params.eps,
            params.arc_samples,
        )?,
        g,
    )
    .translated(0.0, -r_depth);
    let minus = center_profile(
        &build_profile(
            g,
            -std::f64::consts::FRAC_PI_2,
            sigma,
            params.eps,
            params.arc_samples,
        )?,
        g,
    )
    .translated(0.0, sigma * r_depth);

    // Both arcs are graphs over x on the open slab: the upward arc bounds
    // the body from below, the downward one from above. The construction
    // keeps each arc only up to the two crossings, which the pointwise
    // test y⁺ ≤ y⁻ realizes directly. Where the truncated tails stop
    // short of each other near a wall (no crossing on that side), the
    // body's side is the slab wall itself and the exact wall abscissa
    // closes it; a tail that neither crosses nor reaches its wall means
    // the depth is too small for this truncation.
    let plus_xy: Vec<(f64, f64)> = plus.samples.iter().map(|s| (s.x, s.y)).collect();
    let minus_xy: Vec<(f64, f64)> = {
        let mut v: Vec<(f64, f64)> = minus.samples.iter().map(|s| (s.x, s.y)).collect();
        v.reverse(); // theta descending in x; make x ascending
        v
    };
    // clamped interpolation: beyond the sampled range the tail keeps its
    // end value, which is what the near-wall trim comparison needs
    let interp = |pts: &[(f64, f64)], x: f64| -> f64 {
        if x <= pts.first().unwrap().0 {
            return pts.first().unwrap().1;
        }
        if x >= pts.last().unwrap().0 {
            return pts.last().unwrap().1;
        }
        let j = pts.partition_point(|p| p.0 < x).min(pts.len() - 1).max(1);
        let (x0, y0) = pts[j - 1];
        let (x1, y1) = pts[j];
        if x1 == x0 {
            return y0;
        }
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    };

    let kept_plus: Vec<(f64, f64)> = plus_xy
        .iter()
        .filter(|&&(x, y)| y <= interp(&minus_xy, x))
        .copied()
        .collect();
    let kept_minus: Vec<(f64, f64)> = minus_xy
        .iter()
        .filter(|&&(x, y)| y >= interp(&plus_xy, x))
        .copied()
        .collect();
    if kept_plus.len() < 2 || kept_minus.len() < 2 {
        return Err(Error::GluingFailure(format!(
            "arcs degenerate after crossing trim at depth {r_depth}"
        )));
    }

    // The anchors themselves stay out of the point set: an exact vertex
    // among inscribed samples kinks the discrete support at one node and
    // biases the tip curvature; the dense samples carry the tips to
    // within the sagitta of one arc step.
    let mut points: Vec<(f64, f64)> = Vec::with_capacity(kept_plus.len() + kept_minus.len() + 4);
    points.extend_from_slice(&kept_plus);
    points.extend_from_slice(&kept_minus);

    let half_w = 0.5 * w_g;
    let stats = g.stats()?;
    let near_wall = (16.0 * params.eps * stats.g_max * (1.0f64).max(1.0 / sigma))
        .min(0.05 * half_w)
        .max(1e-9);
    // side-wise: tails that do not cross must sit on the wall
    let sides = [
        (
            -half_w,
            *plus_xy.first().unwrap(),
            *minus_xy.first().unwrap(),
        ),
        (half_w, *plus_xy.last().unwrap(), *minus_xy.last().unwrap()),
    ];
    for (wall_x, plus_end, minus_end) in sides {
        let crossing = plus_end.1 >= minus_end.1;
        if crossing {
            continue;
        }
        for end in [plus_end, minus_end] {
            let gap = (wall_x - end.0).abs();
            if gap > near_wall {
                return Err(Error::GluingFailure(format!(
                    "tails neither cross nor reach the wall at x = {wall_x:.6} \
                     (gap {gap:.3e}); depth {r_depth} too small for eps = {:.1e}",
                    params.eps
                )));
            }
            points.push((wall_x, end.1));
        }
    }

    let hull_poly = hull(&points).map_err(|e| Error::GluingFailure(e.to_string()))?;

    // the tips must be the vertical extremes
    let top = sigma * r_depth;
    let bottom = -r_depth;
    let min_y = hull_poly
        .vertices
        .iter()
        .map(|p| p.1)
        .fold(f64::INFINITY, f64::min);
    let max_y = hull_poly
        .vertices
        .iter()
        .map(|p| p.1)
        .fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-6 * (1.0 + r_depth);
    if (min_y - bottom).abs() > tol || (max_y - top).abs() > tol {
        return Err(Error::GluingFailure(format!(
            "tips are not the vertical extremes at depth {r_depth}: \
             [{min_y:.6}, {max_y:.6}] vs [{bottom:.6}, {top:.6}]"
        )));
    }

    let raw = support_of_hull(&hull_poly, params.n);
    let mean = raw.eta.iter().sum::<f64>() / params.n as f64;
    let curve = convexity_repair(&raw, 1e-6 * mean.abs().max(f64::MIN_POSITIVE));
    curve.check_convex()?;

    let glued = GluedInitial {
        r_depth,
        sigma,
        w_g,
        curve,
        params,
    };

    // construction invariants
    let v_reach = reach(&glued.curve, std::f64::consts::FRAC_PI_2);
    let expected = (1.0 + sigma) * r_depth;
    if (v_reach - expected).abs() > 0.05 * expected.max(1.0) {
        return Err(Error::GluingFailure(format!(
            "vertical reach {v_reach:.6} far from (1+sigma)R = {expected:.6}"
        )));
    }
    let h_reach = reach(&glued.curve, 0.0);
    if h_reach > w_g + 10.0 * params.window {
        return Err(Error::GluingFailure(format!(
            "horizontal reach {h_reach:.6} exceeds slab width {w_g:.6} plus slack"
        )));
    }
    Ok(glued)
}

/// Run the glued construction to extinction.
///
/// `snapshot_times` use the shifted clock where extinction is at 0; they
/// must lie in `(t_R, 0)`. The initial time is `t_R = −A(0)/∮g`, exact
/// for the discrete flow by the summation-by-parts area law.
pub fn run_obna(
    g: &AnisotropyFn,
    r_depth: f64,
    snapshot_times: &[f64],
    params: RunParams,
) -> Result<AncientRun> {
    let initial = build_initial(g, r_depth, params)?;
    let a0 = area(&initial.curve);
    let total = g.total_integral();
    let t_r = -a0 / total;

    for &t in snapshot_times {
        if t <= t_r {
            return Err(Error::WindowMismatch {
                time: t,
                t_r,
                depth: r_depth,
            });
        }
        if t >= 0.0 {
            return Err(Error::GluingFailure(format!(
                "snapshot time {t} is not before extinction"
            )));
        }
    }

    let internal_times: Vec<f64> = snapshot_times.iter().map(|&t| t - t_r).collect();
    let state = FlowState {
        curve: initial.curve.clone(),
        tau: 0.0,
    };
    let mut trace = evolve(
        &state,
        g,
        &internal_times,
        StopRule {
            extinction_area: params.extinction_fraction * a0,
        },
        params.safety,
    )
    .map_err(|e| match e {
        Error::ConvexityLoss { time, index } => Error::ConvexityLoss {
            time: time + t_r,
            index,
        },
        other => other,
    })?;

    let extinction_consistency = (trace.extinction_estimate - (-t_r)).abs();
    // shift to the extinction-at-zero clock
    for t in &mut trace.times {
        *t += t_r;
    }
    for s in &mut trace.scalars {
        s.time += t_r;
    }
    let extinction_point = trace.final_steiner;

    Ok(AncientRun {
        initial,
        trace,
        t_r,
        sigma: speed_sigma(g),
        w_g: slab_width(g, std::f64::consts::FRAC_PI_2),
        extinction_point,
        extinction_consistency,
    })
}

/// Tip-speed ratios, tip span, and the span defect along the trace.
pub fn tip_diagnostics(run: &AncientRun, g: &AnisotropyFn) -> Result<TipDiagnostics> {
    let n = run.initial.params.n;
    let g0 = g.eval(0.0, 0);
    let gpi = g.eval(std::f64::consts::PI, 0);
    let mut out = TipDiagnostics {
        times: run.trace.times.clone(),
        r_minus: Vec::new(),
        r_plus: Vec::new(),
        span: Vec::new(),
        span_defect: Vec::new(),
    };
    for (j, c) in run.trace.curves.iter().enumerate() {
        let k_bottom = curvature_from_support(c, n / 2)?;
        let k_top = curvature_from_support(c, 0)?;
        out.r_minus.push(1.0 / (g0 * k_bottom));
        out.r_plus.push(run.sigma / (gpi * k_top));
        // tip heights read off the support values in the vertical normals
        let span = c.eta[0] + c.eta[n / 2];
        out.span.push(span);
        out.span_defect
            .push(span + run.trace.times[j] * (1.0 + run.sigma));
    }
    Ok(out)
}

/// Evaluate the quantitative bounds a glued run must satisfy. Failures
/// are report entries, never errors.
pub fn verify_bounds(run: &AncientRun, g: &AnisotropyFn) -> Result<BoundReport> {
    let mut checks = Vec::new();
    let sigma = run.sigma;
    let w = run.w_g;
    let r_depth = run.initial.r_depth;
    let total = (1.0 + sigma) * w; // equals the full integral of g
    let ca = c_area(g)?;
    let cr = c_reach(g)?;
    let window = run.initial.params.window;

    // initial area within [w(1+σ)R − C, w(1+σ)R]
    let a0 = area(&run.initial.curve);
    let upper = w * (1.0 + sigma) * r_depth;
    let lower = upper - ca;
    checks.push(BoundCheck {
        name: "initial_area_bounds",
        passed: a0 >= lower && a0 <= upper,
        margin: (a0 - lower).min(upper - a0),
        detail: format!("A(0) = {a0:.6} in [{lower:.6}, {upper:.6}]"),
    });

    // initial horizontal reach above the arcsin defect
    let h0 = reach(&run.initial.curve, 0.0);
    let h_bound = w - 2.0 * cr * (cr / r_depth).min(1.0).asin();
    checks.push(BoundCheck {
        name: "initial_horizontal_reach",
        passed: h0 >= h_bound,
        margin: h0 - h_bound,
        detail: format!("h(t_R) = {h0:.6} >= {h_bound:.6}"),
    });

    // −R ≤ t_R ≤ −R + C/(w(σ+1))
    let t_r_upper = -r_depth + ca / (w * (sigma + 1.0));
    checks.push(BoundCheck {
        name: "initial_time_bounds",
        passed: run.t_r >= -r_depth && run.t_r <= t_r_upper,
        margin: (run.t_r + r_depth).min(t_r_upper - run.t_r),
        detail: format!(
            "t_R = {:.6} in [{:.6}, {:.6}]",
            run.t_r, -r_depth, t_r_upper
        ),
    });

    // area linear in shifted time: A(t) = −t·w(1+σ)
    let mut area_resid = 0.0f64;
    for s in &run.trace.scalars {
        area_resid = area_resid.max((s.area + s.time * total).abs());
    }
    let area_tol = 1e-4 * total * run.t_r.abs().max(1.0);
    checks.push(BoundCheck {
        name: "area_linear_in_time",
        passed: area_resid <= area_tol,
        margin: area_tol - area_resid,
        detail: format!("max |A(t) + t·w(1+σ)| = {area_resid:.3e} <= {area_tol:.3e}"),
    });

    // vertical reach window
    let mut v_margin = f64::INFINITY;
    for s in &run.trace.scalars {
        let lo = -s.time * (1.0 + sigma);
        let hi = lo + 2.0 * ca / (w * (1.0 + sigma));
        v_margin = v_margin.min(s.v_reach - lo).min(hi - s.v_reach);
    }
    checks.push(BoundCheck {
        name: "vertical_reach_bounds",
        passed: v_margin >= 0.0,
        margin: v_margin,
        detail: format!("worst slack {v_margin:.3e} around -t(1+sigma)"),
    });

    // horizontal reach window, with the mollification slack on top
    let mut h_margin = f64::INFINITY;
    for s in &run.trace.scalars {
        let lo = w - ca / (-s.time * (1.0 + sigma) + ca / w);
        let hi = w + 10.0 * window;
        h_margin = h_margin.min(s.h_reach - lo).min(hi - s.h_reach);
    }
    checks.push(BoundCheck {
        name: "horizontal_reach_bounds",
        passed: h_margin >= 0.0,
        margin: h_margin,
        detail: format!("worst slack {h_margin:.3e} within [w - C/(...), w + 10·window]"),
    });

    // support-weighted curvature bound for t > (3/4)t_R, the support being
    // measured from the extinction point
    let (px, py) = run.extinction_point;
    let mut k_margin = f64::INFINITY;
    let late = 0.75 * run.t_r;
    for (j, c) in run.trace.curves.iter().enumerate() {
        let t = run.trace.times[j];
        if t <= late {
            continue;
        }
        for i in 0..c.n() {
            let (nx, ny) = c.normal(i);
            let eta_star = c.eta[i] - px * nx - py * ny;
            let kappa = curvature_from_support(c, i)?;
            let gi = g.eval(c.theta(i), 0);
            let rhs = -2.0 * eta_star / (gi * t) * (1.0 + 1e-3);
            k_margin = k_margin.min(rhs - kappa);
        }
    }
    checks.push(BoundCheck {
        name: "tip_curvature_support_bound",
        passed: k_margin >= 0.0,
        margin: k_margin,
        detail: format!("worst slack {k_margin:.3e} in kappa <= -2·eta/(g·t) for t > (3/4)t_R"),
    });

    Ok(BoundReport { checks })
}

/// Sup-norm distances between consecutive runs at the given shifted times.
///
/// Every run must carry snapshots at exactly these times; a time at or
/// before some run's initial time is a `WindowMismatch`.
pub fn converge_from_runs(runs: &[&AncientRun], times: &[f64]) -> Result<ConvergenceReport> {
    assert!(runs.len() >= 2, "need at least two runs to compare");
    for w in runs.windows(2) {
        assert!(
            w[0].initial.r_depth < w[1].initial.r_depth,
            "runs must come in increasing depth"
        );
    }
    let mut distances = vec![vec![0.0; times.len()]; runs.len() - 1];
    for (j, &t) in times.iter().enumerate() {
        let curves: Vec<&SupportCurve> = runs
            .iter()
            .map(|r| {
                if t <= r.t_r {
                    return Err(Error::WindowMismatch {
                        time: t,
                        t_r: r.t_r,
                        depth: r.initial.r_depth,
                    });
                }
                let idx = r
                    .trace
                    .times
                    .iter()
                    .position(|&u| (u - t).abs() < 1e-9)
                    .ok_or(Error::WindowMismatch {
                        time: t,
                        t_r: r.t_r,
                        depth: r.initial.r_depth,
                    })?;
                Ok(&r.trace.curves[idx])
            })
            .collect::<Result<_>>()?;
        for k in 0..runs.len() - 1 {
            distances[k][j] = curves[k]
                .eta
                .iter()
                .zip(&curves[k + 1].eta)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
        }
    }

    // limit estimate: the deepest run's curves at the common times
    let deepest = runs.last().unwrap();
    let limit_curves = times
        .iter()
        .map(|&t| {
            let idx = deepest
                .trace
                .times
                .iter()
                .position(|&u| (u - t).abs() < 1e-9)
                .unwrap();
            deepest.trace.curves[idx].clone()
        })
        .collect();

    Ok(ConvergenceReport {
        depths: runs.iter().map(|r| r.initial.r_depth).collect(),
        times: times.to_vec(),
        distances,
        limit_curves,
    })
}

/// Run a full depth sequence (concurrently) and compare consecutive runs
/// at the common times.
pub fn converge_sequence(
    g: &AnisotropyFn,
    depths: &[f64],
    times: &[f64],
    params: RunParams,
) -> Result<ConvergenceReport> {
    assert!(depths.len() >= 2);
    let runs = run_depths(g, depths, times, params)?;
    let refs: Vec<&AncientRun> = runs.iter().collect();
    converge_from_runs(&refs, times)
}

/// Run several depths concurrently with a shared snapshot grid.
pub fn run_depths(
    g: &AnisotropyFn,
    depths: &[f64],
    times: &[f64],
    params: RunParams,
) -> Result<Vec<AncientRun>> {
    let mut out: Vec<Option<Result<AncientRun>>> = Vec::new();
    out.resize_with(depths.len(), || None);
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for &depth in depths {
            let g = g.clone();
            handles.push(scope.spawn(move || run_obna(&g, depth, times, params)));
        }
        for (slot, h) in out.iter_mut().zip(handles) {
            *slot = Some(h.join().expect("run thread panicked"));
        }
    });
    out.into_iter().map(|r| r.unwrap()).collect()
}
