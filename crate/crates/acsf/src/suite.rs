//! The bundled verification suite.
//!
//! Ten numbered checks cover the whole pipeline at desk scale: translator
//! recovery and stationarity, the exact area law, the shrinking circle,
//! the Harnack bounds, the glued-construction bounds, tip asymptotics,
//! cross-depth convergence, and grid convergence. The acceptance test and
//! the CLI `verify` subcommand both run exactly this list.

use crate::ancient::{
    build_initial, c_area, c_reach, converge_from_runs, tip_diagnostics, verify_bounds, AncientRun,
    RunParams,
};
use crate::anisotropy::{slab_width, speed_sigma, AnisotropyFn, TAU};
use crate::convexgeom::{curvature_from_support, SupportCurve};
use crate::error::Result;
use crate::flow::{evolve, evolve_graph, harnack_q, FlowState, FlowTrace, GraphState, StopRule};
use crate::translator::build_profile;

/// Scale knobs for the suite; the defaults are the desk scale every
/// tolerance below is calibrated for.
#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    pub n: usize,
    pub eps: f64,
    pub safety: f64,
    /// Multiplies recorded areas after each run; a fault-injection hook
    /// for exercising the failure path (1.0 = no fault).
    pub area_fault_scale: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            n: 512,
            eps: 1e-4,
            safety: 0.5,
            area_fault_scale: 1.0,
        }
    }
}

/// Outcome of one numbered check.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "criterion {:2} {:32} {}  {}",
            self.id,
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.detail
        )
    }
}

fn g_unit() -> AnisotropyFn {
    AnisotropyFn::constant(1.0).expect("constant 1 is positive")
}

fn g_two_plus_cos() -> AnisotropyFn {
    AnisotropyFn::new(vec![2.0, 1.0], vec![]).expect("2 + cos is positive")
}

/// Snapshot grid for a glued run: a sweep from 0.78·t_R to 0.05·t_R with
/// the tip-asymptotics time (3/4)·t_R and the cross-run comparison time
/// −5 spliced in when they fit.
pub fn default_snapshot_times(t_r: f64) -> Vec<f64> {
    let mut ts = Vec::new();
    let lo = 0.78 * t_r;
    let hi = 0.05 * t_r;
    let m = 16;
    for i in 0..m {
        ts.push(lo + (hi - lo) * i as f64 / (m - 1) as f64);
    }
    ts.push(0.75 * t_r);
    if t_r < -5.0 {
        ts.push(-5.0);
    }
    ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    ts
}

/// The planned initial time of a glued run, obtained by building the
/// initial curve and applying the area law.
pub fn planned_t_r(g: &AnisotropyFn, depth: f64, params: RunParams) -> Result<f64> {
    let glued = build_initial(g, depth, params)?;
    Ok(-crate::convexgeom::area(&glued.curve) / g.total_integral())
}

/// Everything the criteria share: the glued runs for both weights and the
/// two circle runs.
pub struct RunSet {
    pub cfg: SuiteConfig,
    /// Unit-weight runs at depths 10, 15, 20, 30, 40, 60.
    pub unit_runs: Vec<AncientRun>,
    /// 2+cos runs at depths 10, 20, 40.
    pub cos_runs: Vec<AncientRun>,
    /// Off-center unit circle at the configured n; snapshot at −0.25.
    pub circle: FlowTrace,
    /// Same circle at half resolution, for the grid-convergence check.
    pub circle_coarse: FlowTrace,
}

const UNIT_DEPTHS: [f64; 6] = [10.0, 15.0, 20.0, 30.0, 40.0, 60.0];
const COS_DEPTHS: [f64; 3] = [10.0, 20.0, 40.0];

/// Off-center unit circle; the offset makes the spatial discretization
/// error visible so the grid-convergence ratio is well defined.
fn circle_state(n: usize) -> FlowState {
    let center = (0.3, -0.2);
    let eta = (0..n)
        .map(|i| {
            let t = -std::f64::consts::PI + TAU * i as f64 / n as f64;
            1.0 + center.0 * t.sin() - center.1 * t.cos()
        })
        .collect();
    FlowState {
        curve: SupportCurve { eta },
        tau: 0.0,
    }
}

fn circle_snapshot_times() -> Vec<f64> {
    vec![0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45]
}

impl RunSet {
    pub fn build(cfg: SuiteConfig) -> Result<RunSet> {
        let params = RunParams {
            n: cfg.n,
            eps: cfg.eps,
            safety: cfg.safety,
            window: 4.0 * TAU / cfg.n as f64,
            ..RunParams::default()
        };
        let gu = g_unit();
        let gc = g_two_plus_cos();

        // all runs of one weight share a thread scope inside run_depths;
        // grids must be planned first so each run gets its own times
        let mut unit_runs = Vec::new();
        for &depth in &UNIT_DEPTHS {
            let t_r = planned_t_r(&gu, depth, params)?;
            let times = default_snapshot_times(t_r);
            unit_runs.push((depth, times));
        }
        let mut cos_runs = Vec::new();
        for &depth in &COS_DEPTHS {
            let t_r = planned_t_r(&gc, depth, params)?;
            let times = default_snapshot_times(t_r);
            cos_runs.push((depth, times));
        }

        let mut unit_done: Vec<Option<Result<AncientRun>>> = Vec::new();
        unit_done.resize_with(unit_runs.len(), || None);
        let mut cos_done: Vec<Option<Result<AncientRun>>> = Vec::new();
        cos_done.resize_with(cos_runs.len(), || None);
        let mut circle = None;
        let mut circle_coarse = None;

        std::thread::scope(|scope| {
            let mut unit_handles = Vec::new();
            for (depth, times) in &unit_runs {
                let g = gu.clone();
                let times = times.clone();
                let depth = *depth;
                unit_handles
                    .push(scope.spawn(move || crate::ancient::run_obna(&g, depth, &times, params)));
            }
            let mut cos_handles = Vec::new();
            for (depth, times) in &cos_runs {
                let g = gc.clone();
                let times = times.clone();
                let depth = *depth;
                cos_handles
                    .push(scope.spawn(move || crate::ancient::run_obna(&g, depth, &times, params)));
            }
            let circle_handle = scope.spawn(|| {
                evolve(
                    &circle_state(cfg.n),
                    &g_unit(),
                    &circle_snapshot_times(),
                    StopRule {
                        extinction_area: 1e-3 * std::f64::consts::PI,
                    },
                    cfg.safety,
                )
            });
            let coarse_handle = scope.spawn(|| {
                evolve(
                    &circle_state(cfg.n / 2),
                    &g_unit(),
                    &circle_snapshot_times(),
                    StopRule {
                        extinction_area: 1e-3 * std::f64::consts::PI,
                    },
                    cfg.safety,
                )
            });

            for (slot, h) in unit_done.iter_mut().zip(unit_handles) {
                *slot = Some(h.join().expect("run thread panicked"));
            }
            for (slot, h) in cos_done.iter_mut().zip(cos_handles) {
                *slot = Some(h.join().expect("run thread panicked"));
            }
            circle = Some(circle_handle.join().expect("circle thread panicked"));
            circle_coarse = Some(coarse_handle.join().expect("circle thread panicked"));
        });

        let mut set = RunSet {
            cfg,
            unit_runs: unit_done
                .into_iter()
                .map(|r| r.unwrap())
                .collect::<Result<_>>()?,
            cos_runs: cos_done
                .into_iter()
                .map(|r| r.unwrap())
                .collect::<Result<_>>()?,
            circle: circle.unwrap()?,
            circle_coarse: circle_coarse.unwrap()?,
        };

        if cfg.area_fault_scale != 1.0 {
            for run in set.unit_runs.iter_mut().chain(set.cos_runs.iter_mut()) {
                for s in &mut run.trace.scalars {
                    s.area *= cfg.area_fault_scale;
                }
            }
        }
        Ok(set)
    }

    fn all_runs(&self) -> impl Iterator<Item = (&'static str, &AncientRun)> {
        self.unit_runs
            .iter()
            .map(|r| ("g=1", r))
            .chain(self.cos_runs.iter().map(|r| ("g=2+cos", r)))
    }

    /// Runs referenced by the bound criteria (depths 10, 20, 40).
    fn bound_runs(&self) -> Vec<(&'static str, &AncientRun)> {
        self.all_runs()
            .filter(|(_, r)| [10.0, 20.0, 40.0].contains(&r.initial.r_depth))
            .collect()
    }
}

// ---------------------------------------------------------------------------
// individual criteria
// ---------------------------------------------------------------------------

fn criterion_grim_reaper(cfg: &SuiteConfig) -> Result<CriterionResult> {
    let g = g_unit();
    let profile = build_profile(&g, std::f64::consts::FRAC_PI_2, 1.0, cfg.eps, 2001)?;
    let mut worst = 0.0f64;
    for s in &profile.samples {
        worst = worst.max((s.x - s.theta).abs());
        worst = worst.max((s.y + s.theta.cos().ln()).abs());
    }
    Ok(CriterionResult {
        id: 1,
        name: "grim_reaper_recovery",
        passed: worst <= 1e-8,
        detail: format!("max |profile - closed form| = {worst:.3e} (tol 1e-8)"),
    })
}

fn criterion_translator_stationarity(cfg: &SuiteConfig) -> Result<CriterionResult> {
    let eps = 1e-2;
    let mut worst = 0.0f64;
    for g in [g_unit(), g_two_plus_cos()] {
        let n = cfg.n;
        let half_pi = std::f64::consts::FRAC_PI_2;
        let kappa: Vec<f64> = (0..n)
            .map(|i| {
                let t =
                    -half_pi + eps + (std::f64::consts::PI - 2.0 * eps) * i as f64 / (n - 1) as f64;
                (half_pi - t).sin() / g.eval(t, 0)
            })
            .collect();
        let s = GraphState {
            theta_lo: -half_pi + eps,
            theta_hi: half_pi - eps,
            kappa: kappa.clone(),
            tau: 0.0,
        };
        let out = evolve_graph(&s, &g, 1.0, cfg.safety)?;
        let drift = out
            .kappa
            .iter()
            .zip(&kappa)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        worst = worst.max(drift);
    }
    Ok(CriterionResult {
        id: 2,
        name: "translator_stationarity",
        passed: worst <= 1e-6,
        detail: format!("sup drift over unit time = {worst:.3e} (tol 1e-6)"),
    })
}

fn criterion_area_law(set: &RunSet) -> Result<CriterionResult> {
    let mut worst_rel = 0.0f64;
    let mut worst_at = String::new();
    let mut consider = |label: String, trace: &FlowTrace, g: &AnisotropyFn| -> Result<()> {
        let resid = crate::flow::area_law_residual(trace, g)?;
        let rel = resid / g.total_integral();
        if rel > worst_rel {
            worst_rel = rel;
            worst_at = label;
        }
        Ok(())
    };
    let gu = g_unit();
    let gc = g_two_plus_cos();
    for (label, run) in set.all_runs() {
        consider(
            format!("{label} R={}", run.initial.r_depth),
            &run.trace,
            if label == "g=1" { &gu } else { &gc },
        )?;
    }
    consider("circle".into(), &set.circle, &gu)?;
    Ok(CriterionResult {
        id: 3,
        name: "exact_area_law",
        passed: worst_rel <= 1e-4,
        detail: format!("worst |dA/dt + ∮g|/∮g = {worst_rel:.3e} at {worst_at} (tol 1e-4)"),
    })
}

fn criterion_shrinking_circle(set: &RunSet) -> Result<CriterionResult> {
    let tr = &set.circle;
    let ext_err = (tr.extinction_estimate - 0.5).abs();
    let kappa_err = circle_kappa_error(tr, set.cfg.n)?;
    let passed = ext_err <= 5e-4 && kappa_err <= 1e-3;
    Ok(CriterionResult {
        id: 4,
        name: "shrinking_circle",
        passed,
        detail: format!(
            "extinction 0.5 ± {ext_err:.2e} (tol 5e-4); kappa rel err {kappa_err:.3e} (tol 1e-3)"
        ),
    })
}

/// Relative error of the curvature at shifted time −0.25 against the
/// exact value √2, maximized over the grid.
fn circle_kappa_error(tr: &FlowTrace, n: usize) -> Result<f64> {
    let idx = tr
        .times
        .iter()
        .position(|&t| (t - 0.25).abs() < 1e-9)
        .expect("snapshot at internal time 0.25");
    let c = &tr.curves[idx];
    let exact = 2f64.sqrt();
    let mut worst = 0.0f64;
    for i in 0..n {
        let k = curvature_from_support(c, i)?;
        worst = worst.max((k - exact).abs() / exact);
    }
    Ok(worst)
}

fn criterion_harnack(set: &RunSet) -> Result<CriterionResult> {
    let mut worst_q = f64::INFINITY; // min of Q + 1/(2 elapsed)
    let mut worst_mono = f64::INFINITY; // min relative increment of kappa*sqrt
    let mut eval = |trace: &FlowTrace, g: &AnisotropyFn, alpha: f64| -> Result<()> {
        let n = trace.curves.first().map(|c| c.n()).unwrap_or(0);
        for (j, c) in trace.curves.iter().enumerate() {
            let elapsed = trace.times[j] - alpha;
            for i in 0..n {
                let q = harnack_q(c, g, i)?;
                worst_q = worst_q.min(q + 1.0 / (2.0 * elapsed));
            }
        }
        for j in 1..trace.curves.len() {
            let e0 = trace.times[j - 1] - alpha;
            let e1 = trace.times[j] - alpha;
            for i in 0..n {
                let k0 = curvature_from_support(&trace.curves[j - 1], i)?;
                let k1 = curvature_from_support(&trace.curves[j], i)?;
                let v0 = k0 * e0.sqrt();
                let v1 = k1 * e1.sqrt();
                worst_mono = worst_mono.min((v1 - v0) / v0.abs());
            }
        }
        Ok(())
    };
    for (label, run) in set.all_runs() {
        let g = if label == "g=1" {
            g_unit()
        } else {
            g_two_plus_cos()
        };
        eval(&run.trace, &g, run.t_r)?;
    }
    // circle trace times are in the internal clock started at 0
    eval(&set.circle, &g_unit(), 0.0)?;
    let passed = worst_q >= -1e-4 && worst_mono >= -1e-6;
    Ok(CriterionResult {
        id: 5,
        name: "harnack_suite",
        passed,
        detail: format!(
            "min Q + 1/(2(τ−α)) = {worst_q:.3e} (tol -1e-4); min Δ(κ√) rel = {worst_mono:.3e} (tol -1e-6)"
        ),
    })
}

fn criterion_initial_bounds(set: &RunSet) -> Result<CriterionResult> {
    let mut all = true;
    let mut details = Vec::new();
    for (label, run) in set.bound_runs() {
        let g = if label == "g=1" {
            g_unit()
        } else {
            g_two_plus_cos()
        };
        let report = verify_bounds(run, &g)?;
        for c in report
            .checks
            .iter()
            .filter(|c| c.name == "initial_area_bounds" || c.name == "initial_horizontal_reach")
        {
            if !c.passed {
                all = false;
                details.push(format!(
                    "{label} R={}: {} FAILED",
                    run.initial.r_depth, c.name
                ));
            }
        }
    }
    // summarize margins with one representative
    let summary = if details.is_empty() {
        let ca = c_area(&g_unit())?;
        let cr = c_reach(&g_two_plus_cos())?;
        format!("all 6 runs inside bounds (C_area(g=1) = {ca:.4}, C_reach(2+cos) = {cr:.4})")
    } else {
        details.join("; ")
    };
    Ok(CriterionResult {
        id: 6,
        name: "glued_initial_bounds",
        passed: all,
        detail: summary,
    })
}

fn criterion_flow_bounds(set: &RunSet) -> Result<CriterionResult> {
    let watched = [
        "initial_time_bounds",
        "vertical_reach_bounds",
        "horizontal_reach_bounds",
        "tip_curvature_support_bound",
    ];
    let mut all = true;
    let mut worst_margin = f64::INFINITY;
    let mut failures = Vec::new();
    for (label, run) in set.bound_runs() {
        let g = if label == "g=1" {
            g_unit()
        } else {
            g_two_plus_cos()
        };
        let report = verify_bounds(run, &g)?;
        for c in report.checks.iter().filter(|c| watched.contains(&c.name)) {
            worst_margin = worst_margin.min(c.margin);
            if !c.passed {
                all = false;
                failures.push(format!("{label} R={}: {}", run.initial.r_depth, c.name));
            }
        }
    }
    Ok(CriterionResult {
        id: 7,
        name: "flow_bounds",
        passed: all,
        detail: if all {
            format!("all bound checks hold; worst margin {worst_margin:.3e}")
        } else {
            failures.join("; ")
        },
    })
}

fn criterion_tip_ratios(set: &RunSet) -> Result<CriterionResult> {
    let run = set
        .unit_runs
        .iter()
        .find(|r| r.initial.r_depth == 40.0)
        .expect("depth-40 unit run present");
    let tips = tip_diagnostics(run, &g_unit())?;
    let target = 0.75 * run.t_r;
    let idx = tips
        .times
        .iter()
        .position(|&t| (t - target).abs() < 1e-9)
        .expect("snapshot at (3/4) t_R");
    let (rm, rp) = (tips.r_minus[idx], tips.r_plus[idx]);
    let in_window = (0.9..=1.0).contains(&rm) && (0.9..=1.0).contains(&rp);

    // nonincreasing up to the finite-depth slack sqrt((t1-tR)/(t2-tR))
    let mut mono = true;
    for j in 1..tips.times.len() {
        let slack = ((tips.times[j] - run.t_r) / (tips.times[j - 1] - run.t_r)).sqrt();
        let tol = 1.0 + 1e-6;
        if tips.r_minus[j] > tips.r_minus[j - 1] * slack * tol
            || tips.r_plus[j] > tips.r_plus[j - 1] * slack * tol
        {
            mono = false;
        }
    }
    Ok(CriterionResult {
        id: 8,
        name: "tip_speed_ratios",
        passed: in_window && mono,
        detail: format!(
            "r−((3/4)t_R) = {rm:.4}, r+ = {rp:.4} (window [0.9, 1.0]); nonincreasing: {mono}"
        ),
    })
}

fn criterion_convergence(set: &RunSet) -> Result<CriterionResult> {
    let t = [-5.0];
    let pick = |depths: &[f64]| -> Vec<&AncientRun> {
        depths
            .iter()
            .map(|&d| {
                set.unit_runs
                    .iter()
                    .find(|r| r.initial.r_depth == d)
                    .expect("depth present")
            })
            .collect()
    };
    let seq_a = pick(&[10.0, 20.0, 40.0]);
    let rep_a = converge_from_runs(&seq_a, &t)?;
    let d_10_20 = rep_a.distances[0][0];
    let d_20_40 = rep_a.distances[1][0];

    let seq_b = pick(&[15.0, 30.0, 60.0]);
    let rep_b = converge_from_runs(&seq_b, &t)?;

    // limit estimates of the two interleaved sequences
    let la = &rep_a.limit_curves[0];
    let lb = &rep_b.limit_curves[0];
    let cross = la
        .eta
        .iter()
        .zip(&lb.eta)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    let decreasing = d_10_20 > d_20_40;
    let consistent = cross <= 2.0 * d_20_40;
    Ok(CriterionResult {
        id: 9,
        name: "depth_convergence",
        passed: decreasing && consistent,
        detail: format!(
            "d(10,20) = {d_10_20:.3e} > d(20,40) = {d_20_40:.3e}: {decreasing}; \
             cross-sequence gap {cross:.3e} <= {:.3e}: {consistent}",
            2.0 * d_20_40
        ),
    })
}

fn criterion_grid_convergence(set: &RunSet) -> Result<CriterionResult> {
    let fine = circle_kappa_error(&set.circle, set.cfg.n)?;
    let coarse = circle_kappa_error(&set.circle_coarse, set.cfg.n / 2)?;
    let ratio = coarse / fine;
    Ok(CriterionResult {
        id: 10,
        name: "grid_convergence",
        passed: ratio >= 3.0,
        detail: format!(
            "kappa error {coarse:.3e} (n={}) / {fine:.3e} (n={}) = {ratio:.2} (need >= 3)",
            set.cfg.n / 2,
            set.cfg.n
        ),
    })
}

/// Run every criterion at the given scale.
pub fn run_full_suite(cfg: SuiteConfig) -> Result<Vec<CriterionResult>> {
    let set = RunSet::build(cfg)?;
    run_on_set(&set)
}

/// Run every criterion against an existing run set.
pub fn run_on_set(set: &RunSet) -> Result<Vec<CriterionResult>> {
    Ok(vec![
        criterion_grim_reaper(&set.cfg)?,
        criterion_translator_stationarity(&set.cfg)?,
        criterion_area_law(set)?,
        criterion_shrinking_circle(set)?,
        criterion_harnack(set)?,
        criterion_initial_bounds(set)?,
        criterion_flow_bounds(set)?,
        criterion_tip_ratios(set)?,
        criterion_convergence(set)?,
        criterion_grid_convergence(set)?,
    ])
}

/// Sanity constants used by reports.
pub fn describe_scale(cfg: &SuiteConfig) -> String {
    let gu = g_unit();
    format!(
        "n = {}, eps = {:.1e}, safety = {}, w_g(1) = {:.6}, sigma(2+cos) = {:.6}",
        cfg.n,
        cfg.eps,
        cfg.safety,
        slab_width(&gu, std::f64::consts::FRAC_PI_2),
        speed_sigma(&g_two_plus_cos())
    )
}
