//! Command-line front end for the flow laboratory.
//!
//! Subcommands: `width`, `sigma` (scalar functionals of the weight),
//! `translator` (profile construction), `evolve` (compact flow from a
//! circle), `ancient` (one glued run with its bound report), `converge`
//! (a depth sequence with cross-run distances), and `verify` (the full
//! check suite). Exit codes: 0 success, 1 domain error (the error name
//! goes to stderr), 2 configuration error.

mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use acsf::ancient::{
    converge_from_runs, run_depths, run_obna, tip_diagnostics, verify_bounds, RunParams,
};
use acsf::anisotropy::{slab_width, speed_sigma, AnisotropyCoeffs, AnisotropyFn};
use acsf::convexgeom::area;
use acsf::flow::{evolve, FlowState, StopRule};
use acsf::suite::{default_snapshot_times, planned_t_r, run_full_suite, SuiteConfig};
use acsf::translator::{build_profile, center_profile, profile_checks};
use acsf::SupportCurve;

#[derive(Debug)]
enum CliError {
    Config(String),
    Domain(acsf::Error),
}

impl From<acsf::Error> for CliError {
    fn from(e: acsf::Error) -> Self {
        CliError::Domain(e)
    }
}

type CliResult<T> = Result<T, CliError>;

fn config_err<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Config(msg.into()))
}

#[derive(Parser)]
#[command(
    name = "acsf",
    version,
    about = "Anisotropic curve shortening flow laboratory"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Options shared by every subcommand: the weight g and an optional
/// config file whose fields the flags override.
#[derive(Args, Clone)]
struct Common {
    /// Inline weight as JSON, e.g. '{"a":[2,1],"b":[]}'
    #[arg(long)]
    g: Option<String>,
    /// JSON config file; explicit flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (defaults to $ACSF_OUT/<command>)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
struct FileConfig {
    g: Option<AnisotropyCoeffs>,
    psi: Option<f64>,
    speed: Option<f64>,
    eps: Option<f64>,
    n: Option<usize>,
    samples: Option<usize>,
    radius: Option<f64>,
    center: Option<(f64, f64)>,
    depth: Option<f64>,
    depths: Option<Vec<f64>>,
    times: Option<Vec<f64>>,
    safety: Option<f64>,
    window: Option<f64>,
    extinction_fraction: Option<f64>,
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the slab width of the unit-speed translator in direction psi
    Width {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        psi: Option<f64>,
    },
    /// Print the speed ratio of the downward translator
    Sigma {
        #[command(flatten)]
        common: Common,
    },
    /// Build a centered translator profile and export it
    Translator {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        psi: Option<f64>,
        #[arg(long)]
        speed: Option<f64>,
        #[arg(long)]
        eps: Option<f64>,
        /// Number of profile samples
        #[arg(long)]
        n: Option<usize>,
    },
    /// Flow a circle to extinction, recording snapshots
    Evolve {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        radius: Option<f64>,
        /// Circle center as "x,y"
        #[arg(long)]
        center: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        /// Snapshot times (comma separated, from the start of the run)
        #[arg(long)]
        times: Option<String>,
        #[arg(long)]
        safety: Option<f64>,
    },
    /// One glued run: construction, flow, bound report
    Ancient {
        #[command(flatten)]
        common: Common,
        /// Gluing depth R
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        /// Snapshot times in the extinction-at-zero clock (comma separated)
        #[arg(long, allow_hyphen_values = true)]
        times: Option<String>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        safety: Option<f64>,
    },
    /// Run a depth sequence and compare consecutive runs
    Converge {
        #[command(flatten)]
        common: Common,
        /// Depth list, e.g. "10,20,40"
        #[arg(long)]
        r_list: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        /// Common snapshot times (comma separated, negative)
        #[arg(long, allow_hyphen_values = true)]
        times: Option<String>,
    },
    /// Run the full verification suite
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<usize>,
        /// Write the criterion report to this JSON file
        #[arg(long)]
        report: Option<PathBuf>,
        /// Scale recorded areas by 1.01 after each run (failure-path hook)
        #[arg(long, hide = true)]
        inject_area_fault: bool,
    },
}

fn load_config(common: &Common) -> CliResult<FileConfig> {
    match &common.config {
        None => Ok(FileConfig::default()),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("bad config {}: {e}", path.display())))
        }
    }
}

fn resolve_g(common: &Common, cfg: &FileConfig) -> CliResult<AnisotropyFn> {
    if let Some(json) = &common.g {
        return AnisotropyFn::from_json(json).map_err(|e| match e {
            acsf::Error::PositivityViolation { .. } => CliError::Config(format!("{e}")),
            acsf::Error::DegenerateInput(m) => CliError::Config(m),
            other => CliError::Domain(other),
        });
    }
    if let Some(coeffs) = &cfg.g {
        return AnisotropyFn::from_coeffs(coeffs).map_err(|e| CliError::Config(format!("{e}")));
    }
    config_err("no weight given: pass --g or a config file with a \"g\" field")
}

fn resolve_out(common: &Common, cfg: &FileConfig, command: &str) -> CliResult<PathBuf> {
    if let Some(o) = &common.out {
        return Ok(o.clone());
    }
    if let Some(o) = &cfg.out {
        return Ok(o.clone());
    }
    if let Ok(root) = std::env::var("ACSF_OUT") {
        return Ok(PathBuf::from(root).join(command));
    }
    config_err("no output directory: pass --out, set it in the config, or export ACSF_OUT")
}

fn parse_list(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|e| CliError::Config(format!("bad number {p:?}: {e}")))
        })
        .collect()
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)
            .map_err(|e| CliError::Config(format!("cannot create {}: {e}", parent.display())))?;
    }
    std::fs::write(path, contents)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    g: AnisotropyCoeffs,
    #[serde(skip_serializing_if = "Option::is_none")]
    psi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    speed: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    center: Option<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    depth: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    depths: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    times: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    safety: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    window: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    extinction_fraction: Option<f64>,
}

impl<'a> Manifest<'a> {
    fn new(command: &'a str, g: &AnisotropyFn) -> Self {
        Manifest {
            command,
            g: g.coeffs(),
            psi: None,
            speed: None,
            eps: None,
            n: None,
            samples: None,
            radius: None,
            center: None,
            depth: None,
            depths: None,
            times: None,
            safety: None,
            window: None,
            extinction_fraction: None,
        }
    }

    fn write(&self, dir: &Path) -> CliResult<()> {
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::Config(format!("manifest: {e}")))?;
        write_file(&dir.join("manifest.json"), &(text + "\n"))
    }
}

fn snapshot_name(t: f64) -> String {
    format!("t_{t:.6}.csv")
}

fn write_trace_artifacts(dir: &Path, trace: &acsf::FlowTrace) -> CliResult<()> {
    write_file(&dir.join("trace.csv"), &trace.to_csv())?;
    for (j, c) in trace.curves.iter().enumerate() {
        let csv = c.to_csv()?;
        write_file(
            &dir.join("snapshots").join(snapshot_name(trace.times[j])),
            &csv,
        )?;
    }
    let polylines: Vec<Vec<(f64, f64)>> =
        trace.curves.iter().map(svg::support_curve_points).collect();
    let doc = svg::render(&polylines, &svg::Style::default())?;
    write_file(&dir.join("trace.svg"), &doc)?;
    Ok(())
}

fn cmd_width(common: &Common, psi: Option<f64>) -> CliResult<()> {
    let cfg = load_config(common)?;
    let g = resolve_g(common, &cfg)?;
    let psi = psi.or(cfg.psi).unwrap_or(std::f64::consts::FRAC_PI_2);
    println!("{:.17}", slab_width(&g, psi));
    Ok(())
}

fn cmd_sigma(common: &Common) -> CliResult<()> {
    let cfg = load_config(common)?;
    let g = resolve_g(common, &cfg)?;
    println!("{:.17}", speed_sigma(&g));
    Ok(())
}

fn cmd_translator(
    common: &Common,
    psi: Option<f64>,
    speed: Option<f64>,
    eps: Option<f64>,
    n: Option<usize>,
) -> CliResult<()> {
    let cfg = load_config(common)?;
    let g = resolve_g(common, &cfg)?;
    let psi = psi.or(cfg.psi).unwrap_or(std::f64::consts::FRAC_PI_2);
    let speed = speed.or(cfg.speed).unwrap_or(1.0);
    let eps = eps.or(cfg.eps).unwrap_or(1e-4);
    let n = n.or(cfg.samples).unwrap_or(2001);
    if speed <= 0.0 {
        return config_err("speed must be positive");
    }
    if !(eps > 0.0 && eps < std::f64::consts::FRAC_PI_2) {
        return config_err("eps must lie in (0, pi/2)");
    }
    if n < 16 {
        return config_err("need at least 16 samples");
    }
    let out = resolve_out(common, &cfg, "translator")?;

    let profile = center_profile(&build_profile(&g, psi, speed, eps, n)?, &g);
    let checks = profile_checks(&profile, &g)?;
    write_file(&out.join("profile.csv"), &profile.to_csv())?;
    let pts: Vec<(f64, f64)> = profile.samples.iter().map(|s| (s.x, s.y)).collect();
    write_file(
        &out.join("profile.svg"),
        &svg::render(&[pts], &svg::Style::default())?,
    )?;
    let mut manifest = Manifest::new("translator", &g);
    manifest.psi = Some(psi);
    manifest.speed = Some(speed);
    manifest.eps = Some(eps);
    manifest.samples = Some(n);
    manifest.write(&out)?;
    println!(
        "profile written to {}; width gap {:.3e}, asymptote margin {:.3e}",
        out.display(),
        checks.width_gap,
        checks.asymptote_margin
    );
    Ok(())
}

fn cmd_evolve(
    common: &Common,
    radius: Option<f64>,
    center: Option<String>,
    n: Option<usize>,
    times: Option<String>,
    safety: Option<f64>,
) -> CliResult<()> {
    let cfg = load_config(common)?;
    let g = resolve_g(common, &cfg)?;
    let radius = radius.or(cfg.radius).unwrap_or(1.0);
    let n = n.or(cfg.n).unwrap_or(512);
    let safety = safety.or(cfg.safety).unwrap_or(0.5);
    let center = match (center, cfg.center) {
        (Some(s), _) => {
            let v = parse_list(&s)?;
            if v.len() != 2 {
                return config_err("center must be \"x,y\"");
            }
            (v[0], v[1])
        }
        (None, Some(c)) => c,
        (None, None) => (0.0, 0.0),
    };
    if radius <= 0.0 {
        return config_err("radius must be positive");
    }
    if n < 64 || n % 2 != 0 {
        return config_err("n must be even and at least 64");
    }
    if !(safety > 0.0 && safety <= 1.0) {
        return config_err("safety must lie in (0, 1]");
    }
    // the body must contain the origin for a positive support function
    if (center.0 * center.0 + center.1 * center.1).sqrt() >= radius {
        return config_err("the circle must contain the origin (|center| < radius)");
    }
    let times = match (times, cfg.times.clone()) {
        (Some(s), _) => parse_list(&s)?,
        (None, Some(v)) => v,
        (None, None) => {
            // spread snapshots over the isotropic-estimate lifetime
            let ext = radius * radius * std::f64::consts::PI / g.total_integral();
            (1..10).map(|i| ext * i as f64 / 10.0).collect()
        }
    };
    for w in times.windows(2) {
        if w[0] >= w[1] {
            return config_err("times must be strictly increasing");
        }
    }
    let out = resolve_out(common, &cfg, "evolve")?;

    let eta = (0..n)
        .map(|i| {
            let t = -std::f64::consts::PI + acsf::anisotropy::TAU * i as f64 / n as f64;
            radius + center.0 * t.sin() - center.1 * t.cos()
        })
        .collect();
    let state = FlowState {
        curve: SupportCurve { eta },
        tau: 0.0,
    };
    let extinction_fraction = cfg.extinction_fraction.unwrap_or(1e-3);
    let a0 = area(&state.curve);
    let trace = evolve(
        &state,
        &g,
        &times,
        StopRule {
            extinction_area: extinction_fraction * a0,
        },
        safety,
    )?;
    write_trace_artifacts(&out, &trace)?;
    let mut manifest = Manifest::new("evolve", &g);
    manifest.radius = Some(radius);
    manifest.center = Some(center);
    manifest.n = Some(n);
    manifest.times = Some(times);
    manifest.safety = Some(safety);
    manifest.extinction_fraction = Some(extinction_fraction);
    manifest.write(&out)?;
    println!(
        "trace written to {}; extinction estimate {:.17}{}",
        out.display(),
        trace.extinction_estimate,
        if trace.truncated { " (truncated)" } else { "" }
    );
    Ok(())
}

fn run_params_from(cfg: &FileConfig, n: usize, eps: Option<f64>, safety: Option<f64>) -> RunParams {
    let mut params = RunParams::with_n(n);
    if let Some(e) = eps.or(cfg.eps) {
        params.eps = e;
    }
    if let Some(s) = safety.or(cfg.safety) {
        params.safety = s;
    }
    if let Some(w) = cfg.window {
        params.window = w;
    }
    if let Some(f) = cfg.extinction_fraction {
        params.extinction_fraction = f;
    }
    params
}

fn cmd_ancient(
    common: &Common,
    r: Option<f64>,
    n: Option<usize>,
    times: Option<String>,
    eps: Option<f64>,
    safety: Option<f64>,
) -> CliResult<()> {
    let cfg = load_config(common)?;
    let g = resolve_g(common, &cfg)?;
    let depth = match r.or(cfg.depth) {
        Some(d) if d > 0.0 => d,
        Some(_) => return config_err("depth must be positive"),
        None => return config_err("no depth: pass --r"),
    };
    let n = n.or(cfg.n).unwrap_or(512);
    if n < 64 || n % 4 != 0 {
        return config_err("n must be a multiple of 4 and at least 64");
    }
    let params = run_params_from(&cfg, n, eps, safety);
    let out = resolve_out(common, &cfg, "ancient")?;

    let times = match (times, cfg.times.clone()) {
        (Some(s), _) => parse_list(&s)?,
        (None, Some(v)) => v,
        (None, None) => default_snapshot_times(planned_t_r(&g, depth, params)?),
    };
    let run = run_obna(&g, depth, &times, params)?;
    write_trace_artifacts(&out, &run.trace)?;
    let report = verify_bounds(&run, &g)?;
    let tips = tip_diagnostics(&run, &g)?;
    #[derive(Serialize)]
    struct RunReport<'a> {
        t_r: f64,
        sigma: f64,
        w_g: f64,
        extinction_point: (f64, f64),
        extinction_consistency: f64,
        checks: &'a [acsf::ancient::BoundCheck],
        tip_times: &'a [f64],
        r_minus: &'a [f64],
        r_plus: &'a [f64],
        span_defect: &'a [f64],
    }
    let rep = RunReport {
        t_r: run.t_r,
        sigma: run.sigma,
        w_g: run.w_g,
        extinction_point: run.extinction_point,
        extinction_consistency: run.extinction_consistency,
        checks: &report.checks,
        tip_times: &tips.times,
        r_minus: &tips.r_minus,
        r_plus: &tips.r_plus,
        span_defect: &tips.span_defect,
    };
    let text =
        serde_json::to_string_pretty(&rep).map_err(|e| CliError::Config(format!("report: {e}")))?;
    write_file(&out.join("report.json"), &(text + "\n"))?;
    let mut manifest = Manifest::new("ancient", &g);
    manifest.depth = Some(depth);
    manifest.n = Some(n);
    manifest.times = Some(times);
    manifest.eps = Some(params.eps);
    manifest.safety = Some(params.safety);
    manifest.window = Some(params.window);
    manifest.extinction_fraction = Some(params.extinction_fraction);
    manifest.write(&out)?;
    println!(
        "run written to {}; t_R = {:.17}; bound checks {}",
        out.display(),
        run.t_r,
        if report.all_passed() {
            "all passed".to_string()
        } else {
            let names: Vec<&str> = report
                .checks
                .iter()
                .filter(|c| !c.passed)
                .map(|c| c.name)
                .collect();
            format!("FAILED: {}", names.join(", "))
        }
    );
    Ok(())
}

fn cmd_converge(
    common: &Common,
    r_list: Option<String>,
    n: Option<usize>,
    times: Option<String>,
) -> CliResult<()> {
    let cfg = load_config(common)?;
    let g = resolve_g(common, &cfg)?;
    let depths = match (r_list, cfg.depths.clone()) {
        (Some(s), _) => parse_list(&s)?,
        (None, Some(v)) => v,
        (None, None) => return config_err("no depths: pass --r-list"),
    };
    if depths.len() < 2 {
        return config_err("need at least two depths");
    }
    for w in depths.windows(2) {
        if w[0] >= w[1] {
            return config_err("depths must be strictly increasing");
        }
    }
    let n = n.or(cfg.n).unwrap_or(512);
    if n < 64 || n % 4 != 0 {
        return config_err("n must be a multiple of 4 and at least 64");
    }
    let params = run_params_from(&cfg, n, None, None);
    let out = resolve_out(common, &cfg, "converge")?;

    let times = match (times, cfg.times.clone()) {
        (Some(s), _) => parse_list(&s)?,
        (None, Some(v)) => v,
        (None, None) => default_snapshot_times(planned_t_r(&g, depths[0], params)?),
    };

    let runs = run_depths(&g, &depths, &times, params)?;
    for run in &runs {
        let dir = out.join(format!("r_{:.3}", run.initial.r_depth));
        write_trace_artifacts(&dir, &run.trace)?;
        let report = verify_bounds(run, &g)?;
        let text = serde_json::to_string_pretty(&report)
            .map_err(|e| CliError::Config(format!("report: {e}")))?;
        write_file(&dir.join("report.json"), &(text + "\n"))?;
    }
    let refs: Vec<&acsf::ancient::AncientRun> = runs.iter().collect();
    let conv = converge_from_runs(&refs, &times)?;

    let mut csv = String::from("t");
    for k in 0..conv.depths.len() - 1 {
        csv.push_str(&format!(
            ",d_{:.3}_{:.3}",
            conv.depths[k],
            conv.depths[k + 1]
        ));
    }
    csv.push('\n');
    for (j, &t) in conv.times.iter().enumerate() {
        csv.push_str(&format!("{t:.16e}"));
        for row in &conv.distances {
            csv.push_str(&format!(",{:.16e}", row[j]));
        }
        csv.push('\n');
    }
    write_file(&out.join("convergence.csv"), &csv)?;
    for (j, c) in conv.limit_curves.iter().enumerate() {
        write_file(
            &out.join("limit_curves").join(snapshot_name(conv.times[j])),
            &c.to_csv()?,
        )?;
    }
    let mut manifest = Manifest::new("converge", &g);
    manifest.depths = Some(depths);
    manifest.n = Some(n);
    manifest.times = Some(times);
    manifest.window = Some(params.window);
    manifest.write(&out)?;
    println!("convergence study written to {}", out.display());
    Ok(())
}

fn cmd_verify(
    common: &Common,
    n: Option<usize>,
    report: Option<PathBuf>,
    inject_area_fault: bool,
) -> CliResult<i32> {
    let cfg = load_config(common)?;
    // verify runs a fixed weight pair; a g flag is not meaningful here
    if common.g.is_some() {
        return config_err("verify runs a fixed suite; --g is not accepted");
    }
    let n = n.or(cfg.n).unwrap_or(512);
    if n < 128 || n % 4 != 0 {
        return config_err("n must be a multiple of 4 and at least 128");
    }
    let suite_cfg = SuiteConfig {
        n,
        area_fault_scale: if inject_area_fault { 1.01 } else { 1.0 },
        ..SuiteConfig::default()
    };
    println!("scale: {}", acsf::suite::describe_scale(&suite_cfg));
    let results = run_full_suite(suite_cfg)?;
    for r in &results {
        println!("{}", r.line());
    }
    if let Some(path) = report {
        let text = serde_json::to_string_pretty(&results)
            .map_err(|e| CliError::Config(format!("report: {e}")))?;
        write_file(&path, &(text + "\n"))?;
    }
    Ok(if results.iter().all(|r| r.passed) {
        0
    } else {
        1
    })
}

fn run() -> CliResult<i32> {
    let cli = Cli::parse();
    match cli.command {
        Command::Width { common, psi } => cmd_width(&common, psi).map(|_| 0),
        Command::Sigma { common } => cmd_sigma(&common).map(|_| 0),
        Command::Translator {
            common,
            psi,
            speed,
            eps,
            n,
        } => cmd_translator(&common, psi, speed, eps, n).map(|_| 0),
        Command::Evolve {
            common,
            radius,
            center,
            n,
            times,
            safety,
        } => cmd_evolve(&common, radius, center, n, times, safety).map(|_| 0),
        Command::Ancient {
            common,
            r,
            n,
            times,
            eps,
            safety,
        } => cmd_ancient(&common, r, n, times, eps, safety).map(|_| 0),
        Command::Converge {
            common,
            r_list,
            n,
            times,
        } => cmd_converge(&common, r_list, n, times).map(|_| 0),
        Command::Verify {
            common,
            n,
            report,
            inject_area_fault,
        } => cmd_verify(&common, n, report, inject_area_fault),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(CliError::Domain(e)) => {
            eprintln!("{}: {e}", e.name());
            ExitCode::from(1)
        }
        Err(CliError::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
    }
}
