use crate::config::{Resolved, DEFAULT_SIGMA_FRACTION};
use crate::error::CliError;
use crate::output::{ensure_dir, sci, write_csv, write_json, write_text};
use qwalk_core::diagnostics::{convergence_study, density_overlay, ks_distance, ConvergenceReport};
use qwalk_core::initial::{DEFAULT_GRID_SIZE, DEFAULT_TAIL_TOL};
use qwalk_core::limit::{general_density, NormalizedWeight};
use qwalk_core::moments::{empirical_moment, kspace_moments, xspace_moment, MomentReport};
use qwalk_core::walk::evolve_in_place;
use qwalk_core::{
    synthesize_initial, CoinAngle, DensityKind, InitCoin, ProbabilityDistribution, SpectralContext,
    TiltedDensity, WeightKind, WeightSpec,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_4;
use std::path::PathBuf;
use std::time::Instant;

/// Points on the exported density grid.
pub const DENSITY_POINTS: usize = 2001;
/// The exported density grid covers `±DENSITY_SPAN·|c|`.
pub const DENSITY_SPAN: f64 = 0.999;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoinRecord {
    pub alpha: [f64; 2],
    pub beta: [f64; 2],
}

impl From<&InitCoin> for CoinRecord {
    fn from(c: &InitCoin) -> Self {
        CoinRecord {
            alpha: [c.alpha.re, c.alpha.im],
            beta: [c.beta.re, c.beta.im],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightRecord {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
}

impl From<&WeightSpec> for WeightRecord {
    fn from(w: &WeightSpec) -> Self {
        WeightRecord {
            kind: w.kind.name().to_string(),
            sigma: match w.kind {
                WeightKind::Gaussian { sigma } => Some(sigma),
                _ => None,
            },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulateSidecar<'a> {
    pub t: u64,
    pub theta: f64,
    pub coin: CoinRecord,
    pub weight: WeightRecord,
    #[serde(rename = "W_numeric")]
    pub w_numeric: f64,
    #[serde(rename = "X0")]
    pub x0: usize,
    pub deficit: f64,
    pub grid_size: usize,
    pub total_mass: f64,
    /// Seconds from the start of synthesis until this distribution was ready.
    pub wall_time: f64,
    pub config: &'a crate::config::ExperimentConfig,
}

fn distribution_rows(dist: &ProbabilityDistribution) -> impl Iterator<Item = Vec<String>> + '_ {
    dist.iter()
        .filter(|&(_, p)| p != 0.0)
        .map(|(x, p)| vec![x.to_string(), sci(p)])
}

/// Walk distribution for every `t`, as `simulate_t{t}.csv` plus a JSON sidecar.
pub fn simulate(r: &Resolved) -> Result<Vec<PathBuf>, CliError> {
    let cfg = &r.config;
    ensure_dir(&cfg.output_dir)?;
    let clock = Instant::now();
    let (mut state, report) = synthesize_initial(&r.weight, r.coin, cfg.grid_size, cfg.tail_tol)?;
    let mut files = Vec::new();
    for &t in &cfg.t_list {
        let steps = t - state.time;
        evolve_in_place(&mut state, r.theta, steps);
        let dist = state.distribution();
        let stem = cfg.output_dir.join(format!("simulate_t{t}"));
        files.push(write_csv(
            &stem.with_extension("csv"),
            &["x", "prob"],
            distribution_rows(&dist),
        )?);
        let sidecar = SimulateSidecar {
            t,
            theta: r.theta.radians(),
            coin: CoinRecord::from(&r.coin),
            weight: WeightRecord::from(&r.weight),
            w_numeric: report.weight_norm,
            x0: report.cutoff,
            deficit: report.deficit,
            grid_size: report.grid_size,
            total_mass: dist.total(),
            wall_time: clock.elapsed().as_secs_f64(),
            config: cfg,
        };
        files.push(write_json(&stem.with_extension("json"), &sidecar)?);
    }
    Ok(files)
}

#[derive(Debug, Clone, Serialize)]
pub struct DensitySidecar<'a> {
    pub theta: f64,
    pub coin: CoinRecord,
    pub weight: WeightRecord,
    pub lambda: f64,
    pub points: usize,
    pub span: [f64; 2],
    /// Largest `|closed form − general density|` over the grid; absent
    /// for tabulated weights.
    pub max_abs_diff: Option<f64>,
    /// Trapezoid rule over the exported grid.
    pub trapezoid_mass: f64,
    /// Exact mass of the limit law outside the exported grid.
    pub tail_mass: f64,
    pub config: &'a crate::config::ExperimentConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityCurve {
    pub xs: Vec<f64>,
    pub limit: Vec<f64>,
    /// General density evaluated from the normalized weight.
    pub general: Vec<f64>,
    /// Closed form, for built-in seeds only.
    pub closed_form: Option<Vec<f64>>,
}

impl DensityCurve {
    pub fn max_abs_diff(&self) -> Option<f64> {
        self.closed_form.as_ref().map(|cf| {
            cf.iter()
                .zip(&self.general)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
    }

    pub fn trapezoid(&self) -> f64 {
        self.xs
            .windows(2)
            .zip(self.limit.windows(2))
            .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
            .sum()
    }
}

/// Evaluates the limit density on the export grid both ways.
pub fn density_curve(
    weight: &WeightSpec,
    ctx: SpectralContext,
    coin: InitCoin,
    grid_size: usize,
) -> Result<(TiltedDensity, DensityCurve), CliError> {
    let general = NormalizedWeight::new(weight.clone(), grid_size)?;
    let closed = match DensityKind::closed_form_for(&weight.kind) {
        Some(kind) if weight.theta == ctx.theta() => Some(TiltedDensity::new(kind, ctx, coin)?),
        _ => None,
    };
    let a = DENSITY_SPAN * ctx.half_width();
    let xs: Vec<f64> = (0..DENSITY_POINTS)
        .map(|i| -a + 2.0 * a * i as f64 / (DENSITY_POINTS - 1) as f64)
        .collect();
    let general_curve = xs
        .iter()
        .map(|&x| general_density(&general, &ctx, &coin, x))
        .collect::<Result<Vec<_>, _>>()?;
    let closed_form = closed
        .as_ref()
        .map(|d| xs.iter().map(|&x| d.density(x)).collect::<Result<Vec<_>, _>>())
        .transpose()?;
    let limit = closed_form.clone().unwrap_or_else(|| general_curve.clone());
    let density = match closed {
        Some(d) => d,
        None => TiltedDensity::new(DensityKind::General(general), ctx, coin)?,
    };
    Ok((
        density,
        DensityCurve {
            xs,
            limit,
            general: general_curve,
            closed_form,
        },
    ))
}

/// Limit density on a 2001-point grid, as `density.csv` plus `density.json`.
pub fn density(r: &Resolved) -> Result<Vec<PathBuf>, CliError> {
    let cfg = &r.config;
    ensure_dir(&cfg.output_dir)?;
    let ctx = SpectralContext::new(r.theta)?;
    let (law, curve) = density_curve(&r.weight, ctx, r.coin, cfg.grid_size)?;

    let mut header = vec!["x", "limit_density", "general"];
    if curve.closed_form.is_some() {
        header.push("closed_form");
    }
    let rows = (0..curve.xs.len()).map(|i| {
        let mut row = vec![sci(curve.xs[i]), sci(curve.limit[i]), sci(curve.general[i])];
        if let Some(cf) = &curve.closed_form {
            row.push(sci(cf[i]));
        }
        row
    });
    let csv = write_csv(&cfg.output_dir.join("density.csv"), &header, rows)?;

    let (lo, hi) = (curve.xs[0], curve.xs[curve.xs.len() - 1]);
    let sidecar = DensitySidecar {
        theta: r.theta.radians(),
        coin: CoinRecord::from(&r.coin),
        weight: WeightRecord::from(&r.weight),
        lambda: law.lambda(),
        points: curve.xs.len(),
        span: [lo, hi],
        max_abs_diff: curve.max_abs_diff(),
        trapezoid_mass: curve.trapezoid(),
        tail_mass: law.cdf(lo) + (1.0 - law.cdf(hi)),
        config: cfg,
    };
    let json = write_json(&cfg.output_dir.join("density.json"), &sidecar)?;
    Ok(vec![csv, json])
}

/// Simulated, x-space and k-space moments for every `(t, r)`.
pub fn moment_table(r: &Resolved) -> Result<Vec<MomentReport>, CliError> {
    let cfg = &r.config;
    let ctx = SpectralContext::new(r.theta)?;
    let law = TiltedDensity::for_weight(&r.weight, ctx, r.coin, cfg.grid_size)?;
    let f = NormalizedWeight::new(r.weight.clone(), cfg.grid_size)?;
    let kspace = kspace_moments(&f, &ctx, &r.coin, &cfg.r_list, cfg.grid_size)?;
    let xspace = cfg
        .r_list
        .iter()
        .map(|&order| xspace_moment(&law, order))
        .collect::<Result<Vec<_>, _>>()?;

    let (mut state, _) = synthesize_initial(&r.weight, r.coin, cfg.grid_size, cfg.tail_tol)?;
    let mut rows = Vec::new();
    for &t in &cfg.t_list {
        let steps = t - state.time;
        evolve_in_place(&mut state, r.theta, steps);
        let dist = state.distribution();
        for (i, &order) in cfg.r_list.iter().enumerate() {
            let sim = empirical_moment(&dist, order)?;
            rows.push(MomentReport::new(order, t, sim, xspace[i], kspace[i]));
        }
    }
    Ok(rows)
}

pub fn moments(r: &Resolved) -> Result<Vec<PathBuf>, CliError> {
    let cfg = &r.config;
    ensure_dir(&cfg.output_dir)?;
    let rows = moment_table(r)?;
    let csv = write_csv(
        &cfg.output_dir.join("moments.csv"),
        &[
            "t",
            "r",
            "simulated",
            "xspace",
            "kspace",
            "diff_sim_xspace",
            "diff_sim_kspace",
            "diff_xspace_kspace",
        ],
        rows.iter().map(|m| {
            vec![
                m.t.to_string(),
                m.order.to_string(),
                sci(m.simulated),
                sci(m.xspace),
                sci(m.kspace),
                sci(m.diff_sim_xspace),
                sci(m.diff_sim_kspace),
                sci(m.diff_xspace_kspace),
            ]
        }),
    )?;
    let json = write_json(
        &cfg.output_dir.join("moments.json"),
        &serde_json::json!({ "rows": rows, "config": cfg }),
    )?;
    Ok(vec![csv, json])
}

pub fn convergence_report(r: &Resolved) -> Result<ConvergenceReport, CliError> {
    let cfg = &r.config;
    let ctx = SpectralContext::new(r.theta)?;
    let law = TiltedDensity::for_weight(&r.weight, ctx, r.coin, cfg.grid_size)?;
    let (state, _) = synthesize_initial(&r.weight, r.coin, cfg.grid_size, cfg.tail_tol)?;
    Ok(convergence_study(&state, r.theta, &law, &cfg.t_list, &cfg.r_list)?)
}

/// KS distance and moment errors per `t`, with the fitted error decay.
pub fn convergence(r: &Resolved) -> Result<Vec<PathBuf>, CliError> {
    let cfg = &r.config;
    ensure_dir(&cfg.output_dir)?;
    let report = convergence_report(r)?;

    let err_names: Vec<String> = cfg.r_list.iter().map(|r| format!("err_r{r}")).collect();
    let mut header = vec!["t", "ks"];
    header.extend(err_names.iter().map(String::as_str));
    let per_t = cfg.r_list.len();
    let rows = report.t_values.iter().enumerate().map(|(i, t)| {
        let mut row = vec![t.to_string(), sci(report.ks[i])];
        row.extend(
            report.moment_errors[i * per_t..(i + 1) * per_t]
                .iter()
                .map(|m| sci(m.error)),
        );
        row
    });
    let csv = write_csv(&cfg.output_dir.join("convergence.csv"), &header, rows)?;
    let json = write_json(
        &cfg.output_dir.join("convergence.json"),
        &serde_json::json!({ "report": report, "config": cfg }),
    )?;
    Ok(vec![csv, json])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Figure1Options {
    pub theta: f64,
    pub t: u64,
    pub grid_size: usize,
    /// Gaussian seed width; `0.25·|cos θ|` when absent.
    pub sigma: Option<f64>,
    pub tail_tol: f64,
    /// Histogram bin width in units of `x/t`; `2/t` when absent.
    pub bin_width: Option<f64>,
    pub output_dir: PathBuf,
}

impl Default for Figure1Options {
    fn default() -> Self {
        Figure1Options {
            theta: FRAC_PI_4,
            t: 5000,
            grid_size: DEFAULT_GRID_SIZE,
            sigma: None,
            tail_tol: DEFAULT_TAIL_TOL,
            bin_width: None,
            output_dir: PathBuf::from("out"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Figure1Panel {
    pub law: String,
    pub file: String,
    pub ks: f64,
    #[serde(rename = "X0")]
    pub x0: usize,
    pub deficit: f64,
    #[serde(rename = "W_numeric")]
    pub w_numeric: f64,
    pub overlay_integral: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Figure1Summary {
    pub theta: f64,
    pub t: u64,
    pub coin: CoinRecord,
    pub sigma: f64,
    pub grid_size: usize,
    pub tail_tol: f64,
    pub bin_width: f64,
    pub panels: Vec<Figure1Panel>,
    pub options: Figure1Options,
}

/// Four overlays of `ℙ(X_t/t = x)` against the limit densities of the
/// semicircle, arcsine, Gaussian and uniform seeds, a JSON sidecar and a
/// gnuplot script. The coin is fixed to `(1/√2, i/√2)`.
pub fn figure1(opts: &Figure1Options) -> Result<(Figure1Summary, Vec<PathBuf>), CliError> {
    if opts.t == 0 {
        return Err(CliError::Config("figure1 needs t >= 1".into()));
    }
    let theta = CoinAngle(opts.theta);
    let ctx = SpectralContext::new(theta)?;
    let sigma = opts.sigma.unwrap_or(DEFAULT_SIGMA_FRACTION * ctx.half_width());
    let bin_width = opts.bin_width.unwrap_or(2.0 / opts.t as f64);
    let coin = InitCoin::symmetric();
    let kinds = [
        WeightKind::Semicircle,
        WeightKind::Arcsine,
        WeightKind::Gaussian { sigma },
        WeightKind::Uniform,
    ];
    let specs = kinds
        .into_iter()
        .map(|k| WeightSpec::new(k, theta))
        .collect::<Result<Vec<_>, _>>()?;
    ensure_dir(&opts.output_dir)?;

    let results: Vec<Result<(Figure1Panel, PathBuf), CliError>> = specs
        .par_iter()
        .map(|spec| figure1_panel(spec, ctx, coin, opts, bin_width))
        .collect();
    let mut panels = Vec::new();
    let mut files = Vec::new();
    for r in results {
        let (panel, file) = r?;
        panels.push(panel);
        files.push(file);
    }
    let summary = Figure1Summary {
        theta: opts.theta,
        t: opts.t,
        coin: CoinRecord::from(&coin),
        sigma,
        grid_size: opts.grid_size,
        tail_tol: opts.tail_tol,
        bin_width,
        panels,
        options: Figure1Options {
            sigma: Some(sigma),
            bin_width: Some(bin_width),
            ..opts.clone()
        },
    };
    files.push(write_json(&opts.output_dir.join("figure1.json"), &summary)?);
    files.push(write_text(
        &opts.output_dir.join("figure1.gp"),
        &gnuplot_script(&summary),
    )?);
    Ok((summary, files))
}

fn figure1_panel(
    spec: &WeightSpec,
    ctx: SpectralContext,
    coin: InitCoin,
    opts: &Figure1Options,
    bin_width: f64,
) -> Result<(Figure1Panel, PathBuf), CliError> {
    let (mut state, report) = synthesize_initial(spec, coin, opts.grid_size, opts.tail_tol)?;
    evolve_in_place(&mut state, ctx.theta(), opts.t);
    let dist = state.distribution();
    let law = TiltedDensity::for_weight(spec, ctx, coin, opts.grid_size)?;
    let overlay = density_overlay(&dist, &law, bin_width)?;
    let name = spec.kind.name();
    let file = format!("figure1_{name}.csv");
    let path = write_csv(
        &opts.output_dir.join(&file),
        &["x", "simulated", "limit"],
        overlay
            .rows
            .iter()
            .map(|row| vec![sci(row.x), sci(row.simulated), sci(row.limit)]),
    )?;
    let panel = Figure1Panel {
        law: name.to_string(),
        file,
        ks: ks_distance(&dist, &law)?,
        x0: report.cutoff,
        deficit: report.deficit,
        w_numeric: report.weight_norm,
        overlay_integral: overlay.integral(),
    };
    Ok((panel, path))
}

fn gnuplot_script(s: &Figure1Summary) -> String {
    let mut out = String::new();
    out.push_str("# gnuplot figure1.gp  (run inside the output directory)\n");
    out.push_str("set terminal pngcairo size 1200,900\n");
    out.push_str("set output 'figure1.png'\n");
    out.push_str("set datafile separator comma\n");
    out.push_str("set multiplot layout 2,2\n");
    out.push_str("set xlabel 'x'\n");
    out.push_str("set ylabel 'density'\n");
    for p in &s.panels {
        out.push_str(&format!(
            "set title '{} seed, t = {}, theta = {:.6}, KS = {:.2e}'\n",
            p.law, s.t, s.theta, p.ks
        ));
        out.push_str(&format!(
            "plot '{f}' every ::1 using 1:2 with lines lc rgb 'blue' title 'P(X_t/t = x)', \\\n     '{f}' every ::1 using 1:3 with lines lc rgb 'red' title 'limit density'\n",
            f = p.file
        ));
    }
    out.push_str("unset multiplot\n");
    out
}

