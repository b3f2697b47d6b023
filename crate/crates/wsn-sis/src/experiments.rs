//! Figure-level experiments: temporal comparison of the two engines,
//! equilibrium sweeps over beta, and threshold detection over gamma and
//! u/v grids.
//!
//! Every experiment is deterministic given its inputs. Ensemble seeds are
//! derived from a per-experiment base seed through the same SplitMix64
//! chain the ensemble runner uses, so sweep points are independent of
//! execution order and reruns are byte-identical.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::mmc::{
    self, FractionSeries, Fractions, MmcState, ModelParams,
};
use crate::montecarlo::{
    derive_run_seed, run_ensemble, EnsembleSeries, InitActivity, RunConfig,
};

/// Which engine produced a sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineTag {
    Mmc,
    Mc,
}

impl std::fmt::Display for EngineTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EngineTag::Mmc => "mmc",
            EngineTag::Mc => "mc",
        })
    }
}

/// Equilibrium fractions at one parameter point.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub params: ModelParams,
    pub rho: Fractions,
    pub source: EngineTag,
}

/// Theoretical threshold (Eq. 17) next to the detected simulation one;
/// `beta_c_sim = None` means no grid point exceeded `detection_eps`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdEstimate {
    pub beta_c_theory: f64,
    pub beta_c_sim: Option<f64>,
    pub detection_eps: f64,
}

/// Knobs shared by all sweeps. Defaults mirror the reference setup:
/// 1000-step horizon, 50-run ensembles, 10 infected seeds, stationary
/// sleep split at t=0.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub steps: usize,
    pub runs: usize,
    pub seed_count: usize,
    pub base_seed: u64,
    pub init_active: InitActivity,
    pub eq_tol: f64,
    pub eq_max_iter: usize,
    /// Infected-fraction cutoff separating die-out from persistence.
    pub detection_eps: f64,
    /// Half-width of the beta grid centered on the theoretical threshold.
    pub detection_window: f64,
    pub detection_step: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            steps: 1000,
            runs: 50,
            seed_count: 10,
            base_seed: 1,
            init_active: InitActivity::Stationary,
            eq_tol: 1e-10,
            eq_max_iter: 1_000_000,
            detection_eps: 0.005,
            detection_window: 0.04,
            detection_step: 0.005,
        }
    }
}

impl SweepConfig {
    fn run_config(&self, params: ModelParams) -> RunConfig {
        RunConfig {
            params,
            steps: self.steps,
            seed_count: self.seed_count,
            rng_seed: 0, // replaced per ensemble member
            init_active: self.init_active,
        }
    }
}

/// MMC initial state matched to what [`init_population`] draws in
/// expectation: infected mass `seed_count/n`, activity per the configured
/// split.
///
/// [`init_population`]: crate::montecarlo::init_population
pub fn matched_mmc_init(n: usize, cfg: &RunConfig) -> Result<MmcState> {
    let p_active = match cfg.init_active {
        InitActivity::Stationary => cfg.params.stationary_active_fraction(),
        InitActivity::AllActive => 1.0,
    };
    MmcState::from_occupancy(n, cfg.seed_count as f64 / n as f64, p_active)
}

/// Run both engines from matched initial conditions over the same
/// horizon; rows align on t (the MMC side records every step, no early
/// settling).
pub fn temporal_experiment(
    g: &Graph,
    cfg: &RunConfig,
    runs: usize,
    base_seed: u64,
) -> Result<(FractionSeries, EnsembleSeries)> {
    let init = matched_mmc_init(g.node_count(), cfg)?;
    let theory = mmc::run_mmc(g, &cfg.params, &init, cfg.steps, 0.0);
    let sim = run_ensemble(g, cfg, runs, base_seed)?;
    Ok((theory, sim))
}

fn tail_window(rows: usize) -> usize {
    rows.div_ceil(4)
}

/// Equilibrium fractions at every beta in `beta_grid`, from both engines:
/// the MMC fixed point (Eq. 9) and the mean of the last quarter of an
/// ensemble-averaged run. Output holds the MMC point then the MC point
/// for each beta, in grid order. Point i's ensemble is seeded from
/// `derive_run_seed(cfg.base_seed, i)`.
pub fn sweep_beta(
    g: &Graph,
    gamma: f64,
    u: f64,
    v: f64,
    beta_grid: &[f64],
    cfg: &SweepConfig,
) -> Result<Vec<SweepPoint>> {
    assert!(!beta_grid.is_empty(), "beta grid must be nonempty");
    let pairs: Vec<[SweepPoint; 2]> = beta_grid
        .par_iter()
        .enumerate()
        .map(|(i, &beta)| -> Result<[SweepPoint; 2]> {
            let params = ModelParams::new(beta, gamma, u, v)?;
            let eq = mmc::solve_equilibrium(g, &params, cfg.eq_tol, cfg.eq_max_iter)?;
            let mmc_point = SweepPoint {
                params,
                rho: mmc::state_fractions(&eq),
                source: EngineTag::Mmc,
            };
            let ens = run_ensemble(
                g,
                &cfg.run_config(params),
                cfg.runs,
                derive_run_seed(cfg.base_seed, i as u64),
            )?;
            let mc_point = SweepPoint {
                params,
                rho: ens.mean.tail_mean(tail_window(ens.mean.rows.len())),
                source: EngineTag::Mc,
            };
            Ok([mmc_point, mc_point])
        })
        .collect::<Result<_>>()?;
    Ok(pairs.into_iter().flatten().collect())
}

/// Smallest grid beta whose equilibrium infected fraction exceeds
/// `detection_eps` (over all supplied points, whichever engine produced
/// them), next to the Eq. (17) value. Gamma, u, v are read off the first
/// point.
pub fn detect_threshold(
    points: &[SweepPoint],
    lambda_max: f64,
    detection_eps: f64,
) -> Result<ThresholdEstimate> {
    assert!(!points.is_empty(), "need at least one sweep point");
    assert!(detection_eps > 0.0, "detection_eps must be positive");
    let p0 = points[0].params;
    let beta_c_theory = mmc::epidemic_threshold(lambda_max, p0.gamma(), p0.u(), p0.v())?;
    let beta_c_sim = points
        .iter()
        .filter(|p| p.rho.infected() > detection_eps)
        .map(|p| p.params.beta())
        .fold(None, |best: Option<f64>, b| {
            Some(best.map_or(b, |x| x.min(b)))
        });
    Ok(ThresholdEstimate {
        beta_c_theory,
        beta_c_sim,
        detection_eps,
    })
}

/// Beta grid centered on `center`: `center + k*step` for
/// `|k*step| <= window`, clamped to [0, 1], deduplicated.
pub fn detection_grid(center: f64, window: f64, step: f64) -> Vec<f64> {
    let k = (window / step).round() as i64;
    let mut grid: Vec<f64> = (-k..=k)
        .map(|i| (center + step * i as f64).clamp(0.0, 1.0))
        .collect();
    grid.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    grid
}

/// One row of the gamma sweep (Fig. 4 data).
#[derive(Debug, Clone, PartialEq)]
pub struct GammaPoint {
    pub gamma: f64,
    pub u: f64,
    pub v: f64,
    pub beta_c_theory: f64,
    pub beta_c_sim: Option<f64>,
}

/// One row of the u/v sweep (Fig. 5 data).
#[derive(Debug, Clone, PartialEq)]
pub struct RatioPoint {
    pub u: f64,
    pub v: f64,
    pub ratio: f64,
    pub beta_c_theory: f64,
    pub beta_c_sim: Option<f64>,
}

fn threshold_at(
    g: &Graph,
    lambda_max: f64,
    gamma: f64,
    u: f64,
    v: f64,
    combo_seed: u64,
    cfg: &SweepConfig,
) -> Result<ThresholdEstimate> {
    let beta_c = mmc::epidemic_threshold(lambda_max, gamma, u, v)?;
    let grid = detection_grid(beta_c, cfg.detection_window, cfg.detection_step);
    let mut inner = cfg.clone();
    inner.base_seed = combo_seed;
    let points = sweep_beta(g, gamma, u, v, &grid, &inner)?;
    detect_threshold(&points, lambda_max, cfg.detection_eps)
}

/// Threshold table over `gamma_grid` for each `(u, v)` schedule, via an
/// inner beta sweep around the theoretical value per combination.
/// Combination i (schedule-major order) seeds its inner sweep from
/// `derive_run_seed(cfg.base_seed, i)`.
pub fn sweep_gamma(
    g: &Graph,
    gamma_grid: &[f64],
    schedules: &[(f64, f64)],
    cfg: &SweepConfig,
) -> Result<Vec<GammaPoint>> {
    assert!(
        !gamma_grid.is_empty() && !schedules.is_empty(),
        "grids must be nonempty"
    );
    let lambda_max = g.largest_eigenvalue(1e-10, 1_000_000)?.lambda_max;
    let mut out = Vec::with_capacity(gamma_grid.len() * schedules.len());
    let mut combo = 0u64;
    for &(u, v) in schedules {
        for &gamma in gamma_grid {
            let est = threshold_at(
                g,
                lambda_max,
                gamma,
                u,
                v,
                derive_run_seed(cfg.base_seed, combo),
                cfg,
            )?;
            out.push(GammaPoint {
                gamma,
                u,
                v,
                beta_c_theory: est.beta_c_theory,
                beta_c_sim: est.beta_c_sim,
            });
            combo += 1;
        }
    }
    Ok(out)
}

/// Threshold table over the Cartesian `u_grid` x `v_grid` at fixed gamma,
/// keyed by the ratio u/v. Seeding as in [`sweep_gamma`], u-major order.
pub fn sweep_ratio(
    g: &Graph,
    gamma: f64,
    u_grid: &[f64],
    v_grid: &[f64],
    cfg: &SweepConfig,
) -> Result<Vec<RatioPoint>> {
    assert!(
        !u_grid.is_empty() && !v_grid.is_empty(),
        "grids must be nonempty"
    );
    let lambda_max = g.largest_eigenvalue(1e-10, 1_000_000)?.lambda_max;
    let mut out = Vec::with_capacity(u_grid.len() * v_grid.len());
    let mut combo = 0u64;
    for &u in u_grid {
        for &v in v_grid {
            let est = threshold_at(
                g,
                lambda_max,
                gamma,
                u,
                v,
                derive_run_seed(cfg.base_seed, combo),
                cfg,
            )?;
            out.push(RatioPoint {
                u,
                v,
                ratio: u / v,
                beta_c_theory: est.beta_c_theory,
                beta_c_sim: est.beta_c_sim,
            });
            combo += 1;
        }
    }
    Ok(out)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(BufWriter::new(file))
}

fn io_at<T>(path: &Path, r: std::io::Result<T>) -> Result<T> {
    r.map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Both temporal curves aligned on t (Fig. 2 data).
pub fn write_fig2_csv(path: &Path, theory: &FractionSeries, sim: &EnsembleSeries) -> Result<()> {
    assert_eq!(
        theory.rows.len(),
        sim.mean.rows.len(),
        "series must share the horizon"
    );
    let mut w = create(path)?;
    io_at(path, writeln!(
        w,
        "t,mmc_rho_US,mmc_rho_AS,mmc_rho_UI,mmc_rho_AI,\
         mc_rho_US,mc_rho_AS,mc_rho_UI,mc_rho_AI,\
         mc_sd_US,mc_sd_AS,mc_sd_UI,mc_sd_AI"
    ))?;
    for (((t, th), (_, mc)), sd) in theory.rows.iter().zip(&sim.mean.rows).zip(&sim.sd) {
        io_at(path, writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            t,
            th.rho_us, th.rho_as, th.rho_ui, th.rho_ai,
            mc.rho_us, mc.rho_as, mc.rho_ui, mc.rho_ai,
            sd[0], sd[1], sd[2], sd[3]
        ))?;
    }
    io_at(path, w.flush())
}

/// Equilibrium-vs-beta table from both engines (Fig. 3 data).
pub fn write_fig3_csv(path: &Path, points: &[SweepPoint]) -> Result<()> {
    let mut w = create(path)?;
    io_at(path, writeln!(w, "beta,source,rho_US,rho_AS,rho_UI,rho_AI"))?;
    for p in points {
        io_at(path, writeln!(
            w,
            "{},{},{},{},{},{}",
            p.params.beta(),
            p.source,
            p.rho.rho_us,
            p.rho.rho_as,
            p.rho.rho_ui,
            p.rho.rho_ai
        ))?;
    }
    io_at(path, w.flush())
}

/// Threshold-vs-gamma table (Fig. 4 data); an absent simulation value
/// (not observed in the grid) leaves the field empty.
pub fn write_fig4_csv(path: &Path, rows: &[GammaPoint]) -> Result<()> {
    let mut w = create(path)?;
    io_at(path, writeln!(w, "gamma,u,v,beta_c_theory,beta_c_sim"))?;
    for r in rows {
        io_at(path, writeln!(
            w,
            "{},{},{},{},{}",
            r.gamma,
            r.u,
            r.v,
            r.beta_c_theory,
            fmt_opt(r.beta_c_sim)
        ))?;
    }
    io_at(path, w.flush())
}

/// Threshold-vs-ratio table (Fig. 5 data).
pub fn write_fig5_csv(path: &Path, rows: &[RatioPoint]) -> Result<()> {
    let mut w = create(path)?;
    io_at(path, writeln!(w, "u,v,ratio,beta_c_theory,beta_c_sim"))?;
    for r in rows {
        io_at(path, writeln!(
            w,
            "{},{},{},{},{}",
            r.u,
            r.v,
            r.ratio,
            r.beta_c_theory,
            fmt_opt(r.beta_c_sim)
        ))?;
    }
    io_at(path, w.flush())
}

/// Single-row threshold report.
pub fn write_threshold_csv(
    path: &Path,
    lambda_max: f64,
    gamma: f64,
    u: f64,
    v: f64,
    est: &ThresholdEstimate,
) -> Result<()> {
    let mut w = create(path)?;
    io_at(path, writeln!(
        w,
        "lambda_max,gamma,u,v,beta_c_theory,beta_c_sim,detection_eps"
    ))?;
    io_at(path, writeln!(
        w,
        "{},{},{},{},{},{},{}",
        lambda_max,
        gamma,
        u,
        v,
        est.beta_c_theory,
        fmt_opt(est.beta_c_sim),
        est.detection_eps
    ))?;
    io_at(path, w.flush())
}

/// Plain-text `key = value` sidecar describing how an artifact was
/// produced. A `version` line is always written first; nothing in the
/// file depends on wall-clock time, so reruns are byte-identical.
pub fn write_metadata(path: &Path, entries: &[(&str, String)]) -> Result<()> {
    let mut w = create(path)?;
    io_at(path, writeln!(w, "version = {}", env!("CARGO_PKG_VERSION")))?;
    for (key, value) in entries {
        io_at(path, writeln!(w, "{} = {}", key, value))?;
    }
    io_at(path, w.flush())
}
