//! Command-line front end: `key = value` config files, flag overrides,
//! and dispatch to the library experiments.
//!
//! Config documents are plain text: one `key = value` per line, optional
//! `[section]` headers (cosmetic grouping; keys are global), `#` comment
//! lines. CLI flags override file values, file values override built-in
//! defaults. Unknown keys are hard errors naming the key and line.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Parser;

use crate::error::{Error, Result};
use crate::experiments::{
    self, detection_grid, SweepConfig,
};
use crate::graph::Graph;
use crate::mmc::{self, ModelParams};
use crate::montecarlo::{run_ensemble, InitActivity, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    GenerateGraph,
    RunMmc,
    RunMc,
    Temporal,
    SweepBeta,
    SweepGamma,
    SweepRatio,
    Threshold,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::GenerateGraph,
        Command::RunMmc,
        Command::RunMc,
        Command::Temporal,
        Command::SweepBeta,
        Command::SweepGamma,
        Command::SweepRatio,
        Command::Threshold,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Command::GenerateGraph => "generate-graph",
            Command::RunMmc => "run-mmc",
            Command::RunMc => "run-mc",
            Command::Temporal => "temporal",
            Command::SweepBeta => "sweep-beta",
            Command::SweepGamma => "sweep-gamma",
            Command::SweepRatio => "sweep-ratio",
            Command::Threshold => "threshold",
        }
    }

    fn parse(s: &str) -> Option<Command> {
        Command::ALL.iter().copied().find(|c| c.as_str() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GraphSource {
    Generated { n: usize, m: usize, seed: u64 },
    EdgeList(PathBuf),
}

/// Fully resolved experiment description; every field has a value after
/// parsing (built-in defaults fill the gaps).
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub command: Command,
    pub graph: GraphSource,
    pub params: ModelParams,
    pub steps: usize,
    pub runs: usize,
    pub seed_count: usize,
    pub sim_seed: u64,
    pub init_active: InitActivity,
    pub out_dir: PathBuf,
}

fn init_activity_str(i: InitActivity) -> &'static str {
    match i {
        InitActivity::Stationary => "stationary",
        InitActivity::AllActive => "all_active",
    }
}

impl ExperimentSpec {
    /// Render back to config text that [`parse_config`] accepts and that
    /// reproduces this spec exactly.
    pub fn to_config_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "command = {}", self.command.as_str());
        let _ = writeln!(s, "out = {}", self.out_dir.display());
        match &self.graph {
            GraphSource::Generated { n, m, seed } => {
                let _ = writeln!(s, "n = {}", n);
                let _ = writeln!(s, "m = {}", m);
                let _ = writeln!(s, "graph_seed = {}", seed);
            }
            GraphSource::EdgeList(path) => {
                let _ = writeln!(s, "edge_list = {}", path.display());
            }
        }
        let _ = writeln!(s, "beta = {}", self.params.beta());
        let _ = writeln!(s, "gamma = {}", self.params.gamma());
        let _ = writeln!(s, "u = {}", self.params.u());
        let _ = writeln!(s, "v = {}", self.params.v());
        let _ = writeln!(s, "steps = {}", self.steps);
        let _ = writeln!(s, "runs = {}", self.runs);
        let _ = writeln!(s, "seeds = {}", self.seed_count);
        let _ = writeln!(s, "sim_seed = {}", self.sim_seed);
        let _ = writeln!(s, "init_active = {}", init_activity_str(self.init_active));
        s
    }

    fn run_config(&self) -> RunConfig {
        RunConfig {
            params: self.params,
            steps: self.steps,
            seed_count: self.seed_count,
            rng_seed: self.sim_seed,
            init_active: self.init_active,
        }
    }

    fn sweep_config(&self) -> SweepConfig {
        SweepConfig {
            steps: self.steps,
            runs: self.runs,
            seed_count: self.seed_count,
            base_seed: self.sim_seed,
            init_active: self.init_active,
            ..SweepConfig::default()
        }
    }
}

/// Where a raw value came from, for error messages.
#[derive(Debug, Clone, Copy)]
enum Origin {
    File(usize),
    Flag,
}

impl std::fmt::Display for Origin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Origin::File(line) => write!(f, "line {}", line),
            Origin::Flag => write!(f, "flag"),
        }
    }
}

type Raw = Option<(String, Origin)>;

/// Accumulates raw key values from file and flags before type checking.
#[derive(Debug, Default)]
struct Draft {
    command: Raw,
    out: Raw,
    n: Raw,
    m: Raw,
    graph_seed: Raw,
    edge_list: Raw,
    beta: Raw,
    gamma: Raw,
    u: Raw,
    v: Raw,
    steps: Raw,
    runs: Raw,
    seeds: Raw,
    sim_seed: Raw,
    init_active: Raw,
}

impl Draft {
    fn slot(&mut self, key: &str) -> Option<&mut Raw> {
        match key {
            "command" => Some(&mut self.command),
            "out" => Some(&mut self.out),
            "n" => Some(&mut self.n),
            "m" => Some(&mut self.m),
            "graph_seed" => Some(&mut self.graph_seed),
            "edge_list" => Some(&mut self.edge_list),
            "beta" => Some(&mut self.beta),
            "gamma" => Some(&mut self.gamma),
            "u" => Some(&mut self.u),
            "v" => Some(&mut self.v),
            "steps" => Some(&mut self.steps),
            "runs" => Some(&mut self.runs),
            "seeds" => Some(&mut self.seeds),
            "sim_seed" => Some(&mut self.sim_seed),
            "init_active" => Some(&mut self.init_active),
            _ => None,
        }
    }

    fn set(&mut self, key: &str, value: String, origin: Origin) -> Result<()> {
        match self.slot(key) {
            Some(slot) => {
                *slot = Some((value, origin));
                Ok(())
            }
            None => Err(Error::Config(format!("{}: unknown key '{}'", origin, key))),
        }
    }

    fn read_text(&mut self, text: &str) -> Result<()> {
        for (idx, raw_line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw_line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if line.starts_with('[') {
                if line.ends_with(']') && line.len() > 2 {
                    continue;
                }
                return Err(Error::Config(format!(
                    "line {}: malformed section header '{}'",
                    lineno, line
                )));
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "line {}: expected 'key = value', got '{}'",
                    lineno, line
                )));
            };
            self.set(key.trim(), value.trim().to_string(), Origin::File(lineno))?;
        }
        Ok(())
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, raw: &Raw) -> Result<Option<T>> {
    match raw {
        None => Ok(None),
        Some((value, origin)) => value.parse().map(Some).map_err(|_| {
            Error::Config(format!(
                "{}: {} = {} is not a valid {}",
                origin,
                key,
                value,
                std::any::type_name::<T>()
            ))
        }),
    }
}

fn parse_prob(key: &str, raw: &Raw, default: f64) -> Result<f64> {
    match parse_num::<f64>(key, raw)? {
        None => Ok(default),
        Some(x) => {
            if (0.0..=1.0).contains(&x) {
                Ok(x)
            } else {
                let (value, origin) = raw.as_ref().unwrap();
                Err(Error::Config(format!(
                    "{}: {} = {} is out of range [0, 1]",
                    origin, key, value
                )))
            }
        }
    }
}

fn finalize(draft: Draft) -> Result<ExperimentSpec> {
    let command = match &draft.command {
        None => {
            return Err(Error::Config(
                "missing required key 'command' (or positional COMMAND)".into(),
            ))
        }
        Some((value, origin)) => Command::parse(value).ok_or_else(|| {
            let names: Vec<&str> = Command::ALL.iter().map(|c| c.as_str()).collect();
            Error::Config(format!(
                "{}: unknown command '{}' (expected one of: {})",
                origin,
                value,
                names.join(", ")
            ))
        })?,
    };

    let graph = match &draft.edge_list {
        Some((path, origin)) => {
            for (key, raw) in [
                ("n", &draft.n),
                ("m", &draft.m),
                ("graph_seed", &draft.graph_seed),
            ] {
                if raw.is_some() {
                    return Err(Error::Config(format!(
                        "{}: edge_list conflicts with '{}'; a loaded graph takes no generator parameters",
                        origin, key
                    )));
                }
            }
            let path = PathBuf::from(path);
            if !path.exists() {
                return Err(Error::Config(format!(
                    "{}: edge_list file '{}' does not exist",
                    origin,
                    path.display()
                )));
            }
            GraphSource::EdgeList(path)
        }
        None => GraphSource::Generated {
            n: parse_num("n", &draft.n)?.unwrap_or(1000),
            m: parse_num("m", &draft.m)?.unwrap_or(2),
            seed: parse_num("graph_seed", &draft.graph_seed)?.unwrap_or(9),
        },
    };

    let beta = parse_prob("beta", &draft.beta, 0.5)?;
    let gamma = parse_prob("gamma", &draft.gamma, 0.3)?;
    let u = parse_prob("u", &draft.u, 0.3)?;
    let v = parse_prob("v", &draft.v, 0.7)?;
    let params = ModelParams::new(beta, gamma, u, v)?;

    let init_active = match &draft.init_active {
        None => InitActivity::Stationary,
        Some((value, origin)) => match value.as_str() {
            "stationary" => InitActivity::Stationary,
            "all_active" => InitActivity::AllActive,
            other => {
                return Err(Error::Config(format!(
                    "{}: init_active = {} (expected 'stationary' or 'all_active')",
                    origin, other
                )))
            }
        },
    };

    Ok(ExperimentSpec {
        command,
        graph,
        params,
        steps: parse_num("steps", &draft.steps)?.unwrap_or(1000),
        runs: parse_num("runs", &draft.runs)?.unwrap_or(50),
        seed_count: parse_num("seeds", &draft.seeds)?.unwrap_or(10),
        sim_seed: parse_num("sim_seed", &draft.sim_seed)?.unwrap_or(1),
        init_active,
        out_dir: draft
            .out
            .map(|(value, _)| PathBuf::from(value))
            .unwrap_or_else(|| PathBuf::from("out")),
    })
}

/// Parse a config document on its own (no flag overrides).
pub fn parse_config(text: &str) -> Result<ExperimentSpec> {
    let mut draft = Draft::default();
    draft.read_text(text)?;
    finalize(draft)
}

/// Simulate SIS epidemic spreading on duty-cycled wireless sensor
/// networks and reproduce the reference figures as CSV tables.
#[derive(Debug, Parser)]
#[command(name = "wsn-sis", version, disable_help_subcommand = true)]
pub struct Cli {
    /// Experiment: generate-graph, run-mmc, run-mc, temporal, sweep-beta,
    /// sweep-gamma, sweep-ratio, or threshold. May also be given as
    /// `command = ...` in the config file.
    pub command: Option<String>,

    /// Config file (`key = value` lines); flags override file values.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Output directory for CSV artifacts (default: out)
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Cap on worker threads for ensembles and sweeps
    #[arg(long)]
    pub jobs: Option<usize>,

    /// Seed for the graph generator (default: 9)
    #[arg(long)]
    pub graph_seed: Option<u64>,

    /// Base seed for simulation randomness (default: 1)
    #[arg(long)]
    pub sim_seed: Option<u64>,

    /// Infection probability per active infected neighbor (default: 0.5)
    #[arg(long)]
    pub beta: Option<f64>,

    /// Recovery probability per step (default: 0.3)
    #[arg(long)]
    pub gamma: Option<f64>,

    /// Active-to-sleep probability per step (default: 0.3)
    #[arg(long)]
    pub u: Option<f64>,

    /// Sleep-to-active probability per step (default: 0.7)
    #[arg(long)]
    pub v: Option<f64>,

    /// Node count for the generated graph (default: 1000)
    #[arg(long)]
    pub n: Option<usize>,

    /// Edges per arriving node in the generator (default: 2)
    #[arg(long)]
    pub m: Option<usize>,

    /// Ensemble size (default: 50)
    #[arg(long)]
    pub runs: Option<usize>,

    /// Simulation horizon in steps (default: 1000)
    #[arg(long)]
    pub steps: Option<usize>,

    /// Initially infected node count (default: 10)
    #[arg(long)]
    pub seeds: Option<usize>,
}

impl Cli {
    /// Resolve defaults, config file, and flag overrides into a spec.
    pub fn resolve(&self) -> Result<ExperimentSpec> {
        let mut draft = Draft::default();
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path).map_err(|e| {
                Error::Config(format!("cannot read config '{}': {}", path.display(), e))
            })?;
            draft.read_text(&text)?;
        }
        let mut flag = |key: &str, value: Option<String>| {
            if let Some(v) = value {
                draft
                    .set(key, v, Origin::Flag)
                    .expect("flag keys are known");
            }
        };
        flag("command", self.command.clone());
        flag("out", self.out.as_ref().map(|p| p.display().to_string()));
        flag("graph_seed", self.graph_seed.map(|x| x.to_string()));
        flag("sim_seed", self.sim_seed.map(|x| x.to_string()));
        flag("beta", self.beta.map(|x| x.to_string()));
        flag("gamma", self.gamma.map(|x| x.to_string()));
        flag("u", self.u.map(|x| x.to_string()));
        flag("v", self.v.map(|x| x.to_string()));
        flag("n", self.n.map(|x| x.to_string()));
        flag("m", self.m.map(|x| x.to_string()));
        flag("runs", self.runs.map(|x| x.to_string()));
        flag("steps", self.steps.map(|x| x.to_string()));
        flag("seeds", self.seeds.map(|x| x.to_string()));
        finalize(draft)
    }
}

fn load_graph(spec: &ExperimentSpec) -> Result<Graph> {
    match &spec.graph {
        GraphSource::Generated { n, m, seed } => Graph::price(*n, *m, *seed),
        GraphSource::EdgeList(path) => Graph::read_edge_list(path),
    }
}

fn graph_meta(spec: &ExperimentSpec) -> Vec<(&'static str, String)> {
    match &spec.graph {
        GraphSource::Generated { n, m, seed } => vec![
            ("graph", "price".into()),
            ("n", n.to_string()),
            ("m", m.to_string()),
            ("graph_seed", seed.to_string()),
        ],
        GraphSource::EdgeList(path) => vec![
            ("graph", "edge_list".into()),
            ("edge_list", path.display().to_string()),
        ],
    }
}

fn common_meta(spec: &ExperimentSpec) -> Vec<(&'static str, String)> {
    let mut m = vec![("command", spec.command.as_str().to_string())];
    m.extend(graph_meta(spec));
    m.extend([
        ("beta", spec.params.beta().to_string()),
        ("gamma", spec.params.gamma().to_string()),
        ("u", spec.params.u().to_string()),
        ("v", spec.params.v().to_string()),
        ("steps", spec.steps.to_string()),
        ("runs", spec.runs.to_string()),
        ("seeds", spec.seed_count.to_string()),
        ("sim_seed", spec.sim_seed.to_string()),
        (
            "init_active",
            init_activity_str(spec.init_active).to_string(),
        ),
    ]);
    m
}

fn out_path(spec: &ExperimentSpec, name: &str) -> PathBuf {
    spec.out_dir.join(name)
}

fn announce(path: &Path) {
    println!("wrote {}", path.display());
}

fn spectral(g: &Graph) -> Result<crate::graph::SpectralResult> {
    g.largest_eigenvalue(1e-10, 1_000_000)
}

/// Beta grid for the equilibrium sweep: 0.01..=0.30 step 0.01, refined
/// with the detection grid around the theoretical threshold.
fn fig3_grid(beta_c: f64, cfg: &SweepConfig) -> Vec<f64> {
    let mut grid: Vec<f64> = (1..=30).map(|k| k as f64 / 100.0).collect();
    grid.extend(detection_grid(
        beta_c,
        cfg.detection_window,
        cfg.detection_step,
    ));
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    grid
}

/// Run the resolved experiment, writing artifacts under `spec.out_dir`.
pub fn execute(spec: &ExperimentSpec) -> Result<()> {
    fs::create_dir_all(&spec.out_dir).map_err(|source| Error::Io {
        path: spec.out_dir.clone(),
        source,
    })?;
    let g = load_graph(spec)?;
    match spec.command {
        Command::GenerateGraph => {
            let stats = g.degree_stats();
            let r = spectral(&g)?;
            println!("nodes = {}", g.node_count());
            println!("edges = {}", g.edge_count());
            println!("mean_degree = {}", stats.mean);
            println!("max_degree = {}", stats.max);
            println!("components = {}", stats.components);
            println!("lambda_max = {}", r.lambda_max);
            let path = out_path(spec, "graph.edges");
            g.write_edge_list(&path)?;
            announce(&path);
            let mut meta = common_meta(spec);
            meta.extend([
                ("edges", g.edge_count().to_string()),
                ("mean_degree", stats.mean.to_string()),
                ("components", stats.components.to_string()),
                ("lambda_max", r.lambda_max.to_string()),
            ]);
            let meta_path = path.with_extension("meta");
            experiments::write_metadata(&meta_path, &meta)?;
            announce(&meta_path);
        }
        Command::RunMmc => {
            let init = experiments::matched_mmc_init(g.node_count(), &spec.run_config())?;
            let series = mmc::run_mmc(&g, &spec.params, &init, spec.steps, 1e-9);
            let f = series.last_fractions();
            println!(
                "settled = {} after {} steps",
                series.settled,
                series.rows.len() - 1
            );
            println!(
                "final fractions: US={} AS={} UI={} AI={}",
                f.rho_us, f.rho_as, f.rho_ui, f.rho_ai
            );
            let path = out_path(spec, "mmc_series.csv");
            series.write_csv(&path)?;
            announce(&path);
            let meta_path = path.with_extension("meta");
            experiments::write_metadata(&meta_path, &common_meta(spec))?;
            announce(&meta_path);
        }
        Command::RunMc => {
            let ens = run_ensemble(&g, &spec.run_config(), spec.runs, spec.sim_seed)?;
            let f = ens.mean.tail_mean(ens.mean.rows.len().div_ceil(4));
            println!(
                "tail mean fractions: US={} AS={} UI={} AI={}",
                f.rho_us, f.rho_as, f.rho_ui, f.rho_ai
            );
            let path = out_path(spec, "mc_series.csv");
            ens.write_csv(&path)?;
            announce(&path);
            let meta_path = path.with_extension("meta");
            experiments::write_metadata(&meta_path, &common_meta(spec))?;
            announce(&meta_path);
        }
        Command::Temporal => {
            let (theory, sim) =
                experiments::temporal_experiment(&g, &spec.run_config(), spec.runs, spec.sim_seed)?;
            let th = theory.last_fractions();
            let mc = sim.mean.tail_mean(sim.mean.rows.len().div_ceil(4));
            println!(
                "mmc final: US={} AS={} UI={} AI={}",
                th.rho_us, th.rho_as, th.rho_ui, th.rho_ai
            );
            println!(
                "mc tail mean: US={} AS={} UI={} AI={}",
                mc.rho_us, mc.rho_as, mc.rho_ui, mc.rho_ai
            );
            let path = out_path(spec, "fig2_temporal.csv");
            experiments::write_fig2_csv(&path, &theory, &sim)?;
            announce(&path);
            let meta_path = path.with_extension("meta");
            experiments::write_metadata(&meta_path, &common_meta(spec))?;
            announce(&meta_path);
        }
        Command::SweepBeta => {
            let cfg = spec.sweep_config();
            let r = spectral(&g)?;
            let (gamma, u, v) = (spec.params.gamma(), spec.params.u(), spec.params.v());
            let beta_c = mmc::epidemic_threshold(r.lambda_max, gamma, u, v)?;
            let grid = fig3_grid(beta_c.min(1.0), &cfg);
            let points = experiments::sweep_beta(&g, gamma, u, v, &grid, &cfg)?;
            let est = experiments::detect_threshold(&points, r.lambda_max, cfg.detection_eps)?;
            println!("lambda_max = {}", r.lambda_max);
            println!("beta_c_theory = {}", est.beta_c_theory);
            match est.beta_c_sim {
                Some(b) => println!("beta_c_sim = {}", b),
                None => println!("beta_c_sim = not observed in grid"),
            }
            let path = out_path(spec, "fig3_sweep.csv");
            experiments::write_fig3_csv(&path, &points)?;
            announce(&path);
            let tpath = out_path(spec, "threshold.csv");
            experiments::write_threshold_csv(&tpath, r.lambda_max, gamma, u, v, &est)?;
            announce(&tpath);
            let mut meta = common_meta(spec);
            meta.extend(sweep_meta(&cfg, r.lambda_max));
            let meta_path = path.with_extension("meta");
            experiments::write_metadata(&meta_path, &meta)?;
            announce(&meta_path);
        }
        Command::SweepGamma => {
            let cfg = spec.sweep_config();
            let gammas: Vec<f64> = (1..=9).map(|k| k as f64 / 10.0).collect();
            let schedules = [(0.3, 0.7), (0.5, 0.5), (0.7, 0.3)];
            let rows = experiments::sweep_gamma(&g, &gammas, &schedules, &cfg)?;
            let r = spectral(&g)?;
            println!("lambda_max = {}", r.lambda_max);
            println!("rows = {}", rows.len());
            let path = out_path(spec, "fig4_gamma.csv");
            experiments::write_fig4_csv(&path, &rows)?;
            announce(&path);
            let mut meta = common_meta(spec);
            meta.extend(sweep_meta(&cfg, r.lambda_max));
            let meta_path = path.with_extension("meta");
            experiments::write_metadata(&meta_path, &meta)?;
            announce(&meta_path);
        }
        Command::SweepRatio => {
            let cfg = spec.sweep_config();
            let grid: Vec<f64> = (2..=7).map(|k| k as f64 / 10.0).collect();
            let rows = experiments::sweep_ratio(&g, spec.params.gamma(), &grid, &grid, &cfg)?;
            let r = spectral(&g)?;
            println!("lambda_max = {}", r.lambda_max);
            println!("rows = {}", rows.len());
            let path = out_path(spec, "fig5_ratio.csv");
            experiments::write_fig5_csv(&path, &rows)?;
            announce(&path);
            let mut meta = common_meta(spec);
            meta.extend(sweep_meta(&cfg, r.lambda_max));
            let meta_path = path.with_extension("meta");
            experiments::write_metadata(&meta_path, &meta)?;
            announce(&meta_path);
        }
        Command::Threshold => {
            let cfg = spec.sweep_config();
            let r = spectral(&g)?;
            let (gamma, u, v) = (spec.params.gamma(), spec.params.u(), spec.params.v());
            let beta_c = mmc::epidemic_threshold(r.lambda_max, gamma, u, v)?;
            let grid = detection_grid(beta_c.min(1.0), cfg.detection_window, cfg.detection_step);
            let points = experiments::sweep_beta(&g, gamma, u, v, &grid, &cfg)?;
            let est = experiments::detect_threshold(&points, r.lambda_max, cfg.detection_eps)?;
            println!("lambda_max = {}", r.lambda_max);
            println!("beta_c_theory = {}", est.beta_c_theory);
            match est.beta_c_sim {
                Some(b) => println!("beta_c_sim = {}", b),
                None => println!("beta_c_sim = not observed in grid"),
            }
            let path = out_path(spec, "threshold.csv");
            experiments::write_threshold_csv(&path, r.lambda_max, gamma, u, v, &est)?;
            announce(&path);
            let mut meta = common_meta(spec);
            meta.extend(sweep_meta(&cfg, r.lambda_max));
            let meta_path = path.with_extension("meta");
            experiments::write_metadata(&meta_path, &meta)?;
            announce(&meta_path);
        }
    }
    Ok(())
}

fn sweep_meta(cfg: &SweepConfig, lambda_max: f64) -> Vec<(&'static str, String)> {
    vec![
        ("lambda_max", lambda_max.to_string()),
        ("detection_eps", cfg.detection_eps.to_string()),
        ("detection_window", cfg.detection_window.to_string()),
        ("detection_step", cfg.detection_step.to_string()),
        // ensembles average over extinction; no survival conditioning
        ("extinction_handling", "ensemble_average".to_string()),
    ]
}

/// Full CLI entry: parse, resolve, execute; returns the process exit code
/// (0 success, 1 validation error, 2 runtime error).
pub fn main_entry<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // --help/--version arrive here; they are not failures
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(jobs) = cli.jobs {
        // ignore the error if a pool already exists (e.g. repeated calls in tests)
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    match cli.resolve().and_then(|spec| execute(&spec)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e);
            e.exit_code()
        }
    }
}
