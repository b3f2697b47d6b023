//! Stochastic agent-based engine for the four-state sleep/SIS process.
//!
//! Each step is a synchronous two-phase update decided entirely from the
//! time-t configuration:
//!
//! 1. infection/recovery: an AS node with k AI neighbors becomes infected
//!    with probability 1-(1-beta)^k (independent per-neighbor trials); an
//!    AI node recovers with probability gamma; sleeping nodes are frozen;
//! 2. scheduling: every time-t-active node falls asleep with probability
//!    u, every time-t-sleeping node wakes with probability v, carrying the
//!    phase-1 infection label.
//!
//! A node infected in phase 1 cannot recover in the same step and vice
//! versa, so the one-step law per node factorizes exactly as in the MMC
//! update equations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::mmc::{FractionSeries, Fractions, ModelParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeState {
    Us,
    As,
    Ui,
    Ai,
}

impl NodeState {
    pub fn from_parts(active: bool, infected: bool) -> Self {
        match (active, infected) {
            (false, false) => NodeState::Us,
            (true, false) => NodeState::As,
            (false, true) => NodeState::Ui,
            (true, true) => NodeState::Ai,
        }
    }

    pub fn is_active(self) -> bool {
        matches!(self, NodeState::As | NodeState::Ai)
    }

    pub fn is_infected(self) -> bool {
        matches!(self, NodeState::Ui | NodeState::Ai)
    }

    /// Compartment index in the `[US, AS, UI, AI]` ordering shared with
    /// the MMC state.
    pub fn index(self) -> usize {
        match self {
            NodeState::Us => 0,
            NodeState::As => 1,
            NodeState::Ui => 2,
            NodeState::Ai => 3,
        }
    }
}

/// Whether nodes start from the stationary sleep split or all awake.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitActivity {
    Stationary,
    AllActive,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: ModelParams,
    /// Horizon; a run records fractions at t = 0..=steps. Zero is allowed
    /// and yields only the initial row.
    pub steps: usize,
    /// Initially infected node count; may be 0 for a disease-free run.
    pub seed_count: usize,
    pub rng_seed: u64,
    pub init_active: InitActivity,
}

impl RunConfig {
    fn validate(&self, n: usize) -> Result<()> {
        if self.seed_count > n {
            return Err(Error::TooManySeeds {
                seed_count: self.seed_count,
                n,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentPopulation {
    pub states: Vec<NodeState>,
    pub step: usize,
}

impl AgentPopulation {
    pub fn node_count(&self) -> usize {
        self.states.len()
    }

    pub fn counts(&self) -> [usize; 4] {
        let mut c = [0; 4];
        for s in &self.states {
            c[s.index()] += 1;
        }
        c
    }

    pub fn fractions(&self) -> Fractions {
        let n = self.states.len() as f64;
        let c = self.counts();
        Fractions {
            rho_us: c[0] as f64 / n,
            rho_as: c[1] as f64 / n,
            rho_ui: c[2] as f64 / n,
            rho_ai: c[3] as f64 / n,
        }
    }

    pub fn infected_count(&self) -> usize {
        self.states.iter().filter(|s| s.is_infected()).count()
    }

    pub fn active_count(&self) -> usize {
        self.states.iter().filter(|s| s.is_active()).count()
    }
}

/// Draw the t=0 population: `seed_count` distinct nodes are infected
/// (chosen uniformly), and every node's sleep bit comes from the
/// stationary split (active with probability v/(u+v)) or is forced active
/// per `cfg.init_active`. Seeds may therefore start asleep as UI.
pub fn init_population(g: &Graph, cfg: &RunConfig, rng: &mut impl Rng) -> Result<AgentPopulation> {
    let n = g.node_count();
    cfg.validate(n)?;
    let p_active = match cfg.init_active {
        InitActivity::Stationary => cfg.params.stationary_active_fraction(),
        InitActivity::AllActive => 1.0,
    };
    let mut infected = vec![false; n];
    for i in rand::seq::index::sample(rng, n, cfg.seed_count) {
        infected[i] = true;
    }
    let states = infected
        .into_iter()
        .map(|inf| NodeState::from_parts(rng.random::<f64>() < p_active, inf))
        .collect();
    Ok(AgentPopulation { states, step: 0 })
}

/// One synchronous two-phase step (see module docs).
pub fn mc_step(
    g: &Graph,
    pop: &AgentPopulation,
    params: &ModelParams,
    rng: &mut impl Rng,
) -> AgentPopulation {
    let n = pop.states.len();
    let (beta, gamma, u, v) = (params.beta(), params.gamma(), params.u(), params.v());
    // phase 1: infection labels after transmission/recovery, from time-t states
    let mut infected = Vec::with_capacity(n);
    for (i, &s) in pop.states.iter().enumerate() {
        let inf = match s {
            NodeState::As => g
                .neighbors(i)
                .iter()
                .any(|&j| pop.states[j] == NodeState::Ai && rng.random::<f64>() < beta),
            NodeState::Ai => rng.random::<f64>() >= gamma,
            NodeState::Us => false,
            NodeState::Ui => true,
        };
        infected.push(inf);
    }
    // phase 2: sleep scheduling from time-t activity
    let states = pop
        .states
        .iter()
        .zip(infected)
        .map(|(&s, inf)| {
            let active = if s.is_active() {
                rng.random::<f64>() >= u
            } else {
                rng.random::<f64>() < v
            };
            NodeState::from_parts(active, inf)
        })
        .collect();
    AgentPopulation {
        states,
        step: pop.step + 1,
    }
}

/// Single seeded run; a deterministic function of `(g, cfg)`.
pub fn run_mc(g: &Graph, cfg: &RunConfig) -> Result<FractionSeries> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut pop = init_population(g, cfg, &mut rng)?;
    let mut rows = Vec::with_capacity(cfg.steps + 1);
    rows.push((0, pop.fractions()));
    for t in 1..=cfg.steps {
        pop = mc_step(g, &pop, &cfg.params, &mut rng);
        rows.push((t, pop.fractions()));
    }
    Ok(FractionSeries {
        rows,
        settled: false,
    })
}

/// Per-run seed for ensemble member `run_index`: the `(run_index+1)`-th
/// output of a SplitMix64 stream started at `base_seed`. Public so that
/// "ensemble member i" can be reproduced with a plain [`run_mc`] call.
pub fn derive_run_seed(base_seed: u64, run_index: u64) -> u64 {
    let mut z = base_seed.wrapping_add((run_index + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Pointwise ensemble mean with per-step sample standard deviation;
/// `sd` rows align with `mean.rows`.
#[derive(Debug, Clone)]
pub struct EnsembleSeries {
    pub mean: FractionSeries,
    pub sd: Vec<[f64; 4]>,
    pub runs: usize,
}

impl EnsembleSeries {
    /// CSV with header `t,rho_US,rho_AS,rho_UI,rho_AI,sd_US,sd_AS,sd_UI,sd_AI`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut w = BufWriter::new(file);
        let io_err = |source| Error::Io {
            path: path.to_path_buf(),
            source,
        };
        writeln!(w, "t,rho_US,rho_AS,rho_UI,rho_AI,sd_US,sd_AS,sd_UI,sd_AI").map_err(io_err)?;
        for ((t, f), sd) in self.mean.rows.iter().zip(&self.sd) {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                t, f.rho_us, f.rho_as, f.rho_ui, f.rho_ai, sd[0], sd[1], sd[2], sd[3]
            )
            .map_err(io_err)?;
        }
        w.flush().map_err(io_err)
    }
}

/// Run `runs` independent realizations (run i seeded by
/// [`derive_run_seed`]`(base_seed, i)`; `cfg.rng_seed` is not used) and
/// aggregate them pointwise. Runs execute in parallel; the reduction is
/// by run index, so the output is independent of scheduling.
pub fn run_ensemble(
    g: &Graph,
    cfg: &RunConfig,
    runs: usize,
    base_seed: u64,
) -> Result<EnsembleSeries> {
    assert!(runs >= 1, "ensemble needs at least one run");
    let series: Vec<FractionSeries> = (0..runs)
        .into_par_iter()
        .map(|i| {
            let mut c = cfg.clone();
            c.rng_seed = derive_run_seed(base_seed, i as u64);
            run_mc(g, &c)
        })
        .collect::<Result<_>>()?;
    let steps = series[0].rows.len();
    let mut mean_rows = Vec::with_capacity(steps);
    let mut sd = Vec::with_capacity(steps);
    for t in 0..steps {
        let mut m = [0.0f64; 4];
        for s in &series {
            for (acc, x) in m.iter_mut().zip(s.rows[t].1.as_array()) {
                *acc += x;
            }
        }
        for acc in &mut m {
            *acc /= runs as f64;
        }
        let mut var = [0.0f64; 4];
        if runs > 1 {
            for s in &series {
                for ((acc, x), mu) in var.iter_mut().zip(s.rows[t].1.as_array()).zip(m) {
                    *acc += (x - mu) * (x - mu);
                }
            }
            for acc in &mut var {
                *acc = (*acc / (runs - 1) as f64).sqrt();
            }
        }
        mean_rows.push((
            t,
            Fractions {
                rho_us: m[0],
                rho_as: m[1],
                rho_ui: m[2],
                rho_ai: m[3],
            },
        ));
        sd.push(var);
    }
    Ok(EnsembleSeries {
        mean: FractionSeries {
            rows: mean_rows,
            settled: false,
        },
        sd,
        runs,
    })
}
