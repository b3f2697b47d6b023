//! Microscopic Markov chain (mean-field) engine for the four-state
//! sleep/SIS process.
//!
//! Per node the chain tracks occupation probabilities of the four
//! compartments US, AS, UI, AI (unactive/active x susceptible/infected).
//! One synchronous step applies, to every node,
//!
//! ```text
//! P^US' = P^US (1-v) + P^AI g u       + P^AS q u
//! P^AS' = P^US v     + P^AI g (1-u)   + P^AS q (1-u)
//! P^UI' = P^UI (1-v) + P^AI (1-g) u   + P^AS (1-q) u
//! P^AI' = P^UI v     + P^AI (1-g)(1-u) + P^AS (1-q)(1-u)
//! ```
//!
//! with `g` the recovery probability gamma and `q_i` the probability that
//! node i escapes infection from all neighbors this step. Sleeping nodes
//! are frozen: they neither infect, get infected, nor recover.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::Graph;

const US: usize = 0;
const AS: usize = 1;
const UI: usize = 2;
const AI: usize = 3;

/// Model parameters, validated at construction: all probabilities in
/// [0,1] and `u + v > 0` (a node population that can neither sleep nor
/// wake has no duty cycle to speak of).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    beta: f64,
    gamma: f64,
    u: f64,
    v: f64,
}

impl ModelParams {
    pub fn new(beta: f64, gamma: f64, u: f64, v: f64) -> Result<Self> {
        let check = |name: &'static str, value: f64| {
            if (0.0..=1.0).contains(&value) {
                Ok(())
            } else {
                Err(Error::ParamRange { name, value })
            }
        };
        check("beta", beta)?;
        check("gamma", gamma)?;
        check("u", u)?;
        check("v", v)?;
        if u + v <= 0.0 {
            return Err(Error::DegenerateScheduling(
                "u = v = 0: nodes can neither sleep nor wake",
            ));
        }
        Ok(ModelParams { beta, gamma, u, v })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        ModelParams::new(beta, self.gamma, self.u, self.v)
    }

    /// Stationary fraction of active nodes, `v / (u + v)` (Eq. 2 of the
    /// two-state sleep chain).
    pub fn stationary_active_fraction(&self) -> f64 {
        self.v / (self.u + self.v)
    }
}

/// Per-node compartment probabilities, one `[US, AS, UI, AI]` row per node.
#[derive(Debug, Clone, PartialEq)]
pub struct MmcState {
    rows: Vec<[f64; 4]>,
}

impl MmcState {
    /// Validates that every entry lies in [0,1] and every row sums to 1
    /// within 1e-12.
    pub fn new(rows: Vec<[f64; 4]>) -> Result<Self> {
        for row in &rows {
            for &p in row {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::ParamRange {
                        name: "state probability",
                        value: p,
                    });
                }
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(Error::ParamRange {
                    name: "state row sum",
                    value: sum,
                });
            }
        }
        Ok(MmcState { rows })
    }

    /// Product-form state: every node is infected with probability
    /// `p_infected` and active with probability `p_active`, independently.
    pub fn from_occupancy(n: usize, p_infected: f64, p_active: f64) -> Result<Self> {
        for (name, value) in [("p_infected", p_infected), ("p_active", p_active)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::ParamRange { name, value });
            }
        }
        let row = [
            (1.0 - p_infected) * (1.0 - p_active),
            (1.0 - p_infected) * p_active,
            p_infected * (1.0 - p_active),
            p_infected * p_active,
        ];
        let sum: f64 = row.iter().sum();
        let row = row.map(|p| p / sum);
        Ok(MmcState {
            rows: vec![row; n],
        })
    }

    pub fn node_count(&self) -> usize {
        self.rows.len()
    }

    /// Rows ordered `[US, AS, UI, AI]`.
    pub fn rows(&self) -> &[[f64; 4]] {
        &self.rows
    }

    pub fn p_ai(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r[AI]).collect()
    }

    /// Largest entry-wise absolute difference to `other`.
    pub fn max_delta(&self, other: &MmcState) -> f64 {
        self.rows
            .iter()
            .zip(&other.rows)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }
}

/// Population fractions in the four compartments (Eq. 5).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fractions {
    pub rho_us: f64,
    pub rho_as: f64,
    pub rho_ui: f64,
    pub rho_ai: f64,
}

impl Fractions {
    pub fn as_array(&self) -> [f64; 4] {
        [self.rho_us, self.rho_as, self.rho_ui, self.rho_ai]
    }

    pub fn infected(&self) -> f64 {
        self.rho_ui + self.rho_ai
    }

    pub fn active(&self) -> f64 {
        self.rho_as + self.rho_ai
    }
}

/// Fraction trajectory; `settled` records whether the run stopped because
/// consecutive states stopped moving (as opposed to hitting the step cap).
#[derive(Debug, Clone)]
pub struct FractionSeries {
    pub rows: Vec<(usize, Fractions)>,
    pub settled: bool,
}

impl FractionSeries {
    pub fn last_fractions(&self) -> Fractions {
        self.rows.last().expect("series always holds t=0").1
    }

    /// Component-wise mean over the last `window` rows (all rows if the
    /// series is shorter).
    pub fn tail_mean(&self, window: usize) -> Fractions {
        let skip = self.rows.len().saturating_sub(window.max(1));
        let tail = &self.rows[skip..];
        let mut acc = [0.0; 4];
        for (_, f) in tail {
            for (a, x) in acc.iter_mut().zip(f.as_array()) {
                *a += x;
            }
        }
        let n = tail.len() as f64;
        Fractions {
            rho_us: acc[0] / n,
            rho_as: acc[1] / n,
            rho_ui: acc[2] / n,
            rho_ai: acc[3] / n,
        }
    }

    /// CSV with header `t,rho_US,rho_AS,rho_UI,rho_AI`, full double
    /// precision.
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
        writeln!(w, "t,rho_US,rho_AS,rho_UI,rho_AI").map_err(io_err)?;
        for (t, f) in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{}",
                t, f.rho_us, f.rho_as, f.rho_ui, f.rho_ai
            )
            .map_err(io_err)?;
        }
        w.flush().map_err(io_err)
    }
}

/// Per-node probability of escaping infection this step (Eq. 3):
/// `q_i = prod over neighbors j of (1 - beta * P_j^AI)`.
pub fn escape_probability(g: &Graph, p_ai: &[f64], beta: f64) -> Vec<f64> {
    (0..g.node_count())
        .map(|i| {
            g.neighbors(i)
                .iter()
                .map(|&j| 1.0 - beta * p_ai[j])
                .product()
        })
        .collect()
}

/// One synchronous update of Eq. (4). Rows are renormalized after the
/// update so conservation cannot drift over long runs.
pub fn mmc_step(g: &Graph, state: &MmcState, params: &ModelParams) -> MmcState {
    let p_ai: Vec<f64> = state.rows.iter().map(|r| r[AI]).collect();
    let q = escape_probability(g, &p_ai, params.beta);
    let (ga, u, v) = (params.gamma, params.u, params.v);
    let rows = state
        .rows
        .iter()
        .zip(&q)
        .map(|(r, &qi)| {
            let [us, as_, ui, ai] = *r;
            let row = [
                us * (1.0 - v) + ai * ga * u + as_ * qi * u,
                us * v + ai * ga * (1.0 - u) + as_ * qi * (1.0 - u),
                ui * (1.0 - v) + ai * (1.0 - ga) * u + as_ * (1.0 - qi) * u,
                ui * v + ai * (1.0 - ga) * (1.0 - u) + as_ * (1.0 - qi) * (1.0 - u),
            ];
            let sum: f64 = row.iter().sum();
            row.map(|p| p / sum)
        })
        .collect();
    MmcState { rows }
}

/// Node-averaged compartment fractions (Eq. 5).
pub fn state_fractions(state: &MmcState) -> Fractions {
    let n = state.rows.len() as f64;
    let mut acc = [0.0; 4];
    for row in &state.rows {
        for (a, p) in acc.iter_mut().zip(row) {
            *a += p;
        }
    }
    Fractions {
        rho_us: acc[US] / n,
        rho_as: acc[AS] / n,
        rho_ui: acc[UI] / n,
        rho_ai: acc[AI] / n,
    }
}

/// Iterate [`mmc_step`] from `init`, recording fractions at every step
/// (including t=0). Stops early, with `settled = true`, once the full
/// per-node state moves by less than `settle_tol` in the ∞-norm between
/// consecutive steps; `settle_tol = 0` therefore always runs the full
/// horizon.
pub fn run_mmc(
    g: &Graph,
    params: &ModelParams,
    init: &MmcState,
    max_steps: usize,
    settle_tol: f64,
) -> FractionSeries {
    let mut rows = Vec::with_capacity(max_steps + 1);
    rows.push((0, state_fractions(init)));
    let mut state = init.clone();
    let mut settled = false;
    for t in 1..=max_steps {
        let next = mmc_step(g, &state, params);
        let delta = state.max_delta(&next);
        rows.push((t, state_fractions(&next)));
        state = next;
        if delta < settle_tol {
            settled = true;
            break;
        }
    }
    FractionSeries { rows, settled }
}

/// Solve the stationary self-consistency system (Eq. 9) by fixed-point
/// iteration on the per-node P^AI vector, starting from the maximal
/// physical value `v/(u+v)` so the iteration lands on the nontrivial
/// branch whenever one exists. The remaining compartments are filled from
/// the converged q via Eq. (9).
pub fn solve_equilibrium(
    g: &Graph,
    params: &ModelParams,
    tol: f64,
    max_iter: usize,
) -> Result<MmcState> {
    assert!(tol > 0.0, "tolerance must be positive");
    if params.v == 0.0 {
        return Err(Error::DegenerateScheduling(
            "v = 0: sleeping nodes never wake, Eq. (9) is undefined",
        ));
    }
    let n = g.node_count();
    let rho_a = params.stationary_active_fraction();
    let (beta, gamma) = (params.beta, params.gamma);
    // P^AI update for one node given its escape probability. 1-q+gamma = 0
    // only when q = 1 and gamma = 0, where Eq. (9) degenerates to 0 = 0;
    // take the disease-free branch.
    let next_ai = |qi: f64| {
        let denom = 1.0 - qi + gamma;
        if denom == 0.0 {
            0.0
        } else {
            rho_a * (1.0 - qi) / denom
        }
    };
    let mut p_ai = vec![rho_a; n];
    let mut delta = f64::INFINITY;
    for _ in 0..max_iter {
        let q = escape_probability(g, &p_ai, beta);
        let mut new_delta = 0.0f64;
        for (p, &qi) in p_ai.iter_mut().zip(&q) {
            let np = next_ai(qi);
            new_delta = new_delta.max((np - *p).abs());
            *p = np;
        }
        delta = new_delta;
        if delta < tol {
            let q = escape_probability(g, &p_ai, beta);
            let ratio = params.u / params.v;
            let rows = p_ai
                .iter()
                .zip(&q)
                .map(|(&ai, &qi)| {
                    let denom = 1.0 - qi + gamma;
                    let as_ = if denom == 0.0 {
                        rho_a
                    } else {
                        rho_a * gamma / denom
                    };
                    [ratio * as_, as_, ratio * ai, ai]
                })
                .collect();
            return Ok(MmcState { rows });
        }
    }
    Err(Error::FixedPointDiverged {
        iterations: max_iter,
        delta,
        last_p_ai: p_ai,
    })
}

/// Spectral epidemic threshold (Eq. 17): `beta_c = (1 + u/v) * gamma / Λ`.
/// A graph with `Λ = 0` (no edges) cannot sustain an epidemic at any
/// infection rate; that case reports `f64::INFINITY`.
pub fn epidemic_threshold(lambda_max: f64, gamma: f64, u: f64, v: f64) -> Result<f64> {
    if !(lambda_max >= 0.0 && lambda_max.is_finite()) {
        return Err(Error::ParamRange {
            name: "lambda_max",
            value: lambda_max,
        });
    }
    for (name, value) in [("gamma", gamma), ("u", u), ("v", v)] {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::ParamRange { name, value });
        }
    }
    if v == 0.0 {
        return Err(Error::DegenerateScheduling(
            "v = 0: the active network is eventually empty, no finite threshold",
        ));
    }
    if lambda_max == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((1.0 + u / v) * gamma / lambda_max)
}
