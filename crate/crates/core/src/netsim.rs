//! Event-loop simulation of a metering network.
//!
//! Each round the nodes take `m` new readings, push every data symbol to the
//! `r` neighbours whose parities depend on it, and store their array column.
//! A random subset of nodes then fails for that epoch and the concentrator
//! rebuilds all readings from the survivors.
//!
//! Node `relabeling[c]` of the plan stores canonical column `c`; readings are
//! indexed canonically, like [`DataBlock`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

use crate::codec::{decode, CodecError, CodewordArray, DataBlock, ErasurePattern};
use crate::construct::{build_layout, ArrayLayout, CodeParams};
use crate::graph::{Graph, GraphCodePlan, GraphError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetsimError {
    #[error("node {from} sent to node {to} without a link")]
    TopologyViolation { from: usize, to: usize },
    #[error("readings exhausted after {rounds} rounds")]
    ReadingsExhausted { rounds: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone)]
pub struct NetworkConfig {
    pub params: CodeParams,
    pub topology: Graph,
    pub plan: GraphCodePlan,
    pub rng_seed: u64,
    pub rounds: usize,
    /// Independent per-node failure probability each epoch.
    pub fail_prob: f64,
    /// Caps failures per epoch; nodes beyond the cap stay up.
    pub max_failures: Option<usize>,
    layout: ArrayLayout,
}

impl NetworkConfig {
    pub fn new(topology: Graph, plan: GraphCodePlan, rng_seed: u64, rounds: usize) -> Result<Self, NetsimError> {
        if !plan.physical_support()?.is_subgraph_of(&topology) {
            return Err(NetsimError::Config("plan does not fit the topology".into()));
        }
        let params = *plan.code.params();
        Ok(NetworkConfig {
            params,
            topology,
            plan,
            rng_seed,
            rounds,
            fail_prob: 0.0,
            max_failures: None,
            layout: build_layout(params),
        })
    }

    pub fn with_failures(mut self, fail_prob: f64, max_failures: Option<usize>) -> Result<Self, NetsimError> {
        if !(0.0..=1.0).contains(&fail_prob) {
            return Err(NetsimError::Config(format!("fail probability {fail_prob} outside [0, 1]")));
        }
        self.fail_prob = fail_prob;
        self.max_failures = max_failures;
        Ok(self)
    }

    pub fn layout(&self) -> &ArrayLayout {
        &self.layout
    }
}

/// One data symbol crossing a link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transmission {
    pub from: usize,
    pub to: usize,
    /// Canonical data index `(i, j)` of `d_{i,j}`.
    pub symbol: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkState {
    pub round: usize,
    /// Array column held by each physical node.
    pub node_store: Vec<Vec<u32>>,
    /// Physical nodes down this epoch.
    pub failed: BTreeSet<usize>,
    /// Sends made in the latest round.
    pub transmissions: Vec<Transmission>,
}

impl NetworkState {
    pub fn new(params: &CodeParams) -> Self {
        NetworkState {
            round: 0,
            node_store: vec![vec![0; params.height()]; params.n()],
            failed: BTreeSet::new(),
            transmissions: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimReport {
    pub rounds_run: usize,
    pub failures_injected: usize,
    pub recoveries_attempted: usize,
    pub recoveries_ok: usize,
    pub symbols_exchanged: usize,
}

/// Encodes one round of readings by message passing. Every send is checked
/// against the topology; failures from the previous epoch are cleared.
pub fn run_round(
    state: &NetworkState,
    config: &NetworkConfig,
    readings: &DataBlock,
) -> Result<NetworkState, NetsimError> {
    let params = &config.params;
    if readings.params() != params {
        return Err(CodecError::DimensionMismatch("readings do not match the code".into()).into());
    }
    let (n, m, p) = (params.n(), params.m(), params.p());
    let field = params.field();
    let phi = &config.plan.relabeling;
    let a = config.plan.code.a_full();

    let mut parities = vec![0u32; n * p];
    let mut transmissions = Vec::with_capacity(n * m * params.r());
    for l in 0..n * m {
        let (i, c) = (l % m, l / m);
        let x = readings.linear()[l];
        for (t, &coef) in a.row(l).iter().enumerate() {
            if coef == 0 {
                continue;
            }
            let (from, to) = (phi[c], phi[t / p]);
            if !config.topology.has_edge(from, to) {
                return Err(NetsimError::TopologyViolation { from, to });
            }
            transmissions.push(Transmission { from, to, symbol: (i, c) });
            parities[t] = field.add(parities[t], field.mul(coef, x));
        }
    }

    let mut node_store = vec![vec![0; params.height()]; n];
    for c in 0..n {
        let column = &mut node_store[phi[c]];
        for i in 0..m {
            column[config.layout.data_cell(i, c).0] = readings.get(i, c);
        }
        for i in 0..p {
            column[config.layout.parity_cell(i, c).0] = parities[i + c * p];
        }
    }
    Ok(NetworkState { round: state.round + 1, node_store, failed: BTreeSet::new(), transmissions })
}

/// Marks physical nodes as down for the current epoch.
pub fn inject_failures(state: &NetworkState, failed: impl IntoIterator<Item = usize>) -> NetworkState {
    let mut next = state.clone();
    next.failed.extend(failed);
    next
}

/// Reads the surviving columns and decodes the round's readings.
pub fn concentrator_collect(state: &NetworkState, config: &NetworkConfig) -> Result<DataBlock, NetsimError> {
    let params = config.params;
    let phi = &config.plan.relabeling;
    let columns: Vec<Option<Vec<u32>>> =
        (0..params.n()).map(|c| (!state.failed.contains(&phi[c])).then(|| state.node_store[phi[c]].clone())).collect();
    let partial = CodewordArray::from_columns(params, &columns)?;
    let failed_canonical = (0..params.n()).filter(|&c| state.failed.contains(&phi[c]));
    let pattern = ErasurePattern::new(params.n(), failed_canonical)?;
    Ok(decode(&config.plan.code, &config.layout, &partial, &pattern)?)
}

/// Where each round's readings come from.
#[derive(Debug, Clone)]
pub enum ReadingSource {
    /// Uniform field elements from the simulation RNG.
    Random,
    /// External values, reduced mod `q` and consumed `n·m` per round.
    Supplied(Vec<u64>),
}

/// Runs `config.rounds` collection epochs with one seeded generator.
pub fn simulate(config: &NetworkConfig, source: &ReadingSource) -> Result<SimReport, NetsimError> {
    let params = config.params;
    let per_round = params.n() * params.m();
    let q = u64::from(params.q());
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mut state = NetworkState::new(&params);
    let mut report = SimReport::default();

    for round in 0..config.rounds {
        let readings = match source {
            ReadingSource::Random => DataBlock::random(params, &mut rng),
            ReadingSource::Supplied(values) => {
                let chunk = values
                    .get(round * per_round..(round + 1) * per_round)
                    .ok_or(NetsimError::ReadingsExhausted { rounds: round })?;
                DataBlock::from_linear(params, chunk.iter().map(|&v| (v % q) as u32).collect())?
            }
        };
        state = run_round(&state, config, &readings)?;
        report.symbols_exchanged += state.transmissions.len();

        let cap = config.max_failures.unwrap_or(params.n());
        let mut down = Vec::new();
        for node in 0..params.n() {
            if rng.gen_bool(config.fail_prob) && down.len() < cap {
                down.push(node);
            }
        }
        report.failures_injected += down.len();
        state = inject_failures(&state, down);

        report.recoveries_attempted += 1;
        match concentrator_collect(&state, config) {
            Ok(recovered) if recovered == readings => report.recoveries_ok += 1,
            Ok(_) => {}
            Err(NetsimError::Codec(_)) => {}
            Err(e) => return Err(e),
        }
        report.rounds_run += 1;
    }
    Ok(report)
}
