//! Instance checks for constructed codes.
//!
//! A code is MDS iff every failure submatrix `A_F = [A_ij]_{i∈F, j∈S}` with
//! `|F| = r` is nonsingular, and lowest density iff every row of `A` has
//! weight `r` and every column weight `k`.

use num_integer::Integer;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

use crate::construct::{CodeParams, GeneratorA};
use crate::field::Matrix;
use crate::subsets::{binomial, colex, complement};

/// Default cap on the number of failure patterns (or minors) enumerated.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// Patterns checked per parallel batch; the first failure is reported in colex order.
const BATCH: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("check needs {needed} cases, budget is {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },
}

/// A nonnegative rational `num/den` in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Self {
        let g = num.gcd(&den).max(1);
        Ratio { num: num / g, den: den / g }
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// True iff `p·k = m·r` with `r = n − k`.
pub fn check_params(n: usize, k: usize, m: usize, p: usize) -> bool {
    k <= n && p * k == m * (n - k)
}

/// Normalised dimension `κ = n·m / (m + p)`.
pub fn normalized_dimension(n: usize, m: usize, p: usize) -> Ratio {
    Ratio::new((n * m) as u64, (m + p) as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckMode {
    Exhaustive,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityReport {
    pub row_weights: Vec<usize>,
    pub col_weights: Vec<usize>,
    pub is_lowest_density: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub is_mds: bool,
    pub failing_pattern: Option<Vec<usize>>,
    pub row_weights: Vec<usize>,
    pub col_weights: Vec<usize>,
    pub is_lowest_density: bool,
    pub kappa: Ratio,
    pub mode: CheckMode,
    pub patterns_checked: u64,
    pub patterns_total: u64,
    /// Sampled mode only: with 95% confidence, at most this fraction of all
    /// failure patterns is unrecoverable.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failing_fraction_bound_95: Option<f64>,
}

impl VerificationReport {
    /// The CLI's success criterion.
    pub fn passed(&self) -> bool {
        self.is_mds && self.is_lowest_density
    }
}

/// `A_F`: rows of the failed nodes' data, columns of the survivors' parities.
pub fn failure_submatrix(gen: &GeneratorA, failed: &[usize]) -> Matrix {
    let mut out = Matrix::zeros(gen.field(), 0, 0);
    failure_submatrix_into(gen, failed, &mut out);
    out
}

fn failure_submatrix_into(gen: &GeneratorA, failed: &[usize], out: &mut Matrix) {
    let n = gen.params().n();
    let surviving = complement(n, failed);
    let rows: Vec<usize> = failed.iter().flat_map(|&j| gen.node_rows(j)).collect();
    let cols: Vec<usize> = surviving.iter().flat_map(|&j| gen.node_cols(j)).collect();
    gen.a_full().select_into(&rows, &cols, out);
}

fn pattern_ok(gen: &GeneratorA, failed: &[usize], workspace: &mut Matrix) -> bool {
    failure_submatrix_into(gen, failed, workspace);
    let need = workspace.rows();
    workspace.is_square() && workspace.rank_in_place() == need
}

pub fn check_lowest_density(gen: &GeneratorA) -> DensityReport {
    let params = gen.params();
    let row_weights = gen.a_full().row_weights();
    let col_weights = gen.a_full().col_weights();
    let is_lowest_density =
        row_weights.iter().all(|&w| w == params.r()) && col_weights.iter().all(|&w| w == params.k());
    DensityReport { row_weights, col_weights, is_lowest_density }
}

fn assemble(
    params: &CodeParams,
    density: DensityReport,
    failing_pattern: Option<Vec<usize>>,
    mode: CheckMode,
    patterns_checked: u64,
    bound: Option<f64>,
) -> VerificationReport {
    VerificationReport {
        is_mds: failing_pattern.is_none(),
        failing_pattern,
        row_weights: density.row_weights,
        col_weights: density.col_weights,
        is_lowest_density: density.is_lowest_density,
        kappa: normalized_dimension(params.n(), params.m(), params.p()),
        mode,
        patterns_checked,
        patterns_total: binomial(params.n(), params.r()),
        failing_fraction_bound_95: bound,
    }
}

/// Tests every failure set of size `r` in colex order and reports the first
/// singular one. Batches run in parallel with one workspace per worker; the
/// result does not depend on the thread count.
pub fn check_mds_exhaustive(gen: &GeneratorA, budget: u64) -> Result<VerificationReport, VerifyError> {
    let params = *gen.params();
    let total = binomial(params.n(), params.r());
    if total > budget {
        return Err(VerifyError::BudgetExceeded { needed: total, budget });
    }
    let mut patterns = colex(params.n(), params.r());
    let mut checked = 0u64;
    let mut failing = None;
    loop {
        let batch: Vec<Vec<usize>> = patterns.by_ref().take(BATCH).collect();
        if batch.is_empty() {
            break;
        }
        let hit = batch
            .par_iter()
            .map_init(|| Matrix::zeros(gen.field(), 0, 0), |ws, f| pattern_ok(gen, f, ws))
            .position_first(|ok| !ok);
        if let Some(pos) = hit {
            checked += pos as u64 + 1;
            failing = Some(batch[pos].clone());
            break;
        }
        checked += batch.len() as u64;
    }
    Ok(assemble(&params, check_lowest_density(gen), failing, CheckMode::Exhaustive, checked, None))
}

/// Monte-Carlo variant: `samples` uniformly random failure sets. A clean run
/// bounds the failing fraction by `1 − 0.05^(1/samples)` at 95% confidence.
pub fn check_mds_sampled(gen: &GeneratorA, samples: u64, seed: u64) -> VerificationReport {
    let params = *gen.params();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ws = Matrix::zeros(gen.field(), 0, 0);
    let mut failing = None;
    let mut checked = 0;
    for _ in 0..samples {
        let mut f = sample(&mut rng, params.n(), params.r()).into_vec();
        f.sort_unstable();
        checked += 1;
        if !pattern_ok(gen, &f, &mut ws) {
            failing = Some(f);
            break;
        }
    }
    let bound = (failing.is_none() && samples > 0).then(|| 1.0 - 0.05f64.powf(1.0 / samples as f64));
    assemble(&params, check_lowest_density(gen), failing, CheckMode::Sampled, checked, bound)
}

/// Every square submatrix of every order is nonsingular.
pub fn totally_nonsingular(m: &Matrix, budget: u64) -> Result<bool, VerifyError> {
    let top = m.rows().min(m.cols());
    let needed =
        (1..=top).map(|s| binomial(m.rows(), s).saturating_mul(binomial(m.cols(), s))).fold(0u64, u64::saturating_add);
    if needed > budget {
        return Err(VerifyError::BudgetExceeded { needed, budget });
    }
    let mut ws = Matrix::zeros(m.field(), 0, 0);
    for s in 1..=top {
        for rows in colex(m.rows(), s) {
            for cols in colex(m.cols(), s) {
                m.select_into(&rows, &cols, &mut ws);
                if ws.rank_in_place() < s {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Zero/nonzero pattern of a matrix.
pub fn support_of(m: &Matrix) -> Vec<Vec<bool>> {
    (0..m.rows()).map(|r| m.row(r).iter().map(|&v| v != 0).collect()).collect()
}

/// Maximum matching between rows and columns of a support pattern, by
/// augmenting paths. Returns `match_of_col`.
pub fn max_matching(support: &[Vec<bool>]) -> Vec<Option<usize>> {
    let cols = support.first().map_or(0, Vec::len);
    let mut owner: Vec<Option<usize>> = vec![None; cols];

    fn augment(row: usize, support: &[Vec<bool>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for c in 0..owner.len() {
            if !support[row][c] || seen[c] {
                continue;
            }
            seen[c] = true;
            if owner[c].is_none_or(|other| augment(other, support, seen, owner)) {
                owner[c] = Some(row);
                return true;
            }
        }
        false
    }

    for row in 0..support.len() {
        let mut seen = vec![false; cols];
        augment(row, support, &mut seen, &mut owner);
    }
    owner
}

/// True iff no assignment of values to the pattern can reach full row rank,
/// i.e. the rows cannot all be matched to distinct supported columns. For a
/// square pattern this means singular for every choice of nonzero entries.
pub fn structurally_singular(support: &[Vec<bool>]) -> bool {
    let matched = max_matching(support).iter().filter(|o| o.is_some()).count();
    matched < support.len()
}
