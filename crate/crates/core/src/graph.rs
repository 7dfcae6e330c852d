//! Codes on incomplete networks.
//!
//! A code can run on a topology iff every nonzero block `A_{i,j}` joins two
//! adjacent nodes. Plans carry a relabeling from canonical code indices to
//! physical nodes; `relabeling[c]` is the node that stores canonical column `c`.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

use crate::construct::{design_code, CodeSpec, ConstructError, GeneratorA};
use crate::subsets::{colex, complement};
use crate::verify::{check_mds_exhaustive, structurally_singular, VerifyError, DEFAULT_BUDGET};

/// Largest node count the embedding search accepts.
pub const MAX_SEARCH_NODES: usize = 12;
/// Backtracking steps allowed per embedding search.
pub const SEARCH_STEP_BUDGET: u64 = 20_000_000;
/// Support assignments enumerated by `graph_admits_no_ld_mds`.
pub const ASSIGNMENT_BUDGET: u64 = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("no embedding of the canonical support graph found")]
    NotFound,
    #[error("search budget of {budget} exceeded")]
    BudgetExceeded { budget: u64 },
    #[error("block support is asymmetric at ({i}, {j})")]
    AsymmetricSupport { i: usize, j: usize },
    #[error("plan invalid: {0}")]
    PlanInvalid(String),
    #[error(transparent)]
    Construct(#[from] ConstructError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
}

/// Undirected simple graph on nodes `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphFile", into = "GraphFile")]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<bool>>,
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<GraphFile> for Graph {
    type Error = GraphError;

    fn try_from(raw: GraphFile) -> Result<Self, GraphError> {
        let mut g = Graph::empty(raw.n);
        for [u, v] in raw.edges {
            if u >= raw.n || v >= raw.n {
                return Err(GraphError::InvalidGraph(format!("edge [{u},{v}] out of range for n={}", raw.n)));
            }
            if u >= v {
                return Err(GraphError::InvalidGraph(format!("edge [{u},{v}] must satisfy u < v")));
            }
            if g.adj[u][v] {
                return Err(GraphError::InvalidGraph(format!("duplicate edge [{u},{v}]")));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }
}

impl From<Graph> for GraphFile {
    fn from(g: Graph) -> Self {
        GraphFile { n: g.n, edges: g.edges() }
    }
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph { n, adj: vec![vec![false; n]; n] }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for u in 0..n {
            g.add_edge(u, (u + 1) % n);
        }
        g
    }

    /// Builds a graph from an edge list in either orientation; loops and
    /// repeated edges are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let raw = GraphFile { n, edges: edges.iter().map(|&(u, v)| [u.min(v), u.max(v)]).collect() };
        Graph::try_from(raw)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Ignores loops.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        if u != v {
            self.adj[u][v] = true;
            self.adj[v][u] = true;
        }
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        self.adj[u][v] = false;
        self.adj[v][u] = false;
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u][v]
    }

    /// Edges `[u, v]` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<[usize; 2]> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in u + 1..self.n {
                if self.adj[u][v] {
                    out.push([u, v]);
                }
            }
        }
        out
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].iter().filter(|&&e| e).count()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|u| self.degree(u)).collect()
    }

    pub fn min_degree(&self) -> usize {
        self.degrees().into_iter().min().unwrap_or(0)
    }

    pub fn is_regular(&self, d: usize) -> bool {
        self.degrees().iter().all(|&x| x == d)
    }

    pub fn is_complete(&self) -> bool {
        self.n == 0 || self.is_regular(self.n - 1)
    }

    pub fn complement(&self) -> Graph {
        let mut g = Graph::empty(self.n);
        for u in 0..self.n {
            for v in u + 1..self.n {
                if !self.adj[u][v] {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }

    /// Image under `perm`: edge `{u, v}` becomes `{perm[u], perm[v]}`.
    pub fn relabel(&self, perm: &[usize]) -> Graph {
        let mut g = Graph::empty(self.n);
        for [u, v] in self.edges() {
            g.add_edge(perm[u], perm[v]);
        }
        g
    }

    pub fn is_subgraph_of(&self, other: &Graph) -> bool {
        self.n == other.n && self.edges().iter().all(|&[u, v]| other.adj[u][v])
    }
}

fn is_permutation(perm: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    perm.len() == n && perm.iter().all(|&x| x < n && !std::mem::replace(&mut seen[x], true))
}

/// Necessary degree condition: every node sees at least `max(k, r)` others.
pub fn min_degree_ok(g: &Graph, k: usize, r: usize) -> bool {
    g.min_degree() >= k.max(r)
}

/// Edge `{i, j}` iff block `A_{i,j}` is nonzero. The block support must be
/// symmetric.
pub fn support_graph(gen: &GeneratorA) -> Result<Graph, GraphError> {
    let n = gen.params().n();
    let mut g = Graph::empty(n);
    for i in 0..n {
        for j in i + 1..n {
            let ij = !gen.block_is_zero(i, j);
            if ij != !gen.block_is_zero(j, i) {
                return Err(GraphError::AsymmetricSupport { i, j });
            }
            if ij {
                g.add_edge(i, j);
            }
        }
    }
    Ok(g)
}

/// Removes edges between full-degree nodes, paired lowest index first,
/// until the graph is `(n−2)`-regular.
pub fn reduce_to_regular(g: &Graph) -> Result<(Graph, Vec<[usize; 2]>), GraphError> {
    let n = g.n();
    if !n.is_multiple_of(2) || n < 2 {
        return Err(GraphError::NotApplicable(format!("n={n} must be even")));
    }
    if g.min_degree() + 2 < n {
        return Err(GraphError::NotApplicable(format!("min degree {} < n−2", g.min_degree())));
    }
    let full: Vec<usize> = (0..n).filter(|&u| g.degree(u) == n - 1).collect();
    // The missing edges form a matching on the other nodes, so `full` has even size.
    debug_assert!(full.len().is_multiple_of(2));
    let mut reduced = g.clone();
    let mut removed = Vec::with_capacity(full.len() / 2);
    for pair in full.chunks_exact(2) {
        reduced.remove_edge(pair[0], pair[1]);
        removed.push([pair[0], pair[1]]);
    }
    Ok((reduced, removed))
}

/// A code together with the node placement that fits it onto a topology.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PlanFile", into = "PlanFile")]
pub struct GraphCodePlan {
    pub relabeling: Vec<usize>,
    /// Edges of the input graph the code never uses.
    pub removed_edges: Vec<[usize; 2]>,
    pub code: GeneratorA,
}

#[derive(Serialize, Deserialize)]
struct PlanFile {
    relabeling: Vec<usize>,
    removed_edges: Vec<[usize; 2]>,
    code: CodeSpec,
}

impl TryFrom<PlanFile> for GraphCodePlan {
    type Error = GraphError;

    fn try_from(raw: PlanFile) -> Result<Self, GraphError> {
        let code = GeneratorA::from_spec(&raw.code)?;
        if !is_permutation(&raw.relabeling, code.params().n()) {
            return Err(GraphError::PlanInvalid("relabeling is not a permutation".into()));
        }
        Ok(GraphCodePlan { relabeling: raw.relabeling, removed_edges: raw.removed_edges, code })
    }
}

impl From<GraphCodePlan> for PlanFile {
    fn from(p: GraphCodePlan) -> Self {
        PlanFile { relabeling: p.relabeling, removed_edges: p.removed_edges, code: p.code.to_spec() }
    }
}

impl GraphCodePlan {
    /// Builds a plan for `code` placed by `relabeling` on `g`.
    pub fn new(g: &Graph, code: GeneratorA, relabeling: Vec<usize>) -> Result<Self, GraphError> {
        if !is_permutation(&relabeling, g.n()) || code.params().n() != g.n() {
            return Err(GraphError::PlanInvalid("relabeling is not a permutation of the graph's nodes".into()));
        }
        let used = support_graph(&code)?.relabel(&relabeling);
        if !used.is_subgraph_of(g) {
            return Err(GraphError::PlanInvalid("code needs an edge the graph lacks".into()));
        }
        let removed_edges = g.edges().into_iter().filter(|&[u, v]| !used.has_edge(u, v)).collect();
        Ok(GraphCodePlan { relabeling, removed_edges, code })
    }

    /// Physical support graph of the placed code.
    pub fn physical_support(&self) -> Result<Graph, GraphError> {
        Ok(support_graph(&self.code)?.relabel(&self.relabeling))
    }
}

/// Independent re-check of a plan: placement fits `g`, and the code is MDS
/// and lowest density.
pub fn verify_plan(plan: &GraphCodePlan, g: &Graph) -> Result<(), GraphError> {
    if !is_permutation(&plan.relabeling, g.n()) {
        return Err(GraphError::PlanInvalid("relabeling is not a permutation".into()));
    }
    if !plan.physical_support()?.is_subgraph_of(g) {
        return Err(GraphError::PlanInvalid("support not contained in graph".into()));
    }
    let report = check_mds_exhaustive(&plan.code, DEFAULT_BUDGET)?;
    if !report.is_mds {
        return Err(GraphError::PlanInvalid(format!("not MDS, failing set {:?}", report.failing_pattern)));
    }
    if !report.is_lowest_density {
        return Err(GraphError::PlanInvalid("not lowest density".into()));
    }
    Ok(())
}

/// `r = 2`, `n` even, min degree `≥ n−2`. After reduction the missing edges
/// form a perfect matching; pair `t = (u, v)` (sorted by `u`) is placed at
/// canonical indices `t` and `t + n/2`, whose block is zero.
pub fn plan_r2_code(g: &Graph) -> Result<GraphCodePlan, GraphError> {
    let n = g.n();
    if n < 4 {
        return Err(GraphError::NotApplicable(format!("n={n} too small for r=2")));
    }
    let (reduced, _) = reduce_to_regular(g)?;
    let matching = reduced.complement();
    if !matching.is_regular(1) {
        return Err(GraphError::NotApplicable("complement of reduced graph is not a perfect matching".into()));
    }
    let half = n / 2;
    let mut relabeling = vec![0; n];
    for (t, [u, v]) in matching.edges().into_iter().enumerate() {
        relabeling[t] = u;
        relabeling[t + half] = v;
    }
    let code = design_code(n, 2, None)?;
    GraphCodePlan::new(g, code, relabeling)
}

struct Embedding<'a> {
    pattern: &'a Graph,
    target: &'a Graph,
    pdeg: Vec<usize>,
    tdeg: Vec<usize>,
    map: Vec<usize>,
    used: Vec<bool>,
    steps: u64,
    budget: u64,
}

impl Embedding<'_> {
    fn extend(&mut self, a: usize) -> Result<bool, GraphError> {
        let n = self.map.len();
        if a == n {
            return Ok(true);
        }
        for x in 0..n {
            if self.used[x] || self.tdeg[x] < self.pdeg[a] {
                continue;
            }
            self.steps += 1;
            if self.steps > self.budget {
                return Err(GraphError::BudgetExceeded { budget: self.budget });
            }
            if (0..a).all(|b| !self.pattern.has_edge(a, b) || self.target.has_edge(x, self.map[b])) {
                self.map[a] = x;
                self.used[x] = true;
                if self.extend(a + 1)? {
                    return Ok(true);
                }
                self.used[x] = false;
            }
        }
        Ok(false)
    }
}

/// Injective map of `pattern` into `target` preserving edges, by
/// backtracking with pattern vertices in index order.
pub fn find_embedding(pattern: &Graph, target: &Graph, step_budget: u64) -> Result<Option<Vec<usize>>, GraphError> {
    let n = pattern.n();
    if target.n() != n {
        return Ok(None);
    }
    let mut search = Embedding {
        pattern,
        target,
        pdeg: pattern.degrees(),
        tdeg: target.degrees(),
        map: vec![usize::MAX; n],
        used: vec![false; n],
        steps: 0,
        budget: step_budget,
    };
    Ok(search.extend(0)?.then_some(search.map))
}

/// Places the canonical `[n, n−r]` code on `g` by subgraph search. `NotFound`
/// only means this one support class does not fit.
pub fn plan_divisible_code(g: &Graph, r: usize) -> Result<GraphCodePlan, GraphError> {
    let n = g.n();
    if r == 0 || r >= n || !n.is_multiple_of(r) {
        return Err(GraphError::NotApplicable(format!("r={r} must divide n={n}")));
    }
    plan_canonical_embedding(g, r)
}

/// As [`plan_divisible_code`] without the divisibility requirement.
pub fn plan_canonical_embedding(g: &Graph, r: usize) -> Result<GraphCodePlan, GraphError> {
    let n = g.n();
    if n > MAX_SEARCH_NODES {
        return Err(GraphError::NotApplicable(format!("n={n} exceeds search limit {MAX_SEARCH_NODES}")));
    }
    let code = design_code(n, r, None)?;
    if !min_degree_ok(g, code.params().k(), r) {
        return Err(GraphError::NotFound);
    }
    let pattern = support_graph(&code)?;
    match find_embedding(&pattern, g, SEARCH_STEP_BUDGET)? {
        Some(relabeling) => GraphCodePlan::new(g, code, relabeling),
        None => Err(GraphError::NotFound),
    }
}

/// Places a given code on `g`: the identity placement if it fits, otherwise
/// the first embedding of its support graph.
pub fn place_code(g: &Graph, code: GeneratorA) -> Result<GraphCodePlan, GraphError> {
    let n = g.n();
    if code.params().n() != n {
        return Err(GraphError::NotApplicable(format!("code has {} nodes, graph {n}", code.params().n())));
    }
    let pattern = support_graph(&code)?;
    if pattern.is_subgraph_of(g) {
        return GraphCodePlan::new(g, code, (0..n).collect());
    }
    if n > MAX_SEARCH_NODES {
        return Err(GraphError::NotApplicable(format!("n={n} exceeds search limit {MAX_SEARCH_NODES}")));
    }
    match find_embedding(&pattern, g, SEARCH_STEP_BUDGET)? {
        Some(relabeling) => GraphCodePlan::new(g, code, relabeling),
        None => Err(GraphError::NotFound),
    }
}

/// Failure sets whose `A_F` is structurally singular for this support.
fn singular_sets(support: &[Vec<bool>], sets: &[Vec<usize>], n: usize) -> BTreeSet<usize> {
    sets.iter()
        .enumerate()
        .filter(|(_, f)| {
            let s = complement(n, f);
            let sub: Vec<Vec<bool>> = f.iter().map(|&i| s.iter().map(|&j| support[i][j]).collect()).collect();
            structurally_singular(&sub)
        })
        .map(|(idx, _)| idx)
        .collect()
}

/// Enumerates 0/1 supports with zero diagonal inside the adjacency, row sums
/// `r` and column sums `k`, calling `visit` on each until it returns false.
fn for_each_support(
    g: &Graph,
    k: usize,
    r: usize,
    budget: u64,
    mut visit: impl FnMut(&[Vec<bool>]) -> bool,
) -> Result<u64, GraphError> {
    let n = g.n();
    let mut support = vec![vec![false; n]; n];
    let mut col_left = vec![k; n];
    let mut count = 0u64;
    let mut stop = false;

    #[allow(clippy::too_many_arguments)]
    fn row(
        i: usize,
        g: &Graph,
        r: usize,
        support: &mut Vec<Vec<bool>>,
        col_left: &mut Vec<usize>,
        count: &mut u64,
        budget: u64,
        stop: &mut bool,
        visit: &mut dyn FnMut(&[Vec<bool>]) -> bool,
    ) -> Result<(), GraphError> {
        let n = g.n();
        if i == n {
            *count += 1;
            if *count > budget {
                return Err(GraphError::BudgetExceeded { budget });
            }
            if !visit(support) {
                *stop = true;
            }
            return Ok(());
        }
        // Remaining rows must be able to fill every column.
        if col_left.iter().any(|&c| c > n - i) {
            return Ok(());
        }
        let cands: Vec<usize> = (0..n).filter(|&j| g.has_edge(i, j) && col_left[j] > 0).collect();
        for cols in colex(cands.len(), r) {
            let chosen: Vec<usize> = cols.iter().map(|&c| cands[c]).collect();
            for &j in &chosen {
                support[i][j] = true;
                col_left[j] -= 1;
            }
            row(i + 1, g, r, support, col_left, count, budget, stop, visit)?;
            for &j in &chosen {
                support[i][j] = false;
                col_left[j] += 1;
            }
            if *stop {
                break;
            }
        }
        Ok(())
    }

    row(0, g, r, &mut support, &mut col_left, &mut count, budget, &mut stop, &mut visit)?;
    Ok(count)
}

/// Structural nonexistence proof for `k = r` (one symbol per node): a failure
/// set `F` for which every lowest-density support the graph allows leaves
/// `A_F` without a perfect matching. `None` is inconclusive, or the canonical
/// code fits.
pub fn graph_admits_no_ld_mds(g: &Graph, k: usize, r: usize) -> Result<Option<Vec<usize>>, GraphError> {
    let n = g.n();
    if k != r || k + r != n {
        return Err(GraphError::NotApplicable(format!("needs k = r = n/2, got n={n} k={k} r={r}")));
    }
    match plan_canonical_embedding(g, r) {
        Ok(_) => return Ok(None),
        Err(GraphError::NotFound) | Err(GraphError::NotApplicable(_)) => {}
        Err(e) => return Err(e),
    }
    let sets: Vec<Vec<usize>> = colex(n, r).collect();
    let adjacency: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| g.has_edge(i, j)).collect()).collect();
    // Every admissible support lies inside the adjacency.
    if let Some(&first) = singular_sets(&adjacency, &sets, n).iter().next() {
        return Ok(Some(sets[first].clone()));
    }
    let mut common: Option<BTreeSet<usize>> = None;
    for_each_support(g, k, r, ASSIGNMENT_BUDGET, |support| {
        let here = singular_sets(support, &sets, n);
        let next: BTreeSet<usize> = match &common {
            None => here,
            Some(c) => c.intersection(&here).copied().collect(),
        };
        let keep_going = !next.is_empty();
        common = Some(next);
        keep_going
    })?;
    Ok(match common {
        // No admissible support at all: every failure set is a witness.
        None => sets.first().cloned(),
        Some(c) => c.iter().next().map(|&idx| sets[idx].clone()),
    })
}

/// Outcome of analysing a topology for `r` tolerated failures.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum GraphVerdict {
    Plan { plan: GraphCodePlan },
    Impossible { reason: String, witness: Option<Vec<usize>> },
    NotFound { reason: String },
}

/// Tries, in order: the degree bound, the `r = 2` construction, the
/// canonical embedding, and for `k = r` the structural nonexistence search.
pub fn analyze_graph(g: &Graph, r: usize) -> Result<GraphVerdict, GraphError> {
    let n = g.n();
    if r == 0 || r >= n {
        return Err(GraphError::NotApplicable(format!("need 1 ≤ r < n, got n={n} r={r}")));
    }
    let k = n - r;
    if !min_degree_ok(g, k, r) {
        return Ok(GraphVerdict::Impossible {
            reason: format!("min degree {} < max(k, r) = {}", g.min_degree(), k.max(r)),
            witness: None,
        });
    }
    if r == 2 && n.is_multiple_of(2) && g.min_degree() + 2 >= n {
        return Ok(GraphVerdict::Plan { plan: plan_r2_code(g)? });
    }
    match plan_canonical_embedding(g, r) {
        Ok(plan) => return Ok(GraphVerdict::Plan { plan }),
        Err(GraphError::NotFound) => {}
        Err(GraphError::NotApplicable(reason)) => return Ok(GraphVerdict::NotFound { reason }),
        Err(e) => return Err(e),
    }
    if k == r {
        match graph_admits_no_ld_mds(g, k, r) {
            Ok(Some(witness)) => {
                return Ok(GraphVerdict::Impossible {
                    reason: "failure set is structurally singular for every admissible support".into(),
                    witness: Some(witness),
                })
            }
            Ok(None) | Err(GraphError::BudgetExceeded { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(GraphVerdict::NotFound { reason: "canonical support does not embed; existence undecided".into() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{build_generator, derive_params};
    use crate::field::{Matrix, PrimeField};

    fn six_node_matching_complement() -> Graph {
        let mut g = Graph::complete(6);
        for (u, v) in [(0, 1), (2, 3), (4, 5)] {
            g.remove_edge(u, v);
        }
        g
    }

    #[test]
    fn json_round_trip_and_validation() {
        let g = Graph::cycle(4);
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"n":4,"edges":[[0,1],[0,3],[1,2],[2,3]]}"#);
        assert_eq!(serde_json::from_str::<Graph>(&s).unwrap(), g);
        for bad in [
            r#"{"n":3,"edges":[[1,0]]}"#,
            r#"{"n":3,"edges":[[1,1]]}"#,
            r#"{"n":3,"edges":[[0,3]]}"#,
            r#"{"n":3,"edges":[[0,1],[0,1]]}"#,
        ] {
            assert!(serde_json::from_str::<Graph>(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn degree_condition() {
        assert!(min_degree_ok(&Graph::complete(4), 2, 2));
        assert!(min_degree_ok(&Graph::cycle(4), 2, 2));
        let mut g = Graph::complete(8);
        g.remove_edge(3, 6);
        assert!(!min_degree_ok(&g, 7, 1));
        assert!(min_degree_ok(&Graph::complete(8), 7, 1));
    }

    #[test]
    fn support_graphs() {
        let f3 = PrimeField::new(3).unwrap();
        let params = derive_params(4, 2).unwrap().with_field(3).unwrap();
        let gen = build_generator(params, Matrix::from_rows(f3, &[vec![1, 1], vec![1, 2]]).unwrap()).unwrap();
        let sg = support_graph(&gen).unwrap();
        assert_eq!(sg.edges(), vec![[0, 1], [0, 3], [1, 2], [2, 3]]);

        assert!(support_graph(&design_code(8, 3, None).unwrap()).unwrap().is_complete());

        let sg6 = support_graph(&design_code(6, 2, None).unwrap()).unwrap();
        assert!(sg6.is_regular(4));
        assert_eq!(sg6.complement().edges(), vec![[0, 3], [1, 4], [2, 5]]);
    }

    #[test]
    fn reduction_examples() {
        let (c4, removed) = reduce_to_regular(&Graph::complete(4)).unwrap();
        assert_eq!(removed, vec![[0, 1], [2, 3]]);
        assert!(c4.is_regular(2));

        let g = six_node_matching_complement();
        assert_eq!(reduce_to_regular(&g).unwrap(), (g.clone(), vec![]));

        let mut one_missing = Graph::complete(6);
        one_missing.remove_edge(2, 5);
        let (red, removed) = reduce_to_regular(&one_missing).unwrap();
        assert_eq!(removed.len(), 2);
        assert!(red.is_regular(4) && red.is_subgraph_of(&one_missing));

        assert!(matches!(reduce_to_regular(&Graph::complete(5)), Err(GraphError::NotApplicable(_))));
        assert!(matches!(reduce_to_regular(&Graph::cycle(6)), Err(GraphError::NotApplicable(_))));
    }

    #[test]
    fn r2_plans() {
        let plan = plan_r2_code(&Graph::cycle(4)).unwrap();
        // The cycle 0-1-2-3 misses {0,2} and {1,3}: placement is the identity.
        assert_eq!(plan.relabeling, vec![0, 1, 2, 3]);
        assert!(plan.removed_edges.is_empty());
        verify_plan(&plan, &Graph::cycle(4)).unwrap();

        let plan = plan_r2_code(&Graph::complete(4)).unwrap();
        verify_plan(&plan, &Graph::complete(4)).unwrap();
        assert_eq!(plan.removed_edges.len(), 2);

        let g = six_node_matching_complement();
        let plan = plan_r2_code(&g).unwrap();
        // Physical pairs {0,1}, {2,3}, {4,5} sit at canonical (0,3), (1,4), (2,5).
        assert_eq!(plan.relabeling, vec![0, 2, 4, 1, 3, 5]);
        verify_plan(&plan, &g).unwrap();
    }

    #[test]
    fn plan_json_round_trip() {
        let plan = plan_r2_code(&six_node_matching_complement()).unwrap();
        let s = serde_json::to_string(&plan).unwrap();
        assert!(s.contains(r#""relabeling":[0,2,4,1,3,5]"#));
        assert_eq!(serde_json::from_str::<GraphCodePlan>(&s).unwrap(), plan);
        let bad = s.replace("[0,2,4,1,3,5]", "[0,0,4,1,3,5]");
        assert!(serde_json::from_str::<GraphCodePlan>(&bad).is_err());
    }

    #[test]
    fn plan_rejects_missing_edge() {
        let code = design_code(4, 2, None).unwrap();
        let mut g = Graph::cycle(4);
        g.remove_edge(0, 1);
        assert!(matches!(GraphCodePlan::new(&g, code, vec![0, 1, 2, 3]), Err(GraphError::PlanInvalid(_))));
    }

    #[test]
    fn divisible_plans_on_complete_graphs() {
        for (n, r) in [(4, 2), (6, 3), (8, 4), (9, 3), (6, 1)] {
            let g = Graph::complete(n);
            let plan = plan_divisible_code(&g, r).unwrap();
            assert_eq!(plan.relabeling, (0..n).collect::<Vec<_>>());
            verify_plan(&plan, &g).unwrap();
        }
        assert!(matches!(plan_divisible_code(&Graph::complete(8), 3), Err(GraphError::NotApplicable(_))));
    }

    #[test]
    fn r1_needs_complete_graph() {
        let mut g = Graph::complete(5);
        g.remove_edge(1, 4);
        assert_eq!(plan_divisible_code(&g, 1), Err(GraphError::NotFound));
        assert!(plan_divisible_code(&Graph::complete(5), 1).is_ok());
    }

    #[test]
    fn embedding_search_respects_budget() {
        let pattern = Graph::complete(6);
        let mut target = Graph::complete(6);
        target.remove_edge(4, 5);
        assert_eq!(find_embedding(&pattern, &target, 1_000_000).unwrap(), None);
        assert_eq!(find_embedding(&pattern, &target, 3), Err(GraphError::BudgetExceeded { budget: 3 }));
    }

    #[test]
    fn nonexistence_search_trivial_cases() {
        assert_eq!(graph_admits_no_ld_mds(&Graph::complete(8), 4, 4).unwrap(), None);
        assert_eq!(graph_admits_no_ld_mds(&Graph::cycle(4), 2, 2).unwrap(), None);
        assert!(graph_admits_no_ld_mds(&Graph::complete(8), 5, 3).is_err());
    }

    #[test]
    fn support_enumeration_counts() {
        // On K_4 with k = r = 2 the supports are the 0/1 matrices with zero
        // diagonal and all line sums 2: complements of the 9 derangements.
        let n = for_each_support(&Graph::complete(4), 2, 2, 1000, |_| true).unwrap();
        assert_eq!(n, 9);
        // The 4-cycle forces the unique support of its adjacency.
        let n = for_each_support(&Graph::cycle(4), 2, 2, 1000, |_| true).unwrap();
        assert_eq!(n, 1);
    }

    #[test]
    fn verdicts() {
        assert!(matches!(analyze_graph(&Graph::cycle(4), 2).unwrap(), GraphVerdict::Plan { .. }));
        assert!(matches!(analyze_graph(&Graph::cycle(5), 2).unwrap(), GraphVerdict::Impossible { witness: None, .. }));
        let v = serde_json::to_value(analyze_graph(&Graph::cycle(4), 2).unwrap()).unwrap();
        assert_eq!(v["status"], "plan");
    }
}
