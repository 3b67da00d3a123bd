//! Seed identification as weighted graph matching.
//!
//! The top-k in-degree hubs of each crawl define a k×k weight matrix; a node
//! correspondence between the two hub sets is scored by the L1 disagreement
//! of the permuted matrices. Simulated annealing searches the permutation
//! space; an exhaustive matcher doubles as the oracle for small k.

use std::io::{BufWriter, Write};
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, NodeId, NodeMapping};
use crate::rng::{derive_stream, make_rng};

/// How hub-to-hub weights are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightMode {
    /// Cosine similarity of hub in-neighborhoods: shared-fan structure, the
    /// signal that survives partial crawls.
    Cosine,
    /// Raw hub-to-hub edge indicator; diagnostic baseline.
    Edge,
}

impl std::str::FromStr for WeightMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cosine" => Ok(WeightMode::Cosine),
            "edge" => Ok(WeightMode::Edge),
            other => Err(Error::InvalidArgument(format!(
                "unknown weight mode {other:?} (expected cosine|edge)"
            ))),
        }
    }
}

/// k hub nodes plus the k×k non-negative weight matrix over them
/// (zero diagonal).
#[derive(Debug, Clone)]
pub struct SeedWeightMatrix {
    nodes: Vec<NodeId>,
    w: Vec<f64>, // row-major k×k
}

impl SeedWeightMatrix {
    pub fn from_raw(nodes: Vec<NodeId>, w: Vec<f64>) -> Result<Self> {
        let k = nodes.len();
        if w.len() != k * k {
            return Err(Error::DimensionMismatch {
                expected: k * k,
                got: w.len(),
            });
        }
        for (idx, &x) in w.iter().enumerate() {
            if !x.is_finite() || x < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "weight[{},{}] = {x} is not a finite non-negative value",
                    idx / k,
                    idx % k
                )));
            }
        }
        for i in 0..k {
            if w[i * k + i] != 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "weight diagonal [{i},{i}] must be zero"
                )));
            }
        }
        Ok(Self { nodes, w })
    }

    pub fn k(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.w[i * self.k() + j]
    }

    fn transposed(&self) -> Vec<f64> {
        let k = self.k();
        let mut t = vec![0.0; k * k];
        for i in 0..k {
            for j in 0..k {
                t[j * k + i] = self.w[i * k + j];
            }
        }
        t
    }
}

fn sorted_intersection_size(a: &[NodeId], b: &[NodeId]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Weight matrix over the top-k in-degree hubs of `g`.
pub fn build_seed_weights(
    g: &DirectedGraph,
    k: usize,
    mode: WeightMode,
) -> Result<SeedWeightMatrix> {
    let hubs = g.top_k_in_degree(k)?;
    let fans: Vec<&[NodeId]> = hubs
        .iter()
        .map(|&h| g.in_neighbors(h))
        .collect::<Result<_>>()?;
    let mut w = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            if i == j {
                continue;
            }
            w[i * k + j] = match mode {
                WeightMode::Cosine => {
                    let (a, b) = (fans[i], fans[j]);
                    if a.is_empty() || b.is_empty() {
                        0.0
                    } else {
                        sorted_intersection_size(a, b) as f64
                            / ((a.len() as f64) * (b.len() as f64)).sqrt()
                    }
                }
                WeightMode::Edge => {
                    if g.has_edge(hubs[i], hubs[j]) {
                        1.0
                    } else {
                        0.0
                    }
                }
            };
        }
    }
    SeedWeightMatrix::from_raw(hubs, w)
}

/// A hub permutation (position i of A matched to perm\[i\] of B) and its cost.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchingState {
    pub perm: Vec<usize>,
    pub cost: f64,
}

fn check_same_k(a: &SeedWeightMatrix, b: &SeedWeightMatrix) -> Result<usize> {
    if a.k() != b.k() {
        return Err(Error::DimensionMismatch {
            expected: a.k(),
            got: b.k(),
        });
    }
    Ok(a.k())
}

fn check_perm(perm: &[usize], k: usize) -> Result<()> {
    if perm.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: perm.len(),
        });
    }
    let mut seen = vec![false; k];
    for &p in perm {
        if p >= k || seen[p] {
            return Err(Error::InvalidArgument(format!(
                "{perm:?} is not a permutation of 0..{k}"
            )));
        }
        seen[p] = true;
    }
    Ok(())
}

/// L1 disagreement of the off-diagonal entries:
/// Σ_{i≠j} |A[i][j] − B[perm(i)][perm(j)]|.
pub fn matching_cost(a: &SeedWeightMatrix, b: &SeedWeightMatrix, perm: &[usize]) -> Result<f64> {
    let k = check_same_k(a, b)?;
    check_perm(perm, k)?;
    Ok(cost_raw(&a.w, &b.w, perm, k))
}

fn cost_raw(a: &[f64], b: &[f64], perm: &[usize], k: usize) -> f64 {
    let mut total = 0.0;
    for i in 0..k {
        let arow = &a[i * k..(i + 1) * k];
        let brow = &b[perm[i] * k..(perm[i] + 1) * k];
        for j in 0..k {
            if i != j {
                total += (arow[j] - brow[perm[j]]).abs();
            }
        }
    }
    total
}

/// Cost change from swapping `perm[p]` and `perm[q]`, computed from the 4k−6
/// affected off-diagonal terms. `at`/`bt` are the transposed matrices, so
/// every inner access is row-contiguous.
#[inline]
#[allow(clippy::too_many_arguments)]
fn delta_swap(
    a: &[f64],
    at: &[f64],
    b: &[f64],
    bt: &[f64],
    perm: &[usize],
    k: usize,
    p: usize,
    q: usize,
) -> f64 {
    let (sp, sq) = (perm[p], perm[q]);
    let arow_p = &a[p * k..(p + 1) * k];
    let arow_q = &a[q * k..(q + 1) * k];
    let acol_p = &at[p * k..(p + 1) * k];
    let acol_q = &at[q * k..(q + 1) * k];
    let brow_sp = &b[sp * k..(sp + 1) * k];
    let brow_sq = &b[sq * k..(sq + 1) * k];
    let bcol_sp = &bt[sp * k..(sp + 1) * k];
    let bcol_sq = &bt[sq * k..(sq + 1) * k];

    let mut delta = 0.0;
    for j in 0..k {
        if j == p || j == q {
            continue;
        }
        let sj = perm[j];
        delta += (arow_p[j] - brow_sq[sj]).abs() - (arow_p[j] - brow_sp[sj]).abs();
        delta += (arow_q[j] - brow_sp[sj]).abs() - (arow_q[j] - brow_sq[sj]).abs();
        delta += (acol_p[j] - bcol_sq[sj]).abs() - (acol_p[j] - bcol_sp[sj]).abs();
        delta += (acol_q[j] - bcol_sp[sj]).abs() - (acol_q[j] - bcol_sq[sj]).abs();
    }
    delta += (arow_p[q] - brow_sq[sp]).abs() - (arow_p[q] - brow_sp[sq]).abs();
    delta += (arow_q[p] - brow_sp[sq]).abs() - (arow_q[p] - brow_sq[sp]).abs();
    delta
}

/// Annealing schedule and chain parameters.
#[derive(Debug, Clone)]
pub struct AnnealConfig {
    pub k: usize,
    pub initial_temp: f64,
    pub cooling: f64,
    pub steps_per_temp: usize,
    pub min_temp: f64,
    pub restarts: usize,
    pub seed: u64,
}

/// Ratio of min_temp to initial_temp in the default schedule.
pub const DEFAULT_MIN_TEMP_RATIO: f64 = 1e-4;
pub const DEFAULT_COOLING: f64 = 0.98;
pub const DEFAULT_RESTARTS: usize = 20;

impl AnnealConfig {
    /// Default schedule for a given instance: initial temperature from the
    /// mean off-diagonal |A−B| entry magnitude (falling back to the mean
    /// entry magnitude when the matrices coincide), cooling 0.98,
    /// 100·k steps per temperature, min_temp 1e-4·initial, 20 restarts.
    pub fn defaults(a: &SeedWeightMatrix, b: &SeedWeightMatrix, seed: u64) -> Result<Self> {
        let k = check_same_k(a, b)?;
        let off = (k * k - k) as f64;
        let mut diff = 0.0;
        let mut mag = 0.0;
        for i in 0..k {
            for j in 0..k {
                if i != j {
                    diff += (a.get(i, j) - b.get(i, j)).abs();
                    mag += 0.5 * (a.get(i, j).abs() + b.get(i, j).abs());
                }
            }
        }
        let mut initial_temp = diff / off.max(1.0);
        if initial_temp < 1e-12 {
            // A == B elementwise; use the entry scale so the chain still mixes.
            initial_temp = (mag / off.max(1.0)).max(1e-9);
        }
        Ok(Self {
            k,
            initial_temp,
            cooling: DEFAULT_COOLING,
            steps_per_temp: 100 * k,
            min_temp: DEFAULT_MIN_TEMP_RATIO * initial_temp,
            restarts: DEFAULT_RESTARTS,
            seed,
        })
    }

    fn validate(&self, k: usize) -> Result<()> {
        if self.k != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: self.k,
            });
        }
        if !(self.initial_temp > 0.0 && self.initial_temp.is_finite()) {
            return Err(Error::InvalidConfig("initial_temp must be positive".into()));
        }
        if !(self.cooling > 0.0 && self.cooling < 1.0) {
            return Err(Error::InvalidConfig("cooling must be in (0,1)".into()));
        }
        if self.steps_per_temp == 0 {
            return Err(Error::InvalidConfig("steps_per_temp must be >= 1".into()));
        }
        if !(self.min_temp > 0.0 && self.min_temp.is_finite()) {
            return Err(Error::InvalidConfig("min_temp must be positive".into()));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be >= 1".into()));
        }
        Ok(())
    }
}

// Costs are sums of |·| terms, so zero is a global optimum; a chain that
// reaches it cannot improve further.
const ZERO_COST_EPS: f64 = 1e-12;
// A chain at a strict local minimum whose cheapest uphill move is this many
// temperature units away is effectively frozen for the rest of the schedule.
const FROZEN_EXP: f64 = 40.0;

fn run_chain(
    a: &SeedWeightMatrix,
    at: &[f64],
    b: &SeedWeightMatrix,
    bt: &[f64],
    cfg: &AnnealConfig,
    chain: u64,
) -> MatchingState {
    let k = cfg.k;
    let mut rng = make_rng(derive_stream(cfg.seed, chain));

    let mut perm: Vec<usize> = (0..k).collect();
    for i in (1..k).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    let mut cost = cost_raw(&a.w, &b.w, &perm, k);
    let mut best_perm = perm.clone();
    let mut best_cost = cost;

    let mut temp = cfg.initial_temp;
    'schedule: while temp >= cfg.min_temp {
        for _ in 0..cfg.steps_per_temp {
            let p = rng.gen_range(0..k);
            let mut q = rng.gen_range(0..k - 1);
            if q >= p {
                q += 1;
            }
            let d = delta_swap(&a.w, at, &b.w, bt, &perm, k, p, q);
            let accept = d <= 0.0 || rng.gen::<f64>() < (-d / temp).exp();
            if accept {
                perm.swap(p, q);
                cost += d;
                if cost < best_cost {
                    best_cost = cost;
                    best_perm.copy_from_slice(&perm);
                    if best_cost <= ZERO_COST_EPS {
                        break 'schedule;
                    }
                }
            }
        }
        // Full recompute at level boundaries kills incremental drift.
        cost = cost_raw(&a.w, &b.w, &perm, k);
        if cost < best_cost {
            best_cost = cost;
            best_perm.copy_from_slice(&perm);
        }
        temp *= cfg.cooling;

        // Early out once no move can realistically be accepted any more:
        // strict local minimum and the cheapest uphill move is >> temp.
        let mut min_d = f64::INFINITY;
        for p in 0..k {
            for q in (p + 1)..k {
                let d = delta_swap(&a.w, at, &b.w, bt, &perm, k, p, q);
                if d < min_d {
                    min_d = d;
                }
            }
        }
        if min_d > 0.0 && min_d > FROZEN_EXP * temp {
            break;
        }
    }

    let final_cost = cost_raw(&a.w, &b.w, &best_perm, k);
    MatchingState {
        perm: best_perm,
        cost: final_cost,
    }
}

/// Simulated annealing over hub permutations: transposition proposals,
/// Metropolis acceptance, geometric cooling, independent restart chains with
/// per-chain RNG streams. Returns the lowest-cost state seen across chains
/// (ties to the lowest chain index), deterministically in `cfg.seed` and
/// independently of thread count.
pub fn anneal(
    a: &SeedWeightMatrix,
    b: &SeedWeightMatrix,
    cfg: &AnnealConfig,
) -> Result<MatchingState> {
    let k = check_same_k(a, b)?;
    if k < 2 {
        return Err(Error::KOutOfRange {
            k,
            min: 2,
            max: usize::MAX,
        });
    }
    cfg.validate(k)?;

    let at = a.transposed();
    let bt = b.transposed();
    let chains: Vec<MatchingState> = (0..cfg.restarts as u64)
        .into_par_iter()
        .map(|chain| run_chain(a, &at, b, &bt, cfg, chain))
        .collect();

    let best = chains
        .into_iter()
        .enumerate()
        .min_by(|(i, x), (j, y)| {
            x.cost
                .partial_cmp(&y.cost)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(i.cmp(j))
        })
        .map(|(_, s)| s)
        .expect("restarts >= 1");
    Ok(best)
}

/// Exact minimizer by exhaustive enumeration in lexicographic order, so ties
/// resolve to the lexicographically smallest permutation. Guarded at k ≤ 10.
pub fn brute_force_match(a: &SeedWeightMatrix, b: &SeedWeightMatrix) -> Result<MatchingState> {
    let k = check_same_k(a, b)?;
    if k < 2 || k > 10 {
        return Err(Error::KOutOfRange { k, min: 2, max: 10 });
    }

    let mut best: Option<MatchingState> = None;
    let mut perm: Vec<usize> = (0..k).collect();
    loop {
        let cost = cost_raw(&a.w, &b.w, &perm, k);
        if best.as_ref().map_or(true, |s| cost < s.cost) {
            best = Some(MatchingState {
                perm: perm.clone(),
                cost,
            });
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(best.expect("k >= 2 enumerates at least two permutations"))
}

/// Advances to the lexicographic successor; false when perm was the last one.
fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// Turns a hub permutation into the seed node mapping
/// A.nodes[i] ↦ B.nodes[perm(i)].
pub fn seeds_to_mapping(
    a: &SeedWeightMatrix,
    b: &SeedWeightMatrix,
    state: &MatchingState,
) -> Result<NodeMapping> {
    let k = check_same_k(a, b)?;
    check_perm(&state.perm, k)?;
    NodeMapping::from_pairs(
        state
            .perm
            .iter()
            .enumerate()
            .map(|(i, &p)| (a.nodes[i], b.nodes[p])),
    )
}

/// Debug dump of a matching instance: k, both hub lists, both matrices.
pub fn dump_matching_instance(
    a: &SeedWeightMatrix,
    b: &SeedWeightMatrix,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let k = check_same_k(a, b)?;
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let emit = |w: &mut BufWriter<std::fs::File>, name: &str, m: &SeedWeightMatrix| -> Result<()> {
        let ids: Vec<String> = m.nodes().iter().map(|n| n.to_string()).collect();
        writeln!(w, "nodes_{name},{}", ids.join(",")).map_err(|e| Error::io(path, e))?;
        for i in 0..k {
            let row: Vec<String> = (0..k).map(|j| m.get(i, j).to_string()).collect();
            writeln!(w, "w_{name}_{i},{}", row.join(",")).map_err(|e| Error::io(path, e))?;
        }
        Ok(())
    };
    writeln!(w, "k,{k}").map_err(|e| Error::io(path, e))?;
    emit(&mut w, "a", a)?;
    emit(&mut w, "b", b)?;
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;
    use rand::Rng;

    fn n(v: u64) -> NodeId {
        NodeId(v)
    }

    fn random_matrix(k: usize, rng: &mut impl Rng) -> SeedWeightMatrix {
        let mut w = vec![0.0; k * k];
        for i in 0..k {
            for j in 0..k {
                if i != j {
                    w[i * k + j] = rng.gen::<f64>();
                }
            }
        }
        SeedWeightMatrix::from_raw((0..k as u64).map(NodeId).collect(), w).unwrap()
    }

    /// B = A with rows/cols reindexed by pi: B[pi(i)][pi(j)] = A[i][j], so pi
    /// itself is a zero-cost matching.
    fn reindexed(a: &SeedWeightMatrix, pi: &[usize]) -> SeedWeightMatrix {
        let k = a.k();
        let mut w = vec![0.0; k * k];
        for i in 0..k {
            for j in 0..k {
                w[pi[i] * k + pi[j]] = a.get(i, j);
            }
        }
        SeedWeightMatrix::from_raw((0..k as u64).map(NodeId).collect(), w).unwrap()
    }

    fn random_perm(k: usize, rng: &mut impl Rng) -> Vec<usize> {
        let mut p: Vec<usize> = (0..k).collect();
        for i in (1..k).rev() {
            p.swap(i, rng.gen_range(0..=i));
        }
        p
    }

    #[test]
    fn cosine_weights_on_fixture() {
        // hubs 100 and 200; fans of 100 = {1,2,3}, fans of 200 = {2,3,4}
        let mut b = GraphBuilder::new();
        for f in [1u64, 2, 3] {
            b.add_edge(n(f), n(100)).unwrap();
        }
        for f in [2u64, 3, 4] {
            b.add_edge(n(f), n(200)).unwrap();
        }
        let g = b.freeze();
        let m = build_seed_weights(&g, 2, WeightMode::Cosine).unwrap();
        assert_eq!(m.nodes(), &[n(100), n(200)]);
        let expect = 2.0 / 9.0_f64.sqrt();
        assert!((m.get(0, 1) - expect).abs() < 1e-12, "got {}", m.get(0, 1));
        assert_eq!(m.get(0, 0), 0.0);
    }

    #[test]
    fn cosine_identical_and_disjoint_fans() {
        let mut b = GraphBuilder::new();
        for f in [1u64, 2] {
            b.add_edge(n(f), n(100)).unwrap();
            b.add_edge(n(f), n(200)).unwrap();
        }
        b.add_edge(n(7), n(300)).unwrap();
        b.add_edge(n(8), n(300)).unwrap();
        b.add_edge(n(9), n(300)).unwrap();
        let g = b.freeze();
        let m = build_seed_weights(&g, 3, WeightMode::Cosine).unwrap();
        // top-3 by in-degree: 300 (3), then 100, 200 (2 each)
        assert_eq!(m.nodes(), &[n(300), n(100), n(200)]);
        assert!((m.get(1, 2) - 1.0).abs() < 1e-12); // identical fans
        assert_eq!(m.get(0, 1), 0.0); // disjoint fans
    }

    #[test]
    fn edge_mode_indicators() {
        let g = DirectedGraph::from_edges([(1, 2), (3, 2), (3, 1), (4, 1), (4, 3)]).unwrap();
        // in-degrees: 1←{3,4}=2, 2←{1,3}=2, 3←{4}=1
        let m = build_seed_weights(&g, 3, WeightMode::Edge).unwrap();
        assert_eq!(m.nodes(), &[n(1), n(2), n(3)]);
        assert_eq!(m.get(0, 1), 1.0); // 1→2
        assert_eq!(m.get(1, 0), 0.0);
        assert_eq!(m.get(2, 0), 1.0); // 3→1
    }

    #[test]
    fn k_out_of_range_rejected() {
        let g = DirectedGraph::from_edges([(1, 2)]).unwrap();
        assert!(build_seed_weights(&g, 3, WeightMode::Cosine).is_err());
    }

    #[test]
    fn matching_cost_identity_zero() {
        let mut rng = make_rng(1);
        let a = random_matrix(5, &mut rng);
        let id: Vec<usize> = (0..5).collect();
        assert_eq!(matching_cost(&a, &a, &id).unwrap(), 0.0);
    }

    #[test]
    fn matching_cost_k2_enumeration() {
        let a = SeedWeightMatrix::from_raw(vec![n(0), n(1)], vec![0.0, 1.0, 0.0, 0.0]).unwrap();
        let b = SeedWeightMatrix::from_raw(vec![n(0), n(1)], vec![0.0, 0.0, 1.0, 0.0]).unwrap();
        assert_eq!(matching_cost(&a, &b, &[1, 0]).unwrap(), 0.0);
        assert_eq!(matching_cost(&a, &b, &[0, 1]).unwrap(), 2.0);
    }

    #[test]
    fn matching_cost_relabel_invariance() {
        // matching_cost(A,B,sigma) == matching_cost(P(A), B, sigma∘p⁻¹) where
        // P reindexes A by p.
        let mut rng = make_rng(2);
        for _ in 0..20 {
            let k = 6;
            let a = random_matrix(k, &mut rng);
            let b = random_matrix(k, &mut rng);
            let sigma = random_perm(k, &mut rng);
            let p = random_perm(k, &mut rng);
            let pa = reindexed(&a, &p);
            // row p(i) of pa is row i of a, so pa's row p(i) must map to sigma(i)
            let mut composed = vec![0usize; k];
            for i in 0..k {
                composed[p[i]] = sigma[i];
            }
            let c1 = matching_cost(&a, &b, &sigma).unwrap();
            let c2 = matching_cost(&pa, &b, &composed).unwrap();
            assert!((c1 - c2).abs() < 1e-9, "{c1} vs {c2}");
        }
    }

    #[test]
    fn matching_cost_rejects_bad_perm() {
        let mut rng = make_rng(3);
        let a = random_matrix(3, &mut rng);
        assert!(matching_cost(&a, &a, &[0, 0, 1]).is_err());
        assert!(matching_cost(&a, &a, &[0, 1]).is_err());
    }

    #[test]
    fn delta_matches_full_recompute() {
        let mut rng = make_rng(4);
        for _ in 0..200 {
            let k = rng.gen_range(2..9);
            let a = random_matrix(k, &mut rng);
            let b = random_matrix(k, &mut rng);
            let at = a.transposed();
            let bt = b.transposed();
            let mut perm = random_perm(k, &mut rng);
            let p = rng.gen_range(0..k);
            let mut q = rng.gen_range(0..k - 1);
            if q >= p {
                q += 1;
            }
            let before = cost_raw(&a.w, &b.w, &perm, k);
            let d = delta_swap(&a.w, &at, &b.w, &bt, &perm, k, p, q);
            perm.swap(p, q);
            let after = cost_raw(&a.w, &b.w, &perm, k);
            assert!(
                (before + d - after).abs() < 1e-9,
                "incremental {d} vs full {}",
                after - before
            );
        }
    }

    #[test]
    fn brute_force_small_cases() {
        let a = SeedWeightMatrix::from_raw(vec![n(0), n(1)], vec![0.0, 1.0, 0.0, 0.0]).unwrap();
        let b = SeedWeightMatrix::from_raw(vec![n(0), n(1)], vec![0.0, 0.0, 1.0, 0.0]).unwrap();
        let s = brute_force_match(&a, &b).unwrap();
        assert_eq!(s.perm, vec![1, 0]);
        assert_eq!(s.cost, 0.0);

        let mut rng = make_rng(5);
        let a = random_matrix(4, &mut rng);
        let s = brute_force_match(&a, &a).unwrap();
        assert_eq!(s.cost, 0.0);
    }

    #[test]
    fn brute_force_tie_breaks_lexicographically() {
        // all-equal off-diagonal weights: every permutation costs 0; the
        // identity is the lexicographically smallest
        let w = |k: usize| {
            let mut m = vec![1.0; k * k];
            for i in 0..k {
                m[i * k + i] = 0.0;
            }
            m
        };
        let a = SeedWeightMatrix::from_raw(vec![n(0), n(1), n(2)], w(3)).unwrap();
        let s = brute_force_match(&a, &a).unwrap();
        assert_eq!(s.perm, vec![0, 1, 2]);
    }

    #[test]
    fn brute_force_k_guard() {
        let mut rng = make_rng(6);
        let a = random_matrix(11, &mut rng);
        assert!(brute_force_match(&a, &a).is_err());
        let b = random_matrix(1, &mut rng);
        assert!(brute_force_match(&b, &b).is_err());
    }

    #[test]
    fn anneal_recovers_zero_on_self_match() {
        let mut rng = make_rng(7);
        let a = random_matrix(6, &mut rng);
        let cfg = AnnealConfig::defaults(&a, &a, 99).unwrap();
        let s = anneal(&a, &a, &cfg).unwrap();
        assert_eq!(s.cost, 0.0, "perm {:?}", s.perm);
        assert_eq!(matching_cost(&a, &a, &s.perm).unwrap(), 0.0);
    }

    #[test]
    fn anneal_rejects_k1() {
        let a = SeedWeightMatrix::from_raw(vec![n(0)], vec![0.0]).unwrap();
        let cfg = AnnealConfig {
            k: 1,
            initial_temp: 1.0,
            cooling: 0.9,
            steps_per_temp: 10,
            min_temp: 0.1,
            restarts: 1,
            seed: 0,
        };
        assert!(matches!(
            anneal(&a, &a, &cfg),
            Err(Error::KOutOfRange { .. })
        ));
    }

    #[test]
    fn anneal_is_deterministic() {
        let mut rng = make_rng(8);
        let a = random_matrix(8, &mut rng);
        let b = random_matrix(8, &mut rng);
        let cfg = AnnealConfig::defaults(&a, &b, 1234).unwrap();
        let s1 = anneal(&a, &b, &cfg).unwrap();
        let s2 = anneal(&a, &b, &cfg).unwrap();
        assert_eq!(s1.perm, s2.perm);
        assert_eq!(s1.cost, s2.cost);
    }

    #[test]
    fn anneal_cost_is_recomputable() {
        let mut rng = make_rng(9);
        for trial in 0..10 {
            let a = random_matrix(7, &mut rng);
            let b = random_matrix(7, &mut rng);
            let cfg = AnnealConfig::defaults(&a, &b, trial).unwrap();
            let s = anneal(&a, &b, &cfg).unwrap();
            let recomputed = matching_cost(&a, &b, &s.perm).unwrap();
            assert!((s.cost - recomputed).abs() < 1e-9);
        }
    }

    #[test]
    fn anneal_planted_recovery_k6() {
        let mut rng = make_rng(10);
        let mut hits = 0;
        for trial in 0..100 {
            let a = random_matrix(6, &mut rng);
            let pi = random_perm(6, &mut rng);
            let b = reindexed(&a, &pi);
            let cfg = AnnealConfig::defaults(&a, &b, 5000 + trial).unwrap();
            let s = anneal(&a, &b, &cfg).unwrap();
            if s.cost <= 1e-9 {
                hits += 1;
            }
        }
        assert!(hits >= 95, "planted k=6 recovered in only {hits}/100 trials");
    }

    #[test]
    fn anneal_matches_brute_force_k7() {
        let mut rng = make_rng(11);
        let mut hits = 0;
        for trial in 0..100 {
            let a = random_matrix(7, &mut rng);
            let b = random_matrix(7, &mut rng);
            let cfg = AnnealConfig::defaults(&a, &b, 9000 + trial).unwrap();
            let annealed = anneal(&a, &b, &cfg).unwrap();
            let exact = brute_force_match(&a, &b).unwrap();
            assert!(annealed.cost >= exact.cost - 1e-9);
            if (annealed.cost - exact.cost).abs() <= 1e-9 {
                hits += 1;
            }
        }
        assert!(hits >= 95, "optimum hit in only {hits}/100 trials");
    }

    #[test]
    fn seeds_to_mapping_pairs_hubs() {
        let a = SeedWeightMatrix::from_raw(vec![n(10), n(11)], vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let b = SeedWeightMatrix::from_raw(vec![n(20), n(21)], vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let m = seeds_to_mapping(
            &a,
            &b,
            &MatchingState {
                perm: vec![1, 0],
                cost: 0.0,
            },
        )
        .unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.get(n(10)), Some(n(21)));
        assert_eq!(m.get(n(11)), Some(n(20)));
    }
}
