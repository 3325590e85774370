//! Exact random-walk values and the group recommendation built on them.
//!
//! Every node gets a rational value `r` in `[-1, 1]`: voters are pinned at
//! `+1`/`-1`, nonvoters with no directed path to a voter are `0`, and every
//! other nonvoter satisfies the multiplicity-weighted averaging equation
//! `r_a = (sum over out-edges (a,b) of r_b) / out-multidegree(a)`. The value
//! equals the probability of a walk from `a` absorbing at a `+` voter minus
//! the probability of absorbing at a `-` voter.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Group, NodeId, Recommendation, VoteLabel, VotingNetwork};

/// Default step budget for a single Monte Carlo walk; a capped walk counts as
/// absorbed nowhere and scores 0.
pub const DEFAULT_STEP_CAP: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WalkError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
}

/// Exact walk values for every node of a network.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalkSolution {
    values: BTreeMap<NodeId, BigRational>,
}

impl WalkSolution {
    pub fn value(&self, node: &NodeId) -> Option<&BigRational> {
        self.values.get(node)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&NodeId, &BigRational)> {
        self.values.iter()
    }

    /// Sign of a node's value as -1, 0 or 1.
    pub fn sign(&self, node: &NodeId) -> Option<i64> {
        self.values.get(node).map(rational_sign)
    }
}

pub fn rational_sign(value: &BigRational) -> i64 {
    if value.is_positive() {
        1
    } else if value.is_negative() {
        -1
    } else {
        0
    }
}

fn ratio(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn label_value(label: VoteLabel) -> BigRational {
    match label {
        VoteLabel::Plus => ratio(1),
        VoteLabel::Minus => ratio(-1),
        VoteLabel::Undecided => ratio(0),
    }
}

/// Nodes with a directed path (following out-edges under positive weight) to
/// some voter, voters included.
fn nodes_reaching_voters(
    net: &VotingNetwork,
    weight: &dyn Fn(&NodeId, &NodeId, u64) -> u64,
) -> BTreeSet<NodeId> {
    let mut incoming: BTreeMap<&NodeId, Vec<&NodeId>> = BTreeMap::new();
    for (from, to, mult) in net.edges() {
        if weight(from, to, mult) > 0 {
            incoming.entry(to).or_default().push(from);
        }
    }
    let mut seen: BTreeSet<NodeId> = net
        .node_ids()
        .filter(|n| net.is_voter(n))
        .cloned()
        .collect();
    let mut queue: VecDeque<NodeId> = seen.iter().cloned().collect();
    while let Some(node) = queue.pop_front() {
        if let Some(sources) = incoming.get(&node) {
            for src in sources {
                if seen.insert((*src).clone()) {
                    queue.push_back((*src).clone());
                }
            }
        }
    }
    seen
}

/// Solves the averaging fixed point for an arbitrary positive edge weighting.
/// `weight(from, to, mult)` maps each stored edge to its transition weight.
///
/// Voters are pinned, nodes that cannot reach a voter are pinned to zero, and
/// the remaining system is solved by exact Gaussian elimination with partial
/// pivoting on the largest rational magnitude; columns follow sorted node
/// order so runs are reproducible.
#[allow(clippy::needless_range_loop)]
pub(crate) fn solve_with_weights(
    net: &VotingNetwork,
    weight: &dyn Fn(&NodeId, &NodeId, u64) -> u64,
) -> WalkSolution {
    let mut values: BTreeMap<NodeId, BigRational> = BTreeMap::new();
    let reaching = nodes_reaching_voters(net, weight);
    let mut unknowns: Vec<NodeId> = Vec::new();
    for (id, label) in net.nodes() {
        if label.is_voter() {
            values.insert(id.clone(), label_value(label));
        } else if !reaching.contains(id) {
            values.insert(id.clone(), ratio(0));
        } else {
            unknowns.push(id.clone());
        }
    }
    if unknowns.is_empty() {
        return WalkSolution { values };
    }

    let index: BTreeMap<&NodeId, usize> = unknowns.iter().enumerate().map(|(i, n)| (n, i)).collect();
    let k = unknowns.len();
    // Augmented matrix rows: total_weight * x_a - sum_b w_ab x_b = rhs.
    let mut matrix: Vec<Vec<BigRational>> = vec![vec![ratio(0); k + 1]; k];
    for (row, a) in unknowns.iter().enumerate() {
        let mut total = 0u64;
        for (b, mult) in net.out_edges(a) {
            let w = weight(a, b, mult);
            total += w;
            if w == 0 {
                continue;
            }
            let w_rat = BigRational::from_integer(BigInt::from(w));
            match index.get(b) {
                Some(&col) => matrix[row][col] -= &w_rat,
                None => {
                    // Pinned neighbor: voters contribute their vote, zero
                    // nodes contribute nothing.
                    let pinned = values.get(b).expect("pinned value");
                    matrix[row][k] += w_rat * pinned;
                }
            }
        }
        matrix[row][row] += BigRational::from_integer(BigInt::from(total));
    }

    // Forward elimination.
    for col in 0..k {
        let pivot_row = (col..k)
            .filter(|&r| !matrix[r][col].is_zero())
            .max_by(|&a, &b| matrix[a][col].abs().cmp(&matrix[b][col].abs()))
            .expect("system is nonsingular once unreachable nodes are pinned");
        matrix.swap(col, pivot_row);
        for row in col + 1..k {
            if matrix[row][col].is_zero() {
                continue;
            }
            let factor = &matrix[row][col] / &matrix[col][col];
            for j in col..=k {
                let delta = &factor * &matrix[col][j];
                matrix[row][j] -= delta;
            }
        }
    }
    // Back substitution.
    let mut solution = vec![ratio(0); k];
    for row in (0..k).rev() {
        let mut acc = matrix[row][k].clone();
        for j in row + 1..k {
            acc -= &matrix[row][j] * &solution[j];
        }
        solution[row] = acc / &matrix[row][row];
    }
    for (i, node) in unknowns.into_iter().enumerate() {
        values.insert(node, solution[i].clone());
    }
    WalkSolution { values }
}

/// Exact walk values for every node, using edge multiplicities as weights.
pub fn solve_walk(net: &VotingNetwork) -> WalkSolution {
    solve_with_weights(net, &|_, _, mult| mult)
}

/// Checks a solution against the defining equations with zero tolerance:
/// voters at their vote, no-path nodes at zero, and every remaining nonvoter's
/// averaging equation with residual exactly zero.
pub fn verify_solution(net: &VotingNetwork, solution: &WalkSolution) -> bool {
    let reaching = nodes_reaching_voters(net, &|_, _, mult| mult);
    for (id, label) in net.nodes() {
        let Some(value) = solution.value(id) else {
            return false;
        };
        if label.is_voter() {
            if *value != label_value(label) {
                return false;
            }
            continue;
        }
        if !reaching.contains(id) {
            if !value.is_zero() {
                return false;
            }
            continue;
        }
        let degree = net.out_multidegree(id);
        let mut weighted_sum = ratio(0);
        for (to, mult) in net.out_edges(id) {
            weighted_sum += BigRational::from_integer(BigInt::from(mult))
                * solution.value(to).expect("total solution");
        }
        if value * BigRational::from_integer(BigInt::from(degree)) != weighted_sum {
            return false;
        }
    }
    true
}

/// Sign of a single node's walk value.
pub fn individual_recommend(net: &VotingNetwork, node: &NodeId) -> Result<Recommendation, WalkError> {
    if !net.contains(node) {
        return Err(WalkError::UnknownNode(node.clone()));
    }
    let solution = solve_walk(net);
    Ok(Recommendation::from_sign(solution.sign(node).unwrap()))
}

/// Group recommendation: the sign of the sum of members' walk values. Voters
/// put their full weight on their vote; a nonvoter contributes its exact
/// value, splitting its weight among its influencers.
pub fn group_recommend(net: &VotingNetwork, group: &Group) -> Result<Recommendation, WalkError> {
    let solution = solve_walk(net);
    group_recommend_with(&solution, group)
}

/// Same as [`group_recommend`] but reuses an existing solution.
pub fn group_recommend_with(
    solution: &WalkSolution,
    group: &Group,
) -> Result<Recommendation, WalkError> {
    let mut total = ratio(0);
    for member in group.members() {
        match solution.value(member) {
            Some(v) => total += v,
            None => return Err(WalkError::UnknownNode(member.clone())),
        }
    }
    Ok(Recommendation::from_sign(rational_sign(&total)))
}

/// Empirical estimate of `P(absorb at +) - P(absorb at -)` from seeded
/// independent walks. Walks halt at voters, at out-degree-zero nonvoters, or
/// at the step cap; a halted-unabsorbed walk scores 0.
pub fn monte_carlo_walk(
    net: &VotingNetwork,
    node: &NodeId,
    trials: u64,
    seed: u64,
) -> Result<f64, WalkError> {
    monte_carlo_walk_capped(net, node, trials, seed, DEFAULT_STEP_CAP)
}

pub fn monte_carlo_walk_capped(
    net: &VotingNetwork,
    node: &NodeId,
    trials: u64,
    seed: u64,
    step_cap: usize,
) -> Result<f64, WalkError> {
    assert!(trials >= 1, "at least one trial required");
    if !net.contains(node) {
        return Err(WalkError::UnknownNode(node.clone()));
    }
    // Index the network once; cumulative multiplicities give O(log d) steps.
    let ids: Vec<&NodeId> = net.node_ids().collect();
    let index: BTreeMap<&NodeId, usize> = ids.iter().enumerate().map(|(i, n)| (*n, i)).collect();
    let labels: Vec<VoteLabel> = ids.iter().map(|n| net.label(n).unwrap()).collect();
    let mut cumulative: Vec<Vec<(u64, usize)>> = vec![Vec::new(); ids.len()];
    let mut totals: Vec<u64> = vec![0; ids.len()];
    for (i, id) in ids.iter().enumerate() {
        let mut acc = 0u64;
        for (to, mult) in net.out_edges(id) {
            acc += mult;
            cumulative[i].push((acc, index[to]));
        }
        totals[i] = acc;
    }

    let start = index[node];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut score: i64 = 0;
    for _ in 0..trials {
        let mut current = start;
        let mut steps = 0usize;
        loop {
            match labels[current] {
                VoteLabel::Plus => {
                    score += 1;
                    break;
                }
                VoteLabel::Minus => {
                    score -= 1;
                    break;
                }
                VoteLabel::Undecided => {}
            }
            if totals[current] == 0 || steps >= step_cap {
                break;
            }
            let draw = rng.gen_range(0..totals[current]);
            let next = cumulative[current]
                .partition_point(|(acc, _)| *acc <= draw);
            current = cumulative[current][next].1;
            steps += 1;
        }
    }
    Ok(score as f64 / trials as f64)
}
