//! Seeded random voting networks, groups and permutations.
//!
//! Everything here is driven by a caller-supplied RNG so suites are
//! reproducible from a single seed.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::{build_network, Group, NodeId, VoteLabel, VotingNetwork};

fn random_label(rng: &mut impl Rng) -> VoteLabel {
    match rng.gen_range(0..3) {
        0 => VoteLabel::Plus,
        1 => VoteLabel::Minus,
        _ => VoteLabel::Undecided,
    }
}

/// Random network with up to `max_nodes` nodes and `max_edge_units` total
/// edge multiplicity. Every network has at least one node.
pub fn random_network(rng: &mut impl Rng, max_nodes: usize, max_edge_units: u64) -> VotingNetwork {
    let n = rng.gen_range(1..=max_nodes.max(1));
    let ids: Vec<NodeId> = (0..n).map(|i| NodeId::new(format!("n{i}"))).collect();
    let nodes: Vec<(NodeId, VoteLabel)> = ids
        .iter()
        .map(|id| (id.clone(), random_label(rng)))
        .collect();
    let mut edges = Vec::new();
    let mut units = 0u64;
    if n > 1 {
        let attempts = rng.gen_range(0..=2 * n);
        for _ in 0..attempts {
            let from = rng.gen_range(0..n);
            let mut to = rng.gen_range(0..n);
            if to == from {
                to = (to + 1) % n;
            }
            let mult = rng.gen_range(1..=3u64);
            if units + mult > max_edge_units {
                break;
            }
            units += mult;
            edges.push((ids[from].clone(), ids[to].clone(), mult));
        }
    }
    build_network(nodes, edges).expect("sampled network is valid")
}

/// Random network whose nonvoter-to-nonvoter influence structure is acyclic:
/// a nonvoter may only point at nonvoters that precede it in a hidden rank.
/// Voters may point anywhere (their out-edges never matter).
pub fn random_acyclic_nonvoter_network(
    rng: &mut impl Rng,
    max_nodes: usize,
    max_mult: u64,
) -> VotingNetwork {
    let n = rng.gen_range(2..=max_nodes.max(2));
    let ids: Vec<NodeId> = (0..n).map(|i| NodeId::new(format!("n{i}"))).collect();
    let nodes: Vec<(NodeId, VoteLabel)> = ids
        .iter()
        .map(|id| (id.clone(), random_label(rng)))
        .collect();
    let mut edges = Vec::new();
    for (i, (from, label)) in nodes.iter().enumerate() {
        let out_degree = rng.gen_range(0..=2usize);
        for _ in 0..out_degree {
            let to = if label.is_voter() {
                // Voter out-edges are harmless; allow any target.
                let mut t = rng.gen_range(0..n);
                if t == i {
                    t = (t + 1) % n;
                }
                t
            } else {
                // Nonvoter edges to nonvoters must point at lower ranks.
                let candidates: Vec<usize> = (0..n)
                    .filter(|&t| t != i && (nodes[t].1.is_voter() || t < i))
                    .collect();
                match candidates.as_slice() {
                    [] => continue,
                    c => *c.choose(rng).unwrap(),
                }
            };
            edges.push((from.clone(), ids[to].clone(), rng.gen_range(1..=max_mult.max(1))));
        }
    }
    build_network(nodes, edges).expect("sampled network is valid")
}

/// Instance where proportional inclusiveness applies to `u`: its influencers
/// are voters or sinks, and everything it influences sits inside the group.
pub fn random_prop_incl_instance(rng: &mut impl Rng) -> (VotingNetwork, Group, NodeId) {
    let u = NodeId::new("u");
    let mut nodes = vec![(u.clone(), VoteLabel::Undecided)];
    let mut edges = Vec::new();
    let mut group = vec![u.clone()];
    let influencer_count = rng.gen_range(1..=3);
    for i in 0..influencer_count {
        let v = NodeId::new(format!("v{i}"));
        let label = match rng.gen_range(0..4) {
            0 | 1 => VoteLabel::Plus,
            2 => VoteLabel::Minus,
            _ => VoteLabel::Undecided, // sink: gets no out-edges below
        };
        nodes.push((v.clone(), label));
        edges.push((u.clone(), v.clone(), rng.gen_range(1..=3)));
        if rng.gen_bool(0.3) {
            group.push(v.clone());
        }
    }
    for i in 0..rng.gen_range(0..=2u32) {
        let w = NodeId::new(format!("w{i}"));
        let label = if rng.gen_bool(0.5) {
            VoteLabel::Plus
        } else {
            VoteLabel::Minus
        };
        nodes.push((w.clone(), label));
        group.push(w.clone());
    }
    if rng.gen_bool(0.5) {
        // Group nonvoter pointing at u, to exercise the rewiring.
        let c = NodeId::new("c");
        let t = NodeId::new("t");
        nodes.push((c.clone(), VoteLabel::Undecided));
        nodes.push((
            t.clone(),
            if rng.gen_bool(0.5) {
                VoteLabel::Plus
            } else {
                VoteLabel::Minus
            },
        ));
        edges.push((c.clone(), u.clone(), rng.gen_range(1..=2)));
        edges.push((c.clone(), t.clone(), rng.gen_range(1..=2)));
        group.push(c.clone());
    }
    let net = build_network(nodes, edges).expect("sampled instance is valid");
    let group = Group::new(group).expect("group is non-empty");
    (net, group, u)
}

/// Instance containing at least one applicable trust-propagation pair.
pub fn random_trust_prop_instance(rng: &mut impl Rng) -> (VotingNetwork, Group) {
    let mut nodes = vec![
        (NodeId::new("a"), VoteLabel::Plus),
        (NodeId::new("b"), VoteLabel::Minus),
        (NodeId::new("v"), VoteLabel::Undecided),
        (NodeId::new("u"), VoteLabel::Undecided),
    ];
    let mut edges = Vec::new();
    let mut fan_out = 0u64;
    for target in ["a", "b"] {
        if fan_out == 0 || rng.gen_bool(0.6) {
            let mult = rng.gen_range(1..=2);
            fan_out += mult;
            edges.push((NodeId::new("v"), NodeId::new(target), mult));
        }
    }
    edges.push((NodeId::new("u"), NodeId::new("v"), fan_out));
    if rng.gen_bool(0.5) {
        edges.push((NodeId::new("u"), NodeId::new("a"), rng.gen_range(1..=2)));
    }
    if rng.gen_bool(0.4) {
        nodes.push((NodeId::new("s"), VoteLabel::Undecided));
        edges.push((NodeId::new("u"), NodeId::new("s"), 1));
    }
    let net = build_network(nodes, edges).expect("sampled instance is valid");
    let group = random_group(rng, &net);
    (net, group)
}

/// Instance inside the fragment where the reduction pipeline terminates:
/// acyclic nonvoter structure and a group of voters plus at most one
/// nonvoter.
pub fn random_reduce_instance(rng: &mut impl Rng) -> (VotingNetwork, Group) {
    let net = random_acyclic_nonvoter_network(rng, 8, 3);
    let voters: Vec<NodeId> = net
        .node_ids()
        .filter(|n| net.is_voter(n))
        .cloned()
        .collect();
    let nonvoters: Vec<NodeId> = net
        .node_ids()
        .filter(|n| net.is_nonvoter(n))
        .cloned()
        .collect();
    let mut members = Vec::new();
    if !voters.is_empty() {
        let take = rng.gen_range(0..=voters.len().min(3));
        let mut pool = voters;
        pool.shuffle(rng);
        members.extend(pool.into_iter().take(take));
    }
    if let Some(u) = nonvoters.as_slice().choose(rng) {
        if members.is_empty() || rng.gen_bool(0.7) {
            members.push(u.clone());
        }
    }
    if members.is_empty() {
        members.push(net.node_ids().next().unwrap().clone());
    }
    (net.clone(), Group::new(members).expect("non-empty"))
}

/// Random non-empty subset of the network's nodes.
pub fn random_group(rng: &mut impl Rng, net: &VotingNetwork) -> Group {
    let ids: Vec<NodeId> = net.node_ids().cloned().collect();
    let size = rng.gen_range(1..=ids.len().min(4));
    let mut picked = ids;
    picked.shuffle(rng);
    picked.truncate(size);
    Group::new(picked).expect("non-empty sample")
}

/// Random permutation of the network's node set, as a relabeling map.
pub fn random_permutation(rng: &mut impl Rng, net: &VotingNetwork) -> BTreeMap<NodeId, NodeId> {
    let ids: Vec<NodeId> = net.node_ids().cloned().collect();
    let mut shuffled = ids.clone();
    shuffled.shuffle(rng);
    ids.into_iter().zip(shuffled).collect()
}

/// Applies a relabeling map to a group.
pub fn permute_group(group: &Group, map: &BTreeMap<NodeId, NodeId>) -> Group {
    Group::new(group.members().map(|m| map[m].clone())).expect("permutation keeps size")
}
