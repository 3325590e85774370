//! Voting networks: directed multigraphs whose nodes carry a vote label.
//!
//! An edge `(a, b)` means *b influences a*; multiplicities stand in for
//! parallel edges. Networks are immutable after construction, so every
//! operation returns a new network.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

/// Opaque node identifier, unique within a network.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(id: impl Into<String>) -> Self {
        NodeId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_string())
    }
}

impl From<String> for NodeId {
    fn from(s: String) -> Self {
        NodeId(s)
    }
}

/// A node's declared opinion.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum VoteLabel {
    Plus,
    Minus,
    Undecided,
}

impl VoteLabel {
    pub fn is_voter(self) -> bool {
        !matches!(self, VoteLabel::Undecided)
    }

    /// Plus <-> Minus; Undecided is its own opposite.
    pub fn opposite(self) -> VoteLabel {
        match self {
            VoteLabel::Plus => VoteLabel::Minus,
            VoteLabel::Minus => VoteLabel::Plus,
            VoteLabel::Undecided => VoteLabel::Undecided,
        }
    }
}

impl fmt::Display for VoteLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VoteLabel::Plus => "+",
            VoteLabel::Minus => "-",
            VoteLabel::Undecided => "0",
        })
    }
}

/// Three-valued outcome of a recommendation.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Recommendation {
    Plus,
    Minus,
    Neutral,
}

impl Recommendation {
    /// Maps a comparison against zero to an outcome.
    pub fn from_sign(sign: i64) -> Self {
        match sign.cmp(&0) {
            std::cmp::Ordering::Greater => Recommendation::Plus,
            std::cmp::Ordering::Less => Recommendation::Minus,
            std::cmp::Ordering::Equal => Recommendation::Neutral,
        }
    }

    pub fn negate(self) -> Self {
        match self {
            Recommendation::Plus => Recommendation::Minus,
            Recommendation::Minus => Recommendation::Plus,
            Recommendation::Neutral => Recommendation::Neutral,
        }
    }
}

impl fmt::Display for Recommendation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Recommendation::Plus => "+",
            Recommendation::Minus => "-",
            Recommendation::Neutral => "0",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("self loop on node {0}")]
    SelfLoop(NodeId),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("duplicate node id {0}")]
    DuplicateNodeId(NodeId),
    #[error("edge multiplicity must be at least 1")]
    ZeroMultiplicity,
    #[error("node id must be non-empty")]
    EmptyNodeId,
    #[error("group must be non-empty")]
    EmptyGroup,
    #[error("invalid star group spec: {0}")]
    InvalidSpec(String),
}

/// Directed multigraph with vote labels. Edge `(from, to)` with multiplicity
/// `m` stands for `m` parallel edges; `to` influences `from`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VotingNetwork {
    labels: BTreeMap<NodeId, VoteLabel>,
    out: BTreeMap<NodeId, BTreeMap<NodeId, u64>>,
}

impl VotingNetwork {
    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn contains(&self, node: &NodeId) -> bool {
        self.labels.contains_key(node)
    }

    pub fn label(&self, node: &NodeId) -> Option<VoteLabel> {
        self.labels.get(node).copied()
    }

    pub fn is_voter(&self, node: &NodeId) -> bool {
        self.label(node).is_some_and(VoteLabel::is_voter)
    }

    pub fn is_nonvoter(&self, node: &NodeId) -> bool {
        self.label(node) == Some(VoteLabel::Undecided)
    }

    /// Nonvoter with no outgoing edges.
    pub fn is_nonvoter_sink(&self, node: &NodeId) -> bool {
        self.is_nonvoter(node) && self.out_multidegree(node) == 0
    }

    pub fn nodes(&self) -> impl Iterator<Item = (&NodeId, VoteLabel)> {
        self.labels.iter().map(|(id, l)| (id, *l))
    }

    pub fn node_ids(&self) -> impl Iterator<Item = &NodeId> {
        self.labels.keys()
    }

    pub fn voters(&self, label: VoteLabel) -> impl Iterator<Item = &NodeId> + '_ {
        self.labels
            .iter()
            .filter(move |(_, l)| **l == label)
            .map(|(id, _)| id)
    }

    /// All edges as `((from, to), multiplicity)`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (&NodeId, &NodeId, u64)> {
        self.out
            .iter()
            .flat_map(|(from, tos)| tos.iter().map(move |(to, m)| (from, to, *m)))
    }

    /// Outgoing edges of `node`: the nodes influencing it, with multiplicity.
    pub fn out_edges(&self, node: &NodeId) -> impl Iterator<Item = (&NodeId, u64)> {
        self.out
            .get(node)
            .into_iter()
            .flat_map(|tos| tos.iter().map(|(to, m)| (to, *m)))
    }

    pub fn multiplicity(&self, from: &NodeId, to: &NodeId) -> u64 {
        self.out
            .get(from)
            .and_then(|tos| tos.get(to))
            .copied()
            .unwrap_or(0)
    }

    /// Total multiplicity of edges leaving `node`.
    pub fn out_multidegree(&self, node: &NodeId) -> u64 {
        self.out
            .get(node)
            .map(|tos| tos.values().sum())
            .unwrap_or(0)
    }

    /// Total edge units in the network.
    pub fn edge_units(&self) -> u64 {
        self.out.values().flat_map(|tos| tos.values()).sum()
    }

    /// Nodes with an edge pointing at `node`, i.e. the nodes it influences.
    pub fn influencees<'a>(&'a self, node: &'a NodeId) -> impl Iterator<Item = (&'a NodeId, u64)> {
        self.out.iter().filter_map(move |(from, tos)| {
            tos.get(node).map(|m| (from, *m))
        })
    }

    /// Swaps the `+` and `-` vote populations.
    pub fn swap_votes(&self) -> VotingNetwork {
        let labels = self
            .labels
            .iter()
            .map(|(id, l)| (id.clone(), l.opposite()))
            .collect();
        VotingNetwork {
            labels,
            out: self.out.clone(),
        }
    }

    /// Renames nodes through a bijection. Every node must be mapped and no
    /// two nodes may collide.
    pub fn relabel(&self, map: &BTreeMap<NodeId, NodeId>) -> Result<VotingNetwork, GraphError> {
        let rename = |id: &NodeId| -> Result<NodeId, GraphError> {
            map.get(id).cloned().ok_or_else(|| GraphError::UnknownNode(id.clone()))
        };
        let mut labels = BTreeMap::new();
        for (id, l) in &self.labels {
            let renamed = rename(id)?;
            if labels.insert(renamed.clone(), *l).is_some() {
                return Err(GraphError::DuplicateNodeId(renamed));
            }
        }
        let mut out: BTreeMap<NodeId, BTreeMap<NodeId, u64>> = BTreeMap::new();
        for (from, tos) in &self.out {
            let entry = out.entry(rename(from)?).or_default();
            for (to, m) in tos {
                entry.insert(rename(to)?, *m);
            }
        }
        Ok(VotingNetwork { labels, out })
    }

    /// Network without `node` and its incident edges.
    pub fn remove_node(&self, node: &NodeId) -> Result<VotingNetwork, GraphError> {
        if !self.contains(node) {
            return Err(GraphError::UnknownNode(node.clone()));
        }
        let labels = self
            .labels
            .iter()
            .filter(|(id, _)| *id != node)
            .map(|(id, l)| (id.clone(), *l))
            .collect();
        let out = self
            .out
            .iter()
            .filter(|(from, _)| *from != node)
            .map(|(from, tos)| {
                let tos = tos
                    .iter()
                    .filter(|(to, _)| *to != node)
                    .map(|(to, m)| (to.clone(), *m))
                    .collect();
                (from.clone(), tos)
            })
            .collect();
        Ok(VotingNetwork { labels, out })
    }

    /// Network without one specific edge entry (all its parallel copies).
    pub fn remove_edge(&self, from: &NodeId, to: &NodeId) -> VotingNetwork {
        let mut out = self.out.clone();
        if let Some(tos) = out.get_mut(from) {
            tos.remove(to);
        }
        VotingNetwork {
            labels: self.labels.clone(),
            out,
        }
    }
}

/// Non-empty set of node identifiers, the query unit for recommendations.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Group(BTreeSet<NodeId>);

impl Group {
    pub fn new(members: impl IntoIterator<Item = NodeId>) -> Result<Group, GraphError> {
        let set: BTreeSet<NodeId> = members.into_iter().collect();
        if set.is_empty() {
            return Err(GraphError::EmptyGroup);
        }
        Ok(Group(set))
    }

    pub fn members(&self) -> impl Iterator<Item = &NodeId> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, node: &NodeId) -> bool {
        self.0.contains(node)
    }

    /// Checks every member exists in `net`.
    pub fn validate(&self, net: &VotingNetwork) -> Result<(), GraphError> {
        for m in &self.0 {
            if !net.contains(m) {
                return Err(GraphError::UnknownNode(m.clone()));
            }
        }
        Ok(())
    }

    pub fn as_set(&self) -> &BTreeSet<NodeId> {
        &self.0
    }
}

/// Builds a validated network. Multiplicities of duplicate `(from, to)`
/// declarations sum.
pub fn build_network(
    nodes: impl IntoIterator<Item = (NodeId, VoteLabel)>,
    edges: impl IntoIterator<Item = (NodeId, NodeId, u64)>,
) -> Result<VotingNetwork, GraphError> {
    let mut labels: BTreeMap<NodeId, VoteLabel> = BTreeMap::new();
    for (id, label) in nodes {
        if id.as_str().is_empty() {
            return Err(GraphError::EmptyNodeId);
        }
        if labels.insert(id.clone(), label).is_some() {
            return Err(GraphError::DuplicateNodeId(id));
        }
    }
    let mut out: BTreeMap<NodeId, BTreeMap<NodeId, u64>> = BTreeMap::new();
    for id in labels.keys() {
        out.insert(id.clone(), BTreeMap::new());
    }
    for (from, to, mult) in edges {
        if mult == 0 {
            return Err(GraphError::ZeroMultiplicity);
        }
        if from == to {
            return Err(GraphError::SelfLoop(from));
        }
        if !labels.contains_key(&from) {
            return Err(GraphError::UnknownNode(from));
        }
        if !labels.contains_key(&to) {
            return Err(GraphError::UnknownNode(to));
        }
        *out.get_mut(&from).unwrap().entry(to).or_insert(0) += mult;
    }
    Ok(VotingNetwork { labels, out })
}

/// Star-group blueprint: `n` same-label voters, `m` nonvoters, each nonvoter
/// `u_i` wired to all `n` voters and to `external_degrees[i]` private
/// opposite-label voters outside the group.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StarGroupSpec {
    pub n: usize,
    pub m: usize,
    pub inner_label: VoteLabel,
    pub external_degrees: Vec<usize>,
}

/// Builds the star-group network and the group itself. External voters are
/// named `t<i>_<j>` so fixtures are reproducible.
pub fn generate_star_group(spec: &StarGroupSpec) -> Result<(VotingNetwork, Group), GraphError> {
    if spec.n == 0 {
        return Err(GraphError::InvalidSpec("need at least one voter".into()));
    }
    if !spec.inner_label.is_voter() {
        return Err(GraphError::InvalidSpec("inner label must be + or -".into()));
    }
    if spec.external_degrees.len() != spec.m {
        return Err(GraphError::InvalidSpec(format!(
            "expected {} external degrees, got {}",
            spec.m,
            spec.external_degrees.len()
        )));
    }
    let outer_label = spec.inner_label.opposite();
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    let voters: Vec<NodeId> = (1..=spec.n).map(|j| NodeId::new(format!("v{j}"))).collect();
    for v in &voters {
        nodes.push((v.clone(), spec.inner_label));
    }
    let mut group_members = voters.clone();
    for (i, degree) in spec.external_degrees.iter().enumerate() {
        let u = NodeId::new(format!("u{}", i + 1));
        nodes.push((u.clone(), VoteLabel::Undecided));
        group_members.push(u.clone());
        for v in &voters {
            edges.push((u.clone(), v.clone(), 1));
        }
        for j in 1..=*degree {
            let t = NodeId::new(format!("t{}_{}", i + 1, j));
            nodes.push((t.clone(), outer_label));
            edges.push((u.clone(), t, 1));
        }
    }
    let net = build_network(nodes, edges)?;
    let group = Group::new(group_members)?;
    Ok((net, group))
}

/// Shape of a star group recovered from an arbitrary `(network, group)` pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarShape {
    pub inner_label: VoteLabel,
    pub voters: Vec<NodeId>,
    pub nonvoters: Vec<NodeId>,
    /// Distinct external voters per nonvoter, in `nonvoters` order.
    pub external: Vec<BTreeSet<NodeId>>,
}

impl StarShape {
    pub fn n(&self) -> usize {
        self.voters.len()
    }

    pub fn m(&self) -> usize {
        self.nonvoters.len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.external.iter().map(|d| d.len()).collect()
    }
}

/// Recognizes a star group: in-group voters all share a label, every in-group
/// nonvoter points at all of them, its remaining out-edges go to a private set
/// of opposite-label voters outside the group, and those private sets are
/// pairwise disjoint. Only out-edges of the nonvoters are constrained.
pub fn star_shape(net: &VotingNetwork, group: &Group) -> Option<StarShape> {
    group.validate(net).ok()?;
    let mut voters = Vec::new();
    let mut nonvoters = Vec::new();
    let mut inner_label = None;
    for member in group.members() {
        match net.label(member)? {
            VoteLabel::Undecided => nonvoters.push(member.clone()),
            label => {
                if *inner_label.get_or_insert(label) != label {
                    return None;
                }
                voters.push(member.clone());
            }
        }
    }
    let inner_label = inner_label?;
    let outer_label = inner_label.opposite();
    let mut seen_external: BTreeSet<NodeId> = BTreeSet::new();
    let mut external = Vec::new();
    for u in &nonvoters {
        let mut d_set = BTreeSet::new();
        for v in &voters {
            if net.multiplicity(u, v) == 0 {
                return None;
            }
        }
        for (to, _) in net.out_edges(u) {
            if group.contains(to) {
                if !net.is_voter(to) {
                    return None;
                }
                continue;
            }
            if net.label(to) != Some(outer_label) {
                return None;
            }
            if !seen_external.insert(to.clone()) {
                return None;
            }
            d_set.insert(to.clone());
        }
        external.push(d_set);
    }
    Some(StarShape {
        inner_label,
        voters,
        nonvoters,
        external,
    })
}

pub fn is_star_group(net: &VotingNetwork, group: &Group) -> bool {
    star_shape(net, group).is_some()
}

/// All nodes on a directed path from `start`, following edge direction
/// (towards influencers), including `start` itself.
pub fn reachable_from(
    net: &VotingNetwork,
    start: &BTreeSet<NodeId>,
) -> Result<BTreeSet<NodeId>, GraphError> {
    for s in start {
        if !net.contains(s) {
            return Err(GraphError::UnknownNode(s.clone()));
        }
    }
    let mut seen: BTreeSet<NodeId> = start.clone();
    let mut queue: VecDeque<NodeId> = start.iter().cloned().collect();
    while let Some(node) = queue.pop_front() {
        for (to, _) in net.out_edges(&node) {
            if seen.insert(to.clone()) {
                queue.push_back(to.clone());
            }
        }
    }
    Ok(seen)
}

/// Keeps only nodes reachable from the group, and edges among them.
/// Recommendation-preserving for the inducing group.
pub fn restrict_to_reachable(
    net: &VotingNetwork,
    group: &Group,
) -> Result<VotingNetwork, GraphError> {
    group.validate(net)?;
    let keep = reachable_from(net, group.as_set())?;
    let labels: BTreeMap<NodeId, VoteLabel> = net
        .labels
        .iter()
        .filter(|(id, _)| keep.contains(*id))
        .map(|(id, l)| (id.clone(), *l))
        .collect();
    let out = labels
        .keys()
        .map(|from| {
            let tos = net
                .out_edges(from)
                .filter(|(to, _)| keep.contains(*to))
                .map(|(to, m)| (to.clone(), m))
                .collect();
            (from.clone(), tos)
        })
        .collect();
    Ok(VotingNetwork { labels, out })
}

/// Drops every edge leaving a voter. Voters' opinions are fixed, so their
/// outgoing edges never matter.
pub fn strip_voter_outedges(net: &VotingNetwork) -> VotingNetwork {
    let out = net
        .out
        .iter()
        .map(|(from, tos)| {
            if net.is_voter(from) {
                (from.clone(), BTreeMap::new())
            } else {
                (from.clone(), tos.clone())
            }
        })
        .collect();
    VotingNetwork {
        labels: net.labels.clone(),
        out,
    }
}
