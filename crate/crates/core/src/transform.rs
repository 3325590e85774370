//! Recommendation-preserving graph rewrites and the reduction pipeline that
//! evaluates a group by rewriting it down to a plurality vote.
//!
//! Three rewrites are supported: trust propagation (an influence chain
//! through a nonvoter is replaced by direct edges), edge scaling (a
//! nonvoter's outgoing multiplicities are rescaled, which never changes the
//! walk), and proportional inclusiveness (a group nonvoter is replaced by
//! weighted copies of its influencers inside the group). The first two
//! preserve every walk value exactly; the third preserves the group value sum
//! up to a positive factor, hence the recommendation.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::graph::{
    restrict_to_reachable, strip_voter_outedges, GraphError, Group, NodeId, Recommendation,
    VoteLabel, VotingNetwork,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransformError {
    #[error("edge ({u},{v}) has multiplicity {multiplicity} but {v} has out-multidegree {out_degree}")]
    PreconditionMismatch {
        u: NodeId,
        v: NodeId,
        multiplicity: u64,
        out_degree: u64,
    },
    #[error("{0} is a voter")]
    VoterTarget(NodeId),
    #[error("rewrite would create a self loop on {0}")]
    WouldSelfLoop(NodeId),
    #[error("{0} is not a member of the group")]
    NotInGroup(NodeId),
    #[error("{0} is not a nonvoter")]
    NotNonvoter(NodeId),
    #[error("{0} has no influencers")]
    NoInfluencers(NodeId),
    #[error("influencer {0} is an influenced nonvoter, outside the supported fragment")]
    UnsupportedInfluencer(NodeId),
    #[error("reduction does not terminate on this instance")]
    NonTerminating,
    #[error("edge multiplicity overflow")]
    Overflow,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RewriteKind {
    TrustPropagation,
    ScaleInvariance,
    ProportionalInclusiveness,
}

impl RewriteKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RewriteKind::TrustPropagation => "trust-propagation",
            RewriteKind::ScaleInvariance => "scale-invariance",
            RewriteKind::ProportionalInclusiveness => "proportional-inclusiveness",
        }
    }
}

/// What a rewrite step targeted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RewriteParams {
    TrustPropagation {
        u: NodeId,
        v: NodeId,
    },
    /// Outgoing multiplicities of `node` were multiplied by
    /// `multiply / divide`; division is the same axiom read right to left.
    ScaleInvariance {
        node: NodeId,
        multiply: u64,
        divide: u64,
    },
    ProportionalInclusiveness {
        u: NodeId,
        copies: u64,
        marked: Vec<NodeId>,
    },
}

/// One applied rewrite, with enough context to replay or audit it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteStep {
    pub params: RewriteParams,
    pub before_network: VotingNetwork,
    pub before_group: Option<Group>,
    pub after_network: VotingNetwork,
    pub after_group: Option<Group>,
}

impl RewriteStep {
    pub fn kind(&self) -> RewriteKind {
        match self.params {
            RewriteParams::TrustPropagation { .. } => RewriteKind::TrustPropagation,
            RewriteParams::ScaleInvariance { .. } => RewriteKind::ScaleInvariance,
            RewriteParams::ProportionalInclusiveness { .. } => {
                RewriteKind::ProportionalInclusiveness
            }
        }
    }
}

fn nodes_of(net: &VotingNetwork) -> Vec<(NodeId, VoteLabel)> {
    net.nodes().map(|(id, l)| (id.clone(), l)).collect()
}

/// Replaces all edges from `u` to `v` by `v`'s outgoing edge multiset.
/// Requires the multiplicity of `(u, v)` to equal `v`'s out-multidegree.
pub fn trust_propagate(
    net: &VotingNetwork,
    u: &NodeId,
    v: &NodeId,
) -> Result<VotingNetwork, TransformError> {
    for node in [u, v] {
        if !net.contains(node) {
            return Err(GraphError::UnknownNode(node.clone()).into());
        }
        if net.is_voter(node) {
            return Err(TransformError::VoterTarget(node.clone()));
        }
    }
    let k = net.multiplicity(u, v);
    let out_degree = net.out_multidegree(v);
    if k == 0 || k != out_degree {
        return Err(TransformError::PreconditionMismatch {
            u: u.clone(),
            v: v.clone(),
            multiplicity: k,
            out_degree,
        });
    }
    if net.multiplicity(v, u) > 0 {
        return Err(TransformError::WouldSelfLoop(u.clone()));
    }
    let mut edges = Vec::new();
    for (from, to, mult) in net.edges() {
        if from == u && to == v {
            continue;
        }
        edges.push((from.clone(), to.clone(), mult));
    }
    for (to, mult) in net.out_edges(v) {
        edges.push((u.clone(), to.clone(), mult));
    }
    Ok(crate::graph::build_network(nodes_of(net), edges)?)
}

/// Adds `k` extra copies of each outgoing edge of nonvoter `u`, multiplying
/// its multiplicities by `k + 1`.
pub fn scale_edges(
    net: &VotingNetwork,
    u: &NodeId,
    k: u64,
) -> Result<VotingNetwork, TransformError> {
    scale_edges_by(net, u, k.checked_add(1).ok_or(TransformError::Overflow)?, 1)
}

/// Rescales `u`'s outgoing multiplicities by `multiply / divide`; every
/// multiplicity must stay integral. Scaling in either direction leaves the
/// walk untouched.
pub fn scale_edges_by(
    net: &VotingNetwork,
    u: &NodeId,
    multiply: u64,
    divide: u64,
) -> Result<VotingNetwork, TransformError> {
    if !net.contains(u) {
        return Err(GraphError::UnknownNode(u.clone()).into());
    }
    if net.is_voter(u) {
        return Err(TransformError::VoterTarget(u.clone()));
    }
    assert!(multiply >= 1 && divide >= 1, "scale factor must be positive");
    let mut edges = Vec::new();
    for (from, to, mult) in net.edges() {
        let mult = if from == u {
            let scaled = mult.checked_mul(multiply).ok_or(TransformError::Overflow)?;
            assert!(scaled % divide == 0, "scaling must keep multiplicities integral");
            scaled / divide
        } else {
            mult
        };
        edges.push((from.clone(), to.clone(), mult));
    }
    Ok(crate::graph::build_network(nodes_of(net), edges)?)
}

/// Result of one proportional-inclusiveness application.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropInclOutcome {
    pub network: VotingNetwork,
    pub group: Group,
    /// The factor `s`: the group value sum scales by exactly this much.
    pub copies: u64,
    /// Marked copies of external influencers that joined the group.
    pub marked: Vec<NodeId>,
    /// Extra standalone copies of in-group influencers.
    pub extras: Vec<NodeId>,
}

fn copy_name(node: &NodeId, j: u64) -> NodeId {
    NodeId::new(format!("{node}#{j}"))
}

fn extra_name(node: &NodeId, h: u64) -> NodeId {
    NodeId::new(format!("{node}#e{h}"))
}

/// Removes group nonvoter `u` by turning the voters (and nonvoter sinks)
/// influencing it into group members with weight proportional to their
/// influence. The rest of the network is replicated into `s` disjoint copies,
/// one per unit of influence on `u`, and group members that pointed at `u`
/// are rewired so every surviving walk value is unchanged.
pub fn proportional_inclusiveness(
    net: &VotingNetwork,
    group: &Group,
    u: &NodeId,
) -> Result<PropInclOutcome, TransformError> {
    group.validate(net)?;
    if !group.contains(u) {
        return Err(TransformError::NotInGroup(u.clone()));
    }
    if !net.is_nonvoter(u) {
        return Err(TransformError::NotNonvoter(u.clone()));
    }
    let influencers: Vec<(NodeId, u64)> = net.out_edges(u).map(|(v, k)| (v.clone(), k)).collect();
    if influencers.is_empty() {
        return Err(TransformError::NoInfluencers(u.clone()));
    }
    for (v, _) in &influencers {
        if !net.is_voter(v) && !net.is_nonvoter_sink(v) {
            return Err(TransformError::UnsupportedInfluencer(v.clone()));
        }
    }
    let s: u64 = influencers.iter().map(|(_, k)| *k).sum();

    // Group members pointing at u, with how many edges they aim at it.
    let pointers: Vec<(NodeId, u64)> = group
        .members()
        .filter(|c| *c != u)
        .filter_map(|c| {
            let q = net.multiplicity(c, u);
            (q > 0).then(|| (c.clone(), q))
        })
        .collect();

    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    for j in 1..=s {
        for (id, label) in net.nodes() {
            if id == u {
                continue;
            }
            nodes.push((copy_name(id, j), label));
        }
        for (from, to, mult) in net.edges() {
            if from == u || to == u {
                continue;
            }
            let scaled = if pointers.iter().any(|(c, _)| c == from) {
                mult.checked_mul(s).ok_or(TransformError::Overflow)?
            } else {
                mult
            };
            edges.push((copy_name(from, j), copy_name(to, j), scaled));
        }
        for (c, q) in &pointers {
            for (v, k) in &influencers {
                if v == c {
                    continue;
                }
                let mult = q.checked_mul(*k).ok_or(TransformError::Overflow)?;
                edges.push((copy_name(c, j), copy_name(v, j), mult));
            }
        }
    }

    let mut members: Vec<NodeId> = Vec::new();
    for member in group.members() {
        if member == u {
            continue;
        }
        for j in 1..=s {
            members.push(copy_name(member, j));
        }
    }
    let mut marked = Vec::new();
    let mut extras = Vec::new();
    for (v, k) in &influencers {
        if group.contains(v) {
            // In-group influencer: k extra standalone copies join the group,
            // giving it total weight s + k.
            let label = net.label(v).unwrap();
            for h in 1..=*k {
                let name = extra_name(v, h);
                nodes.push((name.clone(), label));
                extras.push(name.clone());
                members.push(name);
            }
        } else {
            // External influencer: k of its s copies are marked into the
            // group.
            for j in 1..=*k {
                let name = copy_name(v, j);
                marked.push(name.clone());
                members.push(name);
            }
        }
    }

    let network = crate::graph::build_network(nodes, edges)?;
    let group = Group::new(members)?;
    Ok(PropInclOutcome {
        network,
        group,
        copies: s,
        marked,
        extras,
    })
}

/// Plurality among the group's voters: sign of (plus count minus minus
/// count), nonvoters ignored.
pub fn group_plurality(net: &VotingNetwork, group: &Group) -> Result<Recommendation, GraphError> {
    group.validate(net)?;
    let mut tally: i64 = 0;
    for member in group.members() {
        match net.label(member).unwrap() {
            VoteLabel::Plus => tally += 1,
            VoteLabel::Minus => tally -= 1,
            VoteLabel::Undecided => {}
        }
    }
    Ok(Recommendation::from_sign(tally))
}

/// Result of the full reduction pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct ReduceOutcome {
    pub network: VotingNetwork,
    pub group: Group,
    pub steps: Vec<RewriteStep>,
    /// Plurality of the final group; equals the group recommendation of the
    /// original instance.
    pub plurality: Recommendation,
}

const REDUCE_STEP_BUDGET: usize = 1_000;
const REDUCE_NODE_BUDGET: usize = 50_000;

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn out_multiplicity_gcd(net: &VotingNetwork, u: &NodeId) -> u64 {
    net.out_edges(u).fold(0, |acc, (_, m)| gcd(acc, m))
}

struct Reducer {
    net: VotingNetwork,
    group: Group,
    steps: Vec<RewriteStep>,
}

impl Reducer {
    fn budget_ok(&self) -> bool {
        self.steps.len() < REDUCE_STEP_BUDGET && self.net.node_count() < REDUCE_NODE_BUDGET
    }

    fn record(&mut self, params: RewriteParams, before: VotingNetwork, after: VotingNetwork) {
        self.steps.push(RewriteStep {
            params,
            before_network: before,
            before_group: Some(self.group.clone()),
            after_network: after.clone(),
            after_group: Some(self.group.clone()),
        });
        self.net = after;
    }

    fn scale(&mut self, node: &NodeId, multiply: u64, divide: u64) -> Result<(), TransformError> {
        if multiply == divide {
            return Ok(());
        }
        let before = self.net.clone();
        let after = scale_edges_by(&self.net, node, multiply, divide)?;
        self.record(
            RewriteParams::ScaleInvariance {
                node: node.clone(),
                multiply,
                divide,
            },
            before,
            after,
        );
        Ok(())
    }

    /// Rewires every node influenced by the out-of-group nonvoter `u`
    /// directly to `u`'s influencers. Afterwards `u` influences nobody.
    fn eliminate_intermediary(&mut self, u: &NodeId) -> Result<(), TransformError> {
        loop {
            if !self.budget_ok() {
                return Err(TransformError::NonTerminating);
            }
            let Some((w, c)) = self.net.influencees(u).map(|(w, m)| (w.clone(), m)).next()
            else {
                return Ok(());
            };
            let d = self.net.out_multidegree(u);
            debug_assert!(d > 0, "intermediaries are influenced");
            let g = gcd(c, d);
            self.scale(&w, d / g, 1)?;
            self.scale(u, c / g, 1)?;
            let before = self.net.clone();
            let after = trust_propagate(&self.net, &w, u)?;
            self.record(
                RewriteParams::TrustPropagation {
                    u: w.clone(),
                    v: u.clone(),
                },
                before,
                after,
            );
        }
    }

    fn restrict(&mut self) -> Result<(), TransformError> {
        self.net = restrict_to_reachable(&strip_voter_outedges(&self.net), &self.group)?;
        Ok(())
    }

    /// Drops voters and nonvoter sinks that do not directly influence any
    /// group member.
    fn drop_indirect(&mut self) -> Result<(), TransformError> {
        let direct: BTreeSet<NodeId> = self
            .group
            .members()
            .flat_map(|c| self.net.out_edges(c).map(|(to, _)| to.clone()))
            .collect();
        let doomed: Vec<NodeId> = self
            .net
            .node_ids()
            .filter(|n| {
                !self.group.contains(n)
                    && (self.net.is_voter(n) || self.net.is_nonvoter_sink(n))
                    && !direct.contains(*n)
            })
            .cloned()
            .collect();
        for node in doomed {
            self.net = self.net.remove_node(&node)?;
        }
        Ok(())
    }

    fn intermediaries(&self) -> Vec<NodeId> {
        self.net
            .node_ids()
            .filter(|n| {
                !self.group.contains(n)
                    && self.net.is_nonvoter(n)
                    && self.net.out_multidegree(n) > 0
                    && self.net.influencees(n).next().is_some()
            })
            .cloned()
            .collect()
    }

    fn eliminate_all_intermediaries(&mut self) -> Result<(), TransformError> {
        loop {
            if !self.budget_ok() {
                return Err(TransformError::NonTerminating);
            }
            let candidates = self.intermediaries();
            if candidates.is_empty() {
                return Ok(());
            }
            // A candidate is blocked when rewiring one of its influencees
            // would close a two-cycle into a self loop.
            let pick = candidates
                .iter()
                .find(|u| self.net.influencees(u).all(|(w, _)| self.net.multiplicity(u, w) == 0))
                .cloned();
            match pick {
                Some(u) => self.eliminate_intermediary(&u)?,
                None => return Err(TransformError::NonTerminating),
            }
        }
    }

    /// Group nonvoters still carrying out-edges, cheapest elimination first.
    fn group_candidates(&self) -> Vec<(u64, NodeId)> {
        let mut candidates: Vec<(u64, NodeId)> = self
            .group
            .members()
            .filter(|c| self.net.is_nonvoter(c) && self.net.out_multidegree(c) > 0)
            .map(|c| {
                let g = out_multiplicity_gcd(&self.net, c).max(1);
                (self.net.out_multidegree(c) / g, c.clone())
            })
            .collect();
        candidates.sort();
        candidates
    }

    fn absorb_group_nonvoters(&mut self) -> Result<(), TransformError> {
        loop {
            if !self.budget_ok() {
                return Err(TransformError::NonTerminating);
            }
            let candidates = self.group_candidates();
            let Some((_, first)) = candidates.first() else {
                return Ok(());
            };
            let applicable = candidates.iter().find(|(_, c)| {
                self.net
                    .out_edges(c)
                    .all(|(v, _)| self.net.is_voter(v) || self.net.is_nonvoter_sink(v))
            });
            // When nothing is applicable, running the rewrite on the first
            // candidate surfaces the offending influencer.
            let u = applicable
                .map(|(_, c)| c.clone())
                .unwrap_or_else(|| first.clone());
            let g = out_multiplicity_gcd(&self.net, &u);
            if g > 1 {
                self.scale(&u, 1, g)?;
            }
            let before = self.net.clone();
            let before_group = self.group.clone();
            let outcome = proportional_inclusiveness(&self.net, &self.group, &u)?;
            self.steps.push(RewriteStep {
                params: RewriteParams::ProportionalInclusiveness {
                    u: u.clone(),
                    copies: outcome.copies,
                    marked: outcome.marked.clone(),
                },
                before_network: before,
                before_group: Some(before_group),
                after_network: outcome.network.clone(),
                after_group: Some(outcome.group.clone()),
            });
            self.net = outcome.network;
            self.group = outcome.group;
        }
    }
}

/// Full reduction: eliminates out-of-group intermediaries with scaling and
/// trust propagation, restricts to what the group can reach, then absorbs
/// every influenced group nonvoter with proportional inclusiveness. The final
/// group holds only voters and nonvoter sinks, so its plurality is the
/// recommendation.
pub fn reduce_group(net: &VotingNetwork, group: &Group) -> Result<ReduceOutcome, TransformError> {
    group.validate(net)?;
    let mut reducer = Reducer {
        net: net.clone(),
        group: group.clone(),
        steps: Vec::new(),
    };
    reducer.restrict()?;
    reducer.eliminate_all_intermediaries()?;
    reducer.restrict()?;
    reducer.drop_indirect()?;
    reducer.absorb_group_nonvoters()?;
    let plurality = group_plurality(&reducer.net, &reducer.group)?;
    Ok(ReduceOutcome {
        network: reducer.net,
        group: reducer.group,
        steps: reducer.steps,
        plurality,
    })
}
