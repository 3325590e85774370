//! The built-in recommenders: the group random walk and four deliberately
//! odd mechanisms, each engineered to break exactly one axiom while staying
//! reasonable elsewhere.

use std::fmt;

use crate::axiom::{AxiomId, Recommender};
use crate::graph::{Group, NodeId, Recommendation, VoteLabel, VotingNetwork};
use crate::transform::group_plurality;
use crate::walk::{
    group_recommend, group_recommend_with, rational_sign, solve_with_weights, WalkError,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemKind {
    RandomWalk,
    SingletonPlus,
    NeighborCount,
    DegreeBiased,
    InsideMajority,
}

impl SystemKind {
    pub const ALL: [SystemKind; 5] = [
        SystemKind::RandomWalk,
        SystemKind::SingletonPlus,
        SystemKind::NeighborCount,
        SystemKind::DegreeBiased,
        SystemKind::InsideMajority,
    ];

    pub fn parse(name: &str) -> Option<SystemKind> {
        SystemKind::ALL.into_iter().find(|s| s.name() == name)
    }

    /// The axiom this mechanism is built to violate; the random walk violates
    /// none of the structural ones by design.
    pub fn target_axiom(self) -> Option<AxiomId> {
        match self {
            SystemKind::RandomWalk => None,
            SystemKind::SingletonPlus => Some(AxiomId::Anonymity),
            SystemKind::NeighborCount => Some(AxiomId::TrustPropagation),
            SystemKind::DegreeBiased => Some(AxiomId::ScaleInvariance),
            SystemKind::InsideMajority => Some(AxiomId::ProportionalInclusiveness),
        }
    }

    pub fn recommend(
        self,
        net: &VotingNetwork,
        group: &Group,
    ) -> Result<Recommendation, WalkError> {
        for member in group.members() {
            if !net.contains(member) {
                return Err(WalkError::UnknownNode(member.clone()));
            }
        }
        match self {
            SystemKind::RandomWalk => group_recommend(net, group),
            SystemKind::SingletonPlus => {
                if group.len() == 1 {
                    Ok(Recommendation::Plus)
                } else {
                    group_recommend(net, group)
                }
            }
            SystemKind::NeighborCount => Ok(neighbor_count(net, group)),
            SystemKind::DegreeBiased => {
                let solution = solve_with_weights(net, &|_, to, mult| {
                    mult + net.out_multidegree(to)
                });
                group_recommend_with(&solution, group)
            }
            SystemKind::InsideMajority => Ok(group_plurality(net, group).expect("validated")),
        }
    }
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl SystemKind {
    pub fn name(self) -> &'static str {
        match self {
            SystemKind::RandomWalk => "random-walk",
            SystemKind::SingletonPlus => "singleton-plus",
            SystemKind::NeighborCount => "neighbor-count",
            SystemKind::DegreeBiased => "degree-biased",
            SystemKind::InsideMajority => "inside-majority",
        }
    }
}

impl Recommender for SystemKind {
    fn name(&self) -> &str {
        SystemKind::name(*self)
    }

    fn recommend(&self, net: &VotingNetwork, group: &Group) -> Result<Recommendation, WalkError> {
        SystemKind::recommend(*self, net, group)
    }
}

/// Scores each member by the multiplicity-weighted count of voters it is
/// directly connected to (`+` minus `-`), voters scoring their own vote, and
/// returns the sign of the summed score signs.
fn neighbor_count(net: &VotingNetwork, group: &Group) -> Recommendation {
    let mut total: i64 = 0;
    for member in group.members() {
        let score: i64 = match net.label(member).unwrap() {
            VoteLabel::Plus => 1,
            VoteLabel::Minus => -1,
            VoteLabel::Undecided => net
                .out_edges(member)
                .map(|(to, mult)| match net.label(to).unwrap() {
                    VoteLabel::Plus => mult as i64,
                    VoteLabel::Minus => -(mult as i64),
                    VoteLabel::Undecided => 0,
                })
                .sum(),
        };
        total += score.signum();
    }
    Recommendation::from_sign(total)
}

/// Sign of a node's value under the degree-biased walk.
pub fn degree_biased_sign(net: &VotingNetwork, node: &NodeId) -> Option<i64> {
    let solution = solve_with_weights(net, &|_, to, mult| mult + net.out_multidegree(to));
    solution.value(node).map(rational_sign)
}
