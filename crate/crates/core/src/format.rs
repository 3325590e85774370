//! Canonical JSON graph documents and Graphviz DOT export.
//!
//! The wire format is `{"nodes":[{"id":"a","vote":"+"},{"id":"u"}],
//! "edges":[{"from":"u","to":"a","mult":2}]}`. A missing or `"0"` vote means
//! undecided; `mult` defaults to 1. Documents may carry an optional `group`
//! so star generators and transforms can round-trip their output.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{build_network, Group, GraphError, NodeId, VoteLabel, VotingNetwork};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown vote label {0:?} (expected \"+\", \"-\" or \"0\")")]
    BadVote(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NodeDoc {
    pub id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vote: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub from: String,
    pub to: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mult: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphDoc {
    pub nodes: Vec<NodeDoc>,
    pub edges: Vec<EdgeDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<Vec<String>>,
}

fn vote_to_str(label: VoteLabel) -> Option<String> {
    match label {
        VoteLabel::Plus => Some("+".to_string()),
        VoteLabel::Minus => Some("-".to_string()),
        VoteLabel::Undecided => None,
    }
}

fn vote_from_str(s: Option<&str>) -> Result<VoteLabel, FormatError> {
    match s {
        None | Some("0") => Ok(VoteLabel::Undecided),
        Some("+") => Ok(VoteLabel::Plus),
        Some("-") => Ok(VoteLabel::Minus),
        Some(other) => Err(FormatError::BadVote(other.to_string())),
    }
}

impl GraphDoc {
    pub fn from_network(net: &VotingNetwork) -> GraphDoc {
        GraphDoc::with_group(net, None)
    }

    pub fn with_group(net: &VotingNetwork, group: Option<&Group>) -> GraphDoc {
        let nodes = net
            .nodes()
            .map(|(id, label)| NodeDoc {
                id: id.to_string(),
                vote: vote_to_str(label),
            })
            .collect();
        let edges = net
            .edges()
            .map(|(from, to, mult)| EdgeDoc {
                from: from.to_string(),
                to: to.to_string(),
                mult: (mult != 1).then_some(mult),
            })
            .collect();
        GraphDoc {
            nodes,
            edges,
            group: group.map(|g| g.members().map(NodeId::to_string).collect()),
        }
    }

    pub fn to_network(&self) -> Result<VotingNetwork, FormatError> {
        let nodes = self
            .nodes
            .iter()
            .map(|n| Ok((NodeId::new(&n.id), vote_from_str(n.vote.as_deref())?)))
            .collect::<Result<Vec<_>, FormatError>>()?;
        let edges = self
            .edges
            .iter()
            .map(|e| (NodeId::new(&e.from), NodeId::new(&e.to), e.mult.unwrap_or(1)));
        Ok(build_network(nodes, edges)?)
    }

    pub fn to_group(&self) -> Result<Option<Group>, GraphError> {
        match &self.group {
            None => Ok(None),
            Some(ids) => Ok(Some(Group::new(ids.iter().map(NodeId::new))?)),
        }
    }
}

/// Serializes a network (and optional group) to the canonical JSON document.
pub fn network_to_json(net: &VotingNetwork, group: Option<&Group>) -> String {
    serde_json::to_string(&GraphDoc::with_group(net, group)).expect("graph doc serializes")
}

/// Parses the canonical JSON document into a validated network.
pub fn network_from_json(text: &str) -> Result<(VotingNetwork, Option<Group>), FormatError> {
    let doc: GraphDoc = serde_json::from_str(text)?;
    let net = doc.to_network()?;
    let group = doc.to_group()?;
    Ok((net, group))
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Renders the network in DOT syntax: voters labeled with their vote,
/// nonvoters left unlabeled, multiplicity as the edge label.
pub fn to_dot(net: &VotingNetwork) -> String {
    let mut dot = String::from("digraph voting_network {\n");
    for (id, label) in net.nodes() {
        let escaped = dot_escape(id.as_str());
        match label {
            VoteLabel::Plus => dot.push_str(&format!("  \"{escaped}\" [label=\"{escaped} (+)\"];\n")),
            VoteLabel::Minus => {
                dot.push_str(&format!("  \"{escaped}\" [label=\"{escaped} (-)\"];\n"))
            }
            VoteLabel::Undecided => dot.push_str(&format!("  \"{escaped}\";\n")),
        }
    }
    for (from, to, mult) in net.edges() {
        dot.push_str(&format!(
            "  \"{}\" -> \"{}\" [label=\"{}\"];\n",
            dot_escape(from.as_str()),
            dot_escape(to.as_str()),
            mult
        ));
    }
    dot.push_str("}\n");
    dot
}
