//! Group recommendations over trust multigraphs.
//!
//! A voting network is a directed multigraph whose nodes carry a `+`, `-` or
//! undecided label; an edge `(a, b)` means `b` influences `a`. The crate
//! computes exact rational random-walk values for every node, aggregates them
//! into group recommendations, and ships the machinery around that system:
//!
//! - recommendation-preserving graph rewrites (trust propagation, edge
//!   scaling, proportional inclusiveness) and the reduction pipeline that
//!   evaluates a group by rewriting it down to a plurality vote;
//! - executable checkers for the nine axioms the system is measured against;
//! - a constructor and verifier for the parametric family of star-group
//!   instances on which the first six axioms force contradictory outputs;
//! - alternative recommenders that each break exactly one axiom;
//! - canonical JSON and DOT serialization plus seeded instance samplers.
//!
//! ```
//! use groupwalk::{build_network, group_recommend, Group, NodeId, Recommendation, VoteLabel};
//!
//! let net = build_network(
//!     [
//!         (NodeId::new("a"), VoteLabel::Plus),
//!         (NodeId::new("b"), VoteLabel::Minus),
//!         (NodeId::new("u"), VoteLabel::Undecided),
//!     ],
//!     [
//!         (NodeId::new("u"), NodeId::new("a"), 2),
//!         (NodeId::new("u"), NodeId::new("b"), 1),
//!     ],
//! )?;
//! let group = Group::new([NodeId::new("a"), NodeId::new("u")])?;
//! assert_eq!(group_recommend(&net, &group)?, Recommendation::Plus);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod axiom;
pub mod format;
pub mod graph;
pub mod sampling;
pub mod systems;
pub mod transform;
pub mod walk;
pub mod witness;

pub use axiom::{AxiomId, AxiomReport, Counterexample, Recommender, Verdict};
pub use graph::{
    build_network, generate_star_group, is_star_group, reachable_from, restrict_to_reachable,
    star_shape, strip_voter_outedges, GraphError, Group, NodeId, Recommendation, StarGroupSpec,
    StarShape, VoteLabel, VotingNetwork,
};
pub use systems::SystemKind;
pub use transform::{
    group_plurality, proportional_inclusiveness, reduce_group, scale_edges, trust_propagate,
    ReduceOutcome, RewriteKind, RewriteParams, RewriteStep, TransformError,
};
pub use walk::{
    group_recommend, individual_recommend, monte_carlo_walk, monte_carlo_walk_capped, solve_walk,
    verify_solution, WalkError, WalkSolution,
};
pub use witness::{build_witness, parse_rational, verify_witness, Witness, WitnessParams};
