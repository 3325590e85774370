//! Executable checkers for the nine axioms a group recommender is measured
//! against. Each checker runs a recommender over an instance (or a batch of
//! star-group specs), and reports a pass, a replayable counterexample, or
//! inapplicability.
//!
//! The universally-quantified axioms cannot be checked exhaustively; a `Pass`
//! means no violation was found in the examined space, and every report
//! carries the number of sub-checks it ran.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{
    build_network, generate_star_group, reachable_from, GraphError, Group, NodeId, Recommendation,
    StarGroupSpec, VoteLabel, VotingNetwork,
};
use crate::sampling::{permute_group, random_permutation};
use crate::transform::{
    proportional_inclusiveness, scale_edges, trust_propagate, TransformError,
};
use crate::walk::WalkError;

/// A deterministic group recommendation system under test.
pub trait Recommender {
    fn name(&self) -> &str;
    fn recommend(&self, net: &VotingNetwork, group: &Group) -> Result<Recommendation, WalkError>;
}

/// The nine axioms, numbered as usual.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AxiomId {
    Anonymity,
    PositiveResponse,
    Iis,
    Centripetal,
    Centrifugal,
    InternalConsistency,
    TrustPropagation,
    ScaleInvariance,
    ProportionalInclusiveness,
}

impl AxiomId {
    pub const ALL: [AxiomId; 9] = [
        AxiomId::Anonymity,
        AxiomId::PositiveResponse,
        AxiomId::Iis,
        AxiomId::Centripetal,
        AxiomId::Centrifugal,
        AxiomId::InternalConsistency,
        AxiomId::TrustPropagation,
        AxiomId::ScaleInvariance,
        AxiomId::ProportionalInclusiveness,
    ];

    pub fn number(self) -> u8 {
        match self {
            AxiomId::Anonymity => 1,
            AxiomId::PositiveResponse => 2,
            AxiomId::Iis => 3,
            AxiomId::Centripetal => 4,
            AxiomId::Centrifugal => 5,
            AxiomId::InternalConsistency => 6,
            AxiomId::TrustPropagation => 7,
            AxiomId::ScaleInvariance => 8,
            AxiomId::ProportionalInclusiveness => 9,
        }
    }

    pub fn from_number(n: u8) -> Option<AxiomId> {
        AxiomId::ALL.into_iter().find(|a| a.number() == n)
    }

    pub fn name(self) -> &'static str {
        match self {
            AxiomId::Anonymity => "anonymity",
            AxiomId::PositiveResponse => "positive-response",
            AxiomId::Iis => "iis",
            AxiomId::Centripetal => "centripetal",
            AxiomId::Centrifugal => "centrifugal",
            AxiomId::InternalConsistency => "internal-consistency",
            AxiomId::TrustPropagation => "trust-propagation",
            AxiomId::ScaleInvariance => "scale-invariance",
            AxiomId::ProportionalInclusiveness => "proportional-inclusiveness",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Violated,
    NotApplicable,
}

/// A replayable violation: evaluating the recommender on both sides
/// reproduces the mismatch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub network: VotingNetwork,
    pub group: Group,
    pub transformed_network: Option<VotingNetwork>,
    pub transformed_group: Option<Group>,
    pub transformation: String,
    pub expected: Recommendation,
    pub actual: Recommendation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub axiom: AxiomId,
    pub verdict: Verdict,
    pub counterexample: Option<Counterexample>,
    /// Number of sub-checks examined.
    pub trials: usize,
}

impl AxiomReport {
    fn pass(axiom: AxiomId, trials: usize) -> AxiomReport {
        AxiomReport {
            axiom,
            verdict: Verdict::Pass,
            counterexample: None,
            trials,
        }
    }

    fn not_applicable(axiom: AxiomId, trials: usize) -> AxiomReport {
        AxiomReport {
            axiom,
            verdict: Verdict::NotApplicable,
            counterexample: None,
            trials,
        }
    }

    fn violated(axiom: AxiomId, trials: usize, counterexample: Counterexample) -> AxiomReport {
        AxiomReport {
            axiom,
            verdict: Verdict::Violated,
            counterexample: Some(counterexample),
            trials,
        }
    }
}

#[derive(Debug, Error)]
pub enum AxiomError {
    #[error("group of {size} exceeds the partition-enumeration cap of {max}")]
    GroupTooLarge { size: usize, max: usize },
    #[error("star spec out of the axiom's scope: {0}")]
    SpecOutOfScope(String),
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn fresh_id(net: &VotingNetwork, base: &str) -> NodeId {
    let candidate = NodeId::new(base);
    if !net.contains(&candidate) {
        return candidate;
    }
    for i in 2.. {
        let candidate = NodeId::new(format!("{base}{i}"));
        if !net.contains(&candidate) {
            return candidate;
        }
    }
    unreachable!()
}

fn with_extra_node(
    net: &VotingNetwork,
    id: &NodeId,
    label: VoteLabel,
    extra_edges: &[(NodeId, NodeId, u64)],
) -> Result<VotingNetwork, GraphError> {
    let mut nodes: Vec<(NodeId, VoteLabel)> = net.nodes().map(|(n, l)| (n.clone(), l)).collect();
    nodes.push((id.clone(), label));
    let mut edges: Vec<(NodeId, NodeId, u64)> = net
        .edges()
        .map(|(f, t, m)| (f.clone(), t.clone(), m))
        .collect();
    edges.extend_from_slice(extra_edges);
    build_network(nodes, edges)
}

/// Axiom 1. Checks `trials` sampled node permutations and the vote-swap
/// clause: the mirrored network must get the negated recommendation.
pub fn check_anonymity(
    rec: &dyn Recommender,
    net: &VotingNetwork,
    group: &Group,
    trials: u64,
    seed: u64,
) -> Result<AxiomReport, AxiomError> {
    group.validate(net)?;
    let axiom = AxiomId::Anonymity;
    let base = rec.recommend(net, group)?;
    let mut examined = 0usize;

    let swapped = net.swap_votes();
    let swapped_result = rec.recommend(&swapped, group)?;
    examined += 1;
    if swapped_result != base.negate() {
        return Ok(AxiomReport::violated(
            axiom,
            examined,
            Counterexample {
                network: net.clone(),
                group: group.clone(),
                transformed_network: Some(swapped),
                transformed_group: Some(group.clone()),
                transformation: "swap-votes".into(),
                expected: base.negate(),
                actual: swapped_result,
            },
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let map = random_permutation(&mut rng, net);
        let permuted = net.relabel(&map)?;
        let permuted_group = permute_group(group, &map);
        let result = rec.recommend(&permuted, &permuted_group)?;
        examined += 1;
        if result != base {
            return Ok(AxiomReport::violated(
                axiom,
                examined,
                Counterexample {
                    network: net.clone(),
                    group: group.clone(),
                    transformed_network: Some(permuted),
                    transformed_group: Some(permuted_group),
                    transformation: "permute-nodes".into(),
                    expected: base,
                    actual: result,
                },
            ));
        }
    }
    Ok(AxiomReport::pass(axiom, examined))
}

/// Axiom 2, in three clauses. With a `+` or neutral recommendation, adding a
/// fresh `+` voter to the group must yield `+`; a fresh `+` voter wired to a
/// member must keep a `+` recommendation (and never drag a neutral one to
/// `-`); and an isolated `+`/`-` pair wired to the same member must leave the
/// recommendation untouched.
pub fn check_positive_response(
    rec: &dyn Recommender,
    net: &VotingNetwork,
    group: &Group,
) -> Result<AxiomReport, AxiomError> {
    group.validate(net)?;
    let axiom = AxiomId::PositiveResponse;
    let base = rec.recommend(net, group)?;
    let mut examined = 0usize;

    if base != Recommendation::Minus {
        // (i) the new voter joins the group.
        let a = fresh_id(net, "pr_plus");
        let bigger = with_extra_node(net, &a, VoteLabel::Plus, &[])?;
        let bigger_group = Group::new(group.members().cloned().chain([a.clone()]))?;
        let result = rec.recommend(&bigger, &bigger_group)?;
        examined += 1;
        if result != Recommendation::Plus {
            return Ok(AxiomReport::violated(
                axiom,
                examined,
                Counterexample {
                    network: net.clone(),
                    group: group.clone(),
                    transformed_network: Some(bigger),
                    transformed_group: Some(bigger_group),
                    transformation: format!("add-plus-voter-to-group:{a}"),
                    expected: Recommendation::Plus,
                    actual: result,
                },
            ));
        }

        // (ii) the new voter only influences a member.
        for c in group.members() {
            let a = fresh_id(net, "pr_plus");
            let edged = with_extra_node(net, &a, VoteLabel::Plus, &[(c.clone(), a.clone(), 1)])?;
            let result = rec.recommend(&edged, group)?;
            examined += 1;
            let reversed = match base {
                Recommendation::Plus => result != Recommendation::Plus,
                _ => result == Recommendation::Minus,
            };
            if reversed {
                return Ok(AxiomReport::violated(
                    axiom,
                    examined,
                    Counterexample {
                        network: net.clone(),
                        group: group.clone(),
                        transformed_network: Some(edged),
                        transformed_group: Some(group.clone()),
                        transformation: format!("add-plus-influence:{c}<-{a}"),
                        expected: base,
                        actual: result,
                    },
                ));
            }
        }
    }

    // (iii) an isolated +/- pair influencing the same member cancels out.
    for c in group.members() {
        let a = fresh_id(net, "pr_pair_plus");
        let with_a = with_extra_node(net, &a, VoteLabel::Plus, &[])?;
        let b = fresh_id(&with_a, "pr_pair_minus");
        let paired = with_extra_node(
            &with_a,
            &b,
            VoteLabel::Minus,
            &[(c.clone(), a.clone(), 1), (c.clone(), b.clone(), 1)],
        )?;
        let result = rec.recommend(&paired, group)?;
        examined += 1;
        if result != base {
            return Ok(AxiomReport::violated(
                axiom,
                examined,
                Counterexample {
                    network: net.clone(),
                    group: group.clone(),
                    transformed_network: Some(paired),
                    transformed_group: Some(group.clone()),
                    transformation: format!("add-isolated-pair:{c}<-({a},{b})"),
                    expected: base,
                    actual: result,
                },
            ));
        }
    }
    Ok(AxiomReport::pass(axiom, examined))
}

/// Axiom 3. Deleting any node unreachable from the group, or any single
/// voter out-edge, must not change the recommendation.
pub fn check_iis(
    rec: &dyn Recommender,
    net: &VotingNetwork,
    group: &Group,
) -> Result<AxiomReport, AxiomError> {
    group.validate(net)?;
    let axiom = AxiomId::Iis;
    let base = rec.recommend(net, group)?;
    let mut examined = 0usize;

    let reachable = reachable_from(net, group.as_set())?;
    for node in net.node_ids() {
        if reachable.contains(node) {
            continue;
        }
        let pruned = net.remove_node(node)?;
        let result = rec.recommend(&pruned, group)?;
        examined += 1;
        if result != base {
            return Ok(AxiomReport::violated(
                axiom,
                examined,
                Counterexample {
                    network: net.clone(),
                    group: group.clone(),
                    transformed_network: Some(pruned),
                    transformed_group: Some(group.clone()),
                    transformation: format!("delete-unreachable:{node}"),
                    expected: base,
                    actual: result,
                },
            ));
        }
    }

    let voter_edges: Vec<(NodeId, NodeId)> = net
        .edges()
        .filter(|(from, _, _)| net.is_voter(from))
        .map(|(from, to, _)| (from.clone(), to.clone()))
        .collect();
    for (from, to) in voter_edges {
        let mut edges: Vec<(NodeId, NodeId, u64)> = Vec::new();
        for (f, t, m) in net.edges() {
            let m = if *f == from && *t == to { m - 1 } else { m };
            if m > 0 {
                edges.push((f.clone(), t.clone(), m));
            }
        }
        let nodes: Vec<(NodeId, VoteLabel)> = net.nodes().map(|(n, l)| (n.clone(), l)).collect();
        let pruned = build_network(nodes, edges)?;
        let result = rec.recommend(&pruned, group)?;
        examined += 1;
        if result != base {
            return Ok(AxiomReport::violated(
                axiom,
                examined,
                Counterexample {
                    network: net.clone(),
                    group: group.clone(),
                    transformed_network: Some(pruned),
                    transformed_group: Some(group.clone()),
                    transformation: format!("delete-voter-out-edge:({from},{to})"),
                    expected: base,
                    actual: result,
                },
            ));
        }
    }
    Ok(AxiomReport::pass(axiom, examined))
}

fn ratio_int(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn star_expectation(
    rec: &dyn Recommender,
    spec: &StarGroupSpec,
    expected: Recommendation,
    axiom: AxiomId,
    examined: usize,
    transformation: &str,
) -> Result<Result<usize, AxiomReport>, AxiomError> {
    let (net, group) = generate_star_group(spec)?;
    let actual = rec.recommend(&net, &group)?;
    if actual != expected {
        return Ok(Err(AxiomReport::violated(
            axiom,
            examined + 1,
            Counterexample {
                network: net,
                group,
                transformed_network: None,
                transformed_group: None,
                transformation: transformation.into(),
                expected,
                actual,
            },
        )));
    }
    Ok(Ok(examined + 1))
}

/// Axiom 4. Star groups where every external set has at most `alpha * n`
/// voters must be recommended the in-group label.
pub fn check_centripetal(
    rec: &dyn Recommender,
    alpha: &BigRational,
    specs: &[StarGroupSpec],
) -> Result<AxiomReport, AxiomError> {
    let axiom = AxiomId::Centripetal;
    let mut examined = 0usize;
    for spec in specs {
        let bound = alpha * ratio_int(spec.n);
        if let Some(bad) = spec.external_degrees.iter().find(|d| ratio_int(**d) > bound) {
            return Err(AxiomError::SpecOutOfScope(format!(
                "external degree {bad} exceeds alpha*n = {bound}"
            )));
        }
        let expected = match spec.inner_label {
            VoteLabel::Plus => Recommendation::Plus,
            VoteLabel::Minus => Recommendation::Minus,
            VoteLabel::Undecided => {
                return Err(AxiomError::SpecOutOfScope("undecided inner label".into()))
            }
        };
        match star_expectation(rec, spec, expected, axiom, examined, "centripetal-star")? {
            Ok(count) => examined = count,
            Err(report) => return Ok(report),
        }
    }
    Ok(AxiomReport::pass(axiom, examined))
}

/// Axiom 4 on one concrete instance: inapplicable unless the pair is a star
/// group meeting the premise, in which case the in-group label is forced.
pub fn check_centripetal_instance(
    rec: &dyn Recommender,
    net: &VotingNetwork,
    group: &Group,
    alpha: &BigRational,
) -> Result<AxiomReport, AxiomError> {
    let axiom = AxiomId::Centripetal;
    let Some(shape) = crate::graph::star_shape(net, group) else {
        return Ok(AxiomReport::not_applicable(axiom, 0));
    };
    let bound = alpha * ratio_int(shape.n());
    if shape.degrees().iter().any(|d| ratio_int(*d) > bound) {
        return Ok(AxiomReport::not_applicable(axiom, 0));
    }
    let expected = match shape.inner_label {
        VoteLabel::Plus => Recommendation::Plus,
        _ => Recommendation::Minus,
    };
    let actual = rec.recommend(net, group)?;
    if actual != expected {
        return Ok(AxiomReport::violated(
            axiom,
            1,
            Counterexample {
                network: net.clone(),
                group: group.clone(),
                transformed_network: None,
                transformed_group: None,
                transformation: "centripetal-star".into(),
                expected,
                actual,
            },
        ));
    }
    Ok(AxiomReport::pass(axiom, 1))
}

/// Axiom 5 on one concrete instance; see [`check_centripetal_instance`].
pub fn check_centrifugal_instance(
    rec: &dyn Recommender,
    net: &VotingNetwork,
    group: &Group,
    beta: &BigRational,
    r: &BigRational,
) -> Result<AxiomReport, AxiomError> {
    let axiom = AxiomId::Centrifugal;
    let Some(shape) = crate::graph::star_shape(net, group) else {
        return Ok(AxiomReport::not_applicable(axiom, 0));
    };
    let bound = beta * ratio_int(shape.n());
    if ratio_int(shape.m()) < r * ratio_int(shape.n())
        || shape.degrees().iter().any(|d| ratio_int(*d) < bound)
    {
        return Ok(AxiomReport::not_applicable(axiom, 0));
    }
    let expected = match shape.inner_label {
        VoteLabel::Plus => Recommendation::Minus,
        _ => Recommendation::Plus,
    };
    let actual = rec.recommend(net, group)?;
    if actual != expected {
        return Ok(AxiomReport::violated(
            axiom,
            1,
            Counterexample {
                network: net.clone(),
                group: group.clone(),
                transformed_network: None,
                transformed_group: None,
                transformation: "centrifugal-star".into(),
                expected,
                actual,
            },
        ));
    }
    Ok(AxiomReport::pass(axiom, 1))
}

/// Axiom 5. Star groups with at least `r` nonvoters per voter and every
/// external set at least `beta * n` strong must be recommended the external
/// label. Specs whose nonvoter ratio falls short of `r` are outside the
/// axiom's reach and render it inapplicable.
pub fn check_centrifugal(
    rec: &dyn Recommender,
    beta: &BigRational,
    r: &BigRational,
    specs: &[StarGroupSpec],
) -> Result<AxiomReport, AxiomError> {
    let axiom = AxiomId::Centrifugal;
    let mut examined = 0usize;
    let mut applicable = false;
    for spec in specs {
        if ratio_int(spec.m) < r * ratio_int(spec.n) {
            continue;
        }
        let bound = beta * ratio_int(spec.n);
        if let Some(bad) = spec.external_degrees.iter().find(|d| ratio_int(**d) < bound) {
            return Err(AxiomError::SpecOutOfScope(format!(
                "external degree {bad} below beta*n = {bound}"
            )));
        }
        applicable = true;
        let expected = match spec.inner_label {
            VoteLabel::Plus => Recommendation::Minus,
            VoteLabel::Minus => Recommendation::Plus,
            VoteLabel::Undecided => {
                return Err(AxiomError::SpecOutOfScope("undecided inner label".into()))
            }
        };
        match star_expectation(rec, spec, expected, axiom, examined, "centrifugal-star")? {
            Ok(count) => examined = count,
            Err(report) => return Ok(report),
        }
    }
    if !applicable {
        return Ok(AxiomReport::not_applicable(axiom, examined));
    }
    Ok(AxiomReport::pass(axiom, examined))
}

/// All assignments of `n` items to parts, as restricted growth strings.
fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut assignment = vec![0usize; n];
    loop {
        out.push(assignment.clone());
        // Advance to the next restricted growth string.
        let mut i = n;
        loop {
            if i <= 1 {
                return out;
            }
            i -= 1;
            let max_prefix = assignment[..i].iter().copied().max().unwrap_or(0);
            if assignment[i] <= max_prefix {
                assignment[i] += 1;
                for item in assignment.iter_mut().skip(i + 1) {
                    *item = 0;
                }
                break;
            }
        }
    }
}

pub const DEFAULT_MAX_GROUP: usize = 8;

/// Axiom 6. If every proper partition whose parts get one unanimous
/// non-neutral recommendation agrees on that value, the whole group must get
/// it too.
pub fn check_internal_consistency(
    rec: &dyn Recommender,
    net: &VotingNetwork,
    group: &Group,
    max_group: usize,
) -> Result<AxiomReport, AxiomError> {
    group.validate(net)?;
    let axiom = AxiomId::InternalConsistency;
    if group.len() > max_group {
        return Err(AxiomError::GroupTooLarge {
            size: group.len(),
            max: max_group,
        });
    }
    let members: Vec<NodeId> = group.members().cloned().collect();
    let mut examined = 0usize;
    let mut unanimous: Option<(Recommendation, Vec<usize>)> = None;
    for assignment in set_partitions(members.len()) {
        let parts_count = assignment.iter().copied().max().unwrap_or(0) + 1;
        if parts_count < 2 {
            continue;
        }
        let mut parts: Vec<Vec<NodeId>> = vec![Vec::new(); parts_count];
        for (idx, part) in assignment.iter().enumerate() {
            parts[*part].push(members[idx].clone());
        }
        examined += 1;
        let mut shared: Option<Recommendation> = None;
        let mut qualifies = true;
        for part in &parts {
            let value = rec.recommend(net, &Group::new(part.iter().cloned())?)?;
            if value == Recommendation::Neutral || shared.is_some_and(|s| s != value) {
                qualifies = false;
                break;
            }
            shared = Some(value);
        }
        if !qualifies {
            continue;
        }
        let value = shared.expect("non-empty partition");
        match &unanimous {
            None => unanimous = Some((value, assignment.clone())),
            Some((prior, _)) if *prior != value => {
                // Contradicting unanimous partitions: the axiom's premise
                // fails, nothing to enforce.
                return Ok(AxiomReport::pass(axiom, examined));
            }
            Some(_) => {}
        }
    }
    let Some((expected, assignment)) = unanimous else {
        return Ok(AxiomReport::pass(axiom, examined));
    };
    let actual = rec.recommend(net, group)?;
    if actual != expected {
        return Ok(AxiomReport::violated(
            axiom,
            examined,
            Counterexample {
                network: net.clone(),
                group: group.clone(),
                transformed_network: None,
                transformed_group: None,
                transformation: format!("unanimous-partition:{assignment:?}"),
                expected,
                actual,
            },
        ));
    }
    Ok(AxiomReport::pass(axiom, examined))
}

/// Axiom 7. Every applicable trust propagation must preserve the
/// recommendation.
pub fn check_trust_propagation(
    rec: &dyn Recommender,
    net: &VotingNetwork,
    group: &Group,
) -> Result<AxiomReport, AxiomError> {
    group.validate(net)?;
    let axiom = AxiomId::TrustPropagation;
    let base = rec.recommend(net, group)?;
    let mut examined = 0usize;
    let nonvoters: Vec<NodeId> = net
        .node_ids()
        .filter(|n| net.is_nonvoter(n))
        .cloned()
        .collect();
    for u in &nonvoters {
        for v in &nonvoters {
            if u == v
                || net.multiplicity(u, v) == 0
                || net.multiplicity(u, v) != net.out_multidegree(v)
                || net.multiplicity(v, u) > 0
            {
                continue;
            }
            let rewired = trust_propagate(net, u, v)?;
            let result = rec.recommend(&rewired, group)?;
            examined += 1;
            if result != base {
                return Ok(AxiomReport::violated(
                    axiom,
                    examined,
                    Counterexample {
                        network: net.clone(),
                        group: group.clone(),
                        transformed_network: Some(rewired),
                        transformed_group: Some(group.clone()),
                        transformation: format!("trust-propagate:({u},{v})"),
                        expected: base,
                        actual: result,
                    },
                ));
            }
        }
    }
    Ok(AxiomReport::pass(axiom, examined))
}

/// Axiom 8. Scaling any nonvoter's out-edges by `k + 1` must preserve the
/// recommendation.
pub fn check_scale_invariance(
    rec: &dyn Recommender,
    net: &VotingNetwork,
    group: &Group,
    k: u64,
) -> Result<AxiomReport, AxiomError> {
    group.validate(net)?;
    let axiom = AxiomId::ScaleInvariance;
    let base = rec.recommend(net, group)?;
    let mut examined = 0usize;
    let nonvoters: Vec<NodeId> = net
        .node_ids()
        .filter(|n| net.is_nonvoter(n))
        .cloned()
        .collect();
    for u in nonvoters {
        let scaled = scale_edges(net, &u, k)?;
        let result = rec.recommend(&scaled, group)?;
        examined += 1;
        if result != base {
            return Ok(AxiomReport::violated(
                axiom,
                examined,
                Counterexample {
                    network: net.clone(),
                    group: group.clone(),
                    transformed_network: Some(scaled),
                    transformed_group: Some(group.clone()),
                    transformation: format!("scale-edges:{u}*{}", k + 1),
                    expected: base,
                    actual: result,
                },
            ));
        }
    }
    Ok(AxiomReport::pass(axiom, examined))
}

/// Axiom 9. Absorbing any in-scope group nonvoter must preserve the
/// recommendation. In scope: the nonvoter's influencers are voters or sinks,
/// and every node it influences is itself in the group (so the rewiring
/// covers all affected walks).
pub fn check_proportional_inclusiveness(
    rec: &dyn Recommender,
    net: &VotingNetwork,
    group: &Group,
) -> Result<AxiomReport, AxiomError> {
    group.validate(net)?;
    let axiom = AxiomId::ProportionalInclusiveness;
    let base = rec.recommend(net, group)?;
    let mut examined = 0usize;
    let mut any_applicable = false;
    for u in group.members() {
        if !net.is_nonvoter(u) || net.out_multidegree(u) == 0 {
            continue;
        }
        let influencers_ok = net
            .out_edges(u)
            .all(|(v, _)| net.is_voter(v) || net.is_nonvoter_sink(v));
        let influencees_ok = net.influencees(u).all(|(w, _)| group.contains(w));
        if !influencers_ok || !influencees_ok {
            continue;
        }
        any_applicable = true;
        let outcome = proportional_inclusiveness(net, group, u)?;
        let result = rec.recommend(&outcome.network, &outcome.group)?;
        examined += 1;
        if result != base {
            return Ok(AxiomReport::violated(
                axiom,
                examined,
                Counterexample {
                    network: net.clone(),
                    group: group.clone(),
                    transformed_network: Some(outcome.network),
                    transformed_group: Some(outcome.group),
                    transformation: format!("proportional-inclusiveness:{u}"),
                    expected: base,
                    actual: result,
                },
            ));
        }
    }
    if !any_applicable {
        return Ok(AxiomReport::pass(axiom, examined));
    }
    Ok(AxiomReport::pass(axiom, examined))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::SystemKind;

    fn id(s: &str) -> NodeId {
        NodeId::from(s)
    }

    struct Constant(Recommendation);

    impl Recommender for Constant {
        fn name(&self) -> &str {
            "constant"
        }

        fn recommend(&self, _: &VotingNetwork, _: &Group) -> Result<Recommendation, WalkError> {
            Ok(self.0)
        }
    }

    #[test]
    fn partitions_count_matches_bell_numbers() {
        // Bell numbers 1, 1, 2, 5, 15, 52, 203, 877, 4140.
        let bell = [1usize, 1, 2, 5, 15, 52, 203, 877, 4140];
        for (n, expected) in bell.iter().enumerate().skip(1) {
            assert_eq!(set_partitions(n).len(), *expected, "n = {n}");
        }
    }

    fn mixed_network() -> (VotingNetwork, Group) {
        let net = build_network(
            [
                (id("a"), VoteLabel::Plus),
                (id("b"), VoteLabel::Minus),
                (id("u"), VoteLabel::Undecided),
            ],
            [(id("u"), id("a"), 2), (id("u"), id("b"), 1)],
        )
        .unwrap();
        let group = Group::new([id("a"), id("u")]).unwrap();
        (net, group)
    }

    #[test]
    fn anonymity_passes_for_random_walk() {
        let (net, group) = mixed_network();
        let report = check_anonymity(&SystemKind::RandomWalk, &net, &group, 20, 7).unwrap();
        assert_eq!(report.verdict, Verdict::Pass);
        assert_eq!(report.trials, 21);
    }

    #[test]
    fn anonymity_zero_trials_checks_only_the_swap() {
        let (net, group) = mixed_network();
        let report = check_anonymity(&SystemKind::RandomWalk, &net, &group, 0, 7).unwrap();
        assert_eq!(report.verdict, Verdict::Pass);
        assert_eq!(report.trials, 1);
    }

    #[test]
    fn anonymity_flags_singleton_plus_on_minus_singleton() {
        let net = build_network([(id("b"), VoteLabel::Minus)], []).unwrap();
        let group = Group::new([id("b")]).unwrap();
        let report = check_anonymity(&SystemKind::SingletonPlus, &net, &group, 5, 7).unwrap();
        assert_eq!(report.verdict, Verdict::Violated);
        let ce = report.counterexample.unwrap();
        assert_eq!(ce.transformation, "swap-votes");
        // Replay both sides of the counterexample.
        assert_eq!(
            SystemKind::SingletonPlus
                .recommend(&ce.network, &ce.group)
                .unwrap(),
            Recommendation::Plus
        );
        assert_eq!(
            SystemKind::SingletonPlus
                .recommend(&ce.transformed_network.unwrap(), &ce.transformed_group.unwrap())
                .unwrap(),
            ce.actual
        );
    }

    #[test]
    fn positive_response_neutral_group_gains_plus_voter() {
        let net = build_network(
            [(id("a"), VoteLabel::Plus), (id("b"), VoteLabel::Minus)],
            [],
        )
        .unwrap();
        let group = Group::new([id("a"), id("b")]).unwrap();
        let report = check_positive_response(&SystemKind::RandomWalk, &net, &group).unwrap();
        assert_eq!(report.verdict, Verdict::Pass);
    }

    #[test]
    fn positive_response_flags_always_minus() {
        let net = build_network([(id("a"), VoteLabel::Plus)], []).unwrap();
        let group = Group::new([id("a")]).unwrap();
        let rec = Constant(Recommendation::Neutral);
        let report = check_positive_response(&rec, &net, &group).unwrap();
        assert_eq!(report.verdict, Verdict::Violated);
        assert!(report
            .counterexample
            .unwrap()
            .transformation
            .starts_with("add-plus-voter-to-group"));
    }

    #[test]
    fn positive_response_minus_base_only_checks_pair_clause() {
        let net = build_network([(id("b"), VoteLabel::Minus)], []).unwrap();
        let group = Group::new([id("b")]).unwrap();
        let report = check_positive_response(&SystemKind::RandomWalk, &net, &group).unwrap();
        assert_eq!(report.verdict, Verdict::Pass);
        assert_eq!(report.trials, 1);
    }

    #[test]
    fn pair_clause_can_flag_the_random_walk() {
        // The member's walk value shrinks towards zero when its out-degree
        // grows, which moves the group's value sum across zero here.
        let net = build_network(
            [
                (id("p"), VoteLabel::Plus),
                (id("c"), VoteLabel::Undecided),
                (id("w"), VoteLabel::Minus),
            ],
            [(id("c"), id("p"), 1)],
        )
        .unwrap();
        let group = Group::new([id("c"), id("w")]).unwrap();
        let report = check_positive_response(&SystemKind::RandomWalk, &net, &group).unwrap();
        assert_eq!(report.verdict, Verdict::Violated);
        assert!(report
            .counterexample
            .unwrap()
            .transformation
            .starts_with("add-isolated-pair"));
    }

    #[test]
    fn iis_passes_for_random_walk_and_counts_checks() {
        let net = build_network(
            [
                (id("a"), VoteLabel::Plus),
                (id("u"), VoteLabel::Undecided),
                (id("z"), VoteLabel::Minus),
            ],
            [(id("u"), id("a"), 1), (id("a"), id("u"), 1)],
        )
        .unwrap();
        let group = Group::new([id("u")]).unwrap();
        let report = check_iis(&SystemKind::RandomWalk, &net, &group).unwrap();
        assert_eq!(report.verdict, Verdict::Pass);
        // One unreachable node (z) and one voter out-edge (a, u).
        assert_eq!(report.trials, 2);
    }

    #[test]
    fn iis_vacuous_when_everything_reachable() {
        let (net, group) = mixed_network();
        let report = check_iis(&SystemKind::RandomWalk, &net, &group).unwrap();
        assert_eq!(report.verdict, Verdict::Pass);
        assert_eq!(report.trials, 0);
    }

    fn rational(s: &str) -> BigRational {
        crate::witness::parse_rational(s).unwrap()
    }

    #[test]
    fn centripetal_spec_example_passes_for_random_walk() {
        let spec = StarGroupSpec {
            n: 2,
            m: 3,
            inner_label: VoteLabel::Plus,
            external_degrees: vec![3, 3, 2],
        };
        let report =
            check_centripetal(&SystemKind::RandomWalk, &rational("3/2"), &[spec]).unwrap();
        assert_eq!(report.verdict, Verdict::Pass);
    }

    #[test]
    fn centripetal_flags_random_walk_when_spokes_overwhelm() {
        // Two nonvoters at the in-premise maximum degree drag the value sum
        // to zero, so the forced plus is missed.
        let spec = StarGroupSpec {
            n: 1,
            m: 2,
            inner_label: VoteLabel::Plus,
            external_degrees: vec![3, 3],
        };
        let report = check_centripetal(&SystemKind::RandomWalk, &rational("3"), &[spec]).unwrap();
        assert_eq!(report.verdict, Verdict::Violated);
        let ce = report.counterexample.unwrap();
        assert_eq!(ce.expected, Recommendation::Plus);
        assert_eq!(ce.actual, Recommendation::Neutral);
    }

    #[test]
    fn centripetal_rejects_out_of_scope_specs() {
        let spec = StarGroupSpec {
            n: 1,
            m: 1,
            inner_label: VoteLabel::Plus,
            external_degrees: vec![5],
        };
        assert!(matches!(
            check_centripetal(&SystemKind::RandomWalk, &rational("2"), &[spec]),
            Err(AxiomError::SpecOutOfScope(_))
        ));
    }

    #[test]
    fn centrifugal_flags_random_walk_on_spec_example() {
        let spec = StarGroupSpec {
            n: 1,
            m: 1,
            inner_label: VoteLabel::Plus,
            external_degrees: vec![3],
        };
        let report =
            check_centrifugal(&SystemKind::RandomWalk, &rational("3"), &rational("1"), &[spec])
                .unwrap();
        assert_eq!(report.verdict, Verdict::Violated);
        let ce = report.counterexample.unwrap();
        assert_eq!(ce.expected, Recommendation::Minus);
        assert_eq!(ce.actual, Recommendation::Plus);
    }

    #[test]
    fn centrifugal_passes_when_spokes_dominate() {
        let spec = StarGroupSpec {
            n: 1,
            m: 2,
            inner_label: VoteLabel::Plus,
            external_degrees: vec![7, 7],
        };
        let report =
            check_centrifugal(&SystemKind::RandomWalk, &rational("6"), &rational("1/2"), &[spec])
                .unwrap();
        assert_eq!(report.verdict, Verdict::Pass);
    }

    #[test]
    fn centrifugal_not_applicable_when_ratio_too_low() {
        // Eleven voters to one nonvoter: with r above 1/11 the axiom says
        // nothing about this star.
        let spec = StarGroupSpec {
            n: 11,
            m: 1,
            inner_label: VoteLabel::Plus,
            external_degrees: vec![34],
        };
        let report =
            check_centrifugal(&SystemKind::RandomWalk, &rational("3"), &rational("1/10"), &[spec])
                .unwrap();
        assert_eq!(report.verdict, Verdict::NotApplicable);
    }

    #[test]
    fn internal_consistency_unanimous_singletons() {
        let net = build_network(
            [(id("a"), VoteLabel::Plus), (id("b"), VoteLabel::Plus)],
            [],
        )
        .unwrap();
        let group = Group::new([id("a"), id("b")]).unwrap();
        let report =
            check_internal_consistency(&SystemKind::RandomWalk, &net, &group, DEFAULT_MAX_GROUP)
                .unwrap();
        assert_eq!(report.verdict, Verdict::Pass);
        assert_eq!(report.trials, 1);
    }

    #[test]
    fn internal_consistency_vacuous_without_unanimous_partition() {
        let net = build_network(
            [(id("a"), VoteLabel::Plus), (id("b"), VoteLabel::Minus)],
            [],
        )
        .unwrap();
        let group = Group::new([id("a"), id("b")]).unwrap();
        let report =
            check_internal_consistency(&SystemKind::RandomWalk, &net, &group, DEFAULT_MAX_GROUP)
                .unwrap();
        assert_eq!(report.verdict, Verdict::Pass);
    }

    #[test]
    fn violated_reports_replay() {
        // Equality-style checks: re-evaluating both sides reproduces the
        // mismatch recorded in the counterexample.
        let chain = build_network(
            [
                (id("u"), VoteLabel::Undecided),
                (id("w"), VoteLabel::Undecided),
                (id("a"), VoteLabel::Plus),
            ],
            [(id("u"), id("w"), 1), (id("w"), id("a"), 1)],
        )
        .unwrap();
        let group = Group::new([id("u")]).unwrap();
        let report = check_trust_propagation(&SystemKind::NeighborCount, &chain, &group).unwrap();
        let ce = report.counterexample.unwrap();
        assert_eq!(
            SystemKind::NeighborCount.recommend(&ce.network, &ce.group).unwrap(),
            ce.expected
        );
        assert_eq!(
            SystemKind::NeighborCount
                .recommend(
                    ce.transformed_network.as_ref().unwrap(),
                    ce.transformed_group.as_ref().unwrap()
                )
                .unwrap(),
            ce.actual
        );

        // Forced-value checks: the counterexample instance itself replays.
        let spec = StarGroupSpec {
            n: 1,
            m: 1,
            inner_label: VoteLabel::Plus,
            external_degrees: vec![3],
        };
        let report = check_centrifugal(
            &SystemKind::RandomWalk,
            &rational("3"),
            &rational("1"),
            &[spec],
        )
        .unwrap();
        let ce = report.counterexample.unwrap();
        assert!(ce.transformed_network.is_none());
        assert_eq!(
            SystemKind::RandomWalk.recommend(&ce.network, &ce.group).unwrap(),
            ce.actual
        );
        assert_ne!(ce.actual, ce.expected);
    }

    #[test]
    fn instance_checkers_bridge_star_shapes() {
        let (net, group) = crate::graph::generate_star_group(&StarGroupSpec {
            n: 2,
            m: 3,
            inner_label: VoteLabel::Plus,
            external_degrees: vec![3, 3, 2],
        })
        .unwrap();
        let report =
            check_centripetal_instance(&SystemKind::RandomWalk, &net, &group, &rational("3/2"))
                .unwrap();
        assert_eq!(report.verdict, Verdict::Pass);
        // Degrees exceed alpha * n: the premise fails, so nothing is forced.
        let report =
            check_centripetal_instance(&SystemKind::RandomWalk, &net, &group, &rational("1"))
                .unwrap();
        assert_eq!(report.verdict, Verdict::NotApplicable);
        // Not a star group at all.
        let plain = build_network(
            [(id("a"), VoteLabel::Plus), (id("b"), VoteLabel::Minus)],
            [],
        )
        .unwrap();
        let pair = Group::new([id("a"), id("b")]).unwrap();
        let report =
            check_centrifugal_instance(&SystemKind::RandomWalk, &plain, &pair, &rational("2"), &rational("1"))
                .unwrap();
        assert_eq!(report.verdict, Verdict::NotApplicable);
    }

    #[test]
    fn internal_consistency_rejects_oversized_groups() {
        let nodes: Vec<(NodeId, VoteLabel)> = (0..9)
            .map(|i| (NodeId::new(format!("v{i}")), VoteLabel::Plus))
            .collect();
        let ids: Vec<NodeId> = nodes.iter().map(|(n, _)| n.clone()).collect();
        let net = build_network(nodes, []).unwrap();
        let group = Group::new(ids).unwrap();
        assert!(matches!(
            check_internal_consistency(&SystemKind::RandomWalk, &net, &group, DEFAULT_MAX_GROUP),
            Err(AxiomError::GroupTooLarge { size: 9, max: 8 })
        ));
    }

    #[test]
    fn trust_propagation_passes_for_random_walk() {
        let net = build_network(
            [
                (id("u"), VoteLabel::Undecided),
                (id("w"), VoteLabel::Undecided),
                (id("a"), VoteLabel::Plus),
            ],
            [(id("u"), id("w"), 1), (id("w"), id("a"), 1)],
        )
        .unwrap();
        let group = Group::new([id("u")]).unwrap();
        let report = check_trust_propagation(&SystemKind::RandomWalk, &net, &group).unwrap();
        assert_eq!(report.verdict, Verdict::Pass);
        assert_eq!(report.trials, 1);
    }

    #[test]
    fn trust_propagation_flags_neighbor_count_on_two_hop_chain() {
        let net = build_network(
            [
                (id("u"), VoteLabel::Undecided),
                (id("w"), VoteLabel::Undecided),
                (id("a"), VoteLabel::Plus),
            ],
            [(id("u"), id("w"), 1), (id("w"), id("a"), 1)],
        )
        .unwrap();
        let group = Group::new([id("u")]).unwrap();
        let report = check_trust_propagation(&SystemKind::NeighborCount, &net, &group).unwrap();
        assert_eq!(report.verdict, Verdict::Violated);
        let ce = report.counterexample.unwrap();
        assert_eq!(ce.expected, Recommendation::Neutral);
        assert_eq!(ce.actual, Recommendation::Plus);
    }

    #[test]
    fn trust_propagation_vacuous_without_applicable_pairs() {
        let (net, group) = mixed_network();
        let report = check_trust_propagation(&SystemKind::RandomWalk, &net, &group).unwrap();
        assert_eq!(report.verdict, Verdict::Pass);
        assert_eq!(report.trials, 0);
    }

    #[test]
    fn scale_invariance_passes_for_random_walk() {
        let (net, group) = mixed_network();
        let report = check_scale_invariance(&SystemKind::RandomWalk, &net, &group, 3).unwrap();
        assert_eq!(report.verdict, Verdict::Pass);
        assert_eq!(report.trials, 1);
    }

    #[test]
    fn scale_invariance_flags_degree_biased() {
        // v2's doubled edge biases the degree-weighted walk; scaling v1
        // shifts the bias and flips u's sign.
        let net = build_network(
            [
                (id("u"), VoteLabel::Undecided),
                (id("v1"), VoteLabel::Undecided),
                (id("v2"), VoteLabel::Undecided),
                (id("a"), VoteLabel::Plus),
                (id("b"), VoteLabel::Minus),
            ],
            [
                (id("u"), id("v1"), 1),
                (id("u"), id("v2"), 1),
                (id("v1"), id("a"), 1),
                (id("v2"), id("b"), 2),
            ],
        )
        .unwrap();
        let group = Group::new([id("u")]).unwrap();
        let report = check_scale_invariance(&SystemKind::DegreeBiased, &net, &group, 1).unwrap();
        assert_eq!(report.verdict, Verdict::Violated);
    }

    #[test]
    fn scale_invariance_vacuous_without_nonvoters() {
        let net = build_network([(id("a"), VoteLabel::Plus)], []).unwrap();
        let group = Group::new([id("a")]).unwrap();
        let report = check_scale_invariance(&SystemKind::RandomWalk, &net, &group, 2).unwrap();
        assert_eq!(report.verdict, Verdict::Pass);
        assert_eq!(report.trials, 0);
    }

    #[test]
    fn prop_incl_passes_for_random_walk_on_module_example() {
        let (net, group) = mixed_network();
        let report =
            check_proportional_inclusiveness(&SystemKind::RandomWalk, &net, &group).unwrap();
        assert_eq!(report.verdict, Verdict::Pass);
        assert_eq!(report.trials, 1);
    }

    #[test]
    fn prop_incl_flags_inside_majority_when_outside_dominates() {
        let net = build_network(
            [
                (id("a"), VoteLabel::Plus),
                (id("u"), VoteLabel::Undecided),
                (id("b"), VoteLabel::Minus),
            ],
            [(id("u"), id("b"), 2)],
        )
        .unwrap();
        let group = Group::new([id("a"), id("u")]).unwrap();
        let report =
            check_proportional_inclusiveness(&SystemKind::InsideMajority, &net, &group).unwrap();
        assert_eq!(report.verdict, Verdict::Violated);
        let ce = report.counterexample.unwrap();
        assert_eq!(ce.expected, Recommendation::Plus);
        assert_eq!(ce.actual, Recommendation::Neutral);
        // The same instance is preserved by the random walk.
        let rw = check_proportional_inclusiveness(&SystemKind::RandomWalk, &net, &group).unwrap();
        assert_eq!(rw.verdict, Verdict::Pass);
    }

    #[test]
    fn prop_incl_vacuous_without_in_scope_nonvoter() {
        let net = build_network([(id("a"), VoteLabel::Plus)], []).unwrap();
        let group = Group::new([id("a")]).unwrap();
        let report =
            check_proportional_inclusiveness(&SystemKind::RandomWalk, &net, &group).unwrap();
        assert_eq!(report.verdict, Verdict::Pass);
        assert_eq!(report.trials, 0);
    }

    #[test]
    fn constant_recommenders_contradict_somewhere() {
        let (net, group) = mixed_network();
        let plus = Constant(Recommendation::Plus);
        let report = check_anonymity(&plus, &net, &group, 3, 1).unwrap();
        assert_eq!(report.verdict, Verdict::Violated);
    }
}
