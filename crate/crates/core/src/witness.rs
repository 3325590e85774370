//! Construction and verification of the parametric star-group family on
//! which the first six axioms force contradictory recommendations.
//!
//! For parameters `alpha > 1`, `beta >= 1` and `r > 0`, the construction
//! picks the smallest natural `ell` with `ell*alpha - (ell + 2) >= 0`, sets
//! `k = ceil((beta - 1) / (alpha - 1)) + ell` and `s = floor(k * alpha)`, and
//! builds a star group of `k` plus voters and `k * ceil(r)` nonvoters, each
//! wired to all the voters and to `s` private minus voters. Membership makes
//! the centripetal axiom force a plus on the whole star, while canceling one
//! external minus against one out-of-cell plus per nonvoter (licensed by the
//! positive-response pair clause) turns every cell of the canonical partition
//! into a star on which the centrifugal axiom forces a minus, because
//! `s - k + 1 >= beta` holds by construction.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::axiom::{AxiomId, Recommender};
use crate::graph::{
    build_network, generate_star_group, star_shape, GraphError, Group, NodeId, Recommendation,
    StarGroupSpec, VoteLabel, VotingNetwork,
};
use crate::walk::WalkError;

#[derive(Debug, Error)]
pub enum WitnessError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("malformed witness: {0}")]
    MalformedWitness(String),
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Parses "2", "5/2" or "2.5" into an exact rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if let Some((whole, frac)) = text.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = whole.starts_with('-');
        let whole: BigInt = whole.parse().ok()?;
        let numer: BigInt = frac.parse().ok()?;
        let denom = BigInt::from(10u32).pow(frac.len() as u32);
        let fraction = BigRational::new(numer, denom);
        let base = BigRational::from_integer(whole);
        return Some(if negative { base - fraction } else { base + fraction });
    }
    text.parse().ok()
}

fn ceil_to_u64(value: &BigRational) -> Option<u64> {
    value.ceil().to_integer().to_u64()
}

/// The derived arithmetic of a witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessParams {
    pub alpha: BigRational,
    pub beta: BigRational,
    pub r: BigRational,
    /// Smallest natural with `ell * alpha - (ell + 2) >= 0`.
    pub ell: u64,
    /// Number of plus voters in the star.
    pub k: u64,
    /// External minus voters per nonvoter.
    pub s: u64,
    /// Nonvoters per voter: `ceil(r)`.
    pub r_int: u64,
}

fn int(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl WitnessParams {
    pub fn derive(
        alpha: &BigRational,
        beta: &BigRational,
        r: &BigRational,
    ) -> Result<WitnessParams, WitnessError> {
        let one = BigRational::one();
        if *alpha <= one {
            return Err(WitnessError::InvalidParams("alpha must exceed 1".into()));
        }
        if *beta < one {
            return Err(WitnessError::InvalidParams("beta must be at least 1".into()));
        }
        if !r.is_positive() {
            return Err(WitnessError::InvalidParams("r must be positive".into()));
        }
        // ell * (alpha - 1) >= 2, minimal.
        let two = int(2);
        let ell = ceil_to_u64(&(&two / (alpha - &one)))
            .ok_or_else(|| WitnessError::InvalidParams("ell overflows".into()))?;
        let k = ceil_to_u64(&((beta - &one) / (alpha - &one)))
            .and_then(|c| c.checked_add(ell))
            .ok_or_else(|| WitnessError::InvalidParams("k overflows".into()))?;
        let s = (int(k) * alpha)
            .floor()
            .to_integer()
            .to_u64()
            .ok_or_else(|| WitnessError::InvalidParams("s overflows".into()))?;
        let r_int = ceil_to_u64(r)
            .filter(|v| *v >= 1)
            .ok_or_else(|| WitnessError::InvalidParams("ceil(r) overflows".into()))?;
        let params = WitnessParams {
            alpha: alpha.clone(),
            beta: beta.clone(),
            r: r.clone(),
            ell,
            k,
            s,
            r_int,
        };
        debug_assert!(params.ell_is_minimal());
        debug_assert!(params.centripetal_premise_holds());
        debug_assert!(params.key_inequality_holds());
        Ok(params)
    }

    /// `ell * alpha - (ell + 2) >= 0` and the same fails for `ell - 1`.
    pub fn ell_is_minimal(&self) -> bool {
        let holds =
            |l: u64| int(l) * &self.alpha - int(l + 2) >= BigRational::zero();
        holds(self.ell) && (self.ell == 0 || !holds(self.ell - 1))
    }

    /// `s <= k * alpha`, so the star satisfies the centripetal premise.
    pub fn centripetal_premise_holds(&self) -> bool {
        int(self.s) <= int(self.k) * &self.alpha
    }

    /// `s - k + 1 >= beta`, so each reduced cell satisfies the centrifugal
    /// premise.
    pub fn key_inequality_holds(&self) -> bool {
        self.s + 1 >= self.k && int(self.s - self.k + 1) >= self.beta
    }

    /// `r_int >= r`, the cells' nonvoter-to-voter ratio clears the threshold.
    pub fn ratio_premise_holds(&self) -> bool {
        int(self.r_int) >= self.r
    }

    pub fn nonvoters(&self) -> u64 {
        self.k * self.r_int
    }
}

/// A constructed impossibility instance: the star network, the star group,
/// and the canonical partition into one-voter cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub params: WitnessParams,
    pub network: VotingNetwork,
    pub star: Group,
    pub partition: Vec<Group>,
}

const MAX_WITNESS_NODES: u64 = 200_000;

/// Builds the witness for the given parameters.
pub fn build_witness(
    alpha: &BigRational,
    beta: &BigRational,
    r: &BigRational,
) -> Result<Witness, WitnessError> {
    let params = WitnessParams::derive(alpha, beta, r)?;
    let nonvoters = params.nonvoters();
    let total_nodes = params.k + nonvoters + nonvoters * params.s;
    if total_nodes > MAX_WITNESS_NODES {
        return Err(WitnessError::InvalidParams(format!(
            "witness would have {total_nodes} nodes"
        )));
    }
    let spec = StarGroupSpec {
        n: params.k as usize,
        m: nonvoters as usize,
        inner_label: VoteLabel::Plus,
        external_degrees: vec![params.s as usize; nonvoters as usize],
    };
    let (network, star) = generate_star_group(&spec)?;

    // Cells of one plus voter and r_int nonvoters; any leftover nonvoters
    // are grouped apart in a final cell. The canonical sizes divide evenly,
    // so the leftover cell only appears for hand-built parameter sets.
    let voters: Vec<NodeId> = (1..=params.k).map(|j| NodeId::new(format!("v{j}"))).collect();
    let spokes: Vec<NodeId> = (1..=nonvoters).map(|i| NodeId::new(format!("u{i}"))).collect();
    let mut partition = Vec::new();
    let mut next_spoke = 0usize;
    for voter in voters {
        let take = (params.r_int as usize).min(spokes.len() - next_spoke);
        let mut members = vec![voter];
        members.extend(spokes[next_spoke..next_spoke + take].iter().cloned());
        next_spoke += take;
        partition.push(Group::new(members)?);
    }
    if next_spoke < spokes.len() {
        partition.push(Group::new(spokes[next_spoke..].iter().cloned())?);
    }
    Ok(Witness {
        params,
        network,
        star,
        partition,
    })
}

/// One partition cell's evaluation: how the recommender answers on the cell
/// inside the full witness, and on the reduced cell where the centrifugal
/// premise applies directly.
#[derive(Debug, Clone)]
pub struct CellCheck {
    pub cell: Group,
    pub full_result: Recommendation,
    pub reduced_network: VotingNetwork,
    pub reduced_group: Group,
    pub reduced_result: Recommendation,
    pub premise_holds: bool,
}

/// Structured verdict of running a recommender against a witness.
#[derive(Debug, Clone)]
pub struct WitnessVerdict {
    pub star_is_star_group: bool,
    pub centripetal_premise: bool,
    pub centrifugal_premise: bool,
    pub star_forced: Recommendation,
    pub star_actual: Recommendation,
    pub cells_forced: Recommendation,
    pub cells: Vec<CellCheck>,
    /// Which of the three group-power axioms the outputs contradict.
    pub contradicted: BTreeSet<AxiomId>,
    pub note: String,
}

fn validate_witness(witness: &Witness) -> Result<(), WitnessError> {
    let params = &witness.params;
    let shape = star_shape(&witness.network, &witness.star)
        .ok_or_else(|| WitnessError::MalformedWitness("star group shape broken".into()))?;
    if shape.inner_label != VoteLabel::Plus
        || shape.n() as u64 != params.k
        || shape.m() as u64 != params.nonvoters()
        || shape.degrees().iter().any(|d| *d as u64 != params.s)
    {
        return Err(WitnessError::MalformedWitness(
            "star shape disagrees with parameters".into(),
        ));
    }
    let mut seen: BTreeSet<NodeId> = BTreeSet::new();
    for cell in &witness.partition {
        for member in cell.members() {
            if !seen.insert(member.clone()) {
                return Err(WitnessError::MalformedWitness(format!(
                    "partition cells overlap on {member}"
                )));
            }
        }
    }
    if seen != *witness.star.as_set() {
        return Err(WitnessError::MalformedWitness(
            "partition does not cover the star group".into(),
        ));
    }
    Ok(())
}

/// Builds the reduced form of a cell: each nonvoter keeps its in-cell voter
/// and loses one external minus voter per out-of-cell plus voter.
fn reduce_cell(witness: &Witness, cell: &Group) -> Result<(VotingNetwork, Group), WitnessError> {
    let net = &witness.network;
    let cell_voters: Vec<NodeId> = cell
        .members()
        .filter(|m| net.is_voter(m))
        .cloned()
        .collect();
    let cell_nonvoters: Vec<NodeId> = cell
        .members()
        .filter(|m| net.is_nonvoter(m))
        .cloned()
        .collect();
    // Out-of-cell plus voters canceled against externals, one pair each.
    let cancel = (witness.params.k as usize).saturating_sub(cell_voters.len());
    let mut nodes: Vec<(NodeId, VoteLabel)> = Vec::new();
    let mut edges: Vec<(NodeId, NodeId, u64)> = Vec::new();
    for v in &cell_voters {
        nodes.push((v.clone(), VoteLabel::Plus));
    }
    for u in &cell_nonvoters {
        nodes.push((u.clone(), VoteLabel::Undecided));
        for v in &cell_voters {
            edges.push((u.clone(), v.clone(), 1));
        }
        let externals: Vec<NodeId> = net
            .out_edges(u)
            .map(|(to, _)| to.clone())
            .filter(|to| !witness.star.contains(to))
            .collect();
        if externals.len() < cancel {
            return Err(WitnessError::MalformedWitness(format!(
                "nonvoter {u} has too few externals to cancel"
            )));
        }
        for t in externals.into_iter().skip(cancel) {
            nodes.push((t.clone(), VoteLabel::Minus));
            edges.push((u.clone(), t, 1));
        }
    }
    let network = build_network(nodes, edges)?;
    let group = Group::new(cell.members().cloned())?;
    Ok((network, group))
}

/// Runs a recommender against the witness and reports which of the three
/// group-power axioms its outputs contradict. The extraction of a minimal
/// positively-recommended sub-part is an argument over all conceivable
/// recommenders, not a runnable procedure, so the verdict confines itself to
/// the checkable consequences: the star's forced plus, the reduced cells'
/// forced minus, and the partition-consistency of the actual outputs.
pub fn verify_witness(
    witness: &Witness,
    rec: &dyn Recommender,
) -> Result<WitnessVerdict, WitnessError> {
    validate_witness(witness)?;
    let params = &witness.params;
    let star_is_star_group = true;
    let centripetal_premise = params.centripetal_premise_holds();
    let centrifugal_premise = params.key_inequality_holds() && params.ratio_premise_holds();

    let star_actual = rec.recommend(&witness.network, &witness.star)?;
    let mut cells = Vec::new();
    for cell in &witness.partition {
        let full_result = rec.recommend(&witness.network, cell)?;
        let (reduced_network, reduced_group) = reduce_cell(witness, cell)?;
        let reduced_result = rec.recommend(&reduced_network, &reduced_group)?;
        let has_voter = cell.members().any(|m| witness.network.is_voter(m));
        let premise_holds = if has_voter {
            centrifugal_premise
        } else {
            // A voterless leftover cell: every bound is trivially met.
            true
        };
        cells.push(CellCheck {
            cell: cell.clone(),
            full_result,
            reduced_network,
            reduced_group,
            reduced_result,
            premise_holds,
        });
    }

    let mut contradicted = BTreeSet::new();
    if centripetal_premise && star_actual != Recommendation::Plus {
        contradicted.insert(AxiomId::Centripetal);
    }
    if cells
        .iter()
        .any(|c| c.premise_holds && c.reduced_result != Recommendation::Minus)
    {
        contradicted.insert(AxiomId::Centrifugal);
    }
    let unanimous = cells
        .first()
        .map(|c| c.full_result)
        .filter(|first| cells.iter().all(|c| c.full_result == *first));
    if let Some(value) = unanimous {
        if value != Recommendation::Neutral && star_actual != value {
            contradicted.insert(AxiomId::InternalConsistency);
        }
    }

    Ok(WitnessVerdict {
        star_is_star_group,
        centripetal_premise,
        centrifugal_premise,
        star_forced: Recommendation::Plus,
        star_actual,
        cells_forced: Recommendation::Minus,
        cells,
        contradicted,
        note: "The centripetal premise forces + on the star while pair-cancellation \
               and the centrifugal premise force - on every cell of the partition; \
               any anonymous, positively-responsive, IIS recommender must therefore \
               contradict the centripetal, centrifugal or internal-consistency axiom \
               on this instance. The minimal-positive-part argument that rules out \
               escape partitions quantifies over all recommenders and is reported \
               here only through the cells' actual outputs."
            .into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::is_star_group;
    use crate::systems::SystemKind;
    use proptest::prelude::*;

    fn rat(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn parse_rational_forms() {
        assert_eq!(parse_rational("2").unwrap(), int(2));
        assert_eq!(parse_rational("5/2"), parse_rational("2.5"));
        assert_eq!(parse_rational("-1.5"), parse_rational("-3/2"));
        assert!(parse_rational("abc").is_none());
    }

    #[test]
    fn worked_parameters_alpha_2_beta_2_5() {
        let p = WitnessParams::derive(&rat("2"), &rat("5/2"), &rat("1")).unwrap();
        assert_eq!((p.ell, p.k, p.s, p.r_int), (2, 4, 8, 1));
        assert!(p.ell_is_minimal());
        assert!(p.centripetal_premise_holds());
        assert!(p.key_inequality_holds());
        // s - k + 1 = 5 >= 5/2.
        assert!(int(5) >= p.beta);
    }

    #[test]
    fn worked_parameters_alpha_2_beta_2() {
        let p = WitnessParams::derive(&rat("2"), &rat("2"), &rat("1")).unwrap();
        assert_eq!((p.ell, p.k, p.s), (2, 3, 6));
        assert_eq!(p.s - p.k + 1, 4);
    }

    #[test]
    fn rejects_out_of_range_parameters() {
        assert!(matches!(
            WitnessParams::derive(&rat("1"), &rat("2"), &rat("1")),
            Err(WitnessError::InvalidParams(_))
        ));
        assert!(matches!(
            WitnessParams::derive(&rat("2"), &rat("1/2"), &rat("1")),
            Err(WitnessError::InvalidParams(_))
        ));
        assert!(matches!(
            WitnessParams::derive(&rat("2"), &rat("2"), &rat("0")),
            Err(WitnessError::InvalidParams(_))
        ));
    }

    #[test]
    fn witness_structure_matches_parameters() {
        let w = build_witness(&rat("2"), &rat("5/2"), &rat("1")).unwrap();
        assert_eq!(w.network.node_count(), 4 + 4 + 32);
        assert!(is_star_group(&w.network, &w.star));
        assert_eq!(w.partition.len(), 4);
        for cell in &w.partition {
            assert_eq!(cell.len(), 2);
        }
    }

    #[test]
    fn reduced_cells_are_stars_with_the_key_degree() {
        let w = build_witness(&rat("2"), &rat("5/2"), &rat("1")).unwrap();
        let verdict = verify_witness(&w, &SystemKind::RandomWalk).unwrap();
        for cell in &verdict.cells {
            let shape = crate::graph::star_shape(&cell.reduced_network, &cell.reduced_group)
                .expect("reduced cell is a star group");
            assert_eq!(shape.n(), 1);
            assert_eq!(shape.m(), w.params.r_int as usize);
            // Each nonvoter keeps s - k + 1 external minus voters after the
            // pair cancellation.
            let expected = (w.params.s - w.params.k + 1) as usize;
            assert!(shape.degrees().iter().all(|d| *d == expected));
        }
    }

    #[test]
    fn random_walk_contradicts_a_group_power_axiom() {
        let w = build_witness(&rat("2"), &rat("5/2"), &rat("1")).unwrap();
        let verdict = verify_witness(&w, &SystemKind::RandomWalk).unwrap();
        assert!(verdict.centripetal_premise);
        assert!(verdict.centrifugal_premise);
        // The value sum keeps the star positive, so the contradiction lands
        // on the centrifugal side: reduced cells come out plus, not minus.
        assert_eq!(verdict.star_actual, Recommendation::Plus);
        assert!(verdict.contradicted.contains(&AxiomId::Centrifugal));
        assert!(!verdict.contradicted.is_empty());
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
    fn always_plus_contradicts_centrifugal() {
        let w = build_witness(&rat("2"), &rat("5/2"), &rat("1")).unwrap();
        let verdict = verify_witness(&w, &Constant(Recommendation::Plus)).unwrap();
        assert!(verdict.contradicted.contains(&AxiomId::Centrifugal));
        assert!(!verdict.contradicted.contains(&AxiomId::Centripetal));
    }

    #[test]
    fn always_minus_contradicts_centripetal() {
        let w = build_witness(&rat("2"), &rat("5/2"), &rat("1")).unwrap();
        let verdict = verify_witness(&w, &Constant(Recommendation::Minus)).unwrap();
        assert!(verdict.contradicted.contains(&AxiomId::Centripetal));
    }

    #[test]
    fn contradictions_are_reported_not_assumed() {
        // A recommender keyed on node names can thread the needle: plus on
        // the star, minus on every reduced cell, mixed answers on the full
        // cells. Nothing among the three checked consequences fires, which
        // is fine: such a system gives isomorphic instances different
        // answers, so it fails anonymity instead.
        struct NameKeyed;
        impl Recommender for NameKeyed {
            fn name(&self) -> &str {
                "name-keyed"
            }
            fn recommend(
                &self,
                net: &VotingNetwork,
                group: &Group,
            ) -> Result<Recommendation, WalkError> {
                if group.len() > 2 {
                    return Ok(Recommendation::Plus);
                }
                // Reduced cells are recognizable by their trimmed networks.
                if net.node_count() < 10 {
                    return Ok(Recommendation::Minus);
                }
                Ok(if group.contains(&crate::graph::NodeId::from("u1")) {
                    Recommendation::Plus
                } else {
                    Recommendation::Minus
                })
            }
        }
        let w = build_witness(&rat("2"), &rat("5/2"), &rat("1")).unwrap();
        let verdict = verify_witness(&w, &NameKeyed).unwrap();
        assert!(verdict.contradicted.is_empty());
    }

    #[test]
    fn cell_splitting_star_gets_internal_consistency_contradiction() {
        // A recommender that answers minus on every cell but plus on the
        // star contradicts only the consistency axiom.
        struct CellMinus;
        impl Recommender for CellMinus {
            fn name(&self) -> &str {
                "cell-minus"
            }
            fn recommend(
                &self,
                _: &VotingNetwork,
                group: &Group,
            ) -> Result<Recommendation, WalkError> {
                Ok(if group.len() <= 2 {
                    Recommendation::Minus
                } else {
                    Recommendation::Plus
                })
            }
        }
        let w = build_witness(&rat("2"), &rat("5/2"), &rat("1")).unwrap();
        let verdict = verify_witness(&w, &CellMinus).unwrap();
        assert_eq!(
            verdict.contradicted.into_iter().collect::<Vec<_>>(),
            [AxiomId::InternalConsistency]
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn derived_inequalities_hold(alpha_num in 11u64..50, beta_num in 10u64..60, r_num in 1u64..30) {
            // alpha in (1.1, 5], beta in [1, 6], r in (0, 3].
            let alpha = BigRational::new(BigInt::from(alpha_num), BigInt::from(10));
            let beta = BigRational::new(BigInt::from(beta_num), BigInt::from(10));
            let r = BigRational::new(BigInt::from(r_num), BigInt::from(10));
            let p = WitnessParams::derive(&alpha, &beta, &r).unwrap();
            prop_assert!(p.ell_is_minimal());
            prop_assert!(p.centripetal_premise_holds());
            prop_assert!(p.key_inequality_holds());
            prop_assert!(p.ratio_premise_holds());
        }

        #[test]
        fn partitions_cover_and_stay_disjoint(alpha_num in 11u64..40, beta_num in 10u64..40, r_num in 1u64..25) {
            let alpha = BigRational::new(BigInt::from(alpha_num), BigInt::from(10));
            let beta = BigRational::new(BigInt::from(beta_num), BigInt::from(10));
            let r = BigRational::new(BigInt::from(r_num), BigInt::from(10));
            let Ok(w) = build_witness(&alpha, &beta, &r) else {
                return Ok(());
            };
            prop_assert!(validate_witness(&w).is_ok());
        }
    }
}
