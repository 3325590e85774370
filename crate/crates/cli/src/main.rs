//! Command-line front end: recommendations, exact solving, axiom checks,
//! rewrites, group reduction, impossibility witnesses, star generation and
//! DOT export, all over the canonical JSON graph format.

use std::fs;
use std::io::IsTerminal;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use groupwalk::axiom::{
    check_anonymity, check_centrifugal_instance, check_centripetal_instance, check_iis,
    check_internal_consistency, check_positive_response, check_proportional_inclusiveness,
    check_scale_invariance, check_trust_propagation, AxiomId, AxiomReport, Verdict,
    DEFAULT_MAX_GROUP,
};
use groupwalk::format::{network_from_json, to_dot, GraphDoc};
use groupwalk::graph::{
    generate_star_group, Group, NodeId, StarGroupSpec, VoteLabel, VotingNetwork,
};
use groupwalk::systems::SystemKind;
use groupwalk::transform::{
    proportional_inclusiveness, reduce_group, scale_edges, trust_propagate, RewriteParams,
    RewriteStep,
};
use groupwalk::walk::solve_walk;
use groupwalk::witness::{build_witness, parse_rational, verify_witness, Witness, WitnessParams};

#[derive(Parser)]
#[command(name = "groupwalk", version, about = "Group recommendations on trust multigraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the group recommendation: "+", "-" or "0"
    Recommend {
        #[arg(long)]
        graph: PathBuf,
        /// Comma-separated member ids
        #[arg(long)]
        group: String,
        #[arg(long, default_value = "random-walk")]
        system: String,
    },
    /// Print every node's exact walk value
    Solve {
        #[arg(long)]
        graph: PathBuf,
        /// Also print decimal approximations
        #[arg(long)]
        decimal: bool,
    },
    /// Run axiom checkers and print one JSON report per line
    Check {
        /// 1-9 or "all"
        #[arg(long)]
        axiom: String,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        group: String,
        #[arg(long, default_value = "random-walk")]
        system: String,
        /// Permutations sampled by the anonymity checker
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Centripetal bound (axiom 4)
        #[arg(long)]
        alpha: Option<String>,
        /// Centrifugal bound (axiom 5)
        #[arg(long)]
        beta: Option<String>,
        /// Centrifugal nonvoter ratio (axiom 5)
        #[arg(long)]
        r: Option<String>,
        /// Partition-enumeration cap (axiom 6)
        #[arg(long, default_value_t = DEFAULT_MAX_GROUP)]
        max_group: usize,
        /// Extra edge copies added by the scaling checker (axiom 8)
        #[arg(long, default_value_t = 1)]
        scale: u64,
    },
    /// Apply one rewrite and print the transformed graph
    Transform {
        /// trust-propagation | scale | prop-incl
        #[arg(long)]
        kind: String,
        #[arg(long)]
        graph: PathBuf,
        /// Rewired node (trust-propagation), scaled node (scale) or absorbed
        /// group nonvoter (prop-incl)
        #[arg(long)]
        u: Option<String>,
        /// Eliminated intermediary (trust-propagation)
        #[arg(long)]
        v: Option<String>,
        /// Extra edge copies (scale)
        #[arg(long)]
        k: Option<u64>,
        /// Group members (prop-incl)
        #[arg(long)]
        group: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reduce a group to voters and sinks; print the rewrite trace
    Reduce {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        group: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build an impossibility witness for alpha, beta, r
    Witness {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
        #[arg(long)]
        r: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check which group-power axiom a system contradicts on a witness
    WitnessVerify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "random-walk")]
        system: String,
    },
    /// Generate a star-group network
    GenStar {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// Inner voter label: "+" or "-"
        #[arg(long)]
        inner: String,
        /// Comma-separated external degrees, one per nonvoter
        #[arg(long)]
        degrees: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render the graph in DOT syntax
    ExportDot {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Failure {
    message: String,
    code: u8,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            message: message.into(),
            code: 2,
        }
    }
}

impl<E: std::error::Error> From<E> for Failure {
    fn from(err: E) -> Failure {
        Failure {
            message: err.to_string(),
            code: 2,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn load_graph(path: &Path) -> Result<(VotingNetwork, Option<Group>), Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("--graph {}: {e}", path.display())))?;
    let parsed = network_from_json(&text)
        .map_err(|e| Failure::usage(format!("--graph {}: {e}", path.display())))?;
    Ok(parsed)
}

fn parse_group(csv: &str) -> Result<Group, Failure> {
    let members = csv
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(NodeId::new);
    Group::new(members).map_err(|e| Failure::usage(format!("--group: {e}")))
}

fn parse_system(name: &str) -> Result<SystemKind, Failure> {
    SystemKind::parse(name).ok_or_else(|| {
        Failure::usage(format!(
            "--system: unknown system {name:?} (expected one of {})",
            SystemKind::ALL.map(|s| s.name()).join(", ")
        ))
    })
}

fn parse_ratio_flag(flag: &str, value: &str) -> Result<BigRational, Failure> {
    parse_rational(value)
        .ok_or_else(|| Failure::usage(format!("--{flag}: {value:?} is not a rational")))
}

fn emit(out: Option<&Path>, content: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, content)
            .map_err(|e| Failure::usage(format!("--out {}: {e}", path.display()))),
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

fn group_json(group: &Group) -> Value {
    Value::Array(
        group
            .members()
            .map(|m| Value::String(m.to_string()))
            .collect(),
    )
}

fn graph_json(net: &VotingNetwork, group: Option<&Group>) -> Value {
    serde_json::to_value(GraphDoc::with_group(net, group)).expect("graph serializes")
}

fn report_json(report: &AxiomReport) -> Value {
    let verdict = match report.verdict {
        Verdict::Pass => "pass",
        Verdict::Violated => "violated",
        Verdict::NotApplicable => "not-applicable",
    };
    let counterexample = report.counterexample.as_ref().map(|ce| {
        json!({
            "network": graph_json(&ce.network, None),
            "group": group_json(&ce.group),
            "transformed_network": ce.transformed_network.as_ref().map(|n| graph_json(n, None)),
            "transformed_group": ce.transformed_group.as_ref().map(group_json),
            "transformation": ce.transformation,
            "expected": ce.expected.to_string(),
            "actual": ce.actual.to_string(),
        })
    });
    json!({
        "axiom": report.axiom.number(),
        "name": report.axiom.name(),
        "verdict": verdict,
        "trials": report.trials,
        "counterexample": counterexample,
    })
}

#[allow(clippy::too_many_arguments)]
fn run_checker(
    axiom: AxiomId,
    system: SystemKind,
    net: &VotingNetwork,
    group: &Group,
    trials: u64,
    seed: u64,
    alpha: Option<&BigRational>,
    beta: Option<&BigRational>,
    r: Option<&BigRational>,
    max_group: usize,
    scale: u64,
) -> Result<AxiomReport, Failure> {
    let not_applicable = |axiom| AxiomReport {
        axiom,
        verdict: Verdict::NotApplicable,
        counterexample: None,
        trials: 0,
    };
    let report = match axiom {
        AxiomId::Anonymity => check_anonymity(&system, net, group, trials, seed)?,
        AxiomId::PositiveResponse => check_positive_response(&system, net, group)?,
        AxiomId::Iis => check_iis(&system, net, group)?,
        AxiomId::Centripetal => match alpha {
            Some(alpha) => check_centripetal_instance(&system, net, group, alpha)?,
            None => not_applicable(axiom),
        },
        AxiomId::Centrifugal => match (beta, r) {
            (Some(beta), Some(r)) => check_centrifugal_instance(&system, net, group, beta, r)?,
            _ => not_applicable(axiom),
        },
        AxiomId::InternalConsistency => check_internal_consistency(&system, net, group, max_group)?,
        AxiomId::TrustPropagation => check_trust_propagation(&system, net, group)?,
        AxiomId::ScaleInvariance => check_scale_invariance(&system, net, group, scale)?,
        AxiomId::ProportionalInclusiveness => {
            check_proportional_inclusiveness(&system, net, group)?
        }
    };
    Ok(report)
}

fn step_json(step: &RewriteStep) -> Value {
    let params = match &step.params {
        RewriteParams::TrustPropagation { u, v } => json!({
            "u": u.to_string(),
            "v": v.to_string(),
        }),
        RewriteParams::ScaleInvariance {
            node,
            multiply,
            divide,
        } => json!({
            "node": node.to_string(),
            "multiply": multiply,
            "divide": divide,
        }),
        RewriteParams::ProportionalInclusiveness { u, copies, marked } => json!({
            "u": u.to_string(),
            "copies": copies,
            "marked": marked.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
        }),
    };
    json!({
        "kind": step.kind().as_str(),
        "params": params,
        "before": graph_json(&step.before_network, step.before_group.as_ref()),
        "after": graph_json(&step.after_network, step.after_group.as_ref()),
    })
}

fn witness_json(witness: &Witness) -> Value {
    let mut doc = match graph_json(&witness.network, Some(&witness.star)) {
        Value::Object(map) => map,
        _ => unreachable!(),
    };
    // The group field carries the star; the partition and the derived
    // arithmetic ride along as extra fields.
    doc.insert(
        "partition".into(),
        Value::Array(witness.partition.iter().map(group_json).collect()),
    );
    let p = &witness.params;
    doc.insert(
        "meta".into(),
        json!({
            "alpha": p.alpha.to_string(),
            "beta": p.beta.to_string(),
            "r": p.r.to_string(),
            "ell": p.ell,
            "k": p.k,
            "s": p.s,
            "r_int": p.r_int,
        }),
    );
    Value::Object(doc)
}

fn witness_from_json(text: &str) -> Result<Witness, Failure> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| Failure::usage(format!("--in: {e}")))?;
    let doc: GraphDoc =
        serde_json::from_value(value.clone()).map_err(|e| Failure::usage(format!("--in: {e}")))?;
    let network = doc
        .to_network()
        .map_err(|e| Failure::usage(format!("--in: {e}")))?;
    let star = doc
        .to_group()
        .map_err(|e| Failure::usage(format!("--in: {e}")))?
        .ok_or_else(|| Failure::usage("--in: witness file lacks a group"))?;
    let meta = value
        .get("meta")
        .and_then(Value::as_object)
        .ok_or_else(|| Failure::usage("--in: witness file lacks meta"))?;
    let ratio = |key: &str| -> Result<BigRational, Failure> {
        meta.get(key)
            .and_then(Value::as_str)
            .and_then(parse_rational)
            .ok_or_else(|| Failure::usage(format!("--in: meta.{key} missing or malformed")))
    };
    let params = WitnessParams::derive(&ratio("alpha")?, &ratio("beta")?, &ratio("r")?)?;
    let partition = value
        .get("partition")
        .and_then(Value::as_array)
        .ok_or_else(|| Failure::usage("--in: witness file lacks partition"))?
        .iter()
        .map(|cell| {
            let ids = cell
                .as_array()
                .ok_or_else(|| Failure::usage("--in: partition cell is not an array"))?
                .iter()
                .map(|v| {
                    v.as_str()
                        .map(NodeId::new)
                        .ok_or_else(|| Failure::usage("--in: partition member is not a string"))
                })
                .collect::<Result<Vec<_>, _>>()?;
            Group::new(ids).map_err(|e| Failure::usage(format!("--in: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Witness {
        params,
        network,
        star,
        partition,
    })
}

fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Recommend {
            graph,
            group,
            system,
        } => {
            let (net, _) = load_graph(&graph)?;
            let group = parse_group(&group)?;
            let system = parse_system(&system)?;
            let recommendation = system.recommend(&net, &group)?;
            println!("{recommendation}");
            Ok(0)
        }
        Command::Solve { graph, decimal } => {
            let (net, _) = load_graph(&graph)?;
            let solution = solve_walk(&net);
            for (node, value) in solution.iter() {
                if decimal {
                    let approx = value.to_f64().unwrap_or(f64::NAN);
                    println!("{node} = {value} ({approx:.6})");
                } else {
                    println!("{node} = {value}");
                }
            }
            Ok(0)
        }
        Command::Check {
            axiom,
            graph,
            group,
            system,
            trials,
            seed,
            alpha,
            beta,
            r,
            max_group,
            scale,
        } => {
            let (net, _) = load_graph(&graph)?;
            let group = parse_group(&group)?;
            let system = parse_system(&system)?;
            let alpha = alpha.map(|a| parse_ratio_flag("alpha", &a)).transpose()?;
            let beta = beta.map(|b| parse_ratio_flag("beta", &b)).transpose()?;
            let r = r.map(|r| parse_ratio_flag("r", &r)).transpose()?;
            let axioms: Vec<AxiomId> = if axiom == "all" {
                AxiomId::ALL.to_vec()
            } else {
                let number: u8 = axiom
                    .parse()
                    .map_err(|_| Failure::usage(format!("--axiom: {axiom:?} is not 1-9 or all")))?;
                vec![AxiomId::from_number(number)
                    .ok_or_else(|| Failure::usage(format!("--axiom: {number} out of range")))?]
            };
            if axioms == [AxiomId::Centripetal] && alpha.is_none() {
                return Err(Failure::usage("--axiom 4 requires --alpha"));
            }
            if axioms == [AxiomId::Centrifugal] && (beta.is_none() || r.is_none()) {
                return Err(Failure::usage("--axiom 5 requires --beta and --r"));
            }
            let human = std::io::stdout().is_terminal();
            let mut any_violated = false;
            for axiom in axioms {
                let report = run_checker(
                    axiom,
                    system,
                    &net,
                    &group,
                    trials,
                    seed,
                    alpha.as_ref(),
                    beta.as_ref(),
                    r.as_ref(),
                    max_group,
                    scale,
                )?;
                any_violated |= report.verdict == Verdict::Violated;
                println!("{}", serde_json::to_string(&report_json(&report)).unwrap());
                if human {
                    let tag = match report.verdict {
                        Verdict::Pass => "pass",
                        Verdict::Violated => "VIOLATED",
                        Verdict::NotApplicable => "n/a",
                    };
                    eprintln!(
                        "axiom {} ({}): {} [{} checks]",
                        report.axiom.number(),
                        report.axiom.name(),
                        tag,
                        report.trials
                    );
                }
            }
            Ok(if any_violated { 1 } else { 0 })
        }
        Command::Transform {
            kind,
            graph,
            u,
            v,
            k,
            group,
            out,
        } => {
            let (net, _) = load_graph(&graph)?;
            let need = |flag: &str, value: Option<String>| {
                value.ok_or_else(|| {
                    Failure::usage(format!("transform --kind {kind} requires --{flag}"))
                })
            };
            let doc = match kind.as_str() {
                "trust-propagation" => {
                    let u = NodeId::new(need("u", u)?);
                    let v = NodeId::new(need("v", v)?);
                    let rewired = trust_propagate(&net, &u, &v)?;
                    graph_json(&rewired, None)
                }
                "scale" => {
                    let u = NodeId::new(need("u", u)?);
                    let k =
                        k.ok_or_else(|| Failure::usage("transform --kind scale requires --k"))?;
                    let scaled = scale_edges(&net, &u, k)?;
                    graph_json(&scaled, None)
                }
                "prop-incl" => {
                    let u = NodeId::new(need("u", u)?);
                    let group = parse_group(&need("group", group)?)?;
                    let outcome = proportional_inclusiveness(&net, &group, &u)?;
                    graph_json(&outcome.network, Some(&outcome.group))
                }
                other => {
                    return Err(Failure::usage(format!(
                        "--kind: {other:?} is not trust-propagation, scale or prop-incl"
                    )))
                }
            };
            emit(out.as_deref(), &serde_json::to_string(&doc).unwrap())?;
            Ok(0)
        }
        Command::Reduce { graph, group, out } => {
            let (net, _) = load_graph(&graph)?;
            let group = parse_group(&group)?;
            let outcome = reduce_group(&net, &group)?;
            let steps: Vec<Value> = outcome.steps.iter().map(step_json).collect();
            emit(
                out.as_deref(),
                &serde_json::to_string(&Value::Array(steps)).unwrap(),
            )?;
            Ok(0)
        }
        Command::Witness {
            alpha,
            beta,
            r,
            out,
        } => {
            let alpha = parse_ratio_flag("alpha", &alpha)?;
            let beta = parse_ratio_flag("beta", &beta)?;
            let r = parse_ratio_flag("r", &r)?;
            let witness = build_witness(&alpha, &beta, &r)?;
            emit(
                out.as_deref(),
                &serde_json::to_string(&witness_json(&witness)).unwrap(),
            )?;
            Ok(0)
        }
        Command::WitnessVerify { input, system } => {
            let text = fs::read_to_string(&input)
                .map_err(|e| Failure::usage(format!("--in {}: {e}", input.display())))?;
            let witness = witness_from_json(&text)?;
            let system = parse_system(&system)?;
            let verdict = verify_witness(&witness, &system)?;
            let cells: Vec<Value> = verdict
                .cells
                .iter()
                .map(|c| {
                    json!({
                        "cell": group_json(&c.cell),
                        "full_result": c.full_result.to_string(),
                        "reduced_result": c.reduced_result.to_string(),
                        "premise_holds": c.premise_holds,
                    })
                })
                .collect();
            let contradicted: Vec<u8> = verdict.contradicted.iter().map(|a| a.number()).collect();
            let value = json!({
                "system": system.name(),
                "star_is_star_group": verdict.star_is_star_group,
                "centripetal_premise": verdict.centripetal_premise,
                "centrifugal_premise": verdict.centrifugal_premise,
                "star_forced": verdict.star_forced.to_string(),
                "star_actual": verdict.star_actual.to_string(),
                "cells_forced": verdict.cells_forced.to_string(),
                "cells": cells,
                "contradicted": contradicted,
                "note": verdict.note,
            });
            println!("{}", serde_json::to_string(&value).unwrap());
            Ok(if verdict.contradicted.is_empty() { 1 } else { 0 })
        }
        Command::GenStar {
            n,
            m,
            inner,
            degrees,
            out,
        } => {
            let inner_label = match inner.as_str() {
                "+" => VoteLabel::Plus,
                "-" => VoteLabel::Minus,
                other => {
                    return Err(Failure::usage(format!(
                        "--inner: {other:?} is not \"+\" or \"-\""
                    )))
                }
            };
            let external_degrees = match degrees {
                None => Vec::new(),
                Some(csv) => csv
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| {
                        s.parse::<usize>()
                            .map_err(|_| Failure::usage(format!("--degrees: {s:?} is not a count")))
                    })
                    .collect::<Result<Vec<_>, _>>()?,
            };
            let spec = StarGroupSpec {
                n,
                m,
                inner_label,
                external_degrees,
            };
            let (net, group) = generate_star_group(&spec)?;
            emit(
                out.as_deref(),
                &serde_json::to_string(&graph_json(&net, Some(&group))).unwrap(),
            )?;
            Ok(0)
        }
        Command::ExportDot { graph, out } => {
            let (net, _) = load_graph(&graph)?;
            let dot = to_dot(&net);
            match out.as_deref() {
                Some(path) => fs::write(path, &dot)
                    .map_err(|e| Failure::usage(format!("--out {}: {e}", path.display())))?,
                None => print!("{dot}"),
            }
            Ok(0)
        }
    }
}
