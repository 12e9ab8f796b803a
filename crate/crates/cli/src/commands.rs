//! One runner per subcommand: payload in, report value and exit code out.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use valfield::{
    build_scenario, check_c_axioms, claim1_cofinality, claim2_subsets, classify_last,
    classify_point, in_search, is_separated, limit_nested_family, ms_condition4, ms_contiguity,
    separated_basis, sepquotient_transfer, trace_ball, trace_inequality, ConvexSubgroup,
    CoordSubgroup, CrelError, GroupElement, Rat, RatFunc, SearchOutcome, SepError,
    SeparatedBasisOutcome, TruncatedSeries, TypeVerdict, Val,
};

use crate::scenario::*;
use crate::CliError;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INDETERMINATE: i32 = 2;

pub struct Ctx {
    pub budgets: Budgets,
    pub rng: ChaCha8Rng,
}

fn payload<T: serde::de::DeserializeOwned>(v: Value) -> Result<T, CliError> {
    serde_json::from_value(v).map_err(|e| CliError::Scenario(format!("payload: {e}")))
}

/// Small random series over random rational-function coefficients, used
/// by the axiom pool.
fn random_series(rng: &mut ChaCha8Rng, rank: usize, max_terms: usize) -> TruncatedSeries {
    let n = rng.random_range(0..=max_terms);
    let mut s = TruncatedSeries::zero(rank);
    for _ in 0..n {
        let coords: Vec<Rat> = (0..rank)
            .map(|_| Rat::new(rng.random_range(-6..=6), rng.random_range(1..=2)))
            .collect();
        let coef = match rng.random_range(0..3) {
            0 => RatFunc::from_int(rng.random_range(1..=4)),
            1 => RatFunc::from_int(-rng.random_range(1..=4)),
            _ => RatFunc::var(rng.random_range(1..=2)),
        };
        let term = TruncatedSeries::monomial(GroupElement::new(coords), coef);
        s = s.add(&term).expect("equal ranks");
    }
    s
}

pub fn run_c_axioms(p: Value, ctx: &mut Ctx) -> Result<(Value, i32), CliError> {
    let p: CAxiomsPayload = payload(p)?;
    let mut pool = p.samples;
    if let Some(r) = &p.random {
        for _ in 0..r.count {
            pool.push(random_series(&mut ctx.rng, r.rank, r.max_terms));
        }
    }
    if pool.is_empty() {
        return Err(CliError::Scenario("empty sample pool".into()));
    }
    let report = check_c_axioms(&pool);
    let code = if !report.ok() {
        EXIT_VIOLATION
    } else if report.indeterminate > 0 {
        EXIT_INDETERMINATE
    } else {
        EXIT_PASS
    };
    Ok((
        json!({
            "poolSize": pool.len(),
            "evaluated": report.evaluated,
            "violations": report.violations,
            "densityWitnesses": report.density_witnesses,
            "indeterminate": report.indeterminate,
        }),
        code,
    ))
}

pub fn run_doag(p: Value, ctx: &mut Ctx) -> Result<(Value, i32), CliError> {
    let p: DoagPayload = payload(p)?;
    let g = CoordSubgroup::new(p.r, p.s.iter().copied())
        .map_err(|e| CliError::Scenario(e.to_string()))?;
    let contiguity = ms_contiguity(&g);
    let condition4 = ms_condition4(&g, ctx.budgets.samples as u32, &mut ctx.rng);
    let agree = contiguity.holds == condition4.holds;
    Ok((
        json!({
            "r": p.r,
            "s": p.s,
            "msContiguity": contiguity.holds,
            "witnesses": contiguity.witnesses.map(|(c2, c1)| json!({
                "c2Index": c2.index(),
                "c1Index": c1.index(),
            })),
            "msCondition4": condition4.holds,
            "counterexamplePattern": condition4.counterexample_pattern,
            "counterexampleWitness": condition4.witness,
            "confirmations": condition4.confirmations,
            "agree": agree,
        }),
        if agree { EXIT_PASS } else { EXIT_VIOLATION },
    ))
}

pub fn run_trace(p: Value, ctx: &mut Ctx) -> Result<(Value, i32), CliError> {
    let p: TracePayload = payload(p)?;
    let mut entries = Vec::new();
    let mut indeterminate = 0;
    for ball in &p.balls {
        let entry = match trace_ball(ball, &p.k, ctx.budgets.rounds) {
            Ok(trace) => json!({ "ball": ball, "trace": trace }),
            Err(CrelError::IndeterminateCenter) => {
                indeterminate += 1;
                json!({ "ball": ball, "error": "indeterminate-center" })
            }
            Err(e) => return Err(CliError::Scenario(e.to_string())),
        };
        entries.push(entry);
    }
    let code = if indeterminate > 0 {
        EXIT_INDETERMINATE
    } else {
        EXIT_PASS
    };
    Ok((
        json!({
            "subfield": p.k.name(),
            "balls": entries.len(),
            "indeterminate": indeterminate,
            "traces": entries,
        }),
        code,
    ))
}

fn val_json(v: &Val) -> Value {
    match v {
        Val::Finite(g) => json!(g),
        Val::Infinite => json!("inf"),
    }
}

fn verdict_json(v: &TypeVerdict) -> Value {
    match v {
        TypeVerdict::Realized { witness } => json!({
            "category": "realized",
            "witness": witness,
        }),
        TypeVerdict::Residual { k1, k2, residue } => json!({
            "category": "residual",
            "k1": k1,
            "k2": k2,
            "residue": residue.to_string(),
        }),
        TypeVerdict::Valuational { gamma, cut } => json!({
            "category": "valuational",
            "gamma": gamma,
            "cut": cut,
        }),
        TypeVerdict::LimitEvidence { chain } => json!({
            "category": "limit",
            "chainLength": chain.len(),
            "chain": chain.entries().iter().map(|(k, g)| json!({
                "witness": k,
                "gamma": g,
            })).collect::<Vec<_>>(),
        }),
        TypeVerdict::Exhausted => json!({ "category": "exhausted" }),
    }
}

pub fn run_classify(p: Value, ctx: &mut Ctx) -> Result<(Value, i32), CliError> {
    let p: ClassifyPayload = payload(p)?;
    let mut verdicts = Vec::new();
    let mut exhausted = 0;
    for target in &p.targets {
        let v = classify_point(target, &p.k, ctx.budgets.rounds)
            .map_err(|e| CliError::Scenario(e.to_string()))?;
        if matches!(v, TypeVerdict::Exhausted) {
            exhausted += 1;
        }
        // nested-family evidence accompanies limit verdicts
        let family = match &v {
            TypeVerdict::LimitEvidence { .. } => {
                match limit_nested_family(target, &p.k, ctx.budgets.rounds) {
                    Ok(f) => Some(json!({
                        "pairs": f.pairs.iter().map(|(y, z)| json!({
                            "y": y,
                            "z": z,
                        })).collect::<Vec<_>>(),
                        "outcome": format!("{:?}", f.outcome),
                    })),
                    Err(_) => None,
                }
            }
            _ => None,
        };
        verdicts.push(json!({
            "target": target,
            "verdict": verdict_json(&v),
            "nestedFamily": family,
        }));
    }
    let code = if exhausted > 0 {
        EXIT_INDETERMINATE
    } else {
        EXIT_PASS
    };
    Ok((
        json!({
            "subfield": p.k.name(),
            "targets": verdicts.len(),
            "exhausted": exhausted,
            "verdicts": verdicts,
        }),
        code,
    ))
}

pub fn run_separated(p: Value, ctx: &mut Ctx) -> Result<(Value, i32), CliError> {
    let p: SeparatedPayload = payload(p)?;
    let mut entries = Vec::new();
    let mut mismatches = 0;
    let mut indeterminate = 0;
    for (i, family) in p.families.iter().enumerate() {
        let check = match is_separated(family, &p.k, ctx.budgets.samples, &mut ctx.rng) {
            Ok(c) => c,
            Err(SepError::TruncationTooCoarse) => {
                indeterminate += 1;
                entries.push(json!({ "family": i, "error": "truncation-too-coarse" }));
                continue;
            }
            Err(e) => return Err(CliError::Scenario(e.to_string())),
        };
        let basis = match separated_basis(family, &p.k, ctx.budgets.rounds) {
            Ok(SeparatedBasisOutcome::Basis(b)) => json!({ "basis": b }),
            Ok(SeparatedBasisOutcome::FailureChain(c)) => json!({ "failureChain": c }),
            Err(SepError::TruncationTooCoarse) => {
                indeterminate += 1;
                json!({ "error": "truncation-too-coarse" })
            }
            Err(e) => return Err(CliError::Scenario(e.to_string())),
        };
        if let Some(expect) = &p.expect_separated {
            if expect.get(i).copied() == Some(!check.separated) {
                mismatches += 1;
            }
        }
        // optional coarsening transfer on separated families
        let transfer = match (p.transfer_level, check.separated) {
            (Some(level), true) => {
                let c = ConvexSubgroup::new(p.k.rank(), level)
                    .map_err(|e| CliError::Scenario(e.to_string()))?;
                match sepquotient_transfer(family, &p.k, &c, ctx.budgets.samples, &mut ctx.rng) {
                    Ok(t) => Some(json!({
                        "coarseViolations": t.coarse_violations,
                        "coarseSampled": t.coarse_sampled,
                        "groups": t.groups.iter().map(|g| json!({
                            "wvalue": g.wvalue,
                            "members": g.members,
                            "quotientSeparated": g.quotient_separated,
                        })).collect::<Vec<_>>(),
                        "liftingSeparated": t.lifting_separated,
                    })),
                    Err(e) => Some(json!({ "error": e.to_string() })),
                }
            }
            _ => None,
        };
        if let Some(t) = &transfer {
            let bad = t.get("coarseViolations").and_then(Value::as_u64) != Some(0)
                || t.get("liftingSeparated").and_then(Value::as_bool) != Some(true);
            if t.get("error").is_none() && bad {
                mismatches += 1;
            }
        }
        entries.push(json!({
            "family": i,
            "separated": check.separated,
            "sampled": check.sampled,
            "violation": check.violation.map(|v| json!({
                "coeffs": v.coeffs,
                "expectedMin": val_json(&v.expected_min),
            })),
            "elimination": basis,
            "transfer": transfer,
        }));
    }
    let code = if mismatches > 0 {
        EXIT_VIOLATION
    } else if indeterminate > 0 {
        EXIT_INDETERMINATE
    } else {
        EXIT_PASS
    };
    Ok((
        json!({
            "subfield": p.k.name(),
            "families": entries,
            "expectationMismatches": mismatches,
            "indeterminate": indeterminate,
        }),
        code,
    ))
}

pub fn run_in_search(p: Value, ctx: &mut Ctx) -> Result<(Value, i32), CliError> {
    let p: InSearchPayload = payload(p)?;
    let outcome = in_search(&p.x, &p.y, &p.k, ctx.budgets.rounds)
        .map_err(|e| CliError::Scenario(e.to_string()))?;
    let (value, code) = match &outcome {
        SearchOutcome::MaxFound {
            value,
            witness,
            obstruction,
        } => (
            json!({
                "outcome": "max-found",
                "value": val_json(value),
                "witness": witness,
                "obstruction": obstruction,
            }),
            EXIT_PASS,
        ),
        SearchOutcome::NoMaxUpToBound { chain } => (
            json!({
                "outcome": "no-max-up-to-bound",
                "chain": chain.iter().map(|(g, e)| json!({
                    "gamma": g,
                    "witness": e,
                })).collect::<Vec<_>>(),
            }),
            EXIT_PASS,
        ),
        SearchOutcome::Exhausted => (json!({ "outcome": "exhausted" }), EXIT_INDETERMINATE),
    };
    Ok((
        json!({
            "subfield": p.k.name(),
            "targets": p.y.len(),
            "search": value,
        }),
        code,
    ))
}

pub fn run_counterexample(p: Value, ctx: &mut Ctx) -> Result<(Value, i32), CliError> {
    let p: CounterexamplePayload = payload(p)?;
    let scenario = build_scenario(p.n, p.trunc_order, p.schedule.clone())
        .map_err(|e| CliError::Scenario(e.to_string()))?;
    let samples = p.ceiling_samples.unwrap_or(ctx.budgets.samples);
    let claim1 = claim1_cofinality(&scenario, p.depth, samples, &mut ctx.rng)
        .map_err(|e| CliError::Scenario(e.to_string()))?;
    let max_subset = p.max_subset_size.unwrap_or(p.n);
    let claim2 = claim2_subsets(&scenario, max_subset, ctx.budgets.rounds, &mut ctx.rng)
        .map_err(|e| CliError::Scenario(e.to_string()))?;
    let classify = classify_last(&scenario, ctx.budgets.rounds.min(24))
        .map_err(|e| CliError::Scenario(e.to_string()))?;

    let subsets_ok = claim2.all_subsets_separated();
    let chain_ok = !claim2.full_chain.is_empty()
        && claim2.full_chain.windows(2).all(|w| w[0] < w[1]);
    let achieved_ok = claim1.achieved.len() == p.depth as usize;
    let ceiling_ok = claim1.ceiling_violations.is_empty();
    let classify_ok = matches!(
        classify,
        TypeVerdict::LimitEvidence { .. } | TypeVerdict::Exhausted
    );
    let pass = subsets_ok && chain_ok && achieved_ok && ceiling_ok && classify_ok;

    Ok((
        json!({
            "n": p.n,
            "M": p.trunc_order,
            "depth": p.depth,
            "schedule": scenario.schedule,
            "achieved": claim1.achieved,
            "truncationChain": claim1.truncation_chain,
            "ceilingViolations": claim1.ceiling_violations,
            "ceilingSampled": claim1.ceiling_sampled,
            "subsets": claim2.subsets,
            "fullFailureChain": claim2.full_chain,
            "classifyLast": verdict_json(&classify),
            "verdict": {
                "T_up_to_n": if subsets_ok { "pass" } else { "fail" },
                "T_{n+1}": if chain_ok { "fail-evidence" } else { "no-evidence" },
            },
        }),
        if pass { EXIT_PASS } else { EXIT_VIOLATION },
    ))
}

pub fn run_inequality(p: Value, ctx: &mut Ctx) -> Result<(Value, i32), CliError> {
    let p: InequalityPayload = payload(p)?;
    let mut entries = Vec::new();
    let mut violations = 0;
    let mut failures = 0;
    for (i, pair) in p.pairs.iter().enumerate() {
        match trace_inequality(
            &pair.p,
            &pair.q,
            &p.k,
            ctx.budgets.samples,
            p.nvars,
            &mut ctx.rng,
            ctx.budgets.rounds,
        ) {
            Ok(r) => {
                violations += r.min_equality_violations;
                entries.push(json!({ "pair": i, "report": r }));
            }
            Err(SepError::SeparationFailure(chain)) => {
                failures += 1;
                entries.push(json!({ "pair": i, "separationFailure": chain }));
            }
            Err(e) => return Err(CliError::Scenario(e.to_string())),
        }
    }
    let code = if violations > 0 {
        EXIT_VIOLATION
    } else if failures > 0 {
        EXIT_INDETERMINATE
    } else {
        EXIT_PASS
    };
    Ok((
        json!({
            "subfield": p.k.name(),
            "pairs": entries,
            "minEqualityViolations": violations,
            "decompositionFailures": failures,
        }),
        code,
    ))
}

