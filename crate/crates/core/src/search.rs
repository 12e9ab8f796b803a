//! Extremum searches over witness-enumerable coefficients: the greedy
//! leading-term cancellation engine, searches for maximal achievable
//! valuations, pseudo-Cauchy sequences, and 1-type classification.
//!
//! The searches are semi-decidable at this scale. A maximum is only
//! reported with a certificate that no single-step refinement improves it
//! (a value-group or residue obstruction); otherwise the honest verdict
//! is the increasing chain seen so far, or an explicit "exhausted".

use serde::Serialize;
use thiserror::Error;

use crate::scalars::{solve_over_subfield, RatFunc};
use crate::series::{SeriesError, TruncatedSeries, Val};
use crate::subfield::{SubfieldDescription, SubfieldError};
use crate::valgroup::{cut_type_lattice, CutType, GroupElement};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("comparison indeterminate at the available truncation")]
    IndeterminateComparison,
    #[error("a pseudo-Cauchy sequence needs at least two entries")]
    PCSequenceTooShort,
    #[error("input sequence fails the pseudo-Cauchy check")]
    InvalidPCSequence,
    #[error("input valuation indeterminate at the available truncation")]
    IndeterminateInput,
    #[error(transparent)]
    Subfield(#[from] SubfieldError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Why the greedy step could not cancel the current leading term. Either
/// obstruction certifies that no single-step refinement improves the
/// achieved valuation.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
#[serde(tag = "kind")]
pub enum Obstruction {
    /// The required coefficient valuation is outside the representable
    /// value group.
    ValueGap { gamma: GroupElement },
    /// The leading coefficient is not a residue-field combination of the
    /// targets' leading coefficients.
    ResidueGap {
        gamma: GroupElement,
        #[serde(serialize_with = "crate::search::serialize_ratfunc")]
        coefficient: RatFunc,
    },
}

pub(crate) fn serialize_ratfunc<S: serde::Serializer>(
    r: &RatFunc,
    s: S,
) -> Result<S::Ok, S::Error> {
    r.to_string().serialize(s)
}

/// Outcome of a search for the maximal element of the achievable
/// valuation set.
#[derive(Clone, Debug)]
pub enum SearchOutcome {
    /// A maximum with its witness tuple and, for finite values, the
    /// obstruction certifying one-step optimality.
    MaxFound {
        value: Val,
        witness: Vec<TruncatedSeries>,
        obstruction: Option<Obstruction>,
    },
    /// Budget ran out while the achieved valuations were still climbing.
    NoMaxUpToBound {
        chain: Vec<(GroupElement, Vec<TruncatedSeries>)>,
    },
    /// The truncation horizon hides everything beyond this point.
    Exhausted,
}

/// A pseudo-Cauchy sequence candidate: entries `(k_a, gamma_a)`.
#[derive(Clone, Debug, Default)]
pub struct PCSequence {
    entries: Vec<(TruncatedSeries, GroupElement)>,
}

impl PCSequence {
    pub fn from_entries(entries: Vec<(TruncatedSeries, GroupElement)>) -> Self {
        PCSequence { entries }
    }

    pub fn entries(&self) -> &[(TruncatedSeries, GroupElement)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub enum PcViolation {
    /// gamma fails to increase strictly at this index.
    NotIncreasing { index: usize },
    /// v(k_alpha - k_beta) != gamma_alpha.
    GapMismatch {
        alpha: usize,
        beta: usize,
        found: Val,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct PcCheckReport {
    pub ok: bool,
    pub violation: Option<PcViolation>,
}

/// Verifies the defining equality `v(k_a - k_b) = gamma_a` on all stored
/// pairs, and that the gammas strictly increase.
pub fn pc_check(s: &PCSequence) -> Result<PcCheckReport, SearchError> {
    if s.entries.len() < 2 {
        return Err(SearchError::PCSequenceTooShort);
    }
    for i in 0..s.entries.len() - 1 {
        if s.entries[i + 1].1 <= s.entries[i].1 {
            return Ok(PcCheckReport {
                ok: false,
                violation: Some(PcViolation::NotIncreasing { index: i + 1 }),
            });
        }
    }
    for a in 0..s.entries.len() {
        for b in a + 1..s.entries.len() {
            let d = s.entries[a].0.sub(&s.entries[b].0)?;
            let found = match d.valuation() {
                Ok(v) => v,
                Err(_) => return Err(SearchError::IndeterminateComparison),
            };
            if found != Val::Finite(s.entries[a].1.clone()) {
                return Ok(PcCheckReport {
                    ok: false,
                    violation: Some(PcViolation::GapMismatch { alpha: a, beta: b, found }),
                });
            }
        }
    }
    Ok(PcCheckReport {
        ok: true,
        violation: None,
    })
}

/// Outcome of a bounded pseudo-limit search.
#[derive(Clone, Debug)]
pub enum PseudoLimitOutcome {
    Found(TruncatedSeries),
    NotFoundUpToBudget { tried: usize },
}

/// Searches the witness stream for an element realizing all stored
/// distances. A negative answer is evidence up to the budget, not a
/// proof.
pub fn pseudo_limit_search(
    s: &PCSequence,
    k: &SubfieldDescription,
    budget: usize,
) -> Result<PseudoLimitOutcome, SearchError> {
    if !pc_check(s)?.ok {
        return Err(SearchError::InvalidPCSequence);
    }
    let candidates = k.witnesses(budget);
    let mut tried = 0;
    for cand in &candidates {
        tried += 1;
        let mut all_match = true;
        for (ka, ga) in &s.entries {
            let d = cand.sub(ka)?;
            match d.valuation() {
                Ok(Val::Finite(v)) if &v == ga => {}
                _ => {
                    all_match = false;
                    break;
                }
            }
        }
        if all_match {
            return Ok(PseudoLimitOutcome::Found(cand.clone()));
        }
    }
    Ok(PseudoLimitOutcome::NotFoundUpToBudget { tried })
}

/// Final state of a bounded refinement run.
pub(crate) struct Refinement {
    /// Remaining difference `x + sum e_i y_i`.
    pub d: TruncatedSeries,
    /// Accumulated coefficients.
    pub e: Vec<TruncatedSeries>,
    /// Achieved valuations with coefficient snapshots, strictly
    /// increasing.
    pub chain: Vec<(GroupElement, Vec<TruncatedSeries>)>,
    /// Set when a step certified that no single-step refinement improves.
    pub stall: Option<Obstruction>,
}

impl Refinement {
    pub fn reached_zero(&self) -> bool {
        self.d.is_exact_zero()
    }

    pub fn horizon(&self) -> bool {
        self.d.is_indeterminate_zero()
    }
}

/// Greedy refinement loop: repeatedly cancel the leading term of
/// `x + sum e_i y_i` until it vanishes, stalls, leaves the truncation
/// window, or exhausts the round budget.
pub(crate) fn refine(
    x: &TruncatedSeries,
    ys: &[TruncatedSeries],
    k: &SubfieldDescription,
    rounds: usize,
) -> Result<Refinement, SearchError> {
    let info = target_info(ys)?;
    let mut d = x.clone();
    let mut e: Vec<TruncatedSeries> = ys.iter().map(|_| TruncatedSeries::zero(x.rank())).collect();
    let mut chain = Vec::new();
    let mut stall = None;
    for _ in 0..rounds {
        if d.is_exact_zero() || d.is_indeterminate_zero() {
            break;
        }
        let gamma = d.val().expect("determinate");
        chain.push((gamma, e.clone()));
        match greedy_step(&mut d, &mut e, ys, &info, k)? {
            StepResult::Stalled(o) => {
                stall = Some(o);
                break;
            }
            StepResult::Cancelled => {}
        }
    }
    Ok(Refinement { d, e, chain, stall })
}

/// Per-target data the greedy step needs.
struct TargetInfo {
    val: GroupElement,
    lead: RatFunc,
}

fn target_info(ys: &[TruncatedSeries]) -> Result<Vec<TargetInfo>, SearchError> {
    ys.iter()
        .map(|y| match y.leading() {
            Some((e, c)) => Ok(TargetInfo {
                val: e.clone(),
                lead: c.clone(),
            }),
            None => Err(SearchError::IndeterminateInput),
        })
        .collect()
}

enum StepResult {
    Cancelled,
    Stalled(Obstruction),
}

/// One greedy refinement: cancel the leading term of `d` by adding
/// subfield multiples of the targets, if the value group and residue
/// field allow it. On success `d` and `e` are updated in place and the
/// valuation of `d` strictly increases.
fn greedy_step(
    d: &mut TruncatedSeries,
    e: &mut [TruncatedSeries],
    ys: &[TruncatedSeries],
    info: &[TargetInfo],
    k: &SubfieldDescription,
) -> Result<StepResult, SearchError> {
    let gamma = d.val().expect("caller checked determinacy");
    let lead = d.leading().expect("nonzero").1.clone();
    let mut eligible: Vec<(usize, GroupElement)> = Vec::new();
    for (i, ti) in info.iter().enumerate() {
        let eta = &gamma - &ti.val;
        if k.value_representable(&eta) {
            eligible.push((i, eta));
        }
    }
    if eligible.is_empty() {
        return Ok(StepResult::Stalled(Obstruction::ValueGap { gamma }));
    }
    let basis: Vec<RatFunc> = eligible.iter().map(|(i, _)| info[*i].lead.clone()).collect();
    let rho = match solve_over_subfield(&basis, &lead, k.residue_gens()) {
        Some(r) => r,
        None => {
            return Ok(StepResult::Stalled(Obstruction::ResidueGap {
                gamma,
                coefficient: lead,
            }))
        }
    };
    for ((i, eta), r) in eligible.into_iter().zip(rho) {
        if r.is_zero() {
            continue;
        }
        let delta = k.lift_residue(&r)?.mul(&k.monomial(&eta)?)?.neg();
        *d = d.add(&delta.mul(&ys[i])?)?;
        e[i] = e[i].add(&delta)?;
    }
    debug_assert!(
        d.leading().map(|(v, _)| v > &gamma).unwrap_or(true),
        "greedy step must raise the valuation"
    );
    Ok(StepResult::Cancelled)
}

/// Searches the achievable-valuation set `{ v(x + sum e_i y_i) }` for a
/// maximal element, by witness-stream semantics plus greedy refinement.
///
/// An empty target list is the degenerate distance search: it behaves as
/// the single constant target 1, so the set becomes `{ v(x + e) }`.
pub fn in_search(
    x: &TruncatedSeries,
    ys: &[TruncatedSeries],
    k: &SubfieldDescription,
    rounds: usize,
) -> Result<SearchOutcome, SearchError> {
    let one = [TruncatedSeries::one(x.rank())];
    let ys = if ys.is_empty() { &one[..] } else { ys };
    let r = refine(x, ys, k, rounds)?;
    if r.reached_zero() {
        return Ok(SearchOutcome::MaxFound {
            value: Val::Infinite,
            witness: r.e,
            obstruction: None,
        });
    }
    match r.stall {
        Some(obstruction) => Ok(SearchOutcome::MaxFound {
            value: Val::Finite(r.chain.last().expect("stall after a step").0.clone()),
            witness: r.e,
            obstruction: Some(obstruction),
        }),
        None if r.horizon() => Ok(SearchOutcome::Exhausted),
        None => Ok(SearchOutcome::NoMaxUpToBound { chain: r.chain }),
    }
}

/// Verdict of the 1-type classification of a point over a subfield.
#[derive(Clone, Debug)]
pub enum TypeVerdict {
    /// The point is a subfield element; `witness` realizes it.
    Realized { witness: TruncatedSeries },
    /// A residue-field obstruction: `v(k1*a + k2) = 0` with the residue
    /// outside the declared residue field.
    Residual {
        k1: TruncatedSeries,
        k2: TruncatedSeries,
        residue: RatFunc,
    },
    /// Some achieved distance lies outside the representable value group.
    Valuational { gamma: GroupElement, cut: CutType },
    /// Distances kept climbing inside the value group: evidence for a
    /// limit point, carried by the pseudo-Cauchy chain of approximants.
    LimitEvidence { chain: PCSequence },
    /// Nothing could be certified within the budget or truncation.
    Exhausted,
}

impl TypeVerdict {
    pub fn category(&self) -> &'static str {
        match self {
            TypeVerdict::Realized { .. } => "realized",
            TypeVerdict::Residual { .. } => "residual",
            TypeVerdict::Valuational { .. } => "valuational",
            TypeVerdict::LimitEvidence { .. } => "limit",
            TypeVerdict::Exhausted => "exhausted",
        }
    }
}

/// Minimum chain length before climbing distances count as limit
/// evidence.
const LIMIT_EVIDENCE_FLOOR: usize = 3;

/// Classifies the 1-type of `a` over the subfield by the distance search
/// `{ v(a - k) }`: realized when the distance reaches +infinity, residual
/// or valuational at a certified stall, limit evidence when distances
/// keep climbing.
pub fn classify_point(
    a: &TruncatedSeries,
    k: &SubfieldDescription,
    budget: usize,
) -> Result<TypeVerdict, SearchError> {
    let ys = [TruncatedSeries::one(a.rank())];
    let r = refine(a, &ys, k, budget)?;
    if r.reached_zero() {
        return Ok(TypeVerdict::Realized {
            witness: r.e[0].neg(),
        });
    }
    match r.stall {
        Some(Obstruction::ValueGap { gamma }) => {
            let cut = cut_type_lattice(
                &gamma,
                k.value_coords(),
                Some(&k.policy().denominator_lcm()),
            )
            .expect("matching ranks");
            Ok(TypeVerdict::Valuational { gamma, cut })
        }
        Some(Obstruction::ResidueGap { gamma, coefficient }) => {
            let k1 = k.monomial(&-&gamma)?;
            let approx = r.e[0].neg();
            let k2 = k1.mul(&approx)?.neg();
            Ok(TypeVerdict::Residual {
                k1,
                k2,
                residue: coefficient,
            })
        }
        None if r.chain.len() >= LIMIT_EVIDENCE_FLOOR => Ok(TypeVerdict::LimitEvidence {
            chain: PCSequence::from_entries(
                r.chain
                    .into_iter()
                    .map(|(gamma, e)| (e[0].neg(), gamma))
                    .collect(),
            ),
        }),
        None => Ok(TypeVerdict::Exhausted),
    }
}
