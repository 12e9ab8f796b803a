//! The ultrametric ternary relation induced by the valuation, its axiom
//! checks, ball membership, the trace of a ball on a subfield, and
//! nested-ball families around a point outside the subfield.


use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalars::RatFunc;
use crate::search::{refine, Obstruction, SearchError};
use crate::series::{SeriesError, TruncatedSeries, Val, ValBound};
use crate::subfield::{SubfieldDescription, SubfieldError};
use crate::valgroup::{cut_type_lattice, CutType, GroupElement};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CrelError {
    #[error("comparison indeterminate at the available truncation")]
    IndeterminateComparison,
    #[error("membership of the center in the subfield is indeterminate within the budget")]
    IndeterminateCenter,
    #[error("point lies in the subfield; no nested family exists")]
    MemberOfSubfield,
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Subfield(#[from] SubfieldError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

/// Radius of an ultrametric ball; the sentinels give the singleton
/// (+infinity, closed) and the whole field (-infinity).
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum BallRadius {
    Finite(GroupElement),
    PlusInfinity,
    MinusInfinity,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum BallKind {
    Open,
    Closed,
}

/// An ultrametric ball: `{ x : v(x - center) >= radius }` when closed,
/// strict for open.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ball {
    pub center: TruncatedSeries,
    pub radius: BallRadius,
    pub kind: BallKind,
}

impl Ball {
    pub fn closed(center: TruncatedSeries, radius: GroupElement) -> Self {
        Ball {
            center,
            radius: BallRadius::Finite(radius),
            kind: BallKind::Closed,
        }
    }

    pub fn open(center: TruncatedSeries, radius: GroupElement) -> Self {
        Ball {
            center,
            radius: BallRadius::Finite(radius),
            kind: BallKind::Open,
        }
    }

    /// Whether a distance valuation satisfies the radius condition.
    pub fn admits(&self, v: &Val) -> bool {
        match (&self.radius, self.kind) {
            (BallRadius::MinusInfinity, _) => true,
            (BallRadius::PlusInfinity, BallKind::Closed) => v.is_infinite(),
            (BallRadius::PlusInfinity, BallKind::Open) => false,
            (BallRadius::Finite(g), BallKind::Closed) => *v >= Val::Finite(g.clone()),
            (BallRadius::Finite(g), BallKind::Open) => *v > Val::Finite(g.clone()),
        }
    }

    /// Exact membership test; indeterminate when the truncation hides the
    /// decision.
    pub fn contains(&self, x: &TruncatedSeries) -> Result<bool, CrelError> {
        let d = x.sub(&self.center)?;
        match d.val_bound() {
            ValBound::Exact(v) => Ok(self.admits(&v)),
            ValBound::AtLeast(t) => {
                // every valuation >= t is admitted, or none is
                let low = self.admits(&Val::Finite(t));
                let high = self.admits(&Val::Infinite);
                if low == high {
                    Ok(low)
                } else {
                    Err(CrelError::IndeterminateComparison)
                }
            }
        }
    }
}

/// The relation `v(x - y) < v(y - z)`, decided through the truncation
/// windows when possible.
pub fn c_rel(
    x: &TruncatedSeries,
    y: &TruncatedSeries,
    z: &TruncatedSeries,
) -> Result<bool, CrelError> {
    let left = x.sub(y)?.val_bound();
    let right = y.sub(z)?.val_bound();
    match (left, right) {
        (ValBound::Exact(a), ValBound::Exact(b)) => Ok(a < b),
        (ValBound::AtLeast(a), ValBound::Exact(b)) => {
            // v(x-y) >= a; if a > b the strict inequality already fails
            if Val::Finite(a) > b {
                Ok(false)
            } else {
                Err(CrelError::IndeterminateComparison)
            }
        }
        (ValBound::Exact(a), ValBound::AtLeast(b)) => {
            // v(y-z) >= b; if a < b the inequality already holds
            if a < Val::Finite(b) {
                Ok(true)
            } else {
                Err(CrelError::IndeterminateComparison)
            }
        }
        (ValBound::AtLeast(_), ValBound::AtLeast(_)) => Err(CrelError::IndeterminateComparison),
    }
}

/// One axiom violation over a sample, with the witnessing tuple indices.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct AxiomViolation {
    pub axiom: &'static str,
    pub indices: Vec<usize>,
}

/// Report of the axiom check: violations, density witnesses produced, and
/// how many evaluations the truncation could not decide.
#[derive(Clone, Debug, Default, Serialize)]
pub struct AxiomReport {
    pub violations: Vec<AxiomViolation>,
    pub density_witnesses: usize,
    pub indeterminate: usize,
    pub evaluated: usize,
}

impl AxiomReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the four ternary axioms on all triples (quadruples for the
/// branching axiom) of the sample, against an arbitrary relation.
/// `None` from the relation counts as indeterminate, never a violation.
pub fn check_axioms_with<T, R>(sample: &[T], mut rel: R) -> AxiomReport
where
    R: FnMut(&T, &T, &T) -> Option<bool>,
    T: PartialEq,
{
    let n = sample.len();
    let mut report = AxiomReport::default();
    let record = |report: &mut AxiomReport, axiom, indices: Vec<usize>| {
        report.violations.push(AxiomViolation { axiom, indices });
    };
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                report.evaluated += 1;
                let cxyz = rel(&sample[x], &sample[y], &sample[z]);
                let Some(cxyz) = cxyz else {
                    report.indeterminate += 1;
                    continue;
                };
                // C1: C(x,y,z) -> C(x,z,y)
                if cxyz {
                    match rel(&sample[x], &sample[z], &sample[y]) {
                        Some(true) => {}
                        Some(false) => record(&mut report, "C1", vec![x, y, z]),
                        None => report.indeterminate += 1,
                    }
                    // C2: C(x,y,z) -> not C(y,x,z)
                    match rel(&sample[y], &sample[x], &sample[z]) {
                        Some(false) => {}
                        Some(true) => record(&mut report, "C2", vec![x, y, z]),
                        None => report.indeterminate += 1,
                    }
                    // C3: C(x,y,z) -> C(w,y,z) or C(x,w,z)
                    for w in 0..n {
                        match (
                            rel(&sample[w], &sample[y], &sample[z]),
                            rel(&sample[x], &sample[w], &sample[z]),
                        ) {
                            (Some(false), Some(false)) => {
                                record(&mut report, "C3", vec![x, y, z, w])
                            }
                            (None, _) | (_, None) => report.indeterminate += 1,
                            _ => {}
                        }
                    }
                }
                // C4: x != y -> C(x,y,y)
                if y == z && sample[x] != sample[y] {
                    match rel(&sample[x], &sample[y], &sample[y]) {
                        Some(true) => {}
                        Some(false) => record(&mut report, "C4", vec![x, y]),
                        None => report.indeterminate += 1,
                    }
                }
            }
        }
    }
    report
}

/// Checks the axioms for the valuation-induced relation and produces a
/// density witness `z = y + (small perturbation)` for every pair `x != y`.
pub fn check_c_axioms(sample: &[TruncatedSeries]) -> AxiomReport {
    let mut report = check_axioms_with(sample, |x, y, z| c_rel(x, y, z).ok());
    // (D): for x != y exhibit z != y with C(x, y, z)
    for (xi, x) in sample.iter().enumerate() {
        for (yi, y) in sample.iter().enumerate() {
            if xi == yi {
                continue;
            }
            let d = match x.sub(y) {
                Ok(d) => d,
                Err(_) => continue,
            };
            if d.is_exact_zero() {
                continue;
            }
            let Ok(gamma) = d.val() else {
                report.indeterminate += 1;
                continue;
            };
            // bump the least significant coordinate to go strictly above
            let mut bump = GroupElement::zero(gamma.rank());
            if gamma.rank() > 0 {
                bump = GroupElement::axis(
                    gamma.rank(),
                    gamma.rank(),
                    crate::scalars::Rat::one(),
                );
            }
            let z = match y.add(&TruncatedSeries::monomial(&gamma + &bump, RatFunc::one())) {
                Ok(z) => z,
                Err(_) => continue,
            };
            match c_rel(x, y, &z) {
                Ok(true) => report.density_witnesses += 1,
                Ok(false) => report.violations.push(AxiomViolation {
                    axiom: "D",
                    indices: vec![xi, yi],
                }),
                Err(_) => report.indeterminate += 1,
            }
        }
    }
    report
}

/// Trace of a ball on a subfield: empty, everything, one point, a ball
/// with subfield-representable radius, or a certified failure of
/// definability.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind")]
pub enum TraceResult {
    Empty,
    All,
    Point(TruncatedSeries),
    TraceBall(Ball),
    NotDefinable(CutType),
}

impl TraceResult {
    /// Membership of a subfield point in the traced set.
    pub fn contains(&self, x: &TruncatedSeries) -> Result<Option<bool>, CrelError> {
        Ok(match self {
            TraceResult::Empty => Some(false),
            TraceResult::All => Some(true),
            TraceResult::Point(c) => {
                let d = x.sub(c)?;
                if d.is_exact_zero() {
                    Some(true)
                } else if d.is_indeterminate_zero() {
                    None
                } else {
                    Some(false)
                }
            }
            TraceResult::TraceBall(b) => Some(b.contains(x)?),
            TraceResult::NotDefinable(_) => None,
        })
    }
}

/// Computes the trace `B` on the subfield by recentering at a subfield
/// approximation of the center and classifying the radius cut over the
/// representable value group.
///
/// The center search refines greedily until it lands in the ball or
/// certifiably stalls below it; an uncertified stop is an error rather
/// than a guess.
pub fn trace_ball(
    b: &Ball,
    k: &SubfieldDescription,
    budget: usize,
) -> Result<TraceResult, CrelError> {
    if b.center.rank() != k.rank() {
        return Err(CrelError::RankMismatch(b.center.rank(), k.rank()));
    }
    // whole-field and empty sentinels first
    match (&b.radius, b.kind) {
        (BallRadius::MinusInfinity, _) => return Ok(TraceResult::All),
        (BallRadius::PlusInfinity, BallKind::Open) => return Ok(TraceResult::Empty),
        _ => {}
    }

    // find a subfield point inside the ball, or certify there is none
    let ys = [TruncatedSeries::one(k.rank())];
    let mut center = None;
    let mut certified_empty = false;
    let mut d = b.center.clone();
    let mut approx = TruncatedSeries::zero(k.rank());
    for _ in 0..budget.max(1) {
        let reached = match d.val_bound() {
            ValBound::Exact(v) => b.admits(&v),
            ValBound::AtLeast(t) => {
                // all possible valuations agree, or the window hides it
                let low = b.admits(&Val::Finite(t));
                if low == b.admits(&Val::Infinite) {
                    low
                } else {
                    return Err(CrelError::IndeterminateCenter);
                }
            }
        };
        if reached {
            center = Some(approx.clone());
            break;
        }
        let step = refine(&d, &ys, k, 1)?;
        match step.stall {
            Some(_) => {
                // no single step reaches further: the achieved distance
                // is maximal and the ball misses the subfield
                certified_empty = true;
                break;
            }
            None => {
                approx = approx.add(&step.e[0].neg())?;
                d = step.d;
            }
        }
    }
    let Some(center) = center else {
        if certified_empty {
            return Ok(TraceResult::Empty);
        }
        return Err(CrelError::IndeterminateCenter);
    };

    let radius = match &b.radius {
        BallRadius::Finite(g) => g.clone(),
        BallRadius::PlusInfinity => return Ok(TraceResult::Point(center)),
        BallRadius::MinusInfinity => unreachable!("handled above"),
    };
    let cut = cut_type_lattice(
        &radius,
        k.value_coords(),
        Some(&k.policy().denominator_lcm()),
    )
    .map_err(|_| CrelError::RankMismatch(radius.rank(), k.rank()))?;
    Ok(match cut {
        CutType::InGroup => TraceResult::TraceBall(Ball {
            center,
            radius: BallRadius::Finite(radius),
            kind: b.kind,
        }),
        CutType::PlusOf { below } => TraceResult::TraceBall(Ball::open(center, below)),
        CutType::MinusOf { above } => TraceResult::TraceBall(Ball::closed(center, above)),
        CutType::BelowAll => TraceResult::All,
        CutType::AboveAll => TraceResult::Point(center),
        c @ CutType::NonDefinableCut { .. } => TraceResult::NotDefinable(c),
    })
}

/// Why the nested family stopped growing.
#[derive(Clone, Debug, Serialize)]
pub enum FamilyOutcome {
    /// The distance chain stalled at a certified maximum: the point is
    /// not a limit point of the subfield.
    Stalled {
        at: GroupElement,
        obstruction: Obstruction,
    },
    /// The budget ran out while the chain was still growing: limit-point
    /// evidence.
    BudgetExhausted,
    /// The truncation window ended while the chain was still growing.
    TruncationHorizon,
}

/// A strictly shrinking family of subfield ball data around a point:
/// pairs `(y, z)` with `v(a - y) >= v(z)` and `v(z)` strictly increasing.
#[derive(Clone, Debug)]
pub struct NestedFamily {
    pub pairs: Vec<(TruncatedSeries, TruncatedSeries)>,
    pub outcome: FamilyOutcome,
}

/// Builds the nested family witnessing that `a` sits inside a strictly
/// shrinking chain of subfield balls, by the greedy distance chain.
/// Refuses when `a` is reached exactly (a subfield member).
pub fn limit_nested_family(
    a: &TruncatedSeries,
    k: &SubfieldDescription,
    budget: usize,
) -> Result<NestedFamily, CrelError> {
    let ys = [TruncatedSeries::one(a.rank())];
    let r = refine(a, &ys, k, budget)?;
    if r.reached_zero() {
        return Err(CrelError::MemberOfSubfield);
    }
    let mut pairs = Vec::new();
    for (gamma, e) in &r.chain {
        if !k.value_representable(gamma) {
            break;
        }
        let y = e[0].neg();
        let z = k.monomial(gamma)?;
        pairs.push((y, z));
    }
    let outcome = match r.stall {
        Some(obstruction) => FamilyOutcome::Stalled {
            at: r.chain.last().expect("stall after a step").0.clone(),
            obstruction,
        },
        None if r.horizon() => FamilyOutcome::TruncationHorizon,
        None => FamilyOutcome::BudgetExhausted,
    };
    Ok(NestedFamily { pairs, outcome })
}
