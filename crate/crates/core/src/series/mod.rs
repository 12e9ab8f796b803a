//! Truncated Hahn series: finite windows of Hahn series over
//! rational-function coefficients with exponents in Q^r lex.
//!
//! A series is known exactly below its truncation exponent and unknown at
//! or above it. Arithmetic propagates truncation by the conservative
//! min-formulas, so a result never claims a term beyond what both inputs
//! justify. The exact zero is the empty series with infinite truncation;
//! an empty series with finite truncation is an honest "nothing visible
//! yet", which several operations must treat differently from zero.

mod newton;

pub use newton::newton_polygon;

use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

use crate::scalars::RatFunc;
use crate::valgroup::{ConvexSubgroup, GroupElement};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("valuation of the exact zero series")]
    ExactZeroValuation,
    #[error("valuation indeterminate: no term below truncation {0}")]
    IndeterminateValuation(GroupElement),
    #[error("inverse of the exact zero series")]
    ExactZero,
    #[error("leading term indeterminate below truncation {0}")]
    IndeterminateLeadingTerm(GroupElement),
    #[error("inverse would need infinitely many terms below the truncation")]
    InversePrecisionUnbounded,
    #[error("residue of a series with valuation {0} != 0")]
    NonUnitValuation(GroupElement),
    #[error("coarse residue indeterminate")]
    IndeterminateResidue,
    #[error("coefficient {index} of the polynomial is indeterminate")]
    IndeterminateCoefficient { index: usize },
    #[error("leading polynomial coefficient is zero")]
    ZeroLeadingCoefficient,
    #[error("term exponent {exp} not below truncation {trunc}")]
    TermBeyondTruncation { exp: GroupElement, trunc: GroupElement },
}

/// Truncation bound: all exponents >= the bound are unknown.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Trunc {
    Finite(GroupElement),
    Infinite,
}

impl Trunc {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Trunc::Infinite)
    }

    /// Whether an exponent lies strictly below the bound.
    pub fn covers(&self, exp: &GroupElement) -> bool {
        match self {
            Trunc::Infinite => true,
            Trunc::Finite(t) => exp < t,
        }
    }

    pub fn min(self, other: Trunc) -> Trunc {
        match (self, other) {
            (Trunc::Infinite, t) | (t, Trunc::Infinite) => t,
            (Trunc::Finite(a), Trunc::Finite(b)) => Trunc::Finite(a.min(b)),
        }
    }

    fn shift(&self, delta: &GroupElement) -> Trunc {
        match self {
            Trunc::Infinite => Trunc::Infinite,
            Trunc::Finite(t) => Trunc::Finite(t + delta),
        }
    }
}

/// Valuation value: a group element or the +infinity of the exact zero.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Val {
    Finite(GroupElement),
    Infinite,
}

impl Val {
    pub fn finite(&self) -> Option<&GroupElement> {
        match self {
            Val::Finite(g) => Some(g),
            Val::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Val::Infinite)
    }

    pub fn add(&self, other: &Val) -> Val {
        match (self, other) {
            (Val::Finite(a), Val::Finite(b)) => Val::Finite(a + b),
            _ => Val::Infinite,
        }
    }
}

impl PartialOrd for Val {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Val {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Val::Infinite, Val::Infinite) => Ordering::Equal,
            (Val::Infinite, Val::Finite(_)) => Ordering::Greater,
            (Val::Finite(_), Val::Infinite) => Ordering::Less,
            (Val::Finite(a), Val::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Finite(g) => write!(f, "{g}"),
            Val::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Val {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Val::Finite(g) => g.serialize(serializer),
            Val::Infinite => "inf".serialize(serializer),
        }
    }
}

/// What is known about a valuation through a truncation window.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ValBound {
    /// The valuation is known exactly.
    Exact(Val),
    /// Nothing visible below the truncation: the valuation is >= it.
    AtLeast(GroupElement),
}

/// A Hahn series known up to a truncation exponent. Stored exponents are
/// strictly increasing and below the truncation; coefficients are nonzero.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TruncatedSeries {
    rank: usize,
    terms: BTreeMap<GroupElement, RatFunc>,
    trunc: Trunc,
}

impl TruncatedSeries {
    /// The exact zero series.
    pub fn zero(rank: usize) -> Self {
        TruncatedSeries {
            rank,
            terms: BTreeMap::new(),
            trunc: Trunc::Infinite,
        }
    }

    pub fn one(rank: usize) -> Self {
        TruncatedSeries::constant(rank, RatFunc::one())
    }

    /// Exact constant series.
    pub fn constant(rank: usize, c: RatFunc) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(GroupElement::zero(rank), c);
        }
        TruncatedSeries {
            rank,
            terms,
            trunc: Trunc::Infinite,
        }
    }

    /// Exact monomial `c * X^exp`.
    pub fn monomial(exp: GroupElement, c: RatFunc) -> Self {
        let rank = exp.rank();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        TruncatedSeries {
            rank,
            terms,
            trunc: Trunc::Infinite,
        }
    }

    /// Builds a series from explicit terms. Zero coefficients are dropped,
    /// duplicate exponents accumulate; a term at or above a finite
    /// truncation is an error.
    pub fn from_terms(
        rank: usize,
        terms: impl IntoIterator<Item = (GroupElement, RatFunc)>,
        trunc: Trunc,
    ) -> Result<Self, SeriesError> {
        let mut out = BTreeMap::new();
        for (exp, coef) in terms {
            if exp.rank() != rank {
                return Err(SeriesError::RankMismatch(exp.rank(), rank));
            }
            if !trunc.covers(&exp) {
                let Trunc::Finite(t) = &trunc else { unreachable!() };
                return Err(SeriesError::TermBeyondTruncation {
                    exp,
                    trunc: t.clone(),
                });
            }
            if coef.is_zero() {
                continue;
            }
            match out.entry(exp) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(coef);
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let sum = e.get().add(&coef);
                    if sum.is_zero() {
                        e.remove();
                    } else {
                        *e.get_mut() = sum;
                    }
                }
            }
        }
        Ok(TruncatedSeries {
            rank,
            terms: out,
            trunc,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn trunc(&self) -> &Trunc {
        &self.trunc
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GroupElement, &RatFunc)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Exact zero: no terms and nothing hidden beyond a truncation.
    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.trunc.is_infinite()
    }

    /// No visible terms but a finite horizon: could be anything >= trunc.
    pub fn is_indeterminate_zero(&self) -> bool {
        self.terms.is_empty() && !self.trunc.is_infinite()
    }

    pub fn leading(&self) -> Option<(&GroupElement, &RatFunc)> {
        self.terms.iter().next()
    }

    /// The coefficient at `exp`, when `exp` is inside the known window.
    pub fn coeff_at(&self, exp: &GroupElement) -> Option<RatFunc> {
        if !self.trunc.covers(exp) {
            return None;
        }
        Some(self.terms.get(exp).cloned().unwrap_or_else(RatFunc::zero))
    }

    /// Valuation as a group element; the exact zero and the empty window
    /// are the two error cases, kept distinct.
    pub fn val(&self) -> Result<GroupElement, SeriesError> {
        match self.leading() {
            Some((exp, _)) => Ok(exp.clone()),
            None => match &self.trunc {
                Trunc::Infinite => Err(SeriesError::ExactZeroValuation),
                Trunc::Finite(t) => Err(SeriesError::IndeterminateValuation(t.clone())),
            },
        }
    }

    /// Valuation with the +infinity sentinel for the exact zero.
    pub fn valuation(&self) -> Result<Val, SeriesError> {
        match self.leading() {
            Some((exp, _)) => Ok(Val::Finite(exp.clone())),
            None => match &self.trunc {
                Trunc::Infinite => Ok(Val::Infinite),
                Trunc::Finite(t) => Err(SeriesError::IndeterminateValuation(t.clone())),
            },
        }
    }

    /// Everything the window reveals about the valuation.
    pub fn val_bound(&self) -> ValBound {
        match self.leading() {
            Some((exp, _)) => ValBound::Exact(Val::Finite(exp.clone())),
            None => match &self.trunc {
                Trunc::Infinite => ValBound::Exact(Val::Infinite),
                Trunc::Finite(t) => ValBound::AtLeast(t.clone()),
            },
        }
    }

    /// Least support exponent, or the truncation when the support is
    /// empty. This is the bound entering the product truncation formula.
    fn lower_bound(&self) -> Trunc {
        match self.leading() {
            Some((exp, _)) => Trunc::Finite(exp.clone()),
            None => self.trunc.clone(),
        }
    }

    fn check_rank(&self, other: &TruncatedSeries) -> Result<(), SeriesError> {
        if self.rank != other.rank {
            return Err(SeriesError::RankMismatch(self.rank, other.rank));
        }
        Ok(())
    }

    fn clipped(rank: usize, terms: BTreeMap<GroupElement, RatFunc>, trunc: Trunc) -> Self {
        let terms = terms
            .into_iter()
            .filter(|(e, c)| trunc.covers(e) && !c.is_zero())
            .collect();
        TruncatedSeries { rank, terms, trunc }
    }

    /// Sum; the result is known below the coarser of the two windows.
    pub fn add(&self, other: &TruncatedSeries) -> Result<TruncatedSeries, SeriesError> {
        self.check_rank(other)?;
        let trunc = self.trunc.clone().min(other.trunc.clone());
        let mut terms = self.terms.clone();
        for (exp, coef) in &other.terms {
            match terms.entry(exp.clone()) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(coef.clone());
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let sum = e.get().add(coef);
                    if sum.is_zero() {
                        e.remove();
                    } else {
                        *e.get_mut() = sum;
                    }
                }
            }
        }
        Ok(TruncatedSeries::clipped(self.rank, terms, trunc))
    }

    pub fn neg(&self) -> TruncatedSeries {
        TruncatedSeries {
            rank: self.rank,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
            trunc: self.trunc.clone(),
        }
    }

    pub fn sub(&self, other: &TruncatedSeries) -> Result<TruncatedSeries, SeriesError> {
        self.add(&other.neg())
    }

    /// Product. The window is the min of `trunc_a + lb(b)`, `trunc_b +
    /// lb(a)` and `trunc_a + trunc_b`, where `lb` is the least support
    /// exponent or the truncation for an empty support.
    pub fn mul(&self, other: &TruncatedSeries) -> Result<TruncatedSeries, SeriesError> {
        self.check_rank(other)?;
        let t1 = match (&self.trunc, other.lower_bound()) {
            (Trunc::Finite(t), Trunc::Finite(lb)) => Trunc::Finite(t + &lb),
            _ => Trunc::Infinite,
        };
        let t2 = match (&other.trunc, self.lower_bound()) {
            (Trunc::Finite(t), Trunc::Finite(lb)) => Trunc::Finite(t + &lb),
            _ => Trunc::Infinite,
        };
        let t3 = match (&self.trunc, &other.trunc) {
            (Trunc::Finite(a), Trunc::Finite(b)) => Trunc::Finite(a + b),
            _ => Trunc::Infinite,
        };
        let trunc = t1.min(t2).min(t3);
        let mut terms: BTreeMap<GroupElement, RatFunc> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exp = ea + eb;
                if !trunc.covers(&exp) {
                    continue;
                }
                let prod = ca.mul(cb);
                match terms.entry(exp) {
                    std::collections::btree_map::Entry::Vacant(e) => {
                        if !prod.is_zero() {
                            e.insert(prod);
                        }
                    }
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        let sum = e.get().add(&prod);
                        if sum.is_zero() {
                            e.remove();
                        } else {
                            *e.get_mut() = sum;
                        }
                    }
                }
            }
        }
        Ok(TruncatedSeries {
            rank: self.rank,
            terms,
            trunc,
        })
    }

    pub fn scale(&self, c: &RatFunc) -> TruncatedSeries {
        if c.is_zero() {
            // Scaling by exact zero erases the unknown tail too.
            return TruncatedSeries {
                rank: self.rank,
                terms: BTreeMap::new(),
                trunc: self.trunc.clone(),
            };
        }
        TruncatedSeries {
            rank: self.rank,
            terms: self
                .terms
                .iter()
                .map(|(e, v)| (e.clone(), v.mul(c)))
                .collect(),
            trunc: self.trunc.clone(),
        }
    }

    /// Multiplication by an exact monomial shifts exponents and window.
    pub fn shift(&self, delta: &GroupElement) -> TruncatedSeries {
        assert_eq!(self.rank, delta.rank(), "rank mismatch");
        TruncatedSeries {
            rank: self.rank,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e + delta, c.clone()))
                .collect(),
            trunc: self.trunc.shift(delta),
        }
    }

    /// Restricts the window to exponents below `t`.
    pub fn truncate(&self, t: GroupElement) -> TruncatedSeries {
        let trunc = self.trunc.clone().min(Trunc::Finite(t));
        TruncatedSeries::clipped(self.rank, self.terms.clone(), trunc)
    }

    /// Multiplicative inverse via geometric expansion of the unit part.
    /// The result is known below `trunc - 2*val`. Exact inputs invert
    /// exactly only when they are monomials; otherwise the inverse has
    /// infinite support and a prior `truncate` is required.
    pub fn inv(&self) -> Result<TruncatedSeries, SeriesError> {
        let (mu, lead) = match self.leading() {
            Some((e, c)) => (e.clone(), c.clone()),
            None => {
                return Err(match &self.trunc {
                    Trunc::Infinite => SeriesError::ExactZero,
                    Trunc::Finite(t) => SeriesError::IndeterminateLeadingTerm(t.clone()),
                })
            }
        };
        let lead_inv = lead.recip().expect("nonzero leading coefficient");
        if self.terms.len() == 1 {
            let mut out = TruncatedSeries::monomial(-&mu, lead_inv);
            if let Trunc::Finite(t) = &self.trunc {
                // window (t - mu) - mu around the inverse
                let bound = &(t - &mu) - &mu;
                out = out.truncate(bound);
            }
            return Ok(out);
        }
        let t = match &self.trunc {
            Trunc::Infinite => return Err(SeriesError::InversePrecisionUnbounded),
            Trunc::Finite(t) => t.clone(),
        };
        // u = self * lead^{-1} X^{-mu} = 1 - h with val(h) > 0, known below t - mu.
        let unit = self.scale(&lead_inv).shift(&-&mu);
        let h = TruncatedSeries::one(self.rank).sub(&unit)?;
        let window = &t - &mu;
        // The expansion terminates only if multiples of val(h) reach the window.
        if let Some((hv, _)) = h.leading() {
            let hv_lead = hv.leading_index().expect("positive valuation");
            let w_lead = window.leading_index().unwrap_or(self.rank + 1);
            if hv_lead > w_lead {
                return Err(SeriesError::InversePrecisionUnbounded);
            }
        }
        let mut acc = TruncatedSeries::one(self.rank).truncate(window.clone());
        let mut pow = h.truncate(window.clone());
        while !pow.terms.is_empty() {
            acc = acc.add(&pow)?;
            pow = pow.mul(&h)?.truncate(window.clone());
        }
        Ok(acc.shift(&-&mu).scale(&lead_inv))
    }

    /// Residue: the coefficient at exponent zero of a valuation-zero series.
    pub fn residue(&self) -> Result<RatFunc, SeriesError> {
        let v = self.val()?;
        if !v.is_zero() {
            return Err(SeriesError::NonUnitValuation(v));
        }
        Ok(self.leading().expect("nonzero").1.clone())
    }

    /// Decomposes along the coarsening by a convex subgroup: the coarse
    /// valuation (first `j` coordinates of the valuation) and the coarse
    /// residue (the slice of terms at that coarse level, with suffix
    /// exponents). The slice is fully known when the truncation's prefix
    /// exceeds the coarse valuation, and known below the truncation's
    /// suffix when they are equal.
    pub fn coarsen(&self, c: &ConvexSubgroup) -> Result<CoarsePair, SeriesError> {
        assert_eq!(self.rank, c.rank(), "rank mismatch");
        let j = c.index();
        let v = match self.val() {
            Ok(v) => v,
            Err(SeriesError::IndeterminateValuation(_)) => {
                return Err(SeriesError::IndeterminateResidue)
            }
            Err(e) => return Err(e),
        };
        let wvalue = v.prefix(j);
        let suffix_trunc = match &self.trunc {
            Trunc::Infinite => Trunc::Infinite,
            Trunc::Finite(t) => match t.prefix(j).cmp(&wvalue) {
                Ordering::Greater => Trunc::Infinite,
                Ordering::Equal => Trunc::Finite(t.suffix(j)),
                Ordering::Less => unreachable!("valuation below truncation"),
            },
        };
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e.prefix(j) == wvalue)
            .map(|(e, c)| (e.suffix(j), c.clone()));
        let wresidue = TruncatedSeries::from_terms(self.rank - j, terms, suffix_trunc)?;
        Ok(CoarsePair { wvalue, wresidue })
    }

    /// Embeds a rank-`(r-j)` series as a rank-`r` series at coarse level
    /// `prefix` (the inverse direction of `coarsen` on a single slice).
    pub fn lift_prefix(&self, prefix: &GroupElement) -> TruncatedSeries {
        let rank = prefix.rank() + self.rank;
        let terms: BTreeMap<GroupElement, RatFunc> = self
            .terms
            .iter()
            .map(|(e, c)| (prefix.concat(e), c.clone()))
            .collect();
        let trunc = match &self.trunc {
            Trunc::Infinite => Trunc::Infinite,
            Trunc::Finite(t) => Trunc::Finite(prefix.concat(t)),
        };
        TruncatedSeries { rank, terms, trunc }
    }
}

/// The data of a series under a coarsened valuation: coarse value and
/// coarse residue.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CoarsePair {
    pub wvalue: GroupElement,
    pub wresidue: TruncatedSeries,
}

/// Convenience spellings matching the operation names used elsewhere.
pub fn series_add(a: &TruncatedSeries, b: &TruncatedSeries) -> Result<TruncatedSeries, SeriesError> {
    a.add(b)
}

pub fn series_mul(a: &TruncatedSeries, b: &TruncatedSeries) -> Result<TruncatedSeries, SeriesError> {
    a.mul(b)
}

pub fn series_inv(a: &TruncatedSeries) -> Result<TruncatedSeries, SeriesError> {
    a.inv()
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        } else {
            let mut first = true;
            for (e, c) in &self.terms {
                if !first {
                    write!(f, " + ")?;
                }
                first = false;
                write!(f, "({c})*X^{e}")?;
            }
        }
        match &self.trunc {
            Trunc::Infinite => Ok(()),
            Trunc::Finite(t) => write!(f, " + O(X^{t})"),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeriesRepr {
    rank: usize,
    trunc: TruncRepr,
    terms: Vec<TermRepr>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermRepr {
    exp: GroupElement,
    coef: String,
}

/// The `[..] | "inf"` truncation encoding.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum TruncRepr {
    Inf(String),
    Finite(GroupElement),
}

impl Serialize for TruncatedSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let repr = SeriesRepr {
            rank: self.rank,
            trunc: match &self.trunc {
                Trunc::Infinite => TruncRepr::Inf("inf".to_string()),
                Trunc::Finite(t) => TruncRepr::Finite(t.clone()),
            },
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermRepr {
                    exp: e.clone(),
                    coef: c.to_string(),
                })
                .collect(),
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TruncatedSeries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = SeriesRepr::deserialize(deserializer)?;
        let trunc = match repr.trunc {
            TruncRepr::Inf(s) if s == "inf" => Trunc::Infinite,
            TruncRepr::Inf(s) => {
                return Err(D::Error::custom(format!("invalid truncation `{s}`")))
            }
            TruncRepr::Finite(g) => Trunc::Finite(g),
        };
        let terms = repr
            .terms
            .into_iter()
            .map(|t| {
                RatFunc::from_str(&t.coef)
                    .map(|c| (t.exp, c))
                    .map_err(|e| D::Error::custom(e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        TruncatedSeries::from_terms(repr.rank, terms, trunc)
            .map_err(|e| D::Error::custom(e.to_string()))
    }
}
