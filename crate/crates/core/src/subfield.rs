//! Finitely generated subfields of the series field, described by named
//! generators plus a witness-enumeration policy, with deterministic
//! enumeration and sampling of their elements.
//!
//! A subfield declares its value group (a coordinate subgroup, possibly
//! trivial) and its residue field (a set of coefficient generators). The
//! witness policy bounds the elements the subfield is willing to exhibit:
//! integer-coefficient polynomial combinations of the generators and of
//! axis monomials with bounded exponent denominators. Searches quantify
//! over these witnesses, so every verdict is relative to the policy.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

use crate::scalars::{Rat, RatFunc};
use crate::series::{SeriesError, TruncatedSeries};
use crate::valgroup::{CoordSubgroup, GroupElement};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SubfieldError {
    #[error("generator `{name}` has valuation {val} outside the declared value group")]
    GeneratorValueOutsideGroup { name: String, val: GroupElement },
    #[error("generator `{name}` has residue outside the declared residue field")]
    ResidueOutsideField { name: String },
    #[error("generator `{name}` has rank {found}, subfield has rank {expected}")]
    GeneratorRankMismatch {
        name: String,
        found: usize,
        expected: usize,
    },
    #[error("value {0} is not in the representable value group of the subfield")]
    ValueNotInVK(GroupElement),
    #[error("no generator carries the residue t{0}")]
    LiftUnavailable(usize),
    #[error("residue {0} uses generators outside the declared residue field")]
    ResidueNotInField(RatFunc),
    #[error("series error: {0}")]
    Series(#[from] SeriesError),
}

/// Bounds on the witnesses a subfield enumerates.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct WitnessPolicy {
    /// Total degree of polynomial combinations of the atoms.
    pub max_degree: u32,
    /// Bound on |integer coefficients| and on monomial exponent numerators.
    pub max_height: u32,
    /// Exponent denominators allowed for axis monomials.
    pub max_exp_denominator: u32,
    /// Number of terms in a combination.
    pub max_terms: u32,
}

impl Default for WitnessPolicy {
    fn default() -> Self {
        WitnessPolicy {
            max_degree: 2,
            max_height: 3,
            max_exp_denominator: 2,
            max_terms: 2,
        }
    }
}

impl WitnessPolicy {
    /// lcm(1..=max_exp_denominator): the effective exponent lattice is
    /// (1/lcm) Z per axis, since products of policy monomials stay there.
    pub fn denominator_lcm(&self) -> BigInt {
        let mut l = BigInt::one();
        for d in 1..=self.max_exp_denominator.max(1) {
            l = l.lcm(&BigInt::from(d));
        }
        l
    }
}

/// A finitely generated subfield K of the series field: named generators,
/// declared value group and residue field, and a witness policy.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "SubfieldRepr", into = "SubfieldRepr")]
pub struct SubfieldDescription {
    name: String,
    rank: usize,
    generators: BTreeMap<String, TruncatedSeries>,
    value_coords: CoordSubgroup,
    residue_gens: BTreeSet<usize>,
    policy: WitnessPolicy,
    /// Generator carrying each declared residue generator, for lifts.
    residue_carriers: BTreeMap<usize, String>,
}

impl SubfieldDescription {
    pub fn new(
        name: impl Into<String>,
        generators: BTreeMap<String, TruncatedSeries>,
        value_coords: CoordSubgroup,
        residue_gens: impl IntoIterator<Item = usize>,
        policy: WitnessPolicy,
    ) -> Result<Self, SubfieldError> {
        let name = name.into();
        let rank = value_coords.rank();
        let residue_gens: BTreeSet<usize> = residue_gens.into_iter().collect();
        let mut residue_carriers = BTreeMap::new();
        for (gname, g) in &generators {
            if g.rank() != rank {
                return Err(SubfieldError::GeneratorRankMismatch {
                    name: gname.clone(),
                    found: g.rank(),
                    expected: rank,
                });
            }
            if let Ok(v) = g.val() {
                if !value_coords.contains(&v) {
                    return Err(SubfieldError::GeneratorValueOutsideGroup {
                        name: gname.clone(),
                        val: v,
                    });
                }
                if v.is_zero() {
                    let r = g.residue().expect("valuation zero");
                    if !r.supported_on(&residue_gens) {
                        return Err(SubfieldError::ResidueOutsideField {
                            name: gname.clone(),
                        });
                    }
                    // remember which generator carries a bare residue var
                    for &i in &residue_gens {
                        if r.equal(&RatFunc::var(i)) {
                            residue_carriers.entry(i).or_insert_with(|| gname.clone());
                        }
                    }
                }
            }
        }
        Ok(SubfieldDescription {
            name,
            rank,
            generators,
            value_coords,
            residue_gens,
            policy,
            residue_carriers,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn generators(&self) -> &BTreeMap<String, TruncatedSeries> {
        &self.generators
    }

    pub fn value_coords(&self) -> &CoordSubgroup {
        &self.value_coords
    }

    pub fn residue_gens(&self) -> &BTreeSet<usize> {
        &self.residue_gens
    }

    pub fn policy(&self) -> &WitnessPolicy {
        &self.policy
    }

    /// Whether `gamma` lies in the representable value group: supported on
    /// the declared axes with denominators in the policy lattice.
    pub fn value_representable(&self, gamma: &GroupElement) -> bool {
        if !self.value_coords.contains(gamma) {
            return false;
        }
        let l = self.policy.denominator_lcm();
        gamma
            .coords()
            .iter()
            .all(|c| l.is_multiple_of(c.denom()))
    }

    /// The monomial X^gamma as a subfield element.
    pub fn monomial(&self, gamma: &GroupElement) -> Result<TruncatedSeries, SubfieldError> {
        if !self.value_representable(gamma) {
            return Err(SubfieldError::ValueNotInVK(gamma.clone()));
        }
        Ok(TruncatedSeries::monomial(gamma.clone(), RatFunc::one()))
    }

    /// Whether a residue coefficient lies in the declared residue field
    /// (visibly: variable support after the cheap reduction).
    pub fn residue_in_field(&self, r: &RatFunc) -> bool {
        r.supported_on(&self.residue_gens)
    }

    /// Lifts a residue-field element to a subfield element with that
    /// residue, substituting each residue generator by its carrier.
    pub fn lift_residue(&self, r: &RatFunc) -> Result<TruncatedSeries, SubfieldError> {
        if !self.residue_in_field(r) {
            return Err(SubfieldError::ResidueNotInField(r.clone()));
        }
        let r = r.reduced();
        let num = self.lift_poly(r.numer())?;
        if r.denom().is_one() {
            return Ok(num);
        }
        let den = self.lift_poly(r.denom())?;
        Ok(num.mul(&den.inv()?)?)
    }

    fn lift_poly(&self, p: &crate::scalars::MPoly) -> Result<TruncatedSeries, SubfieldError> {
        let mut acc = TruncatedSeries::zero(self.rank);
        for (mono, coef) in p.terms() {
            let mut term =
                TruncatedSeries::constant(self.rank, RatFunc::constant(coef.clone()));
            for i in mono.vars() {
                let carrier = self
                    .residue_carriers
                    .get(&i)
                    .ok_or(SubfieldError::LiftUnavailable(i))?;
                let g = &self.generators[carrier];
                for _ in 0..mono.exponent(i) {
                    term = term.mul(g)?;
                }
            }
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }

    /// Deterministic bounded enumeration of subfield elements in graded
    /// order: all policy-bounded terms sorted by (degree, height,
    /// exponent denominator, serialized form), then sums of two, capped
    /// at `limit` elements.
    pub fn witnesses(&self, limit: usize) -> Vec<TruncatedSeries> {
        let atoms = self.atoms();
        let mut terms: Vec<(TermKey, TruncatedSeries)> = Vec::new();
        // products of at most max_degree atoms, with repetition
        let mut products: Vec<(Vec<usize>, TruncatedSeries)> =
            vec![(Vec::new(), TruncatedSeries::one(self.rank))];
        for _ in 0..self.policy.max_degree {
            let mut next = Vec::new();
            for (idx, s) in &products {
                let start = idx.last().copied().unwrap_or(0);
                for (i, atom) in atoms.iter().enumerate().skip(start) {
                    if let Ok(p) = s.mul(&atom.series) {
                        let mut idx2 = idx.clone();
                        idx2.push(i);
                        next.push((idx2, p));
                    }
                }
            }
            for (idx, s) in &next {
                let degree = idx.len() as u32;
                for c in 1..=self.policy.max_height {
                    for sign in [1i64, -1] {
                        let coef = RatFunc::from_int(sign * c as i64);
                        let t = s.scale(&coef);
                        let key = TermKey {
                            degree,
                            height: c,
                            exp_den: idx
                                .iter()
                                .map(|&i| atoms[i].exp_den)
                                .max()
                                .unwrap_or(1),
                            form: t.to_string(),
                        };
                        terms.push((key, t));
                    }
                }
            }
            products = next;
        }
        // constants first
        for c in 1..=self.policy.max_height {
            for sign in [1i64, -1] {
                let t = TruncatedSeries::constant(self.rank, RatFunc::from_int(sign * c as i64));
                let key = TermKey {
                    degree: 0,
                    height: c,
                    exp_den: 1,
                    form: t.to_string(),
                };
                terms.push((key, t));
            }
        }
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        terms.dedup_by(|a, b| a.1 == b.1);

        let mut out = vec![TruncatedSeries::zero(self.rank)];
        for (_, t) in &terms {
            if out.len() >= limit {
                return out;
            }
            out.push(t.clone());
        }
        if self.policy.max_terms >= 2 {
            // diagonal order: sums appear by the grade of their larger term
            'outer: for j in 1..terms.len() {
                for i in 0..j {
                    if out.len() >= limit {
                        break 'outer;
                    }
                    if let Ok(s) = terms[i].1.add(&terms[j].1) {
                        if !s.is_exact_zero() {
                            out.push(s);
                        }
                    }
                }
            }
        }
        out.truncate(limit);
        out
    }

    /// One random policy-bounded element.
    pub fn sample(&self, rng: &mut impl Rng) -> TruncatedSeries {
        let atoms = self.atoms();
        let mut acc = TruncatedSeries::zero(self.rank);
        let nterms = rng.random_range(0..=self.policy.max_terms);
        for _ in 0..nterms {
            let c = rng.random_range(1..=self.policy.max_height as i64);
            let sign = if rng.random_bool(0.5) { 1 } else { -1 };
            let mut term = TruncatedSeries::constant(self.rank, RatFunc::from_int(sign * c));
            let deg = rng.random_range(0..=self.policy.max_degree);
            for _ in 0..deg {
                if atoms.is_empty() {
                    break;
                }
                let atom = &atoms[rng.random_range(0..atoms.len())];
                term = match term.mul(&atom.series) {
                    Ok(t) => t,
                    Err(_) => break,
                };
            }
            acc = match acc.add(&term) {
                Ok(a) => a,
                Err(_) => acc,
            };
        }
        acc
    }

    /// A random nonzero sample, for coefficient tuples.
    pub fn sample_nonzero(&self, rng: &mut impl Rng) -> TruncatedSeries {
        for _ in 0..32 {
            let s = self.sample(rng);
            if !s.is_exact_zero() && !s.is_indeterminate_zero() {
                return s;
            }
        }
        TruncatedSeries::one(self.rank)
    }

    /// Atom list: generators in name order, then axis monomials X^q for
    /// declared axes with 0 < |numerator| <= max_height and denominator
    /// <= max_exp_denominator, in a fixed order.
    fn atoms(&self) -> Vec<Atom> {
        let mut atoms: Vec<Atom> = self
            .generators
            .values()
            .map(|g| Atom {
                series: g.clone(),
                exp_den: 1,
            })
            .collect();
        for &axis in self.value_coords.indices() {
            for den in 1..=self.policy.max_exp_denominator {
                for num in 1..=self.policy.max_height {
                    let q = Rat::new(num as i64, den as i64);
                    if q.denom() != &BigInt::from(den) {
                        continue; // not in lowest terms; already listed
                    }
                    for sign in [1i64, -1] {
                        let exp = GroupElement::axis(self.rank, axis, q.clone() * Rat::from_int(sign));
                        atoms.push(Atom {
                            series: TruncatedSeries::monomial(exp, RatFunc::one()),
                            exp_den: den,
                        });
                    }
                }
            }
        }
        atoms
    }
}

/// Wire form of a subfield description.
#[derive(Serialize, Deserialize, Clone)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct SubfieldRepr {
    name: String,
    generators: BTreeMap<String, TruncatedSeries>,
    value_coords: CoordSubgroup,
    residue_gens: Vec<usize>,
    witness_policy: WitnessPolicy,
}

impl TryFrom<SubfieldRepr> for SubfieldDescription {
    type Error = String;
    fn try_from(r: SubfieldRepr) -> Result<Self, String> {
        SubfieldDescription::new(
            r.name,
            r.generators,
            r.value_coords,
            r.residue_gens,
            r.witness_policy,
        )
        .map_err(|e| e.to_string())
    }
}

impl From<SubfieldDescription> for SubfieldRepr {
    fn from(k: SubfieldDescription) -> Self {
        SubfieldRepr {
            name: k.name,
            generators: k.generators,
            value_coords: k.value_coords,
            residue_gens: k.residue_gens.into_iter().collect(),
            witness_policy: k.policy,
        }
    }
}

struct Atom {
    series: TruncatedSeries,
    exp_den: u32,
}

#[derive(PartialEq, Eq, PartialOrd, Ord)]
struct TermKey {
    degree: u32,
    height: u32,
    exp_den: u32,
    form: String,
}
