//! A configurable two-variable tower over Q^2-valued series exhibiting,
//! for each n, a subfield whose size-<=n coefficient families are all
//! separated while one size-(n+1) family is not: distances to the last
//! generator climb cofinally along integer multiples of v(X) without a
//! maximum, while never reaching the v(Y) scale.
//!
//! The tower binds X and Y with v(X) = (0,1) << v(Y) = (1,0), residue
//! carriers t_1..t_n, and t_{n+1} = sum_i f_i t_i + f_{n+1} for series
//! f_i in X with pairwise disjoint sparse supports (factorial gaps by
//! default) and unit constant term.

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

use crate::scalars::{Rat, RatFunc};
use crate::search::{classify_point, SearchError, TypeVerdict};
use crate::separated::{is_separated, separated_basis, SepError, SeparatedBasisOutcome};
use crate::series::{SeriesError, Trunc, TruncatedSeries};
use crate::subfield::{SubfieldDescription, SubfieldError, WitnessPolicy};
use crate::valgroup::{CoordSubgroup, GroupElement};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CxError {
    #[error("the construction needs n >= 1")]
    InvalidArity,
    #[error("schedule for f_{index} has {found} exponents below the truncation order; need >= 3")]
    ScheduleTooSparse { index: usize, found: usize },
    #[error("schedule for f_{index} must be strictly increasing and >= 1")]
    ScheduleNotIncreasing { index: usize },
    #[error("schedules must be pairwise disjoint; exponent {exp} repeats")]
    ScheduleOverlap { exp: u64 },
    #[error("depth {depth} must stay below the truncation order {m}")]
    DepthBeyondTruncation { depth: u64, m: u64 },
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Subfield(#[from] SubfieldError),
    #[error(transparent)]
    Separation(#[from] SepError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

/// The bound tower at one arity and truncation order.
#[derive(Clone, Debug)]
pub struct CounterexampleScenario {
    pub n: usize,
    /// Truncation order: series in X are known below exponent (0, M).
    pub trunc_order: u64,
    /// Positive-exponent schedules of the f_i (the unit constant term is
    /// implicit).
    pub schedule: Vec<Vec<u64>>,
    pub x: TruncatedSeries,
    pub y: TruncatedSeries,
    /// f_1 .. f_{n+1}.
    pub f: Vec<TruncatedSeries>,
    /// t_1 .. t_n (residue carriers) and t_{n+1} (the bound element).
    pub t: Vec<TruncatedSeries>,
    /// K: the fragment of k(X, Y) with trivial residue field.
    pub base: SubfieldDescription,
    /// K(t_1, ..., t_n): the extension the last element is limit over.
    pub extended: SubfieldDescription,
    /// Reserved for the mixed-characteristic variant of the construction.
    pub residue_characteristic: Option<u32>,
}

/// Default schedule: factorials ((n+1) j + (i-1))! for j >= 1, kept
/// below the truncation order. Distinct residues mod (n+1) keep the
/// supports pairwise disjoint.
pub fn default_schedule(n: usize, trunc_order: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::with_capacity(n + 1);
    for i in 1..=(n + 1) {
        let mut exps = Vec::new();
        let mut j = 1u64;
        loop {
            let idx = (n as u64 + 1) * j + (i as u64 - 1);
            let f = factorial(idx);
            if f >= trunc_order {
                break;
            }
            exps.push(f);
            j += 1;
        }
        out.push(exps);
    }
    out
}

fn factorial(k: u64) -> u64 {
    (1..=k).product::<u64>().max(1)
}

/// Builds the scenario and checks its invariants: v(X) = (0,1),
/// v(Y) = (1,0), v(t_i) = 0 with residue carriers, and the binding of
/// the last element at the requested truncation.
pub fn build_scenario(
    n: usize,
    trunc_order: u64,
    schedule: Option<Vec<Vec<u64>>>,
) -> Result<CounterexampleScenario, CxError> {
    if n == 0 {
        return Err(CxError::InvalidArity);
    }
    let schedule = schedule.unwrap_or_else(|| default_schedule(n, trunc_order));
    for (idx, exps) in schedule.iter().enumerate() {
        let below = exps.iter().filter(|&&e| e < trunc_order).count();
        if below < 3 {
            return Err(CxError::ScheduleTooSparse {
                index: idx + 1,
                found: below,
            });
        }
        if exps[0] == 0 || exps.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CxError::ScheduleNotIncreasing { index: idx + 1 });
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    for exps in &schedule {
        for &e in exps {
            if !seen.insert(e) {
                return Err(CxError::ScheduleOverlap { exp: e });
            }
        }
    }

    let x = TruncatedSeries::monomial(GroupElement::from_ints(&[0, 1]), RatFunc::one());
    let y = TruncatedSeries::monomial(GroupElement::from_ints(&[1, 0]), RatFunc::one());
    let horizon = GroupElement::from_ints(&[0, trunc_order as i64]);

    let mut f = Vec::with_capacity(n + 1);
    for exps in &schedule {
        let mut terms = vec![(GroupElement::from_ints(&[0, 0]), RatFunc::one())];
        for &e in exps {
            if e < trunc_order {
                terms.push((GroupElement::from_ints(&[0, e as i64]), RatFunc::one()));
            }
        }
        f.push(TruncatedSeries::from_terms(
            2,
            terms,
            Trunc::Finite(horizon.clone()),
        )?);
    }

    let mut t: Vec<TruncatedSeries> = (1..=n)
        .map(|i| TruncatedSeries::constant(2, RatFunc::var(i)))
        .collect();
    let mut last = f[n].clone();
    for i in 0..n {
        last = last.add(&f[i].mul(&t[i])?)?;
    }
    t.push(last);

    // invariants
    debug_assert_eq!(x.val()?, GroupElement::from_ints(&[0, 1]));
    debug_assert_eq!(y.val()?, GroupElement::from_ints(&[1, 0]));
    for ti in &t {
        debug_assert!(ti.val()?.is_zero());
    }

    let policy = WitnessPolicy {
        max_degree: 2,
        max_height: 3,
        max_exp_denominator: 2,
        max_terms: 2,
    };
    let mut base_gens = BTreeMap::new();
    base_gens.insert("X".to_string(), x.clone());
    base_gens.insert("Y".to_string(), y.clone());
    let base = SubfieldDescription::new(
        "K",
        base_gens.clone(),
        CoordSubgroup::full(2),
        [],
        policy.clone(),
    )?;
    let mut ext_gens = base_gens;
    for (i, ti) in t.iter().take(n).enumerate() {
        ext_gens.insert(format!("t{}", i + 1), ti.clone());
    }
    let extended = SubfieldDescription::new(
        "K_ext",
        ext_gens,
        CoordSubgroup::full(2),
        1..=n,
        policy,
    )?;

    Ok(CounterexampleScenario {
        n,
        trunc_order,
        schedule,
        x,
        y,
        f,
        t,
        base,
        extended,
    residue_characteristic: None,
    })
}

impl CounterexampleScenario {
    /// The exact polynomial truncation of `f` below X-order `m`.
    fn exact_truncation(f: &TruncatedSeries, m: u64) -> TruncatedSeries {
        let bound = GroupElement::from_ints(&[0, m as i64]);
        let terms = f
            .terms()
            .filter(|(e, _)| *e < &bound)
            .map(|(e, c)| (e.clone(), c.clone()));
        TruncatedSeries::from_terms(f.rank(), terms, Trunc::Infinite).expect("exact terms")
    }

    /// The bound combination `t_{n+1} + e_{n+1} + sum e_i t_i`.
    pub fn combination(&self, e: &[TruncatedSeries]) -> Result<TruncatedSeries, CxError> {
        assert_eq!(e.len(), self.n + 1);
        let mut d = self.t[self.n].add(&e[self.n])?;
        for i in 0..self.n {
            d = d.add(&e[i].mul(&self.t[i])?)?;
        }
        Ok(d)
    }
}

/// Result of the cofinality computation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Claim1Report {
    /// Valuations achieved exactly: m * v(X) for m = 1..=depth.
    pub achieved: Vec<GroupElement>,
    /// Valuations of the plain truncation witnesses (the schedule gaps).
    pub truncation_chain: Vec<GroupElement>,
    /// Sampled witness combinations whose valuation exceeded the X scale
    /// (first coordinate > 0). Must stay empty.
    pub ceiling_violations: Vec<GroupElement>,
    pub ceiling_sampled: usize,
    pub indeterminate: usize,
}

/// For each m <= depth exhibits witnesses with valuation >= m*v(X) (the
/// truncation tuples) and exactly m*v(X) (after a monomial bump), then
/// samples witness tuples checking that no achieved valuation ever
/// reaches the v(Y) scale.
pub fn claim1_cofinality(
    s: &CounterexampleScenario,
    depth: u64,
    samples: usize,
    rng: &mut impl Rng,
) -> Result<Claim1Report, CxError> {
    if depth >= s.trunc_order {
        return Err(CxError::DepthBeyondTruncation {
            depth,
            m: s.trunc_order,
        });
    }
    let mut achieved = Vec::new();
    let mut truncation_chain: Vec<GroupElement> = Vec::new();
    for m in 1..=depth {
        let e: Vec<TruncatedSeries> = s
            .f
            .iter()
            .map(|f| CounterexampleScenario::exact_truncation(f, m).neg())
            .collect();
        let d = s.combination(&e)?;
        let v = d.val()?;
        let target = GroupElement::from_ints(&[0, m as i64]);
        assert!(v >= target, "truncation witness must reach m*v(X)");
        if truncation_chain.last() != Some(&v) {
            truncation_chain.push(v);
        }
        // bump with X^m to land exactly on m*v(X)
        let mut e_exact = e;
        let bump = TruncatedSeries::monomial(target.clone(), RatFunc::one());
        e_exact[s.n] = e_exact[s.n].add(&bump)?;
        let d = s.combination(&e_exact)?;
        assert_eq!(d.val()?, target, "bumped witness must land exactly");
        achieved.push(target);
    }

    let mut ceiling_violations = Vec::new();
    let mut ceiling_sampled = 0;
    let mut indeterminate = 0;
    for _ in 0..samples {
        let e: Vec<TruncatedSeries> = (0..=s.n).map(|_| s.base.sample(rng)).collect();
        let d = s.combination(&e)?;
        match d.val() {
            Ok(v) => {
                ceiling_sampled += 1;
                if v.coord(1) > &Rat::zero() {
                    ceiling_violations.push(v);
                }
            }
            Err(_) => indeterminate += 1,
        }
    }

    Ok(Claim1Report {
        achieved,
        truncation_chain,
        ceiling_violations,
        ceiling_sampled,
        indeterminate,
    })
}

/// Separation outcome for one generator subset.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubsetReport {
    pub members: Vec<usize>,
    pub basis_found: bool,
    pub basis_size: usize,
    pub certified: bool,
}

/// Result of the subset separation checks.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Claim2Report {
    /// Keyed by comma-joined member indices, e.g. "1,3".
    pub subsets: BTreeMap<String, SubsetReport>,
    /// Elimination chain of the full family (strictly increasing).
    pub full_chain: Vec<GroupElement>,
}

impl Claim2Report {
    pub fn all_subsets_separated(&self) -> bool {
        self.subsets.values().all(|r| r.basis_found && r.certified)
    }
}

/// For every generator subset of size <= `max_subset_size`, builds a
/// separated basis of its span together with 1 and certifies it; the
/// full set of all n+1 generators must instead yield the strictly
/// increasing failure chain.
pub fn claim2_subsets(
    s: &CounterexampleScenario,
    max_subset_size: usize,
    budget: usize,
    rng: &mut impl Rng,
) -> Result<Claim2Report, CxError> {
    let n1 = s.n + 1;
    let mut subsets = BTreeMap::new();
    for mask in 1u32..(1 << n1) {
        let members: Vec<usize> = (1..=n1).filter(|i| mask & (1 << (i - 1)) != 0).collect();
        if members.is_empty() || members.len() > max_subset_size {
            continue;
        }
        let mut family = vec![TruncatedSeries::one(2)];
        family.extend(members.iter().map(|&i| s.t[i - 1].clone()));
        let key = members
            .iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join(",");
        match separated_basis(&family, &s.base, budget)? {
            SeparatedBasisOutcome::Basis(b) => {
                let certified = is_separated(&b, &s.base, 40, rng)?.separated;
                subsets.insert(
                    key,
                    SubsetReport {
                        members,
                        basis_found: true,
                        basis_size: b.len(),
                        certified,
                    },
                );
            }
            SeparatedBasisOutcome::FailureChain(_) => {
                subsets.insert(
                    key,
                    SubsetReport {
                        members,
                        basis_found: false,
                        basis_size: 0,
                        certified: false,
                    },
                );
            }
        }
    }

    let mut family = vec![TruncatedSeries::one(2)];
    family.extend(s.t.iter().cloned());
    let full_chain = match separated_basis(&family, &s.base, budget)? {
        SeparatedBasisOutcome::FailureChain(chain) => chain,
        SeparatedBasisOutcome::Basis(_) => Vec::new(),
    };

    Ok(Claim2Report {
        subsets,
        full_chain,
    })
}

/// Classifies the last generator over the extended subfield; consistency
/// demands limit evidence (or an honest exhaustion), never a residual or
/// valuational verdict.
pub fn classify_last(
    s: &CounterexampleScenario,
    budget: usize,
) -> Result<TypeVerdict, CxError> {
    Ok(classify_point(&s.t[s.n], &s.extended, budget)?)
}
