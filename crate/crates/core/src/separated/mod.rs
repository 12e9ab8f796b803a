//! Separated sequences and bases, the coefficient-space decomposition of
//! polynomials over the big field, the min-valuation evaluation identity,
//! and transfer of separation along valuation coarsenings.
//!
//! A sequence is separated over K when every K-linear combination has the
//! minimum of the per-term valuations. The working criterion: group the
//! members by coset of their valuation modulo vK; across cosets
//! separation is automatic, within a coset it is linear independence of
//! the leading coefficients over the declared residue field. Bases are
//! produced by valuation-raising elimination, which on non-separated
//! spans yields an unbounded strictly increasing chain instead.

#[cfg(test)]
mod tests;

use rand::Rng;
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

use crate::scalars::{dependency_over_subfield, Monomial, RatFunc};
use crate::search::{refine, SearchError};
use crate::series::{SeriesError, TruncatedSeries, Val, ValBound};
use crate::subfield::{SubfieldDescription, SubfieldError};
use crate::valgroup::{
    cut_type_lattice, ConvexSubgroup, CoordSubgroup, CutType, GroupElement,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SepError {
    #[error("member {index} is the exact zero series")]
    ExactZeroMember { index: usize },
    #[error("member {index} has indeterminate valuation")]
    IndeterminateInput { index: usize },
    #[error("truncation too coarse to continue the elimination")]
    TruncationTooCoarse,
    #[error("budget exhausted while expressing an element in the basis")]
    BudgetExhausted,
    #[error("element is not in the span of the basis")]
    NotInSpan,
    #[error("coefficient span is not separated; failure chain {0:?}")]
    SeparationFailure(Vec<GroupElement>),
    #[error("input family is not separated for the fine valuation")]
    NotVSeparated,
    #[error("coarse residue data indeterminate")]
    IndeterminateResidue,
    #[error(transparent)]
    Subfield(#[from] SubfieldError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

/// A K-linear combination violating the min-valuation identity.
#[derive(Clone, Debug)]
pub struct ViolatingCombo {
    pub coeffs: Vec<TruncatedSeries>,
    /// Valuation knowledge of the combination.
    pub combo_val: ValBound,
    /// min over i of v(k_i y_i).
    pub expected_min: Val,
}

/// Result of the separation check.
#[derive(Clone, Debug)]
pub struct SeparationCheck {
    pub separated: bool,
    pub violation: Option<ViolatingCombo>,
    /// Random coefficient tuples checked in addition to the criterion.
    pub sampled: usize,
}

/// Partition of member indices by coset of their valuation modulo the
/// divisible value group of K.
fn coset_classes(
    ys: &[TruncatedSeries],
    vk: &CoordSubgroup,
) -> Result<Vec<Vec<usize>>, SepError> {
    let mut vals = Vec::with_capacity(ys.len());
    for (index, y) in ys.iter().enumerate() {
        if y.is_exact_zero() {
            return Err(SepError::ExactZeroMember { index });
        }
        match y.val() {
            Ok(v) => vals.push(v),
            Err(_) => return Err(SepError::IndeterminateInput { index }),
        }
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    'member: for i in 0..ys.len() {
        for class in classes.iter_mut() {
            let rep = class[0];
            if vk.contains(&(&vals[i] - &vals[rep])) {
                class.push(i);
                continue 'member;
            }
        }
        classes.push(vec![i]);
    }
    Ok(classes)
}

/// Decides separation of a sequence over K by the residue criterion and
/// confirms with `samples` random coefficient tuples. Returns a concrete
/// violating tuple when the sequence is not separated.
pub fn is_separated(
    ys: &[TruncatedSeries],
    k: &SubfieldDescription,
    samples: usize,
    rng: &mut impl Rng,
) -> Result<SeparationCheck, SepError> {
    let classes = coset_classes(ys, k.value_coords())?;
    for class in &classes {
        if class.len() < 2 {
            continue;
        }
        let leads: Vec<RatFunc> = class
            .iter()
            .map(|&i| ys[i].leading().expect("nonzero").1.clone())
            .collect();
        if let Some(rho) = dependency_over_subfield(&leads, k.residue_gens()) {
            let violation = build_violation(ys, class, &rho, k)?;
            return Ok(SeparationCheck {
                separated: false,
                violation: Some(violation),
                sampled: 0,
            });
        }
    }
    // Randomized confirmation.
    let mut sampled = 0;
    for _ in 0..samples {
        let coeffs: Vec<TruncatedSeries> = ys.iter().map(|_| k.sample(rng)).collect();
        if coeffs.iter().any(|c| c.is_indeterminate_zero()) {
            continue;
        }
        sampled += 1;
        if let Some(v) = combo_violation(ys, &coeffs)? {
            // The criterion said separated; a sampled violation would be
            // a soundness bug, not a property of the input.
            debug_assert!(false, "sampling contradicts the residue criterion");
            return Ok(SeparationCheck {
                separated: false,
                violation: Some(v),
                sampled,
            });
        }
    }
    Ok(SeparationCheck {
        separated: true,
        violation: None,
        sampled,
    })
}

/// Lifts a residue dependency on a coset class to a violating tuple:
/// coefficients with equal per-term valuations whose combination jumps.
fn build_violation(
    ys: &[TruncatedSeries],
    class: &[usize],
    rho: &[RatFunc],
    k: &SubfieldDescription,
) -> Result<ViolatingCombo, SepError> {
    let ref_val = ys[class[0]].val().expect("checked");
    let mut coeffs: Vec<TruncatedSeries> =
        ys.iter().map(|y| TruncatedSeries::zero(y.rank())).collect();
    for (pos, &i) in class.iter().enumerate() {
        if rho[pos].is_zero() {
            continue;
        }
        let delta = &ref_val - &ys[i].val().expect("checked");
        if !k.value_representable(&delta) {
            return Err(SepError::Subfield(SubfieldError::ValueNotInVK(delta)));
        }
        coeffs[i] = k.lift_residue(&rho[pos])?.mul(&k.monomial(&delta)?)?;
    }
    let v = combo_violation(ys, &coeffs)?.expect("dependency must produce a violation");
    Ok(v)
}

/// Evaluates one coefficient tuple against the min-valuation identity.
fn combo_violation(
    ys: &[TruncatedSeries],
    coeffs: &[TruncatedSeries],
) -> Result<Option<ViolatingCombo>, SepError> {
    let rank = ys[0].rank();
    let mut combo = TruncatedSeries::zero(rank);
    let mut min: Val = Val::Infinite;
    for (y, c) in ys.iter().zip(coeffs) {
        let term = c.mul(y)?;
        if let Ok(v) = term.valuation() {
            if v < min {
                min = v;
            }
        }
        combo = combo.add(&term)?;
    }
    let jumped = match combo.val_bound() {
        ValBound::Exact(v) => v > min,
        ValBound::AtLeast(t) => Val::Finite(t) > min,
    };
    if jumped && !min.is_infinite() {
        return Ok(Some(ViolatingCombo {
            coeffs: coeffs.to_vec(),
            combo_val: combo.val_bound(),
            expected_min: min,
        }));
    }
    Ok(None)
}

/// Result of the basis construction: a separated basis of the span, or
/// the strictly increasing valuation chain the elimination produced
/// before the budget ran out (the witness of a non-separated span).
#[derive(Clone, Debug)]
pub enum SeparatedBasisOutcome {
    Basis(Vec<TruncatedSeries>),
    FailureChain(Vec<GroupElement>),
}

/// Builds a separated basis of the K-span of `xs` by valuation-raising
/// elimination: while some coset class has a residue dependency, replace
/// its latest member by the lifted combination (strictly higher
/// valuation), dropping members that vanish exactly.
pub fn separated_basis(
    xs: &[TruncatedSeries],
    k: &SubfieldDescription,
    budget: usize,
) -> Result<SeparatedBasisOutcome, SepError> {
    let mut ys: Vec<TruncatedSeries> = xs
        .iter()
        .filter(|y| !y.is_exact_zero())
        .cloned()
        .collect();
    for (index, y) in ys.iter().enumerate() {
        if y.is_indeterminate_zero() {
            return Err(SepError::IndeterminateInput { index });
        }
    }
    let mut chain: Vec<GroupElement> = Vec::new();
    for _ in 0..budget {
        let classes = coset_classes(&ys, k.value_coords())?;
        let mut dependency: Option<(Vec<usize>, Vec<RatFunc>)> = None;
        for class in &classes {
            if class.len() < 2 {
                continue;
            }
            let leads: Vec<RatFunc> = class
                .iter()
                .map(|&i| ys[i].leading().expect("nonzero").1.clone())
                .collect();
            if let Some(rho) = dependency_over_subfield(&leads, k.residue_gens()) {
                dependency = Some((class.clone(), rho));
                break;
            }
        }
        let Some((class, rho)) = dependency else {
            // Residue criterion holds everywhere: ys is separated.
            return Ok(SeparatedBasisOutcome::Basis(ys));
        };
        // Replace the latest participating member by the combination.
        let m = *class
            .iter()
            .rev()
            .find(|&&i| !rho[class.iter().position(|&j| j == i).unwrap()].is_zero())
            .expect("nonzero dependency");
        let target_val = ys[m].val().expect("nonzero");
        let mut z = TruncatedSeries::zero(ys[m].rank());
        for (pos, &i) in class.iter().enumerate() {
            if rho[pos].is_zero() {
                continue;
            }
            let delta = &target_val - &ys[i].val().expect("nonzero");
            if !k.value_representable(&delta) {
                return Err(SepError::Subfield(SubfieldError::ValueNotInVK(delta)));
            }
            let coeff = k.lift_residue(&rho[pos])?.mul(&k.monomial(&delta)?)?;
            z = z.add(&coeff.mul(&ys[i])?)?;
        }
        if z.is_exact_zero() {
            // K-linear dependence: the span loses a dimension.
            ys.remove(m);
            if ys.is_empty() {
                return Ok(SeparatedBasisOutcome::Basis(ys));
            }
            continue;
        }
        if z.is_indeterminate_zero() {
            // The elimination ran off the truncation window. With a chain
            // already accumulated this is failure evidence like any
            // budget stop; with nothing learned it is an honest error.
            if chain.is_empty() {
                return Err(SepError::TruncationTooCoarse);
            }
            return Ok(SeparatedBasisOutcome::FailureChain(chain));
        }
        chain.push(z.val().expect("nonzero"));
        ys[m] = z;
    }
    Ok(SeparatedBasisOutcome::FailureChain(chain))
}

/// How exactly an element was expressed in the basis.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ExpressQuality {
    Exact,
    UpToTruncation,
}

/// Expresses `x` as a K-combination of a separated basis by greedy
/// leading-term peeling: `x = sum coeffs_j * basis_j` exactly or up to
/// the available truncation.
pub fn express_in_basis(
    x: &TruncatedSeries,
    basis: &[TruncatedSeries],
    k: &SubfieldDescription,
    rounds: usize,
) -> Result<(Vec<TruncatedSeries>, ExpressQuality), SepError> {
    let r = refine(x, basis, k, rounds)?;
    if r.reached_zero() {
        return Ok((r.e.iter().map(|e| e.neg()).collect(), ExpressQuality::Exact));
    }
    if r.horizon() {
        return Ok((
            r.e.iter().map(|e| e.neg()).collect(),
            ExpressQuality::UpToTruncation,
        ));
    }
    match r.stall {
        Some(_) => Err(SepError::NotInSpan),
        None => Err(SepError::BudgetExhausted),
    }
}

/// A polynomial in outer variables with series coefficients.
#[derive(Clone, PartialEq, Eq, Debug, Default, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "SeriesPolyRepr", into = "SeriesPolyRepr")]
pub struct SeriesPolynomial {
    terms: BTreeMap<Monomial, TruncatedSeries>,
}

/// Wire form: a list of terms with exponent vectors.
#[derive(serde::Serialize, serde::Deserialize, Clone)]
#[serde(deny_unknown_fields)]
struct SeriesPolyRepr {
    terms: Vec<SeriesPolyTerm>,
}

#[derive(serde::Serialize, serde::Deserialize, Clone)]
#[serde(deny_unknown_fields)]
struct SeriesPolyTerm {
    exps: Vec<u32>,
    coef: TruncatedSeries,
}

impl TryFrom<SeriesPolyRepr> for SeriesPolynomial {
    type Error = String;
    fn try_from(r: SeriesPolyRepr) -> Result<Self, String> {
        let mut terms = BTreeMap::new();
        for t in r.terms {
            let m = Monomial::from_exponents(t.exps);
            if terms.insert(m, t.coef).is_some() {
                return Err("duplicate monomial in polynomial".to_string());
            }
        }
        Ok(SeriesPolynomial::from_terms(terms))
    }
}

impl From<SeriesPolynomial> for SeriesPolyRepr {
    fn from(p: SeriesPolynomial) -> Self {
        SeriesPolyRepr {
            terms: p
                .terms
                .into_iter()
                .map(|(m, coef)| SeriesPolyTerm {
                    exps: m.exponents().to_vec(),
                    coef,
                })
                .collect(),
        }
    }
}

impl SeriesPolynomial {
    pub fn zero() -> Self {
        SeriesPolynomial::default()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, TruncatedSeries)>) -> Self {
        let terms = terms
            .into_iter()
            .filter(|(_, c)| !c.is_exact_zero())
            .collect();
        SeriesPolynomial { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &TruncatedSeries)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficients(&self) -> Vec<TruncatedSeries> {
        self.terms.values().cloned().collect()
    }

    /// Substitutes the outer variables by series values.
    pub fn eval(&self, point: &[TruncatedSeries]) -> Result<TruncatedSeries, SeriesError> {
        let rank = point
            .first()
            .map(|p| p.rank())
            .or_else(|| self.terms.values().next().map(|c| c.rank()))
            .unwrap_or(0);
        let mut acc = TruncatedSeries::zero(rank);
        for (mono, coef) in &self.terms {
            let mut term = coef.clone();
            for i in mono.vars() {
                let x = &point[i - 1];
                for _ in 0..mono.exponent(i) {
                    term = term.mul(x)?;
                }
            }
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }
}

/// The coefficient-space decomposition `P = sum_i l_i p_i` with `l` a
/// separated basis of the K-span of P's coefficients and `p_i` polynomials
/// with K-coefficients.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub basis: Vec<TruncatedSeries>,
    pub parts: Vec<SeriesPolynomial>,
}

impl Decomposition {
    /// Recombines `sum_i basis_i * parts_i`.
    pub fn recombine(&self) -> Result<SeriesPolynomial, SeriesError> {
        let mut terms: BTreeMap<Monomial, TruncatedSeries> = BTreeMap::new();
        for (l, p) in self.basis.iter().zip(&self.parts) {
            for (mono, c) in p.terms() {
                let contrib = l.mul(c)?;
                match terms.entry(mono.clone()) {
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(contrib);
                    }
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        *e.get_mut() = e.get().add(&contrib)?;
                    }
                }
            }
        }
        Ok(SeriesPolynomial::from_terms(terms))
    }
}

/// Rewrites the polynomial over a separated basis of its coefficient
/// span. Fails with the elimination chain when the span is not separated.
pub fn decompose_polynomial(
    p: &SeriesPolynomial,
    k: &SubfieldDescription,
    budget: usize,
) -> Result<Decomposition, SepError> {
    let coeffs = p.coefficients();
    if coeffs.is_empty() {
        return Ok(Decomposition {
            basis: Vec::new(),
            parts: Vec::new(),
        });
    }
    let basis = match separated_basis(&coeffs, k, budget)? {
        SeparatedBasisOutcome::Basis(b) => b,
        SeparatedBasisOutcome::FailureChain(chain) => {
            return Err(SepError::SeparationFailure(chain))
        }
    };
    let mut parts: Vec<BTreeMap<Monomial, TruncatedSeries>> =
        vec![BTreeMap::new(); basis.len()];
    for (mono, coef) in p.terms() {
        let (ws, _) = express_in_basis(coef, &basis, k, budget.max(64))?;
        for (j, w) in ws.into_iter().enumerate() {
            if !w.is_exact_zero() {
                parts[j].insert(mono.clone(), w);
            }
        }
    }
    Ok(Decomposition {
        basis,
        parts: parts.into_iter().map(SeriesPolynomial::from_terms).collect(),
    })
}

/// One atomic comparison `v(l_right) + v(q(x)) <= v(l_left) + v(p(x))`
/// between basis-scaled evaluations, by basis index.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct DisjunctKey {
    pub p_index: usize,
    pub q_index: usize,
}

/// Classified value-group parameter of a basis element.
#[derive(Clone, Debug, Serialize)]
pub struct BasisParameter {
    pub valuation: GroupElement,
    pub cut: CutType,
    pub definable: bool,
}

/// Report of the evaluation identity and the induced K-description.
#[derive(Clone, Debug, Serialize)]
pub struct InequalityReport {
    pub basis: Vec<BasisParameter>,
    pub samples: usize,
    pub min_equality_violations: usize,
    /// Sampled points where `v(P(x)) >= v(Q(x))` held.
    pub holds_on: usize,
    /// Distinct active disjuncts over the sampled points.
    pub disjuncts: Vec<DisjunctKey>,
    /// Set when some basis parameter's cut is a genuine cut: the
    /// description then needs a non-definable value-group parameter.
    pub non_definable_parameter: bool,
    pub indeterminate: usize,
}

/// Decomposes P and Q over one separated basis of their joint coefficient
/// span, verifies `v(P(x)) = min_i v(l_i p_i(x))` (and likewise for Q) on
/// sampled K-points, and reports the disjunctive description with its
/// value-group parameters classified.
pub fn trace_inequality(
    p: &SeriesPolynomial,
    q: &SeriesPolynomial,
    k: &SubfieldDescription,
    samples: usize,
    nvars: usize,
    rng: &mut impl Rng,
    budget: usize,
) -> Result<InequalityReport, SepError> {
    // joint span: decompose a stacked polynomial, then split the parts
    let mut joint_terms: BTreeMap<Monomial, TruncatedSeries> = BTreeMap::new();
    let shift = 1 + p
        .terms()
        .chain(q.terms())
        .flat_map(|(m, _)| m.vars())
        .max()
        .unwrap_or(0);
    for (m, c) in p.terms() {
        joint_terms.insert(m.clone(), c.clone());
    }
    for (m, c) in q.terms() {
        // tag Q monomials with an extra variable to keep them apart
        joint_terms.insert(m.mul(&Monomial::var(shift)), c.clone());
    }
    let joint = SeriesPolynomial::from_terms(joint_terms);
    let dec = decompose_polynomial(&joint, k, budget)?;
    let basis = dec.basis.clone();
    let mut p_parts: Vec<SeriesPolynomial> = Vec::with_capacity(basis.len());
    let mut q_parts: Vec<SeriesPolynomial> = Vec::with_capacity(basis.len());
    for part in &dec.parts {
        let mut pp = BTreeMap::new();
        let mut qq = BTreeMap::new();
        for (m, c) in part.terms() {
            if m.exponent(shift) > 0 {
                qq.insert(m.div(&Monomial::var(shift)).expect("tagged"), c.clone());
            } else {
                pp.insert(m.clone(), c.clone());
            }
        }
        p_parts.push(SeriesPolynomial::from_terms(pp));
        q_parts.push(SeriesPolynomial::from_terms(qq));
    }

    let lattice = k.policy().denominator_lcm();
    let mut report = InequalityReport {
        basis: Vec::new(),
        samples: 0,
        min_equality_violations: 0,
        holds_on: 0,
        disjuncts: Vec::new(),
        non_definable_parameter: false,
        indeterminate: 0,
    };
    for l in &basis {
        let v = l.val().map_err(|_| SepError::TruncationTooCoarse)?;
        let cut = cut_type_lattice(&v, k.value_coords(), Some(&lattice)).expect("rank");
        let definable = cut.is_definable();
        report.non_definable_parameter |= !definable;
        report.basis.push(BasisParameter {
            valuation: v,
            cut,
            definable,
        });
    }

    for _ in 0..samples {
        let point: Vec<TruncatedSeries> = (0..nvars).map(|_| k.sample(rng)).collect();
        let scaled = |parts: &[SeriesPolynomial]| -> Result<(Val, Option<usize>, bool), SepError> {
            // min_i v(l_i part_i(x)) and the least index attaining it
            let mut min = Val::Infinite;
            let mut arg = None;
            for (i, (l, part)) in basis.iter().zip(parts).enumerate() {
                let term = l.mul(&part.eval(&point)?)?;
                match term.val_bound() {
                    ValBound::Exact(v) => {
                        if v < min {
                            min = v.clone();
                            arg = Some(i);
                        }
                    }
                    ValBound::AtLeast(_) => return Ok((min, arg, true)),
                }
            }
            Ok((min, arg, false))
        };
        let (p_min, p_arg, p_ind) = scaled(&p_parts)?;
        let (q_min, q_arg, q_ind) = scaled(&q_parts)?;
        let p_direct = p.eval(&point)?;
        let q_direct = q.eval(&point)?;
        let (pv, qv) = match (p_direct.val_bound(), q_direct.val_bound()) {
            (ValBound::Exact(a), ValBound::Exact(b)) => (a, b),
            _ => {
                report.indeterminate += 1;
                continue;
            }
        };
        if p_ind || q_ind {
            report.indeterminate += 1;
            continue;
        }
        report.samples += 1;
        if pv != p_min || qv != q_min {
            report.min_equality_violations += 1;
            continue;
        }
        if qv <= pv {
            report.holds_on += 1;
            if let (Some(ip), Some(iq)) = (p_arg, q_arg) {
                let key = DisjunctKey {
                    p_index: ip,
                    q_index: iq,
                };
                if !report.disjuncts.contains(&key) {
                    report.disjuncts.push(key);
                }
            }
        }
    }
    Ok(report)
}

/// Outcome of one coarse-level group in the transfer check.
#[derive(Clone, Debug)]
pub struct TransferGroup {
    pub wvalue: GroupElement,
    pub members: Vec<usize>,
    pub quotient_separated: bool,
}

/// Report of the separation transfer along a coarsening.
#[derive(Clone, Debug)]
pub struct TransferReport {
    /// Sampled w-level min-valuation violations (expected zero).
    pub coarse_violations: usize,
    pub coarse_sampled: usize,
    pub groups: Vec<TransferGroup>,
    /// The lifted family built from quotient-separated bases passes the
    /// fine-valuation separation check.
    pub lifting_separated: bool,
}

/// Builds the quotient subfield K/w of a subfield along the coarsening by
/// `c`: generators with coarse value zero descend to their coarse
/// residues; axes beyond the coarsening level survive with shifted
/// indices; the residue field is unchanged.
pub fn quotient_subfield(
    k: &SubfieldDescription,
    c: &ConvexSubgroup,
) -> Result<SubfieldDescription, SepError> {
    let j = c.index();
    let mut gens = BTreeMap::new();
    for (name, g) in k.generators() {
        if g.is_exact_zero() {
            continue;
        }
        let v = g.val().map_err(|_| SepError::IndeterminateResidue)?;
        if v.prefix(j).is_zero() {
            let pair = g.coarsen(c)?;
            gens.insert(name.clone(), pair.wresidue);
        }
    }
    let axes: Vec<usize> = k
        .value_coords()
        .indices()
        .iter()
        .filter(|&&s| s > j)
        .map(|&s| s - j)
        .collect();
    let vk = CoordSubgroup::new(k.rank() - j, axes).expect("shifted axes in range");
    Ok(SubfieldDescription::new(
        format!("{}/w", k.name()),
        gens,
        vk,
        k.residue_gens().iter().copied(),
        k.policy().clone(),
    )?)
}

/// Checks both directions of separation transfer along the coarsening by
/// `c`: (a) the family stays separated for the coarse valuation
/// (sampling), and (b) per coarse level, the ratio residues form a
/// separated family for the fine valuation on the quotient; then lifts
/// quotient-separated bases back and re-checks fine separation.
pub fn sepquotient_transfer(
    ys: &[TruncatedSeries],
    k: &SubfieldDescription,
    c: &ConvexSubgroup,
    samples: usize,
    rng: &mut impl Rng,
) -> Result<TransferReport, SepError> {
    let fine = is_separated(ys, k, samples.min(64), rng)?;
    if !fine.separated {
        return Err(SepError::NotVSeparated);
    }
    let j = c.index();

    // (a) coarse-level sampling: w(sum k_i y_i) = min w(k_i y_i)
    let mut coarse_violations = 0;
    let mut coarse_sampled = 0;
    for _ in 0..samples {
        let coeffs: Vec<TruncatedSeries> = ys.iter().map(|_| k.sample(rng)).collect();
        let mut combo = TruncatedSeries::zero(ys[0].rank());
        let mut min: Option<GroupElement> = None;
        let mut indeterminate = false;
        for (y, coeff) in ys.iter().zip(&coeffs) {
            let term = coeff.mul(y)?;
            if term.is_exact_zero() {
                continue;
            }
            match term.val() {
                Ok(v) => {
                    let w = v.prefix(j);
                    min = Some(match min {
                        None => w,
                        Some(m) => m.min(w),
                    });
                }
                Err(_) => indeterminate = true,
            }
            combo = combo.add(&term)?;
        }
        let (Some(min), false) = (min, indeterminate) else {
            continue;
        };
        coarse_sampled += 1;
        match combo.val() {
            Ok(v) => {
                if v.prefix(j) != min {
                    coarse_violations += 1;
                }
            }
            Err(SeriesError::ExactZeroValuation) => coarse_violations += 1,
            Err(_) => {
                // hidden beyond truncation: compare prefixes of the bound
                coarse_sampled -= 1;
            }
        }
    }

    // (b) group by coarse value, check quotient separation of the ratio
    // residues, and lift back.
    let kq = quotient_subfield(k, c)?;
    let mut groups: Vec<(GroupElement, Vec<usize>)> = Vec::new();
    for (i, y) in ys.iter().enumerate() {
        let w = y.val().expect("checked").prefix(j);
        match groups.iter_mut().find(|(g, _)| *g == w) {
            Some((_, v)) => v.push(i),
            None => groups.push((w, vec![i])),
        }
    }
    let mut out_groups = Vec::new();
    let mut lifted_family: Vec<TruncatedSeries> = Vec::new();
    for (wvalue, members) in groups {
        // Normalize to coarse level zero by the reference valuation's
        // monomial: the coarse residues of y_i X^{-v(y_ref)} are the
        // ratio residues up to one common monomial factor.
        let base = &ys[members[0]];
        let ref_val = base.val().expect("checked");
        let shift = TruncatedSeries::monomial(-&ref_val, RatFunc::one());
        let mut ratios = Vec::new();
        for &i in &members {
            let u = ys[i].mul(&shift)?;
            let pair = u.coarsen(&ConvexSubgroup::new(u.rank(), j).expect("rank"))?;
            if !pair.wvalue.is_zero() {
                return Err(SepError::IndeterminateResidue);
            }
            ratios.push(pair.wresidue);
        }
        let check = is_separated(&ratios, &kq, samples.min(32), rng)?;
        // Lift a quotient-separated basis back along the group's base
        // element: base * (slice lift of each quotient basis member).
        let quotient_basis = match separated_basis(&ratios, &kq, 32)? {
            SeparatedBasisOutcome::Basis(b) => b,
            SeparatedBasisOutcome::FailureChain(chain) => {
                return Err(SepError::SeparationFailure(chain))
            }
        };
        let prefix = GroupElement::zero(j);
        for b in &quotient_basis {
            lifted_family.push(base.mul(&b.lift_prefix(&prefix))?);
        }
        out_groups.push(TransferGroup {
            wvalue,
            members,
            quotient_separated: check.separated,
        });
    }
    let lifting = is_separated(&lifted_family, k, samples.min(64), rng)?;

    Ok(TransferReport {
        coarse_violations,
        coarse_sampled,
        groups: out_groups,
        lifting_separated: lifting.separated,
    })
}
