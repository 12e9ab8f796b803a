//! The lexicographically ordered value group Q^r: coordinate subgroups,
//! convex subgroups, coarsening projections, cut classification, and the
//! contiguity criteria for elementary pairs of divisible ordered groups.

use num_bigint::BigInt;
use num_integer::Integer;
use rand::Rng;
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use crate::scalars::Rat;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("coordinate index {index} out of range for rank {rank}")]
    IndexOutOfRange { index: usize, rank: usize },
    #[error("convex subgroup index {j} out of range for rank {rank}")]
    ConvexIndexOutOfRange { j: usize, rank: usize },
}

/// A point of Q^r with the lexicographic order, coordinate 1 most
/// significant. Serves both as a valuation value and a series exponent.
///
/// Serializes as a JSON array of rational strings `"p/q"`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupElement {
    coords: Vec<Rat>,
}

impl GroupElement {
    pub fn new(coords: Vec<Rat>) -> Self {
        GroupElement { coords }
    }

    pub fn zero(rank: usize) -> Self {
        GroupElement {
            coords: vec![Rat::zero(); rank],
        }
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        GroupElement {
            coords: coords.iter().map(|&c| Rat::from_int(c)).collect(),
        }
    }

    /// Unit vector `e_index` (1-based) scaled by `value`.
    pub fn axis(rank: usize, index: usize, value: Rat) -> Self {
        assert!(index >= 1 && index <= rank);
        let mut coords = vec![Rat::zero(); rank];
        coords[index - 1] = value;
        GroupElement { coords }
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Rat] {
        &self.coords
    }

    /// Coordinate at a 1-based index.
    pub fn coord(&self, index: usize) -> &Rat {
        &self.coords[index - 1]
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// 1-based indices of nonzero coordinates.
    pub fn support(&self) -> Vec<usize> {
        self.coords
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, _)| i + 1)
            .collect()
    }

    /// First nonzero coordinate index (1-based), none for zero.
    pub fn leading_index(&self) -> Option<usize> {
        self.coords.iter().position(|c| !c.is_zero()).map(|i| i + 1)
    }

    pub fn is_positive(&self) -> bool {
        match self.leading_index() {
            Some(i) => !self.coord(i).is_negative(),
            None => false,
        }
    }

    pub fn scale(&self, c: &Rat) -> GroupElement {
        GroupElement {
            coords: self.coords.iter().map(|x| x * c).collect(),
        }
    }

    pub fn abs(&self) -> GroupElement {
        if self.is_positive() || self.is_zero() {
            self.clone()
        } else {
            -self
        }
    }

    /// The first `j` coordinates, as a rank-`j` element.
    pub fn prefix(&self, j: usize) -> GroupElement {
        GroupElement {
            coords: self.coords[..j].to_vec(),
        }
    }

    /// Coordinates after the first `j`, as a rank-`(r-j)` element.
    pub fn suffix(&self, j: usize) -> GroupElement {
        GroupElement {
            coords: self.coords[j..].to_vec(),
        }
    }

    /// Restriction to the coordinates of `s`, zero elsewhere (same rank).
    pub fn restrict(&self, s: &BTreeSet<usize>) -> GroupElement {
        GroupElement {
            coords: self
                .coords
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    if s.contains(&(i + 1)) {
                        c.clone()
                    } else {
                        Rat::zero()
                    }
                })
                .collect(),
        }
    }

    /// Concatenation `self ++ other`.
    pub fn concat(&self, other: &GroupElement) -> GroupElement {
        let mut coords = self.coords.clone();
        coords.extend(other.coords.iter().cloned());
        GroupElement { coords }
    }
}

impl Add for &GroupElement {
    type Output = GroupElement;
    fn add(self, rhs: &GroupElement) -> GroupElement {
        assert_eq!(self.rank(), rhs.rank(), "rank mismatch");
        GroupElement {
            coords: self
                .coords
                .iter()
                .zip(&rhs.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &GroupElement {
    type Output = GroupElement;
    fn sub(self, rhs: &GroupElement) -> GroupElement {
        assert_eq!(self.rank(), rhs.rank(), "rank mismatch");
        GroupElement {
            coords: self
                .coords
                .iter()
                .zip(&rhs.coords)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &GroupElement {
    type Output = GroupElement;
    fn neg(self) -> GroupElement {
        GroupElement {
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for GroupElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let strings: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        strings.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GroupElement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let strings = Vec::<String>::deserialize(deserializer)?;
        let coords = strings
            .iter()
            .map(|s| Rat::from_str(s).map_err(|e| D::Error::custom(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(GroupElement { coords })
    }
}

/// Lexicographic comparison with coordinate 1 dominant.
pub fn lex_compare(a: &GroupElement, b: &GroupElement) -> Result<Ordering, GroupError> {
    if a.rank() != b.rank() {
        return Err(GroupError::RankMismatch(a.rank(), b.rank()));
    }
    Ok(a.cmp(b))
}

/// The coordinate subgroup of Q^r supported on a set of axes, with the
/// induced lexicographic order. The empty support denotes the trivial
/// subgroup (the value group of a trivially valued subfield).
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "CoordSubgroupRepr", into = "CoordSubgroupRepr")]
pub struct CoordSubgroup {
    rank: usize,
    s: BTreeSet<usize>,
}

#[derive(Serialize, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
struct CoordSubgroupRepr {
    rank: usize,
    s: Vec<usize>,
}

impl TryFrom<CoordSubgroupRepr> for CoordSubgroup {
    type Error = String;
    fn try_from(r: CoordSubgroupRepr) -> Result<Self, String> {
        CoordSubgroup::new(r.rank, r.s).map_err(|e| e.to_string())
    }
}

impl From<CoordSubgroup> for CoordSubgroupRepr {
    fn from(g: CoordSubgroup) -> Self {
        CoordSubgroupRepr {
            rank: g.rank,
            s: g.s.into_iter().collect(),
        }
    }
}

impl CoordSubgroup {
    pub fn new(rank: usize, s: impl IntoIterator<Item = usize>) -> Result<Self, GroupError> {
        let s: BTreeSet<usize> = s.into_iter().collect();
        for &i in &s {
            if i == 0 || i > rank {
                return Err(GroupError::IndexOutOfRange { index: i, rank });
            }
        }
        Ok(CoordSubgroup { rank, s })
    }

    /// The full group Q^r.
    pub fn full(rank: usize) -> Self {
        CoordSubgroup {
            rank,
            s: (1..=rank).collect(),
        }
    }

    /// The trivial subgroup {0}.
    pub fn trivial(rank: usize) -> Self {
        CoordSubgroup {
            rank,
            s: BTreeSet::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn indices(&self) -> &BTreeSet<usize> {
        &self.s
    }

    pub fn is_trivial(&self) -> bool {
        self.s.is_empty()
    }

    pub fn min_index(&self) -> Option<usize> {
        self.s.first().copied()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.s.last().copied()
    }

    /// Membership in the divisible group: support contained in the axes.
    pub fn contains(&self, g: &GroupElement) -> bool {
        g.rank() == self.rank && g.support().iter().all(|i| self.s.contains(i))
    }
}

/// The convex subgroup C_j = { x : x_1 = ... = x_j = 0 } of Q^r.
/// C_r is trivial and C_0 is the whole group.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ConvexSubgroup {
    rank: usize,
    j: usize,
}

impl ConvexSubgroup {
    pub fn new(rank: usize, j: usize) -> Result<Self, GroupError> {
        if j > rank {
            return Err(GroupError::ConvexIndexOutOfRange { j, rank });
        }
        Ok(ConvexSubgroup { rank, j })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Number of leading coordinates that vanish on the subgroup.
    pub fn index(&self) -> usize {
        self.j
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        g.rank() == self.rank && g.coords()[..self.j].iter().all(|c| c.is_zero())
    }
}

/// Position of a group element relative to a coordinate subgroup: inside
/// it, immediately above/below one of its elements, beyond it on either
/// side, or realizing a genuine (non-definable) cut.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum CutType {
    InGroup,
    PlusOf { below: GroupElement },
    MinusOf { above: GroupElement },
    AboveAll,
    BelowAll,
    NonDefinableCut { near: GroupElement, sign: i8 },
}

impl CutType {
    pub fn is_definable(&self) -> bool {
        !matches!(self, CutType::NonDefinableCut { .. })
    }
}

/// Classifies the cut of `gamma` over the divisible coordinate subgroup.
pub fn cut_type(gamma: &GroupElement, group: &CoordSubgroup) -> Result<CutType, GroupError> {
    cut_type_lattice(gamma, group, None)
}

/// Cut classification over the subgroup of `group` whose coordinates have
/// denominator dividing `denominator_lcm`. `None` means the full divisible
/// subgroup. This is the effective value group of a subfield whose witness
/// policy bounds exponent denominators.
pub fn cut_type_lattice(
    gamma: &GroupElement,
    group: &CoordSubgroup,
    denominator_lcm: Option<&BigInt>,
) -> Result<CutType, GroupError> {
    if gamma.rank() != group.rank() {
        return Err(GroupError::RankMismatch(gamma.rank(), group.rank()));
    }
    let on_lattice = |c: &Rat| -> bool {
        match denominator_lcm {
            None => true,
            Some(l) => l.is_multiple_of(c.denom()),
        }
    };
    // First coordinate where gamma leaves the (lattice) subgroup: either a
    // nonzero coordinate off the axes, or an on-axis coordinate with a
    // denominator the lattice cannot represent.
    let mut obstruction: Option<(usize, bool)> = None; // (index, off_axis)
    for i in 1..=gamma.rank() {
        let c = gamma.coord(i);
        if group.indices().contains(&i) {
            if !on_lattice(c) {
                obstruction = Some((i, false));
                break;
            }
        } else if !c.is_zero() {
            obstruction = Some((i, true));
            break;
        }
    }
    let (i0, off_axis) = match obstruction {
        None => return Ok(CutType::InGroup),
        Some(o) => o,
    };
    // Nothing representable before the obstruction: gamma is beyond the
    // whole subgroup on the side of its leading coordinate.
    let min_s = group.min_index().unwrap_or(gamma.rank() + 1);
    let lead = gamma.leading_index().expect("nonzero by obstruction");
    if lead < min_s {
        return Ok(if gamma.coord(lead).is_negative() {
            CutType::BelowAll
        } else {
            CutType::AboveAll
        });
    }
    // Nearest subgroup point below the obstruction level.
    let mut near = GroupElement::zero(gamma.rank());
    for &i in group.indices() {
        if i < i0 {
            near.coords[i - 1] = gamma.coord(i).clone();
        }
    }
    let sign = if off_axis {
        if gamma.coord(i0).is_negative() {
            -1
        } else {
            1
        }
    } else {
        // Denominator obstruction: gamma sits strictly between consecutive
        // lattice points; canonical form is the type just above the floor.
        let l = denominator_lcm.expect("lattice obstruction");
        let scaled = gamma.coord(i0) * &Rat::from_bigint(l.clone());
        let floor = Rat::from_bigint(scaled.floor())
            * Rat::from_bigint(l.clone()).recip().expect("nonzero lcm");
        near.coords[i0 - 1] = floor;
        1
    };
    let tail_nonempty = group.indices().iter().any(|&i| i > i0);
    if tail_nonempty {
        Ok(CutType::NonDefinableCut { near, sign })
    } else if sign > 0 {
        Ok(CutType::PlusOf { below: near })
    } else {
        Ok(CutType::MinusOf { above: near })
    }
}

/// The coarsening projection Q^r -> Q^j induced by quotienting out the
/// convex subgroup: keeps the first `j` coordinates.
pub fn coarsen_value(gamma: &GroupElement, c: &ConvexSubgroup) -> GroupElement {
    assert_eq!(gamma.rank(), c.rank(), "rank mismatch");
    gamma.prefix(c.index())
}

/// Result of the contiguity test: whether the subgroup's axes form an
/// interval, with the convex witnesses `C_2 = G x C_1` when they do.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct ContiguityReport {
    pub holds: bool,
    /// (C_2, C_1) with C_2 = C_{min(S)-1} and C_1 = C_{max(S)}.
    pub witnesses: Option<(ConvexSubgroup, ConvexSubgroup)>,
}

/// Whether the subgroup sits as a lexicographic factor between two convex
/// subgroups: true exactly when its axis set is a contiguous interval.
pub fn ms_contiguity(group: &CoordSubgroup) -> ContiguityReport {
    let (min, max) = match (group.min_index(), group.max_index()) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            // Trivial subgroup: vacuously a factor.
            return ContiguityReport {
                holds: true,
                witnesses: None,
            };
        }
    };
    let holds = (min..=max).all(|i| group.indices().contains(&i));
    let witnesses = holds.then(|| {
        (
            ConvexSubgroup::new(group.rank(), min - 1).expect("min >= 1"),
            ConvexSubgroup::new(group.rank(), max).expect("max <= rank"),
        )
    });
    ContiguityReport { holds, witnesses }
}

/// Result of the approximation test, with a counterexample support
/// pattern and a concrete witness when the condition fails.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Condition4Report {
    pub holds: bool,
    pub counterexample_pattern: Option<Vec<usize>>,
    pub witness: Option<GroupElement>,
    /// Number of randomized confirmations performed.
    pub confirmations: u32,
}

/// Decides whether every element of Q^r bounded by the subgroup is
/// approximable from it to below all of its positive elements.
///
/// The decision is exact over the finitely many support patterns: the
/// condition holds iff every pattern whose leading index is >= min(S) has
/// its part up to max(S) inside S. `samples` additional randomized checks
/// confirm the pattern decision with concrete rational witnesses.
pub fn ms_condition4(
    group: &CoordSubgroup,
    samples: u32,
    rng: &mut impl Rng,
) -> Condition4Report {
    let r = group.rank();
    let (min_s, max_s) = match (group.min_index(), group.max_index()) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            // No nonzero |y| exists, so the premise is vacuous.
            return Condition4Report {
                holds: true,
                counterexample_pattern: None,
                witness: None,
                confirmations: 0,
            };
        }
    };
    let mut holds = true;
    let mut counterexample_pattern = None;
    let mut witness = None;
    for mask in 1u32..(1 << r) {
        let pattern: Vec<usize> = (1..=r).filter(|i| mask & (1 << (i - 1)) != 0).collect();
        let lead = pattern[0];
        if lead < min_s {
            continue; // |x| exceeds the subgroup; premise fails
        }
        let bad = pattern
            .iter()
            .any(|&i| i <= max_s && !group.indices().contains(&i));
        if bad {
            holds = false;
            let mut w = GroupElement::zero(r);
            for &i in &pattern {
                w.coords[i - 1] = Rat::one();
            }
            witness = Some(w);
            counterexample_pattern = Some(pattern);
            break;
        }
    }

    // Randomized confirmation on concrete rationals.
    let mut confirmations = 0;
    for _ in 0..samples {
        let x = random_element(r, rng);
        let lead = match x.leading_index() {
            Some(i) => i,
            None => continue,
        };
        if lead < min_s {
            continue;
        }
        // Exact criterion for this x, then a concrete approximation test.
        let approximable = x
            .support()
            .iter()
            .all(|&i| i > max_s || group.indices().contains(&i));
        let z = x.restrict(group.indices());
        let d = (&x - &z).abs();
        // Smallest-scale positive subgroup element at a random height.
        let eps = Rat::new(1, 1 + rng.random_range(0..1000i64));
        let g = GroupElement::axis(r, max_s, eps);
        if approximable {
            assert!(
                d.is_zero() || d < g,
                "pattern decision disagrees with witness for {x}"
            );
        } else {
            assert!(d > g, "pattern decision disagrees with witness for {x}");
        }
        confirmations += 1;
    }

    Condition4Report {
        holds,
        counterexample_pattern,
        witness,
        confirmations,
    }
}

/// Uniform small random element, used by the randomized confirmations.
fn random_element(rank: usize, rng: &mut impl Rng) -> GroupElement {
    let coords = (0..rank)
        .map(|_| {
            if rng.random_bool(0.4) {
                Rat::zero()
            } else {
                Rat::new(rng.random_range(-12..=12), rng.random_range(1..=4))
            }
        })
        .collect();
    GroupElement::new(coords)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn ge(coords: &[i64]) -> GroupElement {
        GroupElement::from_ints(coords)
    }

    fn sub(rank: usize, s: &[usize]) -> CoordSubgroup {
        CoordSubgroup::new(rank, s.iter().copied()).unwrap()
    }

    #[test]
    fn lex_compare_basic() {
        assert_eq!(lex_compare(&ge(&[0, 1]), &ge(&[1, 0])).unwrap(), Ordering::Less);
        assert_eq!(lex_compare(&ge(&[0, 0]), &ge(&[0, 0])).unwrap(), Ordering::Equal);
        assert_eq!(lex_compare(&ge(&[1, -5]), &ge(&[1, -4])).unwrap(), Ordering::Less);
        assert!(lex_compare(&ge(&[1]), &ge(&[1, 0])).is_err());
    }

    #[test]
    fn lex_total_order_random() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let a = random_element(3, &mut rng);
            let b = random_element(3, &mut rng);
            let c = random_element(3, &mut rng);
            // antisymmetry
            if a <= b && b <= a {
                assert_eq!(a, b);
            }
            // transitivity
            if a <= b && b <= c {
                assert!(a <= c);
            }
        }
    }

    #[test]
    fn coarsen_projects() {
        let g = GroupElement::new(vec![Rat::from_int(1), Rat::from_int(3), Rat::from_int(-2)]);
        let c = ConvexSubgroup::new(3, 1).unwrap();
        assert_eq!(coarsen_value(&g, &c), ge(&[1]));
        let c0 = ConvexSubgroup::new(3, 0).unwrap();
        assert_eq!(coarsen_value(&g, &c0).rank(), 0);
        let c1 = ConvexSubgroup::new(2, 1).unwrap();
        assert_eq!(coarsen_value(&ge(&[0, 5]), &c1), ge(&[0]));
    }

    #[test]
    fn cut_type_cases() {
        // support inside the axes
        assert_eq!(
            cut_type(&ge(&[0, 1]), &sub(2, &[2])).unwrap(),
            CutType::InGroup
        );
        // just above (0,1,0) over the middle axis
        assert_eq!(
            cut_type(&ge(&[0, 1, 5]), &sub(3, &[2])).unwrap(),
            CutType::PlusOf {
                below: ge(&[0, 1, 0])
            }
        );
        assert_eq!(
            cut_type(&ge(&[0, 1, -5]), &sub(3, &[2])).unwrap(),
            CutType::MinusOf {
                above: ge(&[0, 1, 0])
            }
        );
        // genuine cut over a non-contiguous subgroup
        assert_eq!(
            cut_type(&ge(&[0, 1, 0]), &sub(3, &[1, 3])).unwrap(),
            CutType::NonDefinableCut {
                near: ge(&[0, 0, 0]),
                sign: 1
            }
        );
        // beyond the subgroup on either side
        assert_eq!(cut_type(&ge(&[1, 0]), &sub(2, &[2])).unwrap(), CutType::AboveAll);
        assert_eq!(cut_type(&ge(&[-1, 0]), &sub(2, &[2])).unwrap(), CutType::BelowAll);
        // zero is always in the group, even the trivial one
        assert_eq!(
            cut_type(&ge(&[0, 0]), &CoordSubgroup::trivial(2)).unwrap(),
            CutType::InGroup
        );
        assert_eq!(
            cut_type(&ge(&[0, 2]), &CoordSubgroup::trivial(2)).unwrap(),
            CutType::AboveAll
        );
    }

    #[test]
    fn cut_type_lattice_denominators() {
        // 1/2 over integer exponents on a single axis: just above 0.
        let g = GroupElement::new(vec![Rat::new(1, 2)]);
        let got = cut_type_lattice(&g, &sub(1, &[1]), Some(&BigInt::from(1))).unwrap();
        assert_eq!(
            got,
            CutType::PlusOf {
                below: ge(&[0])
            }
        );
        // -1/2 floors to -1.
        let g = GroupElement::new(vec![Rat::new(-1, 2)]);
        let got = cut_type_lattice(&g, &sub(1, &[1]), Some(&BigInt::from(1))).unwrap();
        assert_eq!(
            got,
            CutType::PlusOf {
                below: ge(&[-1])
            }
        );
        // denominator obstruction with a later axis: genuine cut
        let g = GroupElement::new(vec![Rat::new(1, 2), Rat::zero()]);
        let got = cut_type_lattice(&g, &sub(2, &[1, 2]), Some(&BigInt::from(1))).unwrap();
        assert!(matches!(got, CutType::NonDefinableCut { .. }));
    }

    #[test]
    fn contiguity_examples() {
        let r = ms_contiguity(&sub(3, &[2, 3]));
        assert!(r.holds);
        let (c2, c1) = r.witnesses.unwrap();
        assert_eq!(c2.index(), 1);
        assert_eq!(c1.index(), 3);
        assert!(!ms_contiguity(&sub(3, &[1, 3])).holds);
        assert!(ms_contiguity(&CoordSubgroup::full(4)).holds);
    }

    #[test]
    fn condition4_examples() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        assert!(ms_condition4(&sub(3, &[2, 3]), 200, &mut rng).holds);
        let r = ms_condition4(&sub(3, &[1, 3]), 200, &mut rng);
        assert!(!r.holds);
        assert_eq!(r.counterexample_pattern, Some(vec![2]));
        assert_eq!(r.witness, Some(ge(&[0, 1, 0])));
        assert!(ms_condition4(&sub(1, &[1]), 50, &mut rng).holds);
    }

    #[test]
    fn contiguity_matches_condition4_exhaustively() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for r in 1..=5usize {
            for mask in 0u32..(1 << r) {
                let s: Vec<usize> = (1..=r).filter(|i| mask & (1 << (i - 1)) != 0).collect();
                let g = CoordSubgroup::new(r, s).unwrap();
                assert_eq!(
                    ms_contiguity(&g).holds,
                    ms_condition4(&g, 20, &mut rng).holds,
                    "disagree on {g:?}"
                );
            }
        }
    }

    #[test]
    fn cut_alignment_with_contiguity() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for r in 1..=4usize {
            for mask in 1u32..(1 << r) {
                let s: Vec<usize> = (1..=r).filter(|i| mask & (1 << (i - 1)) != 0).collect();
                let g = CoordSubgroup::new(r, s).unwrap();
                let contiguous = ms_contiguity(&g).holds;
                if contiguous {
                    for _ in 0..300 {
                        let x = random_element(r, &mut rng);
                        assert!(cut_type(&x, &g).unwrap().is_definable());
                    }
                } else {
                    // a gap axis realizes a genuine cut
                    let (min, max) = (g.min_index().unwrap(), g.max_index().unwrap());
                    let gap = (min..=max).find(|i| !g.indices().contains(i)).unwrap();
                    let x = GroupElement::axis(r, gap, Rat::one());
                    assert!(!cut_type(&x, &g).unwrap().is_definable());
                }
            }
        }
    }

    #[test]
    fn group_element_json() {
        let g = GroupElement::new(vec![Rat::new(1, 2), Rat::from_int(-3)]);
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"["1/2","-3"]"#);
        let back: GroupElement = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
    }
}
