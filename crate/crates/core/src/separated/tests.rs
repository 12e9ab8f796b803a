use super::*;
use crate::search::{in_search, SearchOutcome};
use crate::subfield::WitnessPolicy;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

fn ge(c: &[i64]) -> GroupElement {
    GroupElement::from_ints(c)
}

fn mono(c: &[i64]) -> TruncatedSeries {
    TruncatedSeries::monomial(ge(c), RatFunc::one())
}

/// Rank-1 field generated by X with full rational exponents (den <= 2).
fn k_x() -> SubfieldDescription {
    let mut gens = BTreeMap::new();
    gens.insert("X".to_string(), mono(&[1]));
    SubfieldDescription::new(
        "K",
        gens,
        CoordSubgroup::full(1),
        [],
        WitnessPolicy::default(),
    )
    .unwrap()
}

/// Rank-1 trivially valued field: the rationals.
fn k_q() -> SubfieldDescription {
    SubfieldDescription::new(
        "Q",
        BTreeMap::new(),
        CoordSubgroup::trivial(1),
        [],
        WitnessPolicy::default(),
    )
    .unwrap()
}

/// Rank-2 field with X, Y and residue generators t1, t2.
fn k_xyt() -> SubfieldDescription {
    let mut gens = BTreeMap::new();
    gens.insert("X".to_string(), mono(&[0, 1]));
    gens.insert("Y".to_string(), mono(&[1, 0]));
    gens.insert(
        "t1".to_string(),
        TruncatedSeries::constant(2, RatFunc::var(1)),
    );
    gens.insert(
        "t2".to_string(),
        TruncatedSeries::constant(2, RatFunc::var(2)),
    );
    SubfieldDescription::new(
        "K",
        gens,
        CoordSubgroup::full(2),
        [1, 2],
        WitnessPolicy::default(),
    )
    .unwrap()
}

/// Rank-2 field generated by Y only (first axis).
fn k_y_only() -> SubfieldDescription {
    let mut gens = BTreeMap::new();
    gens.insert("Y".to_string(), mono(&[1, 0]));
    SubfieldDescription::new(
        "KY",
        gens,
        CoordSubgroup::new(2, [1]).unwrap(),
        [],
        WitnessPolicy::default(),
    )
    .unwrap()
}

#[test]
fn independent_residues_are_separated() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let k = k_x();
    // (1, tau_1): residues 1 and tau_1 independent over Q
    let ys = vec![
        TruncatedSeries::one(1),
        TruncatedSeries::constant(1, RatFunc::var(1)),
    ];
    let r = is_separated(&ys, &k, 500, &mut rng).unwrap();
    assert!(r.separated);
    assert!(r.sampled > 0);
}

#[test]
fn cancellation_is_caught_with_certificate() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let k = k_x();
    // (1, 1+X) over a field containing X: k = (1, -1) cancels
    let ys = vec![
        TruncatedSeries::one(1),
        TruncatedSeries::one(1).add(&mono(&[1])).unwrap(),
    ];
    let r = is_separated(&ys, &k, 100, &mut rng).unwrap();
    assert!(!r.separated);
    let v = r.violation.unwrap();
    // a unit tuple (up to sign) with per-term valuations 0 and a jump
    assert!(v.coeffs.iter().all(|c| !c.is_exact_zero()));
    assert_eq!(v.expected_min, Val::Finite(ge(&[0])));
    match &v.combo_val {
        ValBound::Exact(val) => assert!(*val > v.expected_min),
        ValBound::AtLeast(t) => assert!(Val::Finite(t.clone()) > v.expected_min),
    }
    // re-verify the certificate from raw arithmetic
    let mut combo = TruncatedSeries::zero(1);
    for (c, y) in v.coeffs.iter().zip(&ys) {
        assert_eq!(c.mul(y).unwrap().val().unwrap(), ge(&[0]));
        combo = combo.add(&c.mul(y).unwrap()).unwrap();
    }
    assert!(combo.valuation().map(|x| x > Val::Finite(ge(&[0]))).unwrap_or(true));
}

#[test]
fn section_three_sequence_is_separated() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let k = {
        // base field k(X,Y) without the t's
        let mut gens = BTreeMap::new();
        gens.insert("X".to_string(), mono(&[0, 1]));
        gens.insert("Y".to_string(), mono(&[1, 0]));
        SubfieldDescription::new(
            "K",
            gens,
            CoordSubgroup::full(2),
            [],
            WitnessPolicy::default(),
        )
        .unwrap()
    };
    // (1, t1, t2) with residues 1, tau_1, tau_2
    let ys = vec![
        TruncatedSeries::one(2),
        TruncatedSeries::constant(2, RatFunc::var(1)),
        TruncatedSeries::constant(2, RatFunc::var(2)),
    ];
    assert!(is_separated(&ys, &k, 200, &mut rng).unwrap().separated);
}

#[test]
fn basis_one_elimination_step() {
    // (1, 1+X) over the rationals: basis (1, X)
    let k = k_q();
    let xs = vec![
        TruncatedSeries::one(1),
        TruncatedSeries::one(1).add(&mono(&[1])).unwrap(),
    ];
    match separated_basis(&xs, &k, 16).unwrap() {
        SeparatedBasisOutcome::Basis(b) => {
            assert_eq!(b.len(), 2);
            let mut rng = ChaCha8Rng::seed_from_u64(4);
            assert!(is_separated(&b, &k, 200, &mut rng).unwrap().separated);
            // span check: both originals are expressible
            for x in &xs {
                let (coeffs, q) = express_in_basis(x, &b, &k, 32).unwrap();
                assert_eq!(q, ExpressQuality::Exact);
                let mut acc = TruncatedSeries::zero(1);
                for (c, bi) in coeffs.iter().zip(&b) {
                    acc = acc.add(&c.mul(bi).unwrap()).unwrap();
                }
                assert_eq!(&acc, x);
            }
            // the eliminated element became the monomial X
            assert!(b.contains(&mono(&[1])));
        }
        o => panic!("expected a basis, got {o:?}"),
    }
}

#[test]
fn dimension_drop_when_members_coincide() {
    // (1, 1+X) over a field containing X: the span is one-dimensional
    let k = k_x();
    let xs = vec![
        TruncatedSeries::one(1),
        TruncatedSeries::one(1).add(&mono(&[1])).unwrap(),
    ];
    match separated_basis(&xs, &k, 16).unwrap() {
        SeparatedBasisOutcome::Basis(b) => assert_eq!(b.len(), 1),
        o => panic!("expected a basis, got {o:?}"),
    }
}

#[test]
fn distinct_cosets_left_unchanged() {
    // (Y, X*Y) over the field generated by Y alone: value coset trick
    let k = k_y_only();
    let xs = vec![mono(&[1, 0]), mono(&[1, 1])];
    match separated_basis(&xs, &k, 16).unwrap() {
        SeparatedBasisOutcome::Basis(b) => assert_eq!(b, xs),
        o => panic!("expected unchanged basis, got {o:?}"),
    }
}

/// The scenario's non-separated core: t3 = f1 t1 + f2 t2 + f3 truncated,
/// over the base field containing X.
fn section_three_family(depth: i64) -> (SubfieldDescription, Vec<TruncatedSeries>) {
    let mut gens = BTreeMap::new();
    gens.insert("X".to_string(), mono(&[1]));
    let k = SubfieldDescription::new(
        "K",
        gens,
        CoordSubgroup::full(1),
        [],
        WitnessPolicy {
            max_degree: 3,
            max_height: 3,
            max_exp_denominator: 1,
            max_terms: 2,
        },
    )
    .unwrap();
    // f1 = 1 + X^2 + X^4 + ..., f2 = 1 + X^3 + X^5 + ... (disjoint gaps)
    let mut f1 = TruncatedSeries::one(1);
    let mut f2 = TruncatedSeries::one(1);
    for m in 1..=depth {
        f1 = f1.add(&mono(&[2 * m])).unwrap();
        f2 = f2.add(&mono(&[2 * m + 1])).unwrap();
    }
    let horizon = ge(&[2 * depth + 2]);
    let f1 = f1.truncate(horizon.clone());
    let f2 = f2.truncate(horizon);
    let t1 = TruncatedSeries::constant(1, RatFunc::var(1));
    let t2 = f1.scale(&RatFunc::var(1)).add(&f2).unwrap();
    (k, vec![TruncatedSeries::one(1), t1, t2])
}

#[test]
fn non_separated_family_yields_failure_chain() {
    let (k, ys) = section_three_family(6);
    match separated_basis(&ys, &k, 8).unwrap() {
        SeparatedBasisOutcome::FailureChain(chain) => {
            assert!(chain.len() >= 4);
            for w in chain.windows(2) {
                assert!(w[0] < w[1], "chain must strictly increase");
            }
            // gaps alternate between the two schedules: 2, 3, 4, 5, ...
            assert_eq!(chain[0], ge(&[2]));
            assert_eq!(chain[1], ge(&[3]));
        }
        o => panic!("expected failure chain, got {o:?}"),
    }
    // the same data drives an unbounded distance search
    let (k, ys) = section_three_family(6);
    match in_search(&ys[2], &[ys[0].clone(), ys[1].clone()], &k, 6).unwrap() {
        SearchOutcome::NoMaxUpToBound { chain } => {
            assert!(chain.len() >= 4);
        }
        o => panic!("expected NoMaxUpToBound, got {o:?}"),
    }
}

#[test]
fn decompose_simple_polynomial() {
    // P = (1+X) u + X u^2 over the rationals; l = basis of span{1+X, X}
    let k = k_q();
    let p = SeriesPolynomial::from_terms(vec![
        (
            Monomial::var(1),
            TruncatedSeries::one(1).add(&mono(&[1])).unwrap(),
        ),
        (Monomial::var(1).mul(&Monomial::var(1)), mono(&[1])),
    ]);
    let dec = decompose_polynomial(&p, &k, 32).unwrap();
    assert_eq!(dec.basis.len(), 2);
    assert_eq!(dec.recombine().unwrap(), p);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    assert!(is_separated(&dec.basis, &k, 100, &mut rng).unwrap().separated);
}

#[test]
fn decompose_all_in_k() {
    // coefficients already in K: basis is a single element
    let k = k_x();
    let p = SeriesPolynomial::from_terms(vec![(
        Monomial::var(1),
        mono(&[2]).add(&mono(&[3])).unwrap(),
    )]);
    let dec = decompose_polynomial(&p, &k, 32).unwrap();
    assert_eq!(dec.basis.len(), 1);
    assert_eq!(dec.recombine().unwrap(), p);
}

#[test]
fn decompose_non_separated_fails_with_chain() {
    let (k, ys) = section_three_family(6);
    let p = SeriesPolynomial::from_terms(vec![
        (Monomial::one(), ys[1].clone()),
        (Monomial::var(1), ys[2].clone()),
        (Monomial::var(1).mul(&Monomial::var(1)), ys[0].clone()),
    ]);
    match decompose_polynomial(&p, &k, 8) {
        Err(SepError::SeparationFailure(chain)) => assert!(!chain.is_empty()),
        o => panic!("expected separation failure, got {o:?}"),
    }
}

#[test]
fn inequality_min_identity_and_disjuncts() {
    // P = u + X u (coefficient 1+X), Q = 1 over the rationals
    let k = k_q();
    let p = SeriesPolynomial::from_terms(vec![(
        Monomial::var(1),
        TruncatedSeries::one(1).add(&mono(&[1])).unwrap(),
    )]);
    let q = SeriesPolynomial::from_terms(vec![(Monomial::one(), TruncatedSeries::one(1))]);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let r = trace_inequality(&p, &q, &k, 50, 1, &mut rng, 32).unwrap();
    assert_eq!(r.min_equality_violations, 0);
    assert!(r.samples > 0);
    assert!(!r.non_definable_parameter);
    assert!(r.disjuncts.len() <= 1, "one active disjunct expected");

    // P = Q: holds everywhere
    let r = trace_inequality(&p, &p, &k, 30, 1, &mut rng, 32).unwrap();
    assert_eq!(r.min_equality_violations, 0);
    assert_eq!(r.holds_on, r.samples);
}

#[test]
fn inequality_flags_non_definable_parameter() {
    // rank 3, K on axes {1,3}: a coefficient with valuation e_2 sits in a
    // genuine cut over vK
    let mut gens = BTreeMap::new();
    gens.insert("A".to_string(), mono(&[1, 0, 0]));
    gens.insert("C".to_string(), mono(&[0, 0, 1]));
    let k = SubfieldDescription::new(
        "K13",
        gens,
        CoordSubgroup::new(3, [1, 3]).unwrap(),
        [],
        WitnessPolicy::default(),
    )
    .unwrap();
    let p = SeriesPolynomial::from_terms(vec![
        (Monomial::var(1), mono(&[0, 1, 0])),
        (Monomial::one(), TruncatedSeries::one(3)),
    ]);
    let q = SeriesPolynomial::from_terms(vec![(Monomial::one(), TruncatedSeries::one(3))]);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let r = trace_inequality(&p, &q, &k, 20, 1, &mut rng, 32).unwrap();
    assert_eq!(r.min_equality_violations, 0);
    assert!(
        r.non_definable_parameter,
        "the middle axis valuation cuts over vK on axes 1 and 3"
    );
}

#[test]
fn transfer_passes_on_separated_family() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    // base field k(X, Y) with residue field Q: tau_1 stays outside
    let mut gens = BTreeMap::new();
    gens.insert("X".to_string(), mono(&[0, 1]));
    gens.insert("Y".to_string(), mono(&[1, 0]));
    let k = SubfieldDescription::new(
        "K",
        gens,
        CoordSubgroup::full(2),
        [],
        WitnessPolicy::default(),
    )
    .unwrap();
    // (1, t1, Y*t2): residues 1, tau_1 independent over Q; the third
    // element sits at the coarse level of Y and stays K-independent
    let ys = vec![
        TruncatedSeries::one(2),
        TruncatedSeries::constant(2, RatFunc::var(1)),
        mono(&[1, 0]).scale(&RatFunc::var(2)),
    ];
    let c = ConvexSubgroup::new(2, 1).unwrap();
    let r = sepquotient_transfer(&ys, &k, &c, 60, &mut rng).unwrap();
    assert_eq!(r.coarse_violations, 0);
    assert!(r.coarse_sampled > 0);
    assert!(r.groups.iter().all(|g| g.quotient_separated));
    assert_eq!(r.groups.len(), 2, "levels 0 and v(Y)");
    assert!(r.lifting_separated);
}

#[test]
fn transfer_rejects_non_separated_input() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let k = {
        let mut gens = BTreeMap::new();
        gens.insert("X".to_string(), mono(&[0, 1]));
        gens.insert("Y".to_string(), mono(&[1, 0]));
        SubfieldDescription::new(
            "K",
            gens,
            CoordSubgroup::full(2),
            [],
            WitnessPolicy::default(),
        )
        .unwrap()
    };
    let ys = vec![
        TruncatedSeries::one(2),
        TruncatedSeries::one(2).add(&mono(&[0, 1])).unwrap(),
    ];
    let c = ConvexSubgroup::new(2, 1).unwrap();
    assert!(matches!(
        sepquotient_transfer(&ys, &k, &c, 20, &mut rng),
        Err(SepError::NotVSeparated)
    ));
}

#[test]
fn quotient_subfield_structure() {
    let k = k_xyt();
    let c = ConvexSubgroup::new(2, 1).unwrap();
    let kq = quotient_subfield(&k, &c).unwrap();
    assert_eq!(kq.rank(), 1);
    // X descends, Y does not
    assert!(kq.generators().contains_key("X"));
    assert!(!kq.generators().contains_key("Y"));
    assert_eq!(
        kq.value_coords().indices().iter().copied().collect::<Vec<_>>(),
        vec![1]
    );
}
