//! Acceptance suite: one test per criterion, each printing a PASS line
//! with its timing. All arithmetic checks are exact (zero tolerance).
//!
//! Run with `cargo test -p valfield --test acceptance -- --nocapture`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use valfield::{
    build_scenario, check_c_axioms, claim1_cofinality, claim2_subsets, classify_last,
    classify_point, cut_type_lattice, is_separated, ms_condition4, ms_contiguity, newton_polygon,
    separated_basis, sepquotient_transfer, trace_ball, trace_inequality, Ball, BallKind,
    BallRadius, ConvexSubgroup, CoordSubgroup, CutType, ExpressQuality, GroupElement, Monomial,
    Rat, RatFunc, SeparatedBasisOutcome, SeriesPolynomial, SubfieldDescription, TraceResult,
    TruncatedSeries, TypeVerdict, Val, WitnessPolicy,
};

fn ge(coords: &[i64]) -> GroupElement {
    GroupElement::from_ints(coords)
}

fn mono(coords: &[i64]) -> TruncatedSeries {
    TruncatedSeries::monomial(ge(coords), RatFunc::one())
}

fn pass(id: u32, title: &str, start: Instant, limit: Option<Duration>) {
    let elapsed = start.elapsed();
    if let Some(limit) = limit {
        assert!(
            elapsed < limit,
            "criterion {id} exceeded its time limit: {elapsed:?} >= {limit:?}"
        );
    }
    println!("acceptance {id} ({title}): PASS in {elapsed:.2?}");
}

/// Random exact series with bounded terms, rank 1 or 2, small rational
/// exponents and rational-function coefficients.
fn random_series(rng: &mut ChaCha8Rng, rank: usize, max_terms: usize) -> TruncatedSeries {
    let n = rng.random_range(0..=max_terms);
    let mut s = TruncatedSeries::zero(rank);
    for _ in 0..n {
        let coords: Vec<Rat> = (0..rank)
            .map(|_| Rat::new(rng.random_range(-10..=10), rng.random_range(1..=2)))
            .collect();
        let coef = match rng.random_range(0..4) {
            0 => RatFunc::from_int(rng.random_range(1..=6)),
            1 => RatFunc::from_int(-rng.random_range(1..=6)),
            2 => RatFunc::constant(Rat::new(rng.random_range(1..=5), rng.random_range(2..=5))),
            _ => RatFunc::var(rng.random_range(1..=2)),
        };
        s = s
            .add(&TruncatedSeries::monomial(GroupElement::new(coords), coef))
            .expect("equal ranks");
    }
    s
}

/// Criterion 1: valuation laws on 1000 random pairs, exact, under 10 s.
#[test]
fn acceptance_01_ultrametric_laws() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut checked = 0;
    for i in 0..1000 {
        let rank = 1 + (i % 2);
        let a = random_series(&mut rng, rank, 12);
        let b = random_series(&mut rng, rank, 12);
        let va = a.valuation().expect("exact input");
        let vb = b.valuation().expect("exact input");
        let vprod = a.mul(&b).expect("rank").valuation().expect("exact");
        assert_eq!(vprod, va.add(&vb), "v(ab) = v(a) + v(b)");
        let vsum = a.add(&b).expect("rank").valuation().expect("exact");
        let min = va.clone().min(vb.clone());
        assert!(vsum >= min, "v(a+b) >= min(v(a), v(b))");
        if va != vb {
            assert_eq!(vsum, min, "equality when valuations differ");
        }
        checked += 1;
    }
    assert_eq!(checked, 1000);
    pass(1, "ultrametric and valuation laws", start, Some(Duration::from_secs(10)));
}

/// Criterion 2: the four axioms plus density, exhaustively on a curated
/// 8-element sample and on 10^4 random triples.
#[test]
fn acceptance_02_c_axioms() {
    let start = Instant::now();
    let x = mono(&[0, 1]);
    let y = mono(&[1, 0]);
    let curated = vec![
        TruncatedSeries::zero(2),
        TruncatedSeries::one(2),
        x.clone(),
        x.mul(&x).unwrap(),
        y.clone(),
        y.add(&x).unwrap(),
        TruncatedSeries::constant(2, RatFunc::var(1)),
        x.add(&x.mul(&x).unwrap()).unwrap(),
    ];
    assert_eq!(curated.len(), 8);
    let report = check_c_axioms(&curated);
    assert!(report.ok(), "violations: {:?}", report.violations);
    assert_eq!(report.indeterminate, 0);
    assert!(report.density_witnesses >= 8 * 7, "(D) witnessed per ordered pair");

    // random triples from a fresh pool each round
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let rel = |a: &TruncatedSeries, b: &TruncatedSeries, c: &TruncatedSeries| -> bool {
        valfield::c_rel(a, b, c).expect("exact pool")
    };
    for _ in 0..10_000 {
        let p: Vec<TruncatedSeries> = (0..4).map(|_| random_series(&mut rng, 2, 4)).collect();
        let (x, y, z, w) = (&p[0], &p[1], &p[2], &p[3]);
        if rel(x, y, z) {
            assert!(rel(x, z, y), "C1");
            assert!(!rel(y, x, z), "C2");
            assert!(rel(w, y, z) || rel(x, w, z), "C3");
        }
        let d = x.sub(y).unwrap();
        if !d.is_exact_zero() {
            assert!(rel(x, y, y), "C4");
            // constructive density witness
            let gamma = d.val().unwrap();
            let bump = GroupElement::axis(2, 2, Rat::one());
            let zw = y
                .add(&TruncatedSeries::monomial(&gamma + &bump, RatFunc::one()))
                .unwrap();
            assert!(rel(x, y, &zw), "(D) witness");
        }
    }
    pass(2, "C-relation axioms with density", start, None);
}

/// Criterion 3: contiguity and the approximation criterion agree on all
/// 62 coordinate subgroups of rank <= 5, under 5 s.
#[test]
fn acceptance_03_group_criteria_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let mut cases = 0;
    for r in 1..=5usize {
        for mask in 0u32..(1 << r) {
            let s: Vec<usize> = (1..=r).filter(|i| mask & (1 << (i - 1)) != 0).collect();
            let g = CoordSubgroup::new(r, s).expect("valid axes");
            let a = ms_contiguity(&g).holds;
            let b = ms_condition4(&g, 12, &mut rng).holds;
            assert_eq!(a, b, "criteria disagree on {g:?}");
            cases += 1;
        }
    }
    assert_eq!(cases, 62);
    pass(3, "62 subgroup criteria equivalences", start, Some(Duration::from_secs(5)));
}

fn axis_field(name: &str, rank: usize, axes: &[usize]) -> SubfieldDescription {
    let mut gens = BTreeMap::new();
    for &a in axes {
        let mut coords = vec![0i64; rank];
        coords[a - 1] = 1;
        gens.insert(format!("g{a}"), mono(&coords));
    }
    SubfieldDescription::new(
        name,
        gens,
        CoordSubgroup::new(rank, axes.iter().copied()).unwrap(),
        [],
        WitnessPolicy::default(),
    )
    .unwrap()
}

/// Criterion 4: ball traces against direct membership on four subfields,
/// 500 balls, 100 witnesses each; the non-definability flag must match
/// the contiguity of the subfield's axes.
#[test]
fn acceptance_04_trace_correctness() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let fields = vec![
        axis_field("K_full2", 2, &[1, 2]),
        axis_field("K_mid3", 3, &[2]),
        axis_field("K_gap3", 3, &[1, 3]),
        axis_field("K_gap4", 4, &[1, 2, 4]),
    ];
    let mut total_balls = 0;
    for k in &fields {
        let rank = k.rank();
        let contiguous = ms_contiguity(k.value_coords()).holds;
        let witnesses: Vec<TruncatedSeries> = (0..100).map(|_| k.sample(&mut rng)).collect();
        assert_eq!(witnesses.len(), 100);
        let mut saw_not_definable = false;

        let mut balls: Vec<Ball> = Vec::new();
        // a few curated radii guaranteed to probe every axis pattern
        for target in 1..=rank {
            let mut coords = vec![0i64; rank];
            coords[target - 1] = 1;
            if rank > target {
                coords[rank - 1] = 2;
            }
            balls.push(Ball::closed(TruncatedSeries::zero(rank), ge(&coords)));
        }
        while balls.len() < 125 {
            let center = k.sample(&mut rng);
            let coords: Vec<Rat> = (0..rank)
                .map(|_| {
                    if rng.random_bool(0.35) {
                        Rat::zero()
                    } else {
                        Rat::new(rng.random_range(-6..=6), rng.random_range(1..=2))
                    }
                })
                .collect();
            let radius = GroupElement::new(coords);
            let kind = if rng.random_bool(0.5) {
                BallKind::Closed
            } else {
                BallKind::Open
            };
            balls.push(Ball {
                center,
                radius: BallRadius::Finite(radius),
                kind,
            });
        }
        total_balls += balls.len();

        for ball in &balls {
            let trace = trace_ball(ball, k, 24).expect("trace total on exact data");
            let BallRadius::Finite(radius) = &ball.radius else {
                unreachable!()
            };
            let cut = cut_type_lattice(
                radius,
                k.value_coords(),
                Some(&k.policy().denominator_lcm()),
            )
            .unwrap();
            // NotDefinable exactly at genuine cuts
            match &trace {
                TraceResult::NotDefinable(_) => {
                    saw_not_definable = true;
                    assert!(
                        matches!(cut, CutType::NonDefinableCut { .. }),
                        "NotDefinable must come from a genuine cut"
                    );
                }
                _ => assert!(
                    !matches!(cut, CutType::NonDefinableCut { .. }),
                    "genuine cut must trace NotDefinable (ball {ball:?})"
                ),
            }
            // membership equivalence on every witness
            if !matches!(trace, TraceResult::NotDefinable(_)) {
                for w in &witnesses {
                    let direct = ball.contains(w).expect("exact");
                    let traced = trace.contains(w).expect("exact").expect("definable");
                    assert_eq!(direct, traced, "ball {ball:?}, witness {w}");
                }
            }
        }
        assert_eq!(
            saw_not_definable, !contiguous,
            "non-definability flag must match contiguity for {}",
            k.name()
        );
    }
    assert_eq!(total_balls, 500);
    pass(4, "ball trace correctness on 500 balls", start, None);
}

/// Base field for the separated-basis and decomposition criteria:
/// integer-exponent fragment of Q(X) in rank 1.
fn k_x_rank1() -> SubfieldDescription {
    let mut gens = BTreeMap::new();
    gens.insert("X".to_string(), mono(&[1]));
    SubfieldDescription::new(
        "K",
        gens,
        CoordSubgroup::full(1),
        [],
        WitnessPolicy {
            max_degree: 2,
            max_height: 3,
            max_exp_denominator: 2,
            max_terms: 2,
        },
    )
    .unwrap()
}

/// Seed tuple that is separated and K-linearly independent by
/// construction: each member carries a distinct residue marker, so no
/// ratio of members lies in K.
fn seed_tuple() -> Vec<TruncatedSeries> {
    vec![
        TruncatedSeries::one(1),
        TruncatedSeries::constant(1, RatFunc::var(1)),
        TruncatedSeries::constant(1, RatFunc::var(2)),
        TruncatedSeries::monomial(GroupElement::new(vec![Rat::new(1, 2)]), RatFunc::var(3)),
    ]
}

/// Criterion 5: separated bases of 200 random spanning sets: output
/// passes the residue criterion plus 500-tuple sampling and spans the
/// input exactly.
#[test]
fn acceptance_05_separated_basis_soundness() {
    let start = Instant::now();
    let k = k_x_rank1();
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    for case in 0..200 {
        let dim = 2 + (case % 3); // 2..=4
        let mut xs: Vec<TruncatedSeries> = seed_tuple().into_iter().take(dim).collect();
        // random span-preserving recombinations and unit scalings
        for _ in 0..rng.random_range(1..=3) {
            let i = rng.random_range(0..xs.len());
            let mut j = rng.random_range(0..xs.len());
            if i == j {
                j = (j + 1) % xs.len();
            }
            let coeff = k.sample(&mut rng);
            xs[i] = xs[i].add(&coeff.mul(&xs[j]).unwrap()).unwrap();
            let m = rng.random_range(-2..=2);
            let unit = TruncatedSeries::monomial(ge(&[m]), RatFunc::from_int(1));
            let sign = if rng.random_bool(0.5) { 1 } else { -1 };
            xs[i] = xs[i].mul(&unit.scale(&RatFunc::from_int(sign))).unwrap();
        }
        xs.retain(|x| !x.is_exact_zero());
        let basis = match separated_basis(&xs, &k, 64).expect("elimination succeeds") {
            SeparatedBasisOutcome::Basis(b) => b,
            SeparatedBasisOutcome::FailureChain(c) => {
                panic!("spanning set {case} unexpectedly non-separated: {c:?}")
            }
        };
        let check = is_separated(&basis, &k, 500, &mut rng).expect("check runs");
        assert!(check.separated, "basis fails the residue criterion");
        assert!(check.sampled >= 400, "sampling confirmation ran");
        // span preservation: every input is an exact combination
        for x in &xs {
            let (coeffs, quality) =
                valfield::express_in_basis(x, &basis, &k, 128).expect("in span");
            assert_eq!(quality, ExpressQuality::Exact);
            let mut acc = TruncatedSeries::zero(1);
            for (c, b) in coeffs.iter().zip(&basis) {
                acc = acc.add(&c.mul(b).unwrap()).unwrap();
            }
            assert_eq!(&acc, x, "recombination must reproduce the input");
        }
    }
    pass(5, "separated bases of 200 spanning sets", start, None);
}

/// Criterion 6: both transfer directions along the coarsening on 100
/// separated families over rank-2 values.
#[test]
fn acceptance_06_coarsening_transfer() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let mut gens = BTreeMap::new();
    gens.insert("X".to_string(), mono(&[0, 1]));
    gens.insert("Y".to_string(), mono(&[1, 0]));
    let k = SubfieldDescription::new(
        "Kxy",
        gens,
        CoordSubgroup::full(2),
        [],
        WitnessPolicy::default(),
    )
    .unwrap();
    let c = ConvexSubgroup::new(2, 1).unwrap();
    for case in 0..100 {
        let size = 2 + (case % 3);
        // distinct residues keep the family separated by construction
        let family: Vec<TruncatedSeries> = (0..size)
            .map(|i| {
                let residue = if i == 0 {
                    RatFunc::one()
                } else {
                    RatFunc::var(i)
                };
                let exp = GroupElement::new(vec![
                    Rat::from_int(rng.random_range(-1..=1)),
                    Rat::new(rng.random_range(-4..=4), rng.random_range(1..=2)),
                ]);
                TruncatedSeries::monomial(exp, residue)
            })
            .collect();
        let report = sepquotient_transfer(&family, &k, &c, 48, &mut rng)
            .expect("transfer runs on separated data");
        assert_eq!(report.coarse_violations, 0, "coarse direction violated");
        assert!(
            report.groups.iter().all(|g| g.quotient_separated),
            "quotient residue families must be separated"
        );
        assert!(report.lifting_separated, "lifted family must be separated");
    }
    pass(6, "coarsening transfer on 100 families", start, None);
}

/// Criterion 7: the full tower at n = 1 and n = 2, depth 10: exact
/// multiples of v(X) achieved, no ceiling violations over 10^4 sampled
/// witnesses, subsets separated, full-set failure chain agreeing with the
/// achieved truncation chain. Under 60 s total.
#[test]
fn acceptance_07_counterexample_tower() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    for (n, trunc_order) in [(1usize, 5041u64), (2, 39_916_801)] {
        let s = build_scenario(n, trunc_order, None).expect("scenario builds");
        let c1 = claim1_cofinality(&s, 10, 10_000, &mut rng).expect("cofinality runs");
        let expect: Vec<GroupElement> = (1..=10).map(|m| ge(&[0, m])).collect();
        assert_eq!(c1.achieved, expect, "n={n}: exact multiples of v(X)");
        assert!(
            c1.ceiling_violations.is_empty(),
            "n={n}: no valuation may reach the v(Y) scale"
        );
        assert!(c1.ceiling_sampled + c1.indeterminate == 10_000);

        let c2 = claim2_subsets(&s, n, 40, &mut rng).expect("subset checks run");
        assert!(
            c2.all_subsets_separated(),
            "n={n}: every subset of size <= n separates"
        );
        let expected_subsets = (1u32 << (n + 1)) - 2; // all nonempty sizes <= n
        assert_eq!(
            c2.subsets.len() as u32,
            expected_subsets,
            "n={n}: subset count"
        );
        assert!(!c2.full_chain.is_empty(), "n={n}: full set must fail");
        assert!(
            c2.full_chain.windows(2).all(|w| w[0] < w[1]),
            "n={n}: failure chain strictly increases"
        );
        // the failure chain and the achieved truncation chain agree as
        // sets up to the common depth
        let common = c1.truncation_chain.len().min(c2.full_chain.len());
        assert_eq!(
            &c1.truncation_chain[..common],
            &c2.full_chain[..common],
            "n={n}: chains agree up to depth {common}"
        );

        match classify_last(&s, 12).expect("classification runs") {
            TypeVerdict::LimitEvidence { .. } | TypeVerdict::Exhausted => {}
            v => panic!("n={n}: classification must stay immediate, got {v:?}"),
        }
    }
    pass(7, "tower at n=1 and n=2, depth 10", start, Some(Duration::from_secs(60)));
}

/// Criterion 8: the coefficient-space decomposition identity
/// v(P(x)) = min_i v(l_i p_i(x)) on 50 random pairs x 200 points.
#[test]
fn acceptance_08_decomposition_identity() {
    let start = Instant::now();
    let k = k_x_rank1();
    let mut rng = ChaCha8Rng::seed_from_u64(108);
    // pool with one non-lattice valuation so the basis parameters also
    // exercise the cut classification
    let pool = vec![
        TruncatedSeries::one(1),
        TruncatedSeries::constant(1, RatFunc::var(1)),
        TruncatedSeries::monomial(GroupElement::new(vec![Rat::new(1, 3)]), RatFunc::var(2)),
    ];
    let mut random_poly = |rng: &mut ChaCha8Rng, nvars: usize| -> SeriesPolynomial {
        let mut terms: BTreeMap<Monomial, TruncatedSeries> = BTreeMap::new();
        let nterms = rng.random_range(1..=3);
        for t in 0..nterms {
            let mono = {
                let mut exps = vec![0u32; nvars];
                let mut degree_left = 3u32;
                for e in exps.iter_mut() {
                    *e = rng.random_range(0..=degree_left);
                    degree_left -= *e;
                }
                Monomial::from_exponents(exps)
            };
            // triangular combination with a unit pivot: the coefficient
            // list stays K-linearly independent, span dimension <= 3
            let pivot = t % pool.len();
            let mut coef = pool[pivot].clone();
            for l in pool.iter().take(pivot) {
                if rng.random_bool(0.5) {
                    let c = k.sample(rng);
                    coef = coef.add(&c.mul(l).unwrap()).unwrap();
                }
            }
            terms.insert(mono, coef);
        }
        SeriesPolynomial::from_terms(terms)
    };
    let mut total_samples = 0;
    for case in 0..50 {
        let nvars = 1 + (case % 2);
        let p = random_poly(&mut rng, nvars);
        let q = random_poly(&mut rng, nvars);
        let report = trace_inequality(&p, &q, &k, 200, nvars, &mut rng, 64)
            .expect("decomposition succeeds on separated spans");
        assert_eq!(
            report.min_equality_violations, 0,
            "case {case}: min identity must hold exactly"
        );
        total_samples += report.samples;
        assert!(!report.basis.is_empty());
    }
    assert!(total_samples >= 50 * 150, "sampling actually ran");
    pass(8, "decomposition identity on 50 pairs x 200 points", start, None);
}

/// Criterion 9: the curated classifier suite with verdicts stable under
/// doubling the budget.
#[test]
fn acceptance_09_classifier_suite() {
    let start = Instant::now();
    let mut gens = BTreeMap::new();
    gens.insert("X".to_string(), mono(&[1]));
    let k = SubfieldDescription::new(
        "K",
        gens,
        CoordSubgroup::full(1),
        [],
        WitnessPolicy {
            max_degree: 3,
            max_height: 4,
            max_exp_denominator: 1,
            max_terms: 3,
        },
    )
    .unwrap();
    let mut fact = 1i64;
    let mut limit_series = TruncatedSeries::zero(1);
    for j in 1..=6 {
        fact *= j;
        limit_series = limit_series.add(&mono(&[fact])).unwrap();
    }
    let limit_series = limit_series.truncate(ge(&[5040]));
    let cases: Vec<(&str, TruncatedSeries, &str)> = vec![
        (
            "residue generator",
            TruncatedSeries::constant(1, RatFunc::var(1)),
            "residual",
        ),
        (
            "half-integer monomial",
            TruncatedSeries::monomial(GroupElement::new(vec![Rat::new(1, 2)]), RatFunc::one()),
            "valuational",
        ),
        ("factorial gaps", limit_series, "limit"),
        ("polynomial", mono(&[1]).add(&mono(&[2])).unwrap(), "realized"),
    ];
    let budget = 8;
    for (name, target, expect) in &cases {
        let v1 = classify_point(target, &k, budget).expect("classifier runs");
        assert_eq!(v1.category(), *expect, "{name}");
        let v2 = classify_point(target, &k, 2 * budget).expect("classifier runs");
        assert_eq!(
            v1.category(),
            v2.category(),
            "{name}: verdict must be stable under doubling the budget"
        );
        match &v1 {
            TypeVerdict::LimitEvidence { chain } => {
                assert!(chain.len() >= 6, "limit chain length");
                assert!(valfield::pc_check(chain).unwrap().ok);
            }
            TypeVerdict::Residual { k1, k2, residue } => {
                let u = k1
                    .mul(&cases[0].1)
                    .unwrap()
                    .add(k2)
                    .unwrap();
                assert!(u.val().unwrap().is_zero());
                assert!(u.residue().unwrap().equal(residue));
            }
            TypeVerdict::Valuational { gamma, cut } => {
                assert_eq!(gamma, &GroupElement::new(vec![Rat::new(1, 2)]));
                assert!(matches!(cut, CutType::PlusOf { .. }));
            }
            _ => {}
        }
    }
    pass(9, "curated classifier suite, budget-stable", start, None);
}

/// Criterion 10: root valuations of the two reference polynomials plus
/// multiplicity sums on 200 random polynomials.
#[test]
fn acceptance_10_newton_polygon() {
    let start = Instant::now();
    let x = mono(&[1]);
    let one = TruncatedSeries::one(1);
    // Z^2 - X
    let roots = newton_polygon(&[x.neg(), TruncatedSeries::zero(1), one.clone()]).unwrap();
    assert_eq!(
        roots,
        vec![(Val::Finite(GroupElement::new(vec![Rat::new(1, 2)])), 2)]
    );
    // Z^2 - (1+X) Z + X
    let roots = newton_polygon(&[
        x.clone(),
        one.add(&x).unwrap().neg(),
        one.clone(),
    ])
    .unwrap();
    assert_eq!(
        roots,
        vec![(Val::Finite(ge(&[0])), 1), (Val::Finite(ge(&[1])), 1)]
    );

    let mut rng = ChaCha8Rng::seed_from_u64(110);
    let mut done = 0;
    while done < 200 {
        let d = rng.random_range(1..=6);
        let mut coeffs: Vec<TruncatedSeries> = (0..=d)
            .map(|_| {
                if rng.random_bool(0.2) {
                    TruncatedSeries::zero(1)
                } else {
                    random_series(&mut rng, 1, 4)
                }
            })
            .collect();
        if coeffs[d].is_exact_zero() {
            coeffs[d] = one.clone();
        }
        let roots = newton_polygon(&coeffs).expect("exact coefficients");
        let total: usize = roots.iter().map(|(_, m)| m).sum();
        assert_eq!(total, d, "multiplicities must sum to the degree");
        done += 1;
    }
    pass(10, "root valuations by lower hull", start, None);
}
