//! Shared generators for the benchmark suite.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use valfield::{GroupElement, Rat, RatFunc, TruncatedSeries};

/// Random exact series with small rational exponents and coefficients.
pub fn random_series(rng: &mut ChaCha8Rng, rank: usize, terms: usize) -> TruncatedSeries {
    let mut s = TruncatedSeries::zero(rank);
    for _ in 0..terms {
        let coords: Vec<Rat> = (0..rank)
            .map(|_| Rat::new(rng.random_range(-20..=20), rng.random_range(1..=3)))
            .collect();
        let coef = RatFunc::constant(Rat::new(
            rng.random_range(-9..=9).max(1),
            rng.random_range(1..=7),
        ));
        s = s
            .add(&TruncatedSeries::monomial(GroupElement::new(coords), coef))
            .expect("equal ranks");
    }
    s
}
