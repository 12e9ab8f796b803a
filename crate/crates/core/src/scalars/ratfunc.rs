//! Rational functions over Q in the generators `t1, t2, ...`.
//!
//! Canonical form keeps numerator and denominator as expanded
//! integer-coefficient polynomials with joint content 1 and a positive
//! leading denominator coefficient. Fractions are not reduced by
//! polynomial gcd; equality is decided by cross-multiplication, which
//! keeps zero tests exact without multivariate gcd.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use super::{MPoly, Monomial, Rat, ScalarError};

/// Arithmetic selector for [`field_ops`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// An exact rational function `num/den` in canonical form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatFunc {
    num: MPoly,
    den: MPoly,
}

impl RatFunc {
    pub fn zero() -> Self {
        RatFunc {
            num: MPoly::zero(),
            den: MPoly::one(),
        }
    }

    pub fn one() -> Self {
        RatFunc {
            num: MPoly::one(),
            den: MPoly::one(),
        }
    }

    /// The generator `t<index>` (1-based), written τ_index on paper.
    pub fn var(index: usize) -> Self {
        RatFunc::from_poly(MPoly::var(index))
    }

    pub fn constant(c: Rat) -> Self {
        RatFunc::from_poly(MPoly::constant(c))
    }

    pub fn from_int(n: i64) -> Self {
        RatFunc::constant(Rat::from_int(n))
    }

    pub fn from_poly(num: MPoly) -> Self {
        Self::new(num, MPoly::one()).expect("unit denominator")
    }

    /// Builds `num/den` in canonical form; errors when `den` is zero.
    pub fn new(num: MPoly, den: MPoly) -> Result<Self, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(RatFunc::zero());
        }
        // Clear coefficient denominators across the pair, then divide by
        // the joint integer content and fix the denominator's sign.
        let mut lcm = BigInt::one();
        for (_, c) in num.terms().chain(den.terms()) {
            lcm = lcm.lcm(c.denom());
        }
        let scale = Rat::from_bigint(lcm);
        let num = num.scale(&scale);
        let den = den.scale(&scale);
        let mut content = BigInt::zero();
        for (_, c) in num.terms().chain(den.terms()) {
            debug_assert!(c.is_integer());
            content = content.gcd(c.numer());
        }
        let mut divisor = Rat::from_bigint(content)
            .recip()
            .expect("nonzero content");
        let (_, lead) = den.leading().expect("nonzero denominator");
        if lead.is_negative() {
            divisor = -divisor;
        }
        Ok(RatFunc {
            num: num.scale(&divisor),
            den: den.scale(&divisor),
        })
    }

    pub fn numer(&self) -> &MPoly {
        &self.num
    }

    pub fn denom(&self) -> &MPoly {
        &self.den
    }

    /// Exact zero test: the numerator is the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.equal(&RatFunc::one())
    }

    /// `Some(c)` when the value is the rational constant `c`.
    pub fn as_rat(&self) -> Option<Rat> {
        let n = self.num.as_constant()?;
        let d = self.den.as_constant()?;
        Some(n / d)
    }

    /// Equality by cross-multiplication of canonical forms.
    pub fn equal(&self, other: &RatFunc) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }

    pub fn add(&self, other: &RatFunc) -> RatFunc {
        let num = &(&self.num * &other.den) + &(&other.num * &self.den);
        RatFunc::new(num, &self.den * &other.den).expect("nonzero denominator")
    }

    pub fn sub(&self, other: &RatFunc) -> RatFunc {
        let num = &(&self.num * &other.den) - &(&other.num * &self.den);
        RatFunc::new(num, &self.den * &other.den).expect("nonzero denominator")
    }

    pub fn mul(&self, other: &RatFunc) -> RatFunc {
        RatFunc::new(&self.num * &other.num, &self.den * &other.den).expect("nonzero denominator")
    }

    pub fn div(&self, other: &RatFunc) -> Result<RatFunc, ScalarError> {
        if other.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        RatFunc::new(&self.num * &other.den, &self.den * &other.num)
    }

    pub fn recip(&self) -> Result<RatFunc, ScalarError> {
        RatFunc::one().div(self)
    }

    pub fn scale(&self, c: &Rat) -> RatFunc {
        RatFunc::new(self.num.scale(c), self.den.clone()).expect("nonzero denominator")
    }

    /// 1-based generator indices occurring in numerator or denominator.
    pub fn vars(&self) -> BTreeSet<usize> {
        let mut v = self.num.vars();
        v.extend(self.den.vars());
        v
    }

    /// Attempts the cheap gcd-free reduction: when the denominator divides
    /// the numerator exactly, returns the polynomial quotient.
    pub fn reduced(&self) -> RatFunc {
        if self.den.is_one() || self.is_zero() {
            return self.clone();
        }
        match self.num.div_exact(&self.den) {
            Some(q) => RatFunc::from_poly(q),
            None => self.clone(),
        }
    }

    /// Whether this value visibly lies in the subfield generated by the
    /// `allowed` generators: variable support (after the cheap reduction)
    /// is contained in `allowed`. Sound but not complete.
    pub fn supported_on(&self, allowed: &BTreeSet<usize>) -> bool {
        let r = self.reduced();
        r.vars().is_subset(allowed)
    }
}

/// Exact field arithmetic dispatch; division by zero is the only error.
pub fn field_ops(a: &RatFunc, b: &RatFunc, op: FieldOp) -> Result<RatFunc, ScalarError> {
    match op {
        FieldOp::Add => Ok(a.add(b)),
        FieldOp::Sub => Ok(a.sub(b)),
        FieldOp::Mul => Ok(a.mul(b)),
        FieldOp::Div => a.div(b),
    }
}

/// Equality of rational functions via cross-multiplication.
pub fn ratfunc_equal(a: &RatFunc, b: &RatFunc) -> bool {
    a.equal(b)
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        RatFunc::add(self, rhs)
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        RatFunc::sub(self, rhs)
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        RatFunc::mul(self, rhs)
    }
}

impl Div for &RatFunc {
    type Output = RatFunc;
    fn div(self, rhs: &RatFunc) -> RatFunc {
        RatFunc::div(self, rhs).expect("division by zero")
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for RatFunc {
    type Err = ScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        match split_fraction(&s) {
            Some((n, d)) => {
                let num = parse_poly(n)?;
                let den = parse_poly(d)?;
                RatFunc::new(num, den)
            }
            None => Ok(RatFunc::from_poly(parse_poly(&s)?)),
        }
    }
}

/// Splits at the fraction bar. Exponent carets never contain `/`, so the
/// first `/` at top level is the bar.
fn split_fraction(s: &str) -> Option<(&str, &str)> {
    s.split_once('/').filter(|(n, d)| !n.is_empty() && !d.is_empty())
}

fn parse_poly(s: &str) -> Result<MPoly, ScalarError> {
    let bad = |msg: &str| ScalarError::Parse(format!("{msg} in `{s}`"));
    if s.is_empty() {
        return Err(bad("empty polynomial"));
    }
    let mut out = MPoly::zero();
    for term in s.split('+') {
        if term.is_empty() {
            return Err(bad("empty term"));
        }
        let mut coeff = Rat::one();
        let mut mono = Monomial::one();
        let mut saw_coeff = false;
        for factor in term.split('*') {
            if factor.is_empty() {
                return Err(bad("empty factor"));
            }
            if let Some(rest) = factor.strip_prefix('t') {
                let (var, exp) = match rest.split_once('^') {
                    Some((v, e)) => (v, e),
                    None => (rest, "1"),
                };
                let index: usize = var
                    .parse()
                    .map_err(|_| bad("invalid generator index"))?;
                if index == 0 {
                    return Err(bad("generator indices are 1-based"));
                }
                let exp: u32 = exp.parse().map_err(|_| bad("invalid exponent"))?;
                for _ in 0..exp {
                    mono = mono.mul(&Monomial::var(index));
                }
            } else {
                if saw_coeff {
                    return Err(bad("repeated coefficient"));
                }
                saw_coeff = true;
                let c: Rat = factor.parse().map_err(|_| bad("invalid coefficient"))?;
                coeff = coeff * c;
            }
        }
        out.add_term(mono, coeff);
    }
    Ok(out)
}
