//! Exact arithmetic: rationals, Gaussian rationals, dyadic floats and sparse
//! bivariate polynomials.
//!
//! Everything in this module is exact.  Dyadic floats m * 2^e with arbitrary
//! precision mantissas are the carrier for ball centers; they support exact
//! ring operations plus explicit rounding that reports the discarded amount,
//! so rounding error can be pushed into a ball radius instead of being lost.
//! Polynomials are sparse maps from exponent pairs to rational coefficients;
//! univariate polynomials are dense coefficient vectors.  Resultants are
//! computed by an integer subresultant remainder sequence (with a fraction
//! free determinant as an independent cross-check in the tests) and bivariate
//! resultants by evaluation and exact interpolation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Convenience constructor for small rationals.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

// ---------------------------------------------------------------------------
// Gaussian rationals
// ---------------------------------------------------------------------------

/// An element of Q(i), kept as exact real and imaginary rational parts.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussianRational { re, im }
    }

    pub fn from_rational(re: Rational) -> Self {
        GaussianRational { re, im: Rational::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(rat_int(n))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn i() -> Self {
        GaussianRational { re: Rational::zero(), im: Rational::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussianRational { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn neg(&self) -> Self {
        GaussianRational { re: -self.re.clone(), im: -self.im.clone() }
    }

    pub fn add(&self, o: &Self) -> Self {
        GaussianRational { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    pub fn sub(&self, o: &Self) -> Self {
        GaussianRational { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    pub fn mul(&self, o: &Self) -> Self {
        GaussianRational {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    /// |z|^2, an exact nonnegative rational.
    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(GaussianRational { re: &self.re / &n, im: -&self.im / &n })
    }

    pub fn div(&self, o: &Self) -> Option<Self> {
        o.inv().map(|v| self.mul(&v))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        GaussianRational { re: &self.re * c, im: &self.im * c }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = GaussianRational::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}*i", self.im)
        } else {
            write!(f, "{} + {}*i", self.re, self.im)
        }
    }
}

// ---------------------------------------------------------------------------
// Dyadic floats
// ---------------------------------------------------------------------------

/// An exact dyadic number m * 2^e with arbitrary-precision mantissa.
///
/// The representation is normalized: the mantissa is odd or zero (and zero
/// forces e = 0), so equality of values is equality of representations.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Dyadic {
    man: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn new(man: BigInt, exp: i64) -> Self {
        let mut d = Dyadic { man, exp };
        d.normalize();
        d
    }

    fn normalize(&mut self) {
        if self.man.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.man.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.man >>= tz as usize;
            self.exp += tz as i64;
        }
    }

    pub fn zero() -> Self {
        Dyadic { man: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Dyadic { man: BigInt::one(), exp: 0 }
    }

    pub fn from_i64(n: i64) -> Self {
        Dyadic::new(BigInt::from(n), 0)
    }

    /// 2^k.
    pub fn pow2(k: i64) -> Self {
        Dyadic { man: BigInt::one(), exp: k }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.man
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.man.is_zero()
    }

    /// -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        if self.man.is_zero() {
            0
        } else if self.man.is_negative() {
            -1
        } else {
            1
        }
    }

    pub fn abs(&self) -> Self {
        Dyadic { man: self.man.abs(), exp: self.exp }
    }

    pub fn neg(&self) -> Self {
        Dyadic { man: -self.man.clone(), exp: self.exp }
    }

    /// Number of significant bits of the mantissa.
    pub fn bits(&self) -> u64 {
        self.man.magnitude().bits()
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(o.exp);
        let a = &self.man << (self.exp - e) as usize;
        let b = &o.man << (o.exp - e) as usize;
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Dyadic::zero();
        }
        Dyadic::new(&self.man * &o.man, self.exp + o.exp)
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic { man: self.man.clone(), exp: self.exp + k }
    }

    pub fn double(&self) -> Self {
        self.mul_pow2(1)
    }

    pub fn half(&self) -> Self {
        self.mul_pow2(-1)
    }

    pub fn cmp_val(&self, o: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        match self.sub(o).signum() {
            s if s < 0 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }

    pub fn lt(&self, o: &Self) -> bool {
        self.cmp_val(o) == std::cmp::Ordering::Less
    }

    pub fn le(&self, o: &Self) -> bool {
        self.cmp_val(o) != std::cmp::Ordering::Greater
    }

    pub fn max_val(&self, o: &Self) -> Self {
        if self.lt(o) {
            o.clone()
        } else {
            self.clone()
        }
    }

    pub fn min_val(&self, o: &Self) -> Self {
        if self.lt(o) {
            self.clone()
        } else {
            o.clone()
        }
    }

    /// Truncate the mantissa to `prec` bits (toward zero).  Returns the
    /// rounded value and an upper bound for the absolute rounding error,
    /// which is zero when no truncation happened.
    pub fn round(&self, prec: u32) -> (Dyadic, Dyadic) {
        let b = self.bits();
        if b <= prec as u64 {
            return (self.clone(), Dyadic::zero());
        }
        let shift = (b - prec as u64) as i64;
        let mag = self.man.magnitude() >> shift as usize;
        let man = if self.man.is_negative() {
            -BigInt::from(mag)
        } else {
            BigInt::from(mag)
        };
        let rounded = Dyadic::new(man, self.exp + shift);
        (rounded, Dyadic::pow2(self.exp + shift))
    }

    /// Round the absolute value up to at most `prec` mantissa bits, never
    /// decreasing the value.  Used for ball radii.
    pub fn round_up_abs(&self, prec: u32) -> Dyadic {
        let b = self.bits();
        if b <= prec as u64 {
            return self.abs();
        }
        let shift = (b - prec as u64) as i64;
        let mag = (self.man.magnitude() >> shift as usize) + 1u32;
        Dyadic::new(BigInt::from(mag), self.exp + shift)
    }

    /// Exact conversion to a rational.
    pub fn to_rational(&self) -> Rational {
        if self.exp >= 0 {
            Rational::from_integer(&self.man << self.exp as usize)
        } else {
            Rational::new(self.man.clone(), BigInt::one() << (-self.exp) as usize)
        }
    }

    /// Directed conversion from a rational: the result differs from `q` by
    /// less than one unit in the last of `prec` significant bits, and lies on
    /// the side selected by `toward_pos_inf`.
    pub fn from_rational_dir(q: &Rational, prec: u32, toward_pos_inf: bool) -> Dyadic {
        if q.is_zero() {
            return Dyadic::zero();
        }
        let neg = q.is_negative();
        let num = q.numer().magnitude().clone();
        let den = q.denom().magnitude().clone();
        let nb = num.bits() as i64;
        let db = den.bits() as i64;
        let shift = (prec as i64 + 2 + db - nb).max(0) as u64;
        let scaled = num << shift as usize;
        let (mut quo, rem) = scaled.div_rem(&den);
        let round_up_mag = !rem.is_zero() && (neg != toward_pos_inf);
        if round_up_mag {
            quo += 1u32;
        }
        let man = if neg { -BigInt::from(quo) } else { BigInt::from(quo) };
        Dyadic::new(man, -(shift as i64))
    }

    /// Truncating conversion from a rational, with an error bound: the
    /// returned dyadic d satisfies |q - d| <= err.
    pub fn from_rational(q: &Rational, prec: u32) -> (Dyadic, Dyadic) {
        let lo = Dyadic::from_rational_dir(q, prec, false);
        let hi = Dyadic::from_rational_dir(q, prec, true);
        let err = hi.sub(&lo);
        (lo, err)
    }

    pub fn to_f64(&self) -> f64 {
        let m = self.man.to_f64().unwrap_or(if self.man.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        });
        let e = self.exp.clamp(-4000, 4000) as i32;
        m * 2f64.powi(e)
    }

    /// Decimal string with `digits` significant digits, rounded toward zero
    /// (`Down`) or away from zero (`Up`).
    pub fn to_decimal(&self, digits: u32, round_up: bool) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let digits = digits.max(1) as i64;
        // Estimate the decimal exponent from the binary size.
        let log2 = (self.bits() as i64 - 1) + self.exp;
        let mut k = (log2 as f64 * 0.3010299956639812).floor() as i64;
        loop {
            // scaled = |v| * 10^(digits - 1 - k), rounded per direction.
            let p10 = digits - 1 - k;
            let mag = self.man.magnitude().clone();
            let mut num = BigInt::from(mag);
            let mut den = BigInt::one();
            if p10 >= 0 {
                num *= BigInt::from(10u32).pow(p10 as u32);
            } else {
                den *= BigInt::from(10u32).pow((-p10) as u32);
            }
            if self.exp >= 0 {
                num <<= self.exp as usize;
            } else {
                den <<= (-self.exp) as usize;
            }
            let (q, r) = num.div_rem(&den);
            let mut q = q;
            if round_up && !r.is_zero() {
                q += 1u32;
            }
            let s = q.to_string();
            let n = s.len() as i64;
            if n < digits {
                k -= digits - n;
                continue;
            }
            if n > digits {
                k += n - digits;
                continue;
            }
            let sign = if self.man.is_negative() { "-" } else { "" };
            let mantissa = if s.len() == 1 {
                s.clone()
            } else {
                format!("{}.{}", &s[..1], &s[1..])
            };
            return format!("{}{}e{}", sign, mantissa, k);
        }
    }
}

// ---------------------------------------------------------------------------
// Radius values
// ---------------------------------------------------------------------------

/// A nonnegative ball radius: a small dyadic or infinity.
///
/// Radii are kept to at most 32 mantissa bits, rounded up, so radius
/// arithmetic stays cheap regardless of the working precision.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Rad {
    Fin(Dyadic),
    Inf,
}

const RAD_BITS: u32 = 32;

impl Rad {
    pub fn zero() -> Self {
        Rad::Fin(Dyadic::zero())
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Rad::Fin(d) if d.is_zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Rad::Fin(_))
    }

    /// Upper bound from an exact dyadic (absolute value).
    pub fn from_dyadic_up(d: &Dyadic) -> Self {
        Rad::Fin(d.round_up_abs(RAD_BITS))
    }

    pub fn pow2(k: i64) -> Self {
        Rad::Fin(Dyadic::pow2(k))
    }

    pub fn add(&self, o: &Rad) -> Rad {
        match (self, o) {
            (Rad::Fin(a), Rad::Fin(b)) => Rad::Fin(a.add(b).round_up_abs(RAD_BITS)),
            _ => Rad::Inf,
        }
    }

    pub fn mul(&self, o: &Rad) -> Rad {
        match (self, o) {
            (Rad::Fin(a), Rad::Fin(b)) => {
                if a.is_zero() || b.is_zero() {
                    Rad::zero()
                } else {
                    Rad::Fin(a.mul(b).round_up_abs(RAD_BITS))
                }
            }
            _ => {
                if self.is_zero() || o.is_zero() {
                    Rad::zero()
                } else {
                    Rad::Inf
                }
            }
        }
    }

    /// Multiply by an exact dyadic factor (absolute value taken).
    pub fn mul_dyadic_up(&self, d: &Dyadic) -> Rad {
        self.mul(&Rad::from_dyadic_up(d))
    }

    pub fn mul_pow2(&self, k: i64) -> Rad {
        match self {
            Rad::Fin(d) => Rad::Fin(d.mul_pow2(k)),
            Rad::Inf => Rad::Inf,
        }
    }

    pub fn max(&self, o: &Rad) -> Rad {
        match (self, o) {
            (Rad::Fin(a), Rad::Fin(b)) => Rad::Fin(a.max_val(b)),
            _ => Rad::Inf,
        }
    }

    /// Certified comparison against an exact dyadic: true iff radius < d.
    pub fn lt_dyadic(&self, d: &Dyadic) -> bool {
        match self {
            Rad::Fin(r) => r.lt(d),
            Rad::Inf => false,
        }
    }

    pub fn le_rad(&self, o: &Rad) -> bool {
        match (self, o) {
            (Rad::Fin(a), Rad::Fin(b)) => a.le(b),
            (_, Rad::Inf) => true,
            (Rad::Inf, Rad::Fin(_)) => false,
        }
    }

    pub fn to_dyadic(&self) -> Option<Dyadic> {
        match self {
            Rad::Fin(d) => Some(d.clone()),
            Rad::Inf => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Rad::Fin(d) => d.to_f64(),
            Rad::Inf => f64::INFINITY,
        }
    }
}

// ---------------------------------------------------------------------------
// Sparse bivariate polynomials
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Var {
    X,
    Y,
}

impl Var {
    pub fn other(self) -> Var {
        match self {
            Var::X => Var::Y,
            Var::Y => Var::X,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X => write!(f, "x"),
            Var::Y => write!(f, "y"),
        }
    }
}

/// A sparse polynomial in Q[x,y]: exponent pairs mapped to nonzero rational
/// coefficients.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SparsePoly {
    terms: BTreeMap<(u32, u32), Rational>,
}

impl SparsePoly {
    pub fn zero() -> Self {
        SparsePoly { terms: BTreeMap::new() }
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = SparsePoly::zero();
        p.add_term(0, 0, c);
        p
    }

    pub fn one() -> Self {
        SparsePoly::constant(Rational::one())
    }

    pub fn var(v: Var) -> Self {
        let mut p = SparsePoly::zero();
        match v {
            Var::X => p.add_term(1, 0, Rational::one()),
            Var::Y => p.add_term(0, 1, Rational::one()),
        }
        p
    }

    pub fn monomial(i: u32, j: u32, c: Rational) -> Self {
        let mut p = SparsePoly::zero();
        p.add_term(i, j, c);
        p
    }

    pub fn add_term(&mut self, i: u32, j: u32, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry((i, j)).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Exactly two monomials.
    pub fn is_binomial(&self) -> bool {
        self.terms.len() == 2
    }

    pub fn coeff(&self, i: u32, j: u32) -> Rational {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Rational)> {
        self.terms.iter()
    }

    pub fn deg_x(&self) -> u32 {
        self.terms.keys().map(|&(i, _)| i).max().unwrap_or(0)
    }

    pub fn deg_y(&self) -> u32 {
        self.terms.keys().map(|&(_, j)| j).max().unwrap_or(0)
    }

    pub fn deg(&self, v: Var) -> u32 {
        match v {
            Var::X => self.deg_x(),
            Var::Y => self.deg_y(),
        }
    }

    pub fn max_degree(&self) -> u32 {
        self.deg_x().max(self.deg_y())
    }

    pub fn neg(&self) -> Self {
        let mut out = SparsePoly::zero();
        for (&(i, j), c) in &self.terms {
            out.add_term(i, j, -c.clone());
        }
        out
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (&(i, j), c) in &o.terms {
            out.add_term(i, j, c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = SparsePoly::zero();
        for (&(i1, j1), c1) in &self.terms {
            for (&(i2, j2), c2) in &o.terms {
                out.add_term(i1 + i2, j1 + j2, c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return SparsePoly::zero();
        }
        let mut out = SparsePoly::zero();
        for (&(i, j), a) in &self.terms {
            out.add_term(i, j, a * c);
        }
        out
    }

    pub fn mul_var(&self, v: Var) -> Self {
        let mut out = SparsePoly::zero();
        for (&(i, j), c) in &self.terms {
            match v {
                Var::X => out.add_term(i + 1, j, c.clone()),
                Var::Y => out.add_term(i, j + 1, c.clone()),
            }
        }
        out
    }

    /// Substitute x -> x - c y, leaving y fixed (the inverse of the
    /// coordinate change u = x + c y).
    pub fn shear(&self, c: i64) -> Self {
        if c == 0 {
            return self.clone();
        }
        let mc = rat_int(-c);
        let mut out = SparsePoly::zero();
        for (&(i, j), coef) in &self.terms {
            // (x - c y)^i expanded by the binomial theorem.
            let mut w = coef.clone();
            for k in 0..=i {
                out.add_term(i - k, j + k, w.clone());
                if k < i {
                    w *= &mc;
                    w *= rat(i as i64 - k as i64, k as i64 + 1);
                }
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = SparsePoly::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn derivative(&self, v: Var) -> Self {
        let mut out = SparsePoly::zero();
        for (&(i, j), c) in &self.terms {
            match v {
                Var::X => {
                    if i > 0 {
                        out.add_term(i - 1, j, c * rat_int(i as i64));
                    }
                }
                Var::Y => {
                    if j > 0 {
                        out.add_term(i, j - 1, c * rat_int(j as i64));
                    }
                }
            }
        }
        out
    }

    pub fn derivative_n(&self, v: Var, order: u32) -> Self {
        let mut p = self.clone();
        for _ in 0..order {
            p = p.derivative(v);
        }
        p
    }

    pub fn swap_vars(&self) -> Self {
        let mut out = SparsePoly::zero();
        for (&(i, j), c) in &self.terms {
            out.add_term(j, i, c.clone());
        }
        out
    }

    /// Exact evaluation over Q(i).
    pub fn eval_q(&self, x: &GaussianRational, y: &GaussianRational) -> GaussianRational {
        // Horner in y over Horner in x.
        let rows = self.by_powers_of(Var::Y);
        let mut acc = GaussianRational::zero();
        for row in rows.iter().rev() {
            acc = acc.mul(y);
            acc = acc.add(&uni_eval_q(row, x));
        }
        acc
    }

    /// Coefficient vector with respect to powers of `v`; entry d is the
    /// univariate polynomial (in the other variable) multiplying v^d.
    pub fn by_powers_of(&self, v: Var) -> Vec<UniPoly> {
        if self.is_zero() {
            return vec![];
        }
        let d = self.deg(v) as usize;
        let mut rows: Vec<UniPoly> = vec![vec![]; d + 1];
        for (&(i, j), c) in &self.terms {
            let (outer, inner) = match v {
                Var::Y => (j as usize, i as usize),
                Var::X => (i as usize, j as usize),
            };
            let row = &mut rows[outer];
            if row.len() <= inner {
                row.resize(inner + 1, Rational::zero());
            }
            row[inner] += c;
        }
        for row in &mut rows {
            uni_trim(row);
        }
        rows
    }

    /// The univariate polynomial Q(0, y).
    pub fn at_x_zero(&self) -> UniPoly {
        let mut out = vec![];
        for (&(i, j), c) in &self.terms {
            if i == 0 {
                let j = j as usize;
                if out.len() <= j {
                    out.resize(j + 1, Rational::zero());
                }
                out[j] += c;
            }
        }
        uni_trim(&mut out);
        out
    }

    /// The univariate polynomial Q(x, 0).
    pub fn at_y_zero(&self) -> UniPoly {
        self.swap_vars().at_x_zero()
    }

    /// Reinterpret a univariate polynomial as a polynomial in `v`.
    pub fn from_uni(p: &UniPoly, v: Var) -> Self {
        let mut out = SparsePoly::zero();
        for (d, c) in p.iter().enumerate() {
            match v {
                Var::X => out.add_term(d as u32, 0, c.clone()),
                Var::Y => out.add_term(0, d as u32, c.clone()),
            }
        }
        out
    }

    /// If the polynomial involves only one variable (or is constant), return
    /// its dense coefficient vector in that variable.
    pub fn as_uni(&self, v: Var) -> Option<UniPoly> {
        if self.deg(v.other()) > 0 {
            return None;
        }
        let mut out = vec![Rational::zero(); self.deg(v) as usize + 1];
        for (&(i, j), c) in &self.terms {
            let d = match v {
                Var::X => i,
                Var::Y => j,
            };
            out[d as usize] = c.clone();
        }
        uni_trim(&mut out);
        Some(out)
    }
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(i, j), c) in &self.terms {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut parts: Vec<String> = vec![];
            if !mag.is_one() || (i == 0 && j == 0) {
                parts.push(format!("{}", mag));
            }
            if i == 1 {
                parts.push("x".into());
            } else if i > 1 {
                parts.push(format!("x^{}", i));
            }
            if j == 1 {
                parts.push("y".into());
            } else if j > 1 {
                parts.push(format!("y^{}", j));
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Dense univariate polynomials over Q
// ---------------------------------------------------------------------------

/// Dense univariate polynomial: coefficient of t^k at index k.  The zero
/// polynomial is the empty vector.
pub type UniPoly = Vec<Rational>;

pub fn uni_trim(p: &mut UniPoly) {
    while p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
}

pub fn uni_deg(p: &UniPoly) -> Option<usize> {
    if p.is_empty() {
        None
    } else {
        Some(p.len() - 1)
    }
}

pub fn uni_is_zero(p: &UniPoly) -> bool {
    p.is_empty()
}

pub fn uni_from_i64(coeffs: &[i64]) -> UniPoly {
    let mut p: UniPoly = coeffs.iter().map(|&c| rat_int(c)).collect();
    uni_trim(&mut p);
    p
}

pub fn uni_add(a: &UniPoly, b: &UniPoly) -> UniPoly {
    let mut out = vec![Rational::zero(); a.len().max(b.len())];
    for (k, c) in a.iter().enumerate() {
        out[k] += c;
    }
    for (k, c) in b.iter().enumerate() {
        out[k] += c;
    }
    uni_trim(&mut out);
    out
}

pub fn uni_sub(a: &UniPoly, b: &UniPoly) -> UniPoly {
    let mut out = vec![Rational::zero(); a.len().max(b.len())];
    for (k, c) in a.iter().enumerate() {
        out[k] += c;
    }
    for (k, c) in b.iter().enumerate() {
        out[k] -= c;
    }
    uni_trim(&mut out);
    out
}

pub fn uni_mul(a: &UniPoly, b: &UniPoly) -> UniPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, ca) in a.iter().enumerate() {
        if ca.is_zero() {
            continue;
        }
        for (j, cb) in b.iter().enumerate() {
            out[i + j] += ca * cb;
        }
    }
    uni_trim(&mut out);
    out
}

pub fn uni_scale(a: &UniPoly, c: &Rational) -> UniPoly {
    if c.is_zero() {
        return vec![];
    }
    a.iter().map(|x| x * c).collect()
}

pub fn uni_derivative(p: &UniPoly) -> UniPoly {
    if p.len() <= 1 {
        return vec![];
    }
    let mut out = Vec::with_capacity(p.len() - 1);
    for (k, c) in p.iter().enumerate().skip(1) {
        out.push(c * rat_int(k as i64));
    }
    uni_trim(&mut out);
    out
}

pub fn uni_eval(p: &UniPoly, t: &Rational) -> Rational {
    let mut acc = Rational::zero();
    for c in p.iter().rev() {
        acc = acc * t + c;
    }
    acc
}

pub fn uni_eval_q(p: &UniPoly, t: &GaussianRational) -> GaussianRational {
    let mut acc = GaussianRational::zero();
    for c in p.iter().rev() {
        acc = acc.mul(t);
        acc = acc.add(&GaussianRational::from_rational(c.clone()));
    }
    acc
}

/// Exact division with remainder over Q; panics if b is zero.
pub fn uni_divrem(a: &UniPoly, b: &UniPoly) -> (UniPoly, UniPoly) {
    assert!(!b.is_empty(), "division by the zero polynomial");
    let db = b.len() - 1;
    let lead = b[db].clone();
    let mut rem = a.clone();
    uni_trim(&mut rem);
    if rem.len() < b.len() {
        return (vec![], rem);
    }
    let mut quo = vec![Rational::zero(); rem.len() - db];
    while rem.len() >= b.len() && !rem.is_empty() {
        let dr = rem.len() - 1;
        let c = rem[dr].clone() / lead.clone();
        let shift = dr - db;
        quo[shift] = c.clone();
        for (k, bc) in b.iter().enumerate() {
            rem[shift + k] -= &c * bc;
        }
        // The leading term cancels exactly; trimming enforces the degree drop.
        rem.truncate(dr);
        uni_trim(&mut rem);
    }
    uni_trim(&mut quo);
    (quo, rem)
}

/// Monic gcd over Q.  gcd(0, 0) = 0.
///
/// Runs a primitive pseudo-remainder sequence over the integers.  Plain
/// rational Euclid is catastrophic on the high-degree eliminants produced by
/// resultant interpolation (numerators and denominators square in size each
/// step); stripping integer content after every pseudo-remainder keeps the
/// coefficients near the size of the answer.
pub fn uni_gcd(a: &UniPoly, b: &UniPoly) -> UniPoly {
    let mut fa = a.clone();
    let mut fb = b.clone();
    uni_trim(&mut fa);
    uni_trim(&mut fb);
    if fa.is_empty() {
        std::mem::swap(&mut fa, &mut fb);
    }
    if fb.is_empty() {
        if fa.is_empty() {
            return vec![];
        }
        let lead = fa.last().unwrap().clone();
        return uni_scale(&fa, &lead.recip());
    }
    let (_, mut f) = uni_to_z(&fa);
    let (_, mut g) = uni_to_z(&fb);
    if poly_z_deg(&f) < poly_z_deg(&g) {
        std::mem::swap(&mut f, &mut g);
    }
    loop {
        if poly_z_deg(&g) == Some(0) {
            return vec![Rational::one()];
        }
        let mut r = prem_z(&f, &g);
        poly_z_trim(&mut r);
        if r.is_empty() {
            let lead = Rational::from_integer(g.last().unwrap().clone());
            return g.iter().map(|c| Rational::from_integer(c.clone()) / &lead).collect();
        }
        let mut content = BigInt::zero();
        for c in &r {
            content = content.gcd(c);
        }
        f = g;
        g = r.into_iter().map(|c| c / &content).collect();
    }
}

/// Normalize to integer coefficients with positive leading coefficient and
/// content one.
pub fn uni_primitive(p: &UniPoly) -> UniPoly {
    if p.is_empty() {
        return vec![];
    }
    let mut den = BigInt::one();
    for c in p {
        den = den.lcm(c.denom());
    }
    let ints: Vec<BigInt> = p.iter().map(|c| (c * Rational::from_integer(den.clone())).to_integer()).collect();
    let mut content = BigInt::zero();
    for c in &ints {
        content = content.gcd(c);
    }
    if ints.last().unwrap().is_negative() {
        content = -content;
    }
    ints.iter().map(|c| Rational::from_integer(c / &content)).collect()
}

/// Squarefree part p / gcd(p, p'), normalized to primitive integer
/// coefficients with positive leading coefficient.
pub fn uni_squarefree(p: &UniPoly) -> UniPoly {
    if p.is_empty() {
        return vec![];
    }
    if p.len() == 1 {
        return vec![Rational::one()];
    }
    let g = uni_gcd(p, &uni_derivative(p));
    let (q, r) = uni_divrem(p, &g);
    debug_assert!(r.is_empty());
    uni_primitive(&q)
}

/// Yun squarefree decomposition: returns pairs (multiplicity, factor) with
/// factors primitive over Z, squarefree and pairwise coprime, such that the
/// product of factor^multiplicity is proportional to p.
pub fn uni_yun(p: &UniPoly) -> Vec<(u32, UniPoly)> {
    let mut out = vec![];
    if p.len() <= 1 {
        return out;
    }
    let dp = uni_derivative(p);
    let g = uni_gcd(p, &dp);
    let (mut c, r) = uni_divrem(p, &g);
    debug_assert!(r.is_empty());
    let (dg, r2) = uni_divrem(&dp, &g);
    debug_assert!(r2.is_empty());
    let mut d = uni_sub(&dg, &uni_derivative(&c));
    let mut i = 1u32;
    while uni_deg(&c).map_or(false, |dd| dd > 0) {
        let a = uni_gcd(&c, &d);
        if uni_deg(&a).map_or(false, |dd| dd > 0) {
            out.push((i, uni_primitive(&a)));
        }
        let (c2, rc) = uni_divrem(&c, &a);
        debug_assert!(rc.is_empty());
        let (dq, rd) = uni_divrem(&d, &a);
        debug_assert!(rd.is_empty());
        c = c2;
        d = uni_sub(&dq, &uni_derivative(&c));
        i += 1;
    }
    out
}

// ---------------------------------------------------------------------------
// Resultants
// ---------------------------------------------------------------------------

fn poly_z_deg(p: &[BigInt]) -> Option<usize> {
    let mut d = p.len();
    while d > 0 && p[d - 1].is_zero() {
        d -= 1;
    }
    if d == 0 {
        None
    } else {
        Some(d - 1)
    }
}

fn poly_z_trim(p: &mut Vec<BigInt>) {
    while p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
}

/// Pseudo-remainder: lc(b)^(deg a - deg b + 1) * a mod b, all over Z.
fn prem_z(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let da = poly_z_deg(a).unwrap();
    let db = poly_z_deg(b).unwrap();
    let lb = b[db].clone();
    let mut r: Vec<BigInt> = a.to_vec();
    let mut e = (da - db) as i64 + 1;
    while let Some(dr) = poly_z_deg(&r) {
        if dr < db {
            break;
        }
        let lr = r[dr].clone();
        let shift = dr - db;
        for c in r.iter_mut() {
            *c = &*c * &lb;
        }
        for (k, bc) in b.iter().enumerate().take(db + 1) {
            r[shift + k] -= &lr * bc;
        }
        poly_z_trim(&mut r);
        e -= 1;
    }
    if e > 0 {
        let f = num_traits::pow::pow(lb, e as usize);
        for c in r.iter_mut() {
            *c = &*c * &f;
        }
    }
    r
}

/// Resultant of two integer polynomials via the subresultant remainder
/// sequence.  Res(a, b) with the Sylvester convention: for constants
/// Res(c, d) = 1; Res(c, q) = c^deg(q).
pub fn resultant_z(a: &[BigInt], b: &[BigInt]) -> BigInt {
    let mut a: Vec<BigInt> = a.to_vec();
    let mut b: Vec<BigInt> = b.to_vec();
    poly_z_trim(&mut a);
    poly_z_trim(&mut b);
    let (da, db) = match (poly_z_deg(&a), poly_z_deg(&b)) {
        (None, _) | (_, None) => return BigInt::zero(),
        (Some(x), Some(y)) => (x, y),
    };
    let mut sign = BigInt::one();
    let (mut f, mut g, df, dg) = if da >= db {
        (a, b, da, db)
    } else {
        if da % 2 == 1 && db % 2 == 1 {
            sign = -sign;
        }
        (b, a, db, da)
    };
    if dg == 0 {
        return sign * num_traits::pow::pow(g[0].clone(), df);
    }
    let mut gg = BigInt::one();
    let mut h = BigInt::one();
    let mut s = sign;
    loop {
        let dfc = poly_z_deg(&f).unwrap();
        let dgc = poly_z_deg(&g).unwrap();
        let delta = dfc - dgc;
        if dfc % 2 == 1 && dgc % 2 == 1 {
            s = -s;
        }
        let r = prem_z(&f, &g);
        if r.is_empty() {
            return BigInt::zero();
        }
        f = g;
        let divisor = &gg * num_traits::pow::pow(h.clone(), delta);
        g = r.iter().map(|c| c / &divisor).collect();
        poly_z_trim(&mut g);
        gg = f[poly_z_deg(&f).unwrap()].clone();
        h = if delta == 0 {
            h
        } else {
            num_traits::pow::pow(gg.clone(), delta) / num_traits::pow::pow(h, delta - 1)
        };
        if poly_z_deg(&g) == Some(0) {
            let dfl = poly_z_deg(&f).unwrap();
            let res = if dfl == 0 {
                BigInt::one()
            } else {
                num_traits::pow::pow(g[0].clone(), dfl) / num_traits::pow::pow(h, dfl - 1)
            };
            return s * res;
        }
    }
}

/// Clear denominators: p = (num/den) * P with P primitive over Z.
fn uni_to_z(p: &UniPoly) -> (Rational, Vec<BigInt>) {
    if p.is_empty() {
        return (Rational::zero(), vec![]);
    }
    let mut den = BigInt::one();
    for c in p {
        den = den.lcm(c.denom());
    }
    let ints: Vec<BigInt> =
        p.iter().map(|c| (c * Rational::from_integer(den.clone())).to_integer()).collect();
    let mut content = BigInt::zero();
    for c in &ints {
        content = content.gcd(c);
    }
    let prim: Vec<BigInt> = ints.iter().map(|c| c / &content).collect();
    (Rational::new(content, den), prim)
}

/// Resultant of two univariate rational polynomials.
pub fn resultant_uni(p: &UniPoly, q: &UniPoly) -> Rational {
    let mut p = p.clone();
    let mut q = q.clone();
    uni_trim(&mut p);
    uni_trim(&mut q);
    if p.is_empty() || q.is_empty() {
        return Rational::zero();
    }
    let dp = p.len() - 1;
    let dq = q.len() - 1;
    let (cp, pz) = uni_to_z(&p);
    let (cq, qz) = uni_to_z(&q);
    let core = resultant_z(&pz, &qz);
    let mut scale = Rational::one();
    for _ in 0..dq {
        scale *= &cp;
    }
    for _ in 0..dp {
        scale *= &cq;
    }
    scale * Rational::from_integer(core)
}

/// Fraction-free determinant of the Sylvester matrix; an independent route
/// used to cross-check the remainder-sequence resultant.
pub fn sylvester_resultant_z(a: &[BigInt], b: &[BigInt]) -> BigInt {
    let mut a: Vec<BigInt> = a.to_vec();
    let mut b: Vec<BigInt> = b.to_vec();
    poly_z_trim(&mut a);
    poly_z_trim(&mut b);
    let (da, db) = match (poly_z_deg(&a), poly_z_deg(&b)) {
        (None, _) | (_, None) => return BigInt::zero(),
        (Some(x), Some(y)) => (x, y),
    };
    let n = da + db;
    if n == 0 {
        return BigInt::one();
    }
    let mut m = vec![vec![BigInt::zero(); n]; n];
    for row in 0..db {
        for (k, c) in a.iter().enumerate() {
            m[row][row + (da - k)] = c.clone();
        }
    }
    for row in 0..da {
        for (k, c) in b.iter().enumerate() {
            m[db + row][row + (db - k)] = c.clone();
        }
    }
    // Bareiss elimination.
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let mut found = None;
            for r in k + 1..n {
                if !m[r][k].is_zero() {
                    found = Some(r);
                    break;
                }
            }
            match found {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[k][k] * &m[i][j] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

/// Exact interpolation through distinct rational nodes (Newton form).
pub fn uni_interpolate(nodes: &[(Rational, Rational)]) -> UniPoly {
    let n = nodes.len();
    if n == 0 {
        return vec![];
    }
    // Divided differences.
    let mut dd: Vec<Rational> = nodes.iter().map(|(_, v)| v.clone()).collect();
    let mut coeffs = vec![dd[0].clone()];
    for level in 1..n {
        for k in (level..n).rev() {
            let denom = &nodes[k].0 - &nodes[k - level].0;
            dd[k] = (&dd[k] - &dd[k - 1]) / denom;
        }
        coeffs.push(dd[level].clone());
    }
    // Horner expansion of the Newton form.
    let mut poly: UniPoly = vec![coeffs[n - 1].clone()];
    for k in (0..n - 1).rev() {
        // poly = poly * (t - x_k) + coeffs[k]
        let mut shifted = vec![Rational::zero()];
        shifted.extend(poly.iter().cloned());
        let scaled = uni_scale(&poly, &(-nodes[k].0.clone()));
        poly = uni_add(&shifted, &scaled);
        if poly.is_empty() {
            poly = vec![coeffs[k].clone()];
        } else {
            poly[0] += &coeffs[k];
        }
        uni_trim(&mut poly);
    }
    uni_trim(&mut poly);
    poly
}

// ---------------------------------------------------------------------------
// Public polynomial operations
// ---------------------------------------------------------------------------

pub fn poly_eval(p: &SparsePoly, x: &GaussianRational, y: &GaussianRational) -> GaussianRational {
    p.eval_q(x, y)
}

pub fn poly_derivative(p: &SparsePoly, v: Var, order: u32) -> SparsePoly {
    p.derivative_n(v, order)
}

/// Resultant eliminating `v`; the result is univariate in the other variable.
///
/// Fails with `DegenerateResultant` when both inputs are constant in `v`
/// (the Sylvester matrix is empty and carries no information).
pub fn poly_resultant(p: &SparsePoly, q: &SparsePoly, v: Var) -> Result<SparsePoly> {
    match v {
        Var::Y => resultant_elim_y(p, q),
        Var::X => Ok(resultant_elim_y(&p.swap_vars(), &q.swap_vars())?.swap_vars()),
    }
}

fn resultant_elim_y(p: &SparsePoly, q: &SparsePoly) -> Result<SparsePoly> {
    if p.is_zero() || q.is_zero() {
        return Ok(SparsePoly::zero());
    }
    let n = p.deg_y() as usize;
    let m = q.deg_y() as usize;
    if n == 0 && m == 0 {
        return Err(Error::DegenerateResultant);
    }
    let prows = p.by_powers_of(Var::Y);
    let qrows = q.by_powers_of(Var::Y);
    if n == 0 {
        let base = SparsePoly::from_uni(&prows[0], Var::X);
        return Ok(base.pow(m as u32));
    }
    if m == 0 {
        let base = SparsePoly::from_uni(&qrows[0], Var::X);
        return Ok(base.pow(n as u32));
    }
    let dx = p.deg_x() as usize * m + q.deg_x() as usize * n;
    let plead = &prows[n];
    let qlead = &qrows[m];
    let mut nodes: Vec<(Rational, Rational)> = vec![];
    let mut k: i64 = 0;
    let mut tried: u64 = 0;
    while nodes.len() < dx + 1 {
        let x0 = rat_int(k);
        k = if k >= 0 { -(k + 1) } else { -k };
        tried += 1;
        if tried > (dx as u64 + 2) * 4 + 64 {
            return Err(Error::Internal("interpolation node search stalled".into()));
        }
        if uni_eval(plead, &x0).is_zero() || uni_eval(qlead, &x0).is_zero() {
            continue;
        }
        let pv: UniPoly = prows.iter().map(|r| uni_eval(r, &x0)).collect();
        let qv: UniPoly = qrows.iter().map(|r| uni_eval(r, &x0)).collect();
        let v = resultant_uni(&pv, &qv);
        nodes.push((x0, v));
    }
    let coeffs = uni_interpolate(&nodes);
    Ok(SparsePoly::from_uni(&coeffs, Var::X))
}

// ---------------------------------------------------------------------------
// Bivariate gcd and exact division
// ---------------------------------------------------------------------------

pub(crate) fn bicoeffs_trim(rows: &mut Vec<UniPoly>) {
    while rows.last().map_or(false, |r| r.is_empty()) {
        rows.pop();
    }
}

fn bicoeffs_to_poly(rows: &[UniPoly]) -> SparsePoly {
    let mut out = SparsePoly::zero();
    for (i, row) in rows.iter().enumerate() {
        for (j, c) in row.iter().enumerate() {
            if !c.is_zero() {
                out.add_term(i as u32, j as u32, c.clone());
            }
        }
    }
    out
}

/// Gcd of the y-coefficients, viewing p as an element of Q[y][x].
pub(crate) fn bicoeffs_content(rows: &[UniPoly]) -> UniPoly {
    let mut g: UniPoly = vec![];
    for row in rows {
        g = uni_gcd(&g, row);
        if uni_deg(&g) == Some(0) {
            break;
        }
    }
    g
}

/// Divide every y-coefficient exactly by `c`.
pub(crate) fn bicoeffs_div_content(rows: &[UniPoly], c: &UniPoly) -> Vec<UniPoly> {
    rows.iter()
        .map(|row| {
            if row.is_empty() {
                vec![]
            } else {
                let (q, r) = uni_divrem(row, c);
                debug_assert!(r.is_empty(), "content division must be exact");
                q
            }
        })
        .collect()
}

/// Pseudo-remainder of a by b in the variable x, coefficients in Q[y].
/// b must be nonzero with deg_x(b) <= deg_x(a).
pub(crate) fn bicoeffs_prem(a: &[UniPoly], b: &[UniPoly]) -> Vec<UniPoly> {
    let mut r: Vec<UniPoly> = a.to_vec();
    bicoeffs_trim(&mut r);
    let db = b.len() - 1;
    let lead = b[db].clone();
    while r.len() > db {
        let dr = r.len() - 1;
        let rl = r[dr].clone();
        let shift = dr - db;
        for row in r.iter_mut() {
            *row = uni_mul(row, &lead);
        }
        for (k, bc) in b.iter().enumerate() {
            let t = uni_mul(&rl, bc);
            r[shift + k] = uni_sub(&r[shift + k], &t);
        }
        r.truncate(dr);
        bicoeffs_trim(&mut r);
    }
    r
}

/// Gcd in Q[x, y], defined up to a nonzero rational factor.  The result is
/// normalized so its lexicographically largest monomial (x first) has
/// coefficient one.  gcd(0, 0) = 0.
pub fn gcd_bivar(a: &SparsePoly, b: &SparsePoly) -> SparsePoly {
    fn lead_normalize(p: SparsePoly) -> SparsePoly {
        if p.is_zero() {
            return p;
        }
        let lead = p.terms().last().map(|(_, c)| c.clone()).unwrap();
        p.scale(&lead.recip())
    }
    if a.is_zero() {
        return lead_normalize(b.clone());
    }
    if b.is_zero() {
        return lead_normalize(a.clone());
    }
    // Primitive-PRS gcd over Q[y][x].
    let mut f = a.by_powers_of(Var::X);
    let mut g = b.by_powers_of(Var::X);
    bicoeffs_trim(&mut f);
    bicoeffs_trim(&mut g);
    let cf = bicoeffs_content(&f);
    let cg = bicoeffs_content(&g);
    let content_gcd = uni_gcd(&cf, &cg);
    let mut f = bicoeffs_div_content(&f, &cf);
    let mut g = bicoeffs_div_content(&g, &cg);
    if f.len() < g.len() {
        std::mem::swap(&mut f, &mut g);
    }
    loop {
        if g.is_empty() {
            break;
        }
        if g.len() == 1 {
            // g is a polynomial in y alone; it is primitive, hence a unit.
            f = vec![vec![Rational::one()]];
            break;
        }
        let mut r = bicoeffs_prem(&f, &g);
        if !r.is_empty() {
            let cr = bicoeffs_content(&r);
            r = bicoeffs_div_content(&r, &cr);
        }
        f = g;
        g = r;
    }
    let pp = bicoeffs_to_poly(&f);
    let whole = pp.mul(&SparsePoly::from_uni(&content_gcd, Var::Y));
    lead_normalize(whole)
}

/// Exact quotient a / g in Q[x, y]; errors if g does not divide a.
pub fn divexact_bivar(a: &SparsePoly, g: &SparsePoly) -> Result<SparsePoly> {
    if g.is_zero() {
        return Err(Error::Internal("exact division by the zero polynomial".into()));
    }
    if a.is_zero() {
        return Ok(SparsePoly::zero());
    }
    let mut r = a.by_powers_of(Var::X);
    let d = g.by_powers_of(Var::X);
    bicoeffs_trim(&mut r);
    let dd = d.len() - 1;
    let lead = d[dd].clone();
    let inexact = || Error::Internal("bivariate division is not exact".into());
    if r.len() <= dd {
        return Err(inexact());
    }
    let mut quo: Vec<UniPoly> = vec![vec![]; r.len() - dd];
    while r.len() > dd {
        let dr = r.len() - 1;
        let (qc, rem) = uni_divrem(&r[dr], &lead);
        if !rem.is_empty() {
            return Err(inexact());
        }
        let shift = dr - dd;
        quo[shift] = qc.clone();
        for (k, dc) in d.iter().enumerate() {
            let t = uni_mul(&qc, dc);
            r[shift + k] = uni_sub(&r[shift + k], &t);
        }
        r.truncate(dr);
        bicoeffs_trim(&mut r);
    }
    if !r.is_empty() {
        return Err(inexact());
    }
    Ok(bicoeffs_to_poly(&quo))
}

/// Squarefree part of a polynomial that involves a single variable.
pub fn poly_squarefree(p: &SparsePoly) -> Result<SparsePoly> {
    for v in [Var::X, Var::Y] {
        if let Some(u) = p.as_uni(v) {
            if p.deg(v.other()) == 0 {
                return Ok(SparsePoly::from_uni(&uni_squarefree(&u), v));
            }
        }
    }
    Err(Error::Internal("squarefree part requested for a genuinely bivariate polynomial".into()))
}

// ---------------------------------------------------------------------------
// Simplest rational in an interval
// ---------------------------------------------------------------------------

/// The unique "simplest" rational strictly inside the open interval
/// (lo, hi): smallest denominator, then smallest numerator magnitude.
/// Requires lo < hi.
pub fn simplest_rational_between(lo: &Rational, hi: &Rational) -> Rational {
    assert!(lo < hi, "empty interval");
    simplest_open(lo, Some(hi))
}

/// Simplest rational in (lo, hi), with hi = None meaning +infinity.
fn simplest_open(lo: &Rational, hi: Option<&Rational>) -> Rational {
    let zero = Rational::zero();
    if lo < &zero && hi.map_or(true, |h| h > &zero) {
        return zero;
    }
    if let Some(h) = hi {
        if h <= &zero {
            return -simplest_open(&-h.clone(), Some(&-lo.clone()));
        }
    }
    // Interval inside [0, infinity).
    let n = lo.floor();
    let next_int = &n + Rational::one();
    if hi.map_or(true, |h| &next_int < h) {
        return next_int;
    }
    // No integer inside: lo, hi lie in (n, n+1]; substitute x = n + 1/t.
    let h = hi.unwrap();
    let a = lo - &n;
    let b = h - &n;
    if a.is_zero() {
        let t = simplest_open(&b.recip(), None);
        return n + t.recip();
    }
    let t = simplest_open(&b.recip(), Some(&a.recip()));
    n + t.recip()
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        rat(n, d)
    }

    #[test]
    fn dyadic_normalization_and_ring_ops() {
        let a = Dyadic::new(BigInt::from(12), 0); // 12 = 3 * 2^2
        assert_eq!(a.mantissa(), &BigInt::from(3));
        assert_eq!(a.exponent(), 2);
        let b = Dyadic::from_i64(5);
        assert_eq!(a.add(&b), Dyadic::from_i64(17));
        assert_eq!(a.sub(&b), Dyadic::from_i64(7));
        assert_eq!(a.mul(&b), Dyadic::from_i64(60));
        assert_eq!(Dyadic::zero().add(&b), b);
        assert_eq!(a.mul_pow2(-2), Dyadic::from_i64(3));
    }

    #[test]
    fn dyadic_rounding_reports_error() {
        let v = Dyadic::new(BigInt::from((1i64 << 40) + 1), 0);
        let (r, e) = v.round(20);
        assert!(r.bits() <= 20);
        assert!(!e.is_zero());
        // |v - r| <= e
        let diff = v.sub(&r).abs();
        assert!(diff.le(&e));
        // Round-up of radii never decreases.
        let u = v.round_up_abs(10);
        assert!(v.le(&u));
    }

    #[test]
    fn dyadic_from_rational_directed() {
        let third = q(1, 3);
        let lo = Dyadic::from_rational_dir(&third, 64, false);
        let hi = Dyadic::from_rational_dir(&third, 64, true);
        assert!(lo.to_rational() <= third && third <= hi.to_rational());
        assert!(hi.sub(&lo).le(&Dyadic::pow2(-60)));
        let neg = q(-7, 5);
        let lo2 = Dyadic::from_rational_dir(&neg, 64, false);
        let hi2 = Dyadic::from_rational_dir(&neg, 64, true);
        assert!(lo2.to_rational() <= neg && neg <= hi2.to_rational());
    }

    #[test]
    fn dyadic_decimal_strings() {
        let v = Dyadic::from_i64(1);
        assert_eq!(v.to_decimal(3, false), "1.00e0");
        let h = Dyadic::pow2(-1);
        assert_eq!(h.to_decimal(2, false), "5.0e-1");
        let big = Dyadic::from_i64(-1536);
        assert_eq!(big.to_decimal(4, false), "-1.536e3");
    }

    #[test]
    fn gaussian_rational_field_ops() {
        let z = GaussianRational::new(q(1, 2), q(1, 3));
        let w = GaussianRational::new(q(2, 1), q(-1, 1));
        let p = z.mul(&w);
        assert_eq!(p.re, q(4, 3)); // 1/2*2 + 1/3*1 = 4/3
        assert_eq!(p.im, q(1, 6)); // 1/2*(-1) + 1/3*2 = 1/6
        let r = p.div(&w).unwrap();
        assert_eq!(r.re, z.re);
        assert_eq!(r.im, z.im);
        assert_eq!(z.mul(&z.conj()).re, z.norm_sqr());
        assert_eq!(GaussianRational::i().pow(4), GaussianRational::one());
    }

    #[test]
    fn sparse_poly_basic_ops() {
        // Q_bin = 1 - x - y
        let p = SparsePoly::one()
            .sub(&SparsePoly::var(Var::X))
            .sub(&SparsePoly::var(Var::Y));
        assert_eq!(p.num_terms(), 3);
        assert_eq!(p.deg_x(), 1);
        assert_eq!(p.deg_y(), 1);
        assert!(!p.is_binomial());
        let one_minus_xy = SparsePoly::one().sub(&SparsePoly::var(Var::X).mul(&SparsePoly::var(Var::Y)));
        assert!(one_minus_xy.is_binomial());
        let v = p.eval_q(
            &GaussianRational::from_rational(q(1, 2)),
            &GaussianRational::from_rational(q(1, 2)),
        );
        assert!(v.is_zero());
    }

    #[test]
    fn sparse_poly_derivative_example() {
        // d/dy (1 - 3y + 2y^2 + x^3 y^5) = -3 + 4y + 5 x^3 y^4
        let mut p = SparsePoly::zero();
        p.add_term(0, 0, q(1, 1));
        p.add_term(0, 1, q(-3, 1));
        p.add_term(0, 2, q(2, 1));
        p.add_term(3, 5, q(1, 1));
        let d = poly_derivative(&p, Var::Y, 1);
        assert_eq!(d.coeff(0, 0), q(-3, 1));
        assert_eq!(d.coeff(0, 1), q(4, 1));
        assert_eq!(d.coeff(3, 4), q(5, 1));
        assert_eq!(d.num_terms(), 3);
    }

    #[test]
    fn uni_divrem_and_gcd() {
        // (t-1)(t+2) = t^2 + t - 2 divided by (t-1)
        let prod = uni_from_i64(&[-2, 1, 1]);
        let f1 = uni_from_i64(&[-1, 1]);
        let (qt, r) = uni_divrem(&prod, &f1);
        assert!(r.is_empty());
        assert_eq!(qt, uni_from_i64(&[2, 1]));
        let g = uni_gcd(&prod, &f1);
        assert_eq!(g, uni_from_i64(&[-1, 1]));
        assert!(uni_gcd(&uni_from_i64(&[1]), &prod).len() == 1);
    }

    #[test]
    fn squarefree_pinned_examples() {
        // (t-1)^2 (t+2) -> (t-1)(t+2)
        let f = uni_mul(&uni_mul(&uni_from_i64(&[-1, 1]), &uni_from_i64(&[-1, 1])), &uni_from_i64(&[2, 1]));
        let sf = uni_squarefree(&f);
        assert_eq!(sf, uni_from_i64(&[-2, 1, 1]));
        // t^3 -> t
        let t3 = uni_from_i64(&[0, 0, 0, 1]);
        assert_eq!(uni_squarefree(&t3), uni_from_i64(&[0, 1]));
        // already squarefree stays proportional
        let sf2 = uni_squarefree(&uni_from_i64(&[-2, 0, 2]));
        assert_eq!(sf2, uni_from_i64(&[-1, 0, 1]));
    }

    #[test]
    fn yun_decomposition() {
        // (t-1)^2 (t+2)
        let f = uni_mul(&uni_mul(&uni_from_i64(&[-1, 1]), &uni_from_i64(&[-1, 1])), &uni_from_i64(&[2, 1]));
        let parts = uni_yun(&f);
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0], (1, uni_from_i64(&[2, 1])));
        assert_eq!(parts[1], (2, uni_from_i64(&[-1, 1])));
        // t^4: single factor t with multiplicity 4
        let t4 = uni_from_i64(&[0, 0, 0, 0, 1]);
        let parts = uni_yun(&t4);
        assert_eq!(parts, vec![(4, uni_from_i64(&[0, 1]))]);
    }

    #[test]
    fn resultant_pinned_examples() {
        // Res_t(t^2 - 2, t^2 - 3) = 1
        let a = uni_from_i64(&[-2, 0, 1]);
        let b = uni_from_i64(&[-3, 0, 1]);
        assert_eq!(resultant_uni(&a, &b), q(1, 1));
        // Res_t(t - 1, t - 2) = +-1
        let c = uni_from_i64(&[-1, 1]);
        let d = uni_from_i64(&[-2, 1]);
        let r = resultant_uni(&c, &d);
        assert!(r == q(1, 1) || r == q(-1, 1));
        // Common root makes it vanish.
        let e = uni_from_i64(&[-2, 1, 1]); // (t-1)(t+2)
        let f = uni_from_i64(&[-1, 1]); // t-1
        assert!(resultant_uni(&e, &f).is_zero());
    }

    #[test]
    fn resultant_matches_sylvester_determinant() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..200 {
            let da = rng.gen_range(1..6);
            let db = rng.gen_range(1..6);
            let mk = |rng: &mut rand_chacha::ChaCha8Rng, d: usize| -> Vec<BigInt> {
                let mut v: Vec<BigInt> =
                    (0..=d).map(|_| BigInt::from(rng.gen_range(-9i64..=9))).collect();
                if v[d].is_zero() {
                    v[d] = BigInt::one();
                }
                v
            };
            let a = mk(&mut rng, da);
            let b = mk(&mut rng, db);
            assert_eq!(resultant_z(&a, &b), sylvester_resultant_z(&a, &b), "a={:?} b={:?}", a, b);
        }
    }

    #[test]
    fn bivariate_resultant_pinned() {
        // Res_y(1 - x - y, y - x) = +-(1 - 2x)
        let p = SparsePoly::one()
            .sub(&SparsePoly::var(Var::X))
            .sub(&SparsePoly::var(Var::Y));
        let mut qp = SparsePoly::var(Var::Y);
        qp = qp.sub(&SparsePoly::var(Var::X));
        let r = poly_resultant(&p, &qp, Var::Y).unwrap();
        let expected = SparsePoly::one().sub(&SparsePoly::var(Var::X).scale(&q(2, 1)));
        assert!(r == expected || r == expected.neg(), "got {}", r);
    }

    #[test]
    fn bivariate_resultant_degenerate() {
        let p = SparsePoly::var(Var::X);
        let qp = SparsePoly::one().sub(&SparsePoly::var(Var::X));
        match poly_resultant(&p, &qp, Var::Y) {
            Err(Error::DegenerateResultant) => {}
            other => panic!("expected degenerate resultant, got {:?}", other.map(|p| p.to_string())),
        }
    }

    #[test]
    fn bivariate_resultant_vanishes_on_common_roots() {
        // p = y - x, q = y - x^2 share roots where x = x^2.
        let p = SparsePoly::var(Var::Y).sub(&SparsePoly::var(Var::X));
        let qp = SparsePoly::var(Var::Y).sub(&SparsePoly::var(Var::X).mul(&SparsePoly::var(Var::X)));
        let r = poly_resultant(&p, &qp, Var::Y).unwrap().as_uni(Var::X).unwrap();
        assert!(uni_eval(&r, &q(0, 1)).is_zero());
        assert!(uni_eval(&r, &q(1, 1)).is_zero());
        assert!(!uni_eval(&r, &q(2, 1)).is_zero());
    }

    #[test]
    fn interpolation_roundtrip() {
        let p = uni_from_i64(&[3, -2, 0, 5]);
        let nodes: Vec<(Rational, Rational)> =
            (0..6).map(|k| (rat_int(k), uni_eval(&p, &rat_int(k)))).collect();
        assert_eq!(uni_interpolate(&nodes), p);
    }

    #[test]
    fn simplest_rational_examples() {
        assert_eq!(simplest_rational_between(&q(3, 10), &q(1, 2)), q(1, 3));
        assert_eq!(simplest_rational_between(&q(1, 3), &q(3, 1)), q(1, 1));
        assert_eq!(simplest_rational_between(&q(5, 2), &q(7, 2)), q(3, 1));
        assert_eq!(simplest_rational_between(&q(0, 1), &q(1, 5)), q(1, 6));
        let r = simplest_rational_between(&q(141, 100), &q(142, 100));
        assert!(q(141, 100) < r && r < q(142, 100));
        assert_eq!(r, q(17, 12));
    }

    #[test]
    fn shear_expands_and_inverts() {
        // (x^2 + y) under x -> x - y: x^2 - 2xy + y^2 + y.
        let mut p = SparsePoly::zero();
        p.add_term(2, 0, q(1, 1));
        p.add_term(0, 1, q(1, 1));
        let s = p.shear(1);
        let mut want = SparsePoly::zero();
        want.add_term(2, 0, q(1, 1));
        want.add_term(1, 1, q(-2, 1));
        want.add_term(0, 2, q(1, 1));
        want.add_term(0, 1, q(1, 1));
        assert_eq!(s, want);

        let mut r = SparsePoly::zero();
        r.add_term(3, 2, q(5, 3));
        r.add_term(1, 0, q(-7, 2));
        r.add_term(0, 4, q(1, 1));
        assert_eq!(r.shear(3).shear(-3), r);
        assert_eq!(r.shear(0), r);
    }

    #[test]
    fn poly_display_is_canonical() {
        let mut p = SparsePoly::zero();
        p.add_term(0, 0, q(1, 1));
        p.add_term(1, 1, q(-2, 1));
        p.add_term(3, 5, q(1, 2));
        assert_eq!(p.to_string(), "1 - 2*x*y + 1/2*x^3*y^5");
    }

    #[test]
    fn bivariate_gcd_recovers_common_factors() {
        let one = SparsePoly::one();
        let x = SparsePoly::var(Var::X);
        let y = SparsePoly::var(Var::Y);
        let line = one.sub(&x).sub(&y);
        let xy_sum = x.add(&y);

        let g = gcd_bivar(&line.mul(&xy_sum), &line.mul(&x));
        // Normalization makes the lex-leading coefficient one: -(1 - x - y).
        assert!(g.sub(&x.add(&y).sub(&one)).is_zero());
        assert!(divexact_bivar(&line, &g).is_ok());

        // Coprime inputs give a constant gcd.
        let g2 = gcd_bivar(&line, &xy_sum);
        assert_eq!(g2.max_degree(), 0);

        // Q = x*y^2 + y = y*(x*y + 1): the gcd with Q_x = y^2 is y.
        let qp = x.mul(&y).mul(&y).add(&y);
        let qx = qp.derivative(Var::X);
        let g3 = gcd_bivar(&qp, &qx);
        assert!(g3.sub(&y).is_zero());

        // Content in y is found even when the x-parts are coprime.
        let a = y.mul(&one.add(&x));
        let b = y.mul(&one.sub(&x));
        let g4 = gcd_bivar(&a, &b);
        assert!(g4.sub(&y).is_zero());

        // gcd with zero returns the other argument, normalized.
        let g5 = gcd_bivar(&SparsePoly::zero(), &line.scale(&q(7, 3)));
        assert_eq!(g5.max_degree(), line.max_degree());
    }

    #[test]
    fn bivariate_exact_division() {
        let one = SparsePoly::one();
        let x = SparsePoly::var(Var::X);
        let y = SparsePoly::var(Var::Y);
        let a = one.sub(&x).sub(&y);
        let b = one.add(&x.mul(&y)).add(&y.mul(&y));
        let prod = a.mul(&b);
        let qt = divexact_bivar(&prod, &a).unwrap();
        assert!(qt.sub(&b).is_zero());
        let qt2 = divexact_bivar(&prod, &b).unwrap();
        assert!(qt2.sub(&a).is_zero());
        // Division by a y-only factor.
        let c = y.mul(&y).add(&y);
        let prod2 = b.mul(&c);
        assert!(divexact_bivar(&prod2, &c).unwrap().sub(&b).is_zero());
        // Non-divisor is rejected.
        assert!(divexact_bivar(&prod, &x).is_err());
        assert!(divexact_bivar(&a, &b).is_err());
    }
}
