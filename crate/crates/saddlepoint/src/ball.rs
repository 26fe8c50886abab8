//! Ball arithmetic over the complex numbers.
//!
//! A complex ball B(c, r) is an exact dyadic center together with an upper
//! bound r for the distance to the represented value; a real ball is the one
//! dimensional analogue.  Ring operations round the center to the working
//! precision and absorb both the rounding and the incoming radii into the
//! result radius, so the inclusion property holds unconditionally: whenever
//! z is in A and w is in B, z op w is in A op B.
//!
//! On top of the ring operations the module provides certified enclosures of
//! log|z|, principal square roots, pi, fractional powers of balls near one,
//! and the quarter-sector test: a certification that every value of a ball
//! has argument within pi/4 of the positive real axis, which is the working
//! predicate of all ascent certificates.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exactpoly::{Dyadic, GaussianRational, Rad, Rational, SparsePoly, Var};

/// Default working precision in bits.
pub const DEFAULT_PREC: u32 = 128;

// ---------------------------------------------------------------------------
// Dyadic square-root bounds
// ---------------------------------------------------------------------------

/// Certified bounds lo <= sqrt(d) <= hi for d >= 0, with about `prec`
/// significant bits.
pub fn sqrt_bounds(d: &Dyadic, prec: u32) -> (Dyadic, Dyadic) {
    assert!(d.signum() >= 0, "sqrt of a negative dyadic");
    if d.is_zero() {
        return (Dyadic::zero(), Dyadic::zero());
    }
    let man = d.mantissa().magnitude().clone();
    let bits = man.bits();
    let target = 2 * prec as u64 + 2;
    let mut extra: u64 = if bits < target { target - bits } else { 0 };
    if (d.exponent() - extra as i64) % 2 != 0 {
        extra += 1;
    }
    let v = man << extra as usize;
    let e2 = d.exponent() - extra as i64;
    let s = v.sqrt();
    let exact = &s * &s == v;
    let lo = Dyadic::new(BigInt::from(s.clone()), e2 / 2);
    let hi = if exact {
        lo.clone()
    } else {
        Dyadic::new(BigInt::from(s + 1u32), e2 / 2)
    };
    (lo, hi)
}

// ---------------------------------------------------------------------------
// Real balls
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct RealBall {
    pub mid: Dyadic,
    pub rad: Rad,
}

impl RealBall {
    pub fn exact(mid: Dyadic) -> Self {
        RealBall { mid, rad: Rad::zero() }
    }

    pub fn zero() -> Self {
        RealBall::exact(Dyadic::zero())
    }

    pub fn from_rational(q: &Rational, prec: u32) -> Self {
        let (mid, err) = Dyadic::from_rational(q, prec);
        RealBall { mid, rad: Rad::from_dyadic_up(&err) }
    }

    /// Ball covering the exact interval [lo, hi].
    pub fn from_endpoints(lo: &Dyadic, hi: &Dyadic, prec: u32) -> Self {
        let two_mid = lo.add(hi);
        let (m, err) = two_mid.half().round(prec);
        let half_width = hi.sub(lo).half().abs();
        RealBall { mid: m, rad: Rad::from_dyadic_up(&half_width.add(&err)) }
    }

    pub fn lo(&self) -> Option<Dyadic> {
        self.rad.to_dyadic().map(|r| self.mid.sub(&r))
    }

    pub fn hi(&self) -> Option<Dyadic> {
        self.rad.to_dyadic().map(|r| self.mid.add(&r))
    }

    pub fn add(&self, o: &Self, prec: u32) -> Self {
        let (m, err) = self.mid.add(&o.mid).round(prec);
        RealBall { mid: m, rad: self.rad.add(&o.rad).add(&Rad::from_dyadic_up(&err)) }
    }

    pub fn neg(&self) -> Self {
        RealBall { mid: self.mid.neg(), rad: self.rad.clone() }
    }

    pub fn sub(&self, o: &Self, prec: u32) -> Self {
        self.add(&o.neg(), prec)
    }

    pub fn mul(&self, o: &Self, prec: u32) -> Self {
        let (m, err) = self.mid.mul(&o.mid).round(prec);
        let rad = Rad::from_dyadic_up(&self.mid)
            .mul(&o.rad)
            .add(&self.rad.mul(&Rad::from_dyadic_up(&o.mid)))
            .add(&self.rad.mul(&o.rad))
            .add(&Rad::from_dyadic_up(&err));
        RealBall { mid: m, rad }
    }

    pub fn scale_rational(&self, c: &Rational, prec: u32) -> Self {
        let other = RealBall::from_rational(c, prec + 16);
        self.mul(&other, prec)
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        RealBall { mid: self.mid.mul_pow2(k), rad: self.rad.mul_pow2(k) }
    }

    /// True iff every value of the ball is strictly positive.
    pub fn certainly_positive(&self) -> bool {
        self.mid.signum() > 0 && self.rad.lt_dyadic(&self.mid)
    }

    pub fn certainly_negative(&self) -> bool {
        self.neg().certainly_positive()
    }

    pub fn contains_zero(&self) -> bool {
        !self.certainly_positive() && !self.certainly_negative()
    }

    /// True iff every value of self is strictly below every value of other.
    pub fn certainly_lt(&self, o: &Self) -> bool {
        match (self.hi(), o.lo()) {
            (Some(h), Some(l)) => h.lt(&l),
            _ => false,
        }
    }

    pub fn contains_rational(&self, q: &Rational) -> bool {
        match self.rad.to_dyadic() {
            None => true,
            Some(r) => {
                let diff = (self.mid.to_rational() - q).abs();
                diff <= r.to_rational()
            }
        }
    }

    /// Certified enclosure of sqrt, requiring the ball to be nonnegative.
    pub fn sqrt(&self, prec: u32) -> Result<RealBall> {
        let lo = self.lo().ok_or(Error::BallDomain("sqrt of unbounded interval"))?;
        let hi = self.hi().unwrap();
        if lo.signum() < 0 {
            return Err(Error::BallDomain("sqrt of possibly negative interval"));
        }
        let (slo, _) = sqrt_bounds(&lo, prec);
        let (_, shi) = sqrt_bounds(&hi, prec);
        Ok(RealBall::from_endpoints(&slo, &shi, prec))
    }

    pub fn recip(&self, prec: u32) -> Result<RealBall> {
        if self.contains_zero() {
            return Err(Error::BallDivisionByZero);
        }
        let lo = self.lo().ok_or(Error::BallDivisionByZero)?;
        let hi = self.hi().unwrap();
        let rlo = Dyadic::from_rational_dir(&hi.to_rational().recip(), prec, false);
        let rhi = Dyadic::from_rational_dir(&lo.to_rational().recip(), prec, true);
        Ok(RealBall::from_endpoints(&rlo, &rhi, prec))
    }

    pub fn div(&self, o: &Self, prec: u32) -> Result<RealBall> {
        Ok(self.mul(&o.recip(prec)?, prec))
    }

    /// Upper bound of |values|.
    pub fn abs_upper(&self) -> Option<Dyadic> {
        self.rad.to_dyadic().map(|r| self.mid.abs().add(&r))
    }

    pub fn to_f64(&self) -> f64 {
        self.mid.to_f64()
    }
}

// ---------------------------------------------------------------------------
// Complex balls
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct ComplexBall {
    pub re: Dyadic,
    pub im: Dyadic,
    pub rad: Rad,
}

impl ComplexBall {
    pub fn exact(re: Dyadic, im: Dyadic) -> Self {
        ComplexBall { re, im, rad: Rad::zero() }
    }

    pub fn zero() -> Self {
        ComplexBall::exact(Dyadic::zero(), Dyadic::zero())
    }

    pub fn one() -> Self {
        ComplexBall::exact(Dyadic::one(), Dyadic::zero())
    }

    pub fn from_i64(n: i64) -> Self {
        ComplexBall::exact(Dyadic::from_i64(n), Dyadic::zero())
    }

    pub fn from_gaussian(q: &GaussianRational, prec: u32) -> Self {
        let (re, er) = Dyadic::from_rational(&q.re, prec);
        let (im, ei) = Dyadic::from_rational(&q.im, prec);
        ComplexBall { re, im, rad: Rad::from_dyadic_up(&er.add(&ei)) }
    }

    pub fn from_rational(q: &Rational, prec: u32) -> Self {
        Self::from_gaussian(&GaussianRational::from_rational(q.clone()), prec)
    }

    pub fn from_real(r: &RealBall) -> Self {
        ComplexBall { re: r.mid.clone(), im: Dyadic::zero(), rad: r.rad.clone() }
    }

    pub fn inflate(&self, extra: &Rad) -> Self {
        ComplexBall { re: self.re.clone(), im: self.im.clone(), rad: self.rad.add(extra) }
    }

    pub fn with_rad(&self, rad: Rad) -> Self {
        ComplexBall { re: self.re.clone(), im: self.im.clone(), rad }
    }

    /// Exact Gaussian rational equal to the center.
    pub fn center_gaussian(&self) -> GaussianRational {
        GaussianRational::new(self.re.to_rational(), self.im.to_rational())
    }

    /// Real part as a real ball (the disk projects onto an interval).
    pub fn re_ball(&self) -> RealBall {
        RealBall { mid: self.re.clone(), rad: self.rad.clone() }
    }

    pub fn im_ball(&self) -> RealBall {
        RealBall { mid: self.im.clone(), rad: self.rad.clone() }
    }

    /// |center|^2 exactly.
    pub fn center_norm_sqr(&self) -> Dyadic {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }

    /// Certified lower bound of |center|.
    pub fn center_abs_lower(&self, prec: u32) -> Dyadic {
        sqrt_bounds(&self.center_norm_sqr(), prec).0
    }

    /// Certified upper bound of |center|.
    pub fn center_abs_upper(&self, prec: u32) -> Dyadic {
        sqrt_bounds(&self.center_norm_sqr(), prec).1
    }

    /// Certified lower bound of |z| over the ball; None when the ball may
    /// contain zero.
    pub fn abs_lower(&self, prec: u32) -> Option<Dyadic> {
        let cl = self.center_abs_lower(prec);
        match self.rad.to_dyadic() {
            None => None,
            Some(r) => {
                let lo = cl.sub(&r);
                if lo.signum() > 0 {
                    Some(lo)
                } else {
                    None
                }
            }
        }
    }

    /// Certified upper bound of |z| over the ball (None if radius infinite).
    pub fn abs_upper(&self, prec: u32) -> Option<Dyadic> {
        self.rad.to_dyadic().map(|r| self.center_abs_upper(prec).add(&r))
    }

    /// |z| as a real ball.
    pub fn abs_ball(&self, prec: u32) -> Result<RealBall> {
        let hi = self.abs_upper(prec).ok_or(Error::BallDomain("unbounded ball"))?;
        let lo = self.abs_lower(prec).unwrap_or_else(Dyadic::zero);
        Ok(RealBall::from_endpoints(&lo, &hi, prec))
    }

    pub fn excludes_zero(&self, prec: u32) -> bool {
        self.abs_lower(prec).is_some()
    }

    pub fn conj(&self) -> Self {
        ComplexBall { re: self.re.clone(), im: self.im.neg(), rad: self.rad.clone() }
    }

    pub fn neg(&self) -> Self {
        ComplexBall { re: self.re.neg(), im: self.im.neg(), rad: self.rad.clone() }
    }

    /// Exact multiplication by i (a quarter rotation).
    pub fn mul_i(&self) -> Self {
        ComplexBall { re: self.im.neg(), im: self.re.clone(), rad: self.rad.clone() }
    }

    pub fn add(&self, o: &Self, prec: u32) -> Self {
        let (re, er) = self.re.add(&o.re).round(prec);
        let (im, ei) = self.im.add(&o.im).round(prec);
        let rad = self
            .rad
            .add(&o.rad)
            .add(&Rad::from_dyadic_up(&er.add(&ei)));
        ComplexBall { re, im, rad }
    }

    pub fn sub(&self, o: &Self, prec: u32) -> Self {
        self.add(&o.neg(), prec)
    }

    pub fn mul(&self, o: &Self, prec: u32) -> Self {
        let (re, er) = self
            .re
            .mul(&o.re)
            .sub(&self.im.mul(&o.im))
            .round(prec);
        let (im, ei) = self
            .re
            .mul(&o.im)
            .add(&self.im.mul(&o.re))
            .round(prec);
        let a_abs = Rad::from_dyadic_up(&self.center_abs_upper(RAD_PREC));
        let b_abs = Rad::from_dyadic_up(&o.center_abs_upper(RAD_PREC));
        let rad = a_abs
            .mul(&o.rad)
            .add(&self.rad.mul(&b_abs))
            .add(&self.rad.mul(&o.rad))
            .add(&Rad::from_dyadic_up(&er.add(&ei)));
        ComplexBall { re, im, rad }
    }

    pub fn square(&self, prec: u32) -> Self {
        self.mul(self, prec)
    }

    pub fn scale_rational(&self, c: &Rational, prec: u32) -> Self {
        self.mul(&ComplexBall::from_rational(c, prec + 16), prec)
    }

    pub fn scale_gaussian(&self, c: &GaussianRational, prec: u32) -> Self {
        self.mul(&ComplexBall::from_gaussian(c, prec + 16), prec)
    }

    /// Certified reciprocal; errors when the ball may contain zero.
    pub fn recip(&self, prec: u32) -> Result<Self> {
        let ell = self
            .abs_lower(prec)
            .ok_or(Error::BallDivisionByZero)?;
        let r = self.rad.to_dyadic().unwrap();
        // Center reciprocal: conj(c) / |c|^2, rounded.
        let n = self.center_norm_sqr().to_rational();
        let wre = self.re.to_rational() / &n;
        let wim = -self.im.to_rational() / &n;
        let (cre, er) = Dyadic::from_rational(&wre, prec);
        let (cim, ei) = Dyadic::from_rational(&wim, prec);
        // |1/z - 1/c| <= r / (|c| (|c| - r)); |c| >= ell + r is implied by
        // ell = |c|_lo - r ... conservatively use ell for both factors:
        // |c| >= ell and |c| - r >= ell give |1/z - 1/c| <= r / ell^2 when
        // computed with the *true* lower bounds; we use |c|_lo and ell.
        let c_lo = self.center_abs_lower(prec);
        let denom = c_lo.to_rational() * ell.to_rational();
        let bound = r.to_rational() / denom;
        let rad = Rad::from_dyadic_up(&Dyadic::from_rational_dir(&bound, 32, true))
            .add(&Rad::from_dyadic_up(&er.add(&ei)));
        Ok(ComplexBall { re: cre, im: cim, rad })
    }

    pub fn div(&self, o: &Self, prec: u32) -> Result<Self> {
        Ok(self.mul(&o.recip(prec)?, prec))
    }

    /// Integer power, negative exponents via one reciprocal.
    pub fn pow_i64(&self, e: i64, prec: u32) -> Result<Self> {
        let mut n = e.unsigned_abs();
        let mut base = self.clone();
        let mut acc = ComplexBall::one();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base, prec);
            }
            n >>= 1;
            if n > 0 {
                base = base.square(prec);
            }
        }
        if e < 0 {
            acc = acc.recip(prec)?;
        }
        Ok(acc)
    }

    /// Certified: self lies in the interior of `other`.
    pub fn contained_in_interior(&self, other: &Self, prec: u32) -> bool {
        let r2 = match &other.rad {
            Rad::Inf => return true,
            Rad::Fin(d) => d.clone(),
        };
        let r1 = match &self.rad {
            Rad::Inf => return false,
            Rad::Fin(d) => d.clone(),
        };
        let diff = self.sub_center(other);
        let dist_up = diff.center_abs_upper(prec);
        dist_up.add(&r1).lt(&r2)
    }

    fn sub_center(&self, other: &Self) -> ComplexBall {
        ComplexBall::exact(self.re.sub(&other.re), self.im.sub(&other.im))
    }

    /// Certified: the two balls have empty intersection.
    pub fn certainly_disjoint(&self, other: &Self, prec: u32) -> bool {
        let (r1, r2) = match (self.rad.to_dyadic(), other.rad.to_dyadic()) {
            (Some(a), Some(b)) => (a, b),
            _ => return false,
        };
        let diff = self.sub_center(other);
        let dist_lo = sqrt_bounds(&diff.center_norm_sqr(), prec).0;
        r1.add(&r2).lt(&dist_lo)
    }

    pub fn to_f64s(&self) -> (f64, f64, f64) {
        (self.re.to_f64(), self.im.to_f64(), self.rad.to_f64())
    }
}

/// Precision used for radius-side magnitude computations.
const RAD_PREC: u32 = 32;

// ---------------------------------------------------------------------------
// Polynomial evaluation on balls
// ---------------------------------------------------------------------------

/// Enclosure of p(x, y) over the product of the two balls.
pub fn eval_poly_ball(p: &SparsePoly, x: &ComplexBall, y: &ComplexBall, prec: u32) -> ComplexBall {
    let rows = p.by_powers_of(Var::Y);
    let mut acc = ComplexBall::zero();
    for row in rows.iter().rev() {
        acc = acc.mul(y, prec);
        // Horner in x for this row.
        let mut racc = ComplexBall::zero();
        for c in row.iter().rev() {
            racc = racc.mul(x, prec);
            if !c.is_zero() {
                racc = racc.add(&ComplexBall::from_rational(c, prec), prec);
            }
        }
        acc = acc.add(&racc, prec);
    }
    acc
}

// ---------------------------------------------------------------------------
// Certified logarithms
// ---------------------------------------------------------------------------

/// atanh of t = tg * 2^-K (0 <= tg <= (2^K)/3 + 1) on the 2^-K grid.
/// Returns scaled (lo, hi) with lo <= 2^K atanh(t) <= hi... both as grid
/// integers (the true value times 2^K lies in [lo, hi]).
fn atanh_grid(tg: &BigInt, k_bits: u32) -> (BigInt, BigInt) {
    let kk = BigInt::from(1u32) << k_bits as usize;
    debug_assert!(tg * 3u32 <= &kk * 2u32, "atanh argument out of range");
    let t2 = (tg * tg) >> k_bits as usize;
    let mut x = tg.clone();
    let mut sum = tg.clone();
    let mut iters: u64 = 1;
    let max_iters = (k_bits as u64) / 2 + 3;
    let mut k = 1u64;
    while !x.is_zero() && k <= max_iters {
        x = (&x * &t2) >> k_bits as usize;
        let term = &x / BigInt::from(2 * k + 1);
        sum += &term;
        iters += 1;
        k += 1;
    }
    let slack = BigInt::from(3 * iters + 4);
    (sum.clone(), sum + slack)
}

/// Directed enclosure of ln(2) on the 2^-K grid: (lo, hi) scaled by 2^K.
fn ln2_grid(k_bits: u32) -> (BigInt, BigInt) {
    // ln 2 = 2 atanh(1/3).
    let third = (BigInt::from(1u32) << k_bits as usize) / 3u32;
    let (lo, _) = atanh_grid(&third, k_bits);
    let (_, hi) = atanh_grid(&(third + 1u32), k_bits);
    (lo * 2u32, hi * 2u32)
}

/// Directed bound for ln(d), d > 0.  `upper` selects the side.
pub fn ln_dyadic_dir(d: &Dyadic, prec: u32, upper: bool) -> Dyadic {
    assert!(d.signum() > 0, "log of a nonpositive number");
    if d == &Dyadic::one() {
        return Dyadic::zero();
    }
    let k_bits = prec + 32;
    // Round d to at most prec+8 bits in the direction that does not cross
    // the target side (ln is increasing).
    let dr = if upper {
        d.round_up_abs(prec + 8)
    } else {
        d.round(prec + 8).0
    };
    let b = dr.bits() as i64;
    let e = dr.exponent() + b - 1; // dr = m * 2^e with m in [1, 2)
    // Scaled mantissa m on the grid: m_scaled = man << (k_bits - (b-1)).
    let man = dr.mantissa().magnitude().clone();
    let shift = k_bits as i64 - (b - 1);
    let m_scaled = if shift >= 0 {
        BigInt::from(man) << shift as usize
    } else {
        BigInt::from(man) >> (-shift) as usize
    };
    let unit = BigInt::from(1u32) << k_bits as usize;
    // t = (m - 1)/(m + 1) on the grid, floor.
    let t_num = (&m_scaled - &unit) << k_bits as usize;
    let t_den = &m_scaled + &unit;
    let t_floor = t_num.div_floor(&t_den);
    let (ln2_lo, ln2_hi) = ln2_grid(k_bits);
    let e_big = BigInt::from(e);
    let value = if upper {
        let (_, a_hi) = atanh_grid(&(t_floor + 1u32), k_bits);
        let ln2_term = if e >= 0 { &e_big * &ln2_hi } else { &e_big * &ln2_lo };
        a_hi * 2u32 + ln2_term + 1u32
    } else {
        let (a_lo, _) = atanh_grid(&t_floor, k_bits);
        let ln2_term = if e >= 0 { &e_big * &ln2_lo } else { &e_big * &ln2_hi };
        a_lo * 2u32 + ln2_term - 1u32
    };
    Dyadic::new(value, -(k_bits as i64))
}

/// Certified enclosure of log|z| over a complex ball that excludes zero.
pub fn ball_log_abs(z: &ComplexBall, prec: u32) -> Result<RealBall> {
    let lo = z
        .abs_lower(prec)
        .ok_or(Error::BallDomain("log of an enclosure possibly containing zero"))?;
    let hi = z.abs_upper(prec).ok_or(Error::BallDomain("log of unbounded enclosure"))?;
    let llo = ln_dyadic_dir(&lo, prec, false);
    let lhi = ln_dyadic_dir(&hi, prec, true);
    Ok(RealBall::from_endpoints(&llo, &lhi, prec))
}

// ---------------------------------------------------------------------------
// Pi
// ---------------------------------------------------------------------------

/// Grid enclosure of atan(1/inv) scaled by 2^K.
fn atan_inv_grid(inv: u64, k_bits: u32) -> (BigInt, BigInt) {
    let unit = BigInt::from(1u32) << k_bits as usize;
    let t = &unit / BigInt::from(inv);
    let t2 = (&t * &t) >> k_bits as usize;
    let mut x = t.clone();
    let mut sum = t.clone();
    let mut iters: u64 = 1;
    let mut k = 1u64;
    let max_iters = k_bits as u64 + 4;
    while !x.is_zero() && k <= max_iters {
        x = (&x * &t2) >> k_bits as usize;
        let term = &x / BigInt::from(2 * k + 1);
        if k % 2 == 1 {
            sum -= &term;
        } else {
            sum += &term;
        }
        iters += 1;
        k += 1;
    }
    let slack = BigInt::from(3 * iters + 6);
    (&sum - &slack, sum + slack)
}

/// Certified enclosure of pi (Machin's formula).
pub fn pi_ball(prec: u32) -> RealBall {
    let k_bits = prec + 32;
    let (a5_lo, a5_hi) = atan_inv_grid(5, k_bits);
    let (a239_lo, a239_hi) = atan_inv_grid(239, k_bits);
    let lo = &a5_lo * 16u32 - &a239_hi * 4u32;
    let hi = &a5_hi * 16u32 - &a239_lo * 4u32;
    RealBall::from_endpoints(
        &Dyadic::new(lo, -(k_bits as i64)),
        &Dyadic::new(hi, -(k_bits as i64)),
        prec,
    )
}

// ---------------------------------------------------------------------------
// Quarter-sector certification
// ---------------------------------------------------------------------------

/// Certify that every value of the ball lies in the open sector
/// S = { z : |arg z| < pi/4 }.
///
/// The test squares the ball, which maps S into the right half plane: if the
/// real-part interval of the square stays positive, the input is contained
/// in S union -S; the sign of the real part of the input center then selects
/// the component, since a (connected) ball cannot meet both.
pub fn ball_in_quarter_sector(b: &ComplexBall, prec: u32) -> bool {
    let sq = b.square(prec);
    if !(sq.re.signum() > 0 && sq.rad.lt_dyadic(&sq.re)) {
        return false;
    }
    b.re.signum() > 0
}

// ---------------------------------------------------------------------------
// Fractional powers near one
// ---------------------------------------------------------------------------

/// Certified (1 + (b-1))^alpha for |alpha| <= 1, valid when |b - 1| is
/// bounded away from 1/2.  Uses the binomial series with an explicit tail.
pub fn powf_near_one(b: &ComplexBall, alpha: &Rational, prec: u32) -> Result<ComplexBall> {
    assert!(alpha.abs() <= Rational::from_integer(BigInt::from(1)), "exponent out of range");
    let delta = b.sub(&ComplexBall::one(), prec);
    let d_up = delta
        .abs_upper(prec)
        .ok_or(Error::BallDomain("unbounded power base"))?;
    if !d_up.lt(&Dyadic::pow2(-1)) {
        return Err(Error::BallDomain("power base too far from one"));
    }
    // Number of terms: smallest N with 2 d^N <= 2^-(prec+2).
    let mut n_terms = 1u32;
    let mut dpow = d_up.round_up_abs(32);
    let target = Dyadic::pow2(-(prec as i64) - 3);
    let cap = 4 * prec + 64;
    while !dpow.lt(&target) {
        dpow = dpow.mul(&d_up).round_up_abs(32);
        n_terms += 1;
        if n_terms > cap {
            return Err(Error::BallDomain("power series does not contract"));
        }
    }
    let mut acc = ComplexBall::one();
    let mut coeff = Rational::from_integer(BigInt::from(1));
    let mut delta_pow = ComplexBall::one();
    for n in 1..=n_terms {
        // C(alpha, n) = C(alpha, n-1) * (alpha - n + 1)/n
        let nr = Rational::from_integer(BigInt::from(n));
        coeff = coeff * (alpha - &nr + Rational::from_integer(BigInt::from(1))) / &nr;
        delta_pow = delta_pow.mul(&delta, prec);
        if coeff.is_zero() {
            break;
        }
        acc = acc.add(&delta_pow.scale_rational(&coeff, prec), prec);
    }
    // Tail: sum_{n > N} |C(alpha,n)| d^n <= d^(N+1)/(1-d) <= 2 d^(N+1) <= target.
    let tail = Rad::from_dyadic_up(&dpow.mul(&d_up).double());
    Ok(acc.inflate(&tail))
}

// ---------------------------------------------------------------------------
// Square roots
// ---------------------------------------------------------------------------

/// Principal square root of an exact dyadic complex point (a, b) != 0,
/// returned as a small enclosure.
fn sqrt_exact_point(a: &Dyadic, b: &Dyadic, prec: u32) -> ComplexBall {
    if b.is_zero() {
        // Pure real input, principal values on and off the cut.
        if a.signum() >= 0 {
            let (lo, hi) = sqrt_bounds(a, prec + 8);
            let u = RealBall::from_endpoints(&lo, &hi, prec);
            return ComplexBall { re: u.mid, im: Dyadic::zero(), rad: u.rad };
        }
        let (lo, hi) = sqrt_bounds(&a.neg(), prec + 8);
        let v = RealBall::from_endpoints(&lo, &hi, prec);
        return ComplexBall { re: Dyadic::zero(), im: v.mid, rad: v.rad };
    }
    let norm = a.mul(a).add(&b.mul(b));
    let (h_lo, h_hi) = sqrt_bounds(&norm, prec + 8);
    // Half-angle: u = sqrt((h + a)/2), v = sign(b) sqrt((h - a)/2).  To avoid
    // cancellation, compute the larger component by its formula and recover
    // the other from u*v = b/2.
    let make_interval = |arg_lo: Dyadic, arg_hi: Dyadic| -> (Dyadic, Dyadic) {
        let clamp0 = |d: Dyadic| if d.signum() < 0 { Dyadic::zero() } else { d };
        let (lo, _) = sqrt_bounds(&clamp0(arg_lo), prec + 8);
        let (_, hi) = sqrt_bounds(&clamp0(arg_hi), prec + 8);
        (lo, hi)
    };
    let half_b = b.to_rational() / Rational::from_integer(BigInt::from(2));
    // Enclosure of num/v for v ranging over [d1, d2] with 0 outside; the map
    // is monotone there, so directed rounding at both endpoints suffices.
    let quot_interval = |num: &Rational, d1: &Dyadic, d2: &Dyadic| -> (Dyadic, Dyadic) {
        let q1 = num / d1.to_rational();
        let q2 = num / d2.to_rational();
        let lo1 = Dyadic::from_rational_dir(&q1, prec, false);
        let hi1 = Dyadic::from_rational_dir(&q1, prec, true);
        let lo2 = Dyadic::from_rational_dir(&q2, prec, false);
        let hi2 = Dyadic::from_rational_dir(&q2, prec, true);
        (lo1.min_val(&lo2), hi1.max_val(&hi2))
    };
    let (u_lo, u_hi, v_lo, v_hi);
    if a.signum() >= 0 {
        let (ul, uh) = make_interval(h_lo.add(a).half(), h_hi.add(a).half());
        // u >= sqrt(h/2) > 0; recover v from u*v = b/2.
        let (vl, vh) = quot_interval(&half_b, &ul, &uh);
        u_lo = ul;
        u_hi = uh;
        v_lo = vl;
        v_hi = vh;
    } else {
        let (ml, mh) = make_interval(h_lo.sub(a).half(), h_hi.sub(a).half());
        // |v| >= sqrt(h/2) > 0; v carries the sign of b; recover u = (b/2)/v.
        let (vl, vh) = if b.signum() > 0 {
            (ml.clone(), mh.clone())
        } else {
            (mh.neg(), ml.neg())
        };
        let (ul, uh) = quot_interval(&half_b, &vl, &vh);
        u_lo = ul;
        u_hi = uh;
        v_lo = vl;
        v_hi = vh;
    }
    let u = RealBall::from_endpoints(&u_lo, &u_hi, prec);
    let v = RealBall::from_endpoints(&v_lo, &v_hi, prec);
    ComplexBall { re: u.mid, im: v.mid, rad: u.rad.add(&v.rad) }
}

/// Principal square root of a ball.  Fails when the ball may contain zero or
/// may straddle the branch cut (the closed negative real axis), except for
/// exact points, where the principal value is taken directly.
pub fn sqrt_principal(b: &ComplexBall, prec: u32) -> Result<ComplexBall> {
    b.abs_lower(prec)
        .ok_or(Error::BallDomain("sqrt of an enclosure possibly containing zero"))?;
    if b.rad.is_zero() {
        return Ok(sqrt_exact_point(&b.re, &b.im, prec));
    }
    // Branch-cut avoidance: Re > 0 certified, or |Im| > 0 certified.
    let r = b.rad.to_dyadic().unwrap();
    let re_pos = b.re.sub(&r).signum() > 0;
    let im_off = b.im.abs().sub(&r).signum() > 0;
    if !(re_pos || im_off) {
        return Err(Error::BallDomain("sqrt enclosure may straddle the branch cut"));
    }
    // w = sqrt(center) * sqrt(1 + delta), |delta| <= r/|center|_lo =: d.
    let center_sqrt = sqrt_exact_point(&b.re, &b.im, prec);
    let c_lo = b.center_abs_lower(prec);
    let d = r.to_rational() / c_lo.to_rational();
    if d >= Rational::new(BigInt::from(1), BigInt::from(2)) {
        return Err(Error::BallDomain("sqrt enclosure too wide relative to its center"));
    }
    // |sqrt(1+delta) - 1| <= (5/8)|delta| for |delta| <= 1/2.
    let factor_err = Dyadic::from_rational_dir(
        &(d * Rational::new(BigInt::from(5), BigInt::from(8))),
        32,
        true,
    );
    let w_abs_up = center_sqrt.center_abs_upper(RAD_PREC);
    let extra = Rad::from_dyadic_up(&w_abs_up.mul(&factor_err));
    Ok(center_sqrt.inflate(&extra))
}

/// A square root of the ball on some continuous branch: principal if the
/// cut is avoided, otherwise computed through an exact quarter rotation.
/// The result w satisfies w^2 in b; the sign of the branch is unspecified.
pub fn sqrt_any_branch(b: &ComplexBall, prec: u32) -> Result<ComplexBall> {
    match sqrt_principal(b, prec) {
        Ok(w) => Ok(w),
        Err(Error::BallDomain("sqrt enclosure may straddle the branch cut")) => {
            let rotated = b.mul_i();
            let w2 = sqrt_principal(&rotated, prec)?;
            // sqrt(z) = sqrt(iz) * (1 - i)/sqrt(2) on a continuous branch.
            let (s_lo, s_hi) = sqrt_bounds(&Dyadic::pow2(-1), prec + 8);
            let s = RealBall::from_endpoints(&s_lo, &s_hi, prec);
            let c_rot = ComplexBall {
                re: s.mid.clone(),
                im: s.mid.neg(),
                rad: s.rad.mul_pow2(1),
            };
            Ok(w2.mul(&c_rot, prec))
        }
        Err(e) => Err(e),
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
