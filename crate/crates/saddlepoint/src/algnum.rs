//! Certified algebraic numbers.
//!
//! An algebraic number is carried as a squarefree defining polynomial over
//! Q(i) together with a complex ball certified to isolate exactly one of its
//! roots.  Root isolation runs a simultaneous Newton-type iteration at
//! escalating precision and then certifies every approximate root with an
//! interval Newton step: for the operator
//!
//!   Phi(B(c,r)) = c - P(c)/P'(c) + (1 - P'(B(c,r))/P'(c)) B(0,r),
//!
//! Phi(B) contained in the interior of B proves that B holds exactly one
//! simple root.
//!
//! Bivariate systems are solved through a triangular form: after a shear
//! u = x + c y generic enough for the system, a pseudo-remainder chain in
//! the fiber variable yields a relation a(u) v + b(u) = 0 holding at every
//! common zero, with a nonvanishing on the whole root set of the
//! u-eliminant.  Each solution is then a certified eliminant root u0 paired
//! with the exact fiber point v0 = -b(u0)/a(u0), and deciding whether a
//! further polynomial vanishes at a solution reduces to a univariate
//! root-membership question.  Discrete predicates (is this number zero? are
//! these two equal? does d vanish at that solution?) go through
//! divisibility, gcds and cofactor exclusion, never through plain numeric
//! closeness.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::ball::{eval_poly_ball, ComplexBall};
use crate::error::{Error, Result};
use crate::exactpoly::{
    bicoeffs_content, bicoeffs_div_content, bicoeffs_prem, bicoeffs_trim, poly_resultant, rat,
    rat_int, resultant_uni, uni_add, uni_deg, uni_derivative, uni_divrem, uni_eval, uni_gcd,
    uni_interpolate, uni_is_zero, uni_mul, uni_primitive, uni_squarefree, uni_trim,
    Dyadic, GaussianRational, Rad, Rational, SparsePoly, UniPoly, Var,
};

/// Hard ceiling for precision escalation, in bits.
pub const PREC_CAP: u32 = 8192;

// ---------------------------------------------------------------------------
// Dense univariate polynomials over Q(i)
// ---------------------------------------------------------------------------

/// Dense polynomial over the Gaussian rationals; index k holds the
/// coefficient of t^k.  Zero polynomial = empty vector.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GaussPoly {
    pub coeffs: Vec<GaussianRational>,
}

impl GaussPoly {
    pub fn new(mut coeffs: Vec<GaussianRational>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        GaussPoly { coeffs }
    }

    pub fn zero() -> Self {
        GaussPoly { coeffs: vec![] }
    }

    pub fn from_uni(p: &UniPoly) -> Self {
        GaussPoly::new(p.iter().map(|c| GaussianRational::from_rational(c.clone())).collect())
    }

    /// t - a.
    pub fn linear(a: &GaussianRational) -> Self {
        GaussPoly::new(vec![a.neg(), GaussianRational::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn deg(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn lead(&self) -> Option<&GaussianRational> {
        self.coeffs.last()
    }

    pub fn eval_q(&self, t: &GaussianRational) -> GaussianRational {
        let mut acc = GaussianRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(t);
            acc = acc.add(c);
        }
        acc
    }

    pub fn eval_ball(&self, z: &ComplexBall, prec: u32) -> ComplexBall {
        let mut acc = ComplexBall::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(z, prec);
            if !c.is_zero() {
                acc = acc.add(&ComplexBall::from_gaussian(c, prec), prec);
            }
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return GaussPoly::zero();
        }
        let mut out = Vec::with_capacity(self.coeffs.len() - 1);
        for (k, c) in self.coeffs.iter().enumerate().skip(1) {
            out.push(c.scale(&rat_int(k as i64)));
        }
        GaussPoly::new(out)
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return GaussPoly::zero();
        }
        let mut out = vec![GaussianRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        GaussPoly::new(out)
    }

    /// Exact division with remainder (Q(i) is a field).
    pub fn divrem(&self, b: &Self) -> (Self, Self) {
        assert!(!b.is_zero(), "division by the zero polynomial");
        let db = b.coeffs.len() - 1;
        let lead_inv = b.coeffs[db].inv().unwrap();
        let mut rem = self.coeffs.clone();
        while rem.last().map_or(false, |c| c.is_zero()) {
            rem.pop();
        }
        if rem.len() < b.coeffs.len() {
            return (GaussPoly::zero(), GaussPoly::new(rem));
        }
        let mut quo = vec![GaussianRational::zero(); rem.len() - db];
        while rem.len() >= b.coeffs.len() && !rem.is_empty() {
            let dr = rem.len() - 1;
            let c = rem[dr].mul(&lead_inv);
            let shift = dr - db;
            quo[shift] = c.clone();
            for (k, bc) in b.coeffs.iter().enumerate() {
                rem[shift + k] = rem[shift + k].sub(&c.mul(bc));
            }
            rem.truncate(dr);
            while rem.last().map_or(false, |c| c.is_zero()) {
                rem.pop();
            }
        }
        (GaussPoly::new(quo), GaussPoly::new(rem))
    }

    /// Monic gcd over Q(i).
    ///
    /// Subresultant pseudo-remainder sequence over the Gaussian integers.
    /// Plain Euclid over Q(i) squares the coefficient sizes at every step,
    /// which is ruinous for defining polynomials coming out of eliminants;
    /// dividing each pseudo-remainder by the known subresultant factor keeps
    /// the growth polynomial without needing a content gcd in Z[i].
    pub fn gcd(&self, o: &Self) -> Self {
        let mut fp = self.clone();
        let mut gp = o.clone();
        if fp.deg() < gp.deg() {
            std::mem::swap(&mut fp, &mut gp);
        }
        if gp.is_zero() {
            return fp.monic();
        }
        if gp.deg() == Some(0) {
            return GaussPoly::new(vec![GaussianRational::one()]);
        }
        let mut f = gauss_clear_content(&fp.coeffs);
        let mut g = gauss_clear_content(&gp.coeffs);
        let mut gg = GaussianRational::one();
        let mut h = GaussianRational::one();
        loop {
            let delta = (f.len() - 1) - (g.len() - 1);
            let r = gauss_prem(&f, &g);
            if r.is_empty() {
                return GaussPoly::new(g).monic();
            }
            f = g;
            let inv = gg.mul(&gauss_pow(&h, delta)).inv().unwrap();
            g = r.iter().map(|c| c.mul(&inv)).collect();
            if g.len() == 1 {
                return GaussPoly::new(vec![GaussianRational::one()]);
            }
            gg = f.last().unwrap().clone();
            h = if delta == 0 {
                h
            } else {
                gauss_pow(&gg, delta).mul(&gauss_pow(&h, delta - 1).inv().unwrap())
            };
        }
    }

    pub fn monic(&self) -> Self {
        match self.lead() {
            None => GaussPoly::zero(),
            Some(l) => {
                let inv = l.inv().unwrap();
                GaussPoly::new(self.coeffs.iter().map(|c| c.mul(&inv)).collect())
            }
        }
    }

    pub fn squarefree(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        if g.deg() == Some(0) {
            return self.monic();
        }
        let (q, _) = self.divrem(&g);
        q.monic()
    }

    /// Coefficients conjugated: roots of the result are the conjugates of
    /// the roots of self.
    pub fn conj_coeffs(&self) -> Self {
        GaussPoly::new(self.coeffs.iter().map(|c| c.conj()).collect())
    }

    /// The coefficient vector over Q, when no coefficient has an imaginary
    /// part.
    pub fn real_coefficients(&self) -> Option<UniPoly> {
        if self.coeffs.iter().any(|c| !c.im.is_zero()) {
            return None;
        }
        Some(self.coeffs.iter().map(|c| c.re.clone()).collect())
    }

    /// p(-t): roots negated.
    pub fn compose_neg(&self) -> Self {
        GaussPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| if k % 2 == 1 { c.neg() } else { c.clone() })
                .collect(),
        )
    }

    /// Multiplicity of the root t = 0, and the quotient by t^multiplicity.
    pub fn strip_zero_root(&self) -> (u32, Self) {
        let mut k = 0usize;
        while k < self.coeffs.len() && self.coeffs[k].is_zero() {
            k += 1;
        }
        if k == 0 {
            return (0, self.clone());
        }
        (k as u32, GaussPoly::new(self.coeffs[k..].to_vec()))
    }

    /// Cauchy bound: all roots have |z| <= 1 + max |a_i/a_n|.
    fn root_bound_f64(&self) -> f64 {
        let n = self.coeffs.len() - 1;
        let lead = self.coeffs[n].norm_sqr().to_f64().unwrap_or(1.0).sqrt();
        let mut m: f64 = 0.0;
        for c in &self.coeffs[..n] {
            let a = c.norm_sqr().to_f64().unwrap_or(0.0).sqrt();
            m = m.max(a / lead);
        }
        1.0 + m
    }
}

/// Clear denominators and strip the rational integer content, leaving
/// Gaussian-integer coefficients of minimal rational scale.
fn gauss_clear_content(p: &[GaussianRational]) -> Vec<GaussianRational> {
    let mut den = BigInt::one();
    for c in p {
        den = den.lcm(c.re.denom());
        den = den.lcm(c.im.denom());
    }
    let up = Rational::from_integer(den);
    let scaled: Vec<GaussianRational> = p.iter().map(|c| c.scale(&up)).collect();
    let mut content = BigInt::zero();
    for c in &scaled {
        content = content.gcd(&c.re.to_integer());
        content = content.gcd(&c.im.to_integer());
    }
    if content.is_zero() {
        return vec![];
    }
    let down = Rational::new(BigInt::one(), content);
    scaled.iter().map(|c| c.scale(&down)).collect()
}

/// lc(b)^(deg a - deg b + 1) * a mod b, fraction-free; mirrors the integer
/// pseudo-remainder used by the resultant chain.
fn gauss_prem(a: &[GaussianRational], b: &[GaussianRational]) -> Vec<GaussianRational> {
    let db = b.len() - 1;
    let lb = b[db].clone();
    let mut r: Vec<GaussianRational> = a.to_vec();
    let mut e = (a.len() - 1 - db) as i64 + 1;
    while r.len() > db {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - db;
        for c in r.iter_mut() {
            *c = c.mul(&lb);
        }
        for (k, bc) in b.iter().enumerate() {
            r[shift + k] = r[shift + k].sub(&lr.mul(bc));
        }
        while r.last().map_or(false, |c| c.is_zero()) {
            r.pop();
        }
        e -= 1;
    }
    if e > 0 {
        let fpow = gauss_pow(&lb, e as usize);
        for c in r.iter_mut() {
            *c = c.mul(&fpow);
        }
    }
    r
}

fn gauss_pow(x: &GaussianRational, n: usize) -> GaussianRational {
    let mut acc = GaussianRational::one();
    for _ in 0..n {
        acc = acc.mul(x);
    }
    acc
}

// ---------------------------------------------------------------------------
// Low-precision complex values for the simultaneous iteration
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
struct CDy {
    re: Dyadic,
    im: Dyadic,
}

impl CDy {
    fn from_f64(re: f64, im: f64) -> Self {
        CDy { re: dy_from_f64(re), im: dy_from_f64(im) }
    }

    fn round(&self, prec: u32) -> Self {
        CDy { re: self.re.round(prec).0, im: self.im.round(prec).0 }
    }

    fn add(&self, o: &Self, prec: u32) -> Self {
        CDy { re: self.re.add(&o.re), im: self.im.add(&o.im) }.round(prec)
    }

    fn sub(&self, o: &Self, prec: u32) -> Self {
        CDy { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }.round(prec)
    }

    fn mul(&self, o: &Self, prec: u32) -> Self {
        CDy {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
        .round(prec)
    }

    fn norm_sqr(&self) -> Dyadic {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }

    fn inv(&self, prec: u32) -> Option<Self> {
        let n = self.norm_sqr();
        if n.is_zero() {
            return None;
        }
        let nr = n.to_rational();
        let re = Dyadic::from_rational_dir(&(self.re.to_rational() / &nr), prec, false);
        let im = Dyadic::from_rational_dir(&(-self.im.to_rational() / &nr), prec, false);
        Some(CDy { re, im })
    }

    fn div(&self, o: &Self, prec: u32) -> Option<Self> {
        o.inv(prec).map(|v| self.mul(&v, prec))
    }

    fn abs_sqr_f64(&self) -> f64 {
        self.norm_sqr().to_f64()
    }
}

fn dy_from_f64(x: f64) -> Dyadic {
    if x == 0.0 || !x.is_finite() {
        return Dyadic::zero();
    }
    // Values fed through here are O(1); a 52-bit fixed-point snapshot is
    // plenty for iteration seeds and test fixtures.
    let scaled = (x * (1u64 << 52) as f64).round();
    Dyadic::new(BigInt::from(scaled as i128), -52)
}

// ---------------------------------------------------------------------------
// Interval Newton certification
// ---------------------------------------------------------------------------

/// Outcome of one interval Newton step.
#[derive(Clone, Debug)]
pub enum KrOutcome {
    /// The input ball contains exactly one (simple) root; the payload is the
    /// improved enclosure.
    Certified(ComplexBall),
    /// Nothing can be concluded at this precision on this ball.
    Unknown,
}

/// One interval Newton step for a univariate polynomial.
pub fn kr_step(p: &GaussPoly, b: &ComplexBall, prec: u32) -> KrOutcome {
    let dp = p.derivative();
    let center = ComplexBall::exact(b.re.clone(), b.im.clone());
    let pc = p.eval_ball(&center, prec);
    let dpc = dp.eval_ball(&center, prec);
    let dpb = dp.eval_ball(b, prec);
    let newton = match pc.div(&dpc, prec) {
        Ok(v) => v,
        Err(_) => return KrOutcome::Unknown,
    };
    let ratio = match dpb.div(&dpc, prec) {
        Ok(v) => v,
        Err(_) => return KrOutcome::Unknown,
    };
    let one_minus = ComplexBall::one().sub(&ratio, prec);
    let spread = ComplexBall::zero().with_rad(b.rad.clone());
    let phi = center
        .sub(&newton, prec)
        .add(&one_minus.mul(&spread, prec), prec);
    if phi.contained_in_interior(b, prec) {
        KrOutcome::Certified(phi)
    } else {
        KrOutcome::Unknown
    }
}

/// Refine a certified isolating ball below `target_rad` (to an exact point
/// if the target is zero), escalating the working precision whenever the
/// contraction stalls.
pub fn kr_refine(
    p: &GaussPoly,
    b: &ComplexBall,
    target_rad: &Rad,
    prec0: u32,
) -> Result<ComplexBall> {
    let done = |cur: &ComplexBall| {
        if target_rad.is_zero() {
            cur.rad.is_zero()
        } else {
            cur.rad.le_rad(target_rad)
        }
    };
    let mut cur = b.clone();
    if done(&cur) {
        return Ok(cur);
    }
    let mut prec = prec0;
    loop {
        loop {
            match kr_step(p, &cur, prec) {
                KrOutcome::Certified(next) => {
                    let strictly_smaller = !cur.rad.le_rad(&next.rad);
                    cur = next;
                    if done(&cur) {
                        return Ok(cur);
                    }
                    if !strictly_smaller {
                        break;
                    }
                }
                KrOutcome::Unknown => break,
            }
        }
        if prec >= PREC_CAP {
            return Err(Error::PrecisionExhausted {
                reached: prec,
                context: format!("root refinement stalled at radius {:.3e}", cur.rad.to_f64()),
            });
        }
        prec *= 2;
    }
}

// ---------------------------------------------------------------------------
// Root isolation
// ---------------------------------------------------------------------------

/// All distinct roots of p, as certified pairwise disjoint isolating balls.
/// Roots at zero are split off by exact divisibility and come back as exact
/// zero balls.
pub fn isolate_roots(p: &GaussPoly, prec0: u32) -> Result<Vec<ComplexBall>> {
    if p.is_zero() {
        return Err(Error::Internal("root isolation of the zero polynomial".into()));
    }
    if p.deg() == Some(0) {
        return Ok(vec![]);
    }
    let sf = p.squarefree();
    let (zero_mult, core) = sf.strip_zero_root();
    let mut out = vec![];
    if zero_mult > 0 {
        out.push(ComplexBall::zero());
    }
    let n = match core.deg() {
        None | Some(0) => {
            return Ok(out);
        }
        Some(n) => n,
    };
    let mut prec = prec0.max(64);
    let mut seeds: Option<Vec<CDy>> = None;
    loop {
        let approx = aberth_iterate(&core, prec, seeds.clone());
        match certify_all(&core, &approx, n, prec) {
            Some(mut balls) => {
                out.append(&mut balls);
                return Ok(out);
            }
            None => {
                seeds = Some(approx);
                if prec >= PREC_CAP {
                    return Err(Error::PrecisionExhausted {
                        reached: prec,
                        context: "root isolation did not certify all roots".into(),
                    });
                }
                prec *= 2;
            }
        }
    }
}

fn aberth_iterate(p: &GaussPoly, prec: u32, seeds: Option<Vec<CDy>>) -> Vec<CDy> {
    let n = p.deg().unwrap();
    let dp = p.derivative();
    let to_cdy = |c: &GaussianRational| CDy {
        re: Dyadic::from_rational_dir(&c.re, prec, false),
        im: Dyadic::from_rational_dir(&c.im, prec, false),
    };
    let pc: Vec<CDy> = p.coeffs.iter().map(to_cdy).collect();
    let dpc: Vec<CDy> = dp.coeffs.iter().map(to_cdy).collect();
    let eval = |coeffs: &[CDy], z: &CDy| -> CDy {
        let mut acc = CDy::from_f64(0.0, 0.0);
        for c in coeffs.iter().rev() {
            acc = acc.mul(z, prec);
            acc = acc.add(c, prec);
        }
        acc
    };
    let mut z: Vec<CDy> = match seeds {
        Some(s) if s.len() == n => s,
        _ => {
            let r = p.root_bound_f64().min(1e6);
            // Golden-angle spacing breaks the root symmetries that would
            // trap a perfectly regular start.
            (0..n)
                .map(|j| {
                    let theta = 2.399963229728653 * (j as f64) + 0.7;
                    CDy::from_f64(r * theta.cos() * 0.7, r * theta.sin() * 0.7)
                })
                .collect()
        }
    };
    let tol = 2f64.powi(-((2 * prec / 3) as i32).min(1000));
    let max_iter = 120 + 30 * n;
    for _ in 0..max_iter {
        let mut max_move: f64 = 0.0;
        for i in 0..n {
            let pv = eval(&pc, &z[i]);
            if pv.norm_sqr().is_zero() {
                continue;
            }
            let dv = eval(&dpc, &z[i]);
            let w = match pv.div(&dv, prec) {
                Some(w) => w,
                None => {
                    // Derivative vanished: nudge off the critical point.
                    z[i] = z[i].add(&CDy::from_f64(1e-3, 2e-3), prec);
                    continue;
                }
            };
            let mut s = CDy::from_f64(0.0, 0.0);
            for j in 0..n {
                if j == i {
                    continue;
                }
                let d = z[i].sub(&z[j], prec);
                match d.inv(prec) {
                    Some(v) => s = s.add(&v, prec),
                    None => s = s.add(&CDy::from_f64(1e6, 1e6), prec),
                }
            }
            let denom = CDy::from_f64(1.0, 0.0).sub(&w.mul(&s, prec), prec);
            let corr = match w.div(&denom, prec) {
                Some(c) => c,
                None => w.clone(),
            };
            z[i] = z[i].sub(&corr, prec);
            let zi_scale = 1.0 + z[i].abs_sqr_f64();
            max_move = max_move.max(corr.abs_sqr_f64() / zi_scale);
        }
        if max_move < tol * tol {
            break;
        }
    }
    z
}

fn certify_all(p: &GaussPoly, approx: &[CDy], n: usize, prec: u32) -> Option<Vec<ComplexBall>> {
    let mut balls: Vec<ComplexBall> = vec![];
    for z in approx {
        let mut cert = None;
        let base = ComplexBall::exact(z.re.round(prec).0, z.im.round(prec).0);
        // Initial radius guess from the size of the Newton correction.
        let pv = p.eval_ball(&base, prec);
        let dv = p.derivative().eval_ball(&base, prec);
        let mut rho = match pv.div(&dv, prec) {
            Ok(w) => match w.abs_upper(prec) {
                Some(m) => Rad::from_dyadic_up(&m.mul(&Dyadic::from_i64(4 * n as i64)))
                    .max(&Rad::pow2(-(prec as i64) + 16)),
                None => Rad::pow2(-8),
            },
            Err(_) => Rad::pow2(-8),
        };
        for _ in 0..6 {
            let cand = base.with_rad(rho.clone());
            if let KrOutcome::Certified(better) = kr_step(p, &cand, prec) {
                // Contract a few times for a tight enclosure.
                let mut cur = better;
                for _ in 0..8 {
                    match kr_step(p, &cur, prec) {
                        KrOutcome::Certified(next) if !cur.rad.le_rad(&next.rad) => cur = next,
                        _ => break,
                    }
                }
                cert = Some(cur);
                break;
            }
            rho = rho.mul_pow2(1);
        }
        balls.push(cert?);
    }
    if balls.len() != n {
        return None;
    }
    // Pairwise disjointness turns the enclosures into a genuine isolation.
    for i in 0..balls.len() {
        for j in i + 1..balls.len() {
            if !balls[i].certainly_disjoint(&balls[j], prec) {
                return None;
            }
        }
    }
    Some(balls)
}

// ---------------------------------------------------------------------------
// Sturm sequences
// ---------------------------------------------------------------------------

/// Sturm chain of a squarefree rational polynomial.
pub fn sturm_chain(p: &UniPoly) -> Vec<UniPoly> {
    let mut chain = vec![p.clone(), uni_derivative(p)];
    loop {
        let k = chain.len();
        if uni_is_zero(&chain[k - 1]) {
            chain.pop();
            return chain;
        }
        let (_, r) = uni_divrem(&chain[k - 2], &chain[k - 1]);
        if uni_is_zero(&r) {
            return chain;
        }
        chain.push(r.iter().map(|c| -c.clone()).collect());
    }
}

fn sign_variations(chain: &[UniPoly], t: &Rational) -> usize {
    let mut last = 0i32;
    let mut v = 0usize;
    for p in chain {
        let val = uni_eval(p, t);
        let s = if val.is_zero() {
            0
        } else if val.is_negative() {
            -1
        } else {
            1
        };
        if s != 0 {
            if last != 0 && s != last {
                v += 1;
            }
            last = s;
        }
    }
    v
}

/// Number of real roots of squarefree p in the open interval (a, b).
/// Endpoints must not be roots.
pub fn count_real_roots_open(p: &UniPoly, a: &Rational, b: &Rational) -> usize {
    assert!(a < b);
    debug_assert!(!uni_eval(p, a).is_zero() && !uni_eval(p, b).is_zero());
    let chain = sturm_chain(p);
    sign_variations(&chain, a) - sign_variations(&chain, b)
}

// ---------------------------------------------------------------------------
// Algebraic numbers
// ---------------------------------------------------------------------------

/// A squarefree defining polynomial over Q(i) plus a ball certified to
/// isolate exactly one of its roots.
#[derive(Clone, Debug)]
pub struct AlgebraicNumber {
    poly: GaussPoly,
    ball: ComplexBall,
    prec: u32,
}

impl AlgebraicNumber {
    /// Certify construction: the ball must isolate one root of p (after
    /// taking the squarefree part).  An exact center is accepted iff it is
    /// a root, checked exactly.
    pub fn new(p: &GaussPoly, ball: &ComplexBall, prec: u32) -> Result<Self> {
        let sf = p.squarefree();
        if ball.rad.is_zero() {
            let c = ball.center_gaussian();
            if sf.eval_q(&c).is_zero() {
                return Ok(AlgebraicNumber { poly: sf, ball: ball.clone(), prec });
            }
            return Err(Error::Internal("exact ball center is not a root".into()));
        }
        if let KrOutcome::Certified(better) = kr_step(&sf, ball, prec) {
            return Ok(AlgebraicNumber { poly: sf, ball: better, prec });
        }
        // A radius close to the precision floor can block strict
        // containment; inflating stays sound (a certified inflated ball
        // still holds the same single root) and restores contraction room.
        for p in [prec, prec * 2] {
            let mut b2 = ball.with_rad(ball.rad.max(&Rad::pow2(-(p as i64) + 24)));
            for _ in 0..48 {
                if let KrOutcome::Certified(better) = kr_step(&sf, &b2, p) {
                    return Ok(AlgebraicNumber { poly: sf, ball: better, prec });
                }
                b2 = b2.with_rad(b2.rad.mul_pow2(1));
            }
        }
        Err(Error::Internal("ball could not be certified to isolate a root".into()))
    }

    /// Constructor for a ball already known to isolate a root of the
    /// (already squarefree) polynomial.
    pub fn from_gaussian(q: &GaussianRational) -> Self {
        let poly = GaussPoly::linear(q);
        let ball = ComplexBall::from_gaussian(q, 128);
        AlgebraicNumber { poly, ball, prec: 128 }
    }

    pub fn from_rational(q: &Rational) -> Self {
        Self::from_gaussian(&GaussianRational::from_rational(q.clone()))
    }

    pub fn defining(&self) -> &GaussPoly {
        &self.poly
    }

    pub fn ball(&self) -> &ComplexBall {
        &self.ball
    }

    pub fn working_prec(&self) -> u32 {
        self.prec
    }

    pub fn refine_to(&mut self, target: &Rad) -> Result<()> {
        if self.ball.rad.is_zero() {
            return Ok(());
        }
        if !target.is_zero() && self.ball.rad.le_rad(target) {
            return Ok(());
        }
        self.ball = kr_refine(&self.poly, &self.ball, target, self.prec)?;
        Ok(())
    }

    /// Exact zero test.
    pub fn is_zero(&mut self) -> Result<bool> {
        let divisible = self.poly.coeffs.first().map_or(false, |c| c.is_zero());
        if !divisible {
            return Ok(false);
        }
        if self.ball.rad.is_zero() {
            return Ok(self.ball.re.is_zero() && self.ball.im.is_zero());
        }
        let (_, cofactor) = self.poly.strip_zero_root();
        if cofactor.deg().map_or(true, |d| d == 0) {
            // poly = c * t: the unique root is zero.
            return Ok(true);
        }
        let mut target = self.ball.rad.mul_pow2(-8);
        for _ in 0..32 {
            if self.ball.excludes_zero(self.prec) {
                return Ok(false);
            }
            let cv = cofactor.eval_ball(&self.ball, self.prec);
            if cv.excludes_zero(self.prec) {
                // Our root is not a cofactor root, so it is the zero root.
                return Ok(true);
            }
            self.refine_to(&target)?;
            target = target.mul_pow2(-16);
        }
        Err(Error::PrecisionExhausted {
            reached: self.prec,
            context: "zero test did not separate".into(),
        })
    }

    /// Exact equality of two algebraic numbers.
    pub fn equals(&mut self, other: &mut AlgebraicNumber) -> Result<bool> {
        let prec = self.prec.max(other.prec);
        let g = self.poly.gcd(&other.poly);
        if g.deg().map_or(true, |d| d == 0) {
            return Ok(false);
        }
        // p = g * c with gcd(g, c) = 1 since p is squarefree; the root
        // belongs to exactly one factor, and ball evaluation eventually
        // separates which.
        let is_g_root = |a: &mut AlgebraicNumber| -> Result<bool> {
            let (c, r) = a.poly.divrem(&g);
            debug_assert!(r.is_zero());
            if c.deg().map_or(true, |d| d == 0) {
                return Ok(true);
            }
            let mut target = a.ball.rad.mul_pow2(-8).max(&Rad::pow2(-64));
            for _ in 0..64 {
                let gv = g.eval_ball(&a.ball, prec);
                if gv.excludes_zero(prec) {
                    return Ok(false);
                }
                let cv = c.eval_ball(&a.ball, prec);
                if cv.excludes_zero(prec) {
                    return Ok(true);
                }
                a.refine_to(&target)?;
                target = target.mul_pow2(-16);
            }
            Err(Error::PrecisionExhausted {
                reached: prec,
                context: "cofactor exclusion did not separate".into(),
            })
        };
        if !is_g_root(self)? || !is_g_root(other)? {
            return Ok(false);
        }
        // Both are roots of g: identify which isolated root each one is.
        let roots = isolate_roots(&g, prec)?;
        let locate = |a: &mut AlgebraicNumber| -> Result<usize> {
            // Exact zero roots call for a divisibility decision rather than
            // strict ball containment.
            if g.coeffs.first().map_or(false, |c| c.is_zero()) && a.clone().is_zero()? {
                return roots
                    .iter()
                    .position(|r| r.rad.is_zero() && r.re.is_zero() && r.im.is_zero())
                    .ok_or_else(|| Error::Internal("missing zero root".into()));
            }
            // The number's own root lies in its ball and in exactly one of
            // the pairwise disjoint isolating balls, so once every other
            // isolating ball is certifiably disjoint from the (shrinking)
            // ball, the survivor names the root.
            for _ in 0..64 {
                let mut survivor = None;
                let mut hits = 0usize;
                for (k, r) in roots.iter().enumerate() {
                    if !a.ball.certainly_disjoint(r, prec) {
                        survivor = Some(k);
                        hits += 1;
                    }
                }
                match (hits, survivor) {
                    (1, Some(k)) => return Ok(k),
                    (0, _) => {
                        return Err(Error::Internal(
                            "certified ball misses every isolated root".into(),
                        ));
                    }
                    _ => {}
                }
                let target = a.ball.rad.mul_pow2(-8).max(&Rad::pow2(-(PREC_CAP as i64)));
                a.refine_to(&target)?;
            }
            Err(Error::PrecisionExhausted {
                reached: prec,
                context: "root identification did not converge".into(),
            })
        };
        Ok(locate(self)? == locate(other)?)
    }

    pub fn conj(&self) -> AlgebraicNumber {
        AlgebraicNumber {
            poly: self.poly.conj_coeffs(),
            ball: self.ball.conj(),
            prec: self.prec,
        }
    }

    pub fn neg_val(&self) -> AlgebraicNumber {
        AlgebraicNumber {
            poly: self.poly.compose_neg(),
            ball: self.ball.neg(),
            prec: self.prec,
        }
    }

    /// Exact reality test: v is real iff v equals its own conjugate.  With
    /// a real-coefficient defining polynomial the decision is cheaper: the
    /// root is real iff a real root of the polynomial lies inside the
    /// isolating ball, which a Sturm count over a real slice of the ball
    /// certifies.
    pub fn is_real(&mut self) -> Result<bool> {
        if !self.ball.im_ball().contains_zero() {
            return Ok(false);
        }
        if let Some(rp) = self.poly.real_coefficients() {
            if let Some(ans) = self.is_real_by_sturm(&rp)? {
                return Ok(ans);
            }
        }
        let mut c = self.conj();
        self.equals(&mut c)
    }

    /// Real points of the slice [re - rad/2, re + rad/2] lie inside the
    /// ball as soon as im^2 <= (3/4) rad^2; a positive Sturm count there
    /// then exhibits a real root inside the ball, which must be the
    /// isolated one.  Inconclusive after bounded refinement returns None.
    fn is_real_by_sturm(&mut self, rp: &UniPoly) -> Result<Option<bool>> {
        for _ in 0..48 {
            if !self.ball.im_ball().contains_zero() {
                return Ok(Some(false));
            }
            if self.ball.rad.is_zero() {
                return Ok(Some(self.ball.im.is_zero()));
            }
            if let Rad::Fin(rd) = &self.ball.rad {
                let rad_r = rd.to_rational();
                let im_r = self.ball.im.to_rational();
                if &im_r * &im_r * rat_int(4) <= &rad_r * &rad_r * rat_int(3) {
                    let re_r = self.ball.re.to_rational();
                    let mut w = rad_r / rat_int(2);
                    for _ in 0..8 {
                        let lo = &re_r - &w;
                        let hi = &re_r + &w;
                        if uni_eval(rp, &lo).is_zero() || uni_eval(rp, &hi).is_zero() {
                            w *= rat(3, 4);
                            continue;
                        }
                        if count_real_roots_open(rp, &lo, &hi) >= 1 {
                            return Ok(Some(true));
                        }
                        break;
                    }
                }
            }
            let t = self.ball.rad.mul_pow2(-16).max(&Rad::pow2(-(PREC_CAP as i64)));
            self.refine_to(&t)?;
        }
        Ok(None)
    }

    /// Sign of a number known to be real; refines until decided.
    pub fn real_sign(&mut self) -> Result<i32> {
        if self.is_zero()? {
            return Ok(0);
        }
        for _ in 0..64 {
            let rb = self.ball.re_ball();
            if rb.certainly_positive() {
                return Ok(1);
            }
            if rb.certainly_negative() {
                return Ok(-1);
            }
            let target = self.ball.rad.mul_pow2(-8).max(&Rad::pow2(-(PREC_CAP as i64)));
            self.refine_to(&target)?;
        }
        Err(Error::PrecisionExhausted {
            reached: self.prec,
            context: "sign did not separate".into(),
        })
    }
}

// ---------------------------------------------------------------------------
// Bivariate systems
// ---------------------------------------------------------------------------

/// A certified solution of a bivariate polynomial system.  The coordinate
/// balls isolate roots of the respective eliminants; together they pin the
/// unique system solution in their product.
#[derive(Clone, Debug)]
pub struct AlgebraicPoint {
    pub x: AlgebraicNumber,
    pub y: AlgebraicNumber,
}

impl AlgebraicPoint {
    pub fn x_ball(&self) -> &ComplexBall {
        self.x.ball()
    }

    pub fn y_ball(&self) -> &ComplexBall {
        self.y.ball()
    }

    pub fn equals(&mut self, other: &mut AlgebraicPoint) -> Result<bool> {
        Ok(self.x.equals(&mut other.x)? && self.y.equals(&mut other.y)?)
    }
}

/// One interval Newton step for a 2x2 system: certifies existence and
/// uniqueness of a solution in the box (bx, by), returning the contracted
/// box on success.
pub fn kr2_step(
    f: &SparsePoly,
    g: &SparsePoly,
    bx: &ComplexBall,
    by: &ComplexBall,
    prec: u32,
) -> Option<(ComplexBall, ComplexBall)> {
    let fx = f.derivative(Var::X);
    let fy = f.derivative(Var::Y);
    let gx = g.derivative(Var::X);
    let gy = g.derivative(Var::Y);
    let mx = ComplexBall::exact(bx.re.clone(), bx.im.clone());
    let my = ComplexBall::exact(by.re.clone(), by.im.clone());
    let fv = eval_poly_ball(f, &mx, &my, prec);
    let gv = eval_poly_ball(g, &mx, &my, prec);
    let a = eval_poly_ball(&fx, &mx, &my, prec);
    let b = eval_poly_ball(&fy, &mx, &my, prec);
    let c = eval_poly_ball(&gx, &mx, &my, prec);
    let d = eval_poly_ball(&gy, &mx, &my, prec);
    let det = a.mul(&d, prec).sub(&b.mul(&c, prec), prec);
    let det_inv = match det.recip(prec) {
        Ok(v) => v,
        Err(_) => return None,
    };
    // J(m)^-1 = det^-1 [[d, -b], [-c, a]].
    let i00 = d.mul(&det_inv, prec);
    let i01 = b.neg().mul(&det_inv, prec);
    let i10 = c.neg().mul(&det_inv, prec);
    let i11 = a.mul(&det_inv, prec);
    // Newton displacement J(m)^-1 F(m).
    let n0 = i00.mul(&fv, prec).add(&i01.mul(&gv, prec), prec);
    let n1 = i10.mul(&fv, prec).add(&i11.mul(&gv, prec), prec);
    // Jacobian over the whole box.
    let ab = eval_poly_ball(&fx, bx, by, prec);
    let bb = eval_poly_ball(&fy, bx, by, prec);
    let cb = eval_poly_ball(&gx, bx, by, prec);
    let db = eval_poly_ball(&gy, bx, by, prec);
    // M = I - J(m)^-1 J(B).
    let m00 = ComplexBall::one().sub(&i00.mul(&ab, prec).add(&i01.mul(&cb, prec), prec), prec);
    let m01 = ComplexBall::zero().sub(&i00.mul(&bb, prec).add(&i01.mul(&db, prec), prec), prec);
    let m10 = ComplexBall::zero().sub(&i10.mul(&ab, prec).add(&i11.mul(&cb, prec), prec), prec);
    let m11 = ComplexBall::one().sub(&i10.mul(&bb, prec).add(&i11.mul(&db, prec), prec), prec);
    let sx = ComplexBall::zero().with_rad(bx.rad.clone());
    let sy = ComplexBall::zero().with_rad(by.rad.clone());
    let phi_x = mx
        .sub(&n0, prec)
        .add(&m00.mul(&sx, prec).add(&m01.mul(&sy, prec), prec), prec);
    let phi_y = my
        .sub(&n1, prec)
        .add(&m10.mul(&sx, prec).add(&m11.mul(&sy, prec), prec), prec);
    if phi_x.contained_in_interior(bx, prec) && phi_y.contained_in_interior(by, prec) {
        Some((phi_x, phi_y))
    } else {
        None
    }
}

/// The squarefree eliminants of the system (f, g): the first component has
/// the x-coordinates of all solutions among its roots, the second the
/// y-coordinates.
pub fn system_eliminants(f: &SparsePoly, g: &SparsePoly) -> Result<(UniPoly, UniPoly)> {
    let rx_poly = poly_resultant(f, g, Var::Y)?;
    let ry_poly = poly_resultant(f, g, Var::X)?;
    let rx = rx_poly
        .as_uni(Var::X)
        .ok_or_else(|| Error::Internal("resultant not univariate".into()))?;
    let ry = ry_poly
        .as_uni(Var::Y)
        .ok_or_else(|| Error::Internal("resultant not univariate".into()))?;
    if uni_is_zero(&rx) || uni_is_zero(&ry) {
        return Err(Error::NotZeroDimensional);
    }
    Ok((uni_squarefree(&rx), uni_squarefree(&ry)))
}

// ---------------------------------------------------------------------------
// Zero-dimensional systems in triangular form
// ---------------------------------------------------------------------------

/// Largest coefficient tried for the shear u = x + c y.
pub const SHEAR_CAP: i64 = 32;

/// Remainder of w modulo a nonconstant m.
fn reduce_mod(w: &UniPoly, m: &UniPoly) -> UniPoly {
    if uni_is_zero(w) {
        return vec![];
    }
    uni_divrem(w, m).1
}

/// Runs a primitive pseudo-remainder chain in y over Q[x] on (f, g) and
/// returns the first chain element linear in y as coefficients (a, b) of
/// a y + b, together with the contents divided out before that element was
/// reached.  The pseudo-division identity lc^k p = q h + r keeps every
/// chain element inside the ideal (f, g), so a y + b vanishes at every
/// common zero at which all removed contents are nonzero.
fn chain_linear_relation(
    f: &SparsePoly,
    g: &SparsePoly,
) -> Option<(UniPoly, UniPoly, Vec<UniPoly>)> {
    let mut p = f.by_powers_of(Var::Y);
    let mut q = g.by_powers_of(Var::Y);
    bicoeffs_trim(&mut p);
    bicoeffs_trim(&mut q);
    if p.len() < q.len() {
        std::mem::swap(&mut p, &mut q);
    }
    for e in [&p, &q] {
        if e.len() == 2 {
            return Some((e[1].clone(), e[0].clone(), vec![]));
        }
    }
    let mut guards: Vec<UniPoly> = vec![];
    loop {
        if q.len() <= 1 {
            // The chain bottomed out without passing through y-degree one.
            return None;
        }
        let mut r = bicoeffs_prem(&p, &q);
        if !r.is_empty() {
            let cr = bicoeffs_content(&r);
            if uni_deg(&cr).map_or(false, |d| d > 0) {
                guards.push(cr.clone());
            }
            r = bicoeffs_div_content(&r, &cr);
        }
        if r.len() == 2 {
            return Some((r[1].clone(), r[0].clone(), guards));
        }
        p = q;
        q = r;
    }
}

/// Numerator of d(u, v) under the fiber substitution v = -b(u)/a(u),
/// cleared by a^dv and reduced modulo m throughout: returns (N, dv) with
/// d(u0, -b(u0)/a(u0)) = N(u0) / a(u0)^dv at every root u0 of m where a is
/// nonzero.
fn compose_numerator(d: &SparsePoly, a: &UniPoly, b: &UniPoly, m: &UniPoly) -> (UniPoly, u32) {
    let rows = d.by_powers_of(Var::Y);
    if rows.is_empty() {
        return (vec![], 0);
    }
    let dv = rows.len() - 1;
    let nb: UniPoly = b.iter().map(|c| -c.clone()).collect();
    let mut acc = reduce_mod(&rows[dv], m);
    let mut apow: UniPoly = vec![Rational::one()];
    for j in (0..dv).rev() {
        apow = reduce_mod(&uni_mul(&apow, a), m);
        let t = reduce_mod(&uni_mul(&rows[j], &apow), m);
        acc = uni_add(&reduce_mod(&uni_mul(&acc, &nb), m), &t);
    }
    (acc, dv as u32)
}

/// Decides exactly whether w vanishes at the root of `base` isolated by x0.
/// base must be squarefree with the value of x0 among its roots.
fn is_root_of(x0: &mut AlgebraicNumber, w: &UniPoly, base: &UniPoly, prec: u32) -> Result<bool> {
    let r = reduce_mod(w, base);
    if uni_is_zero(&r) {
        return Ok(true);
    }
    let g = uni_gcd(base, &r);
    if uni_deg(&g) == Some(0) {
        return Ok(false);
    }
    let (rest, rr) = uni_divrem(base, &g);
    debug_assert!(rr.is_empty());
    if uni_deg(&rest) == Some(0) {
        return Ok(true);
    }
    // base = g * rest with coprime factors: the root belongs to exactly one
    // side, and w vanishes at it iff it is a root of g.
    let gg = GaussPoly::from_uni(&g);
    let gr = GaussPoly::from_uni(&rest);
    let mut p = prec.max(64);
    for round in 0..96 {
        if x0.ball().rad.is_zero() {
            let c = x0.ball().center_gaussian();
            return Ok(gg.eval_q(&c).is_zero());
        }
        let gv = gg.eval_ball(x0.ball(), p);
        if gv.excludes_zero(p) {
            return Ok(false);
        }
        let rv = gr.eval_ball(x0.ball(), p);
        if rv.excludes_zero(p) {
            return Ok(true);
        }
        let t = x0.ball().rad.mul_pow2(-16).max(&Rad::pow2(-(PREC_CAP as i64)));
        x0.refine_to(&t)?;
        if round % 12 == 11 && p < PREC_CAP {
            p = p.saturating_mul(2);
        }
    }
    Err(Error::PrecisionExhausted {
        reached: p,
        context: "root membership did not separate".into(),
    })
}

/// Certifies the fiber coordinate -b(u)/a(u) as an algebraic number over
/// the given defining polynomial, refining u as needed.
fn fiber_coordinate(
    u: &mut AlgebraicNumber,
    a: &UniPoly,
    b: &UniPoly,
    py_gp: &GaussPoly,
    prec: u32,
) -> Result<AlgebraicNumber> {
    let ga = GaussPoly::from_uni(a);
    let gb = GaussPoly::from_uni(b);
    let mut p = prec.max(64);
    for round in 0..96 {
        let av = ga.eval_ball(u.ball(), p);
        if av.excludes_zero(p) {
            let vb = gb.eval_ball(u.ball(), p).neg().div(&av, p)?;
            if let Ok(v) = AlgebraicNumber::new(py_gp, &vb, p) {
                return Ok(v);
            }
        }
        let t = u.ball().rad.mul_pow2(-16).max(&Rad::pow2(-(PREC_CAP as i64)));
        u.refine_to(&t)?;
        if round % 12 == 11 && p < PREC_CAP {
            p = p.saturating_mul(2);
        }
    }
    Err(Error::PrecisionExhausted {
        reached: p,
        context: "fiber coordinate did not certify".into(),
    })
}

/// Certifies x = u - c v over the x-eliminant.
fn recover_x(
    u: &mut AlgebraicNumber,
    v: &AlgebraicNumber,
    c: i64,
    px_gp: &GaussPoly,
    prec: u32,
) -> Result<AlgebraicNumber> {
    let mut v = v.clone();
    let cr = rat_int(c);
    let mut p = prec.max(64);
    for round in 0..96 {
        let xb = if c == 0 {
            u.ball().clone()
        } else {
            u.ball().sub(&v.ball().scale_rational(&cr, p), p)
        };
        if let Ok(x) = AlgebraicNumber::new(px_gp, &xb, p) {
            return Ok(x);
        }
        let tu = u.ball().rad.mul_pow2(-16).max(&Rad::pow2(-(PREC_CAP as i64)));
        let tv = v.ball().rad.mul_pow2(-16).max(&Rad::pow2(-(PREC_CAP as i64)));
        u.refine_to(&tu)?;
        v.refine_to(&tv)?;
        if round % 12 == 11 && p < PREC_CAP {
            p = p.saturating_mul(2);
        }
    }
    Err(Error::PrecisionExhausted {
        reached: p,
        context: "sheared coordinate did not certify".into(),
    })
}

struct ChainData {
    a: UniPoly,
    b: UniPoly,
    /// Squarefree u-eliminant of the sheared system.
    pu: UniPoly,
    /// Divisor of pu whose roots are exactly the solution parameters.
    pg: UniPoly,
}

struct SystemSolution {
    u: AlgebraicNumber,
    point: AlgebraicPoint,
}

/// A zero-dimensional bivariate system held in sheared triangular form,
/// with its full certified solution set.
///
/// Values of further polynomials at a solution are decided exactly: d
/// vanishes at solution i iff the composed numerator of d under the fiber
/// substitution vanishes at the parameter u_i, a univariate root-membership
/// question.
pub struct ZeroDimSystem {
    px: UniPoly,
    py: UniPoly,
    shear: i64,
    chain: Option<ChainData>,
    sols: Vec<SystemSolution>,
}

impl ZeroDimSystem {
    pub fn new(f: &SparsePoly, g: &SparsePoly, prec: u32) -> Result<Self> {
        if f.is_zero() || g.is_zero() {
            return Err(Error::NotZeroDimensional);
        }
        let prec = prec.max(64);
        let empty = |px: UniPoly, py: UniPoly, shear: i64| ZeroDimSystem {
            px,
            py,
            shear,
            chain: None,
            sols: vec![],
        };
        if f.max_degree() == 0 || g.max_degree() == 0 {
            // A nonzero constant generator forbids zeros outright.
            return Ok(empty(vec![Rational::one()], vec![Rational::one()], 0));
        }
        // Two generators in the same single variable: either coprime (no
        // common zeros) or sharing a root line (not zero-dimensional).
        if f.deg_y() == 0 && g.deg_y() == 0 {
            let h = uni_gcd(&f.as_uni(Var::X).unwrap(), &g.as_uni(Var::X).unwrap());
            if uni_deg(&h).map_or(false, |d| d > 0) {
                return Err(Error::NotZeroDimensional);
            }
            return Ok(empty(vec![Rational::one()], vec![Rational::one()], 0));
        }
        if f.deg_x() == 0 && g.deg_x() == 0 {
            let h = uni_gcd(&f.as_uni(Var::Y).unwrap(), &g.as_uni(Var::Y).unwrap());
            if uni_deg(&h).map_or(false, |d| d > 0) {
                return Err(Error::NotZeroDimensional);
            }
            return Ok(empty(vec![Rational::one()], vec![Rational::one()], 0));
        }
        let t0 = std::time::Instant::now(); // PROBE
        let rx = poly_resultant(f, g, Var::Y)?
            .as_uni(Var::X)
            .ok_or_else(|| Error::Internal("resultant not univariate".into()))?;
        let ry = poly_resultant(f, g, Var::X)?
            .as_uni(Var::Y)
            .ok_or_else(|| Error::Internal("resultant not univariate".into()))?;
        if uni_is_zero(&rx) || uni_is_zero(&ry) {
            return Err(Error::NotZeroDimensional);
        }
        eprintln!("PROBE new: resultants {:?}", t0.elapsed()); // PROBE
        let t0 = std::time::Instant::now(); // PROBE
        let px = uni_squarefree(&rx);
        let py = uni_squarefree(&ry);
        eprintln!("PROBE new: squarefree {:?}", t0.elapsed()); // PROBE
        if uni_deg(&px) == Some(0) || uni_deg(&py) == Some(0) {
            return Ok(empty(px, py, 0));
        }
        let px_gp = GaussPoly::from_uni(&px);
        let py_gp = GaussPoly::from_uni(&py);
        for c in 0..=SHEAR_CAP {
            let fs = f.shear(c);
            let gs = g.shear(c);
            let ru = if c == 0 {
                rx.clone()
            } else {
                let r = poly_resultant(&fs, &gs, Var::Y)?
                    .as_uni(Var::X)
                    .ok_or_else(|| Error::Internal("resultant not univariate".into()))?;
                if uni_is_zero(&r) {
                    return Err(Error::NotZeroDimensional);
                }
                r
            };
            let pu = uni_squarefree(&ru);
            if uni_deg(&pu) == Some(0) {
                return Ok(empty(px, py, c));
            }
            let Some((a, b, guards)) = chain_linear_relation(&fs, &gs) else {
                continue;
            };
            // a and every removed content must be nonzero on the whole root
            // set of pu; a(u0) != 0 also certifies the fiber over u0 holds
            // at most one point, since a u + b vanishes on every solution.
            let usable = std::iter::once(&a).chain(guards.iter()).all(|wp| {
                let r = reduce_mod(wp, &pu);
                !uni_is_zero(&r) && uni_deg(&uni_gcd(&pu, &r)) == Some(0)
            });
            if !usable {
                continue;
            }
            // Solution parameters: roots of pu at which both generators
            // vanish after the fiber substitution.
            let (fn_, _) = compose_numerator(&fs, &a, &b, &pu);
            let (gn_, _) = compose_numerator(&gs, &a, &b, &pu);
            let mut pg = pu.clone();
            for w in [&fn_, &gn_] {
                if !uni_is_zero(w) {
                    pg = uni_gcd(&pg, w);
                }
            }
            if uni_deg(&pg) == Some(0) {
                return Ok(empty(px, py, c));
            }
            let pg = uni_primitive(&pg);
            let pg_gp = GaussPoly::from_uni(&pg);
            let mut sols = vec![];
            for ub in isolate_roots(&pg_gp, prec)? {
                let mut u = AlgebraicNumber::new(&pg_gp, &ub, prec)?;
                let y = fiber_coordinate(&mut u, &a, &b, &py_gp, prec)?;
                let x = recover_x(&mut u, &y, c, &px_gp, prec)?;
                sols.push(SystemSolution { u, point: AlgebraicPoint { x, y } });
            }
            return Ok(ZeroDimSystem {
                px,
                py,
                shear: c,
                chain: Some(ChainData { a, b, pu, pg }),
                sols,
            });
        }
        Err(Error::Internal("no usable shear puts the system in triangular form".into()))
    }

    pub fn len(&self) -> usize {
        self.sols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sols.is_empty()
    }

    pub fn point(&self, idx: usize) -> &AlgebraicPoint {
        &self.sols[idx].point
    }

    pub fn point_mut(&mut self, idx: usize) -> &mut AlgebraicPoint {
        &mut self.sols[idx].point
    }

    pub fn points(&self) -> Vec<AlgebraicPoint> {
        self.sols.iter().map(|s| s.point.clone()).collect()
    }

    pub fn x_eliminant(&self) -> &UniPoly {
        &self.px
    }

    pub fn y_eliminant(&self) -> &UniPoly {
        &self.py
    }

    /// Exactly decides whether d vanishes at solution idx.
    pub fn value_is_zero(&mut self, idx: usize, d: &SparsePoly, prec: u32) -> Result<bool> {
        if d.is_zero() {
            return Ok(true);
        }
        let prec = prec.max(64);
        {
            let pt = &mut self.sols[idx].point;
            for round in 0..3 {
                let v = eval_poly_ball(d, pt.x.ball(), pt.y.ball(), prec);
                if v.excludes_zero(prec) {
                    return Ok(false);
                }
                if round < 2 {
                    let tx = pt.x.ball().rad.mul_pow2(-24).max(&Rad::pow2(-(PREC_CAP as i64)));
                    let ty = pt.y.ball().rad.mul_pow2(-24).max(&Rad::pow2(-(PREC_CAP as i64)));
                    pt.x.refine_to(&tx)?;
                    pt.y.refine_to(&ty)?;
                }
            }
        }
        let chain = self
            .chain
            .as_ref()
            .ok_or_else(|| Error::Internal("value query on a system with no solutions".into()))?;
        let ds = d.shear(self.shear);
        let (dn, _) = compose_numerator(&ds, &chain.a, &chain.b, &chain.pu);
        is_root_of(&mut self.sols[idx].u, &dn, &chain.pu, prec)
    }

    /// Squarefree annihilator of num/den over the solution set: the ratio
    /// at every solution with nonvanishing denominator is a root.
    pub fn ratio_annihilator(&self, num: &SparsePoly, den: &SparsePoly) -> Result<UniPoly> {
        let chain = self
            .chain
            .as_ref()
            .ok_or_else(|| Error::Internal("ratio query on a system with no solutions".into()))?;
        let ns = num.shear(self.shear);
        let ds = den.shear(self.shear);
        let (n0, kn) = compose_numerator(&ns, &chain.a, &chain.b, &chain.pg);
        let (d0, kd) = compose_numerator(&ds, &chain.a, &chain.b, &chain.pg);
        // Balance the cleared powers of a so the ratio is exactly n1/d1.
        let k = kn.max(kd);
        let mut n1 = n0;
        let mut d1 = d0;
        for _ in kn..k {
            n1 = reduce_mod(&uni_mul(&n1, &chain.a), &chain.pg);
        }
        for _ in kd..k {
            d1 = reduce_mod(&uni_mul(&d1, &chain.a), &chain.pg);
        }
        // Split off parameters where numerator and denominator both vanish;
        // solutions with a nonzero denominator never sit there.
        let mut h = chain.pg.clone();
        for w in [&n1, &d1] {
            if !uni_is_zero(w) {
                h = uni_gcd(&h, w);
            }
        }
        let mut pw = chain.pg.clone();
        if uni_deg(&h).map_or(false, |d| d > 0) {
            let (q, r) = uni_divrem(&pw, &h);
            debug_assert!(r.is_empty());
            pw = q;
        }
        if uni_deg(&pw).map_or(true, |d| d == 0) {
            return Err(Error::Internal("ratio undefined at every solution".into()));
        }
        let n2 = reduce_mod(&n1, &pw);
        let d2 = reduce_mod(&d1, &pw);
        // ann(T) = Res_u(pw, T d2 - n2), with T encoded as the y variable.
        let a_sp = SparsePoly::from_uni(&pw, Var::X);
        let b_sp = SparsePoly::from_uni(&d2, Var::X)
            .mul(&SparsePoly::var(Var::Y))
            .sub(&SparsePoly::from_uni(&n2, Var::X));
        let ann = poly_resultant(&a_sp, &b_sp, Var::X)?
            .as_uni(Var::Y)
            .ok_or_else(|| Error::Internal("unexpected variable in ratio annihilator".into()))?;
        if uni_is_zero(&ann) {
            return Err(Error::Internal("ratio annihilator vanished identically".into()));
        }
        Ok(uni_squarefree(&ann))
    }

    /// The ratio num/den at solution idx as a certified algebraic number
    /// over a precomputed annihilator.
    pub fn ratio_value(
        &mut self,
        idx: usize,
        num: &SparsePoly,
        den: &SparsePoly,
        ann_gp: &GaussPoly,
        prec: u32,
    ) -> Result<AlgebraicNumber> {
        let mut p = prec.max(64);
        for round in 0..96 {
            let pt = &mut self.sols[idx].point;
            let nb = eval_poly_ball(num, pt.x.ball(), pt.y.ball(), p);
            let db = eval_poly_ball(den, pt.x.ball(), pt.y.ball(), p);
            if db.excludes_zero(p) {
                if let Ok(l) = nb.div(&db, p) {
                    if let Ok(v) = AlgebraicNumber::new(ann_gp, &l, p) {
                        return Ok(v);
                    }
                }
            }
            let tx = pt.x.ball().rad.mul_pow2(-16).max(&Rad::pow2(-(PREC_CAP as i64)));
            let ty = pt.y.ball().rad.mul_pow2(-16).max(&Rad::pow2(-(PREC_CAP as i64)));
            pt.x.refine_to(&tx)?;
            pt.y.refine_to(&ty)?;
            if round % 12 == 11 && p < PREC_CAP {
                p = p.saturating_mul(2);
            }
        }
        Err(Error::PrecisionExhausted {
            reached: p,
            context: "ratio value did not certify".into(),
        })
    }
}

/// All certified common zeros of f and g, zero coordinates included.
/// Fails with `NotZeroDimensional` when the two curves share a component.
pub fn solve_system(f: &SparsePoly, g: &SparsePoly, prec: u32) -> Result<Vec<AlgebraicPoint>> {
    Ok(ZeroDimSystem::new(f, g, prec)?.points())
}

/// Jointly refine a certified solution below the radius target; falls back
/// to per-coordinate refinement when the joint operator cannot contract
/// (e.g. when the Jacobian degenerates at the solution).
pub fn refine_point(
    f: &SparsePoly,
    g: &SparsePoly,
    pt: &mut AlgebraicPoint,
    target: &Rad,
    prec0: u32,
) -> Result<()> {
    let below = |pt: &AlgebraicPoint| {
        pt.x.ball.rad.le_rad(target) && pt.y.ball.rad.le_rad(target)
    };
    if below(pt) {
        return Ok(());
    }
    let mut prec = prec0;
    loop {
        loop {
            match kr2_step(f, g, &pt.x.ball, &pt.y.ball, prec) {
                Some((nx, ny)) => {
                    let strict = !pt.x.ball.rad.le_rad(&nx.rad) || !pt.y.ball.rad.le_rad(&ny.rad);
                    pt.x.ball = nx;
                    pt.y.ball = ny;
                    pt.x.prec = prec;
                    pt.y.prec = prec;
                    if below(pt) {
                        return Ok(());
                    }
                    if !strict {
                        break;
                    }
                }
                None => break,
            }
        }
        // Per-coordinate fallback keeps working where the joint operator
        // cannot certify.
        let fx = pt.x.refine_to(target);
        let fy = pt.y.refine_to(target);
        if fx.is_ok() && fy.is_ok() && below(pt) {
            return Ok(());
        }
        if prec >= PREC_CAP {
            return Err(Error::PrecisionExhausted {
                reached: prec,
                context: "point refinement stalled".into(),
            });
        }
        prec *= 2;
    }
}

// ---------------------------------------------------------------------------
// Annihilators of polynomial values at root pairs
// ---------------------------------------------------------------------------

/// A(T) = Res_x(px, Res_y(py, T - d)): every value d(xi, yj) over root
/// pairs px(xi) = 0, py(yj) = 0 is a root of A.  Affordable only for small
/// defining degrees; system solutions should go through `ZeroDimSystem`
/// instead.
pub fn annihilator_of_value(px: &UniPoly, py: &UniPoly, d: &SparsePoly) -> Result<UniPoly> {
    annihilator_generic(px, py, &SparsePoly::zero().sub(d), &SparsePoly::one())
}

/// Computes Res_x(px, Res_y(py, T*den + off)) by interpolation over integer
/// values of T, skipping degenerate nodes (where the pencil drops y-degree,
/// or the inner resultant drops x-degree, either of which would corrupt the
/// interpolated determinant polynomial).
fn annihilator_generic(
    px: &UniPoly,
    py: &UniPoly,
    off: &SparsePoly,
    den: &SparsePoly,
) -> Result<UniPoly> {
    let n = uni_deg(px).ok_or_else(|| Error::Internal("empty defining polynomial".into()))?;
    let m = uni_deg(py).ok_or_else(|| Error::Internal("empty defining polynomial".into()))?;
    if n == 0 || m == 0 {
        return Err(Error::Internal("constant defining polynomial".into()));
    }
    if den.is_zero() {
        return Err(Error::Internal("zero pencil denominator".into()));
    }
    // Generic y-degree of T*den + off as a polynomial in T, x, y: the
    // coefficient of y^j is T*den_j(x) + off_j(x) and vanishes identically
    // only if both parts do.
    let gen_dy = den.deg_y().max(if off.is_zero() { 0 } else { off.deg_y() }) as usize;
    let px_sp = SparsePoly::from_uni(px, Var::X);
    if gen_dy == 0 {
        // The pencil never involves y: Res_y(py, pencil) = pencil^m as a
        // polynomial identity (up to the constant lc(py)^0).  Re-encode T
        // as the Y variable and finish with one exact bivariate resultant.
        let pencil_xt = den.mul(&SparsePoly::var(Var::Y)).add(off);
        let mut b = SparsePoly::one();
        for _ in 0..m {
            b = b.mul(&pencil_xt);
        }
        let a_poly = poly_resultant(&px_sp, &b, Var::X)?;
        let mut a = a_poly
            .as_uni(Var::Y)
            .ok_or_else(|| Error::Internal("unexpected variable in annihilator".into()))?;
        uni_trim(&mut a);
        return Ok(a);
    }
    let py_sp = SparsePoly::from_uni(py, Var::Y);
    let deg_t = n * m;
    let mut samples: Vec<(Rational, UniPoly)> = vec![];
    let mut max_dx = 0usize;
    let mut k: i64 = 0;
    let mut tried = 0u64;
    let count_good = |samples: &[(Rational, UniPoly)], max_dx: usize| {
        samples
            .iter()
            .filter(|(_, b)| uni_deg(b).map_or(max_dx == 0, |dd| dd == max_dx))
            .count()
    };
    while count_good(&samples, max_dx) <= deg_t {
        let t0 = rat_int(k);
        k = if k >= 0 { -(k + 1) } else { -k };
        tried += 1;
        if tried > (deg_t as u64 + m as u64 + 8) * 8 + 64 {
            return Err(Error::Internal("annihilator node search stalled".into()));
        }
        let pencil = den.scale(&t0).add(off);
        if pencil.is_zero() || pencil.deg_y() as usize != gen_dy {
            continue;
        }
        let b_poly = poly_resultant(&py_sp, &pencil, Var::Y)?;
        let b = match b_poly.as_uni(Var::X) {
            Some(b) => b,
            None => continue,
        };
        if let Some(dd) = uni_deg(&b) {
            if dd > max_dx {
                max_dx = dd;
            }
        }
        samples.push((t0, b));
    }
    let mut nodes: Vec<(Rational, Rational)> = vec![];
    for (t0, b) in samples
        .iter()
        .filter(|(_, b)| uni_deg(b).map_or(max_dx == 0, |dd| dd == max_dx))
        .take(deg_t + 1)
    {
        let val = if uni_is_zero(b) {
            Rational::zero()
        } else {
            resultant_uni(px, b)
        };
        nodes.push((t0.clone(), val));
    }
    let mut a = uni_interpolate(&nodes);
    uni_trim(&mut a);
    Ok(a)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::{rat, uni_from_i64};

    fn ball_f64(re: f64, rad_num: i64, rad_den: i64) -> ComplexBall {
        let r = Dyadic::from_rational_dir(&rat(rad_num, rad_den), 32, true);
        ComplexBall {
            re: dy_from_f64(re),
            im: Dyadic::zero(),
            rad: Rad::from_dyadic_up(&r),
        }
    }

    #[test]
    fn kr_step_sqrt2_pinned() {
        // p = t^2 - 2 on B(1.4, 0.1): certified, contracted to about
        // B(1.4142857, 0.0072).
        let p = GaussPoly::from_uni(&uni_from_i64(&[-2, 0, 1]));
        let b = ball_f64(1.4, 1, 10);
        match kr_step(&p, &b, 128) {
            KrOutcome::Certified(out) => {
                let c = out.re.to_f64();
                assert!((c - 1.4142857).abs() < 1e-6, "center {}", c);
                let r = out.rad.to_f64();
                assert!(r < 0.00723 && r > 0.0070, "radius {}", r);
            }
            KrOutcome::Unknown => panic!("expected certification"),
        }
    }

    #[test]
    fn kr_step_linear_exact() {
        // p = t - 1 on B(0.9, 0.5): one step lands exactly on B(1, 0).
        let p = GaussPoly::from_uni(&uni_from_i64(&[-1, 1]));
        let b = ball_f64(0.9, 1, 2);
        match kr_step(&p, &b, 128) {
            KrOutcome::Certified(out) => {
                assert_eq!(out.re, Dyadic::one());
                assert!(out.im.is_zero());
                assert!(out.rad.is_zero());
            }
            KrOutcome::Unknown => panic!("expected certification"),
        }
    }

    #[test]
    fn kr_step_inconclusive_on_wide_ball() {
        // p = t^2 - 2 on B(0, 3): the derivative vanishes at the center.
        let p = GaussPoly::from_uni(&uni_from_i64(&[-2, 0, 1]));
        let b = ComplexBall::zero().with_rad(Rad::Fin(Dyadic::from_i64(3)));
        assert!(matches!(kr_step(&p, &b, 128), KrOutcome::Unknown));
    }

    #[test]
    fn isolate_quadratic_pinned() {
        // 1 - 3t + 2t^2 has roots 1 and 1/2.
        let p = GaussPoly::from_uni(&uni_from_i64(&[1, -3, 2]));
        let roots = isolate_roots(&p, 128).unwrap();
        assert_eq!(roots.len(), 2);
        let mut found_one = false;
        let mut found_half = false;
        for r in &roots {
            if r.re_ball().contains_rational(&rat(1, 1)) && r.im_ball().contains_rational(&rat(0, 1)) {
                found_one = true;
            }
            if r.re_ball().contains_rational(&rat(1, 2)) && r.im_ball().contains_rational(&rat(0, 1)) {
                found_half = true;
            }
            assert!(r.rad.to_f64() < 1e-20);
        }
        assert!(found_one && found_half);
    }

    #[test]
    fn isolate_with_zero_root_and_complex_pair() {
        // t^3 + t = t (t^2 + 1): roots 0, i, -i.
        let p = GaussPoly::from_uni(&uni_from_i64(&[0, 1, 0, 1]));
        let roots = isolate_roots(&p, 128).unwrap();
        assert_eq!(roots.len(), 3);
        assert!(roots.iter().any(|r| r.rad.is_zero() && r.re.is_zero() && r.im.is_zero()));
        assert!(roots.iter().any(|r| r.im.to_f64() > 0.9));
        assert!(roots.iter().any(|r| r.im.to_f64() < -0.9));
    }

    #[test]
    fn isolate_cyclotomic_symmetric_start() {
        // t^8 - 1: a fully symmetric configuration.
        let mut c = vec![0i64; 9];
        c[0] = -1;
        c[8] = 1;
        let p = GaussPoly::from_uni(&uni_from_i64(&c));
        let roots = isolate_roots(&p, 128).unwrap();
        assert_eq!(roots.len(), 8);
        for r in &roots {
            let n = r.center_norm_sqr().to_f64();
            assert!((n - 1.0).abs() < 1e-10, "|root|^2 = {}", n);
        }
    }

    #[test]
    fn isolate_multiple_root_collapses() {
        // (t - 1)^2 (t + 2): distinct roots 1 and -2.
        let p = GaussPoly::from_uni(&uni_from_i64(&[2, -3, 0, 1]));
        let roots = isolate_roots(&p, 128).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots.iter().any(|r| r.re_ball().contains_rational(&rat(1, 1))));
        assert!(roots.iter().any(|r| r.re_ball().contains_rational(&rat(-2, 1))));
    }

    #[test]
    fn algnum_zero_and_equality() {
        // sqrt(2) as a root of t^2 - 2 equals the positive root of t^4 - 4.
        let p2 = GaussPoly::from_uni(&uni_from_i64(&[-2, 0, 1]));
        let p4 = GaussPoly::from_uni(&uni_from_i64(&[-4, 0, 0, 0, 1]));
        let r2 = isolate_roots(&p2, 128).unwrap();
        let a = r2.iter().find(|r| r.re.signum() > 0).unwrap();
        let mut alpha = AlgebraicNumber::new(&p2, a, 128).unwrap();
        let r4 = isolate_roots(&p4, 128).unwrap();
        // t^4 - 4 = (t^2 - 2)(t^2 + 2): roots +-sqrt2 and +-i sqrt2.
        assert_eq!(r4.len(), 4);
        let b = r4.iter().find(|r| r.re.to_f64() > 1.0).unwrap();
        let mut beta = AlgebraicNumber::new(&p4, b, 128).unwrap();
        assert!(alpha.equals(&mut beta).unwrap());
        let cneg = r4.iter().find(|r| r.re.to_f64() < -1.0).unwrap();
        let mut gamma = AlgebraicNumber::new(&p4, cneg, 128).unwrap();
        assert!(!alpha.equals(&mut gamma).unwrap());
        // Negation maps sqrt2 onto -sqrt2.
        let mut neg = alpha.neg_val();
        assert!(neg.equals(&mut gamma).unwrap());
        // Zero tests.
        let mut z = AlgebraicNumber::from_rational(&rat(0, 1));
        assert!(z.is_zero().unwrap());
        assert!(!alpha.is_zero().unwrap());
        // Reality.
        assert!(alpha.is_real().unwrap());
        let pi2 = GaussPoly::from_uni(&uni_from_i64(&[1, 0, 1]));
        let ri = isolate_roots(&pi2, 128).unwrap();
        let iball = ri.iter().find(|r| r.im.to_f64() > 0.5).unwrap();
        let mut iota = AlgebraicNumber::new(&pi2, iball, 128).unwrap();
        assert!(!iota.is_real().unwrap());
        // Signs of real numbers.
        assert_eq!(alpha.real_sign().unwrap(), 1);
        assert_eq!(neg.real_sign().unwrap(), -1);
        assert_eq!(z.real_sign().unwrap(), 0);
    }

    #[test]
    fn refine_near_zero_pinned() {
        // Refining (t, B(0.001, 0.002)) contracts to the exact zero ball.
        let p = GaussPoly::from_uni(&uni_from_i64(&[0, 1]));
        let b = ComplexBall {
            re: dy_from_f64(0.001),
            im: Dyadic::zero(),
            rad: Rad::from_dyadic_up(&dy_from_f64(0.002)),
        };
        let out = kr_refine(&p, &b, &Rad::zero(), 128).unwrap();
        assert!(out.re.is_zero() && out.im.is_zero() && out.rad.is_zero());
    }

    #[test]
    fn sturm_counts() {
        // t^2 - 2: one root in (1, 2), one in (-2, -1), none in (3, 4).
        let p = uni_from_i64(&[-2, 0, 1]);
        assert_eq!(count_real_roots_open(&p, &rat(1, 1), &rat(2, 1)), 1);
        assert_eq!(count_real_roots_open(&p, &rat(-2, 1), &rat(-1, 1)), 1);
        assert_eq!(count_real_roots_open(&p, &rat(3, 1), &rat(4, 1)), 0);
        assert_eq!(count_real_roots_open(&p, &rat(-3, 1), &rat(3, 1)), 2);
        // t^2 + 1 has no real roots.
        let q = uni_from_i64(&[1, 0, 1]);
        assert_eq!(count_real_roots_open(&q, &rat(-10, 1), &rat(10, 1)), 0);
    }

    #[test]
    fn solve_system_pinned_simple() {
        // {1 - x - y = 0, y - x = 0} has the unique solution (1/2, 1/2).
        let f = SparsePoly::one()
            .sub(&SparsePoly::var(Var::X))
            .sub(&SparsePoly::var(Var::Y));
        let g = SparsePoly::var(Var::Y).sub(&SparsePoly::var(Var::X));
        let pts = solve_system(&f, &g, 128).unwrap();
        assert_eq!(pts.len(), 1);
        assert!(pts[0].x_ball().re_ball().contains_rational(&rat(1, 2)));
        assert!(pts[0].y_ball().re_ball().contains_rational(&rat(1, 2)));
    }

    #[test]
    fn solve_system_pinned_direction_weighted() {
        // {1 - x - y = 0, x - 2y = 0}: solution (2/3, 1/3).
        let f = SparsePoly::one()
            .sub(&SparsePoly::var(Var::X))
            .sub(&SparsePoly::var(Var::Y));
        let g = SparsePoly::var(Var::X).sub(&SparsePoly::var(Var::Y).scale(&rat(2, 1)));
        let pts = solve_system(&f, &g, 128).unwrap();
        assert_eq!(pts.len(), 1);
        assert!(pts[0].x_ball().re_ball().contains_rational(&rat(2, 3)));
        assert!(pts[0].y_ball().re_ball().contains_rational(&rat(1, 3)));
    }

    #[test]
    fn solve_system_pinned_quadratic() {
        // {1 - x - y - xy = 0, y - x = 0}: x = -1 +- sqrt(2), y = x.
        let f = SparsePoly::one()
            .sub(&SparsePoly::var(Var::X))
            .sub(&SparsePoly::var(Var::Y))
            .sub(&SparsePoly::var(Var::X).mul(&SparsePoly::var(Var::Y)));
        let g = SparsePoly::var(Var::Y).sub(&SparsePoly::var(Var::X));
        let mut pts = solve_system(&f, &g, 128).unwrap();
        assert_eq!(pts.len(), 2);
        pts.sort_by(|a, b| a.x_ball().re.to_f64().partial_cmp(&b.x_ball().re.to_f64()).unwrap());
        let lo = pts[0].x_ball().re.to_f64();
        let hi = pts[1].x_ball().re.to_f64();
        assert!((lo - (-1.0 - 2f64.sqrt())).abs() < 1e-12);
        assert!((hi - (2f64.sqrt() - 1.0)).abs() < 1e-12);
        // Both coordinates agree along y = x.
        for p in &mut pts {
            let mut a = p.x.clone();
            let mut b = p.y.clone();
            assert!(a.equals(&mut b).unwrap());
        }
    }

    #[test]
    fn solve_system_with_axis_solution() {
        // {y - x^2 = 0, y - x = 0}: solutions (0, 0) and (1, 1); the origin
        // exercises exact zero coordinates.
        let f = SparsePoly::var(Var::Y)
            .sub(&SparsePoly::var(Var::X).mul(&SparsePoly::var(Var::X)));
        let g = SparsePoly::var(Var::Y).sub(&SparsePoly::var(Var::X));
        let pts = solve_system(&f, &g, 128).unwrap();
        assert_eq!(pts.len(), 2);
        let mut zero_seen = false;
        let mut one_seen = false;
        for p in &pts {
            if p.x_ball().re_ball().contains_rational(&rat(0, 1))
                && p.y_ball().re_ball().contains_rational(&rat(0, 1))
            {
                zero_seen = true;
            }
            if p.x_ball().re_ball().contains_rational(&rat(1, 1))
                && p.y_ball().re_ball().contains_rational(&rat(1, 1))
            {
                one_seen = true;
            }
        }
        assert!(zero_seen && one_seen);
    }

    #[test]
    fn solve_system_degenerate_tangency() {
        // {y - x^2 = 0, y = 0}: tangential intersection at the origin, so
        // the Jacobian is singular there; the exact fallback must still
        // certify the single solution (0, 0).
        let f = SparsePoly::var(Var::Y)
            .sub(&SparsePoly::var(Var::X).mul(&SparsePoly::var(Var::X)));
        let g = SparsePoly::var(Var::Y);
        let pts = solve_system(&f, &g, 128).unwrap();
        assert_eq!(pts.len(), 1);
        assert!(pts[0].x_ball().re_ball().contains_rational(&rat(0, 1)));
        assert!(pts[0].y_ball().re_ball().contains_rational(&rat(0, 1)));
    }

    #[test]
    fn solve_system_not_zero_dimensional() {
        // f and g share the factor (1 - x - y).
        let f = SparsePoly::one()
            .sub(&SparsePoly::var(Var::X))
            .sub(&SparsePoly::var(Var::Y));
        let g = f.mul(&SparsePoly::var(Var::X));
        assert!(matches!(solve_system(&f, &g, 128), Err(Error::NotZeroDimensional)));
    }

    #[test]
    fn system_value_zero_at_rational_point() {
        // At (1/2, 1/2): x - y = 0 but x + y = 1 != 0.
        let f = SparsePoly::one()
            .sub(&SparsePoly::var(Var::X))
            .sub(&SparsePoly::var(Var::Y));
        let g = SparsePoly::var(Var::Y).sub(&SparsePoly::var(Var::X));
        let mut sys = ZeroDimSystem::new(&f, &g, 128).unwrap();
        assert_eq!(sys.len(), 1);
        // The stored eliminants match the resultant-based ones.
        let (px, py) = system_eliminants(&f, &g).unwrap();
        assert_eq!(sys.x_eliminant(), &px);
        assert_eq!(sys.y_eliminant(), &py);
        let x_minus_y = SparsePoly::var(Var::X).sub(&SparsePoly::var(Var::Y));
        let x_plus_y = SparsePoly::var(Var::X).add(&SparsePoly::var(Var::Y));
        assert!(sys.value_is_zero(0, &x_minus_y, 128).unwrap());
        assert!(!sys.value_is_zero(0, &x_plus_y, 128).unwrap());
    }

    #[test]
    fn system_value_zero_at_irrational_point() {
        // At (sqrt2 - 1, sqrt2 - 1): x^2 + 2x - 1 = 0 exactly; x + 1 != 0.
        let f = SparsePoly::one()
            .sub(&SparsePoly::var(Var::X))
            .sub(&SparsePoly::var(Var::Y))
            .sub(&SparsePoly::var(Var::X).mul(&SparsePoly::var(Var::Y)));
        let g = SparsePoly::var(Var::Y).sub(&SparsePoly::var(Var::X));
        let mut sys = ZeroDimSystem::new(&f, &g, 128).unwrap();
        assert_eq!(sys.len(), 2);
        let xx = SparsePoly::var(Var::X).mul(&SparsePoly::var(Var::X));
        let d = xx
            .add(&SparsePoly::var(Var::X).scale(&rat(2, 1)))
            .sub(&SparsePoly::one());
        let d2 = SparsePoly::var(Var::X).add(&SparsePoly::one());
        for idx in 0..sys.len() {
            assert!(sys.value_is_zero(idx, &d, 128).unwrap());
            assert!(!sys.value_is_zero(idx, &d2, 128).unwrap());
        }
    }

    #[test]
    fn system_needing_a_shear() {
        // {x = 0, y^2 - 1 = 0}: a pure-x and a pure-y generator share no
        // variable, and both solutions (0, 1), (0, -1) sit on one vertical
        // line, so the unsheared chain cannot carry them.
        let f = SparsePoly::var(Var::X);
        let g = SparsePoly::var(Var::Y)
            .mul(&SparsePoly::var(Var::Y))
            .sub(&SparsePoly::one());
        let mut sys = ZeroDimSystem::new(&f, &g, 128).unwrap();
        assert_eq!(sys.len(), 2);
        let mut plus = false;
        let mut minus = false;
        for idx in 0..sys.len() {
            let pt = sys.point(idx);
            assert!(pt.x_ball().re_ball().contains_rational(&rat(0, 1)));
            if pt.y_ball().re_ball().contains_rational(&rat(1, 1)) {
                plus = true;
            }
            if pt.y_ball().re_ball().contains_rational(&rat(-1, 1)) {
                minus = true;
            }
        }
        assert!(plus && minus);
        // Value queries still work through the sheared representation.
        for idx in 0..sys.len() {
            assert!(sys.value_is_zero(idx, &f, 128).unwrap());
            let yy = SparsePoly::var(Var::Y).mul(&SparsePoly::var(Var::Y));
            assert!(!sys.value_is_zero(idx, &yy.sub(&SparsePoly::one().scale(&rat(2, 1))), 128).unwrap());
        }
    }

    #[test]
    fn system_with_conjugate_collision() {
        // {x^2 + 1 = 0, y^2 - 1 = 0}: four solutions (+-i, +-1); every
        // shear must separate the fibers of conjugate pairs.
        let f = SparsePoly::var(Var::X)
            .mul(&SparsePoly::var(Var::X))
            .add(&SparsePoly::one());
        let g = SparsePoly::var(Var::Y)
            .mul(&SparsePoly::var(Var::Y))
            .sub(&SparsePoly::one());
        let sys = ZeroDimSystem::new(&f, &g, 128).unwrap();
        assert_eq!(sys.len(), 4);
        for pt in sys.points() {
            assert!(pt.x_ball().re_ball().contains_rational(&rat(0, 1)));
            assert!(!pt.x_ball().im_ball().contains_zero() || pt.x_ball().rad.is_zero());
        }
    }

    #[test]
    fn system_empty_and_ratio_annihilator() {
        // Parallel lines never meet: the solution set is empty.
        let f = SparsePoly::one()
            .sub(&SparsePoly::var(Var::X))
            .sub(&SparsePoly::var(Var::Y));
        let shifted = f.add(&SparsePoly::one().scale(&rat(2, 1)));
        let sys = ZeroDimSystem::new(&f, &shifted, 128).unwrap();
        assert!(sys.is_empty());
        // On {1 - x - y - xy = 0, y = x} the ratio x/y equals 1 at both
        // solutions, so the squarefree annihilator is exactly t - 1.
        let q = SparsePoly::one()
            .sub(&SparsePoly::var(Var::X))
            .sub(&SparsePoly::var(Var::Y))
            .sub(&SparsePoly::var(Var::X).mul(&SparsePoly::var(Var::Y)));
        let g = SparsePoly::var(Var::Y).sub(&SparsePoly::var(Var::X));
        let mut sys = ZeroDimSystem::new(&q, &g, 128).unwrap();
        let num = SparsePoly::var(Var::X);
        let den = SparsePoly::var(Var::Y);
        let ann = sys.ratio_annihilator(&num, &den).unwrap();
        assert_eq!(uni_deg(&ann), Some(1));
        assert!(uni_eval(&ann, &rat(1, 1)).is_zero());
        let gp = GaussPoly::from_uni(&ann);
        for idx in 0..sys.len() {
            let mut v = sys.ratio_value(idx, &num, &den, &gp, 128).unwrap();
            let mut one = AlgebraicNumber::from_rational(&rat(1, 1));
            assert!(v.equals(&mut one).unwrap());
        }
    }

    #[test]
    fn refine_point_below_target() {
        let f = SparsePoly::one()
            .sub(&SparsePoly::var(Var::X))
            .sub(&SparsePoly::var(Var::Y))
            .sub(&SparsePoly::var(Var::X).mul(&SparsePoly::var(Var::Y)));
        let g = SparsePoly::var(Var::Y).sub(&SparsePoly::var(Var::X));
        let mut pts = solve_system(&f, &g, 128).unwrap();
        let target = Rad::pow2(-300);
        for pt in &mut pts {
            refine_point(&f, &g, pt, &target, 128).unwrap();
            assert!(pt.x_ball().rad.le_rad(&target));
            assert!(pt.y_ball().rad.le_rad(&target));
        }
    }

    #[test]
    fn precision_escalation_reports_cap() {
        // Refinement on a root-free region can never certify.
        let p = GaussPoly::from_uni(&uni_from_i64(&[1, 0, 1])); // t^2 + 1
        let b = ball_f64(5.0, 1, 100);
        let r = kr_refine(&p, &b, &Rad::pow2(-200), 128);
        assert!(matches!(r, Err(Error::PrecisionExhausted { .. })));
    }
}
