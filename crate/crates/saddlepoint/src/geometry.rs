//! Geometry of the pole curve for a fixed lattice direction.
//!
//! For F = P/Q the exponential growth of the coefficients a_{rs} along a ray
//! r:s is governed by critical points of the height
//! h(x, y) = -r_hat log|x| - s_hat log|y| restricted to the curve V: Q = 0.
//! On the punctured torus these are the solutions of Q = mu = 0 with
//! mu = s x Q_x - r y Q_y.  This module certifies that finite critical set:
//! locations as algebraic points, saddle orders (via an exact curvature test
//! and, when degenerate, successive tangential log-derivatives), height
//! enclosures with exact tie detection, and the direction census read off
//! the Newton polygon (escape slopes, axis crossings, leading branch data,
//! and the degenerate-Hessian direction set).

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::algnum::{
    annihilator_of_value, isolate_roots, solve_system, AlgebraicNumber, AlgebraicPoint, GaussPoly,
    ZeroDimSystem, PREC_CAP,
};
use crate::ball::{ball_log_abs, RealBall};
use crate::error::{Assumption, Error, Result};
use crate::exactpoly::{
    divexact_bivar, gcd_bivar, rat_int, uni_deg, uni_gcd, uni_squarefree, uni_trim, uni_yun, Rad,
    Rational, SparsePoly, UniPoly, Var,
};

/// Largest accepted degree (in either variable) for the denominator.
pub const DEGREE_CAP: u32 = 64;

/// Cap on successive tangential derivatives when classifying a degenerate
/// saddle.
pub const DERIVATIVE_CAP: u32 = 8;

/// Direction component sum beyond which exact height-tie detection is not
/// attempted (the comparison then relies on ball separation alone).
const TIE_KEY_CAP: u64 = 64;

// ---------------------------------------------------------------------------
// Directions
// ---------------------------------------------------------------------------

/// A lattice direction r:s with positive integer components, stored reduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DirectionRatio {
    r: u64,
    s: u64,
}

impl DirectionRatio {
    pub fn new(r: u64, s: u64) -> Result<Self> {
        if r == 0 || s == 0 {
            return Err(Error::BadDirection {
                r,
                s,
                reason: "direction components must be positive".into(),
            });
        }
        let g = r.gcd(&s);
        Ok(DirectionRatio { r: r / g, s: s / g })
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn s(&self) -> u64 {
        self.s
    }

    pub fn swapped(&self) -> Self {
        DirectionRatio { r: self.s, s: self.r }
    }

    /// The slope r/s as an exact rational.
    pub fn ratio(&self) -> Rational {
        Rational::new(BigInt::from(self.r), BigInt::from(self.s))
    }

    pub fn r_rational(&self) -> Rational {
        Rational::from_integer(BigInt::from(self.r))
    }

    pub fn s_rational(&self) -> Rational {
        Rational::from_integer(BigInt::from(self.s))
    }

    /// r / (r + s).
    pub fn r_hat(&self) -> Rational {
        Rational::new(BigInt::from(self.r), BigInt::from(self.r + self.s))
    }

    /// s / (r + s).
    pub fn s_hat(&self) -> Rational {
        Rational::new(BigInt::from(self.s), BigInt::from(self.r + self.s))
    }

    pub fn total(&self) -> u64 {
        self.r + self.s
    }
}

impl fmt::Display for DirectionRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.r, self.s)
    }
}

// ---------------------------------------------------------------------------
// Assumption checks
// ---------------------------------------------------------------------------

/// Gate for every analysis entry point: Q(0,0) != 0, degrees within the cap,
/// at least three monomials, and a smooth pole curve (decided exactly).
pub fn check_assumptions(q: &SparsePoly) -> Result<()> {
    if q.coeff(0, 0).is_zero() {
        return Err(Error::AssumptionViolated(Assumption::DenominatorNonzeroAtOrigin));
    }
    let d = q.max_degree();
    if d > DEGREE_CAP {
        return Err(Error::DegreeCap { cap: DEGREE_CAP, found: d });
    }
    if q.num_terms() <= 2 {
        return Err(Error::AssumptionViolated(Assumption::NotBinomial));
    }
    if !pole_curve_is_smooth(q)? {
        return Err(Error::AssumptionViolated(Assumption::SmoothPoleCurve));
    }
    Ok(())
}

/// Exact smoothness test for V: Q = 0 over the whole affine plane.
///
/// A repeated factor of Q divides Q, Q_x and Q_y, so a nonconstant
/// gcd(Q, Q_x, Q_y) detects it; conversely a squarefree Q has constant
/// triple gcd.  With Q squarefree, write Q = g u and Q_x = g w for
/// g = gcd(Q, Q_x); singular points either lie on g = 0 (where Q and Q_x
/// vanish automatically, so only Q_y = 0 must be checked) or solve the
/// zero-dimensional coprime system u = w = 0, where Q_y is tested exactly
/// point by point.
pub fn pole_curve_is_smooth(q: &SparsePoly) -> Result<bool> {
    let qx = q.derivative(Var::X);
    let qy = q.derivative(Var::Y);
    if qx.is_zero() && qy.is_zero() {
        return Ok(true);
    }
    let triple = gcd_bivar(&gcd_bivar(q, &qx), &qy);
    if triple.max_degree() > 0 {
        return Ok(false);
    }
    let prec = 128;
    let g = gcd_bivar(q, &qx);
    if g.max_degree() > 0 && zeros_exist(&g, &qy, prec)? {
        return Ok(false);
    }
    let (u, w) = if g.max_degree() > 0 {
        (divexact_bivar(q, &g)?, divexact_bivar(&qx, &g)?)
    } else {
        (q.clone(), qx.clone())
    };
    let mut sys = ZeroDimSystem::new(&u, &w, prec)?;
    for idx in 0..sys.len() {
        if sys.value_is_zero(idx, &qy, prec)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether the zero sets of f and h intersect (in any dimension).
fn zeros_exist(f: &SparsePoly, h: &SparsePoly, prec: u32) -> Result<bool> {
    if f.is_zero() {
        return Ok(h.is_zero() || h.max_degree() > 0);
    }
    if h.is_zero() {
        return Ok(f.max_degree() > 0);
    }
    if f.max_degree() == 0 || h.max_degree() == 0 {
        return Ok(false);
    }
    let f_pure_x = f.deg_y() == 0;
    let f_pure_y = f.deg_x() == 0;
    let h_pure_x = h.deg_y() == 0;
    let h_pure_y = h.deg_x() == 0;
    if f_pure_x && h_pure_x {
        let g = uni_gcd(&f.as_uni(Var::X).unwrap(), &h.as_uni(Var::X).unwrap());
        return Ok(uni_deg(&g).map_or(false, |d| d > 0));
    }
    if f_pure_y && h_pure_y {
        let g = uni_gcd(&f.as_uni(Var::Y).unwrap(), &h.as_uni(Var::Y).unwrap());
        return Ok(uni_deg(&g).map_or(false, |d| d > 0));
    }
    if (f_pure_x && h_pure_y) || (f_pure_y && h_pure_x) {
        // Two nonconstant univariate polynomials in different variables
        // always share zeros (a grid of them).
        return Ok(true);
    }
    if gcd_bivar(f, h).max_degree() > 0 {
        return Ok(true);
    }
    Ok(!solve_system(f, h, prec)?.is_empty())
}

// ---------------------------------------------------------------------------
// The critical system
// ---------------------------------------------------------------------------

/// Second generator of the critical system: mu = s x Q_x - r y Q_y.
pub fn mu_poly(q: &SparsePoly, dir: &DirectionRatio) -> SparsePoly {
    let qx = q.derivative(Var::X);
    let qy = q.derivative(Var::Y);
    qx.mul_var(Var::X)
        .scale(&dir.s_rational())
        .sub(&qy.mul_var(Var::Y).scale(&dir.r_rational()))
}

/// Direction-independent curvature expression; its exact vanishing at a
/// critical point marks a saddle of order greater than two.
pub fn psi_poly(q: &SparsePoly) -> SparsePoly {
    let qx = q.derivative(Var::X);
    let qy = q.derivative(Var::Y);
    let qxx = qx.derivative(Var::X);
    let qyy = qy.derivative(Var::Y);
    let qxy = qx.derivative(Var::Y);
    let t1 = qy.mul(&qy).mul(&qx.add(&qxx.mul_var(Var::X))).mul_var(Var::Y);
    let t2 = qx.mul(&qx).mul(&qy.add(&qyy.mul_var(Var::Y))).mul_var(Var::X);
    let t3 = qx
        .mul(&qy)
        .mul(&qxy)
        .mul_var(Var::X)
        .mul_var(Var::Y)
        .scale(&rat_int(2));
    t1.add(&t2).sub(&t3)
}

/// A certified critical point of the height on the pole curve.
#[derive(Clone, Debug)]
pub struct CriticalPoint {
    pub point: AlgebraicPoint,
    /// Saddle order: 2 for a nondegenerate saddle, k for a k-fold one.
    pub order: u32,
    pub height: RealBall,
    /// Index of the exact-height equivalence class, 0 = highest.
    pub level: usize,
    defining_x: UniPoly,
    defining_y: UniPoly,
}

impl CriticalPoint {
    pub fn defining_x(&self) -> &UniPoly {
        &self.defining_x
    }

    pub fn defining_y(&self) -> &UniPoly {
        &self.defining_y
    }
}

/// All critical points of the height in direction r:s on the punctured
/// torus, sorted by weakly decreasing height with exact tie detection.
pub fn critical_points(
    q: &SparsePoly,
    dir: &DirectionRatio,
    prec: u32,
) -> Result<Vec<CriticalPoint>> {
    let mu = mu_poly(q, dir);
    let mut sys = ZeroDimSystem::new(q, &mu, prec)?;
    let px = sys.x_eliminant().clone();
    let py = sys.y_eliminant().clone();
    let mut pts: Vec<CriticalPoint> = vec![];
    for idx in 0..sys.len() {
        let on_axis = {
            let pt = sys.point_mut(idx);
            pt.x.is_zero()? || pt.y.is_zero()?
        };
        if on_axis {
            continue;
        }
        let order = saddle_order(q, dir, &mut sys, idx, prec)?;
        let mut pt = sys.point(idx).clone();
        let height = height_ball(&mut pt, dir, prec)?;
        pts.push(CriticalPoint {
            point: pt,
            order,
            height,
            level: 0,
            defining_x: px.clone(),
            defining_y: py.clone(),
        });
    }
    let mut sorted: Vec<CriticalPoint> = vec![];
    for mut cp in pts {
        let mut pos = sorted.len();
        for i in 0..sorted.len() {
            if cmp_by_height(&mut cp, &mut sorted[i], dir, prec)? == Ordering::Greater {
                pos = i;
                break;
            }
        }
        sorted.insert(pos, cp);
    }
    let mut level = 0usize;
    for i in 0..sorted.len() {
        if i > 0 {
            let (head, tail) = sorted.split_at_mut(i);
            if cmp_by_height(&mut tail[0], &mut head[i - 1], dir, prec)? != Ordering::Equal {
                level += 1;
            }
        }
        sorted[i].level = level;
    }
    for cp in &mut sorted {
        cp.height = height_ball(&mut cp.point, dir, prec)?;
    }
    Ok(sorted)
}

/// Height enclosure h = -r_hat log|x| - s_hat log|y| of a point with both
/// coordinates off the axes.
pub fn height_ball(pt: &mut AlgebraicPoint, dir: &DirectionRatio, prec: u32) -> Result<RealBall> {
    if pt.x.is_zero()? || pt.y.is_zero()? {
        return Err(Error::BallDomain("height of a point on a coordinate axis"));
    }
    let neg_r_hat = -dir.r_hat();
    let neg_s_hat = -dir.s_hat();
    let mut p = prec.max(64);
    loop {
        let target = Rad::pow2(-(p as i64));
        pt.x.refine_to(&target)?;
        pt.y.refine_to(&target)?;
        match (ball_log_abs(pt.x.ball(), p), ball_log_abs(pt.y.ball(), p)) {
            (Ok(lx), Ok(ly)) => {
                let hx = lx.scale_rational(&neg_r_hat, p);
                let hy = ly.scale_rational(&neg_s_hat, p);
                return Ok(hx.add(&hy, p));
            }
            _ => {
                p = p.saturating_mul(2);
                if p > PREC_CAP {
                    return Err(Error::PrecisionExhausted {
                        reached: p / 2,
                        context: "height of a point too close to a coordinate axis".into(),
                    });
                }
            }
        }
    }
}

/// Saddle order at a certified critical point (solution `idx` of the
/// system).  Order 2 is decided by the exact nonvanishing of psi; beyond
/// that, numerators of successive tangential derivatives of the logarithmic
/// height derivative are tested exactly, up to `DERIVATIVE_CAP`.
pub fn saddle_order(
    q: &SparsePoly,
    dir: &DirectionRatio,
    sys: &mut ZeroDimSystem,
    idx: usize,
    prec: u32,
) -> Result<u32> {
    let psi = psi_poly(q);
    if !sys.value_is_zero(idx, &psi, prec)? {
        return Ok(2);
    }
    let qx = q.derivative(Var::X);
    let qy = q.derivative(Var::Y);
    let tangential =
        |f: &SparsePoly| f.derivative(Var::X).mul(&qy).sub(&f.derivative(Var::Y).mul(&qx));
    let xy = SparsePoly::var(Var::X).mul(&SparsePoly::var(Var::Y));
    let xy_tan = tangential(&xy);
    let qy_tan = tangential(&qy);
    // L = mu / ((r+s) (xy) Qy) up to the positive constant; its j-th
    // tangential derivative has numerator n with denominator ((xy) Qy)^(j+1).
    let step = |n: &SparsePoly, e: i64| -> SparsePoly {
        tangential(n)
            .mul(&xy)
            .mul(&qy)
            .sub(&n.mul(&xy_tan.mul(&qy).add(&xy.mul(&qy_tan))).scale(&rat_int(e)))
    };
    let mut n = mu_poly(q, dir);
    let mut e: i64 = 1;
    n = step(&n, e);
    e += 1;
    for j in 2..=DERIVATIVE_CAP {
        n = step(&n, e);
        e += 1;
        if !sys.value_is_zero(idx, &n, prec)? {
            return Ok(j + 1);
        }
    }
    Err(Error::DerivativeCap { cap: DERIVATIVE_CAP })
}

// ---------------------------------------------------------------------------
// Height comparison with exact ties
// ---------------------------------------------------------------------------

fn cmp_by_height(
    a: &mut CriticalPoint,
    b: &mut CriticalPoint,
    dir: &DirectionRatio,
    prec: u32,
) -> Result<Ordering> {
    let mut exact_tried = false;
    let mut p = prec.max(64);
    loop {
        let ha = height_ball(&mut a.point, dir, p)?;
        let hb = height_ball(&mut b.point, dir, p)?;
        if ha.certainly_lt(&hb) {
            return Ok(Ordering::Less);
        }
        if hb.certainly_lt(&ha) {
            return Ok(Ordering::Greater);
        }
        if !exact_tried {
            exact_tried = true;
            if let Some(true) = heights_equal_exact(a, b, dir, prec)? {
                return Ok(Ordering::Equal);
            }
        }
        p = p.saturating_mul(2);
        if p > PREC_CAP {
            return Err(Error::PrecisionExhausted {
                reached: p / 2,
                context: "height comparison did not separate".into(),
            });
        }
    }
}

/// Exact height equality: h(a) = h(b) iff |x_a|^{2r} |y_a|^{2s} equals the
/// same monomial at b, an identity between real algebraic numbers.  Returns
/// None when the direction components exceed the tie-key cap.
fn heights_equal_exact(
    a: &mut CriticalPoint,
    b: &mut CriticalPoint,
    dir: &DirectionRatio,
    prec: u32,
) -> Result<Option<bool>> {
    {
        let mut cx = b.point.x.conj();
        let mut cy = b.point.y.conj();
        if a.point.x.equals(&mut cx)? && a.point.y.equals(&mut cy)? {
            return Ok(Some(true));
        }
    }
    if dir.total() > TIE_KEY_CAP {
        return Ok(None);
    }
    let mut ka = height_key(a, dir, prec)?;
    let mut kb = height_key(b, dir, prec)?;
    Ok(Some(ka.equals(&mut kb)?))
}

/// |x|^2 (or |y|^2) as an algebraic number: a root of the annihilator of
/// x * y over two copies of the coordinate's defining polynomial.
fn modulus_sq_number(
    v: &mut AlgebraicNumber,
    defining: &UniPoly,
    prec: u32,
) -> Result<(AlgebraicNumber, UniPoly)> {
    let xy = SparsePoly::var(Var::X).mul(&SparsePoly::var(Var::Y));
    let ann = annihilator_of_value(defining, defining, &xy)?;
    let sf = uni_squarefree(&ann);
    let gp = GaussPoly::from_uni(&sf);
    let mut p = prec.max(64);
    loop {
        let ball = v.ball().mul(&v.ball().conj(), p);
        if let Ok(num) = AlgebraicNumber::new(&gp, &ball, p) {
            return Ok((num, sf));
        }
        p = p.saturating_mul(2);
        if p > PREC_CAP {
            return Err(Error::PrecisionExhausted {
                reached: p / 2,
                context: "squared modulus of a coordinate".into(),
            });
        }
        v.refine_to(&Rad::pow2(-(p as i64)))?;
    }
}

fn height_key(cp: &mut CriticalPoint, dir: &DirectionRatio, prec: u32) -> Result<AlgebraicNumber> {
    let (mut m, pm) = modulus_sq_number(&mut cp.point.x, &cp.defining_x, prec)?;
    let (mut n, pn) = modulus_sq_number(&mut cp.point.y, &cp.defining_y, prec)?;
    let mono = SparsePoly::monomial(dir.r() as u32, dir.s() as u32, Rational::one());
    let ann = annihilator_of_value(&pm, &pn, &mono)?;
    let sf = uni_squarefree(&ann);
    let gp = GaussPoly::from_uni(&sf);
    let mut p = prec.max(64);
    loop {
        let bm = m.ball().pow_i64(dir.r() as i64, p)?;
        let bn = n.ball().pow_i64(dir.s() as i64, p)?;
        let ball = bm.mul(&bn, p);
        if let Ok(k) = AlgebraicNumber::new(&gp, &ball, p) {
            return Ok(k);
        }
        p = p.saturating_mul(2);
        if p > PREC_CAP {
            return Err(Error::PrecisionExhausted {
                reached: p / 2,
                context: "height tie key".into(),
            });
        }
        m.refine_to(&Rad::pow2(-(p as i64)))?;
        n.refine_to(&Rad::pow2(-(p as i64)))?;
    }
}

// ---------------------------------------------------------------------------
// Newton polygon census
// ---------------------------------------------------------------------------

/// Vertices of the upper hull of the support, by increasing x-exponent.
fn upper_hull(q: &SparsePoly) -> Vec<(i64, i64)> {
    let mut top: BTreeMap<u32, u32> = BTreeMap::new();
    for (&(i, j), _) in q.terms() {
        top.entry(i).and_modify(|t| *t = (*t).max(j)).or_insert(j);
    }
    let pts: Vec<(i64, i64)> = top.iter().map(|(&i, &j)| (i as i64, j as i64)).collect();
    let mut hull: Vec<(i64, i64)> = vec![];
    for &p in &pts {
        while hull.len() >= 2 {
            let o = hull[hull.len() - 2];
            let a = hull[hull.len() - 1];
            let cross = (a.0 - o.0) * (p.1 - o.1) - (a.1 - o.1) * (p.0 - o.0);
            if cross >= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

/// Escape slopes: directions r/s at which a branch of the curve with
/// y -> infinity as x -> 0 keeps the height bounded.  Read off the upper
/// hull edges of the Newton polygon that rise to the right.
pub fn bad_directions(q: &SparsePoly) -> BTreeSet<Rational> {
    let hull = upper_hull(q);
    let mut out = BTreeSet::new();
    for w in hull.windows(2) {
        let (i1, j1) = w[0];
        let (i2, j2) = w[1];
        if i2 > i1 && j2 > j1 {
            out.insert(Rational::new(BigInt::from(i2 - i1), BigInt::from(j2 - j1)));
        }
    }
    out
}

/// Escape slopes of the swapped-variable curve (branches with x -> infinity
/// as y -> 0), mapped back into r/s form.  Used to steer representative
/// picks away from the mirrored escapes.
pub fn swapped_escape_directions(q: &SparsePoly) -> BTreeSet<Rational> {
    bad_directions(&q.swap_vars()).into_iter().map(|b| b.recip()).collect()
}

/// Distinct roots of Q(0, y) and of Q(x, 0), as certified algebraic numbers.
pub fn axis_points(
    q: &SparsePoly,
    prec: u32,
) -> Result<(Vec<AlgebraicNumber>, Vec<AlgebraicNumber>)> {
    Ok((distinct_roots(&q.at_x_zero(), prec)?, distinct_roots(&q.at_y_zero(), prec)?))
}

fn distinct_roots(p: &UniPoly, prec: u32) -> Result<Vec<AlgebraicNumber>> {
    if uni_deg(p).map_or(true, |d| d == 0) {
        return Ok(vec![]);
    }
    let sf = uni_squarefree(p);
    let gp = GaussPoly::from_uni(&sf);
    isolate_roots(&gp, prec)?
        .into_iter()
        .map(|b| AlgebraicNumber::new(&gp, &b, prec))
        .collect()
}

/// Leading datum of one branch of y(x) at x -> 0: y ~ c x^(-beta) with
/// ramification index k (the branch permutes k sheets of x^(1/k)).
#[derive(Clone, Debug)]
pub struct PuiseuxBranch {
    pub beta: Rational,
    pub ramification: u32,
    pub coeff: AlgebraicNumber,
}

/// Leading branch data at x -> 0.  Branches with finite limits (beta = 0)
/// carry the roots of Q(0, y) with their multiplicities; escaping branches
/// come from the rising upper-hull edges, one per distinct root of the edge
/// polynomial, with the canonical sheet representative as coefficient.
pub fn puiseux_leading(q: &SparsePoly, prec: u32) -> Result<Vec<PuiseuxBranch>> {
    let mut out = vec![];
    let base = q.at_x_zero();
    for (mult, factor) in uni_yun(&base) {
        let gp = GaussPoly::from_uni(&factor);
        for b in isolate_roots(&gp, prec)? {
            out.push(PuiseuxBranch {
                beta: Rational::zero(),
                ramification: mult,
                coeff: AlgebraicNumber::new(&gp, &b, prec)?,
            });
        }
    }
    let hull = upper_hull(q);
    for w in hull.windows(2) {
        let (i1, j1) = w[0];
        let (i2, j2) = w[1];
        if !(i2 > i1 && j2 > j1) {
            continue;
        }
        let di = i2 - i1;
        let dj = j2 - j1;
        let g = di.gcd(&dj);
        let p_step = di / g;
        let q_step = dj / g;
        let beta = Rational::new(BigInt::from(di), BigInt::from(dj));
        // Edge polynomial e(u) with u standing for c^q_step.
        let mut e: UniPoly = (0..=g)
            .map(|m| q.coeff((i1 + m * p_step) as u32, (j1 + m * q_step) as u32))
            .collect();
        uni_trim(&mut e);
        // Same polynomial in the coefficient c itself: e(c^q_step).
        let mut e_c: UniPoly = vec![Rational::zero(); (g * q_step) as usize + 1];
        for (m, c) in e.iter().enumerate() {
            e_c[m * q_step as usize] = c.clone();
        }
        for (mult, factor) in uni_yun(&e) {
            let gp = GaussPoly::from_uni(&factor);
            for u_ball in isolate_roots(&gp, prec)? {
                let u_num = AlgebraicNumber::new(&gp, &u_ball, prec)?;
                let coeff = canonical_sheet_root(&e_c, q_step, u_num, prec)?;
                out.push(PuiseuxBranch {
                    beta: beta.clone(),
                    ramification: mult * q_step as u32,
                    coeff,
                });
            }
        }
    }
    Ok(out)
}

/// Among the q-th roots c of a given edge-polynomial root u (the sheets of
/// one branch), pick the canonical representative: the largest real one if
/// any sheet is real, otherwise the one in the upper half plane with
/// certifiably largest real part.
fn canonical_sheet_root(
    e_c: &UniPoly,
    k: i64,
    mut u: AlgebraicNumber,
    prec: u32,
) -> Result<AlgebraicNumber> {
    let sf = uni_squarefree(e_c);
    let gp = GaussPoly::from_uni(&sf);
    let mut cands: Vec<AlgebraicNumber> = isolate_roots(&gp, prec)?
        .into_iter()
        .map(|b| AlgebraicNumber::new(&gp, &b, prec))
        .collect::<Result<_>>()?;
    let mut p = prec.max(64);
    let sheets = loop {
        let target = Rad::pow2(-(p as i64));
        u.refine_to(&target)?;
        let mut matching = vec![];
        for c in &mut cands {
            c.refine_to(&target)?;
            let powb = c.ball().pow_i64(k, p)?;
            if !powb.certainly_disjoint(u.ball(), p) {
                matching.push(c.clone());
            }
        }
        if matching.len() as i64 == k {
            break matching;
        }
        p = p.saturating_mul(2);
        if p > PREC_CAP {
            return Err(Error::PrecisionExhausted {
                reached: p / 2,
                context: "sheet identification for a branch coefficient".into(),
            });
        }
    };
    let mut reals = vec![];
    let mut upper = vec![];
    for mut c in sheets {
        if c.is_real()? {
            reals.push(c);
        } else {
            let mut q = p;
            loop {
                let im = c.ball().im_ball();
                if im.certainly_positive() {
                    upper.push(c);
                    break;
                }
                if im.certainly_negative() {
                    break;
                }
                q = q.saturating_mul(2);
                if q > PREC_CAP {
                    return Err(Error::PrecisionExhausted {
                        reached: q / 2,
                        context: "half-plane test for a branch coefficient".into(),
                    });
                }
                c.refine_to(&Rad::pow2(-(q as i64)))?;
            }
        }
    }
    let pool = if reals.is_empty() { upper } else { reals };
    max_by_real_part(pool, p)
}

fn max_by_real_part(mut pool: Vec<AlgebraicNumber>, prec: u32) -> Result<AlgebraicNumber> {
    let mut best = pool
        .pop()
        .ok_or_else(|| Error::Internal("no canonical sheet representative".into()))?;
    for mut c in pool {
        let mut p = prec.max(64);
        loop {
            let rb = best.ball().re_ball();
            let rc = c.ball().re_ball();
            if rb.certainly_lt(&rc) {
                best = c;
                break;
            }
            if rc.certainly_lt(&rb) {
                break;
            }
            p = p.saturating_mul(2);
            if p > PREC_CAP {
                return Err(Error::PrecisionExhausted {
                    reached: p / 2,
                    context: "ordering branch sheets by real part".into(),
                });
            }
            best.refine_to(&Rad::pow2(-(p as i64)))?;
            c.refine_to(&Rad::pow2(-(p as i64)))?;
        }
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// Degenerate-Hessian directions
// ---------------------------------------------------------------------------

/// Positive real direction slopes lambda = x Q_x / (y Q_y) at the points of
/// V where the curvature expression vanishes: a (finite) superset of the
/// directions admitting higher-order saddles.  Requires Q non-binomial with
/// a smooth curve; a shared factor between Q and the curvature expression
/// is reported as a positive-dimensional failure.
pub fn monkey_directions(q: &SparsePoly, prec: u32) -> Result<Vec<AlgebraicNumber>> {
    let psi = psi_poly(q);
    if psi.is_zero() {
        return Err(Error::NotZeroDimensional);
    }
    let qx = q.derivative(Var::X);
    let qy = q.derivative(Var::Y);
    let num = qx.mul_var(Var::X);
    let den = qy.mul_var(Var::Y);
    let mut sys = ZeroDimSystem::new(q, &psi, prec)?;
    let mut ann_gp: Option<GaussPoly> = None;
    let mut out: Vec<AlgebraicNumber> = vec![];
    for idx in 0..sys.len() {
        let on_axis = {
            let pt = sys.point_mut(idx);
            pt.x.is_zero()? || pt.y.is_zero()?
        };
        if on_axis {
            continue;
        }
        // Points with y Q_y = 0 have no direction slope; x Q_x = 0 gives
        // slope zero, never a positive direction.
        if sys.value_is_zero(idx, &den, prec)? {
            continue;
        }
        if sys.value_is_zero(idx, &num, prec)? {
            continue;
        }
        if ann_gp.is_none() {
            let sf = sys.ratio_annihilator(&num, &den)?;
            ann_gp = Some(GaussPoly::from_uni(&sf));
        }
        let mut lam = sys.ratio_value(idx, &num, &den, ann_gp.as_ref().unwrap(), prec)?;
        if lam.is_real()? && lam.real_sign()? > 0 {
            let mut dup = false;
            for existing in &mut out {
                if existing.equals(&mut lam)? {
                    dup = true;
                    break;
                }
            }
            if !dup {
                out.push(lam);
            }
        }
    }
    sort_real_ascending(&mut out)?;
    Ok(out)
}

/// Sorts pairwise-distinct real algebraic numbers ascending.
pub fn sort_real_ascending(v: &mut Vec<AlgebraicNumber>) -> Result<()> {
    let mut sorted: Vec<AlgebraicNumber> = vec![];
    for mut a in v.drain(..) {
        let mut pos = sorted.len();
        for i in 0..sorted.len() {
            if real_lt(&mut a, &mut sorted[i])? {
                pos = i;
                break;
            }
        }
        sorted.insert(pos, a);
    }
    *v = sorted;
    Ok(())
}

fn real_lt(a: &mut AlgebraicNumber, b: &mut AlgebraicNumber) -> Result<bool> {
    let mut p: u32 = 64;
    loop {
        let ra = a.ball().re_ball();
        let rb = b.ball().re_ball();
        if ra.certainly_lt(&rb) {
            return Ok(true);
        }
        if rb.certainly_lt(&ra) {
            return Ok(false);
        }
        p = p.saturating_mul(2);
        if p > PREC_CAP {
            return Err(Error::PrecisionExhausted {
                reached: p / 2,
                context: "ordering real algebraic numbers".into(),
            });
        }
        a.refine_to(&Rad::pow2(-(p as i64)))?;
        b.refine_to(&Rad::pow2(-(p as i64)))?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::eval_poly_ball;
    use crate::exactpoly::rat;

    fn poly(terms: &[(u32, u32, i64)]) -> SparsePoly {
        let mut p = SparsePoly::zero();
        for &(i, j, c) in terms {
            p.add_term(i, j, rat_int(c));
        }
        p
    }

    fn line() -> SparsePoly {
        // 1 - x - y
        poly(&[(0, 0, 1), (1, 0, -1), (0, 1, -1)])
    }

    fn delannoy() -> SparsePoly {
        // 1 - x - y - xy
        poly(&[(0, 0, 1), (1, 0, -1), (0, 1, -1), (1, 1, -1)])
    }

    fn census_example() -> SparsePoly {
        // 1 - 3y + 2y^2 - 6xy^4 + x^3y^5
        poly(&[(0, 0, 1), (0, 1, -3), (0, 2, 2), (1, 4, -6), (3, 5, 1)])
    }

    fn monkey_cubic() -> SparsePoly {
        // y - x^2 + 3x - 3: a third-order saddle at (1, 1) in direction 1:1
        poly(&[(0, 1, 1), (2, 0, -1), (1, 0, 3), (0, 0, -3)])
    }

    fn alg(coeffs: &[i64], approx: f64, prec: u32) -> AlgebraicNumber {
        let p = GaussPoly::from_uni(&crate::exactpoly::uni_from_i64(coeffs));
        let balls = isolate_roots(&p, prec).unwrap();
        for b in balls {
            let (re, im, _) = b.to_f64s();
            if (re - approx).abs() < 1e-6 && im.abs() < 1e-6 {
                return AlgebraicNumber::new(&p, &b, prec).unwrap();
            }
        }
        panic!("no root near {approx}");
    }

    #[test]
    fn direction_ratio_reduces_and_validates() {
        let d = DirectionRatio::new(2, 4).unwrap();
        assert_eq!((d.r(), d.s()), (1, 2));
        assert_eq!(d, DirectionRatio::new(1, 2).unwrap());
        assert_eq!(d.to_string(), "1:2");
        assert_eq!(d.swapped(), DirectionRatio::new(2, 1).unwrap());
        assert_eq!(d.ratio(), rat(1, 2));
        assert_eq!(d.r_hat(), rat(1, 3));
        assert!(matches!(DirectionRatio::new(0, 3), Err(Error::BadDirection { .. })));
    }

    #[test]
    fn assumption_gate_examples() {
        assert!(check_assumptions(&line()).is_ok());
        assert!(check_assumptions(&census_example()).is_ok());
        let sq = line().mul(&line());
        assert!(matches!(
            check_assumptions(&sq),
            Err(Error::AssumptionViolated(Assumption::SmoothPoleCurve))
        ));
        let binom = poly(&[(0, 0, 1), (1, 1, -1)]);
        assert!(matches!(
            check_assumptions(&binom),
            Err(Error::AssumptionViolated(Assumption::NotBinomial))
        ));
        let origin = poly(&[(1, 0, 1), (0, 1, 1), (2, 0, 1)]);
        assert!(matches!(
            check_assumptions(&origin),
            Err(Error::AssumptionViolated(Assumption::DenominatorNonzeroAtOrigin))
        ));
        // Nodal curve with two lines crossing at (1, 1).
        let nodal = poly(&[(2, 0, 1), (0, 2, -2), (1, 0, -2), (0, 1, 4), (0, 0, -1)]);
        assert!(matches!(
            check_assumptions(&nodal),
            Err(Error::AssumptionViolated(Assumption::SmoothPoleCurve))
        ));
    }

    #[test]
    fn smoothness_handles_common_derivative_factors() {
        // Q = x y^2 + y is smooth though gcd(Q, Q_x) = y is nonconstant.
        let q = poly(&[(1, 2, 1), (0, 1, 1)]);
        assert!(pole_curve_is_smooth(&q).unwrap());
        // (2 - y)(1 + x + y) has a node at (-3, 2) on the shared-factor locus.
        let sing = poly(&[(0, 0, 2), (1, 0, 2), (0, 1, 1), (1, 1, -1), (0, 2, -1)]);
        assert!(!pole_curve_is_smooth(&sing).unwrap());
    }

    #[test]
    fn critical_points_of_the_line() {
        let dir = DirectionRatio::new(1, 1).unwrap();
        let pts = critical_points(&line(), &dir, 128).unwrap();
        assert_eq!(pts.len(), 1);
        let cp = &pts[0];
        assert_eq!(cp.order, 2);
        assert_eq!(cp.level, 0);
        let mut x = cp.point.x.clone();
        assert!(x.equals(&mut AlgebraicNumber::from_rational(&rat(1, 2))).unwrap());
        let h = cp.height.to_f64();
        assert!((h - std::f64::consts::LN_2).abs() < 1e-12);
        assert!(cp.height.rad.to_f64() < 1e-12);

        let dir21 = DirectionRatio::new(2, 1).unwrap();
        let pts = critical_points(&line(), &dir21, 128).unwrap();
        assert_eq!(pts.len(), 1);
        let mut x = pts[0].point.x.clone();
        let mut y = pts[0].point.y.clone();
        assert!(x.equals(&mut AlgebraicNumber::from_rational(&rat(2, 3))).unwrap());
        assert!(y.equals(&mut AlgebraicNumber::from_rational(&rat(1, 3))).unwrap());
        assert_eq!(pts[0].order, 2);
    }

    #[test]
    fn critical_points_delannoy_sorted_with_levels() {
        let dir = DirectionRatio::new(1, 1).unwrap();
        let pts = critical_points(&delannoy(), &dir, 128).unwrap();
        assert_eq!(pts.len(), 2);
        // Highest first: (sqrt(2)-1, sqrt(2)-1) with height log(1+sqrt 2).
        let mut hi_x = pts[0].point.x.clone();
        assert!(hi_x.equals(&mut alg(&[-1, 2, 1], 0.41421356, 128)).unwrap());
        assert_eq!(pts[0].order, 2);
        assert_eq!(pts[1].order, 2);
        assert_eq!(pts[0].level, 0);
        assert_eq!(pts[1].level, 1);
        let h0 = pts[0].height.to_f64();
        let h1 = pts[1].height.to_f64();
        let expect = (1.0 + 2.0f64.sqrt()).ln();
        assert!((h0 - expect).abs() < 1e-10);
        assert!((h1 + expect).abs() < 1e-10);
        // Symmetric denominator on the diagonal direction: x equals y.
        for cp in &pts {
            let mut x = cp.point.x.clone();
            let mut y = cp.point.y.clone();
            assert!(x.equals(&mut y).unwrap());
        }
        // Both generators vanish on the certified enclosures.
        let mu = mu_poly(&delannoy(), &dir);
        for cp in &pts {
            let f = eval_poly_ball(&delannoy(), cp.point.x_ball(), cp.point.y_ball(), 128);
            let g = eval_poly_ball(&mu, cp.point.x_ball(), cp.point.y_ball(), 128);
            assert!(!f.excludes_zero(128));
            assert!(!g.excludes_zero(128));
        }
    }

    #[test]
    fn degenerate_saddle_order_three() {
        let q = monkey_cubic();
        assert!(check_assumptions(&q).is_ok());
        let dir = DirectionRatio::new(1, 1).unwrap();
        let pts = critical_points(&q, &dir, 128).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].order, 3);
        let mut x = pts[0].point.x.clone();
        assert!(x.equals(&mut AlgebraicNumber::from_rational(&rat(1, 1))).unwrap());
    }

    #[test]
    fn height_of_unit_torus_point_is_zero() {
        let dir = DirectionRatio::new(1, 1).unwrap();
        let one = crate::exactpoly::GaussianRational::from_int(1);
        let mut pt = AlgebraicPoint {
            x: AlgebraicNumber::from_gaussian(&one),
            y: AlgebraicNumber::from_gaussian(&one),
        };
        let h = height_ball(&mut pt, &dir, 128).unwrap();
        assert!(h.contains_rational(&Rational::zero()));
        assert!(h.to_f64().abs() < 1e-30);
    }

    #[test]
    fn newton_polygon_escape_slopes() {
        let bad = bad_directions(&census_example());
        let expect: BTreeSet<Rational> = [rat(1, 2), rat(2, 1)].into_iter().collect();
        assert_eq!(bad, expect);
        assert!(bad_directions(&line()).is_empty());
        assert!(bad_directions(&delannoy()).is_empty());
        let binom = poly(&[(0, 0, 1), (1, 1, -1)]);
        let expect1: BTreeSet<Rational> = [rat(1, 1)].into_iter().collect();
        assert_eq!(bad_directions(&binom), expect1);
        let swapped: BTreeSet<Rational> = [rat(3, 5)].into_iter().collect();
        assert_eq!(swapped_escape_directions(&census_example()), swapped);
    }

    #[test]
    fn axis_crossings() {
        let (ys, xs) = axis_points(&census_example(), 128).unwrap();
        assert_eq!(ys.len(), 2);
        assert!(xs.is_empty());
        let mut targets = vec![
            AlgebraicNumber::from_rational(&rat(1, 1)),
            AlgebraicNumber::from_rational(&rat(1, 2)),
        ];
        for mut r in ys {
            let mut hit = false;
            for t in &mut targets {
                if r.equals(t).unwrap() {
                    hit = true;
                }
            }
            assert!(hit);
        }
        let (ys, xs) = axis_points(&line(), 128).unwrap();
        assert_eq!((ys.len(), xs.len()), (1, 1));
        let (ys, xs) = axis_points(&delannoy(), 128).unwrap();
        assert_eq!((ys.len(), xs.len()), (1, 1));
    }

    #[test]
    fn leading_branch_census() {
        let q = census_example();
        let branches = puiseux_leading(&q, 128).unwrap();
        assert_eq!(branches.len(), 4);
        let total: u32 = branches.iter().map(|b| b.ramification).sum();
        assert_eq!(total, q.deg_y());
        let mut seen = vec![];
        for mut b in branches {
            if b.beta.is_zero() {
                assert_eq!(b.ramification, 1);
                let one = b.coeff.equals(&mut AlgebraicNumber::from_rational(&rat(1, 1))).unwrap();
                let half = b.coeff.equals(&mut AlgebraicNumber::from_rational(&rat(1, 2))).unwrap();
                assert!(one || half);
                seen.push(if one { "0:1" } else { "0:1/2" });
            } else if b.beta == rat(1, 2) {
                assert_eq!(b.ramification, 2);
                // c = 1/sqrt(3), the positive root of 3t^2 - 1
                assert!(b.coeff.equals(&mut alg(&[-1, 0, 3], 0.5773502692, 128)).unwrap());
                seen.push("1/2");
            } else {
                assert_eq!(b.beta, rat(2, 1));
                assert_eq!(b.ramification, 1);
                assert!(b
                    .coeff
                    .equals(&mut AlgebraicNumber::from_rational(&rat(6, 1)))
                    .unwrap());
                seen.push("2");
            }
        }
        seen.sort();
        assert_eq!(seen, vec!["0:1", "0:1/2", "1/2", "2"]);

        let branches = puiseux_leading(&line(), 128).unwrap();
        assert_eq!(branches.len(), 1);
        assert!(branches[0].beta.is_zero());
        assert_eq!(branches[0].ramification, 1);
    }

    #[test]
    fn degenerate_direction_census() {
        assert!(monkey_directions(&line(), 128).unwrap().is_empty());
        assert!(monkey_directions(&delannoy(), 128).unwrap().is_empty());
        // The cubic has exactly one positive real degenerate slope, at 1:1.
        let out = monkey_directions(&monkey_cubic(), 128).unwrap();
        assert_eq!(out.len(), 1);
        let mut lam = out[0].clone();
        assert!(lam.equals(&mut AlgebraicNumber::from_rational(&rat(1, 1))).unwrap());
    }
}
