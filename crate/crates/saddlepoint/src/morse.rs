//! Certified ascent on the pole curve and the saddle classification loop.
//!
//! The height h = -r^ log|x| - s^ log|y| restricted to the curve Q = 0 is,
//! away from its saddles, locally the log-modulus of an analytic function
//! of the chart parameter.  Its logarithmic derivative along the curve,
//!
//! ```text
//! L(x) = -r^ / x - s^ y'(x) / y(x),      y'(x) = -Q_x / Q_y,
//! ```
//!
//! drives everything here: 1/L points uphill, h gains Re[delta L] along a
//! straight parameter segment delta, and at a saddle of order k the first
//! k-1 jet coefficients of L vanish while the next one fixes the k uphill
//! sectors.  Each step is certified with ball arithmetic: a Krawczyk tube
//! pins the implicit coordinate over the whole parameter segment, and an
//! explicit Taylor remainder turns jet enclosures into a strict lower
//! bound for the height gain.
//!
//! Ascent paths from every saddle, processed in descending height order,
//! terminate near an axis (arriving in an x- or y-region) or inside the
//! certified bypass box of a strictly higher pure saddle.  The first level
//! producing a mixed saddle is the critical height; the mixed saddles
//! there are the contributing set, and the cycle coefficients are the
//! increments Y(j) - Y(j+1) of the exit-type indicator around the saddle.

use num_traits::{Signed, Zero};

use crate::ball::{ball_log_abs, eval_poly_ball, sqrt_bounds, ComplexBall, RealBall};
use crate::error::{Error, Result};
use crate::exactpoly::{
    poly_resultant, rat, rat_int, Dyadic, GaussianRational, Rad, Rational, SparsePoly, UniPoly,
    Var,
};
use crate::geometry::{
    bad_directions, critical_points, height_ball, CriticalPoint, DirectionRatio,
};
use crate::algnum::{isolate_roots, GaussPoly};

/// Default ceiling on the total number of ascent steps per run.
pub const DEFAULT_STEP_CAP: u64 = 100_000;

/// Highest saddle order the exit construction supports.
const EXIT_ORDER_CAP: u32 = 3;

// ---------------------------------------------------------------------------
// Points on the curve
// ---------------------------------------------------------------------------

/// Which coordinate serves as the exact chart parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Chart {
    X,
    Y,
}

/// A certified point of the pole curve: an exact Gaussian-rational chart
/// parameter together with a ball isolating the single matching root of Q
/// in the other coordinate.
#[derive(Clone, Debug)]
pub struct CurvePoint {
    pub chart: Chart,
    pub param: GaussianRational,
    pub other: ComplexBall,
}

impl CurvePoint {
    fn param_ball(&self) -> ComplexBall {
        exact_ball(&self.param)
    }

    pub fn x_ball(&self) -> ComplexBall {
        match self.chart {
            Chart::X => self.param_ball(),
            Chart::Y => self.other.clone(),
        }
    }

    pub fn y_ball(&self) -> ComplexBall {
        match self.chart {
            Chart::X => self.other.clone(),
            Chart::Y => self.param_ball(),
        }
    }
}

/// Ball for a Gaussian rational parameter: exact when both denominators
/// are powers of two (the engine only ever generates such parameters),
/// and a tight enclosure otherwise.
fn exact_ball(g: &GaussianRational) -> ComplexBall {
    match (dyadic_exact(&g.re), dyadic_exact(&g.im)) {
        (Some(re), Some(im)) => ComplexBall::exact(re, im),
        _ => ComplexBall::from_gaussian(g, 320),
    }
}

/// Exact dyadic for a rational whose denominator is a power of two.
fn dyadic_exact(q: &Rational) -> Option<Dyadic> {
    let denom = q.denom();
    if (denom & (denom - 1u32)) != Zero::zero() {
        return None;
    }
    let bits = denom.bits();
    Some(Dyadic::new(q.numer().clone(), -(bits as i64 - 1)))
}

/// Round a ball center to a nearby Gaussian rational with short dyadic
/// digits.
fn snap_center(b: &ComplexBall) -> GaussianRational {
    let (re, _) = b.re.round(48);
    let (im, _) = b.im.round(48);
    GaussianRational::new(re.to_rational(), im.to_rational())
}

fn gaussian_from_f64(re: f64, im: f64) -> GaussianRational {
    let enc = |v: f64| {
        let r = Rational::from_float(v).unwrap_or_else(Rational::zero);
        Dyadic::from_rational_dir(&r, 48, false).to_rational()
    };
    GaussianRational::new(enc(re), enc(im))
}

/// Height enclosure of a curve point in the original coordinates.
pub fn curve_height(z: &CurvePoint, dir: &DirectionRatio, prec: u32) -> Result<RealBall> {
    let lx = ball_log_abs(&z.x_ball(), prec)?;
    let ly = ball_log_abs(&z.y_ball(), prec)?;
    let neg_r = -dir.r_hat();
    let neg_s = -dir.s_hat();
    Ok(lx.scale_rational(&neg_r, prec).add(&ly.scale_rational(&neg_s, prec), prec))
}

// ---------------------------------------------------------------------------
// Charts as frames
// ---------------------------------------------------------------------------

/// One chart's view of the problem: the curve polynomial with the chart
/// parameter written as x, plus its partials and the direction weights in
/// the same order.
struct Frame {
    q: SparsePoly,
    qu: SparsePoly,
    qw: SparsePoly,
    r_hat: Rational,
    s_hat: Rational,
}

impl Frame {
    fn new(q: &SparsePoly, dir: &DirectionRatio, chart: Chart) -> Frame {
        let qf = match chart {
            Chart::X => q.clone(),
            Chart::Y => q.swap_vars(),
        };
        let (r_hat, s_hat) = match chart {
            Chart::X => (dir.r_hat(), dir.s_hat()),
            Chart::Y => (dir.s_hat(), dir.r_hat()),
        };
        Frame { qu: qf.derivative(Var::X), qw: qf.derivative(Var::Y), q: qf, r_hat, s_hat }
    }
}

/// Hull ball containing two balls.
fn hull(a: &ComplexBall, b: &ComplexBall) -> ComplexBall {
    let mid_re = a.re.add(&b.re).half();
    let mid_im = a.im.add(&b.im).half();
    let dre = a.re.sub(&b.re);
    let dim = a.im.sub(&b.im);
    let dist_sq = dre.mul(&dre).add(&dim.mul(&dim));
    let (_, dist_hi) = sqrt_bounds(&dist_sq, 64);
    let rad = Rad::from_dyadic_up(&dist_hi.half()).add(&a.rad.max(&b.rad));
    ComplexBall { re: mid_re, im: mid_im, rad }
}

// ---------------------------------------------------------------------------
// Krawczyk tubes
// ---------------------------------------------------------------------------

/// Certify that over every parameter value in `useg` the polynomial
/// Q(u, .) has exactly one root in some ball around `seed`, and return an
/// enclosure of that root valid across the whole segment.
fn tube(f: &Frame, useg: &ComplexBall, seed: &ComplexBall, prec: u32) -> Option<ComplexBall> {
    let m = ComplexBall::exact(seed.re.clone(), seed.im.clone());
    let qw_at_center = eval_poly_ball(&f.qw, useg, &m, prec);
    if !qw_at_center.excludes_zero(prec) {
        return None;
    }
    let c = ComplexBall::exact(qw_at_center.re.clone(), qw_at_center.im.clone())
        .recip(prec)
        .ok()?;
    let qm = eval_poly_ball(&f.q, useg, &m, prec);
    let newton = m.sub(&c.mul(&qm, prec), prec);
    // The Newton correction sets the natural tube thickness; grow from
    // there until the contraction certifies or clearly will not.
    let base = newton.rad.max(&seed.rad).max(&Rad::pow2(-(prec as i64)));
    for k in 0..24i64 {
        let t = ComplexBall { re: m.re.clone(), im: m.im.clone(), rad: base.mul_pow2(k) };
        let qw_t = eval_poly_ball(&f.qw, useg, &t, prec);
        let slope = ComplexBall::one().sub(&c.mul(&qw_t, prec), prec);
        let spread = t.sub(&m, prec);
        let k_ball = newton.add(&slope.mul(&spread, prec), prec);
        if k_ball.contained_in_interior(&t, prec) {
            return Some(k_ball);
        }
    }
    None
}

/// Contract the root ball at one exact parameter value by iterating the
/// tube operator with a degenerate segment.
fn tighten(f: &Frame, u: &ComplexBall, w: &ComplexBall, prec: u32) -> Option<ComplexBall> {
    let mut cur = w.clone();
    for _ in 0..6 {
        match tube(f, u, &cur, prec) {
            Some(next) => {
                let done = next.rad.le_rad(&Rad::pow2(-(prec as i64)));
                cur = next;
                if done {
                    break;
                }
            }
            None => return None,
        }
    }
    Some(cur)
}

// ---------------------------------------------------------------------------
// Jets of the curve and of the log-derivative
// ---------------------------------------------------------------------------

/// Truncated power series with ball coefficients.
#[derive(Clone)]
struct Jet {
    c: Vec<ComplexBall>,
}

impl Jet {
    fn constant(b: ComplexBall, n: usize) -> Jet {
        let mut c = vec![ComplexBall::zero(); n + 1];
        c[0] = b;
        Jet { c }
    }

    fn order(&self) -> usize {
        self.c.len() - 1
    }

    fn add(&self, o: &Jet, prec: u32) -> Jet {
        let n = self.order().min(o.order());
        Jet { c: (0..=n).map(|i| self.c[i].add(&o.c[i], prec)).collect() }
    }

    fn mul(&self, o: &Jet, prec: u32) -> Jet {
        let n = self.order().min(o.order());
        let mut c = vec![ComplexBall::zero(); n + 1];
        for i in 0..=n {
            for j in 0..=(n - i) {
                let t = self.c[i].mul(&o.c[j], prec);
                c[i + j] = c[i + j].add(&t, prec);
            }
        }
        Jet { c }
    }

    fn scale(&self, q: &Rational, prec: u32) -> Jet {
        Jet { c: self.c.iter().map(|b| b.scale_rational(q, prec)).collect() }
    }

    /// d/dt, dropping the top coefficient.
    fn derivative(&self, prec: u32) -> Jet {
        let n = self.order();
        let mut c = vec![ComplexBall::zero(); n.max(1)];
        for i in 1..=n {
            c[i - 1] = self.c[i].scale_rational(&rat_int(i as i64), prec);
        }
        Jet { c }
    }

    /// Multiplicative inverse; requires the constant term to exclude zero.
    fn recip(&self, prec: u32) -> Result<Jet> {
        let n = self.order();
        let b0 = self.c[0].recip(prec)?;
        let mut c = vec![ComplexBall::zero(); n + 1];
        c[0] = b0.clone();
        for m in 1..=n {
            let mut acc = ComplexBall::zero();
            for i in 1..=m {
                acc = acc.add(&self.c[i].mul(&c[m - i], prec), prec);
            }
            c[m] = acc.mul(&b0, prec).neg();
        }
        Ok(Jet { c })
    }
}

/// Evaluate a bivariate polynomial on a pair of jets.
fn poly_on_jets(p: &SparsePoly, xj: &Jet, yj: &Jet, prec: u32) -> Jet {
    let n = xj.order().min(yj.order());
    let dx = p.deg_x() as usize;
    let dy = p.deg_y() as usize;
    let mut xpow: Vec<Jet> = Vec::with_capacity(dx + 1);
    xpow.push(Jet::constant(ComplexBall::one(), n));
    for i in 1..=dx {
        let next = xpow[i - 1].mul(xj, prec);
        xpow.push(next);
    }
    let mut ypow: Vec<Jet> = Vec::with_capacity(dy + 1);
    ypow.push(Jet::constant(ComplexBall::one(), n));
    for j in 1..=dy {
        let next = ypow[j - 1].mul(yj, prec);
        ypow.push(next);
    }
    let mut acc = Jet::constant(ComplexBall::zero(), n);
    for (&(i, j), coef) in p.terms() {
        let t = xpow[i as usize].mul(&ypow[j as usize], prec).scale(coef, prec);
        acc = acc.add(&t, prec);
    }
    acc
}

/// Jet of the implicit coordinate w(u0 + t) to the requested order, seeded
/// by a ball `w0` that isolates the root over the whole ball `u0`.  All
/// coefficients are simultaneous enclosures over every center in `u0`.
fn curve_jet(f: &Frame, u0: &ComplexBall, w0: &ComplexBall, n: usize, prec: u32) -> Result<Jet> {
    let qw0 = eval_poly_ball(&f.qw, u0, w0, prec);
    let inv = qw0.recip(prec)?;
    let mut uj = Jet::constant(u0.clone(), n);
    uj.c[1] = ComplexBall::one();
    let mut wj = Jet::constant(w0.clone(), n);
    for j in 1..=n {
        let val = poly_on_jets(&f.q, &uj, &wj, prec);
        wj.c[j] = val.c[j].mul(&inv, prec).neg();
    }
    Ok(wj)
}

/// Jet of the log-derivative L(u0 + t) of exp h along the curve.
fn logderiv_jet(f: &Frame, u0: &ComplexBall, wj: &Jet, prec: u32) -> Result<Jet> {
    let n = wj.order();
    let mut uj = Jet::constant(u0.clone(), n);
    uj.c[1] = ComplexBall::one();
    let inv_u = uj.recip(prec)?;
    let inv_w = wj.recip(prec)?;
    let term_u = inv_u.scale(&-f.r_hat.clone(), prec);
    let term_w = wj.derivative(prec).mul(&inv_w, prec).scale(&-f.s_hat.clone(), prec);
    Ok(term_u.add(&term_w, prec))
}

/// Ball value of L over a parameter region and a tube for w.
fn logderiv_ball(f: &Frame, u: &ComplexBall, w: &ComplexBall, prec: u32) -> Result<ComplexBall> {
    let qu = eval_poly_ball(&f.qu, u, w, prec);
    let qw = eval_poly_ball(&f.qw, u, w, prec);
    let yprime = qu.div(&qw, prec)?.neg();
    let tu = u.recip(prec)?.scale_rational(&-f.r_hat.clone(), prec);
    let tw = yprime.div(w, prec)?.scale_rational(&-f.s_hat.clone(), prec);
    Ok(tu.add(&tw, prec))
}

// ---------------------------------------------------------------------------
// Ascent steps
// ---------------------------------------------------------------------------

/// Outcome of one certified segment of ascent.
struct StepResult {
    endpoint: CurvePoint,
    /// Strictly positive certified lower bound for the height gain.
    gain: Dyadic,
}

/// One ascent step from a regular point, in the frame of `z.chart`.  The
/// start may carry a parameter ball (used when re-entering from a chart
/// swap); `start_param` then overrides the exact parameter of `z`.
fn ascend_from(
    f: &Frame,
    chart: Chart,
    start_param: &ComplexBall,
    start_other: &ComplexBall,
    prec: u32,
) -> Result<StepResult> {
    let l0 = logderiv_ball(f, start_param, start_other, prec)?;
    if !l0.excludes_zero(prec) {
        return Err(Error::PrecisionExhausted {
            reached: prec,
            context: "ascent direction vanishes within the enclosure".into(),
        });
    }
    let dir0 = l0.recip(prec)?;
    let (dre, dim, _) = dir0.to_f64s();
    if !(dre.is_finite() && dim.is_finite()) || (dre == 0.0 && dim == 0.0) {
        return Err(Error::Internal("ascent direction underflowed".into()));
    }
    // Doubling search for the step scale, then keep the last certified one.
    let mut best: Option<StepResult> = None;
    let mut eps = 2f64.powi(-8);
    let mut tried = 0;
    loop {
        tried += 1;
        if tried > 96 {
            break;
        }
        let delta = gaussian_from_f64(dre * eps, dim * eps);
        if delta.is_zero() {
            eps *= 2.0;
            continue;
        }
        match certify_segment(f, chart, start_param, start_other, &delta, prec)? {
            Some(step) => {
                best = Some(step);
                eps *= 2.0;
            }
            None => {
                if best.is_some() {
                    break;
                }
                eps /= 2.0;
                if eps < 2f64.powi(-64) {
                    break;
                }
            }
        }
    }
    best.ok_or_else(|| Error::Continuation("no ascent step length could be certified".into()))
}

/// Certify monotone ascent along the straight parameter segment from the
/// start enclosure to start + delta, returning the lifted endpoint and a
/// positive height-gain bound, or None when the certificate fails.
fn certify_segment(
    f: &Frame,
    chart: Chart,
    start_param: &ComplexBall,
    start_other: &ComplexBall,
    delta: &GaussianRational,
    prec: u32,
) -> Result<Option<StepResult>> {
    let end = exact_ball(delta).add(start_param, prec);
    let end_param = snap_center(&end);
    let end_ball = exact_ball(&end_param);
    let delta_ball = end_ball.sub(start_param, prec);
    let seg = hull(start_param, &end_ball);
    if !seg.excludes_zero(prec) {
        return Ok(None);
    }
    let t = match tube(f, &seg, start_other, prec) {
        Some(t) => t,
        None => return Ok(None),
    };
    if !t.excludes_zero(prec) {
        return Ok(None);
    }
    let l_seg = match logderiv_ball(f, &seg, &t, prec) {
        Ok(v) => v,
        Err(_) => return Ok(None),
    };
    let gain_ball = delta_ball.mul(&l_seg, prec).re_ball();
    let lo = match gain_ball.lo() {
        Some(d) => d,
        None => return Ok(None),
    };
    if lo.signum() <= 0 {
        return Ok(None);
    }
    let w_end = match tighten(f, &end_ball, &t, prec) {
        Some(w) => w,
        None => return Ok(None),
    };
    Ok(Some(StepResult {
        endpoint: CurvePoint { chart, param: end_param, other: w_end },
        gain: lo,
    }))
}

/// Public single ascent step in the point's own chart.
pub fn ascend_step(
    q: &SparsePoly,
    dir: &DirectionRatio,
    z: &CurvePoint,
    prec: u32,
) -> Result<(CurvePoint, RealBall)> {
    let f = Frame::new(q, dir, z.chart);
    let res = ascend_from(&f, z.chart, &z.param_ball(), &z.other, prec)?;
    let gain = RealBall::from_endpoints(&res.gain, &res.gain, prec);
    Ok((res.endpoint, gain))
}

/// Validated continuation of the implicit coordinate along the straight
/// parameter segment from `from` to `to_param`, with adaptive subdivision.
pub fn lift_segment(
    q: &SparsePoly,
    dir: &DirectionRatio,
    from: &CurvePoint,
    to_param: &GaussianRational,
    prec: u32,
) -> Result<CurvePoint> {
    let f = Frame::new(q, dir, from.chart);
    let mut cur_param = from.param.clone();
    let mut cur_w = from.other.clone();
    let mut remaining = to_param.sub(&cur_param);
    let mut denom = 1u64;
    let mut steps = 0u64;
    while !remaining.is_zero() {
        if steps > 100_000 {
            return Err(Error::Continuation(
                "segment continuation exceeded its subdivision budget".into(),
            ));
        }
        steps += 1;
        let frac = rat(1, denom as i64);
        let sub_target = cur_param.add(&remaining.scale(&frac));
        let a = exact_ball(&cur_param);
        let b = exact_ball(&sub_target);
        let seg = hull(&a, &b);
        match tube(&f, &seg, &cur_w, prec).and_then(|t| tighten(&f, &b, &t, prec)) {
            Some(w_next) => {
                cur_param = sub_target;
                cur_w = w_next;
                remaining = to_param.sub(&cur_param);
                if denom > 1 {
                    denom /= 2;
                }
            }
            None => {
                denom = denom.saturating_mul(2);
                if denom > 1 << 20 {
                    return Err(Error::Continuation(
                        "no certifiable subdivision: the segment meets a branch point".into(),
                    ));
                }
            }
        }
    }
    Ok(CurvePoint { chart: from.chart, param: cur_param, other: cur_w })
}

// ---------------------------------------------------------------------------
// Saddle exits
// ---------------------------------------------------------------------------

/// The k certified exit points of a saddle of order k, in rotational
/// order, each with a positive height-gain bound relative to the saddle.
pub fn saddle_exits(
    q: &SparsePoly,
    dir: &DirectionRatio,
    cp: &CriticalPoint,
    prec: u32,
) -> Result<Vec<(CurvePoint, RealBall)>> {
    let k = cp.order;
    if k > EXIT_ORDER_CAP {
        return Err(Error::Internal(format!(
            "ascent from a saddle of order {} is not supported",
            k
        )));
    }
    let mut pt = cp.point.clone();
    // Chart: parametrize by the coordinate whose own partial is smaller,
    // i.e. solve the implicit coordinate where |dQ| is larger.
    let target = Rad::pow2(-(prec as i64) - 16);
    pt.x.refine_to(&target)?;
    pt.y.refine_to(&target)?;
    let qx_b = eval_poly_ball(&q.derivative(Var::X), pt.x.ball(), pt.y.ball(), prec);
    let qy_b = eval_poly_ball(&q.derivative(Var::Y), pt.x.ball(), pt.y.ball(), prec);
    let chart = pick_chart(&qx_b, &qy_b, prec)?;
    let f = Frame::new(q, dir, chart);
    let (u0, w0) = match chart {
        Chart::X => (pt.x.ball().clone(), pt.y.ball().clone()),
        Chart::Y => (pt.y.ball().clone(), pt.x.ball().clone()),
    };

    // Jet at the (tight) saddle enclosure: coefficient k-1 of L must
    // exclude zero; it encodes the k-th derivative data of h.
    let wj = curve_jet(&f, &u0, &w0, (k + 1) as usize, prec)?;
    let lj = logderiv_jet(&f, &u0, &wj, prec)?;
    let lead = &lj.c[(k - 1) as usize];
    if !lead.excludes_zero(prec) {
        return Err(Error::PrecisionExhausted {
            reached: prec,
            context: "saddle jet leading coefficient did not certify".into(),
        });
    }

    // Direction candidates: the k-th roots of 1/((k-1)! lead), rotated.
    let (lre, lim, _) = lead.to_f64s();
    let fact: f64 = (1..k as u64).map(|v| v as f64).product::<f64>().max(1.0);
    let base = 1.0 / ((lre * lre + lim * lim).sqrt() * fact);
    let arg = -f64::atan2(lim, lre);
    let root_mod = base.powf(1.0 / k as f64);
    let root_arg = arg / k as f64;

    let mut eps = 2f64.powi(-8);
    let mut best: Option<Vec<(CurvePoint, RealBall)>> = None;
    let mut tried = 0;
    loop {
        tried += 1;
        if tried > 80 {
            break;
        }
        match certify_exits(&f, chart, &u0, &w0, &lj, k, eps * root_mod, root_arg, prec)? {
            Some(exits) => {
                best = Some(exits);
                eps *= 2.0;
            }
            None => {
                if best.is_some() {
                    break;
                }
                eps /= 2.0;
                if eps < 2f64.powi(-48) {
                    break;
                }
            }
        }
    }
    best.ok_or_else(|| Error::Continuation("saddle exits could not be certified".into()))
}

fn pick_chart(qx_b: &ComplexBall, qy_b: &ComplexBall, prec: u32) -> Result<Chart> {
    let x_lo = qx_b.abs_lower(prec);
    let y_lo = qy_b.abs_lower(prec);
    match (x_lo, y_lo) {
        (_, Some(ylo)) => {
            // Prefer the x-chart (solve for y) unless Q_y is certifiably
            // dominated by Q_x.
            if let Some(yup) = qy_b.abs_upper(prec) {
                if let Some(xlo) = qx_b.abs_lower(prec) {
                    if yup.lt(&xlo) && ylo.lt(&xlo) {
                        return Ok(Chart::Y);
                    }
                }
            }
            Ok(Chart::X)
        }
        (Some(_), None) => Ok(Chart::Y),
        (None, None) => Err(Error::PrecisionExhausted {
            reached: prec,
            context: "gradient enclosure vanished in both coordinates".into(),
        }),
    }
}

/// Try one common scale for all k exits of a saddle.  Certifies, for each
/// rotated direction: a Krawczyk tube over the exit disk, the Taylor
/// remainder domination making h strictly increasing along the segment,
/// and the pairwise angular separation placing the exits in distinct
/// uphill sectors.
#[allow(clippy::too_many_arguments)]
fn certify_exits(
    f: &Frame,
    chart: Chart,
    u0: &ComplexBall,
    w0: &ComplexBall,
    lj_tight: &Jet,
    k: u32,
    scale: f64,
    root_arg: f64,
    prec: u32,
) -> Result<Option<Vec<(CurvePoint, RealBall)>>> {
    if !(scale.is_finite() && scale > 0.0) {
        return Ok(None);
    }
    let kk = k as usize;
    let mut deltas: Vec<GaussianRational> = Vec::with_capacity(kk);
    for j in 0..kk {
        let ang = root_arg + std::f64::consts::TAU * j as f64 / k as f64;
        deltas.push(gaussian_from_f64(scale * ang.cos(), scale * ang.sin()));
    }
    if deltas.iter().any(|d| d.is_zero()) {
        return Ok(None);
    }
    // Pairwise angular separation > pi/k, checked exactly on the snapped
    // directions: cos(angle) < cos(pi/k) with margin to spare.
    for a in 0..kk {
        for b in (a + 1)..kk {
            let z = deltas[a].mul(&deltas[b].conj());
            let na = deltas[a].norm_sqr();
            let nb = deltas[b].norm_sqr();
            let ok = match k {
                2 => z.re.is_negative(),
                3 => {
                    // 2 Re z < |z| <=> Re z < 0 or 4 (Re z)^2 < |z|^2.
                    z.re.is_negative() || (&z.re * &z.re * rat_int(4)) < (&na * &nb)
                }
                _ => false,
            };
            if !ok {
                return Ok(None);
            }
        }
    }

    // Exit disk: covers every segment from any point of the saddle ball.
    let max_mod_sq = deltas.iter().map(GaussianRational::norm_sqr).fold(Rational::zero(), |m, v| {
        if v > m {
            v
        } else {
            m
        }
    });
    let (_, mod_hi) = sqrt_bounds(&Dyadic::from_rational_dir(&max_mod_sq, 64, true), 64);
    let disk = ComplexBall {
        re: u0.re.clone(),
        im: u0.im.clone(),
        rad: u0.rad.add(&Rad::from_dyadic_up(&mod_hi).mul_pow2(1)),
    };
    let t = match tube(f, &disk, w0, prec) {
        Some(t) => t,
        None => return Ok(None),
    };
    if !disk.excludes_zero(prec) || !t.excludes_zero(prec) {
        return Ok(None);
    }
    // Fat jet over the whole disk bounds the k-th derivative of L there.
    let wj_disk = match curve_jet(f, &disk, &t, (k + 1) as usize, prec) {
        Ok(w) => w,
        Err(_) => return Ok(None),
    };
    let lj_disk = match logderiv_jet(f, &disk, &wj_disk, prec) {
        Ok(l) => l,
        Err(_) => return Ok(None),
    };
    let fact_k: i64 = (1..=k as i64).product();
    let m_k = match lj_disk.c[kk].abs_ball(prec).ok().and_then(|b| b.hi()) {
        Some(h) => h.mul(&Dyadic::from_i64(fact_k)),
        None => return Ok(None),
    };

    let lead = &lj_tight.c[kk - 1];
    let fact_km1 = rat_int((1..k.max(2) as i64).product::<i64>().max(1));
    let mut out = Vec::with_capacity(kk);
    for delta in &deltas {
        // G = Re[delta_ball^k (k-1)! lead] over every start in the saddle
        // ball; delta_ball absorbs the center uncertainty.
        let end_param = snap_center(&exact_ball(delta).add(u0, prec));
        let end_ball = exact_ball(&end_param);
        let delta_ball = end_ball.sub(u0, prec);
        let dk = match delta_ball.pow_i64(k as i64, prec) {
            Ok(v) => v,
            Err(_) => return Ok(None),
        };
        let g_ball = dk.mul(lead, prec).scale_rational(&fact_km1, prec).re_ball();
        let g_lo = match g_ball.lo() {
            Some(d) if d.signum() > 0 => d,
            _ => return Ok(None),
        };
        // Domination: G > |delta|^{k+1} M_k / k.
        let d_up = match delta_ball.abs_upper(prec) {
            Some(d) => d,
            None => return Ok(None),
        };
        let mut d_pow = Dyadic::one();
        for _ in 0..=k {
            d_pow = d_pow.mul(&d_up);
        }
        let rem = d_pow.mul(&m_k);
        let k_dy = Dyadic::from_i64(k as i64);
        if !rem.lt(&g_lo.mul(&k_dy)) {
            return Ok(None);
        }
        // gain >= G/k! - |delta|^{k+1} M_k / (k+1)!.
        let gain_main = Dyadic::from_rational_dir(
            &(g_lo.to_rational() / rat_int(fact_k)),
            96,
            false,
        );
        let gain_rem = Dyadic::from_rational_dir(
            &(rem.to_rational() / rat_int(fact_k * (k as i64 + 1))),
            96,
            true,
        );
        let gain = gain_main.sub(&gain_rem);
        if gain.signum() <= 0 {
            return Ok(None);
        }
        let w_end = match tighten(f, &end_ball, &t, prec) {
            Some(w) => w,
            None => return Ok(None),
        };
        let gb = RealBall::from_endpoints(&gain, &gain, prec);
        out.push((CurvePoint { chart, param: end_param, other: w_end }, gb));
    }
    Ok(Some(out))
}

// ---------------------------------------------------------------------------
// Termination tests
// ---------------------------------------------------------------------------

/// Exit class of one ascent path.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subclass {
    X,
    Y,
}

/// Classification of a saddle from its exits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SaddleClass {
    X,
    Y,
    Mixed,
    Unclassified,
}

/// A committed bypass box around an already classified pure saddle.
struct BypassBox {
    x: ComplexBall,
    y: ComplexBall,
    radius: Dyadic,
    subclass: Subclass,
}

enum Terminal {
    Continue,
    Done(Subclass),
}

fn modulus_below(b: &ComplexBall, eps: &Dyadic, prec: u32) -> bool {
    match b.abs_upper(prec) {
        Some(up) => up.lt(eps),
        None => false,
    }
}

fn terminal_check(
    z: &CurvePoint,
    eps_x: &Dyadic,
    eps_y: &Dyadic,
    bypass: &[BypassBox],
    prec: u32,
) -> Terminal {
    if modulus_below(&z.x_ball(), eps_x, prec) {
        return Terminal::Done(Subclass::X);
    }
    if modulus_below(&z.y_ball(), eps_y, prec) {
        return Terminal::Done(Subclass::Y);
    }
    for bb in bypass {
        let dx = z.x_ball().sub(&bb.x, prec);
        let dy = z.y_ball().sub(&bb.y, prec);
        if modulus_below(&dx, &bb.radius, prec) && modulus_below(&dy, &bb.radius, prec) {
            return Terminal::Done(bb.subclass);
        }
    }
    Terminal::Continue
}

// ---------------------------------------------------------------------------
// Epsilon margins near the axes
// ---------------------------------------------------------------------------

/// Half the certified distance from the axis x = 0 to the nearest critical
/// point or branch point of the projection, and the same for y.
fn axis_margins(
    q: &SparsePoly,
    saddles: &mut [CriticalPoint],
    prec: u32,
) -> Result<(Dyadic, Dyadic)> {
    let mut min_x: Option<Dyadic> = None;
    let mut min_y: Option<Dyadic> = None;
    let fold = |cur: &mut Option<Dyadic>, lo: Dyadic| {
        let replace = cur.as_ref().map_or(true, |c| lo.lt(c));
        if replace {
            *cur = Some(lo);
        }
    };
    for cp in saddles.iter_mut() {
        let lx = coordinate_abs_lower(&mut cp.point.x, prec)?;
        let ly = coordinate_abs_lower(&mut cp.point.y, prec)?;
        fold(&mut min_x, lx);
        fold(&mut min_y, ly);
    }
    for (v, acc) in [(Var::Y, &mut min_x), (Var::X, &mut min_y)] {
        let qv = q.derivative(v);
        let res = poly_resultant(q, &qv, v)?;
        let uni = res.as_uni(v.other()).unwrap_or_default();
        if let Some(d) = uni.iter().position(|c| !c.is_zero()) {
            // Strip the root at zero, then lower-bound the others.
            let core: UniPoly = uni[d..].to_vec();
            if core.len() > 1 {
                let gp = GaussPoly::from_uni(&core);
                for b in isolate_roots(&gp, prec)? {
                    if let Some(lo) = b.abs_lower(prec) {
                        fold(acc, lo);
                    }
                }
            }
        }
    }
    let ex = min_x.ok_or_else(|| Error::Internal("no margin data for the x axis".into()))?;
    let ey = min_y.ok_or_else(|| Error::Internal("no margin data for the y axis".into()))?;
    Ok((ex.half(), ey.half()))
}

fn coordinate_abs_lower(a: &mut crate::algnum::AlgebraicNumber, prec: u32) -> Result<Dyadic> {
    for _ in 0..64 {
        if let Some(lo) = a.ball().abs_lower(prec) {
            return Ok(lo);
        }
        let target = a.ball().rad.mul_pow2(-8).max(&Rad::pow2(-(crate::algnum::PREC_CAP as i64)));
        a.refine_to(&target)?;
    }
    Err(Error::PrecisionExhausted {
        reached: prec,
        context: "coordinate modulus would not separate from zero".into(),
    })
}

// ---------------------------------------------------------------------------
// The classification loop
// ---------------------------------------------------------------------------

/// One saddle's record after the run.
#[derive(Debug)]
pub struct SaddleOutcome {
    pub critical: CriticalPoint,
    pub class: SaddleClass,
    pub subclasses: Vec<Subclass>,
    /// Cycle coefficients Y(j) - Y(j+1); nonzero exactly for contributing
    /// saddles.
    pub cycle: Vec<i64>,
}

/// Full result of the classification run for one direction.
#[derive(Debug)]
pub struct FlowOutcome {
    pub saddles: Vec<SaddleOutcome>,
    /// Critical height enclosure, present once a mixed saddle exists.
    pub c_star: Option<RealBall>,
    pub c_star_level: Option<usize>,
    /// Indices into `saddles` of the contributing set.
    pub xi: Vec<usize>,
    pub total_steps: u64,
}

/// Run the ascent classification over all saddles of the direction.
pub fn classify_saddles(
    q: &SparsePoly,
    dir: &DirectionRatio,
    prec: u32,
    max_steps: u64,
) -> Result<FlowOutcome> {
    let ratio = dir.ratio();
    if bad_directions(q).contains(&ratio) {
        return Err(Error::BadDirection {
            r: dir.r(),
            s: dir.s(),
            reason: "a branch of the curve escapes at finite height in this direction".into(),
        });
    }
    let mut saddles = critical_points(q, dir, prec)?;
    if saddles.is_empty() {
        return Err(Error::Internal("the direction admits no critical points".into()));
    }
    let (eps_x, eps_y) = axis_margins(q, &mut saddles, prec)?;
    let frames = (Frame::new(q, dir, Chart::X), Frame::new(q, dir, Chart::Y));

    let mut outcomes: Vec<SaddleOutcome> = saddles
        .iter()
        .map(|cp| SaddleOutcome {
            critical: cp.clone(),
            class: SaddleClass::Unclassified,
            subclasses: vec![],
            cycle: vec![],
        })
        .collect();
    let mut bypass: Vec<BypassBox> = vec![];
    let mut total_steps = 0u64;
    let mut c_star_level: Option<usize> = None;

    let max_level = saddles.iter().map(|c| c.level).max().unwrap_or(0);
    'levels: for level in 0..=max_level {
        let level_idx: Vec<usize> =
            (0..saddles.len()).filter(|&i| saddles[i].level == level).collect();
        for &i in &level_idx {
            let exits = saddle_exits(q, dir, &saddles[i], prec)?;
            let mut subclasses = Vec::with_capacity(exits.len());
            for (start, _gain) in &exits {
                let sc = trace_path(
                    &frames,
                    start.clone(),
                    &eps_x,
                    &eps_y,
                    &bypass,
                    prec,
                    max_steps,
                    &mut total_steps,
                )?;
                subclasses.push(sc);
            }
            let class = if subclasses.iter().all(|s| *s == Subclass::X) {
                SaddleClass::X
            } else if subclasses.iter().all(|s| *s == Subclass::Y) {
                SaddleClass::Y
            } else {
                SaddleClass::Mixed
            };
            outcomes[i].class = class;
            outcomes[i].subclasses = subclasses;
            if class == SaddleClass::Mixed && c_star_level.is_none() {
                c_star_level = Some(level);
            }
        }
        // Pure saddles of this level shield lower paths from re-ascending:
        // commit their bypass boxes now.
        for &i in &level_idx {
            if matches!(outcomes[i].class, SaddleClass::X | SaddleClass::Y) {
                if let Some(bb) = grow_bypass(q, dir, &saddles, i, &outcomes[i], prec)? {
                    bypass.push(bb);
                }
            }
        }
        if c_star_level.is_some() {
            break 'levels;
        }
    }

    let mut xi = vec![];
    let mut c_star = None;
    if let Some(lv) = c_star_level {
        for (i, o) in outcomes.iter_mut().enumerate() {
            if o.class == SaddleClass::Mixed && o.critical.level == lv {
                xi.push(i);
                o.cycle = cycle_coefficients(&o.subclasses);
            }
        }
        let rep = xi[0];
        let mut pt = outcomes[rep].critical.point.clone();
        c_star = Some(height_ball(&mut pt, dir, prec)?);
    }
    Ok(FlowOutcome { saddles: outcomes, c_star, c_star_level, xi, total_steps })
}

fn cycle_coefficients(subclasses: &[Subclass]) -> Vec<i64> {
    let k = subclasses.len();
    (0..k)
        .map(|j| {
            let yj = (subclasses[j] == Subclass::Y) as i64;
            let yn = (subclasses[(j + 1) % k] == Subclass::Y) as i64;
            yj - yn
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn trace_path(
    frames: &(Frame, Frame),
    start: CurvePoint,
    eps_x: &Dyadic,
    eps_y: &Dyadic,
    bypass: &[BypassBox],
    prec: u32,
    max_steps: u64,
    total_steps: &mut u64,
) -> Result<Subclass> {
    let mut z = start;
    loop {
        match terminal_check(&z, eps_x, eps_y, bypass, prec) {
            Terminal::Done(sc) => return Ok(sc),
            Terminal::Continue => {}
        }
        *total_steps += 1;
        if *total_steps > max_steps {
            return Err(Error::StepCapExceeded { cap: max_steps });
        }
        let f = match z.chart {
            Chart::X => &frames.0,
            Chart::Y => &frames.1,
        };
        match ascend_from(f, z.chart, &z.param_ball(), &z.other, prec) {
            Ok(step) => {
                z = step.endpoint;
                maybe_swap_chart(frames, &mut z, prec);
            }
            Err(e) if e.is_resource_cap() => return Err(e),
            Err(_) => {
                // The step failed in this chart; a swap is the only move
                // left before giving up.
                let swapped = force_swap_chart(frames, &z, prec)?;
                z = swapped;
            }
        }
    }
}

/// Swap charts when the implicit partial is certifiably dominated in the
/// current one.  Executed as a certified ascent step in the other frame,
/// so the height bookkeeping never regresses.
fn maybe_swap_chart(frames: &(Frame, Frame), z: &mut CurvePoint, prec: u32) {
    let f = match z.chart {
        Chart::X => &frames.0,
        Chart::Y => &frames.1,
    };
    let u = z.param_ball();
    let qu = eval_poly_ball(&f.qu, &u, &z.other, prec);
    let qw = eval_poly_ball(&f.qw, &u, &z.other, prec);
    let dominated = match (qw.abs_upper(prec), qu.abs_lower(prec)) {
        (Some(up), Some(lo)) => up.lt(&lo),
        _ => false,
    };
    if !dominated {
        return;
    }
    if let Ok(sw) = force_swap_chart(frames, z, prec) {
        *z = sw;
    }
}

fn force_swap_chart(frames: &(Frame, Frame), z: &CurvePoint, prec: u32) -> Result<CurvePoint> {
    let (other_chart, of) = match z.chart {
        Chart::X => (Chart::Y, &frames.1),
        Chart::Y => (Chart::X, &frames.0),
    };
    // In the other frame the roles flip: the old implicit ball becomes the
    // parameter enclosure and the old exact parameter seeds the tube.
    let res = ascend_from(of, other_chart, &z.other, &z.param_ball(), prec)?;
    Ok(res.endpoint)
}

/// Grow the largest certified bypass box around a pure saddle: Krawczyk
/// uniqueness of the curve over the box and exclusion of every other
/// critical point.
fn grow_bypass(
    q: &SparsePoly,
    dir: &DirectionRatio,
    saddles: &[CriticalPoint],
    idx: usize,
    outcome: &SaddleOutcome,
    prec: u32,
) -> Result<Option<BypassBox>> {
    let subclass = match outcome.class {
        SaddleClass::X => Subclass::X,
        SaddleClass::Y => Subclass::Y,
        _ => return Ok(None),
    };
    let f = Frame::new(q, dir, Chart::X);
    let center = &saddles[idx].point;
    let x0 = center.x.ball().clone();
    let y0 = center.y.ball().clone();
    let start = x0.rad.max(&y0.rad).max(&Rad::pow2(-(prec as i64) / 2));
    let mut best: Option<Dyadic> = None;
    for k in 2..40i64 {
        let rho = match start.mul_pow2(k).to_dyadic() {
            Some(d) => d,
            None => break,
        };
        let rad = Rad::from_dyadic_up(&rho);
        let bx = ComplexBall { re: x0.re.clone(), im: x0.im.clone(), rad: x0.rad.add(&rad) };
        let by = ComplexBall { re: y0.re.clone(), im: y0.im.clone(), rad: y0.rad.add(&rad) };
        let unique = tube(&f, &bx, &by, prec).is_some();
        if !unique {
            break;
        }
        let mut isolated = true;
        for (j, other) in saddles.iter().enumerate() {
            if j == idx {
                continue;
            }
            let dx = other.point.x.ball().sub(&bx, prec);
            let dy = other.point.y.ball().sub(&by, prec);
            let far_x = dx.abs_lower(prec).map_or(false, |lo| rho.lt(&lo));
            let far_y = dy.abs_lower(prec).map_or(false, |lo| rho.lt(&lo));
            if !(far_x || far_y) {
                isolated = false;
                break;
            }
        }
        if !isolated {
            break;
        }
        best = Some(rho);
    }
    Ok(best.map(|radius| BypassBox { x: x0, y: y0, radius, subclass }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algnum::AlgebraicNumber;
    use crate::exactpoly::uni_from_i64;

    fn poly(terms: &[(u32, u32, i64)]) -> SparsePoly {
        let mut p = SparsePoly::zero();
        for &(i, j, c) in terms {
            p.add_term(i, j, rat_int(c));
        }
        p
    }

    fn line() -> SparsePoly {
        poly(&[(0, 0, 1), (1, 0, -1), (0, 1, -1)])
    }

    fn delannoy() -> SparsePoly {
        poly(&[(0, 0, 1), (1, 0, -1), (0, 1, -1), (1, 1, -1)])
    }

    fn monkey_cubic() -> SparsePoly {
        poly(&[(0, 1, 1), (2, 0, -1), (1, 0, 3), (0, 0, -3)])
    }

    fn gq(re: Rational) -> GaussianRational {
        GaussianRational::from_rational(re)
    }

    fn point_x(x: Rational, y: f64) -> CurvePoint {
        let w = ComplexBall {
            re: Dyadic::from_rational_dir(&Rational::from_float(y).unwrap(), 64, false),
            im: Dyadic::zero(),
            rad: Rad::pow2(-20),
        };
        CurvePoint { chart: Chart::X, param: gq(x), other: w }
    }

    #[test]
    fn lift_along_the_line() {
        let dir = DirectionRatio::new(1, 1).unwrap();
        let from = point_x(rat(1, 10), 0.9);
        let out = lift_segment(&line(), &dir, &from, &gq(rat(2, 10)), 128).unwrap();
        let (re, im, rad) = out.other.to_f64s();
        assert!((re - 0.8).abs() < 1e-9 && im.abs() < 1e-9 && rad < 1e-9);
    }

    #[test]
    fn lift_along_delannoy_branch() {
        // y = (1-x)/(1+x): from x=0 (y=1) to x=1/10, y = 9/11.
        let dir = DirectionRatio::new(1, 1).unwrap();
        let from = point_x(rat(0, 1), 1.0);
        let out = lift_segment(&delannoy(), &dir, &from, &gq(rat(1, 10)), 128).unwrap();
        let (re, _, rad) = out.other.to_f64s();
        assert!((re - 9.0 / 11.0).abs() < 1e-9 && rad < 1e-9);
    }

    #[test]
    fn lift_refuses_branch_point_crossing() {
        // y^2 = x has a double point over x = 0; continuation across it
        // cannot certify.
        let q = poly(&[(0, 2, 1), (1, 0, -1)]);
        let dir = DirectionRatio::new(1, 1).unwrap();
        let from = point_x(rat(1, 1), 1.0);
        let err = lift_segment(&q, &dir, &from, &gq(rat(-1, 1)), 128).unwrap_err();
        assert!(matches!(err, Error::Continuation(_)));
    }

    #[test]
    fn ascent_gains_height_on_the_line() {
        let dir = DirectionRatio::new(1, 1).unwrap();
        let z = point_x(rat(1, 10), 0.9);
        let h0 = curve_height(&z, &dir, 128).unwrap();
        let (z1, gain) = ascend_step(&line(), &dir, &z, 128).unwrap();
        let h1 = curve_height(&z1, &dir, 128).unwrap();
        assert!(gain.lo().unwrap().signum() > 0);
        assert!(h0.to_f64() < h1.to_f64());
        // h = -(1/2) log(0.09) at the start.
        assert!((h0.to_f64() - 1.2039728).abs() < 1e-5);
    }

    #[test]
    fn ascent_gains_height_on_delannoy() {
        let dir = DirectionRatio::new(1, 1).unwrap();
        let z = point_x(rat(1, 10), 9.0 / 11.0);
        let (z1, gain) = ascend_step(&delannoy(), &dir, &z, 128).unwrap();
        assert!(gain.lo().unwrap().signum() > 0);
        let h0 = curve_height(&z, &dir, 128).unwrap().to_f64();
        let h1 = curve_height(&z1, &dir, 128).unwrap().to_f64();
        assert!(h1 > h0);
    }

    #[test]
    fn exits_of_the_binomial_saddle_straddle() {
        let dir = DirectionRatio::new(1, 1).unwrap();
        let saddles = critical_points(&line(), &dir, 128).unwrap();
        assert_eq!(saddles.len(), 1);
        let exits = saddle_exits(&line(), &dir, &saddles[0], 128).unwrap();
        assert_eq!(exits.len(), 2);
        let xs: Vec<f64> = exits.iter().map(|(z, _)| z.x_ball().to_f64s().0).collect();
        assert!(
            (xs[0] - 0.5) * (xs[1] - 0.5) < 0.0,
            "exits on one side: {:?}",
            xs
        );
        for (_, gain) in &exits {
            assert!(gain.lo().unwrap().signum() > 0);
        }
    }

    #[test]
    fn monkey_saddle_exits_three_ways() {
        let dir = DirectionRatio::new(1, 1).unwrap();
        let saddles = critical_points(&monkey_cubic(), &dir, 128).unwrap();
        let cp = saddles.iter().find(|c| c.order == 3).expect("an order-3 saddle");
        let exits = saddle_exits(&monkey_cubic(), &dir, cp, 128).unwrap();
        assert_eq!(exits.len(), 3);
        let angles: Vec<f64> = exits
            .iter()
            .map(|(z, _)| {
                let (re, im, _) = z.x_ball().to_f64s();
                f64::atan2(im, 1.0 - re)
            })
            .collect();
        for a in 0..3 {
            for b in (a + 1)..3 {
                let mut d = (angles[a] - angles[b]).abs();
                if d > std::f64::consts::PI {
                    d = std::f64::consts::TAU - d;
                }
                assert!(
                    (d - std::f64::consts::TAU / 3.0).abs() < 0.1,
                    "angles {:?}",
                    angles
                );
            }
        }
    }

    #[test]
    fn line_direction_one_one_classifies() {
        let dir = DirectionRatio::new(1, 1).unwrap();
        let out = classify_saddles(&line(), &dir, 128, 10_000).unwrap();
        assert_eq!(out.saddles.len(), 1);
        assert_eq!(out.xi, vec![0]);
        assert_eq!(out.saddles[0].class, SaddleClass::Mixed);
        let c = out.c_star.as_ref().unwrap();
        assert!((c.to_f64() - std::f64::consts::LN_2).abs() < 1e-12);
        let cyc = &out.saddles[0].cycle;
        assert_eq!(cyc.len(), 2);
        assert!(cyc == &vec![1, -1] || cyc == &vec![-1, 1]);
        assert!(out.total_steps < 10_000);
    }

    #[test]
    fn line_direction_two_one_classifies() {
        let dir = DirectionRatio::new(2, 1).unwrap();
        let out = classify_saddles(&line(), &dir, 128, 10_000).unwrap();
        assert_eq!(out.xi.len(), 1);
        let cp = &out.saddles[out.xi[0]].critical;
        let mut x = cp.point.x.clone();
        let mut y = cp.point.y.clone();
        assert!(x.equals(&mut AlgebraicNumber::from_rational(&rat(2, 3))).unwrap());
        assert!(y.equals(&mut AlgebraicNumber::from_rational(&rat(1, 3))).unwrap());
    }

    #[test]
    fn delannoy_keeps_lower_saddle_unclassified() {
        let dir = DirectionRatio::new(1, 1).unwrap();
        let out = classify_saddles(&delannoy(), &dir, 128, 10_000).unwrap();
        assert_eq!(out.saddles.len(), 2);
        assert_eq!(out.xi.len(), 1);
        let hi = &out.saddles[out.xi[0]];
        assert_eq!(hi.class, SaddleClass::Mixed);
        assert_eq!(hi.critical.level, 0);
        // sqrt(2) - 1 in both coordinates.
        let mut x = hi.critical.point.x.clone();
        let gp = GaussPoly::from_uni(&uni_from_i64(&[-1, 2, 1]));
        let seed = ComplexBall {
            re: Dyadic::from_rational_dir(&rat(4142, 10000), 24, false),
            im: Dyadic::zero(),
            rad: Rad::pow2(-8),
        };
        let mut target = AlgebraicNumber::new(&gp, &seed, 128).unwrap();
        assert!(x.equals(&mut target).unwrap());
        let c = out.c_star.as_ref().unwrap();
        assert!((c.to_f64() - (1.0 + 2f64.sqrt()).ln()).abs() < 1e-12);
        let lower: Vec<_> =
            out.saddles.iter().filter(|s| s.critical.level == 1).collect();
        assert_eq!(lower.len(), 1);
        assert_eq!(lower[0].class, SaddleClass::Unclassified);
    }

    #[test]
    fn doubled_precision_repeats_the_answer() {
        let dir = DirectionRatio::new(1, 1).unwrap();
        let lo = classify_saddles(&delannoy(), &dir, 96, 10_000).unwrap();
        let hi = classify_saddles(&delannoy(), &dir, 192, 10_000).unwrap();
        assert_eq!(lo.xi, hi.xi);
        let classes_lo: Vec<_> = lo.saddles.iter().map(|s| s.class).collect();
        let classes_hi: Vec<_> = hi.saddles.iter().map(|s| s.class).collect();
        assert_eq!(classes_lo, classes_hi);
        assert_eq!(lo.saddles[lo.xi[0]].cycle, hi.saddles[hi.xi[0]].cycle);
        let r_lo = lo.c_star.unwrap().rad.to_f64();
        let r_hi = hi.c_star.unwrap().rad.to_f64();
        assert!(r_hi < r_lo, "radii {} vs {}", r_lo, r_hi);
    }
}
