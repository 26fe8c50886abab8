//! Saddle-point constants and the leading coefficient estimate.
//!
//! At a contributing nondegenerate saddle (x0, y0) the local Fourier-Laplace
//! integral collapses to a Gaussian, and the coefficients inherit one term
//!
//! ```text
//! a_{r,s} ~ sum over saddles of  A / sqrt(u'') * x0^(-r) y0^(-s)
//!                                  / sqrt(2 pi (r+s)),
//!
//! A   = -P(x0,y0) / (y0 Q_y(x0,y0)),
//! u'' = s^ x0 psi(x0,y0) / (y0^2 Q_y(x0,y0)^3),
//! ```
//!
//! where psi is the curvature combination from the geometry module and the
//! principal square root fixes the one unit-modulus factor the saddle-point
//! method leaves free: a lone real positive saddle with positive P yields a
//! real positive estimate, and conjugate saddles receive conjugate branches,
//! keeping the total real for real data.  The constant magnitude
//! |P| sqrt(|((r+s)/s) (-Q_y)/(x psi)|) is also carried with an exact
//! algebraic radicand, so that equal saddle contributions can be recognized
//! exactly rather than numerically.
//!
//! The direction decomposition chops (0, oo) at the finitely many escape
//! slopes and degenerate-saddle slopes; on each remaining open interval one
//! rational representative is analyzed in full, and the qualitative outcome
//! (which saddles contribute, their classes and cycles) holds uniformly on
//! compact subintervals.

use num_traits::{Signed, ToPrimitive, Zero};

use crate::algnum::{AlgebraicNumber, AlgebraicPoint, GaussPoly, ZeroDimSystem};
use crate::ball::{eval_poly_ball, pi_ball, sqrt_principal, ComplexBall, RealBall};
use crate::error::{Error, Result};
use crate::exactpoly::{
    rat_int, simplest_rational_between, Rad, Rational, SparsePoly, Var,
};
use crate::geometry::{
    bad_directions, check_assumptions, monkey_directions, mu_poly, psi_poly, DirectionRatio,
};
use crate::morse::{classify_saddles, FlowOutcome, DEFAULT_STEP_CAP};

/// One saddle's contribution to the leading estimate.
#[derive(Debug)]
pub struct AsymptoticTerm {
    /// Index into the flow outcome's saddle table.
    pub saddle_index: usize,
    pub x0: ComplexBall,
    pub y0: ComplexBall,
    /// The full complex factor A / sqrt(u'') multiplying the growth.
    pub amplitude: ComplexBall,
    /// Certified |K|: the magnitude of the saddle constant.
    pub constant_magnitude: RealBall,
    /// amplitude / |amplitude|, for reporting.
    pub resolved_phase: ComplexBall,
    /// Exact radicand ((r+s)/s) (-Q_y)/(x psi) at the saddle.
    pub radicand: AlgebraicNumber,
    /// Power of (r+s) in the subexponential factor; -1/2 at order 2.
    pub polynomial_order: Rational,
}

/// Everything one direction's analysis produces.
#[derive(Debug)]
pub struct AsymptoticReport {
    pub direction: DirectionRatio,
    pub flow: FlowOutcome,
    pub terms: Vec<AsymptoticTerm>,
    pub caveats: Vec<String>,
}

/// Certified magnitude of the saddle constant together with its exact
/// radicand.  The branch of the square root is deliberately not chosen
/// here; only the magnitude is determined by the saddle data alone.
pub fn saddle_constant(
    p: &SparsePoly,
    q: &SparsePoly,
    sigma: &mut AlgebraicPoint,
    dir: &DirectionRatio,
    prec: u32,
) -> Result<(RealBall, AlgebraicNumber)> {
    let mu = mu_poly(q, dir);
    let mut sys = ZeroDimSystem::new(q, &mu, prec)?;
    let mut found = None;
    for i in 0..sys.len() {
        if sys.point_mut(i).equals(sigma)? {
            found = Some(i);
            break;
        }
    }
    let idx = found.ok_or_else(|| {
        Error::Internal("the given point does not solve the critical equations".into())
    })?;
    if sys.value_is_zero(idx, p, prec)? {
        return Err(Error::VanishingNumerator);
    }
    let psi = psi_poly(q);
    if sys.value_is_zero(idx, &psi, prec)? {
        return Err(Error::Internal(
            "curvature factor vanishes at a saddle reported as nondegenerate".into(),
        ));
    }
    let qy = q.derivative(Var::Y);
    let total = rat_int(dir.total() as i64);
    let s_rat = dir.s_rational();
    // radicand = ((r+s) (-Q_y)) / (s x psi).
    let num = qy.scale(&-total);
    let den = psi.mul_var(Var::X).scale(&s_rat);
    let ann = sys.ratio_annihilator(&num, &den)?;
    let gp = GaussPoly::from_uni(&ann);
    let mut radicand = sys.ratio_value(idx, &num, &den, &gp, prec)?;
    let target = Rad::pow2(-(prec as i64));
    radicand.refine_to(&target)?;
    sigma.x.refine_to(&target)?;
    sigma.y.refine_to(&target)?;
    let p_ball = eval_poly_ball(p, sigma.x.ball(), sigma.y.ball(), prec);
    let p_abs = p_ball.abs_ball(prec)?;
    let rad_abs = radicand.ball().abs_ball(prec)?;
    let magnitude = p_abs.mul(&rad_abs.sqrt(prec)?, prec);
    Ok((magnitude, radicand))
}

fn term_for_saddle(
    p: &SparsePoly,
    q: &SparsePoly,
    dir: &DirectionRatio,
    flow: &mut FlowOutcome,
    idx: usize,
    prec: u32,
) -> Result<AsymptoticTerm> {
    let point = &mut flow.saddles[idx].critical.point;
    let (magnitude, radicand) = saddle_constant(p, q, point, dir, prec)?;
    let x0 = point.x.ball().clone();
    let y0 = point.y.ball().clone();
    let qy_v = eval_poly_ball(&q.derivative(Var::Y), &x0, &y0, prec);
    let p_v = eval_poly_ball(p, &x0, &y0, prec);
    let psi_v = eval_poly_ball(&psi_poly(q), &x0, &y0, prec);
    let amp_a = p_v.neg().div(&y0.mul(&qy_v, prec), prec)?;
    let u2_num = psi_v.mul(&x0, prec).scale_rational(&dir.s_hat(), prec);
    let u2_den = y0.square(prec).mul(&qy_v.pow_i64(3, prec)?, prec);
    let u2 = u2_num.div(&u2_den, prec)?;
    let amplitude = amp_a.div(&sqrt_principal(&u2, prec)?, prec)?;
    let amp_abs = amplitude.abs_ball(prec)?;
    let phase = amplitude.div(&ComplexBall::from_real(&amp_abs), prec)?;
    Ok(AsymptoticTerm {
        saddle_index: idx,
        x0,
        y0,
        amplitude,
        constant_magnitude: magnitude,
        resolved_phase: phase,
        radicand,
        polynomial_order: Rational::new((-1).into(), 2.into()),
    })
}

/// Classify the saddles of one direction and assemble its leading terms.
pub fn analyze_direction(
    p: &SparsePoly,
    q: &SparsePoly,
    dir: &DirectionRatio,
    prec: u32,
    max_steps: u64,
) -> Result<AsymptoticReport> {
    check_assumptions(q)?;
    let mut flow = classify_saddles(q, dir, prec, max_steps)?;
    let mut caveats = vec![];
    let mut terms = vec![];
    if flow.xi.is_empty() {
        caveats.push("no contributing saddle was identified".into());
    }
    let degenerate: Vec<usize> = flow
        .xi
        .iter()
        .copied()
        .filter(|&i| flow.saddles[i].critical.order > 2)
        .collect();
    if degenerate.is_empty() {
        for idx in flow.xi.clone() {
            terms.push(term_for_saddle(p, q, dir, &mut flow, idx, prec)?);
        }
    } else {
        for i in degenerate {
            caveats.push(format!(
                "contributing saddle of order {}: leading constant not computed",
                flow.saddles[i].critical.order
            ));
        }
    }
    Ok(AsymptoticReport { direction: dir.clone(), flow, terms, caveats })
}

/// Numeric leading-order estimate of a_{r,s} for (r, s) proportional to
/// the analyzed direction, as a certified complex enclosure.
pub fn leading_estimate(
    report: &AsymptoticReport,
    r: u64,
    s: u64,
    prec: u32,
) -> Result<ComplexBall> {
    let d = &report.direction;
    if r == 0 || s == 0 || (r as u128) * (d.s() as u128) != (s as u128) * (d.r() as u128) {
        return Err(Error::Internal(format!(
            "({}, {}) is not a positive multiple of the direction {}",
            r, s, d
        )));
    }
    if report.terms.is_empty() {
        return Err(Error::BadDirection {
            r: d.r(),
            s: d.s(),
            reason: "no leading constant is available (degenerate or empty contributing set)"
                .into(),
        });
    }
    let two_pi_n = pi_ball(prec).scale_rational(&rat_int(2 * (r + s) as i64), prec);
    let root = ComplexBall::from_real(&two_pi_n.sqrt(prec)?);
    let mut sum = ComplexBall::zero();
    for t in &report.terms {
        let gx = t.x0.pow_i64(-(r as i64), prec)?;
        let gy = t.y0.pow_i64(-(s as i64), prec)?;
        let contrib = t.amplitude.mul(&gx, prec).mul(&gy, prec).div(&root, prec)?;
        sum = sum.add(&contrib, prec);
    }
    Ok(sum)
}

// ---------------------------------------------------------------------------
// Direction decomposition
// ---------------------------------------------------------------------------

/// A boundary of a uniformity interval.
#[derive(Debug)]
pub enum IntervalEndpoint {
    Zero,
    Infinity,
    Rational(Rational),
    Algebraic(AlgebraicNumber),
}

impl IntervalEndpoint {
    pub fn to_f64(&self) -> f64 {
        match self {
            IntervalEndpoint::Zero => 0.0,
            IntervalEndpoint::Infinity => f64::INFINITY,
            IntervalEndpoint::Rational(q) => q.to_f64().unwrap_or(f64::NAN),
            IntervalEndpoint::Algebraic(a) => a.ball().to_f64s().0,
        }
    }
}

impl std::fmt::Display for IntervalEndpoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            IntervalEndpoint::Zero => write!(f, "0"),
            IntervalEndpoint::Infinity => write!(f, "oo"),
            IntervalEndpoint::Rational(q) => write!(f, "{}", q),
            IntervalEndpoint::Algebraic(a) => {
                let (re, _, _) = a.ball().to_f64s();
                write!(f, "alg({:.6})", re)
            }
        }
    }
}

/// One interval of the partition of (0, oo) minus the degenerate slopes,
/// with its fully analyzed representative direction.
#[derive(Debug)]
pub struct DirectionInterval {
    pub lo: IntervalEndpoint,
    pub hi: IntervalEndpoint,
    pub representative: DirectionRatio,
    pub report: Result<AsymptoticReport>,
}

enum Breakpoint {
    Rat(Rational),
    Alg(AlgebraicNumber),
}

impl Breakpoint {
    /// Certified rational bounds [lo, hi] around the value, shrunk on
    /// demand by `round` refinement rounds.
    fn bounds(&mut self, round: i64) -> Result<(Rational, Rational)> {
        match self {
            Breakpoint::Rat(q) => Ok((q.clone(), q.clone())),
            Breakpoint::Alg(a) => {
                a.refine_to(&Rad::pow2(-32 - 16 * round))?;
                let b = a.ball().re_ball();
                let lo = b
                    .lo()
                    .ok_or_else(|| Error::Internal("unbounded breakpoint enclosure".into()))?;
                let hi = b
                    .hi()
                    .ok_or_else(|| Error::Internal("unbounded breakpoint enclosure".into()))?;
                Ok((lo.to_rational(), hi.to_rational()))
            }
        }
    }
}

/// Rational strictly between two consecutive breakpoints.
fn rational_between(left: &mut Breakpoint, right: &mut Breakpoint) -> Result<Rational> {
    for round in 0..24 {
        let (_, l_hi) = left.bounds(round)?;
        let (r_lo, _) = right.bounds(round)?;
        if l_hi < r_lo {
            return Ok(simplest_rational_between(&l_hi, &r_lo));
        }
    }
    Err(Error::PrecisionExhausted {
        reached: 0,
        context: "two direction breakpoints would not separate".into(),
    })
}

fn ratio_to_direction(lambda: &Rational) -> Result<DirectionRatio> {
    let r = lambda.numer().to_u64().ok_or_else(|| {
        Error::Internal("representative direction does not fit in a machine word".into())
    })?;
    let s = lambda.denom().to_u64().ok_or_else(|| {
        Error::Internal("representative direction does not fit in a machine word".into())
    })?;
    DirectionRatio::new(r, s)
}

/// Partition (0, oo) at the escape slopes and the degenerate-saddle slopes
/// and analyze one representative direction per interval.
pub fn decompose_directions(
    p: &SparsePoly,
    q: &SparsePoly,
    prec: u32,
    max_steps: u64,
) -> Result<Vec<DirectionInterval>> {
    check_assumptions(q)?;
    let bad = bad_directions(q);
    let monkey = monkey_directions(q, prec)?;

    // Merge the sorted rational and sorted algebraic breakpoints, dropping
    // algebraic ones that coincide with a rational.
    let mut brks: Vec<Breakpoint> = vec![];
    let mut monkey_iter = monkey.into_iter().peekable();
    for b in &bad {
        loop {
            let Some(m) = monkey_iter.peek_mut() else { break };
            if m.equals(&mut AlgebraicNumber::from_rational(b))? {
                monkey_iter.next();
                continue;
            }
            if alg_below_rational(m, b)? {
                brks.push(Breakpoint::Alg(monkey_iter.next().unwrap()));
            } else {
                break;
            }
        }
        brks.push(Breakpoint::Rat(b.clone()));
    }
    brks.extend(monkey_iter.map(Breakpoint::Alg));

    let mut out = vec![];
    if brks.is_empty() {
        let dir = DirectionRatio::new(1, 1)?;
        let report = analyze_direction(p, q, &dir, prec, max_steps);
        out.push(DirectionInterval {
            lo: IntervalEndpoint::Zero,
            hi: IntervalEndpoint::Infinity,
            representative: dir,
            report,
        });
        return Ok(out);
    }

    let n = brks.len();
    for i in 0..=n {
        let lambda = if i == 0 {
            let (r_lo, _) = first_positive_bound(&mut brks[0])?;
            simplest_rational_between(&Rational::zero(), &r_lo)
        } else if i == n {
            let (_, l_hi) = brks[n - 1].bounds(2)?;
            (l_hi.floor() + rat_int(1)).to_integer().into()
        } else {
            let (a, b) = brks.split_at_mut(i);
            rational_between(&mut a[i - 1], &mut b[0])?
        };
        let dir = ratio_to_direction(&lambda)?;
        let report = analyze_direction(p, q, &dir, prec, max_steps);
        let lo = if i == 0 { IntervalEndpoint::Zero } else { endpoint_of(&brks[i - 1]) };
        let hi = if i == n { IntervalEndpoint::Infinity } else { endpoint_of(&brks[i]) };
        out.push(DirectionInterval { lo, hi, representative: dir, report });
    }
    Ok(out)
}

fn endpoint_of(b: &Breakpoint) -> IntervalEndpoint {
    match b {
        Breakpoint::Rat(q) => IntervalEndpoint::Rational(q.clone()),
        Breakpoint::Alg(a) => IntervalEndpoint::Algebraic(a.clone()),
    }
}

fn first_positive_bound(b: &mut Breakpoint) -> Result<(Rational, Rational)> {
    for round in 0..24 {
        let (lo, hi) = b.bounds(round)?;
        if lo.is_positive() {
            return Ok((lo, hi));
        }
    }
    Err(Error::Internal("a direction breakpoint would not separate from zero".into()))
}

/// Certified "m < b" for a real algebraic m and a rational b, assuming
/// they are distinct.
fn alg_below_rational(m: &mut AlgebraicNumber, b: &Rational) -> Result<bool> {
    for round in 0..48 {
        let ball = m.ball().re_ball();
        if let (Some(lo), Some(hi)) = (ball.lo(), ball.hi()) {
            if &hi.to_rational() < b {
                return Ok(true);
            }
            if &lo.to_rational() > b {
                return Ok(false);
            }
        }
        m.refine_to(&Rad::pow2(-32 - 16 * round))?;
    }
    Err(Error::PrecisionExhausted {
        reached: 0,
        context: "breakpoint comparison stalled".into(),
    })
}

/// Convenience: one full analysis plus its estimate at a given multiple.
pub fn estimate_at(
    p: &SparsePoly,
    q: &SparsePoly,
    r: u64,
    s: u64,
    prec: u32,
) -> Result<ComplexBall> {
    let g = gcd_u64(r, s);
    let dir = DirectionRatio::new(r / g, s / g)?;
    let report = analyze_direction(p, q, &dir, prec, DEFAULT_STEP_CAP)?;
    leading_estimate(&report, r, s, prec)
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::rat;
    use crate::oracle::{rational_to_f64, CoefficientTable};

    fn poly(terms: &[(u32, u32, i64)]) -> SparsePoly {
        let mut p = SparsePoly::zero();
        for &(i, j, c) in terms {
            p.add_term(i, j, rat_int(c));
        }
        p
    }

    fn one() -> SparsePoly {
        SparsePoly::one()
    }

    fn line() -> SparsePoly {
        poly(&[(0, 0, 1), (1, 0, -1), (0, 1, -1)])
    }

    fn delannoy() -> SparsePoly {
        poly(&[(0, 0, 1), (1, 0, -1), (0, 1, -1), (1, 1, -1)])
    }

    fn census_example() -> SparsePoly {
        poly(&[(0, 0, 1), (0, 1, -3), (0, 2, 2), (1, 4, -6), (3, 5, 1)])
    }

    #[test]
    fn binomial_constant_magnitude_and_radicand() {
        let dir = DirectionRatio::new(1, 1).unwrap();
        let mut report =
            analyze_direction(&one(), &line(), &dir, 128, DEFAULT_STEP_CAP).unwrap();
        assert_eq!(report.terms.len(), 1);
        let term = &mut report.terms[0];
        // |K| = 2 and the radicand is exactly -4.
        assert!(term.constant_magnitude.contains_rational(&rat(2, 1)));
        assert!(term.constant_magnitude.rad.to_f64() < 1e-20);
        let mut minus_four = AlgebraicNumber::from_rational(&rat(-4, 1));
        assert!(term.radicand.equals(&mut minus_four).unwrap());
    }

    #[test]
    fn vanishing_numerator_is_rejected() {
        // P = 1 - 2x vanishes at the saddle (1/2, 1/2).
        let p = poly(&[(0, 0, 1), (1, 0, -2)]);
        let dir = DirectionRatio::new(1, 1).unwrap();
        let err = analyze_direction(&p, &line(), &dir, 128, DEFAULT_STEP_CAP).unwrap_err();
        assert!(matches!(err, Error::VanishingNumerator));
    }

    #[test]
    fn central_binomial_estimate_at_fifty() {
        let est = estimate_at(&one(), &line(), 50, 50, 128).unwrap();
        let (re, im, _) = est.to_f64s();
        assert!(im.abs() < 1e-10 * re.abs());
        // 4^50 / sqrt(50 pi) ~ 1.0115e29 against C(100,50) ~ 1.0089e29.
        assert!((re / 1.0115e29 - 1.0).abs() < 1e-3);
        let table = CoefficientTable::new(&one(), &line(), 50, 50).unwrap();
        let exact = rational_to_f64(table.coefficient(50, 50).unwrap());
        let ratio = exact / re;
        assert!((ratio - 0.9975).abs() < 5e-4, "ratio {}", ratio);
    }

    #[test]
    fn binomial_error_follows_the_inverse_n_law() {
        // |exact/estimate - 1| ~ 1/(8n).
        let dir = DirectionRatio::new(1, 1).unwrap();
        let report = analyze_direction(&one(), &line(), &dir, 128, DEFAULT_STEP_CAP).unwrap();
        for n in [25u64, 50, 100] {
            let est = leading_estimate(&report, n, n, 128).unwrap();
            let table = CoefficientTable::new(&one(), &line(), n as u32, n as u32).unwrap();
            let exact = rational_to_f64(table.coefficient(n as u32, n as u32).unwrap());
            let err = (exact / est.to_f64s().0 - 1.0).abs();
            let expected = 1.0 / (8.0 * n as f64);
            assert!(
                (err / expected - 1.0).abs() < 0.15,
                "n={} err={} expected={}",
                n,
                err,
                expected
            );
        }
    }

    #[test]
    fn delannoy_estimate_within_one_percent() {
        let est = estimate_at(&one(), &delannoy(), 200, 200, 192).unwrap();
        let table = CoefficientTable::new(&one(), &delannoy(), 200, 200).unwrap();
        let exact = rational_to_f64(table.coefficient(200, 200).unwrap());
        let ratio = exact / est.to_f64s().0;
        assert!((ratio - 1.0).abs() < 0.01, "ratio {}", ratio);
    }

    #[test]
    fn off_diagonal_direction_two_one() {
        // Saddle (2/3, 1/3): a_{2n,n} ~ 27^n/4^n-ish growth, checked by
        // the oracle ratio rather than a closed form.
        let est = estimate_at(&one(), &line(), 100, 50, 128).unwrap();
        let table = CoefficientTable::new(&one(), &line(), 100, 50).unwrap();
        let exact = rational_to_f64(table.coefficient(100, 50).unwrap());
        let ratio = exact / est.to_f64s().0;
        assert!((ratio - 1.0).abs() < 0.5 / 50.0, "ratio {}", ratio);
    }

    #[test]
    fn line_decomposition_is_one_interval() {
        let parts = decompose_directions(&one(), &line(), 128, DEFAULT_STEP_CAP).unwrap();
        assert_eq!(parts.len(), 1);
        assert!(matches!(parts[0].lo, IntervalEndpoint::Zero));
        assert!(matches!(parts[0].hi, IntervalEndpoint::Infinity));
        assert_eq!(parts[0].representative.ratio(), rat(1, 1));
        let rep = parts[0].report.as_ref().unwrap();
        assert_eq!(rep.terms.len(), 1);
    }

    #[test]
    fn census_decomposition_breakpoints() {
        let parts = decompose_directions(&one(), &census_example(), 160, DEFAULT_STEP_CAP)
            .unwrap();
        // Breakpoints contain exactly the escape slopes 1/2 and 2 among
        // rationals; algebraic monkey slopes refine further.
        let rational_breaks: Vec<Rational> = parts
            .iter()
            .filter_map(|p| match &p.lo {
                IntervalEndpoint::Rational(q) => Some(q.clone()),
                _ => None,
            })
            .collect();
        assert_eq!(rational_breaks, vec![rat(1, 2), rat(2, 1)]);
        assert!(parts.len() >= 3);
        // Partition: consecutive intervals share the breakpoint, outer
        // endpoints are 0 and infinity, values strictly increase.
        assert!(matches!(parts[0].lo, IntervalEndpoint::Zero));
        assert!(matches!(parts.last().unwrap().hi, IntervalEndpoint::Infinity));
        let mut last = 0.0f64;
        for p in &parts {
            let lo = p.lo.to_f64();
            let hi = p.hi.to_f64();
            assert!(lo >= last || (last == 0.0 && lo == 0.0));
            assert!(lo < hi);
            let lam = p.representative.ratio().to_f64().unwrap();
            assert!(lam > lo && lam < hi, "rep {} outside ({}, {})", lam, lo, hi);
            last = hi;
        }
    }

    #[test]
    #[ignore]
    fn census_probe() {
        use std::time::Instant;
        let q = census_example();
        let t0 = Instant::now();
        let bad = bad_directions(&q);
        eprintln!("bad {:?} in {:?}", bad.len(), t0.elapsed());
        let t0 = Instant::now();
        let psi = psi_poly(&q);
        eprintln!(
            "psi terms {} degx {} degy {} in {:?}",
            psi.num_terms(),
            psi.deg_x(),
            psi.deg_y(),
            t0.elapsed()
        );
        let t0 = Instant::now();
        let sys = ZeroDimSystem::new(&q, &psi, 160).unwrap();
        eprintln!(
            "system {} pts, xelim deg {}, in {:?}",
            sys.len(),
            sys.x_eliminant().len() - 1,
            t0.elapsed()
        );
        let t0 = Instant::now();
        let monkey = monkey_directions(&q, 160).unwrap();
        eprintln!("monkey {} in {:?}", monkey.len(), t0.elapsed());
        for m in &monkey {
            eprintln!("  root ~ {:?}", m.ball().to_f64s());
        }
        let reps = [rat(1, 3), rat(1, 1), rat(3, 1)];
        for lam in reps {
            let dir = ratio_to_direction(&lam).unwrap();
            let t0 = Instant::now();
            let flow = crate::morse::classify_saddles(&q, &dir, 160, 20_000);
            match &flow {
                Ok(f) => eprintln!(
                    "dir {} -> {} saddles, xi {:?}, steps {} in {:?}",
                    dir,
                    f.saddles.len(),
                    f.xi,
                    f.total_steps,
                    t0.elapsed()
                ),
                Err(e) => eprintln!("dir {} -> error {} in {:?}", dir, e, t0.elapsed()),
            }
        }
    }

    #[test]
    fn estimate_enclosure_contains_zero_imaginary() {
        let dir = DirectionRatio::new(1, 1).unwrap();
        let report = analyze_direction(&one(), &delannoy(), &dir, 128, DEFAULT_STEP_CAP).unwrap();
        let est = leading_estimate(&report, 30, 30, 128).unwrap();
        assert!(!est.im_ball().certainly_positive());
        assert!(!est.im_ball().certainly_negative());
        assert!(est.re_ball().certainly_positive());
    }

    #[test]
    fn amplitude_magnitude_matches_saddle_constant() {
        // |A / sqrt(u'')| and |K| are the same number through two
        // different formulas; their enclosures must overlap.
        let dir = DirectionRatio::new(1, 1).unwrap();
        let report = analyze_direction(&one(), &delannoy(), &dir, 128, DEFAULT_STEP_CAP).unwrap();
        let t = &report.terms[0];
        let amp = t.amplitude.abs_ball(128).unwrap();
        let k = &t.constant_magnitude;
        let lo = amp.lo().unwrap().max_val(&k.lo().unwrap());
        let hi = amp.hi().unwrap().min_val(&k.hi().unwrap());
        assert!(lo.le(&hi), "disjoint magnitude enclosures");
        assert!(amp.rad.to_f64() < 1e-20);
    }
}
