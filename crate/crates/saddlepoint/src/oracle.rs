//! Exact power-series coefficients of F = P/Q with Q(0,0) != 0.
//!
//! Matching coefficients of x^r y^s in the identity Q F = P gives
//!
//! ```text
//! q_00 a_{r,s} = p_{r,s} - sum over (i,j) in supp Q, (i,j) != (0,0),
//!                of q_{ij} a_{r-i,s-j},
//! ```
//!
//! which fills a rectangle of coefficients in O(cells * |supp Q|) exact
//! rational operations.  The table is the ground truth against which the
//! saddle-point estimates are scored: asymptotics may be subtle, but a
//! convolution recurrence over exact rationals has no failure modes worth
//! doubting.

use num_traits::Zero;

use crate::ball::ComplexBall;
use crate::error::{Assumption, Error, Result};
use crate::exactpoly::{Rational, SparsePoly};

/// Guardrail on table size, in cells.
pub const CELL_CAP: u64 = 400_000;

/// A rectangle of exact series coefficients a_{r,s} for 0 <= r <= rmax,
/// 0 <= s <= smax, stored row-major.
pub struct CoefficientTable {
    rmax: u32,
    smax: u32,
    cells: Vec<Rational>,
}

impl CoefficientTable {
    /// Expand P/Q on the rectangle [0, rmax] x [0, smax] by the
    /// convolution recurrence.
    pub fn new(p: &SparsePoly, q: &SparsePoly, rmax: u32, smax: u32) -> Result<Self> {
        let q00 = q.coeff(0, 0);
        if q00.is_zero() {
            return Err(Error::AssumptionViolated(Assumption::DenominatorNonzeroAtOrigin));
        }
        let cols = smax as u64 + 1;
        let cells_needed = (rmax as u64 + 1) * cols;
        if cells_needed > CELL_CAP {
            return Err(Error::OracleCap { cap: CELL_CAP, requested: cells_needed });
        }
        let support: Vec<((u32, u32), Rational)> = q
            .terms()
            .filter(|(&(i, j), _)| (i, j) != (0, 0))
            .map(|(&ij, c)| (ij, c.clone()))
            .collect();
        let mut cells = vec![Rational::zero(); cells_needed as usize];
        for r in 0..=rmax {
            for s in 0..=smax {
                let mut acc = p.coeff(r, s);
                for ((i, j), c) in &support {
                    if *i <= r && *j <= s {
                        let prev = &cells[((r - i) as u64 * cols + (s - j) as u64) as usize];
                        acc -= c * prev;
                    }
                }
                cells[(r as u64 * cols + s as u64) as usize] = acc / &q00;
            }
        }
        Ok(CoefficientTable { rmax, smax, cells })
    }

    pub fn rmax(&self) -> u32 {
        self.rmax
    }

    pub fn smax(&self) -> u32 {
        self.smax
    }

    pub fn coefficient(&self, r: u32, s: u32) -> Option<&Rational> {
        if r > self.rmax || s > self.smax {
            return None;
        }
        Some(&self.cells[(r as u64 * (self.smax as u64 + 1) + s as u64) as usize])
    }
}

/// One row of a ratio diagnostic: the exact coefficient at (n*r, n*s)
/// against an estimate, with the deviation |a/est - 1|.  Entries where the
/// exact coefficient is zero or the estimate's enclosure contains zero are
/// flagged and carry no ratio.
#[derive(Debug)]
pub struct RatioEntry {
    pub n: u32,
    pub exact: Rational,
    pub estimate: ComplexBall,
    pub ratio: Option<f64>,
    pub deviation: Option<f64>,
    pub flagged: bool,
}

/// Score an estimate function against the exact table along the ray
/// (n*r, n*s) for the requested scales n.
pub fn ratio_diagnostic<F>(
    table: &CoefficientTable,
    mut estimate: F,
    r: u32,
    s: u32,
    scales: &[u32],
) -> Result<Vec<RatioEntry>>
where
    F: FnMut(u32, u32) -> Result<ComplexBall>,
{
    let mut out = vec![];
    for &n in scales {
        let (rr, ss) = (n * r, n * s);
        let exact = table
            .coefficient(rr, ss)
            .ok_or(Error::OracleCap {
                cap: (table.rmax as u64 + 1) * (table.smax as u64 + 1),
                requested: (rr as u64 + 1) * (ss as u64 + 1),
            })?
            .clone();
        let est = estimate(rr, ss)?;
        let (re, _im, _rad) = est.to_f64s();
        let usable = !exact.is_zero() && est.excludes_zero(64);
        let (ratio, deviation) = if usable {
            let a = rational_to_f64(&exact);
            let rt = a / re;
            (Some(rt), Some((rt - 1.0).abs()))
        } else {
            (None, None)
        };
        out.push(RatioEntry { n, exact, estimate: est, ratio, deviation, flagged: !usable });
    }
    Ok(out)
}

/// Lossy conversion for report display; exactness lives in the Rational.
pub fn rational_to_f64(q: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::{rat, rat_int};

    fn poly(terms: &[(u32, u32, i64)]) -> SparsePoly {
        let mut p = SparsePoly::zero();
        for &(i, j, c) in terms {
            p.add_term(i, j, rat_int(c));
        }
        p
    }

    fn binomial(n: u64, k: u64) -> Rational {
        let mut acc = Rational::from_integer(1.into());
        for i in 0..k {
            acc *= Rational::from_integer(((n - i) as i64).into());
            acc /= Rational::from_integer(((i + 1) as i64).into());
        }
        acc
    }

    #[test]
    fn pascal_rectangle() {
        let p = poly(&[(0, 0, 1)]);
        let q = poly(&[(0, 0, 1), (1, 0, -1), (0, 1, -1)]);
        let t = CoefficientTable::new(&p, &q, 8, 8).unwrap();
        assert_eq!(*t.coefficient(2, 3).unwrap(), rat_int(10));
        for r in 0..=8u32 {
            for s in 0..=8u32 {
                assert_eq!(
                    *t.coefficient(r, s).unwrap(),
                    binomial((r + s) as u64, r as u64),
                    "binomial mismatch at ({}, {})",
                    r,
                    s
                );
            }
        }
    }

    #[test]
    fn central_delannoy_values() {
        let p = poly(&[(0, 0, 1)]);
        let q = poly(&[(0, 0, 1), (1, 0, -1), (0, 1, -1), (1, 1, -1)]);
        let t = CoefficientTable::new(&p, &q, 6, 6).unwrap();
        for (n, want) in [(0, 1i64), (1, 3), (2, 13), (3, 63), (4, 321), (5, 1683)] {
            assert_eq!(*t.coefficient(n, n).unwrap(), rat_int(want));
        }
        assert_eq!(*t.coefficient(1, 2).unwrap(), rat_int(5));
    }

    #[test]
    fn numerator_shifts_support() {
        // x/(1-x-y): first row vanishes.
        let p = poly(&[(1, 0, 1)]);
        let q = poly(&[(0, 0, 1), (1, 0, -1), (0, 1, -1)]);
        let t = CoefficientTable::new(&p, &q, 5, 5).unwrap();
        for s in 0..=5u32 {
            assert!(t.coefficient(0, s).unwrap().is_zero());
        }
        assert_eq!(*t.coefficient(2, 2).unwrap(), binomial(3, 1));
    }

    #[test]
    fn convolution_identity_holds() {
        // Independent check: Q * (computed table) must reproduce P exactly
        // on the full rectangle, for an awkward Q with q00 = 2.
        let p = poly(&[(0, 0, 3), (1, 1, -1), (2, 0, 5)]);
        let q = poly(&[(0, 0, 2), (1, 0, 1), (0, 1, -3), (2, 1, 1), (1, 2, 7)]);
        let t = CoefficientTable::new(&p, &q, 9, 9).unwrap();
        for r in 0..=9u32 {
            for s in 0..=9u32 {
                let mut acc = Rational::zero();
                for (&(i, j), c) in q.terms() {
                    if i <= r && j <= s {
                        acc += c * t.coefficient(r - i, s - j).unwrap();
                    }
                }
                assert_eq!(acc, p.coeff(r, s), "identity fails at ({}, {})", r, s);
            }
        }
    }

    #[test]
    fn rejects_vanishing_constant_term_and_oversize() {
        let p = poly(&[(0, 0, 1)]);
        let q = poly(&[(1, 0, 1), (0, 1, 1)]);
        assert!(matches!(
            CoefficientTable::new(&p, &q, 3, 3),
            Err(Error::AssumptionViolated(Assumption::DenominatorNonzeroAtOrigin))
        ));
        let q2 = poly(&[(0, 0, 1), (1, 0, -1)]);
        assert!(matches!(
            CoefficientTable::new(&p, &q2, 2000, 2000),
            Err(Error::OracleCap { .. })
        ));
    }

    #[test]
    fn rational_coefficients_survive() {
        // 1/(1 - x/2 - y/2): a_{r,s} = C(r+s, r) / 2^{r+s}.
        let p = poly(&[(0, 0, 1)]);
        let mut q = SparsePoly::zero();
        q.add_term(0, 0, rat_int(1));
        q.add_term(1, 0, rat(-1, 2));
        q.add_term(0, 1, rat(-1, 2));
        let t = CoefficientTable::new(&p, &q, 5, 5).unwrap();
        assert_eq!(*t.coefficient(2, 2).unwrap(), rat(6, 16));
    }
}
