//! Certified coefficient asymptotics for bivariate rational generating
//! functions.
//!
//! Given F(x,y) = P(x,y)/Q(x,y) with Q(0,0) != 0 whose pole curve {Q = 0} is
//! smooth, and a direction r:s of positive integers, this crate locates the
//! critical points of the height function h = -r' log|x| - s' log|y| (with
//! r' = r/(r+s), s' = s/(r+s)) on the pole curve, classifies them by running
//! certified steepest-ascent paths, extracts the contributing saddle set and
//! the critical height c*, and assembles the leading-order estimate for the
//! coefficients a_{rn,sn}.  Every inexact quantity is carried as a ball
//! (center plus radius) so that each reported digit is backed by an enclosure,
//! and every discrete decision (saddle order, equality of algebraic numbers,
//! membership of a direction in the degenerate set) is made by exact rational
//! arithmetic, never by floating-point comparison.
//!
//! Module layout:
//!
//! * [`exactpoly`]: exact rationals, Gaussian rationals, dyadic floats, sparse
//!   bivariate polynomials, resultants and squarefree decomposition.
//! * [`ball`]: complex and real ball arithmetic, certified elementary bounds
//!   (log, sqrt, pi), the quarter-sector test used by the ascent certificates.
//! * [`algnum`]: certified root isolation, algebraic numbers with exact
//!   equality, zero-dimensional bivariate system solving.
//! * [`geometry`]: assumption checks, critical points with saddle orders and
//!   heights, degenerate direction sets, axis spectra and Puiseux data.
//! * [`morse`]: lifted curve points, validated analytic continuation,
//!   certified ascent steps and the saddle classification algorithm.
//! * [`asym`]: saddle-point constants and the leading asymptotic estimate,
//!   plus the decomposition of (0,oo) into intervals of uniform behaviour.
//! * [`oracle`]: exact power-series coefficients by recurrence, used to
//!   cross-check the analytic estimates.

pub mod algnum;
pub mod asym;
pub mod ball;
pub mod error;
pub mod exactpoly;
pub mod geometry;
pub mod morse;
pub mod oracle;

pub use error::{Error, Result};
