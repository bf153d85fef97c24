//! Exact infinitesimal arithmetic and the procedures that run on it.
//!
//! * [`hypernum`]: truncated Laurent series in one infinitesimal `e`, with order,
//!   valuation, classification and the standard part ("shadow").
//! * [`exprlang`]: single-variable rational expressions evaluated at real or
//!   hyperreal points.
//! * [`adequality`]: extremum finding by adequality, tangents, transverse rays.
//! * [`homogeneity`]: dropping higher-order terms, Euler's two equality modes,
//!   shadow derivatives and microcontinuity.
//! * [`rearrange`]: decreasing rearrangement on a finite grid and the
//!   divergent-integral probe.
//!
//! ```
//! # fn main() -> shadowcalc::Result<()> {
//! use shadowcalc::{Expr, HyperReal};
//! use shadowcalc::homogeneity::{default_derivative_witnesses, derivative_shadow};
//! use shadowcalc::rational::int;
//!
//! let f = Expr::parse("x^3 - 2*x")?;
//! let y = f.eval_hyper(&"1 + e".parse::<HyperReal>()?)?;
//! assert_eq!(y.to_string(), "-1 + e + 3e^2 + e^3");
//!
//! let w = default_derivative_witnesses(8)?;
//! assert_eq!(derivative_shadow(&f, &int(1), &w)?, int(1));
//! # Ok(())
//! # }
//! ```

pub mod adequality;
pub mod error;
pub mod exprlang;
pub mod homogeneity;
pub mod hypernum;
pub mod poly;
pub mod rational;
pub mod rearrange;
pub mod summation;

pub use error::{Error, Result};
pub use exprlang::Expr;
pub use hypernum::{Classification, HyperReal, DEFAULT_ORDER};
pub use rational::Rational;
