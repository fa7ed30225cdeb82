//! Exact sparse arithmetic for multi-graded series over nilpotent cohomology rings.

mod key;
mod rational;
mod ring;
mod series;

pub use key::{format_xexp, ExponentKey, XMonomial};
pub use rational::{binomial, factorial, format_rational, int, parse_rational, ratio, sign_power, Rational};
pub use ring::{AmbientRing, Monomial};
pub use series::{print_order, GradedSeries, LinearFactor, Selector, SeriesContext};
