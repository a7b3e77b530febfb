//! Exact arithmetic over F_p: polynomials, rational functions, truncated
//! Laurent series, and their divided (Hasse) derivatives.

mod parse;
mod poly;
mod prime;
mod ratfn;
mod series;

pub use parse::{parse_poly, parse_ratfn, parse_series};
pub use poly::{hasse_poly, FpPoly};
pub use prime::Prime;
pub use ratfn::{hasse_ratfn, hasse_ratfn_all, hasse_ratfn_recursive, FpRatFn, PartialFractions};
pub use series::{hasse_series, FpSeries};
