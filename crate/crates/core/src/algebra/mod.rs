//! Exact integer/rational arithmetic, polynomial utilities and rigorous
//! real-root isolation.

pub mod arith;
mod cubic;
pub mod linalg;
mod parse;
mod poly;
mod roots;

pub use cubic::MonicCubic;
pub use parse::{parse_int_poly, IntCoeffs};
pub use poly::QPoly;
pub use roots::{
    all_roots_real, count_distinct_real_roots, isolate_squarefree, isolate_with_multiplicity,
    real_roots, IsolatedRoot, RationalInterval, RealRoot,
};
