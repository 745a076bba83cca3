//! Wall-and-chamber decomposition of the Hassett weight domain, boundary
//! divisor intersection calculus on the moduli space of stable pointed
//! rational curves, and the checks built on top of them.

pub mod arith;
pub mod chamber;
pub mod dp5;
pub mod git;
pub mod intersection;
pub mod lc;
pub mod marks;
