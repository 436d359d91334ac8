//! Exact linear algebra: Smith normal form over Z, linear solving over Z/M,
//! subquotient structure of finite abelian groups, and cyclotomic field
//! arithmetic with exact rank computation.

pub mod cyclotomic;
pub mod cycmat;
pub mod modelim;
pub mod snf;
pub mod subquotient;

pub use cyclotomic::{Cyc, CycField};
pub use cycmat::CycMatrix;
pub use modelim::ModElim;
pub use snf::{smith_normal_form, solve_linear_mod, IntMatrix, SmithNormalForm};
pub use subquotient::{subquotient_invariants, AbelianGroupStructure};
