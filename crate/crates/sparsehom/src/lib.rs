//! Homotopy continuation for sparse polynomial systems over the complex
//! torus, together with exact polyhedral combinatorics (Newton polytopes,
//! mixed volumes, mixed subdivisions, Smith normal forms) and numerical
//! oracles for Newton polytopes and tropical varieties of hypersurfaces.

pub mod ddouble;
pub mod decomposable;
pub mod hs_oracle;
pub mod hull;
pub mod intlin;
pub mod lp;
pub mod mixedvol;
pub mod monodromy;
pub mod poly;
pub mod polyhedral;
pub mod polytope;
pub mod rational;
pub mod subdivision;
pub mod tracker;
pub mod witness;

pub use poly::{SparsePoly, SparseSystem, Term, C64};
pub use polytope::Polytope;
