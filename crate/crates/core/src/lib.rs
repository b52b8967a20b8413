//! Computational toolkit for fine sharp commutative monoids, semistable
//! chart structures, monoid pushouts, log monoids over finite coefficient
//! rings, and truncated power-series model rings.
//!
//! Everything here is exact arithmetic at desk scale: congruences of
//! finitely presented commutative monoids are decided by completed vector
//! rewriting systems (with a bounded-closure fallback), abelian invariants
//! by Smith normal form, and ring-level statements by finite linear algebra
//! over toy coefficient rings.

pub mod chart;
pub mod family;
pub mod io;
pub mod linalg;
pub mod log_monoid;
pub mod monoid;
pub mod pushout;
pub mod ring;
pub mod semistable;
pub mod series;
pub mod snf;
pub mod word;

pub use monoid::{
    is_integral_hom, MonoidElement, MonoidError, MonoidHom, MonoidPresentation, TriState,
};
pub use snf::AbelianGroupPresentation;
pub use word::Word;
