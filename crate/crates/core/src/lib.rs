//! Semantic kernel for a dependent refinement type checker.
//!
//! Everything here is a concrete, finite instance of the categorical
//! structures used to interpret dependent refinement types:
//!
//! * [`kernel`]: the family fibration over finite sets, with reindexing,
//!   comprehension, dependent sums and products, fibred coproducts and the
//!   structural maps κ, σ and δ.
//! * [`pred`]: the subobject fibration over finite sets (and endorelations)
//!   with its Heyting structure, quantifiers and equality.
//! * [`refined`]: the category of refined objects `(X, P, Q)` built on top of
//!   the two fibrations above.
//! * [`effect`]: monads on finite sets, their fibred versions, predicate
//!   liftings and the lifted monad on refined objects.
//! * [`fixpoint`]: finite pointed posets, Kleene least fixed points and the
//!   fibrewise Conway operator.
//! * [`laws`]: exhaustive law-checking drivers over small instances.

pub mod atom;
pub mod effect;
pub mod enumerate;
pub mod error;
pub mod fixpoint;
pub mod kernel;
pub mod laws;
pub mod pred;
pub mod refined;

pub use atom::Atom;
pub use error::{Error, Result};
pub use kernel::{Carrier, FamMor, Family, FinMap};
pub use pred::{Pred, Rel};
pub use refined::{RefinedMor, RefinedObj};
