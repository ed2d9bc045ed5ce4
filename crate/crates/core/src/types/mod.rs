//! Type machinery: atomic types for constant `p`, closures and closure
//! types for `p = n^{-α}`, extension counts and their expectations.

pub mod alpha;
pub mod atomic;
pub mod chain;
pub mod closure;
pub mod count;
pub mod rapid;

pub use alpha::{alpha_exceeds, classify_pair, irrationality_guard, Guard, PairClass, GUARD_TOL};
pub use atomic::{atomic_type, extension_percentages, extension_percentages_exact, AtomicType};
pub use chain::{is_strictly_balanced, strictly_balanced_chain, Chain};
pub use closure::{
    below_inverse_alpha, closure, closure_type, closure_with_cap, enumerate_closure_extension_types,
    enumerate_extensions, eta, Closure, ClosureExtension, ClosureType, ExtensionCaps, ExtensionEnumeration,
};
pub use count::{count_embeddings, count_extensions, mu_all, mu_asym};
pub use rapid::{ell, rapid_sequence, rapid_sequence_saturating, EllConfig, RapidSequence};
