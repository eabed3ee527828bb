//! Okounkov semigroups, their bodies, and the limit law of superadditive
//! functions on them.
//!
//! A [`SemigroupSample`] holds the levels `Γ_0..Γ_{n_max}` of a semigroup in
//! `N^{d+1}` and a [`ValueTable`] holds `Φ(n, α)`. Super-level sets
//! `Γ_Φ^t = {Φ(n, α) ≥ n t}` give nested bodies whose relative volumes form
//! the survival function of the limit law.

mod hull;
mod limit;
mod order;
mod semigroup;

pub use hull::{hull, ConvexBody, HPoint, Hull};
pub use limit::{
    delta_body, empirical_level_law, filtered_cdf, g_function, reduced_points, theta, BodyOptions,
    BrunnMinkowskiAudit, DeltaBody, FilteredCdf, GFunction, RegularGrid,
};
pub use order::{MonomialOrder, OrderKind};
pub use semigroup::{
    closure_audit, conditions_check, echelon_by_order, leading_exponents, superadditivity_audit, AuditOptions,
    AuditReport, ConditionsReport, Exp, SemigroupSample, ValueTable, Violation, MAX_DIM,
};
