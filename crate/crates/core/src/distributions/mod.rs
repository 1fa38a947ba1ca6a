//! Value distributions: exact atom-plus-segment laws, closed-form bidder
//! families, products over items, and the adversarial constructions.

mod analytic;
mod constructions;
mod piecewise;
mod product;

pub use analytic::AnalyticDistribution;
pub use constructions::{
    default_lower_instance_delta, lower_instance_slack, multi_item_lower_instance,
    perturb_to_exact_sigma, rare_event, two_point, two_point_alpha, two_point_upper, yao_posterior,
    LowerBoundInstance, YaoMixture,
};
pub use piecewise::{Atom, PiecewiseDistribution, ReciprocalTail, MASS_TOLERANCE};
pub use product::{Marginal, ProductDistribution};
