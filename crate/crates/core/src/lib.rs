//! Recommendation games with strategic content providers.
//!
//! Players (content providers) each pick an item from a menu; a mediator
//! decides, per user, which player's item to display. This crate implements
//! the Shapley mediator — display probabilities equal to the Shapley values
//! of the induced "best item" cooperative game — alongside the classic
//! comparator mediators, and the analyses around it: fairness axioms,
//! better-response dynamics and equilibria, the exact potential and its
//! congestion-game form, price of anarchy for welfare and user utility, and
//! the numeric single-user utility minimization.
//!
//! Exact games use [`Rational`]; float games use `f64`. Everything generic
//! over [`Scalar`] works with both.

pub mod axioms;
pub mod congestion;
pub mod coop;
pub mod dynamics;
pub mod error;
pub mod game;
pub mod generators;
pub mod linalg;
pub mod mediator;
pub mod metrics;
pub mod scalar;
pub mod upoa;

pub use axioms::{check_axioms, Axiom, AxiomReport, Counterexample};
pub use congestion::{build_congestion_game, congestion_payoffs, CongestionGame};
pub use coop::{coalition_value, permutation_counts, shapley_bruteforce, CoalitionValueFn, PermutationCounts};
pub use dynamics::{
    best_response, better_response, enumerate_pne, is_pne, payoff_vector, potential_value, run_dynamics,
    DynamicsConfig, DynamicsTrace, PayoffVector, ResponseRule, Schedule,
};
pub use error::{Error, Result};
pub use game::{
    parse_game, sorted_levels, AnyGame, Game, ItemSpec, Mode, PlayerSpec, SortedLevels, Strategy, StrategyProfile,
    DEFAULT_ENUMERATION_CAP,
};
pub use mediator::{
    display_distribution, mediate, sampler_fit, shapley_distribution, shapley_sample, DisplayDistribution,
    MediatorKind, Outcome, SamplerFit,
};
pub use metrics::{
    price_of_anarchy, social_welfare, user_price_of_anarchy, user_utility, PoARatio, PoAResult, UtilityConfig,
};
pub use scalar::{format_scalar, Rational, Scalar};
pub use upoa::{
    min_utility_curve, single_user_utility, solve_stationary, utility_gradient, CurvePoint, StationaryPoint,
    StationarySystem,
};
