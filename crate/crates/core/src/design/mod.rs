//! Static data model: priors, design and scenario specifications, and the
//! summary records produced by simulation.

mod prior;
mod records;
mod spec;

pub use prior::{prior_at, BetaPrior, DosePrior, PriorFunction, PriorFunctions};
pub use records::{ByAction, InterimAction, OperatingCharacteristics};
pub use spec::{
    cholesky3, validate, DesignSpec, DoseScoring, FieldError, InformationFraction,
    ScenarioSpec, TieBreak, ValidationErrors, DEFAULT_LATENT_CORR,
};
