use serde::{Deserialize, Serialize};

/// Interim decision branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterimAction {
    Terminate,
    ContinuePhaseII,
    ExpandPhaseIII,
}

impl InterimAction {
    pub const ALL: [InterimAction; 3] = [
        InterimAction::Terminate,
        InterimAction::ContinuePhaseII,
        InterimAction::ExpandPhaseIII,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Self::Terminate => "terminate",
            Self::ContinuePhaseII => "phase2",
            Self::ExpandPhaseIII => "phase3",
        }
    }
}

/// One value per interim branch.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ByAction<T> {
    pub terminate: T,
    pub phase2: T,
    pub phase3: T,
}

impl<T> ByAction<T> {
    pub fn get(&self, action: InterimAction) -> &T {
        match action {
            InterimAction::Terminate => &self.terminate,
            InterimAction::ContinuePhaseII => &self.phase2,
            InterimAction::ExpandPhaseIII => &self.phase3,
        }
    }

    pub fn get_mut(&mut self, action: InterimAction) -> &mut T {
        match action {
            InterimAction::Terminate => &mut self.terminate,
            InterimAction::ContinuePhaseII => &mut self.phase2,
            InterimAction::ExpandPhaseIII => &mut self.phase3,
        }
    }

    pub fn map<U>(&self, mut f: impl FnMut(InterimAction, &T) -> U) -> ByAction<U> {
        ByAction {
            terminate: f(InterimAction::Terminate, &self.terminate),
            phase2: f(InterimAction::ContinuePhaseII, &self.phase2),
            phase3: f(InterimAction::ExpandPhaseIII, &self.phase3),
        }
    }
}

/// Design-level summary over simulated replicates.
///
/// Conditional quantities are `None` when no replicate took that branch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatingCharacteristics {
    /// Replicates that reached the interim analysis.
    pub n_replicates: usize,
    /// Replicates dropped because enrollment capped out before the interim.
    pub n_trigger_failed: usize,
    /// Replicates analysed short of their event target.
    pub n_underrun: usize,
    /// Percentage of replicates selecting each dose (dose 1 first).
    pub optimal_dose_pct: Vec<f64>,
    /// Percentage of replicates taking each branch.
    pub decision_pct: ByAction<f64>,
    pub positive_rate_overall: f64,
    /// Fraction of replicates that selected a truly optimal dose and
    /// succeeded at the final analysis.
    pub positive_rate_given_true_optimal: f64,
    pub positive_rate_by_decision: ByAction<Option<f64>>,
    pub positive_rate_given_true_optimal_by_decision: ByAction<Option<f64>>,
    /// Events in the selected arm and control only.
    pub expected_event_size: f64,
    pub expected_event_size_by_decision: ByAction<Option<f64>>,
    pub expected_duration_months: f64,
    pub expected_duration_by_decision: ByAction<Option<f64>>,
    /// Mean re-estimated post-interim OS events over Phase III replicates.
    pub mean_adjusted_m2: Option<f64>,
}
