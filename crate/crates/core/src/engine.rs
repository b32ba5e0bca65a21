//! Patient-level trial simulation.
//!
//! Enrollment is a fixed-rate stream: the `j`-th patient overall arrives at
//! `j / rate` and is allocated by permuted blocks containing one slot per
//! open arm. At the interim only control and the selected dose stay open,
//! and enrollment restarts at the post-interim rate in blocks of two.
//!
//! Every arm draws its patients from its own random stream in enrollment
//! order, so the `k`-th patient of an arm has the same latent outcomes no
//! matter when they happen to enroll.

use std::collections::BinaryHeap;

use rand::seq::SliceRandom;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::design::{
    cholesky3, prior_at, validate, ByAction, DesignSpec, InterimAction, OperatingCharacteristics,
    ScenarioSpec,
};
use crate::error::{Error, Result};
use crate::interim::{analyze_interim, interim_posteriors, ArmInterimData, InterimDecision, InterimPosteriors};
use crate::ssr::{ppos_with, reestimate_events_with, PposInputs};
use crate::stats::{normal_log_cdf, normal_quantile, RandomStream};

const ALLOC_PRE: u32 = 0;
const ALLOC_POST: u32 = 1;
const ARM_BASE: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatientRecord {
    /// 0 is control, `d + 1` is dose `d`.
    pub arm: usize,
    pub enroll_time: f64,
    pub responder: bool,
    pub response_readout_time: f64,
    /// From enrollment.
    pub pfs_time: f64,
    /// From enrollment.
    pub os_time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Endpoint {
    Pfs,
    Os,
    None,
}

impl Endpoint {
    pub fn label(self) -> &'static str {
        match self {
            Endpoint::Pfs => "pfs",
            Endpoint::Os => "os",
            Endpoint::None => "none",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub selected_dose: usize,
    pub decision: InterimDecision,
    pub final_test_passed: bool,
    pub endpoint_used: Endpoint,
    /// Final-analysis statistic, absent after termination.
    pub final_z: Option<f64>,
    /// Events in the selected arm and control only.
    pub events_counted: u32,
    pub duration_months: f64,
    pub interim_time_months: f64,
    /// Enrollment capped out before the event target was reached.
    pub underrun: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ReplicateOutcome {
    Completed(TrialOutcome),
    /// Enrollment cap reached before the interim trigger.
    TriggerFailed,
}

impl ReplicateOutcome {
    pub fn outcome(&self) -> Option<&TrialOutcome> {
        match self {
            ReplicateOutcome::Completed(o) => Some(o),
            ReplicateOutcome::TriggerFailed => None,
        }
    }
}

/// Per-arm outcome generator for one scenario.
#[derive(Debug, Clone)]
pub struct PatientModel {
    response_cut: Vec<f64>,
    pfs_rate: Vec<f64>,
    os_rate: Vec<f64>,
    chol: [[f64; 3]; 3],
    readout_lag: f64,
    clamp_os: bool,
}

#[derive(Debug, Clone, Copy)]
struct Latent {
    responder: bool,
    pfs: f64,
    os: f64,
}

fn response_cut(p: f64) -> Result<f64> {
    if p <= 0.0 {
        Ok(f64::NEG_INFINITY)
    } else if p >= 1.0 {
        Ok(f64::INFINITY)
    } else {
        normal_quantile(p)
    }
}

impl PatientModel {
    pub fn new(scen: &ScenarioSpec) -> Result<Self> {
        let chol = cholesky3(&scen.latent_corr)
            .ok_or_else(|| Error::Domain("latent_corr is not positive definite".into()))?;
        let ln2 = std::f64::consts::LN_2;
        Ok(Self {
            response_cut: scen.orr.iter().map(|&p| response_cut(p)).collect::<Result<_>>()?,
            pfs_rate: scen
                .hr_pfs
                .iter()
                .map(|hr| ln2 / scen.control_median_pfs_months * hr)
                .collect(),
            os_rate: scen
                .hr_os
                .iter()
                .map(|hr| ln2 / scen.control_median_os_months * hr)
                .collect(),
            chol,
            readout_lag: scen.response_readout_lag_months,
            clamp_os: scen.clamp_os_to_pfs,
        })
    }

    fn latent(&self, arm: usize, rs: &mut RandomStream) -> Latent {
        let e: [f64; 3] = [
            StandardNormal.sample(rs),
            StandardNormal.sample(rs),
            StandardNormal.sample(rs),
        ];
        let l = &self.chol;
        let z = [
            l[0][0] * e[0],
            l[1][0] * e[0] + l[1][1] * e[1],
            l[2][0] * e[0] + l[2][1] * e[1] + l[2][2] * e[2],
        ];
        let pfs = -normal_log_cdf(z[1]) / self.pfs_rate[arm];
        let mut os = -normal_log_cdf(z[2]) / self.os_rate[arm];
        if self.clamp_os {
            os = os.max(pfs);
        }
        Latent { responder: z[0] < self.response_cut[arm], pfs, os }
    }

    fn record(&self, arm: usize, enroll_time: f64, l: Latent) -> PatientRecord {
        PatientRecord {
            arm,
            enroll_time,
            responder: l.responder,
            response_readout_time: enroll_time + self.readout_lag,
            pfs_time: l.pfs,
            os_time: l.os,
        }
    }

    pub fn generate(&self, arm: usize, enroll_time: f64, rs: &mut RandomStream) -> PatientRecord {
        let l = self.latent(arm, rs);
        self.record(arm, enroll_time, l)
    }
}

/// One patient for `arm` enrolled at `enroll_time`.
pub fn generate_patient(
    arm: usize,
    enroll_time: f64,
    scen: &ScenarioSpec,
    rs: &mut RandomStream,
) -> Result<PatientRecord> {
    if arm >= scen.n_arms() {
        return Err(Error::Domain(format!("arm {arm} out of range")));
    }
    Ok(PatientModel::new(scen)?.generate(arm, enroll_time, rs))
}

/// Lazily drawn latent outcomes for one arm, indexed by enrollment order.
struct Cohort {
    rs: RandomStream,
    latent: Vec<Latent>,
}

impl Cohort {
    fn get(&mut self, model: &PatientModel, arm: usize, k: usize) -> Latent {
        while self.latent.len() <= k {
            let l = model.latent(arm, &mut self.rs);
            self.latent.push(l);
        }
        self.latent[k]
    }
}

/// Permuted-block arrival schedule.
struct Schedule {
    start: f64,
    rate: f64,
    width: usize,
    rs: RandomStream,
    /// `blocks[k][slot]` is the position of `slot` within block `k`.
    blocks: Vec<Vec<usize>>,
}

impl Schedule {
    fn new(start: f64, rate: f64, width: usize, rs: RandomStream) -> Self {
        Self { start, rate, width, rs, blocks: Vec::new() }
    }

    fn arrival(&mut self, slot: usize, k: usize) -> f64 {
        while self.blocks.len() <= k {
            let mut order: Vec<usize> = (0..self.width).collect();
            order.shuffle(&mut self.rs);
            let mut pos = vec![0; self.width];
            for (p, &s) in order.iter().enumerate() {
                pos[s] = p;
            }
            self.blocks.push(pos);
        }
        self.start + (k * self.width + self.blocks[k][slot] + 1) as f64 / self.rate
    }
}

/// Data snapshot at the interim analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct InterimSnapshot {
    pub time_months: f64,
    /// Mature-response count and responders in control.
    pub control: (u32, u32),
    pub doses: Vec<ArmInterimData>,
    pub posteriors: InterimPosteriors,
}

struct Trial<'a> {
    spec: &'a DesignSpec,
    scen: &'a ScenarioSpec,
    model: PatientModel,
    cohorts: Vec<Cohort>,
    pre: Schedule,
    base: RandomStream,
    cap: usize,
}

struct Interim {
    time: f64,
    /// Patients enrolled before the interim, per arm.
    n_pre: Vec<usize>,
    snapshot: InterimSnapshot,
    /// OS events by the interim, per arm.
    os_events: Vec<u32>,
}

impl<'a> Trial<'a> {
    fn new(spec: &'a DesignSpec, scen: &'a ScenarioSpec, rs: &RandomStream) -> Result<Self> {
        let n_arms = scen.n_arms();
        Ok(Self {
            spec,
            scen,
            model: PatientModel::new(scen)?,
            cohorts: (0..n_arms)
                .map(|a| Cohort { rs: rs.child(ARM_BASE + a as u32), latent: Vec::new() })
                .collect(),
            pre: Schedule::new(0.0, scen.accrual_rate_per_month, n_arms, rs.child(ALLOC_PRE)),
            base: rs.clone(),
            cap: scen.max_enrollment_per_arm as usize,
        })
    }

    fn n_arms(&self) -> usize {
        self.cohorts.len()
    }

    /// Earliest time with enough mature responses in every arm and enough
    /// control deaths, or `None` when enrollment caps out first.
    fn trigger_time(&mut self) -> Option<f64> {
        let n_mature = self.spec.interim_orr_n_per_arm as usize;
        let lag = self.scen.response_readout_lag_months;
        let mut mature = 0.0f64;
        if n_mature > 0 {
            for a in 0..self.n_arms() {
                mature = mature.max(self.pre.arrival(a, n_mature - 1) + lag);
            }
        }
        let need = self.spec.interim_min_control_os_events as usize;
        let mut deaths = 0.0;
        if need > 0 {
            // Max-heap of the `need` earliest control death times, in bits
            // so that ordering is total (all values are positive).
            let mut heap: BinaryHeap<u64> = BinaryHeap::with_capacity(need + 1);
            for k in 0..self.cap {
                let enroll = self.pre.arrival(0, k);
                if heap.len() == need && enroll >= f64::from_bits(*heap.peek().unwrap()) {
                    break;
                }
                let death = enroll + self.cohorts[0].get(&self.model, 0, k).os;
                heap.push(death.to_bits());
                if heap.len() > need {
                    heap.pop();
                }
            }
            if heap.len() < need {
                return None;
            }
            deaths = f64::from_bits(*heap.peek().unwrap());
        }
        let t = mature.max(deaths);
        let last = (0..self.n_arms())
            .map(|a| self.pre.arrival(a, self.cap - 1))
            .fold(0.0f64, f64::max);
        if last < t {
            None
        } else {
            Some(t)
        }
    }

    fn interim(&mut self) -> Result<Option<Interim>> {
        let Some(t) = self.trigger_time() else {
            return Ok(None);
        };
        let lag = self.scen.response_readout_lag_months;
        let n_arms = self.n_arms();
        let mut n_pre = vec![0; n_arms];
        let mut mature = vec![(0u32, 0u32); n_arms];
        let mut deaths = vec![0u32; n_arms];
        let mut exposure = vec![0.0f64; n_arms];
        for a in 0..n_arms {
            let mut k = 0;
            while k < self.cap {
                let enroll = self.pre.arrival(a, k);
                if enroll > t {
                    break;
                }
                let l = self.cohorts[a].get(&self.model, a, k);
                if enroll + lag <= t {
                    mature[a].0 += 1;
                    mature[a].1 += u32::from(l.responder);
                }
                if enroll + l.os <= t {
                    deaths[a] += 1;
                    exposure[a] += l.os;
                } else {
                    exposure[a] += t - enroll;
                }
                k += 1;
            }
            n_pre[a] = k;
        }
        let rate = |a: usize| {
            // Half an event keeps the estimate finite for an arm without deaths.
            let d = if deaths[a] == 0 { 0.5 } else { f64::from(deaths[a]) };
            d / exposure[a]
        };
        let doses: Vec<ArmInterimData> = (1..n_arms)
            .map(|a| {
                let lh = if exposure[a] > 0.0 && exposure[0] > 0.0 {
                    (rate(a) / rate(0)).ln()
                } else {
                    0.0
                };
                ArmInterimData {
                    n: mature[a].0,
                    y: mature[a].1,
                    m1: deaths[a] + deaths[0],
                    log_hr_hat: lh,
                }
            })
            .collect();
        let posteriors = interim_posteriors(self.spec, mature[0], &doses)?;
        Ok(Some(Interim {
            time: t,
            n_pre,
            snapshot: InterimSnapshot { time_months: t, control: mature[0], doses, posteriors },
            os_events: deaths,
        }))
    }

    /// Control and selected-arm records from trial start, with post-interim
    /// enrollment filled up to the cap.
    fn continuation(&mut self, interim: &Interim, arm: usize) -> Vec<PatientRecord> {
        let mut post = Schedule::new(
            interim.time,
            self.scen.post_interim_accrual(),
            2,
            self.base.child(ALLOC_POST),
        );
        let mut out = Vec::with_capacity(2 * self.cap);
        for (slot, a) in [0, arm].into_iter().enumerate() {
            for k in 0..self.cap {
                let enroll = if k < interim.n_pre[a] {
                    self.pre.arrival(a, k)
                } else {
                    post.arrival(slot, k - interim.n_pre[a])
                };
                let l = self.cohorts[a].get(&self.model, a, k);
                out.push(self.model.record(a, enroll, l));
            }
        }
        out
    }
}

struct FinalAnalysis {
    time: f64,
    z: f64,
    events: u32,
    underrun: bool,
}

/// Log-rank analysis once `target` pooled events have occurred, but not
/// before `not_before`. Records enrolled after the analysis are ignored.
fn event_driven_analysis(
    records: &[PatientRecord],
    treated_arm: usize,
    endpoint: Endpoint,
    target: u32,
    not_before: f64,
) -> Result<FinalAnalysis> {
    let time_of = |p: &PatientRecord| match endpoint {
        Endpoint::Pfs => p.pfs_time,
        _ => p.os_time,
    };
    let mut calendar: Vec<f64> = records.iter().map(|p| p.enroll_time + time_of(p)).collect();
    calendar.sort_unstable_by(f64::total_cmp);
    let target = target as usize;
    let underrun = target > calendar.len();
    let at_target = if target == 0 {
        not_before
    } else if underrun {
        *calendar.last().unwrap_or(&not_before)
    } else {
        calendar[target - 1]
    };
    let t = at_target.max(not_before);

    let mut treated = Vec::new();
    let mut control = Vec::new();
    let mut events = 0u32;
    for p in records.iter().filter(|p| p.enroll_time <= t) {
        let event = p.enroll_time + time_of(p) <= t;
        let obs = if event { time_of(p) } else { t - p.enroll_time };
        events += u32::from(event);
        debug_assert!(p.arm == 0 || p.arm == treated_arm);
        if p.arm == 0 {
            control.push((obs, event));
        } else {
            treated.push((obs, event));
        }
    }
    Ok(FinalAnalysis { time: t, z: logrank_z(&treated, &control)?, events, underrun })
}

fn phase3_sizing(spec: &DesignSpec, decision: &mut InterimDecision, data: &ArmInterimData) -> Result<u32> {
    let prior = prior_at(&spec.priors, spec.dose_levels[decision.selected_dose]);
    let inputs = PposInputs::from_interim(data.m1, data.log_hr_hat, &prior, spec.alpha_one_sided)?;
    let m2 = reestimate_events_with(
        &inputs,
        spec.m2_planned,
        spec.m2_max,
        spec.power_target,
        spec.information_fraction,
    );
    let p = ppos_with(&inputs, u64::from(m2), spec.information_fraction, spec.m2_planned);
    decision.adjusted_m2 = Some(m2);
    decision.ppos_at_adjusted = Some(p);
    decision.aa_supportable = p >= spec.aa_threshold();
    Ok(m2)
}

/// Interim stage only: data snapshot at the trigger, or `None` when the
/// trigger fails.
pub fn simulate_interim(
    spec: &DesignSpec,
    scen: &ScenarioSpec,
    rs: &RandomStream,
) -> Result<Option<InterimSnapshot>> {
    let mut trial = Trial::new(spec, scen, rs)?;
    Ok(trial.interim()?.map(|i| i.snapshot))
}

struct Simulated {
    outcome: ReplicateOutcome,
    analysed: Vec<PatientRecord>,
}

fn simulate(spec: &DesignSpec, scen: &ScenarioSpec, rs: &RandomStream) -> Result<Simulated> {
    let mut trial = Trial::new(spec, scen, rs)?;
    let Some(interim) = trial.interim()? else {
        return Ok(Simulated { outcome: ReplicateOutcome::TriggerFailed, analysed: Vec::new() });
    };
    let mut decision = analyze_interim(spec, &interim.snapshot.posteriors)?;
    let sel = decision.selected_dose;
    let arm = sel + 1;
    let data = interim.snapshot.doses[sel];
    let alpha_z = normal_quantile(spec.alpha_one_sided)?;

    let (endpoint, target) = match decision.action {
        InterimAction::Terminate => {
            let outcome = TrialOutcome {
                selected_dose: sel,
                decision,
                final_test_passed: false,
                endpoint_used: Endpoint::None,
                final_z: None,
                events_counted: interim.os_events[0] + interim.os_events[arm],
                duration_months: interim.time,
                interim_time_months: interim.time,
                underrun: false,
            };
            return Ok(Simulated { outcome: ReplicateOutcome::Completed(outcome), analysed: Vec::new() });
        }
        InterimAction::ContinuePhaseII => (Endpoint::Pfs, spec.phase2_events),
        InterimAction::ExpandPhaseIII => {
            let m2 = phase3_sizing(spec, &mut decision, &data)?;
            (Endpoint::Os, data.m1 + m2)
        }
    };
    let records = trial.continuation(&interim, arm);
    let fa = event_driven_analysis(&records, arm, endpoint, target, interim.time)?;
    let analysed: Vec<PatientRecord> = records.into_iter().filter(|p| p.enroll_time <= fa.time).collect();
    let outcome = TrialOutcome {
        selected_dose: sel,
        decision,
        final_test_passed: fa.z <= alpha_z,
        endpoint_used: endpoint,
        final_z: Some(fa.z),
        events_counted: fa.events,
        duration_months: fa.time,
        interim_time_months: interim.time,
        underrun: fa.underrun,
    };
    Ok(Simulated { outcome: ReplicateOutcome::Completed(outcome), analysed })
}

/// One replicate of the full design.
pub fn simulate_trial(spec: &DesignSpec, scen: &ScenarioSpec, rs: &RandomStream) -> Result<ReplicateOutcome> {
    Ok(simulate(spec, scen, rs)?.outcome)
}

/// Like [`simulate_trial`], also returning the records fed to the final
/// analysis.
pub fn simulate_trial_with_records(
    spec: &DesignSpec,
    scen: &ScenarioSpec,
    rs: &RandomStream,
) -> Result<(ReplicateOutcome, Vec<PatientRecord>)> {
    let s = simulate(spec, scen, rs)?;
    Ok((s.outcome, s.analysed))
}

/// Standardized log-rank statistic `(O - E) / sqrt(V)` for `group_a`.
///
/// Negative values mean fewer events than expected in `group_a`. Subjects
/// censored at an event time are kept in that time's risk set.
pub fn logrank_z(group_a: &[(f64, bool)], group_b: &[(f64, bool)]) -> Result<f64> {
    let mut all: Vec<(f64, bool, bool)> = group_a
        .iter()
        .map(|&(t, e)| (t, e, true))
        .chain(group_b.iter().map(|&(t, e)| (t, e, false)))
        .collect();
    if all.iter().any(|x| x.0.is_nan()) {
        return Err(Error::Domain("NaN survival time".into()));
    }
    if !all.iter().any(|x| x.1) {
        return Err(Error::UndefinedStatistic("log-rank needs at least one event".into()));
    }
    all.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut n_a = group_a.len() as f64;
    let mut n_b = group_b.len() as f64;
    let (mut o_minus_e, mut var) = (0.0, 0.0);
    let mut i = 0;
    while i < all.len() {
        let t = all[i].0;
        let (mut d_a, mut d_b, mut leave_a, mut leave_b) = (0.0, 0.0, 0.0, 0.0);
        while i < all.len() && all[i].0 == t {
            let (_, event, in_a) = all[i];
            match (event, in_a) {
                (true, true) => d_a += 1.0,
                (true, false) => d_b += 1.0,
                _ => {}
            }
            if in_a {
                leave_a += 1.0;
            } else {
                leave_b += 1.0;
            }
            i += 1;
        }
        let d = d_a + d_b;
        let n = n_a + n_b;
        if d > 0.0 {
            o_minus_e += d_a - d * n_a / n;
            if n > 1.0 {
                var += d * (n_a / n) * (n_b / n) * (n - d) / (n - 1.0);
            }
        }
        n_a -= leave_a;
        n_b -= leave_b;
    }
    if !(var > 0.0) {
        return Err(Error::UndefinedStatistic("log-rank variance is zero".into()));
    }
    Ok(o_minus_e / var.sqrt())
}

/// Runs `f` over `0..n` on `workers` threads (0 = rayon default), keeping
/// results in index order.
pub(crate) fn map_indexed<T, F>(n: usize, workers: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
    pool.install(|| (0..n).into_par_iter().map(&f).collect())
}

/// Replicates `0..n_reps` with stream `(seed, r)`, in replicate order.
pub fn simulate_replicates(
    spec: &DesignSpec,
    scen: &ScenarioSpec,
    n_reps: usize,
    seed: u64,
    workers: usize,
) -> Result<Vec<ReplicateOutcome>> {
    let (spec, scen) = validate(spec.clone(), scen.clone())?;
    map_indexed(n_reps, workers, |r| {
        simulate_trial(&spec, &scen, &RandomStream::new(seed, r as u64, 0))
    })
}

pub fn operating_characteristics(
    spec: &DesignSpec,
    scen: &ScenarioSpec,
    n_reps: usize,
    seed: u64,
    workers: usize,
) -> Result<OperatingCharacteristics> {
    if n_reps == 0 {
        return Err(Error::Domain("n_reps must be at least 1".into()));
    }
    let reps = simulate_replicates(spec, scen, n_reps, seed, workers)?;
    Ok(summarize(spec.n_doses(), &scen.true_optimal_set(), &reps))
}

fn mean(sum: f64, n: usize) -> Option<f64> {
    (n > 0).then(|| sum / n as f64)
}

/// Aggregates replicate outcomes in slice order.
pub fn summarize(n_doses: usize, true_optimal: &[usize], reps: &[ReplicateOutcome]) -> OperatingCharacteristics {
    let done: Vec<&TrialOutcome> = reps.iter().filter_map(ReplicateOutcome::outcome).collect();
    let n = done.len();
    let pct = |count: usize| if n == 0 { 0.0 } else { 100.0 * count as f64 / n as f64 };
    let mut dose_counts = vec![0usize; n_doses];
    for o in &done {
        dose_counts[o.selected_dose] += 1;
    }
    let optimal = |o: &TrialOutcome| true_optimal.contains(&o.selected_dose);

    let mut count = ByAction::<usize>::default();
    let mut positive = ByAction::<usize>::default();
    let mut positive_opt = ByAction::<usize>::default();
    let mut events = ByAction::<f64>::default();
    let mut duration = ByAction::<f64>::default();
    let (mut m2_sum, mut m2_n) = (0.0, 0usize);
    for o in &done {
        let a = o.decision.action;
        *count.get_mut(a) += 1;
        *positive.get_mut(a) += usize::from(o.final_test_passed);
        *positive_opt.get_mut(a) += usize::from(o.final_test_passed && optimal(o));
        *events.get_mut(a) += f64::from(o.events_counted);
        *duration.get_mut(a) += o.duration_months;
        if let Some(m2) = o.decision.adjusted_m2 {
            m2_sum += f64::from(m2);
            m2_n += 1;
        }
    }
    let total = |b: &ByAction<usize>| b.terminate + b.phase2 + b.phase3;
    let total_f = |b: &ByAction<f64>| b.terminate + b.phase2 + b.phase3;
    let rate = |k: usize| if n == 0 { 0.0 } else { k as f64 / n as f64 };

    OperatingCharacteristics {
        n_replicates: n,
        n_trigger_failed: reps.len() - n,
        n_underrun: done.iter().filter(|o| o.underrun).count(),
        optimal_dose_pct: dose_counts.into_iter().map(pct).collect(),
        decision_pct: count.map(|_, &c| pct(c)),
        positive_rate_overall: rate(total(&positive)),
        positive_rate_given_true_optimal: rate(total(&positive_opt)),
        positive_rate_by_decision: positive.map(|a, &k| mean(k as f64, *count.get(a))),
        positive_rate_given_true_optimal_by_decision: positive_opt.map(|a, &k| mean(k as f64, *count.get(a))),
        expected_event_size: mean(total_f(&events), n).unwrap_or(0.0),
        expected_event_size_by_decision: events.map(|a, &s| mean(s, *count.get(a))),
        expected_duration_months: mean(total_f(&duration), n).unwrap_or(0.0),
        expected_duration_by_decision: duration.map(|a, &s| mean(s, *count.get(a))),
        mean_adjusted_m2: mean(m2_sum, m2_n),
    }
}
