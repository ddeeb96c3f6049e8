//! Randomized checking of the gap inequalities and a small derivative-free
//! search that drives one inequality's slack toward zero.
//!
//! Every trial draws from its own ChaCha8 stream: the generator is seeded
//! with the campaign seed and the stream id is the trial index, so trial
//! `t` is reproducible on its own and independent of evaluation order.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bands::{band_structure, cross_check};
use crate::error::{Error, Result};
use crate::estimates::{check_estimates, InequalityId, DEFAULT_RELATIVE_TOLERANCE};
use crate::instance::PeriodicJacobi;
use crate::report::fmt_num;

/// Recorded in every report so campaigns can be replayed elsewhere.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng(seed_from_u64(seed)), stream = trial index";

/// Tolerance for the eigensolver/bisection agreement check.
pub const CROSS_CHECK_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzConfig {
    pub trials: u64,
    pub p_min: usize,
    pub p_max: usize,
    /// Couplings are log-uniform on `[a_lo, a_hi]`.
    pub a_lo: f64,
    pub a_hi: f64,
    /// Diagonal entries are uniform on `[b_lo, b_hi]`.
    pub b_lo: f64,
    pub b_hi: f64,
    pub seed: u64,
    pub rel_tol: f64,
    pub cross_check_tol: f64,
}

impl Default for FuzzConfig {
    /// The standard campaign: `10^4` trials, `p` in `[2, 12]`, `a`
    /// log-uniform on `[1e-3, 1e3]`, `b` uniform on `[-10, 10]`.
    fn default() -> Self {
        Self {
            trials: 10_000,
            p_min: 2,
            p_max: 12,
            a_lo: 1e-3,
            a_hi: 1e3,
            b_lo: -10.0,
            b_hi: 10.0,
            seed: 42,
            rel_tol: DEFAULT_RELATIVE_TOLERANCE,
            cross_check_tol: CROSS_CHECK_TOLERANCE,
        }
    }
}

impl FuzzConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.trials < 1 {
            return bad("trials must be at least 1".into());
        }
        if self.p_min < 2 || self.p_min > self.p_max {
            return bad(format!("need 2 <= p_min <= p_max, got [{}, {}]", self.p_min, self.p_max));
        }
        if !(self.a_lo > 0.0 && self.a_lo <= self.a_hi && self.a_hi.is_finite()) {
            return bad(format!("need 0 < a_lo <= a_hi < inf, got [{}, {}]", self.a_lo, self.a_hi));
        }
        if !(self.b_lo <= self.b_hi && self.b_lo.is_finite() && self.b_hi.is_finite()) {
            return bad(format!("need finite b_lo <= b_hi, got [{}, {}]", self.b_lo, self.b_hi));
        }
        if !(self.rel_tol >= 0.0 && self.cross_check_tol > 0.0) {
            return bad("tolerances must be nonnegative".into());
        }
        Ok(())
    }
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// The instance for trial `trial`; a pure function of `(cfg, trial)`.
pub fn random_instance(cfg: &FuzzConfig, trial: u64) -> PeriodicJacobi {
    let mut rng = trial_rng(cfg.seed, trial);
    let p = rng.gen_range(cfg.p_min..=cfg.p_max);
    let (ln_lo, ln_hi) = (cfg.a_lo.ln(), cfg.a_hi.ln());
    let a = (0..p)
        .map(|_| {
            let u: f64 = rng.gen();
            if cfg.a_lo == cfg.a_hi {
                cfg.a_lo
            } else {
                (ln_lo + (ln_hi - ln_lo) * u).exp().clamp(cfg.a_lo, cfg.a_hi)
            }
        })
        .collect();
    let b = (0..p)
        .map(|_| {
            let u: f64 = rng.gen();
            cfg.b_lo + (cfg.b_hi - cfg.b_lo) * u
        })
        .collect();
    PeriodicJacobi::new(a, b).expect("sampling laws produce valid instances")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub trial: u64,
    pub instance: PeriodicJacobi,
    pub id: InequalityId,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinSlack {
    pub value: f64,
    pub trial: u64,
    pub instance: PeriodicJacobi,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleMismatch {
    pub trial: u64,
    pub instance: PeriodicJacobi,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub trial: u64,
    pub instance: PeriodicJacobi,
    pub error: String,
}

/// One line of the per-trial log.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub p: usize,
    pub min_slack_id: InequalityId,
    pub min_slack_value: f64,
    pub oracle_deviation: f64,
}

/// Campaign outcome. Contains no timing data, so equal configurations
/// serialize to identical bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzReport {
    pub rng: String,
    pub trials_run: u64,
    pub violations: Vec<Violation>,
    pub min_slack: BTreeMap<InequalityId, MinSlack>,
    pub max_oracle_deviation: f64,
    pub oracle_mismatches: Vec<OracleMismatch>,
    pub failures: Vec<TrialFailure>,
    #[serde(skip)]
    pub trials: Vec<TrialRecord>,
}

impl FuzzReport {
    fn empty() -> Self {
        Self {
            rng: RNG_ALGORITHM.to_string(),
            trials_run: 0,
            violations: Vec::new(),
            min_slack: BTreeMap::new(),
            max_oracle_deviation: 0.0,
            oracle_mismatches: Vec::new(),
            failures: Vec::new(),
            trials: Vec::new(),
        }
    }

    /// No inequality violated, no oracle disagreement, no solver failure.
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty() && self.oracle_mismatches.is_empty() && self.failures.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn trials_csv(&self) -> String {
        let mut out = String::from("trial,p,min_slack_id,min_slack_value\n");
        for t in &self.trials {
            out.push_str(&format!("{},{},{},{}\n", t.trial, t.p, t.min_slack_id, fmt_num(t.min_slack_value)));
        }
        out
    }

    fn record(&mut self, trial: u64, j: PeriodicJacobi, rel_tol: f64, cross_tol: f64) {
        self.trials_run += 1;
        let spectrum = match band_structure(&j) {
            Ok(s) => s,
            Err(e) => {
                self.failures.push(TrialFailure { trial, instance: j, error: e.to_string() });
                return;
            }
        };
        let report = check_estimates(&j, &spectrum, rel_tol);
        for c in report.checks.iter().filter(|c| !c.holds) {
            self.violations.push(Violation { trial, instance: j.clone(), id: c.id, slack: c.slack });
        }
        for c in &report.checks {
            let better = self.min_slack.get(&c.id).is_none_or(|m| c.slack < m.value);
            if better {
                self.min_slack.insert(c.id, MinSlack { value: c.slack, trial, instance: j.clone() });
            }
        }
        let xc = cross_check(&j, cross_tol);
        self.max_oracle_deviation = self.max_oracle_deviation.max(xc.max_deviation);
        if !xc.agree {
            self.oracle_mismatches.push(OracleMismatch {
                trial,
                instance: j.clone(),
                max_deviation: xc.max_deviation,
            });
        }
        let (min_slack_id, min_slack_value) = report.min_slack();
        self.trials.push(TrialRecord {
            trial,
            p: j.period(),
            min_slack_id,
            min_slack_value,
            oracle_deviation: xc.max_deviation,
        });
    }
}

/// Checks every inequality, and the two edge computations against each
/// other, on an explicit list of `(trial id, instance)` pairs.
pub fn fuzz_instances(
    instances: impl IntoIterator<Item = (u64, PeriodicJacobi)>,
    rel_tol: f64,
    cross_check_tol: f64,
) -> FuzzReport {
    let mut report = FuzzReport::empty();
    for (trial, j) in instances {
        report.record(trial, j, rel_tol, cross_check_tol);
    }
    report
}

/// Runs a randomized campaign.
pub fn fuzz_estimates(cfg: &FuzzConfig) -> Result<FuzzReport> {
    cfg.validate()?;
    Ok(fuzz_instances(
        (0..cfg.trials).map(|t| (t, random_instance(cfg, t))),
        cfg.rel_tol,
        cfg.cross_check_tol,
    ))
}

/// Consecutive rejections before the step halves.
pub const PATIENCE: usize = 50;
pub const INITIAL_STEP: f64 = 0.5;
pub const STEP_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessResult {
    pub id: InequalityId,
    pub best: PeriodicJacobi,
    pub best_slack: f64,
    /// Best slack so far; entry 0 is the start point, then one per iteration.
    pub trace: Vec<f64>,
    pub accepted: usize,
    pub final_step: f64,
}

impl SharpnessResult {
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("iteration,slack\n");
        for (i, s) in self.trace.iter().enumerate() {
            out.push_str(&format!("{i},{}\n", fmt_num(*s)));
        }
        out
    }
}

fn slack_of(id: InequalityId, j: &PeriodicJacobi) -> f64 {
    match band_structure(j) {
        Ok(s) => check_estimates(j, &s, DEFAULT_RELATIVE_TOLERANCE).slack(id),
        Err(_) => f64::INFINITY,
    }
}

/// Start points: diagonal oscillation with moderate couplings for `estb`,
/// the weak-bond family at `c = 0.1` otherwise.
pub fn default_start(id: InequalityId, p: usize) -> Result<PeriodicJacobi> {
    match id {
        InequalityId::Estb => PeriodicJacobi::new(vec![0.5; p], (0..p).map(|n| (n % 2) as f64).collect()),
        _ => crate::perturbation::theorem1_instance(p, 0.1),
    }
}

/// Coordinate-wise random descent on the slack of `id`.
///
/// Each step perturbs one coordinate: a coupling multiplicatively by
/// `exp(step * u)` or a diagonal entry additively by `step * u * scale`,
/// `u` uniform in `[-1, 1]`. Strict improvements are kept. After
/// [`PATIENCE`] consecutive rejections the step halves, never going below
/// [`STEP_FLOOR`].
pub fn sharpness_search(
    id: InequalityId,
    start: PeriodicJacobi,
    iterations: usize,
    seed: u64,
) -> Result<SharpnessResult> {
    if iterations < 1 {
        return Err(Error::InvalidConfig("iterations must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = start.period();
    let mut best = start;
    let mut best_slack = slack_of(id, &best);
    let mut trace = Vec::with_capacity(iterations + 1);
    trace.push(best_slack);
    let mut step = INITIAL_STEP;
    let mut rejections = 0;
    let mut accepted = 0;

    for _ in 0..iterations {
        let coord = rng.gen_range(0..2 * p);
        let u: f64 = rng.gen_range(-1.0..=1.0);
        let mut a = best.a().to_vec();
        let mut b = best.b().to_vec();
        if coord < p {
            a[coord] *= (step * u).exp();
        } else {
            let scale = best.max_a().max(best.max_b() - best.min_b());
            b[coord - p] += step * u * scale;
        }
        let improved = PeriodicJacobi::new(a, b).ok().and_then(|cand| {
            let s = slack_of(id, &cand);
            (s < best_slack).then_some((cand, s))
        });
        match improved {
            Some((cand, s)) => {
                best = cand;
                best_slack = s;
                accepted += 1;
                rejections = 0;
            }
            None => {
                rejections += 1;
                if rejections >= PATIENCE {
                    step = (step * 0.5).max(STEP_FLOOR);
                    rejections = 0;
                }
            }
        }
        trace.push(best_slack);
    }
    Ok(SharpnessResult { id, best, best_slack, trace, accepted, final_step: step })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_reproducible() {
        let cfg = FuzzConfig { seed: 1, ..FuzzConfig::default() };
        let x = random_instance(&cfg, 0);
        let y = random_instance(&cfg, 0);
        assert_eq!(x.to_json(), y.to_json());
        assert_ne!(random_instance(&cfg, 1), x);
    }

    #[test]
    fn degenerate_laws_give_free_instance() {
        let cfg = FuzzConfig {
            p_min: 4,
            p_max: 4,
            a_lo: 1.0,
            a_hi: 1.0,
            b_lo: 0.0,
            b_hi: 0.0,
            ..FuzzConfig::default()
        };
        assert_eq!(random_instance(&cfg, 17), PeriodicJacobi::free(4).unwrap());
    }

    #[test]
    fn fixed_period_draws() {
        let cfg = FuzzConfig { p_min: 5, p_max: 5, ..FuzzConfig::default() };
        for t in 0..1000 {
            let j = random_instance(&cfg, t);
            assert_eq!(j.period(), 5);
            assert!(j.a().iter().all(|&v| v > 0.0 && (1e-3..=1e3).contains(&v)));
            assert!(j.b().iter().all(|v| (-10.0..=10.0).contains(v)));
        }
    }

    #[test]
    fn config_validation() {
        let ok = FuzzConfig::default();
        assert!(ok.validate().is_ok());
        assert!(FuzzConfig { trials: 0, ..ok.clone() }.validate().is_err());
        assert!(FuzzConfig { p_min: 1, ..ok.clone() }.validate().is_err());
        assert!(FuzzConfig { p_min: 6, p_max: 5, ..ok.clone() }.validate().is_err());
        assert!(FuzzConfig { a_lo: 0.0, ..ok.clone() }.validate().is_err());
        assert!(FuzzConfig { b_lo: 1.0, b_hi: 0.0, ..ok }.validate().is_err());
    }

    #[test]
    fn single_free_trial_saturates_band_bound() {
        let rep = fuzz_instances([(0, PeriodicJacobi::free(4).unwrap())], 1e-9, 1e-8);
        assert!(rep.is_clean());
        assert!(rep.min_slack[&InequalityId::Mes1].value.abs() < 1e-12);
    }

    #[test]
    fn single_weak_coupling_trial_saturates_diagonal_bound() {
        let j = PeriodicJacobi::new(vec![0.1, 0.1], vec![0.0, 1.0]).unwrap();
        let rep = fuzz_instances([(0, j)], 1e-9, 1e-8);
        assert!(rep.is_clean());
        assert!(rep.min_slack[&InequalityId::Estb].value.abs() < 1e-12);
    }

    #[test]
    fn small_campaign_is_deterministic() {
        let cfg = FuzzConfig { trials: 200, seed: 9, ..FuzzConfig::default() };
        let x = fuzz_estimates(&cfg).unwrap();
        let y = fuzz_estimates(&cfg).unwrap();
        assert_eq!(x.to_json(), y.to_json());
        assert_eq!(x.trials_csv(), y.trials_csv());
        assert!(x.violations.is_empty(), "{:?}", x.violations);
        assert_eq!(x.trials_run, 200);
    }

    #[test]
    fn search_rejects_zero_iterations() {
        let start = default_start(InequalityId::Estc, 4).unwrap();
        assert!(matches!(sharpness_search(InequalityId::Estc, start, 0, 1), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn estb_default_start_is_already_sharp() {
        // For equal couplings the k = pi Floquet matrix is diag(b), so the
        // middle gap is exactly [min b, max b].
        let start = default_start(InequalityId::Estb, 2).unwrap();
        assert_eq!(start.a(), &[0.5, 0.5]);
        let res = sharpness_search(InequalityId::Estb, start, 200, 3).unwrap();
        assert!(res.trace.windows(2).all(|w| w[1] <= w[0]));
        assert!(res.trace[0].abs() < 1e-12);
        assert!(res.best_slack.abs() < 1e-12);
    }

    #[test]
    fn search_trace_is_monotone_and_improves() {
        let start = PeriodicJacobi::new(vec![0.5, 0.3], vec![0.0, 1.0]).unwrap();
        let res = sharpness_search(InequalityId::Estb, start, 400, 3).unwrap();
        assert!(res.trace[0] > 0.05);
        assert!(res.trace.windows(2).all(|w| w[1] <= w[0]));
        assert!(res.best_slack < 0.5 * res.trace[0], "{} vs {}", res.best_slack, res.trace[0]);
        assert!(res.best_slack >= -1e-9);
    }

    #[test]
    fn search_from_weak_bond_family() {
        let start = default_start(InequalityId::Estc, 4).unwrap();
        let res = sharpness_search(InequalityId::Estc, start, 300, 5).unwrap();
        assert!(res.trace.windows(2).all(|w| w[1] <= w[0]));
        assert!(res.best_slack <= res.trace[0]);
        assert!(res.best_slack >= -1e-9);
    }
}
