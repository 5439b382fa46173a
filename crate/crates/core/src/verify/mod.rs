//! Oracles and statistics used to check the samplers: Nelson-Aalen
//! estimation, a numerical product integral for competing clocks, a
//! brute-force Markov-chain solver, and goodness-of-fit tests.

mod cif;
mod ctmc;
mod stats;
pub mod suite;

use thiserror::Error;

use crate::clock::{ClockError, ClockId};

pub use cif::{cif_numeric, CifResult};
pub use ctmc::{ctmc_oracle, CtmcOracle, Occupancy};
pub use stats::{
    chi_square, chi_square_homogeneity, ks_statistic, ks_two_sample, kolmogorov_survival,
    total_variation, TestResult,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("need at least {needed} observations, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("more than {limit} reachable states")]
    StateSpaceTooLarge { limit: usize },
    #[error("clock {clock} is not exponential in a reachable state")]
    NonExponentialClock { clock: ClockId },
    #[error(transparent)]
    Clock(#[from] ClockError),
}

/// Right-continuous step function: `values[i]` holds on `[times[i], times[i+1])`
/// and `before` holds left of `times[0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    pub before: f64,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl StepFunction {
    pub fn eval(&self, t: f64) -> f64 {
        match self.times.partition_point(|&x| x <= t) {
            0 => self.before,
            i => self.values[i - 1],
        }
    }

    /// Limit from the left at `t`.
    pub fn eval_left(&self, t: f64) -> f64 {
        match self.times.partition_point(|&x| x < t) {
            0 => self.before,
            i => self.values[i - 1],
        }
    }

    /// `sup |self - f|` over `[lo, hi]` for continuous monotone `f`, which is
    /// attained at a jump or an end point.
    pub fn sup_distance(&self, f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
        self.sup_distance_with_jumps(&f, &f, lo, hi)
    }

    /// As [`StepFunction::sup_distance`] for a monotone right-continuous `f`
    /// whose left limits are given by `f_left`. Every jump of `f` in the
    /// range must also be a jump time of `self`.
    pub fn sup_distance_with_jumps(
        &self,
        f: impl Fn(f64) -> f64,
        f_left: impl Fn(f64) -> f64,
        lo: f64,
        hi: f64,
    ) -> f64 {
        let mut worst = (self.eval(lo) - f(lo)).abs().max((self.eval_left(hi) - f_left(hi)).abs());
        worst = worst.max((self.eval(hi) - f(hi)).abs());
        for &t in self.times.iter().filter(|&&t| t > lo && t <= hi) {
            worst = worst
                .max((self.eval_left(t) - f_left(t)).abs())
                .max((self.eval(t) - f(t)).abs());
        }
        worst
    }
}

/// A duration that ended either in the event of interest or in censoring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CensoredSample {
    pub duration: f64,
    pub observed: bool,
}

impl CensoredSample {
    pub fn event(duration: f64) -> Self {
        Self {
            duration,
            observed: true,
        }
    }

    pub fn censored(duration: f64) -> Self {
        Self {
            duration,
            observed: false,
        }
    }
}

/// Nelson-Aalen estimate of the cumulative hazard: at each event time the
/// estimate jumps by the number of events over the number still at risk
/// just before it.
pub fn nelson_aalen(samples: &[CensoredSample]) -> StepFunction {
    let mut sorted: Vec<CensoredSample> = samples.to_vec();
    sorted.sort_by(|a, b| a.duration.total_cmp(&b.duration));
    let mut times = Vec::new();
    let mut values = Vec::new();
    let mut cumulative = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let t = sorted[i].duration;
        let at_risk = sorted.len() - i;
        let mut events = 0usize;
        while i < sorted.len() && sorted[i].duration == t {
            events += usize::from(sorted[i].observed);
            i += 1;
        }
        if events > 0 {
            cumulative += events as f64 / at_risk as f64;
            times.push(t);
            values.push(cumulative);
        }
    }
    StepFunction {
        before: 0.0,
        times,
        values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::ClockRng;

    #[test]
    fn estimator_definition() {
        let h = nelson_aalen(&[CensoredSample::event(1.0), CensoredSample::event(2.0)]);
        assert_eq!(h.eval(0.5), 0.0);
        assert_eq!(h.eval(1.0), 0.5);
        assert_eq!(h.eval(2.0), 1.5);

        let none = nelson_aalen(&[CensoredSample::censored(1.0), CensoredSample::censored(3.0)]);
        assert!(none.times.is_empty());
        assert_eq!(none.eval(10.0), 0.0);

        // a censored duration leaves the risk set without a jump
        let mixed = nelson_aalen(&[
            CensoredSample::event(1.0),
            CensoredSample::censored(1.5),
            CensoredSample::event(2.0),
        ]);
        assert!((mixed.eval(2.0) - (1.0 / 3.0 + 1.0)).abs() < 1e-15);
    }

    #[test]
    fn exponential_draws_recover_linear_hazard() {
        let mut rng = ClockRng::from_seed(0x4e41);
        let samples: Vec<_> = (0..100_000)
            .map(|_| CensoredSample::event(-(-rng.uniform()).ln_1p()))
            .collect();
        let h = nelson_aalen(&samples);
        assert!(h.sup_distance(|t| t, 0.0, 1.0) < 0.05);
    }

    #[test]
    fn sup_distance_sees_both_sides_of_a_jump() {
        let f = StepFunction {
            before: 0.0,
            times: vec![0.5],
            values: vec![1.0],
        };
        assert!((f.sup_distance(|t| t, 0.0, 1.0) - 0.5).abs() < 1e-15);
    }
}
