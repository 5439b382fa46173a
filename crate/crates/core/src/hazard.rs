//! Hazard specifications with a continuous part and a finite list of atoms.
//!
//! A [`HazardSpec`] describes the intensity of one clock between two system
//! jumps, measured in time since the clock's enabling time. The continuous
//! part is one of a small set of parametric families; the atomic part is a
//! sorted list of point masses, each of which multiplies the survival by
//! `1 - mass` when it is passed.
//!
//! Every family supports the three operations the samplers need:
//!
//! 1. [`HazardSpec::sample_first`]: draw a putative firing time by inversion
//!    and report the log-survival that was drawn.
//! 2. [`HazardSpec::invert_conditional`]: given a starting offset and a
//!    remaining log-survival budget, find when the budget runs out.
//! 3. [`HazardSpec::time_process`]: the hazard consumed over an interval.
//!
//! The time process is defined so that `survival(t) = exp(-time_process(0, t))`
//! holds identically, atoms included.

use std::fmt;
use std::str::FromStr;

use statrs::function::gamma::{gamma_lr, gamma_ur, ln_gamma};
use thiserror::Error;

/// Relative time tolerance for numerical inversion.
const INVERSION_TOLERANCE: f64 = 1e-12;
const INVERSION_MAX_ITERATIONS: usize = 200;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HazardError {
    #[error("invalid parameter `{name}` = {value} for {family}: {reason}")]
    InvalidParameter {
        family: &'static str,
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("atom {index}: {reason}")]
    InvalidAtom { index: usize, reason: &'static str },
    #[error("piecewise hazard: {0}")]
    InvalidPiecewise(&'static str),
    #[error("cannot parse hazard `{input}`: {reason}")]
    Parse { input: String, reason: String },
}

/// A point mass in the hazard, `offset` time units after enabling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub offset: f64,
    pub mass: f64,
}

impl Atom {
    pub fn new(offset: f64, mass: f64) -> Self {
        Self { offset, mass }
    }

    /// Hazard consumed by passing this atom, `-ln(1 - mass)`; infinite for mass 1.
    pub fn consumed(&self) -> f64 {
        -(-self.mass).ln_1p()
    }
}

/// Natural log of a survival probability. Always `<= 0`; `-inf` means the
/// survival is exhausted.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogSurvival(f64);

impl LogSurvival {
    pub const ZERO: LogSurvival = LogSurvival(0.0);

    /// Panics if `value` is positive or NaN.
    pub fn new(value: f64) -> Self {
        assert!(value <= 0.0, "log-survival must be non-positive, got {value}");
        Self(value)
    }

    /// The log-survival `ln(1 - u)` associated with a uniform variate `u`.
    pub fn from_uniform(u: f64) -> Self {
        Self::new((-u).ln_1p())
    }

    /// A log-survival whose budget (the hazard it takes to reach it) is `budget`.
    pub fn from_budget(budget: f64) -> Self {
        Self::new(-budget.max(0.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// The hazard needed to bring survival from 1 down to this value.
    pub fn budget(self) -> f64 {
        -self.0
    }

    pub fn survival(self) -> f64 {
        self.0.exp()
    }
}

/// Piecewise-constant hazard: `rates[i]` applies on `[breakpoints[i], breakpoints[i+1])`,
/// the last rate applies forever.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseConstant {
    breakpoints: Vec<f64>,
    rates: Vec<f64>,
    cumulative: Vec<f64>,
}

impl PiecewiseConstant {
    pub fn new(breakpoints: Vec<f64>, rates: Vec<f64>) -> Result<Self, HazardError> {
        if breakpoints.is_empty() {
            return Err(HazardError::InvalidPiecewise("needs at least one piece"));
        }
        if breakpoints.len() != rates.len() {
            return Err(HazardError::InvalidPiecewise(
                "breakpoints and rates differ in length",
            ));
        }
        if breakpoints[0] != 0.0 {
            return Err(HazardError::InvalidPiecewise("first breakpoint must be 0"));
        }
        if breakpoints
            .windows(2)
            .any(|w| !(w[1] > w[0]) || !w[1].is_finite())
        {
            return Err(HazardError::InvalidPiecewise(
                "breakpoints must be finite and strictly increasing",
            ));
        }
        if rates.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
            return Err(HazardError::InvalidPiecewise(
                "rates must be finite and non-negative",
            ));
        }
        let mut cumulative = Vec::with_capacity(rates.len());
        let mut acc = 0.0;
        cumulative.push(0.0);
        for i in 1..breakpoints.len() {
            acc += rates[i - 1] * (breakpoints[i] - breakpoints[i - 1]);
            cumulative.push(acc);
        }
        Ok(Self {
            breakpoints,
            rates,
            cumulative,
        })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    fn piece(&self, t: f64) -> usize {
        self.breakpoints.partition_point(|&b| b <= t).saturating_sub(1)
    }

    fn cumulative(&self, t: f64) -> f64 {
        let i = self.piece(t);
        self.cumulative[i] + self.rates[i] * (t - self.breakpoints[i])
    }

    fn hazard(&self, t: f64) -> f64 {
        self.rates[self.piece(t)]
    }

    fn inverse(&self, target: f64) -> f64 {
        // first piece whose end reaches the target
        for i in 0..self.breakpoints.len() {
            let end = match self.cumulative.get(i + 1) {
                Some(&c) => c,
                None if self.rates[i] > 0.0 => f64::INFINITY,
                None => self.cumulative[i],
            };
            if end >= target {
                if self.rates[i] == 0.0 {
                    return self.breakpoints[i];
                }
                let t = self.breakpoints[i] + (target - self.cumulative[i]) / self.rates[i];
                return match self.breakpoints.get(i + 1) {
                    Some(&next) => t.min(next),
                    None => t,
                };
            }
        }
        f64::INFINITY
    }
}

/// Continuous part of a hazard, as a function of time since enabling.
#[derive(Debug, Clone, PartialEq)]
pub enum ContinuousHazard {
    None,
    Exponential { rate: f64 },
    Weibull { shape: f64, scale: f64 },
    Gamma { shape: f64, rate: f64 },
    /// Uniform firing time on `[a, b)`; the hazard diverges at `b`.
    UniformInterval { a: f64, b: f64 },
    PiecewiseConstant(PiecewiseConstant),
}

fn positive(family: &'static str, name: &'static str, value: f64) -> Result<(), HazardError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(HazardError::InvalidParameter {
            family,
            name,
            value,
            reason: "must be finite and positive",
        })
    }
}

impl ContinuousHazard {
    pub fn family(&self) -> &'static str {
        match self {
            ContinuousHazard::None => "none",
            ContinuousHazard::Exponential { .. } => "exponential",
            ContinuousHazard::Weibull { .. } => "weibull",
            ContinuousHazard::Gamma { .. } => "gamma",
            ContinuousHazard::UniformInterval { .. } => "uniform",
            ContinuousHazard::PiecewiseConstant(_) => "piecewise",
        }
    }

    fn validate(&self) -> Result<(), HazardError> {
        match *self {
            ContinuousHazard::None | ContinuousHazard::PiecewiseConstant(_) => Ok(()),
            ContinuousHazard::Exponential { rate } => {
                if rate.is_finite() && rate >= 0.0 {
                    Ok(())
                } else {
                    Err(HazardError::InvalidParameter {
                        family: "exponential",
                        name: "rate",
                        value: rate,
                        reason: "must be finite and non-negative",
                    })
                }
            }
            ContinuousHazard::Weibull { shape, scale } => {
                positive("weibull", "shape", shape)?;
                positive("weibull", "scale", scale)
            }
            ContinuousHazard::Gamma { shape, rate } => {
                positive("gamma", "shape", shape)?;
                positive("gamma", "rate", rate)
            }
            ContinuousHazard::UniformInterval { a, b } => {
                if !(a.is_finite() && a >= 0.0) {
                    return Err(HazardError::InvalidParameter {
                        family: "uniform",
                        name: "a",
                        value: a,
                        reason: "must be finite and non-negative",
                    });
                }
                if !(b.is_finite() && b > a) {
                    return Err(HazardError::InvalidParameter {
                        family: "uniform",
                        name: "b",
                        value: b,
                        reason: "must be finite and greater than a",
                    });
                }
                Ok(())
            }
        }
    }

    /// Integrated continuous hazard from 0 to `t`.
    pub fn cumulative(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self {
            ContinuousHazard::None => 0.0,
            ContinuousHazard::Exponential { rate } => rate * t,
            ContinuousHazard::Weibull { shape, scale } => (t / scale).powf(*shape),
            ContinuousHazard::Gamma { shape, rate } => {
                let x = rate * t;
                let lower = gamma_lr(*shape, x);
                if lower < 0.5 {
                    -(-lower).ln_1p()
                } else {
                    -gamma_ur(*shape, x).ln()
                }
            }
            ContinuousHazard::UniformInterval { a, b } => {
                if t <= *a {
                    0.0
                } else if t >= *b {
                    f64::INFINITY
                } else {
                    -(-(t - a) / (b - a)).ln_1p()
                }
            }
            ContinuousHazard::PiecewiseConstant(pc) => pc.cumulative(t),
        }
    }

    /// Hazard rate at `t` (time since enabling).
    pub fn hazard(&self, t: f64) -> f64 {
        let t = t.max(0.0);
        match self {
            ContinuousHazard::None => 0.0,
            ContinuousHazard::Exponential { rate } => *rate,
            ContinuousHazard::Weibull { shape, scale } => {
                if t == 0.0 {
                    return if *shape < 1.0 {
                        f64::INFINITY
                    } else if *shape == 1.0 {
                        1.0 / scale
                    } else {
                        0.0
                    };
                }
                shape / scale * (t / scale).powf(shape - 1.0)
            }
            ContinuousHazard::Gamma { shape, rate } => {
                if t == 0.0 {
                    return if *shape < 1.0 {
                        f64::INFINITY
                    } else if *shape == 1.0 {
                        *rate
                    } else {
                        0.0
                    };
                }
                let x = rate * t;
                let ln_density =
                    shape * rate.ln() + (shape - 1.0) * t.ln() - x - ln_gamma(*shape);
                let ln_survival = -self.cumulative(t);
                (ln_density - ln_survival).exp()
            }
            ContinuousHazard::UniformInterval { a, b } => {
                if t < *a {
                    0.0
                } else if t >= *b {
                    f64::INFINITY
                } else {
                    1.0 / (b - t)
                }
            }
            ContinuousHazard::PiecewiseConstant(pc) => pc.hazard(t),
        }
    }

    /// Smallest `t >= 0` with `cumulative(t) >= target`, or `+inf`.
    pub fn inverse_cumulative(&self, target: f64) -> f64 {
        if target <= 0.0 {
            return 0.0;
        }
        match self {
            ContinuousHazard::None => f64::INFINITY,
            ContinuousHazard::Exponential { rate } => {
                if *rate == 0.0 {
                    f64::INFINITY
                } else {
                    target / rate
                }
            }
            ContinuousHazard::Weibull { shape, scale } => scale * target.powf(1.0 / shape),
            ContinuousHazard::Gamma { rate, shape } => {
                if target.is_infinite() {
                    return f64::INFINITY;
                }
                self.numeric_inverse(target, (shape + target) / rate)
            }
            ContinuousHazard::UniformInterval { a, b } => {
                if target.is_infinite() {
                    *b
                } else {
                    // invert the survival (b - t) / (b - a) = exp(-target) directly
                    (a + (b - a) * -(-target).exp_m1()).min(*b)
                }
            }
            ContinuousHazard::PiecewiseConstant(pc) => pc.inverse(target),
        }
    }

    /// Bracketed bisection with safeguarded Newton steps on the cumulative hazard.
    fn numeric_inverse(&self, target: f64, guess: f64) -> f64 {
        let mut lo = 0.0;
        let mut hi = guess.max(f64::MIN_POSITIVE);
        let mut expansions = 0;
        while self.cumulative(hi) < target {
            lo = hi;
            hi *= 2.0;
            expansions += 1;
            if !hi.is_finite() || expansions > 2000 {
                return f64::INFINITY;
            }
        }
        let mut t = 0.5 * (lo + hi);
        for _ in 0..INVERSION_MAX_ITERATIONS {
            let residual = self.cumulative(t) - target;
            if residual == 0.0 {
                return t;
            }
            if residual < 0.0 {
                lo = t;
            } else {
                hi = t;
            }
            if hi - lo <= INVERSION_TOLERANCE * hi {
                break;
            }
            let slope = self.hazard(t);
            let newton = t - residual / slope;
            t = if slope.is_finite() && slope > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
        }
        hi
    }
}

/// A clock's hazard between system jumps: continuous curve plus atoms, both
/// measured from the clock's enabling time.
#[derive(Debug, Clone, PartialEq)]
pub struct HazardSpec {
    continuous: ContinuousHazard,
    atoms: Vec<Atom>,
}

impl HazardSpec {
    pub fn new(continuous: ContinuousHazard, atoms: Vec<Atom>) -> Result<Self, HazardError> {
        continuous.validate()?;
        for (index, atom) in atoms.iter().enumerate() {
            if !(atom.offset.is_finite() && atom.offset >= 0.0) {
                return Err(HazardError::InvalidAtom {
                    index,
                    reason: "offset must be finite and non-negative",
                });
            }
            if !(atom.mass > 0.0 && atom.mass <= 1.0) {
                return Err(HazardError::InvalidAtom {
                    index,
                    reason: "mass must lie in (0, 1]",
                });
            }
            if index > 0 && !(atom.offset > atoms[index - 1].offset) {
                return Err(HazardError::InvalidAtom {
                    index,
                    reason: "offsets must be strictly increasing",
                });
            }
            if atom.mass == 1.0 && index + 1 != atoms.len() {
                return Err(HazardError::InvalidAtom {
                    index,
                    reason: "an atom of mass 1 must be the last atom",
                });
            }
        }
        Ok(Self { continuous, atoms })
    }

    pub fn exponential(rate: f64) -> Result<Self, HazardError> {
        Self::new(ContinuousHazard::Exponential { rate }, Vec::new())
    }

    pub fn weibull(shape: f64, scale: f64) -> Result<Self, HazardError> {
        Self::new(ContinuousHazard::Weibull { shape, scale }, Vec::new())
    }

    pub fn gamma(shape: f64, rate: f64) -> Result<Self, HazardError> {
        Self::new(ContinuousHazard::Gamma { shape, rate }, Vec::new())
    }

    pub fn uniform(a: f64, b: f64) -> Result<Self, HazardError> {
        Self::new(ContinuousHazard::UniformInterval { a, b }, Vec::new())
    }

    pub fn piecewise(breakpoints: Vec<f64>, rates: Vec<f64>) -> Result<Self, HazardError> {
        Self::new(
            ContinuousHazard::PiecewiseConstant(PiecewiseConstant::new(breakpoints, rates)?),
            Vec::new(),
        )
    }

    pub fn atoms_only(atoms: Vec<Atom>) -> Result<Self, HazardError> {
        Self::new(ContinuousHazard::None, atoms)
    }

    /// Same continuous part with `atoms` attached.
    pub fn with_atoms(self, atoms: Vec<Atom>) -> Result<Self, HazardError> {
        Self::new(self.continuous, atoms)
    }

    pub fn continuous(&self) -> &ContinuousHazard {
        &self.continuous
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// True when the hazard is the same constant at every time after enabling.
    pub fn is_constant(&self) -> bool {
        self.atoms.is_empty()
            && matches!(
                self.continuous,
                ContinuousHazard::Exponential { .. } | ContinuousHazard::None
            )
    }

    /// The constant rate when [`is_constant`](Self::is_constant) holds.
    pub fn constant_rate(&self) -> Option<f64> {
        if !self.atoms.is_empty() {
            return None;
        }
        match self.continuous {
            ContinuousHazard::Exponential { rate } => Some(rate),
            ContinuousHazard::None => Some(0.0),
            _ => None,
        }
    }

    /// Routing key used by hierarchical partitions: `atomic` when atoms are
    /// present, otherwise the continuous family name.
    pub fn family_key(&self) -> &'static str {
        if self.atoms.is_empty() {
            self.continuous.family()
        } else {
            "atomic"
        }
    }

    /// Continuous hazard rate at `t` time units after enabling.
    pub fn hazard_at(&self, t: f64) -> f64 {
        self.continuous.hazard(t)
    }

    /// `exp(-∫₀ᵗ h) · Π_{offset ≤ t} (1 - mass)`; right-continuous.
    pub fn survival(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 1.0;
        }
        let mut s = (-self.continuous.cumulative(t)).exp();
        for atom in self.atoms.iter().take_while(|a| a.offset <= t) {
            s *= 1.0 - atom.mass;
        }
        s
    }

    /// Left limit of the survival at `t`.
    pub fn survival_left(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 1.0;
        }
        let mut s = (-self.continuous.cumulative(t)).exp();
        for atom in self.atoms.iter().take_while(|a| a.offset < t) {
            s *= 1.0 - atom.mass;
        }
        s
    }

    /// Hazard consumed over `(t1, t2]`: `∫ h - Σ ln(1 - mass)`.
    ///
    /// Equals `-ln(survival(t2) / survival(t1))` and is `+inf` when a
    /// mass-1 atom lies in the interval.
    pub fn time_process(&self, t1: f64, t2: f64) -> f64 {
        if t2 <= t1 {
            return 0.0;
        }
        let upper = self.continuous.cumulative(t2);
        let lower = self.continuous.cumulative(t1);
        let continuous = if upper.is_infinite() || lower.is_infinite() {
            f64::INFINITY
        } else {
            (upper - lower).max(0.0)
        };
        continuous
            + self
                .next_atoms(t1, t2)
                .iter()
                .map(Atom::consumed)
                .sum::<f64>()
    }

    /// Atoms with offset in `(t1, t2]`, in order.
    pub fn next_atoms(&self, t1: f64, t2: f64) -> &[Atom] {
        let start = self.atoms.partition_point(|a| a.offset <= t1);
        let end = self.atoms.partition_point(|a| a.offset <= t2);
        &self.atoms[start..end.max(start)]
    }

    /// First draw by inversion. Returns the putative offset since enabling
    /// (possibly `+inf`) and the log-survival `ln(1 - u)` that was drawn.
    pub fn sample_first(&self, u: f64) -> (f64, LogSurvival) {
        let drawn = LogSurvival::from_uniform(u);
        (self.invert_conditional(0.0, drawn), drawn)
    }

    /// Smallest `t >= shift` with `time_process(shift, t) >= -required`, or `+inf`.
    pub fn invert_conditional(&self, shift: f64, required: LogSurvival) -> f64 {
        let budget = required.budget();
        if budget <= 0.0 {
            return shift;
        }
        let base = self.continuous.cumulative(shift);
        if base.is_infinite() {
            return shift;
        }
        let mut atom_consumed = 0.0;
        for atom in &self.atoms[self.atoms.partition_point(|a| a.offset <= shift)..] {
            let t = self
                .continuous
                .inverse_cumulative(base + (budget - atom_consumed));
            if t <= atom.offset {
                return t.max(shift);
            }
            let at_atom = (self.continuous.cumulative(atom.offset) - base) + atom_consumed;
            if at_atom + atom.consumed() >= budget {
                return atom.offset;
            }
            atom_consumed += atom.consumed();
        }
        self.continuous
            .inverse_cumulative(base + (budget - atom_consumed))
            .max(shift)
    }
}

impl From<ContinuousHazard> for HazardSpec {
    fn from(continuous: ContinuousHazard) -> Self {
        Self {
            continuous,
            atoms: Vec::new(),
        }
    }
}

impl fmt::Display for HazardSpec {
    /// Config syntax: `family(p1,p2,...)` optionally followed by `+atom(offset,mass)` terms.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        match &self.continuous {
            ContinuousHazard::None => {
                if self.atoms.is_empty() {
                    write!(f, "none")?;
                    wrote = true;
                }
            }
            ContinuousHazard::Exponential { rate } => {
                write!(f, "exponential({rate})")?;
                wrote = true;
            }
            ContinuousHazard::Weibull { shape, scale } => {
                write!(f, "weibull({shape},{scale})")?;
                wrote = true;
            }
            ContinuousHazard::Gamma { shape, rate } => {
                write!(f, "gamma({shape},{rate})")?;
                wrote = true;
            }
            ContinuousHazard::UniformInterval { a, b } => {
                write!(f, "uniform({a},{b})")?;
                wrote = true;
            }
            ContinuousHazard::PiecewiseConstant(pc) => {
                write!(f, "piecewise(")?;
                for (i, (b, r)) in pc.breakpoints.iter().zip(&pc.rates).enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{b},{r}")?;
                }
                write!(f, ")")?;
                wrote = true;
            }
        }
        for atom in &self.atoms {
            if wrote {
                write!(f, "+")?;
            }
            write!(f, "atom({},{})", atom.offset, atom.mass)?;
            wrote = true;
        }
        Ok(())
    }
}

impl FromStr for HazardSpec {
    type Err = HazardError;

    fn from_str(input: &str) -> Result<Self, Self::Err> {
        let fail = |reason: String| HazardError::Parse {
            input: input.to_string(),
            reason,
        };
        let mut continuous = ContinuousHazard::None;
        let mut atoms = Vec::new();
        for (i, term) in input.split('+').enumerate() {
            let term = term.trim();
            let (name, args) = match term.find('(') {
                Some(open) => {
                    let close = term
                        .strip_suffix(')')
                        .ok_or_else(|| fail(format!("missing `)` in `{term}`")))?;
                    let args = close[open + 1..]
                        .split(',')
                        .filter(|s| !s.trim().is_empty())
                        .map(|s| {
                            s.trim()
                                .parse::<f64>()
                                .map_err(|e| fail(format!("bad number `{}`: {e}", s.trim())))
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    (term[..open].trim().to_ascii_lowercase(), args)
                }
                None => (term.to_ascii_lowercase(), Vec::new()),
            };
            let arity = |n: usize| {
                if args.len() == n {
                    Ok(())
                } else {
                    Err(fail(format!(
                        "`{name}` takes {n} parameters, got {}",
                        args.len()
                    )))
                }
            };
            if name == "atom" {
                arity(2)?;
                atoms.push(Atom::new(args[0], args[1]));
                continue;
            }
            if i > 0 {
                return Err(fail("only atoms may follow the continuous family".into()));
            }
            continuous = match name.as_str() {
                "none" => {
                    arity(0)?;
                    ContinuousHazard::None
                }
                "exponential" | "exp" => {
                    arity(1)?;
                    ContinuousHazard::Exponential { rate: args[0] }
                }
                "weibull" => {
                    arity(2)?;
                    ContinuousHazard::Weibull {
                        shape: args[0],
                        scale: args[1],
                    }
                }
                "gamma" => {
                    arity(2)?;
                    ContinuousHazard::Gamma {
                        shape: args[0],
                        rate: args[1],
                    }
                }
                "uniform" => {
                    arity(2)?;
                    ContinuousHazard::UniformInterval {
                        a: args[0],
                        b: args[1],
                    }
                }
                "piecewise" => {
                    if args.is_empty() || args.len() % 2 != 0 {
                        return Err(fail(
                            "piecewise takes breakpoint,rate pairs".to_string(),
                        ));
                    }
                    let breakpoints = args.iter().step_by(2).copied().collect();
                    let rates = args.iter().skip(1).step_by(2).copied().collect();
                    ContinuousHazard::PiecewiseConstant(PiecewiseConstant::new(
                        breakpoints,
                        rates,
                    )?)
                }
                other => return Err(fail(format!("unknown family `{other}`"))),
            };
        }
        HazardSpec::new(continuous, atoms)
    }
}
