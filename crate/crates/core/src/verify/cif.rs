//! Numerical product integral for competing clocks in a fixed state.

use super::StepFunction;
use crate::hazard::HazardSpec;

/// Survival of "no clock has fired" and, per clock, the probability that it
/// fires first by time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct CifResult {
    pub survival: StepFunction,
    pub incidence: Vec<StepFunction>,
}

impl CifResult {
    /// Cumulative incidence of every clock at the end of the grid.
    pub fn final_incidence(&self) -> Vec<f64> {
        self.incidence
            .iter()
            .map(|f| f.values.last().copied().unwrap_or(f.before))
            .collect()
    }
}

/// Continuous hazard of one clock accumulated over `(a, b]`, by the
/// trapezoid rule on its hazard rate. Falls back to the exact integral
/// where the rate is unbounded.
fn increment(spec: &HazardSpec, enabling_time: f64, a: f64, b: f64) -> f64 {
    if b <= enabling_time {
        return 0.0;
    }
    let (ra, rb) = ((a - enabling_time).max(0.0), b - enabling_time);
    let (ha, hb) = (spec.hazard_at(ra), spec.hazard_at(rb));
    if ha.is_finite() && hb.is_finite() {
        0.5 * (ha + hb) * (rb - ra)
    } else {
        let c = spec.continuous();
        c.cumulative(rb) - c.cumulative(ra)
    }
}

/// Evaluates the competing-risks formulas on a grid from 0 to `horizon`.
///
/// Between grid points the total continuous hazard is integrated by the
/// trapezoid rule and split between clocks in proportion to their share.
/// The grid is refined to contain every atom, and an atom at `t` fires with
/// its mass times the survival just before `t`, then multiplies the
/// survival by one minus its mass.
pub fn cif_numeric(specs: &[(HazardSpec, f64)], grid_step: f64, horizon: f64) -> CifResult {
    assert!(grid_step > 0.0 && horizon >= 0.0, "grid step must be positive");
    let steps = (horizon / grid_step).ceil() as usize;
    let mut grid: Vec<f64> = (0..=steps).map(|i| (i as f64 * grid_step).min(horizon)).collect();
    let mut atoms: Vec<(f64, usize, f64)> = Vec::new();
    for (j, (spec, enabling_time)) in specs.iter().enumerate() {
        for atom in spec.atoms() {
            let t = enabling_time + atom.offset;
            if t <= horizon {
                atoms.push((t, j, atom.mass));
                grid.push(t);
            }
        }
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut survival = 1.0;
    let mut incidence = vec![0.0; specs.len()];
    let mut s_values = Vec::with_capacity(grid.len());
    let mut c_values: Vec<Vec<f64>> = vec![Vec::with_capacity(grid.len()); specs.len()];
    let mut next_atom = 0;
    let mut prev = grid[0];
    for &t in &grid {
        if t > prev {
            let parts: Vec<f64> = specs.iter().map(|(s, e)| increment(s, *e, prev, t)).collect();
            let total: f64 = parts.iter().sum();
            if total > 0.0 {
                let fired = survival * -(-total).exp_m1();
                for (c, part) in incidence.iter_mut().zip(&parts) {
                    *c += fired * part / total;
                }
                survival *= (-total).exp();
            }
        }
        // the survival at an atom is the limit from below
        let left = survival;
        while next_atom < atoms.len() && atoms[next_atom].0 <= t {
            let (_, j, mass) = atoms[next_atom];
            incidence[j] += left * mass;
            survival *= 1.0 - mass;
            next_atom += 1;
        }
        s_values.push(survival);
        for (values, c) in c_values.iter_mut().zip(&incidence) {
            values.push(*c);
        }
        prev = t;
    }
    CifResult {
        survival: StepFunction {
            before: 1.0,
            times: grid.clone(),
            values: s_values,
        },
        incidence: c_values
            .into_iter()
            .map(|values| StepFunction {
                before: 0.0,
                times: grid.clone(),
                values,
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hazard::Atom;

    #[test]
    fn single_exponential() {
        let r = cif_numeric(&[(HazardSpec::exponential(1.0).unwrap(), 0.0)], 1e-3, 40.0);
        assert!((r.survival.eval(1.0) - (-1.0f64).exp()).abs() < 1e-4);
        assert!((r.final_incidence()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_competing_risks() {
        let r = cif_numeric(
            &[
                (HazardSpec::exponential(1.0).unwrap(), 0.0),
                (HazardSpec::exponential(2.0).unwrap(), 0.0),
            ],
            1e-3,
            30.0,
        );
        assert!((r.final_incidence()[1] - 2.0 / 3.0).abs() < 1e-4);
    }

    #[test]
    fn atom_uses_left_limit() {
        let r = cif_numeric(
            &[
                (HazardSpec::exponential(std::f64::consts::LN_2).unwrap(), 0.0),
                (HazardSpec::atoms_only(vec![Atom::new(1.0, 0.5)]).unwrap(), 0.0),
            ],
            1e-4,
            60.0,
        );
        let cif = r.final_incidence();
        assert!((cif[1] - 0.25).abs() < 1e-4, "{cif:?}");
        assert!((cif[0] - 0.75).abs() < 1e-4, "{cif:?}");
        assert!((r.survival.eval(1.0) - 0.25).abs() < 1e-4);
        assert!((r.survival.eval_left(1.0) - 0.5).abs() < 1e-4);
    }

    #[test]
    fn survival_and_incidence_sum_to_one() {
        let specs = [
            (HazardSpec::weibull(2.0, 1.0).unwrap(), 0.0),
            (HazardSpec::gamma(2.0, 1.0).unwrap().with_atoms(vec![Atom::new(0.5, 0.2)]).unwrap(), 0.3),
        ];
        let r = cif_numeric(&specs, 1e-2, 5.0);
        for i in 0..r.survival.times.len() {
            let total = r.survival.values[i] + r.incidence.iter().map(|c| c.values[i]).sum::<f64>();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn halving_the_step_halves_the_error() {
        // Weibull(2, 1) survival at 1 is exp(-1); hazard 2t is linear, so the
        // trapezoid rule is exact and the split of a shared step is what errs
        let specs = [
            (HazardSpec::weibull(2.0, 1.0).unwrap(), 0.0),
            (HazardSpec::exponential(1.0).unwrap(), 0.0),
        ];
        // clock 0 fires first with probability ∫ 2t exp(-t^2 - t) dt
        let exact = {
            let n = 200_000;
            let h = 10.0 / n as f64;
            (0..n)
                .map(|i| {
                    let t = (i as f64 + 0.5) * h;
                    2.0 * t * (-t * t - t).exp() * h
                })
                .sum::<f64>()
        };
        let err = |step: f64| (cif_numeric(&specs, step, 10.0).final_incidence()[0] - exact).abs();
        let (coarse, fine) = (err(0.02), err(0.01));
        assert!(fine < coarse, "{coarse} {fine}");
    }
}
