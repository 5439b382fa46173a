//! Rabbits eating from a shared pile of food.
//!
//! Food arrives as a Poisson process. Rabbit `m` has one eating clock per
//! portion size `d_k`, enabled while at least `d_k` units of food are left.
//! The time to the next meal is Weibull measured from the rabbit's last
//! meal, with a scale that depends on the size of that meal.

use std::sync::Arc;

use super::{enabled, key, positive, Model, ModelError, Params, RateList};
use crate::clock::{ClockId, ClockSpec, Enabling, JumpMark, SubstateKey, SystemState};
use crate::hazard::HazardSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct RabbitsConfig {
    pub rabbits: usize,
    pub food_rate: f64,
    pub portions: Vec<i64>,
    pub initial_food: i64,
    pub shape: f64,
    /// Scale before any meal.
    pub initial_scale: f64,
    /// Scale after a meal of size `d` is `scale_per_unit * d`.
    pub scale_per_unit: f64,
}

impl Default for RabbitsConfig {
    fn default() -> Self {
        Self {
            rabbits: 2,
            food_rate: 1.0,
            portions: vec![1],
            initial_food: 0,
            shape: 2.0,
            initial_scale: 1.0,
            scale_per_unit: 1.0,
        }
    }
}

impl RabbitsConfig {
    pub(crate) fn from_params(p: &mut Params<'_>) -> Result<Self, ModelError> {
        let d = Self::default();
        let portions = p.get("portions", RateList(vec![1.0]), |r: &RateList| {
            (!r.0.is_empty() && r.0.iter().all(|x| *x >= 1.0 && x.fract() == 0.0))
                .then_some(())
                .ok_or("must be a list of positive integers")
        })?;
        Ok(Self {
            rabbits: p.get("rabbits", d.rabbits, |m: &usize| {
                (*m >= 1).then_some(()).ok_or("must be at least 1")
            })?,
            food_rate: p.get("food_rate", d.food_rate, positive)?,
            portions: portions.0.iter().map(|x| *x as i64).collect(),
            initial_food: p.get("food", d.initial_food, super::non_negative)?,
            shape: p.get("shape", d.shape, positive)?,
            initial_scale: p.get("initial_scale", d.initial_scale, positive)?,
            scale_per_unit: p.get("scale_per_unit", d.scale_per_unit, positive)?,
        })
    }
}

/// Key counting how often rabbit `m` ate portion `k`.
pub fn meals_key(m: usize, k: usize) -> String {
    format!("meals:{m}:{k}")
}

/// Clock 0 produces food; rabbit `m`, portion `k` is clock `1 + m * K + k`.
pub fn rabbits(config: &RabbitsConfig) -> Result<Model, ModelError> {
    let food = key("food");
    let food_spec = Arc::new(HazardSpec::exponential(config.food_rate)?);
    let mut clocks = vec![ClockSpec::new(
        ClockId(0),
        "food",
        vec![],
        JumpMark::new([(food.clone(), 1)]),
        move |_: &SystemState, _| enabled(&food_spec, None),
    )];

    let initial_spec = Arc::new(HazardSpec::weibull(config.shape, config.initial_scale)?);
    let after_meal: Vec<Arc<HazardSpec>> = config
        .portions
        .iter()
        .map(|&d| HazardSpec::weibull(config.shape, config.scale_per_unit * d as f64).map(Arc::new))
        .collect::<Result<_, _>>()?;
    let after_meal = Arc::new(after_meal);

    for m in 0..config.rabbits {
        let meals: Arc<Vec<SubstateKey>> =
            Arc::new((0..config.portions.len()).map(|k| key(meals_key(m, k))).collect());
        for (k, &portion) in config.portions.iter().enumerate() {
            let mut reads = vec![food.clone()];
            reads.extend(meals.iter().cloned());
            let (food, meals, after_meal, initial_spec) =
                (food.clone(), meals.clone(), after_meal.clone(), initial_spec.clone());
            clocks.push(ClockSpec::new(
                ClockId::from_index(clocks.len()),
                format!("eat:{m}:{k}"),
                reads,
                JumpMark::new([(food.clone(), -portion), (meals[k].clone(), 1)]),
                move |state: &SystemState, _| {
                    if state.get(food.as_str()) < portion {
                        return Enabling::Disabled;
                    }
                    // the most recent meal sets both the scale and the enabling time
                    let last = meals
                        .iter()
                        .enumerate()
                        .filter_map(|(j, key)| state.changed_at(key.as_str()).map(|t| (t, j)))
                        .max_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)));
                    match last {
                        Some((t, j)) => enabled(&after_meal[j], Some(t)),
                        None => enabled(&initial_spec, Some(0.0)),
                    }
                },
            ));
        }
    }
    let initial = SystemState::from_counts([(food.clone(), config.initial_food)]);
    Model::new("rabbits", clocks, initial)
}
