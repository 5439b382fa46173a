use super::{guarded_clock, key, Model, ModelError};
use crate::clock::{JumpMark, SystemState};
use crate::hazard::HazardSpec;

fn site(j: usize) -> String {
    format!("site:{j}")
}

/// Tokens hopping around a ring of `sites`. Clock `j` moves one token from
/// site `j` to the next site at constant `rate` while site `j` holds any.
/// Each jump touches two sites, so only three clocks need re-evaluation.
pub fn ring(sites: usize, tokens_per_site: i64, rate: f64) -> Result<Model, ModelError> {
    let spec = HazardSpec::exponential(rate)?;
    let clocks = (0..sites)
        .map(|j| {
            let here = key(site(j));
            let next = key(site((j + 1) % sites));
            let guard_key = here.clone();
            guarded_clock(
                j,
                format!("hop:{j}"),
                vec![here.clone()],
                JumpMark::new([(here, -1), (next, 1)]),
                spec.clone(),
                move |s| s.get(guard_key.as_str()) > 0,
            )
        })
        .collect();
    let initial = SystemState::from_counts((0..sites).map(|j| (key(site(j)), tokens_per_site)));
    Model::new("ring", clocks, initial)
}
