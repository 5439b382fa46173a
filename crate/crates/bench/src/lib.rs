//! Fixtures shared by the benchmarks.

use clockrace_core::{Kernel, Model, ModelConfig, SamplerKind};

/// A ring of `sites` clocks, one token per site.
pub fn ring(sites: usize) -> Model {
    ModelConfig::new("ring").param("sites", sites).build().expect("valid ring")
}

/// A kernel that has already taken `warmup` steps, so that measurements see
/// a steady-state queue rather than the initial one.
pub fn warmed<'m>(model: &'m Model, kind: &SamplerKind, warmup: usize) -> Kernel<'m> {
    let mut kernel = Kernel::new(model, kind, 1).expect("kernel starts");
    for _ in 0..warmup {
        kernel.step(f64::INFINITY).expect("ring never stalls");
    }
    kernel
}
