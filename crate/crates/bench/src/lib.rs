//! Fixtures shared by the benchmarks.

use idsig::presets::{reference_population, OutGroupMix};
use idsig::{IdentityProfile, Population};

/// The three reference populations plus a fully truthful one.
pub fn fixtures() -> Vec<(&'static str, Population)> {
    let accuracy_only = Population::new(
        IdentityProfile::new(0.7, 0.0, 1.0, 2.0).expect("valid profile"),
        IdentityProfile::new(0.6, 0.0, 1.0, 3.0).expect("valid profile"),
    );
    vec![
        ("high_accuracy", reference_population(OutGroupMix::HighAccuracy)),
        ("balanced", reference_population(OutGroupMix::Balanced)),
        ("low_accuracy", reference_population(OutGroupMix::LowAccuracy)),
        ("accuracy_only", accuracy_only),
    ]
}
