//! Reference populations used by the heatmap sweeps and the examples.
//!
//! Both types share `in_group_penalty = 1`; the out-group penalty is 2 for
//! type A and 3.5 for type B. Type A weighs accuracy 0.55 and identity 0.45.
//! The three variants differ in type B's weights.

use rand::Rng;
use serde::Serialize;

use crate::model::{IdentityProfile, Population};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum OutGroupMix {
    /// Type B weighs accuracy 0.6, identity 0.4.
    HighAccuracy,
    /// Type B weighs accuracy 0.55, identity 0.45.
    Balanced,
    /// Type B weighs accuracy 0.4, identity 0.6.
    LowAccuracy,
}

impl OutGroupMix {
    pub const ALL: [OutGroupMix; 3] = [OutGroupMix::HighAccuracy, OutGroupMix::Balanced, OutGroupMix::LowAccuracy];

    pub fn weights(&self) -> (f64, f64) {
        match self {
            OutGroupMix::HighAccuracy => (0.6, 0.4),
            OutGroupMix::Balanced => (0.55, 0.45),
            OutGroupMix::LowAccuracy => (0.4, 0.6),
        }
    }
}

pub fn reference_population(mix: OutGroupMix) -> Population {
    let (la_b, ls_b) = mix.weights();
    Population::new(
        IdentityProfile::new(0.55, 0.45, 1.0, 2.0).expect("valid preset"),
        IdentityProfile::new(la_b, ls_b, 1.0, 3.5).expect("valid preset"),
    )
}

/// The balanced variant; its equilibrium has `Q = 3 + 1/1.025`.
pub fn balanced() -> Population {
    reference_population(OutGroupMix::Balanced)
}

/// Random population satisfying the out-group >= in-group restriction:
/// weights uniform on `[0, 1]`, in-group penalty uniform on `[0, 2]`,
/// out-group penalty the in-group penalty plus uniform on `[0, 3]`.
pub fn random_restricted_population<R: Rng + ?Sized>(rng: &mut R) -> Population {
    let mut profile = || {
        let la = rng.random::<f64>();
        let ls = rng.random::<f64>();
        let di = 2.0 * rng.random::<f64>();
        let d_o = di + 3.0 * rng.random::<f64>();
        IdentityProfile::new(la, ls, di, d_o).expect("sampled profile is valid")
    };
    let profile_a = profile();
    let profile_b = profile();
    Population::new(profile_a, profile_b)
}
