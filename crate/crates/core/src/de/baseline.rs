use rand::seq::index;

use crate::objective::ScheduleMask;
use crate::rng::StreamRng;

/// Uniformly random N-subset of the K UEs: the FedAvg benchmark's scheduling rule.
pub fn random_schedule(k: usize, n: usize, rng: &mut StreamRng) -> ScheduleMask {
    assert!(n <= k, "cannot schedule {n} of {k} UEs");
    let mut bits = vec![false; k];
    for id in index::sample(rng, k, n) {
        bits[id] = true;
    }
    ScheduleMask::new(bits)
}
