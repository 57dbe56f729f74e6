use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::sensing::Hypothesis;

/// What a random substream is used for within one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Gains = 0,
    Channel = 1,
    DecisionsH0 = 2,
    NoiseH0 = 3,
    DecisionsH1 = 4,
    NoiseH1 = 5,
}

impl Purpose {
    pub fn decisions(h: Hypothesis) -> Self {
        match h {
            Hypothesis::H0 => Purpose::DecisionsH0,
            Hypothesis::H1 => Purpose::DecisionsH1,
        }
    }

    pub fn noise(h: Hypothesis) -> Self {
        match h {
            Hypothesis::H0 => Purpose::NoiseH0,
            Hypothesis::H1 => Purpose::NoiseH1,
        }
    }
}

const PURPOSE_BITS: u32 = 4;

/// Trial index reserved for draws shared by a whole run (e.g. fixed gains).
pub const SHARED_TRIAL: u64 = (1 << (64 - PURPOSE_BITS)) - 1;

/// Independent ChaCha stream for `(master_seed, trial, purpose)`.
///
/// The key comes from the master seed and the 64-bit stream id from the
/// trial index and purpose, so the numbers a trial sees never depend on
/// which worker runs it or in what order.
pub fn substream(master_seed: u64, trial: u64, purpose: Purpose) -> ChaCha8Rng {
    assert!(trial <= SHARED_TRIAL, "trial index {trial} out of range");
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial << PURPOSE_BITS | purpose as u64);
    rng
}
