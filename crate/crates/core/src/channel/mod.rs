//! Reporting-channel model: delay profiles, large-scale gains, fading
//! matrices and the ISI/ICI powers they induce.

mod gains;
mod interference;
mod pdp;
mod realization;

pub use gains::{draw_large_scale, mean_gain, LargeScaleGains};
pub use interference::{
    draw_interference, effective_noise_power, ici_power, isi_power, InterferencePowers,
};
pub use pdp::{PdpShape, PowerDelayProfile};
pub use realization::{
    build_channel, build_subcarrier, cross_term_gap, diagonals, draw_taps,
    favorable_propagation_gap, matrix_to_text, ChannelRealization, SubcarrierChannel, Taps,
};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

/// One `CN(0, var)` sample.
#[inline]
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R, var: f64) -> Complex64 {
    let s = (0.5 * var).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * s, im * s)
}
