use num_complex::Complex;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::rng::{seeded, stream};
use crate::scalar::{norm2_sqr, Real};

/// Delays and amplitudes of the static ATTC test channel.
pub const ATTC_TAPS: [(usize, f64); 6] = [
    (0, 1.0),
    (2, 0.3162),
    (17, 0.1995),
    (36, 0.1296),
    (75, 0.1),
    (137, 0.1),
];

/// Length-`n` impulse response of the ATTC channel.
pub fn attc_channel<T: Real>(n: usize) -> Result<Vec<Complex<T>>> {
    let last = ATTC_TAPS[ATTC_TAPS.len() - 1].0;
    if n <= last {
        return Err(Error::InvalidParameter(format!(
            "ATTC channel needs n >= {} (got {n})",
            last + 1
        )));
    }
    let mut x = vec![Complex::new(T::zero(), T::zero()); n];
    for (delay, amp) in ATTC_TAPS {
        x[delay] = Complex::new(T::lit(amp), T::zero());
    }
    Ok(x)
}

/// Per-entry noise variance `‖y‖² / (m · 10^(snr/10))`.
pub fn noise_variance<T: Real>(y: &[Complex<T>], snr_db: f64) -> f64 {
    norm2_sqr(y).as_f64() / (y.len() as f64 * 10f64.powf(snr_db / 10.0))
}

/// Adds circular complex Gaussian noise at `snr_db` relative to the mean
/// received power of `y`. `snr_db = +∞` returns `y` unchanged.
///
/// The noise shape depends only on `seed`, so sweeping `snr_db` at a fixed
/// seed rescales one noise realization.
pub fn add_awgn<T: Real>(y: &[Complex<T>], snr_db: f64, seed: u64) -> Vec<Complex<T>> {
    if snr_db == f64::INFINITY {
        return y.to_vec();
    }
    let sigma = (noise_variance(y, snr_db) / 2.0).sqrt();
    let mut rng = seeded(seed, stream::NOISE);
    y.iter()
        .map(|&v| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            v + Complex::new(T::lit(re * sigma), T::lit(im * sigma))
        })
        .collect()
}
