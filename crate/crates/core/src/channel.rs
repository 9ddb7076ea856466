//! Rayleigh fading draws, SINR evaluation, and the order-statistic CDFs of
//! min/max channel gains.

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("channel gain must be finite and nonnegative, got {0}")]
    BadGain(f64),
    #[error("distance must be finite and positive, got {0}")]
    BadDistance(f64),
    #[error("transmit power must be positive, got {0}")]
    BadPower(f64),
    #[error("noise power must be nonnegative, got {0}")]
    BadNoise(f64),
}

/// Squared channel magnitude |h|².
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct ChannelGain(f64);

impl ChannelGain {
    pub fn new(value: f64) -> Result<ChannelGain, ChannelError> {
        if value.is_finite() && value >= 0.0 {
            Ok(ChannelGain(value))
        } else {
            Err(ChannelError::BadGain(value))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Draws |h|² ~ Exp(1) by inverting the CDF of one uniform draw.
#[inline]
pub fn sample_gain<R: Rng + ?Sized>(rng: &mut R) -> ChannelGain {
    let u: f64 = rng.gen();
    // u ∈ [0, 1), so -ln(1 - u) is finite and ≥ 0
    ChannelGain(-(-u).ln_1p())
}

/// A concurrent noise transmitter as seen by one receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interferer {
    pub gain: ChannelGain,
    pub distance: f64,
}

impl Interferer {
    pub fn new(gain: ChannelGain, distance: f64) -> Result<Interferer, ChannelError> {
        check_distance(distance)?;
        Ok(Interferer { gain, distance })
    }

    /// Unit-distance interferer, as in the equal path-loss network.
    pub fn unit(gain: ChannelGain) -> Interferer {
        Interferer { gain, distance: 1.0 }
    }
}

fn check_distance(d: f64) -> Result<(), ChannelError> {
    if d.is_finite() && d > 0.0 {
        Ok(())
    } else {
        Err(ChannelError::BadDistance(d))
    }
}

/// Received SINR. A zero denominator (no interferers, no environment noise)
/// is reported as `Unbounded` instead of a floating-point infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sinr {
    Finite(f64),
    Unbounded,
}

impl Sinr {
    /// True when the SINR reaches `threshold` (≥).
    #[inline]
    pub fn reaches(self, threshold: f64) -> bool {
        match self {
            Sinr::Finite(v) => v >= threshold,
            Sinr::Unbounded => true,
        }
    }

    /// True when the SINR exceeds `threshold` strictly.
    #[inline]
    pub fn exceeds(self, threshold: f64) -> bool {
        match self {
            Sinr::Finite(v) => v > threshold,
            Sinr::Unbounded => true,
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Sinr::Finite(v) => v,
            Sinr::Unbounded => f64::INFINITY,
        }
    }
}

#[inline]
pub(crate) fn path_loss(distance: f64, alpha: f64) -> f64 {
    if distance == 1.0 {
        1.0
    } else if alpha == 2.0 {
        1.0 / (distance * distance)
    } else {
        distance.powf(-alpha)
    }
}

/// `E_s·g·d^{-α} / (Σ E_s·g_i·d_i^{-α} + N₀/2)`.
pub fn sinr<I>(
    signal_gain: ChannelGain,
    signal_distance: f64,
    interferers: I,
    alpha: f64,
    es: f64,
    n0: f64,
) -> Result<Sinr, ChannelError>
where
    I: IntoIterator<Item = Interferer>,
{
    check_distance(signal_distance)?;
    if !(es.is_finite() && es > 0.0) {
        return Err(ChannelError::BadPower(es));
    }
    if !(n0.is_finite() && n0 >= 0.0) {
        return Err(ChannelError::BadNoise(n0));
    }
    let mut interference = 0.0;
    for i in interferers {
        check_distance(i.distance)?;
        interference += es * i.gain.value() * path_loss(i.distance, alpha);
    }
    let signal = es * signal_gain.value() * path_loss(signal_distance, alpha);
    Ok(sinr_from_powers(signal, interference, n0))
}

/// SINR from already-summed received powers; inputs are trusted.
#[inline]
pub(crate) fn sinr_from_powers(signal: f64, interference: f64, n0: f64) -> Sinr {
    let denominator = interference + n0 / 2.0;
    if denominator == 0.0 {
        if signal == 0.0 {
            return Sinr::Finite(0.0);
        }
        return Sinr::Unbounded;
    }
    Sinr::Finite(signal / denominator)
}

/// CDF of min(g₁, g₂) for two independent Exp(1) gains: `1 − e^{−2x}`.
pub fn min_pair_cdf(x: f64) -> f64 {
    if x > 0.0 {
        -(-2.0 * x).exp_m1()
    } else {
        0.0
    }
}

/// CDF of the largest of `n` independent min-pairs: `(1 − e^{−2x})ⁿ`.
pub fn max_of_min_cdf(x: f64, n: u32) -> f64 {
    if x > 0.0 {
        min_pair_cdf(x).powi(n as i32)
    } else {
        0.0
    }
}
